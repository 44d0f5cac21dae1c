//! Catalog of ADI-DIMSIM coefficient sets of orders two, three and four, plus
//! a small second-order block tableau used for permutation checks.
//!
//! Orders three and four are stored as integer fractions and divided once at
//! load; order two is built from closed-form expressions in `sqrt(2)`.

use num_rational::Ratio;

use crate::error::{Error, Result};
use crate::linalg::dense::Matrix;
use crate::tableau::{AdiMethod, AssembledTableau, BaseTableau, PartitionLayout};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MethodId {
    AdiDimsim2,
    AdiDimsim3,
    AdiDimsim4,
    RemarkDimsim2,
}

impl MethodId {
    pub const CATALOG: [MethodId; 3] = [MethodId::AdiDimsim2, MethodId::AdiDimsim3, MethodId::AdiDimsim4];

    pub fn from_order(order: usize) -> Result<Self> {
        match order {
            2 => Ok(MethodId::AdiDimsim2),
            3 => Ok(MethodId::AdiDimsim3),
            4 => Ok(MethodId::AdiDimsim4),
            o => Err(Error::InvalidArgument(format!("no ADI-DIMSIM of order {o}"))),
        }
    }
}

type Frac = (i128, i128);

fn frac(x: Frac) -> f64 {
    x.0 as f64 / x.1 as f64
}

fn mat(rows: &[&[Frac]]) -> Matrix {
    let data: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().copied().map(frac).collect()).collect();
    Matrix::from_rows(&data)
}

/// `V = 1 v^T`.
fn rank_one_v(v: &[f64]) -> Matrix {
    Matrix::from_fn(v.len(), v.len(), |_, j| v[j])
}

fn build(
    name: &str,
    order: usize,
    gamma: f64,
    c: Vec<f64>,
    v: &[f64],
    (ai, bi, wi): (Matrix, Matrix, Matrix),
    (ae, be, we): (Matrix, Matrix, Matrix),
) -> AdiMethod {
    let s = c.len();
    let u = Matrix::identity(s);
    let vm = rank_one_v(v);
    let implicit = BaseTableau::new(ai, u.clone(), bi, vm.clone(), wi, c.clone(), order, order)
        .expect("implicit base dimensions");
    let explicit = BaseTableau::new(ae, u, be, vm, we, c, order, order).expect("explicit base dimensions");
    AdiMethod::new(name, order, gamma, implicit, explicit)
        .unwrap_or_else(|e| panic!("catalog method {name} failed validation: {e}"))
}

fn dimsim2() -> AdiMethod {
    let r2 = 2f64.sqrt();
    let gamma = (2.0 - r2) / 2.0;
    let ai = Matrix::from_rows(&[[gamma, 0.0], [2.0 * (r2 + 3.0) / 7.0, gamma]]);
    let bi = Matrix::from_rows(&[
        [(73.0 - 34.0 * r2) / 28.0, (4.0 * r2 - 5.0) / 4.0],
        [3.0 * (29.0 - 16.0 * r2) / 28.0, (34.0 * r2 - 45.0) / 28.0],
    ]);
    let wi = Matrix::from_rows(&[
        [1.0, (r2 - 2.0) / 2.0, 0.0],
        [1.0, 3.0 * (r2 - 4.0) / 14.0, (r2 - 1.0) / 2.0],
    ]);
    let ae = Matrix::from_rows(&[[0.0, 0.0], [1.5, 0.0]]);
    let be = Matrix::from_rows(&[
        [1.0 / r2, (3.0 - r2) / 4.0],
        [(r2 - 1.0) / 2.0, (3.0 - r2) / 4.0],
    ]);
    let we = Matrix::from_rows(&[[1.0, 0.0, 0.0], [1.0, -0.5, 0.5]]);
    let v = [(3.0 - r2) / 2.0, (r2 - 1.0) / 2.0];
    build(
        "ADI-DIMSIM2",
        2,
        gamma,
        vec![0.0, 1.0],
        &v,
        (ai, bi, wi),
        (ae, be, we),
    )
}

fn dimsim3() -> AdiMethod {
    const G: Frac = (129981159316, 298213221025);
    let ai = mat(&[
        &[G, (0, 1), (0, 1)],
        &[(472981046840, 1888035733227), G, (0, 1)],
        &[(-408860438935, 337456558734), (1049716501919, 1048380236594), G],
    ]);
    let bi = mat(&[
        &[(818629988268, 981817092145), (735879558291, 1139134361459), (-96693387431, 306159262034)],
        &[(435713380671, 718693545019), (3397277300866, 2639826970205), (-581689679739, 1212506039656)],
        &[(-164008995335, 531777165056), (3204278525979, 842472621931), (-1170634530631, 1044535547981)],
    ]);
    let wi = mat(&[
        &[(1, 1), (-129981159316, 298213221025), (0, 1), (0, 1)],
        &[(1, 1), (-63231801579, 339260252164), (-94226735668, 1013918320559), (-50172116077, 1490999795865)],
        &[(1, 1), (1224205243956, 1580735023225), (-377260820095, 864278390147), (-145496067686, 824686465859)],
    ]);
    let ae = mat(&[
        &[(0, 1), (0, 1), (0, 1)],
        &[(692830401049, 1119419041371), (0, 1), (0, 1)],
        &[(-974910195245, 1036334372568), (1458124485343, 1218848111125), (0, 1)],
    ]);
    let be = mat(&[
        &[(274198327012, 348784765929), (335124252337, 1242427076379), (256046237035, 1044616400532)],
        &[(2367946890051, 2381074405894), (-395462379375, 996294720374), (391448928279, 669688356392)],
        &[(1211513153203, 1601457627995), (473388990672, 901108379101), (1335987676745, 1749669440649)],
    ]);
    let we = mat(&[
        &[(1, 1), (0, 1), (0, 1), (0, 1)],
        &[(1, 1), (-105007291910, 883010702197), (1, 8), (1, 48)],
        &[(1, 1), (6500435948486, 8732264247243), (-119638187109, 1218848111125), (25266119777, 1475180609484)],
    ]);
    let v = [
        frac((1611220452657, 2918396719813)),
        frac((626900045900, 853091602939)),
        frac((-165394139815, 576391394057)),
    ];
    build(
        "ADI-DIMSIM3",
        3,
        frac(G),
        vec![0.0, 0.5, 1.0],
        &v,
        (ai, bi, wi),
        (ae, be, we),
    )
}

fn dimsim4() -> AdiMethod {
    const G: Frac = (2, 5);
    const Z: Frac = (0, 1);
    const O: Frac = (1, 1);
    let ai = mat(&[
        &[G, Z, Z, Z],
        &[(1, 155), G, Z, Z],
        &[(-3, 127), (31, 72), G, Z],
        &[(6, 139), (12, 19), (29, 95), G],
    ]);
    let bi = mat(&[
        &[
            (25640275033859, 233564187988800),
            (405169687, 540615360),
            (1089772729, 8109230400),
            (70445177, 426801600),
        ],
        &[
            (89870426730779, 233564187988800),
            (-545995987, 1621846080),
            (13906861889, 8109230400),
            (-1223893451, 4410283200),
        ],
        &[
            (292292722987739, 233564187988800),
            (-5722388059, 1621846080),
            (5251926081, 901025600),
            (-115646334041, 54203803200),
        ],
        &[
            (12591629268162881, 4437719571787200),
            (-4936252337, 540615360),
            (102615203329, 8109230400),
            (-5841129112303, 1127183025600),
        ],
    ]);
    let wi = mat(&[
        &[O, (-2, 5), Z, Z, Z],
        &[O, (-34, 465), (-7, 90), (-13, 810), (-19, 9720)],
        &[O, (-6413, 45720), (-203, 1080), (-137, 2160), (-827, 58320)],
        &[O, (-5018, 13205), (-179, 570), (-233, 1710), (-2707, 61560)],
    ]);
    let ae = mat(&[
        &[Z, Z, Z, Z],
        &[(768, 7129), Z, Z, Z],
        &[(2699, 8714), (4969, 11444), Z, Z],
        &[(2629, 3049), (2643, 20780), (11707, 22938), Z],
    ]);
    let be = mat(&[
        &[
            (9887514441977875393, 8084061960608111040),
            (75125403707867, 1268701473326400),
            (200041286909, 326332503360),
            (-5924747, 85360320),
        ],
        &[
            (8877006696901861513, 8084061960608111040),
            (727096994167267, 1268701473326400),
            (-67370070011, 326332503360),
            (119019300359, 202844573760),
        ],
        &[
            (17771936994130966829533, 23128501269299805685440),
            (249067742877763, 140966830369600),
            (-519937182674317, 311212430704320),
            (940676971064501, 1064048569640640),
        ],
        &[
            (8566493244911672759404729, 32110678261545596037650880),
            (17071987325364576461, 4850245732526827200),
            (-257098496412689, 67811894198208),
            (275159340062707361, 206758465410336192),
        ],
    ]);
    let we = mat(&[
        &[O, Z, Z, Z, Z],
        &[O, (4825, 21387), (1, 18), (1, 162), (1, 1944)],
        &[O, (-11557817, 149584524), (7981, 102996), (46831, 1853928), (30869, 5561784)],
        &[
            O,
            (-363193513153, 726655425180),
            (83904703, 714977460),
            (198121973, 4289864760),
            (302650439, 19304391420),
        ],
    ]);
    let v = [
        frac((3, 40)),
        frac((-77, 277)),
        frac((-41, 107)),
        frac((1880483, 1185560)),
    ];
    build(
        "ADI-DIMSIM4",
        4,
        frac(G),
        vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
        &v,
        (ai, bi, wi),
        (ae, be, we),
    )
}

/// A validated ADI-DIMSIM pair. `RemarkDimsim2` is a block tableau only;
/// use [`get_remark_tableau`] for it.
pub fn get_method(id: MethodId) -> Result<AdiMethod> {
    match id {
        MethodId::AdiDimsim2 => Ok(dimsim2()),
        MethodId::AdiDimsim3 => Ok(dimsim3()),
        MethodId::AdiDimsim4 => Ok(dimsim4()),
        MethodId::RemarkDimsim2 => Err(Error::InvalidArgument(
            "the remark method exists only as an assembled tableau".into(),
        )),
    }
}

pub fn method_by_order(order: usize) -> Result<AdiMethod> {
    get_method(MethodId::from_order(order)?)
}

/// The second-order, two-way block tableau (gamma = 5/8) in exact rationals.
pub fn remark_tableau_exact() -> AssembledTableau<Ratio<i64>> {
    let q = |n: i64, d: i64| Ratio::new(n, d);
    let z = q(0, 1);
    let one = q(1, 1);
    let g = q(5, 8);
    let a = Matrix::from_rows(&[
        [g, z, z, z],
        [q(1, 4), g, q(1, 2), z],
        [g, z, g, z],
        [q(1, 4), g, q(1, 4), g],
    ]);
    let b = Matrix::from_rows(&[
        [q(1, 2), q(-5, 32), q(-3, 128), q(5, 128)],
        [z, q(27, 32), q(13, 128), q(85, 128)],
        [q(-3, 128), q(5, 128), q(-3, 128), q(5, 128)],
        [q(13, 128), q(85, 128), q(13, 128), q(85, 128)],
    ]);
    let vb = Matrix::from_rows(&[[q(-5, 16), q(21, 16)], [q(-5, 16), q(21, 16)]]);
    AssembledTableau {
        a,
        u: Matrix::identity(4),
        b,
        v: vb.kron_identity(2),
        c: vec![z, one, z, one],
        stage_partition: vec![0, 0, 1, 1],
        layout: PartitionLayout::all_stiff(2).expect("two-way layout"),
    }
}

/// [`remark_tableau_exact`] in floating point (every entry is dyadic, so exact).
pub fn get_remark_tableau() -> AssembledTableau {
    let t = remark_tableau_exact();
    let f = |x: Ratio<i64>| *x.numer() as f64 / *x.denom() as f64;
    AssembledTableau {
        a: t.a.map(f),
        u: t.u.map(f),
        b: t.b.map(f),
        v: t.v.map(f),
        c: t.c.iter().map(|&x| f(x)).collect(),
        stage_partition: t.stage_partition,
        layout: t.layout,
    }
}
