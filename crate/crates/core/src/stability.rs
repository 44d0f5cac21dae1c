//! Linear stability of ADI methods on the split scalar test equation
//! `u' = sum_sigma lambda_sigma u`.
//!
//! With `eta_sigma = h lambda_sigma` and `Z = blkdiag(eta_sigma I_s)` one step
//! maps the stacked external stages by
//!
//! ```text
//! M(eta) = V + B Z (I - A Z)^{-1} U
//! ```
//!
//! where `(A, U, B, V)` is the assembled block tableau. Region membership is
//! decided on the spectral radius: `rho(M) <= 1 + MEMBERSHIP_TOLERANCE`.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{dim_err, Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::linalg::dense::{DenseComplexMatrix, Matrix, Scalar};
use crate::linalg::eigen::spectral_radius;
use crate::tableau::{assemble_adi, AdiMethod, AssembledTableau, BaseTableau, PartitionLayout};

pub const MEMBERSHIP_TOLERANCE: f64 = 1e-10;
/// Points with `1 - BOUNDARY_BAND < rho <= 1 + MEMBERSHIP_TOLERANCE` are flagged
/// as possible defective-boundary cases.
pub const BOUNDARY_BAND: f64 = 1e-6;

#[derive(Clone, Debug)]
pub struct StabilityEvaluation {
    pub eta: Vec<Complex64>,
    pub matrix: DenseComplexMatrix,
    pub rho: f64,
}

impl StabilityEvaluation {
    fn new(eta: Vec<Complex64>, matrix: DenseComplexMatrix) -> Result<Self> {
        let rho = spectral_radius(&matrix)?;
        Ok(StabilityEvaluation { eta, matrix, rho })
    }

    pub fn is_member(&self) -> bool {
        is_member(self.rho)
    }
}

pub fn is_member(rho: f64) -> bool {
    rho <= 1.0 + MEMBERSHIP_TOLERANCE
}

fn resolvent_error(what: &str, eta: &[Complex64]) -> Error {
    Error::Singular {
        context: format!("{what} resolvent singular at eta = {eta:?}"),
    }
}

/// `M(eta) = V + eta B (I - eta A)^{-1} U` for one base method.
pub fn base_stability_matrix(t: &BaseTableau, eta: Complex64) -> Result<DenseComplexMatrix> {
    t.validate_dims()?;
    let s = t.stages();
    let a = t.a.to_complex();
    let lhs = Matrix::identity(s).sub(&a.scale(eta));
    let x = lhs
        .solve(&t.u.to_complex())
        .map_err(|_| resolvent_error("base", &[eta]))?;
    Ok(t.v.to_complex().add(&t.b.to_complex().scale(eta).matmul(&x)))
}

/// Stability matrix of an assembled block tableau; stage `l` sees
/// `eta[stage_partition[l]]`.
pub fn assembled_stability_matrix<T: Scalar>(
    t: &AssembledTableau<T>,
    eta: &[Complex64],
    to_f64: impl Fn(T) -> f64,
) -> Result<DenseComplexMatrix> {
    let ns = t.stage_count();
    if let Some(&bad) = t.stage_partition.iter().find(|&&p| p >= eta.len()) {
        return Err(dim_err("eta", format!("> {bad} entries"), eta.len()));
    }
    let cx = |m: &Matrix<T>| m.map(|x| Complex64::new(to_f64(x), 0.0));
    let z: Vec<Complex64> = t.stage_partition.iter().map(|&p| eta[p]).collect();
    let a = cx(&t.a);
    // A Z scales columns, B Z likewise.
    let az = Matrix::from_fn(ns, ns, |i, j| a[(i, j)] * z[j]);
    let b = cx(&t.b);
    let bz = Matrix::from_fn(b.rows(), ns, |i, j| b[(i, j)] * z[j]);
    let lhs = Matrix::identity(ns).sub(&az);
    let x = lhs
        .solve(&cx(&t.u))
        .map_err(|_| resolvent_error("assembled", eta))?;
    Ok(cx(&t.v).add(&bz.matmul(&x)))
}

/// `M(eta_1, .., eta_N)` for the all-stiff `N`-way layout.
pub fn adi_stability_matrix(m: &AdiMethod, n: usize, eta: &[Complex64]) -> Result<StabilityEvaluation> {
    if eta.len() != n {
        return Err(dim_err("eta", n, eta.len()));
    }
    let t = assemble_adi(m, PartitionLayout::all_stiff(n)?)?;
    layout_stability(&t, eta)
}

/// Stability evaluation for an already assembled tableau.
pub fn layout_stability(t: &AssembledTableau, eta: &[Complex64]) -> Result<StabilityEvaluation> {
    let matrix = assembled_stability_matrix(t, eta, |x| x)?;
    StabilityEvaluation::new(eta.to_vec(), matrix)
}

/// `M_hat(eta) = M(eta, eta, eta)`, equal stiffness in all three directions.
pub fn m_hat(m: &AdiMethod, eta: Complex64) -> Result<StabilityEvaluation> {
    m_hat_n(m, 3, eta)
}

pub fn m_hat_n(m: &AdiMethod, n: usize, eta: Complex64) -> Result<StabilityEvaluation> {
    adi_stability_matrix(m, n, &vec![eta; n])
}

/// Upper-left block of the all-stiff limit of `M_hat`:
/// `X = V - (B_I - B_E)(A_I - A_E)^{-1} U`.
pub fn limit_block(m: &AdiMethod) -> Result<Matrix> {
    let da = m.implicit.a.sub(&m.explicit.a);
    let db = m.implicit.b.sub(&m.explicit.b);
    let y = da.solve(m.u()).map_err(|_| Error::Singular {
        context: "A_I - A_E is singular".into(),
    })?;
    Ok(m.v().sub(&db.matmul(&y)))
}

/// `mu_ij = 1/(j-i)!` for `i <= j`, zero below the diagonal.
pub fn mu_matrix(p: usize) -> Matrix {
    Matrix::from_fn(p, p, |i, j| {
        if i <= j {
            1.0 / (1..=j - i).map(|k| k as f64).product::<f64>()
        } else {
            0.0
        }
    })
}

/// `C = [1, c, c^2/2, .., c^(p-1)/(p-1)!]`.
pub fn c_matrix(c: &[f64], p: usize) -> Matrix {
    Matrix::from_fn(c.len(), p, |i, k| {
        c[i].powi(k as i32) / (1..=k).map(|j| j as f64).product::<f64>()
    })
}

/// `(W_I - W_E)` restricted to columns `1..=p`.
pub fn w_difference(m: &AdiMethod) -> Matrix {
    let p = m.order;
    let r = m.implicit.externals();
    Matrix::from_fn(r, p, |i, k| m.implicit.w[(i, k + 1)] - m.explicit.w[(i, k + 1)])
}

/// Entrywise residual of `X D - D mu` with `D = W_I - W_E`.
pub fn limit_similarity_residual(m: &AdiMethod) -> Result<f64> {
    let x = limit_block(m)?;
    let d = w_difference(m);
    Ok(x.matmul(&d).sub(&d.matmul(&mu_matrix(m.order))).max_abs())
}

/// 1-norm condition number of `W_I - W_E`.
pub fn w_difference_condition(m: &AdiMethod) -> Result<f64> {
    let d = w_difference(m);
    let inv = d.inverse()?;
    let norm1 = |a: &Matrix| a.transpose().norm_inf();
    Ok(norm1(&d) * norm1(&inv))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RegionKind {
    ExplicitBase,
    ImplicitBase,
    Cplx,
    Real,
}

/// Rectangular sampling grid; `n` points per axis including both ends.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionGrid {
    pub x: (f64, f64),
    pub y: (f64, f64),
    pub n: usize,
}

impl RegionGrid {
    fn coord(range: (f64, f64), n: usize, k: usize) -> f64 {
        if n == 1 {
            range.0
        } else {
            range.0 + (range.1 - range.0) * k as f64 / (n - 1) as f64
        }
    }

    pub fn x_at(&self, k: usize) -> f64 {
        Self::coord(self.x, self.n, k)
    }

    pub fn y_at(&self, k: usize) -> f64 {
        Self::coord(self.y, self.n, k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegionPoint {
    pub x: f64,
    pub y: f64,
    pub rho: f64,
    pub member: bool,
    pub near_boundary: bool,
}

/// Spectral radius for one region sample; resolvent poles give `+inf`.
pub fn region_rho(m: &AdiMethod, kind: RegionKind, partitions: usize, x: f64, y: f64) -> Result<f64> {
    let eval = match kind {
        RegionKind::ExplicitBase => base_stability_matrix(&m.explicit, Complex64::new(x, y)),
        RegionKind::ImplicitBase => base_stability_matrix(&m.implicit, Complex64::new(x, y)),
        RegionKind::Cplx => m_hat_n(m, partitions, Complex64::new(x, y)).map(|e| e.matrix),
        RegionKind::Real => {
            let mut eta = vec![Complex64::new(x, 0.0), Complex64::new(y, 0.0)];
            if partitions == 3 {
                eta.push(Complex64::new(x.max(y), 0.0));
            }
            adi_stability_matrix(m, partitions, &eta).map(|e| e.matrix)
        }
    };
    match eval {
        Ok(mat) => spectral_radius(&mat),
        Err(Error::Singular { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

/// Scans a region column by column, streaming each point to `sink`.
pub fn scan_region(
    m: &AdiMethod,
    kind: RegionKind,
    grid: RegionGrid,
    partitions: usize,
    exec: Execution,
    mut sink: impl FnMut(RegionPoint) -> Result<()>,
) -> Result<()> {
    if grid.n == 0 {
        return Err(Error::InvalidArgument("empty scan grid".into()));
    }
    if !matches!(partitions, 2 | 3) {
        return Err(Error::InvalidArgument(format!("{partitions} partitions")));
    }
    for i in 0..grid.n {
        let x = grid.x_at(i);
        let column = map_indexed(exec, grid.n, |j| {
            let y = grid.y_at(j);
            region_rho(m, kind, partitions, x, y).map(|rho| RegionPoint {
                x,
                y,
                rho,
                member: is_member(rho),
                near_boundary: rho > 1.0 - BOUNDARY_BAND && is_member(rho),
            })
        });
        for p in column {
            sink(p?)?;
        }
    }
    Ok(())
}

pub fn region_csv_header(kind: RegionKind) -> &'static str {
    match kind {
        RegionKind::Real => "eta_x,eta_y,rho,member",
        _ => "re,im,rho,member",
    }
}

fn sig12(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.11e}")
    } else {
        "inf".to_string()
    }
}

pub fn region_csv_row(p: &RegionPoint) -> String {
    format!("{},{},{},{}", sig12(p.x), sig12(p.y), sig12(p.rho), u8::from(p.member))
}

/// Streams a scan straight into CSV.
pub fn write_region_csv<W: Write>(
    m: &AdiMethod,
    kind: RegionKind,
    grid: RegionGrid,
    partitions: usize,
    exec: Execution,
    out: &mut W,
) -> Result<()> {
    writeln!(out, "{}", region_csv_header(kind))?;
    scan_region(m, kind, grid, partitions, exec, |p| {
        writeln!(out, "{}", region_csv_row(&p))?;
        Ok(())
    })
}

/// Samples `rho` along the ray `eta = -r e^{i theta}` (theta in degrees) and
/// brackets every radius interval where `rho - 1 - MEMBERSHIP_TOLERANCE` changes sign.
pub fn ray_transitions(
    m: &AdiMethod,
    kind: RegionKind,
    partitions: usize,
    theta_deg: f64,
    radii: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let dir = -Complex64::from_polar(1.0, theta_deg.to_radians());
    let mut prev: Option<(f64, bool)> = None;
    let mut out = Vec::new();
    for &r in radii {
        let eta = dir * r;
        let rho = region_rho(m, kind, partitions, eta.re, eta.im)?;
        let inside = is_member(rho);
        if let Some((r0, was)) = prev {
            if was != inside {
                out.push((r0, r));
            }
        }
        prev = Some((r, inside));
    }
    Ok(out)
}

/// `n` log-spaced values from `lo` to `hi` (both positive).
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.log10(), hi.log10());
    (0..n)
        .map(|k| 10f64.powf(if n == 1 { a } else { a + (b - a) * k as f64 / (n - 1) as f64 }))
        .collect()
}

/// Largest half-angle (degrees, multiple of `step_deg`) of a wedge about the
/// negative real axis whose sampled rays are entirely inside the region.
pub fn wedge_angle(
    m: &AdiMethod,
    kind: RegionKind,
    partitions: usize,
    radii: &[f64],
    step_deg: f64,
    max_deg: f64,
) -> Result<f64> {
    let mut alpha = 0.0;
    let mut theta = 0.0;
    while theta <= max_deg + 1e-12 {
        let dir = -Complex64::from_polar(1.0, theta.to_radians());
        for &r in radii {
            let eta = dir * r;
            if !is_member(region_rho(m, kind, partitions, eta.re, eta.im)?) {
                return Ok(alpha);
            }
        }
        alpha = theta;
        theta += step_deg;
    }
    Ok(alpha)
}
