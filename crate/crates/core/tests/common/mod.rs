#![allow(dead_code)]

use adi_glm::integrator::{ExternalStages, ScalarTestSystem, Stepper};
use adi_glm::linalg::{Grid, Matrix, Tridiagonal};
use adi_glm::stability::assembled_stability_matrix;
use adi_glm::tableau::{assemble_adi, AdiMethod, PartitionLayout};
use adi_glm::Execution;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn layouts() -> Vec<PartitionLayout> {
    vec![
        PartitionLayout::all_stiff(2).unwrap(),
        PartitionLayout::all_stiff(3).unwrap(),
        PartitionLayout::two_stiff_one_explicit(),
    ]
}

/// Random complex number with `re in [-re_max, 0]`, `|im| <= im_max`.
pub fn left_half_plane(rng: &mut impl Rng, re_max: f64, im_max: f64) -> Complex64 {
    Complex64::new(-rng.gen_range(0.0..re_max), rng.gen_range(-im_max..im_max))
}

pub fn dense_of(t: &Tridiagonal) -> Matrix {
    let n = t.len();
    Matrix::from_fn(n, n, |i, j| t.get(i, j))
}

/// Dense `L` acting along `axis` of `grid`, assembled entry by entry from
/// multi-indices.
pub fn dense_directional(grid: &Grid, axis: usize, t: &Tridiagonal) -> Matrix {
    let n = grid.len();
    Matrix::from_fn(n, n, |row, col| {
        let (ri, ci) = (grid.unravel(row), grid.unravel(col));
        let same_elsewhere = (0..grid.ndim()).all(|a| a == axis || ri[a] == ci[a]);
        if same_elsewhere {
            t.get(ri[axis], ci[axis])
        } else {
            0.0
        }
    })
}

/// One step of the stepper on the realified scalar test problem with `h = 1`,
/// compared against `M(eta) xi` from the assembled tableau. Returns the max
/// deviation relative to `max(1, |M xi|)`.
pub fn step_vs_stability_matrix(m: &AdiMethod, layout: PartitionLayout, eta: &[Complex64], xi: &[Vec<Complex64>]) -> f64 {
    let sys = ScalarTestSystem::new(eta, Complex64::new(1.0, 0.0));
    let stages = ExternalStages {
        xi: xi
            .iter()
            .map(|f| f.iter().map(|z| vec![z.re, z.im]).collect())
            .collect(),
        step: 0,
    };
    let mut stepper = Stepper::new(m, layout, &sys, Execution::Sequential).unwrap();
    let report = stepper.step(0.0, 1.0, &stages).unwrap();

    let t = assemble_adi(m, layout).unwrap();
    let big = assembled_stability_matrix(&t, eta, |x| x).unwrap();
    let n = layout.n_partitions();
    let stacked: Vec<Complex64> = (0..n).flat_map(|mu| xi[layout.family_of(mu)].iter().copied()).collect();
    let expect = big.matvec(&stacked);
    let r = m.implicit.externals();
    let scale = expect.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let mut worst = 0.0f64;
    for mu in 0..n {
        for i in 0..r {
            let got = &report.xi.xi[layout.family_of(mu)][i];
            let want = expect[mu * r + i];
            worst = worst.max((got[0] - want.re).abs()).max((got[1] - want.im).abs());
        }
    }
    worst / scale
}

/// Greedy matching distance between two multisets of complex numbers.
pub fn spectrum_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst = 0.0f64;
    for x in a {
        let (k, d) = b
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, y)| (k, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap();
        used[k] = true;
        worst = worst.max(d);
    }
    worst
}

pub fn random_complex_matrix(rng: &mut impl Rng, n: usize) -> Matrix<Complex64> {
    Matrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

/// Least-squares slope of `log(err)` against `log(h)`.
pub fn loglog_slope(h: &[f64], err: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = h.iter().zip(err).map(|(h, e)| (h.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Order-condition residuals of a base tableau evaluated exactly in rational
/// arithmetic on the stored binary coefficients; returns the largest one.
pub fn exact_order_residual(t: &adi_glm::BaseTableau) -> f64 {
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};

    let q = |x: f64| BigRational::from_float(x).expect("finite coefficient");
    let fact = |k: usize| BigRational::from_integer((1..=k).fold(BigInt::one(), |a, j| a * BigInt::from(j)));
    let s = t.stages();
    let r = t.externals();
    let c: Vec<BigRational> = t.c.iter().map(|&x| q(x)).collect();
    let pow = |k: usize| -> Vec<BigRational> {
        c.iter()
            .map(|ci| (0..k).fold(BigRational::one(), |a, _| a * ci) / fact(k))
            .collect()
    };
    let mut worst = BigRational::zero();
    let abs = |x: BigRational| if x < BigRational::zero() { -x } else { x };
    for k in 0..=t.p {
        let ck = pow(k);
        let ck1 = if k > 0 { pow(k - 1) } else { vec![BigRational::zero(); s] };
        if k <= t.q {
            // c^k/k! - A c^(k-1)/(k-1)! - U w_k
            for i in 0..s {
                let mut acc = ck[i].clone();
                if k > 0 {
                    for j in 0..s {
                        acc -= q(t.a[(i, j)]) * &ck1[j];
                    }
                }
                for j in 0..r {
                    acc -= q(t.u[(i, j)]) * q(t.w[(j, k)]);
                }
                let a = abs(acc);
                if a > worst {
                    worst = a;
                }
            }
        }
        // sum_l w_(k-l)/l! - B c^(k-1)/(k-1)! - V w_k
        for i in 0..r {
            let mut acc = BigRational::zero();
            for l in 0..=k {
                acc += q(t.w[(i, k - l)]) / fact(l);
            }
            if k > 0 {
                for j in 0..s {
                    acc -= q(t.b[(i, j)]) * &ck1[j];
                }
            }
            for j in 0..r {
                acc -= q(t.v[(i, j)]) * q(t.w[(j, k)]);
            }
            let a = abs(acc);
            if a > worst {
                worst = a;
            }
        }
    }
    worst.to_f64().unwrap()
}
