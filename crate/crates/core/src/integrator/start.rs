//! Starting procedure: initial external stages from scaled derivatives of
//! each partition's right-hand side along a reference trajectory.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::dense::Matrix;
use crate::tableau::{AdiMethod, PartitionLayout};

use super::system::PartitionedSystem;
use super::ExternalStages;

/// Where the states `y(t0 + k h)`, `k = 0..p-1`, come from.
#[derive(Clone, Debug)]
pub enum StartReference {
    /// Use [`PartitionedSystem::exact`]; fails if the system has none.
    Exact,
    /// States at `t0, t0 + h, .., t0 + (p-1) h`.
    Trajectory(Vec<Vec<f64>>),
    /// Integrate from `y0` with classical RK4 at `h / substeps`.
    Integrate { y0: Vec<f64>, substeps: usize },
}

/// One-sided finite-difference weights on the nodes `0, 1, .., n-1` (unit
/// spacing): row `m` approximates the `m`-th derivative at node 0.
pub fn forward_difference_weights(n: usize) -> Matrix {
    // Taylor-scaled Vandermonde T[i][j] = j^i / i!; alpha^(m) solves T alpha = e_m.
    let taylor = Matrix::from_fn(n, n, |i, j| {
        (j as f64).powi(i as i32) / (1..=i).map(|k| k as f64).product::<f64>()
    });
    taylor
        .inverse()
        .expect("Vandermonde on distinct nodes is nonsingular")
        .transpose()
}

/// Classical RK4 on the unsplit right-hand side, returning states at every
/// multiple of `h` up to `count - 1`.
pub fn rk4_reference<S: PartitionedSystem + ?Sized>(
    sys: &S,
    t0: f64,
    h: f64,
    y0: &[f64],
    count: usize,
    substeps: usize,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    let substeps = substeps.max(1);
    let dt = h / substeps as f64;
    let mut y = y0.to_vec();
    let mut out = vec![y.clone()];
    let mut t = t0;
    let axpy = |y: &[f64], k: &[f64], a: f64| -> Vec<f64> { y.iter().zip(k).map(|(y, k)| y + a * k).collect() };
    for _ in 1..count {
        for _ in 0..substeps {
            let k1 = sys.full_rhs(t, &y, exec)?;
            let k2 = sys.full_rhs(t + dt / 2.0, &axpy(&y, &k1, dt / 2.0), exec)?;
            let k3 = sys.full_rhs(t + dt / 2.0, &axpy(&y, &k2, dt / 2.0), exec)?;
            let k4 = sys.full_rhs(t + dt, &axpy(&y, &k3, dt), exec)?;
            for i in 0..y.len() {
                y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            }
            t += dt;
        }
        out.push(y.clone());
    }
    Ok(out)
}

/// Reference states `y(t0 + k h)` for `k = 0..count-1`.
pub fn reference_states<S: PartitionedSystem + ?Sized>(
    sys: &S,
    t0: f64,
    h: f64,
    count: usize,
    reference: &StartReference,
    exec: Execution,
) -> Result<Vec<Vec<f64>>> {
    match reference {
        StartReference::Exact => (0..count)
            .map(|k| sys.exact(t0 + k as f64 * h).ok_or(Error::MissingReference))
            .collect(),
        StartReference::Trajectory(states) => {
            if states.len() < count {
                return Err(Error::MissingReference);
            }
            Ok(states[..count].to_vec())
        }
        StartReference::Integrate { y0, substeps } => rk4_reference(sys, t0, h, y0, count, *substeps, exec),
    }
}

/// Initial external stages for every computed family `mu`:
///
/// ```text
/// xi_i^mu = w_{i,0} y(t0) + sum_sigma sum_{k=1..p} w^{mu,sigma}_{i,k} h^k d^{k-1}/dt^{k-1} f_sigma(t, y(t)) |_{t0}
/// ```
///
/// with `w^{mu,sigma}` taken from the base method of block `(mu, sigma)` and
/// the derivatives replaced by one-sided differences on nodes `t0 + k h`.
/// Returns the stages and the number of right-hand-side evaluations.
pub fn start_external_stages<S: PartitionedSystem + ?Sized>(
    m: &AdiMethod,
    layout: &PartitionLayout,
    sys: &S,
    t0: f64,
    h: f64,
    reference: &StartReference,
    exec: Execution,
) -> Result<(ExternalStages, usize)> {
    let p = m.order;
    let d = sys.dim();
    let n = layout.n_partitions();
    if sys.n_partitions() != n {
        return Err(crate::error::dim_err("partitions", n, sys.n_partitions()));
    }
    let states = reference_states(sys, t0, h, p, reference, exec)?;
    let mut evals = 0;
    // fk[sigma][k] = f_sigma(t0 + k h, y(t0 + k h))
    let mut fk = vec![vec![vec![0.0; d]; p]; n];
    for (sigma, row) in fk.iter_mut().enumerate() {
        for (k, out) in row.iter_mut().enumerate() {
            sys.rhs(sigma, t0 + k as f64 * h, &states[k], out, exec)?;
            evals += 1;
        }
    }
    let weights = forward_difference_weights(p);
    // deriv[sigma][m] ~ h^{m+1} f_sigma^{(m)}(t0)
    let deriv: Vec<Vec<Vec<f64>>> = fk
        .iter()
        .map(|row| {
            (0..p)
                .map(|mm| {
                    let mut acc = vec![0.0; d];
                    for (k, f) in row.iter().enumerate() {
                        let wgt = weights[(mm, k)] * h;
                        if wgt != 0.0 {
                            acc.iter_mut().zip(f).for_each(|(a, fi)| *a += wgt * fi);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect();
    let r = m.implicit.externals();
    let y0 = &states[0];
    let xi = (0..layout.stage_row_count())
        .map(|mu| {
            (0..r)
                .map(|i| {
                    let w0 = m.implicit.w[(i, 0)];
                    let mut x: Vec<f64> = y0.iter().map(|y| w0 * y).collect();
                    for (sigma, ds) in deriv.iter().enumerate() {
                        let base = m.block_base(layout, mu, sigma);
                        for k in 1..=p {
                            let w = base.w[(i, k)];
                            if w != 0.0 {
                                x.iter_mut().zip(&ds[k - 1]).for_each(|(a, b)| *a += w * b);
                            }
                        }
                    }
                    x
                })
                .collect()
        })
        .collect();
    Ok((ExternalStages { xi, step: 0 }, evals))
}
