//! The ADI-GLM stepper.
//!
//! Internal stages are computed in the order `Y_1^(1), .., Y_1^(F), Y_2^(1), ..`
//! where `F` is the number of computed stage families. Stage `Y_i^(mu)` is
//! implicit only in partition `mu`:
//!
//! ```text
//! (I - h gamma L_mu) Y_i^(mu) = sum_j u_ij xi_j^(mu)
//!                              + h sum_sigma sum_{j<i} a^{mu,sigma}_ij f_sigma(Y_j^(sigma))
//!                              + h gamma sum_{sigma<mu} f_sigma(Y_i^(sigma))
//!                              + h gamma g_mu(t + c_i h)
//! ```
//!
//! and the external stages are updated with `B^{mu,sigma}` and `V`.

mod start;
mod system;

pub use start::{forward_difference_weights, reference_states, rk4_reference, start_external_stages, StartReference};
pub use system::{linearity_defect, DirectionalOperator, PartitionedSystem, ScalarTestSystem, ShiftedSolver};

use crate::error::{dim_err, Error, Result};
use crate::exec::Execution;
use crate::problems::relative_l2_error;
use crate::tableau::{AdiMethod, PartitionLayout};

/// External stages `xi[family][i]` after step `step`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExternalStages {
    pub xi: Vec<Vec<Vec<f64>>>,
    pub step: usize,
}

#[derive(Clone, Debug)]
pub struct StepReport {
    /// Internal stages `stages[family][i]`.
    pub stages: Vec<Vec<Vec<f64>>>,
    pub xi: ExternalStages,
    /// Directional solves performed (one per sweep over all grid lines).
    pub linear_solves: usize,
    pub rhs_evals: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counters {
    pub rhs_evals: usize,
    pub start_rhs_evals: usize,
    pub linear_solves: usize,
    pub factorizations: usize,
    pub steps: usize,
}

/// Owns the factorizations of `I - h gamma L_mu` for one integration and
/// rebuilds them only when `h` changes.
pub struct Stepper<'a, S: PartitionedSystem + ?Sized> {
    method: &'a AdiMethod,
    layout: PartitionLayout,
    sys: &'a S,
    exec: Execution,
    solvers: Vec<ShiftedSolver>,
    factored_h: Option<f64>,
    factorizations: usize,
}

impl<'a, S: PartitionedSystem + ?Sized> Stepper<'a, S> {
    pub fn new(method: &'a AdiMethod, layout: PartitionLayout, sys: &'a S, exec: Execution) -> Result<Self> {
        if sys.n_partitions() != layout.n_partitions() {
            return Err(dim_err("partitions", layout.n_partitions(), sys.n_partitions()));
        }
        Ok(Stepper {
            method,
            layout,
            sys,
            exec,
            solvers: Vec::new(),
            factored_h: None,
            factorizations: 0,
        })
    }

    /// Number of times the directional systems were (re)factored.
    pub fn factorizations(&self) -> usize {
        self.factorizations
    }

    fn ensure_factored(&mut self, h: f64) -> Result<()> {
        if self.factored_h == Some(h) {
            return Ok(());
        }
        let gamma = self.method.gamma;
        self.solvers = (0..self.layout.stage_row_count())
            .map(|mu| {
                self.sys
                    .operator(mu)
                    .factor(h, gamma)
                    .map_err(|_| Error::SingularStage { family: mu, stage: 0 })
            })
            .collect::<Result<_>>()?;
        self.factored_h = Some(h);
        self.factorizations += self.solvers.len();
        Ok(())
    }

    /// One step from `t` to `t + h`.
    pub fn step(&mut self, t: f64, h: f64, xi: &ExternalStages) -> Result<StepReport> {
        self.ensure_factored(h)?;
        let m = self.method;
        let layout = self.layout;
        let exec = self.exec;
        let s = m.stages();
        let r = m.implicit.externals();
        let fam = layout.stage_row_count();
        let n = layout.n_partitions();
        let d = self.sys.dim();
        if xi.xi.len() != fam || xi.xi.iter().any(|f| f.len() != r || f.iter().any(|x| x.len() != d)) {
            return Err(dim_err("external stages", format!("{fam} x {r} x {d}"), "mismatched"));
        }
        let c = m.c();
        let u = m.u();
        let mut stages = vec![vec![Vec::new(); s]; fam];
        // fvals[sigma][j] = f_sigma(t + c_j h, Y_j^(family_of(sigma)))
        let mut fvals: Vec<Vec<Vec<f64>>> = vec![vec![Vec::new(); s]; n];
        let mut rhs_evals = 0;
        let mut linear_solves = 0;
        let mut g = vec![0.0; d];

        for i in 0..s {
            let ti = t + c[i] * h;
            for mu in 0..fam {
                let mut acc = vec![0.0; d];
                for (j, xj) in xi.xi[mu].iter().enumerate() {
                    let uij = u[(i, j)];
                    if uij != 0.0 {
                        acc.iter_mut().zip(xj).for_each(|(a, x)| *a += uij * x);
                    }
                }
                for (sigma, fs) in fvals.iter().enumerate() {
                    let a = &m.block_base(&layout, mu, sigma).a;
                    for (j, f) in fs.iter().enumerate().take(i) {
                        let coef = h * a[(i, j)];
                        if coef != 0.0 {
                            acc.iter_mut().zip(f).for_each(|(x, fj)| *x += coef * fj);
                        }
                    }
                    // Diagonal coupling to families already computed at this stage index.
                    if sigma < mu && a[(i, i)] != 0.0 {
                        let coef = h * a[(i, i)];
                        acc.iter_mut().zip(&fs[i]).for_each(|(x, fi)| *x += coef * fi);
                    }
                }
                self.sys.affine_part(mu, ti, &mut g);
                let hg = h * m.gamma;
                acc.iter_mut().zip(&g).for_each(|(x, gi)| *x += hg * gi);
                let y = self.solvers[mu]
                    .solve(&acc, exec)
                    .map_err(|_| Error::SingularStage { family: mu, stage: i })?;
                if y.iter().any(|v| !v.is_finite()) {
                    return Err(Error::SingularStage { family: mu, stage: i });
                }
                linear_solves += 1;
                for sigma in (0..n).filter(|&sg| layout.family_of(sg) == mu) {
                    let mut f = vec![0.0; d];
                    self.sys.rhs(sigma, ti, &y, &mut f, exec)?;
                    rhs_evals += 1;
                    fvals[sigma][i] = f;
                }
                stages[mu][i] = y;
            }
        }

        let v = m.v();
        let new_xi = (0..fam)
            .map(|mu| {
                (0..r)
                    .map(|i| {
                        let mut x = vec![0.0; d];
                        for (j, xj) in xi.xi[mu].iter().enumerate() {
                            let vij = v[(i, j)];
                            if vij != 0.0 {
                                x.iter_mut().zip(xj).for_each(|(a, b)| *a += vij * b);
                            }
                        }
                        for (sigma, fs) in fvals.iter().enumerate() {
                            let b = &m.block_base(&layout, mu, sigma).b;
                            for (j, f) in fs.iter().enumerate() {
                                let coef = h * b[(i, j)];
                                if coef != 0.0 {
                                    x.iter_mut().zip(f).for_each(|(a, fj)| *a += coef * fj);
                                }
                            }
                        }
                        x
                    })
                    .collect()
            })
            .collect();

        Ok(StepReport {
            stages,
            xi: ExternalStages {
                xi: new_xi,
                step: xi.step + 1,
            },
            linear_solves,
            rhs_evals,
        })
    }
}

/// One step with a throwaway [`Stepper`].
pub fn adi_step<S: PartitionedSystem + ?Sized>(
    m: &AdiMethod,
    layout: PartitionLayout,
    sys: &S,
    t: f64,
    h: f64,
    xi: &ExternalStages,
    exec: Execution,
) -> Result<StepReport> {
    Stepper::new(m, layout, sys, exec)?.step(t, h, xi)
}

/// The last internal stage of the last computed family; valid because `c_s = 1`.
pub fn finish(m: &AdiMethod, report: &StepReport) -> Vec<f64> {
    debug_assert_eq!(m.c().last(), Some(&1.0));
    report
        .stages
        .last()
        .and_then(|f| f.last())
        .cloned()
        .unwrap_or_default()
}

#[derive(Clone, Debug)]
pub struct IntegrateOptions {
    pub exec: Execution,
    pub start: StartReference,
}

impl Default for IntegrateOptions {
    fn default() -> Self {
        IntegrateOptions {
            exec: Execution::default(),
            start: StartReference::Exact,
        }
    }
}

#[derive(Clone, Debug)]
pub struct IntegrationResult {
    pub state: Vec<f64>,
    /// Relative l2 error at the final time when an exact solution is known.
    pub error: Option<f64>,
    pub counters: Counters,
}

/// Starting procedure, `nsteps` uniform steps over `[t0, tf]`, ending procedure.
pub fn integrate<S: PartitionedSystem + ?Sized>(
    m: &AdiMethod,
    layout: PartitionLayout,
    sys: &S,
    t0: f64,
    tf: f64,
    nsteps: usize,
    opts: &IntegrateOptions,
) -> Result<IntegrationResult> {
    if nsteps < m.order {
        return Err(Error::InvalidArgument(format!(
            "{nsteps} steps is fewer than the method order {}",
            m.order
        )));
    }
    let h = (tf - t0) / nsteps as f64;
    let (mut xi, start_evals) = start_external_stages(m, &layout, sys, t0, h, &opts.start, opts.exec)?;
    let mut stepper = Stepper::new(m, layout, sys, opts.exec)?;
    let mut counters = Counters {
        start_rhs_evals: start_evals,
        ..Counters::default()
    };
    let mut last = None;
    for n in 0..nsteps {
        let t = t0 + n as f64 * h;
        let report = stepper.step(t, h, &xi)?;
        counters.rhs_evals += report.rhs_evals;
        counters.linear_solves += report.linear_solves;
        counters.steps += 1;
        xi = report.xi.clone();
        last = Some(report);
    }
    counters.factorizations = stepper.factorizations();
    let state = finish(m, last.as_ref().expect("at least one step"));
    let error = match sys.exact(tf) {
        Some(exact) => Some(relative_l2_error(&state, &exact)?),
        None => None,
    };
    Ok(IntegrationResult { state, error, counters })
}
