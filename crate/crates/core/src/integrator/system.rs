use crate::error::{dim_err, Result};
use crate::exec::Execution;
use crate::linalg::dense::{Lu, Matrix};
use crate::linalg::lines::{apply_lines, solve_lines, Grid};
use crate::linalg::tridiag::{factor_shifted, FactoredTridiagonal, Tridiagonal};

/// The linear (stiff) part of one partition.
#[derive(Clone, Debug)]
pub enum DirectionalOperator {
    /// No linear part; the partition is affine in time only.
    Zero,
    /// A 1D tridiagonal operator applied along every grid line of `axis`.
    Lines { grid: Grid, axis: usize, tri: Tridiagonal },
    /// A small dense operator on the whole state.
    Dense(Matrix),
}

impl DirectionalOperator {
    pub fn apply(&self, y: &[f64], out: &mut [f64], exec: Execution) -> Result<()> {
        match self {
            DirectionalOperator::Zero => {
                out.iter_mut().for_each(|o| *o = 0.0);
                Ok(())
            }
            DirectionalOperator::Lines { grid, axis, tri } => apply_lines(grid, *axis, tri, y, out, exec),
            DirectionalOperator::Dense(m) => {
                if m.cols() != y.len() || m.rows() != out.len() {
                    return Err(dim_err("dense operator", format!("{:?}", m.shape()), y.len()));
                }
                out.copy_from_slice(&m.matvec(y));
                Ok(())
            }
        }
    }

    /// Factors `I - h*gamma*L` for repeated solves.
    pub fn factor(&self, h: f64, gamma: f64) -> Result<ShiftedSolver> {
        Ok(match self {
            DirectionalOperator::Zero => ShiftedSolver::Identity,
            DirectionalOperator::Lines { grid, axis, tri } => ShiftedSolver::Lines {
                grid: grid.clone(),
                axis: *axis,
                fact: factor_shifted(tri, h, gamma)?,
            },
            DirectionalOperator::Dense(m) => {
                let k = h * gamma;
                let shifted = Matrix::identity(m.rows()).sub(&m.scale(k));
                ShiftedSolver::Dense(shifted.lu()?)
            }
        })
    }
}

/// A factored `I - h*gamma*L`.
#[derive(Clone, Debug)]
pub enum ShiftedSolver {
    Identity,
    Lines {
        grid: Grid,
        axis: usize,
        fact: FactoredTridiagonal,
    },
    Dense(Lu<f64>),
}

impl ShiftedSolver {
    pub fn solve(&self, rhs: &[f64], exec: Execution) -> Result<Vec<f64>> {
        match self {
            ShiftedSolver::Identity => Ok(rhs.to_vec()),
            ShiftedSolver::Lines { grid, axis, fact } => solve_lines(grid, *axis, fact, rhs, exec),
            ShiftedSolver::Dense(lu) => Ok(lu.solve_vec(rhs)),
        }
    }
}

/// An additively split system `y' = sum_sigma f_sigma(t, y)` whose partitions
/// are linear: `f_sigma(t, y) = L_sigma y + g_sigma(t)`.
pub trait PartitionedSystem: Sync {
    fn dim(&self) -> usize;

    fn n_partitions(&self) -> usize;

    fn operator(&self, sigma: usize) -> &DirectionalOperator;

    /// Overwrites `out` with `g_sigma(t)`: forcing and boundary contributions.
    fn affine_part(&self, sigma: usize, t: f64, out: &mut [f64]);

    fn exact(&self, _t: f64) -> Option<Vec<f64>> {
        None
    }

    /// `out = f_sigma(t, y)`.
    fn rhs(&self, sigma: usize, t: f64, y: &[f64], out: &mut [f64], exec: Execution) -> Result<()> {
        self.operator(sigma).apply(y, out, exec)?;
        let mut g = vec![0.0; out.len()];
        self.affine_part(sigma, t, &mut g);
        out.iter_mut().zip(&g).for_each(|(o, gi)| *o += gi);
        Ok(())
    }

    /// Unsplit right-hand side `sum_sigma f_sigma(t, y)`.
    fn full_rhs(&self, t: f64, y: &[f64], exec: Execution) -> Result<Vec<f64>> {
        let mut total = vec![0.0; y.len()];
        let mut part = vec![0.0; y.len()];
        for sigma in 0..self.n_partitions() {
            self.rhs(sigma, t, y, &mut part, exec)?;
            total.iter_mut().zip(&part).for_each(|(a, b)| *a += b);
        }
        Ok(total)
    }
}

/// Scalar test equation `u' = sum_sigma lambda_sigma u` with complex
/// `lambda_sigma`, realified so that state `(re, im)` carries one complex value.
#[derive(Clone, Debug)]
pub struct ScalarTestSystem {
    ops: Vec<DirectionalOperator>,
    lambdas: Vec<num_complex::Complex64>,
    y0: num_complex::Complex64,
}

impl ScalarTestSystem {
    pub fn new(lambdas: &[num_complex::Complex64], y0: num_complex::Complex64) -> Self {
        let ops = lambdas
            .iter()
            .map(|l| DirectionalOperator::Dense(Matrix::from_rows(&[[l.re, -l.im], [l.im, l.re]])))
            .collect();
        ScalarTestSystem {
            ops,
            lambdas: lambdas.to_vec(),
            y0,
        }
    }

    pub fn lambdas(&self) -> &[num_complex::Complex64] {
        &self.lambdas
    }
}

impl PartitionedSystem for ScalarTestSystem {
    fn dim(&self) -> usize {
        2
    }

    fn n_partitions(&self) -> usize {
        self.ops.len()
    }

    fn operator(&self, sigma: usize) -> &DirectionalOperator {
        &self.ops[sigma]
    }

    fn affine_part(&self, _sigma: usize, _t: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
    }

    fn exact(&self, t: f64) -> Option<Vec<f64>> {
        let lambda: num_complex::Complex64 = self.lambdas.iter().sum();
        let y = self.y0 * (lambda * t).exp();
        Some(vec![y.re, y.im])
    }
}

/// Max-abs deviation between `f_sigma(t, y)` and `L_sigma y + g_sigma(t)` over
/// the given states, for systems that override [`PartitionedSystem::rhs`].
pub fn linearity_defect<S: PartitionedSystem + ?Sized>(
    sys: &S,
    t: f64,
    states: &[Vec<f64>],
    exec: Execution,
) -> Result<f64> {
    let d = sys.dim();
    let mut worst = 0.0f64;
    let (mut f, mut ly, mut g) = (vec![0.0; d], vec![0.0; d], vec![0.0; d]);
    for y in states {
        for sigma in 0..sys.n_partitions() {
            sys.rhs(sigma, t, y, &mut f, exec)?;
            sys.operator(sigma).apply(y, &mut ly, exec)?;
            sys.affine_part(sigma, t, &mut g);
            for i in 0..d {
                worst = worst.max((f[i] - ly[i] - g[i]).abs());
            }
        }
    }
    Ok(worst)
}
