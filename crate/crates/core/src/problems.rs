//! Heat-equation benchmarks on the unit square and cube with manufactured
//! exact solutions, second-order differences and time-dependent Dirichlet data.
//!
//! Unknowns live on the `N_p^d` interior nodes `x_i = (i + 1) / (N_p + 1)`,
//! ordered with `x` fastest. Every term of the exact solutions and forcings
//! carries a factor `e^t`, so the affine parts are stored as profiles at
//! `t = 0` and scaled on evaluation.

use std::fmt;
use std::str::FromStr;

use crate::error::{dim_err, Error, Result};
use crate::exec::Execution;
use crate::integrator::{DirectionalOperator, PartitionedSystem};
use crate::linalg::{Grid, Tridiagonal};
use crate::tableau::PartitionLayout;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PartitionMode {
    /// One partition per direction; the forcing rides on the last direction.
    PerDirection,
    /// Directions plus the forcing as an extra, explicitly treated partition.
    PerDirectionPlusExplicitForcing,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HeatProblemConfig {
    pub dims: usize,
    /// Interior points per direction.
    pub n_points: usize,
    pub t_span: [f64; 2],
    pub partition_mode: PartitionMode,
}

impl HeatProblemConfig {
    pub fn new(dims: usize, n_points: usize, partition_mode: PartitionMode) -> Self {
        HeatProblemConfig {
            dims,
            n_points,
            t_span: [0.0, 1.0],
            partition_mode,
        }
    }

    pub fn spacing(&self) -> f64 {
        1.0 / (self.n_points as f64 + 1.0)
    }

    fn validate(&self, dims: usize) -> Result<()> {
        if self.dims != dims {
            return Err(dim_err("dims", dims, self.dims));
        }
        if self.n_points < 3 {
            return Err(Error::InvalidArgument(format!("N_p must be at least 3, got {}", self.n_points)));
        }
        Ok(())
    }
}

/// `e^t`-free part of the exact 2D solution.
pub fn heat2d_profile(x: f64, y: f64) -> f64 {
    x * (1.0 - x) * y * (1.0 - y) + (x + 1.0 / 3.0).powi(2) + (y + 0.25).powi(2)
}

/// `e^t`-free part of the 2D forcing.
pub fn heat2d_forcing_profile(x: f64, y: f64) -> f64 {
    let (px, py) = (x * (1.0 - x), y * (1.0 - y));
    px * py + (x + 1.0 / 3.0).powi(2) + (y + 0.25).powi(2) - 4.0 + 2.0 * px + 2.0 * py
}

pub fn heat2d_exact(x: f64, y: f64, t: f64) -> f64 {
    t.exp() * heat2d_profile(x, y)
}

/// `e^t`-free part of the exact 3D solution.
pub fn heat3d_profile(x: f64, y: f64, z: f64) -> f64 {
    x * (1.0 - x) * y * (1.0 - y) * z * (1.0 - z) + (x + 1.0 / 3.0).powi(2) + (y + 0.25).powi(2) + (z + 0.5).powi(2)
}

/// `e^t`-free part of the 3D forcing.
pub fn heat3d_forcing_profile(x: f64, y: f64, z: f64) -> f64 {
    let (px, py, pz) = (x * (1.0 - x), y * (1.0 - y), z * (1.0 - z));
    px * py * pz + 2.0 * (px * py + px * pz + py * pz) - 6.0
        + (x + 1.0 / 3.0).powi(2)
        + (y + 0.25).powi(2)
        + (z + 0.5).powi(2)
}

pub fn heat3d_exact(x: f64, y: f64, z: f64, t: f64) -> f64 {
    t.exp() * heat3d_profile(x, y, z)
}

/// A semi-discrete heat problem split by direction.
#[derive(Clone, Debug)]
pub struct HeatSystem {
    cfg: HeatProblemConfig,
    grid: Grid,
    ops: Vec<DirectionalOperator>,
    /// `g_sigma(0)`; `g_sigma(t) = e^t g_sigma(0)`.
    affine: Vec<Vec<f64>>,
    forcing: Vec<f64>,
    solution: Vec<f64>,
    profile: fn(&[f64]) -> f64,
}

fn profile2(p: &[f64]) -> f64 {
    heat2d_profile(p[0], p[1])
}

fn profile3(p: &[f64]) -> f64 {
    heat3d_profile(p[0], p[1], p[2])
}

fn forcing2(p: &[f64]) -> f64 {
    heat2d_forcing_profile(p[0], p[1])
}

fn forcing3(p: &[f64]) -> f64 {
    heat3d_forcing_profile(p[0], p[1], p[2])
}

impl HeatSystem {
    fn build(cfg: HeatProblemConfig, profile: fn(&[f64]) -> f64, forcing: fn(&[f64]) -> f64) -> Self {
        let d = cfg.dims;
        let n = cfg.n_points;
        let dx = cfg.spacing();
        let grid = Grid::cube(n, d);
        let coords = |idx: &[usize]| idx.iter().map(|&i| (i + 1) as f64 * dx).collect::<Vec<_>>();
        let tri = Tridiagonal::laplacian_1d(n, dx);
        let mut ops: Vec<DirectionalOperator> = (0..d)
            .map(|axis| DirectionalOperator::Lines {
                grid: grid.clone(),
                axis,
                tri: tri.clone(),
            })
            .collect();
        let inv_dx2 = 1.0 / (dx * dx);
        let mut affine = vec![vec![0.0; grid.len()]; d];
        let mut forcing_vals = vec![0.0; grid.len()];
        let mut solution = vec![0.0; grid.len()];
        for k in 0..grid.len() {
            let idx = grid.unravel(k);
            let x = coords(&idx);
            solution[k] = profile(&x);
            forcing_vals[k] = forcing(&x);
            for (axis, lift) in affine.iter_mut().enumerate() {
                let mut wall = x.clone();
                if idx[axis] == 0 {
                    wall[axis] = 0.0;
                    lift[k] += profile(&wall) * inv_dx2;
                }
                if idx[axis] == n - 1 {
                    wall[axis] = 1.0;
                    lift[k] += profile(&wall) * inv_dx2;
                }
            }
        }
        match cfg.partition_mode {
            PartitionMode::PerDirection => {
                affine[d - 1].iter_mut().zip(&forcing_vals).for_each(|(a, f)| *a += f);
            }
            PartitionMode::PerDirectionPlusExplicitForcing => {
                ops.push(DirectionalOperator::Zero);
                affine.push(forcing_vals.clone());
            }
        }
        HeatSystem {
            cfg,
            grid,
            ops,
            affine,
            forcing: forcing_vals,
            solution,
            profile,
        }
    }

    pub fn config(&self) -> &HeatProblemConfig {
        &self.cfg
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Interior node coordinates of flat index `k`.
    pub fn node(&self, k: usize) -> Vec<f64> {
        let dx = self.cfg.spacing();
        self.grid.unravel(k).iter().map(|&i| (i + 1) as f64 * dx).collect()
    }

    /// The unsplit right-hand side assembled point by point from the full
    /// `2d + 1`-point stencil with Dirichlet values read off the exact solution.
    pub fn unsplit_rhs(&self, t: f64, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.grid.len() {
            return Err(dim_err("state", self.grid.len(), y.len()));
        }
        let n = self.cfg.n_points;
        let dx = self.cfg.spacing();
        let et = t.exp();
        let out = (0..y.len())
            .map(|k| {
                let idx = self.grid.unravel(k);
                let x = self.node(k);
                let mut lap = 0.0;
                for axis in 0..self.cfg.dims {
                    let stride = self.grid.stride(axis);
                    let neighbour = |side: isize| {
                        let i = idx[axis] as isize + side;
                        if i < 0 || i as usize >= n {
                            let mut wall = x.clone();
                            wall[axis] = if i < 0 { 0.0 } else { 1.0 };
                            et * (self.profile)(&wall)
                        } else if side < 0 {
                            y[k - stride]
                        } else {
                            y[k + stride]
                        }
                    };
                    lap += neighbour(-1) - 2.0 * y[k] + neighbour(1);
                }
                lap / (dx * dx) + et * self.forcing[k]
            })
            .collect();
        Ok(out)
    }

    /// Exact solution on the interior nodes; it is also its own time derivative.
    pub fn exact_state(&self, t: f64) -> Vec<f64> {
        let et = t.exp();
        self.solution.iter().map(|u| et * u).collect()
    }
}

impl PartitionedSystem for HeatSystem {
    fn dim(&self) -> usize {
        self.grid.len()
    }

    fn n_partitions(&self) -> usize {
        self.ops.len()
    }

    fn operator(&self, sigma: usize) -> &DirectionalOperator {
        &self.ops[sigma]
    }

    fn affine_part(&self, sigma: usize, t: f64, out: &mut [f64]) {
        let et = t.exp();
        out.iter_mut().zip(&self.affine[sigma]).for_each(|(o, g)| *o = et * g);
    }

    fn exact(&self, t: f64) -> Option<Vec<f64>> {
        Some(self.exact_state(t))
    }
}

pub fn build_heat3d(cfg: HeatProblemConfig) -> Result<HeatSystem> {
    cfg.validate(3)?;
    Ok(HeatSystem::build(cfg, profile3, forcing3))
}

pub fn build_heat2d(cfg: HeatProblemConfig) -> Result<HeatSystem> {
    cfg.validate(2)?;
    Ok(HeatSystem::build(cfg, profile2, forcing2))
}

/// `||numeric - exact||_2 / ||exact||_2`.
pub fn relative_l2_error(numeric: &[f64], exact: &[f64]) -> Result<f64> {
    if numeric.len() != exact.len() {
        return Err(dim_err("state", exact.len(), numeric.len()));
    }
    let norm = exact.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm == 0.0 {
        return Err(Error::InvalidArgument("exact solution has zero norm".into()));
    }
    let diff = numeric.iter().zip(exact).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
    Ok(diff / norm)
}

/// Named benchmark problems exposed by the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    Heat2d,
    Heat3d,
    Heat2d3Part,
}

impl Problem {
    pub const ALL: [Problem; 3] = [Problem::Heat2d, Problem::Heat3d, Problem::Heat2d3Part];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Heat2d => "heat2d",
            Problem::Heat3d => "heat3d",
            Problem::Heat2d3Part => "heat2d-3part",
        }
    }

    pub fn config(self, n_points: usize) -> HeatProblemConfig {
        match self {
            Problem::Heat2d => HeatProblemConfig::new(2, n_points, PartitionMode::PerDirection),
            Problem::Heat3d => HeatProblemConfig::new(3, n_points, PartitionMode::PerDirection),
            Problem::Heat2d3Part => HeatProblemConfig::new(2, n_points, PartitionMode::PerDirectionPlusExplicitForcing),
        }
    }

    pub fn build(self, n_points: usize) -> Result<HeatSystem> {
        let cfg = self.config(n_points);
        match self {
            Problem::Heat3d => build_heat3d(cfg),
            _ => build_heat2d(cfg),
        }
    }

    pub fn layout(self) -> PartitionLayout {
        match self {
            Problem::Heat2d => PartitionLayout::all_stiff(2).expect("valid layout"),
            Problem::Heat3d => PartitionLayout::all_stiff(3).expect("valid layout"),
            Problem::Heat2d3Part => PartitionLayout::two_stiff_one_explicit(),
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown problem `{s}`")))
    }
}

/// Max-norm residual `sum_sigma f_sigma(t, u(t)) - u'(t)` of the exact
/// solution restricted to the grid.
pub fn manufactured_residual(sys: &HeatSystem, t: f64, exec: Execution) -> Result<f64> {
    let u = sys.exact_state(t);
    let f = sys.full_rhs(t, &u, exec)?;
    Ok(f.iter().zip(&u).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}
