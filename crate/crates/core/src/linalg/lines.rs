//! Line-wise application of 1D operators on lexicographically ordered
//! tensor-product grids (x fastest).

use crate::error::{dim_err, Result};
use crate::exec::{for_each_chunk_mut, Execution};
use crate::linalg::tridiag::{FactoredTridiagonal, Tridiagonal};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    dims: Vec<usize>,
}

impl Grid {
    pub fn new(dims: Vec<usize>) -> Self {
        assert!(!dims.is_empty() && dims.iter().all(|&n| n > 0));
        Grid { dims }
    }

    /// `n^d` grid.
    pub fn cube(n: usize, d: usize) -> Self {
        Grid::new(vec![n; d])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        self.dims[..axis].iter().product()
    }

    pub fn line_count(&self, axis: usize) -> usize {
        self.len() / self.dims[axis]
    }

    /// Flat index of the first point on line `line` along `axis`.
    pub fn line_start(&self, axis: usize, line: usize) -> usize {
        let inner = self.stride(axis);
        let n = self.dims[axis];
        (line / inner) * inner * n + line % inner
    }

    /// Multi-index of a flat index.
    pub fn unravel(&self, mut idx: usize) -> Vec<usize> {
        self.dims
            .iter()
            .map(|&n| {
                let k = idx % n;
                idx /= n;
                k
            })
            .collect()
    }

    fn check(&self, axis: usize, n_op: usize, len: usize) -> Result<()> {
        if axis >= self.ndim() {
            return Err(dim_err("direction", format!("< {}", self.ndim()), axis));
        }
        if n_op != self.dims[axis] {
            return Err(dim_err("factorization", self.dims[axis], n_op));
        }
        if len != self.len() {
            return Err(dim_err("rhs", self.len(), len));
        }
        Ok(())
    }
}

/// Solves `(I - h*gamma*L_axis) x = rhs` where `L_axis` applies the factored
/// 1D operator along every grid line of `axis`.
pub fn solve_lines(
    grid: &Grid,
    axis: usize,
    f: &FactoredTridiagonal,
    rhs: &[f64],
    exec: Execution,
) -> Result<Vec<f64>> {
    grid.check(axis, f.len(), rhs.len())?;
    let n = grid.dims[axis];
    if axis == 0 {
        let mut x = rhs.to_vec();
        for_each_chunk_mut(exec, &mut x, n, |_, line| f.solve_in_place(line));
        return Ok(x);
    }
    let stride = grid.stride(axis);
    // Gather into line-major scratch, solve, scatter back.
    let mut lines = vec![0.0; rhs.len()];
    for_each_chunk_mut(exec, &mut lines, n, |l, line| {
        let base = grid.line_start(axis, l);
        for (k, v) in line.iter_mut().enumerate() {
            *v = rhs[base + k * stride];
        }
        f.solve_in_place(line);
    });
    let mut x = vec![0.0; rhs.len()];
    for (l, line) in lines.chunks(n).enumerate() {
        let base = grid.line_start(axis, l);
        for (k, v) in line.iter().enumerate() {
            x[base + k * stride] = *v;
        }
    }
    Ok(x)
}

/// `out = L_axis y`, the 1D operator applied along every line of `axis`.
pub fn apply_lines(
    grid: &Grid,
    axis: usize,
    t: &Tridiagonal,
    y: &[f64],
    out: &mut [f64],
    exec: Execution,
) -> Result<()> {
    grid.check(axis, t.len(), y.len())?;
    if out.len() != y.len() {
        return Err(dim_err("out", y.len(), out.len()));
    }
    let n = grid.dims[axis];
    let stride = grid.stride(axis);
    let chunk = grid.dims[0];
    for_each_chunk_mut(exec, out, chunk, |c, piece| {
        let start = c * chunk;
        for (off, o) in piece.iter_mut().enumerate() {
            let idx = start + off;
            let k = (idx / stride) % n;
            let mut acc = t.diag[k] * y[idx];
            if k > 0 {
                acc += t.sub[k - 1] * y[idx - stride];
            }
            if k + 1 < n {
                acc += t.sup[k] * y[idx + stride];
            }
            *o = acc;
        }
    });
    Ok(())
}
