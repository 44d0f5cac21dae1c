//! General linear method tableaux: order conditions, preconsistency, the
//! N-way ADI block assembly and stage permutation.

use std::fmt::Write as _;

use crate::error::{dim_err, Error, Result};
use crate::linalg::dense::{least_squares, Matrix, Scalar};

/// One general linear method `(A, U, B, V)` with abscissae `c` and the
/// weights `W = [w_0 .. w_p]` relating external stages to scaled derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct BaseTableau {
    pub a: Matrix,
    pub u: Matrix,
    pub b: Matrix,
    pub v: Matrix,
    pub w: Matrix,
    pub c: Vec<f64>,
    pub p: usize,
    pub q: usize,
}

impl BaseTableau {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        a: Matrix,
        u: Matrix,
        b: Matrix,
        v: Matrix,
        w: Matrix,
        c: Vec<f64>,
        p: usize,
        q: usize,
    ) -> Result<Self> {
        let t = BaseTableau {
            a,
            u,
            b,
            v,
            w,
            c,
            p,
            q,
        };
        t.validate_dims()?;
        Ok(t)
    }

    pub fn stages(&self) -> usize {
        self.a.rows()
    }

    pub fn externals(&self) -> usize {
        self.v.rows()
    }

    /// Column `k` of `W`.
    pub fn w_col(&self, k: usize) -> Vec<f64> {
        self.w.col(k)
    }

    pub fn validate_dims(&self) -> Result<()> {
        let s = self.a.rows();
        let r = self.v.rows();
        let p = self.p;
        let check = |field: &'static str, got: (usize, usize), want: (usize, usize)| {
            if got == want {
                Ok(())
            } else {
                Err(dim_err(field, format!("{want:?}"), format!("{got:?}")))
            }
        };
        check("A", self.a.shape(), (s, s))?;
        check("U", self.u.shape(), (s, r))?;
        check("B", self.b.shape(), (r, s))?;
        check("V", self.v.shape(), (r, r))?;
        check("W", self.w.shape(), (r, p + 1))?;
        if self.c.len() != s {
            return Err(dim_err("c", s, self.c.len()));
        }
        if p == 0 || !(self.q == p || self.q + 1 == p) {
            return Err(dim_err("q", format!("{p} or {}", p.saturating_sub(1)), self.q));
        }
        Ok(())
    }
}

/// Max-abs residuals of the order conditions, index `k - 1` holding order `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderResiduals {
    pub stage: Vec<f64>,
    pub external: Vec<f64>,
}

impl OrderResiduals {
    pub fn max(&self) -> f64 {
        self.stage
            .iter()
            .chain(&self.external)
            .fold(0.0, |m, &x| m.max(x))
    }
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn pow_over_fact(c: &[f64], k: usize) -> Vec<f64> {
    let f = factorial(k);
    c.iter().map(|&x| x.powi(k as i32) / f).collect()
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Evaluates both families of order conditions:
/// stage `c^k/k! - A c^(k-1)/(k-1)! - U w_k` for `k = 1..q` and external
/// `sum_l w_(k-l)/l! - B c^(k-1)/(k-1)! - V w_k` for `k = 1..p`.
pub fn check_order_conditions(t: &BaseTableau) -> Result<OrderResiduals> {
    t.validate_dims()?;
    let stage = (1..=t.q)
        .map(|k| {
            let lhs = pow_over_fact(&t.c, k);
            let ac = t.a.matvec(&pow_over_fact(&t.c, k - 1));
            let uw = t.u.matvec(&t.w_col(k));
            let res: Vec<f64> = (0..lhs.len()).map(|i| lhs[i] - ac[i] - uw[i]).collect();
            max_abs(&res)
        })
        .collect();
    let r = t.externals();
    let external = (1..=t.p)
        .map(|k| {
            let mut lhs = vec![0.0; r];
            for l in 0..=k {
                let wl = t.w_col(k - l);
                let f = factorial(l);
                for i in 0..r {
                    lhs[i] += wl[i] / f;
                }
            }
            let bc = t.b.matvec(&pow_over_fact(&t.c, k - 1));
            let vw = t.v.matvec(&t.w_col(k));
            let res: Vec<f64> = (0..r).map(|i| lhs[i] - bc[i] - vw[i]).collect();
            max_abs(&res)
        })
        .collect();
    Ok(OrderResiduals { stage, external })
}

/// `(|U w_0 - 1|_inf, |V w_0 - w_0|_inf)`.
pub fn preconsistency_residual(t: &BaseTableau) -> (f64, f64) {
    let w0 = t.w_col(0);
    let uw = t.u.matvec(&w0);
    let vw = t.v.matvec(&w0);
    let r1 = uw.iter().fold(0.0f64, |m, x| m.max((x - 1.0).abs()));
    let r2 = vw
        .iter()
        .zip(&w0)
        .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    (r1, r2)
}

/// Largest least-squares residual accepted by [`solve_w`].
pub const SOLVE_W_TOLERANCE: f64 = 1e-10;

/// Solves the order conditions for `W` given `(A, U, B, V, c)` of a method
/// with `p = q = r = s`, fixing `w_0 = 1`. Columns are found one at a time
/// from the stacked stage and external conditions in the least-squares sense.
pub fn solve_w(a: &Matrix, u: &Matrix, b: &Matrix, v: &Matrix, c: &[f64], p: usize) -> Result<Matrix> {
    let s = a.rows();
    let r = v.rows();
    if p != s || r != s {
        return Err(dim_err("p = q = r = s", format!("p = {p}"), format!("r = {r}, s = {s}")));
    }
    BaseTableau::new(
        a.clone(),
        u.clone(),
        b.clone(),
        v.clone(),
        Matrix::zeros(r, p + 1),
        c.to_vec(),
        p,
        p,
    )?;
    let mut w = Matrix::zeros(r, p + 1);
    for i in 0..r {
        w[(i, 0)] = 1.0;
    }
    // [U; I - V] w_k = [c^k/k! - A c^(k-1)/(k-1)!; B c^(k-1)/(k-1)! - sum_{l>=1} w_(k-l)/l!]
    let i_minus_v = Matrix::identity(r).sub(v);
    let mut lhs = Matrix::zeros(s + r, r);
    lhs.set_block(0, 0, u);
    lhs.set_block(s, 0, &i_minus_v);
    let mut worst = 0.0f64;
    for k in 1..=p {
        let ck = pow_over_fact(c, k);
        let ac = a.matvec(&pow_over_fact(c, k - 1));
        let bc = b.matvec(&pow_over_fact(c, k - 1));
        let mut rhs = Vec::with_capacity(s + r);
        rhs.extend((0..s).map(|i| ck[i] - ac[i]));
        for i in 0..r {
            let mut acc = bc[i];
            for l in 1..=k {
                acc -= w[(i, k - l)] / factorial(l);
            }
            rhs.push(acc);
        }
        let (wk, residual) = least_squares(&lhs, &rhs)?;
        worst = worst.max(residual);
        for i in 0..r {
            w[(i, k)] = wk[i];
        }
    }
    if worst > SOLVE_W_TOLERANCE {
        return Err(Error::InconsistentW { residual: worst });
    }
    Ok(w)
}

/// An implicit/explicit base pair sharing `c`, `U` and `V`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdiMethod {
    pub implicit: BaseTableau,
    pub explicit: BaseTableau,
    pub gamma: f64,
    pub name: String,
    pub order: usize,
}

/// Order-condition tolerance accepted for a method of the given order.
/// Fourth-order coefficients are rational approximations, hence the looser bound.
pub fn order_tolerance(order: usize) -> f64 {
    if order >= 4 {
        1e-10
    } else {
        1e-12
    }
}

pub const PRECONSISTENCY_TOLERANCE: f64 = 1e-12;

impl AdiMethod {
    /// Builds and validates a DIMSIM-type pair.
    pub fn new(
        name: impl Into<String>,
        order: usize,
        gamma: f64,
        implicit: BaseTableau,
        explicit: BaseTableau,
    ) -> Result<Self> {
        let m = AdiMethod {
            implicit,
            explicit,
            gamma,
            name: name.into(),
            order,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn stages(&self) -> usize {
        self.implicit.stages()
    }

    pub fn c(&self) -> &[f64] {
        &self.implicit.c
    }

    pub fn u(&self) -> &Matrix {
        &self.implicit.u
    }

    pub fn v(&self) -> &Matrix {
        &self.implicit.v
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMethod(format!("{}: {msg}", self.name)));
        let (im, ex) = (&self.implicit, &self.explicit);
        im.validate_dims()?;
        ex.validate_dims()?;
        if im.c != ex.c || im.u != ex.u || im.v != ex.v {
            return bad("implicit and explicit bases must share c, U and V".into());
        }
        let s = im.stages();
        if im.externals() != s || im.p != s || im.q != s || ex.p != s || ex.q != s || self.order != s {
            return bad("expected p = q = r = s".into());
        }
        for i in 0..s {
            if im.a[(i, i)] != self.gamma {
                return bad(format!("implicit diagonal entry {i} is not gamma"));
            }
            for j in 0..s {
                if j > i && im.a[(i, j)] != 0.0 {
                    return bad("implicit A is not lower triangular".into());
                }
                if j >= i && ex.a[(i, j)] != 0.0 {
                    return bad("explicit A is not strictly lower triangular".into());
                }
            }
        }
        if im.u != Matrix::identity(s) {
            return bad("U must be the identity".into());
        }
        let v0 = im.v.row(0).to_vec();
        if (1..s).any(|i| im.v.row(i) != v0.as_slice()) {
            return bad("rows of V must coincide".into());
        }
        if (v0.iter().sum::<f64>() - 1.0).abs() > PRECONSISTENCY_TOLERANCE {
            return bad("v^T 1 != 1".into());
        }
        if im.c[s - 1] != 1.0 {
            return bad("last abscissa must be 1".into());
        }
        let tol = order_tolerance(self.order);
        for (label, t) in [("implicit", im), ("explicit", ex)] {
            let (r1, r2) = preconsistency_residual(t);
            if r1 > PRECONSISTENCY_TOLERANCE || r2 > PRECONSISTENCY_TOLERANCE {
                return bad(format!("{label} base is not preconsistent ({r1:.2e}, {r2:.2e})"));
            }
            let res = check_order_conditions(t)?.max();
            if res > tol {
                return bad(format!("{label} base violates order conditions ({res:.2e})"));
            }
        }
        Ok(())
    }

    /// Base tableau used for block `(mu, sigma)` under `layout`.
    pub fn block_base(&self, layout: &PartitionLayout, mu: usize, sigma: usize) -> &BaseTableau {
        if layout.is_implicit_block(mu, sigma) {
            &self.implicit
        } else {
            &self.explicit
        }
    }
}

/// Number of partitions, how many are treated implicitly, and how many
/// internal-stage families are actually computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartitionLayout {
    n_partitions: usize,
    n_stiff: usize,
    stage_row_count: usize,
}

impl PartitionLayout {
    /// Stiff partitions come first. When the last partition is non-stiff its
    /// stage family coincides with the previous one and is not computed.
    pub fn new(n_partitions: usize, n_stiff: usize) -> Result<Self> {
        let ok = matches!(n_partitions, 2 | 3)
            && (n_stiff == n_partitions || n_stiff + 1 == n_partitions)
            && n_stiff >= 1;
        if !ok {
            return Err(Error::UnsupportedLayout {
                n_partitions,
                n_stiff,
            });
        }
        Ok(PartitionLayout {
            n_partitions,
            n_stiff,
            stage_row_count: n_stiff,
        })
    }

    /// Every partition implicit in its own family (two- or three-way).
    pub fn all_stiff(n: usize) -> Result<Self> {
        Self::new(n, n)
    }

    /// Two stiff directions plus an explicitly treated third partition.
    pub fn two_stiff_one_explicit() -> Self {
        Self::new(3, 2).expect("valid layout")
    }

    pub fn n_partitions(&self) -> usize {
        self.n_partitions
    }

    pub fn n_stiff(&self) -> usize {
        self.n_stiff
    }

    pub fn stage_row_count(&self) -> usize {
        self.stage_row_count
    }

    /// Whether block `(mu, sigma)` (zero based) uses the implicit base.
    pub fn is_implicit_block(&self, mu: usize, sigma: usize) -> bool {
        sigma <= mu && sigma < self.n_stiff
    }

    /// The computed family holding the stages at which partition `sigma` is evaluated.
    pub fn family_of(&self, sigma: usize) -> usize {
        sigma.min(self.stage_row_count - 1)
    }
}

/// The full `N s x N s` block tableau of an ADI method.
#[derive(Clone, Debug, PartialEq)]
pub struct AssembledTableau<T = f64> {
    pub a: Matrix<T>,
    pub u: Matrix<T>,
    pub b: Matrix<T>,
    pub v: Matrix<T>,
    pub c: Vec<T>,
    /// Partition whose right-hand side each stage column feeds.
    pub stage_partition: Vec<usize>,
    pub layout: PartitionLayout,
}

impl<T: Scalar> AssembledTableau<T> {
    pub fn stage_count(&self) -> usize {
        self.a.rows()
    }

    /// Block `(mu, sigma)` of `A` for base size `s`.
    pub fn a_block(&self, s: usize, mu: usize, sigma: usize) -> Matrix<T> {
        self.a.block(mu * s, sigma * s, s, s)
    }

    pub fn b_block(&self, s: usize, mu: usize, sigma: usize) -> Matrix<T> {
        self.b.block(mu * s, sigma * s, s, s)
    }
}

/// Assembles the block tableau: block `(mu, sigma)` is the implicit base when
/// `sigma <= mu` and `sigma` is stiff, otherwise the explicit base; `U` and `V`
/// are block diagonal.
pub fn assemble_adi(m: &AdiMethod, layout: PartitionLayout) -> Result<AssembledTableau> {
    let n = layout.n_partitions();
    let s = m.stages();
    let r = m.implicit.externals();
    let mut a = Matrix::zeros(n * s, n * s);
    let mut b = Matrix::zeros(n * r, n * s);
    for mu in 0..n {
        for sigma in 0..n {
            let base = m.block_base(&layout, mu, sigma);
            a.set_block(mu * s, sigma * s, &base.a);
            b.set_block(mu * r, sigma * s, &base.b);
        }
    }
    Ok(AssembledTableau {
        a,
        u: m.u().kron_identity(n),
        b,
        v: m.v().kron_identity(n),
        c: (0..n).flat_map(|_| m.c().iter().copied()).collect(),
        stage_partition: (0..n * s).map(|l| l / s).collect(),
        layout,
    })
}

fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::InvalidPermutation(format!(
            "length {} for {n} stages",
            perm.len()
        )));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidPermutation(format!("{perm:?} is not a permutation of 0..{n}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Inverse of a zero-based permutation.
pub fn inverse_permutation(perm: &[usize]) -> Result<Vec<usize>> {
    check_permutation(perm, perm.len())?;
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    Ok(inv)
}

/// Reorders internal stages: `(A[P, P], U[P, :], B[:, P], V, c[P])`.
/// `perm` is zero based; stage `i` of the result is stage `perm[i]` of `t`.
pub fn permute_tableau<T: Scalar>(t: &AssembledTableau<T>, perm: &[usize]) -> Result<AssembledTableau<T>> {
    let ns = t.stage_count();
    check_permutation(perm, ns)?;
    let all_u: Vec<usize> = (0..t.u.cols()).collect();
    let all_b: Vec<usize> = (0..t.b.rows()).collect();
    Ok(AssembledTableau {
        a: t.a.select(perm, perm),
        u: t.u.select(perm, &all_u),
        b: t.b.select(&all_b, perm),
        v: t.v.clone(),
        c: perm.iter().map(|&p| t.c[p]).collect(),
        stage_partition: perm.iter().map(|&p| t.stage_partition[p]).collect(),
        layout: t.layout,
    })
}

fn write_matrix(out: &mut String, label: &str, m: &Matrix) {
    let _ = writeln!(out, "{label} {}x{}", m.rows(), m.cols());
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:>24.16e}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
}

/// Plain-text dump of a method, one labeled block per matrix, 17 significant digits.
pub fn dump_method(m: &AdiMethod) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} order={} gamma={:.16e}", m.name, m.order, m.gamma);
    write_matrix(&mut out, "c", &Matrix::column(m.c()));
    write_matrix(&mut out, "U", m.u());
    write_matrix(&mut out, "V", m.v());
    write_matrix(&mut out, "A_I", &m.implicit.a);
    write_matrix(&mut out, "B_I", &m.implicit.b);
    write_matrix(&mut out, "W_I", &m.implicit.w);
    write_matrix(&mut out, "A_E", &m.explicit.a);
    write_matrix(&mut out, "B_E", &m.explicit.b);
    write_matrix(&mut out, "W_E", &m.explicit.w);
    out
}

/// Parses a [`dump_method`] dump back into `(label, matrix)` pairs.
pub fn parse_dump(text: &str) -> Result<Vec<(String, Matrix)>> {
    let mut blocks = Vec::new();
    let mut lines = text.lines().filter(|l| !l.starts_with('#') && !l.trim().is_empty());
    while let Some(header) = lines.next() {
        let mut parts = header.split_whitespace();
        let label = parts.next().unwrap_or_default().to_string();
        let shape = parts.next().unwrap_or_default();
        let (r, c) = shape
            .split_once('x')
            .and_then(|(r, c)| Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)))
            .ok_or_else(|| Error::InvalidArgument(format!("bad block header `{header}`")))?;
        let mut data = Vec::with_capacity(r * c);
        for _ in 0..r {
            let line = lines
                .next()
                .ok_or_else(|| Error::InvalidArgument(format!("truncated block `{label}`")))?;
            for tok in line.split_whitespace() {
                data.push(
                    tok.parse::<f64>()
                        .map_err(|e| Error::InvalidArgument(format!("{tok}: {e}")))?,
                );
            }
        }
        if data.len() != r * c {
            return Err(dim_err("dump block", r * c, data.len()));
        }
        blocks.push((label, Matrix::from_vec(r, c, data)));
    }
    Ok(blocks)
}
