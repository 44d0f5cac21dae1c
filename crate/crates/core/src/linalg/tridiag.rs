//! Tridiagonal matrices and the pivoted LU used for shifted directional solves.

use crate::error::{dim_err, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Tridiagonal {
    pub sub: Vec<f64>,
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl Tridiagonal {
    pub fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        if n == 0 {
            return Err(dim_err("diag", ">= 1", 0));
        }
        if sub.len() != n - 1 {
            return Err(dim_err("sub", n - 1, sub.len()));
        }
        if sup.len() != n - 1 {
            return Err(dim_err("sup", n - 1, sup.len()));
        }
        Ok(Tridiagonal { sub, diag, sup })
    }

    /// Constant-coefficient `tridiag(lo, mid, hi)` of size `n`.
    pub fn constant(n: usize, lo: f64, mid: f64, hi: f64) -> Self {
        assert!(n >= 1);
        Tridiagonal {
            sub: vec![lo; n - 1],
            diag: vec![mid; n],
            sup: vec![hi; n - 1],
        }
    }

    /// Second-difference operator `(1/dx^2) tridiag(1, -2, 1)`.
    pub fn laplacian_1d(n: usize, dx: f64) -> Self {
        let k = 1.0 / (dx * dx);
        Self::constant(n, k, -2.0 * k, k)
    }

    pub fn zeros(n: usize) -> Self {
        Self::constant(n, 0.0, 0.0, 0.0)
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Entry `(i, j)` of the dense form.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            self.diag[i]
        } else if i == j + 1 {
            self.sub[j]
        } else if j == i + 1 {
            self.sup[i]
        } else {
            0.0
        }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut acc = self.diag[i] * x[i];
                if i > 0 {
                    acc += self.sub[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    acc += self.sup[i] * x[i + 1];
                }
                acc
            })
            .collect()
    }
}

/// Pivoted LU factors of `I - h*gamma*T`, laid out as in LAPACK `gttrf`.
#[derive(Clone, Debug)]
pub struct FactoredTridiagonal {
    dl: Vec<f64>,
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
    h: f64,
    gamma: f64,
}

/// Factors `I - h*gamma*T` once so it can be reused for every stage and step at fixed `h`.
pub fn factor_shifted(t: &Tridiagonal, h: f64, gamma: f64) -> Result<FactoredTridiagonal> {
    let n = t.len();
    if n == 0 {
        return Err(dim_err("tridiagonal", ">= 1", 0));
    }
    let k = h * gamma;
    let mut dl: Vec<f64> = t.sub.iter().map(|&x| -k * x).collect();
    let mut d: Vec<f64> = t.diag.iter().map(|&x| 1.0 - k * x).collect();
    let mut du: Vec<f64> = t.sup.iter().map(|&x| -k * x).collect();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n.saturating_sub(1)];

    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] != 0.0 {
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            }
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    if let Some(i) = d.iter().position(|&x| x == 0.0 || !x.is_finite()) {
        return Err(Error::Singular {
            context: format!("zero pivot {i} in shifted tridiagonal (h*gamma = {k})"),
        });
    }
    Ok(FactoredTridiagonal {
        dl,
        d,
        du,
        du2,
        swapped,
        h,
        gamma,
    })
}

impl FactoredTridiagonal {
    pub fn len(&self) -> usize {
        self.d.len()
    }

    pub fn is_empty(&self) -> bool {
        self.d.is_empty()
    }

    pub fn step(&self) -> f64 {
        self.h
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Overwrites `b` with `(I - h*gamma*T)^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        debug_assert_eq!(b.len(), n);
        for i in 0..n.saturating_sub(1) {
            if self.swapped[i] {
                let temp = b[i] - self.dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}
