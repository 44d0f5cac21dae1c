//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use adi_glm::convergence::run_convergence;
use adi_glm::integrator::{start_external_stages, ScalarTestSystem, StartReference};
use adi_glm::linalg::{
    characteristic_polynomial, eigenvalues, factor_shifted, numerical_rank, solve_lines, Grid, Matrix, Tridiagonal,
};
use adi_glm::methods::{get_remark_tableau, remark_tableau_exact};
use adi_glm::stability::{
    base_stability_matrix, limit_block, limit_similarity_residual, logspace, m_hat, scan_region, RegionGrid,
    RegionKind,
};
use adi_glm::tableau::{check_order_conditions, order_tolerance, permute_tableau};
use adi_glm::{method_by_order, AdiMethod, Execution, Problem};
use num_complex::Complex64;
use num_rational::Ratio;
use rand::Rng;

use common::*;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn methods() -> Vec<AdiMethod> {
    (2..=4).map(|o| method_by_order(o).unwrap()).collect()
}

fn criterion_1() -> Outcome {
    let mut worst = Vec::new();
    let mut pass = true;
    for m in methods() {
        let tol = order_tolerance(m.order);
        for t in [&m.implicit, &m.explicit] {
            let float = check_order_conditions(t).unwrap().max();
            let exact = exact_order_residual(t);
            pass &= float <= tol && exact <= tol;
            worst.push(format!("{:.1e}", float.max(exact)));
        }
    }
    outcome(pass, format!("max residuals (I,E per order) = [{}]", worst.join(", ")))
}

fn criterion_2() -> Outcome {
    let ladder_2d = [320, 640, 1280, 2560, 5120];
    let ladder_3d = [100, 200, 400, 800];
    let mut pass = true;
    let mut cells = Vec::new();
    for (problem, np, steps) in [
        (Problem::Heat2d, 64, &ladder_2d[..]),
        (Problem::Heat3d, 16, &ladder_3d[..]),
        (Problem::Heat2d3Part, 64, &ladder_2d[..]),
    ] {
        for order in 2..=4 {
            let start = Instant::now();
            let res = run_convergence(problem, order, np, steps, Execution::Sequential);
            let secs = start.elapsed().as_secs_f64();
            let (ok, slope) = match &res {
                Ok(study) => ((study.slope - order as f64).abs() <= 0.25 && secs < 60.0, format!("{:.3}", study.slope)),
                Err(e) => (false, format!("error: {e}")),
            };
            pass &= ok;
            let mark = if ok { "ok" } else { "MISS" };
            cells.push(format!("{problem}/p{order}={slope} ({secs:.1}s, {mark})"));
        }
    }
    outcome(pass, cells.join("; "))
}

fn criterion_3() -> Outcome {
    let mut rng = rng(3);
    let mut worst = 0.0f64;
    for m in methods() {
        let r = m.implicit.externals();
        for layout in layouts() {
            for _ in 0..20 {
                let eta: Vec<Complex64> = (0..layout.n_partitions())
                    .map(|_| left_half_plane(&mut rng, 5.0, 5.0))
                    .collect();
                let xi: Vec<Vec<Complex64>> = (0..layout.stage_row_count())
                    .map(|_| {
                        (0..r)
                            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                            .collect()
                    })
                    .collect();
                worst = worst.max(step_vs_stability_matrix(&m, layout, &eta, &xi));
            }
        }
    }
    outcome(worst <= 1e-12, format!("max |step - M xi| = {worst:.2e} over 3 methods x 3 layouts x 20 tuples"))
}

fn criterion_4() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for m in methods() {
        let p = m.order;
        let sim = limit_similarity_residual(&m).unwrap();
        let x = limit_block(&m).unwrap();
        // Characteristic polynomial against (z - 1)^p.
        let cp = characteristic_polynomial(&x.to_complex());
        let binom = |n: usize, k: usize| (0..k).fold(1.0, |a, j| a * (n - j) as f64 / (j + 1) as f64);
        let eig_dev = cp
            .iter()
            .enumerate()
            .map(|(k, c)| (c - Complex64::new(binom(p, k) * (-1f64).powi(k as i32), 0.0)).norm())
            .fold(0.0, f64::max);
        let rank = numerical_rank(&x.sub(&Matrix::identity(p)), 1e-8);
        let ok = sim <= 1e-10 && eig_dev <= 1e-8 && rank == p - 1;
        pass &= ok;
        parts.push(format!("p={p}: XD-Dmu {sim:.1e}, charpoly dev {eig_dev:.1e}, rank(X-I) {rank}"));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    let radii = logspace(1e-2, 1e8, 200);
    for m in methods() {
        let dirs: Vec<Complex64> = if m.order <= 3 {
            vec![Complex64::new(-1.0, 0.0)]
        } else {
            [83.0f64, -83.0]
                .iter()
                .map(|d| -Complex64::from_polar(1.0, d.to_radians()))
                .collect()
        };
        let mut worst = 0.0f64;
        for d in &dirs {
            for &r in &radii {
                let mi = base_stability_matrix(&m.implicit, d * r).unwrap();
                worst = worst.max(adi_glm::linalg::spectral_radius(&mi).unwrap());
            }
        }
        let at_zero = m_hat(&m, Complex64::new(0.0, 0.0)).unwrap().rho;
        let ok = worst <= 1.0 + 1e-8 && (at_zero - 1.0).abs() <= 1e-12;
        pass &= ok;
        parts.push(format!("p={}: max rho(M_I) {worst:.12}, rho(M_hat(0)) {at_zero:.15}", m.order));
    }
    let m2 = method_by_order(2).unwrap();
    let grid = RegionGrid {
        x: (-50.0, 0.0),
        y: (-50.0, 0.0),
        n: 51,
    };
    let mut outside = 0usize;
    let mut total = 0usize;
    scan_region(&m2, RegionKind::Real, grid, 3, Execution::Parallel, |pt| {
        total += 1;
        outside += usize::from(!pt.member);
        Ok(())
    })
    .unwrap();
    pass &= outside == 0;
    parts.push(format!("p=2 real scan [-50,0]^2: {outside}/{total} outside"));
    outcome(pass, parts.join("; "))
}

fn criterion_6() -> Outcome {
    let q = |n: i64, d: i64| Ratio::new(n, d);
    let z = q(0, 1);
    let one = q(1, 1);
    let g = q(5, 8);
    let want_a = Matrix::from_rows(&[
        [g, z, z, z],
        [g, g, z, z],
        [q(1, 4), q(1, 2), g, z],
        [q(1, 4), q(1, 4), g, g],
    ]);
    let want_u = Matrix::from_rows(&[[one, z, z, z], [z, z, one, z], [z, one, z, z], [z, z, z, one]]);
    let want_b = Matrix::from_rows(&[
        [q(1, 2), q(-3, 128), q(-5, 32), q(5, 128)],
        [z, q(13, 128), q(27, 32), q(85, 128)],
        [q(-3, 128), q(-3, 128), q(5, 128), q(5, 128)],
        [q(13, 128), q(13, 128), q(85, 128), q(85, 128)],
    ]);
    let want_c = vec![z, z, one, one];
    let t = remark_tableau_exact();
    let p = permute_tableau(&t, &[0, 2, 1, 3]).unwrap();
    let pass = p.a == want_a && p.u == want_u && p.b == want_b && p.v == t.v && p.c == want_c;
    // The floating-point copy must agree with the rational one.
    let fp = permute_tableau(&get_remark_tableau(), &[0, 2, 1, 3]).unwrap();
    let to_f = |x: Ratio<i64>| *x.numer() as f64 / *x.denom() as f64;
    let fp_ok = fp.a == p.a.map(to_f) && fp.b == p.b.map(to_f);
    outcome(pass && fp_ok, format!("exact rational match: {pass}, float copy match: {fp_ok}"))
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let mut tri_err = 0.0f64;
    let mut line_err = 0.0f64;
    let mut checked = 0usize;
    for _ in 0..50 {
        let n = rng.gen_range(1..=12);
        let t = Tridiagonal::new(
            (0..n - 1).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect(),
            (0..n - 1).map(|_| rng.gen_range(-3.0..3.0)).collect(),
        )
        .unwrap();
        let (h, gamma) = (rng.gen_range(0.01..5.0), rng.gen_range(0.1..1.0));
        let Ok(f) = factor_shifted(&t, h, gamma) else { continue };
        let dense = Matrix::identity(n).sub(&dense_of(&t).scale(h * gamma));
        let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = f.solve(&b);
        let oracle = dense.solve(&Matrix::column(&b)).unwrap();
        let scale = oracle.max_abs().max(1.0);
        tri_err = tri_err.max((0..n).map(|i| (x[i] - oracle[(i, 0)]).abs()).fold(0.0, f64::max) / scale);
        checked += 1;
    }
    for _ in 0..30 {
        let dims: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=4)).collect();
        let grid = Grid::new(dims.clone());
        let axis = rng.gen_range(0..dims.len());
        let n = dims[axis];
        let t = Tridiagonal::new(
            (0..n - 1).map(|_| rng.gen_range(0.0..2.0)).collect(),
            (0..n).map(|_| rng.gen_range(-4.0..-2.0)).collect(),
            (0..n - 1).map(|_| rng.gen_range(0.0..2.0)).collect(),
        )
        .unwrap();
        let f = factor_shifted(&t, 0.3, 0.7).unwrap();
        let rhs: Vec<f64> = (0..grid.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = solve_lines(&grid, axis, &f, &rhs, Execution::Parallel).unwrap();
        let dense = Matrix::identity(grid.len()).sub(&dense_directional(&grid, axis, &t).scale(0.21));
        let oracle = dense.solve(&Matrix::column(&rhs)).unwrap();
        line_err = line_err.max((0..grid.len()).map(|i| (x[i] - oracle[(i, 0)]).abs()).fold(0.0, f64::max));
        checked += 1;
    }
    let mut eig_err = 0.0f64;
    for _ in 0..40 {
        let n = rng.gen_range(1..=8);
        let a = random_complex_matrix(&mut rng, n);
        let s = Matrix::identity(n).add(&random_complex_matrix(&mut rng, n).scale(Complex64::new(0.3, 0.0)));
        let Ok(s_inv) = s.inverse() else { continue };
        let b = s.matmul(&a).matmul(&s_inv);
        let ea = eigenvalues(&a).unwrap();
        let eb = eigenvalues(&b).unwrap();
        eig_err = eig_err.max(spectrum_distance(&ea, &eb));
        checked += 1;
    }
    let pass = tri_err <= 1e-11 && line_err <= 1e-11 && eig_err <= 1e-8 && checked >= 100;
    outcome(
        pass,
        format!("tridiagonal {tri_err:.1e}, line solves {line_err:.1e}, eigen similarity {eig_err:.1e} ({checked} instances)"),
    )
}

fn criterion_8() -> Outcome {
    let lambdas = [
        Complex64::new(-0.6, 0.3),
        Complex64::new(-0.4, -0.2),
        Complex64::new(-0.3, 0.1),
    ];
    let y0 = Complex64::new(0.8, -0.5);
    let hs = [0.2, 0.1, 0.05, 0.025];
    let mut pass = true;
    let mut parts = Vec::new();
    for m in methods() {
        let p = m.order;
        for layout in layouts() {
            let n = layout.n_partitions();
            let lam = &lambdas[..n];
            let total: Complex64 = lam.iter().sum();
            let sys = ScalarTestSystem::new(lam, y0);
            let errs: Vec<f64> = hs
                .iter()
                .map(|&h| {
                    let (xi, _) = start_external_stages(&m, &layout, &sys, 0.0, h, &StartReference::Exact, Execution::Sequential)
                        .unwrap();
                    let mut worst = 0.0f64;
                    for mu in 0..layout.stage_row_count() {
                        for i in 0..m.implicit.externals() {
                            // Analytic derivatives: d^(k-1)/dt^(k-1) f_sigma = lambda_sigma total^(k-1) y0.
                            let mut want = y0 * m.implicit.w[(i, 0)];
                            for (sigma, l) in lam.iter().enumerate() {
                                let w = &m.block_base(&layout, mu, sigma).w;
                                for k in 1..=p {
                                    want += *l * total.powu(k as u32 - 1) * y0 * (w[(i, k)] * h.powi(k as i32));
                                }
                            }
                            let got = Complex64::new(xi.xi[mu][i][0], xi.xi[mu][i][1]);
                            worst = worst.max((got - want).norm());
                        }
                    }
                    worst
                })
                .collect();
            let rate = loglog_slope(&hs, &errs);
            pass &= (rate - (p + 1) as f64).abs() <= 0.3;
            parts.push(format!("p={p} N={n}/{}: {rate:.2}", layout.n_stiff()));
        }
    }
    outcome(pass, format!("start error rates {}", parts.join(", ")))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("order conditions", criterion_1),
        ("convergence orders", criterion_2),
        ("step equals stability matrix", criterion_3),
        ("stiff limit structure", criterion_4),
        ("stability spot checks", criterion_5),
        ("permuted remark tableau", criterion_6),
        ("kernel oracles", criterion_7),
        ("starting procedure rate", criterion_8),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        let status = if o.pass { "PASS" } else { "FAIL" };
        println!(
            "criterion {} [{status}] {name} ({:.1}s): {}",
            k + 1,
            start.elapsed().as_secs_f64(),
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
