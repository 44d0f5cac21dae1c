mod common;

use adi_glm::integrator::{
    integrate, DirectionalOperator, IntegrateOptions, PartitionedSystem, ScalarTestSystem, StartReference, Stepper,
};
use adi_glm::linalg::Matrix;
use adi_glm::{method_by_order, relative_l2_error, Execution, PartitionLayout, Problem};
use num_complex::Complex64;

use common::loglog_slope;

/// `y' = sum_sigma lambda_sigma (y - phi) + phi'` with `phi = sin`, split so
/// each partition carries its own stiff coefficient.
struct ProtheroRobinson {
    ops: Vec<DirectionalOperator>,
    lambdas: Vec<f64>,
}

impl ProtheroRobinson {
    fn new(lambdas: &[f64]) -> Self {
        ProtheroRobinson {
            ops: lambdas
                .iter()
                .map(|&l| DirectionalOperator::Dense(Matrix::from_rows(&[[l]])))
                .collect(),
            lambdas: lambdas.to_vec(),
        }
    }
}

impl PartitionedSystem for ProtheroRobinson {
    fn dim(&self) -> usize {
        1
    }

    fn n_partitions(&self) -> usize {
        self.ops.len()
    }

    fn operator(&self, sigma: usize) -> &DirectionalOperator {
        &self.ops[sigma]
    }

    fn affine_part(&self, sigma: usize, t: f64, out: &mut [f64]) {
        let share = 1.0 / self.ops.len() as f64;
        out[0] = -self.lambdas[sigma] * t.sin() + share * t.cos();
    }

    fn exact(&self, t: f64) -> Option<Vec<f64>> {
        Some(vec![t.sin()])
    }
}

fn error_ladder<S: PartitionedSystem>(order: usize, layout: PartitionLayout, sys: &S, steps: &[usize]) -> Vec<f64> {
    let m = method_by_order(order).unwrap();
    steps
        .iter()
        .map(|&n| {
            integrate(&m, layout, sys, 0.0, 1.0, n, &IntegrateOptions::default())
                .unwrap()
                .error
                .unwrap()
        })
        .collect()
}

fn rate(steps: &[usize], errs: &[f64]) -> f64 {
    let h: Vec<f64> = steps.iter().map(|&n| 1.0 / n as f64).collect();
    loglog_slope(&h, errs)
}

#[test]
fn nonstiff_scalar_problem_converges_at_method_order() {
    let lambdas = [Complex64::new(-0.5, 0.4), Complex64::new(-0.3, -0.2), Complex64::new(-0.2, 0.1)];
    let steps = [20, 40, 80, 160];
    for order in 2..=4 {
        for layout in common::layouts() {
            let sys = ScalarTestSystem::new(&lambdas[..layout.n_partitions()], Complex64::new(1.0, 0.5));
            let errs = error_ladder(order, layout, &sys, &steps);
            let r = rate(&steps, &errs);
            assert!((r - order as f64).abs() < 0.3, "order {order} {layout:?}: rate {r}, errors {errs:?}");
        }
    }
}

#[test]
fn prothero_robinson_stays_accurate_under_stiffness() {
    let steps = [20, 40, 80, 160];
    for order in 2..=4 {
        for lambdas in [[-1e4, -1e4], [-1e4, -1.0], [-1.0, -1e4]] {
            let sys = ProtheroRobinson::new(&lambdas);
            let errs = error_ladder(order, PartitionLayout::all_stiff(2).unwrap(), &sys, &steps);
            let p = order as f64;
            assert!(errs.windows(2).all(|w| w[1] < w[0]) && errs[0] < 1e-4, "{lambdas:?}: {errs:?}");
            let last = (errs[2] / errs[3]).log2();
            assert!(last >= p - 0.5, "order {order} {lambdas:?}: last pair {last}");
            if lambdas.contains(&-1.0) {
                let r = rate(&steps, &errs);
                assert!(r >= p - 0.5, "order {order} {lambdas:?}: rate {r}");
            }
        }
    }
}

#[test]
fn three_partition_heat_tracks_two_partition_errors() {
    let steps = [40, 80, 160];
    for order in 2..=3 {
        let ladders: Vec<Vec<f64>> = [Problem::Heat2d, Problem::Heat2d3Part]
            .iter()
            .map(|p| error_ladder(order, p.layout(), &p.build(16).unwrap(), &steps))
            .collect();
        for errs in &ladders {
            let r = rate(&steps, errs);
            assert!(r >= order as f64 - 0.3, "order {order}: rate {r}");
        }
        // Explicit forcing changes the error constant, not the magnitude.
        for (a, b) in ladders[0].iter().zip(&ladders[1]) {
            assert!((a / b).max(b / a) < 4.0, "order {order}: {a:e} vs {b:e}");
        }
    }
}

#[test]
fn factorizations_happen_once_per_step_size() {
    let m = method_by_order(3).unwrap();
    let sys = Problem::Heat3d.build(6).unwrap();
    let res = integrate(&m, Problem::Heat3d.layout(), &sys, 0.0, 1.0, 12, &IntegrateOptions::default()).unwrap();
    assert_eq!(res.counters.factorizations, 3);
    assert_eq!(res.counters.steps, 12);

    let layout = Problem::Heat2d.layout();
    let sys = Problem::Heat2d.build(5).unwrap();
    let mut stepper = Stepper::new(&m, layout, &sys, Execution::Sequential).unwrap();
    let (xi, _) = adi_glm::integrator::start_external_stages(
        &m,
        &layout,
        &sys,
        0.0,
        0.1,
        &StartReference::Exact,
        Execution::Sequential,
    )
    .unwrap();
    stepper.step(0.0, 0.1, &xi).unwrap();
    stepper.step(0.1, 0.1, &xi).unwrap();
    assert_eq!(stepper.factorizations(), 2);
    stepper.step(0.2, 0.05, &xi).unwrap();
    assert_eq!(stepper.factorizations(), 4);
}

#[test]
fn work_per_step_matches_stage_structure() {
    for order in 2..=4 {
        let m = method_by_order(order).unwrap();
        let s = m.stages();
        for problem in Problem::ALL {
            let sys = problem.build(5).unwrap();
            let layout = problem.layout();
            let res = integrate(&m, layout, &sys, 0.0, 1.0, 7, &IntegrateOptions::default()).unwrap();
            assert_eq!(res.counters.linear_solves, 7 * layout.stage_row_count() * s, "{problem}");
            assert_eq!(res.counters.rhs_evals, 7 * layout.n_partitions() * s, "{problem}");
            assert_eq!(res.counters.start_rhs_evals, layout.n_partitions() * order);
        }
    }
}

#[test]
fn parallel_and_sequential_runs_agree_bitwise() {
    let m = method_by_order(4).unwrap();
    for problem in Problem::ALL {
        let sys = problem.build(9).unwrap();
        let run = |exec| {
            let opts = IntegrateOptions {
                exec,
                ..IntegrateOptions::default()
            };
            integrate(&m, problem.layout(), &sys, 0.0, 1.0, 16, &opts).unwrap()
        };
        let (a, b) = (run(Execution::Sequential), run(Execution::Parallel));
        assert!(a.state.iter().zip(&b.state).all(|(x, y)| x.to_bits() == y.to_bits()));
        assert_eq!(a.counters, b.counters);
    }
}

#[test]
fn reported_error_is_relative_l2_against_exact_state() {
    let m = method_by_order(2).unwrap();
    let sys = Problem::Heat2d.build(8).unwrap();
    let res = integrate(&m, Problem::Heat2d.layout(), &sys, 0.0, 1.0, 10, &IntegrateOptions::default()).unwrap();
    let want = relative_l2_error(&res.state, &sys.exact_state(1.0)).unwrap();
    assert_eq!(res.error, Some(want));
}

#[test]
fn rk4_started_run_matches_exact_start() {
    let m = method_by_order(3).unwrap();
    let sys = Problem::Heat2d.build(8).unwrap();
    let layout = Problem::Heat2d.layout();
    let exact = integrate(&m, layout, &sys, 0.0, 1.0, 40, &IntegrateOptions::default()).unwrap();
    let opts = IntegrateOptions {
        start: StartReference::Integrate {
            y0: sys.exact_state(0.0),
            substeps: 20,
        },
        ..IntegrateOptions::default()
    };
    let rk = integrate(&m, layout, &sys, 0.0, 1.0, 40, &opts).unwrap();
    let (e0, e1) = (exact.error.unwrap(), rk.error.unwrap());
    assert!((e0 - e1).abs() <= 0.05 * e0, "{e0:e} vs {e1:e}");
}

#[test]
fn too_few_steps_and_mismatched_layouts_fail() {
    let m = method_by_order(4).unwrap();
    let sys = Problem::Heat2d.build(4).unwrap();
    let opts = IntegrateOptions::default();
    assert!(integrate(&m, Problem::Heat2d.layout(), &sys, 0.0, 1.0, 3, &opts).is_err());
    assert!(integrate(&m, Problem::Heat3d.layout(), &sys, 0.0, 1.0, 8, &opts).is_err());
    let no_exact = ProtheroRobinson::new(&[-1.0, -1.0]);
    assert!(integrate(&m, PartitionLayout::all_stiff(2).unwrap(), &no_exact, 0.0, 1.0, 8, &opts).is_ok());
}
