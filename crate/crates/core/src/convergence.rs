//! Temporal convergence studies on the heat benchmarks.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::integrator::{integrate, IntegrateOptions, StartReference};
use crate::methods::method_by_order;
use crate::problems::Problem;

pub const CONVERGENCE_HEADER: &str = "nsteps,error,observed_order";

/// Errors at or below this multiple of the unit roundoff count as saturated.
pub const SATURATION_FACTOR: f64 = 100.0;

/// A row stops the fit once the error shrinks by less than this factor.
pub const PLATEAU_RATIO: f64 = 1.1;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub nsteps: usize,
    pub error: f64,
    /// Observed order against the previous row.
    pub observed_order: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceStudy {
    pub problem: Problem,
    pub order: usize,
    pub n_points: usize,
    pub rows: Vec<ConvergenceRow>,
    pub slope: f64,
}

/// Fills `observed_order` from consecutive pairs.
pub fn with_observed_orders(points: &[(usize, f64)]) -> Vec<ConvergenceRow> {
    points
        .iter()
        .enumerate()
        .map(|(k, &(nsteps, error))| ConvergenceRow {
            nsteps,
            error,
            observed_order: (k > 0).then(|| {
                let (n0, e0) = points[k - 1];
                (e0 / error).ln() / (nsteps as f64 / n0 as f64).ln()
            }),
        })
        .collect()
}

/// Least-squares slope of `log(error)` against `log(1/nsteps)`.
///
/// Rows are used from the start until the error drops to the roundoff floor
/// or stops decreasing, whichever comes first.
pub fn estimate_order(rows: &[ConvergenceRow]) -> Result<f64> {
    let floor = SATURATION_FACTOR * f64::EPSILON;
    let mut usable: Vec<&ConvergenceRow> = Vec::new();
    for row in rows {
        if !(row.error.is_finite() && row.error > floor) {
            break;
        }
        if let Some(prev) = usable.last() {
            if row.nsteps <= prev.nsteps {
                return Err(Error::InvalidArgument("nsteps must be strictly increasing".into()));
            }
            if prev.error < PLATEAU_RATIO * row.error {
                break;
            }
        }
        usable.push(row);
    }
    if usable.len() < 2 {
        return Err(Error::Saturated);
    }
    let pts: Vec<(f64, f64)> = usable.iter().map(|r| (-(r.nsteps as f64).ln(), r.error.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// One integration over `[0, 1]` per entry of `steps`, run concurrently
/// under `exec`; rows come back in input order.
pub fn run_convergence(
    problem: Problem,
    order: usize,
    n_points: usize,
    steps: &[usize],
    exec: Execution,
) -> Result<ConvergenceStudy> {
    if steps.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "a convergence study needs at least 3 step counts, got {}",
            steps.len()
        )));
    }
    if steps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument("step counts must be strictly increasing".into()));
    }
    let method = method_by_order(order)?;
    let sys = problem.build(n_points)?;
    let layout = problem.layout();
    let opts = IntegrateOptions {
        exec,
        start: StartReference::Exact,
    };
    let results = map_indexed(exec, steps.len(), |k| {
        integrate(&method, layout, &sys, 0.0, 1.0, steps[k], &opts)
    });
    let mut points = Vec::with_capacity(steps.len());
    for (k, res) in results.into_iter().enumerate() {
        let res = res.map_err(|e| {
            Error::InvalidArgument(format!(
                "{problem} order {order} N_p={n_points} nsteps={}: {e}",
                steps[k]
            ))
        })?;
        points.push((steps[k], res.error.expect("heat problems have exact solutions")));
    }
    let rows = with_observed_orders(&points);
    let slope = estimate_order(&rows)?;
    Ok(ConvergenceStudy {
        problem,
        order,
        n_points,
        rows,
        slope,
    })
}

pub fn convergence_csv_row(row: &ConvergenceRow) -> String {
    match row.observed_order {
        Some(o) => format!("{},{:e},{:e}", row.nsteps, row.error, o),
        None => format!("{},{:e},", row.nsteps, row.error),
    }
}

pub fn write_convergence_csv<W: Write>(mut out: W, rows: &[ConvergenceRow]) -> Result<()> {
    writeln!(out, "{CONVERGENCE_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", convergence_csv_row(row))?;
    }
    Ok(())
}

pub fn parse_convergence_csv<R: BufRead>(input: R) -> Result<Vec<ConvergenceRow>> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != CONVERGENCE_HEADER {
        return Err(Error::InvalidArgument(format!("unexpected header `{header}`")));
    }
    let bad = |line: &str| Error::InvalidArgument(format!("malformed row `{line}`"));
    let mut rows = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(bad(&line));
        }
        let nsteps = fields[0].parse().map_err(|_| bad(&line))?;
        let error = fields[1].parse().map_err(|_| bad(&line))?;
        let observed_order = match fields[2] {
            "" => None,
            s => Some(s.parse().map_err(|_| bad(&line))?),
        };
        rows.push(ConvergenceRow {
            nsteps,
            error,
            observed_order,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(points: &[(usize, f64)]) -> Vec<ConvergenceRow> {
        with_observed_orders(points)
    }

    #[test]
    fn exact_quartering_gives_two() {
        let r = rows(&[(100, 1e-2), (200, 2.5e-3), (400, 6.25e-4)]);
        assert!((estimate_order(&r).unwrap() - 2.0).abs() < 1e-12);
        assert!((r[2].observed_order.unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(r[0].observed_order, None);
    }

    #[test]
    fn exact_eighth_gives_three() {
        let r = rows(&[(100, 1e-3), (200, 1.25e-4)]);
        assert!((estimate_order(&r).unwrap() - 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_errors_are_saturated() {
        let r = rows(&[(100, 1e-6), (200, 1e-6), (400, 1e-6)]);
        assert_eq!(estimate_order(&r), Err(Error::Saturated));
        let r = rows(&[(100, 1e-16), (200, 1e-17)]);
        assert_eq!(estimate_order(&r), Err(Error::Saturated));
    }

    #[test]
    fn plateau_rows_are_dropped() {
        let r = rows(&[(100, 1.6e-7), (200, 1e-8), (400, 6.25e-10), (800, 6e-10)]);
        assert!((estimate_order(&r).unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let r = rows(&[(320, 1.234_567_890_123_4e-5), (640, 3.1e-6), (1280, 7.77e-7)]);
        let mut buf = Vec::new();
        write_convergence_csv(&mut buf, &r).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("nsteps,error,observed_order\n320,1.2345678901234e-5,\n"));
        assert_eq!(parse_convergence_csv(&buf[..]).unwrap(), r);
    }

    #[test]
    fn short_ladders_are_rejected() {
        assert!(run_convergence(Problem::Heat2d, 2, 8, &[10, 20], Execution::Sequential).is_err());
        assert!(run_convergence(Problem::Heat2d, 2, 8, &[20, 10, 40], Execution::Sequential).is_err());
    }
}
