use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use adi_glm::convergence::write_convergence_csv;
use adi_glm::stability::write_region_csv;
use adi_glm::tableau::dump_method;
use adi_glm::{
    integrate, method_by_order, run_convergence, Error, Execution, IntegrateOptions, Problem, RegionGrid, RegionKind,
};

#[derive(Parser)]
#[command(name = "adi-glm", version, about = "ADI general linear methods: convergence studies, stability scans, integrations")]
struct Cli {
    /// Run everything on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProblemArg {
    Heat2d,
    Heat3d,
    #[value(name = "heat2d-3part")]
    Heat2d3Part,
}

impl From<ProblemArg> for Problem {
    fn from(p: ProblemArg) -> Self {
        match p {
            ProblemArg::Heat2d => Problem::Heat2d,
            ProblemArg::Heat3d => Problem::Heat3d,
            ProblemArg::Heat2d3Part => Problem::Heat2d3Part,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Explicit,
    Implicit,
    Cplx,
    Real,
}

impl From<KindArg> for RegionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Explicit => RegionKind::ExplicitBase,
            KindArg::Implicit => RegionKind::ImplicitBase,
            KindArg::Cplx => RegionKind::Cplx,
            KindArg::Real => RegionKind::Real,
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("expected <min:max>, got `{s}`"))?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("invalid range `{s}`"));
    }
    Ok((lo, hi))
}

#[derive(Clone, Debug)]
struct StepList(Vec<usize>);

fn parse_steps(s: &str) -> Result<StepList, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t}: {e}")))
        .collect::<Result<_, _>>()
        .map(StepList)
}

#[derive(Subcommand)]
enum Command {
    /// Relative l2 error at t = 1 for a ladder of step counts.
    Converge {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        order: u8,
        /// Interior grid points per direction; spacing is 1/(np+1).
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        np: u32,
        /// Comma-separated step counts, e.g. 320,640,1280.
        #[arg(long, value_parser = parse_steps)]
        steps: StepList,
        #[arg(long)]
        out: PathBuf,
    },
    /// Spectral radius of a stability matrix on a rectangular grid.
    Stability {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        order: u8,
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        re: (f64, f64),
        #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
        im: (f64, f64),
        /// Points per axis.
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        n: u32,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        partitions: u8,
        #[arg(long)]
        out: PathBuf,
    },
    /// One integration over [0, 1]; writes the final state.
    Integrate {
        #[arg(long, value_enum)]
        problem: ProblemArg,
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        order: u8,
        /// Interior grid points per direction; spacing is 1/(np+1).
        #[arg(long, value_parser = clap::value_parser!(u32).range(3..))]
        np: u32,
        #[arg(long)]
        steps: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the tableau of an ADI-DIMSIM method.
    Tableau {
        #[arg(long, value_parser = clap::value_parser!(u8).range(2..=4))]
        order: u8,
    },
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, Error> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), Error> {
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match cli.command {
        Command::Converge {
            problem,
            order,
            np,
            steps,
            out,
        } => {
            let study = run_convergence(problem.into(), order as usize, np as usize, &steps.0, exec)?;
            let mut w = create(&out)?;
            write_convergence_csv(&mut w, &study.rows)?;
            w.flush()?;
            eprintln!("fitted order {:.4}", study.slope);
        }
        Command::Stability {
            order,
            kind,
            re,
            im,
            n,
            partitions,
            out,
        } => {
            let m = method_by_order(order as usize)?;
            let grid = RegionGrid { x: re, y: im, n: n as usize };
            let mut w = create(&out)?;
            write_region_csv(&m, kind.into(), grid, partitions as usize, exec, &mut w)?;
            w.flush()?;
        }
        Command::Integrate {
            problem,
            order,
            np,
            steps,
            out,
        } => {
            let problem: Problem = problem.into();
            let m = method_by_order(order as usize)?;
            let sys = problem.build(np as usize)?;
            let opts = IntegrateOptions {
                exec,
                ..IntegrateOptions::default()
            };
            let res = integrate(&m, problem.layout(), &sys, 0.0, 1.0, steps, &opts)?;
            let mut w = create(&out)?;
            writeln!(w, "index,value")?;
            for (k, v) in res.state.iter().enumerate() {
                writeln!(w, "{k},{v:e}")?;
            }
            w.flush()?;
            if let Some(e) = res.error {
                eprintln!("relative l2 error {e:e}");
            }
        }
        Command::Tableau { order } => {
            let m = method_by_order(order as usize)?;
            io::stdout().write_all(dump_method(&m).as_bytes())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
