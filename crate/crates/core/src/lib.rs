//! Alternating-directions-implicit general linear methods (ADI-GLMs).
//!
//! The crate covers the whole pipeline: GLM tableaux and their order
//! conditions, the ADI-DIMSIM methods of orders 2 to 4, a partitioned stepper
//! whose stages are implicit in one direction at a time, linear stability
//! analysis, and convergence studies on manufactured heat-equation problems.
//!
//! ```
//! use adi_glm::{integrate, method_by_order, IntegrateOptions, Problem};
//!
//! let method = method_by_order(2).unwrap();
//! let sys = Problem::Heat2d.build(8).unwrap();
//! let run = integrate(&method, Problem::Heat2d.layout(), &sys, 0.0, 1.0, 20, &IntegrateOptions::default()).unwrap();
//! assert!(run.error.unwrap() < 1e-3);
//! ```

pub mod convergence;
pub mod error;
pub mod exec;
pub mod integrator;
pub mod linalg;
pub mod methods;
pub mod problems;
pub mod stability;
pub mod tableau;

pub use convergence::{estimate_order, run_convergence, ConvergenceRow, ConvergenceStudy};
pub use error::{Error, Result};
pub use exec::Execution;
pub use integrator::{
    adi_step, finish, integrate, ExternalStages, IntegrateOptions, IntegrationResult, PartitionedSystem,
    StartReference, StepReport, Stepper,
};
pub use methods::{get_method, method_by_order, MethodId};
pub use problems::{build_heat2d, build_heat3d, relative_l2_error, HeatProblemConfig, PartitionMode, Problem};
pub use stability::{RegionGrid, RegionKind};
pub use tableau::{assemble_adi, AdiMethod, AssembledTableau, BaseTableau, PartitionLayout};
