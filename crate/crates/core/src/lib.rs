//! Numerical verification of statistical structures with almost product-like
//! tensors, their submanifolds and hypersurfaces.

pub mod checks;
pub mod error;
pub mod expr;
pub mod geometry;
pub mod hypersurface;
pub mod linalg;
pub mod oracle;
pub mod product;
pub mod report;
pub mod scenario;
pub mod submanifold;
pub mod taylor;
pub mod tensor;

pub use error::{Error, Result};
pub use expr::{parse_expr, ExprTree, Jet2};
pub use geometry::{ChartGeometry, Connection, ConnectionKind, SamplePlan, StructureField};
pub use submanifold::Immersion;
pub use taylor::Taylor;
pub use tensor::Arr;
pub use checks::{catalog, lookup, run_scenario, CheckInfo, RunOptions};
pub use report::{CheckReport, RunReport, Verdict};
pub use scenario::bundled::{bundled_file, bundled_scenario};
pub use scenario::{load_scenario, load_scenario_file, validate_scenario, ScenarioDoc, ScenarioFile};
