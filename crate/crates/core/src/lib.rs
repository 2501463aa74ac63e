//! Data envelopment analysis frontier tools: efficiency scores, terminal
//! units, two-dimensional frontier sections and frontier improvement by
//! artificial units.

pub mod cli;
pub mod dataset;
pub mod dea;
pub mod error;
pub mod improve;
pub mod io;
pub mod lp;
pub mod sections;
pub mod synth;
pub mod terminal;

pub use dataset::{Dataset, Origin, Point};
pub use dea::{Orientation, UnitClass};
pub use error::{Error, Result};
pub use improve::{improve_frontier, ImproveParams, ImprovementResult, OrientationFilter};
pub use terminal::{find_terminal_units, Direction};
