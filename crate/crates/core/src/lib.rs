pub mod bernstein;
pub mod cyclo;
pub mod error;
pub mod extquot;
pub mod geomequiv;
pub mod groups;
pub mod klparam;
pub mod oracles;
pub mod packets;
pub mod report;
pub mod scenario;
pub mod springer;
pub mod torus;

pub use error::{Error, Result};
