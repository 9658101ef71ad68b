pub mod bounds;
pub mod budget;
pub mod distinguisher;
pub mod ensembles;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod nets;
pub mod seed;
pub mod stabilizer;
pub mod stats;
pub mod tomography;
pub mod truncation;

pub use budget::MemoryBudget;
pub use error::{Error, Result};
pub use seed::RandomSeed;
