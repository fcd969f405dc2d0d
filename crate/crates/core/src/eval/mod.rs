pub mod experiment;
pub mod folds;
pub mod metrics;
pub mod report;
pub mod stats;
