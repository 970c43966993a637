pub mod algebra;
pub mod error;
pub mod expansion;
pub mod gram;
pub mod linalg;
pub mod presets;
pub mod rational;
pub mod report;
pub mod statistics;
