pub mod characterize;
pub mod lifecycle;
pub mod modeling;
pub mod pipeline;
pub mod report;
