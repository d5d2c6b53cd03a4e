pub mod analysis;
pub mod arisa;
pub mod cli;
pub mod config;
pub mod evolution;
pub mod frontend;
pub mod metrics;
pub mod mi;
pub mod model;
pub mod report;
pub mod sqale;
