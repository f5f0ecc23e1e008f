pub mod algnum;
pub mod arith;
pub mod cli;
pub mod cm;
pub mod data;
pub mod hyperelliptic;
pub mod jpipeline;
pub mod modular;
pub mod poly;
pub mod report;
pub mod series;
