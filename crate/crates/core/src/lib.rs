//! Fog-computing task offloading simulator: device scoring, allocation
//! policies, a seeded discrete-event engine, and delay/cost/SLA metrics.

pub mod cli;
pub mod config;
pub mod engine;
pub mod fixtures;
pub mod metrics;
pub mod model;
pub mod network;
pub mod policy;
pub mod pricing;
pub mod scoring;
