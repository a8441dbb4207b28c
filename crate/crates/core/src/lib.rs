//! STRIPS planning with a regression-table heuristic.
//!
//! Regression from the goals runs once and records, for every fact, a distance
//! estimate, the facts related to it and an achiever. Search then scores states
//! from that table. [`pipeline::solve`] runs the whole chain:
//!
//! ```
//! use grtkit::{corpus, pipeline::{solve, PipelineConfig, Status}};
//!
//! let (d, p) = corpus::get("blocks3", "sussman").unwrap().parse().unwrap();
//! let report = solve(&d, &p, &PipelineConfig::default()).unwrap();
//! assert_eq!(report.status, Status::Solved);
//! assert_eq!(report.plan.unwrap().len(), 3);
//! ```

pub mod analysis;
pub mod bench;
pub mod bitset;
pub mod corpus;
pub mod decompose;
pub mod ground;
pub mod heuristic;
pub mod oracle;
pub mod pipeline;
pub mod pddl;
pub mod search;
