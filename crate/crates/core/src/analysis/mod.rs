//! Mutexes, goal enhancement and domain enrichment.

mod enhance;
mod enrich;
mod mutex;

pub use enhance::{candidate_goal_facts, enhance_goals, GoalCompletion, GoalEnhancement, GreedySelector};
pub use enrich::{enrich_domain, EnrichmentReport};
pub use mutex::{compute_mutexes, MutexTable};
