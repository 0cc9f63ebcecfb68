//! Search algorithms and exhaustive test oracles.

pub mod brute;
pub mod fixpoint;
pub mod lemke;
pub mod walk;

pub use brute::{brute_line, brute_lcp, brute_opdc, brute_uso, budget_from_env, is_p_matrix, lcp_solutions};
pub use fixpoint::{approx_find_fp, find_fp, EpsSchedule, SearchStats};
pub use lemke::{lemke, LemkeRun};
pub use walk::{aldous, default_max_steps, follow_line, solve_line, Walk};
