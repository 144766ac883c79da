//! Property checks shared by the per-module suites and the acceptance run.

pub mod info;
pub mod kb;
pub mod kernel;

use proptest::strategy::Strategy;
use proptest::test_runner::{TestCaseError, TestRunner};

use super::config;

pub type Check = fn() -> Result<(), String>;

/// Runs `f` on [`super::CASES`] generated values; the error names the
/// shrunk counterexample.
pub fn run<S>(strategy: S, f: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S: Strategy,
{
    TestRunner::new(config()).run(&strategy, f).map_err(|e| e.to_string())
}

pub fn all() -> Vec<(&'static str, Check)> {
    [kb::ALL, kernel::ALL, info::ALL].concat()
}
