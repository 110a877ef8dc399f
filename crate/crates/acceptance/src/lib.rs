//! Runs named acceptance checks under a wall-clock limit and prints one
//! line per check.

use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    /// The check itself failed.
    Fail(String),
    /// Correct, but slower than allowed.
    TooSlow,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub limit: Duration,
    pub elapsed: Duration,
    pub detail: String,
    pub verdict: Verdict,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed() { "PASS" } else { "FAIL" };
        write!(
            f,
            "{tag}  {:<26} {:>8.3}s / {:>4}s",
            self.name,
            self.elapsed.as_secs_f64(),
            self.limit.as_secs()
        )?;
        match &self.verdict {
            Verdict::Pass => write!(f, "  {}", self.detail),
            Verdict::Fail(why) => write!(f, "  {why}"),
            Verdict::TooSlow => write!(f, "  over the time limit ({})", self.detail),
        }
    }
}

/// Runs `check`, which returns a short summary or an error. Panics count
/// as failures.
pub fn run<F>(name: &'static str, limit: Duration, check: F) -> Outcome
where
    F: FnOnce() -> Result<String, String>,
{
    let start = Instant::now();
    let result = panic::catch_unwind(AssertUnwindSafe(check));
    let elapsed = start.elapsed();
    let (verdict, detail) = match result {
        Ok(Ok(detail)) if elapsed <= limit => (Verdict::Pass, detail),
        Ok(Ok(detail)) => (Verdict::TooSlow, detail),
        Ok(Err(why)) => (Verdict::Fail(why), String::new()),
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            (Verdict::Fail(format!("panicked: {msg}")), String::new())
        }
    };
    Outcome {
        name,
        limit,
        elapsed,
        detail,
        verdict,
    }
}

/// `Err(msg)` unless `cond` holds.
pub fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}
