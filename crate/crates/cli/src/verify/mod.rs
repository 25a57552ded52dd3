//! The property verification suite: one check per acceptance criterion,
//! runnable from `infmax verify` and from the acceptance test target.

mod checks;
mod highprec;

pub use checks::DEFAULT_SEED;

/// Result of one verification check.
#[derive(Clone, Debug)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    /// Measured vs. required values, one line.
    pub details: String,
    pub seconds: f64,
}

impl CheckOutcome {
    pub fn render(&self) -> String {
        format!(
            "[{}] {:<28} {} ({:.1}s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.details,
            self.seconds
        )
    }
}

type Check = fn(u64) -> CheckOutcome;

/// Every check, in criterion order.
pub fn all_checks() -> Vec<(&'static str, Check)> {
    vec![
        ("rr-unbiasedness", checks::rr_unbiasedness as Check),
        ("maxcover-sandwich", checks::maxcover_sandwich),
        (
            "epic-expected-approximation",
            checks::epic_expected_approximation,
        ),
        ("lower-bound-properties", checks::lower_bound_properties),
        ("feedback-consistency", checks::feedback_consistency),
        ("adaptivity-gain", checks::adaptivity_gain),
        ("calibration-formulas", checks::calibration_formulas),
        ("rho-exactness", checks::rho_exactness),
        ("run-determinism", checks::run_determinism),
    ]
}

/// Runs the checks whose name contains `filter` (all when `None`).
pub fn run_checks(seed: u64, filter: Option<&str>) -> Vec<CheckOutcome> {
    all_checks()
        .into_iter()
        .filter(|(name, _)| filter.is_none_or(|f| name.contains(f)))
        .map(|(_, check)| check(seed))
        .collect()
}
