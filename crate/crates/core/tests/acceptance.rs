use std::io::Write;
use std::time::Duration;

use elg_core::suite::{run_all, run_criterion, SuiteOptions};

/// Runtime ceilings; `None` where only exactness is required.
const LIMITS: [Option<Duration>; 9] = [
    Some(Duration::from_secs(1)),
    Some(Duration::from_secs(120)),
    Some(Duration::from_secs(60)),
    Some(Duration::from_secs(60)),
    None,
    Some(Duration::from_secs(60)),
    Some(Duration::from_secs(5)),
    Some(Duration::from_secs(5)),
    None,
];

/// Criterion 2 restricted to n ≤ 4.
const ALGEBRA_SMALL_LIMIT: Duration = Duration::from_secs(5);

#[test]
fn acceptance() {
    let opts = SuiteOptions { quick: false, seed: 0 };
    let mut all = true;
    for r in run_all(&opts) {
        let o = &r.outcome;
        let limit = LIMITS[o.id - 1];
        let in_time = limit.is_none_or(|l| r.elapsed < l);
        let ok = o.passed && in_time;
        all &= ok;
        let limit_s = limit.map(|l| format!(" (limit {:.0?})", l)).unwrap_or_default();
        // written straight to stderr so the lines survive output capture
        let mut err = std::io::stderr().lock();
        let _ = writeln!(
            err,
            "criterion {} [{}]: {} in {:.2?}{}",
            o.id,
            o.title,
            if ok { "PASS" } else { "FAIL" },
            r.elapsed,
            limit_s
        );
        for d in &o.details {
            let _ = writeln!(err, "    {d}");
        }
    }
    let small = run_criterion(2, &SuiteOptions { quick: true, seed: 0 });
    let ok = small.outcome.passed && small.elapsed < ALGEBRA_SMALL_LIMIT;
    all &= ok;
    let _ = writeln!(
        std::io::stderr(),
        "criterion 2 [n <= 4]: {} in {:.2?} (limit {:.0?})",
        if ok { "PASS" } else { "FAIL" },
        small.elapsed,
        ALGEBRA_SMALL_LIMIT
    );
    assert!(all, "acceptance criteria failed; see output above");
}
