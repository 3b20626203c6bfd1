//! One-shot reproduction of every headline number: the three maximum
//! violations, three visibility thresholds, local-hidden-variable bounds,
//! and marginal-identity counts, each checked against its target.

use gwi::report::reproduce;

fn main() {
    let report = reproduce(42).unwrap();
    print!("{}", report.to_markdown());
    std::process::exit(if report.all_pass { 0 } else { 1 });
}
