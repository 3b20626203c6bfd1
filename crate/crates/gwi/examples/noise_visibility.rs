//! White-noise visibility thresholds: the minimum pure-state weight v in
//! rho = v |psi><psi| + (1 - v) I / 2^N at which the inequality is still
//! violated.

use gwi::expression::expand_to_correlators;
use gwi::optimize::{visibility_threshold, Objective, OptimizeConfig};
use gwi::qstate::PureState;
use gwi::build_gwi;

fn main() {
    let expr = expand_to_correlators(&build_gwi(4).unwrap()).unwrap();
    let config = OptimizeConfig::default();

    let cases = [
        ("GHZ4    ", PureState::ghz(4).unwrap(), Objective::GhzReduced),
        ("Cluster4", PureState::cluster4(), Objective::ClusterReduced),
        ("W4      ", PureState::w(4).unwrap(), Objective::WReduced),
    ];
    for (name, state, objective) in cases {
        let r = visibility_threshold(&state, &expr, &objective, &config).unwrap();
        println!(
            "{name}: threshold v = {:.4}  (max violation {:.4}, bound {})",
            r.threshold, r.max_violation, r.bound
        );
    }
}
