//! Maximizes the quantum violation with seeded multi-start Nelder-Mead:
//! the three reduced quadripartite objectives, plus the unconstrained
//! planar search on the GHZ state for comparison.

use gwi::observables::Plane;
use gwi::optimize::{maximize, Objective, OptimizeConfig};
use gwi::qstate::PureState;

fn main() {
    let config = OptimizeConfig::default();

    for (name, objective) in [
        ("GHZ4 reduced   ", Objective::GhzReduced),
        ("Cluster4 reduced", Objective::ClusterReduced),
        ("W4 reduced     ", Objective::WReduced),
    ] {
        let r = maximize(&objective, &config).unwrap();
        println!(
            "{name}: max = {:.6} at {:?}",
            r.best_value,
            r.best_angles.iter().map(|a| (a * 1e4).round() / 1e4).collect::<Vec<_>>()
        );
    }

    let full = Objective::Full {
        state: PureState::ghz(4).unwrap(),
        plane: Plane::Xy,
    };
    let config = OptimizeConfig { restarts: 256, ..config };
    let r = maximize(&full, &config).unwrap();
    println!("GHZ4 full XY (8 angles): max = {:.6}", r.best_value);
    println!("exact GHZ maximum 4*sqrt(2) = {:.6}", 4.0 * 2f64.sqrt());
}
