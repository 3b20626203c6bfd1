//! Evaluates the quadripartite correlator inequality on the GHZ, Cluster and
//! W states at their published near-optimal angles.

use gwi::expression::expand_to_correlators;
use gwi::optimize::Objective;
use gwi::qstate::PureState;
use gwi::build_gwi;

fn main() {
    let expr = expand_to_correlators(&build_gwi(4).unwrap()).unwrap();
    let bound = 4.0;

    let ghz = PureState::ghz(4).unwrap();
    let settings = Objective::GhzReduced.settings(&[0.6981, 2.2427]).unwrap();
    let v = expr.evaluate(&ghz, &settings).unwrap();
    println!("GHZ4     value = {v:.6}  (bound {bound}, violated: {})", v > bound);

    let cluster = PureState::cluster4();
    let settings = Objective::ClusterReduced.settings(&[0.3578, 2.2689]).unwrap();
    let v = expr.evaluate(&cluster, &settings).unwrap();
    println!("Cluster4 value = {v:.6}  (bound {bound}, violated: {})", v > bound);

    let w = PureState::w(4).unwrap();
    let settings = Objective::WReduced
        .settings(&[2.271, 0.131, 2.298, -2.557, -0.892])
        .unwrap();
    let v = expr.evaluate(&w, &settings).unwrap();
    println!("W4       value = {v:.6}  (bound {bound}, violated: {})", v > bound);
}
