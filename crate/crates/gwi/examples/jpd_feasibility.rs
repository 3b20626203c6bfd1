//! Decides whether a behavior admits a single joint probability distribution
//! over all simultaneous outcomes: infeasible for the singlet at the
//! CHSH-optimal settings, feasible for a product state.

use gwi::consts::LP_TOL;
use gwi::lhv::{jpd_feasible, Behavior};
use gwi::observables::{Plane, SettingSet};
use gwi::qstate::PureState;

fn main() {
    // singlet at the CHSH-optimal directions in the X-Z plane
    let pi = std::f64::consts::PI;
    let settings = SettingSet::from_angles(
        Plane::Xz,
        &[(0.0, pi / 2.0), (3.0 * pi / 4.0, pi / 4.0)],
    )
    .unwrap();
    let singlet = Behavior::from_state(&PureState::singlet(), &settings).unwrap();
    let r = jpd_feasible(&singlet, LP_TOL).unwrap();
    println!("singlet @ CHSH-optimal: feasible = {}", r.feasible);
    if let Some((expr, value)) = &r.violated {
        println!("  violated: {expr}  (value {value:.6})");
    }

    // |00> is classical: a joint distribution always exists
    let mut amps = vec![num_complex::Complex64::ZERO; 4];
    amps[0] = num_complex::Complex64::new(1.0, 0.0);
    let product = PureState::new(2, amps).unwrap();
    let behavior = Behavior::from_state(&product, &settings).unwrap();
    let r = jpd_feasible(&behavior, LP_TOL).unwrap();
    println!("|00>   @ same settings: feasible = {}", r.feasible);
    if let Some(w) = &r.witness {
        let nonzero = w.atoms.iter().filter(|&&p| p > 1e-12).count();
        println!("  witness distribution has {nonzero} non-zero atoms");
    }
}
