//! A Hardy configuration: one joint probability strictly positive while the
//! three related ones vanish, witnessing nonlocality without inequalities.
//! The state cos(t)|00> + sin(t)|11> with X-Z plane settings chosen to zero
//! p(a+,b'+), p(a'+,b+) and p(a'-,b'-) reaches the optimal
//! p(a+,b+) = (5 sqrt(5) - 11) / 2.

use gwi::expression::hardy_witness;
use gwi::observables::{Plane, SettingSet};
use gwi::qstate::PureState;

fn main() {
    let t = 0.4346923427120576f64;
    let mut amps = vec![num_complex::Complex64::ZERO; 4];
    amps[0] = num_complex::Complex64::new(t.cos(), 0.0);
    amps[3] = num_complex::Complex64::new(t.sin(), 0.0);
    let state = PureState::new(2, amps).unwrap();
    let settings = SettingSet::from_angles(
        Plane::Xz,
        &[
            (-2.5287522661167228, -1.1962733975982307),
            (2.528752266084934, 1.1962733975467954),
        ],
    )
    .unwrap();

    let w = hardy_witness(&state, &settings).unwrap();
    println!("p(a+, b+)   = {:.12}   (optimum (5 sqrt 5 - 11)/2 = {:.12})",
        w.p1, (5.0 * 5f64.sqrt() - 11.0) / 2.0);
    println!("p(a+, b'+)  = {:.2e}", w.p2);
    println!("p(a'+, b+)  = {:.2e}", w.p3);
    println!("p(a'-, b'-) = {:.2e}", w.p4);
    println!("Hardy conditions met: {}", w.is_hardy);
}
