//! The original two-party, three-direction inequality on the singlet with
//! coplanar symmetric directions (a at 0, c at theta, b at 2 theta): the
//! left-hand side is positive (violation) for theta below pi/2 and changes
//! sign exactly at theta = pi/2.

use gwi::build_wigner_original;
use gwi::observables::xz_setting;
use gwi::qstate::PureState;

fn main() {
    let expr = build_wigner_original();
    let singlet = PureState::singlet();
    println!("{expr}");
    println!();
    println!("theta (deg)   lhs        violated");
    for deg in (10..=170).step_by(20) {
        let theta = (deg as f64).to_radians();
        let a = xz_setting(0.0).unwrap();
        let c = xz_setting(theta).unwrap();
        let b = xz_setting(2.0 * theta).unwrap();
        let v = expr.evaluate_directions(&singlet, &[a, b, c]).unwrap();
        println!("{deg:>8}      {v:+.6}  {}", v > 1e-12);
    }
    println!();
    println!("sign change at theta = 90 degrees");
}
