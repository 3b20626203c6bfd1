//! Builds the N-partite inequality in probability form and expands it
//! exactly into correlator form, printing both. The bipartite case is CHSH.

use gwi::expression::expand_to_correlators;
use gwi::build_gwi;

fn main() {
    for n in 2..=4 {
        let prob = build_gwi(n).expect("n >= 2");
        let corr = expand_to_correlators(&prob).expect("probability form");
        println!("n = {n}");
        println!("  probability form: {prob}");
        if n == 2 {
            println!("  correlator form:  {corr}");
        } else {
            println!("  correlator form:  {} terms, bound {}", match corr.terms() {
                gwi::expression::Terms::Correlator(ts) => ts.len(),
                _ => unreachable!(),
            }, corr.bound());
        }
        println!();
    }
}
