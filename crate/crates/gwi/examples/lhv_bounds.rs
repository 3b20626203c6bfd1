//! Exact local-hidden-variable bounds by exhaustive enumeration of all
//! deterministic strategies, for both expression forms, N = 2..5.

use gwi::expression::expand_to_correlators;
use gwi::lhv::{lhv_argmax, lhv_max};
use gwi::build_gwi;

fn main() {
    for n in 2..=5 {
        let prob = build_gwi(n).unwrap();
        let corr = expand_to_correlators(&prob).unwrap();
        let pb = lhv_max(&prob).unwrap();
        let (cb, strategy) = lhv_argmax(&corr).unwrap();
        println!(
            "n = {n}: probability bound = {pb}, correlator bound = {cb} \
             (attained by {strategy:?})"
        );
    }
}
