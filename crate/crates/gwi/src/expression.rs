//! Bell-type inequalities as symbolic linear expressions over
//! joint-probability or correlator terms, with exact rational coefficients.
//!
//! Choice indexing: 0 = unprimed, 1 = primed. The original three-direction
//! Wigner inequality uses a third shared direction with index 2.

use std::collections::BTreeMap;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde_json::json;

use crate::error::{GwiError, Result};
use crate::observables::SettingSet;
use crate::qstate::{Observable, QState, Sign};

pub type Coeff = Ratio<i64>;

/// One `coeff * p(outcomes | choices)` term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbabilityTerm {
    pub coeff: Coeff,
    /// Per party: (setting choice, required outcome).
    pub parties: Vec<(usize, Sign)>,
}

/// One `coeff * <product of chosen observables>` term; `None` marks an
/// identity slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorTerm {
    pub coeff: Coeff,
    pub parties: Vec<Option<usize>>,
}

impl CorrelatorTerm {
    pub fn identity_count(&self) -> usize {
        self.parties.iter().filter(|p| p.is_none()).count()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terms {
    Probability(Vec<ProbabilityTerm>),
    Correlator(Vec<CorrelatorTerm>),
}

/// A linear expression over probability or correlator terms together with
/// its local-realist bound: `sum of terms <= bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InequalityExpression {
    n_parties: usize,
    settings_per_party: usize,
    terms: Terms,
    bound: Coeff,
}

impl InequalityExpression {
    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn settings_per_party(&self) -> usize {
        self.settings_per_party
    }

    pub fn bound(&self) -> Coeff {
        self.bound
    }

    pub fn terms(&self) -> &Terms {
        &self.terms
    }

    pub fn is_probability_form(&self) -> bool {
        matches!(self.terms, Terms::Probability(_))
    }

    /// Evaluates the expression with explicit per-party observable lists,
    /// indexed by the terms' choice indices.
    pub fn evaluate_with(&self, state: &dyn QState, obs: &[Vec<Observable>]) -> Result<f64> {
        if obs.len() != self.n_parties || state.n_parties() != self.n_parties {
            return Err(GwiError::ArityMismatch(format!(
                "expression has {} parties, state has {}, settings have {}",
                self.n_parties,
                state.n_parties(),
                obs.len()
            )));
        }
        for (i, o) in obs.iter().enumerate() {
            if o.len() < self.settings_per_party {
                return Err(GwiError::ArityMismatch(format!(
                    "party {} has {} observables, expression needs {}",
                    i + 1,
                    o.len(),
                    self.settings_per_party
                )));
            }
        }
        let mut total = 0.0;
        match &self.terms {
            Terms::Probability(ts) => {
                for t in ts {
                    let settings: Vec<Observable> = t
                        .parties
                        .iter()
                        .enumerate()
                        .map(|(i, (c, _))| obs[i][*c])
                        .collect();
                    let outcomes: Vec<Sign> = t.parties.iter().map(|(_, o)| *o).collect();
                    total += ratio_to_f64(t.coeff)
                        * state.joint_probability(&settings, &outcomes)?;
                }
            }
            Terms::Correlator(ts) => {
                for t in ts {
                    let sels: Vec<Option<Observable>> = t
                        .parties
                        .iter()
                        .enumerate()
                        .map(|(i, c)| c.map(|ch| obs[i][ch]))
                        .collect();
                    total += ratio_to_f64(t.coeff) * state.expectation(&sels)?;
                }
            }
        }
        Ok(total)
    }

    /// Evaluates against a standard two-setting-per-party setting set.
    pub fn evaluate(&self, state: &dyn QState, settings: &SettingSet) -> Result<f64> {
        if self.settings_per_party > 2 {
            return Err(GwiError::ArityMismatch(
                "expression needs more than two settings per party; use evaluate_directions"
                    .into(),
            ));
        }
        if settings.n_parties() != self.n_parties {
            return Err(GwiError::ArityMismatch(format!(
                "expression has {} parties, settings have {}",
                self.n_parties,
                settings.n_parties()
            )));
        }
        let obs: Vec<Vec<Observable>> = settings
            .pairs()
            .iter()
            .map(|p| vec![p.unprimed, p.primed])
            .collect();
        self.evaluate_with(state, &obs)
    }

    /// Evaluates a shared-direction expression (all parties measure from the
    /// same list of directions, as in the original Wigner scenario).
    pub fn evaluate_directions(&self, state: &dyn QState, dirs: &[Observable]) -> Result<f64> {
        if dirs.len() < self.settings_per_party {
            return Err(GwiError::ArityMismatch(format!(
                "expression needs {} shared directions, got {}",
                self.settings_per_party,
                dirs.len()
            )));
        }
        let obs = vec![dirs.to_vec(); self.n_parties];
        self.evaluate_with(state, &obs)
    }

    /// Returns the same expression with unprimed/primed swapped on the marked
    /// parties. Probability form with two settings per party only.
    pub fn swap_primes(&self, swap: &[bool]) -> Result<InequalityExpression> {
        if swap.len() != self.n_parties {
            return Err(GwiError::ArityMismatch("swap mask arity".into()));
        }
        if self.settings_per_party != 2 {
            return Err(GwiError::Domain("prime swap needs two settings per party".into()));
        }
        let terms = match &self.terms {
            Terms::Probability(ts) => Terms::Probability(
                ts.iter()
                    .map(|t| ProbabilityTerm {
                        coeff: t.coeff,
                        parties: t
                            .parties
                            .iter()
                            .enumerate()
                            .map(|(i, (c, o))| (if swap[i] { 1 - c } else { *c }, *o))
                            .collect(),
                    })
                    .collect(),
            ),
            Terms::Correlator(ts) => Terms::Correlator(
                ts.iter()
                    .map(|t| CorrelatorTerm {
                        coeff: t.coeff,
                        parties: t
                            .parties
                            .iter()
                            .enumerate()
                            .map(|(i, c)| c.map(|ch| if swap[i] { 1 - ch } else { ch }))
                            .collect(),
                    })
                    .collect(),
            ),
        };
        Ok(InequalityExpression {
            n_parties: self.n_parties,
            settings_per_party: 2,
            terms,
            bound: self.bound,
        })
    }

    /// Deterministic JSON rendering of terms and bound.
    pub fn to_json(&self) -> serde_json::Value {
        let bound = json!({ "num": *self.bound.numer(), "den": *self.bound.denom() });
        match &self.terms {
            Terms::Probability(ts) => json!({
                "form": "probability",
                "n_parties": self.n_parties,
                "settings_per_party": self.settings_per_party,
                "terms": ts.iter().map(|t| json!({
                    "coeff": { "num": *t.coeff.numer(), "den": *t.coeff.denom() },
                    "parties": t.parties.iter().map(|(c, o)| json!({
                        "choice": c,
                        "outcome": o.to_string(),
                    })).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
                "bound": bound,
            }),
            Terms::Correlator(ts) => json!({
                "form": "correlator",
                "n_parties": self.n_parties,
                "settings_per_party": self.settings_per_party,
                "terms": ts.iter().map(|t| json!({
                    "coeff": { "num": *t.coeff.numer(), "den": *t.coeff.denom() },
                    "parties": t.parties,
                })).collect::<Vec<_>>(),
                "bound": bound,
            }),
        }
    }
}

fn ratio_to_f64(r: Coeff) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

fn symbol(party: usize, choice: usize) -> String {
    let primes = match choice {
        0 => "",
        1 => "'",
        _ => "''",
    };
    format!("a{}{}", party + 1, primes)
}

impl std::fmt::Display for InequalityExpression {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let fmt_coeff = |c: Coeff, first: bool| -> String {
            let sign = if c.is_negative() { "- " } else if first { "" } else { "+ " };
            let a = c.abs();
            if a.is_one() {
                sign.to_string()
            } else if a.denom().is_one() {
                format!("{sign}{} ", a.numer())
            } else {
                format!("{sign}{}/{} ", a.numer(), a.denom())
            }
        };
        let mut first = true;
        match &self.terms {
            Terms::Probability(ts) => {
                for t in ts {
                    let body: Vec<String> = t
                        .parties
                        .iter()
                        .enumerate()
                        .map(|(i, (c, o))| format!("{}{}", symbol(i, *c), o))
                        .collect();
                    write!(f, "{}p({})", fmt_coeff(t.coeff, first), body.join(","))?;
                    write!(f, " ")?;
                    first = false;
                }
            }
            Terms::Correlator(ts) => {
                for t in ts {
                    let body: String = t
                        .parties
                        .iter()
                        .enumerate()
                        .filter_map(|(i, c)| c.map(|ch| symbol(i, ch)))
                        .collect::<Vec<_>>()
                        .join(" ");
                    write!(f, "{}<{}> ", fmt_coeff(t.coeff, first), body)?;
                    first = false;
                }
            }
        }
        if self.bound.denom().is_one() {
            write!(f, "<= {}", self.bound.numer())
        } else {
            write!(f, "<= {}/{}", self.bound.numer(), self.bound.denom())
        }
    }
}

/// N-partite generalized Wigner inequality in probability form: one positive
/// all-unprimed-plus term, N negative single-primed terms, one negative
/// all-primed-minus term, bound 0.
pub fn build_gwi(n: usize) -> Result<InequalityExpression> {
    build_gwi_signed(n, &vec![Sign::Plus; n])
}

/// Outcome-sign-flipped variant: party i's outcomes are multiplied by
/// `mask[i]` in every term.
pub fn build_gwi_signed(n: usize, mask: &[Sign]) -> Result<InequalityExpression> {
    if n < 2 {
        return Err(GwiError::InvalidArity(format!("GWI needs n >= 2, got {n}")));
    }
    if mask.len() != n {
        return Err(GwiError::ArityMismatch(format!(
            "sign mask needs {n} entries, got {}",
            mask.len()
        )));
    }
    let one = Coeff::one();
    let mut terms = Vec::with_capacity(n + 2);
    terms.push(ProbabilityTerm {
        coeff: one,
        parties: (0..n).map(|i| (0, mask[i])).collect(),
    });
    for j in 0..n {
        terms.push(ProbabilityTerm {
            coeff: -one,
            parties: (0..n)
                .map(|i| (if i == j { 1 } else { 0 }, mask[i]))
                .collect(),
        });
    }
    terms.push(ProbabilityTerm {
        coeff: -one,
        parties: (0..n).map(|i| (1, mask[i].flip())).collect(),
    });
    Ok(InequalityExpression {
        n_parties: n,
        settings_per_party: 2,
        terms: Terms::Probability(terms),
        bound: Coeff::zero(),
    })
}

/// Wigner's original three-direction inequality for two parties:
/// `p(a+,b+) - p(a+,c+) - p(c+,b+) <= 0`, directions a, b, c shared by both
/// parties (choice indices 0, 1, 2).
pub fn build_wigner_original() -> InequalityExpression {
    let one = Coeff::one();
    let terms = vec![
        ProbabilityTerm {
            coeff: one,
            parties: vec![(0, Sign::Plus), (1, Sign::Plus)],
        },
        ProbabilityTerm {
            coeff: -one,
            parties: vec![(0, Sign::Plus), (2, Sign::Plus)],
        },
        ProbabilityTerm {
            coeff: -one,
            parties: vec![(2, Sign::Plus), (1, Sign::Plus)],
        },
    ];
    InequalityExpression {
        n_parties: 2,
        settings_per_party: 3,
        terms: Terms::Probability(terms),
        bound: Coeff::zero(),
    }
}

/// Expands a probability-form expression into correlator form with exact
/// rational arithmetic.
///
/// Each `p(outcomes | choices)` becomes `2^-N prod_i (1 + o_i A_i)`; the
/// whole expression is rescaled by `2^N` so GWI coefficients are integers,
/// and the constant term is absorbed into the bound. Terms are returned in
/// canonical order: identity count descending, then lexicographic by party
/// choices.
pub fn expand_to_correlators(expr: &InequalityExpression) -> Result<InequalityExpression> {
    let prob_terms = match &expr.terms {
        Terms::Probability(ts) => ts,
        Terms::Correlator(_) => {
            return Err(GwiError::Domain("expression is already in correlator form".into()))
        }
    };
    let n = expr.n_parties;
    let mut monomials: BTreeMap<Vec<Option<usize>>, Coeff> = BTreeMap::new();
    for t in prob_terms {
        for subset in 0..(1u32 << n) {
            let mut coeff = t.coeff;
            let mut key = Vec::with_capacity(n);
            for (i, (choice, outcome)) in t.parties.iter().enumerate() {
                if (subset >> i) & 1 == 1 {
                    coeff *= Coeff::from_integer(outcome.as_i64());
                    key.push(Some(*choice));
                } else {
                    key.push(None);
                }
            }
            *monomials.entry(key).or_insert_with(Coeff::zero) += coeff;
        }
    }
    let scale = Coeff::from_integer(1i64 << n);
    let constant = monomials
        .remove(&vec![None; n])
        .unwrap_or_else(Coeff::zero);
    let mut terms: Vec<CorrelatorTerm> = monomials
        .into_iter()
        .filter(|(_, c)| !c.is_zero())
        .map(|(parties, coeff)| CorrelatorTerm { coeff, parties })
        .collect();
    terms.sort_by(|a, b| {
        b.identity_count()
            .cmp(&a.identity_count())
            .then_with(|| a.parties.cmp(&b.parties))
    });
    Ok(InequalityExpression {
        n_parties: n,
        settings_per_party: expr.settings_per_party,
        terms: Terms::Correlator(terms),
        bound: scale * expr.bound - constant,
    })
}

/// The four joint probabilities entering the bipartite GWI, plus the Hardy
/// predicate: the first strictly positive while the other three vanish.
#[derive(Clone, Copy, Debug)]
pub struct HardyWitness {
    /// p(a+, b+)
    pub p1: f64,
    /// p(a+, b'+)
    pub p2: f64,
    /// p(a'+, b+)
    pub p3: f64,
    /// p(a'-, b'-)
    pub p4: f64,
    pub is_hardy: bool,
}

pub fn hardy_witness(state: &dyn QState, settings: &SettingSet) -> Result<HardyWitness> {
    if state.n_parties() != 2 || settings.n_parties() != 2 {
        return Err(GwiError::ArityMismatch(
            "Hardy witness is defined for bipartite states".into(),
        ));
    }
    let a = settings.pair(0).unprimed;
    let ap = settings.pair(0).primed;
    let b = settings.pair(1).unprimed;
    let bp = settings.pair(1).primed;
    let p1 = state.joint_probability(&[a, b], &[Sign::Plus, Sign::Plus])?;
    let p2 = state.joint_probability(&[a, bp], &[Sign::Plus, Sign::Plus])?;
    let p3 = state.joint_probability(&[ap, b], &[Sign::Plus, Sign::Plus])?;
    let p4 = state.joint_probability(&[ap, bp], &[Sign::Minus, Sign::Minus])?;
    let eps = 1e-9;
    Ok(HardyWitness {
        p1,
        p2,
        p3,
        p4,
        is_hardy: p1 > eps && p2 < eps && p3 < eps && p4 < eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{xz_setting, Plane};
    use crate::qstate::PureState;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn corr(coeff: i64, parties: Vec<Option<usize>>) -> CorrelatorTerm {
        CorrelatorTerm { coeff: Coeff::from_integer(coeff), parties }
    }

    #[test]
    fn gwi_structure() {
        for n in 2..=5usize {
            let e = build_gwi(n).unwrap();
            assert!(e.bound().is_zero());
            let ts = match e.terms() {
                Terms::Probability(ts) => ts,
                _ => panic!(),
            };
            assert_eq!(ts.len(), n + 2);
            assert!(ts[0].coeff.is_one());
            assert!(ts[0].parties.iter().all(|&(c, o)| c == 0 && o == Sign::Plus));
            assert!(ts[n + 1].parties.iter().all(|&(c, o)| c == 1 && o == Sign::Minus));
        }
        assert!(build_gwi(1).is_err());
    }

    #[test]
    fn chsh_expansion() {
        let e = expand_to_correlators(&build_gwi(2).unwrap()).unwrap();
        assert_eq!(e.bound(), Coeff::from_integer(2));
        let expected = vec![
            corr(1, vec![Some(0), Some(0)]),
            corr(-1, vec![Some(0), Some(1)]),
            corr(-1, vec![Some(1), Some(0)]),
            corr(-1, vec![Some(1), Some(1)]),
        ];
        assert_eq!(e.terms(), &Terms::Correlator(expected));
    }

    #[test]
    fn sign_flipped_chsh_expansion() {
        // Outcome signs flipped on party 2: expands to the paper's second
        // CHSH form <a'b'> + <ab'> + <a'b> - <ab> <= 2.
        let e = build_gwi_signed(2, &[Sign::Plus, Sign::Minus]).unwrap();
        let c = expand_to_correlators(&e).unwrap();
        assert_eq!(c.bound(), Coeff::from_integer(2));
        let expected = vec![
            corr(-1, vec![Some(0), Some(0)]),
            corr(1, vec![Some(0), Some(1)]),
            corr(1, vec![Some(1), Some(0)]),
            corr(1, vec![Some(1), Some(1)]),
        ];
        assert_eq!(c.terms(), &Terms::Correlator(expected));
    }

    #[test]
    fn expansion_bounds_match_party_count() {
        for n in 2..=6usize {
            let c = expand_to_correlators(&build_gwi(n).unwrap()).unwrap();
            assert_eq!(c.bound(), Coeff::from_integer(n as i64));
        }
    }

    #[test]
    fn quadripartite_singles_have_coefficient_minus_two() {
        let c = expand_to_correlators(&build_gwi(4).unwrap()).unwrap();
        let ts = match c.terms() {
            Terms::Correlator(ts) => ts,
            _ => panic!(),
        };
        let singles: Vec<_> = ts.iter().filter(|t| t.identity_count() == 3).collect();
        assert_eq!(singles.len(), 4);
        for s in &singles {
            assert_eq!(s.coeff, Coeff::from_integer(-2));
            assert_eq!(s.parties.iter().flatten().count(), 1);
            assert_eq!(*s.parties.iter().flatten().next().unwrap(), 0);
        }
    }

    #[test]
    fn expansion_roundtrips_against_probability_evaluation() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..=4usize {
            let p = build_gwi(n).unwrap();
            let c = expand_to_correlators(&p).unwrap();
            for _ in 0..34 {
                let dim = 1usize << n;
                let mut amps: Vec<_> = (0..dim)
                    .map(|_| {
                        num_complex::Complex64::new(
                            rng.gen_range(-1.0..1.0),
                            rng.gen_range(-1.0..1.0),
                        )
                    })
                    .collect();
                let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                for a in &mut amps {
                    *a /= norm;
                }
                let state = PureState::new(n, amps).unwrap();
                let angles: Vec<(f64, f64)> = (0..n)
                    .map(|_| (rng.gen_range(0.0..std::f64::consts::TAU), rng.gen_range(0.0..std::f64::consts::TAU)))
                    .collect();
                let settings = SettingSet::from_angles(Plane::Xz, &angles).unwrap();
                let vp = p.evaluate(&state, &settings).unwrap();
                let vc = c.evaluate(&state, &settings).unwrap();
                // v_c - N = 2^N v_p
                let lhs = vc - n as f64;
                let rhs = (1u64 << n) as f64 * vp;
                assert!((lhs - rhs).abs() < 1e-10, "n={n}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn wigner_original_on_singlet() {
        let w = build_wigner_original();
        let s = PureState::singlet();
        // all directions equal: every probability vanishes
        let z = Observable::sigma_z();
        let v = w.evaluate_directions(&s, &[z, z, z]).unwrap();
        assert!(v.abs() < 1e-12);

        // theta13 = theta23 = pi/3, theta12 = 2pi/3: violated by 0.125
        let a = xz_setting(0.0).unwrap();
        let c = xz_setting(std::f64::consts::FRAC_PI_3).unwrap();
        let b = xz_setting(2.0 * std::f64::consts::FRAC_PI_3).unwrap();
        let v = w.evaluate_directions(&s, &[a, b, c]).unwrap();
        assert!((v - 0.125).abs() < 1e-12, "got {v}");

        // boundary at theta = pi/2
        let c = xz_setting(std::f64::consts::FRAC_PI_2).unwrap();
        let b = xz_setting(std::f64::consts::PI).unwrap();
        let v = w.evaluate_directions(&s, &[a, b, c]).unwrap();
        assert!(v.abs() < 1e-12, "got {v}");
    }

    #[test]
    fn maximally_mixed_never_violates() {
        let c = expand_to_correlators(&build_gwi(4).unwrap()).unwrap();
        let mm = crate::qstate::MixedState::maximally_mixed(4);
        let settings = SettingSet::from_angles(Plane::Xy, &[(0.3, 1.1); 4]).unwrap();
        let v = c.evaluate(&mm, &settings).unwrap();
        assert!(v.abs() < 1e-10);
    }

    #[test]
    fn hardy_witness_cases() {
        let settings = SettingSet::from_angles(Plane::Xz, &[(0.3, 1.2), (0.7, 2.1)]).unwrap();

        let mm = crate::qstate::MixedState::maximally_mixed(2);
        assert!(!hardy_witness(&mm, &settings).unwrap().is_hardy);

        let mut amps = vec![num_complex::Complex64::ZERO; 4];
        amps[0] = num_complex::Complex64::new(1.0, 0.0);
        let product = PureState::new(2, amps).unwrap();
        assert!(!hardy_witness(&product, &settings).unwrap().is_hardy);

        // Hardy configuration frozen from an exact constrained construction:
        // state cos(t)|00> + sin(t)|11> with X-Z settings solving
        // p2 = p3 = p4 = 0 and maximizing p1 = (5 sqrt(5) - 11)/2.
        let t = 0.4346923427120576f64;
        let mut amps = vec![num_complex::Complex64::ZERO; 4];
        amps[0] = num_complex::Complex64::new(t.cos(), 0.0);
        amps[3] = num_complex::Complex64::new(t.sin(), 0.0);
        let hardy_state = PureState::new(2, amps).unwrap();
        let hardy_settings = SettingSet::from_angles(
            Plane::Xz,
            &[
                (-2.5287522661167228, -1.1962733975982307),
                (2.528752266084934, 1.1962733975467954),
            ],
        )
        .unwrap();
        let w = hardy_witness(&hardy_state, &hardy_settings).unwrap();
        assert!(w.is_hardy, "p = {:?}", (w.p1, w.p2, w.p3, w.p4));
        let golden = (5.0 * 5f64.sqrt() - 11.0) / 2.0;
        assert!((w.p1 - golden).abs() < 1e-9);

        assert!(hardy_witness(&PureState::ghz(3).unwrap(), &settings).is_err());
    }

    #[test]
    fn rendering_is_deterministic() {
        let e = expand_to_correlators(&build_gwi(2).unwrap()).unwrap();
        let text = e.to_string();
        assert_eq!(text, "<a1 a2> - <a1 a2'> - <a1' a2> - <a1' a2'> <= 2");
        let j1 = serde_json::to_string(&e.to_json()).unwrap();
        let j2 = serde_json::to_string(&e.to_json()).unwrap();
        assert_eq!(j1, j2);

        let p = build_gwi(2).unwrap();
        assert_eq!(
            p.to_string(),
            "p(a1+,a2+) - p(a1'+,a2+) - p(a1+,a2'+) - p(a1'-,a2'-) <= 0"
        );
    }
}
