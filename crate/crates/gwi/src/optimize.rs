//! Maximization of the quantum violation over measurement angles: the
//! closed-form reduced objectives for the quadripartite GHZ, Cluster and W
//! states, a generic full-angle search, and white-noise visibility
//! thresholds.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{GwiError, Result};
use crate::expression::{build_gwi, expand_to_correlators, InequalityExpression, Terms};
use crate::observables::{Plane, SettingPair, SettingSet};
use crate::qstate::{add_white_noise, Observable, PureState, QState};

/// Reduced GHZ objective: `cos(a) - cos(a + 4b) - 4 cos(a + b)` where
/// `a = phi_1 + phi_2 + phi_3 + phi_4` and `phi'_i = phi_i + b` in the X-Y
/// plane.
pub fn ghz_reduced(alpha: f64, beta: f64) -> f64 {
    alpha.cos() - (alpha + 4.0 * beta).cos() - 4.0 * (alpha + beta).cos()
}

/// Reduced Cluster objective in the X-Z plane under the angle constraints
/// `phi_1 = -phi_2 = -phi_3 = phi_4`, `phi'_1 = -phi'_3`, `phi'_2 = -phi'_4`,
/// `phi'_1 + phi'_2 = 2 pi`.
pub fn cluster_reduced(phi1: f64, phi1p: f64) -> f64 {
    let c = phi1.cos();
    let q = phi1p.cos();
    c.powi(4) - q.powi(4) - 2.0 * q * q - 2.0 * c * c + 4.0 * q.powi(3)
        - 4.0 * c * c * q
        - 4.0 * c.powi(3) * q
        - 4.0 * c * q
        + 8.0 * c * phi1.sin() * phi1p.sin()
}

/// Reduced W objective in the X-Z plane with `phi_1 = 0`, `phi_2 = phi_4`,
/// `phi'_2 = phi'_4` baked in.
pub fn w_reduced(phi1p: f64, phi2: f64, phi2p: f64, phi3: f64, phi3p: f64) -> f64 {
    let c = f64::cos;
    let (p1, a, ap, b, bp) = (phi1p, phi2, phi2p, phi3, phi3p);
    c(2.0 * a) / 4.0 + c(2.0 * ap) / 4.0 - c(2.0 * a - b) / 8.0 + c(2.0 * a - bp) / 8.0
        + c(p1 + 2.0 * a + b) / 2.0
        + c(p1 + 2.0 * ap + bp) / 2.0
        + c(a + ap - b) / 4.0
        + c(a - ap + b) / 4.0
        + c(p1 + a) / 2.0
        + c(p1 + ap) / 2.0
        + c(p1 + b) / 2.0
        + 3.0 * c(a + ap) / 2.0
        + c(p1 + bp) / 2.0
        + c(a + b) / 2.0
        + 3.0 * c(a + bp) / 2.0
        + 3.0 * c(ap + b) / 2.0
        + c(ap + bp) / 2.0
        + c(p1 - 2.0 * a - b) / 8.0
        + c(p1 + 2.0 * a - b) / 8.0
        + c(p1 - 2.0 * ap - bp) / 8.0
        + c(p1 + 2.0 * ap - bp) / 8.0
        + c(a - ap - b) / 4.0
        - 2.0 * c(a)
        - 5.0 * c(b) / 4.0
        + c(bp) / 4.0
        - c(p1 - a) / 2.0
        + c(p1 + 2.0 * a) / 2.0
        - c(p1 - ap) / 2.0
        - c(p1 + 2.0 * ap) / 2.0
        - c(p1 - b) / 4.0
        - c(a - ap) / 2.0
        - c(p1 - bp) / 4.0
        - c(a - b) / 2.0
        - c(a - bp) / 2.0
        - c(ap - b) / 2.0
        - 5.0 * c(2.0 * a + b) / 8.0
        - c(ap - bp) / 2.0
        + 9.0 * c(2.0 * a + bp) / 8.0
        - c(2.0 * ap + bp) / 2.0
        + c(p1 + a + b)
        - c(p1 + ap + bp)
        + 9.0 * c(a + ap + b) / 4.0
        - 1.5
}

/// What to maximize.
#[derive(Clone, Debug)]
pub enum Objective {
    GhzReduced,
    ClusterReduced,
    WReduced,
    /// Correlator GWI on the state over all `2n` planar angles.
    Full { state: PureState, plane: Plane },
    /// Correlator GWI over raw Bloch vectors, two spherical angles per
    /// observable. Experimental generic path.
    FullBloch { state: PureState },
}

impl Objective {
    pub fn dim(&self) -> usize {
        match self {
            Objective::GhzReduced | Objective::ClusterReduced => 2,
            Objective::WReduced => 5,
            Objective::Full { state, .. } => 2 * state.n_parties(),
            Objective::FullBloch { state } => 4 * state.n_parties(),
        }
    }

    /// Maps an angle vector back to the full setting set it parametrizes.
    pub fn settings(&self, angles: &[f64]) -> Result<SettingSet> {
        if angles.len() != self.dim() {
            return Err(GwiError::ArityMismatch(format!(
                "objective expects {} angles, got {}",
                self.dim(),
                angles.len()
            )));
        }
        match self {
            Objective::GhzReduced => {
                let (alpha, beta) = (angles[0], angles[1]);
                let phi = alpha / 4.0;
                SettingSet::from_angles(Plane::Xy, &[(phi, phi + beta); 4])
            }
            Objective::ClusterReduced => {
                let (p, q) = (angles[0], angles[1]);
                let tau = std::f64::consts::TAU;
                SettingSet::from_angles(
                    Plane::Xz,
                    &[(p, q), (-p, tau - q), (-p, -q), (p, q - tau)],
                )
            }
            Objective::WReduced => {
                let (p1, a, ap, b, bp) =
                    (angles[0], angles[1], angles[2], angles[3], angles[4]);
                SettingSet::from_angles(Plane::Xz, &[(0.0, p1), (a, ap), (b, bp), (a, ap)])
            }
            Objective::Full { plane, .. } => SettingSet::from_flat_angles(*plane, angles),
            Objective::FullBloch { .. } => {
                let pairs = angles
                    .chunks(4)
                    .map(|c| {
                        Ok(SettingPair {
                            unprimed: spherical(c[0], c[1])?,
                            primed: spherical(c[2], c[3])?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                SettingSet::new(pairs)
            }
        }
    }

    fn evaluator(&self) -> Result<Evaluator> {
        match self {
            Objective::GhzReduced => Ok(Evaluator::Closure(|x| ghz_reduced(x[0], x[1]))),
            Objective::ClusterReduced => {
                Ok(Evaluator::Closure(|x| cluster_reduced(x[0], x[1])))
            }
            Objective::WReduced => {
                Ok(Evaluator::Closure(|x| w_reduced(x[0], x[1], x[2], x[3], x[4])))
            }
            Objective::Full { state, plane } => {
                Ok(Evaluator::Tensor(TensorObjective::new(state, Some(*plane))?))
            }
            Objective::FullBloch { state } => {
                Ok(Evaluator::Tensor(TensorObjective::new(state, None)?))
            }
        }
    }
}

fn spherical(theta: f64, phi: f64) -> Result<Observable> {
    Observable::new(
        theta.sin() * phi.cos(),
        theta.sin() * phi.sin(),
        theta.cos(),
    )
}

enum Evaluator {
    Closure(fn(&[f64]) -> f64),
    Tensor(TensorObjective),
}

impl Evaluator {
    fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Evaluator::Closure(f) => f(x),
            Evaluator::Tensor(t) => t.eval(x),
        }
    }
}

/// Fast evaluation of the correlator GWI on a fixed pure state: the state's
/// full Pauli correlation tensor is computed once, after which each objective
/// call is a small multilinear contraction against the setting Bloch vectors.
struct TensorObjective {
    n: usize,
    /// `plane = None` means spherical Bloch parametrization (two angles per
    /// observable).
    plane: Option<Plane>,
    /// Pauli tensor, base-4 index, party-major; component 0 is identity.
    tensor: Vec<f64>,
    /// Expanded GWI terms as (coefficient, per-party choice).
    terms: Vec<(f64, Vec<Option<usize>>)>,
}

impl TensorObjective {
    fn new(state: &PureState, plane: Option<Plane>) -> Result<Self> {
        let n = state.n_parties();
        let expr = expand_to_correlators(&build_gwi(n)?)?;
        let terms = match expr.terms() {
            Terms::Correlator(ts) => ts
                .iter()
                .map(|t| {
                    (
                        *t.coeff.numer() as f64 / *t.coeff.denom() as f64,
                        t.parties.clone(),
                    )
                })
                .collect(),
            _ => unreachable!(),
        };
        let size = 1usize << (2 * n); // 4^n
        let mut tensor = vec![0.0; size];
        let paulis = [
            None,
            Some(Observable::sigma_x()),
            Some(Observable::sigma_y()),
            Some(Observable::sigma_z()),
        ];
        for (idx, slot) in tensor.iter_mut().enumerate() {
            let sels: Vec<Option<Observable>> = (0..n)
                .map(|p| paulis[(idx >> (2 * (n - 1 - p))) & 3])
                .collect();
            *slot = state.expectation(&sels)?;
        }
        Ok(TensorObjective { n, plane, tensor, terms })
    }

    fn blochs(&self, x: &[f64]) -> Vec<[[f64; 3]; 2]> {
        (0..self.n)
            .map(|p| match self.plane {
                Some(Plane::Xy) => {
                    let (u, v) = (x[2 * p], x[2 * p + 1]);
                    [[u.cos(), u.sin(), 0.0], [v.cos(), v.sin(), 0.0]]
                }
                Some(Plane::Xz) => {
                    let (u, v) = (x[2 * p], x[2 * p + 1]);
                    [[u.sin(), 0.0, u.cos()], [v.sin(), 0.0, v.cos()]]
                }
                None => {
                    let c = &x[4 * p..4 * p + 4];
                    [
                        [
                            c[0].sin() * c[1].cos(),
                            c[0].sin() * c[1].sin(),
                            c[0].cos(),
                        ],
                        [
                            c[2].sin() * c[3].cos(),
                            c[2].sin() * c[3].sin(),
                            c[2].cos(),
                        ],
                    ]
                }
            })
            .collect()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let blochs = self.blochs(x);
        let mut total = 0.0;
        for (coeff, parties) in &self.terms {
            total += coeff * self.contract(parties, &blochs, 0, 0, 1.0);
        }
        total
    }

    fn contract(
        &self,
        parties: &[Option<usize>],
        blochs: &[[[f64; 3]; 2]],
        party: usize,
        idx: usize,
        weight: f64,
    ) -> f64 {
        if party == self.n {
            return weight * self.tensor[idx];
        }
        match parties[party] {
            None => self.contract(parties, blochs, party + 1, idx * 4, weight),
            Some(choice) => {
                let b = &blochs[party][choice];
                let mut acc = 0.0;
                for (k, &comp) in b.iter().enumerate() {
                    if comp != 0.0 {
                        acc += self.contract(
                            parties,
                            blochs,
                            party + 1,
                            idx * 4 + k + 1,
                            weight * comp,
                        );
                    }
                }
                acc
            }
        }
    }
}

/// Search configuration. Accepted as JSON:
/// `{"restarts": int, "seed": int, "tol": float, "max_iters": int,
/// "plane": "XY"|"XZ"}`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct OptimizeConfig {
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iters")]
    pub max_iters: usize,
    #[serde(default)]
    pub plane: Option<Plane>,
}

fn default_restarts() -> usize {
    64
}
fn default_seed() -> u64 {
    42
}
fn default_tol() -> f64 {
    1e-9
}
fn default_max_iters() -> usize {
    4000
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            restarts: default_restarts(),
            seed: default_seed(),
            tol: default_tol(),
            max_iters: default_max_iters(),
            plane: None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimizationResult {
    pub best_value: f64,
    pub best_angles: Vec<f64>,
    pub restarts_used: usize,
    pub seed: u64,
    pub converged: bool,
}

/// Multi-start Nelder-Mead ascent. Each restart draws its start point from
/// an independent stream of the seeded generator, so the result depends only
/// on (seed, restarts) and ties go to the lowest restart index.
pub fn maximize(objective: &Objective, config: &OptimizeConfig) -> Result<OptimizationResult> {
    if config.restarts < 1 {
        return Err(GwiError::Domain("need at least one restart".into()));
    }
    if !(config.tol > 0.0) {
        return Err(GwiError::Domain("tolerance must be positive".into()));
    }
    let evaluator = objective.evaluator()?;
    let dim = objective.dim();
    let mut best: Option<(f64, Vec<f64>, bool)> = None;
    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        rng.set_stream(restart as u64 + 1);
        let x0: Vec<f64> = (0..dim)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        let run = nelder_mead(
            |x| -evaluator.eval(x),
            &x0,
            config.tol,
            config.max_iters,
        );
        let value = -run.fmin;
        if best.as_ref().map_or(true, |(bv, _, _)| value > *bv) {
            best = Some((value, run.xmin, run.converged));
        }
    }
    let (best_value, xmin, converged) = best.expect("restarts >= 1");
    let best_angles: Vec<f64> = xmin
        .iter()
        .map(|a| a.rem_euclid(std::f64::consts::TAU))
        .collect();
    // wrapping is a no-op on the value by periodicity of every objective
    Ok(OptimizationResult {
        best_value,
        best_angles,
        restarts_used: config.restarts,
        seed: config.seed,
        converged,
    })
}

struct NmRun {
    xmin: Vec<f64>,
    fmin: f64,
    converged: bool,
}

/// Standard reflection/expansion/contraction/shrink simplex descent.
/// Converges when the simplex diameter falls below `tol` or the value spread
/// below 1e-12.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    tol: f64,
    max_iters: usize,
) -> NmRun {
    let dim = x0.len();
    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(x0.to_vec());
    for i in 0..dim {
        let mut v = x0.to_vec();
        v[i] += 0.5;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut converged = false;
    for _ in 0..max_iters {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        let reorder: Vec<Vec<f64>> = order.iter().map(|&i| simplex[i].clone()).collect();
        let revalues: Vec<f64> = order.iter().map(|&i| values[i]).collect();
        simplex = reorder;
        values = revalues;

        let diameter = simplex[1..]
            .iter()
            .map(|v| {
                v.iter()
                    .zip(&simplex[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if diameter < tol || (values[dim] - values[0]).abs() < 1e-12 {
            converged = true;
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|k| simplex[..dim].iter().map(|v| v[k]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let reflected: Vec<f64> = centroid
            .iter()
            .zip(&worst)
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        let fr = f(&reflected);

        if fr < values[0] {
            let expanded: Vec<f64> = centroid
                .iter()
                .zip(&worst)
                .map(|(c, w)| c + gamma * (c - w))
                .collect();
            let fe = f(&expanded);
            if fe < fr {
                simplex[dim] = expanded;
                values[dim] = fe;
            } else {
                simplex[dim] = reflected;
                values[dim] = fr;
            }
        } else if fr < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = fr;
        } else {
            let (base, fbase) = if fr < values[dim] {
                (reflected.clone(), fr)
            } else {
                (worst.clone(), values[dim])
            };
            let contracted: Vec<f64> = centroid
                .iter()
                .zip(&base)
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            let fc = f(&contracted);
            if fc < fbase {
                simplex[dim] = contracted;
                values[dim] = fc;
            } else {
                for i in 1..=dim {
                    let shrunk: Vec<f64> = simplex[0]
                        .iter()
                        .zip(&simplex[i])
                        .map(|(b, v)| b + sigma * (v - b))
                        .collect();
                    simplex[i] = shrunk;
                    values[i] = f(&simplex[i]);
                }
            }
        }
    }

    let (mut xmin, mut fmin) = (simplex[0].clone(), values[0]);
    for i in 1..=dim {
        if values[i] < fmin {
            fmin = values[i];
            xmin = simplex[i].clone();
        }
    }
    NmRun { xmin, fmin, converged }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VisibilityResult {
    /// Minimum visibility at which the violation persists; 1.0 when the
    /// inequality is not violated at all.
    pub threshold: f64,
    pub max_violation: f64,
    pub bound: f64,
    /// False when `max_violation <= bound` and no threshold exists.
    pub attainable: bool,
}

/// Threshold visibility of a pure state for a correlator GWI: the violation
/// under white noise scales linearly in `v`, so the threshold is
/// `bound / max_violation`. The bracketing property is verified by direct
/// evaluation on the noisy state at threshold +- 0.01.
pub fn visibility_threshold(
    state: &PureState,
    expr: &InequalityExpression,
    objective: &Objective,
    config: &OptimizeConfig,
) -> Result<VisibilityResult> {
    if expr.is_probability_form() {
        return Err(GwiError::Domain(
            "visibility threshold needs the correlator form".into(),
        ));
    }
    if expr.n_parties() != state.n_parties() {
        return Err(GwiError::ArityMismatch(
            "expression and state party counts differ".into(),
        ));
    }
    let opt = maximize(objective, config)?;
    let bound = *expr.bound().numer() as f64 / *expr.bound().denom() as f64;
    let max_violation = opt.best_value;
    if max_violation <= bound {
        return Ok(VisibilityResult {
            threshold: 1.0,
            max_violation,
            bound,
            attainable: false,
        });
    }
    let threshold = bound / max_violation;

    // verify persistence above and failure below the threshold at the
    // maximizing settings
    let settings = objective.settings(&opt.best_angles)?;
    let above = (threshold + 0.01).min(1.0);
    let below = (threshold - 0.01).max(0.0);
    let v_above = expr.evaluate(&add_white_noise(state, above)?, &settings)?;
    let v_below = expr.evaluate(&add_white_noise(state, below)?, &settings)?;
    if v_above <= bound + 1e-6 || v_below >= bound - 1e-6 {
        return Err(GwiError::Numerical(format!(
            "threshold bracketing failed: value {v_above} at v = {above}, \
             {v_below} at v = {below}, bound {bound}"
        )));
    }
    Ok(VisibilityResult { threshold, max_violation, bound, attainable: true })
}
