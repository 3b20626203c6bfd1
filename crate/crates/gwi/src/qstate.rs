//! N-qubit pure states, density matrices and white-noise mixtures, with
//! expectation values and joint outcome probabilities for dichotomic
//! Bloch-vector observables.
//!
//! Basis convention: computational basis indexed by bitstrings with party 1
//! as the most significant bit, `|0>`/`|1>` the +1/-1 eigenstates of sigma_z.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::consts::{EIGENVALUE_TOL, STRUCTURAL_TOL};
use crate::error::{GwiError, Result};

/// A dichotomic measurement outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl std::fmt::Display for Sign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A dichotomic qubit observable `n . sigma` given by a unit Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Observable {
    bloch: [f64; 3],
}

impl Observable {
    pub fn new(nx: f64, ny: f64, nz: f64) -> Result<Self> {
        if !(nx.is_finite() && ny.is_finite() && nz.is_finite()) {
            return Err(GwiError::Domain("Bloch components must be finite".into()));
        }
        let norm = (nx * nx + ny * ny + nz * nz).sqrt();
        if (norm - 1.0).abs() > STRUCTURAL_TOL {
            return Err(GwiError::Domain(format!(
                "Bloch vector must be unit norm, got ||n|| = {norm}"
            )));
        }
        Ok(Observable { bloch: [nx, ny, nz] })
    }

    pub fn sigma_x() -> Self {
        Observable { bloch: [1.0, 0.0, 0.0] }
    }

    pub fn sigma_y() -> Self {
        Observable { bloch: [0.0, 1.0, 0.0] }
    }

    pub fn sigma_z() -> Self {
        Observable { bloch: [0.0, 0.0, 1.0] }
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    /// 2x2 matrix `nx sigma_x + ny sigma_y + nz sigma_z`, row-major.
    pub fn matrix(&self) -> [[Complex64; 2]; 2] {
        let [nx, ny, nz] = self.bloch;
        [
            [Complex64::new(nz, 0.0), Complex64::new(nx, -ny)],
            [Complex64::new(nx, ny), Complex64::new(-nz, 0.0)],
        ]
    }

    /// Projector `(I + o * n.sigma) / 2` onto the `o` outcome.
    pub fn projector(&self, outcome: Sign) -> [[Complex64; 2]; 2] {
        let m = self.matrix();
        let o = outcome.value();
        [
            [
                (Complex64::new(1.0, 0.0) + o * m[0][0]) * 0.5,
                o * m[0][1] * 0.5,
            ],
            [
                o * m[1][0] * 0.5,
                (Complex64::new(1.0, 0.0) + o * m[1][1]) * 0.5,
            ],
        ]
    }

    /// Angle between the Bloch vectors of two observables, in [0, pi].
    pub fn angle_to(&self, other: &Observable) -> f64 {
        let a = self.bloch;
        let b = other.bloch;
        let dot: f64 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        dot.clamp(-1.0, 1.0).acos()
    }
}

/// Common interface of pure and mixed states for expression evaluation.
pub trait QState {
    fn n_parties(&self) -> usize;

    /// `Tr[rho (O_1 x ... x O_n)]` where each slot is either a Bloch
    /// observable or the identity.
    fn expectation(&self, selectors: &[Option<Observable>]) -> Result<f64>;

    /// Probability of the given outcome tuple when every party measures its
    /// listed observable.
    fn joint_probability(&self, settings: &[Observable], outcomes: &[Sign]) -> Result<f64>;
}

fn check_arity(expected: usize, got: usize, what: &str) -> Result<()> {
    if expected != got {
        return Err(GwiError::ArityMismatch(format!(
            "{what}: expected {expected} entries, got {got}"
        )));
    }
    Ok(())
}

/// An N-qubit pure state as a dense amplitude vector.
#[derive(Clone, Debug)]
pub struct PureState {
    n_parties: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(n_parties: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_parties < 1 {
            return Err(GwiError::InvalidArity("need at least one party".into()));
        }
        if amps.len() != 1 << n_parties {
            return Err(GwiError::Validation(format!(
                "amplitude vector must have length 2^{n_parties}, got {}",
                amps.len()
            )));
        }
        let norm_sq: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > STRUCTURAL_TOL {
            return Err(GwiError::Validation(format!(
                "state not normalized: |psi|^2 = {norm_sq}"
            )));
        }
        Ok(PureState { n_parties, amps })
    }

    /// `(|0...0> + |1...1>)/sqrt(2)` on `n` qubits.
    pub fn ghz(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GwiError::InvalidArity(format!("GHZ state needs n >= 2, got {n}")));
        }
        let dim = 1usize << n;
        let mut amps = vec![Complex64::ZERO; dim];
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0] = a;
        amps[dim - 1] = a;
        Ok(PureState { n_parties: n, amps })
    }

    /// The four-qubit cluster state `(|0000> + |0011> + |1100> - |1111>)/2`.
    pub fn cluster4() -> Self {
        let mut amps = vec![Complex64::ZERO; 16];
        let h = Complex64::new(0.5, 0.0);
        amps[0b0000] = h;
        amps[0b0011] = h;
        amps[0b1100] = h;
        amps[0b1111] = -h;
        PureState { n_parties: 4, amps }
    }

    /// The n-qubit W state: equal weight on every single-excitation basis state.
    pub fn w(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(GwiError::InvalidArity(format!("W state needs n >= 2, got {n}")));
        }
        let dim = 1usize << n;
        let mut amps = vec![Complex64::ZERO; dim];
        let a = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        for i in 0..n {
            amps[1 << i] = a;
        }
        Ok(PureState { n_parties: n, amps })
    }

    /// The two-qubit singlet `(|01> - |10>)/sqrt(2)`.
    pub fn singlet() -> Self {
        let mut amps = vec![Complex64::ZERO; 4];
        let a = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        amps[0b01] = a;
        amps[0b10] = -a;
        PureState { n_parties: 2, amps }
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Amplitude of the computational basis state with the given index
    /// (party 1 = most significant bit).
    pub fn amplitude(&self, basis_index: usize) -> Complex64 {
        self.amps[basis_index]
    }

    /// Applies a single-qubit operator to the given party (0-based), returning
    /// the transformed amplitude vector.
    fn apply_single(&self, amps: &mut [Complex64], party: usize, m: &[[Complex64; 2]; 2]) {
        let bit = self.n_parties - 1 - party;
        let stride = 1usize << bit;
        let dim = amps.len();
        let mut i = 0;
        while i < dim {
            for j in i..i + stride {
                let a0 = amps[j];
                let a1 = amps[j + stride];
                amps[j] = m[0][0] * a0 + m[0][1] * a1;
                amps[j + stride] = m[1][0] * a0 + m[1][1] * a1;
            }
            i += 2 * stride;
        }
    }
}

impl QState for PureState {
    fn n_parties(&self) -> usize {
        self.n_parties
    }

    fn expectation(&self, selectors: &[Option<Observable>]) -> Result<f64> {
        check_arity(self.n_parties, selectors.len(), "expectation selectors")?;
        let mut phi = self.amps.clone();
        for (party, sel) in selectors.iter().enumerate() {
            if let Some(obs) = sel {
                self.apply_single(&mut phi, party, &obs.matrix());
            }
        }
        let val: Complex64 = self
            .amps
            .iter()
            .zip(&phi)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(val.re)
    }

    fn joint_probability(&self, settings: &[Observable], outcomes: &[Sign]) -> Result<f64> {
        check_arity(self.n_parties, settings.len(), "joint_probability settings")?;
        check_arity(self.n_parties, outcomes.len(), "joint_probability outcomes")?;
        let mut phi = self.amps.clone();
        for (party, (obs, o)) in settings.iter().zip(outcomes).enumerate() {
            self.apply_single(&mut phi, party, &obs.projector(*o));
        }
        Ok(phi.iter().map(|a| a.norm_sqr()).sum())
    }
}

/// An N-qubit mixed state as a dense density matrix.
#[derive(Clone, Debug)]
pub struct MixedState {
    n_parties: usize,
    mat: DMatrix<Complex64>,
}

impl MixedState {
    /// Validates hermiticity, unit trace and positivity of an externally
    /// supplied matrix. Internal constructors skip the eigenvalue check since
    /// they preserve positivity analytically.
    pub fn new(n_parties: usize, mat: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_parties;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(GwiError::Validation(format!(
                "density matrix must be {dim}x{dim}, got {}x{}",
                mat.nrows(),
                mat.ncols()
            )));
        }
        for i in 0..dim {
            for j in i..dim {
                let d = (mat[(i, j)] - mat[(j, i)].conj()).norm();
                if d > STRUCTURAL_TOL {
                    return Err(GwiError::Validation(format!(
                        "density matrix not Hermitian at ({i},{j}): deviation {d}"
                    )));
                }
            }
        }
        let trace: Complex64 = (0..dim).map(|i| mat[(i, i)]).sum();
        if (trace.re - 1.0).abs() > STRUCTURAL_TOL || trace.im.abs() > STRUCTURAL_TOL {
            return Err(GwiError::Validation(format!("trace must be 1, got {trace}")));
        }
        let eig = mat.clone().symmetric_eigen();
        if let Some(min) = eig
            .eigenvalues
            .iter()
            .cloned()
            .min_by(|a, b| a.partial_cmp(b).unwrap())
        {
            if min < -EIGENVALUE_TOL {
                return Err(GwiError::Validation(format!(
                    "density matrix not positive: smallest eigenvalue {min}"
                )));
            }
        }
        Ok(MixedState { n_parties, mat })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let dim = psi.amps.len();
        let mat = DMatrix::from_fn(dim, dim, |i, j| psi.amps[i] * psi.amps[j].conj());
        MixedState { n_parties: psi.n_parties, mat }
    }

    pub fn maximally_mixed(n_parties: usize) -> Self {
        let dim = 1usize << n_parties;
        let p = Complex64::new(1.0 / dim as f64, 0.0);
        MixedState {
            n_parties,
            mat: DMatrix::from_diagonal_element(dim, dim, p),
        }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Builds the full operator `O_1 x ... x O_n` from per-party 2x2 blocks.
    fn kron_op(n: usize, blocks: &[[[Complex64; 2]; 2]]) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        DMatrix::from_fn(dim, dim, |r, c| {
            let mut v = Complex64::new(1.0, 0.0);
            for (party, b) in blocks.iter().enumerate() {
                let bit = n - 1 - party;
                let ri = (r >> bit) & 1;
                let ci = (c >> bit) & 1;
                v *= b[ri][ci];
                if v == Complex64::ZERO {
                    break;
                }
            }
            v
        })
    }

    fn trace_with(&self, op: &DMatrix<Complex64>) -> f64 {
        let dim = self.mat.nrows();
        let mut t = Complex64::ZERO;
        for i in 0..dim {
            for j in 0..dim {
                t += self.mat[(i, j)] * op[(j, i)];
            }
        }
        t.re
    }
}

impl QState for MixedState {
    fn n_parties(&self) -> usize {
        self.n_parties
    }

    fn expectation(&self, selectors: &[Option<Observable>]) -> Result<f64> {
        check_arity(self.n_parties, selectors.len(), "expectation selectors")?;
        let id = [
            [Complex64::new(1.0, 0.0), Complex64::ZERO],
            [Complex64::ZERO, Complex64::new(1.0, 0.0)],
        ];
        let blocks: Vec<_> = selectors
            .iter()
            .map(|s| s.map(|o| o.matrix()).unwrap_or(id))
            .collect();
        Ok(self.trace_with(&Self::kron_op(self.n_parties, &blocks)))
    }

    fn joint_probability(&self, settings: &[Observable], outcomes: &[Sign]) -> Result<f64> {
        check_arity(self.n_parties, settings.len(), "joint_probability settings")?;
        check_arity(self.n_parties, outcomes.len(), "joint_probability outcomes")?;
        let blocks: Vec<_> = settings
            .iter()
            .zip(outcomes)
            .map(|(s, o)| s.projector(*o))
            .collect();
        Ok(self.trace_with(&Self::kron_op(self.n_parties, &blocks)))
    }
}

/// `rho = v |psi><psi| + (1 - v) I / 2^n`.
pub fn add_white_noise(psi: &PureState, v: f64) -> Result<MixedState> {
    if !(0.0..=1.0).contains(&v) {
        return Err(GwiError::Domain(format!("visibility must be in [0, 1], got {v}")));
    }
    let dim = psi.amps.len();
    let noise = Complex64::new((1.0 - v) / dim as f64, 0.0);
    let mat = DMatrix::from_fn(dim, dim, |i, j| {
        let mut m = v * psi.amps[i] * psi.amps[j].conj();
        if i == j {
            m += noise;
        }
        m
    });
    Ok(MixedState { n_parties: psi.n_parties, mat })
}
