//! Density matrices, partial transposes, negativities and the π-tangle.
//!
//! Basis ordering for three detectors (index 0–7):
//! `ggg, gge, geg, egg, gee, ege, eeg, eee` with letters in the order A, B, C.
//! For two detectors `gg, ge, eg, ee` with the first letter the lower label.
//!
//! All perturbative negativities are per `λ̃²` and π-tangles per `λ̃⁴`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlators::{CorrelatorSet, DetectorLabel, PairLabel};
use crate::error::{Error, Result};

/// Eigenvalues of a partial transpose above `−ZERO_THRESHOLD` count as zero.
pub const ZERO_THRESHOLD: f64 = 1e-12;
/// Largest coupling the leading-order density matrix is trusted at.
pub const MAX_COUPLING: f64 = 0.1;
/// Default coupling of the eigen-mode extraction.
pub const DEFAULT_COUPLING: f64 = 1e-3;
/// The companion coupling is `λ̃ · 10^{1/4}`.
pub const COMPANION_FACTOR: f64 = 1.778_279_410_038_922_8;
/// Allowed relative spread of the normalized negativity between the two
/// evaluation couplings.
pub const COUPLING_SENSITIVITY: f64 = 1e-3;

const HERMITIAN_TOL: f64 = 1e-12;

/// Excitation pattern (A, B, C) of each three-detector basis index.
const BASIS3: [[u8; 3]; 8] = [
    [0, 0, 0],
    [0, 0, 1],
    [0, 1, 0],
    [1, 0, 0],
    [0, 1, 1],
    [1, 0, 1],
    [1, 1, 0],
    [1, 1, 1],
];
/// Excitation pattern (j, k) of each two-detector basis index.
const BASIS2: [[u8; 3]; 4] = [[0, 0, 0], [0, 1, 0], [1, 0, 0], [1, 1, 0]];

fn basis(dim: usize) -> &'static [[u8; 3]] {
    if dim == 8 {
        &BASIS3
    } else {
        &BASIS2
    }
}

fn index_of(dim: usize, bits: [u8; 3]) -> usize {
    basis(dim)
        .iter()
        .position(|b| *b == bits)
        .expect("every bit pattern is a basis state")
}

/// Hermitian, unit-trace 4×4 or 8×8 matrix in the fixed basis.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let dim = m.nrows();
        if !(dim == 4 || dim == 8) || m.ncols() != dim {
            return Err(Error::invalid(format!(
                "density matrix must be 4x4 or 8x8, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let asym = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(Error::invalid(format!("matrix is not Hermitian (deviation {asym:e})")));
        }
        let trace = m.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > HERMITIAN_TOL {
            return Err(Error::invalid(format!("trace is {trace}, not one")));
        }
        Ok(Self { m })
    }

    /// `|ψ⟩⟨ψ|` for a normalized state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let v = nalgebra::DVector::from_column_slice(psi);
        let norm = v.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("state vector has norm {norm}")));
        }
        Self::new(&v * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[(row, col)]
    }

    /// Detectors carried by this matrix: A, B, C for dim 8; the first two
    /// slots (j, k) for dim 4.
    fn slots(&self) -> usize {
        if self.dim() == 8 {
            3
        } else {
            2
        }
    }

    /// Trace over detector `drop` of a three-detector matrix. The remaining
    /// two keep their relative order.
    pub fn reduce(&self, drop: DetectorLabel) -> Result<DensityMatrix> {
        if self.dim() != 8 {
            return Err(Error::invalid("only a three-detector matrix can be reduced"));
        }
        let keep: Vec<usize> = (0..3).filter(|&i| i != drop.index()).collect();
        let mut out = DMatrix::zeros(4, 4);
        for r in 0..8 {
            for c in 0..8 {
                let (br, bc) = (BASIS3[r], BASIS3[c]);
                if br[drop.index()] != bc[drop.index()] {
                    continue;
                }
                let rr = index_of(4, [br[keep[0]], br[keep[1]], 0]);
                let cc = index_of(4, [bc[keep[0]], bc[keep[1]], 0]);
                out[(rr, cc)] += self.m[(r, c)];
            }
        }
        DensityMatrix::new(out)
    }

    /// Partial transpose on slot `slot` (0 = A or j, 1 = B or k, 2 = C).
    pub fn partial_transpose(&self, slot: usize) -> Result<DMatrix<Complex64>> {
        if slot >= self.slots() {
            return Err(Error::invalid(format!(
                "subsystem {slot} does not exist in a {}-dimensional matrix",
                self.dim()
            )));
        }
        Ok(partial_transpose_raw(&self.m, slot))
    }
}

fn partial_transpose_raw(m: &DMatrix<Complex64>, slot: usize) -> DMatrix<Complex64> {
    let dim = m.nrows();
    let b = basis(dim);
    let mut out = DMatrix::zeros(dim, dim);
    for r in 0..dim {
        for c in 0..dim {
            let (mut br, mut bc) = (b[r], b[c]);
            std::mem::swap(&mut br[slot], &mut bc[slot]);
            out[(index_of(dim, br), index_of(dim, bc))] = m[(r, c)];
        }
    }
    out
}

fn hermitian_eigenvalues(m: DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.iter().any(|z| !z.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let eig = SymmetricEigen::try_new(m, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Eigen("Hermitian eigensolver did not converge".into()))?;
    Ok(eig.eigenvalues.iter().copied().collect())
}

/// Sum of the magnitudes of the negative eigenvalues of a Hermitian matrix.
fn negative_part(m: DMatrix<Complex64>) -> Result<f64> {
    Ok(hermitian_eigenvalues(m)?
        .into_iter()
        .filter(|&e| e < -ZERO_THRESHOLD)
        .fold(0.0, |acc, e| acc - e))
}

/// Negativity of `rho` with respect to `slot`, checked against the halved
/// trace-norm identity.
pub fn negativity(rho: &DensityMatrix, slot: usize) -> Result<f64> {
    let pt = rho.partial_transpose(slot)?;
    let trace_norm: f64 = pt.clone().svd(false, false).singular_values.iter().sum();
    let n = negative_part(pt)?;
    let alt = 0.5 * (trace_norm - 1.0);
    if (n - alt).abs() > 1e-10 {
        return Err(Error::Eigen(format!(
            "negativity {n:e} disagrees with halved trace norm {alt:e}"
        )));
    }
    Ok(n)
}

/// Leading-order three-detector density matrix at coupling `lambda_tilde`.
pub fn assemble_rho3(cs: &CorrelatorSet, lambda_tilde: f64) -> Result<DensityMatrix> {
    check_coupling(lambda_tilde)?;
    if cs.detector_count() != 3 {
        return Err(Error::invalid("three-detector matrix needs three detectors"));
    }
    DensityMatrix::new(coefficient_rho3(cs, lambda_tilde * lambda_tilde))
}

/// Leading-order two-detector density matrix; `cs` must hold two detectors.
pub fn assemble_rho2(cs: &CorrelatorSet, lambda_tilde: f64) -> Result<DensityMatrix> {
    check_coupling(lambda_tilde)?;
    if cs.detector_count() != 2 {
        return Err(Error::invalid("two-detector matrix needs two detectors"));
    }
    DensityMatrix::new(coefficient_rho2(cs, lambda_tilde * lambda_tilde))
}

fn check_coupling(lambda_tilde: f64) -> Result<()> {
    if !(lambda_tilde > 0.0 && lambda_tilde <= MAX_COUPLING) {
        return Err(Error::invalid(format!(
            "coupling {lambda_tilde} outside the perturbative range (0, {MAX_COUPLING}]"
        )));
    }
    Ok(())
}

fn re(v: f64) -> Complex64 {
    Complex64::new(v, 0.0)
}

/// `ρ` with the vacuum entry `1 − s·ΣP` and all other entries scaled by `s`.
fn coefficient_rho3(cs: &CorrelatorSet, s: f64) -> DMatrix<Complex64> {
    use DetectorLabel::*;
    let mut m = DMatrix::zeros(8, 8);
    let p_sum = cs.p(A) + cs.p(B) + cs.p(C);
    m[(0, 0)] = re(1.0 - s * p_sum);
    m[(1, 1)] = re(s * cs.p(C));
    m[(2, 2)] = re(s * cs.p(B));
    m[(3, 3)] = re(s * cs.p(A));
    for (pair, row, col) in [(PairLabel::BC, 2, 1), (PairLabel::AC, 3, 1), (PairLabel::AB, 3, 2)] {
        m[(row, col)] = re(s * cs.c(pair));
        m[(col, row)] = re(s * cs.c(pair));
    }
    for (pair, row) in [(PairLabel::BC, 4), (PairLabel::AC, 5), (PairLabel::AB, 6)] {
        let x = cs.x(pair) * s;
        m[(row, 0)] = x;
        m[(0, row)] = x.conj();
    }
    m
}

fn coefficient_rho2(cs: &CorrelatorSet, s: f64) -> DMatrix<Complex64> {
    use DetectorLabel::*;
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = re(1.0 - s * (cs.p(A) + cs.p(B)));
    m[(1, 1)] = re(s * cs.p(B));
    m[(2, 2)] = re(s * cs.p(A));
    m[(2, 1)] = re(s * cs.c(PairLabel::AB));
    m[(1, 2)] = re(s * cs.c(PairLabel::AB));
    let x = cs.x(PairLabel::AB) * s;
    m[(3, 0)] = x;
    m[(0, 3)] = x.conj();
    m
}

/// How leading-order negativities are extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativityMode {
    /// Eigenvalues at two small couplings, Richardson-extrapolated in `λ̃²`.
    Eigen,
    /// Closed forms: general for pairs, equilateral for one-vs-rest.
    ClosedForm,
    /// Degenerate perturbation theory: eigenvalues of the `λ̃²` coefficient of
    /// the partial transpose restricted to the excited subspace.
    LeadingBlock,
}

impl std::str::FromStr for NegativityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "eigen" => Ok(NegativityMode::Eigen),
            "closed-form" => Ok(NegativityMode::ClosedForm),
            "leading-block" => Ok(NegativityMode::LeadingBlock),
            other => Err(Error::invalid(format!("unknown negativity mode '{other}'"))),
        }
    }
}

impl std::fmt::Display for NegativityMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NegativityMode::Eigen => "eigen",
            NegativityMode::ClosedForm => "closed-form",
            NegativityMode::LeadingBlock => "leading-block",
        })
    }
}

/// Extraction mode and the coupling used by [`NegativityMode::Eigen`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NegativitySettings {
    pub mode: NegativityMode,
    pub lambda_eval: f64,
}

impl Default for NegativitySettings {
    fn default() -> Self {
        Self {
            mode: NegativityMode::Eigen,
            lambda_eval: DEFAULT_COUPLING,
        }
    }
}

impl NegativitySettings {
    pub fn with_mode(mode: NegativityMode) -> Self {
        Self {
            mode,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_coupling(self.lambda_eval)?;
        check_coupling(self.lambda_eval * COMPANION_FACTOR)
    }
}

/// Bipartition whose negativity is wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bipartition {
    /// `N_{j(k)}`: two-detector state of `j`, `k`, transposed on `j`.
    Pair(DetectorLabel, DetectorLabel),
    /// `N_{j(rest)}`: three-detector state transposed on `j`.
    OneVsRest(DetectorLabel),
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match *self {
            Bipartition::Pair(j, k) => write!(f, "N_{j}({k})"),
            Bipartition::OneVsRest(j) => {
                let rest: String = DetectorLabel::ALL
                    .iter()
                    .filter(|&&d| d != j)
                    .map(|d| d.to_string())
                    .collect();
                write!(f, "N_{j}({rest})")
            }
        }
    }
}

/// Two-detector elements of `(j, k)` and the slot to transpose.
fn pair_view(cs: &CorrelatorSet, j: DetectorLabel, k: DetectorLabel) -> Result<(CorrelatorSet, usize)> {
    let pair = PairLabel::of(j, k).ok_or_else(|| Error::invalid("pair needs two distinct detectors"))?;
    if pair.detectors().1.index() >= cs.detector_count() {
        return Err(Error::invalid(format!("set has no pair {pair}")));
    }
    let slot = if j < k { 0 } else { 1 };
    Ok((cs.restrict(pair)?, slot))
}

/// Leading-order negativity per `λ̃²`.
pub fn negativity_perturbative(cs: &CorrelatorSet, target: Bipartition, mode: NegativityMode) -> Result<f64> {
    negativity_perturbative_with(cs, target, &NegativitySettings::with_mode(mode))
}

pub fn negativity_perturbative_with(
    cs: &CorrelatorSet,
    target: Bipartition,
    settings: &NegativitySettings,
) -> Result<f64> {
    settings.validate()?;
    match settings.mode {
        NegativityMode::Eigen => negativity_eigen(cs, target, settings.lambda_eval),
        NegativityMode::LeadingBlock => negativity_leading_block(cs, target),
        NegativityMode::ClosedForm => negativity_closed_form(cs, target),
    }
}

fn state_for(cs: &CorrelatorSet, target: Bipartition, lambda_tilde: f64) -> Result<(DensityMatrix, usize)> {
    match target {
        Bipartition::Pair(j, k) => {
            let (sub, slot) = pair_view(cs, j, k)?;
            Ok((assemble_rho2(&sub, lambda_tilde)?, slot))
        }
        Bipartition::OneVsRest(j) => Ok((assemble_rho3(cs, lambda_tilde)?, j.index())),
    }
}

fn negativity_eigen(cs: &CorrelatorSet, target: Bipartition, lambda_eval: f64) -> Result<f64> {
    let (l1, l2) = (lambda_eval, lambda_eval * COMPANION_FACTOR);
    let mut normalized = [0.0; 2];
    for (out, &l) in normalized.iter_mut().zip(&[l1, l2]) {
        let (rho, slot) = state_for(cs, target, l)?;
        *out = negativity(&rho, slot)? / (l * l);
    }
    let [n1, n2] = normalized;
    // Eigenvalues below the zero threshold are dropped, which limits how well
    // the two values can agree when they are small.
    let floor = 16.0 * ZERO_THRESHOLD / (l1 * l1);
    if (n1 - n2).abs() > COUPLING_SENSITIVITY * n1.abs().max(n2.abs()) + floor {
        return Err(Error::CouplingSensitivity {
            subsystem: target.to_string(),
            first: n1,
            second: n2,
        });
    }
    let r = (l2 / l1).powi(2);
    Ok(((r * n1 - n2) / (r - 1.0)).max(0.0))
}

fn negativity_leading_block(cs: &CorrelatorSet, target: Bipartition) -> Result<f64> {
    let (coefficient, slot) = match target {
        Bipartition::Pair(j, k) => {
            let (sub, slot) = pair_view(cs, j, k)?;
            (coefficient_rho2(&sub, 1.0), slot)
        }
        Bipartition::OneVsRest(j) => {
            if cs.detector_count() != 3 {
                return Err(Error::invalid("one-vs-rest negativity needs three detectors"));
            }
            (coefficient_rho3(cs, 1.0), j.index())
        }
    };
    // The vacuum entry is 1 − ΣP; the excited block only sees the λ̃² terms.
    let pt = partial_transpose_raw(&coefficient, slot);
    let dim = pt.nrows();
    let block = pt.view((1, 1), (dim - 1, dim - 1)).into_owned();
    negative_part(block)
}

/// `max{0, √((P_j − P_k)²/4 + |X|²) − (P_j + P_k)/2}`.
pub fn bipartite_closed_form(p_j: f64, p_k: f64, x: Complex64) -> f64 {
    let half_gap = 0.5 * (p_j - p_k);
    ((half_gap * half_gap + x.norm_sqr()).sqrt() - 0.5 * (p_j + p_k)).max(0.0)
}

/// Equilateral `N_{j(rest)} = max{0, √(C² + 8|X|²)/2 − C/2 − P}`.
///
/// Valid for `|C| ≤ P`, which positivity of the state guarantees; otherwise
/// the partial transpose has a second negative eigenvalue `P − C`.
pub fn one_vs_rest_equilateral(p: f64, c: f64, x: Complex64) -> f64 {
    (0.5 * (c * c + 8.0 * x.norm_sqr()).sqrt() - 0.5 * c - p).max(0.0)
}

/// Equilateral `N_{j(k)} = max{0, |X| − P}`.
pub fn pair_equilateral(p: f64, x: Complex64) -> f64 {
    (x.norm() - p).max(0.0)
}

/// Equilateral `π = N_{A(BC)}² − 2 N_{A(B)}²`.
pub fn pi_equilateral(p: f64, c: f64, x: Complex64) -> f64 {
    one_vs_rest_equilateral(p, c, x).powi(2) - 2.0 * pair_equilateral(p, x).powi(2)
}

/// Common `(P, C, X)` if the set is equilateral to `1e-9` relative.
pub fn equilateral_elements(cs: &CorrelatorSet) -> Option<(f64, f64, Complex64)> {
    if cs.detector_count() != 3 {
        return None;
    }
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-9 * a.abs().max(b.abs());
    let p = cs.p(DetectorLabel::A);
    let c = cs.c(PairLabel::AB);
    let x = cs.x(PairLabel::AB);
    let same = DetectorLabel::ALL.iter().all(|&d| close(cs.p(d), p))
        && PairLabel::ALL
            .iter()
            .all(|&q| close(cs.c(q), c) && (cs.x(q) - x).norm() <= 1e-9 * x.norm());
    same.then_some((p, c, x))
}

fn negativity_closed_form(cs: &CorrelatorSet, target: Bipartition) -> Result<f64> {
    match target {
        Bipartition::Pair(j, k) => {
            let (sub, _) = pair_view(cs, j, k)?;
            Ok(bipartite_closed_form(
                sub.p(DetectorLabel::A),
                sub.p(DetectorLabel::B),
                sub.x(PairLabel::AB),
            ))
        }
        Bipartition::OneVsRest(_) => {
            let (p, c, x) = equilateral_elements(cs).ok_or_else(|| {
                Error::invalid("one-vs-rest closed form applies to equilateral configurations only")
            })?;
            Ok(one_vs_rest_equilateral(p, c, x))
        }
    }
}

/// Ordered pairs `(j, k)` of `N_{j(k)}` in report order.
pub const ORDERED_PAIRS: [(DetectorLabel, DetectorLabel); 6] = [
    (DetectorLabel::A, DetectorLabel::B),
    (DetectorLabel::B, DetectorLabel::A),
    (DetectorLabel::A, DetectorLabel::C),
    (DetectorLabel::C, DetectorLabel::A),
    (DetectorLabel::B, DetectorLabel::C),
    (DetectorLabel::C, DetectorLabel::B),
];

/// Negativities per `λ̃²` and π-tangles per `λ̃⁴` of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntanglementReport {
    /// `N_{j(k)}` in [`ORDERED_PAIRS`] order.
    pub bipartite: [f64; 6],
    /// `N_{A(BC)}, N_{B(AC)}, N_{C(AB)}`.
    pub one_vs_rest: [f64; 3],
    pub pi_components: [f64; 3],
    pub pi: f64,
    pub method: NegativityMode,
}

impl EntanglementReport {
    pub fn pair(&self, j: DetectorLabel, k: DetectorLabel) -> f64 {
        let i = ORDERED_PAIRS
            .iter()
            .position(|&p| p == (j, k))
            .expect("pair of distinct detectors");
        self.bipartite[i]
    }

    pub fn rest(&self, j: DetectorLabel) -> f64 {
        self.one_vs_rest[j.index()]
    }

    pub fn pi_of(&self, j: DetectorLabel) -> f64 {
        self.pi_components[j.index()]
    }

    /// Largest bipartite negativity.
    pub fn max_bipartite(&self) -> f64 {
        self.bipartite.iter().copied().fold(0.0, f64::max)
    }

    fn assemble(bipartite: [f64; 6], one_vs_rest: [f64; 3], method: NegativityMode) -> Self {
        let pair_at = |j: DetectorLabel, k: DetectorLabel| {
            bipartite[ORDERED_PAIRS.iter().position(|&p| p == (j, k)).expect("pair")]
        };
        let mut pi_components = [0.0; 3];
        for j in DetectorLabel::ALL {
            let others: Vec<DetectorLabel> = DetectorLabel::ALL.into_iter().filter(|&d| d != j).collect();
            pi_components[j.index()] = one_vs_rest[j.index()].powi(2)
                - pair_at(j, others[0]).powi(2)
                - pair_at(j, others[1]).powi(2);
        }
        let pi = pi_components.iter().sum::<f64>() / 3.0;
        Self {
            bipartite,
            one_vs_rest,
            pi_components,
            pi,
            method,
        }
    }

    /// Report of an explicit three-detector state (no perturbative scaling).
    pub fn from_density_matrix(rho: &DensityMatrix) -> Result<Self> {
        if rho.dim() != 8 {
            return Err(Error::invalid("report needs a three-detector matrix"));
        }
        let mut bipartite = [0.0; 6];
        for (i, &(j, k)) in ORDERED_PAIRS.iter().enumerate() {
            let drop = PairLabel::of(j, k).expect("distinct").complement();
            let slot = if j < k { 0 } else { 1 };
            bipartite[i] = negativity(&rho.reduce(drop)?, slot)?;
        }
        let mut one_vs_rest = [0.0; 3];
        for j in DetectorLabel::ALL {
            one_vs_rest[j.index()] = negativity(rho, j.index())?;
        }
        Ok(Self::assemble(bipartite, one_vs_rest, NegativityMode::Eigen))
    }
}

/// All nine leading-order negativities and the π-tangle.
pub fn pi_tangle(cs: &CorrelatorSet, mode: NegativityMode) -> Result<EntanglementReport> {
    pi_tangle_with(cs, &NegativitySettings::with_mode(mode))
}

pub fn pi_tangle_with(cs: &CorrelatorSet, settings: &NegativitySettings) -> Result<EntanglementReport> {
    let mode = settings.mode;
    if cs.detector_count() != 3 {
        return Err(Error::invalid("the π-tangle needs three detectors"));
    }
    let mut bipartite = [0.0; 6];
    for (i, &(j, k)) in ORDERED_PAIRS.iter().enumerate() {
        bipartite[i] = negativity_perturbative_with(cs, Bipartition::Pair(j, k), settings)?;
    }
    for pair in ORDERED_PAIRS.chunks(2) {
        let (a, b) = (
            bipartite[ORDERED_PAIRS.iter().position(|p| *p == pair[0]).expect("pair")],
            bipartite[ORDERED_PAIRS.iter().position(|p| *p == pair[1]).expect("pair")],
        );
        if (a - b).abs() > 1e-6 * a.max(b) + 1e-12 {
            return Err(Error::Eigen(format!(
                "N_{}({}) = {a:e} and N_{}({}) = {b:e} differ at leading order",
                pair[0].0, pair[0].1, pair[1].0, pair[1].1
            )));
        }
    }
    let mut one_vs_rest = [0.0; 3];
    for j in DetectorLabel::ALL {
        one_vs_rest[j.index()] = negativity_perturbative_with(cs, Bipartition::OneVsRest(j), settings)?;
    }
    let report = EntanglementReport::assemble(bipartite, one_vs_rest, mode);
    if let Some((p, c, x)) = equilateral_elements(cs) {
        let closed = pi_equilateral(p, c, x);
        let scale = report.one_vs_rest.iter().fold(x.norm_sqr(), |m, v| m.max(v * v));
        if (report.pi - closed).abs() > 1e-6 * scale + 1e-14 {
            return Err(Error::Eigen(format!(
                "π = {:e} disagrees with the equilateral closed form {closed:e}",
                report.pi
            )));
        }
    }
    Ok(report)
}

/// Whether `N²_{j(k)} + N²_{j(l)} ≤ N²_{j(rest)}` holds for each detector.
pub fn ckw_check(report: &EntanglementReport) -> [bool; 3] {
    let mut out = [false; 3];
    for j in DetectorLabel::ALL {
        let rest = report.rest(j).powi(2);
        out[j.index()] = report.pi_of(j) >= -1e-12 * rest.max(f64::MIN_POSITIVE);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_set() -> CorrelatorSet {
        CorrelatorSet::from_elements(
            vec![0.12, 0.05, 0.03],
            vec![0.02, -0.01, 0.015],
            vec![c(-0.16, 0.03), c(0.04, -0.02), c(-0.09, 0.01)],
        )
        .unwrap()
    }

    fn ghz() -> DensityMatrix {
        let mut psi = vec![c(0.0, 0.0); 8];
        psi[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[7] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        DensityMatrix::pure(&psi).unwrap()
    }

    fn bell() -> DensityMatrix {
        let mut psi = vec![c(0.0, 0.0); 4];
        psi[0] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        psi[3] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        DensityMatrix::pure(&psi).unwrap()
    }

    #[test]
    fn vacuum_assembly() {
        let zero = CorrelatorSet::equilateral(0.0, 0.0, c(0.0, 0.0)).unwrap();
        let rho = assemble_rho3(&zero, 0.05).unwrap();
        let mut expect = DMatrix::zeros(8, 8);
        expect[(0, 0)] = c(1.0, 0.0);
        assert_eq!(rho.matrix(), &expect);
        let reduced = rho.reduce(DetectorLabel::B).unwrap();
        assert_eq!(reduced.entry(0, 0), c(1.0, 0.0));
        assert_eq!(reduced.matrix().iter().filter(|z| z.norm() > 0.0).count(), 1);
    }

    #[test]
    fn placement_follows_basis() {
        let cs = sample_set();
        let l = 0.01;
        let rho = assemble_rho3(&cs, l).unwrap();
        let s = l * l;
        assert_eq!(rho.entry(4, 0), cs.x(PairLabel::BC) * s);
        assert_eq!(rho.entry(0, 4), (cs.x(PairLabel::BC) * s).conj());
        assert_eq!(rho.entry(5, 0), cs.x(PairLabel::AC) * s);
        assert_eq!(rho.entry(6, 0), cs.x(PairLabel::AB) * s);
        assert_eq!(rho.entry(2, 1), c(cs.c(PairLabel::BC) * s, 0.0));
        assert_eq!(rho.entry(3, 1), c(cs.c(PairLabel::AC) * s, 0.0));
        assert_eq!(rho.entry(3, 2), c(cs.c(PairLabel::AB) * s, 0.0));
        assert_eq!(rho.entry(3, 3), c(cs.p(DetectorLabel::A) * s, 0.0));
        assert_eq!(rho.entry(1, 1), c(cs.p(DetectorLabel::C) * s, 0.0));
        for r in 0..8 {
            assert_eq!(rho.entry(r, 7), c(0.0, 0.0));
            assert_eq!(rho.entry(7, r), c(0.0, 0.0));
        }
        assert_eq!(rho.entry(4, 5), c(0.0, 0.0));
        assert!(assemble_rho3(&cs, 0.2).is_err());
        assert!(assemble_rho3(&cs, 0.0).is_err());
    }

    #[test]
    fn reduction_matches_pair_matrix() {
        let cs = sample_set();
        let l = 0.02;
        let rho = assemble_rho3(&cs, l).unwrap();
        for pair in PairLabel::ALL {
            let reduced = rho.reduce(pair.complement()).unwrap();
            let direct = assemble_rho2(&cs.restrict(pair).unwrap(), l).unwrap();
            let diff = (reduced.matrix() - direct.matrix()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            assert!(diff < 1e-15, "{pair}: {diff}");
        }
        let ab = rho.reduce(DetectorLabel::C).unwrap();
        assert_eq!(ab.entry(3, 0), cs.x(PairLabel::AB) * (l * l));
        assert_eq!(ab.entry(2, 1), c(cs.c(PairLabel::AB) * l * l, 0.0));
    }

    #[test]
    fn bell_and_ghz_values() {
        let pt = bell().partial_transpose(0).unwrap();
        let mut eig = hermitian_eigenvalues(pt).unwrap();
        eig.sort_by(f64::total_cmp);
        for (e, x) in eig.iter().zip([-0.5, 0.5, 0.5, 0.5]) {
            assert!((e - x).abs() < 1e-14);
        }
        assert!((negativity(&bell(), 0).unwrap() - 0.5).abs() < 1e-14);
        assert!((negativity(&bell(), 1).unwrap() - 0.5).abs() < 1e-14);

        let g = ghz();
        for slot in 0..3 {
            assert!((negativity(&g, slot).unwrap() - 0.5).abs() < 1e-14);
        }
        let report = EntanglementReport::from_density_matrix(&g).unwrap();
        assert!(report.bipartite.iter().all(|&n| n.abs() < 1e-14));
        for j in DetectorLabel::ALL {
            assert!((report.pi_of(j) - 0.25).abs() < 1e-14);
        }
        assert!((report.pi - 0.25).abs() < 1e-14);
        assert_eq!(ckw_check(&report), [true; 3]);
    }

    #[test]
    fn partial_transpose_fixes_diagonals_and_is_involutive() {
        let rho = assemble_rho3(&sample_set(), 0.05).unwrap();
        for slot in 0..3 {
            let once = rho.partial_transpose(slot).unwrap();
            let twice = partial_transpose_raw(&once, slot);
            assert_eq!(&twice, rho.matrix());
            assert_eq!(once.trace(), rho.matrix().trace());
            for i in 0..8 {
                assert_eq!(once[(i, i)], rho.entry(i, i));
            }
        }
        assert!(rho.partial_transpose(3).is_err());
        let diag = DensityMatrix::new(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(0.4, 0.0),
            c(0.3, 0.0),
            c(0.2, 0.0),
            c(0.1, 0.0),
        ])))
        .unwrap();
        assert_eq!(&diag.partial_transpose(0).unwrap(), diag.matrix());
        assert_eq!(negativity(&diag, 1).unwrap(), 0.0);
    }

    #[test]
    fn rejects_non_hermitian_and_bad_trace() {
        let mut m = DMatrix::from_element(4, 4, c(0.0, 0.0));
        m[(0, 0)] = c(1.0, 0.0);
        m[(1, 0)] = c(0.1, 0.0);
        assert!(DensityMatrix::new(m.clone()).is_err());
        m[(1, 0)] = c(0.0, 0.0);
        m[(0, 0)] = c(0.9, 0.0);
        assert!(DensityMatrix::new(m).is_err());
        assert!(DensityMatrix::new(DMatrix::identity(3, 3)).is_err());
    }

    #[test]
    fn equilateral_closed_form_examples() {
        let x = c(0.3, 0.4);
        assert!((one_vs_rest_equilateral(0.0, 0.0, x) - 2f64.sqrt() * 0.5).abs() < 1e-15);
        assert!((pair_equilateral(0.0, x) - 0.5).abs() < 1e-15);
        assert!(pi_equilateral(0.0, 0.0, x).abs() < 1e-15);
        assert_eq!(pair_equilateral(0.6, x), 0.0);
        assert_eq!(bipartite_closed_form(0.6, 0.6, x), 0.0);
    }

    #[test]
    fn modes_agree_on_equilateral_inputs() {
        for &(p, cc, x) in &[
            (0.1, 0.05, c(-0.12, 0.04)),
            (0.1, -0.05, c(-0.12, 0.04)),
            (0.05, 0.04, c(0.03, 0.02)),
            (0.05, 0.05, c(0.01, 0.0)),
            (0.02, 0.0, c(0.1, 0.0)),
        ] {
            let cs = CorrelatorSet::equilateral(p, cc, x).unwrap();
            let eig = pi_tangle(&cs, NegativityMode::Eigen).unwrap();
            let block = pi_tangle(&cs, NegativityMode::LeadingBlock).unwrap();
            let closed = pi_tangle(&cs, NegativityMode::ClosedForm).unwrap();
            for other in [&block, &closed] {
                for i in 0..3 {
                    let (a, b) = (eig.one_vs_rest[i], other.one_vs_rest[i]);
                    assert!((a - b).abs() <= 1e-6 * a.max(b) + 1e-12, "{a} {b}");
                }
                for i in 0..6 {
                    let (a, b) = (eig.bipartite[i], other.bipartite[i]);
                    assert!((a - b).abs() <= 1e-6 * a.max(b) + 1e-12, "{a} {b}");
                }
            }
            assert!((closed.pi - pi_equilateral(p, cc, x)).abs() < 1e-15);
        }
    }

    #[test]
    fn general_bipartite_closed_form_matches_eigen() {
        let cs = sample_set();
        for (j, k) in ORDERED_PAIRS {
            let e = negativity_perturbative(&cs, Bipartition::Pair(j, k), NegativityMode::Eigen).unwrap();
            let f = negativity_perturbative(&cs, Bipartition::Pair(j, k), NegativityMode::ClosedForm).unwrap();
            let b = negativity_perturbative(&cs, Bipartition::Pair(j, k), NegativityMode::LeadingBlock).unwrap();
            assert!((e - f).abs() <= 1e-6 * e.max(f) + 1e-12, "{j}{k}: {e} {f}");
            assert!((b - f).abs() <= 1e-12, "{j}{k}: {b} {f}");
        }
        assert!(negativity_perturbative(&cs, Bipartition::OneVsRest(DetectorLabel::A), NegativityMode::ClosedForm).is_err());
    }

    #[test]
    fn zero_correlators_give_zero_report() {
        let cs = CorrelatorSet::equilateral(0.0, 0.0, c(0.0, 0.0)).unwrap();
        for mode in [NegativityMode::Eigen, NegativityMode::ClosedForm, NegativityMode::LeadingBlock] {
            let r = pi_tangle(&cs, mode).unwrap();
            assert_eq!(r.pi, 0.0);
            assert!(r.bipartite.iter().chain(&r.one_vs_rest).all(|&n| n == 0.0));
            assert_eq!(ckw_check(&r), [true; 3]);
        }
    }

    #[test]
    fn ckw_fails_for_negative_component() {
        let r = EntanglementReport::assemble([0.3, 0.3, 0.0, 0.0, 0.0, 0.0], [0.1, 0.3, 0.0], NegativityMode::Eigen);
        assert!(r.pi_of(DetectorLabel::A) < 0.0);
        assert_eq!(ckw_check(&r), [false, true, true]);
    }

    #[test]
    fn coupling_choice_does_not_change_leading_order() {
        let cs = sample_set();
        let base = pi_tangle(&cs, NegativityMode::Eigen).unwrap();
        let other = NegativitySettings {
            mode: NegativityMode::Eigen,
            lambda_eval: 3e-3,
        };
        let r = pi_tangle_with(&cs, &other).unwrap();
        for i in 0..3 {
            let (a, b) = (base.one_vs_rest[i], r.one_vs_rest[i]);
            assert!((a - b).abs() <= 1e-5 * a.max(b) + 1e-9, "{a} {b}");
        }
        let too_big = NegativitySettings {
            mode: NegativityMode::Eigen,
            lambda_eval: 0.07,
        };
        assert!(pi_tangle_with(&cs, &too_big).is_err());
    }

    #[test]
    fn mode_names_round_trip() {
        for mode in [NegativityMode::Eigen, NegativityMode::ClosedForm, NegativityMode::LeadingBlock] {
            assert_eq!(mode.to_string().parse::<NegativityMode>().unwrap(), mode);
        }
        assert!("svd".parse::<NegativityMode>().is_err());
    }

    fn arb_set() -> impl Strategy<Value = CorrelatorSet> {
        (
            prop::array::uniform3(0.0f64..0.2),
            prop::array::uniform3(-0.1f64..0.1),
            prop::array::uniform3((-0.2f64..0.2, -0.2f64..0.2)),
        )
            .prop_map(|(p, cc, x)| {
                CorrelatorSet::from_elements(
                    p.to_vec(),
                    cc.to_vec(),
                    x.iter().map(|&(a, b)| c(a, b)).collect(),
                )
                .unwrap()
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn assembled_matrix_is_a_valid_state_shape(cs in arb_set(), l in 1e-4f64..0.1) {
            let rho = assemble_rho3(&cs, l).unwrap();
            let m = rho.matrix();
            prop_assert!((m - m.adjoint()).iter().all(|z| z.norm() < 1e-15));
            prop_assert!((m.trace() - c(1.0, 0.0)).norm() < 1e-14);
        }

        #[test]
        fn negativity_identity_holds(cs in arb_set()) {
            let rho = assemble_rho3(&cs, 0.05).unwrap();
            for slot in 0..3 {
                prop_assert!(negativity(&rho, slot).is_ok());
            }
        }

        #[test]
        fn eigen_matches_leading_block(cs in arb_set()) {
            for j in DetectorLabel::ALL {
                let e = negativity_perturbative(&cs, Bipartition::OneVsRest(j), NegativityMode::Eigen).unwrap();
                let b = negativity_perturbative(&cs, Bipartition::OneVsRest(j), NegativityMode::LeadingBlock).unwrap();
                prop_assert!((e - b).abs() <= 1e-6 * e.max(b) + 1e-9, "{} {}", e, b);
            }
        }

        #[test]
        fn relabeling_permutes_report(cs in arb_set()) {
            // Swap detectors A and B.
            use DetectorLabel::*;
            let swapped = CorrelatorSet::from_elements(
                vec![cs.p(B), cs.p(A), cs.p(C)],
                vec![cs.c(PairLabel::AB), cs.c(PairLabel::BC), cs.c(PairLabel::AC)],
                vec![cs.x(PairLabel::AB), cs.x(PairLabel::BC), cs.x(PairLabel::AC)],
            ).unwrap();
            let r1 = pi_tangle(&cs, NegativityMode::LeadingBlock).unwrap();
            let r2 = pi_tangle(&swapped, NegativityMode::LeadingBlock).unwrap();
            prop_assert!((r1.pi - r2.pi).abs() <= 1e-12);
            prop_assert!((r1.rest(A) - r2.rest(B)).abs() <= 1e-12);
            prop_assert!((r1.rest(C) - r2.rest(C)).abs() <= 1e-12);
            prop_assert!((r1.pair(A, C) - r2.pair(B, C)).abs() <= 1e-12);
        }
    }
}
