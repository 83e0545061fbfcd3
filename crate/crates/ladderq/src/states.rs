//! States of a composite channel and their reductions.
//!
//! A state is held either as a spectrum over coupled labels (the source
//! model: the channel is prepared in coupled eigenstates |j,m⟩ with
//! probabilities p_{j,m}) or as a full density matrix over the product basis.
//! Reductions of coupled-diagonal states follow the squared Clebsch–Gordan
//! rule; the partial trace is implemented independently by index contraction
//! so the two paths can check each other.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::coupling::{coupled_basis, coupled_labels, CoupledBasis};
use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::matrix::ComplexMatrix;

/// Tolerance below which a negative probability is treated as noise.
const NEG_CLIP: f64 = 1e-10;
/// Tolerance on normalization of input spectra and traces.
const NORM_TOL: f64 = 1e-10;

/// A coupled label (j, m).
pub type Label = (HalfInteger, HalfInteger);

#[derive(Clone, Debug)]
enum Storage {
    /// Diagonal in the coupled basis: label → probability.
    Spectral(BTreeMap<Label, f64>),
    /// General density matrix over the product basis (A-major).
    Matrix(ComplexMatrix),
}

/// A state of the composite channel with subchannel ranks (s, l).
#[derive(Clone, Debug)]
pub struct ChannelState {
    s: HalfInteger,
    l: HalfInteger,
    storage: Storage,
}

fn validate_probabilities<K: Ord + Clone + std::fmt::Debug>(
    p: &BTreeMap<K, f64>,
) -> Result<BTreeMap<K, f64>> {
    let mut clean = BTreeMap::new();
    let mut sum = 0.0;
    for (k, &v) in p {
        if v < -NEG_CLIP {
            return Err(Error::InvalidProbability { label: format!("{k:?}"), value: v });
        }
        let v = v.max(0.0);
        sum += v;
        clean.insert(k.clone(), v);
    }
    if (sum - 1.0).abs() > NORM_TOL {
        return Err(Error::NotNormalized(sum));
    }
    for v in clean.values_mut() {
        *v /= sum;
    }
    Ok(clean)
}

/// Build a coupled-diagonal state from its spectrum.
///
/// Labels must be valid for (s, l); probabilities may carry float noise down
/// to −1e−10 (clipped) and must sum to 1 within 1e−10 (renormalized).
pub fn coupled_diagonal_state(
    s: HalfInteger,
    l: HalfInteger,
    p: BTreeMap<Label, f64>,
) -> Result<ChannelState> {
    let valid = coupled_labels(s, l);
    for label in p.keys() {
        if !valid.contains(label) {
            return Err(Error::UnknownLabel {
                s: s.to_string(),
                l: l.to_string(),
                j: label.0.to_string(),
                m: label.1.to_string(),
            });
        }
    }
    let clean = validate_probabilities(&p)?;
    Ok(ChannelState { s, l, storage: Storage::Spectral(clean) })
}

/// The pure coupled state |j,m⟩⟨j,m|.
pub fn pure_coupled_state(
    s: HalfInteger,
    l: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Result<ChannelState> {
    coupled_diagonal_state(s, l, BTreeMap::from([((j, m), 1.0)]))
}

/// The maximally mixed state of the (s, l) channel.
pub fn maximally_mixed(s: HalfInteger, l: HalfInteger) -> ChannelState {
    let labels = coupled_labels(s, l);
    let w = 1.0 / labels.len() as f64;
    let p = labels.into_iter().map(|lab| (lab, w)).collect();
    ChannelState { s, l, storage: Storage::Spectral(p) }
}

/// Wrap a density matrix over the product basis of the (s, l) channel.
///
/// Checks hermiticity, positivity (eigenvalues ≥ −1e−10) and unit trace.
pub fn matrix_state(s: HalfInteger, l: HalfInteger, rho: ComplexMatrix) -> Result<ChannelState> {
    let dim = s.dim() * l.dim();
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::ShapeMismatch {
            expected: format!("{dim}x{dim}"),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    if !rho.is_hermitian(1e-12) {
        return Err(Error::InvalidDensity("not Hermitian within 1e-12".into()));
    }
    let eigs = rho.hermitian_eigenvalues();
    if let Some(min) = eigs.first() {
        if *min < -NEG_CLIP {
            return Err(Error::InvalidDensity(format!("negative eigenvalue {min}")));
        }
    }
    let trace = rho.trace().re;
    if (trace - 1.0).abs() > NORM_TOL {
        return Err(Error::InvalidDensity(format!("trace {trace}")));
    }
    Ok(ChannelState { s, l, storage: Storage::Matrix(rho.scale(1.0 / trace)) })
}

impl ChannelState {
    pub fn s(&self) -> HalfInteger {
        self.s
    }

    pub fn l(&self) -> HalfInteger {
        self.l
    }

    pub fn dim_a(&self) -> usize {
        self.s.dim()
    }

    pub fn dim_b(&self) -> usize {
        self.l.dim()
    }

    pub fn dim(&self) -> usize {
        self.dim_a() * self.dim_b()
    }

    /// Whether the state is stored as a coupled-basis spectrum.
    pub fn is_coupled_diagonal(&self) -> bool {
        matches!(self.storage, Storage::Spectral(_))
    }

    /// The coupled basis of this channel's ranks.
    pub fn basis(&self) -> CoupledBasis {
        coupled_basis(self.s, self.l)
    }

    /// The spectrum over coupled labels.
    ///
    /// Errors for matrix-form states; use [`project_spectrum`](Self::project_spectrum)
    /// to read the coupled-diagonal part of a general state.
    pub fn spectrum(&self) -> Result<&BTreeMap<Label, f64>> {
        match &self.storage {
            Storage::Spectral(p) => Ok(p),
            Storage::Matrix(_) => Err(Error::NotSpectral),
        }
    }

    /// p_{j,m}, zero for labels outside the support.
    pub fn probability(&self, j: HalfInteger, m: HalfInteger) -> f64 {
        match &self.storage {
            Storage::Spectral(p) => p.get(&(j, m)).copied().unwrap_or(0.0),
            Storage::Matrix(_) => 0.0,
        }
    }

    /// The density matrix over the product basis (A-major), U·diag(p)·U† for
    /// spectral states.
    pub fn to_matrix(&self) -> ComplexMatrix {
        match &self.storage {
            Storage::Matrix(rho) => rho.clone(),
            Storage::Spectral(p) => {
                let basis = self.basis();
                let mut diag = vec![0.0; basis.dim];
                for (idx, label) in basis.labels.iter().enumerate() {
                    diag[idx] = p.get(label).copied().unwrap_or(0.0);
                }
                let d = ComplexMatrix::from_real_diagonal(&diag);
                basis.unitary.mul(&d).mul(&basis.unitary.adjoint())
            }
        }
    }

    /// Diagonal of the state in the coupled basis: ⟨j,m|ρ|j,m⟩ per label.
    ///
    /// For spectral states this returns the stored spectrum; for matrix
    /// states it projects away any coupled-basis off-diagonal part, and the
    /// second value reports the largest discarded magnitude.
    pub fn project_spectrum(&self) -> (BTreeMap<Label, f64>, f64) {
        match &self.storage {
            Storage::Spectral(p) => (p.clone(), 0.0),
            Storage::Matrix(rho) => {
                let basis = self.basis();
                let coupled = basis.unitary.adjoint().mul(rho).mul(&basis.unitary);
                let mut p = BTreeMap::new();
                let mut offdiag: f64 = 0.0;
                for (idx, &label) in basis.labels.iter().enumerate() {
                    p.insert(label, coupled.get(idx, idx).re.max(0.0));
                    for col in 0..basis.dim {
                        if col != idx {
                            offdiag = offdiag.max(coupled.get(idx, col).norm());
                        }
                    }
                }
                (p, offdiag)
            }
        }
    }

    /// Eigenvalues of the state, descending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eigs: Vec<f64> = match &self.storage {
            Storage::Spectral(p) => coupled_labels(self.s, self.l)
                .iter()
                .map(|lab| p.get(lab).copied().unwrap_or(0.0))
                .collect(),
            Storage::Matrix(rho) => rho.hermitian_eigenvalues(),
        };
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        eigs
    }
}

/// A reduced (subchannel) state.
#[derive(Clone, Debug, Serialize)]
pub struct ReducedState {
    pub dim: usize,
    pub rho: ComplexMatrix,
    /// Eigenvalues, descending.
    pub eigs: Vec<f64>,
}

impl ReducedState {
    fn from_matrix(rho: ComplexMatrix) -> Self {
        let mut eigs = rho.hermitian_eigenvalues();
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Self { dim: rho.rows(), rho, eigs }
    }

    fn from_diagonal(diag: Vec<f64>) -> Self {
        let rho = ComplexMatrix::from_real_diagonal(&diag);
        let mut eigs = diag;
        eigs.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Self { dim: eigs.len(), rho, eigs }
    }
}

/// Partial trace over subchannel B: the reduced matrix of A.
///
/// Direct index contraction, deliberately independent of the
/// Clebsch–Gordan machinery so it can act as its oracle.
pub fn partial_trace_over_b(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim_a, dim_a);
    for i in 0..dim_a {
        for ip in 0..dim_a {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..dim_b {
                acc += rho.get(i * dim_b + k, ip * dim_b + k);
            }
            out.set(i, ip, acc);
        }
    }
    out
}

/// Partial trace over subchannel A: the reduced matrix of B.
pub fn partial_trace_over_a(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(dim_b, dim_b);
    for k in 0..dim_b {
        for kp in 0..dim_b {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..dim_a {
                acc += rho.get(i * dim_b + k, i * dim_b + kp);
            }
            out.set(k, kp, acc);
        }
    }
    out
}

/// Reduced state of subchannel A.
///
/// Spectral states use the squared-coefficient rule
/// p^A(m_s) = Σ_{j,m} p_{j,m} C²_{j,m;m_s} (the reduction is diagonal in the
/// A basis); matrix states go through the partial trace.
pub fn reduce_a(state: &ChannelState) -> ReducedState {
    match &state.storage {
        Storage::Spectral(p) => {
            let basis = state.basis();
            let mut diag = vec![0.0; state.dim_a()];
            for (&(j, m), &w) in p {
                for (m_s, c) in basis.column(j, m) {
                    let ka = ((m_s + state.s).twice() / 2) as usize;
                    diag[ka] += w * c * c;
                }
            }
            ReducedState::from_diagonal(diag)
        }
        Storage::Matrix(rho) => {
            ReducedState::from_matrix(partial_trace_over_b(rho, state.dim_a(), state.dim_b()))
        }
    }
}

/// Reduced state of subchannel B, p^B(m_l) = Σ_{j,m} p_{j,m} C²_{j,m;m−m_l}.
pub fn reduce_b(state: &ChannelState) -> ReducedState {
    match &state.storage {
        Storage::Spectral(p) => {
            let basis = state.basis();
            let mut diag = vec![0.0; state.dim_b()];
            for (&(j, m), &w) in p {
                for (m_s, c) in basis.column(j, m) {
                    let kb = ((m - m_s + state.l).twice() / 2) as usize;
                    diag[kb] += w * c * c;
                }
            }
            ReducedState::from_diagonal(diag)
        }
        Storage::Matrix(rho) => {
            ReducedState::from_matrix(partial_trace_over_a(rho, state.dim_a(), state.dim_b()))
        }
    }
}

/// Common reduction spectrum of the pure coupled state |j,m⟩: the squared
/// coefficients C²_{j,m;n} over the smaller subchannel's basis. Both
/// reductions of a pure state share these nonzero eigenvalues.
pub fn pure_state_reduction(
    s: HalfInteger,
    l: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Result<ReducedState> {
    let state = pure_coupled_state(s, l, j, m)?;
    Ok(reduce_a(&state))
}

/// Joint probability of measuring subchannel A at m_a and B at m_b,
/// Tr(ρ · P^A_{m_a} ⊗ P^B_{m_b}), evaluated directly on the product-basis
/// matrix element.
pub fn joint_probability(state: &ChannelState, m_a: HalfInteger, m_b: HalfInteger) -> Result<f64> {
    if m_a.abs() > state.s || (m_a + state.s).twice() % 2 != 0 {
        return Err(Error::Parse(format!("m_a = {m_a} invalid for s = {}", state.s)));
    }
    if m_b.abs() > state.l || (m_b + state.l).twice() % 2 != 0 {
        return Err(Error::Parse(format!("m_b = {m_b} invalid for l = {}", state.l)));
    }
    let rho = state.to_matrix();
    let ka = ((m_a + state.s).twice() / 2) as usize;
    let kb = ((m_b + state.l).twice() / 2) as usize;
    Ok(rho.get(ka * state.dim_b() + kb, ka * state.dim_b() + kb).re)
}

/// Conditional probability P(k | n) of finding subchannel A at k given that
/// B was measured at n, for the pure coupled state |j,m⟩: outcomes are
/// completely correlated, so this is δ_{m−n,k}.
///
/// Conditioning on an outcome n with zero probability is an error.
pub fn conditional_probability(
    s: HalfInteger,
    l: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
    k: HalfInteger,
    n: HalfInteger,
) -> Result<f64> {
    let c = crate::coupling::clebsch_gordan(s, l, j, m, m - n);
    if c == 0.0 {
        return Err(Error::UndefinedConditional { outcome: n.to_string() });
    }
    Ok(if k == m - n { 1.0 } else { 0.0 })
}

/// The mixing parameters of the two-qubit family: d splits entangled from
/// product content, r biases the product pair, q biases singlet vs triplet.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct TwoQubitParams {
    pub d: f64,
    pub r: f64,
    pub q: f64,
}

impl TwoQubitParams {
    pub fn new(d: f64, r: f64, q: f64) -> Result<Self> {
        for (name, v) in [("d", d), ("r", r), ("q", q)] {
            if !(-1.0..=1.0).contains(&v) {
                return Err(Error::OutOfDomain {
                    name: name.into(),
                    value: v,
                    domain: "[-1, 1]".into(),
                });
            }
        }
        Ok(Self { d, r, q })
    }

    /// Portion of the "both down" product state, label (1,−1).
    pub fn p0(&self) -> f64 {
        (1.0 - self.d) / 2.0 * (1.0 - self.r) / 2.0
    }

    /// Portion of the "both up" product state, label (1,+1).
    pub fn p1(&self) -> f64 {
        (1.0 - self.d) / 2.0 * (1.0 + self.r) / 2.0
    }

    /// Portion of the entangled triplet, label (1,0).
    pub fn pt(&self) -> f64 {
        (1.0 + self.d) / 2.0 * (1.0 - self.q) / 2.0
    }

    /// Portion of the singlet, label (0,0).
    pub fn ps(&self) -> f64 {
        (1.0 + self.d) / 2.0 * (1.0 + self.q) / 2.0
    }
}

/// The two-qubit family: p_s singlet + p_t triplet + p_0/p_1 product states.
pub fn two_qubit_state(params: TwoQubitParams) -> Result<ChannelState> {
    let h = HalfInteger::HALF;
    let one = HalfInteger::ONE;
    let p = BTreeMap::from([
        ((HalfInteger::ZERO, HalfInteger::ZERO), params.ps()),
        ((one, -one), params.p0()),
        ((one, HalfInteger::ZERO), params.pt()),
        ((one, one), params.p1()),
    ]);
    coupled_diagonal_state(h, h, p)
}

impl Serialize for ChannelState {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match &self.storage {
            Storage::Spectral(p) => {
                let mut st = serializer.serialize_struct("ChannelState", 4)?;
                st.serialize_field("s", &self.s)?;
                st.serialize_field("l", &self.l)?;
                st.serialize_field("form", "spectral")?;
                let p: BTreeMap<String, f64> =
                    p.iter().map(|(&(j, m), &v)| (format!("{j},{m}"), v)).collect();
                st.serialize_field("p", &p)?;
                st.end()
            }
            Storage::Matrix(rho) => {
                let mut st = serializer.serialize_struct("ChannelState", 5)?;
                st.serialize_field("s", &self.s)?;
                st.serialize_field("l", &self.l)?;
                st.serialize_field("form", "matrix")?;
                st.serialize_field("dims", &[self.dim_a(), self.dim_b()])?;
                st.serialize_field("rho", rho)?;
                st.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for ChannelState {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            #[serde(default)]
            s: Option<HalfInteger>,
            #[serde(default)]
            l: Option<HalfInteger>,
            form: String,
            #[serde(default)]
            p: Option<BTreeMap<String, f64>>,
            #[serde(default)]
            dims: Option<[usize; 2]>,
            #[serde(default)]
            rho: Option<ComplexMatrix>,
        }
        let w = Wire::deserialize(deserializer)?;
        let ranks = |d: D::Error| -> std::result::Result<(HalfInteger, HalfInteger), D::Error> {
            match (w.s, w.l, w.dims) {
                (Some(s), Some(l), _) => Ok((s, l)),
                (_, _, Some([da, db])) if da >= 1 && db >= 1 => {
                    Ok((HalfInteger::rank_of_dim(da), HalfInteger::rank_of_dim(db)))
                }
                _ => Err(d),
            }
        };
        match w.form.as_str() {
            "spectral" => {
                let (s, l) = ranks(D::Error::custom("spectral form needs \"s\" and \"l\" ranks"))?;
                let raw = w.p.ok_or_else(|| D::Error::missing_field("p"))?;
                let mut p = BTreeMap::new();
                for (key, v) in raw {
                    let (js, ms) = key
                        .split_once(',')
                        .ok_or_else(|| D::Error::custom(format!("bad label key `{key}`")))?;
                    let j: HalfInteger =
                        js.parse().map_err(|e: Error| D::Error::custom(e.to_string()))?;
                    let m: HalfInteger =
                        ms.parse().map_err(|e: Error| D::Error::custom(e.to_string()))?;
                    p.insert((j, m), v);
                }
                coupled_diagonal_state(s, l, p).map_err(|e| D::Error::custom(e.to_string()))
            }
            "matrix" => {
                let (s, l) = ranks(D::Error::custom("matrix form needs \"s\"/\"l\" or \"dims\""))?;
                let rho = w.rho.ok_or_else(|| D::Error::missing_field("rho"))?;
                matrix_state(s, l, rho).map_err(|e| D::Error::custom(e.to_string()))
            }
            other => Err(D::Error::custom(format!("unknown state form `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h(t: i64) -> HalfInteger {
        HalfInteger::from_twice(t)
    }

    fn random_spectral(s: HalfInteger, l: HalfInteger, rng: &mut ChaCha8Rng) -> ChannelState {
        let labels = coupled_labels(s, l);
        let mut p: BTreeMap<Label, f64> =
            labels.into_iter().map(|lab| (lab, rng.gen::<f64>())).collect();
        let sum: f64 = p.values().sum();
        p.values_mut().for_each(|v| *v /= sum);
        coupled_diagonal_state(s, l, p).unwrap()
    }

    #[test]
    fn uniform_spectrum_is_identity_over_n() {
        let state = maximally_mixed(h(1), h(3));
        let rho = state.to_matrix();
        let expect = ComplexMatrix::identity(8).scale(1.0 / 8.0);
        assert!(rho.sub(&expect).max_abs() < 1e-12);
    }

    #[test]
    fn singlet_projector_entries() {
        let state = pure_coupled_state(h(1), h(1), h(0), h(0)).unwrap();
        let rho = state.to_matrix();
        // Product rows ↓↓, ↓↑, ↑↓, ↑↑: ±1/2 in the central block.
        assert_abs_diff_eq!(rho.get(1, 1).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(2, 2).re, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(1, 2).re, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(2, 1).re, -0.5, epsilon = 1e-12);
        assert!(rho.get(0, 0).norm() < 1e-12);
        assert!(rho.get(3, 3).norm() < 1e-12);
    }

    #[test]
    fn spectral_matrix_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let state = random_spectral(h(1), h(3), &mut rng);
            let rebuilt = matrix_state(h(1), h(3), state.to_matrix()).unwrap();
            let (projected, offdiag) = rebuilt.project_spectrum();
            assert!(offdiag < 1e-10);
            for (label, &v) in state.spectrum().unwrap() {
                assert_abs_diff_eq!(projected[label], v, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_spectra() {
        let p = BTreeMap::from([((h(0), h(0)), 1.5)]);
        assert!(matches!(coupled_diagonal_state(h(1), h(1), p), Err(Error::NotNormalized(_))));
        let p = BTreeMap::from([((h(0), h(0)), 1.2), ((h(2), h(0)), -0.2)]);
        assert!(matches!(
            coupled_diagonal_state(h(1), h(1), p),
            Err(Error::InvalidProbability { .. })
        ));
        let p = BTreeMap::from([((h(7), h(0)), 1.0)]);
        assert!(matches!(coupled_diagonal_state(h(1), h(1), p), Err(Error::UnknownLabel { .. })));
    }

    #[test]
    fn singlet_reduces_to_identity_over_two() {
        let state = pure_coupled_state(h(1), h(1), h(0), h(0)).unwrap();
        for red in [reduce_a(&state), reduce_b(&state)] {
            assert_eq!(red.dim, 2);
            assert!(red.rho.sub(&ComplexMatrix::identity(2).scale(0.5)).max_abs() < 1e-12);
        }
    }

    #[test]
    fn qubit_qutrit_pure_reduction_spectra() {
        // |3/2, 1/2⟩: qutrit carries 2/3 on m_l = 0 and 1/3 on m_l = 1.
        let state = pure_coupled_state(h(1), h(2), h(3), h(1)).unwrap();
        let b = reduce_b(&state);
        assert_abs_diff_eq!(b.rho.get(1, 1).re, 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.rho.get(2, 2).re, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.rho.get(0, 0).re, 0.0, epsilon = 1e-12);
        let a = reduce_a(&state);
        assert_abs_diff_eq!(a.eigs[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.eigs[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn stretched_product_state_reduces_pure() {
        let state = pure_coupled_state(h(1), h(5), h(6), h(6)).unwrap();
        assert_abs_diff_eq!(reduce_a(&state).eigs[0], 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(reduce_b(&state).eigs[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn reduction_formula_matches_partial_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for ts in [1_i64, 2, 3] {
            for tl in [3_i64, 5, 7] {
                if ts > tl {
                    continue;
                }
                for _ in 0..10 {
                    let state = random_spectral(h(ts), h(tl), &mut rng);
                    let rho = state.to_matrix();
                    let a_oracle = partial_trace_over_b(&rho, state.dim_a(), state.dim_b());
                    let b_oracle = partial_trace_over_a(&rho, state.dim_a(), state.dim_b());
                    assert!(reduce_a(&state).rho.sub(&a_oracle).max_abs() < 1e-10);
                    assert!(reduce_b(&state).rho.sub(&b_oracle).max_abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn pure_reduction_examples() {
        let r = pure_state_reduction(h(1), h(1), h(2), h(2)).unwrap();
        assert_abs_diff_eq!(r.eigs[0], 1.0, epsilon = 1e-12);

        let r = pure_state_reduction(h(2), h(2), h(4), h(0)).unwrap();
        assert_abs_diff_eq!(r.eigs[0], 4.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eigs[1], 1.0 / 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eigs[2], 1.0 / 6.0, epsilon = 1e-12);

        let r = pure_state_reduction(h(1), h(2), h(1), h(1)).unwrap();
        assert_abs_diff_eq!(r.eigs[0], 2.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(r.eigs[1], 1.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn pure_reductions_share_nonzero_spectra_and_respect_rank() {
        for (ts, tl) in [(1_i64, 3_i64), (2, 4), (3, 5), (1, 7)] {
            let (s, l) = (h(ts), h(tl));
            for (j, m) in coupled_labels(s, l) {
                let state = pure_coupled_state(s, l, j, m).unwrap();
                let a: Vec<f64> =
                    reduce_a(&state).eigs.into_iter().filter(|e| *e > 1e-12).collect();
                let b: Vec<f64> =
                    reduce_b(&state).eigs.into_iter().filter(|e| *e > 1e-12).collect();
                assert_eq!(a.len(), b.len());
                assert!(a.len() <= s.dim().min(l.dim()));
                for (x, y) in a.iter().zip(&b) {
                    assert_abs_diff_eq!(x, y, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn joint_probability_dual_qutrit_pure() {
        let state = pure_coupled_state(h(2), h(2), h(2), h(0)).unwrap();
        let p = |a: i64, b: i64| joint_probability(&state, h(2 * a), h(2 * b)).unwrap();
        assert_abs_diff_eq!(p(-1, 1), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(p(1, -1), 0.5, epsilon = 1e-12);
        for (a, b) in [(0, 0), (1, 1), (-1, -1), (0, 1), (1, 0), (0, -1), (-1, 0)] {
            assert_abs_diff_eq!(p(a, b), 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn joint_probability_normalizes_and_reproduces_marginals() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let state = random_spectral(h(2), h(5), &mut rng);
            let mut total = 0.0;
            let mut marg_a = vec![0.0; state.dim_a()];
            let mut marg_b = vec![0.0; state.dim_b()];
            for (ia, m_a) in state.s().projections().enumerate() {
                for (ib, m_b) in state.l().projections().enumerate() {
                    let p = joint_probability(&state, m_a, m_b).unwrap();
                    total += p;
                    marg_a[ia] += p;
                    marg_b[ib] += p;
                }
            }
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-10);
            let ra = reduce_a(&state);
            let rb = reduce_b(&state);
            for (i, &p) in marg_a.iter().enumerate() {
                assert_abs_diff_eq!(p, ra.rho.get(i, i).re, epsilon = 1e-10);
            }
            for (i, &p) in marg_b.iter().enumerate() {
                assert_abs_diff_eq!(p, rb.rho.get(i, i).re, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn joint_probability_formula_against_trace() {
        // P(m_a, m_b) = Σ_j p_{j, m_a+m_b} C²_{j, m_a+m_b; m_a}.
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let state = random_spectral(h(1), h(4), &mut rng);
        let basis = state.basis();
        for m_a in state.s().projections() {
            for m_b in state.l().projections() {
                let brute = joint_probability(&state, m_a, m_b).unwrap();
                let m = m_a + m_b;
                let formula: f64 = crate::coupling::total_ranks(state.s(), state.l())
                    .into_iter()
                    .filter(|&j| m.abs() <= j)
                    .map(|j| {
                        let c = basis.cg(j, m, m_a);
                        state.probability(j, m) * c * c
                    })
                    .sum();
                assert_abs_diff_eq!(brute, formula, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn conditional_probability_is_a_delta() {
        // Dual qutrit |1,0⟩: measuring B at 1 forces A to −1.
        let (s, l) = (h(2), h(2));
        assert_eq!(conditional_probability(s, l, h(2), h(0), h(-2), h(2)).unwrap(), 1.0);
        assert_eq!(conditional_probability(s, l, h(2), h(0), h(2), h(2)).unwrap(), 0.0);
        // Conditioning on an unpopulated outcome fails: |1,0⟩ has no m_b = 0.
        assert!(matches!(
            conditional_probability(s, l, h(2), h(0), h(0), h(0)),
            Err(Error::UndefinedConditional { .. })
        ));
        // Stretched state: the single outcome pair.
        assert_eq!(conditional_probability(s, l, h(4), h(4), h(2), h(2)).unwrap(), 1.0);
    }

    #[test]
    fn two_qubit_family_basics() {
        // d = 1, q = 1 is the pure singlet.
        let singlet = two_qubit_state(TwoQubitParams::new(1.0, 0.3, 1.0).unwrap()).unwrap();
        assert_abs_diff_eq!(singlet.probability(h(0), h(0)), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(singlet.eigenvalues()[0], 1.0, epsilon = 1e-12);

        // q = 0 (p_s == p_t): cross terms vanish, matrix diagonal in the
        // product basis.
        let balanced = two_qubit_state(TwoQubitParams::new(0.4, -0.2, 0.0).unwrap()).unwrap();
        let rho = balanced.to_matrix();
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    assert!(rho.get(i, j).norm() < 1e-12);
                }
            }
        }

        assert!(TwoQubitParams::new(1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn two_qubit_matrix_matches_block_construction() {
        // Product rows ↓↓, ↓↑, ↑↓, ↑↑: p_0 and p_1 on the outer diagonal,
        // (p_t ± p_s)/2 filling the central block.
        let params = TwoQubitParams::new(0.6, 0.9, 0.35).unwrap();
        let rho = two_qubit_state(params).unwrap().to_matrix();
        let (p0, p1, pt, ps) = (params.p0(), params.p1(), params.pt(), params.ps());
        assert_abs_diff_eq!(rho.get(0, 0).re, p0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(3, 3).re, p1, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(1, 1).re, (pt + ps) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(2, 2).re, (pt + ps) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(1, 2).re, (pt - ps) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.get(2, 1).re, (pt - ps) / 2.0, epsilon = 1e-12);
    }

    fn state_matrix_for_test() -> ComplexMatrix {
        let mut rho = ComplexMatrix::zeros(4, 4);
        rho.set(0, 0, Complex64::new(0.4, 0.0));
        rho.set(1, 1, Complex64::new(0.3, 0.0));
        rho.set(2, 2, Complex64::new(0.2, 0.0));
        rho.set(3, 3, Complex64::new(0.1, 0.0));
        rho.set(0, 3, Complex64::new(0.05, 0.02));
        rho.set(3, 0, Complex64::new(0.05, -0.02));
        rho
    }

    #[test]
    fn state_file_round_trip() {
        let state = pure_coupled_state(h(1), h(3), h(4), h(2)).unwrap();
        let json = serde_json::to_string(&state).unwrap();
        assert!(json.contains("\"form\":\"spectral\""));
        assert!(json.contains("\"2,1\""));
        let back: ChannelState = serde_json::from_str(&json).unwrap();
        assert_eq!(back.probability(h(4), h(2)), 1.0);

        let m = matrix_state(h(1), h(1), state_matrix_for_test()).unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert!(json.contains("\"form\":\"matrix\""));
        assert!(json.contains("\"dims\":[2,2]"));
        let back: ChannelState = serde_json::from_str(&json).unwrap();
        assert!(back.to_matrix().sub(&m.to_matrix()).max_abs() < 1e-12);
    }

    #[test]
    fn matrix_state_validation() {
        let mut bad = state_matrix_for_test();
        bad.set(0, 1, Complex64::new(0.9, 0.0));
        assert!(matrix_state(h(1), h(1), bad).is_err());

        let mut neg = ComplexMatrix::zeros(4, 4);
        neg.set(0, 0, Complex64::new(1.5, 0.0));
        neg.set(1, 1, Complex64::new(-0.5, 0.0));
        assert!(matches!(matrix_state(h(1), h(1), neg), Err(Error::InvalidDensity(_))));
    }
}
