//! Entanglement indicators read off the eigenvalue structure.
//!
//! For a qubit ⊗ qunit channel diagonal in the coupled basis, the cross terms
//! that carry entanglement are weighted by the differences
//! q_m = p_{l+1/2,m} − p_{l−1/2,m}; all interior differences vanishing makes
//! the matrix diagonal in the product basis, hence separable. The same
//! differences reconstruct the larger subchannel's spectrum from sums of
//! neighboring eigenvalues. An independent positive-partial-transpose check
//! backs the indicators: PPT failure proves entanglement in any dimension,
//! and PPT success proves separability at 2×2 and 2×3.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::matrix::ComplexMatrix;
use crate::states::{partial_trace_over_b, ChannelState};

/// Tolerance for treating an indicator as zero.
const INDICATOR_TOL: f64 = 1e-10;

/// Separability verdict of the eigenvalue indicators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    Separable,
    Undetermined,
}

/// Outcome of the partial-transpose criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PptVerdict {
    PptPass,
    PptFail,
    NotApplicable,
}

fn require_qubit_spectral(state: &ChannelState) -> Result<()> {
    if state.s() != HalfInteger::HALF {
        return Err(Error::NotQubitChannel(state.s().to_string()));
    }
    state.spectrum()?;
    Ok(())
}

/// The eigenvalue differences q_m = p_{l+1/2,m} − p_{l−1/2,m} of a
/// qubit ⊗ qunit coupled-diagonal state, over the full m range of the
/// j = l+1/2 multiplet. At the edges m = ±(l+1/2) the j = l−1/2 partner does
/// not exist and counts as zero, so the edge values are the eigenvalues
/// themselves.
pub fn q_parameters(state: &ChannelState) -> Result<BTreeMap<HalfInteger, f64>> {
    require_qubit_spectral(state)?;
    let l = state.l();
    let upper = l + HalfInteger::HALF;
    let lower = l - HalfInteger::HALF;
    let mut q = BTreeMap::new();
    for m in upper.projections() {
        let hi = state.probability(upper, m);
        let lo = if m.abs() <= lower { state.probability(lower, m) } else { 0.0 };
        q.insert(m, hi - lo);
    }
    Ok(q)
}

/// Whether every interior q_m vanishes (the disentanglement condition).
pub fn interior_q_vanishes(q: &BTreeMap<HalfInteger, f64>, l: HalfInteger) -> bool {
    let edge = l + HalfInteger::HALF;
    q.iter().all(|(&m, &v)| m.abs() == edge || v.abs() < INDICATOR_TOL)
}

/// The qubit's deflection q from the equilibrium state, three ways.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct QubitPolarization {
    /// From the partial trace: ρ^A = diag((1−q)/2, (1+q)/2).
    pub oracle: f64,
    /// From the eigenvalue differences with unit edge coefficients,
    /// q = Σ (2m/(2l+1)) q_m + p_{l+1/2,top} − p_{l+1/2,bottom}.
    pub formula: f64,
    /// The same sum with the edge eigenvalues entering at coefficient 1/2.
    /// Kept for comparison: it disagrees with the trace (e.g. it yields 1/2
    /// on a fully polarized product state), and is not used anywhere.
    pub edge_half_variant: f64,
}

/// Deflection of the qubit subchannel from the equilibrium state.
pub fn qubit_polarization(state: &ChannelState) -> Result<QubitPolarization> {
    require_qubit_spectral(state)?;
    let l = state.l();
    let edge = l + HalfInteger::HALF;
    let q = q_parameters(state)?;
    let denom = 2.0 * l.value() + 1.0;
    let mut weighted = 0.0;
    for (&m, &qm) in &q {
        if m.abs() < edge {
            weighted += 2.0 * m.value() / denom * qm;
        }
    }
    let top = state.probability(edge, edge);
    let bottom = state.probability(edge, -edge);

    let rho = state.to_matrix();
    let reduced = partial_trace_over_b(&rho, state.dim_a(), state.dim_b());
    let oracle = reduced.get(1, 1).re - reduced.get(0, 0).re;

    Ok(QubitPolarization {
        oracle,
        formula: weighted + top - bottom,
        edge_half_variant: weighted + 0.5 * top - 0.5 * bottom,
    })
}

/// Eigenvalues p_μ of the larger subchannel from the four adjacent channel
/// eigenvalues, p_μ = p_{l+1/2,μ+1/2} + p_{l+1/2,μ−1/2}
/// − [(l−μ)q_{μ+1/2} + (l+μ)q_{μ−1/2}]/(2l+1), together with the residuals
/// dp_μ = p_μ − p_{l+1/2,μ+1/2} − p_{l+1/2,μ−1/2}: any nonzero residual
/// witnesses an uncompensated pair of cross terms.
pub fn larger_subchannel_spectrum(
    state: &ChannelState,
) -> Result<(BTreeMap<HalfInteger, f64>, BTreeMap<HalfInteger, f64>)> {
    require_qubit_spectral(state)?;
    let l = state.l();
    let upper = l + HalfInteger::HALF;
    let q = q_parameters(state)?;
    let denom = 2.0 * l.value() + 1.0;
    let mut p_mu = BTreeMap::new();
    let mut dp_mu = BTreeMap::new();
    for mu in l.projections() {
        let above = mu + HalfInteger::HALF;
        let below = mu - HalfInteger::HALF;
        let sum = state.probability(upper, above) + state.probability(upper, below);
        let correction = ((l.value() - mu.value()) * q[&above]
            + (l.value() + mu.value()) * q[&below])
            / denom;
        p_mu.insert(mu, sum - correction);
        dp_mu.insert(mu, -correction);
    }
    Ok((p_mu, dp_mu))
}

/// Degeneracy condition for a dual channel (s == l): the state is diagonal in
/// the product basis iff for every m all eigenvalues p_{j,m}, j ≥ |m|,
/// coincide.
pub fn dual_degeneracy_check(state: &ChannelState) -> Result<Verdict> {
    if state.s() != state.l() {
        return Err(Error::NotDualChannel {
            s: state.s().to_string(),
            l: state.l().to_string(),
        });
    }
    let spectrum = state.spectrum()?;
    let top = state.s() + state.l();
    for m in top.projections() {
        let mut values = Vec::new();
        for j in m.abs().range_to(top) {
            values.push(spectrum.get(&(j, m)).copied().unwrap_or(0.0));
        }
        if values.iter().any(|v| (v - values[0]).abs() > INDICATOR_TOL) {
            return Ok(Verdict::Entangled);
        }
    }
    Ok(Verdict::Separable)
}

/// Partial transpose over subchannel B (A-major product indexing).
pub fn partial_transpose_b(rho: &ComplexMatrix, dim_a: usize, dim_b: usize) -> ComplexMatrix {
    let n = dim_a * dim_b;
    let mut out = ComplexMatrix::zeros(n, n);
    for ia in 0..dim_a {
        for ja in 0..dim_a {
            for ib in 0..dim_b {
                for jb in 0..dim_b {
                    out.set(ia * dim_b + jb, ja * dim_b + ib, rho.get(ia * dim_b + ib, ja * dim_b + jb));
                }
            }
        }
    }
    out
}

/// The positive-partial-transpose criterion.
///
/// A negative eigenvalue of ρ^{T_B} proves entanglement in any dimension;
/// a nonnegative spectrum proves separability only at 2×2 and 2×3.
pub fn ppt_check(state: &ChannelState) -> PptVerdict {
    let rho = state.to_matrix();
    let pt = partial_transpose_b(&rho, state.dim_a(), state.dim_b());
    let min = pt.hermitian_eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
    if min >= -INDICATOR_TOL {
        PptVerdict::PptPass
    } else {
        PptVerdict::PptFail
    }
}

/// Whether PPT is decisive (necessary and sufficient) at these dimensions.
pub fn ppt_decisive(dim_a: usize, dim_b: usize) -> bool {
    dim_a * dim_b <= 6
}

/// The full indicator report for a qubit ⊗ qunit coupled-diagonal state.
#[derive(Clone, Debug)]
pub struct WitnessReport {
    pub l: HalfInteger,
    pub q_m: BTreeMap<HalfInteger, f64>,
    /// Qubit deflection (trace value, with the formula variants alongside).
    pub polarization: QubitPolarization,
    pub p_mu: BTreeMap<HalfInteger, f64>,
    pub dp_mu: BTreeMap<HalfInteger, f64>,
    pub entangled_verdict: Verdict,
    pub ppt_verdict: PptVerdict,
}

/// Build the witness report and verdicts for a qubit ⊗ qunit state.
pub fn witness_report(state: &ChannelState) -> Result<WitnessReport> {
    let q_m = q_parameters(state)?;
    let polarization = qubit_polarization(state)?;
    let (p_mu, dp_mu) = larger_subchannel_spectrum(state)?;
    let ppt = ppt_check(state);
    let quiet = interior_q_vanishes(&q_m, state.l());
    let verdict = if quiet {
        // All cross terms compensated: diagonal in the product basis.
        Verdict::Separable
    } else if ppt == PptVerdict::PptFail {
        Verdict::Entangled
    } else if ppt_decisive(state.dim_a(), state.dim_b()) {
        // PPT is sufficient here, so a passing transpose overrides the
        // indicator.
        Verdict::Separable
    } else {
        Verdict::Undetermined
    };
    Ok(WitnessReport {
        l: state.l(),
        q_m,
        polarization,
        p_mu,
        dp_mu,
        entangled_verdict: verdict,
        ppt_verdict: ppt,
    })
}

impl Serialize for WitnessReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        fn keyed(map: &BTreeMap<HalfInteger, f64>) -> BTreeMap<String, f64> {
            map.iter().map(|(k, &v)| (k.to_string(), v)).collect()
        }
        let mut st = serializer.serialize_struct("WitnessReport", 7)?;
        st.serialize_field("l", &self.l)?;
        st.serialize_field("q_m", &keyed(&self.q_m))?;
        st.serialize_field("polarization", &self.polarization)?;
        st.serialize_field("p_mu", &keyed(&self.p_mu))?;
        st.serialize_field("dp_mu", &keyed(&self.dp_mu))?;
        st.serialize_field("entangled_verdict", &self.entangled_verdict)?;
        st.serialize_field("ppt_verdict", &self.ppt_verdict)?;
        st.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::coupled_labels;
    use crate::states::{
        coupled_diagonal_state, maximally_mixed, pure_coupled_state, reduce_b, two_qubit_state,
        TwoQubitParams,
    };
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn h(t: i64) -> HalfInteger {
        HalfInteger::from_twice(t)
    }

    fn random_qubit_qunit(l: HalfInteger, rng: &mut ChaCha8Rng) -> ChannelState {
        let labels = coupled_labels(HalfInteger::HALF, l);
        let mut p: BTreeMap<(HalfInteger, HalfInteger), f64> =
            labels.into_iter().map(|lab| (lab, rng.gen::<f64>())).collect();
        let sum: f64 = p.values().sum();
        p.values_mut().for_each(|v| *v /= sum);
        coupled_diagonal_state(HalfInteger::HALF, l, p).unwrap()
    }

    #[test]
    fn maximally_mixed_q_parameters() {
        let state = maximally_mixed(HalfInteger::HALF, h(3));
        let q = q_parameters(&state).unwrap();
        let edge = h(3) + HalfInteger::HALF;
        for (&m, &v) in &q {
            if m.abs() == edge {
                assert_abs_diff_eq!(v, 1.0 / 8.0, epsilon = 1e-12);
            } else {
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
            }
        }
        assert!(interior_q_vanishes(&q, h(3)));
    }

    #[test]
    fn pure_interior_state_has_unit_q() {
        let l = h(3);
        let state = pure_coupled_state(HalfInteger::HALF, l, h(4), h(2)).unwrap();
        let q = q_parameters(&state).unwrap();
        assert_abs_diff_eq!(q[&h(2)], 1.0, epsilon = 1e-12);
        for (&m, &v) in &q {
            if m != h(2) {
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-12);
            }
        }
        assert!(!interior_q_vanishes(&q, l));
        // Its residuals flag the two affected μ values.
        let (_, dp) = larger_subchannel_spectrum(&state).unwrap();
        assert!(dp[&h(1)].abs() > 1e-3);
        assert!(dp[&h(3)].abs() > 1e-3);
    }

    #[test]
    fn balanced_spectrum_is_product_diagonal() {
        // p_{l+1/2,m} == p_{l−1/2,m} for all interior m.
        let l = HalfInteger::ONE;
        let mut p = BTreeMap::new();
        p.insert((h(3), h(3)), 0.3);
        p.insert((h(3), h(-3)), 0.1);
        p.insert((h(3), h(1)), 0.2);
        p.insert((h(1), h(1)), 0.2);
        p.insert((h(3), h(-1)), 0.1);
        p.insert((h(1), h(-1)), 0.1);
        let state = coupled_diagonal_state(HalfInteger::HALF, l, p).unwrap();
        let q = q_parameters(&state).unwrap();
        assert!(interior_q_vanishes(&q, l));
        let rho = state.to_matrix();
        for i in 0..state.dim() {
            for j in 0..state.dim() {
                if i != j {
                    assert!(rho.get(i, j).norm() < 1e-12);
                }
            }
        }
        assert_eq!(witness_report(&state).unwrap().entangled_verdict, Verdict::Separable);
        assert_eq!(ppt_check(&state), PptVerdict::PptPass);
        // With all q zero the spectrum rule collapses to neighbor sums.
        let (p_mu, dp_mu) = larger_subchannel_spectrum(&state).unwrap();
        let upper = l + HalfInteger::HALF;
        for mu in l.projections() {
            assert_abs_diff_eq!(dp_mu[&mu], 0.0, epsilon = 1e-12);
            let expect = state.probability(upper, mu + HalfInteger::HALF)
                + state.probability(upper, mu - HalfInteger::HALF);
            assert_abs_diff_eq!(p_mu[&mu], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn polarization_examples() {
        // Maximally mixed: no deflection.
        let state = maximally_mixed(HalfInteger::HALF, h(5));
        let pol = qubit_polarization(&state).unwrap();
        assert_abs_diff_eq!(pol.oracle, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pol.formula, 0.0, epsilon = 1e-12);

        // Fully polarized product state: the trace says 1; the half-edge
        // variant of the sum rule only reaches 1/2.
        let l = h(4);
        let top = l + HalfInteger::HALF;
        let state = pure_coupled_state(HalfInteger::HALF, l, top, top).unwrap();
        let pol = qubit_polarization(&state).unwrap();
        assert_abs_diff_eq!(pol.oracle, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pol.formula, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(pol.edge_half_variant, 0.5, epsilon = 1e-12);

        // Pure |l−1/2, m⟩: q = −2m/(2l+1). For l = 3/2 the lower multiplet
        // is j = 1 with integer m.
        let l = h(3);
        for tm in [-2_i64, 0, 2] {
            let state = pure_coupled_state(HalfInteger::HALF, l, h(2), h(tm)).unwrap();
            let pol = qubit_polarization(&state).unwrap();
            let expect = -2.0 * (tm as f64 / 2.0) / (2.0 * l.value() + 1.0);
            assert_abs_diff_eq!(pol.oracle, expect, epsilon = 1e-12);
            assert_abs_diff_eq!(pol.formula, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn polarization_formula_matches_oracle_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for tl in [1_i64, 2, 3, 5, 7, 9] {
            for _ in 0..20 {
                let state = random_qubit_qunit(h(tl), &mut rng);
                let pol = qubit_polarization(&state).unwrap();
                assert_abs_diff_eq!(pol.oracle, pol.formula, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn spectrum_rule_matches_reduction() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for tl in [1_i64, 2, 3, 5, 7, 9] {
            for _ in 0..20 {
                let state = random_qubit_qunit(h(tl), &mut rng);
                let (p_mu, _) = larger_subchannel_spectrum(&state).unwrap();
                let reduced = reduce_b(&state);
                for (idx, mu) in h(tl).projections().enumerate() {
                    assert_abs_diff_eq!(
                        p_mu[&mu],
                        reduced.rho.get(idx, idx).re,
                        epsilon = 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn wrong_shapes_are_rejected() {
        let dual = maximally_mixed(HalfInteger::ONE, HalfInteger::ONE);
        assert!(matches!(q_parameters(&dual), Err(Error::NotQubitChannel(_))));
        let qubit = maximally_mixed(HalfInteger::HALF, h(3));
        assert!(matches!(dual_degeneracy_check(&qubit), Err(Error::NotDualChannel { .. })));
    }

    #[test]
    fn dual_degeneracy_examples() {
        let one = HalfInteger::ONE;
        assert_eq!(
            dual_degeneracy_check(&maximally_mixed(one, one)).unwrap(),
            Verdict::Separable
        );
        let singlet = pure_coupled_state(one, one, h(0), h(0)).unwrap();
        assert_eq!(dual_degeneracy_check(&singlet).unwrap(), Verdict::Entangled);
        assert_eq!(ppt_check(&singlet), PptVerdict::PptFail);

        // p depending on m only: separable and product-diagonal.
        let mut p = BTreeMap::new();
        let weights = |tm: i64| match tm.abs() {
            0 => 0.4 / 3.0,
            2 => 0.1,
            _ => 0.1,
        };
        for (j, m) in coupled_labels(one, one) {
            p.insert((j, m), weights(m.twice()));
        }
        let sum: f64 = p.values().sum();
        p.values_mut().for_each(|v| *v /= sum);
        let state = coupled_diagonal_state(one, one, p).unwrap();
        assert_eq!(dual_degeneracy_check(&state).unwrap(), Verdict::Separable);
        let rho = state.to_matrix();
        for i in 0..9 {
            for j in 0..9 {
                if i != j {
                    assert!(rho.get(i, j).norm() < 1e-10);
                }
            }
        }
        assert_eq!(ppt_check(&state), PptVerdict::PptPass);
    }

    #[test]
    fn ppt_singlet_two_qubits() {
        let singlet = pure_coupled_state(HalfInteger::HALF, HalfInteger::HALF, h(0), h(0)).unwrap();
        let pt = partial_transpose_b(&singlet.to_matrix(), 2, 2);
        let eigs = pt.hermitian_eigenvalues();
        assert_abs_diff_eq!(eigs[0], -0.5, epsilon = 1e-12);
        assert_eq!(ppt_check(&singlet), PptVerdict::PptFail);
    }

    #[test]
    fn ppt_passes_on_balanced_two_qubit_family() {
        for d in [0.0, 0.4, 0.9] {
            for r in [-0.8, 0.1] {
                let state = two_qubit_state(TwoQubitParams::new(d, r, 0.0).unwrap()).unwrap();
                assert_eq!(ppt_check(&state), PptVerdict::PptPass);
            }
        }
        assert_eq!(ppt_check(&maximally_mixed(h(2), h(3))), PptVerdict::PptPass);
    }

    #[test]
    fn vanishing_q_implies_ppt_and_pure_labels_are_decisive() {
        // One direction holds everywhere: all interior q_m = 0 makes the
        // matrix product-diagonal, hence separable, hence PPT passes. On
        // pure labels the equivalence is two-sided.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for tl in [1_i64, 2] {
            let l = h(tl);
            for _ in 0..50 {
                let state = random_qubit_qunit(l, &mut rng);
                let q = q_parameters(&state).unwrap();
                if interior_q_vanishes(&q, l) {
                    assert_eq!(ppt_check(&state), PptVerdict::PptPass);
                }
            }
            for (j, m) in coupled_labels(HalfInteger::HALF, l) {
                let state = pure_coupled_state(HalfInteger::HALF, l, j, m).unwrap();
                let q = q_parameters(&state).unwrap();
                let quiet = interior_q_vanishes(&q, l);
                let ppt = ppt_check(&state) == PptVerdict::PptPass;
                assert_eq!(quiet, ppt, "pure label ({j},{m}) at l={tl}/2");
            }
        }
    }

    #[test]
    fn nonzero_q_does_not_imply_entanglement() {
        // The converse direction fails: p_0 = p_1 = p_t = 0.3, p_s = 0.1 has
        // q_0 = 0.2 yet a positive partial transpose, and PPT is decisive at
        // 2×2, so the state is separable despite the uncompensated cross
        // term. The q-condition detects product-basis diagonality, which is
        // strictly stronger than separability.
        let h2 = HalfInteger::HALF;
        let one = HalfInteger::ONE;
        let p = BTreeMap::from([
            ((HalfInteger::ZERO, HalfInteger::ZERO), 0.1),
            ((one, -one), 0.3),
            ((one, HalfInteger::ZERO), 0.3),
            ((one, one), 0.3),
        ]);
        let state = coupled_diagonal_state(h2, h2, p).unwrap();
        let q = q_parameters(&state).unwrap();
        assert_abs_diff_eq!(q[&HalfInteger::ZERO], 0.2, epsilon = 1e-12);
        assert!(!interior_q_vanishes(&q, h2));
        assert_eq!(ppt_check(&state), PptVerdict::PptPass);
        assert_eq!(witness_report(&state).unwrap().entangled_verdict, Verdict::Separable);
    }

    #[test]
    fn verdicts_and_report_serialization() {
        let l = h(4);
        let entangled = pure_coupled_state(HalfInteger::HALF, l, h(5), h(1)).unwrap();
        let report = witness_report(&entangled).unwrap();
        assert_eq!(report.entangled_verdict, Verdict::Entangled);
        assert_eq!(report.ppt_verdict, PptVerdict::PptFail);

        let mixed = maximally_mixed(HalfInteger::HALF, l);
        let report = witness_report(&mixed).unwrap();
        assert_eq!(report.entangled_verdict, Verdict::Separable);

        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["entangled_verdict"], "separable");
        assert_eq!(json["ppt_verdict"], "ppt_pass");
        assert!(json["q_m"].get("5/2").is_some());
    }
}
