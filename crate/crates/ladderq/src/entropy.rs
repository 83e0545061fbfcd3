//! Entropy quantities of composite channels and their subchannels.
//!
//! Everything is in bits (base-2 logarithms), with 0·log 0 = 0. Besides the
//! plain von Neumann entropies this module carries the entanglement entropy
//! of pure coupled states (a function of the squared Clebsch–Gordan
//! coefficients alone), closed forms for the two-qubit mixing family, the
//! behavior of entropy under eigenvalue degeneration, and the Holevo bound
//! on extractable information for coupled-diagonal sources.

use std::collections::BTreeMap;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::coupling::cg_column;
use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::states::{reduce_a, reduce_b, ChannelState, Label, TwoQubitParams};

/// Probabilities below this floor contribute nothing to entropy sums.
const PROB_FLOOR: f64 = 1e-15;

const LN2: f64 = std::f64::consts::LN_2;

/// Shannon entropy of a probability list, in bits.
pub fn shannon(probs: &[f64]) -> f64 {
    // The trailing +0.0 turns a −0.0 sum (pure states) into +0.0.
    -probs.iter().filter(|&&p| p > PROB_FLOOR).map(|&p| p * p.log2()).sum::<f64>() + 0.0
}

/// Von Neumann entropy of the composite state, in bits.
pub fn von_neumann(state: &ChannelState) -> f64 {
    shannon(&state.eigenvalues())
}

/// Entropies of the two reductions, (A, B).
pub fn subchannel_entropies(state: &ChannelState) -> (f64, f64) {
    (shannon(&reduce_a(state).eigs), shannon(&reduce_b(state).eigs))
}

/// Entanglement entropy of the pure coupled state |j,m⟩:
/// −Σ C²_{j,m;m_s} log₂ C²_{j,m;m_s}. Both reductions share it, and it is
/// bounded by log₂(2s+1), the size of the smaller subchannel.
pub fn entanglement_entropy(
    s: HalfInteger,
    l: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> f64 {
    let sq: Vec<f64> = cg_column(s, l, j, m).into_iter().map(|(_, c)| c * c).collect();
    shannon(&sq)
}

/// The symmetric two-outcome entropy h(x) of the split (1±x)/2.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain { name: "x".into(), value: x, domain: "[-1, 1]".into() });
    }
    Ok(shannon(&[(1.0 + x) / 2.0, (1.0 - x) / 2.0]))
}

/// Entropy of the two-qubit family and of one of its qubits, in closed form:
/// S = h(d) + (1−d)/2·h(r) + (1+d)/2·h(q) and S_qubit = h(r(1−d)/2).
pub fn two_qubit_entropy_closed_form(params: &TwoQubitParams) -> (f64, f64) {
    let h = |x: f64| binary_entropy(x).expect("|x| <= 1 by parameter validation");
    let pair = h(params.d)
        + (1.0 - params.d) / 2.0 * h(params.r)
        + (1.0 + params.d) / 2.0 * h(params.q);
    let qubit = h(params.r * (1.0 - params.d) / 2.0);
    (pair, qubit)
}

/// Derivatives of the entropy with respect to the splitting d of a nearly
/// degenerate eigenvalue pair p_m ± d, holding everything else fixed.
///
/// In bits: ∂S/∂d = log₂((p_m−d)/(p_m+d)) and
/// ∂²S/∂d² = −2p_m/((p_m²−d²)·ln 2). At d = 0 the slope vanishes while the
/// curvature stays negative, which is the entropy gain under degeneration.
pub fn degeneration_derivatives(p_m: f64, d: f64) -> Result<(f64, f64)> {
    if p_m <= 0.0 {
        return Err(Error::OutOfDomain {
            name: "p_m".into(),
            value: p_m,
            domain: "(0, 1]".into(),
        });
    }
    if d.abs() >= p_m {
        return Err(Error::OutOfDomain {
            name: "d".into(),
            value: d,
            domain: format!("(-{p_m}, {p_m})"),
        });
    }
    let first = ((p_m - d) / (p_m + d)).log2();
    let second = -2.0 * p_m / ((p_m * p_m - d * d) * LN2);
    Ok((first, second))
}

/// The Holevo bound χ of a coupled-diagonal source together with the
/// coarser measurement-scenario estimates.
#[derive(Clone, Debug, Serialize)]
pub struct HolevoReport {
    /// χ = S_N − Σ p_{j,m} S_{j,m}, the bound on information extractable
    /// about the preparation.
    pub chi: f64,
    /// Von Neumann entropy of the source.
    pub s_total: f64,
    /// Mean entanglement entropy Σ p_{j,m} S_{j,m} lost to reduction.
    pub mean_entanglement: f64,
    /// Lower estimate when only the larger subchannel is measured:
    /// S_N − 2·log₂ N_A.
    pub bound_larger_only: f64,
    /// Estimate for independent measurement of both subchannels, with the
    /// reduction loss counted on each side: S_N − 2·Σ p S.
    pub estimate_independent: f64,
    /// Estimate for correlated measurement of both subchannels:
    /// S_N − log₂ N_A.
    pub estimate_correlated: f64,
}

/// Holevo quantities for a coupled-diagonal state.
pub fn holevo_chi(state: &ChannelState) -> Result<HolevoReport> {
    let spectrum = state.spectrum()?;
    let s_total = von_neumann(state);
    let mean_entanglement: f64 = spectrum
        .iter()
        .map(|(&(j, m), &p)| p * entanglement_entropy(state.s(), state.l(), j, m))
        .sum();
    let log_na = (state.dim_a() as f64).log2();
    Ok(HolevoReport {
        chi: s_total - mean_entanglement,
        s_total,
        mean_entanglement,
        bound_larger_only: s_total - 2.0 * log_na,
        estimate_independent: s_total - 2.0 * mean_entanglement,
        estimate_correlated: s_total - log_na,
    })
}

/// The entropy summary of one state.
#[derive(Clone, Debug)]
pub struct EntropyReport {
    pub s_total: f64,
    pub s_a: f64,
    pub s_b: f64,
    /// Entanglement entropy of each coupled label of this channel.
    pub per_label_entanglement: BTreeMap<Label, f64>,
    /// Present for coupled-diagonal states only.
    pub holevo: Option<HolevoReport>,
}

/// Compute the full entropy summary of a state.
pub fn entropy_report(state: &ChannelState) -> EntropyReport {
    let (s_a, s_b) = subchannel_entropies(state);
    let per_label_entanglement = crate::coupling::coupled_labels(state.s(), state.l())
        .into_iter()
        .map(|(j, m)| ((j, m), entanglement_entropy(state.s(), state.l(), j, m)))
        .collect();
    EntropyReport {
        s_total: von_neumann(state),
        s_a,
        s_b,
        per_label_entanglement,
        holevo: holevo_chi(state).ok(),
    }
}

impl Serialize for EntropyReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let per_label: BTreeMap<String, f64> = self
            .per_label_entanglement
            .iter()
            .map(|(&(j, m), &v)| (format!("{j},{m}"), v))
            .collect();
        let mut st = serializer.serialize_struct("EntropyReport", 5)?;
        st.serialize_field("s_total", &self.s_total)?;
        st.serialize_field("s_a", &self.s_a)?;
        st.serialize_field("s_b", &self.s_b)?;
        st.serialize_field("per_label_entanglement", &per_label)?;
        st.serialize_field("holevo", &self.holevo)?;
        st.end()
    }
}
