//! Clebsch–Gordan coupling of two channels.
//!
//! Two subchannels of ranks s = (N_A−1)/2 and l = (N_B−1)/2 combine into a
//! composite space that splits into irreducible blocks j = |l−s| .. l+s. The
//! coupled vectors |j,m⟩ = Σ_{m_s} C_{j,m;m_s} |m_s⟩⊗|m−m_s⟩ diagonalize the
//! induced operators S_a⊗I + I⊗L_a, and the coefficient table C is the single
//! object everything downstream (reductions, entropies, witnesses) reads.
//!
//! Coefficients follow the Condon–Shortley convention: real, with the
//! m_s = s component of each |j, j⟩ positive. They are computed by the
//! three-term recursion in m_s at fixed (j, m), seeded at the stretched end
//! of the m_s range and normalized; the two regimes where that seed carries
//! no sign information are mapped back onto anchored ones through the exact
//! mirror (m → −m) and exchange (s ↔ l) symmetries.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::matrix::ComplexMatrix;
use crate::spinops::{build_ladder, LadderSet};

/// Allowed total ranks j for given subchannel ranks, descending from l+s.
pub fn total_ranks(s: HalfInteger, l: HalfInteger) -> Vec<HalfInteger> {
    let mut js: Vec<HalfInteger> = (s - l).abs().range_to(s + l).collect();
    js.reverse();
    js
}

/// Coupled labels (j, m) in canonical order: j descending, m ascending.
pub fn coupled_labels(s: HalfInteger, l: HalfInteger) -> Vec<(HalfInteger, HalfInteger)> {
    let mut labels = Vec::with_capacity(s.dim() * l.dim());
    for j in total_ranks(s, l) {
        for m in j.projections() {
            labels.push((j, m));
        }
    }
    labels
}

fn triangle_ok(s: HalfInteger, l: HalfInteger, j: HalfInteger, m: HalfInteger) -> bool {
    j >= (s - l).abs() && j <= s + l && m.abs() <= j && (s + l + j).is_integer()
}

/// The Clebsch–Gordan coefficient ⟨s, m_s; l, m−m_s | j, m⟩.
///
/// Returns 0 outside the triangle and projection ranges, by convention.
pub fn clebsch_gordan(
    s: HalfInteger,
    l: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
    m_s: HalfInteger,
) -> f64 {
    if !triangle_ok(s, l, j, m) || m_s.abs() > s || (m - m_s).abs() > l {
        return 0.0;
    }
    cg_column(s, l, j, m)
        .into_iter()
        .find(|&(mu, _)| mu == m_s)
        .map(|(_, c)| c)
        .unwrap_or(0.0)
}

/// All coefficients of one coupled vector: (m_s, C_{j,m;m_s}) with m_s
/// ascending over the support max(−s, m−l) ..= min(s, m+l).
pub fn cg_column(
    s: HalfInteger,
    l: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Vec<(HalfInteger, f64)> {
    if !triangle_ok(s, l, j, m) {
        return Vec::new();
    }
    if s > l {
        // Exchange symmetry: ⟨s m_s l m_l|jm⟩ = (−1)^{s+l−j} ⟨l m_l s m_s|jm⟩.
        let phase = exchange_phase(s, l, j);
        let swapped = cg_column(l, s, j, m);
        let mut out: Vec<(HalfInteger, f64)> =
            swapped.into_iter().map(|(ml, c)| (m - ml, phase * c)).collect();
        out.sort_by_key(|&(mu, _)| mu);
        return out;
    }
    if m + l >= s {
        cg_column_anchored(s, l, j, m)
    } else {
        // Mirror symmetry: C_{j,m;μ} = (−1)^{s+l−j} C_{j,−m;−μ}.
        let phase = exchange_phase(s, l, j);
        let mut out: Vec<(HalfInteger, f64)> = cg_column_anchored(s, l, j, -m)
            .into_iter()
            .map(|(mu, c)| (-mu, phase * c))
            .collect();
        out.sort_by_key(|&(mu, _)| mu);
        out
    }
}

fn exchange_phase(s: HalfInteger, l: HalfInteger, j: HalfInteger) -> f64 {
    debug_assert!((s + l + j).is_integer());
    if ((s + l - j).twice() / 2) % 2 == 0 { 1.0 } else { -1.0 }
}

/// Three-term recursion over m_s at fixed (j, m), valid when the m_s = s
/// component exists (m + l ≥ s); its positivity anchors the sign.
fn cg_column_anchored(
    s: HalfInteger,
    l: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Vec<(HalfInteger, f64)> {
    let lo = (-s).max(m - l);
    let hi = s.min(m + l);
    debug_assert!(hi == s);
    let support: Vec<HalfInteger> = lo.range_to(hi).collect();
    let n = support.len();

    let sv = s.value();
    let lv = l.value();
    let jv = j.value();
    let mv = m.value();
    let casimir_gap =
        |mu: f64| jv * (jv + 1.0) - sv * (sv + 1.0) - lv * (lv + 1.0) - 2.0 * mu * (mv - mu);
    // Couplings to the neighboring components, from S∓L± inside J².
    let down = |mu: f64| {
        ((sv - mu + 1.0) * (sv + mu) * (lv + mv - mu + 1.0) * (lv - mv + mu)).max(0.0).sqrt()
    };
    let up = |mu: f64| {
        ((sv - mu) * (sv + mu + 1.0) * (lv - mv + mu + 1.0) * (lv + mv - mu)).max(0.0).sqrt()
    };

    // Seed at the top of the support and recurse downward.
    let mut coeff = vec![0.0_f64; n];
    coeff[n - 1] = 1.0;
    if n > 1 {
        let mu = support[n - 1].value();
        coeff[n - 2] = casimir_gap(mu) / down(mu);
    }
    for idx in (1..n.saturating_sub(1)).rev() {
        let mu = support[idx].value();
        coeff[idx - 1] = (casimir_gap(mu) * coeff[idx] - up(mu) * coeff[idx + 1]) / down(mu);
    }

    let norm = coeff.iter().map(|c| c * c).sum::<f64>().sqrt();
    let sign = if coeff[n - 1] >= 0.0 { 1.0 } else { -1.0 };
    for c in &mut coeff {
        *c *= sign / norm;
    }
    support.into_iter().zip(coeff).collect()
}

/// The coupled vector |j,m⟩ over the product basis, A-major indexing.
pub fn coupled_vector(
    s: HalfInteger,
    l: HalfInteger,
    j: HalfInteger,
    m: HalfInteger,
) -> Vec<Complex64> {
    let (dim_a, dim_b) = (s.dim(), l.dim());
    let mut v = vec![Complex64::new(0.0, 0.0); dim_a * dim_b];
    for (m_s, c) in cg_column(s, l, j, m) {
        let m_l = m - m_s;
        let ka = ((m_s + s).twice() / 2) as usize;
        let kb = ((m_l + l).twice() / 2) as usize;
        v[ka * dim_b + kb] = Complex64::new(c, 0.0);
    }
    v
}

/// The unitary change of basis between the product basis and the coupled
/// basis |j,m⟩ of a bipartite channel, with its coefficient table.
#[derive(Clone, Debug)]
pub struct CoupledBasis {
    /// Rank of subchannel A (the smaller one after any swap).
    pub s: HalfInteger,
    /// Rank of subchannel B.
    pub l: HalfInteger,
    /// True when the constructor arguments arrived larger-first and were
    /// swapped to the canonical s ≤ l order.
    pub swapped: bool,
    /// Composite dimension (2s+1)(2l+1).
    pub dim: usize,
    /// (j, m) pairs in canonical order: j descending from l+s, m ascending.
    pub labels: Vec<(HalfInteger, HalfInteger)>,
    /// Columns are coupled vectors over the product basis (A-major).
    pub unitary: ComplexMatrix,
    cg: BTreeMap<(i64, i64, i64), f64>,
}

/// Couple ranks s and l. Arguments arriving larger-first are swapped so that
/// A is always the smaller subchannel, and the swap is recorded.
pub fn coupled_basis(s: HalfInteger, l: HalfInteger) -> CoupledBasis {
    let swapped = s > l;
    let (s, l) = if swapped { (l, s) } else { (s, l) };
    let labels = coupled_labels(s, l);
    let dim = s.dim() * l.dim();
    let mut unitary = ComplexMatrix::zeros(dim, dim);
    let mut cg = BTreeMap::new();
    for (col, &(j, m)) in labels.iter().enumerate() {
        for (m_s, c) in cg_column(s, l, j, m) {
            cg.insert((j.twice(), m.twice(), m_s.twice()), c);
            let m_l = m - m_s;
            let ka = ((m_s + s).twice() / 2) as usize;
            let kb = ((m_l + l).twice() / 2) as usize;
            unitary.set(ka * l.dim() + kb, col, Complex64::new(c, 0.0));
        }
    }
    CoupledBasis { s, l, swapped, dim, labels, unitary, cg }
}

impl CoupledBasis {
    /// C_{j,m;m_s}, zero when absent.
    pub fn cg(&self, j: HalfInteger, m: HalfInteger, m_s: HalfInteger) -> f64 {
        self.cg.get(&(j.twice(), m.twice(), m_s.twice())).copied().unwrap_or(0.0)
    }

    /// Position of the label (j, m) in the canonical ordering.
    pub fn label_index(&self, j: HalfInteger, m: HalfInteger) -> Result<usize> {
        self.labels.iter().position(|&lab| lab == (j, m)).ok_or_else(|| Error::UnknownLabel {
            s: self.s.to_string(),
            l: self.l.to_string(),
            j: j.to_string(),
            m: m.to_string(),
        })
    }

    /// Nonzero coefficients of one coupled vector.
    pub fn column(&self, j: HalfInteger, m: HalfInteger) -> Vec<(HalfInteger, f64)> {
        cg_column(self.s, self.l, j, m)
    }
}

impl Serialize for CoupledBasis {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let labels: Vec<String> = self.labels.iter().map(|(j, m)| format!("{j},{m}")).collect();
        let mut st = serializer.serialize_struct("CoupledBasis", 5)?;
        st.serialize_field("s", &self.s)?;
        st.serialize_field("l", &self.l)?;
        st.serialize_field("swapped", &self.swapped)?;
        st.serialize_field("labels", &labels)?;
        st.serialize_field("unitary", &self.unitary)?;
        st.end()
    }
}

/// Ladder operators of the composite space induced by the subchannels,
/// J_a = S_a⊗I + I⊗L_a. Unlike the irreducible set of the full space, the
/// diagonal one is degenerate.
#[derive(Clone, Debug)]
pub struct InducedLadderSet {
    pub dim_a: usize,
    pub dim_b: usize,
    pub j_plus: ComplexMatrix,
    pub j_minus: ComplexMatrix,
    pub j3: ComplexMatrix,
}

/// Build the induced ladder operators for ranks (s, l).
pub fn induced_ladder(s: HalfInteger, l: HalfInteger) -> InducedLadderSet {
    let a: LadderSet = build_ladder(s.dim()).expect("dim >= 1");
    let b: LadderSet = build_ladder(l.dim()).expect("dim >= 1");
    let ia = ComplexMatrix::identity(a.dim);
    let ib = ComplexMatrix::identity(b.dim);
    InducedLadderSet {
        dim_a: a.dim,
        dim_b: b.dim,
        j_plus: a.j_plus.kron(&ib).add(&ia.kron(&b.j_plus)),
        j_minus: a.j_minus.kron(&ib).add(&ia.kron(&b.j_minus)),
        j3: a.j3.kron(&ib).add(&ia.kron(&b.j3)),
    }
}

impl InducedLadderSet {
    /// J₊J₋ + J3² − J3, the total-rank operator with eigenvalue j(j+1).
    pub fn total_rank_squared(&self) -> ComplexMatrix {
        self.j_plus.mul(&self.j_minus).add(&self.j3.mul(&self.j3)).sub(&self.j3)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn h(twice: i64) -> HalfInteger {
        HalfInteger::from_twice(twice)
    }

    /// Closed-form (Racah) coefficient, used only as an independent oracle.
    fn cg_racah(s: f64, m_s: f64, l: f64, m_l: f64, j: f64, m: f64) -> f64 {
        if (m_s + m_l - m).abs() > 1e-9 {
            return 0.0;
        }
        let fact = |x: f64| -> f64 {
            assert!(x > -0.5, "negative factorial argument {x}");
            (1..=(x.round() as u64)).map(|k| k as f64).product()
        };
        let tri = ((fact(s + l - j) * fact(s - l + j) * fact(-s + l + j)) / fact(s + l + j + 1.0))
            .sqrt();
        let pre = ((2.0 * j + 1.0)
            * fact(j + m)
            * fact(j - m)
            * fact(s - m_s)
            * fact(s + m_s)
            * fact(l - m_l)
            * fact(l + m_l))
        .sqrt();
        let k_min = (0.0_f64).max(l - j - m_s).max(s - j + m_l).round() as i64;
        let k_max = (s + l - j).min(s - m_s).min(l + m_l).round() as i64;
        let mut sum = 0.0;
        for k in k_min..=k_max {
            let kf = k as f64;
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign
                / (fact(kf)
                    * fact(s + l - j - kf)
                    * fact(s - m_s - kf)
                    * fact(l + m_l - kf)
                    * fact(j - l + m_s + kf)
                    * fact(j - s - m_l + kf));
        }
        tri * pre * sum
    }

    #[test]
    fn stretched_state_is_one() {
        assert_eq!(clebsch_gordan(h(1), h(1), h(2), h(2), h(1)), 1.0);
    }

    #[test]
    fn qubit_qutrit_values() {
        // j = 3/2 top half: √(2/3) on m_s = 1/2.
        let c = clebsch_gordan(h(1), h(2), h(3), h(1), h(1));
        assert_abs_diff_eq!(c, (2.0_f64 / 3.0).sqrt(), epsilon = 1e-14);
        // j = 1/2: (√(1/3), −√(2/3)).
        let c_up = clebsch_gordan(h(1), h(2), h(1), h(1), h(1));
        let c_dn = clebsch_gordan(h(1), h(2), h(1), h(1), h(-1));
        assert_abs_diff_eq!(c_up, (1.0_f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(c_dn, -(2.0_f64 / 3.0).sqrt(), epsilon = 1e-14);
    }

    #[test]
    fn dual_qutrit_singlet_alternates() {
        let one = HalfInteger::ONE;
        let vals: Vec<f64> = [-1_i64, 0, 1]
            .into_iter()
            .map(|ms| clebsch_gordan(one, one, HalfInteger::ZERO, HalfInteger::ZERO, h(2 * ms)))
            .collect();
        let r3 = 3.0_f64.sqrt();
        assert_abs_diff_eq!(vals[0], 1.0 / r3, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[1], -1.0 / r3, epsilon = 1e-14);
        assert_abs_diff_eq!(vals[2], 1.0 / r3, epsilon = 1e-14);
    }

    #[test]
    fn qubit_qunit_top_branch_pattern() {
        // j = l + 1/2: C on m_s = ±1/2 is √((l+1/2±m)/(2l+1)).
        for twice_l in [2_i64, 3, 5, 9] {
            let l = h(twice_l);
            let j = l + HalfInteger::HALF;
            for m in j.projections() {
                let expect_up = ((l.value() + 0.5 + m.value()) / (2.0 * l.value() + 1.0)).sqrt();
                let expect_dn = ((l.value() + 0.5 - m.value()) / (2.0 * l.value() + 1.0)).sqrt();
                let up = clebsch_gordan(HalfInteger::HALF, l, j, m, HalfInteger::HALF);
                let dn = clebsch_gordan(HalfInteger::HALF, l, j, m, -HalfInteger::HALF);
                if (m - HalfInteger::HALF).abs() <= l {
                    assert_abs_diff_eq!(up, expect_up, epsilon = 1e-13);
                }
                if (m + HalfInteger::HALF).abs() <= l {
                    assert_abs_diff_eq!(dn, expect_dn, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn triangle_violations_return_zero() {
        assert_eq!(clebsch_gordan(h(1), h(1), h(4), h(0), h(1)), 0.0);
        assert_eq!(clebsch_gordan(h(1), h(1), h(2), h(4), h(1)), 0.0);
        assert_eq!(clebsch_gordan(h(1), h(1), h(2), h(0), h(3)), 0.0);
    }

    #[test]
    fn matches_racah_closed_form_through_rank_nine_halves() {
        for ts in 0..=9_i64 {
            for tl in ts..=9 {
                let (s, l) = (h(ts), h(tl));
                for j in total_ranks(s, l) {
                    for m in j.projections() {
                        for (m_s, c) in cg_column(s, l, j, m) {
                            let oracle = cg_racah(
                                s.value(),
                                m_s.value(),
                                l.value(),
                                (m - m_s).value(),
                                j.value(),
                                m.value(),
                            );
                            assert_abs_diff_eq!(c, oracle, epsilon = 1e-10);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn exchange_order_carries_the_standard_phase() {
        // s > l inputs go through the exchange branch.
        let direct = clebsch_gordan(h(2), h(1), h(1), h(1), h(2));
        let swapped = clebsch_gordan(h(1), h(2), h(1), h(1), h(-1));
        // (−1)^{s+l−j} with s=1, l=1/2, j=1/2 → (−1)^1.
        assert_abs_diff_eq!(direct, -swapped, epsilon = 1e-14);
        let oracle = cg_racah(1.0, 1.0, 0.5, -0.5, 0.5, 0.5);
        assert_abs_diff_eq!(direct, oracle, epsilon = 1e-14);
    }

    #[test]
    fn orthogonality_both_ways() {
        for ts in 0..=9_i64 {
            for tl in ts..=9 {
                let (s, l) = (h(ts), h(tl));
                let js = total_ranks(s, l);
                // Fixed m: rows over j are orthonormal.
                for m in (s + l).projections() {
                    for &j1 in &js {
                        for &j2 in &js {
                            if m.abs() > j1 || m.abs() > j2 {
                                continue;
                            }
                            let dot: f64 = s
                                .projections()
                                .map(|ms| {
                                    clebsch_gordan(s, l, j1, m, ms)
                                        * clebsch_gordan(s, l, j2, m, ms)
                                })
                                .sum();
                            let expect = if j1 == j2 { 1.0 } else { 0.0 };
                            assert_abs_diff_eq!(dot, expect, epsilon = 1e-12);
                        }
                    }
                }
                // Fixed m: columns over m_s are orthonormal too.
                for m in (s + l).projections() {
                    for ms1 in s.projections() {
                        for ms2 in s.projections() {
                            if (m - ms1).abs() > l || (m - ms2).abs() > l {
                                continue;
                            }
                            let dot: f64 = js
                                .iter()
                                .map(|&j| {
                                    clebsch_gordan(s, l, j, m, ms1)
                                        * clebsch_gordan(s, l, j, m, ms2)
                                })
                                .sum();
                            let expect = if ms1 == ms2 { 1.0 } else { 0.0 };
                            assert_abs_diff_eq!(dot, expect, epsilon = 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn paraqubit_singlet_column() {
        let basis = coupled_basis(HalfInteger::HALF, HalfInteger::HALF);
        let col = basis.label_index(HalfInteger::ZERO, HalfInteger::ZERO).unwrap();
        // (|↑↓⟩ − |↓↑⟩)/√2 over A-major product rows ordered ↓↓, ↓↑, ↑↓, ↑↑.
        let r2 = 0.5_f64.sqrt();
        let expected = [0.0, -r2, r2, 0.0];
        for (row, &e) in expected.iter().enumerate() {
            assert_abs_diff_eq!(basis.unitary.get(row, col).re, e, epsilon = 1e-14);
        }
    }

    #[test]
    fn unitarity_across_small_ranks() {
        for ts in 0..=5_i64 {
            for tl in ts..=7 {
                let basis = coupled_basis(h(ts), h(tl));
                let residual = basis
                    .unitary
                    .mul(&basis.unitary.adjoint())
                    .sub(&ComplexMatrix::identity(basis.dim))
                    .max_abs();
                assert!(residual < 1e-12, "s={ts}/2 l={tl}/2 residual {residual}");
            }
        }
    }

    #[test]
    fn swap_is_recorded_and_canonicalized() {
        let basis = coupled_basis(h(3), h(1));
        assert!(basis.swapped);
        assert_eq!(basis.s, h(1));
        assert_eq!(basis.l, h(3));
    }

    #[test]
    fn coupled_columns_diagonalize_induced_operators() {
        for (ts, tl) in [(1_i64, 1_i64), (1, 2), (2, 2), (1, 5), (3, 5)] {
            let (s, l) = (h(ts), h(tl));
            let basis = coupled_basis(s, l);
            let ind = induced_ladder(s, l);
            let j3_coupled = basis.unitary.adjoint().mul(&ind.j3).mul(&basis.unitary);
            let jsq_coupled =
                basis.unitary.adjoint().mul(&ind.total_rank_squared()).mul(&basis.unitary);
            for (idx, &(j, m)) in basis.labels.iter().enumerate() {
                assert_abs_diff_eq!(j3_coupled.get(idx, idx).re, m.value(), epsilon = 1e-10);
                assert_abs_diff_eq!(
                    jsq_coupled.get(idx, idx).re,
                    j.value() * (j.value() + 1.0),
                    epsilon = 1e-10
                );
            }
            // Fully diagonal, not merely the right diagonal.
            for i in 0..basis.dim {
                for jj in 0..basis.dim {
                    if i != jj {
                        assert!(j3_coupled.get(i, jj).norm() < 1e-10);
                        assert!(jsq_coupled.get(i, jj).norm() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn induced_j3_eigenvalue_multiplicities() {
        // s = l = 1/2: eigenvalues {−1, 0, 0, 1}.
        let ind = induced_ladder(HalfInteger::HALF, HalfInteger::HALF);
        let mut eigs = ind.j3.hermitian_eigenvalues();
        eigs.iter_mut().for_each(|e| *e = (*e * 2.0).round() / 2.0);
        assert_eq!(eigs, vec![-1.0, 0.0, 0.0, 1.0]);
        // s = 1/2, l = 1: m = ±1/2 each appear twice, from the two product
        // pairs (±1/2, 0) and (∓1/2, ±1).
        let ind = induced_ladder(HalfInteger::HALF, HalfInteger::ONE);
        let eigs = ind.j3.hermitian_eigenvalues();
        for target in [-0.5, 0.5] {
            let count = eigs.iter().filter(|e| (*e - target).abs() < 1e-12).count();
            assert_eq!(count, 2, "multiplicity at m = {target}");
        }
        // Ladder algebra carries over to the induced set.
        let comm = ind.j_plus.commutator(&ind.j_minus).unwrap();
        assert!(comm.sub(&ind.j3.scale(2.0)).max_abs() < 1e-12);
    }

    #[test]
    fn coupled_basis_serializes_with_string_labels() {
        let basis = coupled_basis(HalfInteger::HALF, HalfInteger::ONE);
        let json = serde_json::to_value(&basis).unwrap();
        assert_eq!(json["s"], "1/2");
        assert_eq!(json["l"], "1");
        assert_eq!(json["labels"][0], "3/2,-3/2");
        assert_eq!(json["unitary"]["rows"], 6);
    }
}
