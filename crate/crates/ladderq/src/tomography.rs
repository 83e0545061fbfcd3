//! Simulated quantum tomography and linear-inversion reconstruction.
//!
//! A plan is a family of measurement settings: tilted diagonal operators for
//! one channel, or per-subchannel families plus their covariance grid for a
//! paired channel. Simulation evaluates Born probabilities per setting,
//! exactly or by seeded multinomial sampling. Reconstruction solves the
//! linear system from the recorded statistics to the traceless Hermitian
//! parameters of the density matrix by least squares, projects onto the
//! physical cone, and reports the numerical rank of the measurement map —
//! the honest measure of how much of the state the plan can actually see.
//!
//! Sampling is reproducible by construction: the generator is ChaCha8 seeded
//! with the user's 64-bit seed, and every setting draws from its own stream,
//! numbered by the setting's position in the plan, so serial and parallel
//! simulation agree bit for bit.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::spinops::{tomo_family, tomo_family_periodic, AxisMode, ObservableFamily};

/// Eigenvalues of a setting operator closer than this are one outcome.
const EIGENVALUE_GROUP_TOL: f64 = 1e-9;
/// Relative singular-value threshold for the measurement-map rank.
const RANK_TOL: f64 = 1e-10;

/// Whether a plan coordinates one channel or a pair of subchannels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    Single,
    Paired,
}

/// A tomography plan: the observable families and their setting list.
#[derive(Clone, Debug)]
pub struct TomographyPlan {
    pub kind: PlanKind,
    pub axis_mode: AxisMode,
    /// The single-channel family, or subchannel A's family for paired plans.
    pub family_a: ObservableFamily,
    /// Subchannel B's family (paired plans only).
    pub family_b: Option<ObservableFamily>,
}

/// Single-channel plan on the φ_m = mπ/(N+1) angle grid.
pub fn single_plan(dim: usize, axis_mode: AxisMode) -> Result<TomographyPlan> {
    Ok(TomographyPlan {
        kind: PlanKind::Single,
        axis_mode,
        family_a: tomo_family(dim, axis_mode)?,
        family_b: None,
    })
}

/// Single-channel plan on the periodic φ_m = 2πm/N grid.
pub fn single_plan_periodic(dim: usize, axis_mode: AxisMode) -> Result<TomographyPlan> {
    Ok(TomographyPlan {
        kind: PlanKind::Single,
        axis_mode,
        family_a: tomo_family_periodic(dim, axis_mode)?,
        family_b: None,
    })
}

/// Paired plan: per-subchannel families on the φ_m = mπ/(N+1) grids plus
/// the full covariance grid of setting pairs.
pub fn paired_plan(dim_a: usize, dim_b: usize, axis_mode: AxisMode) -> Result<TomographyPlan> {
    Ok(TomographyPlan {
        kind: PlanKind::Paired,
        axis_mode,
        family_a: tomo_family(dim_a, axis_mode)?,
        family_b: Some(tomo_family(dim_b, axis_mode)?),
    })
}

/// Paired plan on the periodic φ_m = 2πm/N factor grids.
///
/// Kept for comparison with [`paired_plan`]: the periodic grid repeats its
/// endpoint and contains settings with sin φ = 0, so it is degenerate at
/// N = 2 (every setting parallel to J3). The completeness rank diagnostic
/// makes the difference visible.
pub fn paired_plan_periodic(
    dim_a: usize,
    dim_b: usize,
    axis_mode: AxisMode,
) -> Result<TomographyPlan> {
    Ok(TomographyPlan {
        kind: PlanKind::Paired,
        axis_mode,
        family_a: tomo_family_periodic(dim_a, axis_mode)?,
        family_b: Some(tomo_family_periodic(dim_b, axis_mode)?),
    })
}

/// Which part of a paired channel a record addresses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    /// The whole channel (single plans).
    Full,
    /// Marginal measurement of subchannel A.
    A,
    /// Marginal measurement of subchannel B.
    B,
    /// Joint measurement of a setting pair.
    Pair,
}

/// One measurement setting resolved against a plan.
#[derive(Clone, Debug)]
pub struct Setting {
    pub channel: Channel,
    /// Family indices: `[m]`, or `[m, n]` for pairs with m indexing the
    /// larger subchannel's family and n the smaller one's.
    pub indices: Vec<usize>,
    /// The measured observable on the full space.
    pub observable: ComplexMatrix,
    /// Outcomes as (eigenvalue, projector) groups, ascending eigenvalue.
    /// For pair settings the outcomes are A-major products of the factor
    /// outcomes and the eigenvalue is their product.
    pub outcomes: Vec<(f64, ComplexMatrix)>,
    /// Factor eigenvalue lists (A, B) for pair settings, in the A-major
    /// order of `outcomes`.
    pub factor_eigenvalues: Option<(Vec<f64>, Vec<f64>)>,
}

/// Group the eigendecomposition of a Hermitian observable into outcomes,
/// merging eigenvalues within 1e−9 so degenerate settings keep well-defined
/// projectors.
pub fn eigenvalue_outcomes(obs: &ComplexMatrix) -> Vec<(f64, ComplexMatrix)> {
    let n = obs.rows();
    let (vals, vecs) = obs.hermitian_eigen();
    let mut groups: Vec<(f64, ComplexMatrix)> = Vec::new();
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && (vals[end] - vals[end - 1]).abs() <= EIGENVALUE_GROUP_TOL {
            end += 1;
        }
        let mut projector = ComplexMatrix::zeros(n, n);
        for k in start..end {
            for i in 0..n {
                for j in 0..n {
                    let add = vecs.get(i, k) * vecs.get(j, k).conj();
                    projector.set(i, j, projector.get(i, j) + add);
                }
            }
        }
        let mean = vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        groups.push((mean, projector));
        start = end;
    }
    groups
}

/// All settings of a plan, in the canonical order used for record streams:
/// single family in order; for paired plans A marginals, then B marginals,
/// then the (m, n) covariance grid, m-major.
pub fn plan_settings(plan: &TomographyPlan) -> Vec<Setting> {
    match plan.kind {
        PlanKind::Single => plan
            .family_a
            .members
            .iter()
            .enumerate()
            .map(|(idx, obs)| Setting {
                channel: Channel::Full,
                indices: vec![idx],
                observable: obs.clone(),
                outcomes: eigenvalue_outcomes(obs),
                factor_eigenvalues: None,
            })
            .collect(),
        PlanKind::Paired => {
            let fam_a = &plan.family_a;
            let fam_b = plan.family_b.as_ref().expect("paired plan carries family_b");
            let dim_a = fam_a.dim;
            let dim_b = fam_b.dim;
            let ia = ComplexMatrix::identity(dim_a);
            let ib = ComplexMatrix::identity(dim_b);
            let mut settings = Vec::new();
            for (n, a) in fam_a.members.iter().enumerate() {
                let obs = a.kron(&ib);
                let outcomes = eigenvalue_outcomes(a)
                    .into_iter()
                    .map(|(v, p)| (v, p.kron(&ib)))
                    .collect();
                settings.push(Setting {
                    channel: Channel::A,
                    indices: vec![n],
                    observable: obs,
                    outcomes,
                    factor_eigenvalues: None,
                });
            }
            for (m, b) in fam_b.members.iter().enumerate() {
                let obs = ia.kron(b);
                let outcomes = eigenvalue_outcomes(b)
                    .into_iter()
                    .map(|(v, p)| (v, ia.kron(&p)))
                    .collect();
                settings.push(Setting {
                    channel: Channel::B,
                    indices: vec![m],
                    observable: obs,
                    outcomes,
                    factor_eigenvalues: None,
                });
            }
            for (m, b) in fam_b.members.iter().enumerate() {
                let b_outcomes = eigenvalue_outcomes(b);
                for (n, a) in fam_a.members.iter().enumerate() {
                    let a_outcomes = eigenvalue_outcomes(a);
                    let mut outcomes = Vec::with_capacity(a_outcomes.len() * b_outcomes.len());
                    for (va, pa) in &a_outcomes {
                        for (vb, pb) in &b_outcomes {
                            outcomes.push((va * vb, pa.kron(pb)));
                        }
                    }
                    settings.push(Setting {
                        channel: Channel::Pair,
                        indices: vec![m, n],
                        observable: a.kron(b),
                        outcomes,
                        factor_eigenvalues: Some((
                            a_outcomes.iter().map(|(v, _)| *v).collect(),
                            b_outcomes.iter().map(|(v, _)| *v).collect(),
                        )),
                    });
                }
            }
            settings
        }
    }
}

/// Total space dimension a plan addresses.
pub fn plan_dim(plan: &TomographyPlan) -> usize {
    match plan.kind {
        PlanKind::Single => plan.family_a.dim,
        PlanKind::Paired => {
            plan.family_a.dim * plan.family_b.as_ref().expect("paired plan").dim
        }
    }
}

/// Exact or sampled statistics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Sampled { shots: u64, seed: u64 },
}

/// The statistics recorded for one setting.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub setting: Vec<usize>,
    #[serde(default = "default_channel", skip_serializing_if = "is_full")]
    pub channel: Channel,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shots: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Outcome frequencies over the setting's eigenvalue groups (A-major
    /// joint outcomes for pair settings).
    pub freqs: Vec<f64>,
}

fn default_channel() -> Channel {
    Channel::Full
}

#[allow(clippy::trivially_copy_pass_by_ref)]
fn is_full(c: &Channel) -> bool {
    *c == Channel::Full
}

impl MeasurementRecord {
    /// Expectation value of the setting observable under these frequencies.
    pub fn expectation(&self, setting: &Setting) -> f64 {
        setting.outcomes.iter().zip(&self.freqs).map(|((v, _), f)| v * f).sum()
    }
}

fn born_probabilities(rho: &ComplexMatrix, setting: &Setting) -> Vec<f64> {
    setting.outcomes.iter().map(|(_, p)| rho.mul(p).trace().re.max(0.0)).collect()
}

fn sample_frequencies(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let total: f64 = probs.iter().sum();
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let mut x: f64 = rng.gen::<f64>() * total;
        let mut outcome = probs.len() - 1;
        for (i, &p) in probs.iter().enumerate() {
            if x < p {
                outcome = i;
                break;
            }
            x -= p;
        }
        counts[outcome] += 1;
    }
    counts.into_iter().map(|c| c as f64 / shots as f64).collect()
}

/// Measure a density matrix under every setting of a plan.
///
/// Exact mode records Born probabilities; sampled mode draws multinomial
/// counts, with the stream for setting k derived as ChaCha8(seed, stream=k).
pub fn simulate(
    rho: &ComplexMatrix,
    plan: &TomographyPlan,
    mode: Mode,
) -> Result<Vec<MeasurementRecord>> {
    let dim = plan_dim(plan);
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::ShapeMismatch {
            expected: format!("{dim}x{dim}"),
            got: format!("{}x{}", rho.rows(), rho.cols()),
        });
    }
    if let Mode::Sampled { shots, .. } = mode {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
    }
    let settings = plan_settings(plan);
    let mut records = Vec::with_capacity(settings.len());
    for (stream, setting) in settings.iter().enumerate() {
        let probs = born_probabilities(rho, setting);
        let (mode_str, shots_field, seed_field, freqs) = match mode {
            Mode::Exact => ("exact", None, None, probs),
            Mode::Sampled { shots, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(stream as u64);
                ("sampled", Some(shots), Some(seed), sample_frequencies(&probs, shots, &mut rng))
            }
        };
        records.push(MeasurementRecord {
            setting: setting.indices.clone(),
            channel: setting.channel,
            mode: mode_str.to_string(),
            shots: shots_field,
            seed: seed_field,
            freqs,
        });
    }
    Ok(records)
}

/// One entry of the covariance matrix between subchannel settings:
/// Q_{m,n} = ⟨B_m ⊗ A_n⟩ − ⟨B_m⟩⟨A_n⟩, with m indexing the larger
/// subchannel's family and n the smaller one's.
pub fn covariance_entry(
    rho: &ComplexMatrix,
    plan: &TomographyPlan,
    m: usize,
    n: usize,
) -> Result<f64> {
    if plan.kind != PlanKind::Paired {
        return Err(Error::IncompleteRecords("covariance requires a paired plan".into()));
    }
    let fam_a = &plan.family_a;
    let fam_b = plan.family_b.as_ref().expect("paired plan");
    if m >= fam_b.members.len() || n >= fam_a.members.len() {
        return Err(Error::IncompleteRecords(format!("covariance index ({m},{n}) out of range")));
    }
    let a = &fam_a.members[n];
    let b = &fam_b.members[m];
    let ia = ComplexMatrix::identity(fam_a.dim);
    let ib = ComplexMatrix::identity(fam_b.dim);
    let joint = rho.mul(&a.kron(b)).trace().re;
    let mean_a = rho.mul(&a.kron(&ib)).trace().re;
    let mean_b = rho.mul(&ia.kron(b)).trace().re;
    Ok(joint - mean_a * mean_b)
}

/// Orthonormal traceless Hermitian basis of the N-dimensional operator
/// space: symmetric and antisymmetric pair matrices plus the diagonal tower
/// (N² − 1 matrices).
pub fn traceless_hermitian_basis(n: usize) -> Vec<ComplexMatrix> {
    let mut basis = Vec::with_capacity(n * n - 1);
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut sym = ComplexMatrix::zeros(n, n);
            sym.set(i, j, Complex64::new(inv_sqrt2, 0.0));
            sym.set(j, i, Complex64::new(inv_sqrt2, 0.0));
            basis.push(sym);
            let mut asym = ComplexMatrix::zeros(n, n);
            asym.set(i, j, Complex64::new(0.0, -inv_sqrt2));
            asym.set(j, i, Complex64::new(0.0, inv_sqrt2));
            basis.push(asym);
        }
    }
    for k in 1..n {
        let mut diag = ComplexMatrix::zeros(n, n);
        let w = 1.0 / ((k * (k + 1)) as f64).sqrt();
        for i in 0..k {
            diag.set(i, i, Complex64::new(w, 0.0));
        }
        diag.set(k, k, Complex64::new(-(k as f64) * w, 0.0));
        basis.push(diag);
    }
    basis
}

/// Result of a linear-inversion reconstruction.
#[derive(Clone, Debug, Serialize)]
pub struct ReconstructionResult {
    pub rho_hat: ComplexMatrix,
    /// ℓ² residual of the least-squares system.
    pub residual_norm: f64,
    /// Numerical rank of the measurement map.
    pub map_rank: usize,
    /// Whether the map resolves all N²−1 parameters.
    pub complete: bool,
    /// Trace distance to the true state, when the caller knows it.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_distance_to_truth: Option<f64>,
}

/// Trace distance, ½‖a − b‖₁.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.sub(b).hermitian_eigenvalues().iter().map(|e| e.abs()).sum::<f64>() / 2.0
}

/// One linear constraint tr(ρ·op) = value.
struct Row(ComplexMatrix, f64);

fn solve_rows(dim: usize, rows: &[Row]) -> ReconstructionResult {
    let basis = traceless_hermitian_basis(dim);
    let params = basis.len();
    let mut system = DMatrix::<f64>::zeros(rows.len(), params);
    let mut rhs = DVector::<f64>::zeros(rows.len());
    for (r, Row(op, value)) in rows.iter().enumerate() {
        for (c, g) in basis.iter().enumerate() {
            system[(r, c)] = op.mul(g).trace().re;
        }
        rhs[r] = value - op.trace().re / dim as f64;
    }

    let svd = system.clone().svd(true, true);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let map_rank = svd.singular_values.iter().filter(|&&s| s > RANK_TOL * sigma_max).count();
    let solution = svd
        .solve(&rhs, RANK_TOL * sigma_max.max(f64::MIN_POSITIVE))
        .expect("svd solve with computed u/v");
    let residual_norm = (&system * &solution - &rhs).norm();

    let mut rho_hat = ComplexMatrix::identity(dim).scale(1.0 / dim as f64);
    for (c, g) in basis.iter().enumerate() {
        rho_hat = rho_hat.add(&g.scale(solution[c]));
    }
    // Project onto the physical cone: clip negative eigenvalues, renormalize.
    let (vals, vecs) = rho_hat.hermitian_eigen();
    let clipped: Vec<f64> = vals.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let normalized: Vec<f64> =
        if total > 0.0 { clipped.iter().map(|v| v / total).collect() } else { clipped };
    let rho_hat =
        vecs.mul(&ComplexMatrix::from_real_diagonal(&normalized)).mul(&vecs.adjoint());

    ReconstructionResult {
        rho_hat,
        residual_norm,
        map_rank,
        complete: map_rank == params,
        trace_distance_to_truth: None,
    }
}

fn find_record<'a>(
    records: &'a [MeasurementRecord],
    channel: Channel,
    indices: &[usize],
) -> Result<&'a MeasurementRecord> {
    records.iter().find(|r| r.channel == channel && r.setting == indices).ok_or_else(|| {
        Error::IncompleteRecords(format!("no record for {channel:?} setting {indices:?}"))
    })
}

fn rows_for_records(
    plan: &TomographyPlan,
    records: &[MeasurementRecord],
) -> Result<Vec<Row>> {
    let mut rows = Vec::new();
    for setting in plan_settings(plan) {
        let record = find_record(records, setting.channel, &setting.indices)?;
        if record.freqs.len() != setting.outcomes.len() {
            return Err(Error::IncompleteRecords(format!(
                "record for {:?} setting {:?} has {} outcomes, plan expects {}",
                setting.channel,
                setting.indices,
                record.freqs.len(),
                setting.outcomes.len()
            )));
        }
        match setting.channel {
            Channel::Full | Channel::A | Channel::B => {
                for ((_, projector), &f) in setting.outcomes.iter().zip(&record.freqs) {
                    rows.push(Row(projector.clone(), f));
                }
            }
            Channel::Pair => {
                // The joint distribution of the pair, outcome by outcome.
                // The scalar covariance entry alone would not do: the
                // setting operators are linear in the spin generators, so
                // product expectations span at most 9 covariance directions
                // regardless of dimension, while the joint projector
                // products span them all.
                for ((_, projector), &f) in setting.outcomes.iter().zip(&record.freqs) {
                    rows.push(Row(projector.clone(), f));
                }
            }
        }
    }
    Ok(rows)
}

/// Covariance entry Q_{m,n} estimated from a pair record's joint
/// frequencies: ⟨A⊗B⟩ − ⟨A⟩⟨B⟩ with the marginals taken from the same
/// joint distribution.
pub fn covariance_from_record(record: &MeasurementRecord, setting: &Setting) -> Result<f64> {
    let (va, vb) = setting
        .factor_eigenvalues
        .as_ref()
        .filter(|_| setting.channel == Channel::Pair && record.channel == Channel::Pair)
        .ok_or_else(|| Error::IncompleteRecords("covariance needs a pair record".into()))?;
    if record.freqs.len() != va.len() * vb.len() {
        return Err(Error::IncompleteRecords("record does not match the setting".into()));
    }
    let mut joint = 0.0;
    let mut mean_a = 0.0;
    let mut mean_b = 0.0;
    for (ia, &a) in va.iter().enumerate() {
        for (ib, &b) in vb.iter().enumerate() {
            let f = record.freqs[ia * vb.len() + ib];
            joint += a * b * f;
            mean_a += a * f;
            mean_b += b * f;
        }
    }
    Ok(joint - mean_a * mean_b)
}

/// Reconstruct a density matrix from records covering every plan setting.
///
/// Least squares over the traceless Hermitian parameters followed by
/// projection onto the physical cone. The map rank is reported; a plan that
/// cannot see all parameters yields `complete == false`, with the unseen
/// sector left at the minimum-norm (maximally mixed) values.
pub fn reconstruct(
    records: &[MeasurementRecord],
    plan: &TomographyPlan,
) -> Result<ReconstructionResult> {
    let rows = rows_for_records(plan, records)?;
    Ok(solve_rows(plan_dim(plan), &rows))
}

/// Paired reconstruction from explicitly separated record groups: subchannel
/// marginals plus the covariance grid.
pub fn paired_reconstruct(
    marginal_records_a: &[MeasurementRecord],
    marginal_records_b: &[MeasurementRecord],
    covariance_records: &[MeasurementRecord],
    plan: &TomographyPlan,
) -> Result<ReconstructionResult> {
    if plan.kind != PlanKind::Paired {
        return Err(Error::IncompleteRecords("paired reconstruction needs a paired plan".into()));
    }
    let mut all = Vec::new();
    all.extend_from_slice(marginal_records_a);
    all.extend_from_slice(marginal_records_b);
    all.extend_from_slice(covariance_records);
    reconstruct(&all, plan)
}

/// Split simulated paired records into (A marginals, B marginals, pairs).
pub fn split_records(
    records: &[MeasurementRecord],
) -> (Vec<MeasurementRecord>, Vec<MeasurementRecord>, Vec<MeasurementRecord>) {
    let mut a = Vec::new();
    let mut b = Vec::new();
    let mut pairs = Vec::new();
    for r in records {
        match r.channel {
            Channel::A => a.push(r.clone()),
            Channel::B => b.push(r.clone()),
            Channel::Pair => pairs.push(r.clone()),
            Channel::Full => {}
        }
    }
    (a, b, pairs)
}

/// Rank of the full measurement map of a plan, independent of any state.
pub fn completeness_rank(plan: &TomographyPlan) -> usize {
    let dim = plan_dim(plan);
    let mut rows = Vec::new();
    for setting in plan_settings(plan) {
        for (_, projector) in &setting.outcomes {
            rows.push(projector.clone());
        }
    }
    let basis = traceless_hermitian_basis(dim);
    let mut system = DMatrix::<f64>::zeros(rows.len(), basis.len());
    for (r, op) in rows.iter().enumerate() {
        for (c, g) in basis.iter().enumerate() {
            system[(r, c)] = op.mul(g).trace().re;
        }
    }
    let svd = system.svd(false, false);
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.singular_values.iter().filter(|&&s| s > RANK_TOL * sigma_max).count()
}

/// Serialize records as JSON lines, one record per line.
pub fn records_to_jsonl(records: &[MeasurementRecord]) -> Result<String> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r)?);
        out.push('\n');
    }
    Ok(out)
}

/// Parse records from JSON lines.
pub fn records_from_jsonl(text: &str) -> Result<Vec<MeasurementRecord>> {
    text.lines()
        .filter(|line| !line.trim().is_empty())
        .map(|line| serde_json::from_str(line).map_err(Error::from))
        .collect()
}
