//! Command implementations behind the `ladderq` binary.
//!
//! Every command is a pure function from typed arguments to a
//! [`CommandOutput`]: an exit code, the text for standard output, and the
//! files to write. The binary performs the IO; tests can call the commands
//! directly. All output is deterministic for a fixed argument list: maps are
//! ordered, floats print through serde_json or the fixed 12-significant-digit
//! CSV formatter, and sampling is seeded.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::coupling::{coupled_basis, coupled_labels};
use crate::entropy::{
    binary_entropy, entanglement_entropy, entropy_report, holevo_chi, shannon,
    two_qubit_entropy_closed_form, von_neumann,
};
use crate::error::{Error, Result};
use crate::halfint::HalfInteger;
use crate::spinops::{build_ladder, AxisMode};
use crate::states::{
    coupled_diagonal_state, matrix_state, maximally_mixed, pure_coupled_state, reduce_a, reduce_b,
    two_qubit_state, ChannelState, Label, TwoQubitParams,
};
use crate::tomography::{
    completeness_rank, paired_plan, plan_dim, reconstruct, records_from_jsonl, records_to_jsonl,
    simulate, single_plan, trace_distance, Mode, TomographyPlan,
};
use crate::witness::{
    dual_degeneracy_check, ppt_check, ppt_decisive, witness_report, PptVerdict, Verdict,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_ENTANGLED: u8 = 3;
pub const EXIT_INCOMPLETE: u8 = 4;

/// What a command produced: exit code, stdout text, files to write.
#[derive(Debug, Default)]
pub struct CommandOutput {
    pub exit_code: u8,
    pub stdout: String,
    pub files: Vec<(PathBuf, String)>,
}

impl CommandOutput {
    fn ok(stdout: String) -> Self {
        Self { exit_code: EXIT_OK, stdout, files: Vec::new() }
    }

    fn with_file(mut self, path: PathBuf, content: String) -> Self {
        self.files.push((path, content));
        self
    }

    /// Write the files and print stdout.
    pub fn emit(&self) -> Result<()> {
        for (path, content) in &self.files {
            if let Some(parent) = path.parent() {
                if !parent.as_os_str().is_empty() {
                    std::fs::create_dir_all(parent)?;
                }
            }
            std::fs::write(path, content)?;
        }
        if !self.stdout.is_empty() {
            print!("{}", self.stdout);
        }
        Ok(())
    }
}

/// Output rendering for report commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// 12 significant digits, '.' decimal, locale-free: the CSV number format.
pub fn fmt12(x: f64) -> String {
    format!("{x:.11e}")
}

fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

fn label_string((j, m): &Label) -> String {
    format!("{j},{m}")
}

/// `ladder`: build and serialize the ladder operators for one dimension.
pub fn cmd_ladder(dim: usize, out: Option<&Path>) -> Result<CommandOutput> {
    let ladder = build_ladder(dim)?;
    let report = json!({
        "schema": "1",
        "dim": ladder.dim,
        "rank": ladder.rank,
        "j_plus": ladder.j_plus,
        "j_minus": ladder.j_minus,
        "j3": ladder.j3,
    });
    let text = to_json_pretty(&report)?;
    Ok(match out {
        Some(dir) => CommandOutput::ok(format!("ladder: dim {dim} written\n"))
            .with_file(dir.join("ladder.json"), text),
        None => CommandOutput::ok(text),
    })
}

/// `couple`: the coupled basis of ranks (s, l).
pub fn cmd_couple(s: HalfInteger, l: HalfInteger, out: Option<&Path>) -> Result<CommandOutput> {
    let basis = coupled_basis(s, l);
    let mut value = serde_json::to_value(&basis)?;
    value
        .as_object_mut()
        .expect("object")
        .insert("schema".into(), serde_json::Value::String("1".into()));
    let text = to_json_pretty(&value)?;
    Ok(match out {
        Some(dir) => CommandOutput::ok(format!(
            "couple: s={s} l={l}, {} labels written\n",
            basis.labels.len()
        ))
        .with_file(dir.join("couple.json"), text),
        None => CommandOutput::ok(text),
    })
}

/// How `state` builds its output.
#[derive(Clone, Debug)]
pub enum StateSpec {
    Pure { j: HalfInteger, m: HalfInteger },
    Uniform,
    Spectrum(Vec<(HalfInteger, HalfInteger, f64)>),
    TwoQubit { d: f64, r: f64, q: f64 },
}

/// `state`: construct a state file.
pub fn cmd_state(
    s: HalfInteger,
    l: HalfInteger,
    spec: StateSpec,
    out: Option<&Path>,
) -> Result<CommandOutput> {
    let state = match spec {
        StateSpec::Pure { j, m } => pure_coupled_state(s, l, j, m)?,
        StateSpec::Uniform => maximally_mixed(s, l),
        StateSpec::Spectrum(entries) => {
            let mut p = BTreeMap::new();
            for (j, m, w) in entries {
                p.insert((j, m), w);
            }
            coupled_diagonal_state(s, l, p)?
        }
        StateSpec::TwoQubit { d, r, q } => {
            if (s, l) != (HalfInteger::HALF, HalfInteger::HALF) {
                return Err(Error::Parse(
                    "the two-qubit family needs s = 1/2 and l = 1/2".into(),
                ));
            }
            two_qubit_state(TwoQubitParams::new(d, r, q)?)?
        }
    };
    let text = to_json_pretty(&state)?;
    Ok(match out {
        Some(path) => CommandOutput::ok(format!("state: written to {}\n", path.display()))
            .with_file(path.to_path_buf(), text),
        None => CommandOutput::ok(text),
    })
}

fn load_state(path: &Path) -> Result<ChannelState> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// `entropy`: the entropy summary of a state file.
pub fn cmd_entropy(state_file: &Path, format: Format, out: Option<&Path>) -> Result<CommandOutput> {
    let state = load_state(state_file)?;
    let report = entropy_report(&state);
    let (text, file_name) = match format {
        Format::Json => {
            let mut value = serde_json::to_value(&report)?;
            value
                .as_object_mut()
                .expect("object")
                .insert("schema".into(), serde_json::Value::String("1".into()));
            (to_json_pretty(&value)?, "entropy.json")
        }
        Format::Csv => {
            let mut text = String::from("s_total,s_a,s_b,chi\n");
            let chi = report.holevo.as_ref().map(|h| h.chi).unwrap_or(f64::NAN);
            text.push_str(&format!(
                "{},{},{},{}\n",
                fmt12(report.s_total),
                fmt12(report.s_a),
                fmt12(report.s_b),
                fmt12(chi)
            ));
            (text, "entropy.csv")
        }
        Format::Table => {
            let mut text = String::new();
            text.push_str(&format!("{:<24}{:>18.12}\n", "S_total [bits]", report.s_total));
            text.push_str(&format!("{:<24}{:>18.12}\n", "S_A [bits]", report.s_a));
            text.push_str(&format!("{:<24}{:>18.12}\n", "S_B [bits]", report.s_b));
            if let Some(h) = &report.holevo {
                text.push_str(&format!("{:<24}{:>18.12}\n", "chi [bits]", h.chi));
            }
            for (label, value) in &report.per_label_entanglement {
                text.push_str(&format!(
                    "{:<24}{:>18.12}\n",
                    format!("S({})", label_string(label)),
                    value
                ));
            }
            (text, "entropy.txt")
        }
    };
    Ok(match out {
        Some(dir) => CommandOutput::ok(String::new()).with_file(dir.join(file_name), text),
        None => CommandOutput::ok(text),
    })
}

fn witness_table(report: &crate::witness::WitnessReport) -> String {
    let mut text = String::new();
    text.push_str(&format!("{:>8}  {:>18}\n", "m", "q_m"));
    for (m, v) in &report.q_m {
        text.push_str(&format!("{:>8}  {:>18.12}\n", m.to_string(), v));
    }
    text.push('\n');
    text.push_str(&format!("{:>8}  {:>18}  {:>18}\n", "mu", "p_mu", "dp_mu"));
    for (mu, p) in &report.p_mu {
        text.push_str(&format!(
            "{:>8}  {:>18.12}  {:>18.12}\n",
            mu.to_string(),
            p,
            report.dp_mu[mu]
        ));
    }
    text.push('\n');
    text.push_str(&format!("qubit polarization q = {:.12}\n", report.polarization.oracle));
    text.push_str(&format!("verdict: {:?}, ppt: {:?}\n", report.entangled_verdict, report.ppt_verdict));
    text
}

/// `witness`: indicator report; exit 3 flags entanglement.
pub fn cmd_witness(state_file: &Path, out: Option<&Path>) -> Result<CommandOutput> {
    let state = load_state(state_file)?;
    if state.s() == HalfInteger::HALF {
        let report = witness_report(&state)?;
        let mut value = serde_json::to_value(&report)?;
        value
            .as_object_mut()
            .expect("object")
            .insert("schema".into(), serde_json::Value::String("1".into()));
        let json_text = to_json_pretty(&value)?;
        let table = witness_table(&report);
        let exit = if report.entangled_verdict == Verdict::Entangled {
            EXIT_ENTANGLED
        } else {
            EXIT_OK
        };
        let mut output = CommandOutput { exit_code: exit, stdout: table, files: Vec::new() };
        if let Some(dir) = out {
            output = output.with_file(dir.join("witness.json"), json_text);
        } else {
            output.stdout.push('\n');
            output.stdout.push_str(&json_text);
        }
        Ok(output)
    } else if state.s() == state.l() {
        let degeneracy = dual_degeneracy_check(&state)?;
        let ppt = ppt_check(&state);
        let verdict = match (degeneracy, ppt) {
            (Verdict::Separable, _) => Verdict::Separable,
            (_, PptVerdict::PptFail) => Verdict::Entangled,
            (_, _) if ppt_decisive(state.dim_a(), state.dim_b()) => Verdict::Separable,
            _ => Verdict::Undetermined,
        };
        let value = json!({
            "schema": "1",
            "kind": "dual_degeneracy",
            "degeneracy_verdict": degeneracy,
            "ppt_verdict": ppt,
            "verdict": verdict,
        });
        let json_text = to_json_pretty(&value)?;
        let table = format!(
            "dual channel s = l = {}\ndegeneracy indicator: {:?}\nppt: {:?}\nverdict: {:?}\n",
            state.s(),
            degeneracy,
            ppt,
            verdict
        );
        let exit = if verdict == Verdict::Entangled { EXIT_ENTANGLED } else { EXIT_OK };
        let mut output = CommandOutput { exit_code: exit, stdout: table, files: Vec::new() };
        if let Some(dir) = out {
            output = output.with_file(dir.join("witness.json"), json_text);
        } else {
            output.stdout.push('\n');
            output.stdout.push_str(&json_text);
        }
        Ok(output)
    } else {
        Err(Error::Parse(format!(
            "witness rules need s = 1/2 (qubit) or s = l (dual channel); got s = {}, l = {}",
            state.s(),
            state.l()
        )))
    }
}

/// Plan selection flags shared by the tomo commands.
#[derive(Clone, Copy, Debug)]
pub struct PlanFlags {
    pub axis_mode: AxisMode,
    pub paired: bool,
}

fn plan_for_state(state: &ChannelState, flags: PlanFlags) -> Result<TomographyPlan> {
    if flags.paired {
        paired_plan(state.dim_a(), state.dim_b(), flags.axis_mode)
    } else {
        single_plan(state.dim(), flags.axis_mode)
    }
}

fn mode_from_flags(shots: Option<u64>, seed: Option<u64>) -> Result<Mode> {
    match (shots, seed) {
        (None, _) => Ok(Mode::Exact),
        (Some(shots), Some(seed)) => Ok(Mode::Sampled { shots, seed }),
        (Some(_), None) => Err(Error::Parse("--shots requires --seed".into())),
    }
}

/// `tomo simulate`: measure a state file under a plan, records as JSON lines.
pub fn cmd_tomo_simulate(
    state_file: &Path,
    flags: PlanFlags,
    shots: Option<u64>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<CommandOutput> {
    let state = load_state(state_file)?;
    let plan = plan_for_state(&state, flags)?;
    let mode = mode_from_flags(shots, seed)?;
    let records = simulate(&state.to_matrix(), &plan, mode)?;
    let text = records_to_jsonl(&records)?;
    Ok(match out {
        Some(path) => CommandOutput::ok(format!("tomo: {} records written\n", records.len()))
            .with_file(path.to_path_buf(), text),
        None => CommandOutput::ok(text),
    })
}

fn reconstruction_json(
    state_s: HalfInteger,
    state_l: HalfInteger,
    result: &crate::tomography::ReconstructionResult,
    dim: usize,
) -> Result<String> {
    // The reconstructed matrix may carry eigenvalue-zero noise; wrap it as a
    // matrix-form state file plus a diagnostics block.
    let state = matrix_state(state_s, state_l, result.rho_hat.clone())?;
    let value = json!({
        "schema": "1",
        "state": state,
        "diagnostics": {
            "map_rank": result.map_rank,
            "parameters": dim * dim - 1,
            "complete": result.complete,
            "residual_norm": result.residual_norm,
            "trace_distance_to_truth": result.trace_distance_to_truth,
        },
    });
    to_json_pretty(&value)
}

fn incomplete_warning(result: &crate::tomography::ReconstructionResult, dim: usize) -> String {
    format!("INCOMPLETE (rank {}/{})\n", result.map_rank, dim * dim - 1)
}

/// `tomo reconstruct`: rebuild a state from records.
pub fn cmd_tomo_reconstruct(
    records_file: &Path,
    truth_file: Option<&Path>,
    s: HalfInteger,
    l: HalfInteger,
    flags: PlanFlags,
    out: Option<&Path>,
) -> Result<CommandOutput> {
    let records = records_from_jsonl(&std::fs::read_to_string(records_file)?)?;
    let plan = if flags.paired {
        paired_plan(s.dim(), l.dim(), flags.axis_mode)?
    } else {
        single_plan(s.dim() * l.dim(), flags.axis_mode)?
    };
    let dim = plan_dim(&plan);
    let mut result = reconstruct(&records, &plan)?;
    if let Some(truth) = truth_file {
        let truth = load_state(truth)?;
        result.trace_distance_to_truth = Some(trace_distance(&result.rho_hat, &truth.to_matrix()));
    }
    let text = reconstruction_json(s, l, &result, dim)?;
    let mut stdout = String::new();
    if !result.complete {
        stdout.push_str(&incomplete_warning(&result, dim));
    }
    if let Some(d) = result.trace_distance_to_truth {
        stdout.push_str(&format!("trace distance to truth: {d:.3e}\n"));
    }
    let exit = if result.complete { EXIT_OK } else { EXIT_INCOMPLETE };
    let mut output = CommandOutput { exit_code: exit, stdout, files: Vec::new() };
    match out {
        Some(path) => output = output.with_file(path.to_path_buf(), text),
        None => output.stdout.push_str(&text),
    }
    Ok(output)
}

/// `tomo roundtrip`: simulate and reconstruct in one run, reporting the
/// trace distance to the input state.
pub fn cmd_tomo_roundtrip(
    state_file: &Path,
    flags: PlanFlags,
    shots: Option<u64>,
    seed: Option<u64>,
    out: Option<&Path>,
) -> Result<CommandOutput> {
    let state = load_state(state_file)?;
    let plan = plan_for_state(&state, flags)?;
    let dim = plan_dim(&plan);
    let mode = mode_from_flags(shots, seed)?;
    let truth = state.to_matrix();
    let records = simulate(&truth, &plan, mode)?;
    let mut result = reconstruct(&records, &plan)?;
    result.trace_distance_to_truth = Some(trace_distance(&result.rho_hat, &truth));
    let records_text = records_to_jsonl(&records)?;
    let json_text = reconstruction_json(state.s(), state.l(), &result, dim)?;

    let mut stdout = String::new();
    if !result.complete {
        stdout.push_str(&incomplete_warning(&result, dim));
    }
    stdout.push_str(&format!(
        "map rank {}/{}; trace distance to truth: {:.3e}\n",
        result.map_rank,
        dim * dim - 1,
        result.trace_distance_to_truth.expect("set above")
    ));
    let exit = if result.complete { EXIT_OK } else { EXIT_INCOMPLETE };
    let mut output = CommandOutput { exit_code: exit, stdout, files: Vec::new() };
    if let Some(dir) = out {
        output = output
            .with_file(dir.join("records.jsonl"), records_text)
            .with_file(dir.join("reconstruction.json"), json_text);
    }
    Ok(output)
}

/// Round-trip a state in memory: simulate, reconstruct, and return the
/// reconstruction report JSON. Backs the C bindings.
pub fn cmd_tomo_roundtrip_in_memory(
    state: &ChannelState,
    flags: PlanFlags,
    shots: Option<u64>,
    seed: Option<u64>,
) -> Result<String> {
    let plan = plan_for_state(state, flags)?;
    let dim = plan_dim(&plan);
    let mode = mode_from_flags(shots, seed)?;
    let truth = state.to_matrix();
    let records = simulate(&truth, &plan, mode)?;
    let mut result = reconstruct(&records, &plan)?;
    result.trace_distance_to_truth = Some(trace_distance(&result.rho_hat, &truth));
    reconstruction_json(state.s(), state.l(), &result, dim)
}

/// Names of the built-in worked examples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExampleName {
    Paraqubit,
    QubitQutrit,
    DualQutrit,
    TwoQubitFigure,
    QutritQubitDegenerate,
}

impl std::str::FromStr for ExampleName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paraqubit" => Ok(Self::Paraqubit),
            "qubit_qutrit" => Ok(Self::QubitQutrit),
            "dual_qutrit" => Ok(Self::DualQutrit),
            "two_qubit_figure" => Ok(Self::TwoQubitFigure),
            "qutrit_qubit_degenerate" => Ok(Self::QutritQubitDegenerate),
            other => Err(Error::Parse(format!(
                "unknown example `{other}` (expected paraqubit, qubit_qutrit, dual_qutrit, \
                 two_qubit_figure, qutrit_qubit_degenerate)"
            ))),
        }
    }
}

fn per_state_entry(s: HalfInteger, l: HalfInteger, j: HalfInteger, m: HalfInteger) -> Result<serde_json::Value> {
    let state = pure_coupled_state(s, l, j, m)?;
    let ra = reduce_a(&state);
    let rb = reduce_b(&state);
    let ent = entanglement_entropy(s, l, j, m);
    let vector: Vec<f64> =
        crate::coupling::coupled_vector(s, l, j, m).into_iter().map(|z| z.re).collect();
    Ok(json!({
        "label": format!("{j},{m}"),
        "vector": vector,
        "entanglement_entropy": ent,
        "product": ent < 1e-12,
        "reduction_a_eigs": ra.eigs,
        "reduction_b_eigs": rb.eigs,
    }))
}

fn example_paraqubit() -> Result<(String, Option<String>)> {
    let h = HalfInteger::HALF;
    let mut states = Vec::new();
    for (j, m) in coupled_labels(h, h) {
        states.push(per_state_entry(h, h, j, m)?);
    }
    let product_count = states.iter().filter(|v| v["product"].as_bool().unwrap()).count();
    let report = json!({
        "schema": "1",
        "channel": {"s": "1/2", "l": "1/2"},
        "states": states,
        "product_states": product_count,
        "entangled_states": 4 - product_count,
    });
    Ok((to_json_pretty(&report)?, None))
}

fn example_qubit_qutrit() -> Result<(String, Option<String>)> {
    let s = HalfInteger::HALF;
    let l = HalfInteger::ONE;
    let mut states = Vec::new();
    for (j, m) in coupled_labels(s, l) {
        states.push(per_state_entry(s, l, j, m)?);
    }
    let report = json!({
        "schema": "1",
        "channel": {"s": "1/2", "l": "1"},
        "states": states,
    });
    Ok((to_json_pretty(&report)?, None))
}

fn example_dual_qutrit() -> Result<(String, Option<String>)> {
    let one = HalfInteger::ONE;
    let mut states = Vec::new();
    for (j, m) in coupled_labels(one, one) {
        states.push(per_state_entry(one, one, j, m)?);
    }
    let uniform = maximally_mixed(one, one);
    let holevo = holevo_chi(&uniform)?;
    let report = json!({
        "schema": "1",
        "channel": {"s": "1", "l": "1"},
        "states": states,
        "uniform_source": {
            "s_total": holevo.s_total,
            "chi": holevo.chi,
            "mean_entanglement": holevo.mean_entanglement,
            "bound_larger_only": holevo.bound_larger_only,
            "estimate_independent": holevo.estimate_independent,
            "estimate_correlated": holevo.estimate_correlated,
            "discrepancy_note": "chi recomputed from the per-state entropies: log2(9) - (5 + 2*log2(3) - 1/3)/9 ≈ 2.2992 bits. The previously reported value of 3.88 bits is inconsistent with this sum and even exceeds log2(9) ≈ 3.17, the entropy ceiling of a nine-state source.",
        },
    });
    Ok((to_json_pretty(&report)?, None))
}

fn example_two_qubit_figure() -> Result<(String, Option<String>)> {
    let mut csv = String::from("q,s_pair_solid,s_qubit_solid,s_pair_dotted,s_qubit_dotted\n");
    let (d_solid, r_solid) = (0.6, 0.9);
    for i in -100..=100_i64 {
        let q = i as f64 / 100.0;
        let solid = TwoQubitParams::new(d_solid, r_solid, q)?;
        let dotted = TwoQubitParams::new(1.0, r_solid, q)?;
        let (sp_s, sq_s) = two_qubit_entropy_closed_form(&solid);
        let (sp_d, sq_d) = two_qubit_entropy_closed_form(&dotted);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt12(q),
            fmt12(sp_s),
            fmt12(sq_s),
            fmt12(sp_d),
            fmt12(sq_d)
        ));
    }
    let report = json!({
        "schema": "1",
        "solid": {"d": d_solid, "r": r_solid},
        "dotted": {"d": 1.0, "r": r_solid},
        "columns": ["q", "s_pair_solid", "s_qubit_solid", "s_pair_dotted", "s_qubit_dotted"],
        "rows": 201,
        "q_range": [-1.0, 1.0],
        "q_step": 0.01,
    });
    Ok((to_json_pretty(&report)?, Some(csv)))
}

fn example_qutrit_qubit_degenerate() -> Result<(String, Option<String>)> {
    // The two-label mix sharing m = 1/2 on the qubit ⊗ qutrit channel:
    // weights (1±d)/2 on (3/2, 1/2) and (1/2, 1/2).
    let s = HalfInteger::HALF;
    let l = HalfInteger::ONE;
    let (upper, lower) = (HalfInteger::from_twice(3), HalfInteger::HALF);
    let m = HalfInteger::HALF;
    let mut csv = String::from("d,s_sys,s_qubit,s_qutrit\n");
    for i in 0..=100_i64 {
        let d = i as f64 / 100.0;
        let p = BTreeMap::from([((upper, m), (1.0 + d) / 2.0), ((lower, m), (1.0 - d) / 2.0)]);
        let state = coupled_diagonal_state(s, l, p)?;
        let s_sys = von_neumann(&state);
        let s_qubit = shannon(&reduce_a(&state).eigs);
        let s_qutrit = shannon(&reduce_b(&state).eigs);
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt12(d),
            fmt12(s_sys),
            fmt12(s_qubit),
            fmt12(s_qutrit)
        ));
    }
    // Closed forms for the endpoints and the generic shape.
    let h_sys = |d: f64| binary_entropy(d).expect("|d| <= 1");
    let h_sub = |d: f64| binary_entropy(d / 3.0).expect("|d|/3 <= 1");
    let report = json!({
        "schema": "1",
        "channel": {"s": "1/2", "l": "1"},
        "mix": {"labels": ["3/2,1/2", "1/2,1/2"], "weights": "(1±d)/2"},
        "columns": ["d", "s_sys", "s_qubit", "s_qutrit"],
        "rows": 101,
        "closed_form": {
            "s_sys": "h((1+d)/2) two-outcome entropy",
            "s_subchannel": "h((1+d/3)/2) two-outcome entropy",
            "at_d0": {"s_sys": h_sys(0.0), "s_qubit": h_sub(0.0)},
            "at_d1": {"s_sys": h_sys(1.0), "s_qubit": h_sub(1.0)},
        },
    });
    Ok((to_json_pretty(&report)?, Some(csv)))
}

/// `examples`: run one of the built-in worked examples.
pub fn cmd_examples(name: ExampleName, out: Option<&Path>) -> Result<CommandOutput> {
    let (stem, (json_text, csv_text)) = match name {
        ExampleName::Paraqubit => ("paraqubit", example_paraqubit()?),
        ExampleName::QubitQutrit => ("qubit_qutrit", example_qubit_qutrit()?),
        ExampleName::DualQutrit => ("dual_qutrit", example_dual_qutrit()?),
        ExampleName::TwoQubitFigure => ("two_qubit_figure", example_two_qubit_figure()?),
        ExampleName::QutritQubitDegenerate => {
            ("qutrit_qubit_degenerate", example_qutrit_qubit_degenerate()?)
        }
    };
    let dir = out.unwrap_or(Path::new("."));
    let mut output =
        CommandOutput::ok(format!("example {stem}: report written to {}\n", dir.display()));
    output = output.with_file(dir.join(format!("{stem}.json")), json_text);
    if let Some(csv) = csv_text {
        output = output.with_file(dir.join(format!("{stem}.csv")), csv);
    }
    Ok(output)
}

/// Diagnostic: the measurement-map rank of the plan a flag set selects for
/// the given dimensions (used by `tomo` help and tests).
pub fn plan_rank(dim_a: usize, dim_b: usize, flags: PlanFlags) -> Result<usize> {
    let plan = if flags.paired {
        paired_plan(dim_a, dim_b, flags.axis_mode)?
    } else {
        single_plan(dim_a * dim_b, flags.axis_mode)?
    };
    Ok(completeness_rank(&plan))
}
