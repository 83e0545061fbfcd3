//! Command-line front end for the ladderq library.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ladderq::cli::{self, CommandOutput, ExampleName, Format, PlanFlags, StateSpec, EXIT_INPUT};
use ladderq::spinops::AxisMode;
use ladderq::HalfInteger;

#[derive(Parser)]
#[command(
    name = "ladderq",
    version,
    about = "Ladder-operator toolkit for composite quantum channels: coupling, entropies, \
             entanglement indicators and simulated tomography"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
    Table,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
            FormatArg::Table => Format::Table,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AnglesArg {
    /// The planar cos φ·J3 + sin φ·(J₊+J₋)/2 family.
    Paper,
    /// The planar family extended with azimuthal phases (full-rank map).
    General,
}

impl From<AnglesArg> for AxisMode {
    fn from(a: AnglesArg) -> AxisMode {
        match a {
            AnglesArg::Paper => AxisMode::Planar,
            AnglesArg::General => AxisMode::Phased,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build the ladder operators J₊, J₋, J3 for one dimension.
    Ladder {
        /// Space dimension N ≥ 1.
        #[arg(long)]
        dim: usize,
        /// Directory to write ladder.json into (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute the coupled basis |j,m⟩ of a bipartite channel.
    Couple {
        /// Rank of subchannel A, e.g. "1/2" or "1".
        #[arg(long)]
        s: HalfInteger,
        /// Rank of subchannel B.
        #[arg(long)]
        l: HalfInteger,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Construct a state file.
    State(StateArgs),
    /// Entropy summary of a state file.
    Entropy {
        /// Path to a state file.
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Directory to write the report into (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Entanglement indicators of a state file (exit 3 when entangled).
    Witness {
        #[arg(long)]
        state: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulated tomography.
    Tomo {
        #[command(subcommand)]
        command: TomoCommand,
    },
    /// Reproduce the built-in worked examples.
    Examples {
        /// One of: paraqubit, qubit_qutrit, dual_qutrit, two_qubit_figure,
        /// qutrit_qubit_degenerate.
        name: String,
        /// Directory for the report files (default ".").
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct StateArgs {
    /// Rank of subchannel A.
    #[arg(long)]
    s: HalfInteger,
    /// Rank of subchannel B.
    #[arg(long)]
    l: HalfInteger,
    /// Pure coupled state "j,m".
    #[arg(long, conflicts_with_all = ["uniform", "spectrum", "two_qubit"])]
    pure: Option<String>,
    /// Maximally mixed state.
    #[arg(long, conflicts_with_all = ["spectrum", "two_qubit"])]
    uniform: bool,
    /// Explicit spectrum "j,m=p;j,m=p;...".
    #[arg(long, conflicts_with = "two_qubit")]
    spectrum: Option<String>,
    /// Two-qubit family parameters "d,r,q".
    #[arg(long)]
    two_qubit: Option<String>,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TomoCommand {
    /// Measure a state under a plan; records as JSON lines.
    Simulate {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value = "general")]
        angles: AnglesArg,
        /// Use the paired plan (subchannel marginals + covariance grid).
        #[arg(long)]
        paired: bool,
        /// Sample this many shots per setting (exact statistics when absent).
        #[arg(long)]
        shots: Option<u64>,
        /// Seed for sampled mode (required with --shots).
        #[arg(long)]
        seed: Option<u64>,
        /// Output records file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rebuild a state from records (exit 4 when the map is incomplete).
    Reconstruct {
        /// Records file (JSON lines).
        #[arg(long)]
        records: PathBuf,
        /// Optional true state file for the trace-distance report.
        #[arg(long)]
        state: Option<PathBuf>,
        /// Rank of subchannel A.
        #[arg(long)]
        s: HalfInteger,
        /// Rank of subchannel B.
        #[arg(long)]
        l: HalfInteger,
        #[arg(long, value_enum, default_value = "general")]
        angles: AnglesArg,
        #[arg(long)]
        paired: bool,
        /// Output reconstruction file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Simulate then reconstruct, reporting the round-trip distance.
    Roundtrip {
        #[arg(long)]
        state: PathBuf,
        #[arg(long, value_enum, default_value = "general")]
        angles: AnglesArg,
        #[arg(long)]
        paired: bool,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Directory for records.jsonl and reconstruction.json.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_label(text: &str) -> Result<(HalfInteger, HalfInteger), ladderq::Error> {
    let (j, m) = text
        .split_once(',')
        .ok_or_else(|| ladderq::Error::Parse(format!("expected \"j,m\", got `{text}`")))?;
    Ok((j.trim().parse()?, m.trim().parse()?))
}

fn parse_spectrum(text: &str) -> Result<Vec<(HalfInteger, HalfInteger, f64)>, ladderq::Error> {
    let mut entries = Vec::new();
    for part in text.split(';').filter(|p| !p.trim().is_empty()) {
        let (label, weight) = part
            .split_once('=')
            .ok_or_else(|| ladderq::Error::Parse(format!("expected \"j,m=p\", got `{part}`")))?;
        let (j, m) = parse_label(label)?;
        let w: f64 = weight
            .trim()
            .parse()
            .map_err(|_| ladderq::Error::Parse(format!("bad probability `{weight}`")))?;
        entries.push((j, m, w));
    }
    if entries.is_empty() {
        return Err(ladderq::Error::Parse("empty spectrum".into()));
    }
    Ok(entries)
}

fn parse_triple(text: &str) -> Result<(f64, f64, f64), ladderq::Error> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(ladderq::Error::Parse(format!("expected \"d,r,q\", got `{text}`")));
    }
    let mut vals = [0.0; 3];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot =
            part.parse().map_err(|_| ladderq::Error::Parse(format!("bad number `{part}`")))?;
    }
    Ok((vals[0], vals[1], vals[2]))
}

fn dispatch(cli: Cli) -> Result<CommandOutput, ladderq::Error> {
    match cli.command {
        Command::Ladder { dim, out } => cli::cmd_ladder(dim, out.as_deref()),
        Command::Couple { s, l, out } => cli::cmd_couple(s, l, out.as_deref()),
        Command::State(args) => {
            let spec = if let Some(label) = &args.pure {
                let (j, m) = parse_label(label)?;
                StateSpec::Pure { j, m }
            } else if args.uniform {
                StateSpec::Uniform
            } else if let Some(spectrum) = &args.spectrum {
                StateSpec::Spectrum(parse_spectrum(spectrum)?)
            } else if let Some(params) = &args.two_qubit {
                let (d, r, q) = parse_triple(params)?;
                StateSpec::TwoQubit { d, r, q }
            } else {
                return Err(ladderq::Error::Parse(
                    "state needs one of --pure, --uniform, --spectrum, --two-qubit".into(),
                ));
            };
            cli::cmd_state(args.s, args.l, spec, args.out.as_deref())
        }
        Command::Entropy { state, format, out } => {
            cli::cmd_entropy(&state, format.into(), out.as_deref())
        }
        Command::Witness { state, out } => cli::cmd_witness(&state, out.as_deref()),
        Command::Tomo { command } => match command {
            TomoCommand::Simulate { state, angles, paired, shots, seed, out } => {
                let flags = PlanFlags { axis_mode: angles.into(), paired };
                cli::cmd_tomo_simulate(&state, flags, shots, seed, out.as_deref())
            }
            TomoCommand::Reconstruct { records, state, s, l, angles, paired, out } => {
                let flags = PlanFlags { axis_mode: angles.into(), paired };
                cli::cmd_tomo_reconstruct(&records, state.as_deref(), s, l, flags, out.as_deref())
            }
            TomoCommand::Roundtrip { state, angles, paired, shots, seed, out } => {
                let flags = PlanFlags { axis_mode: angles.into(), paired };
                cli::cmd_tomo_roundtrip(&state, flags, shots, seed, out.as_deref())
            }
        },
        Command::Examples { name, out } => {
            let name: ExampleName = name.parse()?;
            cli::cmd_examples(name, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(output) => {
            if let Err(e) = output.emit() {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_INPUT);
            }
            ExitCode::from(output.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
