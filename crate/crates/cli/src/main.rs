use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use wmlab_core::gauge::{build_bundle, check_covariance, check_quotient_relation, vacuum_operator_spectrum, CirclePhase, Eigenvalue, UnitaryVariant};
use wmlab_core::masa::{expectation, expectation_of_normal_form};
use wmlab_core::rational::parse_big_rational;
use wmlab_core::rewrite::{evaluate, rewrite};
use wmlab_core::spectrum::{emit_dataset, enumerate_spectrum, DatasetFormat, SpectrumConfig};
use wmlab_core::verify::{run_suites, Suite, VerifyConfig};
use wmlab_core::word::parse_word;
use wmlab_core::{Error, FockModel, TruncationParams};

/// Exact checks for the weakly monotone C*-algebra on truncated Fock space.
#[derive(Parser)]
#[command(name = "wmlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run verification suites and write a JSON report.
    Verify(VerifyArgs),
    /// Print the normal form of a word.
    Reduce(ReduceArgs),
    /// Write the spectrum point set as CSV or SVG.
    Spectrum(SpectrumArgs),
    /// Write gauge covariance, vacuum spectrum and quotient verdicts as JSON.
    Gauge(GaugeArgs),
    /// Print the conditional expectation of a word and cross-check it.
    Expect(ExpectArgs),
}

#[derive(Args)]
struct Model {
    /// Number of generators.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Largest tensor degree kept in the truncated Fock space.
    #[arg(long = "max-degree", default_value_t = 6)]
    max_degree: usize,
}

#[derive(Args)]
struct Output {
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Relations,
    Ck,
    Projections,
    Masa,
    Spectrum,
    Gauge,
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UnitaryArg {
    /// Phases inside each block, vacua moved between blocks.
    #[value(name = "paper")]
    VacuumShift,
    /// Every vector moved to the shifted block.
    Shift,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    model: Model,
    #[arg(long, value_enum, default_value_t = SuiteArg::All)]
    suite: SuiteArg,
    /// Spectrum parameter as `p/q`.
    #[arg(long, default_value = "1/2")]
    c: String,
    /// Number of circle samples for the gauge suite.
    #[arg(long, default_value_t = 4)]
    roots: u32,
    /// Worker threads for running suites.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Seed for the random word samples.
    #[arg(long, default_value_t = wmlab_core::verify::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ReduceArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Word such as "a1 a2* a0".
    word: String,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    model: Model,
    #[arg(long, default_value = "1/2")]
    c: String,
    #[arg(long, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct GaugeArgs {
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long = "max-degree", default_value_t = 3)]
    max_degree: usize,
    #[arg(long, default_value_t = 4)]
    roots: u32,
    #[arg(long, value_enum, default_value_t = UnitaryArg::Shift)]
    unitary: UnitaryArg,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct ExpectArgs {
    #[command(flatten)]
    model: Model,
    word: String,
}

enum Failure {
    Usage(String),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(e) => Failure::Io(e),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

type Outcome = Result<bool, Failure>;

fn open(output: &Output) -> Result<Box<dyn Write>, Failure> {
    Ok(match &output.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_json(output: &Output, value: &Value) -> Result<(), Failure> {
    let mut w = open(output)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn verify(args: VerifyArgs) -> Outcome {
    if args.format != FormatArg::Json {
        return Err(Failure::Usage("verify writes JSON only".into()));
    }
    let mut cfg = VerifyConfig::new(args.model.n, args.model.max_degree)?;
    cfg.c = parse_big_rational(&args.c)?;
    cfg.roots = args.roots;
    cfg.seed = args.seed;
    if args.roots == 0 {
        return Err(Failure::Usage("--roots must be at least 1".into()));
    }
    let suites: Vec<Suite> = match args.suite {
        SuiteArg::Relations => vec![Suite::Relations],
        SuiteArg::Ck => vec![Suite::Ck],
        SuiteArg::Projections => vec![Suite::Projections],
        SuiteArg::Masa => vec![Suite::Masa],
        SuiteArg::Spectrum => vec![Suite::Spectrum],
        SuiteArg::Gauge => vec![Suite::Gauge],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let report = run_suites(&suites, &cfg, args.jobs)?;
    write_json(&args.output, &serde_json::to_value(&report).map_err(io::Error::from)?)?;
    Ok(report.is_pass())
}

fn reduce(args: ReduceArgs) -> Outcome {
    let w = parse_word(&args.word, args.n)?;
    println!("{}", rewrite(&w, args.n)?);
    Ok(true)
}

fn spectrum(args: SpectrumArgs) -> Outcome {
    let format = match args.format {
        FormatArg::Csv => DatasetFormat::Csv,
        FormatArg::Svg => DatasetFormat::Svg,
        FormatArg::Json => return Err(Failure::Usage("spectrum writes csv or svg".into())),
    };
    let cfg = SpectrumConfig::new(args.model.n, args.model.max_degree, parse_big_rational(&args.c)?)?;
    let points = enumerate_spectrum(&cfg);
    // render first so an unsupported combination leaves no file behind
    let mut buf = Vec::new();
    emit_dataset(&points, cfg.n(), format, &mut buf)?;
    let mut w = open(&args.output)?;
    w.write_all(&buf)?;
    w.flush()?;
    Ok(true)
}

fn gauge(args: GaugeArgs) -> Outcome {
    let params = TruncationParams::new(args.n, args.max_degree)?;
    let rep = build_bundle(&params, args.roots)?;
    let variant = match args.unitary {
        UnitaryArg::VacuumShift => UnitaryVariant::VacuumShiftU,
        UnitaryArg::Shift => UnitaryVariant::BlockShiftV,
    };
    let mut pass = true;
    let mut covariance = Vec::new();
    for i in 0..=args.n {
        for e in 0..args.roots {
            let w = CirclePhase::new(i64::from(e), args.roots)?;
            let v = check_covariance(&rep, i, w, variant)?;
            pass &= v.is_pass();
            covariance.push(json!({
                "generator": i,
                "wExponent": e,
                "pass": v.is_pass(),
                "failures": v.failures,
            }));
        }
    }
    let spectrum: Vec<Value> = vacuum_operator_spectrum(&rep)?
        .into_iter()
        .map(|(ev, m)| match ev {
            Eigenvalue::Zero => json!({"eigenvalue": "0", "multiplicity": m}),
            Eigenvalue::Phase(p) => json!({"eigenvalue": p.to_string(), "exponent": p.exponent(), "multiplicity": m}),
        })
        .collect();
    let quotient = check_quotient_relation(&rep)?;
    pass &= quotient.is_pass();
    write_json(
        &args.output,
        &json!({
            "n": args.n,
            "maxDegree": args.max_degree,
            "roots": args.roots,
            "unitary": match args.unitary { UnitaryArg::VacuumShift => "paper", UnitaryArg::Shift => "shift" },
            "covariance": covariance,
            "vacuumSpectrum": spectrum,
            "quotient": quotient,
        }),
    )?;
    Ok(pass)
}

fn expect(args: ExpectArgs) -> Outcome {
    let params = TruncationParams::new(args.model.n, args.model.max_degree)?;
    let model = FockModel::new(params);
    let w = parse_word(&args.word, args.model.n)?;
    let nf = rewrite(&w, args.model.n)?;
    let e = expectation_of_normal_form(&nf);
    println!("{e}");
    let basis = model.basis();
    if w.guard() > basis.max_degree() {
        println!("matrix cross-check: skipped (word needs degree {} above the cut)", w.guard());
        return Ok(true);
    }
    let prefix = basis.guard_prefix(w.guard());
    let ok = expectation(&w.matrix(&model)?).agrees_on(&expectation(&evaluate(&e, &model)?), prefix);
    println!(
        "matrix cross-check: {} ({prefix} basis vectors)",
        if ok { "pass" } else { "FAIL" }
    );
    Ok(ok)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Reduce(a) => reduce(a),
        Command::Spectrum(a) => spectrum(a),
        Command::Gauge(a) => gauge(a),
        Command::Expect(a) => expect(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(3)
        }
    }
}
