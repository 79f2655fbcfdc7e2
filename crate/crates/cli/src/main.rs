use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use entwit::bell::{
    angles, bell_signal_difference_observable, chsh_operator, klyshko_operator, mermin_operator, read_settings,
    sackett_observable, Plane, SettingsDocument, Sign,
};
use entwit::experiments::{
    analyze_pan, analyze_rauschenbeutel, build_w_state, demonstrate_rho_mix, fit_w_state, named_record, read_record,
    w_targets, ExperimentRecord,
};
use entwit::hilbert::file::{read_state, write_state};
use entwit::hilbert::presets::{bell_signal_mixture, singlet_triplet_mixture};
use entwit::hilbert::{expectation, ghz, pauli_string, psi_b, validate_density};
use entwit::witness::{
    best_ghz_class_fidelity, condition_a, condition_a_from_data, condition_b, fidelity_from_components,
    harmonic_extract, optimize_settings, scan, write_samples, ThresholdOutcome, WitnessVerdict,
};
use entwit::{Error, MeasuredValue, QuantumState, Result};
use entwit_cli::format::{pm, sig};
use entwit_cli::reproduce::{reproduce, Check};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "entwit", version, about = "Entanglement witnesses for few-qubit spin states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a preset state to a JSON file.
    State(StateArgs),
    /// Expectation of a Pauli string or a Bell operator.
    Expect(ExpectArgs),
    /// Evaluate an entanglement witness.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Scan an angle-dependent observable and extract harmonics.
    Scan(ScanArgs),
    /// Analyze a bundled experiment record.
    Analyze(AnalyzeArgs),
    /// Recompute every quoted number and write reproduction.json.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    Ghz,
    PsiB,
    SingletTriplet,
    RhoMix,
    WState,
}

#[derive(Args)]
struct StateArgs {
    #[arg(long, value_enum)]
    preset: Preset,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    out: PathBuf,
    /// Also write the settings that maximize |E(F_N)| for this preset.
    #[arg(long)]
    settings_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorKind {
    Klyshko,
    Mermin,
    Chsh,
}

#[derive(Args)]
struct ExpectArgs {
    #[arg(long)]
    state: PathBuf,
    /// Pauli string such as `xyy` (`i` for identity).
    #[arg(long, conflicts_with = "settings", required_unless_present = "settings")]
    observable: Option<String>,
    #[arg(long)]
    settings: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "klyshko", requires = "settings")]
    operator: OperatorKind,
}

#[derive(Clone, Copy, ValueEnum)]
enum PlaneArg {
    Xy,
    Xz,
}

impl From<PlaneArg> for Plane {
    fn from(p: PlaneArg) -> Plane {
        match p {
            PlaneArg::Xy => Plane::Xy,
            PlaneArg::Xz => Plane::Xz,
        }
    }
}

#[derive(Subcommand)]
enum WitnessCommand {
    /// Bell-Klyshko test against the local and biseparable bounds.
    A(WitnessAArgs),
    /// Fidelity with a GHZ-class state against ½.
    B(WitnessBArgs),
}

#[derive(Args)]
struct WitnessAArgs {
    #[arg(long, conflicts_with = "data", required_unless_present = "data")]
    state: Option<PathBuf>,
    #[arg(long, requires = "state", conflicts_with = "optimize")]
    settings: Option<PathBuf>,
    #[arg(long, requires = "state")]
    optimize: bool,
    #[arg(long, value_enum, requires = "optimize")]
    plane: Option<PlaneArg>,
    /// Measured |E(F_N)|.
    #[arg(long, requires_all = ["sigma", "n"], allow_negative_numbers = true)]
    data: Option<f64>,
    #[arg(long, requires = "data")]
    sigma: Option<f64>,
    #[arg(long, requires = "data")]
    n: Option<usize>,
    /// Write the report as JSON to this path.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessBArgs {
    #[arg(long, conflicts_with_all = ["p_up", "p_down", "coherence"], required_unless_present = "p_up")]
    state: Option<PathBuf>,
    /// `ghz`, `psi-b`, `best` or a state file.
    #[arg(long, requires = "state")]
    target: Option<String>,
    /// Measured P(↑…↑) as `value±sigma`.
    #[arg(long, requires_all = ["p_down", "coherence"], value_parser = parse_measured)]
    p_up: Option<MeasuredValue>,
    #[arg(long, value_parser = parse_measured)]
    p_down: Option<MeasuredValue>,
    /// Measured Re ρ(↑…↑, ↓…↓) as `value±sigma`.
    #[arg(long, value_parser = parse_measured, allow_hyphen_values = true)]
    coherence: Option<MeasuredValue>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanObservable {
    SackettPlus,
    SackettMinus,
    BellDiff,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long)]
    state: PathBuf,
    #[arg(long, value_enum)]
    observable: ScanObservable,
    #[arg(long, default_value_t = 16)]
    grid: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Analysis {
    Pan,
    Rauschenbeutel,
    WState,
    RhoMix,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(value_enum)]
    analysis: Analysis,
    /// Record file to use instead of the bundled one.
    #[arg(long)]
    record: Option<PathBuf>,
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct ReproduceArgs {
    #[arg(long)]
    out: PathBuf,
    /// Run only check groups whose name starts with this.
    #[arg(long)]
    filter: Option<String>,
}

/// Accepts `0.28±0.04`, `0.28+-0.04` or a bare value (sigma 0).
fn parse_measured(text: &str) -> std::result::Result<MeasuredValue, String> {
    let parts: Vec<&str> = if text.contains('±') { text.split('±').collect() } else { text.split("+-").collect() };
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("bad number `{}`: {e}", s.trim()));
    let (value, sigma) = match parts.as_slice() {
        [v] => (num(v)?, 0.0),
        [v, s] => (num(v)?, num(s)?),
        _ => return Err(format!("expected value±sigma, got `{text}`")),
    };
    MeasuredValue::new(value, sigma).map_err(|e| e.to_string())
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os("ENTWIT_DATA_DIR").map(PathBuf::from)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::Internal(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text)?;
    Ok(())
}

fn load_state(path: &Path) -> Result<QuantumState> {
    let state = read_state(path)?;
    let report = validate_density(&state);
    if !report.accepted {
        return Err(Error::Validation { invariant: "state must be a valid density", detail: format!("{report:?}") });
    }
    Ok(state)
}

fn cmd_state(args: StateArgs) -> Result<()> {
    let (state, settings) = match args.preset {
        Preset::Ghz => {
            let n = args.n.ok_or_else(|| Error::Argument("--preset ghz needs --n".into()))?;
            let state = ghz(n)?;
            let settings = (n == 3).then(|| SettingsDocument::from_planar(&angles::ghz_maximal()));
            (state, settings)
        }
        Preset::PsiB => (psi_b(), Some(SettingsDocument::from_planar(&angles::psi_b_maximal()))),
        Preset::SingletTriplet => {
            (singlet_triplet_mixture()?, Some(SettingsDocument::from_settings(&angles::singlet_triplet_mixture())))
        }
        Preset::RhoMix => (bell_signal_mixture()?, None),
        Preset::WState => {
            let alpha = args.alpha.ok_or_else(|| Error::Argument("--preset w-state needs --alpha".into()))?;
            (build_w_state(alpha)?, None)
        }
    };
    if args.n.is_some() && !matches!(args.preset, Preset::Ghz) {
        return Err(Error::Argument("--n applies only to --preset ghz".into()));
    }
    if args.alpha.is_some() && !matches!(args.preset, Preset::WState) {
        return Err(Error::Argument("--alpha applies only to --preset w-state".into()));
    }
    let settings = match (&args.settings_out, settings) {
        (Some(path), Some(doc)) => Some((path, doc)),
        (Some(_), None) => return Err(Error::Argument("this preset has no reference settings".into())),
        (None, _) => None,
    };
    let report = validate_density(&state);
    if !report.accepted {
        return Err(Error::Internal(format!("preset failed validation: {report:?}")));
    }
    write_state(&args.out, &state)?;
    println!(
        "wrote {}-party {} state to {}",
        state.n_parties(),
        if state.is_pure() { "pure" } else { "mixed" },
        args.out.display()
    );
    if let Some((path, doc)) = settings {
        write_json(path, &doc)?;
        println!("wrote settings to {}", path.display());
    }
    Ok(())
}

fn cmd_expect(args: ExpectArgs) -> Result<()> {
    let state = load_state(&args.state)?;
    if let Some(obs) = &args.observable {
        if obs.chars().count() != state.n_parties() {
            return Err(Error::Argument(format!(
                "`{obs}` has {} factors for a {}-party state",
                obs.chars().count(),
                state.n_parties()
            )));
        }
        let op = pauli_string(obs)?;
        println!("<{obs}> = {}", sig(expectation(&state, &op)?));
        return Ok(());
    }
    let settings = read_settings(args.settings.as_ref().expect("clap enforces settings"))?;
    if settings.n_parties() != state.n_parties() {
        return Err(Error::Argument(format!(
            "{}-party settings for a {}-party state",
            settings.n_parties(),
            state.n_parties()
        )));
    }
    let (name, op) = match args.operator {
        OperatorKind::Klyshko => (format!("F{}", state.n_parties()), klyshko_operator(&settings, false)?),
        OperatorKind::Mermin => {
            if state.n_parties() != 3 {
                return Err(Error::Argument("the Mermin combination is defined for 3 parties".into()));
            }
            ("mermin".to_string(), mermin_operator())
        }
        OperatorKind::Chsh => ("chsh".to_string(), chsh_operator(&settings)?),
    };
    println!("E({name}) = {}", sig(op.expectation(&state)?));
    Ok(())
}

#[derive(Serialize)]
struct WitnessAReport {
    verdict: WitnessVerdict,
    summary: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimized_parameters: Option<Vec<f64>>,
}

fn cmd_witness_a(args: WitnessAArgs) -> Result<()> {
    let (verdict, parameters) = match (&args.state, args.data) {
        (Some(path), None) => {
            let state = load_state(path)?;
            if let Some(s) = &args.settings {
                let settings = read_settings(s)?;
                (condition_a(&state, &settings)?, None)
            } else if args.optimize {
                let opt = optimize_settings(&state, args.plane.map(Plane::from))?;
                (condition_a(&state, &opt.settings)?, Some(opt.parameters))
            } else {
                return Err(Error::Argument("--state needs --settings or --optimize".into()));
            }
        }
        (None, Some(v)) => {
            let measured = MeasuredValue::new(v, args.sigma.expect("clap enforces sigma"))?;
            (condition_a_from_data(measured, args.n.expect("clap enforces n"))?, None)
        }
        _ => return Err(Error::Argument("give exactly one of --state or --data".into())),
    };
    let n = verdict.n_parties;
    let t = verdict.thresholds;
    println!("|E(F{n})| = {}", pm(verdict.tested_value.value, verdict.tested_value.sigma));
    println!(
        "thresholds: local realism {}, {n}-particle {}, quantum maximum {}",
        sig(t.local_realist),
        sig(t.biseparable),
        sig(t.quantum_max)
    );
    println!("local realism: {}", verdict.local_realism.describe());
    println!("{n}-particle witness: {}", verdict.n_partite.describe());
    println!("{}", verdict.summary());
    if let Some(p) = &parameters {
        println!("optimized angles: {}", p.iter().map(|x| sig(*x)).collect::<Vec<_>>().join(" "));
    }
    if let Some(path) = &args.json {
        let summary = verdict.summary();
        write_json(path, &WitnessAReport { verdict, summary, optimized_parameters: parameters })?;
    }
    Ok(())
}

#[derive(Serialize)]
struct WitnessBReport {
    target: String,
    fidelity: MeasuredValue,
    threshold: f64,
    outcome: String,
}

fn cmd_witness_b(args: WitnessBArgs) -> Result<()> {
    let report = if let Some(path) = &args.state {
        let state = load_state(path)?;
        let target = args.target.as_deref().ok_or_else(|| Error::Argument("--state needs --target".into()))?;
        let (name, target_state) = match target {
            "ghz" => ("ghz".to_string(), Some(ghz(state.n_parties())?)),
            "psi-b" => ("psi-b".to_string(), Some(psi_b())),
            "best" => (String::new(), None),
            file => (file.to_string(), Some(load_state(Path::new(file))?)),
        };
        let (name, cb) = match target_state {
            Some(t) => (name, condition_b(&state, &t)?),
            None => {
                let (best, _) = best_ghz_class_fidelity(&state)?;
                let t = entwit::hilbert::ghz_class_targets(state.n_parties())?
                    .into_iter()
                    .find(|(n, _)| *n == best)
                    .expect("best target is one of the targets")
                    .1;
                (best, condition_b(&state, &t)?)
            }
        };
        WitnessBReport {
            target: name,
            fidelity: MeasuredValue::exact(cb.fidelity),
            threshold: cb.threshold,
            outcome: if cb.met { "met" } else { "not met" }.into(),
        }
    } else {
        let r = fidelity_from_components(
            args.p_up.expect("clap enforces p-up"),
            args.p_down.expect("clap enforces p-down"),
            args.coherence.expect("clap enforces coherence"),
        )?;
        WitnessBReport {
            target: "ghz".into(),
            fidelity: r.fidelity,
            threshold: r.threshold,
            outcome: condition_b_words(r.condition_b).into(),
        }
    };
    if report.fidelity.sigma == 0.0 {
        println!("F = {} against {}", sig(report.fidelity.value), report.target);
    } else {
        println!("F = {} against {}", pm(report.fidelity.value, report.fidelity.sigma), report.target);
    }
    println!("threshold {}: condition {}", sig(report.threshold), report.outcome);
    if let Some(path) = &args.json {
        write_json(path, &report)?;
    }
    Ok(())
}

fn condition_b_words(outcome: ThresholdOutcome) -> &'static str {
    match outcome {
        ThresholdOutcome::Exceeded => "met",
        ThresholdOutcome::NotExceeded => "not met",
        ThresholdOutcome::Inconclusive => "inconclusive",
    }
}

fn cmd_scan(args: ScanArgs) -> Result<()> {
    if args.grid < 7 {
        return Err(Error::Argument(format!("grid of {} points cannot resolve f = 3; need at least 7", args.grid)));
    }
    let state = load_state(&args.state)?;
    if state.n_parties() != 3 {
        return Err(Error::Argument("scan observables act on 3 parties".into()));
    }
    let samples = scan(args.grid, |phi| {
        let obs = match args.observable {
            ScanObservable::SackettPlus => sackett_observable(Sign::Plus, phi),
            ScanObservable::SackettMinus => sackett_observable(Sign::Minus, phi),
            ScanObservable::BellDiff => bell_signal_difference_observable(phi),
        };
        expectation(&state, &obs)
    })?;
    write_samples(std::fs::File::create(&args.out)?, &samples)?;
    for f in [1, 3] {
        let h = harmonic_extract(&samples, f)?;
        println!("f={f} amplitude={} phase={}", sig(h.amplitude), sig(h.phase));
    }
    Ok(())
}

fn record(args: &AnalyzeArgs, name: &str) -> Result<ExperimentRecord> {
    match &args.record {
        Some(path) => read_record(path),
        None => named_record(name, data_dir().as_deref()),
    }
}

fn line(label: &str, v: &MeasuredValue) -> String {
    let (r, s) = v.rounded(2);
    format!("{label:<24}{}  (2 d.p.: {r:.2} ± {s:.2})", pm(v.value, v.sigma))
}

fn cmd_analyze(args: AnalyzeArgs) -> Result<()> {
    match args.analysis {
        Analysis::Pan => {
            let r = analyze_pan(&record(&args, "pan")?, None)?;
            println!("{}", line("Mermin value", &r.mermin_value));
            println!("{}", line("|Re ρ(↑↑↑,↓↓↓)|", &r.coherence_magnitude));
            println!("{}", line("fidelity", &r.fidelity.fidelity));
            println!("{:<24}{}", "verdict", r.verdict.summary());
            println!("{:<24}{}", "condition B", condition_b_words(r.fidelity.condition_b));
            if let Some(p) = &args.json {
                write_json(p, &r)?;
            }
        }
        Analysis::Rauschenbeutel => {
            let r = analyze_rauschenbeutel(&record(&args, "rauschenbeutel")?)?;
            let wc = &r.worst_case;
            println!("{}", line("signal amplitude A", &r.amplitude));
            println!("{}", line("½(P2 + P7 + A)", &r.naive_fidelity));
            println!("{}", line("α/2", &wc.alpha_half));
            println!("{}", line("β/2", &wc.beta_half));
            println!("{}", line("γ/2", &wc.gamma_half));
            println!("{}", line("w = α + β + γ", &wc.w));
            println!("{}", line("2 Re ρ72 = A − w", &wc.corrected_offdiag_twice));
            println!("{}", line("corrected fidelity", &wc.corrected_fidelity));
            println!("{}", line("½(P2 + P7) + (A − w)", &r.full_offdiag_fidelity));
            println!("{:<24}{}", "condition B", condition_b_words(wc.condition_b));
            for n in &r.notes {
                println!("note: {n}");
            }
            if let Some(p) = &args.json {
                write_json(p, &r)?;
            }
        }
        Analysis::WState => {
            let r = fit_w_state(&w_targets(&record(&args, "bouwmeester")?)?)?;
            println!("alpha = {}", sig(r.alpha));
            for (id, p) in &r.predicted {
                let t = &r.targets[id];
                println!(
                    "{id:<8} predicted {:<16} target {:<20} residual {}{}",
                    sig(*p),
                    pm(t.value, t.sigma),
                    sig(r.residuals[id]),
                    if r.unmet.contains(id) { "  (not met)" } else { "" }
                );
            }
            if let Some(p) = &args.json {
                write_json(p, &r)?;
            }
        }
        Analysis::RhoMix => {
            if args.record.is_some() {
                return Err(Error::Argument("rho-mix uses no record".into()));
            }
            let r = demonstrate_rho_mix()?;
            println!("P2 = {}, P7 = {}", sig(r.p2), sig(r.p7));
            println!("difference-signal amplitude = {}", sig(r.signal.amplitude));
            println!("procedure fidelity ½(P2 + P7 + A) = {}", sig(r.procedure_fidelity));
            println!("true fidelity = {}", sig(r.true_fidelity));
            println!("fidelity with ψ_B = {}", sig(r.fidelity_psi_b));
            let im = r.element_27[1];
            println!(
                "ρ27 = {} {} {}i",
                sig(r.element_27[0]),
                if im.is_sign_negative() { '-' } else { '+' },
                sig(im.abs())
            );
            if let Some(p) = &args.json {
                write_json(p, &r)?;
            }
        }
    }
    Ok(())
}

fn show(value: &serde_json::Value) -> String {
    match value {
        serde_json::Value::Number(n) => n.as_f64().map(sig).unwrap_or_else(|| n.to_string()),
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Returns whether every check passed.
fn cmd_reproduce(args: ReproduceArgs) -> Result<bool> {
    std::fs::create_dir_all(&args.out)?;
    let report = reproduce(args.filter.as_deref(), data_dir().as_deref())?;
    write_json(&args.out.join("reproduction.json"), &report)?;
    for (id, value) in &report.checks {
        let c: Check = serde_json::from_value(value.clone()).map_err(|e| Error::Internal(e.to_string()))?;
        println!(
            "{} {id}: computed {} vs {} ({:?})",
            if c.pass { "PASS" } else { "FAIL" },
            show(&c.computed_value),
            show(&c.reference_value),
            c.rule
        );
    }
    println!("{} passed, {} failed", report.passed, report.failed);
    Ok(report.all_passed())
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::State(a) => cmd_state(a)?,
        Command::Expect(a) => cmd_expect(a)?,
        Command::Witness(WitnessCommand::A(a)) => cmd_witness_a(a)?,
        Command::Witness(WitnessCommand::B(a)) => cmd_witness_b(a)?,
        Command::Scan(a) => cmd_scan(a)?,
        Command::Analyze(a) => cmd_analyze(a)?,
        Command::Reproduce(a) => return cmd_reproduce(a),
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_user_error() { 2 } else { 1 })
        }
    }
}
