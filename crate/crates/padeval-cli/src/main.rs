//! `padeval` — PAD evaluation from the command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error. Output
//! files are written atomically (write-then-rename) and never overwrite an
//! existing path unless `--force` is given. Relative output paths resolve
//! against `PADEVAL_OUT` when that variable is set.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use padeval::curves::{det_curve, eer_curve, kde, linspace01};
use padeval::metrics::{confusion_matrix, eer, MatrixMode, Selector};
use padeval::report::{
    build_cascade_report, build_report, render_cascade_json, render_cascade_markdown,
    render_report_json, render_report_markdown, resolve_tau, TauSelector,
};
use padeval::svg::{
    render_confusion_svg, render_det_svg, render_eer_svg, render_kde_svg, KdeScale, PlotOptions,
};
use padeval::synth::{gen_multiclass, ClassSpec, Squash, SynthSpec};
use padeval::weights::{class_weights, ClassCounts};
use padeval::{ClassTaxonomy, ScoreSet};

#[derive(Parser)]
#[command(
    name = "padeval",
    version,
    about = "ISO/IEC 30107-3 presentation attack detection evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a score file and write the operating-point report.
    Eval(EvalArgs),
    /// Render the probit-warped DET curve for every species.
    Det(DetArgs),
    /// Render per-class KDE score distributions.
    Kde(KdeArgs),
    /// Evaluate a two-stage cascade from two score files.
    Cascade(CascadeArgs),
    /// Compute balanced class weights from per-class counts.
    Weights(WeightsArgs),
    /// Generate a seeded synthetic score set.
    Synth(SynthArgs),
}

#[derive(Args)]
struct InputArgs {
    /// Score file (CSV or JSONL, auto-detected).
    #[arg(long)]
    scores: PathBuf,
    /// JSON class manifest.
    #[arg(long)]
    manifest: PathBuf,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long, default_value = "")]
    title: String,
    #[arg(long, default_value_t = 640)]
    width: u32,
    #[arg(long, default_value_t = 480)]
    height: u32,
}

impl PlotArgs {
    fn options(&self, fallback_title: &str) -> PlotOptions {
        PlotOptions {
            title: if self.title.is_empty() {
                fallback_title.to_string()
            } else {
                self.title.clone()
            },
            width: self.width,
            height: self.height,
        }
    }
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Species driving EER and the ladder: `worst` or a species name.
    #[arg(long, default_value = "worst")]
    species: String,
    /// Operating threshold: a literal in [0,1] or `auto:bpcerN`.
    #[arg(long, default_value = "auto:bpcer100")]
    tau: String,
    /// Report format.
    #[arg(long, default_value = "json", value_parser = ["json", "markdown"])]
    format: String,
    /// Dataset name recorded in the report (defaults to the scores filename).
    #[arg(long)]
    dataset: Option<String>,
    /// Report output path.
    #[arg(long)]
    out: PathBuf,
    /// Directory for the auto-generated figure set (DET, EER curve, KDE
    /// linear/log, confusion full/binary).
    #[arg(long)]
    plots: Option<PathBuf>,
    #[command(flatten)]
    plot: PlotArgs,
    /// Overwrite existing output files.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct DetArgs {
    #[command(flatten)]
    input: InputArgs,
    /// SVG output path.
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    plot: PlotArgs,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct KdeArgs {
    #[command(flatten)]
    input: InputArgs,
    /// SVG output path.
    #[arg(long)]
    out: PathBuf,
    /// Log-scale the density axis.
    #[arg(long)]
    log: bool,
    /// Fixed kernel bandwidth (Silverman's rule when omitted).
    #[arg(long)]
    bandwidth: Option<f64>,
    #[command(flatten)]
    plot: PlotArgs,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct CascadeArgs {
    #[arg(long)]
    border_scores: PathBuf,
    #[arg(long)]
    border_manifest: PathBuf,
    #[arg(long)]
    source_scores: PathBuf,
    #[arg(long)]
    source_manifest: PathBuf,
    /// Border-stage threshold: literal or `auto:bpcerN`.
    #[arg(long, default_value = "auto:bpcer100")]
    tau_border: String,
    /// Source-stage threshold: literal or `auto:bpcerN`.
    #[arg(long, default_value = "auto:bpcer100")]
    tau_source: String,
    #[arg(long, default_value = "json", value_parser = ["json", "markdown"])]
    format: String,
    #[arg(long)]
    dataset: Option<String>,
    /// Report output path.
    #[arg(long)]
    out: PathBuf,
    /// Optional cascade confusion matrix SVG (full mode).
    #[arg(long)]
    confusion: Option<PathBuf>,
    /// Optional cascade confusion matrix SVG (binary mode).
    #[arg(long)]
    confusion_binary: Option<PathBuf>,
    #[command(flatten)]
    plot: PlotArgs,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct WeightsArgs {
    /// Inline counts, e.g. `bonafide=21139,composite=21448,synthetic=19862`.
    #[arg(long, conflicts_with = "counts_csv")]
    counts: Option<String>,
    /// Two-column CSV `class,count`.
    #[arg(long)]
    counts_csv: Option<PathBuf>,
    /// Optional JSON output path (weights always print to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct SynthArgs {
    /// Two-class convenience mode (`bonafide` vs `attack`).
    #[arg(long)]
    two_class: bool,
    #[arg(long, default_value_t = 0.6)]
    mu_bf: f64,
    #[arg(long, default_value_t = 0.4)]
    mu_attack: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    /// Samples per class in two-class mode.
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Bona fide generator `label:loc:scale:count` (multi-class mode).
    #[arg(long, conflicts_with = "two_class")]
    bona_fide: Option<String>,
    /// Attack species generator `label:loc:scale:count`; repeatable.
    #[arg(long = "species", conflicts_with = "two_class")]
    species: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Logistic squash center.
    #[arg(long, default_value_t = 0.5)]
    squash_center: f64,
    /// Logistic squash rate.
    #[arg(long, default_value_t = 6.0)]
    squash_rate: f64,
    /// Output directory: writes manifest.json, scores.csv, scores.jsonl.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

enum CliError {
    Usage(String),
    Data(String),
}

impl From<padeval::Error> for CliError {
    fn from(e: padeval::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let _ = e.print();
            return if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            };
        }
    };
    let result = match cli.command {
        Command::Eval(args) => run_eval(args),
        Command::Det(args) => run_det(args),
        Command::Kde(args) => run_kde(args),
        Command::Cascade(args) => run_cascade(args),
        Command::Weights(args) => run_weights(args),
        Command::Synth(args) => run_synth(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Relative output paths resolve against PADEVAL_OUT when set.
fn resolve_out(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(base) = std::env::var("PADEVAL_OUT") {
            if !base.is_empty() {
                return PathBuf::from(base).join(path);
            }
        }
    }
    path.to_path_buf()
}

/// Atomic write: refuse to overwrite without --force, write to a temp file
/// in the target directory, then rename into place.
fn write_atomic(path: &Path, bytes: &[u8], force: bool) -> CliResult<()> {
    let path = resolve_out(path);
    if path.exists() && !force {
        return Err(CliError::Usage(format!(
            "output `{}` exists; pass --force to overwrite",
            path.display()
        )));
    }
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Data(format!("create `{}`: {e}", parent.display())))?;
        }
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Usage(format!("`{}` has no file name", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", file_name.to_string_lossy()));
    fs::write(&tmp, bytes).map_err(|e| CliError::Data(format!("write `{}`: {e}", tmp.display())))?;
    fs::rename(&tmp, &path)
        .map_err(|e| CliError::Data(format!("rename into `{}`: {e}", path.display())))?;
    Ok(())
}

fn read_file(path: &Path) -> CliResult<String> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Data(format!("read `{}`: {e}", path.display())))
}

fn load_set(input: &InputArgs) -> CliResult<(ClassTaxonomy, ScoreSet)> {
    let taxonomy = ClassTaxonomy::parse_manifest(&read_file(&input.manifest)?)?;
    let set = ScoreSet::parse_scores(&read_file(&input.scores)?, &taxonomy)?;
    Ok((taxonomy, set))
}

fn parse_species_selector(text: &str) -> Selector {
    if text == "worst" {
        Selector::Worst
    } else {
        Selector::Species(text.to_string())
    }
}

fn parse_tau_selector(text: &str, flag: &str) -> CliResult<TauSelector> {
    TauSelector::parse(text).map_err(|e| CliError::Usage(format!("{flag}: {e}")))
}

fn dataset_name(explicit: &Option<String>, scores: &Path) -> String {
    explicit.clone().unwrap_or_else(|| {
        scores
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "dataset".to_string())
    })
}

/// DET series with per-species EER for every non-empty species.
fn det_series(set: &ScoreSet) -> CliResult<Vec<(padeval::curves::CurveSeries, f64)>> {
    let mut out = Vec::new();
    for (species, &n) in set
        .taxonomy()
        .attack_species()
        .iter()
        .zip(set.species_counts())
    {
        if n == 0 {
            continue;
        }
        let series = det_curve(set, species)?;
        let e = eer(set, &Selector::Species(species.clone()))?;
        out.push((series, e.eer));
    }
    if out.is_empty() {
        return Err(CliError::Data("no attack species has any records".into()));
    }
    Ok(out)
}

/// One KDE series per non-empty class over the bona-fide-score axis.
fn kde_series(
    set: &ScoreSet,
    bandwidth: Option<f64>,
) -> CliResult<Vec<padeval::curves::DensitySeries>> {
    let xs = linspace01(512);
    let mut out = Vec::new();
    let classes = set.taxonomy().classes();
    for class in classes {
        let samples: Vec<f64> = set
            .records()
            .iter()
            .filter(|r| r.true_label() == class)
            .map(|r| r.bona_fide_score())
            .collect();
        if samples.len() < 2 {
            continue;
        }
        out.push(kde(class, &samples, &xs, bandwidth)?);
    }
    if out.is_empty() {
        return Err(CliError::Data(
            "no class has the 2 records KDE needs".into(),
        ));
    }
    Ok(out)
}

fn run_eval(args: EvalArgs) -> CliResult<()> {
    let (_, set) = load_set(&args.input)?;
    let selector = parse_species_selector(&args.species);
    let tau_sel = parse_tau_selector(&args.tau, "--tau")?;
    let dataset = dataset_name(&args.dataset, &args.input.scores);
    let report = build_report(&set, &selector, &tau_sel, &dataset)?;
    let rendered = match args.format.as_str() {
        "json" => render_report_json(&report),
        _ => render_report_markdown(&report),
    };
    write_atomic(&args.out, rendered.as_bytes(), args.force)?;

    if let Some(dir) = &args.plots {
        let tau = report.chosen_tau;
        let det = det_series(&set)?;
        write_atomic(
            &dir.join("det.svg"),
            render_det_svg(&det, &args.plot.options(&format!("{dataset} — DET")))?.as_bytes(),
            args.force,
        )?;
        // rate-vs-threshold plot for the species that dominates at τ
        let worst = padeval::metrics::apcer_worst(&set, tau)?.1.to_string();
        let curve = eer_curve(&set, &worst)?;
        write_atomic(
            &dir.join("eer.svg"),
            render_eer_svg(&curve, &args.plot.options(&format!("{dataset} — EER curve")))?
                .as_bytes(),
            args.force,
        )?;
        let kdes = kde_series(&set, None)?;
        write_atomic(
            &dir.join("kde-linear.svg"),
            render_kde_svg(
                &kdes,
                KdeScale::Linear,
                &args.plot.options(&format!("{dataset} — score KDE")),
            )?
            .as_bytes(),
            args.force,
        )?;
        write_atomic(
            &dir.join("kde-log.svg"),
            render_kde_svg(
                &kdes,
                KdeScale::Log,
                &args.plot.options(&format!("{dataset} — score KDE (log)")),
            )?
            .as_bytes(),
            args.force,
        )?;
        let full = confusion_matrix(&set, tau, MatrixMode::Full)?;
        write_atomic(
            &dir.join("confusion-full.svg"),
            render_confusion_svg(&full, &args.plot.options(&format!("{dataset} — confusion")))?
                .as_bytes(),
            args.force,
        )?;
        let binary = confusion_matrix(&set, tau, MatrixMode::Binary)?;
        write_atomic(
            &dir.join("confusion-binary.svg"),
            render_confusion_svg(
                &binary,
                &args.plot.options(&format!("{dataset} — confusion (binary)")),
            )?
            .as_bytes(),
            args.force,
        )?;
    }
    Ok(())
}

fn run_det(args: DetArgs) -> CliResult<()> {
    let (_, set) = load_set(&args.input)?;
    let series = det_series(&set)?;
    let svg = render_det_svg(&series, &args.plot.options("DET"))?;
    write_atomic(&args.out, svg.as_bytes(), args.force)
}

fn run_kde(args: KdeArgs) -> CliResult<()> {
    if let Some(h) = args.bandwidth {
        if !(h > 0.0 && h.is_finite()) {
            return Err(CliError::Usage(format!(
                "--bandwidth must be positive, got {h}"
            )));
        }
    }
    let (_, set) = load_set(&args.input)?;
    let series = kde_series(&set, args.bandwidth)?;
    let scale = if args.log {
        KdeScale::Log
    } else {
        KdeScale::Linear
    };
    let svg = render_kde_svg(&series, scale, &args.plot.options("score KDE"))?;
    write_atomic(&args.out, svg.as_bytes(), args.force)
}

fn run_cascade(args: CascadeArgs) -> CliResult<()> {
    let border_tax = ClassTaxonomy::parse_manifest(&read_file(&args.border_manifest)?)?;
    let border = ScoreSet::parse_scores(&read_file(&args.border_scores)?, &border_tax)?;
    let source_tax = ClassTaxonomy::parse_manifest(&read_file(&args.source_manifest)?)?;
    let source = ScoreSet::parse_scores(&read_file(&args.source_scores)?, &source_tax)?;

    let tau_b_sel = parse_tau_selector(&args.tau_border, "--tau-border")?;
    let tau_s_sel = parse_tau_selector(&args.tau_source, "--tau-source")?;
    // per-stage thresholds come from each stage's own scores
    let tau_border = resolve_tau(&border, &Selector::Worst, &tau_b_sel)?;
    let tau_source = resolve_tau(&source, &Selector::Worst, &tau_s_sel)?;

    let cfg = padeval::cascade::CascadeConfig::new(border, source, tau_border, tau_source)?;
    let dataset = dataset_name(&args.dataset, &args.border_scores);
    let report = build_cascade_report(
        &cfg,
        &tau_b_sel.to_string(),
        &tau_s_sel.to_string(),
        &dataset,
    )?;
    let rendered = match args.format.as_str() {
        "json" => render_cascade_json(&report),
        _ => render_cascade_markdown(&report),
    };
    write_atomic(&args.out, rendered.as_bytes(), args.force)?;

    if let Some(path) = &args.confusion {
        let m = padeval::cascade::cascade_confusion(&cfg, MatrixMode::Full)?;
        let svg = render_confusion_svg(&m, &args.plot.options("cascade confusion"))?;
        write_atomic(path, svg.as_bytes(), args.force)?;
    }
    if let Some(path) = &args.confusion_binary {
        let m = padeval::cascade::cascade_confusion(&cfg, MatrixMode::Binary)?;
        let svg = render_confusion_svg(&m, &args.plot.options("cascade confusion (binary)"))?;
        write_atomic(path, svg.as_bytes(), args.force)?;
    }
    Ok(())
}

fn run_weights(args: WeightsArgs) -> CliResult<()> {
    let counts = match (&args.counts, &args.counts_csv) {
        (Some(inline), None) => ClassCounts::parse_inline(inline)?,
        (None, Some(path)) => ClassCounts::parse_csv(&read_file(path)?)?,
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --counts or --counts-csv".into(),
            ))
        }
    };
    let weights = class_weights(&counts);
    for (name, w) in &weights {
        println!("{name} {:.4}", padeval::report::round_pct4(w / 100.0));
    }
    if let Some(out) = &args.out {
        let mut doc = String::from("{\n");
        for (i, (name, w)) in weights.iter().enumerate() {
            let comma = if i + 1 < weights.len() { "," } else { "" };
            doc.push_str(&format!("  {}: {w}{comma}\n", json_key(name)));
        }
        doc.push_str("}\n");
        write_atomic(out, doc.as_bytes(), args.force)?;
    }
    Ok(())
}

fn json_key(s: &str) -> String {
    serde_jsonish_escape(s)
}

fn serde_jsonish_escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn parse_class_spec(text: &str, flag: &str) -> CliResult<ClassSpec> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 4 {
        return Err(CliError::Usage(format!(
            "{flag}: expected `label:loc:scale:count`, got `{text}`"
        )));
    }
    let loc: f64 = parts[1]
        .parse()
        .map_err(|_| CliError::Usage(format!("{flag}: bad loc `{}`", parts[1])))?;
    let scale: f64 = parts[2]
        .parse()
        .map_err(|_| CliError::Usage(format!("{flag}: bad scale `{}`", parts[2])))?;
    let count: usize = parts[3]
        .parse()
        .map_err(|_| CliError::Usage(format!("{flag}: bad count `{}`", parts[3])))?;
    Ok(ClassSpec::new(parts[0], loc, scale, count))
}

fn run_synth(args: SynthArgs) -> CliResult<()> {
    let squash = Squash::Logistic {
        center: args.squash_center,
        rate: args.squash_rate,
    };
    let set = if args.two_class {
        let spec = SynthSpec {
            bona_fide: ClassSpec::new("bonafide", args.mu_bf, args.sigma, args.n),
            species: vec![ClassSpec::new("attack", args.mu_attack, args.sigma, args.n)],
            seed: args.seed,
            squash,
        };
        gen_multiclass(&spec)?
    } else {
        let bona_fide = args.bona_fide.as_deref().ok_or_else(|| {
            CliError::Usage("pass --two-class, or --bona-fide with --species".into())
        })?;
        if args.species.is_empty() {
            return Err(CliError::Usage("at least one --species is required".into()));
        }
        let spec = SynthSpec {
            bona_fide: parse_class_spec(bona_fide, "--bona-fide")?,
            species: args
                .species
                .iter()
                .map(|s| parse_class_spec(s, "--species"))
                .collect::<CliResult<Vec<_>>>()?,
            seed: args.seed,
            squash,
        };
        gen_multiclass(&spec)?
    };

    let dir = args.out.clone();
    write_atomic(
        &dir.join("manifest.json"),
        set.taxonomy().to_manifest_json().as_bytes(),
        args.force,
    )?;
    write_atomic(&dir.join("scores.csv"), set.to_csv().as_bytes(), args.force)?;
    write_atomic(
        &dir.join("scores.jsonl"),
        set.to_jsonl().as_bytes(),
        args.force,
    )?;
    Ok(())
}
