//! Command-line front end: `metrics`, `crossover`, `segments` and `plot`.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufReader, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::analysis::{analyze, AnalysisOptions};
use crate::curve::{
    crossover_beta, CurveError, DEFAULT_BETA_MAX, DEFAULT_BETA_MIN, DEFAULT_GRID_POINTS,
};
use crate::ingest::{self, Payload, RunTable, DEFAULT_POSITIVE_LABEL};
use crate::metrics::{f_beta_unchecked, simple_rates};
use crate::report::{
    emit_segments_csv, emit_segments_json, render_svg, RenderOptions, ReportDocument,
};
use crate::stats::DEFAULT_ALPHA;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_MISSING_NAME: i32 = 3;
pub const EXIT_NOT_HOLDOUT: i32 = 4;
pub const EXIT_NO_FOLDS_FOR_SIGNIFICANCE: i32 = 5;
pub const EXIT_WRITE: i32 = 6;

#[derive(Debug, Parser)]
#[command(
    name = "fbplot",
    version,
    about = "F-beta dominance analysis for pools of binary classifiers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print simple rates and F0.5/F1/F2 for every classifier and fold.
    Metrics(CommonArgs),
    /// Print the beta at which two hold-out classifiers swap ranks.
    Crossover {
        #[command(flatten)]
        common: CommonArgs,
        name_a: String,
        name_b: String,
    },
    /// Print the dominance segments and write the requested reports.
    Segments(CommonArgs),
    /// Write `<out>.svg` plus any requested reports.
    Plot(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputKind {
    CountsCsv,
    PredictionsCsv,
    RatesJson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum)]
pub enum OutputFormat {
    Svg,
    Json,
    Csv,
}

#[derive(Debug, Clone, Args)]
struct CommonArgs {
    #[arg(long)]
    input: PathBuf,
    /// Defaults to rates-json for `.json` files and counts-csv otherwise.
    #[arg(long, value_enum)]
    kind: Option<InputKind>,
    #[arg(long, default_value = DEFAULT_POSITIVE_LABEL)]
    positive_label: String,
    #[arg(long, default_value_t = DEFAULT_BETA_MIN)]
    beta_min: f64,
    #[arg(long, default_value_t = DEFAULT_BETA_MAX)]
    beta_max: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    /// Significance level of the one-sided paired t-tests [default: 0.05].
    #[arg(long)]
    alpha: Option<f64>,
    /// Divide alpha by the number of competitors.
    #[arg(long)]
    bonferroni: bool,
    #[arg(long, default_value = "fbeta_plot")]
    out: String,
    #[arg(long, value_enum, value_delimiter = ',')]
    formats: Vec<OutputFormat>,
}

/// Validated settings shared by all subcommands.
#[derive(Debug, Clone, PartialEq)]
pub struct CliConfig {
    pub input_path: PathBuf,
    pub input_kind: InputKind,
    pub positive_label: String,
    pub analysis: AnalysisOptions,
    /// True when the user asked for significance explicitly via `--alpha` or `--bonferroni`.
    pub significance_requested: bool,
    pub outputs: BTreeSet<OutputFormat>,
    pub output_prefix: String,
}

impl CommonArgs {
    fn into_config(self) -> Result<CliConfig, String> {
        if !(self.beta_min > 0.0 && self.beta_min < self.beta_max && self.beta_max.is_finite()) {
            return Err(format!(
                "need 0 < --beta-min < --beta-max, got {} and {}",
                self.beta_min, self.beta_max
            ));
        }
        if self.grid_points < 2 {
            return Err("--grid-points must be at least 2".into());
        }
        let alpha = self.alpha.unwrap_or(DEFAULT_ALPHA);
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(format!("--alpha must lie in (0, 1), got {alpha}"));
        }
        let input_kind = self.kind.unwrap_or_else(|| {
            if self.input.extension().is_some_and(|e| e == "json") {
                InputKind::RatesJson
            } else {
                InputKind::CountsCsv
            }
        });
        Ok(CliConfig {
            input_path: self.input,
            input_kind,
            positive_label: self.positive_label,
            analysis: AnalysisOptions {
                beta_min: self.beta_min,
                beta_max: self.beta_max,
                grid_points: self.grid_points,
                alpha,
                bonferroni: self.bonferroni,
            },
            significance_requested: self.alpha.is_some() || self.bonferroni,
            outputs: self.formats.into_iter().collect(),
            output_prefix: self.out,
        })
    }
}

/// A failed command: exit code plus the message for standard error.
struct Failure(i32, String);

type CmdResult = Result<(), Failure>;

fn io_fail(e: std::io::Error) -> Failure {
    Failure(EXIT_WRITE, format!("write failed: {e}"))
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{text}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{text}");
                    EXIT_USAGE
                }
            };
        }
    };

    let (common, names) = match cli.command {
        Command::Metrics(ref c) | Command::Segments(ref c) | Command::Plot(ref c) => {
            (c.clone(), None)
        }
        Command::Crossover {
            ref common,
            ref name_a,
            ref name_b,
        } => (common.clone(), Some((name_a.clone(), name_b.clone()))),
    };
    let config = match common.into_config() {
        Ok(c) => c,
        Err(msg) => {
            let _ = writeln!(stderr, "error: {msg}");
            return EXIT_USAGE;
        }
    };

    let result = match cli.command {
        Command::Metrics(_) => cmd_metrics(&config, stdout, stderr),
        Command::Crossover { .. } => {
            let (a, b) = names.expect("crossover names");
            cmd_crossover(&config, &a, &b, stdout, stderr)
        }
        Command::Segments(_) => cmd_segments(&config, stdout, stderr),
        Command::Plot(_) => cmd_plot(&config, stderr),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure(code, msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            code
        }
    }
}

fn load_table(config: &CliConfig, stderr: &mut dyn Write) -> Result<RunTable, Failure> {
    let path = &config.input_path;
    let file =
        File::open(path).map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let reader = BufReader::new(file);
    let table = match config.input_kind {
        InputKind::CountsCsv => ingest::parse_counts_csv(reader),
        InputKind::PredictionsCsv => ingest::parse_predictions_csv(reader, &config.positive_label),
        InputKind::RatesJson => ingest::parse_rates_json(reader),
    }
    .map_err(|e| Failure(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    for w in &table.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    Ok(table)
}

fn load_records(
    config: &CliConfig,
    stderr: &mut dyn Write,
) -> Result<Vec<crate::curve::ClassifierRecord>, Failure> {
    let table = load_table(config, stderr)?;
    ingest::to_records(&table).map_err(|e| Failure(EXIT_PARSE, e.to_string()))
}

pub fn cmd_metrics_header() -> &'static str {
    "classifier,fold,acc,tpr,tnr,ppv,f0.5,f1,f2"
}

fn cmd_metrics(config: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let table = load_table(config, stderr)?;
    let mut rows = Vec::new();
    for e in table.entries() {
        let Payload::Counts(c) = e.payload else {
            return Err(Failure(
                EXIT_PARSE,
                "metrics needs confusion counts or predictions input".into(),
            ));
        };
        let r = simple_rates(&c).map_err(|err| {
            Failure(
                EXIT_PARSE,
                format!("classifier {:?}, fold {}: {err}", e.classifier, e.fold),
            )
        })?;
        if r.ppv_undefined {
            let _ = writeln!(
                stderr,
                "warning: classifier {:?}, fold {} never predicts the positive class; ppv set to 0",
                e.classifier, e.fold
            );
        }
        let p = r.point();
        rows.push(format!(
            "{},{},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
            e.classifier,
            e.fold,
            r.acc,
            r.tpr,
            r.tnr,
            r.ppv,
            f_beta_unchecked(p, 0.5),
            f_beta_unchecked(p, 1.0),
            f_beta_unchecked(p, 2.0)
        ));
    }
    writeln!(stdout, "{}", cmd_metrics_header()).map_err(io_fail)?;
    for row in rows {
        writeln!(stdout, "{row}").map_err(io_fail)?;
    }
    Ok(())
}

fn cmd_crossover(
    config: &CliConfig,
    name_a: &str,
    name_b: &str,
    stdout: &mut dyn Write,
    stderr: &mut dyn Write,
) -> CmdResult {
    let records = load_records(config, stderr)?;
    if let Some(r) = records.iter().find(|r| r.folds.len() > 1) {
        return Err(Failure(
            EXIT_NOT_HOLDOUT,
            format!(
                "classifier {:?} has {} folds; crossover needs hold-out input",
                r.name,
                r.folds.len()
            ),
        ));
    }
    let find = |name: &str| {
        records
            .iter()
            .find(|r| r.name == name)
            .map(|r| r.folds[0])
            .ok_or_else(|| Failure(EXIT_MISSING_NAME, format!("classifier {name:?} not found")))
    };
    let (a, b) = (find(name_a)?, find(name_b)?);
    let line = match crossover_beta(a, b) {
        Ok(Some(beta)) => format!("{beta:.9}"),
        Ok(None) => {
            let winner = if f_beta_unchecked(a, 1.0) >= f_beta_unchecked(b, 1.0) {
                name_a
            } else {
                name_b
            };
            format!("none ({winner} dominates)")
        }
        Err(CurveError::DegenerateInput) => "none (identical)".to_string(),
        Err(e) => return Err(Failure(EXIT_PARSE, e.to_string())),
    };
    writeln!(stdout, "{line}").map_err(io_fail)
}

fn build_document(config: &CliConfig, stderr: &mut dyn Write) -> Result<ReportDocument, Failure> {
    let records = load_records(config, stderr)?;
    if config.significance_requested && records.first().is_some_and(|r| r.folds.len() == 1) {
        return Err(Failure(
            EXIT_NO_FOLDS_FOR_SIGNIFICANCE,
            "significance testing needs cross-validation folds; input is hold-out".into(),
        ));
    }
    analyze(&records, &config.analysis).map_err(|e| Failure(EXIT_PARSE, e.to_string()))
}

fn write_outputs(config: &CliConfig, doc: &ReportDocument, stderr: &mut dyn Write) -> CmdResult {
    for format in &config.outputs {
        let (ext, text) = match format {
            OutputFormat::Svg => (
                "svg",
                render_svg(doc, &RenderOptions::default())
                    .map_err(|e| Failure(EXIT_PARSE, e.to_string()))?,
            ),
            OutputFormat::Json => ("json", emit_segments_json(doc)),
            OutputFormat::Csv => ("csv", emit_segments_csv(doc)),
        };
        let path = format!("{}.{ext}", config.output_prefix);
        std::fs::write(&path, text).map_err(|e| Failure(EXIT_WRITE, format!("{path}: {e}")))?;
        let _ = writeln!(stderr, "wrote {path}");
    }
    Ok(())
}

fn cmd_segments(config: &CliConfig, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult {
    let doc = build_document(config, stderr)?;
    write_outputs(config, &doc, stderr)?;
    for s in &doc.segments {
        writeln!(
            stdout,
            "[{:.6}, {:.6}] {}{}",
            s.beta_lo,
            s.beta_hi,
            s.winner,
            if s.significant { " (significant)" } else { "" }
        )
        .map_err(io_fail)?;
    }
    Ok(())
}

fn cmd_plot(config: &CliConfig, stderr: &mut dyn Write) -> CmdResult {
    let doc = build_document(config, stderr)?;
    let mut config = config.clone();
    config.outputs.insert(OutputFormat::Svg);
    write_outputs(&config, &doc, stderr)
}
