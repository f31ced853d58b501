//! Command-line surface. Exit codes: 0 all checks pass, 1 verification
//! failure, 2 input error.

pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::catalog;
use crate::congruence::{
    build_tp, demo_theorem_closure, element_from_word, separate, verify_witness, CongruenceError, SeparationOutcome,
};
use crate::crystal::CrystalGroupSpec;
use crate::embed::{embed_pipeline, EmbedError, EmbedOptions, EmbeddingResult};
use crate::linalg::{format_rational, RMatrix, SymmetricForm};
use crate::verify::{full_report, VerificationReport, VerifyConfig};
use format::{
    parse_group_file, parse_matrix_file, parse_report, pretty, report_to_value, serialize_group_file,
    verification_value, LoadedReport, ReportError, SeparationRecord,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "flatcusp", version, about = "Exact cusp embeddings of flat-manifold groups")]
struct Cli {
    /// ASCII-only output.
    #[arg(long, global = true)]
    plain: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Text,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build and verify the embedding of a group file or `catalog:<name>`.
    Embed {
        input: String,
        /// Positive definite seed for the holonomy average (JSON matrix).
        #[arg(long)]
        seed_form: Option<PathBuf>,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
        #[arg(long, default_value_t = VerifyConfig::default().seed)]
        seed: u64,
    },
    /// Separate an element from T_p by a congruence witness.
    Separate {
        report: PathBuf,
        /// Word in the generators, e.g. "a b^-1".
        #[arg(long, conflicts_with = "matrix", required_unless_present = "matrix")]
        element: Option<String>,
        /// JSON file with an explicit integral matrix.
        #[arg(long)]
        matrix: Option<PathBuf>,
        #[arg(long)]
        p: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        /// Write the report with this separation appended.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhibit r with T_rp inside the translations of the group.
    Closure {
        report: PathBuf,
        #[arg(long)]
        p: u64,
        #[arg(long)]
        element: Option<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Built-in groups.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Re-run every check from a serialized report.
    Verify {
        report: PathBuf,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
}

#[derive(Debug, Subcommand)]
enum CatalogAction {
    List,
    Show { name: String },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    plain: bool,
}

impl Io<'_> {
    fn input_error(&mut self, msg: impl std::fmt::Display) -> i32 {
        let _ = writeln!(self.err, "error: {msg}");
        EXIT_INPUT
    }

    /// `unicode` unless `--plain`.
    fn sym<'s>(&self, unicode: &'s str, ascii: &'s str) -> &'s str {
        if self.plain {
            ascii
        } else {
            unicode
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return code;
        }
    };
    let mut io = Io {
        out,
        err,
        plain: cli.plain,
    };
    match cli.command {
        Command::Embed {
            input,
            seed_form,
            out,
            format,
            samples,
            max_len,
            seed,
        } => {
            let config = VerifyConfig {
                samples,
                max_word_len: max_len,
                seed,
            };
            cmd_embed(&mut io, &input, seed_form.as_deref(), out.as_deref(), format, config)
        }
        Command::Separate {
            report,
            element,
            matrix,
            p,
            format,
            out,
        } => cmd_separate(
            &mut io,
            &report,
            element.as_deref(),
            matrix.as_deref(),
            p,
            format,
            out.as_deref(),
        ),
        Command::Closure {
            report,
            p,
            element,
            format,
        } => cmd_closure(&mut io, &report, p, element.as_deref(), format),
        Command::Catalog { action } => cmd_catalog(&mut io, action),
        Command::Verify { report, format } => cmd_verify(&mut io, &report, format),
    }
}

fn read(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

pub fn load_group(input: &str) -> Result<CrystalGroupSpec, String> {
    match input.strip_prefix("catalog:") {
        Some(name) => catalog::lookup(name).map_err(|e| e.to_string()),
        None => {
            let text = read(Path::new(input))?;
            parse_group_file(&text).map_err(|e| format!("{input}: {e}"))
        }
    }
}

fn cmd_embed(
    io: &mut Io,
    input: &str,
    seed_form: Option<&Path>,
    out: Option<&Path>,
    format: OutputFormat,
    config: VerifyConfig,
) -> i32 {
    let spec = match load_group(input) {
        Ok(s) => s,
        Err(e) => return io.input_error(e),
    };
    let seed = match seed_form {
        None => None,
        Some(path) => {
            let parsed = read(path).and_then(|t| {
                parse_matrix_file(&t)
                    .map_err(|e| format!("{}: {e}", path.display()))
                    .and_then(|m| SymmetricForm::new(m).map_err(|e| format!("{}: {e}", path.display())))
            });
            match parsed {
                Ok(s) => Some(s),
                Err(e) => return io.input_error(e),
            }
        }
    };
    let options = EmbedOptions {
        seed,
        verify: config.clone(),
        ..EmbedOptions::default()
    };
    let (spec, result, report) = match embed_pipeline(&spec, &options) {
        Ok(x) => x,
        Err(EmbedError::Verification(report)) => {
            print_failures(io, &report);
            return EXIT_VERIFY;
        }
        Err(e) => return io.input_error(e),
    };
    let value = report_to_value(&spec, &result, &report, &config, &[]);
    if let Some(path) = out {
        if let Err(e) = std::fs::write(path, pretty(&value)) {
            return io.input_error(format!("{}: {e}", path.display()));
        }
    }
    let _ = match format {
        OutputFormat::Json => write!(io.out, "{}", pretty(&value)),
        OutputFormat::Text => write_embedding_text(io, &result, &report),
    };
    EXIT_OK
}

fn print_failures(io: &mut Io, report: &VerificationReport) {
    for check in report.failures() {
        let _ = writeln!(io.err, "FAIL {}", check.name);
        if let Some(w) = &check.witness {
            let _ = writeln!(io.err, "  witness: {}", serde_json::to_string(w).unwrap_or_default());
        }
    }
}

fn write_matrix(io: &mut Io, m: &RMatrix) -> std::io::Result<()> {
    for line in m.to_string().lines() {
        writeln!(io.out, "  {line}")?;
    }
    Ok(())
}

fn write_embedding_text(io: &mut Io, result: &EmbeddingResult, report: &VerificationReport) -> std::io::Result<()> {
    let q = io.sym("Q\u{2032}", "Q'");
    let hat = |name: &str| {
        if io.plain {
            format!("Phi({name})")
        } else {
            format!("\u{3a6}\u{302}({name})")
        }
    };
    let labels: Vec<String> = result.generator_names.iter().map(|n| hat(n)).collect();
    writeln!(io.out, "c = {}, K = {}", result.c, result.k)?;
    writeln!(io.out, "D =")?;
    write_matrix(io, result.d.matrix())?;
    writeln!(io.out, "{q} =")?;
    write_matrix(io, result.form.matrix())?;
    writeln!(io.out, "signature of {q}: {}", result.form.signature())?;
    for (name, col) in result.generator_names.iter().zip(&result.cusp_columns) {
        let entries: Vec<String> = col.iter().map(format_rational).collect();
        writeln!(io.out, "v_{name} = ({})", entries.join(", "))?;
    }
    for (label, m) in labels.iter().zip(&result.matrices) {
        writeln!(io.out, "{label} =")?;
        write_matrix(io, m)?;
    }
    for check in &report.checks {
        writeln!(io.out, "{} {}", if check.passed { "pass" } else { "FAIL" }, check.name)?;
    }
    Ok(())
}

fn load_report(io: &mut Io, path: &Path) -> Result<LoadedReport, i32> {
    let text = read(path).map_err(|e| io.input_error(e))?;
    parse_report(&text).map_err(|e| match e {
        ReportError::Malformed(f) => io.input_error(format!("{}: {f}", path.display())),
        ReportError::Invalid(check) => {
            let mut report = VerificationReport::default();
            report.checks.push(check);
            print_failures(io, &report);
            EXIT_VERIFY
        }
    })
}

fn outcome_value(outcome: &SeparationOutcome) -> Value {
    serde_json::to_value(outcome).expect("outcome serializes")
}

fn write_outcome(
    io: &mut Io,
    label: &str,
    outcome: &SeparationOutcome,
    certified: Option<bool>,
) -> std::io::Result<()> {
    match outcome {
        SeparationOutcome::Member { translation } => {
            writeln!(io.out, "{label}: member of T_p (translation by {translation})")
        }
        SeparationOutcome::OutsideStabilizer { image_of_v1 } => {
            writeln!(
                io.out,
                "{label}: outside-stabilizer (v1 maps to {image_of_v1}); no witness attempted"
            )
        }
        SeparationOutcome::Separated(w) => {
            writeln!(io.out, "{label}: separated from T_{}", w.p)?;
            writeln!(io.out, "case: {}", w.case)?;
            writeln!(io.out, "modulus: {}", w.modulus)?;
            writeln!(io.out, "selected entry: ({}, {}) = {}", w.entry.0, w.entry.1, w.entry.2)?;
            writeln!(io.out, "image mod {}:", w.modulus)?;
            for row in &w.image.entries {
                let cells: Vec<String> = row.iter().map(u64::to_string).collect();
                writeln!(io.out, "  [ {} ]", cells.join(" "))?;
            }
            writeln!(
                io.out,
                "|image of T_{} mod {}| = {}, image not among them",
                w.p,
                w.modulus,
                w.tp_image.len()
            )?;
            if let Some(ok) = certified {
                writeln!(io.out, "independent re-check: {}", if ok { "pass" } else { "FAIL" })?;
            }
            Ok(())
        }
    }
}

fn congruence_exit(io: &mut Io, e: CongruenceError) -> i32 {
    io.input_error(e)
}

/// The element named on the command line, as a matrix plus a label.
fn resolve_element(
    io: &mut Io,
    loaded: &LoadedReport,
    element: Option<&str>,
    matrix: Option<&Path>,
) -> Result<(String, RMatrix), i32> {
    match (element, matrix) {
        (Some(text), _) => {
            let word = loaded.spec.parse_word(text).map_err(|e| io.input_error(e))?;
            let m = element_from_word(&loaded.result, &word).map_err(|e| congruence_exit(io, e))?;
            Ok((text.to_string(), m))
        }
        (None, Some(path)) => {
            let text = read(path).map_err(|e| io.input_error(e))?;
            let m = parse_matrix_file(&text).map_err(|e| io.input_error(format!("{}: {e}", path.display())))?;
            Ok((path.display().to_string(), m))
        }
        (None, None) => Err(io.input_error("one of --element or --matrix is required")),
    }
}

fn cmd_separate(
    io: &mut Io,
    report_path: &Path,
    element: Option<&str>,
    matrix: Option<&Path>,
    p: u64,
    format: OutputFormat,
    out: Option<&Path>,
) -> i32 {
    let loaded = match load_report(io, report_path) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let (label, gamma) = match resolve_element(io, &loaded, element, matrix) {
        Ok(x) => x,
        Err(code) => return code,
    };
    let tp = match build_tp(&loaded.result, p) {
        Ok(tp) => tp,
        Err(e) => return congruence_exit(io, e),
    };
    let outcome = match separate(&gamma, &tp, &loaded.result) {
        Ok(o) => o,
        Err(e @ (CongruenceError::NotIntegral { .. } | CongruenceError::NotIsometry(_))) => {
            let _ = writeln!(io.err, "note: {e}");
            SeparationOutcome::OutsideStabilizer {
                image_of_v1: gamma.mul_vec(&loaded.result.v1),
            }
        }
        Err(e) => return congruence_exit(io, e),
    };
    let certified = match outcome.witness() {
        Some(w) => match verify_witness(&gamma, &tp, w) {
            Ok(ok) => Some(ok),
            Err(e) => return congruence_exit(io, e),
        },
        None => None,
    };
    if let Some(path) = out {
        let mut separations = loaded.separations.clone();
        separations.push(SeparationRecord {
            element: label.clone(),
            matrix: gamma.clone(),
            p,
            outcome: outcome_value(&outcome),
        });
        let report = full_report(&loaded.result, &loaded.spec, &loaded.config);
        let value = report_to_value(&loaded.spec, &loaded.result, &report, &loaded.config, &separations);
        if let Err(e) = std::fs::write(path, pretty(&value)) {
            return io.input_error(format!("{}: {e}", path.display()));
        }
    }
    let _ = match format {
        OutputFormat::Json => write!(
            io.out,
            "{}",
            pretty(&json!({ "element": label, "p": p, "outcome": outcome_value(&outcome), "certified": certified }))
        ),
        OutputFormat::Text => write_outcome(io, &label, &outcome, certified),
    };
    if certified == Some(false) {
        EXIT_VERIFY
    } else {
        EXIT_OK
    }
}

fn cmd_closure(io: &mut Io, report_path: &Path, p: u64, element: Option<&str>, format: OutputFormat) -> i32 {
    let loaded = match load_report(io, report_path) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let gamma = match element {
        None => None,
        Some(_) => match resolve_element(io, &loaded, element, None) {
            Ok((_, m)) => Some(m),
            Err(code) => return code,
        },
    };
    let report = match demo_theorem_closure(&loaded.result, &loaded.spec, p, gamma.as_ref()) {
        Ok(r) => r,
        Err(e) => return congruence_exit(io, e),
    };
    let _ = match format {
        OutputFormat::Json => write!(
            io.out,
            "{}",
            pretty(&serde_json::to_value(&report).expect("serializes"))
        ),
        OutputFormat::Text => (|| -> std::io::Result<()> {
            let le = io.sym("\u{2264}", "<=");
            let cap = io.sym("\u{2229}", "cap");
            writeln!(io.out, "p = {}", report.p)?;
            writeln!(
                io.out,
                "translation lattice elementary divisors: {}",
                report.elementary_divisors.join(", ")
            )?;
            let basis: Vec<String> = report.intersection_basis.iter().map(ToString::to_string).collect();
            writeln!(io.out, "T_Gamma {cap} T_p basis: {}", basis.join(" "))?;
            writeln!(io.out, "r = {}", report.r)?;
            writeln!(
                io.out,
                "T_rp {le} T_Gamma {cap} T_p: {}; T_rp {le} Gamma: {}",
                report.trp_in_intersection, report.trp_in_gamma
            )?;
            let label = match &report.gamma_translation {
                Some(t) => format!("translation by {t}"),
                None => element.unwrap_or("element").to_string(),
            };
            write_outcome(io, &label, &report.outcome, None)
        })(),
    };
    if report.holds() {
        EXIT_OK
    } else {
        EXIT_VERIFY
    }
}

fn cmd_catalog(io: &mut Io, action: CatalogAction) -> i32 {
    match action {
        CatalogAction::List => {
            for name in catalog::names() {
                let spec = catalog::lookup(name).expect("listed");
                let _ = writeln!(
                    io.out,
                    "{name}\tdim {}\t{} generators",
                    spec.dim(),
                    spec.generators().len()
                );
            }
            EXIT_OK
        }
        CatalogAction::Show { name } => match catalog::lookup(&name) {
            Ok(spec) => {
                let _ = write!(io.out, "{}", serialize_group_file(&spec));
                EXIT_OK
            }
            Err(e) => io.input_error(e),
        },
    }
}

fn cmd_verify(io: &mut Io, report_path: &Path, format: OutputFormat) -> i32 {
    let loaded = match load_report(io, report_path) {
        Ok(l) => l,
        Err(code) => return code,
    };
    let report = full_report(&loaded.result, &loaded.spec, &loaded.config);
    let mut separations_ok = true;
    let mut separation_lines = Vec::new();
    for (i, rec) in loaded.separations.iter().enumerate() {
        let fresh =
            build_tp(&loaded.result, rec.p).and_then(|tp| separate(&rec.matrix, &tp, &loaded.result).map(|o| (tp, o)));
        let ok = match fresh {
            Ok((tp, outcome)) => {
                outcome_value(&outcome) == rec.outcome
                    && outcome
                        .witness()
                        .map_or(Ok(true), |w| verify_witness(&rec.matrix, &tp, w))
                        .unwrap_or(false)
            }
            // recorded as outside the stabilizer because the element was rejected
            Err(CongruenceError::NotIntegral { .. } | CongruenceError::NotIsometry(_)) => {
                rec.outcome.get("outcome") == Some(&json!("outside-stabilizer"))
            }
            Err(_) => false,
        };
        separations_ok &= ok;
        separation_lines.push(format!(
            "{} separation[{i}] ({}, p = {})",
            if ok { "pass" } else { "FAIL" },
            rec.element,
            rec.p
        ));
    }
    let _ = match format {
        OutputFormat::Json => write!(
            io.out,
            "{}",
            pretty(&json!({ "verification": verification_value(&report), "separations_ok": separations_ok }))
        ),
        OutputFormat::Text => (|| -> std::io::Result<()> {
            for check in &report.checks {
                writeln!(io.out, "{} {}", if check.passed { "pass" } else { "FAIL" }, check.name)?;
            }
            for line in &separation_lines {
                writeln!(io.out, "{line}")?;
            }
            Ok(())
        })(),
    };
    if report.passed() && separations_ok {
        EXIT_OK
    } else {
        print_failures(io, &report);
        EXIT_VERIFY
    }
}
