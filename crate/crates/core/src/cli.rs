//! The `anp` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analyzer::{
    check_desired_run, eval_pdl, explore_ceremony, parse_query, pomset_of, sorted_traces,
    TraceReport, Verdict,
};
use crate::ceremony::{compile, parse_ceremony_bytes, validate, CeremonySpec, Diagnostic};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_NO_COMPLETE_TRACE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "anp", version, about = "Compile and explore security ceremonies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a ceremony
    Check(CliConfig),
    /// Print the compiled process
    Compile(CliConfig),
    /// Print every maximal trace and its run
    Run(CliConfig),
    /// Check every complete run against the desired run
    Verify(CliConfig),
    /// Evaluate a query on every complete run
    Query(CliConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Args)]
pub struct CliConfig {
    pub input_path: PathBuf,
    #[arg(long = "depth", default_value_t = 64)]
    pub depth_bound: usize,
    #[arg(long = "unfold", default_value_t = 2)]
    pub unfold_budget: usize,
    #[arg(long = "format", value_enum, default_value_t = Format::Text)]
    pub output_format: Format,
    #[arg(long = "query")]
    pub query_string: Option<String>,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    color: bool,
}

impl Io<'_> {
    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    fn diagnostics(&mut self, file: &str, diags: &[Diagnostic]) {
        for d in diags {
            let line = d.render(file);
            let line = if d.is_error() {
                self.paint("31", &line)
            } else {
                self.paint("33", &line)
            };
            let _ = writeln!(self.err, "{line}");
        }
    }
}

/// Runs one invocation and returns its exit code. Output and diagnostics go
/// to the given writers.
pub fn run_cli<A, T>(args: A, out: &mut dyn Write, err: &mut dyn Write, color: bool) -> i32
where
    A: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_IO } else { EXIT_OK };
            let text = e.to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err, color };
    execute(&cli.command, &mut io)
}

fn execute(cmd: &Command, io: &mut Io<'_>) -> i32 {
    let cfg = match cmd {
        Command::Check(c)
        | Command::Compile(c)
        | Command::Run(c)
        | Command::Verify(c)
        | Command::Query(c) => c,
    };
    let file = cfg.input_path.display().to_string();
    let bytes = match std::fs::read(&cfg.input_path) {
        Ok(b) => b,
        Err(e) => {
            let _ = writeln!(io.err, "{file}: {e}");
            return EXIT_IO;
        }
    };
    let json = cfg.output_format == Format::Json;
    let spec = match parse_ceremony_bytes(&bytes) {
        Ok(s) => s,
        Err(diags) => return report_diags(io, &file, &diags, json),
    };
    let diags = validate(&spec);
    if matches!(cmd, Command::Check(_)) {
        let code = report_diags(io, &file, &diags, json);
        if code == EXIT_OK && !json {
            let _ = writeln!(io.out, "{file}: ok");
        }
        return code;
    }
    if diags.iter().any(Diagnostic::is_error) {
        return report_diags(io, &file, &diags, json);
    }
    io.diagnostics(&file, &diags);

    match cmd {
        Command::Compile(_) => cmd_compile(io, &spec, json),
        Command::Run(_) => cmd_run(io, &spec, cfg),
        Command::Verify(_) => cmd_verify(io, &spec, cfg),
        _ => cmd_query(io, &spec, cfg),
    }
}

fn report_diags(io: &mut Io<'_>, file: &str, diags: &[Diagnostic], json: bool) -> i32 {
    if json {
        let items: Vec<_> = diags
            .iter()
            .map(|d| {
                json!({
                    "file": file,
                    "line": d.span.line,
                    "col": d.span.col,
                    "severity": d.severity.to_string(),
                    "code": d.code,
                    "message": d.message,
                })
            })
            .collect();
        let _ = writeln!(io.out, "{:#}", json!({ "diagnostics": items }));
    } else {
        io.diagnostics(file, diags);
    }
    if diags.iter().any(Diagnostic::is_error) {
        EXIT_FAILURE
    } else {
        EXIT_OK
    }
}

fn cmd_compile(io: &mut Io<'_>, spec: &CeremonySpec, json: bool) -> i32 {
    let compiled = match compile(spec) {
        Ok(c) => c,
        Err(d) => {
            io.diagnostics("", &d);
            return EXIT_FAILURE;
        }
    };
    let text = compiled.process.to_string();
    if json {
        let _ = writeln!(io.out, "{:#}", json!({ "process": text }));
    } else {
        let _ = writeln!(io.out, "{text}");
    }
    EXIT_OK
}

fn explored(
    io: &mut Io<'_>,
    spec: &CeremonySpec,
    cfg: &CliConfig,
) -> Result<Vec<crate::analyzer::Trace<crate::anp::AnpAssertion>>, i32> {
    let compiled = compile(spec).map_err(|d| {
        io.diagnostics(&cfg.input_path.display().to_string(), &d);
        EXIT_FAILURE
    })?;
    explore_ceremony(&compiled, cfg.depth_bound, cfg.unfold_budget).map_err(|e| {
        let _ = writeln!(io.err, "exploration failed: {e}");
        EXIT_FAILURE
    })
}

fn cmd_run(io: &mut Io<'_>, spec: &CeremonySpec, cfg: &CliConfig) -> i32 {
    let traces = match explored(io, spec, cfg) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sorted = match sorted_traces(&traces) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(io.err, "{e}");
            return EXIT_FAILURE;
        }
    };
    if cfg.output_format == Format::Json {
        let report = TraceReport {
            traces: sorted.iter().map(|(j, _)| j.clone()).collect(),
        };
        let _ = write!(io.out, "{}", report.to_json());
    } else {
        for (i, (j, t)) in sorted.iter().enumerate() {
                        let _ = writeln!(io.out, "trace {} ({})", i + 1, t.status);
            for (k, s) in j.steps.iter().enumerate() {
                let _ = writeln!(io.out, "  {:>3}. {} [{}]", k + 1, s.label, s.event_id.join(", "));
            }
            let order: Vec<String> = j.pomset.order.iter().map(|[a, b]| format!("{a} < {b}")).collect();
            let _ = writeln!(io.out, "  run: {{{}}}", j.pomset.elements.join(", "));
            let _ = writeln!(io.out, "  order: {{{}}}", order.join(", "));
        }
    }
    if sorted.iter().any(|(j, _)| j.complete) {
        EXIT_OK
    } else {
        EXIT_NO_COMPLETE_TRACE
    }
}

fn verdict_text(v: &Verdict) -> (String, Vec<String>) {
    match v {
        Verdict::Match => ("match".into(), vec![]),
        Verdict::MissingPairs(ps) => (
            "missing-pairs".into(),
            ps.iter().map(|(a, b)| format!("{a} < {b}")).collect(),
        ),
        Verdict::ExtraElements(es) => (
            "extra-elements".into(),
            es.iter().map(|e| e.to_string()).collect(),
        ),
        Verdict::MissingElements(es) => (
            "missing-elements".into(),
            es.iter().map(|e| e.to_string()).collect(),
        ),
    }
}

fn cmd_verify(io: &mut Io<'_>, spec: &CeremonySpec, cfg: &CliConfig) -> i32 {
    let traces = match explored(io, spec, cfg) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sorted = match sorted_traces(&traces) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(io.err, "{e}");
            return EXIT_FAILURE;
        }
    };
    let mut results = Vec::new();
    for (i, (j, t)) in sorted.iter().enumerate() {
        if !j.complete {
            continue;
        }
        let verdict = match pomset_of(&t.final_assertion) {
            Ok(run) => check_desired_run(&run, spec),
            Err(e) => {
                let _ = writeln!(io.err, "{e}");
                return EXIT_FAILURE;
            }
        };
        results.push((i + 1, verdict));
    }
    let code = if results.is_empty() {
        EXIT_NO_COMPLETE_TRACE
    } else if results.iter().all(|(_, v)| v.is_match()) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    if cfg.output_format == Format::Json {
        let items: Vec<_> = results
            .iter()
            .map(|(i, v)| {
                let (name, detail) = verdict_text(v);
                json!({ "trace": i, "verdict": name, "detail": detail })
            })
            .collect();
        let doc = json!({
            "traces": sorted.len(),
            "complete": results.len(),
            "verdicts": items,
            "ok": code == EXIT_OK,
        });
        let _ = writeln!(io.out, "{doc:#}");
    } else {
        for (i, v) in &results {
            let (name, detail) = verdict_text(v);
            let mark = if v.is_match() {
                io.paint("32", &name)
            } else {
                io.paint("31", &name)
            };
            if detail.is_empty() {
                let _ = writeln!(io.out, "trace {i}: {mark}");
            } else {
                let _ = writeln!(io.out, "trace {i}: {mark} {}", detail.join(", "));
            }
        }
        let _ = writeln!(
            io.out,
            "{} of {} traces complete",
            results.len(),
            sorted.len()
        );
    }
    code
}

fn cmd_query(io: &mut Io<'_>, spec: &CeremonySpec, cfg: &CliConfig) -> i32 {
    let Some(src) = &cfg.query_string else {
        let _ = writeln!(io.err, "query: missing --query");
        return EXIT_FAILURE;
    };
    let query = match parse_query(src) {
        Ok(q) => q,
        Err(e) => {
            let _ = writeln!(io.err, "{e}");
            return EXIT_FAILURE;
        }
    };
    let traces = match explored(io, spec, cfg) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let sorted = match sorted_traces(&traces) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(io.err, "{e}");
            return EXIT_FAILURE;
        }
    };
    let results: Vec<(usize, bool)> = sorted
        .iter()
        .enumerate()
        .filter(|(_, (j, _))| j.complete)
        .map(|(i, (_, t))| (i + 1, eval_pdl(&t.final_assertion, &query)))
        .collect();
    let code = if results.is_empty() {
        EXIT_NO_COMPLETE_TRACE
    } else if results.iter().all(|(_, b)| *b) {
        EXIT_OK
    } else {
        EXIT_FAILURE
    };
    if cfg.output_format == Format::Json {
        let items: Vec<_> = results
            .iter()
            .map(|(i, b)| json!({ "trace": i, "holds": b }))
            .collect();
        let doc = json!({ "query": query.to_string(), "results": items });
        let _ = writeln!(io.out, "{doc:#}");
    } else {
        for (i, b) in &results {
            let _ = writeln!(io.out, "trace {i}: {b}");
        }
    }
    code
}
