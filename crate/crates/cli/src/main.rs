//! `gac`: answer GAC questions, run propagators, build and verify gadgets,
//! and run the differential suites. Reports are newline-delimited JSON.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value as Json};

use gac_core::csp::{parse_instance, serialize_instance, CspError, DomainMap, Instance, Value, VarId};
use gac_core::engine::{self, EngineError, Question, QuestionResult, Route, SearchBudget};
use gac_core::gadgets::{self, io::parse_source, Family, GadgetError, GadgetParams};
use gac_core::propagators::{self, PropagationOutcome, PropagatorError};
use gac_core::suites::{self, CaseStatus, SuiteConfig, SuiteName};

#[derive(Parser)]
#[command(name = "gac", version, about = "Generalized arc consistency questions, propagators and hardness gadgets")]
struct Cli {
    /// Maximum number of search nodes per question.
    #[arg(long, global = true, default_value_t = SearchBudget::DEFAULT.get())]
    budget: u64,
    /// Seed for generated corpora.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Ask one of the five GAC questions about an instance file.
    Question(QuestionArgs),
    /// Run a specialized propagator on an instance file.
    Propagate(PropagateArgs),
    /// Build a hardness gadget from a source problem file.
    Gadget(GadgetArgs),
    /// Run a differential suite.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum QuestionName {
    GacSupport,
    IsItGac,
    NoGacWipeout,
    GacDomain,
    MaxGac,
}

#[derive(Args)]
struct QuestionArgs {
    #[arg(long = "q", value_enum)]
    question: QuestionName,
    #[arg(long)]
    var: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    value: Option<Value>,
    /// JSON object mapping each variable to its candidate domain.
    #[arg(long)]
    candidate: Option<PathBuf>,
    /// `generic`, `reduced`, or a reducer name such as `via-support`.
    #[arg(long, default_value = "generic")]
    engine: String,
    instance: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropagatorName {
    Alldifferent,
    AmongConst,
    Gcc,
    CardpathDp,
    PairwiseAc,
}

#[derive(Args)]
struct PropagateArgs {
    #[arg(long)]
    propagator: PropagatorName,
    instance: PathBuf,
}

#[derive(Args)]
struct GadgetArgs {
    #[arg(long)]
    family: String,
    /// Where to write the gadget instance; metadata goes to `<out>.meta.json`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Ask the gadget question and compare with the oracle.
    #[arg(long)]
    verify: bool,
    /// Set size for the atmost1 family.
    #[arg(long, default_value_t = 2)]
    cardinality: usize,
    /// Scalar product target for the scalarproduct family.
    #[arg(long, default_value_t = 1)]
    target: u64,
    source: PathBuf,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Scale {
    Small,
    Full,
}

#[derive(Args)]
struct SuiteArgs {
    name: String,
    #[arg(long, value_enum, default_value_t = Scale::Full)]
    scale: Scale,
    /// Random engine instances.
    #[arg(long)]
    instances: Option<usize>,
    /// Random instances per propagator.
    #[arg(long)]
    propagator_instances: Option<usize>,
    /// Random sources per gadget family.
    #[arg(long)]
    gadget_sources: Option<usize>,
    /// Restrict the gadgets suite to one family.
    #[arg(long)]
    family: Option<String>,
}

/// A failed command, with the process exit code it maps to.
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<CspError> for Failure {
    fn from(e: CspError) -> Self {
        let kind = match e {
            CspError::Parse { .. } => "parse",
            _ => "invalid-instance",
        };
        Failure {
            code: 2,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::BudgetExhausted { .. } => Failure {
                code: 3,
                kind: "budget-exhausted",
                message: e.to_string(),
            },
            EngineError::Csp(e) => e.into(),
            e => Failure::usage(e.to_string()),
        }
    }
}

impl From<PropagatorError> for Failure {
    fn from(e: PropagatorError) -> Self {
        match e {
            PropagatorError::Csp(e) => e.into(),
            e => Failure {
                code: 4,
                kind: "unsupported",
                message: e.to_string(),
            },
        }
    }
}

impl From<GadgetError> for Failure {
    fn from(e: GadgetError) -> Self {
        match e {
            GadgetError::Engine(e) => e.into(),
            GadgetError::Csp(e) => e.into(),
            GadgetError::Parse { .. } => Failure {
                code: 2,
                kind: "parse",
                message: e.to_string(),
            },
            GadgetError::Precondition(_) | GadgetError::ScaleLimit { .. } => Failure {
                code: 2,
                kind: "precondition",
                message: e.to_string(),
            },
            e => Failure::usage(e.to_string()),
        }
    }
}

#[derive(Serialize)]
#[serde(rename_all = "camelCase")]
struct RunReport {
    command: Vec<String>,
    question: String,
    /// Absent when the command only builds.
    #[serde(skip_serializing_if = "Option::is_none")]
    answer: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<Json>,
    tuples_explored: u64,
    elapsed_ms: u128,
    engine: String,
}

struct Output {
    format: Format,
}

impl Output {
    fn record(&self, value: &impl Serialize, text: impl FnOnce() -> String) {
        match self.format {
            Format::Json => println!("{}", serde_json::to_string(value).expect("reports serialize")),
            Format::Text => println!("{}", text()),
        }
    }

    fn run(&self, r: &RunReport) {
        self.record(r, || {
            let mut s = format!(
                "{} [{}]: {} ({} tuples, {} ms)",
                r.question,
                r.engine,
                r.answer.map_or("built".into(), |a| a.to_string()),
                r.tuples_explored,
                r.elapsed_ms
            );
            if let Some(w) = &r.witness {
                s.push_str(&format!("\nwitness: {w}"));
            }
            s
        })
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Ok(parse_instance(&read(path)?)?)
}

fn budget(n: u64) -> Result<SearchBudget, Failure> {
    SearchBudget::new(n).ok_or_else(|| Failure::usage("budget must be positive"))
}

fn witness_json(r: &QuestionResult) -> Option<Json> {
    r.witness.as_ref().map(|w| serde_json::to_value(w).expect("witness serializes"))
}

fn build_question(a: &QuestionArgs) -> Result<Question, Failure> {
    Ok(match a.question {
        QuestionName::GacSupport => match (&a.var, a.value) {
            (Some(var), Some(value)) => Question::GacSupport {
                var: VarId::new(var.clone()),
                value,
            },
            _ => return Err(Failure::usage("gac-support needs --var and --value")),
        },
        QuestionName::IsItGac => Question::IsItGac,
        QuestionName::NoGacWipeout => Question::NoGacWipeout,
        QuestionName::GacDomain => Question::GacDomain,
        QuestionName::MaxGac => {
            let path = a
                .candidate
                .as_ref()
                .ok_or_else(|| Failure::usage("max-gac needs --candidate"))?;
            let candidate: DomainMap = serde_json::from_slice(&read(path)?)
                .map_err(|e| Failure {
                    code: 2,
                    kind: "parse",
                    message: format!("candidate {}: {e}", path.display()),
                })?;
            Question::MaxGac { candidate }
        }
    })
}

/// Runs `q` with the selected engine, returning the engine's report name.
fn dispatch(inst: &Instance, q: &Question, engine: &str, b: SearchBudget) -> Result<(String, QuestionResult), Failure> {
    use engine::reduce::*;
    let r = match (engine, q) {
        ("generic", q) => return Ok(("generic".into(), engine::ask(inst, q, Route::Direct, b)?)),
        ("reduced", q) => return Ok((Route::Reduced.operation(q).into(), engine::ask(inst, q, Route::Reduced, b)?)),
        ("via-wipeout", Question::GacSupport { var, value }) => gac_support_via_wipeout(inst, var, *value, b),
        ("via-domain", Question::GacSupport { var, value }) => gac_support_via_domain(inst, var, *value, b),
        ("via-support", Question::NoGacWipeout) => no_gac_wipeout_via_support(inst, b),
        ("via-support", Question::GacDomain) => gac_domain_via_support(inst, b),
        ("via-support", Question::MaxGac { candidate }) => max_gac_via_support(inst, candidate, b),
        ("superset-sweep", Question::MaxGac { candidate }) => engine::max_gac_by_superset_sweep(inst, candidate, b),
        ("via-maxgac", Question::IsItGac) => is_it_gac_via_maxgac(inst, b),
        _ => {
            return Err(Failure::usage(format!(
                "engine `{engine}` does not answer {}",
                q.name()
            )))
        }
    }?;
    Ok((format!("{}-{engine}", q.name()), r))
}

fn cmd_question(cli: &Cli, a: &QuestionArgs, out: &Output, argv: &[String]) -> Result<u8, Failure> {
    let inst = load_instance(&a.instance)?;
    let q = build_question(a)?;
    let started = Instant::now();
    let (engine, r) = dispatch(&inst, &q, &a.engine, budget(cli.budget)?)?;
    out.run(&RunReport {
        command: argv.to_vec(),
        question: q.name().into(),
        answer: Some(r.answer),
        witness: witness_json(&r),
        tuples_explored: r.tuples_explored,
        elapsed_ms: started.elapsed().as_millis(),
        engine,
    });
    Ok(0)
}

fn cmd_propagate(a: &PropagateArgs, out: &Output, argv: &[String]) -> Result<u8, Failure> {
    let inst = load_instance(&a.instance)?;
    let (name, f): (&str, fn(&Instance) -> Result<PropagationOutcome, PropagatorError>) = match a.propagator {
        PropagatorName::Alldifferent => ("alldifferent", propagators::alldifferent_gac),
        PropagatorName::AmongConst => ("among-const", propagators::among_const_gac),
        PropagatorName::Gcc => ("gcc", propagators::gcc_fixed_gac),
        PropagatorName::CardpathDp => ("cardpath-dp", propagators::cardpath_dp_gac),
        PropagatorName::PairwiseAc => ("pairwise-ac", propagators::pairwise_ac),
    };
    let started = Instant::now();
    let o = f(&inst)?;
    out.run(&RunReport {
        command: argv.to_vec(),
        question: "propagate".into(),
        answer: Some(!o.wipeout),
        witness: Some(json!({ "domains": o.domains, "removed": o.removed })),
        tuples_explored: 0,
        elapsed_ms: started.elapsed().as_millis(),
        engine: name.into(),
    });
    Ok(0)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    std::fs::write(path, bytes).map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn cmd_gadget(cli: &Cli, a: &GadgetArgs, out: &Output, argv: &[String]) -> Result<u8, Failure> {
    let family: Family = a.family.parse().map_err(Failure::usage)?;
    let text = String::from_utf8(read(&a.source)?).map_err(|_| Failure::usage("source is not UTF-8"))?;
    let src = parse_source(family, &text)?;
    let params = GadgetParams {
        cardinality: a.cardinality,
        target: a.target,
    };
    let g = gadgets::build(family, &src, params)?;
    if let Some(path) = &a.out {
        write_file(path, &serialize_instance(&g.instance))?;
        let mut meta = path.clone().into_os_string();
        meta.push(".meta.json");
        let body = serde_json::to_string_pretty(&g.metadata()).expect("metadata serializes") + "\n";
        write_file(Path::new(&meta), body.as_bytes())?;
    }
    let started = Instant::now();
    if !a.verify {
        out.run(&RunReport {
            command: argv.to_vec(),
            question: g.question.name().into(),
            answer: None,
            witness: Some(json!({
                "family": family,
                "variables": g.instance.variables().len(),
                "metadata": g.metadata(),
            })),
            tuples_explored: 0,
            elapsed_ms: 0,
            engine: "builder".into(),
        });
        return Ok(0);
    }
    let r = gadgets::verify_gadget(&g, &src, budget(cli.budget)?)?;
    let Some(answer) = r.engine_answer else {
        return Err(EngineError::BudgetExhausted {
            explored: r.tuples_explored,
        }
        .into());
    };
    out.run(&RunReport {
        command: argv.to_vec(),
        question: g.question.name().into(),
        answer: Some(answer),
        witness: Some(serde_json::to_value(&r).expect("report serializes")),
        tuples_explored: r.tuples_explored,
        elapsed_ms: started.elapsed().as_millis(),
        engine: "generic".into(),
    });
    Ok(if r.passed() { 0 } else { 1 })
}

fn cmd_suite(cli: &Cli, a: &SuiteArgs, out: &Output) -> Result<u8, Failure> {
    let name: SuiteName = a.name.parse().map_err(Failure::usage)?;
    let mut cfg = match a.scale {
        Scale::Small => SuiteConfig::small(cli.seed),
        Scale::Full => SuiteConfig {
            seed: cli.seed,
            ..SuiteConfig::default()
        },
    };
    cfg.budget = budget(cli.budget)?;
    cfg.instances = a.instances.unwrap_or(cfg.instances);
    cfg.propagator_instances = a.propagator_instances.unwrap_or(cfg.propagator_instances);
    cfg.gadget_sources = a.gadget_sources.unwrap_or(cfg.gadget_sources);
    let report = match (&a.family, name) {
        (Some(f), SuiteName::Gadgets) => {
            let family: Family = f.parse().map_err(Failure::usage)?;
            suites::gadget_family_fidelity(family, &cfg)
        }
        (Some(_), _) => return Err(Failure::usage("--family applies to the gadgets suite only")),
        (None, name) => suites::run_suite(name, &cfg),
    };
    for c in &report.cases {
        out.record(c, || {
            let mark = if c.status == CaseStatus::Agree { "ok  " } else { "FAIL" };
            let detail = c.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default();
            format!("{mark} {} [{} vs {}]{detail}", c.case, c.compared[0], c.compared[1])
        });
    }
    let summary = json!({
        "suite": report.suite,
        "tallies": report.tallies,
        "cases": report.cases.len(),
        "failures": report.failures().map(|c| &c.case).collect::<Vec<_>>(),
        "elapsedMs": report.elapsed_ms,
        "passed": report.passed(),
    });
    out.record(&summary, || {
        let t = &report.tallies;
        format!(
            "{}: {}/{} agree, {} disagree, {} budget-exhausted, {} errors",
            report.suite,
            t.agree,
            report.cases.len(),
            t.disagree,
            t.budget_exhausted,
            t.error
        )
    });
    Ok(if report.passed() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let cli = Cli::parse();
    let out = Output { format: cli.format };
    let result = match &cli.command {
        Command::Question(a) => cmd_question(&cli, a, &out, &argv),
        Command::Propagate(a) => cmd_propagate(a, &out, &argv),
        Command::Gadget(a) => cmd_gadget(&cli, a, &out, &argv),
        Command::Suite(a) => cmd_suite(&cli, a, &out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            out.record(
                &json!({ "command": argv, "error": { "kind": f.kind, "message": f.message }, "exitCode": f.code }),
                || format!("error ({}): {}", f.kind, f.message),
            );
            ExitCode::from(f.code)
        }
    }
}
