mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use tmcf::counterfactual::DependencyRelation;
use tmcf::imaging::ImagingResult;
use tmcf::{
    apply_probabilistic, briggs_truth, cf_probability, conditional_prob, dependencies, distance, falsemakers,
    format_exact, generate_selection, imaging_cf_probability, modelfile, parse_formula, parse_query, truthmakers,
    update_evidence, validate_model, CounterfactualQuery, DependenceMode, DeterministicModel, Evidence, Formula,
    Intervention, Model, ModelSpec, ProbabilisticModel, SelectionFunction, SelectionMode, Transfer, TruthmakerSet,
    Weighting,
};

use report::{table, Report};

/// Exact truth values and probabilities of counterfactuals over finite causal models.
#[derive(Parser, Debug)]
#[command(name = "tmcf", version)]
struct Cli {
    /// Fractional digits in decimal output.
    #[arg(long, global = true, default_value_t = 6)]
    digits: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a model file and list every violation.
    Validate { model: PathBuf },
    /// Probability of a formula, optionally conditioned on a conjunction.
    Prob {
        model: PathBuf,
        #[arg(short = 'f', long)]
        formula: String,
        /// Conjunction to condition on, after the model's declared evidence update.
        #[arg(long)]
        evidence: Option<String>,
        /// Ignore the `evidence` lines of the model file.
        #[arg(long)]
        prior: bool,
    },
    /// Truth of a counterfactual at a deterministic model.
    Truth {
        model: PathBuf,
        #[arg(short = 'q', long)]
        query: String,
    },
    /// Similarity-weighted probability of a counterfactual.
    Counterfactual {
        model: PathBuf,
        #[arg(short = 'q', long)]
        query: String,
        #[command(flatten)]
        evidence: EvidenceArgs,
        #[arg(long, value_enum, default_value_t = WeightingArg::InverseDistance)]
        weighting: WeightingArg,
        #[arg(long, value_enum, default_value_t = DependenceArg::Probabilistic)]
        dependence: DependenceArg,
    },
    /// Exact truthmakers and falsemakers of a formula.
    Truthmakers {
        model: PathBuf,
        #[arg(short = 'f', long)]
        formula: String,
    },
    /// Counterfactual dependencies of the model or of a submodel.
    Deps {
        model: PathBuf,
        #[arg(long = "do")]
        intervention: Option<String>,
        #[arg(long, value_enum, default_value_t = DependenceArg::Probabilistic)]
        dependence: DependenceArg,
    },
    /// Distance between the model and a submodel.
    Distance {
        model: PathBuf,
        #[arg(long = "do")]
        intervention: String,
        #[arg(long, value_enum, default_value_t = DependenceArg::Probabilistic)]
        dependence: DependenceArg,
    },
    /// Probability of a counterfactual by imaging on the antecedent.
    Imaging {
        model: PathBuf,
        #[arg(short = 'q', long)]
        query: String,
        #[command(flatten)]
        evidence: EvidenceArgs,
        /// Fixture file, `generated:singletons` or `generated:all`.
        #[arg(long)]
        selection: String,
        #[arg(long, value_enum)]
        transfer: TransferArg,
    },
    /// Weighted-submodel and imaging probabilities side by side.
    Compare {
        model: PathBuf,
        #[arg(short = 'q', long)]
        query: String,
        #[command(flatten)]
        evidence: EvidenceArgs,
        #[arg(long, default_value = "generated:singletons")]
        selection: String,
        #[arg(long, value_enum, default_value_t = TransferArg::Bayes)]
        transfer: TransferArg,
        #[arg(long, value_enum, default_value_t = WeightingArg::InverseDistance)]
        weighting: WeightingArg,
        #[arg(long, value_enum, default_value_t = DependenceArg::Probabilistic)]
        dependence: DependenceArg,
    },
}

#[derive(clap::Args, Debug)]
struct EvidenceArgs {
    /// Conjunction to update on; defaults to the model's `evidence` lines.
    #[arg(long)]
    evidence: Option<String>,
    /// Use no evidence, even if the model declares some.
    #[arg(long, conflicts_with = "evidence")]
    no_evidence: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum WeightingArg {
    InverseDistance,
    Uniform,
    NearestOnly,
}

impl From<WeightingArg> for Weighting {
    fn from(w: WeightingArg) -> Self {
        match w {
            WeightingArg::InverseDistance => Weighting::InverseDistance,
            WeightingArg::Uniform => Weighting::Uniform,
            WeightingArg::NearestOnly => Weighting::NearestOnly,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum DependenceArg {
    Probabilistic,
    Structural,
}

impl From<DependenceArg> for DependenceMode {
    fn from(d: DependenceArg) -> Self {
        match d {
            DependenceArg::Probabilistic => DependenceMode::Probabilistic,
            DependenceArg::Structural => DependenceMode::Structural,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum TransferArg {
    Lewis,
    Bayes,
    Equal,
}

impl From<TransferArg> for Transfer {
    fn from(t: TransferArg) -> Self {
        match t {
            TransferArg::Lewis => Transfer::LewisUnique,
            TransferArg::Bayes => Transfer::Bayes,
            TransferArg::Equal => Transfer::Equal,
        }
    }
}

fn arg_name(v: impl ValueEnum) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// Exit 1 for usage, input and syntax problems; exit 2 for semantic ones.
#[derive(Debug)]
enum Failure {
    Usage(String),
    Semantic(String),
}

impl From<tmcf::Error> for Failure {
    fn from(e: tmcf::Error) -> Self {
        Failure::Semantic(e.to_string())
    }
}

impl From<tmcf::SyntaxError> for Failure {
    fn from(e: tmcf::SyntaxError) -> Self {
        Failure::Usage(format!("syntax error: {e}"))
    }
}

type Outcome = Result<Report, Failure>;

struct Loaded {
    spec: ModelSpec,
    model: Model,
}

fn read_spec(path: &Path) -> Result<ModelSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    modelfile::parse(&text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path) -> Result<Loaded, Failure> {
    let spec = read_spec(path)?;
    let model = spec.build()?;
    Ok(Loaded { spec, model })
}

fn probabilistic(l: &Loaded) -> Result<&ProbabilisticModel, Failure> {
    match &l.model {
        Model::Probabilistic(m) => Ok(m),
        Model::Deterministic(_) => Err(Failure::Semantic("this command needs a probabilistic model".into())),
    }
}

fn deterministic(l: &Loaded) -> Result<&DeterministicModel, Failure> {
    match &l.model {
        Model::Deterministic(m) => Ok(m),
        Model::Probabilistic(_) => Err(Failure::Semantic("this command needs a deterministic model".into())),
    }
}

/// `X=0 & Y=1` or `X=0, Y=1`.
fn parse_conjunction(text: &str) -> Result<tmcf::Assignment, Failure> {
    if text.trim().is_empty() {
        return Ok(tmcf::Assignment::new());
    }
    let f = parse_formula(&text.replace(',', "&"))?;
    Ok(f.as_conjunction()?)
}

fn declared_evidence(spec: &ModelSpec) -> Result<Evidence, Failure> {
    Ok(Evidence::from_pairs(spec.evidence.iter().map(|(k, v)| (k.as_str(), *v)))?)
}

fn evidence_for(args: &EvidenceArgs, spec: &ModelSpec) -> Result<Evidence, Failure> {
    if args.no_evidence {
        return Ok(Evidence::none());
    }
    match &args.evidence {
        Some(text) => Ok(Evidence(parse_conjunction(text)?)),
        None => declared_evidence(spec),
    }
}

fn show_evidence(e: &Evidence) -> String {
    if e.is_empty() {
        "none".into()
    } else {
        e.to_string()
    }
}

fn cmd_validate(path: &Path, digits: usize) -> Outcome {
    let spec = read_spec(path)?;
    let report = validate_model(&spec);
    let mut r = Report::new(digits);
    r.line(format!("model: {}", path.display()));
    r.line(report.to_string());
    r.key("valid", report.is_ok());
    r.key("violations", report.violations.len());
    if report.is_ok() {
        Ok(r)
    } else {
        print!("{}", r.render());
        Err(Failure::Semantic(format!("{} violation(s)", report.violations.len())))
    }
}

fn cmd_prob(path: &Path, formula: &str, evidence: Option<&str>, prior: bool, digits: usize) -> Outcome {
    let l = load(path)?;
    let m = probabilistic(&l)?;
    let f = parse_formula(formula)?;
    let declared = if prior { Evidence::none() } else { declared_evidence(&l.spec)? };
    let base = update_evidence(m, &declared)?;
    let mut r = Report::new(digits);
    r.line(format!("updated on: {}", show_evidence(&declared)));
    r.key("updated_on", show_evidence(&declared));
    let value = match evidence.map(parse_conjunction).transpose()? {
        Some(given) if !given.is_empty() => {
            let g = Formula::conjunction_of(&given).expect("non-empty");
            r.line(format!("p({f} | {g})"));
            r.key("query", format!("{f} | {g}"));
            conditional_prob(&base, &f, &g)?
        }
        _ => {
            r.line(format!("p({f})"));
            r.key("query", &f);
            tmcf::inference::prob(&base, &f)?
        }
    };
    r.number("value", "value", &value);
    Ok(r)
}

fn cmd_truth(path: &Path, query: &str, digits: usize) -> Outcome {
    let l = load(path)?;
    let m = deterministic(&l)?;
    let q = parse_query(query)?;
    let value = briggs_truth(m, &q)?;
    let mut r = Report::new(digits);
    r.line(format!("query: {q}"));
    r.line(format!("truth: {value}"));
    r.key("query", &q);
    r.key("truth", value);
    Ok(r)
}

fn cms_section(
    r: &mut Report,
    m: &ProbabilisticModel,
    q: &CounterfactualQuery,
    e: &Evidence,
    w: WeightingArg,
    d: DependenceArg,
    prefix: &str,
) -> Result<tmcf::CfProbability, Failure> {
    let res = cf_probability(m, q, e, w.into(), d.into())?;
    r.line(format!("weighting: {}, dependence: {}", arg_name(w), arg_name(d)));
    let mut rows = vec![vec!["submodel".to_string(), "distance".into(), "weight".into(), "p_s(B)".into()]];
    for (i, t) in res.breakdown.iter().enumerate() {
        rows.push(vec![t.intervention.to_string(), r.dec(&t.distance), r.dec(&t.weight), r.dec(&t.consequent_prob)]);
        let k = format!("{prefix}submodel.{}", i + 1);
        r.key(&k, &t.intervention);
        r.key(format!("{k}.distance"), format_exact(&t.distance));
        r.key(format!("{k}.weight"), format_exact(&t.weight));
        r.key(format!("{k}.p"), format_exact(&t.consequent_prob));
    }
    for l in table(&rows) {
        r.line(l);
    }
    r.number("value", &format!("{prefix}value"), &res.value);
    r.line(format!("bounds: [{}, {}]", r.dec(&res.bounds.0), r.dec(&res.bounds.1)));
    r.key(format!("{prefix}bounds.min"), format_exact(&res.bounds.0));
    r.key(format!("{prefix}bounds.max"), format_exact(&res.bounds.1));
    if res.zero_distance_rule {
        r.warn("zero-distance-rule", "a truthmaking submodel is at distance 0; it takes all of the weight");
    }
    if !res.within_bounds() {
        r.warn("convexity-violation", "value lies outside the convexity bounds");
    }
    Ok(res)
}

fn cmd_counterfactual(
    path: &Path,
    query: &str,
    ev: &EvidenceArgs,
    w: WeightingArg,
    d: DependenceArg,
    digits: usize,
) -> Outcome {
    let l = load(path)?;
    let m = probabilistic(&l)?;
    let q = parse_query(query)?;
    let e = evidence_for(ev, &l.spec)?;
    let mut r = Report::new(digits);
    r.line(format!("query: {q}"));
    r.line(format!("evidence: {}", show_evidence(&e)));
    r.key("query", &q);
    r.key("evidence", show_evidence(&e));
    cms_section(&mut r, m, &q, &e, w, d, "")?;
    Ok(r)
}

fn list_members(r: &mut Report, label: &str, set: &TruthmakerSet) {
    r.line(format!("{label} ({}):", set.len()));
    for (i, s) in set.iter().enumerate() {
        r.line(format!("  {s}"));
        r.key(format!("{label}.{}", i + 1), s);
    }
    r.key(format!("{label}.count"), set.len());
}

fn cmd_truthmakers(path: &Path, formula: &str, digits: usize) -> Outcome {
    let l = load(path)?;
    let f = parse_formula(formula)?;
    let g = l.model.graph();
    let mut r = Report::new(digits);
    r.line(format!("formula: {f}"));
    r.key("formula", &f);
    list_members(&mut r, "truthmakers", &truthmakers(&f, g)?);
    list_members(&mut r, "falsemakers", &falsemakers(&f, g)?);
    Ok(r)
}

fn intervention(text: &str) -> Result<Intervention, Failure> {
    Ok(Intervention::new(parse_conjunction(text)?))
}

fn show_relation(r: &mut Report, rel: &DependencyRelation) {
    for (a, b) in &rel.pairs {
        r.line(format!("  {a} => {b}"));
    }
    let pairs: Vec<String> = rel.pairs.iter().map(|(a, b)| format!("{a}>{b}")).collect();
    r.line(format!("count: {} of {}", rel.len(), rel.universe_size));
    r.key("pairs", if pairs.is_empty() { "none".into() } else { pairs.join(",") });
    r.key("count", rel.len());
    r.key("universe", rel.universe_size);
}

fn cmd_deps(path: &Path, i: Option<&str>, d: DependenceArg, digits: usize) -> Outcome {
    let l = load(path)?;
    let m = probabilistic(&l)?;
    let i = i.map(intervention).transpose()?.unwrap_or_default();
    let s = apply_probabilistic(m, &i)?;
    let mut r = Report::new(digits);
    let target = if i.is_empty() { "original model".to_string() } else { i.to_string() };
    r.line(format!("dependencies of {target} ({} mode):", arg_name(d)));
    r.key("model", &target);
    show_relation(&mut r, &dependencies(&s, d.into()));
    Ok(r)
}

fn cmd_distance(path: &Path, i: &str, d: DependenceArg, digits: usize) -> Outcome {
    let l = load(path)?;
    let m = probabilistic(&l)?;
    let i = intervention(i)?;
    let s = apply_probabilistic(m, &i)?;
    let mut r = Report::new(digits);
    r.line(format!("submodel: {i} ({} mode)", arg_name(d)));
    r.key("submodel", &i);
    r.number("distance", "distance", &distance(m, &s, d.into())?);
    Ok(r)
}

fn selection(m: &ProbabilisticModel, a: &Formula, spec: &str) -> Result<SelectionFunction, Failure> {
    match spec {
        "generated:singletons" => Ok(generate_selection(m, a, SelectionMode::Singletons)?),
        "generated:all" => Ok(generate_selection(m, a, SelectionMode::AllTruthmakers)?),
        other if other.starts_with("generated:") => {
            Err(Failure::Usage(format!("unknown selection `{other}`; use generated:singletons or generated:all")))
        }
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{path}: {e}")))?;
            Ok(SelectionFunction::parse_fixture(m.graph(), a.clone(), &text)?)
        }
    }
}

fn imaging_section(r: &mut Report, res: &ImagingResult, t: TransferArg, sel: &str, prefix: &str) {
    r.line(format!("selection: {sel}, transfer: {}", arg_name(t)));
    r.number("value", &format!("{prefix}value"), &res.value);
    let (lo, hi) = &res.cms_bounds;
    r.line(format!("convexity bounds: [{}, {}]", r.dec(lo), r.dec(hi)));
    r.key(format!("{prefix}bounds.min"), format_exact(lo));
    r.key(format!("{prefix}bounds.max"), format_exact(hi));
    if res.violates_convexity() {
        r.warn(
            "convexity-violation",
            format!("imaging value {} lies outside [{}, {}]", r.dec(&res.value), r.dec(lo), r.dec(hi)),
        );
    }
}

fn cmd_imaging(path: &Path, query: &str, ev: &EvidenceArgs, sel: &str, t: TransferArg, digits: usize) -> Outcome {
    let l = load(path)?;
    let m = probabilistic(&l)?;
    let q = parse_query(query)?;
    let e = evidence_for(ev, &l.spec)?;
    let f = selection(m, &q.antecedent, sel)?;
    let res = imaging_cf_probability(m, &q, &e, &f, t.into())?;
    let mut r = Report::new(digits);
    r.line(format!("query: {q}"));
    r.line(format!("evidence: {}", show_evidence(&e)));
    r.key("query", &q);
    r.key("evidence", show_evidence(&e));
    imaging_section(&mut r, &res, t, sel, "");
    Ok(r)
}

#[allow(clippy::too_many_arguments)]
fn cmd_compare(
    path: &Path,
    query: &str,
    ev: &EvidenceArgs,
    sel: &str,
    t: TransferArg,
    w: WeightingArg,
    d: DependenceArg,
    digits: usize,
) -> Outcome {
    let l = load(path)?;
    let m = probabilistic(&l)?;
    let q = parse_query(query)?;
    let e = evidence_for(ev, &l.spec)?;
    let mut r = Report::new(digits);
    r.line(format!("query: {q}"));
    r.line(format!("evidence: {}", show_evidence(&e)));
    r.key("query", &q);
    r.key("evidence", show_evidence(&e));
    r.line("");
    r.line("[weighted submodels]");
    let cms = cms_section(&mut r, m, &q, &e, w, d, "cms.")?;
    r.key("cms.convexity", if cms.within_bounds() { "ok" } else { "violated" });
    r.line("");
    r.line("[imaging]");
    let f = selection(m, &q.antecedent, sel)?;
    let img = imaging_cf_probability(m, &q, &e, &f, t.into())?;
    imaging_section(&mut r, &img, t, sel, "imaging.");
    r.key("imaging.convexity", if img.violates_convexity() { "violated" } else { "ok" });
    Ok(r)
}

fn run(cli: Cli) -> Outcome {
    let digits = cli.digits;
    match &cli.command {
        Command::Validate { model } => cmd_validate(model, digits),
        Command::Prob { model, formula, evidence, prior } => cmd_prob(model, formula, evidence.as_deref(), *prior, digits),
        Command::Truth { model, query } => cmd_truth(model, query, digits),
        Command::Counterfactual { model, query, evidence, weighting, dependence } => {
            cmd_counterfactual(model, query, evidence, *weighting, *dependence, digits)
        }
        Command::Truthmakers { model, formula } => cmd_truthmakers(model, formula, digits),
        Command::Deps { model, intervention, dependence } => cmd_deps(model, intervention.as_deref(), *dependence, digits),
        Command::Distance { model, intervention, dependence } => cmd_distance(model, intervention, *dependence, digits),
        Command::Imaging { model, query, evidence, selection, transfer } => {
            cmd_imaging(model, query, evidence, selection, *transfer, digits)
        }
        Command::Compare { model, query, evidence, selection, transfer, weighting, dependence } => {
            cmd_compare(model, query, evidence, selection, *transfer, *weighting, *dependence, digits)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(report) => {
            print!("{}", report.render());
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Semantic(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
