//! Batch command-line front end: every subcommand prints one JSON document.

use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use cst_core::constructions::{build_augmentation, build_theorem_a, SftDocument, SftSpec};
use cst_core::entropy::{genset_entropy, sofic_approx_entropies, sofic_chain_by_length};
use cst_core::families::{preset, FAMILY_NAMES};
use cst_core::genset::{ln_biguint, sardinas_patterson, unique_representation_check};
use cst_core::sampler::{block_counts, WindowSampler};
use cst_core::sofic::{factor_automaton, language_counts};
use cst_core::{
    solve_entropy, solve_pressure, CharacteristicSolution, GBernoulliMeasure, GeneratingSet, WeightedPotential,
    Word,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, Serialize)]
pub struct CommandResult {
    pub status: Status,
    pub payload: Value,
    pub diagnostics: Vec<String>,
    #[serde(skip)]
    pub exit_code: i32,
}

impl CommandResult {
    fn ok(payload: Value, diagnostics: Vec<String>) -> Self {
        Self {
            status: Status::Ok,
            payload,
            diagnostics,
            exit_code: EXIT_OK,
        }
    }

    fn error(kind: &str, message: String, exit_code: i32) -> Self {
        Self {
            status: Status::Error,
            payload: json!({ "error": kind, "message": message }),
            diagnostics: vec![message],
            exit_code,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cst", version, about = "Entropy, measures and constructions for coded shift spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Root of the characteristic equation.
    Entropy(SetArgs),
    /// Pressure of a potential constant on generators.
    Pressure(PressureArgs),
    /// Measure of maximal entropy and its constants.
    Mme(SetArgs),
    /// Measure of a standard cylinder.
    Cylinder(CylinderArgs),
    /// Gibbs ratios of a list of words.
    Gibbs(GibbsArgs),
    /// Stationary windows from the measure of maximal entropy.
    Sample(SampleArgs),
    /// Sardinas-Patterson test and ambiguity search.
    UdCheck(UdArgs),
    /// Describe a built-in family.
    Family(FamilyArgs),
    /// Run a construction.
    Construct(ConstructArgs),
    /// Factor-language counts of a finite prefix of the generators.
    Language(LanguageArgs),
    /// Entropies of the sofic approximations.
    Sofic(SoficArgs),
}

#[derive(Debug, Args)]
struct SetArgs {
    /// Generating-set JSON document.
    #[arg(long, conflicts_with = "family")]
    genset: Option<PathBuf>,
    /// Built-in family name.
    #[arg(long)]
    family: Option<String>,
    /// Family parameters as a JSON object.
    #[arg(long)]
    params: Option<String>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
}

#[derive(Debug, Args)]
struct PressureArgs {
    #[command(flatten)]
    set: SetArgs,
    /// `{"offset": a, "slope": b, "overrides": {"word": value}}`.
    #[arg(long)]
    potential: Option<String>,
}

#[derive(Debug, Args)]
struct CylinderArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long, required = true)]
    word: Vec<String>,
    /// Generator length cutoff for the cover enumeration.
    #[arg(long, default_value_t = 512)]
    max_gen_len: usize,
}

#[derive(Debug, Args)]
struct GibbsArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long, required = true)]
    word: Vec<String>,
    #[arg(long, default_value_t = 512)]
    max_gen_len: usize,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[command(flatten)]
    set: SetArgs,
    #[arg(long, default_value_t = 32)]
    len: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of windows, or of draws when counting blocks.
    #[arg(long, default_value_t = 1)]
    count: u64,
    /// Count length-n blocks instead of listing windows.
    #[arg(long)]
    block_n: Option<usize>,
    /// Generator length cap; chosen from the certified tail when absent.
    #[arg(long)]
    max_gen_len: Option<usize>,
}

#[derive(Debug, Args)]
struct UdArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Longest generator fed to Sardinas-Patterson.
    #[arg(long, default_value_t = 8)]
    max_gen_len: usize,
    /// Horizon of the ambiguity search; twice `--max-gen-len` by default.
    #[arg(long)]
    n: Option<usize>,
}

#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, alias = "family")]
    name: Option<String>,
    #[arg(long)]
    params: Option<String>,
    /// Generators listed up to this length.
    #[arg(long, default_value_t = 8)]
    max_gen_len: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Construction {
    TheoremA,
    Augment,
}

#[derive(Debug, Args)]
struct ConstructArgs {
    #[arg(value_enum)]
    kind: Construction,
    /// SFT JSON document (theorem-a); the golden-mean shift when absent.
    #[arg(long)]
    sft: Option<PathBuf>,
    /// Base set for `augment`; three_mme when neither this nor `--family` is given.
    #[arg(long, conflicts_with = "family")]
    genset: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    params: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of generators (theorem-a).
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Number of added words (augment).
    #[arg(long, default_value_t = 2)]
    depth: usize,
    /// Comma-separated lower bounds m_1, m_2, ... (augment).
    #[arg(long, value_delimiter = ',')]
    m: Vec<usize>,
}

#[derive(Debug, Args)]
struct LanguageArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Number of generators kept, in shortlex order.
    #[arg(long, default_value_t = 8)]
    m: usize,
    /// Longest window counted.
    #[arg(long, default_value_t = 30)]
    n: usize,
}

#[derive(Debug, Args)]
struct SoficArgs {
    #[command(flatten)]
    set: SetArgs,
    /// Chain over m = 1..M; otherwise over lengths up to `--max-gen-len`.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 20)]
    max_gen_len: usize,
}

/// Failures inside a command, split by exit code.
enum Failure {
    Usage(String),
    Computation(String),
}

impl From<cst_core::Error> for Failure {
    fn from(e: cst_core::Error) -> Self {
        Failure::Computation(e.to_string())
    }
}

type Outcome = Result<(Value, Vec<String>), Failure>;

/// Parses `argv` (program name first) and runs the named subcommand.
pub fn run<I, S>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return CommandResult::ok(json!({ "help": e.to_string() }), Vec::new());
            }
            return CommandResult::error("usage", e.to_string(), EXIT_USAGE);
        }
    };
    let outcome = match cli.command {
        Command::Entropy(a) => entropy(&a),
        Command::Pressure(a) => pressure(&a),
        Command::Mme(a) => mme(&a),
        Command::Cylinder(a) => cylinder(&a),
        Command::Gibbs(a) => gibbs(&a),
        Command::Sample(a) => sample(&a),
        Command::UdCheck(a) => ud_check(&a),
        Command::Family(a) => family(&a),
        Command::Construct(a) => construct(&a),
        Command::Language(a) => language(&a),
        Command::Sofic(a) => sofic(&a),
    };
    match outcome {
        Ok((payload, diagnostics)) => CommandResult::ok(payload, diagnostics),
        Err(Failure::Usage(m)) => CommandResult::error("usage", m, EXIT_USAGE),
        Err(Failure::Computation(m)) => CommandResult::error("computation", m, EXIT_COMPUTATION),
    }
}

fn parse_json(flag: &str, text: Option<&str>) -> Result<Value, Failure> {
    match text {
        None => Ok(Value::Null),
        Some(t) => serde_json::from_str(t).map_err(|e| Failure::Usage(format!("--{flag}: invalid JSON: {e}"))),
    }
}

fn load_set(genset: Option<&PathBuf>, family: Option<&str>, params: Option<&str>) -> Result<GeneratingSet, Failure> {
    match (genset, family) {
        (Some(path), _) => GeneratingSet::load(path).map_err(Failure::from),
        (None, Some(name)) => Ok(preset(name, &parse_json("params", params)?)?),
        (None, None) => Err(Failure::Usage("one of --genset or --family is required".into())),
    }
}

impl SetArgs {
    fn load(&self) -> Result<GeneratingSet, Failure> {
        load_set(self.genset.as_ref(), self.family.as_deref(), self.params.as_deref())
    }

    fn tol(&self) -> Result<f64, Failure> {
        if self.tol > 0.0 && self.tol < 1.0 {
            Ok(self.tol)
        } else {
            Err(Failure::Usage("--tol: must lie in (0, 1)".into()))
        }
    }
}

fn describe(g: &GeneratingSet) -> Value {
    json!({ "name": g.name(), "params": g.family().params(), "alphabet": g.alphabet().tokens() })
}

fn parse_word(g: &GeneratingSet, text: &str) -> Result<Word, Failure> {
    g.alphabet().parse(text).map_err(|e| Failure::Usage(format!("--word: {e}")))
}

fn solution_json(sol: &CharacteristicSolution) -> Value {
    json!({
        "status": sol.status,
        "lambda_star": sol.lambda_star,
        "h_top": sol.h_top,
        "bracket": sol.bracket,
        "depth": sol.depth,
        "residual": sol.residual,
        "tol": sol.tol,
    })
}

fn solve_mme(a: &SetArgs) -> Result<(GeneratingSet, CharacteristicSolution, GBernoulliMeasure), Failure> {
    let g = a.load()?;
    let sol = solve_entropy(&g, a.tol()?)?;
    let mu = GBernoulliMeasure::mme(&g, &sol)?;
    Ok((g, sol, mu))
}

fn entropy(a: &SetArgs) -> Outcome {
    let g = a.load()?;
    let sol = solve_entropy(&g, a.tol()?)?;
    let mut payload = solution_json(&sol);
    payload["genset"] = describe(&g);
    Ok((payload, Vec::new()))
}

fn parse_potential(g: &GeneratingSet, text: Option<&str>) -> Result<WeightedPotential, Failure> {
    let v = parse_json("potential", text)?;
    if v.is_null() {
        return Ok(WeightedPotential::zero());
    }
    let field = |k: &str| -> Result<f64, Failure> {
        match v.get(k) {
            None => Ok(0.0),
            Some(x) => x.as_f64().ok_or_else(|| Failure::Usage(format!("--potential: {k} must be a number"))),
        }
    };
    let mut overrides = Vec::new();
    if let Some(o) = v.get("overrides") {
        let map = o
            .as_object()
            .ok_or_else(|| Failure::Usage("--potential: overrides must map words to numbers".into()))?;
        for (w, x) in map {
            let word = g.alphabet().parse(w).map_err(|e| Failure::Usage(format!("--potential: {e}")))?;
            let value = x
                .as_f64()
                .ok_or_else(|| Failure::Usage(format!("--potential: override for {w} must be a number")))?;
            overrides.push((word, value));
        }
    }
    Ok(WeightedPotential {
        offset: field("offset")?,
        slope: field("slope")?,
        overrides,
    })
}

fn pressure(a: &PressureArgs) -> Outcome {
    let g = a.set.load()?;
    let phi = parse_potential(&g, a.potential.as_deref())?;
    let sol = solve_pressure(&g, &phi, a.set.tol()?)?;
    let mut payload = solution_json(&sol);
    payload["pressure"] = json!(sol.h_top);
    payload["potential"] = json!({
        "offset": phi.offset,
        "slope": phi.slope,
        "overrides": phi.overrides.iter().map(|(w, x)| (g.alphabet().render(w), *x)).collect::<BTreeMap<_, _>>(),
    });
    payload["genset"] = describe(&g);
    Ok((payload, Vec::new()))
}

fn mme(a: &SetArgs) -> Outcome {
    let (g, sol, mu) = solve_mme(a)?;
    let entropy = mu.measure_entropy()?;
    let payload = json!({
        "genset": describe(&g),
        "solution": solution_json(&sol),
        "measure": mu.summary(),
        "entropy": entropy,
    });
    Ok((payload, Vec::new()))
}

fn cylinder(a: &CylinderArgs) -> Outcome {
    let (g, sol, mu) = solve_mme(&a.set)?;
    let mut rows = Vec::new();
    for text in &a.word {
        let w = parse_word(&g, text)?;
        let est = mu.word_cylinder(&w, a.max_gen_len)?;
        rows.push(json!({
            "word": text,
            "value": est.value,
            "tail_error": est.tail_error,
            "cutoff": est.cutoff,
            "covers_enumerated": est.covers_enumerated,
        }));
    }
    let payload = json!({
        "genset": describe(&g),
        "lambda_star": sol.lambda_star,
        "tol": sol.tol,
        "cylinders": rows,
    });
    Ok((payload, Vec::new()))
}

fn gibbs(a: &GibbsArgs) -> Outcome {
    let (g, sol, mu) = solve_mme(&a.set)?;
    let words = a.word.iter().map(|t| parse_word(&g, t)).collect::<Result<Vec<_>, _>>()?;
    let report = mu.gibbs_scan(&words, sol.h()?, a.max_gen_len)?;
    let payload = json!({
        "genset": describe(&g),
        "lambda_star": sol.lambda_star,
        "tol": sol.tol,
        "report": report,
    });
    Ok((payload, Vec::new()))
}

fn sample(a: &SampleArgs) -> Outcome {
    let (g, _, mu) = solve_mme(&a.set)?;
    let render = |w: &Word| g.alphabet().render(w);
    if let Some(n) = a.block_n {
        let counts: BTreeMap<String, u64> = block_counts(&mu, n, a.count, a.seed, a.max_gen_len)?
            .iter()
            .map(|(w, c)| (render(w), *c))
            .collect();
        let payload = json!({
            "genset": describe(&g),
            "seed": a.seed,
            "block_n": n,
            "samples": a.count,
            "distinct": counts.len(),
            "counts": counts,
        });
        return Ok((payload, Vec::new()));
    }
    let sampler = WindowSampler::new(&mu, a.max_gen_len)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mut windows = Vec::new();
    for _ in 0..a.count {
        let s = sampler.sample(a.len, &mut rng)?;
        windows.push(json!({
            "word": render(&s.word),
            "origin_block": render(&s.origin_block),
            "offset": s.offset,
        }));
    }
    let payload = json!({
        "genset": describe(&g),
        "seed": a.seed,
        "len": a.len,
        "cap": sampler.cap(),
        "shortfall": { "generator_mass": sampler.shortfall.0, "length_biased": sampler.shortfall.1 },
        "windows": windows,
    });
    Ok((payload, Vec::new()))
}

fn ud_check(a: &UdArgs) -> Outcome {
    let g = a.set.load()?;
    let render = |w: &Word| g.alphabet().render(w);
    let sp = sardinas_patterson(&g, a.max_gen_len)?;
    let horizon = a.n.unwrap_or(2 * a.max_gen_len);
    let report = unique_representation_check(&g, horizon)?;
    let witness = report.search_witness.as_ref().map(|found| {
        found.as_ref().map(|w| {
            json!({
                "word": render(&w.word),
                "parses": w.parses.iter().map(|p| p.blocks.iter().map(render).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        })
    });
    let payload = json!({
        "genset": describe(&g),
        "sardinas_patterson": {
            "max_gen_len": a.max_gen_len,
            "decipherable": sp.decipherable,
            "witness": sp.witness.as_ref().map(render),
        },
        "unique_representation": {
            "pass": report.pass,
            "horizon": report.horizon,
            "certificate": report.certificate,
            "search_witness": witness,
        },
    });
    Ok((payload, Vec::new()))
}

fn family(a: &FamilyArgs) -> Outcome {
    let Some(name) = a.name.as_deref() else {
        return Ok((json!({ "families": FAMILY_NAMES }), Vec::new()));
    };
    let g = preset(name, &parse_json("params", a.params.as_deref())?)?;
    let words: Vec<String> = g.enumerate(a.max_gen_len)?.iter().map(|w| g.alphabet().render(w)).collect();
    let counts = (1..=a.max_gen_len)
        .map(|n| g.count(n).map(|c| c.to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    let growth = genset_entropy(&g, a.max_gen_len.max(1))?;
    let payload = json!({
        "document": g.to_document()?,
        "max_len": g.max_len(),
        "certificate": g.certificate(),
        "counts": counts,
        "generators": words,
        "generator_entropy": growth,
    });
    Ok((payload, Vec::new()))
}

fn construct(a: &ConstructArgs) -> Outcome {
    match a.kind {
        Construction::TheoremA => {
            let z = match &a.sft {
                None => SftSpec::golden_mean(),
                Some(path) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| Failure::Computation(format!("{}: {e}", path.display())))?;
                    let doc: SftDocument = serde_json::from_str(&text)
                        .map_err(|e| Failure::Computation(format!("{}: {e}", path.display())))?;
                    SftSpec::from_document(&doc)?
                }
            };
            let b = build_theorem_a(&z, a.epsilon.unwrap_or(0.1), a.n)?;
            let mut diagnostics = Vec::new();
            if !b.certified() {
                diagnostics.push(format!("certificate sum {} is not below 1", b.certificate()));
            }
            Ok((b.to_json(), diagnostics))
        }
        Construction::Augment => {
            let base = if a.genset.is_none() && a.family.is_none() {
                preset("three_mme", &Value::Null)?
            } else {
                load_set(a.genset.as_ref(), a.family.as_deref(), a.params.as_deref())?
            };
            let m = (!a.m.is_empty()).then_some(a.m.as_slice());
            let b = build_augmentation(&base, a.epsilon.unwrap_or(0.05), a.depth, m)?;
            let mut diagnostics = Vec::new();
            if !b.within_bounds() {
                diagnostics.push("augmented root lies outside (lambda*, lambda* e^epsilon)".to_string());
            }
            Ok((b.to_json(), diagnostics))
        }
    }
}

fn language(a: &LanguageArgs) -> Outcome {
    let g = a.set.load()?;
    let tol = a.set.tol()?;
    let prefix = g.prefix(a.m)?;
    if prefix.is_empty() {
        return Err(Failure::Usage("--m: at least one generator is required".into()));
    }
    let finite = GeneratingSet::explicit(g.alphabet().clone(), prefix.clone())?;
    let aut = factor_automaton(&finite)?;
    let counts = language_counts(&aut, a.n);
    let ln: Vec<f64> = counts.iter().map(ln_biguint).collect();
    let slopes: Vec<f64> = ln.windows(2).map(|p| p[1] - p[0]).collect();
    let sol = solve_entropy(&finite, tol)?;
    let payload = json!({
        "genset": describe(&g),
        "m": prefix.len(),
        "generators": prefix.iter().map(|w| g.alphabet().render(w)).collect::<Vec<_>>(),
        "automaton": {
            "states": aut.states(),
            "transitions": aut.transitions(),
            "nfa_states": aut.nfa_states,
            "nfa_transitions": aut.nfa_transitions,
        },
        "counts": counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "slopes": slopes,
        "slope": slopes.last(),
        "log_lambda_m": sol.h_top,
        "tol": tol,
    });
    Ok((payload, Vec::new()))
}

fn sofic(a: &SoficArgs) -> Outcome {
    let g = a.set.load()?;
    let tol = a.set.tol()?;
    let chain = match a.m {
        Some(m) => sofic_approx_entropies(&g, m, tol)?,
        None => sofic_chain_by_length(&g, a.max_gen_len, tol)?,
    };
    let rows: Vec<Value> = chain
        .iter()
        .map(|s| json!({ "m": s.m.to_string(), "longest": s.longest, "status": s.status, "lambda": s.lambda }))
        .collect();
    let payload = json!({ "genset": describe(&g), "tol": tol, "chain": rows });
    Ok((payload, Vec::new()))
}
