use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use fibstat::convergence::{
    exceedance_set_real, fsc_ifn_test, fsca_ifn_test, ordinary_ifn_test, statistical_cauchy_real_test,
    statistical_real_test, theorem_harness, AnchorStrategy, HarnessConfig, OrdinaryReport, Scale,
};
use fibstat::density::{density_profile, geometric_grid, upper_density_profile};
use fibstat::fib_core::{fhat_apply, fhat_invert, Arithmetic};
use fibstat::fuzzy_algebra::{check_axioms, Connective, check_duality, AxiomReport, DualityReport};
use fibstat::ifns::{check_ifn_axioms, mutants, IfnAxiomReport};
use fibstat::{
    default_family, parse_generator, standard_ifn, ConvergenceReport, DensityConfig,
    DensityProfile, Domain, GeneratorSpec, IndexSet, IntuitionisticFuzzyNorm, Norm, NormedSpace,
    SequenceFile, Subject, TestParams, TriangularConorm, TriangularNorm, Verdict,
};
use serde::Serialize;

use crate::cli::{
    AnalyzeArgs, AnchorChoice, ArithmeticChoice, AxiomArgs, DensityArgs, DensityFlags, Direction,
    IfnChoice, InputArgs, ModeChoice, NamedSet, NormChoice, OutputArgs, TheoremArgs,
    TransformArgs, ValueName,
};

/// Bumped whenever the layout of any report changes.
pub const SCHEMA_VERSION: u32 = 1;

pub const SEED_ENV: &str = "FIBSTAT_SEED";

#[derive(Debug)]
pub enum Failure {
    /// Bad flags, specs or input files (exit 2).
    Input(String),
    /// Anything that should not happen on valid input (exit 3).
    Internal(String),
}

impl From<fibstat::Error> for Failure {
    fn from(e: fibstat::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

/// Exit status of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Computed,
    ChecksFailed,
}

type Run = Result<Outcome, Failure>;

fn effective_seed(flag: u64) -> Result<u64, Failure> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Failure::Input(format!("{SEED_ENV}={v} is not a nonnegative integer"))),
        Err(_) => Ok(flag),
    }
}

fn load(input: &InputArgs, n_max: Option<usize>) -> Result<(Subject, String), Failure> {
    let (subject, provenance) = match (&input.generator, &input.input) {
        (Some(spec), None) => {
            let spec = parse_generator(spec)?;
            (spec.generate()?, spec.to_string())
        }
        (None, Some(path)) => (SequenceFile::read(path)?, path.display().to_string()),
        _ => return Err(Failure::Input("give exactly one of --gen or --input".into())),
    };
    let subject = match n_max {
        Some(n) if n > subject.len() => {
            return Err(Failure::Input(format!(
                "--n-max {n} exceeds the {} available terms",
                subject.len()
            )))
        }
        Some(n) => subject.truncated(n)?,
        None => subject,
    };
    Ok((subject, provenance))
}

fn parse_limit(raw: Option<&str>) -> Result<Option<Vec<f64>>, Failure> {
    let Some(raw) = raw else { return Ok(None) };
    raw.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Failure::Input(format!("--L: `{tok}` is not a finite number")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Some)
}

fn norm_for(choice: Option<NormChoice>, dim: usize) -> Norm {
    match choice {
        Some(NormChoice::Abs) => Norm::Abs,
        Some(NormChoice::L2) => Norm::Euclidean,
        Some(NormChoice::Max) => Norm::Max,
        None if dim == 1 => Norm::Abs,
        None => Norm::Euclidean,
    }
}

fn build_ifn(choice: IfnChoice, space: NormedSpace) -> IntuitionisticFuzzyNorm {
    match choice {
        IfnChoice::Standard => standard_ifn(space),
        IfnChoice::Broken => mutants::broken_sum(space),
    }
}

fn density_config(flags: &DensityFlags) -> Result<DensityConfig, Failure> {
    let cfg = DensityConfig {
        tail_window: flags.tail_window,
        zero_threshold: flags.zero_threshold,
        value_band: flags.value_band,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn write_json<T: Serialize>(doc: &T, path: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(doc).map_err(|e| Failure::Internal(e.to_string()))?;
    match path {
        Some(p) => std::fs::write(p, text + "\n")
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = io::stdout().lock();
            match writeln!(out, "{text}") {
                // the reader went away (`fibstat … | head`); nothing left to report to
                Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|e| Failure::Internal(e.to_string())),
            }
        }
    }
}

fn write_profile(profile: &DensityProfile, path: &Path) -> Result<(), Failure> {
    let file = File::create(path)
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))?;
    profile
        .write_csv(BufWriter::new(file))
        .map_err(|e| Failure::Internal(e.to_string()))
}

#[derive(Serialize)]
struct InputEcho {
    provenance: String,
    length: usize,
    dim: usize,
    domain: Domain,
}

impl InputEcho {
    fn new(subject: &Subject, provenance: String) -> Self {
        Self {
            provenance,
            length: subject.len(),
            dim: subject.dim(),
            domain: subject.domain,
        }
    }
}

#[derive(Serialize)]
struct AnalyzeConfig {
    mode: String,
    ifn: String,
    norm: &'static str,
    dim: usize,
    tnorm: String,
    tconorm: String,
    epsilon: f64,
    t: f64,
    limit: Option<Vec<f64>>,
    n_max: Option<usize>,
    density: DensityConfig,
    anchor: AnchorStrategy,
    apply_fhat: bool,
    seed: u64,
}

#[derive(Serialize)]
#[serde(untagged)]
enum AnalyzeResult {
    Statistical(ConvergenceReport),
    Ordinary {
        scales: Vec<OrdinaryReport>,
        verdict: Verdict,
    },
}

#[derive(Serialize)]
struct AnalyzeDocument {
    schema_version: u32,
    command: &'static str,
    input: InputEcho,
    config: AnalyzeConfig,
    result: AnalyzeResult,
}

pub fn analyze(args: &AnalyzeArgs) -> Run {
    let seed = effective_seed(args.seed)?;
    let (subject, provenance) = load(&args.input, args.density.n_max)?;
    let dim = subject.dim();
    if let Some(d) = args.space.dim {
        if d != dim {
            return Err(Failure::Input(format!("--dim {d} but the sequence has dimension {dim}")));
        }
    }
    let norm = norm_for(args.space.norm, dim);
    let space = NormedSpace::new(dim, norm)?;
    let tnorm: TriangularNorm = args.space.tnorm.parse()?;
    let tconorm: TriangularConorm = args.space.tconorm.parse()?;
    let ifn = build_ifn(args.space.ifn, space).with_connectives(tnorm.clone(), tconorm.clone());
    let density = density_config(&args.density)?;
    let limit = parse_limit(args.limit.as_deref())?;
    let anchor = match args.anchor {
        AnchorChoice::FirstTailInlier => AnchorStrategy::FirstTailInlier,
        AnchorChoice::Exhaustive => AnchorStrategy::ExhaustiveScan {
            max_candidates: args.anchor_candidates,
        },
    };
    let params = TestParams {
        scales: vec![Scale::new(args.eps, args.t)],
        limit: limit.clone(),
        grid: None,
        density,
        apply_fhat: !args.no_fhat,
    };

    let result = match args.mode {
        ModeChoice::FscIfn => AnalyzeResult::Statistical(fsc_ifn_test(&subject, &ifn, &params)?),
        ModeChoice::FscaIfn => {
            AnalyzeResult::Statistical(fsca_ifn_test(&subject, &ifn, &params, anchor)?)
        }
        ModeChoice::StatReal => {
            AnalyzeResult::Statistical(statistical_real_test(&subject, &space, &params)?)
        }
        ModeChoice::StatCauchyReal => AnalyzeResult::Statistical(statistical_cauchy_real_test(
            &subject, &space, &params, anchor,
        )?),
        ModeChoice::Ordinary => {
            let (scales, verdict) = ordinary_ifn_test(&subject, &ifn, &params)?;
            AnalyzeResult::Ordinary { scales, verdict }
        }
    };

    if let Some(path) = &args.output.profile {
        match &result {
            AnalyzeResult::Statistical(r) => write_profile(&r.scales[0].exceedance_profile, path)?,
            AnalyzeResult::Ordinary { .. } => {
                return Err(Failure::Input("--profile is not available in ordinary mode".into()))
            }
        }
    }

    let doc = AnalyzeDocument {
        schema_version: SCHEMA_VERSION,
        command: "analyze",
        input: InputEcho::new(&subject, provenance),
        config: AnalyzeConfig {
            mode: args.mode.value_name(),
            ifn: ifn.name().to_string(),
            norm: norm.as_str(),
            dim,
            tnorm: tnorm.name(),
            tconorm: tconorm.name(),
            epsilon: args.eps,
            t: args.t,
            limit,
            n_max: args.density.n_max,
            density,
            anchor,
            apply_fhat: !args.no_fhat,
            seed,
        },
        result,
    };
    write_json(&doc, args.output.report.as_deref())?;
    Ok(Outcome::Computed)
}

pub fn transform(args: &TransformArgs) -> Run {
    let (subject, provenance) = load(&args.input, args.n_max)?;
    let arithmetic = match args.arithmetic {
        ArithmeticChoice::Float => Arithmetic::Float,
        ArithmeticChoice::Exact => Arithmetic::Exact,
    };
    let (values, domain) = match args.direction {
        Direction::Apply => (fhat_apply(&subject.values)?, Domain::Image),
        Direction::Invert => (fhat_invert(&subject.values, arithmetic)?, Domain::Terms),
    };
    let name = format!("{}({provenance})", args.direction.value_name());
    let file = SequenceFile::from_subject(&name, &Subject { values, domain });
    write_json(&file, args.output.as_deref())?;
    Ok(Outcome::Computed)
}

#[derive(Serialize)]
struct DensityConfigEcho {
    source: String,
    limit: Option<Vec<f64>>,
    epsilon: Option<f64>,
    norm: Option<&'static str>,
    apply_fhat: Option<bool>,
    n_max: usize,
    density: DensityConfig,
}

#[derive(Serialize)]
struct DensityDocument {
    schema_version: u32,
    command: &'static str,
    config: DensityConfigEcho,
    size: usize,
    lower: DensityProfile,
    upper: DensityProfile,
}

pub fn density(args: &DensityArgs) -> Run {
    let cfg = density_config(&args.density)?;
    let (set, echo) = match args.set {
        Some(named) => {
            let n = args
                .density
                .n_max
                .ok_or_else(|| Failure::Input("--set needs --n-max".into()))?;
            if n == 0 {
                return Err(Failure::Input("--n-max must be positive".into()));
            }
            let set = match named {
                NamedSet::Squares => IndexSet::squares(n),
                NamedSet::Evens => IndexSet::evens(n),
                NamedSet::Odds => IndexSet::odds(n),
                NamedSet::Full => IndexSet::full(n),
                NamedSet::Empty => IndexSet::empty(n),
            };
            let echo = DensityConfigEcho {
                source: named.value_name(),
                limit: None,
                epsilon: None,
                norm: None,
                apply_fhat: None,
                n_max: n,
                density: cfg,
            };
            (set, echo)
        }
        None => {
            let input = InputArgs {
                generator: args.generator.clone(),
                input: args.input.clone(),
            };
            let (subject, provenance) = load(&input, args.density.n_max)?;
            let y = subject.under_test(!args.no_fhat)?;
            let limit = parse_limit(args.limit.as_deref())?
                .ok_or_else(|| Failure::Input("--L is required for an exceedance set".into()))?;
            let norm = norm_for(args.norm, subject.dim());
            NormedSpace::new(subject.dim(), norm)?;
            let set = exceedance_set_real(&y, &limit, args.eps, norm)?;
            let echo = DensityConfigEcho {
                source: provenance,
                limit: Some(limit),
                epsilon: Some(args.eps),
                norm: Some(norm.as_str()),
                apply_fhat: Some(!args.no_fhat),
                n_max: subject.len(),
                density: cfg,
            };
            (set, echo)
        }
    };
    let grid = geometric_grid(set.horizon());
    let lower = density_profile(&set, &grid, &cfg)?;
    let upper = upper_density_profile(&set, &grid, &cfg)?;
    if let Some(path) = &args.output.profile {
        write_profile(&lower, path)?;
    }
    let doc = DensityDocument {
        schema_version: SCHEMA_VERSION,
        command: "density",
        config: echo,
        size: set.len(),
        lower,
        upper,
    };
    write_json(&doc, output_report(&args.output))?;
    Ok(Outcome::Computed)
}

fn output_report(o: &OutputArgs) -> Option<&Path> {
    o.report.as_deref()
}

fn builtin_tnorms() -> Vec<TriangularNorm> {
    vec![TriangularNorm::Product, TriangularNorm::Minimum, TriangularNorm::Lukasiewicz]
}

fn builtin_tconorms() -> Vec<TriangularConorm> {
    vec![
        TriangularConorm::ProbabilisticSum,
        TriangularConorm::Maximum,
        TriangularConorm::Lukasiewicz,
    ]
}

#[derive(Serialize)]
struct AxiomConfigEcho {
    step: f64,
    ifn: String,
    norm: &'static str,
    dim: usize,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct AxiomDocument {
    schema_version: u32,
    command: &'static str,
    config: AxiomConfigEcho,
    tnorms: Vec<AxiomReport>,
    tconorms: Vec<AxiomReport>,
    duality: Vec<DualityReport>,
    ifn: IfnAxiomReport,
    passed: bool,
}

fn ifn_suite(
    choice: IfnChoice,
    norm: Option<NormChoice>,
    dim: usize,
    samples: usize,
    seed: u64,
) -> Result<(IfnAxiomReport, Norm), Failure> {
    let norm = norm_for(norm, dim);
    let ifn = build_ifn(choice, NormedSpace::new(dim, norm)?);
    Ok((check_ifn_axioms(&ifn, samples, seed)?, norm))
}

pub fn axioms(args: &AxiomArgs) -> Run {
    let seed = effective_seed(args.seed)?;
    let tnorms = if args.tnorm.is_empty() {
        builtin_tnorms()
    } else {
        args.tnorm.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let tconorms = if args.tconorm.is_empty() {
        builtin_tconorms()
    } else {
        args.tconorm.iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    };
    let tn_reports = tnorms
        .iter()
        .map(|op| check_axioms(op, args.step))
        .collect::<Result<Vec<_>, _>>()?;
    let tc_reports = tconorms
        .iter()
        .map(|op| check_axioms(op, args.step))
        .collect::<Result<Vec<_>, _>>()?;
    // Duality is reported for matching positions (product/probsum, …).
    let duality = tnorms
        .iter()
        .zip(&tconorms)
        .map(|(a, b)| check_duality(a, b, args.step))
        .collect::<Result<Vec<_>, _>>()?;
    let (ifn, norm) = ifn_suite(args.ifn, args.norm, args.dim, args.samples, seed)?;

    let passed = tn_reports.iter().all(|r| r.passed)
        && tc_reports.iter().all(|r| r.passed)
        && ifn.passed;
    let doc = AxiomDocument {
        schema_version: SCHEMA_VERSION,
        command: "axioms",
        config: AxiomConfigEcho {
            step: args.step,
            ifn: ifn.ifn.clone(),
            norm: norm.as_str(),
            dim: args.dim,
            samples: args.samples,
            seed,
        },
        tnorms: tn_reports,
        tconorms: tc_reports,
        duality,
        ifn,
        passed,
    };
    write_json(&doc, args.report.as_deref())?;
    for r in doc.tnorms.iter().chain(&doc.tconorms).filter(|r| !r.passed) {
        eprintln!("axiom failure: {} ({})", r.operator, r.failures().join(", "));
    }
    for name in doc.ifn.failed() {
        eprintln!("axiom failure: {} ({name})", doc.ifn.ifn);
    }
    Ok(if passed {
        Outcome::Computed
    } else {
        Outcome::ChecksFailed
    })
}

#[derive(Serialize)]
struct TheoremConfigEcho {
    family_source: &'static str,
    members: usize,
    length: Option<usize>,
    seed: u64,
    ifn: String,
    norm: Option<String>,
    samples: usize,
}

#[derive(Serialize)]
struct TheoremDocument {
    schema_version: u32,
    command: &'static str,
    config: TheoremConfigEcho,
    family: Vec<GeneratorSpec>,
    ifn_axioms: IfnAxiomReport,
    harness: fibstat::convergence::HarnessReport,
    passed: bool,
}

pub fn theorems(args: &TheoremArgs) -> Run {
    let seed = effective_seed(args.seed)?;
    let explicit = !args.family.is_empty();
    let family: Vec<GeneratorSpec> = if explicit {
        args.family
            .iter()
            .map(|s| parse_generator(s))
            .collect::<Result<_, _>>()?
    } else {
        if args.length == 0 {
            return Err(Failure::Input("--length must be positive".into()));
        }
        default_family(args.members, seed, args.length)
    };
    if family.is_empty() {
        return Err(Failure::Input("the family is empty".into()));
    }

    let mut config = HarnessConfig::default();
    if !args.eps.is_empty() || !args.t.is_empty() {
        if args.eps.len() != args.t.len() {
            return Err(Failure::Input("--eps and --t must be given in pairs".into()));
        }
        config.scales = args.eps.iter().zip(&args.t).map(|(&e, &t)| Scale::new(e, t)).collect();
    }
    config.density.tail_window = args.tail_window;
    config.density.zero_threshold = args.zero_threshold;
    config.density.validate()?;

    let (ifn_axioms, _) = ifn_suite(args.ifn, args.norm, 1, args.samples, seed)?;
    let choice = args.ifn;
    let norm_choice = args.norm;
    let make = move |d: usize| -> fibstat::Result<IntuitionisticFuzzyNorm> {
        Ok(build_ifn(choice, NormedSpace::new(d, norm_for(norm_choice, d))?))
    };
    let harness = theorem_harness(&family, &make, &config)?;
    let passed = ifn_axioms.passed && harness.all_hold;

    for t in harness.tallies.iter().filter(|t| !t.holds()) {
        eprintln!(
            "{}: {} of {} members fail, e.g. {}",
            t.name,
            t.checked - t.held,
            t.checked,
            t.counterexamples[0]
        );
    }
    for name in ifn_axioms.failed() {
        eprintln!("axiom failure: {} ({name})", ifn_axioms.ifn);
    }

    let doc = TheoremDocument {
        schema_version: SCHEMA_VERSION,
        command: "theorems",
        config: TheoremConfigEcho {
            family_source: if explicit { "explicit" } else { "default" },
            members: family.len(),
            length: (!explicit).then_some(args.length),
            seed,
            ifn: ifn_axioms.ifn.clone(),
            norm: args.norm.map(|n| n.value_name()),
            samples: args.samples,
        },
        family,
        ifn_axioms,
        harness,
        passed,
    };
    write_json(&doc, args.report.as_deref())?;
    Ok(if passed {
        Outcome::Computed
    } else {
        Outcome::ChecksFailed
    })
}
