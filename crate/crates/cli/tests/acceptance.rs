//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line;
//! the process exits nonzero if any criterion fails.

use std::path::Path;
use std::process::{Command, Output};

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use fibstat::convergence::{
    exceedance_set_ifn, exceedance_set_real, extract_density_one_subsequence,
    estimate_statistical_limit, fsc_ifn_test, ordinary_ifn_convergence_test, theorem_harness,
    ExtractionSchedule, HarnessConfig, Scale,
};
use fibstat::density::{check_density_axioms, density_profile, geometric_grid};
use fibstat::fib_core::{
    check_cassini, check_sum_identity, fhat_apply, fhat_apply_exact, fhat_invert,
    fhat_invert_exact, golden_ratio_estimate, Arithmetic, FibTable,
};
use fibstat::fuzzy_algebra::{check_axioms, mutants, Connective, AXIOM_TOLERANCE};
use fibstat::ifns::check_ifn_axioms;
use fibstat::{
    default_family, parse_generator, standard_ifn, DensityConfig, DensityVerdict, IndexSet, Norm,
    NormedSpace, RealSequence, Subject, TestParams, TriangularConorm, TriangularNorm, Verdict,
};

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn gen(spec: &str) -> Result<Subject, String> {
    parse_generator(spec).and_then(|g| g.generate()).map_err(err)
}

fn fibonacci_identities() -> Check {
    for n in 2..=90 {
        let sum = check_sum_identity(n).map_err(err)?;
        ensure(sum == BigInt::from(0), format!("sum identity residual {sum} at n = {n}"))?;
        let c = check_cassini(n).map_err(err)?;
        let expected = BigInt::from(if n % 2 == 0 { 1 } else { -1 });
        ensure(c.residual == expected, format!("Cassini residual {} at n = {n}", c.residual))?;
    }
    let g = golden_ratio_estimate(40).map_err(err)?;
    ensure(g.error() < 1e-12, format!("|f41/f40 - phi| = {:e}", g.error()))?;
    Ok(format!("n in [2, 90] exact; |f41/f40 - phi| = {:.1e}", g.error()))
}

fn fhat_behaviour() -> Check {
    let mut worst_limit: f64 = 0.0;
    for c in [1.0, -2.0, 3.5] {
        let x = RealSequence::scalar(vec![c; 200], "const").map_err(err)?;
        let y = fhat_apply(&x).map_err(err)?;
        for n in 60..=200 {
            worst_limit = worst_limit.max((y.term(n)[0] + c).abs());
        }
    }
    ensure(worst_limit < 1e-9, format!("|F̂(const c)_n + c| reaches {worst_limit:e}"))?;

    let table = FibTable::new(202);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let x: Vec<BigRational> = (0..200)
        .map(|_| BigRational::new(rng.gen_range(-1000..1000).into(), rng.gen_range(1..100).into()))
        .collect();
    let y = fhat_apply_exact(&x, &table).map_err(err)?;
    let back = fhat_invert_exact(&y, &table).map_err(err)?;
    ensure(back == x, "exact round trip differs at length 200")?;

    let mut worst_rt: f64 = 0.0;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..30).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let s = RealSequence::scalar(x.clone(), "x").map_err(err)?;
        let back = fhat_invert(&fhat_apply(&s).map_err(err)?, Arithmetic::Float).map_err(err)?;
        let diff = x.iter().zip(back.as_flat()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let size = x.iter().map(|a| a.abs()).fold(0.0, f64::max);
        worst_rt = worst_rt.max(diff / size);
    }
    ensure(
        worst_rt < 1e-6,
        format!(
            "float round trip relative error {worst_rt:.2e} >= 1e-6 at length 30 \
             (limit {worst_limit:.1e} and exact round trip pass)"
        ),
    )?;
    Ok(format!("limit error {worst_limit:.1e}; exact round trip; float round trip {worst_rt:.1e}"))
}

fn density_checks() -> Check {
    let cfg = DensityConfig::default();
    let n = 1_000_000;
    let grid = geometric_grid(n);
    let squares = IndexSet::squares(n);
    let p = density_profile(&squares, &grid, &cfg).map_err(err)?;
    let last = p.points.last().unwrap();
    ensure(last.exact_ratio() == (1000, 1_000_000), format!("squares at 10^6: {last:?}"))?;

    let evens = density_profile(&IndexSet::evens(n), &grid, &cfg).map_err(err)?;
    match evens.verdict {
        DensityVerdict::Value(v) if (v - 0.5).abs() < 1e-6 => {}
        v => return Err(format!("evens verdict {v:?}")),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let random = IndexSet::from_predicate(n, |_| rng.gen_bool(0.3));
    for set in [&squares, &IndexSet::evens(n), &random] {
        let co = set.complement();
        for &m in &grid {
            let (a, b) = (set.count_upto(m).map_err(err)?, co.count_upto(m).map_err(err)?);
            ensure(a + b == m, format!("complement identity fails at n = {m}"))?;
        }
    }

    let h = 10_000;
    let g = geometric_grid(h);
    let sq = IndexSet::squares(h);
    let sq_plus = IndexSet::new(
        {
            let mut v = sq.indices().to_vec();
            v.extend([2, 3]);
            v.sort_unstable();
            v
        },
        h,
    )
    .map_err(err)?;
    let pairs = vec![
        (IndexSet::evens(h), IndexSet::odds(h)),
        (IndexSet::evens(h), IndexSet::evens(h)),
        (sq.clone(), sq_plus),
    ];
    let report = check_density_axioms(&pairs, &g).map_err(err)?;
    ensure(report.holds, format!("axiom surrogates: {report:?}"))?;
    ensure(report.pairs[0].disjoint_additivity == Some(true), "evens/odds additivity")?;
    let tail_n = g[g.len() / 2];
    ensure(
        report.pairs[2].tail_ratio_gap <= 2.0 / tail_n as f64,
        format!("squares vs squares+{{2,3}} tail gap {}", report.pairs[2].tail_ratio_gap),
    )?;
    Ok("squares 1000/10^6 exact; evens Value(0.5); complement identity; axiom surrogates".into())
}

fn algebra_suites() -> Check {
    let step = 0.05;
    let tnorms = [TriangularNorm::Product, TriangularNorm::Minimum, TriangularNorm::Lukasiewicz];
    let tconorms = [
        TriangularConorm::ProbabilisticSum,
        TriangularConorm::Maximum,
        TriangularConorm::Lukasiewicz,
    ];
    for op in &tnorms {
        let r = check_axioms(op, step).map_err(err)?;
        ensure(r.passed, format!("{} fails {:?}", op.name(), r.failures()))?;
    }
    for op in &tconorms {
        let r = check_axioms(op, step).map_err(err)?;
        ensure(r.passed, format!("{} fails {:?}", op.name(), r.failures()))?;
    }
    for m in [mutants::non_commutative(), mutants::non_monotone(), mutants::wrong_boundary()] {
        let r = check_axioms(&m, step).map_err(err)?;
        ensure(!r.passed, format!("mutant {} not flagged", m.name()))?;
    }
    let ifn = standard_ifn(NormedSpace::real_line());
    let r = check_ifn_axioms(&ifn, 10_000, 1).map_err(err)?;
    ensure(r.tolerance <= AXIOM_TOLERANCE, "IFN tolerance looser than 1e-12")?;
    ensure(r.passed, format!("standard IFN fails {:?}", r.failed()))?;
    let required = r.checks.iter().filter(|c| c.required).count();
    Ok(format!("6 connectives pass, 3 mutants flagged, standard IFN passes all {required} required checks"))
}

fn oracle_equivalence() -> Check {
    let pairs = [(0.5, 1.0), (0.1, 1.0), (0.2, 0.5), (0.9, 3.0), (0.01, 10.0)];
    let n = 100_000;
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let dim = [1, 1, 2, 3][seed as usize % 4];
        let norm = match (dim, seed % 3) {
            (1, _) => Norm::Abs,
            (_, 0) => Norm::Max,
            _ => Norm::Euclidean,
        };
        let spread = 10f64.powf(rng.gen_range(-2.0..1.0));
        let limit: Vec<f64> = (0..dim).map(|_| rng.gen_range(-5.0..5.0)).collect();
        let flat: Vec<f64> = (0..n * dim)
            .map(|i| limit[i % dim] + spread * rng.gen_range(-1.0..1.0))
            .collect();
        let y = RealSequence::from_flat(flat, dim, "random").map_err(err)?;
        let ifn = standard_ifn(NormedSpace::new(dim, norm).map_err(err)?);
        for (eps, t) in pairs {
            let a = exceedance_set_ifn(&y, &ifn, &limit, eps, t).map_err(err)?;
            let b = exceedance_set_real(&y, &limit, eps * t / (1.0 - eps), norm).map_err(err)?;
            ensure(a == b, format!("seed {seed}, eps {eps}, t {t}: sets differ"))?;
        }
    }
    Ok("20 sequences x 5 scales, identical sets up to n = 10^5".into())
}

fn corrected_example() -> Check {
    let n = 100_000;
    let subject = gen(&format!("fib_square_spikes::{n}"))?;
    let ifn = standard_ifn(NormedSpace::real_line());
    let params = TestParams::single(0.5, 1.0).with_limit(vec![0.0]);
    let report = fsc_ifn_test(&subject, &ifn, &params).map_err(err)?;
    ensure(
        report.verdict == Verdict::Converges { limit: vec![0.0] },
        format!("FSC-IFN verdict {:?}", report.verdict),
    )?;
    for p in &report.scales[0].exceedance_profile.points {
        let root = (p.n as f64).sqrt() as usize;
        let root = if (root + 1) * (root + 1) <= p.n { root + 1 } else { root };
        ensure(p.count == root, format!("count {} at n = {}, expected {root}", p.count, p.n))?;
    }
    let y = subject.under_test(true).map_err(err)?;
    let ord = ordinary_ifn_convergence_test(&y, &ifn, &[0.0], 0.5, 1.0).map_err(err)?;
    ensure(ord.verdict == Verdict::Undetermined, format!("ordinary verdict {:?}", ord.verdict))?;
    Ok("Converges(0) with ratio floor(sqrt n)/n at every grid point; ordinary Undetermined".into())
}

fn theorem_harness_check() -> Check {
    let family = default_family(60, 1, 10_000);
    let make = |d: usize| {
        let norm = if d == 1 { Norm::Abs } else { Norm::Euclidean };
        Ok(standard_ifn(NormedSpace::new(d, norm)?))
    };
    let report = theorem_harness(&family, &make, &HarnessConfig::default()).map_err(err)?;
    for t in &report.tallies {
        ensure(
            t.holds() && t.checked == family.len(),
            format!("{}: {}/{} hold, e.g. {:?}", t.name, t.held, t.checked, t.counterexamples.first()),
        )?;
    }
    ensure(
        report.members.iter().all(|m| m.lemma_verdicts_agree && m.conditions.agree()),
        "lemma or condition verdicts disagree",
    )?;
    ensure(!report.converse_counterexamples.is_empty(), "no member separates the notions")?;
    let positive = report.members.iter().filter(|m| m.conditions.convergent).count();

    let spikes = gen("square_spikes:amp=1:100000")?;
    let ifn = standard_ifn(NormedSpace::real_line());
    let w = extract_density_one_subsequence(
        &spikes,
        &ifn,
        &[0.0],
        Scale::new(0.5, 1.0),
        &ExtractionSchedule::default(),
        &TestParams::default(),
    )
    .map_err(err)?;
    let sup = w.values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    ensure(w.valid, "extraction witness invalid")?;
    ensure(w.profile.tail_liminf >= 0.99, format!("d(J) tail estimate {}", w.profile.tail_liminf))?;
    ensure(sup == 0.0, format!("subsequence sup deviation {sup}"))?;
    Ok(format!(
        "{} members ({positive} convergent), all implications hold; d(J) tail {:.4}, sup deviation 0",
        family.len(),
        w.profile.tail_liminf
    ))
}

fn limit_estimation() -> Check {
    let ifn = standard_ifn(NormedSpace::real_line());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for seed in 0..10u64 {
        let planted: f64 = (rng.gen_range(-50.0..50.0) * 1e4f64).round() / 1e4;
        let amp = rng.gen_range(1.0..20.0);
        let subject = gen(&format!("square_spikes:c={planted},amp={amp:.3},seed={seed}:10000"))?;
        let params = TestParams::default();
        let l = estimate_statistical_limit(&subject, &params).map_err(err)?;
        worst = worst.max((l[0] - planted).abs());
        let r = fsc_ifn_test(&subject, &ifn, &TestParams::default().with_limit(l)).map_err(err)?;
        ensure(r.passed(), format!("FSC-IFN at the estimate fails for c = {planted}"))?;
    }
    ensure(worst < 1e-6, format!("estimate off by {worst:e}"))?;
    Ok(format!("10 planted limits recovered within {worst:.1e}; FSC-IFN passes at each"))
}

fn run_cli(args: &[&str]) -> Result<Output, String> {
    Command::new(env!("CARGO_BIN_EXE_fibstat"))
        .args(args)
        .env_remove("FIBSTAT_SEED")
        .output()
        .map_err(err)
}

fn cli_determinism() -> Check {
    let dir = tempfile::tempdir().map_err(err)?;
    let path = |name: &str| dir.path().join(name).display().to_string();
    let read = |p: &str| std::fs::read(Path::new(p)).map_err(err);

    let (a1, a2) = (path("a1.json"), path("a2.json"));
    for out in [&a1, &a2] {
        let o = run_cli(&[
            "analyze", "--gen", "square_spikes:amp=1:10000", "--mode", "fsc-ifn", "--ifn",
            "standard", "--eps", "0.5", "--t", "1", "--L", "0", "--report", out,
        ])?;
        ensure(o.status.code() == Some(0), format!("analyze exit {:?}", o.status.code()))?;
    }
    ensure(read(&a1)? == read(&a2)?, "analyze reports differ")?;

    let (t1, t2) = (path("t1.json"), path("t2.json"));
    for out in [&t1, &t2] {
        let o = run_cli(&["theorems", "--members", "12", "--length", "4000", "--seed", "1", "--report", out])?;
        ensure(o.status.code() == Some(0), format!("theorems exit {:?}", o.status.code()))?;
    }
    ensure(read(&t1)? == read(&t2)?, "theorems reports differ")?;

    for (spec, token) in [
        ("const:c=abc:10", "c=abc"),
        ("nosuch:c=1:10", "nosuch"),
        ("const:c=1:0", "`0`"),
        ("const:amp=2:10", "amp=2"),
    ] {
        let o = run_cli(&["analyze", "--gen", spec])?;
        let stderr = String::from_utf8_lossy(&o.stderr);
        ensure(o.status.code() == Some(2), format!("{spec}: exit {:?}", o.status.code()))?;
        ensure(stderr.contains(token), format!("{spec}: diagnostic `{}` lacks {token}", stderr.trim()))?;
    }
    Ok("analyze and theorems byte-identical; malformed specs exit 2 naming the token".into())
}

fn main() {
    type Criterion = (&'static str, fn() -> Check);
    let criteria: [Criterion; 9] = [
        ("Fibonacci identities", fibonacci_identities),
        ("F̂ behaviour", fhat_behaviour),
        ("density", density_checks),
        ("algebra suites", algebra_suites),
        ("oracle equivalence", oracle_equivalence),
        ("corrected spike example", corrected_example),
        ("theorem harness", theorem_harness_check),
        ("limit estimation", limit_estimation),
        ("CLI determinism", cli_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
