//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the summary lines are never captured.
//! Every trial is seeded; a rerun prints the same numbers.

use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};

use cubeprobe::cube::{BitString, ProductDistribution, SubcubeCondition};
use cubeprobe::estimator::{cube_probe_est, est_mass, marginal_sample_size, EstimateReport};
use cubeprobe::gbas::{default_max_draws, gbas_estimate};
use cubeprobe::oracle::{exact_distribution, exact_tv, to_f64};
use cubeprobe::poset::{
    count_extensions, encode_cnf, generate_instance, Family, LinearExtension, Poset, SamplerSpec,
    UniformExtensionDistribution,
};
use cubeprobe::rng::RngStream;
use cubeprobe::{cube_probe_tester, Decision};

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

const FIGURE1: &str = r#"{"elements":4,"relations":[[1,2],[1,3],[2,4]]}"#;

fn fork4() -> Poset {
    Poset::parse(FIGURE1).unwrap()
}

fn oracle_tv(p: &Poset, a: &SamplerSpec, b: &SamplerSpec) -> f64 {
    let a = exact_distribution(a, p).unwrap();
    let b = exact_distribution(b, p).unwrap();
    to_f64(&exact_tv(&a, &b).unwrap())
}

fn estimates(p: &Poset, spec: &SamplerSpec, zeta: f64, delta: f64, seeds: std::ops::Range<u64>) -> Vec<EstimateReport> {
    let sampler = spec.build(p).unwrap();
    let known = UniformExtensionDistribution::new(p).unwrap();
    seeds
        .map(|seed| cube_probe_est(&sampler, &known, zeta, delta, seed).unwrap())
        .collect()
}

fn c1_gbas() -> Outcome {
    let k = (3.0 * 40f64.ln() / 0.01).ceil() as u64;
    check(k == 1107, format!("k = {k}, expected 1107"))?;
    let mut notes = Vec::new();
    for (j, p) in [0.25, 0.5, 0.9].into_iter().enumerate() {
        let mut coin = ProductDistribution::new(vec![p]).unwrap();
        let full = SubcubeCondition::full(1);
        let trials = 200;
        let (mut bad, mut draws) = (0, 0u64);
        for t in 0..trials {
            let mut rng = RngStream::new(1000 + j as u64, t);
            let r = gbas_estimate(&mut coin, &full, 0, true, k, &mut rng, default_max_draws(k)).unwrap();
            if (r.p_hat / p - 1.0).abs() > 0.1 {
                bad += 1;
            }
            draws += r.draws;
        }
        let mean = draws as f64 / trials as f64;
        let expect = k as f64 / p;
        check(bad * 10 <= trials, format!("p={p}: {bad}/{trials} trials off by more than 10%"))?;
        check(
            (mean / expect - 1.0).abs() <= 0.1,
            format!("p={p}: mean draws {mean:.1} vs k/p = {expect:.1}"),
        )?;
        notes.push(format!("p={p}: {bad}/200 off, draws {mean:.0}/{expect:.0}"));
    }
    Ok(notes.join("; "))
}

fn c2_est_mass() -> Outcome {
    let p = fork4();
    let mut sampler = SamplerSpec::Uniform.build(&p).unwrap();
    let x: BitString = "11".parse().unwrap();
    let truth = to_f64(&exact_distribution(&SamplerSpec::Uniform, &p).unwrap().mass_of(&x));
    check((truth - 1.0 / 3.0).abs() < 1e-15, format!("oracle mass {truth}"))?;
    let gamma = 0.1175;
    let k = marginal_sample_size(2, gamma, 0.01).unwrap();
    check(k == 2604, format!("k = {k}, expected 2604"))?;
    let (lo, hi) = ((1.0 - 1.11 * gamma) / 3.0, (1.0 + 1.11 * gamma) / 3.0);
    let inside = (0..100)
        .filter(|&t| {
            let mut rng = RngStream::new(2, t);
            let est = est_mass(&mut sampler, &x, k, &mut rng, default_max_draws(k)).unwrap();
            (lo..=hi).contains(&est.p_hat_x)
        })
        .count();
    check(inside >= 95, format!("{inside}/100 inside [{lo:.4}, {hi:.4}]"))?;
    Ok(format!("{inside}/100 inside [{lo:.4}, {hi:.4}]"))
}

/// Smallest doubling of `w` for which weights `(1, 1, w, 1)` put the greedy
/// sampler at TV >= 0.5 from uniform on the fork poset.
fn skewed_fork4() -> (SamplerSpec, f64) {
    let p = fork4();
    let mut w = 1.0;
    loop {
        let spec = SamplerSpec::Biased(vec![1.0, 1.0, w, 1.0]);
        let tv = oracle_tv(&p, &spec, &SamplerSpec::Uniform);
        if tv >= 0.5 {
            return (spec, tv);
        }
        w *= 2.0;
    }
}

struct C3 {
    summary: Outcome,
    /// Reports of setting (b), reused by the sample-complexity check.
    biased_equal: Vec<EstimateReport>,
}

fn c3_accuracy() -> C3 {
    let p = fork4();
    let (zeta, delta) = (0.3, 0.2);
    let a = estimates(&p, &SamplerSpec::Uniform, zeta, delta, 0..20);
    let b = estimates(&p, &SamplerSpec::BiasedEqual, zeta, delta, 100..120);
    let summary = (|| {
        let ok_a = a.iter().filter(|r| r.dtv_estimate <= zeta).count();
        check(ok_a >= 16, format!("(a) {ok_a}/20 at most {zeta}"))?;

        let tv_b = oracle_tv(&p, &SamplerSpec::BiasedEqual, &SamplerSpec::Uniform);
        check((tv_b - 1.0 / 6.0).abs() < 1e-12, format!("(b) oracle TV {tv_b}"))?;
        let ok_b = b.iter().filter(|r| (r.dtv_estimate - tv_b).abs() <= zeta).count();
        check(ok_b >= 16, format!("(b) {ok_b}/20 within {zeta} of 1/6"))?;

        let (spec, tv_c) = skewed_fork4();
        let c = estimates(&p, &spec, zeta, delta, 200..220);
        let ok_c = c.iter().filter(|r| (r.dtv_estimate - tv_c).abs() <= zeta).count();
        check(ok_c >= 16, format!("(c) {ok_c}/20 within {zeta} of {tv_c:.4}"))?;
        Ok(format!("(a) {ok_a}/20, (b) {ok_b}/20, (c) {spec} TV {tv_c:.4}: {ok_c}/20"))
    })();
    C3 { summary, biased_equal: b }
}

/// Weights `(1, w, w^2)` on an antichain of three, doubling `w` until the
/// oracle certifies TV >= 0.7 from uniform.
fn far_antichain() -> (Poset, SamplerSpec, f64) {
    let p = Poset::antichain(3).unwrap();
    let mut w = 2.0;
    loop {
        let spec = SamplerSpec::Biased(vec![1.0, w, w * w]);
        let tv = oracle_tv(&p, &spec, &SamplerSpec::Uniform);
        if tv >= 0.7 {
            return (p, spec, tv);
        }
        w *= 2.0;
    }
}

fn c4_tester() -> Outcome {
    let (eps, eta, delta) = (0.01, 0.61, 0.1);
    let p = fork4();
    let same = SamplerSpec::Uniform.build(&p).unwrap();
    let known = UniformExtensionDistribution::new(&p).unwrap();
    let accepts = (0..20)
        .filter(|&s| cube_probe_tester(&same, &known, eps, eta, delta, s).unwrap().decision == Decision::Accept)
        .count();
    check(accepts >= 16, format!("identical: {accepts}/20 ACCEPT"))?;

    let (far, spec, tv) = far_antichain();
    let sampler = spec.build(&far).unwrap();
    let known = UniformExtensionDistribution::new(&far).unwrap();
    let rejects = (0..20)
        .filter(|&s| cube_probe_tester(&sampler, &known, eps, eta, delta, s).unwrap().decision == Decision::Reject)
        .count();
    check(rejects >= 16, format!("far: {rejects}/20 REJECT"))?;
    Ok(format!("identical {accepts}/20 ACCEPT; antichain-3 {spec} (TV {tv:.4}) {rejects}/20 REJECT"))
}

fn c5_samples(reports: &[EstimateReport]) -> Outcome {
    let mean = |rs: &[EstimateReport]| rs.iter().map(|r| r.total_samples as f64).sum::<f64>() / rs.len() as f64;
    let p = reports[0].params;
    let n = p.n as f64;
    let bound = p.alpha as f64 * n * (8.0 * n / (p.gamma * p.gamma)) * (2.0 * n / p.delta_prime).ln();
    let measured = mean(reports);
    let ratio = measured / bound;
    check((0.25..=4.0).contains(&ratio), format!("measured {measured:.0} vs bound {bound:.0}"))?;

    let halved = estimates(&fork4(), &SamplerSpec::BiasedEqual, p.zeta / 2.0, p.delta, 100..103);
    let growth = mean(&halved) / measured;
    check(growth >= 8.0, format!("halving zeta grew samples by {growth:.2}x"))?;
    Ok(format!("mean {measured:.0} = {ratio:.3} x bound; halving zeta: {growth:.1}x"))
}

fn test_posets() -> Vec<(String, Poset)> {
    let mut out = vec![
        ("fork4".to_string(), fork4()),
        ("antichain_3".to_string(), Poset::antichain(3).unwrap()),
        ("antichain_5".to_string(), Poset::antichain(5).unwrap()),
        ("chain_4".to_string(), Poset::chain(4).unwrap()),
        ("vee_4".to_string(), Poset::from_relations(4, &[(1, 2), (1, 3), (1, 4)]).unwrap()),
    ];
    for (family, size, index) in [
        (Family::AvgDeg(1), 6, 0),
        (Family::AvgDeg(3), 8, 2),
        (Family::Bipartite(0.2), 8, 1),
        (Family::Bipartite(0.5), 6, 4),
    ] {
        let g = generate_instance(family, size, index).unwrap();
        out.push((g.name, g.poset));
    }
    out
}

/// Exhaustive models of the CNF, decoded into total orders.
fn cnf_extensions(p: &Poset) -> Result<Vec<Vec<usize>>, String> {
    let cnf = encode_cnf(p);
    let k = p.len();
    let mut out = Vec::new();
    for m in 0u32..1 << cnf.num_vars {
        let a: Vec<bool> = (0..cnf.num_vars).map(|v| m >> v & 1 == 1).collect();
        if !cnf.satisfied_by(&a) {
            continue;
        }
        let before = |x: usize, y: usize| {
            let (i, j) = (x.min(y), x.max(y));
            a[i * (2 * k - i - 1) / 2 + (j - i - 1)] == (x < y)
        };
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&x| (0..k).filter(|&y| y != x && before(y, x)).count());
        let consistent = order.windows(2).all(|w| before(w[0], w[1]));
        let e = LinearExtension::new(order.clone()).map_err(|e| e.to_string())?;
        check(consistent && e.respects(p), format!("model {m:b} is not an extension"))?;
        out.push(order);
    }
    out.sort();
    Ok(out)
}

fn c6_structure() -> Outcome {
    let p = fork4();
    let enc = p.encode_matrix();
    check(enc.unrolled == "111*1*", format!("encoding {}", enc.unrolled))?;
    let pairs = enc.free.labelled_pairs();
    check(pairs == vec![(2, 3), (3, 4)], format!("free pairs {pairs:?}"))?;

    let map = p.free_map();
    let sub = p.subcond(&map, map.index_of(1, 2).unwrap(), false).map_err(|e| e.to_string())?;
    check(sub.relations_labelled().contains(&(3, 2)), "SubCond did not add 3 before 2")?;

    let posets = test_posets();
    for (name, q) in &posets {
        let listed = q.enumerate_extensions().map_err(|e| e.to_string())?.len();
        let counted = count_extensions(q).map_err(|e| e.to_string())?;
        check(counted == listed.into(), format!("{name}: count {counted} vs {listed} listed"))?;
    }

    let anti = encode_cnf(&Poset::antichain(3).unwrap());
    check(
        anti.num_vars == 3 && anti.transitivity_clauses == 6,
        format!("antichain-3 CNF: {} vars, {} type-2", anti.num_vars, anti.transitivity_clauses),
    )?;

    let mut bijections = 0;
    for (name, q) in posets.iter().filter(|(_, q)| q.len() <= 6) {
        let mut listed: Vec<Vec<usize>> = q
            .enumerate_extensions()
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|e| e.order().to_vec())
            .collect();
        listed.sort();
        check(cnf_extensions(q)? == listed, format!("{name}: CNF models differ from extensions"))?;
        bijections += 1;
    }
    Ok(format!("{} posets counted, {bijections} CNF bijections", posets.len()))
}

fn instance_file() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cubeprobe-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("fork4.json");
    std::fs::write(&path, FIGURE1).unwrap();
    path
}

fn run_json(args: &[&str]) -> Result<(i32, serde_json::Value), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_cubeprobe"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let mut v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| format!("{args:?}: {e}"))?;
    v.as_object_mut().ok_or("report is not an object")?.remove("wall_time");
    Ok((out.status.code().unwrap_or(-1), v))
}

fn c7_determinism() -> Outcome {
    let file = instance_file();
    let result = determinism_runs(file.to_str().unwrap());
    let _ = std::fs::remove_dir_all(file.parent().unwrap());
    result
}

fn determinism_runs(path: &str) -> Outcome {
    let runs: [Vec<&str>; 4] = [
        vec!["estimate", path, "--sampler", "biased-equal", "--zeta", "0.3", "--delta", "0.2", "--seed", "1", "--threads", "1"],
        vec!["estimate", path, "--sampler", "biased:1,1,8,1", "--seed", "5", "--threads", "2"],
        vec!["test", path, "--sampler", "uniform", "--epsilon", "0.01", "--eta", "0.61", "--delta", "0.1", "--seed", "7"],
        vec!["estimate", path, "--seed", "3", "--max-samples", "200000"],
    ];
    let mut codes = Vec::new();
    for args in runs {
        let mut args = args;
        args.extend(["--format", "json"]);
        let first = run_json(&args)?;
        let second = run_json(&args)?;
        check(first == second, format!("{args:?} differs between runs"))?;
        let obj = first.1.as_object().unwrap();
        for field in ["instance_path", "dim", "estd_dtv", "samples", "verdict", "params", "seed"] {
            check(obj.contains_key(field), format!("report lacks {field}"))?;
        }
        codes.push(first.0);
    }
    check(codes == vec![0, 0, 0, 2], format!("exit codes {codes:?}"))?;
    Ok("4 argv sets reproduce byte-identical JSON (exit codes 0, 0, 0, 2)".into())
}

fn main() -> ExitCode {
    // Failed checks are reported through the summary lines, not backtraces.
    panic::set_hook(Box::new(|_| {}));
    let guard = |f: &dyn Fn() -> Outcome| {
        panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            Err(e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        })
    };

    let mut results: Vec<(&str, Outcome)> = Vec::new();
    results.push(("1 GBAS relative error and E[T] = k/p", guard(&c1_gbas)));
    results.push(("2 Est multiplicative contract", guard(&c2_est_mass)));
    let c3 = panic::catch_unwind(c3_accuracy);
    let (c3_summary, reports) = match c3 {
        Ok(c3) => (c3.summary, Some(c3.biased_equal)),
        Err(_) => (Err("panicked".into()), None),
    };
    results.push(("3 CubeProbeEst accuracy", c3_summary));
    results.push(("4 tester completeness and soundness", guard(&c4_tester)));
    let c5 = match &reports {
        Some(r) => guard(&|| c5_samples(r)),
        None => Err("no reports from criterion 3".into()),
    };
    results.push(("5 sample-complexity envelope", c5));
    results.push(("6 exact structure", guard(&c6_structure)));
    results.push(("7 CLI determinism", guard(&c7_determinism)));

    let mut failed = 0;
    for (name, outcome) in &results {
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
