//! Acceptance criteria. Run with `--nocapture` to see one PASS/FAIL line per
//! criterion; every tolerance is exact (rational or rank arithmetic), only
//! runtimes carry limits.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use mdcsr::bounds::{
    bound_beta, bound_general, bound_prior, dominance, intersection_check, level_capacity, mbr_point,
    Dominance, NormalizedRates,
};
use mdcsr::entropy::{all_permutations, EntropyLab, Suite};
use mdcsr::secrecy::{audit_all, audit_with_sizes, type_ranks};
use mdcsr::system::{NodeShare, System, SystemParams};
use mdcsr::{FieldModulus, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn system(n: usize, d: usize, l1: usize, l2: usize, files: &[(usize, usize)]) -> System {
    System::new(SystemParams {
        n,
        d,
        l1,
        l2,
        p: FieldModulus::default(),
        file_sizes: files.iter().copied().collect(),
    })
    .expect("valid system")
}

fn messages(sys: &System) -> BTreeMap<usize, Vec<u32>> {
    sys.params()
        .file_sizes
        .iter()
        .map(|(&j, &b)| (j, (0..b as u32).map(|x| (x * 31 + j as u32 * 7) % 257).collect()))
        .collect()
}

fn reference_rates() -> NormalizedRates {
    NormalizedRates::new(3, 0, 0, vec![Rational::ZERO, Rational::new(1, 3), Rational::new(2, 3)]).unwrap()
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0u32..1 << n)
        .filter(|m| m.count_ones() as usize == k)
        .map(|m| (1..=n).filter(|i| m >> (i - 1) & 1 == 1).collect())
        .collect()
}

fn criterion_1() -> Outcome {
    let r = reference_rates();
    let beta = bound_beta(&r);
    let general = bound_general(&r).map_err(|e| e.to_string())?;
    let prior = bound_prior(&r);
    let mbr = mbr_point(&r);
    ensure(beta == Rational::new(8, 45), || format!("beta floor {beta}"))?;
    ensure(general.to_string() == "alpha + 3*beta >= 16/15", || general.to_string())?;
    ensure(prior.to_string() == "alpha + 9*beta >= 32/15", || prior.to_string())?;
    ensure(
        (mbr.alpha, mbr.beta) == (Rational::new(8, 15), Rational::new(8, 45)),
        || format!("mbr ({}, {})", mbr.alpha, mbr.beta),
    )?;
    let ix = intersection_check(&r).map_err(|e| e.to_string())?;
    ensure(ix.holds(), || format!("{ix:?}"))?;
    Ok(format!("beta >= {beta}; {general}; {prior}; MBR ({}, {})", mbr.alpha, mbr.beta))
}

fn criterion_2() -> Outcome {
    let sys = system(4, 3, 0, 0, &[(2, 15), (3, 30)]);
    let (point, _) = sys.achieved_point().map_err(|e| e.to_string())?;
    ensure(
        (point.alpha, point.beta) == (Rational::new(8, 15), Rational::new(8, 45)),
        || format!("achieved ({}, {})", point.alpha, point.beta),
    )?;
    let msgs = messages(&sys);
    let shares = sys.encode(&msgs, 2024).map_err(|e| e.to_string())?;
    let pick = |nodes: &[usize]| -> Vec<NodeShare> { nodes.iter().map(|&i| shares[i - 1].clone()).collect() };
    let mut recoveries = 0;
    for (level, k) in [(2, 2), (3, 3)] {
        for nodes in subsets(4, k) {
            let got = sys.recover_file(level, &pick(&nodes)).map_err(|e| e.to_string())?;
            ensure(got == msgs[&level], || format!("level {level} from {nodes:?} differs"))?;
            recoveries += 1;
        }
    }
    let mut repairs = 0;
    for target in 1..=4 {
        // n = d + 1, so the other three nodes are the only helper set
        let helpers: Vec<usize> = (1..=4).filter(|&i| i != target).collect();
        let rebuilt = sys.repair_node(target, &pick(&helpers)).map_err(|e| e.to_string())?;
        ensure(rebuilt == shares[target - 1], || format!("repair of {target} differs"))?;
        repairs += 1;
    }
    ensure(recoveries == 10 && repairs == 4, || format!("{recoveries} recoveries, {repairs} repairs"))?;
    Ok(format!(
        "achieved ({}, {}); {recoveries} recoveries and {repairs} repairs exact",
        point.alpha, point.beta
    ))
}

fn criterion_3() -> Outcome {
    let sys = system(5, 4, 1, 1, &[(3, 2), (4, 3)]);
    let main = audit_all(&sys).map_err(|e| e.to_string())?;
    ensure(main.entries.len() == 20, || format!("{} pairs", main.entries.len()))?;
    ensure(main.max_leakage() == 0, || format!("(1,1) leakage {}", main.max_leakage()))?;
    for (a, b) in [(0, 2), (2, 0)] {
        let s = audit_with_sizes(&sys, a, b).map_err(|e| e.to_string())?;
        ensure(s.max_leakage() == 0, || format!("({a},{b}) leakage {}", s.max_leakage()))?;
    }
    let over = audit_with_sizes(&sys, 2, 1).map_err(|e| e.to_string())?;
    ensure(over.max_leakage() >= 1, || "3-node control did not leak".into())?;
    Ok(format!(
        "20 pairs leak 0, splits (0,2) and (2,0) leak 0, 3-node control leaks up to {}",
        over.max_leakage()
    ))
}

fn criterion_4() -> Outcome {
    let sys = system(5, 4, 1, 1, &[(3, 2), (4, 3)]);
    for node in 1..=sys.n() {
        let (stored, inbound) = type_ranks(&sys, node).map_err(|e| e.to_string())?;
        ensure(stored == sys.alpha() && inbound == sys.alpha(), || {
            format!("node {node}: type I {stored}, type II {inbound}, alpha {}", sys.alpha())
        })?;
    }
    Ok(format!("type I rank = type II rank = alpha = {} on all 5 nodes", sys.alpha()))
}

fn criterion_5() -> Outcome {
    let mut total = 0;
    let mut tight = 0;
    for (d, l1, l2) in [(3, 0, 0), (3, 0, 1), (4, 1, 1), (4, 0, 2)] {
        let l = l1 + l2;
        let sizes: Vec<(usize, usize)> = if (d, l) == (3, 0) {
            vec![(2, 15), (3, 30)]
        } else {
            (l + 1..=d).map(|j| (j, level_capacity(d, j, l).unwrap())).collect()
        };
        let lab = EntropyLab::new(system(d + 1, d, l1, l2, &sizes)).map_err(|e| e.to_string())?;
        let mut results = Vec::new();
        for s in [Suite::Lemma1, Suite::Exchange1, Suite::Coro, Suite::Exchange2, Suite::Props] {
            results.extend(lab.run_suite(s).map_err(|e| e.to_string())?);
        }
        if let Some(bad) = results.iter().find(|c| !c.satisfied) {
            return Err(format!("({d},{l1},{l2}) {bad}"));
        }
        for name in ["b3", "b4"] {
            let c = results
                .iter()
                .find(|c| c.name == name)
                .ok_or_else(|| format!("({d},{l1},{l2}) missing {name}"))?;
            ensure(c.is_tight(), || format!("({d},{l1},{l2}) {c}"))?;
            tight += 1;
        }
        total += results.len();
    }
    Ok(format!("{total} checks satisfied on 4 systems; {tight} final bounds tight"))
}

fn criterion_6() -> Outcome {
    let mut cases = 0;
    for d in 2..=12 {
        for l in 1..d {
            let report = dominance(d, l).map_err(|e| e.to_string())?;
            let predicate = 2 * l <= d;
            ensure(report.general_at_least_as_strong() == predicate, || {
                format!("d={d} l={l}: verdict {:?}", report.verdict)
            })?;

            // independent comparison of the two half-planes beyond the corner
            let rates = NormalizedRates::single_level(d, 0, l, d).unwrap();
            let general = bound_general(&rates).map_err(|e| e.to_string())?;
            let prior = bound_prior(&rates);
            let floor = bound_beta(&rates);
            let mut contains = true;
            for k in 1..=8 {
                let beta = floor * Rational::new(8 + k, 8);
                contains &= general.alpha_floor(beta) >= prior.alpha_floor(beta);
            }
            ensure(contains == predicate, || format!("d={d} l={l}: half-plane comparison disagrees"))?;
            let tie = general.beta_coef == prior.beta_coef;
            ensure(tie == (report.verdict == Dominance::Tie), || format!("d={d} l={l}: tie mismatch"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} (d, l) pairs agree with l <= d/2"))
}

fn criterion_7() -> Outcome {
    let perms = all_permutations(4);
    ensure(perms.len() == 24, || format!("{} permutations", perms.len()))?;
    for (l1, l2) in [(0, 0), (0, 1)] {
        let l = l1 + l2;
        let sizes: Vec<(usize, usize)> = (l + 1..=3).map(|j| (j, level_capacity(3, j, l).unwrap())).collect();
        let sys = system(4, 3, l1, l2, &sizes);
        let lab = EntropyLab::new(sys.clone()).map_err(|e| e.to_string())?;
        let c = lab.check_symmetry(&perms).map_err(|e| e.to_string())?;
        ensure(c.satisfied, || format!("(4,3,{l1},{l2}) {c}"))?;
        let bad = EntropyLab::new(sys.with_zeroed_evaluation(2).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let c = bad.check_symmetry(&perms).map_err(|e| e.to_string())?;
        ensure(!c.satisfied, || format!("corrupted (4,3,{l1},{l2}) passed symmetry"))?;
    }
    Ok("24 permutations invariant on (4,3,0,0) and (4,3,0,1); corrupted codes fail".into())
}

#[test]
fn acceptance_criteria() {
    let criteria: [Criterion; 7] = [
        ("1 bounds at the reference point", criterion_1, 1),
        ("2 MBR achievability", criterion_2, 10),
        ("3 secrecy audit", criterion_3, 5),
        ("4 type-split equivalence", criterion_4, 5),
        ("5 inequality suite", criterion_5, 60),
        ("6 dominance sweep", criterion_6, 1),
        ("7 symmetry", criterion_7, 5),
    ];
    let mut failed = Vec::new();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(limit) => {
                Err(format!("{detail} (took {elapsed:.2?}, limit {limit} s)"))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{elapsed:.2?} < {limit} s]"),
            Err(why) => {
                println!("FAIL criterion {name}: {why} [{elapsed:.2?}]");
                failed.push(name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
