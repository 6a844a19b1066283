//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nfs_sieve::arith::primes_up_to;
use nfs_sieve::experiments::{
    compare, enumerate_exact, monte_carlo, random_sieve_polynomial, Comparison, RandomModel,
    EXPECTED_RATIO_BAND,
};
use nfs_sieve::roots::{build_lift_tables, classify_roots};
use nfs_sieve::SievePolynomial;

const INSTANCE_SEED: u64 = 20_240_501;
const INSTANCES: usize = 24;
const EXHAUSTIVE_LIMIT: u64 = 10_000;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

struct Instance {
    f: SievePolynomial,
    u: u64,
    y: u64,
    run: Comparison,
}

fn instances() -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(INSTANCE_SEED);
    (0..INSTANCES)
        .map(|i| {
            let d = 2 + i % 4;
            let m = rng.gen_range(5..=50);
            let u = rng.gen_range(50..=300);
            let y = rng.gen_range(10..=100);
            let f = random_sieve_polynomial(d, m, rng.gen()).expect("valid parameters");
            let run = compare(&f, u, y).expect("instance runs");
            Instance { f, u, y, run }
        })
        .collect()
}

fn equivalence(all: &[Instance]) -> Outcome {
    let bad: Vec<usize> = all
        .iter()
        .enumerate()
        .filter(|(_, i)| !(i.run.tables_identical() && i.run.residuals_coprime()))
        .map(|(k, _)| k)
        .collect();
    let entries: usize = all.iter().map(|i| i.run.classical.table.nonzero_count()).sum();
    Outcome::new(
        bad.is_empty(),
        format!("{} instances, {entries} nonzero entries, mismatched instances {bad:?}", all.len()),
    )
}

fn identities(all: &[Instance]) -> Outcome {
    let cells: usize = all.iter().map(|i| i.run.report.cells.len()).sum();
    let violations: usize = all.iter().map(|i| i.run.report.violations.len()).sum();
    let corrections = all.iter().filter(|i| i.run.report.totals.correction > 0).count();
    Outcome::new(
        violations == 0,
        format!(
            "{cells} (b, l) cells, {violations} violations, {corrections} instances with a correction term"
        ),
    )
}

fn strict_improvement(all: &[Instance]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut bad = Vec::new();
    for (k, i) in all.iter().enumerate() {
        let t = &i.run.report.totals;
        if t.classical > 0 && t.improved >= t.classical {
            bad.push(k);
        }
        worst = worst.max(i.run.report.ratio_f64().unwrap_or(0.0));
    }
    Outcome::new(bad.is_empty(), format!("largest ratio {worst:.4}, failing instances {bad:?}"))
}

fn two_thirds(all: &[Instance]) -> Outcome {
    let checked: usize = all.iter().map(|i| i.run.report.two_thirds_checked()).sum();
    let failures: Vec<(usize, u64, u64)> = all
        .iter()
        .enumerate()
        .flat_map(|(k, i)| i.run.report.two_thirds_failures().into_iter().map(move |(b, l)| (k, b, l)))
        .collect();

    // empirical side: large regions, correction-free instances, reported only
    let (lo, hi) = EXPECTED_RATIO_BAND;
    let mut ratios = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(INSTANCE_SEED ^ 0x5eed);
    let u = 500;
    let y = u / 5;
    for attempt in 0..12 {
        if ratios.len() == 4 {
            break;
        }
        let d = 2 + attempt % 3;
        let m = rng.gen_range(5..=50);
        let f = random_sieve_polynomial(d, m, rng.gen()).expect("valid parameters");
        let run = compare(&f, u, y).expect("instance runs");
        if run.report.totals.correction == 0 {
            ratios.push((d, run.report.ratio_f64().unwrap_or(0.0)));
        }
    }
    let flagged: Vec<_> = ratios.iter().filter(|(_, r)| !(lo..=hi).contains(r)).collect();
    let shown: Vec<String> = ratios.iter().map(|(d, r)| format!("d={d}:{r:.4}")).collect();
    Outcome::new(
        failures.is_empty(),
        format!(
            "{checked} correction-free cells, asymptotic failures {failures:?}; measured ratios at u={u}, y={y}: [{}], outside [{lo}, {hi}]: {}",
            shown.join(", "),
            if flagged.is_empty() { "none".to_string() } else { format!("{flagged:?} (flagged, not gated)") }
        ),
    )
}

fn enumeration() -> Outcome {
    let two = enumerate_exact(2, 2).expect("small");
    let three = enumerate_exact(2, 3).expect("small");
    let pass = two.count_bad == 4
        && two.count_total == 16
        && two.per_point_counts == [2, 2]
        && three.count_total == 81
        && three.per_point_counts.iter().all(|&c| c * 27 == three.count_total);
    Outcome::new(
        pass,
        format!(
            "l=2: bad {}/{}, per point {:?}; l=3: per point {:?} of {}",
            two.count_bad, two.count_total, two.per_point_counts, three.per_point_counts, three.count_total
        ),
    )
}

fn probability() -> Outcome {
    let model = RandomModel::new(3, 30, 1).expect("valid model");
    let r = monte_carlo(&model, 2000).expect("trials > 0");
    Outcome::new(
        r.passes_gate,
        format!(
            "estimate {:.4} ± {:.4}, gate {:.4}, product (1 - 1/l^2) over l <= 30 = {:.4}, 6/pi^2 = {:.4}",
            r.estimate, r.std_error, r.gate_threshold, r.reference_product, r.inverse_zeta_2
        ),
    )
}

fn roots_mod(f: &SievePolynomial, q: u64) -> Vec<u64> {
    let reduced = f.poly().reduce(q);
    (0..q).filter(|&x| reduced.eval(x) == 0).collect()
}

fn ladders(all: &[Instance]) -> Outcome {
    let mut levels = 0;
    let mut problems = Vec::new();
    for (k, inst) in all.iter().enumerate() {
        let tables = build_lift_tables(&inst.f, inst.u, inst.y).expect("bounded region");
        for ladder in &tables.ladders {
            let l = ladder.prime;
            let roots = classify_roots(inst.f.poly(), l);
            if ladder.multiple != roots.multiple {
                problems.push(format!("#{k} l={l}: multiple roots"));
            }
            let square = roots_mod(&inst.f, l * l);
            for &x in &roots.multiple {
                let lifts = square.iter().filter(|&&z| z % l == x).count() as u64;
                // a multiple root lifts for its whole class or not at all
                let whole = lifts == l;
                if (lifts != 0 && !whole) || whole != ladder.liftable.contains(&x) {
                    problems.push(format!("#{k} l={l}: class {x} lifts {lifts} times"));
                }
            }
            let mut q = 1u64;
            for e in 1..=ladder.algebraic_cap() {
                q *= l;
                if q > EXHAUSTIVE_LIMIT {
                    break;
                }
                levels += 1;
                let exhaustive = roots_mod(&inst.f, q);
                let level = ladder.simple_at(e);
                for (i, &s) in roots.simple.iter().enumerate() {
                    let lifts: Vec<u64> = exhaustive.iter().copied().filter(|z| z % l == s).collect();
                    let ok = lifts.len() == 1
                        && level.get(i).copied() == Some(lifts[0] as u128)
                        && (e == 1 || level[i] % (q / l) as u128 == ladder.simple_at(e - 1)[i]);
                    if !ok {
                        problems.push(format!("#{k} l={l} e={e}: root {s}"));
                    }
                }
                if level.len() != roots.simple.len() {
                    problems.push(format!("#{k} l={l} e={e}: ladder width"));
                }
            }
            let mut q = 1u128;
            for e in 1..=ladder.rational_cap() {
                q *= l as u128;
                if ladder.rational[e as usize - 1] != inst.f.m() as u128 % q {
                    problems.push(format!("#{k} l={l} e={e}: rational residue"));
                }
            }
        }
    }
    Outcome::new(
        problems.is_empty(),
        format!("{levels} (l, e) levels checked exhaustively, problems {:?}", &problems[..problems.len().min(5)]),
    )
}

fn bijection() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(INSTANCE_SEED ^ 0xb1);
    let primes = primes_up_to(97).expect("bound >= 2");
    let mut checked = 0;
    let mut problems = Vec::new();
    while checked < 120 {
        let d = rng.gen_range(2..=5);
        let m = rng.gen_range(5..=50);
        let f = random_sieve_polynomial(d, m, rng.gen()).expect("valid parameters");
        let l = primes.as_slice()[rng.gen_range(0..primes.len())];
        let b: u64 = rng.gen_range(1..=300);
        if b.is_multiple_of(l) {
            continue;
        }
        let max_e = (1..).take_while(|&e| l.pow(e) <= EXHAUSTIVE_LIMIT).last().unwrap_or(1);
        let e = rng.gen_range(1..=max_e);
        let q = l.pow(e);
        checked += 1;

        let norm = f.norm_form();
        let qb = BigInt::from(q);
        let from_norm: BTreeSet<u64> = (0..q)
            .filter(|&a| norm.eval(a as i64, b as i64).mod_floor(&qb).to_u64() == Some(0))
            .collect();
        let scaled: BTreeSet<u64> = roots_mod(&f, q)
            .into_iter()
            .map(|x| ((x as u128 * b as u128) % q as u128) as u64)
            .collect();
        if from_norm != scaled {
            problems.push(format!("f={} b={b} l^{e}: root sets differ", f.poly()));
            continue;
        }
        // classes at e = 1: F'(a, b) = b^(d-1) f'(a/b), and b is a unit
        let classes = classify_roots(f.poly(), l);
        let lb = BigInt::from(l);
        let coeffs = f.poly().coeffs();
        for &x in &classes.all() {
            let a = (x * (b % l)) % l;
            let partial: BigInt = coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| {
                    c * BigInt::from(i) * BigInt::from(a).pow(i as u32 - 1) * BigInt::from(b).pow((d - i) as u32)
                })
                .sum();
            let multiple = partial.mod_floor(&lb) == BigInt::from(0);
            if multiple != classes.is_multiple(x) {
                problems.push(format!("f={} b={b} l={l}: class of {x}", f.poly()));
            }
        }
    }
    Outcome::new(problems.is_empty(), format!("{checked} random (f, b, l^e) triples, problems {problems:?}"))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let all = instances();
    let mut results: Vec<(&str, Outcome)> = vec![
        ("1 cross-algorithm equivalence", equivalence(&all)),
        ("2 ledger identities", identities(&all)),
        ("3 strict improvement", strict_improvement(&all)),
    ];
    results.push(("4 two-thirds bound", two_thirds(&all)));
    results.push(("5 per-point density enumeration", enumeration()));
    results.push(("6 liftable-root-free probability", probability()));
    results.push(("7 Hensel ladder soundness", ladders(&all)));
    results.push(("8 norm-root bijection", bijection()));

    let mut failed = 0;
    for (name, outcome) in &results {
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name}: {}", outcome.detail);
        failed += !outcome.pass as usize;
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
