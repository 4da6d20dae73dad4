//! Acceptance run: one pass/fail line per criterion.

#[path = "../../core/tests/common/oracle.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use intmod::arith::CycNumber;
use intmod::criteria::{local_criterion, local_verdict, LocalVerdict};
use intmod::fixtures::{self, expected};
use intmod::fusion::FusionData;
use intmod::modular::{fs_indicator, pointed_pipeline, thetas, ModularDatum};
use intmod::solver::{solve_partition, solve_type, solve_type_detailed, Budget};
use intmod::types_enum::{all_sq_egyptian, is_perfect, types_for_rank};
use intmod_cli::pipeline::{Outputs, Stage};
use intmod_cli::{diff_fixtures, run_pipeline, PipelineConfig, SummaryReport};
use num_rational::Rational64;

const TYPES: &str = include_str!("../../core/tests/fixtures/types.json");
const RANK12: &str = include_str!("../../core/tests/fixtures/rank12_perfect.json");
const SELF_TRANSPOSABLE: &str =
    include_str!("../../core/tests/fixtures/self_transposable_types.json");

const MANDATORY_RANK: usize = 9;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: impl Into<String>, fail: impl Into<String>) -> Outcome {
    if cond {
        Ok(ok.into())
    } else {
        Err(fail.into())
    }
}

fn by_rank(json: &str) -> BTreeMap<usize, Vec<Vec<u64>>> {
    let raw: BTreeMap<String, Vec<Vec<u64>>> = serde_json::from_str(json).unwrap();
    raw.into_iter()
        .map(|(k, v)| (k.parse().unwrap(), v))
        .collect()
}

fn sorted(mut v: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    v.sort();
    v
}

fn distinct(mut v: Vec<Vec<u64>>) -> Vec<Vec<u64>> {
    v.sort();
    v.dedup();
    v
}

fn egyptian() -> Outcome {
    let t = Instant::now();
    let counts: Vec<usize> = (1..=8).map(|r| all_sq_egyptian(1, r).len()).collect();
    let el = t.elapsed();
    check(
        counts == expected::EGYPTIAN_Q1 && el < Duration::from_secs(60),
        format!("counts {counts:?} in {el:.2?}"),
        format!("counts {counts:?} in {el:.2?}"),
    )
}

fn types() -> Outcome {
    let t = Instant::now();
    let lists: Vec<Vec<Vec<u64>>> = (1..=11).map(types_for_rank).collect();
    let el = t.elapsed();
    let all: Vec<usize> = lists.iter().map(|l| l.len()).collect();
    let perfect: Vec<usize> = lists
        .iter()
        .map(|l| l.iter().filter(|t| is_perfect(t)).count())
        .collect();
    let published = by_rank(TYPES);
    let bad: Vec<usize> = (1..=11)
        .filter(|r| {
            sorted(lists[r - 1].clone()) != sorted(published.get(r).cloned().unwrap_or_default())
        })
        .collect();
    check(
        all == expected::TYPES
            && perfect == expected::PERFECT_TYPES
            && bad.is_empty()
            && el < Duration::from_secs(600),
        format!("counts {all:?}, perfect {perfect:?}, lists identical, {el:.2?}"),
        format!("counts {all:?}, perfect {perfect:?}, list mismatch at ranks {bad:?}, {el:.2?}"),
    )
}

fn criteria() -> Outcome {
    let budget = Duration::from_secs(2);
    let mut counts = Vec::new();
    let mut abstained = 0;
    let mut slowest = Duration::ZERO;
    for r in 1..=11 {
        let mut n = 0;
        for t in types_for_rank(r) {
            let start = Instant::now();
            match local_verdict(&t, budget) {
                LocalVerdict::Excluded { .. } => n += 1,
                LocalVerdict::NotExcluded => {}
                LocalVerdict::Abstained { .. } => abstained += 1,
            }
            slowest = slowest.max(start.elapsed());
        }
        counts.push(n);
    }
    let big = [
        (1, 1),
        (1295, 2),
        (3990, 1),
        (4218, 1),
        (24605, 1),
        (42180, 1),
        (98420, 2),
        (147630, 3),
    ];
    let mut worked = Vec::new();
    let mut slowest_call = Duration::ZERO;
    for (d, m, g) in [(1295, 2, 19), (3990, 1, 37)] {
        let start = Instant::now();
        worked.push(local_criterion(&big, d, m, g, budget).map(|s| s.len()));
        slowest_call = slowest_call.max(start.elapsed());
    }
    let worked_ok = worked == [Ok(0), Ok(55)];
    check(
        counts == expected::LOCAL_EXCLUDED && abstained == 0 && worked_ok && slowest_call < budget,
        format!("exclusions {counts:?}, worked example {worked:?} (slowest call {slowest_call:.2?}, slowest type {slowest:.2?})"),
        format!("exclusions {counts:?}, {abstained} abstentions, worked example {worked:?}, slowest call {slowest_call:.2?}"),
    )
}

fn counts_of(report: &SummaryReport, quantity: &str) -> Vec<usize> {
    report
        .counts
        .iter()
        .filter(|c| c.quantity == quantity)
        .map(|c| c.actual)
        .collect()
}

fn rep_s3() -> FusionData {
    let m0 = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]];
    let m1 = vec![vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, 1]];
    let m2 = vec![vec![0, 0, 1], vec![0, 0, 1], vec![1, 1, 1]];
    FusionData::from_tensor(&[m0, m1, m2]).unwrap()
}

fn rings(report: &SummaryReport) -> Outcome {
    let rings = counts_of(report, "rings");
    let nc = counts_of(report, "noncommutative");
    let s3 = solve_type(&[1, 1, 2], Budget::unlimited()).map_err(|e| e.to_string())?;
    let s3_ok = s3 == vec![rep_s3().canonical_form()];
    let seven = solve_type_detailed(&[1, 5, 5, 5, 6, 7, 7], Budget::unlimited())
        .map_err(|e| e.to_string())?;
    let raw: usize = seven.dualities.iter().map(|d| d.raw_solutions).sum();
    check(
        rings == expected::RINGS[..MANDATORY_RANK]
            && nc == expected::NONCOMMUTATIVE[..MANDATORY_RANK]
            && report.budget_exhausted.is_empty()
            && s3_ok
            && raw == 6
            && seven.rings.len() == 2,
        format!("rings {rings:?}, noncommutative {nc:?}, Rep(S3) recovered, [1,5,5,5,6,7,7]: {raw} raw -> {} classes", seven.rings.len()),
        format!(
            "rings {rings:?}, noncommutative {nc:?}, exhausted {:?}, Rep(S3) {s3_ok}, [1,5,5,5,6,7,7]: {raw} raw -> {} classes",
            report.budget_exhausted,
            seven.rings.len()
        ),
    )
}

fn partition() -> Outcome {
    let raw: BTreeMap<String, Vec<Vec<u64>>> = serde_json::from_str(RANK12).unwrap();
    let list = &raw["no_prime_power"];
    let start = Instant::now();
    let mut feasible = Vec::new();
    for t in list {
        match solve_partition(t, Budget::seconds(600), Some(1)) {
            Ok(sols) if sols.is_empty() => {}
            Ok(_) => feasible.push(format!("{t:?}")),
            Err(e) => feasible.push(format!("{t:?}: {e}")),
        }
    }
    let el = start.elapsed();
    check(
        list.len() == 24 && feasible.is_empty() && el < Duration::from_secs(600),
        format!("{} types infeasible in {el:.2?}", list.len()),
        format!("not excluded: {feasible:?} ({el:.2?})"),
    )
}

fn self_transposable(report: &SummaryReport, out: &Outputs) -> Outcome {
    let st = counts_of(report, "self_transposable");
    let published = by_rank(SELF_TRANSPOSABLE);
    let mut found: BTreeMap<usize, Vec<Vec<u64>>> = BTreeMap::new();
    for s in out
        .smatrices
        .iter()
        .flatten()
        .filter(|s| !s.candidates.is_empty())
    {
        found.entry(s.rank).or_default().push(s.dims.clone());
    }
    let bad: Vec<usize> = (1..=MANDATORY_RANK)
        .filter(|r| {
            distinct(found.get(r).cloned().unwrap_or_default())
                != distinct(published.get(r).cloned().unwrap_or_default())
        })
        .collect();
    check(
        st == expected::SELF_TRANSPOSABLE[..MANDATORY_RANK] && bad.is_empty(),
        format!("ranks 1..{MANDATORY_RANK}: {st:?}, same types as published (ranks 10-11 not run)"),
        format!("ranks 1..{MANDATORY_RANK}: {st:?}, type mismatch at ranks {bad:?}"),
    )
}

fn modular(out: &Outputs) -> Outcome {
    let data = out.modular.as_deref().unwrap_or_default();
    let rank8: Vec<&ModularDatum> = data
        .iter()
        .filter(|r| r.rank == 8 && !r.pointed)
        .map(|r| &r.datum)
        .collect();
    let c0 = rank8
        .iter()
        .filter(|d| d.central_charge == Rational64::from_integer(0))
        .count();
    let c4 = rank8
        .iter()
        .filter(|d| d.central_charge == Rational64::from_integer(4))
        .count();
    let diff = diff_fixtures(data, MANDATORY_RANK);

    let classes = pointed_pipeline(11);
    let per_group: Vec<usize> = classes.iter().map(|c| c.data.len()).collect();
    let mut spin_mismatch = Vec::new();
    for g in fixtures::pointed() {
        let key = |s: &[Rational64]| {
            let mut v = s.to_vec();
            v.sort();
            v
        };
        let mut ours: Vec<Vec<Rational64>> = classes
            .iter()
            .find(|c| c.factors == g.factors)
            .map(|c| c.data.iter().map(|d| key(&d.spins)).collect())
            .unwrap_or_default();
        let mut theirs: Vec<Vec<Rational64>> = g.spins.iter().map(|s| key(s)).collect();
        ours.sort();
        theirs.sort();
        if ours != theirs {
            spin_mismatch.push(g.group.clone());
        }
    }
    let total: usize = per_group.iter().sum();
    check(
        rank8.len() == 8 && c0 == 6 && c4 == 2 && diff.is_empty() && per_group == expected::POINTED_PER_GROUP && spin_mismatch.is_empty(),
        format!("rank 8: {} data ({c0} with c=0, {c4} with c=4) as published; pointed: {total} data {per_group:?}, spins as published", rank8.len()),
        format!(
            "rank 8: {} data (c=0: {c0}, c=4: {c4}), {} divergences; pointed {per_group:?}, spin mismatch {spin_mismatch:?}",
            rank8.len(),
            diff.len()
        ),
    )
}

type Matrix = Vec<Vec<CycNumber>>;

fn mul(a: &Matrix, b: &Matrix) -> Matrix {
    let r = a.len();
    (0..r)
        .map(|i| {
            (0..r)
                .map(|j| (0..r).fold(CycNumber::zero(), |acc, k| &acc + &(&a[i][k] * &b[k][j])))
                .collect()
        })
        .collect()
}

fn primes(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Independent recomputation of the defining identities of one datum.
fn datum_properties(d: &ModularDatum) -> Result<(), String> {
    let f = &d.ring;
    let r = f.rank();
    let s = &d.s;
    let dims = f.fpdims().ok_or("no dimensions")?;
    let d2: u64 = dims.iter().map(|x| x * x).sum();
    let dual = f.dual();
    let inv_d2 = CycNumber::from_ratio(1, d2 as i64);

    // Verlinde.
    for i in 0..r {
        for j in 0..r {
            for k in 0..r {
                let mut acc = CycNumber::zero();
                for l in 0..r {
                    let term = &(&s[l][i] * &s[l][j]) * &s[l][k].conj();
                    acc = &acc + &(&term * &CycNumber::from_ratio(1, dims[l] as i64));
                }
                if &acc * &inv_d2 != CycNumber::from_int(f.get(i, j, k) as i64) {
                    return Err(format!("Verlinde at ({i},{j},{k})"));
                }
            }
        }
    }

    // S S* = D^2 C and C^2 = Id.
    let s_star: Matrix = (0..r)
        .map(|i| (0..r).map(|j| s[j][i].conj()).collect())
        .collect();
    let ss = mul(s, &s_star);
    let s2 = mul(s, s);
    for i in 0..r {
        for j in 0..r {
            let id = if i == j {
                CycNumber::from_int(d2 as i64)
            } else {
                CycNumber::zero()
            };
            let c = if j == dual[i] {
                CycNumber::from_int(d2 as i64)
            } else {
                CycNumber::zero()
            };
            if ss[i][j] != id || s2[i][j] != c {
                return Err("unitarity or charge conjugation".into());
            }
        }
    }
    if (0..r).any(|i| dual[dual[i]] != i) {
        return Err("C^2 != Id".into());
    }

    // (ST)^3 = p+ S^2.
    let theta = thetas(&d.spins);
    let p_plus = (0..r).fold(CycNumber::zero(), |acc, i| {
        &acc + &theta[i].scale_int((dims[i] * dims[i]) as i64)
    });
    let st: Matrix = (0..r)
        .map(|i| (0..r).map(|j| &s[i][j] * &theta[j]).collect())
        .collect();
    let st3 = mul(&mul(&st, &st), &st);
    if (0..r).any(|i| (0..r).any(|j| st3[i][j] != &p_plus * &s2[i][j])) {
        return Err("(ST)^3 != p+ S^2".into());
    }

    // Frobenius-Schur indicators.
    let nu1 = fs_indicator(f, &dims, &d.spins, 1);
    let nu2 = fs_indicator(f, &dims, &d.spins, 2);
    for i in 0..r {
        if nu1[i]
            != if i == 0 {
                CycNumber::one()
            } else {
                CycNumber::zero()
            }
        {
            return Err(format!("nu_1 at {i}"));
        }
        let ok = if dual[i] == i {
            nu2[i] == CycNumber::one() || nu2[i] == CycNumber::from_int(-1)
        } else {
            nu2[i].is_zero()
        };
        if !ok || nu2[i] != CycNumber::from_int(d.fs2[i]) {
            return Err(format!("nu_2 at {i}"));
        }
    }

    // Cauchy.
    if primes(d.ord_t) != primes(d2) {
        return Err(format!("Cauchy: ord T = {}, D^2 = {d2}", d.ord_t));
    }
    Ok(())
}

fn files_identical(a: &Path, b: &Path) -> bool {
    Stage::ALL
        .iter()
        .map(|s| s.file())
        .chain(["solve.jsonl"])
        .all(|f| fs::read(a.join(f)).ok() == fs::read(b.join(f)).ok())
}

fn properties(out: &Outputs, tmp: &Path) -> Outcome {
    let mut failures = Vec::new();
    let mut data: Vec<ModularDatum> = out
        .modular
        .iter()
        .flatten()
        .map(|r| r.datum.clone())
        .collect();
    data.extend(pointed_pipeline(11).into_iter().flat_map(|c| c.data));
    for d in &data {
        if let Err(e) = datum_properties(d) {
            failures.push(format!("{} {:?}: {e}", d.ring_hash, d.spins));
        }
    }

    let small: Vec<Vec<u64>> = (1..=5).flat_map(types_for_rank).collect();
    for t in &small {
        let ours: std::collections::BTreeSet<Vec<u32>> = solve_type(t, Budget::unlimited())
            .unwrap()
            .iter()
            .map(|f| oracle::brute_canonical(f.raw(), t))
            .collect();
        if ours != oracle::brute_classes(t) {
            failures.push(format!("solver differs from brute force on {t:?}"));
        }
    }

    let rings = out.rings.as_deref().unwrap_or_default();
    for r in rings {
        if r.ring.check_axioms().is_err() || r.ring.check_dims(&r.dims).is_err() {
            failures.push(format!("axioms fail on {}", r.hash));
        }
    }

    let run = |threads: usize, name: &str| {
        let mut cfg = PipelineConfig::new(8, tmp.join(name));
        cfg.solve_budget = Some(Duration::from_secs(600));
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_pipeline(&cfg))
            .unwrap();
    };
    run(1, "jobs1");
    run(4, "jobs4");
    if !files_identical(&tmp.join("jobs1"), &tmp.join("jobs4")) {
        failures.push("outputs differ between 1 and 4 workers".into());
    }

    check(
        failures.is_empty(),
        format!(
            "{} data pass Verlinde, (ST)^3, SS*, FS and Cauchy; {} small types match brute force; {} rings pass axioms; 1 vs 4 workers identical",
            data.len(),
            small.len(),
            rings.len()
        ),
        failures.join("; "),
    )
}

fn main() -> ExitCode {
    let tmp = tempfile::tempdir().unwrap();
    let start = Instant::now();
    let mut cfg = PipelineConfig::new(MANDATORY_RANK, tmp.path().join("run"));
    cfg.solve_budget = Some(Duration::from_secs(3600));
    let report = run_pipeline(&cfg).expect("pipeline run");
    let out = Outputs::load(&cfg.out_dir).expect("pipeline outputs");
    println!("pipeline to rank {MANDATORY_RANK}: {:.2?}", start.elapsed());

    let results: Vec<(&str, Outcome)> = vec![
        ("1 egyptian fractions", egyptian()),
        ("2 type enumeration", types()),
        ("3 exclusion criteria", criteria()),
        ("4 fusion rings", rings(&report)),
        ("5 dimension partitions", partition()),
        (
            "6 self-transposable rings",
            self_transposable(&report, &out),
        ),
        ("7 modular data", modular(&out)),
        ("8 property suites", properties(&out, tmp.path())),
    ];
    let mut failed = 0;
    for (name, r) in &results {
        match r {
            Ok(msg) => println!("criterion {name}: PASS ({msg})"),
            Err(msg) => {
                failed += 1;
                println!("criterion {name}: FAIL ({msg})");
            }
        }
    }
    println!(
        "{} of {} criteria pass",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
