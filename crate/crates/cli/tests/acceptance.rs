//! Acceptance criteria 1–9. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use clap::Parser;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vilenkin_cli::experiments::kernel_identity_table;
use vilenkin_cli::report::Cell;
use vilenkin_cli::{run_report, Cli, Report, Settings};
use vilenkin_core::corpus::seeded_corpus;
use vilenkin_core::hardy::{
    build_counterexample, check_norm_equivalence, counterexample_coefficients,
    partial_sum_decomposition, predicted_iii2_norm, CounterexampleSpec,
};
use vilenkin_core::norms::{l1_norm, lemma1_average, lemma1_scan};
use vilenkin_core::spectral::{forward_fast, forward_naive, inverse, partial_sum};
use vilenkin_core::{RadixSystem, Rational};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn sys(spec: &str, depth: Option<usize>) -> RadixSystem {
    RadixSystem::parse(spec, depth).expect("valid radix spec")
}

fn report(args: &[&str]) -> Report {
    let cli = Cli::try_parse_from(std::iter::once("vilenkin").chain(args.iter().copied()))
        .expect("valid arguments");
    let settings = Settings::resolve(&cli).expect("valid settings");
    run_report(&settings).expect("experiment runs")
}

fn summary_f64(r: &Report, key: &str) -> f64 {
    r.summary_value(key)
        .and_then(Cell::as_f64)
        .unwrap_or_else(|| panic!("summary key {key} missing"))
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    if elapsed <= Duration::from_secs(limit_secs) {
        Ok(())
    } else {
        Err(format!("took {elapsed:.1?}, limit {limit_secs}s"))
    }
}

fn systems() -> Vec<RadixSystem> {
    vec![sys("2^12", None), sys("3^7", None), sys("2,3,4", Some(9))]
}

fn kernel_identities() -> Outcome {
    let start = Instant::now();
    let mut cases = 0;
    let mut worst = 0.0f64;
    for s in systems() {
        let table = kernel_identity_table(&s).map_err(|e| e.to_string())?;
        cases += table.rows.len();
        for row in &table.rows {
            worst = worst.max(row[4].as_f64().unwrap());
        }
    }
    within(start.elapsed(), 60)?;
    check(
        worst <= 1e-9,
        format!("{cases} (n, s) cases, max deviation {worst:e}"),
    )
}

fn transform_oracle() -> Outcome {
    let start = Instant::now();
    let mut worst_naive = 0.0f64;
    let mut worst_round = 0.0f64;
    let specs = [
        sys("2^12", None),
        sys("2,3,4,2,3,4", None),
        sys("3^6", None),
    ];
    for (i, s) in specs.iter().enumerate() {
        for f in seeded_corpus::<f64>(s, 100, &[s.depth()], 100 + i as u64) {
            let fast = forward_fast(&f);
            worst_naive = worst_naive.max(forward_naive(&f).max_abs_diff(&fast).unwrap());
            worst_round = worst_round.max(inverse(&fast).max_abs_diff(&f).unwrap());
        }
    }
    within(start.elapsed(), 60)?;
    check(
        worst_naive <= 1e-10 && worst_round <= 1e-10,
        format!("300 functions, fast vs naive {worst_naive:e}, roundtrip {worst_round:e}"),
    )
}

fn lebesgue_bounds_exhaustive() -> Outcome {
    let start = Instant::now();
    let archive = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&archive).map_err(|e| e.to_string())?;
    let mut parts = Vec::new();
    let mut ok = true;
    for (spec, depth, name) in [
        ("2^12", None, "2p12"),
        ("3^7", None, "3p7"),
        ("2,3,4", Some("9"), "234x3"),
    ] {
        let mut args = vec!["lebesgue-scan", "--radix", spec];
        if let Some(d) = depth {
            args.extend(["--depth", d]);
        }
        let cli =
            Cli::try_parse_from(std::iter::once("vilenkin").chain(args.iter().copied())).unwrap();
        let settings = Settings::resolve(&cli).unwrap();
        let r = run_report(&settings).unwrap();
        let rows = r.tables[0].rows.len() as u64;
        ok &= r.violations == 0 && rows == settings.sys.order() - 1;
        std::fs::write(
            archive.join(format!("lebesgue_{name}.csv")),
            r.to_csv(&settings),
        )
        .map_err(|e| e.to_string())?;
        parts.push(format!(
            "{}: {rows} rows, {} violations",
            settings.sys.spec_string(),
            r.violations
        ));
    }
    within(start.elapsed(), 300)?;
    check(
        ok,
        format!("{} (slacks in {})", parts.join("; "), archive.display()),
    )
}

fn variation_averages() -> Outcome {
    let quarter = Rational::new(1, 4);
    let (rows, c) = lemma1_scan(&sys("2^12", None)).map_err(|e| e.to_string())?;
    let min = rows.iter().map(|r| r.by_level_and_size).min().unwrap();
    let spot = lemma1_average(3, &sys("2^12", None))
        .unwrap()
        .by_level_and_size;
    let mut estimates = vec![c];
    for s in &systems()[1..] {
        estimates.push(lemma1_scan(s).map_err(|e| e.to_string())?.1);
    }
    let zero = Rational::new(0, 1);
    check(
        min >= quarter && spot == Rational::new(2, 3) && estimates.iter().all(|&e| e > zero),
        format!(
            "dyadic min average {min}, n=3 average {spot}, c_estimate {}",
            estimates
                .iter()
                .map(|e| e.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn coefficient_structure() -> Outcome {
    let mut worst = 0.0f64;
    for (alphas, s) in [
        (vec![1, 2], sys("2^8", None)),
        (vec![1, 3], sys("2,3,4", Some(6))),
    ] {
        let spec = CounterexampleSpec::new(alphas, s).map_err(|e| e.to_string())?;
        let computed = forward_fast(&build_counterexample::<f64>(&spec));
        worst = worst.max(
            computed
                .max_abs_diff(&counterexample_coefficients(&spec))
                .unwrap(),
        );
    }
    check(
        worst <= 1e-12,
        format!("max coefficient deviation {worst:e}"),
    )
}

fn decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_sum = 0.0f64;
    let mut worst_norm = 0.0f64;
    let specs = [
        (vec![1, 4, 9], sys("2^10", None)),
        (vec![1, 3], sys("2,3,4", Some(6))),
    ];
    for (alphas, s) in specs {
        let spec = CounterexampleSpec::new(alphas, s).map_err(|e| e.to_string())?;
        let coeffs = counterexample_coefficients::<f64>(&spec);
        for _ in 0..200 {
            let (lo, hi) = spec.block(rng.random_range(0..spec.terms()));
            let j = rng.random_range(lo..hi);
            let d = partial_sum_decomposition(&spec, &coeffs, j).map_err(|e| e.to_string())?;
            let direct = partial_sum(&coeffs, j).unwrap();
            worst_sum = worst_sum.max(d.sum().max_abs_diff(&direct).unwrap());
            let predicted = predicted_iii2_norm(&spec, j).unwrap();
            worst_norm = worst_norm.max((l1_norm(&d.iii2) - predicted).abs());
        }
    }
    check(
        worst_sum <= 1e-10 && worst_norm <= 1e-9,
        format!("400 indices, reconstruction {worst_sum:e}, III2 norm {worst_norm:e}"),
    )
}

fn norm_equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for (i, s) in [sys("2^10", None), sys("2,3,4", Some(6)), sys("3^5", None)]
        .iter()
        .enumerate()
    {
        for f in seeded_corpus::<f64>(s, 100, &[s.depth()], 700 + i as u64) {
            worst = worst.max(check_norm_equivalence(&f).max_pointwise_deviation);
        }
    }
    check(
        worst <= 1e-9,
        format!("300 functions, max pointwise deviation {worst:e}"),
    )
}

fn divergence_signature() -> Outcome {
    let start = Instant::now();
    let r = report(&["divergence", "--radix", "2^10", "--alphas", "1,4,9"]);
    let table = r.table("divergence").unwrap();
    let col = |name: &str| -> Vec<f64> {
        table
            .column(name)
            .unwrap()
            .into_iter()
            .map(|c| c.as_f64().unwrap())
            .collect()
    };
    let b = col("B_k");
    let ratio = col("ratio");
    let h1 = col("h1_norm");
    let increasing = b.windows(2).all(|w| w[0] < w[1]);
    let min_ratio = ratio.iter().copied().fold(f64::INFINITY, f64::min);
    let spread =
        h1.iter().copied().fold(0.0, f64::max) / h1.iter().copied().fold(f64::INFINITY, f64::min);
    within(start.elapsed(), 120)?;
    check(
        increasing && min_ratio > 0.0 && spread < 2.0,
        format!("B = {b:.4?}, min B/sqrt(alpha) {min_ratio:.4}, h1 spread {spread:.4}"),
    )
}

fn gat_and_fejer() -> Outcome {
    let runs: Vec<Report> = ["1", "2"]
        .iter()
        .map(|seed| report(&["gat", "--radix", "2^10", "--seed", seed]))
        .collect();
    let ratios: Vec<f64> = runs
        .iter()
        .map(|r| summary_f64(r, "max_bounded_ratio"))
        .collect();
    let fejer: Vec<f64> = runs
        .iter()
        .map(|r| summary_f64(r, "max_fejer_ratio"))
        .collect();
    let stable = |v: &[f64]| {
        v.iter().all(|x| x.is_finite() && *x > 0.0) && (v[0] - v[1]).abs() <= 0.1 * v[0].min(v[1])
    };
    let decreasing = runs.iter().all(|r| {
        summary_f64(r, "rank_le_4_convergence_decreasing") == summary_f64(r, "rank_le_4_members")
    });

    // Shared f: the truncations f_1, f_2, f_3 of the divergence construction.
    let mut cesaro = Vec::new();
    let mut fejer_fk = Vec::new();
    for alphas in ["1", "1,4", "1,4,9"] {
        let r = report(&["divergence", "--radix", "2^10", "--alphas", alphas]);
        let last = r.table("cesaro").unwrap().rows.last().unwrap()[1]
            .as_f64()
            .unwrap();
        cesaro.push(last);
        fejer_fk.push(summary_f64(&r, "fejer_ratio"));
    }
    let cesaro_grows = cesaro.windows(2).all(|w| w[0] < w[1]);
    let fejer_flat = fejer_fk.iter().all(|&x| x <= fejer_fk[0] * 1.05);
    check(
        stable(&ratios) && stable(&fejer) && decreasing && cesaro_grows && fejer_flat,
        format!(
            "log-mean ratio {ratios:.4?}, corpus Fejér ratio {fejer:.4?}, \
             convergence form decreasing: {decreasing}; on f_K: Cesàro {cesaro:.4?} vs Fejér ratio {fejer_fk:.4?}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("kernel identities", kernel_identities),
        ("transform oracle equivalence", transform_oracle),
        ("Lebesgue bounds exhaustive", lebesgue_bounds_exhaustive),
        ("variation averages", variation_averages),
        ("counterexample coefficients", coefficient_structure),
        ("partial-sum decomposition", decomposition),
        ("maximal function equivalence", norm_equivalence),
        ("divergence signature", divergence_signature),
        ("logarithmic and Fejér means", gat_and_fejer),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({secs:.2}s): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({secs:.2}s): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
