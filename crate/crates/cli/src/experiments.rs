//! One runner per subcommand.

use std::path::Path;

use rayon::prelude::*;
use vilenkin_core::corpus::seeded_corpus;
use vilenkin_core::hardy::{
    build_counterexample, check_norm_equivalence, counterexample_coefficients, divergence_profile,
    fejer_maximal_check, gat_log_averages, h1_norm, scan_partial_sums, CounterexampleSpec,
};
use vilenkin_core::norms::{l1_norm, lemma1_scan, scan_lemma2};
use vilenkin_core::spectral::{dirichlet_kernel, forward_fast, forward_naive, inverse, RootTable};
use vilenkin_core::{Complex64, RadixSystem, SpectralVector64, StepFunction64};

use crate::config::{Params, Settings};
use crate::report::{Report, Table};
use crate::CliError;

/// What a run produced: the document for `--out`/stdout, diagnostics for
/// stderr, and the number of failed verifications.
#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    pub document: String,
    pub notes: Vec<String>,
    pub violations: usize,
}

/// Deviation above tolerance; NaN counts as a failure.
fn exceeds(deviation: f64, tol: f64) -> bool {
    deviation.is_nan() || deviation > tol
}

/// Runs the configured experiment on a pool of `settings.threads` workers.
pub fn execute(settings: &Settings) -> Result<RunOutput, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(settings.threads)
        .build()
        .map_err(|e| CliError::Io(format!("cannot start worker pool: {e}")))?;
    pool.install(|| match &settings.params {
        Params::Transform {
            input,
            inverse,
            verify,
        } => transform(settings, input, *inverse, *verify),
        _ => {
            let report = run_report(settings)?;
            Ok(RunOutput {
                document: report.render(settings),
                notes: Vec::new(),
                violations: report.violations,
            })
        }
    })
}

/// Builds the report of a table-producing subcommand on the current pool.
pub fn run_report(settings: &Settings) -> Result<Report, CliError> {
    let sys = &settings.sys;
    let tol = settings.tolerance;
    match &settings.params {
        Params::Transform { .. } => Err(CliError::Usage(
            "transform writes a values file, not a report".into(),
        )),
        Params::Kernel {
            n,
            check_identities,
        } => kernel(sys, *n, *check_identities || n.is_none(), tol),
        Params::LebesgueScan { from, to } => lebesgue_scan(sys, *from, *to),
        Params::Lemma1 => lemma1(sys),
        Params::Divergence { alphas } => divergence(sys, alphas, tol),
        Params::Gat { corpus_size, ranks } => gat(sys, *corpus_size, ranks, settings.seed),
        Params::EquivCheck {
            input,
            random,
            rank,
        } => equiv_check(sys, input.as_deref(), *random, *rank, settings.seed, tol),
    }
}

fn transform(
    settings: &Settings,
    input: &Path,
    inverse_mode: bool,
    verify: bool,
) -> Result<RunOutput, CliError> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", input.display())))?;
    let mut notes = Vec::new();
    let mut violations = 0;
    let document = if inverse_mode {
        let coeffs = SpectralVector64::from_json(&text)?;
        let f = inverse(&coeffs);
        if verify {
            let back = forward_fast(&f).max_abs_diff(&coeffs)?;
            notes.push(format!("verify roundtrip_deviation={back:e}"));
            violations += usize::from(exceeds(back, settings.tolerance));
        }
        f.to_json()
    } else {
        let f = StepFunction64::from_json(&text)?;
        let coeffs = forward_fast(&f);
        if verify {
            let naive = forward_naive(&f).max_abs_diff(&coeffs)?;
            let back = inverse(&coeffs).max_abs_diff(&f)?;
            notes.push(format!("verify naive_deviation={naive:e}"));
            notes.push(format!("verify roundtrip_deviation={back:e}"));
            violations += usize::from(exceeds(naive, settings.tolerance));
            violations += usize::from(exceeds(back, settings.tolerance));
        }
        coeffs.to_json()
    };
    Ok(RunOutput {
        document: document + "\n",
        notes,
        violations,
    })
}

/// Largest deviation of `D_{s M_k}` from `D_{M_k} Σ_{i<s} r_k^i` over all
/// `k ≤ N`, `1 ≤ s < m_k` (only `s = 1` at `k = N`), where `D_{M_k}` itself is
/// compared with `M_k 1_{I_k}`.
pub fn kernel_identity_table(sys: &RadixSystem) -> Result<Table, CliError> {
    let roots = RootTable::<f64>::new(sys);
    let cases: Vec<(usize, u32)> = (0..=sys.depth())
        .flat_map(|k| {
            let top = if k < sys.depth() { sys.radix(k) } else { 2 };
            (1..top).map(move |s| (k, s))
        })
        .collect();
    let rows = cases
        .into_par_iter()
        .map(|(k, s)| {
            let mk = sys.product(k);
            let kernel = dirichlet_kernel::<f64>(s as u64 * mk, sys)?;
            let dev = kernel
                .values()
                .iter()
                .enumerate()
                .map(|(t, v)| {
                    let t = t as u64;
                    let base = if t.is_multiple_of(mk) { mk as f64 } else { 0.0 };
                    let expected = if s == 1 {
                        Complex64::from(base)
                    } else {
                        let xk = sys.digit(t, k) as u64;
                        let sum: Complex64 = (0..s as u64).map(|i| roots.root(k, i * xk)).sum();
                        sum * base
                    };
                    (v - expected).norm()
                })
                .fold(0.0f64, f64::max);
            Ok((k, s, mk, dev))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut table = Table::new("identities", &["k", "s", "M_k", "n", "max_deviation"]);
    for (k, s, mk, dev) in rows {
        table.push(vec![
            k.into(),
            s.into(),
            mk.into(),
            (s as u64 * mk).into(),
            dev.into(),
        ]);
    }
    Ok(table)
}

fn kernel(
    sys: &RadixSystem,
    n: Option<u64>,
    identities: bool,
    tol: f64,
) -> Result<Report, CliError> {
    let mut report = Report::default();
    if let Some(n) = n {
        let d = dirichlet_kernel::<f64>(n, sys)?;
        let mut table = Table::new("kernel", &["t", "re", "im"]);
        for (t, v) in d.values().iter().enumerate() {
            table.push(vec![t.into(), v.re.into(), v.im.into()]);
        }
        report.tables.push(table);
        report.summarize("n", n);
        report.summarize("lebesgue_constant", l1_norm(&d));
    }
    if identities {
        let table = kernel_identity_table(sys)?;
        let devs: Vec<f64> = table
            .rows
            .iter()
            .map(|r| r[4].as_f64().unwrap_or(f64::NAN))
            .collect();
        let max = devs.iter().copied().fold(0.0f64, f64::max);
        report.violations += devs.iter().filter(|&&d| exceeds(d, tol)).count();
        report.summarize("identity_cases", devs.len());
        report.summarize("identity_max_deviation", max);
        report.tables.push(table);
    }
    Ok(report)
}

fn lebesgue_scan(sys: &RadixSystem, from: u64, to: u64) -> Result<Report, CliError> {
    let scan = scan_lemma2(sys, from..=to)?;
    let mut table = Table::new(
        "lebesgue",
        &[
            "n",
            "v",
            "v_star",
            "L_n",
            "lower_bound",
            "upper_bound",
            "lower_slack",
            "upper_slack",
        ],
    );
    let mut best = (0u64, f64::NEG_INFINITY);
    for r in &scan.rows {
        table.push(vec![
            r.n.into(),
            r.v.into(),
            r.v_star.into(),
            r.lebesgue.into(),
            r.lower_bound.into(),
            r.upper_bound.into(),
            r.lower_slack.into(),
            r.upper_slack.into(),
        ]);
        if r.n >= 2 {
            let q = r.lebesgue / (r.n as f64).ln();
            if q > best.1 {
                best = (r.n, q);
            }
        }
    }
    let mut report = Report {
        tables: vec![table],
        ..Report::default()
    };
    report.violations = scan.violations.len();
    report.summarize("rows", scan.rows.len());
    report.summarize("min_lower_slack", scan.min_lower_slack);
    report.summarize("min_upper_slack", scan.min_upper_slack);
    if best.0 >= 2 {
        report.summarize("max_L_over_log_n", best.1);
        report.summarize("argmax_L_over_log_n", best.0);
    }
    if let Some(&first) = scan.violations.first() {
        report.summarize("first_violation", first);
    }
    Ok(report)
}

fn lemma1(sys: &RadixSystem) -> Result<Report, CliError> {
    let (rows, c) = lemma1_scan(sys)?;
    let mut table = Table::new(
        "lemma1",
        &[
            "n",
            "M_n",
            "sum_v",
            "avg_n_M_n",
            "avg_n_M_n_f64",
            "avg_M_n",
            "avg_M_n_f64",
        ],
    );
    let f = |r: vilenkin_core::Rational| *r.numer() as f64 / *r.denom() as f64;
    for r in &rows {
        table.push(vec![
            r.level.into(),
            sys.product(r.level).into(),
            r.sum_v.into(),
            r.by_level_and_size.into(),
            f(r.by_level_and_size).into(),
            r.by_size.into(),
            f(r.by_size).into(),
        ]);
    }
    let mut report = Report {
        tables: vec![table],
        ..Report::default()
    };
    report.summarize("c_estimate", c);
    report.summarize("c_estimate_f64", f(c));
    Ok(report)
}

/// Least-squares `c` in `B_k ≈ c α_k^{1/2}`.
pub fn fitted_growth_constant(b: &[f64], sqrt_alpha: &[f64]) -> f64 {
    let num: f64 = b.iter().zip(sqrt_alpha).map(|(b, s)| b * s).sum();
    let den: f64 = sqrt_alpha.iter().map(|s| s * s).sum();
    num / den
}

fn divergence(sys: &RadixSystem, alphas: &[u32], tol: f64) -> Result<Report, CliError> {
    let spec = CounterexampleSpec::new(alphas.to_vec(), sys.clone())?;
    let f = build_counterexample::<f64>(&spec);
    let coeffs = forward_fast(&f);
    let coefficient_deviation = coeffs.max_abs_diff(&counterexample_coefficients(&spec))?;

    let rows = divergence_profile(&spec)?;
    let mut table = Table::new(
        "divergence",
        &[
            "k",
            "alpha_k",
            "M_alpha_k",
            "B_k",
            "alpha_k_sqrt",
            "ratio",
            "h1_norm",
        ],
    );
    for r in &rows {
        table.push(vec![
            r.k.into(),
            r.alpha.into(),
            r.m_alpha.into(),
            r.window_average.into(),
            r.sqrt_alpha.into(),
            r.ratio.into(),
            r.h1_norm_truncation.into(),
        ]);
    }
    let b: Vec<f64> = rows.iter().map(|r| r.window_average).collect();
    let sqrt_alpha: Vec<f64> = rows.iter().map(|r| r.sqrt_alpha).collect();
    let h1: Vec<f64> = rows.iter().map(|r| r.h1_norm_truncation).collect();

    // Cesàro means of the partial-sum norms, from one scan over 1..=M_N.
    let order = sys.order();
    let norms = scan_partial_sums(&coeffs, 1, order, |_, s| l1_norm(s))?;
    let mut samples: Vec<u64> = sys.products()[1..].to_vec();
    samples.extend(alphas.iter().map(|&a| 2 * sys.product(a as usize)));
    samples.retain(|&n| n <= order);
    samples.sort_unstable();
    samples.dedup();
    let mut cesaro = Table::new("cesaro", &["n", "cesaro_mean"]);
    let mut acc = 0.0;
    let mut next = samples.iter().peekable();
    for (i, v) in norms.iter().enumerate() {
        acc += v;
        let n = i as u64 + 1;
        if next.peek() == Some(&&n) {
            cesaro.push(vec![n.into(), (acc / n as f64).into()]);
            next.next();
        }
    }
    let fejer = fejer_maximal_check(&coeffs, order)?;

    let mut report = Report {
        tables: vec![table, cesaro],
        ..Report::default()
    };
    report.violations = usize::from(exceeds(coefficient_deviation, tol));
    report.summarize("coefficient_max_deviation", coefficient_deviation);
    report.summarize("growth_constant", fitted_growth_constant(&b, &sqrt_alpha));
    report.summarize(
        "min_ratio",
        rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min),
    );
    report.summarize("B_strictly_increasing", b.windows(2).all(|w| w[0] < w[1]));
    report.summarize(
        "h1_spread",
        h1.iter().copied().fold(0.0, f64::max) / h1.iter().copied().fold(f64::INFINITY, f64::min),
    );
    report.summarize("summability", spec.summability());
    report.summarize("fejer_sup_norm", fejer.sup_norm);
    report.summarize("fejer_argmax", fejer.argmax);
    report.summarize("fejer_ratio", fejer.ratio);
    Ok(report)
}

/// Per-member results of the logarithmic-mean experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct GatMember {
    pub rank: usize,
    pub h1_norm: f64,
    /// `(n, convergence, bounded)` at `n = M_2, …, M_N`.
    pub curve: Vec<(u64, f64, f64)>,
    pub fejer_sup_norm: f64,
    pub fejer_ratio: f64,
}

impl GatMember {
    pub fn bounded_ratio_at_order(&self) -> f64 {
        self.curve.last().map_or(0.0, |c| c.2 / self.h1_norm)
    }

    pub fn max_bounded_ratio(&self) -> f64 {
        self.curve
            .iter()
            .map(|c| c.2 / self.h1_norm)
            .fold(0.0, f64::max)
    }

    /// Convergence form at `M_N` strictly below its value at `M_2`.
    pub fn convergence_decreases(&self) -> bool {
        match (self.curve.first(), self.curve.last()) {
            (Some(a), Some(b)) => b.1 < a.1,
            _ => false,
        }
    }
}

pub fn gat_members(
    sys: &RadixSystem,
    corpus_size: usize,
    ranks: &[usize],
    seed: u64,
) -> Result<Vec<GatMember>, CliError> {
    if sys.depth() < 2 {
        return Err(CliError::Usage("gat needs depth at least 2".into()));
    }
    if ranks.is_empty() || corpus_size == 0 {
        return Err(CliError::Usage(
            "gat needs a non-empty corpus and rank list".into(),
        ));
    }
    let ns: Vec<u64> = sys.products()[2..].to_vec();
    let corpus = seeded_corpus::<f64>(sys, corpus_size, ranks, seed);
    corpus
        .par_iter()
        .enumerate()
        .map(|(i, f)| {
            let coeffs = forward_fast(f);
            let avgs = gat_log_averages(&coeffs, &ns)?;
            let fejer = fejer_maximal_check(&coeffs, sys.order())?;
            Ok(GatMember {
                rank: ranks[i % ranks.len()].min(sys.depth()),
                h1_norm: h1_norm(f),
                curve: ns
                    .iter()
                    .zip(&avgs)
                    .map(|(&n, a)| (n, a.convergence, a.bounded))
                    .collect(),
                fejer_sup_norm: fejer.sup_norm,
                fejer_ratio: fejer.ratio,
            })
        })
        .collect()
}

fn gat(
    sys: &RadixSystem,
    corpus_size: usize,
    ranks: &[usize],
    seed: u64,
) -> Result<Report, CliError> {
    let members = gat_members(sys, corpus_size, ranks, seed)?;
    let mut curves = Table::new(
        "log_averages",
        &[
            "member",
            "rank",
            "n",
            "convergence",
            "bounded",
            "bounded_ratio",
        ],
    );
    let mut summary = Table::new(
        "members",
        &[
            "member",
            "rank",
            "h1_norm",
            "bounded_ratio_at_M_N",
            "convergence_decreases",
            "fejer_sup_norm",
            "fejer_ratio",
        ],
    );
    for (i, m) in members.iter().enumerate() {
        for &(n, conv, bounded) in &m.curve {
            curves.push(vec![
                i.into(),
                m.rank.into(),
                n.into(),
                conv.into(),
                bounded.into(),
                (bounded / m.h1_norm).into(),
            ]);
        }
        summary.push(vec![
            i.into(),
            m.rank.into(),
            m.h1_norm.into(),
            m.bounded_ratio_at_order().into(),
            m.convergence_decreases().into(),
            m.fejer_sup_norm.into(),
            m.fejer_ratio.into(),
        ]);
    }
    let low_rank: Vec<&GatMember> = members.iter().filter(|m| m.rank <= 4).collect();
    let mut report = Report {
        tables: vec![curves, summary],
        ..Report::default()
    };
    report.summarize(
        "max_bounded_ratio",
        members
            .iter()
            .map(GatMember::bounded_ratio_at_order)
            .fold(0.0, f64::max),
    );
    report.summarize(
        "max_bounded_ratio_all_n",
        members
            .iter()
            .map(GatMember::max_bounded_ratio)
            .fold(0.0, f64::max),
    );
    report.summarize("rank_le_4_members", low_rank.len());
    report.summarize(
        "rank_le_4_convergence_decreasing",
        low_rank
            .iter()
            .filter(|m| m.convergence_decreases())
            .count(),
    );
    report.summarize(
        "max_fejer_ratio",
        members.iter().map(|m| m.fejer_ratio).fold(0.0, f64::max),
    );
    Ok(report)
}

fn equiv_check(
    sys: &RadixSystem,
    input: Option<&Path>,
    random: usize,
    rank: Option<usize>,
    seed: u64,
    tol: f64,
) -> Result<Report, CliError> {
    let functions = match input {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
            vec![StepFunction64::from_json(&text)?]
        }
        None => seeded_corpus::<f64>(sys, random, &[rank.unwrap_or(sys.depth())], seed),
    };
    let results: Vec<_> = functions.par_iter().map(check_norm_equivalence).collect();
    let mut table = Table::new(
        "equivalence",
        &[
            "member",
            "h1_norm",
            "sup_partial_sums_norm",
            "max_pointwise_deviation",
        ],
    );
    for (i, r) in results.iter().enumerate() {
        table.push(vec![
            i.into(),
            r.h1_norm.into(),
            r.sup_partial_sums_norm.into(),
            r.max_pointwise_deviation.into(),
        ]);
    }
    let mut report = Report {
        tables: vec![table],
        ..Report::default()
    };
    report.violations = results
        .iter()
        .filter(|r| exceeds(r.max_pointwise_deviation, tol))
        .count();
    report.summarize("functions", results.len());
    report.summarize(
        "max_pointwise_deviation",
        results
            .iter()
            .map(|r| r.max_pointwise_deviation)
            .fold(0.0, f64::max),
    );
    Ok(report)
}
