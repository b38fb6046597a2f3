//! Command-line flags, the `key=value` config file, and their resolution.
//!
//! Precedence: command-line flag, then config file, then built-in default.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sha2::{Digest, Sha256};
use vilenkin_core::io::ValuesFile;
use vilenkin_core::RadixSystem;

use crate::CliError;

pub const EQUALITY_TOLERANCE: f64 = 1e-9;
pub const ORACLE_TOLERANCE: f64 = 1e-10;
pub const COEFFICIENT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "vilenkin",
    version,
    about = "Partial sums, Dirichlet kernels and Lebesgue constants on bounded Vilenkin groups"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct GlobalArgs {
    /// Radix sequence: "2,3,4" (repeated to --depth) or "2^10".
    #[arg(long, global = true)]
    pub radix: Option<String>,

    /// Truncation depth N.
    #[arg(long, global = true)]
    pub depth: Option<usize>,

    /// Worker threads (default: 1).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Seed for randomized corpora.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Tolerance for the command's verification step.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Plain `key=value` config file.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

impl Format {
    pub fn name(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Forward (or inverse) transform of a JSON step function.
    Transform {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Treat the input as coefficients and reconstruct the function.
        #[arg(long)]
        inverse: bool,
        /// Cross-check against the quadratic reference transform.
        #[arg(long)]
        verify: bool,
    },
    /// Dirichlet kernel D_n cell values, optionally with the product-index identities.
    Kernel {
        #[arg(long)]
        n: Option<u64>,
        /// Check D_{M_k} and D_{s M_k} against their closed forms for every k, s.
        #[arg(long)]
        check_identities: bool,
    },
    /// Lebesgue constants against the two-sided v/v* bound.
    LebesgueScan {
        #[arg(long)]
        from: Option<u64>,
        #[arg(long)]
        to: Option<u64>,
    },
    /// Averages of v(k) over 1 ≤ k < M_n for every level n.
    Lemma1,
    /// Window averages of partial-sum norms for the H1 counterexample.
    Divergence {
        /// Explicit increasing sequence, e.g. "1,4,9".
        #[arg(long)]
        alphas: Option<String>,
        /// Generated sequence; only "k4" (α_k = k^4) is known.
        #[arg(long)]
        alpha_rule: Option<String>,
        /// Number of generated terms.
        #[arg(long)]
        terms: Option<usize>,
    },
    /// Logarithmic means of partial-sum norms and Fejér maximal ratios on a seeded corpus.
    Gat {
        #[arg(long)]
        corpus_size: Option<usize>,
        /// Ranks cycled through the corpus, e.g. "1,2,3,4".
        #[arg(long)]
        ranks: Option<String>,
    },
    /// Pointwise comparison of f* with sup_n |S_{M_n} f|.
    EquivCheck {
        #[arg(long)]
        input: Option<PathBuf>,
        /// Number of seeded random functions when no input is given.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long)]
        rank: Option<usize>,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Transform { .. } => "transform",
            Command::Kernel { .. } => "kernel",
            Command::LebesgueScan { .. } => "lebesgue-scan",
            Command::Lemma1 => "lemma1",
            Command::Divergence { .. } => "divergence",
            Command::Gat { .. } => "gat",
            Command::EquivCheck { .. } => "equiv-check",
        }
    }
}

/// Parsed `key=value` lines; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key=value", i + 1))
            })?;
            entries.insert(k.trim().replace('_', "-"), v.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn typed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| CliError::Usage(format!("config key {key}: bad value {v:?}")))
            })
            .transpose()
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub experiment: &'static str,
    pub sys: RadixSystem,
    pub threads: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub tolerance: f64,
    pub params: Params,
}

#[derive(Debug, Clone)]
pub enum Params {
    Transform {
        input: PathBuf,
        inverse: bool,
        verify: bool,
    },
    Kernel {
        n: Option<u64>,
        check_identities: bool,
    },
    LebesgueScan {
        from: u64,
        to: u64,
    },
    Lemma1,
    Divergence {
        alphas: Vec<u32>,
    },
    Gat {
        corpus_size: usize,
        ranks: Vec<usize>,
    },
    EquivCheck {
        input: Option<PathBuf>,
        random: usize,
        rank: Option<usize>,
    },
}

fn pick<T: FromStr>(
    flag: Option<T>,
    config: &ConfigFile,
    key: &str,
) -> Result<Option<T>, CliError> {
    match flag {
        Some(v) => Ok(Some(v)),
        None => config.typed(key),
    }
}

pub fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|t| t.trim().parse::<T>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| {
            CliError::Usage(format!(
                "{what}: expected comma-separated integers, got {s:?}"
            ))
        })
}

pub fn default_tolerance(experiment: &str) -> f64 {
    match experiment {
        "transform" => ORACLE_TOLERANCE,
        "divergence" => COEFFICIENT_TOLERANCE,
        _ => EQUALITY_TOLERANCE,
    }
}

impl Settings {
    pub fn resolve(cli: &Cli) -> Result<Self, CliError> {
        let config = match &cli.global.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        Self::resolve_with(cli, &config)
    }

    pub fn resolve_with(cli: &Cli, config: &ConfigFile) -> Result<Self, CliError> {
        let g = &cli.global;
        let experiment = cli.command.name();
        let radix = pick(g.radix.clone(), config, "radix")?;
        let depth = pick(g.depth, config, "depth")?;
        let input = match &cli.command {
            Command::Transform { input, .. } | Command::EquivCheck { input, .. } => {
                pick(input.clone(), config, "input")?
            }
            _ => None,
        };
        let sys = match (&input, radix) {
            (_, Some(spec)) => RadixSystem::parse(&spec, depth)?,
            // Input files carry their own system.
            (Some(path), None) => input_system(path)?,
            (None, None) => {
                return Err(CliError::Usage("--radix is required".into()));
            }
        };
        let threads = pick(g.threads, config, "threads")?.unwrap_or(1);
        if threads == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        let seed = pick(g.seed, config, "seed")?.unwrap_or(0);
        let out = pick(g.out.clone(), config, "out")?;
        let format = pick(g.format, config, "format")?.unwrap_or(Format::Csv);
        let tolerance = pick(g.tolerance, config, "tolerance")?
            .unwrap_or_else(|| default_tolerance(experiment));
        if tolerance.is_nan() || tolerance < 0.0 {
            return Err(CliError::Usage("--tolerance must be non-negative".into()));
        }

        let params = match &cli.command {
            Command::Transform {
                inverse, verify, ..
            } => Params::Transform {
                input: input
                    .clone()
                    .ok_or_else(|| CliError::Usage("transform needs --input".into()))?,
                inverse: *inverse || config.typed("inverse")?.unwrap_or(false),
                verify: *verify || config.typed("verify")?.unwrap_or(false),
            },
            Command::Kernel {
                n,
                check_identities,
            } => Params::Kernel {
                n: pick(*n, config, "n")?,
                check_identities: *check_identities
                    || config.typed("check-identities")?.unwrap_or(false),
            },
            Command::LebesgueScan { from, to } => Params::LebesgueScan {
                from: pick(*from, config, "from")?.unwrap_or(1),
                to: pick(*to, config, "to")?.unwrap_or(sys.order() - 1),
            },
            Command::Lemma1 => Params::Lemma1,
            Command::Divergence {
                alphas,
                alpha_rule,
                terms,
            } => {
                let alphas_s = pick(alphas.clone(), config, "alphas")?;
                let rule = pick(alpha_rule.clone(), config, "alpha-rule")?;
                let terms = pick(*terms, config, "terms")?;
                let alphas = match (alphas_s, rule) {
                    (Some(list), _) if alphas.is_some() || alpha_rule.is_none() => {
                        parse_list(&list, "--alphas")?
                    }
                    (_, Some(rule)) => generate_alphas(&rule, terms, &sys)?,
                    (Some(list), None) => parse_list(&list, "--alphas")?,
                    (None, None) => generate_alphas("k4", terms, &sys)?,
                };
                Params::Divergence { alphas }
            }
            Command::Gat { corpus_size, ranks } => Params::Gat {
                corpus_size: pick(*corpus_size, config, "corpus-size")?.unwrap_or(50),
                ranks: match pick(ranks.clone(), config, "ranks")? {
                    Some(s) => parse_list(&s, "--ranks")?,
                    None => vec![1, 2, 3, 4],
                },
            },
            Command::EquivCheck { random, rank, .. } => Params::EquivCheck {
                input: input.clone(),
                random: pick(*random, config, "random")?.unwrap_or(100),
                rank: pick(*rank, config, "rank")?,
            },
        };

        Ok(Self {
            experiment,
            sys,
            threads,
            seed,
            out,
            format,
            tolerance,
            params,
        })
    }

    /// Canonical text of everything that determines the output (the output
    /// path excluded).
    pub fn canonical(&self) -> String {
        format!(
            "experiment={}\nradix={}\nthreads={}\nseed={}\nformat={}\ntolerance={:e}\nparams={:?}\n",
            self.experiment,
            self.sys.spec_string(),
            self.threads,
            self.seed,
            self.format.name(),
            self.tolerance,
            self.params
        )
    }

    /// First 16 hex digits of the SHA-256 of [`Settings::canonical`].
    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

fn input_system(path: &Path) -> Result<RadixSystem, CliError> {
    let file = std::fs::File::open(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let values = ValuesFile::read(std::io::BufReader::new(file))?;
    Ok(RadixSystem::new(&values.radices)?)
}

/// `k4`: `α_k = k^4`. Without `terms`, as many terms as the depth allows.
pub fn generate_alphas(
    rule: &str,
    terms: Option<usize>,
    sys: &RadixSystem,
) -> Result<Vec<u32>, CliError> {
    if rule != "k4" {
        return Err(CliError::Usage(format!(
            "unknown --alpha-rule {rule:?} (known: k4)"
        )));
    }
    let terms = match terms {
        Some(t) => t,
        None => (1..)
            .take_while(|&k: &usize| k.pow(4) < sys.depth())
            .count(),
    };
    if terms == 0 {
        return Err(CliError::Usage(
            "alpha rule yields no terms at this depth".into(),
        ));
    }
    Ok((1..=terms as u32).map(|k| k.pow(4)).collect())
}
