//! Command-line surface and its validated form.

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use oet_core::units::{dbm_to_mw, mw_to_dbm};
use oet_core::Scheme;

use crate::dataset::Format;
use crate::CliError;

/// Master seed used when neither `--seed` nor `--random-seed` is given.
pub const DEFAULT_SEED: u64 = 20_190_601;

pub const DEFAULT_TRIALS: u64 = 100_000;

#[derive(Debug, Parser)]
#[command(
    name = "oet",
    version,
    about = "Finite-horizon opportunistic energy transfer experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal per-frame gain thresholds.
    Thresholds {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Closed-form expected harvested energy.
    Expect {
        #[command(flatten)]
        schemes: SchemeArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo mean harvested energy.
    Simulate {
        #[command(flatten)]
        schemes: SchemeArgs,
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Monte Carlo outage probability.
    Outage {
        #[command(flatten)]
        schemes: SchemeArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Harvested-energy threshold.
        #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
        energy_threshold_dbm: f64,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// R(1) - ln N for the optimal and genie schemes.
    Asymptotics {
        #[command(flatten)]
        schemes: SchemeArgs,
        #[command(flatten)]
        frames: FrameArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Discretized Bellman solve cross-checked against the closed forms.
    Oracle {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Regenerate the dataset behind one figure.
    Reproduce {
        #[arg(value_enum)]
        figure: Figure,
        /// Override the preset trial count.
        #[arg(long)]
        trials: Option<u64>,
        #[command(flatten)]
        seed: SeedArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
}

#[derive(Debug, Args)]
pub struct SchemeArgs {
    /// Comma-separated: optimal, genie, equal, random.
    #[arg(long, value_delimiter = ',')]
    pub scheme: Vec<Scheme>,
}

#[derive(Debug, Args)]
pub struct FrameArgs {
    /// Comma-separated horizon lengths.
    #[arg(long, value_delimiter = ',', conflicts_with = "frames_range")]
    pub frames: Vec<usize>,
    /// Inclusive range, `A..B` or `A:B`.
    #[arg(long)]
    pub frames_range: Option<FrameRange>,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub frames: FrameArgs,
    /// Budget in mW, comma-separated. Defaults to 1.
    #[arg(long, value_delimiter = ',', conflicts_with = "power_dbm")]
    pub power: Vec<f64>,
    /// Budget in dBm, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub power_dbm: Vec<f64>,
    /// Estimation energy as a fraction of the budget.
    #[arg(long, conflicts_with = "et_abs")]
    pub et_frac: Option<f64>,
    /// Estimation energy in mW.
    #[arg(long)]
    pub et_abs: Option<f64>,
}

#[derive(Debug, Args)]
pub struct SeedArgs {
    /// Master seed.
    #[arg(long, default_value_t = DEFAULT_SEED, conflicts_with = "random_seed")]
    pub seed: u64,
    /// Draw a fresh master seed and report it on stderr.
    #[arg(long)]
    pub random_seed: bool,
    /// Worker threads; 0 uses all cores. Never changes the output.
    #[arg(long, default_value_t = 0)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, default_value_t = DEFAULT_TRIALS)]
    pub trials: u64,
    #[command(flatten)]
    pub seed: SeedArgs,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameRange(pub RangeInclusive<usize>);

impl FromStr for FrameRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (a, b) = s
            .split_once("..=")
            .or_else(|| s.split_once(".."))
            .or_else(|| s.split_once(':'))
            .ok_or_else(|| format!("expected A..B or A:B, got `{s}`"))?;
        let parse = |t: &str| t.trim().parse::<usize>().map_err(|e| format!("`{t}`: {e}"));
        let (a, b) = (parse(a)?, parse(b)?);
        if a > b {
            return Err(format!("empty range {a}..{b}"));
        }
        Ok(FrameRange(a..=b))
    }
}

/// A budget with the unit the user chose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Power {
    pub mw: f64,
    pub dbm: f64,
}

impl Power {
    pub fn from_mw(mw: f64) -> Self {
        Self { mw, dbm: mw_to_dbm(mw) }
    }

    pub fn from_dbm(dbm: f64) -> Self {
        Self {
            mw: dbm_to_mw(dbm),
            dbm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimation {
    Fraction(f64),
    Absolute(f64),
}

impl Estimation {
    pub fn energy(self, budget: f64) -> f64 {
        match self {
            Estimation::Fraction(f) => f * budget,
            Estimation::Absolute(e) => e,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Thresholds,
    Expect,
    Simulate,
    Outage,
    Asymptotics,
    Oracle,
    Reproduce(Figure),
}

/// Validated experiment description.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub schemes: Vec<Scheme>,
    pub frames: Vec<usize>,
    pub powers: Vec<Power>,
    pub estimation: Estimation,
    pub energy_threshold_dbm: f64,
    /// `None` for reproduce runs that keep the preset counts.
    pub trials: Option<u64>,
    pub seed: u64,
    /// True when the seed was drawn rather than given.
    pub seed_is_random: bool,
    pub workers: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

impl FrameArgs {
    fn resolve(&self, default: RangeInclusive<usize>) -> Result<Vec<usize>, CliError> {
        let frames: Vec<usize> = match &self.frames_range {
            Some(FrameRange(r)) => r.clone().collect(),
            None if self.frames.is_empty() => default.collect(),
            None => self.frames.clone(),
        };
        if frames.contains(&0) {
            return Err(invalid("frame counts must be at least 1"));
        }
        Ok(frames)
    }
}

impl ModelArgs {
    fn powers(&self) -> Result<Vec<Power>, CliError> {
        let powers = if !self.power_dbm.is_empty() {
            self.power_dbm.iter().map(|&d| Power::from_dbm(d)).collect()
        } else if !self.power.is_empty() {
            self.power.iter().map(|&p| Power::from_mw(p)).collect()
        } else {
            vec![Power::from_mw(1.0)]
        };
        for p in &powers {
            if !(p.mw.is_finite() && p.mw > 0.0) {
                return Err(invalid(format!("budget must be positive and finite, got {} mW", p.mw)));
            }
        }
        Ok(powers)
    }

    fn estimation(&self, powers: &[Power]) -> Result<Estimation, CliError> {
        match (self.et_frac, self.et_abs) {
            (Some(f), _) if !(0.0..1.0).contains(&f) => Err(invalid(format!("--et-frac must lie in [0, 1), got {f}"))),
            (Some(f), _) => Ok(Estimation::Fraction(f)),
            (None, Some(e)) => {
                if !(e.is_finite() && e >= 0.0) {
                    return Err(invalid(format!("--et-abs must be non-negative, got {e}")));
                }
                if let Some(p) = powers.iter().find(|p| e >= p.mw) {
                    return Err(invalid(format!("--et-abs {e} mW is not below the budget {} mW", p.mw)));
                }
                Ok(Estimation::Absolute(e))
            }
            (None, None) => Ok(Estimation::Fraction(0.0)),
        }
    }
}

impl SeedArgs {
    fn resolve(&self) -> (u64, bool) {
        if self.random_seed {
            (rand::random(), true)
        } else {
            (self.seed, false)
        }
    }
}

fn schemes(args: &SchemeArgs, default: &[Scheme]) -> Vec<Scheme> {
    if args.scheme.is_empty() {
        default.to_vec()
    } else {
        args.scheme.clone()
    }
}

impl ExperimentConfig {
    fn base(task: Task, output: &OutputArgs) -> Self {
        Self {
            task,
            schemes: vec![Scheme::Optimal],
            frames: Vec::new(),
            powers: vec![Power::from_mw(1.0)],
            estimation: Estimation::Fraction(0.0),
            energy_threshold_dbm: 10.0,
            trials: None,
            seed: DEFAULT_SEED,
            seed_is_random: false,
            workers: 0,
            format: output.format,
            out: output.out.clone(),
        }
    }

    fn model(mut self, model: &ModelArgs, default_frames: RangeInclusive<usize>) -> Result<Self, CliError> {
        self.frames = model.frames.resolve(default_frames)?;
        self.powers = model.powers()?;
        self.estimation = model.estimation(&self.powers)?;
        Ok(self)
    }

    fn run(mut self, run: &RunArgs) -> Result<Self, CliError> {
        if run.trials == 0 {
            return Err(invalid("--trials must be at least 1"));
        }
        self.trials = Some(run.trials);
        self.seeded(&run.seed);
        Ok(self)
    }

    fn seeded(&mut self, seed: &SeedArgs) {
        (self.seed, self.seed_is_random) = seed.resolve();
        self.workers = seed.workers;
    }

    pub fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let cfg = match &cli.command {
            Command::Thresholds { model, output } => Self::base(Task::Thresholds, output).model(model, 10..=10)?,
            Command::Expect {
                schemes: s,
                model,
                output,
            } => {
                let mut c = Self::base(Task::Expect, output).model(model, 1..=10)?;
                c.schemes = schemes(s, &Scheme::ALL);
                c
            }
            Command::Simulate {
                schemes: s,
                model,
                run,
                output,
            } => {
                let mut c = Self::base(Task::Simulate, output).model(model, 1..=10)?.run(run)?;
                c.schemes = schemes(s, &Scheme::ALL);
                c
            }
            Command::Outage {
                schemes: s,
                model,
                energy_threshold_dbm,
                run,
                output,
            } => {
                let mut c = Self::base(Task::Outage, output).model(model, 1..=3)?.run(run)?;
                c.schemes = schemes(s, &Scheme::ALL);
                if !energy_threshold_dbm.is_finite() {
                    return Err(invalid("--energy-threshold-dbm must be finite"));
                }
                c.energy_threshold_dbm = *energy_threshold_dbm;
                c
            }
            Command::Asymptotics {
                schemes: s,
                frames,
                output,
            } => {
                let mut c = Self::base(Task::Asymptotics, output);
                c.frames = frames.resolve(1..=100)?;
                c.schemes = schemes(s, &[Scheme::Optimal, Scheme::Genie]);
                if let Some(bad) = c.schemes.iter().find(|s| matches!(s, Scheme::Equal | Scheme::Random)) {
                    return Err(invalid(format!(
                        "asymptotics are defined for optimal and genie only, not {bad}"
                    )));
                }
                c
            }
            Command::Oracle { model, output } => {
                let c = Self::base(Task::Oracle, output).model(model, 1..=4)?;
                let max = oet_core::oracle::MAX_FRAMES;
                if let Some(n) = c.frames.iter().find(|&&n| n > max) {
                    return Err(invalid(format!("oracle supports at most {max} frames, got {n}")));
                }
                c
            }
            Command::Reproduce {
                figure,
                trials,
                seed,
                output,
            } => {
                let mut c = Self::base(Task::Reproduce(*figure), output);
                if *trials == Some(0) {
                    return Err(invalid("--trials must be at least 1"));
                }
                c.trials = *trials;
                c.seeded(seed);
                c
            }
        };
        Ok(cfg)
    }
}
