//! `bayes-info`: reproducible command-line runs of every study in the
//! library. Each command echoes its resolved configuration on stderr and
//! writes JSON or CSV results to `--out` (stdout JSON when omitted).

use std::io::ErrorKind as IoKind;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use bayes_info::conjugate::{
    InfoPair, MultinomialDirichletModel, NormalNormalModel, PoissonGammaModel,
};
use bayes_info::oracle::{
    bivbin_info, BivBinData, BivBinPrior, DEFAULT_RESOLUTION_2D, MIN_RESOLUTION,
};
use bayes_info::pipeline::{
    format_f64, persist, run_decay_study, run_mc_validation, run_prediction_experiment,
    to_stable_json, DatasetKind, DecayFamily, DecayStudy, ExperimentConfig, Format, LinearSampler,
    McValidationConfig, Tabular, ValidationFamily, DATA_DIR_ENV,
};
use bayes_info::regression::ClassificationRule;
use bayes_info::samplers::EssConfig;
use bayes_info::Error;
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "bayes-info",
    version,
    about = "Prior and likelihood information of Bayesian models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form u and v for a conjugate model.
    Conjugate(ConjugateArgs),
    /// Grid quadrature for the bivariate binomial example.
    Bivbin(BivbinArgs),
    /// Prediction sweep over prior variances on a regression dataset.
    Experiment(ExperimentArgs),
    /// Decay of prior information with sample size.
    Decay(DecayArgs),
    /// Monte Carlo estimator against closed forms over a hyperparameter sweep.
    ValidateMc(ValidateArgs),
}

#[derive(Debug, Args)]
struct Output {
    /// Seed for every random choice the command makes.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Result file; the format follows the extension unless --format is given.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format, overriding the --out extension.
    #[arg(long, value_enum)]
    format: Option<OutFormat>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConjugateFamily {
    NormalNormal,
    PoissonGamma,
    MultinomialDirichlet,
}

#[derive(Debug, Args)]
struct ConjugateArgs {
    #[arg(long, value_enum)]
    family: ConjugateFamily,
    /// Dirichlet concentration, one value per category.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    alpha: Vec<f64>,
    /// Category counts.
    #[arg(long, value_delimiter = ',')]
    counts: Vec<u64>,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    prior_mean: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    prior_variance: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    noise_variance: f64,
    /// Number of observations.
    #[arg(long)]
    n: Option<u64>,
    /// Sample mean of the observations.
    #[arg(long, allow_negative_numbers = true)]
    ybar: Option<f64>,
    /// Gamma prior shape.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    shape: f64,
    /// Gamma prior rate.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    rate: f64,
    /// Sum of the Poisson counts.
    #[arg(long)]
    total: Option<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PriorArg {
    Flat,
    Jeffreys,
    Reference,
}

impl From<PriorArg> for BivBinPrior {
    fn from(p: PriorArg) -> Self {
        match p {
            PriorArg::Flat => Self::Flat,
            PriorArg::Jeffreys => Self::Jeffreys,
            PriorArg::Reference => Self::Reference,
        }
    }
}

#[derive(Debug, Args)]
struct BivbinArgs {
    /// Trials of the first binomial.
    #[arg(long)]
    m: u64,
    /// Successes of the first binomial, which are the trials of the second.
    #[arg(long)]
    r: u64,
    /// Successes of the second binomial.
    #[arg(long)]
    s: u64,
    #[arg(long, value_enum, default_value_t = PriorArg::Flat)]
    prior: PriorArg,
    /// Grid points per axis.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION_2D,
          value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(MIN_RESOLUTION as u64..))]
    resolution: usize,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DatasetArg {
    Diabetes,
    Prostate,
}

impl From<DatasetArg> for DatasetKind {
    fn from(d: DatasetArg) -> Self {
        match d {
            DatasetArg::Diabetes => Self::Diabetes,
            DatasetArg::Prostate => Self::Prostate,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum SamplerArg {
    Exact,
    Ess,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RuleArg {
    BernoulliVote,
    MeanProbability,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[arg(long, value_enum)]
    dataset: DatasetArg,
    /// Dataset file; defaults to <data-dir>/<dataset>.csv.
    #[arg(long)]
    data: Option<PathBuf>,
    #[arg(long, env = DATA_DIR_ENV, default_value = "data")]
    data_dir: PathBuf,
    /// Prior variances to sweep (comma separated); defaults to the dataset's grid.
    #[arg(long, value_delimiter = ',')]
    sigma2: Vec<f64>,
    /// Training rows; the rest form the test set.
    #[arg(long)]
    train_size: Option<usize>,
    /// Posterior draws kept for prediction.
    #[arg(long, default_value_t = 100)]
    predictive_draws: usize,
    /// Posterior draws used by the information estimators.
    #[arg(long, default_value_t = 1000)]
    mc_draws: usize,
    /// Prior variance whose posterior approximates the normalized likelihood.
    #[arg(long, default_value_t = 100.0)]
    reference_sigma2: f64,
    #[arg(long, default_value_t = EssConfig::default().burn_in)]
    burn_in: usize,
    #[arg(long, default_value_t = EssConfig::default().thin)]
    thin: usize,
    /// Sampler for the linear model.
    #[arg(long, value_enum, default_value_t = SamplerArg::Exact)]
    linear_sampler: SamplerArg,
    /// Rule turning posterior draws into a class label.
    #[arg(long, value_enum, default_value_t = RuleArg::BernoulliVote)]
    rule: RuleArg,
    /// Use raw predictors instead of training-set z-scores.
    #[arg(long)]
    no_standardize: bool,
    /// Add an intercept column.
    #[arg(long)]
    intercept: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DecayFamilyArg {
    MultinomialDirichlet,
    NormalNormal,
    PoissonGamma,
    Finite,
}

#[derive(Debug, Args)]
struct DecayArgs {
    #[arg(long, value_enum)]
    family: DecayFamilyArg,
    /// Symmetric Dirichlet concentration.
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// Number of categories.
    #[arg(long, default_value_t = 4)]
    k: usize,
    /// Sample sizes.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "1,2,5,10,20,50,100,200,400,1000"
    )]
    n_grid: Vec<u64>,
    #[arg(long, default_value_t = 50, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    replications: usize,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    prior_mean: f64,
    #[arg(long, default_value_t = 1.0)]
    prior_variance: f64,
    #[arg(long, default_value_t = 1.0)]
    noise_variance: f64,
    /// Data-generating mean for the normal family.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    true_mean: f64,
    #[arg(long, default_value_t = 2.0)]
    shape: f64,
    #[arg(long, default_value_t = 1.0)]
    rate: f64,
    /// Data-generating rate for the Poisson family.
    #[arg(long, default_value_t = 3.0)]
    true_rate: f64,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long, value_enum)]
    family: ConjugateFamily,
    /// Posterior draws per estimate.
    #[arg(long, default_value_t = 200, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(2..))]
    n_samples: usize,
    #[arg(long, default_value_t = 10, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(1..))]
    replications: usize,
    /// Also run each row at this larger draw count.
    #[arg(long, value_parser = clap::builder::RangedU64ValueParser::<usize>::new().range(2..))]
    control_samples: Option<usize>,
    /// Swept values: symmetric α, prior variance or Gamma shape by family.
    #[arg(long, value_delimiter = ',')]
    sweep: Vec<f64>,
    /// Category counts for the multinomial family.
    #[arg(long, value_delimiter = ',')]
    counts: Vec<u64>,
    #[command(flatten)]
    output: Output,
}

#[derive(Debug, Serialize)]
struct InfoReport<C: Serialize> {
    config: C,
    prior_info: f64,
    likelihood_info: f64,
}

impl<C: Serialize> InfoReport<C> {
    fn new(config: C, info: InfoPair<f64>) -> Self {
        Self {
            config,
            prior_info: info.prior_info,
            likelihood_info: info.likelihood_info,
        }
    }
}

impl<C: Serialize> Tabular for InfoReport<C> {
    fn csv_header(&self) -> Vec<&'static str> {
        vec!["prior_info", "likelihood_info"]
    }

    fn csv_rows(&self) -> Vec<Vec<String>> {
        vec![vec![
            format_f64(self.prior_info),
            format_f64(self.likelihood_info),
        ]]
    }
}

#[derive(Debug, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
enum ConjugateConfig {
    NormalNormal(NormalNormalModel<f64>),
    PoissonGamma(PoissonGammaModel<f64>),
    MultinomialDirichlet(MultinomialDirichletModel<f64>),
}

#[derive(Debug, Serialize)]
struct BivbinConfig {
    m: u64,
    r: u64,
    s: u64,
    prior: BivBinPrior,
    resolution: usize,
}

fn usage_error(msg: impl std::fmt::Display) -> ! {
    Cli::command()
        .error(ErrorKind::MissingRequiredArgument, msg)
        .exit()
}

fn echo<T: Serialize>(command: &str, config: &T) -> anyhow::Result<()> {
    eprintln!("bayes-info {command}: resolved configuration");
    eprint!("{}", to_stable_json(config)?);
    Ok(())
}

fn emit<T: Serialize + Tabular>(value: &T, output: &Output) -> anyhow::Result<()> {
    let Some(path) = &output.out else {
        let text = match output.format {
            Some(OutFormat::Csv) => bayes_info::pipeline::to_csv(value)?,
            _ => to_stable_json(value)?,
        };
        print!("{text}");
        return Ok(());
    };
    let format = match output.format {
        Some(OutFormat::Json) => Format::Json,
        Some(OutFormat::Csv) => Format::Csv,
        None => Format::from_path(path).unwrap_or(Format::Json),
    };
    persist(value, path, format).with_context(|| format!("writing {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn cmd_conjugate(args: &ConjugateArgs) -> anyhow::Result<()> {
    let require = |name: &str, present: bool| {
        if !present {
            usage_error(format!(
                "--{name} is required for --family {:?}",
                args.family
            ));
        }
    };
    let config = match args.family {
        ConjugateFamily::NormalNormal => {
            require("n", args.n.is_some());
            require("ybar", args.ybar.is_some());
            ConjugateConfig::NormalNormal(NormalNormalModel::new(
                args.prior_mean,
                args.prior_variance,
                args.noise_variance,
                args.n.unwrap_or_default(),
                args.ybar.unwrap_or_default(),
            )?)
        }
        ConjugateFamily::PoissonGamma => {
            require("n", args.n.is_some());
            require("total", args.total.is_some());
            ConjugateConfig::PoissonGamma(PoissonGammaModel::new(
                args.shape,
                args.rate,
                args.n.unwrap_or_default(),
                args.total.unwrap_or_default(),
            )?)
        }
        ConjugateFamily::MultinomialDirichlet => {
            require("alpha", !args.alpha.is_empty());
            require("counts", !args.counts.is_empty());
            ConjugateConfig::MultinomialDirichlet(MultinomialDirichletModel::new(
                args.alpha.clone(),
                args.counts.clone(),
            )?)
        }
    };
    echo("conjugate", &config)?;
    let info = match &config {
        ConjugateConfig::NormalNormal(m) => m.info()?,
        ConjugateConfig::PoissonGamma(m) => m.info()?,
        ConjugateConfig::MultinomialDirichlet(m) => m.info(),
    };
    emit(&InfoReport::new(config, info), &args.output)
}

fn cmd_bivbin(args: &BivbinArgs) -> anyhow::Result<()> {
    let config = BivbinConfig {
        m: args.m,
        r: args.r,
        s: args.s,
        prior: args.prior.into(),
        resolution: args.resolution,
    };
    echo("bivbin", &config)?;
    let data = BivBinData::new(args.m, args.r, args.s)?;
    let info = bivbin_info(data, config.prior, config.resolution)?;
    emit(&InfoReport::new(config, info), &args.output)
}

fn cmd_experiment(args: &ExperimentArgs) -> anyhow::Result<()> {
    let kind = DatasetKind::from(args.dataset);
    let mut config = ExperimentConfig::for_dataset(kind, args.output.seed);
    config.dataset_path = args
        .data
        .clone()
        .unwrap_or_else(|| args.data_dir.join(kind.file_name()));
    if !args.sigma2.is_empty() {
        config.sigma2_grid = args.sigma2.clone();
    }
    if let Some(t) = args.train_size {
        config.train_size = t;
    }
    config.predictive_draws = args.predictive_draws;
    config.mc_draws = args.mc_draws;
    config.reference_sigma2 = args.reference_sigma2;
    config.ess = EssConfig {
        burn_in: args.burn_in,
        thin: args.thin,
        draws: args.mc_draws,
        ..config.ess
    };
    config.linear_sampler = match args.linear_sampler {
        SamplerArg::Exact => LinearSampler::Exact,
        SamplerArg::Ess => LinearSampler::Ess,
    };
    config.classification_rule = match args.rule {
        RuleArg::BernoulliVote => ClassificationRule::BernoulliVote,
        RuleArg::MeanProbability => ClassificationRule::MeanProbability,
    };
    config.standardize = !args.no_standardize;
    config.includes_intercept = args.intercept;
    echo("experiment", &config)?;

    let result = match run_prediction_experiment(&config) {
        Err(Error::Io { path, source }) if source.kind() == IoKind::NotFound => {
            bail!(missing_data(&path, kind))
        }
        other => other?,
    };
    emit(&result, &args.output)
}

fn missing_data(path: &Path, kind: DatasetKind) -> String {
    format!(
        "dataset file {} not found. Run scripts/fetch_data.sh to download {}, \
         or point --data / {DATA_DIR_ENV} at an existing copy.",
        path.display(),
        kind.file_name()
    )
}

fn cmd_decay(args: &DecayArgs) -> anyhow::Result<()> {
    let family = match args.family {
        DecayFamilyArg::MultinomialDirichlet => DecayFamily::MultinomialDirichlet {
            alpha: args.alpha,
            k: args.k,
        },
        DecayFamilyArg::NormalNormal => DecayFamily::NormalNormal {
            prior_mean: args.prior_mean,
            prior_variance: args.prior_variance,
            noise_variance: args.noise_variance,
            true_mean: args.true_mean,
        },
        DecayFamilyArg::PoissonGamma => DecayFamily::PoissonGamma {
            shape: args.shape,
            rate: args.rate,
            true_rate: args.true_rate,
        },
        DecayFamilyArg::Finite => DecayFamily::default_finite(),
    };
    let study = DecayStudy {
        family,
        n_grid: args.n_grid.clone(),
        replications: args.replications,
        seed: args.output.seed,
    };
    echo("decay", &study)?;
    emit(&run_decay_study(&study)?, &args.output)
}

fn cmd_validate_mc(args: &ValidateArgs) -> anyhow::Result<()> {
    let mut family = match args.family {
        ConjugateFamily::MultinomialDirichlet => ValidationFamily::default_multinomial(),
        ConjugateFamily::NormalNormal => ValidationFamily::default_normal(),
        ConjugateFamily::PoissonGamma => ValidationFamily::default_poisson(),
    };
    match &mut family {
        ValidationFamily::MultinomialDirichlet { alphas, counts } => {
            if !args.sweep.is_empty() {
                *alphas = args.sweep.clone();
            }
            if !args.counts.is_empty() {
                *counts = args.counts.clone();
            }
        }
        ValidationFamily::NormalNormal {
            prior_variances, ..
        } if !args.sweep.is_empty() => {
            *prior_variances = args.sweep.clone();
        }
        ValidationFamily::PoissonGamma { shapes, .. } if !args.sweep.is_empty() => {
            *shapes = args.sweep.clone();
        }
        _ => {}
    }
    let config = McValidationConfig {
        family,
        n_samples: args.n_samples,
        replications: args.replications,
        control_samples: args.control_samples,
        seed: args.output.seed,
    };
    echo("validate-mc", &config)?;
    emit(&run_mc_validation(&config)?, &args.output)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Conjugate(a) => cmd_conjugate(a),
        Command::Bivbin(a) => cmd_bivbin(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Decay(a) => cmd_decay(a),
        Command::ValidateMc(a) => cmd_validate_mc(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
