//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Each check is timed against its budget.
//!
//! Runs as a plain binary (`harness = false`), so `cargo test` prints the
//! report verbatim.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use bayes_info::conjugate::{MultinomialDirichletModel, NormalNormalModel, PoissonGammaModel};
use bayes_info::divergences::{
    kl_dirichlet, kl_gamma, kl_normal, DirichletParams, GammaParams, NormalParams,
};
use bayes_info::mc::{estimate_prior_info, ConjugateCase, DEFAULT_SPLIT_FRACTION};
use bayes_info::oracle::{
    bivbin_info, finite_avg_likelihood_info, grid_info_proper_prior, lemma_bounds,
    mutual_information, poisson_gamma_grid, quad_kl_dirichlet, quad_kl_gamma, quad_kl_normal, Axis,
    BivBinData, BivBinPrior, FiniteModel, GridModel, RateScale, DEFAULT_RESOLUTION_1D,
    DEFAULT_RESOLUTION_2D,
};
use bayes_info::pipeline::{
    run_decay_study, run_mc_validation, run_prediction_experiment, DatasetKind, DecayFamily,
    DecayStudy, ExperimentConfig, McValidationConfig, ValidationFamily, DATA_DIR_ENV,
};
use bayes_info::samplers::{sample_normal, RngStream};
use rand::Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond {
        Ok(ok)
    } else {
        Err(bad)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// Spearman rank correlation without tie handling (inputs are continuous).
fn spearman(a: &[f64], b: &[f64]) -> f64 {
    let ranks = |xs: &[f64]| {
        let mut idx: Vec<usize> = (0..xs.len()).collect();
        idx.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
        let mut r = vec![0.0; xs.len()];
        for (rank, i) in idx.into_iter().enumerate() {
            r[i] = rank as f64;
        }
        r
    };
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let d2: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - y).powi(2)).sum();
    1.0 - 6.0 * d2 / (n * (n * n - 1.0))
}

fn c1_bivariate_binomial() -> Outcome {
    let data = BivBinData::new(30, 29, 2).map_err(err)?;
    let targets = [
        (BivBinPrior::Flat, 3.52805),
        (BivBinPrior::Reference, 2.97012),
        (BivBinPrior::Jeffreys, 2.55152),
    ];
    let mut worst: f64 = 0.0;
    let mut got = Vec::new();
    for (prior, target) in targets {
        let v = bivbin_info(data, prior, DEFAULT_RESOLUTION_2D)
            .map_err(err)?
            .likelihood_info;
        worst = worst.max((v - target).abs());
        got.push(format!("{prior:?}={v:.5}"));
    }
    check(
        worst <= 0.01,
        format!("{} (max |err| {worst:.1e})", got.join(" ")),
        format!("{} off by {worst:.3e} > 0.01", got.join(" ")),
    )
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn c2_closed_form_vs_quadrature() -> Outcome {
    let mut rng = RngStream::new(2, 0).rng();
    let mut worst: f64 = 0.0;
    let mut track = |name: &str, exact: f64, quad: f64| {
        let r = relative(exact, quad);
        if r > worst {
            worst = r;
        }
        if r > 1e-6 {
            Err(format!("{name}: closed form {exact} vs quadrature {quad}"))
        } else {
            Ok(())
        }
    };
    for _ in 0..10 {
        let mut normal =
            || NormalParams::new(rng.random_range(-3.0..3.0), rng.random_range(0.2..5.0)).unwrap();
        let (p, q) = (normal(), normal());
        track(
            "normal",
            kl_normal(&p, &q),
            quad_kl_normal(&p, &q).map_err(err)?,
        )?;
    }
    for _ in 0..10 {
        let mut gamma =
            || GammaParams::new(rng.random_range(0.5..10.0), rng.random_range(0.2..5.0)).unwrap();
        let (p, q) = (gamma(), gamma());
        track(
            "gamma",
            kl_gamma(&p, &q),
            quad_kl_gamma(&p, &q).map_err(err)?,
        )?;
    }
    for k in [2, 3] {
        for _ in 0..10 {
            let mut dir = || {
                DirichletParams::new((0..k).map(|_| rng.random_range(0.5..10.0)).collect()).unwrap()
            };
            let (p, q) = (dir(), dir());
            track(
                "dirichlet",
                kl_dirichlet(&p, &q).map_err(err)?,
                quad_kl_dirichlet(&p, &q).map_err(err)?,
            )?;
        }
    }
    Ok(format!("40 pairs, max relative error {worst:.1e}"))
}

fn c3_formula_cross_check() -> Outcome {
    let mut rng = RngStream::new(3, 0).rng();
    let mut worst: f64 = 0.0;
    let mut compare = |name: &str, a: (f64, f64), b: (f64, f64)| {
        for (x, y) in [(a.0, b.0), (a.1, b.1)] {
            let scaled = (x - y).abs() / x.abs().max(1.0);
            worst = worst.max(scaled);
            if scaled > 1e-12 {
                return Err(format!("{name}: {x} vs {y}"));
            }
        }
        Ok(())
    };
    for _ in 0..1000 {
        let m = NormalNormalModel::new(
            rng.random_range(-10.0..10.0),
            rng.random_range(0.01..100.0),
            rng.random_range(0.01..100.0),
            rng.random_range(1..=1000),
            rng.random_range(-10.0..10.0),
        )
        .map_err(err)?;
        let (a, b) = (
            m.info().map_err(err)?,
            m.info_via_divergences().map_err(err)?,
        );
        compare(
            "normal",
            (a.prior_info, a.likelihood_info),
            (b.prior_info, b.likelihood_info),
        )?;
    }
    for _ in 0..1000 {
        let n = rng.random_range(1..=50u64);
        let total = rng.random_range(1..=10 * n);
        let m = PoissonGammaModel::new(
            rng.random_range(0.1..10.0),
            rng.random_range(0.1..10.0),
            n,
            total,
        )
        .map_err(err)?;
        let (a, b) = (
            m.info().map_err(err)?,
            m.info_via_divergences().map_err(err)?,
        );
        compare(
            "poisson",
            (a.prior_info, a.likelihood_info),
            (b.prior_info, b.likelihood_info),
        )?;
    }
    for _ in 0..1000 {
        let k = rng.random_range(2..=6);
        let alphas = (0..k).map(|_| rng.random_range(0.1..10.0)).collect();
        let counts = (0..k).map(|_| rng.random_range(0..30u64)).collect();
        let m = MultinomialDirichletModel::new(alphas, counts).map_err(err)?;
        let (a, b) = (m.info(), m.info_via_divergences());
        compare(
            "multinomial",
            (a.prior_info, a.likelihood_info),
            (b.prior_info, b.likelihood_info),
        )?;
    }
    Ok(format!("3000 instances, max scaled difference {worst:.1e}"))
}

fn c4_expected_prior_info() -> Outcome {
    let mut report = Vec::new();
    for (i, n) in [1u64, 10, 100].into_iter().enumerate() {
        let mut rng = RngStream::new(4, i as u64).rng();
        let marginal = NormalParams::new(0.0, 1.0 + 1.0 / n as f64).map_err(err)?;
        let us = (0..2000)
            .map(|_| {
                let ybar = sample_normal(&mut rng, &marginal);
                Ok(NormalNormalModel::new(0.0, 1.0, 1.0, n, ybar)?
                    .info()?
                    .prior_info)
            })
            .collect::<bayes_info::Result<Vec<f64>>>()
            .map_err(err)?;
        let mean = us.iter().sum::<f64>() / us.len() as f64;
        let var = us.iter().map(|u| (u - mean).powi(2)).sum::<f64>() / (us.len() - 1) as f64;
        let se = (var / us.len() as f64).sqrt();
        let target = 0.5 * ((n as f64 + 1.0) / n as f64).ln();
        let z = (mean - target) / se;
        if z.abs() > 3.0 {
            return Err(format!("n={n}: mean {mean:.7} vs {target:.7}, z = {z:.2}"));
        }
        report.push(format!("n={n} z={z:+.2}"));
    }
    Ok(report.join(", "))
}

fn random_probs<R: Rng>(rng: &mut R, k: usize, zero_chance: f64) -> Vec<f64> {
    let mut w: Vec<f64> = (0..k)
        .map(|_| {
            if rng.random::<f64>() < zero_chance {
                0.0
            } else {
                rng.random::<f64>() + 1e-3
            }
        })
        .collect();
    if w.iter().all(|x| *x == 0.0) {
        w[0] = 1.0;
    }
    let t: f64 = w.iter().sum();
    w.into_iter().map(|x| x / t).collect()
}

fn c5_mutual_information() -> Outcome {
    let mut rng = RngStream::new(5, 0).rng();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let m = rng.random_range(1..=5);
        let s = rng.random_range(1..=8);
        let prior = random_probs(&mut rng, m, 0.0);
        let rows = (0..m).map(|_| random_probs(&mut rng, s, 0.2)).collect();
        let model = FiniteModel::new(prior, rows).map_err(err)?;
        let d = (finite_avg_likelihood_info(&model) - mutual_information(&model.joint())).abs();
        worst = worst.max(d);
    }
    let channel =
        FiniteModel::new(vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.0, 1.0]]).map_err(err)?;
    let ln2 = finite_avg_likelihood_info(&channel);
    check(
        worst <= 1e-12 && (ln2 - std::f64::consts::LN_2).abs() <= 1e-12,
        format!("max |E[v] - I| {worst:.1e}, noiseless channel {ln2:.12}"),
        format!("max |E[v] - I| {worst:.3e}, noiseless channel {ln2}"),
    )
}

fn c6_invariance() -> Outcome {
    let instances = [
        (2.0, 1.0, 3, 6),
        (0.5, 0.5, 10, 4),
        (1.0, 2.0, 5, 12),
        (5.0, 1.0, 2, 3),
        (3.0, 0.3, 20, 45),
    ];
    let mut worst: f64 = 0.0;
    for (a, b, n, total) in instances {
        let m = PoissonGammaModel::new(a, b, n, total).map_err(err)?;
        let rate = grid_info_proper_prior(
            &poisson_gamma_grid(&m, RateScale::Rate, DEFAULT_RESOLUTION_1D).map_err(err)?,
        )
        .map_err(err)?;
        let log = grid_info_proper_prior(
            &poisson_gamma_grid(&m, RateScale::LogRate, DEFAULT_RESOLUTION_1D).map_err(err)?,
        )
        .map_err(err)?;
        worst = worst.max((rate.likelihood_info - log.likelihood_info).abs());
    }
    let m = PoissonGammaModel::new(2.0, 1.0, 3, 6).map_err(err)?;
    let u = |scale| -> Result<f64, String> {
        Ok(grid_info_proper_prior(
            &poisson_gamma_grid(&m, scale, DEFAULT_RESOLUTION_1D).map_err(err)?,
        )
        .map_err(err)?
        .prior_info)
    };
    let gap = (u(RateScale::Rate)? - u(RateScale::LogRate)?).abs();
    check(
        worst <= 1e-4 && gap > 1e-2,
        format!("v in λ vs ln λ max diff {worst:.1e}; u differs by {gap:.4} at (2,1,3,6)"),
        format!("v max diff {worst:.3e} (need <= 1e-4), u gap {gap:.4} (need > 1e-2)"),
    )
}

fn c7_decay() -> Outcome {
    let md = run_decay_study(&DecayStudy {
        family: DecayFamily::MultinomialDirichlet { alpha: 2.0, k: 4 },
        n_grid: vec![50, 100, 200, 400],
        replications: 50,
        seed: 7,
    })
    .map_err(err)?;
    let mut ratios = Vec::new();
    for row in &md.rows {
        let ratio = row.mean_prior_info / row.k_over_n.unwrap_or(f64::NAN);
        if !(0.5..=2.0).contains(&ratio) {
            return Err(format!("n={}: mean u / (K/n) = {ratio:.3}", row.n));
        }
        ratios.push(format!("{ratio:.2}"));
    }
    let finite = run_decay_study(&DecayStudy {
        family: DecayFamily::default_finite(),
        n_grid: vec![1000],
        replications: 50,
        seed: 7,
    })
    .map_err(err)?;
    let median = finite.rows[0].median_prior_info;
    check(
        median < 0.01,
        format!(
            "u/(K/n) = [{}]; finite median u at n=1000 = {median:.1e}",
            ratios.join(", ")
        ),
        format!("finite median u at n=1000 = {median} >= 0.01"),
    )
}

fn c8_estimator() -> Outcome {
    let cases = [
        (
            "normal",
            ConjugateCase::NormalNormal(
                NormalNormalModel::new(0.0, 1.0, 1.0, 10, 0.3).map_err(err)?,
            ),
        ),
        (
            "poisson",
            ConjugateCase::PoissonGamma(PoissonGammaModel::new(2.0, 1.0, 5, 12).map_err(err)?),
        ),
        (
            "multinomial",
            ConjugateCase::MultinomialDirichlet(
                MultinomialDirichletModel::new(vec![2.0; 4], vec![3, 0, 1, 2]).map_err(err)?,
            ),
        ),
    ];
    let mut report = Vec::new();
    for (name, case) in &cases {
        let truth = case.exact_prior_info().map_err(err)?;
        let covered = (0..100u64)
            .into_par_iter()
            .map(|seed| {
                let batch = case.posterior_batch(100_000, &mut RngStream::new(seed, 8).rng())?;
                let est = estimate_prior_info(&batch, DEFAULT_SPLIT_FRACTION)?;
                Ok(((est.value - truth).abs() <= 3.0 * est.std_error) as usize)
            })
            .collect::<bayes_info::Result<Vec<usize>>>()
            .map_err(err)?
            .into_iter()
            .sum::<usize>();
        if covered < 80 {
            return Err(format!("{name}: only {covered}/100 seeds within 3 SE"));
        }
        report.push(format!("{name} {covered}/100"));
    }

    let sweep = run_mc_validation(&McValidationConfig {
        family: ValidationFamily::default_multinomial(),
        n_samples: 200,
        replications: 10,
        control_samples: None,
        seed: 8,
    })
    .map_err(err)?;
    let truth: Vec<f64> = sweep.rows.iter().map(|r| r.truth).collect();
    let mean: Vec<f64> = sweep.rows.iter().map(|r| r.mean_estimate).collect();
    let rho = spearman(&truth, &mean);
    let noisiest = sweep
        .rows
        .iter()
        .max_by(|a, b| a.sd_estimate.total_cmp(&b.sd_estimate))
        .map(|r| r.hyperparameter);
    let smallest = sweep.rows.first().map(|r| r.hyperparameter);
    let small = &sweep.rows[0];
    check(
        rho >= 0.8 && noisiest == smallest,
        format!(
            "coverage {}; small-sample sweep ρ = {rho:.2}, α={} bias {:+.3}, sd {:.3}",
            report.join(", "),
            small.hyperparameter,
            small.mean_estimate - small.truth,
            small.sd_estimate
        ),
        format!(
            "small-sample sweep ρ = {rho:.2}, noisiest α {noisiest:?} vs smallest {smallest:?}"
        ),
    )
}

fn c9_bounds() -> Outcome {
    let mut rng = RngStream::new(9, 0).rng();
    for i in 0..20 {
        let coef: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| {
                (
                    rng.random_range(-2.0..2.0),
                    rng.random_range(0.5..8.0),
                    rng.random_range(0.0..6.3),
                )
            })
            .collect();
        let offset = rng.random_range(-3.0..3.0);
        let centre = rng.random_range(0.1..0.9);
        let width = rng.random_range(0.02..0.5);
        let prior_coef = coef.clone();
        // bounded, possibly improper, prior and a bounded bump likelihood
        let model = GridModel::new(
            vec![Axis::new(0.0, 1.0, 4096).map_err(err)?],
            move |t: &[f64]| {
                offset
                    + prior_coef
                        .iter()
                        .map(|(a, f, p)| a * (f * t[0] + p).sin())
                        .sum::<f64>()
            },
            move |t: &[f64]| -((t[0] - centre) / width).powi(2),
        )
        .map_err(err)?;
        let b = lemma_bounds(&model).map_err(err)?;
        if !(b.lower <= b.v && b.v <= b.upper) {
            return Err(format!("model {i}: {b:?}"));
        }
    }
    Ok("20 models, lower <= v <= upper in every case".into())
}

fn data_dir() -> PathBuf {
    std::env::var_os(DATA_DIR_ENV).map_or_else(
        || Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"),
        PathBuf::from,
    )
}

fn c10_experiments() -> Outcome {
    let dir = data_dir();
    for kind in [DatasetKind::Diabetes, DatasetKind::Prostate] {
        let path = dir.join(kind.file_name());
        if !path.is_file() {
            return Err(format!(
                "dataset file {} not found; run scripts/fetch_data.sh or set {DATA_DIR_ENV}",
                path.display()
            ));
        }
    }
    let config = |kind: DatasetKind, seed| {
        let mut c = ExperimentConfig::for_dataset(kind, seed);
        c.dataset_path = dir.join(kind.file_name());
        c
    };

    let diabetes = run_prediction_experiment(&config(DatasetKind::Diabetes, 1)).map_err(err)?;
    if let Some(row) = diabetes
        .rows
        .iter()
        .find(|r| !(0.15..=0.35).contains(&r.loss))
    {
        return Err(format!(
            "diabetes error {:.3} at σ²={} outside [0.15, 0.35]",
            row.loss, row.sigma2
        ));
    }
    let sigma2: Vec<f64> = diabetes.rows.iter().map(|r| r.sigma2).collect();
    let u: Vec<f64> = diabetes.rows.iter().map(|r| r.prior_info).collect();
    let rho = spearman(&sigma2, &u);
    if rho >= -0.8 {
        return Err(format!("diabetes Spearman(σ², u) = {rho:.3}, need < -0.8"));
    }

    let runs = (0..10)
        .map(|seed| run_prediction_experiment(&config(DatasetKind::Prostate, seed)))
        .collect::<bayes_info::Result<Vec<_>>>()
        .map_err(err)?;
    let points = runs[0].rows.len();
    let medians: Vec<f64> = (0..points)
        .map(|i| {
            let mut losses: Vec<f64> = runs.iter().map(|r| r.rows[i].loss).collect();
            losses.sort_by(f64::total_cmp);
            0.5 * (losses[4] + losses[5])
        })
        .collect();
    let best = (0..points)
        .min_by(|&a, &b| medians[a].total_cmp(&medians[b]))
        .unwrap_or(0);
    if best == 0 || best + 1 == points {
        return Err(format!(
            "prostate median MSE minimum at the grid edge (σ²={})",
            runs[0].rows[best].sigma2
        ));
    }

    let mut at_reference = Vec::new();
    for kind in [DatasetKind::Diabetes, DatasetKind::Prostate] {
        let mut c = config(kind, 3);
        c.sigma2_grid = vec![c.reference_sigma2];
        let row = run_prediction_experiment(&c).map_err(err)?.rows[0].clone();
        if row.prior_info.abs() > 3.0 * row.prior_info_se {
            return Err(format!(
                "{kind:?} at σ²={}: u = {} (se {})",
                row.sigma2, row.prior_info, row.prior_info_se
            ));
        }
        at_reference.push(format!("{kind:?} u={:+.1e}", row.prior_info));
    }
    Ok(format!(
        "diabetes ρ = {rho:.2}; prostate minimum at σ²={}; {}",
        runs[0].rows[best].sigma2,
        at_reference.join(", ")
    ))
}

fn write_synthetic_prostate(path: &Path) -> std::io::Result<()> {
    let mut rng = RngStream::new(11, 0).rng();
    let mut text = String::from("x1,x2,x3,x4,x5,x6,x7,x8,y\n");
    for _ in 0..97 {
        let x: Vec<f64> = (0..8).map(|_| rng.random_range(-2.0..2.0)).collect();
        let y = 0.8 * x[0] - 0.5 * x[3] + rng.random_range(-1.0..1.0);
        for v in &x {
            text.push_str(&format!("{v},"));
        }
        text.push_str(&format!("{y}\n"));
    }
    std::fs::write(path, text)
}

fn c11_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(err)?;
    let data = dir.path().join("prostate.csv");
    write_synthetic_prostate(&data).map_err(err)?;
    let data = data.to_string_lossy().into_owned();
    let commands: Vec<(&str, Vec<&str>)> = vec![
        (
            "conjugate",
            vec![
                "conjugate",
                "--family",
                "multinomial-dirichlet",
                "--alpha",
                "1,1,1,1",
                "--counts",
                "3,0,1,2",
            ],
        ),
        (
            "bivbin",
            vec![
                "bivbin",
                "--m",
                "30",
                "--r",
                "29",
                "--s",
                "2",
                "--prior",
                "jeffreys",
                "--resolution",
                "256",
            ],
        ),
        (
            "experiment",
            vec![
                "experiment",
                "--dataset",
                "prostate",
                "--data",
                &data,
                "--sigma2",
                "0.1,1,10",
                "--mc-draws",
                "300",
                "--predictive-draws",
                "50",
                "--linear-sampler",
                "ess",
                "--burn-in",
                "100",
            ],
        ),
        (
            "decay",
            vec![
                "decay",
                "--family",
                "poisson-gamma",
                "--n-grid",
                "5,50",
                "--replications",
                "8",
            ],
        ),
        (
            "validate-mc",
            vec![
                "validate-mc",
                "--family",
                "multinomial-dirichlet",
                "--n-samples",
                "500",
                "--replications",
                "4",
            ],
        ),
    ];
    let mut checked = 0;
    for (name, args) in &commands {
        for ext in ["json", "csv"] {
            let mut outputs = Vec::new();
            for (run, threads) in ["1", "4"].iter().enumerate() {
                let out = dir.path().join(format!("{name}-{run}.{ext}"));
                let status = Command::new(env!("CARGO_BIN_EXE_bayes-info"))
                    .args(args)
                    .args(["--seed", "17", "--out"])
                    .arg(&out)
                    .env("RAYON_NUM_THREADS", threads)
                    .output()
                    .map_err(err)?;
                if !status.status.success() {
                    return Err(format!(
                        "{name} failed: {}",
                        String::from_utf8_lossy(&status.stderr).trim()
                    ));
                }
                outputs.push(std::fs::read(&out).map_err(err)?);
            }
            if outputs[0] != outputs[1] {
                return Err(format!("{name} {ext} output differs between runs"));
            }
            checked += 1;
        }
    }
    Ok(format!(
        "{checked} command/format pairs byte-identical across reruns and thread counts"
    ))
}

type Criterion = (usize, &'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 11] = [
        (
            1,
            "bivariate binomial likelihood information",
            60,
            c1_bivariate_binomial,
        ),
        (
            2,
            "closed-form KL vs quadrature",
            10,
            c2_closed_form_vs_quadrature,
        ),
        (
            3,
            "u and v formulas vs KL compositions",
            10,
            c3_formula_cross_check,
        ),
        (4, "expected prior information", 60, c4_expected_prior_info),
        (5, "mutual-information identity", 5, c5_mutual_information),
        (6, "reparameterization invariance", 30, c6_invariance),
        (7, "decay of prior information", 120, c7_decay),
        (8, "Monte Carlo estimator", 120, c8_estimator),
        (9, "bounds on likelihood information", 10, c9_bounds),
        (10, "regression experiments", 900, c10_experiments),
        (11, "CLI determinism", 600, c11_determinism),
    ];
    let mut failed = 0;
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(budget) => Err(format!(
                "{detail}; took {:.1}s, budget {budget}s",
                elapsed.as_secs_f64()
            )),
            other => other,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS [{id:>2}] {title} ({secs:.1}s): {detail}"),
            Err(reason) => {
                failed += 1;
                println!("FAIL [{id:>2}] {title} ({secs:.1}s): {reason}");
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
