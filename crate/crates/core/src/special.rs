//! Log-gamma, digamma and stable log-space reductions.

// coefficient tables are copied at their published precision
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::scalar::Real;

// Lanczos coefficients for g = 671/128, 14 terms (Numerical Recipes, 3rd ed.).
const LANCZOS_G_SHIFT: f64 = 5.242_187_5;
const LANCZOS_SERIES_BASE: f64 = 0.999_999_999_999_997_092;
const LANCZOS_COEFFS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_TWO_PI: f64 = 2.506_628_274_631_000_5;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

// zeta(k) for k = 2..=32, used by the power series of ln Γ(1 + z).
const ZETA: [f64; 31] = [
    1.644_934_066_848_226_4,
    1.202_056_903_159_594_3,
    1.082_323_233_711_138_2,
    1.036_927_755_143_369_9,
    1.017_343_061_984_449_1,
    1.008_349_277_381_922_8,
    1.004_077_356_197_944_3,
    1.002_008_392_826_082_2,
    1.000_994_575_127_818_1,
    1.000_494_188_604_119_5,
    1.000_246_086_553_308_0,
    1.000_122_713_347_578_5,
    1.000_061_248_135_058_7,
    1.000_030_588_236_307_0,
    1.000_015_282_259_408_7,
    1.000_007_637_197_637_9,
    1.000_003_817_293_265_0,
    1.000_001_908_212_716_6,
    1.000_000_953_962_033_9,
    1.000_000_476_932_986_8,
    1.000_000_238_450_502_7,
    1.000_000_119_219_926_0,
    1.000_000_059_608_189_1,
    1.000_000_029_803_503_5,
    1.000_000_014_901_554_8,
    1.000_000_007_450_711_8,
    1.000_000_003_725_334_0,
    1.000_000_001_862_659_7,
    1.000_000_000_931_327_4,
    1.000_000_000_465_662_9,
    1.000_000_000_232_831_2,
];

/// Half-width of the windows around 1 and 2 where the power series replaces
/// the Lanczos sum (keeps relative accuracy near the zeros of ln Γ).
const SERIES_RADIUS: f64 = 0.25;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma<T: Real>(x: T) -> Result<T> {
    if x > T::zero() && x.is_finite() {
        Ok(ln_gamma_pos(x))
    } else {
        Err(Error::Domain {
            function: "ln_gamma",
            value: x.to_f64().unwrap_or(f64::NAN),
            requirement: "x > 0",
        })
    }
}

/// Digamma function ψ(x) = d/dx ln Γ(x) for `x > 0`.
pub fn digamma<T: Real>(x: T) -> Result<T> {
    if x > T::zero() && x.is_finite() {
        Ok(digamma_pos(x))
    } else {
        Err(Error::Domain {
            function: "digamma",
            value: x.to_f64().unwrap_or(f64::NAN),
            requirement: "x > 0",
        })
    }
}

/// Unchecked ln Γ. Callers guarantee `x > 0`.
pub(crate) fn ln_gamma_pos<T: Real>(x: T) -> T {
    let one = T::one();
    let two = T::lit(2.0);
    let r = T::lit(SERIES_RADIUS);
    if (x - one).abs() <= r {
        return ln_gamma_1p_series(x - one);
    }
    if (x - two).abs() <= r {
        let z = x - two;
        return ln_gamma_1p_series(z) + z.ln_1p();
    }
    if x < T::lit(0.5) {
        // Reflection: Γ(x) Γ(1 - x) = π / sin(πx).
        let pi = T::PI();
        return (pi / (pi * x).sin()).ln() - lanczos_ln_gamma(one - x);
    }
    lanczos_ln_gamma(x)
}

fn lanczos_ln_gamma<T: Real>(x: T) -> T {
    let half = T::lit(0.5);
    let shifted = x + T::lit(LANCZOS_G_SHIFT);
    let head = (x + half) * shifted.ln() - shifted;
    let mut series = T::lit(LANCZOS_SERIES_BASE);
    let mut denom = x;
    for &c in LANCZOS_COEFFS.iter() {
        denom = denom + T::one();
        series = series + T::lit(c) / denom;
    }
    head + (T::lit(SQRT_TWO_PI) * series / x).ln()
}

/// ln Γ(1 + z) = -γz + Σ_{k≥2} (-1)^k ζ(k) z^k / k, for |z| ≤ 1/4.
fn ln_gamma_1p_series<T: Real>(z: T) -> T {
    let mut acc = T::zero();
    // power tracks (-1)^k z^k
    let mut power = -z;
    for (i, &zeta) in ZETA.iter().enumerate() {
        let k = i + 2;
        power = -power * z;
        acc = acc + T::lit(zeta) * power / T::lit(k as f64);
    }
    acc - T::lit(EULER_GAMMA) * z
}

pub(crate) fn digamma_pos<T: Real>(mut x: T) -> T {
    let mut shift = T::zero();
    let six = T::lit(6.0);
    while x < six {
        shift = shift + x.recip();
        x = x + T::one();
    }
    let inv = x.recip();
    let inv2 = inv * inv;
    // Bernoulli-number tail: B_{2k} / (2k x^{2k}).
    let tail = inv2
        * (T::lit(1.0 / 12.0)
            - inv2
                * (T::lit(1.0 / 120.0)
                    - inv2
                        * (T::lit(1.0 / 252.0)
                            - inv2
                                * (T::lit(1.0 / 240.0)
                                    - inv2
                                        * (T::lit(1.0 / 132.0)
                                            - inv2
                                                * (T::lit(691.0 / 32760.0)
                                                    - inv2 * T::lit(1.0 / 12.0)))))));
    x.ln() - T::lit(0.5) * inv - tail - shift
}

/// `ln Σ exp(x_i)` without overflow.
///
/// Entries equal to `-∞` contribute nothing; an all `-∞` input returns `-∞`.
pub fn log_sum_exp<T: Real>(xs: &[T]) -> Result<T> {
    let max = xs
        .iter()
        .copied()
        .reduce(T::max)
        .ok_or(Error::Empty("log_sum_exp"))?;
    if max == T::neg_infinity() || max == T::infinity() || max.is_nan() {
        return Ok(max);
    }
    let sum = xs.iter().fold(T::zero(), |acc, &x| acc + (x - max).exp());
    Ok(max + sum.ln())
}

/// `ln( (1/n) Σ exp(x_i) )`.
pub fn log_mean_exp<T: Real>(xs: &[T]) -> Result<T> {
    let lse = log_sum_exp(xs)?;
    Ok(lse - T::from_usize(xs.len()).unwrap().ln())
}

/// ln of the multivariate beta function, Σ ln Γ(a_i) - ln Γ(Σ a_i).
pub(crate) fn ln_multi_beta<T: Real>(alphas: &[T]) -> T {
    let total = alphas.iter().fold(T::zero(), |acc, &a| acc + a);
    alphas
        .iter()
        .fold(T::zero(), |acc, &a| acc + ln_gamma_pos(a))
        - ln_gamma_pos(total)
}
