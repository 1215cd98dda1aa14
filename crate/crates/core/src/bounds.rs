//! Closed-form error bounds for RPA decoding over BSC(p), evaluated in log2
//! domain so that prefactors such as `32 N^(r+1)` never overflow.
//!
//! Noise-level maps use `expm1`/`ln_1p`/`atanh` forms: the bias
//! `(1 - 2p)^(2^j)` is carried directly, and `ln((1 - q)/q)` for
//! `q = (1 - b)/2` is evaluated as `2 atanh(b)`, which stays accurate as
//! `q -> 1/2`.

use std::f64::consts::{LN_2, LOG2_E};

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::subspace::gaussian_binomial;

/// Crossover probability strictly inside (0, 1/2).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ChannelParam(f64);

impl ChannelParam {
    pub fn new(p: f64) -> Result<ChannelParam> {
        if p > 0.0 && p < 0.5 {
            Ok(ChannelParam(p))
        } else {
            Err(Error::OutOfRange {
                name: "p",
                value: p,
                domain: "(0, 0.5)",
            })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// log2 of a bound. A value at or above zero makes the bound vacuous.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogBound {
    pub log2_value: f64,
    pub vacuous: bool,
}

impl LogBound {
    pub fn new(log2_value: f64) -> LogBound {
        LogBound {
            log2_value,
            vacuous: log2_value >= 0.0,
        }
    }
}

fn check_open(name: &'static str, value: f64, lo: f64, hi: f64, domain: &'static str) -> Result<f64> {
    if value > lo && value < hi {
        Ok(value)
    } else {
        Err(Error::OutOfRange { name, value, domain })
    }
}

fn check_order(m: u32, r: u32) -> Result<()> {
    if r < 2 || r > m {
        return Err(Error::InvalidParams {
            m,
            r,
            reason: "bounds need 2 <= r <= m",
        });
    }
    Ok(())
}

fn check_window(epsilon: f64, edge: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < edge {
        Ok(())
    } else {
        Err(Error::OutsideValidityWindow { epsilon, edge })
    }
}

/// `ln` of the bias `(1 - 2p)^(2^j)`.
fn ln_bias(p: f64, j: u32) -> f64 {
    (j as f64).exp2() * (-2.0 * p).ln_1p()
}

/// `eta(alpha) = (1 - 4 alpha (1 - alpha)) / 2`.
pub fn eta(alpha: f64) -> Result<f64> {
    let a = check_open("alpha", alpha, 0.0, 0.5, "(0, 0.5)")?;
    let b = 1.0 - 2.0 * a;
    Ok(0.5 * b * b)
}

/// Noise level after `j` nested one-dimensional projections:
/// `(1 - (1 - 2p)^(2^j)) / 2`.
pub fn p_level(p: f64, j: u32) -> f64 {
    if (0.0..=0.5).contains(&p) {
        -0.5 * ln_bias(p, j).exp_m1()
    } else {
        0.5 * (1.0 - (1.0 - 2.0 * p).powf((j as f64).exp2()))
    }
}

/// `p_level(p, r - 2)`.
pub fn p_bar(p: f64, r: u32) -> Result<f64> {
    if r < 2 {
        return Err(Error::InvalidConfig(format!("p_bar needs r >= 2, got r={r}")));
    }
    let p = ChannelParam::new(p)?.get();
    Ok(p_level(p, r - 2))
}

/// `(1 - 2p) / 2`.
pub fn eta_bar(p: f64) -> Result<f64> {
    let p = check_open("p", p, 0.0, 0.5, "(0, 0.5)")?;
    Ok(0.5 * (1.0 - 2.0 * p))
}

/// Parity level of `2^k - 1` coordinates at projection depth `r - k - 1`.
pub fn p_hat(p: f64, r: u32, k: u32) -> Result<f64> {
    let p = ChannelParam::new(p)?.get();
    if k == 0 || r < k + 1 {
        return Err(Error::InvalidConfig(format!(
            "p_hat needs 1 <= k <= r-1, got r={r} k={k}"
        )));
    }
    let exponent = ((1u64 << k) - 1) as f64;
    Ok(-0.5 * (exponent * ln_bias(p, r - k - 1)).exp_m1())
}

/// `ln((1 - q)/q)` for `q = p_level(p, j)`.
fn log_odds_at_level(p: f64, j: u32) -> f64 {
    2.0 * ln_bias(p, j).exp().atanh()
}

/// Upper edge `eta(p_bar)` of the epsilon window shared by the RPA block-error bounds.
pub fn validity_edge(p: f64, r: u32) -> Result<f64> {
    p_bar(p, r)?;
    // eta(p_bar) = (1 - 2p)^(2^(r-1)) / 2
    Ok(0.5 * ln_bias(p, r - 1).exp())
}

/// `32 N^(r+1) exp(-2^(-r-1) N eps^2)` with one-dimensional subspaces.
pub fn bound_thm1(m: u32, r: u32, p: f64, epsilon: f64) -> Result<LogBound> {
    check_order(m, r)?;
    check_window(epsilon, validity_edge(p, r)?)?;
    let decay = (m as f64 - r as f64 - 1.0).exp2() * epsilon * epsilon * LOG2_E;
    Ok(LogBound::new(5.0 + (r as f64 + 1.0) * m as f64 - decay))
}

/// `64 N^3 n_{k,m}^((r-1)/k) exp(-ln((1-q)/q) 2^(-r-1-k) N eps^2)` with
/// `q = p_level(p, r - k - 1)`, for k-dimensional subspaces.
pub fn bound_thm2(m: u32, r: u32, k: u32, p: f64, epsilon: f64) -> Result<LogBound> {
    check_order(m, r)?;
    if k == 0 || !(r - 1).is_multiple_of(k) {
        return Err(Error::InvalidConfig(format!(
            "k={k} must divide r-1={}",
            r - 1
        )));
    }
    check_window(epsilon, validity_edge(p, r)?)?;
    let count = gaussian_binomial(m, k)?;
    let prefactor = 6.0 + 3.0 * m as f64 + ((r - 1) / k) as f64 * log2_big(&count);
    let decay = log_odds_at_level(p, r - k - 1)
        * (m as f64 - r as f64 - 1.0 - k as f64).exp2()
        * epsilon
        * epsilon
        * LOG2_E;
    Ok(LogBound::new(prefactor - decay))
}

/// Second-order codes after one iteration: `32 N^3 exp(-N eps^2 / 8)`.
pub fn bound_one_iter(m: u32, p: f64, epsilon: f64) -> Result<LogBound> {
    check_window(epsilon, eta(p)?)?;
    let decay = (m as f64 - 3.0).exp2() * epsilon * epsilon * LOG2_E;
    Ok(LogBound::new(5.0 + 3.0 * m as f64 - decay))
}

/// Second-order codes after two iterations: `256 N^2 exp(-N eps^2 / 8)`.
pub fn bound_two_iter(m: u32, p: f64, epsilon: f64) -> Result<LogBound> {
    check_window(epsilon, eta(p)?)?;
    let decay = (m as f64 - 3.0).exp2() * epsilon * epsilon * LOG2_E;
    Ok(LogBound::new(8.0 + 2.0 * m as f64 - decay))
}

/// Radius gap `gamma_m = (8 (5 + m (r + 1 + beta)) / (d log2 e))^(1/2^r)`,
/// `d = 2^(m-r)`.
pub fn gamma_radius(m: u32, r: u32, beta: f64) -> Result<f64> {
    check_order(m, r)?;
    check_open("beta", beta, 0.0, 1.0, "(0, 1)")?;
    let d = ((m - r) as f64).exp2();
    let base = 8.0 * (5.0 + m as f64 * (r as f64 + 1.0 + beta)) / (d * LOG2_E);
    Ok(base.powf((-(r as f64)).exp2()))
}

/// `(24 m / (d log2 e))^(1/2^r)`, a lower bound on [`gamma_radius`].
pub fn gamma_floor(m: u32, r: u32) -> Result<f64> {
    check_order(m, r)?;
    let d = ((m - r) as f64).exp2();
    Ok((24.0 * m as f64 / (d * LOG2_E)).powf((-(r as f64)).exp2()))
}

/// Errors correctable with high probability, `N/2 (1 - gamma_m - delta)`.
pub fn correctable_errors(m: u32, r: u32, beta: f64, delta: f64) -> Result<f64> {
    check_open("delta", delta, 0.0, 1.0, "(0, 1)")?;
    let gamma = gamma_radius(m, r, beta)?;
    Ok((m as f64 - 1.0).exp2() * (1.0 - gamma - delta))
}

/// `c(p) = ln 2 / ln(1/(1 - 2p))`.
pub fn rate_threshold_c(p: f64) -> Result<f64> {
    let p = ChannelParam::new(p)?.get();
    Ok(LN_2 / -(-2.0 * p).ln_1p())
}

/// Largest order with `r <= log2(c_bar m)`, if any.
pub fn max_order_for(m: u32, c_bar: f64) -> Option<u32> {
    let x = c_bar * m as f64;
    (x >= 1.0).then(|| x.log2().floor() as u32)
}

/// `rho_m(r, delta) = m (r + 1) - (delta log2 e / 8) 2^(m-r) (1-2p)^(2^r) + 5`.
pub fn rho_exponent(m: u32, r: u32, delta: f64, p: f64) -> Result<f64> {
    check_order(m, r)?;
    check_open("delta", delta, 0.0, 1.0, "(0, 1)")?;
    let p = ChannelParam::new(p)?.get();
    let decay = ((m - r) as f64 * LN_2 + ln_bias(p, r)).exp();
    Ok(m as f64 * (r as f64 + 1.0) - delta * LOG2_E / 8.0 * decay + 5.0)
}

/// `(m-r+2)(r-1) - (delta log2 e / 16) ln((1-p)/p) 2^m (1-2p)^(2^(r+1)) + 3m + 6`,
/// the exponent for `k = r - 1`.
pub fn rho_bar_exponent(m: u32, r: u32, delta: f64, p: f64) -> Result<f64> {
    check_order(m, r)?;
    check_open("delta", delta, 0.0, 1.0, "(0, 1)")?;
    let p = ChannelParam::new(p)?.get();
    let decay = log_odds_at_level(p, 0) * (m as f64 * LN_2 + ln_bias(p, r + 1)).exp();
    Ok((m - r + 2) as f64 * (r - 1) as f64 - delta * LOG2_E / 16.0 * decay
        + 3.0 * m as f64
        + 6.0)
}

/// log2 of an arbitrary-size integer, accurate to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 64 {
        return (x.iter_u64_digits().next().unwrap_or(0) as f64).log2();
    }
    let shift = bits - 64;
    let top: u64 = (x >> shift).try_into().expect("64 significant bits");
    (top as f64).log2() + shift as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundInput {
    pub m: u32,
    pub r: u32,
    pub k: u32,
    pub p: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub beta: f64,
}

/// Every closed-form quantity for one parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub input: BoundInput,
    pub eta_p: f64,
    pub eta_bar_p: f64,
    pub p_bar: f64,
    pub window_edge: f64,
    pub p_hat: f64,
    pub thm1: LogBound,
    pub thm2: LogBound,
    /// Second-order codes only.
    pub one_iter: Option<LogBound>,
    pub two_iter: Option<LogBound>,
    pub gamma: f64,
    pub gamma_floor: f64,
    pub correctable_errors: f64,
    pub c: f64,
    pub rho: f64,
    pub rho_bar: f64,
}

pub fn evaluate(input: BoundInput) -> Result<BoundReport> {
    let BoundInput {
        m,
        r,
        k,
        p,
        epsilon,
        delta,
        beta,
    } = input;
    let second_order = r == 2;
    Ok(BoundReport {
        input,
        eta_p: eta(p)?,
        eta_bar_p: eta_bar(p)?,
        p_bar: p_bar(p, r)?,
        window_edge: validity_edge(p, r)?,
        p_hat: p_hat(p, r, k)?,
        thm1: bound_thm1(m, r, p, epsilon)?,
        thm2: bound_thm2(m, r, k, p, epsilon)?,
        one_iter: second_order.then(|| bound_one_iter(m, p, epsilon)).transpose()?,
        two_iter: second_order.then(|| bound_two_iter(m, p, epsilon)).transpose()?,
        gamma: gamma_radius(m, r, beta)?,
        gamma_floor: gamma_floor(m, r)?,
        correctable_errors: correctable_errors(m, r, beta, delta)?,
        c: rate_threshold_c(p)?,
        rho: rho_exponent(m, r, delta, p)?,
        rho_bar: rho_bar_exponent(m, r, delta, p)?,
    })
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub m: u32,
    pub r: u32,
    pub k: u32,
    pub p: f64,
    pub epsilon: f64,
    pub log2_thm1: f64,
    pub log2_thm2: f64,
    pub gamma: f64,
    pub rho: f64,
    pub rho_bar: f64,
    pub vacuous_thm1: bool,
    pub vacuous_thm2: bool,
}

pub const SWEEP_HEADER: &str =
    "m,r,k,p,epsilon,log2_thm1,log2_thm2,gamma,rho,rho_bar,vacuous_thm1,vacuous_thm2";

/// Evaluates one sweep point with `epsilon = epsilon_frac * eta(p_bar)`.
pub fn sweep_row(
    m: u32,
    r: u32,
    k: u32,
    p: f64,
    epsilon_frac: f64,
    delta: f64,
    beta: f64,
) -> Result<SweepRow> {
    check_open("epsilon_frac", epsilon_frac, 0.0, 1.0, "(0, 1)")?;
    let epsilon = epsilon_frac * validity_edge(p, r)?;
    let thm1 = bound_thm1(m, r, p, epsilon)?;
    let thm2 = bound_thm2(m, r, k, p, epsilon)?;
    Ok(SweepRow {
        m,
        r,
        k,
        p,
        epsilon,
        log2_thm1: thm1.log2_value,
        log2_thm2: thm2.log2_value,
        gamma: gamma_radius(m, r, beta)?,
        rho: rho_exponent(m, r, delta, p)?,
        rho_bar: rho_bar_exponent(m, r, delta, p)?,
        vacuous_thm1: thm1.vacuous,
        vacuous_thm2: thm2.vacuous,
    })
}
