//! Closed-form quantities for the uniform random-weight model.
//!
//! Averaging the partition function over i.i.d. `U[0,1]` weights factorizes
//! edge by edge: every tour contributes `((1 - e^-b) / b)^n`. Its log
//! derivatives give the annealed mean and variance, which bound the quenched
//! ones. The annealed tour-length law is the Irwin-Hall density tilted by
//! `e^{-b j}`, which is also the law of a sum of `n` truncated exponentials.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neighborhood::move_count;
use crate::rng::seeded_rng;

/// Largest `n` for which the alternating-sum Irwin-Hall formulas are used.
pub const IRWIN_HALL_MAX_N: usize = 15;

/// Absolute tolerance of the quadrature behind [`annealed_cdf`].
pub const QUADRATURE_TOL: f64 = 1e-10;

fn check_beta_nonneg(beta: f64) -> Result<()> {
    if beta >= 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("beta = {beta} must be finite and >= 0")))
    }
}

fn check_beta_pos(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("beta = {beta} must be finite and > 0")))
    }
}

/// `(1 - e^-b) / b`, equal to 1 at `b = 0`.
pub fn per_edge_factor(beta: f64) -> f64 {
    if beta == 0.0 {
        1.0
    } else {
        -(-beta).exp_m1() / beta
    }
}

/// `ln((n-1)!/2)`, the log of the number of distinct tours.
pub fn ln_state_count(n: usize) -> f64 {
    assert!(n >= 3);
    (2..n).map(|k| (k as f64).ln()).sum::<f64>() - std::f64::consts::LN_2
}

/// `(n-1)!/2`. Exact as long as it fits in the f64 mantissa (`n <= 19`).
pub fn state_count(n: usize) -> f64 {
    assert!(n >= 3);
    (2..n).map(|k| k as f64).product::<f64>() / 2.0
}

/// `ln E Z(b) = ln((n-1)!/2) + n ln((1 - e^-b)/b)`.
pub fn ln_expected_partition_function(n: usize, beta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::out_of_range("n", n, ">= 3"));
    }
    check_beta_nonneg(beta)?;
    Ok(ln_state_count(n) + n as f64 * per_edge_factor(beta).ln())
}

/// `E Z(b) = (n-1)!/2 * ((1 - e^-b)/b)^n`. Use the log variant for large `n`.
pub fn expected_partition_function(n: usize, beta: f64) -> Result<f64> {
    let ln = ln_expected_partition_function(n, beta)?;
    if n <= 20 {
        return Ok(state_count(n) * per_edge_factor(beta).powi(n as i32));
    }
    let z = ln.exp();
    if z.is_finite() {
        Ok(z)
    } else {
        Err(Error::Numerical(format!("E Z overflows for n = {n}; use the log variant")))
    }
}

/// Lower bound on the quenched mean tour length: `n (1/b - 1/(e^b - 1))`.
/// This is also exactly the annealed mean.
pub fn cost_lower_bound(n: usize, beta: f64) -> Result<f64> {
    check_beta_pos(beta)?;
    Ok(n as f64 * (1.0 / beta - 1.0 / beta.exp_m1()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceBounds {
    /// `n (1/b^2 - 1/(e^b - 1) - 1/(e^b - 1)^2)`
    pub tight: f64,
    /// `n / b^2`
    pub loose: f64,
}

pub fn variance_upper_bound(n: usize, beta: f64) -> Result<VarianceBounds> {
    check_beta_pos(beta)?;
    let nf = n as f64;
    let inv = 1.0 / beta.exp_m1();
    let loose = nf / (beta * beta);
    Ok(VarianceBounds { tight: loose - nf * (inv + inv * inv), loose })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub n: usize,
    pub beta: f64,
    pub expected_cost_lower: f64,
    pub variance_upper_loose: f64,
    pub variance_upper_tight: f64,
    pub log_expected_partition: f64,
}

/// All equilibrium bounds at a fixed inverse temperature.
pub fn bound_report(n: usize, beta: f64) -> Result<BoundReport> {
    let var = variance_upper_bound(n, beta)?;
    Ok(BoundReport {
        n,
        beta,
        expected_cost_lower: cost_lower_bound(n, beta)?,
        variance_upper_loose: var.loose,
        variance_upper_tight: var.tight,
        log_expected_partition: ln_expected_partition_function(n, beta)?,
    })
}

/// Bounds at iteration `t` of the logarithmic schedule, with inverse
/// temperature `ln(t + 2) / a`. `t` may be fractional.
pub fn schedule_bounds(n: usize, a: f64, t: f64) -> Result<BoundReport> {
    if !(t >= 1.0) || !(a > 0.0) {
        return Err(Error::invalid(format!("need t >= 1 and a > 0, got t = {t}, a = {a}")));
    }
    let log_t = (t + 2.0).ln();
    let beta = log_t / a;
    let nf = n as f64;
    // (t+2)^{1/a} - 1 == expm1(beta)
    let expected_cost_lower = nf * (a / log_t - 1.0 / beta.exp_m1());
    let var = variance_upper_bound(n, beta)?;
    Ok(BoundReport {
        n,
        beta,
        expected_cost_lower,
        variance_upper_loose: a * a * nf / (log_t * log_t),
        variance_upper_tight: var.tight,
        log_expected_partition: ln_expected_partition_function(n, beta)?,
    })
}

/// Number of states, either directly or as its natural log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum StateCount {
    Exact(f64),
    Ln(f64),
}

impl StateCount {
    pub fn ln(self) -> f64 {
        match self {
            StateCount::Exact(s) => s.ln(),
            StateCount::Ln(l) => l,
        }
    }
}

/// `128 d^2 D^4 t^2 ln(|S| t / eps)`.
pub fn mixing_time_bound(
    degree: u64,
    diameter: u64,
    t: f64,
    states: StateCount,
    epsilon: f64,
) -> Result<f64> {
    if degree == 0 || diameter == 0 || !(t >= 1.0) {
        return Err(Error::invalid("degree, diameter and t must be >= 1"));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::out_of_range("epsilon", epsilon, "(0, 1)"));
    }
    let (d, dd) = (degree as f64, diameter as f64);
    let log_term = states.ln() + t.ln() - epsilon.ln();
    Ok(128.0 * d * d * dd.powi(4) * t * t * log_term)
}

/// [`mixing_time_bound`] for the 2-opt state graph on `n` nodes:
/// `d = n(n-3)/2`, `D = n - 1`, `|S| = (n-1)!/2`.
pub fn two_opt_mixing_time_bound(n: usize, t: f64, epsilon: f64) -> Result<f64> {
    if n < 4 {
        return Err(Error::out_of_range("n", n, ">= 4"));
    }
    mixing_time_bound(move_count(n) as u64, (n - 1) as u64, t, StateCount::Ln(ln_state_count(n)), epsilon)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn factorial(n: usize) -> f64 {
    (2..=n).map(|k| k as f64).product()
}

/// Law of the sum of `n` independent `U[0,1]` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IrwinHall {
    n: usize,
}

impl IrwinHall {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || n > IRWIN_HALL_MAX_N {
            return Err(Error::out_of_range(
                "Irwin-Hall n",
                n,
                format!("[1, {IRWIN_HALL_MAX_N}]; sample instead for larger n"),
            ));
        }
        Ok(IrwinHall { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let n = self.n;
        let nf = n as f64;
        if !(x > 0.0 && x < nf) {
            return if n == 1 && (x == 0.0 || x == 1.0) { 1.0 } else { 0.0 };
        }
        if n == 1 {
            return 1.0;
        }
        let x = x.min(nf - x);
        let mut sum = 0.0;
        for k in 0..=(x.floor() as usize) {
            let term = binomial(n, k) * (x - k as f64).powi(n as i32 - 1);
            sum += if k % 2 == 0 { term } else { -term };
        }
        (sum / factorial(n - 1)).max(0.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let nf = self.n as f64;
        if x <= 0.0 {
            return 0.0;
        }
        if x >= nf {
            return 1.0;
        }
        if x > nf / 2.0 {
            return 1.0 - self.lower_cdf(nf - x);
        }
        self.lower_cdf(x)
    }

    fn lower_cdf(&self, x: f64) -> f64 {
        let n = self.n;
        let mut sum = 0.0;
        for k in 0..=(x.floor() as usize) {
            let term = binomial(n, k) * (x - k as f64).powi(n as i32);
            sum += if k % 2 == 0 { term } else { -term };
        }
        (sum / factorial(n)).clamp(0.0, 1.0)
    }
}

pub fn irwin_hall_pdf(n: usize, j: f64) -> Result<f64> {
    Ok(IrwinHall::new(n)?.pdf(j))
}

pub fn irwin_hall_cdf(n: usize, j: f64) -> Result<f64> {
    Ok(IrwinHall::new(n)?.cdf(j))
}

/// Adaptive Simpson quadrature of `f` over `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> Result<f64> {
    const MAX_DEPTH: u32 = 48;
    if b <= a {
        return Ok(0.0);
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let err = left + right - whole;
    if err.abs() <= 15.0 * tol {
        return Ok(left + right + err / 15.0);
    }
    if depth == 0 {
        return Err(Error::Numerical(format!(
            "adaptive Simpson did not reach tolerance {tol:e} on [{a}, {b}] (error estimate {err:e})"
        )));
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

/// Density of the annealed tour-length law, `e^{-b j} rho(j) / ((1 - e^-b)/b)^n`.
pub fn annealed_pdf(n: usize, beta: f64, j: f64) -> Result<f64> {
    check_beta_nonneg(beta)?;
    let ih = IrwinHall::new(n)?;
    Ok(tilted_density(&ih, beta, j))
}

fn tilted_density(ih: &IrwinHall, beta: f64, j: f64) -> f64 {
    let norm_ln = ih.n() as f64 * per_edge_factor(beta).ln();
    ih.pdf(j) * (-beta * j - norm_ln).exp()
}

/// Integral of the normalized annealed density over `[lo, hi]`, split at the
/// integer knots where the Irwin-Hall density changes polynomial piece.
fn tilted_mass(ih: &IrwinHall, beta: f64, lo: f64, hi: f64) -> Result<f64> {
    let f = |s: f64| tilted_density(ih, beta, s);
    let width = hi - lo;
    if width <= 0.0 {
        return Ok(0.0);
    }
    let mut knots = vec![lo];
    knots.extend(
        (lo.floor() as i64 + 1..=hi.ceil() as i64 - 1).map(|k| k as f64).filter(|&k| k > lo && k < hi),
    );
    knots.push(hi);
    let mut total = 0.0;
    for w in knots.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], QUADRATURE_TOL * (w[1] - w[0]) / width)?;
    }
    Ok(total)
}

/// Integral of the normalized annealed density over `[0, n]`; equals 1 when
/// the closed-form normalization is right.
pub fn annealed_total_mass(n: usize, beta: f64) -> Result<f64> {
    check_beta_nonneg(beta)?;
    let ih = IrwinHall::new(n)?;
    tilted_mass(&ih, beta, 0.0, n as f64)
}

/// CDF of the annealed tour-length law at `j`.
pub fn annealed_cdf(n: usize, beta: f64, j: f64) -> Result<f64> {
    check_beta_nonneg(beta)?;
    let ih = IrwinHall::new(n)?;
    let nf = n as f64;
    if beta == 0.0 {
        return Ok(ih.cdf(j));
    }
    if j <= 0.0 {
        return Ok(0.0);
    }
    if j >= nf {
        return Ok(1.0);
    }
    let value =
        if j <= nf / 2.0 { tilted_mass(&ih, beta, 0.0, j)? } else { 1.0 - tilted_mass(&ih, beta, j, nf)? };
    Ok(value.clamp(0.0, 1.0))
}

/// Inverse CDF of the density `b e^{-b w} / (1 - e^-b)` on `[0, 1]`.
pub fn truncated_exp_inverse_cdf(beta: f64, u: f64) -> f64 {
    if beta == 0.0 {
        return u;
    }
    // -ln(1 - u (1 - e^-b)) / b; for u >= 1/2 the argument is formed as
    // (1 - u) + u e^-b so that u = 1 maps to exactly 1 even when e^-b underflows
    let x = u * (-beta).exp_m1();
    if x > -0.5 {
        -x.ln_1p() / beta
    } else {
        -((1.0 - u) + u * (-beta).exp()).ln() / beta
    }
}

/// Exact i.i.d. draws from the annealed law: sums of `n` truncated exponentials.
pub fn annealed_exact_sample(n: usize, beta: f64, count: usize, seed: u64) -> Result<Vec<f64>> {
    check_beta_nonneg(beta)?;
    if n == 0 || count == 0 {
        return Err(Error::invalid("n and count must be >= 1"));
    }
    let mut rng = seeded_rng(seed);
    Ok((0..count)
        .map(|_| (0..n).map(|_| truncated_exp_inverse_cdf(beta, rng.random::<f64>())).sum())
        .collect())
}
