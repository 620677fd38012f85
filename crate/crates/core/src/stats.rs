//! Empirical CDFs, DKW confidence bands and the one-sided dominance gap.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default simultaneous confidence level parameter for DKW bands.
pub const DEFAULT_DELTA: f64 = 0.01;

/// Right-continuous step function `F(j) = #{samples <= j} / count`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(samples: &[f64]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::invalid("empirical CDF needs at least one sample"));
        }
        if samples.iter().any(|x| x.is_nan()) {
            return Err(Error::invalid("NaN sample"));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(EmpiricalCdf { sorted })
    }

    pub fn count(&self) -> usize {
        self.sorted.len()
    }

    pub fn sorted_samples(&self) -> &[f64] {
        &self.sorted
    }

    pub fn eval(&self, j: f64) -> f64 {
        self.sorted.partition_point(|&x| x <= j) as f64 / self.count() as f64
    }

    /// Distinct sample values with the CDF value at each.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.count() as f64;
        let mut out: Vec<(f64, f64)> = Vec::new();
        for (i, &x) in self.sorted.iter().enumerate() {
            match out.last_mut() {
                Some(last) if last.0 == x => last.1 = (i + 1) as f64 / n,
                _ => out.push((x, (i + 1) as f64 / n)),
            }
        }
        out
    }

    /// One-sample Kolmogorov distance `sup_j |F(j) - G(j)|` to a continuous CDF `G`.
    pub fn sup_distance_to<G: Fn(f64) -> f64>(&self, cdf: G) -> f64 {
        let mut before = 0.0;
        let mut worst: f64 = 0.0;
        for (x, after) in self.steps() {
            let g = cdf(x);
            worst = worst.max((g - before).abs()).max((after - g).abs());
            before = after;
        }
        worst
    }

    /// CSV with header `j,F`, one row per distinct sample value.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "j,F")?;
        for (x, f) in self.steps() {
            writeln!(out, "{x},{f}")?;
        }
        Ok(())
    }
}

pub fn ecdf(samples: &[f64]) -> Result<EmpiricalCdf> {
    EmpiricalCdf::new(samples)
}

/// DKW half-width `sqrt(ln(2/delta) / (2 count))`.
pub fn dkw_epsilon(count: usize, delta: f64) -> Result<f64> {
    if count == 0 {
        return Err(Error::invalid("count must be >= 1"));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::out_of_range("delta", delta, "(0, 1)"));
    }
    Ok(((2.0 / delta).ln() / (2.0 * count as f64)).sqrt())
}

/// Walks the merged jump points of two ECDFs, calling `visit(j, Fa(j), Fb(j))`.
fn merged_jumps(a: &EmpiricalCdf, b: &EmpiricalCdf, mut visit: impl FnMut(f64, f64, f64)) {
    let (xa, xb) = (&a.sorted, &b.sorted);
    let (na, nb) = (xa.len() as f64, xb.len() as f64);
    let (mut i, mut k) = (0, 0);
    while i < xa.len() || k < xb.len() {
        let j = match (xa.get(i), xb.get(k)) {
            (Some(&p), Some(&q)) => p.min(q),
            (Some(&p), None) => p,
            (None, Some(&q)) => q,
            (None, None) => unreachable!(),
        };
        while i < xa.len() && xa[i] <= j {
            i += 1;
        }
        while k < xb.len() && xb[k] <= j {
            k += 1;
        }
        visit(j, i as f64 / na, k as f64 / nb);
    }
}

/// `sup_j (Fq(j) - Fa(j))` over the pooled jump points below the largest
/// pooled sample (where both CDFs trivially equal 1).
///
/// Stochastic dominance of the quenched law over the annealed one means
/// `Fq <= Fa` everywhere, so the gap should be nonpositive up to noise. When
/// only one distinct value is pooled, the gap is 0.
pub fn dominance_gap(fq: &EmpiricalCdf, fa: &EmpiricalCdf) -> f64 {
    let top = fq.sorted.last().unwrap().max(*fa.sorted.last().unwrap());
    let mut gap = f64::NEG_INFINITY;
    merged_jumps(fq, fa, |j, q, a| {
        if j < top {
            gap = gap.max(q - a);
        }
    });
    if gap == f64::NEG_INFINITY {
        0.0
    } else {
        gap
    }
}

/// Two-sample Kolmogorov-Smirnov distance over the pooled jump points.
pub fn ks_distance(a: &EmpiricalCdf, b: &EmpiricalCdf) -> f64 {
    let mut d: f64 = 0.0;
    merged_jumps(a, b, |_, fa, fb| d = d.max((fa - fb).abs()));
    d
}

/// Result of the band-certified dominance check `gap <= eps_q + eps_a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceReport {
    pub gap: f64,
    pub band_quenched: f64,
    pub band_annealed: f64,
    pub threshold: f64,
    pub pass: bool,
    pub count_quenched: usize,
    pub count_annealed: usize,
    pub delta: f64,
    /// The pass rule is our own formalization of the visual ordering.
    pub criterion: String,
}

pub fn dominance_report(fq: &EmpiricalCdf, fa: &EmpiricalCdf, delta: f64) -> Result<DominanceReport> {
    let band_quenched = dkw_epsilon(fq.count(), delta)?;
    let band_annealed = dkw_epsilon(fa.count(), delta)?;
    let gap = dominance_gap(fq, fa);
    let threshold = band_quenched + band_annealed;
    Ok(DominanceReport {
        gap,
        band_quenched,
        band_annealed,
        threshold,
        pass: gap <= threshold,
        count_quenched: fq.count(),
        count_annealed: fa.count(),
        delta,
        criterion: "sup_j (F_q - F_a) <= DKW(n_q, delta) + DKW(n_a, delta)".to_string(),
    })
}
