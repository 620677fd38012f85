//! Exact ground truth for small `n` by exhaustive enumeration of tours.
//!
//! Everything here is dense and brute force: Gibbs measures over all
//! `(n-1)!/2` tours, full transition matrices of the fixed-temperature
//! Metropolis chain, their spectra, bottleneck ratios by subset enumeration,
//! and distribution evolution by repeated sparse matrix-vector products.

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{edge_count, Instance, Tour, WeightModel};
use crate::neighborhood::{move_count, StateGraph};
use crate::rng::derive_seed;

/// Largest `n` for which tours are enumerated.
pub const ORACLE_MAX_N: usize = 8;
/// Largest state count for which transition matrices and spectra are built.
pub const CHAIN_MAX_STATES: usize = 360;
/// Largest state count for exhaustive bottleneck enumeration (`2^24` subsets).
pub const BOTTLENECK_MAX_STATES: usize = 24;
/// Step cap for [`exact_mixing_time`].
pub const MIXING_STEP_CAP: u64 = 1_000_000_000;

fn check_n(n: usize, lo: usize, hi: usize) -> Result<()> {
    if n < lo || n > hi {
        Err(Error::out_of_range("n", n, format!("[{lo}, {hi}]")))
    } else {
        Ok(())
    }
}

/// All canonical tours of `K_n` in lexicographic order.
pub fn enumerate_tours(n: usize) -> Result<Vec<Tour>> {
    check_n(n, 3, ORACLE_MAX_N)?;
    Ok(Tour::enumerate(n))
}

/// Every tour of `K_n` as a list of edge indices, for fast repeated evaluation.
#[derive(Debug, Clone)]
pub struct TourTable {
    n: usize,
    tours: Vec<Tour>,
    edges: Vec<usize>,
}

impl TourTable {
    pub fn new(n: usize) -> Result<Self> {
        let tours = enumerate_tours(n)?;
        let edges = tours.iter().flat_map(|t| t.edge_indices()).collect();
        Ok(TourTable { n, tours, edges })
    }

    pub fn tours(&self) -> &[Tour] {
        &self.tours
    }

    pub fn len(&self) -> usize {
        self.tours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tours.is_empty()
    }

    /// Tour lengths under a lexicographic weight vector.
    pub fn lengths(&self, weights: &[f64]) -> Vec<f64> {
        assert_eq!(weights.len(), edge_count(self.n));
        self.edges.chunks_exact(self.n).map(|es| es.iter().map(|&e| weights[e]).sum()).collect()
    }
}

/// `ln sum_x exp(-beta J(x))`, evaluated stably around the shortest tour.
pub fn ln_partition_from_lengths(lengths: &[f64], beta: f64) -> f64 {
    let jmin = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let s: f64 = lengths.iter().map(|&j| (-beta * (j - jmin)).exp()).sum();
    s.ln() - beta * jmin
}

/// `Z(beta | w) = sum_x exp(-beta J(x | w))` over all tours.
pub fn exact_partition(inst: &Instance, beta: f64) -> Result<f64> {
    let table = TourTable::new(inst.n())?;
    Ok(table.lengths(inst.weights()).iter().map(|&j| (-beta * j).exp()).sum())
}

pub fn ln_exact_partition(inst: &Instance, beta: f64) -> Result<f64> {
    let table = TourTable::new(inst.n())?;
    Ok(ln_partition_from_lengths(&table.lengths(inst.weights()), beta))
}

/// Gibbs weights, mean and variance of `J` from a list of tour lengths.
fn gibbs_moments(lengths: &[f64], beta: f64) -> (Vec<f64>, f64, f64) {
    let jmin = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    let mut p: Vec<f64> = lengths.iter().map(|&j| (-beta * (j - jmin)).exp()).collect();
    let z: f64 = p.iter().sum();
    p.iter_mut().for_each(|v| *v /= z);
    let mean: f64 = p.iter().zip(lengths).map(|(p, j)| p * j).sum();
    let var: f64 = p.iter().zip(lengths).map(|(p, j)| p * (j - mean) * (j - mean)).sum();
    (p, mean, var)
}

/// The exact Gibbs measure `pi_beta(x | w)` over all tours of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GibbsDistribution {
    pub beta: f64,
    pub tours: Vec<Tour>,
    pub lengths: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub mean: f64,
    pub variance: f64,
}

impl GibbsDistribution {
    pub fn probability_of(&self, tour: &Tour) -> Option<f64> {
        self.tours.iter().position(|t| t == tour).map(|k| self.probabilities[k])
    }
}

pub fn exact_gibbs_stats(inst: &Instance, beta: f64) -> Result<GibbsDistribution> {
    let table = TourTable::new(inst.n())?;
    let lengths = table.lengths(inst.weights());
    let (probabilities, mean, variance) = gibbs_moments(&lengths, beta);
    Ok(GibbsDistribution { beta, tours: table.tours, lengths, probabilities, mean, variance })
}

/// Monte Carlo estimate of `E_w Z(beta | w)` over uniform weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionEstimate {
    pub n: usize,
    pub beta: f64,
    pub draws: usize,
    pub estimate: f64,
    pub std_error: f64,
    /// Sample mean of `ln Z`; Jensen requires it to be at most `ln(estimate)`.
    pub mean_ln_z: f64,
    pub ln_estimate: f64,
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Draws `draws` uniform instances (instance `i` seeded by `derive_seed(seed, i)`)
/// and averages the exactly enumerated partition function.
pub fn mc_expected_partition(n: usize, beta: f64, draws: usize, seed: u64) -> Result<PartitionEstimate> {
    check_n(n, 3, 7)?;
    if draws < 1000 {
        return Err(Error::out_of_range("draws", draws, ">= 1000"));
    }
    let table = TourTable::new(n)?;
    let per_draw: Vec<(f64, f64)> = (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let inst = Instance::generate(n, WeightModel::ContinuousUniform, derive_seed(seed, i))?;
            let lengths = table.lengths(inst.weights());
            let z: f64 = lengths.iter().map(|&j| (-beta * j).exp()).sum();
            Ok((z, ln_partition_from_lengths(&lengths, beta)))
        })
        .collect::<Result<_>>()?;
    let zs: Vec<f64> = per_draw.iter().map(|p| p.0).collect();
    let (estimate, std_error) = mean_and_se(&zs);
    let mean_ln_z = per_draw.iter().map(|p| p.1).sum::<f64>() / draws as f64;
    Ok(PartitionEstimate { n, beta, draws, estimate, std_error, mean_ln_z, ln_estimate: estimate.ln() })
}

/// Compound (quenched) statistics: the Gibbs mean and variance of `J`,
/// averaged over uniform weight draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompoundStats {
    pub n: usize,
    pub beta: f64,
    pub draws: usize,
    /// Estimate of `E_w E_pi(J | w)`.
    pub mean: f64,
    pub mean_std_error: f64,
    /// Estimate of `E_w Var_pi(J | w)`.
    pub mean_variance: f64,
    pub mean_variance_std_error: f64,
}

pub fn quenched_compound_stats(n: usize, beta: f64, draws: usize, seed: u64) -> Result<CompoundStats> {
    check_n(n, 3, 7)?;
    if draws < 2 {
        return Err(Error::out_of_range("draws", draws, ">= 2"));
    }
    let table = TourTable::new(n)?;
    let per_draw: Vec<(f64, f64)> = (0..draws as u64)
        .into_par_iter()
        .map(|i| {
            let inst = Instance::generate(n, WeightModel::ContinuousUniform, derive_seed(seed, i))?;
            let (_, mean, var) = gibbs_moments(&table.lengths(inst.weights()), beta);
            Ok((mean, var))
        })
        .collect::<Result<_>>()?;
    let means: Vec<f64> = per_draw.iter().map(|p| p.0).collect();
    let vars: Vec<f64> = per_draw.iter().map(|p| p.1).collect();
    let (mean, mean_std_error) = mean_and_se(&means);
    let (mean_variance, mean_variance_std_error) = mean_and_se(&vars);
    Ok(CompoundStats { n, beta, draws, mean, mean_std_error, mean_variance, mean_variance_std_error })
}

/// Dense transition matrix of fixed-temperature Metropolis on the 2-opt graph.
#[derive(Debug, Clone)]
pub struct ExactChain {
    graph: StateGraph,
    lengths: Vec<f64>,
    p: DMatrix<f64>,
    pi: Vec<f64>,
    beta: f64,
    lazy: bool,
}

/// Builds `P(x,y) = (1/d) min(1, exp(-beta (J(y) - J(x))))` on neighbors with
/// the remainder on the diagonal, or `(I + P)/2` when `lazy`. The stationary
/// vector is the Gibbs measure, checked to be a left fixed point.
pub fn build_exact_chain(inst: &Instance, beta: f64, lazy: bool) -> Result<ExactChain> {
    check_n(inst.n(), 4, 7)?;
    if !(beta >= 0.0) {
        return Err(Error::invalid(format!("beta = {beta} must be >= 0")));
    }
    let graph = StateGraph::build(inst.n())?;
    let lengths: Vec<f64> = graph.tours().iter().map(|t| inst.tour_length(t)).collect();
    let s = graph.len();
    let d = move_count(inst.n()) as f64;
    let mut p = DMatrix::zeros(s, s);
    for x in 0..s {
        let mut off = 0.0;
        for &y in graph.neighbors_of(x) {
            let a = (1.0 / d) * f64::min(1.0, (-beta * (lengths[y] - lengths[x])).exp());
            p[(x, y)] = a;
            off += a;
        }
        p[(x, x)] = 1.0 - off;
    }
    if lazy {
        p = (DMatrix::identity(s, s) + p) * 0.5;
    }
    let (pi, _, _) = gibbs_moments(&lengths, beta);
    let chain = ExactChain { graph, lengths, p, pi, beta, lazy };
    let residual = chain.stationarity_error();
    if residual > 1e-10 {
        return Err(Error::Numerical(format!(
            "Gibbs vector is not stationary: |pi P - pi|_1 = {residual:e}"
        )));
    }
    Ok(chain)
}

impl ExactChain {
    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn is_lazy(&self) -> bool {
        self.lazy
    }

    pub fn graph(&self) -> &StateGraph {
        &self.graph
    }

    pub fn tours(&self) -> &[Tour] {
        self.graph.tours()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.p
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    pub fn pi_min(&self) -> f64 {
        self.pi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `max_x |sum_y P(x,y) - 1|`.
    pub fn row_sum_error(&self) -> f64 {
        self.p.row_iter().map(|r| (r.sum() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max_{x,y} |pi(x) P(x,y) - pi(y) P(y,x)|`.
    pub fn detailed_balance_error(&self) -> f64 {
        let s = self.len();
        let mut worst: f64 = 0.0;
        for x in 0..s {
            for y in x + 1..s {
                worst = worst.max((self.pi[x] * self.p[(x, y)] - self.pi[y] * self.p[(y, x)]).abs());
            }
        }
        worst
    }

    /// `|pi P - pi|_1`.
    pub fn stationarity_error(&self) -> f64 {
        self.step(&self.pi).iter().zip(&self.pi).map(|(a, b)| (a - b).abs()).sum()
    }

    /// One step of a row distribution: `nu P`, using the graph's sparsity.
    pub fn step(&self, nu: &[f64]) -> Vec<f64> {
        let s = self.len();
        let mut out = vec![0.0; s];
        for x in 0..s {
            let m = nu[x];
            if m == 0.0 {
                continue;
            }
            out[x] += m * self.p[(x, x)];
            for &y in self.graph.neighbors_of(x) {
                out[y] += m * self.p[(x, y)];
            }
        }
        out
    }

    /// `E_nu J`.
    pub fn expected_length(&self, nu: &[f64]) -> f64 {
        nu.iter().zip(&self.lengths).map(|(p, j)| p * j).sum()
    }
}

/// Total variation distance between two distributions on the same states.
pub fn tv_distance(a: &[f64], b: &[f64]) -> f64 {
    0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>()
}

/// Eigenvalues of `P` computed through `Pi^{1/2} P Pi^{-1/2}`, which is
/// symmetric under detailed balance. Sorted in decreasing order.
pub fn symmetrized_eigenvalues(chain: &ExactChain) -> Result<Vec<f64>> {
    let s = chain.len();
    if s > CHAIN_MAX_STATES {
        return Err(Error::out_of_range("state count", s, format!("<= {CHAIN_MAX_STATES}")));
    }
    let sq: Vec<f64> = chain.pi.iter().map(|p| p.sqrt()).collect();
    let q = DMatrix::from_fn(s, s, |x, y| sq[x] * chain.p[(x, y)] / sq[y]);
    let q = (&q + q.transpose()) * 0.5;
    let mut ev: Vec<f64> = SymmetricEigen::new(q).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// Spectral gap `1 - lambda_1`.
    pub gamma: f64,
    /// Absolute spectral gap `1 - lambda_star`.
    pub gamma_star: f64,
    /// Relaxation time `1 / gamma_star`.
    pub t_rel: f64,
    /// Bottleneck ratio, present when the state space is small enough to enumerate.
    pub bottleneck: Option<f64>,
    pub lambda_1: f64,
    pub lambda_star: f64,
    pub eigenvalues: Vec<f64>,
}

pub fn spectral_report(chain: &ExactChain) -> Result<SpectralReport> {
    let ev = symmetrized_eigenvalues(chain)?;
    let lambda_1 = ev[1];
    let lambda_star = ev[1..].iter().map(|l| l.abs()).fold(0.0, f64::max);
    let bottleneck = if chain.len() <= BOTTLENECK_MAX_STATES { Some(bottleneck_ratio(chain)?) } else { None };
    Ok(SpectralReport {
        gamma: 1.0 - lambda_1,
        gamma_star: 1.0 - lambda_star,
        t_rel: 1.0 / (1.0 - lambda_star),
        bottleneck,
        lambda_1,
        lambda_star,
        eigenvalues: ev,
    })
}

/// `min_{S: 0 < pi(S) <= 1/2} Q(S, S^c) / pi(S)` by enumerating every subset
/// in Gray-code order, updating `pi(S)` and the boundary flow incrementally.
pub fn bottleneck_ratio(chain: &ExactChain) -> Result<f64> {
    let s = chain.len();
    if s > BOTTLENECK_MAX_STATES {
        return Err(Error::out_of_range("state count", s, format!("<= {BOTTLENECK_MAX_STATES}")));
    }
    let mut in_set = vec![false; s];
    let mut mass = 0.0;
    let mut flow = 0.0;
    let mut best = f64::INFINITY;
    for g in 1u64..(1u64 << s) {
        let x = g.trailing_zeros() as usize;
        let (mut to_in, mut to_out) = (0.0, 0.0);
        for &y in chain.graph.neighbors_of(x) {
            if in_set[y] {
                to_in += chain.p[(x, y)];
            } else {
                to_out += chain.p[(x, y)];
            }
        }
        let px = chain.pi[x];
        if in_set[x] {
            flow += px * (to_in - to_out);
            mass -= px;
        } else {
            flow += px * (to_out - to_in);
            mass += px;
        }
        in_set[x] = !in_set[x];
        if mass > 0.0 && mass <= 0.5 + 1e-12 {
            best = best.min(flow / mass);
        }
    }
    Ok(best)
}

/// Worst-case total variation distance from stationarity after `r` steps,
/// for `r = 0..=r_max`. Point masses suffice since TV is convex in the start.
pub fn tv_profile(chain: &ExactChain, r_max: u64) -> Vec<f64> {
    let mut rows = point_masses(chain.len());
    let mut out = vec![worst_tv(&rows, &chain.pi)];
    for _ in 0..r_max {
        rows = rows.iter().map(|r| chain.step(r)).collect();
        out.push(worst_tv(&rows, &chain.pi));
    }
    out
}

fn point_masses(s: usize) -> Vec<Vec<f64>> {
    (0..s)
        .map(|x| {
            let mut v = vec![0.0; s];
            v[x] = 1.0;
            v
        })
        .collect()
}

fn worst_tv(rows: &[Vec<f64>], pi: &[f64]) -> f64 {
    rows.iter().map(|r| tv_distance(r, pi)).fold(0.0, f64::max)
}

/// Smallest `r` with `max_x TV(P^r(x, .), pi) <= epsilon`.
pub fn exact_mixing_time(chain: &ExactChain, epsilon: f64) -> Result<u64> {
    if chain.len() > CHAIN_MAX_STATES {
        return Err(Error::out_of_range("state count", chain.len(), format!("<= {CHAIN_MAX_STATES}")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::invalid("epsilon must be > 0"));
    }
    if epsilon >= 1.0 {
        return Ok(0);
    }
    let mut rows = point_masses(chain.len());
    let mut r = 0u64;
    while worst_tv(&rows, &chain.pi) > epsilon {
        if r >= MIXING_STEP_CAP {
            return Err(Error::Numerical(format!("no mixing within {MIXING_STEP_CAP} steps")));
        }
        rows = rows.iter().map(|row| chain.step(row)).collect();
        r += 1;
    }
    Ok(r)
}

/// Upper bound `t_rel ln(1 / (epsilon pi_min))` on the mixing time.
pub fn relaxation_mixing_bound(chain: &ExactChain, report: &SpectralReport, epsilon: f64) -> f64 {
    report.t_rel * (1.0 / (epsilon * chain.pi_min())).ln()
}

/// `|u|_pi = sqrt(sum_x u(x)^2 / pi(x))`.
pub fn weighted_norm(u: &[f64], pi: &[f64]) -> f64 {
    u.iter().zip(pi).map(|(a, p)| a * a / p).sum::<f64>().sqrt()
}

/// Expected-length drift of the chain started near, but not at, equilibrium.
///
/// The chain `P_t` runs at temperature `a / ln(t + 2)`; its stationary law is
/// `pi_t`, and `pi_{t+1}` is the Gibbs law at `a / ln(t + 3)`. The default start
/// is `nu_0 = (1 - delta) pi_t + delta e_x` with `x` the longest tour and
/// `delta` chosen so that `TV(nu_0, pi_t) = 1/|S|`.
#[derive(Debug, Clone)]
pub struct DriftAnalysis {
    chain: ExactChain,
    pi_next: Vec<f64>,
    nu0: Vec<f64>,
}

impl DriftAnalysis {
    pub fn new(inst: &Instance, a: f64, t: u64, lazy: bool) -> Result<Self> {
        let chain = Self::chain_at(inst, a, t, lazy)?;
        let s = chain.len();
        let worst = (0..s).max_by(|&x, &y| chain.lengths[x].total_cmp(&chain.lengths[y])).unwrap();
        let delta = 1.0 / (s as f64 * (1.0 - chain.pi[worst]));
        let mut nu0: Vec<f64> = chain.pi.iter().map(|p| (1.0 - delta) * p).collect();
        nu0[worst] += delta;
        Self::finish(inst, a, t, chain, nu0)
    }

    /// Same setup with an explicit starting distribution.
    pub fn with_initial(inst: &Instance, a: f64, t: u64, lazy: bool, nu0: Vec<f64>) -> Result<Self> {
        let chain = Self::chain_at(inst, a, t, lazy)?;
        if nu0.len() != chain.len() || (nu0.iter().sum::<f64>() - 1.0).abs() > 1e-12 {
            return Err(Error::invalid("nu0 must be a distribution over all tours"));
        }
        Self::finish(inst, a, t, chain, nu0)
    }

    fn chain_at(inst: &Instance, a: f64, t: u64, lazy: bool) -> Result<ExactChain> {
        check_n(inst.n(), 4, 6)?;
        if a < inst.n() as f64 {
            return Err(Error::invalid(format!("a = {a} must be >= n = {}", inst.n())));
        }
        build_exact_chain(inst, Self::beta(a, t), lazy)
    }

    fn finish(inst: &Instance, a: f64, t: u64, chain: ExactChain, nu0: Vec<f64>) -> Result<Self> {
        let next = build_exact_chain(inst, Self::beta(a, t + 1), chain.lazy)?;
        Ok(DriftAnalysis { pi_next: next.pi, chain, nu0 })
    }

    /// Inverse temperature `ln(t + 2) / a` of the shifted logarithmic schedule.
    pub fn beta(a: f64, t: u64) -> f64 {
        ((t as f64) + 2.0).ln() / a
    }

    pub fn chain(&self) -> &ExactChain {
        &self.chain
    }

    pub fn pi_next(&self) -> &[f64] {
        &self.pi_next
    }

    pub fn initial(&self) -> &[f64] {
        &self.nu0
    }

    pub fn initial_tv(&self) -> f64 {
        tv_distance(&self.nu0, &self.chain.pi)
    }

    /// `|E_{nu_r} J - E_{pi_{t+1}} J|` for `r = 0..=r_max`.
    pub fn drift_series(&self, r_max: u64) -> Vec<f64> {
        let target = self.chain.expected_length(&self.pi_next);
        let mut nu = self.nu0.clone();
        let mut out = Vec::with_capacity(r_max as usize + 1);
        for r in 0..=r_max {
            out.push((self.chain.expected_length(&nu) - target).abs());
            if r < r_max {
                nu = self.chain.step(&nu);
            }
        }
        out
    }

    pub fn drift(&self, r: u64) -> f64 {
        *self.drift_series(r).last().unwrap()
    }

    /// `|pi_{t+1} - pi_t|_{t+1}`.
    pub fn stationary_shift_norm(&self) -> f64 {
        let diff: Vec<f64> = self.pi_next.iter().zip(&self.chain.pi).map(|(a, b)| a - b).collect();
        weighted_norm(&diff, &self.pi_next)
    }

    /// `|nu_0 - pi_t|_{t+1}`.
    pub fn initial_offset_norm(&self) -> f64 {
        let diff: Vec<f64> = self.nu0.iter().zip(&self.chain.pi).map(|(a, b)| a - b).collect();
        weighted_norm(&diff, &self.pi_next)
    }

    /// `n (|pi_{t+1} - pi_t|_{t+1} + |nu_0 - pi_t|_{t+1})`.
    pub fn bound(&self) -> f64 {
        self.chain.n() as f64 * (self.stationary_shift_norm() + self.initial_offset_norm())
    }
}

/// Drift after `r` steps of the lazy chain from the default start.
pub fn nonequilibrium_drift(inst: &Instance, a: f64, t: u64, r: u64) -> Result<f64> {
    Ok(DriftAnalysis::new(inst, a, t, true)?.drift(r))
}

/// One named invariant check: `pass` holds when `value relation bound` does.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: String,
    pub bound: f64,
    pub pass: bool,
}

impl Check {
    fn at_most(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, relation: "<=".into(), bound, pass: value <= bound }
    }

    fn at_least(name: &str, value: f64, bound: f64) -> Self {
        Check { name: name.into(), value, relation: ">=".into(), bound, pass: value >= bound }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub n: usize,
    pub beta: f64,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub all_pass: bool,
}

/// Runs the exact invariant suite on a uniform instance of size `n` (4 to 7)
/// at inverse temperature `beta`: enumeration and graph structure, Gibbs
/// normalization and cumulants, chain construction, spectra, bottleneck
/// sandwich (when `|S| <= 24`), mixing-time bounds and Jensen's inequality.
pub fn verify_suite(n: usize, beta: f64, seed: u64) -> Result<VerifyReport> {
    use crate::analytic::{annealed_cdf, irwin_hall_cdf, state_count, two_opt_mixing_time_bound};
    check_n(n, 4, 7)?;
    if !(beta > 0.0) {
        return Err(Error::invalid(format!("beta = {beta} must be > 0")));
    }
    let inst = Instance::generate(n, WeightModel::ContinuousUniform, seed)?;
    let mut checks = Vec::new();
    let states = state_count(n);

    let tours = enumerate_tours(n)?;
    checks.push(Check::at_most("tour count equals (n-1)!/2", (tours.len() as f64 - states).abs(), 0.0));
    let graph = StateGraph::build(n)?;
    let d = move_count(n);
    let regular = graph.is_regular(d) && graph.is_symmetric() && graph.is_connected();
    checks.push(Check::at_least(
        "state graph regular, symmetric and connected",
        f64::from(u8::from(regular)),
        1.0,
    ));
    checks.push(Check::at_most("state graph diameter", graph.diameter() as f64, (n - 1) as f64));

    checks.push(Check::at_most(
        "Z at beta = 0 equals |S|",
        (exact_partition(&inst, 0.0)? - states).abs(),
        0.0,
    ));
    let g = exact_gibbs_stats(&inst, beta)?;
    checks.push(Check::at_most(
        "Gibbs probabilities sum to 1",
        (g.probabilities.iter().sum::<f64>() - 1.0).abs(),
        1e-12,
    ));
    let h = 1e-4;
    let f = |b: f64| ln_exact_partition(&inst, b);
    let (fp, f0, fm) = (f(beta + h)?, f(beta)?, f(beta - h)?);
    checks.push(Check::at_most(
        "-d/dbeta ln Z matches Gibbs mean",
        ((fp - fm) / (2.0 * h) + g.mean).abs(),
        1e-6,
    ));
    checks.push(Check::at_most(
        "d2/dbeta2 ln Z matches Gibbs variance",
        ((fp - 2.0 * f0 + fm) / (h * h) - g.variance).abs(),
        1e-5,
    ));

    let plain = build_exact_chain(&inst, beta, false)?;
    let lazy = build_exact_chain(&inst, beta, true)?;
    for (tag, c) in [("P", &plain), ("lazy P", &lazy)] {
        checks.push(Check::at_most(&format!("{tag}: row sums"), c.row_sum_error(), 1e-12));
        checks.push(Check::at_most(&format!("{tag}: detailed balance"), c.detailed_balance_error(), 1e-12));
        checks.push(Check::at_most(&format!("{tag}: Gibbs stationarity"), c.stationarity_error(), 1e-12));
    }
    let rp = spectral_report(&plain)?;
    let rl = spectral_report(&lazy)?;
    let map_err = rp
        .eigenvalues
        .iter()
        .zip(&rl.eigenvalues)
        .map(|(p, l)| (l - (1.0 + p) / 2.0).abs())
        .fold(0.0, f64::max);
    checks.push(Check::at_most("lazy eigenvalues equal (1 + lambda)/2", map_err, 1e-9));
    let lazy_min = rl.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("lazy spectrum nonnegative", lazy_min, -1e-12));
    let mut general: Vec<f64> = plain.matrix().complex_eigenvalues().iter().map(|z| z.re).collect();
    general.sort_by(|a, b| b.total_cmp(a));
    let sim = rp.eigenvalues.iter().zip(&general).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    checks.push(Check::at_most("symmetrized spectrum matches P", sim, 1e-9));

    for (tag, c, r) in [("P", &plain, &rp), ("lazy P", &lazy, &rl)] {
        if let Some(phi) = r.bottleneck {
            checks.push(Check::at_least(
                &format!("{tag}: gap >= bottleneck^2 / 2"),
                r.gamma,
                phi * phi / 2.0,
            ));
            checks.push(Check::at_most(&format!("{tag}: gap <= 2 bottleneck"), r.gamma, 2.0 * phi));
        }
        let eps = 1.0 / states;
        let tau = exact_mixing_time(c, eps)? as f64;
        let relax = relaxation_mixing_bound(c, r, eps);
        checks.push(Check::at_most(&format!("{tag}: exact mixing time <= relaxation bound"), tau, relax));
        // the schedule with a = n reaches this beta at t = exp(beta n)
        let t = (beta * n as f64).exp().max(1.0);
        checks.push(Check::at_most(
            &format!("{tag}: relaxation bound <= path-counting bound"),
            relax,
            two_opt_mixing_time_bound(n, t, eps)?,
        ));
    }
    let walk = build_exact_chain(&inst, 0.0, false)?;
    let diam = graph.diameter() as f64;
    checks.push(Check::at_most(
        "1/gap <= 2 d D^2 at beta = 0",
        1.0 / spectral_report(&walk)?.gamma,
        2.0 * d as f64 * diam * diam,
    ));

    let mc = mc_expected_partition(n.min(6), beta, 1000, seed)?;
    checks.push(Check::at_most("Jensen: mean ln Z <= ln mean Z", mc.mean_ln_z, mc.ln_estimate));
    let worst = (0..=200)
        .map(|i| {
            let j = 3.0 * i as f64 / 200.0;
            Ok(annealed_cdf(3, beta, j)? - irwin_hall_cdf(3, j)?)
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    checks.push(Check::at_least("n = 3: annealed CDF >= Irwin-Hall CDF", worst, -1e-12));

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport { n, beta, seed, checks, all_pass })
}
