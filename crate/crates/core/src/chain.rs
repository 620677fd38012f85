//! Simulated annealing, fixed-temperature Metropolis, and the two samplers
//! used to compare quenched against annealed tour-length distributions.
//!
//! Internally a chain walks over raw cyclic orderings rather than canonical
//! tours. The 2-opt neighbor set of a cycle does not depend on where it is
//! cut or which way it is read, so the transition kernel is the same; the
//! final state is canonicalized when it is handed back.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{edge_count, edge_endpoints, grid_value, Instance, Tour, WeightModel};
use crate::neighborhood::{MoveTable, TwoOptMove};
use crate::rng::{derive_seed, seeded_rng, SimRng};

/// Temperature as a function of the (0-based) iteration index.
///
/// The logarithmic schedule `a / ln t` is undefined at `t = 0, 1`; it is
/// evaluated at `a / ln(t + 2)`. Epoch `k` (1-based) of an epoch-wise
/// schedule runs at `a / ln(k + 2)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoolingSchedule {
    Logarithmic { a: f64 },
    Constant { temperature: f64 },
    EpochWise { a: f64, epoch_lengths: Vec<u64> },
}

impl CoolingSchedule {
    pub fn validate(&self) -> Result<()> {
        match self {
            CoolingSchedule::Logarithmic { a } if *a > 0.0 && a.is_finite() => Ok(()),
            CoolingSchedule::Constant { temperature } if *temperature > 0.0 => Ok(()),
            CoolingSchedule::EpochWise { a, epoch_lengths }
                if *a > 0.0 && !epoch_lengths.is_empty() && epoch_lengths.iter().all(|&l| l > 0) =>
            {
                Ok(())
            }
            other => Err(Error::invalid(format!("invalid cooling schedule {other:?}"))),
        }
    }

    pub fn temperature(&self, t: u64) -> f64 {
        match self {
            CoolingSchedule::Logarithmic { a } => a / ((t as f64) + 2.0).ln(),
            CoolingSchedule::Constant { temperature } => *temperature,
            CoolingSchedule::EpochWise { a, .. } => a / ((self.epoch_of(t).unwrap_or(1) as f64) + 2.0).ln(),
        }
    }

    pub fn inverse_temperature(&self, t: u64) -> f64 {
        1.0 / self.temperature(t)
    }

    /// 1-based epoch containing iteration `t`. Iterations past the last epoch
    /// stay in the last one. `None` for non-epoch schedules.
    pub fn epoch_of(&self, t: u64) -> Option<usize> {
        let CoolingSchedule::EpochWise { epoch_lengths, .. } = self else {
            return None;
        };
        let mut end = 0u64;
        for (k, &len) in epoch_lengths.iter().enumerate() {
            end = end.saturating_add(len);
            if t < end {
                return Some(k + 1);
            }
        }
        Some(epoch_lengths.len())
    }
}

/// Epoch-wise logarithmic schedule whose epoch `k` lasts `ceil(c n^9 k^2 ln n)` iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochPlan {
    pub schedule: CoolingSchedule,
    pub epoch_lengths: Vec<u64>,
    /// Sum of the epoch lengths, as a float because it is usually astronomical.
    pub total_iterations: f64,
    pub epochs: usize,
}

pub fn epoch_schedule_from_theorem(n: usize, a: f64, epochs: usize, c: f64) -> Result<EpochPlan> {
    if n < 3 {
        return Err(Error::out_of_range("n", n, ">= 3"));
    }
    if a < n as f64 {
        return Err(Error::invalid(format!(
            "a = {a} < n = {n}: the non-equilibrium lower bound only holds for a >= n"
        )));
    }
    if !(c > 0.0) || epochs == 0 {
        return Err(Error::invalid("epoch multiplier c must be positive and epochs >= 1"));
    }
    let nf = n as f64;
    let base = c * nf.powi(9) * nf.ln();
    let mut lengths = Vec::with_capacity(epochs);
    let mut total = 0.0;
    for k in 1..=epochs {
        let len = (base * (k * k) as f64).ceil().max(1.0);
        if len >= u64::MAX as f64 {
            return Err(Error::Numerical(format!("epoch {k} length {len:e} overflows u64")));
        }
        total += len;
        lengths.push(len as u64);
    }
    Ok(EpochPlan {
        schedule: CoolingSchedule::EpochWise { a, epoch_lengths: lengths.clone() },
        epoch_lengths: lengths,
        total_iterations: total,
        epochs,
    })
}

/// Default burn-in for fixed-temperature sampling: `50 n^3` steps.
pub fn default_burn_in(n: usize) -> u64 {
    50 * (n as u64).pow(3)
}

/// Default burn-in for the extended (tour, weights) chain. Besides `50 n^3`
/// it allows every edge weight about four grid-crossing times (`N^2` moves each).
pub fn default_annealed_burn_in(n: usize, levels: u32) -> u64 {
    let m = edge_count(n) as u64;
    default_burn_in(n).max(4 * m * (levels as u64).pow(2))
}

/// A cyclic ordering with its inverse permutation.
#[derive(Debug, Clone)]
struct Cycle {
    order: Vec<usize>,
    pos: Vec<usize>,
}

impl Cycle {
    fn new(order: Vec<usize>) -> Self {
        let mut pos = vec![0; order.len()];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        Cycle { order, pos }
    }

    #[inline]
    fn n(&self) -> usize {
        self.order.len()
    }

    /// Endpoints `(a, b, c, d)` of the removed edges `(a,b)` and `(c,d)`.
    #[inline]
    fn move_endpoints(&self, mv: TwoOptMove) -> (usize, usize, usize, usize) {
        let n = self.n();
        let (i, k) = (mv.i(), mv.k());
        (self.order[i], self.order[i + 1], self.order[k], self.order[(k + 1) % n])
    }

    #[inline]
    fn contains_edge(&self, a: usize, b: usize) -> bool {
        let d = self.pos[a].abs_diff(self.pos[b]);
        d == 1 || d == self.n() - 1
    }

    /// Reverses `order[i+1..=k]`, or equivalently its complement, whichever is shorter.
    fn apply(&mut self, mv: TwoOptMove) {
        let n = self.n();
        let inner = mv.k() - mv.i();
        let (mut lo, mut hi, len) = if 2 * inner <= n {
            (mv.i() + 1, mv.k(), inner)
        } else {
            ((mv.k() + 1) % n, mv.i() + n, n - inner)
        };
        for _ in 0..len / 2 {
            let (p, q) = (lo % n, hi % n);
            self.order.swap(p, q);
            self.pos[self.order[p]] = p;
            self.pos[self.order[q]] = q;
            lo += 1;
            hi -= 1;
        }
    }

    fn to_tour(&self) -> Tour {
        Tour::from_cycle(&self.order).expect("cycle is a permutation")
    }
}

/// Metropolis acceptance: improvements always, otherwise with probability `exp(-beta * delta)`.
#[inline]
fn metropolis_accept<R: Rng + ?Sized>(delta: f64, beta: f64, rng: &mut R) -> bool {
    if delta <= 0.0 {
        return true;
    }
    let p = (-beta * delta).exp();
    rng.random::<f64>() < p
}

/// State of a single-instance tour chain.
struct TourWalker {
    n: usize,
    weights: Vec<f64>,
    cycle: Cycle,
    moves: MoveTable,
    length: f64,
}

impl TourWalker {
    fn new(inst: &Instance, start: &Tour) -> Self {
        let mut w = TourWalker {
            n: inst.n(),
            weights: inst.dense_matrix(),
            cycle: Cycle::new(start.order().to_vec()),
            moves: MoveTable::new(inst.n()),
            length: 0.0,
        };
        w.length = w.full_length();
        w
    }

    fn full_length(&self) -> f64 {
        let o = &self.cycle.order;
        (0..self.n).map(|p| self.weights[o[p] * self.n + o[(p + 1) % self.n]]).sum()
    }

    #[inline]
    fn delta(&self, mv: TwoOptMove) -> f64 {
        let (a, b, c, d) = self.cycle.move_endpoints(mv);
        let w = &self.weights;
        let n = self.n;
        (w[a * n + c] + w[b * n + d]) - (w[a * n + b] + w[c * n + d])
    }

    /// One proposal/acceptance round at inverse temperature `beta`.
    #[inline]
    fn step(&mut self, beta: f64, lazy: bool, rng: &mut SimRng) -> bool {
        if lazy && rng.random::<bool>() {
            return false;
        }
        let mv = self.moves.sample(rng);
        let delta = self.delta(mv);
        if metropolis_accept(delta, beta, rng) {
            self.cycle.apply(mv);
            self.length += delta;
            true
        } else {
            false
        }
    }

    fn resync(&mut self) {
        self.length = self.full_length();
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnealOptions {
    pub iterations: u64,
    pub record_every: u64,
    pub lazy: bool,
}

impl AnnealOptions {
    pub fn new(iterations: u64) -> Self {
        AnnealOptions { iterations, record_every: 1, lazy: false }
    }
}

/// Tour lengths (and acceptance flags) recorded every `record_every` iterations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainTrace {
    pub steps: Vec<u64>,
    pub lengths: Vec<f64>,
    pub accepted: Vec<bool>,
    pub final_tour: Tour,
    pub final_length: f64,
    pub iterations: u64,
    pub accepted_total: u64,
    pub seed: u64,
}

impl ChainTrace {
    /// CSV with header `step,J,accepted`.
    pub fn write_csv<W: std::io::Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "step,J,accepted")?;
        for ((s, j), a) in self.steps.iter().zip(&self.lengths).zip(&self.accepted) {
            writeln!(out, "{s},{j},{}", u8::from(*a))?;
        }
        Ok(())
    }
}

/// Runs simulated annealing for `opts.iterations` proposals from `x0`.
///
/// At iteration `i` a uniform 2-opt neighbor is proposed; it is taken when
/// `delta < 0` and otherwise with probability `exp(-delta / T(i))`, so a
/// zero-cost move is always accepted.
pub fn simulated_annealing(
    inst: &Instance,
    schedule: &CoolingSchedule,
    opts: &AnnealOptions,
    x0: &Tour,
    seed: u64,
) -> Result<ChainTrace> {
    schedule.validate()?;
    if inst.n() < 4 {
        return Err(Error::out_of_range("n", inst.n(), ">= 4"));
    }
    if opts.iterations == 0 || opts.record_every == 0 {
        return Err(Error::invalid("iterations and record_every must be >= 1"));
    }
    if x0.n() != inst.n() {
        return Err(Error::invalid("start tour and instance disagree on n"));
    }
    let mut rng = seeded_rng(seed);
    let mut walker = TourWalker::new(inst, x0);
    let capacity = (opts.iterations / opts.record_every) as usize;
    let mut trace = ChainTrace {
        steps: Vec::with_capacity(capacity),
        lengths: Vec::with_capacity(capacity),
        accepted: Vec::with_capacity(capacity),
        final_tour: x0.clone(),
        final_length: 0.0,
        iterations: opts.iterations,
        accepted_total: 0,
        seed,
    };
    for i in 0..opts.iterations {
        let beta = schedule.inverse_temperature(i);
        let acc = walker.step(beta, opts.lazy, &mut rng);
        trace.accepted_total += u64::from(acc);
        if (i + 1) % (1 << 16) == 0 {
            walker.resync();
        }
        if (i + 1) % opts.record_every == 0 {
            trace.steps.push(i + 1);
            trace.lengths.push(walker.length.clamp(0.0, inst.n() as f64));
            trace.accepted.push(acc);
        }
    }
    trace.final_tour = walker.cycle.to_tour();
    trace.final_length = inst.tour_length(&trace.final_tour);
    Ok(trace)
}

/// Time average of `J` over a fixed-temperature run with a batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeAverage {
    pub mean: f64,
    pub std_error: f64,
    pub steps: u64,
    pub batches: u64,
}

/// Runs Metropolis at inverse temperature `beta` for `burn_in` steps, then
/// averages `J` over `steps` further steps split into `batches` batches.
pub fn metropolis_time_average(
    inst: &Instance,
    beta: f64,
    burn_in: u64,
    steps: u64,
    batches: u64,
    seed: u64,
) -> Result<TimeAverage> {
    if inst.n() < 4 {
        return Err(Error::out_of_range("n", inst.n(), ">= 4"));
    }
    if !(beta >= 0.0) || batches < 2 || steps < batches {
        return Err(Error::invalid("need beta >= 0, batches >= 2 and steps >= batches"));
    }
    let mut rng = seeded_rng(seed);
    let start = Tour::random(inst.n(), &mut rng);
    let mut walker = TourWalker::new(inst, &start);
    for _ in 0..burn_in {
        walker.step(beta, false, &mut rng);
    }
    walker.resync();
    let per_batch = steps / batches;
    let mut batch_means = Vec::with_capacity(batches as usize);
    for _ in 0..batches {
        let mut acc = 0.0;
        for _ in 0..per_batch {
            walker.step(beta, false, &mut rng);
            acc += walker.length;
        }
        walker.resync();
        batch_means.push(acc / per_batch as f64);
    }
    let b = batches as f64;
    let mean = batch_means.iter().sum::<f64>() / b;
    let var = batch_means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (b - 1.0);
    Ok(TimeAverage { mean, std_error: (var / b).sqrt(), steps: per_batch * batches, batches })
}

/// One draw from the Gibbs measure of `inst` at inverse temperature `beta`,
/// approximated by `burn_in` Metropolis steps from a uniformly random tour.
pub fn quenched_sample(inst: &Instance, beta: f64, burn_in: u64, seed: u64) -> Result<f64> {
    if !(beta >= 0.0) {
        return Err(Error::invalid(format!("beta = {beta} must be >= 0")));
    }
    if burn_in == 0 {
        return Err(Error::invalid("burn_in must be >= 1"));
    }
    let mut rng = seeded_rng(seed);
    let start = Tour::random(inst.n(), &mut rng);
    if inst.n() == 3 {
        return Ok(inst.tour_length(&start));
    }
    let mut walker = TourWalker::new(inst, &start);
    for _ in 0..burn_in {
        walker.step(beta, false, &mut rng);
    }
    Ok(inst.tour_length(&walker.cycle.to_tour()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuenchedConfig {
    pub n: usize,
    pub model: WeightModel,
    pub beta: f64,
    pub burn_in: u64,
    pub count: usize,
    pub seed: u64,
}

/// Quenched samples: draw `i` uses a fresh instance with seed `seed + i` and
/// a Metropolis run seeded from it. Output order is by `i` regardless of how
/// the work is scheduled across threads.
pub fn quenched_samples(cfg: &QuenchedConfig) -> Result<Vec<f64>> {
    use rayon::prelude::*;
    if cfg.count == 0 {
        return Err(Error::invalid("count must be >= 1"));
    }
    (0..cfg.count as u64)
        .into_par_iter()
        .map(|i| {
            let inst_seed = cfg.seed.wrapping_add(i);
            let inst = Instance::generate(cfg.n, cfg.model, inst_seed)?;
            quenched_sample(&inst, cfg.beta, cfg.burn_in, derive_seed(inst_seed, 0))
        })
        .collect()
}

/// State of the extended chain: a tour and a grid weight vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnealedState {
    pub tour: Tour,
    /// Weights in lexicographic edge order, each a multiple of `1/levels`.
    pub weights: Vec<f64>,
    pub levels: u32,
}

/// Markov chain on (tour, grid weights).
///
/// Each step picks an edge uniformly and proposes moving its weight one grid
/// step up or down (a proposal that would leave `[0, 1]` makes the chain hold),
/// together with a uniform 2-opt move. The joint proposal is accepted with
/// probability `min(1, exp(-beta (J(y|w') - J(x|w))))`. Weights are kept as
/// integer levels so `J` is an exact integer multiple of `1/N`.
#[derive(Debug, Clone)]
pub struct AnnealedChain {
    n: usize,
    levels: u32,
    beta: f64,
    level: Vec<u32>,
    endpoints: Vec<(usize, usize)>,
    cycle: Cycle,
    moves: MoveTable,
    length_levels: i64,
    rng: SimRng,
}

impl AnnealedChain {
    /// Starts from weights drawn uniformly on the grid and a uniform random tour.
    pub fn new(n: usize, levels: u32, beta: f64, seed: u64) -> Result<Self> {
        if n < 4 {
            return Err(Error::out_of_range("n", n, ">= 4"));
        }
        if levels == 0 {
            return Err(Error::invalid("grid needs N >= 1"));
        }
        if !(beta >= 0.0) {
            return Err(Error::invalid(format!("beta = {beta} must be >= 0")));
        }
        let mut rng = seeded_rng(seed);
        let mut level = vec![0u32; n * n];
        let endpoints: Vec<_> = (0..edge_count(n)).map(|e| edge_endpoints(n, e)).collect();
        for &(a, b) in &endpoints {
            let l = rng.random_range(0..=levels);
            level[a * n + b] = l;
            level[b * n + a] = l;
        }
        let start = Tour::random(n, &mut rng);
        let cycle = Cycle::new(start.order().to_vec());
        let mut chain = AnnealedChain {
            n,
            levels,
            beta,
            level,
            endpoints,
            cycle,
            moves: MoveTable::new(n),
            length_levels: 0,
            rng,
        };
        chain.length_levels = chain.full_length_levels();
        Ok(chain)
    }

    fn full_length_levels(&self) -> i64 {
        let o = &self.cycle.order;
        (0..self.n).map(|p| self.level[o[p] * self.n + o[(p + 1) % self.n]] as i64).sum()
    }

    #[inline]
    fn lvl(&self, a: usize, b: usize) -> i64 {
        self.level[a * self.n + b] as i64
    }

    #[inline]
    fn set_level(&mut self, a: usize, b: usize, l: u32) {
        self.level[a * self.n + b] = l;
        self.level[b * self.n + a] = l;
    }

    /// One joint proposal. Returns whether it was accepted.
    pub fn step(&mut self) -> bool {
        let e = self.rng.random_range(0..self.endpoints.len());
        let (a, b) = self.endpoints[e];
        let up = self.rng.random::<bool>();
        let old = self.level[a * self.n + b];
        let new = match (up, old) {
            (true, l) if l < self.levels => l + 1,
            (false, l) if l > 0 => l - 1,
            _ => return false,
        };
        let mv = self.moves.sample(&mut self.rng);

        let weight_part = if self.cycle.contains_edge(a, b) { new as i64 - old as i64 } else { 0 };
        self.set_level(a, b, new);
        let (p, q, r, s) = self.cycle.move_endpoints(mv);
        let move_part = self.lvl(p, r) + self.lvl(q, s) - self.lvl(p, q) - self.lvl(r, s);
        let delta = weight_part + move_part;

        let accept =
            delta <= 0 || self.rng.random::<f64>() < (-self.beta * delta as f64 / self.levels as f64).exp();
        if accept {
            self.cycle.apply(mv);
            self.length_levels += delta;
        } else {
            self.set_level(a, b, old);
        }
        accept
    }

    pub fn run(&mut self, steps: u64) {
        for _ in 0..steps {
            self.step();
        }
    }

    /// Current tour length `J(x | w)`.
    pub fn length(&self) -> f64 {
        self.length_levels as f64 / self.levels as f64
    }

    pub fn state(&self) -> AnnealedState {
        let weights = self
            .endpoints
            .iter()
            .map(|&(a, b)| grid_value(self.level[a * self.n + b], self.levels))
            .collect();
        AnnealedState { tour: self.cycle.to_tour(), weights, levels: self.levels }
    }

    /// Recomputes `J` from scratch; equal to [`Self::length`] exactly.
    pub fn recomputed_length(&self) -> f64 {
        self.full_length_levels() as f64 / self.levels as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnealedConfig {
    pub n: usize,
    pub levels: u32,
    pub beta: f64,
    pub burn_in: u64,
    pub thinning: u64,
    pub count: usize,
    pub seed: u64,
}

/// Runs the extended chain for `burn_in` steps, then records `J` every
/// `thinning` steps until `count` samples are collected.
pub fn annealed_mh_sample(cfg: &AnnealedConfig) -> Result<Vec<f64>> {
    if cfg.thinning == 0 || cfg.count == 0 {
        return Err(Error::invalid("thinning and count must be >= 1"));
    }
    let mut chain = AnnealedChain::new(cfg.n, cfg.levels, cfg.beta, cfg.seed)?;
    chain.run(cfg.burn_in);
    let mut out = Vec::with_capacity(cfg.count);
    for _ in 0..cfg.count {
        chain.run(cfg.thinning);
        out.push(chain.length());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighborhood::moves;

    #[test]
    fn logarithmic_schedule_is_shifted_and_monotone() {
        let s = CoolingSchedule::Logarithmic { a: 3.0 };
        assert!((s.temperature(0) - 3.0 / 2f64.ln()).abs() < 1e-15);
        for t in 0..10_000 {
            assert!(s.temperature(t + 1) <= s.temperature(t));
            assert!(s.temperature(t) > 0.0);
        }
    }

    #[test]
    fn epoch_schedule_temperatures() {
        let s = CoolingSchedule::EpochWise { a: 2.0, epoch_lengths: vec![3, 5, 2] };
        let temps: Vec<f64> = (0..12).map(|t| s.temperature(t)).collect();
        assert!(temps[..3].iter().all(|&x| x == 2.0 / 3f64.ln()));
        assert!(temps[3..8].iter().all(|&x| x == 2.0 / 4f64.ln()));
        assert_eq!(temps[9], 2.0 / 5f64.ln());
        assert_eq!(temps[11], temps[9]);
        assert!(temps.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn epoch_plan_formula() {
        let plan = epoch_schedule_from_theorem(5, 5.0, 3, 1.0).unwrap();
        // ceil(5^9 k^2 ln 5), evaluated in 40-digit arithmetic
        assert_eq!(plan.epoch_lengths, vec![3_143_434, 12_573_734, 28_290_901]);
        assert_eq!(plan.total_iterations, (3_143_434u64 + 12_573_734 + 28_290_901) as f64);

        let small = epoch_schedule_from_theorem(5, 5.0, 3, 1e-9).unwrap();
        assert_eq!(small.epoch_lengths, vec![1, 1, 1]);
        let mid = epoch_schedule_from_theorem(5, 5.0, 4, 1e-4).unwrap();
        let l = &mid.epoch_lengths;
        assert_eq!(l, &vec![315, 1258, 2830, 5030]);

        let one = epoch_schedule_from_theorem(6, 7.0, 1, 1e-6).unwrap();
        assert_eq!(one.schedule.temperature(0), 7.0 / 3f64.ln());
        assert_eq!(one.schedule.temperature(one.epoch_lengths[0] - 1), 7.0 / 3f64.ln());

        let err = epoch_schedule_from_theorem(6, 5.0, 2, 1.0).unwrap_err();
        assert!(err.to_string().contains("a >= n"));
    }

    #[test]
    fn cycle_reversal_matches_canonical_moves() {
        for n in 4..12 {
            let mut rng = seeded_rng(n as u64);
            let x = Tour::random(n, &mut rng);
            for mv in moves(n) {
                let mut c = Cycle::new(x.order().to_vec());
                c.apply(mv);
                assert_eq!(c.to_tour(), crate::neighborhood::apply_move(&x, mv));
                for (p, &v) in c.order.iter().enumerate() {
                    assert_eq!(c.pos[v], p);
                }
            }
        }
    }

    #[test]
    fn equal_weights_accept_everything() {
        let inst = Instance::constant(7, 0.5).unwrap();
        let s = CoolingSchedule::Constant { temperature: 0.3 };
        let trace = simulated_annealing(&inst, &s, &AnnealOptions::new(5000), &Tour::identity(7), 1).unwrap();
        assert_eq!(trace.accepted_total, 5000);
        assert!(trace.lengths.iter().all(|&j| (j - 3.5).abs() < 1e-9));
    }

    #[test]
    fn near_zero_temperature_only_descends() {
        let inst = Instance::generate(12, WeightModel::ContinuousUniform, 4).unwrap();
        let s = CoolingSchedule::Constant { temperature: 1e-12 };
        let x0 = Tour::random(12, &mut seeded_rng(2));
        let trace = simulated_annealing(&inst, &s, &AnnealOptions::new(20_000), &x0, 3).unwrap();
        assert!(trace.lengths.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        assert!(trace.final_length < inst.tour_length(&x0));
        assert!((trace.final_length - trace.lengths.last().unwrap()).abs() < 1e-9);
    }

    #[test]
    fn trace_recording_and_csv() {
        let inst = Instance::generate(6, WeightModel::ContinuousUniform, 4).unwrap();
        let s = CoolingSchedule::Logarithmic { a: 6.0 };
        let opts = AnnealOptions { iterations: 100, record_every: 10, lazy: true };
        let t1 = simulated_annealing(&inst, &s, &opts, &Tour::identity(6), 9).unwrap();
        let t2 = simulated_annealing(&inst, &s, &opts, &Tour::identity(6), 9).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(t1.steps, (1..=10).map(|k| k * 10).collect::<Vec<_>>());
        let mut buf = Vec::new();
        t1.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("step,J,accepted\n10,"));
        assert_eq!(text.lines().count(), 11);
    }

    #[test]
    fn preconditions() {
        let inst = Instance::generate(3, WeightModel::ContinuousUniform, 4).unwrap();
        let s = CoolingSchedule::Constant { temperature: 1.0 };
        assert!(simulated_annealing(&inst, &s, &AnnealOptions::new(1), &Tour::identity(3), 0).is_err());
        let inst = Instance::generate(5, WeightModel::ContinuousUniform, 4).unwrap();
        assert!(simulated_annealing(&inst, &s, &AnnealOptions::new(0), &Tour::identity(5), 0).is_err());
        let bad = CoolingSchedule::Constant { temperature: 0.0 };
        assert!(simulated_annealing(&inst, &bad, &AnnealOptions::new(1), &Tour::identity(5), 0).is_err());
        assert!(quenched_sample(&inst, -1.0, 10, 0).is_err());
        assert!(AnnealedChain::new(5, 0, 1.0, 0).is_err());
    }

    #[test]
    fn n3_quenched_sample_is_the_unique_tour() {
        let inst = Instance::generate(3, WeightModel::ContinuousUniform, 8).unwrap();
        let j = inst.weights().iter().sum::<f64>();
        for burn in [1, 10, 1000] {
            assert!((quenched_sample(&inst, 2.0, burn, burn).unwrap() - j).abs() < 1e-15);
        }
    }

    #[test]
    fn annealed_chain_stays_on_grid_and_tracks_length_exactly() {
        let mut chain = AnnealedChain::new(8, 5, 1.5, 12).unwrap();
        for _ in 0..200 {
            chain.run(500);
            assert_eq!(chain.length(), chain.recomputed_length());
            let st = chain.state();
            for &w in &st.weights {
                let l = (w * 5.0).round();
                assert_eq!(w, l / 5.0);
                assert!((0.0..=1.0).contains(&w));
            }
        }
    }

    #[test]
    fn annealed_chain_at_beta_zero_has_uniform_weights() {
        let mut chain = AnnealedChain::new(6, 10, 0.0, 3).unwrap();
        chain.run(200_000);
        let mut sum = 0.0;
        let mut count = 0usize;
        for _ in 0..400 {
            chain.run(5_000);
            let st = chain.state();
            sum += st.weights.iter().sum::<f64>();
            count += st.weights.len();
        }
        let mean = sum / count as f64;
        // 400 snapshots x 15 weights, snapshots ~ independent after 5000 steps
        let sigma = ((10.0 + 2.0) / 120.0 / count as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn quenched_samples_are_order_deterministic() {
        let cfg = QuenchedConfig {
            n: 8,
            model: WeightModel::grid(50),
            beta: 2.0,
            burn_in: 1000,
            count: 16,
            seed: 5,
        };
        let a = quenched_samples(&cfg).unwrap();
        let b = quenched_samples(&cfg).unwrap();
        assert_eq!(a, b);
        let inst = Instance::generate(8, WeightModel::grid(50), 5 + 3).unwrap();
        assert_eq!(a[3], quenched_sample(&inst, 2.0, 1000, derive_seed(8, 0)).unwrap());
    }
}
