//! Random TSP instances on the complete graph and canonical tours.
//!
//! Edge weights are stored in lexicographic edge order: `(0,1), (0,2), ...,
//! (0,n-1), (1,2), ...`. A [`Tour`] is kept in canonical form (starts at node
//! 0, `order[1] < order[n-1]`) so that tours and Hamiltonian cycles are in
//! one-to-one correspondence.

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::neighborhood::TwoOptMove;
use crate::rng::seeded_rng;

/// Distribution of a single edge weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum WeightModel {
    /// `U[0,1]`.
    #[serde(rename = "uniform")]
    ContinuousUniform,
    /// Uniform over the grid `{0, 1/N, ..., 1}`.
    #[serde(rename = "grid")]
    DiscreteGrid {
        #[serde(rename = "N")]
        levels: u32,
    },
}

impl WeightModel {
    pub fn grid(levels: u32) -> Self {
        WeightModel::DiscreteGrid { levels }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            WeightModel::DiscreteGrid { levels: 0 } => Err(Error::invalid("grid model needs N >= 1")),
            _ => Ok(()),
        }
    }

    /// Draws one weight. Grid weights are computed as `i / N` from an integer
    /// level so they are exact grid members.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            WeightModel::ContinuousUniform => rng.random::<f64>(),
            WeightModel::DiscreteGrid { levels } => grid_value(rng.random_range(0..=levels), levels),
        }
    }
}

#[inline]
pub(crate) fn grid_value(level: u32, levels: u32) -> f64 {
    level as f64 / levels as f64
}

/// Number of edges of the complete graph on `n` nodes.
pub const fn edge_count(n: usize) -> usize {
    n * (n - 1) / 2
}

/// Lexicographic index of the edge `{i, j}`. Order of the arguments does not matter.
#[inline]
pub fn edge_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Inverse of [`edge_index`]: returns `(i, j)` with `i < j`.
pub fn edge_endpoints(n: usize, index: usize) -> (usize, usize) {
    assert!(index < edge_count(n), "edge index {index} out of range for n = {n}");
    let mut rest = index;
    let mut a = 0;
    loop {
        let row = n - a - 1;
        if rest < row {
            return (a, a + 1 + rest);
        }
        rest -= row;
        a += 1;
    }
}

/// A Hamiltonian cycle in canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Tour {
    order: Vec<usize>,
}

impl Tour {
    /// Canonicalizes an arbitrary cyclic ordering of `0..n`.
    pub fn from_cycle(cycle: &[usize]) -> Result<Self> {
        let n = cycle.len();
        if n < 3 {
            return Err(Error::out_of_range("n", n, ">= 3"));
        }
        let mut seen = vec![false; n];
        for &v in cycle {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid(format!("{cycle:?} is not a permutation of 0..{n}")));
            }
        }
        let mut order = cycle.to_vec();
        canonicalize(&mut order);
        Ok(Tour { order })
    }

    /// The tour `0, 1, ..., n-1`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 3);
        Tour { order: (0..n).collect() }
    }

    /// A uniformly random canonical tour.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        assert!(n >= 3);
        let mut order: Vec<usize> = (0..n).collect();
        order[1..].shuffle(rng);
        canonicalize(&mut order);
        Tour { order }
    }

    /// All `(n-1)!/2` canonical tours, in lexicographic order.
    pub fn enumerate(n: usize) -> Vec<Tour> {
        assert!(n >= 3);
        (1..n)
            .permutations(n - 1)
            .filter(|p| p[0] < p[n - 2])
            .map(|p| {
                let mut order = Vec::with_capacity(n);
                order.push(0);
                order.extend(p);
                Tour { order }
            })
            .collect()
    }

    pub(crate) fn from_canonical_unchecked(order: Vec<usize>) -> Self {
        debug_assert!(is_canonical(&order));
        Tour { order }
    }

    pub fn n(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Edges of the cycle as `(a, b)` pairs in visiting order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.order.len();
        (0..n).map(move |k| (self.order[k], self.order[(k + 1) % n]))
    }

    /// Lexicographic edge indices of the cycle's edges, sorted.
    pub fn edge_indices(&self) -> Vec<usize> {
        let n = self.n();
        let mut idx: Vec<usize> = self.edges().map(|(a, b)| edge_index(n, a, b)).collect();
        idx.sort_unstable();
        idx
    }
}

impl TryFrom<Vec<usize>> for Tour {
    type Error = Error;

    fn try_from(order: Vec<usize>) -> Result<Self> {
        Tour::from_cycle(&order)
    }
}

impl From<Tour> for Vec<usize> {
    fn from(t: Tour) -> Self {
        t.order
    }
}

pub(crate) fn is_canonical(order: &[usize]) -> bool {
    let n = order.len();
    order[0] == 0 && order[1] < order[n - 1]
}

/// Rotates node 0 to the front and fixes the orientation in place.
pub(crate) fn canonicalize(order: &mut [usize]) {
    let n = order.len();
    if order[0] != 0 {
        let at = order.iter().position(|&v| v == 0).expect("node 0 present");
        order.rotate_left(at);
    }
    if order[1] > order[n - 1] {
        order[1..].reverse();
    }
}

/// A random TSP instance on the complete graph `K_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "InstanceFile")]
pub struct Instance {
    n: usize,
    model: WeightModel,
    seed: u64,
    weights: Vec<f64>,
}

#[derive(Deserialize)]
struct InstanceFile {
    n: usize,
    model: WeightModel,
    seed: u64,
    weights: Vec<f64>,
}

impl TryFrom<InstanceFile> for Instance {
    type Error = Error;

    fn try_from(f: InstanceFile) -> Result<Self> {
        Instance::from_weights(f.n, f.model, f.seed, f.weights)
    }
}

impl Instance {
    /// Draws every edge weight independently from `model` using a ChaCha8
    /// stream seeded with `seed`, in lexicographic edge order.
    pub fn generate(n: usize, model: WeightModel, seed: u64) -> Result<Self> {
        if n < 3 {
            return Err(Error::out_of_range("n", n, ">= 3"));
        }
        model.validate()?;
        let mut rng = seeded_rng(seed);
        let weights = (0..edge_count(n)).map(|_| model.draw(&mut rng)).collect();
        Ok(Instance { n, model, seed, weights })
    }

    /// Wraps an explicit weight vector. Grid weights are snapped to `i/N` after
    /// checking they lie within `1e-9` of a grid point.
    pub fn from_weights(n: usize, model: WeightModel, seed: u64, weights: Vec<f64>) -> Result<Self> {
        if n < 3 {
            return Err(Error::out_of_range("n", n, ">= 3"));
        }
        model.validate()?;
        if weights.len() != edge_count(n) {
            return Err(Error::invalid(format!(
                "expected {} weights for n = {n}, got {}",
                edge_count(n),
                weights.len()
            )));
        }
        if let Some(bad) = weights.iter().find(|w| !(0.0..=1.0).contains(*w)) {
            return Err(Error::out_of_range("weight", bad, "[0, 1]"));
        }
        let weights = match model {
            WeightModel::ContinuousUniform => weights,
            WeightModel::DiscreteGrid { levels } => weights
                .iter()
                .map(|&w| {
                    let scaled = w * levels as f64;
                    let level = scaled.round();
                    if (scaled - level).abs() > 1e-9 {
                        Err(Error::invalid(format!("weight {w} is not a multiple of 1/{levels}")))
                    } else {
                        Ok(grid_value(level as u32, levels))
                    }
                })
                .collect::<Result<Vec<_>>>()?,
        };
        Ok(Instance { n, model, seed, weights })
    }

    /// Instance with every weight equal to `w`.
    pub fn constant(n: usize, w: f64) -> Result<Self> {
        Self::from_weights(n, WeightModel::ContinuousUniform, 0, vec![w; edge_count(n)])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn model(&self) -> WeightModel {
        self.model
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn weight(&self, a: usize, b: usize) -> f64 {
        self.weights[edge_index(self.n, a, b)]
    }

    /// Row-major `n x n` symmetric weight matrix with a zero diagonal.
    pub fn dense_matrix(&self) -> Vec<f64> {
        let n = self.n;
        let mut m = vec![0.0; n * n];
        for (idx, &w) in self.weights.iter().enumerate() {
            let (a, b) = edge_endpoints(n, idx);
            m[a * n + b] = w;
            m[b * n + a] = w;
        }
        m
    }

    /// `J(x | w)`: sum of the weights of the cycle's edges.
    pub fn tour_length(&self, tour: &Tour) -> f64 {
        assert_eq!(tour.n(), self.n, "tour and instance disagree on n");
        tour.edges().map(|(a, b)| self.weight(a, b)).sum()
    }

    /// Change in tour length caused by applying `mv` to `tour`, computed from
    /// the two removed and two added edges.
    pub fn tour_length_delta(&self, tour: &Tour, mv: TwoOptMove) -> Result<f64> {
        mv.validate(self.n)?;
        let (i, k) = (mv.i(), mv.k());
        let o = tour.order();
        let (a, b) = (o[i], o[i + 1]);
        let (c, d) = (o[k], o[(k + 1) % self.n]);
        Ok(self.weight(a, c) + self.weight(b, d) - self.weight(a, b) - self.weight(c, d))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::neighborhood::{apply_move, moves};
    use proptest::prelude::*;
    use rand::Rng;

    #[test]
    fn small_instances_have_expected_edge_counts() {
        let inst = Instance::generate(3, WeightModel::ContinuousUniform, 1).unwrap();
        assert_eq!(inst.weights().len(), 3);
        assert!(inst.weights().iter().all(|w| (0.0..=1.0).contains(w)));

        let inst = Instance::generate(100, WeightModel::grid(50), 2).unwrap();
        assert_eq!(inst.weights().len(), 4950);
        for &w in inst.weights() {
            let i = (w * 50.0).round();
            assert_eq!(w, i / 50.0);
        }

        let inst = Instance::generate(4, WeightModel::grid(1), 3).unwrap();
        assert_eq!(inst.weights().len(), 6);
        assert!(inst.weights().iter().all(|&w| w == 0.0 || w == 1.0));
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert!(Instance::generate(2, WeightModel::ContinuousUniform, 0).is_err());
        assert!(Instance::generate(5, WeightModel::grid(0), 0).is_err());
        assert!(Instance::from_weights(4, WeightModel::ContinuousUniform, 0, vec![0.5; 5]).is_err());
        assert!(Instance::from_weights(3, WeightModel::ContinuousUniform, 0, vec![0.5, 1.5, 0.1]).is_err());
        assert!(Instance::from_weights(3, WeightModel::grid(4), 0, vec![0.25, 0.3, 0.5]).is_err());
    }

    #[test]
    fn generation_is_deterministic() {
        let a = Instance::generate(20, WeightModel::ContinuousUniform, 99).unwrap();
        let b = Instance::generate(20, WeightModel::ContinuousUniform, 99).unwrap();
        let c = Instance::generate(20, WeightModel::ContinuousUniform, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.weights(), c.weights());
    }

    #[test]
    fn grid_weight_mean_is_one_half() {
        let inst = Instance::generate(450, WeightModel::grid(7), 5).unwrap();
        let w = inst.weights();
        assert!(w.len() >= 100_000);
        let mean = w.iter().sum::<f64>() / w.len() as f64;
        // Var of the uniform grid on {0..N}/N is (N+2)/(12N).
        let sigma = ((7.0 + 2.0) / (12.0 * 7.0) / w.len() as f64).sqrt();
        assert!((mean - 0.5).abs() < 3.0 * sigma, "mean {mean}");
    }

    #[test]
    fn tour_length_extremes_and_hand_sum() {
        let zeros = Instance::constant(6, 0.0).unwrap();
        let ones = Instance::constant(6, 1.0).unwrap();
        let t = Tour::identity(6);
        assert_eq!(zeros.tour_length(&t), 0.0);
        assert_eq!(ones.tour_length(&t), 6.0);

        let w = vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6]; // (0,1) (0,2) (0,3) (1,2) (1,3) (2,3)
        let inst = Instance::from_weights(4, WeightModel::ContinuousUniform, 0, w).unwrap();
        let expected = 0.1 + 0.4 + 0.6 + 0.3;
        assert!((inst.tour_length(&Tour::identity(4)) - expected).abs() < 1e-15);
    }

    #[test]
    fn delta_matches_recomputation_for_every_move_on_n6() {
        let inst = Instance::generate(6, WeightModel::ContinuousUniform, 17).unwrap();
        let mut rng = seeded_rng(4);
        let tour = Tour::random(6, &mut rng);
        let all: Vec<_> = moves(6).collect();
        assert_eq!(all.len(), 9);
        for mv in all {
            let full = inst.tour_length(&apply_move(&tour, mv)) - inst.tour_length(&tour);
            let delta = inst.tour_length_delta(&tour, mv).unwrap();
            assert!((full - delta).abs() < 1e-12, "{mv:?}: {full} vs {delta}");
        }
    }

    #[test]
    fn delta_is_zero_for_constant_weights() {
        let inst = Instance::constant(7, 0.37).unwrap();
        let tour = Tour::identity(7);
        for mv in moves(7) {
            assert!(inst.tour_length_delta(&tour, mv).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn invalid_move_is_rejected() {
        let inst = Instance::constant(6, 0.5).unwrap();
        let t = Tour::identity(6);
        assert!(inst.tour_length_delta(&t, TwoOptMove::new_unchecked(2, 3)).is_err());
        assert!(inst.tour_length_delta(&t, TwoOptMove::new_unchecked(0, 5)).is_err());
        assert!(inst.tour_length_delta(&t, TwoOptMove::new_unchecked(1, 9)).is_err());
    }

    #[test]
    fn json_round_trip_and_layout() {
        let inst = Instance::generate(5, WeightModel::grid(50), 11).unwrap();
        let s = inst.to_json().unwrap();
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["model"]["kind"], "grid");
        assert_eq!(v["model"]["N"], 50);
        assert_eq!(v["weights"].as_array().unwrap().len(), 10);
        assert_eq!(Instance::from_json(&s).unwrap(), inst);

        let u = Instance::generate(4, WeightModel::ContinuousUniform, 3).unwrap();
        let v: serde_json::Value = serde_json::from_str(&u.to_json().unwrap()).unwrap();
        assert_eq!(v["model"], serde_json::json!({"kind": "uniform"}));

        // every weight must survive the text form bit for bit
        let big = Instance::generate(60, WeightModel::ContinuousUniform, 42).unwrap();
        assert_eq!(Instance::from_json(&big.to_json().unwrap()).unwrap(), big);
    }

    #[test]
    fn enumerate_counts() {
        assert_eq!(Tour::enumerate(3).len(), 1);
        assert_eq!(Tour::enumerate(4).len(), 3);
        assert_eq!(Tour::enumerate(7).len(), 360);
    }

    proptest! {
        #[test]
        fn edge_index_is_a_bijection(n in 2usize..60, seed in any::<u64>()) {
            let mut rng = seeded_rng(seed);
            let i = rng.random_range(0..n);
            let mut j = rng.random_range(0..n);
            if i == j { j = (j + 1) % n; }
            let idx = edge_index(n, i, j);
            prop_assert!(idx < edge_count(n));
            prop_assert_eq!(edge_endpoints(n, idx), (i.min(j), i.max(j)));
        }

        #[test]
        fn length_is_invariant_under_rotation_and_reversal(
            n in 3usize..30, seed in any::<u64>(), shift in 0usize..30, flip in any::<bool>()
        ) {
            let inst = Instance::generate(n, WeightModel::ContinuousUniform, seed).unwrap();
            let mut rng = seeded_rng(seed ^ 0xabc);
            let tour = Tour::random(n, &mut rng);
            let mut raw = tour.order().to_vec();
            raw.rotate_left(shift % n);
            if flip { raw.reverse(); }
            let again = Tour::from_cycle(&raw).unwrap();
            prop_assert_eq!(&again, &tour);
            let direct: f64 = (0..n).map(|k| inst.weight(raw[k], raw[(k + 1) % n])).sum();
            prop_assert!((direct - inst.tour_length(&tour)).abs() < 1e-12);
        }
    }
}
