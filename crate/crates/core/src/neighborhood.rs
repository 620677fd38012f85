//! The 2-opt neighborhood and the state graph it induces on canonical tours.
//!
//! A move `(i, k)` removes the cycle edges at positions `i` and `k` and
//! reconnects by reversing `order[i+1..=k]`. Moves whose two removed edges
//! are adjacent are excluded, leaving exactly `n(n-3)/2` moves per tour, each
//! producing a distinct neighbor.

use std::collections::{HashMap, VecDeque};
use std::io::Write;

use rand::Rng;

use crate::error::{Error, Result};
use crate::instance::{canonicalize, Tour};

/// Default cap on `n` for [`StateGraph::build`]; `(8-1)!/2 = 2520` states.
pub const DEFAULT_MAX_GRAPH_N: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TwoOptMove {
    i: usize,
    k: usize,
}

impl TwoOptMove {
    pub fn new(n: usize, i: usize, k: usize) -> Result<Self> {
        let mv = TwoOptMove { i, k };
        mv.validate(n)?;
        Ok(mv)
    }

    #[cfg(test)]
    pub(crate) const fn new_unchecked(i: usize, k: usize) -> Self {
        TwoOptMove { i, k }
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        let TwoOptMove { i, k } = *self;
        if !(i < k && k < n) {
            return Err(Error::invalid(format!("2-opt move ({i}, {k}) needs i < k < n = {n}")));
        }
        if k == i + 1 || (i == 0 && k == n - 1) {
            return Err(Error::invalid(format!(
                "2-opt move ({i}, {k}) removes adjacent edges and leaves the tour unchanged"
            )));
        }
        Ok(())
    }

    /// The `index`-th move in the fixed order (i ascending, then k).
    pub fn from_index(n: usize, index: usize) -> Result<Self> {
        if index >= move_count(n) {
            return Err(Error::out_of_range("move index", index, format!("[0, {})", move_count(n))));
        }
        let mut rest = index;
        let mut i = 0;
        loop {
            let row = if i == 0 { n - 3 } else { n - i - 2 };
            if rest < row {
                return Ok(TwoOptMove { i, k: i + 2 + rest });
            }
            rest -= row;
            i += 1;
        }
    }
}

/// `n(n-3)/2`, the degree of the state graph (0 for `n = 3`).
pub const fn move_count(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 3) / 2
    }
}

/// All valid moves in the fixed deterministic order.
pub fn moves(n: usize) -> impl Iterator<Item = TwoOptMove> {
    (0..n).flat_map(move |i| {
        let last = if i == 0 { n.saturating_sub(2) } else { n.saturating_sub(1) };
        (i + 2..=last).map(move |k| TwoOptMove { i, k })
    })
}

/// Precomputed move list, indexed by a single uniform draw.
#[derive(Debug, Clone)]
pub struct MoveTable {
    moves: Vec<TwoOptMove>,
}

impl MoveTable {
    pub fn new(n: usize) -> Self {
        MoveTable { moves: moves(n).collect() }
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn get(&self, index: usize) -> TwoOptMove {
        self.moves[index]
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> TwoOptMove {
        self.moves[rng.random_range(0..self.moves.len())]
    }
}

/// Reverses the segment in place on a raw cycle ordering.
#[inline]
pub(crate) fn reverse_segment(order: &mut [usize], mv: TwoOptMove) {
    order[mv.i + 1..=mv.k].reverse();
}

/// Applies `mv` and re-canonicalizes.
pub fn apply_move(tour: &Tour, mv: TwoOptMove) -> Tour {
    let mut order = tour.order().to_vec();
    reverse_segment(&mut order, mv);
    canonicalize(&mut order);
    Tour::from_canonical_unchecked(order)
}

/// All 2-opt neighbors of `tour`, in move order. Empty for `n = 3`.
pub fn neighbors(tour: &Tour) -> Vec<Tour> {
    moves(tour.n()).map(|mv| apply_move(tour, mv)).collect()
}

/// One neighbor drawn uniformly from the `n(n-3)/2` candidates.
pub fn uniform_neighbor<R: Rng + ?Sized>(tour: &Tour, rng: &mut R) -> Result<Tour> {
    let n = tour.n();
    if n < 4 {
        return Err(Error::invalid("a tour on 3 nodes has no 2-opt neighbor"));
    }
    let mv = TwoOptMove::from_index(n, rng.random_range(0..move_count(n)))?;
    Ok(apply_move(tour, mv))
}

/// The undirected state graph `H` over all canonical tours of `K_n`.
#[derive(Debug, Clone)]
pub struct StateGraph {
    n: usize,
    tours: Vec<Tour>,
    index: HashMap<Tour, usize>,
    adjacency: Vec<Vec<usize>>,
}

impl StateGraph {
    pub fn build(n: usize) -> Result<Self> {
        Self::build_with_limit(n, DEFAULT_MAX_GRAPH_N)
    }

    pub fn build_with_limit(n: usize, max_n: usize) -> Result<Self> {
        if n < 3 || n > max_n {
            return Err(Error::out_of_range("n", n, format!("[3, {max_n}]")));
        }
        let tours = Tour::enumerate(n);
        let index: HashMap<Tour, usize> = tours.iter().cloned().enumerate().map(|(k, t)| (t, k)).collect();
        let adjacency = tours.iter().map(|t| neighbors(t).iter().map(|y| index[y]).collect()).collect();
        Ok(StateGraph { n, tours, index, adjacency })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.tours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tours.is_empty()
    }

    pub fn tours(&self) -> &[Tour] {
        &self.tours
    }

    pub fn index_of(&self, tour: &Tour) -> Option<usize> {
        self.index.get(tour).copied()
    }

    pub fn neighbors_of(&self, state: usize) -> &[usize] {
        &self.adjacency[state]
    }

    pub fn is_regular(&self, degree: usize) -> bool {
        self.adjacency.iter().all(|a| a.len() == degree)
    }

    pub fn is_symmetric(&self) -> bool {
        self.adjacency.iter().enumerate().all(|(x, adj)| adj.iter().all(|&y| self.adjacency[y].contains(&x)))
    }

    /// Hop distances from `source`; `usize::MAX` marks unreachable states.
    pub fn bfs_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(x) = queue.pop_front() {
            for &y in &self.adjacency[x] {
                if dist[y] == usize::MAX {
                    dist[y] = dist[x] + 1;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    pub fn eccentricity(&self, state: usize) -> usize {
        self.bfs_distances(state).into_iter().max().unwrap_or(0)
    }

    pub fn is_connected(&self) -> bool {
        self.is_empty() || self.bfs_distances(0).iter().all(|&d| d != usize::MAX)
    }

    pub fn diameter(&self) -> usize {
        (0..self.len()).map(|x| self.eccentricity(x)).max().unwrap_or(0)
    }

    /// Writes `state_index_a,state_index_b`, one line per undirected edge with `a < b`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "state_index_a,state_index_b")?;
        for (a, adj) in self.adjacency.iter().enumerate() {
            let mut adj = adj.clone();
            adj.sort_unstable();
            for b in adj.into_iter().filter(|&b| b > a) {
                writeln!(out, "{a},{b}")?;
            }
        }
        Ok(())
    }
}
