//! Exact maximum independent set.
//!
//! Branch and bound over bitset candidate sets: branch on the candidate of
//! largest degree (ties to the lowest index), include it first, and prune with
//! a greedy clique cover of the remaining candidates. Exceeding the node budget
//! is an error; the solver never returns an unproven answer.
//!
//! For vertex-transitive instances the clique cover is far too weak (Kneser
//! graphs with `n < 3k` are triangle-free), so the solver also accepts an
//! [`AffineCertificate`]. It encodes the equality case of the ratio bound: in a
//! regular graph whose ratio bound `V·(-λmin)/(d-λmin)` is attained, every
//! independent set of exactly that size has an indicator lying in the span of
//! the constant vector and the `λmin` eigenspace. When the caller can name a
//! basis of that span as per-vertex features, every search node carries the
//! linear system "indicator = 1 on chosen vertices, 0 on excluded ones", and a
//! node whose system pins the function down has at most one completion.

use std::rc::Rc;

use crate::error::{Error, Result};
use crate::graph::{Bits, Graph};

/// Default search-node budget.
pub const DEFAULT_NODE_LIMIT: u64 = 200_000_000;

/// Largest graph on which an uncapped, uncertified enumeration is accepted.
pub const ENUMERATION_VERTEX_GUARD: usize = 200;

const COEF_EPS: f64 = 1e-9;
const RHS_EPS: f64 = 1e-7;
const VALUE_EPS: f64 = 1e-6;

/// Linear description of every maximum independent set of a graph whose
/// ratio bound is tight.
///
/// Vertex `v` carries the feature row `(1, b_0, .., b_{coords-1})` where `b_i`
/// is bit `i` of `features[v]`. The caller asserts that every independent set
/// of size `bound` has an indicator of the form `a_0 + Σ a_i b_i(v)`.
#[derive(Debug, Clone)]
pub struct AffineCertificate {
    features: Vec<u64>,
    coords: usize,
    bound: usize,
    rank: usize,
}

impl AffineCertificate {
    pub fn new(features: Vec<u64>, coords: usize, bound: usize) -> Self {
        assert!(coords <= 64);
        let mut ech = Echelon::new(coords + 1);
        for &f in &features {
            if ech.rank() == coords + 1 {
                break;
            }
            let _ = ech.add(feature_row(f, coords), 0.0);
        }
        let rank = ech.rank();
        AffineCertificate {
            features,
            coords,
            bound,
            rank,
        }
    }

    pub fn bound(&self) -> usize {
        self.bound
    }

    fn dim(&self) -> usize {
        self.coords + 1
    }

    fn row(&self, v: usize) -> Vec<f64> {
        feature_row(self.features[v], self.coords)
    }
}

fn feature_row(bits: u64, coords: usize) -> Vec<f64> {
    let mut row = Vec::with_capacity(coords + 1);
    row.push(1.0);
    row.extend((0..coords).map(|i| (bits >> i & 1) as f64));
    row
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Added {
    Pivot,
    Redundant,
    Inconsistent,
}

/// Reduced row echelon form of a growing linear system, in floating point.
#[derive(Debug, Clone)]
struct Echelon {
    dim: usize,
    rows: Vec<(usize, Vec<f64>, f64)>,
}

impl Echelon {
    fn new(dim: usize) -> Self {
        Echelon {
            dim,
            rows: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce(&self, coef: &mut [f64], rhs: &mut f64) {
        for (pivot, row, r) in &self.rows {
            let f = coef[*pivot];
            if f != 0.0 {
                for (c, x) in coef.iter_mut().zip(row) {
                    *c -= f * x;
                }
                *rhs -= f * r;
            }
        }
    }

    fn classify(coef: &[f64], rhs: f64) -> (Added, usize) {
        let (col, max) = coef
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |(bi, bm), (i, &c)| {
                if c.abs() > bm {
                    (i, c.abs())
                } else {
                    (bi, bm)
                }
            });
        if max > COEF_EPS {
            (Added::Pivot, col)
        } else if rhs.abs() > RHS_EPS {
            (Added::Inconsistent, 0)
        } else {
            // Residuals between the two tolerances are treated as consistent;
            // that can only weaken pruning, never cut a real solution.
            (Added::Redundant, 0)
        }
    }

    /// Outcome of adding a row, without mutating.
    fn probe(&self, mut coef: Vec<f64>, mut rhs: f64) -> Added {
        self.reduce(&mut coef, &mut rhs);
        Self::classify(&coef, rhs).0
    }

    fn add(&mut self, mut coef: Vec<f64>, mut rhs: f64) -> Added {
        debug_assert_eq!(coef.len(), self.dim);
        self.reduce(&mut coef, &mut rhs);
        let (kind, pivot) = Self::classify(&coef, rhs);
        if kind != Added::Pivot {
            return kind;
        }
        let p = coef[pivot];
        for c in coef.iter_mut() {
            *c /= p;
        }
        rhs /= p;
        coef[pivot] = 1.0;
        for (_, row, r) in self.rows.iter_mut() {
            let f = row[pivot];
            if f != 0.0 {
                for (x, c) in row.iter_mut().zip(&coef) {
                    *x -= f * c;
                }
                row[pivot] = 0.0;
                *r -= f * rhs;
            }
        }
        self.rows.push((pivot, coef, rhs));
        Added::Pivot
    }

    /// A solution with every free variable at zero.
    fn solution(&self) -> Vec<f64> {
        let mut a = vec![0.0; self.dim];
        for (pivot, _, rhs) in &self.rows {
            a[*pivot] = *rhs;
        }
        a
    }
}

/// A maximum independent set and the search effort spent proving it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MisOutcome {
    pub size: usize,
    pub witness: Vec<usize>,
    pub nodes: u64,
}

/// All (or the first `limit`) maximum independent sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub alpha: usize,
    pub solutions: Vec<Vec<usize>>,
    /// False when the solution limit cut the enumeration short.
    pub complete: bool,
    pub nodes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Mode {
    Optimize { stop_at: Option<usize> },
    Decide(usize),
    Enumerate { target: usize, limit: usize },
}

/// Exact solver over a borrowed graph.
#[derive(Debug, Clone)]
pub struct MisSolver<'g> {
    graph: &'g Graph,
    node_limit: u64,
    certificate: Option<&'g AffineCertificate>,
    upper_bound: Option<usize>,
    initial: Option<Vec<usize>>,
}

impl<'g> MisSolver<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        MisSolver {
            graph,
            node_limit: DEFAULT_NODE_LIMIT,
            certificate: None,
            upper_bound: None,
            initial: None,
        }
    }

    pub fn with_node_limit(mut self, limit: u64) -> Self {
        self.node_limit = limit;
        self
    }

    /// Attaches an affine certificate; its bound doubles as an upper bound.
    pub fn with_certificate(mut self, cert: &'g AffineCertificate) -> Self {
        assert_eq!(cert.features.len(), self.graph.vertex_count());
        self.certificate = Some(cert);
        self.upper_bound = Some(self.upper_bound.map_or(cert.bound, |u| u.min(cert.bound)));
        self
    }

    /// A proven upper bound on the independence number.
    pub fn with_upper_bound(mut self, bound: usize) -> Self {
        self.upper_bound = Some(self.upper_bound.map_or(bound, |u| u.min(bound)));
        self
    }

    /// A known independent set to seed the incumbent.
    pub fn with_initial(mut self, set: Vec<usize>) -> Self {
        debug_assert!(self.graph.is_independent(&set));
        self.initial = Some(set);
        self
    }

    /// Independence number with a witness.
    pub fn maximum(&self) -> Result<MisOutcome> {
        let mut nodes = 0;
        let mut ceiling = None;
        if let Some(ub) = self.upper_bound {
            let mut s = self.search(Mode::Decide(ub), nodes)?;
            nodes = s.nodes;
            if s.best > ub {
                return Err(Error::domain(format!(
                    "upper bound {ub} violated by an independent set of size {}",
                    s.best
                )));
            }
            if s.best == ub {
                return Ok(MisOutcome {
                    size: ub,
                    witness: std::mem::take(&mut s.witness),
                    nodes,
                });
            }
            ceiling = ub.checked_sub(1);
        }
        let s = self.search(Mode::Optimize { stop_at: ceiling }, nodes)?;
        Ok(MisOutcome {
            size: s.best,
            witness: s.witness,
            nodes: s.nodes,
        })
    }

    /// Whether an independent set of at least `target` vertices exists, with
    /// one such set.
    pub fn find_of_size(&self, target: usize) -> Result<Option<Vec<usize>>> {
        let s = self.search(Mode::Decide(target), 0)?;
        Ok((s.best >= target).then_some(s.witness))
    }

    /// Every maximum independent set, stopping after `limit` of them.
    pub fn enumerate_maximum(&self, limit: usize) -> Result<Enumeration> {
        let best = self.maximum()?;
        let certified = self.certificate.is_some_and(|c| c.bound == best.size);
        if !certified && limit == usize::MAX && self.graph.vertex_count() > ENUMERATION_VERTEX_GUARD
        {
            return Err(Error::GuardExceeded {
                what: "enumerating maximum independent sets without a certificate".into(),
                size: self.graph.vertex_count() as u128,
                limit: ENUMERATION_VERTEX_GUARD as u128,
            });
        }
        let s = self.search(
            Mode::Enumerate {
                target: best.size,
                limit,
            },
            best.nodes,
        )?;
        let mut solutions = s.solutions;
        solutions.sort();
        Ok(Enumeration {
            alpha: best.size,
            complete: solutions.len() < limit || !s.stopped,
            solutions,
            nodes: s.nodes,
        })
    }

    fn search(&self, mode: Mode, nodes_so_far: u64) -> Result<Search<'_>> {
        let cert = self.certificate.filter(|c| match mode {
            Mode::Decide(t) | Mode::Enumerate { target: t, .. } => c.bound == t,
            Mode::Optimize { .. } => false,
        });
        let mut s = Search {
            graph: self.graph,
            cert,
            mode,
            best: 0,
            witness: Vec::new(),
            solutions: Vec::new(),
            nodes: nodes_so_far,
            limit: self.node_limit,
            stopped: false,
        };
        if let Mode::Optimize { .. } = mode {
            let seed = match &self.initial {
                Some(init) => init.clone(),
                None => greedy(self.graph),
            };
            s.record(seed);
        }
        s.run()?;
        Ok(s)
    }
}

/// Independent set built by scanning vertices in increasing degree order.
pub fn greedy(graph: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..graph.vertex_count()).collect();
    order.sort_by_key(|&v| (graph.degree(v), v));
    let mut blocked = Bits::new(graph.vertex_count());
    let mut chosen = Vec::new();
    for v in order {
        if !blocked.contains(v) {
            chosen.push(v);
            blocked.insert(v);
            for w in graph.neighbours(v).iter() {
                blocked.insert(w);
            }
        }
    }
    chosen.sort_unstable();
    chosen
}

struct Node {
    chosen: Vec<usize>,
    candidates: Bits,
    system: Option<Rc<Echelon>>,
}

struct Search<'a> {
    graph: &'a Graph,
    cert: Option<&'a AffineCertificate>,
    mode: Mode,
    best: usize,
    witness: Vec<usize>,
    solutions: Vec<Vec<usize>>,
    nodes: u64,
    limit: u64,
    stopped: bool,
}

impl Search<'_> {
    fn need(&self) -> usize {
        match self.mode {
            Mode::Optimize { .. } => self.best + 1,
            Mode::Decide(t) | Mode::Enumerate { target: t, .. } => t,
        }
    }

    fn record(&mut self, mut set: Vec<usize>) {
        set.sort_unstable();
        match self.mode {
            Mode::Optimize { stop_at } => {
                if set.len() > self.best || self.witness.is_empty() {
                    self.best = set.len();
                    self.witness = set;
                    if stop_at.is_some_and(|s| self.best >= s) {
                        self.stopped = true;
                    }
                }
            }
            Mode::Decide(t) => {
                if set.len() >= t {
                    self.best = set.len();
                    self.witness = set;
                    self.stopped = true;
                }
            }
            Mode::Enumerate { target, limit } => {
                if set.len() >= target {
                    debug_assert_eq!(set.len(), target, "enumeration target below optimum");
                    self.best = self.best.max(set.len());
                    self.solutions.push(set);
                    if self.solutions.len() >= limit {
                        self.stopped = true;
                    }
                }
            }
        }
    }

    fn run(&mut self) -> Result<()> {
        let v = self.graph.vertex_count();
        let root = Node {
            chosen: Vec::new(),
            candidates: Bits::full(v),
            system: self.cert.map(|c| Rc::new(Echelon::new(c.dim()))),
        };
        let mut stack = vec![root];
        while let Some(node) = stack.pop() {
            if self.stopped {
                break;
            }
            self.nodes += 1;
            if self.nodes > self.limit {
                return Err(Error::Inexact {
                    nodes: self.nodes,
                    best: self.best,
                });
            }
            self.expand(node, &mut stack);
        }
        Ok(())
    }

    fn expand(&mut self, node: Node, stack: &mut Vec<Node>) {
        let Node {
            chosen,
            candidates,
            system,
        } = node;
        let need = self.need();
        let have = chosen.len();
        if candidates.is_empty() {
            self.record(chosen);
            return;
        }
        if have + candidates.count() < need {
            return;
        }
        if have + self.clique_cover(&candidates, need.saturating_sub(have)) < need {
            return;
        }
        if let (Some(cert), Some(sys)) = (self.cert, &system) {
            if sys.rank() == cert.rank {
                self.resolve(cert, sys, &chosen, &candidates);
                return;
            }
        }

        let mut branch = None;
        for u in candidates.iter() {
            let d = self.graph.neighbours(u).intersection_count(&candidates);
            if branch.is_none_or(|(_, bd)| d > bd) {
                branch = Some((u, d));
            }
        }
        let (v, deg) = branch.expect("candidates are non-empty");
        if deg == 0 {
            let mut all = chosen;
            all.extend(candidates.iter());
            self.record(all);
            return;
        }

        // exclude v
        let mut without = candidates.clone();
        without.remove(v);
        let excl_system = match (self.cert, &system) {
            (Some(cert), Some(sys)) => match sys.probe(cert.row(v), 0.0) {
                Added::Inconsistent => None,
                Added::Redundant => Some(Some(Rc::clone(sys))),
                Added::Pivot => {
                    let mut next = (**sys).clone();
                    next.add(cert.row(v), 0.0);
                    Some(Some(Rc::new(next)))
                }
            },
            _ => Some(None),
        };
        if let Some(sys) = excl_system {
            stack.push(Node {
                chosen: chosen.clone(),
                candidates: without,
                system: sys,
            });
        }

        // include v, explored first
        let nbrs = self.graph.neighbours(v);
        let mut with = candidates.clone();
        with.subtract(nbrs);
        with.remove(v);
        let incl_system = match (self.cert, &system) {
            (Some(cert), Some(sys)) => self.include_rows(cert, sys, v, &candidates),
            _ => Some(None),
        };
        if let Some(sys) = incl_system {
            let mut chosen = chosen;
            chosen.push(v);
            stack.push(Node {
                chosen,
                candidates: with,
                system: sys,
            });
        }
    }

    /// Extends the linear system with `v = 1` and a selection of its newly
    /// excluded neighbours at 0. Rows that mention a coordinate no earlier row
    /// touched always raise the rank; beyond those, a fixed budget of further
    /// rows is fed. Skipped rows are still enforced when the system is resolved.
    fn include_rows(
        &self,
        cert: &AffineCertificate,
        sys: &Echelon,
        v: usize,
        candidates: &Bits,
    ) -> Option<Option<Rc<Echelon>>> {
        let mut next = sys.clone();
        if next.add(cert.row(v), 1.0) == Added::Inconsistent {
            return None;
        }
        let mut touched = cert.features[v];
        let mut budget = 2 * cert.dim() + 8;
        for w in self.graph.neighbours(v).iter() {
            if next.rank() == cert.rank {
                break;
            }
            if !candidates.contains(w) {
                continue;
            }
            let f = cert.features[w];
            let fresh = f & !touched != 0;
            if !fresh {
                if budget == 0 {
                    continue;
                }
                budget -= 1;
            }
            touched |= f;
            if next.add(cert.row(w), 0.0) == Added::Inconsistent {
                return None;
            }
        }
        Some(Some(Rc::new(next)))
    }

    /// The system has full rank: the only possible completion is the vertex
    /// set where the determined affine function equals one.
    fn resolve(
        &mut self,
        cert: &AffineCertificate,
        sys: &Echelon,
        chosen: &[usize],
        candidates: &Bits,
    ) {
        let a = sys.solution();
        let mut ones = Vec::new();
        for (v, &f) in cert.features.iter().enumerate() {
            let mut val = a[0];
            let mut bits = f;
            while bits != 0 {
                let i = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                val += a[i + 1];
            }
            if (val - 1.0).abs() < VALUE_EPS {
                ones.push(v);
            } else if val.abs() >= VALUE_EPS {
                return;
            }
        }
        let allowed = |v: &usize| candidates.contains(*v) || chosen.contains(v);
        if chosen.iter().all(|v| ones.binary_search(v).is_ok())
            && ones.iter().all(allowed)
            && ones.len() >= self.need()
            && self.graph.is_independent(&ones)
        {
            self.record(ones);
        }
    }

    /// Greedy clique cover of `set`, stopping once `enough` cliques are used.
    fn clique_cover(&self, set: &Bits, enough: usize) -> usize {
        let mut left = set.clone();
        let mut cliques = 0;
        while let Some(v) = left.first() {
            cliques += 1;
            if cliques >= enough {
                return cliques;
            }
            left.remove(v);
            let mut common = left.clone();
            common.intersect_with(self.graph.neighbours(v));
            while let Some(w) = common.first() {
                left.remove(w);
                common.remove(w);
                common.intersect_with(self.graph.neighbours(w));
            }
        }
        cliques
    }
}
