//! Kneser graphs, their subgraphs, and exact independence computations.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::baranyai::{baranyai_partition, BaranyaiPartition};
use crate::error::{Error, Result};
use crate::family::{GroundParams, KSet, SetFamily};
use crate::graph::Graph;
use crate::mis::{AffineCertificate, MisSolver, DEFAULT_NODE_LIMIT};
use crate::spectral::kneser_spectrum;

/// Largest vertex count [`KneserGraph::build`] accepts.
pub const GRAPH_GUARD: u128 = 50_000;

/// Largest vertex count for the dense eigenvalue cross-check.
pub const SPECTRUM_GUARD: u128 = 500;

/// `K(n, k)` or a spanning subgraph of it.
///
/// Vertices are the k-sets in canonical order. `full` records whether every
/// Kneser edge is present, which is what licenses the eigenvalue-based
/// shortcuts in the solver.
#[derive(Debug, Clone)]
pub struct KneserGraph {
    params: GroundParams,
    vertices: Vec<KSet>,
    graph: Graph,
    full: bool,
}

impl KneserGraph {
    pub fn build(params: GroundParams) -> Result<Self> {
        let vertices = Self::vertices_for(params)?;
        let mut graph = Graph::empty(vertices.len());
        for (i, a) in vertices.iter().enumerate() {
            for (j, b) in vertices.iter().enumerate().skip(i + 1) {
                if a.is_disjoint(*b) {
                    graph.add_edge(i, j);
                }
            }
        }
        Ok(KneserGraph {
            params,
            vertices,
            graph,
            full: true,
        })
    }

    /// The spanning subgraph with the given edges, which must be Kneser edges.
    pub fn subgraph(
        params: GroundParams,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self> {
        let vertices = Self::vertices_for(params)?;
        let mut graph = Graph::empty(vertices.len());
        for (u, v) in edges {
            let (a, b) = match (vertices.get(u), vertices.get(v)) {
                (Some(a), Some(b)) => (*a, *b),
                _ => {
                    return Err(Error::IndexOutOfRange {
                        index: u.max(v) as u64,
                        max: vertices.len() as u64 - 1,
                    })
                }
            };
            if u == v || !a.is_disjoint(b) {
                return Err(Error::domain(format!(
                    "{{{a}}} and {{{b}}} are not adjacent in K(n,k)"
                )));
            }
            graph.add_edge(u, v);
        }
        let full = graph.edge_count() as u128 == full_edge_count(params);
        Ok(KneserGraph {
            params,
            vertices,
            graph,
            full,
        })
    }

    fn vertices_for(params: GroundParams) -> Result<Vec<KSet>> {
        params.require_graph()?;
        let size = params.universe_size();
        if size > GRAPH_GUARD {
            return Err(Error::GuardExceeded {
                what: format!("building K({},{})", params.n, params.k),
                size,
                limit: GRAPH_GUARD,
            });
        }
        params.all_ksets()
    }

    pub fn params(&self) -> GroundParams {
        self.params
    }

    pub fn vertices(&self) -> &[KSet] {
        &self.vertices
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn is_full(&self) -> bool {
        self.full
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    pub fn index_of(&self, set: KSet) -> Option<usize> {
        self.vertices.binary_search(&set).ok()
    }

    /// Vertex indices of a family's members.
    pub fn indices_of(&self, family: &SetFamily) -> Vec<usize> {
        family
            .iter()
            .map(|s| {
                self.index_of(s)
                    .expect("family lives over the same ground set")
            })
            .collect()
    }

    fn family_of(&self, indices: &[usize]) -> SetFamily {
        SetFamily::from_valid(
            self.params,
            indices.iter().map(|&i| self.vertices[i]).collect(),
        )
    }

    /// Edge list with a `# kneser n=.. k=..` header.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("# kneser n={} k={}\n", self.params.n, self.params.k);
        for (u, v) in self.graph.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

/// `C(n,k)·C(n-k,k)/2`.
pub fn full_edge_count(params: GroundParams) -> u128 {
    params.universe_size() * params.kneser_degree() / 2
}

/// Exact maximum independent set of a Kneser graph or subgraph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MisResult {
    pub size: usize,
    pub witness: SetFamily,
    /// Whether every maximum independent set is a star; only filled in when
    /// requested.
    pub is_unique_up_to_stars: Option<bool>,
    pub node_count: u64,
}

/// Solver settings for [`max_independent_set_with`].
#[derive(Debug, Clone, Copy)]
pub struct MisOptions {
    pub node_limit: u64,
    /// Also decide whether the stars are the only maximum independent sets.
    pub uniqueness: bool,
}

impl Default for MisOptions {
    fn default() -> Self {
        MisOptions {
            node_limit: DEFAULT_NODE_LIMIT,
            uniqueness: false,
        }
    }
}

pub fn max_independent_set(g: &KneserGraph) -> Result<MisResult> {
    max_independent_set_with(g, MisOptions::default())
}

fn stars(g: &KneserGraph) -> Vec<Vec<usize>> {
    (1..=g.params.n)
        .map(|c| {
            (0..g.vertex_count())
                .filter(|&v| g.vertices[v].contains(c))
                .collect()
        })
        .collect()
}

pub fn max_independent_set_with(g: &KneserGraph, opts: MisOptions) -> Result<MisResult> {
    let params = g.params;
    let ekr = params.star_size() as usize;
    let certificate = (g.full && params.n > 2 * params.k).then(|| {
        AffineCertificate::new(
            g.vertices.iter().map(|s| s.bits()).collect(),
            params.n as usize,
            ekr,
        )
    });
    let star_sets = stars(g);
    let mut solver = MisSolver::new(&g.graph)
        .with_node_limit(opts.node_limit)
        .with_initial(star_sets[0].clone());
    if let Some(cert) = &certificate {
        solver = solver.with_certificate(cert);
    } else if g.full {
        // n = 2k: the graph is a perfect matching.
        solver = solver.with_upper_bound(ekr);
    }

    if !opts.uniqueness {
        let out = solver.maximum()?;
        return Ok(MisResult {
            size: out.size,
            witness: g.family_of(&out.witness),
            is_unique_up_to_stars: None,
            node_count: out.nodes,
        });
    }
    // At most n distinct stars exist, so n + 1 solutions already settle it.
    let en = solver.enumerate_maximum(params.n as usize + 1)?;
    let unique = en.solutions.len() <= params.n as usize
        && en.solutions.iter().all(|s| star_sets.contains(s));
    Ok(MisResult {
        size: en.alpha,
        witness: g.family_of(&en.solutions[0]),
        is_unique_up_to_stars: Some(unique),
        node_count: en.nodes,
    })
}

/// Outcome of checking EKR and the uniqueness of stars on the full graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EkrReport {
    pub n: u32,
    pub k: u32,
    pub alpha: usize,
    pub equals_ekr: bool,
    pub only_stars: bool,
    /// Maximum independent sets found, capped at `n + 1`.
    pub maximum_sets: usize,
    pub nodes: u64,
}

pub fn verify_ekr(params: GroundParams) -> Result<EkrReport> {
    let g = KneserGraph::build(params)?;
    let ekr = params.star_size() as usize;
    let certificate = (params.n > 2 * params.k).then(|| {
        AffineCertificate::new(
            g.vertices.iter().map(|s| s.bits()).collect(),
            params.n as usize,
            ekr,
        )
    });
    let star_sets = stars(&g);
    let mut solver = MisSolver::new(&g.graph).with_initial(star_sets[0].clone());
    solver = match &certificate {
        Some(c) => solver.with_certificate(c),
        None => solver.with_upper_bound(ekr),
    };
    let en = solver.enumerate_maximum(params.n as usize + 1)?;
    let only_stars = en.solutions.len() <= params.n as usize
        && en.solutions.iter().all(|s| star_sets.contains(s));
    Ok(EkrReport {
        n: params.n,
        k: params.k,
        alpha: en.alpha,
        equals_ekr: en.alpha == ekr,
        only_stars,
        maximum_sets: en.solutions.len(),
        nodes: en.nodes,
    })
}

/// Numeric spectrum of the adjacency matrix against the closed form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumCheck {
    pub matches: bool,
    /// `(eigenvalue, multiplicity)` observed, increasing.
    pub observed: Vec<(i128, usize)>,
    /// `(eigenvalue, multiplicity)` from the formula, merged when values
    /// coincide, increasing.
    pub expected: Vec<(i128, usize)>,
    /// Largest distance of a numeric eigenvalue from its rounded value.
    pub max_error: f64,
    /// Formula multiplicity of `λ_1`.
    pub lambda1_multiplicity: u128,
}

pub fn spectrum_cross_check(params: GroundParams) -> Result<SpectrumCheck> {
    params.require_graph()?;
    let size = params.universe_size();
    if size > SPECTRUM_GUARD {
        return Err(Error::GuardExceeded {
            what: "dense eigendecomposition".into(),
            size,
            limit: SPECTRUM_GUARD,
        });
    }
    let g = KneserGraph::build(params)?;
    let v = g.vertex_count();
    let a = DMatrix::from_fn(v, v, |i, j| if g.graph.has_edge(i, j) { 1.0 } else { 0.0 });
    let eig = a.symmetric_eigen();
    let mut observed: Vec<(i128, usize)> = Vec::new();
    let mut max_error = 0.0f64;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    values.sort_by(f64::total_cmp);
    for x in values {
        let r = x.round();
        max_error = max_error.max((x - r).abs());
        match observed.last_mut() {
            Some((val, m)) if *val == r as i128 => *m += 1,
            _ => observed.push((r as i128, 1)),
        }
    }
    let spectrum = kneser_spectrum(params)?;
    let mut expected: Vec<(i128, usize)> = Vec::new();
    for e in &spectrum {
        if e.multiplicity == 0 {
            continue;
        }
        match expected.iter_mut().find(|(val, _)| *val == e.value) {
            Some((_, m)) => *m += e.multiplicity as usize,
            None => expected.push((e.value, e.multiplicity as usize)),
        }
    }
    expected.sort();
    Ok(SpectrumCheck {
        matches: max_error < 1e-6 && observed == expected,
        observed,
        expected,
        max_error,
        lambda1_multiplicity: spectrum[1].multiplicity,
    })
}

/// The union of the Baranyai cliques and its independence data.
#[derive(Debug, Clone)]
pub struct ExtremalSubgraph {
    pub graph: KneserGraph,
    pub partition: BaranyaiPartition,
    pub alpha: usize,
    /// Common degree, if the subgraph is regular.
    pub degree: Option<usize>,
    pub edges: usize,
}

impl ExtremalSubgraph {
    /// `(n-k)/(2k)·C(n,k)`, the fewest edges a subgraph with independence
    /// number `C(n-1,k-1)` can have.
    pub fn edge_lower_bound(&self) -> u128 {
        let p = self.graph.params;
        (p.n - p.k) as u128 * p.universe_size() / (2 * p.k as u128)
    }
}

pub fn extremal_subgraph(params: GroundParams) -> Result<ExtremalSubgraph> {
    let partition = baranyai_partition(params)?;
    let all = params.all_ksets()?;
    let index = |s: &KSet| all.binary_search(s).expect("k-set of the ground set");
    let mut edges = Vec::new();
    for class in partition.classes() {
        let ids: Vec<usize> = class.iter().map(|s| index(&s)).collect();
        for (a, &u) in ids.iter().enumerate() {
            for &v in &ids[a + 1..] {
                edges.push((u, v));
            }
        }
    }
    let graph = KneserGraph::subgraph(params, edges)?;
    let mis = max_independent_set(&graph)?;
    Ok(ExtremalSubgraph {
        alpha: mis.size,
        degree: graph.graph.regular_degree(),
        edges: graph.edge_count(),
        graph,
        partition,
    })
}
