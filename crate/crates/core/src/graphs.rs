//! Rauzy graphs, extension graphs, dendricity and quasi-Sturmian words.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::factors::factor_table;
use crate::par::{self, Exec};
use crate::sturmian::Substitution;
use crate::word::{Alphabet, FiniteWord, Letter, WordStream};

/// Directed graph on `L_n(w)` with one edge per factor of length `n + 1`,
/// from its length-`n` prefix to its length-`n` suffix.
#[derive(Clone, Debug)]
pub struct RauzyGraph {
    pub n: usize,
    /// Sorted lexicographically.
    pub vertices: Vec<FiniteWord>,
    /// Sorted lexicographically.
    pub edges: Vec<FiniteWord>,
    pub saturated: bool,
    alphabet: Alphabet,
}

impl RauzyGraph {
    /// Builds a graph from explicit vertex and edge sets.
    pub fn from_parts(
        n: usize,
        vertices: BTreeSet<FiniteWord>,
        edges: BTreeSet<FiniteWord>,
        alphabet: Alphabet,
    ) -> Result<Self> {
        if let Some(v) = vertices.iter().find(|v| v.len() != n) {
            return Err(invalid(format!("vertex {v} does not have length {n}")));
        }
        for e in &edges {
            if e.len() != n + 1 || !vertices.contains(&e[..n]) || !vertices.contains(&e[1..]) {
                return Err(invalid(format!(
                    "edge {e} has an endpoint outside the vertex set"
                )));
            }
        }
        Ok(RauzyGraph {
            n,
            vertices: vertices.into_iter().collect(),
            edges: edges.into_iter().collect(),
            saturated: true,
            alphabet,
        })
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn vertex_index(&self, v: &[Letter]) -> Option<usize> {
        self.vertices.binary_search_by(|x| x.as_slice().cmp(v)).ok()
    }

    /// `(source, target)` vertex indices of edge `e`.
    pub fn endpoints(&self, e: usize) -> (usize, usize) {
        let w = &self.edges[e];
        let n = self.n;
        (
            self.vertex_index(&w[..n]).expect("prefix is a vertex"),
            self.vertex_index(&w[1..]).expect("suffix is a vertex"),
        )
    }

    fn digraph(&self) -> DiGraph<(), ()> {
        let mut g = DiGraph::new();
        let nodes: Vec<_> = self.vertices.iter().map(|_| g.add_node(())).collect();
        for e in 0..self.edges.len() {
            let (s, t) = self.endpoints(e);
            g.add_edge(nodes[s], nodes[t], ());
        }
        g
    }

    /// Strongly connected components in topological order of the
    /// condensation, each as sorted vertex indices.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut sccs = tarjan_scc(&self.digraph());
        // tarjan_scc yields reverse topological order.
        sccs.reverse();
        sccs.into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|n| n.index()).collect();
                c.sort_unstable();
                c
            })
            .collect()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Every pair of vertices is joined by a path in at least one direction,
    /// i.e. the condensation is a path through all components.
    pub fn is_semi_connected(&self) -> bool {
        let comps = self.components();
        let mut comp_of = vec![0; self.vertices.len()];
        for (c, members) in comps.iter().enumerate() {
            for &v in members {
                comp_of[v] = c;
            }
        }
        let links: HashSet<(usize, usize)> = (0..self.edges.len())
            .map(|e| {
                let (s, t) = self.endpoints(e);
                (comp_of[s], comp_of[t])
            })
            .collect();
        (1..comps.len()).all(|c| links.contains(&(c - 1, c)))
    }

    pub fn to_dot(&self) -> String {
        let r = |u: &[Letter]| self.alphabet.render(u);
        let mut out = format!("digraph rauzy_{} {{\n", self.n);
        for v in &self.vertices {
            writeln!(out, "  \"{}\";", r(v)).unwrap();
        }
        for (e, w) in self.edges.iter().enumerate() {
            let (s, t) = self.endpoints(e);
            writeln!(
                out,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                r(&self.vertices[s]),
                r(&self.vertices[t]),
                r(w)
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}

pub fn rauzy_graph(w: &WordStream, n: usize, horizon: usize) -> Result<RauzyGraph> {
    if horizon < n + 1 {
        return Err(invalid(format!("horizon {horizon} < n + 1")));
    }
    let vt = factor_table(w, n, horizon)?;
    let et = factor_table(w, n + 1, horizon)?;
    let mut g = RauzyGraph::from_parts(n, vt.factor_set(), et.factor_set(), w.alphabet().clone())?;
    g.saturated = vt.saturated && et.saturated;
    Ok(g)
}

/// Bipartite graph of two-sided extensions `a·u·b` of a factor `u`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtensionGraph {
    pub u: FiniteWord,
    pub left: BTreeSet<Letter>,
    pub right: BTreeSet<Letter>,
    pub edges: BTreeSet<(Letter, Letter)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeVerdict {
    Tree,
    Disconnected,
    Cyclic,
}

impl ExtensionGraph {
    /// Tree iff connected with `|E| = |L| + |R| − 1`. Disconnection is
    /// reported before cycles.
    pub fn is_tree(&self) -> Result<TreeVerdict> {
        let nl = self.left.len();
        let total = nl + self.right.len();
        if total == 0 {
            return Err(Error::DegenerateGraph(format!(
                "extension graph of {} has no vertices",
                self.u
            )));
        }
        let li: BTreeMap<Letter, usize> =
            self.left.iter().enumerate().map(|(k, &a)| (a, k)).collect();
        let ri: BTreeMap<Letter, usize> = self
            .right
            .iter()
            .enumerate()
            .map(|(k, &b)| (b, nl + k))
            .collect();
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = total;
        for (a, b) in &self.edges {
            let (x, y) = (find(&mut parent, li[a]), find(&mut parent, ri[b]));
            if x != y {
                parent[x] = y;
                components -= 1;
            }
        }
        Ok(if components > 1 {
            TreeVerdict::Disconnected
        } else if self.edges.len() + 1 == total {
            TreeVerdict::Tree
        } else {
            TreeVerdict::Cyclic
        })
    }

    /// `|B(u)| − |L(u)| − |R(u)| + 1`.
    pub fn bilateral_excess(&self) -> i64 {
        self.edges.len() as i64 - self.left.len() as i64 - self.right.len() as i64 + 1
    }

    pub fn to_dot(&self, alphabet: &Alphabet) -> String {
        let mut out = format!("graph ext_{} {{\n", sanitize(&alphabet.render(&self.u)));
        for a in &self.left {
            writeln!(
                out,
                "  \"L{}\" [label=\"{}\"];",
                alphabet.label(*a),
                alphabet.label(*a)
            )
            .unwrap();
        }
        for b in &self.right {
            writeln!(
                out,
                "  \"R{}\" [label=\"{}\"];",
                alphabet.label(*b),
                alphabet.label(*b)
            )
            .unwrap();
        }
        for (a, b) in &self.edges {
            writeln!(
                out,
                "  \"L{}\" -- \"R{}\";",
                alphabet.label(*a),
                alphabet.label(*b)
            )
            .unwrap();
        }
        out.push_str("}\n");
        out
    }
}

fn sanitize(s: &str) -> String {
    if s.is_empty() {
        return "eps".into();
    }
    s.chars()
        .map(|c| if c.is_alphanumeric() { c } else { '_' })
        .collect()
}

/// Extension graphs of every length-`n` factor, keyed by factor.
pub fn extension_graphs(
    w: &WordStream,
    n: usize,
    horizon: usize,
) -> Result<(BTreeMap<FiniteWord, ExtensionGraph>, bool)> {
    if horizon < n + 2 {
        return Err(invalid(format!("horizon {horizon} < n + 2")));
    }
    let base = factor_table(w, n, horizon)?;
    let one = factor_table(w, n + 1, horizon)?;
    let two = factor_table(w, n + 2, horizon)?;
    let mut graphs: BTreeMap<FiniteWord, ExtensionGraph> = base
        .words()
        .map(|u| {
            (
                u.clone(),
                ExtensionGraph {
                    u: u.clone(),
                    left: BTreeSet::new(),
                    right: BTreeSet::new(),
                    edges: BTreeSet::new(),
                },
            )
        })
        .collect();
    for v in one.words() {
        if let Some(g) = graphs.get_mut(&v[1..]) {
            g.left.insert(v[0]);
        }
        if let Some(g) = graphs.get_mut(&v[..n]) {
            g.right.insert(v[n]);
        }
    }
    for v in two.words() {
        let g = graphs.get_mut(&v[1..=n]).expect("inner block is a factor");
        g.edges.insert((v[0], v[n + 1]));
    }
    Ok((graphs, base.saturated && one.saturated && two.saturated))
}

pub fn extension_graph(w: &WordStream, u: &[Letter], horizon: usize) -> Result<ExtensionGraph> {
    let (mut graphs, _) = extension_graphs(w, u.len(), horizon)?;
    graphs
        .remove(u)
        .ok_or_else(|| Error::NotAFactor(w.alphabet().render(u)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DendricityWitness {
    pub u: FiniteWord,
    pub kind: TreeVerdict,
    pub graph: ExtensionGraph,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DendricityReport {
    pub max_n: usize,
    /// `None` means dendric up to `max_n`.
    pub failure: Option<DendricityWitness>,
    pub saturated: bool,
}

impl DendricityReport {
    pub fn is_dendric(&self) -> bool {
        self.failure.is_none()
    }

    pub fn to_json(&self, alphabet: &Alphabet) -> serde_json::Value {
        let verdict = match &self.failure {
            None => serde_json::json!({ "dendric_up_to": self.max_n }),
            Some(f) => serde_json::json!({
                "fails_at": alphabet.render(&f.u),
                "length": f.u.len(),
                "kind": f.kind,
                "left": f.graph.left.iter().map(|&a| alphabet.label(a)).collect::<Vec<_>>(),
                "right": f.graph.right.iter().map(|&a| alphabet.label(a)).collect::<Vec<_>>(),
                "edges": f.graph.edges.iter()
                    .map(|&(a, b)| [alphabet.label(a), alphabet.label(b)])
                    .collect::<Vec<_>>(),
            }),
        };
        serde_json::json!({
            "max_n": self.max_n,
            "saturated": self.saturated,
            "verdict": verdict,
        })
    }
}

/// Checks that every factor of length `<= max_n` (the empty word included)
/// has a tree as extension graph. Lengths are checked in parallel; the
/// reported failure is the shortest, then lexicographically first.
pub fn dendricity_check(
    w: &WordStream,
    max_n: usize,
    horizon: usize,
    exec: Exec,
) -> Result<DendricityReport> {
    if horizon < max_n + 2 {
        return Err(invalid(format!("horizon {horizon} < max_n + 2")));
    }
    let per_n = par::map_range(exec, max_n + 1, |n| -> Result<_> {
        let (graphs, sat) = extension_graphs(w, n, horizon)?;
        for g in graphs.into_values() {
            let kind = g.is_tree()?;
            if kind != TreeVerdict::Tree {
                return Ok((
                    Some(DendricityWitness {
                        u: g.u.clone(),
                        kind,
                        graph: g,
                    }),
                    sat,
                ));
            }
        }
        Ok((None, sat))
    });
    let mut saturated = true;
    for row in per_n {
        let (failure, sat) = row?;
        saturated &= sat;
        if failure.is_some() {
            return Ok(DendricityReport {
                max_n,
                failure,
                saturated,
            });
        }
    }
    Ok(DendricityReport {
        max_n,
        failure: None,
        saturated,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SecondDerivativeReport {
    pub n: usize,
    /// `(p(n+2) − p(n+1)) − (p(n+1) − p(n))`.
    pub lhs: i64,
    /// `Σ_u (|B(u)| − |L(u)| − |R(u)| + 1)` over `u ∈ L_n`.
    pub rhs: i64,
    pub pass: bool,
    pub saturated: bool,
}

pub fn second_derivative_identity_check(
    w: &WordStream,
    n: usize,
    horizon: usize,
) -> Result<SecondDerivativeReport> {
    let (graphs, saturated) = extension_graphs(w, n, horizon)?;
    let p = |m: usize| -> Result<i64> { Ok(factor_table(w, m, horizon)?.len() as i64) };
    let (p0, p1, p2) = (p(n)?, p(n + 1)?, p(n + 2)?);
    let lhs = (p2 - p1) - (p1 - p0);
    let rhs = graphs.values().map(ExtensionGraph::bilateral_excess).sum();
    Ok(SecondDerivativeReport {
        n,
        lhs,
        rhs,
        pass: lhs == rhs,
        saturated,
    })
}

/// Letter partition `{1..d} = A ⊔ B ⊔ C` for the quasi-Sturmian construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LetterPartition {
    pub a: Vec<Letter>,
    pub b: Vec<Letter>,
    pub c: Vec<Letter>,
}

impl LetterPartition {
    pub fn alphabet_size(&self) -> usize {
        self.a.len() + self.b.len() + self.c.len()
    }

    fn validate(&self) -> Result<()> {
        if self.c.is_empty() {
            return Err(invalid("part C must be non-empty"));
        }
        if self.a.is_empty() && self.b.is_empty() {
            return Err(invalid("parts A and B cannot both be empty"));
        }
        let d = self.alphabet_size();
        let all: BTreeSet<Letter> = self
            .a
            .iter()
            .chain(&self.b)
            .chain(&self.c)
            .copied()
            .collect();
        let expected: BTreeSet<Letter> = (1..=d as Letter).collect();
        if all.len() != d || all != expected {
            return Err(invalid(format!("parts do not partition 1..{d}")));
        }
        Ok(())
    }
}

/// `S^m σ(w0)` with `σ: 1 ↦ c_1…c_k a_1…a_r, 2 ↦ c_1…c_k b_1…b_s`.
pub fn quasi_sturmian_build(
    w0: &WordStream,
    m: usize,
    partition: &LetterPartition,
    alphabet: Alphabet,
) -> Result<WordStream> {
    partition.validate()?;
    if w0.alphabet().size() != 2 {
        return Err(invalid("the base word must be binary"));
    }
    if alphabet.size() != partition.alphabet_size() {
        return Err(invalid("alphabet size does not match the partition"));
    }
    let image =
        |tail: &[Letter]| FiniteWord::new(partition.c.iter().chain(tail).copied().collect());
    let sigma = Substitution::new(vec![image(&partition.a), image(&partition.b)])?;
    Ok(sigma.apply_stream(w0, alphabet)?.shift(m))
}
