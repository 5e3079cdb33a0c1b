//! GKM graphs of odd quadrics, even quadrics and rotated CP¹.
//!
//! Vertices are `1..=2n` for the quadric families (opposite vertex `2n+1-v`)
//! and `1 = p`, `2 = q` for CP¹. The connection is evaluated from its case
//! rule rather than stored.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::poly::LinearForm;

pub type Vertex = usize;

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Odd,
    Even,
    Cp1,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Odd => "odd",
            Family::Even => "even",
            Family::Cp1 => "cp1",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "odd" => Ok(Family::Odd),
            "even" => Ok(Family::Even),
            "cp1" => Ok(Family::Cp1),
            other => Err(Error::Malformed(format!("unknown family {other:?}"))),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub src: Vertex,
    pub dst: Vertex,
}

impl Edge {
    pub fn new(src: Vertex, dst: Vertex) -> Self {
        Edge { src, dst }
    }

    pub fn reversed(self) -> Edge {
        Edge {
            src: self.dst,
            dst: self.src,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GkmGraph {
    family: Family,
    n: usize,
    axial: BTreeMap<Edge, LinearForm>,
}

/// Signed variable attached to a quadric vertex: a_v for v ≤ n, -a_{2n+1-v} otherwise.
pub fn signed_var(n: usize, v: Vertex) -> LinearForm {
    if v <= n {
        LinearForm::var(n, v)
    } else {
        -&LinearForm::var(n, 2 * n + 1 - v)
    }
}

fn quadric_axial(n: usize, i: Vertex, j: Vertex) -> LinearForm {
    if i + j == 2 * n + 1 {
        -&signed_var(n, i)
    } else {
        &signed_var(n, j) - &signed_var(n, i)
    }
}

impl GkmGraph {
    pub fn odd_quadric(n: usize) -> Result<GkmGraph> {
        if n < 1 {
            return Err(Error::InvalidRank {
                family: "odd".into(),
                n,
            });
        }
        let mut axial = BTreeMap::new();
        for i in 1..=2 * n {
            for j in 1..=2 * n {
                if i != j {
                    axial.insert(Edge::new(i, j), quadric_axial(n, i, j));
                }
            }
        }
        Ok(GkmGraph {
            family: Family::Odd,
            n,
            axial,
        })
    }

    pub fn even_quadric(n: usize) -> Result<GkmGraph> {
        if n < 2 {
            return Err(Error::InvalidRank {
                family: "even".into(),
                n,
            });
        }
        let mut g = Self::odd_quadric(n)?;
        g.family = Family::Even;
        g.axial.retain(|e, _| e.src + e.dst != 2 * n + 1);
        Ok(g)
    }

    pub fn cp1(n: usize) -> Result<GkmGraph> {
        if n < 1 {
            return Err(Error::InvalidRank {
                family: "cp1 (the trivial action has no GKM graph; see closed_form_trivial)".into(),
                n,
            });
        }
        let l = LinearForm::new(vec![BigInt::from(n)]);
        let mut axial = BTreeMap::new();
        axial.insert(Edge::new(1, 2), l.clone());
        axial.insert(Edge::new(2, 1), -&l);
        Ok(GkmGraph {
            family: Family::Cp1,
            n,
            axial,
        })
    }

    pub fn build(family: Family, n: usize) -> Result<GkmGraph> {
        match family {
            Family::Odd => Self::odd_quadric(n),
            Family::Even => Self::even_quadric(n),
            Family::Cp1 => Self::cp1(n),
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Family parameter: torus rank for quadrics, rotation multiplicity for CP¹.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of polynomial variables.
    pub fn rank(&self) -> usize {
        match self.family {
            Family::Cp1 => 1,
            _ => self.n,
        }
    }

    pub fn num_vertices(&self) -> usize {
        match self.family {
            Family::Cp1 => 2,
            _ => 2 * self.n,
        }
    }

    pub fn vertices(&self) -> std::ops::RangeInclusive<Vertex> {
        1..=self.num_vertices()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        (1..=self.num_vertices()).contains(&v)
    }

    pub fn opposite(&self, v: Vertex) -> Vertex {
        self.num_vertices() + 1 - v
    }

    /// Complex dimension of the underlying manifold.
    pub fn complex_dim(&self) -> usize {
        match self.family {
            Family::Odd => 2 * self.n - 1,
            Family::Even => 2 * self.n - 2,
            Family::Cp1 => 1,
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.axial.keys().copied()
    }

    pub fn num_edges(&self) -> usize {
        self.axial.len()
    }

    pub fn has_edge(&self, e: Edge) -> bool {
        self.axial.contains_key(&e)
    }

    pub fn out_edges(&self, p: Vertex) -> Vec<Edge> {
        self.axial
            .range(Edge::new(p, 0)..Edge::new(p + 1, 0))
            .map(|(e, _)| *e)
            .collect()
    }

    pub fn axial(&self, e: Edge) -> Option<&LinearForm> {
        self.axial.get(&e)
    }

    /// Axial value of `pq`; panics when the edge is absent.
    pub fn alpha(&self, p: Vertex, q: Vertex) -> &LinearForm {
        self.axial
            .get(&Edge::new(p, q))
            .unwrap_or_else(|| panic!("no edge {p}->{q}"))
    }

    /// Replaces one axial label; used to build faulty graphs.
    pub fn with_axial(&self, e: Edge, l: LinearForm) -> Result<GkmGraph> {
        if !self.has_edge(e) {
            return Err(Error::NotOutgoing {
                edge: (e.src, e.dst),
                out: (e.src, e.dst),
            });
        }
        let mut g = self.clone();
        g.axial.insert(e, l);
        Ok(g)
    }

    /// ∇_e applied to an edge leaving `e.src`.
    pub fn connection_apply(&self, e: Edge, out: Edge) -> Result<Edge> {
        if !self.has_edge(e) || !self.has_edge(out) || out.src != e.src {
            return Err(Error::NotOutgoing {
                edge: (e.src, e.dst),
                out: (out.src, out.dst),
            });
        }
        let (p, q, i) = (e.src, e.dst, out.dst);
        let img = match self.family {
            Family::Cp1 => Edge::new(q, p),
            _ => {
                let bar = |v| self.opposite(v);
                if i == q {
                    Edge::new(q, p)
                } else if i == bar(p) {
                    Edge::new(q, bar(q))
                } else if i == bar(q) {
                    Edge::new(q, bar(p))
                } else {
                    Edge::new(q, i)
                }
            }
        };
        Ok(img)
    }

    pub fn verify_axial_axioms(&self) -> AxiomReport {
        let mut violations = Vec::new();
        for (e, l) in &self.axial {
            if e.src < e.dst && self.axial.get(&e.reversed()) != Some(&-l) {
                violations.push(AxiomViolation::Antisymmetry { edge: *e });
            }
        }
        for e in self.edges() {
            let l = self.alpha(e.src, e.dst);
            let outs = self.out_edges(e.src);
            let mut images = BTreeSet::new();
            for out in outs {
                let img = self.connection_apply(e, out).expect("out edge");
                images.insert(img);
                let ok = match self.axial(img) {
                    Some(li) => {
                        let diff = (self.alpha(out.src, out.dst) - li).to_polynomial();
                        !l.is_zero() && diff.is_divisible_by(l)
                    }
                    None => false,
                };
                if !ok {
                    violations.push(AxiomViolation::Congruence {
                        edge: e,
                        out,
                        image: img,
                    });
                }
            }
            let target: BTreeSet<Edge> = self.out_edges(e.dst).into_iter().collect();
            if images != target {
                violations.push(AxiomViolation::NotBijective { edge: e });
            }
        }
        AxiomReport { violations }
    }

    /// Whether the full subgraph on `subset` is invariant under ∇ along its own edges.
    pub fn verify_subgraph_closed(&self, subset: &[Vertex]) -> bool {
        let s: BTreeSet<Vertex> = subset.iter().copied().collect();
        for e in self
            .edges()
            .filter(|e| s.contains(&e.src) && s.contains(&e.dst))
        {
            for out in self.out_edges(e.src) {
                if s.contains(&out.dst) {
                    let img = self.connection_apply(e, out).expect("out edge");
                    if !s.contains(&img.dst) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn vertex_name(&self, v: Vertex) -> String {
        match (self.family, v) {
            (Family::Cp1, 1) => "p".into(),
            (Family::Cp1, _) => "q".into(),
            _ => v.to_string(),
        }
    }

    pub fn display_name(&self) -> String {
        match self.family {
            Family::Odd => format!("GQ{}", 2 * self.n - 1),
            Family::Even => format!("GQ{}", 2 * self.n - 2),
            Family::Cp1 => format!("phi{}", self.n),
        }
    }

    /// DOT digraph with one arc per undirected edge, labelled by the axial value of src -> dst.
    pub fn export_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"{}\" {{", self.display_name());
        for v in self.vertices() {
            let _ = writeln!(s, "  \"{}\";", self.vertex_name(v));
        }
        for (e, l) in self.axial.iter().filter(|(e, _)| e.src < e.dst) {
            let _ = writeln!(
                s,
                "  \"{}\" -> \"{}\" [label=\"{}\"];",
                self.vertex_name(e.src),
                self.vertex_name(e.dst),
                l
            );
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> Value {
        let edges: Vec<Value> = self
            .axial
            .iter()
            .map(|(e, l)| json!({"src": e.src, "dst": e.dst, "axial": l.to_json()}))
            .collect();
        json!({
            "schema_version": SCHEMA_VERSION,
            "family": self.family.name(),
            "n": self.n,
            "vertices": self.vertices().collect::<Vec<_>>(),
            "edges": edges,
        })
    }

    /// Loads a graph. The vertex and edge sets must match the family; labels may differ.
    pub fn from_json(v: &Value) -> Result<GkmGraph> {
        let family = Family::parse(
            v["family"]
                .as_str()
                .ok_or_else(|| Error::Malformed("missing family".into()))?,
        )?;
        let n = v["n"]
            .as_u64()
            .ok_or_else(|| Error::Malformed("missing n".into()))? as usize;
        let template = GkmGraph::build(family, n)?;
        let vertices: Vec<usize> = serde_json::from_value(v["vertices"].clone())
            .map_err(|e| Error::Malformed(format!("vertices: {e}")))?;
        if vertices != template.vertices().collect::<Vec<_>>() {
            return Err(Error::Malformed("vertex set does not match family".into()));
        }
        let edges = v["edges"]
            .as_array()
            .ok_or_else(|| Error::Malformed("missing edges".into()))?;
        let mut axial = BTreeMap::new();
        for e in edges {
            let src = e["src"]
                .as_u64()
                .ok_or_else(|| Error::Malformed("edge src".into()))? as usize;
            let dst = e["dst"]
                .as_u64()
                .ok_or_else(|| Error::Malformed("edge dst".into()))? as usize;
            let l = LinearForm::from_json(&e["axial"])?;
            if l.n() != template.rank() {
                return Err(Error::Malformed(format!(
                    "axial label on {src}->{dst} has wrong arity"
                )));
            }
            if axial.insert(Edge::new(src, dst), l).is_some() {
                return Err(Error::Malformed(format!("duplicate edge {src}->{dst}")));
            }
        }
        let got: BTreeSet<Edge> = axial.keys().copied().collect();
        let want: BTreeSet<Edge> = template.edges().collect();
        if got != want {
            return Err(Error::Malformed("edge set does not match family".into()));
        }
        Ok(GkmGraph { family, n, axial })
    }

    /// Whether the labels agree with the freshly built graph of the same family.
    pub fn is_canonical(&self) -> bool {
        GkmGraph::build(self.family, self.n).is_ok_and(|g| g == *self)
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AxiomViolation {
    Antisymmetry { edge: Edge },
    Congruence { edge: Edge, out: Edge, image: Edge },
    NotBijective { edge: Edge },
}

impl AxiomViolation {
    pub fn edges(&self) -> Vec<Edge> {
        match self {
            AxiomViolation::Antisymmetry { edge } | AxiomViolation::NotBijective { edge } => {
                vec![*edge]
            }
            AxiomViolation::Congruence { edge, out, image } => vec![*edge, *out, *image],
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub violations: Vec<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}
