//! Graph equivariant cohomology: classes, congruence checks and degree-wise lattices.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::graph::{Edge, Family, GkmGraph, Vertex, SCHEMA_VERSION};
use crate::lattice::{self, Row};
use crate::poly::{monomials_of_degree, LinearForm, Monomial, Polynomial};

/// A vertex-indexed tuple of polynomials on a graph.
#[derive(Clone, Debug)]
pub struct CohomClass {
    graph: Arc<GkmGraph>,
    values: Vec<Polynomial>,
}

impl PartialEq for CohomClass {
    fn eq(&self, other: &Self) -> bool {
        (Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph)
            && self.values == other.values
    }
}

impl Eq for CohomClass {}

#[derive(Clone, PartialEq, Eq, Debug, Default, Serialize)]
pub struct ClassReport {
    /// Directed edges whose congruence fails.
    pub failures: Vec<Edge>,
}

impl ClassReport {
    pub fn is_ok(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks `f(i) - f(j) ≡ 0 mod α(ij)` along every edge.
pub fn verify_class(g: &GkmGraph, values: &[Polynomial]) -> ClassReport {
    let mut failures = Vec::new();
    if values.len() != g.num_vertices() {
        return ClassReport {
            failures: g.edges().collect(),
        };
    }
    for e in g.edges() {
        let l = g.alpha(e.src, e.dst);
        let diff = values[e.src - 1].checked_sub(&values[e.dst - 1]);
        let ok = match diff {
            Ok(d) if l.is_zero() => d.is_zero(),
            Ok(d) => d.is_divisible_by(l),
            Err(_) => false,
        };
        if !ok {
            failures.push(e);
        }
    }
    ClassReport { failures }
}

impl CohomClass {
    /// Wraps vertex values without checking congruences.
    pub fn new(graph: Arc<GkmGraph>, values: Vec<Polynomial>) -> Result<CohomClass> {
        if values.len() != graph.num_vertices() {
            return Err(Error::WrongLength {
                expected: graph.num_vertices(),
                got: values.len(),
            });
        }
        let r = graph.rank();
        if let Some(p) = values.iter().find(|p| p.n() != r) {
            return Err(Error::DimensionMismatch {
                left: r,
                right: p.n(),
            });
        }
        Ok(CohomClass { graph, values })
    }

    /// Wraps vertex values, rejecting tuples that violate a congruence.
    pub fn checked(graph: Arc<GkmGraph>, values: Vec<Polynomial>) -> Result<CohomClass> {
        let c = Self::new(graph, values)?;
        let rep = c.verify();
        match rep.failures.first() {
            None => Ok(c),
            Some(e) => Err(Error::Malformed(format!(
                "congruence fails on edge {}->{}",
                e.src, e.dst
            ))),
        }
    }

    pub fn zero(graph: Arc<GkmGraph>) -> CohomClass {
        let r = graph.rank();
        let values = vec![Polynomial::zero(r); graph.num_vertices()];
        CohomClass { graph, values }
    }

    pub fn graph(&self) -> &Arc<GkmGraph> {
        &self.graph
    }

    pub fn values(&self) -> &[Polynomial] {
        &self.values
    }

    pub fn value(&self, v: Vertex) -> &Polynomial {
        &self.values[v - 1]
    }

    pub fn verify(&self) -> ClassReport {
        verify_class(&self.graph, &self.values)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Polynomial::is_zero)
    }

    /// Common polynomial degree of the nonzero values, if homogeneous.
    pub fn degree(&self) -> Option<u32> {
        let mut d = None;
        for p in self.values.iter().filter(|p| !p.is_zero()) {
            let pd = p.homogeneous_degree()?;
            if d.is_some_and(|d| d != pd) {
                return None;
            }
            d = Some(pd);
        }
        d
    }

    /// First vertex where two classes differ.
    pub fn first_difference(&self, other: &CohomClass) -> Option<Vertex> {
        self.values
            .iter()
            .zip(&other.values)
            .position(|(a, b)| a != b)
            .map(|i| i + 1)
    }

    fn same_graph(&self, other: &CohomClass) -> Result<()> {
        if Arc::ptr_eq(&self.graph, &other.graph) || self.graph == other.graph {
            Ok(())
        } else {
            Err(Error::GraphMismatch)
        }
    }

    fn zip_with(
        &self,
        other: &CohomClass,
        f: impl Fn(&Polynomial, &Polynomial) -> Polynomial,
    ) -> Result<CohomClass> {
        self.same_graph(other)?;
        Ok(CohomClass {
            graph: self.graph.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn checked_add(&self, other: &CohomClass) -> Result<CohomClass> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &CohomClass) -> Result<CohomClass> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn checked_mul(&self, other: &CohomClass) -> Result<CohomClass> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Module action of H*(BT): every vertex value times `x`.
    pub fn scale(&self, x: &Polynomial) -> CohomClass {
        CohomClass {
            graph: self.graph.clone(),
            values: self.values.iter().map(|p| p * x).collect(),
        }
    }

    pub fn scale_int(&self, c: impl Into<BigInt>) -> CohomClass {
        let c = c.into();
        CohomClass {
            graph: self.graph.clone(),
            values: self.values.iter().map(|p| p.scale(&c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> CohomClass {
        let mut out = constant_class(&self.graph, &Polynomial::one(self.graph.rank()));
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    pub fn restrict_to_vertex(&self, v: Vertex) -> Result<&Polynomial> {
        if self.graph.contains(v) {
            Ok(&self.values[v - 1])
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    pub fn to_json(&self) -> Value {
        let graph = if self.graph.is_canonical() {
            json!({"family": self.graph.family().name(), "n": self.graph.n()})
        } else {
            self.graph.to_json()
        };
        let values: serde_json::Map<String, Value> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, p)| ((i + 1).to_string(), p.to_json()))
            .collect();
        json!({"schema_version": SCHEMA_VERSION, "graph": graph, "values": values})
    }

    /// Loads a class. A graph reference `{family, n}` resolves to `on` when it
    /// matches, otherwise to the freshly built graph.
    pub fn from_json(v: &Value, on: Option<&Arc<GkmGraph>>) -> Result<CohomClass> {
        let gv = &v["graph"];
        let graph = if gv.get("edges").is_some() {
            let g = GkmGraph::from_json(gv)?;
            match on {
                Some(o) if **o == g => o.clone(),
                _ => Arc::new(g),
            }
        } else {
            let family = Family::parse(
                gv["family"]
                    .as_str()
                    .ok_or_else(|| Error::Malformed("graph.family".into()))?,
            )?;
            let n = gv["n"]
                .as_u64()
                .ok_or_else(|| Error::Malformed("graph.n".into()))? as usize;
            match on {
                Some(o) if o.family() == family && o.n() == n => o.clone(),
                _ => Arc::new(GkmGraph::build(family, n)?),
            }
        };
        let vals = v["values"]
            .as_object()
            .ok_or_else(|| Error::Malformed("values must be an object".into()))?;
        let r = graph.rank();
        let mut values = vec![None; graph.num_vertices()];
        for (k, pv) in vals {
            let idx: usize = k
                .parse()
                .ok()
                .filter(|&i| graph.contains(i))
                .ok_or_else(|| Error::Malformed(format!("bad vertex key {k:?}")))?;
            values[idx - 1] = Some(Polynomial::from_json(r, pv)?);
        }
        let values = values
            .into_iter()
            .enumerate()
            .map(|(i, p)| {
                p.ok_or_else(|| Error::Malformed(format!("missing value at vertex {}", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        CohomClass::new(graph, values)
    }
}

macro_rules! class_binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&CohomClass> for &CohomClass {
            type Output = CohomClass;
            fn $method(self, rhs: &CohomClass) -> CohomClass {
                self.$checked(rhs).expect("classes on different graphs")
            }
        }
        impl $tr<CohomClass> for CohomClass {
            type Output = CohomClass;
            fn $method(self, rhs: CohomClass) -> CohomClass {
                (&self).$method(&rhs)
            }
        }
    };
}

class_binop!(Add, add, checked_add);
class_binop!(Sub, sub, checked_sub);
class_binop!(Mul, mul, checked_mul);

impl Neg for &CohomClass {
    type Output = CohomClass;
    fn neg(self) -> CohomClass {
        CohomClass {
            graph: self.graph.clone(),
            values: self.values.iter().map(|p| -p).collect(),
        }
    }
}

/// The class taking the value `x` at every vertex.
pub fn constant_class(g: &Arc<GkmGraph>, x: &Polynomial) -> CohomClass {
    CohomClass {
        graph: g.clone(),
        values: vec![x.clone(); g.num_vertices()],
    }
}

/// Reinterprets an odd-quadric class on the even quadric of the same rank.
pub fn iota_star(f: &CohomClass, even: &Arc<GkmGraph>) -> Result<CohomClass> {
    let odd = f.graph();
    if odd.family() != Family::Odd || even.family() != Family::Even || odd.n() != even.n() {
        return Err(Error::WrongFamily(
            "iota_star maps an odd-quadric class to the even quadric of the same n".into(),
        ));
    }
    Ok(CohomClass {
        graph: even.clone(),
        values: f.values.clone(),
    })
}

/// Homogeneous component of polynomial degree `d`, as a ℤ-lattice of vertex tuples.
#[derive(Clone, Debug)]
pub struct DegreeComponent {
    pub degree: u32,
    pub monomials: Vec<Monomial>,
    /// Hermite basis over coordinates `(vertex - 1) * monomials.len() + monomial index`.
    pub basis: Vec<Row>,
}

impl DegreeComponent {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn width(&self) -> usize {
        self.monomials.len()
    }

    pub fn row_to_class(&self, g: &Arc<GkmGraph>, row: &[BigInt]) -> CohomClass {
        let r = g.rank();
        let m = self.width();
        let values = (0..g.num_vertices())
            .map(|v| {
                Polynomial::from_terms(
                    r,
                    self.monomials
                        .iter()
                        .cloned()
                        .zip(row[v * m..(v + 1) * m].iter().cloned()),
                )
            })
            .collect();
        CohomClass {
            graph: g.clone(),
            values,
        }
    }

    pub fn classes(&self, g: &Arc<GkmGraph>) -> Vec<CohomClass> {
        self.basis.iter().map(|r| self.row_to_class(g, r)).collect()
    }

    /// Coordinate vector of a class's degree-d part.
    pub fn vectorize(&self, f: &CohomClass) -> Row {
        let mut out = Vec::with_capacity(f.values.len() * self.width());
        for p in &f.values {
            out.extend(self.monomials.iter().map(|m| p.coeff(m)));
        }
        out
    }

    /// Coordinates of `f` in the basis; `None` if `f` is not in this component.
    pub fn coordinates(&self, f: &CohomClass) -> Option<Vec<BigInt>> {
        if f.values.iter().any(|p| !p.is_homogeneous_of(self.degree)) {
            return None;
        }
        lattice::solve_in_basis(&self.basis, &self.vectorize(f))
    }

    pub fn graded_group(&self) -> GradedGroup {
        GradedGroup {
            degree: 2 * self.degree,
            rank: self.rank(),
            torsion: Vec::new(),
        }
    }
}

/// One degree of a graded abelian group: rank plus torsion invariant factors.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct GradedGroup {
    /// Topological degree (twice the polynomial degree).
    pub degree: u32,
    pub rank: usize,
    #[serde(serialize_with = "ser_bigints")]
    pub torsion: Vec<BigInt>,
}

pub(crate) fn ser_bigints<S: serde::Serializer>(
    v: &[BigInt],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

type CacheKey = (GkmGraph, u32);

static COMPONENTS: LazyLock<RwLock<HashMap<CacheKey, Arc<DegreeComponent>>>> =
    LazyLock::new(|| RwLock::new(HashMap::new()));

/// Degree-`d` component of H*(g), computed once per (graph, d).
pub fn degree_component(g: &GkmGraph, d: u32) -> Arc<DegreeComponent> {
    let key = (g.clone(), d);
    if let Some(c) = COMPONENTS.read().unwrap().get(&key) {
        return c.clone();
    }
    let c = Arc::new(solve_component(g, d));
    COMPONENTS.write().unwrap().entry(key).or_insert(c).clone()
}

fn substitution_image(m: &Monomial, k: usize, s: &Polynomial) -> Polynomial {
    let r = m.n();
    let mut rest = m.exps().to_vec();
    let ek = rest[k];
    rest[k] = 0;
    let base = Polynomial::from_terms(r, [(Monomial::new(rest), BigInt::from(1))]);
    &base * &s.pow(ek)
}

/// Directed edges carrying independent congruences.
fn congruence_edges(g: &GkmGraph) -> Vec<(Edge, LinearForm)> {
    let mut out = Vec::new();
    for e in g.edges() {
        let l = g.alpha(e.src, e.dst);
        if e.src < e.dst || g.axial(e.reversed()) != Some(&-l) {
            out.push((e, l.clone()));
        }
    }
    out
}

/// Solves the congruence system in degree `d` over ℤ.
///
/// Unit-coefficient edges are encoded by substituting the hyperplane `l = 0`
/// and requiring every coefficient of the result to vanish. Other edges get
/// auxiliary quotient unknowns `g` with `f(i) - f(j) - l·g = 0`.
pub fn solve_component(g: &GkmGraph, d: u32) -> DegreeComponent {
    let r = g.rank();
    let monos = monomials_of_degree(r, d);
    let m = monos.len();
    let base = g.num_vertices() * m;
    let lower = if d > 0 {
        monomials_of_degree(r, d - 1)
    } else {
        Vec::new()
    };
    let mut aux = 0usize;
    let mut rows: Vec<Vec<(usize, BigInt)>> = Vec::new();
    let one = BigInt::from(1);
    for (e, l) in congruence_edges(g) {
        let (i, j) = (e.src - 1, e.dst - 1);
        let unit = l.coeffs().iter().position(|c| c.abs() == one);
        match unit {
            Some(k) if d > 0 => {
                let ck = &l.coeffs()[k];
                let rest = Polynomial::from_terms(
                    r,
                    l.coeffs()
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| *t != k)
                        .map(|(t, c)| (Monomial::var(r, t + 1), -(c * ck))),
                );
                let mut by_target: std::collections::BTreeMap<Monomial, Vec<(usize, BigInt)>> =
                    Default::default();
                for (mi, mono) in monos.iter().enumerate() {
                    for (t, c) in substitution_image(mono, k, &rest).terms() {
                        let row = by_target.entry(t.clone()).or_default();
                        row.push((i * m + mi, c.clone()));
                        row.push((j * m + mi, -c));
                    }
                }
                rows.extend(by_target.into_values());
            }
            _ => {
                let start = base + aux;
                if d > 0 && !l.is_zero() {
                    aux += lower.len();
                }
                for (mi, mono) in monos.iter().enumerate() {
                    let mut row = vec![(i * m + mi, one.clone()), (j * m + mi, -&one)];
                    if d > 0 && !l.is_zero() {
                        for (ui, u) in lower.iter().enumerate() {
                            for (t, c) in l.coeffs().iter().enumerate() {
                                if !c.is_zero() && u.mul(&Monomial::var(r, t + 1)) == *mono {
                                    row.push((start + ui, -c));
                                }
                            }
                        }
                    }
                    rows.push(row);
                }
            }
        }
    }
    let kernel = lattice::kernel_basis(base + aux, rows);
    let basis = if aux == 0 {
        kernel
    } else {
        lattice::hermite_rows(
            kernel
                .into_iter()
                .map(|mut row| {
                    row.truncate(base);
                    row
                })
                .collect(),
        )
    };
    DegreeComponent {
        degree: d,
        monomials: monos,
        basis,
    }
}

/// Binomial coefficient C(a, b).
pub fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1usize, |acc, i| acc * (a - i) / (i + 1))
}

/// Rank of the degree-`d` part of a free H*(BT^r)-module with generators in the given polynomial degrees.
pub fn free_module_rank(r: usize, generator_degrees: &[u32], d: u32) -> usize {
    generator_degrees
        .iter()
        .filter(|&&b| b <= d)
        .map(|&b| binomial(r + (d - b) as usize - 1, (d - b) as usize))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, s: &str) -> Polynomial {
        Polynomial::parse(n, s).unwrap()
    }

    fn class(g: &Arc<GkmGraph>, vals: &[&str]) -> CohomClass {
        let r = g.rank();
        CohomClass::new(g.clone(), vals.iter().map(|s| p(r, s)).collect()).unwrap()
    }

    #[test]
    fn verify_examples() {
        let g3 = Arc::new(GkmGraph::odd_quadric(2).unwrap());
        let m4 = class(&g3, &["-2*a1", "-a1 - a2", "a2 - a1", "0"]);
        assert!(m4.verify().is_ok());
        let g5 = Arc::new(GkmGraph::odd_quadric(3).unwrap());
        let q = class(&g5, &["-a1", "-a2", "-a3", "a3", "a2", "a1"]);
        assert!(q.verify().is_ok());
        let bad = class(&g3, &["a2", "0", "0", "0"]);
        let rep = bad.verify();
        assert!(!rep.is_ok());
        assert!(rep.failures.iter().all(|e| e.src == 1 || e.dst == 1));
        assert_eq!(rep.failures.len(), 6);
    }

    #[test]
    fn constants_and_restriction() {
        let g = Arc::new(GkmGraph::odd_quadric(2).unwrap());
        let c = constant_class(&g, &p(2, "a1"));
        assert!(c.verify().is_ok());
        assert!(constant_class(&g, &Polynomial::zero(2)).is_zero());
        assert_eq!(c.restrict_to_vertex(3).unwrap(), &p(2, "a1"));
        assert_eq!(c.restrict_to_vertex(5), Err(Error::UnknownVertex(5)));
        assert!((&c * &CohomClass::zero(g.clone())).is_zero());
    }

    #[test]
    fn graph_mismatch() {
        let a = constant_class(
            &Arc::new(GkmGraph::odd_quadric(2).unwrap()),
            &Polynomial::one(2),
        );
        let b = constant_class(
            &Arc::new(GkmGraph::even_quadric(2).unwrap()),
            &Polynomial::one(2),
        );
        assert_eq!(a.checked_add(&b), Err(Error::GraphMismatch));
    }

    #[test]
    fn iota_star_keeps_values() {
        let odd = Arc::new(GkmGraph::odd_quadric(2).unwrap());
        let even = Arc::new(GkmGraph::even_quadric(2).unwrap());
        let q = class(&odd, &["-a1", "-a2", "a2", "a1"]);
        let x = iota_star(&q, &even).unwrap();
        assert_eq!(x.values(), q.values());
        assert!(x.verify().is_ok());
        assert!(iota_star(&CohomClass::zero(odd.clone()), &even)
            .unwrap()
            .is_zero());
        assert!(iota_star(&x, &even).is_err());
    }

    /// Brute force over a coefficient box: counts valid classes, independent of the lattice code.
    fn brute_force_rank_odd2_deg1() -> usize {
        // Unknowns: 4 vertices × 2 monomials = 8 coefficients in [-1, 1].
        let g = GkmGraph::odd_quadric(2).unwrap();
        let mut valid: Vec<Vec<i64>> = Vec::new();
        for code in 0..3i64.pow(8) {
            let mut c = code;
            let mut xs = Vec::with_capacity(8);
            for _ in 0..8 {
                xs.push(c % 3 - 1);
                c /= 3;
            }
            let values: Vec<Polynomial> = (0..4)
                .map(|v| {
                    Polynomial::from_terms(
                        2,
                        [
                            (Monomial::new(vec![1, 0]), BigInt::from(xs[2 * v])),
                            (Monomial::new(vec![0, 1]), BigInt::from(xs[2 * v + 1])),
                        ],
                    )
                })
                .collect();
            if verify_class(&g, &values).is_ok() {
                valid.push(xs);
            }
        }
        lattice::rank(
            valid
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    #[test]
    fn component_ranks() {
        let g = GkmGraph::odd_quadric(2).unwrap();
        assert_eq!(degree_component(&g, 0).rank(), 1);
        assert_eq!(degree_component(&g, 1).rank(), brute_force_rank_odd2_deg1());
        assert_eq!(degree_component(&g, 1).rank(), 3);
        for n in 1..=3 {
            let g = GkmGraph::odd_quadric(n).unwrap();
            let degs: Vec<u32> = (0..2 * n as u32).collect();
            for d in 0..=4 {
                assert_eq!(
                    degree_component(&g, d).rank(),
                    free_module_rank(n, &degs, d),
                    "n={n} d={d}"
                );
            }
        }
    }

    #[test]
    fn component_basis_is_valid_and_saturated() {
        let g = Arc::new(GkmGraph::odd_quadric(2).unwrap());
        let comp = degree_component(&g, 2);
        for c in comp.classes(&g) {
            assert!(c.verify().is_ok());
            assert_eq!(c.degree(), Some(2));
        }
        // a1 * M_1 lies in the lattice; half of it does not.
        let m1 = class(&g, &["0", "a1 - a2", "a1 + a2", "2*a1"]);
        let f = m1.scale(&p(2, "a1"));
        assert!(comp.coordinates(&f).is_some());
        let half = class(&g, &["0", "0", "0", "a1^2"]);
        assert!(half.verify().is_ok() == comp.coordinates(&half).is_some());
    }

    #[test]
    fn cp1_component_index() {
        let g = Arc::new(GkmGraph::cp1(2).unwrap());
        let comp = degree_component(&g, 1);
        assert_eq!(comp.rank(), 2);
        assert_eq!(
            lattice::abs_determinant(comp.basis.clone()),
            BigInt::from(2)
        );
        assert_eq!(degree_component(&g, 0).rank(), 1);
    }

    #[test]
    fn class_json_round_trip() {
        let g = Arc::new(GkmGraph::odd_quadric(2).unwrap());
        let q = class(&g, &["-a1", "-a2", "a2", "a1"]);
        let v = q.to_json();
        assert_eq!(v["graph"], json!({"family": "odd", "n": 2}));
        assert_eq!(CohomClass::from_json(&v, None).unwrap(), q);
        let bad = Arc::new(
            g.with_axial(Edge::new(1, 2), LinearForm::from_i64s(&[1, 1]))
                .unwrap(),
        );
        let c = constant_class(&bad, &Polynomial::one(2));
        let v = c.to_json();
        assert!(v["graph"].get("edges").is_some());
        assert_eq!(CohomClass::from_json(&v, None).unwrap(), c);
    }

    #[test]
    fn free_rank_formula() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(free_module_rank(2, &[0, 1, 2, 3], 1), 3);
        assert_eq!(free_module_rank(1, &[0, 1], 3), 2);
    }
}
