//! Named classes: M_v, Q, Δ_K on odd quadrics; M′_v, Δ′_K, X on even quadrics;
//! τ_p, τ_q and the constant α on CP¹.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Arc, LazyLock, RwLock};

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::cohomology::{constant_class, CohomClass};
use crate::error::{Error, Result};
use crate::graph::{signed_var, Family, GkmGraph, Vertex};
use crate::poly::Polynomial;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GeneratorKind {
    M,
    Q,
    Delta,
    Mprime,
    Deltaprime,
    X,
    TauP,
    TauQ,
    AlphaConst,
}

#[derive(Clone, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub vertex: Option<Vertex>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<Vertex>>,
}

impl GeneratorSpec {
    pub fn plain(kind: GeneratorKind) -> Self {
        GeneratorSpec {
            kind,
            vertex: None,
            subset: None,
        }
    }

    pub fn at(kind: GeneratorKind, v: Vertex) -> Self {
        GeneratorSpec {
            kind,
            vertex: Some(v),
            subset: None,
        }
    }

    pub fn on(kind: GeneratorKind, k: &[Vertex]) -> Self {
        let mut s = k.to_vec();
        s.sort_unstable();
        s.dedup();
        GeneratorSpec {
            kind,
            vertex: None,
            subset: Some(s),
        }
    }
}

type Memo = HashMap<(GkmGraph, GeneratorSpec), Vec<Polynomial>>;

static MEMO: LazyLock<RwLock<Memo>> = LazyLock::new(|| RwLock::new(HashMap::new()));

/// Builds (or fetches from the memo) the class named by `spec` on `g`.
pub fn materialize(g: &Arc<GkmGraph>, spec: &GeneratorSpec) -> Result<CohomClass> {
    let mut spec = spec.clone();
    if let Some(s) = spec.subset.as_mut() {
        s.sort_unstable();
        s.dedup();
    }
    let key = ((**g).clone(), spec);
    if let Some(vals) = MEMO.read().unwrap().get(&key) {
        return CohomClass::new(g.clone(), vals.clone());
    }
    let c = build(g, &key.1)?;
    MEMO.write().unwrap().insert(key, c.values().to_vec());
    Ok(c)
}

fn need(g: &GkmGraph, fam: Family, what: &str) -> Result<()> {
    if g.family() == fam {
        Ok(())
    } else {
        Err(Error::WrongFamily(format!(
            "{what} is defined on the {} family",
            fam.name()
        )))
    }
}

fn need_vertex(g: &GkmGraph, spec: &GeneratorSpec) -> Result<Vertex> {
    let v = spec
        .vertex
        .ok_or_else(|| Error::Malformed(format!("{:?} needs a vertex", spec.kind)))?;
    if g.contains(v) {
        Ok(v)
    } else {
        Err(Error::UnknownVertex(v))
    }
}

fn need_subset(g: &GkmGraph, spec: &GeneratorSpec) -> Result<BTreeSet<Vertex>> {
    let k: BTreeSet<Vertex> = spec
        .subset
        .as_ref()
        .ok_or_else(|| Error::Malformed(format!("{:?} needs a subset", spec.kind)))?
        .iter()
        .copied()
        .collect();
    if let Some(&v) = k.iter().find(|&&v| !g.contains(v)) {
        return Err(Error::UnknownVertex(v));
    }
    if k.iter().any(|&v| k.contains(&g.opposite(v))) {
        return Err(Error::IllegalSubset(k.into_iter().collect()));
    }
    Ok(k)
}

fn build(g: &Arc<GkmGraph>, spec: &GeneratorSpec) -> Result<CohomClass> {
    let r = g.rank();
    let lin = |p: Vertex, q: Vertex| g.alpha(p, q).to_polynomial();
    let values: Vec<Polynomial> = match spec.kind {
        GeneratorKind::M | GeneratorKind::Mprime => {
            if spec.kind == GeneratorKind::M {
                need(g, Family::Odd, "M")?;
            } else {
                need(g, Family::Even, "M'")?;
            }
            let v = need_vertex(g, spec)?;
            let vb = g.opposite(v);
            g.vertices()
                .map(|j| {
                    if j == v {
                        Polynomial::zero(r)
                    } else if j == vb {
                        signed_var(r, v).to_polynomial().scale(&BigInt::from(2))
                    } else {
                        lin(j, v)
                    }
                })
                .collect()
        }
        GeneratorKind::Q => {
            need(g, Family::Odd, "Q")?;
            g.vertices().map(|j| lin(j, g.opposite(j))).collect()
        }
        GeneratorKind::X => {
            need(g, Family::Even, "X")?;
            g.vertices()
                .map(|j| -signed_var(r, j).to_polynomial())
                .collect()
        }
        GeneratorKind::Delta | GeneratorKind::Deltaprime => {
            let prime = spec.kind == GeneratorKind::Deltaprime;
            if prime {
                need(g, Family::Even, "Delta'")?;
            } else {
                need(g, Family::Odd, "Delta")?;
            }
            let k = need_subset(g, spec)?;
            g.vertices()
                .map(|j| {
                    if !k.contains(&j) {
                        return Polynomial::zero(r);
                    }
                    let jb = g.opposite(j);
                    g.vertices()
                        .filter(|t| !k.contains(t) && !(prime && *t == jb))
                        .fold(Polynomial::one(r), |acc, t| &acc * &lin(j, t))
                })
                .collect()
        }
        GeneratorKind::TauP | GeneratorKind::TauQ => {
            need(g, Family::Cp1, "tau")?;
            let z = Polynomial::zero(1);
            if spec.kind == GeneratorKind::TauP {
                vec![lin(1, 2), z]
            } else {
                vec![z, lin(2, 1)]
            }
        }
        GeneratorKind::AlphaConst => match g.family() {
            Family::Cp1 => vec![Polynomial::var(1, 1); 2],
            _ => {
                let v = need_vertex(g, spec)?;
                vec![signed_var(r, v).to_polynomial(); g.num_vertices()]
            }
        },
    };
    CohomClass::new(g.clone(), values)
}

pub fn make_m(g: &Arc<GkmGraph>, v: Vertex) -> Result<CohomClass> {
    materialize(g, &GeneratorSpec::at(GeneratorKind::M, v))
}

pub fn make_q(g: &Arc<GkmGraph>) -> Result<CohomClass> {
    materialize(g, &GeneratorSpec::plain(GeneratorKind::Q))
}

/// Δ_K; the empty set gives the zero class.
pub fn make_delta(g: &Arc<GkmGraph>, k: &[Vertex]) -> Result<CohomClass> {
    materialize(g, &GeneratorSpec::on(GeneratorKind::Delta, k))
}

pub fn make_m_prime(g: &Arc<GkmGraph>, v: Vertex) -> Result<CohomClass> {
    materialize(g, &GeneratorSpec::at(GeneratorKind::Mprime, v))
}

pub fn make_x(g: &Arc<GkmGraph>) -> Result<CohomClass> {
    materialize(g, &GeneratorSpec::plain(GeneratorKind::X))
}

pub fn make_delta_prime(g: &Arc<GkmGraph>, k: &[Vertex]) -> Result<CohomClass> {
    materialize(g, &GeneratorSpec::on(GeneratorKind::Deltaprime, k))
}

/// ϑ(a_v): the constant class of the signed variable at a quadric vertex.
pub fn make_alpha_const(g: &Arc<GkmGraph>, v: Vertex) -> Result<CohomClass> {
    materialize(g, &GeneratorSpec::at(GeneratorKind::AlphaConst, v))
}

/// ϑ(x).
pub fn theta(g: &Arc<GkmGraph>, x: &Polynomial) -> CohomClass {
    constant_class(g, x)
}

/// (τ_p, τ_q, α) on the CP¹ graph with edge label nα.
///
/// Thom classes take the normal weight at their vertex: τ_p(p) = α(pq) = nα and
/// τ_q(q) = α(qp) = -nα, so that nα - τ_p + τ_q = 0.
pub fn make_cp1_generators(n: usize) -> Result<(CohomClass, CohomClass, CohomClass)> {
    let g = Arc::new(GkmGraph::cp1(n)?);
    Ok((
        materialize(&g, &GeneratorSpec::plain(GeneratorKind::TauP))?,
        materialize(&g, &GeneratorSpec::plain(GeneratorKind::TauQ))?,
        materialize(&g, &GeneratorSpec::plain(GeneratorKind::AlphaConst))?,
    ))
}

/// Every nonempty subset of the vertices with no antipodal pair, in lexicographic order.
pub fn admissible_subsets(g: &GkmGraph) -> Vec<Vec<Vertex>> {
    let verts: Vec<Vertex> = g.vertices().collect();
    let mut out = Vec::new();
    for mask in 1u64..(1 << verts.len()) {
        let s: Vec<Vertex> = verts
            .iter()
            .copied()
            .filter(|v| mask & (1 << (v - 1)) != 0)
            .collect();
        if s.iter().all(|&v| !s.contains(&g.opposite(v))) {
            out.push(s);
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::iota_star;

    fn odd(n: usize) -> Arc<GkmGraph> {
        Arc::new(GkmGraph::odd_quadric(n).unwrap())
    }

    fn even(n: usize) -> Arc<GkmGraph> {
        Arc::new(GkmGraph::even_quadric(n).unwrap())
    }

    fn vals(n: usize, s: &[&str]) -> Vec<Polynomial> {
        s.iter().map(|x| Polynomial::parse(n, x).unwrap()).collect()
    }

    #[test]
    fn m_examples() {
        assert_eq!(
            make_m(&odd(3), 1).unwrap().values(),
            vals(
                3,
                &["0", "a1 - a2", "a1 - a3", "a1 + a3", "a1 + a2", "2*a1"]
            )
        );
        assert_eq!(
            make_m(&odd(2), 4).unwrap().values(),
            vals(2, &["-2*a1", "-a2 - a1", "a2 - a1", "0"])
        );
        assert_eq!(
            make_m(&odd(1), 1).unwrap().values(),
            vals(1, &["0", "2*a1"])
        );
        assert_eq!(make_m(&odd(2), 5), Err(Error::UnknownVertex(5)));
        assert!(make_m(&even(2), 1).is_err());
    }

    #[test]
    fn q_examples() {
        assert_eq!(
            make_q(&odd(3)).unwrap().values(),
            vals(3, &["-a1", "-a2", "-a3", "a3", "a2", "a1"])
        );
        assert_eq!(
            make_q(&odd(2)).unwrap().value(3),
            &Polynomial::parse(2, "a2").unwrap()
        );
        let g = odd(1);
        let q = make_q(&g).unwrap();
        assert_eq!(q.values(), vals(1, &["-a1", "a1"]));
        assert_eq!(
            q,
            make_delta(&g, &[1]).unwrap() + make_delta(&g, &[2]).unwrap()
        );
        assert_eq!(
            make_m(&g, 2).unwrap(),
            make_delta(&g, &[1]).unwrap().scale_int(2)
        );
    }

    #[test]
    fn delta_examples() {
        let g = odd(3);
        let d = make_delta(&g, &[4, 5, 6]).unwrap();
        assert_eq!(
            d.values(),
            vals(
                3,
                &[
                    "0",
                    "0",
                    "0",
                    "a3*(a1 + a3)*(a2 + a3)",
                    "a2*(a1 + a2)*(a2 + a3)",
                    "a1*(a1 + a2)*(a1 + a3)"
                ]
            )
        );
        assert!(make_delta(&g, &[]).unwrap().is_zero());
        assert_eq!(
            make_delta(&odd(2), &[1, 2, 3]),
            Err(Error::IllegalSubset(vec![1, 2, 3]))
        );
    }

    #[test]
    fn delta_prime_examples() {
        let g = even(3);
        let d = make_delta_prime(&g, &[1, 2, 3]).unwrap();
        let expect = &g.alpha(1, 4).to_polynomial() * &g.alpha(1, 5).to_polynomial();
        assert_eq!(d.value(1), &expect);
        assert!(d.value(4).is_zero() && d.value(6).is_zero());
        assert_eq!(d.degree(), Some(2));
        let x = make_x(&g).unwrap();
        let dk = make_delta(&odd(3), &[1, 2, 3]).unwrap();
        assert_eq!(iota_star(&dk, &g).unwrap(), &x * &d);
        assert!(make_delta_prime(&g, &[1, 6]).is_err());
    }

    #[test]
    fn primes_are_restrictions() {
        for n in 2..=4 {
            let (o, e) = (odd(n), even(n));
            for v in o.vertices() {
                let mp = make_m_prime(&e, v).unwrap();
                assert_eq!(iota_star(&make_m(&o, v).unwrap(), &e).unwrap(), mp);
                assert_eq!(
                    mp.value(o.opposite(v)),
                    &signed_var(n, v).to_polynomial().scale(&BigInt::from(2))
                );
                let sum = &mp + &make_m_prime(&e, o.opposite(v)).unwrap();
                assert_eq!(sum, make_x(&e).unwrap().scale_int(2));
            }
            assert_eq!(
                iota_star(&make_q(&o).unwrap(), &e).unwrap(),
                make_x(&e).unwrap()
            );
        }
    }

    #[test]
    fn every_generator_is_a_class() {
        for n in 1..=4 {
            let g = odd(n);
            for v in g.vertices() {
                assert!(make_m(&g, v).unwrap().verify().is_ok());
            }
            assert!(make_q(&g).unwrap().verify().is_ok());
            for k in admissible_subsets(&g) {
                let d = make_delta(&g, &k).unwrap();
                assert!(d.verify().is_ok(), "{k:?}");
                assert_eq!(d.degree(), Some((2 * n - k.len()) as u32));
            }
        }
        for n in 2..=4 {
            let g = even(n);
            for v in g.vertices() {
                assert!(make_m_prime(&g, v).unwrap().verify().is_ok());
            }
            assert!(make_x(&g).unwrap().verify().is_ok());
            for k in admissible_subsets(&g) {
                let d = make_delta_prime(&g, &k).unwrap();
                assert!(d.verify().is_ok(), "{k:?}");
                let deg = 2 * n - k.len() - 1;
                if deg > 0 || !d.is_zero() {
                    assert_eq!(d.degree(), Some(deg as u32), "{k:?}");
                }
            }
        }
    }

    #[test]
    fn linear_relations() {
        for n in 1..=4 {
            let g = odd(n);
            let q = make_q(&g).unwrap();
            for i in 1..=n {
                let a = theta(&g, &Polynomial::var(n, i));
                assert_eq!(a, &make_m(&g, i).unwrap() - &q);
            }
            for v in g.vertices() {
                let m = make_m(&g, v).unwrap();
                let mb = make_m(&g, g.opposite(v)).unwrap();
                assert_eq!(&m + &mb, q.scale_int(2));
                assert_eq!(&m - &mb, make_alpha_const(&g, v).unwrap().scale_int(2));
            }
        }
    }

    #[test]
    fn cp1_generators() {
        let (tp, tq, a) = make_cp1_generators(1).unwrap();
        assert_eq!(tp.values(), vals(1, &["a1", "0"]));
        assert_eq!(tq.values(), vals(1, &["0", "-a1"]));
        for n in 1..=6 {
            let (tp, tq, a) = make_cp1_generators(n).unwrap();
            for c in [&tp, &tq, &a] {
                assert!(c.verify().is_ok());
            }
            assert!((&tp * &tq).is_zero());
            assert!((&(&a.scale_int(n) - &tp) + &tq).is_zero());
        }
        assert!(a.verify().is_ok());
        assert!(make_cp1_generators(0).is_err());
    }

    #[test]
    fn spec_json() {
        let s = GeneratorSpec::on(GeneratorKind::Delta, &[6, 4, 5]);
        let j = serde_json::to_string(&s).unwrap();
        assert_eq!(j, r#"{"kind":"Delta","subset":[4,5,6]}"#);
        let back: GeneratorSpec = serde_json::from_str(r#"{"kind":"M","vertex":2}"#).unwrap();
        assert_eq!(back, GeneratorSpec::at(GeneratorKind::M, 2));
    }

    #[test]
    fn admissible_counts() {
        for n in 1..=4 {
            assert_eq!(admissible_subsets(&odd(n)).len(), 3usize.pow(n as u32) - 1);
        }
    }
}
