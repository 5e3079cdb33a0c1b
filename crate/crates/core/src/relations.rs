//! Checks of the relation families among the generators, on both quadric
//! graphs, and of the ι* correspondence.
//!
//! Every check is an exact class identity; a failure records the first vertex
//! where the two sides differ.

use std::collections::BTreeSet;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{constant_class, degree_component, iota_star, CohomClass};
use crate::error::Result;
use crate::generators::{
    admissible_subsets, make_delta, make_delta_prime, make_m, make_m_prime, make_q, make_x,
};
use crate::graph::{Family, GkmGraph, Vertex};
use crate::lattice;
use crate::poly::Polynomial;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    PreconditionViolated,
}

#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct CheckRecord {
    pub relation: String,
    pub instance: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness_vertex: Option<Vertex>,
}

impl CheckRecord {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    pub fn flag(relation: &str, instance: String, ok: bool) -> CheckRecord {
        CheckRecord {
            relation: relation.into(),
            instance,
            status: if ok { Status::Pass } else { Status::Fail },
            witness_vertex: None,
        }
    }
}

/// Records whether two classes agree at every vertex.
pub fn check_equal(
    relation: &str,
    instance: String,
    lhs: &CohomClass,
    rhs: &CohomClass,
) -> CheckRecord {
    let witness = lhs.first_difference(rhs);
    CheckRecord {
        relation: relation.into(),
        instance,
        status: if witness.is_none() {
            Status::Pass
        } else {
            Status::Fail
        },
        witness_vertex: witness,
    }
}

fn check_zero(relation: &str, instance: String, c: &CohomClass) -> CheckRecord {
    check_equal(relation, instance, c, &CohomClass::zero(c.graph().clone()))
}

fn set_name(k: &[Vertex]) -> String {
    let parts: Vec<String> = k.iter().map(|v| v.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// A generator named by its underlying subset: M_v for V∖{v}, Δ_J otherwise.
#[derive(Clone, PartialEq, Eq, Debug, PartialOrd, Ord)]
pub struct GeneratorIndex {
    pub subset: Vec<Vertex>,
}

impl GeneratorIndex {
    pub fn new(subset: &[Vertex]) -> Self {
        let mut s = subset.to_vec();
        s.sort_unstable();
        s.dedup();
        GeneratorIndex { subset: s }
    }

    fn complement_vertex(&self, g: &GkmGraph) -> Option<Vertex> {
        (self.subset.len() + 1 == g.num_vertices())
            .then(|| g.vertices().find(|v| !self.subset.contains(v)))
            .flatten()
    }

    pub fn name(&self, g: &GkmGraph) -> String {
        let prime = if g.family() == Family::Even { "'" } else { "" };
        match self.complement_vertex(g) {
            Some(v) => format!("M{prime}_{v}"),
            None => format!("Delta{prime}_{}", set_name(&self.subset)),
        }
    }

    pub fn class(&self, g: &Arc<GkmGraph>) -> Result<CohomClass> {
        let even = g.family() == Family::Even;
        match (self.complement_vertex(g), even) {
            (Some(v), false) => make_m(g, v),
            (Some(v), true) => make_m_prime(g, v),
            (None, false) => make_delta(g, &self.subset),
            (None, true) => make_delta_prime(g, &self.subset),
        }
    }
}

/// Every generator index of a quadric graph with n ≥ 2.
pub fn generator_indices(g: &GkmGraph) -> Vec<GeneratorIndex> {
    let mut out: Vec<GeneratorIndex> = g
        .vertices()
        .map(|v| GeneratorIndex::new(&g.vertices().filter(|&u| u != v).collect::<Vec<_>>()))
        .collect();
    out.extend(admissible_subsets(g).iter().map(|k| GeneratorIndex::new(k)));
    out.sort();
    out.dedup();
    out
}

/// The product over a family with empty common intersection vanishes.
pub fn verify_relation1(g: &Arc<GkmGraph>, family: &[GeneratorIndex]) -> Result<CheckRecord> {
    let names: Vec<String> = family.iter().map(|i| i.name(g)).collect();
    let instance = names.join("*");
    let mut common: BTreeSet<Vertex> = g.vertices().collect();
    for idx in family {
        common.retain(|v| idx.subset.contains(v));
    }
    if !common.is_empty() || family.is_empty() {
        return Ok(CheckRecord {
            relation: "relation1".into(),
            instance,
            status: Status::PreconditionViolated,
            witness_vertex: common.first().copied(),
        });
    }
    let mut prod = family[0].class(g)?;
    for idx in &family[1..] {
        prod = &prod * &idx.class(g)?;
    }
    Ok(check_zero("relation1", instance, &prod))
}

fn combinations<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    fn rec<T: Clone>(items: &[T], k: usize, start: usize, cur: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            cur.push(items[i].clone());
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(items, k, 0, &mut Vec::new(), &mut out);
    out
}

/// All families of 2..=`bound` distinct generator indices with empty common intersection.
/// For n = 1 the four listed products M_1M_1̄, M_1Δ_1, M_1̄Δ_1̄, Δ_1Δ_1̄ are checked instead.
pub fn relation1_suite(g: &Arc<GkmGraph>, bound: usize) -> Result<Vec<CheckRecord>> {
    if g.n() == 1 {
        let pairs: [(&str, CohomClass, CohomClass); 4] = [
            ("M_1*M_2", make_m(g, 1)?, make_m(g, 2)?),
            ("M_1*Delta_{1}", make_m(g, 1)?, make_delta(g, &[1])?),
            ("M_2*Delta_{2}", make_m(g, 2)?, make_delta(g, &[2])?),
            (
                "Delta_{1}*Delta_{2}",
                make_delta(g, &[1])?,
                make_delta(g, &[2])?,
            ),
        ];
        return Ok(pairs
            .iter()
            .map(|(name, a, b)| check_zero("relation1", name.to_string(), &(a * b)))
            .collect());
    }
    let idx = generator_indices(g);
    let mut families = Vec::new();
    for size in 2..=bound.max(2) {
        for fam in combinations(&idx, size) {
            let disjoint = g
                .vertices()
                .all(|v| fam.iter().any(|i| !i.subset.contains(&v)));
            if disjoint {
                families.push(fam);
            }
        }
    }
    families
        .par_iter()
        .map(|f| verify_relation1(g, f))
        .collect()
}

/// M_v + M_v̄ = 2Q for every v.
pub fn verify_relation2(g: &Arc<GkmGraph>) -> Result<Vec<CheckRecord>> {
    let q2 = make_q(g)?.scale_int(2);
    g.vertices()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&v| {
            let vb = g.opposite(v);
            let lhs = &make_m(g, v)? + &make_m(g, vb)?;
            Ok(check_equal(
                "relation2",
                format!("M_{v}+M_{vb}=2Q"),
                &lhs,
                &q2,
            ))
        })
        .collect()
}

/// Sets with exactly one vertex from each antipodal pair.
pub fn transversals(g: &GkmGraph) -> Vec<Vec<Vertex>> {
    let n = g.num_vertices() / 2;
    let mut out = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut k: Vec<Vertex> = (1..=n)
            .map(|i| {
                if mask & (1 << (i - 1)) != 0 {
                    g.opposite(i)
                } else {
                    i
                }
            })
            .collect();
        k.sort_unstable();
        out.push(k);
    }
    out.sort();
    out
}

/// 2Δ_K equals the product of M_i over i ∉ K, for every K with one vertex per pair.
pub fn verify_relation3(g: &Arc<GkmGraph>) -> Result<Vec<CheckRecord>> {
    transversals(g)
        .par_iter()
        .map(|k| {
            let lhs = make_delta(g, k)?.scale_int(2);
            let mut rhs = constant_class(g, &Polynomial::one(g.rank()));
            for i in g.vertices().filter(|i| !k.contains(i)) {
                rhs = &rhs * &make_m(g, i)?;
            }
            Ok(check_equal(
                "relation3",
                format!("2*Delta_{}", set_name(k)),
                &lhs,
                &rhs,
            ))
        })
        .collect()
}

/// Δ_K·M_i = Δ_{K∖{i}} for every admissible K and i ∈ K (Δ_∅ = 0).
pub fn verify_relation4(g: &Arc<GkmGraph>) -> Result<Vec<CheckRecord>> {
    let cases: Vec<(Vec<Vertex>, Vertex)> = admissible_subsets(g)
        .into_iter()
        .flat_map(|k| k.clone().into_iter().map(move |i| (k.clone(), i)))
        .collect();
    cases
        .par_iter()
        .map(|(k, i)| {
            let rest: Vec<Vertex> = k.iter().copied().filter(|v| v != i).collect();
            let lhs = &make_delta(g, k)? * &make_m(g, *i)?;
            Ok(check_equal(
                "relation4",
                format!("Delta_{}*M_{i}", set_name(k)),
                &lhs,
                &make_delta(g, &rest)?,
            ))
        })
        .collect()
}

/// All four odd-graph families, Relation 1 up to families of size `bound`.
pub fn verify_odd_relations(g: &Arc<GkmGraph>, bound: usize) -> Result<Vec<CheckRecord>> {
    let mut out = relation1_suite(g, bound)?;
    out.extend(verify_relation2(g)?);
    out.extend(verify_relation3(g)?);
    out.extend(verify_relation4(g)?);
    Ok(out)
}

/// Index sets I with |I| = n-1 whose complement holds exactly one antipodal pair,
/// returned with the smaller vertex a of that pair.
pub fn even_relation3_cases(g: &GkmGraph) -> Vec<(Vec<Vertex>, Vertex)> {
    let n = g.num_vertices() / 2;
    let verts: Vec<Vertex> = g.vertices().collect();
    let mut out = Vec::new();
    for i in combinations(&verts, n - 1) {
        let comp: Vec<Vertex> = verts.iter().copied().filter(|v| !i.contains(v)).collect();
        let pairs: Vec<Vertex> = comp
            .iter()
            .copied()
            .filter(|&v| v < g.opposite(v) && comp.contains(&g.opposite(v)))
            .collect();
        if pairs.len() == 1 {
            out.push((i, pairs[0]));
        }
    }
    out
}

/// The even-graph families: disjoint products, M′_v + M′_v̄ = 2X,
/// ∏_{i∈I} M′_i = Δ′_{(I∪{a})^c} + Δ′_{(I∪{ā})^c}, and Δ′_K·M′_i = Δ′_{K∖{i}}.
pub fn verify_even_relations(g: &Arc<GkmGraph>, bound: usize) -> Result<Vec<CheckRecord>> {
    let mut out = relation1_suite(g, bound)?;
    let x2 = make_x(g)?.scale_int(2);
    for v in g.vertices() {
        let vb = g.opposite(v);
        let lhs = &make_m_prime(g, v)? + &make_m_prime(g, vb)?;
        out.push(check_equal(
            "even_relation2",
            format!("M'_{v}+M'_{vb}=2X"),
            &lhs,
            &x2,
        ));
    }
    let r3: Result<Vec<CheckRecord>> = even_relation3_cases(g)
        .par_iter()
        .map(|(i, a)| {
            let mut lhs = constant_class(g, &Polynomial::one(g.rank()));
            for &v in i {
                lhs = &lhs * &make_m_prime(g, v)?;
            }
            let without = |extra: Vertex| -> Vec<Vertex> {
                g.vertices()
                    .filter(|v| !i.contains(v) && *v != extra)
                    .collect()
            };
            let rhs = &make_delta_prime(g, &without(*a))?
                + &make_delta_prime(g, &without(g.opposite(*a)))?;
            Ok(check_equal(
                "even_relation3",
                format!("I={} a={a}", set_name(i)),
                &lhs,
                &rhs,
            ))
        })
        .collect();
    out.extend(r3?);
    let cases: Vec<(Vec<Vertex>, Vertex)> = admissible_subsets(g)
        .into_iter()
        .flat_map(|k| k.clone().into_iter().map(move |i| (k.clone(), i)))
        .collect();
    let r4: Result<Vec<CheckRecord>> = cases
        .par_iter()
        .map(|(k, i)| {
            let rest: Vec<Vertex> = k.iter().copied().filter(|v| v != i).collect();
            let lhs = &make_delta_prime(g, k)? * &make_m_prime(g, *i)?;
            Ok(check_equal(
                "even_relation4",
                format!("Delta'_{}*M'_{i}", set_name(k)),
                &lhs,
                &make_delta_prime(g, &rest)?,
            ))
        })
        .collect();
    out.extend(r4?);
    Ok(out)
}

/// ι*(M_v) = M′_v, ι*(Q) = X, ι*(Δ_J) = X·Δ′_J and ι*(ϑ(a_i)) = ϑ(a_i).
pub fn verify_iota_star_correspondence(n: usize) -> Result<Vec<CheckRecord>> {
    let odd = Arc::new(GkmGraph::odd_quadric(n)?);
    let even = Arc::new(GkmGraph::even_quadric(n)?);
    let mut out = Vec::new();
    for v in odd.vertices() {
        let img = iota_star(&make_m(&odd, v)?, &even)?;
        out.push(check_equal(
            "iota",
            format!("M_{v}->M'_{v}"),
            &img,
            &make_m_prime(&even, v)?,
        ));
    }
    let x = make_x(&even)?;
    out.push(check_equal(
        "iota",
        "Q->X".into(),
        &iota_star(&make_q(&odd)?, &even)?,
        &x,
    ));
    for j in admissible_subsets(&odd) {
        let img = iota_star(&make_delta(&odd, &j)?, &even)?;
        let rhs = &x * &make_delta_prime(&even, &j)?;
        out.push(check_equal(
            "iota",
            format!("Delta_{}->X*Delta'", set_name(&j)),
            &img,
            &rhs,
        ));
    }
    for i in 1..=n {
        let a = Polynomial::var(n, i);
        let img = iota_star(&constant_class(&odd, &a), &even)?;
        out.push(check_equal(
            "iota",
            format!("a{i}->a{i}"),
            &img,
            &constant_class(&even, &a),
        ));
    }
    Ok(out)
}

/// ι* on the degree-d component: the image of an odd ℤ-basis lies in the even
/// lattice and keeps full rank, so the kernel is zero.
pub fn verify_iota_injective(n: usize, d: u32) -> Result<CheckRecord> {
    let odd = Arc::new(GkmGraph::odd_quadric(n)?);
    let even = Arc::new(GkmGraph::even_quadric(n)?);
    let src = degree_component(&odd, d);
    let dst = degree_component(&even, d);
    let images: Vec<CohomClass> = src
        .classes(&odd)
        .iter()
        .map(|c| iota_star(c, &even))
        .collect::<Result<_>>()?;
    let inside = images.iter().all(|c| dst.coordinates(c).is_some());
    let image_rank = lattice::rank(images.iter().map(|c| dst.vectorize(c)).collect());
    Ok(CheckRecord::flag(
        "iota_injective",
        format!("n={n} d={d} rank {}->{}", src.rank(), image_rank),
        inside && image_rank == src.rank(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn odd(n: usize) -> Arc<GkmGraph> {
        Arc::new(GkmGraph::odd_quadric(n).unwrap())
    }

    fn even(n: usize) -> Arc<GkmGraph> {
        Arc::new(GkmGraph::even_quadric(n).unwrap())
    }

    fn all_pass(r: &[CheckRecord]) -> bool {
        r.iter().all(CheckRecord::passed)
    }

    #[test]
    fn relation1_examples() {
        let g = odd(2);
        let fam = [GeneratorIndex::new(&[1]), GeneratorIndex::new(&[2, 3, 4])];
        assert!(verify_relation1(&g, &fam).unwrap().passed());
        let g3 = odd(3);
        let fam = [
            GeneratorIndex::new(&[1, 3, 5]),
            GeneratorIndex::new(&[2, 4, 6]),
        ];
        let rec = verify_relation1(&g3, &fam).unwrap();
        assert_eq!(rec.instance, "Delta_{1,3,5}*Delta_{2,4,6}");
        assert!(rec.passed());
        let bad = [GeneratorIndex::new(&[1, 3]), GeneratorIndex::new(&[1, 2])];
        let rec = verify_relation1(&g3, &bad).unwrap();
        assert_eq!(rec.status, Status::PreconditionViolated);
        assert_eq!(rec.witness_vertex, Some(1));
        let n1 = relation1_suite(&odd(1), 2).unwrap();
        assert_eq!(n1.len(), 4);
        assert!(all_pass(&n1));
    }

    #[test]
    fn relation1_suites() {
        for n in 2..=3 {
            let r = relation1_suite(&odd(n), 2).unwrap();
            assert!(!r.is_empty() && all_pass(&r));
        }
        let r = relation1_suite(&odd(2), 3).unwrap();
        assert!(r.iter().any(|c| c.instance.matches('*').count() == 2));
        assert!(all_pass(&r));
    }

    #[test]
    fn relations_2_to_4() {
        for n in 1..=4 {
            let g = odd(n);
            let r2 = verify_relation2(&g).unwrap();
            let r3 = verify_relation3(&g).unwrap();
            let r4 = verify_relation4(&g).unwrap();
            assert_eq!(r2.len(), 2 * n);
            assert_eq!(r3.len(), 1 << n);
            assert!(all_pass(&r2) && all_pass(&r3) && all_pass(&r4), "n={n}");
        }
    }

    #[test]
    fn relation_examples() {
        let g = odd(2);
        let lhs = make_delta(&g, &[1, 2]).unwrap().scale_int(2);
        assert_eq!(lhs, &make_m(&g, 4).unwrap() * &make_m(&g, 3).unwrap());
        let g1 = odd(1);
        assert_eq!(
            make_delta(&g1, &[1]).unwrap().scale_int(2),
            make_m(&g1, 2).unwrap()
        );
        assert!((&make_delta(&g1, &[1]).unwrap() * &make_m(&g1, 1).unwrap()).is_zero());
        let g3 = odd(3);
        assert_eq!(
            &make_delta(&g3, &[1, 3, 5]).unwrap() * &make_m(&g3, 1).unwrap(),
            make_delta(&g3, &[3, 5]).unwrap()
        );
        assert_eq!(
            &make_delta(&g, &[1, 2]).unwrap() * &make_m(&g, 2).unwrap(),
            make_delta(&g, &[1]).unwrap()
        );
    }

    #[test]
    fn even_relations() {
        for n in 2..=4 {
            let r = verify_even_relations(&even(n), 2).unwrap();
            let failed: Vec<_> = r.iter().filter(|c| !c.passed()).collect();
            assert!(failed.is_empty(), "n={n}: {failed:?}");
        }
        let cases = even_relation3_cases(&even(2));
        assert!(cases.contains(&(vec![1], 2)));
        let g = even(2);
        let lhs = make_m_prime(&g, 1).unwrap();
        let rhs = &make_delta_prime(&g, &[3, 4]).unwrap() + &make_delta_prime(&g, &[2, 4]).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn wrong_relation_is_caught() {
        let g = odd(2);
        let lhs = make_delta(&g, &[1, 2]).unwrap();
        let rhs = &make_m(&g, 4).unwrap() * &make_m(&g, 3).unwrap();
        let rec = check_equal("probe", "Delta vs M*M".into(), &lhs, &rhs);
        assert_eq!(rec.status, Status::Fail);
        assert_eq!(rec.witness_vertex, Some(1));
    }

    #[test]
    fn iota_checks() {
        for n in 2..=3 {
            assert!(all_pass(&verify_iota_star_correspondence(n).unwrap()));
            for d in 0..=3 {
                assert!(verify_iota_injective(n, d).unwrap().passed());
            }
        }
    }
}
