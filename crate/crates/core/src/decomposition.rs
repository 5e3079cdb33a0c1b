//! Decomposition of classes over the module basis by sequential vertex reduction.
//!
//! Odd basis, in order: 1, M_1, M_1M_2, …, M_1⋯M_{n-1}, Δ_{n+1..2n}, Δ_{n+2..2n}, …, Δ_{2n}.
//! The even graph uses the same shape with M′ and Δ′.
//! Coefficient k is read off at vertex k, where every later basis class vanishes.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::{constant_class, degree_component, free_module_rank, CohomClass};
use crate::error::{Error, Result};
use crate::generators::{
    admissible_subsets, make_delta, make_delta_prime, make_m, make_m_prime, make_q, make_x,
};
use crate::graph::{Family, GkmGraph, Vertex};
use crate::lattice;
use crate::poly::{monomials_of_degree, LinearForm, Polynomial};
use crate::relations::CheckRecord;

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Decomposition {
    pub coefficients: Vec<Polynomial>,
}

impl Decomposition {
    pub fn to_json(&self) -> Value {
        json!({"coefficients": self.coefficients.iter().map(Polynomial::to_json).collect::<Vec<_>>()})
    }
}

fn quadric(g: &GkmGraph) -> Result<bool> {
    match g.family() {
        Family::Odd => Ok(false),
        Family::Even => Ok(true),
        Family::Cp1 => Err(Error::WrongFamily(
            "decomposition is defined for the quadric families".into(),
        )),
    }
}

/// The 2n basis classes in reduction order.
pub fn basis_classes(g: &Arc<GkmGraph>) -> Result<Vec<CohomClass>> {
    let even = quadric(g)?;
    let n = g.n();
    let mut out = vec![constant_class(g, &Polynomial::one(n))];
    for k in 2..=n {
        let m = if even {
            make_m_prime(g, k - 1)?
        } else {
            make_m(g, k - 1)?
        };
        let prev = out.last().unwrap().clone();
        out.push(&prev * &m);
    }
    for j in 1..=n {
        let k: Vec<Vertex> = (n + j..=2 * n).collect();
        out.push(if even {
            make_delta_prime(g, &k)?
        } else {
            make_delta(g, &k)?
        });
    }
    Ok(out)
}

/// Polynomial degrees of the basis classes, in order.
pub fn basis_degrees(g: &GkmGraph) -> Result<Vec<u32>> {
    let even = quadric(g)?;
    let n = g.n() as u32;
    let head = 0..n;
    let tail = (1..=n).map(move |j| if even { n + j - 2 } else { n + j - 1 });
    Ok(head.chain(tail).collect())
}

/// Linear factors of basis class k at its own vertex k.
fn pivot_factors(g: &GkmGraph, k: Vertex) -> Vec<LinearForm> {
    g.vertices()
        .take_while(|&i| i < k)
        .filter(|&i| g.has_edge(crate::graph::Edge::new(k, i)))
        .map(|i| g.alpha(k, i).clone())
        .collect()
}

fn reduce(f: &CohomClass) -> Result<Decomposition> {
    let g = f.graph().clone();
    let basis = basis_classes(&g)?;
    let mut rest = f.clone();
    let mut coefficients = Vec::with_capacity(basis.len());
    for (idx, b) in basis.iter().enumerate() {
        let k = idx + 1;
        let mut h = rest.value(k).clone();
        for l in pivot_factors(&g, k) {
            h = h
                .divide_exact(&l)
                .map_err(|_| Error::InternalDivisionFailure { vertex: k })?;
        }
        debug_assert_eq!(b.value(k) * &h, *rest.value(k));
        rest = &rest - &b.scale(&h);
        coefficients.push(h);
    }
    if let Some(v) = rest.values().iter().position(|p| !p.is_zero()) {
        return Err(Error::InternalDivisionFailure { vertex: v + 1 });
    }
    Ok(Decomposition { coefficients })
}

/// Decomposes an odd-quadric class (even-quadric classes are routed to [`decompose_even`]).
pub fn decompose(f: &CohomClass) -> Result<Decomposition> {
    quadric(f.graph())?;
    reduce(f)
}

/// Decomposes an even-quadric class over 1, M′_1, …, M′_1⋯M′_{n-1}, Δ′_{n+1..2n}, …, Δ′_{2n}.
pub fn decompose_even(f: &CohomClass) -> Result<Decomposition> {
    if f.graph().family() != Family::Even {
        return Err(Error::WrongFamily(
            "decompose_even needs an even-quadric class".into(),
        ));
    }
    reduce(f)
}

/// Σ h_k · B_k.
pub fn recompose(g: &Arc<GkmGraph>, h: &Decomposition) -> Result<CohomClass> {
    let basis = basis_classes(g)?;
    if h.coefficients.len() != basis.len() {
        return Err(Error::WrongLength {
            expected: basis.len(),
            got: h.coefficients.len(),
        });
    }
    let mut out = CohomClass::zero(g.clone());
    for (b, c) in basis.iter().zip(&h.coefficients) {
        out = &out + &b.scale(c);
    }
    Ok(out)
}

/// A polynomial of degree ≤ `max_deg` with about half its monomials present, coefficients in [-9, 9].
pub fn random_polynomial<R: Rng>(rng: &mut R, n: usize, max_deg: u32) -> Polynomial {
    let terms = (0..=max_deg)
        .flat_map(|d| monomials_of_degree(n, d))
        .filter_map(|m| {
            let keep = rng.random_range(0..2) == 0;
            let c: i64 = rng.random_range(-9..=9);
            keep.then(|| (m, BigInt::from(c)))
        })
        .collect::<Vec<_>>();
    Polynomial::from_terms(n, terms)
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTripReport {
    pub trials: usize,
    pub failures: usize,
}

impl RoundTripReport {
    pub fn is_ok(&self) -> bool {
        self.failures == 0
    }
}

/// decompose(recompose(h)) = h on seeded random coefficient vectors.
pub fn verify_unique_decomposition(
    g: &Arc<GkmGraph>,
    trials: usize,
    seed: u64,
) -> Result<RoundTripReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = basis_classes(g)?.len();
    let mut failures = 0;
    for _ in 0..trials {
        let h = Decomposition {
            coefficients: (0..len)
                .map(|_| random_polynomial(&mut rng, g.rank(), 3))
                .collect(),
        };
        let f = recompose(g, &h)?;
        if reduce(&f).ok() != Some(h) {
            failures += 1;
        }
    }
    Ok(RoundTripReport { trials, failures })
}

/// A random product of one to three generators times a random polynomial.
pub fn random_generator_product<R: Rng>(g: &Arc<GkmGraph>, rng: &mut R) -> Result<CohomClass> {
    let even = quadric(g)?;
    let subsets = admissible_subsets(g);
    let verts: Vec<Vertex> = g.vertices().collect();
    let mut f = constant_class(g, &random_polynomial(rng, g.rank(), 1));
    for _ in 0..rng.random_range(1..=3) {
        let factor = match rng.random_range(0..3) {
            0 => {
                let v = verts[rng.random_range(0..verts.len())];
                if even {
                    make_m_prime(g, v)?
                } else {
                    make_m(g, v)?
                }
            }
            1 => {
                if even {
                    make_x(g)?
                } else {
                    make_q(g)?
                }
            }
            _ => {
                let k = &subsets[rng.random_range(0..subsets.len())];
                if even {
                    make_delta_prime(g, k)?
                } else {
                    make_delta(g, k)?
                }
            }
        };
        f = &f * &factor;
    }
    Ok(f)
}

/// recompose(decompose(f)) = f on seeded random generator products.
pub fn verify_surjective_decomposition(
    g: &Arc<GkmGraph>,
    trials: usize,
    seed: u64,
) -> Result<RoundTripReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    for _ in 0..trials {
        let f = random_generator_product(g, &mut rng)?;
        let ok = reduce(&f)
            .and_then(|h| recompose(g, &h))
            .is_ok_and(|back| back == f);
        if !ok {
            failures += 1;
        }
    }
    Ok(RoundTripReport { trials, failures })
}

/// Restriction to v kills the generators not indexed over v, and the values
/// -Q(v), M_k(v) - Q(v) (k ∈ I_v) form a ℤ-basis of the degree-one forms.
pub fn verify_vertex_quotient(g: &Arc<GkmGraph>, v: Vertex) -> Result<bool> {
    if g.family() != Family::Odd {
        return Err(Error::WrongFamily(
            "vertex quotient is checked on odd quadrics".into(),
        ));
    }
    if !g.contains(v) {
        return Err(Error::UnknownVertex(v));
    }
    let n = g.n();
    let vb = g.opposite(v);
    if n == 1 {
        let gen = make_delta(g, &[v])?.value(v).to_linear_form();
        let unit = gen.is_some_and(|l| {
            lattice::abs_determinant(vec![l.coeffs().to_vec()]) == BigInt::from(1)
        });
        return Ok(make_m(g, v)?.value(v).is_zero()
            && make_delta(g, &[vb])?.value(v).is_zero()
            && unit);
    }
    let killed = make_m(g, v)?.value(v).is_zero()
        && admissible_subsets(g)
            .iter()
            .filter(|k| !k.contains(&v))
            .map(|k| make_delta(g, k))
            .collect::<Result<Vec<_>>>()?
            .iter()
            .all(|d| d.value(v).is_zero());
    let skip = if v <= n { v } else { vb };
    let q = make_q(g)?.value(v).clone();
    let mut forms = vec![(-&q).to_linear_form().unwrap()];
    for k in (1..=n).filter(|&k| k != skip) {
        forms.push((make_m(g, k)?.value(v) - &q).to_linear_form().unwrap());
    }
    let det = lattice::abs_determinant(forms.iter().map(|l| l.coeffs().to_vec()).collect());
    Ok(killed && det == BigInt::from(1))
}

/// (topological degree, number of basis classes) pairs.
pub fn graded_rank_report(g: &GkmGraph) -> Result<Vec<(u32, usize)>> {
    let mut counts = BTreeMap::new();
    for d in basis_degrees(g)? {
        *counts.entry(2 * d).or_insert(0) += 1;
    }
    Ok(counts.into_iter().collect())
}

/// Rank of each degree component against the free-module prediction from the basis degrees.
pub fn verify_graded_ranks(g: &GkmGraph, max_degree: u32) -> Result<Vec<CheckRecord>> {
    let degs = basis_degrees(g)?;
    Ok((0..=max_degree)
        .map(|d| {
            let got = degree_component(g, d).rank();
            let want = free_module_rank(g.rank(), &degs, d);
            CheckRecord::flag(
                "graded_rank",
                format!("d={d} rank={got} predicted={want}"),
                got == want,
            )
        })
        .collect())
}
