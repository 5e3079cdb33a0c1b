//! Ordinary cohomology as H_T / ⟨ϑ(α_1), …, ϑ(α_r)⟩, one degree at a time.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::cohomology::{degree_component, CohomClass, GradedGroup};
use crate::decomposition::{basis_classes, decompose};
use crate::error::Result;
use crate::generators::{make_delta, make_m, make_q, theta};
use crate::graph::{Family, GkmGraph, Vertex};
use crate::lattice::{self, Row};
use crate::poly::{Monomial, Polynomial};
use crate::relations::{check_equal, transversals, CheckRecord};

/// Ranks and torsion of H^{2d} for d = 0..; odd degrees vanish and are not stored.
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct BettiTable {
    pub groups: Vec<GradedGroup>,
}

impl BettiTable {
    pub fn ranks(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.rank).collect()
    }

    pub fn is_torsion_free(&self) -> bool {
        self.groups.iter().all(|g| g.torsion.is_empty())
    }

    pub fn total_rank(&self) -> usize {
        self.groups.iter().map(|g| g.rank).sum()
    }

    /// Drops trailing zero groups.
    pub fn trimmed(&self) -> BettiTable {
        let mut groups = self.groups.clone();
        while groups
            .last()
            .is_some_and(|g| g.rank == 0 && g.torsion.is_empty())
        {
            groups.pop();
        }
        BettiTable { groups }
    }

    pub fn to_json(&self) -> Value {
        json!({ "groups": self.groups })
    }
}

impl fmt::Display for BettiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>6}  {:>4}  torsion", "degree", "rank")?;
        for g in &self.groups {
            let t: Vec<String> = g.torsion.iter().map(|x| format!("Z/{x}")).collect();
            let t = if t.is_empty() {
                "-".to_string()
            } else {
                t.join(" + ")
            };
            writeln!(f, "{:>6}  {:>4}  {}", g.degree, g.rank, t)?;
        }
        Ok(())
    }
}

fn quotient_group(degree: u32, ambient: usize, image: Vec<Row>) -> GradedGroup {
    let inv = lattice::smith_invariants(image);
    let torsion = inv.iter().filter(|x| !x.is_one()).cloned().collect();
    GradedGroup {
        degree,
        rank: ambient - inv.len(),
        torsion,
    }
}

/// Products α_i·b for b in the degree-(d-1) basis, as vertex-tuples.
fn multiplied(g: &Arc<GkmGraph>, d: u32, order: &[usize]) -> Vec<CohomClass> {
    if d == 0 {
        return Vec::new();
    }
    let lower = degree_component(g, d - 1).classes(g);
    let mut out = Vec::new();
    for &i in order {
        let a = Polynomial::var(g.rank(), i);
        out.extend(lower.iter().map(|b| b.scale(&a)));
    }
    out
}

fn betti_degree(g: &Arc<GkmGraph>, d: u32) -> GradedGroup {
    let comp = degree_component(g, d);
    let order: Vec<usize> = (1..=g.rank()).collect();
    let image = multiplied(g, d, &order)
        .iter()
        .map(|c| comp.coordinates(c).expect("α·L_{d-1} lies in L_d"))
        .collect();
    quotient_group(2 * d, comp.rank(), image)
}

/// Ordinary cohomology up to topological degree `max_degree`.
pub fn betti(g: &GkmGraph, max_degree: u32) -> BettiTable {
    let g = Arc::new(g.clone());
    let groups = (0..=max_degree / 2)
        .into_par_iter()
        .map(|d| betti_degree(&g, d))
        .collect();
    BettiTable { groups }
}

/// Default range: twice the complex dimension.
pub fn betti_full(g: &GkmGraph) -> BettiTable {
    betti(g, 2 * g.complex_dim() as u32)
}

/// The same computation with permuted coordinates and generator order.
pub fn betti_permuted(g: &GkmGraph, max_degree: u32, seed: u64) -> BettiTable {
    let g = Arc::new(g.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let plans: Vec<(u32, Vec<usize>, Vec<usize>)> = (0..=max_degree / 2)
        .map(|d| {
            let width = degree_component(&g, d).width() * g.num_vertices();
            let mut cols: Vec<usize> = (0..width).collect();
            cols.shuffle(&mut rng);
            let mut order: Vec<usize> = (1..=g.rank()).collect();
            order.shuffle(&mut rng);
            (d, cols, order)
        })
        .collect();
    let groups = plans
        .into_par_iter()
        .map(|(d, cols, order)| {
            let comp = degree_component(&g, d);
            let permute = |r: &Row| cols.iter().map(|&c| r[c].clone()).collect::<Row>();
            let mut rows: Vec<Row> = comp.basis.iter().map(permute).collect();
            rows.reverse();
            let basis = lattice::hermite_rows(rows);
            let image = multiplied(&g, d, &order)
                .iter()
                .map(|c| {
                    lattice::solve_in_basis(&basis, &permute(&comp.vectorize(c)))
                        .expect("α·L_{d-1} lies in L_d")
                })
                .collect();
            quotient_group(2 * d, basis.len(), image)
        })
        .collect();
    BettiTable { groups }
}

/// A graded presentation ℤ[y_1, …, y_k]/⟨relations⟩ with weighted generators.
#[derive(Clone, Debug)]
pub struct Presentation {
    pub names: Vec<&'static str>,
    /// Polynomial degree of each generator.
    pub weights: Vec<u32>,
    pub relations: Vec<Polynomial>,
}

impl Presentation {
    fn weight(&self, m: &Monomial) -> u32 {
        m.exps().iter().zip(&self.weights).map(|(e, w)| e * w).sum()
    }

    fn monomials(&self, d: u32) -> Vec<Monomial> {
        fn go(w: &[u32], d: u32, prefix: &mut Vec<u32>, out: &mut Vec<Monomial>) {
            match w.split_first() {
                None => {
                    if d == 0 {
                        out.push(Monomial::new(prefix.clone()));
                    }
                }
                Some((&first, rest)) => {
                    for e in 0..=d / first {
                        prefix.push(e);
                        go(rest, d - e * first, prefix, out);
                        prefix.pop();
                    }
                }
            }
        }
        let mut out = Vec::new();
        go(&self.weights, d, &mut Vec::new(), &mut out);
        out
    }

    /// Quotient in polynomial degree d.
    pub fn graded_piece(&self, d: u32) -> GradedGroup {
        let mons = self.monomials(d);
        let index = |m: &Monomial| mons.iter().position(|x| x == m).expect("weighted monomial");
        let mut rows = Vec::new();
        for r in &self.relations {
            let e = r.terms().map(|(m, _)| self.weight(m)).max().unwrap_or(0);
            if e > d {
                continue;
            }
            for mu in self.monomials(d - e) {
                let mut row = vec![BigInt::zero(); mons.len()];
                for (m, c) in r.terms() {
                    row[index(&m.mul(&mu))] += c;
                }
                rows.push(row);
            }
        }
        quotient_group(2 * d, mons.len(), rows)
    }

    pub fn table(&self, max_degree: u32) -> BettiTable {
        BettiTable {
            groups: (0..=max_degree / 2).map(|d| self.graded_piece(d)).collect(),
        }
    }
}

/// Parity constant of the even-dimensional quadric relation: δ(m) = 0 for odd m, 1 for even m.
pub fn delta_parity(m: usize) -> i64 {
    m.is_multiple_of(2) as i64
}

/// ℤ[c,x]/⟨c^n − 2x, x²⟩ for the odd family, ℤ[c,x]/⟨c^{m+1} − 2cx, x² − δ(m)c^m x⟩ (m = n−1)
/// for the even family, ℤ[τ_p,τ_q]/⟨τ_pτ_q, τ_q − τ_p⟩ for CP¹.
pub fn closed_form(family: Family, n: usize) -> Presentation {
    let p = |s: &str| Polynomial::parse(2, s).expect("static relation");
    match family {
        Family::Odd => Presentation {
            names: vec!["c", "x"],
            weights: vec![1, n as u32],
            relations: vec![p(&format!("a1^{n} - 2*a2")), p("a2^2")],
        },
        Family::Even => {
            let m = n - 1;
            Presentation {
                names: vec!["c", "x"],
                weights: vec![1, m as u32],
                relations: vec![
                    p(&format!("a1^{} - 2*a1*a2", m + 1)),
                    p(&format!("a2^2 - {}*a1^{m}*a2", delta_parity(m))),
                ],
            }
        }
        Family::Cp1 => Presentation {
            names: vec!["tau_p", "tau_q"],
            weights: vec![1, 1],
            relations: vec![p("a1*a2"), p("a2 - a1")],
        },
    }
}

/// Computed Betti table against the table read off the closed-form presentation.
pub fn verify_betti_against_closed_form(family: Family, n: usize) -> Result<bool> {
    let g = GkmGraph::build(family, n)?;
    let top = 2 * g.complex_dim() as u32;
    let computed = betti(&g, top + 2);
    let expected = closed_form(family, n).table(top + 2);
    Ok(computed == expected
        && computed.is_torsion_free()
        && computed.total_rank() == g.num_vertices())
}

/// c_1, …, c_r with f = Σ ϑ(α_i)·c_i, or `None` when f ∉ ⟨ϑ(α_i)⟩.
///
/// Membership holds iff every decomposition coefficient has zero constant term.
pub fn ideal_witness(f: &CohomClass) -> Result<Option<Vec<CohomClass>>> {
    let g = f.graph().clone();
    let r = g.rank();
    let h = decompose(f)?;
    if h.coefficients.iter().any(|c| !c.constant_term().is_zero()) {
        return Ok(None);
    }
    let basis = basis_classes(&g)?;
    let mut parts = vec![CohomClass::zero(g.clone()); r];
    for (b, c) in basis.iter().zip(&h.coefficients) {
        let mut split = vec![Vec::new(); r];
        for (m, k) in c.terms() {
            let i = m
                .exps()
                .iter()
                .position(|&e| e > 0)
                .expect("no constant term");
            let mut e = m.exps().to_vec();
            e[i] -= 1;
            split[i].push((Monomial::new(e), k.clone()));
        }
        for (i, terms) in split.into_iter().enumerate() {
            parts[i] = &parts[i] + &b.scale(&Polynomial::from_terms(r, terms));
        }
    }
    Ok(Some(parts))
}

fn ideal_check(name: &str, instance: String, f: &CohomClass) -> Result<CheckRecord> {
    let g = f.graph();
    let ok = match ideal_witness(f)? {
        None => false,
        Some(c) => {
            let mut sum = CohomClass::zero(g.clone());
            for (i, ci) in c.iter().enumerate() {
                sum = &sum + &(&theta(g, &Polynomial::var(g.rank(), i + 1)) * ci);
            }
            sum == *f
        }
    };
    Ok(CheckRecord::flag(name, instance, ok))
}

/// Exact witnesses for the ordinary presentation ℤ[Q, Δ_K]/⟨Qⁿ − 2Δ_K, Δ_K²⟩ with K = {n+1..2n}.
pub fn verify_ordinary_presentation(n: usize) -> Result<Vec<CheckRecord>> {
    let g = Arc::new(GkmGraph::odd_quadric(n)?);
    let k: Vec<Vertex> = (n + 1..=2 * n).collect();
    let kc: Vec<Vertex> = (1..=n).collect();
    let q = make_q(&g)?;
    let dk = make_delta(&g, &k)?;
    let m: Vec<CohomClass> = kc.iter().map(|&i| make_m(&g, i)).collect::<Result<_>>()?;
    let th = |i: usize| theta(&g, &Polynomial::var(n, i));
    let mut out = Vec::new();

    for (i, mi) in m.iter().enumerate() {
        out.push(check_equal(
            "ideal_generator",
            format!("Q-M{}", i + 1),
            &(&q - mi),
            &-&th(i + 1),
        ));
    }
    let prod_m = m.iter().fold(q.pow(0), |a, b| &a * b);
    out.push(check_equal(
        "thom_product",
        format!("M1..M{n} = 2D_K"),
        &prod_m,
        &dk.scale_int(2),
    ));

    // Qⁿ − ∏M = Σ_k (∏_{i<k} M_i)·Q^{n−k}·(Q − M_k), then Q − M_k = −ϑ(α_k).
    let mut telescoped = CohomClass::zero(g.clone());
    let mut coeffs = Vec::new();
    let mut partial = q.pow(0);
    for (idx, mk) in m.iter().enumerate() {
        let c = &partial * &q.pow((n - idx - 1) as u32);
        telescoped = &telescoped + &(&c * &(&q - mk));
        coeffs.push(-&c);
        partial = &partial * mk;
    }
    let lhs = &q.pow(n as u32) - &dk.scale_int(2);
    out.push(check_equal(
        "telescoping",
        format!("Q^{n} - M1..M{n}"),
        &(&q.pow(n as u32) - &prod_m),
        &telescoped,
    ));
    let mut w = CohomClass::zero(g.clone());
    for (i, c) in coeffs.iter().enumerate() {
        w = &w + &(&th(i + 1) * c);
    }
    out.push(check_equal("witness", format!("Q^{n} - 2D_K"), &lhs, &w));

    // 4Δ_K² = (Qⁿ − W)² = Q^{2n} − W(2Qⁿ − W).
    let rhs = &q.pow(2 * n as u32) - &(&w * &(&q.pow(n as u32).scale_int(2) - &w));
    out.push(check_equal(
        "square",
        "4D_K^2".into(),
        &dk.pow(2).scale_int(4),
        &rhs,
    ));
    out.push(check_equal(
        "disjoint",
        "D_K*D_Kc".into(),
        &(&dk * &make_delta(&g, &kc)?),
        &CohomClass::zero(g.clone()),
    ));
    out.push(ideal_check("witness", format!("Q^{n} - 2D_K"), &lhs)?);
    out.push(ideal_check("witness", "D_K^2".into(), &dk.pow(2))?);

    // Δ_H ≡ Δ_K for every transversal H, and Δ_L ≡ Δ_K·Q^{|K∖L|} for L ⊆ K.
    for h in transversals(&g) {
        out.push(ideal_check(
            "transversal",
            format!("D{h:?} - D_K"),
            &(&make_delta(&g, &h)? - &dk),
        )?);
    }
    for mask in 0u32..(1 << n) {
        let l: Vec<Vertex> = k
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &v)| v)
            .collect();
        let dl = make_delta(&g, &l)?;
        let f = &dl - &(&dk * &q.pow((n - l.len()) as u32));
        out.push(ideal_check(
            "sub_thom",
            format!("D{l:?} - D_K*Q^{}", n - l.len()),
            &f,
        )?);
    }
    Ok(out)
}

/// The two-dimensional example: Q² − M_3M_4 = (Q − M_3)·Q + M_3·(Q − M_4) and M_3M_4 = 2Δ_{1,2}.
pub fn small_telescoping_example() -> Result<Vec<CheckRecord>> {
    let g = Arc::new(GkmGraph::odd_quadric(2)?);
    let q = make_q(&g)?;
    let (m3, m4) = (make_m(&g, 3)?, make_m(&g, 4)?);
    let lhs = &q.pow(2) - &(&m3 * &m4);
    let rhs = &(&(&q - &m3) * &q) + &(&m3 * &(&q - &m4));
    Ok(vec![
        check_equal("telescoping", "Q^2 - M3M4".into(), &lhs, &rhs),
        check_equal(
            "thom_product",
            "M3M4 = 2D{1,2}".into(),
            &(&m3 * &m4),
            &make_delta(&g, &[1, 2])?.scale_int(2),
        ),
        ideal_check(
            "transversal",
            "D{3,4} - D{1,2}".into(),
            &(&make_delta(&g, &[3, 4])? - &make_delta(&g, &[1, 2])?),
        )?,
    ])
}
