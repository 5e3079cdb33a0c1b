//! The circle acting on CP¹ with weight n: t·[z_0:z_1] = [z_0 : tⁿz_1].

use num_bigint::BigInt;
use num_integer::Integer;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cohomology::{degree_component, verify_class, CohomClass};
use crate::decomposition::random_polynomial;
use crate::error::Result;
use crate::generators::make_cp1_generators;
use crate::graph::GkmGraph;
use crate::lattice;
use crate::ordinary::Presentation;
use crate::poly::{LinearForm, Polynomial};
use crate::relations::{check_equal, CheckRecord};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct RotationAction {
    pub multiplicity: usize,
}

impl RotationAction {
    pub fn graph(&self) -> Result<GkmGraph> {
        build_cp1_gkm(self.multiplicity)
    }
}

/// Two vertices p = 1, q = 2 joined by an edge labelled nα.
pub fn build_cp1_gkm(n: usize) -> Result<GkmGraph> {
    GkmGraph::cp1(n)
}

fn alpha_pow(c: i64, d: u32) -> Polynomial {
    Polynomial::var(1, 1).pow(d).scale(&BigInt::from(c))
}

/// Valid pairs (f(p), f(q)) are exactly those with nα | f(p) − f(q).
pub fn verify_cp1_description(n: usize, trials: usize, seed: u64) -> Result<bool> {
    let g = build_cp1_gkm(n)?;
    let ni = n as i64;
    for d in 0..=3 {
        for x in -ni..=ni {
            for y in -ni..=ni {
                let want = if d == 0 {
                    x == y
                } else {
                    (x - y).is_multiple_of(&ni)
                };
                if verify_class(&g, &[alpha_pow(x, d), alpha_pow(y, d)]).is_ok() != want {
                    return Ok(false);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = LinearForm::new(vec![BigInt::from(n)]).to_polynomial();
    for _ in 0..trials {
        let fp = random_polynomial(&mut rng, 1, 3);
        let fq = &fp - &(&step * &random_polynomial(&mut rng, 1, 2));
        if !verify_class(&g, &[fp.clone(), fq.clone()]).is_ok() {
            return Ok(false);
        }
        // Perturb one coefficient by something nα cannot absorb.
        let d = rng.random_range(0..=3u32);
        let off = if d == 0 || n == 1 {
            1
        } else {
            rng.random_range(1..ni)
        };
        if n == 1 && d > 0 {
            continue;
        }
        let bad = &fq + &alpha_pow(off, d);
        if verify_class(&g, &[fp, bad]).is_ok() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Normal form f = r + k·τ_p with r = f(q), k = (f(p) − f(q))/(nα).
pub fn normal_form(f: &CohomClass) -> Result<(Polynomial, Polynomial)> {
    let n = f.graph().n();
    let r = f.value(2).clone();
    let k = (f.value(1) - &r).divide_exact(&LinearForm::new(vec![BigInt::from(n)]))?;
    Ok((r, k))
}

/// Relations τ_pτ_q = 0 and nα − τ_p + τ_q = 0, surjectivity of the normal form through
/// polynomial degree 5, and uniqueness of its coefficients.
pub fn verify_cp1_presentation(n: usize) -> Result<Vec<CheckRecord>> {
    let (tp, tq, a) = make_cp1_generators(n)?;
    let g = tp.graph().clone();
    let zero = CohomClass::zero(g.clone());
    let one = tp.pow(0);
    let mut out = vec![
        check_equal("cp1_product", "tau_p*tau_q".into(), &(&tp * &tq), &zero),
        check_equal(
            "cp1_linear",
            "n*alpha - tau_p + tau_q".into(),
            &(&(&a.scale_int(n) - &tp) + &tq),
            &zero,
        ),
        check_equal(
            "cp1_linear",
            "tau_p + tau_q = n*alpha + 2*tau_q".into(),
            &(&tp + &tq),
            &(&a.scale_int(n) + &tq.scale_int(2)),
        ),
    ];
    for d in 0..=5u32 {
        let comp = degree_component(&g, d);
        let mut ok = true;
        for f in comp.classes(&g) {
            ok &= normal_form(&f).is_ok_and(|(r, k)| &one.scale(&r) + &tp.scale(&k) == f);
        }
        out.push(CheckRecord::flag("cp1_surjective", format!("d={d}"), ok));

        // The normal-form generators α^d and α^{d-1}τ_p span the component with no relation.
        let mut gens = vec![comp.vectorize(&a.pow(d))];
        if d > 0 {
            gens.push(comp.vectorize(&(&a.pow(d - 1) * &tp)));
        }
        let unique =
            lattice::rank(gens.clone()) == gens.len() && lattice::hermite_rows(gens) == comp.basis;
        out.push(CheckRecord::flag("cp1_unique", format!("d={d}"), unique));
    }
    Ok(out)
}

/// Index in ℤ² of the degree-one restriction image {(f(p), f(q))}.
pub fn lattice_index(n: usize) -> Result<BigInt> {
    let g = build_cp1_gkm(n)?;
    Ok(lattice::abs_determinant(
        degree_component(&g, 1).basis.clone(),
    ))
}

/// Equivariant cohomology of the trivial action: ℤ[x, α]/⟨x²⟩, both generators in degree 2.
pub fn closed_form_trivial() -> Presentation {
    Presentation {
        names: vec!["x", "alpha"],
        weights: vec![1, 1],
        relations: vec![Polynomial::parse(2, "a1^2").expect("static relation")],
    }
}

/// Rank of ℤ[x, α]/⟨x²⟩ as a free ℤ[α]-module.
pub fn trivial_module_rank() -> usize {
    let mut p = closed_form_trivial();
    p.relations.push(Polynomial::var(2, 2));
    (0..=4).map(|d| p.graded_piece(d).rank).sum()
}
