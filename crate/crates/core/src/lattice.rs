//! Integer lattices: Hermite and Smith normal forms, integer kernels, coordinates.
//!
//! Matrices are lists of dense rows. All operations are unimodular, so a
//! returned basis spans exactly the same ℤ-lattice as the input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Row = Vec<BigInt>;

fn axpy(dst: &mut [BigInt], q: &BigInt, src: &[BigInt]) {
    for (d, s) in dst.iter_mut().zip(src) {
        if !s.is_zero() {
            *d -= q * s;
        }
    }
}

pub fn is_zero_row(r: &[BigInt]) -> bool {
    r.iter().all(Zero::is_zero)
}

fn pivot_col(r: &[BigInt]) -> Option<usize> {
    r.iter().position(|x| !x.is_zero())
}

/// Row-style Hermite normal form: positive pivots, entries above pivots reduced
/// into `[0, pivot)`, zero rows dropped.
pub fn hermite_rows(mut rows: Vec<Row>) -> Vec<Row> {
    rows.retain(|r| !is_zero_row(r));
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        loop {
            let pick = (r..rows.len())
                .filter(|&i| !rows[i][col].is_zero())
                .min_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let Some(p) = pick else { break };
            rows.swap(r, p);
            let (head, tail) = rows.split_at_mut(r + 1);
            let piv = &head[r];
            let mut clean = true;
            for row in tail.iter_mut() {
                if !row[col].is_zero() {
                    let q = row[col].div_floor(&piv[col]);
                    axpy(row, &q, piv);
                    clean &= row[col].is_zero();
                }
            }
            if clean {
                break;
            }
        }
        if r < rows.len() && !rows[r][col].is_zero() {
            if rows[r][col].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -&*x;
                }
            }
            let (head, tail) = rows.split_at_mut(r);
            let piv = &tail[0];
            for row in head.iter_mut() {
                let q = row[col].div_floor(&piv[col]);
                if !q.is_zero() {
                    axpy(row, &q, piv);
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

pub fn rank(rows: Vec<Row>) -> usize {
    hermite_rows(rows).len()
}

/// ℤ-basis (in Hermite form) of `{x ∈ ℤ^n : a·x = 0 for every constraint a}`.
/// Constraints are sparse rows of `(column, coefficient)`.
pub fn kernel_basis<I>(n: usize, constraints: I) -> Vec<Row>
where
    I: IntoIterator<Item = Vec<(usize, BigInt)>>,
{
    let mut basis: Vec<Row> = (0..n)
        .map(|i| {
            let mut r = vec![BigInt::zero(); n];
            r[i] = BigInt::one();
            r
        })
        .collect();
    for a in constraints {
        let mut vals: Vec<(usize, BigInt)> = basis
            .iter()
            .enumerate()
            .filter_map(|(i, row)| {
                let v: BigInt = a
                    .iter()
                    .filter(|(j, _)| !row[*j].is_zero())
                    .map(|(j, c)| &row[*j] * c)
                    .sum();
                (!v.is_zero()).then_some((i, v))
            })
            .collect();
        while vals.len() > 1 {
            let (pi, _) = vals
                .iter()
                .enumerate()
                .min_by(|x, y| x.1 .1.abs().cmp(&y.1 .1.abs()))
                .unwrap();
            let (prow, pval) = vals[pi].clone();
            let pivot = basis[prow].clone();
            let mut next = Vec::with_capacity(vals.len());
            for (k, (i, v)) in vals.into_iter().enumerate() {
                if k == pi {
                    next.push((i, v));
                    continue;
                }
                let q = v.div_floor(&pval);
                axpy(&mut basis[i], &q, &pivot);
                let v = v - &q * &pval;
                if !v.is_zero() {
                    next.push((i, v));
                }
            }
            vals = next;
        }
        if let Some((i, _)) = vals.pop() {
            basis.swap_remove(i);
        }
    }
    hermite_rows(basis)
}

/// Coordinates of `v` in a Hermite basis, or `None` when `v` is off the lattice.
pub fn solve_in_basis(hnf: &[Row], v: &[BigInt]) -> Option<Vec<BigInt>> {
    let mut cur = v.to_vec();
    let mut coords = Vec::with_capacity(hnf.len());
    for row in hnf {
        let c = pivot_col(row)?;
        let (q, r) = cur[c].div_rem(&row[c]);
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() {
            axpy(&mut cur, &q, row);
        }
        coords.push(q);
    }
    is_zero_row(&cur).then_some(coords)
}

/// Nonzero Smith invariants d_1 | d_2 | … of the matrix, all positive.
pub fn smith_invariants(rows: Vec<Row>) -> Vec<BigInt> {
    let mut m: Vec<Row> = rows.into_iter().filter(|r| !is_zero_row(r)).collect();
    let ncols = m.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < m.len() && t < ncols {
        loop {
            let best = (t..m.len())
                .flat_map(|i| (t..ncols).map(move |j| (i, j)))
                .filter(|&(i, j)| !m[i][j].is_zero())
                .min_by(|&(a, b), &(c, d)| m[a][b].abs().cmp(&m[c][d].abs()));
            let Some((pi, pj)) = best else {
                return out;
            };
            m.swap(t, pi);
            for row in m.iter_mut() {
                row.swap(t, pj);
            }
            let piv = m[t][t].clone();
            let mut dirty = false;
            for i in t + 1..m.len() {
                if !m[i][t].is_zero() {
                    let q = m[i][t].div_floor(&piv);
                    let src = m[t].clone();
                    axpy(&mut m[i], &q, &src);
                    dirty |= !m[i][t].is_zero();
                }
            }
            for j in t + 1..ncols {
                if !m[t][j].is_zero() {
                    let q = m[t][j].div_floor(&piv);
                    for row in m.iter_mut() {
                        let s = row[t].clone();
                        row[j] -= &q * s;
                    }
                    dirty |= !m[t][j].is_zero();
                }
            }
            if dirty {
                continue;
            }
            let bad =
                (t + 1..m.len()).find(|&i| (t + 1..ncols).any(|j| !m[i][j].is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let src = m[i].clone();
                    for (d, s) in m[t].iter_mut().zip(&src) {
                        *d += s;
                    }
                }
                None => break,
            }
        }
        out.push(m[t][t].abs());
        t += 1;
    }
    out
}

/// |det| of a square matrix.
pub fn abs_determinant(rows: Vec<Row>) -> BigInt {
    let n = rows.len();
    let inv = smith_invariants(rows);
    if inv.len() < n {
        BigInt::zero()
    } else {
        inv.iter().product()
    }
}
