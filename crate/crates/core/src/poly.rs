//! Sparse polynomials over ℤ in variables a1..an, plus linear forms.
//!
//! Terms are kept in graded lexicographic order with a1 > a2 > … > an.
//! Display and JSON list the leading term first.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde_json::Value;

use crate::error::{Error, Result};

/// Exponent vector, one slot per variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    /// The monomial a_i (1-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i - 1] = 1;
        Monomial(e)
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials of total degree `d` in `n` variables, leading (largest) first.
pub fn monomials_of_degree(n: usize, d: u32) -> Vec<Monomial> {
    fn rec(slot: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(Monomial(cur.clone()));
            return;
        }
        for e in (0..=left).rev() {
            cur[slot] = e;
            rec(slot + 1, left - e, cur, out);
        }
        cur[slot] = 0;
    }
    let mut out = Vec::new();
    if n == 0 {
        if d == 0 {
            out.push(Monomial(Vec::new()));
        }
        return out;
    }
    rec(0, d, &mut vec![0; n], &mut out);
    out
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<Monomial, BigInt>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigInt::one())
    }

    pub fn constant(n: usize, c: impl Into<BigInt>) -> Self {
        Self::from_terms(n, [(Monomial::one(n), c.into())])
    }

    /// The variable a_i (1-based).
    pub fn var(n: usize, i: usize) -> Self {
        Self::from_terms(n, [(Monomial::var(n, i), BigInt::one())])
    }

    /// Builds a polynomial, merging repeated monomials and dropping zeros.
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Monomial, BigInt)>) -> Self {
        let mut p = Polynomial::zero(n);
        for (m, c) in terms {
            assert_eq!(m.n(), n, "monomial arity");
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: BigInt) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms, leading first.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigInt)> {
        self.terms.iter().rev()
    }

    pub fn coeff(&self, m: &Monomial) -> BigInt {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// Total degree; `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    /// `Some(d)` when every term has degree d; zero is homogeneous of any degree.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let d = self.degree()?;
        self.terms.keys().all(|m| m.degree() == d).then_some(d)
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.keys().all(|m| m.degree() == d)
    }

    pub fn homogeneous_part(&self, d: u32) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree() == d)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    pub fn constant_term(&self) -> BigInt {
        self.coeff(&Monomial::one(self.n))
    }

    fn check_n(&self, other: &Polynomial) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn checked_add(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_n(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), -c);
        }
        Ok(out)
    }

    pub fn checked_mul(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_n(other)?;
        let mut out = Polynomial::zero(self.n);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &BigInt) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::one(self.n);
        for _ in 0..e {
            out = &out * self;
        }
        out
    }

    /// Drops every term that contains one of the listed variables (1-based).
    pub fn substitute_zero(&self, vars: &[usize]) -> Result<Polynomial> {
        for &i in vars {
            if i == 0 || i > self.n {
                return Err(Error::VariableOutOfRange {
                    index: i,
                    n: self.n,
                });
            }
        }
        Ok(Polynomial {
            n: self.n,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| vars.iter().all(|&i| m.0[i - 1] == 0))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        })
    }

    /// Exact quotient by a linear form.
    ///
    /// Divides with the chosen variable as leading variable; a coefficient not
    /// divisible by its slot in `l`, or a nonzero remainder, means `l ∤ self`.
    pub fn divide_exact(&self, l: &LinearForm) -> Result<Polynomial> {
        if l.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: self.n,
                right: l.n(),
            });
        }
        let k = l.pivot().ok_or(Error::ZeroModulus)?;
        let ck = &l.coeffs[k];
        let others: Vec<(usize, &BigInt)> = l
            .coeffs
            .iter()
            .enumerate()
            .filter(|(j, c)| *j != k && !c.is_zero())
            .collect();

        let top = self.terms.keys().map(|m| m.0[k]).max().unwrap_or(0) as usize;
        let mut layers: Vec<BTreeMap<Monomial, BigInt>> = vec![BTreeMap::new(); top + 1];
        for (m, c) in &self.terms {
            layers[m.0[k] as usize].insert(m.clone(), c.clone());
        }
        let mut quotient = Polynomial::zero(self.n);
        for e in (1..=top).rev() {
            let layer = std::mem::take(&mut layers[e]);
            for (m, c) in layer {
                let (q, r) = c.div_rem(ck);
                if !r.is_zero() {
                    let remainder = self - &(&l.to_polynomial() * &quotient);
                    return Err(Error::NotDivisible { remainder });
                }
                let mut base = m.0.clone();
                base[k] -= 1;
                for &(j, cj) in &others {
                    let mut t = base.clone();
                    t[j] += 1;
                    let t = Monomial(t);
                    let entry = layers[e - 1].entry(t.clone()).or_insert_with(BigInt::zero);
                    *entry -= cj * &q;
                    if entry.is_zero() {
                        layers[e - 1].remove(&t);
                    }
                }
                quotient.add_term(Monomial(base), q);
            }
        }
        let rem = Polynomial {
            n: self.n,
            terms: std::mem::take(&mut layers[0]),
        };
        if rem.is_zero() {
            Ok(quotient)
        } else {
            Err(Error::NotDivisible { remainder: rem })
        }
    }

    pub fn is_divisible_by(&self, l: &LinearForm) -> bool {
        self.divide_exact(l).is_ok()
    }

    /// Linear part as a form; `None` unless homogeneous of degree 1 (or zero).
    pub fn to_linear_form(&self) -> Option<LinearForm> {
        if !self.is_homogeneous_of(1) {
            return None;
        }
        let mut coeffs = vec![BigInt::zero(); self.n];
        for (m, c) in &self.terms {
            let i = m.0.iter().position(|&e| e == 1)?;
            coeffs[i] = c.clone();
        }
        Some(LinearForm { coeffs })
    }

    /// JSON as `[[coeff-string, [exponents]], …]`, leading term first.
    pub fn to_json(&self) -> Value {
        Value::Array(
            self.terms()
                .map(|(m, c)| serde_json::json!([c.to_string(), m.0]))
                .collect(),
        )
    }

    pub fn from_json(n: usize, v: &Value) -> Result<Polynomial> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Malformed("polynomial must be an array of terms".into()))?;
        let mut terms = Vec::with_capacity(arr.len());
        for t in arr {
            let pair = t
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Malformed("term must be [coefficient, exponents]".into()))?;
            let c: BigInt = match &pair[0] {
                Value::String(s) => s
                    .parse()
                    .map_err(|_| Error::Malformed(format!("bad coefficient {s:?}")))?,
                Value::Number(x) => x
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| Error::Malformed(format!("bad coefficient {x}")))?,
                _ => return Err(Error::Malformed("coefficient must be a string".into())),
            };
            let exps: Vec<u32> = serde_json::from_value(pair[1].clone())
                .map_err(|e| Error::Malformed(format!("bad exponents: {e}")))?;
            if exps.len() != n {
                return Err(Error::Malformed(format!(
                    "exponent vector of length {} for {} variables",
                    exps.len(),
                    n
                )));
            }
            terms.push((Monomial(exps), c));
        }
        Ok(Polynomial::from_terms(n, terms))
    }

    /// Parses expressions like `-a1 + 2*a2^3*(a1 - a3)`. For n = 1 the bare name `a` is accepted.
    pub fn parse(n: usize, s: &str) -> Result<Polynomial> {
        let mut p = Parser {
            n,
            src: s.as_bytes(),
            pos: 0,
        };
        let out = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(Error::Parse(format!(
                "unexpected input at offset {}",
                p.pos
            )));
        }
        Ok(out)
    }
}

struct Parser<'a> {
    n: usize,
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).unwrap()
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e: u32 = self
                .digits()
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent at offset {}", self.pos)))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(Error::Parse(format!("expected ')' at offset {}", self.pos)));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let c: BigInt = self.digits().parse().unwrap();
                Ok(Polynomial::constant(self.n, c))
            }
            Some(b'a') => {
                self.pos += 1;
                let d = self.digits().to_string();
                let i = if d.is_empty() && self.n == 1 {
                    1
                } else {
                    d.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad variable at offset {}", self.pos)))?
                };
                if i == 0 || i > self.n {
                    return Err(Error::VariableOutOfRange {
                        index: i,
                        n: self.n,
                    });
                }
                Ok(Polynomial::var(self.n, i))
            }
            _ => Err(Error::Parse(format!(
                "unexpected token at offset {}",
                self.pos
            ))),
        }
    }
}

fn fmt_monomial(m: &Monomial) -> String {
    let parts: Vec<String> =
        m.0.iter()
            .enumerate()
            .filter(|(_, e)| **e > 0)
            .map(|(i, e)| {
                if *e == 1 {
                    format!("a{}", i + 1)
                } else {
                    format!("a{}^{}", i + 1, e)
                }
            })
            .collect();
    parts.join("*")
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (idx, (m, c)) in self.terms().enumerate() {
            let neg = c.is_negative();
            match (idx, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let a = c.abs();
            let mono = fmt_monomial(m);
            if mono.is_empty() {
                write!(f, "{a}")?;
            } else if a.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{a}*{mono}")?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl $tr<&Polynomial> for &Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: &Polynomial) -> Polynomial {
                self.$checked(rhs).expect("polynomial arity mismatch")
            }
        }
        impl $tr<Polynomial> for Polynomial {
            type Output = Polynomial;
            fn $method(self, rhs: Polynomial) -> Polynomial {
                (&self).$method(&rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        -&self
    }
}

/// A form Σ c_i a_i.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct LinearForm {
    coeffs: Vec<BigInt>,
}

impl LinearForm {
    pub fn new(coeffs: Vec<BigInt>) -> Self {
        LinearForm { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        LinearForm {
            coeffs: coeffs.iter().map(|&c| BigInt::from(c)).collect(),
        }
    }

    pub fn zero(n: usize) -> Self {
        LinearForm {
            coeffs: vec![BigInt::zero(); n],
        }
    }

    /// The form a_i (1-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut l = Self::zero(n);
        l.coeffs[i - 1] = BigInt::one();
        l
    }

    pub fn n(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Slot used as leading variable in division: a unit coefficient if any.
    pub fn pivot(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .position(|c| c.abs().is_one())
            .or_else(|| self.coeffs.iter().position(|c| !c.is_zero()))
    }

    pub fn scale(&self, c: &BigInt) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn to_polynomial(&self) -> Polynomial {
        let n = self.n();
        Polynomial::from_terms(
            n,
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| (Monomial::var(n, i + 1), c.clone())),
        )
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.coeffs
                .iter()
                .map(|c| Value::String(c.to_string()))
                .collect(),
        )
    }

    pub fn from_json(v: &Value) -> Result<LinearForm> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::Malformed("linear form must be an array".into()))?;
        let coeffs = arr
            .iter()
            .map(|c| match c {
                Value::String(s) => s
                    .parse::<BigInt>()
                    .map_err(|_| Error::Malformed(format!("bad coefficient {s:?}"))),
                Value::Number(x) => x
                    .as_i64()
                    .map(BigInt::from)
                    .ok_or_else(|| Error::Malformed(format!("bad coefficient {x}"))),
                _ => Err(Error::Malformed("coefficient must be a string".into())),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(LinearForm { coeffs })
    }
}

impl Add for &LinearForm {
    type Output = LinearForm;
    fn add(self, rhs: &LinearForm) -> LinearForm {
        assert_eq!(self.n(), rhs.n(), "linear form arity mismatch");
        LinearForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &LinearForm {
    type Output = LinearForm;
    fn sub(self, rhs: &LinearForm) -> LinearForm {
        assert_eq!(self.n(), rhs.n(), "linear form arity mismatch");
        LinearForm {
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &LinearForm {
    type Output = LinearForm;
    fn neg(self) -> LinearForm {
        LinearForm {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_polynomial().fmt(f)
    }
}
