//! Sparse polynomials over F_q in t_1..t_n and y.
//!
//! Exponent vectors have length n + 1; the last entry is the y-exponent.
//! Terms iterate in graded lexicographic order of the full vector.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::series::TruncatedSeries;

/// Exponent vector (i_1, ..., i_n, j), ordered graded-lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(pub Vec<u32>);

impl Monomial {
    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    /// Total degree in the t-variables.
    pub fn t_degree(&self) -> u64 {
        self.0[..self.0.len() - 1].iter().map(|&e| e as u64).sum()
    }

    pub fn y_exp(&self) -> u32 {
        *self.0.last().unwrap()
    }

    pub fn t_exps(&self) -> &[u32] {
        &self.0[..self.0.len() - 1]
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
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

/// Degree data of an annihilating polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeProfile {
    /// Degree in y.
    pub d: u32,
    /// Total height: total degree in t.
    pub h: u32,
    /// Partial heights: degree in each t_k.
    pub hvec: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
}

#[derive(Clone, PartialEq, Eq)]
pub struct MultiPoly {
    field: Field,
    n: usize,
    terms: BTreeMap<Monomial, FieldElem>,
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{:?}", self.field.fmt_elem(*c), m.0)?;
        }
        Ok(())
    }
}

impl MultiPoly {
    pub fn zero(field: &Field, n: usize) -> MultiPoly {
        MultiPoly { field: field.clone(), n, terms: BTreeMap::new() }
    }

    pub fn constant(field: &Field, n: usize, c: FieldElem) -> MultiPoly {
        Self::monomial(field, n, vec![0; n + 1], c)
    }

    pub fn one(field: &Field, n: usize) -> MultiPoly {
        Self::constant(field, n, field.one())
    }

    /// c * t^exps[..n] * y^exps[n].
    pub fn monomial(field: &Field, n: usize, exps: Vec<u32>, c: FieldElem) -> MultiPoly {
        assert_eq!(exps.len(), n + 1, "exponent vector must have n + 1 entries");
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial(exps), c);
        }
        MultiPoly { field: field.clone(), n, terms }
    }

    pub fn y(field: &Field, n: usize) -> MultiPoly {
        let mut e = vec![0; n + 1];
        e[n] = 1;
        Self::monomial(field, n, e, field.one())
    }

    /// The variable t_k, 0-based.
    pub fn t(field: &Field, n: usize, k: usize) -> MultiPoly {
        let mut e = vec![0; n + 1];
        e[k] = 1;
        Self::monomial(field, n, e, field.one())
    }

    /// Sums the given terms, dropping zeros. Exponent vectors must have length n + 1.
    pub fn from_terms<I>(field: &Field, n: usize, terms: I) -> Result<MultiPoly>
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElem)>,
    {
        let mut out = MultiPoly::zero(field, n);
        for (e, c) in terms {
            if e.len() != n + 1 {
                return Err(Error::MalformedInput(format!(
                    "exponent vector {e:?} should have {} entries",
                    n + 1
                )));
            }
            out.add_term(Monomial(e), c);
        }
        Ok(out)
    }

    /// Builds a polynomial from integer coefficients, reducing them mod p.
    pub fn from_int_terms(field: &Field, n: usize, terms: &[(Vec<u32>, i64)]) -> Result<MultiPoly> {
        Self::from_terms(field, n, terms.iter().map(|(e, c)| (e.clone(), field.from_int(*c))))
    }

    fn add_term(&mut self, m: Monomial, c: FieldElem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                let s = self.field.add(*v, c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Number of t-variables.
    #[inline]
    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in graded lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, FieldElem)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn support(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.keys()
    }

    pub fn coeff(&self, exps: &[u32]) -> FieldElem {
        self.terms.get(&Monomial(exps.to_vec())).copied().unwrap_or(FieldElem::ZERO)
    }

    fn check_compatible(&self, other: &MultiPoly) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VariableCountMismatch { left: self.n, right: other.n });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn arith(&self, other: &MultiPoly, op: ArithOp) -> Result<MultiPoly> {
        match op {
            ArithOp::Add => self.add(other),
            ArithOp::Sub => self.sub(other),
            ArithOp::Mul => self.mul(other),
        }
    }

    pub fn add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        Ok(out)
    }

    pub fn neg(&self) -> MultiPoly {
        let terms = self.terms.iter().map(|(m, c)| (m.clone(), self.field.neg(*c))).collect();
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }

    pub fn sub(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_compatible(other)?;
        let f = &self.field;
        let mut acc: BTreeMap<Monomial, FieldElem> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                let c = f.mul(*ca, *cb);
                let slot = acc.entry(Monomial(e)).or_insert(FieldElem::ZERO);
                *slot = f.add(*slot, c);
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Ok(MultiPoly { field: f.clone(), n: self.n, terms: acc })
    }

    pub fn scale(&self, c: FieldElem) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.field, self.n);
        }
        let terms = self.terms.iter().map(|(m, v)| (m.clone(), self.field.mul(*v, c))).collect();
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }

    /// Multiplies by the monomial t^exps[..n] y^exps[n].
    pub fn shift(&self, exps: &[u32]) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial(m.0.iter().zip(exps).map(|(a, b)| a + b).collect()), *c))
            .collect();
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }

    /// The p-th power map: exponents times p, coefficients raised to the p-th power.
    pub fn frobenius_twist(&self) -> MultiPoly {
        let p = self.field.p() as u32;
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (Monomial(m.0.iter().map(|e| e * p).collect()), self.field.frobenius(*c)))
            .collect();
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }

    /// self^k. Powers of p are taken with the Frobenius twist.
    pub fn pow(&self, k: u64) -> MultiPoly {
        let p = self.field.p();
        let mut result = MultiPoly::one(&self.field, self.n);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            let digit = k % p;
            if digit > 0 {
                result = result.mul(&base.pow_small(digit)).expect("same ring");
            }
            k /= p;
            if k > 0 {
                base = base.frobenius_twist();
            }
        }
        result
    }

    fn pow_small(&self, mut k: u64) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.field, self.n);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base).unwrap();
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base).unwrap();
            }
        }
        acc
    }

    /// Partial derivative with respect to y.
    pub fn derivative_y(&self) -> MultiPoly {
        let f = &self.field;
        let mut out = MultiPoly::zero(f, self.n);
        for (m, c) in &self.terms {
            let j = m.y_exp();
            if j == 0 {
                continue;
            }
            let coef = f.mul(f.from_int((j as u64 % f.p()) as i64), *c);
            let mut e = m.0.clone();
            e[self.n] = j - 1;
            out.add_term(Monomial(e), coef);
        }
        out
    }

    pub fn is_separable_in_y(&self) -> bool {
        !self.derivative_y().is_zero()
    }

    /// Keeps the terms with exponent congruent to (r, s) mod p, maps the exponent
    /// (p*i + r, p*j + s) to (i, j) and takes p-th roots of the coefficients.
    pub fn lambda_extract(&self, r: &[u32], s: u32) -> MultiPoly {
        assert_eq!(r.len(), self.n, "digit tuple must have n entries");
        let p = self.field.p() as u32;
        assert!(r.iter().all(|&d| d < p) && s < p, "digits must lie in 0..p");
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let t_ok = m.t_exps().iter().zip(r).all(|(&e, &d)| e % p == d);
            if !t_ok || m.y_exp() % p != s {
                continue;
            }
            let mut e: Vec<u32> = m.t_exps().iter().zip(r).map(|(&e, &d)| (e - d) / p).collect();
            e.push((m.y_exp() - s) / p);
            terms.insert(Monomial(e), self.field.inv_frobenius(*c));
        }
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }

    pub fn degree_profile(&self) -> Result<DegreeProfile> {
        if self.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let mut d = 0;
        let mut h = 0;
        let mut hvec = vec![0; self.n];
        for m in self.terms.keys() {
            d = d.max(m.y_exp());
            h = h.max(m.t_degree() as u32);
            for (slot, &e) in hvec.iter_mut().zip(m.t_exps()) {
                *slot = (*slot).max(e);
            }
        }
        Ok(DegreeProfile { d, h, hvec })
    }

    /// y-degree, or `None` for the zero polynomial.
    pub fn degree_y(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.y_exp()).max()
    }

    /// Coefficients of y^0, ..., y^d as polynomials in t (with y-exponent 0).
    pub fn coeffs_in_y(&self) -> Vec<MultiPoly> {
        let d = self.degree_y().unwrap_or(0) as usize;
        let mut out = vec![MultiPoly::zero(&self.field, self.n); d + 1];
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let j = e[self.n] as usize;
            e[self.n] = 0;
            out[j].terms.insert(Monomial(e), *c);
        }
        out
    }

    /// Value at t = 0, y = y0.
    pub fn eval_at_origin(&self, y0: FieldElem) -> FieldElem {
        let f = &self.field;
        let mut acc = f.zero();
        for (m, c) in &self.terms {
            if m.t_degree() == 0 {
                acc = f.add(acc, f.mul(*c, f.pow(y0, m.y_exp() as u64)));
            }
        }
        acc
    }

    /// Substitutes y := f, truncating to the precision of `f`.
    pub fn eval_at_series(&self, f: &TruncatedSeries) -> Result<TruncatedSeries> {
        if f.nvars() != self.n {
            return Err(Error::VariableCountMismatch { left: self.n, right: f.nvars() });
        }
        if f.field() != &self.field {
            return Err(Error::FieldMismatch);
        }
        let coeffs = self.coeffs_in_y();
        let prec = f.prec();
        let mut acc = TruncatedSeries::zero(&self.field, self.n, prec);
        for c in coeffs.iter().rev() {
            acc = acc.mul(f)?;
            acc = acc.add_poly(c);
        }
        Ok(acc)
    }

    /// The same polynomial with its t-variables permuted: t_k moves to position perm[k].
    pub fn permute_t(&self, perm: &[usize]) -> MultiPoly {
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0; self.n + 1];
                for (k, &v) in m.t_exps().iter().enumerate() {
                    e[perm[k]] = v;
                }
                e[self.n] = m.y_exp();
                (Monomial(e), *c)
            })
            .collect();
        MultiPoly { field: self.field.clone(), n: self.n, terms }
    }
}
