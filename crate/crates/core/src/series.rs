//! Truncated multivariate power series over F_q.
//!
//! A [`TruncatedSeries`] knows every coefficient of total degree `< prec`.
//! Coefficients are stored densely in graded order (total degree first, then
//! lexicographic), so all monomials of degree `< s` form a prefix.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::ntt;
use crate::poly::MultiPoly;

fn binom(a: u64, b: u64) -> u64 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc = 1u64;
    for i in 0..b {
        acc = acc * (a - i) / (i + 1);
    }
    acc
}

/// Number of monomials in `n` variables of total degree `< s`.
fn block_offset(n: usize, s: usize) -> usize {
    if s == 0 {
        return 0;
    }
    binom((s + n - 1) as u64, n as u64) as usize
}

/// Number of monomials in `m` variables of total degree exactly `r`.
fn count_exact(m: usize, r: usize) -> usize {
    if m == 0 {
        return usize::from(r == 0);
    }
    binom((r + m - 1) as u64, (m - 1) as u64) as usize
}

/// Position of an exponent vector in the dense graded layout.
pub(crate) fn rank(exps: &[u32]) -> usize {
    let n = exps.len();
    let s: usize = exps.iter().map(|&e| e as usize).sum();
    let mut idx = block_offset(n, s);
    let mut rem = s;
    for (k, &a) in exps.iter().enumerate().take(n.saturating_sub(1)) {
        for v in 0..a as usize {
            idx += count_exact(n - k - 1, rem - v);
        }
        rem -= a as usize;
    }
    idx
}

/// Steps to the next exponent vector in graded order.
fn advance(a: &mut [u32]) {
    let n = a.len();
    let mut tail = 0u32;
    for k in (0..n.saturating_sub(1)).rev() {
        tail += a[k + 1];
        if tail > 0 {
            a[k] += 1;
            for x in a[k + 1..].iter_mut() {
                *x = 0;
            }
            a[n - 1] = tail - 1;
            return;
        }
    }
    let s: u32 = a.iter().sum::<u32>() + 1;
    for x in a.iter_mut() {
        *x = 0;
    }
    a[n - 1] = s;
}

/// Walks all exponent vectors of `n` variables with total degree `< prec`, in layout order.
pub(crate) fn for_each_monomial(n: usize, prec: usize, mut visit: impl FnMut(usize, &[u32])) {
    let len = block_offset(n, prec);
    let mut cur = vec![0u32; n];
    for idx in 0..len {
        visit(idx, &cur);
        advance(&mut cur);
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    field: Field,
    n: usize,
    prec: usize,
    coeffs: Vec<FieldElem>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TruncatedSeries(n={}, prec={}; ", self.n, self.prec)?;
        let mut first = true;
        for (e, c) in self.terms() {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{:?}", self.field.fmt_elem(c), e)?;
        }
        write!(f, ")")
    }
}

impl TruncatedSeries {
    pub fn zero(field: &Field, n: usize, prec: usize) -> TruncatedSeries {
        assert!(n >= 1, "series need at least one variable");
        TruncatedSeries {
            field: field.clone(),
            n,
            prec,
            coeffs: vec![FieldElem::ZERO; block_offset(n, prec)],
        }
    }

    pub fn constant(field: &Field, n: usize, prec: usize, c: FieldElem) -> TruncatedSeries {
        let mut s = Self::zero(field, n, prec);
        if prec > 0 {
            s.coeffs[0] = c;
        }
        s
    }

    /// Builds a series from explicit terms; repeated exponents are summed.
    pub fn from_terms<I>(field: &Field, n: usize, prec: usize, terms: I) -> Result<TruncatedSeries>
    where
        I: IntoIterator<Item = (Vec<u32>, FieldElem)>,
    {
        if n == 0 {
            return Err(Error::MalformedInput("series need at least one variable".into()));
        }
        let mut s = Self::zero(field, n, prec);
        for (e, c) in terms {
            if e.len() != n {
                return Err(Error::MalformedInput(format!(
                    "exponent vector {e:?} should have {n} entries"
                )));
            }
            let deg: u64 = e.iter().map(|&x| x as u64).sum();
            if deg >= prec as u64 {
                return Err(Error::MalformedInput(format!(
                    "term {e:?} has total degree {deg} >= precision {prec}"
                )));
            }
            let i = rank(&e);
            s.coeffs[i] = field.add(s.coeffs[i], c);
        }
        Ok(s)
    }

    /// Univariate series from a dense coefficient list; precision is its length.
    pub fn univariate(field: &Field, coeffs: Vec<FieldElem>) -> TruncatedSeries {
        TruncatedSeries { field: field.clone(), n: 1, prec: coeffs.len(), coeffs }
    }

    /// The polynomial `p(t)` (no y-terms) as a series.
    pub fn from_t_poly(p: &MultiPoly, prec: usize) -> TruncatedSeries {
        Self::zero(p.field(), p.nvars(), prec).add_poly(p)
    }

    #[inline]
    pub fn field(&self) -> &Field {
        &self.field
    }

    #[inline]
    pub fn nvars(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn prec(&self) -> usize {
        self.prec
    }

    /// Coefficient at `exps`, or `None` beyond the precision.
    pub fn get(&self, exps: &[u32]) -> Option<FieldElem> {
        assert_eq!(exps.len(), self.n);
        let deg: u64 = exps.iter().map(|&x| x as u64).sum();
        if deg >= self.prec as u64 {
            None
        } else {
            Some(self.coeffs[rank(exps)])
        }
    }

    /// Coefficient at `exps`. Panics beyond the precision.
    pub fn coeff(&self, exps: &[u32]) -> FieldElem {
        self.get(exps)
            .unwrap_or_else(|| panic!("coefficient {exps:?} is beyond precision {}", self.prec))
    }

    /// Dense coefficients of a univariate series, index = exponent.
    pub fn univariate_coeffs(&self) -> &[FieldElem] {
        assert_eq!(self.n, 1, "not a univariate series");
        &self.coeffs
    }

    /// Nonzero terms in graded order.
    pub fn terms(&self) -> Vec<(Vec<u32>, FieldElem)> {
        let mut out = Vec::new();
        for_each_monomial(self.n, self.prec, |i, e| {
            if !self.coeffs[i].is_zero() {
                out.push((e.to_vec(), self.coeffs[i]));
            }
        });
        out
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Same series known to a smaller precision.
    pub fn truncate(&self, prec: usize) -> TruncatedSeries {
        let prec = prec.min(self.prec);
        TruncatedSeries {
            field: self.field.clone(),
            n: self.n,
            prec,
            coeffs: self.coeffs[..block_offset(self.n, prec)].to_vec(),
        }
    }

    /// Pads with zero coefficients up to `prec`. Only meaningful when the
    /// caller knows the extra coefficients vanish or will be corrected.
    pub(crate) fn lift(&self, prec: usize) -> TruncatedSeries {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(block_offset(self.n, prec.max(self.prec)), FieldElem::ZERO);
        TruncatedSeries { field: self.field.clone(), n: self.n, prec: prec.max(self.prec), coeffs }
    }

    /// True when both series agree on every coefficient of degree `< prec`.
    pub fn agrees_with(&self, other: &TruncatedSeries, prec: usize) -> bool {
        assert!(prec <= self.prec && prec <= other.prec, "comparison beyond known precision");
        let len = block_offset(self.n, prec);
        self.n == other.n && self.coeffs[..len] == other.coeffs[..len]
    }

    fn check_compatible(&self, other: &TruncatedSeries) -> Result<()> {
        if self.n != other.n {
            return Err(Error::VariableCountMismatch { left: self.n, right: other.n });
        }
        if self.field != other.field {
            return Err(Error::FieldMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let prec = self.prec.min(other.prec);
        let len = block_offset(self.n, prec);
        let coeffs = self.coeffs[..len]
            .iter()
            .zip(&other.coeffs[..len])
            .map(|(a, b)| self.field.add(*a, *b))
            .collect();
        Ok(TruncatedSeries { field: self.field.clone(), n: self.n, prec, coeffs })
    }

    pub fn neg(&self) -> TruncatedSeries {
        let coeffs = self.coeffs.iter().map(|c| self.field.neg(*c)).collect();
        TruncatedSeries { field: self.field.clone(), n: self.n, prec: self.prec, coeffs }
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: FieldElem) -> TruncatedSeries {
        let coeffs = self.coeffs.iter().map(|x| self.field.mul(*x, c)).collect();
        TruncatedSeries { field: self.field.clone(), n: self.n, prec: self.prec, coeffs }
    }

    /// Adds a polynomial in t (its y-exponents must be zero).
    pub fn add_poly(&self, p: &MultiPoly) -> TruncatedSeries {
        assert_eq!(p.nvars(), self.n);
        let mut out = self.clone();
        for (m, c) in p.terms() {
            assert_eq!(m.y_exp(), 0, "add_poly expects a polynomial in t only");
            if (m.t_degree() as usize) < self.prec {
                let i = rank(m.t_exps());
                out.coeffs[i] = self.field.add(out.coeffs[i], c);
            }
        }
        out
    }

    fn nonzero_terms(&self) -> Vec<(usize, Vec<u32>, FieldElem)> {
        let mut out = Vec::new();
        let mut deg_bound = 0;
        for_each_monomial(self.n, self.prec, |i, e| {
            if !self.coeffs[i].is_zero() {
                deg_bound = e.iter().sum::<u32>() as usize;
                out.push((deg_bound, e.to_vec(), self.coeffs[i]));
            }
        });
        out
    }

    /// Product, truncated to the smaller of the two precisions.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compatible(other)?;
        let prec = self.prec.min(other.prec);
        if prec == 0 {
            return Ok(Self::zero(&self.field, self.n, 0));
        }
        let a = self.truncate(prec).nonzero_terms();
        let b = other.truncate(prec).nonzero_terms();
        if a.is_empty() || b.is_empty() {
            return Ok(Self::zero(&self.field, self.n, prec));
        }
        let overlap = a.len().min(b.len());
        let p = self.field.p();
        if self.field.is_prime_field() && overlap > 48 && ntt::supports(overlap, p) {
            Ok(self.mul_kronecker(&a, &b, prec, overlap))
        } else {
            Ok(self.mul_schoolbook(&a, &b, prec))
        }
    }

    fn mul_schoolbook(
        &self,
        a: &[(usize, Vec<u32>, FieldElem)],
        b: &[(usize, Vec<u32>, FieldElem)],
        prec: usize,
    ) -> TruncatedSeries {
        let n = self.n;
        let f = &self.field;
        // box layout with stride prec: coordinates of in-range products never carry
        let box_index = |e: &[u32]| e.iter().rev().fold(0usize, |acc, &x| acc * prec + x as usize);
        let box_len = prec.pow(n as u32);
        let bi: Vec<usize> = b.iter().map(|t| box_index(&t.1)).collect();
        let mut out = Self::zero(f, n, prec);
        if f.is_prime_field() {
            let p = f.p();
            let mut acc = vec![0u64; box_len];
            for (da, ea, ca) in a {
                let ia = box_index(ea);
                let ca = ca.packed();
                for ((db, _, cb), &ib) in b.iter().zip(&bi) {
                    if da + db >= prec {
                        break;
                    }
                    let slot = &mut acc[ia + ib];
                    *slot = (*slot + ca * cb.packed()) % p;
                }
            }
            for_each_monomial(n, prec, |i, e| {
                out.coeffs[i] = f.element(acc[box_index(e)]);
            });
        } else {
            let mut acc = vec![FieldElem::ZERO; box_len];
            for (da, ea, ca) in a {
                let ia = box_index(ea);
                for ((db, _, cb), &ib) in b.iter().zip(&bi) {
                    if da + db >= prec {
                        break;
                    }
                    let slot = &mut acc[ia + ib];
                    *slot = f.add(*slot, f.mul(*ca, *cb));
                }
            }
            for_each_monomial(n, prec, |i, e| {
                out.coeffs[i] = acc[box_index(e)];
            });
        }
        out
    }

    fn mul_kronecker(
        &self,
        a: &[(usize, Vec<u32>, FieldElem)],
        b: &[(usize, Vec<u32>, FieldElem)],
        prec: usize,
        overlap: usize,
    ) -> TruncatedSeries {
        let stride = 2 * prec - 1;
        let kron = |e: &[u32]| e.iter().rev().fold(0usize, |acc, &x| acc * stride + x as usize);
        let pack = |terms: &[(usize, Vec<u32>, FieldElem)]| {
            let idx: Vec<usize> = terms.iter().map(|t| kron(&t.1)).collect();
            let len = idx.iter().max().unwrap() + 1;
            let mut v = vec![0u64; len];
            for (i, t) in idx.iter().zip(terms) {
                v[*i] = t.2.packed();
            }
            v
        };
        let va = pack(a);
        let vb = pack(b);
        let prod = ntt::convolve(&va, &vb, self.field.p(), overlap);
        let mut out = Self::zero(&self.field, self.n, prec);
        for_each_monomial(self.n, prec, |i, e| {
            let k = kron(e);
            if k < prod.len() {
                out.coeffs[i] = self.field.element(prod[k]);
            }
        });
        out
    }

    /// Multiplicative inverse; `None` when the constant term vanishes.
    pub fn inverse(&self) -> Option<TruncatedSeries> {
        if self.prec == 0 {
            return Some(self.clone());
        }
        let c0 = self.field.inv(self.coeffs[0])?;
        let mut g = Self::constant(&self.field, self.n, 1, c0);
        let mut k = 1;
        while k < self.prec {
            let k2 = (2 * k).min(self.prec);
            let gl = g.lift(k2);
            // g <- g + g (1 - a g)
            let ag = self.truncate(k2).mul(&gl).unwrap();
            let err = Self::constant(&self.field, self.n, k2, self.field.one()).sub(&ag).unwrap();
            g = gl.add(&gl.mul(&err).unwrap()).unwrap();
            k = k2;
        }
        Some(g)
    }

    /// The p^times-th power map: exponents scaled by p^times, coefficients raised
    /// to that power. The result is exact to `prec * p^times`, capped at `max_prec`.
    pub fn frobenius_twist(&self, times: u32, max_prec: usize) -> TruncatedSeries {
        let scale = (self.field.p() as usize).pow(times);
        let prec = (self.prec * scale).min(max_prec);
        let mut out = Self::zero(&self.field, self.n, prec);
        for (e, c) in self.terms() {
            let scaled: Vec<u32> = e.iter().map(|&x| x * scale as u32).collect();
            let deg: usize = scaled.iter().map(|&x| x as usize).sum();
            if deg < prec {
                out.coeffs[rank(&scaled)] = self.field.frobenius_pow(c, times as i64);
            }
        }
        out
    }

    /// Section operator S_r: coefficient i of the result is a(p i + r)^(1/p).
    pub fn section(&self, r: &[u32]) -> TruncatedSeries {
        assert_eq!(r.len(), self.n, "digit tuple must have n entries");
        let p = self.field.p() as usize;
        assert!(r.iter().all(|&d| (d as usize) < p), "digits must lie in 0..p");
        let rsum: usize = r.iter().map(|&d| d as usize).sum();
        let prec = if self.prec > rsum { (self.prec - rsum).div_ceil(p) } else { 0 };
        let mut out = Self::zero(&self.field, self.n, prec);
        let mut src = vec![0u32; self.n];
        for_each_monomial(self.n, prec, |i, e| {
            for k in 0..self.n {
                src[k] = e[k] * p as u32 + r[k];
            }
            out.coeffs[i] = self.field.inv_frobenius(self.coeffs[rank(&src)]);
        });
        out
    }

    /// Univariate diagonal: coefficient i is a(i, ..., i).
    pub fn diagonal(&self) -> TruncatedSeries {
        let prec = self.prec.div_ceil(self.n);
        let coeffs = (0..prec)
            .map(|i| self.coeffs[rank(&vec![i as u32; self.n])])
            .collect();
        TruncatedSeries { field: self.field.clone(), n: 1, prec, coeffs }
    }

    /// Partial diagonal keeping t_1..t_m free and collapsing t_{m+1}..t_n onto
    /// one variable x: coefficient (i_1..i_m, k) is a(i_1, ..., i_m, k, ..., k).
    pub fn partial_diagonal(&self, m: usize) -> Result<TruncatedSeries> {
        if m >= self.n {
            return Err(Error::BadAxisCount { m, n: self.n });
        }
        let collapsed = self.n - m;
        let prec = self.prec.div_ceil(collapsed);
        let mut out = Self::zero(&self.field, m + 1, prec);
        let mut src = vec![0u32; self.n];
        for_each_monomial(m + 1, prec, |i, e| {
            src[..m].copy_from_slice(&e[..m]);
            for x in src[m..].iter_mut() {
                *x = e[m];
            }
            out.coeffs[i] = self.coeffs[rank(&src)];
        });
        Ok(out)
    }

    /// Applies `map` to every coefficient (e.g. a field automorphism).
    pub fn map_coeffs(&self, map: impl Fn(FieldElem) -> FieldElem) -> TruncatedSeries {
        let coeffs = self.coeffs.iter().map(|&c| map(c)).collect();
        TruncatedSeries { field: self.field.clone(), n: self.n, prec: self.prec, coeffs }
    }

    /// Multiplies by the monomial t^e; the product is known to total degree
    /// `prec + |e|`.
    pub fn shift(&self, e: &[u32]) -> TruncatedSeries {
        let shift_deg: usize = e.iter().map(|&x| x as usize).sum();
        let mut out = Self::zero(&self.field, self.n, self.prec + shift_deg);
        let mut dst = vec![0u32; self.n];
        for_each_monomial(self.n, self.prec, |i, src| {
            for k in 0..self.n {
                dst[k] = src[k] + e[k];
            }
            out.coeffs[rank(&dst)] = self.coeffs[i];
        });
        out
    }
}

/// An algebraic series pinned down by an annihilator and a simple root of E(0, y).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Branch {
    e: MultiPoly,
    y0: FieldElem,
}

impl Branch {
    pub fn new(e: MultiPoly, y0: FieldElem) -> Result<Branch> {
        if e.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        if e.nvars() == 0 {
            return Err(Error::MalformedInput("a branch needs at least one t-variable".into()));
        }
        if !e.eval_at_origin(y0).is_zero() {
            return Err(Error::NotARoot);
        }
        if e.derivative_y().eval_at_origin(y0).is_zero() {
            return Err(Error::SingularBranch);
        }
        Ok(Branch { e, y0 })
    }

    pub fn annihilator(&self) -> &MultiPoly {
        &self.e
    }

    pub fn y0(&self) -> FieldElem {
        self.y0
    }

    pub fn field(&self) -> &Field {
        self.e.field()
    }

    pub fn nvars(&self) -> usize {
        self.e.nvars()
    }
}

/// The root f of E(t, f) = 0 with f(0) = y0, to total degree `< prec`.
pub fn hensel_solve(b: &Branch, prec: usize) -> Result<TruncatedSeries> {
    hensel_solve_interruptible(b, prec, &AtomicBool::new(false))
}

/// Newton iteration with precision doubling. `cancel` is polled between
/// iterations; a cancelled run returns [`Error::Interrupted`] and no series.
pub fn hensel_solve_interruptible(
    b: &Branch,
    prec: usize,
    cancel: &AtomicBool,
) -> Result<TruncatedSeries> {
    let e = &b.e;
    let field = e.field();
    let n = e.nvars();
    if !e.eval_at_origin(b.y0).is_zero() {
        return Err(Error::NotARoot);
    }
    let ey = e.derivative_y();
    let ey0 = ey.eval_at_origin(b.y0);
    let ey0_inv = field.inv(ey0).ok_or(Error::SingularBranch)?;
    if prec == 0 {
        return Ok(TruncatedSeries::zero(field, n, 0));
    }
    let mut f = TruncatedSeries::constant(field, n, 1, b.y0);
    // inverse of E_y(t, f), correct to the current precision
    let mut inv = TruncatedSeries::constant(field, n, 1, ey0_inv);
    let mut k = 1;
    while k < prec {
        if cancel.load(Ordering::Relaxed) {
            return Err(Error::Interrupted);
        }
        let k2 = (2 * k).min(prec);
        let fl = f.lift(k2);
        // E(t, fl) vanishes below degree k, so an inverse good to degree k suffices
        let val = e.eval_at_series(&fl)?;
        let step = val.mul(&inv.lift(k2))?;
        f = fl.sub(&step)?;
        if k2 < prec {
            let dv = ey.eval_at_series(&f)?;
            let il = inv.lift(k2);
            let one = TruncatedSeries::constant(field, n, k2, field.one());
            let err = one.sub(&dv.mul(&il)?)?;
            inv = il.add(&il.mul(&err)?)?;
        }
        k = k2;
    }
    Ok(f)
}
