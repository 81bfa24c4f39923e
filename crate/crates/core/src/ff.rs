//! Exact arithmetic in finite fields F_q, q = p^e.
//!
//! Elements are packed into a single `u64` holding the base-p digits of the
//! power-basis coefficient vector, so they are `Copy`, hashable and cheap to
//! store densely. All arithmetic goes through the owning [`Field`].

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};

const MAX_EXTENSION_DEGREE: u32 = 16;

/// An element of some F_q, in the packed power-basis encoding of its field.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u64);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);

    /// The packed base-p encoding; for prime fields this is the residue itself.
    #[inline]
    pub fn packed(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// The finite field F_{p^e} presented as F_p[x]/(modulus).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Field {
    p: u64,
    e: u32,
    q: u64,
    /// Monic modulus, low degree first, length e + 1. Empty for prime fields.
    modulus: Vec<u64>,
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `a` modulo the monic polynomial `m` over F_p (low degree first).
fn poly_rem_monic(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = r.pop().unwrap();
        if lead != 0 {
            let shift = r.len() - dm;
            for (k, &mk) in m[..dm].iter().enumerate() {
                r[shift + k] = (r[shift + k] + p - lead * mk % p) % p;
            }
        }
    }
    r
}

/// Brute-force search for a monic factor of degree 1..=deg/2.
fn has_proper_factor(m: &[u64], p: u64) -> bool {
    let deg = m.len() - 1;
    for k in 1..=deg / 2 {
        let count = p.pow(k as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(k + 1);
            let mut v = idx;
            for _ in 0..k {
                g.push(v % p);
                v /= p;
            }
            g.push(1);
            if poly_rem_monic(m, &g, p).iter().all(|&c| c == 0) {
                return true;
            }
        }
    }
    false
}

impl Field {
    /// Validates and builds F_{p^e}. `modulus` lists the coefficients of a
    /// monic degree-e polynomial, constant term first; it is required when
    /// e > 1 and ignored (must be absent or trivial) when e = 1.
    pub fn new(p: u64, e: u32, modulus: Option<&[i64]>) -> Result<Field> {
        if !is_prime(p) {
            return Err(Error::NonPrimeCharacteristic(p));
        }
        if p >= 1 << 31 {
            return Err(Error::MalformedInput(format!("characteristic {p} too large")));
        }
        if e == 0 || e > MAX_EXTENSION_DEGREE {
            return Err(Error::MalformedInput(format!(
                "extension degree must be in 1..={MAX_EXTENSION_DEGREE}, got {e}"
            )));
        }
        let q = p
            .checked_pow(e)
            .filter(|&q| q < 1 << 62)
            .ok_or_else(|| Error::MalformedInput(format!("field order {p}^{e} too large")))?;
        if e == 1 {
            if let Some(m) = modulus {
                if m.len() != 2 || m[1].rem_euclid(p as i64) != 1 {
                    return Err(Error::MalformedInput(
                        "a prime field takes no modulus (or a monic linear one)".into(),
                    ));
                }
            }
            return Ok(Field { p, e, q, modulus: Vec::new() });
        }
        let m = modulus.ok_or_else(|| {
            Error::MalformedInput(format!("extension degree {e} requires a modulus"))
        })?;
        if m.len() != e as usize + 1 {
            return Err(Error::MalformedInput(format!(
                "modulus must have {} coefficients, got {}",
                e + 1,
                m.len()
            )));
        }
        let m: Vec<u64> = m.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
        if m[e as usize] != 1 {
            return Err(Error::MalformedInput("modulus must be monic".into()));
        }
        if has_proper_factor(&m, p) {
            return Err(Error::ReducibleModulus { p });
        }
        Ok(Field { p, e, q, modulus: m })
    }

    /// The prime field F_p.
    pub fn prime(p: u64) -> Result<Field> {
        Field::new(p, 1, None)
    }

    #[inline]
    pub fn p(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn e(&self) -> u32 {
        self.e
    }

    #[inline]
    pub fn q(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn is_prime_field(&self) -> bool {
        self.e == 1
    }

    /// Monic modulus coefficients, constant term first; `None` for prime fields.
    pub fn modulus(&self) -> Option<&[u64]> {
        if self.e == 1 {
            None
        } else {
            Some(&self.modulus)
        }
    }

    #[inline]
    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    #[inline]
    pub fn one(&self) -> FieldElem {
        FieldElem(1)
    }

    /// The image of an integer under Z -> F_p -> F_q.
    pub fn from_int(&self, v: i64) -> FieldElem {
        FieldElem(v.rem_euclid(self.p as i64) as u64)
    }

    pub fn from_bigint(&self, v: &BigInt) -> FieldElem {
        let r = v.mod_floor(&BigInt::from(self.p));
        FieldElem(r.to_u64().expect("residue fits"))
    }

    /// Element with the given power-basis coordinates (integers reduced mod p).
    /// Fewer than e coordinates are zero-padded.
    pub fn from_coeffs(&self, coeffs: &[i64]) -> Result<FieldElem> {
        if coeffs.len() > self.e as usize {
            return Err(Error::MalformedInput(format!(
                "field element has {} coordinates, field degree is {}",
                coeffs.len(),
                self.e
            )));
        }
        let digits: Vec<u64> = coeffs.iter().map(|&c| c.rem_euclid(self.p as i64) as u64).collect();
        Ok(self.pack(&digits))
    }

    /// Power-basis coordinates, always of length e.
    pub fn coeffs(&self, x: FieldElem) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut v = x.0;
        for _ in 0..self.e {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    /// The element whose packed encoding is `index`; `index < q`.
    pub fn element(&self, index: u64) -> FieldElem {
        assert!(index < self.q, "index {index} out of range for F_{}", self.q);
        FieldElem(index)
    }

    /// All q elements in packed order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.q).map(FieldElem)
    }

    fn pack(&self, digits: &[u64]) -> FieldElem {
        let mut v = 0u64;
        for &d in digits.iter().rev() {
            v = v * self.p + d;
        }
        FieldElem(v)
    }

    fn unpack(&self, x: FieldElem, out: &mut [u64]) {
        let mut v = x.0;
        for slot in out.iter_mut().take(self.e as usize) {
            *slot = v % self.p;
            v /= self.p;
        }
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.e == 1 {
            let s = a.0 + b.0;
            return FieldElem(if s >= self.p { s - self.p } else { s });
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.e {
            let d = (x % self.p + y % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
            y /= self.p;
        }
        FieldElem(out)
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        if self.e == 1 {
            return FieldElem(if a.0 == 0 { 0 } else { self.p - a.0 });
        }
        let mut x = a.0;
        let mut out = 0u64;
        let mut place = 1u64;
        for _ in 0..self.e {
            let d = (self.p - x % self.p) % self.p;
            out += d * place;
            place *= self.p;
            x /= self.p;
        }
        FieldElem(out)
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.e == 1 {
            return FieldElem(a.0 * b.0 % self.p);
        }
        if a.0 == 0 || b.0 == 0 {
            return FieldElem(0);
        }
        let e = self.e as usize;
        let mut da = [0u64; MAX_EXTENSION_DEGREE as usize];
        let mut db = [0u64; MAX_EXTENSION_DEGREE as usize];
        self.unpack(a, &mut da);
        self.unpack(b, &mut db);
        let mut prod = [0u64; 2 * MAX_EXTENSION_DEGREE as usize];
        for i in 0..e {
            if da[i] == 0 {
                continue;
            }
            for j in 0..e {
                prod[i + j] = (prod[i + j] + da[i] * db[j]) % self.p;
            }
        }
        for k in (e..2 * e - 1).rev() {
            let lead = prod[k];
            if lead == 0 {
                continue;
            }
            prod[k] = 0;
            for (i, &mi) in self.modulus[..e].iter().enumerate() {
                let idx = k - e + i;
                prod[idx] = (prod[idx] + self.p - lead * mi % self.p) % self.p;
            }
        }
        self.pack(&prod[..e])
    }

    pub fn pow(&self, a: FieldElem, mut k: u64) -> FieldElem {
        let mut base = a;
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn pow_big(&self, a: FieldElem, k: &BigUint) -> FieldElem {
        // x^(q-1) = 1 for x != 0
        if a.is_zero() {
            return if k.is_zero() { self.one() } else { self.zero() };
        }
        let r = (k % BigUint::from(self.q - 1)).to_u64().unwrap();
        self.pow(a, r)
    }

    /// Multiplicative inverse; `None` for zero.
    pub fn inv(&self, a: FieldElem) -> Option<FieldElem> {
        if a.is_zero() {
            None
        } else {
            Some(self.pow(a, self.q - 2))
        }
    }

    /// a / b. Panics when b is zero.
    pub fn div(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.mul(a, self.inv(b).expect("division by zero in F_q"))
    }

    /// x -> x^p.
    #[inline]
    pub fn frobenius(&self, x: FieldElem) -> FieldElem {
        if self.e == 1 {
            x
        } else {
            self.pow(x, self.p)
        }
    }

    /// The unique y with y^p = x, computed as x^(p^(e-1)).
    #[inline]
    pub fn inv_frobenius(&self, x: FieldElem) -> FieldElem {
        if self.e == 1 {
            x
        } else {
            self.pow(x, self.q / self.p)
        }
    }

    /// Frobenius iterated `k` times; negative `k` iterates the inverse.
    pub fn frobenius_pow(&self, x: FieldElem, k: i64) -> FieldElem {
        if self.e == 1 {
            return x;
        }
        let k = k.rem_euclid(self.e as i64) as u32;
        self.pow(x, self.p.pow(k))
    }

    pub fn fmt_elem(&self, x: FieldElem) -> String {
        if self.e == 1 {
            x.0.to_string()
        } else {
            let c = self.coeffs(x);
            format!("{c:?}")
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.e == 1 {
            write!(f, "F_{}", self.p)
        } else {
            write!(f, "F_{}^{} mod {:?}", self.p, self.e, self.modulus)
        }
    }
}
