//! Number-theoretic transform for exact integer convolution.
//!
//! Used as the multiplication kernel for series over prime fields: inputs are
//! residues in [0, p), the true integer convolution is recovered from one or
//! two NTT primes and then reduced mod p.

const P1: u64 = 998_244_353;
const P2: u64 = 469_762_049;
const ROOT: u64 = 3;

fn pow_mod<const M: u64>(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= M;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % M;
        }
        b = b * b % M;
        e >>= 1;
    }
    acc
}

fn transform<const M: u64>(a: &mut [u64], invert: bool) {
    let n = a.len();
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut len = 2;
    while len <= n {
        let mut w = pow_mod::<M>(ROOT, (M - 1) / len as u64);
        if invert {
            w = pow_mod::<M>(w, M - 2);
        }
        let half = len / 2;
        let mut twiddles = Vec::with_capacity(half);
        let mut cur = 1u64;
        for _ in 0..half {
            twiddles.push(cur);
            cur = cur * w % M;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((x, y), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let u = *x;
                let v = *y * tw % M;
                *x = if u + v >= M { u + v - M } else { u + v };
                *y = if u >= v { u - v } else { u + M - v };
            }
        }
        len <<= 1;
    }
    if invert {
        let inv_n = pow_mod::<M>(n as u64, M - 2);
        for x in a.iter_mut() {
            *x = *x * inv_n % M;
        }
    }
}

fn convolve_mod<const M: u64>(a: &[u64], b: &[u64], size: usize) -> Vec<u64> {
    let mut fa = vec![0u64; size];
    let mut fb = vec![0u64; size];
    for (dst, &x) in fa.iter_mut().zip(a) {
        *dst = x % M;
    }
    for (dst, &x) in fb.iter_mut().zip(b) {
        *dst = x % M;
    }
    transform::<M>(&mut fa, false);
    transform::<M>(&mut fb, false);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x = *x * y % M;
    }
    transform::<M>(&mut fa, true);
    fa
}

/// Whether [`convolve`] can handle the given overlap and characteristic.
pub fn supports(overlap: usize, p: u64) -> bool {
    (overlap as u128) * ((p - 1) as u128) * ((p - 1) as u128) < (P1 as u128) * (P2 as u128)
}

/// Cyclic-free convolution of residue vectors mod p, of length a.len() + b.len() - 1.
///
/// `overlap` bounds the number of products contributing to one output entry.
pub fn convolve(a: &[u64], b: &[u64], p: u64, overlap: usize) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let out_len = a.len() + b.len() - 1;
    let size = out_len.next_power_of_two();
    let bound = (overlap as u128) * ((p - 1) as u128) * ((p - 1) as u128);
    if bound < P1 as u128 {
        let mut r = convolve_mod::<P1>(a, b, size);
        r.truncate(out_len);
        for x in r.iter_mut() {
            *x %= p;
        }
        return r;
    }
    assert!(bound < (P1 as u128) * (P2 as u128), "convolution exceeds CRT range");
    let r1 = convolve_mod::<P1>(a, b, size);
    let r2 = convolve_mod::<P2>(a, b, size);
    // x = r1 + P1 * ((r2 - r1) * P1^{-1} mod P2)
    let p1_inv = pow_mod::<P2>(P1, P2 - 2);
    (0..out_len)
        .map(|i| {
            let diff = (r2[i] + P2 - r1[i] % P2) % P2;
            let k = diff * p1_inv % P2;
            let x = r1[i] as u128 + (P1 as u128) * (k as u128);
            (x % p as u128) as u64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        out
    }

    #[test]
    fn matches_schoolbook() {
        let mut s = 7u64;
        let mut next = |m: u64| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
            (s >> 33) % m
        };
        for &p in &[2u64, 7, 65_521, 1_000_003] {
            let a: Vec<u64> = (0..300).map(|_| next(p)).collect();
            let b: Vec<u64> = (0..177).map(|_| next(p)).collect();
            assert_eq!(convolve(&a, &b, p, 177), naive(&a, &b, p));
        }
    }
}
