//! Shared fixtures for the benchmarks.

use christol_core::{Branch, Field, MultiPoly, TruncatedSeries};

fn branch(p: u64, n: usize, terms: &[(&[u32], i64)], y0: i64) -> Branch {
    let f = Field::prime(p).expect("prime");
    let e = MultiPoly::from_terms(&f, n, terms.iter().map(|(e, c)| (e.to_vec(), f.from_int(*c)))).expect("poly");
    Branch::new(e, f.from_int(y0)).expect("branch")
}

/// y = 1 + (x1 + x2) y, the binomial coefficients.
pub fn pascal(p: u64) -> Branch {
    branch(p, 2, &[(&[0, 0, 1], 1), (&[1, 0, 1], -1), (&[0, 1, 1], -1), (&[0, 0, 0], -1)], 1)
}

/// x1 x2 y^2 - y + 1, whose diagonal is the Catalan series.
pub fn catalan(p: u64) -> Branch {
    branch(p, 2, &[(&[1, 1, 2], 1), (&[0, 0, 1], -1), (&[0, 0, 0], 1)], 1)
}

/// Dense bivariate series with a fixed scrambled coefficient pattern.
pub fn dense_series(p: u64, prec: usize) -> TruncatedSeries {
    let f = Field::prime(p).expect("prime");
    let mut terms = Vec::new();
    for i in 0..prec as u32 {
        for j in 0..prec as u32 - i {
            let c = (i64::from(i) * 7919 + i64::from(j) * 104_729 + i64::from(i * j)) % p as i64;
            terms.push((vec![i, j], f.from_int(c)));
        }
    }
    TruncatedSeries::from_terms(&f, 2, prec, terms).expect("series")
}
