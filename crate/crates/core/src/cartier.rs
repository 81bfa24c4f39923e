//! Section operators acting on finite-dimensional representations.
//!
//! A [`Representation`] stands for the series P(t, f) / E_y(t, f), where f is
//! the branch pinned by E and the support of P lies in the lattice set
//! C′ ∩ ℕ^{n+1}, C′ = NP(E) + (−1, 0]^{n+1}. The section operator S_r acts by
//! P ↦ Λ_{r, p−1}(P · E^{p−1}), which keeps P inside C′.
//!
//! Every application of S_r takes a p-th root of the coefficients. After L
//! digit steps the constant term is therefore a(i)^{1/p^L}; queries undo this
//! with the Frobenius power F^L, which is the identity over prime fields.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::poly::MultiPoly;
use crate::polytope::box_lattice_points;
use crate::series::{hensel_solve, Branch, TruncatedSeries};

/// Everything about a branch that the section dynamics need, computed once.
#[derive(Debug)]
pub struct BranchSpace {
    branch: Branch,
    ey: MultiPoly,
    e_pow: MultiPoly,
    ey0_inv: FieldElem,
    basis: Vec<Vec<u32>>,
    index: HashMap<Vec<u32>, usize>,
    matrices: OnceLock<Vec<Vec<Vec<FieldElem>>>>,
}

/// Total degree used for the E(t, f) = 0 soundness check.
pub fn default_check_prec(b: &Branch) -> usize {
    let dp = b.annihilator().degree_profile().expect("branch annihilator is nonzero");
    4 * (dp.h as usize + dp.d as usize) + 16
}

impl BranchSpace {
    /// Builds the space and checks E(t, f) = 0 to the default precision.
    pub fn new(b: &Branch) -> Result<Arc<BranchSpace>> {
        BranchSpace::with_check_prec(b, default_check_prec(b))
    }

    /// Builds the space, checking E(t, f) = 0 below total degree `check_prec`.
    pub fn with_check_prec(b: &Branch, check_prec: usize) -> Result<Arc<BranchSpace>> {
        let e = b.annihilator();
        let field = e.field();
        let ey = e.derivative_y();
        let ey0_inv = field.inv(ey.eval_at_origin(b.y0())).ok_or(Error::SingularBranch)?;
        if check_prec > 0 {
            let f = hensel_solve(b, check_prec)?;
            let residual = e.eval_at_series(&f)?;
            if let Some(degree) = residual.terms().iter().map(|(m, _)| m.iter().sum::<u32>()).min() {
                return Err(Error::RelationCheckFailed { degree: degree as usize });
            }
        }
        let basis = box_lattice_points(e)?;
        let index = basis.iter().enumerate().map(|(i, z)| (z.clone(), i)).collect();
        Ok(Arc::new(BranchSpace {
            branch: b.clone(),
            e_pow: e.pow(field.p() - 1),
            ey,
            ey0_inv,
            basis,
            index,
            matrices: OnceLock::new(),
        }))
    }

    pub fn branch(&self) -> &Branch {
        &self.branch
    }

    pub fn field(&self) -> &Field {
        self.branch.field()
    }

    pub fn nvars(&self) -> usize {
        self.branch.nvars()
    }

    /// The lattice basis C′ ∩ ℕ^{n+1} in lexicographic order.
    pub fn basis(&self) -> &[Vec<u32>] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Representation of f itself: P = y · E_y.
    pub fn embed_f(self: &Arc<Self>) -> Representation {
        let y = MultiPoly::y(self.field(), self.nvars());
        let p = y.mul(&self.ey).expect("same ring");
        Representation { space: Arc::clone(self), p }
    }

    /// Representation with an arbitrary numerator, checked against C′.
    pub fn representation(self: &Arc<Self>, p: MultiPoly) -> Result<Representation> {
        if p.nvars() != self.nvars() {
            return Err(Error::VariableCountMismatch { left: p.nvars(), right: self.nvars() });
        }
        if p.field() != self.field() {
            return Err(Error::FieldMismatch);
        }
        self.check_support(&p)?;
        Ok(Representation { space: Arc::clone(self), p })
    }

    /// Representation from coordinates over [`BranchSpace::basis`].
    pub fn from_vector(self: &Arc<Self>, v: &[FieldElem]) -> Representation {
        assert_eq!(v.len(), self.dim());
        let terms = self.basis.iter().zip(v).filter(|(_, c)| !c.is_zero()).map(|(z, c)| (z.clone(), *c));
        let p = MultiPoly::from_terms(self.field(), self.nvars(), terms).expect("basis exponents fit");
        Representation { space: Arc::clone(self), p }
    }

    fn check_support(&self, p: &MultiPoly) -> Result<()> {
        match p.support().find(|m| !self.index.contains_key(m.as_slice())) {
            Some(m) => Err(Error::SupportEscape { exponent: m.as_slice().to_vec() }),
            None => Ok(()),
        }
    }

    fn section_poly(&self, p: &MultiPoly, r: &[u32]) -> Result<MultiPoly> {
        let pm = self.field().p() as u32;
        assert_eq!(r.len(), self.nvars(), "digit tuple has the wrong width");
        assert!(r.iter().all(|&x| x < pm), "digit out of range");
        let u = p.mul(&self.e_pow)?;
        let q = u.lambda_extract(r, pm - 1);
        self.check_support(&q)?;
        Ok(q)
    }

    fn vector_of(&self, p: &MultiPoly) -> Vec<FieldElem> {
        let mut v = vec![self.field().zero(); self.dim()];
        for (m, c) in p.terms() {
            v[self.index[m.as_slice()]] = c;
        }
        v
    }

    /// Constant term P(0, y0) / E_y(0, y0) of a coordinate vector.
    pub fn constant_term_of(&self, v: &[FieldElem]) -> FieldElem {
        let f = self.field();
        let y0 = self.branch.y0();
        let mut acc = f.zero();
        for (z, c) in self.basis.iter().zip(v) {
            let (t, y) = z.split_at(z.len() - 1);
            if !c.is_zero() && t.iter().all(|&x| x == 0) {
                acc = f.add(acc, f.mul(*c, f.pow(y0, y[0] as u64)));
            }
        }
        f.mul(acc, self.ey0_inv)
    }

    /// All digit tuples r ∈ {0..p−1}^n in lexicographic order.
    pub fn digit_tuples(&self) -> Vec<Vec<u32>> {
        digit_tuples(self.field().p() as u32, self.nvars())
    }

    /// Images of the basis vectors under every S_r, indexed by the position of r
    /// in [`BranchSpace::digit_tuples`]. Fails with `SupportEscape` if any image
    /// leaves C′.
    pub fn section_matrices(&self) -> Result<&Vec<Vec<Vec<FieldElem>>>> {
        if let Some(m) = self.matrices.get() {
            return Ok(m);
        }
        let mut all = Vec::new();
        for r in self.digit_tuples() {
            let mut images = Vec::with_capacity(self.dim());
            for z in &self.basis {
                let b = MultiPoly::monomial(self.field(), self.nvars(), z.clone(), self.field().one());
                images.push(self.vector_of(&self.section_poly(&b, &r)?));
            }
            all.push(images);
        }
        Ok(self.matrices.get_or_init(|| all))
    }

    /// S_r on coordinates: Σ_k F^{-1}(v_k) · S_r(basis_k).
    pub fn apply_section_vector(&self, v: &[FieldElem], digit_index: usize) -> Result<Vec<FieldElem>> {
        let f = self.field();
        let images = &self.section_matrices()?[digit_index];
        let mut out = vec![f.zero(); self.dim()];
        for (c, img) in v.iter().zip(images) {
            if c.is_zero() {
                continue;
            }
            let c = f.inv_frobenius(*c);
            for (o, x) in out.iter_mut().zip(img) {
                if !x.is_zero() {
                    *o = f.add(*o, f.mul(c, *x));
                }
            }
        }
        Ok(out)
    }

    /// The coefficient a(index) of f.
    pub fn coeff(self: &Arc<Self>, index: &[BigUint]) -> Result<FieldElem> {
        if index.len() != self.nvars() {
            return Err(Error::MalformedInput(format!(
                "index has {} coordinates, expected {}",
                index.len(),
                self.nvars()
            )));
        }
        let p = self.field().p();
        let digits = digit_tuple_indices(index, p);
        let mut v = self.vector_of(&self.embed_f().p);
        for &d in &digits {
            v = self.apply_section_vector(&v, d)?;
        }
        let steps = (digits.len() % self.field().e() as usize) as i64;
        Ok(self.field().frobenius_pow(self.constant_term_of(&v), steps))
    }
}

pub(crate) fn digit_tuples(p: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::with_capacity((p as usize).pow(n as u32));
    let mut cur = vec![0u32; n];
    'outer: loop {
        out.push(cur.clone());
        for k in (0..n).rev() {
            if cur[k] + 1 < p {
                cur[k] += 1;
                for x in cur[k + 1..].iter_mut() {
                    *x = 0;
                }
                continue 'outer;
            }
        }
        return out;
    }
}

/// Base-p digits of a nonnegative integer, least significant first.
pub fn base_p_digits(x: &BigUint, p: u64) -> Vec<u32> {
    if p <= 256 {
        if x.is_zero() {
            return Vec::new();
        }
        return x.to_radix_le(p as u32).into_iter().map(u32::from).collect();
    }
    let mut out = Vec::new();
    let mut x = x.clone();
    let p = BigUint::from(p);
    while !x.is_zero() {
        let (q, r) = x.div_rem(&p);
        out.push(r.to_u32().expect("digit below p"));
        x = q;
    }
    out
}

/// LSD-first sequence of digit-tuple positions (lexicographic numbering), all
/// coordinates zero-padded to the longest expansion.
pub(crate) fn digit_tuple_indices(index: &[BigUint], p: u64) -> Vec<usize> {
    let expansions: Vec<Vec<u32>> = index.iter().map(|x| base_p_digits(x, p)).collect();
    let len = expansions.iter().map(Vec::len).max().unwrap_or(0);
    (0..len)
        .map(|pos| {
            expansions
                .iter()
                .fold(0usize, |acc, e| acc * p as usize + e.get(pos).copied().unwrap_or(0) as usize)
        })
        .collect()
}

/// P(t, f) / E_y(t, f) with P supported in C′.
#[derive(Clone, Debug)]
pub struct Representation {
    space: Arc<BranchSpace>,
    p: MultiPoly,
}

impl PartialEq for Representation {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.space, &other.space) && self.p == other.p
    }
}

impl Representation {
    pub fn space(&self) -> &Arc<BranchSpace> {
        &self.space
    }

    pub fn annihilator(&self) -> &MultiPoly {
        self.space.branch.annihilator()
    }

    pub fn numerator(&self) -> &MultiPoly {
        &self.p
    }

    pub fn branch(&self) -> &Branch {
        &self.space.branch
    }

    /// Coordinates over the lattice basis.
    pub fn vector(&self) -> Vec<FieldElem> {
        self.space.vector_of(&self.p)
    }

    /// The represented series to total degree `< prec`.
    pub fn series(&self, prec: usize) -> Result<TruncatedSeries> {
        let f = hensel_solve(&self.space.branch, prec)?;
        let num = self.p.eval_at_series(&f)?;
        let den = self.space.ey.eval_at_series(&f)?;
        let inv = den.inverse().ok_or(Error::SingularBranch)?;
        num.mul(&inv)
    }
}

/// Representation of the branch series itself.
pub fn embed_f(b: &Branch) -> Result<Representation> {
    Ok(BranchSpace::new(b)?.embed_f())
}

/// S_r applied to a representation: P′ = Λ_{r,p−1}(P · E^{p−1}).
pub fn apply_section_rep(rep: &Representation, r: &[u32]) -> Result<Representation> {
    let p = rep.space.section_poly(&rep.p, r)?;
    Ok(Representation { space: Arc::clone(&rep.space), p })
}

/// Constant term P(0, y0) / E_y(0, y0).
pub fn rep_constant_term(rep: &Representation) -> FieldElem {
    let s = &rep.space;
    s.field().mul(rep.p.eval_at_origin(s.branch.y0()), s.ey0_inv)
}

/// Coefficient a(index) of the branch series, indices of any size.
pub fn coeff_query(b: &Branch, index: &[BigUint]) -> Result<FieldElem> {
    BranchSpace::new(b)?.coeff(index)
}

/// Same as [`coeff_query`] on the plain section-operator chain (no matrices).
pub fn coeff_query_direct(b: &Branch, index: &[BigUint]) -> Result<FieldElem> {
    let space = BranchSpace::new(b)?;
    let p = b.field().p();
    let tuples = space.digit_tuples();
    let digits = digit_tuple_indices(index, p);
    let mut rep = space.embed_f();
    for &d in &digits {
        rep = apply_section_rep(&rep, &tuples[d])?;
    }
    let steps = (digits.len() % b.field().e() as usize) as i64;
    Ok(b.field().frobenius_pow(rep_constant_term(&rep), steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(field: &Field, n: usize, terms: &[(&[u32], i64)]) -> MultiPoly {
        MultiPoly::from_int_terms(field, n, &terms.iter().map(|(e, c)| (e.to_vec(), *c)).collect::<Vec<_>>())
            .unwrap()
    }

    fn pascal(p: u64) -> Branch {
        let f = Field::prime(p).unwrap();
        let e = poly(&f, 2, &[(&[0, 0, 1], 1), (&[1, 0, 1], -1), (&[0, 1, 1], -1), (&[0, 0, 0], -1)]);
        Branch::new(e, f.one()).unwrap()
    }

    fn big(xs: &[u64]) -> Vec<BigUint> {
        xs.iter().map(|&x| BigUint::from(x)).collect()
    }

    fn lucas(mut n: u64, mut k: u64, p: u64) -> u64 {
        let mut acc = 1;
        while n > 0 || k > 0 {
            let (a, b) = (n % p, k % p);
            if b > a {
                return 0;
            }
            acc = acc * (1..=b).fold(1, |x, i| x * (a + 1 - i) / i) % p;
            n /= p;
            k /= p;
        }
        acc
    }

    #[test]
    fn embed_examples() {
        let b = pascal(5);
        let rep = embed_f(&b).unwrap();
        let f = b.field();
        assert_eq!(rep.numerator(), &poly(f, 2, &[(&[0, 0, 1], 1), (&[1, 0, 1], -1), (&[0, 1, 1], -1)]));
        assert_eq!(rep_constant_term(&rep), f.one());
        assert!(rep.series(12).unwrap().agrees_with(&hensel_solve(&b, 12).unwrap(), 12));

        let f3 = Field::prime(3).unwrap();
        let e = poly(&f3, 1, &[(&[1, 2], 1), (&[0, 1], -1), (&[0, 0], 1)]);
        let b = Branch::new(e, f3.one()).unwrap();
        let rep = embed_f(&b).unwrap();
        assert_eq!(rep.numerator(), &poly(&f3, 1, &[(&[1, 2], 2), (&[0, 1], -1)]));
        assert!(rep.series(12).unwrap().agrees_with(&hensel_solve(&b, 12).unwrap(), 12));
    }

    #[test]
    fn section_of_pascal_matches_series() {
        let b = pascal(2);
        let rep = embed_f(&b).unwrap();
        let f = hensel_solve(&b, 16).unwrap();
        for r in [[0, 0], [1, 0], [0, 1], [1, 1]] {
            let s = apply_section_rep(&rep, &r).unwrap();
            let want = f.section(&r);
            assert!(s.series(want.prec()).unwrap().agrees_with(&want, want.prec()), "r = {r:?}");
        }
    }

    #[test]
    fn constant_representation_sections() {
        // E = y^2 - y + t over F_3: the support of E_y lies in C′, so P = E_y denotes 1
        let f3 = Field::prime(3).unwrap();
        let e = poly(&f3, 1, &[(&[0, 2], 1), (&[0, 1], -1), (&[1, 0], 1)]);
        let b = Branch::new(e, f3.zero()).unwrap();
        let space = BranchSpace::new(&b).unwrap();
        let one = space.representation(space.ey.clone()).unwrap();
        assert_eq!(rep_constant_term(&one), f3.one());
        for r in space.digit_tuples() {
            let s = apply_section_rep(&one, &r).unwrap();
            let c = if r == [0] { 1 } else { 0 };
            assert_eq!(s.series(10).unwrap(), TruncatedSeries::constant(&f3, 1, 10, f3.from_int(c)));
        }
        let zero = space.representation(MultiPoly::zero(&f3, 1)).unwrap();
        assert!(rep_constant_term(&zero).is_zero());
        // for Pascal, E_y = 1 - t1 - t2 pokes out of C′
        let pascal = BranchSpace::new(&pascal(3)).unwrap();
        assert!(pascal.representation(pascal.ey.clone()).is_err());
    }

    #[test]
    fn fixed_point_of_zero_digit() {
        let f2 = Field::prime(2).unwrap();
        let e = poly(&f2, 1, &[(&[0, 2], 1), (&[0, 1], 1), (&[1, 0], 1)]);
        let b = Branch::new(e, f2.zero()).unwrap();
        let rep = embed_f(&b).unwrap();
        let s = apply_section_rep(&rep, &[0]).unwrap();
        assert_eq!(s.series(40).unwrap(), rep.series(40).unwrap());
    }

    #[test]
    fn escaping_support_is_reported() {
        let b = pascal(3);
        let space = BranchSpace::new(&b).unwrap();
        let outside = MultiPoly::monomial(b.field(), 2, vec![2, 0, 0], b.field().one());
        assert!(matches!(space.representation(outside), Err(Error::SupportEscape { .. })));
    }

    #[test]
    fn pascal_queries_follow_lucas() {
        let b = pascal(2);
        assert!(coeff_query(&b, &big(&[3, 5])).unwrap().is_zero());
        assert_eq!(coeff_query(&b, &big(&[2, 5])).unwrap(), b.field().one());
        assert_eq!(coeff_query(&b, &big(&[0, 0])).unwrap(), b.y0());
        let space = BranchSpace::new(&b).unwrap();
        for i in 0..40u64 {
            for j in 0..40u64 {
                let got = space.coeff(&big(&[i, j])).unwrap().packed();
                assert_eq!(got, lucas(i + j, i, 2), "({i}, {j})");
            }
        }
        let b = pascal(7);
        let space = BranchSpace::new(&b).unwrap();
        for (i, j) in [(3, 5), (48, 100), (342, 1000), (6, 0)] {
            assert_eq!(space.coeff(&big(&[i, j])).unwrap().packed(), lucas(i + j, i, 7));
        }
    }

    #[test]
    fn index_width_is_checked() {
        let space = BranchSpace::new(&pascal(2)).unwrap();
        assert!(matches!(space.coeff(&big(&[1])), Err(Error::MalformedInput(_))));
    }

    #[test]
    fn digits() {
        assert_eq!(base_p_digits(&BigUint::from(10u32), 3), vec![1, 0, 1]);
        assert_eq!(base_p_digits(&BigUint::from(0u32), 3), Vec::<u32>::new());
        assert_eq!(base_p_digits(&BigUint::from(1000u32), 257), vec![1000 % 257, 3]);
        assert_eq!(digit_tuple_indices(&big(&[3, 5]), 2), vec![0b11, 0b10, 0b01]);
        assert_eq!(digit_tuples(2, 2), vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    fn extension_branch() -> Branch {
        // y^2 + y + ω t over F_4 with root y0 = 0 (and y0 = 1)
        let f4 = Field::new(2, 2, Some(&[1, 1, 1])).unwrap();
        let w = f4.from_coeffs(&[0, 1]).unwrap();
        let e = MultiPoly::from_terms(
            &f4,
            1,
            vec![(vec![0, 2], f4.one()), (vec![0, 1], f4.one()), (vec![1, 0], w)],
        )
        .unwrap();
        Branch::new(e, f4.zero()).unwrap()
    }

    #[test]
    fn extension_field_queries_apply_frobenius() {
        let b = extension_branch();
        let f = hensel_solve(&b, 70).unwrap();
        let space = BranchSpace::new(&b).unwrap();
        for i in 0..70u64 {
            let want = f.coeff(&[i as u32]);
            assert_eq!(space.coeff(&big(&[i])).unwrap(), want, "i = {i}");
            assert_eq!(coeff_query_direct(&b, &big(&[i])).unwrap(), want);
        }
    }

    #[test]
    fn matrix_and_direct_paths_agree() {
        let b = pascal(3);
        for idx in [[0u64, 0], [1, 2], [26, 80], [1000, 7], [12345, 54321]] {
            assert_eq!(
                coeff_query(&b, &big(&idx)).unwrap(),
                coeff_query_direct(&b, &big(&idx)).unwrap()
            );
        }
    }

    #[test]
    fn sections_commute_with_series() {
        let f3 = Field::prime(3).unwrap();
        let branches = vec![
            pascal(2),
            pascal(3),
            Branch::new(poly(&f3, 2, &[(&[1, 1, 2], 1), (&[0, 0, 1], -1), (&[0, 0, 0], 1)]), f3.one()).unwrap(),
            Branch::new(poly(&f3, 1, &[(&[0, 2], 1), (&[0, 1], -1), (&[1, 0], 1), (&[2, 1], 1)]), f3.zero()).unwrap(),
            extension_branch(),
        ];
        for b in branches {
            let space = BranchSpace::new(&b).unwrap();
            let f = hensel_solve(&b, 30).unwrap();
            let rep = space.embed_f();
            for r in space.digit_tuples() {
                let once = apply_section_rep(&rep, &r).unwrap();
                let want = f.section(&r);
                assert!(once.series(want.prec()).unwrap().agrees_with(&want, want.prec()));
                for r2 in space.digit_tuples() {
                    let twice = apply_section_rep(&once, &r2).unwrap();
                    let want2 = want.section(&r2);
                    assert!(twice.series(want2.prec()).unwrap().agrees_with(&want2, want2.prec()));
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn section_is_semilinear(seed in prop::collection::vec(0u64..4, 0..6), r in 0u32..4) {
            let b = extension_branch();
            let f = b.field().clone();
            let space = BranchSpace::new(&b).unwrap();
            let v: Vec<FieldElem> = (0..space.dim()).map(|k| f.element(seed.get(k).copied().unwrap_or(1))).collect();
            let c = f.element(seed.first().copied().unwrap_or(2));
            let rep = space.from_vector(&v);
            let scaled = space.from_vector(&v.iter().map(|&x| f.mul(f.frobenius(c), x)).collect::<Vec<_>>());
            let r = [r % 2];
            let a = apply_section_rep(&rep, &r).unwrap();
            let s = apply_section_rep(&scaled, &r).unwrap();
            prop_assert_eq!(s.numerator(), &a.numerator().scale(c));
        }
    }
}
