//! Exact Newton polytopes and the lattice-point counts that bound the
//! section-operator state space and the p-degree of diagonal annihilators.
//!
//! Hulls are computed by brute-force facet enumeration over support subsets
//! with exact integer arithmetic. Feasibility questions with half-open
//! boundaries go through Fourier–Motzkin elimination with strictness flags;
//! nothing here touches floating point.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{DegreeProfile, MultiPoly};

/// `normal · x <= offset`, or `<` when `strict`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: Vec<i64>,
    pub offset: i64,
    pub strict: bool,
}

impl Halfspace {
    fn holds(&self, x: &[i64]) -> bool {
        let v: i128 = self.normal.iter().zip(x).map(|(a, b)| *a as i128 * *b as i128).sum();
        if self.strict {
            v < self.offset as i128
        } else {
            v <= self.offset as i128
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NewtonPolytope {
    dim: usize,
    affine_dim: usize,
    vertices: Vec<Vec<i64>>,
    halfspaces: Vec<Halfspace>,
}

// ---------------------------------------------------------------------------
// exact integer linear algebra helpers

fn det_bareiss(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    if n == 0 {
        return 1;
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Vector orthogonal to the m-1 given rows in Z^m (zero when they are dependent).
fn cross_product(rows: &[Vec<i64>], m: usize) -> Vec<i64> {
    debug_assert_eq!(rows.len(), m - 1);
    let mut out = Vec::with_capacity(m);
    for j in 0..m {
        let minor: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| (0..m).filter(|&c| c != j).map(|c| r[c] as i128).collect())
            .collect();
        let d = det_bareiss(minor);
        let d = if j % 2 == 0 { d } else { -d };
        out.push(i64::try_from(d).expect("normal vector overflow"));
    }
    primitive(out)
}

fn primitive(v: Vec<i64>) -> Vec<i64> {
    let g = v.iter().fold(0i64, |acc, &x| acc.gcd(&x));
    if g <= 1 {
        v
    } else {
        v.into_iter().map(|x| x / g).collect()
    }
}

fn dot(a: &[i64], b: &[i64]) -> i64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Row-reduces integer rows (fraction-free) and returns (rank, nullspace basis).
fn rank_and_nullspace(rows: &[Vec<i64>], m: usize) -> (usize, Vec<Vec<i64>>) {
    let mut a: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..m {
        let Some(pr) = (r..a.len()).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, pr);
        for i in 0..a.len() {
            if i != r && a[i][c] != 0 {
                let (x, y) = (a[r][c], a[i][c]);
                let pivot = a[r].clone();
                for (v, &w) in a[i].iter_mut().zip(&pivot) {
                    *v = *v * x - w * y;
                }
                let g = a[i].iter().fold(0i128, |acc, &v| acc.gcd(&v));
                if g > 1 {
                    for v in a[i].iter_mut() {
                        *v /= g;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == a.len() {
            break;
        }
    }
    let rank = pivots.len();
    let mut basis = Vec::new();
    for free in (0..m).filter(|c| !pivots.contains(c)) {
        // x_free = L, x_pivot = -a[row][free] * L / a[row][pivot], L = lcm of pivots
        let l = pivots.iter().enumerate().fold(1i128, |acc, (row, &pc)| acc.lcm(&a[row][pc].abs()));
        let mut v = vec![0i128; m];
        v[free] = l;
        for (row, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[row][free] * l / a[row][pc];
        }
        basis.push(primitive(v.into_iter().map(|x| i64::try_from(x).unwrap()).collect()));
    }
    (rank, basis)
}

fn combinations(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

// ---------------------------------------------------------------------------
// Fourier–Motzkin elimination

/// `coeffs · x <= rhs`, strict when `strict`.
#[derive(Clone, Debug)]
struct Ineq {
    coeffs: Vec<BigInt>,
    rhs: BigInt,
    strict: bool,
}

impl Ineq {
    fn new(coeffs: Vec<i64>, rhs: i64, strict: bool) -> Ineq {
        Ineq { coeffs: coeffs.into_iter().map(BigInt::from).collect(), rhs: BigInt::from(rhs), strict }
    }
}

/// Decides whether a system of (possibly strict) linear inequalities has a real solution.
///
/// Strict rows become `c·x + ε <= d` with an extra variable ε <= 1, and the
/// system is feasible iff some ε > 0 is admissible. The rest of the
/// elimination is non-strict, which lets Chernikov's rule drop combinations:
/// after k eliminations a row built from more than k + 1 originals is implied
/// by the others.
fn fm_feasible(rows: Vec<Ineq>, nvars: usize) -> bool {
    let mut eps_bound = vec![BigInt::zero(); nvars];
    eps_bound.push(BigInt::one());
    let mut sys: Vec<FmRow> = rows
        .into_iter()
        .map(|r| {
            let mut coeffs = r.coeffs;
            coeffs.push(if r.strict { BigInt::one() } else { BigInt::zero() });
            (coeffs, r.rhs)
        })
        .chain(std::iter::once((eps_bound, BigInt::one())))
        .enumerate()
        .map(|(i, (coeffs, rhs))| FmRow { coeffs, rhs, hist: if i < 128 { 1u128 << i } else { 0 } })
        .collect();
    // histories only fit in 128 bits; larger systems skip the pruning
    let prune = sys.len() <= 128;
    for var in 0..nvars {
        let limit = var as u32 + 2;
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut rest: BTreeMap<Vec<BigInt>, (BigInt, u128)> = BTreeMap::new();
        let mut keep = |r: FmRow| -> bool {
            let r = r.normalized();
            if r.coeffs.iter().all(|c| c.is_zero()) {
                return !r.rhs.is_negative();
            }
            match rest.get_mut(&r.coeffs) {
                Some(slot) => {
                    let better = r.rhs < slot.0 || (r.rhs == slot.0 && r.hist.count_ones() < slot.1.count_ones());
                    if better {
                        *slot = (r.rhs, r.hist);
                    }
                }
                None => {
                    rest.insert(r.coeffs, (r.rhs, r.hist));
                }
            }
            true
        };
        for r in sys {
            match r.coeffs[var].sign() {
                num_bigint::Sign::Plus => pos.push(r),
                num_bigint::Sign::Minus => neg.push(r),
                num_bigint::Sign::NoSign => {
                    if !keep(r) {
                        return false;
                    }
                }
            }
        }
        for pr in &pos {
            for nr in &neg {
                let hist = pr.hist | nr.hist;
                if prune && hist.count_ones() > limit {
                    continue;
                }
                let a = &pr.coeffs[var];
                let b = -&nr.coeffs[var];
                let coeffs = pr.coeffs.iter().zip(&nr.coeffs).map(|(x, y)| x * &b + y * a).collect();
                if !keep(FmRow { coeffs, rhs: &pr.rhs * &b + &nr.rhs * a, hist }) {
                    return false;
                }
            }
        }
        sys = rest.into_iter().map(|(coeffs, (rhs, hist))| FmRow { coeffs, rhs, hist }).collect();
    }
    // what is left reads α ε <= β
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for r in sys {
        let (alpha, beta) = (&r.coeffs[nvars], r.rhs);
        match alpha.sign() {
            num_bigint::Sign::Plus if !beta.is_positive() => return false,
            num_bigint::Sign::Plus => upper.push((alpha.clone(), beta)),
            num_bigint::Sign::Minus => lower.push((-alpha, -beta)),
            num_bigint::Sign::NoSign if beta.is_negative() => return false,
            num_bigint::Sign::NoSign => {}
        }
    }
    // ε >= l/a' and ε <= u/a for every pair
    upper.iter().all(|(a, u)| lower.iter().all(|(al, l)| l * a <= u * al))
}

/// A non-strict row of [`fm_feasible`] with the set of original rows it came from.
struct FmRow {
    coeffs: Vec<BigInt>,
    rhs: BigInt,
    hist: u128,
}

impl FmRow {
    fn normalized(mut self) -> FmRow {
        let g = self.coeffs.iter().fold(self.rhs.abs(), |acc, c| acc.gcd(c));
        if !g.is_zero() && !g.is_one() {
            for c in self.coeffs.iter_mut() {
                *c /= &g;
            }
            self.rhs /= &g;
        }
        self
    }
}

// ---------------------------------------------------------------------------

impl NewtonPolytope {
    /// Convex hull of a nonempty finite point set.
    pub fn from_points(points: &[Vec<i64>]) -> NewtonPolytope {
        assert!(!points.is_empty(), "hull of an empty set");
        let m = points[0].len();
        let pts: Vec<Vec<i64>> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        let base = pts[0].clone();
        let diffs: Vec<Vec<i64>> =
            pts[1..].iter().map(|p| p.iter().zip(&base).map(|(a, b)| a - b).collect()).collect();
        let (k, eq_normals) = rank_and_nullspace(&diffs, m);
        let mut halfspaces = BTreeSet::new();
        for a in &eq_normals {
            let c = dot(a, &base);
            halfspaces.insert(Halfspace { normal: a.clone(), offset: c, strict: false });
            halfspaces.insert(Halfspace { normal: a.iter().map(|x| -x).collect(), offset: -c, strict: false });
        }
        if k == 0 {
            return NewtonPolytope { dim: m, affine_dim: 0, vertices: vec![base], halfspaces: halfspaces.into_iter().collect() };
        }
        let mut facets: BTreeSet<(Vec<i64>, i64)> = BTreeSet::new();
        combinations(pts.len(), k, |subset| {
            let s0 = &pts[subset[0]];
            let mut rows: Vec<Vec<i64>> = subset[1..]
                .iter()
                .map(|&i| pts[i].iter().zip(s0).map(|(a, b)| a - b).collect())
                .collect();
            rows.extend(eq_normals.iter().cloned());
            let c = cross_product(&rows, m);
            if c.iter().all(|&x| x == 0) {
                return;
            }
            let level = dot(&c, s0);
            let vals: Vec<i64> = pts.iter().map(|p| dot(&c, p)).collect();
            if vals.iter().all(|&v| v <= level) {
                facets.insert((c, level));
            } else if vals.iter().all(|&v| v >= level) {
                facets.insert((c.iter().map(|x| -x).collect(), -level));
            }
        });
        let vertices: Vec<Vec<i64>> = pts
            .iter()
            .filter(|p| {
                let tight: Vec<Vec<i64>> =
                    facets.iter().filter(|(a, c)| dot(a, p) == *c).map(|(a, _)| a.clone()).collect();
                rank_and_nullspace(&tight, m).0 == k
            })
            .cloned()
            .collect();
        for (normal, offset) in facets {
            halfspaces.insert(Halfspace { normal, offset, strict: false });
        }
        NewtonPolytope { dim: m, affine_dim: k, vertices, halfspaces: halfspaces.into_iter().collect() }
    }

    /// Ambient dimension n + 1.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        self.affine_dim
    }

    /// Extreme points, sorted lexicographically.
    pub fn vertices(&self) -> &[Vec<i64>] {
        &self.vertices
    }

    /// Inequalities cutting out the polytope (equalities appear as opposite pairs).
    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn contains(&self, x: &[i64]) -> bool {
        self.halfspaces.iter().all(|h| h.holds(x))
    }

    fn max_coords(&self) -> Vec<i64> {
        (0..self.dim).map(|k| self.vertices.iter().map(|v| v[k]).max().unwrap()).collect()
    }

    fn min_coords(&self) -> Vec<i64> {
        (0..self.dim).map(|k| self.vertices.iter().map(|v| v[k]).min().unwrap()).collect()
    }

    fn hull_rows(&self, nvars: usize) -> Vec<Ineq> {
        self.halfspaces
            .iter()
            .map(|h| {
                let mut c = h.normal.clone();
                c.resize(nvars, 0);
                Ineq::new(c, h.offset, false)
            })
            .collect()
    }

    /// Whether the half-open unit box z + [0,1)^m meets the polytope, i.e.
    /// whether z lies in the polytope plus (-1,0]^m.
    pub fn box_meets(&self, z: &[i64]) -> bool {
        let m = self.dim;
        if self.contains(z) {
            return true;
        }
        // each constraint must be satisfiable on the box on its own
        for h in &self.halfspaces {
            let base: i64 = dot(&h.normal, z);
            let neg: i64 = h.normal.iter().filter(|&&a| a < 0).sum();
            let ok = if neg == 0 { base <= h.offset } else { base + neg < h.offset };
            if !ok {
                return false;
            }
        }
        let mut rows = self.hull_rows(m);
        for k in 0..m {
            let mut lo = vec![0; m];
            lo[k] = -1;
            rows.push(Ineq::new(lo, -z[k], false));
            let mut hi = vec![0; m];
            hi[k] = 1;
            rows.push(Ineq::new(hi, z[k] + 1, true));
        }
        fm_feasible(rows, m)
    }

    /// Whether (a - λ(1,...,1), y) lies in the polytope for some real λ and some y in [b, b+1).
    pub fn diagonal_class_meets(&self, a: &[i64], b: i64) -> bool {
        // variables: (λ, y)
        let n = self.dim - 1;
        let mut rows: Vec<Ineq> = self
            .halfspaces
            .iter()
            .map(|h| {
                let wsum: i64 = h.normal[..n].iter().sum();
                let shift: i64 = h.normal[..n].iter().zip(a).map(|(w, x)| w * x).sum();
                Ineq::new(vec![-wsum, h.normal[n]], h.offset - shift, false)
            })
            .collect();
        rows.push(Ineq::new(vec![0, -1], -b, false));
        rows.push(Ineq::new(vec![0, 1], b + 1, true));
        fm_feasible(rows, 2)
    }

    /// Lattice points of the polytope plus (-1,0]^m, in lexicographic order.
    pub fn fattened_lattice_points(&self) -> Vec<Vec<i64>> {
        let lo: Vec<i64> = self.min_coords().into_iter().map(|x| x.max(0)).collect();
        let hi = self.max_coords();
        let mut candidates = Vec::new();
        let mut cur = lo.clone();
        'outer: loop {
            candidates.push(cur.clone());
            for k in (0..self.dim).rev() {
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    cur[k + 1..].copy_from_slice(&lo[k + 1..]);
                    continue 'outer;
                }
            }
            break;
        }
        candidates.into_par_iter().filter(|z| self.box_meets(z)).collect()
    }
}

fn support_points(a: &MultiPoly) -> Result<Vec<Vec<i64>>> {
    if a.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    Ok(a.support().map(|m| m.as_slice().iter().map(|&e| e as i64).collect()).collect())
}

/// Newton polytope of the support of `a` in R^{n+1}.
pub fn newton_polytope(a: &MultiPoly) -> Result<NewtonPolytope> {
    Ok(NewtonPolytope::from_points(&support_points(a)?))
}

/// Lattice points z of NP(a) + (-1,0]^{n+1}, lexicographically sorted.
pub fn box_lattice_points(a: &MultiPoly) -> Result<Vec<Vec<u32>>> {
    let np = newton_polytope(a)?;
    Ok(np
        .fattened_lattice_points()
        .into_iter()
        .map(|z| z.into_iter().map(|x| x as u32).collect())
        .collect())
}

/// Card(C ∩ N^{n+1}) for C = NP(a) + (-1,0]^{n+1}.
pub fn count_box_points(a: &MultiPoly) -> Result<u64> {
    Ok(box_lattice_points(a)?.len() as u64)
}

/// Canonical representatives (a, b) of the classes π_G(C ∩ N^{n+1}) for
/// G = Z(1,...,1) and C = NP(A) + (G_R × (-1,0]).
pub fn diagonal_class_representatives(a: &MultiPoly) -> Result<Vec<Vec<u32>>> {
    let np = newton_polytope(a)?;
    let profile = a.degree_profile()?;
    let n = a.nvars();
    let mut candidates = Vec::new();
    let mut cur = vec![0u32; n];
    'outer: loop {
        if n == 0 || cur.contains(&0) {
            for b in 0..=profile.d {
                let mut c = cur.clone();
                c.push(b);
                candidates.push(c);
            }
        }
        for k in (0..n).rev() {
            if cur[k] < profile.hvec[k] {
                cur[k] += 1;
                cur[k + 1..].fill(0);
                continue 'outer;
            }
        }
        break;
    }
    Ok(candidates
        .into_par_iter()
        .filter(|c| {
            let a: Vec<i64> = c[..n].iter().map(|&x| x as i64).collect();
            np.diagonal_class_meets(&a, c[n] as i64)
        })
        .collect())
}

/// Card(π_G(C ∩ N^{n+1})) for the full diagonal group.
pub fn count_diagonal_classes(a: &MultiPoly) -> Result<u64> {
    Ok(diagonal_class_representatives(a)?.len() as u64)
}

fn binomial(a: u64, b: u64) -> u128 {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    (0..b).fold(1u128, |acc, i| acc * (a - i) as u128 / (i + 1) as u128)
}

/// (d+1) · min(Π(h_i+1) − Πh_i, C(n+h, n) − C(h, n)).
pub fn bound_closed_form(dp: &DegreeProfile, n: usize) -> u64 {
    let prod_plus: u128 = dp.hvec.iter().map(|&h| h as u128 + 1).product();
    let prod: u128 = dp.hvec.iter().map(|&h| h as u128).product();
    let box_count = prod_plus - prod;
    let simplex_count = binomial(n as u64 + dp.h as u64, n as u64) - binomial(dp.h as u64, n as u64);
    let n = (dp.d as u128 + 1) * box_count.min(simplex_count);
    u64::try_from(n).expect("bound overflow")
}

/// Which bound `N_effective` should report.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundTask {
    /// p-degree bound for annihilators of the diagonal.
    #[default]
    Diagonal,
    /// Dimension bound for the section-operator state space.
    Christol,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundReport {
    #[serde(rename = "N_closed")]
    pub n_closed: u64,
    #[serde(rename = "N_box")]
    pub n_box: u64,
    #[serde(rename = "N_diag")]
    pub n_diag: u64,
    #[serde(rename = "N_effective")]
    pub n_effective: u64,
}

impl BoundReport {
    pub fn effective_for(&self, task: BoundTask) -> u64 {
        match task {
            BoundTask::Diagonal => self.n_closed.min(self.n_diag),
            BoundTask::Christol => self.n_box,
        }
    }
}

/// All bounds for `a`, with `N_effective` chosen for the diagonal task.
pub fn bound_report(a: &MultiPoly) -> Result<BoundReport> {
    bound_report_for(a, BoundTask::Diagonal)
}

pub fn bound_report_for(a: &MultiPoly, task: BoundTask) -> Result<BoundReport> {
    let dp = a.degree_profile()?;
    let mut report = BoundReport {
        n_closed: bound_closed_form(&dp, a.nvars()),
        n_box: count_box_points(a)?,
        n_diag: count_diagonal_classes(a)?,
        n_effective: 0,
    };
    report.n_effective = report.effective_for(task);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use proptest::prelude::*;

    fn poly(p: u64, n: usize, terms: &[(&[u32], i64)]) -> MultiPoly {
        let f = Field::prime(p).unwrap();
        MultiPoly::from_int_terms(&f, n, &terms.iter().map(|(e, c)| (e.to_vec(), *c)).collect::<Vec<_>>())
            .unwrap()
    }

    fn pascal(p: u64) -> MultiPoly {
        poly(p, 2, &[(&[0, 0, 1], 1), (&[1, 0, 1], -1), (&[0, 1, 1], -1), (&[0, 0, 0], -1)])
    }

    fn catalan(p: u64) -> MultiPoly {
        poly(p, 2, &[(&[1, 1, 2], 1), (&[0, 0, 1], -1), (&[0, 0, 0], 1)])
    }

    #[test]
    fn hull_examples() {
        let np = newton_polytope(&pascal(5)).unwrap();
        assert_eq!(np.vertices(), &[vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1], vec![1, 0, 1]]);
        assert_eq!(np.affine_dim(), 3);
        let np = newton_polytope(&catalan(5)).unwrap();
        assert_eq!(np.vertices(), &[vec![0, 0, 0], vec![0, 0, 1], vec![1, 1, 2]]);
        assert_eq!(np.affine_dim(), 2);
        let np = newton_polytope(&poly(3, 2, &[(&[0, 0, 0], 2)])).unwrap();
        assert_eq!(np.vertices(), &[vec![0, 0, 0]]);
        assert!(matches!(newton_polytope(&MultiPoly::zero(&Field::prime(3).unwrap(), 1)), Err(Error::ZeroPolynomial)));
    }

    #[test]
    fn hull_drops_interior_and_edge_points() {
        // square with its center and an edge midpoint, embedded in y = 0
        let pts = vec![
            vec![0, 0, 0],
            vec![2, 0, 0],
            vec![0, 2, 0],
            vec![2, 2, 0],
            vec![1, 1, 0],
            vec![1, 0, 0],
        ];
        let np = NewtonPolytope::from_points(&pts);
        assert_eq!(np.vertices(), &[vec![0, 0, 0], vec![0, 2, 0], vec![2, 0, 0], vec![2, 2, 0]]);
        assert_eq!(np.affine_dim(), 2);
        assert!(np.contains(&[1, 1, 0]));
        assert!(!np.contains(&[1, 1, 1]));
        assert!(!np.contains(&[3, 0, 0]));
        // segment
        let seg = NewtonPolytope::from_points(&[vec![0, 0], vec![1, 1], vec![3, 3]]);
        assert_eq!(seg.vertices(), &[vec![0, 0], vec![3, 3]]);
    }

    #[test]
    fn box_counts() {
        assert_eq!(
            box_lattice_points(&pascal(7)).unwrap(),
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1], vec![1, 0, 1]]
        );
        assert_eq!(count_box_points(&catalan(7)).unwrap(), 3);
        assert_eq!(count_box_points(&poly(3, 2, &[(&[0, 0, 0], 1)])).unwrap(), 1);
    }

    #[test]
    fn diagonal_class_counts() {
        assert_eq!(
            diagonal_class_representatives(&pascal(5)).unwrap(),
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 1, 1], vec![1, 0, 1]]
        );
        assert_eq!(count_diagonal_classes(&poly(5, 1, &[(&[0, 1], 1), (&[0, 0], -3)])).unwrap(), 2);
    }

    #[test]
    fn closed_form() {
        let dp = DegreeProfile { d: 1, h: 1, hvec: vec![1, 1] };
        assert_eq!(bound_closed_form(&dp, 2), 6);
        let dp = DegreeProfile { d: 2, h: 2, hvec: vec![1, 1] };
        assert_eq!(bound_closed_form(&dp, 2), 9);
        for d in 0..5 {
            let dp = DegreeProfile { d, h: 0, hvec: vec![0, 0, 0] };
            assert_eq!(bound_closed_form(&dp, 3), d as u64 + 1);
        }
    }

    #[test]
    fn reports() {
        let r = bound_report(&pascal(3)).unwrap();
        assert_eq!(r, BoundReport { n_closed: 6, n_box: 4, n_diag: 4, n_effective: 4 });
        let r = bound_report_for(&catalan(3), BoundTask::Christol).unwrap();
        assert_eq!((r.n_closed, r.n_box, r.n_effective), (9, 3, 3));
        let r = bound_report(&poly(3, 2, &[(&[0, 0, 1], 1)])).unwrap();
        assert_eq!((r.n_closed, r.n_box), (2, 1));
    }

    #[test]
    fn fm_strictness() {
        // x >= 0, x < 0 is infeasible; x >= 0, x <= 0 is feasible
        let a = vec![Ineq::new(vec![-1], 0, false), Ineq::new(vec![1], 0, true)];
        assert!(!fm_feasible(a, 1));
        let b = vec![Ineq::new(vec![-1], 0, false), Ineq::new(vec![1], 0, false)];
        assert!(fm_feasible(b, 1));
        // x + y < 1, x >= 1, y >= 0
        let c = vec![
            Ineq::new(vec![1, 1], 1, true),
            Ineq::new(vec![-1, 0], -1, false),
            Ineq::new(vec![0, -1], 0, false),
        ];
        assert!(!fm_feasible(c, 2));
    }

    /// Plain elimination with strict flags and no pruning.
    fn fm_reference(mut rows: Vec<Ineq>, nvars: usize) -> bool {
        let holds = |r: &Ineq| if r.strict { r.rhs.is_positive() } else { !r.rhs.is_negative() };
        for var in (0..nvars).rev() {
            let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
            for r in rows {
                match r.coeffs[var].sign() {
                    num_bigint::Sign::Plus => pos.push(r),
                    num_bigint::Sign::Minus => neg.push(r),
                    num_bigint::Sign::NoSign => rest.push(r),
                }
            }
            for pr in &pos {
                for nr in &neg {
                    let a = &pr.coeffs[var];
                    let b = -&nr.coeffs[var];
                    rest.push(Ineq {
                        coeffs: pr.coeffs.iter().zip(&nr.coeffs).map(|(x, y)| x * &b + y * a).collect(),
                        rhs: &pr.rhs * &b + &nr.rhs * a,
                        strict: pr.strict || nr.strict,
                    });
                }
            }
            rows = rest;
        }
        rows.iter().all(holds)
    }

    fn arb_system() -> impl Strategy<Value = (Vec<Ineq>, usize)> {
        (1usize..=3).prop_flat_map(|n| {
            let row = (prop::collection::vec(-3i64..=3, n), -4i64..=4, any::<bool>())
                .prop_map(|(c, r, strict)| Ineq::new(c, r, strict));
            (prop::collection::vec(row, 1..9), Just(n))
        })
    }

    fn arb_poly() -> impl Strategy<Value = MultiPoly> {
        (1usize..=3).prop_flat_map(|n| {
            prop::collection::vec((prop::collection::vec(0u32..=3, n + 1), 1i64..5), 1..7)
                .prop_map(move |terms| MultiPoly::from_int_terms(&Field::prime(5).unwrap(), n, &terms).unwrap())
        })
        .prop_filter("nonzero", |a| !a.is_zero())
    }

    fn points(a: &MultiPoly) -> Vec<Vec<i64>> {
        support_points(a).unwrap()
    }

    /// Convex combinations of the support with weights in (1/den)Z.
    fn sampled_hull(pts: &[Vec<i64>], den: i64) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut weights = vec![0i64; pts.len()];
        fn rec(i: usize, left: i64, w: &mut Vec<i64>, pts: &[Vec<i64>], out: &mut Vec<Vec<i64>>) {
            if i + 1 == pts.len() {
                w[i] = left;
                let m = pts[0].len();
                out.push((0..m).map(|k| w.iter().zip(pts).map(|(a, p)| a * p[k]).sum()).collect());
                return;
            }
            for x in 0..=left {
                w[i] = x;
                rec(i + 1, left - x, w, pts, out);
            }
        }
        rec(0, den, &mut weights, pts, &mut out);
        out
    }

    #[test]
    fn catalan_diagonal_classes() {
        // NP is the triangle (0,0,0), (0,0,1), (1,1,2): only a = (0,0) survives,
        // and y sweeps [0, 2].
        assert_eq!(
            diagonal_class_representatives(&catalan(5)).unwrap(),
            vec![vec![0, 0, 0], vec![0, 0, 1], vec![0, 0, 2]]
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pruned_elimination_matches_plain((rows, n) in arb_system()) {
            prop_assert_eq!(fm_feasible(rows.clone(), n), fm_reference(rows, n));
        }

        #[test]
        fn vertices_and_halfspaces_agree(a in arb_poly()) {
            let np = newton_polytope(&a).unwrap();
            let pts = points(&a);
            for p in &pts {
                prop_assert!(np.contains(p));
            }
            for v in np.vertices() {
                prop_assert!(pts.contains(v));
            }
            for h in np.halfspaces() {
                prop_assert!(np.vertices().iter().any(|v| dot(&h.normal, v) == h.offset));
            }
            // rebuilding from the vertices alone gives the same polytope
            prop_assert_eq!(NewtonPolytope::from_points(np.vertices()), np.clone());
        }

        #[test]
        fn minkowski_law(a in arb_poly(), b in arb_poly()) {
            prop_assume!(a.nvars() == b.nvars());
            let prod = a.mul(&b).unwrap();
            prop_assume!(!prod.is_zero());
            let (na, nb) = (newton_polytope(&a).unwrap(), newton_polytope(&b).unwrap());
            let sums: Vec<Vec<i64>> = na
                .vertices()
                .iter()
                .flat_map(|u| nb.vertices().iter().map(move |v| u.iter().zip(v).map(|(x, y)| x + y).collect()))
                .collect();
            let expected = NewtonPolytope::from_points(&sums);
            prop_assert_eq!(newton_polytope(&prod).unwrap(), expected);
        }

        #[test]
        fn box_points_cover_sampled_hull(a in arb_poly()) {
            prop_assume!(a.len() <= 4);
            let lattice = box_lattice_points(&a).unwrap();
            let pts = points(&a);
            let den = 6;
            for x in sampled_hull(&pts, den) {
                // floor(x / den) is a lattice point whose unit box contains x / den
                let z: Vec<u32> = x.iter().map(|c| c.div_euclid(den) as u32).collect();
                prop_assert!(lattice.contains(&z));
            }
            // every support point is its own box corner
            for p in &pts {
                let z: Vec<u32> = p.iter().map(|&c| c as u32).collect();
                prop_assert!(lattice.contains(&z));
            }
        }

        #[test]
        fn diagonal_classes_below_closed_form(a in arb_poly()) {
            let r = bound_report(&a).unwrap();
            prop_assert!(r.n_diag <= r.n_closed);
            prop_assert_eq!(r.n_effective, r.n_diag.min(r.n_closed));
        }

        #[test]
        fn counts_invariant_under_axis_permutation(a in arb_poly(), seed in 0usize..6) {
            let n = a.nvars();
            let mut perm: Vec<usize> = (0..n).collect();
            perm.rotate_left(seed % n);
            if seed >= 3 {
                perm.reverse();
            }
            let b = a.permute_t(&perm);
            prop_assert_eq!(count_box_points(&a).unwrap(), count_box_points(&b).unwrap());
            prop_assert_eq!(count_diagonal_classes(&a).unwrap(), count_diagonal_classes(&b).unwrap());
            prop_assert_eq!(
                bound_closed_form(&a.degree_profile().unwrap(), n),
                bound_closed_form(&b.degree_profile().unwrap(), n)
            );
        }

        #[test]
        fn diagonal_classes_stable_under_diagonal_shift(a in arb_poly(), k in 1u32..3) {
            let mut e = vec![k; a.nvars()];
            e.push(0);
            let b = a.shift(&e);
            prop_assert_eq!(count_diagonal_classes(&a).unwrap(), count_diagonal_classes(&b).unwrap());
            // a general shift translates the lattice set
            prop_assert_eq!(count_box_points(&a).unwrap(), count_box_points(&a.shift(&vec![1; a.nvars() + 1])).unwrap());
        }
    }
}
