//! Linearized annihilators c_0 X + c_1 X^p + … + c_N X^{p^N} of univariate
//! series, found by linear algebra on truncated coefficients and re-verified
//! independently.

use num_bigint::BigUint;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::cartier::BranchSpace;
use crate::error::{Error, Result};
use crate::ff::{Field, FieldElem};
use crate::io::{elem_from_json, elem_json, field_from_json, field_json, parse_json, to_json_text};
use crate::polytope::{bound_report, BoundReport};
use crate::series::{hensel_solve, Branch, TruncatedSeries};

/// Default coefficient-degree schedule for the search.
pub const DEFAULT_DEGREES: [usize; 7] = [4, 8, 16, 32, 64, 128, 256];

/// Number of equations used for p-degree N and coefficient degree D.
pub fn equation_count(n: usize, d: usize) -> usize {
    2 * (n + 1) * (d + 1) + 32
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearizedPoly {
    field: Field,
    /// `coeffs[i][j]` is the coefficient of t^j in c_i.
    coeffs: Vec<Vec<FieldElem>>,
}

impl LinearizedPoly {
    /// Trims trailing zeros; fails if every c_i vanishes.
    pub fn new(field: &Field, coeffs: Vec<Vec<FieldElem>>) -> Result<LinearizedPoly> {
        let mut coeffs: Vec<Vec<FieldElem>> = coeffs
            .into_iter()
            .map(|mut c| {
                while c.last().is_some_and(|x| x.is_zero()) {
                    c.pop();
                }
                c
            })
            .collect();
        while coeffs.last().is_some_and(|c| c.is_empty()) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::MalformedInput("linearized polynomial with all coefficients zero".into()));
        }
        Ok(LinearizedPoly { field: field.clone(), coeffs })
    }

    /// From integer coefficient lists (reduced mod p).
    pub fn from_ints(field: &Field, coeffs: &[Vec<i64>]) -> Result<LinearizedPoly> {
        let c = coeffs.iter().map(|c| c.iter().map(|&x| field.from_int(x)).collect()).collect();
        LinearizedPoly::new(field, c)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// The p-degree N.
    pub fn p_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Vec<FieldElem>] {
        &self.coeffs
    }

    /// Largest degree among the c_i.
    pub fn max_coeff_degree(&self) -> usize {
        self.coeffs.iter().map(|c| c.len().saturating_sub(1)).max().unwrap_or(0)
    }
}

fn check_univariate(l: &LinearizedPoly, g: &TruncatedSeries) -> Result<()> {
    if g.nvars() != 1 {
        return Err(Error::VariableCountMismatch { left: g.nvars(), right: 1 });
    }
    if g.field() != l.field() {
        return Err(Error::FieldMismatch);
    }
    Ok(())
}

/// Σ c_i(t) · g^{p^i}. The result is exact to the precision of g: each twist
/// only spreads the known coefficients further apart, and multiplying by a
/// polynomial never disturbs coefficients below the truncation order.
pub fn apply_linearized(l: &LinearizedPoly, g: &TruncatedSeries) -> Result<TruncatedSeries> {
    check_univariate(l, g)?;
    let f = l.field();
    let prec = g.prec();
    let src = g.univariate_coeffs();
    let mut out = vec![f.zero(); prec];
    let p = f.p() as usize;
    let mut stride = 1usize;
    for (i, c) in l.coeffs.iter().enumerate() {
        if i > 0 {
            stride = stride.saturating_mul(p);
        }
        for (k, &gk) in src.iter().enumerate() {
            let base = match k.checked_mul(stride) {
                Some(b) if b < prec => b,
                _ => break,
            };
            if gk.is_zero() {
                continue;
            }
            let gk = f.frobenius_pow(gk, i as i64);
            for (j, &cij) in c.iter().enumerate() {
                if base + j >= prec {
                    break;
                }
                if !cij.is_zero() {
                    out[base + j] = f.add(out[base + j], f.mul(cij, gk));
                }
            }
        }
    }
    Ok(TruncatedSeries::univariate(f, out))
}

/// First exponent below `order` where Σ c_i g^{p^i} has a nonzero coefficient.
pub fn first_nonvanishing(l: &LinearizedPoly, g: &TruncatedSeries, order: usize) -> Result<Option<usize>> {
    check_univariate(l, g)?;
    if order > g.prec() {
        return Err(Error::InsufficientPrecision { needed: order, available: g.prec() });
    }
    let r = apply_linearized(l, &g.truncate(order))?;
    Ok(r.univariate_coeffs().iter().position(|x| !x.is_zero()))
}

/// Whether Σ c_i g^{p^i} vanishes below t^order.
pub fn verify_annihilation(l: &LinearizedPoly, g: &TruncatedSeries, order: usize) -> Result<bool> {
    Ok(first_nonvanishing(l, g, order)?.is_none())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnnihilatorCertificate {
    pub l: LinearizedPoly,
    /// Annihilation holds for every exponent below this order.
    pub verified_order: usize,
    pub n_bound_used: usize,
    /// Coefficient-degree budget D at which the kernel vector was found.
    pub search_degree: usize,
}

/// Row-reduces in place and returns the pivot column of each pivot row.
fn rref(field: &Field, m: &mut [Vec<FieldElem>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..ncols {
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = field.inv(m[row][col]).expect("nonzero pivot");
        for x in m[row].iter_mut() {
            *x = field.mul(*x, inv);
        }
        let pivot_row = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r == row || other[col].is_zero() {
                continue;
            }
            let factor = other[col];
            for (x, &y) in other.iter_mut().zip(&pivot_row).skip(col) {
                if !y.is_zero() {
                    *x = field.sub(*x, field.mul(factor, y));
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    pivots
}

/// Kernel vector of the (N, D) system, taken from the lowest free column.
/// Unknowns are ordered degree-major: column j·(N+1) + i holds c_{i,j}.
fn solve_system(g: &TruncatedSeries, n: usize, d: usize, rows: usize) -> Option<LinearizedPoly> {
    let f = g.field();
    let p = f.p() as usize;
    let src = g.univariate_coeffs();
    let ncols = (n + 1) * (d + 1);
    // twisted[i][m] = coefficient of t^m in g^{p^i}
    let mut twisted = vec![vec![f.zero(); rows]; n + 1];
    let mut stride = 1usize;
    for (i, tw) in twisted.iter_mut().enumerate() {
        if i > 0 {
            stride = stride.saturating_mul(p);
        }
        for (k, &gk) in src.iter().enumerate() {
            match k.checked_mul(stride) {
                Some(b) if b < rows => tw[b] = f.frobenius_pow(gk, i as i64),
                _ => break,
            }
        }
    }
    let mut m: Vec<Vec<FieldElem>> = (0..rows)
        .map(|row| {
            let mut r = vec![f.zero(); ncols];
            for j in 0..=d.min(row) {
                for i in 0..=n {
                    r[j * (n + 1) + i] = twisted[i][row - j];
                }
            }
            r
        })
        .collect();
    let pivots = rref(f, &mut m, ncols);
    let free = (0..ncols).find(|c| !pivots.contains(c))?;
    let mut x = vec![f.zero(); ncols];
    x[free] = f.one();
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = f.neg(m[r][free]);
    }
    let coeffs = (0..=n).map(|i| (0..=d).map(|j| x[j * (n + 1) + i]).collect()).collect();
    LinearizedPoly::new(f, coeffs).ok()
}

/// Searches N = 0..=n_max and, for each N, D through `degrees`. Candidates are
/// re-verified on `g` to its full precision before being returned.
pub fn find_linearized_annihilator(
    g: &TruncatedSeries,
    n_max: usize,
    degrees: &[usize],
) -> Result<AnnihilatorCertificate> {
    find_linearized_annihilator_verified_on(g, g, n_max, degrees)
}

/// As [`find_linearized_annihilator`], but verification runs on `verify`, which
/// must agree with `g` and may be known to a higher order.
pub fn find_linearized_annihilator_verified_on(
    g: &TruncatedSeries,
    verify: &TruncatedSeries,
    n_max: usize,
    degrees: &[usize],
) -> Result<AnnihilatorCertificate> {
    if g.nvars() != 1 {
        return Err(Error::VariableCountMismatch { left: g.nvars(), right: 1 });
    }
    if g.is_zero() {
        return Err(Error::ZeroSeries);
    }
    if verify.prec() < g.prec() || !verify.agrees_with(g, g.prec()) {
        return Err(Error::MalformedInput("verification series disagrees with the search series".into()));
    }
    let smallest = degrees.iter().map(|&d| equation_count(0, d)).min().unwrap_or(usize::MAX);
    if g.prec() < smallest {
        return Err(Error::InsufficientPrecision { needed: smallest, available: g.prec() });
    }
    for n in 0..=n_max {
        for &d in degrees {
            let rows = equation_count(n, d);
            if rows > g.prec() {
                continue;
            }
            let Some(l) = solve_system(g, n, d, rows) else {
                continue;
            };
            if verify_annihilation(&l, verify, verify.prec())? {
                return Ok(AnnihilatorCertificate {
                    l,
                    verified_order: verify.prec(),
                    n_bound_used: n_max,
                    search_degree: d,
                });
            }
        }
    }
    Err(Error::NotFound)
}

/// Knobs for [`diagonal_pipeline_with`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PipelineOptions {
    /// Number of diagonal coefficients obtained by Hensel lifting.
    pub order: usize,
    /// Verification order, reached by exact coefficient queries past `order`.
    pub verify_order: usize,
    /// Overrides N_effective as the p-degree cap.
    pub n_max: Option<usize>,
    pub degrees: Vec<usize>,
}

impl PipelineOptions {
    pub fn new(order: usize) -> PipelineOptions {
        PipelineOptions { order, verify_order: 2 * order, n_max: None, degrees: DEFAULT_DEGREES.to_vec() }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub certificate: AnnihilatorCertificate,
    pub bound: BoundReport,
    /// Δ(f) to `verify_order`.
    pub diagonal: TruncatedSeries,
}

/// Diagonal Δ(f) to `order` coefficients from f lifted to total degree n·order.
pub fn hensel_diagonal(b: &Branch, order: usize) -> Result<TruncatedSeries> {
    let f = hensel_solve(b, b.nvars() * order)?;
    Ok(f.diagonal().truncate(order))
}

/// Δ(f) to `order` coefficients via coefficient queries a(i, …, i).
pub fn queried_diagonal(space: &std::sync::Arc<BranchSpace>, order: usize) -> Result<TruncatedSeries> {
    let n = space.nvars();
    let coeffs = (0..order)
        .map(|i| space.coeff(&vec![BigUint::from(i); n]))
        .collect::<Result<Vec<_>>>()?;
    Ok(TruncatedSeries::univariate(space.field(), coeffs))
}

/// Annihilator of the diagonal with p-degree at most N_effective.
pub fn diagonal_pipeline(b: &Branch, univariate_order: usize) -> Result<PipelineResult> {
    diagonal_pipeline_with(b, &PipelineOptions::new(univariate_order))
}

pub fn diagonal_pipeline_with(b: &Branch, opts: &PipelineOptions) -> Result<PipelineResult> {
    let bound = bound_report(b.annihilator())?;
    let g = hensel_diagonal(b, opts.order)?;
    let diagonal = if opts.verify_order > opts.order {
        let extended = queried_diagonal(&BranchSpace::new(b)?, opts.verify_order)?;
        if let Some(k) = (0..opts.order).find(|&k| extended.coeff(&[k as u32]) != g.coeff(&[k as u32])) {
            return Err(Error::RelationCheckFailed { degree: k });
        }
        extended
    } else {
        g.clone()
    };
    let n_max = opts.n_max.unwrap_or(bound.n_effective as usize);
    let certificate = find_linearized_annihilator_verified_on(&g, &diagonal, n_max, &opts.degrees)?;
    assert!(certificate.l.p_degree() <= n_max);
    Ok(PipelineResult { certificate, bound, diagonal })
}

// ---------------------------------------------------------------------------
// JSON

pub fn certificate_to_value(c: &AnnihilatorCertificate, bound: Option<&BoundReport>) -> Value {
    let f = c.l.field();
    let coeffs: Vec<Value> = c
        .l
        .coeffs
        .iter()
        .map(|ci| Value::Array(ci.iter().map(|&x| elem_json(f, x)).collect()))
        .collect();
    json!({
        "N": c.l.p_degree(),
        "coeffs": coeffs,
        "verified_order": c.verified_order,
        "N_bound_used": c.n_bound_used,
        "search_degree": c.search_degree,
        "field": field_json(f),
        "bound": bound.map(|b| serde_json::to_value(b).expect("report serializes")),
    })
}

pub fn certificate_to_json(c: &AnnihilatorCertificate, bound: Option<&BoundReport>) -> String {
    to_json_text(&certificate_to_value(c, bound))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
struct CertificateRaw {
    N: usize,
    coeffs: Vec<Vec<Value>>,
    verified_order: usize,
    N_bound_used: usize,
    search_degree: usize,
    field: Value,
    #[serde(default)]
    bound: Option<BoundReport>,
}

/// Parses a certificate; the stored claims are not re-checked here.
pub fn parse_certificate(text: &str) -> Result<(AnnihilatorCertificate, Option<BoundReport>)> {
    let raw: CertificateRaw = parse_json(text)?;
    let field = field_from_json(&raw.field)?;
    let coeffs = raw
        .coeffs
        .iter()
        .enumerate()
        .map(|(i, c)| c.iter().map(|x| elem_from_json(&field, x, &format!("coeffs[{i}]"))).collect())
        .collect::<Result<Vec<Vec<_>>>>()?;
    let l = LinearizedPoly::new(&field, coeffs)?;
    if l.p_degree() != raw.N {
        return Err(Error::MalformedInput(format!("N = {} but the last nonzero coefficient is c_{}", raw.N, l.p_degree())));
    }
    let cert = AnnihilatorCertificate {
        l,
        verified_order: raw.verified_order,
        n_bound_used: raw.N_bound_used,
        search_degree: raw.search_degree,
    };
    Ok((cert, raw.bound))
}
