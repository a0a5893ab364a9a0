//! Extending `l^{⊗n}` from a subvariety `Y` to all of `P^m` with minimal sup
//! norm, and the growth of the optimal ratios `‖s‖_{h^n} / ‖l‖_{Y,h}^n`.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg::{self, combine, complete_with_units, Matrix, Vector};
use crate::metric::{restricted_sup_norm, QuotientMetric};
use crate::sections::{evaluation_matrix, normalize_point, restriction_kernel, RestrictedSection, Section, Subvariety};
use crate::ultranorm::{distance_to_subspace, norm_value_set, orthogonalize_flag, scalar_extension};
use crate::valued_field::{choose_laurent_base, FieldElement, Magnitude, ValuedField};

/// A metric, a subvariety and a degree-1 section on it to be extended.
#[derive(Clone, Debug)]
pub struct ExtensionProblem {
    metric: QuotientMetric,
    y: Subvariety,
    l: RestrictedSection,
    restricted_norm: Magnitude,
}

impl ExtensionProblem {
    pub fn new(metric: QuotientMetric, y: Subvariety, l: RestrictedSection) -> Result<Self> {
        if l.degree() != 1 {
            return Err(Error::Invalid(format!("the section to extend has degree {}, not 1", l.degree())));
        }
        if let Some(nv) = y.num_vars() {
            if nv != metric.num_vars() {
                return Err(Error::DimensionMismatch { expected: metric.num_vars(), found: nv });
            }
        }
        if let RestrictedSection::Representative(s) = &l {
            if s.num_vars() != metric.num_vars() {
                return Err(Error::DimensionMismatch { expected: metric.num_vars(), found: s.num_vars() });
            }
        }
        let restricted_norm = restricted_sup_norm(&metric, &l, &y)?;
        if restricted_norm.is_zero() {
            return Err(Error::Invalid("the section vanishes on Y".into()));
        }
        Ok(ExtensionProblem { metric, y, l, restricted_norm })
    }

    pub fn metric(&self) -> &QuotientMetric {
        &self.metric
    }

    pub fn subvariety(&self) -> &Subvariety {
        &self.y
    }

    pub fn section(&self) -> &RestrictedSection {
        &self.l
    }

    /// `‖l‖_{Y,h}`.
    pub fn restricted_norm(&self) -> &Magnitude {
        &self.restricted_norm
    }

    fn num_vars(&self) -> usize {
        self.metric.num_vars()
    }

    /// Some `s₀` restricting to `l^{⊗n}` and a basis of the restriction
    /// kernel, so that the extensions are exactly `s₀ + span(kernel)`.
    pub fn coset(&self, n: u32) -> Result<(Vector, Vec<Vector>)> {
        let kernel = restriction_kernel(&self.y, self.num_vars(), n);
        let s0 = match (&self.l, &self.y) {
            (RestrictedSection::Representative(s), _) => s.pow(n).to_vector(),
            (RestrictedSection::PointValues { .. }, Subvariety::Points(points)) => {
                let field = self.metric.field();
                let normalized = points
                    .iter()
                    .map(|p| normalize_point(field, p))
                    .collect::<Result<Vec<_>>>()?;
                let target = self.l.power(n).values_at(field, points)?;
                evaluation_matrix(&normalized, self.num_vars(), n)
                    .solve(&target)?
                    .ok_or(Error::DegreeTooSmall(n as usize))?
            }
            (RestrictedSection::PointValues { .. }, Subvariety::Linear(_)) => {
                return Err(Error::RepresentativeMismatch)
            }
        };
        Ok((s0, kernel))
    }
}

/// An optimal extension in one degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lift {
    pub degree: u32,
    pub section: Section,
    pub norm: Magnitude,
    /// `‖s‖_{h^n} / ‖l‖_{Y,h}^n`, the exponential of `a_n`.
    pub ratio: Magnitude,
}

/// The extension of `l^{⊗n}` of least sup norm.
pub fn min_norm_lift(problem: &ExtensionProblem, n: u32) -> Result<Lift> {
    let (s0, kernel) = problem.coset(n)?;
    let space = problem.metric.degree_space(n)?;
    let (norm, w) = distance_to_subspace(&space, &s0, &kernel)?;
    let s = linalg::sub(&s0, &w);
    let section = Section::from_vector(problem.num_vars(), n, &s)?;
    let ratio = norm.div(&problem.restricted_norm.pow(n as i64)?)?;
    Ok(Lift { degree: n, section, norm, ratio })
}

/// Optimal lifts for `1 ≤ n ≤ max_degree`.
pub fn extension_table(problem: &ExtensionProblem, max_degree: u32) -> Result<Vec<Lift>> {
    (1..=max_degree).map(|n| min_norm_lift(problem, n)).collect()
}

/// A failure of `a_{m+n} ≤ a_m + a_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub m: u32,
    pub n: u32,
    pub ratio_m: Magnitude,
    pub ratio_n: Magnitude,
    pub ratio_sum: Magnitude,
}

/// Checks `r_{m+n} ≤ r_m·r_n` for all `1 ≤ m ≤ n` with `m + n ≤ len`, where
/// `ratios[k]` is `r_{k+1}`.
pub fn subadditivity_violations(ratios: &[Magnitude]) -> Vec<Violation> {
    let mut out = Vec::new();
    let len = ratios.len();
    for m in 1..=len {
        for n in m..=len {
            if m + n > len {
                break;
            }
            let (rm, rn, rs) = (&ratios[m - 1], &ratios[n - 1], &ratios[m + n - 1]);
            if *rs > rm.mul(rn) {
                out.push(Violation {
                    m: m as u32,
                    n: n as u32,
                    ratio_m: rm.clone(),
                    ratio_n: rn.clone(),
                    ratio_sum: rs.clone(),
                });
            }
        }
    }
    out
}

/// Running infimum of `r_n^{1/n}`, each entry the pair `(r_k, k)` attaining
/// it among the first `n` terms. Exponentials of upper bounds for `λ_h(l)`.
pub fn lambda_estimate(ratios: &[Magnitude]) -> Vec<(Magnitude, u32)> {
    let mut out: Vec<(Magnitude, u32)> = Vec::with_capacity(ratios.len());
    for (i, r) in ratios.iter().enumerate() {
        let n = i as u32 + 1;
        let next = match out.last() {
            Some((best, k)) if best.cmp_roots(*k, r, n) != Ordering::Greater => (best.clone(), *k),
            _ => (r.clone(), n),
        };
        out.push(next);
    }
    out
}

/// Result of solving a trivially valued problem over `Q((T))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentLift {
    pub base_prime: u64,
    pub section: Section,
    pub norm: Magnitude,
    pub ratio: Magnitude,
}

/// Solves the trivially valued problem in degree `n` by passing to the
/// Laurent field: the norm is scalar-extended to `Q((T))` with `|T| = 1/P`
/// for an admissible `P`, the coset is minimized there, and the minimizer is
/// projected back along an orthogonal basis adapted to the restriction
/// kernel. The retained coefficients must be constants.
pub fn extend_trivial_via_laurent(problem: &ExtensionProblem, n: u32) -> Result<LaurentLift> {
    let field = problem.metric.field();
    if !field.is_trivial() {
        return Err(Error::UnsupportedField(field.to_string()));
    }
    let space = problem.metric.degree_space(n)?;
    let base_prime = choose_laurent_base(&norm_value_set(&space).nonzero());
    let laurent = ValuedField::laurent(base_prime)?;
    let ext = scalar_extension(&space, &laurent)?;
    let dim = ext.dim();

    let (s0, kernel) = problem.coset(n)?;
    // start from a T-dependent point of the coset so the projection step is
    // exercised on genuine Laurent data
    let drift = kernel.iter().fold(linalg::zero_vector(dim), |acc, k| linalg::add(&acc, k));
    let start = linalg::add(&s0, &linalg::scale(&FieldElement::t(), &drift));
    let (_, w) = distance_to_subspace(&ext, &start, &kernel)?;
    let solution = linalg::sub(&start, &w);

    let mut flag = kernel.clone();
    flag.extend(complete_with_units(&kernel, dim));
    let adapted = orthogonalize_flag(&ext, &flag)?;
    let coords = Matrix::from_columns(&adapted.vectors, dim)?
        .solve(&solution)?
        .ok_or(Error::SingularBasis)?;
    let k = kernel.len();
    let mut kept = Vec::with_capacity(dim - k);
    for (index, a) in coords.iter().enumerate().skip(k) {
        if !a.is_rational() {
            return Err(Error::TDependentCoefficient { index });
        }
        kept.push(a.clone());
    }
    let s = combine(&kept, &adapted.vectors[k..], dim);
    if let Some(index) = s.iter().position(|x| !x.is_rational()) {
        return Err(Error::TDependentCoefficient { index });
    }
    let norm = space.norm(&s)?;
    let ratio = norm.div(&problem.restricted_norm.pow(n as i64)?)?;
    Ok(LaurentLift {
        base_prime,
        section: Section::from_vector(problem.num_vars(), n, &s)?,
        norm,
        ratio,
    })
}

/// Per-degree comparison `r_n ≤ e^{nε}` and the first `n₀` from which it
/// holds through the end of the table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoremReport {
    pub holds: Vec<bool>,
    pub n0: Option<u32>,
}

/// `ratios[k]` is `r_{k+1}`; `epsilon ≥ 0`.
pub fn check_extension_theorem(ratios: &[Magnitude], epsilon: &BigRational) -> Result<TheoremReport> {
    if epsilon.is_negative() {
        return Err(Error::Invalid("epsilon must be non-negative".into()));
    }
    let holds: Vec<bool> = ratios
        .iter()
        .enumerate()
        .map(|(i, r)| le_exp(r.value(), &(epsilon * BigRational::from_integer(BigInt::from(i + 1)))))
        .collect();
    let tail = holds.iter().rev().take_while(|&&b| b).count();
    let n0 = (tail > 0).then(|| (holds.len() - tail + 1) as u32);
    Ok(TheoremReport { holds, n0 })
}

/// Decides `r ≤ e^x` exactly for rational `x ≥ 0`, refining Taylor
/// enclosures of `e^x` until they separate it from `r`. The exponential of
/// a nonzero rational is irrational, so the loop terminates.
pub fn le_exp(r: &BigRational, x: &BigRational) -> bool {
    if x.is_zero() {
        return *r <= BigRational::one();
    }
    if *r <= BigRational::one() {
        return true;
    }
    let mut term = BigRational::one();
    let mut lower = BigRational::one();
    let mut k = 0u64;
    loop {
        k += 1;
        term = term * x / BigRational::from_integer(k.into());
        lower += &term;
        if *r <= lower {
            return true;
        }
        // remainder after the degree-k partial sum is at most
        // term·x/(k+1) / (1 − x/(k+2)) once k + 2 > x
        let k1 = BigRational::from_integer((k + 1).into());
        let k2 = BigRational::from_integer((k + 2).into());
        if k2 > *x {
            let next = &term * x / k1;
            let upper = &lower + next / (BigRational::one() - x / k2);
            if *r > upper {
                return false;
            }
        }
    }
}
