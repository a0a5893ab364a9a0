//! Graded families of adelic spaces built from sections of `O(n)` on `P^m`,
//! their `λ` tables, and the search for a basis of small sections.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use super::lambda::{lambda_q, lambda_z};
use super::{finite_unit_lattice, quotient_adelic, AdelicSpace, ArchimedeanNorm, QVector};
use crate::error::{Error, Result};
use crate::sections::monomials;
use crate::ultranorm::NormedSpace;
use crate::valued_field::{Magnitude, ValuedField};

type Q = BigRational;

/// Degree-`n` sections of `O(n)` on `P^m` with
///
/// * at each listed prime, the diagonal norm giving the monomial `X^α` the
///   weight `∏ w_i^{α_i}`;
/// * the archimedean norm `factor·ratio^n·max |coefficient|`;
/// * optionally, the quotient onto functions on finitely many points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedFixture {
    pub m: usize,
    pub finite_weights: BTreeMap<u64, Vec<Magnitude>>,
    pub arch_factor: Q,
    pub arch_ratio: Q,
    pub quotient_points: Vec<QVector>,
}

impl GradedFixture {
    /// Standard finite norms and `factor·ratio^n` sup norms on `P^m`.
    pub fn scaled(m: usize, arch_factor: Q, arch_ratio: Q) -> Self {
        GradedFixture { m, finite_weights: BTreeMap::new(), arch_factor, arch_ratio, quotient_points: Vec::new() }
    }

    /// The full section space in degree `n`.
    pub fn sections(&self, n: u32) -> Result<AdelicSpace> {
        let exps = monomials(self.m + 1, n);
        let dim = exps.len();
        let mut finite = BTreeMap::new();
        for (&p, w) in &self.finite_weights {
            if w.len() != self.m + 1 {
                return Err(Error::DimensionMismatch { expected: self.m + 1, found: w.len() });
            }
            let weights = exps
                .iter()
                .map(|e| {
                    e.iter().zip(w).try_fold(Magnitude::one(), |acc, (&k, wi)| Ok::<_, Error>(acc.mul(&wi.pow(k as i64)?)))
                })
                .collect::<Result<Vec<_>>>()?;
            finite.insert(p, NormedSpace::diagonal(ValuedField::padic(p)?, weights)?);
        }
        let scale = &self.arch_factor * num_traits::pow(self.arch_ratio.clone(), n as usize);
        // ‖x‖ = scale·max |x_i| is the maximum of the functionals scale·x_i
        let arch = ArchimedeanNorm::scaled_sup(dim, &scale)?;
        AdelicSpace::new(dim, finite, arch)
    }

    /// The graded piece in degree `n`, after the optional quotient.
    pub fn piece(&self, n: u32) -> Result<AdelicSpace> {
        let full = self.sections(n)?;
        if self.quotient_points.is_empty() {
            return Ok(full);
        }
        quotient_adelic(&full, &self.evaluation(n))
    }

    /// Rows: monomials of degree `n` evaluated at each quotient point.
    pub fn evaluation(&self, n: u32) -> Vec<QVector> {
        let exps = monomials(self.m + 1, n);
        self.quotient_points
            .iter()
            .map(|pt| {
                exps.iter()
                    .map(|e| {
                        e.iter()
                            .zip(pt)
                            .fold(Q::one(), |acc, (&k, x)| acc * num_traits::pow(x.clone(), k as usize))
                    })
                    .collect()
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaRow {
    pub degree: u32,
    pub rank: usize,
    pub lambda_q: Q,
    pub lambda_z: Q,
    pub basis: Vec<QVector>,
}

pub fn graded_lambda_table(fixture: &GradedFixture, degrees: &[u32], rank_bound: usize) -> Result<Vec<LambdaRow>> {
    degrees.iter().map(|&n| lambda_row(fixture, n, rank_bound)).collect()
}

pub fn lambda_row(fixture: &GradedFixture, n: u32, rank_bound: usize) -> Result<LambdaRow> {
    let lattice = finite_unit_lattice(&fixture.piece(n)?)?;
    let lq = lambda_q(&lattice, rank_bound)?;
    let lz = lambda_z(&lattice, rank_bound)?;
    Ok(LambdaRow {
        degree: n,
        rank: lattice.lattice.rank(),
        lambda_q: lq.value,
        lambda_z: lz.value,
        basis: lz.basis,
    })
}

/// Least-squares line through `(n, ln λ_Q(n))`. Floating point, for
/// reporting only.
#[derive(Clone, Debug, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    pub samples: usize,
}

impl DecayFit {
    /// `e^{slope}`, the fitted per-degree decay factor.
    pub fn rate(&self) -> f64 {
        self.slope.exp()
    }
}

pub fn decay_fit(rows: &[LambdaRow]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.lambda_q > Q::zero())
        .filter_map(|r| Some((r.degree as f64, r.lambda_q.to_f64()?.ln())))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(DecayFit { slope, intercept: my - slope * mx, samples: pts.len() })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NakaiOutcome {
    /// A basis of the finite unit lattice, every archimedean norm below 1.
    Found { basis: Vec<QVector>, arch_norms: Vec<Q> },
    None,
}

/// A `Z`-basis of the degree-`n` unit lattice with all archimedean norms
/// strictly below 1, which exists exactly when `λ_Z < 1`.
pub fn nakai_basis_search(fixture: &GradedFixture, n: u32, rank_bound: usize) -> Result<NakaiOutcome> {
    let lattice = finite_unit_lattice(&fixture.piece(n)?)?;
    let lz = lambda_z(&lattice, rank_bound)?;
    if lz.value >= Q::one() || lz.basis.is_empty() {
        return Ok(NakaiOutcome::None);
    }
    let arch_norms = lz
        .basis
        .iter()
        .map(|b| lattice.arch.norm(b))
        .collect::<Result<Vec<_>>>()?;
    Ok(NakaiOutcome::Found { basis: lz.basis, arch_norms })
}
