//! Quotient metrics on `O(1)` over `P^m` and the quantities built on them:
//! pointwise values, sup norms, restricted sup norms and the gap between a
//! metric and the quotient metric regenerated from a norm on sections.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::sections::{monomials, normalize_point, RestrictedSection, Section, Subvariety};
use crate::ultranorm::{quotient_norm, NormedSpace};
use crate::valued_field::{FieldElement, Magnitude, ValuedField};

/// The metric whose value at `x` is the quotient norm of the fibre map
/// `H⁰(O(1)) → O(1)(x)`; `base` lives on linear forms in `X_0, …, X_m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientMetric {
    base: NormedSpace,
    /// `(B⁻¹)ᵀ`: expresses the coordinates `X` through the orthogonal forms.
    to_orthogonal: Matrix,
}

impl QuotientMetric {
    pub fn new(base: NormedSpace) -> Result<Self> {
        if base.dim() == 0 {
            return Err(Error::Invalid("a projective space needs at least one coordinate".into()));
        }
        let to_orthogonal = base.basis().inverse()?.transpose();
        Ok(QuotientMetric { base, to_orthogonal })
    }

    /// Coordinate forms orthogonal with the given weights.
    pub fn diagonal(field: ValuedField, weights: Vec<Magnitude>) -> Result<Self> {
        QuotientMetric::new(NormedSpace::diagonal(field, weights)?)
    }

    pub fn base(&self) -> &NormedSpace {
        &self.base
    }

    pub fn field(&self) -> &ValuedField {
        self.base.field()
    }

    pub fn num_vars(&self) -> usize {
        self.base.dim()
    }

    pub fn normalize(&self, x: &[FieldElement]) -> Result<Vector> {
        if x.len() != self.num_vars() {
            return Err(Error::DimensionMismatch { expected: self.num_vars(), found: x.len() });
        }
        normalize_point(self.field(), x)
    }

    /// `max_i |e_i(x)|/w_i`, the inverse of the fibre norm of the frame `x`.
    pub fn frame_value(&self, x: &[FieldElement]) -> Result<Magnitude> {
        let b = self.base.basis();
        let mut best = Magnitude::zero();
        for (i, w) in self.base.weights().iter().enumerate() {
            let ei: FieldElement = (0..b.rows())
                .filter(|&j| !b.get(j, i).is_zero())
                .fold(FieldElement::zero(), |acc, j| acc + b.get(j, i) * &x[j]);
            if ei.is_zero() {
                continue;
            }
            best = best.max(self.field().abs(&ei).div(w)?);
        }
        Ok(best)
    }

    /// `|s|_{h^n}(x)` for a section of degree `n`.
    pub fn point_metric(&self, s: &Section, x: &[FieldElement]) -> Result<Magnitude> {
        if s.num_vars() != self.num_vars() {
            return Err(Error::DimensionMismatch { expected: self.num_vars(), found: s.num_vars() });
        }
        let xt = self.normalize(x)?;
        let value = s.evaluate(&xt)?;
        if value.is_zero() {
            return Ok(Magnitude::zero());
        }
        let d = self.frame_value(&xt)?;
        self.field().abs(&value).div(&d.pow(s.degree() as i64)?)
    }

    /// `s` rewritten as a polynomial in the orthogonal forms `e_i`.
    pub fn in_orthogonal_forms(&self, s: &Section) -> Result<Section> {
        if self.base.is_diagonal() {
            return Ok(s.clone());
        }
        s.substitute_linear(&self.to_orthogonal)
    }

    /// `sup_x |s|_{h^n}(x)`: the weighted Gauss norm in the orthogonal forms.
    pub fn sup_norm(&self, s: &Section) -> Result<Magnitude> {
        let t = self.in_orthogonal_forms(s)?;
        Ok(gauss_norm(self.field(), self.base.weights(), &t))
    }

    /// The sup norm of `h^n` on degree-`n` sections, with the monomials in the
    /// orthogonal forms as orthogonal basis.
    pub fn degree_space(&self, n: u32) -> Result<NormedSpace> {
        let r = self.num_vars();
        let exps = monomials(r, n);
        let weights = exps.iter().map(|e| monomial_weight(self.base.weights(), e)).collect();
        if self.base.is_diagonal() {
            return NormedSpace::diagonal(self.field().clone(), weights);
        }
        let b = self.base.basis();
        let forms: Vec<Section> = (0..r).map(|i| Section::linear(&b.column(i))).collect();
        let mut powers: Vec<Vec<Section>> = Vec::with_capacity(r);
        for f in &forms {
            let mut p = vec![Section::constant(r, FieldElement::one())];
            for d in 1..=n as usize {
                let next = p[d - 1].mul(f)?;
                p.push(next);
            }
            powers.push(p);
        }
        let mut columns = Vec::with_capacity(exps.len());
        for e in &exps {
            let mut prod = Section::constant(r, FieldElement::one());
            for (i, &k) in e.iter().enumerate() {
                if k > 0 {
                    prod = prod.mul(&powers[i][k as usize])?;
                }
            }
            columns.push(prod.to_vector());
        }
        NormedSpace::from_vectors(self.field().clone(), &columns, weights)
    }
}

fn monomial_weight(weights: &[Magnitude], e: &[u32]) -> Magnitude {
    e.iter()
        .zip(weights)
        .filter(|(&k, _)| k > 0)
        .fold(Magnitude::one(), |acc, (&k, w)| acc.mul(&w.pow(k as i64).expect("positive weight")))
}

/// `max_α |a_α|·∏ w_i^{α_i}`.
pub fn gauss_norm(field: &ValuedField, weights: &[Magnitude], s: &Section) -> Magnitude {
    s.coeffs()
        .iter()
        .map(|(e, c)| field.abs(c).mul(&monomial_weight(weights, e)))
        .max()
        .unwrap_or_else(Magnitude::zero)
}

/// `sup_{y ∈ Y} |l|_h(y)`.
pub fn restricted_sup_norm(h: &QuotientMetric, l: &RestrictedSection, y: &Subvariety) -> Result<Magnitude> {
    match y {
        Subvariety::Points(points) => {
            let values = l.values_at(h.field(), points)?;
            let n = l.degree() as i64;
            let mut best = Magnitude::zero();
            for (p, v) in points.iter().zip(&values) {
                if v.is_zero() {
                    continue;
                }
                let xt = h.normalize(p)?;
                let m = h.field().abs(v).div(&h.frame_value(&xt)?.pow(n)?)?;
                best = best.max(m);
            }
            Ok(best)
        }
        Subvariety::Linear(forms) => {
            let RestrictedSection::Representative(s) = l else {
                return Err(Error::RepresentativeMismatch);
            };
            let Some(ry) = restrict_to_linear(h, forms)? else {
                return Ok(Magnitude::zero());
            };
            let (hy, param) = ry;
            hy.sup_norm(&s.substitute_linear(&param)?)
        }
    }
}

/// The metric on a linear subspace `Y ≅ P^{d-1}`, parametrized as
/// `t ↦ Σ t_i w_i`, together with the parametrization matrix (columns
/// `w_i`). `None` when `Y` is empty.
pub fn restrict_to_linear(h: &QuotientMetric, forms: &[Vector]) -> Result<Option<(QuotientMetric, Matrix)>> {
    let r = h.num_vars();
    let w = if forms.is_empty() {
        Matrix::identity(r).columns()
    } else {
        Matrix::from_rows(forms.to_vec(), r)?.kernel()
    };
    if w.is_empty() {
        return Ok(None);
    }
    let restriction = Matrix::from_rows(w.clone(), r)?;
    let q = quotient_norm(h.base(), &restriction)?;
    let hy = QuotientMetric::new(q.target().clone())?;
    Ok(Some((hy, Matrix::from_columns(&w, r)?)))
}

/// Quotient norm of the fibre element `x̃^{⊗n}` under evaluation
/// `(R_n, N) → k`, `s ↦ s(x̃)`, at the normalized representative.
pub fn quotient_fibre_norm(space: &NormedSpace, num_vars: usize, n: u32, x: &[FieldElement]) -> Result<Magnitude> {
    let exps = monomials(num_vars, n);
    if exps.len() != space.dim() {
        return Err(Error::DimensionMismatch { expected: exps.len(), found: space.dim() });
    }
    let xt = normalize_point(space.field(), x)?;
    let row: Vector = exps
        .iter()
        .map(|e| Section::monomial(e.clone(), FieldElement::one()).evaluate(&xt))
        .collect::<Result<_>>()?;
    let ev = Matrix::from_rows(vec![row], exps.len())?;
    quotient_norm(space, &ev)?.norm(&[FieldElement::one()])
}

/// `|·|^quot_{(R_n, N)}(x) / |·|_{h^n}(x)` as an exact ratio.
pub fn metric_gap(norm: &NormedSpace, h: &QuotientMetric, n: u32, x: &[FieldElement]) -> Result<Magnitude> {
    let q = quotient_fibre_norm(norm, h.num_vars(), n, x)?;
    let xt = h.normalize(x)?;
    Ok(q.mul(&h.frame_value(&xt)?.pow(n as i64)?))
}

/// `e^{σ_n(x)}`: the gap between `h^n` and the quotient metric regenerated
/// from its own sup norm.
pub fn sigma(h: &QuotientMetric, n: u32, x: &[FieldElement]) -> Result<Magnitude> {
    if n == 0 {
        return Ok(Magnitude::one());
    }
    metric_gap(&h.degree_space(n)?, h, n, x)
}

/// Norms on the graded pieces `R_n` of `P^m`.
#[derive(Clone, Debug)]
pub struct MetricFamily {
    num_vars: usize,
    norms: BTreeMap<u32, NormedSpace>,
}

impl MetricFamily {
    /// Checks `‖s·t‖ ≤ ‖s‖·‖t‖` on products of orthogonal basis vectors
    /// across every pair of present degrees.
    pub fn new(num_vars: usize, norms: BTreeMap<u32, NormedSpace>) -> Result<Self> {
        for (&n, space) in &norms {
            let expected = monomials(num_vars, n).len();
            if space.dim() != expected {
                return Err(Error::DimensionMismatch { expected, found: space.dim() });
            }
        }
        for (&a, sa) in &norms {
            for (&b, sb) in norms.range(a..) {
                let Some(sab) = norms.get(&(a + b)) else { continue };
                for (u, wu) in sa.basis_vectors().iter().zip(sa.weights()) {
                    let su = Section::from_vector(num_vars, a, u)?;
                    for (v, wv) in sb.basis_vectors().iter().zip(sb.weights()) {
                        let prod = su.mul(&Section::from_vector(num_vars, b, v)?)?;
                        if sab.norm(&prod.to_vector())? > wu.mul(wv) {
                            return Err(Error::Invalid(format!(
                                "norms of degrees {a} and {b} are not submultiplicative"
                            )));
                        }
                    }
                }
            }
        }
        Ok(MetricFamily { num_vars, norms })
    }

    /// `N_n = c^n·‖·‖_{h^n}` for `1 ≤ n ≤ max_degree`.
    pub fn scaled_sup_norms(h: &QuotientMetric, c: &Magnitude, max_degree: u32) -> Result<Self> {
        let mut norms = BTreeMap::new();
        for n in 1..=max_degree {
            norms.insert(n, h.degree_space(n)?.scaled(&c.pow(n as i64)?)?);
        }
        MetricFamily::new(h.num_vars(), norms)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn norm(&self, n: u32) -> Option<&NormedSpace> {
        self.norms.get(&n)
    }
}

/// Gap ratios `r_n` and the running minimum of `r_n^{1/n}`, kept as the pair
/// `(r_n, n)` realizing it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuEstimate {
    pub ratios: Vec<Magnitude>,
    pub running_min: Vec<(Magnitude, u32)>,
}

pub fn mu_estimate(family: &MetricFamily, h: &QuotientMetric, x: &[FieldElement], max_degree: u32) -> Result<MuEstimate> {
    let mut ratios = Vec::new();
    let mut running_min: Vec<(Magnitude, u32)> = Vec::new();
    for n in 1..=max_degree {
        let norm = family
            .norm(n)
            .ok_or_else(|| Error::Invalid(format!("the family has no norm in degree {n}")))?;
        let r = metric_gap(norm, h, n, x)?;
        let next = match running_min.last() {
            Some((best, k)) if best.cmp_roots(*k, &r, n) != Ordering::Greater => (best.clone(), *k),
            _ => (r.clone(), n),
        };
        ratios.push(r);
        running_min.push(next);
    }
    Ok(MuEstimate { ratios, running_min })
}

/// A rational point where `|s|_{h^n}` attains the sup norm, found by lifting
/// a point of `P^m(F_p)` where the reduction of `s` (rescaled to unit Gauss
/// norm in the orthogonal forms) does not vanish.
///
/// Applies to `p`-adic metrics whose weights are powers of `p`; returns
/// `None` otherwise or if no residue point works.
pub fn find_gauss_witness(h: &QuotientMetric, s: &Section) -> Result<Option<Vector>> {
    let ValuedField::Padic { p } = *h.field() else {
        return Ok(None);
    };
    if s.is_zero() {
        return Ok(None);
    }
    let mut scale = Vec::with_capacity(h.num_vars());
    for w in h.base().weights() {
        let (q, k) = w.parts(Some(p)).expect("positive weight");
        if !q.is_integer() || q.numer() != &1.into() {
            return Ok(None);
        }
        // w = ρ^k = |p^k|
        scale.push(FieldElement::from(crate::valued_field::pow_base(p, k)));
    }
    let t = h.in_orthogonal_forms(s)?;
    let target = h.sup_norm(s)?;
    let r = h.num_vars();
    let residues: Vec<Vector> = projective_residue_points(p, r);
    for y in residues {
        let u: Vector = y.iter().zip(&scale).map(|(a, c)| a * c).collect();
        let value = t.evaluate(&u)?;
        if value.is_zero() || h.field().abs(&value) != target {
            continue;
        }
        // u holds the orthogonal-form values; X = (Bᵀ)⁻¹ u
        let x = h.base().basis().transpose().solve(&u)?.expect("invertible basis");
        if h.point_metric(s, &x)? == target {
            return Ok(Some(x));
        }
    }
    Ok(None)
}

/// Representatives in `{0, …, p-1}` of `P^{r-1}(F_p)`, first nonzero
/// coordinate 1.
fn projective_residue_points(p: u64, r: usize) -> Vec<Vector> {
    let mut out = Vec::new();
    for lead in 0..r {
        let free = r - lead - 1;
        let count = (p as u128).pow(free as u32);
        for mut code in 0..count {
            let mut v = vec![FieldElement::zero(); r];
            v[lead] = FieldElement::one();
            for slot in v.iter_mut().skip(lead + 1) {
                *slot = FieldElement::from_int((code % p as u128) as i64);
                code /= p as u128;
            }
            out.push(v);
        }
    }
    out
}
