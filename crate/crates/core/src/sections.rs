//! Homogeneous polynomials as sections of `O(n)` on `P^m`, and the rational
//! subvarieties they are restricted to.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{rank_of, rref, Matrix, Vector};
use crate::valued_field::{FieldElement, ValuedField};

pub type Exponent = Vec<u32>;

/// All exponent vectors of total degree `degree` in `num_vars` variables,
/// in graded-lex order (first exponent descending).
pub fn monomials(num_vars: usize, degree: u32) -> Vec<Exponent> {
    fn go(rest: usize, degree: u32, prefix: &mut Exponent, out: &mut Vec<Exponent>) {
        if rest == 1 {
            prefix.push(degree);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for e in (0..=degree).rev() {
            prefix.push(e);
            go(rest - 1, degree - e, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if num_vars > 0 {
        go(num_vars, degree, &mut Vec::with_capacity(num_vars), &mut out);
    } else if degree == 0 {
        out.push(Vec::new());
    }
    out
}

/// The monomial basis of `H⁰(P^m, O(n))`.
pub fn monomial_basis(m: usize, n: u32) -> Vec<Exponent> {
    monomials(m + 1, n)
}

fn monomial_value(e: &[u32], x: &[FieldElement]) -> FieldElement {
    let mut acc = FieldElement::one();
    for (&k, xi) in e.iter().zip(x) {
        if k > 0 {
            acc = &acc * &xi.pow(k);
        }
    }
    acc
}

/// A homogeneous polynomial of fixed degree with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Section {
    num_vars: usize,
    degree: u32,
    coeffs: BTreeMap<Exponent, FieldElement>,
}

impl Section {
    pub fn new(num_vars: usize, degree: u32, coeffs: BTreeMap<Exponent, FieldElement>) -> Result<Self> {
        for e in coeffs.keys() {
            if e.len() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, found: e.len() });
            }
            if e.iter().sum::<u32>() != degree {
                return Err(Error::Invalid(format!("monomial {e:?} does not have degree {degree}")));
            }
        }
        let coeffs = coeffs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        Ok(Section { num_vars, degree, coeffs })
    }

    pub fn zero(num_vars: usize, degree: u32) -> Self {
        Section { num_vars, degree, coeffs: BTreeMap::new() }
    }

    pub fn constant(num_vars: usize, c: FieldElement) -> Self {
        Section::monomial(vec![0; num_vars], c)
    }

    pub fn monomial(exponent: Exponent, c: FieldElement) -> Self {
        let num_vars = exponent.len();
        let degree = exponent.iter().sum();
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(exponent, c);
        }
        Section { num_vars, degree, coeffs }
    }

    /// The coordinate function `X_i`.
    pub fn variable(num_vars: usize, i: usize) -> Self {
        let mut e = vec![0; num_vars];
        e[i] = 1;
        Section::monomial(e, FieldElement::one())
    }

    /// `Σ c_i X_i`.
    pub fn linear(coeffs: &[FieldElement]) -> Self {
        Section::from_vector(coeffs.len(), 1, coeffs).expect("length matches")
    }

    /// Coefficients listed in [`monomials`] order.
    pub fn from_vector(num_vars: usize, degree: u32, v: &[FieldElement]) -> Result<Self> {
        let basis = monomials(num_vars, degree);
        if basis.len() != v.len() {
            return Err(Error::DimensionMismatch { expected: basis.len(), found: v.len() });
        }
        let coeffs = basis
            .into_iter()
            .zip(v)
            .filter(|(_, c)| !c.is_zero())
            .map(|(e, c)| (e, c.clone()))
            .collect();
        Ok(Section { num_vars, degree, coeffs })
    }

    pub fn to_vector(&self) -> Vector {
        monomials(self.num_vars, self.degree)
            .iter()
            .map(|e| self.coeff(e))
            .collect()
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn coeffs(&self) -> &BTreeMap<Exponent, FieldElement> {
        &self.coeffs
    }

    pub fn coeff(&self, e: &[u32]) -> FieldElement {
        self.coeffs.get(e).cloned().unwrap_or_else(FieldElement::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn check_compatible(&self, other: &Section) -> Result<()> {
        if self.num_vars != other.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: other.num_vars });
        }
        Ok(())
    }

    pub fn add(&self, other: &Section) -> Result<Section> {
        self.check_compatible(other)?;
        if self.degree != other.degree {
            return Err(Error::Invalid(format!("degrees {} and {} differ", self.degree, other.degree)));
        }
        let mut coeffs = self.coeffs.clone();
        for (e, c) in &other.coeffs {
            let sum = &self.coeff(e) + c;
            if sum.is_zero() {
                coeffs.remove(e);
            } else {
                coeffs.insert(e.clone(), sum);
            }
        }
        Ok(Section { coeffs, ..self.clone() })
    }

    pub fn scale(&self, c: &FieldElement) -> Section {
        if c.is_zero() {
            return Section::zero(self.num_vars, self.degree);
        }
        let coeffs = self.coeffs.iter().map(|(e, a)| (e.clone(), c * a)).collect();
        Section { coeffs, ..self.clone() }
    }

    pub fn sub(&self, other: &Section) -> Result<Section> {
        self.add(&other.scale(&FieldElement::from_int(-1)))
    }

    pub fn mul(&self, other: &Section) -> Result<Section> {
        self.check_compatible(other)?;
        let mut coeffs: BTreeMap<Exponent, FieldElement> = BTreeMap::new();
        for (e, a) in &self.coeffs {
            for (f, b) in &other.coeffs {
                let g: Exponent = e.iter().zip(f).map(|(x, y)| x + y).collect();
                let term = a * b;
                let entry = coeffs.entry(g).or_insert_with(FieldElement::zero);
                *entry = &*entry + &term;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        Ok(Section { num_vars: self.num_vars, degree: self.degree + other.degree, coeffs })
    }

    pub fn pow(&self, d: u32) -> Section {
        let mut acc = Section::constant(self.num_vars, FieldElement::one());
        for _ in 0..d {
            acc = acc.mul(self).expect("same variable count");
        }
        acc
    }

    /// Plain evaluation at a chosen representative.
    pub fn evaluate(&self, x: &[FieldElement]) -> Result<FieldElement> {
        if x.len() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: x.len() });
        }
        Ok(self
            .coeffs
            .iter()
            .fold(FieldElement::zero(), |acc, (e, c)| acc + c * &monomial_value(e, x)))
    }

    /// `s(M·u)`: substitutes `X_j = Σ_i M[j][i]·u_i`, giving a section in
    /// `M.cols()` variables.
    pub fn substitute_linear(&self, m: &Matrix) -> Result<Section> {
        if m.rows() != self.num_vars {
            return Err(Error::DimensionMismatch { expected: self.num_vars, found: m.rows() });
        }
        let k = m.cols();
        let forms: Vec<Section> = (0..self.num_vars).map(|j| Section::linear(m.row(j))).collect();
        let mut powers: Vec<Vec<Section>> = Vec::with_capacity(self.num_vars);
        for f in &forms {
            let mut p = vec![Section::constant(k, FieldElement::one())];
            for d in 1..=self.degree as usize {
                let next = p[d - 1].mul(f)?;
                p.push(next);
            }
            powers.push(p);
        }
        let mut out = Section::zero(k, self.degree);
        for (e, c) in &self.coeffs {
            let mut term = Section::constant(k, c.clone());
            for (j, &ej) in e.iter().enumerate() {
                if ej > 0 {
                    term = term.mul(&powers[j][ej as usize])?;
                }
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c})")?;
            for (i, k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*X{i}")?,
                    _ => write!(f, "*X{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// The representative of a projective point whose first coordinate of
/// maximal absolute value equals 1.
pub fn normalize_point(field: &ValuedField, x: &[FieldElement]) -> Result<Vector> {
    let (i, _) = x
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, field.abs(c)))
        .fold(None::<(usize, _)>, |best, (i, m)| match best {
            Some((_, ref b)) if *b >= m => best,
            _ => Some((i, m)),
        })
        .ok_or_else(|| Error::Invalid("the zero vector is not a projective point".into()))?;
    let inv = x[i].inverse().expect("nonzero");
    Ok(x.iter().map(|c| c * &inv).collect())
}

/// A closed subvariety of `P^m` given by rational data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Subvariety {
    /// Finitely many distinct rational points.
    Points(Vec<Vector>),
    /// The common zero set of independent linear forms.
    Linear(Vec<Vector>),
}

impl Subvariety {
    pub fn points(num_vars: usize, points: Vec<Vector>) -> Result<Self> {
        for (i, p) in points.iter().enumerate() {
            if p.len() != num_vars {
                return Err(Error::DimensionMismatch { expected: num_vars, found: p.len() });
            }
            if p.iter().all(FieldElement::is_zero) {
                return Err(Error::Invalid(format!("point {i} has all coordinates zero")));
            }
            for q in &points[..i] {
                if rank_of(&[p.clone(), q.clone()], num_vars) < 2 {
                    return Err(Error::Invalid(format!("point {i} repeats an earlier point")));
                }
            }
        }
        Ok(Subvariety::Points(points))
    }

    pub fn linear(num_vars: usize, forms: Vec<Vector>) -> Result<Self> {
        if let Some(f) = forms.iter().find(|f| f.len() != num_vars) {
            return Err(Error::DimensionMismatch { expected: num_vars, found: f.len() });
        }
        if rank_of(&forms, num_vars) != forms.len() {
            return Err(Error::Invalid("linear forms are dependent".into()));
        }
        Ok(Subvariety::Linear(forms))
    }

    pub fn num_vars(&self) -> Option<usize> {
        match self {
            Subvariety::Points(p) => p.first().map(Vec::len),
            Subvariety::Linear(f) => f.first().map(Vec::len),
        }
    }
}

/// Rows are the points, columns the degree-`n` monomials evaluated there.
pub fn evaluation_matrix(points: &[Vector], num_vars: usize, n: u32) -> Matrix {
    let basis = monomials(num_vars, n);
    let mut m = Matrix::zeros(points.len(), basis.len());
    for (i, p) in points.iter().enumerate() {
        for (j, e) in basis.iter().enumerate() {
            m.set(i, j, monomial_value(e, p));
        }
    }
    m
}

/// Basis (as coefficient vectors) of the degree-`n` sections vanishing on `Y`.
pub fn restriction_kernel(y: &Subvariety, num_vars: usize, n: u32) -> Vec<Vector> {
    match y {
        Subvariety::Points(points) => evaluation_matrix(points, num_vars, n).kernel(),
        Subvariety::Linear(forms) => {
            if n == 0 || forms.is_empty() {
                return Vec::new();
            }
            let lower = monomials(num_vars, n - 1);
            let mut gens = Vec::with_capacity(forms.len() * lower.len());
            for f in forms {
                let lf = Section::linear(f);
                for e in &lower {
                    let prod = lf.mul(&Section::monomial(e.clone(), FieldElement::one())).expect("same variables");
                    gens.push(prod.to_vector());
                }
            }
            let dim = monomials(num_vars, n).len();
            let (rows, pivots) = rref(gens, dim);
            rows.into_iter().take(pivots.len()).collect()
        }
    }
}

/// A section on `Y`, known either through a section of `P^m` restricting to
/// it or through its values at the normalized representatives of `Y`'s
/// points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RestrictedSection {
    Representative(Section),
    PointValues { degree: u32, values: Vector },
}

impl RestrictedSection {
    pub fn degree(&self) -> u32 {
        match self {
            RestrictedSection::Representative(s) => s.degree(),
            RestrictedSection::PointValues { degree, .. } => *degree,
        }
    }

    pub fn power(&self, n: u32) -> RestrictedSection {
        match self {
            RestrictedSection::Representative(s) => RestrictedSection::Representative(s.pow(n)),
            RestrictedSection::PointValues { degree, values } => RestrictedSection::PointValues {
                degree: degree * n,
                values: values.iter().map(|v| v.pow(n)).collect(),
            },
        }
    }

    /// Values at the normalized representatives of the points of `Y`.
    pub fn values_at(&self, field: &ValuedField, points: &[Vector]) -> Result<Vector> {
        match self {
            RestrictedSection::Representative(s) => points
                .iter()
                .map(|p| s.evaluate(&normalize_point(field, p)?))
                .collect(),
            RestrictedSection::PointValues { values, .. } => {
                if values.len() != points.len() {
                    return Err(Error::RepresentativeMismatch);
                }
                Ok(values.clone())
            }
        }
    }

    /// Whether the section is zero on `Y`.
    pub fn vanishes_on(&self, field: &ValuedField, y: &Subvariety) -> Result<bool> {
        match (self, y) {
            (_, Subvariety::Points(points)) => {
                Ok(self.values_at(field, points)?.iter().all(FieldElement::is_zero))
            }
            (RestrictedSection::Representative(s), Subvariety::Linear(_)) => {
                let kernel = restriction_kernel(y, s.num_vars(), s.degree());
                let v = s.to_vector();
                let mut all = kernel.clone();
                all.push(v);
                Ok(rank_of(&all, monomials(s.num_vars(), s.degree()).len()) == kernel.len())
            }
            (RestrictedSection::PointValues { .. }, Subvariety::Linear(_)) => Err(Error::RepresentativeMismatch),
        }
    }
}
