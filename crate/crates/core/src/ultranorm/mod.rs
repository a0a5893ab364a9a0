//! Finite-dimensional ultrametric normed spaces.
//!
//! A norm is always stored through an orthogonal basis `(e_1, …, e_r)` and
//! weights `w_i = ‖e_i‖`, so that `‖Σ a_i e_i‖ = max |a_i|·w_i`. Every
//! operation here (flag orthogonalization, distances, quotients, duals) is a
//! variant of one valuated Gaussian elimination that keeps this form exact.

mod lattice;

use std::collections::BTreeSet;

pub use lattice::{lattice_from_norm, norm_from_lattice, Lattice};

use crate::error::{Error, Result};
use crate::linalg::{self, axpy_neg, combine, complete_with_units, zero_vector, Matrix, Vector};
use crate::valued_field::{laurent_base_admissible, FieldElement, Magnitude, ValuedField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormedSpace {
    field: ValuedField,
    basis: Matrix,
    weights: Vec<Magnitude>,
    inverse: Matrix,
    standard: bool,
}

impl NormedSpace {
    /// `basis` holds the orthogonal vectors as columns, in ambient coordinates.
    pub fn new(field: ValuedField, basis: Matrix, weights: Vec<Magnitude>) -> Result<Self> {
        if basis.rows() != basis.cols() {
            return Err(Error::DimensionMismatch { expected: basis.rows(), found: basis.cols() });
        }
        if weights.len() != basis.cols() {
            return Err(Error::DimensionMismatch { expected: basis.cols(), found: weights.len() });
        }
        if weights.iter().any(Magnitude::is_zero) {
            return Err(Error::NonPositiveWeight);
        }
        for j in 0..basis.cols() {
            if let Some(x) = basis.column(j).iter().find(|x| !field.contains(x)) {
                return Err(Error::Invalid(format!("{x} is not an element of {field}")));
            }
        }
        let standard = basis == Matrix::identity(basis.rows());
        let inverse = if standard { basis.clone() } else { basis.inverse()? };
        Ok(NormedSpace { field, basis, weights, inverse, standard })
    }

    pub fn from_vectors(field: ValuedField, vectors: &[Vector], weights: Vec<Magnitude>) -> Result<Self> {
        let basis = Matrix::from_columns(vectors, vectors.len())?;
        NormedSpace::new(field, basis, weights)
    }

    /// The standard basis with the given weights.
    pub fn diagonal(field: ValuedField, weights: Vec<Magnitude>) -> Result<Self> {
        let n = weights.len();
        NormedSpace::new(field, Matrix::identity(n), weights)
    }

    pub fn orthonormal(field: ValuedField, dim: usize) -> Self {
        NormedSpace::diagonal(field, vec![Magnitude::one(); dim]).expect("identity is invertible")
    }

    pub fn field(&self) -> &ValuedField {
        &self.field
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn basis_vectors(&self) -> Vec<Vector> {
        self.basis.columns()
    }

    pub fn weights(&self) -> &[Magnitude] {
        &self.weights
    }

    /// Whether the basis is the standard one.
    pub fn is_diagonal(&self) -> bool {
        self.standard
    }

    /// Coordinates of `v` in the orthogonal basis.
    pub fn coordinates(&self, v: &[FieldElement]) -> Result<Vector> {
        if self.standard {
            return check_len(v, self.dim()).map(|()| v.to_vec());
        }
        self.inverse.mul_vec(v)
    }

    /// `max_i |c_i|·w_i` for coordinates `c`.
    pub fn weighted_max(&self, coords: &[FieldElement]) -> Magnitude {
        coords
            .iter()
            .zip(&self.weights)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, w)| self.field.abs(c).mul(w))
            .max()
            .unwrap_or_else(Magnitude::zero)
    }

    pub fn norm(&self, v: &[FieldElement]) -> Result<Magnitude> {
        Ok(self.weighted_max(&self.coordinates(v)?))
    }

    /// The vector with coordinates `coords`.
    pub fn vector(&self, coords: &[FieldElement]) -> Result<Vector> {
        if self.standard {
            return check_len(coords, self.dim()).map(|()| coords.to_vec());
        }
        self.basis.mul_vec(coords)
    }

    /// Same basis and weights read over another field.
    pub(crate) fn reinterpret(&self, field: ValuedField) -> NormedSpace {
        NormedSpace { field, ..self.clone() }
    }

    /// Replaces the weights, keeping the basis.
    pub fn with_weights(&self, weights: Vec<Magnitude>) -> Result<NormedSpace> {
        NormedSpace::new(self.field.clone(), self.basis.clone(), weights)
    }

    /// Every weight multiplied by `c`.
    pub fn scaled(&self, c: &Magnitude) -> Result<NormedSpace> {
        self.with_weights(self.weights.iter().map(|w| w.mul(c)).collect())
    }
}

fn check_len(v: &[FieldElement], dim: usize) -> Result<()> {
    if v.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: v.len() });
    }
    Ok(())
}

/// Index and value of the dominant weighted coordinate; ties go to the lowest
/// index.
fn dominant(space: &NormedSpace, coords: &[FieldElement]) -> Option<(usize, Magnitude)> {
    let mut best: Option<(usize, Magnitude)> = None;
    for (j, c) in coords.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let m = space.field.abs(c).mul(&space.weights[j]);
        if best.as_ref().is_none_or(|(_, b)| m > *b) {
            best = Some((j, m));
        }
    }
    best
}

/// Rows in coordinates, each vanishing at the pivots of the rows before it
/// and dominated by its own pivot coordinate.
struct Echelon<'a> {
    space: &'a NormedSpace,
    rows: Vec<(Vector, usize)>,
}

impl<'a> Echelon<'a> {
    fn new(space: &'a NormedSpace) -> Self {
        Echelon { space, rows: Vec::new() }
    }

    /// Clears every pivot coordinate of `c`; the result realizes the distance
    /// from `c` to the span of the rows.
    fn reduce(&self, mut c: Vector) -> Vector {
        for (row, piv) in &self.rows {
            if c[*piv].is_zero() {
                continue;
            }
            let f = &c[*piv] / &row[*piv];
            axpy_neg(&mut c, &f, row);
        }
        c
    }

    /// Appends an already reduced row; `None` if it is zero.
    fn push(&mut self, reduced: Vector) -> Option<Magnitude> {
        let (piv, m) = dominant(self.space, &reduced)?;
        self.rows.push((reduced, piv));
        Some(m)
    }
}

/// Orthogonal vectors with their norms, possibly spanning a proper subspace.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrthogonalFamily {
    pub field: ValuedField,
    pub vectors: Vec<Vector>,
    pub weights: Vec<Magnitude>,
}

impl OrthogonalFamily {
    /// The norm this family defines when it is a basis of the ambient space.
    pub fn to_space(&self) -> Result<NormedSpace> {
        NormedSpace::from_vectors(self.field.clone(), &self.vectors, self.weights.clone())
    }
}

/// Orthogonal basis `(g_1, …, g_s)` of `span(flag)` with
/// `span(g_1..g_i) = span(f_1..f_i)` for every `i`.
///
/// A flag vector that already realizes its distance to the previous span is
/// kept as is; otherwise it is replaced by its reduction.
pub fn orthogonalize_flag(space: &NormedSpace, flag: &[Vector]) -> Result<OrthogonalFamily> {
    let mut ech = Echelon::new(space);
    let mut vectors = Vec::with_capacity(flag.len());
    let mut weights = Vec::with_capacity(flag.len());
    for (index, f) in flag.iter().enumerate() {
        if f.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: f.len() });
        }
        let coords = space.coordinates(f)?;
        let reduced = ech.reduce(coords.clone());
        let own = space.weighted_max(&coords);
        let vec = if own == space.weighted_max(&reduced) {
            f.clone()
        } else {
            space.vector(&reduced)?
        };
        let w = ech.push(reduced).ok_or(Error::DependentVectors { index })?;
        vectors.push(vec);
        weights.push(w);
    }
    Ok(OrthogonalFamily { field: space.field.clone(), vectors, weights })
}

/// `min_{w ∈ W} ‖x − w‖` together with a minimizer, where `W` is spanned by
/// `generators` (dependent generators are allowed).
pub fn distance_to_subspace(
    space: &NormedSpace,
    x: &[FieldElement],
    generators: &[Vector],
) -> Result<(Magnitude, Vector)> {
    let mut ech = Echelon::new(space);
    for g in generators {
        if g.len() != space.dim() {
            return Err(Error::DimensionMismatch { expected: space.dim(), found: g.len() });
        }
        let r = ech.reduce(space.coordinates(g)?);
        ech.push(r);
    }
    let coords = space.coordinates(x)?;
    let reduced = ech.reduce(coords.clone());
    let d = space.weighted_max(&reduced);
    if space.weighted_max(&coords) == d {
        return Ok((d, zero_vector(space.dim())));
    }
    let rest = space.vector(&reduced)?;
    Ok((d, linalg::sub(x, &rest)))
}

/// Quotient norm on the target of a surjection, with norm-attaining lifts.
#[derive(Clone, Debug)]
pub struct QuotientNorm {
    target: NormedSpace,
    lifts: Vec<Vector>,
}

impl QuotientNorm {
    pub fn target(&self) -> &NormedSpace {
        &self.target
    }

    /// Source vectors mapping onto the target's orthogonal basis.
    pub fn basis_lifts(&self) -> &[Vector] {
        &self.lifts
    }

    /// `x` with `π(x) = y` and `‖x‖ = ‖y‖_quot`.
    pub fn lift(&self, y: &[FieldElement]) -> Result<Vector> {
        let coords = self.target.coordinates(y)?;
        let dim = self.lifts.first().map_or(0, Vec::len);
        Ok(combine(&coords, &self.lifts, dim))
    }

    pub fn norm(&self, y: &[FieldElement]) -> Result<Magnitude> {
        self.target.norm(y)
    }
}

/// Quotient of `space` along the surjection `π` (rows = target coordinates).
///
/// An orthogonal basis compatible with `ker π` is built first; the images of
/// the remaining basis vectors are then orthogonal for the quotient norm with
/// the same weights.
pub fn quotient_norm(space: &NormedSpace, surjection: &Matrix) -> Result<QuotientNorm> {
    if surjection.cols() != space.dim() {
        return Err(Error::DimensionMismatch { expected: space.dim(), found: surjection.cols() });
    }
    let t = surjection.rows();
    let rank = surjection.rank();
    if rank != t {
        return Err(Error::NotSurjective { rank, target: t });
    }
    let kernel = surjection.kernel();
    let mut flag = kernel.clone();
    flag.extend(complete_with_units(&kernel, space.dim()));
    let fam = orthogonalize_flag(space, &flag)?;
    let k = kernel.len();
    let lifts: Vec<Vector> = fam.vectors[k..].to_vec();
    let images = lifts
        .iter()
        .map(|g| surjection.mul_vec(g))
        .collect::<Result<Vec<_>>>()?;
    let target = NormedSpace::new(
        space.field.clone(),
        Matrix::from_columns(&images, t)?,
        fam.weights[k..].to_vec(),
    )?;
    Ok(QuotientNorm { target, lifts })
}

/// The dual norm, on coefficient vectors of functionals `φ(v) = Σ φ_i v_i`.
/// The dual basis `(e_i^∨)` is orthogonal with weights `1/w_i`.
pub fn dual_norm(space: &NormedSpace) -> Result<NormedSpace> {
    let weights = space.weights.iter().map(Magnitude::recip).collect::<Result<Vec<_>>>()?;
    NormedSpace::new(space.field.clone(), space.inverse.transpose(), weights)
}

/// The canonical pairing between a functional and a vector.
pub fn pairing(functional: &[FieldElement], v: &[FieldElement]) -> FieldElement {
    linalg::dot(functional, v)
}

/// The scalar extension of a trivially valued space to `Q((T))`, `|T| = 1/P`.
///
/// The orthogonal basis and weights are kept; `P` must not make any ratio of
/// two weights a power of `|T|`.
pub fn scalar_extension(space: &NormedSpace, target: &ValuedField) -> Result<NormedSpace> {
    if !space.field.is_trivial() {
        return Err(Error::UnsupportedField(space.field.to_string()));
    }
    let ValuedField::Laurent { base_prime } = *target else {
        return Err(Error::UnsupportedField(target.to_string()));
    };
    if !laurent_base_admissible(&space.weights, base_prime) {
        return Err(Error::LaurentBaseViolation(base_prime));
    }
    Ok(space.reinterpret(target.clone()))
}

/// The set of norm values of a space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NormValueSet {
    /// Every value, zero included (trivial valuation, or dimension zero).
    Exact(BTreeSet<Magnitude>),
    /// Representatives of the cosets `w·ρ^Z`, each with exponent zero.
    Cosets { base_prime: u64, representatives: BTreeSet<Magnitude> },
}

impl NormValueSet {
    /// The finite set of nonzero values or coset representatives.
    pub fn nonzero(&self) -> Vec<Magnitude> {
        match self {
            NormValueSet::Exact(s) => s.iter().filter(|m| !m.is_zero()).cloned().collect(),
            NormValueSet::Cosets { representatives, .. } => representatives.iter().cloned().collect(),
        }
    }
}

pub fn norm_value_set(space: &NormedSpace) -> NormValueSet {
    match space.field.base_prime() {
        Some(b) if space.dim() > 0 => {
            let representatives = space
                .weights
                .iter()
                .map(|w| {
                    let (q, _) = w.parts(Some(b)).expect("positive weight");
                    Magnitude::new(q).expect("positive")
                })
                .collect();
            NormValueSet::Cosets { base_prime: b, representatives }
        }
        _ => {
            let mut s: BTreeSet<Magnitude> = space.weights.iter().cloned().collect();
            s.insert(Magnitude::zero());
            NormValueSet::Exact(s)
        }
    }
}
