//! Adelically normed vector spaces over `Q`: finitely many non-standard
//! `p`-adic norms, a polyhedral archimedean norm, the lattice of vectors of
//! norm at most 1 at every finite place, and the `λ` invariants of that
//! lattice.

mod graded;
mod lambda;
pub mod simplex;
mod zlattice;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub use graded::{decay_fit, graded_lambda_table, lambda_row, nakai_basis_search, DecayFit, GradedFixture, LambdaRow, NakaiOutcome};
pub use lambda::{lambda_q, lambda_z, reduction_upper_bound, LambdaBound, LambdaResult, DEFAULT_RANK_BOUND};
pub use zlattice::{dot, QVector, ZLattice};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::ultranorm::{lattice_from_norm, quotient_norm, Lattice, NormedSpace};
use crate::valued_field::{FieldElement, ValuedField};
use simplex::{maximize, Constraint, LpOutcome, Relation};

type Q = BigRational;

/// `‖y‖ = min { max_i |φ_i(z)| : F z = y }`, a polyhedral norm presented as
/// the image of `z ↦ max |φ_i(z)|` under a surjection `F` (the identity when
/// absent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArchimedeanNorm {
    functionals: Vec<QVector>,
    projection: Option<Vec<QVector>>,
}

impl ArchimedeanNorm {
    /// `max_i |φ_i(x)|`; the functionals must span the dual space.
    pub fn polyhedral(dim: usize, functionals: Vec<QVector>) -> Result<Self> {
        if let Some(f) = functionals.iter().find(|f| f.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: f.len() });
        }
        if rational_rank(&functionals, dim) != dim {
            return Err(Error::Invalid("archimedean functionals do not define a norm".into()));
        }
        Ok(ArchimedeanNorm { functionals, projection: None })
    }

    /// `c·max_i |x_i|`.
    pub fn scaled_sup(dim: usize, c: &Q) -> Result<Self> {
        if !c.is_positive() {
            return Err(Error::NonPositiveWeight);
        }
        let functionals = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { c.clone() } else { Q::zero() }).collect())
            .collect();
        ArchimedeanNorm::polyhedral(dim, functionals)
    }

    pub fn source_dim(&self) -> usize {
        self.functionals.first().map_or(0, Vec::len)
    }

    pub fn dim(&self) -> usize {
        self.projection.as_ref().map_or(self.source_dim(), Vec::len)
    }

    pub fn functionals(&self) -> &[QVector] {
        &self.functionals
    }

    pub fn projection(&self) -> Option<&[QVector]> {
        self.projection.as_deref()
    }

    /// The quotient norm along the surjection with the given rows.
    pub fn quotient(&self, rows: &[QVector]) -> Result<ArchimedeanNorm> {
        let projection = match &self.projection {
            None => rows.to_vec(),
            Some(f) => rows
                .iter()
                .map(|r| (0..self.source_dim()).map(|j| f.iter().zip(r).fold(Q::zero(), |acc, (fr, x)| acc + x * &fr[j])).collect())
                .collect(),
        };
        Ok(ArchimedeanNorm { functionals: self.functionals.clone(), projection: Some(projection) })
    }

    pub fn norm(&self, y: &[Q]) -> Result<Q> {
        if y.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: y.len() });
        }
        let Some(f) = &self.projection else {
            return Ok(self.functionals.iter().map(|phi| dot(phi, y).abs()).max().unwrap_or_else(Q::zero));
        };
        if y.iter().all(Zero::is_zero) {
            return Ok(Q::zero());
        }
        // variables (z, t): maximize -t with |φ_i z| ≤ t and F z = y
        let s = self.source_dim();
        let mut cons = Vec::new();
        for phi in &self.functionals {
            for sign in [1i64, -1] {
                let sg = Q::from_integer(sign.into());
                let mut row: Vec<Q> = phi.iter().map(|x| x * &sg).collect();
                row.push(Q::from_integer((-1).into()));
                cons.push(Constraint::new(row, Relation::Le, Q::zero()));
            }
        }
        for (row, yi) in f.iter().zip(y) {
            let mut r = row.clone();
            r.push(Q::zero());
            cons.push(Constraint::new(r, Relation::Eq, yi.clone()));
        }
        let mut obj = vec![Q::zero(); s + 1];
        obj[s] = Q::from_integer((-1).into());
        match maximize(&obj, &cons)? {
            LpOutcome::Optimal { value, .. } => Ok(-value),
            LpOutcome::Infeasible => Err(Error::LinearProgram("projection is not surjective")),
            LpOutcome::Unbounded => Err(Error::LinearProgram("functionals do not bound the source")),
        }
    }

    /// `max { ψ·c : ‖B c‖ ≤ 1 }` where `B` has the given columns.
    pub fn ball_max(&self, columns: &[QVector], psi: &[Q]) -> Result<Q> {
        let k = columns.len();
        let s = self.source_dim();
        let mut cons = Vec::new();
        let mut obj: Vec<Q> = psi.to_vec();
        match &self.projection {
            None => {
                // variables c: |φ(B c)| ≤ 1
                for phi in &self.functionals {
                    let row: Vec<Q> = columns.iter().map(|b| dot(phi, b)).collect();
                    cons.push(Constraint::new(row.clone(), Relation::Le, Q::one()));
                    cons.push(Constraint::new(row.iter().map(|x| -x).collect(), Relation::Le, Q::one()));
                }
            }
            Some(f) => {
                // variables (c, z): |φ z| ≤ 1, F z − B c = 0
                for phi in &self.functionals {
                    let mut row = vec![Q::zero(); k];
                    row.extend(phi.iter().cloned());
                    cons.push(Constraint::new(row.clone(), Relation::Le, Q::one()));
                    cons.push(Constraint::new(row.iter().map(|x| -x).collect(), Relation::Le, Q::one()));
                }
                for (i, frow) in f.iter().enumerate() {
                    let mut row: Vec<Q> = columns.iter().map(|b| -&b[i]).collect();
                    row.extend(frow.iter().cloned());
                    cons.push(Constraint::new(row, Relation::Eq, Q::zero()));
                }
                obj.extend(std::iter::repeat_n(Q::zero(), s));
            }
        }
        match maximize(&obj, &cons)? {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Err(Error::LinearProgram("unit ball is empty")),
            LpOutcome::Unbounded => Err(Error::LinearProgram("unit ball is unbounded")),
        }
    }
}

pub(crate) fn rational_rank(vectors: &[QVector], dim: usize) -> usize {
    let rows: Vec<Vec<FieldElement>> = vectors
        .iter()
        .map(|v| v.iter().cloned().map(FieldElement::from).collect())
        .collect();
    crate::linalg::rank_of(&rows, dim)
}

/// A `Q`-vector space with a norm at every place: the configured primes carry
/// the given norms, every other prime the standard norm on `Z_(p)^r`.
#[derive(Clone, Debug)]
pub struct AdelicSpace {
    dim: usize,
    finite: BTreeMap<u64, NormedSpace>,
    arch: ArchimedeanNorm,
}

impl AdelicSpace {
    pub fn new(dim: usize, finite: BTreeMap<u64, NormedSpace>, arch: ArchimedeanNorm) -> Result<Self> {
        for (&p, space) in &finite {
            if *space.field() != ValuedField::padic(p)? {
                return Err(Error::Invalid(format!("the norm attached to {p} is over {}", space.field())));
            }
            if space.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: space.dim() });
            }
        }
        if arch.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: arch.dim() });
        }
        Ok(AdelicSpace { dim, finite, arch })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn finite(&self) -> &BTreeMap<u64, NormedSpace> {
        &self.finite
    }

    pub fn arch(&self) -> &ArchimedeanNorm {
        &self.arch
    }

    /// The norm at `p`, standard when not configured.
    pub fn local(&self, p: u64) -> Result<NormedSpace> {
        match self.finite.get(&p) {
            Some(s) => Ok(s.clone()),
            None => Ok(NormedSpace::orthonormal(ValuedField::padic(p)?, self.dim)),
        }
    }
}

/// A lattice in `Q^r` with an archimedean norm.
#[derive(Clone, Debug)]
pub struct NormedLattice {
    pub lattice: ZLattice,
    pub arch: ArchimedeanNorm,
}

impl NormedLattice {
    pub fn new(lattice: ZLattice, arch: ArchimedeanNorm) -> Result<Self> {
        if lattice.dim() != arch.dim() {
            return Err(Error::DimensionMismatch { expected: lattice.dim(), found: arch.dim() });
        }
        Ok(NormedLattice { lattice, arch })
    }
}

fn to_field(v: &[Q]) -> Vec<FieldElement> {
    v.iter().cloned().map(FieldElement::from).collect()
}

fn to_rational(v: &[FieldElement]) -> QVector {
    v.iter().map(|x| x.as_rational().cloned().expect("rational entry")).collect()
}

/// The lattice whose localization is `L_p` at `p` and `(1/away)·Z_(ℓ)^r` at
/// every other prime `ℓ`, for a full-rank `Z_(p)`-lattice `L_p` and an
/// integer `away` prime to `p`.
fn global_lattice_at(p: u64, local: &Lattice, away: &BigInt) -> Result<ZLattice> {
    let dim = local.dim();
    let basis: Vec<QVector> = local.basis().iter().map(|b| to_rational(b)).collect();
    let pb = BigInt::from(p);
    // clear the prime-to-p part of denominators: a unit at p
    let mut gens: Vec<QVector> = basis
        .iter()
        .map(|b| {
            let mut d = BigInt::one();
            for x in b {
                let mut den = x.denom().clone();
                while (&den % &pb).is_zero() {
                    den /= &pb;
                }
                d = num_integer::Integer::lcm(&d, &den);
            }
            b.iter().map(|x| x * Q::from_integer(d.clone())).collect()
        })
        .collect();
    // p^a Z^r ⊂ L_p once p^a·B⁻¹ is p-integral
    let inv = zlattice::invert(&basis)?;
    let worst = inv
        .iter()
        .flatten()
        .filter_map(|x| crate::valued_field::rational::valuation(x, p))
        .min()
        .unwrap_or(0);
    let a = (-worst).max(0);
    let pa = crate::valued_field::pow_base(p, a) / Q::from_integer(away.clone());
    for i in 0..dim {
        gens.push((0..dim).map(|j| if i == j { pa.clone() } else { Q::zero() }).collect());
    }
    ZLattice::new(dim, &gens)
}

/// The lattice of vectors whose norm is at most 1 at every finite place,
/// with the archimedean norm attached.
pub fn finite_unit_lattice(space: &AdelicSpace) -> Result<NormedLattice> {
    let locals = space
        .finite
        .iter()
        .map(|(&p, s)| Ok((p, lattice_from_norm(s)?)))
        .collect::<Result<Vec<_>>>()?;
    // p^{e_p}·L_p ⊂ Z_(p)^r
    let spread: Vec<BigInt> = locals
        .iter()
        .map(|(p, l)| {
            let e = l
                .basis()
                .iter()
                .flatten()
                .filter_map(|x| crate::valued_field::rational::valuation(x.as_rational().expect("rational entry"), *p))
                .min()
                .map_or(0, |v| (-v).max(0));
            num_traits::pow(BigInt::from(*p), e as usize)
        })
        .collect();
    // each factor is L_p at p and contains L_q at every other configured q,
    // so the intersection localizes correctly everywhere
    let mut lattice: Option<ZLattice> = None;
    for (i, (p, local)) in locals.iter().enumerate() {
        let away: BigInt = spread.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, d)| d).product();
        let at_p = global_lattice_at(*p, local, &away)?;
        lattice = Some(match lattice {
            None => at_p,
            Some(l) => l.intersect(&at_p)?,
        });
    }
    let lattice = lattice.unwrap_or_else(|| ZLattice::standard(space.dim));
    NormedLattice::new(lattice, space.arch.clone())
}

/// Whether the lattice, tensored with `Z_(p)`, is the unit ball at `p`.
pub fn localization_matches(space: &AdelicSpace, lattice: &ZLattice, p: u64) -> Result<bool> {
    let field = ValuedField::padic(p)?;
    let local = Lattice::new(&field, space.dim, &lattice.basis().iter().map(|b| to_field(b)).collect::<Vec<_>>())?;
    Ok(local == lattice_from_norm(&space.local(p)?)?)
}

/// Primes dividing a nonzero integer, by trial division.
pub fn prime_factors(n: &BigInt) -> BTreeSet<u64> {
    let mut out = BTreeSet::new();
    let mut n = n.abs();
    let mut d = 2u64;
    while BigInt::from(d) * BigInt::from(d) <= n {
        let bd = BigInt::from(d);
        if (&n % &bd).is_zero() {
            out.insert(d);
            while (&n % &bd).is_zero() {
                n /= &bd;
            }
        }
        d += 1;
    }
    if n > BigInt::one() {
        out.insert(u64::try_from(n).expect("prime factor fits in u64"));
    }
    out
}

/// `f(Z^r)`-relevant primes: those where the image of the standard lattice
/// differs from the standard lattice of the target.
fn exceptional_primes(rows: &[QVector], source_dim: usize) -> Result<BTreeSet<u64>> {
    let image = ZLattice::standard(source_dim).image(rows)?;
    let mut primes = BTreeSet::new();
    for x in image.basis().iter().flatten() {
        primes.extend(prime_factors(x.denom()));
    }
    let cov = image.covolume();
    primes.extend(prime_factors(cov.numer()));
    primes.extend(prime_factors(cov.denom()));
    Ok(primes)
}

/// The quotient along a surjection `f` (rows), with the quotient norm at
/// every place. The identity `f(unit lattice) = unit lattice of the
/// quotient` is verified before returning.
pub fn quotient_adelic(space: &AdelicSpace, rows: &[QVector]) -> Result<AdelicSpace> {
    let t = rows.len();
    if let Some(r) = rows.iter().find(|r| r.len() != space.dim) {
        return Err(Error::DimensionMismatch { expected: space.dim, found: r.len() });
    }
    let rank = rational_rank(rows, space.dim);
    if rank != t {
        return Err(Error::NotSurjective { rank, target: t });
    }
    let f = Matrix::from_rows(rows.iter().map(|r| to_field(r)).collect(), space.dim)?;
    let mut primes: BTreeSet<u64> = space.finite.keys().copied().collect();
    primes.extend(exceptional_primes(rows, space.dim)?);
    let mut finite = BTreeMap::new();
    for p in primes {
        let q = quotient_norm(&space.local(p)?, &f)?;
        finite.insert(p, q.target().clone());
    }
    let quotient = AdelicSpace::new(t, finite, space.arch.quotient(rows)?)?;
    let source = finite_unit_lattice(space)?.lattice;
    let target = finite_unit_lattice(&quotient)?.lattice;
    if source.image(rows)? != target {
        return Err(Error::Invalid("image of the unit lattice differs from the quotient's unit lattice".into()));
    }
    Ok(quotient)
}

/// `∏_{p ∈ Σ} p`: positive valuation exactly at the primes of `Σ`.
pub fn support_unit(primes: &BTreeSet<u64>) -> BigInt {
    primes.iter().fold(BigInt::one(), |acc, &p| acc * BigInt::from(p))
}
