//! Lattices over the valuation ring `Z_(p)` and their correspondence with
//! norms whose unit ball they are.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::NormedSpace;
use crate::error::{Error, Result};
use crate::valued_field::pow_base;
use crate::valued_field::rational::valuation;
use crate::valued_field::{FieldElement, Magnitude, ValuedField};

/// A finitely generated `Z_(p)`-submodule of `Q^dim`, kept in a canonical
/// echelon form: basis vector `j` vanishes above its pivot row, has the pivot
/// entry `p^k`, and every entry of an earlier basis vector in that row is a
/// reduced residue in `Z[1/p] ∩ [0, p^k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    p: u64,
    dim: usize,
    basis: Vec<Vec<BigRational>>,
    pivots: Vec<usize>,
}

impl Lattice {
    pub fn new(field: &ValuedField, dim: usize, generators: &[Vec<FieldElement>]) -> Result<Self> {
        let ValuedField::Padic { p } = *field else {
            return Err(Error::UnsupportedField(field.to_string()));
        };
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
            }
            let row = g
                .iter()
                .map(|x| x.as_rational().cloned().ok_or_else(|| Error::Invalid(format!("{x} is not rational"))))
                .collect::<Result<Vec<_>>>()?;
            gens.push(row);
        }
        let (basis, pivots) = local_hnf(p, dim, gens);
        Ok(Lattice { p, dim, basis, pivots })
    }

    pub fn field(&self) -> ValuedField {
        ValuedField::Padic { p: self.p }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.rank() == self.dim
    }

    /// The canonical basis vectors.
    pub fn basis(&self) -> Vec<Vec<FieldElement>> {
        self.basis
            .iter()
            .map(|b| b.iter().cloned().map(FieldElement::from).collect())
            .collect()
    }

    pub fn contains(&self, v: &[FieldElement]) -> bool {
        if v.len() != self.dim {
            return false;
        }
        let Some(mut v) = v.iter().map(|x| x.as_rational().cloned()).collect::<Option<Vec<_>>>() else {
            return false;
        };
        for (b, &row) in self.basis.iter().zip(&self.pivots) {
            if v[row].is_zero() {
                continue;
            }
            let c = &v[row] / &b[row];
            if valuation(&c, self.p).is_some_and(|k| k < 0) {
                return false;
            }
            for (x, y) in v.iter_mut().zip(b) {
                *x -= &c * y;
            }
        }
        v.iter().all(Zero::is_zero)
    }
}

/// Echelon basis over `Z_(p)` with canonical off-pivot residues.
fn local_hnf(p: u64, dim: usize, gens: Vec<Vec<BigRational>>) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut rest: Vec<Vec<BigRational>> = gens.into_iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
    let mut basis: Vec<Vec<BigRational>> = Vec::new();
    let mut pivots = Vec::new();
    for row in 0..dim {
        let Some(idx) = rest
            .iter()
            .enumerate()
            .filter_map(|(i, g)| valuation(&g[row], p).map(|v| (v, i)))
            .min()
            .map(|(_, i)| i)
        else {
            continue;
        };
        let mut col = rest.remove(idx);
        let k = valuation(&col[row], p).expect("nonzero pivot");
        let unit = &col[row] / pow_base(p, k);
        for x in col.iter_mut() {
            *x = &*x / &unit;
        }
        for other in rest.iter_mut() {
            if other[row].is_zero() {
                continue;
            }
            let f = &other[row] / &col[row];
            for (x, y) in other.iter_mut().zip(&col) {
                *x -= &f * y;
            }
        }
        rest.retain(|g| g.iter().any(|x| !x.is_zero()));
        basis.push(col);
        pivots.push(row);
    }
    for j in 0..basis.len() {
        let row = pivots[j];
        let k = valuation(&basis[j][row], p).expect("nonzero pivot");
        for i in 0..j {
            let x = basis[i][row].clone();
            let y = residue(&x, p, k);
            if x != y {
                let m = (&x - &y) / pow_base(p, k);
                let pivot_col = basis[j].clone();
                for (a, b) in basis[i].iter_mut().zip(&pivot_col) {
                    *a -= &m * b;
                }
            }
        }
    }
    (basis, pivots)
}

/// The representative of `x + p^k·Z_(p)` in `Z[1/p] ∩ [0, p^k)`.
fn residue(x: &BigRational, p: u64, k: i64) -> BigRational {
    if x.is_zero() {
        return BigRational::zero();
    }
    // x = a / (b'·p^N) with p ∤ b'; the residue is c / p^N with
    // c ≡ a·b'^{-1} (mod p^{N+k}) and 0 ≤ c < p^{N+k}.
    let pb = BigInt::from(p);
    let mut den = x.denom().clone();
    let mut n = 0i64;
    while (&den % &pb).is_zero() {
        den /= &pb;
        n += 1;
    }
    let a = x.numer().clone();
    let e = n + k;
    if e <= 0 {
        return BigRational::zero();
    }
    let modulus = num_traits::pow(pb, e as usize);
    let inv = mod_inverse(&den, &modulus);
    let c = (a * inv).mod_floor(&modulus);
    BigRational::new(c, BigInt::from(p).pow(n as u32))
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> BigInt {
    let g = a.extended_gcd(m);
    debug_assert!(g.gcd.is_one() || (-&g.gcd).is_one());
    let x = if g.gcd.is_negative() { -g.x } else { g.x };
    x.mod_floor(m)
}

/// The norm whose unit ball is the (full-rank) lattice: its basis with unit
/// weights.
pub fn norm_from_lattice(lattice: &Lattice) -> Result<NormedSpace> {
    if !lattice.is_full() {
        return Err(Error::Invalid(format!(
            "lattice of rank {} does not span a space of dimension {}",
            lattice.rank(),
            lattice.dim
        )));
    }
    NormedSpace::from_vectors(lattice.field(), &lattice.basis(), vec![Magnitude::one(); lattice.dim])
}

/// The unit ball `{x : ‖x‖ ≤ 1}`, spanned by the orthogonal basis vectors
/// each scaled by the smallest power `p^k` bringing its norm to at most 1.
pub fn lattice_from_norm(space: &NormedSpace) -> Result<Lattice> {
    let field = space.field().clone();
    let ValuedField::Padic { p } = field else {
        return Err(Error::UnsupportedField(field.to_string()));
    };
    let gens: Vec<Vec<FieldElement>> = space
        .basis_vectors()
        .into_iter()
        .zip(space.weights())
        .map(|(g, w)| {
            let k = ceil_log(w.value(), p);
            let s = FieldElement::from(pow_base(p, k));
            g.iter().map(|x| &s * x).collect()
        })
        .collect();
    Lattice::new(&field, space.dim(), &gens)
}

/// Smallest `k` with `w ≤ p^k`.
fn ceil_log(w: &BigRational, p: u64) -> i64 {
    let mut k = 0i64;
    while &pow_base(p, k) < w {
        k += 1;
    }
    while &pow_base(p, k - 1) >= w {
        k -= 1;
    }
    k
}
