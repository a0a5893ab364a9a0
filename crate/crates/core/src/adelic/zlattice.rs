//! Finitely generated subgroups of `Q^r` in Hermite normal form.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type QVector = Vec<BigRational>;

/// A `Z`-lattice in `Q^dim` stored by its canonical basis: basis vector `j`
/// vanishes above its pivot row, has a positive pivot, and every earlier
/// basis vector has its entry in that row reduced into `[0, pivot)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ZLattice {
    dim: usize,
    basis: Vec<QVector>,
    pivots: Vec<usize>,
}

fn lcm_of_denominators<'a>(vs: impl IntoIterator<Item = &'a QVector>) -> BigInt {
    vs.into_iter()
        .flatten()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
}

impl ZLattice {
    pub fn new(dim: usize, generators: &[QVector]) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
        }
        let d = lcm_of_denominators(generators);
        let ints: Vec<Vec<BigInt>> = generators
            .iter()
            .map(|g| g.iter().map(|x| (x * BigRational::from_integer(d.clone())).to_integer()).collect())
            .collect();
        let (basis, pivots) = integer_hnf(dim, ints);
        let basis = basis
            .into_iter()
            .map(|b| b.into_iter().map(|x| BigRational::new(x, d.clone())).collect())
            .collect();
        Ok(ZLattice { dim, basis, pivots })
    }

    /// `Z^dim`.
    pub fn standard(dim: usize) -> Self {
        let gens: Vec<QVector> = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
            .collect();
        ZLattice::new(dim, &gens).expect("square generators")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QVector] {
        &self.basis
    }

    /// Integer coordinates of `v` in the canonical basis, if `v` lies in the
    /// lattice.
    pub fn coordinates(&self, v: &[BigRational]) -> Option<Vec<BigInt>> {
        if v.len() != self.dim {
            return None;
        }
        let mut rest = v.to_vec();
        let mut coords = Vec::with_capacity(self.rank());
        for (b, &row) in self.basis.iter().zip(&self.pivots) {
            let c = &rest[row] / &b[row];
            if !c.is_integer() {
                return None;
            }
            if !c.is_zero() {
                for (x, y) in rest.iter_mut().zip(b) {
                    *x -= &c * y;
                }
            }
            coords.push(c.to_integer());
        }
        rest.iter().all(Zero::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.coordinates(v).is_some()
    }

    pub fn sum(&self, other: &ZLattice) -> Result<ZLattice> {
        let mut gens = self.basis.clone();
        gens.extend(other.basis.iter().cloned());
        ZLattice::new(self.dim, &gens)
    }

    /// Image under the linear map with the given rows.
    pub fn image(&self, rows: &[QVector]) -> Result<ZLattice> {
        let t = rows.len();
        let gens: Vec<QVector> = self
            .basis
            .iter()
            .map(|b| rows.iter().map(|r| dot(r, b)).collect())
            .collect();
        ZLattice::new(t, &gens)
    }

    /// The dual lattice `{y : y·x ∈ Z for all x}` of a full-rank lattice.
    pub fn dual(&self) -> Result<ZLattice> {
        if self.rank() != self.dim {
            return Err(Error::Invalid("only full-rank lattices have a dual here".into()));
        }
        let inv = invert(&self.basis)?;
        // rows of B⁻¹ are the dual basis
        ZLattice::new(self.dim, &inv)
    }

    /// Intersection of full-rank lattices, through `(L^∨ + M^∨)^∨`.
    pub fn intersect(&self, other: &ZLattice) -> Result<ZLattice> {
        self.dual()?.sum(&other.dual()?)?.dual()
    }

    /// `|det|` of the canonical basis for a full-rank lattice.
    pub fn covolume(&self) -> BigRational {
        self.basis
            .iter()
            .zip(&self.pivots)
            .fold(BigRational::one(), |acc, (b, &r)| acc * &b[r])
    }
}

pub fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter()
        .zip(b)
        .filter(|(x, y)| !x.is_zero() && !y.is_zero())
        .fold(BigRational::zero(), |acc, (x, y)| acc + x * y)
}

/// Inverse of the matrix whose columns are `cols`, returned as its rows.
pub fn invert(cols: &[QVector]) -> Result<Vec<QVector>> {
    let n = cols.len();
    // a = Bᵀ; (Bᵀ)⁻¹ has the rows of B⁻¹ as columns
    let mut a: Vec<QVector> = cols.to_vec();
    let mut inv: Vec<QVector> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(Error::SingularBasis)?;
        a.swap(col, piv);
        inv.swap(col, piv);
        let p = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &p;
        }
        for x in inv[col].iter_mut() {
            *x *= &p;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            let (pa, pi) = (a[col].clone(), inv[col].clone());
            for (x, y) in a[r].iter_mut().zip(&pa) {
                *x -= &f * y;
            }
            for (x, y) in inv[r].iter_mut().zip(&pi) {
                *x -= &f * y;
            }
        }
    }
    // inv = (Bᵀ)⁻¹ = (B⁻¹)ᵀ, whose columns are the rows of B⁻¹
    Ok((0..n).map(|i| (0..n).map(|j| inv[j][i].clone()).collect()).collect())
}

/// Column-style Hermite normal form of integer generators.
fn integer_hnf(dim: usize, gens: Vec<Vec<BigInt>>) -> (Vec<Vec<BigInt>>, Vec<usize>) {
    let mut rest: Vec<Vec<BigInt>> = gens.into_iter().filter(|g| g.iter().any(|x| !x.is_zero())).collect();
    let mut basis: Vec<Vec<BigInt>> = Vec::new();
    let mut pivots = Vec::new();
    for row in 0..dim {
        loop {
            let active: Vec<usize> = (0..rest.len()).filter(|&i| !rest[i][row].is_zero()).collect();
            let Some(&first) = active.first() else { break };
            let piv = *active
                .iter()
                .min_by(|&&a, &&b| rest[a][row].abs().cmp(&rest[b][row].abs()).then(a.cmp(&b)))
                .unwrap_or(&first);
            if active.len() == 1 {
                let mut col = rest.remove(piv);
                if col[row].is_negative() {
                    col.iter_mut().for_each(|x| *x = -&*x);
                }
                basis.push(col);
                pivots.push(row);
                break;
            }
            let pcol = rest[piv].clone();
            for &i in &active {
                if i == piv {
                    continue;
                }
                let q = &rest[i][row] / &pcol[row];
                if q.is_zero() {
                    continue;
                }
                for (x, y) in rest[i].iter_mut().zip(&pcol) {
                    *x -= &q * y;
                }
            }
            rest.retain(|g| g.iter().any(|x| !x.is_zero()));
        }
    }
    for j in 0..basis.len() {
        let row = pivots[j];
        let d = basis[j][row].clone();
        for i in 0..j {
            let q = basis[i][row].div_floor(&d);
            if q.is_zero() {
                continue;
            }
            let pcol = basis[j].clone();
            for (x, y) in basis[i].iter_mut().zip(&pcol) {
                *x -= &q * y;
            }
        }
    }
    (basis, pivots)
}
