//! Exact `λ_Q` and `λ_Z` of a normed lattice by bounded enumeration.
//!
//! `λ_Q` is the least `λ` such that lattice vectors of norm at most `λ` span
//! the ambient rational space; `λ_Z` the least `λ` such that they contain a
//! basis of the lattice. Both are attained norm values, so they are found by
//! enumerating every lattice vector up to a proven upper bound.

use std::cmp::Reverse;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{dot, ArchimedeanNorm, NormedLattice, QVector, ZLattice};
use crate::error::{Error, Result};

type Q = BigRational;

pub const DEFAULT_RANK_BOUND: usize = 8;
const ENUMERATION_CAP: u128 = 2_000_000;
const SEARCH_NODE_CAP: u64 = 5_000_000;

/// An exact invariant with a basis attaining it (ambient coordinates).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaResult {
    pub value: Q,
    pub basis: Vec<QVector>,
}

/// An upper bound only, from a reduced basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaBound {
    pub upper: Q,
    pub basis: Vec<QVector>,
}

/// Evaluates the archimedean norm on coordinates in a fixed lattice basis.
struct CoordNorm<'a> {
    arch: &'a ArchimedeanNorm,
    basis: Vec<QVector>,
    dim: usize,
    /// `φ_i ∘ B` when the norm is a plain maximum of functionals
    direct: Option<Vec<QVector>>,
}

impl<'a> CoordNorm<'a> {
    fn new(arch: &'a ArchimedeanNorm, basis: Vec<QVector>, dim: usize) -> Self {
        let direct = arch.projection().is_none().then(|| {
            arch.functionals()
                .iter()
                .map(|phi| basis.iter().map(|b| dot(phi, b)).collect())
                .collect()
        });
        CoordNorm { arch, basis, dim, direct }
    }

    fn ambient(&self, c: &[BigInt]) -> QVector {
        let mut v = vec![Q::zero(); self.dim];
        for (ci, b) in c.iter().zip(&self.basis) {
            if ci.is_zero() {
                continue;
            }
            let ci = Q::from_integer(ci.clone());
            for (x, y) in v.iter_mut().zip(b) {
                *x += &ci * y;
            }
        }
        v
    }

    fn norm(&self, c: &[BigInt]) -> Result<Q> {
        match &self.direct {
            Some(rows) => Ok(rows
                .iter()
                .map(|r| {
                    r.iter()
                        .zip(c)
                        .filter(|(_, ci)| !ci.is_zero())
                        .fold(Q::zero(), |acc, (x, ci)| acc + x * Q::from_integer(ci.clone()))
                        .abs()
                })
                .max()
                .unwrap_or_else(Q::zero)),
            None => self.arch.norm(&self.ambient(c)),
        }
    }
}

fn unit(k: usize, i: usize) -> Vec<BigInt> {
    (0..k).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()
}

fn shifted(a: &[BigInt], b: &[BigInt], t: i64) -> Vec<BigInt> {
    let t = BigInt::from(t);
    a.iter().zip(b).map(|(x, y)| x + &t * y).collect()
}

/// The integer `t` minimizing `‖a + t·b‖`, with that norm. The norm is
/// convex in `t`, so the first `t` where it stops decreasing is optimal.
fn best_multiple(norm: &CoordNorm, a: &[BigInt], b: &[BigInt], at_zero: &Q) -> Result<(i64, Q)> {
    let f = |t: i64| norm.norm(&shifted(a, b, t));
    let (dir, first) = match (f(1)?, f(-1)?) {
        (up, _) if up < *at_zero => (1, up),
        (_, down) if down < *at_zero => (-1, down),
        _ => return Ok((0, at_zero.clone())),
    };
    let g = |t: i64| f(dir * t);
    // g(0) > g(1); find u with g(u + 1) ≥ g(u)
    let (mut lo, mut u, mut gu) = (1i64, 1i64, first);
    loop {
        let next = g(u + 1)?;
        if next >= gu || u >= 1 << 40 {
            break;
        }
        lo = u + 1;
        u *= 2;
        gu = g(u)?;
    }
    // least t in [lo, u] with g(t + 1) ≥ g(t)
    let mut hi = u;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if g(mid + 1)? >= g(mid)? {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok((dir * lo, g(lo)?))
}

/// Pairwise reduction `b_i ← b_i + t·b_j` with the best integer `t` while
/// some norm decreases. Returns coordinates in the basis of `norm`.
fn reduce_basis(norm: &CoordNorm, k: usize) -> Result<Vec<(Vec<BigInt>, Q)>> {
    let mut basis: Vec<(Vec<BigInt>, Q)> = (0..k)
        .map(|i| {
            let c = unit(k, i);
            norm.norm(&c).map(|n| (c, n))
        })
        .collect::<Result<_>>()?;
    loop {
        let mut improved = false;
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let (t, n) = best_multiple(norm, &basis[i].0, &basis[j].0, &basis[i].1)?;
                if n < basis[i].1 {
                    basis[i] = (shifted(&basis[i].0, &basis[j].0, t), n);
                    improved = true;
                }
            }
        }
        if !improved {
            return Ok(basis);
        }
    }
}

fn lattice_norm(m: &NormedLattice) -> CoordNorm<'_> {
    CoordNorm::new(&m.arch, m.lattice.basis().to_vec(), m.lattice.dim())
}

/// A labeled upper bound for `λ_Z` (hence `λ_Q`) valid at any rank.
pub fn reduction_upper_bound(m: &NormedLattice) -> Result<LambdaBound> {
    let norm = lattice_norm(m);
    let basis = reduce_basis(&norm, m.lattice.rank())?;
    let upper = basis.iter().map(|(_, n)| n.clone()).max().unwrap_or_else(Q::zero);
    Ok(LambdaBound { upper, basis: basis.iter().map(|(c, _)| norm.ambient(c)).collect() })
}

struct Candidate {
    coords: Vec<BigInt>,
    norm: Q,
    support: usize,
}

/// Every lattice vector (up to sign) with norm at most `bound`, ordered by
/// norm, then ambient support size, then coordinates.
fn enumerate(norm: &CoordNorm, bound: &Q) -> Result<Vec<Candidate>> {
    let k = norm.basis.len();
    let mut limits = Vec::with_capacity(k);
    let mut count: u128 = 1;
    for i in 0..k {
        let psi: Vec<Q> = (0..k).map(|j| if i == j { Q::one() } else { Q::zero() }).collect();
        let beta = norm.arch.ball_max(&norm.basis, &psi)?;
        let lim = (bound * beta).floor().to_integer();
        let lim = lim.to_u64().ok_or(Error::EnumerationTooLarge(u128::MAX))?;
        count = count.saturating_mul(2 * lim as u128 + 1);
        if count > ENUMERATION_CAP {
            return Err(Error::EnumerationTooLarge(count));
        }
        limits.push(lim as i64);
    }
    // shells by first coordinate; the first nonzero coordinate is positive
    let shells: Vec<Result<Vec<Candidate>>> = (0..=limits[0])
        .into_par_iter()
        .map(|first| enumerate_shell(norm, &limits, first, bound))
        .collect();
    let mut out = Vec::new();
    for shell in shells {
        out.extend(shell?);
    }
    Ok(finish(out))
}

fn enumerate_shell(norm: &CoordNorm, limits: &[i64], first: i64, bound: &Q) -> Result<Vec<Candidate>> {
    let k = limits.len();
    let mut out = Vec::new();
    let mut c: Vec<i64> = limits.iter().map(|l| -l).collect();
    c[0] = first;
    loop {
        if c.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            let coords: Vec<BigInt> = c.iter().map(|&x| BigInt::from(x)).collect();
            let n = norm.norm(&coords)?;
            if n <= *bound {
                let support = norm.ambient(&coords).iter().filter(|x| !x.is_zero()).count();
                out.push(Candidate { coords, norm: n, support });
            }
        }
        // odometer over the remaining coordinates
        let mut i = k;
        loop {
            if i <= 1 {
                return Ok(out);
            }
            i -= 1;
            if c[i] < limits[i] {
                c[i] += 1;
                for (slot, lim) in c.iter_mut().zip(limits).skip(i + 1) {
                    *slot = -lim;
                }
                break;
            }
        }
    }
}

fn finish(mut out: Vec<Candidate>) -> Vec<Candidate> {
    out.sort_by(|a, b| {
        (&a.norm, a.support, Reverse(&a.coords)).cmp(&(&b.norm, b.support, Reverse(&b.coords)))
    });
    out
}

fn prepare(m: &NormedLattice, rank_bound: usize) -> Result<Option<(CoordNorm<'_>, Vec<Candidate>)>> {
    let k = m.lattice.rank();
    if k > rank_bound {
        return Err(Error::RankTooLarge { rank: k, bound: rank_bound });
    }
    if k == 0 {
        return Ok(None);
    }
    let start = lattice_norm(m);
    let reduced = reduce_basis(&start, k)?;
    let bound = reduced.iter().map(|(_, n)| n.clone()).max().expect("rank is positive");
    // enumerate in the reduced basis, where the coordinate box is small
    let basis = reduced.iter().map(|(c, _)| start.ambient(c)).collect();
    let norm = CoordNorm::new(&m.arch, basis, m.lattice.dim());
    let cands = enumerate(&norm, &bound)?;
    Ok(Some((norm, cands)))
}

/// Index of the first candidate at which the rational span becomes full,
/// with the chosen candidates.
fn rational_span(cands: &[Candidate], k: usize) -> Option<(usize, Vec<usize>)> {
    let mut rows: Vec<(QVector, usize)> = Vec::new();
    let mut chosen = Vec::new();
    for (idx, c) in cands.iter().enumerate() {
        let mut r: QVector = c.coords.iter().map(|x| Q::from_integer(x.clone())).collect();
        for (row, piv) in &rows {
            if !r[*piv].is_zero() {
                let f = &r[*piv] / &row[*piv];
                for (x, y) in r.iter_mut().zip(row) {
                    *x -= &f * y;
                }
            }
        }
        if let Some(piv) = r.iter().position(|x| !x.is_zero()) {
            rows.push((r, piv));
            chosen.push(idx);
            if chosen.len() == k {
                return Some((idx, chosen));
            }
        }
    }
    None
}

pub fn lambda_q(m: &NormedLattice, rank_bound: usize) -> Result<LambdaResult> {
    let Some((norm, cands)) = prepare(m, rank_bound)? else {
        return Ok(LambdaResult { value: Q::zero(), basis: Vec::new() });
    };
    let k = m.lattice.rank();
    let (last, chosen) = rational_span(&cands, k).expect("the reduced basis is enumerated");
    Ok(LambdaResult {
        value: cands[last].norm.clone(),
        basis: chosen.iter().map(|&i| norm.ambient(&cands[i].coords)).collect(),
    })
}

pub fn lambda_z(m: &NormedLattice, rank_bound: usize) -> Result<LambdaResult> {
    let Some((norm, cands)) = prepare(m, rank_bound)? else {
        return Ok(LambdaResult { value: Q::zero(), basis: Vec::new() });
    };
    let k = m.lattice.rank();
    let (start, _) = rational_span(&cands, k).expect("the reduced basis is enumerated");
    // distinct norm values from λ_Q upward; the last one admits a basis
    let mut ends: Vec<usize> = Vec::new();
    for i in start..cands.len() {
        if i + 1 == cands.len() || cands[i + 1].norm != cands[i].norm {
            ends.push(i + 1);
        }
    }
    let (mut lo, mut hi) = (0usize, ends.len() - 1);
    let mut found = find_basis(&cands[..ends[hi]], k)?.expect("the reduced basis is a basis");
    while lo < hi {
        let mid = (lo + hi) / 2;
        match find_basis(&cands[..ends[mid]], k)? {
            Some(b) => {
                hi = mid;
                found = b;
            }
            None => lo = mid + 1,
        }
    }
    Ok(LambdaResult {
        value: cands[ends[hi] - 1].norm.clone(),
        basis: found.iter().map(|&i| norm.ambient(&cands[i].coords)).collect(),
    })
}

/// Indices of candidates forming a `Z`-basis of `Z^k`, if any.
///
/// Candidates are added in order while the chosen set stays primitive. A
/// unimodular `U` is maintained with `U·c_{i_t} = e_t` on the rows from `t`
/// down, so a new vector keeps the set primitive exactly when the gcd of
/// its remaining coordinates under `U` is 1.
fn find_basis(cands: &[Candidate], k: usize) -> Result<Option<Vec<usize>>> {
    let lower_spans = |from: usize, j: usize, u: &[Vec<BigInt>]| -> bool {
        let gens: Vec<QVector> = cands[from..]
            .iter()
            .map(|c| (j..k).map(|r| Q::from_integer(row_dot(&u[r], &c.coords))).collect())
            .collect();
        let l = ZLattice::new(k - j, &gens).expect("consistent dimensions");
        l.rank() == k - j && l.covolume().is_one()
    };
    let mut nodes = 0u64;
    let u: Vec<Vec<BigInt>> = (0..k).map(|i| unit(k, i)).collect();
    let mut chosen = Vec::with_capacity(k);
    if dfs(cands, k, 0, 0, u, &mut chosen, &mut nodes, &lower_spans)? {
        Ok(Some(chosen))
    } else {
        Ok(None)
    }
}

fn row_dot(row: &[BigInt], c: &[BigInt]) -> BigInt {
    row.iter().zip(c).fold(BigInt::zero(), |acc, (a, b)| acc + a * b)
}

/// Whether candidates from `from` on still generate the complement of the
/// `j` chosen vectors under `U`.
type SpanTest<'a> = &'a dyn Fn(usize, usize, &[Vec<BigInt>]) -> bool;

#[allow(clippy::too_many_arguments)]
fn dfs(
    cands: &[Candidate],
    k: usize,
    j: usize,
    from: usize,
    u: Vec<Vec<BigInt>>,
    chosen: &mut Vec<usize>,
    nodes: &mut u64,
    lower_spans: SpanTest,
) -> Result<bool> {
    if j == k {
        return Ok(true);
    }
    *nodes += 1;
    if *nodes > SEARCH_NODE_CAP {
        return Err(Error::EnumerationTooLarge(*nodes as u128));
    }
    if cands.len() - from < k - j || !lower_spans(from, j, &u) {
        return Ok(false);
    }
    for idx in from..cands.len() {
        if cands.len() - idx < k - j {
            break;
        }
        let mut w: Vec<BigInt> = u.iter().map(|r| row_dot(r, &cands[idx].coords)).collect();
        let g = w[j..].iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
        if !g.is_one() {
            continue;
        }
        let mut next = u.clone();
        // bring w[j..] to e_j with 2×2 unimodular row operations
        for i in (j + 1..k).rev() {
            let (a, b) = (w[i - 1].clone(), w[i].clone());
            if b.is_zero() {
                continue;
            }
            let e = a.extended_gcd(&b);
            let (g, x, y) = (e.gcd, e.x, e.y);
            let (p, q) = (-&b / &g, &a / &g);
            let (r0, r1) = (next[i - 1].clone(), next[i].clone());
            next[i - 1] = r0.iter().zip(&r1).map(|(s, t)| &x * s + &y * t).collect();
            next[i] = r0.iter().zip(&r1).map(|(s, t)| &p * s + &q * t).collect();
            w[i - 1] = g;
            w[i] = BigInt::zero();
        }
        if w[j].is_negative() {
            next[j] = next[j].iter().map(|x| -x).collect();
        }
        chosen.push(idx);
        if dfs(cands, k, j + 1, idx + 1, next, chosen, nodes, lower_spans)? {
            return Ok(true);
        }
        chosen.pop();
    }
    Ok(false)
}
