//! Exact two-phase simplex over the rationals, with Bland's rule.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

type Q = BigRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub coeffs: Vec<Q>,
    pub relation: Relation,
    pub rhs: Q,
}

impl Constraint {
    pub fn new(coeffs: Vec<Q>, relation: Relation, rhs: Q) -> Self {
        Constraint { coeffs, relation, rhs }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { value: Q, point: Vec<Q> },
    Infeasible,
    Unbounded,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, i: usize) -> &Q {
        &self.rows[i][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.rows[r][c].recip();
        for x in self.rows[r].iter_mut() {
            if !x.is_zero() {
                *x *= &p;
            }
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, y) in row.iter_mut().zip(&prow) {
                if !y.is_zero() {
                    *x -= &f * y;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Maximizes `obj` over the allowed columns; `false` if unbounded.
    fn optimize(&mut self, obj: &[Q], allowed: &[bool]) -> bool {
        loop {
            let mut entering = None;
            for j in 0..self.cols {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut d = obj[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !obj[b].is_zero() && !self.rows[i][j].is_zero() {
                        d -= &obj[b] * &self.rows[i][j];
                    }
                }
                if d.is_positive() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return true };
            let mut leave: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][j];
                if !a.is_positive() {
                    continue;
                }
                let ratio = self.rhs(i) / a;
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && self.basis[i] < self.basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            let Some((r, _)) = leave else { return false };
            self.pivot(r, j);
        }
    }

    fn value(&self, obj: &[Q]) -> Q {
        self.basis
            .iter()
            .enumerate()
            .fold(Q::zero(), |acc, (i, &b)| acc + &obj[b] * self.rhs(i))
    }
}

/// Maximizes `objective · x` over `x ≥ 0` subject to the constraints.
pub fn maximize_nonnegative(objective: &[Q], constraints: &[Constraint]) -> Result<LpOutcome> {
    let n = objective.len();
    if let Some(c) = constraints.iter().find(|c| c.coeffs.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: c.coeffs.len() });
    }
    let m = constraints.len();
    // normalize to non-negative right-hand sides
    let normalized: Vec<(Vec<Q>, Relation, Q)> = constraints
        .iter()
        .map(|c| {
            if c.rhs.is_negative() {
                let flipped = match c.relation {
                    Relation::Le => Relation::Ge,
                    Relation::Ge => Relation::Le,
                    Relation::Eq => Relation::Eq,
                };
                (c.coeffs.iter().map(|x| -x).collect(), flipped, -&c.rhs)
            } else {
                (c.coeffs.clone(), c.relation, c.rhs.clone())
            }
        })
        .collect();
    let slacks = normalized.iter().filter(|c| c.1 != Relation::Eq).count();
    let artificials = normalized.iter().filter(|c| c.1 != Relation::Le).count();
    let cols = n + slacks + artificials;
    let mut rows = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut s, mut a) = (n, n + slacks);
    for (coeffs, rel, rhs) in &normalized {
        let mut row = vec![Q::zero(); cols + 1];
        row[..n].clone_from_slice(coeffs);
        row[cols] = rhs.clone();
        match rel {
            Relation::Le => {
                row[s] = Q::from_integer(1.into());
                basis.push(s);
                s += 1;
            }
            Relation::Ge => {
                row[s] = Q::from_integer((-1).into());
                row[a] = Q::from_integer(1.into());
                basis.push(a);
                s += 1;
                a += 1;
            }
            Relation::Eq => {
                row[a] = Q::from_integer(1.into());
                basis.push(a);
                a += 1;
            }
        }
        rows.push(row);
    }
    let mut t = Tableau { rows, basis, cols };

    if artificials > 0 {
        let mut phase1 = vec![Q::zero(); cols];
        for x in phase1.iter_mut().skip(n + slacks) {
            *x = Q::from_integer((-1).into());
        }
        let all = vec![true; cols];
        t.optimize(&phase1, &all);
        if !t.value(&phase1).is_zero() {
            return Ok(LpOutcome::Infeasible);
        }
        // drive artificials out of the basis, dropping redundant rows
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= n + slacks {
                match (0..n + slacks).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => t.pivot(i, j),
                    None => {
                        t.rows.remove(i);
                        t.basis.remove(i);
                        continue;
                    }
                }
            }
            i += 1;
        }
    }

    let mut obj = vec![Q::zero(); cols];
    obj[..n].clone_from_slice(objective);
    let allowed: Vec<bool> = (0..cols).map(|j| j < n + slacks).collect();
    if !t.optimize(&obj, &allowed) {
        return Ok(LpOutcome::Unbounded);
    }
    let mut point = vec![Q::zero(); n];
    for (i, &b) in t.basis.iter().enumerate() {
        if b < n {
            point[b] = t.rhs(i).clone();
        }
    }
    Ok(LpOutcome::Optimal { value: t.value(&obj), point })
}

/// Maximizes `objective · x` over free variables `x`.
pub fn maximize(objective: &[Q], constraints: &[Constraint]) -> Result<LpOutcome> {
    let split = |v: &[Q]| -> Vec<Q> { v.iter().cloned().chain(v.iter().map(|x| -x)).collect() };
    let n = objective.len();
    let cons: Vec<Constraint> = constraints
        .iter()
        .map(|c| Constraint::new(split(&c.coeffs), c.relation, c.rhs.clone()))
        .collect();
    Ok(match maximize_nonnegative(&split(objective), &cons)? {
        LpOutcome::Optimal { value, point } => {
            let x = (0..n).map(|i| &point[i] - &point[n + i]).collect();
            LpOutcome::Optimal { value, point: x }
        }
        other => other,
    })
}
