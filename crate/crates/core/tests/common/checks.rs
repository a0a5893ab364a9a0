//! Seeded checks shared by the property tests and the acceptance run. Each
//! returns `Err` with a description of the first violation found.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use ultranorm::adelic::{
    finite_unit_lattice, lambda_q, lambda_z, localization_matches, quotient_adelic, AdelicSpace, ArchimedeanNorm,
    NormedLattice, ZLattice, DEFAULT_RANK_BOUND,
};
use ultranorm::extension::{extend_trivial_via_laurent, min_norm_lift, ExtensionProblem, Lift};
use ultranorm::linalg::Matrix;
use ultranorm::metric::{find_gauss_witness, metric_gap, QuotientMetric};
use ultranorm::sections::{monomials, RestrictedSection, Section, Subvariety};
use ultranorm::ultranorm::{
    dual_norm, lattice_from_norm, norm_from_lattice, orthogonalize_flag, quotient_norm, NormedSpace,
};
use ultranorm::{FieldElement, Magnitude, ValuedField};

use super::*;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub type Check = Result<(), String>;

fn value(m: &Magnitude) -> Q {
    m.value().clone()
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

// ---- normed spaces ----

pub struct RandomSpace {
    pub field: ValuedField,
    pub basis: Vec<Vec<Q>>,
    pub weights: Vec<Magnitude>,
    pub space: NormedSpace,
    /// rows of the inverse basis matrix, so coordinates are `row · v`
    inverse: Vec<Vec<Q>>,
}

impl RandomSpace {
    pub fn new(rng: &mut Rng8, field: ValuedField, dim: usize) -> Self {
        let p = field.base_prime();
        let basis = random_basis(rng, dim, p);
        let weights: Vec<Magnitude> = (0..dim).map(|_| random_weight(rng, &field)).collect();
        let vectors: Vec<_> = basis.iter().map(|b| fev(b)).collect();
        let space = NormedSpace::from_vectors(field.clone(), &vectors, weights.clone()).unwrap();
        let cols = transpose(&basis);
        let inverse = transpose(
            &(0..dim)
                .map(|i| {
                    let e: Vec<Q> = (0..dim).map(|j| if i == j { q(1) } else { q(0) }).collect();
                    solve(&cols, &e).expect("basis is invertible")
                })
                .collect::<Vec<_>>(),
        );
        RandomSpace { field, basis, weights, space, inverse }
    }

    pub fn norm(&self, v: &[Q]) -> Q {
        self.norm_via(&self.inverse, v)
    }

    /// Rows mapping coefficients `a` to the orthogonal-basis coordinates of
    /// `Σ a_j v_j`.
    pub fn coordinate_rows(&self, vectors: &[Vec<Q>]) -> Vec<Vec<Q>> {
        self.inverse.iter().map(|row| vectors.iter().map(|v| dot(row, v)).collect()).collect()
    }

    /// `max_i |row_i · a|·w_i`; the sums stay unreduced since only their
    /// absolute values are needed.
    pub fn norm_via(&self, rows: &[Vec<Q>], a: &[Q]) -> Q {
        rows.iter()
            .zip(&self.weights)
            .map(|(row, w)| {
                let (num, den) = unreduced_dot(row, a);
                let size = match (&self.field, num.is_zero()) {
                    (_, true) => q(0),
                    (ValuedField::Padic { p }, false) => p_pow(*p, int_val(&den, *p) - int_val(&num, *p)),
                    (ValuedField::Trivial, false) => q(1),
                    (field, false) => abs(field, &fe(&Q::new(num, den))),
                };
                size * w.value()
            })
            .max()
            .unwrap_or_else(|| q(0))
    }
}

fn unreduced_dot(a: &[Q], b: &[Q]) -> (BigInt, BigInt) {
    let (mut num, mut den) = (BigInt::zero(), BigInt::one());
    for (x, y) in a.iter().zip(b) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        let d = x.denom() * y.denom();
        num = num * &d + x.numer() * y.numer() * &den;
        den *= d;
    }
    (num, den)
}

pub fn seeded_space(seed: u64, max_dim: usize) -> (Rng8, RandomSpace) {
    let mut rng = Rng8::seed_from_u64(seed);
    let field = random_field(&mut rng);
    let dim = rng.gen_range(1..=max_dim);
    let s = RandomSpace::new(&mut rng, field, dim);
    (rng, s)
}

/// Orthogonalized flags realize `max |a_i|·w_i` on random coefficient tuples.
pub fn orthogonality(seed: u64, max_dim: usize, tuples: usize) -> Check {
    let (mut rng, s) = seeded_space(seed, max_dim);
    let dim = s.space.dim();
    let p = s.field.base_prime();
    let flag = random_basis(&mut rng, dim, p);
    let fam = orthogonalize_flag(&s.space, &flag.iter().map(|v| fev(v)).collect::<Vec<_>>()).map_err(err)?;
    let out: Vec<Vec<Q>> = fam.vectors.iter().map(|v| qv(v)).collect();
    for i in 1..=dim {
        let mut both = out[..i].to_vec();
        both.extend(flag[..i].iter().cloned());
        ensure!(rank(&both, dim) == i && rank(&out[..i], dim) == i, "span mismatch at step {i}");
    }
    let rows = s.coordinate_rows(&out);
    for _ in 0..tuples {
        let a = random_vector(&mut rng, dim, p);
        let expected = a
            .iter()
            .zip(&fam.weights)
            .map(|(c, w)| abs(&s.field, &fe(c)) * w.value())
            .max()
            .unwrap();
        let got = s.norm_via(&rows, &a);
        ensure!(got == expected, "‖Σ a_i g_i‖ = {got}, max |a_i| w_i = {expected} for a = {a:?}");
    }
    Ok(())
}

/// Returned lifts attain the quotient norm and no sampled coset member is
/// shorter.
pub fn quotient_attainment(seed: u64, max_dim: usize, samples: usize) -> Check {
    let (mut rng, s) = seeded_space(seed, max_dim);
    let dim = s.space.dim();
    let p = s.field.base_prime();
    let t = rng.gen_range(1..=dim);
    let rows: Vec<Vec<Q>> = loop {
        let r: Vec<Vec<Q>> = (0..t).map(|_| random_vector(&mut rng, dim, p)).collect();
        if rank(&r, dim) == t {
            break r;
        }
    };
    let map = Matrix::from_rows(rows.iter().map(|r| fev(r)).collect(), dim).map_err(err)?;
    let quo = quotient_norm(&s.space, &map).map_err(err)?;
    let ker = kernel(&rows, dim);
    let y = random_vector(&mut rng, t, p);
    let x = qv(&quo.lift(&fev(&y)).map_err(err)?);
    ensure!(mat_vec(&rows, &x) == y, "lift does not map to y");
    let qn = value(&quo.norm(&fev(&y)).map_err(err)?);
    ensure!(s.norm(&x) == qn, "lift norm {} differs from quotient norm {qn}", s.norm(&x));
    // coset member x + Σ c_j k_j has coefficients (1, c) against (x, k_1, ...)
    let mut coset = vec![x];
    coset.extend(ker.iter().cloned());
    let rows = s.coordinate_rows(&coset);
    for _ in 0..samples {
        let mut c = vec![q(1)];
        c.extend(random_vector(&mut rng, ker.len(), p));
        let n = s.norm_via(&rows, &c);
        ensure!(n >= qn, "coset member of norm {n} beats the quotient norm {qn}");
    }
    Ok(())
}

/// The bidual norm agrees with the norm on random vectors.
pub fn double_dual(seed: u64, max_dim: usize, samples: usize) -> Check {
    let (mut rng, s) = seeded_space(seed, max_dim);
    let dd = dual_norm(&dual_norm(&s.space).map_err(err)?).map_err(err)?;
    let p = s.field.base_prime();
    for _ in 0..samples {
        let v = random_vector(&mut rng, s.space.dim(), p);
        let got = value(&dd.norm(&fev(&v)).map_err(err)?);
        ensure!(got == s.norm(&v), "bidual norm {got} differs from {}", s.norm(&v));
    }
    Ok(())
}

/// `‖v‖ ≤ ‖v‖_L < p·‖v‖` for the unit-ball lattice `L`, with `‖v‖_L` found by
/// membership scanning.
pub fn lattice_sandwich(seed: u64, max_dim: usize, samples: usize) -> Check {
    let mut rng = Rng8::seed_from_u64(seed);
    let p = [2u64, 3, 5][rng.gen_range(0..3)];
    let field = ValuedField::padic(p).unwrap();
    let dim = rng.gen_range(1..=max_dim);
    let s = RandomSpace::new(&mut rng, field, dim);
    let lat = lattice_from_norm(&s.space).map_err(err)?;
    let lnorm = norm_from_lattice(&lat).map_err(err)?;
    for _ in 0..samples {
        let v = random_vector(&mut rng, dim, Some(p));
        if v.iter().all(Zero::is_zero) {
            continue;
        }
        let n = s.norm(&v);
        let mut k = -60i64;
        while lat.contains(&fev(&scale(&p_pow(p, -(k + 1)), &v))) {
            k += 1;
        }
        let scanned = p_pow(p, -k);
        let nl = value(&lnorm.norm(&fev(&v)).map_err(err)?);
        ensure!(nl == scanned, "lattice norm {nl} differs from the membership scan {scanned}");
        ensure!(n <= nl && nl < q(p as i64) * &n, "sandwich fails: ‖v‖ = {n}, ‖v‖_L = {nl}, p = {p}");
    }
    Ok(())
}

// ---- sections and metrics ----

/// `s(x)` by direct expansion.
pub fn eval(s: &Section, x: &[Q]) -> Q {
    s.coeffs().iter().fold(Q::zero(), |acc, (e, c)| {
        let m = e.iter().zip(x).fold(Q::one(), |m, (&k, xi)| m * num_traits::pow(xi.clone(), k as usize));
        acc + rational(c) * m
    })
}

/// `max_α |a_α| ∏ w_i^{α_i}`.
pub fn gauss(field: &ValuedField, weights: &[Q], s: &Section) -> Q {
    s.coeffs()
        .iter()
        .map(|(e, c)| {
            e.iter()
                .zip(weights)
                .fold(abs(field, c), |acc, (&k, w)| acc * num_traits::pow(w.clone(), k as usize))
        })
        .max()
        .unwrap_or_else(Q::zero)
}

/// `|s(x)| / (max_i |x_i|/w_i)^n`, independent of the representative.
pub fn point_value(field: &ValuedField, weights: &[Q], s: &Section, x: &[Q]) -> Q {
    let frame = x
        .iter()
        .zip(weights)
        .map(|(xi, w)| abs(field, &fe(xi)) / w)
        .max()
        .unwrap();
    abs(field, &fe(&eval(s, x))) / num_traits::pow(frame, s.degree() as usize)
}

/// The representative with first coordinate of largest absolute value 1.
pub fn normalized(field: &ValuedField, x: &[Q]) -> Vec<Q> {
    let best = x.iter().map(|c| abs(field, &fe(c))).max().unwrap();
    let i = x.iter().position(|c| abs(field, &fe(c)) == best).unwrap();
    scale(&x[i].recip(), x)
}

pub fn random_section(rng: &mut Rng8, num_vars: usize, degree: u32, p: Option<u64>) -> Section {
    loop {
        let mut coeffs = BTreeMap::new();
        for e in monomials(num_vars, degree) {
            if rng.gen_bool(0.6) {
                let c = match p {
                    Some(p) => p_rich_rational(rng, p, 6),
                    None => small_rational(rng, 6),
                };
                if !c.is_zero() {
                    coeffs.insert(e, fe(&c));
                }
            }
        }
        if !coeffs.is_empty() {
            return Section::new(num_vars, degree, coeffs).unwrap();
        }
    }
}

pub fn random_point(rng: &mut Rng8, num_vars: usize, height: i64) -> Vec<Q> {
    loop {
        let x: Vec<Q> = (0..num_vars).map(|_| small_rational(rng, height)).collect();
        if x.iter().any(|c| !c.is_zero()) {
            return x;
        }
    }
}

pub struct DiagonalMetric {
    pub field: ValuedField,
    pub weights: Vec<Q>,
    pub metric: QuotientMetric,
}

impl DiagonalMetric {
    pub fn new(field: ValuedField, weights: Vec<Magnitude>) -> Self {
        let w = weights.iter().map(value).collect();
        let metric = QuotientMetric::diagonal(field.clone(), weights).unwrap();
        DiagonalMetric { field, weights: w, metric }
    }

    pub fn random(rng: &mut Rng8, field: ValuedField, num_vars: usize) -> Self {
        let weights = (0..num_vars).map(|_| random_weight(rng, &field)).collect();
        DiagonalMetric::new(field, weights)
    }
}

fn padic_field(rng: &mut Rng8) -> ValuedField {
    ValuedField::padic([2u64, 3, 5][rng.gen_range(0..3)]).unwrap()
}

/// `σ_n(x) = 0` for `n ≤ max_degree` at random points of `P^m`, by comparing
/// the regenerated quotient norm with the metric.
pub fn sigma_vanishes(seed: u64, m: usize, max_degree: u32, points: usize) -> Check {
    let mut rng = Rng8::seed_from_u64(seed);
    let field = padic_field(&mut rng);
    let h = DiagonalMetric::random(&mut rng, field, m + 1);
    let pts: Vec<Vec<Q>> = (0..points).map(|_| random_point(&mut rng, m + 1, 9)).collect();
    for n in 1..=max_degree {
        let space = h.metric.degree_space(n).map_err(err)?;
        for x in &pts {
            let r = metric_gap(&space, &h.metric, n, &fev(x)).map_err(err)?;
            ensure!(r.is_one(), "σ_{n}({x:?}) ratio {r} over {} with weights {:?}", h.field, h.weights);
        }
    }
    Ok(())
}

/// For `p > n` and weights powers of `p`, a rational point attaining the
/// Gauss norm is found.
pub fn gauss_witness(seed: u64) -> Check {
    let mut rng = Rng8::seed_from_u64(seed);
    let p = [5u64, 7, 11][rng.gen_range(0..3)];
    let m = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=4u32);
    let weights = (0..=m)
        .map(|_| Magnitude::from_parts(Q::one(), rng.gen_range(-2..=2), Some(p)).unwrap())
        .collect();
    let h = DiagonalMetric::new(ValuedField::padic(p).unwrap(), weights);
    let s = random_section(&mut rng, m + 1, n, Some(p));
    let x = find_gauss_witness(&h.metric, &s)
        .map_err(err)?
        .ok_or_else(|| format!("no witness for {s} over Q_{p}"))?;
    let target = gauss(&h.field, &h.weights, &s);
    let at = point_value(&h.field, &h.weights, &s, &qv(&x));
    ensure!(at == target, "witness value {at} differs from the Gauss norm {target}");
    Ok(())
}

/// A non-diagonal metric: coordinate forms orthogonalized in a random basis.
pub fn random_metric(rng: &mut Rng8, field: ValuedField, num_vars: usize) -> QuotientMetric {
    QuotientMetric::new(RandomSpace::new(rng, field, num_vars).space).unwrap()
}

/// `|s|_{h^n}(x) ≤ ‖s‖_{h^n}` at random points, with both sides checked
/// against direct formulas for diagonal metrics.
pub fn pointwise_below_sup(seed: u64, points: usize) -> Check {
    let mut rng = Rng8::seed_from_u64(seed);
    let field = random_field(&mut rng);
    let p = field.base_prime();
    let m = rng.gen_range(1..=2);
    let n = rng.gen_range(1..=4u32);
    let s = random_section(&mut rng, m + 1, n, p);
    if rng.gen_bool(0.5) {
        let h = DiagonalMetric::random(&mut rng, field, m + 1);
        let sup = value(&h.metric.sup_norm(&s).map_err(err)?);
        ensure!(sup == gauss(&h.field, &h.weights, &s), "sup norm {sup} differs from the Gauss norm");
        for _ in 0..points {
            let x = random_point(&mut rng, m + 1, 9);
            let v = value(&h.metric.point_metric(&s, &fev(&x)).map_err(err)?);
            ensure!(v == point_value(&h.field, &h.weights, &s, &x), "point metric mismatch at {x:?}");
            ensure!(v <= sup, "|s|(x) = {v} exceeds the sup norm {sup} at {x:?}");
        }
    } else {
        let h = random_metric(&mut rng, field, m + 1);
        let sup = value(&h.sup_norm(&s).map_err(err)?);
        for _ in 0..points {
            let x = random_point(&mut rng, m + 1, 9);
            let v = value(&h.point_metric(&s, &fev(&x)).map_err(err)?);
            ensure!(v <= sup, "|s|(x) = {v} exceeds the sup norm {sup} at {x:?}");
        }
    }
    Ok(())
}

/// `‖st‖ = ‖s‖·‖t‖`, with the product checked by evaluation.
pub fn sup_multiplicative(seed: u64) -> Check {
    let mut rng = Rng8::seed_from_u64(seed);
    let field = random_field(&mut rng);
    let p = field.base_prime();
    let m = rng.gen_range(1..=2);
    let (ds, dt) = (rng.gen_range(0..=3), rng.gen_range(0..=3));
    let s = random_section(&mut rng, m + 1, ds, p);
    let t = random_section(&mut rng, m + 1, dt, p);
    let st = s.mul(&t).map_err(err)?;
    let x = random_point(&mut rng, m + 1, 9);
    ensure!(eval(&st, &x) == eval(&s, &x) * eval(&t, &x), "product does not evaluate as a product");
    let h = if rng.gen_bool(0.5) {
        let d = DiagonalMetric::random(&mut rng, field, m + 1);
        ensure!(
            gauss(&d.field, &d.weights, &st) == gauss(&d.field, &d.weights, &s) * gauss(&d.field, &d.weights, &t),
            "Gauss norm is not multiplicative"
        );
        d.metric
    } else {
        random_metric(&mut rng, field, m + 1)
    };
    let (ns, nt, nst) = (h.sup_norm(&s).map_err(err)?, h.sup_norm(&t).map_err(err)?, h.sup_norm(&st).map_err(err)?);
    ensure!(nst == ns.mul(&nt), "‖st‖ = {nst}, ‖s‖‖t‖ = {}", ns.mul(&nt));
    Ok(())
}

// ---- extension problems ----

pub struct Fixture {
    pub name: String,
    pub problem: ExtensionProblem,
    /// Expected to have ratio 1 in every degree.
    pub semipositive: bool,
    /// Diagonal weights, when the metric is diagonal.
    pub weights: Option<Vec<Q>>,
}

fn pts(rows: &[&[i64]]) -> Vec<Vec<FieldElement>> {
    rows.iter().map(|r| r.iter().map(|&x| FieldElement::from_int(x)).collect()).collect()
}

fn vals(xs: &[(i64, i64)]) -> Vec<FieldElement> {
    xs.iter().map(|&(n, d)| FieldElement::from_ratio(n, d)).collect()
}

fn mags(xs: &[(u64, u64)]) -> Vec<Magnitude> {
    xs.iter().map(|&(n, d)| Magnitude::from_ratio(n, d)).collect()
}

fn fixture(
    name: &str,
    field: ValuedField,
    weights: Vec<Magnitude>,
    y: Subvariety,
    l: RestrictedSection,
    semipositive: bool,
) -> Fixture {
    let w = weights.iter().map(value).collect();
    let h = QuotientMetric::diagonal(field, weights).unwrap();
    Fixture {
        name: name.into(),
        problem: ExtensionProblem::new(h, y, l).unwrap(),
        semipositive,
        weights: Some(w),
    }
}

/// Hand-built fixtures. The semipositive ones carry orthonormal metrics and
/// subvarieties whose points stay distinct modulo `p`, so restriction is
/// surjective on integral sections in every degree.
pub fn named_fixtures() -> Vec<Fixture> {
    let padic = |p| ValuedField::padic(p).unwrap();
    let point_values = |v: &[(i64, i64)]| RestrictedSection::PointValues { degree: 1, values: vals(v) };
    let rep = |c: &[i64]| {
        RestrictedSection::Representative(Section::linear(&c.iter().map(|&x| FieldElement::from_int(x)).collect::<Vec<_>>()))
    };
    let mut out = vec![
        fixture(
            "orthonormal P1, one point, Q_2",
            padic(2),
            mags(&[(1, 1), (1, 1)]),
            Subvariety::points(2, pts(&[&[1, 0]])).unwrap(),
            point_values(&[(1, 1)]),
            true,
        ),
        fixture(
            "orthonormal P1, coordinate points, Q_3",
            padic(3),
            mags(&[(1, 1), (1, 1)]),
            Subvariety::points(2, pts(&[&[1, 0], &[0, 1]])).unwrap(),
            point_values(&[(1, 1), (3, 1)]),
            true,
        ),
        fixture(
            "orthonormal P2, coordinate points, Q_5",
            padic(5),
            mags(&[(1, 1), (1, 1), (1, 1)]),
            Subvariety::points(3, pts(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap(),
            point_values(&[(1, 1), (5, 1), (1, 5)]),
            true,
        ),
        fixture(
            "orthonormal P1, residually distinct points, Q_3",
            padic(3),
            mags(&[(1, 1), (1, 1)]),
            Subvariety::points(2, pts(&[&[1, 1], &[1, 2]])).unwrap(),
            point_values(&[(1, 1), (2, 1)]),
            true,
        ),
        fixture(
            "orthonormal P2, coordinate line, Q_2",
            padic(2),
            mags(&[(1, 1), (1, 1), (1, 1)]),
            Subvariety::linear(3, pts(&[&[0, 0, 1]])).unwrap(),
            rep(&[1, 0, 0]),
            true,
        ),
        fixture(
            "trivial P2, two points",
            ValuedField::trivial(),
            mags(&[(1, 1), (1, 1), (1, 1)]),
            Subvariety::points(3, pts(&[&[1, 0, 0], &[0, 1, 0]])).unwrap(),
            point_values(&[(1, 1), (1, 1)]),
            true,
        ),
        fixture(
            "orthonormal P1, clashing points, Q_2",
            padic(2),
            mags(&[(1, 1), (1, 1)]),
            Subvariety::points(2, pts(&[&[1, 1], &[1, 3]])).unwrap(),
            point_values(&[(1, 1), (0, 1)]),
            false,
        ),
        fixture(
            "weighted P1, one point, Q_3",
            padic(3),
            mags(&[(1, 1), (1, 3)]),
            Subvariety::points(2, pts(&[&[1, 1]])).unwrap(),
            point_values(&[(1, 1)]),
            false,
        ),
        fixture(
            "weighted P2, two points, Q_2",
            padic(2),
            mags(&[(1, 1), (2, 1), (1, 2)]),
            Subvariety::points(3, pts(&[&[1, 0, 1], &[0, 1, 1]])).unwrap(),
            point_values(&[(1, 1), (2, 1)]),
            false,
        ),
        fixture(
            "weighted P2, line, Q_5",
            padic(5),
            mags(&[(1, 1), (5, 1), (1, 1)]),
            Subvariety::linear(3, pts(&[&[1, -1, 0]])).unwrap(),
            rep(&[1, 0, 1]),
            false,
        ),
        fixture(
            "trivial weighted P2, two points",
            ValuedField::trivial(),
            mags(&[(1, 1), (3, 1), (2, 1)]),
            Subvariety::points(3, pts(&[&[1, 1, 0], &[0, 1, 2]])).unwrap(),
            point_values(&[(1, 1), (2, 1)]),
            false,
        ),
        fixture(
            "trivial weighted P1, one point",
            ValuedField::trivial(),
            mags(&[(1, 1), (1, 2)]),
            Subvariety::points(2, pts(&[&[1, 1]])).unwrap(),
            rep(&[1, 0]),
            false,
        ),
        fixture(
            "three points on P1, Q_2",
            padic(2),
            mags(&[(1, 1), (1, 1)]),
            Subvariety::points(2, pts(&[&[1, 0], &[1, 2], &[1, 4]])).unwrap(),
            rep(&[1, 1]),
            false,
        ),
    ];
    // a metric that is not diagonal in the coordinates
    let f3 = padic(3);
    let base = NormedSpace::from_vectors(
        f3,
        &pts(&[&[1, 1, 0], &[0, 1, 3], &[1, 0, 1]]),
        mags(&[(1, 1), (1, 3), (3, 1)]),
    )
    .unwrap();
    out.push(Fixture {
        name: "non-diagonal P2, two points, Q_3".into(),
        problem: ExtensionProblem::new(
            QuotientMetric::new(base).unwrap(),
            Subvariety::points(3, pts(&[&[1, 2, 0], &[0, 1, 1]])).unwrap(),
            point_values(&[(1, 1), (1, 3)]),
        )
        .unwrap(),
        semipositive: false,
        weights: None,
    });
    out
}

/// Diagonal metric, at most `m + 1` independent points and nonzero values.
pub fn random_fixture(seed: u64, field: Option<ValuedField>) -> Fixture {
    let mut rng = Rng8::seed_from_u64(seed);
    let field = field.unwrap_or_else(|| random_field(&mut rng));
    let p = field.base_prime();
    let m = rng.gen_range(1..=2);
    let count = rng.gen_range(1..=m + 1);
    let points: Vec<Vec<Q>> = loop {
        let c: Vec<Vec<Q>> = (0..count).map(|_| random_point(&mut rng, m + 1, 5)).collect();
        if rank(&c, m + 1) == count {
            break c;
        }
    };
    let values: Vec<Q> = (0..count)
        .map(|_| loop {
            let v = match p {
                Some(p) => p_rich_rational(&mut rng, p, 5),
                None => small_rational(&mut rng, 5),
            };
            if !v.is_zero() {
                break v;
            }
        })
        .collect();
    let h = DiagonalMetric::random(&mut rng, field.clone(), m + 1);
    Fixture {
        name: format!("random fixture {seed} over {field}"),
        problem: ExtensionProblem::new(
            h.metric,
            Subvariety::points(m + 1, points.iter().map(|x| fev(x)).collect()).unwrap(),
            RestrictedSection::PointValues { degree: 1, values: fev(&values) },
        )
        .unwrap(),
        semipositive: false,
        weights: Some(h.weights),
    }
}

/// Checks one optimal lift from scratch: it restricts to `l^n`, its norm is
/// the Gauss norm and the ratio is at least 1.
pub fn check_lift(fx: &Fixture, lift: &Lift) -> Check {
    let pb = &fx.problem;
    let n = lift.degree;
    let field = pb.metric().field().clone();
    match (pb.subvariety(), pb.section()) {
        (Subvariety::Points(points), l) => {
            for (i, x) in points.iter().enumerate() {
                let xt = normalized(&field, &qv(x));
                let target = match l {
                    RestrictedSection::Representative(s) => num_traits::pow(eval(s, &xt), n as usize),
                    RestrictedSection::PointValues { values, .. } => num_traits::pow(rational(&values[i]), n as usize),
                };
                ensure!(eval(&lift.section, &xt) == target, "{}: degree {n} lift misses point {i}", fx.name);
            }
        }
        (Subvariety::Linear(forms), RestrictedSection::Representative(s)) => {
            let rows: Vec<Vec<Q>> = forms.iter().map(|f| qv(f)).collect();
            let num_vars = s.num_vars();
            let sn = s.pow(n);
            for y in kernel(&rows, num_vars) {
                ensure!(eval(&lift.section, &y) == eval(&sn, &y), "{}: lift differs from l^{n} on Y", fx.name);
            }
        }
        _ => return Err(format!("{}: unsupported fixture shape", fx.name)),
    }
    if let Some(w) = &fx.weights {
        let g = gauss(&field, w, &lift.section);
        ensure!(g == value(&lift.norm), "{}: degree {n} norm {} differs from Gauss norm {g}", fx.name, lift.norm);
    }
    let expected = value(&lift.norm) / num_traits::pow(value(pb.restricted_norm()), n as usize);
    ensure!(value(&lift.ratio) == expected, "{}: ratio is not norm / ‖l‖^n", fx.name);
    ensure!(lift.ratio >= Magnitude::one(), "{}: ratio {} below 1 in degree {n}", fx.name, lift.ratio);
    Ok(())
}

/// `r_{a+b} ≤ r_a·r_b` for `a + b ≤ max_degree`, and `r_n = 1` throughout for
/// semipositive fixtures. Returns the ratios.
pub fn fekete(fx: &Fixture, max_degree: u32) -> Result<Vec<Q>, String> {
    let mut ratios = Vec::new();
    for n in 1..=max_degree {
        let lift = min_norm_lift(&fx.problem, n).map_err(err)?;
        check_lift(fx, &lift)?;
        ratios.push(value(&lift.ratio));
    }
    for a in 1..=max_degree as usize {
        for b in a..=max_degree as usize - a {
            let (ra, rb, rs) = (&ratios[a - 1], &ratios[b - 1], &ratios[a + b - 1]);
            ensure!(*rs <= ra * rb, "{}: r_{} = {rs} > r_{a}·r_{b} = {}", fx.name, a + b, ra * rb);
        }
    }
    if fx.semipositive {
        ensure!(ratios.iter().all(One::is_one), "{}: semipositive fixture has ratios {ratios:?}", fx.name);
    }
    Ok(ratios)
}

/// The Laurent route gives the direct ratio with constant coefficients.
pub fn laurent_agrees(seed: u64, max_degree: u32) -> Check {
    let fx = random_fixture(seed, Some(ValuedField::trivial()));
    for n in 1..=max_degree {
        let direct = min_norm_lift(&fx.problem, n).map_err(err)?;
        let laurent = extend_trivial_via_laurent(&fx.problem, n).map_err(|e| format!("{}: degree {n}: {e}", fx.name))?;
        ensure!(
            laurent.section.coeffs().values().all(FieldElement::is_rational),
            "{}: degree {n} Laurent section keeps T",
            fx.name
        );
        ensure!(laurent.ratio == direct.ratio, "{}: degree {n} ratios {} vs {}", fx.name, laurent.ratio, direct.ratio);
        let lift = Lift { degree: n, section: laurent.section, norm: laurent.norm, ratio: laurent.ratio };
        check_lift(&fx, &lift)?;
    }
    Ok(())
}

// ---- adelic lattices ----

/// Row Hermite normal form over `Z`, zero rows dropped.
pub fn hnf(mut rows: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        while let Some(i) = (r..rows.len()).filter(|&i| !rows[i][c].is_zero()).min_by_key(|&i| rows[i][c].abs()) {
            rows.swap(r, i);
            let mut done = true;
            for i in r + 1..rows.len() {
                if !rows[i][c].is_zero() {
                    let f = &rows[i][c] / &rows[r][c];
                    let pr = rows[r].clone();
                    for (x, y) in rows[i].iter_mut().zip(&pr) {
                        *x -= &f * y;
                    }
                    done &= rows[i][c].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if r < rows.len() && !rows[r][c].is_zero() {
            if rows[r][c].is_negative() {
                for x in rows[r].iter_mut() {
                    *x = -x.clone();
                }
            }
            let piv = rows[r][c].clone();
            let pr = rows[r].clone();
            for row in rows.iter_mut().take(r) {
                let f = num_integer::Integer::div_floor(&row[c], &piv);
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
            r += 1;
        }
    }
    rows.truncate(r);
    rows
}

/// Whether two rational generating sets span the same `Z`-module.
pub fn same_lattice(a: &[Vec<Q>], b: &[Vec<Q>]) -> bool {
    let den = a
        .iter()
        .chain(b)
        .flatten()
        .fold(BigInt::one(), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let d = Q::from_integer(den);
    let clear = |m: &[Vec<Q>]| hnf(m.iter().map(|r| r.iter().map(|x| (x * &d).to_integer()).collect()).collect());
    clear(a) == clear(b)
}

pub struct RandomAdelic {
    pub space: AdelicSpace,
    pub local: BTreeMap<u64, RandomSpace>,
}

pub fn random_adelic(rng: &mut Rng8, max_dim: usize) -> RandomAdelic {
    let dim = rng.gen_range(1..=max_dim);
    let mut local = BTreeMap::new();
    for p in [2u64, 3, 5] {
        if rng.gen_bool(0.6) {
            local.insert(p, RandomSpace::new(rng, ValuedField::padic(p).unwrap(), dim));
        }
    }
    let finite = local.iter().map(|(&p, s)| (p, s.space.clone())).collect();
    let arch = ArchimedeanNorm::scaled_sup(dim, &Q::one()).unwrap();
    RandomAdelic { space: AdelicSpace::new(dim, finite, arch).unwrap(), local }
}

fn only_primes(x: &BigInt, primes: &[u64]) -> bool {
    let mut n = x.abs();
    for &p in primes {
        let bp = BigInt::from(p);
        while (&n % &bp).is_zero() {
            n /= &bp;
        }
    }
    n.is_one()
}

/// The finite unit lattice localizes to the unit ball at each configured
/// prime and to the standard lattice elsewhere.
pub fn localization(seed: u64, max_dim: usize) -> Check {
    let mut rng = Rng8::seed_from_u64(seed);
    let a = random_adelic(&mut rng, max_dim);
    let dim = a.space.dim();
    let lat = finite_unit_lattice(&a.space).map_err(err)?.lattice;
    let basis: Vec<Vec<Q>> = lat.basis().to_vec();
    ensure!(basis.len() == dim, "unit lattice has rank {} in dimension {dim}", basis.len());
    let primes: Vec<u64> = a.local.keys().copied().collect();
    for g in &basis {
        ensure!(g.iter().all(|x| only_primes(x.denom(), &primes)), "generator {g:?} has stray denominators");
        for (&p, s) in &a.local {
            ensure!(s.norm(g) <= Q::one(), "generator {g:?} has norm {} at {p}", s.norm(g));
        }
    }
    let d = det(&basis);
    ensure!(only_primes(d.numer(), &primes) && only_primes(d.denom(), &primes), "covolume {d} involves stray primes");
    let cols = transpose(&basis);
    for (&p, s) in &a.local {
        // the unit ball is spanned by p^{k_i} b_i with k_i least such that |p^{k_i}|·w_i ≤ 1
        for (b, w) in s.basis.iter().zip(&s.weights) {
            let mut k = -40i64;
            while p_pow(p, -k) * w.value() > Q::one() {
                k += 1;
            }
            let u = scale(&p_pow(p, k), b);
            let coords = solve(&cols, &u).ok_or("singular unit lattice basis")?;
            ensure!(
                coords.iter().all(|c| val(c, p).is_none_or(|v| v >= 0)),
                "unit-ball vector {u:?} is not in the lattice localized at {p}"
            );
        }
        ensure!(localization_matches(&a.space, &lat, p).map_err(err)?, "localization check fails at {p}");
    }
    ensure!(localization_matches(&a.space, &lat, 7).map_err(err)?, "localization check fails at 7");
    Ok(())
}

/// The image of the unit lattice under a surjection is the quotient's unit
/// lattice.
pub fn quotient_lattice(seed: u64, max_dim: usize) -> Check {
    let mut rng = Rng8::seed_from_u64(seed);
    let a = random_adelic(&mut rng, max_dim);
    let dim = a.space.dim();
    let t = rng.gen_range(1..=dim);
    let rows: Vec<Vec<Q>> = loop {
        let r: Vec<Vec<Q>> = (0..t).map(|_| (0..dim).map(|_| small_integer(&mut rng, 3)).collect()).collect();
        if rank(&r, dim) == t {
            break r;
        }
    };
    let quotient = quotient_adelic(&a.space, &rows).map_err(err)?;
    let source = finite_unit_lattice(&a.space).map_err(err)?.lattice;
    let target = finite_unit_lattice(&quotient).map_err(err)?.lattice;
    let image: Vec<Vec<Q>> = source.basis().iter().map(|b| mat_vec(&rows, b)).collect();
    ensure!(same_lattice(&image, target.basis()), "f(unit lattice) differs from the quotient unit lattice");
    Ok(())
}

pub struct RandomLattice {
    pub basis: Vec<Vec<Q>>,
    pub functionals: Vec<Vec<Q>>,
    pub lattice: NormedLattice,
}

pub fn random_lattice(rng: &mut Rng8, max_rank: usize) -> RandomLattice {
    let dim = rng.gen_range(1..=max_rank);
    let k = rng.gen_range(1..=dim);
    let basis: Vec<Vec<Q>> = loop {
        let b: Vec<Vec<Q>> = (0..k)
            .map(|_| (0..dim).map(|_| qr(rng.gen_range(-3..=3), rng.gen_range(1..=2))).collect())
            .collect();
        if rank(&b, dim) == k {
            break b;
        }
    };
    let functionals: Vec<Vec<Q>> = loop {
        let count = dim + rng.gen_range(0..=2);
        let f: Vec<Vec<Q>> = (0..count).map(|_| (0..dim).map(|_| small_integer(rng, 2)).collect()).collect();
        if rank(&f, dim) == dim {
            break f;
        }
    };
    let lattice = NormedLattice::new(
        ZLattice::new(dim, &basis).unwrap(),
        ArchimedeanNorm::polyhedral(dim, functionals.clone()).unwrap(),
    )
    .unwrap();
    RandomLattice { basis, functionals, lattice }
}

fn poly_norm(functionals: &[Vec<Q>], x: &[Q]) -> Q {
    functionals.iter().map(|f| dot(f, x).abs()).max().unwrap()
}

fn int_det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    if n == 1 {
        return m[0][0] as i128;
    }
    (0..n)
        .map(|j| {
            let minor: Vec<Vec<i64>> = m[1..]
                .iter()
                .map(|r| r.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, &x)| x).collect())
                .collect();
            let sign = if j % 2 == 0 { 1 } else { -1 };
            sign * m[0][j] as i128 * int_det(&minor)
        })
        .sum()
}

/// Whether the rows extend to a basis of Z^k: the gcd of their maximal
/// minors is 1.
fn primitive(rows: &[Vec<i64>], k: usize) -> bool {
    let j = rows.len();
    let mut g: i128 = 0;
    let mut cols: Vec<usize> = (0..j).collect();
    loop {
        let m: Vec<Vec<i64>> = rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect();
        g = num_integer::Integer::gcd(&g, &int_det(&m));
        if g == 1 {
            return true;
        }
        // next j-subset of 0..k in lexicographic order
        let Some(i) = (0..j).rev().find(|&i| cols[i] < k - j + i) else {
            return false;
        };
        cols[i] += 1;
        for t in i + 1..j {
            cols[t] = cols[t - 1] + 1;
        }
    }
}

/// Whether some `k` of the vectors form a Z-basis, growing only primitive
/// partial systems.
fn any_unimodular(vectors: &[Vec<i64>], k: usize, start: usize, chosen: &mut Vec<Vec<i64>>) -> bool {
    if chosen.len() == k {
        return true;
    }
    for i in start..vectors.len() {
        chosen.push(vectors[i].clone());
        if primitive(chosen, k) && any_unimodular(vectors, k, i + 1, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// Outcome of [`lambda_sandwich`]: whether the enumeration oracle ran.
pub enum LambdaCheck {
    Enumerated,
    BoxTooLarge,
}

/// `λ_Q ≤ λ_Z ≤ rk·λ_Q`, attaining bases, and an independent enumeration of
/// all lattice vectors of norm at most `λ_Z` confirming both values.
pub fn lambda_sandwich(seed: u64, max_rank: usize, box_cap: u64) -> Result<LambdaCheck, String> {
    let mut rng = Rng8::seed_from_u64(seed);
    let rl = random_lattice(&mut rng, max_rank);
    let k = rl.basis.len();
    let lq = lambda_q(&rl.lattice, DEFAULT_RANK_BOUND).map_err(err)?;
    let lz = lambda_z(&rl.lattice, DEFAULT_RANK_BOUND).map_err(err)?;
    ensure!(lq.value <= lz.value, "λ_Q = {} > λ_Z = {}", lq.value, lz.value);
    ensure!(lz.value <= q(k as i64) * &lq.value, "λ_Z = {} > {k}·λ_Q = {}", lz.value, lq.value);

    let coords = |vs: &[Vec<Q>]| -> Result<Vec<Vec<i64>>, String> {
        vs.iter()
            .map(|v| {
                lattice_coords(&rl.basis, v)
                    .map(|c| c.iter().map(|x| x.to_i64().unwrap()).collect())
                    .ok_or_else(|| format!("{v:?} is not in the lattice"))
            })
            .collect()
    };
    ensure!(lq.basis.len() == k && lz.basis.len() == k, "bases of the wrong size");
    ensure!(rank(&lq.basis, rl.basis[0].len()) == k, "λ_Q basis is dependent");
    coords(&lq.basis)?;
    ensure!(int_det(&coords(&lz.basis)?).abs() == 1, "λ_Z basis is not a Z-basis");
    let max = |vs: &[Vec<Q>]| vs.iter().map(|v| poly_norm(&rl.functionals, v)).max().unwrap();
    ensure!(max(&lq.basis) == lq.value, "λ_Q basis has max norm {}", max(&lq.basis));
    ensure!(max(&lz.basis) == lz.value, "λ_Z basis has max norm {}", max(&lz.basis));

    // enumerate in the coordinates of the λ_Z basis, verified above to be a
    // Z-basis of the lattice. Any k independent rows A of ΦB bound the box
    // by |c_j| ≤ λ_Z·Σ_i |A⁻¹_{ji}|; take the tightest over all choices.
    let enum_basis = lz.basis.clone();
    let phib: Vec<Vec<Q>> = rl
        .functionals
        .iter()
        .map(|f| enum_basis.iter().map(|b| dot(f, b)).collect())
        .collect();
    let mut limits = vec![i64::MAX; k];
    let mut subsets = vec![Vec::new()];
    for i in 0..phib.len() {
        let grown: Vec<Vec<usize>> =
            subsets.iter().filter(|s: &&Vec<usize>| s.len() < k).map(|s| [s.as_slice(), &[i]].concat()).collect();
        subsets.extend(grown);
    }
    for subset in subsets.iter().filter(|s| s.len() == k) {
        let a: Vec<Vec<Q>> = subset.iter().map(|&i| phib[i].clone()).collect();
        if rank(&a, k) < k {
            continue;
        }
        let inv_cols: Vec<Vec<Q>> = (0..k)
            .map(|i| {
                let e: Vec<Q> = (0..k).map(|j| if i == j { Q::one() } else { Q::zero() }).collect();
                solve(&a, &e).unwrap()
            })
            .collect();
        for (j, lim) in limits.iter_mut().enumerate() {
            let s = inv_cols.iter().fold(Q::zero(), |acc, col| acc + col[j].abs());
            *lim = (*lim).min((&lz.value * s).floor().to_integer().to_i64().unwrap());
        }
    }
    let total: u64 = limits.iter().map(|&l| 2 * l as u64 + 1).product();
    if total > box_cap {
        return Ok(LambdaCheck::BoxTooLarge);
    }
    let dim = rl.basis[0].len();
    let mut short: Vec<(Q, Vec<i64>, Vec<Q>)> = Vec::new();
    let mut c: Vec<i64> = limits.iter().map(|l| -l).collect();
    'outer: loop {
        if c.iter().any(|&x| x != 0) {
            let v = lin_comb(&c.iter().map(|&x| q(x)).collect::<Vec<_>>(), &enum_basis, dim);
            let n = poly_norm(&rl.functionals, &v);
            if n <= lz.value {
                short.push((n, c.clone(), v));
            }
        }
        for j in 0..k {
            if c[j] < limits[j] {
                c[j] += 1;
                continue 'outer;
            }
            c[j] = -limits[j];
        }
        break;
    }
    short.sort_by(|x, y| x.0.cmp(&y.0));
    let mut span: Vec<Vec<Q>> = Vec::new();
    let mut oracle_q = None;
    for (n, _, v) in &short {
        let mut t = span.clone();
        t.push(v.clone());
        if rank(&t, dim) > span.len() {
            span = t;
            if span.len() == k {
                oracle_q = Some(n.clone());
                break;
            }
        }
    }
    ensure!(oracle_q.as_ref() == Some(&lq.value), "enumeration gives λ_Q = {oracle_q:?}, engine {}", lq.value);
    // no Z-basis among strictly shorter vectors (one of each ± pair)
    let below: Vec<Vec<i64>> = short
        .iter()
        .filter(|(n, c, _)| *n < lz.value && c.iter().find(|&&x| x != 0).unwrap() > &0)
        .map(|(_, c, _)| c.clone())
        .collect();
    ensure!(below.len() <= 1000, "too many short vectors for the subset search: {}", below.len());
    ensure!(
        !any_unimodular(&below, k, 0, &mut Vec::new()),
        "a Z-basis exists below λ_Z = {}",
        lz.value
    );
    Ok(LambdaCheck::Enumerated)
}
