//! One function per subcommand, each producing a [`Table`].

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use ultranorm::adelic::{
    decay_fit, lambda_q, lambda_row, lambda_z, nakai_basis_search, reduction_upper_bound, NakaiOutcome,
    NormedLattice, DEFAULT_RANK_BOUND,
};
use ultranorm::extension::{
    extend_trivial_via_laurent, le_exp, min_norm_lift, subadditivity_violations, lambda_estimate, ExtensionProblem,
};
use ultranorm::linalg::{Matrix, Vector};
use ultranorm::metric::{sigma, QuotientMetric};
use ultranorm::sections::RestrictedSection;
use ultranorm::ultranorm::{
    dual_norm, lattice_from_norm, norm_from_lattice, orthogonalize_flag, quotient_norm, Lattice,
};
use ultranorm::{Error, FieldElement, Result};

use crate::config::*;
use crate::output::{self, Table};

/// Flag values shared by the subcommands.
#[derive(Clone, Debug)]
pub struct Options {
    pub max_degree: u32,
    pub degrees: Vec<u32>,
    pub epsilon: Option<BigRational>,
    pub points: Option<PointsFile>,
    pub seed: u64,
    pub with_sections: bool,
    pub upper_bound: bool,
}

fn magnitude_row(m: &ultranorm::Magnitude, field: &ultranorm::ValuedField) -> Vec<String> {
    output::magnitude(m, field).to_vec()
}

pub fn orthogonalize(cfg: &OrthogonalizeConfig) -> Result<Table> {
    let field = cfg.field.build()?;
    let space = cfg.norm.build(&field)?;
    let family = orthogonalize_flag(&space, &cfg.flag())?;
    let mut t = Table::new(&["index", "vector", "weight", "weight_q", "weight_exponent"]);
    for (i, (v, w)) in family.vectors.iter().zip(&family.weights).enumerate() {
        let mut row = vec![i.to_string(), output::vector(v)];
        row.extend(magnitude_row(w, &field));
        t.push(row);
    }
    Ok(t)
}

pub fn quotient(cfg: &QuotientConfig) -> Result<Table> {
    let field = cfg.field.build()?;
    let space = cfg.norm.build(&field)?;
    let map = Matrix::from_rows(cfg.map(), space.dim())?;
    let q = quotient_norm(&space, &map)?;
    let mut t = Table::new(&["kind", "index", "vector", "norm", "norm_q", "norm_exponent", "lift"]);
    let target = q.target();
    for (i, (v, w)) in target.basis_vectors().iter().zip(target.weights()).enumerate() {
        let mut row = vec!["basis".into(), i.to_string(), output::vector(v)];
        row.extend(magnitude_row(w, &field));
        row.push(output::vector(&q.basis_lifts()[i]));
        t.push(row);
    }
    for (i, y) in cfg.evaluate().iter().enumerate() {
        let mut row = vec!["evaluate".into(), i.to_string(), output::vector(y)];
        row.extend(magnitude_row(&q.norm(y)?, &field));
        row.push(output::vector(&q.lift(y)?));
        t.push(row);
    }
    Ok(t)
}

pub fn dual(cfg: &SpaceConfig) -> Result<Table> {
    let field = cfg.field.build()?;
    let space = dual_norm(&cfg.norm.build(&field)?)?;
    let mut t = Table::new(&["index", "functional", "weight", "weight_q", "weight_exponent"]);
    for (i, (v, w)) in space.basis_vectors().iter().zip(space.weights()).enumerate() {
        let mut row = vec![i.to_string(), output::vector(v)];
        row.extend(magnitude_row(w, &field));
        t.push(row);
    }
    Ok(t)
}

pub fn lattice(cfg: &LatticeConfig) -> Result<Table> {
    let field = cfg.field.build()?;
    let lat = match (&cfg.norm, cfg.generators()) {
        (Some(n), None) => lattice_from_norm(&n.build(&field)?)?,
        (None, Some(g)) => {
            let dim = cfg.dim.or_else(|| g.first().map(Vec::len)).unwrap_or(0);
            Lattice::new(&field, dim, &g)?
        }
        _ => return Err(Error::Invalid("give exactly one of \"norm\" and \"generators\"".into())),
    };
    let mut t = Table::new(&["kind", "index", "vector", "weight", "weight_q", "weight_exponent"]);
    for (i, b) in lat.basis().iter().enumerate() {
        t.push(vec!["lattice".into(), i.to_string(), output::vector(b), String::new(), String::new(), String::new()]);
    }
    if lat.is_full() {
        let norm = norm_from_lattice(&lat)?;
        for (i, (v, w)) in norm.basis_vectors().iter().zip(norm.weights()).enumerate() {
            let mut row = vec!["norm".into(), i.to_string(), output::vector(v)];
            row.extend(magnitude_row(w, &field));
            t.push(row);
        }
    }
    Ok(t)
}

fn random_points(num_vars: usize, count: usize, height: u64, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = height.max(1) as i64;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p: Vector = (0..num_vars)
            .map(|_| FieldElement::from_ratio(rng.gen_range(-h..=h), rng.gen_range(1..=h)))
            .collect();
        if p.iter().any(|x| !x.is_zero()) {
            out.push(p);
        }
    }
    out
}

pub fn sigma_sample(cfg: &MetricConfig, opts: &Options) -> Result<Table> {
    let field = cfg.field.build()?;
    let h = QuotientMetric::new(cfg.norm.build(&field)?)?;
    let points = match &opts.points {
        Some(f) => f.points(),
        None => random_points(h.num_vars(), cfg.samples.unwrap_or(100), cfg.height.unwrap_or(20), opts.seed),
    };
    let jobs: Vec<(u32, &Vector)> = opts.degrees.iter().flat_map(|&n| points.iter().map(move |x| (n, x))).collect();
    let values = jobs
        .par_iter()
        .map(|&(n, x)| sigma(&h, n, x))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["degree", "point", "ratio_num", "ratio_den", "exponent"]);
    for ((n, x), s) in jobs.iter().zip(&values) {
        let mut row = vec![n.to_string(), output::vector(x)];
        row.extend(output::magnitude_parts(s, &field));
        t.push(row);
    }
    Ok(t)
}

fn extension_problem(cfg: &ExtensionConfig) -> Result<ExtensionProblem> {
    let field = cfg.field.build()?;
    let h = QuotientMetric::new(cfg.norm.build(&field)?)?;
    let r = h.num_vars();
    let y = cfg.subvariety.build(r)?;
    let l = match &cfg.section {
        RestrictedSpec::Representative(s) => RestrictedSection::Representative(s.build(r)?),
        RestrictedSpec::Values(v) => RestrictedSection::PointValues {
            degree: 1,
            values: v.iter().map(|x| FieldElement::Rational(x.0.clone())).collect(),
        },
    };
    ExtensionProblem::new(h, y, l)
}

pub fn extension_table(cfg: &ExtensionConfig, opts: &Options) -> Result<Table> {
    let problem = extension_problem(cfg)?;
    let field = problem.metric().field().clone();
    let lifts = (1..=opts.max_degree)
        .into_par_iter()
        .map(|n| min_norm_lift(&problem, n))
        .collect::<Result<Vec<_>>>()?;
    let ratios: Vec<_> = lifts.iter().map(|l| l.ratio.clone()).collect();
    for v in subadditivity_violations(&ratios) {
        log::warn!("r_{} > r_{}·r_{}", v.m + v.n, v.m, v.n);
    }
    let bounds = lambda_estimate(&ratios);
    let mut columns = vec!["n", "ratio", "ratio_q", "ratio_exponent", "bound_ratio", "bound_degree"];
    if opts.epsilon.is_some() {
        columns.push("within_epsilon");
    }
    if opts.with_sections {
        columns.push("section");
    }
    let mut t = Table::new(&columns);
    for (lift, (best, k)) in lifts.iter().zip(&bounds) {
        let mut row = vec![lift.degree.to_string()];
        row.extend(magnitude_row(&lift.ratio, &field));
        row.push(best.to_string());
        row.push(k.to_string());
        if let Some(eps) = &opts.epsilon {
            let x = eps * BigRational::from_integer(lift.degree.into());
            row.push(le_exp(lift.ratio.value(), &x).to_string());
        }
        if opts.with_sections {
            row.push(lift.section.to_string());
        }
        t.push(row);
    }
    Ok(t)
}

pub fn extend_trivial(cfg: &ExtensionConfig, opts: &Options) -> Result<Table> {
    let problem = extension_problem(cfg)?;
    let rows = (1..=opts.max_degree)
        .into_par_iter()
        .map(|n| Ok((min_norm_lift(&problem, n)?, extend_trivial_via_laurent(&problem, n)?)))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["n", "base_prime", "direct_ratio", "laurent_ratio", "agree", "section"]);
    for (direct, laurent) in rows {
        t.push(vec![
            direct.degree.to_string(),
            laurent.base_prime.to_string(),
            direct.ratio.to_string(),
            laurent.ratio.to_string(),
            (direct.ratio == laurent.ratio).to_string(),
            laurent.section.to_string(),
        ]);
    }
    Ok(t)
}

pub fn lambda(lattice: &LatticeGenerators, norm: &ArchimedeanSpec, opts: &Options) -> Result<Table> {
    let z = lattice.build()?;
    let arch = norm.build(z.dim())?;
    let m = NormedLattice::new(z, arch)?;
    let mut t = Table::new(&["quantity", "value", "basis"]);
    t.push(vec!["rank".into(), m.lattice.rank().to_string(), String::new()]);
    if opts.upper_bound {
        let b = reduction_upper_bound(&m)?;
        t.push(vec!["lambda_upper_bound".into(), output::rational(&b.upper), output::qvectors(&b.basis)]);
        return Ok(t);
    }
    let q = lambda_q(&m, DEFAULT_RANK_BOUND)?;
    let zl = lambda_z(&m, DEFAULT_RANK_BOUND)?;
    t.push(vec!["lambda_q".into(), output::rational(&q.value), output::qvectors(&q.basis)]);
    t.push(vec!["lambda_z".into(), output::rational(&zl.value), output::qvectors(&zl.basis)]);
    Ok(t)
}

pub fn nakai(cfg: &GradedConfig, opts: &Options) -> Result<Table> {
    let fixture = cfg.build()?;
    let bound = cfg.rank_bound.unwrap_or(DEFAULT_RANK_BOUND);
    let results = (1..=opts.max_degree)
        .into_par_iter()
        .map(|n| Ok((lambda_row(&fixture, n, bound)?, nakai_basis_search(&fixture, n, bound)?)))
        .collect::<Result<Vec<_>>>()?;
    let n0 = results
        .iter()
        .find(|(_, o)| matches!(o, NakaiOutcome::Found { .. }))
        .map(|(r, _)| r.degree);
    let mut t = Table::new(&["degree", "rank", "lambda_q", "lambda_z", "success", "first_success", "basis", "arch_norms"]);
    for (row, outcome) in &results {
        let (ok, basis, norms) = match outcome {
            NakaiOutcome::Found { basis, arch_norms } => (
                true,
                output::qvectors(basis),
                arch_norms.iter().map(output::rational).collect::<Vec<_>>().join(";"),
            ),
            NakaiOutcome::None => (false, String::new(), String::new()),
        };
        t.push(vec![
            row.degree.to_string(),
            row.rank.to_string(),
            output::rational(&row.lambda_q),
            output::rational(&row.lambda_z),
            ok.to_string(),
            (Some(row.degree) == n0).to_string(),
            basis,
            norms,
        ]);
    }
    // success at n should persist at later degrees; reported, not assumed
    let persistent = n0.is_some_and(|n0| {
        results
            .iter()
            .filter(|(r, _)| r.degree >= n0)
            .all(|(_, o)| matches!(o, NakaiOutcome::Found { .. }))
    });
    t.summary.insert("first_success".into(), json!(n0));
    t.summary.insert("success_persists".into(), json!(persistent));
    let rows: Vec<_> = results.into_iter().map(|(r, _)| r).collect();
    if let Some(fit) = decay_fit(&rows) {
        t.summary.insert(
            "decay_fit_diagnostic".into(),
            json!({
                "approximate": true,
                "slope": format!("{:.6}", fit.slope),
                "intercept": format!("{:.6}", fit.intercept),
                "rate": format!("{:.6}", fit.rate()),
                "samples": fit.samples,
            }),
        );
    }
    Ok(t)
}

/// Parses `NUM/DEN` (or an integer) for `--epsilon`.
pub fn parse_epsilon(s: &str) -> std::result::Result<BigRational, String> {
    let r = ultranorm::valued_field::rational::parse_rational(s).ok_or_else(|| format!("invalid rational {s:?}"))?;
    if r < BigRational::zero() {
        return Err("epsilon must be non-negative".into());
    }
    Ok(r)
}

/// `N` means `1..=N`; a comma list is taken as is.
pub fn parse_degrees(s: &str) -> std::result::Result<Vec<u32>, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let nums = parts
        .iter()
        .map(|p| p.parse::<u32>().map_err(|e| format!("invalid degree {p:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(match nums.as_slice() {
        [n] => (1..=*n).collect(),
        _ => nums,
    })
}
