//! JSON input descriptors. Every struct rejects unknown keys and every
//! rational is a `"num/den"` (or integer) string.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use serde::de::{self, Deserializer, Visitor};
use serde::Deserialize;
use ultranorm::adelic::{ArchimedeanNorm, GradedFixture, QVector};
use ultranorm::linalg::Vector;
use ultranorm::sections::{Section, Subvariety};
use ultranorm::valued_field::rational::parse_rational;
use ultranorm::{FieldElement, Magnitude, Result, ValuedField};

/// An exact rational read from a string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rational(pub BigRational);

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Rational;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a rational written as a \"num/den\" string")
            }
            fn visit_str<E: de::Error>(self, s: &str) -> Result<Rational, E> {
                parse_rational(s).map(Rational).ok_or_else(|| E::custom(format!("invalid rational {s:?}")))
            }
        }
        d.deserialize_str(V)
    }
}

fn to_vector(xs: &[Rational]) -> Vector {
    xs.iter().map(|x| FieldElement::Rational(x.0.clone())).collect()
}

fn to_qvector(xs: &[Rational]) -> QVector {
    xs.iter().map(|x| x.0.clone()).collect()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldSpec {
    Padic { p: u64 },
    Trivial,
    Laurent { base_prime: u64 },
}

impl FieldSpec {
    pub fn build(&self) -> Result<ValuedField> {
        match *self {
            FieldSpec::Padic { p } => ValuedField::padic(p),
            FieldSpec::Trivial => Ok(ValuedField::trivial()),
            FieldSpec::Laurent { base_prime } => ValuedField::laurent(base_prime),
        }
    }
}

/// `q·ρ^n` with `ρ` the magnitude of the uniformizer.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MagnitudeSpec {
    pub q: Rational,
    #[serde(default)]
    pub n: i64,
}

impl MagnitudeSpec {
    pub fn build(&self, field: &ValuedField) -> Result<Magnitude> {
        Magnitude::from_parts(self.q.0.clone(), self.n, field.base_prime())
    }
}

/// Basis vectors (one per inner array) with their weights. Without a basis
/// the standard basis is used.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    #[serde(default)]
    pub basis: Option<Vec<Vec<Rational>>>,
    pub weights: Vec<MagnitudeSpec>,
}

impl NormSpec {
    pub fn build(&self, field: &ValuedField) -> Result<ultranorm::ultranorm::NormedSpace> {
        use ultranorm::ultranorm::NormedSpace;
        let weights = self.weights.iter().map(|w| w.build(field)).collect::<Result<Vec<_>>>()?;
        match &self.basis {
            None => NormedSpace::diagonal(field.clone(), weights),
            Some(b) => {
                let vectors: Vec<Vector> = b.iter().map(|v| to_vector(v)).collect();
                NormedSpace::from_vectors(field.clone(), &vectors, weights)
            }
        }
    }
}

/// A homogeneous polynomial: keys are comma-separated exponent lists.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectionSpec {
    pub degree: u32,
    pub coeffs: BTreeMap<String, Rational>,
}

impl SectionSpec {
    pub fn build(&self, num_vars: usize) -> Result<Section> {
        let mut coeffs = BTreeMap::new();
        for (k, c) in &self.coeffs {
            let exp = k
                .split(',')
                .map(|e| e.trim().parse::<u32>())
                .collect::<std::result::Result<Vec<_>, _>>()
                .map_err(|_| ultranorm::Error::Invalid(format!("bad exponent key {k:?}")))?;
            coeffs.insert(exp, FieldElement::Rational(c.0.clone()));
        }
        Section::new(num_vars, self.degree, coeffs)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum SubvarietySpec {
    Points(Vec<Vec<Rational>>),
    Linear(Vec<Vec<Rational>>),
}

impl SubvarietySpec {
    pub fn build(&self, num_vars: usize) -> Result<Subvariety> {
        match self {
            SubvarietySpec::Points(ps) => Subvariety::points(num_vars, ps.iter().map(|p| to_vector(p)).collect()),
            SubvarietySpec::Linear(fs) => Subvariety::linear(num_vars, fs.iter().map(|f| to_vector(f)).collect()),
        }
    }
}

/// The degree-1 section on `Y`: a global representative, or its values at
/// the points of `Y`.
#[derive(Clone, Debug, Deserialize)]
#[serde(rename_all = "lowercase", deny_unknown_fields)]
pub enum RestrictedSpec {
    Representative(SectionSpec),
    Values(Vec<Rational>),
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub field: FieldSpec,
    pub norm: NormSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrthogonalizeConfig {
    pub field: FieldSpec,
    pub norm: NormSpec,
    pub flag: Vec<Vec<Rational>>,
}

impl OrthogonalizeConfig {
    pub fn flag(&self) -> Vec<Vector> {
        self.flag.iter().map(|v| to_vector(v)).collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuotientConfig {
    pub field: FieldSpec,
    pub norm: NormSpec,
    /// Rows of the surjection.
    pub map: Vec<Vec<Rational>>,
    #[serde(default)]
    pub evaluate: Vec<Vec<Rational>>,
}

impl QuotientConfig {
    pub fn map(&self) -> Vec<Vector> {
        self.map.iter().map(|v| to_vector(v)).collect()
    }

    pub fn evaluate(&self) -> Vec<Vector> {
        self.evaluate.iter().map(|v| to_vector(v)).collect()
    }
}

/// Either a norm (converted to its unit-ball lattice) or lattice
/// generators (converted to the lattice norm).
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub field: FieldSpec,
    #[serde(default)]
    pub norm: Option<NormSpec>,
    #[serde(default)]
    pub generators: Option<Vec<Vec<Rational>>>,
    #[serde(default)]
    pub dim: Option<usize>,
}

impl LatticeConfig {
    pub fn generators(&self) -> Option<Vec<Vector>> {
        self.generators.as_ref().map(|g| g.iter().map(|v| to_vector(v)).collect())
    }
}

/// A metric on `O(1)` over `P^{r-1}` from a norm on `k^r`, with optional
/// randomly generated sample points.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricConfig {
    pub field: FieldSpec,
    pub norm: NormSpec,
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default)]
    pub height: Option<u64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointsFile {
    pub points: Vec<Vec<Rational>>,
}

impl PointsFile {
    pub fn points(&self) -> Vec<Vector> {
        self.points.iter().map(|v| to_vector(v)).collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionConfig {
    pub field: FieldSpec,
    pub norm: NormSpec,
    pub subvariety: SubvarietySpec,
    pub section: RestrictedSpec,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeGenerators {
    pub generators: Vec<Vec<Rational>>,
    #[serde(default)]
    pub dim: Option<usize>,
}

impl LatticeGenerators {
    pub fn build(&self) -> Result<ultranorm::adelic::ZLattice> {
        let dim = self.dim.or_else(|| self.generators.first().map(Vec::len)).unwrap_or(0);
        let gens: Vec<QVector> = self.generators.iter().map(|g| to_qvector(g)).collect();
        ultranorm::adelic::ZLattice::new(dim, &gens)
    }
}

/// `max_i |φ_i(x)|`, or `scale·max_i |x_i|` when only a scale is given.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArchimedeanSpec {
    #[serde(default)]
    pub functionals: Option<Vec<Vec<Rational>>>,
    #[serde(default)]
    pub scale: Option<Rational>,
}

impl ArchimedeanSpec {
    pub fn build(&self, dim: usize) -> Result<ArchimedeanNorm> {
        match (&self.functionals, &self.scale) {
            (Some(f), None) => ArchimedeanNorm::polyhedral(dim, f.iter().map(|v| to_qvector(v)).collect()),
            (None, Some(c)) => ArchimedeanNorm::scaled_sup(dim, &c.0),
            (None, None) => ArchimedeanNorm::scaled_sup(dim, &BigRational::from_integer(1.into())),
            (Some(_), Some(_)) => {
                Err(ultranorm::Error::Invalid("give either functionals or a scale, not both".into()))
            }
        }
    }
}

/// Sections of `O(n)` on `P^m`, with per-prime diagonal weights on the
/// coordinates and the archimedean norm `arch_factor·arch_ratio^n·max|coef|`.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradedConfig {
    pub m: usize,
    #[serde(default)]
    pub finite: BTreeMap<u64, Vec<MagnitudeSpec>>,
    pub arch_factor: Rational,
    pub arch_ratio: Rational,
    #[serde(default)]
    pub points: Vec<Vec<Rational>>,
    #[serde(default)]
    pub rank_bound: Option<usize>,
}

impl GradedConfig {
    pub fn build(&self) -> Result<GradedFixture> {
        let mut finite_weights = BTreeMap::new();
        for (&p, ws) in &self.finite {
            let field = ValuedField::padic(p)?;
            finite_weights.insert(p, ws.iter().map(|w| w.build(&field)).collect::<Result<Vec<_>>>()?);
        }
        Ok(GradedFixture {
            m: self.m,
            finite_weights,
            arch_factor: self.arch_factor.0.clone(),
            arch_ratio: self.arch_ratio.0.clone(),
            quotient_points: self.points.iter().map(|p| to_qvector(p)).collect(),
        })
    }
}
