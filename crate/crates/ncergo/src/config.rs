//! TOML scenario files and their resolution into core objects.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use ncergo_core::contraction::ContractionSpec;
use ncergo_core::sample;
use ncergo_core::weights::Ladder;
use ncergo_core::{
    construct_contraction, AbsoluteContraction, Algebra, BesicovitchWeight, Block, Element,
    Perturbation, TrigPolynomial, TrigTerm, WeightFamily, C64,
};
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::format;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("invalid scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("{context}: {source}")]
    Format {
        context: String,
        source: format::FormatError,
    },
    #[error(transparent)]
    Core(#[from] ncergo_core::Error),
}

type Result<T> = std::result::Result<T, ConfigError>;

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// A real number or a `[re, im]` pair.
#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Complex {
    Real(f64),
    Pair([f64; 2]),
}

impl Complex {
    pub fn value(&self) -> C64 {
        match self {
            Complex::Real(r) => C64::new(*r, 0.0),
            Complex::Pair([r, i]) => C64::new(*r, *i),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraConfig {
    pub blocks: Vec<usize>,
    /// Defaults to all ones.
    pub weights: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ElementConfig {
    Identity,
    Scalar { value: Complex },
    /// Diagonal entries, block after block.
    Diagonal { values: Vec<f64> },
    /// Element text format, inline.
    Text { text: String },
    /// Element text format, path relative to the scenario file.
    File { path: PathBuf },
    RandomPositive,
    RandomHermitian,
    RandomGeneral,
}

impl ElementConfig {
    fn is_random(&self) -> bool {
        matches!(
            self,
            ElementConfig::RandomPositive | ElementConfig::RandomHermitian | ElementConfig::RandomGeneral
        )
    }
}

fn default_one() -> f64 {
    1.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ContractionConfig {
    Identity,
    ScaledUnitary {
        unitary: ElementConfig,
        #[serde(default = "default_one")]
        scale: f64,
    },
    RandomUnitary {
        #[serde(default = "default_one")]
        scale: f64,
    },
    Pinching {
        projections: Vec<ElementConfig>,
    },
    SchurMultiplier {
        coefficients: ElementConfig,
    },
    Kraus {
        operators: Vec<ElementConfig>,
    },
    RandomKraus {
        count: usize,
        #[serde(default = "default_one")]
        shrink: f64,
    },
    /// Nonnegative matrix acting on the diagonal algebra (all blocks 1×1)
    /// by `(Tf)(i) = Σ_j s_ij f(j)`.
    Substochastic {
        matrix: Vec<Vec<f64>>,
    },
    RandomSubstochastic {
        #[serde(default = "default_one")]
        shrink: f64,
    },
    ConvexCombination {
        weights: Vec<f64>,
        maps: Vec<ContractionConfig>,
    },
    Composition {
        maps: Vec<ContractionConfig>,
    },
}

impl ContractionConfig {
    fn is_random(&self) -> bool {
        match self {
            ContractionConfig::RandomUnitary { .. }
            | ContractionConfig::RandomKraus { .. }
            | ContractionConfig::RandomSubstochastic { .. } => true,
            ContractionConfig::ScaledUnitary { unitary, .. } => unitary.is_random(),
            ContractionConfig::Pinching { projections } => projections.iter().any(ElementConfig::is_random),
            ContractionConfig::SchurMultiplier { coefficients } => coefficients.is_random(),
            ContractionConfig::Kraus { operators } => operators.iter().any(ElementConfig::is_random),
            ContractionConfig::ConvexCombination { maps, .. } | ContractionConfig::Composition { maps } => {
                maps.iter().any(ContractionConfig::is_random)
            }
            ContractionConfig::Identity | ContractionConfig::Substochastic { .. } => false,
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermConfig {
    pub coefficient: Complex,
    /// Angles in radians, one per axis.
    #[serde(default)]
    pub phases: Option<Vec<f64>>,
    /// Angles as fractions of a full turn; an alternative to `phases`.
    #[serde(default)]
    pub turns: Option<Vec<f64>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PerturbationConfig {
    Zero,
    Decay { coefficient: Complex, alpha: f64 },
    Periodic { values: Vec<Complex> },
    SeededNoise { amplitude: f64, beta: f64 },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub level: f64,
    /// Defaults to the base polynomial.
    pub terms: Option<Vec<TermConfig>>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightConfig {
    Trig {
        terms: Vec<TermConfig>,
        #[serde(default)]
        normalize: bool,
    },
    Besicovitch {
        terms: Vec<TermConfig>,
        perturbation: Option<PerturbationConfig>,
        approximants: Option<Vec<LevelConfig>>,
        bound: Option<f64>,
        #[serde(default)]
        normalize: bool,
    },
}

fn default_evaluator() -> String {
    "grid".into()
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AverageTask {
    /// Defaults to `(1, …, 1)`.
    pub lower: Option<Vec<usize>>,
    pub upper: Vec<usize>,
    #[serde(default = "default_evaluator")]
    pub evaluator: String,
    /// Approximant level for the limit of a Besicovitch weight.
    pub limit_epsilon: Option<f64>,
}

fn default_cauchy_slack() -> f64 {
    0.05
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaximalTask {
    pub cutoffs: Vec<usize>,
    #[serde(default = "default_cauchy_slack")]
    pub cauchy_slack: f64,
    pub tol: Option<f64>,
    pub max_iterations: Option<usize>,
}

#[derive(Clone, Debug, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LadderConfig {
    Named(String),
    Explicit(Vec<usize>),
}

fn default_ladder() -> LadderConfig {
    LadderConfig::Named("doubling".into())
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesicovitchTask {
    pub epsilon: f64,
    pub cutoff: Vec<usize>,
    #[serde(default = "default_ladder")]
    pub ladder: LadderConfig,
    #[serde(default = "one_usize")]
    pub onset: usize,
}

fn one_usize() -> usize {
    1
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifyTask {
    pub epsilon: Option<f64>,
    pub lambda: Option<f64>,
    pub onsets: Vec<usize>,
    /// Residuals are computed on `[1, horizon]^d`.
    pub horizon: usize,
    pub tol: Option<f64>,
    pub limit_epsilon: Option<f64>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyTask {
    pub tol: Option<f64>,
}

fn default_p() -> f64 {
    2.0
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub seed: Option<u64>,
    #[serde(default = "default_p")]
    pub p: f64,
    pub dimension: usize,
    pub budget: Option<u64>,
    pub algebra: AlgebraConfig,
    pub contractions: Vec<ContractionConfig>,
    pub weight: Option<WeightConfig>,
    pub x: ElementConfig,
    pub verify: Option<VerifyTask>,
    pub average: Option<AverageTask>,
    pub maximal: Option<MaximalTask>,
    pub besicovitch: Option<BesicovitchTask>,
    pub certify: Option<CertifyTask>,
}

/// A parsed scenario with the bytes it came from.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub source: String,
    /// Directory for relative `file` references.
    pub base_dir: PathBuf,
}

impl Scenario {
    pub fn parse(source: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let config: ScenarioConfig = toml::from_str(source)?;
        let s = Scenario {
            config,
            source: source.to_string(),
            base_dir: base_dir.into(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let source = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&source, dir)
    }

    pub fn uses_randomness(&self) -> bool {
        let c = &self.config;
        c.x.is_random()
            || c.contractions.iter().any(ContractionConfig::is_random)
            || matches!(
                &c.weight,
                Some(WeightConfig::Besicovitch {
                    perturbation: Some(PerturbationConfig::SeededNoise { .. }),
                    ..
                })
            )
    }

    fn validate(&self) -> Result<()> {
        let c = &self.config;
        let d = c.dimension;
        if d == 0 {
            return Err(invalid("dimension must be positive"));
        }
        if c.contractions.len() != d {
            return Err(invalid(format!(
                "{} contractions given for dimension {d}",
                c.contractions.len()
            )));
        }
        if let Some(w) = &c.weight {
            let terms = match w {
                WeightConfig::Trig { terms, .. } | WeightConfig::Besicovitch { terms, .. } => terms,
            };
            for (j, t) in terms.iter().enumerate() {
                let len = t.phases.as_ref().or(t.turns.as_ref()).map_or(0, Vec::len);
                if len != d {
                    return Err(invalid(format!("weight term {j} has {len} phases, expected {d}")));
                }
            }
        }
        let check_corner = |what: &str, v: &[usize]| {
            if v.len() != d {
                Err(invalid(format!("{what} has {} entries, expected {d}", v.len())))
            } else {
                Ok(())
            }
        };
        if let Some(a) = &c.average {
            check_corner("average.upper", &a.upper)?;
            if let Some(l) = &a.lower {
                check_corner("average.lower", l)?;
            }
            if ncergo_core::Evaluator::parse(&a.evaluator).is_none() {
                return Err(invalid(format!(
                    "unknown evaluator `{}` (direct, grid, factorized)",
                    a.evaluator
                )));
            }
        }
        if let Some(b) = &c.besicovitch {
            check_corner("besicovitch.cutoff", &b.cutoff)?;
            self.ladder(&b.ladder)?;
        }
        if let Some(cert) = &c.certify {
            if cert.epsilon.is_some() == cert.lambda.is_some() {
                return Err(invalid("certify needs exactly one of epsilon and lambda"));
            }
        }
        if self.uses_randomness() && c.seed.is_none() {
            return Err(invalid("a seed is required when any component is random"));
        }
        Ok(())
    }

    pub fn ladder(&self, l: &LadderConfig) -> Result<Ladder> {
        match l {
            LadderConfig::Named(s) if s == "doubling" => Ok(Ladder::Doubling),
            LadderConfig::Named(s) if s == "every" => Ok(Ladder::Every),
            LadderConfig::Named(s) => Err(invalid(format!("unknown ladder `{s}` (doubling, every, or a list)"))),
            LadderConfig::Explicit(v) => Ok(Ladder::Explicit(v.clone())),
        }
    }

    pub fn algebra(&self) -> Result<Arc<Algebra>> {
        let a = &self.config.algebra;
        let w = a.weights.clone().unwrap_or_else(|| vec![1.0; a.blocks.len()]);
        Ok(Arc::new(Algebra::new(a.blocks.clone(), w)?))
    }
}

/// Resolves config entries against an algebra and a seed. Random draws use
/// a ChaCha stream keyed by `(seed, tag)`.
pub struct Resolver<'a> {
    pub alg: Arc<Algebra>,
    pub seed: Option<u64>,
    pub base_dir: &'a Path,
}

impl Resolver<'_> {
    fn rng(&self, tag: &str) -> Result<ChaCha8Rng> {
        let seed = self
            .seed
            .ok_or_else(|| invalid(format!("`{tag}` is random but no seed was given")))?;
        Ok(ChaCha8Rng::seed_from_u64(sample::keyed_seed(seed, tag)))
    }

    pub fn element(&self, e: &ElementConfig, tag: &str) -> Result<Element> {
        let alg = &self.alg;
        Ok(match e {
            ElementConfig::Identity => Element::identity(alg),
            ElementConfig::Scalar { value } => Element::scalar(alg, value.value()),
            ElementConfig::Diagonal { values } => {
                let total: usize = alg.block_dims().iter().sum();
                if values.len() != total {
                    return Err(invalid(format!(
                        "`{tag}`: {} diagonal values for {total} diagonal slots",
                        values.len()
                    )));
                }
                let mut at = 0;
                let blocks = alg
                    .block_dims()
                    .iter()
                    .map(|&n| {
                        let b = Block::from_fn(n, n, |i, j| {
                            if i == j {
                                C64::new(values[at + i], 0.0)
                            } else {
                                C64::new(0.0, 0.0)
                            }
                        });
                        at += n;
                        b
                    })
                    .collect();
                Element::from_blocks(alg, blocks)?
            }
            ElementConfig::Text { text } => {
                format::read_element_on(alg, text).map_err(|source| ConfigError::Format {
                    context: format!("`{tag}`"),
                    source,
                })?
            }
            ElementConfig::File { path } => {
                let full = self.base_dir.join(path);
                let text = std::fs::read_to_string(&full).map_err(|source| ConfigError::Io {
                    path: full.clone(),
                    source,
                })?;
                format::read_element_on(alg, &text).map_err(|source| ConfigError::Format {
                    context: full.display().to_string(),
                    source,
                })?
            }
            ElementConfig::RandomPositive => sample::random_positive(alg, &mut self.rng(tag)?),
            ElementConfig::RandomHermitian => sample::random_hermitian(alg, &mut self.rng(tag)?),
            ElementConfig::RandomGeneral => sample::random_general(alg, &mut self.rng(tag)?),
        })
    }

    pub fn contraction(&self, c: &ContractionConfig, tag: &str) -> Result<AbsoluteContraction> {
        let alg = &self.alg;
        let sub = |i: usize| format!("{tag}/{i}");
        let spec = match c {
            ContractionConfig::Identity => return Ok(AbsoluteContraction::identity(alg)),
            ContractionConfig::ScaledUnitary { unitary, scale } => ContractionSpec::ScaledUnitary {
                unitary: self.element(unitary, &sub(0))?,
                scale: *scale,
            },
            ContractionConfig::RandomUnitary { scale } => ContractionSpec::ScaledUnitary {
                unitary: sample::random_unitary(alg, &mut self.rng(tag)?),
                scale: *scale,
            },
            ContractionConfig::Pinching { projections } => ContractionSpec::Pinching {
                projections: projections
                    .iter()
                    .enumerate()
                    .map(|(i, e)| self.element(e, &sub(i)))
                    .collect::<Result<_>>()?,
            },
            ContractionConfig::SchurMultiplier { coefficients } => ContractionSpec::SchurMultiplier {
                coefficients: self.element(coefficients, &sub(0))?,
            },
            ContractionConfig::Kraus { operators } => ContractionSpec::Kraus {
                operators: operators
                    .iter()
                    .enumerate()
                    .map(|(i, e)| self.element(e, &sub(i)))
                    .collect::<Result<_>>()?,
            },
            ContractionConfig::RandomKraus { count, shrink } => ContractionSpec::Kraus {
                operators: sample::random_kraus(alg, *count, *shrink, &mut self.rng(tag)?),
            },
            ContractionConfig::Substochastic { matrix } => self.substochastic(matrix)?,
            ContractionConfig::RandomSubstochastic { shrink } => {
                let n = alg.num_blocks();
                self.substochastic(&sample::random_substochastic(n, *shrink, &mut self.rng(tag)?))?
            }
            ContractionConfig::ConvexCombination { weights, maps } => ContractionSpec::ConvexCombination {
                weights: weights.clone(),
                maps: maps
                    .iter()
                    .enumerate()
                    .map(|(i, m)| self.contraction(m, &sub(i)))
                    .collect::<Result<_>>()?,
            },
            ContractionConfig::Composition { maps } => ContractionSpec::Composition {
                maps: maps
                    .iter()
                    .enumerate()
                    .map(|(i, m)| self.contraction(m, &sub(i)))
                    .collect::<Result<_>>()?,
            },
        };
        Ok(construct_contraction(alg, spec)?)
    }

    fn substochastic(&self, m: &[Vec<f64>]) -> Result<ContractionSpec> {
        let alg = &self.alg;
        let n = alg.num_blocks();
        if alg.block_dims().iter().any(|&b| b != 1) {
            return Err(invalid("substochastic maps need an algebra of 1x1 blocks"));
        }
        if m.len() != n || m.iter().any(|r| r.len() != n) {
            return Err(invalid(format!("substochastic matrix must be {n}x{n}")));
        }
        if m.iter().flatten().any(|&v| v.is_nan() || v < 0.0) {
            return Err(invalid("substochastic matrix entries must be >= 0"));
        }
        Ok(ContractionSpec::Raw {
            transfer: Block::from_fn(n, n, |i, j| C64::new(m[i][j], 0.0)),
        })
    }

    pub fn weight(&self, w: &WeightConfig, dim: usize) -> Result<WeightFamily> {
        let poly = |terms: &[TermConfig]| -> Result<TrigPolynomial> {
            let terms = terms
                .iter()
                .map(|t| {
                    let phases = match (&t.phases, &t.turns) {
                        (Some(p), None) => p.clone(),
                        (None, Some(t)) => t.iter().map(|f| 2.0 * PI * f).collect(),
                        _ => return Err(invalid("each weight term needs exactly one of phases and turns")),
                    };
                    Ok(TrigTerm {
                        coefficient: t.coefficient.value(),
                        phases,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(TrigPolynomial::new(dim, terms)?)
        };
        Ok(match w {
            WeightConfig::Trig { terms, normalize } => {
                let f = WeightFamily::Trig(poly(terms)?);
                if *normalize {
                    f.normalized()
                } else {
                    f
                }
            }
            WeightConfig::Besicovitch {
                terms,
                perturbation,
                approximants,
                bound,
                normalize,
            } => {
                let base = poly(terms)?;
                let pert = match perturbation {
                    None | Some(PerturbationConfig::Zero) => Perturbation::Zero,
                    Some(PerturbationConfig::Decay { coefficient, alpha }) => Perturbation::Decay {
                        coefficient: coefficient.value(),
                        alpha: *alpha,
                    },
                    Some(PerturbationConfig::Periodic { values }) => Perturbation::Periodic {
                        values: values.iter().map(Complex::value).collect(),
                    },
                    Some(PerturbationConfig::SeededNoise { amplitude, beta }) => {
                        let seed = self
                            .seed
                            .ok_or_else(|| invalid("seeded noise needs a scenario seed"))?;
                        Perturbation::SeededNoise {
                            amplitude: *amplitude,
                            beta: *beta,
                            seed: sample::keyed_seed(seed, "weight/noise"),
                        }
                    }
                };
                // without declared approximants the base serves at every level
                let levels = match approximants {
                    None => vec![(f64::MIN_POSITIVE, base.clone())],
                    Some(ls) => ls
                        .iter()
                        .map(|l| {
                            let p = match &l.terms {
                                Some(t) => poly(t)?,
                                None => base.clone(),
                            };
                            Ok((l.level, p))
                        })
                        .collect::<Result<Vec<_>>>()?,
                };
                let b = BesicovitchWeight::new(base, pert, levels, *bound)?;
                WeightFamily::Besicovitch(if *normalize { b.normalized() } else { b })
            }
        })
    }
}
