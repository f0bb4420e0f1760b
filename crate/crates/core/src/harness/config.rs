//! Experiment configuration and its flat `key = value` text form.
//!
//! ```text
//! # logistic regression, TRish
//! method = trish
//! gamma1 = 15
//! gamma2 = 6
//! stepsize = fixed:1
//! problem = logistic
//! dataset = data/train.svm
//! test_dataset = data/test.svm
//! oracle = minibatch
//! batch = 10
//! epochs = 1
//! seeds = 5
//! checkpoints = 0.25,0.5,0.75,1
//! ```
//!
//! | key | values | default |
//! |-----|--------|---------|
//! | `method` | `trish`, `sg` | required |
//! | `gamma1`, `gamma2` | positive reals, `gamma1 > gamma2` | required for `trish` |
//! | `stepsize` | `fixed:α`, `harmonic:a,b` | required; `alpha = α` is shorthand for `fixed:α` |
//! | `problem` | `quadratic`, `nonconvex`, `logistic` | required |
//! | `diag`, `shift` | comma lists (`quadratic`) | `shift` defaults to zeros |
//! | `dim` | positive integer (`nonconvex`) | 1 |
//! | `dataset`, `test_dataset` | LIBSVM paths (`logistic`) | `dataset` required |
//! | `oracle` | `exact`, `minibatch`, `gaussian` | `minibatch` for `logistic`, else `exact` |
//! | `sampling` | `with_replacement`, `without_replacement`, `full_pass` | `with_replacement` |
//! | `sigma` | `constant:σ`, `coupled:m`, `geometric:M3,ζ` | required for `gaussian` |
//! | `batch` | positive integer | 1 |
//! | `epochs` / `iterations` | positive real / positive integer | one of them required |
//! | `seeds` | positive integer | 1 |
//! | `checkpoints` | strictly increasing comma list in (0, 1] | `1` |
//! | `seed` | u64 base seed | 0 |
//! | `x1` | `zeros`, `ones` or a comma list | `zeros` for `logistic`, else `ones` |
//! | `record_wall_time` | `true`, `false` | `false` |

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::oracles::{BatchSampling, SigmaSchedule};
use crate::step::{Method, StepsizeSchedule, TrishParams};

#[derive(Debug, Clone, PartialEq)]
pub enum ProblemSpec {
    Quadratic {
        diag: Vec<f64>,
        shift: Vec<f64>,
    },
    NonconvexPl {
        dim: usize,
    },
    Logistic {
        train: PathBuf,
        test: Option<PathBuf>,
    },
}

impl ProblemSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemSpec::Quadratic { .. } => "quadratic",
            ProblemSpec::NonconvexPl { .. } => "nonconvex",
            ProblemSpec::Logistic { .. } => "logistic",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OracleSpec {
    /// `g = ∇f(x)`.
    Exact,
    /// Mini-batch of `batch_size` components of a finite sum.
    MiniBatch(BatchSampling),
    /// `g = ∇f(x) + σ_k z`, `z ~ N(0, I)`.
    Gaussian(SigmaSchedule),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    /// Multiples of `⌈N/batch⌉` iterations; finite sums only.
    Epochs(f64),
    Iterations(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitialPoint {
    Zeros,
    Ones,
    Explicit(Vec<f64>),
}

impl InitialPoint {
    pub fn materialize(&self, dim: usize) -> Result<Vec<f64>> {
        match self {
            InitialPoint::Zeros => Ok(vec![0.0; dim]),
            InitialPoint::Ones => Ok(vec![1.0; dim]),
            InitialPoint::Explicit(x) if x.len() == dim => Ok(x.clone()),
            InitialPoint::Explicit(x) => Err(Error::usage(format!(
                "initial point has dimension {}, problem has {dim}",
                x.len()
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub method: Method,
    pub problem: ProblemSpec,
    pub oracle: OracleSpec,
    pub schedule: StepsizeSchedule,
    pub batch_size: usize,
    pub budget: Budget,
    pub n_seeds: usize,
    pub checkpoint_fractions: Vec<f64>,
    pub base_seed: u64,
    pub initial_point: InitialPoint,
    /// Wall time makes records nondeterministic, so it is opt-in.
    pub record_wall_time: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_seeds == 0 {
            return Err(Error::usage("at least one seed is required"));
        }
        if self.batch_size == 0 {
            return Err(Error::usage("batch size must be positive"));
        }
        let cps = &self.checkpoint_fractions;
        if cps.is_empty() {
            return Err(Error::usage("at least one checkpoint fraction is required"));
        }
        if cps.iter().any(|&f| !(f > 0.0 && f <= 1.0)) {
            return Err(Error::usage(format!(
                "checkpoint fractions must lie in (0, 1], got {cps:?}"
            )));
        }
        if cps.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::usage(format!(
                "checkpoint fractions must be strictly increasing, got {cps:?}"
            )));
        }
        match self.budget {
            Budget::Epochs(e) if !(e > 0.0 && e.is_finite()) => {
                return Err(Error::usage(format!("epochs must be positive, got {e}")))
            }
            Budget::Iterations(0) => return Err(Error::usage("iterations must be positive")),
            _ => {}
        }
        if let OracleSpec::Gaussian(s) = self.oracle {
            s.validate()?;
        }
        if matches!(
            self.problem,
            ProblemSpec::Quadratic { .. } | ProblemSpec::NonconvexPl { .. }
        ) && matches!(self.oracle, OracleSpec::MiniBatch(_))
        {
            return Err(Error::usage(format!(
                "the {} problem is not a finite sum; use the exact or gaussian oracle",
                self.problem.name()
            )));
        }
        Ok(())
    }

    /// Builds a configuration from parsed `key = value` pairs.
    pub fn from_pairs(pairs: &BTreeMap<String, String>) -> Result<Self> {
        const KNOWN: &[&str] = &[
            "method",
            "gamma1",
            "gamma2",
            "stepsize",
            "alpha",
            "problem",
            "diag",
            "shift",
            "dim",
            "dataset",
            "test_dataset",
            "oracle",
            "sampling",
            "sigma",
            "batch",
            "epochs",
            "iterations",
            "seeds",
            "checkpoints",
            "seed",
            "x1",
            "record_wall_time",
        ];
        if let Some(k) = pairs.keys().find(|k| !KNOWN.contains(&k.as_str())) {
            return Err(Error::usage(format!("unknown configuration key `{k}`")));
        }
        let get = |k: &str| pairs.get(k).map(String::as_str);
        let require = |k: &str| get(k).ok_or_else(|| Error::usage(format!("missing key `{k}`")));

        let method = match require("method")? {
            "sg" => Method::Sg,
            "trish" => Method::Trish(TrishParams::new(
                parse_f64("gamma1", require("gamma1")?)?,
                parse_f64("gamma2", require("gamma2")?)?,
            )?),
            other => return Err(Error::usage(format!("unknown method `{other}`"))),
        };

        let schedule = match (get("stepsize"), get("alpha")) {
            (Some(_), Some(_)) => {
                return Err(Error::usage("give either `stepsize` or `alpha`, not both"))
            }
            (None, Some(a)) => StepsizeSchedule::fixed(parse_f64("alpha", a)?)?,
            (Some(s), None) => parse_schedule(s)?,
            (None, None) => return Err(Error::usage("missing key `stepsize` (or `alpha`)")),
        };

        let problem = match require("problem")? {
            "quadratic" => {
                let diag = parse_list("diag", require("diag")?)?;
                let shift = match get("shift") {
                    Some(s) => parse_list("shift", s)?,
                    None => vec![0.0; diag.len()],
                };
                ProblemSpec::Quadratic { diag, shift }
            }
            "nonconvex" => ProblemSpec::NonconvexPl {
                dim: get("dim").map_or(Ok(1), |d| parse_int("dim", d))?,
            },
            "logistic" => ProblemSpec::Logistic {
                train: PathBuf::from(require("dataset")?),
                test: get("test_dataset").map(PathBuf::from),
            },
            other => return Err(Error::usage(format!("unknown problem `{other}`"))),
        };

        let sampling = match get("sampling").unwrap_or("with_replacement") {
            "with_replacement" => BatchSampling::WithReplacement,
            "without_replacement" => BatchSampling::WithoutReplacement,
            "full_pass" => BatchSampling::FullPass,
            other => return Err(Error::usage(format!("unknown sampling `{other}`"))),
        };
        let default_oracle = match problem {
            ProblemSpec::Logistic { .. } => "minibatch",
            _ => "exact",
        };
        let oracle = match get("oracle").unwrap_or(default_oracle) {
            "exact" => OracleSpec::Exact,
            "minibatch" => OracleSpec::MiniBatch(sampling),
            "gaussian" => OracleSpec::Gaussian(parse_sigma(require("sigma")?)?),
            other => return Err(Error::usage(format!("unknown oracle `{other}`"))),
        };

        let budget = match (get("epochs"), get("iterations")) {
            (Some(_), Some(_)) => {
                return Err(Error::usage(
                    "give either `epochs` or `iterations`, not both",
                ))
            }
            (Some(e), None) => Budget::Epochs(parse_f64("epochs", e)?),
            (None, Some(i)) => Budget::Iterations(parse_int("iterations", i)? as u64),
            (None, None) => return Err(Error::usage("missing key `epochs` (or `iterations`)")),
        };

        let initial_point = match get("x1") {
            None if matches!(problem, ProblemSpec::Logistic { .. }) => InitialPoint::Zeros,
            None | Some("ones") => InitialPoint::Ones,
            Some("zeros") => InitialPoint::Zeros,
            Some(list) => InitialPoint::Explicit(parse_list("x1", list)?),
        };

        let config = ExperimentConfig {
            method,
            problem,
            oracle,
            schedule,
            batch_size: get("batch").map_or(Ok(1), |b| parse_int("batch", b))?,
            budget,
            n_seeds: get("seeds").map_or(Ok(1), |s| parse_int("seeds", s))?,
            checkpoint_fractions: get("checkpoints")
                .map_or(Ok(vec![1.0]), |c| parse_list("checkpoints", c))?,
            base_seed: get("seed").map_or(Ok(0), |s| {
                s.parse()
                    .map_err(|_| Error::usage(format!("`seed` must be a u64, got `{s}`")))
            })?,
            initial_point,
            record_wall_time: match get("record_wall_time").unwrap_or("false") {
                "true" => true,
                "false" => false,
                other => {
                    return Err(Error::usage(format!(
                        "`record_wall_time` must be true or false, got `{other}`"
                    )))
                }
            },
        };
        config.validate()?;
        Ok(config)
    }

    /// The canonical `key = value` form; [`ExperimentConfig::from_pairs`]
    /// reads it back. Custom stepsize sequences are written as `custom` and
    /// cannot be read back.
    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match self.method {
            Method::Sg => put("method", "sg".into()),
            Method::Trish(p) => {
                put("method", "trish".into());
                put("gamma1", fmt_f64(p.gamma1()));
                put("gamma2", fmt_f64(p.gamma2()));
            }
        }
        put(
            "stepsize",
            match &self.schedule {
                StepsizeSchedule::Fixed(a) => format!("fixed:{}", fmt_f64(*a)),
                StepsizeSchedule::Harmonic { a, b } => {
                    format!("harmonic:{},{}", fmt_f64(*a), fmt_f64(*b))
                }
                StepsizeSchedule::Custom(_) => "custom".into(),
            },
        );
        put("problem", self.problem.name().into());
        match &self.problem {
            ProblemSpec::Quadratic { diag, shift } => {
                put("diag", fmt_list(diag));
                put("shift", fmt_list(shift));
            }
            ProblemSpec::NonconvexPl { dim } => put("dim", dim.to_string()),
            ProblemSpec::Logistic { train, test } => {
                put("dataset", train.display().to_string());
                if let Some(t) = test {
                    put("test_dataset", t.display().to_string());
                }
            }
        }
        match self.oracle {
            OracleSpec::Exact => put("oracle", "exact".into()),
            OracleSpec::MiniBatch(s) => {
                put("oracle", "minibatch".into());
                put(
                    "sampling",
                    match s {
                        BatchSampling::WithReplacement => "with_replacement",
                        BatchSampling::WithoutReplacement => "without_replacement",
                        BatchSampling::FullPass => "full_pass",
                    }
                    .into(),
                );
            }
            OracleSpec::Gaussian(s) => {
                put("oracle", "gaussian".into());
                put(
                    "sigma",
                    match s {
                        SigmaSchedule::Constant(v) => format!("constant:{}", fmt_f64(v)),
                        SigmaSchedule::StepsizeCoupled(m) => format!("coupled:{}", fmt_f64(m)),
                        SigmaSchedule::GeometricDecay { m3, zeta } => {
                            format!("geometric:{},{}", fmt_f64(m3), fmt_f64(zeta))
                        }
                    },
                );
            }
        }
        put("batch", self.batch_size.to_string());
        match self.budget {
            Budget::Epochs(e) => put("epochs", fmt_f64(e)),
            Budget::Iterations(i) => put("iterations", i.to_string()),
        }
        put("seeds", self.n_seeds.to_string());
        put("checkpoints", fmt_list(&self.checkpoint_fractions));
        put("seed", self.base_seed.to_string());
        put(
            "x1",
            match &self.initial_point {
                InitialPoint::Zeros => "zeros".into(),
                InitialPoint::Ones => "ones".into(),
                InitialPoint::Explicit(x) => fmt_list(x),
            },
        );
        put("record_wall_time", self.record_wall_time.to_string());
        m
    }

    /// SHA-256 of the canonical form without the base seed, so runs that
    /// differ only in seeding share a hash.
    pub fn config_hash(&self) -> String {
        let mut pairs = self.to_pairs();
        pairs.remove("seed");
        sha256_hex(&render_pairs(&pairs))
    }
}

pub(crate) fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes())
        .iter()
        .fold(String::with_capacity(64), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
/// Later keys override earlier ones.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: i + 1,
                column: 1,
                message: format!("expected `key = value`, got `{line}`"),
            });
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() || v.is_empty() {
            return Err(Error::Parse {
                line: i + 1,
                column: 1,
                message: "empty key or value".into(),
            });
        }
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

pub fn read_config_file(path: impl AsRef<Path>) -> Result<BTreeMap<String, String>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_text(&text)
}

pub fn render_pairs(pairs: &BTreeMap<String, String>) -> String {
    pairs.iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
}

fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn fmt_list(v: &[f64]) -> String {
    v.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(",")
}

fn parse_f64(key: &str, v: &str) -> Result<f64> {
    v.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::usage(format!("`{key}` must be a finite number, got `{v}`")))
}

fn parse_int(key: &str, v: &str) -> Result<usize> {
    v.trim()
        .parse()
        .map_err(|_| Error::usage(format!("`{key}` must be a nonnegative integer, got `{v}`")))
}

fn parse_list(key: &str, v: &str) -> Result<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s)).collect()
}

fn parse_schedule(s: &str) -> Result<StepsizeSchedule> {
    match s.split_once(':') {
        Some(("fixed", a)) => StepsizeSchedule::fixed(parse_f64("stepsize", a)?),
        Some(("harmonic", ab)) => match parse_list("stepsize", ab)?.as_slice() {
            [a, b] => StepsizeSchedule::harmonic(*a, *b),
            _ => Err(Error::usage("harmonic stepsize needs `harmonic:a,b`")),
        },
        _ => Err(Error::usage(format!(
            "stepsize must be `fixed:alpha` or `harmonic:a,b`, got `{s}`"
        ))),
    }
}

fn parse_sigma(s: &str) -> Result<SigmaSchedule> {
    let schedule = match s.split_once(':') {
        Some(("constant", v)) => SigmaSchedule::Constant(parse_f64("sigma", v)?),
        Some(("coupled", v)) => SigmaSchedule::StepsizeCoupled(parse_f64("sigma", v)?),
        Some(("geometric", v)) => match parse_list("sigma", v)?.as_slice() {
            [m3, zeta] => SigmaSchedule::GeometricDecay {
                m3: *m3,
                zeta: *zeta,
            },
            _ => return Err(Error::usage("geometric noise needs `geometric:M3,zeta`")),
        },
        _ => {
            return Err(Error::usage(format!(
                "sigma must be `constant:s`, `coupled:m` or `geometric:M3,zeta`, got `{s}`"
            )))
        }
    };
    schedule.validate()?;
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(text: &str) -> BTreeMap<String, String> {
        parse_config_text(text).unwrap()
    }

    const LOGISTIC: &str = "method = trish\ngamma1 = 15\ngamma2 = 6 # tuned\nalpha = 1\n\
        problem = logistic\ndataset = a.svm\nbatch = 10\nepochs = 1\nseeds = 5\n\
        checkpoints = 0.5, 1\n";

    #[test]
    fn parses_and_defaults() {
        let c = ExperimentConfig::from_pairs(&pairs(LOGISTIC)).unwrap();
        assert!(matches!(c.method, Method::Trish(_)));
        assert_eq!(
            c.oracle,
            OracleSpec::MiniBatch(BatchSampling::WithReplacement)
        );
        assert_eq!(c.initial_point, InitialPoint::Zeros);
        assert_eq!(c.checkpoint_fractions, vec![0.5, 1.0]);
        assert_eq!(c.budget, Budget::Epochs(1.0));
        assert!(!c.record_wall_time);
    }

    #[test]
    fn round_trips_through_pairs() {
        let c = ExperimentConfig::from_pairs(&pairs(LOGISTIC)).unwrap();
        let again = ExperimentConfig::from_pairs(&c.to_pairs()).unwrap();
        assert_eq!(c.to_pairs(), again.to_pairs());
    }

    #[test]
    fn hash_ignores_seed_only() {
        let mut p = pairs(LOGISTIC);
        let h0 = ExperimentConfig::from_pairs(&p).unwrap().config_hash();
        p.insert("seed".into(), "99".into());
        assert_eq!(h0, ExperimentConfig::from_pairs(&p).unwrap().config_hash());
        p.insert("batch".into(), "20".into());
        assert_ne!(h0, ExperimentConfig::from_pairs(&p).unwrap().config_hash());
        assert_eq!(h0.len(), 64);
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = |edit: &[(&str, &str)]| {
            let mut p = pairs(LOGISTIC);
            for (k, v) in edit {
                p.insert(k.to_string(), v.to_string());
            }
            ExperimentConfig::from_pairs(&p).unwrap_err()
        };
        assert!(matches!(
            bad(&[("checkpoints", "0.5,0.5")]),
            Error::Usage(_)
        ));
        assert!(matches!(bad(&[("checkpoints", "0,1")]), Error::Usage(_)));
        assert!(matches!(bad(&[("seeds", "0")]), Error::Usage(_)));
        assert!(matches!(bad(&[("gamma2", "20")]), Error::Usage(_)));
        assert!(matches!(bad(&[("colour", "red")]), Error::Usage(_)));
        assert!(matches!(bad(&[("stepsize", "fixed:1")]), Error::Usage(_)));
        assert!(matches!(
            bad(&[("problem", "nonconvex"), ("oracle", "minibatch")]),
            Error::Usage(_)
        ));
        assert!(matches!(
            parse_config_text("a = 1\njunk\n"),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn gaussian_and_harmonic() {
        let c = ExperimentConfig::from_pairs(&pairs(
            "method = sg\nstepsize = harmonic:2,3\nproblem = quadratic\ndiag = 1,2\n\
             oracle = gaussian\nsigma = geometric:1,0.25\niterations = 10\n",
        ))
        .unwrap();
        assert_eq!(
            c.oracle,
            OracleSpec::Gaussian(SigmaSchedule::GeometricDecay {
                m3: 1.0,
                zeta: 0.25
            })
        );
        assert_eq!(c.initial_point, InitialPoint::Ones);
        assert!(matches!(c.schedule, StepsizeSchedule::Harmonic { a, b } if a == 2.0 && b == 3.0));
        assert_eq!(
            c.problem,
            ProblemSpec::Quadratic {
                diag: vec![1.0, 2.0],
                shift: vec![0.0, 0.0]
            }
        );
    }
}
