use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::degree_dist::{self, DegreeDistribution};
use crate::error::{Error, Result};
use crate::rng;
use crate::sim::Ttl;

/// Degree law an experiment draws its overlays from.
#[derive(Debug, Clone, PartialEq)]
pub enum TopologySpec {
    Poisson {
        mean: f64,
    },
    /// `k_max` defaults to `⌈√n⌉`.
    PowerLaw {
        exponent: f64,
        k_min: usize,
        k_max: Option<usize>,
    },
    /// Fixed-size power-law construction; the network size follows from `a`, `b`.
    Aiello {
        a: f64,
        b: f64,
    },
    Empirical {
        pmf: BTreeMap<usize, f64>,
    },
}

impl TopologySpec {
    /// The degree law for a network of `n` nodes (`n` is ignored where the
    /// topology fixes its own size or support).
    pub fn distribution(&self, n: Option<usize>) -> Result<DegreeDistribution> {
        match self {
            TopologySpec::Poisson { mean } => DegreeDistribution::poisson(*mean),
            TopologySpec::PowerLaw {
                exponent,
                k_min,
                k_max,
            } => DegreeDistribution::power_law(
                *exponent,
                *k_min,
                k_max.unwrap_or_else(|| degree_dist::power_law_cutoff(n)),
            ),
            TopologySpec::Aiello { a, b } => DegreeDistribution::aiello(*a, *b),
            TopologySpec::Empirical { pmf } => {
                DegreeDistribution::empirical(pmf.iter().map(|(&d, &p)| (d, p)))
            }
        }
    }

    pub fn network_size(&self, n: usize) -> Result<usize> {
        match self {
            TopologySpec::Aiello { a, b } => Ok(degree_dist::aiello_degree_sequence(*a, *b)?.len()),
            _ => Ok(n),
        }
    }

    /// Target degrees: the deterministic construction for Aiello overlays,
    /// `n` i.i.d. draws otherwise. An odd Aiello stub total gets the same
    /// parity fixup as sampled sequences.
    pub fn degree_sequence<R: RngCore + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<usize>> {
        match self {
            TopologySpec::Aiello { a, b } => {
                let mut degrees = degree_dist::aiello_degree_sequence(*a, *b)?;
                if degrees.iter().sum::<usize>() % 2 == 1 {
                    let i = rng::below(rng, degrees.len());
                    degrees[i] += 1;
                }
                Ok(degrees)
            }
            _ => self.distribution(Some(n))?.sample_degree_sequence(n, rng),
        }
    }
}

impl fmt::Display for TopologySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TopologySpec::Poisson { mean } => write!(f, "poisson:{mean}"),
            TopologySpec::PowerLaw {
                exponent,
                k_min,
                k_max,
            } => {
                write!(f, "powerlaw:{exponent}:{k_min}")?;
                if let Some(k) = k_max {
                    write!(f, ":{k}")?;
                }
                Ok(())
            }
            TopologySpec::Aiello { a, b } => write!(f, "aiello:{a}:{b}"),
            TopologySpec::Empirical { pmf } => {
                f.write_str("empirical:")?;
                for (i, (d, p)) in pmf.iter().enumerate() {
                    if i > 0 {
                        f.write_str("/")?;
                    }
                    write!(f, "{d}={p}")?;
                }
                Ok(())
            }
        }
    }
}

/// Compact form: `poisson:5`, `powerlaw:-3.3[:k_min[:k_max]]`, `aiello:6:1`,
/// `empirical:1=0.5/3=0.5`.
impl FromStr for TopologySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::Config(format!("topology {s:?}: {why}"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| bad("expected a number"));
        let int = |v: &str| v.trim().parse::<usize>().map_err(|_| bad("expected an integer"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("missing ':'"))?;
        let parts: Vec<&str> = rest.split(':').collect();
        match kind.trim().to_ascii_lowercase().as_str() {
            "poisson" => match parts.as_slice() {
                [mean] => Ok(TopologySpec::Poisson { mean: num(mean)? }),
                _ => Err(bad("expected poisson:<mean>")),
            },
            "powerlaw" | "power_law" => match parts.as_slice() {
                [e] => Ok(TopologySpec::PowerLaw {
                    exponent: num(e)?,
                    k_min: 1,
                    k_max: None,
                }),
                [e, lo] => Ok(TopologySpec::PowerLaw {
                    exponent: num(e)?,
                    k_min: int(lo)?,
                    k_max: None,
                }),
                [e, lo, hi] => Ok(TopologySpec::PowerLaw {
                    exponent: num(e)?,
                    k_min: int(lo)?,
                    k_max: Some(int(hi)?),
                }),
                _ => Err(bad("expected powerlaw:<exponent>[:<k_min>[:<k_max>]]")),
            },
            "aiello" => match parts.as_slice() {
                [a, b] => Ok(TopologySpec::Aiello {
                    a: num(a)?,
                    b: num(b)?,
                }),
                _ => Err(bad("expected aiello:<a>:<b>")),
            },
            "empirical" => {
                let mut pmf = BTreeMap::new();
                for entry in rest.split(['/', ',']).filter(|e| !e.trim().is_empty()) {
                    let (d, p) = entry
                        .split_once('=')
                        .ok_or_else(|| bad("expected <degree>=<probability>"))?;
                    *pmf.entry(int(d)?).or_insert(0.0) += num(p)?;
                }
                Ok(TopologySpec::Empirical { pmf })
            }
            other => Err(bad(&format!("unknown kind {other:?}"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum TopologyJson {
    Poisson {
        mean: f64,
    },
    PowerLaw {
        exponent: f64,
        #[serde(default = "one")]
        k_min: usize,
        #[serde(default)]
        k_max: Option<usize>,
    },
    Aiello {
        a: f64,
        b: f64,
    },
    Empirical {
        pmf: BTreeMap<usize, f64>,
    },
}

fn one() -> usize {
    1
}

impl Serialize for TopologySpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let json = match self.clone() {
            TopologySpec::Poisson { mean } => TopologyJson::Poisson { mean },
            TopologySpec::PowerLaw {
                exponent,
                k_min,
                k_max,
            } => TopologyJson::PowerLaw {
                exponent,
                k_min,
                k_max,
            },
            TopologySpec::Aiello { a, b } => TopologyJson::Aiello { a, b },
            TopologySpec::Empirical { pmf } => TopologyJson::Empirical { pmf },
        };
        json.serialize(serializer)
    }
}

/// Accepts either the tagged object or the compact string form.
impl<'de> Deserialize<'de> for TopologySpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Compact(String),
            Tagged(TopologyJson),
        }
        Ok(match Either::deserialize(deserializer)? {
            Either::Compact(s) => s.parse().map_err(serde::de::Error::custom)?,
            Either::Tagged(TopologyJson::Poisson { mean }) => TopologySpec::Poisson { mean },
            Either::Tagged(TopologyJson::PowerLaw {
                exponent,
                k_min,
                k_max,
            }) => TopologySpec::PowerLaw {
                exponent,
                k_min,
                k_max,
            },
            Either::Tagged(TopologyJson::Aiello { a, b }) => TopologySpec::Aiello { a, b },
            Either::Tagged(TopologyJson::Empirical { pmf }) => TopologySpec::Empirical { pmf },
        })
    }
}

pub const DEFAULT_REPLICATES: usize = 20;
pub const DEFAULT_EVENTS_PER_NETWORK: usize = 400;
pub const DEFAULT_NODES: usize = 10_000;

fn default_n() -> usize {
    DEFAULT_NODES
}
fn default_replicates() -> usize {
    DEFAULT_REPLICATES
}
fn default_events() -> usize {
    DEFAULT_EVENTS_PER_NETWORK
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    /// Node count; ignored by topologies that fix their own size.
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default = "default_events")]
    pub events_per_network: usize,
    pub sigma_grid: Vec<f64>,
    pub gamma_grid: Vec<f64>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub ttl: Ttl,
}

impl ExperimentConfig {
    pub fn new(topology: TopologySpec, sigma_grid: Vec<f64>, gamma_grid: Vec<f64>) -> Self {
        Self {
            topology,
            n: DEFAULT_NODES,
            replicates: DEFAULT_REPLICATES,
            events_per_network: DEFAULT_EVENTS_PER_NETWORK,
            sigma_grid,
            gamma_grid,
            master_seed: 0,
            ttl: Ttl::Infinite,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates == 0 {
            return Err(Error::Config("replicates must be >= 1".into()));
        }
        if self.events_per_network == 0 {
            return Err(Error::Config("events_per_network must be >= 1".into()));
        }
        for (name, grid) in [("sigma_grid", &self.sigma_grid), ("gamma_grid", &self.gamma_grid)] {
            if grid.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
            if let Some(v) = grid.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::Config(format!("{name} value {v} is outside [0, 1]")));
            }
        }
        if !matches!(self.topology, TopologySpec::Aiello { .. }) && self.n < 2 {
            return Err(Error::Config("n must be >= 2".into()));
        }
        if self.ttl == Ttl::Hops(0) {
            return Err(Error::Config("ttl must be at least 1".into()));
        }
        self.topology.distribution(Some(self.n))?;
        Ok(())
    }

    /// Actual node count of every generated overlay.
    pub fn nodes(&self) -> Result<usize> {
        self.topology.network_size(self.n)
    }
}
