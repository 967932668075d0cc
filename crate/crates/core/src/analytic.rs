//! Generating-function coverage model.
//!
//! A node that relays an event sends it to each neighbour with the effective
//! probability `Γ = σ + (1-σ)γ`: always to subscribers, with probability `γ`
//! to everyone else. Thinning the degree law `p` (or the excess law `q`) by
//! `Γ` gives the forwarding laws `f` and `f→`; their means feed the closed
//! form for the mean number of receivers
//!
//! ```text
//! <r> = 1 + Γ<p>² / ((1+Γ)<p> - Γ<p²>)
//! ```
//!
//! which diverges once the branching factor `Γ<q>` reaches 1.

use crate::degree_dist::DegreeDistribution;
use crate::error::{check_probability, Error, Result};

/// Denominators of the closed form below this fraction of `<p>` are reported
/// as divergent.
pub const SINGULARITY_GUARD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageParams {
    sigma: f64,
    gamma: f64,
}

impl CoverageParams {
    pub fn new(sigma: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            sigma: check_probability("sigma", sigma)?,
            gamma: check_probability("gamma", gamma)?,
        })
    }

    /// Subscription probability.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Gossip probability towards non-subscribers.
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `Γ = σ + (1-σ)γ`, the probability that a given neighbour is sent the event.
    pub fn gamma_eff(&self) -> f64 {
        self.sigma + (1.0 - self.sigma) * self.gamma
    }
}

/// A mean count that may be infinite in the large-network limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanCount {
    Finite(f64),
    Divergent,
}

impl MeanCount {
    pub fn finite(self) -> Option<f64> {
        match self {
            MeanCount::Finite(v) => Some(v),
            MeanCount::Divergent => None,
        }
    }

    pub fn is_divergent(self) -> bool {
        matches!(self, MeanCount::Divergent)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoveragePrediction {
    pub params: CoverageParams,
    /// `<r>`, publisher included.
    pub mean_receivers: MeanCount,
    /// `<s> = σ <r>`
    pub mean_subscribers: MeanCount,
    /// `Γ<q>`, mean onward forwards from a node reached over a link.
    pub branching_factor: f64,
    /// `Γ*` where the closed form diverges; `None` when `<p²> <= <p>`.
    pub threshold_gamma_eff: Option<f64>,
}

/// Binomial thinning: `out_i = Σ_{j>=i} w_j C(j,i) g^i (1-g)^(j-i)`.
fn thin(weights: &[f64], g: f64) -> Vec<f64> {
    if weights.is_empty() {
        return vec![1.0];
    }
    if g == 0.0 {
        let mut out = vec![0.0; weights.len()];
        out[0] = weights.iter().sum();
        return out;
    }
    if g == 1.0 {
        return weights.to_vec();
    }
    let ln_g = g.ln();
    let ln_h = (-g).ln_1p();
    let mut ln_fact = vec![0.0; weights.len()];
    for k in 2..weights.len() {
        ln_fact[k] = ln_fact[k - 1] + (k as f64).ln();
    }
    let mut out = vec![0.0; weights.len()];
    for (j, &w) in weights.iter().enumerate() {
        if w == 0.0 {
            continue;
        }
        for (i, slot) in out.iter_mut().enumerate().take(j + 1) {
            let ln_term = ln_fact[j] - ln_fact[i] - ln_fact[j - i]
                + i as f64 * ln_g
                + (j - i) as f64 * ln_h;
            *slot += w * ln_term.exp();
        }
    }
    out
}

/// `f_0..=f_kmax`: how many neighbours a relaying node forwards to.
pub fn forward_distribution(dist: &DegreeDistribution, params: CoverageParams) -> Vec<f64> {
    thin(dist.probabilities(), params.gamma_eff())
}

/// `f→_0..`: onward forwards from a node reached by following a link.
pub fn link_forward_distribution(dist: &DegreeDistribution, params: CoverageParams) -> Vec<f64> {
    thin(&dist.excess_probabilities(), params.gamma_eff())
}

pub fn forward_pmf(dist: &DegreeDistribution, params: CoverageParams, i: usize) -> f64 {
    forward_distribution(dist, params).get(i).copied().unwrap_or(0.0)
}

pub fn link_forward_pmf(dist: &DegreeDistribution, params: CoverageParams, i: usize) -> f64 {
    link_forward_distribution(dist, params)
        .get(i)
        .copied()
        .unwrap_or(0.0)
}

pub fn predict(dist: &DegreeDistribution, params: CoverageParams) -> CoveragePrediction {
    let m = dist.moments();
    let g = params.gamma_eff();
    let denominator = (1.0 + g) * m.mean_degree - g * m.second_moment;
    let mean_receivers = if denominator < SINGULARITY_GUARD * m.mean_degree {
        MeanCount::Divergent
    } else {
        MeanCount::Finite(1.0 + g * m.mean_degree * m.mean_degree / denominator)
    };
    let mean_subscribers = match mean_receivers {
        MeanCount::Finite(r) => MeanCount::Finite(params.sigma() * r),
        MeanCount::Divergent => MeanCount::Divergent,
    };
    CoveragePrediction {
        params,
        mean_receivers,
        mean_subscribers,
        branching_factor: g * m.mean_excess,
        threshold_gamma_eff: threshold(dist).ok(),
    }
}

/// `Γ* = <p> / (<p²> - <p>)`, the effective forwarding probability at which
/// dissemination percolates.
pub fn threshold(dist: &DegreeDistribution) -> Result<f64> {
    let m = dist.moments();
    let excess = m.second_moment - m.mean_degree;
    if excess <= 0.0 {
        return Err(Error::NoGiantComponentPossible);
    }
    Ok(m.mean_degree / excess)
}

/// Critical value of one probability with the other held fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalValue {
    /// Unclamped solution; may fall outside `[0, 1]` or be infinite.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`.
    pub value: f64,
}

impl CriticalValue {
    fn from_raw(raw: f64) -> Self {
        Self {
            raw,
            value: raw.clamp(0.0, 1.0),
        }
    }

    pub fn in_range(&self) -> bool {
        (0.0..=1.0).contains(&self.raw)
    }
}

/// Critical subscription probability for a fixed gossip probability:
/// `σ* = (Γ* - γ) / (1 - γ)`.
pub fn solve_sigma(dist: &DegreeDistribution, gamma: f64) -> Result<CriticalValue> {
    let gamma = check_probability("gamma", gamma)?;
    Ok(solve_complement(threshold(dist)?, gamma))
}

/// Critical gossip probability for a fixed subscription probability. `Γ` is
/// symmetric in `σ` and `γ`, so this is the same formula with roles swapped.
pub fn solve_gamma(dist: &DegreeDistribution, sigma: f64) -> Result<CriticalValue> {
    let sigma = check_probability("sigma", sigma)?;
    Ok(solve_complement(threshold(dist)?, sigma))
}

fn solve_complement(critical: f64, fixed: f64) -> CriticalValue {
    if fixed >= 1.0 {
        // Γ = 1 whatever the other probability is.
        let raw = if critical <= 1.0 {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        };
        return CriticalValue::from_raw(raw);
    }
    CriticalValue::from_raw((critical - fixed) / (1.0 - fixed))
}

/// Truncated cluster-size laws: `node_rooted[i]` is the probability that an
/// event published at a random node reaches exactly `i` nodes, `link_rooted[i]`
/// the same when entering over a random link. Index 0 is always zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSizePmf {
    pub node_rooted: Vec<f64>,
    pub link_rooted: Vec<f64>,
    pub truncation: usize,
    /// `1 - Σ node_rooted`, mass on sizes above the truncation (or infinite).
    pub residual_mass: f64,
    pub link_residual_mass: f64,
}

impl ClusterSizePmf {
    /// `Σ_{i<=T} i r_i`
    pub fn truncated_mean(&self) -> f64 {
        self.node_rooted
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p)
            .sum()
    }

    pub fn link_truncated_mean(&self) -> f64 {
        self.link_rooted
            .iter()
            .enumerate()
            .map(|(i, p)| i as f64 * p)
            .sum()
    }
}

/// Coefficients of `R→(x) = x F→(R→(x))` and `R(x) = x F(R→(x))` up to `x^T`.
///
/// Since `r→_0 = 0`, the coefficient of `x^i` in `R→^j` only involves
/// `r→_1..=r→_(i-j+1)`, so the series can be filled one degree at a time
/// while keeping every power `R→^j` truncated at `T`.
pub fn cluster_size_pmf(
    dist: &DegreeDistribution,
    params: CoverageParams,
    truncation: usize,
) -> Result<ClusterSizePmf> {
    if truncation == 0 {
        return Err(Error::Config("cluster-size truncation must be >= 1".into()));
    }
    let f = forward_distribution(dist, params);
    let f_link = link_forward_distribution(dist, params);
    let t = truncation;

    let mut link = vec![0.0; t + 1];
    let mut node = vec![0.0; t + 1];
    // powers[j][i] = [x^i] R→(x)^j, filled column by column.
    let mut powers = vec![vec![0.0; t]; t];
    powers[0][0] = 1.0;

    for i in 0..t {
        for j in 1..=i {
            let mut acc = 0.0;
            for k in 1..=(i + 1 - j) {
                acc += link[k] * powers[j - 1][i - k];
            }
            powers[j][i] = acc;
        }
        let mut next_link = 0.0;
        let mut next_node = 0.0;
        for j in 0..=i {
            let pw = powers[j][i];
            if pw == 0.0 {
                continue;
            }
            next_link += f_link.get(j).copied().unwrap_or(0.0) * pw;
            next_node += f.get(j).copied().unwrap_or(0.0) * pw;
        }
        link[i + 1] = next_link;
        node[i + 1] = next_node;
    }

    let residual = |v: &[f64]| (1.0 - v.iter().sum::<f64>()).max(0.0);
    Ok(ClusterSizePmf {
        residual_mass: residual(&node),
        link_residual_mass: residual(&link),
        node_rooted: node,
        link_rooted: link,
        truncation,
    })
}
