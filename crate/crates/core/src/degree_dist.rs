//! Degree distributions `p_i`, their moments and the excess-degree law `q_i`.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{BufRead, Write};

use rand::RngCore;

use crate::error::{Error, Result};
use crate::rng;

/// Tail mass left out when an unbounded distribution is truncated.
pub const TRUNCATION_TAIL: f64 = 1e-12;

/// Cutoff for power laws when no network size is known.
pub const DEFAULT_POWER_LAW_CUTOFF: usize = 1000;

/// Where a distribution came from. The probabilities themselves always live in
/// [`DegreeDistribution`] as a dense truncated table.
#[derive(Debug, Clone, PartialEq)]
pub enum DistributionKind {
    Poisson { mean: f64 },
    /// `p_i ∝ i^exponent` on `k_min..=k_max`, with a negative exponent.
    PowerLaw { exponent: f64, k_min: usize, k_max: usize },
    /// Degree histogram of the fixed-size power-law construction with `⌊e^a / x^b⌋`
    /// nodes of degree `x`.
    Aiello { a: f64, b: f64 },
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    /// `<p> = Σ i p_i`
    pub mean_degree: f64,
    /// `<p²> = Σ i² p_i`
    pub second_moment: f64,
    /// `<q> = (<p²> - <p>) / <p>`
    pub mean_excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegreeDistribution {
    kind: DistributionKind,
    pmf: Vec<f64>,
    moments: Moments,
}

impl DegreeDistribution {
    /// Poisson degrees truncated at the smallest `k` whose upper tail is below
    /// [`TRUNCATION_TAIL`], then renormalized.
    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "Poisson mean must be positive, got {mean}"
            )));
        }
        let k_max = poisson_cutoff(mean);
        Self::poisson_truncated(mean, k_max)
    }

    pub fn poisson_truncated(mean: f64, k_max: usize) -> Result<Self> {
        if !(mean.is_finite() && mean > 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "Poisson mean must be positive, got {mean}"
            )));
        }
        let pmf: Vec<f64> = (0..=k_max).map(|k| poisson_term(mean, k)).collect();
        Self::from_weights(DistributionKind::Poisson { mean }, pmf)
    }

    pub fn power_law(exponent: f64, k_min: usize, k_max: usize) -> Result<Self> {
        if !(exponent.is_finite() && exponent < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "power-law exponent must be negative, got {exponent}"
            )));
        }
        if k_min == 0 || k_max < k_min {
            return Err(Error::InvalidDistribution(format!(
                "power-law support {k_min}..={k_max} is empty or contains 0"
            )));
        }
        let mut weights = vec![0.0; k_max + 1];
        for (k, w) in weights.iter_mut().enumerate().skip(k_min) {
            *w = (k as f64).powf(exponent);
        }
        Self::from_weights(
            DistributionKind::PowerLaw {
                exponent,
                k_min,
                k_max,
            },
            weights,
        )
    }

    /// Power law with `k_min = 1` and the structural cutoff `⌈√n⌉` when the
    /// network size is known, else [`DEFAULT_POWER_LAW_CUTOFF`].
    pub fn power_law_with_cutoff(exponent: f64, n: Option<usize>) -> Result<Self> {
        Self::power_law(exponent, 1, power_law_cutoff(n))
    }

    pub fn aiello(a: f64, b: f64) -> Result<Self> {
        let counts = aiello_counts(a, b)?;
        let max = counts.last().map_or(0, |&(d, _)| d);
        let mut weights = vec![0.0; max + 1];
        for (d, c) in counts {
            weights[d] = c as f64;
        }
        Self::from_weights(DistributionKind::Aiello { a, b }, weights)
    }

    /// Explicit `degree -> probability` table. Probabilities must sum to 1
    /// within 1e-6; the table is renormalized exactly.
    pub fn empirical<I>(pmf: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64)>,
    {
        let table: BTreeMap<usize, f64> = pmf.into_iter().fold(BTreeMap::new(), |mut m, (d, p)| {
            *m.entry(d).or_insert(0.0) += p;
            m
        });
        let Some(&max) = table.keys().next_back() else {
            return Err(Error::InvalidDistribution("empty probability table".into()));
        };
        let total: f64 = table.values().sum();
        if (total - 1.0).abs() > 1e-6 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        let mut weights = vec![0.0; max + 1];
        for (d, p) in table {
            weights[d] = p;
        }
        Self::from_weights(DistributionKind::Empirical, weights)
    }

    /// Histogram of an observed degree sequence.
    pub fn from_degree_sequence(degrees: &[usize]) -> Result<Self> {
        let max = degrees
            .iter()
            .copied()
            .max()
            .ok_or_else(|| Error::InvalidDistribution("empty degree sequence".into()))?;
        let mut weights = vec![0.0; max + 1];
        for &d in degrees {
            weights[d] += 1.0;
        }
        Self::from_weights(DistributionKind::Empirical, weights)
    }

    fn from_weights(kind: DistributionKind, mut pmf: Vec<f64>) -> Result<Self> {
        if pmf.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution(
                "probabilities must be finite and nonnegative".into(),
            ));
        }
        let total: f64 = pmf.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidDistribution("all probabilities are zero".into()));
        }
        for p in &mut pmf {
            *p /= total;
        }
        while pmf.len() > 1 && pmf.last() == Some(&0.0) {
            pmf.pop();
        }
        let mean_degree: f64 = pmf.iter().enumerate().map(|(i, p)| i as f64 * p).sum();
        if mean_degree <= 0.0 {
            return Err(Error::ZeroMeanDegree);
        }
        let second_moment: f64 = pmf
            .iter()
            .enumerate()
            .map(|(i, p)| (i * i) as f64 * p)
            .sum();
        let moments = Moments {
            mean_degree,
            second_moment,
            mean_excess: (second_moment - mean_degree) / mean_degree,
        };
        Ok(Self { kind, pmf, moments })
    }

    pub fn kind(&self) -> &DistributionKind {
        &self.kind
    }

    /// Largest degree with nonzero probability.
    pub fn k_max(&self) -> usize {
        self.pmf.len() - 1
    }

    /// `p_i`; zero beyond the truncation bound.
    pub fn pmf(&self, i: usize) -> f64 {
        self.pmf.get(i).copied().unwrap_or(0.0)
    }

    /// Dense table `p_0..=p_kmax`.
    pub fn probabilities(&self) -> &[f64] {
        &self.pmf
    }

    /// Excess degree `q_i = (i+1) p_{i+1} / <p>`: the number of further links
    /// of a node reached by following a random link.
    pub fn excess_pmf(&self, i: usize) -> f64 {
        (i + 1) as f64 * self.pmf(i + 1) / self.moments.mean_degree
    }

    /// Dense table `q_0..=q_{kmax-1}`.
    pub fn excess_probabilities(&self) -> Vec<f64> {
        (0..self.k_max().max(1)).map(|i| self.excess_pmf(i)).collect()
    }

    pub fn moments(&self) -> Moments {
        self.moments
    }

    /// `n` i.i.d. degrees. An odd total is made even by adding one to the
    /// degree of a uniformly chosen node.
    pub fn sample_degree_sequence<R: RngCore + ?Sized>(
        &self,
        n: usize,
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        if n < 2 {
            return Err(Error::Config(format!("degree sequence needs n >= 2, got {n}")));
        }
        let mut cdf = Vec::with_capacity(self.pmf.len());
        let mut acc = 0.0;
        for &p in &self.pmf {
            acc += p;
            cdf.push(acc);
        }
        let last = cdf.len() - 1;
        let mut degrees: Vec<usize> = (0..n)
            .map(|_| {
                let u = rng::uniform(rng);
                cdf.partition_point(|&c| c <= u).min(last)
            })
            .collect();
        if degrees.iter().sum::<usize>() % 2 == 1 {
            let i = rng::below(rng, n);
            degrees[i] += 1;
        }
        Ok(degrees)
    }
}

impl fmt::Display for DistributionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistributionKind::Poisson { mean } => write!(f, "poisson:{mean}"),
            DistributionKind::PowerLaw {
                exponent,
                k_min,
                k_max,
            } => write!(f, "powerlaw:{exponent}:{k_min}:{k_max}"),
            DistributionKind::Aiello { a, b } => write!(f, "aiello:{a}:{b}"),
            DistributionKind::Empirical => f.write_str("empirical"),
        }
    }
}

/// `⌈√n⌉` for a known network size, else [`DEFAULT_POWER_LAW_CUTOFF`].
pub fn power_law_cutoff(n: Option<usize>) -> usize {
    match n {
        Some(n) => ((n as f64).sqrt().ceil() as usize).max(1),
        None => DEFAULT_POWER_LAW_CUTOFF,
    }
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

fn poisson_term(mean: f64, k: usize) -> f64 {
    (k as f64 * mean.ln() - mean - ln_factorial(k)).exp()
}

/// Smallest `k` with `P[X > k] < TRUNCATION_TAIL`.
fn poisson_cutoff(mean: f64) -> usize {
    let horizon = (mean + 40.0 * mean.sqrt() + 60.0).ceil() as usize;
    let mut terms = Vec::with_capacity(horizon + 1);
    let mut ln_fact = 0.0;
    for k in 0..=horizon {
        if k > 1 {
            ln_fact += (k as f64).ln();
        }
        terms.push((k as f64 * mean.ln() - mean - ln_fact).exp());
    }
    // Tail sums from the far end avoid cancellation in 1 - cdf.
    let mut tail = 0.0;
    let mut cutoff = horizon;
    for k in (0..horizon).rev() {
        tail += terms[k + 1];
        if tail < TRUNCATION_TAIL {
            cutoff = k;
        } else {
            break;
        }
    }
    cutoff.max(1)
}

/// `(degree, node count)` pairs of the fixed-size power-law construction:
/// `⌊e^a / x^b⌋` nodes of each degree `x` in `1..=⌊e^(a/b)⌋`. Both floors are
/// taken on double-precision values.
pub fn aiello_counts(a: f64, b: f64) -> Result<Vec<(usize, usize)>> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::InvalidDistribution(format!("Aiello a must be >= 0, got {a}")));
    }
    if !(b.is_finite() && b > 0.0) {
        return Err(Error::InvalidDistribution(format!("Aiello b must be > 0, got {b}")));
    }
    let max_degree = (a / b).exp().floor() as usize;
    let scale = a.exp();
    Ok((1..=max_degree)
        .map(|x| (x, (scale / (x as f64).powf(b)).floor() as usize))
        .filter(|&(_, c)| c > 0)
        .collect())
}

/// One target degree per node for the fixed-size power-law construction,
/// grouped by ascending degree. Deterministic.
pub fn aiello_degree_sequence(a: f64, b: f64) -> Result<Vec<usize>> {
    Ok(aiello_counts(a, b)?
        .into_iter()
        .flat_map(|(d, c)| std::iter::repeat_n(d, c))
        .collect())
}

/// One degree per line; lines starting with `#` and blank lines are skipped.
pub fn read_degree_sequence<R: BufRead>(source: R) -> Result<Vec<usize>> {
    let mut degrees = Vec::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let d = trimmed
            .parse::<usize>()
            .map_err(|e| Error::parse(idx + 1, format!("bad degree {trimmed:?}: {e}")))?;
        degrees.push(d);
    }
    Ok(degrees)
}

pub fn write_degree_sequence<W: Write>(mut sink: W, degrees: &[usize]) -> Result<()> {
    writeln!(sink, "# degrees {}", degrees.len())?;
    for d in degrees {
        writeln!(sink, "{d}")?;
    }
    Ok(())
}
