//! CSV output. Floats are printed with 6 significant digits in the style of
//! C's `%.6g`; divergent model values print as `inf`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::analytic::{CoveragePrediction, MeanCount};
use crate::error::{Error, Result};
use crate::harness::sweep::{AnalyticTransition, NetworkRow, PhaseScan, ScanAxis, SweepRow};

pub const SWEEP_HEADER: &str = "topology,n,replicates,events_per_network,ttl,sigma,gamma,gamma_eff,\
sim_mean_receivers,sim_mean_subscribers,sim_stddev_receivers,model_mean_receivers,model_divergent,\
giant_component_mean";

pub const NETWORK_HEADER: &str =
    "network_id,sigma,gamma,mean_receivers,mean_subscribers,giant_component_size,discarded_stubs";

pub const PREDICTION_HEADER: &str =
    "sigma,gamma,gamma_eff,mean_receivers,mean_subscribers,branching_factor";

pub const PHASE_HEADER: &str = "sigma,gamma,fraction_percolating,sim_mean_receivers,\
model_mean_receivers,empirical_transition,analytic_transition,analytic_in_range";

/// `%.6g`: six significant digits, trailing zeros removed, exponent form
/// outside `1e-4 <= |x| < 1e6`.
pub fn format_g6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..6).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (5 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn format_mean(m: MeanCount) -> String {
    match m {
        MeanCount::Finite(v) => format_g6(v),
        MeanCount::Divergent => "inf".into(),
    }
}

fn sweep_line(r: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.topology,
        r.n,
        r.replicates,
        r.events_per_network,
        r.ttl,
        format_g6(r.sigma),
        format_g6(r.gamma),
        format_g6(r.gamma_eff),
        format_g6(r.sim_mean_receivers),
        format_g6(r.sim_mean_subscribers),
        format_g6(r.sim_stddev_receivers),
        format_mean(r.model_mean_receivers),
        r.model_divergent,
        format_g6(r.giant_component_mean),
    )
}

/// Header plus one line per pooled grid point.
pub fn emit_report<W: Write>(rows: &[SweepRow], mut sink: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    writeln!(sink, "{SWEEP_HEADER}")?;
    for r in rows {
        writeln!(sink, "{}", sweep_line(r))?;
    }
    sink.flush()?;
    Ok(())
}

/// Like [`emit_report`]; no file is created for an empty row set.
pub fn emit_report_to_path(rows: &[SweepRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    emit_report(rows, BufWriter::new(File::create(path)?))
}

pub fn emit_network_rows<W: Write>(rows: &[NetworkRow], mut sink: W) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::EmptyReport);
    }
    writeln!(sink, "{NETWORK_HEADER}")?;
    for r in rows {
        writeln!(
            sink,
            "{},{},{},{},{},{},{}",
            r.network_id,
            format_g6(r.sigma),
            format_g6(r.gamma),
            format_g6(r.mean_receivers),
            format_g6(r.mean_subscribers),
            r.giant_component_size,
            r.discarded_stubs
        )?;
    }
    sink.flush()?;
    Ok(())
}

pub fn prediction_line(p: &CoveragePrediction) -> String {
    format!(
        "{},{},{},{},{},{}",
        format_g6(p.params.sigma()),
        format_g6(p.params.gamma()),
        format_g6(p.params.gamma_eff()),
        format_mean(p.mean_receivers),
        format_mean(p.mean_subscribers),
        format_g6(p.branching_factor)
    )
}

pub fn emit_phase_scan<W: Write>(scan: &PhaseScan, mut sink: W) -> Result<()> {
    writeln!(sink, "{PHASE_HEADER}")?;
    let transition = scan
        .empirical_transition
        .map_or_else(|| "none".to_string(), format_g6);
    let (analytic, in_range) = match scan.analytic {
        AnalyticTransition::Critical(c) => (format_g6(c.value), c.in_range().to_string()),
        AnalyticTransition::NoGiantComponentPossible => ("none".to_string(), "false".to_string()),
    };
    for p in &scan.points {
        writeln!(
            sink,
            "{},{},{},{},{},{transition},{analytic},{in_range}",
            format_g6(p.sigma),
            format_g6(p.gamma),
            format_g6(p.fraction_percolating),
            format_g6(p.sim_mean_receivers),
            format_mean(p.model_mean_receivers),
        )?;
    }
    sink.flush()?;
    Ok(())
}

/// Inverse of [`emit_report`], up to the printed precision.
pub fn parse_report(text: &str) -> Result<Vec<SweepRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == SWEEP_HEADER => {}
        _ => return Err(Error::parse(1, "missing sweep header")),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 14 {
            return Err(Error::parse(lineno, format!("expected 14 fields, got {}", f.len())));
        }
        let float = |i: usize| -> Result<f64> {
            f[i].parse::<f64>()
                .map_err(|e| Error::parse(lineno, format!("field {}: {e}", i + 1)))
        };
        let int = |i: usize| -> Result<usize> {
            f[i].parse::<usize>()
                .map_err(|e| Error::parse(lineno, format!("field {}: {e}", i + 1)))
        };
        let model = match f[11] {
            "inf" => MeanCount::Divergent,
            _ => MeanCount::Finite(float(11)?),
        };
        rows.push(SweepRow {
            topology: f[0].to_string(),
            n: int(1)?,
            replicates: int(2)?,
            events_per_network: int(3)?,
            ttl: f[4].parse().map_err(|e: Error| Error::parse(lineno, e.to_string()))?,
            sigma: float(5)?,
            gamma: float(6)?,
            gamma_eff: float(7)?,
            sim_mean_receivers: float(8)?,
            sim_mean_subscribers: float(9)?,
            sim_stddev_receivers: float(10)?,
            model_mean_receivers: model,
            model_divergent: f[12]
                .parse()
                .map_err(|e| Error::parse(lineno, format!("field 13: {e}")))?,
            giant_component_mean: float(13)?,
        });
    }
    Ok(rows)
}

impl ScanAxis {
    pub fn label(&self) -> &'static str {
        match self {
            ScanAxis::Sigma { .. } => "sigma",
            ScanAxis::Gamma { .. } => "gamma",
        }
    }
}
