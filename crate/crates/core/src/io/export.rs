//! CSV and JSON writers for embeddings, spectra and diagnostics.

use std::io::Write;

use serde::Serialize;

use crate::diagnostics::{Bound, Potential};
use crate::embedding::TorusEmbedding;
use crate::error::{Error, Result};

const SIG_DIGITS: usize = 12;

/// Formats `x` with 12 significant digits, switching to exponent notation
/// outside `[1e-4, 1e12)` like C's `%.12g`.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim_zeros(mantissa.to_string()), exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" { "0".into() } else { t.to_string() }
}

/// `node_id,phase_<k>...,modulus_<k>...` with one row per node.
pub fn write_coords_csv<W: Write>(emb: &TorusEmbedding, ids: &[String], mut w: W) -> Result<()> {
    if ids.len() != emb.node_count() {
        return Err(Error::LabelMismatch { labels: ids.len(), nodes: emb.node_count() });
    }
    let mut header = vec!["node_id".to_string()];
    header.extend(emb.indices().iter().map(|k| format!("phase_{k}")));
    header.extend(emb.indices().iter().map(|k| format!("modulus_{k}")));
    writeln!(w, "{}", header.join(","))?;
    for (i, id) in ids.iter().enumerate() {
        let mut row = vec![csv_field(id)];
        row.extend(emb.coords()[i].iter().map(|&t| fmt_sig(t)));
        row.extend(emb.moduli()[i].iter().map(|&r| fmt_sig(r)));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

/// `k,lambda_g,lambda_0`; rows run to the longer of the two lists and
/// missing values are left empty.
pub fn write_spectrum_csv<W: Write>(lambda_g: &[f64], lambda_0: &[f64], mut w: W) -> Result<()> {
    writeln!(w, "k,lambda_g,lambda_0")?;
    let rows = lambda_g.len().max(lambda_0.len());
    let cell = |v: Option<&f64>| v.map(|&x| fmt_sig(x)).unwrap_or_default();
    for k in 0..rows {
        writeln!(w, "{k},{},{}", cell(lambda_g.get(k)), cell(lambda_0.get(k)))?;
    }
    Ok(())
}

/// `node_id,phi_1,phi_2,...` for the real eigenvectors listed in `indices`.
pub fn write_real_coords_csv<W: Write>(
    ids: &[String],
    indices: &[usize],
    vectors: &[&[f64]],
    mut w: W,
) -> Result<()> {
    let mut header = vec!["node_id".to_string()];
    header.extend(indices.iter().map(|k| format!("phi_{k}")));
    writeln!(w, "{}", header.join(","))?;
    for (i, id) in ids.iter().enumerate() {
        let mut row = vec![csv_field(id)];
        row.extend(vectors.iter().map(|v| fmt_sig(v[i])));
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PotentialSummary {
    pub exists: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<Vec<i64>>,
}

impl From<&Potential> for PotentialSummary {
    fn from(p: &Potential) -> Self {
        match p {
            Potential::Exact { h } => PotentialSummary { exists: true, h: Some(h.clone()) },
            Potential::Obstructed { .. } => PotentialSummary { exists: false, h: None },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClusterScore {
    pub eigen_index: usize,
    pub score: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosticsReport {
    pub charge: String,
    pub nodes: usize,
    pub edges: usize,
    pub lambda0: f64,
    pub spectral_gap: f64,
    pub frustration: f64,
    pub epsilon: f64,
    /// How `epsilon` was measured.
    pub epsilon_kind: &'static str,
    pub beta1: usize,
    pub bounds: Vec<Bound>,
    pub potential: PotentialSummary,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cluster_scores: Vec<ClusterScore>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

pub fn write_json<W: Write, T: Serialize>(value: &T, mut w: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}
