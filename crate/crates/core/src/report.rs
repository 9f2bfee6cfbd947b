//! Run reports and their text/JSON renderings.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{json, Value};

use crate::register::{RankReport, SparseState, NORM_TOLERANCE};
use crate::rewrite::ExperimentProgram;

/// Significant digits used when rendering reports.
pub const REPORT_DIGITS: usize = 12;

#[derive(Clone, Debug, PartialEq)]
pub struct RunReport {
    pub final_state: SparseState,
    /// Exclusive outcome probability per declared detector.
    pub detectors: BTreeMap<String, f64>,
    /// Probability that each qubit fires, keyed `q<k>`.
    pub marginals: BTreeMap<String, f64>,
    pub norm: f64,
    pub rank: Option<RankReport>,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn from_final_state(program: &ExperimentProgram, final_state: SparseState) -> Self {
        let norm = final_state.norm();
        let mut warnings = Vec::new();
        let rank = match final_state.state_rank() {
            Ok(rank) => {
                if !rank.homogeneous {
                    warnings.push(format!("final state mixes ranks {:?}", rank.ranks));
                }
                Some(rank)
            }
            Err(_) => {
                warnings.push("final state is the zero vector".to_string());
                None
            }
        };
        let mut detectors = BTreeMap::new();
        let mut marginals = BTreeMap::new();
        if final_state.is_normalized() {
            for det in program.detectors() {
                let p = final_state
                    .born_exclusive(det.outcome())
                    .expect("normalized state, validated outcome");
                detectors.insert(det.name().to_string(), p);
            }
            for k in 0..program.shape().rank() {
                let p = final_state.born_marginal(k).expect("normalized state, valid qubit");
                marginals.insert(format!("q{k}"), p);
            }
        } else {
            warnings.push(format!(
                "norm {} drifts from 1 by more than {NORM_TOLERANCE:e}; probabilities withheld",
                round_sig(norm)
            ));
        }
        Self {
            final_state,
            detectors,
            marginals,
            norm,
            rank,
            warnings,
        }
    }

    pub fn norm_ok(&self) -> bool {
        (self.norm - 1.0).abs() <= NORM_TOLERANCE
    }

    pub fn to_json_value(&self) -> Value {
        let shape = self.final_state.shape();
        let state: Vec<Value> = self
            .final_state
            .terms()
            .map(|(index, amp)| {
                json!({
                    "amp": [round_sig(amp.re), round_sig(amp.im)],
                    "bits": index.bit_string(shape),
                    "index": index.0,
                })
            })
            .collect();
        let probs = |m: &BTreeMap<String, f64>| -> Value {
            Value::Object(m.iter().map(|(k, &v)| (k.clone(), json!(round_sig(v)))).collect())
        };
        let rank = match &self.rank {
            Some(r) => json!({ "homogeneous": r.homogeneous, "ranks": r.ranks }),
            None => Value::Null,
        };
        json!({
            "detectors": probs(&self.detectors),
            "marginals": probs(&self.marginals),
            "norm": round_sig(self.norm),
            "rank": rank,
            "state": state,
            "warnings": self.warnings,
        })
    }

    /// Pretty JSON with sorted keys; identical reports give identical bytes.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&sort_keys(self.to_json_value()))
            .expect("report values are finite");
        text.push('\n');
        text
    }

    pub fn to_text(&self) -> String {
        let shape = self.final_state.shape();
        let mut out = String::new();
        let _ = writeln!(out, "norm  {}", fmt_sig(self.norm));
        match &self.rank {
            Some(r) => {
                let ranks: Vec<String> = r.ranks.iter().map(|k| k.to_string()).collect();
                let kind = if r.homogeneous { "homogeneous" } else { "mixed" };
                let _ = writeln!(out, "rank  {{{}}} {kind}", ranks.join(", "));
            }
            None => out.push_str("rank  -\n"),
        }

        out.push_str("\nstate\n");
        let rows: Vec<[String; 4]> = self
            .final_state
            .terms()
            .map(|(index, amp)| {
                [
                    index.ket_bits(shape),
                    index.ket_decimal(),
                    fmt_sig(amp.re),
                    fmt_sig(amp.im),
                ]
            })
            .collect();
        write_table(&mut out, ["bits", "index", "re", "im"], &rows);

        if !self.detectors.is_empty() {
            out.push_str("\ndetectors\n");
            let rows: Vec<[String; 2]> = self
                .detectors
                .iter()
                .map(|(k, &v)| [k.clone(), fmt_sig(v)])
                .collect();
            write_table(&mut out, ["name", "probability"], &rows);
        }
        if !self.marginals.is_empty() {
            out.push_str("\nmarginals\n");
            let mut rows: Vec<(usize, [String; 2])> = self
                .marginals
                .iter()
                .map(|(k, &v)| (k[1..].parse().unwrap_or(usize::MAX), [k.clone(), fmt_sig(v)]))
                .collect();
            rows.sort_by_key(|(k, _)| *k);
            let rows: Vec<[String; 2]> = rows.into_iter().map(|(_, r)| r).collect();
            write_table(&mut out, ["qubit", "probability"], &rows);
        }
        if !self.warnings.is_empty() {
            out.push_str("\nwarnings\n");
            for w in &self.warnings {
                let _ = writeln!(out, "  {w}");
            }
        }
        out
    }
}

fn write_table<const N: usize>(out: &mut String, header: [&str; N], rows: &[[String; N]]) {
    let mut widths: [usize; N] = header.map(str::len);
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let padded: Vec<String> = cells
            .iter()
            .zip(widths.iter())
            .map(|(c, &w)| format!("{c:<w$}"))
            .collect();
        format!("  {}\n", padded.join("  ").trim_end())
    };
    out.push_str(&line(header.to_vec()));
    for row in rows {
        out.push_str(&line(row.iter().map(String::as_str).collect()));
    }
}

fn sort_keys(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let sorted: BTreeMap<String, Value> =
                map.into_iter().map(|(k, v)| (k, sort_keys(v))).collect();
            Value::Object(sorted.into_iter().collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

/// Round to [`REPORT_DIGITS`] significant digits.
pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, x)
        .parse()
        .expect("formatted float parses")
}

pub fn fmt_sig(x: f64) -> String {
    let r = round_sig(x);
    if r == 0.0 {
        "0".to_string()
    } else {
        format!("{r}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding() {
        assert_eq!(round_sig(0.36000000000000004), 0.36);
        assert_eq!(round_sig(1.0 / 3.0), 0.333333333333);
        assert_eq!(round_sig(-2.5e-14), -2.5e-14);
        assert_eq!(fmt_sig(-0.0), "0");
        assert_eq!(fmt_sig(0.64), "0.64");
    }
}
