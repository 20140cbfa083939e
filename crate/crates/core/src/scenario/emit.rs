use std::path::Path;

use super::{OutputFormat, ProtocolResult, Report, ScenarioError, ScenarioResult};

fn csv_error(e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Io {
        path: "<csv buffer>".into(),
        message: e.to_string(),
    }
}

fn metric_rows(rows: &[(&str, String)]) -> Vec<Vec<String>> {
    let mut out = vec![vec!["metric".to_string(), "value".to_string()]];
    out.extend(rows.iter().map(|(k, v)| vec![k.to_string(), v.clone()]));
    out
}

fn csv_records(report: &Report) -> Vec<Vec<String>> {
    match &report.result {
        ProtocolResult::Verification(v) => {
            let mut out = vec![vec!["input".into(), "outcome".into(), "probability".into()]];
            for row in &v.rows {
                for (k, p) in row.probabilities.iter().enumerate() {
                    out.push(vec![row.input.clone(), format!("{:02b}", k), p.to_string()]);
                }
            }
            out
        }
        ProtocolResult::Signaling(s) => {
            let mut out = vec![vec!["setting".into(), "outcome".into(), "probability".into()]];
            for d in &s.distributions {
                for (k, p) in d.probabilities.iter().enumerate() {
                    out.push(vec![d.setting.clone(), k.to_string(), p.to_string()]);
                }
            }
            out.push(vec![
                "signaling_metric".into(),
                String::new(),
                s.signaling_metric.to_string(),
            ]);
            out
        }
        ProtocolResult::PreparationProblem(r) => {
            let mut out = vec![[
                "state",
                "verifying_label",
                "remote_label",
                "linearly_equivalent",
                "verifying_member",
                "remote_member",
                "output_distance",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect()];
            for e in &r.entries {
                out.push(vec![
                    e.state.clone(),
                    e.verifying_label.clone(),
                    e.remote_label.clone(),
                    e.linearly_equivalent.to_string(),
                    e.verifying_member.to_string(),
                    e.remote_member.to_string(),
                    e.output_distance.to_string(),
                ]);
            }
            out
        }
        ProtocolResult::Bb84(a) => metric_rows(&[
            ("n_bits", a.n_bits.to_string()),
            ("eve_bit_accuracy", a.eve_bit_accuracy.to_string()),
            ("eve_basis_accuracy", a.eve_basis_accuracy.to_string()),
            ("induced_qber", a.induced_qber.to_string()),
            ("sifted_key_fraction", a.sifted_key_fraction.to_string()),
        ]),
        ProtocolResult::Affinity(a) => metric_rows(&[("affinity_violation", a.violation.to_string())]),
        ProtocolResult::Witness(w) => metric_rows(&[
            ("residual", w.residual.to_string()),
            ("choi_min_eig", w.choi_min_eig.to_string()),
            ("tolerance", w.tolerance.to_string()),
            ("linear_explainable", w.linear_explainable.to_string()),
        ]),
    }
}

/// Renders a report. CSV holds the plot-ready table; JSON the full report.
pub fn emit_table(report: &Report, format: OutputFormat) -> ScenarioResult<String> {
    match format {
        OutputFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).map_err(csv_error)?;
            s.push('\n');
            Ok(s)
        }
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for record in csv_records(report) {
                w.write_record(&record).map_err(csv_error)?;
            }
            let bytes = w.into_inner().map_err(csv_error)?;
            String::from_utf8(bytes).map_err(csv_error)
        }
    }
}

pub fn write_report(report: &Report, format: OutputFormat, path: &Path) -> ScenarioResult<()> {
    let text = emit_table(report, format)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(|e| ScenarioError::io(parent, e))?;
    }
    std::fs::write(path, text).map_err(|e| ScenarioError::io(path, e))
}
