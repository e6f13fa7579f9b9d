//! Report rendering: aligned text, CSV and JSON.

use super::experiment::{EvalReport, Summary};

fn cell(s: Option<Summary>) -> String {
    s.map_or("-".to_string(), |s| format!("{:.4} ({:.4})", s.mean, s.std))
}

/// One row per (model, split): `MSE mean (std)` and `AUC mean (std)`.
pub fn to_text(reports: &[EvalReport]) -> String {
    let mut rows = vec![[
        "model".to_string(),
        "split".to_string(),
        "rows".to_string(),
        "MSE".to_string(),
        "AUC".to_string(),
    ]];
    for r in reports {
        for s in &r.splits {
            rows.push([
                r.model.to_string(),
                s.split.clone(),
                s.rows.to_string(),
                cell(Some(s.mse)),
                cell(s.auc),
            ]);
        }
    }
    let widths: Vec<usize> = (0..5)
        .map(|c| rows.iter().map(|r| r[c].len()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in &rows {
        let line: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        out += line.join("  ").trim_end();
        out.push('\n');
    }
    if let Some(r) = reports.first() {
        out += &format!("runs: {}\n", r.runs);
    }
    out
}

pub fn to_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from("model,split,rows,positives,runs,mse_mean,mse_std,auc_mean,auc_std\n");
    for r in reports {
        for s in &r.splits {
            let (am, asd) = s.auc.map_or((String::new(), String::new()), |a| {
                (a.mean.to_string(), a.std.to_string())
            });
            out += &format!(
                "{},{},{},{},{},{},{},{am},{asd}\n",
                r.model, s.split, s.rows, s.positives, r.runs, s.mse.mean, s.mse.std
            );
        }
    }
    out
}

pub fn to_json(reports: &[EvalReport]) -> String {
    serde_json::to_string_pretty(reports).expect("reports serialize")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::ModelKind;
    use crate::eval::experiment::SplitReport;

    fn report() -> EvalReport {
        EvalReport {
            model: ModelKind::MfIps,
            runs: 2,
            splits: vec![SplitReport {
                split: "I".into(),
                rows: 3,
                positives: 3,
                mse: Summary { mean: 0.25, std: 0.01 },
                auc: None,
            }],
            per_run: vec![],
        }
    }

    #[test]
    fn renders_all_formats() {
        let text = to_text(&[report()]);
        assert!(text.contains("mf-ips  I      3     0.2500 (0.0100)  -"), "{text}");
        assert_eq!(to_csv(&[report()]).lines().nth(1), Some("mf-ips,I,3,3,2,0.25,0.01,,"));
        assert!(to_json(&[report()]).contains("\"model\": \"mf-ips\""));
    }
}
