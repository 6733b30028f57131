use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{mean_ci, RunStatistics, StatsError};
use crate::metrics::EvalResult;

/// Statistics of one metric within one group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub group: String,
    pub metric: String,
    pub runs: usize,
    /// Runs where the metric was undefined and therefore left out.
    pub undefined: usize,
    /// `None` when every run was undefined.
    pub stats: Option<RunStatistics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateTable {
    pub level: f64,
    pub groups: Vec<String>,
    pub rows: Vec<AggregateRow>,
}

/// One row per `(group, metric)`, groups in the given order.
pub fn aggregate_runs(groups: &[(String, Vec<EvalResult>)], level: f64) -> Result<AggregateTable, StatsError> {
    let mut rows = Vec::new();
    for (group, runs) in groups {
        if runs.is_empty() {
            return Err(StatsError::EmptyGroup(group.clone()));
        }
        for (k, metric) in EvalResult::METRICS.iter().enumerate() {
            let samples: Vec<f64> = runs.iter().filter_map(|r| r.values()[k]).collect();
            let stats = if samples.is_empty() {
                None
            } else {
                Some(mean_ci(&samples, level)?.named(*metric))
            };
            rows.push(AggregateRow {
                group: group.clone(),
                metric: metric.to_string(),
                runs: runs.len(),
                undefined: runs.len() - samples.len(),
                stats,
            });
        }
    }
    Ok(AggregateTable {
        level,
        groups: groups.iter().map(|g| g.0.clone()).collect(),
        rows,
    })
}

fn read_dir_sorted(dir: &Path) -> Result<Vec<std::fs::DirEntry>, StatsError> {
    let io = |source| StatsError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut entries = std::fs::read_dir(dir).map_err(io)?.collect::<Result<Vec<_>, _>>().map_err(io)?;
    entries.sort_by(|a, b| natord::compare(&a.file_name().to_string_lossy(), &b.file_name().to_string_lossy()));
    Ok(entries)
}

/// Reads `<dir>/<group>/<run>.json`; groups and runs in natural name order.
pub fn read_runs_dir(dir: &Path) -> Result<Vec<(String, Vec<EvalResult>)>, StatsError> {
    let mut groups = Vec::new();
    for entry in read_dir_sorted(dir)? {
        if !entry.path().is_dir() {
            continue;
        }
        let name = entry.file_name().to_string_lossy().into_owned();
        let mut runs = Vec::new();
        for run in read_dir_sorted(&entry.path())? {
            let path = run.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            let text = std::fs::read_to_string(&path).map_err(|source| StatsError::Io {
                path: path.clone(),
                source,
            })?;
            let result: EvalResult = serde_json::from_str(&text).map_err(|e| StatsError::Parse {
                path: path.clone(),
                message: e.to_string(),
            })?;
            runs.push(result);
        }
        if runs.is_empty() {
            return Err(StatsError::EmptyGroup(name));
        }
        groups.push((name, runs));
    }
    if groups.is_empty() {
        return Err(StatsError::EmptyGroup(dir.display().to_string()));
    }
    Ok(groups)
}

fn cell(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.6}"))
}

impl AggregateTable {
    pub fn row(&self, group: &str, metric: &str) -> Option<&AggregateRow> {
        self.rows.iter().find(|r| r.group == group && r.metric == metric)
    }

    /// Long-form CSV: `group,metric,n,undefined,mean,ci_half_width`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["group", "metric", "n", "undefined", "mean", "ci_half_width"]).expect("in-memory write");
        for r in &self.rows {
            let n = r.stats.as_ref().map_or(0, |s| s.n);
            let mean = cell(r.stats.as_ref().map(|s| s.mean));
            let hw = cell(r.stats.as_ref().and_then(|s| s.ci_half_width));
            w.write_record([r.group.as_str(), &r.metric, &n.to_string(), &r.undefined.to_string(), &mean, &hw])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Metric rows by group columns, cells `mean ± half-width`.
    pub fn pivot(&self) -> String {
        let fmt = |r: Option<&AggregateRow>| match r.and_then(|r| r.stats.as_ref()) {
            None => "-".to_string(),
            Some(s) => match s.ci_half_width {
                Some(hw) => format!("{:.3} ± {:.3}", s.mean, hw),
                None => format!("{:.3} ± -", s.mean),
            },
        };
        let cells: Vec<Vec<String>> = EvalResult::METRICS
            .iter()
            .map(|m| self.groups.iter().map(|g| fmt(self.row(g, m))).collect())
            .collect();
        let widths: Vec<usize> = (0..self.groups.len())
            .map(|j| cells.iter().map(|row| row[j].chars().count()).chain([self.groups[j].chars().count()]).max().unwrap_or(1))
            .collect();
        let mut out = format!("{:<6}", "metric");
        for (g, w) in self.groups.iter().zip(&widths) {
            let _ = write!(out, "  {g:>w$}");
        }
        out.push('\n');
        for (header, row) in EvalResult::HEADERS.iter().zip(&cells) {
            let _ = write!(out, "{header:<6}");
            for (c, w) in row.iter().zip(&widths) {
                let pad = w - c.chars().count();
                let _ = write!(out, "  {}{c}", " ".repeat(pad));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn result(ap50: f64) -> EvalResult {
        EvalResult {
            ap: Some(ap50 / 2.0),
            ap50: Some(ap50),
            ap75: Some(ap50 / 3.0),
            ap_s: Some(0.1),
            ap_m: Some(0.2),
            ap_l: None,
            ar: Some(0.4),
            ar_s: Some(0.3),
            ar_m: Some(0.5),
            ar_l: None,
        }
    }

    #[test]
    fn identical_runs_have_zero_width() {
        let t = aggregate_runs(&[("g".into(), vec![result(0.7); 8])], 0.95).unwrap();
        assert_eq!(t.rows.len(), 10);
        for r in &t.rows {
            if let Some(s) = &r.stats {
                assert_eq!(s.ci_half_width, Some(0.0));
                assert_eq!(s.n, 8);
            }
        }
        let apl = t.row("g", "ap_l").unwrap();
        assert!(apl.stats.is_none());
        assert_eq!(apl.undefined, 8);
        assert!(t.pivot().lines().any(|l| l.starts_with("AP_L") && l.trim_end().ends_with('-')));
    }

    #[test]
    fn one_row_per_group_and_metric() {
        let groups = vec![
            ("bounds20".to_string(), vec![result(0.5), result(0.6)]),
            ("bounds40".to_string(), vec![result(0.4), result(0.45)]),
        ];
        let t = aggregate_runs(&groups, 0.95).unwrap();
        assert_eq!(t.rows.len(), 20);
        let csv = t.to_csv();
        assert_eq!(csv.lines().count(), 21);
        assert!(csv.lines().any(|l| l.starts_with("bounds40,ap50,2,0,0.425000,")));
        let pivot = t.pivot();
        let header = pivot.lines().next().unwrap();
        assert!(header.find("bounds20").unwrap() < header.find("bounds40").unwrap());
        assert_eq!(pivot.lines().count(), 11);
    }

    #[test]
    fn single_run_has_dash_half_width() {
        let t = aggregate_runs(&[("g".into(), vec![result(0.5)])], 0.95).unwrap();
        assert!(t.to_csv().lines().any(|l| l == "g,ap50,1,0,0.500000,-"));
    }

    #[test]
    fn empty_group_rejected() {
        assert!(matches!(aggregate_runs(&[("x".into(), vec![])], 0.95), Err(StatsError::EmptyGroup(g)) if g == "x"));
    }

    #[test]
    fn runs_dir_layout() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(read_runs_dir(dir.path()), Err(StatsError::EmptyGroup(_))));
        for (g, k) in [("b160", 3), ("b20", 2)] {
            std::fs::create_dir(dir.path().join(g)).unwrap();
            for i in 0..k {
                std::fs::write(dir.path().join(g).join(format!("run_{i}.json")), serde_json::to_string(&result(0.5)).unwrap()).unwrap();
            }
        }
        let groups = read_runs_dir(dir.path()).unwrap();
        assert_eq!(groups.iter().map(|g| (g.0.as_str(), g.1.len())).collect::<Vec<_>>(), vec![("b20", 2), ("b160", 3)]);
        std::fs::create_dir(dir.path().join("empty")).unwrap();
        assert!(matches!(read_runs_dir(dir.path()), Err(StatsError::EmptyGroup(g)) if g == "empty"));
    }
}
