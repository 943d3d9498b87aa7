use std::io::Write;

use serde::Serialize;

use crate::bench::ResultRow;
use crate::error::Result;

/// Seed statistics of one (scenario, algorithm, parameters) cell. Standard
/// deviations use the `n − 1` denominator and are 0 for a single run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub scenario: String,
    pub algorithm: String,
    pub d: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub ell: usize,
    pub runs: usize,
    pub failures: usize,
    pub rel_error_mean: Option<f64>,
    pub rel_error_std: Option<f64>,
    pub wall_time_mean: Option<f64>,
    pub wall_time_std: Option<f64>,
    /// Mean TT-Rounding time over this cell's mean time.
    pub speedup_vs_tt_rounding: Option<f64>,
}

type CellKey = (String, usize, usize, usize, usize, usize);

fn cell(row: &ResultRow) -> CellKey {
    (row.scenario.clone(), row.d, row.n, row.r, row.s, row.ell)
}

fn mean_std(xs: &[f64]) -> (Option<f64>, Option<f64>) {
    if xs.is_empty() {
        return (None, None);
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = if xs.len() < 2 {
        0.0
    } else {
        xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
    };
    (Some(mean), Some(var.sqrt()))
}

/// Groups rows by cell and algorithm, in order of first appearance.
pub fn summarize(rows: &[ResultRow]) -> Vec<SummaryRow> {
    let mut groups: Vec<((CellKey, String), Vec<&ResultRow>)> = Vec::new();
    for row in rows {
        let key = (cell(row), row.algorithm.clone());
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, g)) => g.push(row),
            None => groups.push((key, vec![row])),
        }
    }
    let mut out: Vec<SummaryRow> = groups
        .iter()
        .map(|((c, alg), g)| {
            let ok: Vec<&&ResultRow> = g.iter().filter(|r| !r.is_error()).collect();
            let errs: Vec<f64> = ok.iter().filter_map(|r| r.rel_error).collect();
            let times: Vec<f64> = ok.iter().map(|r| r.wall_time_s).collect();
            let (rel_error_mean, rel_error_std) = mean_std(&errs);
            let (wall_time_mean, wall_time_std) = mean_std(&times);
            SummaryRow {
                scenario: c.0.clone(),
                algorithm: alg.clone(),
                d: c.1,
                n: c.2,
                r: c.3,
                s: c.4,
                ell: c.5,
                runs: g.len(),
                failures: g.len() - ok.len(),
                rel_error_mean,
                rel_error_std,
                wall_time_mean,
                wall_time_std,
                speedup_vs_tt_rounding: None,
            }
        })
        .collect();
    let baseline: Vec<(CellKey, Option<f64>)> = out
        .iter()
        .filter(|s| s.algorithm == "tt-rounding")
        .map(|s| {
            (
                (s.scenario.clone(), s.d, s.n, s.r, s.s, s.ell),
                s.wall_time_mean,
            )
        })
        .collect();
    for s in &mut out {
        let key = (s.scenario.clone(), s.d, s.n, s.r, s.s, s.ell);
        if let Some((_, Some(base))) = baseline.iter().find(|(k, _)| *k == key) {
            s.speedup_vs_tt_rounding = s.wall_time_mean.filter(|&t| t > 0.0).map(|t| base / t);
        }
    }
    out
}

pub fn write_summary<W: Write>(summary: &[SummaryRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in summary {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alg: &str, seed: u64, err: f64, time: f64) -> ResultRow {
        ResultRow {
            scenario: "custom".into(),
            algorithm: alg.into(),
            d: 4,
            n: 4,
            r: 4,
            s: 4,
            ell: 4,
            seed,
            rel_error: Some(err),
            wall_time_s: time,
            flops_measured: 1,
            flops_predicted: 1,
            output_ranks: "1-4-4-4-1".into(),
        }
    }

    #[test]
    fn mean_std_and_speedup() {
        let rows = vec![
            row("tt-rounding", 1, 1.0, 4.0),
            row("hatt-2", 1, 2.0, 1.0),
            row("tt-rounding", 2, 3.0, 6.0),
            row("hatt-2", 2, 4.0, 1.0),
        ];
        let s = summarize(&rows);
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].algorithm, "tt-rounding");
        assert_eq!(s[0].rel_error_mean, Some(2.0));
        assert_eq!(s[0].rel_error_std, Some(2f64.sqrt()));
        assert_eq!(s[1].wall_time_std, Some(0.0));
        assert_eq!(s[1].speedup_vs_tt_rounding, Some(5.0));
        assert_eq!(s[0].speedup_vs_tt_rounding, Some(1.0));
    }

    #[test]
    fn failures_excluded_from_stats() {
        let mut bad = row("rand-orth", 3, 0.0, 0.0);
        bad.rel_error = None;
        bad.output_ranks = "ERR:resource".into();
        let rows = vec![row("rand-orth", 1, 0.5, 1.0), bad];
        let s = summarize(&rows);
        assert_eq!((s[0].runs, s[0].failures), (2, 1));
        assert_eq!(s[0].rel_error_mean, Some(0.5));
        assert_eq!(s[0].speedup_vs_tt_rounding, None);
    }
}
