//! Seeded benchmark scenarios and their CSV rows.

mod runners;
mod summary;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::apps::FunctionKind;
use crate::error::{Error, Result};
use crate::recompress::{HpcrlVariant, Recompressor};
use crate::tensor::Limits;

pub use runners::{
    run_appendix_f, run_custom, run_example1, run_example2, run_example3, run_scenario,
};
pub use summary::{summarize, write_summary, SummaryRow};

/// Column order of the result CSV.
pub const CSV_COLUMNS: [&str; 13] = [
    "scenario",
    "algorithm",
    "d",
    "n",
    "r",
    "s",
    "ell",
    "seed",
    "rel_error",
    "wall_time_s",
    "flops_measured",
    "flops_predicted",
    "output_ranks",
];

/// Prefix of `output_ranks` in rows whose run failed.
pub const ERROR_MARKER: &str = "ERR:";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    Example1,
    Example2,
    Example3,
    AppendixF,
    Custom,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Example1 => "example1",
            Self::Example2 => "example2",
            Self::Example3 => "example3",
            Self::AppendixF => "appendixF",
            Self::Custom => "custom",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "example1" => Ok(Self::Example1),
            "example2" => Ok(Self::Example2),
            "example3" => Ok(Self::Example3),
            "appendixf" | "appendix-f" => Ok(Self::AppendixF),
            "custom" => Ok(Self::Custom),
            other => Err(Error::Usage(format!("unknown scenario {other:?}"))),
        }
    }
}

/// One benchmark configuration. Every sweep is a cartesian product over
/// `orders × ranks × targets × seeds × algorithms`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub kind: ScenarioKind,
    pub orders: Vec<usize>,
    pub n: usize,
    /// Input rank sweep (`r = s`); unused by example1 and example3.
    pub ranks: Vec<usize>,
    pub targets: Vec<usize>,
    pub seeds: Vec<u64>,
    pub algorithms: Vec<Recompressor>,
    /// Fourier harmonics per series (example1).
    pub harmonics: usize,
    /// Test functions (example3).
    pub functions: Vec<FunctionKind>,
    /// Power-iteration budget (example3).
    pub max_iter: usize,
    pub limits: Limits,
    /// Run cells one at a time instead of one thread per seed.
    pub sequential: bool,
}

pub const DEFAULT_SEEDS: [u64; 5] = [1, 2, 3, 4, 5];
pub const DEFAULT_HARMONICS: usize = 60;

/// Core cap for example2: forbids product cores beyond one million entries,
/// so the baselines run out at `r = s ≥ 30` for `n = 6`.
pub const EXAMPLE2_CORE_CAP: usize = 1_000_000;

/// Truncation kept by HaTT-1 in the appendixF scenario.
pub const APPENDIX_F_MAX_TERMS: usize = 5;

fn baselines_and_hatt(max_terms: Option<usize>) -> Vec<Recompressor> {
    vec![
        Recompressor::TtRounding,
        Recompressor::RandOrth,
        Recompressor::Hatt(HpcrlVariant::svd(max_terms)),
        Recompressor::Hatt(HpcrlVariant::Direct),
    ]
}

impl Scenario {
    /// Desk-scale defaults for each scenario.
    pub fn defaults(kind: ScenarioKind) -> Self {
        let base = Self {
            kind,
            orders: vec![5],
            n: 8,
            ranks: vec![],
            targets: vec![],
            seeds: DEFAULT_SEEDS.to_vec(),
            algorithms: baselines_and_hatt(None),
            harmonics: DEFAULT_HARMONICS,
            functions: vec![FunctionKind::Qing, FunctionKind::Alpine],
            max_iter: 100,
            limits: Limits::from_env(),
            sequential: false,
        };
        match kind {
            ScenarioKind::Example1 => Self {
                targets: (2..=12).step_by(2).collect(),
                ..base
            },
            ScenarioKind::Example2 => Self {
                n: 6,
                ranks: vec![10, 20, 30, 40],
                targets: vec![8],
                limits: Limits {
                    core_elements: EXAMPLE2_CORE_CAP,
                    ..base.limits
                },
                ..base
            },
            ScenarioKind::Example3 => Self {
                orders: vec![2, 3, 4],
                n: 10,
                targets: vec![5],
                ..base
            },
            ScenarioKind::AppendixF => Self {
                ranks: vec![20],
                targets: (4..=16).step_by(2).collect(),
                algorithms: vec![
                    Recompressor::Hatt(HpcrlVariant::svd(Some(APPENDIX_F_MAX_TERMS))),
                    Recompressor::Hatt(HpcrlVariant::Direct),
                ],
                ..base
            },
            ScenarioKind::Custom => Self {
                orders: vec![4],
                n: 4,
                ranks: vec![4],
                targets: vec![4],
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(Error::Usage(m));
        if self.orders.is_empty() || self.orders.contains(&0) {
            return usage(format!(
                "orders must be positive and non-empty: {:?}",
                self.orders
            ));
        }
        if self.n == 0 {
            return usage("mode size must be positive".into());
        }
        if self.targets.is_empty() || self.targets.contains(&0) {
            return usage(format!(
                "targets must be positive and non-empty: {:?}",
                self.targets
            ));
        }
        let needs_ranks = !matches!(self.kind, ScenarioKind::Example1 | ScenarioKind::Example3);
        if needs_ranks && (self.ranks.is_empty() || self.ranks.contains(&0)) {
            return usage(format!(
                "ranks must be positive and non-empty: {:?}",
                self.ranks
            ));
        }
        if self.seeds.is_empty() {
            return usage("at least one seed is required".into());
        }
        let mut seen = self.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != self.seeds.len() {
            return usage(format!("seeds must be distinct: {:?}", self.seeds));
        }
        if self.algorithms.is_empty() {
            return usage("at least one algorithm is required".into());
        }
        if self.kind == ScenarioKind::Example1 && self.harmonics == 0 {
            return usage("harmonics must be positive".into());
        }
        if self.kind == ScenarioKind::Example3 && (self.functions.is_empty() || self.n < 2) {
            return usage("example3 needs at least one function and n ≥ 2".into());
        }
        for a in &self.algorithms {
            if let Recompressor::Hatt(v) = a {
                v.validate()?;
            }
        }
        Ok(())
    }
}

/// One CSV row: a single (algorithm, parameters, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub algorithm: String,
    pub d: usize,
    pub n: usize,
    pub r: usize,
    pub s: usize,
    pub ell: usize,
    pub seed: u64,
    pub rel_error: Option<f64>,
    pub wall_time_s: f64,
    pub flops_measured: u64,
    pub flops_predicted: u64,
    /// Rank chain such as `1-4-4-1`, or `ERR:<kind>` for failed runs.
    pub output_ranks: String,
}

impl ResultRow {
    pub fn is_error(&self) -> bool {
        self.output_ranks.starts_with(ERROR_MARKER)
    }
}

pub fn write_rows<W: Write>(rows: &[ResultRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_COLUMNS)?;
    }
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_rows<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(CSV_COLUMNS) {
        return Err(Error::Format(format!("unexpected CSV header {header:?}")));
    }
    Ok(r.deserialize()
        .collect::<std::result::Result<Vec<ResultRow>, _>>()?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(alg: &str, seed: u64, err: Option<f64>, ranks: &str) -> ResultRow {
        ResultRow {
            scenario: "example1".into(),
            algorithm: alg.into(),
            d: 5,
            n: 8,
            r: 7,
            s: 7,
            ell: 4,
            seed,
            rel_error: err,
            wall_time_s: 0.25,
            flops_measured: 100,
            flops_predicted: 120,
            output_ranks: ranks.into(),
        }
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![
            row("hatt-2", 1, Some(1.5e-3), "1-4-4-4-4-1"),
            row("tt-rounding", 2, None, "ERR:resource"),
        ];
        let mut buf = Vec::new();
        write_rows(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_COLUMNS.join(","));
        assert!(text.contains(",,"));
        let back = read_rows(&buf[..]).unwrap();
        assert_eq!(back, rows);
        assert!(back[1].is_error() && !back[0].is_error());
    }

    #[test]
    fn empty_output_still_has_header() {
        let mut buf = Vec::new();
        write_rows(&[], &mut buf).unwrap();
        assert!(read_rows(&buf[..]).unwrap().is_empty());
    }

    #[test]
    fn bad_header_rejected() {
        assert!(matches!(
            read_rows("a,b\n1,2\n".as_bytes()),
            Err(Error::Format(_))
        ));
    }

    #[test]
    fn defaults_validate() {
        for kind in [
            ScenarioKind::Example1,
            ScenarioKind::Example2,
            ScenarioKind::Example3,
            ScenarioKind::AppendixF,
            ScenarioKind::Custom,
        ] {
            let s = Scenario::defaults(kind);
            s.validate().unwrap();
            assert_eq!(s.kind.name().parse::<ScenarioKind>().unwrap(), kind);
        }
    }

    #[test]
    fn duplicate_seeds_rejected() {
        let mut s = Scenario::defaults(ScenarioKind::Custom);
        s.seeds = vec![3, 3];
        assert!(matches!(s.validate(), Err(Error::Usage(_))));
    }
}
