//! Command-line driver for the recompression benchmarks.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, ValueEnum};
use hatt_core::apps::FunctionKind;
use hatt_core::bench::{
    run_scenario, summarize, write_rows, write_summary, ResultRow, Scenario, ScenarioKind,
};
use hatt_core::recompress::{
    flop_model, flop_model_svd, Algorithm, HpcrlVariant, ModelParams, Recompressor,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Variant {
    Svd,
    Direct,
}

#[derive(Debug, Parser)]
#[command(
    name = "hatt-bench",
    version,
    about = "Benchmarks TT recompression of Hadamard products"
)]
struct Args {
    /// example1, example2, example3, appendixF or custom
    #[arg(long, default_value = "example1")]
    scenario: String,

    /// Comma-separated seeds
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,

    /// Result CSV path; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,

    /// Comma-separated subset of tt-rounding, rand-orth, hatt-1, hatt-2, hatt
    #[arg(long, value_delimiter = ',')]
    algorithms: Option<Vec<String>>,

    /// Tensor orders to sweep
    #[arg(long, value_delimiter = ',')]
    d: Option<Vec<usize>>,

    /// Mode size
    #[arg(long)]
    n: Option<usize>,

    /// Input ranks r = s to sweep
    #[arg(long, value_delimiter = ',')]
    ranks: Option<Vec<usize>>,

    /// Target ranks to sweep
    #[arg(long, value_delimiter = ',')]
    targets: Option<Vec<usize>>,

    /// Sketch splitting used by `hatt`; svd is HaTT-1, direct is HaTT-2
    #[arg(long, value_enum)]
    variant: Option<Variant>,

    /// Singular triplets kept by HaTT-1
    #[arg(long)]
    max_terms: Option<usize>,

    /// Fourier harmonics per series (example1)
    #[arg(long)]
    harmonics: Option<usize>,

    /// Test functions for example3
    #[arg(long, value_delimiter = ',')]
    functions: Option<Vec<String>>,

    /// Power-iteration budget (example3)
    #[arg(long)]
    max_iter: Option<usize>,

    /// Largest dense core (in elements) a run may allocate
    #[arg(long)]
    dense_cap: Option<f64>,

    /// Largest dense reference tensor; defaults to HATT_DENSE_CAP or 1e6
    #[arg(long)]
    oracle_cap: Option<f64>,

    /// Print closed-form flop counts of every modelled algorithm to stderr
    #[arg(long)]
    flop_report: bool,

    /// Exit non-zero when any cell hit a resource limit
    #[arg(long)]
    strict: bool,

    /// Run cells one at a time for clean timings
    #[arg(long)]
    sequential_timing: bool,

    /// Write per-cell mean/std and speedups to this CSV ("-" for stderr)
    #[arg(long)]
    summary_out: Option<PathBuf>,
}

fn cap(v: f64, flag: &str) -> anyhow::Result<usize> {
    if !(v >= 1.0) || !v.is_finite() {
        bail!("--{flag} must be at least 1, got {v}");
    }
    Ok(v as usize)
}

fn algorithms(
    names: &[String],
    variant: Option<Variant>,
    max_terms: Option<usize>,
) -> anyhow::Result<Vec<Recompressor>> {
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let rc = match (name.trim(), variant) {
            ("hatt", Some(Variant::Svd)) => Recompressor::Hatt(HpcrlVariant::svd(max_terms)),
            ("hatt", _) => Recompressor::Hatt(HpcrlVariant::Direct),
            ("hatt-2", Some(Variant::Svd)) => {
                bail!("--variant svd conflicts with hatt-2, which is the direct variant")
            }
            ("hatt-1", Some(Variant::Direct)) => {
                bail!("--variant direct conflicts with hatt-1, which is the svd variant")
            }
            (other, Some(_)) if !other.starts_with("hatt") => {
                bail!("--variant only applies to hatt algorithms, not {other}")
            }
            (other, _) => Recompressor::parse(other, max_terms)?,
        };
        if out.contains(&rc) {
            bail!("algorithm {name} listed twice");
        }
        out.push(rc);
    }
    Ok(out)
}

fn cli_parse(args: &Args) -> anyhow::Result<Scenario> {
    let kind: ScenarioKind = args.scenario.parse()?;
    let mut sc = Scenario::defaults(kind);
    if let Some(seeds) = &args.seeds {
        sc.seeds = seeds.clone();
    }
    if let Some(d) = &args.d {
        sc.orders = d.clone();
    }
    if let Some(n) = args.n {
        sc.n = n;
    }
    if let Some(r) = &args.ranks {
        sc.ranks = r.clone();
    }
    if let Some(t) = &args.targets {
        sc.targets = t.clone();
    }
    if let Some(j) = args.harmonics {
        sc.harmonics = j;
    }
    if let Some(it) = args.max_iter {
        sc.max_iter = it;
    }
    if let Some(f) = &args.functions {
        sc.functions = f
            .iter()
            .map(|s| s.parse::<FunctionKind>())
            .collect::<Result<_, _>>()?;
    }
    if let Some(names) = &args.algorithms {
        sc.algorithms = algorithms(names, args.variant, args.max_terms)?;
    } else if args.variant.is_some() {
        bail!("--variant needs --algorithms hatt");
    } else if let Some(m) = args.max_terms {
        for a in &mut sc.algorithms {
            if let Recompressor::Hatt(v @ HpcrlVariant::Svd { .. }) = a {
                *v = HpcrlVariant::svd(Some(m));
            }
        }
    }
    if args.max_terms.is_some()
        && !sc
            .algorithms
            .iter()
            .any(|a| a.algorithm() == Algorithm::Hatt1)
    {
        bail!("--max-terms only applies to hatt-1");
    }
    if let Some(c) = args.dense_cap {
        sc.limits.core_elements = cap(c, "dense-cap")?;
    }
    if let Some(c) = args.oracle_cap {
        sc.limits.dense_elements = cap(c, "oracle-cap")?;
    }
    sc.sequential = args.sequential_timing;
    sc.validate()?;
    Ok(sc)
}

fn flop_report(rows: &[ResultRow]) -> anyhow::Result<()> {
    let mut cells: Vec<(usize, usize, usize, usize, usize)> = Vec::new();
    for r in rows {
        let c = (r.d, r.n, r.r, r.s, r.ell);
        if !cells.contains(&c) {
            cells.push(c);
        }
    }
    let mut err = io::stderr().lock();
    writeln!(err, "algorithm,d,n,r,s,ell,flops_model,flops_model_svd")?;
    for (d, n, r, s, ell) in cells {
        let p = ModelParams {
            d,
            n,
            r,
            s,
            ell,
            terms: None,
        };
        for alg in Algorithm::ALL {
            writeln!(
                err,
                "{alg},{d},{n},{r},{s},{ell},{},{}",
                flop_model(alg, &p)?,
                flop_model_svd(alg, &p)
            )?;
        }
    }
    Ok(())
}

fn run(args: &Args) -> anyhow::Result<bool> {
    let sc = cli_parse(args)?;
    log::info!("running {} with seeds {:?}", sc.kind, sc.seeds);
    let rows = run_scenario(&sc)?;
    match &args.out {
        Some(path) => {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_rows(&rows, f)?;
        }
        None => write_rows(&rows, io::stdout().lock())?,
    }
    if let Some(path) = &args.summary_out {
        let summary = summarize(&rows);
        if path.as_os_str() == "-" {
            write_summary(&summary, io::stderr().lock())?;
        } else {
            let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
            write_summary(&summary, f)?;
        }
    }
    if args.flop_report {
        flop_report(&rows)?;
    }
    let failed = rows.iter().filter(|r| r.is_error()).count();
    if failed > 0 {
        log::warn!("{failed} of {} runs hit a resource limit", rows.len());
    }
    Ok(failed == 0 || !args.strict)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match run(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e
                .downcast_ref::<hatt_core::Error>()
                .is_none_or(|e| matches!(e, hatt_core::Error::Usage(_)));
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(argv: &[&str]) -> anyhow::Result<Scenario> {
        let args = Args::try_parse_from(std::iter::once("hatt-bench").chain(argv.iter().copied()))?;
        cli_parse(&args)
    }

    #[test]
    fn seeds_list() {
        let sc = parse(&["--scenario", "example1", "--seeds", "1,2,3"]).unwrap();
        assert_eq!(sc.seeds, vec![1, 2, 3]);
        assert_eq!(sc.kind, ScenarioKind::Example1);
    }

    #[test]
    fn variant_rules() {
        assert!(parse(&["--algorithms", "hatt-2", "--variant", "svd"]).is_err());
        assert!(parse(&["--algorithms", "hatt-1", "--variant", "direct"]).is_err());
        assert!(parse(&["--algorithms", "tt-rounding", "--variant", "svd"]).is_err());
        let sc = parse(&[
            "--algorithms",
            "hatt",
            "--variant",
            "svd",
            "--max-terms",
            "5",
        ])
        .unwrap();
        assert_eq!(
            sc.algorithms,
            vec![Recompressor::Hatt(HpcrlVariant::svd(Some(5)))]
        );
        assert!(parse(&["--algorithms", "hatt-2", "--max-terms", "5"]).is_err());
    }

    #[test]
    fn caps_and_overrides() {
        let sc = parse(&[
            "--scenario",
            "example2",
            "--dense-cap",
            "2e6",
            "--ranks",
            "10,20",
            "--d",
            "4",
        ])
        .unwrap();
        assert_eq!(sc.limits.core_elements, 2_000_000);
        assert_eq!(sc.ranks, vec![10, 20]);
        assert_eq!(sc.orders, vec![4]);
        assert!(parse(&["--dense-cap", "0"]).is_err());
    }

    #[test]
    fn malformed_input_rejected() {
        assert!(parse(&["--bogus"]).is_err());
        assert!(parse(&["--seeds", "1,x"]).is_err());
        assert!(parse(&["--seeds", "4,4"]).is_err());
        assert!(parse(&["--scenario", "example9"]).is_err());
        assert!(parse(&["--scenario", "example3", "--functions", "rastrigin"]).is_err());
    }
}
