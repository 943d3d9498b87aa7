use crate::apps::{
    brute_force_max, fourier_tt, hilbert_tt, power_iteration_max, separable_tt, FourierSpec,
    SeparableSpec,
};
use crate::bench::{ResultRow, Scenario, ScenarioKind, ERROR_MARKER};
use crate::error::{Error, Result};
use crate::linalg::FlopLedger;
use crate::random::{random_tt, Distribution, RandomSpec};
use crate::recompress::{
    flop_model, model_params, run_hadamard, ModelParams, Recompressor, Reference,
};
use crate::tensor::{
    hadamard_dense, tt_hadamard_with_limits, tt_to_dense_with_limits, DenseTensor, Limits,
    RankChain, Shape, TtTensor,
};

/// Seed for the `slot`-th generated input of a run with seed `seed`.
fn input_seed(seed: u64, slot: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(slot)
}

enum OwnedReference {
    Dense(DenseTensor<f64>),
    Tt(TtTensor<f64>),
    Missing,
}

impl OwnedReference {
    fn build(y: &TtTensor<f64>, z: &TtTensor<f64>, limits: &Limits) -> Result<Self> {
        let dense = tt_to_dense_with_limits(y, limits)
            .and_then(|dy| hadamard_dense(&dy, &tt_to_dense_with_limits(z, limits)?));
        match dense {
            Ok(d) => return Ok(Self::Dense(d)),
            Err(e) if !e.is_resource() => return Err(e),
            Err(_) => {}
        }
        match tt_hadamard_with_limits(y, z, limits) {
            Ok(t) => Ok(Self::Tt(t)),
            Err(e) if e.is_resource() => {
                log::warn!("no reference fits the limits; errors left blank");
                Ok(Self::Missing)
            }
            Err(e) => Err(e),
        }
    }

    fn as_ref(&self, limits: &Limits) -> Option<Reference<'_, f64>> {
        match self {
            Self::Dense(d) => Some(Reference::Dense(d, *limits)),
            Self::Tt(t) => Some(Reference::Tt(t)),
            Self::Missing => None,
        }
    }
}

struct Inputs<'a> {
    scenario: &'a str,
    y: &'a TtTensor<f64>,
    z: &'a TtTensor<f64>,
    seed: u64,
}

fn error_row(
    scenario: &str,
    alg: Recompressor,
    p: &ModelParams,
    seed: u64,
    predicted: u64,
    e: &Error,
) -> ResultRow {
    ResultRow {
        scenario: scenario.to_string(),
        algorithm: alg.algorithm().name().to_string(),
        d: p.d,
        n: p.n,
        r: p.r,
        s: p.s,
        ell: p.ell,
        seed,
        rel_error: None,
        wall_time_s: 0.0,
        flops_measured: 0,
        flops_predicted: predicted,
        output_ranks: format!("{ERROR_MARKER}{}", e.kind()),
    }
}

/// All `targets × algorithms` runs for one input pair.
fn hadamard_rows(sc: &Scenario, inp: &Inputs<'_>) -> Result<Vec<ResultRow>> {
    let reference = OwnedReference::build(inp.y, inp.z, &sc.limits)?;
    let d = inp.y.order();
    let mut rows = Vec::with_capacity(sc.targets.len() * sc.algorithms.len());
    for &ell in &sc.targets {
        let targets = RankChain::uniform(d, ell)?;
        for &alg in &sc.algorithms {
            let p = model_params(inp.y, inp.z, &targets, alg.max_terms());
            match run_hadamard(
                alg,
                inp.y,
                inp.z,
                &targets,
                inp.seed,
                &sc.limits,
                reference.as_ref(&sc.limits),
            ) {
                Ok((_, rep)) => rows.push(ResultRow {
                    scenario: inp.scenario.to_string(),
                    algorithm: rep.algorithm.name().to_string(),
                    d: p.d,
                    n: p.n,
                    r: p.r,
                    s: p.s,
                    ell,
                    seed: inp.seed,
                    rel_error: rep.rel_error,
                    wall_time_s: rep.wall_time_s,
                    flops_measured: rep.flops_measured.measured(),
                    flops_predicted: rep.flops_predicted,
                    output_ranks: rep.output_ranks.to_string(),
                }),
                Err(e) if e.is_resource() => {
                    log::warn!(
                        "{} {} seed {}: {e}",
                        inp.scenario,
                        alg.algorithm(),
                        inp.seed
                    );
                    let predicted = flop_model(alg.algorithm(), &p).unwrap_or(0);
                    rows.push(error_row(inp.scenario, alg, &p, inp.seed, predicted, &e));
                }
                Err(e) => return Err(e),
            }
        }
    }
    Ok(rows)
}

/// Runs `job` once per seed, concurrently unless `sequential`, and
/// concatenates the rows in seed order.
fn per_seed<F>(seeds: &[u64], sequential: bool, job: F) -> Result<Vec<ResultRow>>
where
    F: Fn(u64) -> Result<Vec<ResultRow>> + Sync,
{
    let results: Vec<Result<Vec<ResultRow>>> = if sequential || seeds.len() < 2 {
        seeds.iter().map(|&s| job(s)).collect()
    } else {
        std::thread::scope(|scope| {
            let handles: Vec<_> = seeds
                .iter()
                .map(|&s| {
                    let job = &job;
                    scope.spawn(move || job(s))
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
                .collect()
        })
    };
    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    Ok(rows)
}

/// Fourier pair, one problem per seed.
pub fn run_example1(sc: &Scenario) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &d in &sc.orders {
        let shape = Shape::uniform(d, sc.n)?;
        rows.extend(per_seed(&sc.seeds, sc.sequential, |seed| {
            let spec = FourierSpec::random(shape.clone(), sc.harmonics, seed);
            let (y, z) = fourier_tt::<f64>(&spec, &sc.limits, &mut FlopLedger::new())?;
            hadamard_rows(
                sc,
                &Inputs {
                    scenario: sc.kind.name(),
                    y: &y,
                    z: &z,
                    seed,
                },
            )
        })?);
    }
    Ok(rows)
}

fn random_pair_rows(sc: &Scenario, kind: Distribution) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &d in &sc.orders {
        let shape = Shape::uniform(d, sc.n)?;
        for &r in &sc.ranks {
            let chain = RankChain::uniform(d, r)?;
            rows.extend(per_seed(&sc.seeds, sc.sequential, |seed| {
                let make = |slot| {
                    random_tt::<f64>(&RandomSpec {
                        shape: shape.clone(),
                        ranks: chain.clone(),
                        kind,
                        seed: input_seed(seed, slot),
                    })
                };
                let (y, z) = (make(1)?, make(2)?);
                hadamard_rows(
                    sc,
                    &Inputs {
                        scenario: sc.kind.name(),
                        y: &y,
                        z: &z,
                        seed,
                    },
                )
            })?);
        }
    }
    Ok(rows)
}

/// Uniform random TT pairs over the rank sweep.
pub fn run_example2(sc: &Scenario) -> Result<Vec<ResultRow>> {
    random_pair_rows(sc, Distribution::Uniform)
}

/// Gaussian random TT pairs with user-chosen sizes.
pub fn run_custom(sc: &Scenario) -> Result<Vec<ResultRow>> {
    random_pair_rows(sc, Distribution::Gaussian)
}

/// Hilbert-type `Y ⊙ Y` over the target sweep.
pub fn run_appendix_f(sc: &Scenario) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &d in &sc.orders {
        for &r in &sc.ranks {
            let y = hilbert_tt::<f64>(d, sc.n, r)?;
            rows.extend(per_seed(&sc.seeds, sc.sequential, |seed| {
                hadamard_rows(
                    sc,
                    &Inputs {
                        scenario: sc.kind.name(),
                        y: &y,
                        z: &y,
                        seed,
                    },
                )
            })?);
        }
    }
    Ok(rows)
}

/// Power iteration for the largest entry of each test function. The
/// scenario column reads `example3-<function>`; `r` is the rank of the
/// function tensor, `rel_error` the distance to the exhaustive maximum.
pub fn run_example3(sc: &Scenario) -> Result<Vec<ResultRow>> {
    let mut rows = Vec::new();
    for &d in &sc.orders {
        for &kind in &sc.functions {
            let spec = SeparableSpec { kind, d, n: sc.n };
            let y = separable_tt::<f64>(&spec)?;
            let oracle = match spec.dense::<f64>(&sc.limits) {
                Ok(dense) => Some(brute_force_max(&dense)?.0),
                Err(e) if e.is_resource() => {
                    log::warn!("example3 {} d={d}: no dense oracle", kind.name());
                    None
                }
                Err(e) => return Err(e),
            };
            let label = format!("{}-{}", sc.kind.name(), kind.name());
            let r = y.ranks().max();
            rows.extend(per_seed(&sc.seeds, sc.sequential, |seed| {
                let mut out = Vec::new();
                for &ell in &sc.targets {
                    for &alg in &sc.algorithms {
                        let p = ModelParams {
                            d,
                            n: sc.n,
                            r,
                            s: ell,
                            ell,
                            terms: alg.max_terms(),
                        };
                        let per_iter = flop_model(alg.algorithm(), &p)?;
                        let mut ledger = FlopLedger::new();
                        let start = std::time::Instant::now();
                        match power_iteration_max(
                            &y,
                            ell,
                            sc.max_iter,
                            alg,
                            seed,
                            &sc.limits,
                            &mut ledger,
                        ) {
                            Ok(res) => out.push(ResultRow {
                                scenario: label.clone(),
                                algorithm: alg.algorithm().name().to_string(),
                                d,
                                n: sc.n,
                                r,
                                s: ell,
                                ell,
                                seed,
                                rel_error: oracle.map(|m| ((res.estimate - m) / m).abs()),
                                wall_time_s: start.elapsed().as_secs_f64(),
                                flops_measured: ledger.measured(),
                                flops_predicted: per_iter * res.iterations_used as u64,
                                output_ranks: res.ranks.to_string(),
                            }),
                            Err(e) if e.is_resource() || matches!(e, Error::Convergence(_)) => {
                                log::warn!("{label} {} seed {seed}: {e}", alg.algorithm());
                                out.push(error_row(&label, alg, &p, seed, 0, &e));
                            }
                            Err(e) => return Err(e),
                        }
                    }
                }
                Ok(out)
            })?);
        }
    }
    Ok(rows)
}

pub fn run_scenario(sc: &Scenario) -> Result<Vec<ResultRow>> {
    sc.validate()?;
    match sc.kind {
        ScenarioKind::Example1 => run_example1(sc),
        ScenarioKind::Example2 => run_example2(sc),
        ScenarioKind::Example3 => run_example3(sc),
        ScenarioKind::AppendixF => run_appendix_f(sc),
        ScenarioKind::Custom => run_custom(sc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::recompress::HpcrlVariant;

    fn small(kind: ScenarioKind) -> Scenario {
        let mut s = Scenario::defaults(kind);
        s.seeds = vec![1, 2];
        s
    }

    #[test]
    fn example1_complete_and_deterministic() {
        let mut sc = small(ScenarioKind::Example1);
        sc.orders = vec![3];
        sc.n = 6;
        sc.harmonics = 3;
        sc.targets = vec![2, 4];
        let a = run_scenario(&sc).unwrap();
        assert_eq!(a.len(), 2 * 2 * 4);
        assert!(a
            .iter()
            .all(|r| !r.is_error() && r.rel_error.unwrap() >= 0.0));
        sc.sequential = true;
        let b = run_scenario(&sc).unwrap();
        let strip = |v: &[ResultRow]| {
            v.iter()
                .map(|r| ResultRow {
                    wall_time_s: 0.0,
                    ..r.clone()
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&a), strip(&b));
    }

    #[test]
    fn example2_cap_marks_baselines_only() {
        let mut sc = small(ScenarioKind::Example2);
        sc.orders = vec![3];
        sc.n = 3;
        sc.ranks = vec![6];
        sc.targets = vec![3];
        sc.limits.core_elements = 6 * 6 * 3 * 6 * 6 - 1;
        let rows = run_scenario(&sc).unwrap();
        for row in &rows {
            let baseline = row.algorithm == "tt-rounding" || row.algorithm == "rand-orth";
            assert_eq!(row.is_error(), baseline, "{row:?}");
            if baseline {
                assert_eq!(row.output_ranks, "ERR:resource");
            }
        }
    }

    #[test]
    fn example3_rows_against_oracle() {
        let mut sc = small(ScenarioKind::Example3);
        sc.orders = vec![3];
        sc.n = 5;
        sc.targets = vec![3];
        sc.max_iter = 40;
        sc.algorithms = vec![
            Recompressor::TtRounding,
            Recompressor::Hatt(HpcrlVariant::Direct),
        ];
        let rows = run_scenario(&sc).unwrap();
        assert_eq!(rows.len(), 2 * 2 * 2);
        assert!(rows.iter().all(|r| r.rel_error.unwrap() <= 1e-3));
        assert!(rows.iter().any(|r| r.scenario == "example3-alpine"));
    }

    #[test]
    fn appendix_f_small() {
        let mut sc = small(ScenarioKind::AppendixF);
        sc.orders = vec![3];
        sc.n = 4;
        sc.ranks = vec![4];
        sc.targets = vec![3];
        let rows = run_scenario(&sc).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows.iter().all(|r| r.r == 4 && r.s == 4));
    }
}
