//! The elitist (1+1) EA on `S_n` with dual evaluation counting.
//!
//! Each iteration mutates the parent once. Easy-to-detect void offspring are
//! not evaluated; they are counted in `evals_all` but not in
//! `evals_effective`. Everything else, including hard voids, is evaluated and
//! counted under both policies. The initial evaluation counts as 1 under both.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::benchmarks::{jump_region, BenchmarkSpec, JumpRegion};
use crate::error::{Error, Result};
use crate::mutation::{MutationKind, MutationReport, OperatorSpec, VoidClass};
use crate::permutation::Permutation;
use crate::sampling::stream;

/// Starting point of a run.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initial {
    #[default]
    UniformRandom,
    Provided(Permutation),
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    benchmark: BenchmarkSpec,
    operator: OperatorSpec,
    budget: Option<u64>,
    initial: Initial,
    seed: u64,
}

impl RunConfig {
    /// `budget` caps `evals_all`; `None` runs until the optimum is found.
    /// `seed` keys the run's private random stream.
    pub fn new(
        benchmark: BenchmarkSpec,
        operator: OperatorSpec,
        budget: Option<u64>,
        initial: Initial,
        seed: u64,
    ) -> Result<Self> {
        let n = benchmark.n();
        if budget == Some(0) {
            return Err(Error::Config("budget must be at least 1".into()));
        }
        if let Initial::Provided(p) = &initial {
            if p.n() != n {
                return Err(Error::SizeMismatch {
                    left: n,
                    right: p.n(),
                });
            }
        }
        if benchmark.optimum().is_none() && budget.is_none() {
            return Err(Error::Config(
                "a benchmark without a known optimum needs a finite budget".into(),
            ));
        }
        if operator.kind() == MutationKind::Swap && n < 2 && benchmark.optimum().is_none() {
            return Err(Error::NoTransposition(n));
        }
        Ok(Self {
            benchmark,
            operator,
            budget,
            initial,
            seed,
        })
    }

    pub fn benchmark(&self) -> &BenchmarkSpec {
        &self.benchmark
    }

    pub fn operator(&self) -> &OperatorSpec {
        &self.operator
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    pub fn initial(&self) -> &Initial {
        &self.initial
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Outcome of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub success: bool,
    pub evals_all: u64,
    pub evals_effective: u64,
    pub easy_void_count: u64,
    pub hard_void_count: u64,
    pub final_fitness: f64,
    /// Parent region after each evaluation (initial one included); filled
    /// by [`trace_regions`] only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iterations_by_region: Option<BTreeMap<JumpRegion, u64>>,
    pub seed: u64,
}

impl RunRecord {
    /// Mutation iterations performed (all evaluations except the initial one).
    pub fn iterations(&self) -> u64 {
        self.evals_all - 1
    }
}

/// What an observer sees after every iteration.
#[derive(Debug)]
pub struct IterationEvent<'a> {
    /// `evals_all` after this iteration.
    pub evaluations: u64,
    pub parent_fitness_before: f64,
    /// `None` for easy voids, which are not evaluated.
    pub offspring_fitness: Option<f64>,
    pub accepted: bool,
    pub parent_fitness_after: f64,
    pub parent_before: &'a Permutation,
    pub report: &'a MutationReport,
}

pub fn run(config: &RunConfig) -> RunRecord {
    run_inner(config, false, &mut |_| {})
}

/// [`run`] with a callback after every iteration.
pub fn run_observed(config: &RunConfig, observer: &mut dyn FnMut(&IterationEvent<'_>)) -> RunRecord {
    run_inner(config, false, observer)
}

/// [`run`] on `PJump`, tallying the region of the parent after every
/// evaluation.
pub fn trace_regions(config: &RunConfig) -> Result<RunRecord> {
    if config.benchmark.jump_size().is_none() {
        return Err(Error::Config("region tracing requires a pjump benchmark".into()));
    }
    Ok(run_inner(config, true, &mut |_| {}))
}

fn run_inner(
    config: &RunConfig,
    trace: bool,
    observer: &mut dyn FnMut(&IterationEvent<'_>),
) -> RunRecord {
    let bench = &config.benchmark;
    let n = bench.n();
    let mut rng = stream(config.seed);
    let mut parent = match &config.initial {
        Initial::UniformRandom => Permutation::uniform_random(n, &mut rng),
        Initial::Provided(p) => p.clone(),
    };
    let mut offspring = parent.clone();
    let mut previous = parent.clone();

    let optimum = bench.optimum();
    let reached = |f: f64| optimum.is_some_and(|o| f >= o);
    let jump_m = bench.jump_size().filter(|_| trace);
    let mut regions = jump_m.map(|_| BTreeMap::new());
    let tally = |regions: &mut Option<BTreeMap<JumpRegion, u64>>, p: &Permutation| {
        if let (Some(map), Some(m)) = (regions.as_mut(), jump_m) {
            let r = jump_region(p, m).expect("validated jump benchmark");
            *map.entry(r).or_insert(0) += 1;
        }
    };

    let mut fitness = bench.evaluate(&parent);
    let mut evals_all = 1u64;
    let mut easy = 0u64;
    let mut hard = 0u64;
    tally(&mut regions, &parent);

    while !reached(fitness) && config.budget.is_none_or(|b| evals_all < b) {
        let report = config
            .operator
            .mutate_into(&parent, &mut offspring, &mut rng)
            .expect("operator validated against problem size");
        evals_all += 1;
        let before = fitness;
        let mut offspring_fitness = None;
        let mut accepted = false;
        match report.void_class {
            VoidClass::EasyVoid => easy += 1,
            VoidClass::HardVoid | VoidClass::NotVoid => {
                if report.void_class == VoidClass::HardVoid {
                    hard += 1;
                }
                let f = bench.evaluate(&offspring);
                offspring_fitness = Some(f);
                if f >= fitness {
                    previous.copy_from(&parent);
                    std::mem::swap(&mut parent, &mut offspring);
                    fitness = f;
                    accepted = true;
                }
            }
        }
        debug_assert!(fitness >= before, "elitism violated");
        tally(&mut regions, &parent);
        observer(&IterationEvent {
            evaluations: evals_all,
            parent_fitness_before: before,
            offspring_fitness,
            accepted,
            parent_fitness_after: fitness,
            parent_before: if accepted { &previous } else { &parent },
            report: &report,
        });
    }

    RunRecord {
        success: reached(fitness),
        evals_all,
        evals_effective: evals_all - easy,
        easy_void_count: easy,
        hard_void_count: hard,
        final_fitness: fitness,
        iterations_by_region: regions,
        seed: config.seed,
    }
}
