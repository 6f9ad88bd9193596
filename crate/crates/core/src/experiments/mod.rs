//! Replicated Monte Carlo runs over a list of intensities.
//!
//! Replicate r at intensity index i is driven by
//! `replicate_seed(base_seed, i, r)` alone, and results are collected in
//! (i, r) order, so output does not depend on the worker count.

mod persist;

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::density::{verify_poisson_conditions, ConditionReport, Density, MassRadii, Tolerances};
use crate::error::{Error, Result};
use crate::graph::{build_digraph, connectivity_radii, enhance, is_connected, DiGraph, UndirectedGraph};
use crate::norm::{Norm, NormSpec};
use crate::sampling::{replicate_seed, sample_process, PointSample, SampleSpec, RNG_ID};
use crate::stats::{
    chi_square_poisson, count_isolated, critical_cutoffs, degree_bounds, histogram, tv_distance_to_poisson,
    ChiSquareFit, DegreeBounds, DegreeSummary, Summary,
};

pub use persist::{load, persist, read_rows, write_rows, CSV_HEADER, SCHEMA_VERSION};

/// Bins of a chi-square fit must expect at least this many observations.
pub const CHI_SQUARE_MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    SweepCutoff,
    PoissonLimit,
    DegreeSweep,
    Connectivity,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::SweepCutoff => "sweep-cutoff",
            Experiment::PoissonLimit => "poisson-limit",
            Experiment::DegreeSweep => "degree-sweep",
            Experiment::Connectivity => "connectivity",
        }
    }
}

/// One replicate; fields that an experiment does not measure are empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub experiment: Experiment,
    pub replicate: usize,
    pub n: f64,
    #[serde(rename = "N")]
    pub count: usize,
    /// c, β or ε depending on the experiment.
    pub c_or_beta: Option<f64>,
    #[serde(rename = "W")]
    pub w: Option<usize>,
    #[serde(rename = "W_tilde")]
    pub w_tilde: Option<usize>,
    pub d_n: Option<f64>,
    pub d_tilde_n: Option<f64>,
    #[serde(rename = "Delta")]
    pub max_degree: Option<usize>,
    #[serde(rename = "delta")]
    pub min_degree: Option<usize>,
    pub connected: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExclusionReason {
    /// The statistic has no finite value on this realization.
    Unattainable,
    /// An error aborted the replicate; `message` says which.
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub n_index: usize,
    pub n: f64,
    pub replicate: usize,
    pub seed: u64,
    pub reason: ExclusionReason,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub n_index: usize,
    pub replicate: usize,
    pub seed: u64,
}

/// Out-degree of a vertex added at a fixed location.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeDegrees {
    pub location: Vec<f64>,
    pub radius: f64,
    /// Poisson mean c log n of the out-degree.
    pub expected_mean: f64,
    pub degrees: Vec<u64>,
    pub histogram: Vec<u64>,
    pub summary: Summary,
    /// Absent when there are too few replicates to form two bins.
    pub chi_square: Option<ChiSquareFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub n: f64,
    /// Replicates that produced a row.
    pub rows: usize,
    #[serde(rename = "N")]
    pub count: Option<Summary>,
    #[serde(rename = "W")]
    pub w: Option<Summary>,
    #[serde(rename = "W_tilde")]
    pub w_tilde: Option<Summary>,
    pub d_n: Option<Summary>,
    pub d_tilde_n: Option<Summary>,
    #[serde(rename = "Delta")]
    pub max_degree: Option<Summary>,
    #[serde(rename = "delta")]
    pub min_degree: Option<Summary>,
    pub connected_fraction: Option<f64>,
    pub extras: Extras,
}

/// Experiment-specific results for one intensity.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Extras {
    /// Histogram of W and its Poisson reference mean e^{−β}.
    pub w_histogram: Option<Vec<u64>>,
    pub poisson_mean: Option<f64>,
    pub tv_to_poisson: Option<f64>,
    pub degree_bounds: Option<DegreeBounds>,
    /// Fraction of rows with Δ_n above upper_slack · c H₊⁻¹(1/c) log n.
    pub upper_violation_rate: Option<f64>,
    /// Fraction of rows with δ_n below lower_slack · c H₋⁻¹(1/c) log n (c > 1).
    pub lower_violation_rate: Option<f64>,
    /// Fraction of rows with δ_n = 0.
    pub zero_min_degree_rate: Option<f64>,
    /// Edge count divided by n, whose expectation is c log n.
    pub out_degree_per_intensity: Option<Summary>,
    pub probes: Vec<ProbeDegrees>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub schema_version: u32,
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    /// Command-line values that replaced configuration entries.
    pub overrides: BTreeMap<String, String>,
    pub rng: String,
    pub base_seed: u64,
    pub tolerances: Tolerances,
    pub seeds: Vec<SeedRecord>,
    pub excluded: Vec<Exclusion>,
    pub aggregates: Vec<Aggregate>,
    /// Persisted as CSV rather than in the sidecar.
    #[serde(skip)]
    pub rows: Vec<Row>,
}

impl SweepResult {
    /// Rows at intensity index `n_index`.
    pub fn rows_at(&self, n_index: usize) -> impl Iterator<Item = &Row> + '_ {
        let n = self.config.n_list[n_index];
        self.rows.iter().filter(move |r| r.n == n)
    }

    /// Per-intensity values of an aggregate statistic, e.g. `|a| a.d_n.as_ref().map(|s| s.mean)`.
    pub fn series(&self, f: impl Fn(&Aggregate) -> Option<f64>) -> Vec<Option<f64>> {
        self.aggregates.iter().map(f).collect()
    }
}

/// v[k+1] ≤ v[k] + slack for every k.
pub fn is_nonincreasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] <= w[0] + slack)
}

/// v[k+1] ≥ v[k] − slack for every k.
pub fn is_nondecreasing(values: &[f64], slack: f64) -> bool {
    values.windows(2).all(|w| w[1] >= w[0] - slack)
}

struct Measured {
    row: Row,
    edges: Option<usize>,
    probe_degrees: Vec<u64>,
}

enum Outcome {
    Done(Box<Measured>),
    Unattainable(String),
}

struct Context<'a> {
    experiment: Experiment,
    config: &'a ExperimentConfig,
    density: &'a Density,
    norm: NormSpec,
    /// Radius solvers per intensity for the fixed-mass experiments.
    radii: Vec<Option<MassRadii<'a>>>,
}

struct GraphStats {
    w: usize,
    w_tilde: usize,
    max_degree: usize,
    min_degree: usize,
    connected: bool,
    edges: usize,
}

fn graph_stats(g: &DiGraph, u: &UndirectedGraph) -> GraphStats {
    let s = DegreeSummary::of(g);
    GraphStats {
        w: s.zero_out_degree,
        w_tilde: count_isolated(u),
        max_degree: s.max_out_degree,
        min_degree: s.min_out_degree,
        connected: is_connected(u),
        edges: g.edge_count(),
    }
}

fn empty_row(experiment: Experiment, replicate: usize, sample: &PointSample) -> Row {
    Row {
        experiment,
        replicate,
        n: sample.spec.n,
        count: sample.count(),
        c_or_beta: None,
        w: None,
        w_tilde: None,
        d_n: None,
        d_tilde_n: None,
        max_degree: None,
        min_degree: None,
        connected: None,
    }
}

impl Context<'_> {
    fn run(&self, n_index: usize, replicate: usize, seed: u64) -> Result<Outcome> {
        let n = self.config.n_list[n_index];
        let sample = sample_process(self.density, SampleSpec::new(n, seed))?;
        let mut row = empty_row(self.experiment, replicate, &sample);
        let mut edges = None;
        let mut probe_degrees = Vec::new();
        match self.experiment {
            Experiment::SweepCutoff => {
                let r = critical_cutoffs(&sample.points, n, self.density, &self.norm, &self.config.tolerances)?;
                match (r.d_n.value(), r.d_tilde_n.value()) {
                    (Some(d), Some(dt)) => {
                        row.d_n = Some(d);
                        row.d_tilde_n = Some(dt);
                    }
                    _ => {
                        return Ok(Outcome::Unattainable(format!(
                            "{} points: no level gives every vertex a neighbour",
                            sample.count()
                        )))
                    }
                }
            }
            Experiment::PoissonLimit | Experiment::DegreeSweep | Experiment::Connectivity => {
                let radii = match (&self.radii[n_index], self.experiment) {
                    (_, Experiment::Connectivity) => {
                        connectivity_radii(&sample.points, self.density, &self.norm, self.config.epsilon, n)?.radii
                    }
                    (Some(solver), _) => solver.radii(sample.points.coords())?,
                    (None, _) => unreachable!("radius solver built for every intensity"),
                };
                let g = build_digraph(&sample.points, &radii, &self.norm)?;
                let u = enhance(&g);
                let s = graph_stats(&g, &u);
                row.c_or_beta = Some(match self.experiment {
                    Experiment::PoissonLimit => self.config.beta,
                    Experiment::DegreeSweep => self.config.c,
                    _ => self.config.epsilon,
                });
                row.w = Some(s.w);
                row.w_tilde = Some(s.w_tilde);
                row.max_degree = Some(s.max_degree);
                row.min_degree = Some(s.min_degree);
                if self.experiment != Experiment::PoissonLimit {
                    row.connected = Some(s.connected);
                }
                edges = Some(s.edges);
                if self.experiment == Experiment::DegreeSweep {
                    let solver = self.radii[n_index].as_ref().expect("degree sweep has radii");
                    for x0 in &self.config.degree.probes {
                        let r0 = solver.radius(x0)?;
                        let hits = sample.points.iter().filter(|p| self.norm.distance(x0, p) <= r0).count();
                        probe_degrees.push(hits as u64);
                    }
                }
            }
        }
        Ok(Outcome::Done(Box::new(Measured {
            row,
            edges,
            probe_degrees,
        })))
    }
}

fn thread_pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn run(experiment: Experiment, config: &ExperimentConfig) -> Result<SweepResult> {
    config.validate()?;
    let density = config.build_density()?;
    let norm = config.norm_spec()?;
    let tol = &config.tolerances;
    let radii = config
        .n_list
        .iter()
        .map(|&n| match experiment {
            Experiment::PoissonLimit => MassRadii::for_beta(&density, norm, config.beta, n, tol).map(Some),
            Experiment::DegreeSweep => MassRadii::for_c(&density, norm, config.c, n, tol).map(Some),
            Experiment::SweepCutoff | Experiment::Connectivity => Ok(None),
        })
        .collect::<Result<Vec<_>>>()?;
    if experiment == Experiment::Connectivity {
        if norm.norm != Norm::LInf {
            return Err(Error::UnsupportedNorm { required: "l_inf" });
        }
        if density.marginals().is_none() {
            return Err(Error::NotProductDensity);
        }
        if density.dim() < 2 {
            return Err(Error::Config("connectivity needs dimension at least 2".into()));
        }
    }
    let ctx = Context {
        experiment,
        config,
        density: &density,
        norm,
        radii,
    };

    let jobs: Vec<SeedRecord> = (0..config.n_list.len())
        .flat_map(|n_index| {
            (0..config.replicates).map(move |replicate| SeedRecord {
                n_index,
                replicate,
                seed: replicate_seed(config.base_seed, n_index, replicate),
            })
        })
        .collect();
    let outcomes: Vec<Result<Outcome>> = thread_pool(config.workers)?.install(|| {
        jobs.par_iter()
            .map(|job| ctx.run(job.n_index, job.replicate, job.seed))
            .collect()
    });

    let mut rows = Vec::new();
    let mut measured: Vec<Vec<Measured>> = (0..config.n_list.len()).map(|_| Vec::new()).collect();
    let mut excluded = Vec::new();
    for (job, outcome) in jobs.iter().zip(outcomes) {
        let exclusion = |reason, message| Exclusion {
            n_index: job.n_index,
            n: config.n_list[job.n_index],
            replicate: job.replicate,
            seed: job.seed,
            reason,
            message,
        };
        match outcome {
            Ok(Outcome::Done(m)) => {
                rows.push(m.row.clone());
                measured[job.n_index].push(*m);
            }
            Ok(Outcome::Unattainable(msg)) => excluded.push(exclusion(ExclusionReason::Unattainable, msg)),
            Err(e) => {
                log::warn!(
                    "{} replicate {} at n = {} failed (seed {}): {e}",
                    experiment.as_str(),
                    job.replicate,
                    config.n_list[job.n_index],
                    job.seed
                );
                excluded.push(exclusion(ExclusionReason::Failed, e.to_string()));
            }
        }
    }

    let aggregates = config
        .n_list
        .iter()
        .zip(&measured)
        .zip(&ctx.radii)
        .map(|((&n, m), solver)| aggregate(experiment, config, n, m, solver.as_ref()))
        .collect::<Result<Vec<_>>>()?;

    Ok(SweepResult {
        schema_version: SCHEMA_VERSION,
        experiment,
        config: config.clone(),
        overrides: BTreeMap::new(),
        rng: RNG_ID.to_string(),
        base_seed: config.base_seed,
        tolerances: config.tolerances,
        seeds: jobs,
        excluded,
        aggregates,
        rows,
    })
}

fn summary_of(rows: &[&Row], f: impl Fn(&Row) -> Option<f64>) -> Option<Summary> {
    let values: Vec<f64> = rows.iter().filter_map(|r| f(r)).collect();
    Summary::of(&values)
}

fn as_f64(v: usize) -> f64 {
    v as f64
}

fn fraction(rows: &[&Row], f: impl Fn(&Row) -> bool) -> Option<f64> {
    (!rows.is_empty()).then(|| rows.iter().filter(|r| f(r)).count() as f64 / rows.len() as f64)
}

/// Per-intensity aggregate. Everything except `extras.out_degree_per_intensity`
/// and `extras.probes` is a function of the rows alone.
fn aggregate(
    experiment: Experiment,
    config: &ExperimentConfig,
    n: f64,
    measured: &[Measured],
    solver: Option<&MassRadii<'_>>,
) -> Result<Aggregate> {
    let rows: Vec<&Row> = measured.iter().map(|m| &m.row).collect();
    let mut extras = Extras::default();
    let ln_n = n.ln();
    match experiment {
        Experiment::PoissonLimit if !rows.is_empty() => {
            let w: Vec<u64> = rows.iter().filter_map(|r| r.w.map(|v| v as u64)).collect();
            let counts = histogram(&w);
            let mean = (-config.beta).exp();
            extras.tv_to_poisson = Some(tv_distance_to_poisson(&counts, mean)?);
            extras.w_histogram = Some(counts);
            extras.poisson_mean = Some(mean);
        }
        Experiment::DegreeSweep if !rows.is_empty() => {
            let bounds = degree_bounds(config.c, n)?;
            let slack = &config.degree;
            extras.upper_violation_rate = fraction(&rows, |r| {
                r.max_degree
                    .is_some_and(|d| d as f64 > slack.upper_slack * bounds.upper)
            });
            extras.lower_violation_rate = bounds.lower.and_then(|lower| {
                fraction(&rows, |r| {
                    r.min_degree.is_some_and(|d| (d as f64) < slack.lower_slack * lower)
                })
            });
            extras.zero_min_degree_rate = fraction(&rows, |r| r.min_degree == Some(0));
            extras.degree_bounds = Some(bounds);
            let per_n: Vec<f64> = measured.iter().filter_map(|m| m.edges).map(|e| e as f64 / n).collect();
            extras.out_degree_per_intensity = Summary::of(&per_n);
            if let Some(solver) = solver {
                for (k, x0) in config.degree.probes.iter().enumerate() {
                    let degrees: Vec<u64> = measured.iter().map(|m| m.probe_degrees[k]).collect();
                    let counts = histogram(&degrees);
                    let expected_mean = config.c * ln_n;
                    let values: Vec<f64> = degrees.iter().map(|&d| d as f64).collect();
                    extras.probes.push(ProbeDegrees {
                        location: x0.clone(),
                        radius: solver.radius(x0)?,
                        expected_mean,
                        chi_square: chi_square_poisson(&counts, expected_mean, CHI_SQUARE_MIN_EXPECTED).ok(),
                        summary: Summary::of(&values).expect("non-empty"),
                        histogram: counts,
                        degrees,
                    });
                }
            }
        }
        _ => {}
    }
    let connected_fraction = match experiment {
        Experiment::DegreeSweep | Experiment::Connectivity => fraction(&rows, |r| r.connected == Some(true)),
        _ => None,
    };
    Ok(Aggregate {
        n,
        rows: rows.len(),
        count: summary_of(&rows, |r| Some(as_f64(r.count))),
        w: summary_of(&rows, |r| r.w.map(as_f64)),
        w_tilde: summary_of(&rows, |r| r.w_tilde.map(as_f64)),
        d_n: summary_of(&rows, |r| r.d_n),
        d_tilde_n: summary_of(&rows, |r| r.d_tilde_n),
        max_degree: summary_of(&rows, |r| r.max_degree.map(as_f64)),
        min_degree: summary_of(&rows, |r| r.min_degree.map(as_f64)),
        connected_fraction,
        extras,
    })
}

/// d_n and d̃_n for every replicate.
pub fn run_cutoff_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    run(Experiment::SweepCutoff, config)
}

/// Isolated-vertex counts W_n at ball mass (log n + β)/n, with their
/// histogram and distance to Poisson(e^{−β}).
pub fn run_poisson_limit(config: &ExperimentConfig) -> Result<SweepResult> {
    run(Experiment::PoissonLimit, config)
}

/// Extreme out-degrees at ball mass c log n / n against their bounds, plus
/// the out-degree of probe vertices when `degree.probes` is set.
pub fn run_degree_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    run(Experiment::DegreeSweep, config)
}

/// Connectivity of the symmetrized graph under the product-density ℓ_∞ radii.
pub fn run_connectivity(config: &ExperimentConfig) -> Result<SweepResult> {
    run(Experiment::Connectivity, config)
}

pub fn run_verify_conditions(config: &ExperimentConfig) -> Result<ConditionReport> {
    config.validate()?;
    let density = config.build_density()?;
    verify_poisson_conditions(
        &density,
        &config.norm_spec()?,
        config.alpha,
        config.beta,
        &config.n_list,
        config.conditions.grid_size,
        &config.tolerances,
    )
}

/// A single realization at fixed c with both graphs.
#[derive(Debug, Clone)]
pub struct Realization {
    pub sample: PointSample,
    pub radii: Vec<f64>,
    pub graph: DiGraph,
    pub enhanced: UndirectedGraph,
    pub row: Row,
}

/// Samples at `n` with `seed`, assigns radii at ball mass c log n / n and
/// builds both graphs. The row carries every statistic including d_n and d̃_n.
pub fn build_one(config: &ExperimentConfig, n: f64, seed: u64) -> Result<Realization> {
    config.validate()?;
    let density = config.build_density()?;
    let norm = config.norm_spec()?;
    let sample = sample_process(&density, SampleSpec::new(n, seed))?;
    let radii = MassRadii::for_c(&density, norm, config.c, n, &config.tolerances)?.radii(sample.points.coords())?;
    let graph = build_digraph(&sample.points, &radii, &norm)?;
    let enhanced = enhance(&graph);
    let s = graph_stats(&graph, &enhanced);
    let cut = critical_cutoffs(&sample.points, n, &density, &norm, &config.tolerances)?;
    let mut row = empty_row(Experiment::DegreeSweep, 0, &sample);
    row.c_or_beta = Some(config.c);
    row.w = Some(s.w);
    row.w_tilde = Some(s.w_tilde);
    row.d_n = cut.d_n.value();
    row.d_tilde_n = cut.d_tilde_n.value();
    row.max_degree = Some(s.max_degree);
    row.min_degree = Some(s.min_degree);
    row.connected = Some(s.connected);
    Ok(Realization {
        sample,
        radii,
        graph,
        enhanced,
        row,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::DensitySpec;

    fn uniform(n_list: Vec<f64>, replicates: usize) -> ExperimentConfig {
        let mut c = ExperimentConfig::new(DensitySpec::UniformCube { dim: 2 }, Norm::LInf, n_list, replicates, 7);
        c.workers = Some(1);
        c
    }

    #[test]
    fn cutoff_rows_are_ordered_and_bounded() {
        let r = run_cutoff_sweep(&uniform(vec![200.0, 400.0], 3)).unwrap();
        assert_eq!(r.rows.len() + r.excluded.len(), 6);
        assert_eq!(r.seeds.len(), 6);
        for (k, row) in r.rows.iter().enumerate() {
            assert_eq!(row.replicate, k % 3);
            assert!(row.d_tilde_n.unwrap() <= row.d_n.unwrap());
            assert!(row.w.is_none() && row.connected.is_none());
        }
        assert_eq!(r.aggregates.len(), 2);
        assert_eq!(r.aggregates[1].d_n.as_ref().unwrap().count, 3);
    }

    #[test]
    fn worker_count_does_not_change_rows() {
        let mut c = uniform(vec![300.0], 4);
        let one = run_degree_sweep(&c).unwrap();
        c.workers = Some(3);
        let three = run_degree_sweep(&c).unwrap();
        assert_eq!(one.rows, three.rows);
        assert_eq!(one.aggregates, three.aggregates);
    }

    #[test]
    fn single_point_realizations_are_excluded() {
        // n just above 1: most realizations have fewer than two points.
        let r = run_cutoff_sweep(&uniform(vec![1.5], 20)).unwrap();
        assert!(!r.excluded.is_empty());
        assert!(r.excluded.iter().all(|e| e.reason == ExclusionReason::Unattainable));
        assert_eq!(r.rows.len() + r.excluded.len(), 20);
    }

    #[test]
    fn poisson_limit_extras() {
        let mut c = uniform(vec![500.0], 10);
        c.beta = 0.5;
        let r = run_poisson_limit(&c).unwrap();
        let a = &r.aggregates[0];
        assert_eq!(a.extras.w_histogram.as_ref().unwrap().iter().sum::<u64>(), 10);
        assert!((a.extras.poisson_mean.unwrap() - (-0.5f64).exp()).abs() < 1e-15);
        assert!(a.extras.tv_to_poisson.unwrap() <= 1.0);
        assert!(r.rows.iter().all(|row| row.c_or_beta == Some(0.5)));
    }

    #[test]
    fn poisson_limit_rejects_nonpositive_level() {
        let mut c = uniform(vec![5.0], 1);
        c.beta = -2.0;
        assert!(matches!(run_poisson_limit(&c), Err(Error::NonPositiveLevel { .. })));
    }

    #[test]
    fn connectivity_needs_linf_product() {
        let mut c = uniform(vec![100.0], 1);
        c.norm = Norm::L2;
        assert!(matches!(run_connectivity(&c), Err(Error::UnsupportedNorm { .. })));
    }

    #[test]
    fn probes_count_points_in_the_ball() {
        let mut c = uniform(vec![1000.0], 5);
        c.degree.probes = vec![vec![0.5, 0.5]];
        let r = run_degree_sweep(&c).unwrap();
        let probe = &r.aggregates[0].extras.probes[0];
        assert_eq!(probe.degrees.len(), 5);
        let side = (1000f64.ln() / 1000.0).sqrt();
        assert!((probe.radius - side / 2.0).abs() < 1e-12);
    }

    #[test]
    fn build_one_row_is_consistent() {
        let c = uniform(vec![100.0], 1);
        let one = build_one(&c, 400.0, 3).unwrap();
        assert_eq!(one.row.count, one.sample.count());
        assert_eq!(one.row.w, Some(crate::stats::count_zero_outdegree(&one.graph)));
        // W = 0 exactly when c exceeds d_n.
        assert_eq!(one.row.w == Some(0), one.row.d_n.unwrap() < c.c);
    }

    #[test]
    fn trend_helpers() {
        assert!(is_nonincreasing(&[3.0, 2.0, 2.0], 0.0));
        assert!(!is_nonincreasing(&[1.0, 1.5], 0.1));
        assert!(is_nondecreasing(&[0.1, 0.5, 0.45], 0.1));
    }
}
