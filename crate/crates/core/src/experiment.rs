//! Benchmark harness: runs both engines over an instance set and writes the
//! per-run rows plus figure-style aggregates as CSV.
//!
//! Output files (all deterministic for a fixed spec):
//!
//! - `rows.csv`: one line per (instance, engine, q)
//! - `ratio.csv`: mean approximation ratio per (engine, q, n)
//! - `beatvg.csv`: mean probability of beating very greedy per (engine, q, n),
//!   instances where very greedy is already optimal excluded
//! - `cycles.csv`: cycle report per (instance, engine, q)
//!
//! Wall-clock timings go to the separate `timings.csv`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::knapsack::{
    generate_instance, lazy_greedy, read_instance, solve_exact_dp, very_greedy, InstanceClass, KnapsackInstance,
};
use crate::optimize::{layerwise_optimize, OptimizeConfig};
use crate::qaoa::{CircuitConfig, Engine, QaoaProblem};
use crate::resources::{copula_cycles, cycle_record, qtg_cycles, CycleReport, LayeredToffoliAdderModel, CYCLES_CSV_HEADER};

#[derive(Debug, Clone, PartialEq)]
pub struct GenerateSpec {
    pub class: InstanceClass,
    pub ns: Vec<usize>,
    pub per_n: usize,
    pub max_profit: u64,
    pub max_weight: u64,
    pub capacity_ratio: f64,
    pub seed: u64,
}

impl Default for GenerateSpec {
    fn default() -> Self {
        Self {
            class: InstanceClass::Uncorrelated,
            ns: vec![],
            per_n: 10,
            max_profit: 100,
            max_weight: 100,
            capacity_ratio: 0.5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum InstanceSource {
    /// Every regular file in the directory, in file-name order.
    Dir(PathBuf),
    Generate(GenerateSpec),
    Given(Vec<KnapsackInstance>),
}

/// Largest `n` each engine is run on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EngineBudgets {
    pub copula_max_n: usize,
    pub qtg_max_n: usize,
}

impl Default for EngineBudgets {
    fn default() -> Self {
        Self {
            copula_max_n: 24,
            qtg_max_n: 34,
        }
    }
}

impl EngineBudgets {
    pub fn max_n(&self, engine: Engine) -> usize {
        match engine {
            Engine::Qtg => self.qtg_max_n,
            Engine::Copula => self.copula_max_n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentSpec {
    pub source: InstanceSource,
    pub engines: Vec<Engine>,
    pub qs: Vec<usize>,
    pub circuit: CircuitConfig,
    pub optimize: OptimizeConfig,
    pub budgets: EngineBudgets,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.engines.is_empty() {
            return Err(Error::invalid("engine list is empty"));
        }
        if self.qs.is_empty() || self.qs.contains(&0) {
            return Err(Error::invalid("depth list must be non-empty with q >= 1"));
        }
        self.optimize.validate()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub instance: String,
    pub n: usize,
    pub engine: Engine,
    pub q: usize,
    pub f_final: f64,
    pub f_opt: u64,
    pub approx_ratio: f64,
    pub p_beat_vg: f64,
    pub vg_profit: u64,
    pub lg_profit: u64,
    pub vg_is_optimal: bool,
    /// Wall time of the whole layer-wise run for this (instance, engine).
    pub wall_time_ms: u128,
    pub cycles: CycleReport,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedRun {
    pub instance: String,
    pub engine: Option<Engine>,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchmarkOutcome {
    pub rows: Vec<BenchmarkRow>,
    pub skipped: Vec<SkippedRun>,
}

pub fn load_instances(source: &InstanceSource) -> Result<Vec<KnapsackInstance>> {
    let mut out = match source {
        InstanceSource::Dir(dir) => {
            let mut paths: Vec<PathBuf> = fs::read_dir(dir)?
                .map(|e| e.map(|e| e.path()))
                .collect::<std::io::Result<_>>()?;
            paths.retain(|p| p.is_file());
            paths.sort();
            paths.iter().map(|p| read_instance(p)).collect::<Result<Vec<_>>>()?
        }
        InstanceSource::Generate(g) => {
            let mut v = Vec::new();
            for &n in &g.ns {
                for i in 0..g.per_n {
                    let seed = g.seed.wrapping_mul(1_000_003).wrapping_add((n * 10_000 + i) as u64);
                    let inst = generate_instance(g.class, n, g.max_profit, g.max_weight, g.capacity_ratio, seed)?;
                    v.push(inst.with_name(format!("gen_n{n:02}_{i:03}")));
                }
            }
            v
        }
        InstanceSource::Given(v) => v.clone(),
    };
    out.sort_by(|a, b| a.name().cmp(b.name()));
    Ok(out)
}

pub fn run_benchmark(spec: &ExperimentSpec) -> Result<BenchmarkOutcome> {
    spec.validate()?;
    let instances = load_instances(&spec.source)?;
    Ok(run_on_instances(&instances, spec))
}

/// Runs every (instance, engine) pair; failures are recorded as skips and
/// never abort the batch.
pub fn run_on_instances(instances: &[KnapsackInstance], spec: &ExperimentSpec) -> BenchmarkOutcome {
    let mut outcome = BenchmarkOutcome::default();
    let mut qs = spec.qs.clone();
    qs.sort_unstable();
    qs.dedup();
    let mut engines = spec.engines.clone();
    engines.sort();
    engines.dedup();

    for inst in instances {
        let exact = match solve_exact_dp(inst) {
            Ok(s) => s,
            Err(e) => {
                outcome.skipped.push(SkippedRun {
                    instance: inst.name().to_owned(),
                    engine: None,
                    reason: e.to_string(),
                });
                continue;
            }
        };
        let lg = lazy_greedy(inst).total_profit;
        let vg = very_greedy(inst).total_profit;

        for &engine in &engines {
            match run_engine(inst, engine, &qs, exact.optimum, lg, vg, spec) {
                Ok(mut rows) => outcome.rows.append(&mut rows),
                Err(e) => outcome.skipped.push(SkippedRun {
                    instance: inst.name().to_owned(),
                    engine: Some(engine),
                    reason: e.to_string(),
                }),
            }
        }
    }
    outcome
        .rows
        .sort_by(|a, b| (&a.instance, a.engine, a.q).cmp(&(&b.instance, b.engine, b.q)));
    outcome
}

fn run_engine(
    inst: &KnapsackInstance,
    engine: Engine,
    qs: &[usize],
    f_opt: u64,
    lg: u64,
    vg: u64,
    spec: &ExperimentSpec,
) -> Result<Vec<BenchmarkRow>> {
    let max_n = spec.budgets.max_n(engine);
    if inst.n() > max_n {
        return Err(Error::ResourceLimit(format!(
            "{engine} engine limited to n <= {max_n}, instance has {}",
            inst.n()
        )));
    }
    let started = Instant::now();
    let problem = QaoaProblem::new(engine, inst, &spec.circuit)?;
    let q_max = *qs.last().expect("validated non-empty");
    // one deep run covers every shallower depth: layer i of a depth-q run is
    // computed exactly as a depth-i run would compute it
    let trace = layerwise_optimize(&problem, q_max, &spec.optimize)?;

    let mut rows = Vec::with_capacity(qs.len());
    let mut states = Vec::with_capacity(qs.len());
    for &q in qs {
        let record = &trace.layers[q - 1];
        states.push((q, problem.evolve(&record.angles)?));
    }
    let wall_time_ms = started.elapsed().as_millis();

    for (q, state) in states {
        let f_final = state.expectation();
        let cycles = match engine {
            Engine::Qtg => qtg_cycles(inst, q, &LayeredToffoliAdderModel)?,
            Engine::Copula => copula_cycles(inst.n(), q)?,
        };
        rows.push(BenchmarkRow {
            instance: inst.name().to_owned(),
            n: inst.n(),
            engine,
            q,
            f_final,
            f_opt,
            approx_ratio: if f_opt == 0 { 1.0 } else { f_final / f_opt as f64 },
            p_beat_vg: state.probability_beat_threshold(vg as i64),
            vg_profit: vg,
            lg_profit: lg,
            vg_is_optimal: vg == f_opt,
            wall_time_ms,
            cycles,
        });
    }
    Ok(rows)
}

fn fmt_f(x: f64) -> String {
    format!("{x:.12}")
}

pub const ROWS_CSV_HEADER: [&str; 12] = [
    "instance",
    "n",
    "engine",
    "q",
    "F_final",
    "f_opt",
    "approx_ratio",
    "p_beat_vg",
    "vg_profit",
    "lg_profit",
    "vg_is_optimal",
    "cycle_total",
];

pub fn write_rows_csv<W: std::io::Write>(rows: &[BenchmarkRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ROWS_CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.instance.clone(),
            r.n.to_string(),
            r.engine.to_string(),
            r.q.to_string(),
            fmt_f(r.f_final),
            r.f_opt.to_string(),
            fmt_f(r.approx_ratio),
            fmt_f(r.p_beat_vg),
            r.vg_profit.to_string(),
            r.lg_profit.to_string(),
            r.vg_is_optimal.to_string(),
            r.cycles.c_total.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One aggregate point of a figure series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesPoint {
    pub engine: Engine,
    pub q: usize,
    pub n: usize,
    pub instances: usize,
    pub mean: f64,
}

fn aggregate(rows: &[BenchmarkRow], keep: impl Fn(&BenchmarkRow) -> bool, value: impl Fn(&BenchmarkRow) -> f64) -> Vec<SeriesPoint> {
    let mut groups: BTreeMap<(Engine, usize, usize), (usize, f64)> = BTreeMap::new();
    for r in rows.iter().filter(|r| keep(r)) {
        let g = groups.entry((r.engine, r.q, r.n)).or_insert((0, 0.0));
        g.0 += 1;
        g.1 += value(r);
    }
    groups
        .into_iter()
        .map(|((engine, q, n), (count, sum))| SeriesPoint {
            engine,
            q,
            n,
            instances: count,
            mean: sum / count as f64,
        })
        .collect()
}

/// Mean approximation ratio per (engine, q, n).
pub fn ratio_series(rows: &[BenchmarkRow]) -> Vec<SeriesPoint> {
    aggregate(rows, |_| true, |r| r.approx_ratio)
}

/// Mean probability of beating very greedy per (engine, q, n), skipping
/// instances on which very greedy is already optimal.
pub fn beat_vg_series(rows: &[BenchmarkRow]) -> Vec<SeriesPoint> {
    aggregate(rows, |r| !r.vg_is_optimal, |r| r.p_beat_vg)
}

fn write_series<W: std::io::Write>(points: &[SeriesPoint], value_column: &str, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["engine", "q", "n", "instances", value_column])?;
    for p in points {
        w.write_record([
            p.engine.to_string(),
            p.q.to_string(),
            p.n.to_string(),
            p.instances.to_string(),
            fmt_f(p.mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `cycles.csv`, `ratio.csv`, `beatvg.csv` and `rows.csv` into `dir`.
pub fn report_figures(rows: &[BenchmarkRow], dir: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::invalid("no benchmark rows to report"));
    }
    fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("cycles.csv"))?;
    w.write_record(CYCLES_CSV_HEADER)?;
    for r in rows {
        w.write_record(cycle_record(&r.cycles))?;
    }
    w.flush()?;
    write_series(&ratio_series(rows), "mean_approx_ratio", fs::File::create(dir.join("ratio.csv"))?)?;
    write_series(&beat_vg_series(rows), "mean_p_beat_vg", fs::File::create(dir.join("beatvg.csv"))?)?;
    write_rows_csv(rows, fs::File::create(dir.join("rows.csv"))?)?;
    Ok(())
}

pub fn write_timings(rows: &[BenchmarkRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["instance", "engine", "q", "wall_time_ms"])?;
    for r in rows {
        w.write_record([r.instance.clone(), r.engine.to_string(), r.q.to_string(), r.wall_time_ms.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_i1() -> KnapsackInstance {
        KnapsackInstance::new("I1", vec![4, 2, 1], vec![3, 2, 1], 3).unwrap()
    }

    fn quick_spec(source: InstanceSource, engines: Vec<Engine>, qs: Vec<usize>) -> ExperimentSpec {
        ExperimentSpec {
            source,
            engines,
            qs,
            circuit: CircuitConfig::default(),
            optimize: OptimizeConfig {
                grid_points: 8,
                local_max_evals: 60,
                ..OptimizeConfig::default()
            },
            budgets: EngineBudgets::default(),
        }
    }

    #[test]
    fn fig1_qtg_row() {
        let spec = quick_spec(InstanceSource::Given(vec![tiny_i1()]), vec![Engine::Qtg], vec![1]);
        let out = run_benchmark(&spec).unwrap();
        assert!(out.skipped.is_empty());
        let row = &out.rows[0];
        assert_eq!((row.f_opt, row.vg_profit, row.lg_profit), (4, 4, 4));
        assert!(row.approx_ratio >= 0.6875 - 1e-12 && row.approx_ratio <= 1.0 + 1e-12);
        // very greedy is optimal here, so nothing beats it
        assert!(row.vg_is_optimal);
        assert_eq!(row.p_beat_vg, 0.0);
        assert!(beat_vg_series(&out.rows).is_empty());
        assert_eq!(ratio_series(&out.rows).len(), 1);
    }

    #[test]
    fn rows_are_ordered_and_budgets_skip() {
        let big = crate::knapsack::generate_random_instance(7, 20, 20, 0.5, 3).unwrap().with_name("b");
        let mut spec = quick_spec(
            InstanceSource::Given(vec![big, tiny_i1()]),
            vec![Engine::Copula, Engine::Qtg],
            vec![2, 1],
        );
        spec.budgets.copula_max_n = 5;
        let out = run_benchmark(&spec).unwrap();
        let keys: Vec<(String, Engine, usize)> =
            out.rows.iter().map(|r| (r.instance.clone(), r.engine, r.q)).collect();
        assert_eq!(
            keys,
            vec![
                ("I1".into(), Engine::Qtg, 1),
                ("I1".into(), Engine::Qtg, 2),
                ("I1".into(), Engine::Copula, 1),
                ("I1".into(), Engine::Copula, 2),
                ("b".into(), Engine::Qtg, 1),
                ("b".into(), Engine::Qtg, 2),
            ]
        );
        assert_eq!(out.skipped.len(), 1);
        assert_eq!(out.skipped[0].engine, Some(Engine::Copula));
    }

    #[test]
    fn degenerate_copula_is_skipped() {
        let all_fit = KnapsackInstance::new("fit", vec![3, 1], vec![1, 1], 5).unwrap();
        let spec = quick_spec(InstanceSource::Given(vec![all_fit]), vec![Engine::Copula, Engine::Qtg], vec![1]);
        let out = run_benchmark(&spec).unwrap();
        assert_eq!(out.rows.len(), 1);
        assert_eq!(out.skipped.len(), 1);
        assert!(out.skipped[0].reason.contains("degenerate"));
    }

    #[test]
    fn spec_validation() {
        let spec = quick_spec(InstanceSource::Given(vec![tiny_i1()]), vec![], vec![1]);
        assert!(run_benchmark(&spec).is_err());
        let spec = quick_spec(InstanceSource::Given(vec![tiny_i1()]), vec![Engine::Qtg], vec![0]);
        assert!(run_benchmark(&spec).is_err());
    }

    #[test]
    fn generated_names_sort_by_n() {
        let src = InstanceSource::Generate(GenerateSpec {
            ns: vec![10, 4],
            per_n: 2,
            ..GenerateSpec::default()
        });
        let names: Vec<String> = load_instances(&src).unwrap().iter().map(|i| i.name().to_owned()).collect();
        assert_eq!(names, ["gen_n04_000", "gen_n04_001", "gen_n10_000", "gen_n10_001"]);
    }

    #[test]
    fn figure_files() {
        let spec = quick_spec(InstanceSource::Given(vec![tiny_i1()]), vec![Engine::Qtg], vec![1]);
        let out = run_benchmark(&spec).unwrap();
        let dir = tempfile::tempdir().unwrap();
        report_figures(&out.rows, dir.path()).unwrap();
        let ratio = fs::read_to_string(dir.path().join("ratio.csv")).unwrap();
        assert_eq!(ratio.lines().count(), 2);
        let beat = fs::read_to_string(dir.path().join("beatvg.csv")).unwrap();
        assert_eq!(beat.lines().count(), 1);
        let cycles = fs::read_to_string(dir.path().join("cycles.csv")).unwrap();
        assert!(cycles.lines().nth(1).unwrap().starts_with("qtg,3,3,1,"));
        assert!(report_figures(&[], dir.path()).is_err());
    }
}
