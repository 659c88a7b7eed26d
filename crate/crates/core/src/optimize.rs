//! Angle initialization and optimization.
//!
//! Layer-wise scheme: for layer `i`, earlier layers are frozen at their
//! current values and later layers are zero (identity), `(γ_i, β_i)` is
//! initialized by a 2-D grid search, then all `2i` angles of layers `1..=i`
//! are refined jointly with a bounded Powell search.

use std::f64::consts::TAU;
use std::io::Write;

use crate::error::{Error, Result};
use crate::qaoa::{wrap_angle, QaoaAngles, QaoaProblem, StateVector};

/// How `F(β, γ)` is evaluated during optimization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Estimator {
    /// Exact inner product with the objective vector.
    #[default]
    Exact,
    /// Mean of `f·g` over `shots` measurement samples (seeded).
    Sampled { shots: usize },
}

#[derive(Debug, Clone)]
pub struct OptimizeConfig {
    /// Lattice points per axis on `[0, 2π)`.
    pub grid_points: usize,
    pub local_max_evals: usize,
    pub local_xtol: f64,
    pub seed: u64,
    pub estimator: Estimator,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        Self {
            grid_points: 50,
            local_max_evals: 2000,
            local_xtol: 1e-6,
            seed: 0,
            estimator: Estimator::Exact,
        }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_points < 2 {
            return Err(Error::invalid("grid needs at least 2 points per axis"));
        }
        if self.local_max_evals == 0 {
            return Err(Error::invalid("local optimizer needs a positive evaluation budget"));
        }
        if !(self.local_xtol > 0.0) {
            return Err(Error::invalid("xtol must be positive"));
        }
        if let Estimator::Sampled { shots: 0 } = self.estimator {
            return Err(Error::invalid("sampled estimator needs at least one shot"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResult {
    pub gamma: f64,
    pub beta: f64,
    pub value: f64,
    pub evals: usize,
}

/// Evaluates the full `grid_points²` lattice `{k·2π/G}` and returns the
/// lexicographically first `(γ, β)` attaining the maximum.
pub fn grid_search_2d<F>(mut objective: F, cfg: &OptimizeConfig) -> GridResult
where
    F: FnMut(f64, f64) -> f64,
{
    let g = cfg.grid_points.max(1);
    let step = TAU / g as f64;
    let mut best = GridResult {
        gamma: 0.0,
        beta: 0.0,
        value: f64::NEG_INFINITY,
        evals: 0,
    };
    for i in 0..g {
        let gamma = i as f64 * step;
        for j in 0..g {
            let beta = j as f64 * step;
            let v = objective(gamma, beta);
            best.evals += 1;
            // strict comparison keeps the first maximizer; NaN never wins
            if v > best.value {
                best.gamma = gamma;
                best.beta = beta;
                best.value = v;
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct LocalResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub evals: usize,
}

const GOLDEN: f64 = 1.618_033_988_749_895;
const INV_GOLDEN: f64 = 0.618_033_988_749_895;

struct Budgeted<F> {
    f: F,
    evals: usize,
    max: usize,
}

impl<F: FnMut(&[f64]) -> f64> Budgeted<F> {
    fn exhausted(&self) -> bool {
        self.evals >= self.max
    }

    fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        self.evals += 1;
        let v = (self.f)(x);
        Some(if v.is_nan() { f64::NEG_INFINITY } else { v })
    }
}

fn along(x: &[f64], d: &[f64], t: f64, bounds: &[(f64, f64)]) -> Vec<f64> {
    x.iter()
        .zip(d)
        .zip(bounds)
        .map(|((xi, di), &(lo, hi))| (xi + t * di).clamp(lo, hi))
        .collect()
}

/// Feasible step interval `[t_min, t_max]` for `x + t d` inside the box.
fn step_range(x: &[f64], d: &[f64], bounds: &[(f64, f64)]) -> (f64, f64) {
    let (mut t_min, mut t_max) = (f64::NEG_INFINITY, f64::INFINITY);
    for ((xi, di), &(lo, hi)) in x.iter().zip(d).zip(bounds) {
        if *di > 0.0 {
            t_min = t_min.max((lo - xi) / di);
            t_max = t_max.min((hi - xi) / di);
        } else if *di < 0.0 {
            t_min = t_min.max((hi - xi) / di);
            t_max = t_max.min((lo - xi) / di);
        }
    }
    (t_min.min(0.0), t_max.max(0.0))
}

/// Bounded line maximization from `t = 0`: bracket by golden expansion, then
/// golden-section refinement. Returns the best `(t, value)` seen, which is
/// `(0, fx)` when no probe improves.
fn line_search<F: FnMut(&[f64]) -> f64>(
    obj: &mut Budgeted<F>,
    x: &[f64],
    fx: f64,
    d: &[f64],
    bounds: &[(f64, f64)],
    step: f64,
    xtol: f64,
) -> (f64, f64) {
    let (t_min, t_max) = step_range(x, d, bounds);
    if t_max - t_min <= 0.0 {
        return (0.0, fx);
    }
    let mut best = (0.0, fx);
    let mut probe = |obj: &mut Budgeted<F>, t: f64, best: &mut (f64, f64)| -> Option<f64> {
        let v = obj.eval(&along(x, d, t, bounds))?;
        if v > best.1 {
            *best = (t, v);
        }
        Some(v)
    };

    // pick a downhill-for-minimization (uphill) side
    let (mut a, mut fa) = (0.0, fx);
    let mut b = step.min(t_max);
    let mut fb = if b > 0.0 {
        match probe(obj, b, &mut best) {
            Some(v) => v,
            None => return best,
        }
    } else {
        f64::NEG_INFINITY
    };
    if fb <= fa {
        let back = (-step).max(t_min);
        let fback = if back < 0.0 {
            match probe(obj, back, &mut best) {
                Some(v) => v,
                None => return best,
            }
        } else {
            f64::NEG_INFINITY
        };
        if fback <= fa {
            // 0 is the best of three: the maximum is bracketed by [back, b]
            let (lo, hi) = (back.min(0.0), b.max(0.0));
            golden(obj, lo, hi, xtol, &mut probe, &mut best);
            return best;
        }
        b = back;
        fb = fback;
    }

    // expand in the improving direction
    let limit = if b > 0.0 { t_max } else { t_min };
    loop {
        if b == limit {
            break;
        }
        let c = {
            let c = b + GOLDEN * (b - a);
            if b > 0.0 {
                c.min(limit)
            } else {
                c.max(limit)
            }
        };
        let Some(fc) = probe(obj, c, &mut best) else {
            return best;
        };
        if fc <= fb {
            let (lo, hi) = (a.min(c), a.max(c));
            golden(obj, lo, hi, xtol, &mut probe, &mut best);
            return best;
        }
        a = b;
        fa = fb;
        b = c;
        fb = fc;
    }
    let _ = fa;
    // hit the boundary while still improving; polish near it
    let (lo, hi) = (a.min(b), a.max(b));
    golden(obj, lo, hi, xtol, &mut probe, &mut best);
    best
}

fn golden<F, P>(obj: &mut Budgeted<F>, mut lo: f64, mut hi: f64, xtol: f64, probe: &mut P, best: &mut (f64, f64))
where
    F: FnMut(&[f64]) -> f64,
    P: FnMut(&mut Budgeted<F>, f64, &mut (f64, f64)) -> Option<f64>,
{
    let mut c = hi - INV_GOLDEN * (hi - lo);
    let mut d = lo + INV_GOLDEN * (hi - lo);
    let Some(mut fc) = probe(obj, c, best) else { return };
    let Some(mut fd) = probe(obj, d, best) else { return };
    while hi - lo > xtol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_GOLDEN * (hi - lo);
            match probe(obj, c, best) {
                Some(v) => fc = v,
                None => return,
            }
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_GOLDEN * (hi - lo);
            match probe(obj, d, best) {
                Some(v) => fd = v,
                None => return,
            }
        }
    }
}

/// Bounded derivative-free maximization (Powell's conjugate directions with
/// box-clipped line searches).
///
/// Never returns a point worse than `start`; deterministic; stops when a
/// sweep moves less than `local_xtol` or the evaluation budget is spent.
pub fn local_refine<F>(objective: F, start: &[f64], bounds: &[(f64, f64)], cfg: &OptimizeConfig) -> Result<LocalResult>
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    if bounds.len() != dim {
        return Err(Error::invalid(format!("{} bounds for {dim} parameters", bounds.len())));
    }
    for (x, &(lo, hi)) in start.iter().zip(bounds) {
        if !(lo <= hi) || !(lo..=hi).contains(x) {
            return Err(Error::invalid(format!("start {x} outside bounds [{lo}, {hi}]")));
        }
    }
    let mut obj = Budgeted {
        f: objective,
        evals: 0,
        max: cfg.local_max_evals.max(1),
    };
    let mut x = start.to_vec();
    let mut fx = obj.eval(&x).unwrap_or(f64::NEG_INFINITY);
    if dim == 0 {
        return Ok(LocalResult { point: x, value: fx, evals: obj.evals });
    }

    let xtol = cfg.local_xtol;
    let mean_width = bounds.iter().map(|(lo, hi)| hi - lo).sum::<f64>() / dim as f64;
    let mut step = (0.1 * mean_width).max(xtol);
    let mut dirs: Vec<Vec<f64>> = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();

    while !obj.exhausted() {
        let (x_start, f_start) = (x.clone(), fx);
        let (mut big_gain, mut big_idx) = (0.0, 0);
        for (i, d) in dirs.iter().enumerate() {
            let (t, ft) = line_search(&mut obj, &x, fx, d, bounds, step, xtol);
            if ft > fx {
                if ft - fx > big_gain {
                    big_gain = ft - fx;
                    big_idx = i;
                }
                x = along(&x, d, t, bounds);
                fx = ft;
            }
        }
        let shift: Vec<f64> = x.iter().zip(&x_start).map(|(a, b)| a - b).collect();
        let moved = shift.iter().fold(0.0f64, |m, s| m.max(s.abs()));
        if moved < xtol || fx - f_start <= 1e-14 * (fx.abs() + f_start.abs()) {
            break;
        }
        let norm = shift.iter().map(|s| s * s).sum::<f64>().sqrt();
        let new_dir: Vec<f64> = shift.iter().map(|s| s / norm).collect();
        let (t, ft) = line_search(&mut obj, &x, fx, &new_dir, bounds, step, xtol);
        if ft > fx {
            x = along(&x, &new_dir, t, bounds);
            fx = ft;
        }
        dirs.remove(big_idx);
        dirs.push(new_dir);
        step = (2.0 * moved).clamp(xtol, 0.1 * mean_width);
    }
    Ok(LocalResult {
        point: x,
        value: fx,
        evals: obj.evals,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerRecord {
    pub layer: usize,
    pub grid_gamma: f64,
    pub grid_beta: f64,
    pub f_grid: f64,
    pub f_refined: f64,
    /// Objective evaluations spent on this layer (grid plus refinement).
    pub evals: usize,
    /// Angles of layers `1..=layer` after the joint refinement.
    pub angles: QaoaAngles,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationTrace {
    pub layers: Vec<LayerRecord>,
    pub final_angles: QaoaAngles,
    pub final_value: f64,
}

impl OptimizationTrace {
    /// Trace export: `layer,gamma,beta,F_grid,F_refined,evals`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["layer", "gamma", "beta", "F_grid", "F_refined", "evals"])?;
        for r in &self.layers {
            w.write_record([
                r.layer.to_string(),
                format!("{:.12}", r.grid_gamma),
                format!("{:.12}", r.grid_beta),
                format!("{:.12}", r.f_grid),
                format!("{:.12}", r.f_refined),
                r.evals.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn estimate(problem: &QaoaProblem, state: &StateVector, cfg: &OptimizeConfig) -> f64 {
    match cfg.estimator {
        Estimator::Exact => state.expectation(),
        Estimator::Sampled { shots } => state
            .sampled_expectation(problem.instance(), shots, cfg.seed)
            .unwrap_or(f64::NEG_INFINITY),
    }
}

/// Layer-wise grid initialization with cumulative joint refinement.
///
/// Because trailing zero layers are the identity, the record for layer `i`
/// is exactly what a depth-`i` run would produce.
pub fn layerwise_optimize(problem: &QaoaProblem, q: usize, cfg: &OptimizeConfig) -> Result<OptimizationTrace> {
    if q == 0 {
        return Err(Error::invalid("depth must be at least 1"));
    }
    cfg.validate()?;

    let mut params: Vec<f64> = Vec::with_capacity(2 * q);
    let mut prefix = problem.initial_state().clone();
    let mut layers = Vec::with_capacity(q);
    let mut failure: Option<Error> = None;

    for layer in 1..=q {
        // cache the phased prefix across the inner β loop
        let mut phased: Option<(f64, StateVector)> = None;
        let grid = grid_search_2d(
            |gamma, beta| {
                if phased.as_ref().is_none_or(|(g, _)| *g != gamma) {
                    let mut s = prefix.clone();
                    s.apply_phase_separator(gamma);
                    phased = Some((gamma, s));
                }
                let mut s = phased.as_ref().map(|(_, s)| s.clone()).expect("phased state");
                if let Err(e) = problem.apply_mixer(&mut s, beta) {
                    failure.get_or_insert(e);
                    return f64::NEG_INFINITY;
                }
                estimate(problem, &s, cfg)
            },
            cfg,
        );
        if let Some(e) = failure.take() {
            return Err(e);
        }

        params.push(grid.gamma);
        params.push(grid.beta);
        let bounds = vec![(0.0, TAU); params.len()];
        let refined = local_refine(
            |p| match QaoaAngles::from_interleaved(p).and_then(|a| problem.evolve(&a)) {
                Ok(state) => estimate(problem, &state, cfg),
                Err(e) => {
                    failure.get_or_insert(e);
                    f64::NEG_INFINITY
                }
            },
            &params,
            &bounds,
            cfg,
        )?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        // the refined start is the grid point, so refined.value >= grid.value
        params = refined.point.iter().map(|&p| wrap_angle(p)).collect();
        let angles = QaoaAngles::from_interleaved(&params)?;
        prefix = problem.evolve(&angles)?;

        layers.push(LayerRecord {
            layer,
            grid_gamma: grid.gamma,
            grid_beta: grid.beta,
            f_grid: grid.value,
            f_refined: refined.value,
            evals: grid.evals + refined.evals,
            angles,
        });
    }

    let last = layers.last().expect("q >= 1");
    Ok(OptimizationTrace {
        final_angles: last.angles.clone(),
        final_value: last.f_refined,
        layers,
    })
}
