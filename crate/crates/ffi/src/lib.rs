//! C ABI over `qtg-qaoa`.
//!
//! Every fallible function returns a [`QkStatus`] and writes its result
//! through an out-pointer. On failure the message is kept per thread and can
//! be fetched with [`qk_last_error_message`]. Handles are opaque and must be
//! released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use qtg_qaoa::knapsack::{lazy_greedy, parse_instance, solve_exact_dp, very_greedy, KnapsackInstance};
use qtg_qaoa::optimize::{layerwise_optimize, OptimizeConfig};
use qtg_qaoa::qaoa::{CircuitConfig, Engine, QaoaAngles, QaoaProblem, DEFAULT_COPULA_K};
use qtg_qaoa::qtg::{build_superposition, BiasConfig};
use qtg_qaoa::resources::{copula_cycles, qtg_cycles, LayeredToffoliAdderModel};
use qtg_qaoa::Error;

pub const QK_ENGINE_QTG: c_int = 0;
pub const QK_ENGINE_COPULA: c_int = 1;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    ResourceLimit = 4,
    DegenerateInstance = 5,
    InvalidState = 6,
    Io = 7,
    Panic = 8,
}

/// Opaque knapsack instance.
pub struct QkInstance(KnapsackInstance);

/// Opaque engine bound to an instance.
pub struct QkProblem(QaoaProblem);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> QkStatus {
    match err {
        Error::InvalidArgument(_) => QkStatus::InvalidArgument,
        Error::ResourceLimit(_) => QkStatus::ResourceLimit,
        Error::Parse { .. } | Error::Csv(_) => QkStatus::Parse,
        Error::DegenerateInstance(_) => QkStatus::DegenerateInstance,
        Error::InvalidState(_) => QkStatus::InvalidState,
        Error::Io(_) => QkStatus::Io,
    }
}

struct Fail(QkStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(QkStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Fail {
    Fail(QkStatus::InvalidArgument, msg.into())
}

/// Runs `f`, converting errors and panics into a status plus last-error text.
fn guard(f: impl FnOnce() -> Result<(), Fail>) -> QkStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QkStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| payload.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal panic: {msg}"));
            QkStatus::Panic
        }
    }
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Fail> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(p, len))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null(what));
    }
    p.write(value);
    Ok(())
}

fn engine_of(engine: c_int) -> Result<Engine, Fail> {
    match engine {
        QK_ENGINE_QTG => Ok(Engine::Qtg),
        QK_ENGINE_COPULA => Ok(Engine::Copula),
        other => Err(invalid(format!("unknown engine {other}"))),
    }
}

/// Builds an instance from `n` profits and weights.
///
/// # Safety
/// `profits` and `weights` must point to `n` readable values; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn qk_instance_new(
    profits: *const u64,
    weights: *const u64,
    n: usize,
    capacity: u64,
    out: *mut *mut QkInstance,
) -> QkStatus {
    guard(|| {
        let profits = slice_arg(profits, n, "profits")?.to_vec();
        let weights = slice_arg(weights, n, "weights")?.to_vec();
        let inst = KnapsackInstance::new("ffi", profits, weights, capacity)?;
        write_out(out, Box::into_raw(Box::new(QkInstance(inst))), "out")
    })
}

/// Parses the plain-text instance format from a NUL-terminated string.
///
/// # Safety
/// `text` must be a valid C string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_instance_parse(text: *const c_char, out: *mut *mut QkInstance) -> QkStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|_| Fail(QkStatus::Parse, "instance text is not UTF-8".into()))?;
        let inst = parse_instance(text, "ffi")?;
        write_out(out, Box::into_raw(Box::new(QkInstance(inst))), "out")
    })
}

/// Releases an instance; null is ignored.
///
/// # Safety
/// `inst` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qk_instance_free(inst: *mut QkInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of items, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qk_instance_len(inst: *const QkInstance) -> usize {
    inst.as_ref().map_or(0, |i| i.0.n())
}

/// Capacity, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qk_instance_capacity(inst: *const QkInstance) -> u64 {
    inst.as_ref().map_or(0, |i| i.0.capacity())
}

/// Exact optimum and one optimal packing. The packing is written as a packed
/// value with item 0 in the most significant of the `n` low bits.
///
/// # Safety
/// `inst` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_solve_exact(
    inst: *const QkInstance,
    out_optimum: *mut u64,
    out_packing: *mut u64,
) -> QkStatus {
    guard(|| {
        let inst = ref_arg(inst, "inst")?;
        let sol = solve_exact_dp(&inst.0)?;
        write_out(out_optimum, sol.optimum, "out_optimum")?;
        write_out(out_packing, sol.witness.value(), "out_packing")
    })
}

/// Lazy- and very-greedy profits.
///
/// # Safety
/// `inst` must be a live handle; out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_greedy(inst: *const QkInstance, out_lazy: *mut u64, out_very: *mut u64) -> QkStatus {
    guard(|| {
        let inst = ref_arg(inst, "inst")?;
        write_out(out_lazy, lazy_greedy(&inst.0).total_profit, "out_lazy")?;
        write_out(out_very, very_greedy(&inst.0).total_profit, "out_very")
    })
}

/// Number of feasible packings in the uniform tree superposition.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_qtg_feasible_count(inst: *const QkInstance, out: *mut usize) -> QkStatus {
    guard(|| {
        let inst = ref_arg(inst, "inst")?;
        let sup = build_superposition(&inst.0, &BiasConfig::Uniform)?;
        write_out(out, sup.len(), "out")
    })
}

/// Binds an engine to an instance. `copula_k <= 0` selects the default
/// logistic steepness; it is ignored by the QTG engine.
///
/// # Safety
/// `inst` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_problem_new(
    inst: *const QkInstance,
    engine: c_int,
    copula_k: f64,
    out: *mut *mut QkProblem,
) -> QkStatus {
    guard(|| {
        let inst = ref_arg(inst, "inst")?;
        let cfg = CircuitConfig {
            bias: BiasConfig::Uniform,
            copula_k: if copula_k > 0.0 { copula_k } else { DEFAULT_COPULA_K },
        };
        let problem = QaoaProblem::new(engine_of(engine)?, &inst.0, &cfg)?;
        write_out(out, Box::into_raw(Box::new(QkProblem(problem))), "out")
    })
}

/// Releases a problem; null is ignored.
///
/// # Safety
/// `problem` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qk_problem_free(problem: *mut QkProblem) {
    if !problem.is_null() {
        drop(Box::from_raw(problem));
    }
}

/// Exact expectation `F(γ, β)` of a depth-`q` circuit.
///
/// # Safety
/// `gammas` and `betas` must point to `q` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_problem_expectation(
    problem: *const QkProblem,
    gammas: *const f64,
    betas: *const f64,
    q: usize,
    out: *mut f64,
) -> QkStatus {
    guard(|| {
        let problem = ref_arg(problem, "problem")?;
        let angles = QaoaAngles::new(
            slice_arg(gammas, q, "gammas")?.to_vec(),
            slice_arg(betas, q, "betas")?.to_vec(),
        )?;
        write_out(out, problem.0.expectation(&angles)?, "out")
    })
}

/// Layer-wise optimization to depth `q`. Writes the final angles interleaved
/// as `γ1, β1, ..., γq, βq` into `out_angles` (room for `2q` values) and the
/// final expectation into `out_value`.
///
/// # Safety
/// `problem` must be a live handle; `out_angles` must have room for `2q`
/// values; `out_value` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_problem_optimize(
    problem: *const QkProblem,
    q: usize,
    grid_points: usize,
    max_evals: usize,
    out_angles: *mut f64,
    out_value: *mut f64,
) -> QkStatus {
    guard(|| {
        let problem = ref_arg(problem, "problem")?;
        if out_angles.is_null() {
            return Err(null("out_angles"));
        }
        if out_value.is_null() {
            return Err(null("out_value"));
        }
        let cfg = OptimizeConfig {
            grid_points,
            local_max_evals: max_evals,
            ..OptimizeConfig::default()
        };
        let trace = layerwise_optimize(&problem.0, q, &cfg)?;
        let params = trace.final_angles.interleaved();
        ptr::copy_nonoverlapping(params.as_ptr(), out_angles, params.len());
        write_out(out_value, trace.final_value, "out_value")
    })
}

/// Total cycles of a depth-`q` copula circuit on `n` items.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_copula_cycles(n: usize, q: usize, out: *mut u64) -> QkStatus {
    guard(|| write_out(out, copula_cycles(n, q)?.c_total, "out"))
}

/// Total cycles and qubits of a depth-`q` QTG circuit under the default cost
/// model. `out_qubits` may be null.
///
/// # Safety
/// `inst` must be a live handle; `out_cycles` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_qtg_cycles(
    inst: *const QkInstance,
    q: usize,
    out_cycles: *mut u64,
    out_qubits: *mut usize,
) -> QkStatus {
    guard(|| {
        let inst = ref_arg(inst, "inst")?;
        let report = qtg_cycles(&inst.0, q, &LayeredToffoliAdderModel)?;
        write_out(out_cycles, report.c_total, "out_cycles")?;
        if !out_qubits.is_null() {
            out_qubits.write(report.qubit_count);
        }
        Ok(())
    })
}

/// Copy of the calling thread's last error message, or null if none.
/// Release with [`qk_string_free`].
#[no_mangle]
pub extern "C" fn qk_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qk_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
