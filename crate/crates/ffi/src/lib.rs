//! C ABI over the `qpeak` simulator.
//!
//! States and observables are opaque heap handles released with their
//! `*_free` function. Every fallible call returns a [`QpStatus`]; on failure
//! [`qp_last_error`] describes the problem for the calling thread. Sector
//! rules are passed as a qubit list: one qubit selects that qubit's bit,
//! several select the parity of those bits.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qpeak::diagnostics::concentration_curve;
use qpeak::observables::ObservableSpec;
use qpeak::{DiagonalObservable, EnsembleSpec, Error, QuantumState, SectorEstimates, SectorRule};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Capacity = 3,
    Io = 4,
    Parse = 5,
    EmptyShots = 6,
    BufferTooSmall = 7,
    Panic = 99,
}

/// Opaque statevector handle.
pub struct QpState(QuantumState);

/// Opaque diagonal observable handle.
pub struct QpObservable(DiagonalObservable);

/// Sector diagnostics. The `*_se` fields are standard errors for shot-based
/// estimates and zero for exact ones.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QpSectorEstimates {
    pub pi_up: f64,
    pub pi_down: f64,
    pub w_up: f64,
    pub w_down: f64,
    pub c_e: f64,
    pub a_avg: f64,
    pub n_shots: u64,
    pub pi_up_se: f64,
    pub pi_down_se: f64,
    pub w_up_se: f64,
    pub w_down_se: f64,
    pub c_e_se: f64,
    pub a_avg_se: f64,
}

impl From<&SectorEstimates> for QpSectorEstimates {
    fn from(e: &SectorEstimates) -> Self {
        let se = e.std_errors.unwrap_or_default();
        Self {
            pi_up: e.pi_up,
            pi_down: e.pi_down,
            w_up: e.w_up,
            w_down: e.w_down,
            c_e: e.c_e,
            a_avg: e.a_avg,
            n_shots: e.n_shots.unwrap_or(0) as u64,
            pi_up_se: se.pi_up,
            pi_down_se: se.pi_down,
            w_up_se: se.w_up,
            w_down_se: se.w_down,
            c_e_se: se.c_e,
            a_avg_se: se.a_avg,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(QpStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::Capacity { .. } => QpStatus::Capacity,
            Error::Io { .. } => QpStatus::Io,
            Error::Parse(_) => QpStatus::Parse,
            Error::EmptyShots => QpStatus::EmptyShots,
            Error::Validation(_) | Error::Domain(_) => QpStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QpStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> QpStatus {
    let outcome = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|_| Err(Failure(QpStatus::Panic, "internal panic".into())));
    match outcome {
        Ok(()) => {
            set_last_error("");
            QpStatus::Ok
        }
        Err(Failure(status, msg)) => {
            set_last_error(&msg);
            status
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_ref<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(QpStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    match (p.is_null(), len) {
        (_, 0) => Ok(&[]),
        (true, _) => Err(null(what)),
        (false, _) => Ok(std::slice::from_raw_parts(p, len)),
    }
}

unsafe fn out_slice<'a, T>(p: *mut T, len: usize, need: usize, what: &str) -> Result<&'a mut [T], Failure> {
    if len < need {
        return Err(Failure(
            QpStatus::BufferTooSmall,
            format!("{what} holds {len} elements, {need} needed"),
        ));
    }
    if need == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, need))
}

unsafe fn rule_arg(qubits: *const u32, len: usize) -> Result<SectorRule, Failure> {
    let qs: Vec<usize> = slice_arg(qubits, len, "rule_qubits")?
        .iter()
        .map(|&q| q as usize)
        .collect();
    match qs.as_slice() {
        [] => Err(Failure(
            QpStatus::InvalidArgument,
            "sector rule needs at least one qubit".into(),
        )),
        [k] => Ok(SectorRule::SingleQubit(*k)),
        _ => Ok(SectorRule::ParitySubset(qs)),
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call into the library from the same thread.
#[no_mangle]
pub extern "C" fn qp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// `|0...0>` on `num_qubits` qubits.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn qp_state_zero(num_qubits: u32, out: *mut *mut QpState) -> QpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let s = QuantumState::new_zero_state(num_qubits as usize)?;
        *out = Box::into_raw(Box::new(QpState(s)));
        Ok(())
    })
}

/// Prepares draw `draw_index` of the ensemble described by `spec_json`.
///
/// # Safety
/// `spec_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qp_state_from_ensemble_json(
    spec_json: *const c_char,
    draw_index: u64,
    master_seed: u64,
    out: *mut *mut QpState,
) -> QpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec: EnsembleSpec = serde_json::from_str(str_arg(spec_json, "spec_json")?)
            .map_err(|e| Failure(QpStatus::Parse, e.to_string()))?;
        let draw = spec.prepare(draw_index, master_seed)?;
        *out = Box::into_raw(Box::new(QpState(draw.state)));
        Ok(())
    })
}

/// Releases a state handle; null is ignored.
///
/// # Safety
/// `state` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qp_state_free(state: *mut QpState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Qubit count, or 0 for a null handle.
///
/// # Safety
/// `state` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qp_state_num_qubits(state: *const QpState) -> u32 {
    state.as_ref().map_or(0, |s| s.0.num_qubits() as u32)
}

/// Copies the `2^n` basis weights into `out` (capacity `len`).
///
/// # Safety
/// `out` must point to at least `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qp_state_basis_weights(
    state: *const QpState,
    out: *mut f64,
    len: usize,
) -> QpStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let dst = out_slice(out, len, s.dim(), "out")?;
        dst.copy_from_slice(&s.basis_weights());
        Ok(())
    })
}

/// Draws `n_shots` basis indices into `out` (capacity `len`).
///
/// # Safety
/// `out` must point to at least `len` writable integers.
#[no_mangle]
pub unsafe extern "C" fn qp_state_sample_shots(
    state: *const QpState,
    n_shots: usize,
    seed: u64,
    out: *mut u64,
    len: usize,
) -> QpStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let dst = out_slice(out, len, n_shots, "out")?;
        for (d, z) in dst.iter_mut().zip(s.sample_shots(n_shots, seed)) {
            *d = z as u64;
        }
        Ok(())
    })
}

/// Builds an observable from its JSON description (`{"terms": [...]}`).
///
/// # Safety
/// `spec_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qp_observable_from_json(
    spec_json: *const c_char,
    num_qubits: u32,
    out: *mut *mut QpObservable,
) -> QpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let spec: ObservableSpec = serde_json::from_str(str_arg(spec_json, "spec_json")?)
            .map_err(|e| Failure(QpStatus::Parse, e.to_string()))?;
        *out = Box::into_raw(Box::new(QpObservable(spec.build(num_qubits as usize)?)));
        Ok(())
    })
}

/// Unit-coefficient Z-string on `support`.
///
/// # Safety
/// `support` must point to `len` integers; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qp_observable_z_string(
    num_qubits: u32,
    support: *const u32,
    len: usize,
    out: *mut *mut QpObservable,
) -> QpStatus {
    guard(|| {
        let out = out_ref(out, "out")?;
        let qs: Vec<usize> = slice_arg(support, len, "support")?
            .iter()
            .map(|&q| q as usize)
            .collect();
        let obs = DiagonalObservable::z_string(num_qubits as usize, &qs)?;
        *out = Box::into_raw(Box::new(QpObservable(obs)));
        Ok(())
    })
}

/// Releases an observable handle; null is ignored.
///
/// # Safety
/// `obs` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qp_observable_free(obs: *mut QpObservable) {
    if !obs.is_null() {
        drop(Box::from_raw(obs));
    }
}

/// Diagonal element `a_z`.
///
/// # Safety
/// `obs` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qp_observable_eval(obs: *const QpObservable, z: u64, out: *mut f64) -> QpStatus {
    guard(|| {
        let o = &deref(obs, "obs")?.0;
        let out = out_ref(out, "out")?;
        if z >> o.num_qubits() != 0 {
            return Err(Failure(
                QpStatus::InvalidArgument,
                format!("basis index {z} outside a {}-qubit register", o.num_qubits()),
            ));
        }
        *out = o.eval_profile(z as usize);
        Ok(())
    })
}

/// Exact sector diagnostics of `state`.
///
/// # Safety
/// Handles must be live; `rule_qubits` must point to `rule_len` integers.
#[no_mangle]
pub unsafe extern "C" fn qp_exact_sector_estimates(
    state: *const QpState,
    obs: *const QpObservable,
    rule_qubits: *const u32,
    rule_len: usize,
    out: *mut QpSectorEstimates,
) -> QpStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let o = &deref(obs, "obs")?.0;
        let out = out_ref(out, "out")?;
        let rule = rule_arg(rule_qubits, rule_len)?;
        *out = (&qpeak::exact_sector_estimates(s, o, &rule)?).into();
        Ok(())
    })
}

/// Shot-based sector estimates from measured basis indices.
///
/// # Safety
/// `shots` must point to `n_shots` integers; other pointers as above.
#[no_mangle]
pub unsafe extern "C" fn qp_shot_sector_estimates(
    shots: *const u64,
    n_shots: usize,
    obs: *const QpObservable,
    rule_qubits: *const u32,
    rule_len: usize,
    out: *mut QpSectorEstimates,
) -> QpStatus {
    guard(|| {
        let o = &deref(obs, "obs")?.0;
        let out = out_ref(out, "out")?;
        let rule = rule_arg(rule_qubits, rule_len)?;
        let zs: Vec<usize> = slice_arg(shots, n_shots, "shots")?
            .iter()
            .map(|&z| z as usize)
            .collect();
        *out = (&qpeak::shot_sector_estimates(&zs, o, &rule)?).into();
        Ok(())
    })
}

/// Top-K masses `M(K)` for each of the `len` values in `ks`, written to `out`.
///
/// # Safety
/// `ks` and `out` must each point to `len` elements.
#[no_mangle]
pub unsafe extern "C" fn qp_concentration(
    state: *const QpState,
    ks: *const u64,
    len: usize,
    out: *mut f64,
) -> QpStatus {
    guard(|| {
        let s = &deref(state, "state")?.0;
        let ks: Vec<usize> = slice_arg(ks, len, "ks")?.iter().map(|&k| k as usize).collect();
        let dst = out_slice(out, len, len, "out")?;
        let curve = concentration_curve(s, &ks);
        for (d, (_, m)) in dst.iter_mut().zip(curve.points) {
            *d = m;
        }
        Ok(())
    })
}

/// Good-set fraction whose ideal mass peaks after `iterations` rounds.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qp_f_target(iterations: u32, out: *mut f64) -> QpStatus {
    guard(|| {
        *out_ref(out, "out")? = qpeak::f_target(iterations)?;
        Ok(())
    })
}

/// Ideal good-set mass after `iterations` rounds at good-set fraction `f`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qp_p_g_ideal(iterations: u32, f: f64, out: *mut f64) -> QpStatus {
    guard(|| {
        *out_ref(out, "out")? = qpeak::p_g_ideal(iterations, f)?;
        Ok(())
    })
}
