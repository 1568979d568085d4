//! C interface to `lazygibbs`.
//!
//! Objects are opaque handles created by `lg_*_new`-style functions and
//! released with the matching `*_free`. Every fallible call returns an
//! [`LgStatus`]; on failure `lg_last_error` describes the cause for the
//! calling thread. Spins cross the boundary 0-based.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lazygibbs::inference::Caps;
use lazygibbs::sampler::TraceDetail;
use lazygibbs::verify::{bracket_bounds, wsm_probe, ProbeTarget};
use lazygibbs::{models, Error, LazySampler, Rect, Region, SpinSystem, Strategy, Vertex};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BudgetExhausted = 3,
    CapExceeded = 4,
    Infeasible = 5,
    BufferTooSmall = 6,
    Internal = 7,
}

/// Lower-bound strategy selector.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LgStrategy {
    ExactMin = 0,
    Monotone = 1,
    Trivial = 2,
}

/// Opaque spin system.
pub struct LgSystem(SpinSystem);

/// Opaque sampler; keeps its memo tables between calls.
pub struct LgSampler(LazySampler);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> LgStatus {
    match e {
        Error::BudgetExhausted { .. } => LgStatus::BudgetExhausted,
        Error::CapExceeded { .. } => LgStatus::CapExceeded,
        Error::Infeasible => LgStatus::Infeasible,
        Error::NegativeResidual { .. } | Error::IntervalMiss(_) | Error::Io(_) => LgStatus::Internal,
        _ => LgStatus::InvalidArgument,
    }
}

fn guard(f: impl FnOnce() -> Result<(), LgStatus>) -> LgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic".into());
            LgStatus::Internal
        }
    }
}

fn fail(e: Error) -> LgStatus {
    let s = status_of(&e);
    set_error(e.to_string());
    s
}

fn null() -> LgStatus {
    set_error("null pointer argument".into());
    LgStatus::NullPointer
}

/// Message for the last failure on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

unsafe fn emit_system(out: *mut *mut LgSystem, s: lazygibbs::Result<SpinSystem>) -> Result<(), LgStatus> {
    if out.is_null() {
        return Err(null());
    }
    let s = s.map_err(fail)?;
    *out = Box::into_raw(Box::new(LgSystem(s)));
    Ok(())
}

/// Ferromagnetic Potts model with `q` spins at inverse temperature `beta`.
#[no_mangle]
pub unsafe extern "C" fn lg_system_potts(q: u32, beta: f64, out: *mut *mut LgSystem) -> LgStatus {
    guard(|| emit_system(out, models::potts(q as usize, beta)))
}

/// Ising model with coupling `beta` and field ratio `h`.
#[no_mangle]
pub unsafe extern "C" fn lg_system_ising(beta: f64, h: f64, out: *mut *mut LgSystem) -> LgStatus {
    guard(|| emit_system(out, models::ising(beta, h)))
}

/// General system: `field` has `q` entries, `interaction` is row-major `q*q`.
#[no_mangle]
pub unsafe extern "C" fn lg_system_new(q: u32, field: *const f64, interaction: *const f64, out: *mut *mut LgSystem) -> LgStatus {
    guard(|| {
        if field.is_null() || interaction.is_null() {
            return Err(null());
        }
        let q = q as usize;
        let b = std::slice::from_raw_parts(field, q).to_vec();
        let a = std::slice::from_raw_parts(interaction, q * q).chunks(q.max(1)).map(<[f64]>::to_vec).collect();
        emit_system(out, SpinSystem::new(b, a))
    })
}

/// Number of spins, or 0 for NULL.
#[no_mangle]
pub unsafe extern "C" fn lg_system_q(system: *const LgSystem) -> u32 {
    system.as_ref().map_or(0, |s| s.0.q() as u32)
}

#[no_mangle]
pub unsafe extern "C" fn lg_system_free(system: *mut LgSystem) {
    if !system.is_null() {
        drop(Box::from_raw(system));
    }
}

/// Sampler for `system` (copied) with mesh spacing `mesh`.
#[no_mangle]
pub unsafe extern "C" fn lg_sampler_new(system: *const LgSystem, mesh: i64, strategy: LgStrategy, out: *mut *mut LgSampler) -> LgStatus {
    guard(|| {
        let (Some(sys), false) = (system.as_ref(), out.is_null()) else {
            return Err(null());
        };
        let strategy = match strategy {
            LgStrategy::ExactMin => Strategy::ExactMin,
            LgStrategy::Monotone => Strategy::MonotoneExtremes,
            LgStrategy::Trivial => Strategy::Trivial,
        };
        let s = LazySampler::new(sys.0.clone(), mesh, strategy).map_err(fail)?;
        *out = Box::into_raw(Box::new(LgSampler(s)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn lg_sampler_free(sampler: *mut LgSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Perfect sample of the inclusive window `[x0,x1] x [y0,y1]`.
///
/// Spins are written row-major (increasing `y`, then increasing `x`) into
/// `spins`, which must hold `len` bytes. `calls`, if non-NULL, receives the
/// number of lazy calls made.
#[no_mangle]
pub unsafe extern "C" fn lg_sampler_sample_window(
    sampler: *mut LgSampler,
    x0: i64,
    y0: i64,
    x1: i64,
    y1: i64,
    seed: u64,
    stream: u64,
    budget: u64,
    spins: *mut u8,
    len: usize,
    calls: *mut u64,
) -> LgStatus {
    guard(|| {
        let (Some(s), false) = (sampler.as_mut(), spins.is_null()) else {
            return Err(null());
        };
        if x0 > x1 || y0 > y1 {
            return Err(fail(Error::InvalidArgument("empty window".into())));
        }
        let rect = Rect::new(x0, y0, x1, y1);
        if len < rect.len() {
            set_error(format!("buffer holds {len} spins, window has {}", rect.len()));
            return Err(LgStatus::BufferTooSmall);
        }
        let w = s.0.sample_window(&Region::Rect(rect), seed, stream, budget, TraceDetail::Totals).map_err(fail)?;
        let buf = std::slice::from_raw_parts_mut(spins, rect.len());
        for (slot, v) in buf.iter_mut().zip(rect.iter()) {
            *slot = w.config.get(v).expect("window assigned");
        }
        if !calls.is_null() {
            *calls = w.trace.calls;
        }
        Ok(())
    })
}

/// Lower bounds `p^1..p^q` at mesh vertex `(x, y)` with nothing else known.
#[no_mangle]
pub unsafe extern "C" fn lg_sampler_lower_bounds(sampler: *mut LgSampler, x: i64, y: i64, out: *mut f64, len: usize) -> LgStatus {
    guard(|| {
        let (Some(s), false) = (sampler.as_mut(), out.is_null()) else {
            return Err(null());
        };
        let q = s.0.system().q();
        if len < q {
            set_error(format!("buffer holds {len} values, need {q}"));
            return Err(LgStatus::BufferTooSmall);
        }
        let known = lazygibbs::PartialConfiguration::new();
        let p = s.0.lower_bounds(Vertex::new(x, y), &known).map_err(fail)?;
        std::slice::from_raw_parts_mut(out, q).copy_from_slice(&p.lower);
        Ok(())
    })
}

/// Centre-vertex TV distance between the two extreme constant boundaries on
/// the `(2l-1)^2` box, for each of the `n` scales in `ells`.
#[no_mangle]
pub unsafe extern "C" fn lg_wsm_probe(system: *const LgSystem, ells: *const u32, n: usize, tv: *mut f64) -> LgStatus {
    guard(|| {
        let (Some(sys), false, false) = (system.as_ref(), ells.is_null(), tv.is_null()) else {
            return Err(null());
        };
        let ells: Vec<usize> = std::slice::from_raw_parts(ells, n).iter().map(|&l| l as usize).collect();
        let table = wsm_probe(&sys.0, &ells, ProbeTarget::Centre, Caps::default()).map_err(fail)?;
        let out = std::slice::from_raw_parts_mut(tv, n);
        for (slot, row) in out.iter_mut().zip(&table.rows) {
            *slot = row.1;
        }
        Ok(())
    })
}

/// Centre probability of spin 1 on the `(2*box_half+1)^2` box under the
/// all-0 (`lo`) and all-1 (`hi`) boundaries. Two-spin attractive systems only.
#[no_mangle]
pub unsafe extern "C" fn lg_bracket_bounds(system: *const LgSystem, box_half: u32, lo: *mut f64, hi: *mut f64) -> LgStatus {
    guard(|| {
        let (Some(sys), false, false) = (system.as_ref(), lo.is_null(), hi.is_null()) else {
            return Err(null());
        };
        let (l, h) = bracket_bounds(&sys.0, box_half as usize, Caps::default()).map_err(fail)?;
        *lo = l;
        *hi = h;
        Ok(())
    })
}

/// `ln(1 + sqrt(q))`.
#[no_mangle]
pub extern "C" fn lg_critical_beta(q: u32) -> f64 {
    models::critical_beta(q as usize)
}
