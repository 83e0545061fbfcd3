//! C ABI for the ladderq library.
//!
//! The interface works on an opaque state handle plus JSON strings: callers
//! build or load a channel state, then pull entropy, witness, coupling or
//! tomography reports as JSON documents in the same schemas the `ladderq`
//! CLI writes. Every function returns a status code; the message for the
//! most recent failure on the current thread is available through
//! [`lq_last_error_message`]. Strings returned by this library must be
//! released with [`lq_string_free`], states with [`lq_state_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use ladderq::cli::{cmd_examples, cmd_tomo_roundtrip_in_memory, ExampleName, PlanFlags};
use ladderq::coupling::coupled_basis;
use ladderq::entropy::entropy_report;
use ladderq::spinops::{build_ladder, AxisMode};
use ladderq::states::{maximally_mixed, pure_coupled_state, ChannelState};
use ladderq::witness::witness_report;
use ladderq::HalfInteger;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
#[allow(non_camel_case_types, non_snake_case)]
pub enum lq_status {
    /// Success.
    LQ_OK = 0,
    /// A pointer argument was null.
    LQ_NULL_POINTER = 1,
    /// An argument failed to parse or was out of range.
    LQ_INVALID_ARGUMENT = 2,
    /// The computation itself reported an error.
    LQ_COMPUTE_ERROR = 3,
    /// A panic was caught at the boundary; state is unspecified.
    LQ_PANIC = 4,
}

/// Opaque handle to a composite-channel state.
#[allow(non_camel_case_types)]
pub struct lq_state {
    inner: ChannelState,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let sanitized = message.replace('\0', " ");
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_default();
    });
}

/// Message for the most recent failure on this thread.
///
/// The pointer stays valid until the next failing call on the same thread.
/// Never free it.
#[no_mangle]
pub extern "C" fn lq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

fn catch<F: FnOnce() -> lq_status>(f: F) -> lq_status {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_error("internal panic");
            lq_status::LQ_PANIC
        }
    }
}

unsafe fn read_str<'a>(ptr: *const c_char) -> Result<&'a str, lq_status> {
    if ptr.is_null() {
        set_error("null string argument");
        return Err(lq_status::LQ_NULL_POINTER);
    }
    CStr::from_ptr(ptr).to_str().map_err(|_| {
        set_error("string argument is not valid UTF-8");
        lq_status::LQ_INVALID_ARGUMENT
    })
}

fn parse_half(text: &str) -> Result<HalfInteger, lq_status> {
    text.parse().map_err(|e: ladderq::Error| {
        set_error(&e.to_string());
        lq_status::LQ_INVALID_ARGUMENT
    })
}

fn hand_out_string(text: String, out: *mut *mut c_char) -> lq_status {
    if out.is_null() {
        set_error("null output pointer");
        return lq_status::LQ_NULL_POINTER;
    }
    match CString::new(text) {
        Ok(cstring) => {
            unsafe { *out = cstring.into_raw() };
            lq_status::LQ_OK
        }
        Err(_) => {
            set_error("report contained an interior NUL byte");
            lq_status::LQ_COMPUTE_ERROR
        }
    }
}

fn hand_out_state(state: ChannelState, out: *mut *mut lq_state) -> lq_status {
    if out.is_null() {
        set_error("null output pointer");
        return lq_status::LQ_NULL_POINTER;
    }
    unsafe { *out = Box::into_raw(Box::new(lq_state { inner: state })) };
    lq_status::LQ_OK
}

unsafe fn state_ref<'a>(state: *const lq_state) -> Result<&'a ChannelState, lq_status> {
    if state.is_null() {
        set_error("null state handle");
        return Err(lq_status::LQ_NULL_POINTER);
    }
    Ok(&(*state).inner)
}

/// Parse a state from its JSON document (the state-file schema).
///
/// # Safety
/// `json` must be a valid NUL-terminated string; `out` must be a valid
/// pointer to receive the handle.
#[no_mangle]
pub unsafe extern "C" fn lq_state_from_json(
    json: *const c_char,
    out: *mut *mut lq_state,
) -> lq_status {
    catch(|| {
        let text = match read_str(json) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match serde_json::from_str::<ChannelState>(text) {
            Ok(state) => hand_out_state(state, out),
            Err(e) => {
                set_error(&e.to_string());
                lq_status::LQ_INVALID_ARGUMENT
            }
        }
    })
}

/// Build the pure coupled state |j,m⟩ of the (s, l) channel. Ranks and
/// labels are half-integer strings such as "1/2" or "2".
///
/// # Safety
/// All strings NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_state_pure(
    s: *const c_char,
    l: *const c_char,
    j: *const c_char,
    m: *const c_char,
    out: *mut *mut lq_state,
) -> lq_status {
    catch(|| {
        let parsed = (|| -> Result<ChannelState, lq_status> {
            let s = parse_half(read_str(s)?)?;
            let l = parse_half(read_str(l)?)?;
            let j = parse_half(read_str(j)?)?;
            let m = parse_half(read_str(m)?)?;
            pure_coupled_state(s, l, j, m).map_err(|e| {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            })
        })();
        match parsed {
            Ok(state) => hand_out_state(state, out),
            Err(status) => status,
        }
    })
}

/// Build the maximally mixed state of the (s, l) channel.
///
/// # Safety
/// All strings NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_state_uniform(
    s: *const c_char,
    l: *const c_char,
    out: *mut *mut lq_state,
) -> lq_status {
    catch(|| {
        let parsed = (|| -> Result<ChannelState, lq_status> {
            let s = parse_half(read_str(s)?)?;
            let l = parse_half(read_str(l)?)?;
            Ok(maximally_mixed(s, l))
        })();
        match parsed {
            Ok(state) => hand_out_state(state, out),
            Err(status) => status,
        }
    })
}

/// Serialize a state back to its JSON document.
///
/// # Safety
/// `state` must be a live handle from this library; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_state_to_json(
    state: *const lq_state,
    out: *mut *mut c_char,
) -> lq_status {
    catch(|| {
        let state = match state_ref(state) {
            Ok(s) => s,
            Err(status) => return status,
        };
        match serde_json::to_string_pretty(state) {
            Ok(text) => hand_out_string(text, out),
            Err(e) => {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            }
        }
    })
}

/// Entropy summary of a state, as JSON.
///
/// # Safety
/// `state` live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_entropy_report_json(
    state: *const lq_state,
    out: *mut *mut c_char,
) -> lq_status {
    catch(|| {
        let state = match state_ref(state) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let report = entropy_report(state);
        match serde_json::to_string_pretty(&report) {
            Ok(text) => hand_out_string(text, out),
            Err(e) => {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            }
        }
    })
}

/// Witness report of a qubit ⊗ qunit state, as JSON.
///
/// # Safety
/// `state` live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_witness_report_json(
    state: *const lq_state,
    out: *mut *mut c_char,
) -> lq_status {
    catch(|| {
        let state = match state_ref(state) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let report = match witness_report(state) {
            Ok(r) => r,
            Err(e) => {
                set_error(&e.to_string());
                return lq_status::LQ_COMPUTE_ERROR;
            }
        };
        match serde_json::to_string_pretty(&report) {
            Ok(text) => hand_out_string(text, out),
            Err(e) => {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            }
        }
    })
}

/// Ladder operators for one dimension, as JSON.
///
/// # Safety
/// `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_ladder_json(dim: usize, out: *mut *mut c_char) -> lq_status {
    catch(|| {
        let ladder = match build_ladder(dim) {
            Ok(l) => l,
            Err(e) => {
                set_error(&e.to_string());
                return lq_status::LQ_INVALID_ARGUMENT;
            }
        };
        match serde_json::to_string_pretty(&ladder) {
            Ok(text) => hand_out_string(text, out),
            Err(e) => {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            }
        }
    })
}

/// Coupled basis of ranks (s, l), as JSON.
///
/// # Safety
/// All strings NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_couple_json(
    s: *const c_char,
    l: *const c_char,
    out: *mut *mut c_char,
) -> lq_status {
    catch(|| {
        let parsed = (|| -> Result<String, lq_status> {
            let s = parse_half(read_str(s)?)?;
            let l = parse_half(read_str(l)?)?;
            serde_json::to_string_pretty(&coupled_basis(s, l)).map_err(|e| {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            })
        })();
        match parsed {
            Ok(text) => hand_out_string(text, out),
            Err(status) => status,
        }
    })
}

/// Simulate tomography of a state and reconstruct it, as a JSON report.
///
/// `phased` = 0 uses the planar axis family, nonzero the phase-extended one;
/// `paired` selects the subchannel plan; `shots` = 0 means exact statistics,
/// otherwise `seed` drives reproducible sampling.
///
/// # Safety
/// `state` live handle; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_tomo_roundtrip_json(
    state: *const lq_state,
    phased: i32,
    paired: i32,
    shots: u64,
    seed: u64,
    out: *mut *mut c_char,
) -> lq_status {
    catch(|| {
        let state = match state_ref(state) {
            Ok(s) => s,
            Err(status) => return status,
        };
        let flags = PlanFlags {
            axis_mode: if phased != 0 { AxisMode::Phased } else { AxisMode::Planar },
            paired: paired != 0,
        };
        let shots = if shots == 0 { None } else { Some(shots) };
        let seed = shots.map(|_| seed);
        match cmd_tomo_roundtrip_in_memory(state, flags, shots, seed) {
            Ok(text) => hand_out_string(text, out),
            Err(e) => {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            }
        }
    })
}

/// Run a built-in worked example; returns its JSON report (the CSV, when the
/// example has one, is embedded in the report under "csv").
///
/// # Safety
/// `name` NUL-terminated; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn lq_example_json(
    name: *const c_char,
    out: *mut *mut c_char,
) -> lq_status {
    catch(|| {
        let parsed = (|| -> Result<String, lq_status> {
            let name: ExampleName = read_str(name)?.parse().map_err(|e: ladderq::Error| {
                set_error(&e.to_string());
                lq_status::LQ_INVALID_ARGUMENT
            })?;
            let output = cmd_examples(name, None).map_err(|e| {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            })?;
            let mut report = serde_json::Map::new();
            for (path, content) in output.files {
                let key = path.file_name().map(|n| n.to_string_lossy().into_owned());
                if let Some(key) = key {
                    report.insert(key, serde_json::Value::String(content));
                }
            }
            serde_json::to_string_pretty(&serde_json::Value::Object(report)).map_err(|e| {
                set_error(&e.to_string());
                lq_status::LQ_COMPUTE_ERROR
            })
        })();
        match parsed {
            Ok(text) => hand_out_string(text, out),
            Err(status) => status,
        }
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `text` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lq_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Release a state handle.
///
/// # Safety
/// `state` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn lq_state_free(state: *mut lq_state) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}
