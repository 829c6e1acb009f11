//! C ABI over `whlab`.
//!
//! Objects cross the boundary as opaque handles created by `*_new`/`*_sample`
//! functions and released with the matching `*_free`. Every fallible call
//! returns a [`WhlabStatus`]; on failure the message is kept per thread and
//! can be read with [`whlab_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use whlab::eternal::eternal_spectrum;
use whlab::harness::{run_experiment, RunOptions};
use whlab::models::{sample, Couplings, Interaction, ModelKind};
use whlab::observables::mutual_information_rt;
use whlab::teleport::{warmup_mutual_information, Protocol, Slice};
use whlab::Error;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhlabStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Config = 3,
    Numerical = 4,
    Io = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhlabModel {
    Syk = 0,
    PgCommuting = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WhlabInteraction {
    V = 0,
    Vb = 1,
}

impl From<WhlabModel> for ModelKind {
    fn from(m: WhlabModel) -> Self {
        match m {
            WhlabModel::Syk => ModelKind::Syk,
            WhlabModel::PgCommuting => ModelKind::PgCommuting,
        }
    }
}

impl From<WhlabInteraction> for Interaction {
    fn from(k: WhlabInteraction) -> Self {
        match k {
            WhlabInteraction::V => Interaction::V,
            WhlabInteraction::Vb => Interaction::Vb,
        }
    }
}

/// Sampled couplings of one instantiation.
pub struct WhlabCouplings(Couplings);

/// Teleportation protocol bound to one instantiation, temperature and interaction.
pub struct WhlabProtocol(Protocol);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> WhlabStatus {
    match e {
        Error::Config { .. } => WhlabStatus::Config,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => WhlabStatus::Io,
        e if e.is_numerical() => WhlabStatus::Numerical,
        _ => WhlabStatus::InvalidArgument,
    }
}

/// Run `f`, recording any error or panic.
fn guard(f: impl FnOnce() -> Result<(), (WhlabStatus, String)>) -> WhlabStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => WhlabStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("panic inside whlab".to_string());
            WhlabStatus::Panic
        }
    }
}

fn lib<T>(r: whlab::Result<T>) -> Result<T, (WhlabStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (WhlabStatus, String) {
    (WhlabStatus::NullPointer, format!("`{what}` is null"))
}

unsafe fn path_arg(p: *const c_char, what: &str) -> Result<PathBuf, (WhlabStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (WhlabStatus::InvalidArgument, format!("`{what}` is not UTF-8")))?;
    Ok(PathBuf::from(s))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn whlab_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy the calling thread's last error message into `buf` (NUL-terminated,
/// truncated to `len`). Returns the full message length in bytes, 0 if none.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn whlab_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| match e.borrow().as_ref() {
        None => 0,
        Some(msg) => {
            let bytes = msg.as_bytes();
            if !buf.is_null() && len > 0 {
                let n = bytes.len().min(len - 1);
                std::ptr::copy_nonoverlapping(bytes.as_ptr(), buf.cast::<u8>(), n);
                *buf.add(n) = 0;
            }
            bytes.len()
        }
    })
}

/// Sample one instantiation.
///
/// # Safety
/// `out` must be a valid pointer; on success it receives a handle to free
/// with [`whlab_couplings_free`].
#[no_mangle]
pub unsafe extern "C" fn whlab_couplings_sample(
    model: WhlabModel,
    n: usize,
    q: usize,
    scale: f64,
    seed: u64,
    out: *mut *mut WhlabCouplings,
) -> WhlabStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = lib(sample(model.into(), n, q, scale, seed))?;
        *out = Box::into_raw(Box::new(WhlabCouplings(c)));
        Ok(())
    })
}

/// Number of Majoranas per side.
///
/// # Safety
/// `c` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn whlab_couplings_n(c: *const WhlabCouplings) -> usize {
    c.as_ref().map_or(0, |c| c.0.n)
}

/// # Safety
/// `c` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn whlab_couplings_free(c: *mut WhlabCouplings) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Prepare the protocol for one instantiation.
///
/// # Safety
/// `c` must be a live couplings handle and `out` a valid pointer; on success
/// `*out` must later be released with [`whlab_protocol_free`].
#[no_mangle]
pub unsafe extern "C" fn whlab_protocol_new(
    c: *const WhlabCouplings,
    beta: f64,
    interaction: WhlabInteraction,
    out: *mut *mut WhlabProtocol,
) -> WhlabStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("couplings"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let p = lib(Protocol::new(&c.0, beta, interaction.into()))?;
        *out = Box::into_raw(Box::new(WhlabProtocol(p)));
        Ok(())
    })
}

/// Renyi-2 `I(R:T)` in bits with a single interaction slice at `t = 0`.
///
/// # Safety
/// `p` must be a live protocol handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn whlab_protocol_mutual_information(
    p: *const WhlabProtocol,
    t0: f64,
    t1: f64,
    mu: f64,
    out: *mut f64,
) -> WhlabStatus {
    guard(|| {
        let p = p.as_ref().ok_or_else(|| null("protocol"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        if ![t0, t1, mu].iter().all(|x| x.is_finite()) {
            return Err((WhlabStatus::InvalidArgument, "times and mu must be finite".into()));
        }
        let rho = lib(p.0.correlator_rho(t0, t1, &[Slice { time: 0.0, mu }]))?;
        *out = lib(mutual_information_rt(&rho))?;
        Ok(())
    })
}

/// # Safety
/// `p` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn whlab_protocol_free(p: *mut WhlabProtocol) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// `2 log2(1 + sin^2 mu)`
#[no_mangle]
pub extern "C" fn whlab_warmup_mutual_information(mu: f64) -> f64 {
    warmup_mutual_information(mu)
}

/// Ground energy and gap of `H_L + H_R + mu V`.
///
/// # Safety
/// `c` must be a live handle; `e0` and `gap` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn whlab_eternal_gap(
    c: *const WhlabCouplings,
    interaction: WhlabInteraction,
    mu: f64,
    e0: *mut f64,
    gap: *mut f64,
) -> WhlabStatus {
    guard(|| {
        let c = c.as_ref().ok_or_else(|| null("couplings"))?;
        if e0.is_null() || gap.is_null() {
            return Err(null("e0/gap"));
        }
        let s = lib(eternal_spectrum(&c.0, interaction.into(), mu, 4))?;
        *e0 = s.e0;
        *gap = s.gap;
        Ok(())
    })
}

/// Run the experiment described by a TOML file. The artifact directory is
/// written to `dir_buf` (NUL-terminated, truncated to `dir_len`); pass null
/// to skip. `out_root` may be null to use the config's `output` or `out`.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `out_root` null or one;
/// `dir_buf` null or `dir_len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn whlab_run_experiment(
    config_path: *const c_char,
    out_root: *const c_char,
    dir_buf: *mut c_char,
    dir_len: usize,
) -> WhlabStatus {
    guard(|| {
        let cfg = path_arg(config_path, "config_path")?;
        let out = if out_root.is_null() { None } else { Some(path_arg(out_root, "out_root")?) };
        let art = lib(run_experiment(&cfg, &RunOptions { out, seed: None }))?;
        if !dir_buf.is_null() && dir_len > 0 {
            let s = art.dir.to_string_lossy();
            let n = s.len().min(dir_len - 1);
            std::ptr::copy_nonoverlapping(s.as_ptr(), dir_buf.cast::<u8>(), n);
            *dir_buf.add(n) = 0;
        }
        Ok(())
    })
}
