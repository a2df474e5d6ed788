//! C ABI for `relgodunov`.
//!
//! Every function returns an [`RgStatus`]; results go through out-pointers.
//! On failure a message is stored per thread and can be read with
//! [`rg_last_error_message`]. Panics are caught at the boundary and reported
//! as [`RgStatus::Panic`].
//!
//! Handles are created by `*_new_*` functions and must be released with the
//! matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use relgodunov::eos::{BarotropicEos, IdealGasEos};
use relgodunov::godunov::{self, GodunovState4};
use relgodunov::index::IndexFunction;
use relgodunov::shock::{self, ShockKind};
use relgodunov::spacetime::four_velocity;
use relgodunov::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Domain = 3,
    Superluminal = 4,
    NonConvergence = 5,
    NoRoot = 6,
    Unphysical = 7,
    Unsupported = 8,
    Panic = 9,
}

impl From<&Error> for RgStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain { .. } => RgStatus::Domain,
            Error::Superluminal { .. } => RgStatus::Superluminal,
            Error::NonConvergence { .. } => RgStatus::NonConvergence,
            Error::NoRoot(_) | Error::SubsonicUpstream { .. } => RgStatus::NoRoot,
            Error::UnphysicalState { .. } | Error::InvalidState(_) | Error::DegenerateTemperature { .. } => {
                RgStatus::Unphysical
            }
            Error::Unsupported(_) => RgStatus::Unsupported,
            Error::Config(_) | Error::Precondition(_) | Error::Degenerate(_) | Error::Io(_) => {
                RgStatus::InvalidArgument
            }
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn rg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rg_version() -> *const c_char {
    static V: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains NUL"),
    };
    V.as_ptr()
}

enum Fail {
    Lib(Error),
    Null(&'static str),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> RgStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RgStatus::Ok,
        Ok(Err(Fail::Lib(e))) => {
            set_error(format!("{}: {e}", e.kind()));
            RgStatus::from(&e)
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            RgStatus::NullPointer
        }
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RgStatus::Panic
        }
    }
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn slice<'a, T>(p: *const T, n: usize, what: &'static str) -> Result<&'a [T], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts(p, n))
}

unsafe fn slice_mut<'a, T>(p: *mut T, n: usize, what: &'static str) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(Fail::Null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, n))
}

// ---------------------------------------------------------------------------
// Barotropic fluid with its index function
// ---------------------------------------------------------------------------

/// Barotropic equation of state together with its index function.
pub struct RgBarotrope {
    idx: IndexFunction,
}

unsafe fn baro<'a>(h: *const RgBarotrope) -> Result<&'a RgBarotrope, Fail> {
    h.as_ref().ok_or(Fail::Null("handle"))
}

unsafe fn make_baro(eos: Result<BarotropicEos, Error>, p_ref: f64, out_handle: *mut *mut RgBarotrope) -> RgStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let idx = IndexFunction::new(eos?, p_ref)?;
        *slot = Box::into_raw(Box::new(RgBarotrope { idx }));
        Ok(())
    })
}

/// `rho = p / (gamma - 1)`, `1 < gamma <= 2`; the index is 1 at `p_ref`.
///
/// # Safety
/// `out_handle` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rg_barotrope_new_gamma_law(gamma: f64, p_ref: f64, out_handle: *mut *mut RgBarotrope) -> RgStatus {
    make_baro(BarotropicEos::gamma_law(gamma), p_ref, out_handle)
}

/// Barotrope of the isentropic fluid `e(n) = m + kappa n^(gamma - 1)`.
///
/// # Safety
/// `out_handle` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rg_barotrope_new_polytrope(
    m: f64,
    kappa: f64,
    gamma: f64,
    p_ref: f64,
    out_handle: *mut *mut RgBarotrope,
) -> RgStatus {
    make_baro(BarotropicEos::polytrope(m, kappa, gamma), p_ref, out_handle)
}

/// Monotone table of `n` rows `(p[i], rho[i])`.
///
/// # Safety
/// `p` and `rho` must point to `n` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn rg_barotrope_new_tabulated(
    p: *const f64,
    rho: *const f64,
    n: usize,
    p_ref: f64,
    out_handle: *mut *mut RgBarotrope,
) -> RgStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let eos = BarotropicEos::tabulated(slice(p, n, "p")?.to_vec(), slice(rho, n, "rho")?.to_vec())?;
        *slot = Box::into_raw(Box::new(RgBarotrope {
            idx: IndexFunction::new(eos, p_ref)?,
        }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from an `rg_barotrope_new_*` call and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rg_barotrope_free(h: *mut RgBarotrope) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

unsafe fn scalar<F>(h: *const RgBarotrope, x: f64, out_value: *mut f64, f: F) -> RgStatus
where
    F: FnOnce(&IndexFunction, f64) -> Result<f64, Error>,
{
    guard(|| {
        let idx = &baro(h)?.idx;
        let slot = out(out_value, "out_value")?;
        *slot = f(idx, x)?;
        Ok(())
    })
}

/// Energy density `rho_hat(p)`.
///
/// # Safety
/// `h` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_barotrope_rho(h: *const RgBarotrope, p: f64, out_value: *mut f64) -> RgStatus {
    scalar(h, p, out_value, |idx, x| idx.eos().rho_hat(x))
}

/// Sound speed at pressure `p`.
///
/// # Safety
/// `h` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_barotrope_sound_speed(h: *const RgBarotrope, p: f64, out_value: *mut f64) -> RgStatus {
    scalar(h, p, out_value, |idx, x| idx.eos().sound_speed(x))
}

/// Index `f(p)`.
///
/// # Safety
/// `h` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_index_f(h: *const RgBarotrope, p: f64, out_value: *mut f64) -> RgStatus {
    scalar(h, p, out_value, |idx, x| idx.index_f(x))
}

/// `nu(p) = (rho + p) / f`.
///
/// # Safety
/// `h` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_index_nu(h: *const RgBarotrope, p: f64, out_value: *mut f64) -> RgStatus {
    scalar(h, p, out_value, |idx, x| idx.nu(x))
}

/// Pressure `pi(f)`, the inverse of the index.
///
/// # Safety
/// `h` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_index_pi(h: *const RgBarotrope, f: f64, out_value: *mut f64) -> RgStatus {
    scalar(h, f, out_value, |idx, x| idx.pi_of_f(x))
}

/// `|f'(p) (rho + p) - f| / f`.
///
/// # Safety
/// `h` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_index_ode_residual(h: *const RgBarotrope, p: f64, out_value: *mut f64) -> RgStatus {
    scalar(h, p, out_value, |idx, x| idx.ode_residual(x))
}

/// Godunov covector `Upsilon_a = U_a / f(p)` for pressure `p` and 3-velocity `v`.
///
/// # Safety
/// `v` must point to 3 doubles and `out_upsilon` to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rg_to_godunov4(
    h: *const RgBarotrope,
    p: f64,
    v: *const f64,
    out_upsilon: *mut f64,
) -> RgStatus {
    guard(|| {
        let idx = &baro(h)?.idx;
        let v = slice(v, 3, "v")?;
        let o = slice_mut(out_upsilon, 4, "out_upsilon")?;
        let u = four_velocity([v[0], v[1], v[2]])?;
        o.copy_from_slice(&godunov::to_godunov4(idx, p, &u)?.upsilon.c);
        Ok(())
    })
}

/// Pressure and 3-velocity from a Godunov covector.
///
/// # Safety
/// `upsilon` must point to 4 doubles, `out_p` to 1 and `out_v` to 3 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rg_from_godunov4(
    h: *const RgBarotrope,
    upsilon: *const f64,
    out_p: *mut f64,
    out_v: *mut f64,
) -> RgStatus {
    guard(|| {
        let idx = &baro(h)?.idx;
        let y = slice(upsilon, 4, "upsilon")?;
        let (p, u) = godunov::from_godunov4(idx, &GodunovState4::new([y[0], y[1], y[2], y[3]]))?;
        let u = u.raise();
        *out(out_p, "out_p")? = p;
        let v = slice_mut(out_v, 3, "out_v")?;
        for i in 0..3 {
            v[i] = u.c[i + 1] / u.c[0];
        }
        Ok(())
    })
}

/// Flux tensor `T^{ab}` (row-major 4x4, contravariant) of a Godunov covector.
///
/// # Safety
/// `upsilon` must point to 4 doubles and `out_t` to 16 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rg_flux4(h: *const RgBarotrope, upsilon: *const f64, out_t: *mut f64) -> RgStatus {
    guard(|| {
        let idx = &baro(h)?.idx;
        let y = slice(upsilon, 4, "upsilon")?;
        let o = slice_mut(out_t, 16, "out_t")?;
        let t = godunov::flux4(idx, &GodunovState4::new([y[0], y[1], y[2], y[3]]))?;
        for a in 0..4 {
            for b in 0..4 {
                o[4 * a + b] = t[a][b];
            }
        }
        Ok(())
    })
}

/// Additional conserved current `nu U^a` of a Godunov covector.
///
/// # Safety
/// `upsilon` must point to 4 doubles and `out_current` to 4 writable doubles.
#[no_mangle]
pub unsafe extern "C" fn rg_extra_current4(
    h: *const RgBarotrope,
    upsilon: *const f64,
    out_current: *mut f64,
) -> RgStatus {
    guard(|| {
        let idx = &baro(h)?.idx;
        let y = slice(upsilon, 4, "upsilon")?;
        let o = slice_mut(out_current, 4, "out_current")?;
        o.copy_from_slice(&godunov::extra_current4(idx, &GodunovState4::new([y[0], y[1], y[2], y[3]]))?.c);
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RgShock {
    pub p_minus: f64,
    pub p_plus: f64,
    /// Shock-frame speeds of the upstream and downstream states.
    pub v_minus: f64,
    pub v_plus: f64,
    /// `[nu W v]` across the front.
    pub production: f64,
    /// Largest relative jump residual.
    pub residual: f64,
    /// 1 when Lax admissible.
    pub lax: i32,
    /// 1 when the front is linearly degenerate (stiff fluid).
    pub linearly_degenerate: i32,
}

/// Shock joining upstream pressure `p_minus` to downstream `p_plus`.
///
/// # Safety
/// `h` must be a live handle and `out_shock` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_shock_barotropic(
    h: *const RgBarotrope,
    p_minus: f64,
    p_plus: f64,
    out_shock: *mut RgShock,
) -> RgStatus {
    guard(|| {
        let idx = &baro(h)?.idx;
        let slot = out(out_shock, "out_shock")?;
        let sol = shock::rh_solve_barotropic(idx.eos(), p_minus, p_plus)?;
        *slot = RgShock {
            p_minus,
            p_plus,
            v_minus: sol.v_minus,
            v_plus: sol.v_plus,
            production: shock::nu_production(idx, &sol)?,
            residual: sol.residuals[0].max(sol.residuals[1]),
            lax: shock::lax_admissible(idx.eos(), &sol) as i32,
            linearly_degenerate: (sol.kind == ShockKind::LinearlyDegenerate) as i32,
        };
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// Ideal gas
// ---------------------------------------------------------------------------

/// Ideal gas `e(n, sigma) = m + k n^(gamma - 1) exp(sigma / c_v)`.
pub struct RgIdealGas {
    eos: IdealGasEos,
}

unsafe fn gas<'a>(h: *const RgIdealGas) -> Result<&'a RgIdealGas, Fail> {
    h.as_ref().ok_or(Fail::Null("handle"))
}

/// # Safety
/// `out_handle` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn rg_ideal_gas_new(m: f64, k: f64, c_v: f64, gamma: f64, out_handle: *mut *mut RgIdealGas) -> RgStatus {
    guard(|| {
        let slot = out(out_handle, "out_handle")?;
        let eos = IdealGasEos::new(m, k, c_v, gamma)?;
        *slot = Box::into_raw(Box::new(RgIdealGas { eos }));
        Ok(())
    })
}

/// # Safety
/// `h` must come from [`rg_ideal_gas_new`] and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn rg_ideal_gas_free(h: *mut RgIdealGas) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Generating function `X_hat(theta, psi_4)`, equal to the pressure.
///
/// # Safety
/// `h` must be a live handle and `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_ideal_gas_xhat(h: *const RgIdealGas, theta: f64, psi4: f64, out_value: *mut f64) -> RgStatus {
    guard(|| {
        let g = &gas(h)?.eos;
        *out(out_value, "out_value")? = godunov::xhat_ideal(g, theta, psi4)?;
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RgIdealShock {
    pub p_minus: f64,
    pub p_plus: f64,
    pub n_plus: f64,
    pub sigma_plus: f64,
    pub v_plus: f64,
    /// `n W v (sigma_+ - sigma_-)`.
    pub entropy_production: f64,
    pub residual: f64,
}

/// Shock with upstream `(n_minus, sigma_minus)` entering at speed `v_minus`.
///
/// # Safety
/// `h` must be a live handle and `out_shock` writable.
#[no_mangle]
pub unsafe extern "C" fn rg_ideal_gas_shock(
    h: *const RgIdealGas,
    n_minus: f64,
    sigma_minus: f64,
    v_minus: f64,
    out_shock: *mut RgIdealShock,
) -> RgStatus {
    guard(|| {
        let g = &gas(h)?.eos;
        let slot = out(out_shock, "out_shock")?;
        let sol = shock::rh_solve_ideal(g, n_minus, sigma_minus, v_minus)?;
        *slot = RgIdealShock {
            p_minus: sol.p_minus,
            p_plus: sol.p_plus,
            n_plus: sol.n_plus.unwrap_or(f64::NAN),
            sigma_plus: sol.sigma_plus.unwrap_or(f64::NAN),
            v_plus: sol.v_plus,
            entropy_production: shock::entropy_production(&sol).unwrap_or(f64::NAN),
            residual: sol.residuals.iter().fold(0.0f64, |m, &r| m.max(r)),
        };
        Ok(())
    })
}
