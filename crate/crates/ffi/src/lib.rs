//! C ABI for `jholo`.
//!
//! Surfaces are built into opaque [`JholoGrid`] handles. Every fallible call
//! returns a [`JholoStatus`]; on failure a description is available from
//! [`jholo_last_error_message`] on the same thread. Strings returned by the
//! library are freed with [`jholo_string_free`], grids with
//! [`jholo_grid_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use jholo::ambient::ambient_by_id;
use jholo::cli::{execute, Command, RunRecord, ScenarioConfig};
use jholo::immersion::{surface_by_id, SurfaceGrid};
use jholo::potential::distance_squared_jet;
use jholo::variation::{
    area_path_oracle, destabilize, first_variation, Certificate, DestabilizeSettings, ErrorRecord,
    OracleSettings, VariationPath, KILLING, SADDLE,
};
use jholo::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JholoStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidInput = 3,
    ConfigError = 4,
    UnknownId = 5,
    ImmersionViolation = 6,
    DegenerateFrame = 7,
    OutsideChart = 8,
    TamingViolation = 9,
    NumericalConsistency = 10,
    BufferTooSmall = 11,
    Panic = 12,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JholoCertificate {
    Holomorphic = 0,
    Destabilized = 1,
    Inconclusive = 2,
}

/// Headline numbers of a destabilizer search. Fields that do not apply
/// are NaN.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct JholoDestabilizeSummary {
    pub certificate: JholoCertificate,
    /// Node of largest Kähler angle (first in row-major order).
    pub node: usize,
    pub max_sin_alpha: f64,
    /// `A'(0)` of the distance-squared path.
    pub distance_squared_a_prime: f64,
    /// `A''(0)` of the saddle normal-extension path.
    pub saddle_a_second: f64,
    /// `D₂` of the saddle path at `node`.
    pub saddle_d2: f64,
    /// `A''(0)` of the Killing path (`CP^N` only).
    pub killing_a_second: f64,
    /// Oracle value for `killing_a_second`.
    pub killing_oracle_a_second: f64,
    /// Whether every formula matched its finite-difference oracle.
    pub consistent: bool,
}

/// A surface sampled on a quadrature grid.
pub struct JholoGrid {
    grid: SurfaceGrid,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(e: &Error) -> JholoStatus {
    match e {
        Error::ImmersionViolation { .. } => JholoStatus::ImmersionViolation,
        Error::DegenerateFrame { .. } => JholoStatus::DegenerateFrame,
        Error::OutsideChart => JholoStatus::OutsideChart,
        Error::TamingViolation { .. } => JholoStatus::TamingViolation,
        Error::Consistency { .. } => JholoStatus::NumericalConsistency,
        Error::UnknownId(_) => JholoStatus::UnknownId,
        Error::InvalidInput(_) => JholoStatus::InvalidInput,
        Error::Config(_) => JholoStatus::ConfigError,
    }
}

/// Run `f`, translating errors and panics into a status.
fn guard<F>(f: F) -> JholoStatus
where
    F: FnOnce() -> Result<(), (JholoStatus, String)>,
{
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            JholoStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            JholoStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (JholoStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (JholoStatus, String) {
    (JholoStatus::NullArgument, format!("`{what}` is null"))
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (JholoStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| (JholoStatus::InvalidUtf8, format!("`{what}` is not UTF-8")))
}

unsafe fn grid_ref<'a>(g: *const JholoGrid) -> Result<&'a SurfaceGrid, (JholoStatus, String)> {
    g.as_ref().map(|g| &g.grid).ok_or_else(|| null("grid"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn jholo_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Description of the last failure on this thread, or NULL. Valid until
/// the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn jholo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Build a catalog surface on an `n1 × n2` grid. `ambient_id` may be NULL
/// to use the surface's own ambient.
///
/// # Safety
/// String arguments must be NULL or NUL-terminated; `out` must be valid
/// for writes.
#[no_mangle]
pub unsafe extern "C" fn jholo_grid_new(
    surface_id: *const c_char,
    ambient_id: *const c_char,
    n1: usize,
    n2: usize,
    out: *mut *mut JholoGrid,
) -> JholoStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let sid = read_str(surface_id, "surface_id")?;
        let (surface, default_amb) = surface_by_id(sid).map_err(lib_err)?;
        let amb = if ambient_id.is_null() {
            default_amb
        } else {
            read_str(ambient_id, "ambient_id")?
        };
        let model = ambient_by_id(amb).map_err(lib_err)?;
        surface.check_closed(model.as_ref()).map_err(lib_err)?;
        let grid = SurfaceGrid::build(model, Arc::new(surface), [n1, n2]).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(JholoGrid { grid }));
        Ok(())
    })
}

/// Release a grid. NULL is ignored.
///
/// # Safety
/// `grid` must come from [`jholo_grid_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jholo_grid_free(grid: *mut JholoGrid) {
    if !grid.is_null() {
        drop(Box::from_raw(grid));
    }
}

/// Number of grid nodes, or 0 for NULL.
///
/// # Safety
/// `grid` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn jholo_grid_len(grid: *const JholoGrid) -> usize {
    grid.as_ref().map_or(0, |g| g.grid.len())
}

/// Area of the surface for the base form.
///
/// # Safety
/// `grid` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jholo_grid_area(grid: *const JholoGrid, out: *mut f64) -> JholoStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = g.area();
        Ok(())
    })
}

/// `cos α` and `sin α` at every node, in row-major node order. Either
/// output may be NULL.
///
/// # Safety
/// Non-NULL outputs must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn jholo_grid_kahler_angles(
    grid: *const JholoGrid,
    cos_out: *mut f64,
    sin_out: *mut f64,
    len: usize,
) -> JholoStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        if len < g.len() {
            return Err((
                JholoStatus::BufferTooSmall,
                format!("need {} entries, got {len}", g.len()),
            ));
        }
        for n in g.nodes() {
            if !cos_out.is_null() {
                *cos_out.add(n.index) = n.cos_alpha();
            }
            if !sin_out.is_null() {
                *sin_out.add(n.index) = n.sin_alpha();
            }
        }
        Ok(())
    })
}

/// First variation along the distance-squared potential, by formula and by
/// the finite-difference area oracle. `oracle` may be NULL to skip it.
///
/// # Safety
/// `grid` must be a live handle; outputs must be NULL or valid for writes
/// (`formula` must not be NULL).
#[no_mangle]
pub unsafe extern "C" fn jholo_first_variation_distance_squared(
    grid: *const JholoGrid,
    formula: *mut f64,
    oracle: *mut f64,
) -> JholoStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        let formula = formula.as_mut().ok_or_else(|| null("formula"))?;
        let path = VariationPath::linear_potential(g, &distance_squared_jet(g));
        *formula = first_variation(g, &path.first);
        if let Some(o) = oracle.as_mut() {
            *o = area_path_oracle(g, &path, &OracleSettings::default())
                .map_err(lib_err)?
                .a_prime;
        }
        Ok(())
    })
}

/// Run the destabilizer search with default settings.
///
/// # Safety
/// `grid` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jholo_destabilize(
    grid: *const JholoGrid,
    out: *mut JholoDestabilizeSummary,
) -> JholoStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let d = destabilize(g, &DestabilizeSettings::default()).map_err(lib_err)?;
        let saddle = d.path(SADDLE);
        let killing = d.path(KILLING);
        *out = JholoDestabilizeSummary {
            certificate: match d.certificate {
                Certificate::Holomorphic => JholoCertificate::Holomorphic,
                Certificate::Destabilized => JholoCertificate::Destabilized,
                Certificate::Inconclusive => JholoCertificate::Inconclusive,
            },
            node: d.q,
            max_sin_alpha: d.max_sin_alpha,
            distance_squared_a_prime: d.paths.first().map_or(f64::NAN, |p| p.a_prime),
            saddle_a_second: saddle.map_or(f64::NAN, |p| p.a_second),
            saddle_d2: saddle.and_then(|p| p.pointwise).map_or(f64::NAN, |p| p.d2),
            killing_a_second: killing.map_or(f64::NAN, |p| p.a_second),
            killing_oracle_a_second: killing.map_or(f64::NAN, |p| p.oracle_a_second),
            consistent: d.consistent(),
        };
        Ok(())
    })
}

/// Run a batch command (`angle`, `first-variation`, `second-variation`,
/// `destabilize`, `killing-check`, `invariance`) on a TOML scenario held
/// in memory. On success `*report_json` receives the run record as JSON
/// and `*exit_code` the command-line exit code it corresponds to.
///
/// # Safety
/// Strings must be NUL-terminated; outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn jholo_run_scenario(
    command: *const c_char,
    config_toml: *const c_char,
    report_json: *mut *mut c_char,
    exit_code: *mut i32,
) -> JholoStatus {
    guard(|| {
        if report_json.is_null() {
            return Err(null("report_json"));
        }
        *report_json = ptr::null_mut();
        let exit_code = exit_code.as_mut().ok_or_else(|| null("exit_code"))?;
        let name = read_str(command, "command")?;
        let cmd = Command::parse(name).ok_or_else(|| {
            (
                JholoStatus::InvalidInput,
                format!("unknown command `{name}`"),
            )
        })?;
        let scenario = ScenarioConfig::parse(read_str(config_toml, "config_toml")?)
            .and_then(|c| c.resolve())
            .map_err(lib_err)?;
        let (outcome, error) = match execute(cmd, &scenario) {
            Ok(o) => (Some(o), None),
            Err(e) => (None, Some(e)),
        };
        let code = match (&outcome, &error) {
            (Some(o), _) => o.status as i32,
            (_, Some(e)) => jholo::cli::status_of(e) as i32,
            _ => unreachable!(),
        };
        let record = RunRecord {
            version: jholo::VERSION,
            command: cmd,
            config_hash: Some(scenario.hash.clone()),
            config: Some(&scenario.config),
            exit_code: code,
            report: outcome.as_ref().map(|o| &o.report),
            error: error.as_ref().map(ErrorRecord::from),
        };
        let json = serde_json::to_string(&record)
            .map_err(|e| (JholoStatus::InvalidInput, e.to_string()))?;
        *report_json = CString::new(json)
            .map_err(|e| (JholoStatus::InvalidInput, e.to_string()))?
            .into_raw();
        *exit_code = code;
        Ok(())
    })
}

/// Release a string returned by the library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn jholo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
