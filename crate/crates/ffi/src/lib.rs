//! C ABI over the `fano-lines` core.
//!
//! Fixtures are opaque handles. Results come back as JSON strings that the
//! caller releases with [`fl_string_free`]. Every entry point returns an
//! [`FlStatus`]; the message for the last failure on the calling thread is
//! available from [`fl_last_error`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fano_lines::fanomaps;
use fano_lines::field::FieldElement;
use fano_lines::fourfold::{Fixture, FourfoldKind};
use fano_lines::lines::{LengthTwoScheme, ProjectiveLine};
use fano_lines::localmodel;
use fano_lines::suite::{self, SampleField, Suite, SuiteOptions};

/// Status codes returned by every function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidArgument = 4,
    ComputationError = 5,
    /// The report was produced and contains failing checks.
    ChecksFailed = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlKind {
    Nodal = 0,
    CuspidalCyclic = 1,
}

/// Opaque fixture handle.
pub struct FlFixture {
    inner: Fixture,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Failure(FlStatus, String);

fn fail<E: std::fmt::Display>(status: FlStatus) -> impl Fn(E) -> Failure {
    move |e| Failure(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<FlStatus, Failure>) -> FlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(s)) => {
            if s == FlStatus::Ok {
                set_error("");
            }
            s
        }
        Ok(Err(Failure(s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            FlStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(FlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure(FlStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn handle<'a>(h: *const FlFixture) -> Result<&'a Fixture, Failure> {
    h.as_ref().map(|f| &f.inner).ok_or_else(|| Failure(FlStatus::NullPointer, "fixture handle is null".into()))
}

unsafe fn write_out<T>(out: *mut *mut T, value: *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(FlStatus::NullPointer, "output pointer is null".into()));
    }
    *out = value;
    Ok(())
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(FlStatus::NullPointer, "output pointer is null".into()));
    }
    *out = CString::new(s).map_err(fail(FlStatus::ComputationError))?.into_raw();
    Ok(())
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable")
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn fl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, static storage.
#[no_mangle]
pub extern "C" fn fl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Parses a fixture from JSON text.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_fixture_from_json(json: *const c_char, out: *mut *mut FlFixture) -> FlStatus {
    guard(|| {
        let t = text(json, "json")?;
        let inner = Fixture::from_json(t).map_err(fail(FlStatus::ParseError))?;
        write_out(out, Box::into_raw(Box::new(FlFixture { inner })))?;
        Ok(FlStatus::Ok)
    })
}

/// Reads and parses a fixture file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_fixture_load(path: *const c_char, out: *mut *mut FlFixture) -> FlStatus {
    guard(|| {
        let p = text(path, "path")?;
        let inner = suite::load_fixture(p).map_err(|e| match e {
            suite::SuiteError::Io { .. } => Failure(FlStatus::InvalidArgument, e.to_string()),
            _ => Failure(FlStatus::ParseError, e.to_string()),
        })?;
        write_out(out, Box::into_raw(Box::new(FlFixture { inner })))?;
        Ok(FlStatus::Ok)
    })
}

/// Releases a fixture handle. Null is ignored.
///
/// # Safety
/// `fixture` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fl_fixture_free(fixture: *mut FlFixture) {
    if !fixture.is_null() {
        drop(Box::from_raw(fixture));
    }
}

/// # Safety
/// `fixture` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_fixture_kind(fixture: *const FlFixture, out: *mut FlKind) -> FlStatus {
    guard(|| {
        let fx = handle(fixture)?;
        let out = out.as_mut().ok_or_else(|| Failure(FlStatus::NullPointer, "output pointer is null".into()))?;
        *out = match fx.kind() {
            FourfoldKind::Nodal => FlKind::Nodal,
            FourfoldKind::CuspidalCyclic => FlKind::CuspidalCyclic,
        };
        Ok(FlStatus::Ok)
    })
}

/// Number of surface points stored in the fixture.
///
/// # Safety
/// `fixture` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_fixture_point_count(fixture: *const FlFixture, out: *mut usize) -> FlStatus {
    guard(|| {
        let fx = handle(fixture)?;
        let out = out.as_mut().ok_or_else(|| Failure(FlStatus::NullPointer, "output pointer is null".into()))?;
        *out = fx.points.len();
        Ok(FlStatus::Ok)
    })
}

/// The fixture serialized back to its canonical JSON form.
///
/// # Safety
/// `fixture` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_fixture_to_json(fixture: *const FlFixture, out: *mut *mut c_char) -> FlStatus {
    guard(|| {
        let fx = handle(fixture)?;
        write_string(out, fx.to_json())?;
        Ok(FlStatus::Ok)
    })
}

/// Runs a suite (`validate`, `phi`, `local`, `divisors`, `symmetry`, `all`)
/// with sample field `q`, `q_sqrt_d` or `q_zeta3` (null means `q`). The JSON
/// report is written to `out` both for `Ok` and for `ChecksFailed`.
///
/// # Safety
/// String arguments must be NUL-terminated (or null where allowed), the
/// handle live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn fl_run_suite(
    fixture: *const FlFixture,
    suite_name: *const c_char,
    seed: u64,
    samples: usize,
    field: *const c_char,
    out: *mut *mut c_char,
) -> FlStatus {
    guard(|| {
        let fx = handle(fixture)?;
        let which: Suite = text(suite_name, "suite")?.parse().map_err(fail(FlStatus::InvalidArgument))?;
        let field: SampleField = if field.is_null() {
            SampleField::Rational
        } else {
            text(field, "field")?.parse().map_err(fail(FlStatus::InvalidArgument))?
        };
        let opts = SuiteOptions { seed, samples, field, ..SuiteOptions::default() };
        let report = suite::run_suite(fx, which, &opts);
        write_string(out, report.to_json())?;
        Ok(if report.passed() { FlStatus::Ok } else { FlStatus::ChecksFailed })
    })
}

/// `phi` of a scheme given as JSON, e.g.
/// `{"variant":"reduced","points":[[...],[...]]}`.
///
/// # Safety
/// As for [`fl_run_suite`].
#[no_mangle]
pub unsafe extern "C" fn fl_phi(
    fixture: *const FlFixture,
    scheme_json: *const c_char,
    out: *mut *mut c_char,
) -> FlStatus {
    guard(|| {
        let fx = handle(fixture)?;
        let xi: LengthTwoScheme =
            serde_json::from_str(text(scheme_json, "scheme")?).map_err(fail(FlStatus::ParseError))?;
        xi.validate(&fx.fourfold).map_err(fail(FlStatus::InvalidArgument))?;
        let res = fanomaps::phi(&fx.fourfold, &xi).map_err(fail(FlStatus::ComputationError))?;
        write_string(out, to_json(&res))?;
        Ok(FlStatus::Ok)
    })
}

/// `phi_inverse` of a line given as JSON `[[six coordinates], [six coordinates]]`.
///
/// # Safety
/// As for [`fl_run_suite`].
#[no_mangle]
pub unsafe extern "C" fn fl_phi_inverse(
    fixture: *const FlFixture,
    line_json: *const c_char,
    out: *mut *mut c_char,
) -> FlStatus {
    guard(|| {
        let fx = handle(fixture)?;
        let pts: [Vec<FieldElement>; 2] =
            serde_json::from_str(text(line_json, "line")?).map_err(fail(FlStatus::ParseError))?;
        let line = ProjectiveLine::from_span(&pts[0], &pts[1]).map_err(fail(FlStatus::InvalidArgument))?;
        let res = fanomaps::phi_inverse(&fx.fourfold, &line).map_err(fail(FlStatus::ComputationError))?;
        write_string(out, to_json(&res))?;
        Ok(FlStatus::Ok)
    })
}

/// Transversal singularity type at the fixture point `index`.
///
/// # Safety
/// As for [`fl_run_suite`].
#[no_mangle]
pub unsafe extern "C" fn fl_transversal_type(
    fixture: *const FlFixture,
    index: usize,
    out: *mut *mut c_char,
) -> FlStatus {
    guard(|| {
        let fx = handle(fixture)?;
        let s = fx
            .points
            .get(index)
            .ok_or_else(|| Failure(FlStatus::InvalidArgument, format!("point index {index} out of range")))?;
        let fr = localmodel::adapt_frame(&fx.fourfold, s).map_err(fail(FlStatus::ComputationError))?;
        let v = localmodel::classify_transversal_type(&fr).map_err(fail(FlStatus::ComputationError))?;
        write_string(out, to_json(&v))?;
        Ok(FlStatus::Ok)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn fl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
