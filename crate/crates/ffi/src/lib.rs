//! C interface to `irc-core`.
//!
//! Every fallible function returns an [`IrcStatus`]. On failure a message is
//! kept per thread and can be fetched with [`irc_last_error_message`].
//! Objects cross the boundary as opaque pointers and are released with the
//! matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use irc_core::det_class::{self, DetError, DetInput};
use irc_core::dm_region::{theorem1_region, RegionError};
use irc_core::gauss::{self, CSwap, GaussConfig, HkParams};
use irc_core::io::{self, ErrorKind, InputError};
use irc_core::prob::ProbError;
use irc_core::{NamedJoint, Polygon2D, RateInequality, RateRegion2D, Variable};

/// Pair `C1` with the destination-4 term in the mixed bound (the default).
pub const IRC_CSWAP_PATTERN: i32 = 0;
/// Keep the pairing as printed.
pub const IRC_CSWAP_VERBATIM: i32 = 1;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IrcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed JSON or a value outside the model.
    Schema = 3,
    /// A probability table that is not a pmf.
    Numeric = 4,
    OutOfRange = 5,
    Panic = 6,
}

/// Gaussian channel gains, power and link rate.
pub struct IrcGaussConfig {
    inner: GaussConfig,
}

/// Rate inequalities together with their frontier polygon.
pub struct IrcRegion {
    bounds: Vec<RateInequality>,
    region: RateRegion2D,
    frontier: Polygon2D,
}

/// A joint pmf over named discrete variables.
pub struct IrcJoint {
    inner: NamedJoint,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(IrcStatus, String);

impl Failure {
    fn new(status: IrcStatus, message: impl Into<String>) -> Self {
        Self(status, message.into())
    }
}

fn prob_status(e: &ProbError) -> IrcStatus {
    match e {
        ProbError::NotNormalized { .. } | ProbError::InvalidEntry { .. } => IrcStatus::Numeric,
        _ => IrcStatus::Schema,
    }
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        let status = match e.kind {
            ErrorKind::Schema => IrcStatus::Schema,
            ErrorKind::Numeric => IrcStatus::Numeric,
        };
        Self(status, e.to_string())
    }
}

impl From<RegionError> for Failure {
    fn from(e: RegionError) -> Self {
        let status = match &e {
            RegionError::Prob(p) => prob_status(p),
            _ => IrcStatus::Schema,
        };
        Self(status, e.to_string())
    }
}

impl From<DetError> for Failure {
    fn from(e: DetError) -> Self {
        let status = match &e {
            DetError::Prob(p) => prob_status(p),
            DetError::Region(RegionError::Prob(p)) => prob_status(p),
            _ => IrcStatus::Schema,
        };
        Self(status, e.to_string())
    }
}

impl From<gauss::GaussError> for Failure {
    fn from(e: gauss::GaussError) -> Self {
        Self(IrcStatus::InvalidArgument, e.to_string())
    }
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> IrcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => IrcStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            IrcStatus::Panic
        }
    }
}

fn out<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    // SAFETY: callers pass either NULL or a pointer valid for writes.
    unsafe { p.as_mut() }.ok_or_else(|| Failure::new(IrcStatus::NullPointer, format!("{what} is NULL")))
}

fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: callers pass either NULL or a live object from this library.
    unsafe { p.as_ref() }.ok_or_else(|| Failure::new(IrcStatus::NullPointer, format!("{what} is NULL")))
}

fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::new(IrcStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: non-null and NUL-terminated by contract.
    unsafe { CStr::from_ptr(p) }
        .to_str()
        .map_err(|_| Failure::new(IrcStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn slice<'a, T>(p: *const T, len: usize, what: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure::new(IrcStatus::NullPointer, format!("{what} is NULL")));
    }
    // SAFETY: `p` points to `len` readable elements by contract.
    Ok(unsafe { std::slice::from_raw_parts(p, len) })
}

fn names<'a>(p: *const *const c_char, len: usize, what: &str) -> Result<Vec<&'a str>, Failure> {
    slice(p, len, what)?.iter().map(|&s| text(s, what)).collect()
}

fn cswap(code: i32) -> Result<CSwap, Failure> {
    match code {
        IRC_CSWAP_PATTERN => Ok(CSwap::Pattern),
        IRC_CSWAP_VERBATIM => Ok(CSwap::Verbatim),
        c => Err(Failure::new(
            IrcStatus::InvalidArgument,
            format!("unknown c-swap code {c}"),
        )),
    }
}

fn make_region(bounds: Vec<RateInequality>) -> Result<Box<IrcRegion>, Failure> {
    let region = RateRegion2D::new(bounds.clone()).map_err(|e| Failure::new(IrcStatus::Numeric, e.to_string()))?;
    let frontier = region.frontier();
    Ok(Box::new(IrcRegion {
        bounds,
        region,
        frontier,
    }))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn irc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or NULL when the last call
/// succeeded. Release it with `irc_string_free`.
#[no_mangle]
pub extern "C" fn irc_last_error_message() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow().as_ref() {
        Some(m) => m.clone().into_raw(),
        None => ptr::null_mut(),
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn irc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `0.5 log2(1 + x)` in bits.
///
/// # Safety
/// `out_value` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_cfn(x: f64, out_value: *mut f64) -> IrcStatus {
    guard(|| {
        *out(out_value, "out_value")? = gauss::cfn(x)?;
        Ok(())
    })
}

/// # Safety
/// `out_config` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_gauss_config_new(
    g31: f64,
    g32: f64,
    g41: f64,
    g42: f64,
    g51: f64,
    g52: f64,
    power: f64,
    r0: f64,
    out_config: *mut *mut IrcGaussConfig,
) -> IrcStatus {
    guard(|| {
        let slot = out(out_config, "out_config")?;
        let inner = GaussConfig {
            g31,
            g32,
            g41,
            g42,
            g51,
            g52,
            p: power,
            r0,
        };
        inner.validate()?;
        *slot = Box::into_raw(Box::new(IrcGaussConfig { inner }));
        Ok(())
    })
}

/// The reference gains at the given power and link rate.
///
/// # Safety
/// `out_config` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_gauss_config_reference(
    power: f64,
    r0: f64,
    out_config: *mut *mut IrcGaussConfig,
) -> IrcStatus {
    guard(|| {
        let slot = out(out_config, "out_config")?;
        let inner = GaussConfig::reference(power, r0);
        inner.validate()?;
        *slot = Box::into_raw(Box::new(IrcGaussConfig { inner }));
        Ok(())
    })
}

/// # Safety
/// `config` must be NULL or come from `irc_gauss_config_new`.
#[no_mangle]
pub unsafe extern "C" fn irc_gauss_config_free(config: *mut IrcGaussConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// All bounds of the Gaussian region at one parameter point.
///
/// # Safety
/// `config` must be live and `out_region` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_gauss_region(
    config: *const IrcGaussConfig,
    alpha1: f64,
    alpha2: f64,
    sigma2: f64,
    c_swap: i32,
    out_region: *mut *mut IrcRegion,
) -> IrcStatus {
    guard(|| {
        let cfg = &get(config, "config")?.inner;
        let slot = out(out_region, "out_region")?;
        let hk = HkParams::new(alpha1, alpha2, sigma2)?;
        let bounds = gauss::gauss_region_with(cfg, &hk, cswap(c_swap)?);
        *slot = Box::into_raw(make_region(bounds)?);
        Ok(())
    })
}

/// # Safety
/// `config` must be live and `out_value` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_gauss_sum_rate(
    config: *const IrcGaussConfig,
    alpha1: f64,
    alpha2: f64,
    sigma2: f64,
    c_swap: i32,
    out_value: *mut f64,
) -> IrcStatus {
    guard(|| {
        let cfg = &get(config, "config")?.inner;
        let slot = out(out_value, "out_value")?;
        let hk = HkParams::new(alpha1, alpha2, sigma2)?;
        *slot = gauss::sum_rate_with(cfg, &hk, cswap(c_swap)?);
        Ok(())
    })
}

/// Grid search over the power splits and the compression noise values in
/// `sigmas`. Any of the output pointers except `out_sum_rate` may be NULL.
///
/// # Safety
/// `sigmas` must point to `n_sigmas` doubles; outputs must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn irc_gauss_optimize(
    config: *const IrcGaussConfig,
    alpha_step: f64,
    sigmas: *const f64,
    n_sigmas: usize,
    c_swap: i32,
    out_sum_rate: *mut f64,
    out_alpha1: *mut f64,
    out_alpha2: *mut f64,
    out_sigma2: *mut f64,
) -> IrcStatus {
    guard(|| {
        let cfg = &get(config, "config")?.inner;
        let sigmas = slice(sigmas, n_sigmas, "sigmas")?;
        let slot = out(out_sum_rate, "out_sum_rate")?;
        let best = gauss::optimize_sum_rate_with(cfg, alpha_step, sigmas, cswap(c_swap)?)?;
        *slot = best.sum_rate;
        for (p, v) in [
            (out_alpha1, best.params.alpha1),
            (out_alpha2, best.params.alpha2),
            (out_sigma2, best.params.sigma2),
        ] {
            if let Some(p) = p.as_mut() {
                *p = v;
            }
        }
        Ok(())
    })
}

unsafe fn baseline(
    config: *const IrcGaussConfig,
    sigmas: *const f64,
    n_sigmas: usize,
    c_swap: i32,
    out_value: *mut f64,
    f: fn(&GaussConfig, &[f64], CSwap) -> gauss::Result<f64>,
) -> IrcStatus {
    guard(|| {
        let cfg = &get(config, "config")?.inner;
        let sigmas = slice(sigmas, n_sigmas, "sigmas")?;
        let slot = out(out_value, "out_value")?;
        *slot = f(cfg, sigmas, cswap(c_swap)?)?;
        Ok(())
    })
}

/// Best sum rate when both users treat all interference as noise.
///
/// # Safety
/// As for `irc_gauss_optimize`.
#[no_mangle]
pub unsafe extern "C" fn irc_gauss_baseline_ian(
    config: *const IrcGaussConfig,
    sigmas: *const f64,
    n_sigmas: usize,
    c_swap: i32,
    out_value: *mut f64,
) -> IrcStatus {
    baseline(config, sigmas, n_sigmas, c_swap, out_value, gauss::baseline_ian_with)
}

/// Best sum rate when both users decode all interference.
///
/// # Safety
/// As for `irc_gauss_optimize`.
#[no_mangle]
pub unsafe extern "C" fn irc_gauss_baseline_snd(
    config: *const IrcGaussConfig,
    sigmas: *const f64,
    n_sigmas: usize,
    c_swap: i32,
    out_value: *mut f64,
) -> IrcStatus {
    baseline(config, sigmas, n_sigmas, c_swap, out_value, gauss::baseline_snd_with)
}

/// Achievable region of a discrete memoryless channel, from the same JSON
/// documents the command line reads.
///
/// # Safety
/// Both strings must be NUL-terminated; `out_region` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_dm_eval_json(
    channel_json: *const c_char,
    input_json: *const c_char,
    out_region: *mut *mut IrcRegion,
) -> IrcStatus {
    guard(|| {
        let channel = io::parse_channel(text(channel_json, "channel_json")?)?;
        let input = io::parse_input(text(input_json, "input_json")?)?;
        let slot = out(out_region, "out_region")?;
        *slot = Box::into_raw(make_region(theorem1_region(&channel, &input)?)?);
        Ok(())
    })
}

/// Capacity region of an injective deterministic channel. `input_json` may be
/// NULL for uniform independent inputs.
///
/// # Safety
/// Strings must be NULL or NUL-terminated; `out_region` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_det_eval_json(
    spec_json: *const c_char,
    input_json: *const c_char,
    out_region: *mut *mut IrcRegion,
) -> IrcStatus {
    guard(|| {
        let spec = io::parse_det_spec(text(spec_json, "spec_json")?)?;
        let report = det_class::validate(&spec);
        if !report.passed() {
            return Err(DetError::Invalid(report).into());
        }
        let input = if input_json.is_null() {
            DetInput::product(
                vec![1.0 / spec.x1_size as f64; spec.x1_size],
                vec![1.0 / spec.x2_size as f64; spec.x2_size],
            )?
        } else {
            io::parse_det_input(text(input_json, "input_json")?)?
        };
        let slot = out(out_region, "out_region")?;
        *slot = Box::into_raw(make_region(det_class::theorem2_region(&spec, &input)?)?);
        Ok(())
    })
}

/// Number of inequalities, or 0 for NULL.
///
/// # Safety
/// `region` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn irc_region_len(region: *const IrcRegion) -> usize {
    region.as_ref().map_or(0, |r| r.bounds.len())
}

/// Inequality `a R1 + b R2 <= rhs` at `index`, in evaluation order.
///
/// # Safety
/// `region` must be live; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_region_get(
    region: *const IrcRegion,
    index: usize,
    out_a: *mut u8,
    out_b: *mut u8,
    out_rhs: *mut f64,
) -> IrcStatus {
    guard(|| {
        let r = get(region, "region")?;
        let b = r.bounds.get(index).ok_or_else(|| {
            Failure::new(
                IrcStatus::OutOfRange,
                format!("index {index} of {} bounds", r.bounds.len()),
            )
        })?;
        *out(out_a, "out_a")? = b.a;
        *out(out_b, "out_b")? = b.b;
        *out(out_rhs, "out_rhs")? = b.rhs;
        Ok(())
    })
}

/// Number of frontier vertices, or 0 for NULL or an empty region.
///
/// # Safety
/// `region` must be NULL or live.
#[no_mangle]
pub unsafe extern "C" fn irc_region_vertex_count(region: *const IrcRegion) -> usize {
    region.as_ref().map_or(0, |r| r.frontier.vertices().len())
}

/// # Safety
/// `region` must be live; outputs valid for writes.
#[no_mangle]
pub unsafe extern "C" fn irc_region_vertex(
    region: *const IrcRegion,
    index: usize,
    out_r1: *mut f64,
    out_r2: *mut f64,
) -> IrcStatus {
    guard(|| {
        let r = get(region, "region")?;
        let v = r.frontier.vertices();
        let &(x, y) = v
            .get(index)
            .ok_or_else(|| Failure::new(IrcStatus::OutOfRange, format!("index {index} of {} vertices", v.len())))?;
        *out(out_r1, "out_r1")? = x;
        *out(out_r2, "out_r2")? = y;
        Ok(())
    })
}

/// Maximum of `w1 R1 + w2 R2` over the region and a maximizing point.
/// `out_r1` and `out_r2` may be NULL.
///
/// # Safety
/// `region` must be live; outputs NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn irc_region_max_weighted(
    region: *const IrcRegion,
    w1: f64,
    w2: f64,
    out_value: *mut f64,
    out_r1: *mut f64,
    out_r2: *mut f64,
) -> IrcStatus {
    guard(|| {
        let r = get(region, "region")?;
        let slot = out(out_value, "out_value")?;
        let (v, (x, y)) = r
            .region
            .max_weighted(w1, w2)
            .map_err(|e| Failure::new(IrcStatus::InvalidArgument, e.to_string()))?;
        *slot = v;
        if let Some(p) = out_r1.as_mut() {
            *p = x;
        }
        if let Some(p) = out_r2.as_mut() {
            *p = y;
        }
        Ok(())
    })
}

/// # Safety
/// `region` must be NULL or come from this library.
#[no_mangle]
pub unsafe extern "C" fn irc_region_free(region: *mut IrcRegion) {
    if !region.is_null() {
        drop(Box::from_raw(region));
    }
}

/// Joint pmf over `n_vars` variables with the given names and alphabet
/// sizes; `table` is row-major with the first variable outermost.
///
/// # Safety
/// `names` and `sizes` point to `n_vars` entries, `table` to `table_len`
/// doubles, `out_joint` is writable.
#[no_mangle]
pub unsafe extern "C" fn irc_joint_new(
    names_ptr: *const *const c_char,
    sizes: *const usize,
    n_vars: usize,
    table: *const f64,
    table_len: usize,
    out_joint: *mut *mut IrcJoint,
) -> IrcStatus {
    guard(|| {
        let names = names(names_ptr, n_vars, "names")?;
        let sizes = slice(sizes, n_vars, "sizes")?;
        let table = slice(table, table_len, "table")?.to_vec();
        let slot = out(out_joint, "out_joint")?;
        let vars = names.iter().zip(sizes).map(|(n, &s)| Variable::new(*n, s)).collect();
        let inner = NamedJoint::new(vars, table).map_err(|e| Failure::new(prob_status(&e), e.to_string()))?;
        *slot = Box::into_raw(Box::new(IrcJoint { inner }));
        Ok(())
    })
}

/// `I(A; B | C)` in bits. `C` may be empty.
///
/// # Safety
/// Each name array points to the stated number of NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn irc_joint_mutual_info(
    joint: *const IrcJoint,
    a: *const *const c_char,
    n_a: usize,
    b: *const *const c_char,
    n_b: usize,
    c: *const *const c_char,
    n_c: usize,
    out_value: *mut f64,
) -> IrcStatus {
    guard(|| {
        let j = &get(joint, "joint")?.inner;
        let (a, b, c) = (names(a, n_a, "a")?, names(b, n_b, "b")?, names(c, n_c, "c")?);
        let slot = out(out_value, "out_value")?;
        *slot = j
            .mutual_info(&a, &b, &c)
            .map_err(|e| Failure::new(prob_status(&e), e.to_string()))?;
        Ok(())
    })
}

/// # Safety
/// `joint` must be NULL or come from `irc_joint_new`.
#[no_mangle]
pub unsafe extern "C" fn irc_joint_free(joint: *mut IrcJoint) {
    if !joint.is_null() {
        drop(Box::from_raw(joint));
    }
}
