//! C ABI over the Gaussianization library: opaque model handles, integer
//! error codes, and a thread-local last-error message.
//!
//! Conventions:
//! - Data matrices are row-major `n_samples x dims` arrays of `double`.
//! - Every fallible function returns an [`RbigStatus`]; on failure a
//!   human-readable message is available from [`rbig_last_error_message`]
//!   until the next failing call on the same thread.
//! - Handles returned through out-pointers are owned by the caller and must
//!   be released with the matching `_free` function. Strings returned
//!   through out-pointers must be released with [`rbig_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use rbig::marginal::EntropyEstimator;
use rbig::model::{fit, RbigConfig, RbigModel};
use rbig::rotation::RotationKind;
use rbig::{
    estimate_entropy, estimate_kl, estimate_mutual_information, estimate_total_correlation,
    DataMatrix, RbigError,
};

/// Status code returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbigStatus {
    Ok = 0,
    /// A mathematical-domain precondition was violated.
    Domain = 1,
    /// Input data is malformed (shape, finiteness, row counts).
    Data = 2,
    /// Invalid fit configuration.
    Config = 3,
    /// A marginal is degenerate (constant column, too few samples).
    DegenerateMarginal = 4,
    /// A numerical operation failed to converge or produced non-finite values.
    Numeric = 5,
    /// Synthetic-data generation failed.
    Generation = 6,
    /// Text input could not be parsed.
    Parse = 7,
    /// A model document failed validation.
    ModelValidation = 8,
    /// The call itself was malformed (bad argument combination).
    Usage = 9,
    /// An I/O operation failed.
    Io = 10,
    /// JSON serialization or deserialization failed.
    Json = 11,
    /// A required pointer argument was null.
    NullPointer = 12,
    /// A string argument was not valid UTF-8.
    Utf8 = 13,
    /// An internal invariant failed; the library state is still consistent.
    Panic = 14,
}

/// Rotation used between marginal Gaussianization passes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbigRotation {
    Pca = 0,
    RandomOrthogonal = 1,
}

/// Univariate entropy estimator used inside the fit loop.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RbigEntropyEstimator {
    HistogramMillerMadow = 0,
    Spacing = 1,
}

/// Fit options. Obtain defaults from [`rbig_fit_options_default`] and
/// override fields as needed.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RbigFitOptions {
    pub rotation: RbigRotation,
    pub entropy_estimator: RbigEntropyEstimator,
    pub max_layers: usize,
    pub patience: usize,
    pub noise_floor_multiplier: f64,
    pub rng_seed: u64,
}

/// Opaque fitted-model handle.
pub struct RbigModelHandle {
    model: RbigModel,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::new("no error").unwrap());
}

fn set_last_error(msg: &str) {
    let sanitized: String = msg.chars().map(|c| if c == '\0' { ' ' } else { c }).collect();
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = CString::new(sanitized).unwrap_or_else(|_| {
            CString::new("error message unavailable").unwrap()
        });
    });
}

fn status_of(err: &RbigError) -> RbigStatus {
    match err {
        RbigError::Domain(_) => RbigStatus::Domain,
        RbigError::Data(_) => RbigStatus::Data,
        RbigError::Config(_) => RbigStatus::Config,
        RbigError::DegenerateMarginal(_) => RbigStatus::DegenerateMarginal,
        RbigError::Numeric(_) => RbigStatus::Numeric,
        RbigError::Generation(_) => RbigStatus::Generation,
        RbigError::Parse(_) => RbigStatus::Parse,
        RbigError::ModelValidation(_) => RbigStatus::ModelValidation,
        RbigError::Usage(_) => RbigStatus::Usage,
        RbigError::Io(_) => RbigStatus::Io,
        RbigError::Json(_) => RbigStatus::Json,
    }
}

fn fail(err: RbigError) -> RbigStatus {
    let status = status_of(&err);
    set_last_error(&err.to_string());
    status
}

fn guarded(f: impl FnOnce() -> RbigStatus) -> RbigStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(_) => {
            set_last_error("internal panic");
            RbigStatus::Panic
        }
    }
}

fn config_from_options(options: *const RbigFitOptions) -> Result<RbigConfig, RbigStatus> {
    let mut cfg = RbigConfig::default();
    if !options.is_null() {
        let o = unsafe { &*options };
        cfg.rotation_kind = match o.rotation {
            RbigRotation::Pca => RotationKind::Pca,
            RbigRotation::RandomOrthogonal => RotationKind::RandomOrthogonal,
        };
        cfg.entropy_estimator = match o.entropy_estimator {
            RbigEntropyEstimator::HistogramMillerMadow => EntropyEstimator::HistogramMm,
            RbigEntropyEstimator::Spacing => EntropyEstimator::Spacing,
        };
        cfg.max_layers = o.max_layers;
        cfg.patience = o.patience;
        cfg.noise_floor_multiplier = o.noise_floor_multiplier;
        cfg.rng_seed = o.rng_seed;
    }
    match cfg.validate() {
        Ok(()) => Ok(cfg),
        Err(e) => Err(fail(e)),
    }
}

/// Builds a data matrix from a row-major buffer; `data` must point to
/// `n_samples * dims` doubles.
unsafe fn matrix_from_raw(
    data: *const f64,
    n_samples: usize,
    dims: usize,
) -> Result<DataMatrix, RbigStatus> {
    if data.is_null() {
        set_last_error("data pointer is null");
        return Err(RbigStatus::NullPointer);
    }
    let len = n_samples.checked_mul(dims).ok_or_else(|| {
        set_last_error("n_samples * dims overflows");
        RbigStatus::Data
    })?;
    let slice = std::slice::from_raw_parts(data, len);
    DataMatrix::from_row_major(n_samples, dims, slice).map_err(fail)
}

fn require_out<T>(out: *mut T) -> Result<(), RbigStatus> {
    if out.is_null() {
        set_last_error("output pointer is null");
        Err(RbigStatus::NullPointer)
    } else {
        Ok(())
    }
}

/// Library version as a static NUL-terminated string; never freed.
#[no_mangle]
pub extern "C" fn rbig_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

/// Message describing the most recent failure on the calling thread. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rbig_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Default fit options (PCA rotations, histogram entropies, 100-layer cap).
#[no_mangle]
pub extern "C" fn rbig_fit_options_default() -> RbigFitOptions {
    let cfg = RbigConfig::default();
    RbigFitOptions {
        rotation: match cfg.rotation_kind {
            RotationKind::Pca => RbigRotation::Pca,
            RotationKind::RandomOrthogonal => RbigRotation::RandomOrthogonal,
        },
        entropy_estimator: match cfg.entropy_estimator {
            EntropyEstimator::HistogramMm => RbigEntropyEstimator::HistogramMillerMadow,
            EntropyEstimator::Spacing => RbigEntropyEstimator::Spacing,
        },
        max_layers: cfg.max_layers,
        patience: cfg.patience,
        noise_floor_multiplier: cfg.noise_floor_multiplier,
        rng_seed: cfg.rng_seed,
    }
}

/// Fits a Gaussianization model.
///
/// # Safety
/// `data` must point to `n_samples * dims` doubles (row-major); `options`
/// must be null (defaults) or point to a valid options struct; `out_model`
/// must be a valid pointer. On success `*out_model` owns the model and must
/// be released with [`rbig_model_free`].
#[no_mangle]
pub unsafe extern "C" fn rbig_fit(
    data: *const f64,
    n_samples: usize,
    dims: usize,
    options: *const RbigFitOptions,
    out_model: *mut *mut RbigModelHandle,
) -> RbigStatus {
    guarded(|| {
        if let Err(s) = require_out(out_model) {
            return s;
        }
        let matrix = match matrix_from_raw(data, n_samples, dims) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let cfg = match config_from_options(options) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match fit(&matrix, &cfg) {
            Ok(model) => {
                *out_model = Box::into_raw(Box::new(RbigModelHandle { model }));
                RbigStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a model handle. Null is a no-op.
///
/// # Safety
/// `model` must be null or a pointer previously returned through an
/// out-parameter of this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rbig_model_free(model: *mut RbigModelHandle) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Number of input dimensions the model was fitted on; 0 if `model` is null.
///
/// # Safety
/// `model` must be null or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn rbig_model_dims(model: *const RbigModelHandle) -> usize {
    if model.is_null() {
        return 0;
    }
    (*model).model.dims
}

/// Number of fitted layers; 0 if `model` is null.
///
/// # Safety
/// `model` must be null or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn rbig_model_n_layers(model: *const RbigModelHandle) -> usize {
    if model.is_null() {
        return 0;
    }
    (*model).model.layers.len()
}

/// Total correlation captured by the model, in nats; NaN if `model` is null.
///
/// # Safety
/// `model` must be null or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn rbig_model_total_correlation(model: *const RbigModelHandle) -> f64 {
    if model.is_null() {
        return f64::NAN;
    }
    (*model).model.total_correlation()
}

/// Calibrated per-layer noise floor, in nats; NaN if `model` is null.
///
/// # Safety
/// `model` must be null or a live model handle.
#[no_mangle]
pub unsafe extern "C" fn rbig_model_noise_floor(model: *const RbigModelHandle) -> f64 {
    if model.is_null() {
        return f64::NAN;
    }
    (*model).model.noise_floor
}

unsafe fn transform_impl(
    model: *const RbigModelHandle,
    data: *const f64,
    n_samples: usize,
    dims: usize,
    out: *mut f64,
    inverse: bool,
) -> RbigStatus {
    if model.is_null() {
        set_last_error("model pointer is null");
        return RbigStatus::NullPointer;
    }
    if let Err(s) = require_out(out) {
        return s;
    }
    let matrix = match matrix_from_raw(data, n_samples, dims) {
        Ok(m) => m,
        Err(s) => return s,
    };
    let result = if inverse {
        (*model).model.inverse_transform(&matrix)
    } else {
        (*model).model.transform(&matrix)
    };
    match result {
        Ok(res) => {
            let m = &res.0;
            let out_slice = std::slice::from_raw_parts_mut(out, n_samples * dims);
            for i in 0..n_samples {
                for j in 0..dims {
                    out_slice[i * dims + j] = m[(i, j)];
                }
            }
            RbigStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// Maps data through the fitted model into the Gaussianized space.
///
/// # Safety
/// `data` and `out` must each point to `n_samples * dims` doubles
/// (row-major; they may not alias), with `dims` equal to the model's
/// dimension; `model` must be a live model handle.
#[no_mangle]
pub unsafe extern "C" fn rbig_model_transform(
    model: *const RbigModelHandle,
    data: *const f64,
    n_samples: usize,
    dims: usize,
    out: *mut f64,
) -> RbigStatus {
    guarded(|| transform_impl(model, data, n_samples, dims, out, false))
}

/// Maps Gaussianized points back to the data space.
///
/// # Safety
/// Same contract as [`rbig_model_transform`].
#[no_mangle]
pub unsafe extern "C" fn rbig_model_inverse_transform(
    model: *const RbigModelHandle,
    data: *const f64,
    n_samples: usize,
    dims: usize,
    out: *mut f64,
) -> RbigStatus {
    guarded(|| transform_impl(model, data, n_samples, dims, out, true))
}

/// Serializes the model to its versioned JSON document.
///
/// # Safety
/// `model` must be a live model handle and `out_json` a valid pointer. On
/// success `*out_json` is a NUL-terminated string owned by the caller;
/// release it with [`rbig_string_free`].
#[no_mangle]
pub unsafe extern "C" fn rbig_model_to_json(
    model: *const RbigModelHandle,
    out_json: *mut *mut c_char,
) -> RbigStatus {
    guarded(|| {
        if model.is_null() {
            set_last_error("model pointer is null");
            return RbigStatus::NullPointer;
        }
        if let Err(s) = require_out(out_json) {
            return s;
        }
        match (*model).model.to_json() {
            Ok(text) => match CString::new(text) {
                Ok(cstr) => {
                    *out_json = cstr.into_raw();
                    RbigStatus::Ok
                }
                Err(_) => {
                    set_last_error("serialized document contained a NUL byte");
                    RbigStatus::Json
                }
            },
            Err(e) => fail(e),
        }
    })
}

/// Parses and validates a model document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out_model` a valid pointer.
/// On success `*out_model` owns the model; release with [`rbig_model_free`].
#[no_mangle]
pub unsafe extern "C" fn rbig_model_from_json(
    json: *const c_char,
    out_model: *mut *mut RbigModelHandle,
) -> RbigStatus {
    guarded(|| {
        if json.is_null() {
            set_last_error("json pointer is null");
            return RbigStatus::NullPointer;
        }
        if let Err(s) = require_out(out_model) {
            return s;
        }
        let text = match CStr::from_ptr(json).to_str() {
            Ok(t) => t,
            Err(_) => {
                set_last_error("json argument is not valid UTF-8");
                return RbigStatus::Utf8;
            }
        };
        match RbigModel::from_json(text) {
            Ok(model) => {
                *out_model = Box::into_raw(Box::new(RbigModelHandle { model }));
                RbigStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Releases a string returned through an out-parameter. Null is a no-op.
///
/// # Safety
/// `s` must be null or a string previously returned by this library, not
/// yet freed.
#[no_mangle]
pub unsafe extern "C" fn rbig_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Estimates the total correlation (multi-information) of the sample, in
/// nats.
///
/// # Safety
/// `data` must point to `n_samples * dims` doubles (row-major); `options`
/// may be null for defaults; `out_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rbig_estimate_total_correlation(
    data: *const f64,
    n_samples: usize,
    dims: usize,
    options: *const RbigFitOptions,
    out_value: *mut f64,
) -> RbigStatus {
    guarded(|| {
        if let Err(s) = require_out(out_value) {
            return s;
        }
        let matrix = match matrix_from_raw(data, n_samples, dims) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let cfg = match config_from_options(options) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match estimate_total_correlation(&matrix, &cfg) {
            Ok(est) => {
                *out_value = est.value;
                RbigStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Estimates the joint differential entropy of the sample, in nats.
///
/// # Safety
/// Same contract as [`rbig_estimate_total_correlation`].
#[no_mangle]
pub unsafe extern "C" fn rbig_estimate_entropy(
    data: *const f64,
    n_samples: usize,
    dims: usize,
    options: *const RbigFitOptions,
    out_value: *mut f64,
) -> RbigStatus {
    guarded(|| {
        if let Err(s) = require_out(out_value) {
            return s;
        }
        let matrix = match matrix_from_raw(data, n_samples, dims) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let cfg = match config_from_options(options) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match estimate_entropy(&matrix, &cfg) {
            Ok(est) => {
                *out_value = est.value;
                RbigStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Estimates the KL divergence of the distribution behind `x` from the
/// distribution behind `y` (x is the numerator), in nats. The two samples
/// must share the same dimension; row counts may differ.
///
/// # Safety
/// `x` must point to `x_samples * dims` doubles and `y` to
/// `y_samples * dims` doubles (row-major); `options` may be null;
/// `out_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rbig_estimate_kl(
    x: *const f64,
    x_samples: usize,
    y: *const f64,
    y_samples: usize,
    dims: usize,
    options: *const RbigFitOptions,
    out_value: *mut f64,
) -> RbigStatus {
    guarded(|| {
        if let Err(s) = require_out(out_value) {
            return s;
        }
        let xm = match matrix_from_raw(x, x_samples, dims) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let ym = match matrix_from_raw(y, y_samples, dims) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let cfg = match config_from_options(options) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match estimate_kl(&xm, &ym, &cfg) {
            Ok(est) => {
                *out_value = est.value;
                RbigStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Estimates the mutual information between two jointly sampled variables,
/// in nats. Rows must correspond: `x` and `y` need the same sample count.
///
/// # Safety
/// `x` must point to `n_samples * x_dims` doubles and `y` to
/// `n_samples * y_dims` doubles (row-major); `options` may be null;
/// `out_value` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn rbig_estimate_mutual_information(
    x: *const f64,
    x_dims: usize,
    y: *const f64,
    y_dims: usize,
    n_samples: usize,
    options: *const RbigFitOptions,
    out_value: *mut f64,
) -> RbigStatus {
    guarded(|| {
        if let Err(s) = require_out(out_value) {
            return s;
        }
        let xm = match matrix_from_raw(x, n_samples, x_dims) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let ym = match matrix_from_raw(y, n_samples, y_dims) {
            Ok(m) => m,
            Err(s) => return s,
        };
        let cfg = match config_from_options(options) {
            Ok(c) => c,
            Err(s) => return s,
        };
        match estimate_mutual_information(&xm, &ym, &cfg) {
            Ok(est) => {
                *out_value = est.value;
                RbigStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha12Rng;
    use rand_distr::StandardNormal;

    fn correlated_data(n: usize, rho: f64, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(n * 2);
        for _ in 0..n {
            let u: f64 = rng.sample(StandardNormal);
            let v: f64 = rng.sample(StandardNormal);
            out.push(u);
            out.push(rho * u + (1.0 - rho * rho).sqrt() * v);
        }
        out
    }

    fn last_error() -> String {
        unsafe { CStr::from_ptr(rbig_last_error_message()) }
            .to_str()
            .unwrap()
            .to_string()
    }

    #[test]
    fn version_is_non_empty() {
        let v = unsafe { CStr::from_ptr(rbig_version()) };
        assert!(!v.to_str().unwrap().is_empty());
    }

    #[test]
    fn fit_transform_and_json_round_trip() {
        let n = 2000;
        let data = correlated_data(n, 0.8, 7);
        let mut opts = rbig_fit_options_default();
        opts.rng_seed = 11;
        let mut model: *mut RbigModelHandle = std::ptr::null_mut();
        let status = unsafe { rbig_fit(data.as_ptr(), n, 2, &opts, &mut model) };
        assert_eq!(status, RbigStatus::Ok);
        assert!(!model.is_null());
        unsafe {
            assert_eq!(rbig_model_dims(model), 2);
            assert!(rbig_model_n_layers(model) >= 1);
            let tc = rbig_model_total_correlation(model);
            let truth = -0.5f64 * (1.0 - 0.64f64).ln();
            assert!((tc - truth).abs() < 0.12, "tc = {tc}, truth = {truth}");
            assert!(rbig_model_noise_floor(model) > 0.0);

            // Forward then inverse returns the original points.
            let mut forward = vec![0.0; n * 2];
            assert_eq!(
                rbig_model_transform(model, data.as_ptr(), n, 2, forward.as_mut_ptr()),
                RbigStatus::Ok
            );
            let mut back = vec![0.0; n * 2];
            assert_eq!(
                rbig_model_inverse_transform(model, forward.as_ptr(), n, 2, back.as_mut_ptr()),
                RbigStatus::Ok
            );
            let max_err = data
                .iter()
                .zip(&back)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0f64, f64::max);
            assert!(max_err < 1e-8, "round-trip error {max_err}");

            // JSON round trip preserves the captured total correlation.
            let mut json: *mut c_char = std::ptr::null_mut();
            assert_eq!(rbig_model_to_json(model, &mut json), RbigStatus::Ok);
            let mut reloaded: *mut RbigModelHandle = std::ptr::null_mut();
            assert_eq!(rbig_model_from_json(json, &mut reloaded), RbigStatus::Ok);
            assert_eq!(rbig_model_total_correlation(reloaded), tc);
            rbig_string_free(json);
            rbig_model_free(reloaded);
            rbig_model_free(model);
        }
    }

    #[test]
    fn estimators_run_through_the_abi() {
        let n = 1500;
        let data = correlated_data(n, 0.8, 3);
        let mut opts = rbig_fit_options_default();
        opts.rng_seed = 5;
        let mut tc = f64::NAN;
        let status =
            unsafe { rbig_estimate_total_correlation(data.as_ptr(), n, 2, &opts, &mut tc) };
        assert_eq!(status, RbigStatus::Ok);
        assert!((tc - 0.5108).abs() < 0.15, "tc = {tc}");

        let mut h = f64::NAN;
        assert_eq!(
            unsafe { rbig_estimate_entropy(data.as_ptr(), n, 2, &opts, &mut h) },
            RbigStatus::Ok
        );
        // Joint entropy of the correlated pair: 2·(½ln 2πe) + ½ln(1−ρ²).
        let truth = 2.0 * 1.418_938_533_204_672_7 + 0.5 * (1.0 - 0.64f64).ln();
        assert!((h - truth).abs() < 0.2, "h = {h}, truth = {truth}");

        let other = correlated_data(n, 0.8, 19);
        let mut kl = f64::NAN;
        assert_eq!(
            unsafe {
                rbig_estimate_kl(data.as_ptr(), n, other.as_ptr(), n, 2, &opts, &mut kl)
            },
            RbigStatus::Ok
        );
        assert!(kl >= 0.0 && kl < 0.5, "self-ish KL = {kl}");

        // Split the pair into two 1-D variables sharing rows.
        let xs: Vec<f64> = data.iter().step_by(2).copied().collect();
        let ys: Vec<f64> = data.iter().skip(1).step_by(2).copied().collect();
        let mut mi = f64::NAN;
        assert_eq!(
            unsafe {
                rbig_estimate_mutual_information(
                    xs.as_ptr(),
                    1,
                    ys.as_ptr(),
                    1,
                    n,
                    &opts,
                    &mut mi,
                )
            },
            RbigStatus::Ok
        );
        assert!((mi - 0.5108).abs() < 0.2, "mi = {mi}");
    }

    #[test]
    fn null_pointers_are_reported() {
        let mut model: *mut RbigModelHandle = std::ptr::null_mut();
        let status = unsafe { rbig_fit(std::ptr::null(), 10, 2, std::ptr::null(), &mut model) };
        assert_eq!(status, RbigStatus::NullPointer);
        assert!(last_error().contains("null"));

        let data = [0.0f64; 4];
        let status =
            unsafe { rbig_fit(data.as_ptr(), 2, 2, std::ptr::null(), std::ptr::null_mut()) };
        assert_eq!(status, RbigStatus::NullPointer);

        let mut out = f64::NAN;
        let status = unsafe {
            rbig_estimate_total_correlation(std::ptr::null(), 5, 1, std::ptr::null(), &mut out)
        };
        assert_eq!(status, RbigStatus::NullPointer);
    }

    #[test]
    fn invalid_options_and_data_map_to_codes() {
        let data = correlated_data(50, 0.5, 1);
        let mut opts = rbig_fit_options_default();
        opts.max_layers = 0;
        let mut model: *mut RbigModelHandle = std::ptr::null_mut();
        let status = unsafe { rbig_fit(data.as_ptr(), 50, 2, &opts, &mut model) };
        assert_eq!(status, RbigStatus::Config);
        assert!(last_error().contains("max_layers"));

        // Too few samples for a marginal fit.
        let tiny = [1.0f64, 2.0, 3.0, 4.0];
        let status = unsafe { rbig_fit(tiny.as_ptr(), 2, 2, std::ptr::null(), &mut model) };
        assert_ne!(status, RbigStatus::Ok);
        assert!(model.is_null());
    }

    #[test]
    fn bad_json_is_a_validation_or_parse_error() {
        let text = CString::new("{\"format\": \"something-else\"}").unwrap();
        let mut model: *mut RbigModelHandle = std::ptr::null_mut();
        let status = unsafe { rbig_model_from_json(text.as_ptr(), &mut model) };
        assert!(
            status == RbigStatus::ModelValidation || status == RbigStatus::Json,
            "status = {status:?}"
        );
        assert!(model.is_null());
    }
}
