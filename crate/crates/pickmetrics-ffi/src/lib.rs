//! C ABI for the pickmetrics library.
//!
//! Scalar results come back through out-pointers with a [`PmStatus`] return
//! code; the Gregory coefficient table is an opaque handle with explicit
//! `new`/`free`. Complex points cross the boundary as interleaved
//! `re, im` doubles (`2 * dim` values per point). No function panics across
//! the boundary.

use std::ffi::c_char;
use std::panic::{catch_unwind, UnwindSafe};

use num_complex::Complex64;

use pickmetrics::coeffs;
use pickmetrics::error::Error;
use pickmetrics::geodesy;
use pickmetrics::kernel::{BallPoint, DiscPoint, KernelSpec, Point};
use pickmetrics::metrics;
use pickmetrics::packing;

/// Status codes returned by every fallible entry point.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmStatus {
    Ok = 0,
    NullPointer = 1,
    DomainViolation = 2,
    DimensionMismatch = 3,
    InvalidParameter = 4,
    NonConvergence = 5,
    Overflow = 6,
    SeparationFailed = 7,
    NotFound = 8,
    Internal = 9,
}

fn status_of(e: &Error) -> PmStatus {
    match e {
        Error::DomainViolation { .. } => PmStatus::DomainViolation,
        Error::DimensionMismatch { .. } => PmStatus::DimensionMismatch,
        Error::QuadratureNonConvergence { .. } => PmStatus::NonConvergence,
        Error::Overflow => PmStatus::Overflow,
        Error::SeparationFailed { .. } => PmStatus::SeparationFailed,
        Error::GridBelowThreshold { .. } => PmStatus::SeparationFailed,
        _ => PmStatus::InvalidParameter,
    }
}

/// Disc kernels addressable over the ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmKernel {
    Hardy = 0,
    Dirichlet = 1,
    /// Weighted Dirichlet; the weight is the `a` argument.
    WeightedDirichlet = 2,
}

fn spec_of(kind: PmKernel, a: f64) -> Result<KernelSpec, Error> {
    match kind {
        PmKernel::Hardy => Ok(KernelSpec::Hardy),
        PmKernel::Dirichlet => Ok(KernelSpec::Dirichlet),
        PmKernel::WeightedDirichlet => KernelSpec::weighted_dirichlet(a),
    }
}

/// Run `f`, writing its value through `out`; panics become `Internal`.
fn scalar_entry<F>(out: *mut f64, f: F) -> PmStatus
where
    F: FnOnce() -> Result<f64, Error> + UnwindSafe,
{
    if out.is_null() {
        return PmStatus::NullPointer;
    }
    match catch_unwind(f) {
        Ok(Ok(v)) => {
            unsafe { *out = v };
            PmStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => PmStatus::Internal,
    }
}

unsafe fn ball_from_raw(dim: usize, ptr: *const f64) -> Result<BallPoint, Error> {
    if dim == 0 {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: "dimension must be at least 1".into(),
        });
    }
    let slice = std::slice::from_raw_parts(ptr, 2 * dim);
    BallPoint::new(
        slice
            .chunks_exact(2)
            .map(|c| Complex64::new(c[0], c[1]))
            .collect(),
    )
}

/// Library version as a NUL-terminated static string.
#[no_mangle]
pub extern "C" fn pm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Opaque Gregory coefficient table (`c_1 .. c_n_max`).
pub struct PmCoeffTable(coeffs::CoeffTable);

/// Build a coefficient table by the reciprocal-series recursion.
/// Returns null if `n_max == 0` or on internal failure.
#[no_mangle]
pub extern "C" fn pm_coeffs_new(n_max: usize) -> *mut PmCoeffTable {
    match catch_unwind(|| coeffs::gregory_recursion(n_max)) {
        Ok(Ok(t)) => Box::into_raw(Box::new(PmCoeffTable(t))),
        _ => std::ptr::null_mut(),
    }
}

/// Free a table returned by [`pm_coeffs_new`]. Null is a no-op.
///
/// # Safety
/// `table` must be a pointer from `pm_coeffs_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pm_coeffs_free(table: *mut PmCoeffTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Number of coefficients held by the table (0 for null).
///
/// # Safety
/// `table` must be null or a live pointer from `pm_coeffs_new`.
#[no_mangle]
pub unsafe extern "C" fn pm_coeffs_len(table: *const PmCoeffTable) -> usize {
    if table.is_null() {
        0
    } else {
        (*table).0.n_max()
    }
}

/// Fetch `c_n` (1-based) from the table.
///
/// # Safety
/// `table` must be null or a live pointer from `pm_coeffs_new`; `out` must
/// be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pm_coeffs_get(
    table: *const PmCoeffTable,
    n: usize,
    out: *mut f64,
) -> PmStatus {
    if table.is_null() || out.is_null() {
        return PmStatus::NullPointer;
    }
    match (*table).0.get(n) {
        Some(v) => {
            *out = v;
            PmStatus::Ok
        }
        None => PmStatus::InvalidParameter,
    }
}

/// `c_n` by the explicit integral, to absolute tolerance `tol`.
#[no_mangle]
pub extern "C" fn pm_gregory_integral(n: usize, tol: f64, out: *mut f64) -> PmStatus {
    scalar_entry(out, || coeffs::gregory_integral(n, tol))
}

/// Kernel metric `delta(z, w)` of a disc kernel; `a` is read only for the
/// weighted Dirichlet kernel.
#[no_mangle]
pub extern "C" fn pm_kernel_delta(
    kind: PmKernel,
    a: f64,
    z_re: f64,
    z_im: f64,
    w_re: f64,
    w_im: f64,
    out: *mut f64,
) -> PmStatus {
    scalar_entry(out, || {
        let spec = spec_of(kind, a)?;
        let z = Point::Disc(DiscPoint::new(Complex64::new(z_re, z_im))?);
        let w = Point::Disc(DiscPoint::new(Complex64::new(w_re, w_im))?);
        metrics::delta_from_kernel(&spec, &z, &w)
    })
}

/// Closed-form Dirichlet metric on the disc.
#[no_mangle]
pub extern "C" fn pm_dirichlet_metric(
    z_re: f64,
    z_im: f64,
    w_re: f64,
    w_im: f64,
    out: *mut f64,
) -> PmStatus {
    scalar_entry(out, || {
        let z = DiscPoint::new(Complex64::new(z_re, z_im))?;
        let w = DiscPoint::new(Complex64::new(w_re, w_im))?;
        Ok(metrics::dirichlet_metric(&z, &w))
    })
}

/// Pseudohyperbolic distance on the ball in C^dim; `z`/`w` hold `2*dim`
/// interleaved `re, im` values.
///
/// # Safety
/// `z` and `w` must be null or point to `2*dim` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn pm_pseudohyperbolic(
    dim: usize,
    z: *const f64,
    w: *const f64,
    out: *mut f64,
) -> PmStatus {
    if z.is_null() || w.is_null() {
        return PmStatus::NullPointer;
    }
    let zb = match ball_from_raw(dim, z) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    let wb = match ball_from_raw(dim, w) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    scalar_entry(out, move || metrics::pseudohyperbolic(&zb, &wb))
}

/// Poincare-Bergman distance `atanh(rho)`; fails with `Overflow` when the
/// points are numerically unresolvable.
///
/// # Safety
/// `z` and `w` must be null or point to `2*dim` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn pm_bergman(
    dim: usize,
    z: *const f64,
    w: *const f64,
    out: *mut f64,
) -> PmStatus {
    if z.is_null() || w.is_null() {
        return PmStatus::NullPointer;
    }
    let zb = match ball_from_raw(dim, z) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    let wb = match ball_from_raw(dim, w) {
        Ok(p) => p,
        Err(e) => return status_of(&e),
    };
    scalar_entry(out, move || metrics::bergman(&zb, &wb))
}

/// Riemannian density of the Dirichlet metric at `z`.
#[no_mangle]
pub extern "C" fn pm_g_density(z_re: f64, z_im: f64, out: *mut f64) -> PmStatus {
    scalar_entry(out, || {
        let z = DiscPoint::new(Complex64::new(z_re, z_im))?;
        Ok(geodesy::g_density(&z))
    })
}

/// Dirichlet length of the radial segment `[0, r]`.
#[no_mangle]
pub extern "C" fn pm_radial_length(r: f64, tol: f64, out: *mut f64) -> PmStatus {
    scalar_entry(out, || geodesy::radial_length(r, tol))
}

/// Duren-Weir packing bound `(2/eps + 1)^{2d} / (1 - r^2)^d`.
#[no_mangle]
pub extern "C" fn pm_duren_weir_bound(d: usize, r: f64, eps: f64, out: *mut f64) -> PmStatus {
    scalar_entry(out, || packing::duren_weir_bound(d, r, eps))
}

/// Growth envelope `1 - exp(-c sqrt(log(1/(1-|z|))))`.
#[no_mangle]
pub extern "C" fn pm_slow_growth_envelope(c: f64, z_abs: f64, out: *mut f64) -> PmStatus {
    scalar_entry(out, || packing::slow_growth_envelope(c, z_abs))
}

/// Cardinality of the certified eps-separated circle lattice at radius `r`;
/// `SeparationFailed` below the radius threshold.
///
/// # Safety
/// `out_len` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pm_circle_lattice_size(r: f64, eps: f64, out_len: *mut usize) -> PmStatus {
    if out_len.is_null() {
        return PmStatus::NullPointer;
    }
    match catch_unwind(|| packing::circle_lattice(r, eps)) {
        Ok(Ok(set)) => {
            unsafe { *out_len = set.len() };
            PmStatus::Ok
        }
        Ok(Err(e)) => status_of(&e),
        Err(_) => PmStatus::Internal,
    }
}

/// First complement `u* = 1 - r*` on the grid `10^{-1} .. 10^{-k_max}` where
/// the circle-packing lower bound overtakes the Duren-Weir upper bound;
/// `NotFound` when the grid ends before the crossing.
///
/// # Safety
/// `out_u` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn pm_obstruction_r_star(
    d: usize,
    lip_upper: f64,
    lip_lower: f64,
    eps: f64,
    k_max: u32,
    out_u: *mut f64,
) -> PmStatus {
    if out_u.is_null() {
        return PmStatus::NullPointer;
    }
    match catch_unwind(|| {
        packing::obstruction_report(d, lip_upper, lip_lower, eps, &packing::log_u_grid(k_max))
    }) {
        Ok(Ok(report)) => match report.r_star_complement {
            Some(u) => {
                unsafe { *out_u = u };
                PmStatus::Ok
            }
            None => PmStatus::NotFound,
        },
        Ok(Err(e)) => status_of(&e),
        Err(_) => PmStatus::Internal,
    }
}
