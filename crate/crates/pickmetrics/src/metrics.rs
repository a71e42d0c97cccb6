//! Kernel-induced metrics.
//!
//! The central object is the pseudo-metric attached to a kernel,
//!
//! ```text
//! delta(z, w) = (1 - |k(z,w)|^2 / (k(z,z) k(w,w)))^{1/2},
//! ```
//!
//! together with its special cases: the pseudohyperbolic metric `rho` on the
//! ball (computed through Moebius automorphisms), the Poincare-Bergman metric
//! `beta = atanh(rho)`, the closed-form Dirichlet metric on the disc, and the
//! two-point extremal multiplier value, which the determinant criterion for
//! the 2x2 Pick matrix reduces to the same quantity.
//!
//! All functions here are pure; `MoebiusMap` values are immutable.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{kernel_diag, kernel_eval, BallPoint, DiscPoint, KernelSpec, Point};

/// Identifies one of the metrics handled by the crate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricId {
    /// The kernel metric of the given kernel.
    KernelDelta(KernelSpec),
    /// Pseudohyperbolic metric on the ball in C^d.
    Pseudohyperbolic(usize),
    /// Poincare-Bergman metric `atanh(rho)` on the ball in C^d.
    Bergman(usize),
}

impl std::fmt::Display for MetricId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MetricId::KernelDelta(spec) => write!(f, "delta[{spec}]"),
            MetricId::Pseudohyperbolic(d) => write!(f, "rho[{d}]"),
            MetricId::Bergman(d) => write!(f, "beta[{d}]"),
        }
    }
}

/// Rounding near the diagonal may push `1 - |k|^2/(k k)` a hair below zero.
/// Dips beyond this threshold signal inconsistent kernel values instead and
/// are reported as errors rather than hidden.
const CLAMP_THRESHOLD: f64 = 1e-14;

fn clamp_delta_sq(d2: f64) -> Result<f64> {
    if d2 < -CLAMP_THRESHOLD {
        return Err(Error::KernelInconsistency { value: d2 });
    }
    Ok(d2.clamp(0.0, 1.0))
}

/// The kernel metric `delta(z, w)` in `[0, 1]`.
pub fn delta_from_kernel(spec: &KernelSpec, z: &Point, w: &Point) -> Result<f64> {
    let kzw = kernel_eval(spec, z, w)?;
    let kzz = kernel_diag(spec, z)?;
    let kww = kernel_diag(spec, w)?;
    let d2 = 1.0 - kzw.norm_sqr() / (kzz * kww);
    Ok(clamp_delta_sq(d2)?.sqrt())
}

/// The Moebius automorphism of the ball exchanging `a` and the origin:
/// `phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`, where `P_a` projects
/// onto the span of `a`, `Q_a = I - P_a` and `s_a = (1 - ||a||^2)^{1/2}`.
///
/// `phi_0` is `z -> -z` (the formula with `P_0 = 0`, `s_0 = 1`), which is an
/// isometry fixing the origin, so every metric identity below is unaffected.
#[derive(Debug, Clone)]
pub struct MoebiusMap {
    center: BallPoint,
    s: f64,
}

impl MoebiusMap {
    pub fn new(center: BallPoint) -> Self {
        let s = (1.0 - center.norm_sqr()).sqrt();
        Self { center, s }
    }

    pub fn center(&self) -> &BallPoint {
        &self.center
    }

    /// `s_a = (1 - ||a||^2)^{1/2}`, in `(0, 1]`.
    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn apply(&self, z: &BallPoint) -> Result<BallPoint> {
        let coords = self.apply_coords(z)?;
        let n: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if n < 1.0 {
            Ok(BallPoint::new_unchecked(coords))
        } else {
            // phi_a maps the ball into itself; landing on the boundary can
            // only be rounding, i.e. the points were too close to it to resolve
            Err(Error::Overflow)
        }
    }

    fn apply_coords(&self, z: &BallPoint) -> Result<Vec<Complex64>> {
        let a = &self.center;
        if a.dim() != z.dim() {
            return Err(Error::DimensionMismatch {
                left: a.dim(),
                right: z.dim(),
            });
        }
        let a_sq = a.norm_sqr();
        let za = z.inner(a)?;
        let den = Complex64::new(1.0, 0.0) - za;
        let proj = if a_sq == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            za / a_sq
        };
        Ok(a.coords()
            .iter()
            .zip(z.coords())
            .map(|(ai, zi)| {
                let p = proj * ai; // P_a z, coordinate i
                (ai - p - self.s * (zi - p)) / den
            })
            .collect())
    }
}

/// Pseudohyperbolic distance `rho(z, w) = ||phi_w(z)||` in `[0, 1]`.
pub fn pseudohyperbolic(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    let phi = MoebiusMap::new(w.clone());
    let coords = phi.apply_coords(z)?;
    let n: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
    Ok(n.sqrt().min(1.0))
}

/// Poincare-Bergman distance `beta = atanh(rho) = (1/2) log((1+rho)/(1-rho))`.
///
/// Fails with [`Error::Overflow`] if `rho` rounds to 1.
pub fn bergman(z: &BallPoint, w: &BallPoint) -> Result<f64> {
    let rho = pseudohyperbolic(z, w)?;
    if rho >= 1.0 {
        return Err(Error::Overflow);
    }
    Ok(rho.atanh())
}

/// `-log(1 - |z|^2)`, positive, cancellation-safe.
fn neg_log_one_minus_sq(z: &DiscPoint) -> f64 {
    -(-z.abs_sq()).ln_1p()
}

/// Closed-form Dirichlet metric on the disc.
///
/// For `z, w != 0` this is
/// `(1 - |log(1 - z̄ w)|^2 / (log(1-|z|^2) log(1-|w|^2)))^{1/2}`;
/// at `z = 0` or `w = 0` the continuous extension forced by `k(., 0) = 1`,
/// i.e. `delta(0, w)^2 = 1 - |w|^2 / log(1/(1-|w|^2))`.
pub fn dirichlet_metric(z: &DiscPoint, w: &DiscPoint) -> f64 {
    let d2 = if z.value() == Complex64::new(0.0, 0.0) || w.value() == Complex64::new(0.0, 0.0) {
        let u = z.abs_sq().max(w.abs_sq());
        if u == 0.0 {
            0.0
        } else {
            1.0 - u / -(-u).ln_1p()
        }
    } else {
        let a = neg_log_one_minus_sq(z);
        let b = neg_log_one_minus_sq(w);
        let cross = (Complex64::new(1.0, 0.0) - z.value().conj() * w.value()).ln();
        1.0 - cross.norm_sqr() / (a * b)
    };
    d2.clamp(0.0, 1.0).sqrt()
}

/// Largest `|lambda|` for which the 2x2 Pick matrix
/// `[[k(z,z)(1 - |lambda|^2), k(z,w)], [k(w,z), k(w,w)]]` stays positive
/// semidefinite. By Sylvester's criterion this is
/// `(det_0 / (k(z,z) k(w,w)))^{1/2}` with `det_0 = k(z,z)k(w,w) - |k(z,w)|^2`,
/// and it coincides with [`delta_from_kernel`].
pub fn pick_two_point(spec: &KernelSpec, z: &Point, w: &Point) -> Result<f64> {
    let kzw = kernel_eval(spec, z, w)?;
    let kzz = kernel_diag(spec, z)?;
    let kww = kernel_diag(spec, w)?;
    let prod = kzz * kww;
    let det0 = prod - kzw.norm_sqr();
    Ok(clamp_delta_sq(det0 / prod)?.sqrt())
}

/// Two-sided comparison of the weighted Dirichlet metric with the
/// pseudohyperbolic metric on the disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedBounds {
    /// `a^{1/2} rho(z, w)`
    pub lower: f64,
    /// `delta_{D_a}(z, w) = (1 - (1 - rho^2)^a)^{1/2}`
    pub value: f64,
    /// `rho(z, w)`
    pub upper: f64,
}

/// Scalar pseudohyperbolic distance on the disc, `|z - w| / |1 - z̄ w|`.
pub fn disc_rho(z: &DiscPoint, w: &DiscPoint) -> f64 {
    let num = (z.value() - w.value()).norm();
    let den = (Complex64::new(1.0, 0.0) - z.value().conj() * w.value()).norm();
    (num / den).min(1.0)
}

/// `1 - rho(z,w)^2 = (1-|z|^2)(1-|w|^2)/|1 - z̄ w|^2`, stable near the diagonal.
fn one_minus_rho_sq(z: &DiscPoint, w: &DiscPoint) -> f64 {
    let den = (Complex64::new(1.0, 0.0) - z.value().conj() * w.value()).norm_sqr();
    (1.0 - z.abs_sq()) * (1.0 - w.abs_sq()) / den
}

/// `(a^{1/2} rho, delta_{D_a}, rho)` with `lower <= value <= upper`.
///
/// The closed form is cross-checked against the kernel route; disagreement
/// beyond the documented precision contract is reported as an error.
pub fn weighted_metric_bounds(a: f64, z: &DiscPoint, w: &DiscPoint) -> Result<WeightedBounds> {
    let spec = KernelSpec::weighted_dirichlet(a)?;
    let rho = disc_rho(z, w);
    let q = one_minus_rho_sq(z, w);
    // 1 - q^a through expm1/ln for accuracy near the diagonal
    let value = (-(a * q.ln()).exp_m1()).max(0.0).sqrt();

    let via_kernel = delta_from_kernel(&spec, &Point::Disc(*z), &Point::Disc(*w))?;
    let tol = if value <= 1e-4 { 1e-10 } else { 1e-12 };
    if (value - via_kernel).abs() > tol {
        return Err(Error::KernelInconsistency {
            value: value - via_kernel,
        });
    }

    Ok(WeightedBounds {
        lower: a.sqrt() * rho,
        value,
        upper: rho,
    })
}

/// Evaluate any [`MetricId`] on a pair of points.
pub fn metric_eval(metric: &MetricId, z: &Point, w: &Point) -> Result<f64> {
    match metric {
        MetricId::KernelDelta(spec) => delta_from_kernel(spec, z, w),
        MetricId::Pseudohyperbolic(d) => {
            let (zb, wb) = (z.ball(), w.ball());
            if zb.dim() != *d {
                return Err(Error::DimensionMismatch {
                    left: zb.dim(),
                    right: *d,
                });
            }
            pseudohyperbolic(&zb, &wb)
        }
        MetricId::Bergman(d) => {
            let (zb, wb) = (z.ball(), w.ball());
            if zb.dim() != *d {
                return Err(Error::DimensionMismatch {
                    left: zb.dim(),
                    right: *d,
                });
            }
            bergman(&zb, &wb)
        }
    }
}
