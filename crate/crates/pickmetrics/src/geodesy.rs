//! Curve lengths.
//!
//! The length of a curve with respect to a metric is the supremum of the
//! lengths of inscribed polylines. [`polyline_length`] approximates it by
//! dyadic refinement, which by monotonicity yields a certified lower bound.
//! For the Dirichlet metric the length of a piecewise C^1 curve is also the
//! Riemannian integral `int g(gamma(t))^{1/2} |gamma'(t)| dt` with the
//! density
//!
//! ```text
//! g(z) = (log(1/(1-|z|^2)) - |z|^2) / (log(1/(1-|z|^2))^2 (1-|z|^2)^2),
//! g(0) = 1/2,
//! ```
//!
//! which is the mixed second derivative of `log k(z,z)`. Radial lengths grow
//! like `sqrt(log(1/(1-r)))` as `r -> 1`; [`estimate_m`] measures the
//! empirical constant in front.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{BallPoint, DiscPoint, Point};
use crate::metrics::{metric_eval, MetricId};
use crate::quad::{adaptive_simpson, adaptive_simpson_res};

type DiscFn = dyn Fn(f64) -> Complex64 + Send + Sync;
type BallFn = dyn Fn(f64) -> Vec<Complex64> + Send + Sync;

enum CurvePath {
    Disc {
        f: Box<DiscFn>,
        df: Option<Box<DiscFn>>,
    },
    Ball {
        f: Box<BallFn>,
    },
}

/// A parametrized curve on `[a, b]` into the disc or a ball.
///
/// The parametrization callback must be safe for concurrent invocation.
pub struct Curve {
    path: CurvePath,
    a: f64,
    b: f64,
    smooth: bool,
}

impl Curve {
    pub fn disc<F>(f: F, a: f64, b: f64, smooth: bool) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            path: CurvePath::Disc {
                f: Box::new(f),
                df: None,
            },
            a,
            b,
            smooth,
        }
    }

    pub fn disc_with_derivative<F, D>(f: F, df: D, a: f64, b: f64) -> Self
    where
        F: Fn(f64) -> Complex64 + Send + Sync + 'static,
        D: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            path: CurvePath::Disc {
                f: Box::new(f),
                df: Some(Box::new(df)),
            },
            a,
            b,
            smooth: true,
        }
    }

    pub fn ball<F>(f: F, a: f64, b: f64, smooth: bool) -> Self
    where
        F: Fn(f64) -> Vec<Complex64> + Send + Sync + 'static,
    {
        Self {
            path: CurvePath::Ball { f: Box::new(f) },
            a,
            b,
            smooth,
        }
    }

    /// The radial segment `t -> t` on `[0, r]`.
    pub fn radial_segment(r: f64) -> Self {
        Self::disc_with_derivative(
            |t| Complex64::new(t, 0.0),
            |_| Complex64::new(1.0, 0.0),
            0.0,
            r,
        )
    }

    /// Circle arc of radius `r` from angle `t0` to `t1`.
    pub fn circle_arc(r: f64, t0: f64, t1: f64) -> Self {
        Self::disc_with_derivative(
            move |t| Complex64::from_polar(r, t),
            move |t| Complex64::from_polar(r, t) * Complex64::new(0.0, 1.0),
            t0,
            t1,
        )
    }

    pub fn span(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    fn point_at(&self, t: f64) -> Result<Point> {
        match &self.path {
            CurvePath::Disc { f, .. } => Ok(Point::Disc(DiscPoint::new(f(t))?)),
            CurvePath::Ball { f } => Ok(Point::Ball(BallPoint::new(f(t))?)),
        }
    }

    fn disc_value(&self, t: f64) -> Result<DiscPoint> {
        match &self.path {
            CurvePath::Disc { f, .. } => DiscPoint::new(f(t)),
            CurvePath::Ball { .. } => Err(Error::InvalidParameter {
                name: "curve",
                reason: "disc curve required".into(),
            }),
        }
    }

    /// Derivative of a disc curve: analytic if supplied, otherwise central
    /// differences with step `max(1e-6, 1e-8/(b-a))`.
    fn disc_derivative(&self, t: f64) -> Result<Complex64> {
        match &self.path {
            CurvePath::Disc { f, df } => {
                if let Some(df) = df {
                    Ok(df(t))
                } else {
                    let h = (1e-8 / (self.b - self.a)).max(1e-6);
                    let lo = (t - h).max(self.a);
                    let hi = (t + h).min(self.b);
                    Ok((f(hi) - f(lo)) / (hi - lo))
                }
            }
            CurvePath::Ball { .. } => Err(Error::InvalidParameter {
                name: "curve",
                reason: "disc curve required".into(),
            }),
        }
    }
}

/// Outcome of a dyadic polyline refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LengthResult {
    /// Lower bound for the curve length (partition sums increase to the
    /// supremum).
    pub value: f64,
    pub refinement_depth: u32,
    pub converged: bool,
    /// Increment at the last refinement level.
    pub estimate_gap: f64,
}

/// Length of `c` in the metric by dyadic partition refinement.
///
/// Stops once the level increment stays below `tol` twice in a row, or at
/// `max_depth`. Each level also carries a first-order estimate of its own
/// evaluation noise (the kernel-metric route loses `eps/(2 delta)` per
/// segment to the `1 - q` cancellation near the diagonal, so the noise
/// grows fourfold per level exactly as the true increments shrink). Once
/// the increments sink below that noise, finer partitions add error rather
/// than information: refinement stops, `converged` is false, and
/// `estimate_gap` reports the noise level (with a 2x safety margin)
/// instead of the raw increment.
pub fn polyline_length(
    metric: &MetricId,
    c: &Curve,
    tol: f64,
    max_depth: u32,
) -> Result<LengthResult> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "tol",
            reason: "tolerance must be positive".into(),
        });
    }
    let cancellation_prone = matches!(metric, MetricId::KernelDelta(_));
    let (a, b) = c.span();
    let mut prev = {
        let pa = c.point_at(a)?;
        let pb = c.point_at(b)?;
        metric_eval(metric, &pa, &pb)?
    };
    let mut best = prev;
    let mut small_steps = 0u32;
    let mut gap = f64::INFINITY;
    for depth in 1..=max_depth {
        let segments = 1usize << depth;
        let dt = (b - a) / segments as f64;
        let mut sum = 0.0;
        let mut noise = 0.0;
        let mut last = c.point_at(a)?;
        for i in 1..=segments {
            let t = if i == segments { b } else { a + dt * i as f64 };
            let next = c.point_at(t)?;
            let d = metric_eval(metric, &last, &next)?;
            if !d.is_finite() {
                return Err(Error::Overflow);
            }
            sum += d;
            noise += if cancellation_prone {
                if d > 0.0 {
                    f64::EPSILON / (2.0 * d)
                } else {
                    0.0
                }
            } else {
                f64::EPSILON * d
            };
            last = next;
        }
        gap = sum - prev;
        prev = sum;
        let noise_floor = noise.max(1e-12 * sum.abs().max(1.0));
        if noise >= gap.abs().max(tol) || gap < -noise_floor {
            return Ok(LengthResult {
                value: best.max(sum),
                refinement_depth: depth,
                converged: false,
                estimate_gap: gap.abs().max(2.0 * noise),
            });
        }
        best = best.max(sum);
        if gap < tol {
            small_steps += 1;
            if small_steps >= 2 {
                return Ok(LengthResult {
                    value: best,
                    refinement_depth: depth,
                    converged: true,
                    estimate_gap: gap,
                });
            }
        } else {
            small_steps = 0;
        }
    }
    Ok(LengthResult {
        value: best,
        refinement_depth: max_depth,
        converged: false,
        estimate_gap: gap,
    })
}

/// Riemannian density of the Dirichlet metric.
///
/// Closed form for `|z| >= 1e-3`; below that the even Taylor expansion in
/// `u = |z|^2` to order `|z|^6`, with the two branches matching to `1e-10`
/// at the seam. `g(0) = 1/2` exactly.
pub fn g_density(z: &DiscPoint) -> f64 {
    let u = z.abs_sq();
    if u < 1e-6 {
        // g = 1/2 + 5u/6 + 9u^2/8 + 251u^3/180 + O(u^4)
        0.5 + u * (5.0 / 6.0 + u * (9.0 / 8.0 + u * (251.0 / 180.0)))
    } else {
        let l = -(-u).ln_1p();
        let omu = 1.0 - u;
        (l - u) / (l * l * omu * omu)
    }
}

/// Same density evaluated at the real point `t = 1 - v`, carrying the
/// complement `v` to stay accurate as `t -> 1`.
fn g_radial_complement(v: f64) -> f64 {
    // 1 - t^2 = v (2 - v); numerator L - t^2 = L - 1 + v(2 - v)
    let one_minus_w = v * (2.0 - v);
    let l = -one_minus_w.ln();
    (l - 1.0 + one_minus_w) / (l * l * one_minus_w * one_minus_w)
}

/// Length of a piecewise C^1 disc curve in the Dirichlet metric,
/// `int g(gamma(t))^{1/2} |gamma'(t)| dt`, by adaptive quadrature.
pub fn riemannian_length_dirichlet(c: &Curve, tol: f64) -> Result<f64> {
    if !c.is_smooth() {
        return Err(Error::NonSmoothCurve);
    }
    let (a, b) = c.span();
    adaptive_simpson_res(
        |t| {
            let z = c.disc_value(t)?;
            let dz = c.disc_derivative(t)?;
            Ok(g_density(&z).sqrt() * dz.norm())
        },
        a,
        b,
        tol,
        48,
    )
}

/// `int_0^r g(t)^{1/2} dt`, the Dirichlet length of the radial segment.
pub fn radial_length(r: f64, tol: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&r) {
        return Err(Error::DomainViolation {
            domain: "disc",
            norm: r,
        });
    }
    radial_length_complement(1.0 - r, tol)
}

/// Same as [`radial_length`] with `v = 1 - r` as the primary variable, so
/// radii like `1 - 1e-12` are handled without representation loss.
///
/// Past `r = 0.99` the integral is taken in the variable `x = -log(1-t)`,
/// which keeps the node count bounded as `r -> 1`.
pub fn radial_length_complement(v: f64, tol: f64) -> Result<f64> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::DomainViolation {
            domain: "disc",
            norm: 1.0 - v,
        });
    }
    let r = 1.0 - v;
    if r <= 0.0 {
        return Ok(0.0);
    }
    if v >= 0.01 {
        return adaptive_simpson(|t| g_density_radial(t).sqrt(), 0.0, r, tol, 48);
    }
    let base = adaptive_simpson(|t| g_density_radial(t).sqrt(), 0.0, 0.99, tol / 2.0, 48)?;
    // x = -log(1-t); integrand sqrt(g) dt = sqrt(L - w)/(L (2 - v)) dx
    let x0 = -(0.01f64.ln());
    let x1 = -(v.ln());
    let tail = adaptive_simpson(
        |x| {
            let vv = (-x).exp();
            let one_minus_w = vv * (2.0 - vv);
            let l = x - (2.0 - vv).ln();
            (l - 1.0 + one_minus_w).sqrt() / (l * (2.0 - vv))
        },
        x0,
        x1,
        tol / 2.0,
        48,
    )?;
    Ok(base + tail)
}

fn g_density_radial(t: f64) -> f64 {
    let u = t * t;
    if u < 1e-6 {
        0.5 + u * (5.0 / 6.0 + u * (9.0 / 8.0 + u * (251.0 / 180.0)))
    } else if t > 0.5 {
        g_radial_complement(1.0 - t)
    } else {
        let l = -(-u).ln_1p();
        let omu = 1.0 - u;
        (l - u) / (l * l * omu * omu)
    }
}

/// Empirical constant M with `radial_length(r) <= M sqrt(log(1/(1-r)))` over
/// the given radii, with a 5% safety margin. This is a measured constant,
/// not a proof.
pub fn estimate_m(radii: &[f64], tol: f64) -> Result<f64> {
    let complements: Vec<f64> = radii.iter().map(|r| 1.0 - r).collect();
    estimate_m_complement(&complements, tol)
}

/// [`estimate_m`] over complements `v = 1 - r`.
pub fn estimate_m_complement(complements: &[f64], tol: f64) -> Result<f64> {
    if complements.is_empty() {
        return Err(Error::InvalidParameter {
            name: "grid",
            reason: "at least one radius required".into(),
        });
    }
    let mut best: f64 = 0.0;
    for &v in complements {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::InvalidParameter {
                name: "grid",
                reason: format!("radius complement {v} outside (0,1)"),
            });
        }
        let ratio = radial_length_complement(v, tol)? / (-v.ln()).sqrt();
        best = best.max(ratio);
    }
    Ok(best * 1.05)
}

/// Default complement grid `10^{-1} .. 10^{-12}` for [`estimate_m_complement`].
pub fn default_m_grid() -> Vec<f64> {
    (1..=12).map(|k| 10f64.powi(-k)).collect()
}
