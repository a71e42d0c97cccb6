//! Gregory coefficients and the explicit ball embedding of the disc.
//!
//! The coefficients `c_n` are defined by the series identity
//! `sum_n c_n x^n = 1 - 1/k(x)` for the Dirichlet kernel `k`, equivalently by
//! the generating function `1 + x/log(1-x)`. Three independent routes are
//! implemented:
//!
//! * [`gregory_recursion`] - reciprocal of the kernel's Taylor series
//!   (coefficients `1/(n+1)`), the reference oracle up to `n = 10^4`;
//! * [`gregory_integral`] - the explicit integral
//!   `c_n = (1/n!) int_0^1 t (1-t)(2-t)...(n-1-t) dt`, evaluated with the
//!   telescoped product `prod_{j<n} (j-t)/j`, which is termwise `<= 1` and
//!   never touches the gamma function for large arguments (the naive
//!   `gamma(n-t)/gamma(n+1)` form overflows pairwise past `n ~ 170`);
//! * [`wendel_sandwich`] / [`asymptotic_integral`] - closed-form brackets for
//!   the large-`n` integrand, yielding `c_n ~ 1/(n log(n)^2)`.
//!
//! All `c_n` are nonnegative and `sum c_n <= 1`, so
//! `b(z) = (sqrt(c_1) z, sqrt(c_2) z^2, ...)` maps the disc into the unit
//! ball of l^2 and reproduces the kernel: `k(z,w) = 1/(1 - <b(z), b(w)>)`.
//! [`embed`] provides the truncation with a certified tail bound.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::kernel::{
    kernel_eval, series_reciprocal, BallPoint, DiscPoint, KernelSpec, Point, PowerSeries,
};
use crate::metrics::{delta_from_kernel, dirichlet_metric};
use crate::quad::adaptive_simpson;
use crate::special::gamma;

/// How a coefficient table was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoeffMethod {
    Recursion,
    KluyverIntegral,
    Asymptotic,
}

impl std::fmt::Display for CoeffMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CoeffMethod::Recursion => write!(f, "recursion"),
            CoeffMethod::KluyverIntegral => write!(f, "integral"),
            CoeffMethod::Asymptotic => write!(f, "asymptotic"),
        }
    }
}

/// Table of `c_1 .. c_n_max` with per-entry absolute error estimates.
#[derive(Debug, Clone)]
pub struct CoeffTable {
    values: Vec<f64>,
    errs: Vec<f64>,
    method: CoeffMethod,
}

impl CoeffTable {
    pub fn n_max(&self) -> usize {
        self.values.len()
    }

    /// `c_n`, 1-based.
    pub fn get(&self, n: usize) -> Option<f64> {
        if n >= 1 {
            self.values.get(n - 1).copied()
        } else {
            None
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn errs(&self) -> &[f64] {
        &self.errs
    }

    pub fn method(&self) -> CoeffMethod {
        self.method
    }

    /// Partial sums `sum_{m<=n} c_m` for `n = 1 .. n_max`.
    pub fn partial_sums(&self) -> Vec<f64> {
        let mut acc = 0.0;
        self.values
            .iter()
            .map(|c| {
                acc += c;
                acc
            })
            .collect()
    }

    /// CSV serialization: `n,c_n,method,err`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "n,c_n,method,err")?;
        for (i, (c, e)) in self.values.iter().zip(&self.errs).enumerate() {
            writeln!(w, "{},{:.16e},{},{:.2e}", i + 1, c, self.method, e)?;
        }
        Ok(())
    }
}

/// `c_1 .. c_n_max` from the reciprocal of the kernel's Taylor series. This
/// is the module's reference oracle; in floating point its error grows like
/// `n * ulp`.
pub fn gregory_recursion(n_max: usize) -> Result<CoeffTable> {
    if n_max < 1 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            reason: "need at least one coefficient".into(),
        });
    }
    let k = PowerSeries::dirichlet_kernel(n_max + 1);
    let recip = series_reciprocal(&k)?;
    let mut values = Vec::with_capacity(n_max);
    let mut errs = Vec::with_capacity(n_max);
    for (n, q) in recip.coeffs().iter().enumerate().skip(1) {
        let mut c = -q;
        let est = n as f64 * f64::EPSILON;
        if c < 0.0 {
            if c < -1e-15 {
                return Err(Error::KernelInconsistency { value: c });
            }
            // clamped-reported: a nonnegative quantity rounded barely below zero
            errs.push(est.max(-c));
            c = 0.0;
        } else {
            errs.push(est);
        }
        values.push(c);
    }
    Ok(CoeffTable {
        values,
        errs,
        method: CoeffMethod::Recursion,
    })
}

/// Integrand `(t/n) prod_{j=1}^{n-1} (1 - t/j)` of the explicit formula.
fn kluyver_integrand(t: f64, n: usize) -> f64 {
    let mut acc = t / n as f64;
    for j in 1..n {
        acc *= 1.0 - t / j as f64;
    }
    acc
}

/// `c_n` by adaptive quadrature of the explicit integral, to absolute
/// tolerance `tol`.
pub fn gregory_integral(n: usize, tol: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "need n >= 1".into(),
        });
    }
    adaptive_simpson(|t| kluyver_integrand(t, n), 0.0, 1.0, tol, 48)
}

/// Coefficient table from the integral route.
pub fn gregory_integral_table(n_max: usize, tol: f64) -> Result<CoeffTable> {
    if n_max < 1 {
        return Err(Error::InvalidParameter {
            name: "n_max",
            reason: "need at least one coefficient".into(),
        });
    }
    let mut values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        values.push(gregory_integral(n, tol)?);
    }
    Ok(CoeffTable {
        errs: vec![tol; values.len()],
        values,
        method: CoeffMethod::KluyverIntegral,
    })
}

/// Tail `sum_{m > n} c_m = int_0^1 prod_{j=1}^{n} (1 - t/j) dt`, an
/// independent closed-integral oracle for partial sums (the full sum is 1).
pub fn tail_sum(n: usize, tol: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter {
            name: "n",
            reason: "need n >= 1".into(),
        });
    }
    adaptive_simpson(
        |t| {
            let mut acc = 1.0;
            for j in 1..=n {
                acc *= 1.0 - t / j as f64;
            }
            acc
        },
        0.0,
        1.0,
        tol,
        48,
    )
}

/// Closed-form bracketing integrals around the large-`n` integrand, with
/// `L = log(n+1)`:
///
/// ```text
/// lower = int_0^1 t (1-t) (n+1)^{-t-1} dt,   upper = int_0^1 t (n+1)^{-t-1} dt,
/// ```
///
/// both by integration by parts. They bracket [`asymptotic_integral`]
/// pointwise (since `1 - t <= 1/Gamma(1-t) <= 1` on `[0,1]`), i.e. the
/// Wendel-corrected form of `c_n`, not `c_n` itself; numerically the bracket
/// also contains `c_n` once `n >= 3`.
pub fn wendel_sandwich(n: usize) -> (f64, f64) {
    let a = (n + 1) as f64;
    let l = a.ln();
    let upper = (1.0 - (1.0 + l) / a) / (a * l * l);
    let second_moment = (2.0 - (l * l + 2.0 * l + 2.0) / a) / (a * l * l * l);
    (upper - second_moment, upper)
}

/// `int_0^1 t (n+1)^{-t-1} / Gamma(1-t) dt`, the corrected integrand value
/// that the sandwich brackets; `c_n / asymptotic_integral(n) -> 1`.
pub fn asymptotic_integral(n: usize, tol: f64) -> Result<f64> {
    let l = ((n + 1) as f64).ln();
    adaptive_simpson(
        |t| {
            let recip_gamma = if t >= 1.0 { 0.0 } else { 1.0 / gamma(1.0 - t) };
            t * (-(t + 1.0) * l).exp() * recip_gamma
        },
        0.0,
        1.0,
        tol,
        48,
    )
}

/// `(n, c_n * n * log(n)^2)` for each requested `n`; the ratios approach 1.
/// Uses the recursion for `n <= 10^4` and the integral beyond.
pub fn asymptotic_check(ns: &[usize], tol: f64) -> Result<Vec<(usize, f64)>> {
    let recursion_cutoff = 10_000;
    let max_small = ns.iter().copied().filter(|&n| n <= recursion_cutoff).max();
    let table = match max_small {
        Some(m) => Some(gregory_recursion(m)?),
        None => None,
    };
    let mut out = Vec::with_capacity(ns.len());
    for &n in ns {
        if n < 2 {
            return Err(Error::InvalidParameter {
                name: "n",
                reason: "asymptotic ratio needs n >= 2".into(),
            });
        }
        let c = if n <= recursion_cutoff {
            table.as_ref().unwrap().get(n).unwrap()
        } else {
            gregory_integral(n, tol)?
        };
        let ln = (n as f64).ln();
        out.push((n, c * n as f64 * ln * ln));
    }
    Ok(out)
}

/// Truncation of the embedding `b(z) = (sqrt(c_n) z^n)_n` to `N` coordinates,
/// with a bound on the dropped tail of `||b(z)||^2`.
#[derive(Debug, Clone)]
pub struct EmbeddingVector {
    z: DiscPoint,
    coords: Vec<Complex64>,
    tail: f64,
}

impl EmbeddingVector {
    pub fn z(&self) -> DiscPoint {
        self.z
    }

    pub fn order(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    /// Upper bound on `sum_{n > N} c_n |z|^{2n}`.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coords.iter().map(|c| c.norm_sqr()).sum()
    }

    /// `<b_N(z), b_N(w)> = sum_{n<=N} c_n (z w̄)^n`.
    pub fn inner(&self, other: &EmbeddingVector) -> Result<Complex64> {
        if self.order() != other.order() {
            return Err(Error::DimensionMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| a * b.conj())
            .sum())
    }

    pub fn ball_point(&self) -> Result<BallPoint> {
        BallPoint::new(self.coords.clone())
    }
}

/// Truncated embedding of `z` with `N` coordinates from `table`.
///
/// The tail bound uses `c_n <= 1/n` past the table (nonnegativity plus
/// `sum c_n <= 1`; not sharp): `sum_{n>N} c_n x^n <= x^{N+1}/((N+1)(1-x))`
/// with `x = |z|^2`.
pub fn embed(z: &DiscPoint, n: usize, table: &CoeffTable) -> Result<EmbeddingVector> {
    if n < 1 || n > table.n_max() {
        return Err(Error::InvalidParameter {
            name: "N",
            reason: format!("truncation {n} outside table range 1..={}", table.n_max()),
        });
    }
    let mut coords = Vec::with_capacity(n);
    let mut zp = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        zp *= z.value();
        coords.push(table.get(k).unwrap().sqrt() * zp);
    }
    let x = z.abs_sq();
    let tail = if x == 0.0 {
        0.0
    } else {
        x.powi(n as i32 + 1) / ((n + 1) as f64 * (1.0 - x))
    };
    Ok(EmbeddingVector {
        z: *z,
        coords,
        tail,
    })
}

/// `|k(z,w) - 1/(1 - <b_N(z), b_N(w)>)|`; never exceeds the propagated tail
/// bound `tail/(1 - |<b,b>|)^2`-style envelope of the two vectors.
pub fn reconstruction_error(
    z: &DiscPoint,
    w: &DiscPoint,
    n: usize,
    table: &CoeffTable,
) -> Result<f64> {
    let bz = embed(z, n, table)?;
    let bw = embed(w, n, table)?;
    let ip = bz.inner(&bw)?;
    let approx = Complex64::new(1.0, 0.0) / (Complex64::new(1.0, 0.0) - ip);
    let exact = kernel_eval(&KernelSpec::Dirichlet, &Point::Disc(*z), &Point::Disc(*w))?;
    Ok((exact - approx).norm())
}

/// Bound that [`reconstruction_error`] must respect: the dropped
/// inner-product tail amplified through the geometric series, plus a
/// floating-point floor of a few ulp of the kernel value (for moderate
/// truncations the analytic tail drops far below evaluation noise).
pub fn reconstruction_error_bound(
    z: &DiscPoint,
    w: &DiscPoint,
    n: usize,
    table: &CoeffTable,
) -> Result<f64> {
    let bz = embed(z, n, table)?;
    let bw = embed(w, n, table)?;
    // |<b(z),b(w)> - <b_N(z),b_N(w)>| <= sqrt(tail_z * tail_w) by Cauchy-Schwarz
    let ip_tail = (bz.tail() * bw.tail()).sqrt();
    let ip = bz.inner(&bw)?;
    let gap = (1.0 - ip.norm() - ip_tail).max(f64::MIN_POSITIVE);
    Ok(ip_tail / (gap * gap) + 8.0 * f64::EPSILON / gap)
}

/// `|delta_{DA(N)}(b_N(z), b_N(w)) - delta_D(z, w)|`: how far the truncated
/// embedding is from being an isometry onto its image.
pub fn embedding_isometry_gap(
    z: &DiscPoint,
    w: &DiscPoint,
    n: usize,
    table: &CoeffTable,
) -> Result<f64> {
    let bz = embed(z, n, table)?.ball_point()?;
    let bw = embed(w, n, table)?.ball_point()?;
    let spec = KernelSpec::drury_arveson(n)?;
    let image_dist = delta_from_kernel(&spec, &Point::Ball(bz), &Point::Ball(bw))?;
    Ok((image_dist - dirichlet_metric(z, w)).abs())
}
