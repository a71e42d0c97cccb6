//! Separated sets, packing bounds and the non-embeddability obstruction.
//!
//! On the circle of radius `r`, the lattice `{r e^{ik th(r)}}` with
//! `th(r) = sqrt(1-r)` packs at least `1/sqrt(1-r)` points that stay
//! `eps`-separated in the Dirichlet metric once `r` is close enough to 1
//! (the adjacent-pair distance tends to `sqrt(3/4)`). In the ball, the
//! Duren-Weir bound caps any `eps`-separated set in `B_r` at
//! `(2/eps + 1)^{2d} / (1-r^2)^d`. A bi-Lipschitz map would transport the
//! circle packing into a shrinking ball `B_{s(r)}`, `s(r) = 1-(1-r)^{1/(2d+1)}`,
//! and the two counts grow at incompatible rates: the lower bound like
//! `u^{-1/2}` and the upper like `u^{-d/(2d+1)}` in `u = 1-r`.
//! [`obstruction_report`] tabulates both until the lower bound overtakes.
//!
//! Radii near 1 are carried as complements `u = 1 - r` throughout the report;
//! `r = 1 - 1e-30` is not representable after rounding, its complement is.

use std::io::Write;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geodesy::{default_m_grid, estimate_m_complement};
use crate::kernel::{DiscPoint, Point};
use crate::metrics::{dirichlet_metric, metric_eval, MetricId};

pub(crate) fn thread_cap() -> usize {
    let available = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("PICKMETRICS_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => n.min(available),
            _ => available,
        },
        Err(_) => available,
    }
}

/// Pair set used to certify a [`SeparatedSet`]: every pair for up to 2000
/// points, a deterministic sample (all strides in a geometric ladder) above.
const FULL_CHECK_LIMIT: usize = 2000;

fn certificate_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    if n <= FULL_CHECK_LIMIT {
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
            }
        }
    } else {
        let mut strides: Vec<usize> = Vec::new();
        let mut s = 1;
        while s < n {
            strides.push(s);
            s *= 2;
        }
        for extra in [3usize, 7, 61, 501] {
            if extra < n {
                strides.push(extra);
            }
        }
        strides.sort_unstable();
        strides.dedup();
        for s in strides {
            for i in 0..(n - s) {
                pairs.push((i, i + s));
            }
        }
    }
    pairs
}

/// A finite point set certified `eps`-separated in the given metric.
///
/// For more than 2000 points the certificate is over the sampled pair set
/// (adjacent pairs are always included).
#[derive(Debug, Clone)]
pub struct SeparatedSet {
    points: Vec<Point>,
    eps: f64,
    metric: MetricId,
    min_pairwise: f64,
}

impl SeparatedSet {
    /// Recompute the separation certificate and reject the set if it fails.
    pub fn certify(points: Vec<Point>, metric: MetricId, eps: f64) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter {
                name: "eps",
                reason: "separation parameter must be positive".into(),
            });
        }
        if points.is_empty() {
            return Err(Error::InvalidParameter {
                name: "points",
                reason: "empty point set".into(),
            });
        }
        let min_pairwise = if points.len() == 1 {
            f64::INFINITY
        } else {
            min_over_pairs(&points, &metric, &certificate_pairs(points.len()))?
        };
        if min_pairwise < eps {
            return Err(Error::SeparationFailed {
                got: min_pairwise,
                eps,
            });
        }
        Ok(Self {
            points,
            eps,
            metric,
            min_pairwise,
        })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn metric(&self) -> &MetricId {
        &self.metric
    }

    /// Certified minimum pairwise distance (over the certificate pair set).
    pub fn min_pairwise(&self) -> f64 {
        self.min_pairwise
    }

    /// CSV serialization: one point per row, `re,im` per coordinate.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let dim = self.points.first().map(|p| p.dim()).unwrap_or(1);
        if dim == 1 {
            writeln!(w, "re,im")?;
        } else {
            let header: Vec<String> = (0..dim)
                .flat_map(|i| [format!("re{i}"), format!("im{i}")])
                .collect();
            writeln!(w, "{}", header.join(","))?;
        }
        for p in &self.points {
            let ball = p.ball();
            let row: Vec<String> = ball
                .coords()
                .iter()
                .flat_map(|c| [format!("{:.16e}", c.re), format!("{:.16e}", c.im)])
                .collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

fn min_over_pairs(points: &[Point], metric: &MetricId, pairs: &[(usize, usize)]) -> Result<f64> {
    let workers = thread_cap().min(pairs.len().max(1));
    if workers <= 1 || pairs.len() < 4096 {
        let mut min = f64::INFINITY;
        for &(i, j) in pairs {
            min = min.min(metric_eval(metric, &points[i], &points[j])?);
        }
        return Ok(min);
    }
    let chunk = pairs.len().div_ceil(workers);
    let results: Vec<Result<f64>> = std::thread::scope(|scope| {
        let handles: Vec<_> = pairs
            .chunks(chunk)
            .map(|slice| {
                scope.spawn(move || {
                    let mut min = f64::INFINITY;
                    for &(i, j) in slice {
                        min = min.min(metric_eval(metric, &points[i], &points[j])?);
                    }
                    Ok(min)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });
    let mut min = f64::INFINITY;
    for r in results {
        min = min.min(r?);
    }
    Ok(min)
}

const SQRT_3_4: f64 = 0.866_025_403_784_438_6;

/// The lattice `D(r) = {r e^{ik th(r)} : k = 0..floor(pi/th(r))}` with
/// `th(r) = sqrt(1-r)`, certified `eps`-separated in the Dirichlet metric.
///
/// Fails with [`Error::SeparationFailed`] below the radius threshold where
/// adjacent points come closer than `eps`; `eps >= sqrt(3/4)` is rejected
/// outright since the adjacent distance converges to `sqrt(3/4)`.
pub fn circle_lattice(r: f64, eps: f64) -> Result<SeparatedSet> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::DomainViolation {
            domain: "disc",
            norm: r,
        });
    }
    if !(eps > 0.0 && eps < SQRT_3_4) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("need 0 < eps < sqrt(3/4) = {SQRT_3_4}, got {eps}"),
        });
    }
    let theta = (1.0 - r).sqrt();
    let steps = (std::f64::consts::PI / theta).floor() as usize;
    let mut points = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        points.push(DiscPoint::new(Complex64::from_polar(r, theta * k as f64))?);
    }
    // adjacent-pair criterion first: on this lattice the adjacent distance is
    // minimal, so a failure here is the canonical failure
    let mut min_adjacent = f64::INFINITY;
    for pair in points.windows(2) {
        min_adjacent = min_adjacent.min(dirichlet_metric(&pair[0], &pair[1]));
    }
    if min_adjacent < eps {
        return Err(Error::SeparationFailed {
            got: min_adjacent,
            eps,
        });
    }
    SeparatedSet::certify(
        points.into_iter().map(Point::Disc).collect(),
        MetricId::KernelDelta(crate::kernel::KernelSpec::Dirichlet),
        eps,
    )
}

/// Samples `t -> delta(r e^{it}, r)` on `[0, pi]` and reports whether it is
/// non-decreasing (up to dips of `1e-12`).
pub fn circle_monotonicity_check(r: f64, n_samples: usize) -> Result<bool> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::DomainViolation {
            domain: "disc",
            norm: r,
        });
    }
    if n_samples < 2 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            reason: "need at least two samples".into(),
        });
    }
    let base = DiscPoint::from_re(r)?;
    let mut prev = 0.0;
    for i in 0..n_samples {
        let t = std::f64::consts::PI * i as f64 / (n_samples - 1) as f64;
        let d = dirichlet_metric(&DiscPoint::new(Complex64::from_polar(r, t))?, &base);
        if d < prev - 1e-12 {
            return Ok(false);
        }
        prev = d;
    }
    Ok(true)
}

/// `(r, delta(r e^{i th(r)}, r))` for each radius; the values converge to
/// `sqrt(3/4)` as `r -> 1`.
pub fn circle_asymptotic(radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    radii
        .iter()
        .map(|&r| {
            if !(r > 0.0 && r < 1.0) {
                return Err(Error::DomainViolation {
                    domain: "disc",
                    norm: r,
                });
            }
            let theta = (1.0 - r).sqrt();
            let d = dirichlet_metric(
                &DiscPoint::new(Complex64::from_polar(r, theta))?,
                &DiscPoint::from_re(r)?,
            );
            Ok((r, d))
        })
        .collect()
}

/// Adjacent-pair distance `delta(r e^{i th}, r)` with `th = sqrt(u)`,
/// evaluated from the complement `u = 1 - r`, valid down to `u ~ 1e-300`.
pub fn circle_adjacent_delta(u: f64) -> Result<f64> {
    if !(u > 0.0 && u < 1.0) {
        return Err(Error::InvalidParameter {
            name: "u",
            reason: format!("complement must lie in (0,1), got {u}"),
        });
    }
    let theta = u.sqrt();
    let half = (0.5 * theta).sin();
    // 1 - r^2 e^{-i th}: real part (1 - cos th) + cos th * (1 - r^2)
    let re = 2.0 * half * half + theta.cos() * (u * (2.0 - u));
    let im = (1.0 - u) * (1.0 - u) * theta.sin();
    let log_abs = 0.5 * (re * re + im * im).ln();
    let arg = im.atan2(re);
    let num = log_abs * log_abs + arg * arg;
    let den = u.ln() + (2.0 - u).ln();
    let d2 = 1.0 - num / (den * den);
    Ok(d2.clamp(0.0, 1.0).sqrt())
}

/// First-fit greedy selection of an `eps`-separated subset, in input order.
/// The result is maximal in the input: every rejected point lies within
/// `eps` of an accepted one. Input order is part of the contract.
pub fn greedy_separated(points: &[Point], metric: &MetricId, eps: f64) -> Result<SeparatedSet> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: "separation parameter must be positive".into(),
        });
    }
    let mut accepted: Vec<Point> = Vec::new();
    'next: for p in points {
        for q in &accepted {
            if metric_eval(metric, p, q)? < eps {
                continue 'next;
            }
        }
        accepted.push(p.clone());
    }
    SeparatedSet::certify(accepted, *metric, eps)
}

/// Duren-Weir packing bound `(2/eps + 1)^{2d} / (1 - r^2)^d` on the number
/// of `eps`-separated points of the pseudohyperbolic ball of radius `r`.
pub fn duren_weir_bound(d: usize, r: f64, eps: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "dimension must be at least 1".into(),
        });
    }
    if !(0.0..1.0).contains(&r) {
        return Err(Error::DomainViolation {
            domain: "ball",
            norm: r,
        });
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: "separation parameter must be positive".into(),
        });
    }
    Ok((2.0 / eps + 1.0).powi(2 * d as i32) / (1.0 - r * r).powi(d as i32))
}

/// Growth envelope `1 - exp(-c sqrt(log(1/(1-|z|))))` for Lipschitz maps
/// into the ball fixing the origin.
pub fn slow_growth_envelope(c: f64, z_abs: f64) -> Result<f64> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter {
            name: "c",
            reason: "constant must be positive".into(),
        });
    }
    if !(0.0..1.0).contains(&z_abs) {
        return Err(Error::DomainViolation {
            domain: "disc",
            norm: z_abs,
        });
    }
    Ok(-((-c * (-(-z_abs).ln_1p()).sqrt()).exp_m1()))
}

/// Radius `r_0(alpha, c) = 1 - exp(-(c/alpha)^2)` past which the envelope
/// drops below `1 - (1-|z|)^alpha`. See
/// [`envelope_threshold_complement`] for the representable complement.
pub fn envelope_threshold(c: f64, alpha: f64) -> Result<f64> {
    Ok(1.0 - envelope_threshold_complement(c, alpha)?)
}

/// `exp(-(c/alpha)^2) = 1 - r_0`; underflows to 0 when the threshold is not
/// representable in double precision.
pub fn envelope_threshold_complement(c: f64, alpha: f64) -> Result<f64> {
    if !(c > 0.0 && alpha > 0.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: "need positive envelope constant and exponent".into(),
        });
    }
    let q = c / alpha;
    Ok((-(q * q)).exp())
}

/// Empirical two-sided Lipschitz estimate of a sampled map: max and min of
/// image-distance over source-distance across all sample pairs. These are
/// sample-level bounds, not proofs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Distortion {
    pub lip_upper: f64,
    pub lip_lower: f64,
}

pub fn distortion_estimate(
    samples: &[(Point, Point)],
    src: &MetricId,
    dst: &MetricId,
) -> Result<Distortion> {
    if samples.len() < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            reason: "need at least two samples".into(),
        });
    }
    let mut lip_upper = 0.0f64;
    let mut lip_lower = f64::INFINITY;
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            let s = metric_eval(src, &samples[i].0, &samples[j].0)?;
            if s == 0.0 {
                return Err(Error::DuplicateSource { i, j });
            }
            let t = metric_eval(dst, &samples[i].1, &samples[j].1)?;
            let ratio = t / s;
            lip_upper = lip_upper.max(ratio);
            lip_lower = lip_lower.min(ratio);
        }
    }
    Ok(Distortion {
        lip_upper,
        lip_lower,
    })
}

/// One grid row of the obstruction table, indexed by the complement
/// `u = 1 - r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObstructionRow {
    pub u: f64,
    /// Circle-packing transport lower bound `1/sqrt(u)`.
    pub lower: f64,
    /// Duren-Weir upper bound `(2/(m eps) + 1)^{2d} / (1 - s(r)^2)^d` with
    /// `s(r) = 1 - u^{1/(2d+1)}`.
    pub upper: f64,
    pub crossed: bool,
}

/// Per-radius comparison of the two separated-point counts, with the first
/// crossing radius when the grid reaches it.
#[derive(Debug, Clone)]
pub struct ObstructionReport {
    pub d: usize,
    pub lip_upper: f64,
    pub lip_lower: f64,
    pub eps: f64,
    /// `1/(2d+1)` exactly.
    pub alpha: f64,
    /// Rows sorted by increasing radius, i.e. decreasing `u`.
    pub rows: Vec<ObstructionRow>,
    /// Complement `1 - r*` of the smallest grid radius with `lower > upper`.
    pub r_star_complement: Option<f64>,
    /// Largest complement at which the eps-lattice stays separated
    /// (empirical sweep).
    pub circle_threshold_complement: f64,
    /// `exp(-(C/alpha)^2)` with `C = 2 * lip_upper * M`; 0 when it underflows.
    pub envelope_threshold_complement: f64,
}

impl ObstructionReport {
    /// CSV serialization: `u,r_display,lower,upper,crossed`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "u,r_display,lower,upper,crossed")?;
        for row in &self.rows {
            writeln!(
                w,
                "{:e},1-{:e},{:.16e},{:.16e},{}",
                row.u, row.u, row.lower, row.upper, row.crossed
            )?;
        }
        Ok(())
    }
}

/// Largest complement `u` at which the adjacent lattice distance still
/// reaches `eps`, by bisection in `log u`.
pub fn circle_separation_threshold(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < SQRT_3_4) {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: format!("need 0 < eps < sqrt(3/4) = {SQRT_3_4}, got {eps}"),
        });
    }
    let coarse = 0.5;
    if circle_adjacent_delta(coarse)? >= eps {
        return Ok(coarse);
    }
    let fine = 1e-300;
    if circle_adjacent_delta(fine)? < eps {
        return Err(Error::InvalidParameter {
            name: "eps",
            reason: "too close to sqrt(3/4) to certify in double precision".into(),
        });
    }
    let mut lo = fine.ln(); // separated here
    let mut hi = coarse.ln(); // not separated here
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if circle_adjacent_delta(mid.exp())? >= eps {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.exp())
}

/// Build the obstruction table over a complement grid (`u = 1 - r` per
/// entry). `lip_upper`/`lip_lower` are the bi-Lipschitz constants `L >= m`
/// of the hypothetical embedding; `eps` the source separation.
pub fn obstruction_report(
    d: usize,
    lip_upper: f64,
    lip_lower: f64,
    eps: f64,
    u_grid: &[f64],
) -> Result<ObstructionReport> {
    if d < 1 {
        return Err(Error::InvalidParameter {
            name: "d",
            reason: "dimension must be at least 1".into(),
        });
    }
    if !(lip_lower > 0.0 && lip_upper >= lip_lower) {
        return Err(Error::InvalidParameter {
            name: "L",
            reason: format!("need L >= m > 0, got L = {lip_upper}, m = {lip_lower}"),
        });
    }
    if u_grid.is_empty() {
        return Err(Error::InvalidParameter {
            name: "r_grid",
            reason: "empty grid".into(),
        });
    }
    for &u in u_grid {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::InvalidParameter {
                name: "r_grid",
                reason: format!("complement {u} outside (0,1)"),
            });
        }
    }
    let circle_threshold = circle_separation_threshold(eps)?;
    if !u_grid.iter().any(|&u| u <= circle_threshold) {
        return Err(Error::GridBelowThreshold {
            threshold: circle_threshold,
        });
    }
    let m_const = estimate_m_complement(&default_m_grid(), 1e-9)?;
    let envelope_threshold =
        envelope_threshold_complement(2.0 * lip_upper * m_const, 1.0 / (2 * d + 1) as f64)?;

    let alpha = 1.0 / (2 * d + 1) as f64;
    let k_const = (2.0 / (lip_lower * eps) + 1.0).powi(2 * d as i32);
    let mut us: Vec<f64> = u_grid.to_vec();
    us.sort_by(|a, b| b.partial_cmp(a).unwrap());
    us.dedup();

    let rows: Vec<ObstructionRow> = us
        .iter()
        .map(|&u| {
            let lower = 1.0 / u.sqrt();
            let ua = u.powf(alpha);
            let upper = k_const / (ua * (2.0 - ua)).powi(d as i32);
            ObstructionRow {
                u,
                lower,
                upper,
                crossed: lower > upper,
            }
        })
        .collect();
    let r_star_complement = rows.iter().find(|r| r.crossed).map(|r| r.u);

    Ok(ObstructionReport {
        d,
        lip_upper,
        lip_lower,
        eps,
        alpha,
        rows,
        r_star_complement,
        circle_threshold_complement: circle_threshold,
        envelope_threshold_complement: envelope_threshold,
    })
}

/// Logarithmic complement grid `10^{-1} .. 10^{-k_max}`.
pub fn log_u_grid(k_max: u32) -> Vec<f64> {
    (1..=k_max).map(|k| 10f64.powi(-(k as i32))).collect()
}
