//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (run with `--nocapture` to see them) before asserting.
//!
//! Criteria 6a, 7a and 10b pin desk-scale tolerance/grid choices that the
//! oracle runs show to be out of reach (the measured values are in the
//! assertion messages); they are kept as stated and left red rather than
//! loosened. 6b, 7b, 10a and 10c verify the corresponding convergence and
//! crossing behaviour at the rates the implementation actually achieves.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pickmetrics::coeffs::{
    asymptotic_check, asymptotic_integral, embedding_isometry_gap, gregory_integral,
    gregory_recursion, reconstruction_error, wendel_sandwich,
};
use pickmetrics::geodesy::{
    g_density, polyline_length, radial_length_complement, riemannian_length_dirichlet, Curve,
};
use pickmetrics::kernel::{kernel_diag, BallPoint, DiscPoint, KernelSpec, Point};
use pickmetrics::metrics::{
    delta_from_kernel, pick_two_point, pseudohyperbolic, weighted_metric_bounds, MetricId,
    MoebiusMap,
};
use pickmetrics::packing::{
    circle_asymptotic, circle_lattice, circle_monotonicity_check, distortion_estimate,
    duren_weir_bound, greedy_separated, log_u_grid, obstruction_report, SeparatedSet,
};

fn report(name: &str, ok: bool, start: Instant, detail: &str) {
    println!(
        "criterion {name}: {} ({:.2}s){}{}",
        if ok { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        if detail.is_empty() { "" } else { " - " },
        detail
    );
}

fn disc(re: f64, im: f64) -> DiscPoint {
    DiscPoint::new(Complex64::new(re, im)).unwrap()
}

/// Deterministic spiral of `n` points with radii up to `rmax`.
fn spiral(n: usize, rmax: f64, phase: f64) -> Vec<DiscPoint> {
    let golden = 2.399_963_229_728_653;
    (0..n)
        .map(|i| {
            let radius = if n == 1 {
                0.0
            } else {
                rmax * i as f64 / (n - 1) as f64
            };
            DiscPoint::new(Complex64::from_polar(radius, golden * i as f64 + phase)).unwrap()
        })
        .collect()
}

fn random_ball_point(rng: &mut ChaCha8Rng, d: usize, rmax: f64) -> BallPoint {
    loop {
        let coords: Vec<Complex64> = (0..d)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let n: f64 = coords.iter().map(|c| c.norm_sqr()).sum();
        if n < rmax * rmax {
            return BallPoint::new(coords).unwrap();
        }
    }
}

#[test]
fn c01_gregory_cross_method() {
    let start = Instant::now();
    let table = gregory_recursion(10_000).unwrap();

    let mut max_diff: f64 = 0.0;
    for n in 1..=200 {
        let ci = gregory_integral(n, 1e-13).unwrap();
        max_diff = max_diff.max((ci - table.get(n).unwrap()).abs());
    }
    let cross_ok = max_diff <= 1e-11;
    let small_ok = (table.get(1).unwrap() - 0.5).abs() <= 1e-12
        && (table.get(2).unwrap() - 1.0 / 12.0).abs() <= 1e-12
        && (table.get(3).unwrap() - 1.0 / 24.0).abs() <= 1e-12;
    let nonneg_ok = table.values().iter().all(|&c| c >= 0.0);

    let ok = cross_ok && small_ok && nonneg_ok;
    report(
        "1 (gregory cross-method)",
        ok,
        start,
        &format!("max |integral - recursion| = {max_diff:.2e} over n <= 200"),
    );
    assert!(cross_ok, "cross-method gap {max_diff:e} > 1e-11");
    assert!(small_ok, "c1/c2/c3 mismatch");
    assert!(nonneg_ok, "negative coefficient below n = 10^4");
}

#[test]
fn c02_asymptotics_and_wendel() {
    let start = Instant::now();
    let ratios = asymptotic_check(&[1_000_000], 1e-13).unwrap();
    let ratio = ratios[0].1;
    let band_ok = (0.8..=1.2).contains(&ratio);

    let mut sandwich_ok = true;
    let mut detail = format!("c_n n log^2 n = {ratio:.6} at n = 10^6;");
    for n in [1_000usize, 10_000, 100_000, 1_000_000] {
        let (lo, up) = wendel_sandwich(n);
        let corrected = asymptotic_integral(n, 1e-15).unwrap();
        let inside = lo <= corrected && corrected <= up;
        sandwich_ok &= inside;
        detail.push_str(&format!(" n={n}: {}", if inside { "in" } else { "OUT" }));
    }

    let ok = band_ok && sandwich_ok;
    report("2 (asymptotics + Wendel sandwich)", ok, start, &detail);
    assert!(band_ok, "ratio at 10^6 = {ratio} outside [0.8, 1.2]");
    assert!(sandwich_ok, "sandwich violated");
}

#[test]
fn c03_kernel_reconstruction() {
    let start = Instant::now();
    let n = 200;
    let table = gregory_recursion(n).unwrap();
    let zs = spiral(5, 0.7, 0.0);
    let ws = spiral(5, 0.7, 0.5);

    let mut recon_max: f64 = 0.0;
    let mut gap_max: f64 = 0.0;
    for z in &zs {
        for w in &ws {
            recon_max = recon_max.max(reconstruction_error(z, w, n, &table).unwrap());
            gap_max = gap_max.max(embedding_isometry_gap(z, w, n, &table).unwrap());
        }
    }
    let recon_ok = recon_max <= 1e-8;
    let gap_ok = gap_max <= 1e-6;

    let ok = recon_ok && gap_ok;
    report(
        "3 (kernel reconstruction at N = 200)",
        ok,
        start,
        &format!("max reconstruction error {recon_max:.2e}, max isometry gap {gap_max:.2e}"),
    );
    assert!(recon_ok, "reconstruction error {recon_max:e} > 1e-8");
    assert!(gap_ok, "isometry gap {gap_max:e} > 1e-6");
}

#[test]
fn c04_metric_consistency() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(20_260_810);
    let mut max_spread: f64 = 0.0;
    for d in 1..=4usize {
        let spec = KernelSpec::drury_arveson(d).unwrap();
        for _ in 0..1000 {
            let z = random_ball_point(&mut rng, d, 0.95);
            let w = random_ball_point(&mut rng, d, 0.95);
            let rho = pseudohyperbolic(&z, &w).unwrap();
            let dk =
                delta_from_kernel(&spec, &Point::Ball(z.clone()), &Point::Ball(w.clone())).unwrap();
            let pk = pick_two_point(&spec, &Point::Ball(z), &Point::Ball(w)).unwrap();
            max_spread = max_spread.max((rho - dk).abs()).max((rho - pk).abs());
        }
    }
    let consistency_ok = max_spread <= 1e-12;

    let mut max_invariance: f64 = 0.0;
    for d in 1..=4usize {
        for _ in 0..250 {
            let a = random_ball_point(&mut rng, d, 0.9);
            let z = random_ball_point(&mut rng, d, 0.95);
            let w = random_ball_point(&mut rng, d, 0.95);
            let phi = MoebiusMap::new(a);
            let before = pseudohyperbolic(&z, &w).unwrap();
            let after = pseudohyperbolic(&phi.apply(&z).unwrap(), &phi.apply(&w).unwrap()).unwrap();
            max_invariance = max_invariance.max((before - after).abs());
        }
    }
    let invariance_ok = max_invariance <= 1e-11;

    let ok = consistency_ok && invariance_ok;
    report(
        "4 (metric consistency, d = 1..4)",
        ok,
        start,
        &format!(
            "max |rho - delta|, |rho - pick| = {max_spread:.2e}; Moebius invariance {max_invariance:.2e}"
        ),
    );
    assert!(consistency_ok, "route spread {max_spread:e} > 1e-12");
    assert!(invariance_ok, "invariance {max_invariance:e} > 1e-11");
}

#[test]
fn c05_length_formulas() {
    let start = Instant::now();

    let seg = Curve::radial_segment(0.5);
    let poly = polyline_length(&MetricId::Pseudohyperbolic(1), &seg, 1e-6, 20).unwrap();
    let atanh_ok = (poly.value - 0.5f64.atanh()).abs() <= 1e-5;

    let g0_ok = g_density(&disc(0.0, 0.0)) == 0.5;

    // finite-difference mixed second derivative of log k(z,z) on |z| <= 0.95
    let fd = |x: f64, y: f64| -> f64 {
        let f = |a: f64, b: f64| {
            kernel_diag(
                &KernelSpec::Dirichlet,
                &Point::Disc(DiscPoint::new(Complex64::new(a, b)).unwrap()),
            )
            .unwrap()
            .ln()
        };
        let h = 1e-3;
        let d2x = (-f(x + 2.0 * h, y) + 16.0 * f(x + h, y) - 30.0 * f(x, y) + 16.0 * f(x - h, y)
            - f(x - 2.0 * h, y))
            / (12.0 * h * h);
        let d2y = (-f(x, y + 2.0 * h) + 16.0 * f(x, y + h) - 30.0 * f(x, y) + 16.0 * f(x, y - h)
            - f(x, y - 2.0 * h))
            / (12.0 * h * h);
        (d2x + d2y) / 4.0
    };
    let mut fd_max: f64 = 0.0;
    for i in 0..=19 {
        let r = 0.95 * i as f64 / 19.0;
        for k in 0..4 {
            let t = 1.7 * k as f64;
            let (x, y) = (r * t.cos(), r * t.sin());
            let g = g_density(&DiscPoint::new(Complex64::new(x, y)).unwrap());
            fd_max = fd_max.max((g - fd(x, y)).abs());
        }
    }
    let fd_ok = fd_max <= 1e-5;

    let seg9 = Curve::radial_segment(0.9);
    let riem = riemannian_length_dirichlet(&seg9, 1e-9).unwrap();
    let poly9 = polyline_length(
        &MetricId::KernelDelta(KernelSpec::Dirichlet),
        &seg9,
        1e-8,
        18,
    )
    .unwrap();
    let cross_ok = (riem - poly9.value).abs() <= 1e-6;

    let ok = atanh_ok && g0_ok && fd_ok && cross_ok;
    report(
        "5 (length formulas)",
        ok,
        start,
        &format!(
            "rho-polyline vs atanh gap {:.2e}; g fd gap {fd_max:.2e}; riemann vs polyline {:.2e}",
            (poly.value - 0.5f64.atanh()).abs(),
            (riem - poly9.value).abs()
        ),
    );
    assert!(atanh_ok, "polyline {} vs atanh(0.5)", poly.value);
    assert!(g0_ok, "g(0) != 1/2");
    assert!(fd_ok, "finite-difference gap {fd_max:e} > 1e-5");
    assert!(cross_ok, "riemann {riem} vs polyline {}", poly9.value);
}

fn radial_ratios() -> Vec<(i32, f64)> {
    (4..=12)
        .map(|k| {
            let u = 10f64.powi(-k);
            let ratio = radial_length_complement(u, 1e-10).unwrap() / (-u.ln()).sqrt();
            (k, ratio)
        })
        .collect()
}

#[test]
fn c06a_radial_length_ratio_band() {
    let start = Instant::now();
    let u = 1e-12;
    let ratio = radial_length_complement(u, 1e-10).unwrap() / (-u.ln()).sqrt();
    let ok = (0.9..=1.1).contains(&ratio);
    report(
        "6a (radial ratio in [0.9, 1.1] at u = 1e-12)",
        ok,
        start,
        &format!("measured ratio {ratio:.6}"),
    );
    assert!(
        ok,
        "ratio at u = 1e-12 is {ratio:.6}, outside the stated band [0.9, 1.1]; \
         the ratio approaches 1 like 1 - O(1/sqrt(log(1/u))) and would need u ~ 1e-17 \
         to enter the band"
    );
}

#[test]
fn c06b_radial_length_ratio_monotone() {
    let start = Instant::now();
    let ratios = radial_ratios();
    let mut prev = f64::INFINITY;
    let mut ok = true;
    for &(_, r) in &ratios {
        let dist = (1.0 - r).abs();
        ok &= dist <= prev + 0.01;
        prev = dist;
    }
    report(
        "6b (radial ratios move monotonically toward 1, u = 1e-4..1e-12)",
        ok,
        start,
        &format!(
            "ratios {:?}",
            ratios
                .iter()
                .map(|&(_, r)| (r * 1e4).round() / 1e4)
                .collect::<Vec<_>>()
        ),
    );
    assert!(ok, "distances to 1 not monotone: {ratios:?}");
}

#[test]
fn c07a_circle_asymptotic_band() {
    let start = Instant::now();
    let target = (3.0f64 / 4.0).sqrt();
    let out = circle_asymptotic(&[1.0 - 1e-8]).unwrap();
    let gap = (out[0].1 - target).abs();
    let ok = gap <= 0.01;
    report(
        "7a (circle asymptotic within 0.01 of sqrt(3/4) at u = 1e-8)",
        ok,
        start,
        &format!("delta = {:.6}, gap = {gap:.6}", out[0].1),
    );
    assert!(
        ok,
        "gap to sqrt(3/4) at u = 1e-8 is {gap:.4}; the adjacent distance converges like \
         sqrt(3/4) - O(1/log(1/u)) (log(2) denominator shift plus the pi/2 argument term) \
         and first meets 0.01 near u ~ 4e-12"
    );
}

#[test]
fn c07b_circle_monotonicity() {
    let start = Instant::now();
    let mut ok = true;
    for r in [0.5, 0.9, 0.99, 1.0 - 1e-6] {
        ok &= circle_monotonicity_check(r, 1000).unwrap();
    }
    report(
        "7b (adjacent-angle monotonicity at 10^3 samples)",
        ok,
        start,
        "r in {0.5, 0.9, 0.99, 1-1e-6}",
    );
    assert!(ok, "monotonicity violated");
}

#[test]
fn c08_circle_lattice() {
    let start = Instant::now();
    let set = circle_lattice(1.0 - 1e-6, 0.8).unwrap();
    let count_ok = set.len() >= 1000;

    // full pairwise certification on an evenly strided 2000-point subsample
    let stride = set.len() as f64 / 2000.0;
    let subsample: Vec<Point> = (0..2000)
        .map(|i| set.points()[(i as f64 * stride) as usize].clone())
        .collect();
    let recert =
        SeparatedSet::certify(subsample, MetricId::KernelDelta(KernelSpec::Dirichlet), 0.8);
    let certified_ok = recert.is_ok();

    let ok = count_ok && certified_ok;
    report(
        "8 (circle lattice at u = 1e-6, eps = 0.8)",
        ok,
        start,
        &format!(
            "|D| = {}, subsample min pairwise = {:?}",
            set.len(),
            recert.as_ref().map(|s| s.min_pairwise()).ok()
        ),
    );
    assert!(count_ok, "lattice size {} < 1000", set.len());
    assert!(certified_ok, "subsample certification failed");
}

#[test]
fn c09_greedy_respects_packing_bound() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut ok = true;
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let d = 1 + (trial % 4);
        let r = rng.gen_range(0.3..0.9);
        let eps = rng.gen_range(0.25..1.2);
        let pts: Vec<Point> = (0..150)
            .map(|_| Point::Ball(random_ball_point(&mut rng, d, r)))
            .collect();
        let set = greedy_separated(&pts, &MetricId::Pseudohyperbolic(d), eps).unwrap();
        let bound = duren_weir_bound(d, r, eps).unwrap();
        worst = worst.max(set.len() as f64 / bound);
        ok &= (set.len() as f64) <= bound;
    }
    report(
        "9 (greedy counts vs Duren-Weir bound, 100 seeded trials)",
        ok,
        start,
        &format!("max count/bound = {worst:.3}"),
    );
    assert!(ok, "a greedy set exceeded the packing bound");
}

#[test]
fn c10a_obstruction_slopes() {
    let start = Instant::now();
    let mut ok = true;
    let mut detail = String::new();
    for d in 1..=6usize {
        let rep = obstruction_report(d, 1.0, 1.0, 0.8, &log_u_grid(15)).unwrap();
        let a = &rep.rows[rep.rows.len() - 2];
        let b = &rep.rows[rep.rows.len() - 1];
        let dlog_u = b.u.ln() - a.u.ln();
        let lower_slope = (b.lower.ln() - a.lower.ln()) / dlog_u;
        let upper_slope = (b.upper.ln() - a.upper.ln()) / dlog_u;
        let target = -(d as f64) / (2 * d + 1) as f64;
        ok &= (lower_slope + 0.5).abs() <= 0.02;
        ok &= (upper_slope - target).abs() <= 0.02;
        detail.push_str(&format!(" d={d}: {upper_slope:.4} vs {target:.4};"));
    }
    report(
        "10a (log-log slopes -1/2 and -d/(2d+1) within 0.02, final decade)",
        ok,
        start,
        &detail,
    );
    assert!(ok, "slope mismatch:{detail}");
}

#[test]
fn c10b_obstruction_r_star_on_stated_grid() {
    let start = Instant::now();
    let grid = log_u_grid(15);
    let mut found = Vec::new();
    let mut missing = Vec::new();
    for d in 1..=6usize {
        let rep = obstruction_report(d, 1.0, 1.0, 0.8, &grid).unwrap();
        match rep.r_star_complement {
            Some(u) => found.push((d, u)),
            None => missing.push(d),
        }
    }
    let ok = missing.is_empty();
    report(
        "10b (r_star found for every d in 1..6 on the grid to u = 1e-15)",
        ok,
        start,
        &format!("found {found:?}, missing for d in {missing:?}"),
    );
    assert!(
        ok,
        "no crossing on the stated grid for d in {missing:?}: with L = m = 1, eps = 0.8 the \
         constant (2/eps + 1)^{{2d}} forces the crossing down to u ~ 1e-16 (d=2), 1e-34 (d=3), \
         1e-57 (d=4), 1e-87 (d=5), 1e-123 (d=6); the exponent gap 1/(2(2d+1)) per decade is \
         too small for k <= 15 once d >= 2 (see the extended-grid criterion)"
    );
}

#[test]
fn c10c_obstruction_r_star_extended_grid() {
    let start = Instant::now();
    let grid = log_u_grid(130);
    let mut ok = true;
    let mut prev_u = f64::INFINITY;
    let mut detail = String::new();
    for d in 1..=6usize {
        let rep = obstruction_report(d, 1.0, 1.0, 0.8, &grid).unwrap();
        match rep.r_star_complement {
            Some(u) => {
                ok &= u < prev_u;
                prev_u = u;
                detail.push_str(&format!(" d={d}: u* = {u:.0e};"));
            }
            None => {
                ok = false;
                detail.push_str(&format!(" d={d}: none;"));
            }
        }
    }
    report(
        "10c (extended grid to u = 1e-130 crosses for every d, deeper as d grows)",
        ok,
        start,
        &detail,
    );
    assert!(ok, "extended-grid crossing failed:{detail}");
}

#[test]
fn c11_weighted_dirichlet() {
    let start = Instant::now();
    let zs = spiral(20, 0.88, 0.0);
    let ws = spiral(20, 0.88, 0.9);
    let mut sandwich_ok = true;
    let mut distortion_ok = true;
    let mut detail = String::new();
    for &a in &[0.1, 0.5, 0.9] {
        for z in &zs {
            for w in &ws {
                let b = weighted_metric_bounds(a, z, w).unwrap();
                sandwich_ok &= b.lower <= b.value + 1e-12 && b.value <= b.upper + 1e-12;
            }
        }
        let samples: Vec<(Point, Point)> = zs
            .iter()
            .map(|z| (Point::Disc(*z), Point::Disc(*z)))
            .collect();
        let dist = distortion_estimate(
            &samples,
            &MetricId::KernelDelta(KernelSpec::weighted_dirichlet(a).unwrap()),
            &MetricId::Pseudohyperbolic(1),
        )
        .unwrap();
        distortion_ok &= dist.lip_lower >= 1.0 - 1e-6 && dist.lip_upper <= 1.0 / a.sqrt() + 1e-6;
        detail.push_str(&format!(
            " a={a}: [{:.4}, {:.4}] in [1, {:.4}];",
            dist.lip_lower,
            dist.lip_upper,
            1.0 / a.sqrt()
        ));
    }
    let ok = sandwich_ok && distortion_ok;
    report(
        "11 (weighted Dirichlet sandwich + distortion)",
        ok,
        start,
        &detail,
    );
    assert!(sandwich_ok, "sqrt(a) rho <= delta_a <= rho violated");
    assert!(distortion_ok, "distortion outside [1, a^-1/2]:{detail}");
}

#[test]
fn c12_cli_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_pickmetrics");
    let dir = tempfile::tempdir().unwrap();
    let commands: Vec<Vec<String>> = vec![
        vec!["coeffs", "--n-max", "50", "--method", "both"],
        vec![
            "metric",
            "--kernel",
            "dirichlet",
            "--z",
            "0.5,0.1",
            "--w",
            "-0.3,0.2",
        ],
        vec!["length", "--r", "0.9", "--tol", "1e-8"],
        vec!["separate", "--r", "0.999999", "--eps", "0.8"],
        vec!["obstruct", "--d", "1", "--k-max", "15"],
        vec!["embed-check", "--grid", "4", "--trunc", "120"],
    ]
    .into_iter()
    .map(|v| v.into_iter().map(String::from).collect())
    .collect();

    let mut ok = true;
    for (i, cmd) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{i}_{run}.csv"));
            let status = std::process::Command::new(bin)
                .args(cmd)
                .arg("--out")
                .arg(&out)
                .arg("--seed")
                .arg("42")
                .stdout(std::process::Stdio::null())
                .status()
                .unwrap();
            assert!(status.success(), "command {:?} exited with {status:?}", cmd);
            outputs.push(std::fs::read(&out).unwrap());
        }
        let same = outputs[0] == outputs[1];
        ok &= same;
        if !same {
            println!("  non-deterministic output for {cmd:?}");
        }
    }
    report(
        "12 (CLI determinism: byte-identical CSV on repeated runs)",
        ok,
        start,
        &format!("{} commands", commands.len()),
    );
    assert!(ok, "CSV output differed between identical runs");
}
