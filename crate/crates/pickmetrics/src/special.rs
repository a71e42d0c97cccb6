//! Log-gamma and gamma for positive real arguments (Lanczos, g = 7, n = 9).

const LANCZOS: [f64; 8] = [
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_TWO_PI: f64 = 0.918_938_533_204_672_7;

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection: Γ(x) Γ(1-x) = π / sin(πx)
        let s = (std::f64::consts::PI * x).sin();
        std::f64::consts::PI.ln() - s.ln() - ln_gamma(1.0 - x)
    } else {
        let x = x - 1.0;
        let mut sum = 0.999_999_999_999_809_9;
        for (i, c) in LANCZOS.iter().enumerate() {
            sum += c / (x + (i + 1) as f64);
        }
        let base = x + 7.5;
        LN_SQRT_TWO_PI + (x + 0.5) * base.ln() - base + sum.ln()
    }
}

/// `Γ(x)` for `x > 0`.
pub fn gamma(x: f64) -> f64 {
    ln_gamma(x).exp()
}
