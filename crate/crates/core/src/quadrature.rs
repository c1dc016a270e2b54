//! Globally adaptive Gauss–Kronrod (7/15) quadrature for complex
//! 3-vector integrands.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::linalg::{cnorm, C3};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd Kronrod nodes 1, 3, 5 and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    /// Absolute floor on the error target, useful when the integral is ~0.
    pub abs_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-6, abs_tol: 0.0, max_intervals: 50_000 }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Estimate {
    pub value: C3,
    pub error: f64,
    pub intervals: usize,
}

struct Piece {
    a: f64,
    b: f64,
    value: C3,
    error: f64,
    floor: f64,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> C3>(f: &F, a: f64, b: f64) -> Piece {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut samples = [C3::zeros(); 15];
    samples[7] = f(center);
    for j in 0..7 {
        let dx = half * XGK[j];
        samples[j] = f(center - dx);
        samples[14 - j] = f(center + dx);
    }
    let weight = |i: usize| WGK[if i <= 7 { i } else { 14 - i }];
    let mut kron = C3::zeros();
    let mut abs_sum = 0.0;
    for (i, s) in samples.iter().enumerate() {
        kron += s.scale(weight(i));
        abs_sum += weight(i) * cnorm(s);
    }
    let mut gauss = samples[7].scale(WG[3]);
    for j in (1..7).step_by(2) {
        gauss += (samples[j] + samples[14 - j]).scale(WG[j / 2]);
    }
    let mean = kron.scale(0.5);
    let asc: f64 = samples.iter().enumerate().map(|(i, s)| weight(i) * cnorm(&(s - mean))).sum::<f64>() * half.abs();
    let raw = cnorm(&(kron - gauss).scale(half));
    // QUADPACK's rescaling of the Kronrod–Gauss difference
    let mut error = if asc > 0.0 && raw > 0.0 { asc * (200.0 * raw / asc).powf(1.5).min(1.0) } else { raw };
    let floor = 50.0 * f64::EPSILON * abs_sum * half.abs();
    if floor > error {
        error = floor;
    }
    Piece { a, b, value: kron.scale(half), error, floor }
}

/// Integrates `f` over the union of consecutive intervals given by
/// `breaks` (at least two strictly increasing points).
pub fn integrate<F>(f: F, breaks: &[f64], opts: &QuadratureOptions) -> Result<Estimate>
where
    F: Fn(f64) -> C3,
{
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("quadrature breakpoints must be strictly increasing".into()));
    }
    let mut heap: BinaryHeap<Piece> = breaks.windows(2).map(|w| kronrod(&f, w[0], w[1])).collect();
    loop {
        let total: C3 = heap.iter().map(|p| p.value).sum();
        let err: f64 = heap.iter().map(|p| p.error).sum();
        let floor: f64 = heap.iter().map(|p| p.floor).sum();
        let target = (opts.rel_tol * cnorm(&total)).max(opts.abs_tol);
        // once every piece sits at its roundoff floor, splitting cannot help
        if err <= target || err <= floor {
            return Ok(Estimate { value: total, error: err, intervals: heap.len() });
        }
        if heap.len() >= opts.max_intervals {
            return Err(Error::Quadrature(format!(
                "no convergence after {} intervals: error {err:e} vs target {target:e}",
                heap.len()
            )));
        }
        // split the worst few pieces per pass to limit the O(n) re-summation
        let batch = (heap.len() / 16).max(1);
        for _ in 0..batch {
            let worst = heap.pop().expect("heap is non-empty");
            let mid = 0.5 * (worst.a + worst.b);
            if !(mid > worst.a && mid < worst.b) {
                return Err(Error::Quadrature(format!("interval [{}, {}] cannot be split further", worst.a, worst.b)));
            }
            heap.push(kronrod(&f, worst.a, mid));
            heap.push(kronrod(&f, mid, worst.b));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn scalar(z: Complex64) -> C3 {
        C3::new(z, z * 2.0, Complex64::from(0.0))
    }

    #[test]
    fn polynomials_are_exact() {
        // both rules are exact here, so no split happens
        let f = |x: f64| scalar(Complex64::new(x.powi(12), 3.0 * x.powi(5)));
        let est = integrate(f, &[0.0, 1.0], &QuadratureOptions::default()).unwrap();
        assert!((est.value[0] - Complex64::new(1.0 / 13.0, 0.5)).norm() < 1e-15);
        assert_eq!(est.intervals, 1);
    }

    #[test]
    fn oscillatory_gaussian() {
        // ∫ exp(-x²/2) e^{ikx} dx = √(2π) exp(-k²/2)
        let k = 3.0;
        let f = |x: f64| scalar(Complex64::new(0.0, k * x).exp() * (-0.5 * x * x).exp());
        let est = integrate(f, &[-12.0, 0.0, 12.0], &QuadratureOptions { rel_tol: 1e-9, ..Default::default() }).unwrap();
        let exact = (2.0 * std::f64::consts::PI).sqrt() * (-0.5 * k * k).exp();
        assert!((est.value[0].re / exact - 1.0).abs() < 1e-8);
        assert!(est.value[0].im.abs() < 1e-9 * exact);
        assert!((est.value[1] - est.value[0].scale(2.0)).norm() < 1e-15);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let f = |x: f64| scalar(Complex64::from(1.0 / x.sqrt()));
        let est = integrate(f, &[0.0, 1.0], &QuadratureOptions::default()).unwrap();
        assert!((est.value[0].re - 2.0).abs() < 1e-5);
    }

    #[test]
    fn bad_breaks_and_budget() {
        let f = |_x: f64| scalar(Complex64::from(1.0));
        assert!(integrate(f, &[1.0, 1.0], &QuadratureOptions::default()).is_err());
        let g = |x: f64| scalar(Complex64::new(0.0, 1e6 * x * x).exp());
        let tight = QuadratureOptions { rel_tol: 1e-12, abs_tol: 0.0, max_intervals: 8 };
        assert!(matches!(integrate(g, &[0.0, 10.0], &tight), Err(Error::Quadrature(_))));
    }
}
