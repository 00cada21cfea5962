//! Trigonometric interpolation on uniform 2π-periodic grids.

use std::f64::consts::PI;

use rustfft::{num_complex::Complex, FftPlanner};

/// Real Fourier series `a₀ + Σ_m (a_m cos mϑ + b_m sin mϑ)` interpolating `n` samples
/// at ϑ_j = 2πj/n. The Nyquist mode (even n) is split symmetrically.
#[derive(Debug, Clone, PartialEq)]
pub struct Fourier {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

pub fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

impl Fourier {
    pub fn from_samples(samples: &[f64]) -> Self {
        let n = samples.len();
        let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let half = n / 2;
        let mut a = vec![0.0; half + 1];
        let mut b = vec![0.0; half + 1];
        let inv = 1.0 / n as f64;
        a[0] = buf[0].re * inv;
        for m in 1..=half {
            let w = if 2 * m == n { inv } else { 2.0 * inv };
            a[m] = buf[m].re * w;
            b[m] = -buf[m].im * w;
        }
        if n % 2 == 0 {
            // sin(nϑ/2) vanishes on the grid
            b[half] = 0.0;
        }
        Self { n, a, b }
    }

    /// k-th derivative at an arbitrary ϑ.
    pub fn eval(&self, theta: f64, k: usize) -> f64 {
        let mut s = if k == 0 { self.a[0] } else { 0.0 };
        for m in 1..self.a.len() {
            let mf = m as f64;
            let (sn, cs) = (mf * theta).sin_cos();
            let (dc, ds) = match k % 4 {
                0 => (cs, sn),
                1 => (-sn, cs),
                2 => (-cs, -sn),
                _ => (sn, -cs),
            };
            s += mf.powi(k as i32) * (self.a[m] * dc + self.b[m] * ds);
        }
        s
    }

    /// Largest coefficient magnitude among the upper third of the modes (resolution check).
    pub fn tail(&self) -> f64 {
        let m0 = 2 * self.a.len() / 3;
        (m0..self.a.len()).map(|m| self.a[m].abs().max(self.b[m].abs())).fold(0.0, f64::max)
    }
}

/// Spectral k-th derivative of grid samples.
pub fn differentiate(samples: &[f64], k: usize) -> Vec<f64> {
    let n = samples.len();
    if k == 0 {
        return samples.to_vec();
    }
    let mut buf: Vec<Complex<f64>> = samples.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_forward(n).process(&mut buf);
    for (m, z) in buf.iter_mut().enumerate() {
        let mm = if m <= n / 2 { m as i64 } else { m as i64 - n as i64 };
        if n % 2 == 0 && 2 * m == n && k % 2 == 1 {
            *z = Complex::new(0.0, 0.0);
            continue;
        }
        let ik = Complex::new(0.0, mm as f64).powu(k as u32);
        *z *= ik;
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|z| z.re / n as f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(t: f64) -> f64 {
        (t.sin() + 0.3 * (2.0 * t).cos()).exp()
    }

    #[test]
    fn interpolation_is_spectrally_accurate() {
        let n = 64;
        let s: Vec<f64> = grid(n).iter().map(|&t| f(t)).collect();
        let four = Fourier::from_samples(&s);
        for &t in &[0.1, 1.234, 4.0, 6.2] {
            assert!((four.eval(t, 0) - f(t)).abs() < 1e-12);
            let h = 1e-5;
            let fd = (f(t + h) - f(t - h)) / (2.0 * h);
            assert!((four.eval(t, 1) - fd).abs() < 1e-8);
        }
        assert!(four.tail() < 1e-12);
    }

    #[test]
    fn grid_derivative_matches_point_evaluation() {
        for n in [31usize, 32] {
            let s: Vec<f64> = grid(n).iter().map(|&t| f(t)).collect();
            let four = Fourier::from_samples(&s);
            for k in 1..4 {
                let d = differentiate(&s, k);
                for (j, t) in grid(n).iter().enumerate() {
                    assert!((d[j] - four.eval(*t, k)).abs() < 1e-9 * 10f64.powi(k as i32), "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn trig_polynomial_reproduced_exactly() {
        let n = 16;
        let s: Vec<f64> = grid(n).iter().map(|&t| 1.0 + 2.0 * (3.0 * t).sin() - (5.0 * t).cos()).collect();
        let four = Fourier::from_samples(&s);
        assert!((four.a[0] - 1.0).abs() < 1e-14);
        assert!((four.b[3] - 2.0).abs() < 1e-14);
        assert!((four.a[5] + 1.0).abs() < 1e-14);
    }
}
