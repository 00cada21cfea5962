//! Smooth, x2-periodic perturbations of the Riemann data.
//!
//! The velocity perturbation is the gradient of a single potential
//! `φ = ε Σ_m (a_m cos m x2 + b_m sin m x2) β(x1)` shared by both sides, so v² is
//! continuous across x1 = 0 and the data are irrotational in the distributional
//! sense. The sound-speed perturbation uses its own modes on each side.

use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};

/// Gaussian envelope values below this are cut to zero (compact support in practice).
pub const BUMP_CUTOFF: f64 = 1e-15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub m: u32,
    pub a: f64,
    pub b: f64,
}

impl Mode {
    /// k-th x2-derivative of a cos(m x) + b sin(m x).
    pub fn derivative(&self, x2: f64, k: usize) -> f64 {
        let m = self.m as f64;
        let (s, c) = (m * x2).sin_cos();
        // d^k cos = m^k cos(x + kπ/2), d^k sin = m^k sin(x + kπ/2)
        let (dc, ds) = match k % 4 {
            0 => (c, s),
            1 => (-s, c),
            2 => (-c, -s),
            _ => (s, -c),
        };
        m.powi(k as i32) * (self.a * dc + self.b * ds)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Perturbation {
    pub epsilon: f64,
    /// Gaussian width of the x1 envelope.
    pub width: f64,
    pub potential: Vec<Mode>,
    pub sound_left: Vec<Mode>,
    pub sound_right: Vec<Mode>,
}

impl Perturbation {
    pub fn none() -> Self {
        Self { epsilon: 0.0, width: 0.5, potential: vec![], sound_left: vec![], sound_right: vec![] }
    }

    /// Two modes per field with coefficients drawn from `seed`, normalised so that
    /// Σ(|a|+|b|) = 1 for each field.
    pub fn seeded(epsilon: f64, width: f64, seed: u64) -> Self {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut draw = || {
            let mut modes: Vec<Mode> = (1..=2)
                .map(|m| Mode { m, a: rng.random_range(-1.0..1.0), b: rng.random_range(-1.0..1.0) })
                .collect();
            let norm: f64 = modes.iter().map(|q| q.a.abs() + q.b.abs()).sum();
            for q in &mut modes {
                q.a /= norm;
                q.b /= norm;
            }
            modes
        };
        let potential = draw();
        let sound_left = draw();
        let sound_right = draw();
        Self { epsilon, width, potential, sound_left, sound_right }
    }

    /// k-th derivative of the envelope β(x1) = exp(−x1²/(2σ²)).
    pub fn envelope(&self, x1: f64, k: usize) -> f64 {
        let s2 = self.width * self.width;
        let b = (-x1 * x1 / (2.0 * s2)).exp();
        if b < BUMP_CUTOFF {
            return 0.0;
        }
        // β^(k) = (−1/σ)^k He_k(x/σ) β, probabilists' Hermite polynomials
        let y = x1 / self.width;
        let (mut h0, mut h1) = (1.0, y);
        let hk = match k {
            0 => h0,
            1 => h1,
            _ => {
                for n in 1..k {
                    let h2 = y * h1 - n as f64 * h0;
                    h0 = h1;
                    h1 = h2;
                }
                h1
            }
        };
        (-1.0 / self.width).powi(k as i32) * hk * b
    }

    fn modal(modes: &[Mode], x2: f64, k: usize) -> f64 {
        modes.iter().map(|m| m.derivative(x2, k)).sum()
    }

    /// ∂^{k1}_{x1} ∂^{k2}_{x2} φ.
    pub fn potential_derivative(&self, x1: f64, x2: f64, k1: usize, k2: usize) -> f64 {
        if self.epsilon == 0.0 {
            return 0.0;
        }
        self.epsilon * self.envelope(x1, k1) * Self::modal(&self.potential, x2, k2)
    }

    pub fn potential(&self, x1: f64, x2: f64) -> f64 {
        self.potential_derivative(x1, x2, 0, 0)
    }

    /// ∂^{k1}_{x1} ∂^{k2}_{x2} of the sound-speed perturbation on the given side.
    pub fn sound_derivative(&self, right_side: bool, x1: f64, x2: f64, k1: usize, k2: usize) -> f64 {
        if self.epsilon == 0.0 {
            return 0.0;
        }
        let modes = if right_side { &self.sound_right } else { &self.sound_left };
        self.epsilon * self.envelope(x1, k1) * Self::modal(modes, x2, k2)
    }

    pub fn sound(&self, right_side: bool, x1: f64, x2: f64) -> f64 {
        self.sound_derivative(right_side, x1, x2, 0, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn envelope_derivatives_match_finite_differences() {
        let p = Perturbation::seeded(0.1, 0.4, 3);
        let h = 1e-4;
        for k in 0..5 {
            for &x in &[-0.3, 0.0, 0.17, 0.5] {
                let fd = (p.envelope(x + h, k) - p.envelope(x - h, k)) / (2.0 * h);
                let exact = p.envelope(x, k + 1);
                assert!((fd - exact).abs() < 1e-5 * (1.0 + exact.abs()) * 10f64.powi(k as i32), "k={k} x={x}");
            }
        }
    }

    #[test]
    fn mode_derivatives_cycle() {
        let m = Mode { m: 2, a: 0.3, b: -0.7 };
        let h = 1e-5;
        for k in 0..6 {
            let fd = (m.derivative(1.1 + h, k) - m.derivative(1.1 - h, k)) / (2.0 * h);
            assert!((fd - m.derivative(1.1, k + 1)).abs() < 1e-6 * 2f64.powi(k as i32 + 1));
        }
    }

    #[test]
    fn seeded_is_normalised_and_reproducible() {
        let a = Perturbation::seeded(0.01, 0.5, 11);
        assert_eq!(a, Perturbation::seeded(0.01, 0.5, 11));
        let s: f64 = a.potential.iter().map(|q| q.a.abs() + q.b.abs()).sum();
        assert!((s - 1.0).abs() < 1e-14);
    }
}
