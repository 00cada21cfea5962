//! Polytropic gas `p = k0 ρ^γ`, state conversions and the mechanical energy pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Densities below this are treated as vacuum by the conversions.
pub const VACUUM_RHO: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasLaw {
    gamma: f64,
    k0: f64,
}

impl GasLaw {
    pub fn new(gamma: f64, k0: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma < 3.0) {
            return Err(Error::Domain(format!("gamma must lie in (1,3), got {gamma}")));
        }
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(Error::Domain(format!("k0 must be positive, got {k0}")));
        }
        Ok(Self { gamma, k0 })
    }

    /// γ = 2, k0 = 1/2, for which c = √ρ.
    pub fn standard() -> Self {
        Self { gamma: 2.0, k0: 0.5 }
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn k0(&self) -> f64 {
        self.k0
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        self.k0 * rho.powf(self.gamma)
    }

    /// p'(ρ) = c².
    pub fn dpressure(&self, rho: f64) -> f64 {
        self.k0 * self.gamma * rho.powf(self.gamma - 1.0)
    }

    pub fn sound_speed(&self, rho: f64) -> Result<f64> {
        check_density(rho)?;
        Ok(self.c_of_rho(rho))
    }

    /// Sound speed without the domain check (hot loops; caller guarantees ρ ≥ 0).
    #[inline]
    pub fn c_of_rho(&self, rho: f64) -> f64 {
        (self.k0 * self.gamma).sqrt() * rho.powf(0.5 * (self.gamma - 1.0))
    }

    /// Inverse of [`GasLaw::c_of_rho`].
    #[inline]
    pub fn rho_of_c(&self, c: f64) -> f64 {
        (c * c / (self.k0 * self.gamma)).powf(1.0 / (self.gamma - 1.0))
    }

    pub fn enthalpy(&self, rho: f64) -> Result<f64> {
        let c = self.sound_speed(rho)?;
        Ok(c * c / (self.gamma - 1.0))
    }

    /// e = k0 ρ^(γ−1)/(γ−1), so that ρe = p/(γ−1).
    pub fn internal_energy(&self, rho: f64) -> f64 {
        self.k0 * rho.powf(self.gamma - 1.0) / (self.gamma - 1.0)
    }

    pub fn to_invariants(&self, s: &PrimitiveState) -> Result<InvariantState> {
        let c = self.sound_speed(s.rho)?;
        let a = c / (self.gamma - 1.0);
        Ok(InvariantState { wbar: a + 0.5 * s.v1, w: a - 0.5 * s.v1, psi2: -s.v2 })
    }

    pub fn from_invariants(&self, inv: &InvariantState) -> Result<PrimitiveState> {
        let sum = inv.wbar + inv.w;
        if sum < 0.0 {
            return Err(Error::Vacuum(format!("wbar + w = {sum:e} < 0")));
        }
        let c = 0.5 * (self.gamma - 1.0) * sum;
        let rho = self.rho_of_c(c);
        let rho = if rho < VACUUM_RHO { 0.0 } else { rho };
        Ok(PrimitiveState { rho, v1: inv.wbar - inv.w, v2: -inv.psi2 })
    }

    /// Mechanical energy η and its flux q.
    pub fn entropy_pair(&self, s: &PrimitiveState) -> Result<(f64, [f64; 2])> {
        if !(s.rho > 0.0) {
            return Err(Error::Domain(format!("entropy pair needs rho > 0, got {}", s.rho)));
        }
        let kin = 0.5 * s.rho * (s.v1 * s.v1 + s.v2 * s.v2);
        let eta = kin + s.rho * self.internal_energy(s.rho);
        let h = eta + self.pressure(s.rho);
        Ok((eta, [h * s.v1, h * s.v2]))
    }

    /// η in conserved variables; no checks.
    #[inline]
    pub fn eta(&self, u: &ConservedState) -> f64 {
        0.5 * (u.p1 * u.p1 + u.p2 * u.p2) / u.rho + self.pressure(u.rho) / (self.gamma - 1.0)
    }

    /// q in conserved variables; no checks.
    #[inline]
    pub fn q(&self, u: &ConservedState) -> [f64; 2] {
        let h = 0.5 * (u.p1 * u.p1 + u.p2 * u.p2) / u.rho
            + self.gamma / (self.gamma - 1.0) * self.pressure(u.rho);
        [h * u.p1 / u.rho, h * u.p2 / u.rho]
    }

    /// ∂η/∂(ρ, P¹, P²).
    pub fn eta_gradient(&self, u: &ConservedState) -> [f64; 3] {
        let (v1, v2) = (u.p1 / u.rho, u.p2 / u.rho);
        let c2 = self.dpressure(u.rho);
        [c2 / (self.gamma - 1.0) - 0.5 * (v1 * v1 + v2 * v2), v1, v2]
    }

    /// ∂²η/∂(ρ, P)².
    pub fn eta_hessian(&self, u: &ConservedState) -> [[f64; 3]; 3] {
        let (v1, v2) = (u.p1 / u.rho, u.p2 / u.rho);
        let c2 = self.dpressure(u.rho);
        let r = 1.0 / u.rho;
        [
            [r * (v1 * v1 + v2 * v2 + c2), -r * v1, -r * v2],
            [-r * v1, r, 0.0],
            [-r * v2, 0.0, r],
        ]
    }

    /// Closed-form eigenvalues of [`GasLaw::eta_hessian`], ascending.
    pub fn eta_hessian_eigenvalues(&self, u: &ConservedState) -> [f64; 3] {
        let v2 = (u.p1 * u.p1 + u.p2 * u.p2) / (u.rho * u.rho);
        let c2 = self.dpressure(u.rho);
        // roots of λ² − (|v|²+c²+1)λ + c², times 1/ρ
        let disc = v2 * v2 + (c2 - 1.0).powi(2) + 2.0 * v2 * (c2 + 1.0);
        let s = v2 + c2 + 1.0;
        let lo = 2.0 * c2 / (s + disc.sqrt());
        let hi = 0.5 * (s + disc.sqrt());
        let mut ev = [lo / u.rho, 1.0 / u.rho, hi / u.rho];
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }

    /// Flux in direction `dir` (1 or 2).
    #[inline]
    pub fn flux(&self, u: &ConservedState, dir: usize) -> [f64; 3] {
        let p = self.pressure(u.rho);
        if dir == 1 {
            let v1 = u.p1 / u.rho;
            [u.p1, u.p1 * v1 + p, u.p2 * v1]
        } else {
            let v2 = u.p2 / u.rho;
            [u.p2, u.p1 * v2, u.p2 * v2 + p]
        }
    }

    /// ∂F^{dir}/∂(ρ, P¹, P²), rows = flux components.
    pub fn flux_jacobian(&self, u: &ConservedState, dir: usize) -> [[f64; 3]; 3] {
        let (v1, v2) = (u.p1 / u.rho, u.p2 / u.rho);
        let c2 = self.dpressure(u.rho);
        if dir == 1 {
            [[0.0, 1.0, 0.0], [c2 - v1 * v1, 2.0 * v1, 0.0], [-v1 * v2, v2, v1]]
        } else {
            [[0.0, 0.0, 1.0], [-v1 * v2, v2, v1], [c2 - v2 * v2, 0.0, 2.0 * v2]]
        }
    }
}

fn check_density(rho: f64) -> Result<()> {
    if rho < 0.0 || rho.is_nan() {
        Err(Error::Domain(format!("negative density {rho}")))
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrimitiveState {
    pub rho: f64,
    pub v1: f64,
    pub v2: f64,
}

impl PrimitiveState {
    pub fn new(rho: f64, v1: f64, v2: f64) -> Self {
        Self { rho, v1, v2 }
    }

    pub fn to_conserved(&self) -> ConservedState {
        ConservedState { rho: self.rho, p1: self.rho * self.v1, p2: self.rho * self.v2 }
    }

    /// Reflection x1 → −x1.
    pub fn mirrored(&self) -> Self {
        Self { rho: self.rho, v1: -self.v1, v2: self.v2 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedState {
    pub rho: f64,
    pub p1: f64,
    pub p2: f64,
}

impl ConservedState {
    pub fn new(rho: f64, p1: f64, p2: f64) -> Self {
        Self { rho, p1, p2 }
    }

    pub fn to_primitive(&self) -> PrimitiveState {
        if self.rho < VACUUM_RHO {
            return PrimitiveState { rho: self.rho, v1: 0.0, v2: 0.0 };
        }
        PrimitiveState { rho: self.rho, v1: self.p1 / self.rho, v2: self.p2 / self.rho }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.rho, self.p1, self.p2]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        Self { rho: a[0], p1: a[1], p2: a[2] }
    }
}

/// Riemann invariants (w̄, w) and ψ₂ = −v².
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct InvariantState {
    pub wbar: f64,
    pub w: f64,
    pub psi2: f64,
}

impl InvariantState {
    pub fn new(wbar: f64, w: f64, psi2: f64) -> Self {
        Self { wbar, w, psi2 }
    }

    /// ψ₁ = −v¹ = w − w̄.
    pub fn psi1(&self) -> f64 {
        self.w - self.wbar
    }

    pub fn sound_speed(&self, law: &GasLaw) -> f64 {
        0.5 * (law.gamma() - 1.0) * (self.wbar + self.w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn law() -> GasLaw {
        GasLaw::standard()
    }

    #[test]
    fn rejects_bad_constants() {
        assert!(GasLaw::new(1.0, 1.0).is_err());
        assert!(GasLaw::new(3.0, 1.0).is_err());
        assert!(GasLaw::new(1.4, 0.0).is_err());
        assert!(GasLaw::new(1.4, 2.0).is_ok());
    }

    #[test]
    fn sound_speed_examples() {
        assert_relative_eq!(law().sound_speed(1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(law().sound_speed(4.0).unwrap(), 2.0, epsilon = 1e-15);
        assert_eq!(law().sound_speed(0.0).unwrap(), 0.0);
        assert!(law().sound_speed(-1.0).is_err());
    }

    #[test]
    fn enthalpy_examples() {
        assert_relative_eq!(law().enthalpy(1.0).unwrap(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(law().enthalpy(4.0).unwrap(), 4.0, epsilon = 1e-15);
        assert_eq!(law().enthalpy(0.0).unwrap(), 0.0);
        assert!(law().enthalpy(-0.1).is_err());
    }

    #[test]
    fn invariants_example() {
        let inv = law().to_invariants(&PrimitiveState::new(1.0, 0.2, 0.0)).unwrap();
        assert_relative_eq!(inv.wbar, 1.1, epsilon = 1e-14);
        assert_relative_eq!(inv.w, 0.9, epsilon = 1e-14);
        assert_eq!(inv.psi2, 0.0);
        let rest = law().to_invariants(&PrimitiveState::new(1.0, 0.0, 0.0)).unwrap();
        assert_eq!(rest.wbar, rest.w);
        assert!(law().from_invariants(&InvariantState::new(-1.0, 0.5, 0.0)).is_err());
    }

    #[test]
    fn entropy_pair_examples() {
        let (eta, q) = law().entropy_pair(&PrimitiveState::new(1.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(eta, 0.5, epsilon = 1e-15);
        assert_eq!(q, [0.0, 0.0]);
        let (_, q) = law().entropy_pair(&PrimitiveState::new(3.0, 0.0, 0.0)).unwrap();
        assert_eq!(q, [0.0, 0.0]);
        assert!(law().entropy_pair(&PrimitiveState::new(0.0, 0.0, 0.0)).is_err());
    }

    /// ∂q^i/∂y^b − Σ_a ∂η/∂y^a ∂F^{ia}/∂y^b by central differences.
    fn compatibility_residual(law: &GasLaw, u: ConservedState) -> f64 {
        let h = 1e-5;
        let grad = law.eta_gradient(&u);
        let mut worst: f64 = 0.0;
        for dir in 1..=2 {
            let jac = law.flux_jacobian(&u, dir);
            for b in 0..3 {
                let mut up = u.as_array();
                let mut dn = u.as_array();
                up[b] += h;
                dn[b] -= h;
                let dq = (law.q(&ConservedState::from_array(up))[dir - 1]
                    - law.q(&ConservedState::from_array(dn))[dir - 1])
                    / (2.0 * h);
                let rhs: f64 = (0..3).map(|a| grad[a] * jac[a][b]).sum();
                worst = worst.max((dq - rhs).abs());
            }
        }
        worst
    }

    #[test]
    fn entropy_compatibility_example() {
        let u = PrimitiveState::new(1.0, 0.2, 0.1).to_conserved();
        assert!(compatibility_residual(&law(), u) < 1e-6);
    }

    #[test]
    fn eta_matches_entropy_pair() {
        let s = PrimitiveState::new(1.7, 0.3, -0.4);
        let l = GasLaw::new(1.4, 0.8).unwrap();
        let (eta, q) = l.entropy_pair(&s).unwrap();
        assert_relative_eq!(eta, l.eta(&s.to_conserved()), epsilon = 1e-13);
        let q2 = l.q(&s.to_conserved());
        assert_relative_eq!(q[0], q2[0], epsilon = 1e-13);
        assert_relative_eq!(q[1], q2[1], epsilon = 1e-13);
    }

    fn sym_eigenvalues(m: [[f64; 3]; 3]) -> [f64; 3] {
        // Jacobi sweeps; oracle independent of the closed form.
        let mut a = m;
        for _ in 0..100 {
            for (p, q) in [(0, 1), (0, 2), (1, 2)] {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let mut b = a;
                for k in 0..3 {
                    b[k][p] = c * a[k][p] - s * a[k][q];
                    b[k][q] = s * a[k][p] + c * a[k][q];
                }
                let mut d = b;
                for k in 0..3 {
                    d[p][k] = c * b[p][k] - s * b[q][k];
                    d[q][k] = s * b[p][k] + c * b[q][k];
                }
                a = d;
            }
        }
        let mut ev = [a[0][0], a[1][1], a[2][2]];
        ev.sort_by(|x, y| x.total_cmp(y));
        ev
    }

    proptest! {
        #[test]
        fn conversion_round_trips(rho in 0.1f64..10.0, v1 in -5.0f64..5.0, v2 in -5.0f64..5.0,
                                  gamma in 1.05f64..2.95, k0 in 0.1f64..3.0) {
            let law = GasLaw::new(gamma, k0).unwrap();
            let s = PrimitiveState::new(rho, v1, v2);
            let back = law.from_invariants(&law.to_invariants(&s).unwrap()).unwrap();
            prop_assert!((back.rho - rho).abs() <= 1e-12 * rho);
            prop_assert!((back.v1 - v1).abs() <= 1e-12 * (1.0 + v1.abs()));
            prop_assert!((back.v2 - v2).abs() <= 1e-12 * (1.0 + v2.abs()));
            let c = s.to_conserved().to_primitive();
            prop_assert!((c.v1 - v1).abs() <= 1e-12 * (1.0 + v1.abs()));
            prop_assert!((c.v2 - v2).abs() <= 1e-12 * (1.0 + v2.abs()));
        }

        #[test]
        fn sound_speed_monotone(a in 0.0f64..10.0, b in 0.0f64..10.0) {
            let l = law();
            if a < b { prop_assert!(l.c_of_rho(a) <= l.c_of_rho(b)); }
        }

        #[test]
        fn hessian_spd_with_closed_form_eigenvalues(rho in 0.1f64..10.0, v1 in -5.0f64..5.0,
                                                    v2 in -5.0f64..5.0, gamma in 1.05f64..2.95) {
            let law = GasLaw::new(gamma, 0.7).unwrap();
            let u = PrimitiveState::new(rho, v1, v2).to_conserved();
            let h = law.eta_hessian(&u);
            for i in 0..3 { for j in 0..3 { prop_assert_eq!(h[i][j], h[j][i]); } }
            let closed = law.eta_hessian_eigenvalues(&u);
            let jacobi = sym_eigenvalues(h);
            for k in 0..3 {
                prop_assert!(closed[k] > 0.0);
                prop_assert!((closed[k] - jacobi[k]).abs() <= 1e-10 * jacobi[2].max(1.0));
            }
        }

        #[test]
        fn entropy_compatibility_random(rho in 0.2f64..5.0, v1 in -2.0f64..2.0, v2 in -2.0f64..2.0) {
            let u = PrimitiveState::new(rho, v1, v2).to_conserved();
            prop_assert!(compatibility_residual(&law(), u) < 1e-6);
        }
    }
}
