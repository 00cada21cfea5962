//! Acoustical metric, null frames and null geodesics.
//!
//! Two views of a background flow are used:
//!
//! * Cartesian, `(t, x1, x2) ↦ (c, v, ∇c, ∇v, ∂ₜc, ∂ₜv)`, for frames and for tracing
//!   characteristics of simulated flows;
//! * acoustical, `(t, u, ϑ) ↦ (μ, c, ĝ⁻¹, Ξ̂)` with first partials, for the
//!   Hamiltonian `H = −p_t p_u + μ(−½c⁻²p_t² + ½ĝ⁻¹p_ϑ² + Ξ̂ p_t p_ϑ)` of the
//!   rescaled metric μ⁻¹g, whose null bicharacteristics rule the rarefaction fronts.
//!
//! In acoustical coordinates `g = −μ(dt⊗du + du⊗dt) + κ²du² + ĝ(dϑ + Ξ du)²`, μ = cκ, Ξ = μΞ̂.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas_model::GasLaw;
use crate::riemann1d::{WaveFan, WaveKind};
use crate::solver2d::Field2D;

// ---------------------------------------------------------------------------
// Cartesian backgrounds

/// Flow values and first derivatives at a spacetime point. `grad_v[i][j] = ∂_j v^i`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FlowSample {
    pub c: f64,
    pub v: [f64; 2],
    pub grad_c: [f64; 2],
    pub grad_v: [[f64; 2]; 2],
    pub dt_c: f64,
    pub dt_v: [f64; 2],
}

pub trait CartesianBackground: Sync {
    fn sample(&self, t: f64, x: [f64; 2]) -> Result<FlowSample>;
}

#[derive(Debug, Clone, Copy)]
pub struct ConstantFlow {
    pub c: f64,
    pub v: [f64; 2],
}

impl CartesianBackground for ConstantFlow {
    fn sample(&self, _t: f64, _x: [f64; 2]) -> Result<FlowSample> {
        if !(self.c > 0.0) {
            return Err(Error::Vacuum("constant background has c <= 0".into()));
        }
        Ok(FlowSample { c: self.c, v: self.v, ..Default::default() })
    }
}

/// The exact plane-symmetric Riemann solution, differentiated analytically inside the fans.
#[derive(Debug, Clone, Copy)]
pub struct FanFlow {
    pub fan: WaveFan,
}

impl CartesianBackground for FanFlow {
    fn sample(&self, t: f64, x: [f64; 2]) -> Result<FlowSample> {
        if !(t > 0.0) {
            return Err(Error::Domain("the centred fan is singular at t = 0".into()));
        }
        let law = self.fan.law;
        let g = law.gamma();
        let xi = x[0] / t;
        let p = self.fan.sample(xi);
        let c = law.c_of_rho(p.rho);
        if !(c > 0.0) {
            return Err(Error::Vacuum(format!("vacuum at ξ = {xi}")));
        }
        let (w1, w2) = (self.fan.wave1, self.fan.wave2);
        let dc = if w1.kind == WaveKind::BackRarefaction && xi > w1.left_speed && xi < w1.right_speed {
            -(g - 1.0) / (g + 1.0)
        } else if w2.kind == WaveKind::FrontRarefaction && xi > w2.left_speed && xi < w2.right_speed {
            (g - 1.0) / (g + 1.0)
        } else {
            0.0
        };
        let dv = if dc != 0.0 { 2.0 / (g + 1.0) } else { 0.0 };
        Ok(FlowSample {
            c,
            v: [p.v1, p.v2],
            grad_c: [dc / t, 0.0],
            grad_v: [[dv / t, 0.0], [0.0, 0.0]],
            dt_c: -xi * dc / t,
            dt_v: [-xi * dv / t, 0.0],
        })
    }
}

/// Catmull–Rom weights and their derivatives for fractional offset s ∈ [0, 1].
fn catmull_rom(s: f64) -> ([f64; 4], [f64; 4]) {
    let (s2, s3) = (s * s, s * s * s);
    (
        [
            0.5 * (-s3 + 2.0 * s2 - s),
            0.5 * (3.0 * s3 - 5.0 * s2 + 2.0),
            0.5 * (-3.0 * s3 + 4.0 * s2 + s),
            0.5 * (s3 - s2),
        ],
        [
            0.5 * (-3.0 * s2 + 4.0 * s - 1.0),
            0.5 * (9.0 * s2 - 10.0 * s),
            0.5 * (-9.0 * s2 + 8.0 * s + 1.0),
            0.5 * (3.0 * s2 - 2.0 * s),
        ],
    )
}

struct SampledSlice {
    t: f64,
    fields: [Vec<f64>; 3],
}

/// Solver output interpolated bicubically (Catmull–Rom) in space and linearly in time.
/// x2 is periodic; x1 is restricted to the cell-centre range.
pub struct SampledFlow {
    grid: crate::solver2d::Grid,
    slices: Vec<SampledSlice>,
}

impl SampledFlow {
    pub fn new(law: &GasLaw, history: &[Field2D]) -> Result<Self> {
        let first = history.first().ok_or_else(|| Error::Invalid("empty history".into()))?;
        let grid = first.grid;
        let mut slices = Vec::with_capacity(history.len());
        for f in history {
            if f.grid != grid {
                return Err(Error::Invalid("slices on different grids".into()));
            }
            let mut c = Vec::with_capacity(grid.len());
            let mut v1 = Vec::with_capacity(grid.len());
            let mut v2 = Vec::with_capacity(grid.len());
            for u in &f.cells {
                let p = u.to_primitive();
                c.push(law.c_of_rho(p.rho.max(0.0)));
                v1.push(p.v1);
                v2.push(p.v2);
            }
            slices.push(SampledSlice { t: f.t, fields: [c, v1, v2] });
        }
        if slices.windows(2).any(|w| w[1].t <= w[0].t) {
            return Err(Error::Invalid("slice times must increase".into()));
        }
        Ok(Self { grid, slices })
    }

    pub fn time_range(&self) -> (f64, f64) {
        (self.slices[0].t, self.slices.last().unwrap().t)
    }

    /// Value and spatial gradient of each field on one slice.
    fn spatial(&self, s: &SampledSlice, x: [f64; 2]) -> Result<[[f64; 3]; 3]> {
        let g = &self.grid;
        let fi = (x[0] + g.half_width) / g.dx1 - 0.5;
        if !(fi >= 1.0 && fi <= (g.nx1 - 2) as f64) {
            return Err(Error::Domain(format!("x1 = {} outside the interpolation range", x[0])));
        }
        let i = (fi.floor() as usize).min(g.nx1 - 3);
        let sx = fi - i as f64;
        let fj = x[1].rem_euclid(2.0 * std::f64::consts::PI) / g.dx2 - 0.5;
        let j0 = fj.floor();
        let sy = fj - j0;
        let (wx, dwx) = catmull_rom(sx);
        let (wy, dwy) = if g.nx2 == 1 { ([0.0, 1.0, 0.0, 0.0], [0.0; 4]) } else { catmull_rom(sy) };
        let n2 = g.nx2 as i64;
        let mut out = [[0.0; 3]; 3];
        for (k, f) in s.fields.iter().enumerate() {
            let (mut val, mut d1, mut d2) = (0.0, 0.0, 0.0);
            for b in 0..4 {
                let jj = ((j0 as i64 - 1 + b as i64).rem_euclid(n2)) as usize;
                for a in 0..4 {
                    let q = f[g.idx(i - 1 + a, jj)];
                    val += wx[a] * wy[b] * q;
                    d1 += dwx[a] * wy[b] * q;
                    d2 += wx[a] * dwy[b] * q;
                }
            }
            out[k] = [val, d1 / g.dx1, d2 / g.dx2];
        }
        Ok(out)
    }
}

impl CartesianBackground for SampledFlow {
    fn sample(&self, t: f64, x: [f64; 2]) -> Result<FlowSample> {
        let (t0, t1) = self.time_range();
        if !(t >= t0 && t <= t1) {
            return Err(Error::Domain(format!("t = {t} outside [{t0}, {t1}]")));
        }
        let k = self.slices.partition_point(|s| s.t <= t).clamp(1, self.slices.len() - 1);
        let (a, b) = (&self.slices[k - 1], &self.slices[k]);
        let lam = (t - a.t) / (b.t - a.t);
        let (fa, fb) = (self.spatial(a, x)?, self.spatial(b, x)?);
        let mix = |q: usize, d: usize| (1.0 - lam) * fa[q][d] + lam * fb[q][d];
        let rate = |q: usize| (fb[q][0] - fa[q][0]) / (b.t - a.t);
        let c = mix(0, 0);
        if !(c > 0.0) {
            return Err(Error::Vacuum(format!("interpolated c = {c}")));
        }
        Ok(FlowSample {
            c,
            v: [mix(1, 0), mix(2, 0)],
            grad_c: [mix(0, 1), mix(0, 2)],
            grad_v: [[mix(1, 1), mix(1, 2)], [mix(2, 1), mix(2, 2)]],
            dt_c: rate(0),
            dt_v: [rate(1), rate(2)],
        })
    }
}

// ---------------------------------------------------------------------------
// Frames

/// g(a, b) for the acoustical metric −c²dt² + Σ(dxⁱ − vⁱdt)², vectors as (t, x1, x2) components.
pub fn metric(c: f64, v: [f64; 2], a: [f64; 3], b: [f64; 3]) -> f64 {
    -c * c * a[0] * b[0] + (a[1] - v[0] * a[0]) * (b[1] - v[0] * b[0]) + (a[2] - v[1] * a[0]) * (b[2] - v[1] * b[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NullFrame {
    /// L = ∂ₜ + v − cT̂ as (t, x1, x2) components.
    pub l: [f64; 3],
    pub t_hat: [f64; 2],
    pub x_hat: [f64; 2],
    pub kappa: f64,
    pub mu: f64,
    pub c: f64,
    pub v: [f64; 2],
}

impl NullFrame {
    /// T = κT̂.
    pub fn t_vec(&self) -> [f64; 3] {
        [0.0, self.kappa * self.t_hat[0], self.kappa * self.t_hat[1]]
    }

    /// L̄ = c⁻¹κL + 2T.
    pub fn lbar(&self) -> [f64; 3] {
        let t = self.t_vec();
        let s = self.kappa / self.c;
        [s * self.l[0] + 2.0 * t[0], s * self.l[1] + 2.0 * t[1], s * self.l[2] + 2.0 * t[2]]
    }

    /// Residuals of g(L,L)=0, g(X̂,X̂)=1, g(L,T)=−μ, g(T̂,X̂)=0, g(L,X̂)=0, g(L̄,L̄)=0, g(L,L̄)=−2μ.
    pub fn residuals(&self) -> [f64; 7] {
        let g = |a: [f64; 3], b: [f64; 3]| metric(self.c, self.v, a, b);
        let xh = [0.0, self.x_hat[0], self.x_hat[1]];
        let th = [0.0, self.t_hat[0], self.t_hat[1]];
        let lb = self.lbar();
        [
            g(self.l, self.l),
            g(xh, xh) - 1.0,
            g(self.l, self.t_vec()) + self.mu,
            g(th, xh),
            g(self.l, xh),
            g(lb, lb),
            g(self.l, lb) + 2.0 * self.mu,
        ]
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals().iter().fold(0.0, |a, r| a.max(r.abs()))
    }
}

/// X̂ = (T̂², −T̂¹), the orientation for which T̂ = (−1, 0) gives X̂ = ∂/∂x2.
pub fn x_hat_of(t_hat: [f64; 2]) -> [f64; 2] {
    [t_hat[1], -t_hat[0]]
}

/// Frame at a point with T̂ along `normal_hint` and inverse density `kappa`.
pub fn frame_at(bg: &dyn CartesianBackground, t: f64, x: [f64; 2], normal_hint: [f64; 2], kappa: f64) -> Result<NullFrame> {
    let n = normal_hint[0].hypot(normal_hint[1]);
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::Invalid("normal hint must be a nonzero vector".into()));
    }
    if !(kappa > 0.0) {
        return Err(Error::Invalid(format!("kappa must be positive, got {kappa}")));
    }
    let s = bg.sample(t, x)?;
    if !(s.c > 0.0) {
        return Err(Error::Vacuum(format!("c = {} at ({t}, {:?})", s.c, x)));
    }
    let th = [normal_hint[0] / n, normal_hint[1] / n];
    Ok(NullFrame {
        l: [1.0, s.v[0] - s.c * th[0], s.v[1] - s.c * th[1]],
        t_hat: th,
        x_hat: x_hat_of(th),
        kappa,
        mu: s.c * kappa,
        c: s.c,
        v: s.v,
    })
}

// ---------------------------------------------------------------------------
// Acoustical backgrounds and the Hamiltonian flow

/// μ, c, ĝ⁻¹, Ξ̂ and their (t, u, ϑ) partials.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AcousticalSample {
    pub mu: f64,
    pub c: f64,
    pub ginv: f64,
    pub xi_hat: f64,
    pub d_mu: [f64; 3],
    pub d_c: [f64; 3],
    pub d_ginv: [f64; 3],
    pub d_xi_hat: [f64; 3],
}

pub trait AcousticalBackground: Sync {
    fn sample(&self, t: f64, u: f64, theta: f64) -> Result<AcousticalSample>;
}

/// Constant state in coordinates with κ ≡ 1 (u = x1-distance, ϑ = x2).
#[derive(Debug, Clone, Copy)]
pub struct ConstantAcoustical {
    pub c: f64,
}

impl AcousticalBackground for ConstantAcoustical {
    fn sample(&self, _t: f64, _u: f64, _theta: f64) -> Result<AcousticalSample> {
        Ok(AcousticalSample { mu: self.c, c: self.c, ginv: 1.0, ..Default::default() })
    }
}

/// A plane-symmetric front fan in its own acoustical coordinates: u = k − x1/t,
/// ϑ = x2, κ = t, ĝ = 1, Ξ̂ = 0 and c(u) = c_r − slope·u.
/// `slope = (γ−1)/(γ+1)` is the rarefaction fan; `slope = 0` is a constant state
/// foliated by rays through the origin.
#[derive(Debug, Clone, Copy)]
pub struct FanAcoustical {
    pub c_r: f64,
    pub k: f64,
    pub slope: f64,
}

impl FanAcoustical {
    /// Front fan attached to a right state (v¹_r, c_r).
    pub fn front_fan(law: &GasLaw, v1_r: f64, c_r: f64) -> Self {
        let g = law.gamma();
        Self { c_r, k: v1_r + c_r, slope: (g - 1.0) / (g + 1.0) }
    }

    pub fn centred_constant(v1: f64, c: f64) -> Self {
        Self { c_r: c, k: v1 + c, slope: 0.0 }
    }

    pub fn to_cartesian(&self, t: f64, u: f64, theta: f64) -> [f64; 2] {
        [t * (self.k - u), theta]
    }
}

impl AcousticalBackground for FanAcoustical {
    fn sample(&self, t: f64, u: f64, _theta: f64) -> Result<AcousticalSample> {
        let c = self.c_r - self.slope * u;
        if !(c > 0.0) {
            return Err(Error::Vacuum(format!("fan reaches vacuum at u = {u}")));
        }
        Ok(AcousticalSample {
            mu: t * c,
            c,
            ginv: 1.0,
            xi_hat: 0.0,
            d_mu: [c, -t * self.slope, 0.0],
            d_c: [0.0, -self.slope, 0.0],
            ..Default::default()
        })
    }
}

/// A synthetic degenerate background with μ = t·c(u, ϑ), nontrivial ĝ and Ξ̂.
/// Used to exercise the full canonical system; `amp` scales the departures from the flat case.
#[derive(Debug, Clone, Copy)]
pub struct SyntheticDegenerate {
    pub amp: f64,
}

impl AcousticalBackground for SyntheticDegenerate {
    fn sample(&self, t: f64, u: f64, theta: f64) -> Result<AcousticalSample> {
        let a = self.amp;
        let (s, co) = theta.sin_cos();
        let c = 1.0 + a * (0.2 * s - 0.1 * u);
        let dc = [0.0, -0.1 * a, 0.2 * a * co];
        let gg = 1.0 + a * (0.2 * co + 0.1 * u + 0.3 * t);
        let dgg = [0.3 * a, 0.1 * a, -0.2 * a * s];
        let ginv = 1.0 / gg;
        let d_ginv = dgg.map(|d| -d * ginv * ginv);
        let xi_hat = a * (0.3 * s + 0.2 * u + 0.1 * t);
        if !(c > 0.0 && gg > 0.0) {
            return Err(Error::Domain("synthetic background degenerate here".into()));
        }
        Ok(AcousticalSample {
            mu: t * c,
            c,
            ginv,
            xi_hat,
            d_mu: [c, t * dc[1], t * dc[2]],
            d_c: dc,
            d_ginv,
            d_xi_hat: [0.1 * a, 0.2 * a, 0.3 * a * co],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct CotangentPoint {
    pub t: f64,
    pub u: f64,
    pub theta: f64,
    pub p_t: f64,
    pub p_u: f64,
    pub p_theta: f64,
}

impl CotangentPoint {
    pub fn to_array(&self) -> [f64; 6] {
        [self.t, self.u, self.theta, self.p_t, self.p_u, self.p_theta]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self { t: a[0], u: a[1], theta: a[2], p_t: a[3], p_u: a[4], p_theta: a[5] }
    }
}

fn quad_part(s: &AcousticalSample, p: &CotangentPoint) -> f64 {
    -0.5 * p.p_t * p.p_t / (s.c * s.c) + 0.5 * s.ginv * p.p_theta * p.p_theta + s.xi_hat * p.p_t * p.p_theta
}

pub fn hamiltonian(bg: &dyn AcousticalBackground, p: &CotangentPoint) -> Result<f64> {
    let s = bg.sample(p.t, p.u, p.theta)?;
    Ok(-p.p_t * p.p_u + s.mu * quad_part(&s, p))
}

/// Canonical equations of H: (ṫ, u̇, ϑ̇, ṗ_t, ṗ_u, ṗ_ϑ).
pub fn geodesic_rhs(bg: &dyn AcousticalBackground, p: &CotangentPoint) -> Result<[f64; 6]> {
    let s = bg.sample(p.t, p.u, p.theta)?;
    let q = quad_part(&s, p);
    let c3 = s.c * s.c * s.c;
    let dp = |k: usize| {
        -(s.d_mu[k] * q
            + s.mu
                * (s.d_c[k] * p.p_t * p.p_t / c3 + 0.5 * s.d_ginv[k] * p.p_theta * p.p_theta + s.d_xi_hat[k] * p.p_t * p.p_theta))
    };
    Ok([
        -p.p_u + s.mu * (-p.p_t / (s.c * s.c) + s.xi_hat * p.p_theta),
        -p.p_t,
        s.mu * (s.ginv * p.p_theta + s.xi_hat * p.p_t),
        dp(0),
        dp(1),
        dp(2),
    ])
}

/// (μ⁻¹g)(γ̇, γ̇) for a tangent vector (ṫ, u̇, ϑ̇); zero along null geodesics (needs μ > 0).
pub fn rescaled_norm(s: &AcousticalSample, tdot: f64, udot: f64, thdot: f64) -> f64 {
    let w = thdot + s.mu * s.xi_hat * udot;
    -2.0 * tdot * udot + s.mu / (s.c * s.c) * udot * udot + w * w / (s.ginv * s.mu)
}

// ---------------------------------------------------------------------------
// Adaptive Dormand–Prince 5(4)

const DP_A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand–Prince step: (5th-order solution, error estimate).
pub(crate) fn dp_step<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    s: f64,
    y: &[f64; N],
    h: f64,
) -> Result<([f64; N], [f64; N])> {
    let mut k = [[0.0; N]; 7];
    k[0] = f(s, y)?;
    for st in 1..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(st) {
            let a = DP_A[st - 1][j];
            if a != 0.0 {
                for n in 0..N {
                    yi[n] += h * a * kj[n];
                }
            }
        }
        if st == 6 {
            // FSAL: stage 7 is evaluated at the new solution
            k[6] = f(s + h, &yi)?;
            let mut err = [0.0; N];
            for n in 0..N {
                err[n] = h * (0..7).map(|j| DP_E[j] * k[j][n]).sum::<f64>();
            }
            return Ok((yi, err));
        }
        k[st] = f(s + DP_C[st] * h, &yi)?;
    }
    unreachable!()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrationStatus {
    /// The target time was reached exactly.
    Reached,
    /// The parameter budget ran out before the target (e.g. a ray confined to t = 0).
    ParameterLimit,
    /// The background could not be evaluated further along the curve.
    DomainExit,
    StepUnderflow,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationOptions {
    pub tol: f64,
    /// Initial step.
    pub h0: f64,
    pub h_min: f64,
    /// Largest parameter value before giving up.
    pub param_max: f64,
    pub max_steps: usize,
}

impl Default for IntegrationOptions {
    fn default() -> Self {
        Self { tol: 1e-9, h0: 1e-3, h_min: 1e-14, param_max: 100.0, max_steps: 200_000 }
    }
}

/// Adaptive integration from parameter `s0` until component `stop.0` reaches `stop.1`
/// (assumed to increase), the parameter exceeds `param_max`, or evaluation fails.
/// The last point lands exactly on the stopping value.
pub(crate) fn integrate<const N: usize>(
    f: &dyn Fn(f64, &[f64; N]) -> Result<[f64; N]>,
    s0: f64,
    y0: [f64; N],
    stop: (usize, f64),
    opts: &IntegrationOptions,
) -> (Vec<(f64, [f64; N])>, IntegrationStatus, Option<String>) {
    let mut out = vec![(s0, y0)];
    let (comp, target) = stop;
    let (mut s, mut y) = (s0, y0);
    let mut h = opts.h0;
    if y[comp] >= target {
        return (out, IntegrationStatus::Reached, None);
    }
    for _ in 0..opts.max_steps {
        if s >= opts.param_max {
            return (out, IntegrationStatus::ParameterLimit, None);
        }
        h = h.min(opts.param_max - s).max(0.0);
        if h < opts.h_min {
            return (out, IntegrationStatus::StepUnderflow, Some(Error::StepUnderflow { tau: s, h }.to_string()));
        }
        let (yn, err) = match dp_step(f, s, &y, h) {
            Ok(r) => r,
            Err(e) => {
                // shrink first; the failure may just be an overshoot out of the domain
                if h > 1e3 * opts.h_min {
                    h *= 0.25;
                    continue;
                }
                return (out, IntegrationStatus::DomainExit, Some(e.to_string()));
            }
        };
        let mut en = 0.0f64;
        for n in 0..N {
            let sc = opts.tol * (1.0 + y[n].abs().max(yn[n].abs()));
            en = en.max(err[n].abs() / sc);
        }
        if !en.is_finite() {
            h *= 0.25;
            continue;
        }
        if en > 1.0 {
            h *= (0.9 * en.powf(-0.2)).max(0.2);
            continue;
        }
        if yn[comp] >= target {
            // secant on the step length so the stopping component lands on target
            let (mut lo, mut hi) = (0.0, h);
            let (mut flo, mut fhi) = (y[comp] - target, yn[comp] - target);
            let mut best = yn;
            let mut hb = h;
            for _ in 0..60 {
                let hm = if (fhi - flo).abs() > 0.0 { lo - flo * (hi - lo) / (fhi - flo) } else { 0.5 * (lo + hi) };
                let hm = if hm <= lo || hm >= hi { 0.5 * (lo + hi) } else { hm };
                let ym = match dp_step(f, s, &y, hm) {
                    Ok(r) => r.0,
                    Err(_) => break,
                };
                let fm = ym[comp] - target;
                best = ym;
                hb = hm;
                if fm.abs() <= 1e-15 * (1.0 + target.abs()) {
                    break;
                }
                if fm < 0.0 {
                    lo = hm;
                    flo = fm;
                } else {
                    hi = hm;
                    fhi = fm;
                }
            }
            best[comp] = target;
            out.push((s + hb, best));
            return (out, IntegrationStatus::Reached, None);
        }
        s += h;
        y = yn;
        out.push((s, y));
        h *= (0.9 * en.max(1e-10).powf(-0.2)).min(5.0);
    }
    (out, IntegrationStatus::StepUnderflow, Some("step budget exhausted".into()))
}

// ---------------------------------------------------------------------------
// Geodesics and fronts

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Trajectory {
    pub taus: Vec<f64>,
    pub points: Vec<CotangentPoint>,
    pub hamiltonian: Vec<f64>,
    pub status: IntegrationStatus,
    pub message: Option<String>,
}

impl Trajectory {
    pub fn last(&self) -> &CotangentPoint {
        self.points.last().unwrap()
    }

    /// max |H(τ) − H(τ₀)|.
    pub fn hamiltonian_drift(&self) -> f64 {
        let h0 = self.hamiltonian[0];
        self.hamiltonian.iter().fold(0.0, |a, h| a.max((h - h0).abs()))
    }

    /// CSV with columns tau,t,u,theta,p_t,p_u,p_theta,H.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("tau,t,u,theta,p_t,p_u,p_theta,H\n");
        for ((tau, p), h) in self.taus.iter().zip(&self.points).zip(&self.hamiltonian) {
            let _ = writeln!(s, "{},{},{},{},{},{},{},{}", tau, p.t, p.u, p.theta, p.p_t, p.p_u, p.p_theta, h);
        }
        s
    }
}

/// Integrate the canonical system from `start` (at parameter `tau0`) until t = t_end.
pub fn integrate_geodesic(
    bg: &dyn AcousticalBackground,
    start: CotangentPoint,
    tau0: f64,
    t_end: f64,
    opts: &IntegrationOptions,
) -> Result<Trajectory> {
    if !(opts.tol > 0.0) {
        return Err(Error::Invalid("tolerance must be positive".into()));
    }
    let f = |_s: f64, y: &[f64; 6]| geodesic_rhs(bg, &CotangentPoint::from_array(*y));
    let (pts, status, message) = integrate(&f, tau0, start.to_array(), (0, t_end), opts);
    let mut taus = Vec::with_capacity(pts.len());
    let mut points = Vec::with_capacity(pts.len());
    let mut ham = Vec::with_capacity(pts.len());
    for (tau, y) in pts {
        let p = CotangentPoint::from_array(y);
        ham.push(hamiltonian(bg, &p).unwrap_or(f64::NAN));
        taus.push(tau);
        points.push(p);
    }
    Ok(Trajectory { taus, points, hamiltonian: ham, status, message })
}

/// Launch parameter for rays leaving the singular boundary.
pub const TAU0: f64 = 1e-6;

/// Second-order expansion of the geodesic through (0, u₀, ϑ₀; 0, −1, p_ϑ) on a background
/// with μ = 0 at t = 0, evaluated at τ:
/// t = τ + ½∂ₜμ Ξ̂ p_ϑ τ², u = u₀ + ¼∂ₜμ ĝ⁻¹ p_ϑ² τ², ϑ = ϑ₀ + ½∂ₜμ ĝ⁻¹ p_ϑ τ², p_t = −½∂ₜμ ĝ⁻¹ p_ϑ² τ.
pub fn outgoing_expansion(bg: &dyn AcousticalBackground, u0: f64, theta0: f64, p_theta: f64, tau: f64) -> Result<CotangentPoint> {
    let s = bg.sample(0.0, u0, theta0)?;
    let a = s.d_mu[0];
    Ok(CotangentPoint {
        t: tau + 0.5 * a * s.xi_hat * p_theta * tau * tau,
        u: u0 + 0.25 * a * s.ginv * p_theta * p_theta * tau * tau,
        theta: theta0 + 0.5 * a * s.ginv * p_theta * tau * tau,
        p_t: -0.5 * a * s.ginv * p_theta * p_theta * tau,
        p_u: -1.0,
        p_theta,
    })
}

/// A periodic graph u = f(ϑ) in the singular boundary, stored as a trigonometric polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrontGraph {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl FrontGraph {
    pub fn constant(u0: f64) -> Self {
        Self { a0: u0, a: vec![], b: vec![] }
    }

    /// Interpolate samples on the uniform grid ϑ_j = 2πj/n.
    pub fn from_samples(samples: &[f64]) -> Self {
        let f = crate::spectral::Fourier::from_samples(samples);
        Self { a0: f.a[0], a: f.a[1..].to_vec(), b: f.b[1..].to_vec() }
    }

    fn eval_k(&self, th: f64, k: usize) -> f64 {
        let mut s = if k == 0 { self.a0 } else { 0.0 };
        for (i, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let m = (i + 1) as f64;
            let (sn, cs) = (m * th).sin_cos();
            s += match k {
                0 => a * cs + b * sn,
                1 => m * (-a * sn + b * cs),
                _ => -m * m * (a * cs + b * sn),
            };
        }
        s
    }

    pub fn f(&self, theta: f64) -> f64 {
        self.eval_k(theta, 0)
    }

    pub fn df(&self, theta: f64) -> f64 {
        self.eval_k(theta, 1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontRay {
    pub alpha: f64,
    pub trajectory: Trajectory,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontSurface {
    pub rays: Vec<FrontRay>,
}

impl FrontSurface {
    pub fn all_reached(&self) -> bool {
        self.rays.iter().all(|r| r.trajectory.status == IntegrationStatus::Reached)
    }

    /// CSV with columns alpha,tau,t,u,theta,p_t,p_u,p_theta,H.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("alpha,tau,t,u,theta,p_t,p_u,p_theta,H\n");
        for r in &self.rays {
            for line in r.trajectory.to_csv().lines().skip(1) {
                let _ = writeln!(s, "{},{}", r.alpha, line);
            }
        }
        s
    }
}

/// Rays from the graph Γ_f ⊂ S_*: data (0, f(α), α; 0, −1, f′(α)), launched at τ₀
/// by the outgoing expansion when μ vanishes at t = 0.
pub fn trace_front(
    bg: &dyn AcousticalBackground,
    graph: &FrontGraph,
    n_rays: usize,
    t_end: f64,
    opts: &IntegrationOptions,
) -> Result<FrontSurface> {
    if n_rays < 8 {
        return Err(Error::Invalid(format!("need at least 8 rays, got {n_rays}")));
    }
    let rays = (0..n_rays)
        .into_par_iter()
        .map(|i| {
            let alpha = 2.0 * std::f64::consts::PI * i as f64 / n_rays as f64;
            let (u0, pth) = (graph.f(alpha), graph.df(alpha));
            let s0 = bg.sample(0.0, u0, alpha)?;
            let (start, tau0) = if s0.mu.abs() < 1e-14 {
                (outgoing_expansion(bg, u0, alpha, pth, TAU0)?, TAU0)
            } else {
                (CotangentPoint { t: 0.0, u: u0, theta: alpha, p_t: 0.0, p_u: -1.0, p_theta: pth }, 0.0)
            };
            let trajectory = integrate_geodesic(bg, start, tau0, t_end, opts)?;
            Ok(FrontRay { alpha, trajectory })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrontSurface { rays })
}

// ---------------------------------------------------------------------------
// Characteristics of Cartesian backgrounds

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub t: f64,
    pub x: [f64; 2],
    pub t_hat: [f64; 2],
    pub kappa: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CharacteristicPath {
    pub points: Vec<PathPoint>,
    /// The background could not be evaluated up to t_end.
    pub truncated: bool,
}

/// Right-hand side of the transport system along L:
/// ẋ = v − cT̂, T̂˙ = (T̂ʲX̂(ψ_j) + X̂(c))X̂, κ̇ = κ(T̂ᵀ∇v T̂ − T̂·∇c).
/// The κ equation is Lκ = m′ + e′κ with L(ψ_i) eliminated through the Euler equations.
pub fn transport_rhs(s: &FlowSample, t_hat: [f64; 2], kappa: f64) -> ([f64; 2], [f64; 2], f64) {
    let xh = x_hat_of(t_hat);
    let dir = |a: [f64; 2], b: [f64; 2]| a[0] * b[0] + a[1] * b[1];
    // X̂(v^j) and X̂(c)
    let xv = [dir(s.grad_v[0], xh), dir(s.grad_v[1], xh)];
    let rot = -dir(t_hat, xv) + dir(s.grad_c, xh);
    let tv = [dir(s.grad_v[0], t_hat), dir(s.grad_v[1], t_hat)];
    let dk = kappa * (dir(t_hat, tv) - dir(t_hat, s.grad_c));
    (
        [s.v[0] - s.c * t_hat[0], s.v[1] - s.c * t_hat[1]],
        [rot * xh[0], rot * xh[1]],
        dk,
    )
}

/// Integrate an L-characteristic from (t_start, x_start) with initial T̂ and κ.
pub fn characteristic_trace_cartesian(
    bg: &dyn CartesianBackground,
    x_start: [f64; 2],
    t_start: f64,
    t_end: f64,
    t_hat0: [f64; 2],
    kappa0: f64,
    opts: &IntegrationOptions,
) -> Result<CharacteristicPath> {
    if !(t_end > t_start) {
        return Err(Error::Invalid("t_end must exceed t_start".into()));
    }
    // trial stages past t_end see the background frozen at t_end; the landing step stays inside
    let f = |_s: f64, y: &[f64; 6]| -> Result<[f64; 6]> {
        let s = bg.sample(y[0].min(t_end), [y[1], y[2]])?;
        let (dx, dth, dk) = transport_rhs(&s, [y[3], y[4]], y[5]);
        Ok([1.0, dx[0], dx[1], dth[0], dth[1], dk])
    };
    // integrate in t: the first component is t itself, so the stop lands on t_end
    let y0 = [t_start, x_start[0], x_start[1], t_hat0[0], t_hat0[1], kappa0];
    let mut o = *opts;
    o.param_max = t_end - t_start + 1.0;
    let (pts, status, _) = integrate(&f, 0.0, y0, (0, t_end), &o);
    let points = pts
        .into_iter()
        .map(|(_, y)| PathPoint { t: y[0], x: [y[1], y[2]], t_hat: [y[3], y[4]], kappa: y[5] })
        .collect();
    Ok(CharacteristicPath { points, truncated: status != IntegrationStatus::Reached })
}
