//! Singular rarefaction data on the slice t = δ.
//!
//! The right solution near C₀ is a Cauchy–Kovalevskaya jet in (t, x1, x2) about
//! each point (0, 0, ϑ_j) of the initial discontinuity; the generator of C₀ is a
//! Picard series in t. On Σ_δ the chart (u, ϑ) comes from the T-lines of the
//! initial foliation. The data are u-polynomials of the Riemann invariants whose
//! coefficients make the left solution match L^n U_r on S_{δ,0}; the left solution
//! is itself a CK jet of the frame form of the Euler equations in (t − δ, u).

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::acoustic_geometry::FrontGraph;
use crate::error::{Error, Result};
use crate::gas_model::{GasLaw, InvariantState, PrimitiveState};
use crate::jets::{factorial, Basis, Jet};
use crate::solver2d::Perturbation;
use crate::spectral::{self, Fourier};

pub const DEFAULT_C0: f64 = 0.5;
pub const MAX_ORDER: usize = 4;
/// Default right-jet degree in (t, x1, x2).
pub const RIGHT_DEGREE: usize = 16;
/// Ansatz ratios above this count as failures.
pub const ANSATZ_CONSTANT: f64 = 100.0;
const KAPPA_MIN: f64 = 1e-12;

/// u* = c₀·(γ+1)/(γ−1)·c̊_r.
pub fn u_star(law: &GasLaw, c_r: f64, c0: f64) -> f64 {
    let g = law.gamma();
    c0 * (g + 1.0) / (g - 1.0) * c_r
}

// ---------------------------------------------------------------------------
// Diagonalisation

/// Matrix whose entries are affine in T̂: `e[0] + e[1]·T̂¹ + e[2]·T̂²`.
type Affine3 = [[[f64; 3]; 3]; 3];

const Z3: [f64; 3] = [0.0; 3];

/// (w̄, w, ψ₂) = P (U⁽⁰⁾, U⁽⁻¹⁾, U⁽⁻²⁾).
const P: Affine3 = [
    [[0.5, -0.5, 0.0], [0.0, 0.0, 0.5], [0.5, 0.5, 0.0]],
    [[0.5, 0.5, 0.0], [0.0, 0.0, -0.5], [0.5, -0.5, 0.0]],
    [[0.0, 0.0, 1.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]],
];
const P_INV: Affine3 = [
    [[0.5, -0.5, 0.0], [0.5, 0.5, 0.0], [0.0, 0.0, 0.5]],
    [[0.0, 0.0, 1.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]],
    [[0.5, 0.5, 0.0], [0.5, -0.5, 0.0], [0.0, 0.0, -0.5]],
];
/// Coefficient of c·T̂·∇ in L(w̄, w, ψ₂).
const A_T: Affine3 = [
    [[-1.0, -1.0, 0.0], Z3, [0.0, 0.0, 0.5]],
    [Z3, [-1.0, 1.0, 0.0], [0.0, 0.0, 0.5]],
    [[0.0, 0.0, 1.0], [0.0, 0.0, 1.0], [-1.0, 0.0, 0.0]],
];
/// Coefficient of c·X̂·∇, written in T̂ through X̂ = (T̂², −T̂¹).
const B_X: Affine3 = [
    [[0.0, 0.0, -1.0], Z3, [0.0, -0.5, 0.0]],
    [Z3, [0.0, 0.0, 1.0], [0.0, -0.5, 0.0]],
    [[0.0, -1.0, 0.0], [0.0, -1.0, 0.0], Z3],
];

/// Eigenvalues of P⁻¹AP, in the order of the U components.
pub const LAMBDA: [f64; 3] = [0.0, -1.0, -2.0];

fn eval_affine(m: &Affine3, th: [f64; 2]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let e = m[i][j];
            out[i][j] = e[0] + e[1] * th[0] + e[2] * th[1];
        }
    }
    out
}

pub fn p_matrix(th: [f64; 2]) -> [[f64; 3]; 3] {
    eval_affine(&P, th)
}
pub fn p_inverse(th: [f64; 2]) -> [[f64; 3]; 3] {
    eval_affine(&P_INV, th)
}
pub fn a_matrix(th: [f64; 2]) -> [[f64; 3]; 3] {
    eval_affine(&A_T, th)
}
pub fn b_matrix(th: [f64; 2]) -> [[f64; 3]; 3] {
    eval_affine(&B_X, th)
}

fn apply_affine(m: &Affine3, th: &[Jet; 2], v: &[Jet; 3]) -> [Jet; 3] {
    std::array::from_fn(|i| {
        let mut acc: [Jet; 3] = std::array::from_fn(|_| Jet::zeros(&v[0].basis, v[0].width));
        for (j, vj) in v.iter().enumerate() {
            for q in 0..3 {
                let e = m[i][j][q];
                if e != 0.0 {
                    acc[q] = &acc[q] + &vj.scale(e);
                }
            }
        }
        &(&acc[0] + &acc[1].mul(&th[0])) + &acc[2].mul(&th[1])
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagonalState {
    pub u0: f64,
    pub um1: f64,
    pub um2: f64,
}

impl DiagonalState {
    pub fn as_array(&self) -> [f64; 3] {
        [self.u0, self.um1, self.um2]
    }
}

fn check_unit(th: [f64; 2]) -> Result<()> {
    let n = th[0].hypot(th[1]);
    if !((n - 1.0).abs() <= 1e-10) {
        return Err(Error::Domain(format!("T̂ = ({}, {}) is not a unit vector", th[0], th[1])));
    }
    Ok(())
}

fn matvec(m: &[[f64; 3]; 3], x: [f64; 3]) -> [f64; 3] {
    std::array::from_fn(|i| m[i][0] * x[0] + m[i][1] * x[1] + m[i][2] * x[2])
}

pub fn diagonalize(inv: &InvariantState, th: [f64; 2]) -> Result<DiagonalState> {
    check_unit(th)?;
    let u = matvec(&p_inverse(th), [inv.wbar, inv.w, inv.psi2]);
    Ok(DiagonalState { u0: u[0], um1: u[1], um2: u[2] })
}

pub fn undiagonalize(d: &DiagonalState, th: [f64; 2]) -> Result<InvariantState> {
    check_unit(th)?;
    let v = matvec(&p_matrix(th), d.as_array());
    Ok(InvariantState::new(v[0], v[1], v[2]))
}

// ---------------------------------------------------------------------------
// Traces on the initial discontinuity

/// Riemann invariants of one side's data on x1 = 0, on the uniform ϑ grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub theta: Vec<f64>,
    pub wbar: Vec<f64>,
    pub w: Vec<f64>,
    pub psi2: Vec<f64>,
}

impl Trace {
    pub fn of_side(law: &GasLaw, base: &PrimitiveState, pert: &Perturbation, right_side: bool, n: usize) -> Result<Self> {
        let theta = spectral::grid(n);
        let c0 = law.c_of_rho(base.rho);
        let g1 = law.gamma() - 1.0;
        let (mut wbar, mut w, mut psi2) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for (j, &th) in theta.iter().enumerate() {
            let c = c0 + pert.sound(right_side, 0.0, th);
            if !(c > 0.0) {
                return Err(Error::Vacuum(format!("perturbed sound speed {c} at ϑ = {th}")));
            }
            let v1 = base.v1 - pert.potential_derivative(0.0, th, 1, 0);
            let v2 = base.v2 - pert.potential_derivative(0.0, th, 0, 1);
            wbar[j] = c / g1 + 0.5 * v1;
            w[j] = c / g1 - 0.5 * v1;
            psi2[j] = -v2;
        }
        Ok(Self { theta, wbar, w, psi2 })
    }

    pub fn at(&self, theta: f64) -> InvariantState {
        let f = |s: &[f64]| Fourier::from_samples(s).eval(theta, 0);
        InvariantState::new(f(&self.wbar), f(&self.w), f(&self.psi2))
    }
}

/// Limit of the data at the singularity: (w̄_r(0,ϑ) − 2u/(γ+1), w_r(0,ϑ), −v²_r(0,ϑ)).
pub fn limiting_data(law: &GasLaw, right: &Trace, u: f64, theta: f64) -> InvariantState {
    let s = right.at(theta);
    InvariantState::new(s.wbar - 2.0 * u / (law.gamma() + 1.0), s.w, s.psi2)
}

fn seed_graph(samples: Vec<f64>, u_star: f64, what: &str) -> Result<FrontGraph> {
    if let Some(x) = samples.iter().find(|x| !(**x > 0.0)) {
        return Err(Error::Domain(format!("{what}: invariant jump has the wrong sign (u = {x})")));
    }
    if let Some(x) = samples.iter().find(|x| **x > u_star) {
        return Err(Error::Domain(format!("{what} at u = {x} lies beyond u* = {u_star}")));
    }
    Ok(FrontGraph::from_samples(&samples))
}

/// H₀: u = (γ+1)/2·(w̄_r − w̄_l) on the singularity.
pub fn h0(law: &GasLaw, right: &Trace, left: &Trace, u_star: f64) -> Result<FrontGraph> {
    let k = 0.5 * (law.gamma() + 1.0);
    let s = right.wbar.iter().zip(&left.wbar).map(|(r, l)| k * (r - l)).collect();
    seed_graph(s, u_star, "H₀")
}

/// H̄₀ for the back fan: u = (γ+1)/2·(w_l − w_r).
pub fn h0bar(law: &GasLaw, right: &Trace, left: &Trace, u_star: f64) -> Result<FrontGraph> {
    let k = 0.5 * (law.gamma() + 1.0);
    let s = left.w.iter().zip(&right.w).map(|(l, r)| k * (l - r)).collect();
    seed_graph(s, u_star, "H̄₀")
}

// ---------------------------------------------------------------------------
// Right solution

/// L^n U^(λ)_r on S_{δ,0}: `values[λ][n][j]` with λ index 0, 1, 2 ↔ U⁽⁰⁾, U⁽⁻¹⁾, U⁽⁻²⁾.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RightJets {
    pub delta: f64,
    pub values: [Vec<Vec<f64>>; 3],
}

/// Smooth right solution near the outgoing characteristic C₀.
#[derive(Debug, Clone)]
pub struct RightSolution {
    pub law: GasLaw,
    pub state: PrimitiveState,
    pub theta: Vec<f64>,
    pub degree: usize,
    /// c, v¹, v² as jets in (t, x1, x2 − ϑ_j).
    pub fields: [Jet; 3],
    /// Generator of C₀ through (0, 0, ϑ_j): x1, x2 − ϑ_j, T̂¹, T̂² as series in t.
    gen: [Jet; 4],
    /// U_r along the generator.
    gen_u: [Jet; 3],
}

fn euler_rhs(law: &GasLaw, f: &[Jet; 3]) -> [Jet; 3] {
    let g1 = 0.5 * (law.gamma() - 1.0);
    let [c, v1, v2] = f;
    let (c1, c2) = (c.deriv(1), c.deriv(2));
    let adv = |q: &Jet| &v1.mul(&q.deriv(1)) + &v2.mul(&q.deriv(2));
    let div = &v1.deriv(1) + &v2.deriv(2);
    let dc = -&(&adv(c) + &c.mul(&div).scale(g1));
    let k = 1.0 / g1;
    let dv1 = -&(&adv(v1) + &c.mul(&c1).scale(k));
    let dv2 = -&(&adv(v2) + &c.mul(&c2).scale(k));
    [dc, dv1, dv2]
}

/// Fill the s^{k+1}-coefficients of `fields` from `rhs`, variable 0 being time.
fn ck_fill(fields: &mut [Jet], rhs: &[Jet], k: usize) {
    let basis = fields[0].basis.clone();
    let d = basis.degree;
    for m in 0..basis.len() {
        let e = basis.exponent(m);
        if e[0] != k || e[0] + e[1] + e[2] + 1 > d {
            continue;
        }
        let dst = basis.index([e[0] + 1, e[1], e[2]]).unwrap();
        let f = 1.0 / (k + 1) as f64;
        for (fld, r) in fields.iter_mut().zip(rhs) {
            let src: Vec<f64> = r.coef(m).iter().map(|x| x * f).collect();
            fld.coef_mut(dst).copy_from_slice(&src);
        }
    }
}

impl RightSolution {
    pub fn new(law: &GasLaw, state: &PrimitiveState, pert: &Perturbation, n_theta: usize, degree: usize) -> Result<Self> {
        if n_theta < 8 || degree < 2 {
            return Err(Error::Invalid("right solution needs n_theta ≥ 8 and degree ≥ 2".into()));
        }
        let theta = spectral::grid(n_theta);
        let b3 = Basis::new(3, degree);
        let c_r = law.c_of_rho(state.rho);
        let mut fields: [Jet; 3] = std::array::from_fn(|_| Jet::zeros(&b3, n_theta));
        for m in 0..b3.len() {
            let e = b3.exponent(m);
            if e[0] != 0 {
                continue;
            }
            let (a, b) = (e[1], e[2]);
            let f = 1.0 / (factorial(a) * factorial(b));
            let col = |g: &dyn Fn(f64) -> f64| -> Vec<f64> { theta.iter().map(|&t| g(t) * f).collect() };
            let mut c = col(&|t| pert.sound_derivative(true, 0.0, t, a, b));
            let mut v1 = col(&|t| -pert.potential_derivative(0.0, t, a + 1, b));
            let mut v2 = col(&|t| -pert.potential_derivative(0.0, t, a, b + 1));
            if a + b == 0 {
                c.iter_mut().for_each(|x| *x += c_r);
                v1.iter_mut().for_each(|x| *x += state.v1);
                v2.iter_mut().for_each(|x| *x += state.v2);
                if let Some(x) = c.iter().find(|x| !(**x > 0.0)) {
                    return Err(Error::Vacuum(format!("right trace sound speed {x}")));
                }
            }
            fields[0].set(e, &c);
            fields[1].set(e, &v1);
            fields[2].set(e, &v2);
        }
        for k in 0..degree {
            let rhs = euler_rhs(law, &fields);
            ck_fill(&mut fields, &rhs, k);
        }
        let (gen, gen_u) = Self::generator_series(law, &fields, n_theta, degree);
        Ok(Self { law: *law, state: *state, theta, degree, fields, gen, gen_u })
    }

    /// Picard iteration for x′ = v − cT̂, T̂′ = (−T̂_i X̂(v^i) + X̂(c)) X̂ from (0, ϑ_j), T̂ = (−1, 0).
    fn generator_series(law: &GasLaw, fields: &[Jet; 3], w: usize, degree: usize) -> ([Jet; 4], [Jet; 3]) {
        let b1 = Basis::new(1, degree);
        let zero = vec![0.0; w];
        let t = Jet::variable(&b1, 0, &zero);
        let [c, v1, v2] = fields;
        let parts = [c.clone(), v1.clone(), v2.clone(), c.deriv(1), c.deriv(2), v1.deriv(1), v1.deriv(2), v2.deriv(1), v2.deriv(2)];
        let refs: Vec<&Jet> = parts.iter().collect();
        let mut y1 = Jet::zeros(&b1, w);
        let mut y2 = Jet::zeros(&b1, w);
        let mut th1 = Jet::splat(&b1, w, -1.0);
        let mut th2 = Jet::zeros(&b1, w);
        let mut along = Vec::new();
        for _ in 0..=degree + 1 {
            along = Jet::compose_many(&refs, &[t.clone(), y1.clone(), y2.clone()]);
            let [c, v1, v2, c1, c2, v11, v12, v21, v22] = <[Jet; 9]>::try_from(along.clone()).unwrap();
            let (xh1, xh2) = (th2.clone(), -&th1);
            let xv1 = &xh1.mul(&v11) + &xh2.mul(&v12);
            let xv2 = &xh1.mul(&v21) + &xh2.mul(&v22);
            let xc = &xh1.mul(&c1) + &xh2.mul(&c2);
            let rot = &xc - &(&th1.mul(&xv1) + &th2.mul(&xv2));
            let ny1 = (&v1 - &c.mul(&th1)).integrate(0);
            let ny2 = (&v2 - &c.mul(&th2)).integrate(0);
            let nt1 = rot.mul(&xh1).integrate(0).add_const(-1.0);
            let nt2 = rot.mul(&xh2).integrate(0);
            y1 = ny1;
            y2 = ny2;
            th1 = nt1;
            th2 = nt2;
        }
        let k = 1.0 / (law.gamma() - 1.0);
        let (c, v1, v2) = (&along[0], &along[1], &along[2]);
        let v = [&c.scale(k) + &v1.scale(0.5), &c.scale(k) - &v1.scale(0.5), -v2];
        let th = [th1.clone(), th2.clone()];
        let u = apply_affine(&P_INV, &th, &v);
        ([y1, y2, th1, th2], u)
    }

    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    /// Generator points at time t: (x1, x2, T̂¹, T̂²) per lane.
    pub fn generator_at(&self, t: f64) -> [Vec<f64>; 4] {
        let mut out: [Vec<f64>; 4] = std::array::from_fn(|i| self.gen[i].eval(&[t]));
        for (x, th) in out[1].iter_mut().zip(&self.theta) {
            *x += th;
        }
        out
    }

    /// Primitive state at (t, x) from the jet about the nearest lane.
    pub fn state_at(&self, t: f64, x: [f64; 2]) -> [f64; 3] {
        let n = self.n_theta();
        let h = 2.0 * PI / n as f64;
        let j = ((x[1].rem_euclid(2.0 * PI) / h).round() as usize) % n;
        let mut dy = x[1].rem_euclid(2.0 * PI) - self.theta[j];
        if dy > PI {
            dy -= 2.0 * PI;
        }
        std::array::from_fn(|i| self.fields[i].eval(&[t, x[0], dy])[j])
    }

    pub fn jets(&self, delta: f64, order: usize) -> RightJets {
        let b1 = &self.gen_u[0].basis;
        let w = self.n_theta();
        let shift = Jet::variable(b1, 0, &vec![delta; w]);
        let values = std::array::from_fn(|l| {
            let s = self.gen_u[l].compose(std::slice::from_ref(&shift));
            (0..=order.min(self.degree)).map(|n| s.get([n, 0, 0]).iter().map(|x| x * factorial(n)).collect()).collect()
        });
        RightJets { delta, values }
    }
}

// ---------------------------------------------------------------------------
// Chart on Σ_δ

/// The foliation of Σ_δ by the translates S_{δ,u} = S_{δ,0} − δu e₁.
#[derive(Debug, Clone)]
pub struct SliceChart {
    pub delta: f64,
    pub u_star: f64,
    pub theta: Vec<f64>,
    /// S_{δ,0} as a graph over ϑ.
    pub x1_s0: Vec<f64>,
    pub x2_s0: Vec<f64>,
    /// A = −x̸1′/x̸2′; T̂ = −(1, A)/√(1+A²), κ = δ/√(1+A²) on every S_{δ,u}.
    pub a: Vec<f64>,
    pub kappa0: Vec<f64>,
    pub t_hat0: [Vec<f64>; 2],
    x1f: Fourier,
    z2f: Fourier,
    speed: Fourier,
}

/// Taylor jet of a Fourier series about the given points (univariate, in η).
fn fourier_taylor(f: &Fourier, center: &[f64], basis: &Arc<Basis>) -> Jet {
    let mut j = Jet::zeros(basis, center.len());
    for m in 0..=basis.degree {
        let col: Vec<f64> = center.iter().map(|&t| f.eval(t, m) / factorial(m)).collect();
        j.set([m, 0, 0], &col);
    }
    j
}

pub fn build_chart(right: &RightSolution, delta: f64, u_star: f64) -> Result<SliceChart> {
    if !(delta > 0.0) || !(u_star > 0.0) {
        return Err(Error::Invalid(format!("need δ > 0 and u* > 0 (got {delta}, {u_star})")));
    }
    let [x1, x2, _, _] = right.generator_at(delta);
    let theta = right.theta.clone();
    let z2: Vec<f64> = x2.iter().zip(&theta).map(|(x, t)| x - t).collect();
    let x1f = Fourier::from_samples(&x1);
    let z2f = Fourier::from_samples(&z2);
    let scale = 1.0 + x1.iter().chain(&z2).fold(0.0f64, |m, x| m.max(x.abs()));
    if x1f.tail().max(z2f.tail()) > 1e-9 * scale {
        return Err(Error::Invalid("traces on S_{δ,0} are not resolved on the ϑ grid".into()));
    }
    let d1 = spectral::differentiate(&x1, 1);
    let d2: Vec<f64> = spectral::differentiate(&z2, 1).iter().map(|d| 1.0 + d).collect();
    if d2.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Domain("S_{δ,0} is not a graph over x2".into()));
    }
    let a: Vec<f64> = d1.iter().zip(&d2).map(|(p, q)| -p / q).collect();
    let root: Vec<f64> = a.iter().map(|a| (1.0 + a * a).sqrt()).collect();
    let kappa0 = root.iter().map(|r| delta / r).collect();
    let t_hat0 = [root.iter().map(|r| -1.0 / r).collect(), a.iter().zip(&root).map(|(a, r)| -a / r).collect()];
    let speed: Vec<f64> = a.iter().zip(&d2).map(|(a, q)| -delta * a / ((1.0 + a * a) * q)).collect();
    Ok(SliceChart {
        delta,
        u_star,
        theta,
        x1_s0: x1,
        x2_s0: x2,
        a,
        kappa0,
        t_hat0,
        x1f,
        z2f,
        speed: Fourier::from_samples(&speed),
    })
}

impl SliceChart {
    pub fn n_theta(&self) -> usize {
        self.theta.len()
    }

    /// ϑ̸(u + η) as a series in η, given ϑ̸(u) = `center`.
    fn theta_series(&self, center: &[f64], basis: &Arc<Basis>) -> Jet {
        let fc = fourier_taylor(&self.speed, center, basis);
        let mut th = Jet::constant(basis, center);
        for _ in 0..=basis.degree {
            let dev = th.add_const(0.0);
            let mut dev = dev;
            for (x, c) in dev.coef_mut(0).iter_mut().zip(center) {
                *x -= c;
            }
            let rhs = fc.compose(&[dev]);
            let mut next = rhs.integrate(0);
            for (x, c) in next.coef_mut(0).iter_mut().zip(center) {
                *x += c;
            }
            th = next;
        }
        th
    }

    /// Foot point ϑ̸(u, ϑ_j) on S_{δ,0} of every T-line at level u.
    pub fn theta_bar(&self, u: f64) -> Vec<f64> {
        let basis = Basis::new(1, 10);
        let mut th = self.theta.clone();
        let steps = (u.abs() / 0.25).ceil().max(1.0) as usize;
        let h = u / steps as f64;
        for _ in 0..steps {
            th = self.theta_series(&th, &basis).eval(&[h]);
        }
        th
    }

    /// x1 and x2 − ϑ_j along the T-lines near level u, as univariate jets in h = u' − u.
    pub fn geometry_jets(&self, u: f64, degree: usize) -> (Jet, Jet) {
        let basis = Basis::new(1, degree);
        let center = self.theta_bar(u);
        let th = self.theta_series(&center, &basis);
        let mut dev = th.clone();
        for (x, c) in dev.coef_mut(0).iter_mut().zip(&center) {
            *x -= c;
        }
        let args = [dev];
        let x1 = fourier_taylor(&self.x1f, &center, &basis).compose(&args);
        let x1 = &x1 - &Jet::variable(&basis, 0, &vec![u; center.len()]).scale(self.delta);
        let z2 = &fourier_taylor(&self.z2f, &center, &basis).compose(&args) + &th;
        let mut z2 = z2;
        for (x, t) in z2.coef_mut(0).iter_mut().zip(&self.theta) {
            *x -= t;
        }
        (x1, z2)
    }

    /// Cartesian point of (u, ϑ_j).
    pub fn points(&self, u: f64) -> (Vec<f64>, Vec<f64>) {
        let tb = self.theta_bar(u);
        let x1 = tb.iter().map(|&t| self.x1f.eval(t, 0) - self.delta * u).collect();
        let x2 = tb.iter().map(|&t| t + self.z2f.eval(t, 0)).collect();
        (x1, x2)
    }

    /// u = (x̸1(ϑ̸) − x1)/δ where x̸2(ϑ̸) = x2.
    pub fn u_of(&self, x1: f64, x2: f64) -> Result<f64> {
        let mut t = x2;
        for _ in 0..60 {
            let f = t + self.z2f.eval(t, 0) - x2;
            let df = 1.0 + self.z2f.eval(t, 1);
            let step = f / df;
            t -= step;
            if step.abs() < 1e-15 {
                return Ok((self.x1f.eval(t, 0) - x1) / self.delta);
            }
        }
        Err(Error::Domain("inverting x̸2 on S_{δ,0} did not converge".into()))
    }

    /// T̂, κ and ĝ on S_{δ,u} at the lanes.
    pub fn frame(&self, u: f64) -> ([Vec<f64>; 2], Vec<f64>, Vec<f64>) {
        let (x1, z2) = self.geometry_jets(u, 1);
        let d1 = spectral::differentiate(x1.value(), 1);
        let d2: Vec<f64> = spectral::differentiate(z2.value(), 1).iter().map(|d| 1.0 + d).collect();
        let (u1, u2) = (x1.get([1, 0, 0]), z2.get([1, 0, 0]));
        let n = self.n_theta();
        let (mut t1, mut t2, mut kappa, mut g) = (vec![0.0; n], vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        for j in 0..n {
            let r = d1[j].hypot(d2[j]);
            t1[j] = -d2[j] / r;
            t2[j] = d1[j] / r;
            kappa[j] = t1[j] * u1[j] + t2[j] * u2[j];
            g[j] = r * r;
        }
        ([t1, t2], kappa, g)
    }
}

// ---------------------------------------------------------------------------
// Left solution in acoustical coordinates

struct LeftFields {
    x1: Jet,
    z2: Jet,
    v: [Jet; 3],
}

struct LeftFrame {
    th: [Jet; 2],
    inv_norm: Jet,
    norm: Jet,
    kappa: Jet,
    xi: Jet,
    c: Jet,
}

fn dth(j: &Jet) -> Jet {
    j.map_lanes(|a| spectral::differentiate(a, 1))
}

fn left_frame(law: &GasLaw, f: &LeftFields) -> Result<LeftFrame> {
    let d1 = dth(&f.x1);
    let d2 = dth(&f.z2).add_const(1.0);
    let norm = (&d1.mul(&d1) + &d2.mul(&d2)).sqrt();
    let inv_norm = norm.recip();
    let xh = [d1.mul(&inv_norm), d2.mul(&inv_norm)];
    let th = [-&xh[1], xh[0].clone()];
    let ux = [f.x1.deriv(1), f.z2.deriv(1)];
    let kappa = &th[0].mul(&ux[0]) + &th[1].mul(&ux[1]);
    if let Some(k) = kappa.value().iter().find(|k| !(**k > KAPPA_MIN)) {
        return Err(Error::Domain(format!("singular division: κ = {k} on the slice")));
    }
    let xi = (&xh[0].mul(&ux[0]) + &xh[1].mul(&ux[1])).mul(&inv_norm);
    let c = (&f.v[0] + &f.v[1]).scale(0.5 * (law.gamma() - 1.0));
    Ok(LeftFrame { th, inv_norm, norm, kappa, xi, c })
}

/// CK recursion for ∂_s x = v − cT̂, ∂_s V = (c/κ)A(∂_u V − Ξ∂_ϑV) + cB X̂(V).
fn left_ck(law: &GasLaw, mut f: LeftFields) -> Result<(LeftFields, LeftFrame)> {
    let d = f.x1.basis.degree;
    for k in 0..d {
        let fr = left_frame(law, &f)?;
        let v1 = &f.v[0] - &f.v[1];
        let v2 = -&f.v[2];
        let dx1 = &v1 - &fr.c.mul(&fr.th[0]);
        let dz2 = &v2 - &fr.c.mul(&fr.th[1]);
        let dv_th: [Jet; 3] = std::array::from_fn(|i| dth(&f.v[i]));
        let tv: [Jet; 3] = std::array::from_fn(|i| &f.v[i].deriv(1) - &fr.xi.mul(&dv_th[i]));
        let xv: [Jet; 3] = std::array::from_fn(|i| dv_th[i].mul(&fr.inv_norm));
        let at = apply_affine(&A_T, &fr.th, &tv);
        let bx = apply_affine(&B_X, &fr.th, &xv);
        let ck = fr.c.div(&fr.kappa);
        let dv: [Jet; 3] = std::array::from_fn(|i| &ck.mul(&at[i]) + &fr.c.mul(&bx[i]));
        let mut flds = [f.x1, f.z2, f.v[0].clone(), f.v[1].clone(), f.v[2].clone()];
        let rhs = [dx1, dz2, dv[0].clone(), dv[1].clone(), dv[2].clone()];
        ck_fill(&mut flds, &rhs, k);
        let [x1, z2, a, b, c] = flds;
        f = LeftFields { x1, z2, v: [a, b, c] };
    }
    let fr = left_frame(law, &f)?;
    Ok((f, fr))
}

// ---------------------------------------------------------------------------
// Taylor data

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TaylorData {
    pub order: usize,
    pub gamma: f64,
    pub delta: f64,
    pub u_star: f64,
    pub theta: Vec<f64>,
    /// U^(λ)_n per lane: `u_coeffs[λ][n][j]`.
    pub u_coeffs: [Vec<Vec<f64>>; 3],
    /// T^k of (w̄, w, ψ₂) at u = 0: `inv_coeffs[i][k][j]`.
    pub inv_coeffs: [Vec<Vec<f64>>; 3],
    /// max_ϑ |L^n U^(λ) − L^n U^(λ)_r| on S_{δ,0}: `matching_residual[λ][n]`.
    pub matching_residual: [Vec<f64>; 3],
}

impl TaylorData {
    pub fn max_matching_residual(&self) -> f64 {
        self.matching_residual.iter().flatten().fold(0.0, |m, x| m.max(*x))
    }

    /// Invariants at level u on the lanes.
    pub fn lanes_at(&self, u: f64) -> Result<[Vec<f64>; 3]> {
        if !(0.0..=self.u_star * (1.0 + 1e-12)).contains(&u) {
            return Err(Error::Domain(format!("u = {u} outside [0, {}]", self.u_star)));
        }
        Ok(std::array::from_fn(|i| {
            let n = self.theta.len();
            let mut out = vec![0.0; n];
            for (k, row) in self.inv_coeffs[i].iter().enumerate() {
                let f = u.powi(k as i32) / factorial(k);
                for j in 0..n {
                    out[j] += f * row[j];
                }
            }
            out
        }))
    }

    /// Data jets in h about level u (exact shift of the polynomial).
    fn shifted(&self, u: f64, basis: &Arc<Basis>) -> [Jet; 3] {
        let n = self.theta.len();
        std::array::from_fn(|i| {
            let mut j = Jet::zeros(basis, n);
            for m in 0..=basis.degree {
                let mut col = vec![0.0; n];
                for k in m..=self.order {
                    let f = u.powi((k - m) as i32) / factorial(k - m) / factorial(m);
                    for (c, x) in col.iter_mut().zip(&self.inv_coeffs[i][k]) {
                        *c += f * x;
                    }
                }
                j.set([m, 0, 0], &col);
            }
            j
        })
    }
}

fn initial_left(chart: &SliceChart, u: f64, v: [Jet; 3], degree: usize) -> LeftFields {
    let b2 = Basis::new(2, degree);
    let (x1, z2) = chart.geometry_jets(u, degree);
    let lift = |j: &Jet| -> Jet {
        // univariate h ↦ second variable of (s, h)
        let mut out = Jet::zeros(&b2, j.width);
        for m in 0..=degree {
            out.set([0, m, 0], &j.get([m, 0, 0]));
        }
        out
    };
    LeftFields { x1: lift(&x1), z2: lift(&z2), v: std::array::from_fn(|i| lift(&v[i])) }
}

/// L^n U^(λ) on S_{δ,0} implied by the diagonal coefficients `u_coeffs`.
fn implied_jets(law: &GasLaw, chart: &SliceChart, u_coeffs: &[Vec<Vec<f64>>; 3], order: usize) -> Result<([Vec<Vec<f64>>; 3], [Jet; 3])> {
    let b1 = Basis::new(1, order);
    let n = chart.n_theta();
    let (x1, z2) = chart.geometry_jets(0.0, order);
    let d1 = dth(&x1);
    let d2 = dth(&z2).add_const(1.0);
    let inv = (&d1.mul(&d1) + &d2.mul(&d2)).sqrt().recip();
    let th = [-&d2.mul(&inv), d1.mul(&inv)];
    let u: [Jet; 3] = std::array::from_fn(|l| {
        let mut j = Jet::zeros(&b1, n);
        for k in 0..=order {
            let col: Vec<f64> = u_coeffs[l][k].iter().map(|x| x / factorial(k)).collect();
            j.set([k, 0, 0], &col);
        }
        j
    });
    let v = apply_affine(&P, &th, &u);
    let (sol, fr) = left_ck(law, initial_left(chart, 0.0, v.clone(), order))?;
    let uu = apply_affine(&P_INV, &fr.th, &sol.v);
    let out = std::array::from_fn(|l| (0..=order).map(|k| uu[l].get([k, 0, 0]).iter().map(|x| x * factorial(k)).collect()).collect());
    Ok((out, v))
}

pub fn taylor_coefficients(law: &GasLaw, chart: &SliceChart, right: &RightJets, order: usize) -> Result<TaylorData> {
    if order == 0 || order > MAX_ORDER {
        return Err(Error::Invalid(format!("Taylor order must be in 1..={MAX_ORDER}, got {order}")));
    }
    if right.values.iter().any(|v| v.len() <= order) {
        return Err(Error::Invalid("right jets do not reach the requested order".into()));
    }
    if (right.delta - chart.delta).abs() > 1e-14 * chart.delta {
        return Err(Error::Invalid("right jets and chart are on different slices".into()));
    }
    if let Some(k) = chart.kappa0.iter().find(|k| !(**k > KAPPA_MIN)) {
        return Err(Error::Domain(format!("singular division: κ = {k} on S_{{δ,0}}")));
    }
    let n = chart.n_theta();
    let g = law.gamma();
    let mut uc: [Vec<Vec<f64>>; 3] = std::array::from_fn(|l| {
        let mut rows = vec![vec![0.0; n]; order + 1];
        rows[0] = right.values[l][0].clone();
        rows
    });
    uc[0][1] = vec![-2.0 / (g + 1.0); n];
    // c on S_{δ,0} from the right trace
    let th0 = [chart.t_hat0[0].clone(), chart.t_hat0[1].clone()];
    let c0: Vec<f64> = (0..n)
        .map(|j| {
            let v = matvec(&p_matrix([th0[0][j], th0[1][j]]), [uc[0][0][j], uc[1][0][j], uc[2][0][j]]);
            0.5 * (g - 1.0) * (v[0] + v[1])
        })
        .collect();
    // L^n U^(λ) = (λc/κ)^n U^(λ)_n + (terms in lower coefficients): one update per order is exact
    for k in 1..=order {
        for _ in 0..2 {
            let (cur, _) = implied_jets(law, chart, &uc, order)?;
            for l in 1..3 {
                for j in 0..n {
                    let f = (chart.kappa0[j] / (LAMBDA[l] * c0[j])).powi(k as i32);
                    uc[l][k][j] += f * (right.values[l][k][j] - cur[l][k][j]);
                }
            }
        }
    }
    let (cur, v) = implied_jets(law, chart, &uc, order)?;
    let matching_residual = std::array::from_fn(|l| {
        (0..=order).map(|k| (0..n).map(|j| (cur[l][k][j] - right.values[l][k][j]).abs()).fold(0.0, f64::max)).collect()
    });
    let inv_coeffs = std::array::from_fn(|i| (0..=order).map(|k| v[i].get([k, 0, 0]).iter().map(|x| x * factorial(k)).collect()).collect());
    Ok(TaylorData {
        order,
        gamma: g,
        delta: chart.delta,
        u_star: chart.u_star,
        theta: chart.theta.clone(),
        u_coeffs: uc,
        inv_coeffs,
        matching_residual,
    })
}

pub fn evaluate_data(td: &TaylorData, u: f64, theta: f64) -> Result<InvariantState> {
    let lanes = td.lanes_at(u)?;
    let f = |s: &[f64]| Fourier::from_samples(s).eval(theta, 0);
    Ok(InvariantState::new(f(&lanes[0]), f(&lanes[1]), f(&lanes[2])))
}

/// CSV with columns theta,u,x1,x2,wbar,w,psi2,kappa,That1,That2 on `n_u + 1` levels.
pub fn slice_csv(td: &TaylorData, chart: &SliceChart, n_u: usize) -> Result<String> {
    use std::fmt::Write as _;
    let mut s = String::from("theta,u,x1,x2,wbar,w,psi2,kappa,That1,That2\n");
    for i in 0..=n_u.max(1) {
        let u = chart.u_star * i as f64 / n_u.max(1) as f64;
        let (x1, x2) = chart.points(u);
        let (th, kappa, _) = chart.frame(u);
        let inv = td.lanes_at(u)?;
        for j in 0..chart.n_theta() {
            let _ = writeln!(
                s,
                "{},{},{},{},{},{},{},{},{},{}",
                chart.theta[j], u, x1[j], x2[j], inv[0][j], inv[1][j], inv[2][j], kappa[j], th[0][j], th[1][j]
            );
        }
    }
    Ok(s)
}

// ---------------------------------------------------------------------------
// Ansatz verification

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzEntry {
    pub group: String,
    pub name: String,
    pub measured: f64,
    /// Human-readable size the quantity is compared to, e.g. "eps*delta".
    pub scale_label: String,
    pub scale: f64,
    pub ratio: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnsatzReport {
    pub delta: f64,
    pub epsilon: f64,
    pub u_star: f64,
    pub order: usize,
    pub nodes: usize,
    pub entries: Vec<AnsatzEntry>,
    /// sup |∂₁v² − ∂₂v¹| on the slice.
    pub curl_max: f64,
    pub matching_residual: f64,
}

impl AnsatzReport {
    pub fn entry(&self, name: &str) -> Option<&AnsatzEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn max_measured(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.measured))
    }
}

/// Clenshaw–Curtis nodes and weights on [0, b] (n even).
fn clenshaw_curtis(n: usize, b: f64) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut x = Vec::with_capacity(n + 1);
    let mut w = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let t = k as f64 * PI / nf;
        x.push(0.5 * b * (1.0 - t.cos()));
        let mut s = 0.0;
        for j in 1..=n / 2 {
            let bj = if 2 * j == n { 1.0 } else { 2.0 };
            s += bj / (4.0 * (j * j) as f64 - 1.0) * (2.0 * j as f64 * t).cos();
        }
        let ck = if k == 0 || k == n { 1.0 } else { 2.0 };
        w.push(0.5 * b * ck / nf * (1.0 - s));
    }
    (x, w)
}

#[derive(Default)]
struct Sup(std::collections::BTreeMap<&'static str, f64>);

impl Sup {
    fn see(&mut self, key: &'static str, vals: &[f64]) {
        let m = vals.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let e = self.0.entry(key).or_insert(0.0);
        *e = e.max(m);
    }
    fn get(&self, key: &str) -> f64 {
        self.0.get(key).copied().unwrap_or(0.0)
    }
}

pub fn verify_ansatz(law: &GasLaw, td: &TaylorData, chart: &SliceChart, epsilon: f64) -> Result<AnsatzReport> {
    const NODES: usize = 16;
    let (nodes, weights) = clenshaw_curtis(NODES, chart.u_star);
    let delta = chart.delta;
    let n = chart.n_theta();
    let dtheta = 2.0 * PI / n as f64;
    let b1 = Basis::new(1, 3);
    let mut sup = Sup::default();
    let mut energy = [0.0f64; 5];
    let mut curl_max = 0.0f64;
    for (&u, &wq) in nodes.iter().zip(&weights) {
        let u = u.min(td.u_star);
        let v = td.shifted(u, &b1);
        let (f, fr) = left_ck(law, initial_left(chart, u, v, 3))?;
        let t_op = |q: &Jet| &q.deriv(1) - &fr.xi.mul(&dth(q));
        let x_op = |q: &Jet| dth(q).mul(&fr.inv_norm);
        let l_op = |q: &Jet| q.deriv(0);
        let val = |q: &Jet| q.value().to_vec();
        let shifted = |q: &Jet, s: f64| q.value().iter().map(|x| x + s).collect::<Vec<_>>();

        // I∞,1
        let g = fr.norm.mul(&fr.norm);
        sup.see("g_minus_1", &shifted(&g, -1.0));
        sup.see("kappa_over_delta_minus_1", &shifted(&fr.kappa.scale(1.0 / delta), -1.0));
        sup.see("That2", &val(&fr.th[1]));
        sup.see("That1_plus_1", &shifted(&fr.th[0], 1.0));
        for z in [&t_op as &dyn Fn(&Jet) -> Jet, &x_op] {
            sup.see("Z_g", &val(&z(&g)));
            let zk = z(&fr.kappa);
            let z1 = z(&fr.th[0]);
            let z2 = z(&fr.th[1]);
            sup.see("Z_kappa", &val(&zk));
            sup.see("Z_That1", &val(&z1));
            sup.see("Z_That2", &val(&z2));
            for zz in [&t_op as &dyn Fn(&Jet) -> Jet, &x_op] {
                sup.see("Z_kappa", &val(&zz(&zk)));
                sup.see("Z_That1", &val(&zz(&z1)));
                sup.see("Z_That2", &val(&zz(&z2)));
            }
        }

        // I∞,2 and energies
        let c = val(&fr.c);
        let kap = val(&fr.kappa);
        let root_g = val(&fr.norm);
        let dens = |lq: &[f64], xq: &[f64], tq: &[f64]| -> (f64, f64) {
            let (mut e, mut eb) = (0.0, 0.0);
            for j in 0..n {
                let r = kap[j] / c[j];
                let mu = c[j] * kap[j];
                let lb = r * lq[j] + 2.0 * tq[j];
                e += 0.5 * r * (r * lq[j] * lq[j] + mu * xq[j] * xq[j]) * root_g[j];
                eb += 0.5 * (lb * lb + kap[j] * kap[j] * xq[j] * xq[j]) * root_g[j];
            }
            (e * dtheta, eb * dtheta)
        };
        let names = ["wbar", "w", "psi2"];
        for (i, psi) in f.v.iter().enumerate() {
            let (lq, xq, tq) = (val(&l_op(psi)), val(&x_op(psi)), val(&t_op(psi)));
            sup.see("L_psi", &lq);
            sup.see("Xhat_psi", &xq);
            match names[i] {
                "wbar" => sup.see("T_wbar_plus", &tq.iter().map(|x| x + 2.0 / (law.gamma() + 1.0)).collect::<Vec<_>>()),
                "w" => sup.see("T_w", &tq),
                _ => sup.see("T_psi2", &tq),
            }
            if i > 0 {
                let (e, eb) = dens(&lq, &xq, &tq);
                energy[i - 1] += wq * (e + eb);
            }
            for z in [&t_op as &dyn Fn(&Jet) -> Jet, &x_op] {
                let zp = z(psi);
                let (lq, xq, tq) = (val(&l_op(&zp)), val(&x_op(&zp)), val(&t_op(&zp)));
                let (e, eb) = dens(&lq, &xq, &tq);
                energy[2 + i] += wq * (e + eb);
                sup.see("L_Z_psi", &lq);
                sup.see("Xhat_Z_psi", &xq);
                sup.see("T_Z_psi", &tq);
                for zz in [&t_op as &dyn Fn(&Jet) -> Jet, &x_op] {
                    let zzp = zz(&zp);
                    sup.see("L_Z_psi", &val(&l_op(&zzp)));
                    sup.see("Xhat_Z_psi", &val(&x_op(&zzp)));
                    sup.see("T_Z_psi", &val(&t_op(&zzp)));
                }
            }
        }

        // curl from the chart Jacobian
        let v1 = &f.v[0] - &f.v[1];
        let v2 = -&f.v[2];
        let ux = [f.x1.get([0, 1, 0]), f.z2.get([0, 1, 0])];
        let tx = [dth(&f.x1).value().to_vec(), dth(&f.z2).add_const(1.0).value().to_vec()];
        let (v1u, v2u) = (v1.get([0, 1, 0]), v2.get([0, 1, 0]));
        let (v1t, v2t) = (dth(&v1).value().to_vec(), dth(&v2).value().to_vec());
        for j in 0..n {
            // [∂_u; ∂_ϑ] = J [∂1; ∂2], J = [[x1_u, x2_u], [x1_ϑ, x2_ϑ]]
            let det = ux[0][j] * tx[1][j] - ux[1][j] * tx[0][j];
            let grad = |fu: f64, ft: f64| [(tx[1][j] * fu - ux[1][j] * ft) / det, (-tx[0][j] * fu + ux[0][j] * ft) / det];
            let g1 = grad(v1u[j], v1t[j]);
            let g2 = grad(v2u[j], v2t[j]);
            curl_max = curl_max.max((g2[0] - g1[1]).abs());
        }
    }
    let ed = epsilon * delta;
    let e2d2 = ed * ed;
    let mut entries = Vec::new();
    let mut push = |group: &str, name: &str, measured: f64, label: &str, scale: f64| {
        let ratio = if scale > 0.0 {
            measured / scale
        } else if measured <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        };
        entries.push(AnsatzEntry {
            group: group.into(),
            name: name.into(),
            measured,
            scale_label: label.into(),
            scale,
            ratio,
            pass: ratio <= ANSATZ_CONSTANT,
        });
    };
    for (name, label, scale) in [
        ("g_minus_1", "eps*delta", ed),
        ("kappa_over_delta_minus_1", "eps*delta", ed),
        ("That2", "eps*delta", ed),
        ("That1_plus_1", "eps^2*delta^2", e2d2),
        ("Z_g", "eps*delta", ed),
        ("Z_kappa", "eps*delta^2", ed * delta),
        ("Z_That1", "eps^2*delta^2", e2d2),
        ("Z_That2", "eps*delta", ed),
    ] {
        push("I_inf_1", name, sup.get(name), label, scale);
    }
    for (name, label, scale) in [
        ("L_psi", "eps", epsilon),
        ("Xhat_psi", "eps", epsilon),
        ("T_w", "eps*delta", ed),
        ("T_psi2", "eps*delta", ed),
        ("T_wbar_plus", "eps*delta", ed),
        ("L_Z_psi", "eps", epsilon),
        ("Xhat_Z_psi", "eps", epsilon),
        ("T_Z_psi", "eps*delta", ed),
    ] {
        push("I_inf_2", name, sup.get(name), label, scale);
    }
    for (k, name) in ["E_w", "E_psi2", "E1_wbar", "E1_w", "E1_psi2"].iter().enumerate() {
        push("I_2", name, energy[k], "eps^2*delta^2", e2d2);
    }
    Ok(AnsatzReport {
        delta,
        epsilon,
        u_star: chart.u_star,
        order: td.order,
        nodes: NODES + 1,
        entries,
        curl_max,
        matching_residual: td.max_matching_residual(),
    })
}

/// Everything built for one slice.
#[derive(Debug, Clone)]
pub struct SliceData {
    pub right: RightSolution,
    pub chart: SliceChart,
    pub jets: RightJets,
    pub taylor: TaylorData,
}

/// Right solution, chart and Taylor data for the ε-perturbed right state.
pub fn construct(
    law: &GasLaw,
    right_state: &PrimitiveState,
    pert: &Perturbation,
    delta: f64,
    order: usize,
    n_theta: usize,
    c0: f64,
) -> Result<SliceData> {
    if !(c0 > 0.0 && c0 < 1.0) {
        return Err(Error::Config(format!("c0 must lie in (0, 1), got {c0}")));
    }
    let right = RightSolution::new(law, right_state, pert, n_theta, RIGHT_DEGREE)?;
    let us = u_star(law, law.c_of_rho(right_state.rho), c0);
    let chart = build_chart(&right, delta, us)?;
    let jets = right.jets(delta, order);
    let taylor = taylor_coefficients(law, &chart, &jets, order)?;
    Ok(SliceData { right, chart, jets, taylor })
}
