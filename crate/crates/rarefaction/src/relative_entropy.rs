//! Relative entropy α, relative flux β, quadratic flux remainders and the
//! entropy/Gronwall diagnostics used to compare two solutions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas_model::{ConservedState, GasLaw, PrimitiveState};
use crate::solver2d::{self, Field2D, Grid};

fn check(u: &ConservedState) -> Result<()> {
    if !(u.rho > 0.0) {
        return Err(Error::Domain(format!("relative entropy needs rho > 0, got {}", u.rho)));
    }
    Ok(())
}

#[inline]
fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// α(U, Ū) = η(U) − η(Ū) − ∇η(Ū)·(U − Ū).
pub fn alpha(law: &GasLaw, u: &ConservedState, ubar: &ConservedState) -> Result<f64> {
    check(u)?;
    check(ubar)?;
    Ok(alpha_unchecked(law, u, ubar))
}

#[inline]
fn alpha_unchecked(law: &GasLaw, u: &ConservedState, ubar: &ConservedState) -> f64 {
    if u == ubar {
        return 0.0;
    }
    let d = [u.rho - ubar.rho, u.p1 - ubar.p1, u.p2 - ubar.p2];
    let a = law.eta(u) - law.eta(ubar) - dot(&law.eta_gradient(ubar), &d);
    a.max(0.0)
}

/// β^i(U, Ū) = q^i(U) − q^i(Ū) − ∇η(Ū)·(F^i(U) − F^i(Ū)).
pub fn beta(law: &GasLaw, u: &ConservedState, ubar: &ConservedState) -> Result<[f64; 2]> {
    check(u)?;
    check(ubar)?;
    let g = law.eta_gradient(ubar);
    let (q, qb) = (law.q(u), law.q(ubar));
    let mut out = [0.0; 2];
    for (i, o) in out.iter_mut().enumerate() {
        let (f, fb) = (law.flux(u, i + 1), law.flux(ubar, i + 1));
        let df = [f[0] - fb[0], f[1] - fb[1], f[2] - fb[2]];
        *o = q[i] - qb[i] - dot(&g, &df);
    }
    Ok(out)
}

/// p(ρ) − p(ρ̄) − p′(ρ̄)(ρ − ρ̄).
pub fn pressure_bregman(law: &GasLaw, rho: f64, rhobar: f64) -> f64 {
    law.pressure(rho) - law.pressure(rhobar) - law.dpressure(rhobar) * (rho - rhobar)
}

/// Quadratic flux remainders (QF¹, QF²).
pub fn qf_terms(law: &GasLaw, u: &ConservedState, ubar: &ConservedState) -> Result<([f64; 3], [f64; 3])> {
    check(u)?;
    check(ubar)?;
    let (s, sb) = (u.to_primitive(), ubar.to_primitive());
    let bp = pressure_bregman(law, s.rho, sb.rho);
    let (d1, d2) = (s.v1 - sb.v1, s.v2 - sb.v2);
    Ok((
        [0.0, bp + s.rho * d1 * d1, s.rho * d1 * d2],
        [0.0, s.rho * d1 * d2, bp + s.rho * d2 * d2],
    ))
}

/// Hessian of η with its closed-form spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyHessian {
    pub matrix: [[f64; 3]; 3],
    pub eigenvalues: [f64; 3],
}

pub fn hessian(law: &GasLaw, u: &ConservedState) -> Result<EntropyHessian> {
    check(u)?;
    Ok(EntropyHessian { matrix: law.eta_hessian(u), eigenvalues: law.eta_hessian_eigenvalues(u) })
}

/// Compact-set constants: c₁|ΔU|² ≤ α ≤ c₂|ΔU|² and |β| ≤ s₀ α.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormConstants {
    pub c1: f64,
    pub c2: f64,
    pub s0: f64,
}

/// Box in primitive variables, widened by 10% on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateHull {
    pub rho: [f64; 2],
    pub v1: [f64; 2],
    pub v2: [f64; 2],
}

impl StateHull {
    pub fn of<'a>(states: impl IntoIterator<Item = &'a ConservedState>) -> Result<Self> {
        let mut h = StateHull {
            rho: [f64::INFINITY, f64::NEG_INFINITY],
            v1: [f64::INFINITY, f64::NEG_INFINITY],
            v2: [f64::INFINITY, f64::NEG_INFINITY],
        };
        for u in states {
            check(u)?;
            let s = u.to_primitive();
            for (r, x) in [(&mut h.rho, s.rho), (&mut h.v1, s.v1), (&mut h.v2, s.v2)] {
                r[0] = r[0].min(x);
                r[1] = r[1].max(x);
            }
        }
        if !h.rho[0].is_finite() {
            return Err(Error::Invalid("empty state set".into()));
        }
        let widen = |r: [f64; 2], floor: f64| {
            let m = 0.1 * (r[1] - r[0]).max(1e-3 * r[1].abs().max(1.0));
            [(r[0] - m).max(floor), r[1] + m]
        };
        Ok(StateHull { rho: widen(h.rho, 0.5 * h.rho[0]), v1: widen(h.v1, f64::NEG_INFINITY), v2: widen(h.v2, f64::NEG_INFINITY) })
    }

    fn lattice(&self, n: usize) -> Vec<ConservedState> {
        let pick = |r: [f64; 2], k: usize| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64;
        let mut out = Vec::with_capacity(n * n * n);
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    out.push(PrimitiveState::new(pick(self.rho, a), pick(self.v1, b), pick(self.v2, c)).to_conserved());
                }
            }
        }
        out
    }
}

impl NormConstants {
    /// c₁, c₂ from Hessian eigenvalue extremes on a lattice over the (convex) hull;
    /// s₀ from the largest |β|/α over all lattice pairs.
    pub fn over(law: &GasLaw, hull: &StateHull) -> Self {
        let pts = hull.lattice(7);
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for u in &pts {
            let ev = law.eta_hessian_eigenvalues(u);
            lo = lo.min(ev[0]);
            hi = hi.max(ev[2]);
        }
        let s0 = pts
            .par_iter()
            .map(|u| {
                let mut s = 0.0f64;
                for ub in &pts {
                    let a = alpha_unchecked(law, u, ub);
                    if a > 1e-12 {
                        let b = beta(law, u, ub).unwrap_or([0.0; 2]);
                        s = s.max(b[0].hypot(b[1]) / a);
                    }
                }
                s
            })
            .reduce(|| 0.0, f64::max);
        Self { c1: 0.5 * lo, c2: 0.5 * hi, s0 }
    }
}

/// Per-step numerical entropy production of the first-order scheme.
#[derive(Debug, Clone)]
pub struct StepProduction {
    /// −[η(Uⁿ⁺¹) − η(Uⁿ) + Δt div Q(Uⁿ)] per cell (an area density).
    pub cells: Vec<f64>,
    /// Σ cells · area.
    pub total: f64,
    pub min_cell: f64,
}

/// Numerical entropy flux consistent with the Rusanov flux:
/// Q = ½(q_L + q_R) − ½ s (η_R − η_L).
pub fn entropy_flux(law: &GasLaw, ul: &ConservedState, ur: &ConservedState, dir: usize) -> f64 {
    let s = solver2d::wave_speed(law, ul, dir).max(solver2d::wave_speed(law, ur, dir));
    let k = dir - 1;
    0.5 * (law.q(ul)[k] + law.q(ur)[k]) - 0.5 * s * (law.eta(ur) - law.eta(ul))
}

/// Cellwise div Q with the solver's boundary policy (zero-gradient in x1, periodic in x2).
fn entropy_divergence(law: &GasLaw, f: &Field2D) -> Vec<f64> {
    let g = f.grid;
    let (nx1, nx2) = (g.nx1, g.nx2);
    let mut out = vec![0.0; g.len()];
    out.par_chunks_mut(nx1).enumerate().for_each(|(j, row)| {
        let (jp, jm) = ((j + 1) % nx2, (j + nx2 - 1) % nx2);
        for (i, o) in row.iter_mut().enumerate() {
            let u = f.at(i, j);
            let l = f.at(i.saturating_sub(1), j);
            let r = f.at((i + 1).min(nx1 - 1), j);
            let q1 = entropy_flux(law, u, r, 1) - entropy_flux(law, l, u, 1);
            let q2 = entropy_flux(law, u, f.at(i, jp), 2) - entropy_flux(law, f.at(i, jm), u, 2);
            *o = q1 / g.dx1 + q2 / g.dx2;
        }
    });
    out
}

fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::Invalid("fields live on different grids".into()));
    }
    Ok(())
}

/// Entropy production of one solver step `before → after`.
pub fn entropy_step_production(law: &GasLaw, before: &Field2D, after: &Field2D) -> Result<StepProduction> {
    same_grid(&before.grid, &after.grid)?;
    let dt = after.t - before.t;
    let div = entropy_divergence(law, before);
    let cells: Vec<f64> = before
        .cells
        .iter()
        .zip(&after.cells)
        .zip(&div)
        .map(|((a, b), d)| -(law.eta(b) - law.eta(a) + dt * d))
        .collect();
    let area = before.grid.cell_area();
    let total = cells.iter().sum::<f64>() * area;
    let min_cell = cells.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(StepProduction { cells, total, min_cell })
}

/// Cellwise ∂ₜη + div Q between two slices: forward difference in time, trapezoidal
/// flux divergence. An area density; positive values violate the entropy inequality.
pub fn entropy_residual_cells(law: &GasLaw, a: &Field2D, b: &Field2D) -> Result<Vec<f64>> {
    same_grid(&a.grid, &b.grid)?;
    let dt = b.t - a.t;
    if !(dt > 0.0) {
        return Err(Error::Invalid("slices are not increasing in time".into()));
    }
    let (da, db) = (entropy_divergence(law, a), entropy_divergence(law, b));
    Ok((0..a.cells.len())
        .map(|k| (law.eta(&b.cells[k]) - law.eta(&a.cells[k])) / dt + 0.5 * (da[k] + db[k]))
        .collect())
}

/// Per slice pair: Σ area · max(0, ∂ₜη + div Q). Zero for an exact entropy solution sampled finely.
pub fn entropy_inequality_residual(law: &GasLaw, history: &[Field2D]) -> Result<Vec<f64>> {
    if history.len() < 2 {
        return Err(Error::Invalid("entropy residual needs at least two slices".into()));
    }
    history
        .windows(2)
        .map(|w| {
            let r = entropy_residual_cells(law, &w[0], &w[1])?;
            Ok(r.iter().map(|x| x.max(0.0)).sum::<f64>() * w[0].grid.cell_area())
        })
        .collect()
}

/// Conservative projection onto `target` by overlap-weighted cell averaging.
/// Coarse cells not covered by the source keep zero weight and are filled from the
/// nearest source column.
pub fn project_to(f: &Field2D, target: Grid) -> Field2D {
    let s = f.grid;
    let weights = |n_t: usize, lo_t: f64, d_t: f64, n_s: usize, lo_s: f64, d_s: f64| -> Vec<Vec<(usize, f64)>> {
        (0..n_t)
            .map(|k| {
                let (a, b) = (lo_t + k as f64 * d_t, lo_t + (k + 1) as f64 * d_t);
                let i0 = (((a - lo_s) / d_s).floor().max(0.0) as usize).min(n_s - 1);
                let mut w = vec![];
                let mut i = i0;
                while i < n_s {
                    let (c, d) = (lo_s + i as f64 * d_s, lo_s + (i + 1) as f64 * d_s);
                    if c >= b {
                        break;
                    }
                    let o = d.min(b) - c.max(a);
                    if o > 0.0 {
                        w.push((i, o));
                    }
                    i += 1;
                }
                if w.is_empty() {
                    let near = (((a + b) / 2.0 - lo_s) / d_s).floor().clamp(0.0, (n_s - 1) as f64) as usize;
                    w.push((near, 1.0));
                }
                let tot: f64 = w.iter().map(|x| x.1).sum();
                w.into_iter().map(|(i, o)| (i, o / tot)).collect()
            })
            .collect()
    };
    let w1 = weights(target.nx1, -target.half_width, target.dx1, s.nx1, -s.half_width, s.dx1);
    let w2 = weights(target.nx2, 0.0, target.dx2, s.nx2, 0.0, s.dx2);
    let mut cells = vec![ConservedState::default(); target.len()];
    for (j, wj) in w2.iter().enumerate() {
        for (i, wi) in w1.iter().enumerate() {
            let mut acc = [0.0; 3];
            for &(jj, b) in wj {
                for &(ii, a) in wi {
                    let u = f.at(ii, jj);
                    acc[0] += a * b * u.rho;
                    acc[1] += a * b * u.p1;
                    acc[2] += a * b * u.p2;
                }
            }
            cells[target.idx(i, j)] = ConservedState::from_array(acc);
        }
    }
    Field2D { grid: target, t: f.t, cells }
}

/// ∫ α(U_a, U_b) over the strip.
pub fn integral_alpha(law: &GasLaw, a: &Field2D, b: &Field2D) -> Result<f64> {
    same_grid(&a.grid, &b.grid)?;
    let mut s = 0.0;
    for (u, ub) in a.cells.iter().zip(&b.cells) {
        s += alpha(law, u, ub)?;
    }
    Ok(s * a.grid.cell_area())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelEntropyReport {
    pub times: Vec<f64>,
    pub integral_alpha: Vec<f64>,
    pub sup_alpha: Vec<f64>,
    pub gronwall_a: f64,
    #[serde(rename = "gronwall_C")]
    pub gronwall_c: f64,
    pub entropy_residual: Vec<f64>,
    /// min discrete ∂w̄/∂x1 inside the front fan of the reference run, over slices with t ≥ 0.1.
    pub fan_sign_min: f64,
    pub constants: NormConstants,
}

/// Smallest C with I(t) ≤ A e^{C(t − t₀)} for A = I(t₀), t₀ the first time with I > 0.
pub fn gronwall_fit(times: &[f64], values: &[f64]) -> (f64, f64) {
    let Some(k0) = values.iter().position(|&v| v > 0.0) else {
        return (0.0, 0.0);
    };
    let a = values[k0];
    let mut c = 0.0f64;
    for k in k0 + 1..values.len() {
        if values[k] > 0.0 && times[k] > times[k0] {
            c = c.max((values[k] / a).ln() / (times[k] - times[k0]));
        }
    }
    (a, c)
}

/// min over fan cells (between H and C₀, two cells inside each edge) of the central
/// difference ∂w̄/∂x1, for slices with t ≥ `t_min`.
pub fn fan_sign_min(law: &GasLaw, history: &[Field2D], t_min: f64) -> Result<f64> {
    let mut best = f64::INFINITY;
    for f in history.iter().filter(|f| f.t >= t_min) {
        let fr = solver2d::fronts::fronts_of(law, f)?;
        let g = f.grid;
        for j in 0..g.nx2 {
            let [_, _, h, c0] = fr.rows[j];
            if !(h.is_finite() && c0.is_finite()) {
                continue;
            }
            for i in 1..g.nx1 - 1 {
                let x = g.x1(i);
                if x < h + 2.0 * g.dx1 || x > c0 - 2.0 * g.dx1 {
                    continue;
                }
                let wb = |k: usize| law.to_invariants(&f.primitive(k, j)).map(|s| s.wbar);
                let d = (wb(i + 1)? - wb(i - 1)?) / (2.0 * g.dx1);
                best = best.min(d);
            }
        }
    }
    Ok(best)
}

/// Compare `run_a` (weak) against `run_b` (the classical reference); both on one grid and time list.
pub fn weak_strong_compare(law: &GasLaw, run_a: &[Field2D], run_b: &[Field2D]) -> Result<RelEntropyReport> {
    if run_a.len() != run_b.len() || run_a.is_empty() {
        return Err(Error::Invalid("runs have different slice counts".into()));
    }
    let mut times = vec![];
    let mut ia = vec![];
    let mut sa = vec![];
    for (a, b) in run_a.iter().zip(run_b) {
        same_grid(&a.grid, &b.grid)?;
        if (a.t - b.t).abs() > 1e-12 {
            return Err(Error::Invalid(format!("slice times differ: {} vs {}", a.t, b.t)));
        }
        times.push(a.t);
        ia.push(integral_alpha(law, a, b)?);
        let mut sup = 0.0f64;
        for (u, ub) in a.cells.iter().zip(&b.cells) {
            sup = sup.max(alpha_unchecked(law, u, ub));
        }
        sa.push(sup);
    }
    let (ga, gc) = gronwall_fit(&times, &ia);
    let entropy_residual = if run_a.len() >= 2 { entropy_inequality_residual(law, run_a)? } else { vec![] };
    let hull = StateHull::of(run_a.iter().chain(run_b).flat_map(|f| f.cells.iter()))?;
    Ok(RelEntropyReport {
        times,
        integral_alpha: ia,
        sup_alpha: sa,
        gronwall_a: ga,
        gronwall_c: gc,
        entropy_residual,
        fan_sign_min: fan_sign_min(law, run_b, 0.1)?,
        constants: NormConstants::over(law, &hull),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law() -> GasLaw {
        GasLaw::standard()
    }

    fn st(rho: f64, v1: f64, v2: f64) -> ConservedState {
        PrimitiveState::new(rho, v1, v2).to_conserved()
    }

    #[test]
    fn vanishes_on_the_diagonal() {
        let u = st(1.3, 0.2, -0.4);
        assert_eq!(alpha(&law(), &u, &u).unwrap(), 0.0);
        assert_eq!(beta(&law(), &u, &u).unwrap(), [0.0, 0.0]);
        let (a, b) = qf_terms(&law(), &u, &u).unwrap();
        assert_eq!((a, b), ([0.0; 3], [0.0; 3]));
    }

    #[test]
    fn bregman_example() {
        let (a, _) = qf_terms(&law(), &st(2.0, 0.3, 0.0), &st(1.0, 0.3, 0.0)).unwrap();
        assert!((a[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn hessian_at_rest_is_identity_spectrum() {
        let h = hessian(&law(), &st(1.0, 0.0, 0.0)).unwrap();
        for e in h.eigenvalues {
            assert!((e - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_nonpositive_density() {
        assert!(alpha(&law(), &st(0.0, 0.0, 0.0), &st(1.0, 0.0, 0.0)).is_err());
        assert!(beta(&law(), &st(1.0, 0.0, 0.0), &ConservedState::new(-1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn beta_is_quadratic() {
        let ub = st(1.2, 0.3, -0.1);
        let d = [0.3, -0.2, 0.5];
        let r = |h: f64| {
            let u = ConservedState::new(ub.rho + h * d[0], ub.p1 + h * d[1], ub.p2 + h * d[2]);
            let b = beta(&law(), &u, &ub).unwrap();
            [b[0] / (h * h), b[1] / (h * h)]
        };
        let (a, b, c) = (r(1e-2), r(5e-3), r(2.5e-3));
        for k in 0..2 {
            // differences shrink linearly: the limit exists
            let (d1, d2) = (a[k] - b[k], b[k] - c[k]);
            assert!(d2.abs() <= 0.6 * d1.abs() + 1e-9, "{d1} {d2}");
        }
    }

    #[test]
    fn norm_equivalence_and_flux_bound_on_compact_set() {
        let hull = StateHull { rho: [0.5, 2.0], v1: [-2.0, 2.0], v2: [-2.0, 2.0] };
        let k = NormConstants::over(&law(), &hull);
        assert!(k.c1 > 0.0 && k.c2.is_finite() && k.s0.is_finite());
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..2000 {
            let mut draw = || st(rng.random_range(0.5..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let (u, ub) = (draw(), draw());
            let a = alpha(&law(), &u, &ub).unwrap();
            let d2 = (u.rho - ub.rho).powi(2) + (u.p1 - ub.p1).powi(2) + (u.p2 - ub.p2).powi(2);
            assert!(a >= k.c1 * d2 * (1.0 - 1e-9) && a <= k.c2 * d2 * (1.0 + 1e-9));
            let b = beta(&law(), &u, &ub).unwrap();
            // lattice s₀ underestimates the true sup slightly
            assert!(b[0].hypot(b[1]) <= 1.5 * k.s0 * a + 1e-12);
        }
    }

    #[test]
    fn projection_preserves_totals() {
        let mut cfg = solver2d::RunConfig::region_iv(law(), PrimitiveState::new(1.0, -0.5, 0.0), PrimitiveState::new(1.0, 0.5, 0.0), 80, 8, 0.2);
        cfg.perturbation = solver2d::Perturbation::seeded(0.05, 0.4, 2);
        cfg.half_width = Some(1.0);
        let f = solver2d::init_perturbed_riemann(&cfg).unwrap();
        let p = project_to(&f, Grid::new(40, 4, 1.0).unwrap());
        let (a, b) = (f.totals(), p.totals());
        for k in 0..3 {
            assert!((a[k] - b[k]).abs() < 1e-12 * (1.0 + a[k].abs()));
        }
    }

    #[test]
    fn first_order_scheme_is_entropy_stable() {
        let mut cfg = solver2d::RunConfig::region_iv(law(), PrimitiveState::new(1.0, -0.5, 0.0), PrimitiveState::new(1.0, 0.5, 0.0), 60, 16, 0.2);
        cfg.perturbation = solver2d::Perturbation::seeded(0.05, 0.4, 2);
        let mut f = solver2d::init_perturbed_riemann(&cfg).unwrap();
        for _ in 0..40 {
            let n = solver2d::step(&f, &cfg).unwrap();
            let p = entropy_step_production(&law(), &f, &n).unwrap();
            assert!(p.min_cell >= -1e-12, "{}", p.min_cell);
            f = n;
        }
    }

    #[test]
    fn shocks_produce_entropy() {
        // region II data: two shocks
        let mut cfg = solver2d::RunConfig::region_iv(law(), PrimitiveState::new(1.0, 0.5, 0.0), PrimitiveState::new(1.0, -0.5, 0.0), 100, 1, 0.2);
        cfg.allow_any_region = true;
        let mut f = solver2d::init_perturbed_riemann(&cfg).unwrap();
        let mut p = None;
        for _ in 0..40 {
            let n = solver2d::step(&f, &cfg).unwrap();
            p = Some(entropy_step_production(&law(), &f, &n).unwrap());
            f = n;
        }
        let p = p.unwrap();
        let peak = p.cells.iter().copied().fold(0.0, f64::max);
        assert!(peak > 1e-4, "{peak}");
    }

    #[test]
    fn self_comparison_vanishes() {
        let cfg = solver2d::RunConfig::region_iv(law(), PrimitiveState::new(1.0, -0.5, 0.0), PrimitiveState::new(1.0, 0.5, 0.0), 60, 2, 0.3);
        let mut c = cfg.clone();
        c.output_times = vec![0.1, 0.2];
        let a = solver2d::run(&c).unwrap();
        let r = weak_strong_compare(&law(), &a.slices, &a.slices).unwrap();
        assert!(r.integral_alpha.iter().all(|&x| x == 0.0));
        assert_eq!(r.gronwall_c, 0.0);
        assert!(r.fan_sign_min > 0.0);
    }

    #[test]
    fn gronwall_fit_is_tight() {
        let t = [0.0, 0.1, 0.2, 0.3];
        let v: Vec<f64> = t.iter().map(|&s| 2.0 * (1.5f64 * s).exp()).collect();
        let (a, c) = gronwall_fit(&t, &v);
        assert!((a - 2.0).abs() < 1e-14 && (c - 1.5).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn alpha_nonnegative_and_convex(
            r in 0.2f64..4.0, a in -2.0f64..2.0, b in -2.0f64..2.0,
            rb in 0.2f64..4.0, ab in -2.0f64..2.0, bb in -2.0f64..2.0,
            r2 in 0.2f64..4.0, a2 in -2.0f64..2.0, b2 in -2.0f64..2.0,
        ) {
            let law = law();
            let (u, ub, u2) = (st(r, a, b), st(rb, ab, bb), st(r2, a2, b2));
            let al = alpha(&law, &u, &ub).unwrap();
            prop_assert!(al >= 0.0);
            let mid = ConservedState::new(0.5 * (u.rho + u2.rho), 0.5 * (u.p1 + u2.p1), 0.5 * (u.p2 + u2.p2));
            let lhs = alpha(&law, &mid, &ub).unwrap();
            let rhs = 0.5 * (al + alpha(&law, &u2, &ub).unwrap());
            prop_assert!(lhs <= rhs + 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn pressure_bregman_nonnegative(r in 0.01f64..10.0, rb in 0.01f64..10.0, g in 1.05f64..2.95) {
            let law = GasLaw::new(g, 0.7).unwrap();
            prop_assert!(pressure_bregman(&law, r, rb) >= -1e-12 * law.pressure(r.max(rb)));
        }

        #[test]
        fn entropy_symmetry_relation(r in 0.2f64..4.0, a in -2.0f64..2.0, b in -2.0f64..2.0) {
            // ∂q^i/∂U = ∇η · ∂F^i/∂U
            let law = law();
            let u = st(r, a, b).as_array();
            let g = law.eta_gradient(&ConservedState::from_array(u));
            for dir in 1..=2 {
                let jac = law.flux_jacobian(&ConservedState::from_array(u), dir);
                for k in 0..3 {
                    let h = 1e-5;
                    let (mut up, mut dn) = (u, u);
                    up[k] += h;
                    dn[k] -= h;
                    let fd = (law.q(&ConservedState::from_array(up))[dir - 1] - law.q(&ConservedState::from_array(dn))[dir - 1]) / (2.0 * h);
                    let ex: f64 = (0..3).map(|m| g[m] * jac[m][k]).sum();
                    prop_assert!((fd - ex).abs() < 1e-6 * (1.0 + ex.abs()));
                }
            }
        }
    }
}
