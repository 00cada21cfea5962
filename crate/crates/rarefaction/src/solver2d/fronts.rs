//! Locating the four rarefaction fronts C̄₀, H̄, H, C₀ in solver output.
//!
//! Inside each fan the varying invariant is affine in x1, so the 10% and 90%
//! crossings of the normalised jump are extrapolated linearly (by 1/8 of their
//! separation on each side) to the 0% and 100% edges. This removes most of the
//! O(√(Δx t)) smearing that a plain threshold would carry.

use serde::{Deserialize, Serialize};

use super::Field2D;
use crate::error::{Error, Result};
use crate::gas_model::GasLaw;

pub const LOW: f64 = 0.1;
pub const HIGH: f64 = 0.9;

/// Front positions per x2 row at one time: `[C̄₀, H̄, H, C₀]`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontSlice {
    pub t: f64,
    pub rows: Vec<[f64; 4]>,
    /// False if some row had no clean crossing or the fronts were out of order.
    pub separated: bool,
}

impl FrontSlice {
    pub fn mean(&self) -> [f64; 4] {
        let n = self.rows.len() as f64;
        let mut m = [0.0; 4];
        for r in &self.rows {
            for k in 0..4 {
                m[k] += r[k] / n;
            }
        }
        m
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontSet {
    pub slices: Vec<FrontSlice>,
    /// Every front moves monotonically away from x1 = 0 in every row.
    pub monotone: bool,
}

impl FrontSet {
    /// CSV with columns t,row,cbar0,hbar,h,c0.
    pub fn to_csv(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::from("t,row,cbar0,hbar,h,c0\n");
        for sl in &self.slices {
            for (j, r) in sl.rows.iter().enumerate() {
                let _ = writeln!(s, "{},{},{},{},{},{}", sl.t, j, r[0], r[1], r[2], r[3]);
            }
        }
        s
    }
}

/// First position (scanning in the given direction) where the normalised profile crosses `level`.
fn crossing(x: &[f64], y: &[f64], level: f64, from_left: bool) -> Option<f64> {
    let n = x.len();
    let idx: Vec<usize> = if from_left { (0..n - 1).collect() } else { (0..n - 1).rev().collect() };
    for i in idx {
        let (a, b) = (y[i] - level, y[i + 1] - level);
        if a == 0.0 {
            return Some(x[i]);
        }
        if a * b < 0.0 || b == 0.0 {
            return Some(x[i] + (x[i + 1] - x[i]) * a / (a - b));
        }
    }
    None
}

fn fan_edges(x: &[f64], y: &[f64]) -> Option<(f64, f64)> {
    let lo = crossing(x, y, LOW, true)?;
    let hi = crossing(x, y, HIGH, false)?;
    let ext = (hi - lo) * LOW / (HIGH - LOW);
    Some((lo - ext, hi + ext))
}

/// Fronts of one slice; the side states are read off the two x1-boundary cells of each row.
pub fn fronts_of(law: &GasLaw, f: &Field2D) -> Result<FrontSlice> {
    let g = f.grid;
    let x: Vec<f64> = (0..g.nx1).map(|i| g.x1(i)).collect();
    let mut rows = Vec::with_capacity(g.nx2);
    let mut separated = true;
    for j in 0..g.nx2 {
        let inv = (0..g.nx1)
            .map(|i| law.to_invariants(&f.primitive(i, j)))
            .collect::<Result<Vec<_>>>()?;
        let (l, r) = (inv[0], inv[g.nx1 - 1]);
        let (dw, dwb) = (r.w - l.w, r.wbar - l.wbar);
        if dw.abs() < 1e-14 || dwb.abs() < 1e-14 {
            return Err(Error::Invalid("no jump in the Riemann invariants; nothing to locate".into()));
        }
        let yw: Vec<f64> = inv.iter().map(|s| (s.w - l.w) / dw).collect();
        let ywb: Vec<f64> = inv.iter().map(|s| (s.wbar - l.wbar) / dwb).collect();
        match (fan_edges(&x, &yw), fan_edges(&x, &ywb)) {
            (Some(b), Some(fr)) => {
                let row = [b.0, b.1, fr.0, fr.1];
                if !(row[0] <= row[1] && row[1] <= row[2] && row[2] <= row[3]) {
                    separated = false;
                }
                rows.push(row);
            }
            _ => {
                separated = false;
                rows.push([f64::NAN; 4]);
            }
        }
    }
    Ok(FrontSlice { t: f.t, rows, separated })
}

/// Fronts of every slice of a run (the t = 0 slice included).
pub fn extract_fronts(law: &GasLaw, history: &[Field2D]) -> Result<FrontSet> {
    if history.len() < 2 {
        return Err(Error::Invalid("front extraction needs at least two slices".into()));
    }
    let slices = history.iter().map(|f| fronts_of(law, f)).collect::<Result<Vec<_>>>()?;
    let mut monotone = true;
    for w in slices.windows(2) {
        for (a, b) in w[0].rows.iter().zip(&w[1].rows) {
            // back fronts move left, front fronts move right (all four, in region IV)
            if !(b[0] <= a[0] + 1e-12 && b[3] >= a[3] - 1e-12) {
                monotone = false;
            }
        }
    }
    Ok(FrontSet { slices, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gas_model::PrimitiveState;
    use crate::riemann1d;
    use crate::solver2d::{run, RunConfig};

    #[test]
    fn crossing_interpolates_linearly() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [0.0, 0.0, 1.0, 1.0];
        assert!((crossing(&x, &y, 0.25, true).unwrap() - 1.25).abs() < 1e-15);
        assert!((crossing(&x, &y, 0.75, false).unwrap() - 1.75).abs() < 1e-15);
        let (a, b) = fan_edges(&x, &y).unwrap();
        assert!((a - 1.0).abs() < 1e-14 && (b - 2.0).abs() < 1e-14);
    }

    #[test]
    fn unperturbed_fronts_follow_the_fan() {
        let law = GasLaw::standard();
        let (l, r) = (PrimitiveState::new(1.0, -0.5, 0.0), PrimitiveState::new(1.0, 0.5, 0.0));
        let mut cfg = RunConfig::region_iv(law, l, r, 200, 1, 0.5);
        // first-order smearing at the fan edges grows like √(Δx t); MUSCL keeps it O(Δx)
        cfg.order = crate::solver2d::SchemeOrder::Second;
        cfg.output_times = vec![0.1, 0.25];
        let a = run(&cfg).unwrap();
        let fs = extract_fronts(&law, &a.slices).unwrap();
        assert!(fs.monotone);
        let exact = riemann1d::solve(&law, &l, &r).unwrap().speeds();
        let last = fs.slices.last().unwrap();
        assert!(last.separated);
        let dx = a.slices[0].grid.dx1;
        let m = last.mean();
        for k in 0..4 {
            assert!((m[k] / last.t - exact[k]).abs() <= 2.0 * dx / last.t, "front {k}: {} vs {}", m[k] / last.t, exact[k]);
        }
    }
}
