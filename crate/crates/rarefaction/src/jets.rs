//! Truncated multivariate Taylor jets (up to three variables, total-degree truncation).
//!
//! Every coefficient is an array of `width` independent values, so one jet carries
//! a whole ϑ-grid of expansions at once; all arithmetic is elementwise across the width.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

/// Monomial table for jets in `nvars` variables truncated at total degree `degree`.
#[derive(Debug)]
pub struct Basis {
    pub nvars: usize,
    pub degree: usize,
    exps: Vec<[usize; 3]>,
    lookup: HashMap<[usize; 3], usize>,
    /// For each target monomial, all (i, j) with e_i + e_j = e_target.
    pairs: Vec<Vec<(usize, usize)>>,
}

impl Basis {
    pub fn new(nvars: usize, degree: usize) -> Arc<Self> {
        assert!((1..=3).contains(&nvars));
        let mut exps = Vec::new();
        for d in 0..=degree {
            // graded lexicographic, so every monomial follows all of lower degree
            for a in (0..=d).rev() {
                if nvars == 1 {
                    if a == d {
                        exps.push([a, 0, 0]);
                    }
                    continue;
                }
                for b in (0..=d - a).rev() {
                    let c = d - a - b;
                    if nvars == 2 && c != 0 {
                        continue;
                    }
                    exps.push([a, b, c]);
                }
            }
        }
        let lookup: HashMap<_, _> = exps.iter().enumerate().map(|(i, e)| (*e, i)).collect();
        let mut pairs = vec![Vec::new(); exps.len()];
        for (i, ei) in exps.iter().enumerate() {
            for (j, ej) in exps.iter().enumerate() {
                let e = [ei[0] + ej[0], ei[1] + ej[1], ei[2] + ej[2]];
                if let Some(&k) = lookup.get(&e) {
                    pairs[k].push((i, j));
                }
            }
        }
        Arc::new(Self { nvars, degree, exps, lookup, pairs })
    }

    pub fn len(&self) -> usize {
        self.exps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn index(&self, e: [usize; 3]) -> Option<usize> {
        self.lookup.get(&e).copied()
    }

    pub fn exponent(&self, m: usize) -> [usize; 3] {
        self.exps[m]
    }
}

#[derive(Debug, Clone)]
pub struct Jet {
    pub basis: Arc<Basis>,
    pub width: usize,
    /// Coefficient of monomial m at lane k is `c[m * width + k]`.
    pub c: Vec<f64>,
}

impl Jet {
    pub fn zeros(basis: &Arc<Basis>, width: usize) -> Self {
        Self { basis: basis.clone(), width, c: vec![0.0; basis.len() * width] }
    }

    pub fn constant(basis: &Arc<Basis>, values: &[f64]) -> Self {
        let mut j = Self::zeros(basis, values.len());
        j.c[..values.len()].copy_from_slice(values);
        j
    }

    pub fn splat(basis: &Arc<Basis>, width: usize, value: f64) -> Self {
        Self::constant(basis, &vec![value; width])
    }

    /// The jet of `center + x_v`.
    pub fn variable(basis: &Arc<Basis>, v: usize, center: &[f64]) -> Self {
        let mut j = Self::constant(basis, center);
        let mut e = [0; 3];
        e[v] = 1;
        if let Some(m) = basis.index(e) {
            for k in 0..j.width {
                j.c[m * j.width + k] = 1.0;
            }
        }
        j
    }

    pub fn coef(&self, m: usize) -> &[f64] {
        &self.c[m * self.width..(m + 1) * self.width]
    }

    pub fn coef_mut(&mut self, m: usize) -> &mut [f64] {
        let w = self.width;
        &mut self.c[m * w..(m + 1) * w]
    }

    /// Coefficient array for an exponent (zeros if it is beyond the truncation).
    pub fn get(&self, e: [usize; 3]) -> Vec<f64> {
        match self.basis.index(e) {
            Some(m) => self.coef(m).to_vec(),
            None => vec![0.0; self.width],
        }
    }

    pub fn set(&mut self, e: [usize; 3], values: &[f64]) {
        let m = self.basis.index(e).expect("exponent beyond truncation");
        self.coef_mut(m).copy_from_slice(values);
    }

    pub fn value(&self) -> &[f64] {
        self.coef(0)
    }

    fn zip(&self, o: &Jet, f: impl Fn(f64, f64) -> f64) -> Jet {
        debug_assert!(Arc::ptr_eq(&self.basis, &o.basis) && self.width == o.width);
        Jet { basis: self.basis.clone(), width: self.width, c: self.c.iter().zip(&o.c).map(|(a, b)| f(*a, *b)).collect() }
    }

    pub fn scale(&self, s: f64) -> Jet {
        Jet { c: self.c.iter().map(|a| a * s).collect(), ..self.clone() }
    }

    /// Multiply lane k by `s[k]`.
    pub fn scale_lanes(&self, s: &[f64]) -> Jet {
        let w = self.width;
        Jet { c: self.c.iter().enumerate().map(|(i, a)| a * s[i % w]).collect(), ..self.clone() }
    }

    pub fn add_const(&self, s: f64) -> Jet {
        let mut j = self.clone();
        for k in 0..self.width {
            j.c[k] += s;
        }
        j
    }

    pub fn mul(&self, o: &Jet) -> Jet {
        let w = self.width;
        let mut out = Jet::zeros(&self.basis, w);
        for (m, pl) in self.basis.pairs.iter().enumerate() {
            let dst = &mut out.c[m * w..(m + 1) * w];
            for &(i, j) in pl {
                let a = &self.c[i * w..(i + 1) * w];
                let b = &o.c[j * w..(j + 1) * w];
                for k in 0..w {
                    dst[k] += a[k] * b[k];
                }
            }
        }
        out
    }

    pub fn recip(&self) -> Jet {
        let w = self.width;
        let mut r = Jet::zeros(&self.basis, w);
        let r0: Vec<f64> = self.value().iter().map(|a| 1.0 / a).collect();
        r.c[..w].copy_from_slice(&r0);
        for m in 1..self.basis.len() {
            let mut acc = vec![0.0; w];
            for &(i, j) in &self.basis.pairs[m] {
                if i == 0 {
                    continue;
                }
                for k in 0..w {
                    acc[k] += self.c[i * w + k] * r.c[j * w + k];
                }
            }
            for k in 0..w {
                r.c[m * w + k] = -r0[k] * acc[k];
            }
        }
        r
    }

    pub fn div(&self, o: &Jet) -> Jet {
        self.mul(&o.recip())
    }

    pub fn sqrt(&self) -> Jet {
        let w = self.width;
        let mut s = Jet::zeros(&self.basis, w);
        let s0: Vec<f64> = self.value().iter().map(|a| a.sqrt()).collect();
        s.c[..w].copy_from_slice(&s0);
        for m in 1..self.basis.len() {
            let mut acc: Vec<f64> = self.coef(m).to_vec();
            for &(i, j) in &self.basis.pairs[m] {
                if i == 0 || j == 0 {
                    continue;
                }
                for k in 0..w {
                    acc[k] -= s.c[i * w + k] * s.c[j * w + k];
                }
            }
            for k in 0..w {
                s.c[m * w + k] = acc[k] / (2.0 * s0[k]);
            }
        }
        s
    }

    /// ∂/∂x_v (the top-degree coefficients are lost).
    pub fn deriv(&self, v: usize) -> Jet {
        let w = self.width;
        let mut out = Jet::zeros(&self.basis, w);
        for m in 0..self.basis.len() {
            let e = self.basis.exps[m];
            if e[v] == 0 {
                continue;
            }
            let mut t = e;
            t[v] -= 1;
            let dst = self.basis.index(t).unwrap();
            let f = e[v] as f64;
            for k in 0..w {
                out.c[dst * w + k] = f * self.c[m * w + k];
            }
        }
        out
    }

    /// Apply a linear map to every coefficient array (e.g. spectral ϑ-differentiation).
    pub fn map_lanes(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> Jet {
        let w = self.width;
        let mut out = Jet::zeros(&self.basis, w);
        for m in 0..self.basis.len() {
            out.c[m * w..(m + 1) * w].copy_from_slice(&f(self.coef(m)));
        }
        out
    }

    /// Polynomial value at displacement `h` from the expansion point, per lane.
    pub fn eval(&self, h: &[f64]) -> Vec<f64> {
        let w = self.width;
        let mut out = vec![0.0; w];
        for m in 0..self.basis.len() {
            let e = self.basis.exps[m];
            let mut p = 1.0;
            for v in 0..self.basis.nvars {
                p *= h[v].powi(e[v] as i32);
            }
            for k in 0..w {
                out[k] += p * self.c[m * w + k];
            }
        }
        out
    }

    /// Substitute jets (in another basis, same width) for the variables. Exact for the
    /// truncated polynomial, so this also re-expands about a shifted point.
    pub fn compose(&self, args: &[Jet]) -> Jet {
        Jet::compose_many(&[self], args).pop().unwrap()
    }

    /// [`Jet::compose`] for several jets on the same basis, sharing the monomial products.
    pub fn compose_many(jets: &[&Jet], args: &[Jet]) -> Vec<Jet> {
        let src = &jets[0].basis;
        let target = &args[0].basis;
        let w = jets[0].width;
        let d = src.degree;
        let powers: Vec<Vec<Jet>> = args
            .iter()
            .take(src.nvars)
            .map(|a| {
                let mut p = vec![Jet::splat(target, w, 1.0)];
                for n in 1..=d {
                    p.push(p[n - 1].mul(a));
                }
                p
            })
            .collect();
        let mut tail: HashMap<(usize, usize), Jet> = HashMap::new();
        let mut outs: Vec<Jet> = jets.iter().map(|_| Jet::zeros(target, w)).collect();
        for m in 0..src.len() {
            let e = src.exps[m];
            if jets.iter().all(|j| j.coef(m).iter().all(|x| *x == 0.0)) {
                continue;
            }
            let term = match src.nvars {
                1 => powers[0][e[0]].clone(),
                2 => powers[0][e[0]].mul(&powers[1][e[1]]),
                _ => {
                    let t = tail.entry((e[1], e[2])).or_insert_with(|| powers[1][e[1]].mul(&powers[2][e[2]]));
                    powers[0][e[0]].mul(t)
                }
            };
            for (o, j) in outs.iter_mut().zip(jets) {
                let coef = j.coef(m);
                for (i, x) in o.c.iter_mut().enumerate() {
                    *x += coef[i % w] * term.c[i];
                }
            }
        }
        outs
    }

    /// Antiderivative in variable v with zero constant (univariate use: Picard iteration).
    pub fn integrate(&self, v: usize) -> Jet {
        let w = self.width;
        let mut out = Jet::zeros(&self.basis, w);
        for m in 0..self.basis.len() {
            let mut e = self.basis.exps[m];
            e[v] += 1;
            if let Some(dst) = self.basis.index(e) {
                let f = 1.0 / e[v] as f64;
                for k in 0..w {
                    out.c[dst * w + k] = f * self.c[m * w + k];
                }
            }
        }
        out
    }

    /// Re-embed into a basis with more variables (coefficients keep their exponents).
    pub fn lift(&self, basis: &Arc<Basis>) -> Jet {
        let w = self.width;
        let mut out = Jet::zeros(basis, w);
        for m in 0..self.basis.len() {
            if let Some(dst) = basis.index(self.basis.exps[m]) {
                out.c[dst * w..(dst + 1) * w].copy_from_slice(self.coef(m));
            }
        }
        out
    }

    pub fn max_abs(&self) -> f64 {
        self.c.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a + b)
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, o: &Jet) -> Jet {
        self.zip(o, |a, b| a - b)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, o: &Jet) -> Jet {
        Jet::mul(self, o)
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, s: f64) -> Jet {
        self.scale(s)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

/// n! as f64.
pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(Basis::new(1, 5).len(), 6);
        assert_eq!(Basis::new(2, 4).len(), 15);
        assert_eq!(Basis::new(3, 10).len(), 286);
    }

    #[test]
    fn univariate_exp_log_identities() {
        let b = Basis::new(1, 8);
        let x = Jet::variable(&b, 0, &[0.3]);
        // 1/(1 − x) about 0.3: coefficients 1/(0.7)^{n+1}
        let r = x.scale(-1.0).add_const(1.0).recip();
        for n in 0..=8 {
            assert!(close(r.get([n, 0, 0])[0], 0.7f64.powi(-(n as i32) - 1), 1e-12));
        }
        // sqrt(x)^2 = x
        let s = x.sqrt();
        let back = s.mul(&s);
        assert!((&back - &x).max_abs() < 1e-14);
    }

    #[test]
    fn bivariate_product_and_derivative() {
        let b = Basis::new(2, 4);
        let x = Jet::variable(&b, 0, &[1.0, 2.0]);
        let y = Jet::variable(&b, 1, &[0.0, -1.0]);
        let p = x.mul(&y).mul(&y);
        // ∂_y (x y²) = 2 x y
        let d = p.deriv(1);
        let want = x.mul(&y).scale(2.0);
        for m in 0..b.len() {
            if b.exponent(m).iter().sum::<usize>() < 4 {
                for k in 0..2 {
                    assert!((d.coef(m)[k] - want.coef(m)[k]).abs() < 1e-14);
                }
            }
        }
        let v = p.eval(&[0.1, 0.2]);
        assert!(close(v[0], 1.1 * 0.04, 1e-14) && close(v[1], 2.1 * 0.64, 1e-14));
    }

    #[test]
    fn compose_reexpands_polynomials() {
        let b3 = Basis::new(3, 4);
        let x = Jet::variable(&b3, 0, &[0.0]);
        let y = Jet::variable(&b3, 1, &[0.0]);
        let z = Jet::variable(&b3, 2, &[0.0]);
        let f = &(&x.mul(&y) + &z.mul(&z).mul(&x)) + &y.mul(&y).mul(&y).mul(&y);
        let b1 = Basis::new(1, 4);
        let t = Jet::variable(&b1, 0, &[0.5]);
        let g = f.compose(&[t.clone(), t.scale(2.0), t.add_const(1.0)]);
        for &s in &[-0.2f64, 0.1, 0.3] {
            let tt = 0.5 + s;
            let exact = tt * 2.0 * tt + (tt + 1.0).powi(2) * tt + (2.0 * tt).powi(4);
            let got = g.eval(&[s])[0];
            // f has degree 4 so the composition is exact only to degree 4 in s
            assert!((got - exact).abs() < 20.0 * s.abs().powi(5) + 1e-12, "{got} vs {exact}");
        }
    }

    proptest! {
        #[test]
        fn reciprocal_inverts(a0 in 0.5f64..2.0, a1 in -1.0f64..1.0, a2 in -1.0f64..1.0) {
            let b = Basis::new(2, 5);
            let x = Jet::variable(&b, 0, &[0.0]);
            let y = Jet::variable(&b, 1, &[0.0]);
            let f = (&x.scale(a1) + &y.mul(&y).scale(a2)).add_const(a0);
            let one = f.mul(&f.recip());
            prop_assert!((one.value()[0] - 1.0).abs() < 1e-13);
            for m in 1..b.len() {
                prop_assert!(one.coef(m)[0].abs() < 1e-11);
            }
        }
    }
}
