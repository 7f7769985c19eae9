//! Commutative limit `mu = 1`: the classical Hopf map, the projections as
//! matrix-valued functions on the sphere and the specializations of the
//! exact Chern computations.

use num_complex::Complex64;

use crate::algebra::{invariant_generators, Element, Mono};
use crate::chern::{asd_check, chern, s7_points, s7_values, tetrahedral, top_character, AsdReport};
use crate::fibration::{explicit_p1, explicit_p1_tilde, projection, projection_equivalence_check};
use crate::forms::{Calculus, ElementMatrix};
use crate::scalars::Scalar;
use crate::Result;

/// Tolerance of the pointwise comparisons.
pub const CLASSICAL_TOLERANCE: f64 = 1e-12;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `(alpha, beta, x)` with `alpha = 2(z1 zb3 + z2 zb4)`, `beta = 2(z2 z3 - z1 z4)`
/// and `x = |z1|^2 + |z2|^2 - |z3|^2 - |z4|^2`.
pub fn hopf_map(z: &[Complex64; 4]) -> (Complex64, Complex64, f64) {
    let alpha = (z[0] * z[2].conj() + z[1] * z[3].conj()) * 2.0;
    let beta = (z[1] * z[2] - z[0] * z[3]) * 2.0;
    let x = z[0].norm_sqr() + z[1].norm_sqr() - z[2].norm_sqr() - z[3].norm_sqr();
    (alpha, beta, x)
}

/// `psi_1 = (z1, -zb2, z3, -zb4)` and `psi_2 = (z2, zb1, z4, zb3)` at a point.
pub fn kets_at(z: &[Complex64; 4]) -> [[Complex64; 4]; 2] {
    [[z[0], -z[1].conj(), z[2], -z[3].conj()], [z[1], z[0].conj(), z[3], z[2].conj()]]
}

/// `|psi_1><psi_1| + |psi_2><psi_2|` at a point.
pub fn numeric_basic_projection(z: &[Complex64; 4]) -> Vec<Vec<Complex64>> {
    let kets = kets_at(z);
    (0..4).map(|i| (0..4).map(|j| kets.iter().map(|k| k[i] * k[j].conj()).sum()).collect()).collect()
}

fn mono_value(m: &Mono, vals: &[Complex64]) -> Complex64 {
    let mut v = c(1.0);
    for (g, x) in vals.iter().enumerate() {
        for _ in 0..m.0[g] {
            v *= x;
        }
    }
    v
}

/// Classical value of a four-sphere element at `(alpha, beta, x)`.
pub fn eval_s4_classical(e: &Element, alpha: Complex64, beta: Complex64, x: f64) -> Complex64 {
    let vals = [alpha, beta, alpha.conj(), beta.conj(), c(x)];
    e.terms.iter().map(|(m, s)| s.eval_at(c(1.0)) * mono_value(m, &vals)).sum()
}

fn matrix_at(p: &ElementMatrix, alpha: Complex64, beta: Complex64, x: f64) -> Vec<Vec<Complex64>> {
    (0..p.rows).map(|i| (0..p.cols).map(|j| eval_s4_classical(p.get(i, j), alpha, beta, x)).collect()).collect()
}

fn apply(m: &[Vec<Complex64>], v: &[Complex64]) -> Vec<Complex64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

fn tensor_power(v: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![c(1.0)];
    for _ in 0..n {
        out = out.iter().flat_map(|a| v.iter().map(move |b| a * b)).collect();
    }
    out
}

fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Numeric facts about `p_(n)` at one point: `|p^2 - p|`, `|p - p^*|`,
/// `|Tr p - (n+1)|` and `|p v - v|` for `v = psi_r^{(x) n}`.
pub fn projection_defects_at(n: usize, z: &[Complex64; 4]) -> Result<[f64; 4]> {
    let p = projection(n)?.matrix;
    let (alpha, beta, x) = hopf_map(z);
    let m = matrix_at(&p, alpha, beta, x);
    let size = m.len();
    let mut idem: f64 = 0.0;
    let mut adj: f64 = 0.0;
    let mut tr = c(0.0);
    for i in 0..size {
        tr += m[i][i];
        for j in 0..size {
            let sq: Complex64 = (0..size).map(|k| m[i][k] * m[k][j]).sum();
            idem = idem.max((sq - m[i][j]).norm());
            adj = adj.max((m[i][j] - m[j][i].conj()).norm());
        }
    }
    let mut fixed: f64 = 0.0;
    for k in kets_at(z) {
        let v = tensor_power(&k, n);
        fixed = fixed.max(max_diff(&apply(&m, &v), &v));
    }
    Ok([idem, adj, (tr - c(n as f64 + 1.0)).norm(), fixed])
}

#[derive(Clone, Debug)]
pub struct ClassicalReport {
    pub points: usize,
    pub seed: u64,
    /// `max |alpha|^2 + |beta|^2 + x^2 - 1`.
    pub hopf_on_sphere: f64,
    /// Exact invariants `alpha, beta, x` of the seven-sphere against the numeric Hopf map.
    pub invariants: f64,
    /// Exact `p_(1)` at the Hopf image against `sum |psi><psi|`.
    pub basic_projection: f64,
    /// Largest of the projection defects of `p_(n)` for `n = 1..=max_n`.
    pub projection_defects: f64,
    pub max_n: usize,
    /// `p = p~` once `mu = 1`.
    pub p_equals_p_tilde: bool,
    /// `ch_1(p_(n))` vanishes at `mu = 1` for `n <= max_n`.
    pub ch1_zero: bool,
    /// `ch_2(p_(n)) = c_n ch_2(p_(1))` in the commutative exterior calculus.
    pub exterior_proportional: bool,
    pub asd: AsdReport,
}

impl ClassicalReport {
    pub fn pass(&self) -> bool {
        self.hopf_on_sphere <= CLASSICAL_TOLERANCE
            && self.invariants <= CLASSICAL_TOLERANCE
            && self.basic_projection <= CLASSICAL_TOLERANCE
            && self.projection_defects <= CLASSICAL_TOLERANCE
            && self.p_equals_p_tilde
            && self.ch1_zero
            && self.exterior_proportional
            && self.asd.pass()
    }
}

/// Every classical regression at `points` seeded points, for `n <= max_n`.
pub fn classical_limit(points: usize, seed: u64, max_n: usize) -> Result<ClassicalReport> {
    let pts = s7_points(points, seed)?;
    let p1 = explicit_p1();
    let (ea, eb, ex) = invariant_generators();
    let mut on_sphere: f64 = 0.0;
    let mut invariants: f64 = 0.0;
    let mut basic: f64 = 0.0;
    let mut defects: f64 = 0.0;
    for z in &pts {
        let (alpha, beta, x) = hopf_map(z);
        on_sphere = on_sphere.max((alpha.norm_sqr() + beta.norm_sqr() + x * x - 1.0).abs());
        let vals = s7_values(z);
        let at = |e: &Element| crate::chern::eval_classical(e, &vals);
        invariants = invariants.max((at(&ea) - alpha).norm()).max((at(&eb) - beta).norm()).max((at(&ex) - x).norm());
        let exact = matrix_at(&p1, alpha, beta, x);
        let numeric = numeric_basic_projection(z);
        for i in 0..4 {
            basic = basic.max(max_diff(&exact[i], &numeric[i]));
        }
        for n in 1..=max_n {
            defects = defects.max(projection_defects_at(n, z)?.into_iter().fold(0.0, f64::max));
        }
    }
    let classical = |m: &ElementMatrix| m.map(|e| e.classical());
    let p_equals_p_tilde = classical(&explicit_p1()) == classical(&explicit_p1_tilde()) && projection_equivalence_check()?.classical_equal;
    let mut ch1_zero = true;
    for n in 1..=max_n {
        ch1_zero &= chern(1, n)?.form.classical().is_zero_mod_sphere()?;
    }
    let base = top_character(1, Calculus::Exterior)?.classical();
    let mut exterior_proportional = !base.is_zero_mod_sphere()?;
    for n in 2..=max_n {
        let t = top_character(n, Calculus::Exterior)?.classical();
        exterior_proportional &= t.eq_mod_sphere(&base.scale(&Scalar::int(tetrahedral(n))))?;
    }
    let asd = asd_check(points, seed, 0.0)?;
    Ok(ClassicalReport {
        points,
        seed,
        hopf_on_sphere: on_sphere,
        invariants,
        basic_projection: basic,
        projection_defects: defects,
        max_n,
        p_equals_p_tilde,
        ch1_zero,
        exterior_proportional,
        asd,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hopf_map_lands_on_sphere() {
        let z = [Complex64::new(0.5, 0.1), Complex64::new(-0.3, 0.4), Complex64::new(0.2, -0.5), Complex64::new(0.1, 0.0)];
        let n: f64 = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        let z = z.map(|v| v / n);
        let (a, b, x) = hopf_map(&z);
        assert!((a.norm_sqr() + b.norm_sqr() + x * x - 1.0).abs() < 1e-12);
    }

    #[test]
    fn basic_projection_defects() {
        for z in s7_points(3, 11).unwrap() {
            let d = projection_defects_at(1, &z).unwrap();
            assert!(d.iter().all(|v| *v < 1e-12), "{d:?}");
        }
    }
}
