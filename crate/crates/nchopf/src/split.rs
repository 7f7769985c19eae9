//! Splitting homomorphism and pointwise numerical evaluation.
//!
//! A generator `g` is sent to `zeta_g (x) U_g`, where `zeta_g` is a classical
//! coordinate function and `U_g` a word `u^a v^b` in the unitaries of a
//! noncommutative torus. Words are kept exactly as exponent vectors; only
//! the classical leg and the phase `mu` are evaluated numerically.
//!
//! Forms are evaluated in an orthonormal tangent frame at a point: a
//! `p`-form becomes an antisymmetric array stored by subsets of frame
//! indices, one array per torus word.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::algebra::{Element, Mono, Pres, Presentation};
use crate::forms::{Calculus, Form};
use crate::{Error, Result};

/// Maximal rank of the splitting torus.
pub const MAXT: usize = 6;

/// Exponent vector of a torus word `u_1^{a_1} ... u_r^{a_r}` in normal order.
pub type TorusWord = [i32; MAXT];

/// Generic deformation parameter used by the numeric oracles.
pub const GENERIC_THETA: f64 = 0.318_309_886_183_790_7;

/// `mu = exp(i pi theta)`.
pub fn mu_at(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, PI * theta)
}

fn word_of_degree(pres: Pres, d: &[i32]) -> TorusWord {
    let mut w = [0; MAXT];
    for (i, row) in pres.word_map.iter().enumerate() {
        w[i] = row.iter().zip(d).map(|(a, b)| a * b).sum();
    }
    w
}

/// Torus word of a generator.
pub fn generator_word(pres: Pres, g: usize) -> TorusWord {
    word_of_degree(pres, &pres.gens[g].degree)
}

/// Phase exponent of `W1 W2 = mu^k (W1 W2 in normal order)`.
pub fn word_cocycle(pres: Pres, a: &TorusWord, b: &TorusWord) -> i32 {
    let r = pres.word_q.len();
    let mut k = 0;
    for g in 1..r {
        for h in 0..g {
            k += a[g] * b[h] * pres.word_q[g][h];
        }
    }
    k
}

fn word_add(a: &TorusWord, b: &TorusWord) -> TorusWord {
    let mut w = *a;
    for i in 0..MAXT {
        w[i] += b[i];
    }
    w
}

/// Phase of the image of a generator: an antiholomorphic generator maps to
/// `W(t)^* = mu^k W(-t)` where `W(t)` is the image of its adjoint.
pub fn generator_phase(pres: Pres, g: usize) -> i32 {
    if pres.gens[g].kind != crate::algebra::GenKind::Antiholomorphic {
        return 0;
    }
    let t = generator_word(pres, pres.gens[g].conj);
    -word_cocycle(pres, &t.map(|x| -x), &t)
}

/// Split of a normal monomial: `N(e) -> mu^k zeta^e (x) W`.
pub fn split_mono(pres: Pres, m: &Mono) -> (i32, TorusWord) {
    let mut acc = [0; MAXT];
    let mut k = 0;
    for g in 0..pres.ngens() {
        let e = m.0[g] as i32;
        if e == 0 {
            continue;
        }
        let t = generator_word(pres, g);
        let w = t.map(|x| x * e);
        k += generator_phase(pres, g) * e;
        k += word_cocycle(pres, &t, &t) * e * (e - 1) / 2;
        k += word_cocycle(pres, &acc, &w);
        acc = word_add(&acc, &w);
    }
    (k, acc)
}

/// Symbolic split of an element: torus word to list of
/// `(scalar, classical monomial)` pairs.
pub fn split(e: &Element) -> BTreeMap<TorusWord, Vec<(crate::scalars::Scalar, Mono)>> {
    let mut out: BTreeMap<TorusWord, Vec<(crate::scalars::Scalar, Mono)>> = BTreeMap::new();
    for (m, c) in &e.terms {
        let (k, w) = split_mono(e.pres, m);
        out.entry(w).or_default().push((c.shift(k), *m));
    }
    out
}

/// Render a torus word as `u^a*v^b`.
pub fn render_word(pres: Pres, w: &TorusWord) -> String {
    let names = ["u", "v", "u3", "u4", "u5", "u6"];
    let r = pres.word_q.len();
    let parts: Vec<String> = (0..r)
        .filter(|&i| w[i] != 0)
        .map(|i| if w[i] == 1 { names[i].to_string() } else { format!("{}^{}", names[i], w[i]) })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("*")
    }
}

/// Classical coordinate data: each generator is a complex-linear function of
/// real ambient coordinates.
#[derive(Clone, Debug)]
pub struct Coordinates {
    pub dim: usize,
    pub on_sphere: bool,
    /// Coefficients of each generator on the ambient coordinates.
    pub gen_coeffs: Vec<Vec<Complex64>>,
}

/// Coordinate model for a presentation.
pub fn coordinates(pres: Pres) -> Result<Coordinates> {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let n = pres.ngens();
    let name = pres.name.trim_end_matches("~free");
    if name == "t2" {
        return Err(Error::Unsupported(pres.name.clone()));
    }
    let npairs = pres.gens.iter().filter(|g| g.kind == crate::algebra::GenKind::Holomorphic).count();
    let central: Vec<usize> = (0..n).filter(|&g| pres.gens[g].kind == crate::algebra::GenKind::Central).collect();
    let dim = 2 * npairs + central.len();
    let mut gen_coeffs = vec![vec![Complex64::new(0.0, 0.0); dim]; n];
    for g in 0..n {
        let gen = &pres.gens[g];
        match gen.kind {
            crate::algebra::GenKind::Holomorphic => {
                gen_coeffs[g][2 * g] = one;
                gen_coeffs[g][2 * g + 1] = i;
            }
            crate::algebra::GenKind::Antiholomorphic => {
                let h = gen.conj;
                gen_coeffs[g][2 * h] = one;
                gen_coeffs[g][2 * h + 1] = -i;
            }
            crate::algebra::GenKind::Central => {
                let idx = central.iter().position(|&c| c == g).unwrap();
                gen_coeffs[g][2 * npairs + idx] = one;
            }
        }
    }
    let on_sphere = !matches!(pres.sphere, crate::algebra::SphereKind::None) || name == "s7" || name == "s4" || name == "su2";
    Ok(Coordinates { dim, on_sphere, gen_coeffs })
}

/// A point with an orthonormal tangent frame.
#[derive(Clone, Debug)]
pub struct FramedPoint {
    pub point: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn det(m: &[Vec<f64>]) -> f64 {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut d = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap()).unwrap();
        if a[p][c].abs() < 1e-300 {
            return 0.0;
        }
        if p != c {
            a.swap(p, c);
            d = -d;
        }
        d *= a[c][c];
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            for k in c..n {
                a[r][k] -= f * a[c][k];
            }
        }
    }
    d
}

/// Orientation sign: frames at `p` satisfy `det[p, e_1, ..., e_k] = ORIENTATION`.
pub const ORIENTATION: f64 = -1.0;

impl FramedPoint {
    /// Build an oriented orthonormal frame at `point`. On a sphere the frame
    /// spans the tangent space; otherwise it is the standard basis.
    pub fn new(point: Vec<f64>, on_sphere: bool) -> Result<FramedPoint> {
        let dim = point.len();
        if !on_sphere {
            let frame = (0..dim).map(|i| (0..dim).map(|j| (i == j) as u8 as f64).collect()).collect();
            return Ok(FramedPoint { point, frame });
        }
        let norm = dot(&point, &point).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::OffSphere((norm - 1.0).abs()));
        }
        let mut frame: Vec<Vec<f64>> = Vec::new();
        let mut basis: Vec<Vec<f64>> = vec![point.clone()];
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| point[a].abs().partial_cmp(&point[b].abs()).unwrap());
        for &k in &order {
            let mut v: Vec<f64> = (0..dim).map(|j| (j == k) as u8 as f64).collect();
            for _ in 0..2 {
                for b in &basis {
                    let c = dot(&v, b);
                    for j in 0..dim {
                        v[j] -= c * b[j];
                    }
                }
            }
            let nv = dot(&v, &v).sqrt();
            if nv > 1e-6 {
                for x in v.iter_mut() {
                    *x /= nv;
                }
                basis.push(v.clone());
                frame.push(v);
            }
            if frame.len() == dim - 1 {
                break;
            }
        }
        let mut m = vec![point.clone()];
        m.extend(frame.iter().cloned());
        if det(&m) * ORIENTATION < 0.0 {
            let last = frame.len() - 1;
            for x in frame[last].iter_mut() {
                *x = -*x;
            }
        }
        Ok(FramedPoint { point, frame })
    }

    /// Largest deviation from orthonormality, tangency and unit norm.
    pub fn defect(&self) -> f64 {
        let mut e = (dot(&self.point, &self.point).sqrt() - 1.0).abs();
        for (i, a) in self.frame.iter().enumerate() {
            e = e.max(dot(a, &self.point).abs());
            for (j, b) in self.frame.iter().enumerate() {
                let t = if i == j { 1.0 } else { 0.0 };
                e = e.max((dot(a, b) - t).abs());
            }
        }
        e
    }
}

/// Seeded uniform point on the unit sphere of dimension `dim - 1`.
pub fn random_sphere_point<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = dot(&v, &v).sqrt();
        if n > 1e-6 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// Values of classical generator functions at a point.
pub fn generator_values(coords: &Coordinates, point: &[f64]) -> Vec<Complex64> {
    coords.gen_coeffs.iter().map(|c| c.iter().zip(point).map(|(a, x)| a * x).sum()).collect()
}

fn mono_value(vals: &[Complex64], m: &Mono) -> Complex64 {
    let mut v = Complex64::new(1.0, 0.0);
    for (g, val) in vals.iter().enumerate() {
        for _ in 0..m.0[g] {
            v *= val;
        }
    }
    v
}

/// Evaluation of an element at a point: torus word to complex coefficient.
pub fn eval_element(e: &Element, point: &[f64], theta: f64) -> Result<BTreeMap<TorusWord, Complex64>> {
    let coords = coordinates(e.pres)?;
    if point.len() != coords.dim {
        return Err(Error::Shape(format!("point of dimension {} for {}", point.len(), coords.dim)));
    }
    let vals = generator_values(&coords, point);
    let mu = mu_at(theta);
    let mut out: BTreeMap<TorusWord, Complex64> = BTreeMap::new();
    for (m, c) in &e.terms {
        let (k, w) = split_mono(e.pres, m);
        *out.entry(w).or_insert(Complex64::new(0.0, 0.0)) += c.eval_at(mu) * mu.powi(k) * mono_value(&vals, m);
    }
    Ok(out)
}

/// True when some torus-word coefficient of `e` is visibly nonzero at one of
/// `tries` seeded random points at a generic deformation parameter.
pub fn numerically_nonzero(e: &Element, seed: u64, tries: usize) -> Result<bool> {
    let coords = coordinates(e.pres)?;
    let mut rng = crate::rng::seeded(seed, 11);
    for _ in 0..tries {
        let p = if coords.on_sphere {
            random_sphere_point(&mut rng, coords.dim)
        } else {
            (0..coords.dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        };
        let v = eval_element(e, &p, GENERIC_THETA)?;
        let scale: f64 = e.terms.values().map(|c| c.eval(GENERIC_THETA).norm()).sum::<f64>().max(1.0);
        if v.values().any(|x| x.norm() > 1e-9 * scale) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Dense complex matrix of small size.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    pub n: usize,
    pub a: Vec<Complex64>,
}

impl CMatrix {
    pub fn zero(n: usize) -> CMatrix {
        CMatrix { n, a: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> CMatrix {
        let mut m = CMatrix::zero(n);
        for i in 0..n {
            m.a[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn mul(&self, o: &CMatrix) -> CMatrix {
        let n = self.n;
        let mut m = CMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let x = self.a[i * n + k];
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    m.a[i * n + j] += x * o.a[k * n + j];
                }
            }
        }
        m
    }

    pub fn add_scaled(&mut self, o: &CMatrix, s: Complex64) {
        for (x, y) in self.a.iter_mut().zip(&o.a) {
            *x += s * y;
        }
    }

    pub fn max_abs_diff(&self, o: &CMatrix) -> f64 {
        self.a.iter().zip(&o.a).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn pow_signed(base: &CMatrix, inv: &CMatrix, e: i32) -> CMatrix {
        let b = if e >= 0 { base } else { inv };
        let mut m = CMatrix::identity(base.n);
        for _ in 0..e.unsigned_abs() {
            m = m.mul(b);
        }
        m
    }
}

/// Clock and shift unitaries `C S = mu S C` for `mu = exp(i pi / 3)`, i.e.
/// deformation parameter `1/3`.
pub fn clock_shift() -> (CMatrix, CMatrix, f64) {
    let n = 6;
    let mu = mu_at(1.0 / 3.0);
    let mut c = CMatrix::zero(n);
    let mut s = CMatrix::zero(n);
    for k in 0..n {
        c.a[k * n + k] = mu.powi(k as i32);
        s.a[((k + 1) % n) * n + k] = Complex64::new(1.0, 0.0);
    }
    (c, s, 1.0 / 3.0)
}

fn conj_transpose(m: &CMatrix) -> CMatrix {
    let n = m.n;
    let mut t = CMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            t.a[j * n + i] = m.a[i * n + j].conj();
        }
    }
    t
}

/// Represent an element at a classical point using clock and shift matrices
/// for the torus leg (only for splitting tori of rank two).
pub fn eval_clock_shift(e: &Element, point: &[f64]) -> Result<CMatrix> {
    if e.pres.word_q.len() != 2 {
        return Err(Error::Unsupported(e.pres.name.clone()));
    }
    let (c, s, theta) = clock_shift();
    let (ci, si) = (conj_transpose(&c), conj_transpose(&s));
    let vals = eval_element(e, point, theta)?;
    let mut out = CMatrix::zero(6);
    for (w, v) in vals {
        let m = CMatrix::pow_signed(&c, &ci, w[0]).mul(&CMatrix::pow_signed(&s, &si, w[1]));
        out.add_scaled(&m, v);
    }
    Ok(out)
}

/// Evaluated form: per torus word, components indexed by subsets (bit masks)
/// of frame directions.
#[derive(Clone, Debug, Default)]
pub struct PointEvaluation {
    pub dim: usize,
    pub words: BTreeMap<TorusWord, Vec<Complex64>>,
}

fn wedge_sign(a: u32, b: u32) -> f64 {
    let mut s = 0;
    for i in 0..32 {
        if b >> i & 1 == 1 {
            s += (a >> (i + 1)).count_ones();
        }
    }
    if s % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

impl PointEvaluation {
    fn zero(dim: usize) -> Vec<Complex64> {
        vec![Complex64::new(0.0, 0.0); 1 << dim]
    }

    /// Largest component modulus.
    pub fn max_abs(&self) -> f64 {
        self.words.values().flat_map(|v| v.iter().map(|x| x.norm())).fold(0.0, f64::max)
    }

    pub fn add(&self, o: &PointEvaluation) -> PointEvaluation {
        let mut out = self.clone();
        for (w, v) in &o.words {
            let e = out.words.entry(*w).or_insert_with(|| PointEvaluation::zero(o.dim));
            for (x, y) in e.iter_mut().zip(v) {
                *x += y;
            }
        }
        out.dim = o.dim.max(self.dim);
        out
    }

    pub fn scale(&self, s: Complex64) -> PointEvaluation {
        PointEvaluation { dim: self.dim, words: self.words.iter().map(|(w, v)| (*w, v.iter().map(|x| x * s).collect())).collect() }
    }

    /// Hodge star in the oriented orthonormal frame, per torus word.
    pub fn hodge(&self) -> PointEvaluation {
        let full = (1u32 << self.dim) - 1;
        let mut out = PointEvaluation { dim: self.dim, words: BTreeMap::new() };
        for (w, v) in &self.words {
            let mut r = PointEvaluation::zero(self.dim);
            for (s, x) in v.iter().enumerate() {
                let s = s as u32;
                let c = full ^ s;
                r[c as usize] += x * wedge_sign(s, c);
            }
            out.words.insert(*w, r);
        }
        out
    }

    /// Wedge product with torus-word phases.
    pub fn wedge(&self, o: &PointEvaluation, pres: Pres, mu: Complex64) -> PointEvaluation {
        let mut out = PointEvaluation { dim: self.dim, words: BTreeMap::new() };
        for (w1, v1) in &self.words {
            for (w2, v2) in &o.words {
                let k = word_cocycle(pres, w1, w2);
                let ph = mu.powi(k);
                let e = out.words.entry(word_add(w1, w2)).or_insert_with(|| PointEvaluation::zero(self.dim));
                for (a, x) in v1.iter().enumerate() {
                    if x.norm() == 0.0 {
                        continue;
                    }
                    for (b, y) in v2.iter().enumerate() {
                        if a & b != 0 || y.norm() == 0.0 {
                            continue;
                        }
                        e[a | b] += ph * x * y * wedge_sign(a as u32, b as u32);
                    }
                }
            }
        }
        out
    }

    /// Involution: `(c W)^* = conj(c) W^*` with `W^* = mu^k W^{-1}`.
    pub fn adjoint(&self, pres: Pres, mu: Complex64, degree: usize) -> PointEvaluation {
        let mut out = PointEvaluation { dim: self.dim, words: BTreeMap::new() };
        let sign = if (degree * degree.saturating_sub(1) / 2) % 2 == 1 { -1.0 } else { 1.0 };
        for (w, v) in &self.words {
            let inv = w.map(|x| -x);
            let k = word_cocycle(pres, &inv, w);
            let ph = mu.powi(-k) * sign;
            out.words.insert(inv, v.iter().map(|x| x.conj() * ph).collect());
        }
        out
    }
}

/// Evaluate a form (exterior or first-order treated as antisymmetrized) at a
/// framed point.
pub fn evaluate_at(f: &Form, fp: &FramedPoint, theta: f64) -> Result<PointEvaluation> {
    let coords = coordinates(f.pres)?;
    if fp.point.len() != coords.dim {
        return Err(Error::Shape(format!("point of dimension {} for {}", fp.point.len(), coords.dim)));
    }
    if coords.on_sphere {
        let n = dot(&fp.point, &fp.point).sqrt();
        if (n - 1.0).abs() > 1e-12 {
            return Err(Error::OffSphere((n - 1.0).abs()));
        }
    }
    let k = fp.frame.len();
    if f.degree().unwrap_or(0) > k.min(4) && !f.is_zero() {
        return Err(Error::Degree("form degree exceeds 4 or the tangent dimension".into()));
    }
    let vals = generator_values(&coords, &fp.point);
    let dvals: Vec<Vec<Complex64>> =
        coords.gen_coeffs.iter().map(|c| fp.frame.iter().map(|e| c.iter().zip(e).map(|(a, x)| a * x).sum()).collect()).collect();
    let mu = mu_at(theta);
    let mut out = PointEvaluation { dim: k, words: BTreeMap::new() };
    for ((w, m), c) in &f.terms {
        let mut word = [0; MAXT];
        let mut ph = 0;
        for &g in w.gens() {
            let gw = generator_word(f.pres, g as usize);
            ph += generator_phase(f.pres, g as usize) + word_cocycle(f.pres, &word, &gw);
            word = word_add(&word, &gw);
        }
        let (km, wm) = split_mono(f.pres, m);
        ph += km + word_cocycle(f.pres, &word, &wm);
        word = word_add(&word, &wm);
        let coeff = c.eval_at(mu) * mu.powi(ph) * mono_value(&vals, m);
        if coeff.norm() == 0.0 {
            continue;
        }
        let mut comp = PointEvaluation::zero(k);
        comp[0] = coeff;
        for &g in w.gens() {
            let mut next = PointEvaluation::zero(k);
            for (s, x) in comp.iter().enumerate() {
                if x.norm() == 0.0 {
                    continue;
                }
                for a in 0..k {
                    let bit = 1usize << a;
                    if s & bit != 0 {
                        continue;
                    }
                    next[s | bit] += x * dvals[g as usize][a] * wedge_sign(s as u32, bit as u32);
                }
            }
            comp = next;
        }
        let e = out.words.entry(word).or_insert_with(|| PointEvaluation::zero(k));
        for (x, y) in e.iter_mut().zip(&comp) {
            *x += y;
        }
    }
    Ok(out)
}

/// `<omega, eta> = star(omega^* wedge star eta)` at a framed point of the
/// four-sphere, per torus word.
pub fn hermitian_pair_at(omega: &Form, eta: &Form, fp: &FramedPoint, theta: f64) -> Result<BTreeMap<TorusWord, Complex64>> {
    let (p, q) = (omega.degree().unwrap_or(0), eta.degree().unwrap_or(0));
    if p != q {
        return Err(Error::Degree(format!("pairing of a {p}-form with a {q}-form")));
    }
    let mu = mu_at(theta);
    let a = evaluate_at(omega, fp, theta)?.adjoint(omega.pres, mu, 0);
    let b = evaluate_at(eta, fp, theta)?.hodge();
    let top = a.wedge(&b, omega.pres, mu).hodge();
    Ok(top.words.iter().map(|(w, v)| (*w, v[0])).collect())
}

/// Maximum over torus words and components of `|star F + F|` at a point for
/// a 2-form on the four-sphere.
pub fn asd_residual_at(f: &Form, fp: &FramedPoint, theta: f64) -> Result<f64> {
    if f.degree().unwrap_or(2) != 2 {
        return Err(Error::Degree("anti-selfduality needs a 2-form".into()));
    }
    let e = evaluate_at(f, fp, theta)?;
    Ok(e.hodge().add(&e).max_abs())
}

/// The four-sphere presentation used by the Hodge checks.
pub fn s4() -> Pres {
    Presentation::s4()
}

/// Seeded framed points on the sphere of a presentation.
pub fn sample_points(pres: Pres, count: usize, seed: u64) -> Result<Vec<FramedPoint>> {
    let coords = coordinates(pres)?;
    let mut rng = crate::rng::seeded(seed, 7);
    (0..count).map(|_| FramedPoint::new(random_sphere_point(&mut rng, coords.dim), coords.on_sphere)).collect()
}

/// A framed point at the north pole `x = 1` of the four-sphere.
pub fn north_pole() -> FramedPoint {
    FramedPoint::new(vec![0.0, 0.0, 0.0, 0.0, 1.0], true).expect("unit vector")
}

/// Convenience: exterior form of an element differential on the four-sphere.
pub fn d_exterior(e: &Element) -> Form {
    Form::d(e, Calculus::Exterior)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalars::Scalar;

    #[test]
    fn generator_words() {
        let s7 = Presentation::s7();
        assert_eq!(generator_word(s7, 0)[..2], [1, 0]);
        assert_eq!(generator_word(s7, 3)[..2], [0, 1]);
        assert_eq!(generator_word(s7, 6)[..2], [0, -1]);
        let s4 = Presentation::s4();
        assert_eq!(generator_word(s4, 0)[..2], [1, -1]);
        assert_eq!(generator_word(s4, 1)[..2], [1, 1]);
        assert_eq!(generator_word(s4, 4)[..2], [0, 0]);
    }

    #[test]
    fn evaluation_is_multiplicative_on_forms() {
        let s4 = Presentation::s4();
        let mu = mu_at(GENERIC_THETA);
        let gens: Vec<Element> = (0..s4.ngens()).map(|g| Element::generator(s4, g)).collect();
        for fp in sample_points(s4, 3, 5).unwrap() {
            for a in &gens {
                for b in &gens {
                    let (da, db) = (d_exterior(a), d_exterior(b));
                    let whole = evaluate_at(&da.mul(&db).rmul(a), &fp, GENERIC_THETA).unwrap();
                    let parts = evaluate_at(&da, &fp, GENERIC_THETA)
                        .unwrap()
                        .wedge(&evaluate_at(&db, &fp, GENERIC_THETA).unwrap(), s4, mu)
                        .wedge(&evaluate_at(&Form::from_element(a, Calculus::Exterior), &fp, GENERIC_THETA).unwrap(), s4, mu);
                    assert!(whole.add(&parts.scale(Complex64::new(-1.0, 0.0))).max_abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn evaluation_commutes_with_the_involution() {
        let s4 = Presentation::s4();
        let mu = mu_at(GENERIC_THETA);
        for fp in sample_points(s4, 3, 5).unwrap() {
            for g in 0..s4.ngens() {
                let a = Element::generator(s4, g);
                let b = Element::generator(s4, (g + 1) % s4.ngens());
                let f = d_exterior(&a).rmul(&b);
                let lhs = evaluate_at(&f.adjoint(), &fp, GENERIC_THETA).unwrap();
                let rhs = evaluate_at(&f, &fp, GENERIC_THETA).unwrap().adjoint(s4, mu, 1);
                assert!(lhs.add(&rhs.scale(Complex64::new(-1.0, 0.0))).max_abs() < 1e-12, "generator {g}");
            }
        }
    }

    #[test]
    fn split_respects_phases() {
        let s7 = Presentation::s7();
        let pts = sample_points(s7, 5, 1).unwrap();
        let a = Element::word(s7, &["z3", "z1"]).unwrap();
        let b = Element::word(s7, &["z1", "z3"]).unwrap().scale(&Scalar::mu(-1));
        for fp in &pts {
            let va = eval_clock_shift(&a, &fp.point).unwrap();
            let vb = eval_clock_shift(&b, &fp.point).unwrap();
            assert!(va.max_abs_diff(&vb) < 1e-12);
        }
        let z3 = Element::word(s7, &["z3"]).unwrap();
        let z1 = Element::word(s7, &["z1"]).unwrap();
        for fp in &pts {
            let prod = eval_clock_shift(&z3, &fp.point).unwrap().mul(&eval_clock_shift(&z1, &fp.point).unwrap());
            assert!(prod.max_abs_diff(&eval_clock_shift(&a, &fp.point).unwrap()) < 1e-12);
        }
    }

    #[test]
    fn frames_are_orthonormal() {
        for fp in sample_points(Presentation::s4(), 20, 3).unwrap() {
            assert!(fp.defect() < 1e-12);
        }
        assert!(matches!(FramedPoint::new(vec![1.0, 1.0, 0.0, 0.0, 0.0], true), Err(Error::OffSphere(_))));
    }

    #[test]
    fn sphere_relation_evaluates_to_zero() {
        let s4 = Presentation::s4();
        let a = s4.gen("a").unwrap();
        let b = s4.gen("b").unwrap();
        let x = s4.gen("x").unwrap();
        let r = a.mul(&a.adjoint()).add(&b.mul(&b.adjoint())).add(&x.mul(&x)).sub(&Element::one(s4));
        assert!(r.is_zero());
        let amb = s4.ambient();
        let ra = s4.sphere_relation().unwrap();
        assert!(std::ptr::eq(ra.pres, amb));
        for fp in sample_points(s4, 50, 5).unwrap() {
            let v = eval_element(&ra.reinterpret(s4), &fp.point, 0.3).unwrap();
            assert!(v.values().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn hodge_basics() {
        let mut e = PointEvaluation { dim: 4, words: BTreeMap::new() };
        let mut v = PointEvaluation::zero(4);
        v[0b0011] = Complex64::new(1.0, 0.0);
        e.words.insert([0; MAXT], v);
        let h = e.hodge();
        assert_eq!(h.words[&[0; MAXT]][0b1100], Complex64::new(1.0, 0.0));
        let hh = h.hodge();
        assert!(hh.add(&e.scale(Complex64::new(-1.0, 0.0))).max_abs() < 1e-15);
    }

    #[test]
    fn dx_vanishes_at_pole() {
        let s4 = Presentation::s4();
        let dx = d_exterior(&s4.gen("x").unwrap());
        let e = evaluate_at(&dx, &north_pole(), 0.3).unwrap();
        assert!(e.max_abs() < 1e-15);
        let one = Form::from_element(&Element::one(s4), Calculus::Exterior);
        let e1 = evaluate_at(&one, &north_pole(), 0.3).unwrap();
        assert_eq!(e1.words[&[0; MAXT]][0], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn norm_of_dx_is_positive() {
        let s4 = Presentation::s4();
        let dx = d_exterior(&s4.gen("x").unwrap());
        for fp in sample_points(s4, 5, 9).unwrap() {
            let v = hermitian_pair_at(&dx, &dx, &fp, 0.3).unwrap();
            let z = v[&[0; MAXT]];
            assert!(z.re > 0.0 && z.im.abs() < 1e-12);
        }
    }
}
