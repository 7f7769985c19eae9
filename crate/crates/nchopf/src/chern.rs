//! Chern characters of the projections `p_(n)` in the first-order calculus,
//! the pairing identities behind them, proportionality of the top
//! characters, the index assembled from the analytic constants and the
//! anti-selfduality of the curvature.

use std::cell::RefCell;
use std::collections::HashMap;

use num_complex::Complex64;

use crate::algebra::{embed_s4, Element, Mono, Presentation};
use crate::fibration::{grassmann_connection, phi_kets, projection, Ket};
use crate::forms::{Calculus, ElementMatrix, Form, FormAcc, FormMatrix, Matrix, Word};
use crate::linalg::{to_fractions, Echelon};
use crate::scalars::{Q, Scalar, ScalarFraction};
use crate::split::{asd_residual_at, sample_points};
use crate::{Error, Result};

/// `(-1)^k (2k)! / k!`.
pub fn normalization(k: usize) -> Scalar {
    let mut v: i64 = 1;
    for i in (k + 1)..=(2 * k) {
        v *= i as i64;
    }
    Scalar::int(if k % 2 == 1 { -v } else { v })
}

/// Largest `n` for each Chern degree.
pub const CH0_CAP: usize = 4;
pub const CH1_CAP: usize = 3;
pub const CH2_CAP: usize = 3;
/// Largest `n` for which the top character is traced directly over the four-sphere.
pub const DIRECT_CH2_CAP: usize = 2;

/// How a Chern character was computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ChernPath {
    /// Matrix trace of `(p - 1/2)(dp)^{2k}` over the four-sphere.
    Direct,
    /// The same trace rewritten through `p = U U^*` with the pairings
    /// `<phi_k|d phi_l>`, `<d phi_k|d phi_l>` over the seven-sphere.
    Factorized,
}

#[derive(Clone, Debug)]
pub struct ChernValue {
    pub k: usize,
    pub n: usize,
    pub path: ChernPath,
    pub normalized: bool,
    pub form: Form,
}

impl ChernValue {
    /// Multiply by `(-1)^k (2k)!/k!`.
    pub fn normalize(&self) -> ChernValue {
        if self.normalized {
            return self.clone();
        }
        ChernValue { normalized: true, form: self.form.scale(&normalization(self.k)), ..self.clone() }
    }

    pub fn is_zero(&self) -> Result<bool> {
        self.form.is_zero_mod_sphere()
    }

    /// The value of `ch_0` as a scalar.
    pub fn scalar(&self) -> Option<Scalar> {
        if self.k != 0 {
            return None;
        }
        let coeffs = self.form.coefficients();
        match coeffs.len() {
            0 => Some(Scalar::zero()),
            1 => coeffs.get(&Word::EMPTY).and_then(|e| e.as_scalar()),
            _ => None,
        }
    }
}

fn half_shift(p: &ElementMatrix) -> ElementMatrix {
    let pres = p.data[0].pres;
    Matrix::from_fn(p.rows, p.cols, |i, j| {
        if i == j {
            p.get(i, j).sub(&Element::scalar(pres, Scalar::frac(1, 2)))
        } else {
            p.get(i, j).clone()
        }
    })
}

/// `sum_{ij} a_ij b_ji`.
pub fn trace_product(a: &FormMatrix, b: &FormMatrix) -> Result<Form> {
    if a.rows != b.cols || a.cols != b.rows {
        return Err(Error::Shape("trace of a product of incompatible matrices".into()));
    }
    let first = &a.data[0];
    let mut acc = FormAcc::new(first.pres, first.calc);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let (x, y) = (a.get(i, j), b.get(j, i));
            if !x.is_zero() && !y.is_zero() {
                x.mul_into(y, &Scalar::one(), &mut acc);
            }
        }
    }
    Ok(acc.finish())
}

fn check_caps(k: usize, n: usize) -> Result<()> {
    let cap = match k {
        0 => CH0_CAP,
        1 => CH1_CAP,
        2 => CH2_CAP,
        _ => return Err(Error::Unsupported(format!("Chern character of degree {k}"))),
    };
    if n == 0 || n > cap {
        return Err(Error::BoundOverflow(n, cap));
    }
    Ok(())
}

/// Unnormalized `Tr (p - 1/2)(dp)^{2k}` over the four-sphere, reduced
/// modulo the sphere relations (`ch_0 = Tr p`).
pub fn chern_direct(k: usize, n: usize, calc: Calculus) -> Result<Form> {
    check_caps(k, n)?;
    if k == 2 && n > DIRECT_CH2_CAP {
        return Err(Error::BoundOverflow(n, DIRECT_CH2_CAP));
    }
    let p = projection(n)?.matrix;
    if k == 0 {
        return Ok(Form::from_element(&p.trace()?, calc));
    }
    let ps = half_shift(&p).to_forms(calc);
    let dp = p.d(calc);
    let out = if k == 1 {
        trace_product(&ps.try_mul(&dp)?, &dp)?
    } else {
        let s = dp.try_mul(&dp)?;
        trace_product(&ps.try_mul(&s)?, &s)?
    };
    out.reduce_sphere()
}

fn identity_forms(k: usize, calc: Calculus) -> FormMatrix {
    let s7 = Presentation::s7();
    Matrix::from_fn(k, k, |i, j| if i == j { Form::from_element(&Element::one(s7), calc) } else { Form::zero(s7, calc) })
}

fn matrix_scale(m: &FormMatrix, s: &Scalar) -> FormMatrix {
    m.map(|f| f.scale(s))
}

/// `<d phi_k | d phi_l> = sum_i d(phi_{k,i}^*) d(phi_{l,i})`.
pub fn dket_pairing(a: &Ket, b: &Ket, calc: Calculus) -> Result<Form> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("kets of length {} and {}", a.len(), b.len())));
    }
    let p = a.pres();
    let mut acc = FormAcc::new(p, calc);
    for (x, y) in a.comps.iter().zip(&b.comps) {
        if x.is_zero() || y.is_zero() {
            continue;
        }
        Form::d(&x.adjoint(), calc).mul_into(&Form::d(y, calc), &Scalar::one(), &mut acc);
    }
    Ok(acc.finish())
}

/// Pieces of the factorized trace.
pub struct GaugeData {
    pub kets: Vec<Ket>,
    pub a: FormMatrix,
    pub b: FormMatrix,
    calc: Calculus,
    dphi: Vec<Vec<Form>>,
    dphi_adj: Vec<Vec<Form>>,
}

impl GaugeData {
    pub fn new(n: usize, calc: Calculus) -> Result<GaugeData> {
        let kets = phi_kets(n)?;
        let a = grassmann_connection(n, calc)?;
        let dim = kets.len();
        let mut bd = Vec::with_capacity(dim * dim);
        for k in 0..dim {
            for l in 0..dim {
                bd.push(dket_pairing(&kets[k], &kets[l], calc)?);
            }
        }
        let dphi = kets.iter().map(|k| k.comps.iter().map(|c| Form::d(c, calc)).collect()).collect();
        let dphi_adj = kets.iter().map(|k| k.comps.iter().map(|c| Form::d(&c.adjoint(), calc)).collect()).collect();
        Ok(GaugeData { a, b: Matrix { rows: dim, cols: dim, data: bd }, kets, calc, dphi, dphi_adj })
    }

    fn dim(&self) -> usize {
        self.kets.len()
    }

    /// `sum_{i,k,l} d(phi_{k,i}) Y_kl d(phi_{l,i}^*)`, reduced modulo the
    /// sphere relations block by block.
    pub fn sandwich(&self, y: &FormMatrix) -> Result<Form> {
        let s7 = Presentation::s7();
        let mut total = FormAcc::new(s7, self.calc);
        let len = self.kets[0].len();
        for k in 0..self.dim() {
            for l in 0..self.dim() {
                let ykl = y.get(k, l);
                if ykl.is_zero() {
                    continue;
                }
                let mut acc = FormAcc::new(s7, self.calc);
                for i in 0..len {
                    let (x, z) = (&self.dphi[k][i], &self.dphi_adj[l][i]);
                    if x.is_zero() || z.is_zero() {
                        continue;
                    }
                    x.mul(ykl).mul_into(z, &Scalar::one(), &mut acc);
                }
                total.add_form(&acc.finish().reduce_sphere()?, &Scalar::one());
            }
        }
        Ok(total.finish())
    }
}

fn trace_forms(m: &FormMatrix) -> Result<Form> {
    m.trace()
}

/// Unnormalized `Tr (p - 1/2)(dp)^{2k}` through `dp = dU U^* + U dU^*`,
/// as a form over the seven-sphere reduced modulo the sphere relations.
///
/// Each of the `2^{2k}` words in `L = dU U^*`, `R = U dU^*` collapses to
/// `(first) Y (last)` with `Y` a product of `U^* dU = A`, `U^* U = 1`,
/// `dU^* dU = B` and `dU^* U = -A`.
pub fn chern_factorized(k: usize, n: usize, calc: Calculus) -> Result<Form> {
    thread_local! {
        static CACHE: RefCell<HashMap<(usize, usize, bool), Form>> = RefCell::new(HashMap::new());
    }
    check_caps(k, n)?;
    let key = (k, n, calc == Calculus::Exterior);
    if let Some(f) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(f);
    }
    let g = GaugeData::new(n, calc)?;
    let f = chern_from_gauge(k, &g)?;
    CACHE.with(|c| c.borrow_mut().insert(key, f.clone()));
    Ok(f)
}

pub fn chern_from_gauge(k: usize, g: &GaugeData) -> Result<Form> {
    let s7 = Presentation::s7();
    let calc = g.calc;
    if k == 0 {
        let mut t = Element::zero(s7);
        for ket in &g.kets {
            t = t.add(&ket.bra_ket(ket)?);
        }
        return Form::from_element(&t, calc).reduce_sphere();
    }
    let dim = g.dim();
    let id = identity_forms(dim, calc);
    let a = reduce_matrix(&g.a)?;
    let b = reduce_matrix(&g.b)?;
    let neg_a = matrix_scale(&a, &Scalar::int(-1));
    let half = Scalar::frac(1, 2);
    let mut acc = FormAcc::new(s7, calc);
    let len = 2 * k;
    for bits in 0..(1usize << len) {
        // bit set = L
        let s: Vec<bool> = (0..len).map(|t| (bits >> (len - 1 - t)) & 1 == 1).collect();
        let mut y = id.clone();
        for t in 0..len - 1 {
            let mid = match (s[t], s[t + 1]) {
                (true, true) => &a,
                (true, false) => &id,
                (false, true) => &b,
                (false, false) => &neg_a,
            };
            y = reduce_matrix(&y.try_mul(mid)?)?;
        }
        let (first_l, last_l) = (s[0], s[len - 1]);
        // Tr(p X)
        let z = if first_l { a.try_mul(&y)? } else { y.clone() };
        let tr_px = if last_l { trace_forms(&z)? } else { trace_forms(&z.try_mul(&a)?)?.neg() };
        // Tr(X)
        let tr_x = match (first_l, last_l) {
            (false, true) => trace_forms(&y)?,
            (false, false) => trace_forms(&y.try_mul(&a)?)?.neg(),
            (true, true) => trace_forms(&a.try_mul(&y)?)?,
            (true, false) => g.sandwich(&y)?,
        };
        acc.add_form(&tr_px.reduce_sphere()?, &Scalar::one());
        acc.add_form(&tr_x.reduce_sphere()?, &half.neg());
    }
    acc.finish().reduce_sphere()
}

fn reduce_matrix(m: &FormMatrix) -> Result<FormMatrix> {
    let data = m.data.iter().map(|f| f.reduce_sphere()).collect::<Result<Vec<_>>>()?;
    Ok(Matrix { rows: m.rows, cols: m.cols, data })
}

/// `ch_k(p_(n))`: over the four-sphere when the direct trace is within its
/// cap, otherwise through the factorized trace over the seven-sphere.
pub fn chern(k: usize, n: usize) -> Result<ChernValue> {
    check_caps(k, n)?;
    let direct = k < 2 || n <= DIRECT_CH2_CAP;
    let (form, path) = if direct {
        (chern_direct(k, n, Calculus::FirstOrder)?, ChernPath::Direct)
    } else {
        (chern_factorized(k, n, Calculus::FirstOrder)?, ChernPath::Factorized)
    };
    Ok(ChernValue { k, n, path, normalized: false, form })
}

/// Image of a four-sphere form in the seven-sphere calculus.
pub fn embed_form(f: &Form) -> Result<Form> {
    thread_local! {
        static DGEN: RefCell<HashMap<(usize, bool), Form>> = RefCell::new(HashMap::new());
    }
    let s4 = Presentation::s4();
    if !std::ptr::eq(f.pres, s4) {
        return Err(Error::PresentationMismatch(f.pres.name.clone(), "s4".into()));
    }
    let s7 = Presentation::s7();
    let calc = f.calc;
    let dgen = |g: usize| -> Form {
        let key = (g, calc == Calculus::Exterior);
        if let Some(v) = DGEN.with(|c| c.borrow().get(&key).cloned()) {
            return v;
        }
        let v = Form::d(&embed_s4(&Element::generator(s4, g)), calc);
        DGEN.with(|c| c.borrow_mut().insert(key, v.clone()));
        v
    };
    let mut acc = FormAcc::new(s7, calc);
    for ((w, m), c) in &f.terms {
        let mut t = Form::from_element(&Element::one(s7), calc);
        for &g in w.gens() {
            t = t.mul(&dgen(g as usize));
        }
        let coeff = embed_s4(&Element::monomial(s4, *m, c.clone()));
        acc.add_form(&t.rmul(&coeff), &Scalar::one());
    }
    Ok(acc.finish())
}

// ---------------------------------------------------------------------------
// Classical numeric oracle

/// Values `z1..z4, conj(z1)..conj(z4)` of the seven-sphere generators.
pub fn s7_values(z: &[Complex64; 4]) -> [Complex64; 8] {
    let mut v = [Complex64::new(0.0, 0.0); 8];
    for i in 0..4 {
        v[i] = z[i];
        v[i + 4] = z[i].conj();
    }
    v
}

fn mono_at(m: &Mono, vals: &[Complex64]) -> Complex64 {
    let mut x = Complex64::new(1.0, 0.0);
    for (g, v) in vals.iter().enumerate() {
        for _ in 0..m.0[g] {
            x *= v;
        }
    }
    x
}

/// Value of a seven-sphere element at `mu = 1`.
pub fn eval_classical(e: &Element, vals: &[Complex64]) -> Complex64 {
    let one = Complex64::new(1.0, 0.0);
    e.terms.iter().map(|(m, c)| c.eval_at(one) * mono_at(m, vals)).sum()
}

/// Dense classical coefficient tensor of a homogeneous seven-sphere form:
/// entry `sum_t g_t 8^(deg-1-t)` holds the coefficient of `dg_1 ... dg_deg`.
pub fn dense_classical(f: &Form, deg: usize, vals: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); 8usize.pow(deg as u32)];
    let one = Complex64::new(1.0, 0.0);
    for ((w, m), c) in &f.terms {
        if w.len() != deg {
            return Err(Error::Degree(format!("term of degree {} in a {deg}-form", w.len())));
        }
        let idx = w.gens().iter().fold(0usize, |a, &g| a * 8 + g as usize);
        out[idx] += c.eval_at(one) * mono_at(m, vals);
    }
    Ok(out)
}

/// Apply the classical sphere projection `dg -> dg - dR w_g` in every slot.
pub fn project_dense(t: &[Complex64], deg: usize, z: &[Complex64; 4]) -> Vec<Complex64> {
    let vals = s7_values(z);
    // v = (zbar, z), w = (z/2, zbar/2)
    let v: Vec<Complex64> = (0..8).map(|g| if g < 4 { vals[g + 4] } else { vals[g - 4] }).collect();
    let w: Vec<Complex64> = (0..8).map(|g| vals[g] * 0.5).collect();
    let mut cur = t.to_vec();
    for slot in 0..deg {
        let stride = 8usize.pow((deg - 1 - slot) as u32);
        let mut next = vec![Complex64::new(0.0, 0.0); cur.len()];
        for (idx, x) in cur.iter().enumerate() {
            if x.norm() == 0.0 {
                continue;
            }
            let g = (idx / stride) % 8;
            let base = idx - g * stride;
            next[idx] += x;
            for (h, vh) in v.iter().enumerate() {
                next[base + h * stride] -= x * w[g] * vh;
            }
        }
        cur = next;
    }
    cur
}

/// Square matrix of dense classical forms of one degree.
#[derive(Clone)]
struct DenseMatrix {
    n: usize,
    deg: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    fn width(&self) -> usize {
        8usize.pow(self.deg as u32)
    }

    fn at(&self, i: usize, j: usize) -> &[Complex64] {
        let w = self.width();
        &self.data[(i * self.n + j) * w..(i * self.n + j + 1) * w]
    }

    fn mul(&self, o: &DenseMatrix) -> DenseMatrix {
        let (wa, wb) = (self.width(), o.width());
        let n = self.n;
        let mut data = vec![Complex64::new(0.0, 0.0); n * n * wa * wb];
        for i in 0..n {
            for m in 0..n {
                let a = self.at(i, m);
                if a.iter().all(|x| x.norm() == 0.0) {
                    continue;
                }
                for j in 0..n {
                    let b = o.at(m, j);
                    let out = &mut data[(i * n + j) * wa * wb..(i * n + j + 1) * wa * wb];
                    for (x, av) in a.iter().enumerate() {
                        if av.norm() == 0.0 {
                            continue;
                        }
                        for (y, bv) in b.iter().enumerate() {
                            out[x * wb + y] += av * bv;
                        }
                    }
                }
            }
        }
        DenseMatrix { n, deg: self.deg + o.deg, data }
    }

    fn identity(n: usize) -> DenseMatrix {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        DenseMatrix { n, deg: 0, data }
    }

    fn from_forms(m: &FormMatrix, deg: usize, vals: &[Complex64]) -> Result<DenseMatrix> {
        let mut data = Vec::with_capacity(m.rows * m.cols * 8usize.pow(deg as u32));
        for f in &m.data {
            data.extend(dense_classical(f, deg, vals)?);
        }
        Ok(DenseMatrix { n: m.rows, deg, data })
    }

    fn scale(&self, s: f64) -> DenseMatrix {
        DenseMatrix { data: self.data.iter().map(|x| x * s).collect(), ..self.clone() }
    }

    fn trace(&self) -> Vec<Complex64> {
        let w = self.width();
        let mut out = vec![Complex64::new(0.0, 0.0); w];
        for i in 0..self.n {
            for (o, x) in out.iter_mut().zip(self.at(i, i)) {
                *o += x;
            }
        }
        out
    }

    fn trace_product(&self, o: &DenseMatrix) -> Vec<Complex64> {
        let (wa, wb) = (self.width(), o.width());
        let mut out = vec![Complex64::new(0.0, 0.0); wa * wb];
        for i in 0..self.n {
            for j in 0..self.n {
                let (a, b) = (self.at(i, j), o.at(j, i));
                for (x, av) in a.iter().enumerate() {
                    if av.norm() == 0.0 {
                        continue;
                    }
                    for (y, bv) in b.iter().enumerate() {
                        out[x * wb + y] += av * bv;
                    }
                }
            }
        }
        out
    }
}

/// Classical dense value of the direct trace `Tr (p - 1/2)(dp)^{2k}` at a
/// point of the seven-sphere, pulled back and projected.
pub fn direct_trace_classical_at(k: usize, n: usize, z: &[Complex64; 4]) -> Result<Vec<Complex64>> {
    if k == 0 || k > 2 {
        return Err(Error::Unsupported(format!("numeric trace of degree {k}")));
    }
    let p = projection(n)?.matrix;
    let s7 = Presentation::s7();
    let vals = s7_values(z);
    let size = p.rows;
    let mut ps = DenseMatrix { n: size, deg: 0, data: vec![Complex64::new(0.0, 0.0); size * size] };
    let mut dp = DenseMatrix { n: size, deg: 1, data: vec![Complex64::new(0.0, 0.0); size * size * 8] };
    for i in 0..size {
        for j in 0..size {
            let e = embed_s4(p.get(i, j));
            if e.is_zero() {
                continue;
            }
            let mut v = eval_classical(&e, &vals);
            if i == j {
                v -= 0.5;
            }
            ps.data[i * size + j] = v;
            let d = dense_classical(&Form::d(&e, Calculus::FirstOrder), 1, &vals)?;
            dp.data[(i * size + j) * 8..(i * size + j + 1) * 8].copy_from_slice(&d);
        }
    }
    let _ = s7;
    let out = if k == 1 {
        ps.mul(&dp).trace_product(&dp)
    } else {
        let s = dp.mul(&dp);
        ps.mul(&s).trace_product(&s)
    };
    Ok(project_dense(&out, 2 * k, z))
}

/// Classical dense value of the factorized trace at a point of the
/// seven-sphere, projected; every product is taken numerically.
pub fn factorized_trace_classical_at(k: usize, n: usize, z: &[Complex64; 4]) -> Result<Vec<Complex64>> {
    if k == 0 || k > 2 {
        return Err(Error::Unsupported(format!("numeric trace of degree {k}")));
    }
    let g = GaugeData::new(n, Calculus::FirstOrder)?;
    let vals = s7_values(z);
    let dim = g.dim();
    let a = DenseMatrix::from_forms(&g.a, 1, &vals)?;
    let b = DenseMatrix::from_forms(&g.b, 2, &vals)?;
    let id = DenseMatrix::identity(dim);
    let neg_a = a.scale(-1.0);
    let len = g.kets[0].len();
    let dense1 = |f: &Form| dense_classical(f, 1, &vals);
    let dphi: Vec<Vec<Vec<Complex64>>> = g.dphi.iter().map(|r| r.iter().map(dense1).collect()).collect::<Result<_>>()?;
    let dphi_adj: Vec<Vec<Vec<Complex64>>> = g.dphi_adj.iter().map(|r| r.iter().map(dense1).collect()).collect::<Result<_>>()?;
    let sandwich = |y: &DenseMatrix| -> Vec<Complex64> {
        let wy = y.width();
        let mut out = vec![Complex64::new(0.0, 0.0); 8 * wy * 8];
        for kk in 0..dim {
            for l in 0..dim {
                let ykl = y.at(kk, l);
                for i in 0..len {
                    for (x, p) in dphi[kk][i].iter().enumerate() {
                        if p.norm() == 0.0 {
                            continue;
                        }
                        for (t, yv) in ykl.iter().enumerate() {
                            let py = p * yv;
                            if py.norm() == 0.0 {
                                continue;
                            }
                            for (u, q) in dphi_adj[l][i].iter().enumerate() {
                                out[(x * wy + t) * 8 + u] += py * q;
                            }
                        }
                    }
                }
            }
        }
        out
    };
    let steps = 2 * k;
    let mut acc = vec![Complex64::new(0.0, 0.0); 8usize.pow(steps as u32)];
    for bits in 0..(1usize << steps) {
        let s: Vec<bool> = (0..steps).map(|t| (bits >> (steps - 1 - t)) & 1 == 1).collect();
        let mut y = id.clone();
        for t in 0..steps - 1 {
            let mid = match (s[t], s[t + 1]) {
                (true, true) => &a,
                (true, false) => &id,
                (false, true) => &b,
                (false, false) => &neg_a,
            };
            y = y.mul(mid);
        }
        let (first_l, last_l) = (s[0], s[steps - 1]);
        let z_m = if first_l { a.mul(&y) } else { y.clone() };
        let tr_px: Vec<Complex64> = if last_l { z_m.trace() } else { z_m.mul(&a).trace().iter().map(|x| -x).collect() };
        let tr_x: Vec<Complex64> = match (first_l, last_l) {
            (false, true) => y.trace(),
            (false, false) => y.mul(&a).trace().iter().map(|x| -x).collect(),
            (true, true) => a.mul(&y).trace(),
            (true, false) => sandwich(&y),
        };
        for ((o, p), x) in acc.iter_mut().zip(&tr_px).zip(&tr_x) {
            *o += p - x * 0.5;
        }
    }
    Ok(project_dense(&acc, steps, z))
}

/// Seeded points of the seven-sphere.
pub fn s7_points(count: usize, seed: u64) -> Result<Vec<[Complex64; 4]>> {
    let pts = sample_points(Presentation::s7(), count, seed)?;
    Ok(pts
        .iter()
        .map(|fp| {
            let x = &fp.point;
            [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3]), Complex64::new(x[4], x[5]), Complex64::new(x[6], x[7])]
        })
        .collect())
}

// ---------------------------------------------------------------------------
// Checks

/// Agreement of the direct and factorized traces.
#[derive(Clone, Debug)]
pub struct TwoPathsReport {
    pub k: usize,
    pub n: usize,
    /// `exact` over generic `mu`, or `numeric`: at `mu = 1` the direct trace
    /// against the exact factorized form and the numerically factorized trace.
    pub method: &'static str,
    pub points: usize,
    pub max_residual: f64,
    pub pass: bool,
}

/// Tolerance of the numeric comparison of the two traces.
pub const TWO_PATHS_TOLERANCE: f64 = 1e-9;

pub fn two_paths(k: usize, n: usize) -> Result<TwoPathsReport> {
    check_caps(k, n)?;
    if k == 0 {
        let a = chern_direct(0, n, Calculus::FirstOrder)?;
        let b = chern_factorized(0, n, Calculus::FirstOrder)?;
        let pass = embed_form(&a)?.eq_mod_sphere(&b)?;
        return Ok(TwoPathsReport { k, n, method: "exact", points: 0, max_residual: 0.0, pass });
    }
    if k == 1 || n <= DIRECT_CH2_CAP {
        let fact = chern_factorized(k, n, Calculus::FirstOrder)?;
        let direct = embed_form(&chern_direct(k, n, Calculus::FirstOrder)?)?;
        let pass = direct.eq_mod_sphere(&fact)?;
        return Ok(TwoPathsReport { k, n, method: "exact", points: 0, max_residual: 0.0, pass });
    }
    let fact = chern_factorized(k, n, Calculus::FirstOrder)?;
    let pts = s7_points(3, 0x7e11)?;
    let mut worst: f64 = 0.0;
    for z in &pts {
        let direct = direct_trace_classical_at(k, n, z)?;
        let exact = project_dense(&dense_classical(&fact, 2 * k, &s7_values(z))?, 2 * k, z);
        let numeric = factorized_trace_classical_at(k, n, z)?;
        for other in [&exact, &numeric] {
            let r = direct.iter().zip(other).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            worst = worst.max(r);
        }
    }
    Ok(TwoPathsReport { k, n, method: "numeric", points: pts.len(), max_residual: worst, pass: worst <= TWO_PATHS_TOLERANCE })
}

/// The top character computed both ways.
pub fn chern_two_paths_check(n: usize) -> Result<bool> {
    Ok(two_paths(2, n)?.pass)
}

/// Double and triple pairing sums against `n(n+1)(n+2)/6` times those at `n = 1`.
#[derive(Clone, Debug)]
pub struct LemmaReport {
    pub n: usize,
    pub coefficient: i64,
    pub double: bool,
    pub triple: bool,
}

impl LemmaReport {
    pub fn pass(&self) -> bool {
        self.double && self.triple
    }
}

fn cyclic_sums(a: &FormMatrix) -> Result<(Form, Form)> {
    let aa = a.try_mul(a)?;
    let double = aa.trace()?;
    let triple = aa.try_mul(a)?.trace()?;
    Ok((double, triple))
}

pub fn tetrahedral(n: usize) -> i64 {
    (n * (n + 1) * (n + 2) / 6) as i64
}

pub fn lemma_techn_check(n: usize) -> Result<LemmaReport> {
    if n == 0 || n > CH2_CAP {
        return Err(Error::BoundOverflow(n, CH2_CAP));
    }
    let c = tetrahedral(n);
    let (d1, t1) = cyclic_sums(&grassmann_connection(1, Calculus::FirstOrder)?)?;
    let (dn, tn) = cyclic_sums(&grassmann_connection(n, Calculus::FirstOrder)?)?;
    let s = Scalar::int(c);
    Ok(LemmaReport { n, coefficient: c, double: dn.eq_mod_sphere(&d1.scale(&s))?, triple: tn.eq_mod_sphere(&t1.scale(&s))? })
}

/// Outcome of solving `ch_2(p_(n)) = c ch_2(p_(1))`.
#[derive(Clone, Debug)]
pub struct ProportionalityReport {
    pub n: usize,
    pub calc: Calculus,
    pub expected: i64,
    /// The unique `c` when the relation is solvable.
    pub coefficient: Option<Scalar>,
    /// Number of terms of `ch_2(p_(n)) - expected ch_2(p_(1))` after reduction.
    pub residual_terms: usize,
}

impl ProportionalityReport {
    pub fn pass(&self) -> bool {
        self.coefficient.as_ref() == Some(&Scalar::int(self.expected)) && self.residual_terms == 0
    }
}

/// `ch_2` over the seven-sphere in the requested calculus, reduced.
pub fn top_character(n: usize, calc: Calculus) -> Result<Form> {
    let f = chern_factorized(2, n, Calculus::FirstOrder)?;
    match calc {
        Calculus::FirstOrder => Ok(f),
        Calculus::Exterior => f.to_exterior().reduce_sphere(),
    }
}

pub fn proportionality(n: usize, calc: Calculus) -> Result<ProportionalityReport> {
    if n == 0 || n > CH2_CAP {
        return Err(Error::BoundOverflow(n, CH2_CAP));
    }
    let base = top_character(1, calc)?;
    let target = top_character(n, calc)?;
    let expected = tetrahedral(n);
    let mut ech: Echelon<_, ScalarFraction> = Echelon::new();
    ech.insert(to_fractions(&base.terms));
    let coefficient = match ech.solve(&to_fractions(&target.terms)) {
        Some(sol) => {
            let c = sol.get(&0).cloned().unwrap_or_else(ScalarFraction::zero);
            Some(c.to_scalar().ok_or_else(|| Error::Invalid("non-polynomial proportionality constant".into()))?)
        }
        None => None,
    };
    let residual = target.sub(&base.scale(&Scalar::int(expected))).reduce_sphere()?;
    Ok(ProportionalityReport { n, calc, expected, coefficient, residual_terms: residual.terms.len() })
}

// ---------------------------------------------------------------------------
// Index

/// Analytic constants entering the index, imported rather than computed.
#[derive(Clone, Debug)]
pub struct PaperConstants {
    /// `pi_D(ch_2(p_(1))) = 3 gamma`.
    pub gamma_pairing: Q,
    /// Dixmier trace of `|D|^{-4}` on the four-sphere, `8/4!`.
    pub dixmier_m4: Q,
    /// Index of the untwisted Dirac operator.
    pub ind_d_plain: i64,
    /// `(1/4!)(4!/2!)` in front of the top term of the cocycle.
    pub cocycle_prefactor: Q,
    /// Residue at `z = 0` of `Tr |D|^{-4-2z}` per unit Dixmier trace.
    pub residue_per_dixmier: Q,
}

pub fn paper_constants() -> PaperConstants {
    PaperConstants {
        gamma_pairing: Q::int(3),
        dixmier_m4: Q::frac(8, 24),
        ind_d_plain: 0,
        cocycle_prefactor: Q::frac(1, 24).mul(&Q::frac(24, 2)),
        residue_per_dixmier: Q::int(2),
    }
}

#[derive(Clone, Debug)]
pub struct IndexReport {
    pub n: usize,
    pub c_n: Q,
    /// Whether `c_n` came from the exact proportionality computation.
    pub certified: bool,
    pub index: Q,
    pub expected: i64,
}

impl IndexReport {
    pub fn pass(&self) -> bool {
        self.index == Q::int(self.expected)
    }
}

/// Assemble the index from `c_n` and the constants. For `n <= 3` the
/// constant `c_n` is the exact proportionality constant of the top
/// characters after passing to the exterior calculus; beyond that the
/// closed form is used.
pub fn index(n: usize) -> Result<IndexReport> {
    if n == 0 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    let expected = tetrahedral(n);
    let (c_n, certified) = if n <= CH2_CAP {
        let r = proportionality(n, Calculus::Exterior)?;
        let c = r.coefficient.ok_or_else(|| Error::NoSolution("top characters are not proportional".into()))?;
        (c.as_rational().ok_or_else(|| Error::Invalid("irrational proportionality constant".into()))?, true)
    } else {
        (Q::int(expected), false)
    };
    let k = paper_constants();
    let top = k.cocycle_prefactor.mul(&c_n).mul(&k.gamma_pairing).mul(&k.residue_per_dixmier).mul(&k.dixmier_m4);
    let index = top.add(&Q::int(k.ind_d_plain));
    Ok(IndexReport { n, c_n, certified, index, expected })
}

// ---------------------------------------------------------------------------
// Anti-selfduality

/// `F = p dp dp` in the exterior calculus.
pub fn curvature(p: &ElementMatrix) -> Result<FormMatrix> {
    let dp = p.d(Calculus::Exterior);
    p.to_forms(Calculus::Exterior).try_mul(&dp)?.try_mul(&dp)
}

#[derive(Clone, Debug)]
pub struct AsdReport {
    pub points: usize,
    pub theta: f64,
    pub max_residual: f64,
    pub control_residual: f64,
}

/// Tolerances of the anti-selfduality check.
pub const ASD_TOLERANCE: f64 = 1e-9;
pub const ASD_CONTROL_FLOOR: f64 = 1e-3;

impl AsdReport {
    pub fn pass(&self) -> bool {
        self.max_residual <= ASD_TOLERANCE && self.control_residual > ASD_CONTROL_FLOOR
    }
}

/// `p_(1) + t x E_11`, which is not a projection for `t != 0`.
pub fn perturbed_projection(t: Scalar) -> Result<ElementMatrix> {
    let p = projection(1)?.matrix;
    let s4 = Presentation::s4();
    let x = Element::generator(s4, 4);
    let mut q = p.clone();
    q.set(0, 0, p.get(0, 0).add(&x.scale(&t)));
    Ok(q)
}

/// Maximum of `|*F + F|` over all entries of the curvature of `p`.
pub fn asd_residual(p: &ElementMatrix, points: usize, seed: u64, theta: f64) -> Result<f64> {
    let f = curvature(p)?;
    let pts = sample_points(Presentation::s4(), points, seed)?;
    let mut worst: f64 = 0.0;
    for fp in &pts {
        for e in &f.data {
            if e.is_zero() {
                continue;
            }
            worst = worst.max(asd_residual_at(e, fp, theta)?);
        }
    }
    Ok(worst)
}

pub fn asd_check(points: usize, seed: u64, theta: f64) -> Result<AsdReport> {
    let p = projection(1)?.matrix;
    let max_residual = asd_residual(&p, points, seed, theta)?;
    let control_residual = asd_residual(&perturbed_projection(Scalar::frac(1, 10))?, points.min(10), seed, theta)?;
    Ok(AsdReport { points, theta, max_residual, control_residual })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizations() {
        assert_eq!(normalization(0), Scalar::one());
        assert_eq!(normalization(1), Scalar::int(-2));
        assert_eq!(normalization(2), Scalar::int(12));
    }

    #[test]
    fn ch0_small() {
        for n in 1..=2 {
            let c = chern(0, n).unwrap();
            assert_eq!(c.scalar(), Some(Scalar::int(n as i64 + 1)));
        }
    }

    #[test]
    fn ch1_vanishes_n1() {
        assert!(chern(1, 1).unwrap().is_zero().unwrap());
    }

    #[test]
    fn ch2_nonzero_n1() {
        assert!(!chern(2, 1).unwrap().is_zero().unwrap());
    }

    #[test]
    fn two_paths_n1() {
        assert!(two_paths(1, 1).unwrap().pass);
        assert!(two_paths(2, 1).unwrap().pass);
    }

    #[test]
    fn index_constants() {
        let k = paper_constants();
        assert_eq!(k.cocycle_prefactor, Q::frac(1, 2));
        assert_eq!(k.dixmier_m4, Q::frac(1, 3));
        assert_eq!(index(1).unwrap().index, Q::int(1));
    }
}
