//! Differential forms over twisted algebras.
//!
//! Two calculi share one representation: a form is a sum of words in the
//! differentials of generators times a right coefficient in normal form.
//!
//! * [`Calculus::FirstOrder`] is the universal calculus modulo the
//!   bimodule rule `a dg = mu^{B(a,g)} dg a` only. Words carry no relations.
//! * [`Calculus::Exterior`] also imposes `dg dh = -mu^{B(g,h)} dh dg` and
//!   `dg dg = 0`; words are kept strictly increasing.
//!
//! On a sphere both calculi are further divided by the ideal generated by the
//! differential of the sphere relation `R`. Writing `dR = sum_g dg v_g` and
//! choosing `w_g` of the same torus degree as `g` with `sum_g w_g v_g = 1`,
//! the bimodule map `pi(dg) = dg - dR w_g` is idempotent with kernel `dR A`.
//! Substituting `pi` into every slot is an algebra endomorphism that kills
//! the ideal and fixes every form modulo it, so a form lies in the ideal
//! exactly when its substituted image vanishes.

use std::cell::RefCell;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;

use crate::algebra::{render_term, Element, Mono, Pres, SphereKind, MAXG};
use crate::linalg::{to_fractions, Echelon};
use crate::scalars::{Scalar, ScalarFraction};
use crate::{Error, Result};

/// Maximal form degree.
pub const MAXW: usize = 8;

/// Word in generator differentials.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct Word {
    len: u8,
    g: [u8; MAXW],
}

impl Word {
    pub const EMPTY: Word = Word { len: 0, g: [0; MAXW] };

    pub fn single(g: usize) -> Word {
        let mut w = Word::EMPTY;
        w.g[0] = g as u8;
        w.len = 1;
        w
    }

    pub fn from_slice(gs: &[usize]) -> Word {
        assert!(gs.len() <= MAXW, "form degree above {MAXW}");
        let mut w = Word::EMPTY;
        for (i, g) in gs.iter().enumerate() {
            w.g[i] = *g as u8;
        }
        w.len = gs.len() as u8;
        w
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn gens(&self) -> &[u8] {
        &self.g[..self.len as usize]
    }

    pub fn concat(&self, o: &Word) -> Word {
        assert!(self.len() + o.len() <= MAXW, "form degree above {MAXW}");
        let mut w = *self;
        for (i, g) in o.gens().iter().enumerate() {
            w.g[self.len() + i] = *g;
        }
        w.len += o.len;
        w
    }

    fn with_slot(&self, i: usize, g: usize) -> Word {
        let mut w = *self;
        w.g[i] = g as u8;
        w
    }

    fn suffix(&self, i: usize) -> &[u8] {
        &self.g[i..self.len as usize]
    }
}

/// Which calculus a form belongs to.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Calculus {
    FirstOrder,
    Exterior,
}

/// `B(deg m, deg of the generators in gs)`.
fn phase_mono_gens(pres: Pres, m: &Mono, gs: &[u8]) -> i32 {
    gs.iter().map(|&g| pres.mono_gen_phase(m, g as usize)).sum()
}

/// Sort a word into increasing order under the exterior rules.
/// Returns `(sign, mu power, word)` or `None` when a generator repeats.
pub fn exterior_canon(pres: Pres, w: &Word) -> Option<(i64, i32, Word)> {
    let mut g: Vec<u8> = w.gens().to_vec();
    let mut sign = 1i64;
    let mut k = 0i32;
    let n = g.len();
    for i in 0..n {
        for j in 0..n - 1 - i {
            if g[j] > g[j + 1] {
                k += pres.phase[g[j] as usize][g[j + 1] as usize];
                sign = -sign;
                g.swap(j, j + 1);
            } else if g[j] == g[j + 1] {
                return None;
            }
        }
    }
    if g.windows(2).any(|p| p[0] == p[1]) {
        return None;
    }
    let gs: Vec<usize> = g.iter().map(|&x| x as usize).collect();
    Some((sign, k, Word::from_slice(&gs)))
}

/// Differential form: `sum c * (word) * N(m)`.
#[derive(Clone)]
pub struct Form {
    pub pres: Pres,
    pub calc: Calculus,
    pub terms: BTreeMap<(Word, Mono), Scalar>,
}

impl PartialEq for Form {
    fn eq(&self, o: &Form) -> bool {
        std::ptr::eq(self.pres, o.pres) && self.calc == o.calc && self.terms == o.terms
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Hash accumulator for forms.
pub struct FormAcc {
    pres: Pres,
    calc: Calculus,
    map: HashMap<(Word, Mono), Scalar>,
}

impl FormAcc {
    pub fn new(pres: Pres, calc: Calculus) -> FormAcc {
        FormAcc { pres, calc, map: HashMap::new() }
    }

    /// Add `c * mu^k * word * N(m)` with `m` possibly unreduced and, in the
    /// exterior calculus, `word` possibly unsorted.
    pub fn add_raw(&mut self, w: Word, m: &Mono, c: &Scalar, k: i32) {
        if c.is_zero() {
            return;
        }
        let (w, c, k) = match self.calc {
            Calculus::FirstOrder => (w, c.clone(), k),
            Calculus::Exterior => match exterior_canon(self.pres, &w) {
                None => return,
                Some((s, k2, w2)) => (w2, if s < 0 { c.neg() } else { c.clone() }, k + k2),
            },
        };
        if self.pres.is_reduced(m) {
            self.add_reduced(w, *m, c.shift(k));
            return;
        }
        for (k2, n, r) in self.pres.reduce(m).iter() {
            self.add_reduced(w, *r, c.shift(k + k2).scale_q(&crate::scalars::Q::int(*n)));
        }
    }

    pub fn add_reduced(&mut self, w: Word, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.map.entry((w, m)) {
            Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn add_form(&mut self, f: &Form, s: &Scalar) {
        for ((w, m), c) in &f.terms {
            self.add_reduced(*w, *m, c.mul(s));
        }
    }

    pub fn finish(self) -> Form {
        Form { pres: self.pres, calc: self.calc, terms: self.map.into_iter().collect() }
    }
}

/// Tri-state answer of a quotient zero test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroTest {
    Zero,
    Nonzero,
    Undecided,
}

impl Form {
    pub fn zero(pres: Pres, calc: Calculus) -> Form {
        Form { pres, calc, terms: BTreeMap::new() }
    }

    /// Degree-zero form from an algebra element.
    pub fn from_element(e: &Element, calc: Calculus) -> Form {
        Form { pres: e.pres, calc, terms: e.terms.iter().map(|(m, c)| ((Word::EMPTY, *m), c.clone())).collect() }
    }

    /// The differential of a generator.
    pub fn dgen(pres: Pres, g: usize, calc: Calculus) -> Form {
        let mut terms = BTreeMap::new();
        terms.insert((Word::single(g), Mono::ONE), Scalar::one());
        Form { pres, calc, terms }
    }

    /// `word * coefficient`.
    pub fn word_times(pres: Pres, w: Word, coeff: &Element, calc: Calculus) -> Form {
        let mut acc = FormAcc::new(pres, calc);
        for (m, c) in &coeff.terms {
            acc.add_raw(w, m, c, 0);
        }
        acc.finish()
    }

    /// `d` of an algebra element, by the Leibniz rule on normal monomials.
    pub fn d(e: &Element, calc: Calculus) -> Form {
        let mut acc = FormAcc::new(e.pres, calc);
        for (m, c) in &e.terms {
            for (g, w, rest, k) in d_mono(e.pres, m).iter() {
                acc.add_reduced(Word::single(*g), *rest, c.mul(w).shift(*k));
            }
        }
        acc.finish()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Degree when homogeneous (0 for the zero form).
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(|(w, _)| w.len());
        let first = it.next().unwrap_or(0);
        if it.all(|d| d == first) {
            Some(first)
        } else {
            None
        }
    }

    fn check(&self, o: &Form) -> Result<()> {
        if !std::ptr::eq(self.pres, o.pres) {
            return Err(Error::PresentationMismatch(self.pres.name.clone(), o.pres.name.clone()));
        }
        if self.calc != o.calc {
            return Err(Error::Invalid("forms from different calculi".into()));
        }
        Ok(())
    }

    pub fn add(&self, o: &Form) -> Form {
        debug_assert!(self.check(o).is_ok());
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            match terms.get_mut(k) {
                Some(x) => {
                    *x = x.add(c);
                    if x.is_zero() {
                        terms.remove(k);
                    }
                }
                None => {
                    terms.insert(*k, c.clone());
                }
            }
        }
        Form { pres: self.pres, calc: self.calc, terms }
    }

    pub fn neg(&self) -> Form {
        Form { pres: self.pres, calc: self.calc, terms: self.terms.iter().map(|(k, c)| (*k, c.neg())).collect() }
    }

    pub fn sub(&self, o: &Form) -> Form {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Form {
        if s.is_zero() {
            return Form::zero(self.pres, self.calc);
        }
        Form { pres: self.pres, calc: self.calc, terms: self.terms.iter().map(|(k, c)| (*k, c.mul(s))).collect() }
    }

    pub fn try_mul(&self, o: &Form) -> Result<Form> {
        self.check(o)?;
        Ok(self.mul(o))
    }

    pub fn mul(&self, o: &Form) -> Form {
        debug_assert!(self.check(o).is_ok());
        let mut acc = FormAcc::new(self.pres, self.calc);
        self.mul_into(o, &Scalar::one(), &mut acc);
        acc.finish()
    }

    /// Accumulate `s * self * o` into `acc`.
    pub fn mul_into(&self, o: &Form, s: &Scalar, acc: &mut FormAcc) {
        let p = self.pres;
        for ((w1, a), c1) in &self.terms {
            let c1s = c1.mul(s);
            for ((w2, b), c2) in &o.terms {
                let k = phase_mono_gens(p, a, w2.gens()) + p.cocycle(a, b);
                let mut m = *a;
                for i in 0..MAXG {
                    m.0[i] += b.0[i];
                }
                acc.add_raw(w1.concat(w2), &m, &c1s.mul(c2), k);
            }
        }
    }

    /// Left multiplication by an algebra element.
    pub fn lmul(&self, e: &Element) -> Form {
        Form::from_element(e, self.calc).mul(self)
    }

    /// Right multiplication by an algebra element.
    pub fn rmul(&self, e: &Element) -> Form {
        self.mul(&Form::from_element(e, self.calc))
    }

    /// Graded involution: `(dg)^* = d(g^*)`, `(w1 w2)^* = (-1)^{p1 p2} w2^* w1^*`.
    pub fn adjoint(&self) -> Form {
        let p = self.pres;
        let mut acc = FormAcc::new(p, self.calc);
        for ((w, m), c) in &self.terms {
            let n = w.len();
            let rev: Vec<usize> = w.gens().iter().rev().map(|&g| p.gens[g as usize].conj).collect();
            let rw = Word::from_slice(&rev);
            let sign = if (n * (n.saturating_sub(1)) / 2) % 2 == 1 { -1 } else { 1 };
            let (k0, mc) = Element::mono_adjoint(p, m);
            let k = k0 + phase_mono_gens(p, &mc, rw.gens());
            let cc = if sign < 0 { c.conj().neg() } else { c.conj() };
            acc.add_raw(rw, &mc, &cc, k);
        }
        acc.finish()
    }

    /// Exterior derivative on the canonical basis: `d(w f) = (-1)^p w df`.
    pub fn ext_d(&self) -> Result<Form> {
        if self.calc != Calculus::Exterior {
            return Err(Error::Invalid("d is only defined on exterior forms; use universal forms".into()));
        }
        let p = self.pres;
        let mut acc = FormAcc::new(p, Calculus::Exterior);
        for ((w, m), c) in &self.terms {
            let s = if w.len() % 2 == 1 { c.neg() } else { c.clone() };
            for (g, wt, rest, k) in d_mono(p, m).iter() {
                acc.add_raw(w.concat(&Word::single(*g)), rest, &s.mul(wt), *k);
            }
        }
        Ok(acc.finish())
    }

    /// Image in the exterior calculus (`delta -> d`).
    pub fn to_exterior(&self) -> Form {
        if self.calc == Calculus::Exterior {
            return self.clone();
        }
        let mut acc = FormAcc::new(self.pres, Calculus::Exterior);
        for ((w, m), c) in &self.terms {
            acc.add_raw(*w, m, c, 0);
        }
        acc.finish()
    }

    /// Split into torus-homogeneous parts (degree of word plus coefficient).
    pub fn homogeneous_parts(&self) -> BTreeMap<Vec<i32>, Form> {
        let p = self.pres;
        let mut out: BTreeMap<Vec<i32>, Form> = BTreeMap::new();
        for ((w, m), c) in &self.terms {
            let mut d = p.torus_degree(m);
            for &g in w.gens() {
                for (k, x) in p.gens[g as usize].degree.iter().enumerate() {
                    d[k] += x;
                }
            }
            out.entry(d).or_insert_with(|| Form::zero(p, self.calc)).terms.insert((*w, *m), c.clone());
        }
        out
    }

    /// Coefficient of each word as an algebra element.
    pub fn coefficients(&self) -> BTreeMap<Word, Element> {
        let mut out: BTreeMap<Word, Element> = BTreeMap::new();
        for ((w, m), c) in &self.terms {
            out.entry(*w).or_insert_with(|| Element::zero(self.pres)).terms.insert(*m, c.clone());
        }
        out
    }

    /// Representative in the image of the sphere projection. Two forms agree
    /// modulo the differential sphere ideal exactly when their
    /// representatives coincide.
    pub fn reduce_sphere(&self) -> Result<Form> {
        let data = pi_data(self.pres)?;
        let Some(data) = data else {
            return Ok(self.clone());
        };
        let maxlen = self.terms.keys().map(|(w, _)| w.len()).max().unwrap_or(0);
        let mut cur: HashMap<(Word, Mono), Scalar> = self.terms.iter().map(|(k, c)| (*k, c.clone())).collect();
        let p = self.pres;
        for slot in 0..maxlen {
            let mut acc = FormAcc::new(p, Calculus::FirstOrder);
            for ((w, m), c) in cur.iter() {
                acc.add_reduced(*w, *m, c.clone());
                if slot >= w.len() {
                    continue;
                }
                let g = w.g[slot] as usize;
                let suffix = w.suffix(slot + 1);
                for (g2, cel) in &data[g] {
                    let nw = w.with_slot(slot, *g2);
                    for (mc, cc) in &cel.terms {
                        let k = phase_mono_gens(p, mc, suffix) + p.cocycle(mc, m);
                        let mut mm = *mc;
                        for i in 0..MAXG {
                            mm.0[i] += m.0[i];
                        }
                        acc.add_raw(nw, &mm, &cc.mul(c).neg(), k);
                    }
                }
            }
            cur = acc.map;
        }
        let mut acc = FormAcc::new(p, self.calc);
        for ((w, m), c) in cur {
            if self.calc == Calculus::Exterior {
                acc.add_raw(w, &m, &c, 0);
            } else {
                acc.add_reduced(w, m, c);
            }
        }
        Ok(acc.finish())
    }

    /// Exact zero test modulo the sphere's differential ideal.
    pub fn is_zero_mod_sphere(&self) -> Result<bool> {
        Ok(self.reduce_sphere()?.is_zero())
    }

    /// Equality modulo the sphere's differential ideal.
    pub fn eq_mod_sphere(&self, o: &Form) -> Result<bool> {
        self.check(o)?;
        self.sub(o).is_zero_mod_sphere()
    }

    /// Tri-state zero test: `Zero` from the exact projection; `Nonzero`
    /// only when a coefficient of the projected form also evaluates to a
    /// nonzero number at a sampled point.
    pub fn zero_test(&self, seed: u64) -> Result<ZeroTest> {
        let r = self.reduce_sphere()?;
        if r.is_zero() {
            return Ok(ZeroTest::Zero);
        }
        for (_, coeff) in r.coefficients() {
            if crate::split::numerically_nonzero(&coeff, seed, 4)? {
                return Ok(ZeroTest::Nonzero);
            }
        }
        Ok(ZeroTest::Undecided)
    }

    /// Specialize `mu = 1` in every coefficient.
    pub fn classical(&self) -> Form {
        let mut acc = FormAcc::new(self.pres, self.calc);
        for ((w, m), c) in &self.terms {
            let s = Element::scalar(self.pres, c.clone()).classical();
            if let Some(v) = s.as_scalar() {
                acc.add_reduced(*w, *m, v);
            }
        }
        acc.finish()
    }
}

/// `d N(m) = sum_g (weight, mu power) dg N(m - 1_g)`.
pub fn d_mono(pres: Pres, m: &Mono) -> Rc<Vec<(usize, Scalar, Mono, i32)>> {
    thread_local! {
        static CACHE: RefCell<HashMap<(usize, Mono), Rc<Vec<(usize, Scalar, Mono, i32)>>>> = RefCell::new(HashMap::new());
    }
    let key = (pres as *const _ as usize, *m);
    if let Some(v) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return v;
    }
    let mut out = Vec::new();
    let mut prefix = Mono::ONE;
    for g in 0..pres.ngens() {
        let e = m.0[g];
        if e > 0 {
            let mut rest = *m;
            rest.0[g] -= 1;
            out.push((g, Scalar::int(e as i64), rest, pres.mono_gen_phase(&prefix, g)));
        }
        prefix.0[g] = e;
    }
    let v = Rc::new(out);
    CACHE.with(|c| c.borrow_mut().insert(key, v.clone()));
    v
}

type PiData = Rc<Vec<Vec<(usize, Element)>>>;

/// For each generator `g`, the list `(g', v_{g'} w_g)`; `None` without a
/// sphere relation.
fn pi_data(pres: Pres) -> Result<Option<PiData>> {
    thread_local! {
        static CACHE: RefCell<HashMap<usize, Option<PiData>>> = RefCell::new(HashMap::new());
    }
    let key = pres as *const _ as usize;
    if let Some(v) = CACHE.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(v);
    }
    let n = pres.ngens();
    let gen = |g: usize| Element::generator(pres, g);
    let (v, w): (Vec<Element>, Vec<Element>) = match &pres.sphere {
        SphereKind::None => {
            CACHE.with(|c| c.borrow_mut().insert(key, None));
            return Ok(None);
        }
        SphereKind::Torus { .. } => return Err(Error::Unsupported(pres.name.clone())),
        SphereKind::Odd { pairs, .. } | SphereKind::Even { pairs, .. } => {
            let mut v = vec![Element::zero(pres); n];
            let mut w = vec![Element::zero(pres); n];
            let half = Scalar::frac(1, 2);
            for &(a, b) in pairs {
                v[a] = gen(b);
                v[b] = gen(a);
                w[a] = gen(a).scale(&half);
                w[b] = gen(b).scale(&half);
            }
            if let SphereKind::Even { central, .. } = &pres.sphere {
                v[*central] = gen(*central).scale(&Scalar::int(2));
                w[*central] = gen(*central).scale(&half);
            }
            (v, w)
        }
    };
    let mut check = Element::zero(pres);
    for g in 0..n {
        check = check.add(&w[g].mul(&v[g]));
    }
    assert_eq!(check, Element::one(pres), "projection data must satisfy sum w v = 1");
    let data: Vec<Vec<(usize, Element)>> = (0..n)
        .map(|g| (0..n).filter(|g2| !v[*g2].is_zero()).map(|g2| (g2, v[g2].mul(&w[g]))).collect())
        .collect();
    let data = Some(Rc::new(data));
    CACHE.with(|c| c.borrow_mut().insert(key, data.clone()));
    Ok(data)
}

/// `dR` for the sphere relation of `pres`, as a one-form.
pub fn d_sphere_relation(pres: Pres, calc: Calculus) -> Option<Form> {
    let r = pres.sphere_relation()?;
    let amb = r.pres;
    let f = Form::d(&r, calc);
    let mut acc = FormAcc::new(pres, calc);
    for ((w, m), c) in &f.terms {
        debug_assert!(std::ptr::eq(amb, f.pres));
        acc.add_raw(*w, m, c, 0);
    }
    Some(acc.finish())
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let tok = match self.calc {
            Calculus::FirstOrder => "delta",
            Calculus::Exterior => "d",
        };
        let mut parts = Vec::new();
        for ((w, m), c) in self.terms.iter().rev() {
            let ws: Vec<String> = w.gens().iter().map(|&g| format!("{tok}({})", self.pres.gens[g as usize].name)).collect();
            let coeff = render_term(self.pres, m, c);
            if ws.is_empty() {
                parts.push(coeff);
            } else if m.is_one() {
                let wj = ws.join("*");
                if c.is_one() {
                    parts.push(wj);
                } else if c.neg().is_one() {
                    parts.push(format!("-{wj}"));
                } else {
                    parts.push(format!("({c})*{wj}"));
                }
            } else {
                let body = crate::algebra::render_mono(self.pres, m);
                let wj = ws.join("*");
                if c.is_one() {
                    parts.push(format!("{wj}*{body}"));
                } else if c.neg().is_one() {
                    parts.push(format!("-{wj}*{body}"));
                } else {
                    parts.push(format!("({c})*{wj}*{body}"));
                }
            }
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Membership of a form in the ideal generated by `R` and `dR`, by linear
/// algebra over the fraction field on the filtered component whose
/// coefficients have degree `<= bound`. Works in the sphere-free
/// presentation. `Some(true)` when a certificate is found.
pub fn form_ideal_membership(form: &Form, bound: usize) -> Result<bool> {
    let pres = form.pres;
    let amb = pres.ambient();
    let Some(r) = pres.sphere_relation() else {
        return Ok(form.is_zero());
    };
    let Some(deg) = form.degree() else {
        return Err(Error::Degree("form is not homogeneous in degree".into()));
    };
    let calc = form.calc;
    let dr = Form::d(&r, calc);
    let lift = |f: &Form| -> BTreeMap<(Word, Mono), ScalarFraction> { to_fractions(&f.terms) };
    let target = Form { pres: amb, calc, terms: form.terms.clone() };
    let n = amb.ngens();
    let mut words: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..deg {
        words = words.iter().flat_map(|w| (0..n).map(move |g| [w.clone(), vec![g]].concat())).collect();
    }
    let monos = amb.graded_basis(bound, None);
    let mut ech: Echelon<(Word, Mono), ScalarFraction> = Echelon::new();
    let tdeg: Vec<BTreeMap<Vec<i32>, Form>> = vec![target.homogeneous_parts()];
    let wanted: Vec<Vec<i32>> = tdeg[0].keys().cloned().collect();
    let form_degree = |f: &Form| f.homogeneous_parts().keys().next().cloned();
    for w in &words {
        let wf = Form::word_times(amb, Word::from_slice(w), &Element::one(amb), calc);
        if wf.is_zero() {
            continue;
        }
        for m in &monos {
            if m.degree() + r.degree() <= bound {
                let cand = wf.rmul(&Element::monomial(amb, *m, Scalar::one()).mul(&r));
                if let Some(d) = form_degree(&cand) {
                    if wanted.contains(&d) {
                        ech.insert(lift(&cand));
                    }
                }
            }
        }
    }
    if deg >= 1 {
        let mut shorter: Vec<Vec<usize>> = vec![vec![]];
        for _ in 0..deg - 1 {
            shorter = shorter.iter().flat_map(|w| (0..n).map(move |g| [w.clone(), vec![g]].concat())).collect();
        }
        for u in &shorter {
            for split in 0..deg {
                let left = Form::word_times(amb, Word::from_slice(&u[..split]), &Element::one(amb), calc);
                let right = Form::word_times(amb, Word::from_slice(&u[split..]), &Element::one(amb), calc);
                let base = left.mul(&dr).mul(&right);
                if base.is_zero() {
                    continue;
                }
                for m in &monos {
                    if m.degree() < bound {
                        let cand = base.rmul(&Element::monomial(amb, *m, Scalar::one()));
                        if let Some(d) = form_degree(&cand) {
                            if wanted.contains(&d) {
                                ech.insert(lift(&cand));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(ech.solve(&lift(&target)).is_some())
}

/// Element of the universal differential calculus:
/// `sum c * a0 (x) a1 (x) ... (x) ap`, read as `a0 da1 ... dap`, with
/// reduced monomials and `a_i != 1` for `i >= 1`.
#[derive(Clone)]
pub struct UniversalForm {
    pub pres: Pres,
    pub terms: BTreeMap<Vec<Mono>, Scalar>,
}

impl PartialEq for UniversalForm {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.pres, other.pres) && self.terms == other.terms
    }
}

impl fmt::Debug for UniversalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniversalForm({} terms)", self.terms.len())
    }
}

impl UniversalForm {
    pub fn zero(pres: Pres) -> UniversalForm {
        UniversalForm { pres, terms: BTreeMap::new() }
    }

    pub fn from_element(e: &Element) -> UniversalForm {
        UniversalForm { pres: e.pres, terms: e.terms.iter().map(|(m, c)| (vec![*m], c.clone())).collect() }
    }

    fn add_term(terms: &mut BTreeMap<Vec<Mono>, Scalar>, k: Vec<Mono>, c: Scalar) {
        if c.is_zero() || k[1..].iter().any(|m| m.is_one()) {
            return;
        }
        match terms.get_mut(&k) {
            Some(x) => {
                *x = x.add(&c);
                if x.is_zero() {
                    terms.remove(&k);
                }
            }
            None => {
                terms.insert(k, c);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, o: &UniversalForm) -> UniversalForm {
        let mut terms = self.terms.clone();
        for (k, c) in &o.terms {
            UniversalForm::add_term(&mut terms, k.clone(), c.clone());
        }
        UniversalForm { pres: self.pres, terms }
    }

    pub fn scale(&self, s: &Scalar) -> UniversalForm {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            UniversalForm::add_term(&mut terms, k.clone(), c.mul(s));
        }
        UniversalForm { pres: self.pres, terms }
    }

    pub fn sub(&self, o: &UniversalForm) -> UniversalForm {
        self.add(&o.scale(&Scalar::int(-1)))
    }

    /// `delta(a0 da1 ... dap) = da0 da1 ... dap`.
    pub fn delta(&self) -> UniversalForm {
        let mut terms = BTreeMap::new();
        for (k, c) in &self.terms {
            if k[0].is_one() {
                continue;
            }
            let mut nk = vec![Mono::ONE];
            nk.extend_from_slice(k);
            UniversalForm::add_term(&mut terms, nk, c.clone());
        }
        UniversalForm { pres: self.pres, terms }
    }

    /// `(X) * b` for a single tensor `X` and an element `b`.
    fn tensor_times(pres: Pres, k: &[Mono], c: &Scalar, b: &Element, out: &mut BTreeMap<Vec<Mono>, Scalar>) {
        if k.len() == 1 {
            let prod = Element::mono_mul(pres, &k[0], &Mono::ONE).mul(b);
            for (m, cc) in &prod.terms {
                UniversalForm::add_term(out, vec![*m], cc.mul(c));
            }
            return;
        }
        // (Y dap) b = Y d(ap b) - (Y ap) db
        let (y, ap) = k.split_at(k.len() - 1);
        let apb = Element::mono_mul(pres, &ap[0], &Mono::ONE).mul(b);
        for (m, cc) in &apb.terms {
            let mut nk = y.to_vec();
            nk.push(*m);
            UniversalForm::add_term(out, nk, cc.mul(c));
        }
        let mut yap = BTreeMap::new();
        UniversalForm::tensor_times(pres, y, c, &Element::monomial(pres, ap[0], Scalar::one()), &mut yap);
        for (bm, bc) in &b.terms {
            if bm.is_one() {
                continue;
            }
            for (yk, yc) in &yap {
                let mut nk = yk.clone();
                nk.push(*bm);
                UniversalForm::add_term(out, nk, yc.mul(bc).neg());
            }
        }
    }

    pub fn mul(&self, o: &UniversalForm) -> UniversalForm {
        let p = self.pres;
        let mut out = BTreeMap::new();
        for (k1, c1) in &self.terms {
            for (k2, c2) in &o.terms {
                let mut part = BTreeMap::new();
                let b0 = Element::monomial(p, k2[0], c2.clone());
                UniversalForm::tensor_times(p, k1, c1, &b0, &mut part);
                for (pk, pc) in part {
                    let mut nk = pk;
                    nk.extend_from_slice(&k2[1..]);
                    UniversalForm::add_term(&mut out, nk, pc);
                }
            }
        }
        UniversalForm { pres: p, terms: out }
    }

    /// Image `a0 D(a1) ... D(ap)` in the first-order calculus.
    pub fn project(&self, calc: Calculus) -> Form {
        let p = self.pres;
        let mut acc = FormAcc::new(p, calc);
        for (k, c) in &self.terms {
            let mut f = Form::from_element(&Element::monomial(p, k[0], c.clone()), calc);
            for m in &k[1..] {
                f = f.mul(&Form::d(&Element::monomial(p, *m, Scalar::one()), calc));
            }
            acc.add_form(&f, &Scalar::one());
        }
        acc.finish()
    }
}

/// Dense square or rectangular matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> T) -> Matrix<T> {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<U: Clone>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }
}

/// Matrix over an algebra.
pub type ElementMatrix = Matrix<Element>;
/// Matrix over a calculus.
pub type FormMatrix = Matrix<Form>;

impl ElementMatrix {
    pub fn identity(pres: Pres, n: usize) -> ElementMatrix {
        Matrix::from_fn(n, n, |i, j| if i == j { Element::one(pres) } else { Element::zero(pres) })
    }

    pub fn try_mul(&self, o: &ElementMatrix) -> Result<ElementMatrix> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let pres = self.data.first().map(|e| e.pres).ok_or_else(|| Error::Shape("empty matrix".into()))?;
        let mut out = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = crate::algebra::Acc::new(pres);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    for (ma, ca) in &a.terms {
                        for (mb, cb) in &b.terms {
                            let mut m = *ma;
                            for t in 0..MAXG {
                                m.0[t] += mb.0[t];
                            }
                            acc.add_raw(&m, &ca.mul(cb), pres.cocycle(ma, mb));
                        }
                    }
                }
                out.push(acc.finish());
            }
        }
        Ok(Matrix { rows: self.rows, cols: o.cols, data: out })
    }

    pub fn adjoint(&self) -> ElementMatrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).adjoint())
    }

    pub fn sub(&self, o: &ElementMatrix) -> Result<ElementMatrix> {
        if (self.rows, self.cols) != (o.rows, o.cols) {
            return Err(Error::Shape("matrix sizes differ".into()));
        }
        Ok(Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.sub(b)).collect() })
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }

    pub fn trace(&self) -> Result<Element> {
        if self.rows != self.cols {
            return Err(Error::Shape("trace of a non-square matrix".into()));
        }
        let pres = self.data.first().map(|e| e.pres).ok_or_else(|| Error::Shape("empty matrix".into()))?;
        let mut t = Element::zero(pres);
        for i in 0..self.rows {
            t = t.add(self.get(i, i));
        }
        Ok(t)
    }

    /// Entrywise differential.
    pub fn d(&self, calc: Calculus) -> FormMatrix {
        self.map(|e| Form::d(e, calc))
    }

    pub fn to_forms(&self, calc: Calculus) -> FormMatrix {
        self.map(|e| Form::from_element(e, calc))
    }
}

impl FormMatrix {
    pub fn try_mul(&self, o: &FormMatrix) -> Result<FormMatrix> {
        if self.cols != o.rows {
            return Err(Error::Shape(format!("{}x{} times {}x{}", self.rows, self.cols, o.rows, o.cols)));
        }
        let first = self.data.first().ok_or_else(|| Error::Shape("empty matrix".into()))?;
        let (pres, calc) = (first.pres, first.calc);
        let mut out = Vec::with_capacity(self.rows * o.cols);
        for i in 0..self.rows {
            for j in 0..o.cols {
                let mut acc = FormAcc::new(pres, calc);
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    a.mul_into(b, &Scalar::one(), &mut acc);
                }
                out.push(acc.finish());
            }
        }
        Ok(Matrix { rows: self.rows, cols: o.cols, data: out })
    }

    pub fn trace(&self) -> Result<Form> {
        if self.rows != self.cols {
            return Err(Error::Shape("trace of a non-square matrix".into()));
        }
        let first = self.data.first().ok_or_else(|| Error::Shape("empty matrix".into()))?;
        let mut acc = FormAcc::new(first.pres, first.calc);
        for i in 0..self.rows {
            acc.add_form(self.get(i, i), &Scalar::one());
        }
        Ok(acc.finish())
    }

    pub fn adjoint(&self) -> FormMatrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).adjoint())
    }

    pub fn add(&self, o: &FormMatrix) -> FormMatrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&o.data).map(|(a, b)| a.add(b)).collect() }
    }

    /// Entrywise exterior derivative.
    pub fn ext_d(&self) -> Result<FormMatrix> {
        let data = self.data.iter().map(|f| f.ext_d()).collect::<Result<Vec<_>>>()?;
        Ok(Matrix { rows: self.rows, cols: self.cols, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Presentation;

    fn s7g(name: &str) -> Element {
        Presentation::s7().gen(name).unwrap()
    }

    #[test]
    fn leibniz_on_generators() {
        let s7 = Presentation::s7();
        let fo = Calculus::FirstOrder;
        let z1z2 = s7g("z1").mul(&s7g("z2"));
        let lhs = Form::d(&z1z2, fo);
        let rhs = Form::dgen(s7, 0, fo).rmul(&s7g("z2")).add(&Form::dgen(s7, 1, fo).rmul(&s7g("z1")));
        assert_eq!(lhs, rhs);
        assert!(Form::d(&Element::one(s7), fo).is_zero());
    }

    #[test]
    fn bimodule_rule() {
        let s7 = Presentation::s7();
        let fo = Calculus::FirstOrder;
        let lhs = Form::dgen(s7, 0, fo).lmul(&s7g("z3"));
        let rhs = Form::dgen(s7, 0, fo).rmul(&s7g("z3")).scale(&Scalar::mu(-1));
        assert_eq!(lhs, rhs);
        assert_eq!(Form::dgen(s7, 0, fo).adjoint(), Form::dgen(s7, 4, fo));
    }

    #[test]
    fn s4_relation_differential() {
        let s4 = Presentation::s4();
        let fo = Calculus::FirstOrder;
        let a = s4.gen("a").unwrap();
        let b = s4.gen("b").unwrap();
        let lhs = Form::d(&a.mul(&b), fo).sub(&Form::d(&b.mul(&a), fo).scale(&Scalar::mu(2)));
        assert!(lhs.is_zero());
    }

    #[test]
    fn sphere_differential_vanishes() {
        for pres in [Presentation::s7(), Presentation::s4()] {
            for calc in [Calculus::FirstOrder, Calculus::Exterior] {
                let dr = d_sphere_relation(pres, calc).unwrap();
                assert!(!dr.is_zero());
                assert!(dr.is_zero_mod_sphere().unwrap());
                let g = Form::dgen(pres, 0, calc);
                assert!(!g.is_zero_mod_sphere().unwrap());
                assert_eq!(g.zero_test(3).unwrap(), ZeroTest::Nonzero);
            }
        }
    }

    #[test]
    fn exterior_relations() {
        let s7 = Presentation::s7();
        let ex = Calculus::Exterior;
        let d1 = Form::dgen(s7, 0, ex);
        let d3 = Form::dgen(s7, 2, ex);
        assert!(d1.mul(&d3).add(&d3.mul(&d1).scale(&Scalar::mu(1))).is_zero());
        assert!(d1.mul(&d1).is_zero());
        let s4 = Presentation::s4();
        let da = Form::d(&s4.gen("a").unwrap(), ex);
        assert!(da.mul(&da).is_zero());
        assert!(da.ext_d().unwrap().is_zero());
    }

    #[test]
    fn membership_cross_check() {
        let s7 = Presentation::s7();
        let dr = d_sphere_relation(s7, Calculus::FirstOrder).unwrap();
        assert!(form_ideal_membership(&dr, 2).unwrap());
        let g = Form::dgen(s7, 0, Calculus::FirstOrder);
        assert!(!form_ideal_membership(&g, 2).unwrap());
    }

    #[test]
    fn universal_leibniz_small() {
        let a = UniversalForm::from_element(&s7g("z1").mul(&s7g("zb3")));
        let b = UniversalForm::from_element(&s7g("z3"));
        let lhs = a.mul(&b).delta();
        let rhs = a.delta().mul(&b).add(&a.mul(&b.delta()));
        assert_eq!(lhs, rhs);
        let da = a.delta();
        let lhs2 = da.mul(&b).delta();
        let rhs2 = da.delta().mul(&b).sub(&da.mul(&b.delta()));
        assert_eq!(lhs2, rhs2);
        let p = a.delta().mul(&b.delta()).project(Calculus::FirstOrder);
        let q = Form::d(&s7g("z1").mul(&s7g("zb3")), Calculus::FirstOrder).mul(&Form::d(&s7g("z3"), Calculus::FirstOrder));
        assert_eq!(p, q);
    }
}
