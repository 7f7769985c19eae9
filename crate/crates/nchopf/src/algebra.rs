//! Twisted polynomial *-algebras.
//!
//! Every generator `g` carries a torus degree `t_g` in `Z^r`. Homogeneous
//! elements of degrees `s`, `t` satisfy `a b = mu^{B(s,t)} b a` with
//! `B(s,t) = s^T Q t` for an antisymmetric integer matrix `Q`. A normal
//! monomial is an exponent vector read in the fixed generator order, so that
//! `N(e) N(f) = mu^{beta(e,f)} N(e+f)` with
//! `beta(e,f) = sum_{g>h} e_g f_h B(t_g, t_h)`.
//!
//! Sphere relations are solved for one central product and applied until no
//! monomial contains it.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::rc::Rc;
use std::sync::{Mutex, OnceLock};

use crate::scalars::{Q, Scalar};
use crate::{Error, Result};

/// Maximal number of generators of a presentation.
pub const MAXG: usize = 12;

/// Exponent vector over the ordered generator list.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Debug)]
pub struct Mono(pub [u8; MAXG]);

impl Mono {
    pub const ONE: Mono = Mono([0; MAXG]);

    pub fn gen(g: usize) -> Mono {
        let mut m = Mono::ONE;
        m.0[g] = 1;
        m
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn add(&self, o: &Mono) -> Mono {
        let mut m = *self;
        for i in 0..MAXG {
            m.0[i] += o.0[i];
        }
        m
    }
}

/// Kind of generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GenKind {
    Holomorphic,
    Antiholomorphic,
    Central,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub name: String,
    pub kind: GenKind,
    /// Index of the adjoint generator.
    pub conj: usize,
    /// Torus degree.
    pub degree: Vec<i32>,
}

/// Relation imposed on a presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SphereKind {
    None,
    /// `sum_i g_i g_i^* = 1`; the pair at index `elim` is eliminated.
    Odd { pairs: Vec<(usize, usize)>, elim: usize },
    /// `sum_i g_i g_i^* + x^2 = 1`; `x^2` is eliminated.
    Even { pairs: Vec<(usize, usize)>, central: usize },
    /// Every pair is unitary: `g g^* = 1`.
    Torus { pairs: Vec<(usize, usize)> },
}

/// A finitely presented twisted *-algebra.
#[derive(Debug)]
pub struct Presentation {
    pub name: String,
    pub gens: Vec<Generator>,
    /// Antisymmetric phase matrix on torus degrees.
    pub q: Vec<Vec<i32>>,
    pub sphere: SphereKind,
    /// `B(t_g, t_h)` for every generator pair.
    pub phase: Vec<Vec<i32>>,
    /// Matrix sending a torus degree to a word in the splitting torus.
    pub word_map: Vec<Vec<i32>>,
    /// Phase matrix of the splitting torus.
    pub word_q: Vec<Vec<i32>>,
    /// Sphere-free presentation with the same generators.
    ambient: OnceLock<&'static Presentation>,
    id: usize,
}

/// Handle to a registered presentation.
pub type Pres = &'static Presentation;

static REGISTRY: OnceLock<Mutex<HashMap<String, Pres>>> = OnceLock::new();

fn registry() -> &'static Mutex<HashMap<String, Pres>> {
    REGISTRY.get_or_init(|| Mutex::new(HashMap::new()))
}

fn bform(q: &[Vec<i32>], s: &[i32], t: &[i32]) -> i32 {
    let mut acc = 0;
    for (i, si) in s.iter().enumerate() {
        if *si == 0 {
            continue;
        }
        for (j, tj) in t.iter().enumerate() {
            acc += q[i][j] * si * tj;
        }
    }
    acc
}

struct Builder {
    name: String,
    gens: Vec<Generator>,
    q: Vec<Vec<i32>>,
    sphere: SphereKind,
    word_map: Vec<Vec<i32>>,
    word_q: Vec<Vec<i32>>,
}

impl Builder {
    /// Complex pairs `names[i]`, `bar_names[i]` with torus degrees `degs[i]`.
    fn pairs(name: &str, names: &[&str], bars: &[&str], degs: &[Vec<i32>], q: Vec<Vec<i32>>) -> Builder {
        let n = names.len();
        let mut gens = Vec::new();
        for i in 0..n {
            gens.push(Generator { name: names[i].into(), kind: GenKind::Holomorphic, conj: n + i, degree: degs[i].clone() });
        }
        for i in 0..n {
            gens.push(Generator {
                name: bars[i].into(),
                kind: GenKind::Antiholomorphic,
                conj: i,
                degree: degs[i].iter().map(|d| -d).collect(),
            });
        }
        let r = q.len();
        Builder {
            name: name.into(),
            gens,
            word_map: (0..r).map(|i| (0..r).map(|j| (i == j) as i32).collect()).collect(),
            word_q: q.clone(),
            q,
            sphere: SphereKind::None,
        }
    }

    fn build(self) -> Pres {
        let n = self.gens.len();
        assert!(n <= MAXG);
        let phase = (0..n)
            .map(|g| (0..n).map(|h| bform(&self.q, &self.gens[g].degree, &self.gens[h].degree)).collect())
            .collect();
        let mut reg = registry().lock().unwrap();
        if let Some(p) = reg.get(&self.name) {
            return p;
        }
        let id = reg.len();
        let p: Pres = Box::leak(Box::new(Presentation {
            name: self.name.clone(),
            gens: self.gens,
            q: self.q,
            sphere: self.sphere,
            phase,
            word_map: self.word_map,
            word_q: self.word_q,
            ambient: OnceLock::new(),
            id,
        }));
        reg.insert(self.name, p);
        p
    }
}

fn theta_prime() -> Vec<Vec<i32>> {
    vec![vec![0, 0, 1, 1], vec![0, 0, 1, 1], vec![-1, -1, 0, 0], vec![-1, -1, 0, 0]]
}

fn unit(r: usize, i: usize) -> Vec<i32> {
    (0..r).map(|j| (i == j) as i32).collect()
}

impl Presentation {
    /// Look up a preset by name: `s7`, `s4`, `r2n:<n>`, `t2`, `su2`.
    pub fn preset(name: &str) -> Result<Pres> {
        if let Some(p) = registry().lock().unwrap().get(name) {
            return Ok(p);
        }
        match name {
            "s7" => Ok(Presentation::s7()),
            "s4" => Ok(Presentation::s4()),
            "t2" => Ok(Presentation::t2()),
            "su2" => Ok(Presentation::su2()),
            _ => {
                if let Some(n) = name.strip_prefix("r2n:").and_then(|s| s.parse::<usize>().ok()) {
                    if (1..=MAXG / 2).contains(&n) {
                        return Ok(Presentation::r2n(n));
                    }
                }
                Err(Error::UnknownPresentation(name.into()))
            }
        }
    }

    /// `A(S^7_theta')` with generators `z1..z4, zb1..zb4`.
    pub fn s7() -> Pres {
        Presentation::s7_with(theta_prime(), "s7")
    }

    /// Seven-sphere with an arbitrary phase matrix on the four coordinates.
    pub fn s7_with(q: Vec<Vec<i32>>, name: &str) -> Pres {
        if let Some(p) = registry().lock().unwrap().get(name) {
            return p;
        }
        let degs: Vec<Vec<i32>> = (0..4).map(|i| unit(4, i)).collect();
        let mut b = Builder::pairs(name, &["z1", "z2", "z3", "z4"], &["zb1", "zb2", "zb3", "zb4"], &degs, q);
        b.sphere = SphereKind::Odd { pairs: (0..4).map(|i| (i, i + 4)).collect(), elim: 3 };
        b.word_map = vec![vec![1, 1, 0, 0], vec![0, 0, 1, 1]];
        b.word_q = vec![vec![0, 1], vec![-1, 0]];
        b.build()
    }

    /// `A(S^4_theta)` with generators `a, b, ab, bb, x` (alpha, beta, their adjoints, x).
    pub fn s4() -> Pres {
        if let Some(p) = registry().lock().unwrap().get("s4") {
            return p;
        }
        let q = vec![vec![0, 2], vec![-2, 0]];
        let mut b = Builder::pairs("s4", &["a", "b"], &["ab", "bb"], &[vec![1, 0], vec![0, 1]], q);
        b.gens.push(Generator { name: "x".into(), kind: GenKind::Central, conj: 4, degree: vec![0, 0] });
        b.sphere = SphereKind::Even { pairs: vec![(0, 2), (1, 3)], central: 4 };
        // alpha -> u v^-1, beta -> u v
        b.word_map = vec![vec![1, 1], vec![-1, 1]];
        b.word_q = vec![vec![0, 1], vec![-1, 0]];
        b.build()
    }

    /// Noncommutative two-torus with unitaries `u, v` and `u v = mu v u`.
    pub fn t2() -> Pres {
        if let Some(p) = registry().lock().unwrap().get("t2") {
            return p;
        }
        let q = vec![vec![0, 1], vec![-1, 0]];
        let mut b = Builder::pairs("t2", &["u", "v"], &["ub", "vb"], &[vec![1, 0], vec![0, 1]], q);
        b.sphere = SphereKind::Torus { pairs: vec![(0, 2), (1, 3)] };
        b.build()
    }

    /// `A(SU(2))`: commutative, `w1 wb1 + w2 wb2 = 1`, eliminating `w1 wb1`.
    pub fn su2() -> Pres {
        if let Some(p) = registry().lock().unwrap().get("su2") {
            return p;
        }
        let mut b = Builder::pairs("su2", &["w1", "w2"], &["wb1", "wb2"], &[vec![], vec![]], vec![]);
        b.sphere = SphereKind::Odd { pairs: vec![(0, 2), (1, 3)], elim: 0 };
        b.word_map = vec![];
        b.word_q = vec![];
        b.build()
    }

    /// `A(R^{2n}_theta)` with `z_i z_j = mu z_j z_i` for `i < j`.
    pub fn r2n(n: usize) -> Pres {
        let name = format!("r2n:{n}");
        if let Some(p) = registry().lock().unwrap().get(&name) {
            return p;
        }
        let q: Vec<Vec<i32>> = (0..n).map(|i| (0..n).map(|j| (j as i32 - i as i32).signum()).collect()).collect();
        let names: Vec<String> = (1..=n).map(|i| format!("z{i}")).collect();
        let bars: Vec<String> = (1..=n).map(|i| format!("zb{i}")).collect();
        let nr: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let br: Vec<&str> = bars.iter().map(|s| s.as_str()).collect();
        let degs: Vec<Vec<i32>> = (0..n).map(|i| unit(n, i)).collect();
        Builder::pairs(&name, &nr, &br, &degs, q).build()
    }

    /// The same generators and phases without any sphere relation.
    pub fn ambient(&'static self) -> Pres {
        if self.sphere == SphereKind::None {
            return self;
        }
        self.ambient.get_or_init(|| {
            let b = Builder {
                name: format!("{}~free", self.name),
                gens: self.gens.clone(),
                q: self.q.clone(),
                sphere: SphereKind::None,
                word_map: self.word_map.clone(),
                word_q: self.word_q.clone(),
            };
            b.build()
        })
    }

    pub fn ngens(&self) -> usize {
        self.gens.len()
    }

    pub fn torus_rank(&self) -> usize {
        self.q.len()
    }

    pub fn gen_index(&self, name: &str) -> Result<usize> {
        self.gens
            .iter()
            .position(|g| g.name == name)
            .ok_or_else(|| Error::UnknownGenerator(name.into(), self.name.clone()))
    }

    pub fn gen(&'static self, name: &str) -> Result<Element> {
        Ok(Element::generator(self, self.gen_index(name)?))
    }

    /// `B` evaluated on two torus degrees.
    pub fn bilinear(&self, s: &[i32], t: &[i32]) -> i32 {
        bform(&self.q, s, t)
    }

    /// Torus degree of a monomial.
    pub fn torus_degree(&self, m: &Mono) -> Vec<i32> {
        let mut d = vec![0; self.torus_rank()];
        for (g, gen) in self.gens.iter().enumerate() {
            let e = m.0[g] as i32;
            if e != 0 {
                for (k, dk) in gen.degree.iter().enumerate() {
                    d[k] += e * dk;
                }
            }
        }
        d
    }

    /// Degree of a monomial in the splitting torus.
    pub fn word_degree(&self, m: &Mono) -> Vec<i32> {
        let d = self.torus_degree(m);
        self.word_map.iter().map(|row| row.iter().zip(&d).map(|(a, b)| a * b).sum()).collect()
    }

    /// Phase exponent `beta(e, f)` of `N(e) N(f) = mu^beta N(e+f)`.
    pub fn cocycle(&self, e: &Mono, f: &Mono) -> i32 {
        let n = self.ngens();
        let mut acc = 0;
        for g in 1..n {
            let eg = e.0[g] as i32;
            if eg == 0 {
                continue;
            }
            for h in 0..g {
                let fh = f.0[h] as i32;
                if fh != 0 {
                    acc += eg * fh * self.phase[g][h];
                }
            }
        }
        acc
    }

    /// `B(deg m, deg g)` for a monomial and a generator.
    pub fn mono_gen_phase(&self, m: &Mono, g: usize) -> i32 {
        let mut acc = 0;
        for h in 0..self.ngens() {
            let e = m.0[h] as i32;
            if e != 0 {
                acc += e * self.phase[h][g];
            }
        }
        acc
    }

    /// `B` between two monomials.
    pub fn mono_phase(&self, a: &Mono, b: &Mono) -> i32 {
        let mut acc = 0;
        for g in 0..self.ngens() {
            let e = a.0[g] as i32;
            if e == 0 {
                continue;
            }
            for h in 0..self.ngens() {
                let f = b.0[h] as i32;
                if f != 0 {
                    acc += e * f * self.phase[g][h];
                }
            }
        }
        acc
    }

    /// True when `m` contains no eliminated product.
    pub fn is_reduced(&self, m: &Mono) -> bool {
        match &self.sphere {
            SphereKind::None => true,
            SphereKind::Odd { pairs, elim } => {
                let (a, b) = pairs[*elim];
                m.0[a] == 0 || m.0[b] == 0
            }
            SphereKind::Even { central, .. } => m.0[*central] <= 1,
            SphereKind::Torus { pairs } => pairs.iter().all(|&(a, b)| m.0[a] == 0 || m.0[b] == 0),
        }
    }

    /// Reduce a monomial by the sphere relation. Returns `(mu power, integer
    /// coefficient, reduced monomial)` triples; results are cached per thread.
    pub fn reduce(&'static self, m: &Mono) -> Rc<Vec<(i32, i64, Mono)>> {
        thread_local! {
            static CACHE: RefCell<HashMap<(usize, Mono), Rc<Vec<(i32, i64, Mono)>>>> = RefCell::new(HashMap::new());
        }
        if self.is_reduced(m) {
            return Rc::new(vec![(0, 1, *m)]);
        }
        if let Some(r) = CACHE.with(|c| c.borrow().get(&(self.id, *m)).cloned()) {
            return r;
        }
        let mut acc: HashMap<(i32, Mono), i64> = HashMap::new();
        for (k, c, r) in self.reduce_step(m) {
            for (k2, c2, r2) in self.reduce(&r).iter() {
                *acc.entry((k + k2, *r2)).or_insert(0) += c * c2;
            }
        }
        let mut out: Vec<(i32, i64, Mono)> = acc.into_iter().filter(|(_, c)| *c != 0).map(|((k, m), c)| (k, c, m)).collect();
        out.sort_by(|a, b| (a.2, a.0).cmp(&(b.2, b.0)));
        let out = Rc::new(out);
        CACHE.with(|c| c.borrow_mut().insert((self.id, *m), out.clone()));
        out
    }

    /// One application of the sphere rule; the elimination measure drops by one.
    fn reduce_step(&self, m: &Mono) -> Vec<(i32, i64, Mono)> {
        let pair_mono = |a: usize, b: usize| {
            let mut p = Mono::ONE;
            p.0[a] += 1;
            p.0[b] += 1;
            p
        };
        match &self.sphere {
            SphereKind::None => vec![(0, 1, *m)],
            SphereKind::Odd { pairs, elim } => {
                let (a, b) = pairs[*elim];
                let mut rest = *m;
                rest.0[a] -= 1;
                rest.0[b] -= 1;
                let p = pair_mono(a, b);
                let base = -self.cocycle(&rest, &p);
                let mut out = vec![(base, 1, rest)];
                for (i, &(c, d)) in pairs.iter().enumerate() {
                    if i == *elim {
                        continue;
                    }
                    let pi = pair_mono(c, d);
                    out.push((base + self.cocycle(&rest, &pi), -1, rest.add(&pi)));
                }
                out
            }
            SphereKind::Even { pairs, central } => {
                let mut rest = *m;
                rest.0[*central] -= 2;
                let mut out = vec![(0, 1, rest)];
                for &(c, d) in pairs {
                    let pi = pair_mono(c, d);
                    out.push((self.cocycle(&rest, &pi), -1, rest.add(&pi)));
                }
                out
            }
            SphereKind::Torus { pairs } => {
                for &(a, b) in pairs {
                    if m.0[a] > 0 && m.0[b] > 0 {
                        let mut rest = *m;
                        rest.0[a] -= 1;
                        rest.0[b] -= 1;
                        let p = pair_mono(a, b);
                        return vec![(-self.cocycle(&rest, &p), 1, rest)];
                    }
                }
                vec![(0, 1, *m)]
            }
        }
    }

    /// The sphere relation `R` (an element equal to zero), if any.
    pub fn sphere_relation(&'static self) -> Option<Element> {
        let amb = self.ambient();
        let pair = |a: usize, b: usize| {
            let mut p = Mono::ONE;
            p.0[a] += 1;
            p.0[b] += 1;
            p
        };
        let mut terms = BTreeMap::new();
        match &self.sphere {
            SphereKind::None => return None,
            SphereKind::Odd { pairs, .. } => {
                for &(a, b) in pairs {
                    terms.insert(pair(a, b), Scalar::one());
                }
            }
            SphereKind::Even { pairs, central } => {
                for &(a, b) in pairs {
                    terms.insert(pair(a, b), Scalar::one());
                }
                let mut x2 = Mono::ONE;
                x2.0[*central] = 2;
                terms.insert(x2, Scalar::one());
            }
            SphereKind::Torus { .. } => return None,
        }
        terms.insert(Mono::ONE, Scalar::int(-1));
        Some(Element { pres: amb, terms })
    }

    /// All reduced monomials of total degree `<= max_degree`, optionally with a
    /// fixed torus degree, in a deterministic order.
    pub fn graded_basis(&'static self, max_degree: usize, torus: Option<&[i32]>) -> Vec<Mono> {
        let mut out = Vec::new();
        let n = self.ngens();
        let mut cur = Mono::ONE;
        fn rec(p: &Presentation, g: usize, left: usize, cur: &mut Mono, out: &mut Vec<Mono>, torus: Option<&[i32]>) {
            if g == p.ngens() {
                if p.is_reduced(cur) && torus.map_or(true, |t| p.torus_degree(cur) == t) {
                    out.push(*cur);
                }
                return;
            }
            for e in 0..=left {
                cur.0[g] = e as u8;
                rec(p, g + 1, left - e, cur, out, torus);
            }
            cur.0[g] = 0;
        }
        let _ = n;
        rec(self, 0, max_degree, &mut cur, &mut out, torus);
        out.sort_by(|a, b| a.degree().cmp(&b.degree()).then(b.cmp(a)));
        out
    }
}

/// A finite sum of scalar multiples of normal monomials.
#[derive(Clone)]
pub struct Element {
    pub pres: Pres,
    pub terms: BTreeMap<Mono, Scalar>,
}

impl PartialEq for Element {
    fn eq(&self, o: &Element) -> bool {
        std::ptr::eq(self.pres, o.pres) && self.terms == o.terms
    }
}

impl Eq for Element {}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Accumulator for building elements term by term.
pub struct Acc {
    pres: Pres,
    map: HashMap<Mono, Scalar>,
}

impl Acc {
    pub fn new(pres: Pres) -> Acc {
        Acc { pres, map: HashMap::new() }
    }

    /// Add `c * mu^k * N(m)` where `m` may be unreduced.
    pub fn add_raw(&mut self, m: &Mono, c: &Scalar, k: i32) {
        if c.is_zero() {
            return;
        }
        if self.pres.is_reduced(m) {
            self.add_reduced(*m, c.shift(k));
            return;
        }
        for (k2, n, r) in self.pres.reduce(m).iter() {
            self.add_reduced(*r, c.shift(k + k2).scale_q(&Q::int(*n)));
        }
    }

    pub fn add_reduced(&mut self, m: Mono, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.map.entry(m) {
            std::collections::hash_map::Entry::Occupied(mut e) => {
                let s = e.get().add(&c);
                if s.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = s;
                }
            }
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn finish(self) -> Element {
        Element { pres: self.pres, terms: self.map.into_iter().collect() }
    }
}

impl Element {
    pub fn zero(pres: Pres) -> Element {
        Element { pres, terms: BTreeMap::new() }
    }

    pub fn scalar(pres: Pres, c: Scalar) -> Element {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Mono::ONE, c);
        }
        Element { pres, terms }
    }

    pub fn one(pres: Pres) -> Element {
        Element::scalar(pres, Scalar::one())
    }

    pub fn generator(pres: Pres, g: usize) -> Element {
        Element::monomial(pres, Mono::gen(g), Scalar::one())
    }

    /// `c * N(m)`, reducing `m` if needed.
    pub fn monomial(pres: Pres, m: Mono, c: Scalar) -> Element {
        let mut acc = Acc::new(pres);
        acc.add_raw(&m, &c, 0);
        acc.finish()
    }

    /// Normal form of a sum of words; each word is a list of generator indices.
    pub fn from_words(pres: Pres, words: &[(Scalar, Vec<usize>)]) -> Element {
        let mut acc = Acc::new(pres);
        for (c, w) in words {
            let mut m = Mono::ONE;
            let mut k = 0;
            for &g in w {
                let gm = Mono::gen(g);
                k += pres.cocycle(&m, &gm);
                m.0[g] += 1;
            }
            acc.add_raw(&m, c, k);
        }
        acc.finish()
    }

    /// Parse-free construction from generator names.
    pub fn word(pres: Pres, names: &[&str]) -> Result<Element> {
        let idx = names.iter().map(|n| pres.gen_index(n)).collect::<Result<Vec<_>>>()?;
        Ok(Element::from_words(pres, &[(Scalar::one(), idx)]))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn check(&self, o: &Element) -> Result<()> {
        if std::ptr::eq(self.pres, o.pres) {
            Ok(())
        } else {
            Err(Error::PresentationMismatch(self.pres.name.clone(), o.pres.name.clone()))
        }
    }

    pub fn try_add(&self, o: &Element) -> Result<Element> {
        self.check(o)?;
        Ok(self.add(o))
    }

    pub fn add(&self, o: &Element) -> Element {
        debug_assert!(std::ptr::eq(self.pres, o.pres));
        let mut terms = self.terms.clone();
        for (m, c) in &o.terms {
            match terms.get_mut(m) {
                Some(x) => {
                    *x = x.add(c);
                    if x.is_zero() {
                        terms.remove(m);
                    }
                }
                None => {
                    terms.insert(*m, c.clone());
                }
            }
        }
        Element { pres: self.pres, terms }
    }

    pub fn neg(&self) -> Element {
        Element { pres: self.pres, terms: self.terms.iter().map(|(m, c)| (*m, c.neg())).collect() }
    }

    pub fn sub(&self, o: &Element) -> Element {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        if s.is_zero() {
            return Element::zero(self.pres);
        }
        let terms: BTreeMap<Mono, Scalar> =
            self.terms.iter().map(|(m, c)| (*m, c.mul(s))).filter(|(_, c)| !c.is_zero()).collect();
        Element { pres: self.pres, terms }
    }

    pub fn try_mul(&self, o: &Element) -> Result<Element> {
        self.check(o)?;
        Ok(self.mul(o))
    }

    pub fn mul(&self, o: &Element) -> Element {
        debug_assert!(std::ptr::eq(self.pres, o.pres));
        let p = self.pres;
        let mut acc = Acc::new(p);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let k = p.cocycle(ma, mb);
                acc.add_raw(&ma.add(mb), &ca.mul(cb), k);
            }
        }
        acc.finish()
    }

    /// Product of monomials `N(a) N(b)` as a scalar-weighted element.
    pub fn mono_mul(pres: Pres, a: &Mono, b: &Mono) -> Element {
        let mut acc = Acc::new(pres);
        acc.add_raw(&a.add(b), &Scalar::one(), pres.cocycle(a, b));
        acc.finish()
    }

    pub fn pow(&self, k: u32) -> Element {
        let mut r = Element::one(self.pres);
        for _ in 0..k {
            r = r.mul(self);
        }
        r
    }

    /// Adjoint of a monomial: `N(e)^* = mu^k N(conj e)`.
    pub fn mono_adjoint(pres: Pres, m: &Mono) -> (i32, Mono) {
        let mut acc = Mono::ONE;
        let mut k = 0;
        for g in (0..pres.ngens()).rev() {
            let e = m.0[g];
            if e == 0 {
                continue;
            }
            let mut f = Mono::ONE;
            f.0[pres.gens[g].conj] = e;
            k += pres.cocycle(&acc, &f);
            acc = acc.add(&f);
        }
        (k, acc)
    }

    /// The *-involution, an antilinear anti-homomorphism.
    pub fn adjoint(&self) -> Element {
        let mut acc = Acc::new(self.pres);
        for (m, c) in &self.terms {
            let (k, mc) = Element::mono_adjoint(self.pres, m);
            acc.add_raw(&mc, &c.conj(), k);
        }
        acc.finish()
    }

    /// Torus degree when the element is homogeneous.
    pub fn torus_degree(&self) -> Option<Vec<i32>> {
        let mut it = self.terms.keys().map(|m| self.pres.torus_degree(m));
        let first = it.next().unwrap_or_else(|| vec![0; self.pres.torus_rank()]);
        for d in it {
            if d != first {
                return None;
            }
        }
        Some(first)
    }

    /// Split into torus-homogeneous components.
    pub fn homogeneous_parts(&self) -> BTreeMap<Vec<i32>, Element> {
        let mut out: BTreeMap<Vec<i32>, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(self.pres.torus_degree(m))
                .or_insert_with(|| Element::zero(self.pres))
                .terms
                .insert(*m, c.clone());
        }
        out
    }

    /// Largest total degree of a monomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    /// Scalar value of a constant element.
    pub fn as_scalar(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => self.terms.get(&Mono::ONE).cloned(),
            _ => None,
        }
    }

    /// Re-express in another presentation with the same generators (e.g. reduce
    /// an ambient element modulo the sphere relation).
    pub fn reinterpret(&self, pres: Pres) -> Element {
        let mut acc = Acc::new(pres);
        for (m, c) in &self.terms {
            acc.add_raw(m, c, 0);
        }
        acc.finish()
    }

    /// Substitute `mu = 1` in every coefficient.
    pub fn classical(&self) -> Element {
        let mut acc = Acc::new(self.pres);
        for (m, c) in &self.terms {
            let mut s = Scalar::zero();
            for t in c.terms() {
                s = s.add(&Scalar::term(t.c.clone(), 0, t.rad));
            }
            acc.add_reduced(*m, s);
        }
        acc.finish()
    }

    /// Apply the algebra homomorphism determined by generator images.
    pub fn substitute(&self, target: Pres, images: &[Element]) -> Element {
        let mut out = Element::zero(target);
        for (m, c) in &self.terms {
            let mut t = Element::scalar(target, c.clone());
            for g in 0..self.pres.ngens() {
                for _ in 0..m.0[g] {
                    t = t.mul(&images[g]);
                }
            }
            out = out.add(&t);
        }
        out
    }
}

/// Render a monomial as a `*`-separated product of generator names.
pub fn render_mono(pres: &Presentation, m: &Mono) -> String {
    let mut parts = Vec::new();
    for (g, gen) in pres.gens.iter().enumerate() {
        match m.0[g] {
            0 => {}
            1 => parts.push(gen.name.clone()),
            e => parts.push(format!("{}^{}", gen.name, e)),
        }
    }
    parts.join("*")
}

/// Render `c * m` in the expression grammar.
pub fn render_term(pres: &Presentation, m: &Mono, c: &Scalar) -> String {
    let ms = render_mono(pres, m);
    if ms.is_empty() {
        return format!("({c})");
    }
    if c.is_one() {
        ms
    } else if c.neg().is_one() {
        format!("-{ms}")
    } else {
        format!("({c})*{ms}")
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().rev().map(|(m, c)| render_term(self.pres, m, c)).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// The degree-two invariants `alpha, beta, x` of the seven-sphere.
pub fn invariant_generators() -> (Element, Element, Element) {
    let p = Presentation::s7();
    let g = |i: usize| Element::generator(p, i);
    let two = Scalar::int(2);
    let alpha = g(0).mul(&g(6)).add(&g(1).mul(&g(7))).scale(&two);
    let beta = g(1).mul(&g(2)).sub(&g(0).mul(&g(3))).scale(&two);
    let mut x = Element::zero(p);
    for i in 0..4 {
        let t = g(i).mul(&g(i + 4));
        x = if i < 2 { x.add(&t) } else { x.sub(&t) };
    }
    (alpha, beta, x)
}

/// The embedding `A(S^4_theta) -> A(S^7_theta')` on generators.
pub fn s4_images() -> Vec<Element> {
    let (a, b, x) = invariant_generators();
    vec![a.clone(), b.clone(), a.adjoint(), b.adjoint(), x]
}

/// Apply the embedding of the four-sphere into the seven-sphere.
pub fn embed_s4(e: &Element) -> Element {
    thread_local! {
        static CACHE: RefCell<HashMap<Mono, Element>> = RefCell::new(HashMap::new());
    }
    let s7 = Presentation::s7();
    let imgs = s4_images();
    let mut acc = Acc::new(s7);
    for (m, c) in &e.terms {
        let img = CACHE.with(|cache| {
            if let Some(v) = cache.borrow().get(m) {
                return v.clone();
            }
            let mut t = Element::one(s7);
            for g in 0..5 {
                for _ in 0..m.0[g] {
                    t = t.mul(&imgs[g]);
                }
            }
            cache.borrow_mut().insert(*m, t.clone());
            t
        });
        for (mm, cc) in &img.terms {
            acc.add_reduced(*mm, cc.mul(c));
        }
    }
    acc.finish()
}

/// Linear constraints on the phase exponents `q_ij` of the seven-sphere.
#[derive(Clone, Debug)]
pub struct PhaseConstraintReport {
    /// Each equation as coefficients on `(q12, q13, q14, q23, q24, q34)` and a right-hand side.
    pub equations: Vec<(Vec<i64>, i64, String)>,
    pub rank: usize,
    pub consistent: bool,
    pub unique: bool,
    pub solution: Option<Vec<Vec<i32>>>,
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn pair_index(i: usize, j: usize) -> (usize, i64) {
    let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
    (PAIRS.iter().position(|&p| p == (a, b)).unwrap(), s)
}

/// Derive the phase matrix forced by the coaction being a *-homomorphism and
/// by the invariants satisfying `alpha beta = mu^2 beta alpha`.
///
/// `extra` appends further equations `(coefficients, rhs)`.
pub fn solve_phase_constraints_with(extra: &[(Vec<i64>, i64)]) -> PhaseConstraintReport {
    // Symbolic coaction on z^1..z^4 (holomorphic index, H-label); H is commutative.
    // Delta(z1) = z1 (x) w1 - z2 (x) wb2, Delta(z2) = z1 (x) w2 + z2 (x) wb1.
    let coact = |i: usize| -> Vec<(usize, i64, &'static str)> {
        let base = if i < 2 { 0 } else { 2 };
        if i % 2 == 0 {
            vec![(base, 1, "w1"), (base + 1, -1, "wb2")]
        } else {
            vec![(base, 1, "w2"), (base + 1, 1, "wb1")]
        }
    };
    let mut equations: Vec<(Vec<i64>, i64, String)> = Vec::new();
    // For z^i z^j = mu^{q_ij} z^j z^i, compare the coefficient of a (x) b on both
    // sides: a product z^k z^l of images is brought to order (min, max); its phase
    // is q_kl if k > l. Matching terms give linear equations on q.
    for &(i, j) in PAIRS.iter() {
        let mut lhs: BTreeMap<(usize, usize, String), Vec<(Vec<i64>, i64)>> = BTreeMap::new();
        let mut rhs: BTreeMap<(usize, usize, String), Vec<(Vec<i64>, i64)>> = BTreeMap::new();
        let record = |map: &mut BTreeMap<(usize, usize, String), Vec<(Vec<i64>, i64)>>,
                          first: usize,
                          second: usize,
                          extra_q: Option<(usize, usize)>| {
            for (k, ck, hk) in coact(first) {
                for (l, cl, hl) in coact(second) {
                    let mut form = vec![0i64; 6];
                    if let Some((a, b)) = extra_q {
                        let (idx, s) = pair_index(a, b);
                        form[idx] += s;
                    }
                    if k > l {
                        let (idx, s) = pair_index(k, l);
                        form[idx] += s;
                    }
                    let mut h = [hk, hl];
                    h.sort();
                    let key = (k.min(l), k.max(l), format!("{}{}", h[0], h[1]));
                    map.entry(key).or_default().push((form, ck * cl));
                }
            }
        };
        record(&mut lhs, i, j, None);
        record(&mut rhs, j, i, Some((i, j)));
        for (key, terms) in &lhs {
            let others = rhs.get(key).cloned().unwrap_or_default();
            // Both sides are single phased terms here; equate exponents when
            // the coefficients agree, otherwise the sums must match pairwise.
            for (fl, cl) in terms {
                if let Some((fr, _)) = others.iter().find(|(_, cr)| cr == cl) {
                    let coeffs: Vec<i64> = fl.iter().zip(fr).map(|(a, b)| a - b).collect();
                    if coeffs.iter().any(|&c| c != 0) {
                        equations.push((
                            coeffs,
                            0,
                            format!("z{}z{} coaction term {}{}", i + 1, j + 1, key.2, ""),
                        ));
                    }
                }
            }
        }
    }
    // Invariants: alpha = 2(z1 zb3 + z2 zb4), beta = 2(-z1 z4 + z2 z3).
    // B(deg a, deg b) = 2 for every pair of terms.
    let alpha_terms: [[i64; 4]; 2] = [[1, 0, -1, 0], [0, 1, 0, -1]];
    let beta_terms: [[i64; 4]; 2] = [[1, 0, 0, 1], [0, 1, 1, 0]];
    for s in &alpha_terms {
        for t in &beta_terms {
            let mut form = vec![0i64; 6];
            for mu in 0..4 {
                for nu in 0..4 {
                    if mu == nu || s[mu] == 0 || t[nu] == 0 {
                        continue;
                    }
                    let (idx, sg) = pair_index(mu, nu);
                    form[idx] += sg * s[mu] * t[nu];
                }
            }
            equations.push((form, 2, "alpha beta = mu^2 beta alpha".into()));
        }
    }
    for (c, r) in extra {
        equations.push((c.clone(), *r, "extra".into()));
    }
    // Rational elimination on the augmented system.
    let mut rows: Vec<Vec<Q>> = equations
        .iter()
        .map(|(c, r, _)| c.iter().map(|&x| Q::int(x)).chain(std::iter::once(Q::int(*r))).collect())
        .collect();
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..6 {
        if let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) {
            rows.swap(rank, p);
            let inv = rows[rank][col].inv();
            for x in rows[rank].iter_mut() {
                *x = x.mul(&inv);
            }
            for r in 0..rows.len() {
                if r != rank && !rows[r][col].is_zero() {
                    let f = rows[r][col].clone();
                    for c in 0..7 {
                        let v = rows[r][c].sub(&f.mul(&rows[rank][c]));
                        rows[r][c] = v;
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
    }
    let consistent = rows[rank..].iter().all(|r| r[6].is_zero());
    let unique = consistent && rank == 6;
    let solution = if unique {
        let mut qv = [0i32; 6];
        for (r, &col) in pivots.iter().enumerate() {
            qv[col] = rows[r][6].to_f64().round() as i32;
        }
        let mut m = vec![vec![0; 4]; 4];
        for (k, &(i, j)) in PAIRS.iter().enumerate() {
            m[i][j] = qv[k];
            m[j][i] = -qv[k];
        }
        Some(m)
    } else {
        None
    };
    PhaseConstraintReport { equations, rank, consistent, unique, solution }
}

/// Solve the phase constraints with no extra equations.
pub fn solve_phase_constraints() -> PhaseConstraintReport {
    solve_phase_constraints_with(&[])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s7(names: &[&str]) -> Element {
        Element::word(Presentation::s7(), names).unwrap()
    }

    #[test]
    fn reorder_phases() {
        let lhs = s7(&["z3", "z1"]);
        assert_eq!(lhs, s7(&["z1", "z3"]).scale(&Scalar::mu(-1)));
        let s4 = Presentation::s4();
        let ba = Element::word(s4, &["b", "a"]).unwrap();
        let ab = Element::word(s4, &["a", "b"]).unwrap();
        assert_eq!(ba, ab.scale(&Scalar::mu(-2)));
    }

    #[test]
    fn sphere_rule() {
        let lhs = s7(&["z4", "zb4"]);
        let rhs = Element::one(Presentation::s7())
            .sub(&s7(&["z1", "zb1"]))
            .sub(&s7(&["z2", "zb2"]))
            .sub(&s7(&["z3", "zb3"]));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn adjoint_examples() {
        let p = Presentation::s7();
        let z1 = s7(&["z1"]);
        assert_eq!(z1.adjoint().mul(&z1), s7(&["zb1", "z1"]));
        let e = s7(&["z1", "z3"]).scale(&Scalar::mu(1));
        let expect = s7(&["zb3", "zb1"]).scale(&Scalar::mu(-1));
        assert_eq!(e.adjoint(), expect);
        let _ = p;
    }

    #[test]
    fn invariants_satisfy_s4_relations() {
        let (a, b, x) = invariant_generators();
        let one = Element::one(Presentation::s7());
        let r = a.mul(&a.adjoint()).add(&b.mul(&b.adjoint())).add(&x.mul(&x)).sub(&one);
        assert!(r.is_zero(), "{r}");
        assert!(a.mul(&b).sub(&b.mul(&a).scale(&Scalar::mu(2))).is_zero());
        assert!(a.mul(&b.adjoint()).sub(&b.adjoint().mul(&a).scale(&Scalar::mu(-2))).is_zero());
        for e in [&a, &b, &x] {
            assert!(x.mul(e).sub(&e.mul(&x)).is_zero());
        }
    }

    #[test]
    fn torus_degrees() {
        let p = Presentation::s7();
        let m = s7(&["z1", "zb3"]);
        assert_eq!(m.torus_degree().unwrap(), vec![1, 0, -1, 0]);
        let (a, _, x) = invariant_generators();
        let aa = a.mul(&a.adjoint());
        assert!(aa.terms.keys().all(|m| p.word_degree(m) == vec![0, 0]));
        let s4 = Presentation::s4();
        let aa4 = Element::word(s4, &["a", "ab"]).unwrap();
        assert_eq!(aa4.torus_degree().unwrap(), vec![0, 0]);
        assert_eq!(x.torus_degree().unwrap(), vec![0, 0, 0, 0]);
    }

    #[test]
    fn graded_basis_examples() {
        let s7 = Presentation::s7();
        let b = s7.graded_basis(1, Some(&[1, 0, 0, 0]));
        assert_eq!(b, vec![Mono::gen(0)]);
        let s4 = Presentation::s4();
        let b = s4.graded_basis(2, Some(&[0, 0]));
        assert_eq!(b.len(), 4);
        assert!(s7.graded_basis(0, Some(&[1, 0, 0, 0])).is_empty());
    }

    #[test]
    fn phase_constraints() {
        let r = solve_phase_constraints();
        assert!(r.unique);
        assert_eq!(r.solution.unwrap(), theta_prime());
        let bad = solve_phase_constraints_with(&[(vec![1, 0, 0, 0, 0, 0], 1)]);
        assert!(!bad.consistent);
    }
}
