//! Kets over the seven-sphere, the projections `p_(n)` over the four-sphere,
//! Grassmannian connections and the module of coequivariant maps.
//!
//! `|psi_1>, |psi_2>` are the two orthonormal columns of the basic
//! `4 x 2` matrix. For `n >= 1` the symmetrized kets live in
//! `(C^4)^{(x) n}` with the first tensor slot most significant in the
//! component index.

use std::collections::BTreeMap;

use crate::algebra::{embed_s4, Element, Mono, Pres, Presentation};
use crate::forms::{Calculus, ElementMatrix, Form, FormMatrix, Matrix, Word};
use crate::linalg::{solve_in_span, to_fractions, Echelon};
use crate::scalars::{Scalar, ScalarFraction};
use crate::{Error, Result};

/// Largest `n` accepted by the projection family.
pub const MAX_N: usize = 4;

/// Column of algebra elements.
#[derive(Clone, Debug, PartialEq)]
pub struct Ket {
    pub comps: Vec<Element>,
}

impl Ket {
    pub fn new(comps: Vec<Element>) -> Ket {
        Ket { comps }
    }

    pub fn zero(pres: Pres, len: usize) -> Ket {
        Ket { comps: vec![Element::zero(pres); len] }
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn pres(&self) -> Pres {
        self.comps[0].pres
    }

    /// `<self|o> = sum_j self_j^* o_j`.
    pub fn bra_ket(&self, o: &Ket) -> Result<Element> {
        if self.len() != o.len() {
            return Err(Error::Shape(format!("kets of length {} and {}", self.len(), o.len())));
        }
        let mut acc = Element::zero(self.pres());
        for (a, b) in self.comps.iter().zip(&o.comps) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = acc.add(&a.adjoint().mul(b));
        }
        Ok(acc)
    }

    /// `<self| calc-d |o>` as a one-form.
    pub fn bra_dket(&self, o: &Ket, calc: Calculus) -> Result<Form> {
        if self.len() != o.len() {
            return Err(Error::Shape(format!("kets of length {} and {}", self.len(), o.len())));
        }
        let p = self.pres();
        let mut acc = Form::zero(p, calc);
        for (a, b) in self.comps.iter().zip(&o.comps) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = acc.add(&Form::from_element(&a.adjoint(), calc).mul(&Form::d(b, calc)));
        }
        Ok(acc)
    }

    /// Tensor product with component `(i, j) -> self_i o_j` at index `i * len(o) + j`.
    pub fn tensor(&self, o: &Ket) -> Ket {
        let mut comps = Vec::with_capacity(self.len() * o.len());
        for a in &self.comps {
            for b in &o.comps {
                comps.push(if a.is_zero() || b.is_zero() { Element::zero(a.pres) } else { a.mul(b) });
            }
        }
        Ket { comps }
    }

    pub fn add(&self, o: &Ket) -> Ket {
        Ket { comps: self.comps.iter().zip(&o.comps).map(|(a, b)| a.add(b)).collect() }
    }

    pub fn scale(&self, s: &Scalar) -> Ket {
        Ket { comps: self.comps.iter().map(|a| a.scale(s)).collect() }
    }

    /// Specialize `mu = 1` componentwise.
    pub fn classical(&self) -> Ket {
        Ket { comps: self.comps.iter().map(|a| a.classical()).collect() }
    }
}

fn s7g(name: &str) -> Element {
    Presentation::s7().gen(name).expect("seven-sphere generator")
}

/// `|psi_1> = (z1, -zb2, z3, -zb4)`, `|psi_2> = (z2, zb1, z4, zb3)`.
pub fn psi_kets() -> [Ket; 2] {
    [
        Ket::new(vec![s7g("z1"), s7g("zb2").neg(), s7g("z3"), s7g("zb4").neg()]),
        Ket::new(vec![s7g("z2"), s7g("zb1"), s7g("z4"), s7g("zb3")]),
    ]
}

/// Kets with the extra phases `mu` on the second component.
pub fn psi_tilde_kets() -> [Ket; 2] {
    let mu = Scalar::mu(1);
    [
        Ket::new(vec![s7g("z1"), s7g("zb2").scale(&mu).neg(), s7g("z3"), s7g("zb4").neg()]),
        Ket::new(vec![s7g("z2"), s7g("zb1").scale(&mu), s7g("z4"), s7g("zb3")]),
    ]
}

pub fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) as u64 / (i + 1) as u64;
    }
    r
}

/// `a_k^2 = binom(n, k-1)` for `k = 1..n+1`.
pub fn normalization_squares(n: usize) -> Vec<u64> {
    (0..=n).map(|k| binom(n, k)).collect()
}

fn check_n(n: usize, max: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::Invalid("n must be at least 1".into()));
    }
    if n > max {
        return Err(Error::Invalid(format!("n = {n} exceeds the cap {max}")));
    }
    Ok(())
}

/// Label sequences `r in {0,1}^n` with exactly `k` entries equal to 1, in
/// lexicographic order. Entry `0` stands for `psi_1` and `1` for `psi_2`.
pub fn label_class(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for bits in 0..(1usize << n) {
        let r: Vec<usize> = (0..n).map(|t| (bits >> (n - 1 - t)) & 1).collect();
        if r.iter().sum::<usize>() == k {
            out.push(r);
        }
    }
    out
}

/// Unnormalized symmetrized kets `u_k = sum over label sequences of class k`
/// of `psi_{r_1} (x) ... (x) psi_{r_n}`, for `k = 0..n`.
pub fn symmetrized_kets(n: usize) -> Result<Vec<Ket>> {
    check_n(n, MAX_N)?;
    let psi = psi_kets();
    let mut prev: Vec<Ket> = vec![psi[0].clone(), psi[1].clone()];
    for m in 2..=n {
        let len = prev[0].len() * 4;
        let mut next = Vec::with_capacity(m + 1);
        for k in 0..=m {
            let mut ket = Ket::zero(Presentation::s7(), len);
            if k < m {
                ket = ket.add(&psi[0].tensor(&prev[k]));
            }
            if k > 0 {
                ket = ket.add(&psi[1].tensor(&prev[k - 1]));
            }
            next.push(ket);
        }
        prev = next;
    }
    Ok(prev)
}

/// `1 / sqrt(b)` as an exact scalar.
pub fn inv_sqrt(b: u64) -> Scalar {
    Scalar::sqrt(b).mul(&Scalar::frac(1, b as i64))
}

/// Normalized kets `|phi_k> = a_k^{-1} u_k`.
pub fn phi_kets(n: usize) -> Result<Vec<Ket>> {
    let u = symmetrized_kets(n)?;
    Ok(u.iter().enumerate().map(|(k, ket)| ket.scale(&inv_sqrt(binom(n, k)))).collect())
}

/// Matrix whose columns are the given kets.
pub fn ket_matrix(kets: &[Ket]) -> ElementMatrix {
    Matrix::from_fn(kets[0].len(), kets.len(), |i, k| kets[k].comps[i].clone())
}

/// `p_(n) = sum_k binom(n,k)^{-1} |u_k><u_k|` over the seven-sphere.
pub fn projection_s7(n: usize) -> Result<ElementMatrix> {
    let u = symmetrized_kets(n)?;
    let len = u[0].len();
    let s7 = Presentation::s7();
    let adj: Vec<Vec<Element>> = u.iter().map(|k| k.comps.iter().map(|e| e.adjoint()).collect()).collect();
    let mut out = Matrix::from_fn(len, len, |_, _| Element::zero(s7));
    for i in 0..len {
        for j in 0..len {
            let mut acc = Element::zero(s7);
            for (k, ket) in u.iter().enumerate() {
                let a = &ket.comps[i];
                let b = &adj[k][j];
                if a.is_zero() || b.is_zero() {
                    continue;
                }
                acc = acc.add(&a.mul(b).scale(&Scalar::frac(1, binom(n, k) as i64)));
            }
            out.set(i, j, acc);
        }
    }
    Ok(out)
}

/// Torus degree on the four-sphere of a splitting word `u^a v^b` of the
/// seven-sphere: `alpha -> u v^-1`, `beta -> u v`.
fn s4_degree_of_word(w: &[i32]) -> Option<[i32; 2]> {
    let (a, b) = (w[0], w[1]);
    if (a - b) % 2 != 0 {
        return None;
    }
    Some([(a - b) / 2, (a + b) / 2])
}

/// Write a coinvariant element of the seven-sphere as an element of the
/// four-sphere, by an exact solve over the embedded monomial basis.
pub fn descend(e: &Element) -> Result<Element> {
    let s7 = Presentation::s7();
    let s4 = Presentation::s4();
    if !std::ptr::eq(e.pres, s7) {
        return Err(Error::PresentationMismatch(e.pres.name.clone(), s7.name.clone()));
    }
    let mut parts: BTreeMap<Vec<i32>, Element> = BTreeMap::new();
    for (m, c) in &e.terms {
        parts.entry(s7.word_degree(m)).or_insert_with(|| Element::zero(s7)).terms.insert(*m, c.clone());
    }
    let mut out = Element::zero(s4);
    for (w, part) in parts {
        let deg = s4_degree_of_word(&w).ok_or_else(|| Error::NotCoinvariant(format!("{part}")))?;
        let basis = s4.graded_basis(part.degree() / 2, Some(&deg));
        let images: Vec<Element> = basis.iter().map(|m| embed_s4(&Element::monomial(s4, *m, Scalar::one()))).collect();
        let sol = solve_in_span(&part, &images).ok_or_else(|| Error::NotCoinvariant(format!("{part}")))?;
        for (m, c) in basis.iter().zip(sol) {
            if c.is_zero() {
                continue;
            }
            let c = c.to_scalar().ok_or_else(|| Error::Invalid("non-polynomial descent coefficient".into()))?;
            out = out.add(&Element::monomial(s4, *m, c));
        }
    }
    Ok(out)
}

/// Projection over the four-sphere together with its rank index `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectionMatrix {
    pub n: usize,
    pub matrix: ElementMatrix,
}

fn word_b(a: [i32; 2], b: [i32; 2]) -> i32 {
    let q = &Presentation::s7().word_q;
    let mut k = 0;
    for i in 0..2 {
        for j in 0..2 {
            k += q[i][j] * a[i] * b[j];
        }
    }
    k
}

/// Splitting degree of component `i` of either basic ket.
fn component_degree(i: usize) -> [i32; 2] {
    [[1, 0], [-1, 0], [0, 1], [0, -1]][i]
}

/// Phase exponent `e` with `f_1 ... f_m = mu^e f_{target[0]} ... f_{target[m-1]}`
/// for homogeneous factors of splitting degrees `degs`.
fn reorder_exponent(degs: &[[i32; 2]], target: &[usize]) -> i32 {
    let mut pos = vec![0; degs.len()];
    for (p, &f) in target.iter().enumerate() {
        pos[f] = p;
    }
    let mut e = 0;
    for x in 0..degs.len() {
        for y in x + 1..degs.len() {
            if pos[y] < pos[x] {
                e += word_b(degs[x], degs[y]);
            }
        }
    }
    e
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn digits(mut i: usize, n: usize) -> Vec<usize> {
    let mut d = vec![0; n];
    for t in (0..n).rev() {
        d[t] = i % 4;
        i /= 4;
    }
    d
}

/// The basic projection over the four-sphere, obtained by descending
/// `|psi_1><psi_1| + |psi_2><psi_2|`.
pub fn basic_projection() -> Result<ElementMatrix> {
    let p7 = projection_s7(1)?;
    let data = p7.data.iter().map(descend).collect::<Result<Vec<_>>>()?;
    Ok(Matrix { rows: 4, cols: 4, data })
}

/// Closed form of the basic projection in the generators `a, b, ab, bb, x`.
pub fn explicit_p1() -> ElementMatrix {
    let s4 = Presentation::s4();
    let g = |n: &str| s4.gen(n).expect("four-sphere generator");
    let one = Element::one(s4);
    let half = Scalar::frac(1, 2);
    let mu = Scalar::mu(1);
    let mub = Scalar::mu(-1);
    let z = Element::zero(s4);
    let rows = [
        [one.add(&g("x")), z.clone(), g("a"), g("b")],
        [z.clone(), one.add(&g("x")), g("bb").scale(&mu).neg(), g("ab").scale(&mub)],
        [g("ab"), g("b").scale(&mub).neg(), one.sub(&g("x")), z.clone()],
        [g("bb"), g("a").scale(&mu), z.clone(), one.sub(&g("x"))],
    ];
    Matrix::from_fn(4, 4, |i, j| rows[i][j].scale(&half))
}

/// Closed form of the projection built from the phase-shifted kets.
pub fn explicit_p1_tilde() -> ElementMatrix {
    let s4 = Presentation::s4();
    let g = |n: &str| s4.gen(n).expect("four-sphere generator");
    let one = Element::one(s4);
    let half = Scalar::frac(1, 2);
    let z = Element::zero(s4);
    let rows = [
        [one.add(&g("x")), z.clone(), g("a"), g("b")],
        [z.clone(), one.add(&g("x")), g("bb").scale(&Scalar::mu(2)).neg(), g("ab")],
        [g("ab"), g("b").scale(&Scalar::mu(-2)).neg(), one.sub(&g("x")), z.clone()],
        [g("bb"), g("a"), z.clone(), one.sub(&g("x"))],
    ];
    Matrix::from_fn(4, 4, |i, j| rows[i][j].scale(&half))
}

/// `p_(n)` over the four-sphere.
///
/// With `P^s_{IJ} = p_{i_s(1) j_1} ... p_{i_s(n) j_n}` for a permutation `s`,
/// every product of basic entries reorders to a fixed phase times the
/// corresponding product of ket components, because the splitting degree of
/// a ket component depends only on its row. Averaging over `s` with these
/// phases removed yields `sum_k a_k^{-2} |u_k><u_k|`.
pub fn projection(n: usize) -> Result<ProjectionMatrix> {
    check_n(n, MAX_N)?;
    let p1 = basic_projection()?;
    if n == 1 {
        return Ok(ProjectionMatrix { n, matrix: p1 });
    }
    let s4 = Presentation::s4();
    let perms = permutations(n);
    let fact: i64 = (1..=n as i64).product();
    let len = 4usize.pow(n as u32);
    let mut data = Vec::with_capacity(len * len);
    for ii in 0..len {
        let id = digits(ii, n);
        for jj in 0..len {
            let jd = digits(jj, n);
            let mut acc = Element::zero(s4);
            for s in &perms {
                if (0..n).any(|t| p1.get(id[s[t]], jd[t]).is_zero()) {
                    continue;
                }
                // factors A_0 B_0 ... A_{n-1} B_{n-1} with A_t of row i_s(t), B_t of column j_t
                let mut degs = Vec::with_capacity(2 * n);
                for t in 0..n {
                    degs.push(component_degree(id[s[t]]));
                    let d = component_degree(jd[t]);
                    degs.push([-d[0], -d[1]]);
                }
                let mut inv = vec![0; n];
                for t in 0..n {
                    inv[s[t]] = t;
                }
                let mut target: Vec<usize> = (0..n).map(|u| 2 * inv[u]).collect();
                target.extend((0..n).rev().map(|t| 2 * t + 1));
                let e = reorder_exponent(&degs, &target);
                let mut prod = p1.get(id[s[0]], jd[0]).clone();
                for t in 1..n {
                    prod = prod.mul(p1.get(id[s[t]], jd[t]));
                }
                acc = acc.add(&prod.scale(&Scalar::mu(-e)));
            }
            data.push(acc.scale(&Scalar::frac(1, fact)));
        }
    }
    Ok(ProjectionMatrix { n, matrix: Matrix { rows: len, cols: len, data } })
}

/// Outcome of the projection checks.
#[derive(Clone, Debug)]
pub struct ProjectionReport {
    pub n: usize,
    pub size: usize,
    pub idempotent: bool,
    pub selfadjoint: bool,
    pub trace: Element,
    /// The four-sphere matrix embeds onto `sum_k a_k^{-2} |u_k><u_k|`.
    pub matches_kets: bool,
    /// `direct` for `p^2 = p` by multiplication, `gram` for the certificate
    /// `U^* U = diag(a_k^2)` with `p = U diag(a_k^{-2}) U^*`.
    pub method: &'static str,
}

impl ProjectionReport {
    pub fn pass(&self) -> bool {
        self.idempotent && self.selfadjoint && self.matches_kets
    }
}

impl ProjectionMatrix {
    pub fn size(&self) -> usize {
        self.matrix.rows
    }

    pub fn trace(&self) -> Result<Element> {
        self.matrix.trace()
    }

    pub fn is_selfadjoint(&self) -> bool {
        self.matrix.adjoint() == self.matrix
    }

    pub fn is_idempotent_direct(&self) -> Result<bool> {
        Ok(self.matrix.try_mul(&self.matrix)? == self.matrix)
    }

    /// Entrywise image in the seven-sphere.
    pub fn lift(&self) -> ElementMatrix {
        self.matrix.map(embed_s4)
    }

    /// Full certification; `direct` selects multiplication instead of the
    /// Gram certificate for idempotency.
    pub fn verify(&self, direct: bool) -> Result<ProjectionReport> {
        let n = self.n;
        let u = symmetrized_kets(n)?;
        let um = ket_matrix(&u);
        let gram = um.adjoint().try_mul(&um)?;
        let s7 = Presentation::s7();
        let gram_ok = (0..=n).all(|k| {
            (0..=n).all(|l| {
                let want = if k == l { Element::scalar(s7, Scalar::int(binom(n, k) as i64)) } else { Element::zero(s7) };
                *gram.get(k, l) == want
            })
        });
        let matches_kets = self.lift() == projection_s7(n)?;
        let idempotent = if direct { self.is_idempotent_direct()? } else { gram_ok && matches_kets };
        Ok(ProjectionReport {
            n,
            size: self.size(),
            idempotent,
            selfadjoint: self.is_selfadjoint(),
            trace: self.trace()?,
            matches_kets,
            method: if direct { "direct" } else { "gram" },
        })
    }
}

/// Partial isometry between the basic projection and its phase-shifted twin.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub u_isometry: bool,
    pub u_tilde_isometry: bool,
    pub v_star_v_is_p: bool,
    pub v_v_star_is_p_tilde: bool,
    pub classical_equal: bool,
}

impl EquivalenceReport {
    pub fn pass(&self) -> bool {
        self.u_isometry && self.u_tilde_isometry && self.v_star_v_is_p && self.v_v_star_is_p_tilde && self.classical_equal
    }
}

pub fn projection_equivalence_check() -> Result<EquivalenceReport> {
    let s7 = Presentation::s7();
    let u = ket_matrix(&psi_kets());
    let ut = ket_matrix(&psi_tilde_kets());
    let i2 = ElementMatrix::identity(s7, 2);
    let v = ut.try_mul(&u.adjoint())?;
    let p = u.try_mul(&u.adjoint())?;
    let pt = ut.try_mul(&ut.adjoint())?;
    let classical = |m: &ElementMatrix| m.map(|e| e.classical());
    Ok(EquivalenceReport {
        u_isometry: u.adjoint().try_mul(&u)? == i2,
        u_tilde_isometry: ut.adjoint().try_mul(&ut)? == i2,
        v_star_v_is_p: v.adjoint().try_mul(&v)? == p,
        v_v_star_is_p_tilde: v.try_mul(&v.adjoint())? == pt,
        classical_equal: classical(&p) == classical(&pt),
    })
}

/// `A_kl = <phi_k| d |phi_l>` in the chosen calculus over the seven-sphere.
pub fn grassmann_connection(n: usize, calc: Calculus) -> Result<FormMatrix> {
    let phi = phi_kets(n)?;
    let mut data = Vec::with_capacity((n + 1) * (n + 1));
    for k in 0..=n {
        for l in 0..=n {
            data.push(phi[k].bra_dket(&phi[l], calc)?);
        }
    }
    Ok(Matrix { rows: n + 1, cols: n + 1, data })
}

/// Structural checks of the connection one-form modulo the sphere relations.
#[derive(Clone, Debug)]
pub struct ConnectionReport {
    pub n: usize,
    pub anti_hermitian: bool,
    pub tridiagonal: bool,
}

pub fn connection_structure(a: &FormMatrix, n: usize) -> Result<ConnectionReport> {
    let mut anti = true;
    let mut tri = true;
    for k in 0..=n {
        for l in 0..=n {
            let s = a.get(k, l).add(&a.get(l, k).adjoint());
            if !s.is_zero_mod_sphere()? {
                anti = false;
            }
            if k.abs_diff(l) > 1 && !a.get(k, l).is_zero_mod_sphere()? {
                tri = false;
            }
        }
    }
    Ok(ConnectionReport { n, anti_hermitian: anti, tridiagonal: tri })
}

/// Coefficients `C[k][l][r][s]` with `A^(n)_kl = sum_rs C A^(1)_rs`, from
/// the derivation rule on symmetric tensors.
pub fn gauge_coefficients(n: usize) -> Vec<Vec<[[Scalar; 2]; 2]>> {
    let zero = || [[Scalar::zero(), Scalar::zero()], [Scalar::zero(), Scalar::zero()]];
    let mut out: Vec<Vec<[[Scalar; 2]; 2]>> = (0..=n).map(|_| (0..=n).map(|_| zero()).collect()).collect();
    for k in 0..=n {
        for l in 0..=n {
            let mut counts = [[0i64; 2]; 2];
            for r in label_class(n, k) {
                for s in label_class(n, l) {
                    for t in 0..n {
                        if (0..n).all(|u| u == t || r[u] == s[u]) {
                            counts[r[t]][s[t]] += 1;
                        }
                    }
                }
            }
            let norm = inv_sqrt(binom(n, k)).mul(&inv_sqrt(binom(n, l)));
            for r in 0..2 {
                for s in 0..2 {
                    out[k][l][r][s] = norm.mul(&Scalar::int(counts[r][s]));
                }
            }
        }
    }
    out
}

/// Anti-hermitian basis `T_1 = diag(i,-i)`, `T_2 = [[0,1],[-1,0]]`,
/// `T_3 = [[0,i],[i,0]]` of `su(2)`.
pub fn su2_basis() -> [[[Scalar; 2]; 2]; 3] {
    let i = Scalar::i();
    let z = Scalar::zero;
    [
        [[i.clone(), z()], [z(), i.neg()]],
        [[z(), Scalar::one()], [Scalar::int(-1), z()]],
        [[z(), i.clone()], [i, z()]],
    ]
}

/// Matrices of the derived representation on `Sym^n` in the normalized basis.
pub fn derived_representation(n: usize) -> Vec<Vec<Vec<Scalar>>> {
    let c = gauge_coefficients(n);
    su2_basis()
        .iter()
        .map(|t| {
            (0..=n)
                .map(|k| {
                    (0..=n)
                        .map(|l| {
                            let mut s = Scalar::zero();
                            for r in 0..2 {
                                for q in 0..2 {
                                    s = s.add(&c[k][l][r][q].mul(&t[r][q]));
                                }
                            }
                            s
                        })
                        .collect()
                })
                .collect()
        })
        .collect()
}

/// Result of writing `A^(n)` over the three one-forms of `A^(1)`.
#[derive(Clone, Debug)]
pub struct Su2Report {
    pub n: usize,
    pub traceless_base: bool,
    pub solvable: bool,
    pub matches_derived_representation: bool,
    /// Solved coefficient of `omega_a` in each entry.
    pub coefficients: Vec<Vec<[Scalar; 3]>>,
}

impl Su2Report {
    pub fn pass(&self) -> bool {
        self.traceless_base && self.solvable && self.matches_derived_representation
    }
}

fn form_vector(f: &Form) -> Result<BTreeMap<(Word, Mono), ScalarFraction>> {
    Ok(to_fractions(&f.reduce_sphere()?.terms))
}

/// Solve `A^(n) = sum_a rho'_n(T_a) omega_a` where `A^(1) = sum_a T_a omega_a`.
pub fn su2_valuedness_check(n: usize) -> Result<Su2Report> {
    let fo = Calculus::FirstOrder;
    let a1 = grassmann_connection(1, fo)?;
    let half = Scalar::frac(1, 2);
    let minus_half_i = Scalar::i().mul(&half).neg();
    let omega = [
        a1.get(0, 0).sub(a1.get(1, 1)).scale(&minus_half_i),
        a1.get(0, 1).sub(a1.get(1, 0)).scale(&half),
        a1.get(0, 1).add(a1.get(1, 0)).scale(&minus_half_i),
    ];
    let traceless_base = a1.get(0, 0).add(a1.get(1, 1)).is_zero_mod_sphere()?;
    let mut ech: Echelon<(Word, Mono), ScalarFraction> = Echelon::new();
    for w in &omega {
        ech.insert(form_vector(w)?);
    }
    let an = grassmann_connection(n, fo)?;
    let rho = derived_representation(n);
    let mut solvable = true;
    let mut matches = true;
    let mut coefficients = Vec::new();
    for k in 0..=n {
        let mut row = Vec::new();
        for l in 0..=n {
            let target = form_vector(an.get(k, l))?;
            let mut coeff = [Scalar::zero(), Scalar::zero(), Scalar::zero()];
            match ech.solve(&target) {
                None => solvable = false,
                Some(sol) => {
                    for (i, c) in sol {
                        match c.to_scalar() {
                            Some(s) => coeff[i] = s,
                            None => solvable = false,
                        }
                    }
                }
            }
            for (a, c) in coeff.iter().enumerate() {
                if *c != rho[a][k][l] {
                    matches = false;
                }
            }
            row.push(coeff);
        }
        coefficients.push(row);
    }
    Ok(Su2Report { n, traceless_base, solvable, matches_derived_representation: matches, coefficients })
}

/// Diagonal and off-diagonal gauge coefficients relative to the basic
/// pairings: `A_kk = c_k <psi_1|d psi_1>`, `A_{k,k+1} = s_k <psi_1|d psi_2>`,
/// `A_{k+1,k} = s_k <psi_2|d psi_1>`.
#[derive(Clone, Debug)]
pub struct GaugeIdentities {
    pub n: usize,
    pub diagonal: Vec<i64>,
    /// Squares of the off-diagonal factors.
    pub off_diagonal_squares: Vec<i64>,
    pub verified: bool,
}

pub fn gauge_identities(n: usize) -> Result<GaugeIdentities> {
    let fo = Calculus::FirstOrder;
    let a1 = grassmann_connection(1, fo)?;
    let an = grassmann_connection(n, fo)?;
    let mut diagonal = Vec::new();
    let mut off = Vec::new();
    let mut verified = true;
    for k in 0..=n {
        let c = (n - k) as i64 - k as i64;
        diagonal.push(c);
        let want = a1.get(0, 0).scale(&Scalar::int(c));
        verified &= an.get(k, k).eq_mod_sphere(&want)?;
        if k < n {
            let sq = ((n - k) * (k + 1)) as i64;
            off.push(sq);
            let s = Scalar::sqrt(sq as u64);
            verified &= an.get(k, k + 1).eq_mod_sphere(&a1.get(0, 1).scale(&s))?;
            verified &= an.get(k + 1, k).eq_mod_sphere(&a1.get(1, 0).scale(&s))?;
        }
        for l in 0..=n {
            if k.abs_diff(l) > 1 {
                verified &= an.get(k, l).is_zero_mod_sphere()?;
            }
        }
    }
    Ok(GaugeIdentities { n, diagonal, off_diagonal_squares: off, verified })
}

/// `sigma = p_(n) f` for a coefficient ket over the four-sphere.
pub fn to_module(p: &ProjectionMatrix, f: &[Element]) -> Result<Vec<Element>> {
    let len = p.size();
    if f.len() != len {
        return Err(Error::Shape(format!("ket of length {} for a projection of size {len}", f.len())));
    }
    let s4 = Presentation::s4();
    if let Some(bad) = f.iter().find(|e| !std::ptr::eq(e.pres, s4)) {
        return Err(Error::NotCoinvariant(format!("{bad} is not over the four-sphere")));
    }
    let col = Matrix { rows: len, cols: 1, data: f.to_vec() };
    Ok(p.matrix.try_mul(&col)?.data)
}

/// Coequivariant map `e_k -> <phi_k|sigma>` of a section.
pub fn from_section(n: usize, sigma: &[Element]) -> Result<Vec<Element>> {
    let phi = phi_kets(n)?;
    let lifted = Ket::new(sigma.iter().map(embed_s4).collect());
    phi.iter().map(|k| k.bra_ket(&lifted)).collect()
}

/// Section `sum_k |phi_k> phi(e_k)` of a coequivariant map, over the four-sphere.
pub fn section_from_map(n: usize, values: &[Element]) -> Result<Vec<Element>> {
    let phi = phi_kets(n)?;
    if values.len() != phi.len() {
        return Err(Error::Shape(format!("{} values for {} basis vectors", values.len(), phi.len())));
    }
    let len = phi[0].len();
    let s7 = Presentation::s7();
    (0..len)
        .map(|i| {
            let mut acc = Element::zero(s7);
            for (k, v) in values.iter().enumerate() {
                acc = acc.add(&phi[k].comps[i].mul(v));
            }
            descend(&acc)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psi_orthonormal() {
        let [p1, p2] = psi_kets();
        let s7 = Presentation::s7();
        assert_eq!(p1.bra_ket(&p1).unwrap(), Element::one(s7));
        assert_eq!(p2.bra_ket(&p2).unwrap(), Element::one(s7));
        assert!(p1.bra_ket(&p2).unwrap().is_zero());
        let [t1, t2] = psi_tilde_kets();
        assert_eq!(t1.bra_ket(&t1).unwrap(), Element::one(s7));
        assert!(t1.bra_ket(&t2).unwrap().is_zero());
    }

    #[test]
    fn phi_orthonormal_small() {
        for n in 1..=3 {
            let phi = phi_kets(n).unwrap();
            for k in 0..=n {
                for l in 0..=n {
                    let v = phi[k].bra_ket(&phi[l]).unwrap();
                    if k == l {
                        assert_eq!(v, Element::one(Presentation::s7()), "n={n} k={k}");
                    } else {
                        assert!(v.is_zero(), "n={n} k={k} l={l}");
                    }
                }
            }
        }
    }

    #[test]
    fn basic_projection_closed_form() {
        assert_eq!(basic_projection().unwrap(), explicit_p1());
    }

    #[test]
    fn nested_projection_matches_kets() {
        for n in 1..=2 {
            let p = projection(n).unwrap();
            let r = p.verify(true).unwrap();
            assert!(r.pass(), "{r:?}");
            assert_eq!(r.trace, Element::scalar(Presentation::s4(), Scalar::int(n as i64 + 1)));
        }
    }

    #[test]
    fn equivalence() {
        let r = projection_equivalence_check().unwrap();
        assert!(r.pass(), "{r:?}");
    }

    #[test]
    fn gauge_n2() {
        let g = gauge_identities(2).unwrap();
        assert!(g.verified);
        assert_eq!(g.diagonal, vec![2, 0, -2]);
        assert_eq!(g.off_diagonal_squares, vec![2, 2]);
    }
}
