//! Sparse exact linear algebra and the ideal-membership oracle.
//!
//! Vectors are sparse maps from an ordered key type to field elements. The
//! echelon builder keeps, for every stored row, the combination of input
//! vectors that produced it, so every membership answer comes with a
//! certificate that can be recombined and checked.

use std::collections::BTreeMap;
use std::fmt;

use crate::algebra::{Element, Mono, Pres};
use crate::scalars::{GaussQ, Q, Scalar, ScalarFraction};
use crate::{Error, Result};

/// Minimal field interface for elimination.
pub trait Field: Clone + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn inv(&self) -> Self;
}

impl Field for ScalarFraction {
    fn zero() -> Self {
        ScalarFraction::zero()
    }
    fn one() -> Self {
        ScalarFraction::one()
    }
    fn is_zero(&self) -> bool {
        ScalarFraction::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        ScalarFraction::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        ScalarFraction::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ScalarFraction::mul(self, o)
    }
    fn inv(&self) -> Self {
        ScalarFraction::inv(self).expect("pivot is nonzero")
    }
}

impl Field for GaussQ {
    fn zero() -> Self {
        GaussQ::ZERO
    }
    fn one() -> Self {
        GaussQ::ONE
    }
    fn is_zero(&self) -> bool {
        GaussQ::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        GaussQ::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        GaussQ::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        GaussQ::mul(self, o)
    }
    fn inv(&self) -> Self {
        GaussQ::inv(self)
    }
}

impl Field for Q {
    fn zero() -> Self {
        Q::int(0)
    }
    fn one() -> Self {
        Q::int(1)
    }
    fn is_zero(&self) -> bool {
        Q::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        Q::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Q::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Q::mul(self, o)
    }
    fn inv(&self) -> Self {
        Q::inv(self)
    }
}

/// Sparse vector.
pub type SparseVec<K, F> = BTreeMap<K, F>;

fn axpy<K: Ord + Clone, F: Field>(y: &mut SparseVec<K, F>, a: &F, x: &SparseVec<K, F>) {
    for (k, v) in x {
        let t = a.mul(v);
        match y.get_mut(k) {
            Some(e) => {
                *e = e.add(&t);
                if e.is_zero() {
                    y.remove(k);
                }
            }
            None => {
                if !t.is_zero() {
                    y.insert(k.clone(), t);
                }
            }
        }
    }
}

struct Row<K, F> {
    pivot: K,
    vec: SparseVec<K, F>,
    combo: SparseVec<usize, F>,
}

/// Incremental row echelon form with provenance.
pub struct Echelon<K, F> {
    rows: Vec<Row<K, F>>,
    inputs: usize,
}

impl<K: Ord + Clone, F: Field> Default for Echelon<K, F> {
    fn default() -> Self {
        Echelon::new()
    }
}

impl<K: Ord + Clone, F: Field> Echelon<K, F> {
    pub fn new() -> Self {
        Echelon { rows: Vec::new(), inputs: 0 }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Number of vectors inserted so far.
    pub fn inputs(&self) -> usize {
        self.inputs
    }

    /// Reduce `v` against the stored rows; returns the remainder and the
    /// combination of inputs subtracted.
    pub fn reduce(&self, v: &SparseVec<K, F>) -> (SparseVec<K, F>, SparseVec<usize, F>) {
        let mut r = v.clone();
        let mut combo: SparseVec<usize, F> = BTreeMap::new();
        for row in &self.rows {
            if let Some(c) = r.get(&row.pivot).cloned() {
                let m = F::zero().sub(&c);
                axpy(&mut r, &m, &row.vec);
                axpy(&mut combo, &c, &row.combo);
            }
        }
        (r, combo)
    }

    /// Insert a vector; returns true when it increased the rank.
    pub fn insert(&mut self, v: SparseVec<K, F>) -> bool {
        let idx = self.inputs;
        self.inputs += 1;
        let (r, combo) = self.reduce(&v);
        let Some((pivot, lead)) = r.iter().next().map(|(k, c)| (k.clone(), c.clone())) else {
            return false;
        };
        let inv = lead.inv();
        let mut own: SparseVec<usize, F> = BTreeMap::new();
        own.insert(idx, F::one());
        let neg: SparseVec<usize, F> = combo.iter().map(|(k, c)| (*k, F::zero().sub(c))).collect();
        axpy(&mut own, &F::one(), &neg);
        let vec = r.iter().map(|(k, c)| (k.clone(), c.mul(&inv))).collect();
        let combo = own.iter().map(|(k, c)| (*k, c.mul(&inv))).filter(|(_, c)| !c.is_zero()).collect();
        self.rows.push(Row { pivot, vec, combo });
        true
    }

    /// Coefficients `c` with `sum_i c_i input_i = v`, if `v` is in the span.
    pub fn solve(&self, v: &SparseVec<K, F>) -> Option<SparseVec<usize, F>> {
        let (r, combo) = self.reduce(v);
        if r.is_empty() {
            Some(combo)
        } else {
            None
        }
    }
}

/// Rank of a list of sparse vectors.
pub fn rank<K: Ord + Clone, F: Field>(vs: impl IntoIterator<Item = SparseVec<K, F>>) -> usize {
    let mut e = Echelon::new();
    for v in vs {
        e.insert(v);
    }
    e.rank()
}

/// Convert a scalar-valued sparse vector to the fraction field.
pub fn to_fractions<K: Ord + Clone>(v: &BTreeMap<K, Scalar>) -> SparseVec<K, ScalarFraction> {
    v.iter().map(|(k, c)| (k.clone(), ScalarFraction::from_scalar(c.clone()))).collect()
}

/// Specialize a scalar-valued sparse vector at a value of `mu`; `None` when a
/// coefficient contains a square root.
pub fn specialize<K: Ord + Clone>(v: &BTreeMap<K, Scalar>, mu0: &GaussQ) -> Option<SparseVec<K, GaussQ>> {
    let mut out = BTreeMap::new();
    for (k, c) in v {
        let s = c.specialize(mu0)?;
        if !s.is_zero() {
            out.insert(k.clone(), s);
        }
    }
    Some(out)
}

/// A unimodular Gaussian rational that is not a root of unity:
/// `(3 + 4i) / 5`.
pub fn generic_mu() -> GaussQ {
    GaussQ { re: Q::frac(3, 5), im: Q::frac(4, 5) }
}

/// Outcome of an ideal-membership query.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MembershipStatus {
    Member,
    NotFoundAtBound,
}

/// One summand `coefficient * left * relation * right` of a certificate.
#[derive(Clone, Debug)]
pub struct CertificateTerm {
    pub left: Mono,
    pub relation: usize,
    pub right: Mono,
    pub coefficient: ScalarFraction,
}

/// Result of [`ideal_membership`].
#[derive(Clone, Debug)]
pub struct MembershipCertificate {
    pub status: MembershipStatus,
    pub bound: usize,
    pub combination: Vec<CertificateTerm>,
    /// Size of the candidate spanning set at the bound.
    pub candidates: usize,
}

impl MembershipCertificate {
    pub fn is_member(&self) -> bool {
        self.status == MembershipStatus::Member
    }

    /// Recombine the certificate; equals the queried element when `Member`.
    /// `None` when a coefficient is not a Laurent polynomial.
    pub fn recombine(&self, relations: &[Element]) -> Option<Element> {
        let pres = relations.first()?.pres;
        let mut out = Element::zero(pres);
        for t in &self.combination {
            let c = t.coefficient.to_scalar()?;
            let a = Element::monomial(pres, t.left, Scalar::one());
            let b = Element::monomial(pres, t.right, Scalar::one());
            out = out.add(&a.mul(&relations[t.relation]).mul(&b).scale(&c));
        }
        Some(out)
    }
}

/// Default cap on membership bounds.
pub const MEMBERSHIP_CAP: usize = 10;

fn element_vec(e: &Element) -> SparseVec<Mono, ScalarFraction> {
    to_fractions(&e.terms)
}

/// Decide whether `e` lies in the two-sided ideal generated by `relations`
/// within the filtered component of total degree `<= bound`.
///
/// All relations are taken in the sphere-free presentation of `e`. Each
/// relation must be homogeneous for the torus grading; the query is split
/// into homogeneous parts by the caller. Candidates are the products
/// `a r b` with monomials `a`, `b` of matching torus degree.
pub fn ideal_membership(e: &Element, relations: &[Element], bound: usize, cap: usize) -> Result<MembershipCertificate> {
    if bound > cap {
        return Err(Error::BoundOverflow(bound, cap));
    }
    let amb = e.pres.ambient();
    let target = e.reinterpret(amb);
    let Some(deg) = target.torus_degree() else {
        return Err(Error::Degree("membership query is not torus-homogeneous".into()));
    };
    let rels: Vec<Element> = relations.iter().map(|r| r.reinterpret(amb)).collect();
    let mut ech: Echelon<Mono, ScalarFraction> = Echelon::new();
    let mut labels = Vec::new();
    let rank_t = amb.torus_rank();
    for (ri, r) in rels.iter().enumerate() {
        let Some(rd) = r.torus_degree() else {
            return Err(Error::Degree(format!("relation {ri} is not torus-homogeneous")));
        };
        let rdeg = r.degree();
        if rdeg > bound {
            continue;
        }
        let room = bound - rdeg;
        let monos = amb.graded_basis(room, None);
        for a in &monos {
            let da = amb.torus_degree(a);
            for b in &monos {
                if a.degree() + b.degree() > room {
                    continue;
                }
                let db = amb.torus_degree(b);
                if (0..rank_t).any(|k| da[k] + rd[k] + db[k] != deg[k]) {
                    continue;
                }
                let cand = Element::monomial(amb, *a, Scalar::one()).mul(r).mul(&Element::monomial(amb, *b, Scalar::one()));
                if cand.is_zero() {
                    continue;
                }
                labels.push((*a, ri, *b));
                ech.insert(element_vec(&cand));
            }
        }
    }
    let candidates = labels.len();
    match ech.solve(&element_vec(&target)) {
        Some(combo) => {
            let combination = combo
                .into_iter()
                .map(|(i, c)| CertificateTerm { left: labels[i].0, relation: labels[i].1, right: labels[i].2, coefficient: c })
                .collect();
            Ok(MembershipCertificate { status: MembershipStatus::Member, bound, combination, candidates })
        }
        None => Ok(MembershipCertificate { status: MembershipStatus::NotFoundAtBound, bound, combination: vec![], candidates }),
    }
}

/// Membership with the default bound `degree + 2`, escalating up to `cap`.
pub fn ideal_membership_escalating(e: &Element, relations: &[Element], cap: usize) -> Result<MembershipCertificate> {
    let start = (e.degree() + 2).min(cap);
    let mut last = None;
    for b in start..=cap {
        let c = ideal_membership(e, relations, b, cap)?;
        if c.is_member() {
            return Ok(c);
        }
        last = Some(c);
    }
    last.ok_or(Error::BoundOverflow(start, cap))
}

/// Express `e` as a linear combination of `basis`; exact solve over the
/// fraction field.
pub fn solve_in_span(e: &Element, basis: &[Element]) -> Option<Vec<ScalarFraction>> {
    let mut ech: Echelon<Mono, ScalarFraction> = Echelon::new();
    for b in basis {
        ech.insert(element_vec(b));
    }
    let combo = ech.solve(&element_vec(e))?;
    let mut out = vec![ScalarFraction::zero(); basis.len()];
    for (i, c) in combo {
        out[i] = c;
    }
    Some(out)
}

/// Presentation-independent helper for [`Pres`]-typed algebra vectors.
pub fn element_from_vec(pres: Pres, v: &SparseVec<Mono, Scalar>) -> Element {
    Element { pres, terms: v.iter().filter(|(_, c)| !c.is_zero()).map(|(m, c)| (*m, c.clone())).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Presentation;

    #[test]
    fn echelon_rank_and_solve() {
        let q = |n: i64| Q::int(n);
        let v1: SparseVec<usize, Q> = [(0, q(1)), (1, q(2))].into_iter().collect();
        let v2: SparseVec<usize, Q> = [(0, q(2)), (1, q(4))].into_iter().collect();
        let v3: SparseVec<usize, Q> = [(1, q(1)), (2, q(1))].into_iter().collect();
        let mut e = Echelon::new();
        assert!(e.insert(v1.clone()));
        assert!(!e.insert(v2));
        assert!(e.insert(v3.clone()));
        let mut t = v1.clone();
        axpy(&mut t, &q(3), &v3);
        let c = e.solve(&t).unwrap();
        assert_eq!(c.get(&0), Some(&q(1)));
        assert_eq!(c.get(&2), Some(&q(3)));
    }

    #[test]
    fn sphere_relation_is_member() {
        let s7 = Presentation::s7();
        let r = s7.sphere_relation().unwrap();
        let c = ideal_membership(&r, &[r.clone()], 2, MEMBERSHIP_CAP).unwrap();
        assert!(c.is_member());
        assert_eq!(c.recombine(&[r.clone()]).unwrap(), r);
    }

    #[test]
    fn coordinate_is_not_member() {
        let s7 = Presentation::s7();
        let r = s7.sphere_relation().unwrap();
        let z1 = Element::generator(s7.ambient(), 0);
        let c = ideal_membership(&z1, &[r], 4, MEMBERSHIP_CAP).unwrap();
        assert_eq!(c.status, MembershipStatus::NotFoundAtBound);
    }

    #[test]
    fn bound_guard() {
        let s7 = Presentation::s7();
        let r = s7.sphere_relation().unwrap();
        assert!(matches!(ideal_membership(&r, &[r.clone()], 11, MEMBERSHIP_CAP), Err(Error::BoundOverflow(11, 10))));
    }
}
