//! Seeded random elements and the algebraic laws checked on them.

use rand::Rng;

use crate::algebra::{Element, Pres, Presentation};
use crate::forms::{Calculus, Form};
use crate::hopf::{antipode, counit, counit_leg, coproduct, map_leg_linear, Tensor};
use crate::rng::seeded;
use crate::scalars::Scalar;
use crate::split::{eval_clock_shift, sample_points};
use crate::Result;

/// Cases per law in [`run_all`].
pub const CASES: usize = 200;

/// Tolerance of the numeric representation checks.
pub const NUMERIC_TOLERANCE: f64 = 1e-9;

/// Random element with up to `terms` terms, words of length at most
/// `max_len` and coefficients `c mu^k` with `|c| <= 3`, `|k| <= 2`.
pub fn random_element<R: Rng>(rng: &mut R, pres: Pres, terms: usize, max_len: usize) -> Element {
    let n = pres.ngens();
    let mut words = Vec::new();
    for _ in 0..rng.gen_range(1..=terms) {
        let len = rng.gen_range(0..=max_len);
        let w: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
        let mut c = 0;
        while c == 0 {
            c = rng.gen_range(-3i64..=3);
        }
        let s = Scalar::int(c).mul(&Scalar::mu(rng.gen_range(-2..=2)));
        words.push((s, w));
    }
    Element::from_words(pres, &words)
}

/// Outcome of one law over a number of seeded cases.
#[derive(Clone, Debug)]
pub struct LawReport {
    pub law: &'static str,
    pub cases: usize,
    pub failures: usize,
}

impl LawReport {
    pub fn pass(&self) -> bool {
        self.failures == 0 && self.cases > 0
    }
}

fn run<F>(law: &'static str, cases: usize, seed: u64, stream: u64, mut f: F) -> Result<LawReport>
where
    F: FnMut(&mut rand_chacha::ChaCha8Rng) -> Result<bool>,
{
    let mut rng = seeded(seed, stream);
    let mut failures = 0;
    for _ in 0..cases {
        if !f(&mut rng)? {
            failures += 1;
        }
    }
    Ok(LawReport { law, cases, failures })
}

fn presentations() -> [Pres; 2] {
    [Presentation::s7(), Presentation::s4()]
}

/// `d d e = 0` in the exterior calculus.
pub fn d_squared(cases: usize, seed: u64) -> Result<LawReport> {
    run("d^2 = 0", cases, seed, 101, |rng| {
        let p = presentations()[rng.gen_range(0..2)];
        let e = random_element(rng, p, 3, 3);
        Form::d(&e, Calculus::Exterior).ext_d()?.is_zero_mod_sphere()
    })
}

/// `d(ab) = da b + a db` in both calculi and the graded rule for
/// `d(omega eta)` with one-forms in the exterior calculus.
pub fn leibniz(cases: usize, seed: u64) -> Result<LawReport> {
    run("graded Leibniz", cases, seed, 102, |rng| {
        let p = presentations()[rng.gen_range(0..2)];
        let (a, b) = (random_element(rng, p, 3, 2), random_element(rng, p, 3, 2));
        for calc in [Calculus::FirstOrder, Calculus::Exterior] {
            let lhs = Form::d(&a.mul(&b), calc);
            let rhs = Form::d(&a, calc).rmul(&b).add(&Form::d(&b, calc).lmul(&a));
            if !lhs.eq_mod_sphere(&rhs)? {
                return Ok(false);
            }
        }
        let (c, e) = (random_element(rng, p, 2, 2), random_element(rng, p, 2, 2));
        let omega = Form::d(&b, Calculus::Exterior).lmul(&a);
        let eta = Form::d(&e, Calculus::Exterior).lmul(&c);
        let lhs = omega.mul(&eta).ext_d()?;
        let rhs = omega.ext_d()?.mul(&eta).sub(&omega.mul(&eta.ext_d()?));
        lhs.eq_mod_sphere(&rhs)
    })
}

/// `(ab)^* = b^* a^*`, `a^** = a` and `(da)^* = d(a^*)`.
pub fn involution(cases: usize, seed: u64) -> Result<LawReport> {
    run("involution", cases, seed, 103, |rng| {
        let p = presentations()[rng.gen_range(0..2)];
        let (a, b) = (random_element(rng, p, 3, 3), random_element(rng, p, 3, 3));
        let mut ok = a.mul(&b).adjoint() == b.adjoint().mul(&a.adjoint()) && a.adjoint().adjoint() == a;
        for calc in [Calculus::FirstOrder, Calculus::Exterior] {
            ok &= Form::d(&a, calc).adjoint().eq_mod_sphere(&Form::d(&a.adjoint(), calc))?;
        }
        Ok(ok)
    })
}

/// Coassociativity, counit and antipode laws on random elements of `A(SU(2))`.
pub fn hopf_laws(cases: usize, seed: u64) -> Result<LawReport> {
    let h = Presentation::su2();
    run("Hopf axioms", cases, seed, 104, |rng| {
        let x = random_element(rng, h, 3, 3);
        let d = coproduct(&x);
        let cop = |m: &crate::algebra::Mono| Ok(coproduct(&Element::monomial(h, *m, Scalar::one())));
        let left = d.map_leg(0, &[h, h], &mut { cop })?;
        let right = d.map_leg(1, &[h, h], &mut { cop })?;
        let x1 = Tensor::pure(&[x.clone()]);
        let eps = Tensor::pure(&[Element::scalar(h, counit(&x))]);
        let sl = map_leg_linear(&d, 0, &antipode)?.merge(0, 1)?;
        let sr = map_leg_linear(&d, 1, &antipode)?.merge(0, 1)?;
        Ok(left == right && counit_leg(&d, 0)? == x1 && counit_leg(&d, 1)? == x1 && sl == eps && sr == eps)
    })
}

/// Exact products and adjoints agree with the clock and shift representation
/// of the splitting at seeded points.
pub fn numeric_agreement(cases: usize, seed: u64) -> Result<LawReport> {
    let points = sample_points(Presentation::s4(), 8, seed)?;
    let points7 = sample_points(Presentation::s7(), 8, seed)?;
    run("exact vs numeric", cases, seed, 105, |rng| {
        let which = rng.gen_range(0..2);
        let p = presentations()[which];
        let pt = if which == 0 { &points7[rng.gen_range(0..8)] } else { &points[rng.gen_range(0..8)] };
        let (a, b) = (random_element(rng, p, 3, 3), random_element(rng, p, 3, 3));
        let ab = eval_clock_shift(&a.mul(&b), &pt.point)?;
        let prod = eval_clock_shift(&a, &pt.point)?.mul(&eval_clock_shift(&b, &pt.point)?);
        let adj = eval_clock_shift(&a.adjoint(), &pt.point)?;
        let ea = eval_clock_shift(&a, &pt.point)?;
        let n = ea.n;
        let mut dagger = ea.clone();
        for i in 0..n {
            for j in 0..n {
                dagger.a[j * n + i] = ea.a[i * n + j].conj();
            }
        }
        Ok(ab.max_abs_diff(&prod) <= NUMERIC_TOLERANCE && adj.max_abs_diff(&dagger) <= NUMERIC_TOLERANCE)
    })
}

/// Every law with `cases` cases each.
pub fn run_all(cases: usize, seed: u64) -> Result<Vec<LawReport>> {
    Ok(vec![d_squared(cases, seed)?, leibniz(cases, seed)?, involution(cases, seed)?, hopf_laws(cases, seed)?, numeric_agreement(cases, seed)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laws_hold_on_a_few_cases() {
        for r in run_all(10, 3).unwrap() {
            assert!(r.pass(), "{r:?}");
        }
    }
}
