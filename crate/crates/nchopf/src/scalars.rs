//! Exact coefficients.
//!
//! A [`Scalar`] is a finite sum of terms `c * mu^k * sqrt(d)` where `c` is a
//! Gaussian rational, `mu` is a formal unitary phase (`conj(mu) = mu^-1`) and
//! `d` is a squarefree positive integer. [`ScalarFraction`] is the field of
//! fractions used by the linear-algebra routines.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use crate::Error;

/// Exact rational with an `i64` fast path and a big-integer fallback.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Q {
    /// Reduced fraction with positive denominator.
    Small(i64, i64),
    /// Values that do not fit the small representation.
    Big(BigRational),
}

impl Q {
    pub const ZERO: Q = Q::Small(0, 1);
    pub const ONE: Q = Q::Small(1, 1);

    pub fn int(n: i64) -> Q {
        Q::Small(n, 1)
    }

    /// `n/d`, reduced. Panics on `d == 0`.
    pub fn frac(n: i64, d: i64) -> Q {
        assert!(d != 0, "zero denominator");
        Q::from_i128(n as i128, d as i128)
    }

    fn from_i128(mut n: i128, mut d: i128) -> Q {
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        match (i64::try_from(n), i64::try_from(d)) {
            (Ok(a), Ok(b)) => Q::Small(a, b),
            _ => Q::Big(BigRational::new(BigInt::from(n), BigInt::from(d))),
        }
    }

    fn from_big(r: BigRational) -> Q {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(a), Some(b)) => Q::Small(a, b),
            _ => Q::Big(r),
        }
    }

    fn to_big(&self) -> BigRational {
        match self {
            Q::Small(a, b) => BigRational::new_raw(BigInt::from(*a), BigInt::from(*b)),
            Q::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Q::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Q::Small(1, 1))
    }

    pub fn signum(&self) -> i32 {
        match self {
            Q::Small(a, _) => a.signum() as i32,
            Q::Big(r) => {
                if r.is_negative() {
                    -1
                } else if r.is_zero() {
                    0
                } else {
                    1
                }
            }
        }
    }

    pub fn add(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                match a.checked_mul(d).zip(c.checked_mul(b)) {
                    Some((x, y)) => Q::from_i128(x + y, b * d),
                    None => Q::from_big(self.to_big() + o.to_big()),
                }
            }
            _ => Q::from_big(self.to_big() + o.to_big()),
        }
    }

    pub fn mul(&self, o: &Q) -> Q {
        match (self, o) {
            (Q::Small(a, b), Q::Small(c, d)) => {
                Q::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Q::from_big(self.to_big() * o.to_big()),
        }
    }

    pub fn neg(&self) -> Q {
        match self {
            Q::Small(a, b) => match a.checked_neg() {
                Some(n) => Q::Small(n, *b),
                None => Q::from_big(-self.to_big()),
            },
            Q::Big(r) => Q::from_big(-r.clone()),
        }
    }

    pub fn sub(&self, o: &Q) -> Q {
        self.add(&o.neg())
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inv(&self) -> Q {
        match self {
            Q::Small(a, b) => {
                assert!(*a != 0, "inverse of zero");
                Q::from_i128(*b as i128, *a as i128)
            }
            Q::Big(r) => Q::from_big(r.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Q::Small(a, b) => *a as f64 / *b as f64,
            Q::Big(r) => r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN),
        }
    }

    /// Numerator and denominator as big integers.
    pub fn parts(&self) -> (BigInt, BigInt) {
        let r = self.to_big();
        (r.numer().clone(), r.denom().clone())
    }

    pub fn from_parts(n: BigInt, d: BigInt) -> Q {
        Q::from_big(BigRational::new(n, d))
    }
}

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Q::Small(a, 1) => write!(f, "{a}"),
            Q::Small(a, b) => write!(f, "{a}/{b}"),
            Q::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Q::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

/// Gaussian rational `re + i*im`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GaussQ {
    pub re: Q,
    pub im: Q,
}

impl GaussQ {
    pub const ZERO: GaussQ = GaussQ { re: Q::ZERO, im: Q::ZERO };
    pub const ONE: GaussQ = GaussQ { re: Q::ONE, im: Q::ZERO };
    pub const I: GaussQ = GaussQ { re: Q::ZERO, im: Q::ONE };

    pub fn real(q: Q) -> GaussQ {
        GaussQ { re: q, im: Q::ZERO }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn add(&self, o: &GaussQ) -> GaussQ {
        GaussQ { re: self.re.add(&o.re), im: self.im.add(&o.im) }
    }

    pub fn sub(&self, o: &GaussQ) -> GaussQ {
        GaussQ { re: self.re.sub(&o.re), im: self.im.sub(&o.im) }
    }

    pub fn neg(&self) -> GaussQ {
        GaussQ { re: self.re.neg(), im: self.im.neg() }
    }

    pub fn mul(&self, o: &GaussQ) -> GaussQ {
        if self.im.is_zero() && o.im.is_zero() {
            return GaussQ::real(self.re.mul(&o.re));
        }
        GaussQ {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn scale(&self, q: &Q) -> GaussQ {
        GaussQ { re: self.re.mul(q), im: self.im.mul(q) }
    }

    pub fn conj(&self) -> GaussQ {
        GaussQ { re: self.re.clone(), im: self.im.neg() }
    }

    pub fn norm2(&self) -> Q {
        self.re.mul(&self.re).add(&self.im.mul(&self.im))
    }

    /// Inverse. Panics on zero.
    pub fn inv(&self) -> GaussQ {
        let n = self.norm2().inv();
        self.conj().scale(&n)
    }

    pub fn to_complex(&self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for GaussQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", self.re),
            (true, false) if self.im.is_one() => write!(f, "i"),
            (true, false) => write!(f, "{}*i", self.im),
            (false, false) => {
                if self.im.signum() < 0 {
                    write!(f, "({}-{}*i)", self.re, self.im.neg())
                } else {
                    write!(f, "({}+{}*i)", self.re, self.im)
                }
            }
        }
    }
}

/// One term `c * mu^mu * sqrt(rad)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Term {
    pub mu: i32,
    pub rad: u32,
    pub c: GaussQ,
}

/// Exact scalar: a Gaussian-rational Laurent polynomial in `mu` with formal
/// square roots. Terms are sorted by `(mu, rad)` and never zero.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Scalar {
    terms: SmallVec<[Term; 1]>,
}

fn squarefree_split(n: u64) -> (u64, u64) {
    // n = s^2 * r with r squarefree; returns (s, r)
    let mut s = 1u64;
    let mut r = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m % p == 0 {
            m /= p;
            e += 1;
        }
        for _ in 0..e / 2 {
            s *= p;
        }
        if e % 2 == 1 {
            r *= p;
        }
        p += 1;
    }
    r *= m;
    (s, r)
}

impl Scalar {
    pub fn zero() -> Scalar {
        Scalar { terms: SmallVec::new() }
    }

    pub fn one() -> Scalar {
        Scalar::from_q(Q::ONE)
    }

    pub fn from_q(q: Q) -> Scalar {
        Scalar::term(GaussQ::real(q), 0, 1)
    }

    pub fn int(n: i64) -> Scalar {
        Scalar::from_q(Q::int(n))
    }

    pub fn frac(n: i64, d: i64) -> Scalar {
        Scalar::from_q(Q::frac(n, d))
    }

    pub fn i() -> Scalar {
        Scalar::term(GaussQ::I, 0, 1)
    }

    /// `mu^k`.
    pub fn mu(k: i32) -> Scalar {
        Scalar::term(GaussQ::ONE, k, 1)
    }

    /// `sqrt(n)` for any positive integer, with square factors extracted.
    pub fn sqrt(n: u64) -> Scalar {
        assert!(n > 0, "sqrt of zero");
        let (s, r) = squarefree_split(n);
        Scalar::term(GaussQ::real(Q::int(s as i64)), 0, r as u32)
    }

    /// A single term; the radicand must be squarefree.
    pub fn term(c: GaussQ, mu: i32, rad: u32) -> Scalar {
        let mut terms = SmallVec::new();
        if !c.is_zero() {
            terms.push(Term { mu, rad, c });
        }
        Scalar { terms }
    }

    /// Canonicalize an arbitrary list of `(c, mu, radicand)` triples. The
    /// radicand may contain square factors.
    pub fn normalize(raw: Vec<(GaussQ, i32, u64)>) -> Scalar {
        let mut acc = Scalar::zero();
        for (c, k, d) in raw {
            if d == 0 {
                continue;
            }
            let (s, r) = squarefree_split(d);
            acc.add_term(Term { mu: k, rad: r as u32, c: c.scale(&Q::int(s as i64)) });
        }
        acc
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].mu == 0 && self.terms[0].rad == 1 && self.terms[0].c.is_one()
    }

    /// True when no term carries a square root.
    pub fn is_radical_free(&self) -> bool {
        self.terms.iter().all(|t| t.rad == 1)
    }

    /// True for a single term `c * mu^k` with `c` rational or Gaussian and no root.
    pub fn as_monomial(&self) -> Option<(&GaussQ, i32)> {
        match self.terms.as_slice() {
            [t] if t.rad == 1 => Some((&t.c, t.mu)),
            _ => None,
        }
    }

    /// The rational value of a constant real scalar.
    pub fn as_rational(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::ZERO);
        }
        match self.terms.as_slice() {
            [t] if t.rad == 1 && t.mu == 0 && t.c.im.is_zero() => Some(t.c.re.clone()),
            _ => None,
        }
    }

    fn add_term(&mut self, t: Term) {
        if t.c.is_zero() {
            return;
        }
        match self.terms.binary_search_by(|x| (x.mu, x.rad).cmp(&(t.mu, t.rad))) {
            Ok(i) => {
                let c = self.terms[i].c.add(&t.c);
                if c.is_zero() {
                    self.terms.remove(i);
                } else {
                    self.terms[i].c = c;
                }
            }
            Err(i) => self.terms.insert(i, t),
        }
    }

    pub fn add(&self, o: &Scalar) -> Scalar {
        let mut out = SmallVec::with_capacity(self.terms.len() + o.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < o.terms.len() {
            let (a, b) = (&self.terms[i], &o.terms[j]);
            match (a.mu, a.rad).cmp(&(b.mu, b.rad)) {
                Ordering::Less => {
                    out.push(a.clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b.clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a.c.add(&b.c);
                    if !c.is_zero() {
                        out.push(Term { mu: a.mu, rad: a.rad, c });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(self.terms[i..].iter().cloned());
        out.extend(o.terms[j..].iter().cloned());
        Scalar { terms: out }
    }

    pub fn neg(&self) -> Scalar {
        Scalar { terms: self.terms.iter().map(|t| Term { mu: t.mu, rad: t.rad, c: t.c.neg() }).collect() }
    }

    pub fn sub(&self, o: &Scalar) -> Scalar {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Scalar) -> Scalar {
        if self.terms.len() == 1 && o.terms.len() == 1 {
            let (a, b) = (&self.terms[0], &o.terms[0]);
            if a.rad == 1 || b.rad == 1 {
                return Scalar::term(a.c.mul(&b.c), a.mu + b.mu, a.rad.max(b.rad));
            }
        }
        let mut acc = Scalar::zero();
        for a in &self.terms {
            for b in &o.terms {
                let (c, rad) = if a.rad == 1 || b.rad == 1 {
                    (a.c.mul(&b.c), a.rad.max(b.rad))
                } else {
                    let g = (a.rad as u64).gcd(&(b.rad as u64));
                    let r = (a.rad as u64 / g) * (b.rad as u64 / g);
                    (a.c.mul(&b.c).scale(&Q::int(g as i64)), r as u32)
                };
                acc.add_term(Term { mu: a.mu + b.mu, rad, c });
            }
        }
        acc
    }

    /// Multiply by `mu^k`.
    pub fn shift(&self, k: i32) -> Scalar {
        if k == 0 {
            return self.clone();
        }
        Scalar { terms: self.terms.iter().map(|t| Term { mu: t.mu + k, rad: t.rad, c: t.c.clone() }).collect() }
    }

    pub fn scale_q(&self, q: &Q) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        Scalar { terms: self.terms.iter().map(|t| Term { mu: t.mu, rad: t.rad, c: t.c.scale(q) }).collect() }
    }

    /// Involution: `mu -> mu^-1`, `i -> -i`, roots fixed.
    pub fn conj(&self) -> Scalar {
        let mut terms: SmallVec<[Term; 1]> =
            self.terms.iter().map(|t| Term { mu: -t.mu, rad: t.rad, c: t.c.conj() }).collect();
        terms.sort_by(|a, b| (a.mu, a.rad).cmp(&(b.mu, b.rad)));
        Scalar { terms }
    }

    /// Substitute `mu = mu0` (a nonzero Gaussian rational). Roots must be absent.
    pub fn specialize(&self, mu0: &GaussQ) -> Option<GaussQ> {
        let mut acc = GaussQ::ZERO;
        let inv = mu0.inv();
        for t in &self.terms {
            if t.rad != 1 {
                return None;
            }
            let base = if t.mu >= 0 { mu0 } else { &inv };
            let mut p = GaussQ::ONE;
            for _ in 0..t.mu.unsigned_abs() {
                p = p.mul(base);
            }
            acc = acc.add(&p.mul(&t.c));
        }
        Some(acc)
    }

    /// Numerical value at `mu = exp(i*pi*theta)`.
    pub fn eval(&self, theta: f64) -> Complex64 {
        self.eval_at(Complex64::from_polar(1.0, std::f64::consts::PI * theta))
    }

    /// Numerical value at a given complex `mu`.
    pub fn eval_at(&self, mu: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.c.to_complex() * mu.powi(t.mu) * (t.rad as f64).sqrt())
            .sum()
    }

    /// Inverse in the field of fractions.
    pub fn invert(&self) -> Result<ScalarFraction, Error> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let [t] = self.terms.as_slice() {
            let inv = Scalar::term(t.c.inv(), -t.mu, t.rad);
            if t.rad == 1 {
                return Ok(ScalarFraction::from_scalar(inv));
            }
            return Ok(ScalarFraction::new(inv, Scalar::int(t.rad as i64)));
        }
        // Multiply by Galois conjugates until the denominator is radical-free.
        let mut num = Scalar::one();
        let mut den = self.clone();
        let mut rads: Vec<u32> = Vec::new();
        for t in &self.terms {
            let (_, r) = (0, t.rad);
            if r != 1 {
                let mut m = r as u64;
                let mut p = 2u64;
                while p * p <= m {
                    if m % p == 0 {
                        if !rads.contains(&(p as u32)) {
                            rads.push(p as u32);
                        }
                        m /= p;
                    }
                    p += 1;
                }
                if m > 1 && !rads.contains(&(m as u32)) {
                    rads.push(m as u32);
                }
            }
        }
        for p in rads {
            let c = den.flip_prime(p);
            num = num.mul(&c);
            den = den.mul(&c);
        }
        Ok(ScalarFraction::new(num, den))
    }

    /// Galois conjugate `sqrt(p) -> -sqrt(p)` for a prime `p`.
    fn flip_prime(&self, p: u32) -> Scalar {
        Scalar {
            terms: self
                .terms
                .iter()
                .map(|t| Term { mu: t.mu, rad: t.rad, c: if t.rad % p == 0 { t.c.neg() } else { t.c.clone() } })
                .collect(),
        }
    }

    /// Smallest and largest power of `mu`.
    pub fn mu_range(&self) -> Option<(i32, i32)> {
        let lo = self.terms.iter().map(|t| t.mu).min()?;
        let hi = self.terms.iter().map(|t| t.mu).max()?;
        Some((lo, hi))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (n, t) in self.terms.iter().enumerate() {
            let mut c = t.c.clone();
            let negative = c.im.is_zero() && c.re.signum() < 0;
            if negative {
                c = c.neg();
            }
            if n == 0 {
                if negative {
                    write!(f, "-")?;
                }
            } else if negative {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !c.is_one() || (t.mu == 0 && t.rad == 1) {
                parts.push(c.to_string());
            }
            match t.mu {
                0 => {}
                1 => parts.push("mu".into()),
                k => parts.push(format!("mu^{k}")),
            }
            if t.rad != 1 {
                parts.push(format!("sqrt({})", t.rad));
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

macro_rules! forward_ops {
    ($t:ty) => {
        impl Add for &$t {
            type Output = $t;
            fn add(self, o: &$t) -> $t {
                <$t>::add(self, o)
            }
        }
        impl Sub for &$t {
            type Output = $t;
            fn sub(self, o: &$t) -> $t {
                <$t>::sub(self, o)
            }
        }
        impl Mul for &$t {
            type Output = $t;
            fn mul(self, o: &$t) -> $t {
                <$t>::mul(self, o)
            }
        }
        impl Neg for &$t {
            type Output = $t;
            fn neg(self) -> $t {
                <$t>::neg(self)
            }
        }
        impl AddAssign<&$t> for $t {
            fn add_assign(&mut self, o: &$t) {
                *self = <$t>::add(self, o);
            }
        }
        impl SubAssign<&$t> for $t {
            fn sub_assign(&mut self, o: &$t) {
                *self = <$t>::sub(self, o);
            }
        }
    };
}

forward_ops!(Scalar);
forward_ops!(ScalarFraction);

/// Dense Laurent polynomial in `mu` over the Gaussian rationals, used for gcds.
#[derive(Clone, Debug)]
struct Poly {
    low: i32,
    c: Vec<GaussQ>,
}

impl Poly {
    fn from_scalar(s: &Scalar) -> Poly {
        let Some((lo, hi)) = s.mu_range() else {
            return Poly { low: 0, c: Vec::new() };
        };
        let mut c = vec![GaussQ::ZERO; (hi - lo + 1) as usize];
        for t in s.terms() {
            c[(t.mu - lo) as usize] = t.c.clone();
        }
        Poly { low: lo, c }
    }

    fn to_scalar(&self) -> Scalar {
        let mut s = Scalar::zero();
        for (k, c) in self.c.iter().enumerate() {
            s.add_term(Term { mu: self.low + k as i32, rad: 1, c: c.clone() });
        }
        s
    }

    fn trim(&mut self) {
        while self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
        let lead_zeros = self.c.iter().take_while(|x| x.is_zero()).count();
        if lead_zeros > 0 && lead_zeros < self.c.len() {
            self.c.drain(..lead_zeros);
            self.low += lead_zeros as i32;
        }
    }

    fn deg(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// Remainder of ordinary polynomials (ignoring `low`).
    fn rem(a: &[GaussQ], b: &[GaussQ]) -> Vec<GaussQ> {
        let mut r = a.to_vec();
        let lb = b.last().unwrap().inv();
        while r.len() >= b.len() {
            let f = r.last().unwrap().mul(&lb);
            let off = r.len() - b.len();
            for (i, bi) in b.iter().enumerate() {
                r[off + i] = r[off + i].sub(&f.mul(bi));
            }
            r.pop();
            while r.last().is_some_and(|x| x.is_zero()) {
                r.pop();
            }
        }
        r
    }

    fn div_exact(a: &[GaussQ], b: &[GaussQ]) -> Vec<GaussQ> {
        let mut r = a.to_vec();
        let mut q = vec![GaussQ::ZERO; a.len() + 1 - b.len()];
        let lb = b.last().unwrap().inv();
        while r.len() >= b.len() && !r.is_empty() {
            let f = r.last().unwrap().mul(&lb);
            let off = r.len() - b.len();
            q[off] = f.clone();
            for (i, bi) in b.iter().enumerate() {
                r[off + i] = r[off + i].sub(&f.mul(bi));
            }
            r.pop();
        }
        q
    }

    fn gcd(a: &Poly, b: &Poly) -> Vec<GaussQ> {
        let mut x = a.c.clone();
        let mut y = b.c.clone();
        while !y.is_empty() {
            let r = Poly::rem(&x, &y);
            x = y;
            y = r;
        }
        let l = x.last().unwrap().inv();
        x.iter().map(|c| c.mul(&l)).collect()
    }
}

/// Element of the fraction field of [`Scalar`].
///
/// Radical-free fractions are kept reduced by a polynomial gcd, with a monic
/// denominator whose lowest power of `mu` is zero.
#[derive(Clone, Debug)]
pub struct ScalarFraction {
    pub num: Scalar,
    pub den: Scalar,
}

impl ScalarFraction {
    pub fn from_scalar(s: Scalar) -> ScalarFraction {
        ScalarFraction { num: s, den: Scalar::one() }
    }

    pub fn zero() -> ScalarFraction {
        ScalarFraction::from_scalar(Scalar::zero())
    }

    pub fn one() -> ScalarFraction {
        ScalarFraction::from_scalar(Scalar::one())
    }

    /// Panics when `den` is zero.
    pub fn new(num: Scalar, den: Scalar) -> ScalarFraction {
        assert!(!den.is_zero(), "zero denominator");
        let mut f = ScalarFraction { num, den };
        f.reduce();
        f
    }

    fn reduce(&mut self) {
        if self.num.is_zero() {
            self.den = Scalar::one();
            return;
        }
        if self.den.is_one() {
            return;
        }
        if !(self.num.is_radical_free() && self.den.is_radical_free()) {
            return;
        }
        let mut pn = Poly::from_scalar(&self.num);
        let mut pd = Poly::from_scalar(&self.den);
        pn.trim();
        pd.trim();
        let shift = pd.low;
        let g = if pd.deg() == 0 { vec![pd.c[0].clone()] } else { Poly::gcd(&pn, &pd) };
        let nn = Poly::div_exact(&pn.c, &g);
        let mut dd = Poly::div_exact(&pd.c, &g);
        let l = dd.last().unwrap().inv();
        let nn: Vec<GaussQ> = nn.iter().map(|c| c.mul(&l)).collect();
        dd = dd.iter().map(|c| c.mul(&l)).collect();
        self.num = Poly { low: pn.low - shift, c: nn }.to_scalar();
        self.den = Poly { low: 0, c: dd }.to_scalar();
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &ScalarFraction) -> ScalarFraction {
        if self.den == o.den {
            return ScalarFraction::new(self.num.add(&o.num), self.den.clone());
        }
        ScalarFraction::new(self.num.mul(&o.den).add(&o.num.mul(&self.den)), self.den.mul(&o.den))
    }

    pub fn neg(&self) -> ScalarFraction {
        ScalarFraction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &ScalarFraction) -> ScalarFraction {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &ScalarFraction) -> ScalarFraction {
        ScalarFraction::new(self.num.mul(&o.num), self.den.mul(&o.den))
    }

    pub fn inv(&self) -> Result<ScalarFraction, Error> {
        let n = self.num.invert()?;
        Ok(ScalarFraction::new(self.den.mul(&n.num), n.den))
    }

    /// The value as a scalar when the denominator is a unit monomial.
    pub fn to_scalar(&self) -> Option<Scalar> {
        let (c, k) = self.den.as_monomial()?;
        Some(self.num.mul(&Scalar::term(c.inv(), -k, 1)))
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.num.eval(theta) / self.den.eval(theta)
    }
}

impl PartialEq for ScalarFraction {
    fn eq(&self, o: &ScalarFraction) -> bool {
        self.num.mul(&o.den) == o.num.mul(&self.den)
    }
}

impl fmt::Display for ScalarFraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_reduce() {
        assert_eq!(Scalar::sqrt(2).mul(&Scalar::sqrt(8)), Scalar::int(4));
        assert_eq!(Scalar::sqrt(12), Scalar::int(2).mul(&Scalar::sqrt(3)));
        assert_eq!(Scalar::sqrt(6).mul(&Scalar::sqrt(10)), Scalar::int(2).mul(&Scalar::sqrt(15)));
    }

    #[test]
    fn normalize_examples() {
        let one = GaussQ::ONE;
        let s = Scalar::normalize(vec![(one.clone(), 0, 2)]).mul(&Scalar::normalize(vec![(one.clone(), 0, 8)]));
        assert_eq!(s, Scalar::int(4));
        assert_eq!(Scalar::mu(3).mul(&Scalar::mu(-3)), Scalar::one());
        assert!(Scalar::normalize(vec![(GaussQ::ZERO, 1, 1), (GaussQ::ZERO, 0, 1)]).is_zero());
    }

    #[test]
    fn conjugation() {
        assert_eq!(Scalar::mu(1).conj(), Scalar::mu(-1));
        let s = Scalar::i().mul(&Scalar::sqrt(2));
        assert_eq!(s.conj(), s.neg());
        assert_eq!(Scalar::frac(1, 2).conj(), Scalar::frac(1, 2));
    }

    #[test]
    fn inversion() {
        let inv = Scalar::mu(2).invert().unwrap();
        assert_eq!(inv.to_scalar().unwrap(), Scalar::mu(-2));
        let s = Scalar::one().add(&Scalar::sqrt(2));
        let inv = s.invert().unwrap();
        assert_eq!(inv.to_scalar().unwrap(), Scalar::sqrt(2).sub(&Scalar::one()));
        assert!(matches!(Scalar::zero().invert(), Err(Error::DivisionByZero)));
    }

    #[test]
    fn numeric_values() {
        let v = Scalar::mu(1).eval(0.5);
        assert!((v - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        assert!((Scalar::sqrt(2).eval(0.3).re - std::f64::consts::SQRT_2).abs() < 1e-15);
        let w = Scalar::mu(2).eval(1.0 / 3.0);
        assert!((w - Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)).norm() < 1e-15);
    }

    #[test]
    fn fraction_reduces() {
        // (mu^2 - 1) / (mu - 1) = mu + 1
        let num = Scalar::mu(2).sub(&Scalar::one());
        let den = Scalar::mu(1).sub(&Scalar::one());
        let f = ScalarFraction::new(num, den);
        assert_eq!(f.to_scalar().unwrap(), Scalar::mu(1).add(&Scalar::one()));
    }

    #[test]
    fn big_fallback() {
        let a = Q::frac(i64::MAX, 3);
        let b = a.mul(&a).mul(&a);
        assert!(matches!(b, Q::Big(_)));
        let c = b.mul(&a.inv()).mul(&a.inv());
        assert_eq!(c, a);
    }
}
