//! Exact scalars: torsion values of the circle group and the cyclotomic
//! fields `Q(ζ_N)`.
//!
//! Elements of `Q(ζ_N)` are stored in the power basis `1, ζ_N, …, ζ_N^{d-1}`
//! of `Q[x]/(Φ_N)` with `d = φ(N)`, as an integer numerator vector over a
//! common positive denominator. Values of different conductors are lifted
//! into the lcm of the two conductors before any binary operation.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::rc::Rc;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// An element `exp(2πi·num/den)` of the torsion subgroup of the circle,
/// stored as a reduced fraction in `Q/Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootOfUnity {
    num: u64,
    den: u64,
}

impl RootOfUnity {
    /// Builds `num/den` reduced into `[0, 1)`. Panics on `den == 0`.
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "root of unity with zero denominator");
        let d = den as i128;
        let k = (num as i128).rem_euclid(d) as u64;
        let g = k.gcd(&den);
        RootOfUnity {
            num: k / g,
            den: den / g,
        }
    }

    pub fn one() -> Self {
        RootOfUnity { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Multiplicative order; equal to the reduced denominator.
    pub fn order(&self) -> u64 {
        self.den
    }

    pub fn is_one(&self) -> bool {
        self.num == 0
    }

    /// Group law of the torsion circle: `exp(2πia)·exp(2πib)`.
    pub fn combine(&self, other: &Self) -> Self {
        let l = self.den.lcm(&other.den);
        let a = self.num as u128 * (l / self.den) as u128;
        let b = other.num as u128 * (l / other.den) as u128;
        let s = ((a + b) % l as u128) as i64;
        RootOfUnity::new(s, l)
    }

    pub fn inverse(&self) -> Self {
        RootOfUnity::new(-(self.num as i64), self.den)
    }

    pub fn pow(&self, k: i64) -> Self {
        let d = self.den as i128;
        let e = ((self.num as i128) * (k as i128)).rem_euclid(d);
        RootOfUnity::new(e as i64, self.den)
    }

    /// Exponent `k` with `self = ζ_n^k`, when the order divides `n`.
    pub fn exponent_in(&self, n: u64) -> Option<u64> {
        if n == 0 || n % self.den != 0 {
            return None;
        }
        Some(self.num * (n / self.den))
    }
}

impl Default for RootOfUnity {
    fn default() -> Self {
        Self::one()
    }
}

impl Add for RootOfUnity {
    type Output = RootOfUnity;
    fn add(self, rhs: Self) -> Self {
        self.combine(&rhs)
    }
}

impl Neg for RootOfUnity {
    type Output = RootOfUnity;
    fn neg(self) -> Self {
        self.inverse()
    }
}

impl Sub for RootOfUnity {
    type Output = RootOfUnity;
    fn sub(self, rhs: Self) -> Self {
        self.combine(&rhs.inverse())
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RootOfUnity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("root of unity `{s}`, expected \"k/N\""));
        let (k, n) = s.trim().split_once('/').ok_or_else(bad)?;
        let k: i64 = k.trim().parse().map_err(|_| bad())?;
        let n: u64 = n.trim().parse().map_err(|_| bad())?;
        if n == 0 {
            return Err(bad());
        }
        Ok(RootOfUnity::new(k, n))
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

// ---------------------------------------------------------------------------
// Cyclotomic polynomials

thread_local! {
    static PHI_CACHE: RefCell<HashMap<u64, Rc<Vec<BigInt>>>> = RefCell::new(HashMap::new());
    static CTX_CACHE: RefCell<HashMap<u64, Rc<CycloCtx>>> = RefCell::new(HashMap::new());
}

/// `Φ_n` as ascending integer coefficients, computed as `x^n − 1` divided by
/// the product of `Φ_d` over the proper divisors `d` of `n`.
pub fn cyclotomic_polynomial(n: u64) -> Vec<BigInt> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    (*phi_cached(n)).clone()
}

fn phi_cached(n: u64) -> Rc<Vec<BigInt>> {
    if let Some(p) = PHI_CACHE.with(|c| c.borrow().get(&n).cloned()) {
        return p;
    }
    let mut poly = vec![BigInt::zero(); n as usize + 1];
    poly[0] = BigInt::from(-1);
    poly[n as usize] = BigInt::one();
    for d in 1..n {
        if n % d == 0 {
            let divisor = phi_cached(d);
            poly = exact_monic_division(&poly, &divisor);
        }
    }
    let p = Rc::new(poly);
    PHI_CACHE.with(|c| c.borrow_mut().insert(n, p.clone()));
    p
}

fn exact_monic_division(num: &[BigInt], den: &[BigInt]) -> Vec<BigInt> {
    let dn = den.len() - 1;
    let mut rem = num.to_vec();
    let qlen = num.len() - dn;
    let mut quot = vec![BigInt::zero(); qlen];
    for i in (0..qlen).rev() {
        let c = rem[i + dn].clone();
        if c.is_zero() {
            continue;
        }
        for (j, dj) in den.iter().enumerate() {
            rem[i + j] -= &c * dj;
        }
        quot[i] = c;
    }
    debug_assert!(rem.iter().all(Zero::is_zero));
    quot
}

/// Reduction data for one conductor: `x^k mod Φ_n` for `0 ≤ k < n`.
struct CycloCtx {
    degree: usize,
    powers: Vec<Vec<BigInt>>,
}

fn ctx(n: u64) -> Rc<CycloCtx> {
    if let Some(c) = CTX_CACHE.with(|c| c.borrow().get(&n).cloned()) {
        return c;
    }
    let phi = phi_cached(n);
    let degree = phi.len() - 1;
    let mut powers = Vec::with_capacity(n as usize);
    let mut cur = vec![BigInt::zero(); degree];
    if degree > 0 {
        cur[0] = BigInt::one();
    }
    for _ in 0..n {
        powers.push(cur.clone());
        // multiply by x and reduce the overflow coefficient
        let top = cur.pop().unwrap_or_default();
        cur.insert(0, BigInt::zero());
        if !top.is_zero() {
            for j in 0..degree {
                cur[j] -= &top * &phi[j];
            }
        }
    }
    let c = Rc::new(CycloCtx { degree, powers });
    CTX_CACHE.with(|cache| cache.borrow_mut().insert(n, c.clone()));
    c
}

/// Euler totient, i.e. the degree of `Φ_n`.
pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            while m % p == 0 {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

// ---------------------------------------------------------------------------
// Cyclotomic numbers

/// An exact element of `Q(ζ_N)`.
#[derive(Clone)]
pub struct Cyclo {
    conductor: u64,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Cyclo {
    /// Builds an element from power-basis coordinates. The coefficient
    /// vector must have length `φ(conductor)`.
    pub fn from_coeffs(conductor: u64, coeffs: &[BigRational]) -> Result<Self> {
        if conductor == 0 {
            return Err(Error::Invalid("conductor must be positive".into()));
        }
        let d = totient(conductor) as usize;
        if coeffs.len() != d {
            return Err(Error::Invalid(format!(
                "conductor {conductor} needs {d} coefficients, got {}",
                coeffs.len()
            )));
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        let num = coeffs
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        Ok(Cyclo::normalized(conductor, num, den))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let (n, d) = q.into_raw();
        Cyclo::normalized(1, vec![n], d)
    }

    pub fn from_int(k: i64) -> Self {
        Cyclo {
            conductor: 1,
            num: vec![BigInt::from(k)],
            den: BigInt::one(),
        }
    }

    /// `ζ_n^k`.
    pub fn zeta_pow(n: u64, k: i64) -> Self {
        let c = ctx(n);
        let e = (k as i128).rem_euclid(n as i128) as usize;
        Cyclo {
            conductor: n,
            num: c.powers[e].clone(),
            den: BigInt::one(),
        }
    }

    /// Power-basis representative of the root of unity `r` inside
    /// `Q(ζ_conductor)`; rejects when `r.den()` does not divide `conductor`.
    pub fn embed_rou(r: &RootOfUnity, conductor: u64) -> Result<Self> {
        match r.exponent_in(conductor) {
            Some(k) => Ok(Cyclo::zeta_pow(conductor, k as i64)),
            None => Err(Error::Invalid(format!(
                "root of unity {r} does not live in conductor {conductor}"
            ))),
        }
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// Rational power-basis coordinates.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|n| BigRational::new(n.clone(), self.den.clone()))
            .collect()
    }

    fn normalized(conductor: u64, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -&*n;
            }
        }
        let mut g = den.clone();
        for n in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if num.iter().all(Zero::is_zero) {
            return Cyclo {
                conductor,
                num,
                den: BigInt::one(),
            };
        }
        if !g.is_one() {
            for n in num.iter_mut() {
                *n /= &g;
            }
            den /= &g;
        }
        Cyclo {
            conductor,
            num,
            den,
        }
    }

    fn is_rational_fast(&self) -> bool {
        self.num.iter().skip(1).all(Zero::is_zero)
    }

    /// Re-embeds into `Q(ζ_m)`; `m` must be a multiple of the conductor.
    pub fn lift(&self, m: u64) -> Self {
        assert!(m % self.conductor == 0, "lift to a non-multiple conductor");
        if m == self.conductor {
            return self.clone();
        }
        let c = ctx(m);
        let step = (m / self.conductor) as usize;
        let mut num = vec![BigInt::zero(); c.degree];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            let p = &c.powers[(i * step) % m as usize];
            for (acc, x) in num.iter_mut().zip(p) {
                if !x.is_zero() {
                    *acc += a * x;
                }
            }
        }
        Cyclo {
            conductor: m,
            num,
            den: self.den.clone(),
        }
    }

    fn align(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        let l = a.conductor.lcm(&b.conductor);
        (a.lift(l), b.lift(l))
    }

    fn scale(&self, q_num: &BigInt, q_den: &BigInt) -> Cyclo {
        let num = self.num.iter().map(|n| n * q_num).collect();
        Cyclo::normalized(self.conductor, num, &self.den * q_den)
    }

    fn add_ref(&self, other: &Cyclo) -> Cyclo {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        if self.conductor != other.conductor {
            let (a, b) = Cyclo::align(self, other);
            return a.add_ref(&b);
        }
        let num = self
            .num
            .iter()
            .zip(&other.num)
            .map(|(a, b)| a * &other.den + b * &self.den)
            .collect();
        Cyclo::normalized(self.conductor, num, &self.den * &other.den)
    }

    fn mul_ref(&self, other: &Cyclo) -> Cyclo {
        if self.is_zero() || other.is_zero() {
            return Cyclo::zero();
        }
        if self.is_rational_fast() {
            return other.scale(&self.num[0], &self.den);
        }
        if other.is_rational_fast() {
            return self.scale(&other.num[0], &other.den);
        }
        if self.conductor != other.conductor {
            let (a, b) = Cyclo::align(self, other);
            return a.mul_ref(&b);
        }
        let n = self.conductor as usize;
        let c = ctx(self.conductor);
        let d = c.degree;
        let mut prod = vec![BigInt::zero(); 2 * d - 1];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.num.iter().enumerate() {
                if !b.is_zero() {
                    prod[i + j] += a * b;
                }
            }
        }
        let mut num: Vec<BigInt> = prod[..d].to_vec();
        for (k, p) in prod.iter().enumerate().skip(d) {
            if p.is_zero() {
                continue;
            }
            for (acc, x) in num.iter_mut().zip(&c.powers[k % n]) {
                if !x.is_zero() {
                    *acc += p * x;
                }
            }
        }
        Cyclo::normalized(self.conductor, num, &self.den * &other.den)
    }

    /// Multiplicative inverse via the extended Euclidean algorithm against
    /// `Φ_N`; `None` for zero.
    pub fn inverse(&self) -> Option<Cyclo> {
        if self.is_zero() {
            return None;
        }
        if self.is_rational_fast() {
            return Some(Cyclo::normalized(
                1,
                vec![self.den.clone()],
                self.num[0].clone(),
            ));
        }
        let phi: Vec<BigRational> = phi_cached(self.conductor)
            .iter()
            .map(|c| BigRational::from_integer(c.clone()))
            .collect();
        let a: Vec<BigRational> = self.coeffs();
        let s = qpoly::inverse_mod(&a, &phi)?;
        let mut coeffs = s;
        coeffs.resize(phi.len() - 1, BigRational::zero());
        Cyclo::from_coeffs(self.conductor, &coeffs).ok()
    }

    /// Complex conjugation, the Galois automorphism `ζ_N ↦ ζ_N^{N−1}`.
    pub fn conjugate(&self) -> Cyclo {
        if self.is_rational_fast() {
            return self.clone();
        }
        let n = self.conductor as usize;
        let c = ctx(self.conductor);
        let mut num = vec![BigInt::zero(); c.degree];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (acc, x) in num.iter_mut().zip(&c.powers[(n - i) % n]) {
                if !x.is_zero() {
                    *acc += a * x;
                }
            }
        }
        Cyclo::normalized(self.conductor, num, self.den.clone())
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational_fast() {
            Some(BigRational::new(self.num[0].clone(), self.den.clone()))
        } else {
            None
        }
    }

    /// Recognizes `±ζ_N^k`.
    pub fn as_root_of_unity(&self) -> Option<RootOfUnity> {
        if !self.den.is_one() {
            return None;
        }
        let n = self.conductor;
        let c = ctx(n);
        for (k, p) in c.powers.iter().enumerate() {
            if *p == self.num {
                return Some(RootOfUnity::new(k as i64, n));
            }
            if p.iter().zip(&self.num).all(|(x, y)| *x == -y) {
                return Some(RootOfUnity::new(2 * k as i64 + n as i64, 2 * n));
            }
        }
        None
    }

    pub fn pow(&self, e: u64) -> Cyclo {
        let mut base = self.clone();
        let mut acc = Cyclo::one();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_ref(&base);
            }
        }
        acc
    }
}

impl Zero for Cyclo {
    fn zero() -> Self {
        Cyclo::from_int(0)
    }
    fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }
}

impl One for Cyclo {
    fn one() -> Self {
        Cyclo::from_int(1)
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, other: &Self) -> bool {
        if self.conductor == other.conductor {
            return self.den == other.den && self.num == other.num;
        }
        if self.is_rational_fast() && other.is_rational_fast() {
            return self.den == other.den && self.num[0] == other.num[0];
        }
        let (a, b) = Cyclo::align(self, other);
        a.den == b.den && a.num == b.num
    }
}

impl Eq for Cyclo {}

macro_rules! forward_binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<Cyclo> for Cyclo {
            type Output = Cyclo;
            fn $m(self, rhs: Cyclo) -> Cyclo {
                $body(&self, &rhs)
            }
        }
        impl<'a> $tr<&'a Cyclo> for Cyclo {
            type Output = Cyclo;
            fn $m(self, rhs: &'a Cyclo) -> Cyclo {
                $body(&self, rhs)
            }
        }
        impl<'a, 'b> $tr<&'b Cyclo> for &'a Cyclo {
            type Output = Cyclo;
            fn $m(self, rhs: &'b Cyclo) -> Cyclo {
                $body(self, rhs)
            }
        }
    };
}

forward_binop!(Add, add, |a: &Cyclo, b: &Cyclo| a.add_ref(b));
forward_binop!(Mul, mul, |a: &Cyclo, b: &Cyclo| a.mul_ref(b));
forward_binop!(Sub, sub, |a: &Cyclo, b: &Cyclo| a.add_ref(&-b));

impl Neg for Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        -&self
    }
}

impl Neg for &Cyclo {
    type Output = Cyclo;
    fn neg(self) -> Cyclo {
        Cyclo {
            conductor: self.conductor,
            num: self.num.iter().map(|n| -n).collect(),
            den: self.den.clone(),
        }
    }
}

impl fmt::Debug for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyclo({self})")
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, q) in self.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let (sign, mag) = if q.is_negative() {
                ("-", -q)
            } else {
                ("+", q.clone())
            };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{mag}")?,
                _ => {
                    if !mag.is_one() {
                        write!(f, "{mag}*")?;
                    }
                    write!(f, "z{}", self.conductor)?;
                    if i > 1 {
                        write!(f, "^{i}")?;
                    }
                }
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycloRepr {
    conductor: u64,
    coeffs: Vec<String>,
}

impl Serialize for Cyclo {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloRepr {
            conductor: self.conductor,
            coeffs: self.coeffs().iter().map(format_rational).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cyclo {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CycloRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Cyclo::from_coeffs(repr.conductor, &coeffs).map_err(serde::de::Error::custom)
    }
}

/// Formats a rational as `"p/q"` (always with a denominator).
pub fn format_rational(q: &BigRational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `"p/q"` or `"p"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("rational `{s}`"));
    let (n, d) = match s.trim().split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

/// Exact `n`-th root of a rational, if it exists.
pub fn rational_nth_root(q: &BigRational, n: u32) -> Option<BigRational> {
    if n == 0 {
        return None;
    }
    let root = |x: &BigInt| -> Option<BigInt> {
        if x.is_negative() {
            if n % 2 == 0 {
                return None;
            }
            let r = (-x).nth_root(n);
            return (r.pow(n) == -x).then_some(-r);
        }
        let r = x.nth_root(n);
        (r.pow(n) == *x).then_some(r)
    };
    Some(BigRational::new(root(q.numer())?, root(q.denom())?))
}

// ---------------------------------------------------------------------------
// The scalar-field abstraction

/// A field of characteristic zero with a complex-conjugation automorphism
/// and (partial) access to roots of unity. All algebra code is generic over
/// this trait.
pub trait Field:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
    + Send
    + Sync
    + 'static
{
    fn inv(&self) -> Option<Self>;

    fn conj(&self) -> Self;

    fn from_rational(q: BigRational) -> Self;

    fn from_int(k: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(k)))
    }

    /// The value `exp(2πi·r)`, when the field contains it.
    fn root_of_unity(r: &RootOfUnity) -> Option<Self>;

    fn as_rational(&self) -> Option<BigRational>;

    /// Recognizes elements that are roots of unity.
    fn as_root_of_unity(&self) -> Option<RootOfUnity>;

    /// `self += a * b`.
    fn mul_acc(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        let prod = a.clone() * b;
        let cur = std::mem::replace(self, Self::zero());
        *self = cur + &prod;
    }

    fn pow_u(&self, e: u64) -> Self {
        let mut acc = Self::one();
        for _ in 0..e {
            acc = acc * self;
        }
        acc
    }
}

impl Field for Cyclo {
    fn inv(&self) -> Option<Self> {
        self.inverse()
    }

    fn conj(&self) -> Self {
        self.conjugate()
    }

    fn from_rational(q: BigRational) -> Self {
        Cyclo::from_rational(q)
    }

    fn from_int(k: i64) -> Self {
        Cyclo::from_int(k)
    }

    fn root_of_unity(r: &RootOfUnity) -> Option<Self> {
        Some(Cyclo::zeta_pow(r.den(), r.num() as i64))
    }

    fn as_rational(&self) -> Option<BigRational> {
        Cyclo::as_rational(self)
    }

    fn as_root_of_unity(&self) -> Option<RootOfUnity> {
        Cyclo::as_root_of_unity(self)
    }

    fn pow_u(&self, e: u64) -> Self {
        self.pow(e)
    }
}

impl Field for BigRational {
    fn inv(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }

    fn conj(&self) -> Self {
        self.clone()
    }

    fn from_rational(q: BigRational) -> Self {
        q
    }

    fn root_of_unity(r: &RootOfUnity) -> Option<Self> {
        match r.den() {
            1 => Some(BigRational::one()),
            2 => Some(-BigRational::one()),
            _ => None,
        }
    }

    fn as_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }

    fn as_root_of_unity(&self) -> Option<RootOfUnity> {
        if self.is_one() {
            Some(RootOfUnity::one())
        } else if *self == -BigRational::one() {
            Some(RootOfUnity::new(1, 2))
        } else {
            None
        }
    }
}

/// Dense univariate polynomials over `Q`, only what the field inverse needs.
mod qpoly {
    use num_rational::BigRational;
    use num_traits::Zero;

    fn trim(p: &mut Vec<BigRational>) {
        while p.last().is_some_and(Zero::is_zero) {
            p.pop();
        }
    }

    fn divrem(a: &[BigRational], b: &[BigRational]) -> (Vec<BigRational>, Vec<BigRational>) {
        let mut r = a.to_vec();
        trim(&mut r);
        let db = b.len() - 1;
        let lead = b[db].clone();
        if r.len() < b.len() {
            return (vec![], r);
        }
        let mut q = vec![BigRational::zero(); r.len() - db];
        while r.len() >= b.len() {
            let shift = r.len() - b.len();
            let c = r.last().unwrap().clone() / &lead;
            for (j, bj) in b.iter().enumerate() {
                let t = &c * bj;
                r[shift + j] -= t;
            }
            q[shift] = c;
            r.pop();
            trim(&mut r);
        }
        (q, r)
    }

    fn mul(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        if a.is_empty() || b.is_empty() {
            return vec![];
        }
        let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        trim(&mut out);
        out
    }

    fn sub(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = a.len().max(b.len());
        let mut out: Vec<BigRational> = (0..n)
            .map(|i| {
                let x = a.get(i).cloned().unwrap_or_else(BigRational::zero);
                let y = b.get(i).cloned().unwrap_or_else(BigRational::zero);
                x - y
            })
            .collect();
        trim(&mut out);
        out
    }

    /// `s` with `s·a ≡ 1 (mod m)`, when `gcd(a, m) = 1`.
    pub fn inverse_mod(a: &[BigRational], m: &[BigRational]) -> Option<Vec<BigRational>> {
        let mut r0 = m.to_vec();
        trim(&mut r0);
        let mut r1 = a.to_vec();
        trim(&mut r1);
        let mut s0: Vec<BigRational> = vec![];
        let mut s1: Vec<BigRational> = vec![BigRational::from_integer(1.into())];
        while !r1.is_empty() {
            let (q, r) = divrem(&r0, &r1);
            let s = sub(&s0, &mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.len() != 1 {
            return None;
        }
        let c = r0[0].clone();
        Some(s0.into_iter().map(|x| x / &c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_inverse_in_larger_conductor() {
        let three = Cyclo::from_int(3).lift(3);
        let third = three.inverse().unwrap();
        let mut acc = Cyclo::zeta_pow(3, 1);
        acc.mul_acc(&third, &Cyclo::from_int(-3));
        acc.mul_acc(&Cyclo::zeta_pow(3, 2), &Cyclo::from_int(1));
        assert_eq!(acc, Cyclo::from_int(-2));
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn cyc(n: u64, c: &[i64]) -> Cyclo {
        Cyclo::from_coeffs(n, &c.iter().map(|&x| q(x, 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn rou_combine_examples() {
        let h = RootOfUnity::new(1, 2);
        assert_eq!(h + h, RootOfUnity::new(0, 1));
        assert_eq!(RootOfUnity::new(1, 3) + RootOfUnity::new(1, 6), RootOfUnity::new(1, 2));
        assert_eq!(RootOfUnity::new(2, 5) + RootOfUnity::new(4, 5), RootOfUnity::new(1, 5));
    }

    #[test]
    fn rou_normalizes_fractions() {
        let r = RootOfUnity::new(-3, 6);
        assert_eq!((r.num(), r.den()), (1, 2));
        assert_eq!(RootOfUnity::new(4, 4), RootOfUnity::one());
        assert_eq!("3/9".parse::<RootOfUnity>().unwrap().to_string(), "1/3");
        assert!("1/0".parse::<RootOfUnity>().is_err());
    }

    #[test]
    fn rou_group_axioms_exhaustive() {
        let all: Vec<RootOfUnity> = (1..=12u64)
            .flat_map(|d| (0..d).map(move |k| RootOfUnity::new(k as i64, d)))
            .collect();
        for a in &all {
            assert_eq!(*a + RootOfUnity::one(), *a);
            assert_eq!(*a + a.inverse(), RootOfUnity::one());
            assert_eq!(a.inverse(), RootOfUnity::new((a.den() - a.num()) as i64, a.den()));
            for b in &all {
                assert_eq!(*a + *b, *b + *a);
            }
        }
        for a in all.iter().step_by(3) {
            for b in all.iter().step_by(2) {
                for c in all.iter().step_by(5) {
                    assert_eq!((*a + *b) + *c, *a + (*b + *c));
                }
            }
        }
    }

    #[test]
    fn cyclotomic_polynomial_examples() {
        assert_eq!(cyclotomic_polynomial(1), ints(&[-1, 1]));
        assert_eq!(cyclotomic_polynomial(4), ints(&[1, 0, 1]));
        assert_eq!(cyclotomic_polynomial(6), ints(&[1, -1, 1]));
        assert_eq!(cyclotomic_polynomial(12), ints(&[1, 0, -1, 0, 1]));
        for n in 1..40 {
            assert_eq!(cyclotomic_polynomial(n).len() as u64 - 1, totient(n));
        }
    }

    #[test]
    fn embed_rou_examples() {
        let m1 = Cyclo::embed_rou(&RootOfUnity::new(1, 2), 4).unwrap();
        assert_eq!(m1, Cyclo::from_int(-1));
        assert_eq!(m1.coeffs(), vec![q(-1, 1), q(0, 1)]);
        let one = Cyclo::embed_rou(&RootOfUnity::one(), 3).unwrap();
        assert_eq!(one.coeffs(), vec![q(1, 1), q(0, 1)]);
        let z = Cyclo::embed_rou(&RootOfUnity::new(1, 3), 6).unwrap();
        assert_eq!(z.coeffs(), vec![q(-1, 1), q(1, 1)]);
        assert!(Cyclo::embed_rou(&RootOfUnity::new(1, 4), 6).is_err());
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(Cyclo::one().inverse().unwrap(), Cyclo::one());
        let z3 = cyc(3, &[0, 1]);
        assert_eq!(z3.inverse().unwrap().coeffs(), vec![q(-1, 1), q(-1, 1)]);
        let x = cyc(3, &[1, 1]);
        assert_eq!(x.inverse().unwrap(), -z3);
        assert!(Cyclo::zero().inverse().is_none());
    }

    #[test]
    fn conjugate_examples() {
        let r = Cyclo::from_rational(q(3, 7));
        assert_eq!(r.conjugate(), r);
        let i = Cyclo::zeta_pow(4, 1);
        assert_eq!(i.conjugate(), -i.clone());
        let z5 = Cyclo::zeta_pow(5, 1);
        assert_eq!(
            z5.conjugate().coeffs(),
            vec![q(-1, 1), q(-1, 1), q(-1, 1), q(-1, 1)]
        );
    }

    #[test]
    fn mixed_conductors_lift_to_lcm() {
        let i = Cyclo::zeta_pow(4, 1);
        let w = Cyclo::zeta_pow(3, 1);
        let p = i.clone() * &w;
        assert_eq!(p.conductor(), 12);
        assert_eq!(p, Cyclo::zeta_pow(12, 7));
        assert_eq!(Cyclo::zeta_pow(12, 3), i);
    }

    #[test]
    fn recognizes_roots_of_unity() {
        for n in 1..=12u64 {
            for k in 0..n {
                let z = Cyclo::zeta_pow(n, k as i64);
                assert_eq!(z.as_root_of_unity(), Some(RootOfUnity::new(k as i64, n)));
            }
        }
        assert_eq!(Cyclo::from_int(-1).as_root_of_unity(), Some(RootOfUnity::new(1, 2)));
        assert_eq!(Cyclo::from_int(2).as_root_of_unity(), None);
        let m = -Cyclo::zeta_pow(3, 1);
        assert_eq!(m.as_root_of_unity(), Some(RootOfUnity::new(5, 6)));
    }

    #[test]
    fn serde_shape() {
        let z = Cyclo::zeta_pow(3, 2);
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"{"conductor":3,"coeffs":["-1/1","-1/1"]}"#);
        let back: Cyclo = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
        let r: RootOfUnity = serde_json::from_str("\"2/6\"").unwrap();
        assert_eq!(serde_json::to_string(&r).unwrap(), "\"1/3\"");
    }

    #[test]
    fn nth_roots() {
        assert_eq!(rational_nth_root(&q(9, 25), 2), Some(q(3, 5)));
        assert_eq!(rational_nth_root(&q(-8, 27), 3), Some(q(-2, 3)));
        assert_eq!(rational_nth_root(&q(2, 1), 2), None);
    }
}
