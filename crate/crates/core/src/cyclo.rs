//! Exact arithmetic in Q/Z and in cyclotomic fields Q(ζ_N).

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Exact rationals used throughout the crate.
pub type Q = Ratio<i64>;

/// Parses `"p/q"`, `"p"` or `"-p/q"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<Q> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not an exact rational: {s:?}"));
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().map_err(|_| bad())?;
            let q: i64 = q.trim().parse().map_err(|_| bad())?;
            if q == 0 {
                return Err(bad());
            }
            Ok(Q::new(p, q))
        }
        None => Ok(Q::from_integer(s.parse().map_err(|_| bad())?)),
    }
}

pub fn format_rational(q: &Q) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// A root of unity written additively: the class of a rational modulo 1.
/// `0` is the multiplicative identity `1 ∈ C^×`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RootOfUnity(Q);

impl RootOfUnity {
    pub const ONE: RootOfUnity = RootOfUnity(Ratio::new_raw(0, 1));

    pub fn new(q: Q) -> Self {
        let f = q - q.floor();
        RootOfUnity(f)
    }

    pub fn from_fraction(k: i64, n: i64) -> Self {
        Self::new(Q::new(k, n))
    }

    pub fn value(&self) -> Q {
        self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_zero()
    }

    /// Multiplicative order, i.e. the reduced denominator.
    pub fn order(&self) -> u32 {
        *self.0.denom() as u32
    }

    pub fn inv(self) -> Self {
        Self::new(-self.0)
    }

    pub fn pow(self, k: i64) -> Self {
        Self::new(self.0 * Q::from_integer(k))
    }

    pub fn to_cyclo(self) -> Cyclo {
        let n = self.order();
        let k = (*self.0.numer() as i64).rem_euclid(n as i64) as u32;
        Cyclo::root(k, n)
    }
}

impl std::ops::Add for RootOfUnity {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.0 + o.0)
    }
}

impl std::ops::Sub for RootOfUnity {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.0 - o.0)
    }
}

impl std::ops::Neg for RootOfUnity {
    type Output = Self;
    fn neg(self) -> Self {
        self.inv()
    }
}

impl fmt::Display for RootOfUnity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl Serialize for RootOfUnity {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for RootOfUnity {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s)
            .map(RootOfUnity::new)
            .map_err(serde::de::Error::custom)
    }
}

/// Least common multiple of the orders of a family of roots of unity.
pub fn common_order<'a>(it: impl IntoIterator<Item = &'a RootOfUnity>) -> u32 {
    it.into_iter().fold(1u32, |acc, r| acc.lcm(&r.order()))
}

pub fn euler_phi(n: u32) -> u32 {
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

fn poly_div_exact(num: &[i64], den: &[i64]) -> Vec<i64> {
    // den monic
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let mut quot = vec![0i64; num.len() - dd];
    for i in (0..quot.len()).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        if c != 0 {
            for (j, d) in den.iter().enumerate() {
                rem[i + j] -= c * d;
            }
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

/// Coefficients (low degree first) of the n-th cyclotomic polynomial.
pub fn cyclotomic_polynomial(n: u32) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&n) {
        return p.clone();
    }
    let mut p = vec![0i64; n as usize + 1];
    p[0] = -1;
    p[n as usize] = 1;
    for d in 1..n {
        if n % d == 0 {
            let q = cyclotomic_polynomial(d);
            p = poly_div_exact(&p, &q);
        }
    }
    let p = Arc::new(p);
    cache.lock().unwrap().insert(n, p.clone());
    p
}

/// An element of Q(ζ_N), stored in the power basis 1, ζ, …, ζ^{φ(N)-1}.
/// The representation is canonical for a fixed conductor; values with
/// different conductors are compared after embedding into the lcm.
#[derive(Clone, Debug)]
pub struct Cyclo {
    n: u32,
    c: Vec<Q>,
}

impl Cyclo {
    pub fn zero(n: u32) -> Self {
        Cyclo {
            n,
            c: vec![Q::zero(); euler_phi(n) as usize],
        }
    }

    pub fn from_rational(q: Q) -> Self {
        Cyclo { n: 1, c: vec![q] }
    }

    pub fn from_int(k: i64) -> Self {
        Self::from_rational(Q::from_integer(k))
    }

    /// ζ_n^k.
    pub fn root(k: u32, n: u32) -> Self {
        let mut v = vec![Q::zero(); n as usize];
        v[(k % n) as usize] = Q::one();
        Self::reduce(n, v)
    }

    /// Builds Σ coeffs[k] ζ_n^k from an arbitrary-length coefficient vector.
    pub fn from_powers(n: u32, coeffs: &[Q]) -> Self {
        let mut v = vec![Q::zero(); n as usize];
        for (k, c) in coeffs.iter().enumerate() {
            v[k % n as usize] += *c;
        }
        Self::reduce(n, v)
    }

    fn reduce(n: u32, mut v: Vec<Q>) -> Self {
        let phi = cyclotomic_polynomial(n);
        let d = phi.len() - 1;
        for deg in (d..v.len()).rev() {
            let c = v[deg];
            if !c.is_zero() {
                for (j, p) in phi.iter().enumerate() {
                    if *p != 0 {
                        v[deg - d + j] -= c * Q::from_integer(*p);
                    }
                }
            }
        }
        v.truncate(d);
        v.resize(d, Q::zero());
        Cyclo { n, c: v }
    }

    pub fn conductor(&self) -> u32 {
        self.n
    }

    pub fn coefficients(&self) -> &[Q] {
        &self.c
    }

    /// Embeds into Q(ζ_m); requires n | m.
    pub fn embed(&self, m: u32) -> Self {
        assert!(m % self.n == 0, "cannot embed Q(ζ_{}) into Q(ζ_{})", self.n, m);
        if m == self.n {
            return self.clone();
        }
        let step = (m / self.n) as usize;
        let mut v = vec![Q::zero(); m as usize];
        for (k, c) in self.c.iter().enumerate() {
            v[k * step] += *c;
        }
        Self::reduce(m, v)
    }

    fn align(a: &Cyclo, b: &Cyclo) -> (Cyclo, Cyclo) {
        if a.n == b.n {
            return (a.clone(), b.clone());
        }
        let m = a.n.lcm(&b.n);
        (a.embed(m), b.embed(m))
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(|c| c.is_zero())
    }

    /// Returns the value if it lies in Q.
    pub fn as_rational(&self) -> Option<Q> {
        // canonical forms of rationals are constant only after normalising the
        // conductor, so compare against the embedded constant
        let r = self.c.first().copied().unwrap_or_else(Q::zero);
        if Cyclo::from_rational(r) == *self {
            Some(r)
        } else {
            None
        }
    }

    pub fn add(&self, o: &Cyclo) -> Cyclo {
        let (a, b) = Self::align(self, o);
        Cyclo {
            n: a.n,
            c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect(),
        }
    }

    pub fn sub(&self, o: &Cyclo) -> Cyclo {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Cyclo {
        Cyclo {
            n: self.n,
            c: self.c.iter().map(|x| -x).collect(),
        }
    }

    pub fn scale(&self, q: Q) -> Cyclo {
        Cyclo {
            n: self.n,
            c: self.c.iter().map(|x| x * q).collect(),
        }
    }

    pub fn mul(&self, o: &Cyclo) -> Cyclo {
        let (a, b) = Self::align(self, o);
        let mut v = vec![Q::zero(); (a.c.len() + b.c.len()).max(1)];
        for (i, x) in a.c.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                if !y.is_zero() {
                    v[i + j] += x * y;
                }
            }
        }
        Self::reduce(a.n, v)
    }

    /// Multiplies by a root of unity.
    pub fn twist(&self, r: RootOfUnity) -> Cyclo {
        if r.is_one() {
            return self.clone();
        }
        self.mul(&r.to_cyclo())
    }

    /// Complex conjugation ζ ↦ ζ^{-1}.
    pub fn conj(&self) -> Cyclo {
        let n = self.n as usize;
        let mut v = vec![Q::zero(); n];
        for (k, c) in self.c.iter().enumerate() {
            v[(n - k) % n] += *c;
        }
        Self::reduce(self.n, v)
    }

    pub fn to_complex(&self) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (k, c) in self.c.iter().enumerate() {
            let x = *c.numer() as f64 / *c.denom() as f64;
            let th = 2.0 * std::f64::consts::PI * k as f64 / self.n as f64;
            re += x * th.cos();
            im += x * th.sin();
        }
        (re, im)
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Cyclo) -> bool {
        let (a, b) = Self::align(self, o);
        a.c == b.c
    }
}

impl Eq for Cyclo {}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(r) = self.as_rational() {
            return write!(f, "{}", format_rational(&r));
        }
        let mut first = true;
        for (k, c) in self.c.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, "{}", if c.is_negative() { " - " } else { " + " })?;
            } else if c.is_negative() {
                write!(f, "-")?;
            }
            first = false;
            let a = c.abs();
            match (k, a.is_one()) {
                (0, _) => write!(f, "{}", format_rational(&a))?,
                (_, true) => write!(f, "z{}^{}", self.n, k)?,
                _ => write!(f, "{}*z{}^{}", format_rational(&a), self.n, k)?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(*cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12).len() - 1, euler_phi(12) as usize);
    }

    #[test]
    fn roots_sum_to_zero() {
        for n in 2..13u32 {
            let s = (0..n).fold(Cyclo::zero(n), |acc, k| acc.add(&Cyclo::root(k, n)));
            assert!(s.is_zero(), "n={n}");
        }
    }

    #[test]
    fn embedding_is_compatible() {
        let a = Cyclo::root(1, 3);
        let b = Cyclo::root(2, 6);
        assert_eq!(a, b);
        assert_eq!(Cyclo::root(1, 2), Cyclo::from_int(-1));
        let i = Cyclo::root(1, 4);
        assert_eq!(i.mul(&i), Cyclo::from_int(-1));
        assert_eq!(i.conj(), Cyclo::root(3, 4));
    }

    #[test]
    fn root_of_unity_arithmetic() {
        let a = RootOfUnity::from_fraction(3, 4);
        let b = RootOfUnity::from_fraction(1, 2);
        assert_eq!(a + b, RootOfUnity::from_fraction(1, 4));
        assert_eq!((a + a.inv()), RootOfUnity::ONE);
        assert_eq!(a.order(), 4);
        assert_eq!(a.to_cyclo(), Cyclo::root(3, 4));
        assert_eq!(parse_rational("-3/6").unwrap(), Q::new(-1, 2));
    }
}
