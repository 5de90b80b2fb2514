//! Exact arithmetic helpers: decimal rationals, binomial rows and the
//! count rings used by the gradient passes.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Parse a decimal string such as `"176"`, `"-2.5"` or `"1e3"`, or a fraction `"3/4"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::input(format!("invalid numeric value {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i64 = t[i + 1..].parse().map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut num: BigInt = all.parse().map_err(|_| bad())?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let r = if scale >= 0 {
        BigRational::from_integer(num * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(num, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

/// Render a rational exactly: plain decimal when the denominator has only
/// factors 2 and 5, otherwise `num/den`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        return r.to_integer().to_string();
    }
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while d.is_even() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{}/{}", r.numer(), r.denom());
    }
    let places = twos.max(fives);
    let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), places));
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let digits = n.abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (ip, fp) = digits.split_at(digits.len() - places);
    format!("{}{}.{}", if neg { "-" } else { "" }, ip, fp)
}

/// Nearest double of an exact rational (display only).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // fall back on shifting both sides into range
    let nb = r.numer().bits() as i64;
    let db = r.denom().bits() as i64;
    let shift = (nb - db) - 60;
    let q = if shift >= 0 {
        r.numer() / (r.denom() << shift as usize)
    } else {
        (r.numer() << (-shift) as usize) / r.denom()
    };
    q.to_f64().unwrap_or(f64::NAN) * 2f64.powi(shift as i32)
}

/// Row `n` of Pascal's triangle.
pub fn binomial_row(n: usize) -> Vec<BigInt> {
    let mut row = Vec::with_capacity(n + 1);
    let mut c = BigInt::one();
    row.push(c.clone());
    for k in 0..n {
        c = c * BigInt::from(n - k) / BigInt::from(k + 1);
        row.push(c.clone());
    }
    row
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Commutative ring in which node counts live. `BigInt` evaluates the
/// size-generating polynomial at z = 1 (plain counts); [`Poly`] keeps the
/// full size resolution.
pub trait CountRing: Clone + std::fmt::Debug {
    fn nil() -> Self;
    fn unit() -> Self;
    /// Number of valuations of `n` variables, i.e. (1+z)^n.
    fn total(n: usize) -> Self;
    /// The generating polynomial of a single variable being true, i.e. z.
    fn var() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: &BigInt) -> Self;
    fn is_nil(&self) -> bool;
}

impl CountRing for BigInt {
    fn nil() -> Self {
        BigInt::zero()
    }
    fn unit() -> Self {
        BigInt::one()
    }
    fn total(n: usize) -> Self {
        BigInt::one() << n
    }
    fn var() -> Self {
        BigInt::one()
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &BigInt) -> Self {
        self * c
    }
    fn is_nil(&self) -> bool {
        Zero::is_zero(self)
    }
}

/// Integer polynomial in z; coefficient k counts valuations with k true variables.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub Vec<BigInt>);

impl Poly {
    pub fn coeff(&self, k: usize) -> BigInt {
        self.0.get(k).cloned().unwrap_or_default()
    }

    pub fn eval_one(&self) -> BigInt {
        self.0.iter().sum()
    }

    fn trimmed(mut v: Vec<BigInt>) -> Poly {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        Poly(v)
    }
}

impl CountRing for Poly {
    fn nil() -> Self {
        Poly(Vec::new())
    }
    fn unit() -> Self {
        Poly(vec![BigInt::one()])
    }
    fn total(n: usize) -> Self {
        Poly(binomial_row(n))
    }
    fn var() -> Self {
        Poly(vec![BigInt::zero(), BigInt::one()])
    }
    fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|k| self.coeff(k) + other.coeff(k)).collect();
        Poly::trimmed(v)
    }
    fn sub(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|k| self.coeff(k) - other.coeff(k)).collect();
        Poly::trimmed(v)
    }
    fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Poly::nil();
        }
        let mut v = vec![BigInt::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Poly::trimmed(v)
    }
    fn scale(&self, c: &BigInt) -> Self {
        Poly::trimmed(self.0.iter().map(|a| a * c).collect())
    }
    fn is_nil(&self) -> bool {
        self.0.iter().all(|c| c.is_zero())
    }
}

/// Products of all entries but one, via prefix and suffix products.
pub fn products_excluding_self<R: CountRing>(xs: &[R]) -> Vec<R> {
    let n = xs.len();
    let mut prefix = Vec::with_capacity(n);
    let mut acc = R::unit();
    for x in xs {
        prefix.push(acc.clone());
        acc = acc.mul(x);
    }
    let mut out = vec![R::unit(); n];
    let mut suffix = R::unit();
    for i in (0..n).rev() {
        out[i] = prefix[i].mul(&suffix);
        suffix = suffix.mul(&xs[i]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(parse_rational("176").unwrap(), q(176, 1));
        assert_eq!(parse_rational("-2.50").unwrap(), q(-5, 2));
        assert_eq!(parse_rational("1e2").unwrap(), q(100, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("3/6").unwrap(), q(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(format_rational(&q(24, 1)), "24");
        assert_eq!(format_rational(&q(-5, 2)), "-2.5");
        assert_eq!(format_rational(&q(1, 40)), "0.025");
        assert_eq!(format_rational(&q(1, 3)), "1/3");
        for r in [q(7, 8), q(-3, 20), q(123, 1), q(2, 7)] {
            let s = format_rational(&r);
            assert_eq!(parse_rational(&s).unwrap(), r);
        }
    }

    #[test]
    fn poly_ring() {
        let t = Poly::total(3);
        assert_eq!(t.0, vec![1.into(), 3.into(), 3.into(), 1.into()]);
        let z = Poly::var();
        assert_eq!(z.mul(&Poly::total(1)).0, vec![0.into(), 1.into(), 1.into()]);
        assert_eq!(t.sub(&t), Poly::nil());
    }

    #[test]
    fn excluding_self() {
        let xs: Vec<BigInt> = vec![2.into(), 0.into(), 5.into()];
        let out = products_excluding_self(&xs);
        assert_eq!(out, vec![BigInt::from(0), BigInt::from(10), BigInt::from(0)]);
    }

    #[test]
    fn huge_rational_to_float() {
        let r = BigRational::new(BigInt::one() << 2000, (BigInt::one() << 1999) * 3);
        assert!((rational_to_f64(&r) - 2.0 / 3.0).abs() < 1e-12);
    }
}
