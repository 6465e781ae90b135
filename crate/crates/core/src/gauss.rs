//! Exact arithmetic in the Gaussian rationals ℚ(i).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct GaussRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl GaussRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        GaussRational { re, im }
    }

    pub fn from_ints(re: i64, im: i64) -> Self {
        GaussRational::new(BigRational::from_integer(re.into()), BigRational::from_integer(im.into()))
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        GaussRational::real(BigRational::new(num.into(), den.into()))
    }

    pub fn real(re: BigRational) -> Self {
        GaussRational::new(re, BigRational::zero())
    }

    pub fn i() -> Self {
        GaussRational::from_ints(0, 1)
    }

    pub fn conj(&self) -> Self {
        GaussRational::new(self.re.clone(), -self.im.clone())
    }

    pub fn norm_sqr(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm_sqr();
        Some(GaussRational::new(&self.re / &n, -&self.im / &n))
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = GaussRational::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Exact square root when it lies in ℚ(i).
    pub fn sqrt(&self) -> Option<Self> {
        if self.is_zero() {
            return Some(GaussRational::zero());
        }
        let r = rational_root(&self.norm_sqr(), 2)?;
        let two = BigRational::from_integer(2.into());
        let a = rational_root(&((&self.re + &r) / &two), 2)?;
        let b = rational_root(&((&r - &self.re) / &two), 2)?;
        let b = if self.im.is_negative() { -b } else { b };
        let cand = GaussRational::new(a, b);
        if &(&cand * &cand) == self {
            Some(cand)
        } else {
            None
        }
    }

    /// Some exact k-th root in ℚ(i), if one exists.
    pub fn nth_root(&self, k: u32) -> Option<Self> {
        match k {
            0 => None,
            1 => Some(self.clone()),
            _ if self.is_zero() => Some(GaussRational::zero()),
            _ if k % 2 == 0 => self.sqrt()?.nth_root(k / 2),
            _ => {
                if self.im.is_zero() {
                    let neg = self.re.is_negative();
                    let r = rational_root(&self.re.abs(), k)?;
                    return Some(GaussRational::real(if neg { -r } else { r }));
                }
                if self.re.is_zero() {
                    // (i^a * r)^k with i^k = ±i
                    let neg = self.im.is_negative();
                    let r = rational_root(&self.im.abs(), k)?;
                    let ik = GaussRational::i().pow(k);
                    let target_sign_i = if neg { -GaussRational::i() } else { GaussRational::i() };
                    let unit = if ik == target_sign_i { GaussRational::i() } else { -GaussRational::i() };
                    return Some(&unit * &GaussRational::real(r));
                }
                None
            }
        }
    }

    /// Approximate modulus comparison |self| < r, decided exactly via squares.
    pub fn modulus_lt(&self, r: &BigRational) -> bool {
        self.norm_sqr() < r * r
    }
}

/// Exact k-th root of a non-negative rational, when rational.
pub fn rational_root(q: &BigRational, k: u32) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let n = int_root(q.numer(), k)?;
    let d = int_root(q.denom(), k)?;
    Some(BigRational::new(n, d))
}

fn int_root(n: &BigInt, k: u32) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(k);
    if num_traits::pow(r.clone(), k as usize) == *n {
        Some(r)
    } else {
        None
    }
}

impl Zero for GaussRational {
    fn zero() -> Self {
        GaussRational::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl One for GaussRational {
    fn one() -> Self {
        GaussRational::from_ints(1, 0)
    }
}

impl From<i64> for GaussRational {
    fn from(v: i64) -> Self {
        GaussRational::from_ints(v, 0)
    }
}

impl From<BigRational> for GaussRational {
    fn from(v: BigRational) -> Self {
        GaussRational::real(v)
    }
}

impl<'a> Add<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn add(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re + &o.re, &self.im + &o.im)
    }
}

impl<'a> Sub<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn sub(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(&self.re - &o.re, &self.im - &o.im)
    }
}

impl<'a> Mul<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn mul(self, o: &GaussRational) -> GaussRational {
        GaussRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }
}

impl<'a> Div<&'a GaussRational> for &'a GaussRational {
    type Output = GaussRational;
    fn div(self, o: &GaussRational) -> GaussRational {
        self * &o.inv().expect("division by zero in ℚ(i)")
    }
}

impl Add for GaussRational {
    type Output = GaussRational;
    fn add(self, o: GaussRational) -> GaussRational {
        &self + &o
    }
}

impl Sub for GaussRational {
    type Output = GaussRational;
    fn sub(self, o: GaussRational) -> GaussRational {
        &self - &o
    }
}

impl Mul for GaussRational {
    type Output = GaussRational;
    fn mul(self, o: GaussRational) -> GaussRational {
        &self * &o
    }
}

impl Div for GaussRational {
    type Output = GaussRational;
    fn div(self, o: GaussRational) -> GaussRational {
        &self / &o
    }
}

impl AddAssign<&GaussRational> for GaussRational {
    fn add_assign(&mut self, o: &GaussRational) {
        self.re += &o.re;
        self.im += &o.im;
    }
}

impl SubAssign<&GaussRational> for GaussRational {
    fn sub_assign(&mut self, o: &GaussRational) {
        self.re -= &o.re;
        self.im -= &o.im;
    }
}

impl MulAssign<&GaussRational> for GaussRational {
    fn mul_assign(&mut self, o: &GaussRational) {
        *self = &*self * o;
    }
}

impl Neg for GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-self.re, -self.im)
    }
}

impl Neg for &GaussRational {
    type Output = GaussRational;
    fn neg(self) -> GaussRational {
        GaussRational::new(-self.re.clone(), -self.im.clone())
    }
}

fn fmt_rat(q: &BigRational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for GaussRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let im_part = |q: &BigRational| -> String {
            if q.is_one() {
                "i".to_string()
            } else if (-q).is_one() {
                "-i".to_string()
            } else {
                format!("{}*i", fmt_rat(q))
            }
        };
        match (self.re.is_zero(), self.im.is_zero()) {
            (_, true) => write!(f, "{}", fmt_rat(&self.re)),
            (true, false) => write!(f, "{}", im_part(&self.im)),
            (false, false) => {
                let im = im_part(&self.im.abs());
                let sign = if self.im.is_negative() { "-" } else { "+" };
                write!(f, "({}{}{})", fmt_rat(&self.re), sign, im)
            }
        }
    }
}

impl serde::Serialize for GaussRational {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> serde::Deserialize<'de> for GaussRational {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<GaussRational, D::Error> {
        let s = String::deserialize(d)?;
        crate::parse::parse_constant(&s).map_err(serde::de::Error::custom)
    }
}

/// Integer divisors of |n| up to `cap` entries; empty when the cap is exceeded.
pub(crate) fn small_divisors(n: &BigInt, cap: usize) -> Option<Vec<BigInt>> {
    let n = n.abs();
    if n.is_zero() {
        return None;
    }
    let mut out = Vec::new();
    let lim = n.sqrt();
    let mut d = BigInt::one();
    while d <= lim {
        if n.is_multiple_of(&d) {
            out.push(d.clone());
            let q = &n / &d;
            if q != d {
                out.push(q);
            }
            if out.len() > cap {
                return None;
            }
        }
        d += 1;
        if d > BigInt::from(100_000) {
            return None;
        }
    }
    out.sort();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(a: i64, b: i64) -> GaussRational {
        GaussRational::from_ints(a, b)
    }

    #[test]
    fn field_ops() {
        let a = g(3, 4);
        assert_eq!(a.norm_sqr(), BigRational::from_integer(25.into()));
        assert_eq!(&a * &a.inv().unwrap(), GaussRational::one());
        assert_eq!(&g(1, 1) * &g(1, -1), g(2, 0));
        assert!(g(0, 0).inv().is_none());
    }

    #[test]
    fn square_roots() {
        assert_eq!(g(-1, 0).sqrt().map(|r| r.pow(2)), Some(g(-1, 0)));
        assert_eq!(g(3, 4).sqrt(), Some(g(2, 1)));
        assert_eq!(g(0, 2).sqrt(), Some(g(1, 1)));
        assert!(g(2, 0).sqrt().is_none());
        let q = GaussRational::from_ratio(9, 4);
        assert_eq!(q.sqrt(), Some(GaussRational::from_ratio(3, 2)));
    }

    #[test]
    fn odd_roots() {
        assert_eq!(g(-8, 0).nth_root(3), Some(g(-2, 0)));
        let r = g(0, 8).nth_root(3).unwrap();
        assert_eq!(r.pow(3), g(0, 8));
        assert_eq!(g(16, 0).nth_root(4).map(|r| r.pow(4)), Some(g(16, 0)));
    }

    #[test]
    fn display() {
        assert_eq!(g(0, 1).to_string(), "i");
        assert_eq!(g(0, -1).to_string(), "-i");
        assert_eq!(g(2, -3).to_string(), "(2-3*i)");
        assert_eq!(GaussRational::from_ratio(-1, 2).to_string(), "-1/2");
    }

    #[test]
    fn divisors() {
        let d = small_divisors(&BigInt::from(12), 32).unwrap();
        assert_eq!(d.len(), 6);
    }
}
