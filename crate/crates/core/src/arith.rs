//! Integer and quadratic-integer utilities: 2-adic valuation, gcd/lcm folds,
//! square-free decomposition and rational reconstruction of floating-point data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default denominator bound for [`reconstruct_rational`].
pub const DEFAULT_MAX_DENOMINATOR: i64 = 1_000_000;
/// Default absolute tolerance for [`reconstruct_rational`].
pub const DEFAULT_RATIONAL_TOL: f64 = 1e-7;

/// Largest `e` with `2^e | a`.
pub fn nu2(a: i64) -> Result<u32> {
    if a == 0 {
        return Err(Error::Domain("nu2 is undefined at zero".into()));
    }
    Ok(a.trailing_zeros())
}

/// 2-adic valuation with `nu2(0) = +inf`, encoded as `None`.
///
/// Comparisons in the transfer predicates treat a vanishing difference as
/// infinitely divisible by two; this helper makes that branch explicit.
pub fn nu2_or_inf(a: i64) -> Option<u32> {
    if a == 0 {
        None
    } else {
        Some(a.trailing_zeros())
    }
}

/// Strict comparison `nu2(a) > nu2(b)` with zero mapped to infinity.
/// Two infinities do not compare strictly.
pub fn nu2_gt(a: i64, b: i64) -> bool {
    match (nu2_or_inf(a), nu2_or_inf(b)) {
        (None, None) => false,
        (None, Some(_)) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x > y,
    }
}

/// Equality `nu2(a) = nu2(b)` with zero mapped to infinity.
pub fn nu2_eq(a: i64, b: i64) -> bool {
    nu2_or_inf(a) == nu2_or_inf(b)
}

pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut x, mut y) = (a.unsigned_abs(), b.unsigned_abs());
    while y != 0 {
        let r = x % y;
        x = y;
        y = r;
    }
    x as i64
}

pub fn lcm(a: i64, b: i64) -> Result<i64> {
    if a == 0 || b == 0 {
        return Err(Error::Domain("lcm of zero".into()));
    }
    let g = gcd(a, b);
    (a / g)
        .checked_mul(b)
        .map(i64::abs)
        .ok_or(Error::Overflow("lcm"))
}

/// gcd of a nonempty list; the gcd of an all-zero list is 0.
pub fn gcd_all(values: &[i64]) -> Result<i64> {
    if values.is_empty() {
        return Err(Error::Domain("gcd of an empty list".into()));
    }
    Ok(values.iter().fold(0, |g, &v| gcd(g, v)))
}

/// lcm of a nonempty list of nonzero integers.
pub fn lcm_all(values: &[i64]) -> Result<i64> {
    if values.is_empty() {
        return Err(Error::Domain("lcm of an empty list".into()));
    }
    values.iter().try_fold(1, |l, &v| lcm(l, v))
}

/// Writes `d = f^2 * s` with `s` square-free, returning `(s, f)`.
pub fn squarefree_part(d: i64) -> Result<(i64, i64)> {
    if d <= 0 {
        return Err(Error::Domain(format!("squarefree_part needs d >= 1, got {d}")));
    }
    let mut s = d;
    let mut f = 1i64;
    let mut p = 2i64;
    while p.checked_mul(p).is_some_and(|pp| pp <= s) {
        let pp = p * p;
        while s % pp == 0 {
            s /= pp;
            f *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    Ok((s, f))
}

/// Integer square root when `d` is a perfect square.
pub fn exact_sqrt(d: i64) -> Option<i64> {
    if d < 0 {
        return None;
    }
    let mut r = (d as f64).sqrt().round() as i64;
    while r > 0 && r.checked_mul(r).map_or(true, |rr| rr > d) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|rr| rr <= d) {
        r += 1;
    }
    (r * r == d).then_some(r)
}

pub fn is_perfect_square(d: i64) -> bool {
    exact_sqrt(d).is_some()
}

/// A rational number in lowest terms with positive denominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn new(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::Domain("zero denominator".into()));
        }
        let g = gcd(num, den).max(1);
        let sign = if den < 0 { -1 } else { 1 };
        Ok(Rational {
            num: sign * num / g,
            den: sign * den / g,
        })
    }

    pub fn integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn mul(self, other: Rational) -> Result<Rational> {
        let g1 = gcd(self.num, other.den).max(1);
        let g2 = gcd(other.num, self.den).max(1);
        let num = (self.num / g1)
            .checked_mul(other.num / g2)
            .ok_or(Error::Overflow("rational multiply"))?;
        let den = (self.den / g2)
            .checked_mul(other.den / g1)
            .ok_or(Error::Overflow("rational multiply"))?;
        Rational::new(num, den)
    }

    pub fn recip(self) -> Result<Rational> {
        Rational::new(self.den, self.num)
    }

    pub fn div(self, other: Rational) -> Result<Rational> {
        self.mul(other.recip()?)
    }
}

impl std::fmt::Display for Rational {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// First continued-fraction convergent `p/q` of `x` with `q <= max_denominator`
/// and `|x - p/q| <= tol`.
pub fn reconstruct_rational(x: f64, max_denominator: i64, tol: f64) -> Option<Rational> {
    if !x.is_finite() || tol <= 0.0 || max_denominator < 1 {
        return None;
    }
    let (mut h_prev, mut h) = (1i128, x.floor() as i128);
    let (mut k_prev, mut k) = (0i128, 1i128);
    let mut frac = x - x.floor();
    loop {
        if (x - h as f64 / k as f64).abs() <= tol {
            return Rational::new(i64::try_from(h).ok()?, i64::try_from(k).ok()?).ok();
        }
        if frac.abs() < 1e-300 {
            return None;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        if !a.is_finite() || a > 1e15 {
            return None;
        }
        frac = inv - a;
        let a = a as i128;
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        if k_next > max_denominator as i128 {
            return None;
        }
        (h_prev, h) = (h, h_next);
        (k_prev, k) = (k, k_next);
    }
}

/// Nearest integer to `x` when it lies within `tol`.
pub fn reconstruct_integer(x: f64, tol: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= tol && r.abs() < 9.0e15).then_some(r as i64)
}

/// A quadratic integer `(a + b*sqrt(delta))/2`.
///
/// Rational integers are stored canonically as `a = 2*value`, `b = 0`, `delta = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuadraticEigenvalue {
    pub a: i64,
    pub b: i64,
    pub delta: i64,
}

impl QuadraticEigenvalue {
    pub fn integer(v: i64) -> Self {
        QuadraticEigenvalue { a: 2 * v, b: 0, delta: 1 }
    }

    /// Builds `(a + b*sqrt(d))/2` for an arbitrary positive `d`, normalising
    /// the radicand to its square-free part.
    pub fn with_radicand(a: i64, b: i64, d: i64) -> Result<Self> {
        let (s, f) = squarefree_part(d)?;
        let b = b.checked_mul(f).ok_or(Error::Overflow("quadratic normalisation"))?;
        Self::new(a, b, s)
    }

    /// Validated constructor; the value must be an algebraic integer.
    pub fn new(a: i64, b: i64, delta: i64) -> Result<Self> {
        if delta < 1 || squarefree_part(delta)?.1 != 1 {
            return Err(Error::Domain(format!("radicand {delta} is not square-free")));
        }
        if delta == 1 || b == 0 {
            let s = a + b;
            if s % 2 != 0 {
                return Err(Error::Domain(format!("({a} + {b})/2 is not an integer")));
            }
            return Ok(Self::integer(s / 2));
        }
        let norm = a
            .checked_mul(a)
            .and_then(|aa| b.checked_mul(b).and_then(|bb| bb.checked_mul(delta)).map(|x| aa - x))
            .ok_or(Error::Overflow("quadratic norm"))?;
        if norm.rem_euclid(4) != 0 {
            return Err(Error::Domain(format!(
                "({a} + {b}*sqrt({delta}))/2 is not an algebraic integer"
            )));
        }
        Ok(QuadraticEigenvalue { a, b, delta })
    }

    pub fn is_integer(&self) -> bool {
        self.delta == 1
    }

    /// The integer value, when rational.
    pub fn as_integer(&self) -> Option<i64> {
        self.is_integer().then_some(self.a / 2)
    }

    pub fn value(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.delta as f64).sqrt()) / 2.0
    }

    /// Adds a rational integer.
    pub fn shift(&self, n: i64) -> Result<Self> {
        let a = n
            .checked_mul(2)
            .and_then(|t| t.checked_add(self.a))
            .ok_or(Error::Overflow("quadratic shift"))?;
        Ok(QuadraticEigenvalue { a, ..*self })
    }

    pub fn conjugate(&self) -> Self {
        QuadraticEigenvalue { b: -self.b, ..*self }
    }
}

impl std::fmt::Display for QuadraticEigenvalue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.as_integer() {
            Some(v) => write!(f, "{v}"),
            None => write!(f, "({} {} {}*sqrt({}))/2", self.a, if self.b < 0 { '-' } else { '+' }, self.b.abs(), self.delta),
        }
    }
}

/// A set of quadratic integers written over a common frame
/// `lambda_i = (a + c_i*sqrt(delta))/2`.
///
/// When `delta = 1` the frame has `a = 0` and `c_i = 2*lambda_i`. Scaled
/// differences `(lambda_i - lambda_j)/sqrt(delta) = (c_i - c_j)/2` are integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadraticFrame {
    pub a: i64,
    pub delta: i64,
    pub coords: Vec<i64>,
}

impl QuadraticFrame {
    /// Places the values on a common frame, or explains why no frame exists
    /// (mixed radicands, unequal rational parts, or non-integral differences).
    pub fn build(values: &[QuadraticEigenvalue]) -> std::result::Result<Self, String> {
        let irr: Vec<&QuadraticEigenvalue> = values.iter().filter(|q| !q.is_integer()).collect();
        if irr.is_empty() {
            return Ok(QuadraticFrame {
                a: 0,
                delta: 1,
                coords: values.iter().map(|q| q.a).collect(),
            });
        }
        let (a, delta) = (irr[0].a, irr[0].delta);
        if irr.iter().any(|q| q.delta != delta) {
            return Err("eigenvalues involve different square-free radicands".into());
        }
        if irr.iter().any(|q| q.a != a) {
            return Err("quadratic eigenvalues do not share a rational part".into());
        }
        let mut coords = Vec::with_capacity(values.len());
        for q in values {
            if q.is_integer() {
                if q.a != a {
                    return Err(format!(
                        "integer eigenvalue {} is not the rational part {a}/2 of the quadratic eigenvalues",
                        q.a / 2
                    ));
                }
                coords.push(0);
            } else {
                coords.push(q.b);
            }
        }
        let parity = coords[0].rem_euclid(2);
        if coords.iter().any(|c| c.rem_euclid(2) != parity) {
            return Err("scaled eigenvalue differences are not integers".into());
        }
        Ok(QuadraticFrame { a, delta, coords })
    }

    /// `(lambda_i - lambda_j)/sqrt(delta)`.
    pub fn scaled_difference(&self, i: usize, j: usize) -> i64 {
        (self.coords[i] - self.coords[j]) / 2
    }
}
