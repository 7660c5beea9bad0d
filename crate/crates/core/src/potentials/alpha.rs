//! The frequency ratio α of a quasi-periodic potential.
//!
//! Three textual forms are accepted:
//!
//! * quadratic surds `(a + b*sqrt(d))/c`, e.g. `(sqrt(5)-1)/2`; all integer
//!   relations are decided exactly in `ℚ(√d)`;
//! * terminating decimals such as `0.6180339887`; the value is kept as the
//!   exact rational it spells out;
//! * explicit fractions `p/q` (degenerate, useful for testing validators).

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// `(a + b√d) / c` with `d > 1` square-free, `b != 0`, `c > 0`, reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Surd {
    pub a: i64,
    pub b: i64,
    pub d: i64,
    pub c: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum AlphaKind {
    Quadratic(Surd),
    Decimal(BigRational),
    Rational(BigRational),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Alpha {
    pub kind: AlphaKind,
    pub value: f64,
    source: String,
}

/// Exact element `(p + q√d) / den` of `ℚ(√d)`; `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct QuadElem {
    p: i128,
    q: i128,
    den: i128,
}

impl QuadElem {
    fn is_zero(&self) -> bool {
        self.p == 0 && self.q == 0
    }

    /// |value| without catastrophic cancellation.
    fn abs(&self, d: i64) -> f64 {
        let sd = (d as f64).sqrt();
        let (p, q, den) = (self.p as f64, self.q as f64, self.den as f64);
        if self.p == 0 || self.q == 0 || (self.p > 0) == (self.q > 0) {
            return (p.abs() + q.abs() * sd) / den;
        }
        let norm = self.p * self.p - self.q * self.q * d as i128;
        (norm as f64).abs() / (den * (p.abs() + q.abs() * sd))
    }
}

impl Surd {
    fn reduced(a: i64, b: i64, d: i64, c: i64) -> Result<Self> {
        if c == 0 {
            return Err(Error::input("zero denominator in surd"));
        }
        if d <= 0 {
            return Err(Error::input(format!("sqrt({d}) is not a positive real")));
        }
        let (mut b, mut d) = (b, d);
        let mut f = 2i64;
        while f * f <= d {
            while d % (f * f) == 0 {
                d /= f * f;
                b *= f;
            }
            f += 1;
        }
        if d == 1 || b == 0 {
            return Err(Error::input("surd is rational"));
        }
        let (mut a, mut b, mut c) = (a, b, c);
        if c < 0 {
            a = -a;
            b = -b;
            c = -c;
        }
        let g = a.gcd(&b).gcd(&c);
        Ok(Self { a: a / g, b: b / g, d, c: c / g })
    }

    pub fn value(&self) -> f64 {
        (self.a as f64 + self.b as f64 * (self.d as f64).sqrt()) / self.c as f64
    }

    /// `n1 + n2 α + n3 α²` exactly.
    fn poly(&self, n: [i64; 3]) -> QuadElem {
        let (a, b, d, c) = (self.a as i128, self.b as i128, self.d as i128, self.c as i128);
        let (n1, n2, n3) = (n[0] as i128, n[1] as i128, n[2] as i128);
        QuadElem {
            p: n1 * c * c + n2 * a * c + n3 * (a * a + b * b * d),
            q: n2 * b * c + 2 * n3 * a * b,
            den: c * c,
        }
    }

    /// Partial quotients of the (eventually periodic) continued fraction.
    fn partial_quotients(&self, count: usize) -> Vec<BigInt> {
        // α = (P + √N)/Q with Q | N − P²
        let sign = if self.b < 0 { -1 } else { 1 };
        let (p, n, q) = (
            sign * self.a as i128,
            (self.b as i128).pow(2) * self.d as i128,
            sign * self.c as i128,
        );
        let scale = q.abs();
        let (mut p, n, mut q) = (p * scale, n * scale * scale, q * scale);
        let s = isqrt(n);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            let a = floor_quad(p, q, s);
            out.push(BigInt::from(a));
            p = a * q - p;
            q = (n - p * p) / q;
            if q == 0 {
                break;
            }
        }
        out
    }
}

/// `floor((p + √n)/q)` for non-square `n`, `q != 0`, `s = floor(√n)`.
fn floor_quad(p: i128, q: i128, s: i128) -> i128 {
    if q > 0 {
        (p + s).div_euclid(q)
    } else {
        (-(p + s + 1)).div_euclid(-q)
    }
}

fn isqrt(n: i128) -> i128 {
    let mut x = (n as f64).sqrt() as i128;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

fn rational_quotients(mut num: BigInt, mut den: BigInt, count: usize) -> Vec<BigInt> {
    let mut out = Vec::new();
    while !den.is_zero() && out.len() < count {
        let (q, r) = num.div_mod_floor(&den);
        out.push(q);
        num = den;
        den = r;
    }
    out
}

fn parse_int(s: &str) -> Result<i64> {
    s.parse::<i64>()
        .map_err(|_| Error::input(format!("expected an integer, found `{s}`")))
}

fn parse_decimal(s: &str) -> Option<BigRational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let (int, frac) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int}{frac}").parse().ok()?;
    let den = BigInt::from(10u32).pow(frac.len() as u32);
    let v = BigRational::new(digits, den);
    Some(if neg { -v } else { v })
}

/// Parses `[±]a ± b*sqrt(d)`, `[±]b*sqrt(d) ± a`, optionally wrapped as `(...)/c`.
fn parse_surd(s: &str) -> Option<Result<Surd>> {
    if !s.contains("sqrt(") {
        return None;
    }
    let (body, c) = match s.rsplit_once(")/") {
        Some((b, c)) if b.starts_with('(') => (&b[1..], c),
        _ => (s, "1"),
    };
    Some((|| {
        let c = parse_int(c)?;
        let mut a = 0i64;
        let mut b = 0i64;
        let mut d = 0i64;
        let mut rest = body;
        while !rest.is_empty() {
            let (sign, tail) = match rest.as_bytes()[0] {
                b'+' => (1, &rest[1..]),
                b'-' => (-1, &rest[1..]),
                _ => (1, rest),
            };
            if tail.is_empty() {
                return Err(Error::input("dangling sign in surd"));
            }
            let end = tail[1..]
                .find(['+', '-'])
                .map(|i| i + 1)
                .unwrap_or(tail.len());
            let term = &tail[..end];
            rest = &tail[end..];
            if let Some(pos) = term.find("sqrt(") {
                let inner = term[pos + 5..]
                    .strip_suffix(')')
                    .ok_or_else(|| Error::input(format!("malformed sqrt term `{term}`")))?;
                let coef = match term[..pos].strip_suffix('*') {
                    Some(k) => parse_int(k)?,
                    None if pos == 0 => 1,
                    None => return Err(Error::input(format!("malformed sqrt term `{term}`"))),
                };
                let di = parse_int(inner)?;
                if d != 0 && d != di {
                    return Err(Error::input("mixed square roots"));
                }
                d = di;
                b += sign * coef;
            } else {
                a += sign * parse_int(term)?;
            }
        }
        Surd::reduced(a, b, d, c)
    })())
}

impl Alpha {
    pub fn parse(text: &str) -> Result<Self> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::input("empty alpha"));
        }
        let kind = if let Some(surd) = parse_surd(&s) {
            AlphaKind::Quadratic(surd?)
        } else if let Some(v) = parse_decimal(&s) {
            AlphaKind::Decimal(v)
        } else if let Some((p, q)) = s.split_once('/') {
            let (p, q) = (parse_int(p)?, parse_int(q)?);
            if q == 0 {
                return Err(Error::input("zero denominator"));
            }
            AlphaKind::Rational(BigRational::new(p.into(), q.into()))
        } else {
            return Err(Error::input(format!("cannot parse alpha `{text}`")));
        };
        let value = match &kind {
            AlphaKind::Quadratic(q) => q.value(),
            AlphaKind::Decimal(r) | AlphaKind::Rational(r) => r.to_f64().unwrap_or(f64::NAN),
        };
        if !value.is_finite() {
            return Err(Error::input(format!("alpha `{text}` is not finite")));
        }
        Ok(Self { kind, value, source: text.trim().to_string() })
    }

    pub fn golden() -> Self {
        Self::parse("(sqrt(5)-1)/2").expect("valid surd")
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// The number is an exact rational (explicit fraction or decimal).
    pub fn is_rational(&self) -> bool {
        !matches!(self.kind, AlphaKind::Quadratic(_))
    }

    /// Whether the input stands for an irrational number. Decimals are
    /// accepted as finite-precision stand-ins for irrationals.
    pub fn models_irrational(&self) -> bool {
        !matches!(self.kind, AlphaKind::Rational(_))
    }

    pub fn partial_quotients(&self, count: usize) -> Vec<BigInt> {
        match &self.kind {
            AlphaKind::Quadratic(s) => s.partial_quotients(count),
            AlphaKind::Decimal(r) | AlphaKind::Rational(r) => {
                rational_quotients(r.numer().clone(), r.denom().clone(), count)
            }
        }
    }

    /// Continued-fraction convergents `p/q`.
    pub fn convergents(&self, count: usize) -> Vec<(BigInt, BigInt)> {
        let mut out = Vec::new();
        let (mut p0, mut q0) = (BigInt::one(), BigInt::zero());
        let (mut p1, mut q1) = (BigInt::zero(), BigInt::one());
        for a in self.partial_quotients(count) {
            let p = &a * &p0 + &p1;
            let q = &a * &q0 + &q1;
            p1 = std::mem::replace(&mut p0, p.clone());
            q1 = std::mem::replace(&mut q0, q.clone());
            out.push((p, q));
        }
        out
    }

    /// `(|n1 + n2 α + n3 α²|, exactly zero?)`, with the zero test exact.
    pub fn poly_abs(&self, n: [i64; 3]) -> (f64, bool) {
        match &self.kind {
            AlphaKind::Quadratic(s) => {
                let e = s.poly(n);
                (e.abs(s.d), e.is_zero())
            }
            AlphaKind::Decimal(r) | AlphaKind::Rational(r) => {
                let v = BigRational::from_integer(n[0].into())
                    + r * BigRational::from_integer(n[1].into())
                    + r * r * BigRational::from_integer(n[2].into());
                (v.abs().to_f64().unwrap_or(f64::INFINITY), v.is_zero())
            }
        }
    }

    /// Whether `n1 + n2 α + n3 α² = 0` for the number α stands for. Decimals
    /// are treated as generic irrationals: only the trivial relation vanishes.
    pub fn relation_vanishes(&self, n: [i64; 3]) -> bool {
        match &self.kind {
            AlphaKind::Quadratic(s) => s.poly(n).is_zero(),
            AlphaKind::Decimal(_) => n == [0, 0, 0],
            AlphaKind::Rational(_) => self.poly_abs(n).1,
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}
