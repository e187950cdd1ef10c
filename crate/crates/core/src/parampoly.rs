//! Polynomial coefficients in the two model parameters `N` and `h`.
//!
//! Scalars throughout the crate are elements of Q[N][h, h^-1]: polynomials in
//! `N` whose `h`-exponents may be negative (the matrix-model operators mix
//! positive and negative powers of `h` before the grading is fixed). The zero
//! polynomial has no stored terms; a coefficient of zero is never kept, so
//! structural equality is semantic equality.

use crate::error::{Error, Result};
use crate::scalar::{fmt_rat, parse_rat, Rat};
use num::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

/// Element of Q[N][h, h^-1]. Keys are `(N-exponent, h-exponent)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParamPoly {
    terms: BTreeMap<(u32, i64), Rat>,
}

impl ParamPoly {
    pub fn zero() -> Self {
        ParamPoly::default()
    }

    pub fn one() -> Self {
        ParamPoly::constant(Rat::one())
    }

    pub fn constant(c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((0, 0), c);
        }
        ParamPoly { terms }
    }

    /// The parameter `N`.
    pub fn param_n() -> Self {
        ParamPoly::term(1, 0, Rat::one())
    }

    /// The parameter `h` (any integer power).
    pub fn h_pow(e: i64) -> Self {
        ParamPoly::term(0, e, Rat::one())
    }

    /// Single term `c * N^n_exp * h^h_exp`.
    pub fn term(n_exp: u32, h_exp: i64, c: Rat) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((n_exp, h_exp), c);
        }
        ParamPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Returns the constant value when the polynomial has no `N`/`h`
    /// dependence (zero counts as the constant 0).
    pub fn as_constant(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&(0, 0)).cloned(),
            _ => None,
        }
    }

    /// Iterates `((n_exp, h_exp), coeff)` in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&(u32, i64), &Rat)> {
        self.terms.iter()
    }

    fn insert_add(&mut self, key: (u32, i64), c: Rat) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rat) -> Self {
        if c.is_zero() {
            return ParamPoly::zero();
        }
        ParamPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiplies by `h^e` (shifts every h-exponent).
    pub fn mul_h_pow(&self, e: i64) -> Self {
        ParamPoly {
            terms: self
                .terms
                .iter()
                .map(|(&(n, h), v)| ((n, h + e), v.clone()))
                .collect(),
        }
    }

    /// True when every term carries exactly `h^e`.
    pub fn is_pure_h_power(&self, e: i64) -> bool {
        self.terms.keys().all(|&(_, h)| h == e)
    }

    /// True when no term involves `h`.
    pub fn is_h_free(&self) -> bool {
        self.is_pure_h_power(0)
    }

    /// Substitutes numeric values for `N` and/or `h` (a `None` leaves the
    /// parameter symbolic). Substituting `h = 0` where a negative `h`-power
    /// occurs is an error.
    pub fn substitute(&self, n: Option<&Rat>, h: Option<&Rat>) -> Result<ParamPoly> {
        let mut out = ParamPoly::zero();
        for (&(n_exp, h_exp), c) in &self.terms {
            let mut c = c.clone();
            let mut key_n = n_exp;
            let mut key_h = h_exp;
            if let Some(nv) = n {
                c *= pow_rat(nv, n_exp as i64)?;
                key_n = 0;
            }
            if let Some(hv) = h {
                c *= pow_rat(hv, h_exp)?;
                key_h = 0;
            }
            out.insert_add((key_n, key_h), c);
        }
        Ok(out)
    }

    /// Parses the canonical [`fmt::Display`] form back into a polynomial.
    /// This is the inverse of `to_string()` on canonical output; it is not a
    /// general expression parser.
    pub fn parse_canonical(s: &str) -> Result<ParamPoly> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidArgument("empty coefficient".into()));
        }
        let mut out = ParamPoly::zero();
        // Normalize "a - b" to "a + -b" so we can split on " + ".
        let normalized = s.replace(" - ", " + -");
        for term in normalized.split(" + ") {
            let term = term.trim();
            let (sign, body) = match term.strip_prefix('-') {
                Some(rest) => (-Rat::one(), rest.trim()),
                None => (Rat::one(), term),
            };
            let mut coeff = sign;
            let mut n_exp: u32 = 0;
            let mut h_exp: i64 = 0;
            for factor in body.split('*') {
                let factor = factor.trim();
                if factor == "N" {
                    n_exp += 1;
                } else if factor == "h" {
                    h_exp += 1;
                } else if let Some(e) = factor.strip_prefix("N^") {
                    n_exp += e.parse::<u32>().map_err(|_| {
                        Error::InvalidArgument(format!("bad N exponent in `{term}`"))
                    })?;
                } else if let Some(e) = factor.strip_prefix("h^") {
                    h_exp += e.parse::<i64>().map_err(|_| {
                        Error::InvalidArgument(format!("bad h exponent in `{term}`"))
                    })?;
                } else {
                    coeff *= parse_rat(factor)?;
                }
            }
            out.insert_add((n_exp, h_exp), coeff);
        }
        Ok(out)
    }
}

/// `base^exp` for integer `exp`; `0^negative` is an error.
fn pow_rat(base: &Rat, exp: i64) -> Result<Rat> {
    if exp == 0 {
        return Ok(Rat::one());
    }
    if base.is_zero() {
        if exp < 0 {
            return Err(Error::ZeroToNegativePower { exp });
        }
        return Ok(Rat::zero());
    }
    let p = base.pow(exp.unsigned_abs().try_into().expect("exponent fits i32"));
    Ok(if exp < 0 { p.recip() } else { p })
}

impl Add for &ParamPoly {
    type Output = ParamPoly;
    fn add(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.insert_add(*k, v.clone());
        }
        out
    }
}

impl AddAssign<&ParamPoly> for ParamPoly {
    fn add_assign(&mut self, rhs: &ParamPoly) {
        for (k, v) in &rhs.terms {
            self.insert_add(*k, v.clone());
        }
    }
}

impl Sub for &ParamPoly {
    type Output = ParamPoly;
    fn sub(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = self.clone();
        for (k, v) in &rhs.terms {
            out.insert_add(*k, -v.clone());
        }
        out
    }
}

impl Neg for &ParamPoly {
    type Output = ParamPoly;
    fn neg(self) -> ParamPoly {
        ParamPoly {
            terms: self.terms.iter().map(|(k, v)| (*k, -v.clone())).collect(),
        }
    }
}

impl Mul for &ParamPoly {
    type Output = ParamPoly;
    fn mul(self, rhs: &ParamPoly) -> ParamPoly {
        let mut out = ParamPoly::zero();
        for (&(an, ah), ac) in &self.terms {
            for (&(bn, bh), bc) in &rhs.terms {
                out.insert_add((an + bn, ah + bh), ac * bc);
            }
        }
        out
    }
}

impl fmt::Display for ParamPoly {
    /// Canonical form, e.g. `1/4 - 1/4*N^2` or `3/32*h^2 - 1/8*N^2*h^2`.
    /// Terms are ordered by (N-exponent, h-exponent).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(n_exp, h_exp), c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = c.abs();
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || (n_exp == 0 && h_exp == 0) {
                factors.push(fmt_rat(&mag));
            }
            match n_exp {
                0 => {}
                1 => factors.push("N".into()),
                e => factors.push(format!("N^{e}")),
            }
            match h_exp {
                0 => {}
                1 => factors.push("h".into()),
                e => factors.push(format!("h^{e}")),
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
