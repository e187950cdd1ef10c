//! Laurent polynomials in `z` with [`ParamPoly`] coefficients.
//!
//! These are the concrete wave-function-side objects: differential operators
//! act on them term by term (`D z^a = a z^a`), and the residue pairing
//! `<f, g> = res_z f g` (the coefficient of `z^-1` in the product) is the
//! bilinear form against which operator adjoints are defined.

use crate::diffop::DiffOp;
use crate::parampoly::ParamPoly;
use crate::scalar::{rat_pow_int, Rat};
use std::collections::BTreeMap;
use std::fmt;

/// Finite sum of powers of `z` with parameter-polynomial coefficients.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, ParamPoly>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        LaurentPoly::default()
    }

    /// `c * z^p`.
    pub fn monomial(p: i64, c: ParamPoly) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(p, c);
        }
        LaurentPoly { coeffs }
    }

    /// `z^p`.
    pub fn z_pow(p: i64) -> Self {
        LaurentPoly::monomial(p, ParamPoly::one())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, p: i64) -> ParamPoly {
        self.coeffs.get(&p).cloned().unwrap_or_default()
    }

    /// Iterates `(power, coefficient)` in ascending power order.
    pub fn iter(&self) -> impl Iterator<Item = (&i64, &ParamPoly)> {
        self.coeffs.iter()
    }

    pub fn min_pow(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_pow(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn insert_add(&mut self, p: i64, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(p) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.insert_add(*p, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (p, c) in &other.coeffs {
            out.insert_add(*p, -c);
        }
        out
    }

    pub fn scale_param(&self, c: &ParamPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (p, v) in &self.coeffs {
            out.insert_add(*p, v * c);
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> LaurentPoly {
        self.scale_param(&ParamPoly::constant(c.clone()))
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (pa, ca) in &self.coeffs {
            for (pb, cb) in &other.coeffs {
                out.insert_add(pa + pb, ca * cb);
            }
        }
        out
    }

    /// Applies a differential operator: `z^n D^m` sends `c z^a` to
    /// `c a^m z^{a+n}`.
    pub fn apply(&self, op: &DiffOp) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (&(n, m), w) in op.iter() {
            for (&a, c) in &self.coeffs {
                out.insert_add(a + n, (c * w).scale(&rat_pow_int(a, m)));
            }
        }
        out
    }

    /// Residue: the coefficient of `z^-1`.
    pub fn residue(&self) -> ParamPoly {
        self.coeff(-1)
    }

    /// Residue pairing `<f, g> = res_z f g`.
    pub fn residue_pair(&self, other: &LaurentPoly) -> ParamPoly {
        // Only power pairs summing to -1 contribute.
        let mut out = ParamPoly::zero();
        for (&pa, ca) in &self.coeffs {
            out += &(ca * &other.coeff(-1 - pa));
        }
        out
    }
}

impl fmt::Display for LaurentPoly {
    /// Descending powers, e.g. `z - 5/24*z^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (i, (&p, c)) in self.coeffs.iter().rev().enumerate() {
            let c_str = c.to_string();
            let single_term = c.iter().count() == 1;
            let (sign_neg, body) = if single_term && c_str.starts_with('-') {
                (true, c_str[1..].to_string())
            } else {
                (false, c_str)
            };
            if i == 0 {
                if sign_neg {
                    write!(f, "-")?;
                }
            } else if sign_neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let z_part = match p {
                0 => String::new(),
                1 => "z".into(),
                _ => format!("z^{p}"),
            };
            if z_part.is_empty() {
                if single_term {
                    write!(f, "{body}")?;
                } else {
                    write!(f, "({body})")?;
                }
            } else if single_term {
                if body == "1" {
                    write!(f, "{z_part}")?;
                } else {
                    write!(f, "{body}*{z_part}")?;
                }
            } else {
                write!(f, "({body})*{z_part}")?;
            }
        }
        Ok(())
    }
}
