//! Polynomial states in the boson variables `q1, q2, ...`.
//!
//! The state space is the polynomial ring in finitely many variables `qk`,
//! graded by `deg qk = k` (the energy grade). A [`QPolynomial`] carries an
//! explicit variable cutoff `K`; any operation that would need a variable
//! beyond the cutoff fails loudly rather than truncating, so a finished
//! computation is exact, not approximate.
//!
//! Coefficients live in the parameter ring [`ParamPoly`]. Zero coefficients
//! are never stored, so structural equality of the term maps is semantic
//! equality (the cutoff is bookkeeping and does not enter equality).

use crate::error::{Error, Result};
use crate::parampoly::ParamPoly;
use crate::scalar::Rat;
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::fmt;

/// Monomial in the `qk`: a map from variable index (>= 1) to exponent (> 0).
/// The empty map is the monomial 1.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QMonomial(BTreeMap<u32, u32>);

impl QMonomial {
    /// The monomial 1.
    pub fn one() -> Self {
        QMonomial::default()
    }

    /// The single variable `qk`.
    pub fn var(k: u32) -> Self {
        assert!(k >= 1, "variable index starts at 1");
        QMonomial(BTreeMap::from([(k, 1)]))
    }

    /// Builds from `(variable, exponent)` pairs; zero exponents are dropped.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut m = BTreeMap::new();
        for (k, e) in pairs {
            assert!(k >= 1, "variable index starts at 1");
            if e > 0 {
                *m.entry(k).or_insert(0) += e;
            }
        }
        QMonomial(m)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Energy grade: sum of `k * exponent(k)`.
    pub fn grade(&self) -> u32 {
        self.0.iter().map(|(k, e)| k * e).sum()
    }

    /// Total number of variable factors (with multiplicity).
    pub fn factor_count(&self) -> u32 {
        self.0.values().sum()
    }

    /// Largest variable index present (0 for the monomial 1).
    pub fn max_var(&self) -> u32 {
        self.0.keys().next_back().copied().unwrap_or(0)
    }

    pub fn exponent_of(&self, k: u32) -> u32 {
        self.0.get(&k).copied().unwrap_or(0)
    }

    /// Iterates `(variable, exponent)` pairs in ascending variable order.
    pub fn iter(&self) -> impl Iterator<Item = (&u32, &u32)> {
        self.0.iter()
    }

    /// Product of two monomials.
    pub fn times(&self, other: &QMonomial) -> QMonomial {
        let mut m = self.0.clone();
        for (&k, &e) in &other.0 {
            *m.entry(k).or_insert(0) += e;
        }
        QMonomial(m)
    }

    /// Multiplies by `qk`.
    pub fn times_var(&self, k: u32) -> QMonomial {
        let mut m = self.0.clone();
        *m.entry(k).or_insert(0) += 1;
        QMonomial(m)
    }

    /// Divides by `qk`, or `None` when `qk` is absent.
    pub fn div_var(&self, k: u32) -> Option<QMonomial> {
        let mut m = self.0.clone();
        match m.get_mut(&k) {
            None => None,
            Some(e) => {
                if *e == 1 {
                    m.remove(&k);
                } else {
                    *e -= 1;
                }
                Some(QMonomial(m))
            }
        }
    }
}

impl fmt::Display for QMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, e)| if *e == 1 { format!("q{k}") } else { format!("q{k}^{e}") })
            .collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Polynomial state: finitely many monomials with [`ParamPoly`] coefficients
/// and an explicit variable cutoff.
#[derive(Debug, Clone)]
pub struct QPolynomial {
    cutoff: u32,
    terms: BTreeMap<QMonomial, ParamPoly>,
}

impl PartialEq for QPolynomial {
    /// Semantic equality: the cutoff is workspace bookkeeping, not content.
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}
impl Eq for QPolynomial {}

impl QPolynomial {
    /// The zero polynomial with variable cutoff `K`.
    pub fn zero(cutoff: u32) -> Self {
        QPolynomial { cutoff, terms: BTreeMap::new() }
    }

    /// The constant polynomial 1.
    pub fn one(cutoff: u32) -> Self {
        let mut p = QPolynomial::zero(cutoff);
        p.terms.insert(QMonomial::one(), ParamPoly::one());
        p
    }

    /// Single-term polynomial. Fails if the monomial breaches the cutoff.
    pub fn from_term(cutoff: u32, mono: QMonomial, coeff: ParamPoly) -> Result<Self> {
        let mut p = QPolynomial::zero(cutoff);
        p.add_term(mono, coeff)?;
        Ok(p)
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of stored monomials.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Iterates `(monomial, coefficient)` in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = (&QMonomial, &ParamPoly)> {
        self.terms.iter()
    }

    /// Coefficient of a monomial (zero when absent).
    pub fn coeff(&self, mono: &QMonomial) -> ParamPoly {
        self.terms.get(mono).cloned().unwrap_or_default()
    }

    /// Adds `coeff * mono`, merging and dropping a resulting zero.
    /// Fails when the monomial needs a variable beyond the cutoff.
    pub fn add_term(&mut self, mono: QMonomial, coeff: ParamPoly) -> Result<()> {
        let needed = mono.max_var();
        if needed > self.cutoff {
            return Err(Error::CutoffExceeded { needed, cutoff: self.cutoff });
        }
        if coeff.is_zero() {
            return Ok(());
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &coeff;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
        Ok(())
    }

    /// Sum; the result keeps the larger cutoff.
    pub fn add(&self, other: &QPolynomial) -> QPolynomial {
        let mut out = self.clone();
        out.cutoff = self.cutoff.max(other.cutoff);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone()).expect("cutoff grows, cannot fail");
        }
        out
    }

    pub fn add_assign(&mut self, other: &QPolynomial) {
        self.cutoff = self.cutoff.max(other.cutoff);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone()).expect("cutoff grows, cannot fail");
        }
    }

    pub fn sub(&self, other: &QPolynomial) -> QPolynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> QPolynomial {
        QPolynomial {
            cutoff: self.cutoff,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    /// Product; the result keeps the larger cutoff (products never introduce
    /// new variable indices).
    pub fn mul(&self, other: &QPolynomial) -> QPolynomial {
        let mut out = QPolynomial::zero(self.cutoff.max(other.cutoff));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb).expect("no new variables in a product");
            }
        }
        out
    }

    /// Multiplies every term by `qk`. Fails when `k` exceeds the cutoff.
    pub fn mul_var(&self, k: u32) -> Result<QPolynomial> {
        if k > self.cutoff {
            return Err(Error::CutoffExceeded { needed: k, cutoff: self.cutoff });
        }
        let mut out = QPolynomial::zero(self.cutoff);
        for (m, c) in &self.terms {
            out.add_term(m.times_var(k), c.clone())?;
        }
        Ok(out)
    }

    /// Plain partial derivative d/dqk.
    pub fn d_dq(&self, k: u32) -> QPolynomial {
        let mut out = QPolynomial::zero(self.cutoff);
        for (m, c) in &self.terms {
            let e = m.exponent_of(k);
            if e > 0 {
                let dropped = m.div_var(k).expect("exponent checked");
                out.add_term(dropped, c.scale(&Rat::from_integer(e.into())))
                    .expect("derivative removes a variable");
            }
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> QPolynomial {
        self.scale_param(&ParamPoly::constant(c.clone()))
    }

    pub fn scale_param(&self, c: &ParamPoly) -> QPolynomial {
        let mut out = QPolynomial::zero(self.cutoff);
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c).expect("same monomials");
        }
        out
    }

    /// Substitutes numeric values for the parameters `N` and/or `h` in every
    /// coefficient.
    pub fn substitute(&self, n: Option<&Rat>, h: Option<&Rat>) -> Result<QPolynomial> {
        let mut out = QPolynomial::zero(self.cutoff);
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c.substitute(n, h)?)?;
        }
        Ok(out)
    }

    /// Splits into homogeneous components by energy grade.
    pub fn grade_parts(&self) -> BTreeMap<u32, QPolynomial> {
        let mut parts: BTreeMap<u32, QPolynomial> = BTreeMap::new();
        for (m, c) in &self.terms {
            parts
                .entry(m.grade())
                .or_insert_with(|| QPolynomial::zero(self.cutoff))
                .add_term(m.clone(), c.clone())
                .expect("same cutoff");
        }
        parts
    }

    /// The single grade-`d` component (zero polynomial when absent).
    pub fn grade_part(&self, d: u32) -> QPolynomial {
        let mut out = QPolynomial::zero(self.cutoff);
        for (m, c) in &self.terms {
            if m.grade() == d {
                out.add_term(m.clone(), c.clone()).expect("same cutoff");
            }
        }
        out
    }

    /// Largest grade present (`None` for the zero polynomial).
    pub fn max_grade(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.grade()).max()
    }

    /// True when every variable index appearing is odd.
    pub fn odd_variables_only(&self) -> bool {
        self.terms.keys().all(|m| m.iter().all(|(k, _)| k % 2 == 1))
    }

    /// JSON value with a stable shape:
    /// `[{"monomial": [[k, e], ...], "coeff": "..."}]`, terms ordered by
    /// (grade, monomial).
    pub fn to_json_value(&self) -> Value {
        let mut keys: Vec<&QMonomial> = self.terms.keys().collect();
        keys.sort_by_key(|m| (m.grade(), (*m).clone()));
        Value::Array(
            keys.into_iter()
                .map(|m| {
                    let pairs: Vec<Value> = m.iter().map(|(k, e)| json!([k, e])).collect();
                    json!({ "monomial": pairs, "coeff": self.terms[m].to_string() })
                })
                .collect(),
        )
    }

    /// Inverse of [`QPolynomial::to_json_value`].
    pub fn from_json_value(v: &Value, cutoff: u32) -> Result<QPolynomial> {
        let arr = v
            .as_array()
            .ok_or_else(|| Error::InvalidArgument("polynomial JSON must be an array".into()))?;
        let mut out = QPolynomial::zero(cutoff);
        for item in arr {
            let mono_v = item
                .get("monomial")
                .and_then(Value::as_array)
                .ok_or_else(|| Error::InvalidArgument("term without `monomial` array".into()))?;
            let mut pairs = Vec::new();
            for pair in mono_v {
                let k = pair
                    .get(0)
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::InvalidArgument("bad variable index".into()))?;
                let e = pair
                    .get(1)
                    .and_then(Value::as_u64)
                    .ok_or_else(|| Error::InvalidArgument("bad exponent".into()))?;
                pairs.push((k as u32, e as u32));
            }
            let coeff_s = item
                .get("coeff")
                .and_then(Value::as_str)
                .ok_or_else(|| Error::InvalidArgument("term without `coeff` string".into()))?;
            out.add_term(QMonomial::from_pairs(pairs), ParamPoly::parse_canonical(coeff_s)?)?;
        }
        Ok(out)
    }
}

impl fmt::Display for QPolynomial {
    /// Canonical form ordered by (grade, monomial), e.g.
    /// `1/6*q1^3 + 1/24*q3`. Coefficients that are not a single product term
    /// are parenthesized: `(1/16 - 1/4*N^2)*q1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&QMonomial> = self.terms.keys().collect();
        keys.sort_by_key(|m| (m.grade(), (*m).clone()));
        for (i, m) in keys.iter().enumerate() {
            let c = &self.terms[*m];
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
            if m.is_one() {
                if single_term {
                    write!(f, "{body}")?;
                } else {
                    write!(f, "({body})")?;
                }
            } else if single_term {
                if body == "1" {
                    write!(f, "{m}")?;
                } else {
                    write!(f, "{body}*{m}")?;
                }
            } else {
                write!(f, "({body})*{m}")?;
            }
        }
        Ok(())
    }
}

/// All monomials of the given grade with parts bounded by `max_part`
/// (set `max_part >= grade` for no restriction). With `odd_only`, only odd
/// variable indices are used. Ordered canonically.
pub fn monomials_of_grade(grade: u32, max_part: u32, odd_only: bool) -> Vec<QMonomial> {
    let mut out = Vec::new();
    let mut current: Vec<u32> = Vec::new();
    fn rec(remaining: u32, max_next: u32, odd_only: bool, current: &mut Vec<u32>, out: &mut Vec<QMonomial>) {
        if remaining == 0 {
            out.push(QMonomial::from_pairs(current.iter().map(|&k| (k, 1))));
            return;
        }
        let mut k = max_next.min(remaining);
        while k >= 1 {
            if !odd_only || k % 2 == 1 {
                current.push(k);
                rec(remaining - k, k, odd_only, current, out);
                current.pop();
            }
            k -= 1;
        }
    }
    rec(grade, max_part, odd_only, &mut current, &mut out);
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    fn m(pairs: &[(u32, u32)]) -> QMonomial {
        QMonomial::from_pairs(pairs.iter().copied())
    }

    #[test]
    fn grades_and_factor_counts() {
        assert_eq!(QMonomial::one().grade(), 0);
        assert_eq!(m(&[(1, 3), (3, 1)]).grade(), 6);
        assert_eq!(m(&[(1, 3), (3, 1)]).factor_count(), 4);
        assert_eq!(m(&[(5, 2)]).max_var(), 5);
    }

    #[test]
    fn display_is_canonical() {
        let mut p = QPolynomial::zero(3);
        p.add_term(m(&[(1, 3)]), ParamPoly::constant(rat(1, 6))).unwrap();
        p.add_term(m(&[(3, 1)]), ParamPoly::constant(rat(1, 24))).unwrap();
        assert_eq!(p.to_string(), "1/6*q1^3 + 1/24*q3");

        let mut q = QPolynomial::zero(1);
        let c = &ParamPoly::constant(rat(1, 16)) - &ParamPoly::term(2, 0, rat(1, 4));
        q.add_term(m(&[(1, 1)]), c).unwrap();
        assert_eq!(q.to_string(), "(1/16 - 1/4*N^2)*q1");

        let mut r = QPolynomial::zero(2);
        r.add_term(m(&[(2, 1)]), ParamPoly::constant(rat(-1, 2))).unwrap();
        r.add_term(QMonomial::one(), ParamPoly::one()).unwrap();
        assert_eq!(r.to_string(), "1 - 1/2*q2");
        assert_eq!(QPolynomial::zero(0).to_string(), "0");
    }

    #[test]
    fn cutoff_violations_fail_loudly() {
        let mut p = QPolynomial::zero(2);
        assert_eq!(
            p.add_term(m(&[(3, 1)]), ParamPoly::one()),
            Err(Error::CutoffExceeded { needed: 3, cutoff: 2 })
        );
        let q = QPolynomial::one(2);
        assert!(q.mul_var(2).is_ok());
        assert_eq!(q.mul_var(3), Err(Error::CutoffExceeded { needed: 3, cutoff: 2 }));
    }

    #[test]
    fn product_and_derivative() {
        // (q1^2) * (q1 + q2) = q1^3 + q1^2 q2, then d/dq1 gives 3q1^2 + 2q1q2.
        let mut a = QPolynomial::zero(2);
        a.add_term(m(&[(1, 2)]), ParamPoly::one()).unwrap();
        let mut b = QPolynomial::zero(2);
        b.add_term(m(&[(1, 1)]), ParamPoly::one()).unwrap();
        b.add_term(m(&[(2, 1)]), ParamPoly::one()).unwrap();
        let prod = a.mul(&b);
        assert_eq!(prod.coeff(&m(&[(1, 3)])), ParamPoly::one());
        assert_eq!(prod.coeff(&m(&[(1, 2), (2, 1)])), ParamPoly::one());
        let d = prod.d_dq(1);
        assert_eq!(d.coeff(&m(&[(1, 2)])), ParamPoly::constant(rat(3, 1)));
        assert_eq!(d.coeff(&m(&[(1, 1), (2, 1)])), ParamPoly::constant(rat(2, 1)));
        assert!(prod.d_dq(5).is_zero());
    }

    #[test]
    fn grade_decomposition_is_a_partition_of_terms() {
        let mut p = QPolynomial::zero(4);
        p.add_term(QMonomial::one(), ParamPoly::one()).unwrap();
        p.add_term(m(&[(1, 2)]), ParamPoly::one()).unwrap();
        p.add_term(m(&[(2, 1)]), ParamPoly::constant(rat(5, 1))).unwrap();
        p.add_term(m(&[(4, 1)]), ParamPoly::one()).unwrap();
        let parts = p.grade_parts();
        assert_eq!(parts.keys().copied().collect::<Vec<_>>(), vec![0, 2, 4]);
        let mut back = QPolynomial::zero(4);
        for part in parts.values() {
            back.add_assign(part);
        }
        assert_eq!(back, p);
        assert_eq!(p.grade_part(2).term_count(), 2);
        assert_eq!(p.max_grade(), Some(4));
    }

    #[test]
    fn monomial_enumeration_counts() {
        // Unrestricted monomials of grade d are partitions of d: p(8) = 22.
        assert_eq!(monomials_of_grade(8, 8, false).len(), 22);
        // Odd-part partitions of 9: 8 of them.
        assert_eq!(monomials_of_grade(9, 9, true).len(), 8);
        // Parts bounded by 2: partitions of 6 into 1s and 2s: 4.
        assert_eq!(monomials_of_grade(6, 2, false).len(), 4);
        for mono in monomials_of_grade(7, 7, false) {
            assert_eq!(mono.grade(), 7);
        }
    }

    #[test]
    fn json_round_trip() {
        let mut p = QPolynomial::zero(3);
        p.add_term(m(&[(1, 3)]), ParamPoly::constant(rat(1, 6))).unwrap();
        let c = &ParamPoly::constant(rat(1, 24)) - &ParamPoly::term(2, 1, rat(1, 4));
        p.add_term(m(&[(3, 1)]), c).unwrap();
        let v = p.to_json_value();
        let back = QPolynomial::from_json_value(&v, 3).unwrap();
        assert_eq!(back, p);
        // The serialized bytes are stable.
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"[{"coeff":"1/6","monomial":[[1,3]]},{"coeff":"1/24 - 1/4*N^2*h","monomial":[[3,1]]}]"#
        );
    }

    #[test]
    fn odd_variable_detection() {
        let mut p = QPolynomial::zero(5);
        p.add_term(m(&[(1, 2), (3, 1)]), ParamPoly::one()).unwrap();
        assert!(p.odd_variables_only());
        p.add_term(m(&[(2, 1)]), ParamPoly::one()).unwrap();
        assert!(!p.odd_variables_only());
    }
}
