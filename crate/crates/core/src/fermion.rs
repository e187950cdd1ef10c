//! Free-fermion engine: one-body operators acting on partition states.
//!
//! A state is a finite combination of partitions; each partition stands for
//! its Schur polynomial under the boson dictionary of [`crate::schur`]. A
//! grade-raising one-body operator `sum c z^{-s} D^m` acts by single-row
//! moves: materialize the first-column positions `lambda_i - i`, move one
//! position up by `s`, pick up a polynomial weight in the moved position
//! and a reordering sign from the occupied positions jumped over.
//!
//! The exact convention (where the weight is anchored, a possible
//! reflection and shift of the position argument, and a global sign) is not
//! hard-coded. [`calibration`] scans a small family of affine conventions
//! and keeps the unique one that reproduces the node-operator actions of
//! [`crate::fock`] on a battery of low-grade states. The survivor is frozen
//! in this module's tests; the selection is repeated from scratch in every
//! process, so a drift in either engine breaks the battery loudly rather
//! than silently.

use crate::diffop::DiffOp;
use crate::error::{Error, Result};
use crate::fock::{apply_node, one_body_symbol, NodeKind, NodeOp};
use crate::parampoly::ParamPoly;
use crate::partition::Partition;
use crate::qpoly::QPolynomial;
use crate::scalar::{rat_int, rat_pow_int};
use crate::schur::{schur_poly_cached, schur_poly_char_cached, to_schur_basis};
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Bound::Excluded;
use std::sync::OnceLock;

/// Finite combination of partition states.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FermionState {
    terms: BTreeMap<Partition, ParamPoly>,
}

impl FermionState {
    pub fn zero() -> Self {
        FermionState::default()
    }

    /// The empty-partition state (the constant polynomial downstairs).
    pub fn vacuum() -> Self {
        let mut s = FermionState::zero();
        s.insert_add(Partition::empty(), ParamPoly::one());
        s
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Partition, ParamPoly)>) -> Self {
        let mut s = FermionState::zero();
        for (lam, c) in terms {
            s.insert_add(lam, c);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Partition, &ParamPoly)> {
        self.terms.iter()
    }

    pub fn insert_add(&mut self, lam: Partition, c: ParamPoly) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(lam) {
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

    pub fn add_assign(&mut self, other: &FermionState) {
        for (lam, c) in &other.terms {
            self.insert_add(lam.clone(), c.clone());
        }
    }

    pub fn scale_param(&self, c: &ParamPoly) -> FermionState {
        let mut out = FermionState::zero();
        for (lam, v) in &self.terms {
            out.insert_add(lam.clone(), v * c);
        }
        out
    }

    /// Largest partition weight present.
    pub fn max_grade(&self) -> Option<u32> {
        self.terms.keys().map(|l| l.weight()).max()
    }

    /// Keeps only partitions of weight at most `cap`.
    pub fn truncate(&self, cap: u32) -> FermionState {
        FermionState {
            terms: self
                .terms
                .iter()
                .filter(|(l, _)| l.weight() <= cap)
                .map(|(l, c)| (l.clone(), c.clone()))
                .collect(),
        }
    }
}

impl fmt::Display for FermionState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (lam, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})*{lam}")?;
        }
        Ok(())
    }
}

/// An affine convention for the single-row move: where the polynomial
/// weight is evaluated (source or target position), an optional reflection
/// and shift of that argument, and a global sign.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Calibration {
    pub anchor_target: bool,
    pub reflect: bool,
    pub offset: i64,
    pub sign: i64,
}

fn candidate_family() -> Vec<Calibration> {
    let mut out = Vec::new();
    for anchor_target in [false, true] {
        for reflect in [false, true] {
            for offset in -2..=2 {
                for sign in [1, -1] {
                    out.push(Calibration { anchor_target, reflect, offset, sign });
                }
            }
        }
    }
    out
}

/// First-column positions `lambda_i - i` for rows `1..=rows`.
fn positions(lam: &Partition, rows: usize) -> Vec<i64> {
    (1..=rows)
        .map(|i| lam.part(i) as i64 - i as i64)
        .collect()
}

/// Rebuilds a partition from a strictly decreasing (after sorting) set of
/// first-column positions whose tail agrees with the vacuum.
fn partition_from_positions(mut vals: Vec<i64>) -> Partition {
    vals.sort_unstable_by(|a, b| b.cmp(a));
    let parts: Vec<u32> = vals
        .iter()
        .enumerate()
        .map(|(i, &v)| (v + i as i64 + 1).max(0) as u32)
        .collect();
    Partition::new(parts)
}

/// Applies a grade-raising one-body operator under a given convention.
fn apply_with(cal: Calibration, op: &DiffOp, state: &FermionState) -> Result<FermionState> {
    op.check_grade_raising()?;
    let mut out = FermionState::zero();
    for (lam, coeff) in &state.terms {
        for (&(n, m), c) in op.iter() {
            let s = -n; // strictly positive by the grade check
            let rows = lam.len() + s as usize + 1;
            let vals = positions(lam, rows);
            let set: BTreeSet<i64> = vals.iter().copied().collect();
            for &x in &vals {
                let target = x + s;
                if set.contains(&target) {
                    continue;
                }
                let between = set.range((Excluded(x), Excluded(target))).count();
                let base = if cal.anchor_target { target } else { x };
                let arg = if cal.reflect { -base } else { base } + cal.offset;
                let mut w = rat_pow_int(arg, m) * rat_int(cal.sign);
                if between % 2 == 1 {
                    w = -w;
                }
                if w.is_zero() {
                    continue;
                }
                let moved: Vec<i64> = vals
                    .iter()
                    .map(|&v| if v == x { target } else { v })
                    .collect();
                out.insert_add(
                    partition_from_positions(moved),
                    (coeff * c).scale(&w),
                );
            }
        }
    }
    Ok(out)
}

/// One battery case: a symbol, an input state, and the boson-verified
/// expected output (converted into partition coordinates).
fn battery() -> Result<Vec<(DiffOp, FermionState, FermionState)>> {
    let mut cases = Vec::new();
    let cutoff = 12;
    for kind in [NodeKind::Alpha, NodeKind::L, NodeKind::M, NodeKind::Q] {
        for idx in -6..=-1i64 {
            let symbol = one_body_symbol(kind, idx);
            let node = NodeOp { kind, index: idx, odd_reduced: false };
            for lam in Partition::all_up_to(5) {
                let input_poly = schur_poly_cached(&lam, cutoff)?;
                let expected_poly = apply_node(&node, &input_poly)?;
                let expected =
                    FermionState::from_terms(to_schur_basis(&expected_poly)?);
                let input = FermionState::from_terms([(lam.clone(), ParamPoly::one())]);
                cases.push((symbol.clone(), input, expected));
            }
        }
    }
    Ok(cases)
}

fn select_calibration() -> Result<Calibration> {
    let cases = battery()?;
    let mut survivors = Vec::new();
    for cand in candidate_family() {
        let mut ok = true;
        for (symbol, input, expected) in &cases {
            if &apply_with(cand, symbol, input)? != expected {
                ok = false;
                break;
            }
        }
        if ok {
            survivors.push(cand);
        }
    }
    match survivors.len() {
        1 => Ok(survivors[0]),
        0 => Err(Error::Calibration(
            "no single-row-move convention reproduces the node actions".into(),
        )),
        k => Err(Error::Calibration(format!(
            "{k} conventions survive the battery; it is not discriminating enough"
        ))),
    }
}

/// The process-wide calibrated convention (selected once, then reused).
pub fn calibration() -> Result<Calibration> {
    static CAL: OnceLock<std::result::Result<Calibration, String>> = OnceLock::new();
    CAL.get_or_init(|| select_calibration().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Calibration)
}

/// Applies a grade-raising one-body operator to a partition state.
pub fn onebody_fermion_apply(op: &DiffOp, state: &FermionState) -> Result<FermionState> {
    apply_with(calibration()?, op, state)
}

/// Converts a partition state to its polynomial.
pub fn fermion_to_boson(state: &FermionState, cutoff: u32) -> Result<QPolynomial> {
    let mut out = QPolynomial::zero(cutoff);
    for (lam, c) in &state.terms {
        out.add_assign(&schur_poly_char_cached(lam, cutoff)?.scale_param(c));
    }
    Ok(out)
}

/// Converts a polynomial to partition coordinates.
pub fn boson_to_fermion(p: &QPolynomial) -> Result<FermionState> {
    Ok(FermionState::from_terms(to_schur_basis(p)?))
}

/// Applies a grade-raising one-body operator to a polynomial by a round
/// trip through partition coordinates.
pub fn onebody_boson_apply(op: &DiffOp, p: &QPolynomial) -> Result<QPolynomial> {
    let state = boson_to_fermion(p)?;
    fermion_to_boson(&onebody_fermion_apply(op, &state)?, p.cutoff())
}
