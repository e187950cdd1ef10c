//! Tau-series solvers and comparisons.
//!
//! A [`TauSeries`] is a grade-truncated tau-function: component `d` is the
//! homogeneous grade-`d` polynomial, component 0 is `1`, and the coupling
//! power of component `d` is `h^d` by the grading convention, so `h` never
//! appears explicitly. Three engines produce the same series and are kept
//! deliberately independent so they can check one another:
//!
//! * [`oe_solve`] — the grade recursion `d*tau_d = sum_k W[k] tau_{d-k}`
//!   driven by a graded node-operator flow (the ordered-exponential solution
//!   of `(grading - W) tau = 0`);
//! * [`oe_solve_fermionic`] — the same recursion run on partition states
//!   through the calibrated single-row-move engine, converted to
//!   polynomials only at the end;
//! * [`cut_and_join_exp`] — the closed-form exponential `e^W * 1`, summed
//!   term by term with exact factorials from the explicit cut-and-join
//!   operator (never through the recursion machinery).
//!
//! [`tau_model`] dispatches on (model, engine) and [`series_compare`]
//! reports the first grade where two series disagree.

use crate::error::{Error, Result};
use crate::fermion::{fermion_to_boson, onebody_fermion_apply, FermionState};
use crate::fock::{build_w_operator, GradedOperator};
use crate::model::{EngineKind, Model};
use crate::parampoly::ParamPoly;
use crate::qpoly::{QMonomial, QPolynomial};
use crate::scalar::{rat, Rat};
use serde_json::{json, Value};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// A tau-function truncated at a grade cap, split into homogeneous
/// components, together with the provenance tags (model and engine) that
/// produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauSeries {
    pub model: Model,
    pub engine: EngineKind,
    pub grade_cap: u32,
    /// Homogeneous components by grade; absent grades are zero, and grade 0
    /// is the constant 1 for every solved series.
    pub components: BTreeMap<u32, QPolynomial>,
}

impl TauSeries {
    fn cutoff(&self) -> u32 {
        self.grade_cap.max(1)
    }

    /// The grade-`d` component (zero when absent).
    pub fn component(&self, d: u32) -> QPolynomial {
        self.components
            .get(&d)
            .cloned()
            .unwrap_or_else(|| QPolynomial::zero(self.cutoff()))
    }

    /// All components summed into one polynomial.
    pub fn full(&self) -> QPolynomial {
        let mut out = QPolynomial::zero(self.cutoff());
        for p in self.components.values() {
            out.add_assign(p);
        }
        out
    }

    /// Evaluates the parameter `N` at a rational value in every component,
    /// dropping components that become zero.
    pub fn substitute_n(&self, n: &Rat) -> Result<TauSeries> {
        let mut components = BTreeMap::new();
        for (&d, p) in &self.components {
            let sub = p.substitute(Some(n), None)?;
            if !sub.is_zero() {
                components.insert(d, sub);
            }
        }
        Ok(TauSeries { components, ..self.clone() })
    }

    /// JSON value with the stable shape
    /// `{model, engine, degree, components: [{grade, terms}]}` where `terms`
    /// is the polynomial encoding of [`QPolynomial::to_json_value`].
    pub fn to_json_value(&self) -> Value {
        let components: Vec<Value> = self
            .components
            .iter()
            .map(|(d, p)| json!({ "grade": d, "terms": p.to_json_value() }))
            .collect();
        json!({
            "model": self.model.to_string(),
            "engine": self.engine.to_string(),
            "degree": self.grade_cap,
            "components": components,
        })
    }

    /// Inverse of [`TauSeries::to_json_value`], with shape and homogeneity
    /// validation.
    pub fn from_json_value(v: &Value) -> Result<TauSeries> {
        let get_str = |key: &str| -> Result<&str> {
            v.get(key).and_then(Value::as_str).ok_or_else(|| {
                Error::InvalidArgument(format!("series JSON lacks string field `{key}`"))
            })
        };
        let model: Model = get_str("model")?.parse()?;
        let engine: EngineKind = get_str("engine")?.parse()?;
        let grade_cap = v
            .get("degree")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::InvalidArgument("series JSON lacks integer `degree`".into()))?
            as u32;
        let cutoff = grade_cap.max(1);
        let comps_v = v
            .get("components")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::InvalidArgument("series JSON lacks `components` array".into()))?;
        let mut components = BTreeMap::new();
        for item in comps_v {
            let d = item
                .get("grade")
                .and_then(Value::as_u64)
                .ok_or_else(|| Error::InvalidArgument("component without integer `grade`".into()))?
                as u32;
            if d > grade_cap {
                return Err(Error::InvalidArgument(format!(
                    "component grade {d} exceeds the degree {grade_cap}"
                )));
            }
            let terms = item
                .get("terms")
                .ok_or_else(|| Error::InvalidArgument("component without `terms`".into()))?;
            let p = QPolynomial::from_json_value(terms, cutoff)?;
            if p.terms().any(|(m, _)| m.grade() != d) {
                return Err(Error::InvalidArgument(format!(
                    "component {d} is not homogeneous of grade {d}"
                )));
            }
            if components.insert(d, p).is_some() {
                return Err(Error::InvalidArgument(format!("duplicate component grade {d}")));
            }
        }
        Ok(TauSeries { model, engine, grade_cap, components })
    }
}

/// Comparison record for two series; empty when they agree at every grade.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DiffReport {
    /// First grade where the series differ, with one `monomial: left vs
    /// right` line per differing coefficient.
    pub first_difference: Option<(u32, Vec<String>)>,
}

impl DiffReport {
    pub fn is_empty(&self) -> bool {
        self.first_difference.is_none()
    }
}

impl fmt::Display for DiffReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.first_difference {
            None => write!(f, "series agree"),
            Some((d, lines)) => {
                write!(f, "first difference at grade {d}")?;
                for line in lines {
                    write!(f, "\n  {line}")?;
                }
                Ok(())
            }
        }
    }
}

/// Compares two series of the same grade cap, grade by grade.
pub fn series_compare(a: &TauSeries, b: &TauSeries) -> Result<DiffReport> {
    if a.grade_cap != b.grade_cap {
        return Err(Error::InvalidArgument(format!(
            "comparing series with different grade caps ({} vs {})",
            a.grade_cap, b.grade_cap
        )));
    }
    for d in 0..=a.grade_cap {
        let pa = a.component(d);
        let pb = b.component(d);
        if pa == pb {
            continue;
        }
        let mut monos: BTreeSet<&QMonomial> = pa.terms().map(|(m, _)| m).collect();
        monos.extend(pb.terms().map(|(m, _)| m));
        let lines: Vec<String> = monos
            .into_iter()
            .filter_map(|m| {
                let ca = pa.coeff(m);
                let cb = pb.coeff(m);
                (ca != cb).then(|| format!("{m}: {ca} vs {cb}"))
            })
            .collect();
        return Ok(DiffReport { first_difference: Some((d, lines)) });
    }
    Ok(DiffReport::default())
}

/// Solves the graded flow equation `(grading - W) tau = 0` degree by degree:
/// `tau_0 = 1` and `d*tau_d = sum_k W[k] tau_{d-k}`, which is the
/// grade-truncated ordered exponential of the flow. The result is tagged
/// with the given model and the node engine.
pub fn oe_solve(model: Model, w: &GradedOperator, grade_cap: u32) -> Result<TauSeries> {
    if w.components.contains_key(&0) {
        return Err(Error::GradeZeroComponent);
    }
    let cutoff = grade_cap.max(1);
    let mut components: BTreeMap<u32, QPolynomial> = BTreeMap::new();
    components.insert(0, QPolynomial::one(cutoff));
    for d in 1..=grade_cap {
        let mut acc = QPolynomial::zero(cutoff);
        for (&k, comp) in &w.components {
            if k > d {
                continue;
            }
            if let Some(prev) = components.get(&(d - k)) {
                acc.add_assign(&comp.apply(prev)?);
            }
        }
        if !acc.is_zero() {
            components.insert(d, acc.scale(&rat(1, d as i64)));
        }
    }
    Ok(TauSeries { model, engine: EngineKind::Nodes, grade_cap, components })
}

/// Runs the same grade recursion as [`oe_solve`] on partition states: the
/// one-body grade parts of the model's constraint operator act through the
/// calibrated single-row-move engine, and the states are converted to
/// polynomials only once at the end.
pub fn oe_solve_fermionic(model: Model, grade_cap: u32) -> Result<TauSeries> {
    let r = model.constraint_generator()?;
    let parts = r.grade_parts()?;
    let mut states: BTreeMap<u32, FermionState> = BTreeMap::new();
    states.insert(0, FermionState::vacuum());
    for d in 1..=grade_cap {
        let mut acc = FermionState::zero();
        for (&k, op) in &parts {
            if k > d {
                continue;
            }
            if let Some(prev) = states.get(&(d - k)) {
                acc.add_assign(&onebody_fermion_apply(op, prev)?);
            }
        }
        if !acc.is_zero() {
            states.insert(d, acc.scale_param(&ParamPoly::constant(rat(1, d as i64))));
        }
    }
    let cutoff = grade_cap.max(1);
    let mut components = BTreeMap::new();
    for (&d, s) in &states {
        let p = fermion_to_boson(s, cutoff)?;
        if !p.is_zero() {
            components.insert(d, p);
        }
    }
    Ok(TauSeries { model, engine: EngineKind::Fermionic, grade_cap, components })
}

/// One application of the model's cut-and-join operator, written directly
/// from its displayed odd-variable form: a multiply-multiply-derive sum, a
/// derive-derive-multiply sum, and a derivative-free polynomial. The cubic
/// model raises the grade by 3, the parametric model by 1.
fn cut_and_join_apply(model: Model, p: &QPolynomial) -> Result<QPolynomial> {
    let (raise, up_pref, down_pref) = match model {
        Model::Kw => (3u32, rat(1, 3), rat(1, 6)),
        Model::Bgw => (1u32, rat(1, 2), rat(1, 4)),
        Model::Gkm(_) => {
            return Err(Error::Internal("cut-and-join reached a monomial model".into()))
        }
    };
    // Derivative-free part: for the cubic model the polynomial
    // q1^3/6 + q3/24; for the parametric model (1/16 - N^2/4) q1.
    let bgw_const = &ParamPoly::constant(rat(1, 16)) + &ParamPoly::term(2, 0, rat(-1, 4));
    let mut out = QPolynomial::zero(p.cutoff());
    for (mono, coeff) in p.terms() {
        // Multiply-multiply-derive: remove one power of an odd variable w
        // (weight w * exponent) and distribute two odd variables a + b =
        // w + raise, over ordered splittings.
        for (&w, &e) in mono.iter() {
            if w % 2 == 0 {
                continue;
            }
            let stripped = mono.div_var(w).expect("variable present");
            let base = coeff.scale(&(up_pref.clone() * rat(w as i64 * e as i64, 1)));
            let mut a = 1;
            while a < w + raise {
                let b = w + raise - a;
                out.add_term(stripped.times_var(a).times_var(b), base.clone())?;
                a += 2;
            }
        }
        // Derive-derive-multiply: remove odd variables j then i (ordered,
        // weights j and i times the remaining exponents) and multiply by
        // the single variable i + j + raise.
        for (&j, &ej) in mono.iter() {
            if j % 2 == 0 {
                continue;
            }
            let after_j = mono.div_var(j).expect("variable present");
            for (&i, _) in mono.iter() {
                if i % 2 == 0 {
                    continue;
                }
                let ei = after_j.exponent_of(i);
                if ei == 0 {
                    continue;
                }
                let factor = rat((j * ej) as i64, 1) * rat((i * ei) as i64, 1);
                out.add_term(
                    after_j.div_var(i).expect("exponent checked").times_var(i + j + raise),
                    coeff.scale(&(down_pref.clone() * factor)),
                )?;
            }
        }
        match model {
            Model::Kw => {
                out.add_term(
                    mono.times(&QMonomial::from_pairs([(1, 3)])),
                    coeff.scale(&rat(1, 6)),
                )?;
                out.add_term(mono.times_var(3), coeff.scale(&rat(1, 24)))?;
            }
            Model::Bgw => out.add_term(mono.times_var(1), coeff * &bgw_const)?,
            Model::Gkm(_) => unreachable!("rejected above"),
        }
    }
    Ok(out)
}

/// The cut-and-join form `tau = e^W * 1`, computed as the terminating
/// exponential series `sum_k W^k * 1 / k!` with exact factorials. Each
/// application raises the grade homogeneously, so term `k` is the grade
/// `k * raise` component.
pub fn cut_and_join_exp(model: Model, grade_cap: u32) -> Result<TauSeries> {
    let raise: u32 = match model {
        Model::Kw => 3,
        Model::Bgw => 1,
        Model::Gkm(_) => {
            return Err(Error::UnsupportedEngine {
                model: model.to_string(),
                engine: EngineKind::CutJoin.to_string(),
            })
        }
    };
    let cutoff = grade_cap.max(1);
    let mut term = QPolynomial::one(cutoff);
    let mut components = BTreeMap::new();
    components.insert(0, term.clone());
    let mut k = 0u32;
    while (k + 1) * raise <= grade_cap {
        k += 1;
        term = cut_and_join_apply(model, &term)?.scale(&rat(1, k as i64));
        if term.is_zero() {
            break;
        }
        components.insert(k * raise, term.clone());
    }
    Ok(TauSeries { model, engine: EngineKind::CutJoin, grade_cap, components })
}

/// Builds the tau-series of a model with the requested engine. The node and
/// cut-and-join engines exist for the two models with committed constraint
/// tables; the fermionic engine covers every model through its one-body
/// constraint operator.
pub fn tau_model(model: Model, engine: EngineKind, grade_cap: u32) -> Result<TauSeries> {
    match (model, engine) {
        (Model::Kw | Model::Bgw, EngineKind::Nodes) => {
            oe_solve(model, &build_w_operator(model)?, grade_cap)
        }
        (Model::Kw | Model::Bgw, EngineKind::CutJoin) => cut_and_join_exp(model, grade_cap),
        (_, EngineKind::Fermionic) => oe_solve_fermionic(model, grade_cap),
        _ => Err(Error::UnsupportedEngine {
            model: model.to_string(),
            engine: engine.to_string(),
        }),
    }
}
