//! Node operators of the W-algebra acting on the boson state space.
//!
//! The spin-1 through spin-4 nodes (Heisenberg, Virasoro, and their two
//! higher companions) are realized as differential operators on polynomials
//! in the `qk`. All four are driven by one shared mechanism: a sum of
//! normal-ordered products of current modes over index tuples with fixed
//! total, applied monomial by monomial. The spin-4 node carries an extra
//! quadratic correction and a Virasoro multiple on top of its quartic part.
//!
//! Each node corresponds to a one-body symbol in the `z^a D^b` algebra
//! ([`one_body_symbol`]); [`node_decomposition`] inverts that map, writing a
//! grade-homogeneous symbol of differential order at most 3 as an exact
//! combination of nodes. This is the bridge between constraint generators
//! built upstairs in the operator algebra and concrete actions on states.

use crate::diffop::{bgw_ops, gkm_ops, DiffOp};
use crate::error::{Error, Result};
use crate::model::Model;
use crate::par;
use crate::parampoly::ParamPoly;
use crate::qpoly::{QMonomial, QPolynomial};
use crate::scalar::{rat, rat_int, rat_pow_int, Rat};
use num::{One, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Spin of a node operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum NodeKind {
    /// Spin 1: current modes (multiplication / weighted derivative).
    Alpha,
    /// Spin 2: Virasoro modes.
    L,
    /// Spin 3.
    M,
    /// Spin 4.
    Q,
}

impl NodeKind {
    fn letter(&self) -> &'static str {
        match self {
            NodeKind::Alpha => "alpha",
            NodeKind::L => "L",
            NodeKind::M => "M",
            NodeKind::Q => "Q",
        }
    }
}

/// A node operator: spin, mode index, and optionally the odd-sector
/// reduction (every running summation index restricted to odd values).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NodeOp {
    pub kind: NodeKind,
    pub index: i64,
    pub odd_reduced: bool,
}

impl NodeOp {
    pub fn alpha(n: i64) -> Self {
        NodeOp { kind: NodeKind::Alpha, index: n, odd_reduced: false }
    }
    pub fn l(n: i64) -> Self {
        NodeOp { kind: NodeKind::L, index: n, odd_reduced: false }
    }
    pub fn m(n: i64) -> Self {
        NodeOp { kind: NodeKind::M, index: n, odd_reduced: false }
    }
    pub fn q(n: i64) -> Self {
        NodeOp { kind: NodeKind::Q, index: n, odd_reduced: false }
    }
    /// The odd-sector reduction of this node.
    pub fn odd(self) -> Self {
        NodeOp { odd_reduced: true, ..self }
    }
}

impl fmt::Display for NodeOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}_{}",
            self.kind.letter(),
            if self.odd_reduced { "~" } else { "" },
            self.index
        )
    }
}

/// Extra per-tuple weight in a normal-ordered product sum.
#[derive(Debug, Clone, Copy)]
enum TupleWeight {
    Unit,
    /// Product of `(index + 1)` over the tuple — the weight of the quadratic
    /// correction inside the spin-4 node.
    SuccessorProduct,
}

impl TupleWeight {
    fn eval(self, values: &[i64]) -> Rat {
        match self {
            TupleWeight::Unit => Rat::one(),
            TupleWeight::SuccessorProduct => {
                let mut w = Rat::one();
                for &v in values {
                    w *= rat_int(v + 1);
                }
                w
            }
        }
    }
}

/// Falling factorial `e (e-1) ... (e-r+1)`.
fn falling(e: u32, r: u32) -> Rat {
    let mut acc = Rat::one();
    for i in 0..r {
        acc *= rat_int(e as i64 - i as i64);
    }
    acc
}

fn factorial(n: u32) -> i64 {
    (1..=n as i64).product::<i64>().max(1)
}

/// Applies `prefactor * sum over ordered tuples (a_1..a_arity) of nonzero
/// integers with a_1 + ... + a_arity = total` of the normal-ordered product
/// of current modes `:alpha_{a_1} ... alpha_{a_arity}:`, each tuple weighted
/// by `weight`. Normal ordering puts the multiplication modes (negative
/// indices) to the left of the derivative modes (positive indices); the
/// zero mode acts as zero. With `odd_only`, tuples containing an even index
/// are dropped.
///
/// The sum is organized over multisets (ordered tuples recovered through a
/// multinomial count). For a given input monomial only finitely many
/// multisets contribute: the positive entries must be drawn from the
/// monomial's variables, which then fixes the total of the negative entries.
fn alpha_product_sum(
    p: &QPolynomial,
    arity: u32,
    total: i64,
    odd_only: bool,
    weight: TupleWeight,
    prefactor: Rat,
) -> Result<QPolynomial> {
    let terms: Vec<(QMonomial, ParamPoly)> =
        p.terms().map(|(m, c)| (m.clone(), c.clone())).collect();
    let cutoff = p.cutoff();
    let process = |chunk: &[(QMonomial, ParamPoly)]| -> Result<QPolynomial> {
        let mut out = QPolynomial::zero(cutoff);
        for (mono, coeff) in chunk {
            apply_tuples_to_monomial(
                mono, coeff, arity, total, odd_only, weight, &prefactor, &mut out,
            )?;
        }
        Ok(out)
    };
    par::chunked_fold(
        &terms,
        Ok(QPolynomial::zero(cutoff)),
        process,
        |acc: Result<QPolynomial>, part| {
            let mut acc = acc?;
            acc.add_assign(&part?);
            Ok(acc)
        },
    )
}

/// Inner loop of [`alpha_product_sum`] for one monomial.
fn apply_tuples_to_monomial(
    mono: &QMonomial,
    coeff: &ParamPoly,
    arity: u32,
    total: i64,
    odd_only: bool,
    weight: TupleWeight,
    prefactor: &Rat,
    out: &mut QPolynomial,
) -> Result<()> {
    // Distinct variables usable as derivative modes, with their exponents.
    let vars: Vec<(u32, u32)> = mono
        .iter()
        .filter(|(k, _)| !odd_only || *k % 2 == 1)
        .map(|(&k, &e)| (k, e))
        .collect();
    let arity_fact = factorial(arity);

    // Choose how many times each variable is used as a derivative mode.
    let mut chosen: Vec<(u32, u32)> = Vec::new();
    choose_derivative_modes(&vars, 0, arity, &mut chosen, &mut |picked| {
        let pos_count: u32 = picked.iter().map(|&(_, r)| r).sum();
        let pos_sum: i64 = picked.iter().map(|&(v, r)| v as i64 * r as i64).sum();
        let neg_count = arity - pos_count;
        // Negative entries each contribute at most -1, so their count and
        // total are forced: sum of negatives = total - pos_sum.
        let neg_total = pos_sum - total;
        if neg_count == 0 {
            if neg_total != 0 {
                return Ok(());
            }
            emit_term(mono, coeff, picked, &[], arity_fact, odd_only, weight, prefactor, out)
        } else {
            if neg_total < neg_count as i64 {
                return Ok(());
            }
            let mut parts: Vec<u32> = Vec::new();
            partitions_exact(
                neg_total as u32,
                neg_count,
                neg_total as u32,
                odd_only,
                &mut parts,
                &mut |neg| emit_term(mono, coeff, picked, neg, arity_fact, odd_only, weight, prefactor, out),
            )
        }
    })
}

/// Recursively picks a sub-multiset of the variables (bounded by exponents
/// and by the remaining arity) to serve as derivative modes.
fn choose_derivative_modes(
    vars: &[(u32, u32)],
    idx: usize,
    arity_left: u32,
    chosen: &mut Vec<(u32, u32)>,
    f: &mut impl FnMut(&[(u32, u32)]) -> Result<()>,
) -> Result<()> {
    if idx == vars.len() {
        return f(chosen);
    }
    let (v, cap) = vars[idx];
    for r in 0..=cap.min(arity_left) {
        if r > 0 {
            chosen.push((v, r));
        }
        choose_derivative_modes(vars, idx + 1, arity_left - r, chosen, f)?;
        if r > 0 {
            chosen.pop();
        }
    }
    Ok(())
}

/// Enumerates weakly decreasing positive part lists of length exactly
/// `count` summing to `sum` (all parts odd when `odd_only`).
fn partitions_exact(
    sum: u32,
    count: u32,
    max_part: u32,
    odd_only: bool,
    current: &mut Vec<u32>,
    f: &mut impl FnMut(&[u32]) -> Result<()>,
) -> Result<()> {
    if count == 0 {
        return if sum == 0 { f(current) } else { Ok(()) };
    }
    // Each of the remaining parts is at least 1.
    let hi = max_part.min(sum.saturating_sub(count - 1));
    let mut part = hi;
    while part >= 1 {
        if (!odd_only || part % 2 == 1) && sum >= part {
            current.push(part);
            partitions_exact(sum - part, count - 1, part, odd_only, current, f)?;
            current.pop();
        }
        part -= 1;
    }
    Ok(())
}

/// Evaluates one multiset contribution and adds it to `out`.
#[allow(clippy::too_many_arguments)]
fn emit_term(
    mono: &QMonomial,
    coeff: &ParamPoly,
    derivs: &[(u32, u32)],
    creators: &[u32],
    arity_fact: i64,
    _odd_only: bool,
    weight: TupleWeight,
    prefactor: &Rat,
    out: &mut QPolynomial,
) -> Result<()> {
    // Multinomial count of ordered tuples realizing this multiset. Positive
    // and negative entries never coincide, so the factors are independent.
    let mut denom: i64 = 1;
    for &(_, r) in derivs {
        denom *= factorial(r);
    }
    let mut run = 1u32;
    for i in 0..creators.len() {
        if i > 0 && creators[i] == creators[i - 1] {
            run += 1;
        } else {
            run = 1;
        }
        denom *= run as i64;
    }
    let multiplicity = rat(arity_fact, denom);

    // Weighted derivative factor: mode `v` applied `r` times contributes
    // v^r * e (e-1) ... (e-r+1).
    let mut factor = Rat::one();
    for &(v, r) in derivs {
        factor *= rat_pow_int(v as i64, r) * falling(mono.exponent_of(v), r);
    }
    if factor.is_zero() {
        return Ok(());
    }

    // Tuple values (for the weight callback): negatives then positives.
    let mut values: Vec<i64> = creators.iter().map(|&v| -(v as i64)).collect();
    for &(v, r) in derivs {
        for _ in 0..r {
            values.push(v as i64);
        }
    }
    let w = weight.eval(&values);
    if w.is_zero() {
        return Ok(());
    }

    // Build the resulting monomial: remove derivative modes, add creators.
    let mut pairs: Vec<(u32, u32)> = Vec::new();
    for (&k, &e) in mono.iter() {
        let used = derivs.iter().find(|&&(v, _)| v == k).map(|&(_, r)| r).unwrap_or(0);
        if e > used {
            pairs.push((k, e - used));
        }
    }
    for &v in creators {
        pairs.push((v, 1));
    }
    let new_mono = QMonomial::from_pairs(pairs);
    let scalar = prefactor * multiplicity * factor * w;
    out.add_term(new_mono, coeff.scale(&scalar))
}

/// Applies a node operator to a polynomial state.
pub fn apply_node(op: &NodeOp, p: &QPolynomial) -> Result<QPolynomial> {
    let n = op.index;
    let odd = op.odd_reduced;
    match op.kind {
        NodeKind::Alpha => alpha_product_sum(p, 1, n, odd, TupleWeight::Unit, Rat::one()),
        NodeKind::L => alpha_product_sum(p, 2, n, odd, TupleWeight::Unit, rat(1, 2)),
        NodeKind::M => alpha_product_sum(p, 3, n, odd, TupleWeight::Unit, rat(1, 3)),
        NodeKind::Q => {
            // Quartic part, quadratic correction, and a Virasoro multiple.
            let mut out = alpha_product_sum(p, 4, n, odd, TupleWeight::Unit, rat(1, 4))?;
            out.add_assign(&alpha_product_sum(
                p,
                2,
                n,
                odd,
                TupleWeight::SuccessorProduct,
                rat(-1, 4),
            )?);
            let l = apply_node(&NodeOp { kind: NodeKind::L, index: n, odd_reduced: odd }, p)?;
            out.add_assign(&l.scale(&rat((n + 2) * (n + 3), 10)));
            Ok(out)
        }
    }
}

/// The one-body symbol whose second-quantization is the given node (always
/// with `odd_reduced` ignored: reductions have no one-body counterpart).
pub fn one_body_symbol(kind: NodeKind, n: i64) -> DiffOp {
    match kind {
        NodeKind::Alpha => DiffOp::z_pow(n).neg(),
        NodeKind::L => DiffOp::from_dz(1 + n, 1)
            .neg()
            .sub(&DiffOp::monomial(n, 0, ParamPoly::constant(rat(n + 1, 2)))),
        NodeKind::M => DiffOp::from_dz(2 + n, 2)
            .neg()
            .sub(&DiffOp::from_dz(1 + n, 1).scale(&rat(n + 2, 1)))
            .sub(&DiffOp::monomial(n, 0, ParamPoly::constant(rat((n + 1) * (n + 2), 6)))),
        NodeKind::Q => DiffOp::from_dz(n + 3, 3)
            .neg()
            .sub(&DiffOp::from_dz(n + 2, 2).scale(&rat(3 * (n + 3), 2)))
            .sub(&DiffOp::from_dz(n + 1, 1).scale(&rat(3 * (n + 2) * (n + 3), 5)))
            .sub(&DiffOp::monomial(
                n,
                0,
                ParamPoly::constant(rat((n + 1) * (n + 2) * (n + 3), 20)),
            )),
    }
}

/// Stirling numbers of the second kind (small table, computed on the fly).
fn stirling2(m: u32, j: u32) -> Rat {
    if j > m {
        return Rat::zero();
    }
    if m == 0 {
        return Rat::one(); // S(0, 0)
    }
    if j == 0 {
        return Rat::zero();
    }
    stirling2(m - 1, j - 1) + stirling2(m - 1, j) * rat_int(j as i64)
}

/// Coefficients of a grade-homogeneous operator in the `z^{n+j} d^j` basis
/// (`d = d/dz`): returns the common `z`-degree `n` and the map `j -> coeff`.
fn partial_basis_coeffs(op: &DiffOp) -> Result<(i64, BTreeMap<u32, ParamPoly>)> {
    let mut degree: Option<i64> = None;
    let mut coeffs: BTreeMap<u32, ParamPoly> = BTreeMap::new();
    for (&(a, b), c) in op.iter() {
        match degree {
            None => degree = Some(a),
            Some(d) if d == a => {}
            Some(d) => {
                return Err(Error::InvalidArgument(format!(
                    "operator mixes z-degrees {d} and {a}; split into grade parts first"
                )))
            }
        }
        // z^a D^b = sum_j S(b, j) z^{a+j} d^j.
        for j in 0..=b {
            let s = stirling2(b, j);
            if s.is_zero() {
                continue;
            }
            let entry = coeffs.entry(j).or_default();
            *entry += &c.scale(&s);
        }
    }
    let degree = degree.ok_or_else(|| Error::InvalidArgument("empty operator".into()))?;
    coeffs.retain(|_, c| !c.is_zero());
    Ok((degree, coeffs))
}

/// Writes a grade-homogeneous one-body operator of differential order at
/// most 3 as an exact combination of the four node symbols at its degree.
/// Returned in descending spin order with zero coefficients dropped.
pub fn node_decomposition(symbol: &DiffOp) -> Result<Vec<(ParamPoly, NodeOp)>> {
    let (degree, mut coeffs) = partial_basis_coeffs(symbol)?;
    if let Some((&j, _)) = coeffs.iter().next_back() {
        if j > 3 {
            return Err(Error::InvalidArgument(format!(
                "differential order {j} exceeds the spin-4 node family"
            )));
        }
    }
    let ladder = [
        (NodeKind::Q, 3u32),
        (NodeKind::M, 2),
        (NodeKind::L, 1),
        (NodeKind::Alpha, 0),
    ];
    let mut out = Vec::new();
    for (kind, top) in ladder {
        let c = coeffs.get(&top).cloned().unwrap_or_default();
        if c.is_zero() {
            continue;
        }
        // Every node symbol has top coefficient -1 at its own order.
        let node_coeff = -&c;
        let (_, node_rep) = partial_basis_coeffs(&one_body_symbol(kind, degree))?;
        for (j, nc) in node_rep {
            let entry = coeffs.entry(j).or_default();
            *entry += &-&(&nc * &node_coeff);
        }
        coeffs.retain(|_, v| !v.is_zero());
        out.push((node_coeff, NodeOp { kind, index: degree, odd_reduced: false }));
    }
    if !coeffs.is_empty() {
        return Err(Error::Internal(
            "node ladder left a nonzero remainder; symbol table inconsistent".into(),
        ));
    }
    Ok(out)
}

/// One homogeneous component of a graded constraint operator.
#[derive(Debug, Clone)]
pub enum WComponent {
    /// An explicit combination of node operators.
    Nodes(Vec<(ParamPoly, NodeOp)>),
    /// A raw one-body operator, applied through the free-fermion engine.
    OneBody(DiffOp),
}

impl WComponent {
    pub fn apply(&self, p: &QPolynomial) -> Result<QPolynomial> {
        match self {
            WComponent::Nodes(nodes) => {
                let mut out = QPolynomial::zero(p.cutoff());
                for (c, node) in nodes {
                    out.add_assign(&apply_node(node, p)?.scale_param(c));
                }
                Ok(out)
            }
            WComponent::OneBody(op) => crate::fermion::onebody_boson_apply(op, p),
        }
    }
}

impl fmt::Display for WComponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WComponent::Nodes(nodes) => {
                for (i, (c, node)) in nodes.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "({c})*{node}")?;
                }
                Ok(())
            }
            WComponent::OneBody(op) => write!(f, "W[{op}]"),
        }
    }
}

/// Graded constraint operator: one component per grade it raises.
#[derive(Debug, Clone)]
pub struct GradedOperator {
    pub components: BTreeMap<u32, WComponent>,
}

impl GradedOperator {
    pub fn grades(&self) -> Vec<u32> {
        self.components.keys().copied().collect()
    }

    /// Applies all components, keeping only output of grade `<= grade_cap`.
    pub fn apply(&self, p: &QPolynomial, grade_cap: u32) -> Result<QPolynomial> {
        let parts = p.grade_parts();
        let mut out = QPolynomial::zero(p.cutoff());
        for (&k, comp) in &self.components {
            for (&d, part) in &parts {
                if d + k <= grade_cap {
                    out.add_assign(&comp.apply(part)?);
                }
            }
        }
        Ok(out)
    }
}

/// Builds the graded constraint operator of a model. For the two named
/// models the components are expanded into explicit node combinations; for
/// the general monomial family they stay as one-body components and run
/// through the fermion engine.
pub fn build_w_operator(model: Model) -> Result<GradedOperator> {
    let r = model.constraint_generator()?;
    let parts = r.grade_parts()?;
    let mut components = BTreeMap::new();
    match model {
        Model::Kw | Model::Bgw => {
            for (s, part) in parts {
                components.insert(s, WComponent::Nodes(node_decomposition(&part)?));
            }
        }
        Model::Gkm(_) => {
            for (s, part) in parts {
                components.insert(s, WComponent::OneBody(part));
            }
        }
    }
    Ok(GradedOperator { components })
}

impl Model {
    /// The grade-raising generator of the model's single W-constraint, with
    /// the `h`-grading normalized away where it appears.
    pub fn constraint_generator(&self) -> Result<DiffOp> {
        match self {
            Model::Kw => Ok(gkm_ops(1)?.r),
            Model::Gkm(n) => Ok(gkm_ops(*n)?.r),
            Model::Bgw => bgw_ops().r.normalize_h_grading(),
        }
    }
}
