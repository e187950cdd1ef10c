//! Schur polynomials in the weighted variables and basis conversion.
//!
//! Throughout the crate the variable `qk` plays the role of the `k`-th power
//! sum. Schur polynomials are produced by two routes that share no code: the
//! Jacobi-Trudi determinant over Newton's complete homogeneous generators
//! ([`schur_poly`]) and the character (rim-hook) expansion
//! ([`schur_poly_char`]). The tests pin the routes against each other; the
//! basis conversions use the character route, which stays cheap at high
//! grade where the determinant sweep does not.
//!
//! [`to_schur_basis`] reads Schur coordinates off through the standard
//! inner product in which the power sums are orthogonal with norm `z_mu`:
//! the coordinate of a partition is the character-weighted sum of monomial
//! coefficients. Character tables are built once per grade by rim-hook
//! removal and cached process-wide; everything stays in integer arithmetic.

use crate::error::{Error, Result};
use crate::parampoly::ParamPoly;
use crate::partition::Partition;
use crate::qpoly::QPolynomial;
use crate::scalar::{rat, Rat};
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// Generators `h_0 .. h_max` with series `exp(sum_k q_k z^k / k)`, via
/// Newton's recurrence `n h_n = sum_k q_k h_{n-k}`.
fn complete_homogeneous(max: u32, cutoff: u32) -> Result<Vec<QPolynomial>> {
    let mut h = vec![QPolynomial::one(cutoff)];
    for n in 1..=max {
        let mut acc = QPolynomial::zero(cutoff);
        for k in 1..=n {
            acc.add_assign(&h[(n - k) as usize].mul_var(k)?);
        }
        h.push(acc.scale(&rat(1, n as i64)));
    }
    Ok(h)
}

/// Schur polynomial of a partition, by the Jacobi-Trudi determinant
/// `det(h_{lambda_i - i + j})`. The determinant is evaluated with a
/// subset-of-columns sweep so only `2^len` partial products are formed.
pub fn schur_poly(lambda: &Partition, cutoff: u32) -> Result<QPolynomial> {
    let l = lambda.len();
    if l == 0 {
        return Ok(QPolynomial::one(cutoff));
    }
    if l > 20 {
        return Err(Error::InvalidArgument(format!(
            "partition with {l} rows is beyond the determinant sweep"
        )));
    }
    let max_entry = lambda.part(1) + l as u32 - 1;
    let h = complete_homogeneous(max_entry, cutoff)?;
    let entry = |i: usize, j: usize| -> Option<&QPolynomial> {
        let idx = lambda.part(i + 1) as i64 - (i as i64 + 1) + (j as i64 + 1);
        if idx < 0 {
            None
        } else {
            Some(&h[idx as usize])
        }
    };
    // states[mask] = signed sum over ways to fill the first popcount(mask)
    // rows using exactly the columns in `mask`.
    let mut states: Vec<Option<QPolynomial>> = vec![None; 1usize << l];
    states[0] = Some(QPolynomial::one(cutoff));
    for mask in 0..(1usize << l) {
        let Some(acc) = states[mask].take() else { continue };
        let row = mask.count_ones() as usize;
        if row == l {
            states[mask] = Some(acc);
            continue;
        }
        for j in 0..l {
            if mask & (1 << j) != 0 {
                continue;
            }
            let Some(e) = entry(row, j) else { continue };
            // Parity: columns already used that are larger than j.
            let higher = (mask >> (j + 1)).count_ones();
            let mut new = acc.mul(e);
            if higher % 2 == 1 {
                new = new.neg();
            }
            let slot = &mut states[mask | (1 << j)];
            match slot {
                Some(s) => s.add_assign(&new),
                None => *slot = Some(new),
            }
        }
    }
    Ok(states[(1usize << l) - 1].take().unwrap_or_else(|| QPolynomial::zero(cutoff)))
}

/// Process-wide cache of Schur polynomials keyed by partition and cutoff.
pub fn schur_poly_cached(lambda: &Partition, cutoff: u32) -> Result<Arc<QPolynomial>> {
    static CACHE: OnceLock<Mutex<HashMap<(Partition, u32), Arc<QPolynomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (lambda.clone(), cutoff);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let computed = Arc::new(schur_poly(lambda, cutoff)?);
    cache.lock().unwrap().insert(key, computed.clone());
    Ok(computed)
}

/// Schur polynomial by the character expansion
/// `s_lambda = sum_mu chi^lambda(mu) / z_mu * q_mu`, one term per cycle
/// type of the grade. Independent of the determinant route above.
pub fn schur_poly_char(lambda: &Partition, cutoff: u32) -> Result<QPolynomial> {
    let n = lambda.weight();
    if n == 0 {
        return Ok(QPolynomial::one(cutoff));
    }
    let table = char_table(n);
    let j = table
        .shapes
        .iter()
        .position(|s| s == lambda)
        .expect("every shape of the grade is in its character table");
    let mut out = QPolynomial::zero(cutoff);
    for (i, mu) in table.classes.iter().enumerate() {
        let chi = table.values[j][i];
        if chi == 0 {
            continue;
        }
        out.add_term(
            mu.to_monomial(),
            ParamPoly::constant(rat(chi, 1) / z_order(mu)),
        )?;
    }
    Ok(out)
}

/// Process-wide cache for the character route, keyed like
/// [`schur_poly_cached`].
pub fn schur_poly_char_cached(lambda: &Partition, cutoff: u32) -> Result<Arc<QPolynomial>> {
    static CACHE: OnceLock<Mutex<HashMap<(Partition, u32), Arc<QPolynomial>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (lambda.clone(), cutoff);
    if let Some(hit) = cache.lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let computed = Arc::new(schur_poly_char(lambda, cutoff)?);
    cache.lock().unwrap().insert(key, computed.clone());
    Ok(computed)
}

/// `z_mu = prod k^{m_k} m_k!`, the symmetrizer order of a cycle type.
pub(crate) fn z_order(mu: &Partition) -> Rat {
    let mut z = rat(1, 1);
    for (k, m) in mu.multiplicities() {
        for i in 1..=m {
            z *= rat(k as i64 * i as i64, 1);
        }
    }
    z
}

/// Symmetric-group character value by repeated rim-hook (border strip)
/// removal, working on first-column hook coordinates `lambda_i + len - i`.
pub(crate) fn character(beta: &[i64], mu: &[u32]) -> i64 {
    let Some((&r, rest)) = mu.split_first() else { return 1 };
    let r = r as i64;
    let mut total = 0;
    for (idx, &b) in beta.iter().enumerate() {
        if b >= r && !beta.contains(&(b - r)) {
            let between = beta.iter().filter(|&&x| x > b - r && x < b).count();
            let sign = if between % 2 == 0 { 1 } else { -1 };
            let mut next = beta.to_vec();
            next[idx] = b - r;
            total += sign * character(&next, rest);
        }
    }
    total
}

/// Hook coordinates of a partition (independent of the padding length).
fn beta_coords(lambda: &Partition) -> Vec<i64> {
    let l = lambda.len();
    (0..l)
        .map(|i| lambda.part(i + 1) as i64 + l as i64 - 1 - i as i64)
        .collect()
}

/// Character table of one grade: `table[j][i]` is the character of the
/// `j`-th partition shape at the `i`-th cycle type, with both indexed by
/// [`Partition::all`] order.
struct CharTable {
    classes: Vec<Partition>,
    shapes: Vec<Partition>,
    values: Vec<Vec<i64>>,
}

fn char_table(d: u32) -> Arc<CharTable> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CharTable>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&d) {
        return hit.clone();
    }
    let classes = Partition::all(d);
    let shapes = classes.clone();
    let values: Vec<Vec<i64>> = shapes
        .iter()
        .map(|lam| {
            let beta = beta_coords(lam);
            classes.iter().map(|mu| character(&beta, mu.parts())).collect()
        })
        .collect();
    let table = Arc::new(CharTable { classes, shapes, values });
    cache.lock().unwrap().insert(d, table.clone());
    table
}

/// Expands a polynomial over Schur polynomials, grade by grade. The
/// coordinate of shape `lambda` is `sum_mu (coeff of q_mu) chi^lambda(mu)`,
/// the inner product against the Schur polynomial in the pairing where the
/// `q_mu` are orthogonal with norms `z_mu`.
pub fn to_schur_basis(p: &QPolynomial) -> Result<Vec<(Partition, ParamPoly)>> {
    let mut out: Vec<(Partition, ParamPoly)> = Vec::new();
    for (d, part) in p.grade_parts() {
        let table = char_table(d);
        let coeffs: Vec<ParamPoly> = table
            .classes
            .iter()
            .map(|mu| part.coeff(&mu.to_monomial()))
            .collect();
        for (j, lam) in table.shapes.iter().enumerate() {
            let mut c = ParamPoly::zero();
            for (i, v) in coeffs.iter().enumerate() {
                let chi = table.values[j][i];
                if chi != 0 && !v.is_zero() {
                    c += &v.scale(&rat(chi, 1));
                }
            }
            if !c.is_zero() {
                out.push((lam.clone(), c));
            }
        }
    }
    Ok(out)
}

/// Rebuilds a polynomial from Schur coordinates.
pub fn from_schur_basis(
    terms: &[(Partition, ParamPoly)],
    cutoff: u32,
) -> Result<QPolynomial> {
    let mut out = QPolynomial::zero(cutoff);
    for (lam, c) in terms {
        out.add_assign(&schur_poly_char_cached(lam, cutoff)?.scale_param(c));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly::{monomials_of_grade, QMonomial};

    #[test]
    fn jacobi_trudi_matches_rim_hook_expansion() {
        for n in 0..=8 {
            for lam in Partition::all(n) {
                assert_eq!(
                    schur_poly(&lam, n.max(1)).unwrap(),
                    schur_poly_char(&lam, n.max(1)).unwrap(),
                    "partition {lam}"
                );
            }
        }
    }

    #[test]
    fn small_schur_polynomials_are_the_classical_ones() {
        let expect = |lam: &[u32], s: &str| {
            let got = schur_poly(&Partition::new(lam.to_vec()), 3).unwrap();
            assert_eq!(format!("{got}"), s, "partition {lam:?}");
        };
        expect(&[], "1");
        expect(&[1], "q1");
        expect(&[2], "1/2*q1^2 + 1/2*q2");
        expect(&[1, 1], "1/2*q1^2 - 1/2*q2");
        expect(&[3], "1/2*q1*q2 + 1/6*q1^3 + 1/3*q3");
        expect(&[2, 1], "1/3*q1^3 - 1/3*q3");
        expect(&[1, 1, 1], "-1/2*q1*q2 + 1/6*q1^3 + 1/3*q3");
    }

    #[test]
    fn schur_coordinates_of_a_schur_polynomial_are_a_delta() {
        for n in 0..=6u32 {
            for lam in Partition::all(n) {
                let p = schur_poly(&lam, n.max(1)).unwrap();
                let coords = to_schur_basis(&p).unwrap();
                assert_eq!(coords.len(), 1);
                assert_eq!(coords[0].0, lam);
                assert_eq!(coords[0].1, ParamPoly::one());
            }
        }
    }

    #[test]
    fn basis_round_trip_preserves_random_polynomials() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(crate::test_seed());
        for _ in 0..10 {
            let mut p = QPolynomial::zero(7);
            for g in 1..=6u32 {
                for m in monomials_of_grade(g, g, false) {
                    if rng.gen_range(0..3) == 0 {
                        let c = ParamPoly::term(
                            rng.gen_range(0..2u32),
                            0,
                            rat(rng.gen_range(-5..6i64), rng.gen_range(1..4i64)),
                        );
                        p.add_term(m.clone(), c).unwrap();
                    }
                }
            }
            let coords = to_schur_basis(&p).unwrap();
            let back = from_schur_basis(&coords, 7).unwrap();
            assert_eq!(back, p);
        }
    }

    #[test]
    fn power_sum_expands_into_alternating_hooks() {
        // q_k = sum_j (-1)^j s_{(k-j, 1^j)}.
        for k in 1..=6u32 {
            let mut p = QPolynomial::zero(k);
            p.add_term(QMonomial::var(k), ParamPoly::one()).unwrap();
            let mut coords = to_schur_basis(&p).unwrap();
            coords.sort_by(|a, b| a.0.cmp(&b.0));
            let mut expected: Vec<(Partition, ParamPoly)> = (0..k)
                .map(|j| {
                    let mut parts = vec![k - j];
                    parts.extend(std::iter::repeat(1).take(j as usize));
                    (
                        Partition::new(parts),
                        ParamPoly::constant(rat(if j % 2 == 0 { 1 } else { -1 }, 1)),
                    )
                })
                .collect();
            expected.sort_by(|a, b| a.0.cmp(&b.0));
            assert_eq!(coords, expected, "power sum {k}");
        }
    }
}
