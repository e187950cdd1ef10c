//! Integer partitions.
//!
//! Partitions index both the monomial basis of the boson state space (parts =
//! variable indices with multiplicity) and the natural basis of the fermion
//! side (charge-zero occupation states). The two readings are converted with
//! [`Partition::from_monomial`] and [`Partition::to_monomial`].

use crate::qpoly::{monomials_of_grade, QMonomial};
use std::fmt;

/// Weakly decreasing positive parts; the empty partition is allowed.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    /// Builds from any bag of parts: zeros are dropped, order is fixed.
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition::default()
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    /// 1-based part access; 0 beyond the length.
    pub fn part(&self, i: usize) -> u32 {
        if i >= 1 && i <= self.0.len() {
            self.0[i - 1]
        } else {
            0
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Sum of the parts.
    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn odd_parts_only(&self) -> bool {
        self.0.iter().all(|p| p % 2 == 1)
    }

    /// Multiplicity of each distinct part, largest part first.
    pub fn multiplicities(&self) -> Vec<(u32, u32)> {
        let mut out: Vec<(u32, u32)> = Vec::new();
        for &p in &self.0 {
            match out.last_mut() {
                Some((q, m)) if *q == p => *m += 1,
                _ => out.push((p, 1)),
            }
        }
        out
    }

    /// Reads a monomial as a partition: each variable index becomes a part
    /// with the exponent as its multiplicity, so `q1^3*q3` gives `[3,1,1,1]`.
    pub fn from_monomial(m: &QMonomial) -> Self {
        let mut parts = Vec::new();
        for (&k, &e) in m.iter() {
            for _ in 0..e {
                parts.push(k);
            }
        }
        Partition::new(parts)
    }

    /// Inverse of [`Partition::from_monomial`].
    pub fn to_monomial(&self) -> QMonomial {
        QMonomial::from_pairs(self.multiplicities())
    }

    /// All partitions of `n`, in a fixed canonical order.
    pub fn all(n: u32) -> Vec<Partition> {
        monomials_of_grade(n, n.max(1), false)
            .iter()
            .map(Partition::from_monomial)
            .collect()
    }

    /// All partitions of every weight `0..=n`, ordered by (weight, shape).
    pub fn all_up_to(n: u32) -> Vec<Partition> {
        (0..=n).flat_map(Partition::all).collect()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_normalizes() {
        let p = Partition::new(vec![1, 0, 3, 1]);
        assert_eq!(p.parts(), &[3, 1, 1]);
        assert_eq!(p.weight(), 5);
        assert_eq!(p.part(1), 3);
        assert_eq!(p.part(4), 0);
        assert_eq!(p.to_string(), "[3,1,1]");
        assert_eq!(Partition::empty().to_string(), "[]");
    }

    #[test]
    fn counts_match_the_partition_function() {
        // p(0..10) = 1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42.
        let expected = [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42];
        for (n, &e) in expected.iter().enumerate() {
            assert_eq!(Partition::all(n as u32).len(), e, "p({n})");
        }
        assert_eq!(Partition::all_up_to(4).len(), 1 + 1 + 2 + 3 + 5);
    }

    #[test]
    fn monomial_round_trip() {
        for la in Partition::all_up_to(7) {
            let m = la.to_monomial();
            assert_eq!(Partition::from_monomial(&m), la);
            assert_eq!(m.grade(), la.weight());
        }
    }

    #[test]
    fn multiplicities_group_parts() {
        let p = Partition::new(vec![4, 4, 2, 1, 1, 1]);
        assert_eq!(p.multiplicities(), vec![(4, 2), (2, 1), (1, 3)]);
        assert!(!p.odd_parts_only());
        assert!(Partition::new(vec![5, 3, 3, 1]).odd_parts_only());
    }
}
