//! Cremona transformation on curve classes and the enumerativity classifier.
//!
//! The quadratic transformation based at three of the blown-up points acts on
//! a class (d, α) by a basis change that preserves the invariant. Iterating
//! it at the three largest multiplicities reduces many classes to ones that
//! are known to be enumerative.

use crate::lattice::{expected_dim, CurveClass};

/// Why a class is known to be enumerative. `reason` is the first rule, in
/// declaration order, that fires for the class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumReason {
    /// Expected dimension is positive.
    PositiveDim,
    /// Some multiplicity is 1 or 2.
    SmallMultiplicity,
    /// At most eight nonzero multiplicities.
    AtMostEight,
    /// Some class in the Cremona reduction chain satisfies one of the above.
    CremonaOrbit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnumStatus {
    Enumerative(EnumReason),
    Unknown,
}

/// Apply the Cremona transformation based at the points indexed by
/// `(i, j, k)` (zero-based, distinct). With (a₁, a₂, a₃) the multiplicities
/// at those positions, the degree becomes 2d − a₁ − a₂ − a₃ and the three
/// entries become (d − a₂ − a₃, d − a₁ − a₃, d − a₁ − a₂). Self-inverse.
///
/// Panics if the indices are out of range or not distinct.
pub fn cremona_transform(c: &CurveClass, i: usize, j: usize, k: usize) -> CurveClass {
    assert!(i != j && j != k && i != k, "Cremona indices must be distinct");
    let (a1, a2, a3) = (c.alpha[i], c.alpha[j], c.alpha[k]);
    let d = c.d;
    let mut alpha = c.alpha.clone();
    alpha[i] = d - a2 - a3;
    alpha[j] = d - a1 - a3;
    alpha[k] = d - a1 - a2;
    CurveClass::new(2 * d - a1 - a2 - a3, alpha)
}

fn three_largest(alpha: &[i64]) -> [usize; 3] {
    let mut idx: Vec<usize> = (0..alpha.len()).collect();
    idx.sort_by_key(|&i| (std::cmp::Reverse(alpha[i]), i));
    [idx[0], idx[1], idx[2]]
}

/// Drop 0- and 1-entries (both leave the invariant unchanged for classes of
/// non-negative expected dimension) and sort descending.
fn normalized(c: &CurveClass) -> CurveClass {
    let mut alpha: Vec<i64> = c.alpha.iter().copied().filter(|&a| a >= 2).collect();
    alpha.sort_unstable_by(|a, b| b.cmp(a));
    CurveClass::new(c.d, alpha)
}

/// The Cremona reduction chain starting from `c`: each step transforms at the
/// three largest multiplicities (after padding α with zeros to length 3) as
/// long as their sum exceeds d and the result keeps d > 0 and α ≥ 0. The
/// degree strictly decreases each step, so the chain is finite. Each
/// representative is reported normalized; the starting class is not included.
pub fn cremona_chain(c: &CurveClass) -> Vec<CurveClass> {
    assert!(c.d > 0 && c.alpha.iter().all(|&a| a >= 0));
    let mut chain = Vec::new();
    let mut cur = normalized(c);
    loop {
        let mut alpha = cur.alpha.clone();
        while alpha.len() < 3 {
            alpha.push(0);
        }
        let padded = CurveClass::new(cur.d, alpha);
        let [i, j, k] = three_largest(&padded.alpha);
        let triple = padded.alpha[i] + padded.alpha[j] + padded.alpha[k];
        if triple <= padded.d {
            return chain;
        }
        let next = cremona_transform(&padded, i, j, k);
        if next.d <= 0 || next.alpha.iter().any(|&a| a < 0) {
            return chain;
        }
        cur = normalized(&next);
        chain.push(cur.clone());
    }
}

/// The last class of the reduction chain (or `c` itself, sorted descending
/// with zeros dropped, when no step applies).
pub fn cremona_reduce(c: &CurveClass) -> CurveClass {
    cremona_chain(c).pop().unwrap_or_else(|| normalized(c))
}

fn direct_reason(c: &CurveClass) -> Option<EnumReason> {
    if expected_dim(c) > 0 {
        return Some(EnumReason::PositiveDim);
    }
    if c.alpha.iter().any(|&a| a == 1 || a == 2) {
        return Some(EnumReason::SmallMultiplicity);
    }
    if c.alpha.iter().filter(|&&a| a != 0).count() <= 8 {
        return Some(EnumReason::AtMostEight);
    }
    None
}

/// Decide whether N_{d,α} is known to count distinct curves without
/// multiplicities. Requires d > 0, α ≥ 0, and expected dimension ≥ 0.
pub fn enumerativity(c: &CurveClass) -> EnumStatus {
    assert!(c.d > 0 && c.alpha.iter().all(|&a| a >= 0) && expected_dim(c) >= 0);
    if let Some(reason) = direct_reason(c) {
        return EnumStatus::Enumerative(reason);
    }
    for rep in cremona_chain(c) {
        if direct_reason(&rep).is_some() {
            return EnumStatus::Enumerative(EnumReason::CremonaOrbit);
        }
    }
    EnumStatus::Unknown
}
