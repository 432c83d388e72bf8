//! Curve classes on the blown-up plane and the combinatorics behind the recursions.
//!
//! A class is written (d, α) = dH − Σ aᵢEᵢ. This module owns the numerical
//! invariants of a class (expected dimension, arithmetic genus), the binomial
//! coefficient with the out-of-range-is-zero convention, the canonical
//! normalization used for memoization, and enumeration of the splitting set
//! ⊢(d, α) that the recursion relations sum over.

use std::fmt;

use num_bigint::BigInt;

/// Exact arbitrary-precision signed integer used for every curve count.
pub type BigCount = BigInt;

/// A homology class (d, α) = dH − Σ aᵢEᵢ on the blow-up of the plane at
/// r = α.len() points. Entries of α may be any integer; negative entries are
/// legal inputs and map to known values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CurveClass {
    pub d: i64,
    pub alpha: Vec<i64>,
}

impl CurveClass {
    pub fn new(d: i64, alpha: Vec<i64>) -> Self {
        CurveClass { d, alpha }
    }

    /// Number of blown-up points this class lives on.
    pub fn r(&self) -> usize {
        self.alpha.len()
    }

    /// |α| = Σ aᵢ.
    pub fn total_multiplicity(&self) -> i64 {
        self.alpha.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.d == 0 && self.alpha.iter().all(|&a| a == 0)
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}; ", self.d)?;
        for (i, a) in self.alpha.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

/// Expected dimension n_{d,α} = 3d − |α| − 1 of the moduli space of the class.
pub fn expected_dim(c: &CurveClass) -> i64 {
    3 * c.d - c.total_multiplicity() - 1
}

/// Arithmetic genus (d−1)(d−2)/2 − Σ aᵢ(aᵢ−1)/2. Always an integer.
pub fn arithmetic_genus(c: &CurveClass) -> i64 {
    let base = (c.d - 1) * (c.d - 2) / 2;
    let drop: i64 = c.alpha.iter().map(|&a| a * (a - 1) / 2).sum();
    base - drop
}

/// Binomial coefficient with the convention that out-of-range values are zero:
/// C(p, q) = 0 if q < 0 or p < q.
pub fn binomial(p: i64, q: i64) -> BigCount {
    BigCount::from(binomial_i128(p, q))
}

/// Same convention as [`binomial`], in machine arithmetic. The recursions only
/// need p ≤ 3d − 1, which stays far below the i128 range for any feasible run.
pub(crate) fn binomial_i128(p: i64, q: i64) -> i128 {
    if q < 0 || p < q {
        return 0;
    }
    let q = q.min(p - q);
    let mut acc: i128 = 1;
    for i in 1..=q {
        acc = acc * (p - q + i) as i128 / i as i128;
    }
    acc
}

/// Canonical memoization key: d > 0 and a descending multiset of entries ≥ 2.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonKey {
    pub d: i64,
    pub alpha: Vec<i64>,
}

impl CanonKey {
    pub fn class(&self) -> CurveClass {
        CurveClass::new(self.d, self.alpha.clone())
    }
}

/// Result of normalizing a class with (P1)–(P5): either the value is already
/// known, or a canonical key remains to be computed recursively.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CanonResult {
    KnownValue(BigCount),
    Key(CanonKey),
}

/// Normalize (d, α) with the structural properties of the invariants:
/// d < 0 vanishes, d = 0 is pinned by (P1), negative multiplicities vanish
/// for d > 0 (P2), zeros and ones are dropped (P4, P5), and the remainder is
/// sorted descending (P3). Callers must ensure the expected dimension is ≥ 0;
/// dropping a 1 from such a class is always valid because the reduced class
/// has strictly positive expected dimension.
pub fn canonicalize(c: &CurveClass) -> CanonResult {
    canonical_from_parts(c.d, &c.alpha)
}

/// Allocation-light form of [`canonicalize`] used in the recursion hot path.
pub(crate) fn canonical_from_parts(d: i64, alpha: &[i64]) -> CanonResult {
    if d < 0 {
        return CanonResult::KnownValue(BigCount::from(0));
    }
    if d == 0 {
        // (P1): only the exceptional classes −[i] survive in degree 0.
        let minus_ones = alpha.iter().filter(|&&a| a == -1).count();
        let others = alpha.iter().filter(|&&a| a != -1 && a != 0).count();
        let v = if minus_ones == 1 && others == 0 { 1 } else { 0 };
        return CanonResult::KnownValue(BigCount::from(v));
    }
    if alpha.iter().any(|&a| a < 0) {
        return CanonResult::KnownValue(BigCount::from(0));
    }
    let mut key: Vec<i64> = alpha.iter().copied().filter(|&a| a >= 2).collect();
    key.sort_unstable_by(|a, b| b.cmp(a));
    if d == 1 && key.is_empty() {
        return CanonResult::KnownValue(BigCount::from(1));
    }
    CanonResult::Key(CanonKey { d, alpha: key })
}

/// One term ((d₁, β), (d₂, γ)) of the splitting set ⊢(d, α).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SplitPair {
    pub left: CurveClass,
    pub right: CurveClass,
}

/// Enumerate ⊢(d, α): ordered pairs of nonzero classes summing to (d, α) with
/// d₁, d₂ ≥ 0, both expected dimensions ≥ 0, β ≤ d₁, and γ ≤ d₂. With
/// `positive_degrees_only` the subset with d₁, d₂ > 0 is produced. Pairs come
/// out in lexicographic order of (d₁, β).
///
/// Terms with some βₖ < 0 (or γₖ < 0) on a positive-degree side contribute a
/// zero factor to every recursion sum, so this enumeration prunes them. The
/// literal, unpruned set is available from [`splits_unpruned`].
pub fn splits(c: &CurveClass, positive_degrees_only: bool) -> Vec<SplitPair> {
    collect_splits(c, positive_degrees_only, true)
}

/// The splitting set with no vanishing-term pruning: the only bounds are the
/// ones in the definition itself. Cross-check oracle for [`splits`].
pub fn splits_unpruned(c: &CurveClass, positive_degrees_only: bool) -> Vec<SplitPair> {
    collect_splits(c, positive_degrees_only, false)
}

fn collect_splits(c: &CurveClass, positive_only: bool, pruned: bool) -> Vec<SplitPair> {
    let mut out = Vec::new();
    for_each_split(c, positive_only, pruned, &mut |d1, beta, d2, gamma| {
        out.push(SplitPair {
            left: CurveClass::new(d1, beta.to_vec()),
            right: CurveClass::new(d2, gamma.to_vec()),
        });
    });
    out
}

/// Walk the splitting set without materializing it. The callback receives
/// (d₁, β, d₂, γ) with β, γ in scratch buffers valid only for the call.
pub(crate) fn for_each_split<F>(c: &CurveClass, positive_only: bool, pruned: bool, f: &mut F)
where
    F: FnMut(i64, &[i64], i64, &[i64]),
{
    let d = c.d;
    if d < 0 {
        return;
    }
    let r = c.alpha.len();
    let total = c.total_multiplicity();
    let mut beta = vec![0i64; r];
    let mut gamma = vec![0i64; r];
    for d1 in 0..=d {
        let d2 = d - d1;
        if positive_only && (d1 == 0 || d2 == 0) {
            continue;
        }
        // Per-component bounds: β ≤ d₁ and γ ≤ d₂ give aₖ − d₂ ≤ bₖ ≤ d₁;
        // pruning tightens to 0 ≤ bₖ ≤ aₖ on positive-degree sides.
        let mut lo = vec![0i64; r];
        let mut hi = vec![0i64; r];
        let mut feasible = true;
        for k in 0..r {
            let a = c.alpha[k];
            let (l, h) = if pruned && d1 > 0 && d2 > 0 {
                (0.max(a - d2), a.min(d1))
            } else {
                (a - d2, d1)
            };
            if l > h {
                feasible = false;
                break;
            }
            lo[k] = l;
            hi[k] = h;
        }
        if !feasible {
            continue;
        }
        // Suffix sum bounds for pruning the expected-dimension conditions.
        let mut min_suf = vec![0i64; r + 1];
        let mut max_suf = vec![0i64; r + 1];
        for k in (0..r).rev() {
            min_suf[k] = min_suf[k + 1] + lo[k];
            max_suf[k] = max_suf[k + 1] + hi[k];
        }
        let sum_hi = 3 * d1 - 1; // n_{d₁,β} ≥ 0
        let sum_lo = total - (3 * d2 - 1); // n_{d₂,γ} ≥ 0
        enumerate(
            c, d1, d2, 0, 0, sum_lo, sum_hi, &lo, &hi, &min_suf, &max_suf, &mut beta, &mut gamma,
            f,
        );
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate<F>(
    c: &CurveClass,
    d1: i64,
    d2: i64,
    k: usize,
    sum: i64,
    sum_lo: i64,
    sum_hi: i64,
    lo: &[i64],
    hi: &[i64],
    min_suf: &[i64],
    max_suf: &[i64],
    beta: &mut [i64],
    gamma: &mut [i64],
    f: &mut F,
) where
    F: FnMut(i64, &[i64], i64, &[i64]),
{
    if sum + min_suf[k] > sum_hi || sum + max_suf[k] < sum_lo {
        return;
    }
    if k == c.alpha.len() {
        let left_zero = d1 == 0 && beta.iter().all(|&b| b == 0);
        let right_zero = d2 == 0 && gamma.iter().all(|&g| g == 0);
        if left_zero || right_zero {
            return;
        }
        f(d1, beta, d2, gamma);
        return;
    }
    for b in lo[k]..=hi[k] {
        beta[k] = b;
        gamma[k] = c.alpha[k] - b;
        enumerate(
            c,
            d1,
            d2,
            k + 1,
            sum + b,
            sum_lo,
            sum_hi,
            lo,
            hi,
            min_suf,
            max_suf,
            beta,
            gamma,
            f,
        );
    }
}
