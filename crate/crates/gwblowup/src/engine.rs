//! Memoized recursive evaluation of the invariants N_{d,α}.
//!
//! Classes with expected dimension ≥ 3 are evaluated with the degree-lowering
//! relation R(m); classes with 0 ≤ n < 3 are solved with a multiplicity
//! relation R(i) at a pivot index, which raises the expected dimension by one
//! per application until R(m) applies. All arithmetic is exact; the division
//! step of R(i) is checked and a remainder is reported as a hard consistency
//! failure, never rounded.

use std::collections::HashMap;
use std::sync::RwLock;

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::lattice::{
    arithmetic_genus, binomial_i128, canonical_from_parts, expected_dim, for_each_split, BigCount,
    CanonKey, CanonResult, CurveClass,
};

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("undefined invariant: expected dimension is negative for {0}")]
    UndefinedInvariant(CurveClass),
    #[error("recursion consistency violation: non-exact division for {0}")]
    ConsistencyViolation(CurveClass),
}

/// Which index R(i) is solved at when a class has expected dimension < 3.
/// Canonical keys are stored descending, so both rules pick the same index
/// there; they can differ on raw (unsorted) classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PivotRule {
    LargestEntry,
    FirstEntry,
}

#[derive(Debug, Clone, Copy)]
pub struct EngineConfig {
    /// Apply the genus / pairwise-multiplicity / oversize vanishing rules
    /// before recursing. Computed values are identical either way.
    pub use_vanishing_shortcuts: bool,
    pub pivot_rule: PivotRule,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { use_vanishing_shortcuts: true, pivot_rule: PivotRule::LargestEntry }
    }
}

/// Map from canonical key to computed invariant. Reads are concurrent; writes
/// are atomic per key, and racing computations of the same key are harmless
/// because every route produces the identical value.
#[derive(Debug, Default)]
pub struct MemoStore {
    map: RwLock<HashMap<CanonKey, BigCount>>,
}

impl MemoStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, key: &CanonKey) -> Option<BigCount> {
        self.map.read().unwrap().get(key).cloned()
    }

    pub fn insert(&self, key: CanonKey, value: BigCount) {
        self.map.write().unwrap().insert(key, value);
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Snapshot of the current contents, in no particular order.
    pub fn entries(&self) -> Vec<(CanonKey, BigCount)> {
        self.map.read().unwrap().iter().map(|(k, v)| (k.clone(), v.clone())).collect()
    }
}

/// If one of the vanishing rules applies to (d, α) with d > 0, α ≥ 0, n ≥ 0,
/// returns Some(0): negative arithmetic genus, a pair aᵢ + aⱼ > d for the
/// non-exceptional classes (everything but (1,(1,1))), or a single aᵢ > d
/// (no effective class exceeds its degree).
pub fn vanishing_shortcut(c: &CurveClass) -> Option<BigCount> {
    if arithmetic_genus(c) < 0 {
        return Some(BigCount::zero());
    }
    let mut top = [i64::MIN, i64::MIN];
    for &a in &c.alpha {
        if a > top[0] {
            top[1] = top[0];
            top[0] = a;
        } else if a > top[1] {
            top[1] = a;
        }
    }
    if c.r() >= 2 && top[0] + top[1] > c.d {
        let nonzero: Vec<i64> = c.alpha.iter().copied().filter(|&a| a != 0).collect();
        let is_line_through_two = c.d == 1 && nonzero == [1, 1];
        if !is_line_through_two {
            return Some(BigCount::zero());
        }
    }
    if c.r() >= 1 && top[0] > c.d {
        return Some(BigCount::zero());
    }
    None
}

pub struct Engine {
    store: MemoStore,
    cfg: EngineConfig,
}

impl Default for Engine {
    fn default() -> Self {
        Engine::new(EngineConfig::default())
    }
}

impl Engine {
    pub fn new(cfg: EngineConfig) -> Self {
        Engine { store: MemoStore::new(), cfg }
    }

    pub fn with_store(store: MemoStore, cfg: EngineConfig) -> Self {
        Engine { store, cfg }
    }

    pub fn store(&self) -> &MemoStore {
        &self.store
    }

    pub fn into_store(self) -> MemoStore {
        self.store
    }

    pub fn config(&self) -> EngineConfig {
        self.cfg
    }

    /// The Gromov-Witten invariant N_{d,α}. Errors if the expected dimension
    /// is negative (the symbol is undefined there).
    pub fn invariant(&self, c: &CurveClass) -> Result<BigCount, EngineError> {
        if expected_dim(c) < 0 {
            return Err(EngineError::UndefinedInvariant(c.clone()));
        }
        self.eval_parts(c.d, &c.alpha)
    }

    /// Evaluate N_{d,α} without canonicalizing the outermost class: the
    /// recursion relations are applied to α exactly as given. Inner calls
    /// normalize as usual. Sanity path for checking (P4)/(P5) as computations
    /// rather than as cache-key rewrites.
    pub fn invariant_raw(&self, c: &CurveClass) -> Result<BigCount, EngineError> {
        let n = expected_dim(c);
        if n < 0 {
            return Err(EngineError::UndefinedInvariant(c.clone()));
        }
        if c.d < 0 {
            return Ok(BigCount::zero());
        }
        if c.d == 0 {
            return match canonical_from_parts(0, &c.alpha) {
                CanonResult::KnownValue(v) => Ok(v),
                CanonResult::Key(_) => unreachable!("degree-0 classes always normalize"),
            };
        }
        if c.alpha.iter().any(|&a| a < 0) {
            return Ok(BigCount::zero());
        }
        if n >= 3 {
            return self.relation_m_rhs(c);
        }
        match self.pick_pivot(&c.alpha) {
            Some(p) => self.relation_i_solve(c, p),
            // Only (1, (0,…,0)) has n < 3 with no positive entry.
            None => Ok(BigCount::from(1)),
        }
    }

    fn pick_pivot(&self, alpha: &[i64]) -> Option<usize> {
        let idx = match self.cfg.pivot_rule {
            PivotRule::LargestEntry => alpha
                .iter()
                .enumerate()
                .max_by_key(|&(i, &a)| (a, std::cmp::Reverse(i)))
                .map(|(i, _)| i)?,
            PivotRule::FirstEntry => {
                if alpha.is_empty() {
                    return None;
                }
                0
            }
        };
        (alpha[idx] >= 1).then_some(idx)
    }

    fn eval_parts(&self, d: i64, alpha: &[i64]) -> Result<BigCount, EngineError> {
        match canonical_from_parts(d, alpha) {
            CanonResult::KnownValue(v) => Ok(v),
            CanonResult::Key(key) => self.eval_key(key),
        }
    }

    fn eval_key(&self, key: CanonKey) -> Result<BigCount, EngineError> {
        if let Some(v) = self.store.get(&key) {
            return Ok(v);
        }
        let c = key.class();
        let value = if self.cfg.use_vanishing_shortcuts {
            match vanishing_shortcut(&c) {
                Some(z) => z,
                None => self.eval_class(&c)?,
            }
        } else {
            self.eval_class(&c)?
        };
        self.store.insert(key, value.clone());
        Ok(value)
    }

    fn eval_class(&self, c: &CurveClass) -> Result<BigCount, EngineError> {
        if expected_dim(c) >= 3 {
            self.relation_m_rhs(c)
        } else {
            let pivot = self
                .pick_pivot(&c.alpha)
                .expect("canonical keys with n < 3 have an entry >= 2");
            self.relation_i_solve(c, pivot)
        }
    }

    /// Right side of relation R(m):
    /// Σ over ⊢(d,α), d₁,d₂ > 0 of
    /// N_{d₁,β} N_{d₂,γ} (d₁d₂ − β·γ) (d₁d₂ C(n−3, n₁−1) − d₁² C(n−3, n₁)).
    pub fn relation_m_rhs(&self, c: &CurveClass) -> Result<BigCount, EngineError> {
        let n = expected_dim(c);
        assert!(n >= 3, "R(m) requires expected dimension >= 3, got {n} for {c}");
        let mut acc = BigCount::zero();
        let mut err: Option<EngineError> = None;
        for_each_split(c, true, true, &mut |d1, beta, d2, gamma| {
            if err.is_some() {
                return;
            }
            let sum_b: i64 = beta.iter().sum();
            let n1 = 3 * d1 - sum_b - 1;
            let dot: i64 = beta.iter().zip(gamma).map(|(b, g)| b * g).sum();
            let coef = (d1 * d2 - dot) as i128
                * ((d1 * d2) as i128 * binomial_i128(n - 3, n1 - 1)
                    - (d1 * d1) as i128 * binomial_i128(n - 3, n1));
            if coef == 0 {
                return;
            }
            match self.product_term(d1, beta, d2, gamma) {
                Ok(Some(prod)) => acc += prod * BigCount::from(coef),
                Ok(None) => {}
                Err(e) => err = Some(e),
            }
        });
        match err {
            Some(e) => Err(e),
            None => Ok(acc),
        }
    }

    /// Solve relation R(i) at `pivot` for N_{d,α}:
    /// d²aᵢ N_{d,α} = (d² − (aᵢ−1)²) N_{d,α−[i]}
    ///   + Σ over ⊢(d,α−[i]), d₁,d₂ > 0 of
    ///     N_{d₁,β} N_{d₂,γ} (d₁d₂ − β·γ)(d₁d₂bᵢcᵢ − d₁²cᵢ²) C(n_{d,α}, n_{d₁,β}).
    /// The division by d²aᵢ must be exact.
    pub fn relation_i_solve(&self, c: &CurveClass, pivot: usize) -> Result<BigCount, EngineError> {
        let d = c.d;
        let a = c.alpha[pivot];
        let n = expected_dim(c);
        assert!(d > 0 && a >= 1 && n >= 0, "R(i) precondition violated for {c}");
        let mut reduced = c.alpha.clone();
        reduced[pivot] -= 1;
        let mut total =
            BigCount::from(d * d - (a - 1) * (a - 1)) * self.eval_parts(d, &reduced)?;
        let reduced_class = CurveClass::new(d, reduced);
        let mut err: Option<EngineError> = None;
        for_each_split(&reduced_class, true, true, &mut |d1, beta, d2, gamma| {
            if err.is_some() {
                return;
            }
            let bi = beta[pivot];
            let ci = gamma[pivot];
            let dot: i64 = beta.iter().zip(gamma).map(|(b, g)| b * g).sum();
            let sum_b: i64 = beta.iter().sum();
            let n1 = 3 * d1 - sum_b - 1;
            let coef = (d1 * d2 - dot) as i128
                * (d1 * d2 * bi * ci - d1 * d1 * ci * ci) as i128
                * binomial_i128(n, n1);
            if coef == 0 {
                return;
            }
            match self.product_term(d1, beta, d2, gamma) {
                Ok(Some(prod)) => total += prod * BigCount::from(coef),
                Ok(None) => {}
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let divisor = BigCount::from(d * d * a);
        let (q, rem) = total.div_rem(&divisor);
        if !rem.is_zero() {
            return Err(EngineError::ConsistencyViolation(c.clone()));
        }
        Ok(q)
    }

    fn product_term(
        &self,
        d1: i64,
        beta: &[i64],
        d2: i64,
        gamma: &[i64],
    ) -> Result<Option<BigCount>, EngineError> {
        let n1 = self.eval_parts(d1, beta)?;
        if n1.is_zero() {
            return Ok(None);
        }
        let n2 = self.eval_parts(d2, gamma)?;
        if n2.is_zero() {
            return Ok(None);
        }
        Ok(Some(n1 * n2))
    }
}
