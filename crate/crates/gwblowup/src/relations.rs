//! Independent verifier for the associativity relations of the quantum
//! product on the blow-up.
//!
//! The basis is T₀ = 1, T₁ (dual to H), T_{i+1} (dual to Eᵢ for i = 1..r),
//! and T_m the point class, with m = r + 2. For i,j,k,l in {1,…,m} the
//! relation reads
//!
//!   (Tᵢ·Tⱼ)Γ_{klm} − (Tₖ·Tⱼ)Γ_{ilm} + (Tₖ·Tₗ)Γ_{ijm} − (Tᵢ·Tₗ)Γ_{kjm}
//!     = Σ_{s=1}^{m−1} ε_s (Γ_{jks}Γ_{isl} − Γ_{ijs}Γ_{ksl}),
//!
//! where the Γ products convolve over splits of the class and of the
//! point-insertion count. Residuals are computed coefficient-by-coefficient
//! against any invariant source; for a correct engine they all vanish.

use std::fmt;

use num_traits::Zero;

use crate::engine::{Engine, EngineError};
use crate::lattice::{
    binomial_i128, canonical_from_parts, expected_dim, BigCount, CanonKey, CanonResult, CurveClass,
};

/// Supplier of invariant values for the verifier. Implemented by the engine;
/// test harnesses can wrap it to inject faults.
pub trait InvariantSource {
    fn value_of(&self, c: &CurveClass) -> Result<BigCount, EngineError>;
}

impl InvariantSource for Engine {
    fn value_of(&self, c: &CurveClass) -> Result<BigCount, EngineError> {
        self.invariant(c)
    }
}

/// Wraps a source and shifts the value of one canonical class by `delta`.
pub struct PerturbedSource<'a, S: InvariantSource> {
    inner: &'a S,
    target: CanonKey,
    delta: BigCount,
}

impl<'a, S: InvariantSource> PerturbedSource<'a, S> {
    pub fn new(inner: &'a S, target: CanonKey, delta: BigCount) -> Self {
        PerturbedSource { inner, target, delta }
    }
}

impl<S: InvariantSource> InvariantSource for PerturbedSource<'_, S> {
    fn value_of(&self, c: &CurveClass) -> Result<BigCount, EngineError> {
        let base = self.inner.value_of(c)?;
        match canonical_from_parts(c.d, &c.alpha) {
            CanonResult::Key(key) if key == self.target => Ok(base + &self.delta),
            _ => Ok(base),
        }
    }
}

/// One coefficient slot of the generating series: the class together with the
/// (normalized) power n of the point variable y_m.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub cls: CurveClass,
    pub n: i64,
}

impl Monomial {
    pub fn new(cls: CurveClass, n: i64) -> Self {
        assert!(n >= 0, "monomial point power must be non-negative");
        Monomial { cls, n }
    }
}

/// Intersection pairing of basis elements (indices 0..=m): (T₁·T₁) = 1,
/// (T_{i+1}·T_{j+1}) = −δᵢⱼ, (T₀·T_m) = 1, zero otherwise.
pub fn pairing(a: usize, b: usize, m: usize) -> i64 {
    assert!(a <= m && b <= m);
    if a == 1 && b == 1 {
        1
    } else if (2..m).contains(&a) && a == b {
        -1
    } else if (a == 0 && b == m) || (a == m && b == 0) {
        1
    } else {
        0
    }
}

/// Sign ε_s for s in 1..=r+1: +1 for T₁, −1 for the exceptional directions.
pub fn eps(s: usize) -> i64 {
    assert!(s >= 1);
    if s == 1 {
        1
    } else {
        -1
    }
}

/// q-exponent of the class along divisor direction `idx` in 1..=m−1:
/// idx = 1 gives d, idx = i+1 gives aᵢ.
fn dval(idx: usize, c: &CurveClass) -> i64 {
    if idx == 1 {
        c.d
    } else {
        c.alpha[idx - 2]
    }
}

fn class_in_series(c: &CurveClass) -> bool {
    !c.is_zero() && c.d >= 0 && c.alpha.iter().all(|&a| a <= c.d) && expected_dim(c) >= 0
}

/// Coefficient Γ_{ijk} of the potential at the given monomial: for indices in
/// {1,…,m} with t of them equal to m, returns N_{cls}·Π D over the non-point
/// indices when the class belongs to the series and its expected dimension is
/// mono.n + t, and 0 otherwise.
pub fn gamma_coeff(
    i: usize,
    j: usize,
    k: usize,
    mono: &Monomial,
    source: &dyn InvariantSource,
) -> Result<BigCount, EngineError> {
    let m = mono.cls.r() + 2;
    assert!(
        (1..=m).contains(&i) && (1..=m).contains(&j) && (1..=m).contains(&k),
        "basis indices must lie in 1..={m}"
    );
    assert!(!mono.cls.is_zero(), "the zero class has no series coefficient");
    let c = &mono.cls;
    let t = [i, j, k].iter().filter(|&&x| x == m).count() as i64;
    if !class_in_series(c) || expected_dim(c) != mono.n + t {
        return Ok(BigCount::zero());
    }
    let mut coef: i128 = 1;
    for idx in [i, j, k] {
        if idx != m {
            coef *= dval(idx, c) as i128;
        }
    }
    if coef == 0 {
        return Ok(BigCount::zero());
    }
    Ok(source.value_of(c)? * BigCount::from(coef))
}

/// Ordered two-part splits (c₁, c₂) with c₁ + c₂ = c and both parts nonzero.
/// Degree-0 parts are restricted to −[p]: every other degree-0 class has a
/// vanishing invariant, so the omitted terms contribute nothing.
fn product_splits(c: &CurveClass) -> Vec<(CurveClass, CurveClass)> {
    let r = c.r();
    let mut out = Vec::new();
    for p in 0..r {
        let mut minus = vec![0i64; r];
        minus[p] = -1;
        let mut plus = c.alpha.clone();
        plus[p] += 1;
        let left = CurveClass::new(0, minus);
        let right = CurveClass::new(c.d, plus);
        if c.d == 0 {
            out.push((left, right));
        } else {
            out.push((left.clone(), right.clone()));
            out.push((right, left));
        }
    }
    for d1 in 1..c.d {
        let d2 = c.d - d1;
        let lo: Vec<i64> = c.alpha.iter().map(|&a| (a - d2).max(0)).collect();
        let hi: Vec<i64> = c.alpha.iter().map(|&a| a.min(d1)).collect();
        if lo.iter().zip(&hi).any(|(l, h)| l > h) {
            continue;
        }
        let mut beta = lo.clone();
        loop {
            let gamma: Vec<i64> = c.alpha.iter().zip(&beta).map(|(a, b)| a - b).collect();
            out.push((CurveClass::new(d1, beta.clone()), CurveClass::new(d2, gamma)));
            let mut pos = 0;
            loop {
                if pos == r {
                    break;
                }
                if beta[pos] < hi[pos] {
                    beta[pos] += 1;
                    break;
                }
                beta[pos] = lo[pos];
                pos += 1;
            }
            if pos == r {
                break;
            }
        }
    }
    out
}

/// All Γ data needed to evaluate every residual at one monomial: the Γ_{xym}
/// coefficients for the left side and, per divisor direction s, the
/// convolution table P_s[x][y][z][w] = Σ C(n,n₁) Γ_{xys}(c₁,n₁) Γ_{zsw}(c₂,n₂).
pub struct MonomialTables {
    m: usize,
    lhs: Vec<BigCount>,
    conv: Vec<BigCount>,
}

impl MonomialTables {
    pub fn build(mono: &Monomial, source: &dyn InvariantSource) -> Result<Self, EngineError> {
        let m = mono.cls.r() + 2;
        let n = mono.n;
        let mut lhs = vec![BigCount::zero(); m * m];
        for x in 1..=m {
            for y in 1..=m {
                lhs[(x - 1) * m + (y - 1)] = gamma_coeff(x, y, m, mono, source)?;
            }
        }
        let table = m * m * m * m;
        let mut conv = vec![BigCount::zero(); (m - 1) * table];
        for (c1, c2) in product_splits(&mono.cls) {
            if !class_in_series(&c1) || !class_in_series(&c2) {
                continue;
            }
            let (n1c, n2c) = (expected_dim(&c1), expected_dim(&c2));
            let t_total = n1c + n2c - n;
            if !(0..=4).contains(&t_total) {
                continue;
            }
            let nv1 = source.value_of(&c1)?;
            if nv1.is_zero() {
                continue;
            }
            let nv2 = source.value_of(&c2)?;
            if nv2.is_zero() {
                continue;
            }
            let prod = nv1 * nv2;
            for s in 1..m {
                let (ds1, ds2) = (dval(s, &c1) as i128, dval(s, &c2) as i128);
                if ds1 == 0 || ds2 == 0 {
                    continue;
                }
                for t1 in 0..=2i64 {
                    let t2 = t_total - t1;
                    if !(0..=2).contains(&t2) {
                        continue;
                    }
                    let (n1, n2) = (n1c - t1, n2c - t2);
                    if n1 < 0 || n2 < 0 {
                        continue;
                    }
                    let cbin = binomial_i128(n, n1);
                    if cbin == 0 {
                        continue;
                    }
                    for x in 1..=m {
                        for y in 1..=m {
                            let mcount = (x == m) as i64 + (y == m) as i64;
                            if mcount != t1 {
                                continue;
                            }
                            let mut lc = ds1;
                            for idx in [x, y] {
                                if idx != m {
                                    lc *= dval(idx, &c1) as i128;
                                }
                            }
                            if lc == 0 {
                                continue;
                            }
                            for z in 1..=m {
                                for w in 1..=m {
                                    let mcount2 = (z == m) as i64 + (w == m) as i64;
                                    if mcount2 != t2 {
                                        continue;
                                    }
                                    let mut rc = ds2;
                                    for idx in [z, w] {
                                        if idx != m {
                                            rc *= dval(idx, &c2) as i128;
                                        }
                                    }
                                    if rc == 0 {
                                        continue;
                                    }
                                    let slot = (s - 1) * table
                                        + (((x - 1) * m + (y - 1)) * m + (z - 1)) * m
                                        + (w - 1);
                                    conv[slot] += &prod * BigCount::from(cbin * lc * rc);
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(MonomialTables { m, lhs, conv })
    }

    fn gamma_m(&self, x: usize, y: usize) -> &BigCount {
        &self.lhs[(x - 1) * self.m + (y - 1)]
    }

    fn conv_at(&self, s: usize, x: usize, y: usize, z: usize, w: usize) -> &BigCount {
        let m = self.m;
        &self.conv[(s - 1) * m * m * m * m + (((x - 1) * m + (y - 1)) * m + (z - 1)) * m + (w - 1)]
    }

    /// LHS minus RHS of the relation for the quadruple (i, j, k, l).
    pub fn residual(&self, i: usize, j: usize, k: usize, l: usize) -> BigCount {
        let m = self.m;
        assert!((1..=m).contains(&i) && (1..=m).contains(&j));
        assert!((1..=m).contains(&k) && (1..=m).contains(&l));
        let mut total = self.gamma_m(k, l) * BigCount::from(pairing(i, j, m))
            - self.gamma_m(i, l) * BigCount::from(pairing(k, j, m))
            + self.gamma_m(i, j) * BigCount::from(pairing(k, l, m))
            - self.gamma_m(k, j) * BigCount::from(pairing(i, l, m));
        for s in 1..m {
            let diff = self.conv_at(s, j, k, i, l) - self.conv_at(s, i, j, k, l);
            total -= diff * BigCount::from(eps(s));
        }
        total
    }
}

/// LHS minus RHS of the relation for one quadruple at one monomial.
pub fn relation_residual(
    i: usize,
    j: usize,
    k: usize,
    l: usize,
    mono: &Monomial,
    source: &dyn InvariantSource,
) -> Result<BigCount, EngineError> {
    Ok(MonomialTables::build(mono, source)?.residual(i, j, k, l))
}

#[derive(Debug, Default)]
pub struct VerifyReport {
    /// Number of (quadruple, monomial) pairs evaluated.
    pub instances: u64,
    /// Human-readable descriptions of every nonzero residual found.
    pub failures: Vec<String>,
}

impl VerifyReport {
    pub fn all_zero(&self) -> bool {
        self.failures.is_empty()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.all_zero() {
            write!(f, "checked {} instances, all residuals zero", self.instances)
        } else {
            writeln!(
                f,
                "checked {} instances, {} nonzero residuals:",
                self.instances,
                self.failures.len()
            )?;
            for line in &self.failures {
                writeln!(f, "  {line}")?;
            }
            Ok(())
        }
    }
}

/// Evaluate every relation instance with indices in {1,…,m}⁴ at every
/// monomial with 1 ≤ d ≤ d_max, 0 ≤ aᵢ ≤ d, 0 ≤ n ≤ n_max.
pub fn verify_relations(
    r: usize,
    d_max: i64,
    n_max: i64,
    source: &dyn InvariantSource,
) -> Result<VerifyReport, EngineError> {
    assert!(d_max >= 1 && n_max >= 0);
    let m = r + 2;
    let mut report = VerifyReport::default();
    for d in 1..=d_max {
        let mut alpha = vec![0i64; r];
        loop {
            for n in 0..=n_max {
                let mono = Monomial::new(CurveClass::new(d, alpha.clone()), n);
                let tables = MonomialTables::build(&mono, source)?;
                for i in 1..=m {
                    for j in 1..=m {
                        for k in 1..=m {
                            for l in 1..=m {
                                report.instances += 1;
                                let res = tables.residual(i, j, k, l);
                                if !res.is_zero() {
                                    report.failures.push(format!(
                                        "({i},{j},{k},{l}) at {} n={n}: residual {res}",
                                        mono.cls
                                    ));
                                }
                            }
                        }
                    }
                }
            }
            let mut pos = 0;
            loop {
                if pos == r {
                    break;
                }
                if alpha[pos] < d {
                    alpha[pos] += 1;
                    break;
                }
                alpha[pos] = 0;
                pos += 1;
            }
            if pos == r {
                break;
            }
        }
    }
    Ok(report)
}
