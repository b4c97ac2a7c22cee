//! Two-sample Kolmogorov–Smirnov testing.
//!
//! The statistic is generic over the sample value type (anything totally
//! ordered once NaN is excluded) and over the [`Scalar`] it is reported in,
//! so it can be computed exactly with rationals. P-values need a float type.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::num::{RealScalar, Scalar};

/// Truncation threshold for the Kolmogorov series.
pub const SERIES_EPSILON: f64 = 1e-10;

/// Below this λ the limiting distribution is summed in its theta-function
/// form, which converges quickly where the alternating series does not.
const SMALL_LAMBDA: f64 = 1.0;

/// Upper bound on labelings enumerated by the exact permutation test.
pub const MAX_EXACT_LABELINGS: u64 = 5_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KsError {
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains an unordered value (NaN)")]
    UnorderedValue,
    #[error("statistic {0} is outside [0, 1]")]
    InvalidStatistic(String),
    #[error("exact test needs {0} labelings, more than the limit of {MAX_EXACT_LABELINGS}")]
    TooManyLabelings(u64),
}

/// Alternative hypothesis.
///
/// `Greater` means values of the first sample tend to be larger, which shows
/// up as its CDF lying below the second one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Alternative {
    NotEqual,
    Greater,
    Less,
}

impl Alternative {
    pub const ALL: [Alternative; 3] = [
        Alternative::NotEqual,
        Alternative::Greater,
        Alternative::Less,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            Alternative::NotEqual => "≠",
            Alternative::Greater => ">",
            Alternative::Less => "<",
        }
    }

    pub fn short_name(self) -> &'static str {
        match self {
            Alternative::NotEqual => "ne",
            Alternative::Greater => "gt",
            Alternative::Less => "lt",
        }
    }

    /// The same hypothesis with the samples swapped.
    pub fn swapped(self) -> Alternative {
        match self {
            Alternative::NotEqual => Alternative::NotEqual,
            Alternative::Greater => Alternative::Less,
            Alternative::Less => Alternative::Greater,
        }
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

fn check_sample<V: PartialOrd>(sample: &[V]) -> Result<(), KsError> {
    if sample.is_empty() {
        return Err(KsError::EmptySample);
    }
    if sample.iter().any(|v| v.partial_cmp(v).is_none()) {
        return Err(KsError::UnorderedValue);
    }
    Ok(())
}

fn sorted<V: PartialOrd + Copy>(sample: &[V]) -> Vec<V> {
    let mut v = sample.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    v
}

/// Empirical CDF: `F(x) = #{s <= x} / n`.
#[derive(Debug, Clone)]
pub struct Ecdf<V> {
    sorted: Vec<V>,
}

impl<V: PartialOrd + Copy> Ecdf<V> {
    pub fn new(sample: &[V]) -> Result<Self, KsError> {
        check_sample(sample)?;
        Ok(Ecdf {
            sorted: sorted(sample),
        })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Number of sample values `<= x`.
    pub fn count_at(&self, x: &V) -> usize {
        self.sorted.partition_point(|v| v <= x)
    }

    pub fn eval<T: Scalar>(&self, x: &V) -> T {
        T::ratio(self.count_at(x) as u64, self.sorted.len() as u64)
    }
}

/// One-sided suprema of the CDF difference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deviations<T> {
    /// `sup (F1 - F2)`
    pub plus: T,
    /// `sup (F2 - F1)`
    pub minus: T,
}

impl<T: Scalar> Deviations<T> {
    pub fn statistic(&self, alt: Alternative) -> T {
        match alt {
            Alternative::NotEqual => self.plus.max_of(self.minus),
            Alternative::Greater => self.minus,
            Alternative::Less => self.plus,
        }
    }
}

/// Walks the merged support of both samples and records both one-sided
/// suprema. CDFs are right-continuous, so each distinct value is evaluated
/// after all of its ties have been consumed.
pub fn ks_deviations<V, T>(s1: &[V], s2: &[V]) -> Result<Deviations<T>, KsError>
where
    V: PartialOrd + Copy,
    T: Scalar,
{
    check_sample(s1)?;
    check_sample(s2)?;
    let a = sorted(s1);
    let b = sorted(s2);
    let (n1, n2) = (a.len(), b.len());
    let (mut i, mut j) = (0, 0);
    let mut plus = T::zero();
    let mut minus = T::zero();
    while i < n1 || j < n2 {
        let x = match (a.get(i), b.get(j)) {
            (Some(u), Some(v)) => {
                if v < u {
                    *v
                } else {
                    *u
                }
            }
            (Some(u), None) => *u,
            (None, Some(v)) => *v,
            (None, None) => unreachable!(),
        };
        while i < n1 && a[i] <= x {
            i += 1;
        }
        while j < n2 && b[j] <= x {
            j += 1;
        }
        let f1 = T::ratio(i as u64, n1 as u64);
        let f2 = T::ratio(j as u64, n2 as u64);
        plus = plus.max_of(f1 - f2);
        minus = minus.max_of(f2 - f1);
    }
    Ok(Deviations { plus, minus })
}

pub fn ks_statistic<V, T>(s1: &[V], s2: &[V], alt: Alternative) -> Result<T, KsError>
where
    V: PartialOrd + Copy,
    T: Scalar,
{
    Ok(ks_deviations::<V, T>(s1, s2)?.statistic(alt))
}

/// Limiting Kolmogorov survival function
/// `Q(λ) = 2 Σ_{k≥1} (-1)^{k-1} exp(-2 k² λ²)`, clamped to `[0, 1]`.
pub fn kolmogorov_q<T: RealScalar>(lambda: T) -> T {
    let one = T::one();
    let two = one + one;
    if lambda.is_nan() || lambda <= T::zero() {
        return one;
    }
    let eps = T::from(SERIES_EPSILON).expect("representable");
    let q = if lambda < T::from(SMALL_LAMBDA).expect("representable") {
        // Q(λ) = 1 - sqrt(2π)/λ Σ_{k≥1} exp(-(2k-1)² π² / (8 λ²))
        let pi = T::from(std::f64::consts::PI).expect("representable");
        let scale = (two * pi).sqrt() / lambda;
        let base = pi * pi / (T::from(8.0).expect("representable") * lambda * lambda);
        let mut sum = T::zero();
        let mut k = 1u32;
        loop {
            let odd = T::from(2 * k - 1).expect("representable");
            let term = (-(odd * odd) * base).exp();
            sum = sum + term;
            if scale * term < eps || k >= 1000 {
                break;
            }
            k += 1;
        }
        one - scale * sum
    } else {
        let mut sum = T::zero();
        let mut k = 1u32;
        loop {
            let kk = T::from(k).expect("representable");
            let term = two * (-two * kk * kk * lambda * lambda).exp();
            if k % 2 == 1 {
                sum = sum + term;
            } else {
                sum = sum - term;
            }
            if term < eps || k >= 1000 {
                break;
            }
            k += 1;
        }
        sum
    };
    clamp_unit(q)
}

fn clamp_unit<T: RealScalar>(p: T) -> T {
    if p < T::zero() {
        T::zero()
    } else if p > T::one() {
        T::one()
    } else {
        p
    }
}

/// Effective sample size `n1 n2 / (n1 + n2)`.
pub fn effective_size<T: RealScalar>(n1: usize, n2: usize) -> T {
    let a = T::from_count(n1 as u64);
    let b = T::from_count(n2 as u64);
    a * b / (a + b)
}

/// Asymptotic p-value of statistic `d` for samples of sizes `n1`, `n2`.
///
/// Two-sided: `Q(sqrt(n_eff) d)`. One-sided: `exp(-2 n_eff d²)`.
pub fn ks_pvalue<T: RealScalar>(
    d: T,
    n1: usize,
    n2: usize,
    alt: Alternative,
) -> Result<T, KsError> {
    if !(d >= T::zero() && d <= T::one()) {
        return Err(KsError::InvalidStatistic(format!("{d:?}")));
    }
    if n1 == 0 || n2 == 0 {
        return Err(KsError::EmptySample);
    }
    if d == T::zero() {
        return Ok(T::one());
    }
    let n_eff: T = effective_size(n1, n2);
    let p = match alt {
        Alternative::NotEqual => kolmogorov_q(n_eff.sqrt() * d),
        Alternative::Greater | Alternative::Less => {
            let two = T::one() + T::one();
            (-two * n_eff * d * d).exp()
        }
    };
    Ok(clamp_unit(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueMethod {
    #[default]
    Asymptotic,
    /// Permutation p-value over all labelings.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsOutcome<T> {
    pub statistic: T,
    pub p_value: T,
    pub n1: usize,
    pub n2: usize,
    pub alternative: Alternative,
    pub method: PValueMethod,
}

/// Statistic plus asymptotic p-value.
pub fn ks_test<V, T>(s1: &[V], s2: &[V], alt: Alternative) -> Result<KsOutcome<T>, KsError>
where
    V: PartialOrd + Copy,
    T: RealScalar,
{
    let statistic: T = ks_statistic(s1, s2, alt)?;
    let p_value = ks_pvalue(statistic, s1.len(), s2.len(), alt)?;
    Ok(KsOutcome {
        statistic,
        p_value,
        n1: s1.len(),
        n2: s2.len(),
        alternative: alt,
        method: PValueMethod::Asymptotic,
    })
}

/// Like [`ks_test`], with the p-value method chosen by the caller.
pub fn ks_test_with<V, T>(
    s1: &[V],
    s2: &[V],
    alt: Alternative,
    method: PValueMethod,
) -> Result<KsOutcome<T>, KsError>
where
    V: PartialOrd + Copy,
    T: RealScalar,
{
    match method {
        PValueMethod::Asymptotic => ks_test(s1, s2, alt),
        PValueMethod::Exact => {
            let statistic: T = ks_statistic(s1, s2, alt)?;
            let p_value = ks_exact_pvalue(s1, s2, alt)?;
            Ok(KsOutcome {
                statistic,
                p_value,
                n1: s1.len(),
                n2: s2.len(),
                alternative: alt,
                method,
            })
        }
    }
}

/// Number of labelings `C(n1 + n2, n1)`, saturating.
pub fn labeling_count(n1: usize, n2: usize) -> u64 {
    let n = (n1 + n2) as u128;
    let k = n1.min(n2) as u128;
    let mut c: u128 = 1;
    for i in 0..k {
        c = c * (n - i) / (i + 1);
        if c > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    c as u64
}

/// Scaled one-sided suprema `(n1 n2 sup(F1-F2), n1 n2 sup(F2-F1))` for a
/// labeling of the pooled sorted values. `groups` holds the tie-group end
/// offsets.
fn scaled_deviations(in_first: &[bool], groups: &[usize], n1: i64, n2: i64) -> (i64, i64) {
    let (mut c1, mut c2) = (0i64, 0i64);
    let (mut plus, mut minus) = (0i64, 0i64);
    let mut start = 0;
    for &end in groups {
        for &first in &in_first[start..end] {
            if first {
                c1 += 1;
            } else {
                c2 += 1;
            }
        }
        start = end;
        let diff = c1 * n2 - c2 * n1;
        plus = plus.max(diff);
        minus = minus.max(-diff);
    }
    (plus, minus)
}

fn pick(dev: (i64, i64), alt: Alternative) -> i64 {
    match alt {
        Alternative::NotEqual => dev.0.max(dev.1),
        Alternative::Greater => dev.1,
        Alternative::Less => dev.0,
    }
}

/// Exact permutation p-value: the fraction of all `C(n1+n2, n1)` relabelings
/// of the pooled values whose statistic is at least the observed one.
pub fn ks_exact_pvalue<V, T>(s1: &[V], s2: &[V], alt: Alternative) -> Result<T, KsError>
where
    V: PartialOrd + Copy,
    T: Scalar,
{
    check_sample(s1)?;
    check_sample(s2)?;
    let (n1, n2) = (s1.len(), s2.len());
    let total = labeling_count(n1, n2);
    if total > MAX_EXACT_LABELINGS {
        return Err(KsError::TooManyLabelings(total));
    }
    let mut pooled: Vec<(V, bool)> = s1
        .iter()
        .map(|&v| (v, true))
        .chain(s2.iter().map(|&v| (v, false)))
        .collect();
    pooled.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal));
    let n = pooled.len();
    let mut groups = Vec::new();
    for idx in 1..=n {
        if idx == n || pooled[idx].0 > pooled[idx - 1].0 {
            groups.push(idx);
        }
    }
    let (n1i, n2i) = (n1 as i64, n2 as i64);
    let labels: Vec<bool> = pooled.iter().map(|p| p.1).collect();
    let observed = pick(scaled_deviations(&labels, &groups, n1i, n2i), alt);

    let mut chosen: Vec<usize> = (0..n1).collect();
    let mut in_first = vec![false; n];
    let mut hits = 0u64;
    loop {
        in_first.iter_mut().for_each(|f| *f = false);
        for &c in &chosen {
            in_first[c] = true;
        }
        if pick(scaled_deviations(&in_first, &groups, n1i, n2i), alt) >= observed {
            hits += 1;
        }
        // next combination in lexicographic order
        let mut i = n1;
        loop {
            if i == 0 {
                return Ok(T::ratio(hits, total));
            }
            i -= 1;
            if chosen[i] < n - n1 + i {
                break;
            }
        }
        chosen[i] += 1;
        for j in i + 1..n1 {
            chosen[j] = chosen[j - 1] + 1;
        }
    }
}
