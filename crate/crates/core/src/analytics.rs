//! Closed-form probabilities for the mutation operators.
//!
//! Sums over factorials run in log space against a table of `ln k!`, so
//! arguments in the thousands are fine.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mutation::{MutationKind, OperatorName, OperatorSpec};
use crate::sampling::{poisson_unit_pmf, power_law_normalizer, StrengthDistribution};

/// Closed interval inside `[0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityInterval {
    lower: f64,
    upper: f64,
}

impl ProbabilityInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lower) || !(0.0..=1.0).contains(&upper) || lower > upper {
            return Err(Error::InvalidParameters(format!(
                "[{lower}, {upper}] is not a probability interval"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn point(p: f64) -> Result<Self> {
        Self::new(p, p)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn is_point(&self) -> bool {
        self.lower == self.upper
    }

    pub fn contains(&self, p: f64) -> bool {
        (self.lower..=self.upper).contains(&p)
    }
}

/// `ln k!` for `k ≤ max`.
struct LnFactorial(Vec<f64>);

impl LnFactorial {
    fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        let mut acc = 0.0;
        table.push(0.0);
        for k in 1..=max {
            acc += (k as f64).ln();
            table.push(acc);
        }
        Self(table)
    }

    fn get(&self, k: usize) -> f64 {
        self.0[k]
    }

    fn ln_binomial(&self, n: usize, k: usize) -> f64 {
        self.get(n) - self.get(k) - self.get(n - k)
    }
}

/// Neumaier-compensated sum.
fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

fn binomial2(n: usize) -> f64 {
    (n * (n - 1) / 2) as f64
}

fn check_beta(beta: f64) -> Result<()> {
    if beta.is_nan() || beta <= 1.0 || !beta.is_finite() {
        return Err(Error::InvalidDistribution(format!(
            "power-law exponent must be a finite value > 1, got {beta}"
        )));
    }
    Ok(())
}

/// Riemann zeta for `β > 1`: direct sum of the first 10⁴ terms plus an
/// Euler–Maclaurin tail (integral, half-term and two derivative
/// corrections). Absolute error is far below 1e-9 for all `β > 1`.
pub fn zeta(beta: f64) -> Result<f64> {
    check_beta(beta)?;
    const TERMS: usize = 10_000;
    let head = compensated_sum((1..=TERMS).map(|k| (k as f64).powf(-beta)));
    let k = TERMS as f64;
    let tail = k.powf(1.0 - beta) / (beta - 1.0) - 0.5 * k.powf(-beta)
        + beta / 12.0 * k.powf(-beta - 1.0)
        - beta * (beta + 1.0) * (beta + 2.0) / 720.0 * k.powf(-beta - 3.0);
    Ok(head + tail)
}

/// `Pr[Poi(1) > n] = 1 − Σ_{k=0}^{n} 1/(e·k!)`, compensated.
pub fn poisson_unit_tail(n: usize) -> f64 {
    let head = compensated_sum(std::iter::once(1.0).chain((0..=n).map(|k| -poisson_unit_pmf(k))));
    head.max(0.0)
}

fn factorial_inverse(k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc / j as f64)
}

/// Exact probability that scramble mutation with strength distribution
/// `dist` returns the parent on `S_n`: `Σ_{k ≤ n} Pr[k]/k! + Pr[k > n]`.
pub fn scramble_void_prob(dist: &StrengthDistribution, n: usize) -> f64 {
    match dist {
        StrengthDistribution::PoissonUnit => {
            let body = compensated_sum((0..=n).map(|k| poisson_unit_pmf(k) * factorial_inverse(k)));
            body + poisson_unit_tail(n)
        }
        StrengthDistribution::PowerLaw(pl) => {
            let u = pl.range();
            let body = compensated_sum((1..=u.min(n)).map(|k| pl.pmf(k) * factorial_inverse(k)));
            let beyond = compensated_sum((n + 1..=u).map(|k| pl.pmf(k)));
            body + beyond
        }
    }
}

/// Probability `P_0` that the operator recreates the parent on `S_n`.
///
/// Swap operators get bounds (Poisson: `[1/e, 1/e + 1/C(n,2)]`, power law:
/// `[0, 1/C(n,2)]`, upper ends clamped to 1); scramble operators get the
/// exact value as a point interval.
pub fn void_prob(op: &OperatorSpec, n: usize) -> Result<ProbabilityInterval> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("void_prob needs n >= 2, got {n}")));
    }
    match op.kind() {
        MutationKind::Swap => {
            let zero = op.strength().pmf(0);
            ProbabilityInterval::new(zero, (zero + 1.0 / binomial2(n)).min(1.0))
        }
        MutationKind::Scramble => ProbabilityInterval::point(scramble_void_prob(op.strength(), n)),
    }
}

/// Probability of an easy-to-detect void: `Pr[k = 0]` for swap, `P_0` for
/// scramble.
pub fn easy_void_prob(op: &OperatorSpec, n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("easy_void_prob needs n >= 2, got {n}")));
    }
    Ok(match op.kind() {
        MutationKind::Swap => op.strength().pmf(0),
        MutationKind::Scramble => scramble_void_prob(op.strength(), n),
    })
}

/// `P_0(n, β) = C_{β,n} Σ_{k=1}^{n} k^{-β}/k!` for heavy-tailed scramble.
pub fn ht_scramble_void_prob(n: usize, beta: f64) -> Result<f64> {
    let c = power_law_normalizer(beta, n)?;
    Ok(c * compensated_sum((1..=n).map(|k| (k as f64).powf(-beta) * factorial_inverse(k))))
}

/// `P_0^-(n_0, β) = P_0(n_0, β) / (ζ(β) C_{β,n_0})`, a lower bound on
/// `P_0(n, β)` for every `n ≥ n_0`.
pub fn void_prob_lower_bound(n0: usize, beta: f64) -> Result<f64> {
    let p0 = ht_scramble_void_prob(n0, beta)?;
    let c = power_law_normalizer(beta, n0)?;
    Ok(p0 / (zeta(beta)? * c))
}

fn check_target(n: usize, ell: usize, ell_prime: usize) -> Result<()> {
    if ell == 0 || ell > ell_prime || ell_prime > 2 * ell || ell_prime < 2 || ell_prime > n {
        return Err(Error::InvalidParameters(format!(
            "need 1 <= l <= l' <= min(2l, n) and l' >= 2, got n = {n}, l = {ell}, l' = {ell_prime}"
        )));
    }
    Ok(())
}

/// `Σ_{k=ℓ'}^{n} Pr[k]·(k−ℓ)!/(k−ℓ')! · (n−ℓ')!/n!` with `ln Pr[k]` supplied.
fn target_sum(
    lf: &LnFactorial,
    n: usize,
    ell: usize,
    ell_prime: usize,
    ln_pk: impl Fn(usize) -> f64,
) -> f64 {
    let scale = lf.get(n - ell_prime) - lf.get(n);
    compensated_sum(
        (ell_prime..=n).map(|k| (ln_pk(k) + lf.get(k - ell) - lf.get(k - ell_prime) + scale).exp()),
    )
}

/// Probability that Poisson scramble mutation sends `ℓ` prescribed positions
/// to prescribed new values, where `ℓ'` values are involved in total.
pub fn scramble_target_prob(n: usize, ell: usize, ell_prime: usize) -> Result<f64> {
    check_target(n, ell, ell_prime)?;
    let lf = LnFactorial::new(n);
    Ok(target_sum(&lf, n, ell, ell_prime, |k| -1.0 - lf.get(k)))
}

/// `(n − ℓ' + 1)^{-ℓ'}`, the upper bound on [`scramble_target_prob`].
pub fn scramble_target_upper_bound(n: usize, ell_prime: usize) -> f64 {
    ((n - ell_prime + 1) as f64).powi(-(ell_prime as i32))
}

/// Heavy-tailed counterpart of [`scramble_target_prob`].
pub fn ht_scramble_target_prob(n: usize, beta: f64, ell: usize, ell_prime: usize) -> Result<f64> {
    check_target(n, ell, ell_prime)?;
    let ln_c = power_law_normalizer(beta, n)?.ln();
    let lf = LnFactorial::new(n);
    Ok(target_sum(&lf, n, ell, ell_prime, |k| ln_c - beta * (k as f64).ln()))
}

/// `(Σ_{k=ℓ'}^{n} C_{β,n} k^{ℓ'−ℓ−β}) (n−ℓ')!/n!`, an upper bound on
/// [`ht_scramble_target_prob`].
pub fn ht_scramble_target_upper_bound(n: usize, beta: f64, ell: usize, ell_prime: usize) -> Result<f64> {
    check_target(n, ell, ell_prime)?;
    let c = power_law_normalizer(beta, n)?;
    let lf = LnFactorial::new(n);
    let exponent = ell_prime as f64 - ell as f64 - beta;
    let sum = compensated_sum((ell_prime..=n).map(|k| c * (k as f64).powf(exponent)));
    Ok(sum * (lf.get(n - ell_prime) - lf.get(n)).exp())
}

fn check_conditioned(n: usize, x: usize, ell: usize, ell_prime: usize) -> Result<usize> {
    check_target(n, ell, ell_prime)?;
    if x > n || ell_prime > n - x {
        return Err(Error::InvalidParameters(format!(
            "need x <= n and l' <= y = n - x, got n = {n}, x = {x}, l' = {ell_prime}"
        )));
    }
    Ok(n - x)
}

/// Probability that heavy-tailed scramble mutation sends `ℓ` prescribed
/// positions of `Y` to prescribed values while leaving all `x` positions of
/// `X = [1..n] ∖ Y` unchanged.
pub fn ht_scramble_conditioned_prob(
    n: usize,
    beta: f64,
    x: usize,
    ell: usize,
    ell_prime: usize,
) -> Result<f64> {
    let y = check_conditioned(n, x, ell, ell_prime)?;
    let ln_c = power_law_normalizer(beta, n)?.ln();
    let lf = LnFactorial::new(n);
    let terms = (0..=x).flat_map(|a| {
        let lf = &lf;
        (ell_prime..=y).map(move |b| {
            let s = a + b;
            (ln_c + lf.ln_binomial(x, a) + lf.ln_binomial(y - ell_prime, b - ell_prime)
                + lf.get(b - ell)
                - beta * (s as f64).ln()
                - lf.ln_binomial(n, s)
                - lf.get(s))
            .exp()
        })
    });
    Ok(compensated_sum(terms))
}

/// The single-sum upper bound on [`ht_scramble_conditioned_prob`].
pub fn ht_scramble_conditioned_upper_bound(
    n: usize,
    beta: f64,
    x: usize,
    ell: usize,
    ell_prime: usize,
) -> Result<f64> {
    let y = check_conditioned(n, x, ell, ell_prime)?;
    let c = power_law_normalizer(beta, n)?;
    let lf = LnFactorial::new(n);
    let ln_falling_n = lf.get(n) - lf.get(n - ell_prime);
    let terms = (ell_prime..=y).map(|b| {
        let ratio_pow = if b == ell_prime {
            1.0
        } else {
            ((y - ell_prime) as f64 / (n - ell_prime) as f64).powi((b - ell_prime) as i32)
        };
        let ln_falling_b = lf.get(b - ell) - lf.get(b - ell_prime);
        std::f64::consts::E * (ln_falling_b - beta * (b as f64).ln() - ln_falling_n).exp() * ratio_pow
    });
    Ok(c * compensated_sum(terms))
}

/// `6/(n−1)²`, the bound on the per-iteration improvement probability of
/// Poisson swap on `PLeadingOnes`. Vacuous (> 1) for `n ≤ 3`.
pub fn improvement_bound_lo(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("need n >= 2, got {n}")));
    }
    Ok(6.0 / ((n - 1) as f64).powi(2))
}

/// `3(m/(n−1))²`, the bound on the probability that one iteration started
/// at a `PJump` local optimum changes the cycle count of the parent.
pub fn cycle_change_bound(n: usize, m: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameters(format!("need n >= 2, got {n}")));
    }
    Ok(3.0 * (m as f64 / (n - 1) as f64).powi(2))
}

/// `(n−r)(n−r+1)/(n(n−1))`, the bound on the probability that a uniform
/// transposition picks two elements of one cycle of a permutation with `r`
/// cycles (fixed points included).
pub fn same_cycle_bound(n: usize, r: usize) -> Result<f64> {
    if n < 2 || r == 0 || r > n {
        return Err(Error::InvalidParameters(format!(
            "need n >= 2 and 1 <= r <= n, got n = {n}, r = {r}"
        )));
    }
    Ok(((n - r) * (n - r + 1)) as f64 / (n * (n - 1)) as f64)
}

/// Exact same-cycle probability `Σ n_i(n_i − 1)/(n(n−1))` for the given
/// cycle lengths (fixed points may be omitted).
pub fn same_cycle_prob(n: usize, cycle_lengths: &[usize]) -> f64 {
    let pairs: usize = cycle_lengths.iter().map(|&l| l * (l.max(1) - 1)).sum();
    pairs as f64 / (n * (n - 1)) as f64
}

/// `(m!)² C(n, m)`, the order of the Poisson scramble runtime on `PJump`.
pub fn scramble_jump_scale(n: usize, m: usize) -> f64 {
    let lf = LnFactorial::new(n.max(m));
    (2.0 * lf.get(m) + lf.ln_binomial(n, m)).exp()
}

/// `n^{2⌈m/2⌉}`, the order of the Poisson swap runtime on `PJump`.
pub fn swap_jump_scale(n: usize, m: usize) -> f64 {
    (n as f64).powi(2 * m.div_ceil(2) as i32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormalizerRow {
    pub n: usize,
    #[serde(rename = "C_beta_n")]
    pub c_beta_n: f64,
    #[serde(rename = "P0")]
    pub p0: f64,
    #[serde(rename = "P0_lower")]
    pub p0_lower: f64,
}

/// Normalizer, heavy-tailed scramble void probability and its lower bound
/// (taken with `n_0 = n`) per problem size.
pub fn normalizer_table(beta: f64, sizes: &[usize]) -> Result<Vec<NormalizerRow>> {
    sizes
        .iter()
        .map(|&n| {
            Ok(NormalizerRow {
                n,
                c_beta_n: power_law_normalizer(beta, n)?,
                p0: ht_scramble_void_prob(n, beta)?,
                p0_lower: void_prob_lower_bound(n, beta)?,
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VoidProbRow {
    pub operator: OperatorName,
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub easy_void: f64,
}

/// [`void_prob`] and [`easy_void_prob`] for all four operators.
pub fn void_prob_table(n: usize, beta: f64) -> Result<Vec<VoidProbRow>> {
    OperatorName::ALL
        .into_iter()
        .map(|name| {
            let op = name.build(n, beta)?;
            let iv = void_prob(&op, n)?;
            Ok(VoidProbRow {
                operator: name,
                n,
                lower: iv.lower(),
                upper: iv.upper(),
                easy_void: easy_void_prob(&op, n)?,
            })
        })
        .collect()
}
