//! Random variates for mutation strengths and subset selection.
//!
//! Every random choice in the toolkit draws from a [`StreamRng`]. Streams are
//! keyed by a 64-bit seed obtained from [`derive_seed`], so a run is fully
//! determined by `(master_seed, cell_index, run_index)`.

use std::fmt;
use std::sync::Arc;

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Default power-law exponent.
pub const DEFAULT_BETA: f64 = 1.5;

/// The random stream type owned by every run.
pub type StreamRng = ChaCha8Rng;

/// Opens the stream for a derived seed.
pub fn stream(seed: u64) -> StreamRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream for run `run_index` of cell `cell_index`.
///
/// The rule is frozen:
/// `s = splitmix64(splitmix64(splitmix64(master) ^ cell) ^ run)` where
/// `splitmix64` is the standard SplitMix64 output function applied to
/// `x + 0x9E3779B97F4A7C15`. The stream itself is
/// `ChaCha8Rng::seed_from_u64(s)`.
pub fn derive_seed(master_seed: u64, cell_index: u64, run_index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master_seed) ^ cell_index) ^ run_index)
}

/// One draw from Poisson(1), by multiplying uniforms until the product
/// drops below `1/e`.
pub fn poisson_unit<R: Rng + ?Sized>(rng: &mut R) -> usize {
    let threshold = (-1.0f64).exp();
    let mut product: f64 = rng.random();
    let mut k = 0;
    while product >= threshold {
        product *= rng.random::<f64>();
        k += 1;
    }
    k
}

fn check_power_law(beta: f64, u: usize) -> Result<()> {
    if beta.is_nan() || beta <= 1.0 || !beta.is_finite() {
        return Err(Error::InvalidDistribution(format!(
            "power-law exponent must be a finite value > 1, got {beta}"
        )));
    }
    if u == 0 {
        return Err(Error::InvalidDistribution(
            "power-law range must be at least 1".into(),
        ));
    }
    Ok(())
}

/// `C_{β,u} = (Σ_{i=1}^{u} i^{-β})^{-1}` by direct summation.
pub fn power_law_normalizer(beta: f64, u: usize) -> Result<f64> {
    check_power_law(beta, u)?;
    let sum: f64 = (1..=u).map(|i| (i as f64).powf(-beta)).sum();
    Ok(1.0 / sum)
}

/// Power law on `[1..u]` with `Pr[k = i] = C_{β,u} i^{-β}`, sampled by inverse
/// CDF over a cumulative table built once at construction.
#[derive(Clone)]
pub struct PowerLaw {
    beta: f64,
    range: usize,
    normalizer: f64,
    cdf: Arc<[f64]>,
}

impl PowerLaw {
    pub fn new(beta: f64, range: usize) -> Result<Self> {
        let normalizer = power_law_normalizer(beta, range)?;
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = (1..=range)
            .map(|i| {
                acc += normalizer * (i as f64).powf(-beta);
                acc
            })
            .collect();
        *cdf.last_mut().expect("range >= 1") = 1.0;
        Ok(Self {
            beta,
            range,
            normalizer,
            cdf: cdf.into(),
        })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn range(&self) -> usize {
        self.range
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    pub fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    pub fn pmf(&self, i: usize) -> f64 {
        if i == 0 || i > self.range {
            0.0
        } else {
            self.normalizer * (i as f64).powf(-self.beta)
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.cdf.partition_point(|&c| c <= u) + 1
    }
}

impl fmt::Debug for PowerLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PowerLaw")
            .field("beta", &self.beta)
            .field("range", &self.range)
            .finish()
    }
}

impl PartialEq for PowerLaw {
    fn eq(&self, other: &Self) -> bool {
        self.beta == other.beta && self.range == other.range
    }
}

/// One power-law draw. Builds a table each call; hold a [`PowerLaw`] for
/// repeated sampling.
pub fn power_law<R: Rng + ?Sized>(beta: f64, u: usize, rng: &mut R) -> Result<usize> {
    Ok(PowerLaw::new(beta, u)?.sample(rng))
}

/// Distribution of the mutation strength `k`.
#[derive(Clone, Debug, PartialEq)]
pub enum StrengthDistribution {
    /// Poisson with mean 1.
    PoissonUnit,
    PowerLaw(PowerLaw),
}

impl StrengthDistribution {
    pub fn power_law(beta: f64, range: usize) -> Result<Self> {
        Ok(Self::PowerLaw(PowerLaw::new(beta, range)?))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        match self {
            Self::PoissonUnit => poisson_unit(rng),
            Self::PowerLaw(pl) => pl.sample(rng),
        }
    }

    /// `Pr[k = i]`.
    pub fn pmf(&self, i: usize) -> f64 {
        match self {
            Self::PoissonUnit => poisson_unit_pmf(i),
            Self::PowerLaw(pl) => pl.pmf(i),
        }
    }

    /// `β` for the power law, `None` for Poisson.
    pub fn beta(&self) -> Option<f64> {
        match self {
            Self::PoissonUnit => None,
            Self::PowerLaw(pl) => Some(pl.beta()),
        }
    }
}

/// `1/(e·k!)`, by running product so it never overflows.
pub fn poisson_unit_pmf(k: usize) -> f64 {
    (1..=k).fold((-1.0f64).exp(), |acc, j| acc / j as f64)
}

/// Uniform `k`-subset of `[1..n]`, sorted ascending.
pub fn random_k_subset<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Vec<usize>> {
    if k > n {
        return Err(Error::SubsetTooLarge { k, n });
    }
    let mut out: Vec<usize> = index::sample(rng, n, k).into_iter().map(|i| i + 1).collect();
    out.sort_unstable();
    Ok(out)
}

/// A bijection `ρ` of a finite set `S ⊆ [1..n]`, extended by fixing
/// everything outside `S`. `domain[j] ↦ image[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrangement {
    domain: Vec<usize>,
    image: Vec<usize>,
}

impl Arrangement {
    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    /// `ρ` is the identity on `S`. Costs `O(|S|)`.
    pub fn is_identity(&self) -> bool {
        self.domain == self.image
    }

    /// `ρ(v)`; identity off `S`.
    pub fn apply_to(&self, v: usize) -> usize {
        self.domain
            .iter()
            .position(|&d| d == v)
            .map_or(v, |j| self.image[j])
    }

    /// The extension `ρ̄ ∈ S_n`.
    pub fn to_permutation(&self, n: usize) -> Result<Permutation> {
        let mut images: Vec<usize> = (1..=n).collect();
        for (&d, &r) in self.domain.iter().zip(&self.image) {
            if d == 0 || d > n {
                return Err(Error::ElementOutOfRange { element: d, n });
            }
            images[d - 1] = r;
        }
        Permutation::from_images(&images)
    }
}

/// Uniformly random bijection of `S` (fixed points allowed).
pub fn random_arrangement<R: Rng + ?Sized>(set: &[usize], rng: &mut R) -> Arrangement {
    let domain = set.to_vec();
    let mut image = domain.clone();
    image.shuffle(rng);
    Arrangement { domain, image }
}
