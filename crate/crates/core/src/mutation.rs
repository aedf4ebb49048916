//! Swap and scramble mutation, each with Poisson(1) or power-law strength,
//! and the void-mutation classifier.

use std::fmt;
use std::str::FromStr;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permutation::Permutation;
use crate::sampling::{random_arrangement, StrengthDistribution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationKind {
    /// `k` independent uniform transpositions applied on the left.
    Swap,
    /// Uniform re-arrangement of a uniform `k`-subset of the ground set.
    Scramble,
}

/// Whether an offspring equals its parent, and how that was detected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoidClass {
    NotVoid,
    /// Known from the sampled strength (or an identity scramble) without
    /// looking at the offspring.
    EasyVoid,
    /// Swap with `k ≥ 1` whose transpositions cancel; needs a comparison.
    HardVoid,
}

impl VoidClass {
    pub fn is_void(self) -> bool {
        self != VoidClass::NotVoid
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MutationReport {
    /// Sampled strength.
    pub k: usize,
    /// Ground-set elements involved, ascending and deduplicated.
    pub touched: Vec<usize>,
    pub void_class: VoidClass,
}

/// The four named operators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorName {
    #[serde(rename = "swap-poi")]
    SwapPoi,
    #[serde(rename = "swap-ht")]
    SwapHt,
    #[serde(rename = "scramble-poi")]
    ScramblePoi,
    #[serde(rename = "scramble-ht")]
    ScrambleHt,
}

impl OperatorName {
    pub const ALL: [OperatorName; 4] = [
        OperatorName::SwapPoi,
        OperatorName::SwapHt,
        OperatorName::ScramblePoi,
        OperatorName::ScrambleHt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OperatorName::SwapPoi => "swap-poi",
            OperatorName::SwapHt => "swap-ht",
            OperatorName::ScramblePoi => "scramble-poi",
            OperatorName::ScrambleHt => "scramble-ht",
        }
    }

    pub fn kind(self) -> MutationKind {
        match self {
            OperatorName::SwapPoi | OperatorName::SwapHt => MutationKind::Swap,
            OperatorName::ScramblePoi | OperatorName::ScrambleHt => MutationKind::Scramble,
        }
    }

    pub fn is_heavy_tailed(self) -> bool {
        matches!(self, OperatorName::SwapHt | OperatorName::ScrambleHt)
    }

    /// Builds the operator for problem size `n`. `beta` is used by the
    /// heavy-tailed operators only, whose power law has range `n`.
    pub fn build(self, n: usize, beta: f64) -> Result<OperatorSpec> {
        let strength = if self.is_heavy_tailed() {
            StrengthDistribution::power_law(beta, n)?
        } else {
            StrengthDistribution::PoissonUnit
        };
        Ok(OperatorSpec::new(self.kind(), strength))
    }
}

impl fmt::Display for OperatorName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for OperatorName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OperatorName::ALL
            .into_iter()
            .find(|op| op.as_str() == s)
            .ok_or_else(|| Error::UnknownName(s.to_string()))
    }
}

/// A mutation kind paired with its strength distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorSpec {
    kind: MutationKind,
    strength: StrengthDistribution,
}

impl OperatorSpec {
    pub fn new(kind: MutationKind, strength: StrengthDistribution) -> Self {
        Self { kind, strength }
    }

    pub fn kind(&self) -> MutationKind {
        self.kind
    }

    pub fn strength(&self) -> &StrengthDistribution {
        &self.strength
    }

    pub fn name(&self) -> OperatorName {
        match (self.kind, &self.strength) {
            (MutationKind::Swap, StrengthDistribution::PoissonUnit) => OperatorName::SwapPoi,
            (MutationKind::Swap, StrengthDistribution::PowerLaw(_)) => OperatorName::SwapHt,
            (MutationKind::Scramble, StrengthDistribution::PoissonUnit) => {
                OperatorName::ScramblePoi
            }
            (MutationKind::Scramble, StrengthDistribution::PowerLaw(_)) => {
                OperatorName::ScrambleHt
            }
        }
    }

    /// Out-of-place mutation.
    pub fn mutate<R: Rng + ?Sized>(
        &self,
        parent: &Permutation,
        rng: &mut R,
    ) -> Result<(Permutation, MutationReport)> {
        let mut offspring = parent.clone();
        let report = self.mutate_into(parent, &mut offspring, rng)?;
        Ok((offspring, report))
    }

    /// Writes the offspring into a caller-owned buffer of the same size.
    pub fn mutate_into<R: Rng + ?Sized>(
        &self,
        parent: &Permutation,
        offspring: &mut Permutation,
        rng: &mut R,
    ) -> Result<MutationReport> {
        let k = self.strength.sample(rng);
        match self.kind {
            MutationKind::Swap => swap_with_strength_into(parent, k, offspring, rng),
            MutationKind::Scramble => Ok(scramble_with_strength_into(parent, k, offspring, rng)),
        }
    }
}

/// Swap mutation: draws `k` and applies `k` independent uniform
/// transpositions.
pub fn swap_mutate<R: Rng + ?Sized>(
    sigma: &Permutation,
    dist: &StrengthDistribution,
    rng: &mut R,
) -> Result<(Permutation, MutationReport)> {
    let k = dist.sample(rng);
    swap_with_strength(sigma, k, rng)
}

/// Scramble mutation: draws `k`; returns the parent if `k > n`, otherwise
/// re-arranges a uniform `k`-subset uniformly.
pub fn scramble_mutate<R: Rng + ?Sized>(
    sigma: &Permutation,
    dist: &StrengthDistribution,
    rng: &mut R,
) -> (Permutation, MutationReport) {
    let k = dist.sample(rng);
    scramble_with_strength(sigma, k, rng)
}

/// Swap mutation with a given strength.
pub fn swap_with_strength<R: Rng + ?Sized>(
    sigma: &Permutation,
    k: usize,
    rng: &mut R,
) -> Result<(Permutation, MutationReport)> {
    let mut offspring = sigma.clone();
    let report = swap_with_strength_into(sigma, k, &mut offspring, rng)?;
    Ok((offspring, report))
}

/// Scramble mutation with a given strength.
pub fn scramble_with_strength<R: Rng + ?Sized>(
    sigma: &Permutation,
    k: usize,
    rng: &mut R,
) -> (Permutation, MutationReport) {
    let mut offspring = sigma.clone();
    let report = scramble_with_strength_into(sigma, k, &mut offspring, rng);
    (offspring, report)
}

fn swap_with_strength_into<R: Rng + ?Sized>(
    parent: &Permutation,
    k: usize,
    offspring: &mut Permutation,
    rng: &mut R,
) -> Result<MutationReport> {
    let n = parent.n();
    if n < 2 {
        return Err(Error::NoTransposition(n));
    }
    offspring.copy_from(parent);
    let word = offspring.as_zero_based_mut();
    let mut touched = Vec::with_capacity(2 * k);
    for _ in 0..k {
        // A uniform pair of positions {i, j} holds a uniform pair of values
        // {a, b}, and swapping the two positions is exactly (a b) ∘ σ.
        let i = rng.random_range(0..n);
        let mut j = rng.random_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        touched.push(word[i] + 1);
        touched.push(word[j] + 1);
        word.swap(i, j);
    }
    touched.sort_unstable();
    touched.dedup();
    let void_class = classify_void(MutationKind::Swap, k, false, parent, offspring);
    Ok(MutationReport {
        k,
        touched,
        void_class,
    })
}

fn scramble_with_strength_into<R: Rng + ?Sized>(
    parent: &Permutation,
    k: usize,
    offspring: &mut Permutation,
    rng: &mut R,
) -> MutationReport {
    let n = parent.n();
    offspring.copy_from(parent);
    if k > n {
        return MutationReport {
            k,
            touched: Vec::new(),
            void_class: VoidClass::EasyVoid,
        };
    }
    // S is the set of values held at k uniform positions, itself a uniform
    // k-subset of [1..n]; ρ̄ ∘ σ then rewrites exactly those positions.
    let positions = index::sample(rng, n, k).into_vec();
    let values: Vec<usize> = positions
        .iter()
        .map(|&p| parent.as_zero_based()[p] + 1)
        .collect();
    let rho = random_arrangement(&values, rng);
    let word = offspring.as_zero_based_mut();
    for (&p, &v) in positions.iter().zip(rho.image()) {
        word[p] = v - 1;
    }
    let void_class = classify_void(MutationKind::Scramble, k, rho.is_identity(), parent, offspring);
    let mut touched = values;
    touched.sort_unstable();
    MutationReport {
        k,
        touched,
        void_class,
    }
}

/// Void classification of a finished mutation.
///
/// Swap: `EasyVoid` iff `k = 0`, otherwise `HardVoid` iff the offspring
/// equals the parent (element-wise comparison). Scramble: `EasyVoid` iff
/// `k ≤ 1`, `k > n` or the arrangement is the identity on `S`; decided
/// without comparing permutations, and never `HardVoid`.
pub fn classify_void(
    kind: MutationKind,
    k: usize,
    arrangement_is_identity: bool,
    parent: &Permutation,
    offspring: &Permutation,
) -> VoidClass {
    match kind {
        MutationKind::Swap => {
            if k == 0 {
                VoidClass::EasyVoid
            } else if parent == offspring {
                VoidClass::HardVoid
            } else {
                VoidClass::NotVoid
            }
        }
        MutationKind::Scramble => {
            if k <= 1 || k > parent.n() || arrangement_is_identity {
                VoidClass::EasyVoid
            } else {
                VoidClass::NotVoid
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::stream;

    #[test]
    fn operator_names_round_trip() {
        for op in OperatorName::ALL {
            assert_eq!(op.as_str().parse::<OperatorName>().unwrap(), op);
            assert_eq!(op.build(10, 1.5).unwrap().name(), op);
        }
        assert!("swap".parse::<OperatorName>().is_err());
        assert!(OperatorName::SwapHt.build(10, 1.0).is_err());
        // beta is ignored by the Poisson operators
        assert!(OperatorName::SwapPoi.build(10, 0.5).is_ok());
    }

    #[test]
    fn swap_with_zero_strength_is_easy_void() {
        let mut rng = stream(1);
        let sigma = Permutation::uniform_random(8, &mut rng);
        let (child, report) = swap_with_strength(&sigma, 0, &mut rng).unwrap();
        assert_eq!(child, sigma);
        assert_eq!(report.void_class, VoidClass::EasyVoid);
        assert!(report.touched.is_empty());
    }

    #[test]
    fn swap_needs_two_elements() {
        let mut rng = stream(2);
        let one = Permutation::identity(1);
        assert!(matches!(
            swap_with_strength(&one, 1, &mut rng),
            Err(Error::NoTransposition(1))
        ));
        assert!(swap_mutate(&one, &StrengthDistribution::PoissonUnit, &mut rng).is_err());
    }

    #[test]
    fn single_swap_is_a_transposition() {
        let mut rng = stream(3);
        let sigma = Permutation::uniform_random(9, &mut rng);
        for _ in 0..200 {
            let (child, report) = swap_with_strength(&sigma, 1, &mut rng).unwrap();
            assert_eq!(report.void_class, VoidClass::NotVoid);
            assert_eq!(report.touched.len(), 2);
            let (a, b) = (report.touched[0], report.touched[1]);
            assert_eq!(child, sigma.apply_transposition(a, b).unwrap());
        }
    }

    #[test]
    fn two_swaps_return_parent_with_probability_one_over_ten() {
        // Brute force over ordered pairs of transpositions of [1..5]: the
        // product is the identity iff the second equals the first.
        let sigma = Permutation::identity(5);
        let pairs: Vec<(usize, usize)> = (1..=5)
            .flat_map(|a| (a + 1..=5).map(move |b| (a, b)))
            .collect();
        let mut identity = 0;
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                let t = sigma
                    .apply_transposition(a, b)
                    .unwrap()
                    .apply_transposition(c, d)
                    .unwrap();
                if t == sigma {
                    identity += 1;
                }
            }
        }
        let exact = identity as f64 / (pairs.len() * pairs.len()) as f64;
        assert!((exact - 0.1).abs() < 1e-12);

        let mut rng = stream(4);
        let draws = 400_000;
        let mut hard = 0;
        for _ in 0..draws {
            let (child, report) = swap_with_strength(&sigma, 2, &mut rng).unwrap();
            if report.void_class == VoidClass::HardVoid {
                assert_eq!(child, sigma);
                hard += 1;
            }
        }
        assert!((hard as f64 / draws as f64 - exact).abs() < 0.005);
    }

    #[test]
    fn classify_examples() {
        let p = Permutation::identity(4);
        let q = p.apply_transposition(1, 2).unwrap();
        assert_eq!(classify_void(MutationKind::Swap, 0, false, &p, &p), VoidClass::EasyVoid);
        assert_eq!(classify_void(MutationKind::Swap, 2, false, &p, &p), VoidClass::HardVoid);
        assert_eq!(classify_void(MutationKind::Swap, 1, false, &p, &q), VoidClass::NotVoid);
        assert_eq!(
            classify_void(MutationKind::Scramble, 3, true, &p, &p),
            VoidClass::EasyVoid
        );
        assert_eq!(
            classify_void(MutationKind::Scramble, 5, false, &p, &p),
            VoidClass::EasyVoid
        );
        assert_eq!(
            classify_void(MutationKind::Scramble, 3, false, &p, &q),
            VoidClass::NotVoid
        );
    }

    #[test]
    fn scramble_small_and_oversized_strengths_return_parent() {
        let mut rng = stream(5);
        let sigma = Permutation::uniform_random(6, &mut rng);
        for k in [0, 1, 7, 100] {
            let (child, report) = scramble_with_strength(&sigma, k, &mut rng);
            assert_eq!(child, sigma);
            assert_eq!(report.void_class, VoidClass::EasyVoid);
        }
    }

    #[test]
    fn scramble_only_moves_values_in_the_subset() {
        let mut rng = stream(6);
        let sigma = Permutation::uniform_random(12, &mut rng);
        for k in 0..=12 {
            for _ in 0..50 {
                let (child, report) = scramble_with_strength(&sigma, k, &mut rng);
                assert_eq!(report.touched.len(), k);
                assert!(sigma.hamming_distance(&child).unwrap() <= k);
                for i in 1..=12 {
                    if !report.touched.contains(&sigma.image(i)) {
                        assert_eq!(child.image(i), sigma.image(i));
                    } else {
                        assert!(report.touched.contains(&child.image(i)));
                    }
                }
                assert_eq!(report.void_class.is_void(), child == sigma);
            }
        }
    }

    #[test]
    fn full_scramble_is_allowed() {
        let mut rng = stream(7);
        let sigma = Permutation::identity(5);
        let mut changed = false;
        for _ in 0..20 {
            let (child, report) = scramble_with_strength(&sigma, 5, &mut rng);
            assert_eq!(report.touched, vec![1, 2, 3, 4, 5]);
            changed |= child != sigma;
        }
        assert!(changed);
    }
}
