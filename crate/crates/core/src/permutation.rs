//! Permutations of the ground set `[1..n]`.
//!
//! Storage is 0-indexed; every public accessor, constructor and text form is
//! 1-based. The text form is the comma-separated word representation, e.g.
//! `"2,1,4,5,3"` for `(12)(345)`.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A bijection on `[1..n]` in word representation `(σ(1), …, σ(n))`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// The identity on `[1..n]`.
    ///
    /// Panics if `n == 0`.
    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "permutation size must be at least 1");
        Self {
            images: (0..n).collect(),
        }
    }

    /// Uniformly random element of `S_n` (Fisher–Yates shuffle).
    ///
    /// Panics if `n == 0`.
    pub fn uniform_random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let mut p = Self::identity(n);
        p.images.shuffle(rng);
        p
    }

    /// Builds a permutation from 1-based images.
    pub fn from_images(images: &[usize]) -> Result<Self> {
        let zero_based = images
            .iter()
            .map(|&v| {
                if v == 0 || v > images.len() {
                    Err(Error::ElementOutOfRange {
                        element: v,
                        n: images.len(),
                    })
                } else {
                    Ok(v - 1)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_zero_based(zero_based)
    }

    /// Builds a permutation from 0-based images.
    pub fn from_zero_based(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || seen[v] {
                return Err(Error::NotABijection { n });
            }
            seen[v] = true;
        }
        Ok(Self { images })
    }

    /// Builds the permutation that is the product of the given disjoint
    /// cycles (1-based elements). Elements not mentioned are fixed.
    pub fn from_cycles(n: usize, cycles: &[Vec<usize>]) -> Result<Self> {
        if n == 0 {
            return Err(Error::EmptyPermutation);
        }
        let mut images: Vec<usize> = (0..n).collect();
        let mut used = vec![false; n];
        for cycle in cycles {
            for &e in cycle {
                if e == 0 || e > n {
                    return Err(Error::ElementOutOfRange { element: e, n });
                }
                if used[e - 1] {
                    return Err(Error::NotABijection { n });
                }
                used[e - 1] = true;
            }
            for (idx, &e) in cycle.iter().enumerate() {
                let next = cycle[(idx + 1) % cycle.len()];
                images[e - 1] = next - 1;
            }
        }
        Ok(Self { images })
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// `σ(i)` for 1-based `i`.
    ///
    /// Panics if `i` is outside `[1..n]`.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] + 1
    }

    /// 1-based word representation.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|v| v + 1).collect()
    }

    /// 0-based word representation.
    pub fn as_zero_based(&self) -> &[usize] {
        &self.images
    }

    pub(crate) fn as_zero_based_mut(&mut self) -> &mut [usize] {
        &mut self.images
    }

    pub(crate) fn copy_from(&mut self, other: &Permutation) {
        self.images.clear();
        self.images.extend_from_slice(&other.images);
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// `τ ∘ σ` where `self` is `τ`, i.e. `(τ ∘ σ)(i) = τ(σ(i))`.
    pub fn compose(&self, sigma: &Permutation) -> Result<Permutation> {
        check_same_size(self, sigma)?;
        Ok(Permutation {
            images: sigma.images.iter().map(|&v| self.images[v]).collect(),
        })
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.n()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v] = i;
        }
        Permutation { images: inv }
    }

    /// `(a b) ∘ σ`: swaps the positions holding the values `a` and `b`.
    pub fn apply_transposition(&self, a: usize, b: usize) -> Result<Permutation> {
        let n = self.n();
        for e in [a, b] {
            if e == 0 || e > n {
                return Err(Error::ElementOutOfRange { element: e, n });
            }
        }
        if a == b {
            return Err(Error::DegenerateTransposition(a));
        }
        let mut out = self.clone();
        for v in out.images.iter_mut() {
            if *v == a - 1 {
                *v = b - 1;
            } else if *v == b - 1 {
                *v = a - 1;
            }
        }
        Ok(out)
    }

    /// Number of `i` with `σ(i) = i`.
    pub fn fixed_point_count(&self) -> usize {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &v)| i == v)
            .count()
    }

    pub fn cycle_decomposition(&self) -> CycleDecomposition {
        let n = self.n();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        let mut fixed_points = Vec::new();
        // Ascending start points give min-first cycles already sorted by head.
        for start in 0..n {
            if visited[start] {
                continue;
            }
            if self.images[start] == start {
                visited[start] = true;
                fixed_points.push(start + 1);
                continue;
            }
            let mut cycle = Vec::new();
            let mut cur = start;
            while !visited[cur] {
                visited[cur] = true;
                cycle.push(cur + 1);
                cur = self.images[cur];
            }
            cycles.push(cycle);
        }
        CycleDecomposition {
            n,
            cycles,
            fixed_points,
        }
    }

    /// Indicator bit string `x(σ)` with `x_i = 1` iff `σ(i) = i`.
    pub fn to_indicator(&self) -> Vec<bool> {
        self.images
            .iter()
            .enumerate()
            .map(|(i, &v)| i == v)
            .collect()
    }

    /// `|{i : σ(i) ≠ τ(i)}|`.
    pub fn hamming_distance(&self, tau: &Permutation) -> Result<usize> {
        check_same_size(self, tau)?;
        Ok(self
            .images
            .iter()
            .zip(&tau.images)
            .filter(|(a, b)| a != b)
            .count())
    }
}

fn check_same_size(a: &Permutation, b: &Permutation) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::SizeMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    Ok(())
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (idx, v) in self.images.iter().enumerate() {
            if idx > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", v + 1)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parse_err = |reason: String| Error::Parse {
            input: s.to_string(),
            reason,
        };
        let images = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<usize>()
                    .map_err(|e| parse_err(format!("{tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Permutation::from_images(&images).map_err(|e| parse_err(e.to_string()))
    }
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Canonical disjoint-cycle form: every cycle has length ≥ 2 and starts with
/// its minimum, cycles are sorted by first element, fixed points are listed
/// separately in ascending order. All elements are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleDecomposition {
    n: usize,
    cycles: Vec<Vec<usize>>,
    fixed_points: Vec<usize>,
}

impl CycleDecomposition {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn fixed_points(&self) -> &[usize] {
        &self.fixed_points
    }

    /// Number of cycles counting fixed points as 1-cycles.
    pub fn total_cycle_count(&self) -> usize {
        self.cycles.len() + self.fixed_points.len()
    }

    /// Lengths of the non-trivial cycles, ascending.
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles.iter().map(Vec::len).collect();
        lens.sort_unstable();
        lens
    }

    /// Minimum number of transpositions whose product is the permutation.
    pub fn transposition_length(&self) -> usize {
        self.n - self.total_cycle_count()
    }

    pub fn to_permutation(&self) -> Permutation {
        Permutation::from_cycles(self.n, &self.cycles)
            .expect("canonical decomposition is a valid cycle set")
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.cycles.is_empty() {
            return f.write_str("()");
        }
        for cycle in &self.cycles {
            f.write_str("(")?;
            for (idx, e) in cycle.iter().enumerate() {
                if idx > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use std::collections::HashMap;
    use rand_chacha::ChaCha8Rng;

    fn p(images: &[usize]) -> Permutation {
        Permutation::from_images(images).unwrap()
    }

    /// All of `S_n` by Heap's algorithm, 1-based.
    fn all_permutations(n: usize) -> Vec<Permutation> {
        let mut a: Vec<usize> = (1..=n).collect();
        let mut c = vec![0; n];
        let mut out = vec![p(&a)];
        let mut i = 0;
        while i < n {
            if c[i] < i {
                if i % 2 == 0 {
                    a.swap(0, i);
                } else {
                    a.swap(c[i], i);
                }
                out.push(p(&a));
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        out
    }

    #[test]
    fn identity_examples() {
        assert_eq!(Permutation::identity(3).images(), vec![1, 2, 3]);
        assert_eq!(Permutation::identity(1).images(), vec![1]);
        assert_eq!(Permutation::identity(7).fixed_point_count(), 7);
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_images(&[1, 1, 3]).is_err());
        assert!(Permutation::from_images(&[0, 1]).is_err());
        assert!(Permutation::from_images(&[1, 4, 2]).is_err());
        assert!(matches!(
            Permutation::from_images(&[]),
            Err(Error::EmptyPermutation)
        ));
    }

    #[test]
    fn compose_examples() {
        let sigma = p(&[2, 1, 3]);
        assert_eq!(Permutation::identity(3).compose(&sigma).unwrap(), sigma);
        assert_eq!(sigma.compose(&sigma).unwrap(), Permutation::identity(3));
        let c = p(&[2, 3, 1]);
        // (c ∘ sigma)(1) = c(2) = 3
        assert_eq!(c.compose(&sigma).unwrap().image(1), 3);
        assert!(matches!(
            sigma.compose(&Permutation::identity(4)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn cycle_notation_example_round_trips() {
        let sigma = p(&[2, 1, 4, 5, 3]);
        let built = Permutation::from_cycles(5, &[vec![1, 2], vec![3, 4, 5]]).unwrap();
        assert_eq!(built, sigma);
        let (t12, c345) = (
            Permutation::from_cycles(5, &[vec![1, 2]]).unwrap(),
            Permutation::from_cycles(5, &[vec![3, 4, 5]]).unwrap(),
        );
        assert_eq!(t12.compose(&c345).unwrap(), sigma);
        let d = sigma.cycle_decomposition();
        assert_eq!(d.cycles(), &[vec![1, 2], vec![3, 4, 5]]);
        assert!(d.fixed_points().is_empty());
        assert_eq!(d.to_permutation(), sigma);
        assert_eq!(d.to_string(), "(1 2)(3 4 5)");
    }

    #[test]
    fn cycle_decomposition_examples() {
        let d = Permutation::identity(4).cycle_decomposition();
        assert!(d.cycles().is_empty());
        assert_eq!(d.fixed_points(), &[1, 2, 3, 4]);
        let d = p(&[2, 3, 1]).cycle_decomposition();
        assert_eq!(d.cycles(), &[vec![1, 2, 3]]);
    }

    #[test]
    fn apply_transposition_examples() {
        let id = Permutation::identity(3);
        let t = id.apply_transposition(1, 2).unwrap();
        assert_eq!(t.images(), vec![2, 1, 3]);
        assert_eq!(t.apply_transposition(1, 2).unwrap(), id);
        assert!(matches!(
            id.apply_transposition(2, 2),
            Err(Error::DegenerateTransposition(2))
        ));
        assert!(id.apply_transposition(1, 4).is_err());
        // acts on values, not positions
        let s = p(&[3, 1, 2]);
        assert_eq!(s.apply_transposition(1, 3).unwrap().images(), vec![1, 3, 2]);
        let tau = Permutation::from_cycles(3, &[vec![1, 3]]).unwrap();
        assert_eq!(s.apply_transposition(1, 3).unwrap(), tau.compose(&s).unwrap());
    }

    #[test]
    fn fixed_points_and_derangements_of_s4() {
        assert_eq!(Permutation::identity(5).fixed_point_count(), 5);
        assert_eq!(p(&[2, 1, 3, 4, 5]).fixed_point_count(), 3);
        let all = all_permutations(4);
        assert_eq!(all.len(), 24);
        assert_eq!(all.iter().filter(|s| s.fixed_point_count() == 0).count(), 9);
        for s in &all {
            assert_ne!(s.fixed_point_count(), 3);
            let ones = s.to_indicator().iter().filter(|&&b| b).count();
            assert_eq!(ones, s.fixed_point_count());
        }
    }

    #[test]
    fn indicator_and_hamming_examples() {
        assert_eq!(Permutation::identity(3).to_indicator(), vec![true; 3]);
        assert_eq!(p(&[2, 1, 3]).to_indicator(), vec![false, false, true]);
        let s = p(&[2, 3, 1, 4, 5]);
        assert_eq!(s.hamming_distance(&s).unwrap(), 0);
        assert_eq!(
            Permutation::identity(3)
                .hamming_distance(&p(&[2, 1, 3]))
                .unwrap(),
            2
        );
        assert_eq!(Permutation::identity(5).hamming_distance(&s).unwrap(), 3);
    }

    #[test]
    fn decomposition_round_trips_exhaustively() {
        for n in 1..=6 {
            for s in all_permutations(n) {
                let d = s.cycle_decomposition();
                assert_eq!(d.to_permutation(), s);
                for c in d.cycles() {
                    assert!(c.len() >= 2);
                    assert_eq!(c[0], *c.iter().min().unwrap());
                }
                assert!(d.cycles().windows(2).all(|w| w[0][0] < w[1][0]));
            }
        }
    }

    #[test]
    fn transposition_length_matches_bfs_on_s5() {
        use std::collections::{HashMap, VecDeque};
        let n = 5;
        let id = Permutation::identity(n);
        let mut dist: HashMap<Permutation, usize> = HashMap::new();
        dist.insert(id.clone(), 0);
        let mut queue = VecDeque::from([id]);
        while let Some(cur) = queue.pop_front() {
            let d = dist[&cur];
            for a in 1..=n {
                for b in a + 1..=n {
                    let next = cur.apply_transposition(a, b).unwrap();
                    if !dist.contains_key(&next) {
                        dist.insert(next.clone(), d + 1);
                        queue.push_back(next);
                    }
                }
            }
        }
        assert_eq!(dist.len(), 120);
        for (s, d) in dist {
            let cd = s.cycle_decomposition();
            assert_eq!(d, n - cd.total_cycle_count());
            let by_cycles: usize = cd.cycles().iter().map(|c| c.len() - 1).sum();
            assert_eq!(d, by_cycles);
        }
    }

    #[test]
    fn text_form_round_trips() {
        let s: Permutation = "2,1,4,5,3".parse().unwrap();
        assert_eq!(s.images(), vec![2, 1, 4, 5, 3]);
        assert_eq!(s.to_string(), "2,1,4,5,3");
        assert!("2,1,1".parse::<Permutation>().is_err());
        assert!("a,b".parse::<Permutation>().is_err());
        let json = serde_json::to_string(&s).unwrap();
        assert_eq!(json, "\"2,1,4,5,3\"");
        assert_eq!(serde_json::from_str::<Permutation>(&json).unwrap(), s);
    }

    #[test]
    fn uniform_random_on_s3_is_uniform() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let samples = 600_000;
        let mut counts: HashMap<Vec<usize>, usize> = HashMap::new();
        for _ in 0..samples {
            *counts
                .entry(Permutation::uniform_random(3, &mut rng).images())
                .or_default() += 1;
        }
        assert_eq!(counts.len(), 6);
        let expected = samples as f64 / 6.0;
        let mut chi2 = 0.0;
        for &c in counts.values() {
            let freq = c as f64 / samples as f64;
            assert!((freq - 1.0 / 6.0).abs() < 0.01, "freq {freq}");
            chi2 += (c as f64 - expected).powi(2) / expected;
        }
        // 5 degrees of freedom, 0.999 quantile
        assert!(chi2 < 20.52, "chi2 {chi2}");
        assert_eq!(
            Permutation::uniform_random(1, &mut rng),
            Permutation::identity(1)
        );
    }

}
