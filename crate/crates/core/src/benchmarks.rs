//! Fitness functions on `S_n` obtained by lifting pseudo-Boolean functions
//! through the fixed-point indicator `x(σ)`.
//!
//! The optimum of every benchmark is the identity.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::permutation::Permutation;

/// Pseudo-Boolean functions used as lift sources and as oracles.
pub mod pseudo_boolean {
    pub fn one_max(x: &[bool]) -> usize {
        x.iter().filter(|&&b| b).count()
    }

    pub fn leading_ones(x: &[bool]) -> usize {
        x.iter().take_while(|&&b| b).count()
    }

    /// `Jump_m`: `m + |x|` if `|x| ≤ n − m` or `|x| = n`, else `n − |x|`.
    pub fn jump(x: &[bool], m: usize) -> usize {
        let n = x.len();
        let ones = one_max(x);
        if ones + m <= n || ones == n {
            m + ones
        } else {
            n - ones
        }
    }
}

/// The concrete benchmark families addressable by name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchmarkKind {
    PHam,
    PLeadingOnes,
    PJump,
}

impl BenchmarkKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BenchmarkKind::PHam => "pham",
            BenchmarkKind::PLeadingOnes => "pleadingones",
            BenchmarkKind::PJump => "pjump",
        }
    }
}

impl fmt::Display for BenchmarkKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BenchmarkKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pham" => Ok(BenchmarkKind::PHam),
            "pleadingones" => Ok(BenchmarkKind::PLeadingOnes),
            "pjump" => Ok(BenchmarkKind::PJump),
            other => Err(Error::UnknownName(other.to_string())),
        }
    }
}

type BoolFn = dyn Fn(&[bool]) -> f64 + Send + Sync;

/// A pseudo-Boolean function `f : {0,1}^n → R` to be lifted to `S_n`.
#[derive(Clone)]
pub struct LiftedFunction {
    n: usize,
    f: Arc<BoolFn>,
    optimum: Option<f64>,
}

impl LiftedFunction {
    /// `optimum` is the value at which a run stops; `None` runs until the
    /// budget is exhausted.
    pub fn new<F>(n: usize, optimum: Option<f64>, f: F) -> Self
    where
        F: Fn(&[bool]) -> f64 + Send + Sync + 'static,
    {
        Self {
            n,
            f: Arc::new(f),
            optimum,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn optimum(&self) -> Option<f64> {
        self.optimum
    }

    pub fn eval_bits(&self, x: &[bool]) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for LiftedFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LiftedFunction")
            .field("n", &self.n)
            .field("optimum", &self.optimum)
            .finish_non_exhaustive()
    }
}

/// `g(σ) = f(x(σ))`.
pub fn lift(f: &LiftedFunction, sigma: &Permutation) -> Result<f64> {
    if f.n != sigma.n() {
        return Err(Error::SizeMismatch {
            left: f.n,
            right: sigma.n(),
        });
    }
    Ok(f.eval_bits(&sigma.to_indicator()))
}

/// Number of fixed points.
pub fn pham(sigma: &Permutation) -> usize {
    sigma.fixed_point_count()
}

/// Length of the longest prefix of fixed points.
pub fn pleadingones(sigma: &Permutation) -> usize {
    sigma
        .as_zero_based()
        .iter()
        .enumerate()
        .take_while(|&(i, &v)| i == v)
        .count()
}

fn check_jump(n: usize, m: usize) -> Result<()> {
    if m < 3 || m > n {
        return Err(Error::JumpParameter { n, m });
    }
    Ok(())
}

/// `PJump_{n,m}`.
pub fn pjump(sigma: &Permutation, m: usize) -> Result<usize> {
    check_jump(sigma.n(), m)?;
    Ok(pjump_unchecked(sigma, m))
}

/// `PJump_{n,m}` without the `m ≥ 3` guard. Exists for the `m = 2`
/// identity `PJump_{n,2} = g + 2`.
#[doc(hidden)]
pub fn pjump_unchecked(sigma: &Permutation, m: usize) -> usize {
    let n = sigma.n();
    let g = sigma.fixed_point_count();
    if g + m <= n || g == n {
        m + g
    } else {
        n - g
    }
}

/// Regions of `S_n` with respect to `PJump_{n,m}`; the labels partition
/// `S_n`, so `A2` here means `g < n − m` and `A2plus` means `g = n − m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum JumpRegion {
    A1,
    A2,
    A2plus,
    A3,
}

pub fn jump_region(sigma: &Permutation, m: usize) -> Result<JumpRegion> {
    let n = sigma.n();
    check_jump(n, m)?;
    Ok(region_of(n, m, sigma.fixed_point_count()))
}

fn region_of(n: usize, m: usize, g: usize) -> JumpRegion {
    if g == n {
        JumpRegion::A3
    } else if g + m == n {
        JumpRegion::A2plus
    } else if g + m < n {
        JumpRegion::A2
    } else {
        JumpRegion::A1
    }
}

/// A local optimum (`g = n − m`) whose displaced elements form `m/2`
/// disjoint transpositions (`m` even) or `(m−3)/2` transpositions plus one
/// 3-cycle (`m` odd).
pub fn is_good_local_optimum(sigma: &Permutation, m: usize) -> Result<bool> {
    if jump_region(sigma, m)? != JumpRegion::A2plus {
        return Ok(false);
    }
    let lens = sigma.cycle_decomposition().cycle_type();
    let twos = lens.iter().filter(|&&l| l == 2).count();
    Ok(if m.is_multiple_of(2) {
        twos == m / 2 && lens.len() == twos
    } else {
        twos == (m - 3) / 2 && lens.len() == twos + 1 && lens.last() == Some(&3)
    })
}

/// Which fitness function over which `n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BenchmarkSpec {
    PHam {
        n: usize,
    },
    PLeadingOnes {
        n: usize,
    },
    PJump {
        n: usize,
        m: usize,
    },
    #[serde(skip)]
    Lifted(LiftedFunction),
}

impl BenchmarkSpec {
    pub fn pham(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self::PHam { n })
    }

    pub fn pleadingones(n: usize) -> Result<Self> {
        check_size(n)?;
        Ok(Self::PLeadingOnes { n })
    }

    pub fn pjump(n: usize, m: usize) -> Result<Self> {
        check_jump(n, m)?;
        Ok(Self::PJump { n, m })
    }

    pub fn lifted(f: LiftedFunction) -> Result<Self> {
        check_size(f.n())?;
        Ok(Self::Lifted(f))
    }

    /// Builds a concrete benchmark; `m` is required for `PJump` only.
    pub fn from_kind(kind: BenchmarkKind, n: usize, m: Option<usize>) -> Result<Self> {
        match kind {
            BenchmarkKind::PHam => Self::pham(n),
            BenchmarkKind::PLeadingOnes => Self::pleadingones(n),
            BenchmarkKind::PJump => {
                let m = m.ok_or_else(|| Error::Config("pjump requires a jump size m".into()))?;
                Self::pjump(n, m)
            }
        }
    }

    pub fn kind(&self) -> Option<BenchmarkKind> {
        match self {
            Self::PHam { .. } => Some(BenchmarkKind::PHam),
            Self::PLeadingOnes { .. } => Some(BenchmarkKind::PLeadingOnes),
            Self::PJump { .. } => Some(BenchmarkKind::PJump),
            Self::Lifted(_) => None,
        }
    }

    pub fn n(&self) -> usize {
        match self {
            Self::PHam { n } | Self::PLeadingOnes { n } | Self::PJump { n, .. } => *n,
            Self::Lifted(f) => f.n(),
        }
    }

    pub fn jump_size(&self) -> Option<usize> {
        match self {
            Self::PJump { m, .. } => Some(*m),
            _ => None,
        }
    }

    /// Known optimum value (`n`, `n`, `n + m`); the lifted function's
    /// declared optimum otherwise.
    pub fn optimum(&self) -> Option<f64> {
        match self {
            Self::PHam { n } | Self::PLeadingOnes { n } => Some(*n as f64),
            Self::PJump { n, m } => Some((n + m) as f64),
            Self::Lifted(f) => f.optimum(),
        }
    }

    /// Full evaluation. Panics if `sigma` has the wrong size.
    pub fn evaluate(&self, sigma: &Permutation) -> f64 {
        assert_eq!(sigma.n(), self.n(), "permutation size does not match benchmark");
        match self {
            Self::PHam { .. } => pham(sigma) as f64,
            Self::PLeadingOnes { .. } => pleadingones(sigma) as f64,
            Self::PJump { m, .. } => pjump_unchecked(sigma, *m) as f64,
            Self::Lifted(f) => f.eval_bits(&sigma.to_indicator()),
        }
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::EmptyPermutation);
    }
    Ok(())
}
