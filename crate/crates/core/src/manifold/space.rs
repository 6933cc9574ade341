use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which homogeneous space a computation lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Stiefel,
    Grassmann,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Stiefel => "stiefel",
            Family::Grassmann => "grassmann",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "stiefel" | "v" => Ok(Family::Stiefel),
            "grassmann" | "g" => Ok(Family::Grassmann),
            other => Err(Error::InvalidSpec(format!("unknown family '{other}'"))),
        }
    }
}

/// A complex Stiefel manifold `V_{k,n}` or Grassmann manifold `G_{k,n}`.
///
/// Grassmann spaces follow the `k ≤ n/2` convention; the complement is never
/// substituted silently.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawSpace")]
pub struct SpaceSpec {
    family: Family,
    k: usize,
    n: usize,
}

#[derive(Deserialize)]
struct RawSpace {
    family: Family,
    k: usize,
    n: usize,
}

impl TryFrom<RawSpace> for SpaceSpec {
    type Error = Error;

    fn try_from(raw: RawSpace) -> Result<Self> {
        SpaceSpec::new(raw.family, raw.k, raw.n)
    }
}

impl SpaceSpec {
    pub fn new(family: Family, k: usize, n: usize) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::InvalidSpec(format!("k and n must be positive (k={k}, n={n})")));
        }
        match family {
            Family::Stiefel if k > n => Err(Error::InvalidSpec(format!("Stiefel needs k <= n (k={k}, n={n})"))),
            Family::Grassmann if 2 * k > n => {
                Err(Error::InvalidSpec(format!("Grassmann needs k <= n/2 (k={k}, n={n}); use the complement")))
            }
            _ => Ok(Self { family, k, n }),
        }
    }

    pub fn stiefel(k: usize, n: usize) -> Result<Self> {
        Self::new(Family::Stiefel, k, n)
    }

    pub fn grassmann(k: usize, n: usize) -> Result<Self> {
        Self::new(Family::Grassmann, k, n)
    }

    /// `U(n)`, viewed as `V_{n,n}`.
    pub fn unitary(n: usize) -> Result<Self> {
        Self::new(Family::Stiefel, n, n)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_unitary(&self) -> bool {
        self.family == Family::Stiefel && self.k == self.n
    }

    /// Real dimension `D = 2nk − εk²`, with ε = 1 (Stiefel) or 2 (Grassmann).
    pub fn real_dimension(&self) -> usize {
        match self.family {
            Family::Stiefel => self.k * (2 * self.n - self.k),
            Family::Grassmann => 2 * self.k * (self.n - self.k),
        }
    }
}

impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.family {
            Family::Stiefel => "V",
            Family::Grassmann => "G",
        };
        write!(f, "{tag}_{{{},{}}}", self.k, self.n)
    }
}
