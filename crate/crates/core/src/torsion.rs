//! Torsion points of `(Q/Z)^r`, `r ∈ {1, 2}`.
//!
//! A point `(a_1/m, ..., a_r/m)` is stored as the integer residues `a_j` at a
//! declared level `m`. Every point of one surface lives at the same level, so
//! the automorphism actions become integer matrices acting mod `m`.

use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "RawTorsionPoint", into = "RawTorsionPoint")]
pub struct TorsionPoint {
    modulus: u64,
    rank: u8,
    // Unused trailing slots stay 0.
    coords: [u64; 2],
}

#[derive(Serialize, Deserialize)]
struct RawTorsionPoint {
    m: u64,
    coords: Vec<i64>,
}

impl TryFrom<RawTorsionPoint> for TorsionPoint {
    type Error = Error;

    fn try_from(raw: RawTorsionPoint) -> Result<Self> {
        TorsionPoint::new(raw.m, &raw.coords)
    }
}

impl From<TorsionPoint> for RawTorsionPoint {
    fn from(p: TorsionPoint) -> Self {
        RawTorsionPoint {
            m: p.modulus,
            coords: p.coords().iter().map(|&c| c as i64).collect(),
        }
    }
}

fn reduce(c: i128, m: u64) -> u64 {
    c.rem_euclid(m as i128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl TorsionPoint {
    /// Builds the point with the given residues at level `modulus`; residues
    /// may be any integers and are reduced.
    pub fn new(modulus: u64, coords: &[i64]) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        if !(1..=2).contains(&coords.len()) {
            return Err(Error::BadRank(coords.len()));
        }
        let mut out = [0; 2];
        for (o, &c) in out.iter_mut().zip(coords) {
            *o = reduce(c as i128, modulus);
        }
        Ok(TorsionPoint {
            modulus,
            rank: coords.len() as u8,
            coords: out,
        })
    }

    pub fn zero(modulus: u64, rank: usize) -> Result<Self> {
        Self::new(modulus, &vec![0; rank])
    }

    pub(crate) fn from_residues(modulus: u64, coords: &[u64]) -> Self {
        debug_assert!(coords.iter().all(|&c| c < modulus));
        let mut out = [0; 2];
        out[..coords.len()].copy_from_slice(coords);
        TorsionPoint {
            modulus,
            rank: coords.len() as u8,
            coords: out,
        }
    }

    fn map_coords(&self, modulus: u64, f: impl Fn(u64) -> u64) -> TorsionPoint {
        let mut out = [0; 2];
        for (o, &c) in out.iter_mut().zip(self.coords()) {
            *o = f(c);
        }
        TorsionPoint {
            modulus,
            rank: self.rank,
            coords: out,
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords[..self.rank as usize]
    }

    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    pub fn is_zero(&self) -> bool {
        self.coords == [0, 0]
    }

    /// Least `d >= 1` with `d·p = 0`.
    pub fn order(&self) -> u64 {
        self.coords()
            .iter()
            .map(|&c| self.modulus / self.modulus.gcd(&c))
            .fold(1, |acc, d| acc.lcm(&d))
    }

    pub fn scalar_mul(&self, k: i64) -> TorsionPoint {
        let k = reduce(k as i128, self.modulus);
        self.map_coords(self.modulus, |c| mul_mod(k, c, self.modulus))
    }

    pub fn neg(&self) -> TorsionPoint {
        self.scalar_mul(-1)
    }

    /// Sum in `(Q/Z)^r`; the result lives at the lcm of the two levels.
    pub fn add(&self, other: &TorsionPoint) -> Result<TorsionPoint> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: other.rank(),
            });
        }
        let level = self.modulus.lcm(&other.modulus);
        let (ls, lo) = (level / self.modulus, level / other.modulus);
        let mut coords = [0; 2];
        for ((c, &a), &b) in coords.iter_mut().zip(self.coords()).zip(other.coords()) {
            *c = reduce(a as i128 * ls as i128 + b as i128 * lo as i128, level);
        }
        Ok(TorsionPoint {
            modulus: level,
            rank: self.rank,
            coords,
        })
    }

    /// The same element of `(Q/Z)^r` written at another level. Fails when the
    /// element is not representable there, i.e. its order does not divide
    /// `level`.
    pub fn at_level(&self, level: u64) -> Result<TorsionPoint> {
        if level == 0 {
            return Err(Error::ZeroModulus);
        }
        let order = self.order();
        if !level.is_multiple_of(order) {
            return Err(Error::NotPrimitive {
                order,
                expected: level,
            });
        }
        // c/m = c'/level with c' = c·level/m; exact because order | level.
        Ok(self.map_coords(level, |c| {
            ((c as u128 * level as u128) / self.modulus as u128) as u64 % level
        }))
    }
}

impl fmt::Display for TorsionPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, c) in self.coords().iter().enumerate() {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}/{}", c, self.modulus)?;
        }
        write!(f, ")")
    }
}

/// Shape of the local Weil–Châtelet group at a point of the base.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WcFiberKind {
    /// Smooth fiber: `(Q/Z)^2`.
    SmoothElliptic,
    /// Fiber of type `I_n`, `n > 0`: `Q/Z`.
    MultiplicativeIn(u32),
    /// Any other fiber: the zero group.
    Trivial,
}

impl WcFiberKind {
    /// Rank of the torsion group, `None` for the zero group.
    pub fn rank(&self) -> Option<usize> {
        match self {
            WcFiberKind::SmoothElliptic => Some(2),
            WcFiberKind::MultiplicativeIn(_) => Some(1),
            WcFiberKind::Trivial => None,
        }
    }
}

impl fmt::Display for WcFiberKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WcFiberKind::SmoothElliptic => write!(f, "smooth"),
            WcFiberKind::MultiplicativeIn(n) => write!(f, "I{n}"),
            WcFiberKind::Trivial => write!(f, "trivial"),
        }
    }
}

impl FromStr for WcFiberKind {
    type Err = Error;

    /// Accepts `smooth`, `trivial`, `I<n>` / `I_<n>` with `n > 0`, and the
    /// generic `In`, which stands for `I_1` (the action only sees the rank).
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => return Ok(WcFiberKind::SmoothElliptic),
            "trivial" => return Ok(WcFiberKind::Trivial),
            "In" | "I_n" => return Ok(WcFiberKind::MultiplicativeIn(1)),
            _ => {}
        }
        let n = s
            .strip_prefix('I')
            .map(|r| r.strip_prefix('_').unwrap_or(r))
            .and_then(|r| r.parse::<u32>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::Parse(format!("unknown fiber kind {s:?}")))?;
        Ok(WcFiberKind::MultiplicativeIn(n))
    }
}
