//! Partner counting.
//!
//! For a local invariant `ξ` of order `m` and the fiberwise automorphism group
//! `G = Aut_0(B/P^1)`, the subgroup
//!
//! ```text
//! I' = { k ∈ (Z/m)^* : k·ξ ∈ G·ξ }
//! ```
//!
//! controls the partner count. When the base automorphisms fixing `s` induce
//! only the identity on `P^1` (`n1 = 1`), the partners are in bijection with
//! the cosets of `I'` in `(Z/m)^*`, so there are `φ(m) / |I'|` of them. In
//! general only the lower bound `φ(m) / (n1·|G|)` holds.

use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::torsion::TorsionPoint;
use crate::wc_action::AutAction;

/// Euler's totient, by trial-division factorization.
pub fn totient(m: u64) -> u64 {
    assert!(m >= 1, "totient of 0");
    let mut n = m;
    let mut phi = m;
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            while n.is_multiple_of(p) {
                n /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if n > 1 {
        phi -= phi / n;
    }
    phi
}

/// Residues of `(Z/m)^*` in increasing order. For `m = 1` this is `[0]`.
pub fn units(m: u64) -> Vec<u64> {
    if m == 1 {
        return vec![0];
    }
    (1..m).filter(|k| k.gcd(&m) == 1).collect()
}

/// A set of residues in `(Z/m)^*`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct UnitGroupSubset {
    modulus: u64,
    members: Vec<u64>,
}

impl UnitGroupSubset {
    pub fn new(modulus: u64, mut members: Vec<u64>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::ZeroModulus);
        }
        members.iter_mut().for_each(|k| *k %= modulus);
        members.sort_unstable();
        members.dedup();
        if let Some(k) = members.iter().find(|k| k.gcd(&modulus) != 1) {
            return Err(Error::InvalidConfig(format!(
                "{k} is not a unit mod {modulus}"
            )));
        }
        Ok(UnitGroupSubset { modulus, members })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, k: u64) -> bool {
        self.members.binary_search(&(k % self.modulus)).is_ok()
    }

    /// Closed under multiplication (hence a subgroup, the group being finite).
    pub fn is_subgroup(&self) -> bool {
        !self.members.is_empty()
            && self.members.iter().all(|&a| {
                self.members.iter().all(|&b| {
                    self.contains(((a as u128 * b as u128) % self.modulus as u128) as u64)
                })
            })
    }
}

fn check_primitive(xi: &TorsionPoint) -> Result<()> {
    let order = xi.order();
    if order != xi.modulus() {
        return Err(Error::NotPrimitive {
            order,
            expected: xi.modulus(),
        });
    }
    Ok(())
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

/// Integers `w` with `Σ w_j·ξ_j ≡ 1 (mod m)`; exist because `ξ` has order
/// `m`, so the coordinates have no common factor with `m`.
fn coordinate_weights(xi: &TorsionPoint) -> Vec<i128> {
    let m = xi.modulus() as i128;
    let c: Vec<i128> = xi.coords().iter().map(|&c| c as i128).collect();
    let (g, x, y) = match c[..] {
        [a] => (a, 1, 0),
        [a, b] => ext_gcd(a, b),
        _ => unreachable!(),
    };
    let (_, ginv, _) = ext_gcd(g.rem_euclid(m), m);
    let mut w = vec![x * ginv, y * ginv];
    w.truncate(c.len());
    w
}

/// `I'` for the invariant `xi` of order `m = xi.modulus()`.
///
/// Multiplication by `k` is injective on `Z/m·ξ`, so each orbit point is hit by
/// at most one `k`; it is recovered from the coordinate weights and checked.
pub fn i_prime(act: &AutAction, xi: &TorsionPoint) -> Result<UnitGroupSubset> {
    check_primitive(xi)?;
    let orbit = act.orbit(xi)?;
    let m = xi.modulus();
    if m == 1 {
        return UnitGroupSubset::new(1, vec![0]);
    }
    let w = coordinate_weights(xi);
    let mut members: Vec<u64> = orbit
        .iter()
        .filter_map(|q| {
            let k = q
                .coords()
                .iter()
                .zip(&w)
                .map(|(&c, &wj)| c as i128 * wj)
                .sum::<i128>()
                .rem_euclid(m as i128) as u64;
            (k.gcd(&m) == 1 && &xi.scalar_mul(k as i64) == q).then_some(k)
        })
        .collect();
    members.sort_unstable();
    members.dedup();
    UnitGroupSubset::new(m, members)
}

/// Cosets `i·I'` of `(Z/m)^*`, ordered by smallest member.
pub fn partner_classes(act: &AutAction, xi: &TorsionPoint) -> Result<Vec<UnitGroupSubset>> {
    let ip = i_prime(act, xi)?;
    Ok(cosets(&ip))
}

fn cosets(sub: &UnitGroupSubset) -> Vec<UnitGroupSubset> {
    let m = sub.modulus();
    let all = units(m);
    let mut seen = vec![false; m as usize];
    let mut out = Vec::new();
    for &i in &all {
        if seen[i as usize] {
            continue;
        }
        let coset: Vec<u64> = sub
            .members()
            .iter()
            .map(|&j| ((i as u128 * j as u128) % m as u128) as u64)
            .collect();
        for &k in &coset {
            seen[k as usize] = true;
        }
        out.push(UnitGroupSubset::new(m, coset).expect("products of units are units"));
    }
    out
}

fn ratio_as_string<S: Serializer>(r: &Ratio<u64>, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
}

/// Where the value of `n1` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum N1Source {
    /// Supplied by the caller.
    Given,
    /// Forced by three fixed points of the configuration.
    Certified,
    /// Size of the stabilizer over the rationals; not certified over `C`.
    RationalStabilizer,
}

/// What the report took on trust.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Assumptions {
    /// Size of the image of the base-point stabilizer in `Aut P^1`.
    pub n1: u64,
    pub n1_source: N1Source,
    /// `n2 <= n1` always; `Aut S` itself is not computed.
    pub n2_upper_bound: u64,
    pub aut_order: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FmReport {
    pub m: u64,
    pub xi: TorsionPoint,
    pub action: AutAction,
    pub phi_m: u64,
    pub i_prime: UnitGroupSubset,
    /// Present when the count is proven exact: `m <= 2`, or `n1 = 1`.
    pub fm_count_exact: Option<u64>,
    #[serde(serialize_with = "ratio_as_string")]
    pub lower_bound: Ratio<u64>,
    /// Smallest residue of each partner class; empty when the count is not exact.
    pub partner_reps: Vec<u64>,
    pub n0: u64,
    /// `λ_{S/P^1}`: every (-1)-curve is an `m`-section.
    pub lambda: u64,
    pub assumptions: Assumptions,
}

impl FmReport {
    pub const TSV_HEADER: &'static str =
        "m\tphi\ti_prime_size\tfm_exact\tlower_bound_num\tlower_bound_den\treps";

    /// One row in the column order of [`Self::TSV_HEADER`]. A missing exact
    /// count is written as `-`, the representatives comma-separated.
    pub fn tsv_row(&self) -> String {
        let mut row = String::new();
        let exact = self
            .fm_count_exact
            .map_or("-".to_string(), |c| c.to_string());
        let reps: Vec<String> = self.partner_reps.iter().map(u64::to_string).collect();
        write!(
            row,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.m,
            self.phi_m,
            self.i_prime.len(),
            exact,
            self.lower_bound.numer(),
            self.lower_bound.denom(),
            reps.join(",")
        )
        .unwrap();
        row
    }
}

pub fn fm_number(act: &AutAction, xi: &TorsionPoint, n1: u64) -> Result<FmReport> {
    if n1 == 0 {
        return Err(Error::InvalidConfig("n1 must be positive".into()));
    }
    let ip = i_prime(act, xi)?;
    let m = xi.modulus();
    let phi_m = totient(m);
    let n0 = n1 * act.group_order() as u64;
    let (fm_count_exact, partner_reps) = if m <= 2 || n1 == 1 {
        let classes = cosets(&ip);
        let reps: Vec<u64> = classes.iter().map(|c| c.members()[0]).collect();
        debug_assert_eq!(reps.len() as u64, phi_m / ip.len() as u64);
        (Some(reps.len() as u64), reps)
    } else {
        (None, Vec::new())
    };
    Ok(FmReport {
        m,
        xi: xi.clone(),
        action: *act,
        phi_m,
        i_prime: ip,
        fm_count_exact,
        lower_bound: Ratio::new(phi_m, n0),
        partner_reps,
        n0,
        lambda: m,
        assumptions: Assumptions {
            n1,
            n1_source: N1Source::Given,
            n2_upper_bound: n1,
            aut_order: act.group_order(),
        },
    })
}

/// How a sweep picks the invariant at each level.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum XiFamily {
    /// `(1,)` on `I_n` fibers, `(1, 1)` on smooth ones.
    Default,
    /// The same integer coordinates reduced at every level.
    Coords(Vec<i64>),
}

impl XiFamily {
    pub fn at(&self, act: &AutAction, m: u64) -> Result<TorsionPoint> {
        match self {
            XiFamily::Default => {
                let rank = act.fiber_kind().rank().ok_or_else(|| {
                    Error::KindMismatch("no nonzero invariant on a trivial local group".into())
                })?;
                TorsionPoint::new(m, &vec![1; rank])
            }
            XiFamily::Coords(c) => TorsionPoint::new(m, c),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SkippedRow {
    pub m: u64,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<FmReport>,
    pub skipped: Vec<SkippedRow>,
}

impl SweepTable {
    pub fn to_tsv(&self) -> String {
        let mut out = String::from(FmReport::TSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.tsv_row());
            out.push('\n');
        }
        out
    }
}

/// One report per level in `range`, in increasing `m`. Levels where the
/// family gives a non-primitive invariant (or `m = 0`) are recorded as skipped.
pub fn sweep(
    act: &AutAction,
    family: &XiFamily,
    range: RangeInclusive<u64>,
    n1: u64,
) -> SweepTable {
    let results: Vec<(u64, Result<FmReport>)> = range
        .into_par_iter()
        .map(|m| {
            let row = if m == 0 {
                Err(Error::ZeroModulus)
            } else {
                family.at(act, m).and_then(|xi| fm_number(act, &xi, n1))
            };
            (m, row)
        })
        .collect();
    let mut table = SweepTable {
        rows: Vec::new(),
        skipped: Vec::new(),
    };
    for (m, r) in results {
        match r {
            Ok(row) => table.rows.push(row),
            Err(e) => table.skipped.push(SkippedRow {
                m,
                reason: e.to_string(),
            }),
        }
    }
    table
}

/// Smallest even `m` with `φ(m) / n0 >= target`, where `n0 = n1·|G|`.
pub fn minimal_even_modulus(act: &AutAction, n1: u64, target: u64) -> u64 {
    let n0 = n1 * act.group_order() as u64;
    (1..)
        .map(|j| 2 * j)
        .find(|&m| totient(m) >= target * n0)
        .expect("φ is unbounded")
}
