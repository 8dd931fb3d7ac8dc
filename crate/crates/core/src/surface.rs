//! Rational elliptic surface configurations.
//!
//! A configuration lists the singular fibers of the Jacobian `B → P^1` by base
//! point and Kodaira type, plus an optional marked point `s` carrying the
//! multiple fiber: its multiplicity `m` and the local invariant `ξ_s`. The
//! Tate–Shafarevich group of a rational `B` is trivial, so `ξ_s` determines
//! the surface.
//!
//! JSON layout:
//!
//! ```json
//! {
//!   "fibers": [{"at": "0", "type": "II*"}, {"at": "1", "type": "II"}],
//!   "marked": {"s": "2", "kind": "smooth", "m": 7, "xi": {"m": 7, "coords": [1, 4]}},
//!   "aut_order": 6,
//!   "n1": 1
//! }
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fm_count::{self, FmReport, N1Source};
use crate::moebius::{self, N1Bound};
use crate::torsion::{TorsionPoint, WcFiberKind};
use crate::wc_action::AutAction;
use crate::Point;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaFiber {
    /// `I_n`; `I_0` is a smooth fiber.
    I(u32),
    IStar(u32),
    II,
    III,
    IV,
    IIStar,
    IIIStar,
    IVStar,
}

impl KodairaFiber {
    /// Topological Euler number of the fiber.
    pub fn euler(&self) -> u32 {
        match *self {
            KodairaFiber::I(n) => n,
            KodairaFiber::IStar(n) => n + 6,
            KodairaFiber::II => 2,
            KodairaFiber::III => 3,
            KodairaFiber::IV => 4,
            KodairaFiber::IVStar => 8,
            KodairaFiber::IIIStar => 9,
            KodairaFiber::IIStar => 10,
        }
    }

    pub fn is_singular(&self) -> bool {
        *self != KodairaFiber::I(0)
    }

    /// Local Weil–Châtelet group at a fiber of this type.
    pub fn wc_kind(&self) -> WcFiberKind {
        match *self {
            KodairaFiber::I(0) => WcFiberKind::SmoothElliptic,
            KodairaFiber::I(n) => WcFiberKind::MultiplicativeIn(n),
            _ => WcFiberKind::Trivial,
        }
    }
}

impl fmt::Display for KodairaFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaFiber::I(n) => write!(f, "I{n}"),
            KodairaFiber::IStar(n) => write!(f, "I{n}*"),
            KodairaFiber::II => write!(f, "II"),
            KodairaFiber::III => write!(f, "III"),
            KodairaFiber::IV => write!(f, "IV"),
            KodairaFiber::IIStar => write!(f, "II*"),
            KodairaFiber::IIIStar => write!(f, "III*"),
            KodairaFiber::IVStar => write!(f, "IV*"),
        }
    }
}

impl FromStr for KodairaFiber {
    type Err = Error;

    /// Accepts `I3`, `I_3`, `I3*`, `I*3`, `I*_3`, `I_3*`, and the named types.
    fn from_str(s: &str) -> Result<Self> {
        let t: String = s
            .chars()
            .filter(|c| *c != '_' && !c.is_whitespace())
            .collect();
        let bad = || Error::Parse(format!("unknown Kodaira fiber type {s:?}"));
        Ok(match t.as_str() {
            "II" => KodairaFiber::II,
            "III" => KodairaFiber::III,
            "IV" => KodairaFiber::IV,
            "II*" => KodairaFiber::IIStar,
            "III*" => KodairaFiber::IIIStar,
            "IV*" => KodairaFiber::IVStar,
            _ => {
                let rest = t.strip_prefix('I').ok_or_else(bad)?;
                if let Some(n) = rest.strip_prefix('*').or_else(|| rest.strip_suffix('*')) {
                    KodairaFiber::IStar(n.parse().map_err(|_| bad())?)
                } else {
                    KodairaFiber::I(rest.parse().map_err(|_| bad())?)
                }
            }
        })
    }
}

impl Serialize for KodairaFiber {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for KodairaFiber {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberAt {
    pub at: Point,
    #[serde(rename = "type")]
    pub fiber: KodairaFiber,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedPoint {
    pub s: Point,
    #[serde(with = "kind_string")]
    pub kind: WcFiberKind,
    pub m: u64,
    pub xi: TorsionPoint,
}

mod kind_string {
    use super::WcFiberKind;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(k: &WcFiberKind, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&k.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<WcFiberKind, D::Error> {
        String::deserialize(d)?
            .parse()
            .map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceConfig {
    pub fibers: Vec<FiberAt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<MarkedPoint>,
    pub aut_order: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n1: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RuleCheck {
    pub rule: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub checks: Vec<RuleCheck>,
    pub warnings: Vec<String>,
    pub euler_sum: u32,
    /// `λ_{S/P^1} = m`.
    pub lambda: u64,
}

impl ValidationReport {
    pub fn failures(&self) -> impl Iterator<Item = &RuleCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Nonzero local invariants, indexed by base point; every other point carries
/// the zero element of its local group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalInvariants {
    pub level: u64,
    pub support: BTreeMap<Point, TorsionPoint>,
    #[serde(skip)]
    kinds: BTreeMap<Point, WcFiberKind>,
}

impl LocalInvariants {
    /// The invariant at `t`, or `None` where the local group is zero.
    pub fn at(&self, t: &Point) -> Option<TorsionPoint> {
        if let Some(x) = self.support.get(t) {
            return Some(x.clone());
        }
        let kind = self
            .kinds
            .get(t)
            .copied()
            .unwrap_or(WcFiberKind::SmoothElliptic);
        kind.rank()
            .map(|r| TorsionPoint::zero(self.level, r).expect("positive level"))
    }
}

fn check(rule: &'static str, passed: bool, detail: impl Into<String>) -> RuleCheck {
    RuleCheck {
        rule,
        passed,
        detail: if passed { String::new() } else { detail.into() },
    }
}

impl SurfaceConfig {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn multiplicity(&self) -> u64 {
        self.marked.as_ref().map_or(1, |mk| mk.m)
    }

    pub fn fiber_at(&self, t: &Point) -> Option<KodairaFiber> {
        self.fibers.iter().find(|f| &f.at == t).map(|f| f.fiber)
    }

    /// Singular fibers of the Jacobian, sorted by base point.
    pub fn discriminant(&self) -> Vec<(Point, KodairaFiber)> {
        let mut d: Vec<_> = self
            .fibers
            .iter()
            .filter(|f| f.fiber.is_singular())
            .map(|f| (f.at.clone(), f.fiber))
            .collect();
        d.sort();
        d
    }

    pub fn euler_sum(&self) -> u32 {
        self.fibers.iter().map(|f| f.fiber.euler()).sum()
    }

    /// Local group at the marked point, read off from the fiber listed there.
    fn geometric_kind_at_s(&self, mk: &MarkedPoint) -> WcFiberKind {
        self.fiber_at(&mk.s)
            .map_or(WcFiberKind::SmoothElliptic, |f| f.wc_kind())
    }

    pub fn validate(&self) -> ValidationReport {
        let mut checks = Vec::new();
        let mut warnings = Vec::new();

        let dup = self
            .fibers
            .iter()
            .enumerate()
            .find(|(i, f)| self.fibers[..*i].iter().any(|g| g.at == f.at));
        checks.push(check(
            "distinct_base_points",
            dup.is_none(),
            dup.map(|(_, f)| format!("two fibers over {}", f.at))
                .unwrap_or_default(),
        ));

        let euler = self.euler_sum();
        checks.push(check(
            "euler_sum_12",
            euler == 12,
            format!("singular fiber Euler numbers sum to {euler}, not 12"),
        ));

        let aut_ok = [1, 2, 4, 6].contains(&self.aut_order);
        checks.push(check(
            "aut_order",
            aut_ok,
            format!("aut_order {} not in {{1, 2, 4, 6}}", self.aut_order),
        ));
        if [4, 6].contains(&self.aut_order) {
            let j = if self.aut_order == 4 { 1728 } else { 0 };
            warnings.push(format!(
                "aut_order {} assumes a constant J-map with value {j}; not verified",
                self.aut_order
            ));
            let j_infinite = |f: &KodairaFiber| match *f {
                KodairaFiber::I(n) | KodairaFiber::IStar(n) => n > 0,
                _ => false,
            };
            if self.discriminant().iter().any(|(_, f)| j_infinite(f)) {
                warnings.push(
                    "fibers of type I_n or I_n* with n > 0 have j = ∞, so the J-map cannot be constant"
                        .into(),
                );
            }
        }

        if let Some(n1) = self.n1 {
            checks.push(check("n1_positive", n1 >= 1, "n1 must be at least 1"));
        }

        if let Some(mk) = &self.marked {
            let at_s = self.fiber_at(&mk.s);
            let position_ok = mk.m == 1 || matches!(at_s, None | Some(KodairaFiber::I(_)));
            checks.push(check(
                "marked_point_position",
                position_ok,
                format!(
                    "a multiple fiber sits over a smooth or I_n fiber, but s = {} carries {}",
                    mk.s,
                    at_s.map(|f| f.to_string()).unwrap_or_default()
                ),
            ));

            // The n of an I_n kind is informational: every I_n has local group Q/Z.
            let geometric = self.geometric_kind_at_s(mk);
            checks.push(check(
                "kind_consistency",
                std::mem::discriminant(&geometric) == std::mem::discriminant(&mk.kind),
                format!(
                    "declared kind {} but the fiber at s gives {}",
                    mk.kind, geometric
                ),
            ));

            checks.push(check(
                "trivial_forces_m1",
                mk.kind != WcFiberKind::Trivial || mk.m == 1,
                format!("trivial local group cannot carry multiplicity {}", mk.m),
            ));

            let rank_ok = match mk.kind.rank() {
                Some(r) => mk.xi.rank() == r,
                None => mk.xi.is_zero(),
            };
            checks.push(check(
                "xi_rank",
                rank_ok,
                format!(
                    "invariant {} does not live in the {} local group",
                    mk.xi, mk.kind
                ),
            ));

            let order = mk.xi.order();
            checks.push(check(
                "xi_order",
                mk.m >= 1 && order == mk.m,
                format!(
                    "invariant {} has order {order}, multiplicity is {}",
                    mk.xi, mk.m
                ),
            ));

            if aut_ok && mk.kind != WcFiberKind::Trivial {
                let act = AutAction::new(self.aut_order, mk.kind);
                checks.push(check(
                    "action_kind",
                    act.is_ok(),
                    act.err().map(|e| e.to_string()).unwrap_or_default(),
                ));
            }

            let others = self
                .discriminant()
                .iter()
                .filter(|(p, _)| *p != mk.s)
                .count();
            if others < 2 {
                warnings.push(format!(
                    "only {others} singular fiber(s) away from s; the base stabilizer may be infinite"
                ));
            }
        }

        ValidationReport {
            valid: checks.iter().all(|c| c.passed),
            checks,
            warnings,
            euler_sum: euler,
            lambda: self.multiplicity(),
        }
    }

    fn require_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.valid {
            return Ok(());
        }
        let msgs: Vec<String> = report
            .failures()
            .map(|c| format!("{}: {}", c.rule, c.detail))
            .collect();
        Err(Error::InvalidConfig(msgs.join("; ")))
    }

    /// The marked invariant rewritten at level `m`.
    fn xi_at_level(&self, mk: &MarkedPoint) -> Result<TorsionPoint> {
        mk.xi.at_level(mk.m)
    }

    pub fn local_invariants(&self) -> Result<LocalInvariants> {
        self.require_valid()?;
        let kinds = self
            .fibers
            .iter()
            .map(|f| (f.at.clone(), f.fiber.wc_kind()))
            .collect();
        let mut support = BTreeMap::new();
        if let Some(mk) = &self.marked {
            let xi = self.xi_at_level(mk)?;
            if !xi.is_zero() {
                support.insert(mk.s.clone(), xi);
            }
        }
        Ok(LocalInvariants {
            level: self.multiplicity(),
            support,
            kinds,
        })
    }

    /// The fiberwise automorphism action at the marked point.
    pub fn action(&self) -> Result<AutAction> {
        let mk = self
            .marked
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("no marked point".into()))?;
        AutAction::new(self.aut_order, mk.kind)
    }

    /// The action at `s` and the marked invariant at level `m`.
    pub fn marked_invariant(&self) -> Result<(AutAction, TorsionPoint)> {
        self.require_valid()?;
        let mk = self
            .marked
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("no marked point".into()))?;
        Ok((self.action()?, self.xi_at_level(mk)?))
    }

    /// Partner report. Uses the declared `n1` if present, else the stabilizer
    /// bound computed from the configuration.
    pub fn fm_report(&self) -> Result<FmReport> {
        self.require_valid()?;
        let mk = self
            .marked
            .as_ref()
            .ok_or_else(|| Error::InvalidConfig("no marked point".into()))?;
        let (n1, source) = match (self.n1, moebius::n1_upper_bound(self)) {
            (Some(n1), _) => (n1, N1Source::Given),
            (None, N1Bound::Exact(n)) => (n, N1Source::Certified),
            (None, N1Bound::RationalStabilizer(n)) => (n, N1Source::RationalStabilizer),
            (None, N1Bound::Unknown) => {
                return Err(Error::InvalidConfig(
                    "n1 not given and the stabilizer of s is not computable".into(),
                ))
            }
        };
        let mut report = fm_count::fm_number(&self.action()?, &self.xi_at_level(mk)?, n1)?;
        report.assumptions.n1_source = source;
        Ok(report)
    }

    /// Same configuration with every base point (and `s`) moved by `f`.
    pub fn relabel(&self, f: impl Fn(&Point) -> Point) -> SurfaceConfig {
        let mut out = self.clone();
        for fib in &mut out.fibers {
            fib.at = f(&fib.at);
        }
        if let Some(mk) = &mut out.marked {
            mk.s = f(&mk.s);
        }
        out
    }
}
