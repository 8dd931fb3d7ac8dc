//! Fiber products `X = S ×_{P^1} S'` of two rational elliptic surfaces.
//!
//! When the two discriminants are disjoint, `X` is smooth, every fiber of
//! `X → P^1` has Euler number 0, `h^{1,0} = h^{2,0} = 0`, `h^{3,0} = 1`, and
//! `Pic X = (Pic S × Pic S') / Pic P^1` has rank `10 + 10 - 1 = 19`. The
//! remaining Hodge number follows from `e(X) = 2 (h^{1,1} - h^{1,2})`.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fm_count;
use crate::surface::{MarkedPoint, SurfaceConfig};
use crate::Point;

/// Picard number of a rational elliptic surface.
pub const RATIONAL_SURFACE_PICARD: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeDiamond {
    h: [[u32; 4]; 4],
}

impl HodgeDiamond {
    pub fn from_array(h: [[u32; 4]; 4]) -> Self {
        HodgeDiamond { h }
    }

    /// `h^{p,q}`.
    pub fn get(&self, p: usize, q: usize) -> u32 {
        self.h[p][q]
    }

    pub fn as_array(&self) -> &[[u32; 4]; 4] {
        &self.h
    }

    /// Complex conjugation and Serre duality.
    pub fn is_symmetric(&self) -> bool {
        (0..4).all(|p| {
            (0..4).all(|q| self.h[p][q] == self.h[q][p] && self.h[p][q] == self.h[3 - p][3 - q])
        })
    }

    pub fn euler(&self) -> i64 {
        (0..4)
            .flat_map(|p| (0..4).map(move |q| (p, q)))
            .map(|(p, q)| {
                let sign = if (p + q) % 2 == 0 { 1 } else { -1 };
                sign * self.h[p][q] as i64
            })
            .sum()
    }

    /// `b_k = Σ_{p+q=k} h^{p,q}`.
    pub fn betti(&self) -> [u32; 7] {
        let mut b = [0; 7];
        for p in 0..4 {
            for q in 0..4 {
                b[p + q] += self.h[p][q];
            }
        }
        b
    }
}

impl Serialize for HodgeDiamond {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.h.serialize(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ThreefoldReport {
    pub diamond: HodgeDiamond,
    pub euler: i64,
    pub kodaira_dim: u32,
    pub picard: u32,
    pub rel_picard: u32,
    pub smooth: bool,
    /// Multiplicities of the multiple fibers of the two factors.
    pub multiplicities: [u64; 2],
    /// False for the Calabi–Yau case where neither factor has a multiple fiber.
    pub kappa_one_family: bool,
    pub derived_equivalent_family: bool,
    pub non_birational_certificate: Vec<String>,
}

/// Points where `S → P^1` is not smooth: singular fibers and the multiple fiber.
fn critical_points(cfg: &SurfaceConfig) -> Vec<Point> {
    let mut pts: Vec<Point> = cfg.discriminant().into_iter().map(|(p, _)| p).collect();
    if let Some(MarkedPoint { s, m, .. }) = &cfg.marked {
        if *m > 1 && !pts.contains(s) {
            pts.push(s.clone());
        }
    }
    pts.sort();
    pts
}

fn require_valid(cfg: &SurfaceConfig, which: &str) -> Result<()> {
    let r = cfg.validate();
    if r.valid {
        return Ok(());
    }
    let rules: Vec<&str> = r.failures().map(|c| c.rule).collect();
    Err(Error::InvalidConfig(format!(
        "{which} factor fails {}",
        rules.join(", ")
    )))
}

pub fn fiber_product_invariants(a: &SurfaceConfig, b: &SurfaceConfig) -> Result<ThreefoldReport> {
    require_valid(a, "first")?;
    require_valid(b, "second")?;
    let (ca, cb) = (critical_points(a), critical_points(b));
    let shared: Vec<String> = ca
        .iter()
        .filter(|p| cb.contains(p))
        .map(|p| p.to_string())
        .collect();
    if !shared.is_empty() {
        return Err(Error::NotSmooth(shared.join(", ")));
    }

    // e(X) = Σ_t e(S_t)·e(S'_t); a fiber over t is a product of the two fibers.
    let euler_at = |c: &SurfaceConfig, t: &Point| c.fiber_at(t).map_or(0, |f| f.euler()) as i64;
    let euler: i64 = ca
        .iter()
        .chain(&cb)
        .map(|t| euler_at(a, t) * euler_at(b, t))
        .sum();

    let picard = 2 * RATIONAL_SURFACE_PICARD - 1;
    let h11 = picard;
    let h12 = u32::try_from(h11 as i64 - euler / 2).expect("h^{1,2} is nonnegative");
    let h = [
        [1, 0, 0, 1],
        [0, h11, h12, 0],
        [0, h12, h11, 0],
        [1, 0, 0, 1],
    ];
    let diamond = HodgeDiamond::from_array(h);
    debug_assert!(diamond.is_symmetric());
    debug_assert_eq!(diamond.euler(), euler);

    let multiplicities = [a.multiplicity(), b.multiplicity()];
    let kappa_one = multiplicities.iter().any(|&m| m > 1);
    Ok(ThreefoldReport {
        diamond,
        euler,
        kodaira_dim: u32::from(kappa_one),
        picard,
        rel_picard: 2,
        smooth: true,
        multiplicities,
        kappa_one_family: kappa_one,
        derived_equivalent_family: false,
        non_birational_certificate: Vec::new(),
    })
}

/// Which partner classes to build the family from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PartnerRule {
    /// The `N` classes with the smallest representatives.
    Smallest,
    /// Caller-chosen units mod `m`, one per class.
    Explicit(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyMember {
    /// `i` such that this member is built from `J^i(S)`.
    pub rep: u64,
    pub xi: crate::TorsionPoint,
    pub report: ThreefoldReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyCertificate {
    pub partner_reps: Vec<u64>,
    /// Checked: no two `i·ξ` lie in one orbit of the fiberwise automorphisms.
    pub pairwise_distinct_classes: bool,
    pub non_birational: bool,
    pub derived_equivalent: bool,
    pub deformation_equivalent: bool,
    pub hodge_isometric: bool,
    /// Hypotheses the construction needs but this tool cannot check.
    pub unverified_assumptions: Vec<String>,
    pub reasons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub m: u64,
    pub n: usize,
    pub members: Vec<FamilyMember>,
    pub certificate: FamilyCertificate,
}

fn with_invariant(
    base: &SurfaceConfig,
    mk: &MarkedPoint,
    xi: crate::TorsionPoint,
) -> SurfaceConfig {
    let mut cfg = base.clone();
    cfg.marked = Some(MarkedPoint { xi, ..mk.clone() });
    cfg
}

/// `n` pairwise non-isomorphic partners `J^i(S)` of `base`, each fibered with
/// `companion` over `P^1`.
pub fn schoen_family(
    base: &SurfaceConfig,
    rule: &PartnerRule,
    companion: &SurfaceConfig,
    n: usize,
) -> Result<FamilyReport> {
    if n == 0 {
        return Err(Error::InvalidConfig("family size must be positive".into()));
    }
    let fm = base.fm_report()?;
    let mk = base
        .marked
        .as_ref()
        .expect("fm_report needs a marked point");
    if fm.m % 2 != 0 {
        return Err(Error::InvalidConfig(format!(
            "multiplicity {} must be even",
            fm.m
        )));
    }
    let Some(available) = fm.fm_count_exact else {
        return Err(Error::InvalidConfig(format!(
            "partner classes are only known for n1 = 1, got n1 = {}",
            fm.assumptions.n1
        )));
    };
    if (available as usize) < n {
        return Err(Error::InsufficientPartners {
            available,
            requested: n as u64,
            suggested_m: fm_count::minimal_even_modulus(&fm.action, 1, n as u64),
        });
    }

    let reps: Vec<u64> = match rule {
        PartnerRule::Smallest => fm.partner_reps[..n].to_vec(),
        PartnerRule::Explicit(r) => {
            if r.len() != n {
                return Err(Error::InvalidConfig(format!(
                    "{} representatives given for a family of {n}",
                    r.len()
                )));
            }
            let units = fm_count::units(fm.m);
            if let Some(bad) = r.iter().find(|k| !units.contains(&(*k % fm.m))) {
                return Err(Error::InvalidConfig(format!(
                    "{bad} is not a unit mod {}",
                    fm.m
                )));
            }
            r.clone()
        }
    };

    let xis: Vec<_> = reps.iter().map(|&i| fm.xi.scalar_mul(i as i64)).collect();
    let mut distinct = true;
    for i in 0..xis.len() {
        let orbit = fm.action.orbit(&xis[i])?;
        for j in i + 1..xis.len() {
            if orbit.contains(&xis[j]) {
                distinct = false;
                if matches!(rule, PartnerRule::Explicit(_)) {
                    return Err(Error::InvalidConfig(format!(
                        "representatives {} and {} give isomorphic surfaces",
                        reps[i], reps[j]
                    )));
                }
            }
        }
    }
    debug_assert!(distinct);

    let mut members = Vec::with_capacity(n);
    for (&rep, xi) in reps.iter().zip(&xis) {
        let partner = with_invariant(base, mk, xi.clone());
        let mut report = fiber_product_invariants(&partner, companion)?;
        report.derived_equivalent_family = true;
        report.non_birational_certificate = vec![
            "X -> P^1 is the Iitaka fibration, so any birational map between members covers an automorphism of P^1".into(),
            "relative Picard number 2 leaves exactly the two projections as factorizations of X -> P^1".into(),
            format!("the factor J^{rep}(S) lies in its own partner class"),
        ];
        members.push(FamilyMember {
            rep,
            xi: xi.clone(),
            report,
        });
    }

    Ok(FamilyReport {
        m: fm.m,
        n,
        members,
        certificate: FamilyCertificate {
            partner_reps: reps,
            pairwise_distinct_classes: distinct,
            non_birational: distinct,
            derived_equivalent: true,
            deformation_equivalent: true,
            hodge_isometric: true,
            unverified_assumptions: vec![
                "the generic fibers of the two factors are not isogenous".into(),
            ],
            reasons: vec![
                "members with distinct partner classes have non-isomorphic factors, hence are not birational".into(),
                "a rank-2 relative moduli kernel between partners base-changes to an equivalence of the fiber products".into(),
                "the partners deform into each other through elliptic surfaces, and so do the fiber products".into(),
                "the equivalence induces Hodge isometries on odd cohomology".into(),
            ],
        },
    })
}
