//! The cyclic group `Aut_0(B/P^1)` acting on local Weil–Châtelet invariants.
//!
//! On a smooth fiber the generator acts on `(a, b) ∈ (Q/Z)^2` by
//!
//! | order | image        |
//! |-------|--------------|
//! | 2     | `(-a, -b)`   |
//! | 4     | `(-b, a)`    |
//! | 6     | `(-b, a + b)`|
//!
//! and on an `I_n` fiber (`Q/Z`) the only nontrivial action is `a ↦ -a`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torsion::{TorsionPoint, WcFiberKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawAction", into = "RawAction")]
pub struct AutAction {
    group_order: u32,
    fiber_kind: WcFiberKind,
}

#[derive(Serialize, Deserialize)]
struct RawAction {
    order: u32,
    kind: String,
}

impl TryFrom<RawAction> for AutAction {
    type Error = Error;

    fn try_from(raw: RawAction) -> Result<Self> {
        AutAction::new(raw.order, raw.kind.parse()?)
    }
}

impl From<AutAction> for RawAction {
    fn from(a: AutAction) -> Self {
        let kind = match a.fiber_kind {
            WcFiberKind::SmoothElliptic => "smooth",
            WcFiberKind::MultiplicativeIn(_) => "In",
            WcFiberKind::Trivial => "trivial",
        };
        RawAction {
            order: a.group_order,
            kind: kind.to_string(),
        }
    }
}

impl AutAction {
    pub fn new(group_order: u32, fiber_kind: WcFiberKind) -> Result<Self> {
        let allowed: &[u32] = match fiber_kind {
            WcFiberKind::SmoothElliptic | WcFiberKind::Trivial => &[1, 2, 4, 6],
            WcFiberKind::MultiplicativeIn(_) => &[1, 2],
        };
        if !allowed.contains(&group_order) {
            return Err(if [1, 2, 4, 6].contains(&group_order) {
                Error::KindMismatch(format!(
                    "a group of order {group_order} cannot act on a {fiber_kind} fiber"
                ))
            } else {
                Error::BadGroupOrder(group_order)
            });
        }
        Ok(AutAction {
            group_order,
            fiber_kind,
        })
    }

    pub fn smooth(group_order: u32) -> Result<Self> {
        Self::new(group_order, WcFiberKind::SmoothElliptic)
    }

    pub fn multiplicative(group_order: u32) -> Result<Self> {
        Self::new(group_order, WcFiberKind::MultiplicativeIn(1))
    }

    pub fn group_order(&self) -> u32 {
        self.group_order
    }

    pub fn fiber_kind(&self) -> WcFiberKind {
        self.fiber_kind
    }

    fn check(&self, p: &TorsionPoint) -> Result<()> {
        match self.fiber_kind.rank() {
            Some(r) if r == p.rank() => Ok(()),
            Some(r) => Err(Error::KindMismatch(format!(
                "{} fiber expects rank {r}, point {p} has rank {}",
                self.fiber_kind,
                p.rank()
            ))),
            None if p.is_zero() => Ok(()),
            None => Err(Error::KindMismatch(format!(
                "trivial local group admits only the zero invariant, got {p}"
            ))),
        }
    }

    /// One application of the generator.
    pub fn apply_generator(&self, p: &TorsionPoint) -> Result<TorsionPoint> {
        self.check(p)?;
        Ok(self.generator_unchecked(p))
    }

    fn generator_unchecked(&self, p: &TorsionPoint) -> TorsionPoint {
        let m = p.modulus();
        let neg = |x: u64| (m - x) % m;
        match (self.group_order, p.coords()) {
            _ if self.fiber_kind == WcFiberKind::Trivial => p.clone(),
            (1, _) => p.clone(),
            (2, _) => p.neg(),
            (4, &[a, b]) => TorsionPoint::from_residues(m, &[neg(b), a]),
            (6, &[a, b]) => {
                let sum = ((a as u128 + b as u128) % m as u128) as u64;
                TorsionPoint::from_residues(m, &[neg(b), sum])
            }
            _ => unreachable!("validated at construction"),
        }
    }

    /// `[p, γp, γ²p, ...]` up to the first repetition. The length divides the
    /// group order.
    pub fn orbit(&self, p: &TorsionPoint) -> Result<Vec<TorsionPoint>> {
        self.check(p)?;
        let mut out = vec![p.clone()];
        let mut q = self.generator_unchecked(p);
        while &q != p {
            let next = self.generator_unchecked(&q);
            out.push(q);
            q = next;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tp(m: u64, c: &[i64]) -> TorsionPoint {
        TorsionPoint::new(m, c).unwrap()
    }

    fn pts(m: u64, c: &[[i64; 2]]) -> Vec<TorsionPoint> {
        c.iter().map(|c| tp(m, c)).collect()
    }

    #[test]
    fn generator_examples() {
        // (-b, a+b) = (-4, 5) mod 7
        let g6 = AutAction::smooth(6).unwrap();
        assert_eq!(g6.apply_generator(&tp(7, &[1, 4])).unwrap(), tp(7, &[3, 5]));
        // (-b, a) = (-3, 1) mod 5
        let g4 = AutAction::smooth(4).unwrap();
        assert_eq!(g4.apply_generator(&tp(5, &[1, 3])).unwrap(), tp(5, &[2, 1]));
        let g2 = AutAction::multiplicative(2).unwrap();
        assert_eq!(g2.apply_generator(&tp(9, &[4])).unwrap(), tp(9, &[5]));
    }

    #[test]
    fn orbit_examples() {
        let g6 = AutAction::smooth(6).unwrap();
        assert_eq!(
            g6.orbit(&tp(7, &[1, 4])).unwrap(),
            pts(7, &[[1, 4], [3, 5], [2, 1], [6, 3], [4, 2], [5, 6]])
        );
        let g4 = AutAction::smooth(4).unwrap();
        assert_eq!(
            g4.orbit(&tp(5, &[1, 3])).unwrap(),
            pts(5, &[[1, 3], [2, 1], [4, 2], [3, 4]])
        );
        for order in [1, 2, 4, 6] {
            let z = TorsionPoint::zero(11, 2).unwrap();
            assert_eq!(
                AutAction::smooth(order).unwrap().orbit(&z).unwrap(),
                vec![z]
            );
        }
    }

    #[test]
    fn construction_rules() {
        assert!(AutAction::multiplicative(4).is_err());
        assert!(AutAction::multiplicative(6).is_err());
        assert_eq!(AutAction::smooth(3), Err(Error::BadGroupOrder(3)));
        assert!(AutAction::new(6, WcFiberKind::Trivial).is_ok());
    }

    #[test]
    fn kind_mismatch() {
        let g6 = AutAction::smooth(6).unwrap();
        assert!(matches!(
            g6.apply_generator(&tp(7, &[1])),
            Err(Error::KindMismatch(_))
        ));
        let g2 = AutAction::multiplicative(2).unwrap();
        assert!(matches!(
            g2.orbit(&tp(7, &[1, 1])),
            Err(Error::KindMismatch(_))
        ));
        let t = AutAction::new(2, WcFiberKind::Trivial).unwrap();
        assert!(t.apply_generator(&tp(7, &[0])).is_ok());
        assert!(matches!(
            t.apply_generator(&tp(7, &[3])),
            Err(Error::KindMismatch(_))
        ));
    }

    #[test]
    fn json_shape() {
        let a = AutAction::multiplicative(2).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            r#"{"order":2,"kind":"In"}"#
        );
        let b: AutAction = serde_json::from_str(r#"{"order":6,"kind":"smooth"}"#).unwrap();
        assert_eq!(b, AutAction::smooth(6).unwrap());
        assert!(serde_json::from_str::<AutAction>(r#"{"order":4,"kind":"In"}"#).is_err());
    }

    fn power(a: &AutAction, p: &TorsionPoint, j: u32) -> TorsionPoint {
        (0..j).fold(p.clone(), |q, _| a.apply_generator(&q).unwrap())
    }

    #[test]
    fn generator_has_declared_order_exhaustive() {
        for m in 1..=50u64 {
            for order in [1, 2, 4, 6] {
                let a = AutAction::smooth(order).unwrap();
                for x in 0..m as i64 {
                    for y in 0..m as i64 {
                        let p = tp(m, &[x, y]);
                        assert_eq!(power(&a, &p, order), p);
                        if order > 1 {
                            assert_eq!(power(&a, &p, order / 2), p.neg(), "m={m} order={order}");
                        }
                    }
                }
            }
            let a = AutAction::multiplicative(2).unwrap();
            for x in 0..m as i64 {
                let p = tp(m, &[x]);
                assert_eq!(power(&a, &p, 2), p);
            }
        }
    }

    fn smooth_case() -> impl Strategy<Value = (AutAction, TorsionPoint)> {
        (prop::sample::select(vec![1u32, 2, 4, 6]), 1u64..=60)
            .prop_flat_map(|(o, m)| (Just(o), Just(m), 0..m as i64, 0..m as i64))
            .prop_map(|(o, m, a, b)| (AutAction::smooth(o).unwrap(), tp(m, &[a, b])))
    }

    proptest! {
        #[test]
        fn orbit_is_order_preserving((a, p) in smooth_case()) {
            let orb = a.orbit(&p).unwrap();
            prop_assert_eq!(a.group_order() as usize % orb.len(), 0);
            prop_assert_eq!(&orb[0], &p);
            for q in &orb {
                prop_assert_eq!(q.order(), p.order());
            }
            if a.group_order() > 1 {
                prop_assert!(orb.contains(&p.neg()));
            }
        }

        #[test]
        fn generator_is_linear((a, p) in smooth_case(), k in -100i64..100) {
            prop_assert_eq!(
                a.apply_generator(&p).unwrap().scalar_mul(k),
                a.apply_generator(&p.scalar_mul(k)).unwrap()
            );
        }
    }
}
