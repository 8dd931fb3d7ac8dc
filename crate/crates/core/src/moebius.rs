//! Möbius transformations of `P^1` over an exact field, and the stabilizer of
//! a base point together with a labeled point set.
//!
//! The stabilizer of `s` and of the labeled discriminant `Δ \ {s}` bounds the
//! image `N_1` of `Aut_0(B, s)` in `Aut P^1`. Only maps defined over the
//! scalar field are found; when every labeled point carries a distinct label,
//! each of them and `s` is fixed, three fixed points force the identity, and
//! the bound `n1 = 1` is exact over `C` as well.

use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::scalar::ExactScalar;
use crate::surface::SurfaceConfig;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum P1Point<S> {
    Finite(S),
    Infinity,
}

impl<S: ExactScalar> P1Point<S> {
    pub fn finite(x: S) -> Self {
        P1Point::Finite(x)
    }

    pub fn from_int(x: i64) -> Self {
        format!("{x}").parse().expect("integers parse")
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, P1Point::Infinity)
    }
}

impl<S: ExactScalar> FromStr for P1Point<S> {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(P1Point::Infinity),
            t => t
                .parse::<S>()
                .map(P1Point::Finite)
                .map_err(|_| Error::Parse(format!("not a rational or inf: {s:?}"))),
        }
    }
}

impl<S: ExactScalar> fmt::Display for P1Point<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            P1Point::Infinity => write!(f, "inf"),
            P1Point::Finite(x) => {
                let (n, d) = x.num_den();
                write!(f, "{n}/{d}")
            }
        }
    }
}

impl<S: ExactScalar> Serialize for P1Point<S> {
    fn serialize<Se: Serializer>(&self, ser: Se) -> std::result::Result<Se::Ok, Se::Error> {
        ser.serialize_str(&self.to_string())
    }
}

impl<'de, S: ExactScalar> Deserialize<'de> for P1Point<S> {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(de)? {
            Raw::Int(i) => Ok(P1Point::from_int(i)),
            Raw::Str(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

/// `z ↦ (a z + b) / (c z + d)`, scaled so the first nonzero coefficient is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MoebiusMap<S> {
    a: S,
    b: S,
    c: S,
    d: S,
}

impl<S: ExactScalar> MoebiusMap<S> {
    pub fn new(a: S, b: S, c: S, d: S) -> Result<Self> {
        if (a.clone() * d.clone() - b.clone() * c.clone()).is_zero() {
            return Err(Error::Degenerate("ad - bc = 0".into()));
        }
        let lead = [&a, &b, &c, &d]
            .into_iter()
            .find(|x| !x.is_zero())
            .cloned()
            .expect("nonzero determinant");
        Ok(MoebiusMap {
            a: a / lead.clone(),
            b: b / lead.clone(),
            c: c / lead.clone(),
            d: d / lead,
        })
    }

    pub fn identity() -> Self {
        MoebiusMap {
            a: S::one(),
            b: S::zero(),
            c: S::zero(),
            d: S::one(),
        }
    }

    pub fn coefficients(&self) -> [&S; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    pub fn apply(&self, z: &P1Point<S>) -> P1Point<S> {
        match z {
            P1Point::Infinity if self.c.is_zero() => P1Point::Infinity,
            P1Point::Infinity => P1Point::Finite(self.a.clone() / self.c.clone()),
            P1Point::Finite(z) => {
                let den = self.c.clone() * z.clone() + self.d.clone();
                if den.is_zero() {
                    P1Point::Infinity
                } else {
                    P1Point::Finite((self.a.clone() * z.clone() + self.b.clone()) / den)
                }
            }
        }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&other.a, &other.b, &other.c, &other.d);
        Self::new(
            a.clone() * e.clone() + b.clone() * g.clone(),
            a.clone() * f.clone() + b.clone() * h.clone(),
            c.clone() * e.clone() + d.clone() * g.clone(),
            c.clone() * f.clone() + d.clone() * h.clone(),
        )
        .expect("product of invertible maps")
    }

    pub fn inverse(&self) -> Self {
        Self::new(
            self.d.clone(),
            -self.b.clone(),
            -self.c.clone(),
            self.a.clone(),
        )
        .expect("invertible")
    }

    /// The map sending `z1, z2, z3` to `0, 1, ∞`.
    fn to_standard(z: &[P1Point<S>; 3]) -> Result<Self> {
        if z[0] == z[1] || z[1] == z[2] || z[0] == z[2] {
            return Err(Error::Degenerate(format!(
                "points {}, {}, {} are not distinct",
                z[0], z[1], z[2]
            )));
        }
        let one = S::one;
        let zero = S::zero;
        match z {
            [P1Point::Infinity, P1Point::Finite(z2), P1Point::Finite(z3)] => {
                Self::new(zero(), z2.clone() - z3.clone(), one(), -z3.clone())
            }
            [P1Point::Finite(z1), P1Point::Infinity, P1Point::Finite(z3)] => {
                Self::new(one(), -z1.clone(), one(), -z3.clone())
            }
            [P1Point::Finite(z1), P1Point::Finite(z2), P1Point::Infinity] => {
                Self::new(one(), -z1.clone(), zero(), z2.clone() - z1.clone())
            }
            [P1Point::Finite(z1), P1Point::Finite(z2), P1Point::Finite(z3)] => {
                let p = z2.clone() - z3.clone();
                let q = z2.clone() - z1.clone();
                Self::new(p.clone(), -(z1.clone() * p), q.clone(), -(z3.clone() * q))
            }
            _ => unreachable!("at most one point is infinite"),
        }
    }

    /// The unique map with `src[i] ↦ dst[i]`.
    pub fn map_through_triple(src: &[P1Point<S>; 3], dst: &[P1Point<S>; 3]) -> Result<Self> {
        let f = Self::to_standard(src)?;
        let g = Self::to_standard(dst)?;
        Ok(g.inverse().compose(&f))
    }
}

impl<S: ExactScalar> fmt::Display for MoebiusMap<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "z -> ({}·z + {}) / ({}·z + {})",
            self.a, self.b, self.c, self.d
        )
    }
}

/// All maps fixing `s` and permuting `labeled` with labels preserved, sorted
/// by coefficients.
///
/// Each such map sends the first two labeled points to an ordered pair of
/// distinct labeled points with the same labels, and fixes `s`; these three
/// images determine it, so the search runs over those pairs.
pub fn stabilizer<S: ExactScalar, L: PartialEq>(
    s: &P1Point<S>,
    labeled: &[(P1Point<S>, L)],
) -> Result<Vec<MoebiusMap<S>>> {
    if labeled.len() < 2 {
        return Err(Error::PossiblyInfinite(labeled.len()));
    }
    for (i, (p, _)) in labeled.iter().enumerate() {
        if p == s {
            return Err(Error::Degenerate(format!(
                "labeled point {p} coincides with s"
            )));
        }
        if labeled[..i].iter().any(|(q, _)| q == p) {
            return Err(Error::Degenerate(format!("labeled point {p} repeated")));
        }
    }
    let (p0, l0) = &labeled[0];
    let (p1, l1) = &labeled[1];
    let src = [p0.clone(), p1.clone(), s.clone()];
    let mut out = Vec::new();
    for (i, (q0, m0)) in labeled.iter().enumerate() {
        if m0 != l0 {
            continue;
        }
        for (j, (q1, m1)) in labeled.iter().enumerate() {
            if i == j || m1 != l1 {
                continue;
            }
            let f = MoebiusMap::map_through_triple(&src, &[q0.clone(), q1.clone(), s.clone()])?;
            let preserves = labeled.iter().all(|(p, l)| {
                let fp = f.apply(p);
                labeled.iter().any(|(q, m)| *q == fp && m == l)
            });
            if preserves {
                out.push(f);
            }
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// Bound on `n1` derived from a configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum N1Bound {
    /// Every labeled point has its own label, so `s` and at least two more
    /// points are fixed and only the identity remains.
    Exact(u64),
    /// Size of the stabilizer among maps with rational coefficients.
    RationalStabilizer(u64),
    /// No marked point, or fewer than two discriminant points besides `s`.
    Unknown,
}

impl N1Bound {
    pub fn value(&self) -> Option<u64> {
        match *self {
            N1Bound::Exact(n) | N1Bound::RationalStabilizer(n) => Some(n),
            N1Bound::Unknown => None,
        }
    }
}

/// Stabilizer size for the configuration's marked point and its labeled
/// discriminant (fiber types as labels).
pub fn n1_upper_bound(cfg: &SurfaceConfig) -> N1Bound {
    let Some(marked) = cfg.marked.as_ref() else {
        return N1Bound::Unknown;
    };
    let labeled: Vec<_> = cfg
        .discriminant()
        .into_iter()
        .filter(|(p, _)| *p != marked.s)
        .map(|(p, f)| (p, f.to_string()))
        .collect();
    let Ok(group) = stabilizer(&marked.s, &labeled) else {
        return N1Bound::Unknown;
    };
    let distinct_labels = labeled
        .iter()
        .enumerate()
        .all(|(i, (_, l))| labeled[..i].iter().all(|(_, k)| k != l));
    if distinct_labels {
        debug_assert_eq!(group.len(), 1);
        N1Bound::Exact(1)
    } else {
        N1Bound::RationalStabilizer(group.len() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Moebius, Moebius64, Point, Rational};
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn pt(s: &str) -> Point {
        s.parse().unwrap()
    }

    fn triple(a: &str, b: &str, c: &str) -> [Point; 3] {
        [pt(a), pt(b), pt(c)]
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn mo(a: i64, b: i64, c: i64, d: i64) -> Moebius {
        Moebius::new(q(a, 1), q(b, 1), q(c, 1), q(d, 1)).unwrap()
    }

    /// Independent route: solve `a z_i + b - w_i (c z_i + d) = 0` for the
    /// coefficient vector by Gaussian elimination on the 3×4 system.
    #[allow(clippy::needless_range_loop)]
    fn solve_triple(src: &[Point; 3], dst: &[Point; 3]) -> Moebius {
        let mut rows: Vec<[Rational; 4]> = src
            .iter()
            .zip(dst)
            .map(|(z, w)| match (z, w) {
                (P1Point::Finite(z), P1Point::Finite(w)) => [
                    z.clone(),
                    Rational::one(),
                    -(w.clone() * z.clone()),
                    -w.clone(),
                ],
                // w = ∞: c z + d = 0
                (P1Point::Finite(z), P1Point::Infinity) => [
                    Rational::zero(),
                    Rational::zero(),
                    z.clone(),
                    Rational::one(),
                ],
                // z = ∞: a - w c = 0
                (P1Point::Infinity, P1Point::Finite(w)) => [
                    Rational::one(),
                    Rational::zero(),
                    -w.clone(),
                    Rational::zero(),
                ],
                // ∞ ↦ ∞: c = 0
                (P1Point::Infinity, P1Point::Infinity) => [
                    Rational::zero(),
                    Rational::zero(),
                    Rational::one(),
                    Rational::zero(),
                ],
            })
            .collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..4 {
            let Some(p) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
                continue;
            };
            rows.swap(r, p);
            let inv = Rational::one() / rows[r][col].clone();
            for k in 0..4 {
                rows[r][k] = rows[r][k].clone() * inv.clone();
            }
            for i in 0..rows.len() {
                if i != r && !rows[i][col].is_zero() {
                    let f = rows[i][col].clone();
                    for k in 0..4 {
                        rows[i][k] = rows[i][k].clone() - f.clone() * rows[r][k].clone();
                    }
                }
            }
            pivots.push(col);
            r += 1;
        }
        assert_eq!(pivots.len(), 3, "one-dimensional kernel");
        let free = (0..4).find(|c| !pivots.contains(c)).unwrap();
        let mut v = vec![Rational::zero(); 4];
        v[free] = Rational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -rows[i][free].clone();
        }
        Moebius::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()).unwrap()
    }

    #[test]
    fn triple_examples() {
        let std = triple("0", "1", "inf");
        assert!(Moebius::map_through_triple(&std, &std)
            .unwrap()
            .is_identity());
        let inv = Moebius::map_through_triple(&std, &triple("inf", "1", "0")).unwrap();
        assert_eq!(inv, mo(0, 1, 1, 0));
        assert_eq!(inv, solve_triple(&std, &triple("inf", "1", "0")));
        let refl = Moebius::map_through_triple(&std, &triple("1", "0", "inf")).unwrap();
        assert_eq!(refl, mo(-1, 1, 0, 1));
        assert_eq!(refl, solve_triple(&std, &triple("1", "0", "inf")));
    }

    #[test]
    fn degenerate_triples() {
        let r = Moebius::map_through_triple(&triple("0", "0", "1"), &triple("0", "1", "inf"));
        assert!(matches!(r, Err(Error::Degenerate(_))));
        assert!(Moebius::new(q(1, 1), q(2, 1), q(2, 1), q(4, 1)).is_err());
    }

    #[test]
    fn normalization() {
        let m = Moebius::new(q(0, 1), q(-3, 1), q(6, 1), q(9, 1)).unwrap();
        assert_eq!(m.coefficients(), [&q(0, 1), &q(1, 1), &q(-2, 1), &q(-3, 1)]);
        assert_eq!(m.to_string(), "z -> (0·z + 1) / (-2·z + -3)");
    }

    #[test]
    fn point_parsing_and_display() {
        assert_eq!(pt("inf"), P1Point::Infinity);
        assert_eq!(pt("∞"), P1Point::Infinity);
        assert_eq!(pt("-2/4").to_string(), "-1/2");
        assert_eq!(pt("3").to_string(), "3/1");
        assert!("x".parse::<Point>().is_err());
        let p: Point = serde_json::from_str("5").unwrap();
        assert_eq!(p, pt("5"));
        let p: Point = serde_json::from_str(r#""inf""#).unwrap();
        assert!(p.is_infinity());
        assert_eq!(serde_json::to_string(&pt("2/6")).unwrap(), r#""1/3""#);
    }

    #[test]
    fn stabilizer_of_two_with_three_points() {
        let labeled: Vec<_> = ["0", "1", "inf"].iter().map(|s| (pt(s), "I1")).collect();
        let g = stabilizer(&pt("2"), &labeled).unwrap();
        assert_eq!(g, vec![Moebius::identity(), mo(1, 0, 1, -1)]);

        // Oracle: the six maps permuting {0, 1, ∞}, filtered by fixing 2.
        let std = triple("0", "1", "inf");
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut brute: Vec<Moebius> = perms
            .iter()
            .map(|p| {
                let dst = [std[p[0]].clone(), std[p[1]].clone(), std[p[2]].clone()];
                solve_triple(&std, &dst)
            })
            .filter(|f| f.apply(&pt("2")) == pt("2"))
            .collect();
        brute.sort();
        assert_eq!(g, brute);
    }

    #[test]
    fn stabilizer_two_points_at_infinity() {
        let labeled = vec![(pt("1"), "a"), (pt("-1"), "a")];
        let g = stabilizer(&P1Point::Infinity, &labeled).unwrap();
        assert!(g.contains(&mo(-1, 0, 0, 1)));
        assert_eq!(g.len(), 2);
    }

    #[test]
    fn stabilizer_distinct_labels_is_trivial() {
        let labeled = vec![(pt("0"), "II*"), (pt("1"), "II")];
        let g = stabilizer(&pt("2"), &labeled).unwrap();
        assert_eq!(g, vec![Moebius::identity()]);
    }

    #[test]
    fn stabilizer_errors() {
        let one = vec![(pt("0"), "a")];
        assert_eq!(stabilizer(&pt("2"), &one), Err(Error::PossiblyInfinite(1)));
        let dup = vec![(pt("0"), "a"), (pt("0"), "a")];
        assert!(matches!(
            stabilizer(&pt("2"), &dup),
            Err(Error::Degenerate(_))
        ));
        let hit = vec![(pt("0"), "a"), (pt("2"), "a")];
        assert!(matches!(
            stabilizer(&pt("2"), &hit),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn works_over_machine_rationals() {
        let p = |s: &str| s.parse::<P1Point<crate::Rational64>>().unwrap();
        let labeled: Vec<_> = ["0", "1", "inf"].iter().map(|s| (p(s), ())).collect();
        let g: Vec<Moebius64> = stabilizer(&p("2"), &labeled).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[1].apply(&p("1")), P1Point::Infinity);
    }

    /// Generic three points, one label: the stabilizer equals the brute-force
    /// filter over all 3! maps through permuted triples.
    #[test]
    fn generic_three_points_match_brute_force() {
        let cases = [
            ("2", ["0", "1", "inf"]),
            ("-1", ["0", "1", "inf"]),
            ("1/2", ["0", "1", "inf"]),
            ("5", ["1", "2", "3"]),
            ("inf", ["-1", "0", "1"]),
            ("3", ["-1", "1", "7/2"]),
            ("0", ["1", "-1", "inf"]),
        ];
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        for (s, pts) in cases {
            let s = pt(s);
            let src = [pt(pts[0]), pt(pts[1]), pt(pts[2])];
            let labeled: Vec<_> = src.iter().map(|p| (p.clone(), 0u8)).collect();
            let g = stabilizer(&s, &labeled).unwrap();
            let mut brute: Vec<Moebius> = perms
                .iter()
                .map(|p| {
                    solve_triple(
                        &src,
                        &[src[p[0]].clone(), src[p[1]].clone(), src[p[2]].clone()],
                    )
                })
                .filter(|f| f.apply(&s) == s)
                .collect();
            brute.sort();
            assert_eq!(g, brute, "s={s}");
            assert!(g.len() <= 6 && 6 % g.len() == 0);
        }
    }

    fn small_point() -> impl Strategy<Value = Point> {
        prop_oneof![
            1 => Just(P1Point::Infinity),
            8 => (-6i64..=6, 1i64..=4).prop_map(|(n, d)| P1Point::Finite(q(n, d))),
        ]
    }

    fn distinct_triple() -> impl Strategy<Value = [Point; 3]> {
        [small_point(), small_point(), small_point()]
            .prop_filter("distinct", |t| t[0] != t[1] && t[1] != t[2] && t[0] != t[2])
    }

    proptest! {
        #[test]
        fn triple_round_trip(src in distinct_triple(), dst in distinct_triple()) {
            let f = Moebius::map_through_triple(&src, &dst).unwrap();
            for i in 0..3 {
                prop_assert_eq!(f.apply(&src[i]), dst[i].clone());
            }
            prop_assert_eq!(&f, &solve_triple(&src, &dst));
            let finv = f.inverse();
            prop_assert!(f.compose(&finv).is_identity());
            for i in 0..3 {
                prop_assert_eq!(finv.apply(&dst[i]), src[i].clone());
            }
        }

        #[test]
        fn stabilizer_is_group(
            s in small_point(),
            pts in prop::collection::btree_set(small_point(), 2..6),
            labels in prop::collection::vec(0u8..2, 6),
        ) {
            let labeled: Vec<_> = pts
                .into_iter()
                .filter(|p| *p != s)
                .zip(labels)
                .collect();
            prop_assume!(labeled.len() >= 2);
            let g = stabilizer(&s, &labeled).unwrap();
            prop_assert!(g.contains(&Moebius::identity()));
            for f in &g {
                prop_assert_eq!(f.apply(&s), s.clone());
                prop_assert!(g.contains(&f.inverse()));
                for h in &g {
                    prop_assert!(g.contains(&f.compose(h)));
                }
            }
            let triples = labeled.len() * (labeled.len() - 1);
            prop_assert!(g.len() <= triples);
        }
    }
}
