//! Exact points of complex tori `(C^×)^n`, written additively as
//! (angle ∈ Q/Z, radial exponent ∈ Q) per coordinate, with affine actions
//! and quotients by finite translation groups and weighted diagonals.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::cyclo::{format_rational, parse_rational, RootOfUnity, Q};
use crate::error::{Error, Result};
use crate::groups::{compose_perms, FiniteGroup};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coord {
    pub angle: RootOfUnity,
    pub radial: Q,
}

impl Coord {
    pub const ZERO: Coord = Coord {
        angle: RootOfUnity::ONE,
        radial: Q::new_raw(0, 1),
    };

    pub fn new(angle: RootOfUnity, radial: Q) -> Self {
        Coord { angle, radial }
    }

    pub fn unitary(angle: RootOfUnity) -> Self {
        Coord {
            angle,
            radial: Q::zero(),
        }
    }

    pub fn is_unitary(&self) -> bool {
        self.radial.is_zero()
    }

    pub fn scale(&self, k: i64) -> Coord {
        Coord {
            angle: self.angle.pow(k),
            radial: self.radial * Q::from_integer(k),
        }
    }

    /// Parses `"angle"` or `"angle@radial"`, both exact rationals.
    pub fn parse(s: &str) -> Result<Coord> {
        match s.split_once('@') {
            Some((a, r)) => Ok(Coord::new(RootOfUnity::new(parse_rational(a)?), parse_rational(r)?)),
            None => Ok(Coord::unitary(RootOfUnity::new(parse_rational(s)?))),
        }
    }
}

impl std::ops::Add for Coord {
    type Output = Coord;
    fn add(self, o: Coord) -> Coord {
        Coord {
            angle: self.angle + o.angle,
            radial: self.radial + o.radial,
        }
    }
}

impl std::ops::Sub for Coord {
    type Output = Coord;
    fn sub(self, o: Coord) -> Coord {
        Coord {
            angle: self.angle - o.angle,
            radial: self.radial - o.radial,
        }
    }
}

impl std::ops::Neg for Coord {
    type Output = Coord;
    fn neg(self) -> Coord {
        Coord {
            angle: -self.angle,
            radial: -self.radial,
        }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radial.is_zero() {
            write!(f, "{}", self.angle)
        } else {
            write!(f, "{}@{}", self.angle, format_rational(&self.radial))
        }
    }
}

impl Serialize for Coord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Coord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Coord::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// A point of the torus; ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TorusPoint(pub Vec<Coord>);

impl TorusPoint {
    pub fn identity(rank: usize) -> Self {
        TorusPoint(vec![Coord::ZERO; rank])
    }

    pub fn rank(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    pub fn add(&self, o: &TorusPoint) -> TorusPoint {
        TorusPoint(self.0.iter().zip(&o.0).map(|(a, b)| *a + *b).collect())
    }

    pub fn sub(&self, o: &TorusPoint) -> TorusPoint {
        TorusPoint(self.0.iter().zip(&o.0).map(|(a, b)| *a - *b).collect())
    }

    pub fn neg(&self) -> TorusPoint {
        TorusPoint(self.0.iter().map(|a| -*a).collect())
    }

    /// Moves coordinate `i` to position `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> TorusPoint {
        let mut out = vec![Coord::ZERO; self.0.len()];
        for (i, c) in self.0.iter().enumerate() {
            out[perm[i]] = *c;
        }
        TorusPoint(out)
    }

    pub fn is_unitary(&self) -> bool {
        self.0.iter().all(Coord::is_unitary)
    }

    /// Polar projection: keep angles, zero the radial exponents.
    pub fn unitary_part(&self) -> TorusPoint {
        TorusPoint(self.0.iter().map(|c| Coord::unitary(c.angle)).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|c| *c == Coord::ZERO)
    }

    /// Order as a translation (None if some radial part is nonzero).
    pub fn translation_order(&self) -> Option<u32> {
        if !self.is_unitary() {
            return None;
        }
        Some(self.0.iter().fold(1u32, |acc, c| acc.lcm(&c.angle.order())))
    }
}

impl fmt::Display for TorusPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")
        )
    }
}

/// `t ↦ perm·t + shift`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AffineMap {
    pub perm: Vec<usize>,
    pub shift: TorusPoint,
}

impl AffineMap {
    pub fn identity(rank: usize) -> Self {
        AffineMap {
            perm: (0..rank).collect(),
            shift: TorusPoint::identity(rank),
        }
    }

    pub fn apply(&self, t: &TorusPoint) -> TorusPoint {
        t.permute(&self.perm).add(&self.shift)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            perm: compose_perms(&self.perm, &other.perm),
            shift: other.shift.permute(&self.perm).add(&self.shift),
        }
    }

    pub fn is_translation(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// `(C^×)^n` with coordinate blocks and a finite group acting by
/// block-preserving permutations composed with translations.
#[derive(Clone, Debug)]
pub struct StratifiedTorus {
    pub rank: usize,
    pub blocks: Vec<Vec<usize>>,
    pub group: Arc<FiniteGroup>,
    pub maps: Vec<AffineMap>,
}

impl StratifiedTorus {
    /// Validates that `maps` (one per element) is a homomorphism and that
    /// each permutation maps blocks onto blocks of the same size.
    pub fn new(
        rank: usize,
        blocks: Vec<Vec<usize>>,
        group: Arc<FiniteGroup>,
        maps: Vec<AffineMap>,
    ) -> Result<Self> {
        if maps.len() != group.order() {
            return Err(Error::InvalidTorusAction("one map per group element expected".into()));
        }
        let mut covered: Vec<usize> = blocks.iter().flatten().copied().collect();
        covered.sort_unstable();
        if covered != (0..rank).collect::<Vec<_>>() {
            return Err(Error::InvalidTorusAction("blocks must partition the coordinates".into()));
        }
        for (g, m) in maps.iter().enumerate() {
            if m.perm.len() != rank || m.shift.rank() != rank {
                return Err(Error::InvalidTorusAction(format!("map of {} has wrong rank", group.label(g))));
            }
            for b in &blocks {
                let mut img: Vec<usize> = b.iter().map(|&i| m.perm[i]).collect();
                img.sort_unstable();
                if !blocks.iter().any(|c| {
                    let mut c = c.clone();
                    c.sort_unstable();
                    c == img
                }) {
                    return Err(Error::InvalidTorusAction(format!(
                        "{} does not map blocks onto blocks",
                        group.label(g)
                    )));
                }
            }
        }
        for a in 0..group.order() {
            for &b in group.generators() {
                if maps[a].compose(&maps[b]) != maps[group.mul(a, b)] {
                    return Err(Error::InvalidTorusAction(format!(
                        "action is not a homomorphism at ({}, {})",
                        group.label(a),
                        group.label(b)
                    )));
                }
            }
        }
        Ok(StratifiedTorus {
            rank,
            blocks,
            group,
            maps,
        })
    }

    /// Pure permutation action of a permutation group on consecutive blocks.
    pub fn permutation(blocks: &[usize], group: Arc<FiniteGroup>) -> Result<Self> {
        let rank: usize = blocks.iter().sum();
        let perms = group
            .perms()
            .ok_or_else(|| Error::InvalidTorusAction("permutation group expected".into()))?
            .to_vec();
        let mut start = 0;
        let bl = blocks
            .iter()
            .map(|&b| {
                let v: Vec<usize> = (start..start + b).collect();
                start += b;
                v
            })
            .collect();
        let maps = perms
            .into_iter()
            .map(|perm| AffineMap {
                perm,
                shift: TorusPoint::identity(rank),
            })
            .collect();
        Self::new(rank, bl, group, maps)
    }

    pub fn act(&self, g: usize, t: &TorusPoint) -> TorusPoint {
        self.maps[g].apply(t)
    }
}

/// The quotient `T / (F + D)` with `F` a finite translation group and `D`
/// the one-parameter subtorus `z ↦ (w_1 z, …, w_n z)` (additively).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentTorus {
    pub rank: usize,
    /// All elements of `F` (closed under addition, sorted).
    pub translations: Vec<TorusPoint>,
    /// Weights of the diagonal subtorus when it is quotiented out.
    pub diagonal: Option<Vec<i64>>,
}

impl ComponentTorus {
    pub fn new(rank: usize, gens: &[TorusPoint], diagonal: Option<Vec<i64>>) -> Result<Self> {
        let mut set: BTreeSet<TorusPoint> = BTreeSet::new();
        set.insert(TorusPoint::identity(rank));
        for g in gens {
            if g.rank() != rank {
                return Err(Error::InvalidTorusAction("translation of wrong rank".into()));
            }
            if g.translation_order().is_none() {
                return Err(Error::InvalidTorusAction(format!(
                    "translation {g} has infinite order"
                )));
            }
        }
        loop {
            let mut grown = set.clone();
            for a in &set {
                for g in gens {
                    grown.insert(a.add(g));
                }
            }
            if grown.len() == set.len() {
                break;
            }
            set = grown;
        }
        if let Some(w) = &diagonal {
            if w.len() != rank || w.iter().all(|&x| x == 0) {
                return Err(Error::InvalidTorusAction("diagonal weights must be nonzero of full rank".into()));
            }
        }
        Ok(ComponentTorus {
            rank,
            translations: set.into_iter().collect(),
            diagonal,
        })
    }

    /// The torus itself, with nothing quotiented out.
    pub fn full(rank: usize) -> Self {
        ComponentTorus {
            rank,
            translations: vec![TorusPoint::identity(rank)],
            diagonal: None,
        }
    }

    /// Checks that a given family of translations is closed under addition.
    pub fn is_subgroup(elems: &[TorusPoint]) -> bool {
        let set: BTreeSet<&TorusPoint> = elems.iter().collect();
        elems.iter().all(|a| elems.iter().all(|b| set.contains(&a.add(b))))
            && elems.iter().any(|a| a.is_zero())
    }

    pub fn finite_order(&self) -> usize {
        self.translations.len()
    }

    pub fn dimension(&self) -> usize {
        self.rank - usize::from(self.diagonal.is_some())
    }

    fn diagonal_canonical(&self, t: &TorusPoint) -> TorusPoint {
        let Some(w) = &self.diagonal else {
            return t.clone();
        };
        let (i, &wi) = w.iter().enumerate().find(|(_, &x)| x != 0).expect("nonzero weight");
        let x = t.0[i];
        let radial = -x.radial / Q::from_integer(wi);
        (0..wi.abs())
            .map(|k| {
                let angle = RootOfUnity::new((-x.angle.value() + Q::from_integer(k)) / Q::from_integer(wi));
                let z = Coord::new(angle, radial);
                TorusPoint(t.0.iter().zip(w).map(|(c, &wj)| *c + z.scale(wj)).collect())
            })
            .min()
            .expect("at least one option")
    }

    /// Least representative of the class of `t`.
    pub fn canonical(&self, t: &TorusPoint) -> TorusPoint {
        self.translations
            .iter()
            .map(|f| self.diagonal_canonical(&t.add(f)))
            .min()
            .expect("F contains 0")
    }

    /// Whether `F ∩ D` is trivial after adding `f`: used to check freeness.
    pub fn in_diagonal(&self, t: &TorusPoint) -> bool {
        match &self.diagonal {
            None => t.is_zero(),
            Some(_) => self.diagonal_canonical(t) == self.diagonal_canonical(&TorusPoint::identity(self.rank)),
        }
    }
}

/// Points with angles in `(1/den)Z/Z` and radial exponents in `grid`.
pub fn sample_points(rank: usize, den: u32, grid: &[Q]) -> Vec<TorusPoint> {
    let mut coords = Vec::new();
    for k in 0..den {
        for r in grid {
            coords.push(Coord::new(RootOfUnity::from_fraction(k as i64, den as i64), *r));
        }
    }
    coords.sort();
    let mut out = vec![TorusPoint(vec![])];
    for _ in 0..rank {
        out = out
            .into_iter()
            .flat_map(|p| {
                coords.iter().map(move |c| {
                    let mut v = p.0.clone();
                    v.push(*c);
                    TorusPoint(v)
                })
            })
            .collect();
    }
    out
}
