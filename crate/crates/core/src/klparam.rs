//! Kazhdan–Lusztig data in type A as multisegments, the passage to affine
//! Springer parameters `(t, u, ρ)`, temperedness and the a-weight.
//!
//! A segment of length `ℓ` starting at `c` has coordinates
//! `c, c + 1, …, c + ℓ - 1` in the radial direction (radial unit 1).

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::cyclo::Q;
use crate::error::{Error, Result};
use crate::springer::{a_value, Partition, UnipotentClass};
use crate::torus::{Coord, TorusPoint};

pub const TEMPERED_CONVENTION: &str = "tempered = every segment centred on the unitary axis";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Segment {
    pub start: Coord,
    pub len: u32,
}

impl Segment {
    pub fn centre(&self) -> Coord {
        Coord::new(self.start.angle, self.start.radial + Q::new(self.len as i64 - 1, 2))
    }

    pub fn coords(&self) -> Vec<Coord> {
        (0..self.len)
            .map(|k| Coord::new(self.start.angle, self.start.radial + Q::from_integer(k as i64)))
            .collect()
    }
}

/// Segments per block, each block sorted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct MultiSegment {
    pub blocks: Vec<Vec<Segment>>,
}

impl MultiSegment {
    pub fn new(mut blocks: Vec<Vec<Segment>>) -> Result<Self> {
        for b in &mut blocks {
            if b.iter().any(|s| s.len == 0) {
                return Err(Error::Incompatible("segments have positive length".into()));
            }
            b.sort();
        }
        Ok(MultiSegment { blocks })
    }

    pub fn block_lengths(&self) -> Vec<u32> {
        self.blocks.iter().map(|b| b.iter().map(|s| s.len).sum()).collect()
    }
}

impl fmt::Display for MultiSegment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|s| format!("[{};{}]", s.start, s.len))
                    .collect::<Vec<_>>()
                    .join("")
            })
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

/// Per block, the distinct eigenvalues of `t` with the Jordan type of `u`
/// on that eigenspace. The `ρ` slot is trivial in type A.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AffineSpringerParam {
    pub blocks: Vec<Vec<(Coord, Partition)>>,
}

impl AffineSpringerParam {
    pub fn t(&self) -> TorusPoint {
        TorusPoint(
            self.blocks
                .iter()
                .flat_map(|b| b.iter().flat_map(|(c, l)| std::iter::repeat_n(*c, l.size() as usize)))
                .collect(),
        )
    }

    pub fn u(&self) -> UnipotentClass {
        UnipotentClass::new(self.blocks.iter().flat_map(|b| b.iter().map(|(_, l)| l.clone())).collect())
    }

    pub fn rho(&self) -> &'static str {
        "trivial"
    }
}

/// Groups the segments of each block by centre; lengths at a centre form
/// the Jordan type there.
pub fn kl_to_affine(ms: &MultiSegment) -> AffineSpringerParam {
    AffineSpringerParam {
        blocks: ms
            .blocks
            .iter()
            .map(|b| {
                let mut by: BTreeMap<Coord, Vec<u32>> = BTreeMap::new();
                for s in b {
                    by.entry(s.centre()).or_default().push(s.len);
                }
                by.into_iter().map(|(c, l)| (c, Partition::new(l))).collect()
            })
            .collect(),
    }
}

pub fn affine_to_kl(p: &AffineSpringerParam) -> MultiSegment {
    let blocks = p
        .blocks
        .iter()
        .map(|b| {
            let mut v: Vec<Segment> = b
                .iter()
                .flat_map(|(c, l)| {
                    l.parts().iter().map(move |&len| Segment {
                        start: Coord::new(c.angle, c.radial - Q::new(len as i64 - 1, 2)),
                        len,
                    })
                })
                .collect();
            v.sort();
            v
        })
        .collect();
    MultiSegment { blocks }
}

pub fn is_tempered(ms: &MultiSegment) -> bool {
    ms.blocks.iter().flatten().all(|s| s.centre().is_unitary())
}

pub fn param_is_tempered(p: &AffineSpringerParam) -> bool {
    p.t().is_unitary()
}

pub fn a_weight(ms: &MultiSegment) -> u32 {
    a_value(&kl_to_affine(ms).u())
}

/// An element of `Stab(s)^+` or an unramified translation: sends block `i`
/// to `block_perm[i]` and then translates block `j` by `shift[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabElement {
    pub label: String,
    pub block_perm: Vec<usize>,
    pub shift: Vec<Coord>,
}

pub fn stab_action(ms: &MultiSegment, g: &StabElement) -> Result<MultiSegment> {
    let n = ms.blocks.len();
    if g.block_perm.len() != n || g.shift.len() != n {
        return Err(Error::NotInGroup(format!("{} has the wrong number of blocks", g.label)));
    }
    let mut out = vec![Vec::new(); n];
    for (i, b) in ms.blocks.iter().enumerate() {
        let j = g.block_perm[i];
        out[j] = b
            .iter()
            .map(|s| Segment {
                start: s.start + g.shift[j],
                len: s.len,
            })
            .collect();
    }
    MultiSegment::new(out)
}
