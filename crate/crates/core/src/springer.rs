//! Type-A Springer data: partitions, symmetric-group characters,
//! unipotent classes, Springer-fibre dimensions and distinguished Levis.
//!
//! Convention: the regular unipotent class `(n)` corresponds to the trivial
//! representation and `(1^n)` to the sign representation. Under this
//! convention the Springer map is the identity on partition labels, where
//! `χ^λ` denotes the irreducible character with `χ^{(n)} = 1`.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cyclo::{Cyclo, Q};
use crate::error::{Error, Result};
use crate::groups::FiniteGroup;

pub const SPRINGER_CONVENTION: &str = "regular unipotent (n) <-> trivial; (1^n) <-> sign";

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Self {
        parts.retain(|&p| p > 0);
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Partition(parts)
    }

    pub fn empty() -> Self {
        Partition(vec![])
    }

    pub fn single_row(n: u32) -> Self {
        Self::new(vec![n])
    }

    pub fn single_column(n: u32) -> Self {
        Self::new(vec![1; n as usize])
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn size(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let first = self.0.first().copied().unwrap_or(0);
        Partition(
            (1..=first)
                .map(|j| self.0.iter().filter(|&&p| p >= j).count() as u32)
                .collect(),
        )
    }

    /// `n(λ) = Σ (i-1) λ_i`.
    pub fn n_statistic(&self) -> u32 {
        self.0.iter().enumerate().map(|(i, &p)| i as u32 * p).sum()
    }

    /// `self ⊵ other` in dominance order (same size assumed).
    pub fn dominates(&self, other: &Partition) -> bool {
        let (mut a, mut b) = (0u32, 0u32);
        let l = self.len().max(other.len());
        for i in 0..l {
            a += self.0.get(i).copied().unwrap_or(0);
            b += other.0.get(i).copied().unwrap_or(0);
            if a < b {
                return false;
            }
        }
        true
    }

    /// Partitions covered-from-below in dominance: `other ⋖ self` means
    /// `self` covers `other`. Returns all `μ` with `μ ◁ self` maximal.
    pub fn dominance_lower_covers(&self) -> Vec<Partition> {
        let below: Vec<Partition> = partitions(self.size())
            .into_iter()
            .filter(|m| m != self && self.dominates(m))
            .collect();
        below
            .iter()
            .filter(|m| !below.iter().any(|k| k != *m && k.dominates(m) && self.dominates(k)))
            .cloned()
            .collect()
    }

    /// Number of standard tableaux (hook length formula).
    pub fn dimension(&self) -> u64 {
        let n = self.size() as u64;
        let conj = self.conjugate();
        let mut num: u128 = 1;
        for k in 1..=n {
            num *= k as u128;
        }
        let mut den: u128 = 1;
        for (i, &row) in self.0.iter().enumerate() {
            for j in 0..row as usize {
                let arm = row as usize - j - 1;
                let leg = conj.0[j] as usize - i - 1;
                den *= (arm + leg + 1) as u128;
            }
        }
        (num / den) as u64
    }

    fn beta_set(&self, len: usize) -> Vec<i64> {
        (0..len)
            .map(|i| self.0.get(i).copied().unwrap_or(0) as i64 + (len - 1 - i) as i64)
            .collect()
    }

    fn from_beta(mut beta: Vec<i64>) -> Partition {
        beta.sort_unstable_by(|a, b| b.cmp(a));
        let len = beta.len();
        Partition::new(
            beta.iter()
                .enumerate()
                .map(|(i, &b)| (b - (len - 1 - i) as i64) as u32)
                .collect(),
        )
    }

    /// All ways to remove a rim hook of length `r`, with the sign `(-1)^height`.
    pub fn remove_rim_hooks(&self, r: u32) -> Vec<(Partition, i64)> {
        let len = self.len();
        let beta = self.beta_set(len);
        let set: BTreeSet<i64> = beta.iter().copied().collect();
        let mut out = Vec::new();
        for &b in &beta {
            let nb = b - r as i64;
            if nb < 0 || set.contains(&nb) {
                continue;
            }
            let height = set.range(nb + 1..b).count();
            let mut nbeta: Vec<i64> = beta.iter().map(|&x| if x == b { nb } else { x }).collect();
            nbeta.sort_unstable();
            out.push((Self::from_beta(nbeta), if height % 2 == 0 { 1 } else { -1 }));
        }
        out
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({})",
            self.0.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
        )
    }
}

/// All partitions of `n`, in reverse lexicographic order starting at `(n)`.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn rec(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if n == 0 {
            out.push(Partition(prefix.clone()));
            return;
        }
        for p in (1..=max.min(n)).rev() {
            prefix.push(p);
            rec(n - p, p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

/// Murnaghan–Nakayama: `χ^λ` evaluated on the class of cycle type `μ`.
pub fn mn_character(lambda: &Partition, mu: &Partition) -> i64 {
    if lambda.size() != mu.size() {
        return 0;
    }
    fn rec(lambda: &Partition, cycles: &[u32]) -> i64 {
        match cycles.split_first() {
            None => 1,
            Some((&r, rest)) => lambda
                .remove_rim_hooks(r)
                .iter()
                .map(|(l, s)| s * rec(l, rest))
                .sum(),
        }
    }
    rec(lambda, mu.parts())
}

/// Cycle type of a permutation restricted to a set of points it preserves.
pub fn cycle_type(perm: &[usize], points: &[usize]) -> Partition {
    let mut seen = std::collections::HashSet::new();
    let mut parts = Vec::new();
    for &p in points {
        if seen.contains(&p) {
            continue;
        }
        let mut len = 0;
        let mut j = p;
        while seen.insert(j) {
            len += 1;
            j = perm[j];
        }
        parts.push(len);
    }
    Partition::new(parts)
}

/// An irreducible character of `S_n` with its values on the classes,
/// classes indexed by `partitions(n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetricIrrep {
    pub label: Partition,
    pub values: Vec<i64>,
}

impl SymmetricIrrep {
    pub fn degree(&self) -> i64 {
        // the last class in reverse-lex order is (1^n)
        *self.values.last().unwrap_or(&1)
    }
}

/// The Springer correspondence: unipotent class (Jordan type) to irrep of `S_n`.
pub fn springer_map(lambda: &Partition) -> SymmetricIrrep {
    let classes = partitions(lambda.size());
    SymmetricIrrep {
        label: lambda.clone(),
        values: classes.iter().map(|mu| mn_character(lambda, mu)).collect(),
    }
}

/// Inverse of [`springer_map`]: identifies the Jordan type from a character.
pub fn springer_inverse(n: u32, values: &[i64]) -> Option<Partition> {
    partitions(n)
        .into_iter()
        .find(|l| springer_map(l).values == values)
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UnipotentClass {
    pub parts: Vec<Partition>,
}

impl UnipotentClass {
    pub fn new(parts: Vec<Partition>) -> Self {
        UnipotentClass { parts }
    }

    pub fn rank(&self) -> u32 {
        self.parts.iter().map(|p| p.size()).sum()
    }
}

impl fmt::Display for UnipotentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}]",
            self.parts.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
        )
    }
}

/// Springer-fibre dimension `dim B^u = Σ_blocks (Σ_j (λ'_j)^2 - n)/2`.
pub fn a_value(u: &UnipotentClass) -> u32 {
    u.parts
        .iter()
        .map(|l| {
            let c = l.conjugate();
            let s: u32 = c.parts().iter().map(|x| x * x).sum();
            (s - l.size()) / 2
        })
        .sum()
}

/// Per block, the factors `GL_b^c` of the Levi in which `u` is distinguished.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LeviShape {
    pub blocks: Vec<Vec<(u32, u32)>>,
}

impl fmt::Display for LeviShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|(size, mult)| {
                        if *mult == 1 {
                            format!("GL{size}")
                        } else {
                            format!("GL{size}^{mult}")
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("x")
            })
            .collect();
        write!(f, "{}", parts.join(" | "))
    }
}

pub fn distinguished_levi(u: &UnipotentClass) -> LeviShape {
    LeviShape {
        blocks: u
            .parts
            .iter()
            .map(|l| {
                let mut v: Vec<(u32, u32)> = Vec::new();
                for &p in l.parts() {
                    match v.last_mut() {
                        Some((b, c)) if *b == p => *c += 1,
                        _ => v.push((p, 1)),
                    }
                }
                v
            })
            .collect(),
    }
}

/// Regular class of the Levi, read back as a class of the ambient group.
pub fn class_of_levi(shape: &LeviShape) -> UnipotentClass {
    UnipotentClass::new(
        shape
            .blocks
            .iter()
            .map(|b| {
                Partition::new(
                    b.iter()
                        .flat_map(|&(size, mult)| std::iter::repeat(size).take(mult as usize))
                        .collect(),
                )
            })
            .collect(),
    )
}

/// Fibre dimension of the regular class computed inside a Levi shape:
/// each `GL_b` factor contributes `a((b)) = 0`.
pub fn a_value_regular_in_levi(shape: &LeviShape) -> u32 {
    shape
        .blocks
        .iter()
        .flat_map(|b| b.iter())
        .map(|&(size, mult)| mult * a_value(&UnipotentClass::new(vec![Partition::single_row(size)])))
        .sum()
}

/// Result of decomposing a character restricted to the reflection subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RestrictionData {
    pub class: UnipotentClass,
    pub constituents: Vec<(Vec<Partition>, u64)>,
    pub orbit: Vec<Vec<Partition>>,
}

/// Restricts a (possibly projective) character of `W = W(R) ⋊ R` to
/// `W(R) = ∏ S_{block}`, decomposes it by Murnaghan–Nakayama inner products,
/// checks that the constituents form one orbit under the block permutations
/// induced by `W`, and returns the orbit's canonical (least) partition tuple.
///
/// `w` must be a permutation group on the coordinates; `blocks` are the
/// point sets of the symmetric factors of `W(R)`. The cocycle of a projective
/// character must be trivial on `W(R)`.
pub fn restrict_and_identify(
    w: &FiniteGroup,
    rho_values: &[Cyclo],
    blocks: &[Vec<usize>],
) -> Result<RestrictionData> {
    let perms = w
        .perms()
        .ok_or_else(|| Error::Incompatible("restriction needs a permutation group".into()))?;
    let block_of = |p: &[usize], b: &[usize]| -> Option<usize> {
        let mut img: Vec<usize> = b.iter().map(|&i| p[i]).collect();
        img.sort_unstable();
        blocks.iter().position(|c| {
            let mut c = c.clone();
            c.sort_unstable();
            c == img
        })
    };
    let mut reflection = Vec::new();
    let mut block_perms: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (g, p) in perms.iter().enumerate() {
        let bp: Option<Vec<usize>> = blocks.iter().map(|b| block_of(p, b)).collect();
        let bp = bp.ok_or_else(|| {
            Error::Incompatible(format!("element {} does not permute the blocks", w.label(g)))
        })?;
        if bp.iter().enumerate().all(|(i, &j)| i == j) {
            reflection.push(g);
        }
        block_perms.insert(bp);
    }
    let expected: u64 = blocks
        .iter()
        .map(|b| (1..=b.len() as u64).product::<u64>())
        .product();
    if reflection.len() as u64 != expected {
        return Err(Error::Incompatible(format!(
            "block-preserving subgroup has order {} but the symmetric product has order {expected}",
            reflection.len()
        )));
    }
    let sizes: Vec<u32> = blocks.iter().map(|b| b.len() as u32).collect();
    let tuples = partition_tuples(&sizes);
    let order = Q::from_integer(reflection.len() as i64);
    let mut constituents = Vec::new();
    for t in &tuples {
        let mut acc = Cyclo::from_int(0);
        for &g in &reflection {
            let chi: i64 = t
                .iter()
                .zip(blocks)
                .map(|(l, b)| mn_character(l, &cycle_type(&perms[g], b)))
                .product();
            if chi != 0 {
                acc = acc.add(&rho_values[g].scale(Q::from_integer(chi)));
            }
        }
        let m = acc.scale(order.recip());
        let m = m
            .as_rational()
            .filter(|q| q.is_integer() && *q.numer() >= 0)
            .ok_or_else(|| Error::Incompatible(format!("non-integral multiplicity {m}")))?;
        if *m.numer() > 0 {
            constituents.push((t.clone(), *m.numer() as u64));
        }
    }
    let first = constituents
        .first()
        .ok_or_else(|| Error::Incompatible("restriction is zero".into()))?
        .0
        .clone();
    let orbit: BTreeSet<Vec<Partition>> = block_perms
        .iter()
        .map(|bp| {
            let mut moved = first.clone();
            for (i, &j) in bp.iter().enumerate() {
                moved[j] = first[i].clone();
            }
            moved
        })
        .collect();
    for (c, _) in &constituents {
        if !orbit.contains(c) {
            return Err(Error::NotConjugate(format!(
                "constituent {} is not conjugate to {}",
                fmt_tuple(c),
                fmt_tuple(&first)
            )));
        }
    }
    let orbit: Vec<Vec<Partition>> = orbit.into_iter().collect();
    Ok(RestrictionData {
        class: UnipotentClass::new(orbit[0].clone()),
        constituents,
        orbit,
    })
}

fn fmt_tuple(t: &[Partition]) -> String {
    t.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("x")
}

/// All tuples of partitions with the given sizes, in product order.
pub fn partition_tuples(sizes: &[u32]) -> Vec<Vec<Partition>> {
    let mut out: Vec<Vec<Partition>> = vec![vec![]];
    for &s in sizes {
        let ps = partitions(s);
        out = out
            .into_iter()
            .flat_map(|t| {
                ps.iter().map(move |p| {
                    let mut t = t.clone();
                    t.push(p.clone());
                    t
                })
            })
            .collect();
    }
    out
}
