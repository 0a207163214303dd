//! Finite groups given by full multiplication tables.
//!
//! Every group stores its Cayley table; element `0` is always the identity.
//! Permutation groups additionally keep the permutation of each element so
//! that actions on coordinates can be read off directly.

use std::collections::HashMap;
use std::hash::Hash;

use num_integer::Integer;

use crate::error::{Error, Result};

pub mod characters;
pub mod cocycle;
pub mod modp;
pub mod projective;

pub use characters::{character_table, dixon_character_table, CharacterTable, ClassFunction};
pub use cocycle::{cocycle_cohomologous, twisted_irreps, CentralExtension, Cocycle, TwistedIrrep};
pub use projective::ProjectiveRep;

/// Hard ceiling on the order of any group we tabulate.
pub const MAX_TABULATED_ORDER: usize = 40_320;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupKind {
    Generic,
    /// `∏ S_{blocks[i]}` acting on consecutive blocks of points.
    SymmetricProduct(Vec<usize>),
}

#[derive(Clone, Debug)]
pub struct FiniteGroup {
    labels: Vec<String>,
    table: Vec<u32>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
    perms: Option<Vec<Vec<usize>>>,
    kind: GroupKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub elements: Vec<usize>,
}

impl ConjugacyClass {
    pub fn size(&self) -> usize {
        self.elements.len()
    }
}

/// A subgroup together with its embedding into the parent group.
/// `embed` is strictly increasing, so the identity stays at index 0.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub group: FiniteGroup,
    pub embed: Vec<usize>,
}

impl Subgroup {
    /// Index in the subgroup of a parent element, if it belongs to it.
    pub fn locate(&self, parent_elem: usize) -> Option<usize> {
        self.embed.binary_search(&parent_elem).ok()
    }
}

pub fn compose_perms(a: &[usize], b: &[usize]) -> Vec<usize> {
    // (a∘b)(i) = a(b(i))
    b.iter().map(|&i| a[i]).collect()
}

pub fn perm_label(p: &[usize]) -> String {
    let mut seen = vec![false; p.len()];
    let mut out = String::new();
    for start in 0..p.len() {
        if seen[start] || p[start] == start {
            seen[start] = true;
            continue;
        }
        let mut cyc = vec![start];
        seen[start] = true;
        let mut j = p[start];
        while j != start {
            seen[j] = true;
            cyc.push(j);
            j = p[j];
        }
        out.push('(');
        out.push_str(
            &cyc.iter()
                .map(|x| (x + 1).to_string())
                .collect::<Vec<_>>()
                .join(","),
        );
        out.push(')');
    }
    if out.is_empty() {
        "()".into()
    } else {
        out
    }
}

impl FiniteGroup {
    /// Closes `gens` under `mul` (breadth first from the identity) and
    /// tabulates the result. Returns the group and the concrete elements in
    /// index order.
    pub fn generate<T, M, L>(identity: T, gens: &[T], mul: M, label: L) -> Result<(Self, Vec<T>)>
    where
        T: Clone + Eq + Hash,
        M: Fn(&T, &T) -> T,
        L: Fn(&T) -> String,
    {
        let mut elems = vec![identity.clone()];
        let mut index: HashMap<T, usize> = HashMap::new();
        index.insert(identity, 0);
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let h = mul(&elems[i], g);
                if !index.contains_key(&h) {
                    if elems.len() >= MAX_TABULATED_ORDER {
                        return Err(Error::SizeBound {
                            order: elems.len() + 1,
                            bound: MAX_TABULATED_ORDER,
                        });
                    }
                    index.insert(h.clone(), elems.len());
                    elems.push(h);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let c = mul(&elems[a], &elems[b]);
                let ci = *index
                    .get(&c)
                    .ok_or_else(|| Error::InvalidGroup("generated set not closed".into()))?;
                table[a * n + b] = ci as u32;
            }
        }
        let generators = gens.iter().map(|g| index[g]).collect();
        let labels = elems.iter().map(&label).collect();
        let group = Self::assemble(labels, table, generators, None, GroupKind::Generic)?;
        Ok((group, elems))
    }

    fn assemble(
        labels: Vec<String>,
        table: Vec<u32>,
        generators: Vec<usize>,
        perms: Option<Vec<Vec<usize>>>,
        kind: GroupKind,
    ) -> Result<Self> {
        let n = labels.len();
        if table.len() != n * n || n == 0 {
            return Err(Error::InvalidGroup("table shape".into()));
        }
        for a in 0..n {
            if table[a] as usize != a || table[a * n] as usize != a {
                return Err(Error::InvalidGroup("element 0 is not the identity".into()));
            }
        }
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            for b in 0..n {
                if table[a * n + b] == 0 {
                    inverse[a] = b;
                    break;
                }
            }
            if inverse[a] == usize::MAX {
                return Err(Error::InvalidGroup(format!("element {} has no inverse", labels[a])));
            }
        }
        Ok(FiniteGroup {
            labels,
            table,
            inverse,
            generators,
            perms,
            kind,
        })
    }

    /// Builds a group from an explicit table, checking closure, identity,
    /// inverses and associativity (exhaustively up to order 64, on a
    /// deterministic stride of triples above that).
    pub fn from_table(labels: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = labels.len();
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup("table must be square".into()));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::InvalidGroup("table not closed".into()));
        }
        let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        let g = Self::assemble(labels, flat, (1..n).collect(), None, GroupKind::Generic)?;
        g.check_associative()?;
        let gens = g.minimal_generators();
        Ok(FiniteGroup { generators: gens, ..g })
    }

    /// Builds a group from a table known to be a group law (for example a
    /// central extension built from a validated cocycle).
    pub fn from_table_unchecked(labels: Vec<String>, table: Vec<Vec<usize>>) -> Self {
        let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
        let n = labels.len();
        Self::assemble(labels, flat, (1..n.min(2)).collect(), None, GroupKind::Generic)
            .expect("table is a group law")
    }

    pub fn set_generators(&mut self, gens: Vec<usize>) {
        self.generators = gens;
    }

    pub fn check_associative(&self) -> Result<()> {
        let n = self.order();
        let step = if n <= 64 { 1 } else { (n / 17).max(1) };
        for a in (0..n).step_by(step) {
            for b in (0..n).step_by(step) {
                for c in (0..n).step_by(step) {
                    if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)) {
                        return Err(Error::InvalidGroup(format!(
                            "associativity fails on ({}, {}, {})",
                            self.labels[a], self.labels[b], self.labels[c]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn trivial() -> Self {
        Self::assemble(vec!["e".into()], vec![0], vec![], Some(vec![vec![]]), GroupKind::Generic)
            .expect("trivial group")
    }

    /// The group generated by permutations of `{0..degree-1}`.
    pub fn from_permutations(degree: usize, gens: &[Vec<usize>]) -> Result<Self> {
        for g in gens {
            let mut s = g.clone();
            s.sort_unstable();
            if g.len() != degree || s != (0..degree).collect::<Vec<_>>() {
                return Err(Error::InvalidGroup(format!("not a permutation of {degree} points: {g:?}")));
            }
        }
        let id: Vec<usize> = (0..degree).collect();
        let (mut g, elems) = Self::generate(id, gens, |a, b| compose_perms(a, b), |p| perm_label(p))?;
        g.perms = Some(elems);
        Ok(g)
    }

    pub fn symmetric(n: usize) -> Self {
        Self::symmetric_product(&[n])
    }

    /// `∏ S_{e_i}` acting on `Σ e_i` points, block by block.
    pub fn symmetric_product(blocks: &[usize]) -> Self {
        let degree: usize = blocks.iter().sum();
        let mut gens = Vec::new();
        let mut off = 0;
        for &e in blocks {
            for i in 0..e.saturating_sub(1) {
                let mut p: Vec<usize> = (0..degree).collect();
                p.swap(off + i, off + i + 1);
                gens.push(p);
            }
            off += e;
        }
        let mut g = Self::from_permutations(degree, &gens).expect("symmetric product");
        g.kind = GroupKind::SymmetricProduct(blocks.to_vec());
        g
    }

    pub fn cyclic(n: usize) -> Self {
        Self::abelian(&[n])
    }

    /// `Z/n_1 × … × Z/n_k`; elements are indexed in mixed radix with the
    /// first factor varying slowest, so the index of `(a_1,…,a_k)` is
    /// lexicographic.
    pub fn abelian(invariants: &[usize]) -> Self {
        let n: usize = invariants.iter().product();
        let coords: Vec<Vec<usize>> = (0..n).map(|i| Self::mixed_radix(i, invariants)).collect();
        let idx = |c: &[usize]| c.iter().zip(invariants).fold(0, |acc, (x, m)| acc * m + x);
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                let c: Vec<usize> = coords[a]
                    .iter()
                    .zip(&coords[b])
                    .zip(invariants)
                    .map(|((x, y), m)| (x + y) % m)
                    .collect();
                table[a * n + b] = idx(&c) as u32;
            }
        }
        let labels = coords
            .iter()
            .map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        let gens = (0..invariants.len())
            .filter(|&i| invariants[i] > 1)
            .map(|i| {
                let mut c = vec![0; invariants.len()];
                c[i] = 1;
                idx(&c)
            })
            .collect();
        Self::assemble(labels, table, gens, None, GroupKind::Generic).expect("abelian group")
    }

    pub fn mixed_radix(mut i: usize, invariants: &[usize]) -> Vec<usize> {
        let mut c = vec![0; invariants.len()];
        for k in (0..invariants.len()).rev() {
            c[k] = i % invariants[k];
            i /= invariants[k];
        }
        c
    }

    pub fn direct_product(a: &FiniteGroup, b: &FiniteGroup) -> FiniteGroup {
        let (na, nb) = (a.order(), b.order());
        let n = na * nb;
        let mut table = vec![0u32; n * n];
        for x in 0..n {
            for y in 0..n {
                let (x1, x2) = (x / nb, x % nb);
                let (y1, y2) = (y / nb, y % nb);
                table[x * n + y] = (a.mul(x1, y1) * nb + b.mul(x2, y2)) as u32;
            }
        }
        let labels = (0..n)
            .map(|x| format!("{}x{}", a.labels[x / nb], b.labels[x % nb]))
            .collect();
        let mut gens: Vec<usize> = a.generators.iter().map(|&g| g * nb).collect();
        gens.extend(b.generators.iter().copied());
        let perms = match (&a.perms, &b.perms) {
            (Some(pa), Some(pb)) => {
                let da = pa[0].len();
                Some(
                    (0..n)
                        .map(|x| {
                            let mut p = pa[x / nb].clone();
                            p.extend(pb[x % nb].iter().map(|i| i + da));
                            p
                        })
                        .collect(),
                )
            }
            _ => None,
        };
        let kind = match (&a.kind, &b.kind) {
            (GroupKind::SymmetricProduct(x), GroupKind::SymmetricProduct(y)) => {
                GroupKind::SymmetricProduct(x.iter().chain(y).copied().collect())
            }
            _ => GroupKind::Generic,
        };
        Self::assemble(labels, table, gens, perms, kind).expect("direct product")
    }

    pub fn order(&self) -> usize {
        self.labels.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order() + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conj(&self, g: usize, x: usize) -> usize {
        // g x g^{-1}
        self.mul(self.mul(g, x), self.inv(g))
    }

    pub fn pow(&self, a: usize, k: usize) -> usize {
        let mut r = 0;
        for _ in 0..k {
            r = self.mul(r, a);
        }
        r
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn perms(&self) -> Option<&[Vec<usize>]> {
        self.perms.as_deref()
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> usize {
        (0..self.order()).fold(1, |acc, a| acc.lcm(&self.element_order(a)))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (a..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Greedy generating set: walk the elements in order and keep those not
    /// already in the subgroup generated so far.
    pub fn minimal_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = self.closure(&[]);
        for a in 0..self.order() {
            if !span[a] {
                gens.push(a);
                span = self.closure(&gens);
            }
        }
        gens
    }

    /// Membership mask of the subgroup generated by `gens`.
    pub fn closure(&self, gens: &[usize]) -> Vec<bool> {
        let mut inside = vec![false; self.order()];
        inside[0] = true;
        let mut queue = vec![0usize];
        while let Some(x) = queue.pop() {
            for &g in gens {
                let y = self.mul(x, g);
                if !inside[y] {
                    inside[y] = true;
                    queue.push(y);
                }
            }
        }
        inside
    }

    pub fn conjugacy_classes(&self) -> Vec<ConjugacyClass> {
        let n = self.order();
        let mut assigned = vec![false; n];
        let mut classes = Vec::new();
        for g in 0..n {
            if assigned[g] {
                continue;
            }
            let mut elems: Vec<usize> = (0..n).map(|h| self.conj(h, g)).collect();
            elems.sort_unstable();
            elems.dedup();
            for &x in &elems {
                assigned[x] = true;
            }
            classes.push(ConjugacyClass {
                representative: g,
                elements: elems,
            });
        }
        classes
    }

    /// The subgroup on the given elements (any order, duplicates allowed).
    pub fn subgroup(&self, elems: &[usize]) -> Result<Subgroup> {
        let mut embed: Vec<usize> = elems.to_vec();
        embed.sort_unstable();
        embed.dedup();
        if embed.first() != Some(&0) {
            return Err(Error::InvalidGroup("subgroup must contain the identity".into()));
        }
        let m = embed.len();
        let pos: HashMap<usize, usize> = embed.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let mut table = vec![0u32; m * m];
        for i in 0..m {
            for j in 0..m {
                let p = self.mul(embed[i], embed[j]);
                let k = *pos
                    .get(&p)
                    .ok_or_else(|| Error::InvalidGroup("subset not closed under multiplication".into()))?;
                table[i * m + j] = k as u32;
            }
        }
        let labels = embed.iter().map(|&e| self.labels[e].clone()).collect();
        let perms = self
            .perms
            .as_ref()
            .map(|p| embed.iter().map(|&e| p[e].clone()).collect());
        let g = Self::assemble(labels, table, vec![], perms, GroupKind::Generic)?;
        let gens = g.minimal_generators();
        Ok(Subgroup {
            group: FiniteGroup { generators: gens, ..g },
            embed,
        })
    }

    pub fn generated_subgroup(&self, gens: &[usize]) -> Subgroup {
        let mask = self.closure(gens);
        let elems: Vec<usize> = (0..self.order()).filter(|&i| mask[i]).collect();
        self.subgroup(&elems).expect("closure is a subgroup")
    }

    pub fn is_normal(&self, elems: &[usize]) -> bool {
        let mut mask = vec![false; self.order()];
        for &e in elems {
            mask[e] = true;
        }
        (0..self.order()).all(|g| elems.iter().all(|&x| mask[self.conj(g, x)]))
    }

    /// Quotient by a normal subgroup. Returns the quotient group, the
    /// projection, and the coset representatives (least element of each coset).
    pub fn quotient(&self, normal: &[usize]) -> Result<(FiniteGroup, Vec<usize>, Vec<usize>)> {
        if !self.is_normal(normal) {
            return Err(Error::NotNormal("quotient by a non-normal subset".into()));
        }
        let n = self.order();
        let mut proj = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for g in 0..n {
            if proj[g] != usize::MAX {
                continue;
            }
            let c = reps.len();
            reps.push(g);
            for &h in normal {
                proj[self.mul(g, h)] = c;
            }
        }
        let m = reps.len();
        let mut table = vec![0u32; m * m];
        for i in 0..m {
            for j in 0..m {
                table[i * m + j] = proj[self.mul(reps[i], reps[j])] as u32;
            }
        }
        let labels = reps.iter().map(|&r| format!("[{}]", self.labels[r])).collect();
        let q = Self::assemble(labels, table, vec![], None, GroupKind::Generic)?;
        let gens = q.minimal_generators();
        Ok((FiniteGroup { generators: gens, ..q }, proj, reps))
    }

    /// Class index of every element.
    pub fn class_map(&self, classes: &[ConjugacyClass]) -> Vec<usize> {
        let mut m = vec![0; self.order()];
        for (i, c) in classes.iter().enumerate() {
            for &x in &c.elements {
                m[x] = i;
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sizes(g: &FiniteGroup) -> Vec<usize> {
        g.conjugacy_classes().iter().map(|c| c.size()).collect()
    }

    #[test]
    fn s3_classes() {
        let g = FiniteGroup::symmetric(3);
        assert_eq!(g.order(), 6);
        let mut s = sizes(&g);
        assert_eq!(s[0], 1);
        s.sort_unstable();
        assert_eq!(s, vec![1, 2, 3]);
    }

    #[test]
    fn trivial_and_abelian_classes() {
        assert_eq!(sizes(&FiniteGroup::trivial()), vec![1]);
        let k = FiniteGroup::direct_product(&FiniteGroup::symmetric(2), &FiniteGroup::symmetric(2));
        assert_eq!(sizes(&k), vec![1, 1, 1, 1]);
        assert!(k.is_abelian());
        assert_eq!(k.kind(), &GroupKind::SymmetricProduct(vec![2, 2]));
    }

    #[test]
    fn classes_partition_the_group() {
        let g = FiniteGroup::symmetric_product(&[2, 3]);
        assert_eq!(g.order(), 12);
        let mut all: Vec<usize> = g.conjugacy_classes().into_iter().flat_map(|c| c.elements).collect();
        all.sort_unstable();
        assert_eq!(all, (0..12).collect::<Vec<_>>());
    }

    #[test]
    fn subgroup_and_quotient() {
        let g = FiniteGroup::symmetric(3);
        let a3: Vec<usize> = (0..6).filter(|&x| g.element_order(x) != 2).collect();
        assert!(g.is_normal(&a3));
        let (q, proj, _) = g.quotient(&a3).unwrap();
        assert_eq!(q.order(), 2);
        assert_eq!(proj[0], 0);
        let s2 = g.generated_subgroup(&[g.generators()[0]]);
        assert_eq!(s2.group.order(), 2);
        assert!(!g.is_normal(&s2.embed));
        assert!(g.quotient(&s2.embed).is_err());
    }

    #[test]
    fn from_table_rejects_nonassociative() {
        // a loop that is not a group: 0 identity, 1*1=2, 1*2=0, 2*1=0, 2*2=1 is Z/3 (fine)
        let ok = FiniteGroup::from_table(
            vec!["e".into(), "a".into(), "b".into()],
            vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]],
        );
        assert!(ok.is_ok());
        let bad = FiniteGroup::from_table(
            vec!["e".into(), "a".into(), "b".into(), "c".into(), "d".into()],
            vec![
                vec![0, 1, 2, 3, 4],
                vec![1, 0, 3, 4, 2],
                vec![2, 4, 0, 1, 3],
                vec![3, 2, 4, 0, 1],
                vec![4, 3, 1, 2, 0],
            ],
        );
        assert!(bad.is_err());
    }
}
