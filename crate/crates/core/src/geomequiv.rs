//! Semisimple block skeletons with ideal filtrations, spectrum-preserving
//! morphisms between them, Morita linking algebras and certificate
//! composition along equivalence chains.
//!
//! A block is a matrix algebra `M_k`; its primitive ideal is the block
//! itself, so `Prim` of a skeleton is its list of blocks. A morphism is
//! recorded by the multiplicity with which each source block embeds into
//! each target block.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bernstein::InertialClass;
use crate::error::{Error, Result};
use crate::extquot::GammaSet;
use crate::groups::ProjectiveRep;
use crate::packets::enumerate_params_g;
use crate::springer::a_value;
use crate::torus::TorusPoint;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockAlgebra {
    pub blocks: Vec<(String, u64)>,
    /// Ascending chain of ideals; the last level holds every block.
    pub filtration: Vec<Vec<usize>>,
}

impl BlockAlgebra {
    pub fn new(blocks: Vec<(String, u64)>, mut filtration: Vec<Vec<usize>>) -> Result<Self> {
        let n = blocks.len();
        if blocks.iter().any(|(_, k)| *k == 0) {
            return Err(Error::Filtration("blocks have positive size".into()));
        }
        let labels: BTreeSet<&str> = blocks.iter().map(|(l, _)| l.as_str()).collect();
        if labels.len() != n {
            return Err(Error::Filtration("block labels repeat".into()));
        }
        for lvl in &mut filtration {
            lvl.sort_unstable();
            lvl.dedup();
            if lvl.iter().any(|&b| b >= n) {
                return Err(Error::Filtration("level names a missing block".into()));
            }
        }
        for w in filtration.windows(2) {
            if !w[0].iter().all(|b| w[1].binary_search(b).is_ok()) {
                return Err(Error::Filtration("levels are not nested".into()));
            }
        }
        if filtration.last().map(Vec::len) != Some(n) {
            return Err(Error::Filtration("final level must hold every block".into()));
        }
        Ok(BlockAlgebra { blocks, filtration })
    }

    /// One level holding everything.
    pub fn unfiltered(blocks: Vec<(String, u64)>) -> Result<Self> {
        let all = (0..blocks.len()).collect();
        Self::new(blocks, vec![all])
    }

    /// Level `k` gets the blocks with `key ≥ max - k`, so the blocks with the
    /// largest key form the smallest ideal.
    pub fn filtered_by(blocks: Vec<(String, u64)>, key: &[u32]) -> Result<Self> {
        if key.len() != blocks.len() {
            return Err(Error::Filtration("one key per block".into()));
        }
        let keys: BTreeSet<u32> = key.iter().copied().collect();
        let filtration = keys
            .iter()
            .rev()
            .map(|&k| (0..blocks.len()).filter(|&b| key[b] >= k).collect())
            .collect::<Vec<_>>();
        let filtration = if filtration.is_empty() { vec![vec![]] } else { filtration };
        Self::new(blocks, filtration)
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn dimension(&self) -> u64 {
        self.blocks.iter().map(|(_, k)| k * k).sum()
    }

    pub fn levels(&self) -> usize {
        self.filtration.len()
    }

    /// First level containing block `b`.
    pub fn level_of(&self, b: usize) -> usize {
        self.filtration
            .iter()
            .position(|l| l.binary_search(&b).is_ok())
            .expect("final level holds every block")
    }

    /// `M_n(A)`: same ideals, every block enlarged.
    pub fn amplify(&self, n: u64) -> BlockAlgebra {
        BlockAlgebra {
            blocks: self.blocks.iter().map(|(l, k)| (format!("M{n}({l})"), k * n)).collect(),
            filtration: self.filtration.clone(),
        }
    }

    /// Block `i` moves to position `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<BlockAlgebra> {
        check_perm(perm, self.len())?;
        let mut blocks = vec![(String::new(), 0); self.len()];
        for (i, b) in self.blocks.iter().enumerate() {
            blocks[perm[i]] = b.clone();
        }
        let filtration = self
            .filtration
            .iter()
            .map(|l| l.iter().map(|&b| perm[b]).collect())
            .collect();
        BlockAlgebra::new(blocks, filtration)
    }
}

fn check_perm(perm: &[usize], n: usize) -> Result<()> {
    let set: BTreeSet<usize> = perm.iter().copied().collect();
    if perm.len() != n || set.len() != n || perm.iter().any(|&p| p >= n) {
        return Err(Error::Pairing(format!("{perm:?} is not a permutation of {n} blocks")));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FilteredMorphism {
    pub source: BlockAlgebra,
    pub target: BlockAlgebra,
    /// `(source block, target block, multiplicity)`, merged and sorted.
    pub edges: Vec<(usize, usize, u64)>,
}

impl FilteredMorphism {
    pub fn new(source: BlockAlgebra, target: BlockAlgebra, edges: Vec<(usize, usize, u64)>) -> Result<Self> {
        if source.levels() != target.levels() {
            return Err(Error::Filtration(format!(
                "source has {} levels, target has {}",
                source.levels(),
                target.levels()
            )));
        }
        let mut merged: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for (a, b, m) in edges {
            if a >= source.len() || b >= target.len() {
                return Err(Error::Filtration(format!("edge {a} -> {b} names a missing block")));
            }
            if m > 0 {
                *merged.entry((a, b)).or_default() += m;
            }
        }
        for &(a, b) in merged.keys() {
            if target.level_of(b) > source.level_of(a) {
                return Err(Error::Filtration(format!(
                    "{} lies in level {} but maps into {} at level {}",
                    source.blocks[a].0,
                    source.level_of(a),
                    target.blocks[b].0,
                    target.level_of(b)
                )));
            }
        }
        Ok(FilteredMorphism {
            source,
            target,
            edges: merged.into_iter().map(|((a, b), m)| (a, b, m)).collect(),
        })
    }

    pub fn identity(a: &BlockAlgebra) -> FilteredMorphism {
        FilteredMorphism {
            source: a.clone(),
            target: a.clone(),
            edges: (0..a.len()).map(|i| (i, i, 1)).collect(),
        }
    }

    /// `g ∘ self`; multiplicities compose as a matrix product.
    pub fn then(&self, g: &FilteredMorphism) -> Result<FilteredMorphism> {
        if self.target != g.source {
            return Err(Error::Filtration("target and source differ".into()));
        }
        let mut m: BTreeMap<(usize, usize), u64> = BTreeMap::new();
        for &(a, b, x) in &self.edges {
            for &(b2, c, y) in &g.edges {
                if b == b2 {
                    *m.entry((a, c)).or_default() += x * y;
                }
            }
        }
        FilteredMorphism::new(
            self.source.clone(),
            g.target.clone(),
            m.into_iter().map(|((a, c), k)| (a, c, k)).collect(),
        )
    }

    pub fn relabel(&self, src: &[usize], tgt: &[usize]) -> Result<FilteredMorphism> {
        FilteredMorphism::new(
            self.source.relabel(src)?,
            self.target.relabel(tgt)?,
            self.edges.iter().map(|&(a, b, m)| (src[a], tgt[b], m)).collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpectrumCheck {
    pub preserving: bool,
    /// `prim[b]` is the source block under target block `b` when preserving.
    pub prim: Option<Vec<usize>>,
    pub failures: Vec<String>,
}

/// Level by level, the blocks new at that level must correspond bijectively:
/// every new target block is fed by exactly one new source block and no
/// two target blocks share one.
pub fn check_spectrum_preserving(m: &FilteredMorphism) -> SpectrumCheck {
    let (s, t) = (&m.source, &m.target);
    let mut prim = vec![usize::MAX; t.len()];
    let mut failures = Vec::new();
    for k in 0..t.levels() {
        let new_t: Vec<usize> = (0..t.len()).filter(|&b| t.level_of(b) == k).collect();
        let new_s: BTreeSet<usize> = (0..s.len()).filter(|&a| s.level_of(a) == k).collect();
        let mut hit: BTreeMap<usize, usize> = BTreeMap::new();
        for &b in &new_t {
            let feeders: Vec<usize> = m
                .edges
                .iter()
                .filter(|&&(a, b2, _)| b2 == b && new_s.contains(&a))
                .map(|&(a, _, _)| a)
                .collect();
            match feeders.as_slice() {
                [a] => {
                    prim[b] = *a;
                    if let Some(prev) = hit.insert(*a, b) {
                        failures.push(format!(
                            "level {k}: {} and {} both pull back to {}",
                            t.blocks[prev].0, t.blocks[b].0, s.blocks[*a].0
                        ));
                    }
                }
                [] => failures.push(format!("level {k}: nothing maps into {}", t.blocks[b].0)),
                many => failures.push(format!(
                    "level {k}: {} is fed by {} blocks (merge)",
                    t.blocks[b].0,
                    many.len()
                )),
            }
        }
        for a in &new_s {
            if !hit.contains_key(a) {
                failures.push(format!("level {k}: {} is not reached", s.blocks[*a].0));
            }
        }
    }
    let preserving = failures.is_empty();
    SpectrumCheck {
        preserving,
        prim: preserving.then_some(prim),
        failures,
    }
}

/// Composes `Prim` bijections of `A → B` and `B → C` into one for `A → C`.
pub fn compose_certificates(first: &[usize], second: &[usize]) -> Vec<usize> {
    second.iter().map(|&b| first[b]).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct MoritaCheck {
    pub equivalent: bool,
    pub reason: String,
    pub linking: Option<BlockAlgebra>,
    pub left: Option<SpectrumCheck>,
    pub right: Option<SpectrumCheck>,
}

/// The bimodule pairs `a`-block `i` with `b`-block `j`; the linking algebra
/// then has a block of size `k_i + k_j` at the lower of their two levels,
/// and each corner includes with multiplicity one.
pub fn morita_linking_check(a: &BlockAlgebra, b: &BlockAlgebra, pairing: &[(usize, usize)]) -> Result<MoritaCheck> {
    let refuse = |reason: String| MoritaCheck {
        equivalent: false,
        reason,
        linking: None,
        left: None,
        right: None,
    };
    if a.len() != b.len() {
        return Ok(refuse(format!("{} blocks against {}", a.len(), b.len())));
    }
    if a.levels() != b.levels() {
        return Ok(refuse(format!("{} levels against {}", a.levels(), b.levels())));
    }
    let left: BTreeSet<usize> = pairing.iter().map(|p| p.0).collect();
    let right: BTreeSet<usize> = pairing.iter().map(|p| p.1).collect();
    if pairing.len() != a.len()
        || left.len() != a.len()
        || right.len() != b.len()
        || left.iter().any(|&i| i >= a.len())
        || right.iter().any(|&j| j >= b.len())
    {
        return Err(Error::Pairing(format!("{pairing:?} is not a bijection of blocks")));
    }
    let mut pairs = pairing.to_vec();
    pairs.sort_unstable();
    let blocks = pairs
        .iter()
        .map(|&(i, j)| (format!("[{}|{}]", a.blocks[i].0, b.blocks[j].0), a.blocks[i].1 + b.blocks[j].1))
        .collect();
    let lvl: Vec<usize> = pairs.iter().map(|&(i, j)| a.level_of(i).min(b.level_of(j))).collect();
    let filtration = (0..a.levels())
        .map(|k| (0..pairs.len()).filter(|&p| lvl[p] <= k).collect())
        .collect();
    let linking = BlockAlgebra::new(blocks, filtration)?;
    let corner_a = FilteredMorphism::new(
        a.clone(),
        linking.clone(),
        pairs.iter().enumerate().map(|(p, &(i, _))| (i, p, 1)).collect(),
    )?;
    let corner_b = FilteredMorphism::new(
        b.clone(),
        linking.clone(),
        pairs.iter().enumerate().map(|(p, &(_, j))| (j, p, 1)).collect(),
    )?;
    let l = check_spectrum_preserving(&corner_a);
    let r = check_spectrum_preserving(&corner_b);
    let equivalent = l.preserving && r.preserving;
    Ok(MoritaCheck {
        equivalent,
        reason: if equivalent { "both corners spectrum preserving".into() } else { "a corner inclusion fails".into() },
        linking: Some(linking),
        left: Some(l),
        right: Some(r),
    })
}

/// Skeleton of `C(X) ⋊ Γ`: one block per `[x, ρ]` of the induced dimension.
pub fn crossed_product_skeleton(x: &GammaSet) -> Result<BlockAlgebra> {
    let blocks = x
        .extended_quotient()?
        .iter()
        .map(|p| (format!("{}:{}", p.point_label, p.rho_label), p.induced_dim()))
        .collect();
    BlockAlgebra::unfiltered(blocks)
}

/// Skeleton of the corner `p_μ (C(X) ⋊ Γ) p_μ` for a representation `μ`
/// of `Γ`; blocks with multiplicity zero vanish.
pub fn corner_skeleton(x: &GammaSet, mu: &ProjectiveRep) -> Result<BlockAlgebra> {
    let blocks = x
        .invariant_multiplicities(mu)?
        .into_iter()
        .filter(|(_, m)| *m > 0)
        .map(|(p, m)| (format!("{}:{}", p.point_label, p.rho_label), m * p.orbit_size as u64))
        .collect();
    BlockAlgebra::unfiltered(blocks)
}

/// Pairs blocks of two skeletons with equal labels.
pub fn label_pairing(a: &BlockAlgebra, b: &BlockAlgebra) -> Vec<(usize, usize)> {
    a.blocks
        .iter()
        .enumerate()
        .filter_map(|(i, (l, _))| b.blocks.iter().position(|(m, _)| m == l).map(|j| (i, j)))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    pub name: String,
    pub check: SpectrumCheck,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub levels: usize,
    pub a_weights: Vec<u32>,
    pub steps: Vec<ChainStep>,
    pub composed: Option<Vec<usize>>,
    pub direct: Option<Vec<usize>>,
    pub agrees: bool,
}

/// The three-step chain `H_q → H_1 → gr → C[T_s] ⋊ W_s` over the sample,
/// each skeleton with one block per parameter and filtered by a-weight.
/// Consecutive algebras are matched level by level through their blocks.
pub fn a_weight_chain(s: &InertialClass, points: &[TorusPoint]) -> Result<ChainReport> {
    let params = enumerate_params_g(s, points, false)?;
    let a: Vec<u32> = params.points.iter().map(|p| a_value(&p.springer_class)).collect();
    let stage = |tag: &str| -> Result<BlockAlgebra> {
        let blocks = params
            .points
            .iter()
            .map(|p| (format!("{tag}:{}:{}", p.base, p.rho_label), p.rho_dim))
            .collect();
        BlockAlgebra::filtered_by(blocks, &a)
    };
    let algebras = [stage("Hq")?, stage("H1")?, stage("gr")?, stage("TW")?];
    let n = params.points.len();
    // each stage lists the parameters in its own order: a fixed rotation
    // within each a-weight keeps the matching from being the identity
    let mut order: Vec<Vec<usize>> = vec![(0..n).collect()];
    for step in 1..algebras.len() {
        let prev = &order[step - 1];
        let mut next = prev.clone();
        let mut by_a: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for (pos, &i) in prev.iter().enumerate() {
            by_a.entry(a[i]).or_default().push(pos);
        }
        for slots in by_a.values() {
            for (k, &pos) in slots.iter().enumerate() {
                next[slots[(k + 1) % slots.len()]] = prev[pos];
            }
        }
        order.push(next);
    }
    let place = |stage: usize| -> Vec<usize> {
        let mut where_ = vec![0; n];
        for (pos, &i) in order[stage].iter().enumerate() {
            where_[i] = pos;
        }
        where_
    };
    let arranged: Vec<BlockAlgebra> = algebras
        .iter()
        .enumerate()
        .map(|(k, alg)| alg.relabel(&place(k)))
        .collect::<Result<_>>()?;
    let mut steps = Vec::new();
    let mut morphisms = Vec::new();
    for k in 0..arranged.len() - 1 {
        let (src, tgt) = (place(k), place(k + 1));
        let m = FilteredMorphism::new(
            arranged[k].clone(),
            arranged[k + 1].clone(),
            (0..n).map(|i| (src[i], tgt[i], 1)).collect(),
        )?;
        steps.push(ChainStep {
            name: format!("{} -> {}", ["Hq", "H1", "gr", "TW"][k], ["Hq", "H1", "gr", "TW"][k + 1]),
            check: check_spectrum_preserving(&m),
        });
        morphisms.push(m);
    }
    let composed = steps.iter().try_fold(None::<Vec<usize>>, |acc, st| {
        st.check.prim.as_ref().map(|p| Some(acc.map_or_else(|| p.clone(), |c| compose_certificates(&c, p))))
    });
    let composed = composed.flatten();
    let end_to_end = morphisms[1..].iter().try_fold(morphisms[0].clone(), |acc, m| acc.then(m))?;
    let direct = check_spectrum_preserving(&end_to_end).prim;
    let agrees = steps.iter().all(|s| s.check.preserving) && composed.is_some() && composed == direct;
    Ok(ChainReport {
        levels: arranged[0].levels(),
        a_weights: a,
        steps,
        composed,
        direct,
        agrees,
    })
}
