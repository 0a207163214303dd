//! Inertial-class data: the torus `T_s`, `W_s = ∏ S_{e_i}`, the character
//! group `X^G(s)` acting by block permutations and translations, the
//! stabilizer `Stab(s) = W_s ⋊ X^G(s)`, and the subordinate components of the
//! derived group with their tori, Weyl-type groups and cocycles.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::cyclo::{Cyclo, RootOfUnity};
use crate::error::{Error, Result};
use crate::extquot::GammaSet;
use crate::groups::{compose_perms, perm_label, twisted_irreps, Cocycle, FiniteGroup, Subgroup, TwistedIrrep};
use crate::torus::{sample_points, AffineMap, ComponentTorus, Coord, StratifiedTorus, TorusPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSpec {
    pub m: u32,
    pub e: usize,
}

/// A generator of `X^G(s)`: where it sends each block and the translation
/// it applies (one coordinate per block, repeated across the block).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct XGenerator {
    pub block_perm: Vec<usize>,
    pub shift: Vec<Coord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InertialSpec {
    pub blocks: Vec<BlockSpec>,
    pub d: u32,
    pub invariants: Vec<usize>,
    pub generators: Vec<XGenerator>,
    /// Bilinear form on the generators; `κ(a, b) = Σ a_i b_j kappa[i][j]`.
    pub kappa: Vec<Vec<RootOfUnity>>,
    /// Optional explicit twisting homomorphism, same shape as `kappa`.
    pub phi: Option<Vec<Vec<RootOfUnity>>>,
    /// Generators of `X^L(ω, V_μ)` as coordinate vectors.
    pub vmu: Vec<Vec<usize>>,
    /// One weight per block for the diagonal `X_nr(L/L♯)`.
    pub xnr_weights: Option<Vec<i64>>,
}

/// Validated inertial class. Elements of `X^G(s)` are indices into `xg`.
#[derive(Clone, Debug)]
pub struct InertialClass {
    pub spec: InertialSpec,
    pub rank: usize,
    pub blocks: Vec<Vec<usize>>,
    pub w_s: Arc<FiniteGroup>,
    pub xg: Arc<FiniteGroup>,
    pub xg_block_perm: Vec<Vec<usize>>,
    pub xg_perm: Vec<Vec<usize>>,
    pub chi: Vec<TorusPoint>,
    pub xl_s: Vec<usize>,
    pub xl_omega: Vec<usize>,
    pub vmu: Vec<usize>,
    pub kappa: Cocycle,
    /// `phi[γ][α]` for `γ ∈ X^G(s)`, `α ∈ X^L(ω)` (zero elsewhere).
    pub phi: Vec<Vec<RootOfUnity>>,
    pub stab: Arc<FiniteGroup>,
    /// `(P, γ)` for each element of `Stab(s)`.
    pub stab_elems: Vec<(Vec<usize>, usize)>,
    pub stab_maps: Vec<AffineMap>,
    pub stab_kappa: Cocycle,
    /// Per-coordinate weights of `X_nr(L/L♯)`.
    pub diagonal: Option<Vec<i64>>,
    omega_irreps: Vec<TwistedIrrep>,
    xl_omega_sub: Arc<Subgroup>,
}

/// A Levi component: an `X^L(s)`-orbit on `Irr C[X^L(ω), κ_ω]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeviComponent {
    pub irreps: Vec<usize>,
    pub labels: Vec<String>,
    pub stabilizer: Vec<usize>,
}

/// A component of the derived group subordinate to `s`, represented by the
/// least irreducible `ρ_0` of its `X^G(s)`-orbit.
#[derive(Clone, Debug)]
pub struct SubordinateComponent {
    pub index: usize,
    pub rho0: usize,
    pub rho0_label: String,
    pub rho0_dim: u64,
    pub levi_orbits: Vec<LeviComponent>,
    /// `X^L(s, σ♯)`.
    pub xl_sigma: Vec<usize>,
    /// `X^G(s, σ♯)`.
    pub xg_sigma: Vec<usize>,
    /// Block permutations making up `R_{t♯}`.
    pub r_t: Vec<Vec<usize>>,
    pub w_t: Arc<FiniteGroup>,
    pub w_t_maps: Vec<AffineMap>,
    pub torus_levi: ComponentTorus,
    pub torus: ComponentTorus,
    pub cocycle: Cocycle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StabilizerTower {
    pub w_s: usize,
    pub w_s_sharp: usize,
    pub r_s_sharp: usize,
    pub stab: usize,
    pub stab_plus: usize,
    pub checks: Vec<(String, bool)>,
}

fn root_log(c: &Cyclo) -> Option<RootOfUnity> {
    let n = 2 * c.conductor().max(1);
    (0..n).find(|&k| Cyclo::root(k, n) == *c).map(|k| RootOfUnity::from_fraction(k as i64, n as i64))
}

fn inv_err(msg: impl Into<String>) -> Error {
    Error::InertialInvariant(msg.into())
}

fn block_perm_of(blocks: &[Vec<usize>], p: &[usize]) -> Option<Vec<usize>> {
    blocks
        .iter()
        .map(|b| {
            let mut img: Vec<usize> = b.iter().map(|&i| p[i]).collect();
            img.sort_unstable();
            blocks.iter().position(|c| *c == img)
        })
        .collect()
}

impl InertialClass {
    pub fn build(spec: InertialSpec) -> Result<Self> {
        let nb = spec.blocks.len();
        if nb == 0 || spec.blocks.iter().any(|b| b.e == 0 || b.m == 0) || spec.d == 0 {
            return Err(inv_err("blocks need positive m, e and d"));
        }
        for i in 0..nb {
            for j in i + 2..nb {
                if spec.blocks[j] == spec.blocks[i] && spec.blocks[i + 1] != spec.blocks[i] {
                    return Err(inv_err("factors with equal (m, e) must be adjacent"));
                }
            }
        }
        let mut blocks = Vec::new();
        let mut off = 0;
        for b in &spec.blocks {
            blocks.push((off..off + b.e).collect::<Vec<_>>());
            off += b.e;
        }
        let rank = off;
        let w_s = Arc::new(FiniteGroup::symmetric_product(
            &spec.blocks.iter().map(|b| b.e).collect::<Vec<_>>(),
        ));
        let k = spec.invariants.len();
        if spec.generators.len() != k || spec.invariants.iter().any(|&n| n == 0) {
            return Err(inv_err("one generator per invariant factor expected"));
        }
        let xg = Arc::new(FiniteGroup::abelian(&spec.invariants));
        let n = xg.order();
        let coords: Vec<Vec<usize>> = (0..n).map(|i| FiniteGroup::mixed_radix(i, &spec.invariants)).collect();
        let index_of = |c: &[usize]| -> usize {
            c.iter().zip(&spec.invariants).fold(0, |acc, (x, m)| acc * m + x % m)
        };
        let gen_index: Vec<usize> = (0..k)
            .map(|i| {
                let mut c = vec![0; k];
                c[i] = 1 % spec.invariants[i];
                index_of(&c)
            })
            .collect();

        // affine maps of the generators
        let mut gen_maps = Vec::new();
        for (gi, g) in spec.generators.iter().enumerate() {
            if g.block_perm.len() != nb || g.shift.len() != nb {
                return Err(inv_err(format!("generator {gi}: block_perm and shift need one entry per block")));
            }
            let mut seen = g.block_perm.clone();
            seen.sort_unstable();
            if seen != (0..nb).collect::<Vec<_>>() {
                return Err(inv_err(format!("generator {gi}: block_perm is not a permutation")));
            }
            for (i, &j) in g.block_perm.iter().enumerate() {
                if spec.blocks[i] != spec.blocks[j] {
                    return Err(inv_err(format!(
                        "generator {gi} sends block {i} to block {j} with different (m, e)"
                    )));
                }
            }
            let mut perm = vec![0; rank];
            for (i, &j) in g.block_perm.iter().enumerate() {
                for t in 0..spec.blocks[i].e {
                    perm[blocks[i][t]] = blocks[j][t];
                }
            }
            let shift = TorusPoint(
                (0..nb)
                    .flat_map(|i| std::iter::repeat_n(g.shift[i], spec.blocks[i].e))
                    .collect(),
            );
            if shift.translation_order().is_none() {
                return Err(inv_err(format!("generator {gi}: χ must be unitary of finite order")));
            }
            gen_maps.push(AffineMap { perm, shift });
        }
        // extend to all of X^G(s), checking it is a homomorphism
        let mut maps: Vec<Option<AffineMap>> = vec![None; n];
        maps[0] = Some(AffineMap::identity(rank));
        let mut queue = vec![0usize];
        while let Some(a) = queue.pop() {
            for (gi, &g) in gen_index.iter().enumerate() {
                let b = xg.mul(a, g);
                let m = maps[a].as_ref().expect("visited").compose(&gen_maps[gi]);
                match &maps[b] {
                    None => {
                        maps[b] = Some(m);
                        queue.push(b);
                    }
                    Some(old) if *old != m => {
                        return Err(inv_err(format!(
                            "X^G(s) action is not a homomorphism at {}",
                            xg.label(b)
                        )));
                    }
                    _ => {}
                }
            }
        }
        let maps: Vec<AffineMap> = maps.into_iter().map(|m| m.expect("generated")).collect();
        for a in 0..n {
            for b in 0..n {
                if maps[a].compose(&maps[b]) != maps[xg.mul(a, b)] {
                    return Err(inv_err(format!(
                        "X^G(s) action is not a homomorphism at ({}, {})",
                        xg.label(a),
                        xg.label(b)
                    )));
                }
            }
        }
        let xg_perm: Vec<Vec<usize>> = maps.iter().map(|m| m.perm.clone()).collect();
        let chi: Vec<TorusPoint> = maps.iter().map(|m| m.shift.clone()).collect();
        let xg_block_perm: Vec<Vec<usize>> = xg_perm
            .iter()
            .map(|p| block_perm_of(&blocks, p).expect("block permutation"))
            .collect();
        let xl_s: Vec<usize> = (0..n).filter(|&g| xg_block_perm[g].iter().enumerate().all(|(i, &j)| i == j)).collect();
        let xl_omega: Vec<usize> = xl_s.iter().copied().filter(|&g| chi[g].is_zero()).collect();

        // κ as a bilinear form
        if !spec.kappa.is_empty() && (spec.kappa.len() != k || spec.kappa.iter().any(|r| r.len() != k)) {
            return Err(inv_err("kappa must be a square matrix over the generators"));
        }
        let bil = |m: &Vec<Vec<RootOfUnity>>, a: usize, b: usize| -> RootOfUnity {
            let mut acc = RootOfUnity::ONE;
            if m.is_empty() {
                return acc;
            }
            for i in 0..k {
                for j in 0..k {
                    acc = acc + m[i][j].pow((coords[a][i] * coords[b][j]) as i64);
                }
            }
            acc
        };
        for a in 0..n {
            for b in 0..n {
                let ab = xg.mul(a, b);
                for z in 0..n {
                    if bil(&spec.kappa, ab, z) != bil(&spec.kappa, a, z) + bil(&spec.kappa, b, z)
                        || bil(&spec.kappa, z, ab) != bil(&spec.kappa, z, a) + bil(&spec.kappa, z, b)
                    {
                        return Err(inv_err(format!(
                            "kappa is not a well-defined bilinear form at ({}, {}, {})",
                            xg.label(a),
                            xg.label(b),
                            xg.label(z)
                        )));
                    }
                }
            }
        }
        let kappa = Cocycle::from_fn(xg.clone(), |a, b| bil(&spec.kappa, a, b))?;

        // V_μ
        let vgens: Vec<usize> = spec.vmu.iter().map(|c| index_of(c)).collect();
        if spec.vmu.iter().any(|c| c.len() != k) {
            return Err(inv_err("V_mu generators need one coordinate per invariant"));
        }
        let vmask = xg.closure(&vgens);
        let vmu: Vec<usize> = (0..n).filter(|&g| vmask[g]).collect();
        if vmu.iter().any(|v| xl_omega.binary_search(v).is_err()) {
            return Err(inv_err("X^L(ω, V_μ) must lie in X^L(ω)"));
        }
        for &v in &vmu {
            for a in 0..n {
                if !kappa.get(v, a).is_one() || !kappa.get(a, v).is_one() {
                    return Err(inv_err(format!(
                        "kappa is not inflated from X^G(s)/X^L(ω, V_μ): κ({}, {}) ≠ 0",
                        xg.label(v),
                        xg.label(a)
                    )));
                }
            }
        }

        // φ
        let phi: Vec<Vec<RootOfUnity>> = (0..n)
            .map(|g| {
                (0..n)
                    .map(|a| {
                        if xl_omega.binary_search(&a).is_err() {
                            RootOfUnity::ONE
                        } else {
                            match &spec.phi {
                                Some(m) => bil(m, g, a),
                                None => kappa.get(g, a) - kappa.get(a, g),
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        if let Some(m) = &spec.phi {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(inv_err("phi must be a square matrix over the generators"));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for &x in &xl_omega {
                    if phi[xg.mul(a, b)][x] != phi[a][x] + phi[b][x] {
                        return Err(inv_err("phi: γ ↦ φ_γ is not a homomorphism"));
                    }
                }
            }
        }
        for g in 0..n {
            for &x in &xl_omega {
                for &y in &xl_omega {
                    if phi[g][xg.mul(x, y)] != phi[g][x] + phi[g][y] {
                        return Err(inv_err(format!("phi: φ_{} is not a character of X^L(ω)", xg.label(g))));
                    }
                }
            }
        }

        // Stab(s) = W_s ⋊ X^G(s) as pairs (P, γ)
        let mut sgens: Vec<(Vec<usize>, usize)> = w_s
            .generators()
            .iter()
            .map(|&g| (w_s.perms().expect("perm group")[g].clone(), 0))
            .collect();
        for &g in &gen_index {
            sgens.push((xg_perm[g].clone(), g));
        }
        let (stab, stab_elems) = FiniteGroup::generate(
            ((0..rank).collect::<Vec<usize>>(), 0usize),
            &sgens,
            |a, b| (compose_perms(&a.0, &b.0), xg.mul(a.1, b.1)),
            |a| format!("{}·{}", perm_label(&a.0), xg.label(a.1)),
        )?;
        if stab.order() != w_s.order() * n {
            return Err(Error::Internal("Stab(s) has the wrong order".into()));
        }
        let stab = Arc::new(stab);
        let stab_maps: Vec<AffineMap> = stab_elems
            .iter()
            .map(|(p, g)| AffineMap {
                perm: p.clone(),
                shift: chi[*g].clone(),
            })
            .collect();
        StratifiedTorus::new(rank, blocks.clone(), stab.clone(), stab_maps.clone())
            .map_err(|e| inv_err(format!("Stab(s) does not act on T_s: {e}")))?;
        let proj: Vec<usize> = stab_elems.iter().map(|e| e.1).collect();
        let stab_kappa = kappa.pullback(stab.clone(), &proj)?;

        // X_nr(L/L♯)
        let diagonal = match &spec.xnr_weights {
            None => None,
            Some(w) => {
                if w.len() != nb || w.iter().all(|&x| x == 0) {
                    return Err(inv_err("xnr_weights need one nonzero entry per block"));
                }
                for g in 0..n {
                    for (i, &j) in xg_block_perm[g].iter().enumerate() {
                        if w[i] != w[j] {
                            return Err(inv_err("xnr_weights must be constant on blocks permuted by X^G(s)"));
                        }
                    }
                }
                Some((0..nb).flat_map(|i| std::iter::repeat_n(w[i], spec.blocks[i].e)).collect::<Vec<i64>>())
            }
        };
        if let Some(w) = &diagonal {
            let d = ComponentTorus::new(rank, &[], Some(w.clone()))?;
            for &g in &xl_s {
                if !chi[g].is_zero() && d.in_diagonal(&chi[g]) {
                    return Err(Error::Unsupported(format!(
                        "χ of {} lies in X_nr(L/L♯); only free translations are modelled",
                        xg.label(g)
                    )));
                }
            }
        }

        let xl_omega_sub = Arc::new(xg.subgroup(&xl_omega)?);
        let kappa_omega = kappa.restrict(Arc::new(xl_omega_sub.group.clone()), &xl_omega_sub.embed)?;
        let omega_irreps = twisted_irreps(&kappa_omega)?;

        let class = InertialClass {
            spec,
            rank,
            blocks,
            w_s,
            xg,
            xg_block_perm,
            xg_perm,
            chi,
            xl_s,
            xl_omega,
            vmu,
            kappa,
            phi,
            stab,
            stab_elems,
            stab_maps,
            stab_kappa,
            diagonal,
            omega_irreps,
            xl_omega_sub,
        };
        // twisting must permute Irr C[X^L(ω), κ_ω], and X^L(ω) must act trivially
        for g in 0..n {
            for r in 0..class.omega_irreps.len() {
                let img = class.twist(g, r)?;
                if class.xl_omega.binary_search(&g).is_ok() && img != r {
                    return Err(inv_err(format!(
                        "{} ∈ X^L(ω) moves {}",
                        class.xg.label(g),
                        class.omega_irreps[r].label
                    )));
                }
            }
        }
        Ok(class)
    }

    pub fn omega_irreps(&self) -> &[TwistedIrrep] {
        &self.omega_irreps
    }

    /// Index of `ρ ⊗ e(-φ_γ)`.
    pub fn twist(&self, g: usize, r: usize) -> Result<usize> {
        let rho = &self.omega_irreps[r];
        let moved: Vec<Cyclo> = self
            .xl_omega_sub
            .embed
            .iter()
            .enumerate()
            .map(|(i, &a)| rho.values[i].twist(-self.phi[g][a]))
            .collect();
        self.omega_irreps
            .iter()
            .position(|s| s.values == moved)
            .ok_or_else(|| inv_err(format!("twisting {} by φ_{} is not irreducible", rho.label, self.xg.label(g))))
    }

    fn orbits_under(&self, group: &[usize]) -> Result<Vec<Vec<usize>>> {
        let mut seen = vec![false; self.omega_irreps.len()];
        let mut out = Vec::new();
        for r in 0..self.omega_irreps.len() {
            if seen[r] {
                continue;
            }
            let mut orb = BTreeSet::new();
            for &g in group {
                orb.insert(self.twist(g, r)?);
            }
            for &x in &orb {
                seen[x] = true;
            }
            out.push(orb.into_iter().collect());
        }
        Ok(out)
    }

    fn stabilizer_of(&self, group: &[usize], r: usize) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for &g in group {
            if self.twist(g, r)? == r {
                out.push(g);
            }
        }
        Ok(out)
    }

    /// `X^L(s)`-orbits on `Irr C[X^L(ω), κ_ω]`.
    pub fn levi_components(&self) -> Result<Vec<LeviComponent>> {
        self.orbits_under(&self.xl_s)?
            .into_iter()
            .map(|orb| {
                let stabilizer = self.stabilizer_of(&self.xl_s, orb[0])?;
                for &r in &orb[1..] {
                    if self.stabilizer_of(&self.xl_s, r)? != stabilizer {
                        return Err(inv_err("X^L(s, σ♯) depends on the orbit member"));
                    }
                }
                Ok(LeviComponent {
                    labels: orb.iter().map(|&r| self.omega_irreps[r].label.clone()).collect(),
                    irreps: orb,
                    stabilizer,
                })
            })
            .collect()
    }

    /// `T_s / {χ_γ : γ ∈ stabilizer}`, optionally also modulo `X_nr(L/L♯)`.
    pub fn component_torus(&self, stabilizer: &[usize], sharp: bool) -> Result<ComponentTorus> {
        let gens: Vec<TorusPoint> = stabilizer.iter().map(|&g| self.chi[g].clone()).collect();
        let elems: BTreeSet<TorusPoint> = gens.iter().cloned().collect();
        let elems: Vec<TorusPoint> = elems.into_iter().collect();
        if !ComponentTorus::is_subgroup(&elems) {
            return Err(inv_err("translations χ_γ do not form a subgroup"));
        }
        ComponentTorus::new(self.rank, &gens, if sharp { self.diagonal.clone() } else { None })
    }

    /// The components of the derived group subordinate to `s`, one per
    /// `X^G(s)`-orbit on `Irr C[X^L(ω), κ_ω]`.
    pub fn enumerate_subordinate(&self) -> Result<Vec<SubordinateComponent>> {
        let levi = self.levi_components()?;
        let all: Vec<usize> = (0..self.xg.order()).collect();
        let mut out = Vec::new();
        for orb in self.orbits_under(&all)? {
            let rho0 = orb[0];
            let levi_orbits: Vec<LeviComponent> =
                levi.iter().filter(|l| orb.contains(&l.irreps[0])).cloned().collect();
            let xl_sigma = self.stabilizer_of(&self.xl_s, rho0)?;
            let xg_sigma = self.stabilizer_of(&all, rho0)?;
            let r_t: BTreeSet<Vec<usize>> = xg_sigma.iter().map(|&g| self.xg_block_perm[g].clone()).collect();
            let r_t: Vec<Vec<usize>> = r_t.into_iter().collect();
            let torus_levi = self.component_torus(&xl_sigma, false)?;
            let torus = self.component_torus(&xl_sigma, true)?;
            let (w_t, w_t_maps, lift) = self.w_t_sharp(&xg_sigma)?;
            let cocycle = self.kappa_sigma(rho0, &xl_sigma, &w_t, &lift, r_t.len())?;
            out.push(SubordinateComponent {
                index: out.len(),
                rho0,
                rho0_label: self.omega_irreps[rho0].label.clone(),
                rho0_dim: self.omega_irreps[rho0].dim,
                levi_orbits,
                xl_sigma,
                xg_sigma,
                r_t,
                w_t,
                w_t_maps,
                torus_levi,
                torus,
                cocycle,
            });
        }
        Ok(out)
    }

    /// `W_{t♯} = W_s ⋊ R_{t♯}` as a permutation group, its maps on `T_s`
    /// (a homomorphism modulo `χ(X^L(s, σ♯))`) and the chosen lift
    /// `γ_r ∈ X^G(s, σ♯)` of each element.
    fn w_t_sharp(&self, xg_sigma: &[usize]) -> Result<(Arc<FiniteGroup>, Vec<AffineMap>, Vec<usize>)> {
        let mut gens: Vec<Vec<usize>> = self
            .w_s
            .generators()
            .iter()
            .map(|&g| self.w_s.perms().expect("perm group")[g].clone())
            .collect();
        let extra: BTreeSet<Vec<usize>> = xg_sigma.iter().map(|&g| self.xg_perm[g].clone()).collect();
        gens.extend(extra);
        let w_t = Arc::new(FiniteGroup::from_permutations(self.rank, &gens)?);
        let mut maps = Vec::new();
        let mut lift = Vec::new();
        for p in w_t.perms().expect("perm group") {
            let bp = block_perm_of(&self.blocks, p).ok_or_else(|| inv_err("W_{t♯} does not permute blocks"))?;
            let g = *xg_sigma
                .iter()
                .find(|&&g| self.xg_block_perm[g] == bp)
                .ok_or_else(|| Error::Internal("no lift in X^G(s, σ♯)".into()))?;
            maps.push(AffineMap {
                perm: p.clone(),
                shift: self.chi[g].clone(),
            });
            lift.push(g);
        }
        Ok((w_t, maps, lift))
    }

    /// `κ_{σ♯}` on `W_{t♯}`, through the section `r ↦ γ_r`:
    /// `κ(γ_r, γ_r') + ψ(δ) - κ(γ_{rr'}, δ)` with `δ = γ_r γ_r' γ_{rr'}^{-1}`
    /// and `ψ` a projective extension of `ρ_0` to `X^L(s, σ♯)`.
    fn kappa_sigma(
        &self,
        rho0: usize,
        xl_sigma: &[usize],
        w_t: &Arc<FiniteGroup>,
        lift: &[usize],
        r_order: usize,
    ) -> Result<Cocycle> {
        if r_order == 1 {
            return Ok(Cocycle::trivial(w_t.clone()));
        }
        if self.omega_irreps[rho0].dim > 1 {
            return Err(Error::Unsupported(
                "κ_{σ♯} for a nontrivial R-group over a higher-dimensional ρ_0".into(),
            ));
        }
        let psi = self.extend_character(rho0, xl_sigma)?;
        let g = &self.xg;
        let n = w_t.order();
        let mut values = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let (ga, gb, gab) = (lift[a], lift[b], lift[w_t.mul(a, b)]);
                let delta = g.mul(g.mul(ga, gb), g.inv(gab));
                let psi_d = *psi
                    .get(&delta)
                    .ok_or_else(|| Error::Internal("δ outside X^L(s, σ♯)".into()))?;
                values.push(self.kappa.get(ga, gb) + psi_d - self.kappa.get(gab, delta));
            }
        }
        Cocycle::new(w_t.clone(), values)
    }

    /// A function `ψ` on `X^L(s, σ♯)` with `ψ(ab) = ψ(a) + ψ(b) - κ(a, b)`
    /// restricting to `ρ_0` on `X^L(ω)`.
    fn extend_character(&self, rho0: usize, xl_sigma: &[usize]) -> Result<BTreeMap<usize, RootOfUnity>> {
        let g = &self.xg;
        let rho = &self.omega_irreps[rho0];
        let mut base: BTreeMap<usize, RootOfUnity> = BTreeMap::new();
        for (i, &a) in self.xl_omega_sub.embed.iter().enumerate() {
            base.insert(a, root_log(&rho.values[i]).ok_or_else(|| Error::Internal("ρ_0 value is not a root of unity".into()))?);
        }
        let sub = g.subgroup(xl_sigma)?;
        let gens: Vec<usize> = sub.group.generators().iter().map(|&x| sub.embed[x]).collect();
        let order = (g.exponent() as i64) * (self.kappa.value_order() as i64) * (crate::cyclo::common_order(base.values()) as i64);
        let total = (order as usize).pow(gens.len() as u32);
        if total > 1_000_000 {
            return Err(Error::SizeBound { order: total, bound: 1_000_000 });
        }
        'cand: for idx in 0..total {
            let mut vals = Vec::new();
            let mut i = idx;
            for _ in &gens {
                vals.push(RootOfUnity::from_fraction((i % order as usize) as i64, order));
                i /= order as usize;
            }
            let mut psi: BTreeMap<usize, RootOfUnity> = BTreeMap::new();
            psi.insert(0, RootOfUnity::ONE);
            let mut stack = vec![0usize];
            while let Some(a) = stack.pop() {
                for (s, &x) in gens.iter().enumerate() {
                    let b = g.mul(a, x);
                    let v = psi[&a] + vals[s] - self.kappa.get(a, x);
                    match psi.get(&b) {
                        None => {
                            psi.insert(b, v);
                            stack.push(b);
                        }
                        Some(&w) if w != v => continue 'cand,
                        _ => {}
                    }
                }
            }
            if base.iter().all(|(a, v)| psi.get(a) == Some(v)) {
                return Ok(psi);
            }
        }
        Err(Error::Unsupported(format!(
            "ρ_0 = {} has no projective extension to X^L(s, σ♯)",
            rho.label
        )))
    }

    pub fn r_s_sharp(&self) -> Result<FiniteGroup> {
        Ok(self.xg.quotient(&self.xl_s)?.0)
    }

    /// Elements `(B_γ, γ)` of `Stab(s)^+`.
    pub fn stab_plus(&self) -> Vec<usize> {
        (0..self.stab.order())
            .filter(|&i| self.stab_elems[i].0 == self.xg_perm[self.stab_elems[i].1])
            .collect()
    }

    /// Elements `(σ, 1)` with `σ ∈ W_s`.
    pub fn stab_w_s(&self) -> Vec<usize> {
        (0..self.stab.order()).filter(|&i| self.stab_elems[i].1 == 0).collect()
    }

    /// Elements `(1, γ)` with `γ ∈ X^L(s)`.
    pub fn stab_xl_s(&self) -> Vec<usize> {
        (0..self.stab.order())
            .filter(|&i| self.stab_elems[i].0.iter().enumerate().all(|(a, &b)| a == b))
            .collect()
    }

    pub fn stabilizer_tower(&self) -> Result<StabilizerTower> {
        let mut gens: Vec<Vec<usize>> = self
            .w_s
            .generators()
            .iter()
            .map(|&g| self.w_s.perms().expect("perm group")[g].clone())
            .collect();
        gens.extend(self.xg_perm.iter().cloned());
        let w_sharp = FiniteGroup::from_permutations(self.rank, &gens)?;
        let r = self.r_s_sharp()?;
        let images: BTreeSet<&Vec<usize>> = self.xg_block_perm.iter().collect();
        let plus = self.stab_plus();
        let ws = self.stab_w_s();
        let mut checks = vec![
            ("|W_s♯| = |W_s|·|R_s♯|".to_string(), w_sharp.order() == self.w_s.order() * r.order()),
            ("X^G(s)/X^L(s) ≅ block image of X^G(s)".to_string(), images.len() == r.order()),
            ("Stab(s) = W_s ⋊ Stab(s)^+".to_string(), crate::extquot::check_split(&self.stab, &ws, &plus).is_ok()),
        ];
        let expected: usize = self.spec.blocks.iter().map(|b| (1..=b.e).product::<usize>()).product();
        checks.push(("|W_s| = ∏ e_i!".to_string(), self.w_s.order() == expected));
        Ok(StabilizerTower {
            w_s: self.w_s.order(),
            w_s_sharp: w_sharp.order(),
            r_s_sharp: r.order(),
            stab: self.stab.order(),
            stab_plus: plus.len(),
            checks,
        })
    }

    pub fn sample(&self, den: u32, grid: &[crate::cyclo::Q]) -> Vec<TorusPoint> {
        sample_points(self.rank, den, grid)
    }

    /// `T_s / X_nr(L/L♯)` if a diagonal is declared.
    pub fn d_quotient(&self) -> Result<Option<ComponentTorus>> {
        self.diagonal
            .as_ref()
            .map(|w| ComponentTorus::new(self.rank, &[], Some(w.clone())))
            .transpose()
    }

    /// `T_s` (or `T_s / X_nr(L/L♯)`) as an `X^L(s)`-set with `κ` restricted.
    pub fn xl_s_set(&self, points: &[TorusPoint], sharp: bool) -> Result<GammaSet> {
        self.translation_set(&self.xl_s, points, sharp)
    }

    fn translation_set(&self, elems: &[usize], points: &[TorusPoint], sharp: bool) -> Result<GammaSet> {
        let sub = self.xg.subgroup(elems)?;
        let group = Arc::new(sub.group.clone());
        let maps: Vec<AffineMap> = sub
            .embed
            .iter()
            .map(|&g| AffineMap {
                perm: (0..self.rank).collect(),
                shift: self.chi[g].clone(),
            })
            .collect();
        let q = if sharp { self.d_quotient()? } else { None };
        let c = self.kappa.restrict(group.clone(), &sub.embed)?;
        GammaSet::from_affine_maps(group, &maps, points, q.as_ref())?.with_global_cocycle(&c)
    }

    /// `T_s` as an `X^L(s)/X^L(ω, V_μ)`-set with `κ` descended.
    pub fn xl_s_mod_v_set(&self, points: &[TorusPoint], sharp: bool) -> Result<GammaSet> {
        let sub = self.xg.subgroup(&self.xl_s)?;
        let v_in: Vec<usize> = self.vmu.iter().map(|&v| sub.locate(v).expect("V ⊂ X^L(s)")).collect();
        let (q, _, reps) = sub.group.quotient(&v_in)?;
        let q = Arc::new(q);
        let reps: Vec<usize> = reps.iter().map(|&r| sub.embed[r]).collect();
        let maps: Vec<AffineMap> = reps
            .iter()
            .map(|&g| AffineMap {
                perm: (0..self.rank).collect(),
                shift: self.chi[g].clone(),
            })
            .collect();
        let c = Cocycle::from_fn(q.clone(), |a, b| self.kappa.get(reps[a], reps[b]))?;
        let dq = if sharp { self.d_quotient()? } else { None };
        GammaSet::from_affine_maps(q, &maps, points, dq.as_ref())?.with_global_cocycle(&c)
    }

    /// `T_s / X_nr(L/L♯)` as a `Stab(s)`-set with the global `κ`.
    pub fn stab_set(&self, points: &[TorusPoint]) -> Result<GammaSet> {
        let q = self.d_quotient()?;
        GammaSet::from_affine_maps(self.stab.clone(), &self.stab_maps, points, q.as_ref())?
            .with_global_cocycle(&self.stab_kappa)
    }

    /// `T_s` (or its quotient) as a `W_s`-set, untwisted.
    pub fn w_s_set(&self, points: &[TorusPoint], quotient: Option<&ComponentTorus>) -> Result<GammaSet> {
        let t = StratifiedTorus::permutation(
            &self.spec.blocks.iter().map(|b| b.e).collect::<Vec<_>>(),
            self.w_s.clone(),
        )?;
        GammaSet::from_torus(&t, points, quotient)
    }

    /// `T_{t♯}` as a `W_{t♯}`-set twisted by `κ_{σ♯}`.
    pub fn component_set(&self, c: &SubordinateComponent, points: &[TorusPoint]) -> Result<GammaSet> {
        GammaSet::from_affine_maps(c.w_t.clone(), &c.w_t_maps, points, Some(&c.torus))?.with_global_cocycle(&c.cocycle)
    }

    /// Block permutation induced by a coordinate permutation.
    pub fn block_perm(&self, p: &[usize]) -> Option<Vec<usize>> {
        block_perm_of(&self.blocks, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo::Q;

    fn rt(k: i64, n: i64) -> RootOfUnity {
        RootOfUnity::from_fraction(k, n)
    }

    fn zero(nb: usize) -> Vec<Coord> {
        vec![Coord::ZERO; nb]
    }

    fn spec(blocks: &[(u32, usize)], invariants: &[usize], gens: Vec<XGenerator>) -> InertialSpec {
        InertialSpec {
            blocks: blocks.iter().map(|&(m, e)| BlockSpec { m, e }).collect(),
            d: 1,
            invariants: invariants.to_vec(),
            generators: gens,
            kappa: vec![],
            phi: None,
            vmu: vec![],
            xnr_weights: None,
        }
    }

    fn fixed(nb: usize) -> XGenerator {
        XGenerator {
            block_perm: (0..nb).collect(),
            shift: zero(nb),
        }
    }

    #[test]
    fn weyl_group_orders() {
        let s = InertialClass::build(spec(&[(1, 2), (2, 3)], &[], vec![])).unwrap();
        assert_eq!(s.w_s.order(), 12);
        let t = InertialClass::build(spec(&[(1, 1)], &[], vec![])).unwrap();
        assert_eq!(t.w_s.order(), 1);
        assert_eq!(t.enumerate_subordinate().unwrap().len(), 1);
    }

    #[test]
    fn swap_gives_r_group() {
        let sw = XGenerator {
            block_perm: vec![1, 0],
            shift: zero(2),
        };
        let s = InertialClass::build(spec(&[(1, 2), (1, 2)], &[2], vec![sw.clone()])).unwrap();
        let tower = s.stabilizer_tower().unwrap();
        assert_eq!(tower.r_s_sharp, 2);
        assert_eq!(tower.w_s_sharp, 8);
        assert!(tower.checks.iter().all(|c| c.1));
        let s = InertialClass::build(spec(&[(1, 1), (1, 1)], &[2], vec![sw])).unwrap();
        assert_eq!(s.stabilizer_tower().unwrap().w_s_sharp, 2);
    }

    #[test]
    fn component_counts() {
        let s = InertialClass::build(spec(&[(1, 1)], &[2], vec![fixed(1)])).unwrap();
        assert_eq!(s.enumerate_subordinate().unwrap().len(), 2);
        let mut k = spec(&[(1, 2)], &[2, 2], vec![fixed(1), fixed(1)]);
        k.kappa = vec![vec![rt(0, 1), rt(1, 2)], vec![rt(0, 1), rt(0, 1)]];
        let s = InertialClass::build(k).unwrap();
        let comps = s.enumerate_subordinate().unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].rho0_dim, 2);
    }

    #[test]
    fn halved_torus() {
        let c = XGenerator {
            block_perm: vec![0],
            shift: vec![Coord::unitary(rt(1, 2))],
        };
        let s = InertialClass::build(spec(&[(1, 1)], &[2], vec![c])).unwrap();
        let comps = s.enumerate_subordinate().unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].torus_levi.finite_order(), 2);
        let pts = s.sample(4, &[Q::from_integer(0)]);
        let set = s.xl_s_set(&pts, false).unwrap();
        assert_eq!(set.extended_quotient().unwrap().len(), 2);
    }

    #[test]
    fn rejects_bad_data() {
        let bad = XGenerator {
            block_perm: vec![1, 0],
            shift: zero(2),
        };
        assert!(InertialClass::build(spec(&[(1, 1), (2, 1)], &[2], vec![bad])).is_err());
        let mut k = spec(&[(1, 1)], &[2], vec![fixed(1)]);
        k.kappa = vec![vec![rt(1, 3)]];
        assert!(InertialClass::build(k).is_err());
        // shift of order 4 for a generator of order 2
        let c = XGenerator {
            block_perm: vec![0],
            shift: vec![Coord::unitary(rt(1, 4))],
        };
        assert!(InertialClass::build(spec(&[(1, 1)], &[2], vec![c])).is_err());
    }
}
