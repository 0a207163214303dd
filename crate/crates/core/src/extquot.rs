//! Twisted extended quotients `(X // Γ)_♮` of finite Γ-sets, the
//! crossed-product and invariant-subalgebra spectra they describe, the
//! iterated quotient for a semidirect product, and isotropy strata of
//! torus actions.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::Serialize;

use crate::cyclo::{Cyclo, RootOfUnity, Q};
use crate::error::{Error, Result};
use crate::groups::{twisted_irreps, Cocycle, FiniteGroup, ProjectiveRep, Subgroup, TwistedIrrep};
use crate::torus::{AffineMap, ComponentTorus, StratifiedTorus, TorusPoint};

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    /// Keeps the smaller root so roots are least elements.
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

/// A finite Γ-set with a family of cocycles on the isotropy groups and
/// connecting maps `φ_{γ,x}(N_α) = e(λ(γ,x,α)) N_{γαγ^{-1}}`.
#[derive(Clone, Debug)]
pub struct GammaSet {
    group: Arc<FiniteGroup>,
    labels: Vec<String>,
    coords: Option<Vec<TorusPoint>>,
    action: Vec<usize>,
    isotropy: Vec<Arc<Subgroup>>,
    cocycles: Vec<Cocycle>,
    /// `connectors[g * n + x][i] = λ(g, x, embed_x[i])`; `None` when all vanish.
    connectors: Option<Vec<Vec<RootOfUnity>>>,
    global: Option<Cocycle>,
}

/// An orbit `[x, ρ]` of `X̃_♮`, given by its least representative.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtQuotPoint {
    pub point: usize,
    pub point_label: String,
    pub rho: usize,
    pub rho_label: String,
    pub dim: u64,
    pub orbit_size: usize,
    pub isotropy_order: usize,
}

impl ExtQuotPoint {
    /// Dimension of the induced crossed-product module.
    pub fn induced_dim(&self) -> u64 {
        self.orbit_size as u64 * self.dim
    }
}

impl GammaSet {
    /// A Γ-set with trivial cocycles and connectors. `act(g, x)` must be an action.
    pub fn from_action(
        group: Arc<FiniteGroup>,
        labels: Vec<String>,
        act: impl Fn(usize, usize) -> usize,
    ) -> Result<Self> {
        let n = labels.len();
        let mut action = Vec::with_capacity(group.order() * n);
        for g in 0..group.order() {
            for x in 0..n {
                let y = act(g, x);
                if y >= n {
                    return Err(Error::InvalidGroup(format!("{} maps {} outside the set", group.label(g), labels[x])));
                }
                action.push(y);
            }
        }
        for x in 0..n {
            if action[x] != x {
                return Err(Error::InvalidGroup("identity must act trivially".into()));
            }
        }
        for g in 0..group.order() {
            for &s in group.generators() {
                let gs = group.mul(g, s);
                for x in 0..n {
                    if action[gs * n + x] != action[g * n + action[s * n + x]] {
                        return Err(Error::InvalidGroup(format!(
                            "not an action at ({}, {}, {})",
                            group.label(g),
                            group.label(s),
                            labels[x]
                        )));
                    }
                }
            }
        }
        let mut cache: HashMap<Vec<usize>, Arc<Subgroup>> = HashMap::new();
        let mut isotropy = Vec::with_capacity(n);
        for x in 0..n {
            let elems: Vec<usize> = (0..group.order()).filter(|&g| action[g * n + x] == x).collect();
            let sub = match cache.get(&elems) {
                Some(s) => s.clone(),
                None => {
                    let s = Arc::new(group.subgroup(&elems)?);
                    cache.insert(elems, s.clone());
                    s
                }
            };
            isotropy.push(sub);
        }
        let cocycles = isotropy
            .iter()
            .map(|s| Cocycle::trivial(Arc::new(s.group.clone())))
            .collect();
        Ok(GammaSet {
            group,
            labels,
            coords: None,
            action,
            isotropy,
            cocycles,
            connectors: None,
            global: None,
        })
    }

    /// The sample `points`, pushed into `quotient` (if any), as a Γ-set under
    /// the torus action. Points are sorted so index order is the
    /// lexicographic order.
    pub fn from_torus(
        torus: &StratifiedTorus,
        points: &[TorusPoint],
        quotient: Option<&ComponentTorus>,
    ) -> Result<Self> {
        Self::from_affine_maps(torus.group.clone(), &torus.maps, points, quotient)
    }

    /// Like `from_torus`, but the maps only need to induce an action on the
    /// quotient (a lift that is a homomorphism modulo the quotient group).
    pub fn from_affine_maps(
        group: Arc<FiniteGroup>,
        maps: &[AffineMap],
        points: &[TorusPoint],
        quotient: Option<&ComponentTorus>,
    ) -> Result<Self> {
        if maps.len() != group.order() {
            return Err(Error::InvalidTorusAction("one map per group element expected".into()));
        }
        let canon = |t: &TorusPoint| match quotient {
            Some(q) => q.canonical(t),
            None => t.clone(),
        };
        let mut pts: Vec<TorusPoint> = points.iter().map(canon).collect();
        pts.sort();
        pts.dedup();
        let index: HashMap<TorusPoint, usize> = pts.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        let n = pts.len();
        let mut table = vec![0usize; group.order() * n];
        for g in 0..group.order() {
            for (x, p) in pts.iter().enumerate() {
                let img = canon(&maps[g].apply(p));
                table[g * n + x] = *index.get(&img).ok_or_else(|| {
                    Error::SampleNotStable(format!("{} maps {p} to {img}", group.label(g)))
                })?;
            }
        }
        let labels = pts.iter().map(|p| p.to_string()).collect();
        let mut s = Self::from_action(group, labels, |g, x| table[g * n + x])
            .map_err(|e| Error::InvalidTorusAction(format!("maps do not induce an action: {e}")))?;
        s.coords = Some(pts);
        Ok(s)
    }

    /// Twists by a global cocycle: `♮(x) = ♮|_{Γ_x}` and
    /// `λ(γ,x,α) = ♮(γ,α) - ♮(γαγ^{-1},γ)`, i.e. `φ_{γ,x}` is conjugation by `N_γ`.
    pub fn with_global_cocycle(mut self, cocycle: &Cocycle) -> Result<Self> {
        if cocycle.group().order() != self.group.order() {
            return Err(Error::CocycleMismatch("cocycle lives on another group".into()));
        }
        if cocycle.is_trivial() {
            self.global = Some(cocycle.clone());
            return Ok(self);
        }
        let n = self.labels.len();
        let g = self.group.clone();
        self.cocycles = self
            .isotropy
            .iter()
            .map(|s| cocycle.restrict(Arc::new(s.group.clone()), &s.embed))
            .collect::<Result<_>>()?;
        let mut conn = Vec::with_capacity(g.order() * n);
        for gamma in 0..g.order() {
            for x in 0..n {
                conn.push(
                    self.isotropy[x]
                        .embed
                        .iter()
                        .map(|&a| cocycle.get(gamma, a) - cocycle.get(g.conj(gamma, a), gamma))
                        .collect(),
                );
            }
        }
        self.connectors = Some(conn);
        self.global = Some(cocycle.clone());
        Ok(self)
    }

    /// Installs an explicit family: a cocycle on each `Γ_x` (indexed by
    /// subgroup elements) and connector phases `λ(γ, x, α)` for `α ∈ Γ_x`
    /// (given by parent index). Validates that each `φ_{γ,x}` is an algebra
    /// map (which exhibits `♮(γx)` and `γ_*♮(x)` as cohomologous) and that
    /// `φ_{s,γx} ∘ φ_{γ,x} = φ_{sγ,x}` for generators `s`.
    pub fn with_family(
        mut self,
        cocycles: Vec<Cocycle>,
        lambda: impl Fn(usize, usize, usize) -> RootOfUnity,
    ) -> Result<Self> {
        let n = self.labels.len();
        if cocycles.len() != n {
            return Err(Error::ConnectorInconsistency("one cocycle per point expected".into()));
        }
        for (x, c) in cocycles.iter().enumerate() {
            if c.group().order() != self.isotropy[x].group.order() {
                return Err(Error::ConnectorInconsistency(format!(
                    "cocycle at {} is not on the isotropy group",
                    self.labels[x]
                )));
            }
        }
        let g = self.group.clone();
        let conn: Vec<Vec<RootOfUnity>> = (0..g.order() * n)
            .map(|i| {
                let (gamma, x) = (i / n, i % n);
                self.isotropy[x].embed.iter().map(|&a| lambda(gamma, x, a)).collect()
            })
            .collect();
        self.cocycles = cocycles;
        self.connectors = Some(conn);
        self.validate_family()?;
        Ok(self)
    }

    fn lambda(&self, gamma: usize, x: usize, sub_idx: usize) -> RootOfUnity {
        match &self.connectors {
            None => RootOfUnity::ONE,
            Some(c) => c[gamma * self.labels.len() + x][sub_idx],
        }
    }

    fn validate_family(&self) -> Result<()> {
        let g = &self.group;
        let n = self.labels.len();
        for gamma in 0..g.order() {
            for x in 0..n {
                let y = self.action[gamma * n + x];
                let (sx, sy) = (&self.isotropy[x], &self.isotropy[y]);
                let to_y = |a: usize| sy.locate(g.conj(gamma, sx.embed[a])).expect("conjugate stabilizer");
                for a in 0..sx.embed.len() {
                    for b in 0..sx.embed.len() {
                        let ab = sx.group.mul(a, b);
                        let lhs = self.cocycles[x].get(a, b) + self.lambda(gamma, x, ab);
                        let rhs = self.lambda(gamma, x, a)
                            + self.lambda(gamma, x, b)
                            + self.cocycles[y].get(to_y(a), to_y(b));
                        if lhs != rhs {
                            return Err(Error::ConnectorInconsistency(format!(
                                "φ({}, {}) is not multiplicative at ({}, {})",
                                g.label(gamma),
                                self.labels[x],
                                sx.group.label(a),
                                sx.group.label(b)
                            )));
                        }
                    }
                }
                for &s in g.generators() {
                    let sg = g.mul(s, gamma);
                    for a in 0..sx.embed.len() {
                        let lhs = self.lambda(gamma, x, a) + self.lambda(s, y, to_y(a));
                        if lhs != self.lambda(sg, x, a) {
                            return Err(Error::ConnectorInconsistency(format!(
                                "φ({}, {}) ∘ φ({}, {}) differs from φ({}, {})",
                                g.label(s),
                                self.labels[y],
                                g.label(gamma),
                                self.labels[x],
                                g.label(sg),
                                self.labels[x]
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn coords(&self) -> Option<&[TorusPoint]> {
        self.coords.as_deref()
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.action[g * self.labels.len() + x]
    }

    pub fn global_cocycle(&self) -> Option<&Cocycle> {
        self.global.as_ref()
    }

    pub fn cocycle_at(&self, x: usize) -> &Cocycle {
        &self.cocycles[x]
    }

    pub fn has_trivial_cocycles(&self) -> bool {
        self.cocycles.iter().all(Cocycle::is_trivial)
    }

    /// `Γ_x = {γ : γx = x}` with its embedding.
    pub fn isotropy(&self, x: usize) -> &Subgroup {
        &self.isotropy[x]
    }

    /// Γ-orbits of points, each sorted, listed by least element.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let n = self.labels.len();
        let mut uf = UnionFind::new(n);
        for &s in self.group.generators() {
            for x in 0..n {
                uf.union(x, self.act(s, x));
            }
        }
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for x in 0..n {
            by_root.entry(uf.find(x)).or_default().push(x);
        }
        by_root.into_values().collect()
    }

    /// Relabels points by `perm` (point `x` becomes `perm[x]`).
    pub fn relabel(&self, perm: &[usize]) -> Result<GammaSet> {
        let n = self.labels.len();
        let mut inv = vec![0; n];
        for (x, &y) in perm.iter().enumerate() {
            inv[y] = x;
        }
        let labels = (0..n).map(|y| self.labels[inv[y]].clone()).collect();
        let mut s = GammaSet::from_action(self.group.clone(), labels, |g, y| perm[self.act(g, inv[y])])?;
        if let Some(c) = &self.global {
            s = s.with_global_cocycle(c)?;
        } else if self.connectors.is_some() {
            let cocycles = (0..n).map(|y| self.cocycles[inv[y]].clone()).collect();
            s = s.with_family(cocycles, |g, y, a| {
                let x = inv[y];
                let i = self.isotropy[x].locate(a).expect("same isotropy");
                self.lambda(g, x, i)
            })?;
        }
        Ok(s)
    }

    fn irreps(&self) -> Result<Vec<Arc<Vec<TwistedIrrep>>>> {
        let mut cache: HashMap<(Vec<usize>, Vec<RootOfUnity>), Arc<Vec<TwistedIrrep>>> = HashMap::new();
        let mut out = Vec::with_capacity(self.labels.len());
        for x in 0..self.labels.len() {
            let key = (self.isotropy[x].embed.clone(), self.cocycles[x].values().to_vec());
            let v = match cache.get(&key) {
                Some(v) => v.clone(),
                None => {
                    let v = Arc::new(twisted_irreps(&self.cocycles[x])?);
                    cache.insert(key, v.clone());
                    v
                }
            };
            out.push(v);
        }
        Ok(out)
    }

    /// Character of `ρ ∘ φ_{γ,x}^{-1}` on `Γ_{γx}`:
    /// `α ↦ e(-λ(γ,x,β)) χ_ρ(N_β)` with `β = γ^{-1}αγ`.
    fn transport(&self, gamma: usize, x: usize, chi: &[Cyclo]) -> Vec<Cyclo> {
        let g = &self.group;
        let y = self.act(gamma, x);
        let ginv = g.inv(gamma);
        self.isotropy[y]
            .embed
            .iter()
            .map(|&alpha| {
                let beta = self.isotropy[x].locate(g.conj(ginv, alpha)).expect("conjugate stabilizer");
                chi[beta].twist(-self.lambda(gamma, x, beta))
            })
            .collect()
    }

    /// The orbits of `X̃_♮` under Γ, each given by its least `(x, ρ)`.
    pub fn extended_quotient(&self) -> Result<Vec<ExtQuotPoint>> {
        let irr = self.irreps()?;
        let n = self.labels.len();
        let mut offset = vec![0usize; n + 1];
        for x in 0..n {
            offset[x + 1] = offset[x] + irr[x].len();
        }
        let mut uf = UnionFind::new(offset[n]);
        let locate = |y: usize, vals: &[Cyclo]| irr[y].iter().position(|r| r.values == vals);
        for x in 0..n {
            for (r, rho) in irr[x].iter().enumerate() {
                for &s in self.group.generators() {
                    let y = self.act(s, x);
                    let moved = self.transport(s, x, &rho.values);
                    let r2 = locate(y, &moved).ok_or_else(|| {
                        Error::ConnectorInconsistency(format!(
                            "transport of {} at {} by {} is not irreducible",
                            rho.label,
                            self.labels[x],
                            self.group.label(s)
                        ))
                    })?;
                    uf.union(offset[x] + r, offset[y] + r2);
                }
            }
        }
        let orbit_size: Vec<usize> = {
            let mut sz = vec![0; n];
            for o in self.orbits() {
                for &x in &o {
                    sz[x] = o.len();
                }
            }
            sz
        };
        let mut comp_size: HashMap<usize, usize> = HashMap::new();
        for i in 0..offset[n] {
            *comp_size.entry(uf.find(i)).or_default() += 1;
        }
        let mut out = Vec::new();
        for x in 0..n {
            for (r, rho) in irr[x].iter().enumerate() {
                let i = offset[x] + r;
                if uf.find(i) != i {
                    continue;
                }
                // inner-ness: the stabilizer fixes ρ, so the class meets
                // each point of the orbit exactly once
                if comp_size[&i] != orbit_size[x] {
                    return Err(Error::ConnectorInconsistency(format!(
                        "stabilizer of {} moves {}",
                        self.labels[x], rho.label
                    )));
                }
                out.push(ExtQuotPoint {
                    point: x,
                    point_label: self.labels[x].clone(),
                    rho: r,
                    rho_label: rho.label.clone(),
                    dim: rho.dim,
                    orbit_size: orbit_size[x],
                    isotropy_order: self.isotropy[x].embed.len(),
                });
            }
        }
        Ok(out)
    }

    /// Direct count `Σ_{orbits} |Irr C[Γ_x, ♮(x)]|`.
    pub fn orbit_irrep_count(&self) -> Result<usize> {
        let irr = self.irreps()?;
        Ok(self.orbits().iter().map(|o| irr[o[0]].len()).sum())
    }

    /// Induced dimensions `|Γ x| · dim ρ` of the irreducible modules of the
    /// twisted crossed product `C(X) ⋊ Γ`.
    pub fn crossed_product_spectrum(&self) -> Result<Vec<u64>> {
        Ok(self.extended_quotient()?.iter().map(ExtQuotPoint::induced_dim).collect())
    }

    /// `|X| · |Γ|`, the dimension of the crossed product.
    pub fn algebra_dimension(&self) -> u64 {
        (self.labels.len() * self.group.order()) as u64
    }

    /// The `[x, ρ]` with `Hom_{Γ_x}(ρ, μ|_{Γ_x}) ≠ 0`.
    pub fn invariant_spectrum(&self, mu: &ProjectiveRep) -> Result<Vec<ExtQuotPoint>> {
        Ok(self
            .invariant_multiplicities(mu)?
            .into_iter()
            .filter(|(_, m)| *m > 0)
            .map(|(p, _)| p)
            .collect())
    }

    /// Every `[x, ρ]` with the multiplicity of `ρ` in `μ|_{Γ_x}`.
    pub fn invariant_multiplicities(&self, mu: &ProjectiveRep) -> Result<Vec<(ExtQuotPoint, u64)>> {
        if mu.group.order() != self.group.order() {
            return Err(Error::CocycleMismatch("representation of another group".into()));
        }
        let points = self.extended_quotient()?;
        let irr = self.irreps()?;
        let chi = mu.character();
        let mut out = Vec::new();
        for p in points {
            let sub = &self.isotropy[p.point];
            let m = sub.embed.len();
            for a in 0..m {
                for b in 0..m {
                    if mu.cocycle.get(sub.embed[a], sub.embed[b]) != self.cocycles[p.point].get(a, b) {
                        return Err(Error::CocycleMismatch(format!(
                            "cocycle of μ differs from the cocycle at {}",
                            self.labels[p.point]
                        )));
                    }
                }
            }
            let rho = &irr[p.point][p.rho];
            let mut acc = Cyclo::from_int(0);
            for (a, &g) in sub.embed.iter().enumerate() {
                acc = acc.add(&chi[g].mul(&rho.values[a].conj()));
            }
            let mult = acc
                .scale(Q::new(1, m as i64))
                .as_rational()
                .filter(|q| q.is_integer() && *q.numer() >= 0)
                .ok_or_else(|| Error::Internal("non-integral multiplicity".into()))?;
            out.push((p, *mult.numer() as u64));
        }
        Ok(out)
    }

    /// Irreducibles of `C[Γ_x, ♮(x)]`, indexed as in `ExtQuotPoint::rho`.
    pub fn irreps_at(&self, x: usize) -> Result<Vec<TwistedIrrep>> {
        twisted_irreps(&self.cocycles[x])
    }

    fn restrict_to(&self, sub: &Subgroup) -> Result<GammaSet> {
        let n = self.labels.len();
        let group = Arc::new(sub.group.clone());
        let mut s = GammaSet::from_action(group.clone(), self.labels.clone(), |g, x| self.act(sub.embed[g], x))?;
        s.coords = self.coords.clone();
        if let Some(c) = &self.global {
            let rc = c.restrict(group, &sub.embed)?;
            s = s.with_global_cocycle(&rc)?;
        }
        debug_assert_eq!(s.len(), n);
        Ok(s)
    }
}

/// One Γ2-orbit of `(X // Γ1)_♮` with the two multisets of crossed-product
/// module dimensions that the iterated-quotient bijection matches. On the
/// iterated side a point contributes the product of its two induced dimensions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationFiber {
    pub point: String,
    pub constituent: String,
    pub direct_dims: Vec<u64>,
    pub iterated_dims: Vec<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IterationCertificate {
    pub direct: usize,
    pub iterated: usize,
    pub fibers: Vec<IterationFiber>,
    /// Pairs (index into the direct quotient, index into the iterated one).
    pub matching: Vec<(usize, usize)>,
    pub agrees: bool,
}

/// Whether `n` (a subgroup) and `h` are normal subgroup and complement.
pub fn check_split(g: &FiniteGroup, normal: &[usize], complement: &[usize]) -> Result<()> {
    g.subgroup(normal)?;
    g.subgroup(complement)?;
    if !g.is_normal(normal) {
        return Err(Error::NotNormal("first factor is not normal".into()));
    }
    let mut ns: Vec<usize> = normal.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let mut hs: Vec<usize> = complement.to_vec();
    hs.sort_unstable();
    hs.dedup();
    if ns.iter().filter(|x| hs.binary_search(x).is_ok()).count() != 1 || ns.len() * hs.len() != g.order() {
        return Err(Error::NotNormal("factors do not form a semidirect decomposition".into()));
    }
    Ok(())
}

/// A complement to a normal subgroup, searched among subgroups generated by
/// at most two elements.
pub fn find_complement(g: &FiniteGroup, normal: &[usize]) -> Option<Vec<usize>> {
    let target = g.order() / normal.len().max(1);
    let mut mask = vec![false; g.order()];
    for &x in normal {
        mask[x] = true;
    }
    let try_gens = |gens: &[usize]| -> Option<Vec<usize>> {
        let c = g.closure(gens);
        let elems: Vec<usize> = (0..g.order()).filter(|&i| c[i]).collect();
        (elems.len() == target && elems.iter().filter(|&&x| mask[x]).count() == 1).then_some(elems)
    };
    if target == 1 {
        return Some(vec![0]);
    }
    for a in 1..g.order() {
        if let Some(e) = try_gens(&[a]) {
            return Some(e);
        }
    }
    for a in 1..g.order() {
        for b in a + 1..g.order() {
            if let Some(e) = try_gens(&[a, b]) {
                return Some(e);
            }
        }
    }
    None
}

/// Compares `(X // Γ)_♮` with `((X // Γ1)_♮ // Γ2)_♮` for `Γ = Γ1 ⋊ Γ2`,
/// the second step using the same global cocycle restricted to the
/// stabilizers in `Γ2`.
pub fn iterate_semidirect(x: &GammaSet, normal: &[usize], complement: &[usize]) -> Result<IterationCertificate> {
    let g = x.group().clone();
    check_split(&g, normal, complement)?;
    let global = x
        .global
        .clone()
        .unwrap_or_else(|| Cocycle::trivial(g.clone()));
    let x = if x.global.is_none() {
        if x.connectors.is_some() {
            return Err(Error::Unsupported("iteration needs a global cocycle".into()));
        }
        x.clone().with_global_cocycle(&global)?
    } else {
        x.clone()
    };
    let n1 = g.subgroup(normal)?;
    let n2 = g.subgroup(complement)?;
    let x1 = x.restrict_to(&n1)?;
    let irr1 = x1.irreps()?;
    let step1 = x1.extended_quotient()?;
    // canonical form of any (x, ρ) under Γ1: walk the Γ1-orbit of x
    let canon1 = |pt: usize, vals: &[Cyclo]| -> Result<usize> {
        let mut best: Option<(usize, usize)> = None;
        for h in 0..n1.group.order() {
            let y = x1.act(h, pt);
            let moved = x1.transport(h, pt, vals);
            let r = irr1[y]
                .iter()
                .position(|r| r.values == moved)
                .ok_or_else(|| Error::ConnectorInconsistency("Γ1-transport lost irreducibility".into()))?;
            if best.is_none_or(|b| (y, r) < b) {
                best = Some((y, r));
            }
        }
        let (y, r) = best.expect("identity");
        step1
            .iter()
            .position(|p| p.point == y && p.rho == r)
            .ok_or_else(|| Error::Internal("canonical Γ1 representative missing".into()))
    };
    // Γ2 acts on Y = (X // Γ1)_♮ through the global connectors
    let ny = step1.len();
    let mut table = vec![0usize; n2.group.order() * ny];
    for h in 0..n2.group.order() {
        let gh = n2.embed[h];
        for (i, p) in step1.iter().enumerate() {
            let y = x.act(gh, p.point);
            let vals = &irr1[p.point][p.rho].values;
            // transport along conjugation by N_gh restricted to Γ1_x
            let ginv = g.inv(gh);
            let moved: Vec<Cyclo> = x1.isotropy[y]
                .embed
                .iter()
                .map(|&a1| {
                    let alpha = n1.embed[a1];
                    let beta = g.conj(ginv, alpha);
                    let b1 = x1.isotropy[p.point].locate(n1.locate(beta).expect("normal")).expect("stabilizer");
                    let lam = global.get(gh, beta) - global.get(alpha, gh);
                    vals[b1].twist(-lam)
                })
                .collect();
            table[h * ny + i] = canon1(y, &moved)?;
        }
    }
    let labels: Vec<String> = step1.iter().map(|p| format!("[{}, {}]", p.point_label, p.rho_label)).collect();
    let y_set = GammaSet::from_action(Arc::new(n2.group.clone()), labels, |h, i| table[h * ny + i])?;
    let c2 = global.restrict(Arc::new(n2.group.clone()), &n2.embed)?;
    let y_set = y_set.with_global_cocycle(&c2)?;
    let step2 = y_set.extended_quotient()?;
    let direct = x.extended_quotient()?;
    let irr = x.irreps()?;
    // route every direct point to the Γ2-orbit of a Γ1-constituent
    let y_orbit_of: Vec<usize> = {
        let mut o = vec![0; ny];
        for orb in y_set.orbits() {
            for &i in &orb {
                o[i] = orb[0];
            }
        }
        o
    };
    let mut by_fiber: BTreeMap<usize, (Vec<(u64, usize)>, Vec<(u64, usize)>)> = BTreeMap::new();
    for (k, p) in direct.iter().enumerate() {
        let tau = &irr[p.point][p.rho];
        let sx = &x.isotropy[p.point];
        let s1 = &x1.isotropy[p.point];
        let m1 = s1.embed.len();
        let mut constituent = None;
        for (r, rho) in irr1[p.point].iter().enumerate() {
            let mut acc = Cyclo::from_int(0);
            for (a1, &e1) in s1.embed.iter().enumerate() {
                let parent = n1.embed[e1];
                let ax = sx.locate(parent).expect("Γ1_x ⊂ Γ_x");
                acc = acc.add(&tau.values[ax].mul(&rho.values[a1].conj()));
            }
            if !acc.scale(Q::new(1, m1 as i64)).is_zero() {
                constituent = Some(r);
                break;
            }
        }
        let r = constituent.ok_or_else(|| Error::Internal("restriction to Γ1_x vanishes".into()))?;
        let yi = canon1(p.point, &irr1[p.point][r].values)?;
        by_fiber.entry(y_orbit_of[yi]).or_default().0.push((p.induced_dim(), k));
    }
    for (k, q) in step2.iter().enumerate() {
        let outer = step1[q.point].induced_dim();
        by_fiber.entry(y_orbit_of[q.point]).or_default().1.push((outer * q.induced_dim(), k));
    }
    let mut fibers = Vec::new();
    let mut matching = Vec::new();
    let mut agrees = direct.len() == step2.len();
    for (yi, (mut d, mut it)) in by_fiber {
        d.sort_unstable();
        it.sort_unstable();
        let dd: Vec<u64> = d.iter().map(|p| p.0).collect();
        let id: Vec<u64> = it.iter().map(|p| p.0).collect();
        if dd != id {
            agrees = false;
        } else {
            matching.extend(d.iter().zip(&it).map(|(a, b)| (a.1, b.1)));
        }
        fibers.push(IterationFiber {
            point: step1[yi].point_label.clone(),
            constituent: step1[yi].rho_label.clone(),
            direct_dims: dd,
            iterated_dims: id,
        });
    }
    matching.sort_unstable();
    Ok(IterationCertificate {
        direct: direct.len(),
        iterated: step2.len(),
        fibers,
        matching,
        agrees,
    })
}

/// An isotropy stratum of a torus action: generic points whose stabilizer
/// is conjugate to `isotropy`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub isotropy: Vec<usize>,
    pub isotropy_order: usize,
    pub dimension: usize,
    pub fiber_irreps: usize,
    pub patterns: usize,
}

fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    // restricted growth strings
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    fn rec(i: usize, max: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            out.push(cur.clone());
            return;
        }
        for b in 0..=max + 1 {
            cur[i] = b;
            rec(i + 1, max.max(b), cur, out);
        }
    }
    if n == 0 {
        return vec![vec![]];
    }
    rec(1, 0, &mut cur, &mut out);
    out
}

/// Isotropy strata for the permutation part of the action: each stratum
/// has a parameter dimension (number of isotropy orbits on coordinates) and
/// the number of (twisted) irreducibles of its isotropy group.
pub fn torus_strata(t: &StratifiedTorus, cocycle: Option<&Cocycle>) -> Result<Vec<Stratum>> {
    if t.rank > 10 {
        return Err(Error::Unsupported("strata enumeration limited to rank 10".into()));
    }
    let g = &t.group;
    let mut found: Vec<Stratum> = Vec::new();
    for pattern in set_partitions(t.rank) {
        let iso: Vec<usize> = (0..g.order())
            .filter(|&e| (0..t.rank).all(|i| pattern[t.maps[e].perm[i]] == pattern[i]))
            .collect();
        // orbit partition of the isotropy group must reproduce the pattern
        let mut uf = UnionFind::new(t.rank);
        for &e in &iso {
            for i in 0..t.rank {
                uf.union(i, t.maps[e].perm[i]);
            }
        }
        let closed = (0..t.rank).all(|i| (0..t.rank).all(|j| (pattern[i] == pattern[j]) == (uf.find(i) == uf.find(j))));
        if !closed {
            continue;
        }
        let dimension = pattern.iter().max().map_or(0, |m| m + 1);
        let conj_to = |s: &Stratum| {
            s.isotropy.len() == iso.len()
                && (0..g.order()).any(|h| {
                    let mut c: Vec<usize> = iso.iter().map(|&e| g.conj(h, e)).collect();
                    c.sort_unstable();
                    c == s.isotropy
                })
        };
        if let Some(s) = found.iter_mut().find(|s| s.dimension == dimension && conj_to(s)) {
            s.patterns += 1;
            continue;
        }
        let sub = g.subgroup(&iso)?;
        let c = match cocycle {
            Some(c) => c.restrict(Arc::new(sub.group.clone()), &sub.embed)?,
            None => Cocycle::trivial(Arc::new(sub.group.clone())),
        };
        let fiber_irreps = twisted_irreps(&c)?.len();
        found.push(Stratum {
            isotropy_order: iso.len(),
            isotropy: iso,
            dimension,
            fiber_irreps,
            patterns: 1,
        });
    }
    found.sort_by(|a, b| b.dimension.cmp(&a.dimension).then(a.isotropy.cmp(&b.isotropy)));
    Ok(found)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn natural(n: usize) -> GammaSet {
        let g = Arc::new(FiniteGroup::symmetric(n));
        let perms = g.perms().unwrap().to_vec();
        GammaSet::from_action(g, (0..n).map(|i| format!("p{i}")).collect(), |e, x| perms[e][x]).unwrap()
    }

    fn point(g: FiniteGroup) -> GammaSet {
        GammaSet::from_action(Arc::new(g), vec!["pt".into()], |_, _| 0).unwrap()
    }

    #[test]
    fn isotropy_examples() {
        let g = Arc::new(FiniteGroup::symmetric(3));
        let t = StratifiedTorus::permutation(&[3], g).unwrap();
        let a = crate::torus::Coord::unitary(RootOfUnity::ONE);
        let b = crate::torus::Coord::unitary(RootOfUnity::from_fraction(1, 2));
        let pts = vec![TorusPoint(vec![a, a, b])];
        let all: Vec<TorusPoint> = (0..6).map(|e| t.act(e, &pts[0])).collect();
        let s = GammaSet::from_torus(&t, &all, None).unwrap();
        assert_eq!(s.len(), 3);
        let x = s.coords().unwrap().iter().position(|p| *p == pts[0]).unwrap();
        let iso = s.isotropy(x);
        assert_eq!(iso.embed.len(), 2);
        assert_eq!(t.maps[iso.embed[1]].perm, vec![1, 0, 2]);
    }

    #[test]
    fn extended_quotient_examples() {
        let p = point(FiniteGroup::symmetric(3));
        let q = p.extended_quotient().unwrap();
        let mut dims: Vec<u64> = q.iter().map(|x| x.dim).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![1, 1, 2]);
        let swap = GammaSet::from_action(Arc::new(FiniteGroup::cyclic(2)), vec!["a".into(), "b".into()], |g, x| g ^ x).unwrap();
        assert_eq!(swap.extended_quotient().unwrap().len(), 1);
        assert_eq!(swap.crossed_product_spectrum().unwrap(), vec![2]);
        let triv = GammaSet::from_action(Arc::new(FiniteGroup::trivial()), vec!["a".into(), "b".into()], |_, x| x).unwrap();
        assert_eq!(triv.extended_quotient().unwrap().len(), 2);
    }

    #[test]
    fn natural_s3_crossed_product() {
        let s = natural(3);
        let dims = s.crossed_product_spectrum().unwrap();
        assert_eq!(dims, vec![3, 3]);
        assert_eq!(dims.iter().map(|d| d * d).sum::<u64>(), s.algebra_dimension());
    }

    #[test]
    fn invariant_spectrum_filters() {
        let p = point(FiniteGroup::symmetric(3));
        let reg = ProjectiveRep::regular(&Cocycle::trivial(p.group().clone()));
        assert_eq!(p.invariant_spectrum(&reg).unwrap().len(), 3);
        let triv = ProjectiveRep::trivial(p.group().clone());
        let kept = p.invariant_spectrum(&triv).unwrap();
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].dim, 1);
    }

    #[test]
    fn s3_iteration() {
        let p = point(FiniteGroup::symmetric(3));
        let g = p.group().clone();
        let rot: Vec<usize> = (0..6).filter(|&e| g.element_order(e) != 2).collect();
        let comp = find_complement(&g, &rot).unwrap();
        let cert = iterate_semidirect(&p, &rot, &comp).unwrap();
        assert_eq!((cert.direct, cert.iterated), (3, 3));
        assert!(cert.agrees);
    }

    #[test]
    fn strata_of_s3() {
        let t = StratifiedTorus::permutation(&[3], Arc::new(FiniteGroup::symmetric(3))).unwrap();
        let s = torus_strata(&t, None).unwrap();
        let v: Vec<(usize, usize)> = s.iter().map(|x| (x.dimension, x.fiber_irreps)).collect();
        assert_eq!(v, vec![(3, 1), (2, 2), (1, 3)]);
        let t2 = StratifiedTorus::permutation(&[2], Arc::new(FiniteGroup::symmetric(2))).unwrap();
        let v: Vec<(usize, usize)> = torus_strata(&t2, None).unwrap().iter().map(|x| (x.dimension, x.fiber_irreps)).collect();
        assert_eq!(v, vec![(2, 1), (1, 2)]);
    }

    #[test]
    fn inconsistent_connectors_rejected() {
        let s = point(FiniteGroup::cyclic(2));
        let c = Cocycle::trivial(Arc::new(s.isotropy(0).group.clone()));
        let r = s.with_family(vec![c], |g, _, a| {
            if g == 1 && a == 1 {
                RootOfUnity::from_fraction(1, 3)
            } else {
                RootOfUnity::ONE
            }
        });
        assert!(matches!(r, Err(Error::ConnectorInconsistency(_))));
    }
}
