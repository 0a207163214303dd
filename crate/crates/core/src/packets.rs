//! Parameter sets `(T_s // W_s)_2` and `(T_{t♯} // W_{t♯})_{κ_{σ♯}}` on finite
//! samples, their Springer classes, the packet relation, and the
//! finite-sample check of the quotient diagram.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::bernstein::{InertialClass, SubordinateComponent};
use crate::error::{Error, Result};
use crate::extquot::{find_complement, iterate_semidirect, GammaSet};
use crate::klparam::{MultiSegment, Segment};
use crate::springer::{restrict_and_identify, Partition, UnipotentClass};
use crate::torus::{AffineMap, ComponentTorus, Coord, TorusPoint};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Side {
    G,
    GSharp { component: usize },
}

type Assignment = Vec<(Vec<usize>, Partition)>;

#[derive(Clone, Debug, Serialize)]
pub struct ParamPoint {
    pub side: Side,
    pub base: TorusPoint,
    pub rho: usize,
    pub rho_label: String,
    pub rho_dim: u64,
    pub isotropy_order: usize,
    /// Coordinate classes of the Weyl part of the isotropy group.
    pub classes: Vec<Vec<usize>>,
    pub springer_class: UnipotentClass,
    pub tempered: bool,
    #[serde(skip)]
    assignments: BTreeSet<Assignment>,
}

impl ParamPoint {
    /// Segments centred at the coordinates of `base`, one string per part.
    pub fn multisegment(&self, blocks: &[Vec<usize>]) -> Result<MultiSegment> {
        let mut out = vec![Vec::new(); blocks.len()];
        for (cls, lam) in self.classes.iter().zip(&self.springer_class.parts) {
            let b = blocks
                .iter()
                .position(|b| b.contains(&cls[0]))
                .ok_or_else(|| Error::Internal("class outside the blocks".into()))?;
            let c = self.base.0[cls[0]];
            for &len in lam.parts() {
                out[b].push(Segment {
                    start: Coord::new(c.angle, c.radial - crate::cyclo::Q::new(len as i64 - 1, 2)),
                    len,
                });
            }
        }
        MultiSegment::new(out)
    }
}

/// Parameters of one side together with the group used for the packet
/// relation, given by its maps on the torus.
#[derive(Clone, Debug)]
pub struct ParamSet {
    pub side: Side,
    pub points: Vec<ParamPoint>,
    maps: Vec<AffineMap>,
    quotient: Option<ComponentTorus>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PacketPartition {
    pub classes: Vec<Vec<usize>>,
    pub equivalence_checked: bool,
}

impl PacketPartition {
    pub fn sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

fn enumerate(
    side: Side,
    set: &GammaSet,
    maps: Vec<AffineMap>,
    quotient: Option<ComponentTorus>,
    blocks: &[Vec<usize>],
) -> Result<ParamSet> {
    let coords = set
        .coords()
        .ok_or_else(|| Error::Internal("parameter set needs torus points".into()))?;
    let group = set.group().clone();
    let perms = group
        .perms()
        .ok_or_else(|| Error::Internal("parameter set needs a permutation group".into()))?;
    let mut points = Vec::new();
    for p in set.extended_quotient()? {
        let sub = set.isotropy(p.point);
        let reflection: Vec<usize> = sub
            .embed
            .iter()
            .copied()
            .filter(|&g| blocks.iter().all(|b| b.iter().all(|&i| b.contains(&perms[g][i]))))
            .collect();
        let rank = coords[p.point].rank();
        let mut seen = vec![false; rank];
        let mut classes = Vec::new();
        for i in 0..rank {
            if seen[i] {
                continue;
            }
            let orb: BTreeSet<usize> = reflection.iter().map(|&g| perms[g][i]).collect();
            for &j in &orb {
                seen[j] = true;
            }
            classes.push(orb.into_iter().collect::<Vec<_>>());
        }
        let irr = set.irreps_at(p.point)?;
        let rho = &irr[p.rho];
        let data = restrict_and_identify(&sub.group, &rho.values, &classes)?;
        let assignments = data
            .orbit
            .iter()
            .map(|t| {
                let mut a: Assignment = classes.iter().cloned().zip(t.iter().cloned()).collect();
                a.sort();
                a
            })
            .collect();
        points.push(ParamPoint {
            side,
            base: coords[p.point].clone(),
            rho: p.rho,
            rho_label: p.rho_label.clone(),
            rho_dim: p.dim,
            isotropy_order: p.isotropy_order,
            tempered: coords[p.point].is_unitary(),
            springer_class: data.class,
            classes,
            assignments,
        });
    }
    Ok(ParamSet {
        side,
        points,
        maps,
        quotient,
    })
}

/// `(T_s // W_s)_2` on the sample, optionally pushed into `T_s / X_nr(L/L♯)`.
pub fn enumerate_params_g(s: &InertialClass, points: &[TorusPoint], sharp: bool) -> Result<ParamSet> {
    let q = if sharp { s.d_quotient()? } else { None };
    let set = s.w_s_set(points, q.as_ref())?;
    let maps = s
        .w_s
        .perms()
        .expect("perm group")
        .iter()
        .map(|p| AffineMap {
            perm: p.clone(),
            shift: TorusPoint::identity(s.rank),
        })
        .collect();
    enumerate(Side::G, &set, maps, q, &s.blocks)
}

/// `(T_{t♯} // W_{t♯})_{κ_{σ♯}}` on the sample.
pub fn enumerate_params_component(
    s: &InertialClass,
    c: &SubordinateComponent,
    points: &[TorusPoint],
) -> Result<ParamSet> {
    let set = s.component_set(c, points)?;
    enumerate(
        Side::GSharp { component: c.index },
        &set,
        c.w_t_maps.clone(),
        Some(c.torus.clone()),
        &s.blocks,
    )
}

impl ParamSet {
    fn canon(&self, t: &TorusPoint) -> TorusPoint {
        match &self.quotient {
            Some(q) => q.canonical(t),
            None => t.clone(),
        }
    }

    /// The same points related through another group acting on the same torus.
    pub fn with_maps(&self, maps: Vec<AffineMap>) -> ParamSet {
        ParamSet {
            maps,
            ..self.clone()
        }
    }

    fn related_by(&self, i: usize, j: usize, m: &AffineMap) -> bool {
        let (p, q) = (&self.points[i], &self.points[j]);
        if self.canon(&m.apply(&q.base)) != p.base {
            return false;
        }
        let mut moved: Assignment = q
            .classes
            .iter()
            .zip(&q.springer_class.parts)
            .map(|(c, l)| {
                let mut img: Vec<usize> = c.iter().map(|&x| m.perm[x]).collect();
                img.sort_unstable();
                (img, l.clone())
            })
            .collect();
        moved.sort();
        p.assignments.contains(&moved)
    }

    /// Whether some group element carries `j` onto `i` together with its
    /// Springer class.
    pub fn same_packet(&self, i: usize, j: usize) -> bool {
        self.maps.iter().any(|m| self.related_by(i, j, m))
    }

    /// The partition induced by `same_packet`, after checking reflexivity,
    /// symmetry and transitivity on the whole sample.
    pub fn packet_partition(&self) -> Result<PacketPartition> {
        let n = self.points.len();
        let rel: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| self.same_packet(i, j)).collect()).collect();
        for i in 0..n {
            if !rel[i][i] {
                return Err(Error::PacketRelation(format!("not reflexive at {}", self.points[i].base)));
            }
            for j in 0..n {
                if rel[i][j] != rel[j][i] {
                    return Err(Error::PacketRelation(format!(
                        "not symmetric at ({}, {})",
                        self.points[i].base, self.points[j].base
                    )));
                }
                if rel[i][j] {
                    for k in 0..n {
                        if rel[j][k] && !rel[i][k] {
                            return Err(Error::PacketRelation(format!(
                                "not transitive at ({}, {}, {})",
                                self.points[i].base, self.points[j].base, self.points[k].base
                            )));
                        }
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut done = vec![false; n];
        for i in 0..n {
            if done[i] {
                continue;
            }
            let c: Vec<usize> = (i..n).filter(|&j| rel[i][j]).collect();
            for &j in &c {
                done[j] = true;
            }
            classes.push(c);
        }
        Ok(PacketPartition {
            classes,
            equivalence_checked: true,
        })
    }
}

/// `W·t` with radial exponents zeroed, as its sorted orbit.
pub fn cuspidal_support_unitary_part(set: &ParamSet, i: usize) -> Result<Vec<TorusPoint>> {
    let p = &set.points[i];
    if !p.tempered {
        return Err(Error::NotTempered(format!("{} has nonzero radial part", p.base)));
    }
    let u = p.base.unitary_part();
    let orbit: BTreeSet<TorusPoint> = set.maps.iter().map(|m| set.canon(&m.apply(&u))).collect();
    Ok(orbit.into_iter().collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RowCheck {
    pub row: String,
    pub lhs: usize,
    pub rhs: usize,
    pub agrees: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiagramReport {
    pub sample_size: usize,
    pub rows: Vec<RowCheck>,
}

impl DiagramReport {
    pub fn agrees(&self) -> bool {
        self.rows.iter().all(|r| r.agrees)
    }

    pub fn failing_rows(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| !r.agrees).map(|r| r.row.as_str()).collect()
    }
}

fn orbit_of(set: &GammaSet) -> Vec<usize> {
    let mut o = vec![0; set.len()];
    for orb in set.orbits() {
        for &x in &orb {
            o[x] = orb[0];
        }
    }
    o
}

fn fiber_counts(set: &GammaSet) -> Result<BTreeMap<usize, usize>> {
    let mut m = BTreeMap::new();
    for orb in set.orbits() {
        m.insert(orb[0], 0);
    }
    let o = orbit_of(set);
    for p in set.extended_quotient()? {
        *m.get_mut(&o[p.point]).expect("orbit") += 1;
    }
    Ok(m)
}

/// Component and packet counts for one scenario on a finite sample. Rows:
/// levi (X^L(s)-quotient vs the Levi component tori), levi-sharp (the same
/// modulo X_nr(L/L♯)), vmu (factoring out X^L(ω, V_μ)), tower-3 and
/// tower-5 (iterated quotients), components (sum over subordinate
/// components against the direct Stab(s)-quotient).
pub fn diagram_check(s: &InertialClass, points: &[TorusPoint]) -> Result<DiagramReport> {
    let mut rows = Vec::new();
    let levi = s.levi_components()?;
    for sharp in [false, true] {
        if sharp && s.diagonal.is_none() {
            continue;
        }
        let set = s.xl_s_set(points, sharp)?;
        let coords = set.coords().expect("torus points").to_vec();
        let fibers = fiber_counts(&set)?;
        let o = orbit_of(&set);
        let mut rhs_by: BTreeMap<usize, usize> = fibers.keys().map(|&k| (k, 0)).collect();
        for l in &levi {
            let t = s.component_torus(&l.stabilizer, sharp)?;
            let mut seen: BTreeSet<(usize, TorusPoint)> = BTreeSet::new();
            for (x, p) in coords.iter().enumerate() {
                seen.insert((o[x], t.canonical(p)));
            }
            for (k, _) in seen {
                *rhs_by.get_mut(&k).expect("orbit") += 1;
            }
        }
        let bad = fibers.iter().filter(|(k, v)| rhs_by[*k] != **v).count();
        let lhs: usize = fibers.values().sum();
        let rhs: usize = rhs_by.values().sum();
        rows.push(RowCheck {
            row: if sharp { "levi-sharp" } else { "levi" }.into(),
            lhs,
            rhs,
            agrees: lhs == rhs && bad == 0,
            detail: format!("{} fibres, {} Levi components, {bad} fibre mismatches", fibers.len(), levi.len()),
        });
    }
    {
        let sharp = s.diagonal.is_some();
        let full = fiber_counts(&s.xl_s_set(points, sharp)?)?;
        let reduced = fiber_counts(&s.xl_s_mod_v_set(points, sharp)?)?;
        let v = s.vmu.len();
        let bad = full.iter().filter(|(k, c)| reduced.get(k).map(|r| r * v) != Some(**c)).count();
        rows.push(RowCheck {
            row: "vmu".into(),
            lhs: full.values().sum(),
            rhs: reduced.values().sum::<usize>() * v,
            agrees: bad == 0 && full.len() == reduced.len(),
            detail: format!("|X^L(ω, V_μ)| = {v}, {bad} fibre mismatches"),
        });
    }
    let stab_set = s.stab_set(points)?;
    let direct = stab_set.extended_quotient()?.len();
    {
        let xl = s.stab_xl_s();
        let row = match find_complement(&s.xg, &s.xl_s) {
            None => RowCheck {
                row: "tower-3".into(),
                lhs: direct,
                rhs: 0,
                agrees: false,
                detail: "X^L(s) has no complement in X^G(s)".into(),
            },
            Some(c) => {
                // W_s ⋊ C
                let h: Vec<usize> = (0..s.stab.order()).filter(|&i| c.contains(&s.stab_elems[i].1)).collect();
                let cert = iterate_semidirect(&stab_set, &xl, &h)?;
                RowCheck {
                    row: "tower-3".into(),
                    lhs: direct,
                    rhs: cert.iterated,
                    agrees: cert.agrees && cert.direct == direct,
                    detail: format!("Γ1 = X^L(s) (order {}), {} fibres", xl.len(), cert.fibers.len()),
                }
            }
        };
        rows.push(row);
    }
    {
        let cert = iterate_semidirect(&stab_set, &s.stab_w_s(), &s.stab_plus())?;
        rows.push(RowCheck {
            row: "tower-5".into(),
            lhs: direct,
            rhs: cert.iterated,
            agrees: cert.agrees && cert.direct == direct,
            detail: format!("Γ1 = W_s, Γ2 = Stab(s)^+, {} fibres", cert.fibers.len()),
        });
    }
    {
        let comps = s.enumerate_subordinate()?;
        let mut total = 0;
        let mut parts = Vec::new();
        for c in &comps {
            let n = s.component_set(c, points)?.extended_quotient()?.len();
            parts.push(n.to_string());
            total += n;
        }
        rows.push(RowCheck {
            row: "components".into(),
            lhs: direct,
            rhs: total,
            agrees: direct == total,
            detail: format!("{} components: {}", comps.len(), parts.join(" + ")),
        });
    }
    let sample_size = stab_set.len();
    Ok(DiagramReport { sample_size, rows })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentPackets {
    pub component: usize,
    pub params: usize,
    pub packet_sizes: Vec<usize>,
    pub stab_orbits_of_g_params: usize,
    pub count_agrees: bool,
}

/// Packet counts per component against the `Stab(s)`-orbits of the
/// `G`-side parameters on `T_s / X_nr(L/L♯)`.
pub fn sharp_packet_counts(s: &InertialClass, points: &[TorusPoint]) -> Result<Vec<ComponentPackets>> {
    let g_side = enumerate_params_g(s, points, true)?;
    let under_stab = g_side.with_maps(s.stab_maps.clone()).packet_partition()?;
    let target = under_stab.classes.len();
    let mut out = Vec::new();
    for c in s.enumerate_subordinate()? {
        let set = enumerate_params_component(s, &c, points)?;
        let part = set.packet_partition()?;
        out.push(ComponentPackets {
            component: c.index,
            params: set.points.len(),
            packet_sizes: part.sizes(),
            stab_orbits_of_g_params: target,
            count_agrees: part.classes.len() == target,
        });
    }
    Ok(out)
}
