//! Normalized 2-cocycles with values in Q/Z, their central extensions,
//! twisted irreducible characters and a cohomology test.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use num_integer::Integer;

use super::characters::character_table;
use super::FiniteGroup;
use crate::cyclo::{common_order, Cyclo, RootOfUnity, Q};
use crate::error::{Error, Result};

/// `♮: Γ × Γ → Q/Z`, stored as a full `|Γ| × |Γ|` table.
#[derive(Clone, Debug)]
pub struct Cocycle {
    group: Arc<FiniteGroup>,
    values: Vec<RootOfUnity>,
}

impl Cocycle {
    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        Cocycle {
            group,
            values: vec![RootOfUnity::ONE; n * n],
        }
    }

    /// Validates normalization and the cocycle identity.
    pub fn new(group: Arc<FiniteGroup>, values: Vec<RootOfUnity>) -> Result<Self> {
        let n = group.order();
        if values.len() != n * n {
            return Err(Error::InvalidCocycle(format!(
                "expected {} values, got {}",
                n * n,
                values.len()
            )));
        }
        let c = Cocycle { group, values };
        c.validate()?;
        Ok(c)
    }

    /// Builds a cocycle from a function of element pairs.
    pub fn from_fn(
        group: Arc<FiniteGroup>,
        f: impl Fn(usize, usize) -> RootOfUnity,
    ) -> Result<Self> {
        let n = group.order();
        let values = (0..n * n).map(|i| f(i / n, i % n)).collect();
        Self::new(group, values)
    }

    fn validate(&self) -> Result<()> {
        let g = &self.group;
        let n = g.order();
        for x in 0..n {
            if !self.get(0, x).is_one() || !self.get(x, 0).is_one() {
                return Err(Error::InvalidCocycle(format!(
                    "not normalized at {}",
                    g.label(x)
                )));
            }
        }
        // the identity for all a, b and c in a generating set implies it
        // for all c (induction on word length)
        for a in 0..n {
            for b in 0..n {
                let ab = g.mul(a, b);
                for &c in g.generators() {
                    let lhs = self.get(a, b) + self.get(ab, c);
                    let rhs = self.get(b, c) + self.get(a, g.mul(b, c));
                    if lhs != rhs {
                        return Err(Error::InvalidCocycle(format!(
                            "cocycle identity fails at ({}, {}, {})",
                            g.label(a),
                            g.label(b),
                            g.label(c)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn get(&self, a: usize, b: usize) -> RootOfUnity {
        self.values[a * self.group.order() + b]
    }

    pub fn values(&self) -> &[RootOfUnity] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|v| v.is_one())
    }

    /// Least `M` with all values in `μ_M`.
    pub fn value_order(&self) -> u32 {
        common_order(&self.values)
    }

    /// Restriction along a subgroup embedding (`embed[i]` is the parent index).
    pub fn restrict(&self, sub: Arc<FiniteGroup>, embed: &[usize]) -> Result<Cocycle> {
        let m = sub.order();
        let values = (0..m * m)
            .map(|i| self.get(embed[i / m], embed[i % m]))
            .collect();
        Cocycle::new(sub, values)
    }

    /// Pull back along a homomorphism `sub → self.group` given elementwise.
    pub fn pullback(&self, sub: Arc<FiniteGroup>, map: &[usize]) -> Result<Cocycle> {
        self.restrict(sub, map)
    }

    pub fn add(&self, o: &Cocycle) -> Cocycle {
        Cocycle {
            group: self.group.clone(),
            values: self.values.iter().zip(&o.values).map(|(a, b)| *a + *b).collect(),
        }
    }

    pub fn neg(&self) -> Cocycle {
        Cocycle {
            group: self.group.clone(),
            values: self.values.iter().map(|a| -*a).collect(),
        }
    }

    /// Coboundary `δc(g,h) = c(g) + c(h) - c(gh)` of a normalized cochain.
    pub fn coboundary(group: Arc<FiniteGroup>, c: &[RootOfUnity]) -> Result<Cocycle> {
        let g = group.clone();
        Self::from_fn(group, |a, b| c[a] + c[b] - c[g.mul(a, b)])
    }
}

/// `E = μ_M × Γ` with `(a,g)(b,h) = (a + b + ♮(g,h), gh)`, element `(a/M, g)`
/// stored at index `g·M + a`.
#[derive(Clone, Debug)]
pub struct CentralExtension {
    pub group: FiniteGroup,
    pub m: u32,
}

impl CentralExtension {
    pub fn new(cocycle: &Cocycle) -> Result<Self> {
        let g = cocycle.group();
        let m = cocycle.value_order() as usize;
        let n = g.order();
        let total = n * m;
        if total > super::MAX_TABULATED_ORDER {
            return Err(Error::SizeBound {
                order: total,
                bound: super::MAX_TABULATED_ORDER,
            });
        }
        let mut labels = Vec::with_capacity(total);
        let mut table = Vec::with_capacity(total);
        for x in 0..n {
            for a in 0..m {
                labels.push(format!("{}^{}/{}", g.label(x), a, m));
                let mut row = Vec::with_capacity(total);
                for y in 0..n {
                    for b in 0..m {
                        let c = cocycle.get(x, y).value() * Q::from_integer(m as i64);
                        let c = *c.numer() as usize;
                        row.push(g.mul(x, y) * m + (a + b + c) % m);
                    }
                }
                table.push(row);
            }
        }
        let mut ext = FiniteGroup::from_table_unchecked(labels, table);
        let mut gens: Vec<usize> = g.generators().iter().map(|&s| s * m).collect();
        if m > 1 {
            gens.push(1);
        }
        ext.set_generators(gens);
        Ok(CentralExtension { group: ext, m: m as u32 })
    }

    pub fn element(&self, g: usize, a: u32) -> usize {
        g * self.m as usize + a as usize
    }
}

/// An irreducible `♮`-projective character, as values `χ(N_g)` per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwistedIrrep {
    pub label: String,
    pub dim: u64,
    pub values: Vec<Cyclo>,
}

/// Irreducible projective characters of `C[Γ, ♮]`: the rows of the central
/// extension's table on which `(1/M, e)` acts by `ζ_M`.
pub fn twisted_irreps(cocycle: &Cocycle) -> Result<Vec<TwistedIrrep>> {
    let g = cocycle.group();
    if cocycle.is_trivial() {
        let t = character_table(g)?;
        return Ok((0..t.len())
            .map(|r| TwistedIrrep {
                label: t.rows[r].label.clone(),
                dim: t.rows[r].degree() as u64,
                values: t.element_values(r),
            })
            .collect());
    }
    let ext = CentralExtension::new(cocycle)?;
    let t = character_table(&ext.group)?;
    let m = ext.m;
    let mut out = Vec::new();
    for r in 0..t.len() {
        let dim = t.rows[r].degree();
        let z = t.value(r, ext.element(0, 1));
        if *z != Cyclo::root(1, m).scale(Q::from_integer(dim)) {
            continue;
        }
        out.push(TwistedIrrep {
            label: format!("P.{}", out.len() + 1),
            dim: dim as u64,
            values: (0..g.order()).map(|x| t.value(r, ext.element(x, 0)).clone()).collect(),
        });
    }
    let total: u64 = out.iter().map(|i| i.dim * i.dim).sum();
    if total != g.order() as u64 {
        return Err(Error::Internal(format!(
            "twisted degrees square-sum to {total}, expected {}",
            g.order()
        )));
    }
    Ok(out)
}

/// Searches for a normalized cochain `c` with `a - b = δc`.
///
/// Values of `c` are searched in `μ_{N·exp Γ}` where `μ_N` holds the values
/// of `a - b`: if `a - b = δc` then `e·c` is a cochain whose coboundary has
/// values in `μ_N`, which bounds the orders of the values of a solution.
pub fn cocycle_cohomologous(a: &Cocycle, b: &Cocycle) -> Result<Option<Vec<RootOfUnity>>> {
    let g = a.group();
    if g.order() != b.group().order() {
        return Err(Error::CocycleMismatch("cocycles on different groups".into()));
    }
    let n = g.order();
    let d: Vec<RootOfUnity> = a.values.iter().zip(&b.values).map(|(x, y)| *x - *y).collect();
    let big_n = common_order(&d) as i64;
    let m = big_n * g.exponent() as i64;
    let gens = g.minimal_generators();
    let k = gens.len();
    // c(g) = Σ coeff_i x_i / m + offset, x_i = m·c(s_i)
    let mut coeff: Vec<Option<(Vec<i64>, RootOfUnity)>> = vec![None; n];
    coeff[0] = Some((vec![0; k], RootOfUnity::ONE));
    let mut queue = VecDeque::from([0usize]);
    while let Some(h) = queue.pop_front() {
        let (ch, oh) = coeff[h].clone().unwrap();
        for (i, &s) in gens.iter().enumerate() {
            let sh = g.mul(s, h);
            if coeff[sh].is_some() {
                continue;
            }
            // c(sh) = c(s) + c(h) - d(s,h)
            let mut c = ch.clone();
            c[i] += 1;
            coeff[sh] = Some((c, oh - d[s * n + h]));
            queue.push_back(sh);
        }
    }
    let coeff: Vec<(Vec<i64>, RootOfUnity)> = coeff.into_iter().map(Option::unwrap).collect();
    // constraints Σ a_i x_i / m ≡ r (mod 1)
    let mut eqs: BTreeSet<(Vec<i64>, RootOfUnity)> = BTreeSet::new();
    for x in 0..n {
        for y in 0..n {
            let xy = g.mul(x, y);
            let lin: Vec<i64> = (0..k)
                .map(|i| (coeff[x].0[i] + coeff[y].0[i] - coeff[xy].0[i]).mod_floor(&m))
                .collect();
            let rhs = d[x * n + y] - coeff[x].1 - coeff[y].1 + coeff[xy].1;
            if lin.iter().all(|&v| v == 0) {
                if !rhs.is_one() {
                    return Ok(None);
                }
                continue;
            }
            eqs.insert((lin, rhs));
        }
    }
    let space = (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if space > 50_000_000 {
        return Err(Error::Unsupported(format!(
            "cohomology search space {space} is too large"
        )));
    }
    let eqs: Vec<(Vec<i64>, RootOfUnity)> = eqs.into_iter().collect();
    let mut x = vec![0i64; k];
    loop {
        let ok = eqs.iter().all(|(lin, rhs)| {
            let s: i64 = lin.iter().zip(&x).map(|(a, b)| a * b).sum();
            RootOfUnity::from_fraction(s, m) == *rhs
        });
        if ok {
            let c = coeff
                .iter()
                .map(|(lin, off)| {
                    let s: i64 = lin.iter().zip(&x).map(|(a, b)| a * b).sum();
                    RootOfUnity::from_fraction(s, m) + *off
                })
                .collect();
            return Ok(Some(c));
        }
        let mut i = 0;
        loop {
            if i == k {
                return Ok(None);
            }
            x[i] += 1;
            if x[i] < m {
                break;
            }
            x[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn klein() -> Arc<FiniteGroup> {
        Arc::new(FiniteGroup::abelian(&[2, 2]))
    }

    /// The bilinear cocycle ½ a_1 b_2 on (Z/2)^2.
    fn klein_cocycle() -> Cocycle {
        let g = klein();
        Cocycle::from_fn(g, |a, b| {
            let x = FiniteGroup::mixed_radix(a, &[2, 2]);
            let y = FiniteGroup::mixed_radix(b, &[2, 2]);
            RootOfUnity::from_fraction((x[0] * y[1]) as i64, 2)
        })
        .unwrap()
    }

    #[test]
    fn klein_twisted_irrep_is_two_dimensional() {
        let irr = twisted_irreps(&klein_cocycle()).unwrap();
        assert_eq!(irr.len(), 1);
        assert_eq!(irr[0].dim, 2);
    }

    #[test]
    fn trivial_cocycle_gives_ordinary_table() {
        let g = Arc::new(FiniteGroup::symmetric(3));
        let irr = twisted_irreps(&Cocycle::trivial(g)).unwrap();
        let mut dims: Vec<u64> = irr.iter().map(|i| i.dim).collect();
        dims.sort_unstable();
        assert_eq!(dims, vec![1, 1, 2]);
    }

    #[test]
    fn rejects_non_cocycle() {
        let g = Arc::new(FiniteGroup::cyclic(3));
        let r = Cocycle::from_fn(g, |a, b| {
            if a == 1 && b == 1 {
                RootOfUnity::from_fraction(1, 2)
            } else {
                RootOfUnity::ONE
            }
        });
        assert!(matches!(r, Err(Error::InvalidCocycle(_))));
    }

    #[test]
    fn coboundary_detected() {
        let g = Arc::new(FiniteGroup::cyclic(2));
        // δc for c(g) = 1/4 has δc(g,g) = 1/2: trivial class needing μ_4
        let c = vec![RootOfUnity::ONE, RootOfUnity::from_fraction(1, 4)];
        let cb = Cocycle::coboundary(g.clone(), &c).unwrap();
        let found = cocycle_cohomologous(&cb, &Cocycle::trivial(g.clone())).unwrap();
        let found = found.expect("coboundary");
        let again = Cocycle::coboundary(g, &found).unwrap();
        assert_eq!(again.values(), cb.values());
        let k = klein_cocycle();
        assert!(cocycle_cohomologous(&k, &Cocycle::trivial(klein())).unwrap().is_none());
    }
}
