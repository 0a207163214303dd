//! Projective representations given by exact matrices on generators.

use std::collections::VecDeque;
use std::sync::Arc;

use num_integer::Integer;

use super::cocycle::Cocycle;
use super::FiniteGroup;
use crate::cyclo::{Cyclo, RootOfUnity, Q};
use crate::error::{Error, Result};

pub type Matrix = Vec<Vec<Cyclo>>;

fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let mut acc = Cyclo::from_int(0);
                    for (k, row) in b.iter().enumerate() {
                        if !a[i][k].is_zero() && !row[j].is_zero() {
                            acc = acc.add(&a[i][k].mul(&row[j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn identity(d: usize) -> Matrix {
    (0..d)
        .map(|i| (0..d).map(|j| Cyclo::from_int(i64::from(i == j))).collect())
        .collect()
}

fn trace(a: &Matrix) -> Cyclo {
    a.iter()
        .enumerate()
        .fold(Cyclo::from_int(0), |acc, (i, r)| acc.add(&r[i]))
}

#[derive(Clone, Debug)]
pub struct ProjectiveRep {
    pub group: Arc<FiniteGroup>,
    pub cocycle: Cocycle,
    pub dim: usize,
    /// Matrices of the group's generators, in `group.generators()` order.
    pub matrices: Vec<Matrix>,
    character: Vec<Cyclo>,
}

impl ProjectiveRep {
    pub fn trivial(group: Arc<FiniteGroup>) -> Self {
        let n = group.order();
        let gens = group.generators().len();
        ProjectiveRep {
            cocycle: Cocycle::trivial(group.clone()),
            group,
            dim: 1,
            matrices: vec![identity(1); gens],
            character: vec![Cyclo::from_int(1); n],
        }
    }

    /// The `♮`-twisted left regular representation on `C[Γ, ♮]`.
    pub fn regular(cocycle: &Cocycle) -> Self {
        let group = cocycle.group().clone();
        let n = group.order();
        let matrices = group
            .generators()
            .iter()
            .map(|&g| {
                let mut m = vec![vec![Cyclo::from_int(0); n]; n];
                for h in 0..n {
                    m[group.mul(g, h)][h] = cocycle.get(g, h).to_cyclo();
                }
                m
            })
            .collect();
        let mut character = vec![Cyclo::from_int(0); n];
        character[0] = Cyclo::from_int(n as i64);
        ProjectiveRep {
            group,
            cocycle: cocycle.clone(),
            dim: n,
            matrices,
            character,
        }
    }

    /// Extends generator matrices multiplicatively and reads off the
    /// cocycle from `μ(g)μ(h) = e(♮(g,h)) μ(gh)`.
    pub fn from_generators(group: Arc<FiniteGroup>, matrices: Vec<Matrix>) -> Result<Self> {
        let gens = group.generators().to_vec();
        if matrices.len() != gens.len() {
            return Err(Error::InvalidProjectiveRep(format!(
                "{} matrices for {} generators",
                matrices.len(),
                gens.len()
            )));
        }
        let dim = matrices.first().map_or(1, |m| m.len());
        if matrices.iter().any(|m| m.len() != dim || m.iter().any(|r| r.len() != dim)) {
            return Err(Error::InvalidProjectiveRep("matrices must be square of one size".into()));
        }
        let n = group.order();
        let mut elem: Vec<Option<Matrix>> = vec![None; n];
        elem[0] = Some(identity(dim));
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            for (i, &s) in gens.iter().enumerate() {
                let hs = group.mul(h, s);
                if elem[hs].is_none() {
                    elem[hs] = Some(mat_mul(elem[h].as_ref().unwrap(), &matrices[i]));
                    queue.push_back(hs);
                }
            }
        }
        let elem: Vec<Matrix> = elem
            .into_iter()
            .map(|m| m.ok_or_else(|| Error::InvalidProjectiveRep("generators do not generate".into())))
            .collect::<Result<_>>()?;
        let conductor = matrices
            .iter()
            .flatten()
            .flatten()
            .fold(1u32, |acc, c| acc.lcm(&c.conductor()));
        let l = 2 * conductor;
        let roots: Vec<Cyclo> = (0..l).map(|k| Cyclo::root(k, l)).collect();
        let mut values = vec![RootOfUnity::ONE; n * n];
        for g in 0..n {
            for h in 0..n {
                let lhs = mat_mul(&elem[g], &elem[h]);
                let rhs = &elem[group.mul(g, h)];
                let (i, j) = (0..dim)
                    .flat_map(|i| (0..dim).map(move |j| (i, j)))
                    .find(|&(i, j)| !rhs[i][j].is_zero())
                    .ok_or_else(|| Error::InvalidProjectiveRep("singular matrix".into()))?;
                let k = (0..l as usize)
                    .find(|&k| rhs[i][j].mul(&roots[k]) == lhs[i][j])
                    .ok_or_else(|| {
                        Error::InvalidProjectiveRep(format!(
                            "μ({})μ({}) is not a root-of-unity multiple of μ({})",
                            group.label(g),
                            group.label(h),
                            group.label(group.mul(g, h))
                        ))
                    })?;
                let scaled: Matrix = rhs
                    .iter()
                    .map(|r| r.iter().map(|c| c.mul(&roots[k])).collect())
                    .collect();
                if scaled != lhs {
                    return Err(Error::InvalidProjectiveRep(format!(
                        "μ({})μ({}) is not a scalar multiple of μ({})",
                        group.label(g),
                        group.label(h),
                        group.label(group.mul(g, h))
                    )));
                }
                values[g * n + h] = RootOfUnity::new(Q::new(k as i64, l as i64));
            }
        }
        let cocycle = Cocycle::new(group.clone(), values)
            .map_err(|e| Error::InvalidProjectiveRep(e.to_string()))?;
        let character = elem.iter().map(trace).collect();
        Ok(ProjectiveRep {
            group,
            cocycle,
            dim,
            matrices,
            character,
        })
    }

    /// As [`Self::from_generators`], and checks the cocycle equals `expected`.
    pub fn with_cocycle(group: Arc<FiniteGroup>, expected: &Cocycle, matrices: Vec<Matrix>) -> Result<Self> {
        let r = Self::from_generators(group, matrices)?;
        if r.cocycle.values() != expected.values() {
            return Err(Error::CocycleMismatch(
                "matrices realise a different cocycle".into(),
            ));
        }
        Ok(r)
    }

    /// Trace of `μ(g)` for every element `g`.
    pub fn character(&self) -> &[Cyclo] {
        &self.character
    }
}
