//! Exact character tables.
//!
//! Generic groups go through a modular Dixon–Schneider computation: common
//! eigenvectors of the class matrices over F_p give the central characters,
//! and eigenvalue multiplicities lift the values to Q(ζ_e). Products of
//! symmetric groups use Murnaghan–Nakayama and keep partition labels.

use num_traits::{Signed, Zero};

use super::modp::{
    common_eigenvectors, find_prime, inv_mod, pow_mod, primitive_root_of_unity, reduce_i64,
};
use super::{ConjugacyClass, FiniteGroup, GroupKind};
use crate::cyclo::{Cyclo, Q};
use crate::error::{Error, Result};
use crate::springer::{cycle_type, mn_character, partition_tuples, Partition};

pub const DEFAULT_MAX_GROUP_ORDER: usize = 5040;
pub const MAX_GROUP_ORDER_ENV: &str = "BQ_MAX_GROUP_ORDER";

/// Character-table size bound, overridable through the environment.
pub fn max_group_order() -> usize {
    std::env::var(MAX_GROUP_ORDER_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_GROUP_ORDER)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassFunction {
    pub label: String,
    /// Values indexed by conjugacy class.
    pub values: Vec<Cyclo>,
}

impl ClassFunction {
    pub fn degree(&self) -> i64 {
        let d = self.values[0].as_rational().expect("degree is rational");
        *d.numer()
    }
}

#[derive(Clone, Debug)]
pub struct CharacterTable {
    pub order: usize,
    pub classes: Vec<ConjugacyClass>,
    pub class_of: Vec<usize>,
    pub rows: Vec<ClassFunction>,
    /// Partition-tuple labels, present for products of symmetric groups.
    pub partition_labels: Option<Vec<Vec<Partition>>>,
}

impl CharacterTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn value(&self, row: usize, elem: usize) -> &Cyclo {
        &self.rows[row].values[self.class_of[elem]]
    }

    /// Row values spread out over all group elements.
    pub fn element_values(&self, row: usize) -> Vec<Cyclo> {
        self.class_of
            .iter()
            .map(|&c| self.rows[row].values[c].clone())
            .collect()
    }

    /// `⟨a, b⟩ = |G|^{-1} Σ_C |C| a(C) conj(b(C))` for class-indexed values.
    pub fn inner_product(&self, a: &[Cyclo], b: &[Cyclo]) -> Result<Q> {
        let mut acc = Cyclo::from_int(0);
        for (c, (x, y)) in self.classes.iter().zip(a.iter().zip(b)) {
            acc = acc.add(&x.mul(&y.conj()).scale(Q::from_integer(c.size() as i64)));
        }
        acc.scale(Q::new(1, self.order as i64))
            .as_rational()
            .ok_or_else(|| Error::Internal("inner product is not rational".into()))
    }

    /// Checks first orthogonality exactly.
    pub fn check_orthogonality(&self) -> Result<()> {
        for i in 0..self.rows.len() {
            for j in i..self.rows.len() {
                let ip = self.inner_product(&self.rows[i].values, &self.rows[j].values)?;
                let want = if i == j { Q::from_integer(1) } else { Q::zero() };
                if ip != want {
                    return Err(Error::Internal(format!(
                        "rows {} and {} have inner product {ip}",
                        self.rows[i].label, self.rows[j].label
                    )));
                }
            }
        }
        Ok(())
    }

    /// Multiplicities of the irreducibles in a class function.
    pub fn decompose(&self, values: &[Cyclo]) -> Result<Vec<u64>> {
        self.rows
            .iter()
            .map(|r| {
                let m = self.inner_product(values, &r.values)?;
                if !m.is_integer() || m.is_negative() {
                    return Err(Error::Internal(format!("non-integral multiplicity {m}")));
                }
                Ok(*m.numer() as u64)
            })
            .collect()
    }
}

fn check_bound(g: &FiniteGroup) -> Result<()> {
    let bound = max_group_order();
    if g.order() > bound {
        return Err(Error::SizeBound {
            order: g.order(),
            bound,
        });
    }
    Ok(())
}

/// Character table honouring the size bound. Products of symmetric groups
/// get partition-labelled rows.
pub fn character_table(g: &FiniteGroup) -> Result<CharacterTable> {
    check_bound(g)?;
    match g.kind() {
        GroupKind::SymmetricProduct(blocks) => symmetric_product_table(g, blocks),
        GroupKind::Generic => dixon_character_table(g),
    }
}

pub fn symmetric_product_table(g: &FiniteGroup, blocks: &[usize]) -> Result<CharacterTable> {
    let perms = g
        .perms()
        .ok_or_else(|| Error::InvalidGroup("symmetric product without permutations".into()))?;
    let classes = g.conjugacy_classes();
    let class_of = g.class_map(&classes);
    let mut start = 0;
    let point_blocks: Vec<Vec<usize>> = blocks
        .iter()
        .map(|&b| {
            let v: Vec<usize> = (start..start + b).collect();
            start += b;
            v
        })
        .collect();
    let types: Vec<Vec<Partition>> = classes
        .iter()
        .map(|c| {
            point_blocks
                .iter()
                .map(|b| cycle_type(&perms[c.representative], b))
                .collect()
        })
        .collect();
    let sizes: Vec<u32> = blocks.iter().map(|&b| b as u32).collect();
    let tuples = partition_tuples(&sizes);
    let rows = tuples
        .iter()
        .map(|t| ClassFunction {
            label: t.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("x"),
            values: types
                .iter()
                .map(|ty| {
                    Cyclo::from_int(t.iter().zip(ty).map(|(l, m)| mn_character(l, m)).product())
                })
                .collect(),
        })
        .collect();
    Ok(CharacterTable {
        order: g.order(),
        classes,
        class_of,
        rows,
        partition_labels: Some(tuples),
    })
}

/// Dixon–Schneider over F_p, lifted exactly to Q(ζ_e), `e` the exponent.
pub fn dixon_character_table(g: &FiniteGroup) -> Result<CharacterTable> {
    let n = g.order();
    let classes = g.conjugacy_classes();
    let class_of = g.class_map(&classes);
    let r = classes.len();
    let e = g.exponent() as u64;
    let p = find_prime(e, 2 * n as u64 + 1);
    // c[j][i][k] = #{(x, y) ∈ C_j × C_i : xy = g_k}
    let mut consts = vec![vec![vec![0u64; r]; r]; r];
    for (k, ck) in classes.iter().enumerate() {
        let gk = ck.representative;
        for x in 0..n {
            let y = g.mul(g.inv(x), gk);
            consts[class_of[x]][class_of[y]][k] += 1;
        }
    }
    let mats: Vec<Vec<Vec<u64>>> = consts
        .into_iter()
        .map(|m| {
            m.into_iter()
                .map(|row| row.into_iter().map(|v| v % p).collect())
                .collect()
        })
        .collect();
    let vecs = common_eigenvectors(&mats, r, p)?;
    if vecs.len() != r {
        return Err(Error::Internal("wrong number of central characters".into()));
    }
    let inv_class: Vec<usize> = classes
        .iter()
        .map(|c| class_of[g.inv(c.representative)])
        .collect();
    let zeta = primitive_root_of_unity(p, e);
    let mut rows = Vec::with_capacity(r);
    for v in vecs {
        let v0 = v[0];
        if v0 == 0 {
            return Err(Error::Internal("central character vanishes at the identity".into()));
        }
        let s = inv_mod(v0, p);
        let omega: Vec<u64> = v.iter().map(|x| x * s % p).collect();
        let mut denom = 0u64;
        for i in 0..r {
            let term = omega[i] * omega[inv_class[i]] % p * inv_mod(classes[i].size() as u64 % p, p) % p;
            denom = (denom + term) % p;
        }
        let d2 = n as u64 % p * inv_mod(denom, p) % p;
        let d = (1..=n as u64)
            .find(|d| d * d == d2)
            .ok_or_else(|| Error::Internal(format!("degree square {d2} is not a square")))?;
        let chi_modp: Vec<u64> = (0..r)
            .map(|i| omega[i] * d % p * inv_mod(classes[i].size() as u64 % p, p) % p)
            .collect();
        let mut values = Vec::with_capacity(r);
        for c in &classes {
            let x = c.representative;
            let o = g.element_order(x) as u64;
            let zo = pow_mod(zeta, e / o, p);
            let mut coeffs = vec![Q::zero(); e as usize];
            let mut total = 0u64;
            for k in 0..o {
                let mut s = 0u64;
                for l in 0..o {
                    let val = chi_modp[class_of[g.pow(x, l as usize)]];
                    let tw = pow_mod(zo, (o - (k * l) % o) % o, p);
                    s = (s + val * tw) % p;
                }
                let m = s * inv_mod(o % p, p) % p;
                if m > d {
                    return Err(Error::Internal(format!("eigenvalue multiplicity {m} exceeds {d}")));
                }
                total += m;
                coeffs[(k * (e / o)) as usize] = Q::from_integer(m as i64);
            }
            if total != d {
                return Err(Error::Internal("multiplicities do not sum to the degree".into()));
            }
            values.push(Cyclo::from_powers(e as u32, &coeffs));
        }
        // sanity: the exact values reduce back to the modular ones
        debug_assert!(values.iter().zip(&chi_modp).all(|(v, m)| {
            v.as_rational()
                .map(|q| reduce_i64(*q.numer(), p) == *m)
                .unwrap_or(true)
        }));
        rows.push(ClassFunction {
            label: String::new(),
            values,
        });
    }
    rows.sort_by_cached_key(|row| {
        let trivial = row.values.iter().all(|v| *v == Cyclo::from_int(1));
        (
            row.degree(),
            !trivial,
            row.values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
        )
    });
    for (i, row) in rows.iter_mut().enumerate() {
        row.label = format!("X.{}", i + 1);
    }
    Ok(CharacterTable {
        order: n,
        classes,
        class_of,
        rows,
        partition_labels: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_table() {
        let t = dixon_character_table(&FiniteGroup::symmetric(3)).unwrap();
        let degrees: Vec<i64> = t.rows.iter().map(|r| r.degree()).collect();
        assert_eq!(degrees, vec![1, 1, 2]);
        t.check_orthogonality().unwrap();
    }

    #[test]
    fn cyclic_table_has_roots() {
        let g = FiniteGroup::cyclic(5);
        let t = dixon_character_table(&g).unwrap();
        assert_eq!(t.len(), 5);
        t.check_orthogonality().unwrap();
        assert!(t.rows.iter().any(|r| r.values[1] == Cyclo::root(1, 5)));
    }

    #[test]
    fn quaternion_and_dihedral() {
        // D4 as permutations of the square, Q8 via a 2x2 complex model encoded as perms
        let d4 = FiniteGroup::from_permutations(4, &[vec![1, 2, 3, 0], vec![3, 2, 1, 0]]).unwrap();
        let t = dixon_character_table(&d4).unwrap();
        let degrees: Vec<i64> = t.rows.iter().map(|r| r.degree()).collect();
        assert_eq!(degrees, vec![1, 1, 1, 1, 2]);
        t.check_orthogonality().unwrap();
        // Q8 regular representation on 8 points
        let i = vec![2, 3, 1, 0, 6, 7, 5, 4];
        let j = vec![4, 5, 7, 6, 1, 0, 2, 3];
        let q8 = FiniteGroup::from_permutations(8, &[i, j]).unwrap();
        if q8.order() == 8 && !q8.is_abelian() {
            let t = dixon_character_table(&q8).unwrap();
            t.check_orthogonality().unwrap();
            assert_eq!(t.len(), 5);
        }
    }

    #[test]
    fn mn_matches_dixon_for_s4() {
        let g = FiniteGroup::symmetric_product(&[4]);
        let mn = character_table(&g).unwrap();
        let dx = dixon_character_table(&g).unwrap();
        mn.check_orthogonality().unwrap();
        let mut a: Vec<Vec<String>> = mn
            .rows
            .iter()
            .map(|r| r.values.iter().map(|v| v.to_string()).collect())
            .collect();
        let mut b: Vec<Vec<String>> = dx
            .rows
            .iter()
            .map(|r| r.values.iter().map(|v| v.to_string()).collect())
            .collect();
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
