//! Brute-force oracles for differential testing. Nothing here calls the
//! character-table, cocycle or extended-quotient code: the oracles work
//! from raw multiplication tables and actions, over their own prime field.

use std::collections::HashMap;

use serde::Serialize;

use crate::cyclo::RootOfUnity;
use crate::error::{Error, Result};
use crate::groups::FiniteGroup;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult<T> {
    pub label: String,
    pub value: T,
    pub method: String,
}

pub const CROSSED_BOUND: usize = 2000;

/// A finite group given only by its table (identity at index 0).
struct Table {
    n: usize,
    mul: Vec<usize>,
}

impl Table {
    fn of(g: &FiniteGroup) -> Table {
        let n = g.order();
        let mut mul = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                mul.push(g.mul(a, b));
            }
        }
        Table { n, mul }
    }

    fn m(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.n + b]
    }

    fn inv(&self, a: usize) -> usize {
        (0..self.n).find(|&b| self.m(a, b) == 0).expect("inverse")
    }

    fn exponent(&self) -> u64 {
        let mut e = 1u64;
        for a in 0..self.n {
            let mut k = 1u64;
            let mut x = a;
            while x != 0 {
                x = self.m(x, a);
                k += 1;
            }
            e = lcm(e, k);
        }
        e
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn powm(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e % 2 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e /= 2;
    }
    r
}

fn invm(a: u64, p: u64) -> u64 {
    powm(a, p - 2, p)
}

fn prime_above(modulus: u64, lower: u64) -> u64 {
    let mut p = modulus * (lower / modulus + 1) + 1;
    loop {
        if (2..).take_while(|d| d * d <= p).all(|d| p % d != 0) {
            return p;
        }
        p += modulus;
    }
}

/// Element of multiplicative order exactly `m` in F_p^×.
fn root_of_order(m: u64, p: u64) -> u64 {
    for g in 2..p {
        let z = powm(g, (p - 1) / m, p);
        if (1..m).all(|k| m % k != 0 || powm(z, k, p) != 1) {
            return z;
        }
    }
    unreachable!("p ≡ 1 mod m")
}

/// Gaussian elimination; returns the inverse of a square matrix.
fn invert(mut a: Vec<Vec<u64>>, p: u64) -> Option<Vec<Vec<u64>>> {
    let n = a.len();
    let mut inv: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect();
    for c in 0..n {
        let r = (c..n).find(|&r| a[r][c] != 0)?;
        a.swap(r, c);
        inv.swap(r, c);
        let s = invm(a[c][c], p);
        for j in 0..n {
            a[c][j] = a[c][j] * s % p;
            inv[c][j] = inv[c][j] * s % p;
        }
        for r in 0..n {
            if r != c && a[r][c] != 0 {
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] = (a[r][j] + p - f * a[c][j] % p) % p;
                    inv[r][j] = (inv[r][j] + p - f * inv[c][j] % p) % p;
                }
            }
        }
    }
    Some(inv)
}

/// Kernel of a square matrix, as column vectors.
fn kernel(mut a: Vec<Vec<u64>>, p: u64) -> Vec<Vec<u64>> {
    let n = a.len();
    let mut piv: Vec<Option<usize>> = vec![None; n];
    let mut row = 0;
    for c in 0..n {
        let Some(r) = (row..n).find(|&r| a[r][c] != 0) else { continue };
        a.swap(r, row);
        let s = invm(a[row][c], p);
        for j in 0..n {
            a[row][j] = a[row][j] * s % p;
        }
        for r in 0..n {
            if r != row && a[r][c] != 0 {
                let f = a[r][c];
                for j in 0..n {
                    a[r][j] = (a[r][j] + p - f * a[row][j] % p) % p;
                }
            }
        }
        piv[c] = Some(row);
        row += 1;
    }
    (0..n)
        .filter(|&c| piv[c].is_none())
        .map(|f| {
            let mut v = vec![0u64; n];
            v[f] = 1;
            for c in 0..n {
                if let Some(r) = piv[c] {
                    v[c] = (p - a[r][f]) % p;
                }
            }
            v
        })
        .collect()
}

/// Characteristic polynomial (low degree first) through a Hessenberg form.
fn charpoly(mut h: Vec<Vec<u64>>, p: u64) -> Vec<u64> {
    let n = h.len();
    for m in 1..n.saturating_sub(1) {
        let Some(i) = (m..n).find(|&i| h[i][m - 1] != 0) else { continue };
        if i != m {
            h.swap(i, m);
            for row in h.iter_mut() {
                row.swap(i, m);
            }
        }
        let s = invm(h[m][m - 1], p);
        for r in m + 1..n {
            let u = h[r][m - 1] * s % p;
            if u == 0 {
                continue;
            }
            for c in 0..n {
                h[r][c] = (h[r][c] + p - u * h[m][c] % p) % p;
            }
            for row in h.iter_mut() {
                row[m] = (row[m] + u * row[r]) % p;
            }
        }
    }
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 1..=n {
        let k = m - 1;
        let prev = &polys[m - 1];
        let mut cur = vec![0u64; m + 1];
        for (d, &c) in prev.iter().enumerate() {
            cur[d + 1] = (cur[d + 1] + c) % p;
            cur[d] = (cur[d] + p - c * h[k][k] % p) % p;
        }
        let mut t = 1u64;
        for i in (1..m).rev() {
            t = t * h[i][i - 1] % p;
            let f = t * h[i - 1][k] % p;
            for (d, &c) in polys[i - 1].iter().enumerate() {
                cur[d] = (cur[d] + p - f * c % p) % p;
            }
        }
        polys.push(cur);
    }
    polys.pop().unwrap()
}

/// Simultaneous eigenvectors of commuting diagonalisable matrices: each
/// matrix in turn splits every current eigenspace.
fn split_all(mats: &[Vec<Vec<u64>>], dim: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    let mut spaces: Vec<Vec<Vec<u64>>> = vec![(0..dim).map(|i| (0..dim).map(|j| u64::from(i == j)).collect()).collect()];
    for m in mats {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for sp in spaces {
            let k = sp.len();
            if k == 1 {
                next.push(sp);
                continue;
            }
            // reduced echelon basis: coordinates are read at the pivots
            let mut basis = sp;
            let mut pivots = Vec::new();
            let mut row = 0;
            for c in 0..dim {
                let Some(r) = (row..k).find(|&r| basis[r][c] != 0) else { continue };
                basis.swap(r, row);
                let s = invm(basis[row][c], p);
                for x in basis[row].iter_mut() {
                    *x = *x * s % p;
                }
                for r in 0..k {
                    if r != row && basis[r][c] != 0 {
                        let f = basis[r][c];
                        for j in 0..dim {
                            basis[r][j] = (basis[r][j] + p - f * basis[row][j] % p) % p;
                        }
                    }
                }
                pivots.push(c);
                row += 1;
                if row == k {
                    break;
                }
            }
            let images: Vec<Vec<u64>> = basis
                .iter()
                .map(|b| (0..dim).map(|i| (0..dim).fold(0, |acc, j| (acc + m[i][j] * b[j]) % p)).collect())
                .collect();
            let restricted: Vec<Vec<u64>> = (0..k).map(|i| (0..k).map(|j| images[j][pivots[i]]).collect()).collect();
            let poly = charpoly(restricted.clone(), p);
            let mut got = 0;
            for lam in 0..p {
                if poly.iter().rev().fold(0, |acc, &c| (acc * lam + c) % p) != 0 {
                    continue;
                }
                let shifted: Vec<Vec<u64>> = (0..k)
                    .map(|i| (0..k).map(|j| (restricted[i][j] + if i == j { p - lam } else { 0 }) % p).collect())
                    .collect();
                let ker: Vec<Vec<u64>> = kernel(shifted, p)
                    .into_iter()
                    .map(|c| (0..dim).map(|t| (0..k).fold(0, |acc, j| (acc + c[j] * basis[j][t]) % p)).collect())
                    .collect();
                got += ker.len();
                next.push(ker);
            }
            if got != k {
                return Err(Error::Internal("oracle: class algebra not split over F_p".into()));
            }
        }
        spaces = next;
    }
    spaces
        .into_iter()
        .map(|s| {
            if s.len() == 1 {
                Ok(s.into_iter().next().unwrap())
            } else {
                Err(Error::Internal("oracle: eigenspace did not split".into()))
            }
        })
        .collect()
}

/// Central data of the action groupoid `X ⋊ Γ`: per block, its dimension
/// and its central character on class sums of loops.
struct GroupoidCentre {
    p: u64,
    classes: Vec<Vec<(usize, usize)>>,
    blocks: Vec<(u64, Vec<u64>)>,
}

fn groupoid_centre(t: &Table, npts: usize, act: &dyn Fn(usize, usize) -> usize, modulus: u64) -> Result<GroupoidCentre> {
    let n = t.n;
    // loops (γ, x) with γx = x, grouped into conjugation classes
    let mut class_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut classes: Vec<Vec<(usize, usize)>> = Vec::new();
    for x in 0..npts {
        for g in 0..n {
            if act(g, x) != x || class_of.contains_key(&(g, x)) {
                continue;
            }
            let c = classes.len();
            let mut members = Vec::new();
            for h in 0..n {
                let l = (t.m(t.m(h, g), t.inv(h)), act(h, x));
                if let std::collections::hash_map::Entry::Vacant(e) = class_of.entry(l) {
                    e.insert(c);
                    members.push(l);
                }
            }
            members.sort_unstable();
            classes.push(members);
        }
    }
    let r = classes.len();
    let p = prime_above(lcm(t.exponent(), modulus), 4 * (npts * n) as u64 + 1);
    // n_{abc} = #{(α, β) : (α, x_c) ∈ a, (β, x_c) ∈ b, αβ = γ_c}
    let mut consts = vec![vec![vec![0u64; r]; r]; r];
    for (c, members) in classes.iter().enumerate() {
        let (gc, xc) = members[0];
        for alpha in 0..n {
            if act(alpha, xc) != xc {
                continue;
            }
            let beta = t.m(t.inv(alpha), gc);
            let a = class_of[&(alpha, xc)];
            let b = class_of[&(beta, xc)];
            consts[a][b][c] += 1;
        }
    }
    let mats: Vec<Vec<Vec<u64>>> = consts
        .iter()
        .map(|m| m.iter().map(|row| row.iter().map(|v| v % p).collect()).collect())
        .collect();
    let vecs = split_all(&mats, r, p)?;
    let ident: Vec<usize> = (0..r).filter(|&c| classes[c][0].0 == 0).collect();
    let mut omegas = Vec::new();
    for v in vecs {
        let s: u64 = ident.iter().fold(0, |acc, &c| (acc + v[c]) % p);
        if s == 0 {
            return Err(Error::Internal("oracle: central character kills the unit".into()));
        }
        let si = invm(s, p);
        omegas.push(v.iter().map(|x| x * si % p).collect::<Vec<u64>>());
    }
    let e = invert(omegas.clone(), p).ok_or_else(|| Error::Internal("oracle: singular character matrix".into()))?;
    let mut blocks = Vec::new();
    for (i, w) in omegas.into_iter().enumerate() {
        let d2 = ident
            .iter()
            .fold(0u64, |acc, &c| (acc + e[c][i] * (classes[c].len() as u64 % p)) % p)
            * (n as u64 % p)
            % p;
        let d = (1..=(npts * n) as u64)
            .find(|d| d * d % p == d2)
            .ok_or_else(|| Error::Internal(format!("oracle: {d2} is not a square degree")))?;
        blocks.push((d, w));
    }
    Ok(GroupoidCentre { p, classes, blocks })
}

fn raw_orbits(n: usize, npts: usize, act: &dyn Fn(usize, usize) -> usize) -> Vec<Vec<usize>> {
    let mut seen = vec![false; npts];
    let mut out = Vec::new();
    for x in 0..npts {
        if seen[x] {
            continue;
        }
        let mut orbit: Vec<usize> = (0..n).map(|g| act(g, x)).collect();
        orbit.sort_unstable();
        orbit.dedup();
        for &y in &orbit {
            seen[y] = true;
        }
        out.push(orbit);
    }
    out
}

/// Own central extension `μ_M × Γ` from a cocycle given as a raw function.
fn extension(t: &Table, m: usize, c: &dyn Fn(usize, usize) -> RootOfUnity) -> Table {
    let n = t.n * m;
    let mut mul = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let (g, a) = (x / m, x % m);
            let (h, b) = (y / m, y % m);
            let v = c(g, h).value() * num_rational::Ratio::from_integer(m as i64);
            let k = *v.numer() as usize;
            mul.push(t.m(g, h) * m + (a + b + k) % m);
        }
    }
    Table { n, mul }
}

fn cocycle_order(n: usize, c: &dyn Fn(usize, usize) -> RootOfUnity) -> usize {
    let mut m = 1u64;
    for a in 0..n {
        for b in 0..n {
            m = lcm(m, *c(a, b).value().denom() as u64);
        }
    }
    m as usize
}

/// Dimensions of the irreducible modules of the (twisted) crossed product
/// `C(X) ⋊_♮ Γ`, from the centre of the action-groupoid algebra. With a
/// cocycle, the groupoid of the central extension is used and only blocks
/// where the central element acts by `e(1/M)` are kept.
pub fn oracle_crossed_spectrum(
    g: &FiniteGroup,
    npts: usize,
    act: &dyn Fn(usize, usize) -> usize,
    cocycle: Option<&dyn Fn(usize, usize) -> RootOfUnity>,
) -> Result<OracleResult<Vec<u64>>> {
    if npts * g.order() > CROSSED_BOUND {
        return Err(Error::SizeBound {
            order: npts * g.order(),
            bound: CROSSED_BOUND,
        });
    }
    let base = Table::of(g);
    let m = cocycle.map_or(1, |c| cocycle_order(g.order(), c));
    let ext = (m > 1).then(|| extension(&base, m, cocycle.unwrap()));
    // the groupoid is a disjoint union over orbits, and so is its algebra
    let mut dims = Vec::new();
    for orbit in raw_orbits(g.order(), npts, act) {
        let pos: HashMap<usize, usize> = orbit.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let local = |h: usize, i: usize| pos[&act(h, orbit[i])];
        match &ext {
            None => {
                let centre = groupoid_centre(&base, orbit.len(), &local, 1)?;
                dims.extend(centre.blocks.iter().map(|b| b.0));
            }
            Some(ext) => {
                let lifted = |e: usize, i: usize| local(e / m, i);
                let centre = groupoid_centre(ext, orbit.len(), &lifted, m as u64)?;
                let zeta = root_of_order(m as u64, centre.p);
                // class sums of loops (z, x): their sum is the central element Z
                let zc: Vec<usize> = (0..centre.classes.len())
                    .filter(|&c| centre.classes[c][0].0 == 1)
                    .collect();
                dims.extend(
                    centre
                        .blocks
                        .iter()
                        .filter(|(_, w)| zc.iter().fold(0, |acc, &c| (acc + w[c]) % centre.p) == zeta)
                        .map(|b| b.0),
                );
            }
        }
    }
    dims.sort_unstable();
    Ok(OracleResult {
        label: format!("crossed product of {npts} points by a group of order {}", g.order()),
        value: dims,
        method: "central idempotents of the action-groupoid algebra over F_p".into(),
    })
}

/// Degrees of the irreducible `♮`-projective representations.
pub fn oracle_twisted_dims(
    g: &FiniteGroup,
    cocycle: &dyn Fn(usize, usize) -> RootOfUnity,
) -> Result<OracleResult<Vec<u64>>> {
    if g.order() > 256 {
        return Err(Error::SizeBound { order: g.order(), bound: 256 });
    }
    let r = oracle_crossed_spectrum(g, 1, &|_, _| 0, Some(cocycle))?;
    Ok(OracleResult {
        label: format!("twisted group algebra of order {}", g.order()),
        value: r.value,
        method: "central extension, class-sum eigenvectors over F_p".into(),
    })
}

/// Irreducible characters of `G` reduced mod `p`, per element, with degrees.
pub fn oracle_character_values(g: &FiniteGroup) -> Result<(u64, Vec<(u64, Vec<u64>)>)> {
    let t = Table::of(g);
    let centre = groupoid_centre(&t, 1, &|_, _| 0, 1)?;
    let p = centre.p;
    let mut class_of = vec![0usize; t.n];
    for (c, members) in centre.classes.iter().enumerate() {
        for &(e, _) in members {
            class_of[e] = c;
        }
    }
    let rows = centre
        .blocks
        .iter()
        .map(|(d, w)| {
            let vals = (0..t.n)
                .map(|e| {
                    let c = class_of[e];
                    w[c] * (d % p) % p * invm(centre.classes[c].len() as u64 % p, p) % p
                })
                .collect();
            (*d, vals)
        })
        .collect();
    Ok((p, rows))
}

/// Exhaustive search for a normalized cochain `c: Γ → μ_K` with
/// `a - b = δc`.
pub fn oracle_cohomologous(
    g: &FiniteGroup,
    a: &dyn Fn(usize, usize) -> RootOfUnity,
    b: &dyn Fn(usize, usize) -> RootOfUnity,
    k: u64,
) -> Result<Option<Vec<RootOfUnity>>> {
    let t = Table::of(g);
    let n = t.n;
    let space = (k as f64).powi(n as i32 - 1);
    if space > 5e6 {
        return Err(Error::SizeBound { order: n, bound: 0 });
    }
    let mut c = vec![0u64; n];
    loop {
        let ok = (0..n).all(|x| {
            (0..n).all(|y| {
                let d = RootOfUnity::from_fraction((c[x] + c[y]) as i64 - c[t.m(x, y)] as i64, k as i64);
                a(x, y) - b(x, y) == d
            })
        });
        if ok {
            return Ok(Some(c.iter().map(|&v| RootOfUnity::from_fraction(v as i64, k as i64)).collect()));
        }
        let mut i = 1;
        loop {
            if i == n {
                return Ok(None);
            }
            c[i] += 1;
            if c[i] < k {
                break;
            }
            c[i] = 0;
            i += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_by_s3() {
        let g = FiniteGroup::symmetric(3);
        let r = oracle_crossed_spectrum(&g, 1, &|_, _| 0, None).unwrap();
        assert_eq!(r.value, vec![1, 1, 2]);
    }

    #[test]
    fn natural_s3() {
        let g = FiniteGroup::symmetric(3);
        let perms = g.perms().unwrap().to_vec();
        let r = oracle_crossed_spectrum(&g, 3, &|e, x| perms[e][x], None).unwrap();
        assert_eq!(r.value, vec![3, 3]);
    }

    #[test]
    fn free_swap() {
        let g = FiniteGroup::cyclic(2);
        let r = oracle_crossed_spectrum(&g, 2, &|e, x| e ^ x, None).unwrap();
        assert_eq!(r.value, vec![2]);
    }

    #[test]
    fn klein_twisted() {
        let g = FiniteGroup::abelian(&[2, 2]);
        let c = |a: usize, b: usize| {
            let x = FiniteGroup::mixed_radix(a, &[2, 2]);
            let y = FiniteGroup::mixed_radix(b, &[2, 2]);
            RootOfUnity::from_fraction((x[0] * y[1]) as i64, 2)
        };
        assert_eq!(oracle_twisted_dims(&g, &c).unwrap().value, vec![2]);
        let triv = |_: usize, _: usize| RootOfUnity::ONE;
        assert!(oracle_cohomologous(&g, &c, &triv, 2).unwrap().is_none());
        assert_eq!(oracle_twisted_dims(&g, &triv).unwrap().value, vec![1, 1, 1, 1]);
    }

    #[test]
    fn z4_any_cocycle_is_untwisted() {
        let g = FiniteGroup::cyclic(4);
        // a coboundary-valued cocycle: δc with c(k) = k/8
        let c = |a: usize, b: usize| RootOfUnity::from_fraction(a as i64 + b as i64 - ((a + b) % 4) as i64, 8);
        assert_eq!(oracle_twisted_dims(&g, &c).unwrap().value, vec![1, 1, 1, 1]);
    }
}
