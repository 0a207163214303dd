//! Arithmetic and linear algebra over a prime field F_p.

use crate::error::{Error, Result};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Least prime `p > lower` with `p ≡ 1 (mod m)`.
pub fn find_prime(m: u64, lower: u64) -> u64 {
    let m = m.max(1);
    let mut p = (lower / m + 1) * m + 1;
    while !is_prime(p) {
        p += m;
    }
    p
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// A primitive `m`-th root of unity mod `p`; requires `m | p - 1`.
pub fn primitive_root_of_unity(p: u64, m: u64) -> u64 {
    assert_eq!((p - 1) % m, 0);
    let fs = prime_factors(p - 1);
    let g = (2..p)
        .find(|&g| fs.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("prime field has a generator");
    pow_mod(g, (p - 1) / m, p)
}

/// Integer in `(-p/2, p/2]` congruent to `a`.
pub fn symmetric_lift(a: u64, p: u64) -> i64 {
    if a > p / 2 {
        a as i64 - p as i64
    } else {
        a as i64
    }
}

pub fn reduce_i64(a: i64, p: u64) -> u64 {
    a.rem_euclid(p as i64) as u64
}

/// Basis of the right kernel `{v : A v = 0}` of a `rows × cols` matrix.
pub fn nullspace(a: &[Vec<u64>], cols: usize, p: u64) -> Vec<Vec<u64>> {
    let mut m: Vec<Vec<u64>> = a.to_vec();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(r) = (row..m.len()).find(|&r| m[r][col] != 0) else {
            continue;
        };
        m.swap(row, r);
        let inv = inv_mod(m[row][col], p);
        for x in m[row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..m.len() {
            if r != row && m[r][col] != 0 {
                let f = m[r][col];
                for c in 0..cols {
                    let sub = f * m[row][c] % p;
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == m.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][f]) % p;
            }
            v
        })
        .collect()
}

fn determinant(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = m.len();
    let mut det = 1u64;
    for col in 0..n {
        let Some(r) = (col..n).find(|&r| m[r][col] != 0) else {
            return 0;
        };
        if r != col {
            m.swap(r, col);
            det = (p - det) % p;
        }
        det = det * m[col][col] % p;
        let inv = inv_mod(m[col][col], p);
        for r in col + 1..n {
            if m[r][col] != 0 {
                let f = m[r][col] * inv % p;
                for c in col..n {
                    let sub = f * m[col][c] % p;
                    m[r][c] = (m[r][c] + p - sub) % p;
                }
            }
        }
    }
    det
}

/// Roots in F_p of the characteristic polynomial of a square matrix.
pub fn eigenvalues(a: &[Vec<u64>], p: u64) -> Vec<u64> {
    let k = a.len();
    // det(xI - A) at x = 0..=k, then Lagrange interpolation
    let xs: Vec<u64> = (0..=k as u64).collect();
    let ys: Vec<u64> = xs
        .iter()
        .map(|&x| {
            let m: Vec<Vec<u64>> = (0..k)
                .map(|i| {
                    (0..k)
                        .map(|j| {
                            let d = if i == j { x % p } else { 0 };
                            (d + p - a[i][j]) % p
                        })
                        .collect()
                })
                .collect();
            determinant(m, p)
        })
        .collect();
    let mut poly = vec![0u64; k + 1];
    for (i, &xi) in xs.iter().enumerate() {
        let mut basis = vec![1u64];
        let mut denom = 1u64;
        for (j, &xj) in xs.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut nb = vec![0u64; basis.len() + 1];
            for (d, &c) in basis.iter().enumerate() {
                nb[d + 1] = (nb[d + 1] + c) % p;
                nb[d] = (nb[d] + c * ((p - xj % p) % p)) % p;
            }
            basis = nb;
            denom = denom * ((xi + p - xj % p) % p) % p;
        }
        let f = ys[i] * inv_mod(denom, p) % p;
        for (d, c) in basis.iter().enumerate() {
            poly[d] = (poly[d] + c * f) % p;
        }
    }
    (0..p)
        .filter(|&x| {
            let mut acc = 0u64;
            for c in poly.iter().rev() {
                acc = (acc * x + c) % p;
            }
            acc == 0
        })
        .collect()
}

/// Common eigenvectors of a family of commuting, simultaneously
/// diagonalisable matrices acting on column vectors.
pub fn common_eigenvectors(mats: &[Vec<Vec<u64>>], dim: usize, p: u64) -> Result<Vec<Vec<u64>>> {
    let identity: Vec<Vec<u64>> = (0..dim)
        .map(|i| (0..dim).map(|j| u64::from(i == j)).collect())
        .collect();
    let mut spaces = vec![identity];
    for m in mats {
        if spaces.iter().all(|s| s.len() == 1) {
            break;
        }
        let mut next = Vec::new();
        for basis in spaces {
            if basis.len() == 1 {
                next.push(basis);
                continue;
            }
            let (basis, pivots) = echelon(basis, dim, p);
            let k = basis.len();
            // images M b_j in coordinates: the pivot entries
            let images: Vec<Vec<u64>> = basis
                .iter()
                .map(|b| {
                    (0..dim)
                        .map(|i| m[i].iter().zip(b).fold(0u64, |acc, (x, y)| (acc + x * y) % p))
                        .collect()
                })
                .collect();
            let restricted: Vec<Vec<u64>> = (0..k)
                .map(|i| (0..k).map(|j| images[j][pivots[i]]).collect())
                .collect();
            let mut covered = 0;
            for lambda in eigenvalues(&restricted, p) {
                let shifted: Vec<Vec<u64>> = (0..k)
                    .map(|i| {
                        (0..k)
                            .map(|j| {
                                let d = if i == j { lambda } else { 0 };
                                (restricted[i][j] + p - d) % p
                            })
                            .collect()
                    })
                    .collect();
                let ker = nullspace(&shifted, k, p);
                covered += ker.len();
                next.push(
                    ker.iter()
                        .map(|c| {
                            (0..dim)
                                .map(|t| {
                                    c.iter()
                                        .zip(&basis)
                                        .fold(0u64, |acc, (x, b)| (acc + x * b[t]) % p)
                                })
                                .collect()
                        })
                        .collect(),
                );
            }
            if covered != k {
                return Err(Error::Internal(format!(
                    "matrix is not diagonalisable over F_{p} on a {k}-dimensional eigenspace"
                )));
            }
        }
        spaces = next;
    }
    if spaces.iter().any(|s| s.len() != 1) {
        return Err(Error::Internal("eigenspaces did not split to lines".into()));
    }
    Ok(spaces.into_iter().map(|mut s| s.pop().unwrap()).collect())
}

/// Reduced row echelon form of a list of independent vectors.
fn echelon(mut vs: Vec<Vec<u64>>, dim: usize, p: u64) -> (Vec<Vec<u64>>, Vec<usize>) {
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..dim {
        let Some(r) = (row..vs.len()).find(|&r| vs[r][col] != 0) else {
            continue;
        };
        vs.swap(row, r);
        let inv = inv_mod(vs[row][col], p);
        for x in vs[row].iter_mut() {
            *x = *x * inv % p;
        }
        for r in 0..vs.len() {
            if r != row && vs[r][col] != 0 {
                let f = vs[r][col];
                for c in 0..dim {
                    let sub = f * vs[row][c] % p;
                    vs[r][c] = (vs[r][c] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == vs.len() {
            break;
        }
    }
    vs.truncate(row);
    (vs, pivots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_and_roots() {
        let p = find_prime(12, 100);
        assert!(is_prime(p) && p % 12 == 1 && p > 100);
        let z = primitive_root_of_unity(p, 12);
        assert_eq!(pow_mod(z, 12, p), 1);
        assert!((1..12).all(|k| pow_mod(z, k, p) != 1));
    }

    #[test]
    fn eigen_split_diagonal() {
        let p = 13;
        let a = vec![vec![2, 0, 0], vec![0, 5, 0], vec![0, 0, 2]];
        let b = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 3]];
        let v = common_eigenvectors(&[a, b], 3, p).unwrap();
        assert_eq!(v.len(), 3);
        let mut ev = eigenvalues(&[vec![0, 1], vec![1, 0]], p);
        ev.sort();
        assert_eq!(ev, vec![1, 12]);
    }
}
