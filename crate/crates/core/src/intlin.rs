//! Integer matrices: Smith normal form (optionally with the right transform)
//! and finitely generated lattice quotients.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type IntMatrix = Vec<Vec<BigInt>>;

/// Result of a Smith reduction `U·A·V = D`.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Nonzero diagonal entries `d_1 | d_2 | …`, all positive.
    pub diagonal: Vec<BigInt>,
    /// `V` and `V⁻¹`, present when requested.
    pub right: Option<(IntMatrix, IntMatrix)>,
}

fn identity(n: usize) -> IntMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

struct Reducer {
    a: IntMatrix,
    rows: usize,
    cols: usize,
    v: Option<(IntMatrix, IntMatrix)>,
}

impl Reducer {
    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for row in self.a.iter_mut() {
            row.swap(i, j);
        }
        if let Some((v, vinv)) = self.v.as_mut() {
            for row in v.iter_mut() {
                row.swap(i, j);
            }
            vinv.swap(i, j);
        }
    }

    /// `col_j -= q·col_t`.
    fn col_sub(&mut self, j: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in self.a.iter_mut() {
            if !row[t].is_zero() {
                let d = q * &row[t];
                row[j] -= d;
            }
        }
        if let Some((v, vinv)) = self.v.as_mut() {
            for row in v.iter_mut() {
                if !row[t].is_zero() {
                    let d = q * &row[t];
                    row[j] -= d;
                }
            }
            let rj = vinv[j].clone();
            for (x, y) in vinv[t].iter_mut().zip(rj.iter()) {
                if !y.is_zero() {
                    *x += q * y;
                }
            }
        }
    }

    /// `row_i -= q·row_t` (left transforms are not tracked).
    fn row_sub(&mut self, i: usize, t: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        let rt = self.a[t].clone();
        for (x, y) in self.a[i].iter_mut().zip(rt.iter()) {
            if !y.is_zero() {
                *x -= q * y;
            }
        }
    }

    fn smallest_in(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                match best {
                    Some((bi, bj)) if self.a[bi][bj].abs() <= x.abs() => {}
                    _ => best = Some((i, j)),
                }
                if x.abs().is_one() {
                    return best;
                }
            }
        }
        best
    }

    fn run(mut self) -> Smith {
        let mut diagonal = Vec::new();
        let n = self.rows.min(self.cols);
        for t in 0..n {
            let Some((pi, pj)) = self.smallest_in(t) else {
                break;
            };
            self.a.swap(t, pi);
            self.swap_cols(t, pj);
            loop {
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = self.a[i][t].div_floor(&self.a[t][t]);
                    self.row_sub(i, t, &q);
                    if !self.a[i][t].is_zero() {
                        self.a.swap(t, i);
                        dirty = true;
                    }
                }
                for j in t + 1..self.cols {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = self.a[t][j].div_floor(&self.a[t][t]);
                    self.col_sub(j, t, &q);
                    if !self.a[t][j].is_zero() {
                        self.swap_cols(t, j);
                        dirty = true;
                    }
                }
                if dirty {
                    continue;
                }
                // divisibility of the remaining block by the pivot
                let p = self.a[t][t].clone();
                let bad = (t + 1..self.rows)
                    .find(|&i| (t + 1..self.cols).any(|j| !self.a[i][j].is_multiple_of(&p)));
                match bad {
                    Some(i) => {
                        let minus_one = -BigInt::one();
                        self.row_sub(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                for row in self.a.iter_mut() {
                    row[t] = -&row[t];
                }
                if let Some((v, vinv)) = self.v.as_mut() {
                    for row in v.iter_mut() {
                        row[t] = -&row[t];
                    }
                    for x in vinv[t].iter_mut() {
                        *x = -&*x;
                    }
                }
            }
            diagonal.push(self.a[t][t].clone());
        }
        Smith {
            diagonal,
            right: self.v,
        }
    }
}

/// Smith normal form of an integer matrix with `cols` columns.
pub fn smith(a: &IntMatrix, cols: usize, with_right: bool) -> Smith {
    Reducer {
        a: a.clone(),
        rows: a.len(),
        cols,
        v: with_right.then(|| (identity(cols), identity(cols))),
    }
    .run()
}

/// Invariant factors (all > 1) of `Z^k / rowspan(relations)`, assuming the
/// relations have full rank `k`.
pub fn cokernel_factors(relations: &IntMatrix, k: usize) -> Vec<u64> {
    let s = smith(relations, k, false);
    assert_eq!(s.diagonal.len(), k, "relation lattice is not of full rank");
    s.diagonal
        .iter()
        .filter(|d| !d.is_one())
        .map(|d| d.to_u64().expect("invariant factor fits in u64"))
        .collect()
}

/// Row-style Hermite basis (upper triangular, positive pivots) of the
/// lattice spanned by `gens` in `Z^k`.
pub fn hermite_basis(gens: &IntMatrix, k: usize) -> IntMatrix {
    let mut rows: IntMatrix = gens.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let mut basis = Vec::new();
    let mut col = 0;
    while col < k && !rows.is_empty() {
        // gcd-combine all rows with nonzero entry in `col` into one pivot row
        loop {
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&a, &b| rows[a][col].abs().cmp(&rows[b][col].abs()));
            let p = nz[0];
            let prow = rows[p].clone();
            for &i in &nz[1..] {
                let q = rows[i][col].div_floor(&prow[col]);
                for (x, y) in rows[i].iter_mut().zip(prow.iter()) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(p) = (0..rows.len()).find(|&i| !rows[i][col].is_zero()) {
            let mut prow = rows.remove(p);
            if prow[col].is_negative() {
                for x in prow.iter_mut() {
                    *x = -&*x;
                }
            }
            basis.push(prow);
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        col += 1;
    }
    basis
}

/// Invariant factors of `H/K` for lattices `K ⊆ H ⊆ Z^k` given by
/// generators, where `H` has full rank.
pub fn lattice_quotient_factors(h_gens: &IntMatrix, k_gens: &IntMatrix, k: usize) -> Vec<u64> {
    let basis = hermite_basis(h_gens, k);
    assert_eq!(basis.len(), k, "ambient lattice must have full rank");
    let pivots: Vec<usize> = basis
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).unwrap())
        .collect();
    let coords: IntMatrix = k_gens
        .iter()
        .map(|w| {
            let mut rest = w.clone();
            let mut x = vec![BigInt::zero(); k];
            for (bi, row) in basis.iter().enumerate() {
                let p = pivots[bi];
                let (q, r) = rest[p].div_rem(&row[p]);
                assert!(r.is_zero(), "sublattice generator outside the lattice");
                for (a, b) in rest.iter_mut().zip(row.iter()) {
                    *a -= &q * b;
                }
                x[bi] = q;
            }
            assert!(rest.iter().all(Zero::is_zero), "sublattice generator outside the lattice");
            x
        })
        .collect();
    cokernel_factors(&coords, k)
}

fn prime_factors(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Invariant-factor form `d_1 | d_2 | …` (entries > 1) of a product of
/// cyclic groups of the given orders.
pub fn invariant_factors(orders: &[u64]) -> Vec<u64> {
    use std::collections::BTreeMap;
    let mut by_prime: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    for &n in orders {
        for (p, e) in prime_factors(n) {
            by_prime.entry(p).or_default().push(p.pow(e));
        }
    }
    let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; len];
    for powers in by_prime.values_mut() {
        powers.sort_unstable_by(|a, b| b.cmp(a));
        for (i, q) in powers.iter().enumerate() {
            factors[len - 1 - i] *= q;
        }
    }
    factors.retain(|&d| d > 1);
    factors
}

/// Invariant factors of a finite abelian group of exponent dividing
/// `exponent`, from the counting function `k ↦ #{x : k·x = 0}`.
pub fn factors_from_torsion_counts(exponent: u64, count: impl Fn(u64) -> u64) -> Vec<u64> {
    let mut cyclic = Vec::new();
    for (p, e) in prime_factors(exponent.max(1)) {
        let mut prev_log = 0u32;
        let mut ranks = Vec::new();
        for j in 1..=e {
            let c = count(p.pow(j));
            let mut log = 0;
            let mut x = c;
            while x > 1 {
                x /= p;
                log += 1;
            }
            ranks.push(log - prev_log);
            prev_log = log;
        }
        // ranks[j-1] = number of cyclic p-factors of order ≥ p^j
        for j in 0..ranks.len() {
            let next = ranks.get(j + 1).copied().unwrap_or(0);
            for _ in 0..ranks[j] - next {
                cyclic.push(p.pow(j as u32 + 1));
            }
        }
    }
    invariant_factors(&cyclic)
}

pub fn to_int_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smith_of_small_matrices() {
        let a = to_int_matrix(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]);
        let s = smith(&a, 3, false);
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
    }

    #[test]
    fn smith_right_transform_is_consistent() {
        let a = to_int_matrix(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 10]]);
        let s = smith(&a, 3, true);
        let (v, vinv) = s.right.unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let x: BigInt = (0..3).map(|k| &v[i][k] * &vinv[k][j]).sum();
                assert_eq!(x, if i == j { BigInt::one() } else { BigInt::zero() });
            }
        }
    }

    #[test]
    fn invariant_factor_normalization() {
        assert_eq!(invariant_factors(&[2, 3]), vec![6]);
        assert_eq!(invariant_factors(&[2, 2, 4]), vec![2, 2, 4]);
        assert_eq!(invariant_factors(&[4, 6]), vec![2, 12]);
        assert_eq!(invariant_factors(&[1, 1]), Vec::<u64>::new());
    }

    #[test]
    fn torsion_counts_recover_structure() {
        // Z/2 x Z/4: #{x: 2x=0} = 4, #{x: 4x=0} = 8
        let f = factors_from_torsion_counts(4, |k| match k {
            2 => 4,
            4 => 8,
            _ => unreachable!(),
        });
        assert_eq!(f, vec![2, 4]);
    }

    #[test]
    fn lattice_quotient() {
        // Z^2 / <(2,0),(0,2),(1,1)> = Z/2
        let h = to_int_matrix(&[vec![1, 0], vec![0, 1]]);
        let k = to_int_matrix(&[vec![2, 0], vec![0, 2], vec![1, 1]]);
        assert_eq!(lattice_quotient_factors(&h, &k, 2), vec![2]);
    }
}
