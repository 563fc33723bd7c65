//! Integer row reduction: Hermite normal form and left kernels over `i128`.

use alloc::vec;
use alloc::vec::Vec;

/// Row-reduces `rows` with unimodular operations, working on the first
/// `ncols` columns only. Returns the number of non-zero rows in that block;
/// the rows are left in Hermite normal form (positive pivots, entries above
/// each pivot reduced into `[0, pivot)`).
fn reduce(rows: &mut [Vec<i128>], ncols: usize) -> usize {
    let n = rows.len();
    let mut r = 0;
    for col in 0..ncols {
        if r == n {
            break;
        }
        let mut has_pivot = false;
        loop {
            let pivot = (r..n)
                .filter(|&i| rows[i][col] != 0)
                .min_by_key(|&i| rows[i][col].unsigned_abs());
            let Some(p) = pivot else { break };
            has_pivot = true;
            rows.swap(p, r);
            let mut clean = true;
            for i in r + 1..n {
                if rows[i][col] != 0 {
                    let q = rows[i][col].div_euclid(rows[r][col]);
                    sub_multiple(rows, i, r, q);
                    if rows[i][col] != 0 {
                        clean = false;
                    }
                }
            }
            if clean {
                break;
            }
        }
        if !has_pivot {
            continue;
        }
        if rows[r][col] < 0 {
            for v in rows[r].iter_mut() {
                *v = -*v;
            }
        }
        for i in 0..r {
            let q = rows[i][col].div_euclid(rows[r][col]);
            if q != 0 {
                sub_multiple(rows, i, r, q);
            }
        }
        r += 1;
    }
    r
}

fn sub_multiple(rows: &mut [Vec<i128>], target: usize, source: usize, q: i128) {
    let (a, b) = if target < source {
        let (lo, hi) = rows.split_at_mut(source);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[source])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x -= q * y;
    }
}

/// Hermite normal form of the lattice spanned by `rows`; zero rows dropped.
pub fn hermite_normal_form(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let Some(ncols) = rows.first().map(|r| r.len()) else {
        return Vec::new();
    };
    let mut m = rows.to_vec();
    let rank = reduce(&mut m, ncols);
    m.truncate(rank);
    m
}

/// A basis of `{m in Z^rows : sum_i m_i rows[i] = 0}`.
pub fn left_kernel(rows: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = rows.len();
    let Some(ncols) = rows.first().map(|r| r.len()) else {
        return Vec::new();
    };
    let mut m: Vec<Vec<i128>> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            let mut unit = vec![0; n];
            unit[i] = 1;
            row.extend(unit);
            row
        })
        .collect();
    let rank = reduce(&mut m, ncols);
    m[rank..].iter().map(|row| row[ncols..].to_vec()).collect()
}

/// `true` when `v` lies in the lattice spanned by `rows`.
pub fn lattice_contains(rows: &[Vec<i128>], v: &[i128]) -> bool {
    let base = hermite_normal_form(rows);
    let mut ext = base.clone();
    ext.push(v.to_vec());
    hermite_normal_form(&ext) == base
}
