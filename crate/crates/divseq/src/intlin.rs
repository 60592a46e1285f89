//! Small exact integer linear algebra.
//!
//! The independence tests need one primitive: a basis of the left kernel
//! `{ v : v M = 0 }` of an integer matrix with few rows.  Row-reducing the
//! matrix to Hermite form while tracking the unimodular transform gives the
//! kernel as the transform rows that land on zero rows.  Entries stay small
//! because pivots are chosen by minimal absolute value, and everything runs
//! in `i128`, which the involved exponent matrices cannot overflow in
//! practice; arithmetic is checked in debug builds regardless.

/// Basis of the left kernel of `m` (rows of the returned matrix).  The basis
/// vectors are primitive with positive first nonzero entry, in the order the
/// reduction discovers them.
pub fn left_kernel(m: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    debug_assert!(m.iter().all(|r| r.len() == cols));
    let mut h: Vec<Vec<i128>> = m.to_vec();
    let mut u: Vec<Vec<i128>> = (0..rows)
        .map(|i| (0..rows).map(|j| i128::from(i == j)).collect())
        .collect();

    let mut pivot_row = 0usize;
    for col in 0..cols {
        if pivot_row == rows {
            break;
        }
        loop {
            // pick the row with the smallest nonzero entry in this column
            let mut best: Option<usize> = None;
            for (r, row) in h.iter().enumerate().skip(pivot_row) {
                if row[col] != 0
                    && best.is_none_or(|b| row[col].abs() < h[b][col].abs())
                {
                    best = Some(r);
                }
            }
            let Some(b) = best else { break };
            h.swap(pivot_row, b);
            u.swap(pivot_row, b);
            let mut done = true;
            for r in pivot_row + 1..rows {
                if h[r][col] == 0 {
                    continue;
                }
                let q = div_round(h[r][col], h[pivot_row][col]);
                if q != 0 {
                    for c in 0..cols {
                        let d = q * h[pivot_row][c];
                        h[r][c] -= d;
                    }
                    for c in 0..rows {
                        let d = q * u[pivot_row][c];
                        u[r][c] -= d;
                    }
                }
                if h[r][col] != 0 {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if h[pivot_row][col] != 0 {
            if h[pivot_row][col] < 0 {
                for c in 0..cols {
                    h[pivot_row][c] = -h[pivot_row][c];
                }
                for c in 0..rows {
                    u[pivot_row][c] = -u[pivot_row][c];
                }
            }
            pivot_row += 1;
        }
    }

    (pivot_row..rows)
        .map(|r| {
            debug_assert!(h[r].iter().all(|&x| x == 0));
            normalize_primitive(&u[r])
        })
        .collect()
}

/// Rounded division, which keeps remainders at most half the divisor and
/// the Euclidean passes short.
fn div_round(a: i128, b: i128) -> i128 {
    let q = a / b;
    let r = a - q * b;
    if 2 * r.abs() > b.abs() {
        if (r < 0) == (b < 0) {
            q + 1
        } else {
            q - 1
        }
    } else {
        q
    }
}

/// Divides out the gcd and flips signs so the first nonzero entry is
/// positive.  The zero vector is returned unchanged.
pub fn normalize_primitive(v: &[i128]) -> Vec<i128> {
    let mut g: i128 = 0;
    for &x in v {
        g = gcd_i128(g, x);
    }
    if g == 0 {
        return v.to_vec();
    }
    let mut out: Vec<i128> = v.iter().map(|&x| x / g).collect();
    if let Some(&first) = out.iter().find(|&&x| x != 0) {
        if first < 0 {
            for x in &mut out {
                *x = -*x;
            }
        }
    }
    out
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}
