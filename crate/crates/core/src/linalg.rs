//! Exact dense linear algebra over the rationals (Gaussian elimination).

use num_traits::{One, Zero};

use crate::rational::Rational;

/// Solves `a x = b` for square `a`; `None` when `a` is singular.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let n = a.len();
    debug_assert!(a.iter().all(|row| row.len() == n) && b.len() == n);
    let mut m: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(col, pivot);
        let inv = Rational::one() / &m[col][col];
        for j in col..=n {
            m[col][j] *= &inv;
        }
        for r in 0..n {
            if r != col && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for j in col..=n {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
            }
        }
    }
    Some(m.into_iter().map(|mut row| row.pop().unwrap()).collect())
}

pub fn determinant(a: &[Vec<Rational>]) -> Rational {
    let n = a.len();
    let mut m = a.to_vec();
    let mut det = Rational::one();
    for col in 0..n {
        let Some(pivot) = (col..n).find(|&r| !m[r][col].is_zero()) else {
            return Rational::zero();
        };
        if pivot != col {
            m.swap(col, pivot);
            det = -det;
        }
        det *= &m[col][col];
        for r in col + 1..n {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[col][col];
                for j in col..n {
                    let t = &f * &m[col][j];
                    m[r][j] -= t;
                }
            }
        }
    }
    det
}

/// Rank of a (possibly rectangular) matrix given by rows.
pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, pivot);
        for r in rank + 1..m.len() {
            if !m[r][col].is_zero() {
                let f = &m[r][col] / &m[rank][col];
                for j in col..cols {
                    let t = &f * &m[rank][j];
                    m[r][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect()
    }

    #[test]
    fn solves_small_system() {
        let a = mat(&[&[2, 1], &[1, 3]]);
        let x = solve(&a, &[int(3), int(5)]).unwrap();
        assert_eq!(x, vec![ratio(4, 5), ratio(7, 5)]);
    }

    #[test]
    fn singular_has_no_solution() {
        let a = mat(&[&[1, 0], &[-1, 0]]);
        assert!(solve(&a, &[int(1), int(1)]).is_none());
        assert_eq!(determinant(&a), int(0));
    }

    #[test]
    fn determinant_with_row_swap() {
        let a = mat(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 2]]);
        assert_eq!(determinant(&a), int(-2));
    }

    #[test]
    fn rank_of_rectangular() {
        assert_eq!(rank(&mat(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(rank(&mat(&[&[1, 0], &[0, 1], &[1, 1]])), 2);
        assert_eq!(rank(&[]), 0);
    }
}
