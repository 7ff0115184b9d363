//! Dense exact linear algebra over a single [`FieldElement`] field.

use crate::field::{FieldElement, FieldError};

pub type Matrix = Vec<Vec<FieldElement>>;

fn sample(m: &[Vec<FieldElement>]) -> FieldElement {
    m.iter()
        .flat_map(|r| r.iter())
        .find(|x| !x.is_zero())
        .or_else(|| m.iter().flat_map(|r| r.iter()).next())
        .map(|x| x.zero_like())
        .unwrap_or_else(FieldElement::zero)
}

/// Reduced row echelon form in place. Returns pivot columns.
pub fn rref(m: &mut Matrix) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].inv().expect("nonzero pivot");
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let t = &f * &m[r][j];
                    m[i][j] = &m[i][j] - &t;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(m: &Matrix) -> usize {
    let mut a = m.clone();
    rref(&mut a).len()
}

/// Basis of the right kernel `{v : m v = 0}`.
pub fn kernel(m: &Matrix, cols: usize) -> Vec<Vec<FieldElement>> {
    let z = sample(m);
    let mut a = m.clone();
    let pivots = rref(&mut a);
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![z.clone(); cols];
        v[free] = z.one_like();
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = -&a[r][free];
        }
        basis.push(v);
    }
    basis
}

/// One solution of `m x = b`, if the system is consistent.
pub fn solve(m: &Matrix, b: &[FieldElement]) -> Option<Vec<FieldElement>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, x)| {
            let mut r = row.clone();
            r.push(x.clone());
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.last() == Some(&cols) {
        return None;
    }
    let z = sample(&aug);
    let mut x = vec![z; cols];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = aug[r][cols].clone();
    }
    Some(x)
}

pub fn determinant(m: &Matrix) -> FieldElement {
    let n = m.len();
    let mut a = m.clone();
    let mut det = sample(m).one_like();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return det.zero_like();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inv().expect("nonzero pivot");
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] = &a[i][j] - &t;
            }
        }
    }
    det
}

pub fn inverse(m: &Matrix) -> Result<Matrix, FieldError> {
    let n = m.len();
    let z = sample(m);
    let mut aug: Matrix = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { z.one_like() } else { z.clone() }));
            r
        })
        .collect();
    let pivots = rref(&mut aug);
    if pivots.len() < n || pivots[n - 1] >= n {
        return Err(FieldError::DivisionByZero);
    }
    Ok(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn transpose(m: &Matrix) -> Matrix {
    let cols = m.first().map_or(0, Vec::len);
    (0..cols).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let bt = transpose(b);
    a.iter().map(|r| bt.iter().map(|c| crate::field::dot(r, c)).collect()).collect()
}

pub fn mat_vec(a: &Matrix, v: &[FieldElement]) -> Vec<FieldElement> {
    a.iter().map(|r| crate::field::dot(r, v)).collect()
}

pub fn identity(n: usize, like: &FieldElement) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { like.one_like() } else { like.zero_like() }).collect()).collect()
}

/// Extends independent `vectors` to a basis of the ambient space by adding
/// standard basis vectors in index order.
pub fn complete_basis(vectors: &[Vec<FieldElement>], dim: usize) -> Vec<Vec<FieldElement>> {
    let like =
        vectors.iter().flatten().find(|x| !x.is_zero()).map(|x| x.zero_like()).unwrap_or_else(FieldElement::zero);
    let mut out: Vec<Vec<FieldElement>> = vectors.to_vec();
    for i in 0..dim {
        if out.len() == dim {
            break;
        }
        let mut e = vec![like.zero_like(); dim];
        e[i] = like.one_like();
        let mut trial = out.clone();
        trial.push(e.clone());
        if rank(&trial) == trial.len() {
            out = trial;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int_vec;

    fn m(rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| int_vec(r)).collect()
    }

    #[test]
    fn rank_and_kernel() {
        let a = m(&[&[1, 2, 3], &[2, 4, 6], &[1, 0, 1]]);
        assert_eq!(rank(&a), 2);
        let k = kernel(&a, 3);
        assert_eq!(k.len(), 1);
        assert!(mat_vec(&a, &k[0]).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(&[&[2, 1], &[7, 4]]);
        assert_eq!(determinant(&a), FieldElement::from_int(1));
        let inv = inverse(&a).unwrap();
        assert_eq!(mat_mul(&a, &inv), identity(2, &FieldElement::zero()));
        assert!(inverse(&m(&[&[1, 2], &[2, 4]])).is_err());
        assert_eq!(determinant(&m(&[&[0, 1], &[1, 0]])), FieldElement::from_int(-1));
    }

    #[test]
    fn solve_consistent_and_not() {
        let a = m(&[&[1, 1], &[1, -1]]);
        let x = solve(&a, &int_vec(&[3, 1])).unwrap();
        assert_eq!(x, int_vec(&[2, 1]));
        let b = m(&[&[1, 1], &[2, 2]]);
        assert!(solve(&b, &int_vec(&[1, 3])).is_none());
    }

    #[test]
    fn basis_completion() {
        let b = complete_basis(&[int_vec(&[1, 1, 0])], 3);
        assert_eq!(b.len(), 3);
        assert_eq!(rank(&b), 3);
    }
}
