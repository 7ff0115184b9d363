//! Machine-word arithmetic over `F_p` for the enumeration oracles.

use std::collections::HashMap;

use crate::field::{inv_mod, mul_mod, sqrt_mod, FieldError};
use crate::poly::Poly;

/// A polynomial reduced modulo `p`, stored as a flat term list.
#[derive(Clone, Debug)]
pub struct ModPoly {
    pub p: u64,
    pub nvars: usize,
    pub terms: Vec<(Vec<u16>, u64)>,
}

impl ModPoly {
    pub fn reduce(f: &Poly, p: u64) -> Result<Self, FieldError> {
        let mut terms = Vec::new();
        for (e, c) in f.terms() {
            let v = match c.reduce_mod_p(p)? {
                crate::field::FieldElement::Prime { v, .. } => v,
                _ => unreachable!(),
            };
            if v != 0 {
                terms.push((e.clone(), v));
            }
        }
        Ok(ModPoly { p, nvars: f.nvars(), terms })
    }

    pub fn eval(&self, x: &[u64]) -> u64 {
        let p = self.p;
        let mut acc = 0u64;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &k) in x.iter().zip(e) {
                for _ in 0..k {
                    t = mul_mod(t, *xi, p);
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }

    pub fn partial(&self, var: usize) -> ModPoly {
        let p = self.p;
        let terms = self
            .terms
            .iter()
            .filter(|(e, _)| e[var] > 0)
            .filter_map(|(e, c)| {
                let mut f = e.clone();
                let k = f[var] as u64;
                f[var] -= 1;
                let v = mul_mod(*c, k % p, p);
                (v != 0).then_some((f, v))
            })
            .collect();
        ModPoly { p, nvars: self.nvars, terms }
    }

    /// Pullback along `t -> sum t_j basis[j]`, as a term list in the `t`.
    pub fn restrict(&self, basis: &[Vec<u64>]) -> Vec<(Vec<u16>, u64)> {
        let p = self.p;
        let m = basis.len();
        let mut out: HashMap<Vec<u16>, u64> = HashMap::new();
        for (e, c) in &self.terms {
            let mut cur: HashMap<Vec<u16>, u64> = HashMap::new();
            cur.insert(vec![0; m], *c);
            for (var, &k) in e.iter().enumerate() {
                for _ in 0..k {
                    let mut next = HashMap::new();
                    for (mono, coef) in &cur {
                        for (j, b) in basis.iter().enumerate() {
                            if b[var] == 0 {
                                continue;
                            }
                            let mut f = mono.clone();
                            f[j] += 1;
                            let slot = next.entry(f).or_insert(0u64);
                            *slot = (*slot + mul_mod(*coef, b[var], p)) % p;
                        }
                    }
                    cur = next;
                }
            }
            for (mono, coef) in cur {
                let slot = out.entry(mono).or_insert(0);
                *slot = (*slot + coef) % p;
            }
        }
        let mut flat: Vec<(Vec<u16>, u64)> = out.into_iter().filter(|(_, c)| *c != 0).collect();
        flat.sort();
        flat
    }
}

/// A ternary form over `F_p` given as `(exponents, coefficient)` triples.
#[derive(Clone, Debug)]
pub struct TernaryForm {
    pub p: u64,
    pub terms: Vec<([u16; 3], u64)>,
}

impl TernaryForm {
    pub fn from_restriction(f: &ModPoly, basis: &[Vec<u64>; 3]) -> Self {
        let terms = f.restrict(basis).into_iter().map(|(e, c)| ([e[0], e[1], e[2]], c)).collect();
        TernaryForm { p: f.p, terms }
    }

    pub fn eval(&self, x: [u64; 3]) -> u64 {
        let p = self.p;
        let mut acc = 0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for i in 0..3 {
                for _ in 0..e[i] {
                    t = mul_mod(t, x[i], p);
                }
            }
            acc = (acc + t) % p;
        }
        acc
    }

    /// Coefficients `(a, b, c)` of `a w^2 + b w + c` after fixing the first
    /// two coordinates.
    pub fn as_quadratic_in_last(&self, x0: u64, x1: u64) -> [u64; 3] {
        let p = self.p;
        let mut out = [0u64; 3];
        for (e, c) in &self.terms {
            let mut t = *c;
            for _ in 0..e[0] {
                t = mul_mod(t, x0, p);
            }
            for _ in 0..e[1] {
                t = mul_mod(t, x1, p);
            }
            let k = e[2] as usize;
            if k <= 2 {
                out[k] = (out[k] + t) % p;
            }
        }
        [out[2], out[1], out[0]]
    }
}

/// Roots in `F_p` of `a w^2 + b w + c`; `None` when the polynomial is zero.
pub fn quadratic_roots(a: u64, b: u64, c: u64, p: u64) -> Option<Vec<u64>> {
    if a == 0 {
        if b == 0 {
            return if c == 0 { None } else { Some(vec![]) };
        }
        let r = mul_mod(p - c % p, inv_mod(b, p).unwrap(), p) % p;
        return Some(vec![r]);
    }
    let disc = (mul_mod(b, b, p) + p - mul_mod(4, mul_mod(a, c, p), p)) % p;
    let Some(s) = sqrt_mod(disc, p) else {
        return Some(vec![]);
    };
    let inv2a = inv_mod(mul_mod(2, a, p), p).unwrap();
    let r1 = mul_mod((p - b + s) % p, inv2a, p);
    let r2 = mul_mod((2 * p - b - s) % p, inv2a, p);
    if r1 == r2 {
        Some(vec![r1])
    } else {
        Some(vec![r1, r2])
    }
}

/// Rank of a small matrix over `F_p`.
pub fn rank_mod(mut m: Vec<Vec<u64>>, p: u64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !m[i][c].is_multiple_of(p)) else {
            continue;
        };
        m.swap(r, piv);
        let inv = inv_mod(m[r][c], p).unwrap();
        for j in 0..cols {
            m[r][j] = mul_mod(m[r][j], inv, p);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    m[i][j] = (m[i][j] + p - mul_mod(f, m[r][j], p)) % p;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Normalizes a nonzero vector so its first nonzero entry is 1.
pub fn normalize_mod(v: &[u64], p: u64) -> Vec<u64> {
    let lead = v.iter().find(|&&x| x != 0).copied().unwrap_or(1);
    let inv = inv_mod(lead, p).unwrap();
    v.iter().map(|&x| mul_mod(x, inv, p)).collect()
}

/// Dense univariate polynomials over `F_p`, lowest degree first, no trailing zeros.
pub mod uni {
    use crate::field::{inv_mod, mul_mod};

    pub fn trim(mut f: Vec<u64>) -> Vec<u64> {
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    pub fn degree(f: &[u64]) -> Option<usize> {
        f.iter().rposition(|&c| c != 0)
    }

    pub fn eval(f: &[u64], x: u64, p: u64) -> u64 {
        f.iter().rev().fold(0, |acc, &c| (mul_mod(acc, x, p) + c) % p)
    }

    pub fn derivative(f: &[u64], p: u64) -> Vec<u64> {
        trim(f.iter().enumerate().skip(1).map(|(i, &c)| mul_mod(c, i as u64 % p, p)).collect())
    }

    pub fn monic(f: &[u64], p: u64) -> Vec<u64> {
        match f.last() {
            Some(&lc) => {
                let inv = inv_mod(lc, p).expect("trimmed");
                f.iter().map(|&c| mul_mod(c, inv, p)).collect()
            }
            None => Vec::new(),
        }
    }

    /// Quotient and remainder; `g` must be nonzero.
    pub fn divrem(f: &[u64], g: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let g = trim(g.to_vec());
        let dg = g.len() - 1;
        let inv = inv_mod(g[dg], p).expect("nonzero divisor");
        let mut r = trim(f.to_vec());
        if r.len() <= dg {
            return (Vec::new(), r);
        }
        let mut q = vec![0; r.len() - dg];
        while r.len() > dg {
            let k = r.len() - 1 - dg;
            let c = mul_mod(*r.last().unwrap(), inv, p);
            q[k] = c;
            for (i, &gi) in g.iter().enumerate() {
                r[k + i] = (r[k + i] + p - mul_mod(c, gi, p)) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    pub fn gcd(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
        let (mut a, mut b) = (trim(f.to_vec()), trim(g.to_vec()));
        while !b.is_empty() {
            let (_, r) = divrem(&a, &b, p);
            a = b;
            b = r;
        }
        monic(&a, p)
    }

    /// Yun's squarefree factorization of a nonzero polynomial of degree
    /// below `p`: `f = lc * prod a_i^i`, returned as `(i, a_i)` with
    /// `deg a_i > 0`.
    pub fn squarefree_parts(f: &[u64], p: u64) -> Vec<(usize, Vec<u64>)> {
        let f = monic(&trim(f.to_vec()), p);
        let mut out = Vec::new();
        if f.len() <= 1 {
            return out;
        }
        let df = derivative(&f, p);
        let a = gcd(&f, &df, p);
        let mut b = divrem(&f, &a, p).0;
        let mut c = divrem(&df, &a, p).0;
        let mut i = 1;
        loop {
            let db = derivative(&b, p);
            let d: Vec<u64> = {
                let n = c.len().max(db.len());
                trim(
                    (0..n)
                        .map(|k| (c.get(k).copied().unwrap_or(0) + p - db.get(k).copied().unwrap_or(0)) % p)
                        .collect(),
                )
            };
            if b.len() <= 1 {
                break;
            }
            let ai = gcd(&b, &d, p);
            if ai.len() > 1 {
                out.push((i, ai.clone()));
            }
            b = divrem(&b, &ai, p).0;
            c = divrem(&d, &ai, p).0;
            i += 1;
        }
        out
    }

    /// Newton interpolation through `(x_i, y_i)` with distinct `x_i`.
    pub fn interpolate(xs: &[u64], ys: &[u64], p: u64) -> Vec<u64> {
        let n = xs.len();
        let mut coef = ys.to_vec();
        for j in 1..n {
            for i in (j..n).rev() {
                let num = (coef[i] + p - coef[i - 1]) % p;
                let den = (xs[i] + p - xs[i - j]) % p;
                coef[i] = mul_mod(num, inv_mod(den, p).expect("distinct nodes"), p);
            }
        }
        let mut out = vec![0u64; n];
        for k in (0..n).rev() {
            // out = out * (x - xs[k]) + coef[k]
            let mut next = vec![0u64; n];
            for (d, &c) in out.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                if d + 1 < n {
                    next[d + 1] = (next[d + 1] + c) % p;
                }
                next[d] = (next[d] + p - mul_mod(c, xs[k] % p, p)) % p;
            }
            next[0] = (next[0] + coef[k]) % p;
            out = next;
        }
        trim(out)
    }

    /// Determinant of a small square matrix over `F_p`.
    pub fn det(mut m: Vec<Vec<u64>>, p: u64) -> u64 {
        let n = m.len();
        let mut acc = 1u64;
        for c in 0..n {
            let Some(piv) = (c..n).find(|&i| !m[i][c].is_multiple_of(p)) else {
                return 0;
            };
            if piv != c {
                m.swap(piv, c);
                acc = (p - acc) % p;
            }
            acc = mul_mod(acc, m[c][c], p);
            let inv = inv_mod(m[c][c], p).unwrap();
            for i in c + 1..n {
                if m[i][c] != 0 {
                    let f = mul_mod(m[i][c], inv, p);
                    for j in c..n {
                        m[i][j] = (m[i][j] + p - mul_mod(f, m[c][j], p)) % p;
                    }
                }
            }
        }
        acc
    }

    /// Sylvester resultant of two univariate polynomials given with their
    /// formal degrees (coefficients lowest first, padded to `deg + 1`).
    pub fn resultant(f: &[u64], g: &[u64], p: u64) -> u64 {
        let (m, n) = (f.len() - 1, g.len() - 1);
        let size = m + n;
        let mut rows = Vec::with_capacity(size);
        for i in 0..n {
            let mut row = vec![0; size];
            for k in 0..=m {
                row[i + k] = f[m - k];
            }
            rows.push(row);
        }
        for i in 0..m {
            let mut row = vec![0; size];
            for k in 0..=n {
                row[i + k] = g[n - k];
            }
            rows.push(row);
        }
        det(rows, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_mod_7() {
        // w^2 - 1 = (w - 1)(w + 1)
        let mut r = quadratic_roots(1, 0, 6, 7).unwrap();
        r.sort();
        assert_eq!(r, vec![1, 6]);
        assert_eq!(quadratic_roots(1, 0, 1, 7).unwrap(), Vec::<u64>::new());
        assert_eq!(quadratic_roots(0, 0, 0, 7), None);
        assert_eq!(quadratic_roots(0, 2, 3, 7).unwrap(), vec![2]);
    }

    #[test]
    fn rank_small() {
        assert_eq!(rank_mod(vec![vec![1, 2], vec![2, 4]], 7), 1);
        assert_eq!(rank_mod(vec![vec![1, 2], vec![2, 5]], 7), 2);
    }

    #[test]
    fn yun_recovers_multiplicities() {
        let p = 1009;
        // (x - 1)^3 (x - 2) (x^2 + 1)
        let mut f = vec![1u64];
        for r in [[p - 1, 1], [p - 1, 1], [p - 1, 1], [p - 2, 1]] {
            f = mul(&f, &r, p);
        }
        f = mul(&f, &[1, 0, 1], p);
        let parts = uni::squarefree_parts(&f, p);
        let total: usize = parts.iter().map(|(i, a)| i * uni::degree(a).unwrap()).sum();
        assert_eq!(total, 6);
        assert_eq!(parts.iter().map(|(i, a)| (*i, uni::degree(a).unwrap())).collect::<Vec<_>>(), vec![(1, 3), (3, 1)]);
    }

    #[test]
    fn interpolation_roundtrip() {
        let p = 1013;
        let f = vec![5u64, 0, 7, 1];
        let xs: Vec<u64> = (0..4).collect();
        let ys: Vec<u64> = xs.iter().map(|&x| uni::eval(&f, x, p)).collect();
        assert_eq!(uni::interpolate(&xs, &ys, p), f);
    }

    #[test]
    fn univariate_resultant_detects_common_root() {
        let p = 1013;
        assert_eq!(uni::resultant(&[p - 1, 0, 1], &[p - 1, 1], p), 0);
        assert_ne!(uni::resultant(&[1, 0, 1], &[p - 1, 1], p), 0);
    }

    fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        let mut out = vec![0; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
            }
        }
        out
    }
}
