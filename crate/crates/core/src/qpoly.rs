//! Univariate polynomials over the rationals, dense representation,
//! constant coefficient first. Enough arithmetic for minimal polynomials
//! and root isolation; field coefficient polynomials live elsewhere.

use alloc::vec;
use alloc::vec::Vec;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub type QPoly = Vec<BigRational>;

pub fn trim(mut p: QPoly) -> QPoly {
    while p.last().map(|c| c.is_zero()).unwrap_or(false) {
        p.pop();
    }
    p
}

pub fn deg(p: &[BigRational]) -> Option<usize> {
    let mut d = None;
    for (i, c) in p.iter().enumerate() {
        if !c.is_zero() {
            d = Some(i);
        }
    }
    d
}

pub fn is_zero(p: &[BigRational]) -> bool {
    p.iter().all(|c| c.is_zero())
}

pub fn add(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let n = a.len().max(b.len());
    let mut out = vec![BigRational::zero(); n];
    for (i, c) in a.iter().enumerate() {
        out[i] += c;
    }
    for (i, c) in b.iter().enumerate() {
        out[i] += c;
    }
    trim(out)
}

pub fn neg(a: &[BigRational]) -> QPoly {
    a.iter().map(|c| -c).collect()
}

pub fn sub(a: &[BigRational], b: &[BigRational]) -> QPoly {
    add(a, &neg(b))
}

pub fn mul(a: &[BigRational], b: &[BigRational]) -> QPoly {
    if is_zero(a) || is_zero(b) {
        return Vec::new();
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, ca) in a.iter().enumerate() {
        if ca.is_zero() {
            continue;
        }
        for (j, cb) in b.iter().enumerate() {
            out[i + j] += ca * cb;
        }
    }
    trim(out)
}

pub fn scale(a: &[BigRational], c: &BigRational) -> QPoly {
    trim(a.iter().map(|x| x * c).collect())
}

/// Quotient and remainder; divisor must be nonzero.
pub fn divrem(a: &[BigRational], b: &[BigRational]) -> (QPoly, QPoly) {
    let db = deg(b).expect("division by zero polynomial");
    let lead = b[db].clone();
    let mut rem: QPoly = trim(a.to_vec());
    let mut quo: QPoly = Vec::new();
    while let Some(dr) = deg(&rem) {
        if dr < db {
            break;
        }
        let c = &rem[dr] / &lead;
        let k = dr - db;
        if quo.len() < k + 1 {
            quo.resize(k + 1, BigRational::zero());
        }
        quo[k] = c.clone();
        for (i, bc) in b.iter().enumerate() {
            let t = &c * bc;
            rem[i + k] -= t;
        }
        rem = trim(rem);
    }
    (trim(quo), rem)
}

/// Monic gcd. gcd(0,0) = 0.
pub fn gcd(a: &[BigRational], b: &[BigRational]) -> QPoly {
    let mut x = trim(a.to_vec());
    let mut y = trim(b.to_vec());
    while !is_zero(&y) {
        let (_, r) = divrem(&x, &y);
        x = y;
        y = r;
    }
    if let Some(d) = deg(&x) {
        let lead = x[d].clone();
        x = scale(&x, &lead.recip());
    }
    x
}

pub fn derivative(p: &[BigRational]) -> QPoly {
    if p.len() <= 1 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(p.len() - 1);
    for (i, c) in p.iter().enumerate().skip(1) {
        out.push(c * BigRational::from_integer(i.into()));
    }
    trim(out)
}

pub fn eval(p: &[BigRational], x: &BigRational) -> BigRational {
    let mut acc = BigRational::zero();
    for c in p.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

pub fn is_squarefree(p: &[BigRational]) -> bool {
    match deg(p) {
        None | Some(0) => true,
        _ => deg(&gcd(p, &derivative(p))) == Some(0),
    }
}

pub fn squarefree_part(p: &[BigRational]) -> QPoly {
    match deg(p) {
        None | Some(0) => trim(p.to_vec()),
        _ => {
            let g = gcd(p, &derivative(p));
            if deg(&g) == Some(0) {
                trim(p.to_vec())
            } else {
                divrem(p, &g).0
            }
        }
    }
}

pub fn monic(p: &[BigRational]) -> QPoly {
    match deg(p) {
        None => Vec::new(),
        Some(d) => scale(p, &p[d].clone().recip()),
    }
}

pub fn one() -> QPoly {
    vec![BigRational::one()]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn p(coeffs: &[i64]) -> QPoly {
        trim(coeffs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn divrem_roundtrip() {
        let a = p(&[1, 0, -3, 2, 5]);
        let b = p(&[2, 1]);
        let (q, r) = divrem(&a, &b);
        assert_eq!(add(&mul(&q, &b), &r), a);
        assert!(deg(&r) < deg(&b));
    }

    #[test]
    fn gcd_of_shared_factor() {
        // (x-1)(x+2) and (x-1)(x-3)
        let a = mul(&p(&[-1, 1]), &p(&[2, 1]));
        let b = mul(&p(&[-1, 1]), &p(&[-3, 1]));
        assert_eq!(gcd(&a, &b), p(&[-1, 1]));
    }

    #[test]
    fn squarefree_detection() {
        let sq = mul(&p(&[-1, 1]), &p(&[-1, 1]));
        assert!(!is_squarefree(&sq));
        assert!(is_squarefree(&p(&[-2, 0, 1])));
        assert_eq!(squarefree_part(&sq), p(&[-1, 1]));
    }

    #[test]
    fn eval_horner() {
        assert_eq!(eval(&p(&[1, 2, 3]), &rat(1, 2)), rat(11, 4));
    }
}
