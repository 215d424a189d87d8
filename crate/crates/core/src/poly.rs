//! Polynomial rings over a number field: sparse multivariate polynomials,
//! dense univariate polynomials, bivariate polynomials in K[x][y], and
//! triangular constraint systems for parameter spaces.

use crate::numberfield::{Elem, Field};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_rational::BigRational;

/// Sparse multivariate polynomial. Exponent vectors all have length
/// `nvars`; stored coefficients are nonzero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    field: Field,
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Elem>,
}

impl Poly {
    pub fn zero(field: &Field, nvars: usize) -> Poly {
        Poly {
            field: field.clone(),
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: &Field, nvars: usize, c: Elem) -> Poly {
        let mut p = Poly::zero(field, nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn one(field: &Field, nvars: usize) -> Poly {
        Poly::constant(field, nvars, field.one())
    }

    pub fn var(field: &Field, nvars: usize, i: usize) -> Poly {
        assert!(i < nvars);
        let mut e = vec![0u32; nvars];
        e[i] = 1;
        let mut p = Poly::zero(field, nvars);
        p.terms.insert(e, field.one());
        p
    }

    pub fn from_terms(field: &Field, nvars: usize, terms: Vec<(Vec<u32>, Elem)>) -> Poly {
        let mut p = Poly::zero(field, nvars);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars);
            p.add_term(e, c);
        }
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Elem) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&e);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn constant_value(&self) -> Option<Elem> {
        if !self.is_constant() {
            return None;
        }
        Some(
            self.terms
                .get(&vec![0u32; self.nvars])
                .cloned()
                .unwrap_or_else(|| self.field.zero()),
        )
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Elem)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn deg_in(&self, v: usize) -> u32 {
        self.terms.keys().map(|e| e[v]).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum::<u32>())
            .max()
            .unwrap_or(0)
    }

    pub fn uses_var(&self, v: usize) -> bool {
        self.terms.keys().any(|e| e[v] > 0)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.check(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        let mut out = Poly::zero(&self.field, self.nvars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c.neg());
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.check(other);
        let mut out = Poly::zero(&self.field, self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca.mul(cb));
            }
        }
        out
    }

    pub fn mul_elem(&self, c: &Elem) -> Poly {
        if c.is_zero() {
            return Poly::zero(&self.field, self.nvars);
        }
        let mut out = Poly::zero(&self.field, self.nvars);
        for (e, a) in &self.terms {
            out.terms.insert(e.clone(), a.mul(c));
        }
        out
    }

    pub fn mul_rat(&self, q: &BigRational) -> Poly {
        self.mul_elem(&self.field.from_rational(q.clone()))
    }

    pub fn pow(&self, k: u32) -> Poly {
        let mut out = Poly::one(&self.field, self.nvars);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, point: &[Elem]) -> Elem {
        assert_eq!(point.len(), self.nvars);
        let mut acc = self.field.zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (v, &k) in e.iter().enumerate() {
                if k > 0 {
                    t = t.mul(&point[v].pow(k));
                }
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn partial(&self, v: usize) -> Poly {
        let mut out = Poly::zero(&self.field, self.nvars);
        for (e, c) in &self.terms {
            if e[v] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[v] -= 1;
            out.add_term(e2, c.mul_rat(&crate::rat::int(e[v] as i64)));
        }
        out
    }

    /// Coefficient of x_v^k, with the exponent of x_v zeroed out.
    pub fn coeff_of(&self, v: usize, k: u32) -> Poly {
        let mut out = Poly::zero(&self.field, self.nvars);
        for (e, c) in &self.terms {
            if e[v] == k {
                let mut e2 = e.clone();
                e2[v] = 0;
                out.add_term(e2, c.clone());
            }
        }
        out
    }

    /// Substitute x_v by another polynomial over the same variables.
    pub fn substitute(&self, v: usize, q: &Poly) -> Poly {
        self.check(q);
        let d = self.deg_in(v);
        let mut powers = Vec::with_capacity(d as usize + 1);
        powers.push(Poly::one(&self.field, self.nvars));
        for k in 1..=d {
            powers.push(powers[k as usize - 1].mul(q));
        }
        let mut out = Poly::zero(&self.field, self.nvars);
        for k in 0..=d {
            let ck = self.coeff_of(v, k);
            if !ck.is_zero() {
                out = out.add(&ck.mul(&powers[k as usize]));
            }
        }
        out
    }

    fn check(&self, other: &Poly) {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        assert!(self.field == other.field, "field mismatch");
    }

    /// Coefficientwise coercion of rational coefficients into a bigger
    /// field.
    pub fn promote(&self, target: &Field) -> Result<Poly, crate::numberfield::NfError> {
        let mut out = Poly::zero(target, self.nvars);
        for (e, c) in &self.terms {
            out.terms.insert(e.clone(), c.promote(target)?);
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "({})", c)?;
            for (v, &k) in e.iter().enumerate() {
                if k == 1 {
                    write!(f, "*x{}", v)?;
                } else if k > 1 {
                    write!(f, "*x{}^{}", v, k)?;
                }
            }
        }
        Ok(())
    }
}

/// Dense univariate polynomial over a number field, constant first,
/// trailing zeros trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniPoly {
    field: Field,
    coeffs: Vec<Elem>,
}

impl UniPoly {
    pub fn zero(field: &Field) -> UniPoly {
        UniPoly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn from_coeffs(field: &Field, mut coeffs: Vec<Elem>) -> UniPoly {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        for c in &coeffs {
            assert!(c.field() == field, "field mismatch");
        }
        UniPoly {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn constant(field: &Field, c: Elem) -> UniPoly {
        UniPoly::from_coeffs(field, vec![c])
    }

    pub fn one(field: &Field) -> UniPoly {
        UniPoly::constant(field, field.one())
    }

    pub fn x(field: &Field) -> UniPoly {
        UniPoly::from_coeffs(field, vec![field.zero(), field.one()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Elem] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Elem {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn deg(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Elem {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            out.push(self.coeff(i).add(&other.coeff(i)));
        }
        UniPoly::from_coeffs(&self.field, out)
    }

    pub fn neg(&self) -> UniPoly {
        UniPoly::from_coeffs(&self.field, self.coeffs.iter().map(|c| c.neg()).collect())
    }

    pub fn sub(&self, other: &UniPoly) -> UniPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero(&self.field);
        }
        let mut out = vec![self.field.zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UniPoly::from_coeffs(&self.field, out)
    }

    pub fn scale(&self, c: &Elem) -> UniPoly {
        UniPoly::from_coeffs(&self.field, self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn pow(&self, k: u32) -> UniPoly {
        let mut out = UniPoly::one(&self.field);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    pub fn divrem(&self, d: &UniPoly) -> (UniPoly, UniPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg().unwrap();
        let lead_inv = d.leading().inv().expect("leading coefficient invertible");
        let mut r = self.coeffs.clone();
        let mut q = vec![self.field.zero(); self.coeffs.len().saturating_sub(dd)];
        while r.len() > dd && !r.is_empty() {
            let last = r.last().unwrap().clone();
            if last.is_zero() {
                r.pop();
                continue;
            }
            let k = r.len() - 1 - dd;
            let f = last.mul(&lead_inv);
            for i in 0..=dd {
                let t = d.coeffs[i].mul(&f);
                r[k + i] = r[k + i].sub(&t);
            }
            q[k] = f;
            r.pop();
        }
        (
            UniPoly::from_coeffs(&self.field, q),
            UniPoly::from_coeffs(&self.field, r),
        )
    }

    pub fn gcd(&self, other: &UniPoly) -> UniPoly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> UniPoly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.leading().inv().expect("nonzero leading");
        self.scale(&inv)
    }

    pub fn derivative(&self) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero(&self.field);
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c.mul_rat(&crate::rat::int(i as i64)))
            .collect();
        UniPoly::from_coeffs(&self.field, out)
    }

    pub fn eval(&self, x: &Elem) -> Elem {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    pub fn is_squarefree(&self) -> bool {
        match self.deg() {
            None | Some(0) => true,
            _ => self.gcd(&self.derivative()).deg() == Some(0),
        }
    }

    /// x -> x + a.
    pub fn shift(&self, a: &Elem) -> UniPoly {
        let mut acc = UniPoly::zero(&self.field);
        let lin = UniPoly::from_coeffs(&self.field, vec![a.clone(), self.field.one()]);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(&lin).add(&UniPoly::constant(&self.field, c.clone()));
        }
        acc
    }

    pub fn promote(&self, target: &Field) -> Result<UniPoly, crate::numberfield::NfError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.promote(target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(UniPoly::from_coeffs(target, coeffs))
    }

    /// x^d * p(1/x), for d at least deg(p).
    pub fn reversed(&self, d: usize) -> UniPoly {
        assert!(self.deg().map(|k| k <= d).unwrap_or(true));
        let mut out = vec![self.field.zero(); d + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            out[d - i] = c.clone();
        }
        UniPoly::from_coeffs(&self.field, out)
    }
}

/// Polynomial in K[x][y]: coefficient of y^j is a univariate polynomial
/// in x. Trailing (highest-j) zero coefficients trimmed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    field: Field,
    coeffs: Vec<UniPoly>,
}

impl BiPoly {
    pub fn zero(field: &Field) -> BiPoly {
        BiPoly {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn from_y_coeffs(field: &Field, mut coeffs: Vec<UniPoly>) -> BiPoly {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        BiPoly {
            field: field.clone(),
            coeffs,
        }
    }

    /// Build from a two-variable sparse polynomial; variable 0 is x,
    /// variable 1 is y.
    pub fn from_poly(p: &Poly) -> BiPoly {
        assert_eq!(p.nvars(), 2);
        let f = p.field().clone();
        let dy = p.deg_in(1);
        let mut coeffs = Vec::with_capacity(dy as usize + 1);
        for j in 0..=dy {
            let cj = p.coeff_of(1, j);
            let dx = cj.deg_in(0);
            let mut uni = vec![f.zero(); dx as usize + 1];
            for (e, c) in cj.terms() {
                uni[e[0] as usize] = c.clone();
            }
            coeffs.push(UniPoly::from_coeffs(&f, uni));
        }
        BiPoly::from_y_coeffs(&f, coeffs)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg_y(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg_x(&self) -> usize {
        self.coeffs
            .iter()
            .filter_map(|c| c.deg())
            .max()
            .unwrap_or(0)
    }

    pub fn y_coeff(&self, j: usize) -> UniPoly {
        self.coeffs
            .get(j)
            .cloned()
            .unwrap_or_else(|| UniPoly::zero(&self.field))
    }

    pub fn y_coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    pub fn leading_y(&self) -> UniPoly {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(|| UniPoly::zero(&self.field))
    }

    pub fn add(&self, other: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.y_coeff(j).add(&other.y_coeff(j)));
        }
        BiPoly::from_y_coeffs(&self.field, out)
    }

    pub fn sub(&self, other: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for j in 0..n {
            out.push(self.y_coeff(j).sub(&other.y_coeff(j)));
        }
        BiPoly::from_y_coeffs(&self.field, out)
    }

    pub fn scale_x(&self, c: &UniPoly) -> BiPoly {
        BiPoly::from_y_coeffs(
            &self.field,
            self.coeffs.iter().map(|a| a.mul(c)).collect(),
        )
    }

    pub fn mul(&self, other: &BiPoly) -> BiPoly {
        if self.is_zero() || other.is_zero() {
            return BiPoly::zero(&self.field);
        }
        let mut out = vec![UniPoly::zero(&self.field); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        BiPoly::from_y_coeffs(&self.field, out)
    }

    pub fn der_y(&self) -> BiPoly {
        if self.coeffs.len() <= 1 {
            return BiPoly::zero(&self.field);
        }
        let out = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| c.scale(&self.field.from_int(j as i64)))
            .collect();
        BiPoly::from_y_coeffs(&self.field, out)
    }

    /// Content with respect to y: monic gcd of the x-coefficients.
    pub fn content_y(&self) -> UniPoly {
        let mut g = UniPoly::zero(&self.field);
        for c in &self.coeffs {
            if !c.is_zero() {
                g = if g.is_zero() { c.monic() } else { g.gcd(c) };
            }
        }
        g
    }

    pub fn primitive_part_y(&self) -> BiPoly {
        if self.is_zero() {
            return self.clone();
        }
        let ct = self.content_y();
        if ct.deg() == Some(0) {
            return self.clone();
        }
        let out = self
            .coeffs
            .iter()
            .map(|c| {
                let (q, r) = c.divrem(&ct);
                assert!(r.is_zero(), "content divides");
                q
            })
            .collect();
        BiPoly::from_y_coeffs(&self.field, out)
    }

    /// Pseudo-remainder of self by d in y.
    pub fn prem_y(&self, d: &BiPoly) -> BiPoly {
        let dd = d.deg_y().expect("nonzero divisor");
        let lc = d.leading_y();
        let mut r = self.clone();
        while let Some(dr) = r.deg_y() {
            if dr < dd {
                break;
            }
            let lr = r.leading_y();
            // r := lc * r - lr * y^(dr-dd) * d
            let mut shifted = vec![UniPoly::zero(&self.field); dr - dd];
            shifted.extend(d.coeffs.iter().map(|c| c.mul(&lr)));
            let shifted = BiPoly::from_y_coeffs(&self.field, shifted);
            let scaled: Vec<UniPoly> = r.coeffs.iter().map(|c| c.mul(&lc)).collect();
            let scaled = BiPoly::from_y_coeffs(&self.field, scaled);
            let next = scaled.sub(&shifted);
            assert!(next.deg_y().map(|k| k < dr).unwrap_or(true), "degree drops");
            r = next;
        }
        r
    }

    /// Primitive gcd in y up to content, via the primitive polynomial
    /// remainder sequence.
    pub fn gcd_y(&self, other: &BiPoly) -> BiPoly {
        let mut a = self.primitive_part_y();
        let mut b = other.primitive_part_y();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.deg_y().unwrap() < b.deg_y().unwrap() {
            core::mem::swap(&mut a, &mut b);
        }
        loop {
            match b.deg_y() {
                None => return a.primitive_part_y(),
                Some(0) => {
                    // nonzero y-constant: gcd is trivial in y
                    return b.primitive_part_y();
                }
                Some(_) => {
                    let r = a.prem_y(&b);
                    a = b;
                    b = r.primitive_part_y();
                }
            }
        }
    }

    /// Squarefree as an element of K[x, y]: squarefree content and
    /// squarefree primitive part.
    pub fn is_squarefree(&self) -> bool {
        if self.is_zero() {
            return false;
        }
        if !self.content_y().is_squarefree() {
            return false;
        }
        let pp = self.primitive_part_y();
        if pp.deg_y() == Some(0) {
            return true;
        }
        let g = pp.gcd_y(&pp.der_y());
        g.deg_y() == Some(0)
    }

    pub fn promote(&self, target: &Field) -> Result<BiPoly, crate::numberfield::NfError> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| c.promote(target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(BiPoly::from_y_coeffs(target, coeffs))
    }

    /// f(x + a, y).
    pub fn shift_x(&self, a: &Elem) -> BiPoly {
        BiPoly::from_y_coeffs(
            &self.field,
            self.coeffs.iter().map(|c| c.shift(a)).collect(),
        )
    }

    /// x^d * f(1/x, y) for d at least deg_x(f).
    pub fn reversed_x(&self, d: usize) -> BiPoly {
        BiPoly::from_y_coeffs(
            &self.field,
            self.coeffs.iter().map(|c| c.reversed(d)).collect(),
        )
    }

    pub fn eval_xy(&self, x: &Elem, y: &Elem) -> Elem {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(y).add(&c.eval(x));
        }
        acc
    }
}

/// Parameter space cut out by constraints, each linear in one bound
/// variable with coefficients in the remaining ones, in dependency order.
/// Zero tests and sampling are exact on the locus where the leading
/// coefficients of the solved variables do not vanish.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    field: Field,
    nvars: usize,
    constraints: Vec<Poly>,
    bound: Vec<usize>,
    free: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintError {
    NotTriangular,
    ArityMismatch,
    DegenerateSample,
}

impl fmt::Display for ConstraintError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintError::NotTriangular => {
                write!(f, "constraints are not triangular-linear")
            }
            ConstraintError::ArityMismatch => write!(f, "variable count mismatch"),
            ConstraintError::DegenerateSample => {
                write!(f, "sampled point degenerates a solved coefficient")
            }
        }
    }
}

impl ConstraintSystem {
    /// Orders the constraints so that each one is linear in a variable not
    /// bound by any earlier constraint. Fails if no such order exists.
    pub fn new(
        field: &Field,
        nvars: usize,
        constraints: Vec<Poly>,
    ) -> Result<ConstraintSystem, ConstraintError> {
        for c in &constraints {
            if c.nvars() != nvars {
                return Err(ConstraintError::ArityMismatch);
            }
        }
        // Peel from the back: the last constraint binds a variable that no
        // other constraint mentions, so every constraint ends up mentioning
        // only free variables, earlier-bound ones, and its own. Backtracks
        // over peel choices.
        fn peel(
            nvars: usize,
            remaining: &mut Vec<Poly>,
            rev: &mut Vec<(Poly, usize)>,
        ) -> bool {
            if remaining.is_empty() {
                return true;
            }
            for ci in 0..remaining.len() {
                for v in 0..nvars {
                    if remaining[ci].deg_in(v) != 1 {
                        continue;
                    }
                    if remaining
                        .iter()
                        .enumerate()
                        .any(|(cj, c)| cj != ci && c.uses_var(v))
                    {
                        continue;
                    }
                    let c = remaining.remove(ci);
                    rev.push((c, v));
                    if peel(nvars, remaining, rev) {
                        return true;
                    }
                    let (c, _) = rev.pop().unwrap();
                    remaining.insert(ci, c);
                }
            }
            false
        }
        let mut remaining = constraints;
        let mut rev: Vec<(Poly, usize)> = Vec::new();
        if !peel(nvars, &mut remaining, &mut rev) {
            return Err(ConstraintError::NotTriangular);
        }
        let mut ordered = Vec::new();
        let mut bound = Vec::new();
        for (c, v) in rev.into_iter().rev() {
            ordered.push(c);
            bound.push(v);
        }
        let free = (0..nvars).filter(|v| !bound.contains(v)).collect();
        Ok(ConstraintSystem {
            field: field.clone(),
            nvars,
            constraints: ordered,
            bound,
            free,
        })
    }

    pub fn unconstrained(field: &Field, nvars: usize) -> ConstraintSystem {
        ConstraintSystem::new(field, nvars, Vec::new()).expect("empty is triangular")
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn constraints(&self) -> &[Poly] {
        &self.constraints
    }

    pub fn free_vars(&self) -> &[usize] {
        &self.free
    }

    pub fn bound_vars(&self) -> &[usize] {
        &self.bound
    }

    /// Number of independent parameters.
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Zero test modulo the constraint ideal, by eliminating bound
    /// variables last to first and clearing the solved coefficient.
    pub fn is_zero_mod(&self, p: &Poly) -> bool {
        let mut cur = p.clone();
        for j in (0..self.constraints.len()).rev() {
            let v = self.bound[j];
            let c = &self.constraints[j];
            // c = a * x_v + b with a, b free of x_v
            let a = c.coeff_of(v, 1);
            let b = c.coeff_of(v, 0);
            let d = cur.deg_in(v);
            if d == 0 {
                continue;
            }
            // substitute x_v = -b/a and clear a^d
            let mut acc = Poly::zero(&self.field, self.nvars);
            let neg_b = b.neg();
            for k in 0..=d {
                let ck = cur.coeff_of(v, k);
                if ck.is_zero() {
                    continue;
                }
                let term = ck.mul(&neg_b.pow(k)).mul(&a.pow(d - k));
                acc = acc.add(&term);
            }
            cur = acc;
        }
        cur.is_zero()
    }

    /// Solve the bound variables given values for the free ones.
    pub fn solve_from_free(&self, free_vals: &[Elem]) -> Result<Vec<Elem>, ConstraintError> {
        if free_vals.len() != self.free.len() {
            return Err(ConstraintError::ArityMismatch);
        }
        let mut point = vec![self.field.zero(); self.nvars];
        for (slot, v) in self.free.iter().enumerate() {
            point[*v] = free_vals[slot].clone();
        }
        for (j, c) in self.constraints.iter().enumerate() {
            let v = self.bound[j];
            let a = c.coeff_of(v, 1).eval(&point);
            let b = c.coeff_of(v, 0).eval(&point);
            if a.is_zero() {
                return Err(ConstraintError::DegenerateSample);
            }
            point[v] = b.neg().div(&a).expect("nonzero divisor");
        }
        Ok(point)
    }

    /// Random rational point on the constraint locus.
    pub fn sample(&self, sampler: &mut crate::rng::Sampler) -> Vec<Elem> {
        loop {
            let free_vals: Vec<Elem> = self
                .free
                .iter()
                .map(|_| self.field.from_rational(sampler.rational_nonzero(8, 5)))
                .collect();
            match self.solve_from_free(&free_vals) {
                Ok(p) => return p,
                Err(_) => continue,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Sampler;

    fn q() -> Field {
        Field::rationals()
    }

    #[test]
    fn poly_square_of_sum() {
        let f = q();
        let x = Poly::var(&f, 2, 0);
        let y = Poly::var(&f, 2, 1);
        let s = x.add(&y);
        let sq = s.mul(&s);
        let expect = x
            .mul(&x)
            .add(&x.mul(&y).mul_rat(&crate::rat::int(2)))
            .add(&y.mul(&y));
        assert_eq!(sq, expect);
        assert_eq!(sq.total_degree(), 2);
        let at = sq.eval(&[f.from_int(2), f.from_int(3)]);
        assert_eq!(at.to_rational().unwrap(), crate::rat::int(25));
    }

    #[test]
    fn poly_partial_and_substitute() {
        let f = q();
        let x = Poly::var(&f, 2, 0);
        let y = Poly::var(&f, 2, 1);
        // p = x^2 y + 3 y
        let p = x
            .pow(2)
            .mul(&y)
            .add(&y.mul_rat(&crate::rat::int(3)));
        let px = p.partial(0);
        assert_eq!(px, x.mul(&y).mul_rat(&crate::rat::int(2)));
        // y -> x - 1
        let sub = p.substitute(1, &x.sub(&Poly::one(&f, 2)));
        let v = sub.eval(&[f.from_int(2), f.zero()]);
        // p(2, 1) = 4 + 3 = 7
        assert_eq!(v.to_rational().unwrap(), crate::rat::int(7));
    }

    #[test]
    fn unipoly_divrem_gcd_over_gaussian() {
        let gi = Field::gaussian();
        let i = gi.gen();
        // (x - i)(x + 2) = x^2 + (2 - i)x - 2i
        let a = UniPoly::from_coeffs(&gi, vec![i.neg(), gi.one()]);
        let b = UniPoly::from_coeffs(&gi, vec![gi.from_int(2), gi.one()]);
        let p = a.mul(&b);
        let (quo, rem) = p.divrem(&a);
        assert!(rem.is_zero());
        assert_eq!(quo, b);
        let g = p.gcd(&a);
        assert_eq!(g, a.monic());
        assert!(p.is_squarefree());
        assert!(!p.mul(&a).is_squarefree());
    }

    #[test]
    fn unipoly_shift_and_reverse() {
        let f = q();
        // p = x^2 - 1; p(x+1) = x^2 + 2x
        let p = UniPoly::from_coeffs(&f, vec![f.from_int(-1), f.zero(), f.one()]);
        let sh = p.shift(&f.one());
        assert_eq!(
            sh,
            UniPoly::from_coeffs(&f, vec![f.zero(), f.from_int(2), f.one()])
        );
        // x^3 * p(1/x) = x^3 * (1/x^2 - 1) = x - x^3
        let r = p.reversed(3);
        assert_eq!(
            r,
            UniPoly::from_coeffs(&f, vec![f.zero(), f.one(), f.zero(), f.from_int(-1)])
        );
    }

    #[test]
    fn bipoly_squarefree_checks() {
        let f = q();
        let x = Poly::var(&f, 2, 0);
        let y = Poly::var(&f, 2, 1);
        // y^2 - x^3 squarefree
        let p1 = BiPoly::from_poly(&y.pow(2).sub(&x.pow(3)));
        assert!(p1.is_squarefree());
        // (y - x)^2 not squarefree
        let p2 = BiPoly::from_poly(&y.sub(&x).pow(2));
        assert!(!p2.is_squarefree());
        // y^2 - x^2 reducible but squarefree
        let p3 = BiPoly::from_poly(&y.pow(2).sub(&x.pow(2)));
        assert!(p3.is_squarefree());
        // x * (x y - 1): content x squarefree, primitive part squarefree
        let p4 = BiPoly::from_poly(&x.mul(&x.mul(&y).sub(&Poly::one(&f, 2))));
        assert!(p4.is_squarefree());
        // x^2 * (x y - 1): content x^2 not squarefree
        let p5 = BiPoly::from_poly(&x.pow(2).mul(&x.mul(&y).sub(&Poly::one(&f, 2))));
        assert!(!p5.is_squarefree());
    }

    #[test]
    fn bipoly_shift_and_reverse() {
        let f = q();
        let x = Poly::var(&f, 2, 0);
        let y = Poly::var(&f, 2, 1);
        // f = x y - 1, shift x by 2: (x + 2) y - 1
        let p = BiPoly::from_poly(&x.mul(&y).sub(&Poly::one(&f, 2)));
        let sh = p.shift_x(&f.from_int(2));
        assert_eq!(
            sh.eval_xy(&f.zero(), &f.one()),
            f.from_int(1)
        );
        // reverse: x * f(1/x, y) = y - x
        let rv = p.reversed_x(1);
        assert_eq!(rv.eval_xy(&f.from_int(3), &f.from_int(3)), f.zero());
        assert_eq!(rv.deg_y(), Some(1));
    }

    #[test]
    fn constraint_system_reciprocal_pair() {
        let f = q();
        // vars t = 0, u = 1; constraint t u - 1 = 0
        let t = Poly::var(&f, 2, 0);
        let u = Poly::var(&f, 2, 1);
        let c = t.mul(&u).sub(&Poly::one(&f, 2));
        let sys = ConstraintSystem::new(&f, 2, vec![c.clone()]).unwrap();
        assert_eq!(sys.dim(), 1);
        assert!(sys.is_zero_mod(&c));
        // t^2 u - t vanishes on the locus
        let p = t.pow(2).mul(&u).sub(&t);
        assert!(sys.is_zero_mod(&p));
        // u - t does not
        assert!(!sys.is_zero_mod(&u.sub(&t)));
        let mut s = Sampler::new(7);
        for _ in 0..10 {
            let pt = sys.sample(&mut s);
            assert_eq!(c.eval(&pt), f.zero());
        }
    }

    #[test]
    fn constraint_system_rejects_quadratic_link() {
        let f = q();
        let t = Poly::var(&f, 2, 0);
        let u = Poly::var(&f, 2, 1);
        // u^2 = t^2 is linear in neither variable alone
        let c = u.pow(2).sub(&t.pow(2));
        assert!(matches!(
            ConstraintSystem::new(&f, 2, vec![c]),
            Err(ConstraintError::NotTriangular)
        ));
    }

    #[test]
    fn constraint_chain_orders_dependencies() {
        let f = q();
        // vars a, b, c with  b = a^2  and  c b = 1, given out of order
        let a = Poly::var(&f, 3, 0);
        let b = Poly::var(&f, 3, 1);
        let c = Poly::var(&f, 3, 2);
        let k1 = c.mul(&b).sub(&Poly::one(&f, 3));
        let k2 = b.sub(&a.pow(2));
        let sys = ConstraintSystem::new(&f, 3, vec![k1.clone(), k2.clone()]).unwrap();
        assert_eq!(sys.dim(), 1);
        let mut s = Sampler::new(9);
        for _ in 0..10 {
            let pt = sys.sample(&mut s);
            assert_eq!(k1.eval(&pt), f.zero());
            assert_eq!(k2.eval(&pt), f.zero());
        }
        // a^2 c - ... : a^2 * c * b^2 - b  vanishes (= b (c b - 1) * ... check simple one)
        let p = a.pow(2).mul(&c).mul(&b).sub(&b);
        assert!(sys.is_zero_mod(&p));
    }
}
