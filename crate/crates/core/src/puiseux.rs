//! Puiseux series with rational exponents, used as germs of definable
//! paths near z = 0. Coefficients are polynomials in family parameters
//! over a number field (constant polynomials when there are none).
//!
//! A series carries an optional truncation bound: terms with exponent
//! at most the bound are complete, anything beyond is unknown. All
//! arithmetic propagates the bound honestly, so a computed valuation is
//! either certified exact or reported as a strict lower bound.

use crate::numberfield::{Elem, Field};
use crate::poly::{ConstraintSystem, Poly};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_rational::BigRational;
use num_traits::Zero;

/// What is known about the valuation of a series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Valuation {
    /// Leading exponent, with a coefficient certified nonzero.
    Exact(BigRational),
    /// Every known term vanishes; the valuation exceeds the bound.
    Above(BigRational),
    /// The series is exactly zero.
    Infinite,
}

impl Valuation {
    /// Is the valuation certainly greater than `q`?
    pub fn exceeds(&self, q: &BigRational) -> bool {
        match self {
            Valuation::Exact(v) => v > q,
            Valuation::Above(b) => b >= q,
            Valuation::Infinite => true,
        }
    }

    /// Is the valuation certainly at least zero (a bounded germ)?
    pub fn is_bounded(&self) -> bool {
        match self {
            Valuation::Exact(v) => !v.is_negative(),
            Valuation::Above(b) => !b.is_negative(),
            Valuation::Infinite => true,
        }
    }
}

use num_traits::Signed;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PuiseuxScalar {
    field: Field,
    nparams: usize,
    terms: BTreeMap<BigRational, Poly>,
    trunc: Option<BigRational>,
}

impl PuiseuxScalar {
    pub fn zero(field: &Field, nparams: usize) -> PuiseuxScalar {
        PuiseuxScalar {
            field: field.clone(),
            nparams,
            terms: BTreeMap::new(),
            trunc: None,
        }
    }

    pub fn from_terms(
        field: &Field,
        nparams: usize,
        terms: Vec<(BigRational, Poly)>,
        trunc: Option<BigRational>,
    ) -> PuiseuxScalar {
        let mut s = PuiseuxScalar {
            field: field.clone(),
            nparams,
            terms: BTreeMap::new(),
            trunc,
        };
        for (q, c) in terms {
            s.add_term(q, c);
        }
        s
    }

    pub fn monomial(field: &Field, nparams: usize, q: BigRational, c: Poly) -> PuiseuxScalar {
        PuiseuxScalar::from_terms(field, nparams, vec![(q, c)], None)
    }

    pub fn constant(field: &Field, nparams: usize, c: Poly) -> PuiseuxScalar {
        PuiseuxScalar::monomial(field, nparams, BigRational::zero(), c)
    }

    pub fn constant_elem(field: &Field, nparams: usize, c: Elem) -> PuiseuxScalar {
        let p = Poly::constant(field, nparams, c);
        PuiseuxScalar::constant(field, nparams, p)
    }

    fn add_term(&mut self, q: BigRational, c: Poly) {
        if c.is_zero() {
            return;
        }
        if let Some(t) = &self.trunc {
            if &q > t {
                return;
            }
        }
        match self.terms.get_mut(&q) {
            Some(old) => {
                let s = old.add(&c);
                if s.is_zero() {
                    self.terms.remove(&q);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(q, c);
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn nparams(&self) -> usize {
        self.nparams
    }

    pub fn trunc(&self) -> Option<&BigRational> {
        self.trunc.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.trunc.is_none()
    }

    /// Exactly the zero series, with nothing hidden behind a bound.
    pub fn is_exactly_zero(&self) -> bool {
        self.terms.is_empty() && self.trunc.is_none()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRational, &Poly)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff_at(&self, q: &BigRational) -> Poly {
        self.terms
            .get(q)
            .cloned()
            .unwrap_or_else(|| Poly::zero(&self.field, self.nparams))
    }

    pub fn min_exponent(&self) -> Option<&BigRational> {
        self.terms.keys().next()
    }

    fn check(&self, other: &PuiseuxScalar) {
        assert!(self.field == other.field, "field mismatch");
        assert_eq!(self.nparams, other.nparams, "parameter count mismatch");
    }

    pub fn add(&self, other: &PuiseuxScalar) -> PuiseuxScalar {
        self.check(other);
        let trunc = match (&self.trunc, &other.trunc) {
            (None, None) => None,
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (Some(a), Some(b)) => Some(a.min(b).clone()),
        };
        let mut out = PuiseuxScalar {
            field: self.field.clone(),
            nparams: self.nparams,
            terms: BTreeMap::new(),
            trunc,
        };
        for (q, c) in &self.terms {
            out.add_term(q.clone(), c.clone());
        }
        for (q, c) in &other.terms {
            out.add_term(q.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> PuiseuxScalar {
        PuiseuxScalar {
            field: self.field.clone(),
            nparams: self.nparams,
            terms: self
                .terms
                .iter()
                .map(|(q, c)| (q.clone(), c.neg()))
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn sub(&self, other: &PuiseuxScalar) -> PuiseuxScalar {
        self.add(&other.neg())
    }

    /// Product. The result is complete up to
    /// min(trunc(a) + minexp(b), trunc(b) + minexp(a)): unknown tails only
    /// meet known terms at or above that line.
    pub fn mul(&self, other: &PuiseuxScalar) -> PuiseuxScalar {
        self.check(other);
        if self.is_exactly_zero() || other.is_exactly_zero() {
            return PuiseuxScalar::zero(&self.field, self.nparams);
        }
        let bound_from = |t: &Option<BigRational>, o: &PuiseuxScalar, own: &Option<BigRational>| {
            t.as_ref().map(|tb| match o.min_exponent() {
                Some(m) => tb + m,
                // the other side has no known terms; its tail starts past
                // its own bound
                None => match own {
                    Some(ob) => tb + ob,
                    None => tb.clone(), // other is exactly zero, handled above
                },
            })
        };
        let b1 = bound_from(&self.trunc, other, &other.trunc);
        let b2 = bound_from(&other.trunc, self, &self.trunc);
        let trunc = match (b1, b2) {
            (None, None) => None,
            (Some(a), None) => Some(a),
            (None, Some(b)) => Some(b),
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        let mut out = PuiseuxScalar {
            field: self.field.clone(),
            nparams: self.nparams,
            terms: BTreeMap::new(),
            trunc,
        };
        for (qa, ca) in &self.terms {
            for (qb, cb) in &other.terms {
                out.add_term(qa + qb, ca.mul(cb));
            }
        }
        out
    }

    pub fn mul_poly(&self, c: &Poly) -> PuiseuxScalar {
        if c.is_zero() {
            return PuiseuxScalar::zero(&self.field, self.nparams);
        }
        PuiseuxScalar {
            field: self.field.clone(),
            nparams: self.nparams,
            terms: self
                .terms
                .iter()
                .filter_map(|(q, a)| {
                    let p = a.mul(c);
                    if p.is_zero() {
                        None
                    } else {
                        Some((q.clone(), p))
                    }
                })
                .collect(),
            trunc: self.trunc.clone(),
        }
    }

    pub fn mul_elem(&self, c: &Elem) -> PuiseuxScalar {
        self.mul_poly(&Poly::constant(&self.field, self.nparams, c.clone()))
    }

    pub fn pow(&self, k: u32) -> PuiseuxScalar {
        let mut out = PuiseuxScalar::constant_elem(&self.field, self.nparams, self.field.one());
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Multiply by the monomial z^q.
    pub fn shift_exponents(&self, q: &BigRational) -> PuiseuxScalar {
        PuiseuxScalar {
            field: self.field.clone(),
            nparams: self.nparams,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + q, c.clone()))
                .collect(),
            trunc: self.trunc.as_ref().map(|t| t + q),
        }
    }

    /// Substitute z by z^f for positive rational f: exponents scale by f.
    pub fn scale_exponents(&self, f: &BigRational) -> PuiseuxScalar {
        assert!(f.is_positive(), "exponent scale must be positive");
        PuiseuxScalar {
            field: self.field.clone(),
            nparams: self.nparams,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e * f, c.clone()))
                .collect(),
            trunc: self.trunc.as_ref().map(|t| t * f),
        }
    }

    /// Forget everything beyond q.
    pub fn truncate(&self, q: &BigRational) -> PuiseuxScalar {
        let new_trunc = match &self.trunc {
            Some(t) if t <= q => t.clone(),
            _ => q.clone(),
        };
        PuiseuxScalar {
            field: self.field.clone(),
            nparams: self.nparams,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| *e <= &new_trunc)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
            trunc: Some(new_trunc),
        }
    }

    /// Valuation relative to a constraint system on the parameters; with
    /// none, coefficients count as zero only when identically zero.
    pub fn valuation(&self, cs: Option<&ConstraintSystem>) -> Valuation {
        for (q, c) in &self.terms {
            let vanishes = match cs {
                Some(sys) => sys.is_zero_mod(c),
                None => c.is_zero(),
            };
            if !vanishes {
                return Valuation::Exact(q.clone());
            }
        }
        match &self.trunc {
            Some(t) => Valuation::Above(t.clone()),
            None => Valuation::Infinite,
        }
    }

    /// Specialize the parameters to a point.
    pub fn eval_params(&self, point: &[Elem]) -> PuiseuxScalar {
        assert_eq!(point.len(), self.nparams);
        let mut out = PuiseuxScalar {
            field: self.field.clone(),
            nparams: 0,
            terms: BTreeMap::new(),
            trunc: self.trunc.clone(),
        };
        for (q, c) in &self.terms {
            let v = c.eval(point);
            out.add_term(q.clone(), Poly::constant(&self.field, 0, v));
        }
        out
    }

    /// Value of the known part at z = w^e for nonzero rational w. Every
    /// stored exponent times e must be an integer. Parameters must be
    /// gone. The unknown tail is dropped.
    pub fn eval_known_at(&self, w: &BigRational, e: u64) -> Elem {
        assert_eq!(self.nparams, 0, "parameters must be specialized");
        assert!(!w.is_zero());
        let mut acc = self.field.zero();
        let ee = BigRational::from_integer(e.into());
        for (q, c) in &self.terms {
            let k = q * &ee;
            assert!(k.is_integer(), "exponent not resolved by ramification");
            let kk = i64::try_from(k.to_integer()).expect("exponent fits");
            let p = crate::rat::pow(w, kk);
            let cv = c.constant_value().expect("no parameters");
            acc = acc.add(&cv.mul_rat(&p));
        }
        acc
    }

    /// Coefficient of z^0, defined only for bounded series. None when the
    /// series has certified negative valuation or boundedness cannot be
    /// certified from the stored terms.
    pub fn standard_part(&self, cs: Option<&ConstraintSystem>) -> Option<Poly> {
        if !self.valuation(cs).is_bounded() {
            return None;
        }
        Some(self.coeff_at(&BigRational::zero()))
    }

    /// Terms with negative exponent, as (exponent, coefficient) pairs.
    pub fn principal_part(&self) -> Vec<(BigRational, Poly)> {
        self.terms
            .iter()
            .filter(|(q, _)| q.is_negative())
            .map(|(q, c)| (q.clone(), c.clone()))
            .collect()
    }

    /// Do the stored terms of the two series agree at every exponent up
    /// to the bound?
    pub fn agrees_up_to(&self, other: &PuiseuxScalar, bound: &BigRational) -> bool {
        let mut keys: Vec<&BigRational> = self.terms.keys().collect();
        keys.extend(other.terms.keys());
        keys.sort();
        keys.dedup();
        for q in keys {
            if q > bound {
                continue;
            }
            if self.coeff_at(q) != other.coeff_at(q) {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for PuiseuxScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (q, c) in &self.terms {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({})*z^({})", c, q)?;
            }
        }
        if let Some(t) = &self.trunc {
            write!(f, " + o(z^{})", t)?;
        }
        Ok(())
    }
}

/// Evaluate an ambient polynomial at a vector of series.
pub fn eval_poly_at_series(p: &Poly, xs: &[PuiseuxScalar]) -> PuiseuxScalar {
    assert_eq!(p.nvars(), xs.len(), "ambient arity");
    let field = xs
        .first()
        .map(|s| s.field().clone())
        .unwrap_or_else(|| p.field().clone());
    let nparams = xs.first().map(|s| s.nparams()).unwrap_or(0);
    // power cache per variable
    let mut cache: Vec<Vec<PuiseuxScalar>> = xs
        .iter()
        .map(|x| vec![PuiseuxScalar::constant_elem(&field, nparams, field.one()), x.clone()])
        .collect();
    let mut acc = PuiseuxScalar::zero(&field, nparams);
    for (e, c) in p.terms() {
        let mut t = PuiseuxScalar::constant_elem(&field, nparams, c.clone());
        for (v, &k) in e.iter().enumerate() {
            if k == 0 {
                continue;
            }
            while cache[v].len() <= k as usize {
                let next = cache[v].last().unwrap().mul(&xs[v]);
                cache[v].push(next);
            }
            t = t.mul(&cache[v][k as usize]);
        }
        acc = acc.add(&t);
    }
    acc
}

/// A parametrized family of paths into a variety: one series per ambient
/// coordinate, with the parameters confined to a constraint locus.
#[derive(Clone, Debug)]
pub struct BranchFamily {
    components: Vec<PuiseuxScalar>,
    constraints: ConstraintSystem,
}

impl BranchFamily {
    pub fn new(
        components: Vec<PuiseuxScalar>,
        constraints: ConstraintSystem,
    ) -> Result<BranchFamily, &'static str> {
        let Some(first) = components.first() else {
            return Err("a branch needs at least one coordinate");
        };
        let field = first.field().clone();
        let nparams = first.nparams();
        for c in &components {
            if c.field() != &field || c.nparams() != nparams {
                return Err("branch components disagree on field or parameters");
            }
        }
        if constraints.nvars() != nparams {
            return Err("constraint arity differs from parameter count");
        }
        if constraints.field() != &field {
            return Err("constraint field differs from branch field");
        }
        Ok(BranchFamily {
            components,
            constraints,
        })
    }

    pub fn without_params(components: Vec<PuiseuxScalar>) -> Result<BranchFamily, &'static str> {
        let field = components
            .first()
            .map(|c| c.field().clone())
            .ok_or("a branch needs at least one coordinate")?;
        let cs = ConstraintSystem::unconstrained(&field, 0);
        BranchFamily::new(components, cs)
    }

    pub fn components(&self) -> &[PuiseuxScalar] {
        &self.components
    }

    pub fn constraints(&self) -> &ConstraintSystem {
        &self.constraints
    }

    pub fn field(&self) -> &Field {
        self.components[0].field()
    }

    pub fn nparams(&self) -> usize {
        self.components[0].nparams()
    }

    pub fn ambient_dim(&self) -> usize {
        self.components.len()
    }

    pub fn is_parametric(&self) -> bool {
        self.nparams() > 0
    }

    /// Residual series of the defining polynomials along the family.
    pub fn residuals(&self, system: &[Poly]) -> Vec<PuiseuxScalar> {
        system
            .iter()
            .map(|p| eval_poly_at_series(p, &self.components))
            .collect()
    }

    /// Does every residual have valuation certainly greater than `order`?
    /// This is the acceptance test for "the family lies on the variety to
    /// the stated order".
    pub fn on_variety_to_order(&self, system: &[Poly], order: &BigRational) -> bool {
        self.residuals(system)
            .iter()
            .all(|r| r.valuation(Some(&self.constraints)).exceeds(order))
    }

    /// Specialize parameters to a sampled point on the constraint locus.
    pub fn specialize(&self, point: &[Elem]) -> BranchFamily {
        let comps = self
            .components
            .iter()
            .map(|c| c.eval_params(point))
            .collect();
        BranchFamily {
            components: comps,
            constraints: ConstraintSystem::unconstrained(self.field(), 0),
        }
    }
}
