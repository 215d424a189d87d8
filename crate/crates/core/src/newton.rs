//! Branch expansion of a plane curve at infinity by the Newton polygon.
//!
//! For a squarefree f in K[x, y] the branches where |x| grows come from
//! the polygon of z^D f(1/z, y) at z = 0 with x = 1/z; branches running
//! to infinity in y over a finite x sit over the roots of the leading
//! y-coefficient and come from the polygon of f(x0 + z, y), keeping only
//! negative y-valuations. Coefficient fields are extended as polygon
//! equations demand: full factoring over the rationals, square roots
//! inside quadratic fields, nothing deeper.

use crate::numberfield::{self, Elem, Field, NfError};
use crate::poly::{BiPoly, Poly, UniPoly};
use crate::puiseux::{eval_poly_at_series, PuiseuxScalar, Valuation};
use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NpError {
    ZeroCurve,
    NotSquarefree,
    /// A polygon or pole equation needs a root outside the supported
    /// field extensions.
    ExtensionUnsupported,
    DepthExceeded,
    Nf(NfError),
}

impl fmt::Display for NpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NpError::ZeroCurve => write!(f, "the zero polynomial has no branches"),
            NpError::NotSquarefree => write!(f, "curve must be squarefree"),
            NpError::ExtensionUnsupported => {
                write!(f, "branch needs an unsupported field extension")
            }
            NpError::DepthExceeded => write!(f, "polygon recursion too deep"),
            NpError::Nf(e) => write!(f, "{}", e),
        }
    }
}

impl From<NfError> for NpError {
    fn from(e: NfError) -> Self {
        NpError::Nf(e)
    }
}

/// One Puiseux branch of the curve near infinity. Exponents of both
/// series lie in (1/ramification) Z.
#[derive(Clone, Debug)]
pub struct CurveBranch {
    pub x: PuiseuxScalar,
    pub y: PuiseuxScalar,
    pub ramification: u64,
    /// True for branches over a finite pole of y (and vertical lines),
    /// false for branches with x -> infinity.
    pub at_pole: bool,
}

impl CurveBranch {
    pub fn field(&self) -> &Field {
        self.y.field()
    }
}

/// Laurent polynomial in z with rational exponents.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Lp {
    field: Field,
    terms: BTreeMap<BigRational, Elem>,
}

impl Lp {
    fn zero(field: &Field) -> Lp {
        Lp {
            field: field.clone(),
            terms: BTreeMap::new(),
        }
    }

    fn add_term(&mut self, q: BigRational, c: Elem) {
        if c.is_zero() {
            return;
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

    fn from_unipoly(u: &UniPoly) -> Lp {
        let mut out = Lp::zero(u.field());
        for (i, c) in u.coeffs().iter().enumerate() {
            out.add_term(BigRational::from_integer(BigInt::from(i)), c.clone());
        }
        out
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn min_exp(&self) -> Option<&BigRational> {
        self.terms.keys().next()
    }

    fn coeff_at(&self, q: &BigRational) -> Elem {
        self.terms
            .get(q)
            .cloned()
            .unwrap_or_else(|| self.field.zero())
    }

    fn add(&self, other: &Lp) -> Lp {
        let mut out = self.clone();
        for (q, c) in &other.terms {
            out.add_term(q.clone(), c.clone());
        }
        out
    }

    fn mul(&self, other: &Lp) -> Lp {
        let mut out = Lp::zero(&self.field);
        for (qa, ca) in &self.terms {
            for (qb, cb) in &other.terms {
                out.add_term(qa + qb, ca.mul(cb));
            }
        }
        out
    }

    fn scale(&self, c: &Elem) -> Lp {
        let mut out = Lp::zero(&self.field);
        for (q, a) in &self.terms {
            out.add_term(q.clone(), a.mul(c));
        }
        out
    }

    fn shift(&self, q: &BigRational) -> Lp {
        Lp {
            field: self.field.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e + q, c.clone()))
                .collect(),
        }
    }

    fn promote(&self, target: &Field) -> Result<Lp, NfError> {
        let mut out = Lp::zero(target);
        for (q, c) in &self.terms {
            out.add_term(q.clone(), c.promote(target)?);
        }
        Ok(out)
    }

    fn to_puiseux(&self, trunc: Option<BigRational>) -> PuiseuxScalar {
        PuiseuxScalar::from_terms(
            &self.field,
            0,
            self.terms
                .iter()
                .map(|(q, c)| (q.clone(), Poly::constant(&self.field, 0, c.clone())))
                .collect(),
            trunc,
        )
    }
}

/// Polynomial in y whose coefficients are Laurent polynomials in z.
#[derive(Clone, Debug)]
struct NpPoly {
    field: Field,
    ys: Vec<Lp>,
}

impl NpPoly {
    fn from_y_coeffs(field: &Field, mut ys: Vec<Lp>) -> NpPoly {
        while ys.last().map(|c| c.is_zero()).unwrap_or(false) {
            ys.pop();
        }
        NpPoly {
            field: field.clone(),
            ys,
        }
    }

    fn from_bipoly(b: &BiPoly) -> NpPoly {
        NpPoly::from_y_coeffs(
            b.field(),
            b.y_coeffs().iter().map(Lp::from_unipoly).collect(),
        )
    }

    fn deg_y(&self) -> Option<usize> {
        if self.ys.is_empty() {
            None
        } else {
            Some(self.ys.len() - 1)
        }
    }

    fn promote(&self, target: &Field) -> Result<NpPoly, NfError> {
        let ys = self
            .ys
            .iter()
            .map(|c| c.promote(target))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(NpPoly::from_y_coeffs(target, ys))
    }

    /// Evaluate at y = s by Horner.
    fn eval_at(&self, s: &Lp) -> Lp {
        let mut acc = Lp::zero(&self.field);
        for c in self.ys.iter().rev() {
            acc = acc.mul(s).add(c);
        }
        acc
    }

    /// Substitute y = z^q (c + y'), then divide by the smallest power of
    /// z so the minimum exponent becomes zero.
    fn plug(&self, q: &BigRational, c: &Elem) -> NpPoly {
        let n = self.ys.len();
        let mut new_ys = vec![Lp::zero(&self.field); n];
        // binomial row cache
        for (j, cj) in self.ys.iter().enumerate() {
            if cj.is_zero() {
                continue;
            }
            let jq = q * BigRational::from_integer(BigInt::from(j));
            let base = cj.shift(&jq);
            let mut binom = BigRational::one();
            let mut cpows = vec![self.field.one()];
            for _ in 0..j {
                let last = cpows.last().unwrap().mul(c);
                cpows.push(last);
            }
            for k in 0..=j {
                if k > 0 {
                    binom = binom * BigRational::from_integer(BigInt::from(j - k + 1))
                        / BigRational::from_integer(BigInt::from(k));
                }
                let coef = cpows[j - k].mul_rat(&binom);
                if coef.is_zero() {
                    continue;
                }
                new_ys[k] = new_ys[k].add(&base.scale(&coef));
            }
        }
        let min = new_ys
            .iter()
            .filter_map(|c| c.min_exp())
            .min()
            .cloned()
            .unwrap_or_else(BigRational::zero);
        let neg = -min;
        let shifted = new_ys.iter().map(|c| c.shift(&neg)).collect();
        NpPoly::from_y_coeffs(&self.field, shifted)
    }
}

/// A root of a univariate polynomial together with its multiplicity; the
/// root's field may extend the coefficient field.
struct KRoot {
    value: Elem,
    mult: usize,
}

/// Roots of p in supported extensions. Over the rationals the polynomial
/// is factored completely (irreducible parts up to degree four, one field
/// per conjugate embedding). Over a bigger field only roots inside that
/// field are found, through degree two; anything else is unsupported.
fn roots_of(p: &UniPoly) -> Result<Vec<KRoot>, NpError> {
    let f = p.field().clone();
    let d = match p.deg() {
        None => return Err(NpError::ZeroCurve),
        Some(0) => return Ok(Vec::new()),
        Some(d) => d,
    };
    if f.is_rationals() {
        let qpoly: Vec<BigRational> = p
            .coeffs()
            .iter()
            .map(|c| c.to_rational().expect("rational field"))
            .collect();
        let factors = numberfield::factor(&qpoly).map_err(|e| match e {
            NfError::DegreeOutOfRange(_) => NpError::ExtensionUnsupported,
            other => NpError::Nf(other),
        })?;
        // group repeated factors
        let mut grouped: Vec<(Vec<BigRational>, usize)> = Vec::new();
        for fac in factors {
            match grouped.iter_mut().find(|(g, _)| *g == fac) {
                Some((_, m)) => *m += 1,
                None => grouped.push((fac, 1)),
            }
        }
        let mut out = Vec::new();
        for (fac, mult) in grouped {
            if crate::qpoly::deg(&fac) == Some(1) {
                let root = -fac[0].clone();
                out.push(KRoot {
                    value: f.from_rational(root),
                    mult,
                });
            } else {
                for l in Field::all_embeddings(&fac)? {
                    out.push(KRoot {
                        value: l.gen(),
                        mult,
                    });
                }
            }
        }
        return Ok(out);
    }
    // bigger field: only roots already inside it, degree two at most
    let rem = p.monic();
    let mut found: Vec<Elem> = Vec::new();
    match rem.deg().unwrap_or(0) {
        1 => found.push(rem.coeff(0).neg()),
        2 => {
            let b = rem.coeff(1);
            let c = rem.coeff(0);
            let disc = b.mul(&b).sub(&c.mul_rat(&crate::rat::int(4)));
            let s = numberfield::sqrt_in_field(&disc).map_err(|_| NpError::ExtensionUnsupported)?;
            match s {
                None => return Err(NpError::ExtensionUnsupported),
                Some(s) => {
                    let half = f.from_rational(crate::rat::rat(1, 2));
                    let r1 = s.sub(&b).mul(&half);
                    let r2 = s.neg().sub(&b).mul(&half);
                    found.push(r1.clone());
                    if r2 != r1 {
                        found.push(r2);
                    }
                }
            }
        }
        _ => return Err(NpError::ExtensionUnsupported),
    }
    let mut out = Vec::new();
    for r in found {
        // multiplicity by repeated division of the original
        let lin = UniPoly::from_coeffs(&f, vec![r.neg(), f.one()]);
        let mut m = 0usize;
        let mut cur = p.clone();
        loop {
            let (q, s) = cur.divrem(&lin);
            if !s.is_zero() {
                break;
            }
            m += 1;
            cur = q;
        }
        debug_assert!(m >= 1);
        out.push(KRoot { value: r, mult: m });
    }
    // sanity: all of p must be accounted for
    let total: usize = out.iter().map(|r| r.mult).sum();
    if total != d {
        return Err(NpError::ExtensionUnsupported);
    }
    Ok(out)
}

/// Vertices of the lower convex hull of (j, v) points, j increasing.
fn lower_hull(pts: &[(i64, BigRational)]) -> Vec<(i64, BigRational)> {
    let mut hull: Vec<(i64, BigRational)> = Vec::new();
    for p in pts {
        while hull.len() >= 2 {
            let o = &hull[hull.len() - 2];
            let a = &hull[hull.len() - 1];
            // cross(o->a, o->p) <= 0 drops clockwise turns and collinear
            let lhs = BigRational::from_integer(BigInt::from(a.0 - o.0)) * (&p.1 - &o.1);
            let rhs = (&a.1 - &o.1) * BigRational::from_integer(BigInt::from(p.0 - o.0));
            if lhs - rhs <= BigRational::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p.clone());
    }
    hull
}

struct RawBranch {
    series: PuiseuxScalar,
}

enum ContinueOutcome {
    Done(Lp, bool), // partial sum, exactness
    Fallback,
}

/// Regular continuation past a simple polygon root: solve for one
/// coefficient of y' at a time against the unit y'-coefficient at z^0.
fn newton_continue(g1: &NpPoly, target: &BigRational) -> ContinueOutcome {
    let f = &g1.field;
    if g1.deg_y().unwrap_or(0) < 1 {
        return ContinueOutcome::Fallback;
    }
    let a = g1.ys[1].coeff_at(&BigRational::zero());
    if a.is_zero() {
        return ContinueOutcome::Fallback;
    }
    if g1.ys[0].is_zero() {
        return ContinueOutcome::Done(Lp::zero(f), true);
    }
    if !g1.ys[0].min_exp().map(|m| m.is_positive()).unwrap_or(false) {
        return ContinueOutcome::Fallback;
    }
    let a_inv = a.inv().expect("nonzero");
    let mut s = Lp::zero(f);
    let mut prev = BigRational::zero();
    for _ in 0..100_000 {
        let r = g1.eval_at(&s);
        if r.is_zero() {
            return ContinueOutcome::Done(s, true);
        }
        let rho = r.min_exp().unwrap().clone();
        if &rho > target {
            return ContinueOutcome::Done(s, false);
        }
        assert!(rho > prev, "residual valuation must increase");
        let b = r.coeff_at(&rho).mul(&a_inv).neg();
        s.add_term(rho.clone(), b);
        prev = rho;
    }
    ContinueOutcome::Fallback
}

/// All Puiseux branches y(z) of g(z, y) = 0 at z = 0, with terms kept
/// through exponent `order`. Multiple roots recurse; simple roots switch
/// to regular continuation.
fn expand_at_zero(g: &NpPoly, order: &BigRational, depth: usize) -> Result<Vec<RawBranch>, NpError> {
    if depth > 64 {
        return Err(NpError::DepthExceeded);
    }
    let mut g = NpPoly::from_y_coeffs(&g.field, g.ys.clone());
    let mut out: Vec<RawBranch> = Vec::new();
    if g.deg_y().is_none() {
        return Ok(out);
    }
    if g.ys[0].is_zero() {
        out.push(RawBranch {
            series: PuiseuxScalar::zero(&g.field, 0),
        });
        let rest = g.ys[1..].to_vec();
        g = NpPoly::from_y_coeffs(&g.field, rest);
        assert!(
            g.deg_y().is_none() || !g.ys[0].is_zero(),
            "repeated y factor in squarefree input"
        );
    }
    match g.deg_y() {
        None | Some(0) => return Ok(out),
        _ => {}
    }
    let pts: Vec<(i64, BigRational)> = g
        .ys
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(j, c)| (j as i64, c.min_exp().unwrap().clone()))
        .collect();
    let hull = lower_hull(&pts);
    for w in hull.windows(2) {
        let (j0, v0) = (&w[0].0, &w[0].1);
        let (j1, v1) = (&w[1].0, &w[1].1);
        let span = BigRational::from_integer(BigInt::from(j1 - j0));
        let slope = (v1 - v0) / &span;
        let q = -&slope;
        // edge polynomial from the points sitting exactly on the line
        let mut phi_coeffs = vec![g.field.zero(); (j1 - j0) as usize + 1];
        for j in *j0..=*j1 {
            let line_v = v0 + &slope * BigRational::from_integer(BigInt::from(j - j0));
            let c = g.ys[j as usize].coeff_at(&line_v);
            phi_coeffs[(j - j0) as usize] = c;
        }
        let phi = UniPoly::from_coeffs(&g.field, phi_coeffs);
        for root in roots_of(&phi)? {
            let target_field = root.value.field().clone();
            let gl = if &target_field == &g.field {
                g.clone()
            } else {
                g.promote(&target_field)?
            };
            let g1 = gl.plug(&q, &root.value);
            let sub_order = order - &q;
            let mut subs: Vec<RawBranch> = Vec::new();
            let mut continued = false;
            if root.mult == 1 {
                match newton_continue(&g1, &sub_order) {
                    ContinueOutcome::Done(s, exact) => {
                        let trunc = if exact { None } else { Some(sub_order.clone()) };
                        subs.push(RawBranch {
                            series: s.to_puiseux(trunc),
                        });
                        continued = true;
                    }
                    ContinueOutcome::Fallback => {}
                }
            }
            if !continued {
                for sub in expand_at_zero(&g1, &sub_order, depth + 1)? {
                    // keep only corrections with positive valuation
                    let keep = match sub.series.valuation(None) {
                        Valuation::Exact(v) => v.is_positive(),
                        Valuation::Above(b) => !b.is_negative(),
                        Valuation::Infinite => true,
                    };
                    if keep {
                        subs.push(sub);
                    }
                }
            }
            for sub in subs {
                // y = z^q (c + y')
                let c_series = PuiseuxScalar::constant_elem(
                    &target_field,
                    0,
                    root.value.clone(),
                );
                let y = c_series.add(&sub.series).shift_exponents(&q);
                out.push(RawBranch { series: y });
            }
        }
    }
    Ok(out)
}

fn denominator_lcm(s: &PuiseuxScalar) -> u64 {
    let mut e = BigInt::one();
    for (q, _) in s.terms() {
        e = e.lcm(q.denom());
    }
    e.to_u64().expect("small ramification")
}

/// Branches of the squarefree plane curve f(x, y) = 0 near infinity,
/// with y-terms kept through exponent `order`. Variable 0 of f is x,
/// variable 1 is y.
pub fn branches_at_infinity(f: &Poly, order: &BigRational) -> Result<Vec<CurveBranch>, NpError> {
    assert_eq!(f.nvars(), 2, "plane curves have two variables");
    let bf = BiPoly::from_poly(f);
    if bf.is_zero() {
        return Err(NpError::ZeroCurve);
    }
    if !bf.is_squarefree() {
        return Err(NpError::NotSquarefree);
    }
    let base = bf.field().clone();
    let mut out: Vec<CurveBranch> = Vec::new();
    if bf.deg_y() == Some(0) {
        // no y: vertical lines over the roots of f(x)
        for root in roots_of(&bf.y_coeff(0))? {
            let l = root.value.field().clone();
            let x = PuiseuxScalar::constant_elem(&l, 0, root.value.clone());
            let y = PuiseuxScalar::monomial(
                &l,
                0,
                -BigRational::one(),
                Poly::one(&l, 0),
            );
            out.push(CurveBranch {
                x,
                y,
                ramification: 1,
                at_pole: true,
            });
        }
        return Ok(out);
    }
    // x -> infinity via x = 1/z
    let d = bf.deg_x();
    let g = bf.reversed_x(d);
    for b in expand_at_zero(&NpPoly::from_bipoly(&g), order, 0)? {
        let l = b.series.field().clone();
        let x = PuiseuxScalar::monomial(&l, 0, -BigRational::one(), Poly::one(&l, 0));
        let ram = denominator_lcm(&b.series);
        out.push(CurveBranch {
            x,
            y: b.series,
            ramification: ram,
            at_pole: false,
        });
    }
    // y -> infinity over a finite x
    let lc = bf.leading_y();
    if lc.deg().unwrap_or(0) >= 1 {
        for root in roots_of(&lc)? {
            let l = root.value.field().clone();
            let bl = if &l == &base { bf.clone() } else { bf.promote(&l)? };
            let shifted = bl.shift_x(&root.value);
            for b in expand_at_zero(&NpPoly::from_bipoly(&shifted), order, 0)? {
                match b.series.valuation(None) {
                    Valuation::Exact(v) if v.is_negative() => {}
                    _ => continue,
                }
                let lb = b.series.field().clone();
                let x0 = if &lb == &l {
                    root.value.clone()
                } else if l.is_rationals() {
                    root.value.promote(&lb)?
                } else {
                    // a tower: pole in one extension, expansion in another
                    return Err(NpError::ExtensionUnsupported);
                };
                let x = PuiseuxScalar::from_terms(
                    &lb,
                    0,
                    vec![
                        (BigRational::zero(), Poly::constant(&lb, 0, x0)),
                        (BigRational::one(), Poly::one(&lb, 0)),
                    ],
                    None,
                );
                let ram = denominator_lcm(&b.series);
                out.push(CurveBranch {
                    x,
                    y: b.series,
                    ramification: ram,
                    at_pole: true,
                });
            }
        }
    }
    Ok(out)
}

/// Valuation of f along the branch, over the branch's field.
pub fn branch_residual(f: &Poly, br: &CurveBranch) -> Result<Valuation, NfError> {
    let l = br.field().clone();
    let fl = if f.field() == &l {
        f.clone()
    } else {
        f.promote(&l)?
    };
    let r = eval_poly_at_series(&fl, &[br.x.clone(), br.y.clone()]);
    Ok(r.valuation(None))
}
