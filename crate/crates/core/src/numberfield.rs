//! Number fields of degree at most four with a designated complex
//! embedding, represented as Q[theta]/(p) with elements stored as rational
//! coefficient vectors. The designated embedding is a certified isolating
//! box for one root of p; refining the box never changes which root it
//! isolates.

use crate::interval::{self, CBox, CRat, Interval};
use crate::qpoly::{self, QPoly};
use crate::rat;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NfError {
    ZeroPolynomial,
    DegreeOutOfRange(usize),
    Reducible,
    RootIsolationFailed,
    FieldMismatch,
    NotConjugationClosed,
    NoRealEmbedding,
    DivisionByZero,
    SqrtUnsupportedDegree,
}

impl fmt::Display for NfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NfError::ZeroPolynomial => write!(f, "zero polynomial"),
            NfError::DegreeOutOfRange(d) => {
                write!(f, "field degree {} outside supported range 1..=4", d)
            }
            NfError::Reducible => write!(f, "minimal polynomial is reducible over Q"),
            NfError::RootIsolationFailed => write!(f, "could not certify root isolation"),
            NfError::FieldMismatch => write!(f, "elements belong to different fields"),
            NfError::NotConjugationClosed => {
                write!(f, "field is not closed under complex conjugation")
            }
            NfError::NoRealEmbedding => write!(f, "field has no real designated embedding"),
            NfError::DivisionByZero => write!(f, "division by zero"),
            NfError::SqrtUnsupportedDegree => {
                write!(f, "square roots only supported in fields of degree <= 2")
            }
        }
    }
}

#[derive(Debug)]
struct FieldInner {
    min_poly: QPoly, // monic, irreducible, degree 1..=4
    root: CBox,      // certified isolating box, already Krawczyk-contracted
    is_real: bool,
    root_index: usize, // position in the canonical (sorted) root list of min_poly
}

/// Cheap-clone handle. Two handles denote the same field iff the minimal
/// polynomials agree coefficientwise and the designated roots coincide.
#[derive(Clone, Debug)]
pub struct Field(Arc<FieldInner>);

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        self.0.min_poly == other.0.min_poly && self.0.root_index == other.0.root_index
    }
}
impl Eq for Field {}

impl Field {
    /// The rationals, as the degree-one field Q[x]/(x).
    pub fn rationals() -> Field {
        Field(Arc::new(FieldInner {
            min_poly: vec![BigRational::zero(), BigRational::one()],
            root: CBox::point(&CRat::zero()),
            is_real: true,
            root_index: 0,
        }))
    }

    /// Q(i) with the designated root +i.
    pub fn gaussian() -> Field {
        Field::new(
            vec![rat::int(1), rat::int(0), rat::int(1)],
            &CRat::new(rat::int(0), rat::int(1)),
        )
        .expect("x^2+1 is irreducible")
    }

    /// Q(sqrt(2)) with the positive root.
    pub fn sqrt2() -> Field {
        Field::new(
            vec![rat::int(-2), rat::int(0), rat::int(1)],
            &CRat::new(rat::rat(3, 2), rat::int(0)),
        )
        .expect("x^2-2 is irreducible")
    }

    /// Builds the field for a monic irreducible polynomial, designating the
    /// root nearest to `hint`. Non-monic input is normalized.
    pub fn new(min_poly: QPoly, hint: &CRat) -> Result<Field, NfError> {
        let boxes = Field::canonical_roots(&min_poly)?;
        let monic = qpoly::monic(&min_poly);
        // nearest canonical box midpoint wins
        let mut best: Option<(usize, BigRational)> = None;
        for (i, b) in boxes.iter().enumerate() {
            let d = b.mid().sub(hint).norm_sq();
            if best.as_ref().map(|(_, bd)| &d < bd).unwrap_or(true) {
                best = Some((i, d));
            }
        }
        let (idx, _) = best.ok_or(NfError::RootIsolationFailed)?;
        Field::from_root_box(monic, boxes, idx)
    }

    /// One field per complex root, canonical order.
    pub fn all_embeddings(min_poly: &QPoly) -> Result<Vec<Field>, NfError> {
        let boxes = Field::canonical_roots(min_poly)?;
        let monic = qpoly::monic(min_poly);
        (0..boxes.len())
            .map(|i| Field::from_root_box(monic.clone(), boxes.clone(), i))
            .collect()
    }

    fn from_root_box(monic: QPoly, boxes: Vec<CBox>, idx: usize) -> Result<Field, NfError> {
        let b = &boxes[idx];
        // a real root must be recognized as such; nonreal roots pair up, so
        // shrink until the box clears the axis or collapses onto it
        let dp = qpoly::derivative(&monic);
        let mut cur = b.clone();
        let is_real = if cur.is_real_axis() {
            true
        } else {
            let mut flag = None;
            for _ in 0..200 {
                if !cur.im.contains_zero() {
                    flag = Some(false);
                    break;
                }
                // box straddles the axis; a squarefree real polynomial with a
                // root in a conjugation-symmetric box has it on the axis iff
                // sign change on the real slice
                let lo = qpoly::eval(&monic, &cur.re.lo);
                let hi = qpoly::eval(&monic, &cur.re.hi);
                if !lo.is_zero() && !hi.is_zero() && lo.is_negative() != hi.is_negative() {
                    // collapse onto the axis
                    cur = CBox::new(cur.re.clone(), Interval::zero());
                    flag = Some(true);
                    break;
                }
                match interval::krawczyk_step(&monic, &dp, &cur) {
                    Some(k) => cur = k,
                    None => return Err(NfError::RootIsolationFailed),
                }
            }
            flag.ok_or(NfError::RootIsolationFailed)?
        };
        Ok(Field(Arc::new(FieldInner {
            min_poly: monic,
            root: cur,
            is_real,
            root_index: idx,
        })))
    }

    /// Isolating boxes for all roots, sorted by midpoint (re, then im).
    /// The order is reproducible, which makes root indices canonical.
    fn canonical_roots(min_poly: &QPoly) -> Result<Vec<CBox>, NfError> {
        let d = qpoly::deg(min_poly).ok_or(NfError::ZeroPolynomial)?;
        if d == 0 {
            return Err(NfError::ZeroPolynomial);
        }
        if d > 4 {
            return Err(NfError::DegreeOutOfRange(d));
        }
        let monic = qpoly::monic(min_poly);
        if !is_irreducible(&monic) {
            return Err(NfError::Reducible);
        }
        let mut boxes =
            interval::isolate_roots(&monic).map_err(|_| NfError::RootIsolationFailed)?;
        boxes.sort_by(|a, b| {
            let (ma, mb) = (a.mid(), b.mid());
            ma.re.cmp(&mb.re).then(ma.im.cmp(&mb.im))
        });
        Ok(boxes)
    }

    pub fn degree(&self) -> usize {
        self.0.min_poly.len() - 1
    }

    pub fn is_real(&self) -> bool {
        self.0.is_real
    }

    pub fn is_rationals(&self) -> bool {
        self.degree() == 1 && self.0.min_poly[0].is_zero()
    }

    pub fn min_poly(&self) -> &QPoly {
        &self.0.min_poly
    }

    pub fn root_box(&self) -> &CBox {
        &self.0.root
    }

    pub fn zero(&self) -> Elem {
        Elem {
            field: self.clone(),
            coeffs: vec![BigRational::zero(); self.degree()],
        }
    }

    pub fn one(&self) -> Elem {
        self.from_rational(BigRational::one())
    }

    pub fn from_rational(&self, q: BigRational) -> Elem {
        let mut coeffs = vec![BigRational::zero(); self.degree()];
        coeffs[0] = q;
        Elem { field: self.clone(), coeffs }
    }

    pub fn from_int(&self, n: i64) -> Elem {
        self.from_rational(rat::int(n))
    }

    /// theta, the image of x.
    pub fn gen(&self) -> Elem {
        let d = self.degree();
        if d == 1 {
            // x = a in Q[x]/(x - a)
            return self.from_rational(-self.0.min_poly[0].clone());
        }
        let mut coeffs = vec![BigRational::zero(); d];
        coeffs[1] = BigRational::one();
        Elem { field: self.clone(), coeffs }
    }

    pub fn elem(&self, coeffs: Vec<BigRational>) -> Elem {
        assert_eq!(coeffs.len(), self.degree(), "coefficient vector length");
        Elem { field: self.clone(), coeffs }
    }

    /// Field automorphisms as images of theta. Complete for degree <= 2;
    /// higher degrees report only the identity.
    pub fn automorphisms(&self) -> Vec<Elem> {
        let mut out = vec![self.gen()];
        if self.degree() == 2 {
            // other root of x^2 + bx + c is -b - theta
            let b = self.0.min_poly[1].clone();
            let other = self.from_rational(-b).sub(&self.gen());
            out.push(other);
        }
        out
    }

    /// Complex conjugation as a field map. Identity for real embeddings,
    /// theta -> -b - theta for nonreal quadratics, unsupported beyond.
    pub fn conjugation(&self) -> Result<Elem, NfError> {
        if self.0.is_real {
            return Ok(self.gen());
        }
        if self.degree() == 2 {
            let b = self.0.min_poly[1].clone();
            return Ok(self.from_rational(-b).sub(&self.gen()));
        }
        Err(NfError::NotConjugationClosed)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rationals() {
            return write!(f, "Q");
        }
        write!(f, "Q[t]/(")?;
        let mut first = true;
        for (i, c) in self.0.min_poly.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "{}*t", c)?,
                _ => write!(f, "{}*t^{}", c, i)?,
            }
        }
        write!(f, "), root {}", self.0.root_index)
    }
}

/// Element of a number field: rational coefficients of 1, theta, ...,
/// theta^(d-1).
#[derive(Clone, Debug)]
pub struct Elem {
    field: Field,
    coeffs: Vec<BigRational>,
}

impl PartialEq for Elem {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}
impl Eq for Elem {}

impl Elem {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    fn assert_same_field(&self, other: &Elem) {
        assert!(
            self.field == other.field,
            "field mismatch: {} vs {}",
            self.field,
            other.field
        );
    }

    pub fn add(&self, other: &Elem) -> Elem {
        self.assert_same_field(other);
        Elem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Elem) -> Elem {
        self.assert_same_field(other);
        Elem {
            field: self.field.clone(),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> Elem {
        Elem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }

    pub fn mul(&self, other: &Elem) -> Elem {
        self.assert_same_field(other);
        let prod = qpoly::mul(&self.coeffs, &other.coeffs);
        let (_, rem) = qpoly::divrem(&prod, self.field.min_poly());
        self.field.elem(pad(rem, self.field.degree()))
    }

    pub fn mul_rat(&self, c: &BigRational) -> Elem {
        Elem {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|x| x * c).collect(),
        }
    }

    pub fn inv(&self) -> Result<Elem, NfError> {
        if self.is_zero() {
            return Err(NfError::DivisionByZero);
        }
        // extended Euclid: u*self + v*p = 1
        let p = self.field.min_poly().clone();
        let a = qpoly::trim(self.coeffs.clone());
        let (mut r0, mut r1) = (p, a);
        let (mut s0, mut s1) = (Vec::new(), qpoly::one());
        while !qpoly::is_zero(&r1) {
            let (q, r) = qpoly::divrem(&r0, &r1);
            let s = qpoly::sub(&s0, &qpoly::mul(&q, &s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        // r0 is a nonzero constant (min_poly irreducible)
        debug_assert_eq!(qpoly::deg(&r0), Some(0));
        let scale = r0[0].clone().recip();
        let u = qpoly::scale(&s0, &scale);
        let (_, rem) = qpoly::divrem(&u, self.field.min_poly());
        Ok(self.field.elem(pad(rem, self.field.degree())))
    }

    pub fn div(&self, other: &Elem) -> Result<Elem, NfError> {
        Ok(self.mul(&other.inv()?))
    }

    pub fn pow(&self, mut e: u32) -> Elem {
        let mut base = self.clone();
        let mut acc = self.field.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Applies the field map sending theta to `image` (an element of the
    /// same field): substitution into the coefficient polynomial.
    pub fn map_gen(&self, image: &Elem) -> Elem {
        let mut acc = self.field.zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(image).add(&self.field.from_rational(c.clone()));
        }
        acc
    }

    /// Certified box for the designated embedding, width at most
    /// 2^(1 - bits).
    pub fn embed(&self, bits: u32) -> CBox {
        let target = rat::eps(bits.saturating_sub(1));
        let p = self.field.min_poly();
        let dp = qpoly::derivative(p);
        let mut root = self.field.root_box().clone();
        for _ in 0..10_000 {
            let val = eval_coeffs_on_box(&self.coeffs, &root);
            if val.width() <= target {
                return val;
            }
            match interval::krawczyk_step(p, &dp, &root) {
                Some(k) => root = k.round_out(bits + 64),
                None => {
                    // degenerate box (rational root); value is exact
                    return eval_coeffs_on_box(&self.coeffs, &root);
                }
            }
        }
        panic!("embedding refinement stalled");
    }

    /// Exact sign of a real-embedded element: -1, 0, or 1.
    pub fn sign(&self) -> Result<i32, NfError> {
        if !self.field.is_real() {
            return Err(NfError::NoRealEmbedding);
        }
        if self.is_zero() {
            return Ok(0);
        }
        let mut bits = 16;
        loop {
            let b = self.embed(bits);
            if b.re.lo.is_positive() {
                return Ok(1);
            }
            if b.re.hi.is_negative() {
                return Ok(-1);
            }
            bits += 32;
            // a nonzero algebraic number cannot be enclosed forever; the
            // coefficient vector is nonzero and min_poly is irreducible, so
            // the value is nonzero and the interval eventually clears zero
            assert!(bits < 4096, "sign determination stalled");
        }
    }

    pub fn promote(&self, target: &Field) -> Result<Elem, NfError> {
        if &self.field == target {
            return Ok(self.clone());
        }
        match self.to_rational() {
            Some(q) => Ok(target.from_rational(q)),
            None => Err(NfError::FieldMismatch),
        }
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})*t", c)?,
                _ => write!(f, "({})*t^{}", c, i)?,
            }
        }
        Ok(())
    }
}

fn pad(mut v: QPoly, d: usize) -> Vec<BigRational> {
    v.resize(d, BigRational::zero());
    v
}

fn eval_coeffs_on_box(coeffs: &[BigRational], root: &CBox) -> CBox {
    interval::eval_box(coeffs, root)
}

/// Splits elements of a conjugation-closed field into exact real and
/// imaginary parts living in a real field. Supported sources: any real
/// field (imaginary part zero), the rationals, and nonreal quadratics.
pub struct ComplexSplit {
    src: Field,
    real_field: Field,
    re_theta: Elem,
    im_theta: Elem,
}

impl ComplexSplit {
    pub fn new(src: &Field) -> Result<ComplexSplit, NfError> {
        if src.is_real() {
            return Ok(ComplexSplit {
                src: src.clone(),
                real_field: src.clone(),
                re_theta: src.gen(),
                im_theta: src.zero(),
            });
        }
        if src.degree() != 2 {
            return Err(NfError::NotConjugationClosed);
        }
        // theta = -b/2 +- i*sqrt(4c - b^2)/2
        let b = src.min_poly()[1].clone();
        let c = src.min_poly()[0].clone();
        let two = rat::int(2);
        let disc = rat::int(4) * &c - &b * &b; // positive: nonreal root
        debug_assert!(disc.is_positive());
        let re_part = -&b / &two;
        // sign of the imaginary part of the designated root
        let s = im_sign(src);
        if let Some(r) = exact_sqrt(&disc) {
            // imaginary part rational, the real picture stays over Q
            let rf = Field::rationals();
            Ok(ComplexSplit {
                src: src.clone(),
                real_field: rf.clone(),
                re_theta: rf.from_rational(re_part),
                im_theta: rf.from_rational(rat::int(s as i64) * r / two),
            })
        } else {
            // adjoin sqrt(disc) with the positive root
            let rf = Field::new(
                vec![-disc.clone(), BigRational::zero(), BigRational::one()],
                &CRat::new(rat::sqrt_upper(&disc), rat::int(0)),
            )?;
            let half_phi = rf.gen().mul_rat(&rat::rat(1, 2));
            Ok(ComplexSplit {
                src: src.clone(),
                real_field: rf.clone(),
                re_theta: rf.from_rational(re_part),
                im_theta: half_phi.mul_rat(&rat::int(s as i64)),
            })
        }
    }

    pub fn source(&self) -> &Field {
        &self.src
    }

    pub fn real_field(&self) -> &Field {
        &self.real_field
    }

    /// (re, im) of an element, both in the real field.
    pub fn split(&self, x: &Elem) -> (Elem, Elem) {
        assert!(x.field() == &self.src, "field mismatch in split");
        let mut re = self.real_field.zero();
        let mut im = self.real_field.zero();
        // powers of theta = (re_theta + i im_theta)^j, tracked exactly
        let mut pow_re = self.real_field.one();
        let mut pow_im = self.real_field.zero();
        for c in x.coeffs() {
            re = re.add(&pow_re.mul_rat(c));
            im = im.add(&pow_im.mul_rat(c));
            let next_re = pow_re.mul(&self.re_theta).sub(&pow_im.mul(&self.im_theta));
            let next_im = pow_re.mul(&self.im_theta).add(&pow_im.mul(&self.re_theta));
            pow_re = next_re;
            pow_im = next_im;
        }
        (re, im)
    }
}

/// Sign of the imaginary part of the designated root of a nonreal field.
fn im_sign(f: &Field) -> i32 {
    let p = f.min_poly();
    let dp = qpoly::derivative(p);
    let mut b = f.root_box().clone();
    for _ in 0..200 {
        if b.im.lo.is_positive() {
            return 1;
        }
        if b.im.hi.is_negative() {
            return -1;
        }
        match interval::krawczyk_step(p, &dp, &b) {
            Some(k) => b = k,
            None => break,
        }
    }
    panic!("nonreal root with undecidable imaginary sign");
}

/// Exact rational square root, if one exists.
pub fn exact_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    if x.is_zero() {
        return Some(BigRational::zero());
    }
    let n = x.numer().clone();
    let d = x.denom().clone();
    let sn = num_integer::Roots::sqrt(&n);
    let sd = num_integer::Roots::sqrt(&d);
    if &sn * &sn == n && &sd * &sd == d {
        Some(BigRational::new(sn, sd))
    } else {
        None
    }
}

/// Square root inside the field, when one exists. Complete for degrees 1
/// and 2; higher degrees return an error.
pub fn sqrt_in_field(d: &Elem) -> Result<Option<Elem>, NfError> {
    let f = d.field().clone();
    match f.degree() {
        1 => {
            let q = d.to_rational().unwrap();
            Ok(exact_sqrt(&q).map(|r| f.from_rational(r)))
        }
        2 => {
            let b = f.min_poly()[1].clone();
            let c = f.min_poly()[0].clone();
            let d0 = d.coeffs()[0].clone();
            let d1 = d.coeffs()[1].clone();
            // x = x0 + x1 theta, theta^2 = -c - b theta:
            //   x0^2 - c x1^2 = d0,   x1 (2 x0 - b x1) = d1
            if d1.is_zero() {
                // x1 = 0 branch
                if let Some(r) = exact_sqrt(&d0) {
                    return verify_sqrt(d, f.from_rational(r));
                }
                // x1 != 0, 2 x0 = b x1: x1^2 (b^2/4 - c) = d0
                let k = &b * &b / rat::int(4) - &c;
                if !k.is_zero() {
                    let y = &d0 / &k;
                    if let Some(x1) = exact_sqrt(&y) {
                        let x0 = &b * &x1 / rat::int(2);
                        let cand = f.elem(vec![x0, x1]);
                        return verify_sqrt(d, cand);
                    }
                }
                Ok(None)
            } else {
                // x1 != 0, x0 = (d1/x1 + b x1)/2; with y = x1^2:
                //   (b^2 - 4c) y^2 + (2 b d1 - 4 d0) y + d1^2 = 0
                let a2 = &b * &b - rat::int(4) * &c;
                let a1 = rat::int(2) * &b * &d1 - rat::int(4) * &d0;
                let a0 = &d1 * &d1;
                for y in rational_quadratic_roots(&a2, &a1, &a0) {
                    if y.is_positive() {
                        if let Some(x1) = exact_sqrt(&y) {
                            for x1s in [x1.clone(), -x1] {
                                if x1s.is_zero() {
                                    continue;
                                }
                                let x0 = (&d1 / &x1s + &b * &x1s) / rat::int(2);
                                let cand = f.elem(vec![x0, x1s.clone()]);
                                if cand.mul(&cand) == *d {
                                    return Ok(Some(cand));
                                }
                            }
                        }
                    }
                }
                Ok(None)
            }
        }
        _ => Err(NfError::SqrtUnsupportedDegree),
    }
}

fn verify_sqrt(d: &Elem, cand: Elem) -> Result<Option<Elem>, NfError> {
    if cand.mul(&cand) == *d {
        Ok(Some(cand))
    } else {
        Ok(None)
    }
}

/// Rational roots of a2 x^2 + a1 x + a0 (a2 may be zero).
pub fn rational_quadratic_roots(
    a2: &BigRational,
    a1: &BigRational,
    a0: &BigRational,
) -> Vec<BigRational> {
    if a2.is_zero() {
        if a1.is_zero() {
            return Vec::new();
        }
        return vec![-a0 / a1];
    }
    let disc = a1 * a1 - rat::int(4) * a2 * a0;
    match exact_sqrt(&disc) {
        Some(r) => {
            let two_a = rat::int(2) * a2;
            let r1 = (-a1 + &r) / &two_a;
            let r2 = (-a1 - &r) / &two_a;
            if r1 == r2 {
                vec![r1]
            } else {
                vec![r1, r2]
            }
        }
        None => Vec::new(),
    }
}

/// All rational roots of a rational polynomial, with multiplicity ignored.
pub fn rational_roots(p: &[BigRational]) -> Vec<BigRational> {
    let mut p = qpoly::trim(p.to_vec());
    let mut out = Vec::new();
    if qpoly::is_zero(&p) {
        return out;
    }
    while p[0].is_zero() {
        if !out.contains(&BigRational::zero()) {
            out.push(BigRational::zero());
        }
        p.remove(0);
        if p.is_empty() {
            return out;
        }
    }
    if qpoly::deg(&p) == Some(0) {
        return out;
    }
    // clear to a primitive integer polynomial
    let mut denom = BigInt::one();
    for c in &p {
        denom = num_integer::Integer::lcm(&denom, c.denom());
    }
    let ints: Vec<BigInt> = p
        .iter()
        .map(|c| (c * BigRational::from_integer(denom.clone())).to_integer())
        .collect();
    let a0 = ints[0].magnitude().clone();
    let ad = ints.last().unwrap().magnitude().clone();
    let num_divs = divisors(&a0);
    let den_divs = divisors(&ad);
    for n in &num_divs {
        for d in &den_divs {
            for sign in [1i64, -1] {
                let cand = BigRational::new(BigInt::from(sign) * BigInt::from(n.clone()), BigInt::from(d.clone()));
                if qpoly::eval(&p, &cand).is_zero() && !out.contains(&cand) {
                    out.push(cand);
                }
            }
        }
    }
    out.sort();
    out
}

fn divisors(n: &num_bigint::BigUint) -> Vec<num_bigint::BigUint> {
    use num_bigint::BigUint;
    let one = BigUint::from(1u32);
    if n.is_zero() {
        return vec![one];
    }
    let mut out = Vec::new();
    let mut i = one.clone();
    loop {
        if &(&i * &i) > n {
            break;
        }
        if (n % &i).is_zero() {
            out.push(i.clone());
            let j = n / &i;
            if j != i {
                out.push(j);
            }
        }
        i += 1u32;
    }
    out.sort();
    out
}

/// Monic irreducible factors over Q, with multiplicity as repetition.
/// Handles any rational roots, then residual degree up to four; larger
/// irreducible parts are out of range.
pub fn factor(p: &[BigRational]) -> Result<Vec<QPoly>, NfError> {
    if qpoly::is_zero(p) {
        return Err(NfError::ZeroPolynomial);
    }
    let mut rem = qpoly::monic(p);
    let mut out: Vec<QPoly> = Vec::new();
    loop {
        if qpoly::deg(&rem) == Some(0) || qpoly::deg(&rem).is_none() {
            return Ok(out);
        }
        let roots = rational_roots(&rem);
        let Some(r) = roots.first() else { break };
        let lin = vec![-r, BigRational::one()];
        let (q, s) = qpoly::divrem(&rem, &lin);
        debug_assert!(qpoly::is_zero(&s));
        out.push(lin);
        rem = q;
    }
    match qpoly::deg(&rem).unwrap() {
        0 => unreachable!(),
        1..=3 => {
            // no rational roots left, so degree 2 and 3 are irreducible
            out.push(rem);
            Ok(out)
        }
        4 => {
            match split_quartic(&rem) {
                Some((g1, g2)) => {
                    out.push(g1);
                    out.push(g2);
                }
                None => out.push(rem),
            }
            Ok(out)
        }
        d => Err(NfError::DegreeOutOfRange(d)),
    }
}

/// Split a monic quartic without rational roots into two rational monic
/// quadratics, if possible.
fn split_quartic(m: &QPoly) -> Option<(QPoly, QPoly)> {
    let a3 = m[3].clone();
    let shift = -&a3 / rat::int(4);
    let dep = compose_linear(m, &shift);
    let pq = dep[2].clone();
    let q = dep[1].clone();
    let r = dep[0].clone();
    let undepress = |f: &QPoly| compose_linear(f, &(-&shift));
    let verify = |f1: &QPoly, f2: &QPoly| qpoly::trim(qpoly::mul(f1, f2)) == *m;
    if q.is_zero() {
        // (t^2 + a)(t^2 + b) with a + b = p, a b = r
        let disc = &pq * &pq - rat::int(4) * &r;
        if let Some(s) = exact_sqrt(&disc) {
            let a = (&pq + &s) / rat::int(2);
            let b = (&pq - &s) / rat::int(2);
            let f1 = undepress(&vec![a, BigRational::zero(), BigRational::one()]);
            let f2 = undepress(&vec![b, BigRational::zero(), BigRational::one()]);
            if verify(&f1, &f2) {
                return Some((f1, f2));
            }
        }
    }
    let res = vec![
        -&q * &q,
        &pq * &pq - rat::int(4) * &r,
        rat::int(2) * &pq,
        BigRational::one(),
    ];
    for z in rational_roots(&res) {
        if !z.is_positive() {
            continue;
        }
        let Some(u) = exact_sqrt(&z) else { continue };
        // (t^2 + u t + v)(t^2 - u t + w)
        let v = (&pq + &z - &q / &u) / rat::int(2);
        let w = (&pq + &z + &q / &u) / rat::int(2);
        let f1 = undepress(&vec![v, u.clone(), BigRational::one()]);
        let f2 = undepress(&vec![w, -&u, BigRational::one()]);
        if verify(&f1, &f2) {
            return Some((f1, f2));
        }
    }
    None
}

/// Irreducibility over Q for degrees 1..=4: rational root test plus, for
/// quartics, the two-quadratics criterion via the resolvent cubic.
pub fn is_irreducible(p: &[BigRational]) -> bool {
    let d = match qpoly::deg(p) {
        None | Some(0) => return false,
        Some(d) => d,
    };
    if d == 1 {
        return true;
    }
    if !rational_roots(p).is_empty() {
        return false;
    }
    if d <= 3 {
        // reducible quadratic or cubic has a linear factor
        return true;
    }
    if d == 4 {
        let m = qpoly::monic(p);
        // depress: x -> x - a3/4
        let a3 = m[3].clone();
        let shift = -&a3 / rat::int(4);
        let dep = compose_linear(&m, &shift);
        let pq = dep[2].clone();
        let q = dep[1].clone();
        let r = dep[0].clone();
        // u = 0 split: x^4 + p x^2 + r = (x^2+v)(x^2+w) needs q = 0 and
        // p^2 - 4r a square
        if q.is_zero() {
            let disc = &pq * &pq - rat::int(4) * &r;
            if exact_sqrt(&disc).is_some() {
                return false;
            }
        }
        // u != 0 split: z = u^2 is a positive rational square root of
        // z^3 + 2p z^2 + (p^2 - 4r) z - q^2
        let res = vec![
            -&q * &q,
            &pq * &pq - rat::int(4) * &r,
            rat::int(2) * &pq,
            BigRational::one(),
        ];
        for z in rational_roots(&res) {
            if z.is_positive() && exact_sqrt(&z).is_some() {
                return false;
            }
        }
        return true;
    }
    false
}

/// p(x + shift), used to depress quartics.
fn compose_linear(p: &[BigRational], shift: &BigRational) -> QPoly {
    let mut acc: QPoly = Vec::new();
    let lin = vec![shift.clone(), BigRational::one()];
    for c in p.iter().rev() {
        acc = qpoly::mul(&acc, &lin);
        acc = qpoly::add(&acc, &[c.clone()]);
    }
    qpoly::trim(acc)
}

/// The Q-coefficient vectors of a K-vector: v = sum_j v_j theta^j with
/// v_j rational vectors. A Q-linear functional kills v iff it kills every
/// v_j, which is what lattice saturation consumes.
pub fn rational_coefficient_vectors(v: &[Elem]) -> Vec<Vec<BigRational>> {
    if v.is_empty() {
        return Vec::new();
    }
    let d = v[0].field().degree();
    let mut out = vec![Vec::with_capacity(v.len()); d];
    for x in v {
        assert!(x.field().degree() == d, "mixed degrees");
        for (j, slot) in out.iter_mut().enumerate() {
            slot.push(x.coeffs()[j].clone());
        }
    }
    out
}

/// Reassemble from coefficient vectors: inverse of the decomposition.
pub fn from_coefficient_vectors(field: &Field, vs: &[Vec<BigRational>]) -> Vec<Elem> {
    let d = field.degree();
    assert_eq!(vs.len(), d);
    let n = vs[0].len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let coeffs: Vec<BigRational> = (0..d).map(|j| vs[j][i].clone()).collect();
        out.push(field.elem(coeffs));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    #[test]
    fn gaussian_arithmetic() {
        let f = Field::gaussian();
        let i = f.gen();
        assert_eq!(i.mul(&i), f.from_int(-1));
        let z = f.elem(vec![int(3), int(2)]); // 3 + 2i
        let w = f.elem(vec![int(1), int(-1)]); // 1 - i
        let prod = z.mul(&w); // 5 - i
        assert_eq!(prod, f.elem(vec![int(5), int(-1)]));
        let q = prod.div(&w).unwrap();
        assert_eq!(q, z);
    }

    #[test]
    fn inverse_in_quartic_field() {
        // Q[t]/(t^4 + 1)
        let f = Field::new(
            vec![int(1), int(0), int(0), int(0), int(1)],
            &CRat::new(rat(7, 10), rat(7, 10)),
        )
        .unwrap();
        let x = f.elem(vec![int(1), int(2), int(0), int(-1)]);
        let y = x.inv().unwrap();
        assert!(x.mul(&y).is_one());
    }

    #[test]
    fn embeds_i_to_tight_box() {
        let f = Field::gaussian();
        let b = f.gen().embed(53);
        assert!(b.width() <= rat::eps(52));
        assert!(b.re.contains_zero() || b.re.width() <= rat::eps(52));
        assert!(b.im.contains(&int(1)));
    }

    #[test]
    fn embeds_sqrt2() {
        let f = Field::sqrt2();
        let b = f.gen().embed(53);
        assert!(b.is_real_axis() || b.im.contains_zero());
        assert!(&b.re.lo * &b.re.lo <= int(2));
        assert!(&b.re.hi * &b.re.hi >= int(2));
        assert_eq!(f.gen().sign().unwrap(), 1);
    }

    #[test]
    fn embed_zero_degenerate() {
        let f = Field::rationals();
        let b = f.zero().embed(80);
        assert!(b.width().is_zero());
        assert!(b.contains_zero());
    }

    #[test]
    fn embedding_respects_arithmetic() {
        let f = Field::sqrt2();
        let a = f.elem(vec![rat(1, 3), int(2)]);
        let b = f.elem(vec![int(-1), rat(5, 7)]);
        let prod_box = a.mul(&b).embed(40);
        let box_prod = a.embed(60).mul(&b.embed(60));
        // the product of enclosures encloses the embedded product
        assert!(box_prod.re.lo <= prod_box.re.hi && prod_box.re.lo <= box_prod.re.hi);
        let exact_mid = a.mul(&b);
        let wide = exact_mid.embed(20);
        assert!(wide.re.intersect(&box_prod.re).is_some());
    }

    #[test]
    fn irreducibility_checks() {
        // x^2 - 1 reducible
        assert!(!is_irreducible(&[int(-1), int(0), int(1)]));
        // x^2 - 2
        assert!(is_irreducible(&[int(-2), int(0), int(1)]));
        // x^4 + 1
        assert!(is_irreducible(&[int(1), int(0), int(0), int(0), int(1)]));
        // x^4 + 4 = (x^2-2x+2)(x^2+2x+2)
        assert!(!is_irreducible(&[int(4), int(0), int(0), int(0), int(1)]));
        // x^4 - 4 = (x^2-2)(x^2+2)
        assert!(!is_irreducible(&[int(-4), int(0), int(0), int(0), int(1)]));
        // x^3 - 2
        assert!(is_irreducible(&[int(-2), int(0), int(0), int(1)]));
        // x^3 - x - 6 has root 2? 8 - 2 - 6 = 0 yes
        assert!(!is_irreducible(&[int(-6), int(-1), int(0), int(1)]));
    }

    #[test]
    fn factor_splits_and_multiplicities() {
        let check = |p: &QPoly| {
            let fs = factor(p).unwrap();
            let mut prod = vec![BigRational::one()];
            for f in &fs {
                assert!(is_irreducible(f), "factor {:?} not irreducible", f);
                assert_eq!(f.last().unwrap(), &BigRational::one());
                prod = qpoly::mul(&prod, f);
            }
            assert_eq!(qpoly::trim(prod), qpoly::monic(p));
            fs
        };
        // x^3 - 1 = (x - 1)(x^2 + x + 1)
        let fs = check(&vec![int(-1), int(0), int(0), int(1)]);
        assert_eq!(fs.len(), 2);
        // (x^2 + 1)^2, repeated quadratic
        let fs = check(&vec![int(1), int(0), int(2), int(0), int(1)]);
        assert_eq!(fs.len(), 2);
        assert_eq!(fs[0], fs[1]);
        // x^4 + 4 splits only through the resolvent cubic
        let fs = check(&vec![int(4), int(0), int(0), int(0), int(1)]);
        assert_eq!(fs.len(), 2);
        assert!(fs.iter().all(|f| qpoly::deg(f) == Some(2)));
        // x^4 - 2 stays whole
        let fs = check(&vec![int(-2), int(0), int(0), int(0), int(1)]);
        assert_eq!(fs.len(), 1);
        // non-monic input with mixed factors: 3(x - 2)^2 (x^2 - 2)
        let sq = qpoly::mul(&[int(-2), int(1)], &[int(-2), int(1)]);
        let p = qpoly::scale(&qpoly::mul(&sq, &[int(-2), int(0), int(1)]), &int(3));
        let fs = check(&p);
        assert_eq!(fs.len(), 3);
        assert_eq!(fs.iter().filter(|f| qpoly::deg(f) == Some(1)).count(), 2);
        // degree five with no rational roots is out of range
        assert!(matches!(
            factor(&vec![int(-2), int(0), int(0), int(0), int(0), int(1)]),
            Err(NfError::DegreeOutOfRange(5))
        ));
    }

    #[test]
    fn rational_roots_found() {
        // (x - 2)(x + 1/3)(x^2 + 1) cleared: roots 2, -1/3
        let p = qpoly::mul(
            &qpoly::mul(&[int(-2), int(1)], &[rat(1, 3), int(1)]),
            &[int(1), int(0), int(1)],
        );
        let roots = rational_roots(&p);
        assert_eq!(roots, vec![rat(-1, 3), int(2)]);
    }

    #[test]
    fn conjugation_on_gaussian() {
        let f = Field::gaussian();
        let conj_theta = f.conjugation().unwrap();
        let z = f.elem(vec![int(3), int(2)]);
        let zbar = z.map_gen(&conj_theta);
        assert_eq!(zbar, f.elem(vec![int(3), int(-2)]));
    }

    #[test]
    fn complex_split_gaussian() {
        let f = Field::gaussian();
        let split = ComplexSplit::new(&f).unwrap();
        assert!(split.real_field().is_rationals());
        let z = f.elem(vec![rat(1, 2), int(-3)]);
        let (re, im) = split.split(&z);
        assert_eq!(re.to_rational().unwrap(), rat(1, 2));
        assert_eq!(im.to_rational().unwrap(), int(-3));
    }

    #[test]
    fn complex_split_eisenstein() {
        // Q[t]/(t^2 + t + 1), designated root with positive imaginary part
        let f = Field::new(
            vec![int(1), int(1), int(1)],
            &CRat::new(rat(-1, 2), rat(87, 100)),
        )
        .unwrap();
        let split = ComplexSplit::new(&f).unwrap();
        // real picture over Q(sqrt(3))
        assert_eq!(split.real_field().degree(), 2);
        let (re, im) = split.split(&f.gen());
        assert_eq!(re.to_rational().unwrap(), rat(-1, 2));
        // im = sqrt(3)/2: check square
        let sq = im.mul(&im);
        assert_eq!(sq.to_rational().unwrap(), rat(3, 4));
        assert_eq!(im.sign().unwrap(), 1);
    }

    #[test]
    fn sqrt_in_gaussian() {
        let f = Field::gaussian();
        // sqrt(2i) = 1 + i
        let d = f.elem(vec![int(0), int(2)]);
        let s = sqrt_in_field(&d).unwrap().unwrap();
        assert_eq!(s.mul(&s), d);
        // sqrt(3i) does not exist in Q(i)
        let d3 = f.elem(vec![int(0), int(3)]);
        assert!(sqrt_in_field(&d3).unwrap().is_none());
        // sqrt(-1) = i or -i
        let m1 = f.from_int(-1);
        let s2 = sqrt_in_field(&m1).unwrap().unwrap();
        assert_eq!(s2.mul(&s2), m1);
    }

    #[test]
    fn sqrt_in_sqrt2_field() {
        let f = Field::sqrt2();
        // sqrt(2) = theta: solve x^2 = 2
        let two = f.from_int(2);
        let s = sqrt_in_field(&two).unwrap().unwrap();
        assert_eq!(s.mul(&s), two);
        // sqrt(3 + 2 sqrt(2)) = 1 + sqrt(2)
        let d = f.elem(vec![int(3), int(2)]);
        let s2 = sqrt_in_field(&d).unwrap().unwrap();
        assert_eq!(s2.mul(&s2), d);
        // sqrt(3) not in the field
        assert!(sqrt_in_field(&f.from_int(3)).unwrap().is_none());
    }

    #[test]
    fn coefficient_vectors_roundtrip() {
        let f = Field::sqrt2();
        let v = vec![
            f.elem(vec![int(1), int(2)]),
            f.elem(vec![rat(1, 2), int(0)]),
            f.elem(vec![int(0), rat(-3, 4)]),
        ];
        let vs = rational_coefficient_vectors(&v);
        assert_eq!(vs.len(), 2);
        let back = from_coefficient_vectors(&f, &vs);
        assert_eq!(back, v);
    }

    #[test]
    fn field_equality_distinguishes_embeddings() {
        let p = vec![int(-2), int(0), int(1)];
        let fields = Field::all_embeddings(&p).unwrap();
        assert_eq!(fields.len(), 2);
        assert!(fields[0] != fields[1]);
        let pos = Field::sqrt2();
        assert!(fields.iter().filter(|f| **f == pos).count() == 1);
    }

    #[test]
    fn automorphism_fixes_rationals_and_swaps_roots() {
        let f = Field::sqrt2();
        let autos = f.automorphisms();
        assert_eq!(autos.len(), 2);
        let x = f.elem(vec![int(3), int(5)]); // 3 + 5 sqrt2
        let y = x.map_gen(&autos[1]);
        assert_eq!(y, f.elem(vec![int(3), int(-5)]));
        // conjugate of conjugate
        assert_eq!(y.map_gen(&autos[1]), x);
    }

    #[test]
    fn degree_five_rejected() {
        let mut p = vec![int(0); 6];
        p[0] = int(-2);
        p[5] = int(1);
        assert!(matches!(
            Field::new(p, &CRat::new(int(1), int(0))),
            Err(NfError::DegreeOutOfRange(5))
        ));
    }

    #[test]
    fn reducible_rejected() {
        assert!(matches!(
            Field::new(vec![int(-1), int(0), int(1)], &CRat::new(int(1), int(0))),
            Err(NfError::Reducible)
        ));
    }
}
