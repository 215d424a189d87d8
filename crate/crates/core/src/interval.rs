//! Rational interval arithmetic, complex boxes, and certified root
//! isolation for rational polynomials.
//!
//! Isolation runs in two stages: a plain f64 Durand-Kerner pass guesses
//! the roots, then a Krawczyk operator over exact rational boxes certifies
//! existence and uniqueness. Refinement rounds endpoints outward to dyadic
//! rationals so denominators stay bounded.

use crate::qpoly;
use crate::rat;
use alloc::vec::Vec;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: BigRational,
    pub hi: BigRational,
}

impl Interval {
    pub fn new(lo: BigRational, hi: BigRational) -> Self {
        assert!(lo <= hi, "inverted interval");
        Interval { lo, hi }
    }

    pub fn point(x: BigRational) -> Self {
        Interval { lo: x.clone(), hi: x }
    }

    pub fn zero() -> Self {
        Interval::point(BigRational::zero())
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn mid(&self) -> BigRational {
        (&self.lo + &self.hi) / BigRational::from_integer(2.into())
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn subset_of_interior(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = if self.lo > other.lo { self.lo.clone() } else { other.lo.clone() };
        let hi = if self.hi < other.hi { self.hi.clone() } else { other.hi.clone() };
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    pub fn add(&self, other: &Interval) -> Interval {
        Interval { lo: &self.lo + &other.lo, hi: &self.hi + &other.hi }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let c = [
            &self.lo * &other.lo,
            &self.lo * &other.hi,
            &self.hi * &other.lo,
            &self.hi * &other.hi,
        ];
        let mut lo = c[0].clone();
        let mut hi = c[0].clone();
        for x in &c[1..] {
            if *x < lo {
                lo = x.clone();
            }
            if *x > hi {
                hi = x.clone();
            }
        }
        Interval { lo, hi }
    }

    pub fn square(&self) -> Interval {
        if self.contains_zero() {
            let a = self.lo.abs();
            let b = self.hi.abs();
            let m = if a > b { a } else { b };
            Interval { lo: BigRational::zero(), hi: &m * &m }
        } else {
            self.mul(self)
        }
    }

    /// Reciprocal; interval must not contain zero.
    pub fn recip(&self) -> Interval {
        assert!(!self.contains_zero(), "interval reciprocal across zero");
        Interval { lo: self.hi.clone().recip(), hi: self.lo.clone().recip() }
    }

    pub fn div(&self, other: &Interval) -> Interval {
        self.mul(&other.recip())
    }

    /// Rounds endpoints outward onto the 2^-bits grid.
    pub fn round_out(&self, bits: u32) -> Interval {
        Interval {
            lo: rat::round_dyadic(&self.lo, bits, false),
            hi: rat::round_dyadic(&self.hi, bits, true),
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: if self.lo < other.lo { self.lo.clone() } else { other.lo.clone() },
            hi: if self.hi > other.hi { self.hi.clone() } else { other.hi.clone() },
        }
    }

    pub fn disjoint(&self, other: &Interval) -> bool {
        self.hi < other.lo || other.hi < self.lo
    }
}

/// Exact complex rational, the midpoint type for boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct CRat {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRat {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRat { re, im }
    }

    pub fn zero() -> Self {
        CRat::new(BigRational::zero(), BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &CRat) -> CRat {
        CRat::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &CRat) -> CRat {
        CRat::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn mul(&self, o: &CRat) -> CRat {
        CRat::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn norm_sq(&self) -> BigRational {
        &self.re * &self.re + &self.im * &self.im
    }

    pub fn recip(&self) -> CRat {
        let n = self.norm_sq();
        assert!(!n.is_zero(), "division by zero");
        CRat::new(&self.re / &n, -&self.im / &n)
    }

    pub fn div(&self, o: &CRat) -> CRat {
        self.mul(&o.recip())
    }
}

/// Axis-aligned complex box with rational endpoints.
#[derive(Clone, Debug, PartialEq)]
pub struct CBox {
    pub re: Interval,
    pub im: Interval,
}

impl CBox {
    pub fn new(re: Interval, im: Interval) -> Self {
        CBox { re, im }
    }

    pub fn point(z: &CRat) -> Self {
        CBox { re: Interval::point(z.re.clone()), im: Interval::point(z.im.clone()) }
    }

    /// Square box of half-width r around z.
    pub fn around(z: &CRat, r: &BigRational) -> Self {
        CBox {
            re: Interval::new(&z.re - r, &z.re + r),
            im: Interval::new(&z.im - r, &z.im + r),
        }
    }

    pub fn mid(&self) -> CRat {
        CRat::new(self.re.mid(), self.im.mid())
    }

    pub fn width(&self) -> BigRational {
        let a = self.re.width();
        let b = self.im.width();
        if a > b { a } else { b }
    }

    pub fn add(&self, o: &CBox) -> CBox {
        CBox::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &CBox) -> CBox {
        CBox::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn mul(&self, o: &CBox) -> CBox {
        CBox::new(
            self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        )
    }

    pub fn div(&self, o: &CBox) -> CBox {
        let n = o.re.square().add(&o.im.square());
        let num = self.mul(&CBox::new(o.re.clone(), o.im.neg()));
        CBox::new(num.re.div(&n), num.im.div(&n))
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn contains(&self, z: &CRat) -> bool {
        self.re.contains(&z.re) && self.im.contains(&z.im)
    }

    pub fn subset_of_interior(&self, o: &CBox) -> bool {
        self.re.subset_of_interior(&o.re) && self.im.subset_of_interior(&o.im)
    }

    pub fn intersect(&self, o: &CBox) -> Option<CBox> {
        Some(CBox::new(self.re.intersect(&o.re)?, self.im.intersect(&o.im)?))
    }

    pub fn round_out(&self, bits: u32) -> CBox {
        CBox::new(self.re.round_out(bits), self.im.round_out(bits))
    }

    pub fn disjoint(&self, o: &CBox) -> bool {
        self.re.disjoint(&o.re) || self.im.disjoint(&o.im)
    }

    pub fn is_real_axis(&self) -> bool {
        self.im.lo.is_zero() && self.im.hi.is_zero()
    }
}

pub fn eval_box(p: &[BigRational], z: &CBox) -> CBox {
    let mut acc = CBox::point(&CRat::zero());
    for c in p.iter().rev() {
        acc = acc.mul(z).add(&CBox::new(
            Interval::point(c.clone()),
            Interval::zero(),
        ));
    }
    acc
}

pub fn eval_crat(p: &[BigRational], z: &CRat) -> CRat {
    let mut acc = CRat::zero();
    for c in p.iter().rev() {
        acc = acc.mul(z).add(&CRat::new(c.clone(), BigRational::zero()));
    }
    acc
}

/// One Krawczyk step for p on box B. Returns the contracted box if the
/// operator certifies a unique root inside B, otherwise None.
///
/// K(B) = m - p(m)/c + (1 - p'(B)/c) (B - m), c = p'(m).
/// K(B) strictly inside B proves existence and uniqueness.
pub fn krawczyk_step(p: &[BigRational], dp: &[BigRational], b: &CBox) -> Option<CBox> {
    let m = b.mid();
    let c = eval_crat(dp, &m);
    if c.is_zero() {
        return None;
    }
    let pm = eval_crat(p, &m);
    let dpb = eval_box(dp, b);
    let cbox = CBox::point(&c);
    let one = CBox::point(&CRat::new(BigRational::one(), BigRational::zero()));
    let factor = one.sub(&dpb.div(&cbox));
    let k = CBox::point(&m.sub(&pm.div(&c))).add(&factor.mul(&b.sub(&CBox::point(&m))));
    // on a degenerate axis the enclosure is exact, equality suffices there
    let ok_axis = |ka: &Interval, ba: &Interval| {
        ka.subset_of_interior(ba) || (ba.width().is_zero() && ka == ba)
    };
    if ok_axis(&k.re, &b.re) && ok_axis(&k.im, &b.im) {
        k.intersect(b)
    } else {
        None
    }
}

/// Certified refinement: shrink a box already known (via Krawczyk) to
/// isolate one root until its width is at most 2^(1-bits).
pub fn refine(p: &[BigRational], b: &CBox, bits: u32) -> CBox {
    let dp = qpoly::derivative(p);
    let target = rat::eps(bits - 1);
    let mut cur = b.clone();
    let mut guard = 0usize;
    while cur.width() > target {
        guard += 1;
        assert!(guard < 10_000, "refinement stalled");
        match krawczyk_step(p, &dp, &cur) {
            Some(next) => {
                // outward dyadic rounding keeps endpoint sizes bounded;
                // extra guard bits so rounding cannot undo the contraction
                let rounded = next.round_out(bits + 32);
                cur = rounded.intersect(&cur).unwrap_or(next);
            }
            None => {
                // bisect on the wider axis and keep the half that still
                // certifies; both failing means the box was not isolating
                let (a, c) = bisect(&cur);
                let da = krawczyk_step(p, &dp, &a);
                let dc = krawczyk_step(p, &dp, &c);
                cur = match (da, dc) {
                    (Some(x), None) => x,
                    (None, Some(y)) => y,
                    (Some(x), Some(_)) => x,
                    (None, None) => panic!("refinement lost certification"),
                };
            }
        }
    }
    cur
}

fn bisect(b: &CBox) -> (CBox, CBox) {
    if b.re.width() >= b.im.width() {
        let m = b.re.mid();
        (
            CBox::new(Interval::new(b.re.lo.clone(), m.clone()), b.im.clone()),
            CBox::new(Interval::new(m, b.re.hi.clone()), b.im.clone()),
        )
    } else {
        let m = b.im.mid();
        (
            CBox::new(b.re.clone(), Interval::new(b.im.lo.clone(), m.clone())),
            CBox::new(b.re.clone(), Interval::new(m, b.im.hi.clone())),
        )
    }
}

// f64 complex helpers for Durand-Kerner seeding. Never trusted: every
// output is certified exactly afterwards.
#[derive(Clone, Copy, Debug)]
struct C64 {
    re: f64,
    im: f64,
}

impl C64 {
    fn new(re: f64, im: f64) -> Self {
        C64 { re, im }
    }
    fn add(self, o: C64) -> C64 {
        C64::new(self.re + o.re, self.im + o.im)
    }
    fn sub(self, o: C64) -> C64 {
        C64::new(self.re - o.re, self.im - o.im)
    }
    fn mul(self, o: C64) -> C64 {
        C64::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
    fn div(self, o: C64) -> C64 {
        let n = o.re * o.re + o.im * o.im;
        C64::new(
            (self.re * o.re + self.im * o.im) / n,
            (self.im * o.re - self.re * o.im) / n,
        )
    }
    fn norm_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }
}

fn eval_c64(p: &[f64], z: C64) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        acc = acc.mul(z).add(C64::new(c, 0.0));
    }
    acc
}

/// Durand-Kerner root approximations for a squarefree rational polynomial.
fn durand_kerner(p: &[BigRational]) -> Vec<CRat> {
    let d = qpoly::deg(p).expect("constant polynomial has no roots");
    if d == 0 {
        return Vec::new();
    }
    let lead = rat::to_f64(&p[d]);
    let pf: Vec<f64> = p.iter().map(|c| rat::to_f64(c) / lead).collect();
    let mut roots: Vec<C64> = Vec::with_capacity(d);
    let seed = C64::new(0.4, 0.9);
    let mut acc = C64::new(1.0, 0.0);
    for _ in 0..d {
        acc = acc.mul(seed);
        roots.push(acc);
    }
    for _ in 0..600 {
        let mut max_step = 0.0f64;
        for i in 0..d {
            let mut denom = C64::new(1.0, 0.0);
            for j in 0..d {
                if i != j {
                    denom = denom.mul(roots[i].sub(roots[j]));
                }
            }
            let step = eval_c64(&pf, roots[i]).div(denom);
            roots[i] = roots[i].sub(step);
            if step.norm_sq() > max_step {
                max_step = step.norm_sq();
            }
        }
        if max_step < 1e-28 {
            break;
        }
    }
    roots
        .iter()
        .map(|z| {
            CRat::new(
                approx_rational(z.re),
                approx_rational(z.im),
            )
        })
        .collect()
}

fn approx_rational(x: f64) -> BigRational {
    // snap to the 2^40 grid; accuracy only affects how much certification
    // has to widen the initial boxes
    let scaled = x * (1u64 << 40) as f64;
    if !scaled.is_finite() {
        return BigRational::zero();
    }
    let n = scaled as i64;
    BigRational::new(n.into(), num_bigint::BigInt::from(1u64 << 40))
}

/// Isolates every complex root of a squarefree rational polynomial into
/// pairwise disjoint certified boxes. Panics if the polynomial is not
/// squarefree; returns an error string if certification fails outright.
pub fn isolate_roots(p: &[BigRational]) -> Result<Vec<CBox>, &'static str> {
    let d = qpoly::deg(p).ok_or("zero polynomial")?;
    if d == 0 {
        return Ok(Vec::new());
    }
    assert!(qpoly::is_squarefree(p), "root isolation requires squarefree input");
    let dp = qpoly::derivative(p);
    let approx = durand_kerner(p);
    // initial half-width: a third of the smallest approximate separation
    let mut min_sep: Option<BigRational> = None;
    for i in 0..approx.len() {
        for j in (i + 1)..approx.len() {
            let s = approx[i].sub(&approx[j]).norm_sq();
            if min_sep.as_ref().map(|m| &s < m).unwrap_or(true) {
                min_sep = Some(s);
            }
        }
    }
    let base = match min_sep {
        Some(s) => {
            let r = rat::sqrt_upper(&s) / BigRational::from_integer(4.into());
            if r.is_zero() { rat::eps(20) } else { r }
        }
        None => BigRational::one(),
    };
    let mut boxes: Vec<CBox> = Vec::with_capacity(d);
    for z in &approx {
        let mut ok = None;
        let mut r = base.clone();
        // try a few widths around the seed; Krawczyk certifies or we give up
        for _ in 0..60 {
            let b = CBox::around(z, &r);
            if let Some(k) = krawczyk_step(p, &dp, &b) {
                ok = Some(k);
                break;
            }
            r /= BigRational::from_integer(2.into());
            if r < rat::eps(96) {
                break;
            }
        }
        let k = ok.ok_or("krawczyk certification failed")?;
        boxes.push(k);
    }
    // shrink until pairwise disjoint
    let mut guard = 0;
    loop {
        let mut overlap = false;
        'outer: for i in 0..boxes.len() {
            for j in (i + 1)..boxes.len() {
                if !boxes[i].disjoint(&boxes[j]) {
                    overlap = true;
                    break 'outer;
                }
            }
        }
        if !overlap {
            break;
        }
        guard += 1;
        if guard > 200 {
            return Err("could not separate root boxes");
        }
        for b in boxes.iter_mut() {
            if let Some(k) = krawczyk_step(p, &dp, b) {
                *b = k;
            }
        }
    }
    Ok(boxes)
}

/// Real roots only, as intervals, sorted increasing. Complex pairs are
/// discarded by the exact disjointness of their boxes from the real axis.
pub fn isolate_real_roots(p: &[BigRational]) -> Result<Vec<Interval>, &'static str> {
    let boxes = isolate_roots(p)?;
    let mut out: Vec<Interval> = Vec::new();
    for b in boxes {
        if b.im.contains_zero() {
            // root is real iff conjugate-closed box count works out; a box
            // containing the axis with nonreal root would have a mirror
            // partner, so certify by sign change or Krawczyk on the axis
            let lo = qpoly::eval(p, &b.re.lo);
            let hi = qpoly::eval(p, &b.re.hi);
            if lo.is_zero() || hi.is_zero() || (lo.is_negative() != hi.is_negative()) {
                out.push(b.re.clone());
            } else {
                // even multiplicity impossible (squarefree); box straddles
                // axis but holds a nonreal root
                continue;
            }
        }
    }
    out.sort_by(|a, b| a.lo.cmp(&b.lo));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::{int, rat};

    fn p(coeffs: &[i64]) -> qpoly::QPoly {
        coeffs.iter().map(|&c| int(c)).collect()
    }

    #[test]
    fn interval_mul_signs() {
        let a = Interval::new(rat(-1, 1), rat(2, 1));
        let b = Interval::new(rat(-3, 1), rat(1, 2));
        let m = a.mul(&b);
        assert_eq!(m.lo, rat(-6, 1));
        assert_eq!(m.hi, rat(3, 1));
    }

    #[test]
    fn box_division_contains_quotient() {
        let z = CBox::around(&CRat::new(rat(3, 1), rat(1, 1)), &rat(1, 100));
        let w = CBox::around(&CRat::new(rat(1, 1), rat(-2, 1)), &rat(1, 100));
        let q = z.div(&w);
        let exact = CRat::new(rat(3, 1), rat(1, 1)).div(&CRat::new(rat(1, 1), rat(-2, 1)));
        assert!(q.contains(&exact));
    }

    #[test]
    fn isolates_roots_of_x2_minus_2() {
        let boxes = isolate_roots(&p(&[-2, 0, 1])).unwrap();
        assert_eq!(boxes.len(), 2);
        let reals = isolate_real_roots(&p(&[-2, 0, 1])).unwrap();
        assert_eq!(reals.len(), 2);
        assert!(reals[0].lo < rat(-7, 5) && reals[0].hi > rat(-3, 2));
        assert!(reals[1].contains(&rat(141421356, 100000000)) || reals[1].lo > rat(7, 5));
    }

    #[test]
    fn isolates_complex_pair() {
        // x^2 + 1
        let boxes = isolate_roots(&p(&[1, 0, 1])).unwrap();
        assert_eq!(boxes.len(), 2);
        assert!(isolate_real_roots(&p(&[1, 0, 1])).unwrap().is_empty());
        let has_i = boxes.iter().any(|b| b.contains(&CRat::new(int(0), int(1))));
        let has_minus_i = boxes.iter().any(|b| b.contains(&CRat::new(int(0), int(-1))));
        assert!(has_i && has_minus_i);
    }

    #[test]
    fn refine_sqrt2_to_60_bits() {
        let poly = p(&[-2, 0, 1]);
        let reals = isolate_real_roots(&poly).unwrap();
        let pos = reals.iter().find(|b| b.hi.is_positive()).unwrap();
        let b = refine(&poly, &CBox::new(pos.clone(), Interval::zero()), 60);
        assert!(b.width() <= rat::eps(59));
        // box brackets sqrt(2): lo^2 <= 2 <= hi^2
        assert!(&b.re.lo * &b.re.lo <= int(2));
        assert!(&b.re.hi * &b.re.hi >= int(2));
    }

    #[test]
    fn quartic_root_count() {
        // x^4 + 1, four primitive eighth roots of unity
        let boxes = isolate_roots(&p(&[1, 0, 0, 0, 1])).unwrap();
        assert_eq!(boxes.len(), 4);
        for i in 0..4 {
            for j in (i + 1)..4 {
                assert!(boxes[i].disjoint(&boxes[j]));
            }
        }
    }
}
