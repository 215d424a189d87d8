//! Numerical checks in the quotient torus: folding points, certified
//! distances to closure components, attraction of far variety points to
//! the predicted components, and density of line orbits.
//!
//! Distances are global minima over the lattice, found by enumerating a
//! window around the real minimizer whose radius is certified from exact
//! norm bounds. Scalars stay exact; square roots are the only place a
//! rational bracket replaces the true value.

use crate::asymptotics::Realifier;
use crate::closure::{BaseSet, ClosureComponent, ClosureDescription};
use crate::interval::CRat;
use crate::lattice::{hnf, integral_span_basis, rat_mat_apply, saturate, Lattice};
use crate::linalg::{dot, LinError, Matrix, Mode, Subspace};
use crate::numberfield::{Elem, Field, NfError};
use crate::puiseux::BranchFamily;
use crate::rat;
use crate::rng::Sampler;
use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VerifyError {
    AmbientMismatch,
    /// Folding and distance need real scalars; the real picture of a
    /// complex point is real, so this flags a usage error.
    ComplexScalar,
    /// Two irrational fields met; only rational values cross fields.
    FieldMixture,
    /// Exact on-variety samples need exact series.
    TruncatedSeries,
    /// A parametric translate set was queried with no parameter points.
    NoParameters,
    /// The claimed closure has no components to attract to.
    EmptyClosure,
    /// A line orbit needs a nonzero direction.
    ZeroDirection,
    /// Density of a multi-line space is reduced to one mixed line, which
    /// needs an algebraic mixer of degree at least the space's dimension.
    MixingUnsupported,
    Lin(LinError),
    Nf(NfError),
}

impl fmt::Display for VerifyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VerifyError::AmbientMismatch => write!(f, "ambient dimensions differ"),
            VerifyError::ComplexScalar => write!(f, "expected real scalars"),
            VerifyError::FieldMixture => write!(f, "cannot mix irrational fields"),
            VerifyError::TruncatedSeries => write!(f, "sampling needs exact series"),
            VerifyError::NoParameters => write!(f, "no parameter points supplied"),
            VerifyError::EmptyClosure => write!(f, "no components to verify against"),
            VerifyError::ZeroDirection => write!(f, "line direction is zero"),
            VerifyError::MixingUnsupported => {
                write!(f, "no mixing direction above dimension 4")
            }
            VerifyError::Lin(e) => write!(f, "{}", e),
            VerifyError::Nf(e) => write!(f, "{}", e),
        }
    }
}

impl From<LinError> for VerifyError {
    fn from(e: LinError) -> Self {
        VerifyError::Lin(e)
    }
}

impl From<NfError> for VerifyError {
    fn from(e: NfError) -> Self {
        VerifyError::Nf(e)
    }
}

impl From<crate::asymptotics::FlatError> for VerifyError {
    fn from(e: crate::asymptotics::FlatError) -> Self {
        match e {
            crate::asymptotics::FlatError::Lin(l) => VerifyError::Lin(l),
            crate::asymptotics::FlatError::Nf(n) => VerifyError::Nf(n),
            _ => VerifyError::ComplexScalar,
        }
    }
}

/// Exact floor of a real algebraic scalar. Rational values floor
/// directly; irrational ones refine their certified box until the floor
/// is pinned, which terminates because they are never integers.
fn floor_elem(e: &Elem) -> Result<BigInt, VerifyError> {
    if let Some(q) = e.to_rational() {
        return Ok(rat::floor_int(&q));
    }
    if !e.field().is_real() {
        return Err(VerifyError::ComplexScalar);
    }
    let mut bits = 64;
    loop {
        let b = e.embed(bits);
        let lo = rat::floor_int(&b.re.lo);
        let hi = rat::floor_int(&b.re.hi);
        if lo == hi {
            return Ok(lo);
        }
        bits += 64;
        assert!(bits <= 4096, "floor refinement stalled");
    }
}

fn ceil_int(x: &BigRational) -> BigInt {
    -rat::floor_int(&-x)
}

/// Rational bracket of a real algebraic scalar.
fn elem_bounds(e: &Elem, bits: u32) -> Result<(BigRational, BigRational), VerifyError> {
    if let Some(q) = e.to_rational() {
        return Ok((q.clone(), q));
    }
    if !e.field().is_real() {
        return Err(VerifyError::ComplexScalar);
    }
    // round endpoints to the dyadic grid so downstream arithmetic does
    // not inherit the refinement's bulky fractions
    let r = e.embed(bits).re.round_out(bits);
    Ok((r.lo, r.hi))
}

/// Coerce two vectors into one coefficient field. Rational values move;
/// anything else must already agree.
fn unify(a: &[Elem], b: &[Elem]) -> Result<(Vec<Elem>, Vec<Elem>), VerifyError> {
    let fa = a.first().map(|e| e.field()).ok_or(VerifyError::AmbientMismatch)?;
    let fb = b.first().map(|e| e.field()).ok_or(VerifyError::AmbientMismatch)?;
    if fa == fb {
        return Ok((a.to_vec(), b.to_vec()));
    }
    let promote_all = |v: &[Elem], t: &Field| -> Result<Vec<Elem>, NfError> {
        v.iter().map(|e| e.promote(t)).collect()
    };
    if fb.is_rationals() {
        Ok((a.to_vec(), promote_all(b, fa)?))
    } else if fa.is_rationals() {
        Ok((promote_all(a, fb)?, b.to_vec()))
    } else {
        Err(VerifyError::FieldMixture)
    }
}

/// Point of the quotient torus in lattice coordinates, each in [0, 1).
#[derive(Clone, Debug)]
pub struct TorusPoint {
    coords: Vec<Elem>,
    integer_part: Vec<BigInt>,
}

impl TorusPoint {
    pub fn coords(&self) -> &[Elem] {
        &self.coords
    }

    pub fn integer_part(&self) -> &[BigInt] {
        &self.integer_part
    }

    /// Representative in the ambient space, inside the fundamental cell.
    pub fn ambient(&self, lattice: &Lattice) -> Vec<Elem> {
        lattice.from_coords(&self.coords)
    }
}

/// Reduce an ambient point modulo the lattice.
pub fn fold(point: &[Elem], lattice: &Lattice) -> Result<TorusPoint, VerifyError> {
    if point.len() != lattice.dim() {
        return Err(VerifyError::AmbientMismatch);
    }
    let coords = lattice.to_coords(point);
    let mut frac = Vec::with_capacity(coords.len());
    let mut integer_part = Vec::with_capacity(coords.len());
    for c in &coords {
        let k = floor_elem(c)?;
        let f = c.sub(&c.field().from_rational(BigRational::from_integer(k.clone())));
        debug_assert!(f.sign().map(|s| s >= 0).unwrap_or(false));
        frac.push(f);
        integer_part.push(k);
    }
    Ok(TorusPoint {
        coords: frac,
        integer_part,
    })
}

/// Two-sided bracket of a distance. `certified` means `lower` is a true
/// global bound; sampled parametric translates only certify `upper`.
#[derive(Clone, Debug)]
pub struct DistanceBound {
    pub lower: BigRational,
    pub upper: BigRational,
    pub certified: bool,
    /// Exact squared distance when it is rational.
    pub dist_sq: Option<BigRational>,
}

impl DistanceBound {
    fn zero() -> DistanceBound {
        DistanceBound {
            lower: BigRational::zero(),
            upper: BigRational::zero(),
            certified: true,
            dist_sq: Some(BigRational::zero()),
        }
    }

    fn merge_min(self, other: DistanceBound) -> DistanceBound {
        let dist_sq = if other.upper <= self.lower {
            other.dist_sq.clone()
        } else if self.upper <= other.lower {
            self.dist_sq.clone()
        } else {
            match (&self.dist_sq, &other.dist_sq) {
                (Some(a), Some(b)) => Some(a.min(b).clone()),
                _ => None,
            }
        };
        DistanceBound {
            lower: self.lower.min(other.lower),
            upper: self.upper.min(other.upper),
            certified: self.certified && other.certified,
            dist_sq,
        }
    }
}

/// Distance in the quotient torus from a point to the closed set
/// translate + dir + lattice. `dir` must be saturated (lattice-rational),
/// otherwise the projected lattice is not discrete and the set is not
/// closed. The minimum is exact: a window around the real minimizer is
/// enumerated, with radius certified by the pseudo-inverse norm of the
/// projected lattice basis.
pub fn subtorus_distance(
    point: &[Elem],
    translate: &[Elem],
    dir: &Subspace,
    lattice: &Lattice,
    bits: u32,
) -> Result<DistanceBound, VerifyError> {
    let n = lattice.dim();
    if point.len() != n || translate.len() != n || dir.ambient() != n {
        return Err(VerifyError::AmbientMismatch);
    }
    let (p, c) = unify(point, translate)?;
    let field = p[0].field().clone();
    if !field.is_real() {
        return Err(VerifyError::ComplexScalar);
    }
    let w = dir.orth_complement();
    let dprime = w.dim();
    if dprime == 0 {
        return Ok(DistanceBound::zero());
    }
    let proj = w.projection_matrix();
    let delta: Vec<Elem> = p.iter().zip(&c).map(|(a, b)| a.sub(b)).collect();
    let rho = rat_mat_apply(&proj, &delta);

    // integer basis of the projected lattice, columns of H over D
    let gens = lattice.generators();
    let gmat = proj.mul(&Matrix::from_rational_rows(&Field::rationals(), &gens).transpose());
    let mut den = BigInt::one();
    for i in 0..gmat.rows() {
        for j in 0..gmat.cols() {
            den = den.lcm(gmat.at(i, j).to_rational().expect("rational projector").denom());
        }
    }
    let a: Vec<Vec<BigInt>> = (0..gmat.rows())
        .map(|i| {
            (0..gmat.cols())
                .map(|j| {
                    let q = gmat.at(i, j).to_rational().unwrap() * BigRational::from_integer(den.clone());
                    debug_assert!(q.is_integer());
                    q.to_integer()
                })
                .collect()
        })
        .collect();
    let (h, _) = hnf(&a);
    let r = (0..n)
        .take_while(|&j| (0..n).any(|i| !h[i][j].is_zero()))
        .count();
    debug_assert_eq!(r, dprime, "projected lattice spans the complement");
    let q = Field::rationals();
    let hm = Matrix::from_rational_rows(
        &q,
        &(0..n)
            .map(|i| {
                (0..r)
                    .map(|j| BigRational::from_integer(h[i][j].clone()))
                    .collect()
            })
            .collect::<Vec<_>>(),
    );
    let gram_inv = hm.transpose().mul(&hm).inverse().expect("independent columns");
    let pseudo = gram_inv.mul(&hm.transpose());
    let pseudo_norm: BigRational = (0..pseudo.rows())
        .map(|i| {
            (0..pseudo.cols())
                .map(|j| pseudo.at(i, j).to_rational().unwrap().abs())
                .sum::<BigRational>()
        })
        .max()
        .unwrap();

    let den_rat = BigRational::from_integer(den.clone());
    let mstar: Vec<Elem> = rat_mat_apply(&pseudo, &rho)
        .iter()
        .map(|e| e.mul_rat(&den_rat))
        .collect();

    let f_of = |m: &[BigInt]| -> Elem {
        let res: Vec<Elem> = (0..n)
            .map(|i| {
                let mut lat = BigInt::zero();
                for (j, mj) in m.iter().enumerate() {
                    lat += &h[i][j] * mj;
                }
                rho[i].sub(&field.from_rational(BigRational::new(lat, den.clone())))
            })
            .collect();
        dot(&res, &res)
    };

    let half = rat::rat(1, 2);
    let k0: Vec<BigInt> = mstar
        .iter()
        .map(|e| floor_elem(&e.add(&field.from_rational(half.clone()))))
        .collect::<Result<Vec<_>, _>>()?;
    let mut best = f_of(&k0);
    let best_hi = elem_bounds(&best, bits)?.1;
    let radius = &pseudo_norm * den_rat * rat::sqrt_upper(&best_hi);

    let mut lo_bound = Vec::with_capacity(r);
    let mut hi_bound = Vec::with_capacity(r);
    let mut total: u64 = 1;
    for e in &mstar {
        let (lo, hi) = elem_bounds(e, bits)?;
        let a = ceil_int(&(lo - &radius));
        let b = rat::floor_int(&(hi + &radius));
        let count = (&b - &a + BigInt::one()).max(BigInt::zero());
        total = total.saturating_mul(count.to_u64().unwrap_or(u64::MAX));
        assert!(total <= 1_000_000, "distance window too large");
        lo_bound.push(a);
        hi_bound.push(b);
    }

    let mut current: Vec<BigInt> = lo_bound.clone();
    'outer: loop {
        let val = f_of(&current);
        if val.sub(&best).sign()? < 0 {
            best = val;
        }
        for i in 0..r {
            if current[i] < hi_bound[i] {
                current[i] += 1;
                continue 'outer;
            }
            current[i] = lo_bound[i].clone();
        }
        break;
    }

    let dist_sq = best.to_rational();
    let (lower, upper) = match &dist_sq {
        Some(q2) => {
            let (l, u) = rat::sqrt_bounds(q2, bits);
            (l, u)
        }
        None => {
            let (lo, hi) = elem_bounds(&best, bits)?;
            let lo_pos = if lo.is_negative() { BigRational::zero() } else { lo };
            (rat::sqrt_bounds(&lo_pos, bits).0, rat::sqrt_bounds(&hi, bits).1)
        }
    };
    Ok(DistanceBound {
        lower,
        upper,
        certified: true,
        dist_sq,
    })
}

/// Distance from a point to one closure component. Finite translate sets
/// give a certified global bound; parametric ones are sampled on the
/// supplied parameter points plus a random grid, so only the upper bound
/// is certified and `certified` is cleared.
pub fn component_distance(
    point: &[Elem],
    comp: &ClosureComponent,
    mode: Mode,
    lattice: &Lattice,
    params: &[Vec<Elem>],
    sampler: &mut Sampler,
    grid: usize,
    bits: u32,
) -> Result<DistanceBound, VerifyError> {
    match &comp.translates {
        BaseSet::Point(b) => subtorus_distance(point, b, &comp.dir_saturated, lattice, bits),
        BaseSet::Parametric { polys, constraints } => {
            let field = constraints.field().clone();
            let real = Realifier::new(&field, mode)?;
            let mut candidates: Vec<Vec<Elem>> = params
                .iter()
                .filter(|t| t.len() == constraints.nvars() && t.iter().all(|e| e.field() == &field))
                .cloned()
                .collect();
            for _ in 0..grid {
                candidates.push(constraints.sample(sampler));
            }
            if candidates.is_empty() {
                return Err(VerifyError::NoParameters);
            }
            let mut acc: Option<DistanceBound> = None;
            for t in &candidates {
                let c: Vec<Elem> = polys.iter().map(|p| p.eval(t)).collect();
                let rc = real.vec(&c);
                let d = subtorus_distance(point, &rc, &comp.dir_saturated, lattice, bits)?;
                acc = Some(match acc {
                    None => d,
                    Some(prev) => prev.merge_min(d),
                });
            }
            let mut out = acc.unwrap();
            out.certified = false;
            Ok(out)
        }
    }
}

/// Distance to the union of all components; None when there are none.
pub fn closure_distance(
    point: &[Elem],
    desc: &ClosureDescription,
    params: &[Vec<Elem>],
    sampler: &mut Sampler,
    grid: usize,
    bits: u32,
) -> Result<Option<DistanceBound>, VerifyError> {
    let mut acc: Option<DistanceBound> = None;
    for comp in &desc.components {
        let d = component_distance(
            point,
            comp,
            desc.mode,
            &desc.lattice,
            params,
            sampler,
            grid,
            bits,
        )?;
        acc = Some(match acc {
            None => d,
            Some(prev) => prev.merge_min(d),
        });
    }
    Ok(acc)
}

/// One exact on-variety sample: an ambient real-picture point together
/// with the radius scale it was taken at and the parameter points that
/// generated it, kept as seeds for parametric distance queries.
#[derive(Clone, Debug)]
pub struct VarietySample {
    pub point: Vec<Elem>,
    pub radius: BigRational,
    pub params: Vec<Vec<Elem>>,
}

/// Exact samples along a branch family at z = w^ram for each w. Requires
/// exact series so the samples lie on the variety, not near it. Radius is
/// reported as 1/w; coordinates grow at least that fast when some
/// exponent is at or below -1. Parametric families sample each supplied
/// parameter point at every w.
pub fn branch_samples(
    fam: &BranchFamily,
    mode: Mode,
    ram: u64,
    at: &[BigRational],
    params: &[Vec<Elem>],
) -> Result<Vec<VarietySample>, VerifyError> {
    if fam.components().iter().any(|c| !c.is_exact()) {
        return Err(VerifyError::TruncatedSeries);
    }
    let real = Realifier::new(fam.field(), mode)?;
    let mut out = Vec::new();
    for w in at {
        assert!(w.is_positive() && !BigRational::one().le(w), "need 0 < w < 1");
        let radius = w.recip();
        if fam.is_parametric() {
            if params.is_empty() {
                return Err(VerifyError::NoParameters);
            }
            for t in params {
                let coords: Vec<Elem> = fam
                    .components()
                    .iter()
                    .map(|c| c.eval_params(t).eval_known_at(w, ram))
                    .collect();
                out.push(VarietySample {
                    point: real.vec(&coords),
                    radius: radius.clone(),
                    params: vec![t.clone()],
                });
            }
        } else {
            let coords: Vec<Elem> = fam
                .components()
                .iter()
                .map(|c| c.eval_known_at(w, ram))
                .collect();
            out.push(VarietySample {
                point: real.vec(&coords),
                radius: radius.clone(),
                params: Vec::new(),
            });
        }
    }
    Ok(out)
}

#[derive(Clone, Debug)]
pub struct AttractionRow {
    pub radius: BigRational,
    pub bound: DistanceBound,
}

/// Distance from each folded sample to the claimed closure. The caller
/// judges the rows; the expected pattern for a correct closure is
/// distance on the order of 1/radius.
pub fn attraction_test(
    samples: &[VarietySample],
    desc: &ClosureDescription,
    sampler: &mut Sampler,
    grid: usize,
    bits: u32,
) -> Result<Vec<AttractionRow>, VerifyError> {
    if desc.components.is_empty() {
        return Err(VerifyError::EmptyClosure);
    }
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        let folded = fold(&s.point, &desc.lattice)?;
        let p = folded.ambient(&desc.lattice);
        let bound = closure_distance(&p, desc, &s.params, sampler, grid, bits)?
            .expect("components checked nonempty");
        rows.push(AttractionRow {
            radius: s.radius.clone(),
            bound,
        });
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct DensityReport {
    pub covered: bool,
    pub samples: usize,
    pub cells: u64,
    pub hit: u64,
}

/// Does the orbit of base + t dir come within eps of every torus point?
/// The torus is cut into a grid of cells small enough that one visit
/// certifies eps-closeness for the whole cell; the line is stepped so
/// consecutive samples cannot jump across a cell. Stops early once every
/// cell is hit, or when `stall` consecutive samples find nothing new.
pub fn line_density(
    base: &[Elem],
    dir: &[Elem],
    lattice: &Lattice,
    eps: &BigRational,
    max_samples: usize,
    stall: usize,
) -> Result<DensityReport, VerifyError> {
    let n = lattice.dim();
    if base.len() != n || dir.len() != n {
        return Err(VerifyError::AmbientMismatch);
    }
    if dir.iter().all(|e| e.is_zero()) {
        return Err(VerifyError::ZeroDirection);
    }
    assert!(eps.is_positive());
    let b = lattice.to_coords(base);
    let d = lattice.to_coords(dir);

    // cell side 1/m with sqrt(n)/m <= eps certifies the cell by one visit
    let m = ceil_int(&(rat::sqrt_upper(&rat::int(n as i64)) / eps))
        .to_u64()
        .expect("grid fits");
    grid_walk(&b, &d, m, max_samples, stall)
}

/// Walks j -> b + j step d in the unit cube cut into m^n cells, marking
/// the cell of each sample. The step is small enough that consecutive
/// samples cannot skip a cell in any coordinate.
fn grid_walk(
    b: &[Elem],
    d: &[Elem],
    m: u64,
    max_samples: usize,
    stall: usize,
) -> Result<DensityReport, VerifyError> {
    let n = b.len();
    let m_rat = BigRational::from_integer(BigInt::from(m));
    let mut cells: u64 = 1;
    for _ in 0..n {
        cells = cells
            .checked_mul(m)
            .filter(|&c| c <= 100_000_000)
            .expect("cell grid too large");
    }

    let bits = 96;
    let bracket: Vec<((BigRational, BigRational), (BigRational, BigRational))> = b
        .iter()
        .zip(d)
        .map(|(bi, di)| Ok((elem_bounds(bi, bits)?, elem_bounds(di, bits)?)))
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let dmax = bracket
        .iter()
        .map(|(_, (dl, dh))| dl.abs().max(dh.abs()))
        .max()
        .unwrap();
    // consecutive samples move under half a cell in every coordinate
    let step = if dmax.is_zero() {
        BigRational::one()
    } else {
        (&m_rat * BigRational::from_integer(2.into()) * dmax).recip()
    };

    // each scaled bound (b + j step d) m is an arithmetic progression in
    // j; run it as integer numerators over one fixed denominator so the
    // hot loop is an add and a floor division per bound
    struct Axis {
        num_lo: BigInt,
        num_hi: BigInt,
        inc_lo: BigInt,
        inc_hi: BigInt,
        den: BigInt,
    }
    let mut axes: Vec<Axis> = bracket
        .iter()
        .map(|((bl, bh), (dl, dh))| {
            let start_lo = bl * &m_rat;
            let start_hi = bh * &m_rat;
            let inc_lo = &step * dl * &m_rat;
            let inc_hi = &step * dh * &m_rat;
            let mut den: BigInt = BigInt::one();
            for r in [&start_lo, &start_hi, &inc_lo, &inc_hi] {
                den = den.lcm(r.denom());
            }
            let scaled = |r: &BigRational| (r * BigRational::from_integer(den.clone())).to_integer();
            Axis {
                num_lo: scaled(&start_lo),
                num_hi: scaled(&start_hi),
                inc_lo: scaled(&inc_lo),
                inc_hi: scaled(&inc_hi),
                den,
            }
        })
        .collect();

    let mut hit: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut last_new = 0usize;
    for j in 1..=max_samples {
        let mut cell = Vec::with_capacity(n);
        for (i, ax) in axes.iter_mut().enumerate() {
            ax.num_lo += &ax.inc_lo;
            ax.num_hi += &ax.inc_hi;
            let flo = ax.num_lo.div_floor(&ax.den);
            let cell_i = if flo == ax.num_hi.div_floor(&ax.den) {
                flo
            } else {
                // boundary straddle: resolve with the exact scalar
                let t = &step * BigRational::from_integer(BigInt::from(j));
                let exact = b[i].add(&d[i].mul_rat(&t));
                let scaled = exact.mul_rat(&m_rat);
                match scaled.to_rational() {
                    Some(q) => rat::floor_int(&q),
                    None => floor_elem(&scaled)?,
                }
            };
            cell.push(cell_i.mod_floor(&BigInt::from(m)).to_u64().unwrap());
        }
        if hit.insert(cell) {
            last_new = j;
            if hit.len() as u64 == cells {
                return Ok(DensityReport {
                    covered: true,
                    samples: j,
                    cells,
                    hit: cells,
                });
            }
        } else if j - last_new >= stall {
            break;
        }
    }
    Ok(DensityReport {
        covered: false,
        samples: last_new.max(1),
        cells,
        hit: hit.len() as u64,
    })
}

fn mixing_field(k: usize) -> Result<Field, VerifyError> {
    let poly = |d: usize| {
        let mut c = vec![BigRational::zero(); d + 1];
        c[0] = rat::int(-2);
        c[d] = BigRational::one();
        c
    };
    match k {
        2 => Ok(Field::sqrt2()),
        3 => Ok(Field::new(
            poly(3),
            &CRat::new(rat::rat(63, 50), BigRational::zero()),
        )?),
        4 => Ok(Field::new(
            poly(4),
            &CRat::new(rat::rat(119, 100), BigRational::zero()),
        )?),
        _ => Err(VerifyError::MixingUnsupported),
    }
}

/// One line whose lattice saturation is the whole of V: a single basis
/// row is its own witness, several rows are summed against powers of a
/// real algebraic number of degree at least their count, so no rational
/// functional can kill the mix without killing every row.
fn mixed_direction(v: &Subspace) -> Result<Vec<Elem>, VerifyError> {
    let vb = v.basis_rows();
    if vb.len() == 1 {
        return Ok(vb.into_iter().next().unwrap());
    }
    let rows: Option<Vec<Vec<BigRational>>> = vb
        .iter()
        .map(|r| r.iter().map(Elem::to_rational).collect())
        .collect();
    let rows = rows.ok_or(VerifyError::FieldMixture)?;
    let mf = mixing_field(vb.len())?;
    let th = mf.gen();
    let mut dir = vec![mf.zero(); v.ambient()];
    let mut pw = mf.one();
    for row in &rows {
        for (e, c) in dir.iter_mut().zip(row) {
            *e = e.add(&pw.mul_rat(c));
        }
        pw = pw.mul(&th);
    }
    Ok(dir)
}

#[derive(Clone, Debug)]
pub struct SubtorusDensity {
    pub subtorus_dim: usize,
    /// V lies inside its own saturation, so the folded set of V stays on
    /// the subtorus exactly; this can only fail on an internal bug.
    pub within: bool,
    pub grid: DensityReport,
}

/// Two-sided density check for a direction space V. The folded orbit of
/// a mixed line inside V must hit every cell of the subtorus spanned by
/// V's lattice saturation, with cells sized so one visit certifies
/// eps-closeness in the ambient metric. Multi-dimensional V needs a
/// rational basis for the mixing step.
pub fn density_test(
    v: &Subspace,
    lattice: &Lattice,
    eps: &BigRational,
    max_samples: usize,
    stall: usize,
) -> Result<SubtorusDensity, VerifyError> {
    if v.ambient() != lattice.dim() {
        return Err(VerifyError::AmbientMismatch);
    }
    assert!(eps.is_positive());
    let sat = saturate(v, lattice)?;
    let within = sat.promote(v.field())?.contains(v);
    if v.dim() == 0 {
        return Ok(SubtorusDensity {
            subtorus_dim: 0,
            within,
            grid: DensityReport {
                covered: true,
                samples: 0,
                cells: 1,
                hit: 1,
            },
        });
    }
    let k = sat.dim();
    let q = Field::rationals();
    let coord_rows: Vec<Vec<BigRational>> = sat
        .basis_rows()
        .iter()
        .map(|r| {
            lattice
                .to_coords(r)
                .iter()
                .map(|e| e.to_rational().expect("saturation is rational"))
                .collect()
        })
        .collect();
    let gens = integral_span_basis(&coord_rows);
    assert_eq!(gens.len(), k, "saturation has an integral chart");
    let gen_rows: Vec<Vec<BigRational>> = gens
        .iter()
        .map(|g| g.iter().map(|x| BigRational::from_integer(x.clone())).collect())
        .collect();

    let dir = mixed_direction(v)?;
    // chart coordinates of the direction: solve G^T u = coords(dir) via
    // the normal equations, exact because the direction lies in the span
    let dc = lattice.to_coords(&dir);
    let g = Matrix::from_rational_rows(&q, &gen_rows);
    let gram_inv = g.mul(&g.transpose()).inverse()?;
    let u = rat_mat_apply(&gram_inv, &rat_mat_apply(&g, &dc));
    debug_assert!({
        let back = rat_mat_apply(&g.transpose(), &u);
        back.iter().zip(&dc).all(|(a, b)| a == b)
    });

    // a chart cell of side 1/m maps into an ambient set of diameter at
    // most (sum of generator lengths) / m
    let mut scale = BigRational::zero();
    for gr in &gen_rows {
        let ge: Vec<Elem> = gr.iter().map(|x| q.from_rational(x.clone())).collect();
        let amb = lattice.from_coords(&ge);
        let n2 = dot(&amb, &amb).to_rational().expect("rational generator");
        scale += rat::sqrt_upper(&n2);
    }
    let m = ceil_int(&(scale / eps)).to_u64().expect("grid fits").max(1);
    let zero = vec![dir[0].field().zero(); k];
    let grid = grid_walk(&zero, &u, m, max_samples, stall)?;
    Ok(SubtorusDensity {
        subtorus_dim: k,
        within,
        grid,
    })
}
