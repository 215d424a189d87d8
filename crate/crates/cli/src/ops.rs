//! The five commands. Each takes the raw job text, validates it against
//! schema v1, runs the core computation, and renders the result JSON
//! (plus a CSV table for attraction runs).

use crate::dto::*;
use num_rational::BigRational;
use num_traits::One;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use torusflats_core::asymptotics::{approach_residuals, flat_of_branch};
use torusflats_core::closure::{assemble_closure, clause_checks, torus_description, FlatFamily};
use torusflats_core::lattice::saturate;
use torusflats_core::newton::{branch_residual, branches_at_infinity};
use torusflats_core::numberfield::{Elem, Field};
use torusflats_core::rng::Sampler;
use torusflats_core::verify::{
    branch_samples, component_distance, density_test, fold, subtorus_distance, VarietySample,
};

pub struct Flags {
    pub seed: u64,
    pub bits: u32,
    pub truncation: Option<BigRational>,
    pub tol: Option<BigRational>,
    pub samples: Option<usize>,
    pub radii: Option<Vec<BigRational>>,
}

#[derive(Deserialize)]
struct Header {
    schema: String,
    command: String,
}

fn from_json<T: DeserializeOwned>(input: &str) -> Result<T, CliError> {
    serde_json::from_str(input).map_err(|e| CliError::schema(format!("job file: {}", e)))
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("output serializes");
    s.push('\n');
    s
}

pub fn dispatch(
    command: &str,
    input: &str,
    flags: &Flags,
) -> Result<(String, Option<String>), CliError> {
    let header: Header = from_json(input)?;
    if header.schema != SCHEMA {
        return Err(CliError::schema(format!(
            "unsupported schema '{}', expected '{}'",
            header.schema, SCHEMA
        )));
    }
    if header.command != command {
        return Err(CliError::schema(format!(
            "job file is for command '{}', invoked as '{}'",
            header.command, command
        )));
    }
    match command {
        "saturate" => run_saturate(input).map(|s| (s, None)),
        "branches" => run_branches(input, flags).map(|s| (s, None)),
        "flat" => run_flat(input).map(|s| (s, None)),
        "closure" => run_closure(input, flags).map(|s| (s, None)),
        "verify" => run_verify(input, flags),
        other => Err(CliError::schema(format!("unknown command '{}'", other))),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SaturateJob {
    #[allow(dead_code)]
    schema: String,
    #[allow(dead_code)]
    command: String,
    subspace: SubspaceDto,
    lattice: LatticeDto,
}

#[derive(Serialize)]
struct SaturateOut {
    schema: &'static str,
    saturation: SubspaceDto,
}

fn run_saturate(input: &str) -> Result<String, CliError> {
    let job: SaturateJob = from_json(input)?;
    let s = subspace_to_core(&job.subspace)?;
    let l = lattice_to_core(&job.lattice)?;
    let sat =
        saturate(&s, &l).map_err(|e| CliError::precondition(format!("saturate: {}", e)))?;
    Ok(to_json(&SaturateOut {
        schema: SCHEMA,
        saturation: subspace_from_core(&sat),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct BranchesJob {
    #[allow(dead_code)]
    schema: String,
    #[allow(dead_code)]
    command: String,
    field: FieldDto,
    /// Bivariate polynomial, variable 0 is x and variable 1 is y.
    curve: PolyDto,
    order: Rat,
}

#[derive(Serialize)]
struct BranchesOut {
    schema: &'static str,
    order: Rat,
    branches: Vec<BranchOut>,
}

#[derive(Serialize)]
struct BranchOut {
    field: FieldDto,
    x: SeriesDto,
    y: SeriesDto,
    ramification: u64,
    at_pole: bool,
    residual: ValuationDto,
}

fn run_branches(input: &str, flags: &Flags) -> Result<String, CliError> {
    let job: BranchesJob = from_json(input)?;
    let field = field_to_core(&job.field)?;
    if job.curve.nvars != 2 {
        return Err(CliError::schema(format!(
            "curve must have 2 variables, got {}",
            job.curve.nvars
        )));
    }
    let f = poly_to_core(&job.curve, &field)?;
    let order = match &flags.truncation {
        Some(t) => t.clone(),
        None => parse_rat(&job.order)?,
    };
    let brs = branches_at_infinity(&f, &order)
        .map_err(|e| CliError::precondition(format!("branches: {}", e)))?;
    let mut out = Vec::with_capacity(brs.len());
    for br in &brs {
        let residual = branch_residual(&f, br)
            .map_err(|e| CliError::precondition(format!("residual: {}", e)))?;
        out.push(BranchOut {
            field: field_from_core(br.x.field()),
            x: series_from_core(&br.x),
            y: series_from_core(&br.y),
            ramification: br.ramification,
            at_pole: br.at_pole,
            residual: valuation_from_core(&residual),
        });
    }
    Ok(to_json(&BranchesOut {
        schema: SCHEMA,
        order: emit_rat(&order),
        branches: out,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FlatJob {
    #[allow(dead_code)]
    schema: String,
    #[allow(dead_code)]
    command: String,
    family: FamilyDto,
    mode: String,
}

#[derive(Serialize)]
struct FlatOut {
    schema: &'static str,
    field: FieldDto,
    base: Vec<ElemDto>,
    dir: SubspaceDto,
    witnesses: Vec<WitnessOut>,
    residuals: Vec<ValuationDto>,
}

#[derive(Serialize)]
struct WitnessOut {
    functional: Vec<ElemDto>,
    observed: Rat,
}

fn run_flat(input: &str) -> Result<String, CliError> {
    let job: FlatJob = from_json(input)?;
    let fam = family_to_core(&job.family)?;
    let mode = parse_mode(&job.mode)?;
    let af =
        flat_of_branch(&fam, mode).map_err(|e| CliError::precondition(format!("flat: {}", e)))?;
    let residuals = approach_residuals(&fam, &af.flat, mode)
        .map_err(|e| CliError::precondition(format!("residuals: {}", e)))?;
    let base_field = af
        .flat
        .base
        .first()
        .map(|e| e.field().clone())
        .unwrap_or_else(Field::rationals);
    Ok(to_json(&FlatOut {
        schema: SCHEMA,
        field: field_from_core(&base_field),
        base: vec_from_core(&af.flat.base),
        dir: subspace_from_core(&af.flat.dir),
        witnesses: af
            .witnesses
            .iter()
            .map(|w| WitnessOut {
                functional: vec_from_core(&w.functional),
                observed: emit_rat(&w.observed),
            })
            .collect(),
        residuals: residuals.iter().map(valuation_from_core).collect(),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClosureJob {
    #[allow(dead_code)]
    schema: String,
    #[allow(dead_code)]
    command: String,
    families: Vec<FamilyDto>,
    mode: String,
    lattice: LatticeDto,
    #[serde(default)]
    dim_x: Option<usize>,
}

#[derive(Serialize)]
struct ClosureOut {
    schema: &'static str,
    closure: ClosureDto,
    clauses: Option<ClauseDto>,
    subtori: Vec<SubtorusDto>,
}

fn run_closure(input: &str, flags: &Flags) -> Result<String, CliError> {
    let job: ClosureJob = from_json(input)?;
    let mode = parse_mode(&job.mode)?;
    let lattice = lattice_to_core(&job.lattice)?;
    let mut sampler = Sampler::new(flags.seed);
    let mut flat_families = Vec::with_capacity(job.families.len());
    for (i, fdto) in job.families.iter().enumerate() {
        let fam = family_to_core(fdto)?;
        let ff = FlatFamily::from_branches(&fam, mode, &mut sampler)
            .map_err(|e| CliError::precondition(format!("family {}: {}", i, e)))?;
        flat_families.push(ff);
    }
    let desc = assemble_closure(&flat_families, &lattice)
        .map_err(|e| CliError::precondition(format!("closure: {}", e)))?;
    let clauses = job
        .dim_x
        .map(|d| clauses_from_core(&clause_checks(&desc, d, &mut sampler)));
    // saturated directions are lattice-defined, so a rationality failure
    // here is a broken invariant, not a bad input
    let subtori = torus_description(&desc)
        .map_err(|e| CliError::internal(format!("torus description: {}", e)))?;
    Ok(to_json(&ClosureOut {
        schema: SCHEMA,
        closure: closure_from_core(&desc),
        clauses,
        subtori: subtori.iter().map(subtorus_from_core).collect(),
    }))
}

#[derive(Deserialize)]
struct VerifyHeader {
    kind: String,
}

#[derive(Serialize, Deserialize, Clone)]
#[serde(deny_unknown_fields)]
pub struct PointDto {
    #[serde(default)]
    pub field: Option<FieldDto>,
    pub coords: Vec<ElemDto>,
    pub radius: Rat,
    #[serde(default)]
    pub seeds: Vec<Vec<ElemDto>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AttractionJob {
    #[allow(dead_code)]
    schema: String,
    #[allow(dead_code)]
    command: String,
    #[allow(dead_code)]
    kind: String,
    families: Vec<FamilyDto>,
    mode: String,
    lattice: LatticeDto,
    tol: Rat,
    /// Radii at which exact families are sampled; each must exceed 1.
    #[serde(default)]
    radii: Vec<Rat>,
    /// Explicit on-variety samples, for branches whose series are known
    /// only up to truncation.
    #[serde(default)]
    points: Vec<PointDto>,
    /// Closure components to delete before testing, by output index.
    #[serde(default)]
    drop: Vec<usize>,
    #[serde(default)]
    grid: Option<usize>,
}

#[derive(Serialize)]
struct AttractionOut {
    schema: &'static str,
    tol: Rat,
    pass: bool,
    rows: Vec<RowOut>,
}

#[derive(Serialize)]
struct RowOut {
    family: Option<usize>,
    point: Option<usize>,
    radius: Rat,
    folded: Vec<ElemDto>,
    component: usize,
    lower: Rat,
    upper: Rat,
    dist_sq: Option<Rat>,
    certified: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DensityJob {
    #[allow(dead_code)]
    schema: String,
    #[allow(dead_code)]
    command: String,
    #[allow(dead_code)]
    kind: String,
    subspace: SubspaceDto,
    lattice: LatticeDto,
    eps: Rat,
    #[serde(default)]
    max_samples: Option<usize>,
    #[serde(default)]
    stall: Option<usize>,
    /// Rational ambient points whose distance to the subtorus is
    /// certified alongside the density run.
    #[serde(default)]
    offsets: Vec<Vec<Rat>>,
}

#[derive(Serialize)]
struct DensityOut {
    schema: &'static str,
    subtorus_dim: usize,
    within: bool,
    covered: bool,
    samples: usize,
    cells: u64,
    hit: u64,
    offsets: Vec<OffsetOut>,
    pass: bool,
}

#[derive(Serialize)]
struct OffsetOut {
    point: Vec<Rat>,
    lower: Rat,
    upper: Rat,
    dist_sq: Option<Rat>,
    certified: bool,
}

fn run_verify(input: &str, flags: &Flags) -> Result<(String, Option<String>), CliError> {
    let header: VerifyHeader = from_json(input)?;
    match header.kind.as_str() {
        "attraction" => run_attraction(input, flags),
        "density" => run_density(input, flags).map(|s| (s, None)),
        other => Err(CliError::schema(format!(
            "verify kind must be 'attraction' or 'density', got '{}'",
            other
        ))),
    }
}

fn elem_decimal(e: &Elem, places: u32) -> String {
    match e.to_rational() {
        Some(q) => decimal(&q, places),
        None => decimal(&e.embed(60).re.mid(), places),
    }
}

fn run_attraction(input: &str, flags: &Flags) -> Result<(String, Option<String>), CliError> {
    let job: AttractionJob = from_json(input)?;
    let mode = parse_mode(&job.mode)?;
    let lattice = lattice_to_core(&job.lattice)?;
    let tol = match &flags.tol {
        Some(t) => t.clone(),
        None => parse_rat(&job.tol)?,
    };
    let radii = match &flags.radii {
        Some(r) => r.clone(),
        None => job
            .radii
            .iter()
            .map(|s| parse_rat(s))
            .collect::<Result<Vec<_>, _>>()?,
    };
    if radii.iter().any(|r| r <= &BigRational::one()) {
        return Err(CliError::precondition("attraction radii must exceed 1"));
    }
    let grid = job.grid.unwrap_or(3);
    let mut sampler = Sampler::new(flags.seed);

    let mut families = Vec::with_capacity(job.families.len());
    let mut seeds = Vec::with_capacity(job.families.len());
    let mut flat_families = Vec::with_capacity(job.families.len());
    for (i, fdto) in job.families.iter().enumerate() {
        let fam = family_to_core(fdto)?;
        seeds.push(family_seeds(fdto, fam.field())?);
        let ff = FlatFamily::from_branches(&fam, mode, &mut sampler)
            .map_err(|e| CliError::precondition(format!("family {}: {}", i, e)))?;
        flat_families.push(ff);
        families.push(fam);
    }
    let mut desc = assemble_closure(&flat_families, &lattice)
        .map_err(|e| CliError::precondition(format!("closure: {}", e)))?;
    let mut dropped: Vec<usize> = job.drop.clone();
    dropped.sort_unstable();
    dropped.dedup();
    for &i in dropped.iter().rev() {
        if i >= desc.components.len() {
            return Err(CliError::precondition(format!(
                "drop index {} out of range, closure has {} components",
                i,
                desc.components.len()
            )));
        }
        desc.components.remove(i);
    }
    if desc.components.is_empty() {
        return Err(CliError::precondition(
            "no components left to attract to",
        ));
    }

    // (origin family, origin point, sample)
    let mut samples: Vec<(Option<usize>, Option<usize>, VarietySample)> = Vec::new();
    for (i, fam) in families.iter().enumerate() {
        if fam.components().iter().any(|c| !c.is_exact()) {
            // truncated series cannot produce exact on-variety samples;
            // such branches are covered through explicit points
            continue;
        }
        let ram = job.families[i].ramification;
        for r in &radii {
            let w = r.recip();
            let got = branch_samples(fam, mode, ram, &[w], &seeds[i])
                .map_err(|e| CliError::precondition(format!("family {}: {}", i, e)))?;
            samples.extend(got.into_iter().map(|s| (Some(i), None, s)));
        }
    }
    for (j, p) in job.points.iter().enumerate() {
        let field = match &p.field {
            Some(f) => field_to_core(f)?,
            None => Field::rationals(),
        };
        let coords = vec_to_core(&p.coords, &field)?;
        if coords.len() != lattice.dim() {
            return Err(CliError::schema(format!(
                "point {} has {} coordinates, ambient is {}",
                j,
                p.coords.len(),
                lattice.dim()
            )));
        }
        let params = p
            .seeds
            .iter()
            .map(|s| vec_to_core(s, &field))
            .collect::<Result<Vec<_>, _>>()?;
        samples.push((
            None,
            Some(j),
            VarietySample {
                point: coords,
                radius: parse_rat(&p.radius)?,
                params,
            },
        ));
    }
    if samples.is_empty() {
        return Err(CliError::precondition(
            "nothing to test: no exact families and no points",
        ));
    }

    let mut rows = Vec::with_capacity(samples.len());
    let mut pass = true;
    let mut csv = String::new();
    for i in 0..lattice.dim() {
        csv.push_str(&format!("x{},", i + 1));
    }
    csv.push_str("component,distance\n");
    for (fam_idx, pt_idx, s) in &samples {
        let folded = fold(&s.point, &lattice)
            .map_err(|e| CliError::precondition(format!("fold: {}", e)))?;
        let ambient = folded.ambient(&lattice);
        let mut best: Option<(usize, torusflats_core::verify::DistanceBound)> = None;
        for (ci, comp) in desc.components.iter().enumerate() {
            let d = component_distance(
                &ambient, comp, desc.mode, &lattice, &s.params, &mut sampler, grid, flags.bits,
            )
            .map_err(|e| CliError::precondition(format!("distance: {}", e)))?;
            let better = match &best {
                None => true,
                Some((_, b)) => d.upper < b.upper,
            };
            if better {
                best = Some((ci, d));
            }
        }
        let (component, bound) = best.expect("components checked nonempty");
        if bound.upper > tol {
            pass = false;
        }
        for c in folded.coords() {
            csv.push_str(&elem_decimal(c, 6));
            csv.push(',');
        }
        csv.push_str(&format!(
            "{},{}\n",
            component,
            decimal(&bound.upper, 6)
        ));
        rows.push(RowOut {
            family: *fam_idx,
            point: *pt_idx,
            radius: emit_rat(&s.radius),
            folded: vec_from_core(folded.coords()),
            component,
            lower: emit_rat(&bound.lower),
            upper: emit_rat(&bound.upper),
            dist_sq: bound.dist_sq.as_ref().map(emit_rat),
            certified: bound.certified,
        });
    }
    let out = AttractionOut {
        schema: SCHEMA,
        tol: emit_rat(&tol),
        pass,
        rows,
    };
    Ok((to_json(&out), Some(csv)))
}

fn run_density(input: &str, flags: &Flags) -> Result<String, CliError> {
    let job: DensityJob = from_json(input)?;
    let v = subspace_to_core(&job.subspace)?;
    let lattice = lattice_to_core(&job.lattice)?;
    let eps = match &flags.tol {
        Some(t) => t.clone(),
        None => parse_rat(&job.eps)?,
    };
    let max_samples = flags.samples.or(job.max_samples).unwrap_or(100_000);
    let stall = job.stall.unwrap_or_else(|| (max_samples / 4).max(1_000));
    let report = density_test(&v, &lattice, &eps, max_samples, stall)
        .map_err(|e| CliError::precondition(format!("density: {}", e)))?;

    let q = Field::rationals();
    let sat = saturate(&v, &lattice)
        .map_err(|e| CliError::precondition(format!("saturate: {}", e)))?;
    let zero = vec![q.zero(); lattice.dim()];
    let mut offsets = Vec::with_capacity(job.offsets.len());
    for o in &job.offsets {
        if o.len() != lattice.dim() {
            return Err(CliError::schema(format!(
                "offset has {} coordinates, ambient is {}",
                o.len(),
                lattice.dim()
            )));
        }
        let point: Vec<Elem> = o
            .iter()
            .map(|s| Ok(q.from_rational(parse_rat(s)?)))
            .collect::<Result<Vec<_>, CliError>>()?;
        let folded = fold(&point, &lattice)
            .map_err(|e| CliError::precondition(format!("fold: {}", e)))?;
        let d = subtorus_distance(&folded.ambient(&lattice), &zero, &sat, &lattice, flags.bits)
            .map_err(|e| CliError::precondition(format!("distance: {}", e)))?;
        offsets.push(OffsetOut {
            point: o.clone(),
            lower: emit_rat(&d.lower),
            upper: emit_rat(&d.upper),
            dist_sq: d.dist_sq.as_ref().map(emit_rat),
            certified: d.certified,
        });
    }
    let pass = report.within && report.grid.covered;
    Ok(to_json(&DensityOut {
        schema: SCHEMA,
        subtorus_dim: report.subtorus_dim,
        within: report.within,
        covered: report.grid.covered,
        samples: report.grid.samples,
        cells: report.grid.cells,
        hit: report.grid.hit,
        offsets,
        pass,
    }))
}
