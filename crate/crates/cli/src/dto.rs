//! JSON schemas (version "v1") for job files and results, and their
//! conversions to the core types. Values are strings holding exact
//! rationals, so files survive a round trip unchanged.
//!
//! Error classes map to exit codes: schema violations (2) are malformed
//! files, math preconditions (3) are well-formed jobs the math refuses,
//! internal errors (4) are invariant breaches.

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use torusflats_core::closure::{BaseSet, ClauseReport, ClosureDescription, SubtorusInfo};
use torusflats_core::interval::CRat;
use torusflats_core::lattice::Lattice;
use torusflats_core::linalg::{Mode, Subspace};
use torusflats_core::numberfield::{Elem, Field};
use torusflats_core::poly::{ConstraintSystem, Poly};
use torusflats_core::puiseux::{BranchFamily, PuiseuxScalar, Valuation};

pub const SCHEMA: &str = "v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Class {
    Schema,
    Precondition,
    Internal,
}

#[derive(Debug)]
pub struct CliError {
    pub class: Class,
    pub message: String,
}

impl CliError {
    pub fn schema(msg: impl Into<String>) -> CliError {
        CliError {
            class: Class::Schema,
            message: msg.into(),
        }
    }

    pub fn precondition(msg: impl Into<String>) -> CliError {
        CliError {
            class: Class::Precondition,
            message: msg.into(),
        }
    }

    pub fn internal(msg: impl Into<String>) -> CliError {
        CliError {
            class: Class::Internal,
            message: msg.into(),
        }
    }

    pub fn code(&self) -> i32 {
        match self.class {
            Class::Schema => 2,
            Class::Precondition => 3,
            Class::Internal => 4,
        }
    }

    pub fn render(&self) -> String {
        let class = match self.class {
            Class::Schema => "schema",
            Class::Precondition => "precondition",
            Class::Internal => "internal",
        };
        serde_json::json!({
            "schema": SCHEMA,
            "error": { "class": class, "message": self.message }
        })
        .to_string()
    }
}

pub type Rat = String;
pub type ElemDto = Vec<Rat>;

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(untagged)]
pub enum FieldDto {
    Name(String),
    Extension { min_poly: Vec<Rat>, root: RootDto },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct RootDto {
    pub re: Rat,
    pub im: Rat,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SubspaceDto {
    pub mode: String,
    pub ambient: usize,
    pub field: FieldDto,
    pub basis: Vec<Vec<ElemDto>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct LatticeDto {
    pub generators: Vec<Vec<Rat>>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct TermDto {
    pub powers: Vec<u32>,
    pub coeff: ElemDto,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct PolyDto {
    pub nvars: usize,
    pub terms: Vec<TermDto>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SeriesTermDto {
    pub exponent: Rat,
    pub coeff: PolyDto,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SeriesDto {
    pub terms: Vec<SeriesTermDto>,
    #[serde(default)]
    pub truncation: Option<Rat>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct FamilyDto {
    pub field: FieldDto,
    #[serde(default)]
    pub nparams: usize,
    pub components: Vec<SeriesDto>,
    #[serde(default)]
    pub constraints: Vec<PolyDto>,
    #[serde(default = "default_ramification")]
    pub ramification: u64,
    /// Parameter points used to seed distance queries against this
    /// family's translate set.
    #[serde(default)]
    pub seeds: Vec<Vec<ElemDto>>,
}

fn default_ramification() -> u64 {
    1
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ValuationDto {
    pub kind: String,
    #[serde(default)]
    pub value: Option<Rat>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TranslatesDto {
    Point {
        field: FieldDto,
        point: Vec<ElemDto>,
    },
    Parametric {
        field: FieldDto,
        nvars: usize,
        polys: Vec<PolyDto>,
        constraints: Vec<PolyDto>,
    },
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ComponentDto {
    pub translates: TranslatesDto,
    pub dir: SubspaceDto,
    pub dir_saturated: SubspaceDto,
    pub maximal: bool,
    pub span_certified: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ClosureDto {
    pub mode: String,
    pub ambient: usize,
    pub lattice: LatticeDto,
    pub components: Vec<ComponentDto>,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ClauseComponentDto {
    pub translate_dim: usize,
    pub translate_small: bool,
    pub finite_on_maximal: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct ClauseDto {
    pub components: Vec<ClauseComponentDto>,
    pub all_pass: bool,
}

#[derive(Serialize, Deserialize, Clone, Debug)]
pub struct SubtorusDto {
    pub dim: usize,
    pub lattice_dirs: Vec<Vec<Rat>>,
    #[serde(default)]
    pub folded_translates: Option<Vec<Vec<Rat>>>,
}

pub fn parse_rat(s: &str) -> Result<BigRational, CliError> {
    s.trim()
        .parse::<BigRational>()
        .map_err(|e| CliError::schema(format!("bad rational '{}': {}", s, e)))
}

pub fn emit_rat(q: &BigRational) -> Rat {
    q.to_string()
}

pub fn parse_mode(s: &str) -> Result<Mode, CliError> {
    match s {
        "real" => Ok(Mode::Real),
        "complex" => Ok(Mode::Complex),
        other => Err(CliError::schema(format!(
            "mode must be 'real' or 'complex', got '{}'",
            other
        ))),
    }
}

pub fn emit_mode(m: Mode) -> String {
    match m {
        Mode::Real => "real".into(),
        Mode::Complex => "complex".into(),
    }
}

pub fn field_to_core(dto: &FieldDto) -> Result<Field, CliError> {
    match dto {
        FieldDto::Name(n) if n == "rationals" => Ok(Field::rationals()),
        FieldDto::Name(n) => Err(CliError::schema(format!("unknown field name '{}'", n))),
        FieldDto::Extension { min_poly, root } => {
            let coeffs = min_poly
                .iter()
                .map(|s| parse_rat(s))
                .collect::<Result<Vec<_>, _>>()?;
            let hint = CRat::new(parse_rat(&root.re)?, parse_rat(&root.im)?);
            Field::new(coeffs, &hint)
                .map_err(|e| CliError::precondition(format!("field construction: {}", e)))
        }
    }
}

pub fn field_from_core(f: &Field) -> FieldDto {
    if f.is_rationals() {
        return FieldDto::Name("rationals".into());
    }
    let root = f.root_box();
    FieldDto::Extension {
        min_poly: f.min_poly().iter().map(emit_rat).collect(),
        root: RootDto {
            re: emit_rat(&root.re.mid()),
            im: emit_rat(&root.im.mid()),
        },
    }
}

pub fn elem_to_core(dto: &ElemDto, field: &Field) -> Result<Elem, CliError> {
    if dto.len() != field.degree() {
        return Err(CliError::schema(format!(
            "element needs {} coefficients for this field, got {}",
            field.degree(),
            dto.len()
        )));
    }
    let coeffs = dto
        .iter()
        .map(|s| parse_rat(s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(field.elem(coeffs))
}

pub fn elem_from_core(e: &Elem) -> ElemDto {
    e.coeffs().iter().map(emit_rat).collect()
}

pub fn vec_to_core(dto: &[ElemDto], field: &Field) -> Result<Vec<Elem>, CliError> {
    dto.iter().map(|e| elem_to_core(e, field)).collect()
}

pub fn vec_from_core(v: &[Elem]) -> Vec<ElemDto> {
    v.iter().map(elem_from_core).collect()
}

pub fn subspace_to_core(dto: &SubspaceDto) -> Result<Subspace, CliError> {
    let mode = parse_mode(&dto.mode)?;
    let field = field_to_core(&dto.field)?;
    let rows = dto
        .basis
        .iter()
        .map(|r| vec_to_core(r, &field))
        .collect::<Result<Vec<_>, _>>()?;
    Subspace::span(mode, dto.ambient, &field, rows)
        .map_err(|e| CliError::precondition(format!("subspace: {}", e)))
}

pub fn subspace_from_core(s: &Subspace) -> SubspaceDto {
    SubspaceDto {
        mode: emit_mode(s.mode()),
        ambient: s.ambient(),
        field: field_from_core(s.field()),
        basis: s.basis_rows().iter().map(|r| vec_from_core(r)).collect(),
    }
}

pub fn lattice_to_core(dto: &LatticeDto) -> Result<Lattice, CliError> {
    let gens = dto
        .generators
        .iter()
        .map(|g| g.iter().map(|s| parse_rat(s)).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Lattice::new(&gens).map_err(|e| CliError::precondition(format!("lattice: {}", e)))
}

pub fn lattice_from_core(l: &Lattice) -> LatticeDto {
    LatticeDto {
        generators: l
            .generators()
            .iter()
            .map(|g| g.iter().map(emit_rat).collect())
            .collect(),
    }
}

pub fn poly_to_core(dto: &PolyDto, field: &Field) -> Result<Poly, CliError> {
    let mut terms = Vec::with_capacity(dto.terms.len());
    for t in &dto.terms {
        if t.powers.len() != dto.nvars {
            return Err(CliError::schema(format!(
                "term has {} powers in a {}-variable polynomial",
                t.powers.len(),
                dto.nvars
            )));
        }
        terms.push((t.powers.clone(), elem_to_core(&t.coeff, field)?));
    }
    Ok(Poly::from_terms(field, dto.nvars, terms))
}

pub fn poly_from_core(p: &Poly) -> PolyDto {
    PolyDto {
        nvars: p.nvars(),
        terms: p
            .terms()
            .map(|(powers, coeff)| TermDto {
                powers: powers.clone(),
                coeff: elem_from_core(coeff),
            })
            .collect(),
    }
}

pub fn series_to_core(
    dto: &SeriesDto,
    field: &Field,
    nparams: usize,
) -> Result<PuiseuxScalar, CliError> {
    let mut terms = Vec::with_capacity(dto.terms.len());
    for t in &dto.terms {
        if t.coeff.nvars != nparams {
            return Err(CliError::schema(format!(
                "series coefficient has {} variables, family has {} parameters",
                t.coeff.nvars, nparams
            )));
        }
        terms.push((parse_rat(&t.exponent)?, poly_to_core(&t.coeff, field)?));
    }
    let trunc = dto.truncation.as_deref().map(parse_rat).transpose()?;
    Ok(PuiseuxScalar::from_terms(field, nparams, terms, trunc))
}

pub fn series_from_core(s: &PuiseuxScalar) -> SeriesDto {
    SeriesDto {
        terms: s
            .terms()
            .map(|(q, c)| SeriesTermDto {
                exponent: emit_rat(q),
                coeff: poly_from_core(c),
            })
            .collect(),
        truncation: s.trunc().map(emit_rat),
    }
}

pub fn family_to_core(dto: &FamilyDto) -> Result<BranchFamily, CliError> {
    let field = field_to_core(&dto.field)?;
    let components = dto
        .components
        .iter()
        .map(|s| series_to_core(s, &field, dto.nparams))
        .collect::<Result<Vec<_>, _>>()?;
    if dto.nparams == 0 && dto.constraints.is_empty() {
        return BranchFamily::without_params(components)
            .map_err(|e| CliError::precondition(format!("family: {}", e)));
    }
    let cons_polys = dto
        .constraints
        .iter()
        .map(|p| {
            if p.nvars != dto.nparams {
                return Err(CliError::schema(format!(
                    "constraint has {} variables, family has {} parameters",
                    p.nvars, dto.nparams
                )));
            }
            poly_to_core(p, &field)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cons = ConstraintSystem::new(&field, dto.nparams, cons_polys)
        .map_err(|e| CliError::precondition(format!("constraints: {}", e)))?;
    BranchFamily::new(components, cons)
        .map_err(|e| CliError::precondition(format!("family: {}", e)))
}

pub fn family_seeds(dto: &FamilyDto, field: &Field) -> Result<Vec<Vec<Elem>>, CliError> {
    dto.seeds
        .iter()
        .map(|s| {
            if s.len() != dto.nparams {
                return Err(CliError::schema(format!(
                    "seed has {} entries, family has {} parameters",
                    s.len(),
                    dto.nparams
                )));
            }
            vec_to_core(s, field)
        })
        .collect()
}

pub fn valuation_from_core(v: &Valuation) -> ValuationDto {
    match v {
        Valuation::Exact(q) => ValuationDto {
            kind: "exact".into(),
            value: Some(emit_rat(q)),
        },
        Valuation::Above(q) => ValuationDto {
            kind: "above".into(),
            value: Some(emit_rat(q)),
        },
        Valuation::Infinite => ValuationDto {
            kind: "infinite".into(),
            value: None,
        },
    }
}

fn baseset_field(b: &BaseSet, fallback: &Field) -> Field {
    match b {
        BaseSet::Point(v) => v
            .first()
            .map(|e| e.field().clone())
            .unwrap_or_else(|| fallback.clone()),
        BaseSet::Parametric { polys, constraints } => polys
            .first()
            .map(|p| p.field().clone())
            .unwrap_or_else(|| constraints.field().clone()),
    }
}

pub fn closure_from_core(desc: &ClosureDescription) -> ClosureDto {
    let components = desc
        .components
        .iter()
        .map(|c| {
            let translates = match &c.translates {
                BaseSet::Point(v) => TranslatesDto::Point {
                    field: field_from_core(&baseset_field(&c.translates, c.dir.field())),
                    point: vec_from_core(v),
                },
                BaseSet::Parametric { polys, constraints } => TranslatesDto::Parametric {
                    field: field_from_core(&baseset_field(&c.translates, c.dir.field())),
                    nvars: constraints.nvars(),
                    polys: polys.iter().map(poly_from_core).collect(),
                    constraints: constraints.constraints().iter().map(poly_from_core).collect(),
                },
            };
            ComponentDto {
                translates,
                dir: subspace_from_core(&c.dir),
                dir_saturated: subspace_from_core(&c.dir_saturated),
                maximal: c.maximal,
                span_certified: c.span_certified,
            }
        })
        .collect();
    ClosureDto {
        mode: emit_mode(desc.mode),
        ambient: desc.ambient,
        lattice: lattice_from_core(&desc.lattice),
        components,
    }
}

pub fn clauses_from_core(r: &ClauseReport) -> ClauseDto {
    ClauseDto {
        components: r
            .components
            .iter()
            .map(|c| ClauseComponentDto {
                translate_dim: c.translate_dim,
                translate_small: c.translate_small,
                finite_on_maximal: c.finite_on_maximal,
            })
            .collect(),
        all_pass: r.all_pass,
    }
}

pub fn subtorus_from_core(s: &SubtorusInfo) -> SubtorusDto {
    SubtorusDto {
        dim: s.dim,
        lattice_dirs: s
            .lattice_dirs
            .iter()
            .map(|r| r.iter().map(emit_rat).collect())
            .collect(),
        folded_translates: s
            .folded_translates
            .as_ref()
            .map(|ts| ts.iter().map(|t| t.iter().map(emit_rat).collect()).collect()),
    }
}

/// Fixed-point decimal with `places` digits, round half away from zero.
pub fn decimal(q: &BigRational, places: u32) -> String {
    use num_bigint::BigInt;
    use num_traits::Signed;
    let scale = BigInt::from(10u32).pow(places);
    let scaled = (q * BigRational::from_integer(scale.clone())).round();
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let abs = n.abs();
    let (int_part, frac_part) = (abs.clone() / &scale, abs % &scale);
    let frac = format!("{:0width$}", frac_part, width = places as usize);
    format!("{}{}.{}", if neg { "-" } else { "" }, int_part, frac)
}
