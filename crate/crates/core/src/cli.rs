//! The `katofan` command line front end.
//!
//! Every input and output is a JSON object tagged `"schema": "katofan/1"`.
//! Exit status 0 on success, 1 on a domain error (with an error object on
//! stdout), 2 on malformed input.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::complex::{
    builtin_quotient, extended_complex, point_from_hom, reduction, structure_point, ComplexPoint, ExtendedValue,
};
use crate::cone::Cone;
use crate::error::Error;
use crate::fan::{builtin_fan, fan_from_polyhedral_fan, stalk_label, toric_fan, FanJson, KatoFan, BUILTIN_FANS};
use crate::monoid::{cone_hilbert_basis, cone_of_monoid, monoid_of_cone, AffineMonoid};
use crate::trop::{
    self, characteristic_fan, dual_complex, gauss_section, gauss_seminorm, retract_series_point, trop_membership,
    trop_monomial_point, trop_series_point, tropical_hypersurface, DualComplexInput, LaurentPolynomial, LogAtlas,
    MonomialPoint, SeriesPoint,
};

pub const SCHEMA: &str = "katofan/1";
const DEFAULT_SEED: u64 = 0x6b61_746f;

#[derive(Parser, Debug)]
#[command(name = "katofan", version, about = "Kato fans, extended cone complexes and tropicalization")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input JSON file (stdin when absent)
    #[arg(long = "in", global = true)]
    input: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Emit Graphviz DOT instead of JSON where supported
    #[arg(long, global = true)]
    dot: bool,
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Worker threads for per-point computations
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Truncation order for series given without one
    #[arg(long, global = true, default_value_t = trop::DEFAULT_TRUNCATION)]
    truncation: u32,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Operations on an affine monoid: {"monoid": {...}}
    Monoid {
        #[command(subcommand)]
        action: MonoidAction,
    },
    /// Operations on a rational cone: {"cone": {...}}
    Cone {
        #[command(subcommand)]
        action: ConeAction,
    },
    /// Build and inspect fans
    Fan {
        #[command(subcommand)]
        action: FanAction,
    },
    /// Extended cone complexes and their points
    Complex {
        #[command(subcommand)]
        action: ComplexAction,
    },
    /// Tropicalization
    Trop {
        #[command(subcommand)]
        action: TropAction,
    },
    /// Dual complexes of normal crossings divisors
    Dualcx {
        #[command(subcommand)]
        action: DualAction,
    },
}

#[derive(Subcommand, Debug)]
enum MonoidAction {
    HilbertBasis,
    Primes,
    Saturate,
    /// Split into sharp part, units and torsion
    Sharp,
    /// Membership of {"element": [...]}
    Contains,
    /// The dual cone Hom(P, R>=0)
    Cone,
    /// Isomorphism with {"other": {...}}
    Isomorphic,
}

#[derive(Subcommand, Debug)]
enum ConeAction {
    Dual,
    Faces,
    HilbertBasis,
    /// The monoid of lattice points of the dual cone
    Monoid,
}

#[derive(Subcommand, Debug)]
enum FanAction {
    /// One of A1, A2, A3, P1, P2, P1xP1, nodal
    Builtin { name: String },
    /// Glue an atlas {"atlas": {"charts": [...], "overlaps": {...}}}
    Glue,
    /// Fan of a polyhedral fan {"cones": [...]} or a named toric fan {"name": ...}
    Polyhedral,
    /// Re-read a fan {"fan": ...} and print it
    Show,
    /// Fine and saturated check of {"fan": ...}
    Check,
}

#[derive(Subcommand, Debug)]
enum ComplexAction {
    /// Strata of the extended complex of {"fan": ...}
    Strata,
    /// Canonical form of {"fan", "open", "values"}
    Point,
    /// Equality in a quotient {"quotient": "swap"|"nodal", "x": ..., "y": ...}
    Equal,
}

#[derive(Subcommand, Debug)]
enum TropAction {
    /// Tropicalize {"fan", "point": {"chart", "values"} | {"chart", "assignment"}}
    Point,
    /// Evaluate the Gauss seminorm of {"fan", "point", "chart", "polynomial"}
    Seminorm,
    /// Extended tropical hypersurface of {"fan", "polynomial"}
    Hypersurface,
    /// Whether a series solution {"fan", "polynomial", "point"} tropicalizes into the hypersurface
    Membership,
    /// Characteristic fan of a log atlas {"atlas": ...}
    Characteristic,
    /// Seeded check of the section and retraction identities on the built-in charts
    Check {
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
}

#[derive(Subcommand, Debug)]
enum DualAction {
    /// Build the dual complex of {"components", "strata"}
    Build,
}

/// Errors of the front end: malformed input (exit 2) or a domain error (exit 1).
#[derive(Debug)]
pub enum CliError {
    Schema(String),
    Domain(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema(m) => CliError::Schema(m),
            e => CliError::Domain(e),
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Schema(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

pub enum Output {
    Json(Value),
    Text(String),
}

fn field<T: for<'de> Deserialize<'de>>(v: &Value, name: &str) -> CliResult<T> {
    let f = v
        .get(name)
        .ok_or_else(|| CliError::Schema(format!("missing field {name:?}")))?;
    serde_json::from_value(f.clone()).map_err(|e| CliError::Schema(format!("field {name:?}: {e}")))
}

fn opt_field<T: for<'de> Deserialize<'de>>(v: &Value, name: &str) -> CliResult<Option<T>> {
    match v.get(name) {
        None | Some(Value::Null) => Ok(None),
        Some(_) => field(v, name).map(Some),
    }
}

fn tagged(mut v: Value) -> Value {
    if let Value::Object(m) = &mut v {
        m.insert("schema".into(), Value::String(SCHEMA.into()));
    }
    v
}

#[derive(Deserialize)]
struct ConeInput {
    #[serde(alias = "lattice_rank")]
    rank: usize,
    #[serde(default)]
    generators: Vec<Vec<i64>>,
    #[serde(default)]
    rays: Vec<Vec<i64>>,
    #[serde(default)]
    lineality: Vec<Vec<i64>>,
    #[serde(default)]
    inequalities: Vec<Vec<i64>>,
    #[serde(default)]
    equations: Vec<Vec<i64>>,
}

impl ConeInput {
    fn build(&self) -> CliResult<Cone> {
        let mut gens = self.generators.clone();
        gens.extend(self.rays.iter().cloned());
        for l in &self.lineality {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x).collect());
        }
        if gens.is_empty() && (!self.inequalities.is_empty() || !self.equations.is_empty()) {
            return Ok(Cone::from_inequalities(self.rank, &self.inequalities, &self.equations)?);
        }
        Ok(Cone::from_generators(self.rank, &gens)?)
    }
}

fn cone_json(c: &Cone) -> Value {
    json!({
        "rank": c.lattice_rank(),
        "rays": c.rays(),
        "lineality": c.lineality(),
        "inequalities": c.inequalities(),
        "equations": c.equations(),
        "dim": c.dim(),
    })
}

/// A fan given by name, by its cones, or in full.
#[derive(Deserialize)]
#[serde(untagged)]
enum FanSource {
    Builtin(String),
    Polyhedral { cones: Vec<ConeInput> },
    Full(FanJson),
}

impl FanSource {
    fn build(&self) -> CliResult<KatoFan> {
        match self {
            FanSource::Builtin(name) => Ok(builtin_fan(name)?),
            FanSource::Polyhedral { cones } => {
                let cones = cones.iter().map(ConeInput::build).collect::<CliResult<Vec<_>>>()?;
                Ok(fan_from_polyhedral_fan(&cones)?)
            }
            FanSource::Full(j) => Ok(KatoFan::from_json(j)?),
        }
    }

    fn cones(&self) -> CliResult<Vec<Cone>> {
        match self {
            FanSource::Builtin(name) => Ok(toric_fan(name)?),
            FanSource::Polyhedral { cones } => cones.iter().map(ConeInput::build).collect(),
            FanSource::Full(_) => Err(CliError::Schema("a polyhedral fan (name or cones) is required".into())),
        }
    }
}

fn fan_json(f: &KatoFan) -> Value {
    let mut v = serde_json::to_value(f.to_json()).expect("fan serializes");
    if let Value::Object(m) = &mut v {
        if let Some(Value::Array(points)) = m.get_mut("points") {
            for (p, fp) in points.iter_mut().zip(f.points()) {
                p["label"] = Value::String(stalk_label(&fp.stalk));
            }
        }
    }
    v
}

fn values_map(values: &[ExtendedValue]) -> Value {
    let m: BTreeMap<String, String> = values.iter().enumerate().map(|(i, v)| (i.to_string(), v.to_string())).collect();
    json!(m)
}

fn parse_values(v: &Value, n: usize) -> CliResult<Vec<ExtendedValue>> {
    match v {
        Value::Array(_) => Ok(serde_json::from_value(v.clone())?),
        Value::Object(m) => {
            let mut out = vec![None; n];
            for (k, val) in m {
                let i: usize = k.parse().map_err(|_| CliError::Schema(format!("value key {k:?} is not an index")))?;
                if i >= n {
                    return Err(CliError::Schema(format!("value index {i} out of range (basis has {n} elements)")));
                }
                out[i] = Some(serde_json::from_value::<ExtendedValue>(val.clone())?);
            }
            out.into_iter()
                .enumerate()
                .map(|(i, v)| v.ok_or_else(|| CliError::Schema(format!("missing value for basis element {i}"))))
                .collect()
        }
        _ => Err(CliError::Schema("values must be an object or an array".into())),
    }
}

fn point_json(fan: &KatoFan, source: &Value, p: &ComplexPoint) -> CliResult<Value> {
    let rho = structure_point(fan, p)?;
    Ok(json!({
        "fan": source,
        "open": fan.point(p.open).id,
        "values": values_map(&p.values),
        "basis": fan.point(p.open).basis(),
        "reduction": fan.point(reduction(p)).id,
        "structure_point": fan.point(rho).id,
    }))
}

fn read_point(fan: &KatoFan, v: &Value) -> CliResult<ComplexPoint> {
    let open: String = field(v, "open")?;
    let x = fan.point_index(&open)?;
    let values = parse_values(v.get("values").unwrap_or(&Value::Null), fan.point(x).basis().len())?;
    Ok(point_from_hom(fan, x, values)?)
}

/// Fills in the truncation order of series given without one.
fn default_truncations(v: &mut Value, truncation: u32) {
    if let Some(Value::Array(series)) = v.get_mut("assignment") {
        for s in series {
            if let Value::Object(m) = s {
                m.entry("truncation").or_insert(json!(truncation));
            }
        }
    }
}

fn with_jobs<T: Send, F: Fn(usize) -> T + Sync>(n: usize, jobs: usize, f: F) -> Vec<T> {
    if jobs <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    let chunk = n.div_ceil(jobs);
    let f = &f;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..n)
            .step_by(chunk)
            .map(|start| s.spawn(move || (start..(start + chunk).min(n)).map(f).collect::<Vec<T>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

impl Cli {
    fn read_input(&self) -> CliResult<Value> {
        let text = match &self.input {
            Some(p) => std::fs::read_to_string(p)
                .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", p.display())))?,
            None => {
                let mut s = String::new();
                std::io::Read::read_to_string(&mut std::io::stdin(), &mut s)?;
                s
            }
        };
        let v: Value = serde_json::from_str(&text)?;
        match v.get("schema").and_then(Value::as_str) {
            Some(SCHEMA) => Ok(v),
            Some(other) => Err(CliError::Schema(format!("unsupported schema {other:?}, expected {SCHEMA:?}"))),
            None => Err(CliError::Schema(format!("missing \"schema\": {SCHEMA:?}"))),
        }
    }

    pub fn run(&self) -> CliResult<Output> {
        log::debug!("running {:?}", self.command);
        match &self.command {
            Command::Monoid { action } => self.monoid(action),
            Command::Cone { action } => self.cone(action),
            Command::Fan { action } => self.fan(action),
            Command::Complex { action } => self.complex(action),
            Command::Trop { action } => self.trop(action),
            Command::Dualcx { action } => self.dualcx(action),
        }
    }

    fn monoid(&self, action: &MonoidAction) -> CliResult<Output> {
        let input = self.read_input()?;
        let p: AffineMonoid = field(&input, "monoid")?;
        let out = match action {
            MonoidAction::HilbertBasis => json!({ "hilbert_basis": p.hilbert_basis()? }),
            MonoidAction::Primes => {
                let primes = p.primes()?;
                let list: Vec<Value> = primes
                    .iter()
                    .map(|q| {
                        json!({
                            "face_generators": q.face_generators,
                            "face": q.face_generators.iter().map(|&i| p.generators()[i].clone()).collect::<Vec<_>>(),
                        })
                    })
                    .collect();
                json!({ "count": list.len(), "primes": list })
            }
            MonoidAction::Saturate => json!({ "monoid": p.saturate()? }),
            MonoidAction::Sharp => {
                let d = p.decompose_sharp()?;
                json!({ "sharp": d.sharp, "unit_rank": d.unit_rank, "torsion": d.torsion })
            }
            MonoidAction::Contains => {
                let v: Vec<i64> = field(&input, "element")?;
                json!({ "element": v, "contains": p.contains(&v)?, "decomposition": p.decompose(&v)? })
            }
            MonoidAction::Cone => json!({ "cone": cone_json(&cone_of_monoid(&p)?) }),
            MonoidAction::Isomorphic => {
                let q: AffineMonoid = field(&input, "other")?;
                json!({ "isomorphic": p.is_isomorphic(&q)? })
            }
        };
        Ok(Output::Json(out))
    }

    fn cone(&self, action: &ConeAction) -> CliResult<Output> {
        let input = self.read_input()?;
        let c = field::<ConeInput>(&input, "cone")?.build()?;
        let out = match action {
            ConeAction::Dual => json!({ "cone": cone_json(&c.dual()?) }),
            ConeAction::Faces => {
                let faces = c.faces();
                let list: Vec<Value> = faces
                    .faces
                    .iter()
                    .map(|f| json!({ "rays": f, "dim": c.face_dim(f) }))
                    .collect();
                json!({ "count": list.len(), "faces": list })
            }
            ConeAction::HilbertBasis => json!({ "hilbert_basis": cone_hilbert_basis(&c)? }),
            ConeAction::Monoid => json!({ "monoid": monoid_of_cone(&c)? }),
        };
        Ok(Output::Json(out))
    }

    fn fan_output(&self, fan: &KatoFan) -> Output {
        if self.dot {
            Output::Text(fan.to_dot())
        } else {
            Output::Json(json!({ "fan": fan_json(fan), "count": fan.len() }))
        }
    }

    fn fan(&self, action: &FanAction) -> CliResult<Output> {
        match action {
            FanAction::Builtin { name } => {
                if !BUILTIN_FANS.contains(&name.as_str()) {
                    return Err(CliError::Domain(Error::UnknownFan(name.clone())));
                }
                Ok(self.fan_output(&builtin_fan(name)?))
            }
            FanAction::Glue => {
                let input = self.read_input()?;
                let atlas: LogAtlas = field(&input, "atlas")?;
                Ok(self.fan_output(&KatoFan::glue(atlas.charts, atlas.overlaps)?))
            }
            FanAction::Polyhedral => {
                let input = self.read_input()?;
                let cones = match opt_field::<String>(&input, "name")? {
                    Some(name) => toric_fan(&name)?,
                    None => field::<Vec<ConeInput>>(&input, "cones")?
                        .iter()
                        .map(ConeInput::build)
                        .collect::<CliResult<Vec<_>>>()?,
                };
                Ok(self.fan_output(&fan_from_polyhedral_fan(&cones)?))
            }
            FanAction::Show => {
                let input = self.read_input()?;
                let fan = field::<FanSource>(&input, "fan")?.build()?;
                Ok(self.fan_output(&fan))
            }
            FanAction::Check => {
                let input = self.read_input()?;
                let fan = field::<FanSource>(&input, "fan")?.build()?;
                Ok(Output::Json(json!({ "fine_saturated": fan.check_fine_saturated(), "count": fan.len() })))
            }
        }
    }

    fn complex(&self, action: &ComplexAction) -> CliResult<Output> {
        let input = self.read_input()?;
        match action {
            ComplexAction::Strata => {
                let fan = Arc::new(field::<FanSource>(&input, "fan")?.build()?);
                let cx = extended_complex(fan.clone())?;
                let strata: Vec<Value> = with_jobs(cx.strata.len(), self.jobs, |i| {
                    let s = &cx.strata[i];
                    json!({
                        "fan_point": s.id,
                        "dim": s.dim,
                        "f_vector": s.f_vector(),
                        "cells": s.cells.iter().map(|c| json!({
                            "open": fan.point(c.specialization).id,
                            "dim": c.dim,
                            "rays": c.rays,
                        })).collect::<Vec<_>>(),
                    })
                });
                Ok(Output::Json(json!({ "count": strata.len(), "strata": strata })))
            }
            ComplexAction::Point => {
                let source = input.get("fan").cloned().unwrap_or(Value::Null);
                let fan = field::<FanSource>(&input, "fan")?.build()?;
                let p = read_point(&fan, &input)?;
                Ok(Output::Json(json!({ "point": point_json(&fan, &source, &p)? })))
            }
            ComplexAction::Equal => {
                let name: String = field(&input, "quotient")?;
                let g = builtin_quotient(&name)?;
                let x = read_point(&g.base, input.get("x").unwrap_or(&Value::Null))?;
                let y = read_point(&g.base, input.get("y").unwrap_or(&Value::Null))?;
                let class = g.class_of(&x)?;
                let source = json!(name);
                let class_json = class
                    .iter()
                    .map(|p| point_json(&g.base, &source, p))
                    .collect::<CliResult<Vec<_>>>()?;
                Ok(Output::Json(json!({ "equal": class.contains(&y), "class": class_json })))
            }
        }
    }

    fn trop(&self, action: &TropAction) -> CliResult<Output> {
        if let TropAction::Check { samples } = action {
            return self.trop_check(*samples);
        }
        let mut input = self.read_input()?;
        match action {
            TropAction::Point => {
                let source = input.get("fan").cloned().unwrap_or(Value::Null);
                let fan = field::<FanSource>(&input, "fan")?.build()?;
                let point = input.get_mut("point").ok_or_else(|| CliError::Schema("missing field \"point\"".into()))?;
                default_truncations(point, self.truncation);
                let u = if point.get("assignment").is_some() {
                    let x: SeriesPoint = serde_json::from_value(point.clone())?;
                    trop_series_point(&fan, &x)?
                } else {
                    let x: MonomialPoint = serde_json::from_value(point.clone())?;
                    trop_monomial_point(&fan, &x)?
                };
                Ok(Output::Json(json!({ "point": point_json(&fan, &source, &u)? })))
            }
            TropAction::Seminorm => {
                let fan = field::<FanSource>(&input, "fan")?.build()?;
                let u = read_point(&fan, input.get("point").unwrap_or(&Value::Null))?;
                let chart: usize = field(&input, "chart")?;
                let f: LaurentPolynomial = field(&input, "polynomial")?;
                Ok(Output::Json(json!({ "value": gauss_seminorm(&fan, &u, chart, &f)? })))
            }
            TropAction::Hypersurface => {
                let cones = field::<FanSource>(&input, "fan")?.cones()?;
                let f: LaurentPolynomial = field(&input, "polynomial")?;
                let h = tropical_hypersurface(&cones, &f)?;
                Ok(Output::Json(hypersurface_json(&h)))
            }
            TropAction::Membership => {
                let cones = field::<FanSource>(&input, "fan")?.cones()?;
                let f: LaurentPolynomial = field(&input, "polynomial")?;
                let point = input.get_mut("point").ok_or_else(|| CliError::Schema("missing field \"point\"".into()))?;
                default_truncations(point, self.truncation);
                let x: SeriesPoint = serde_json::from_value(point.clone())?;
                let h = tropical_hypersurface(&cones, &f)?;
                let member = trop_membership(&h, &f, &x)?;
                let u = trop_series_point(&h.fan, &x)?;
                let source = input.get("fan").cloned().unwrap_or(Value::Null);
                Ok(Output::Json(json!({ "member": member, "trop": point_json(&h.fan, &source, &u)? })))
            }
            TropAction::Characteristic => {
                let atlas: LogAtlas = field(&input, "atlas")?;
                let (fan, maps) = characteristic_fan(&atlas)?;
                let strict = maps.iter().map(|m| m.is_strict()).collect::<crate::Result<Vec<_>>>()?;
                Ok(Output::Json(json!({ "fan": fan_json(&fan), "count": fan.len(), "charts_strict": strict })))
            }
            TropAction::Check { .. } => unreachable!("handled above"),
        }
    }

    fn trop_check(&self, samples: usize) -> CliResult<Output> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut report = Vec::new();
        for name in BUILTIN_FANS {
            let fan = builtin_fan(name)?;
            for chart in 0..fan.charts().len() {
                let mut section_ok = 0;
                let mut retraction_ok = 0;
                for _ in 0..samples {
                    let x = trop::sample::monomial_point(&mut rng, &fan, chart)?;
                    let u = trop_monomial_point(&fan, &x)?;
                    let back = trop_monomial_point(&fan, &gauss_section(&fan, &u, chart)?)?;
                    section_ok += usize::from(back == u);
                    let s = trop::sample::series_point(&mut rng, &fan, chart, self.truncation)?;
                    let f = trop::sample::polynomial(&mut rng, &fan.charts()[chart], 5, 4)?;
                    let lhs = retract_series_point(&fan, &s, &f)?;
                    let rhs = gauss_seminorm(&fan, &trop_series_point(&fan, &s)?, chart, &f)?;
                    retraction_ok += usize::from(lhs == rhs);
                }
                report.push(json!({
                    "fan": name,
                    "chart": chart,
                    "samples": samples,
                    "section": section_ok,
                    "retraction": retraction_ok,
                }));
            }
        }
        let all = report
            .iter()
            .all(|r| r["section"] == r["samples"] && r["retraction"] == r["samples"]);
        Ok(Output::Json(json!({ "seed": self.seed, "passed": all, "charts": report })))
    }

    fn dualcx(&self, action: &DualAction) -> CliResult<Output> {
        let input = self.read_input()?;
        match action {
            DualAction::Build => {
                let data: DualComplexInput = serde_json::from_value(input)?;
                let d = dual_complex(&data)?;
                Ok(Output::Json(json!({ "counts": d.counts(), "simplices": d.simplices })))
            }
        }
    }
}

fn hypersurface_json(h: &trop::Hypersurface) -> Value {
    let strata: Vec<Value> = h
        .strata
        .iter()
        .map(|s| {
            json!({
                "fan_point": s.fan_point,
                "face": s.face,
                "coordinates": s.coordinates,
                "cones": s.cones.iter().map(|c| json!({ "rays": c.rays(), "dim": c.dim() })).collect::<Vec<_>>(),
            })
        })
        .collect();
    json!({ "strata": strata })
}

fn emit(out: &Option<PathBuf>, text: &str) -> std::io::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

fn render(v: Value) -> String {
    let mut s = serde_json::to_string_pretty(&tagged(v)).expect("json renders");
    s.push('\n');
    s
}

/// Entry point of the binary; returns the process exit status.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::new().filter("KATOFAN_LOG")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let (code, text) = match cli.run() {
        Ok(Output::Json(v)) => (0, render(v)),
        Ok(Output::Text(t)) => (0, t),
        Err(CliError::Schema(m)) => {
            log::error!("schema error: {m}");
            (2, render(json!({ "error": { "kind": "schema", "message": m } })))
        }
        Err(CliError::Domain(e)) => {
            log::error!("{e}");
            (1, render(json!({ "error": { "kind": e.kind(), "message": e.to_string() } })))
        }
    };
    if let Err(e) = emit(&cli.out, &text) {
        eprintln!("cannot write output: {e}");
        return 2;
    }
    code
}
