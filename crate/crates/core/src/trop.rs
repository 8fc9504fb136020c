//! Tropicalization over a trivially valued field.
//!
//! Values are additive (`-log` of absolute values). A point of a chart is
//! either given by its values on the chart generators or by truncated power
//! series in `t`, whose orders of vanishing give the values.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::complex::{check_additive, evaluate, point_from_hom, ComplexPoint, ExtendedValue};
use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::fan::{fan_from_polyhedral_fan, ChartHom, FanMorphism, GluingDatum, KatoFan};
use crate::lattice::{dot, kernel_vectors, mat_vec_i64, solve_integer};
use crate::monoid::AffineMonoid;

pub const DEFAULT_TRUNCATION: u32 = 32;

/// An element of `Q[[t]]` known modulo `t^truncation_order`, or the exact
/// zero series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSeries {
    terms: Vec<(u32, BigRational)>,
    truncation_order: u32,
    exact_zero: bool,
}

impl TruncatedSeries {
    /// Terms must have distinct exponents below the truncation order. An
    /// empty term list is the zero series.
    pub fn new(mut terms: Vec<(u32, BigRational)>, truncation_order: u32) -> Result<Self> {
        terms.retain(|(_, c)| !c.is_zero());
        terms.sort_by_key(|(e, _)| *e);
        if terms.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidSeries("repeated exponent".into()));
        }
        if let Some((e, _)) = terms.iter().find(|(e, _)| *e >= truncation_order) {
            return Err(Error::InvalidSeries(format!(
                "exponent {e} is not below the truncation order {truncation_order}"
            )));
        }
        let exact_zero = terms.is_empty();
        Ok(Self {
            terms,
            truncation_order,
            exact_zero,
        })
    }

    pub fn zero(truncation_order: u32) -> Self {
        Self {
            terms: Vec::new(),
            truncation_order,
            exact_zero: true,
        }
    }

    pub fn one(truncation_order: u32) -> Self {
        Self::monomial(0, BigRational::one(), truncation_order)
    }

    /// `c t^e`, or a series vanishing to the truncation order when `e` is too big.
    pub fn monomial(e: u32, c: BigRational, truncation_order: u32) -> Self {
        let exact_zero = c.is_zero();
        let terms = if e < truncation_order && !exact_zero {
            vec![(e, c)]
        } else {
            Vec::new()
        };
        Self {
            terms,
            truncation_order,
            exact_zero,
        }
    }

    pub fn from_ints(terms: &[(u32, i64)], truncation_order: u32) -> Result<Self> {
        Self::new(
            terms
                .iter()
                .map(|&(e, c)| (e, BigRational::from_integer(BigInt::from(c))))
                .collect(),
            truncation_order,
        )
    }

    pub fn terms(&self) -> &[(u32, BigRational)] {
        &self.terms
    }

    pub fn truncation_order(&self) -> u32 {
        self.truncation_order
    }

    pub fn is_exact_zero(&self) -> bool {
        self.exact_zero
    }

    /// Zero modulo the truncation order.
    pub fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }

    /// Order of vanishing; `∞` only for the exact zero series.
    pub fn order(&self) -> Result<ExtendedValue> {
        match self.terms.first() {
            Some((e, _)) => Ok(ExtendedValue::int(i64::from(*e))),
            None if self.exact_zero => Ok(ExtendedValue::Infinity),
            None => Err(Error::IndeterminateOrder(self.truncation_order)),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.exact_zero {
            return other.clone();
        }
        if other.exact_zero {
            return self.clone();
        }
        let n = self.truncation_order.min(other.truncation_order);
        let mut acc: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (e, c) in self.terms.iter().chain(&other.terms) {
            if *e < n {
                *acc.entry(*e).or_insert_with(BigRational::zero) += c;
            }
        }
        Self {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            truncation_order: n,
            exact_zero: false,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.truncation_order.min(other.truncation_order);
        if self.exact_zero || other.exact_zero {
            return Self::zero(n);
        }
        let mut acc: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1 + e2;
                if e < n {
                    *acc.entry(e).or_insert_with(BigRational::zero) += c1 * c2;
                }
            }
        }
        Self {
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            truncation_order: n,
            exact_zero: false,
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.truncation_order);
        }
        Self {
            terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect(),
            ..self.clone()
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one(self.truncation_order);
        for _ in 0..k {
            out = out.mul(self);
        }
        out
    }

    /// Inverse of a series with nonzero constant term.
    pub fn inverse(&self) -> Result<Self> {
        let Some((0, a0)) = self.terms.first().cloned() else {
            return Err(Error::InvalidSeries("only series with nonzero constant term are invertible".into()));
        };
        let n = self.truncation_order;
        let coeff = |e: u32| {
            self.terms
                .iter()
                .find(|(f, _)| *f == e)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(BigRational::zero)
        };
        let mut b: Vec<BigRational> = Vec::with_capacity(n as usize);
        for k in 0..n {
            if k == 0 {
                b.push(a0.recip());
                continue;
            }
            let mut s = BigRational::zero();
            for j in 1..=k {
                s += coeff(j) * &b[(k - j) as usize];
            }
            b.push(-s / &a0);
        }
        Ok(Self {
            terms: b
                .into_iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e as u32, c))
                .collect(),
            truncation_order: n,
            exact_zero: false,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    terms: Vec<(u32, String)>,
    #[serde(default = "default_truncation")]
    truncation: u32,
}

fn default_truncation() -> u32 {
    DEFAULT_TRUNCATION
}

fn parse_rational(s: &str) -> Result<BigRational> {
    s.trim()
        .parse()
        .map_err(|_| Error::Schema(format!("{s:?} is not a rational number")))
}

impl Serialize for TruncatedSeries {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesJson {
            terms: self.terms.iter().map(|(e, c)| (*e, c.to_string())).collect(),
            truncation: self.truncation_order,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SeriesJson::deserialize(d)?;
        let terms = j
            .terms
            .iter()
            .map(|(e, c)| Ok((*e, parse_rational(c)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        TruncatedSeries::new(terms, j.truncation).map_err(serde::de::Error::custom)
    }
}

/// `sum a_p χ^p` with exponents in the lattice of a chart.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPolynomial {
    terms: Vec<(Vec<i64>, BigRational)>,
}

impl LaurentPolynomial {
    pub fn new(terms: Vec<(Vec<i64>, BigRational)>) -> Result<Self> {
        let mut merged: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
        let rank = terms.first().map(|t| t.0.len());
        for (p, c) in terms {
            if Some(p.len()) != rank {
                return Err(Error::InvalidPolynomial("exponents of different lengths".into()));
            }
            if merged.contains_key(&p) {
                return Err(Error::InvalidPolynomial(format!("exponent {p:?} appears twice")));
            }
            merged.insert(p, c);
        }
        Ok(Self {
            terms: merged.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        })
    }

    pub fn from_ints(terms: &[(Vec<i64>, i64)]) -> Result<Self> {
        Self::new(
            terms
                .iter()
                .map(|(p, c)| (p.clone(), BigRational::from_integer(BigInt::from(*c))))
                .collect(),
        )
    }

    pub fn terms(&self) -> &[(Vec<i64>, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = &Vec<i64>> {
        self.terms.iter().map(|(p, _)| p)
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exponent: Vec<i64>,
    coefficient: String,
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    terms: Vec<TermJson>,
}

impl Serialize for LaurentPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolynomialJson {
            terms: self
                .terms
                .iter()
                .map(|(p, c)| TermJson {
                    exponent: p.clone(),
                    coefficient: c.to_string(),
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LaurentPolynomial {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = PolynomialJson::deserialize(d)?;
        let terms = j
            .terms
            .into_iter()
            .map(|t| Ok((t.exponent, parse_rational(&t.coefficient)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        LaurentPolynomial::new(terms).map_err(serde::de::Error::custom)
    }
}

/// Charts with identifications of localizations, as for [`KatoFan::glue`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogAtlas {
    pub charts: Vec<AffineMonoid>,
    #[serde(default)]
    pub overlaps: GluingDatum,
}

/// The glued fan and the strict maps `Spec P_i -> F` of the charts.
pub fn characteristic_fan(atlas: &LogAtlas) -> Result<(Arc<KatoFan>, Vec<FanMorphism>)> {
    let fan = Arc::new(KatoFan::glue(atlas.charts.clone(), atlas.overlaps.clone())?);
    if !fan.check_fine_saturated() {
        return Err(Error::NotFineSaturated("glued fan has a stalk that is not sharp and saturated".into()));
    }
    let mut maps = Vec::with_capacity(atlas.charts.len());
    for (i, p) in atlas.charts.iter().enumerate() {
        let chart = Arc::new(KatoFan::spec(p)?);
        let n = p.ambient_rank();
        let f = FanMorphism::from_chart_homs(
            chart,
            fan.clone(),
            &[ChartHom {
                source_chart: 0,
                target_chart: i,
                map: crate::lattice::identity_i64(n),
            }],
        )?;
        if !f.is_strict()? {
            return Err(Error::InvalidGluing {
                a: i,
                b: i,
                reason: "chart map is not strict".into(),
            });
        }
        maps.push(f);
    }
    Ok((fan, maps))
}

/// Values of `-log|χ^g|` on the generators of a chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonomialPoint {
    pub chart: usize,
    pub values: Vec<ExtendedValue>,
}

/// Power series assigned to the generators of a chart.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesPoint {
    pub chart: usize,
    pub assignment: Vec<TruncatedSeries>,
}

fn chart_of(fan: &KatoFan, chart: usize) -> Result<&AffineMonoid> {
    fan.charts()
        .get(chart)
        .ok_or_else(|| Error::UnknownPoint(format!("chart {chart}")))
}

/// The smallest face of a chart: the generators that are units.
fn unit_face(chart: &AffineMonoid) -> Result<Vec<usize>> {
    Ok(chart.face_of(&vec![0; chart.ambient_rank()])?.unwrap_or_default())
}

/// The cone complex point of a monomial point, anchored at the closed
/// point of its chart and then made canonical.
pub fn trop_monomial_point(fan: &KatoFan, x: &MonomialPoint) -> Result<ComplexPoint> {
    let chart = chart_of(fan, x.chart)?;
    check_additive(chart, &x.values)?;
    let face = unit_face(chart)?;
    let anchor = fan.chart_point(x.chart, &face)?;
    let values = fan
        .point(anchor)
        .basis()
        .iter()
        .map(|h| evaluate(chart, &x.values, &fan.stalk_to_chart(x.chart, &face, h)?))
        .collect::<Result<Vec<_>>>()?;
    point_from_hom(fan, anchor, values)
}

/// The series of `χ^p` at a series point.
pub fn monomial_series(chart: &AffineMonoid, x: &SeriesPoint, p: &[i64]) -> Result<TruncatedSeries> {
    let coeffs = chart.decompose(p)?.ok_or_else(|| Error::ExponentOutsideChart(p.to_vec()))?;
    let n = x.assignment.iter().map(TruncatedSeries::truncation_order).min().unwrap_or(DEFAULT_TRUNCATION);
    let mut out = TruncatedSeries::one(n);
    for (c, s) in coeffs.iter().zip(&x.assignment) {
        let factor = if *c >= 0 {
            s.pow(*c as u32)
        } else {
            s.inverse()?.pow(c.unsigned_abs() as u32)
        };
        out = out.mul(&factor);
    }
    Ok(out)
}

/// Checks the assignment against a basis of the relations among the chart
/// generators.
pub fn check_series_point(fan: &KatoFan, x: &SeriesPoint) -> Result<()> {
    let chart = chart_of(fan, x.chart)?;
    let gens = chart.generators();
    if x.assignment.len() != gens.len() {
        return Err(Error::InvalidSeries(format!(
            "expected {} series, got {}",
            gens.len(),
            x.assignment.len()
        )));
    }
    let d = chart.ambient_rank();
    let rows: Vec<Vec<i64>> = (0..d).map(|j| gens.iter().map(|g| g[j]).collect()).collect();
    let n = x.assignment.iter().map(TruncatedSeries::truncation_order).min().unwrap_or(DEFAULT_TRUNCATION);
    for k in kernel_vectors(&rows, gens.len())? {
        let mut lhs = TruncatedSeries::one(n);
        let mut rhs = TruncatedSeries::one(n);
        for (c, s) in k.iter().zip(&x.assignment) {
            if *c > 0 {
                lhs = lhs.mul(&s.pow(*c as u32));
            } else if *c < 0 {
                rhs = rhs.mul(&s.pow(c.unsigned_abs() as u32));
            }
        }
        let diff = lhs.add(&rhs.scale(&-BigRational::one()));
        if !diff.vanishes() {
            return Err(Error::InvalidSeries(format!("relation {k:?} among the generators fails")));
        }
    }
    Ok(())
}

/// Values `u(s) = ord χ^s(x)` on the stalk basis at the chart's closed point.
pub fn trop_series_point(fan: &KatoFan, x: &SeriesPoint) -> Result<ComplexPoint> {
    check_series_point(fan, x)?;
    let chart = chart_of(fan, x.chart)?;
    let face = unit_face(chart)?;
    let anchor = fan.chart_point(x.chart, &face)?;
    let values = fan
        .point(anchor)
        .basis()
        .iter()
        .map(|h| monomial_series(chart, x, &fan.stalk_to_chart(x.chart, &face, h)?)?.order())
        .collect::<Result<Vec<_>>>()?;
    point_from_hom(fan, anchor, values)
}

/// Orders of the assigned series on the chart generators.
pub fn series_orders(x: &SeriesPoint) -> Result<Vec<ExtendedValue>> {
    x.assignment.iter().map(TruncatedSeries::order).collect()
}

fn point_of_chart_face(fan: &KatoFan, chart: usize, face: Vec<usize>) -> Result<usize> {
    fan.chart_point(chart, &face)
}

/// `r(x)`: the fan point whose face consists of generators of order zero.
pub fn series_reduction(fan: &KatoFan, x: &SeriesPoint) -> Result<usize> {
    let orders = series_orders(x)?;
    let face: Vec<usize> = (0..orders.len()).filter(|&i| orders[i].is_zero()).collect();
    point_of_chart_face(fan, x.chart, face)
}

/// `ρ(x)`: the fan point whose face consists of generators of finite order.
pub fn series_structure_point(fan: &KatoFan, x: &SeriesPoint) -> Result<usize> {
    let orders = series_orders(x)?;
    let face: Vec<usize> = (0..orders.len()).filter(|&i| !orders[i].is_infinite()).collect();
    point_of_chart_face(fan, x.chart, face)
}

/// `min_p (u(p))` over the support: the Gauss seminorm in additive form.
pub fn gauss_seminorm(fan: &KatoFan, u: &ComplexPoint, chart: usize, f: &LaurentPolynomial) -> Result<ExtendedValue> {
    let monoid = chart_of(fan, chart)?;
    let mut best = ExtendedValue::Infinity;
    for p in f.support() {
        if !monoid.contains(p)? {
            return Err(Error::ExponentOutsideChart(p.clone()));
        }
        best = best.min(u.value_on_chart(fan, chart, p)?);
    }
    Ok(best)
}

/// The retraction evaluated on `f`: `min_p ord χ^p(x)` over the support.
pub fn retract_series_point(fan: &KatoFan, x: &SeriesPoint, f: &LaurentPolynomial) -> Result<ExtendedValue> {
    check_series_point(fan, x)?;
    let chart = chart_of(fan, x.chart)?;
    let mut best = ExtendedValue::Infinity;
    for p in f.support() {
        best = best.min(monomial_series(chart, x, p)?.order()?);
    }
    Ok(best)
}

/// The monomial point of the Gauss seminorm restricted to the generators.
pub fn gauss_section(fan: &KatoFan, u: &ComplexPoint, chart: usize) -> Result<MonomialPoint> {
    let monoid = chart_of(fan, chart)?;
    let values = monoid
        .generators()
        .iter()
        .map(|g| {
            let f = LaurentPolynomial::new(vec![(g.clone(), BigRational::one())])?;
            gauss_seminorm(fan, u, chart, &f)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MonomialPoint { chart, values })
}

/// `f(x)` as a series.
pub fn evaluate_polynomial(chart: &AffineMonoid, x: &SeriesPoint, f: &LaurentPolynomial) -> Result<TruncatedSeries> {
    let n = x.assignment.iter().map(TruncatedSeries::truncation_order).min().unwrap_or(DEFAULT_TRUNCATION);
    let mut out = TruncatedSeries::zero(n);
    for (p, c) in f.terms() {
        out = out.add(&monomial_series(chart, x, p)?.scale(c));
    }
    Ok(out)
}

/// The series point `f ∘ x` on the target chart of a chart map.
pub fn push_series_point(
    source_chart: &AffineMonoid,
    hom: &ChartHom,
    target_chart: &AffineMonoid,
    x: &SeriesPoint,
) -> Result<SeriesPoint> {
    let assignment = target_chart
        .generators()
        .iter()
        .map(|g| monomial_series(source_chart, x, &mat_vec_i64(&hom.map, g)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SeriesPoint {
        chart: hom.target_chart,
        assignment,
    })
}

/// The piece of the extended tropical hypersurface in one stratum.
#[derive(Clone, Debug, Serialize)]
pub struct HypersurfaceStratum {
    pub fan_point: String,
    /// Rays of the cone `τ` of the stratum.
    pub face: Vec<Vec<i64>>,
    /// Basis of `τ^⊥ ∩ M`; coordinates on the stratum are pairings with it.
    pub coordinates: Vec<Vec<i64>>,
    pub cones: Vec<Cone>,
}

#[derive(Clone, Debug)]
pub struct Hypersurface {
    pub fan: Arc<KatoFan>,
    pub cones: Vec<Cone>,
    pub strata: Vec<HypersurfaceStratum>,
}

fn project_to_stratum(basis: &[Vec<i64>], u: &[i64]) -> Vec<i64> {
    basis.iter().map(|m| dot(m, u)).collect()
}

/// Pieces `{u in σ : <u,p_j> = <u,p_k> <= <u,p_i> for all i}` of the corner
/// locus of `min_p <u,p>` inside the cones of the fan.
fn corner_pieces(cones: &[Cone], f: &LaurentPolynomial) -> Result<Vec<Cone>> {
    let n = cones[0].lattice_rank();
    let terms: Vec<&Vec<i64>> = f.support().collect();
    let diff = |a: &[i64], b: &[i64]| a.iter().zip(b).map(|(x, y)| x - y).collect::<Vec<i64>>();
    let mut pieces: Vec<Cone> = Vec::new();
    for sigma in cones {
        for j in 0..terms.len() {
            for k in j + 1..terms.len() {
                let mut ineq = sigma.inequalities().to_vec();
                ineq.extend(terms.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, p)| diff(p, terms[j])));
                let mut eq = sigma.equations().to_vec();
                eq.push(diff(terms[j], terms[k]));
                let piece = Cone::from_inequalities(n, &ineq, &eq)?;
                if !pieces.contains(&piece) {
                    pieces.push(piece);
                }
            }
        }
    }
    Ok(pieces)
}

/// The closure of the corner locus of `f` in the partial compactification
/// of the fan. A piece `C` meets the stratum of `τ` in the projection of `C`
/// exactly when `C` meets the relative interior of `τ`.
pub fn tropical_hypersurface(cones: &[Cone], f: &LaurentPolynomial) -> Result<Hypersurface> {
    if f.is_zero() {
        return Err(Error::InvalidPolynomial("the zero polynomial has no hypersurface".into()));
    }
    let fan = Arc::new(fan_from_polyhedral_fan(cones)?);
    let poly = fan.polyhedral().expect("built from cones").clone();
    let n = cones[0].lattice_rank();
    for p in f.support() {
        if p.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: p.len(),
            });
        }
        let regular = poly
            .chart_cones
            .iter()
            .any(|&c| cones[c].rays().iter().all(|r| dot(r, p) >= 0));
        if !regular {
            return Err(Error::ExponentOutsideChart(p.clone()));
        }
    }
    let corner = corner_pieces(cones, f)?;
    let mut strata = Vec::with_capacity(cones.len());
    for (ti, tau) in cones.iter().enumerate() {
        let basis = kernel_vectors(tau.rays(), n)?;
        let r = basis.len();
        let mut pieces: Vec<Cone> = Vec::new();
        for c in &corner {
            let mut ineq = c.inequalities().to_vec();
            ineq.extend(tau.inequalities().iter().cloned());
            let mut eq = c.equations().to_vec();
            eq.extend(tau.equations().iter().cloned());
            let meet = Cone::from_inequalities(n, &ineq, &eq)?;
            let mut inner = vec![0i64; n];
            for v in meet.rays() {
                for (a, b) in inner.iter_mut().zip(v) {
                    *a += b;
                }
            }
            if !tau.in_relative_interior(&inner) {
                continue;
            }
            let images: Vec<Vec<i64>> = c.rays().iter().map(|v| project_to_stratum(&basis, v)).collect();
            let piece = Cone::from_generators(r, &images)?;
            if !pieces.contains(&piece) {
                pieces.push(piece);
            }
        }
        let maximal: Vec<Cone> = pieces
            .iter()
            .filter(|c| !pieces.iter().any(|d| d != *c && c.rays().iter().all(|v| d.contains(v))))
            .cloned()
            .collect();
        strata.push(HypersurfaceStratum {
            fan_point: fan.point(poly.cone_points[ti]).id.clone(),
            face: tau.rays().to_vec(),
            coordinates: basis,
            cones: maximal,
        });
    }
    Ok(Hypersurface {
        fan,
        cones: cones.to_vec(),
        strata,
    })
}

impl Hypersurface {
    /// Whether a rational point of the stratum of `cones[tau]`, in the
    /// stratum's coordinates, lies on the hypersurface.
    pub fn contains(&self, tau: usize, y: &[BigRational]) -> bool {
        let s = &self.strata[tau];
        if s.coordinates.is_empty() {
            return !s.cones.is_empty();
        }
        s.cones.iter().any(|c| c.contains_rational(y))
    }

    /// Stratum index and coordinates of a cone complex point of the fan.
    pub fn locate(&self, u: &ComplexPoint) -> Result<(usize, Vec<BigRational>)> {
        let poly = self.fan.polyhedral().expect("built from cones");
        let rho = crate::complex::structure_point(&self.fan, u)?;
        let tau = poly
            .cone_points
            .iter()
            .position(|&p| p == rho)
            .ok_or_else(|| Error::UnknownPoint(self.fan.point(rho).id.clone()))?;
        // any chart containing the reduction sees u on its monoid
        let chart = (0..self.fan.charts().len())
            .find(|&c| !self.fan.chart_faces_of(c, u.open).is_empty())
            .ok_or_else(|| Error::UnknownPoint(self.fan.point(u.open).id.clone()))?;
        let monoid = &self.fan.charts()[chart];
        let finite: Vec<usize> = (0..monoid.generators().len())
            .filter(|&i| {
                matches!(u.value_on_chart(&self.fan, chart, &monoid.generators()[i]), Ok(ExtendedValue::Finite(_)))
            })
            .collect();
        let gens: Vec<Vec<i64>> = finite.iter().map(|&i| monoid.generators()[i].clone()).collect();
        let mut y = Vec::new();
        for m in &self.strata[tau].coordinates {
            let c = solve_integer(&gens, m)?.ok_or_else(|| Error::UnknownPoint("coordinate outside the face".into()))?;
            let mut acc = BigRational::zero();
            for (k, g) in c.iter().zip(&gens) {
                let ExtendedValue::Finite(q) = u.value_on_chart(&self.fan, chart, g)? else {
                    unreachable!("finite generators")
                };
                acc += BigRational::from_integer(BigInt::from(*k)) * q;
            }
            y.push(acc);
        }
        Ok((tau, y))
    }
}

/// Whether the tropicalization of a solution of `f` lies on the computed
/// hypersurface. The series point must satisfy `f(x) = 0` to its truncation.
pub fn trop_membership(h: &Hypersurface, f: &LaurentPolynomial, x: &SeriesPoint) -> Result<bool> {
    let chart = chart_of(&h.fan, x.chart)?;
    check_series_point(&h.fan, x)?;
    let value = evaluate_polynomial(chart, x, f)?;
    if !value.vanishes() {
        return Err(Error::NotOnHypersurface(format!(
            "f(x) has order {}",
            value.order().map_or_else(|e| e.to_string(), |o| o.to_string())
        )));
    }
    let u = trop_series_point(&h.fan, x)?;
    let (tau, y) = h.locate(&u)?;
    Ok(h.contains(tau, &y))
}

/// Irreducible components of one intersection `D_{i_0} ∩ ... ∩ D_{i_k}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionStratum {
    pub divisors: Vec<usize>,
    pub components: Vec<IntersectionComponent>,
}

/// `contained_in[j]` names the component of the intersection without
/// `divisors[j]` that contains this one; it may be left empty when that
/// intersection is irreducible.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionComponent {
    pub label: String,
    #[serde(default)]
    pub contained_in: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualComplexInput {
    pub components: Vec<String>,
    #[serde(default)]
    pub strata: Vec<IntersectionStratum>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Simplex {
    pub label: String,
    pub vertices: Vec<usize>,
    /// `faces[j]` indexes the simplex of one lower dimension glued to the
    /// face opposite `vertices[j]`.
    pub faces: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DualComplex {
    pub simplices: Vec<Vec<Simplex>>,
}

impl DualComplex {
    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(Vec::len).collect()
    }
}

pub fn dual_complex(input: &DualComplexInput) -> Result<DualComplex> {
    let l = input.components.len();
    let bad = |m: String| Error::InconsistentAttachment(m);
    let mut by_subset: HashMap<Vec<usize>, &IntersectionStratum> = HashMap::new();
    for s in &input.strata {
        if s.divisors.len() < 2 {
            return Err(bad(format!("{:?}: intersections need at least two divisors", s.divisors)));
        }
        if s.divisors.windows(2).any(|w| w[0] >= w[1]) || s.divisors.iter().any(|&i| i >= l) {
            return Err(bad(format!("{:?} is not an increasing list of divisor indices", s.divisors)));
        }
        if by_subset.insert(s.divisors.clone(), s).is_some() {
            return Err(bad(format!("{:?} is listed twice", s.divisors)));
        }
    }
    let top = input.strata.iter().map(|s| s.divisors.len()).max().unwrap_or(1);
    let mut simplices: Vec<Vec<Simplex>> = vec![input
        .components
        .iter()
        .enumerate()
        .map(|(i, name)| Simplex {
            label: name.clone(),
            vertices: vec![i],
            faces: Vec::new(),
        })
        .collect()];
    // (subset, label) -> index within its dimension
    let mut index: HashMap<(Vec<usize>, String), usize> = HashMap::new();
    for (i, name) in input.components.iter().enumerate() {
        index.insert((vec![i], name.clone()), i);
    }
    for size in 2..=top {
        let mut level = Vec::new();
        let mut subsets: Vec<&IntersectionStratum> =
            input.strata.iter().filter(|s| s.divisors.len() == size).collect();
        subsets.sort_by(|a, b| a.divisors.cmp(&b.divisors));
        for s in subsets {
            for comp in &s.components {
                if !comp.contained_in.is_empty() && comp.contained_in.len() != size {
                    return Err(bad(format!("{}: expected {size} containing components", comp.label)));
                }
                let mut faces = Vec::with_capacity(size);
                for j in 0..size {
                    let sub: Vec<usize> = s.divisors.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, &d)| d).collect();
                    let target = if let Some(t) = comp.contained_in.get(j) {
                        t.clone()
                    } else if sub.len() == 1 {
                        input.components[sub[0]].clone()
                    } else {
                        let st = by_subset
                            .get(&sub)
                            .ok_or_else(|| bad(format!("{}: intersection {sub:?} is not listed", comp.label)))?;
                        if st.components.len() != 1 {
                            return Err(bad(format!(
                                "{}: intersection {sub:?} is reducible, name the containing component",
                                comp.label
                            )));
                        }
                        st.components[0].label.clone()
                    };
                    let f = *index
                        .get(&(sub.clone(), target.clone()))
                        .ok_or_else(|| bad(format!("{}: no component {target:?} of {sub:?}", comp.label)))?;
                    faces.push(f);
                }
                if index.insert((s.divisors.clone(), comp.label.clone()), level.len()).is_some() {
                    return Err(bad(format!("component {:?} of {:?} is listed twice", comp.label, s.divisors)));
                }
                level.push(Simplex {
                    label: comp.label.clone(),
                    vertices: s.divisors.clone(),
                    faces,
                });
            }
        }
        simplices.push(level);
    }
    // faces of faces must agree: the vertex sets are determined by subsets,
    // and the two ways of dropping two vertices must reach the same simplex
    for k in 2..simplices.len() {
        for s in &simplices[k] {
            for a in 0..s.faces.len() {
                for b in a + 1..s.faces.len() {
                    // dropping b then a versus a then b
                    let via_a = simplices[k - 1][s.faces[a]].faces[b - 1];
                    let via_b = simplices[k - 1][s.faces[b]].faces[a];
                    if via_a != via_b {
                        return Err(bad(format!("faces of {} do not agree", s.label)));
                    }
                }
            }
        }
    }
    Ok(DualComplex { simplices })
}

/// The class of `trop(x)` in a generalized complex whose base is the fan of `x`.
pub fn generalized_trop(
    g: &crate::complex::GeneralizedComplex,
    x: &MonomialPoint,
) -> Result<Vec<ComplexPoint>> {
    let u = trop_monomial_point(&g.base, x)?;
    g.class_of(&u)
}

/// Seeded generators of random points and polynomials on a chart.
pub mod sample {
    use super::*;
    use rand::Rng;

    /// A random lattice point of the dual cone of the chart, with entries
    /// of bounded size, and a random face of the chart: generators outside
    /// the face get the value `∞`.
    fn weight_and_face<R: Rng>(rng: &mut R, chart: &AffineMonoid, bound: i64) -> Result<(Vec<i64>, Vec<bool>)> {
        let d = chart.ambient_rank();
        let dual = chart.cone()?.dual()?;
        let mut a = vec![0i64; d];
        for r in dual.rays() {
            let c = rng.gen_range(0..=bound);
            for (x, y) in a.iter_mut().zip(r) {
                *x += c * y;
            }
        }
        for l in dual.lineality() {
            let c = rng.gen_range(-1..=1);
            for (x, y) in a.iter_mut().zip(l) {
                *x += c * y;
            }
        }
        let primes = chart.primes()?;
        let face = if rng.gen_bool(0.25) {
            primes[rng.gen_range(0..primes.len())].face_generators.clone()
        } else {
            (0..chart.generators().len()).collect()
        };
        let in_face = (0..chart.generators().len()).map(|i| face.contains(&i)).collect();
        Ok((a, in_face))
    }

    pub fn monomial_point<R: Rng>(rng: &mut R, fan: &KatoFan, chart: usize) -> Result<MonomialPoint> {
        let monoid = chart_of(fan, chart)?;
        let (a, in_face) = weight_and_face(rng, monoid, 6)?;
        let den = rng.gen_range(1..=4);
        let values = monoid
            .generators()
            .iter()
            .zip(&in_face)
            .map(|(g, f)| if *f { ExtendedValue::ratio(dot(g, &a), den) } else { ExtendedValue::Infinity })
            .collect();
        Ok(MonomialPoint { chart, values })
    }

    fn unit_series<R: Rng>(rng: &mut R, truncation: u32) -> TruncatedSeries {
        let mut terms = vec![(0u32, nonzero(rng))];
        for e in 1..truncation.min(4) {
            if rng.gen_bool(0.5) {
                terms.push((e, nonzero(rng)));
            }
        }
        TruncatedSeries::new(
            terms
                .into_iter()
                .map(|(e, c)| (e, BigRational::from_integer(BigInt::from(c))))
                .collect(),
            truncation,
        )
        .expect("valid terms")
    }

    fn nonzero<R: Rng>(rng: &mut R) -> i64 {
        let c = rng.gen_range(1..=3);
        if rng.gen_bool(0.5) {
            c
        } else {
            -c
        }
    }

    /// Series `t^<g,a> * prod_j w_j^{g_j}` for unit series `w_j`, so that all
    /// relations among the generators hold; zero outside a random face.
    pub fn series_point<R: Rng>(rng: &mut R, fan: &KatoFan, chart: usize, truncation: u32) -> Result<SeriesPoint> {
        let monoid = chart_of(fan, chart)?;
        let (a, in_face) = weight_and_face(rng, monoid, 2)?;
        let units: Vec<TruncatedSeries> = (0..monoid.ambient_rank()).map(|_| unit_series(rng, truncation)).collect();
        let inverses: Vec<TruncatedSeries> = units.iter().map(|u| u.inverse()).collect::<Result<_>>()?;
        let mut assignment = Vec::with_capacity(monoid.generators().len());
        for (g, f) in monoid.generators().iter().zip(&in_face) {
            if !*f {
                assignment.push(TruncatedSeries::zero(truncation));
                continue;
            }
            let order = u32::try_from(dot(g, &a)).map_err(|_| Error::InvalidSeries("negative order".into()))?;
            let mut s = TruncatedSeries::monomial(order, BigRational::one(), truncation);
            for (j, &e) in g.iter().enumerate() {
                let base = if e >= 0 { &units[j] } else { &inverses[j] };
                s = s.mul(&base.pow(e.unsigned_abs() as u32));
            }
            assignment.push(s);
        }
        Ok(SeriesPoint { chart, assignment })
    }

    /// Up to `max_terms` terms with exponents `sum c_i g_i`, `0 <= c_i <= coeff_bound`.
    pub fn polynomial<R: Rng>(rng: &mut R, chart: &AffineMonoid, max_terms: usize, coeff_bound: i64) -> Result<LaurentPolynomial> {
        let k = rng.gen_range(1..=max_terms);
        let mut terms: BTreeMap<Vec<i64>, BigRational> = BTreeMap::new();
        for _ in 0..k {
            let mut p = vec![0i64; chart.ambient_rank()];
            for g in chart.generators() {
                let c = rng.gen_range(0..=coeff_bound);
                for (x, y) in p.iter_mut().zip(g) {
                    *x += c * y;
                }
            }
            terms.insert(p, BigRational::from_integer(BigInt::from(nonzero(rng))));
        }
        LaurentPolynomial::new(terms.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::{builtin_fan, toric_fan};

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    fn series(terms: &[(u32, i64)]) -> TruncatedSeries {
        TruncatedSeries::from_ints(terms, DEFAULT_TRUNCATION).unwrap()
    }

    fn a2() -> KatoFan {
        builtin_fan("A2").unwrap()
    }

    // N^2 generators are ordered (0,1), (1,0): y first, then x
    fn xy(x: TruncatedSeries, y: TruncatedSeries) -> SeriesPoint {
        SeriesPoint {
            chart: 0,
            assignment: vec![y, x],
        }
    }

    #[test]
    fn series_arithmetic() {
        let a = series(&[(0, 1), (1, 1)]);
        let inv = a.inverse().unwrap();
        let prod = a.mul(&inv);
        assert_eq!(prod.terms(), &[(0, q(1))]);
        assert_eq!(series(&[(3, 2)]).order().unwrap(), ExtendedValue::int(3));
        assert_eq!(TruncatedSeries::zero(8).order().unwrap(), ExtendedValue::Infinity);
        let big = series(&[(20, 1)]);
        assert_eq!(big.mul(&big).order(), Err(Error::IndeterminateOrder(32)));
        let cancel = a.add(&a.scale(&q(-1)));
        assert!(matches!(cancel.order(), Err(Error::IndeterminateOrder(_))));
        assert!(TruncatedSeries::from_ints(&[(40, 1)], 32).is_err());
    }

    #[test]
    fn monomial_tropicalization() {
        let f = a2();
        let x = MonomialPoint {
            chart: 0,
            values: vec![ExtendedValue::int(3), ExtendedValue::int(2)],
        };
        let u = trop_monomial_point(&f, &x).unwrap();
        assert_eq!(u.values, vec![ExtendedValue::int(3), ExtendedValue::int(2)]);
        let apex = trop_monomial_point(&f, &MonomialPoint { chart: 0, values: vec![ExtendedValue::zero(); 2] }).unwrap();
        assert_eq!(f.point(apex.open).rank(), 0);
        let boundary = trop_monomial_point(
            &f,
            &MonomialPoint {
                chart: 0,
                values: vec![ExtendedValue::Infinity, ExtendedValue::int(1)],
            },
        )
        .unwrap();
        let rho = crate::complex::structure_point(&f, &boundary).unwrap();
        assert_eq!(f.point(rho).rank(), 1);
    }

    #[test]
    fn series_tropicalization() {
        let f = a2();
        let u = trop_series_point(&f, &xy(series(&[(2, 1)]), series(&[(3, 1)]))).unwrap();
        assert_eq!(u.values, vec![ExtendedValue::int(3), ExtendedValue::int(2)]);
        let unit = trop_series_point(&f, &xy(series(&[(0, 1)]), series(&[(1, 1)]))).unwrap();
        assert_eq!(unit.values, vec![ExtendedValue::int(1)]);
        let zero = trop_series_point(&f, &xy(TruncatedSeries::zero(32), series(&[(1, 1)]))).unwrap();
        assert_eq!(zero.values, vec![ExtendedValue::int(1), ExtendedValue::Infinity]);
    }

    #[test]
    fn seminorm_and_retraction() {
        let a1 = builtin_fan("A1").unwrap();
        let u = point_from_hom(&a1, 1, vec![ExtendedValue::int(2)]).unwrap();
        let f = LaurentPolynomial::from_ints(&[(vec![2], 1), (vec![3], 1)]).unwrap();
        assert_eq!(gauss_seminorm(&a1, &u, 0, &f).unwrap(), ExtendedValue::int(4));
        let one = LaurentPolynomial::from_ints(&[(vec![0], 1)]).unwrap();
        assert_eq!(gauss_seminorm(&a1, &u, 0, &one).unwrap(), ExtendedValue::zero());
        let inf = point_from_hom(&a1, 1, vec![ExtendedValue::Infinity]).unwrap();
        let g = LaurentPolynomial::from_ints(&[(vec![0], 1), (vec![1], 1)]).unwrap();
        assert_eq!(gauss_seminorm(&a1, &inf, 0, &g).unwrap(), ExtendedValue::zero());
        let neg = LaurentPolynomial::from_ints(&[(vec![-1], 1)]).unwrap();
        assert!(matches!(gauss_seminorm(&a1, &u, 0, &neg), Err(Error::ExponentOutsideChart(_))));

        let x = SeriesPoint {
            chart: 0,
            assignment: vec![series(&[(1, 1), (2, 1)])],
        };
        let h = LaurentPolynomial::from_ints(&[(vec![2], 1), (vec![1], 1)]).unwrap();
        assert_eq!(retract_series_point(&a1, &x, &h).unwrap(), ExtendedValue::int(1));
        assert_eq!(retract_series_point(&a1, &x, &one).unwrap(), ExtendedValue::zero());
        let y = SeriesPoint {
            chart: 0,
            assignment: vec![series(&[(2, 1)])],
        };
        let cube = LaurentPolynomial::from_ints(&[(vec![3], 1)]).unwrap();
        assert_eq!(retract_series_point(&a1, &y, &cube).unwrap(), ExtendedValue::int(6));
    }

    #[test]
    fn torus_chart_relations() {
        // N x Z with generators (0,-1), (0,1), (1,0)
        let chart = AffineMonoid::from_generators(2, vec![vec![1, 0], vec![0, 1], vec![0, -1]]).unwrap();
        let fan = KatoFan::spec(&chart).unwrap();
        let gens = chart.generators().to_vec();
        let s = |g: &Vec<i64>| match g.as_slice() {
            [1, 0] => series(&[(2, 1)]),
            [0, 1] => series(&[(0, 1), (1, 1)]),
            _ => series(&[(0, 1), (1, 1)]).inverse().unwrap(),
        };
        let good = SeriesPoint {
            chart: 0,
            assignment: gens.iter().map(s).collect(),
        };
        let u = trop_series_point(&fan, &good).unwrap();
        assert_eq!(u.values, vec![ExtendedValue::int(2)]);
        let bad = SeriesPoint {
            chart: 0,
            assignment: gens
                .iter()
                .map(|g| if g == &vec![0, -1] { series(&[(0, 1)]) } else { s(g) })
                .collect(),
        };
        assert!(matches!(check_series_point(&fan, &bad), Err(Error::InvalidSeries(_))));
    }

    #[test]
    fn hypersurface_on_the_plane() {
        let f = LaurentPolynomial::from_ints(&[(vec![1, 0], 1), (vec![0, 1], 1), (vec![0, 0], 1)]).unwrap();
        let h = tropical_hypersurface(&toric_fan("A2").unwrap(), &f).unwrap();
        let by_dim = |s: &HypersurfaceStratum| s.cones.iter().map(Cone::dim).collect::<Vec<_>>();
        for s in &h.strata {
            match s.face.len() {
                0 => {
                    let mut rays: Vec<Vec<i64>> = s.cones.iter().flat_map(|c| c.rays().to_vec()).collect();
                    rays.sort();
                    assert_eq!(by_dim(s), vec![1, 1]);
                    assert_eq!(rays.len(), 2);
                }
                1 => assert_eq!(by_dim(s), vec![0]),
                _ => assert!(s.cones.is_empty()),
            }
        }
        let mono = LaurentPolynomial::from_ints(&[(vec![1, 0], 1)]).unwrap();
        let hm = tropical_hypersurface(&toric_fan("A2").unwrap(), &mono).unwrap();
        assert!(hm.strata.iter().all(|s| s.cones.is_empty()));
    }

    #[test]
    fn closures_at_the_corner() {
        let quadrant = toric_fan("A2").unwrap();
        let corner = |f: &LaurentPolynomial| {
            let h = tropical_hypersurface(&quadrant, f).unwrap();
            h.strata.iter().find(|s| s.face.len() == 2).unwrap().cones.len()
        };
        // x + y and x + y^2 both vanish at the origin of the plane
        let f = LaurentPolynomial::from_ints(&[(vec![1, 0], 1), (vec![0, 1], 1)]).unwrap();
        assert_eq!(corner(&f), 1);
        let g = LaurentPolynomial::from_ints(&[(vec![1, 0], 1), (vec![0, 2], 1)]).unwrap();
        assert_eq!(corner(&g), 1);
        let h = tropical_hypersurface(&quadrant, &g).unwrap();
        let generic = h.strata.iter().find(|s| s.face.is_empty()).unwrap();
        assert_eq!(generic.cones.len(), 1);
        assert_eq!(generic.cones[0].rays(), &[vec![2, 1]]);
        // the curve misses the open part of both axes
        assert!(h.strata.iter().filter(|s| s.face.len() == 1).all(|s| s.cones.is_empty()));
    }

    #[test]
    fn tropical_line() {
        let f = LaurentPolynomial::from_ints(&[(vec![1, 0], 1), (vec![0, 1], 1), (vec![0, 0], 1)]).unwrap();
        let h = tropical_hypersurface(&toric_fan("P2").unwrap(), &f).unwrap();
        let generic = h.strata.iter().find(|s| s.face.is_empty()).unwrap();
        let mut rays: Vec<Vec<i64>> = generic.cones.iter().map(|c| c.rays()[0].clone()).collect();
        rays.sort();
        assert_eq!(rays, vec![vec![-1, -1], vec![0, 1], vec![1, 0]]);
        let points = h.strata.iter().filter(|s| s.face.len() == 1).filter(|s| s.cones.len() == 1).count();
        assert_eq!(points, 3);
        assert!(h.strata.iter().filter(|s| s.face.len() == 2).all(|s| s.cones.is_empty()));
    }

    #[test]
    fn membership() {
        let f = LaurentPolynomial::from_ints(&[(vec![1, 0], 1), (vec![0, 1], 1), (vec![0, 0], 1)]).unwrap();
        let h = tropical_hypersurface(&toric_fan("A2").unwrap(), &f).unwrap();
        // chart generators of the quadrant are (0,1), (1,0)
        let x = xy(series(&[(1, 1)]), series(&[(0, -1), (1, -1)]));
        assert!(trop_membership(&h, &f, &x).unwrap());
        // x = -1 + t, y = -t
        let x2 = xy(series(&[(0, -1), (1, 1)]), series(&[(1, -1)]));
        assert!(trop_membership(&h, &f, &x2).unwrap());
        let off = xy(series(&[(1, 1)]), series(&[(1, 1)]));
        assert!(matches!(trop_membership(&h, &f, &off), Err(Error::NotOnHypersurface(_))));
    }

    #[test]
    fn inverse_precondition() {
        // xy - 1 on the torus chart: y must be the inverse of x
        let torus = AffineMonoid::from_generators(2, vec![vec![1, 0], vec![-1, 0], vec![0, 1], vec![0, -1]]).unwrap();
        let gens = torus.generators().to_vec();
        let xs = series(&[(0, 1), (1, 1)]);
        let ys = series(&[(0, 1), (1, -1)]);
        let assign = |g: &Vec<i64>| match g.as_slice() {
            [1, 0] => xs.clone(),
            [-1, 0] => xs.inverse().unwrap(),
            [0, 1] => ys.clone(),
            _ => ys.inverse().unwrap(),
        };
        let p = SeriesPoint {
            chart: 0,
            assignment: gens.iter().map(assign).collect(),
        };
        let f = LaurentPolynomial::from_ints(&[(vec![1, 1], 1), (vec![0, 0], -1)]).unwrap();
        let value = evaluate_polynomial(&torus, &p, &f).unwrap();
        assert!(!value.vanishes());
        let good = SeriesPoint {
            chart: 0,
            assignment: gens
                .iter()
                .map(|g| match g.as_slice() {
                    [0, 1] => xs.inverse().unwrap(),
                    [0, -1] => xs.clone(),
                    _ => assign(g),
                })
                .collect(),
        };
        assert!(evaluate_polynomial(&torus, &good, &f).unwrap().vanishes());
    }

    #[test]
    fn dual_complexes() {
        let single = DualComplexInput {
            components: vec!["D".into()],
            strata: vec![],
        };
        assert_eq!(dual_complex(&single).unwrap().counts(), vec![1]);
        let comp = |l: &str| IntersectionComponent {
            label: l.into(),
            contained_in: vec![],
        };
        let conics = DualComplexInput {
            components: vec!["C1".into(), "C2".into()],
            strata: vec![IntersectionStratum {
                divisors: vec![0, 1],
                components: vec![comp("p1"), comp("p2"), comp("p3"), comp("p4")],
            }],
        };
        assert_eq!(dual_complex(&conics).unwrap().counts(), vec![2, 4]);
        let triangle = DualComplexInput {
            components: vec!["A".into(), "B".into(), "C".into()],
            strata: vec![
                IntersectionStratum { divisors: vec![0, 1], components: vec![comp("ab")] },
                IntersectionStratum { divisors: vec![0, 2], components: vec![comp("ac")] },
                IntersectionStratum { divisors: vec![1, 2], components: vec![comp("bc")] },
                IntersectionStratum { divisors: vec![0, 1, 2], components: vec![comp("abc")] },
            ],
        };
        let t = dual_complex(&triangle).unwrap();
        assert_eq!(t.counts(), vec![3, 3, 1]);
        assert_eq!(t.simplices[2][0].faces, vec![2, 1, 0]);
        let broken = DualComplexInput {
            components: vec!["A".into(), "B".into(), "C".into()],
            strata: vec![IntersectionStratum { divisors: vec![0, 1, 2], components: vec![comp("abc")] }],
        };
        assert!(matches!(dual_complex(&broken), Err(Error::InconsistentAttachment(_))));
    }

    #[test]
    fn atlas_of_the_plane() {
        let atlas = LogAtlas {
            charts: vec![AffineMonoid::free(2)],
            overlaps: GluingDatum::default(),
        };
        let (fan, maps) = characteristic_fan(&atlas).unwrap();
        assert_eq!(fan.len(), 4);
        assert!(maps[0].is_strict().unwrap());
    }
}
