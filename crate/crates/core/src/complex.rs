//! Extended cone complexes of Kato fans.
//!
//! A point of the extended complex over the minimal open `U_x = Spec P_x`
//! is a monoid map `u: P_x -> [0, ∞]`. Points are stored by their values on
//! the Hilbert basis of the stalk at the reduction `r(u)`, where `u` is
//! positive on every nonzero element; this makes equality a finite check.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::Add;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fan::{FanMorphism, KatoFan};
use crate::lattice::{inverse_unimodular, kernel_vectors, mat_vec_i64, solve_integer, Sublattice};
use crate::monoid::{cone_of_monoid, AffineMonoid};

/// An element of `[0, ∞]` with rational finite part.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedValue {
    Finite(BigRational),
    Infinity,
}

impl ExtendedValue {
    pub fn zero() -> Self {
        Self::Finite(BigRational::zero())
    }

    pub fn int(n: i64) -> Self {
        Self::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Self::Finite(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinity)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Self::Finite(q) if q.is_zero())
    }

    pub fn finite(&self) -> Option<&BigRational> {
        match self {
            Self::Finite(q) => Some(q),
            Self::Infinity => None,
        }
    }

    /// `n * self` for `n >= 0`, with `0 * ∞ = 0`.
    pub fn scale(&self, n: i64) -> Self {
        match self {
            _ if n == 0 => Self::zero(),
            Self::Finite(q) => Self::Finite(q * BigRational::from_integer(BigInt::from(n))),
            Self::Infinity => Self::Infinity,
        }
    }
}

impl Add for ExtendedValue {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (Self::Finite(a), Self::Finite(b)) => Self::Finite(a + b),
            _ => Self::Infinity,
        }
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(q) => write!(f, "{q}"),
            Self::Infinity => write!(f, "inf"),
        }
    }
}

impl FromStr for ExtendedValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "inf" {
            return Ok(Self::Infinity);
        }
        let q: BigRational = s
            .parse()
            .map_err(|_| Error::Schema(format!("{s:?} is neither a rational nor \"inf\"")))?;
        if q.is_negative() {
            return Err(Error::Schema(format!("value {s} is negative")));
        }
        Ok(Self::Finite(q))
    }
}

impl Serialize for ExtendedValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ExtendedValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A point of the extended cone complex, anchored at its reduction `open`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComplexPoint {
    pub open: usize,
    pub values: Vec<ExtendedValue>,
}

/// `u(v)` for `v` in the monoid generated by `basis`, where `values` are
/// the images of the basis elements.
pub fn evaluate(monoid: &AffineMonoid, values: &[ExtendedValue], v: &[i64]) -> Result<ExtendedValue> {
    let coeffs = monoid
        .decompose(v)?
        .ok_or_else(|| Error::NotHomomorphism(format!("{v:?} is not in the monoid")))?;
    let mut total = ExtendedValue::zero();
    for (c, val) in coeffs.iter().zip(values) {
        if *c < 0 {
            if !val.is_zero() {
                return Err(Error::NotAdditive(format!("a unit has value {val}")));
            }
            continue;
        }
        total = total + val.scale(*c);
    }
    Ok(total)
}

/// Checks that values on the generators of a sharp saturated monoid extend
/// to a monoid map to `[0, ∞]`.
pub fn check_additive(monoid: &AffineMonoid, values: &[ExtendedValue]) -> Result<()> {
    let gens = monoid.generators();
    if values.len() != gens.len() {
        return Err(Error::DimensionMismatch {
            expected: gens.len(),
            got: values.len(),
        });
    }
    let finite: Vec<usize> = (0..gens.len()).filter(|&i| !values[i].is_infinite()).collect();
    let mut sum = vec![0i64; monoid.ambient_rank()];
    for &i in &finite {
        for (x, y) in sum.iter_mut().zip(&gens[i]) {
            *x += y;
        }
    }
    let face = monoid.face_of(&sum)?.unwrap_or_default();
    if face != finite {
        let culprit = face.iter().find(|i| !finite.contains(i)).copied().unwrap_or(0);
        return Err(Error::NotAdditive(format!(
            "generators with finite value do not form a face: generator {:?} is forced to be finite",
            gens[culprit]
        )));
    }
    let d = monoid.ambient_rank();
    let rows: Vec<Vec<i64>> = (0..d).map(|j| finite.iter().map(|&i| gens[i][j]).collect()).collect();
    for k in kernel_vectors(&rows, finite.len())? {
        let mut lhs = BigRational::zero();
        for (c, &i) in k.iter().zip(&finite) {
            lhs += BigRational::from_integer(BigInt::from(*c)) * values[i].finite().expect("finite");
        }
        if !lhs.is_zero() {
            let terms: Vec<String> = k
                .iter()
                .zip(&finite)
                .filter(|(c, _)| **c != 0)
                .map(|(c, &i)| format!("{c}*{:?}", gens[i]))
                .collect();
            return Err(Error::NotAdditive(format!("relation {} = 0 is violated", terms.join(" + "))));
        }
    }
    Ok(())
}

/// The point given by values on the stalk basis at `x`, moved to its
/// canonical anchor.
pub fn point_from_hom(fan: &KatoFan, x: usize, values: Vec<ExtendedValue>) -> Result<ComplexPoint> {
    if x >= fan.len() {
        return Err(Error::UnknownPoint(x.to_string()));
    }
    let px = fan.point(x);
    check_additive(&px.stalk, &values)?;
    let zeros: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_zero()).collect();
    if zeros.is_empty() {
        return Ok(ComplexPoint { open: x, values });
    }
    let g = px
        .generizations
        .iter()
        .find(|g| g.face == zeros)
        .ok_or_else(|| Error::UnknownPoint(format!("generization of {} along {zeros:?}", px.id)))?;
    let y = g.point;
    let mut s = vec![0i64; px.rank()];
    for &i in &zeros {
        for (a, b) in s.iter_mut().zip(&px.basis()[i]) {
            *a += b;
        }
    }
    let columns: Vec<Vec<i64>> = (0..px.rank())
        .map(|j| g.restriction.iter().map(|row| row[j]).collect())
        .collect();
    let mut out = Vec::with_capacity(fan.point(y).basis().len());
    for h in fan.point(y).basis() {
        let mut p = solve_integer(&columns, h)?
            .ok_or_else(|| Error::NotHomomorphism(format!("{h:?} has no preimage at {}", px.id)))?;
        let mut steps = 0;
        while !px.stalk.contains(&p)? {
            for (a, b) in p.iter_mut().zip(&s) {
                *a += b;
            }
            steps += 1;
            if steps > 1 << 16 {
                return Err(Error::NotHomomorphism(format!("{h:?} does not come from the localization")));
            }
        }
        out.push(evaluate(&px.stalk, &values, &p)?);
    }
    Ok(ComplexPoint { open: y, values: out })
}

impl ComplexPoint {
    /// Values on the stalk basis at a specialization `z` of the anchor.
    pub fn values_at(&self, fan: &KatoFan, z: usize) -> Result<Vec<ExtendedValue>> {
        let pz = fan.point(z);
        let g = pz.generization(self.open).ok_or_else(|| {
            Error::UnknownPoint(format!("{} is not a generization of {}", fan.point(self.open).id, pz.id))
        })?;
        let stalk = &fan.point(self.open).stalk;
        pz.basis()
            .iter()
            .map(|h| evaluate(stalk, &self.values, &mat_vec_i64(&g.restriction, h)))
            .collect()
    }

    /// `u(p)` for `p` in a chart monoid whose open contains the point.
    pub fn value_on_chart(&self, fan: &KatoFan, chart: usize, p: &[i64]) -> Result<ExtendedValue> {
        let faces = fan.chart_faces_of(chart, self.open);
        let face = faces
            .first()
            .ok_or_else(|| Error::UnknownPoint(format!("{} is not in chart {chart}", fan.point(self.open).id)))?;
        let w = fan.chart_to_stalk(chart, face, p)?;
        let stalk = &fan.point(self.open).stalk;
        if !stalk.contains(&w)? {
            return Err(Error::ExponentOutsideChart(p.to_vec()));
        }
        evaluate(stalk, &self.values, &w)
    }
}

/// `r(u)`: the prime of elements with positive value.
pub fn reduction(point: &ComplexPoint) -> usize {
    point.open
}

/// `ρ(u)`: the prime of elements with infinite value.
pub fn structure_point(fan: &KatoFan, point: &ComplexPoint) -> Result<usize> {
    let finite: Vec<usize> = (0..point.values.len())
        .filter(|&i| !point.values[i].is_infinite())
        .collect();
    fan.point(point.open)
        .generizations
        .iter()
        .find(|g| g.face == finite)
        .map(|g| g.point)
        .ok_or_else(|| Error::UnknownPoint(format!("no generization with face {finite:?}")))
}

/// `Σ̄(f)(u) = u ∘ f^#`.
pub fn map_point(f: &FanMorphism, point: &ComplexPoint) -> Result<ComplexPoint> {
    let src = &f.source;
    if point.open >= src.len() || point.values.len() != src.point(point.open).basis().len() {
        return Err(Error::UnknownPoint(format!("point is not on the source complex: {point:?}")));
    }
    let a = point.open;
    let fa = f.point_map[a];
    let phi = &f.local_homs[a];
    let stalk = &src.point(a).stalk;
    let values = f
        .target
        .point(fa)
        .basis()
        .iter()
        .map(|h| evaluate(stalk, &point.values, &mat_vec_i64(phi, h)))
        .collect::<Result<Vec<_>>>()?;
    point_from_hom(&f.target, fa, values)
}

/// The cell of `ρ^{-1}(x)` lying over the open `U_z`: maps on the stalk at
/// `z` that are finite exactly on the face corresponding to `x`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub specialization: usize,
    pub dim: usize,
    /// Rays of `Hom(F, R≥0)` in the dual basis of the face group `F^gp`.
    pub rays: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Stratum {
    pub point: usize,
    pub id: String,
    pub dim: usize,
    pub cells: Vec<Cell>,
}

impl Stratum {
    /// Number of cells in each dimension.
    pub fn f_vector(&self) -> Vec<usize> {
        let mut f = vec![0; self.dim + 1];
        for c in &self.cells {
            f[c.dim] += 1;
        }
        f
    }

    /// The cell of maximal dimension when it is unique.
    pub fn top_cell(&self) -> Option<&Cell> {
        let top: Vec<&Cell> = self.cells.iter().filter(|c| c.dim == self.dim).collect();
        (top.len() == 1).then(|| top[0])
    }
}

/// The face of the stalk at `z` that stays finite over `x`, as a monoid
/// in coordinates of its own group.
pub fn face_monoid(fan: &KatoFan, z: usize, x: usize) -> Result<AffineMonoid> {
    let pz = fan.point(z);
    let g = pz
        .generization(x)
        .ok_or_else(|| Error::UnknownPoint(format!("{} does not specialize to {}", fan.point(x).id, pz.id)))?;
    let gens: Vec<Vec<i64>> = g.face.iter().map(|&i| pz.basis()[i].clone()).collect();
    let lattice = Sublattice::spanned_by(pz.rank(), &gens)?;
    let coords = gens
        .iter()
        .map(|v| lattice.coordinates(v).ok_or(Error::Overflow))
        .collect::<Result<Vec<_>>>()?;
    AffineMonoid::from_generators(lattice.rank(), coords)
}

#[derive(Clone, Debug)]
pub struct ExtendedComplex {
    pub fan: Arc<KatoFan>,
    pub strata: Vec<Stratum>,
}

/// Strata `ρ^{-1}(x)`, one per fan point, each a complex of cells `σ/τ`.
pub fn extended_complex(fan: Arc<KatoFan>) -> Result<ExtendedComplex> {
    if !fan.check_fine_saturated() {
        return Err(Error::NotFineSaturated("a stalk is not sharp and saturated".into()));
    }
    let mut strata = Vec::with_capacity(fan.len());
    for x in 0..fan.len() {
        let mut cells = Vec::new();
        for z in 0..fan.len() {
            if !fan.specializes_to(x, z) {
                continue;
            }
            let face = face_monoid(&fan, z, x)?;
            let cone = cone_of_monoid(&face)?;
            cells.push(Cell {
                specialization: z,
                dim: face.ambient_rank(),
                rays: cone.rays().to_vec(),
            });
        }
        let dim = cells.iter().map(|c| c.dim).max().unwrap_or(0);
        strata.push(Stratum {
            point: x,
            id: fan.point(x).id.clone(),
            dim,
            cells,
        });
    }
    Ok(ExtendedComplex { fan, strata })
}

impl ExtendedComplex {
    /// The stratum containing a point: the one indexed by `ρ(u)`.
    pub fn stratum_of(&self, point: &ComplexPoint) -> Result<&Stratum> {
        let x = structure_point(&self.fan, point)?;
        Ok(&self.strata[x])
    }
}

/// The quotient of `Σ̄_{F'}` by the relation `Σ̄(s)(v) ~ Σ̄(t)(v)` for a pair
/// of strict morphisms `s, t: F'' -> F'`.
#[derive(Clone, Debug)]
pub struct GeneralizedComplex {
    pub base: Arc<KatoFan>,
    pub arrows: [FanMorphism; 2],
    pub max_depth: usize,
}

pub const DEFAULT_QUOTIENT_DEPTH: usize = 16;

impl GeneralizedComplex {
    pub fn new(s: FanMorphism, t: FanMorphism) -> Result<Self> {
        if !Arc::ptr_eq(&s.source, &t.source) || !Arc::ptr_eq(&s.target, &t.target) {
            return Err(Error::InvalidMorphism("the two arrows must share source and target".into()));
        }
        for (name, f) in [("first", &s), ("second", &t)] {
            if !f.is_strict()? {
                return Err(Error::InvalidMorphism(format!("the {name} arrow is not strict")));
            }
            let hit: BTreeSet<usize> = f.point_map.iter().copied().collect();
            if hit.len() != f.target.len() {
                return Err(Error::InvalidMorphism(format!("the {name} arrow is not surjective on points")));
            }
        }
        Ok(Self {
            base: s.target.clone(),
            arrows: [s, t],
            max_depth: DEFAULT_QUOTIENT_DEPTH,
        })
    }

    fn check_point(&self, p: &ComplexPoint) -> Result<()> {
        if p.open >= self.base.len() || p.values.len() != self.base.point(p.open).basis().len() {
            return Err(Error::UnknownPoint(format!("point is not on the base complex: {p:?}")));
        }
        let canonical = point_from_hom(&self.base, p.open, p.values.clone())?;
        if &canonical != p {
            return Err(Error::UnknownPoint(format!("point is not in canonical form: {p:?}")));
        }
        Ok(())
    }

    /// Points `v` of `Σ̄_{F''}` with `Σ̄(f)(v) = p`.
    fn preimages(f: &FanMorphism, p: &ComplexPoint) -> Result<Vec<ComplexPoint>> {
        let stalk = &f.target.point(p.open).stalk;
        let mut out = Vec::new();
        for b in 0..f.source.len() {
            if f.point_map[b] != p.open {
                continue;
            }
            let inv = inverse_unimodular(&f.local_homs[b])?;
            let values = f
                .source
                .point(b)
                .basis()
                .iter()
                .map(|h| evaluate(stalk, &p.values, &mat_vec_i64(&inv, h)))
                .collect::<Result<Vec<_>>>()?;
            out.push(ComplexPoint { open: b, values });
        }
        Ok(out)
    }

    /// The equivalence class of `p`, sorted.
    pub fn class_of(&self, p: &ComplexPoint) -> Result<Vec<ComplexPoint>> {
        self.check_point(p)?;
        let [s, t] = &self.arrows;
        let mut seen: BTreeSet<ComplexPoint> = BTreeSet::from([p.clone()]);
        let mut frontier = vec![p.clone()];
        for _ in 0..self.max_depth {
            let mut next = Vec::new();
            for q in &frontier {
                for (from, to) in [(s, t), (t, s)] {
                    for v in Self::preimages(from, q)? {
                        let w = map_point(to, &v)?;
                        if seen.insert(w.clone()) {
                            next.push(w);
                        }
                    }
                }
            }
            if next.is_empty() {
                return Ok(seen.into_iter().collect());
            }
            frontier = next;
        }
        Err(Error::NotStabilized(self.max_depth))
    }

    pub fn points_equal(&self, x: &ComplexPoint, y: &ComplexPoint) -> Result<bool> {
        self.check_point(y)?;
        Ok(self.class_of(x)?.contains(y))
    }
}

/// The `Z/2` swap acting on `Spec N^2` (`"swap"`), and the nodal fan with
/// its two charts exchanged (`"nodal"`).
pub fn builtin_quotient(name: &str) -> Result<GeneralizedComplex> {
    use crate::fan::{builtin_fan, ChartHom, GluingDatum};
    use crate::lattice::identity_i64;
    let chart = |s: usize, t: usize, map: Vec<Vec<i64>>| ChartHom {
        source_chart: s,
        target_chart: t,
        map,
    };
    let swap = || vec![vec![0, 1], vec![1, 0]];
    let pair = Arc::new(KatoFan::glue(vec![AffineMonoid::free(2); 2], GluingDatum::default())?);
    match name {
        "swap" => {
            let base = Arc::new(builtin_fan("A2")?);
            let s = FanMorphism::from_chart_homs(pair.clone(), base.clone(), &[chart(0, 0, identity_i64(2)), chart(1, 0, identity_i64(2))])?;
            let t = FanMorphism::from_chart_homs(pair, base, &[chart(0, 0, identity_i64(2)), chart(1, 0, swap())])?;
            GeneralizedComplex::new(s, t)
        }
        "nodal" => {
            let base = Arc::new(builtin_fan("nodal")?);
            let s = FanMorphism::from_chart_homs(pair.clone(), base.clone(), &[chart(0, 0, identity_i64(2)), chart(1, 1, identity_i64(2))])?;
            let t = FanMorphism::from_chart_homs(pair, base, &[chart(0, 1, swap()), chart(1, 0, swap())])?;
            GeneralizedComplex::new(s, t)
        }
        _ => Err(Error::UnknownFan(name.to_string())),
    }
}
