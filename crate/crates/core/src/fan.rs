//! Kato fans glued from spectra of fine saturated monoids.
//!
//! A fan is built from charts `Spec P_c` and gluing data identifying open
//! pieces `D(f_a) ⊆ Spec P_a` with `D(f_b) ⊆ Spec P_b` through a lattice map.
//! Each point is a face of some chart monoid; its stalk is the sharp part of
//! the localization at that face, expressed in coordinates where the stalk's
//! group is all of `Z^rank`. Identified chart points carry transition
//! matrices to the coordinates of a representative.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::lattice::{identity_i64, rank_i64, inverse_unimodular, mat_mul_i64, mat_vec_i64, matrix_of, transpose_i64};
use crate::monoid::{find_sharp_isomorphism, monoid_of_cone, AffineMonoid, MonoidHom, SharpDecomposition};

/// Identifies `D(f_a)` in chart `a` with `D(f_b)` in chart `b` for every
/// pair in `opens`. `map` is a lattice map `Z^rank(a) -> Z^rank(b)` that
/// restricts to isomorphisms `(P_a)_{f_a} -> (P_b)_{f_b}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingEntry {
    pub chart_a: usize,
    pub chart_b: usize,
    pub opens: Vec<(Vec<i64>, Vec<i64>)>,
    pub map: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GluingDatum {
    pub entries: Vec<GluingEntry>,
}

/// A point of a chart together with the data of its stalk.
#[derive(Clone, Debug)]
struct ChartPoint {
    chart: usize,
    face: Vec<usize>,
    local: SharpDecomposition,
    point: usize,
    /// stalk coordinates of this chart point -> coordinates of the fan point
    to_rep: Vec<Vec<i64>>,
    from_rep: Vec<Vec<i64>>,
}

/// `y` is a generization of the point owning this record. `face` lists the
/// Hilbert basis indices of the owner's stalk that become units at `y`, and
/// `restriction` is the matrix of the stalk map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Generization {
    pub point: usize,
    pub face: Vec<usize>,
    pub restriction: Vec<Vec<i64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FanPoint {
    pub id: String,
    pub stalk: AffineMonoid,
    /// Points in the closure of this one, excluding itself.
    pub specializes_to: Vec<usize>,
    /// The minimal affine open: every generization, including the point.
    pub generizations: Vec<Generization>,
}

impl FanPoint {
    pub fn rank(&self) -> usize {
        self.stalk.ambient_rank()
    }

    /// Hilbert basis of the stalk; values of cone complex points are indexed by it.
    pub fn basis(&self) -> &[Vec<i64>] {
        self.stalk.generators()
    }

    pub fn generization(&self, y: usize) -> Option<&Generization> {
        self.generizations.iter().find(|g| g.point == y)
    }
}

/// Cone data for fans built from a polyhedral fan.
#[derive(Clone, Debug)]
pub struct PolyhedralData {
    pub cones: Vec<Cone>,
    pub cone_points: Vec<usize>,
    pub chart_cones: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct KatoFan {
    points: Vec<FanPoint>,
    charts: Vec<AffineMonoid>,
    gluing: GluingDatum,
    members: Vec<ChartPoint>,
    member_index: HashMap<(usize, Vec<usize>), usize>,
    polyhedral: Option<PolyhedralData>,
}

fn face_label(face: &[usize]) -> String {
    face.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, x: usize) -> usize {
        let p = self.0[x];
        if p == x {
            return x;
        }
        let r = self.find(p);
        self.0[x] = r;
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.0[hi] = lo;
        }
    }
}

/// Smallest face (as generator indices) of `P_b` whose localization
/// contains `v ∈ (P_b)_{f}`: shift `v` into the cone along `f`, then join
/// with the face of `f`.
fn face_in_localization(p: &AffineMonoid, cone: &Cone, v: &[i64], f: &[i64]) -> Result<Option<Vec<usize>>> {
    let mut w = v.to_vec();
    for _ in 0..=4096 {
        if cone.contains(&w) {
            let shifted: Vec<i64> = w.iter().zip(f).map(|(x, y)| x + y).collect();
            return p.face_of(&shifted);
        }
        for (x, y) in w.iter_mut().zip(f) {
            *x += y;
        }
    }
    Ok(None)
}

impl KatoFan {
    /// `Spec P` for a fine saturated monoid.
    pub fn spec(p: &AffineMonoid) -> Result<Self> {
        Self::glue(vec![p.clone()], GluingDatum::default())
    }

    /// Colimit of the charts along the gluing data.
    pub fn glue(charts: Vec<AffineMonoid>, datum: GluingDatum) -> Result<Self> {
        for (i, c) in charts.iter().enumerate() {
            if !c.is_saturated()? {
                return Err(Error::NotFineSaturated(format!("chart {i} is not saturated")));
            }
        }
        let cones: Vec<Cone> = charts.iter().map(AffineMonoid::cone).collect::<Result<_>>()?;

        let mut members = Vec::new();
        let mut member_index = HashMap::new();
        for (c, p) in charts.iter().enumerate() {
            for prime in p.primes()? {
                let (local, _) = p.localize(&prime)?;
                let dec = local.decompose_sharp()?;
                let d = dec.sharp.ambient_rank();
                member_index.insert((c, prime.face_generators.clone()), members.len());
                members.push(ChartPoint {
                    chart: c,
                    face: prime.face_generators,
                    local: dec,
                    point: usize::MAX,
                    to_rep: identity_i64(d),
                    from_rep: identity_i64(d),
                });
            }
        }

        // edges (x, y, sigma) with sigma: stalk(x) -> stalk(y)
        let mut edges: Vec<(usize, usize, Vec<Vec<i64>>)> = Vec::new();
        for entry in &datum.entries {
            let (a, b) = (entry.chart_a, entry.chart_b);
            let bad = |reason: String| Error::InvalidGluing { a, b, reason };
            if a >= charts.len() || b >= charts.len() {
                return Err(bad("chart index out of range".into()));
            }
            let (pa, pb) = (&charts[a], &charts[b]);
            if entry.map.len() != pb.ambient_rank() || entry.map.iter().any(|r| r.len() != pa.ambient_rank()) {
                return Err(bad("lattice map has the wrong shape".into()));
            }
            for (fa, fb) in &entry.opens {
                let (Some(base_a), Some(base_b)) = (pa.face_of(fa)?, pb.face_of(fb)?) else {
                    return Err(bad(format!("{fa:?} or {fb:?} is not in its chart monoid")));
                };
                let loc_a = pa.localize(&pa.prime(base_a.clone())?)?.0;
                let loc_b = pb.localize(&pb.prime(base_b.clone())?)?.0;
                let images: Vec<Vec<i64>> = loc_a.generators().iter().map(|g| mat_vec_i64(&entry.map, g)).collect();
                let image = AffineMonoid::new(pb.ambient_rank(), images.clone(), Vec::new(), 0)?;
                let onto = loc_b.generators().iter().map(|g| image.contains(g)).collect::<Result<Vec<_>>>()?;
                let into = images.iter().map(|g| loc_b.contains(g)).collect::<Result<Vec<_>>>()?;
                if onto.contains(&false)
                    || into.contains(&false)
                    || rank_i64(&images, pb.ambient_rank()) != loc_a.group_rank()
                    || loc_a.group_rank() != loc_b.group_rank()
                {
                    return Err(bad(format!(
                        "the map does not identify the localizations at {fa:?} and {fb:?}"
                    )));
                }
                let open_a: Vec<usize> = members
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.chart == a && base_a.iter().all(|g| m.face.contains(g)))
                    .map(|(i, _)| i)
                    .collect();
                let open_b: BTreeSet<usize> = members
                    .iter()
                    .enumerate()
                    .filter(|(_, m)| m.chart == b && base_b.iter().all(|g| m.face.contains(g)))
                    .map(|(i, _)| i)
                    .collect();
                let mut image = BTreeMap::new();
                for &x in &open_a {
                    let rel: Vec<i64> = pa.face_monoid_sum(&members[x].face);
                    let v = mat_vec_i64(&entry.map, &rel);
                    let Some(face) = face_in_localization(pb, &cones[b], &v, fb)? else {
                        return Err(bad(format!("{v:?} does not lie in the localization of chart {b} at {fb:?}")));
                    };
                    let y = *member_index
                        .get(&(b, face.clone()))
                        .ok_or_else(|| bad(format!("face {face:?} of chart {b} is not a point")))?;
                    if !open_b.contains(&y) {
                        return Err(bad(format!("point {a}:{} maps outside D({fb:?})", face_label(&members[x].face))));
                    }
                    image.insert(x, y);
                }
                let targets: BTreeSet<usize> = image.values().copied().collect();
                if targets.len() != open_a.len() || targets != open_b {
                    return Err(bad(format!("D({fa:?}) and D({fb:?}) are not matched bijectively")));
                }
                for (&x, &y) in &image {
                    for (&x2, &y2) in &image {
                        let sub_a = members[x].face.iter().all(|g| members[x2].face.contains(g));
                        let sub_b = members[y].face.iter().all(|g| members[y2].face.contains(g));
                        if sub_a != sub_b {
                            return Err(bad("identification does not preserve specialization".into()));
                        }
                    }
                }
                for (&x, &y) in &image {
                    let (mx, my) = (&members[x], &members[y]);
                    let dx = mx.local.sharp.ambient_rank();
                    let dy = my.local.sharp.ambient_rank();
                    let sigma = matrix_of(dy, dx, |e| {
                        let up = mx.local.lift(e)?;
                        my.local.project(&mat_vec_i64(&entry.map, &up))
                    })
                    .map_err(|e| bad(format!("stalk map is not defined: {e}")))?;
                    let hom = MonoidHom::new(&mx.local.sharp, &my.local.sharp, sigma.clone())
                        .map_err(|e| bad(format!("stalk map at {a}:{} fails: {e}", face_label(&mx.face))))?;
                    if !hom.is_isomorphism()? {
                        return Err(bad(format!(
                            "stalk map at {a}:{} is not an isomorphism (gluing is not strict)",
                            face_label(&mx.face)
                        )));
                    }
                    edges.push((x, y, sigma));
                }
            }
        }

        let n = members.len();
        let mut uf = UnionFind((0..n).collect());
        for (x, y, _) in &edges {
            uf.union(*x, *y);
        }
        let mut adjacency: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (k, (x, y, _)) in edges.iter().enumerate() {
            adjacency[*x].push((*y, k));
            adjacency[*y].push((*x, k));
        }
        let mut reps: Vec<usize> = (0..n).filter(|&i| uf.find(i) == i).collect();
        reps.sort_unstable();
        let mut known = vec![false; n];
        for (point, &r) in reps.iter().enumerate() {
            members[r].point = point;
            known[r] = true;
            let mut queue = VecDeque::from([r]);
            while let Some(x) = queue.pop_front() {
                for &(y, k) in &adjacency[x] {
                    if known[y] {
                        continue;
                    }
                    let (ex, _, sigma) = &edges[k];
                    // to_rep(y) = to_rep(x) . (stalk y -> stalk x)
                    let y_to_x = if *ex == x { inverse_unimodular(sigma)? } else { sigma.clone() };
                    let dy = members[y].local.sharp.ambient_rank();
                    let t = mat_mul_i64(&members[x].to_rep, &y_to_x, dy);
                    members[y].from_rep = inverse_unimodular(&t)?;
                    members[y].to_rep = t;
                    members[y].point = point;
                    known[y] = true;
                    queue.push_back(y);
                }
            }
        }
        for (x, y, sigma) in &edges {
            let (mx, my) = (&members[*x], &members[*y]);
            let dx = mx.local.sharp.ambient_rank();
            if mat_mul_i64(&my.to_rep, sigma, dx) != mx.to_rep {
                return Err(Error::InvalidGluing {
                    a: mx.chart,
                    b: my.chart,
                    reason: format!(
                        "cocycle condition fails between points {}:{} and {}:{}",
                        mx.chart,
                        face_label(&mx.face),
                        my.chart,
                        face_label(&my.face)
                    ),
                });
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if members[i].chart == members[j].chart && members[i].point == members[j].point {
                    return Err(Error::InvalidGluing {
                        a: members[i].chart,
                        b: members[j].chart,
                        reason: format!(
                            "points {} and {} of the same chart are identified",
                            face_label(&members[i].face),
                            face_label(&members[j].face)
                        ),
                    });
                }
            }
        }

        let mut points: Vec<FanPoint> = reps
            .iter()
            .map(|&r| FanPoint {
                id: format!("{}:{}", members[r].chart, face_label(&members[r].face)),
                stalk: members[r].local.sharp.clone(),
                specializes_to: Vec::new(),
                generizations: Vec::new(),
            })
            .collect();

        let np = points.len();
        let mut spec = vec![vec![false; np]; np];
        for (&(c, ref f), &i) in &member_index {
            for (&(c2, ref f2), &j) in &member_index {
                if c == c2 && f.iter().all(|g| f2.contains(g)) && i != j {
                    // the point with the bigger face specializes to the smaller
                    spec[members[j].point][members[i].point] = true;
                }
            }
        }
        for k in 0..np {
            for i in 0..np {
                for j in 0..np {
                    if spec[i][k] && spec[k][j] {
                        spec[i][j] = true;
                    }
                }
            }
        }
        for i in 0..np {
            if spec[i][i] {
                return Err(Error::InvalidGluing {
                    a: members[reps[i]].chart,
                    b: members[reps[i]].chart,
                    reason: format!("specialization is not antisymmetric at {}", points[i].id),
                });
            }
            points[i].specializes_to = (0..np).filter(|&j| spec[i][j]).collect();
        }

        for (pi, &r) in reps.iter().enumerate() {
            let (c, ref fx) = (members[r].chart, members[r].face.clone());
            let dx = members[r].local.sharp.ambient_rank();
            let hb = members[r].local.sharp.generators().to_vec();
            let mut gens = Vec::new();
            for (&(c2, ref f2), &m) in &member_index {
                if c2 != c || !fx.iter().all(|g| f2.contains(g)) {
                    continue;
                }
                let my = &members[m];
                let dy = my.local.sharp.ambient_rank();
                let restriction = matrix_of(dy, dx, |e| {
                    let up = members[r].local.lift(e)?;
                    Ok(mat_vec_i64(&my.to_rep, &my.local.project(&up)?))
                })?;
                let face = (0..hb.len())
                    .filter(|&i| mat_vec_i64(&restriction, &hb[i]).iter().all(|&x| x == 0))
                    .collect();
                gens.push(Generization {
                    point: my.point,
                    face,
                    restriction,
                });
            }
            gens.sort_by_key(|g| g.point);
            let expected: Vec<usize> = (0..np).filter(|&y| y == pi || spec[y][pi]).collect();
            let got: Vec<usize> = gens.iter().map(|g| g.point).collect();
            if expected != got {
                return Err(Error::InvalidGluing {
                    a: c,
                    b: c,
                    reason: format!("the minimal open of {} is not the chart's open", points[pi].id),
                });
            }
            points[pi].generizations = gens;
        }

        Ok(Self {
            points,
            charts,
            gluing: datum,
            members,
            member_index,
            polyhedral: None,
        })
    }

    /// A fan given only by its points, stalks and specialization relation.
    /// Such fans support the order and stalk checks but carry no charts.
    pub fn from_points(points: Vec<(String, AffineMonoid, Vec<String>)>) -> Result<Self> {
        let ids: HashMap<String, usize> = points.iter().enumerate().map(|(i, p)| (p.0.clone(), i)).collect();
        if ids.len() != points.len() {
            return Err(Error::Schema("duplicate point ids".into()));
        }
        let n = points.len();
        let mut spec = vec![vec![false; n]; n];
        for (i, (_, _, to)) in points.iter().enumerate() {
            for t in to {
                let j = *ids.get(t).ok_or_else(|| Error::UnknownPoint(t.clone()))?;
                spec[i][j] = true;
            }
        }
        let mut out = Vec::with_capacity(n);
        for (i, (id, stalk, _)) in points.into_iter().enumerate() {
            out.push(FanPoint {
                id,
                stalk,
                specializes_to: (0..n).filter(|&j| spec[i][j] && j != i).collect(),
                generizations: Vec::new(),
            });
        }
        Ok(Self {
            points: out,
            charts: Vec::new(),
            gluing: GluingDatum::default(),
            members: Vec::new(),
            member_index: HashMap::new(),
            polyhedral: None,
        })
    }

    pub fn points(&self) -> &[FanPoint] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &FanPoint {
        &self.points[i]
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn charts(&self) -> &[AffineMonoid] {
        &self.charts
    }

    pub fn gluing(&self) -> &GluingDatum {
        &self.gluing
    }

    pub fn polyhedral(&self) -> Option<&PolyhedralData> {
        self.polyhedral.as_ref()
    }

    pub fn has_charts(&self) -> bool {
        !self.charts.is_empty()
    }

    pub fn point_index(&self, id: &str) -> Result<usize> {
        self.points
            .iter()
            .position(|p| p.id == id)
            .ok_or_else(|| Error::UnknownPoint(id.to_string()))
    }

    /// `x` specializes to `y` (`y` lies in the closure of `x`), reflexive.
    pub fn specializes_to(&self, x: usize, y: usize) -> bool {
        x == y || self.points[x].specializes_to.contains(&y)
    }

    /// The fan point of a face of a chart.
    pub fn chart_point(&self, chart: usize, face: &[usize]) -> Result<usize> {
        self.member_index
            .get(&(chart, face.to_vec()))
            .map(|&m| self.members[m].point)
            .ok_or_else(|| Error::UnknownPoint(format!("{chart}:{}", face_label(face))))
    }

    /// Faces of a chart that map to the given fan point.
    pub fn chart_faces_of(&self, chart: usize, point: usize) -> Vec<Vec<usize>> {
        self.members
            .iter()
            .filter(|m| m.chart == chart && m.point == point)
            .map(|m| m.face.clone())
            .collect()
    }

    /// The chart and face used as this point's coordinates.
    pub fn home(&self, point: usize) -> (usize, Vec<usize>) {
        let m = self.members.iter().find(|m| m.point == point && m.to_rep == identity_i64(m.to_rep.len()));
        let m = m.expect("every point has a representative");
        (m.chart, m.face.clone())
    }

    fn member(&self, chart: usize, face: &[usize]) -> Result<&ChartPoint> {
        self.member_index
            .get(&(chart, face.to_vec()))
            .map(|&m| &self.members[m])
            .ok_or_else(|| Error::UnknownPoint(format!("{chart}:{}", face_label(face))))
    }

    /// Image in the stalk at the chart point `(chart, face)`, in the fan
    /// point's coordinates, of a lattice vector of the chart group.
    pub fn chart_to_stalk(&self, chart: usize, face: &[usize], v: &[i64]) -> Result<Vec<i64>> {
        let m = self.member(chart, face)?;
        Ok(mat_vec_i64(&m.to_rep, &m.local.project(v)?))
    }

    /// A lift to the chart group of a stalk vector given in fan point coordinates.
    pub fn stalk_to_chart(&self, chart: usize, face: &[usize], w: &[i64]) -> Result<Vec<i64>> {
        let m = self.member(chart, face)?;
        m.local.lift(&mat_vec_i64(&m.from_rep, w))
    }

    /// Every stalk fine, saturated and sharp, and finitely many points.
    pub fn check_fine_saturated(&self) -> bool {
        self.points.iter().all(|p| {
            matches!(p.stalk.is_saturated(), Ok(true)) && matches!(p.stalk.is_sharp(), Ok(true))
        })
    }

    /// Exhaustive search for an order isomorphism with isomorphic stalks.
    pub fn find_isomorphism(&self, other: &KatoFan) -> Result<Option<Vec<usize>>> {
        let n = self.len();
        if n != other.len() {
            return Ok(None);
        }
        let mut compatible = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                let (a, b) = (&self.points[i], &other.points[j]);
                compatible[i][j] = a.rank() == b.rank()
                    && a.specializes_to.len() == b.specializes_to.len()
                    && find_sharp_isomorphism(&a.stalk, &b.stalk)?.is_some();
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&i| (self.points[i].rank(), self.points[i].specializes_to.len()));
        let mut assignment = vec![usize::MAX; n];
        let mut used = vec![false; n];
        if self.extend_isomorphism(other, &order, 0, &compatible, &mut assignment, &mut used) {
            Ok(Some(assignment))
        } else {
            Ok(None)
        }
    }

    fn extend_isomorphism(
        &self,
        other: &KatoFan,
        order: &[usize],
        k: usize,
        compatible: &[Vec<bool>],
        assignment: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == order.len() {
            return true;
        }
        let x = order[k];
        for y in 0..other.len() {
            if used[y] || !compatible[x][y] {
                continue;
            }
            let consistent = order[..k].iter().all(|&x2| {
                let y2 = assignment[x2];
                self.specializes_to(x, x2) == other.specializes_to(y, y2)
                    && self.specializes_to(x2, x) == other.specializes_to(y2, y)
            });
            if !consistent {
                continue;
            }
            assignment[x] = y;
            used[y] = true;
            if self.extend_isomorphism(other, order, k + 1, compatible, assignment, used) {
                return true;
            }
            used[y] = false;
            assignment[x] = usize::MAX;
        }
        false
    }

    pub fn is_isomorphic(&self, other: &KatoFan) -> Result<bool> {
        Ok(self.find_isomorphism(other)?.is_some())
    }

    /// Hasse diagram of the specialization order, generic points on top.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph fan {\n  rankdir=BT;\n");
        for (i, p) in self.points.iter().enumerate() {
            let label = stalk_label(&p.stalk);
            let _ = writeln!(out, "  p{i} [label=\"{}\\n{}\"];", p.id, label);
        }
        for (i, p) in self.points.iter().enumerate() {
            for &j in &p.specializes_to {
                let covered = p
                    .specializes_to
                    .iter()
                    .any(|&k| k != j && self.points[k].specializes_to.contains(&j));
                if !covered {
                    let _ = writeln!(out, "  p{i} -> p{j};");
                }
            }
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PointJson {
    pub id: String,
    pub stalk: AffineMonoid,
    pub specializes_to: Vec<String>,
}

/// Serialized form of a fan. Fans with charts are rebuilt by gluing; the
/// point list is then only checked against the result.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FanJson {
    pub points: Vec<PointJson>,
    #[serde(default)]
    pub charts: Vec<AffineMonoid>,
    #[serde(default)]
    pub gluing: GluingDatum,
}

impl KatoFan {
    pub fn to_json(&self) -> FanJson {
        FanJson {
            points: self
                .points
                .iter()
                .map(|p| PointJson {
                    id: p.id.clone(),
                    stalk: p.stalk.clone(),
                    specializes_to: p.specializes_to.iter().map(|&j| self.points[j].id.clone()).collect(),
                })
                .collect(),
            charts: self.charts.clone(),
            gluing: self.gluing.clone(),
        }
    }

    pub fn from_json(j: &FanJson) -> Result<Self> {
        if j.charts.is_empty() {
            return Self::from_points(
                j.points
                    .iter()
                    .map(|p| (p.id.clone(), p.stalk.clone(), p.specializes_to.clone()))
                    .collect(),
            );
        }
        let fan = Self::glue(j.charts.clone(), j.gluing.clone())?;
        let ids: BTreeSet<&str> = fan.points.iter().map(|p| p.id.as_str()).collect();
        let given: BTreeSet<&str> = j.points.iter().map(|p| p.id.as_str()).collect();
        if !j.points.is_empty() && ids != given {
            return Err(Error::Schema("listed points do not match the glued fan".into()));
        }
        Ok(fan)
    }
}

/// Short name for a stalk: `0`, `N`, `N^2`, or its Hilbert basis.
pub fn stalk_label(stalk: &AffineMonoid) -> String {
    let d = stalk.ambient_rank();
    let hb = stalk.hilbert_basis().unwrap_or_default();
    match (d, hb.len()) {
        (0, _) => "0".to_string(),
        (1, 1) => "N".to_string(),
        (d, n) if d == n => format!("N^{d}"),
        _ => format!("{hb:?}"),
    }
}

impl AffineMonoid {
    /// Sum of the indexed generators.
    pub(crate) fn face_monoid_sum(&self, face: &[usize]) -> Vec<i64> {
        let mut p = vec![0i64; self.ambient_rank()];
        for &i in face {
            for (x, y) in p.iter_mut().zip(&self.generators()[i]) {
                *x += y;
            }
        }
        p
    }
}

fn swap2() -> Vec<Vec<i64>> {
    vec![vec![0, 1], vec![1, 0]]
}

/// `D(p_i) ≅ D(q_{i+1})` around a cycle of `N^2` charts with coordinates
/// `p = e1`, `q = e2`, identifying `p_i` with `q_{i+1}`.
fn cyclic_gluing(k: usize) -> GluingDatum {
    let entries = (0..k)
        .map(|i| GluingEntry {
            chart_a: i,
            chart_b: (i + 1) % k,
            opens: vec![(vec![1, 0], vec![0, 1])],
            map: swap2(),
        })
        .collect();
    GluingDatum { entries }
}

/// `A1`, `A2`, `A3`, `P1`, `P2`, `P1xP1`, and `nodal` (two copies of
/// `Spec N^2` glued along both coordinate localizations).
pub fn builtin_fan(name: &str) -> Result<KatoFan> {
    match name {
        "A1" | "A2" | "A3" => {
            let k = name[1..].parse::<usize>().expect("digit");
            KatoFan::spec(&AffineMonoid::free(k))
        }
        "P1" => KatoFan::glue(
            vec![AffineMonoid::free(1), AffineMonoid::free(1)],
            GluingDatum {
                entries: vec![GluingEntry {
                    chart_a: 0,
                    chart_b: 1,
                    opens: vec![(vec![1], vec![1])],
                    map: vec![vec![-1]],
                }],
            },
        ),
        "P2" => KatoFan::glue(vec![AffineMonoid::free(2); 3], cyclic_gluing(3)),
        "P1xP1" => KatoFan::glue(vec![AffineMonoid::free(2); 4], cyclic_gluing(4)),
        "nodal" => KatoFan::glue(
            vec![AffineMonoid::free(2); 2],
            GluingDatum {
                entries: vec![GluingEntry {
                    chart_a: 0,
                    chart_b: 1,
                    opens: vec![(vec![1, 0], vec![1, 0]), (vec![0, 1], vec![0, 1])],
                    map: identity_i64(2),
                }],
            },
        ),
        _ => Err(Error::UnknownFan(name.to_string())),
    }
}

pub const BUILTIN_FANS: [&str; 7] = ["A1", "A2", "A3", "P1", "P2", "P1xP1", "nodal"];

/// Rays of the standard complete fans and the affine planes, for use with
/// [`fan_from_polyhedral_fan`]: maximal cones given by their rays.
pub fn toric_fan(name: &str) -> Result<Vec<Cone>> {
    let maximal: Vec<Vec<Vec<i64>>> = match name {
        "A1" => vec![vec![vec![1]]],
        "A2" => vec![vec![vec![1, 0], vec![0, 1]]],
        "A3" => vec![vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]],
        "P1" => vec![vec![vec![1]], vec![vec![-1]]],
        "P2" => vec![
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0, 1], vec![-1, -1]],
            vec![vec![-1, -1], vec![1, 0]],
        ],
        "P1xP1" => vec![
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![0, 1], vec![-1, 0]],
            vec![vec![-1, 0], vec![0, -1]],
            vec![vec![0, -1], vec![1, 0]],
        ],
        _ => return Err(Error::UnknownFan(name.to_string())),
    };
    let rank = maximal[0][0].len();
    let mut cones: Vec<Cone> = Vec::new();
    for rays in &maximal {
        let c = Cone::from_generators(rank, rays)?;
        for f in c.faces().faces {
            let face = c.face(&f)?;
            if !cones.contains(&face) {
                cones.push(face);
            }
        }
    }
    Ok(cones)
}

/// Intersection of two cones in the same lattice.
pub fn intersect_cones(a: &Cone, b: &Cone) -> Result<Cone> {
    let mut ineq = a.inequalities().to_vec();
    ineq.extend(b.inequalities().iter().cloned());
    let mut eq = a.equations().to_vec();
    eq.extend(b.equations().iter().cloned());
    Cone::from_inequalities(a.lattice_rank(), &ineq, &eq)
}

/// The fan with one point per cone, glued from the maximal cones' monoids
/// `S_sigma` in the common lattice `M`.
pub fn fan_from_polyhedral_fan(cones: &[Cone]) -> Result<KatoFan> {
    if cones.is_empty() {
        return Err(Error::NotFaceClosed("no cones given".into()));
    }
    let n = cones[0].lattice_rank();
    for (i, c) in cones.iter().enumerate() {
        if c.lattice_rank() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: c.lattice_rank(),
            });
        }
        if !c.is_strictly_convex() {
            return Err(Error::NotStrictlyConvex);
        }
        for f in c.faces().faces {
            let face = c.face(&f)?;
            if !cones.contains(&face) {
                return Err(Error::NotFaceClosed(format!("a face of cone {i} (rays {:?}) is missing", face.rays())));
            }
        }
        for (j, d) in cones.iter().enumerate().skip(i + 1) {
            if c == d {
                return Err(Error::NotFaceClosed(format!("cones {i} and {j} coincide")));
            }
            let meet = intersect_cones(c, d)?;
            if !c.has_face(&meet) || !d.has_face(&meet) {
                return Err(Error::NotFaceClosed(format!(
                    "cones {i} and {j} do not meet in a common face"
                )));
            }
        }
    }
    let maximal: Vec<usize> = (0..cones.len())
        .filter(|&i| !(0..cones.len()).any(|j| j != i && cones[j].has_face(&cones[i])))
        .collect();
    let charts: Vec<AffineMonoid> = maximal.iter().map(|&i| monoid_of_cone(&cones[i])).collect::<Result<_>>()?;

    // the localization of S_sigma at f = (sum of generators vanishing on tau) is S_tau
    let perp_sum = |chart: &AffineMonoid, tau: &Cone| -> Vec<i64> {
        let mut f = vec![0i64; n];
        for g in chart.generators() {
            if tau.rays().iter().all(|r| crate::lattice::dot(g, r) == 0) {
                for (x, y) in f.iter_mut().zip(g) {
                    *x += y;
                }
            }
        }
        f
    };
    let mut entries = Vec::new();
    for a in 0..maximal.len() {
        for b in a + 1..maximal.len() {
            let tau = intersect_cones(&cones[maximal[a]], &cones[maximal[b]])?;
            entries.push(GluingEntry {
                chart_a: a,
                chart_b: b,
                opens: vec![(perp_sum(&charts[a], &tau), perp_sum(&charts[b], &tau))],
                map: identity_i64(n),
            });
        }
    }
    let mut fan = KatoFan::glue(charts.clone(), GluingDatum { entries })?;

    let mut cone_points = Vec::with_capacity(cones.len());
    for tau in cones {
        let chart = (0..maximal.len())
            .find(|&c| cones[maximal[c]].has_face(tau))
            .expect("every cone lies in a maximal cone");
        let face: Vec<usize> = (0..charts[chart].generators().len())
            .filter(|&g| {
                tau.rays()
                    .iter()
                    .all(|r| crate::lattice::dot(&charts[chart].generators()[g], r) == 0)
            })
            .collect();
        cone_points.push(fan.chart_point(chart, &face)?);
    }
    fan.polyhedral = Some(PolyhedralData {
        cones: cones.to_vec(),
        cone_points,
        chart_cones: maximal,
    });
    Ok(fan)
}

/// A monoid map `P_target -> P_source` between chart monoids, given as a
/// matrix `rank(source chart) x rank(target chart)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartHom {
    pub source_chart: usize,
    pub target_chart: usize,
    pub map: Vec<Vec<i64>>,
}

/// A morphism of fans: a point map plus, per source point `x`, the stalk
/// map `stalk(f(x)) -> stalk(x)` as a matrix in point coordinates.
#[derive(Clone, Debug)]
pub struct FanMorphism {
    pub source: Arc<KatoFan>,
    pub target: Arc<KatoFan>,
    pub point_map: Vec<usize>,
    pub local_homs: Vec<Vec<Vec<i64>>>,
}

impl FanMorphism {
    pub fn identity(fan: Arc<KatoFan>) -> Self {
        let point_map = (0..fan.len()).collect();
        let local_homs = fan.points.iter().map(|p| identity_i64(p.rank())).collect();
        Self {
            source: fan.clone(),
            target: fan,
            point_map,
            local_homs,
        }
    }

    /// The morphism induced by chart-level monoid maps. Every chart of the
    /// source must be covered.
    pub fn from_chart_homs(source: Arc<KatoFan>, target: Arc<KatoFan>, homs: &[ChartHom]) -> Result<Self> {
        let mut point_map = vec![usize::MAX; source.len()];
        let mut local_homs: Vec<Vec<Vec<i64>>> = vec![Vec::new(); source.len()];
        for h in homs {
            let (s, t) = (h.source_chart, h.target_chart);
            if s >= source.charts.len() || t >= target.charts.len() {
                return Err(Error::InvalidMorphism("chart index out of range".into()));
            }
            let (ps, pt) = (&source.charts[s], &target.charts[t]);
            if h.map.len() != ps.ambient_rank() || h.map.iter().any(|r| r.len() != pt.ambient_rank()) {
                return Err(Error::InvalidMorphism("chart map has the wrong shape".into()));
            }
            let images: Vec<Vec<i64>> = pt.generators().iter().map(|g| mat_vec_i64(&h.map, g)).collect();
            for (g, im) in pt.generators().iter().zip(&images) {
                if !ps.contains(im)? {
                    return Err(Error::InvalidMorphism(format!(
                        "generator {g:?} of target chart {t} maps to {im:?}, outside source chart {s}"
                    )));
                }
            }
            for m in source.members.iter().filter(|m| m.chart == s) {
                let face_t: Vec<usize> = (0..images.len())
                    .filter(|&i| match ps.face_of(&images[i]) {
                        Ok(Some(f)) => f.iter().all(|g| m.face.contains(g)),
                        _ => false,
                    })
                    .collect();
                let tm = target.member(t, &face_t)?;
                let x = m.point;
                let fx = tm.point;
                let dx = source.points[x].rank();
                let dfx = target.points[fx].rank();
                let hom = matrix_of(dx, dfx, |e| {
                    let w = mat_vec_i64(&tm.from_rep, e);
                    let up = tm.local.lift(&w)?;
                    let v = mat_vec_i64(&h.map, &up);
                    Ok(mat_vec_i64(&m.to_rep, &m.local.project(&v)?))
                })?;
                if point_map[x] != usize::MAX {
                    if point_map[x] != fx || local_homs[x] != hom {
                        return Err(Error::InvalidMorphism(format!(
                            "charts disagree at point {}",
                            source.points[x].id
                        )));
                    }
                    continue;
                }
                point_map[x] = fx;
                local_homs[x] = hom;
            }
        }
        if let Some(x) = point_map.iter().position(|&p| p == usize::MAX) {
            return Err(Error::InvalidMorphism(format!(
                "point {} is not covered by any chart map",
                source.points[x].id
            )));
        }
        let f = Self {
            source,
            target,
            point_map,
            local_homs,
        };
        f.validate()?;
        Ok(f)
    }

    /// The morphism of toric fans induced by a lattice map `N -> N'`
    /// (`rank N' x rank N`) sending each cone into a cone.
    pub fn toric(source: Arc<KatoFan>, target: Arc<KatoFan>, lattice_map: &[Vec<i64>]) -> Result<Self> {
        let (Some(ps), Some(pt)) = (source.polyhedral(), target.polyhedral()) else {
            return Err(Error::InvalidMorphism("toric morphisms need fans built from cones".into()));
        };
        let n = ps.cones[0].lattice_rank();
        let n2 = pt.cones[0].lattice_rank();
        if lattice_map.len() != n2 || lattice_map.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidMorphism("lattice map has the wrong shape".into()));
        }
        let mut homs = Vec::new();
        for (s, &ci) in ps.chart_cones.iter().enumerate() {
            let images: Vec<Vec<i64>> = ps.cones[ci].rays().iter().map(|r| mat_vec_i64(lattice_map, r)).collect();
            let t = pt
                .chart_cones
                .iter()
                .position(|&cj| images.iter().all(|v| pt.cones[cj].contains(v)))
                .ok_or_else(|| Error::InvalidMorphism(format!("cone {ci} maps into no cone of the target")))?;
            homs.push(ChartHom {
                source_chart: s,
                target_chart: t,
                map: transpose_i64(lattice_map, n),
            });
        }
        Self::from_chart_homs(source, target, &homs)
    }

    /// Order preservation, locality of stalk maps, and compatibility with
    /// restriction to generizations.
    pub fn validate(&self) -> Result<()> {
        let (src, tgt) = (&self.source, &self.target);
        for x in 0..src.len() {
            let fx = self.point_map[x];
            for &y in &src.points[x].specializes_to {
                if !tgt.specializes_to(fx, self.point_map[y]) {
                    return Err(Error::InvalidMorphism(format!(
                        "specialization {} -> {} is not preserved",
                        src.points[x].id, src.points[y].id
                    )));
                }
            }
            let hom = MonoidHom::new(&tgt.points[fx].stalk, &src.points[x].stalk, self.local_homs[x].clone())
                .map_err(|e| Error::InvalidMorphism(format!("at {}: {e}", src.points[x].id)))?;
            if !hom.is_local()? {
                return Err(Error::InvalidMorphism(format!("stalk map at {} is not local", src.points[x].id)));
            }
            for g in &src.points[x].generizations {
                let fy = self.point_map[g.point];
                let Some(tg) = tgt.points[fx].generization(fy) else {
                    return Err(Error::InvalidMorphism(format!(
                        "image of generization {} of {} is not a generization",
                        src.points[g.point].id, src.points[x].id
                    )));
                };
                let dfx = tgt.points[fx].rank();
                let lhs = mat_mul_i64(&self.local_homs[g.point], &tg.restriction, dfx);
                let rhs = mat_mul_i64(&g.restriction, &self.local_homs[x], dfx);
                if lhs != rhs {
                    return Err(Error::InvalidMorphism(format!(
                        "stalk maps do not commute with restriction from {} to {}",
                        src.points[x].id, src.points[g.point].id
                    )));
                }
            }
        }
        Ok(())
    }

    /// All stalk maps are isomorphisms.
    pub fn is_strict(&self) -> Result<bool> {
        for x in 0..self.source.len() {
            let fx = self.point_map[x];
            let hom = MonoidHom::new(
                &self.target.points[fx].stalk,
                &self.source.points[x].stalk,
                self.local_homs[x].clone(),
            )?;
            if !hom.is_isomorphism()? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &FanMorphism) -> Result<Self> {
        if !Arc::ptr_eq(&self.target, &other.source) && self.target.len() != other.source.len() {
            return Err(Error::InvalidMorphism("morphisms are not composable".into()));
        }
        let point_map: Vec<usize> = self.point_map.iter().map(|&y| other.point_map[y]).collect();
        let local_homs = (0..self.source.len())
            .map(|x| {
                let y = self.point_map[x];
                let dz = other.target.points[point_map[x]].rank();
                mat_mul_i64(&self.local_homs[x], &other.local_homs[y], dz)
            })
            .collect();
        Ok(Self {
            source: self.source.clone(),
            target: other.target.clone(),
            point_map,
            local_homs,
        })
    }
}
