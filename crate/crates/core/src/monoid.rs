//! Fine monoids presented by lattice generators, plus a split finite
//! torsion group and a split free unit group.
//!
//! The lattice part is the submonoid of `Z^ambient_rank` generated by the
//! stored vectors. It may itself contain units (e.g. `S_sigma` for a cone
//! that is not full-dimensional); [`AffineMonoid::decompose_sharp`] splits
//! those off.

use std::collections::{BTreeSet, HashSet};

use num_rational::BigRational;
use num_traits::{One, Signed};
use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::error::{Error, Result};
use crate::lattice::{dot, rank_i64, rational, solve_integer, solve_rational, Sublattice};

/// `Z^n`-graded monoid `<generators> (+) Z^unit_rank (+) (+)_i Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "MonoidJson", into = "MonoidJson")]
pub struct AffineMonoid {
    ambient_rank: usize,
    generators: Vec<Vec<i64>>,
    torsion_invariants: Vec<i64>,
    unit_rank: usize,
}

#[derive(Serialize, Deserialize)]
struct MonoidJson {
    rank: usize,
    generators: Vec<Vec<i64>>,
    #[serde(default)]
    torsion: Vec<i64>,
    #[serde(default)]
    unit_rank: usize,
}

impl TryFrom<MonoidJson> for AffineMonoid {
    type Error = Error;

    fn try_from(j: MonoidJson) -> Result<Self> {
        AffineMonoid::new(j.rank, j.generators, j.torsion, j.unit_rank)
    }
}

impl From<AffineMonoid> for MonoidJson {
    fn from(m: AffineMonoid) -> Self {
        MonoidJson {
            rank: m.ambient_rank,
            generators: m.generators,
            torsion: m.torsion_invariants,
            unit_rank: m.unit_rank,
        }
    }
}

/// An element `(lattice, unit, torsion)` of an [`AffineMonoid`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MonoidElement {
    pub lattice_part: Vec<i64>,
    pub unit_part: Vec<i64>,
    pub torsion_part: Vec<i64>,
}

/// A prime ideal, stored by the generators of its complementary face.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PrimeIdeal {
    pub face_generators: Vec<usize>,
}

impl PrimeIdeal {
    /// Inclusion of primes is reverse inclusion of faces.
    pub fn is_contained_in(&self, other: &PrimeIdeal) -> bool {
        other.face_generators.iter().all(|g| self.face_generators.contains(g))
    }
}

/// `P = sharp (+) units (+) torsion`, with the maps between `P`'s lattice
/// part and the sharp part's coordinates.
#[derive(Clone, Debug)]
pub struct SharpDecomposition {
    pub sharp: AffineMonoid,
    pub unit_rank: usize,
    pub torsion: Vec<i64>,
    coords: Option<Sublattice>,
    units: Option<Sublattice>,
}

impl SharpDecomposition {
    /// Image in the sharp part of a lattice vector in `P^gp`.
    pub fn project(&self, v: &[i64]) -> Result<Vec<i64>> {
        let c = match &self.coords {
            None => v.to_vec(),
            Some(lam) => lam
                .coordinates(v)
                .ok_or_else(|| Error::NotHomomorphism(format!("{v:?} is not in the group of the monoid")))?,
        };
        match &self.units {
            None => Ok(c),
            Some(u) => u.project(&c),
        }
    }

    /// A lattice vector of `P^gp` projecting to `w`.
    pub fn lift(&self, w: &[i64]) -> Result<Vec<i64>> {
        let c = match &self.units {
            None => w.to_vec(),
            Some(u) => u.lift(w)?,
        };
        match &self.coords {
            None => Ok(c),
            Some(lam) => lam.from_coordinates(&c),
        }
    }

    /// True when the sharp part uses the original coordinates unchanged.
    pub fn is_identity(&self) -> bool {
        self.coords.is_none() && self.units.is_none()
    }
}

/// Lattice points of a pointed cone, found by enumerating a box around the
/// zonotope spanned by the rays and keeping irreducibles in order of a
/// positive grading.
pub fn cone_hilbert_basis(cone: &Cone) -> Result<Vec<Vec<i64>>> {
    if !cone.is_strictly_convex() {
        return Err(Error::ContainsLine);
    }
    let d = cone.lattice_rank();
    if cone.rays().is_empty() {
        return Ok(Vec::new());
    }
    let mut w = vec![0i64; d];
    for a in cone.inequalities() {
        for (x, y) in w.iter_mut().zip(a) {
            *x += y;
        }
    }
    let max_degree: i64 = cone.rays().iter().map(|r| dot(&w, r)).sum();
    let bounds: Vec<i64> = (0..d).map(|k| cone.rays().iter().map(|r| r[k].abs()).sum()).collect();

    let mut candidates: Vec<(i64, Vec<i64>)> = Vec::new();
    let mut x: Vec<i64> = bounds.iter().map(|b| -b).collect();
    loop {
        if cone.contains(&x) {
            let deg = dot(&w, &x);
            if deg > 0 && deg <= max_degree {
                candidates.push((deg, x.clone()));
            }
        }
        let mut k = 0;
        while k < d && x[k] == bounds[k] {
            x[k] = -bounds[k];
            k += 1;
        }
        if k == d {
            break;
        }
        x[k] += 1;
    }
    candidates.sort();
    let mut basis: Vec<Vec<i64>> = Vec::new();
    for (_, c) in candidates {
        let reducible = basis.iter().any(|h| {
            let diff: Vec<i64> = c.iter().zip(h).map(|(a, b)| a - b).collect();
            cone.contains(&diff)
        });
        if !reducible {
            basis.push(c);
        }
    }
    basis.sort();
    Ok(basis)
}

/// A generating set of the monoid `cone ∩ Z^d`: the Hilbert basis of the
/// pointed part lifted back, plus `+-` a basis of the lineality lattice.
pub fn cone_lattice_generators(cone: &Cone) -> Result<Vec<Vec<i64>>> {
    let d = cone.lattice_rank();
    if cone.is_strictly_convex() {
        return cone_hilbert_basis(cone);
    }
    let lin = Sublattice::spanned_by(d, cone.lineality())?;
    let projected: Vec<Vec<i64>> = cone.rays().iter().map(|r| lin.project(r)).collect::<Result<_>>()?;
    let pointed = Cone::from_generators(d - lin.rank(), &projected)?;
    let mut gens = Vec::new();
    for h in cone_hilbert_basis(&pointed)? {
        gens.push(lin.lift(&h)?);
    }
    for l in cone.lineality() {
        gens.push(l.clone());
        gens.push(l.iter().map(|x| -x).collect());
    }
    Ok(gens)
}

impl AffineMonoid {
    /// Generators are sorted lexicographically, deduplicated and zero
    /// vectors are dropped.
    pub fn new(ambient_rank: usize, generators: Vec<Vec<i64>>, torsion_invariants: Vec<i64>, unit_rank: usize) -> Result<Self> {
        for g in &generators {
            if g.len() != ambient_rank {
                return Err(Error::DimensionMismatch {
                    expected: ambient_rank,
                    got: g.len(),
                });
            }
        }
        if let Some(t) = torsion_invariants.iter().find(|&&t| t <= 1) {
            return Err(Error::InvalidMonoid(format!("torsion invariant {t} must exceed 1")));
        }
        let set: BTreeSet<Vec<i64>> = generators.into_iter().filter(|g| g.iter().any(|&x| x != 0)).collect();
        Ok(Self {
            ambient_rank,
            generators: set.into_iter().collect(),
            torsion_invariants,
            unit_rank,
        })
    }

    pub fn from_generators(ambient_rank: usize, generators: Vec<Vec<i64>>) -> Result<Self> {
        Self::new(ambient_rank, generators, Vec::new(), 0)
    }

    /// `N^n` with the standard basis.
    pub fn free(n: usize) -> Self {
        let gens = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
        Self::from_generators(n, gens).expect("standard basis")
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn torsion_invariants(&self) -> &[i64] {
        &self.torsion_invariants
    }

    pub fn unit_rank(&self) -> usize {
        self.unit_rank
    }

    /// The cone in `R^ambient_rank` spanned by the lattice generators.
    pub fn cone(&self) -> Result<Cone> {
        Cone::from_generators(self.ambient_rank, &self.generators)
    }

    /// Rank of the groupification `P^gp`.
    pub fn group_rank(&self) -> usize {
        rank_i64(&self.generators, self.ambient_rank) + self.unit_rank
    }

    /// Coordinates of the lattice part in a basis of its group. `None`
    /// means the group is all of `Z^ambient_rank` and coordinates are kept.
    fn group_coordinates(&self) -> Result<(Option<Sublattice>, Vec<Vec<i64>>)> {
        let lam = Sublattice::spanned_by(self.ambient_rank, &self.generators)?;
        if lam.rank() == self.ambient_rank && lam.is_saturated() {
            return Ok((None, self.generators.clone()));
        }
        let coords = self
            .generators
            .iter()
            .map(|g| lam.coordinates(g).expect("generator lies in its own span"))
            .collect();
        Ok((Some(lam), coords))
    }

    /// Writes `v` as `sum c_i g_i` over the lattice generators. Coefficients
    /// of generators that are units of the lattice part may be negative;
    /// all others are nonnegative. `None` if `v` is not in the monoid.
    pub fn decompose(&self, v: &[i64]) -> Result<Option<Vec<i64>>> {
        if v.len() != self.ambient_rank {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_rank,
                got: v.len(),
            });
        }
        let cone = self.cone()?;
        if !cone.contains(v) {
            return Ok(None);
        }
        let is_unit = |g: &Vec<i64>| cone.inequalities().iter().all(|a| dot(a, g) == 0);
        let lineal: Vec<usize> = (0..self.generators.len()).filter(|&i| is_unit(&self.generators[i])).collect();
        let others: Vec<usize> = (0..self.generators.len()).filter(|&i| !is_unit(&self.generators[i])).collect();
        let mut w = vec![0i64; self.ambient_rank];
        for a in cone.inequalities() {
            for (x, y) in w.iter_mut().zip(a) {
                *x += y;
            }
        }
        let lineal_gens: Vec<Vec<i64>> = lineal.iter().map(|&i| self.generators[i].clone()).collect();
        // suffix cones for pruning: remainder after fixing others[..k] must
        // lie in the cone of the remaining generators
        let mut suffix = Vec::with_capacity(others.len() + 1);
        for k in 0..=others.len() {
            let mut gens: Vec<Vec<i64>> = others[k..].iter().map(|&i| self.generators[i].clone()).collect();
            gens.extend(lineal_gens.iter().cloned());
            suffix.push(Cone::from_generators(self.ambient_rank, &gens)?);
        }

        struct Search<'a> {
            gens: &'a [Vec<i64>],
            others: &'a [usize],
            lineal: &'a [usize],
            lineal_gens: &'a [Vec<i64>],
            w: &'a [i64],
            suffix: &'a [Cone],
            failed: HashSet<(usize, Vec<i64>)>,
        }

        impl Search<'_> {
            fn run(&mut self, k: usize, rem: Vec<i64>, coeffs: &mut Vec<i64>) -> Result<bool> {
                if !self.suffix[k].contains(&rem) || self.failed.contains(&(k, rem.clone())) {
                    return Ok(false);
                }
                if k == self.others.len() {
                    if let Some(c) = solve_integer(self.lineal_gens, &rem)? {
                        for (j, &i) in self.lineal.iter().enumerate() {
                            coeffs[i] = c[j];
                        }
                        return Ok(true);
                    }
                    self.failed.insert((k, rem));
                    return Ok(false);
                }
                let g = &self.gens[self.others[k]];
                let wg = dot(self.w, g);
                let budget = dot(self.w, &rem) / wg;
                for c in (0..=budget).rev() {
                    let next: Vec<i64> = rem.iter().zip(g).map(|(x, y)| x - c * y).collect();
                    coeffs[self.others[k]] = c;
                    if self.run(k + 1, next, coeffs)? {
                        return Ok(true);
                    }
                }
                coeffs[self.others[k]] = 0;
                self.failed.insert((k, rem));
                Ok(false)
            }
        }

        let mut search = Search {
            gens: &self.generators,
            others: &others,
            lineal: &lineal,
            lineal_gens: &lineal_gens,
            w: &w,
            suffix: &suffix,
            failed: HashSet::new(),
        };
        let mut coeffs = vec![0i64; self.generators.len()];
        if search.run(0, v.to_vec(), &mut coeffs)? {
            Ok(Some(coeffs))
        } else {
            Ok(None)
        }
    }

    /// Membership of a lattice vector in the lattice part.
    pub fn contains(&self, v: &[i64]) -> Result<bool> {
        Ok(self.decompose(v)?.is_some())
    }

    /// Membership of a full element; unit and torsion parts always lie in
    /// the monoid once their shapes match.
    pub fn contains_element(&self, e: &MonoidElement) -> Result<bool> {
        if e.unit_part.len() != self.unit_rank {
            return Err(Error::DimensionMismatch {
                expected: self.unit_rank,
                got: e.unit_part.len(),
            });
        }
        if e.torsion_part.len() != self.torsion_invariants.len() {
            return Err(Error::DimensionMismatch {
                expected: self.torsion_invariants.len(),
                got: e.torsion_part.len(),
            });
        }
        self.contains(&e.lattice_part)
    }

    /// Minimal generating set of the lattice part, sorted; defined when the
    /// lattice part contains no line.
    pub fn hilbert_basis(&self) -> Result<Vec<Vec<i64>>> {
        if !self.cone()?.is_strictly_convex() {
            return Err(Error::ContainsLine);
        }
        let mut out = Vec::new();
        for (i, g) in self.generators.iter().enumerate() {
            let mut reducible = false;
            for (j, h) in self.generators.iter().enumerate() {
                if i == j {
                    continue;
                }
                let diff: Vec<i64> = g.iter().zip(h).map(|(a, b)| a - b).collect();
                if self.contains(&diff)? {
                    reducible = true;
                    break;
                }
            }
            if !reducible {
                out.push(g.clone());
            }
        }
        Ok(out)
    }

    /// `{p in P^gp : n p in P for some n > 0}`.
    pub fn saturate(&self) -> Result<Self> {
        let (lam, coords) = self.group_coordinates()?;
        let r = lam.as_ref().map_or(self.ambient_rank, Sublattice::rank);
        let cone = Cone::from_generators(r, &coords)?;
        let sat = cone_lattice_generators(&cone)?;
        let gens = match &lam {
            None => sat,
            Some(l) => sat.iter().map(|c| l.from_coordinates(c)).collect::<Result<_>>()?,
        };
        Self::new(self.ambient_rank, gens, self.torsion_invariants.clone(), self.unit_rank)
    }

    /// The monoid `cone(P) ∩ Z^ambient_rank`, i.e. saturation relative to
    /// the ambient lattice rather than to `P^gp`.
    pub fn saturate_in_ambient(&self) -> Result<Self> {
        let gens = cone_lattice_generators(&self.cone()?)?;
        Self::new(self.ambient_rank, gens, self.torsion_invariants.clone(), self.unit_rank)
    }

    pub fn is_saturated(&self) -> Result<bool> {
        let (lam, coords) = self.group_coordinates()?;
        let r = lam.as_ref().map_or(self.ambient_rank, Sublattice::rank);
        let in_coords = Self::from_generators(r, coords)?;
        for g in cone_lattice_generators(&in_coords.cone()?)? {
            if !in_coords.contains(&g)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn is_sharp(&self) -> Result<bool> {
        Ok(self.unit_rank == 0 && self.torsion_invariants.is_empty() && self.cone()?.is_strictly_convex())
    }

    /// `P ≅ sharp (+) Z^unit_rank (+) torsion`.
    pub fn decompose_sharp(&self) -> Result<SharpDecomposition> {
        if !self.is_saturated()? {
            return Err(Error::NotSaturated);
        }
        let (lam, coords) = self.group_coordinates()?;
        let r = lam.as_ref().map_or(self.ambient_rank, Sublattice::rank);
        let cone = Cone::from_generators(r, &coords)?;
        let lineal: Vec<Vec<i64>> = coords
            .iter()
            .filter(|c| cone.inequalities().iter().all(|a| dot(a, c) == 0))
            .cloned()
            .collect();
        let units = if lineal.is_empty() {
            None
        } else {
            Some(Sublattice::spanned_by(r, &lineal)?)
        };
        let lattice_units = units.as_ref().map_or(0, Sublattice::rank);
        let projected: Vec<Vec<i64>> = match &units {
            None => coords,
            Some(u) => coords.iter().map(|c| u.project(c)).collect::<Result<_>>()?,
        };
        let sharp_lattice = Self::from_generators(r - lattice_units, projected)?;
        let sharp = Self::from_generators(r - lattice_units, sharp_lattice.hilbert_basis()?)?;
        Ok(SharpDecomposition {
            sharp,
            unit_rank: lattice_units + self.unit_rank,
            torsion: self.torsion_invariants.clone(),
            coords: lam,
            units,
        })
    }

    /// Generator indices lying on each face of the cone, as primes, with
    /// the generic prime (full face) first and larger primes later.
    pub fn primes(&self) -> Result<Vec<PrimeIdeal>> {
        let cone = self.cone()?;
        let lattice = cone.faces();
        let mut out: Vec<PrimeIdeal> = lattice
            .faces
            .iter()
            .map(|f| PrimeIdeal {
                face_generators: self.face_generator_indices(&cone, f),
            })
            .collect();
        out.sort_by(|a, b| {
            b.face_generators
                .len()
                .cmp(&a.face_generators.len())
                .then_with(|| a.face_generators.cmp(&b.face_generators))
        });
        Ok(out)
    }

    /// Generator indices of the smallest face of the cone containing `v`,
    /// or `None` if `v` is outside the cone.
    pub fn face_of(&self, v: &[i64]) -> Result<Option<Vec<usize>>> {
        let cone = self.cone()?;
        Ok(cone.face_containing(v).map(|rays| self.face_generator_indices(&cone, &rays)))
    }

    fn face_generator_indices(&self, cone: &Cone, rays: &[usize]) -> Vec<usize> {
        let normals = cone.face_normals(rays);
        (0..self.generators.len())
            .filter(|&i| normals.iter().all(|a| dot(a, &self.generators[i]) == 0))
            .collect()
    }

    /// Checks that the indexed generators are exactly those on some face.
    pub fn prime(&self, face_generators: Vec<usize>) -> Result<PrimeIdeal> {
        let mut sorted = face_generators;
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.iter().any(|&i| i >= self.generators.len()) {
            return Err(Error::NotPrime(format!("generator index out of range in {sorted:?}")));
        }
        let cone = self.cone()?;
        let gens: Vec<Vec<i64>> = sorted.iter().map(|&i| self.generators[i].clone()).collect();
        let mut p = vec![0i64; self.ambient_rank];
        for g in &gens {
            for (x, y) in p.iter_mut().zip(g) {
                *x += y;
            }
        }
        let face = cone.face_containing(&p).expect("sum of generators lies in the cone");
        let expected = self.face_generator_indices(&cone, &face);
        if expected != sorted {
            return Err(Error::NotPrime(format!(
                "generators {sorted:?} do not form a face (the smallest face through them has {expected:?})"
            )));
        }
        Ok(PrimeIdeal { face_generators: sorted })
    }

    /// The face of a prime as a monoid.
    pub fn face_monoid(&self, prime: &PrimeIdeal) -> Result<Self> {
        let gens = prime.face_generators.iter().map(|&i| self.generators[i].clone()).collect();
        Self::new(self.ambient_rank, gens, self.torsion_invariants.clone(), self.unit_rank)
    }

    /// `v in p` iff `v in P` and `v` is not in the face of `p`.
    pub fn prime_contains(&self, prime: &PrimeIdeal, v: &[i64]) -> Result<bool> {
        if !self.contains(v)? {
            return Ok(false);
        }
        let face = self.face_monoid(prime)?;
        let cone = self.cone()?;
        let rays: Vec<usize> = match cone.face_containing(&face.sum_of_generators()) {
            Some(f) => f,
            None => return Ok(true),
        };
        Ok(!cone.face_normals(&rays).iter().all(|a| dot(a, v) == 0))
    }

    pub fn sum_of_generators(&self) -> Vec<i64> {
        let mut p = vec![0i64; self.ambient_rank];
        for g in &self.generators {
            for (x, y) in p.iter_mut().zip(g) {
                *x += y;
            }
        }
        p
    }

    /// `P_p = P + face^gp` together with the canonical map `P -> P_p`.
    pub fn localize(&self, prime: &PrimeIdeal) -> Result<(Self, MonoidHom)> {
        let mut gens = self.generators.clone();
        for &i in &prime.face_generators {
            gens.push(self.generators[i].iter().map(|x| -x).collect());
        }
        let local = Self::new(self.ambient_rank, gens, self.torsion_invariants.clone(), self.unit_rank)?;
        let hom = MonoidHom::identity_into(self, &local)?;
        Ok((local, hom))
    }

    /// Isomorphism test: same unit rank and torsion, and sharp parts
    /// related by a unimodular map carrying Hilbert basis onto Hilbert basis.
    pub fn is_isomorphic(&self, other: &Self) -> Result<bool> {
        let a = self.decompose_sharp()?;
        let b = other.decompose_sharp()?;
        if a.unit_rank != b.unit_rank || a.torsion != b.torsion {
            return Ok(false);
        }
        Ok(find_sharp_isomorphism(&a.sharp, &b.sharp)?.is_some())
    }
}

/// A unimodular matrix `M` with `M * HB(a) = HB(b)` as sets, for sharp
/// monoids whose groups are all of their ambient lattices.
pub fn find_sharp_isomorphism(a: &AffineMonoid, b: &AffineMonoid) -> Result<Option<Vec<Vec<i64>>>> {
    let d = a.ambient_rank();
    if d != b.ambient_rank() {
        return Ok(None);
    }
    let ha = a.hilbert_basis()?;
    let hb = b.hilbert_basis()?;
    if ha.len() != hb.len() {
        return Ok(None);
    }
    if d == 0 {
        return Ok(Some(Vec::new()));
    }
    // greedily choose d independent elements of HB(a)
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..ha.len() {
        let mut trial: Vec<Vec<i64>> = chosen.iter().map(|&j| ha[j].clone()).collect();
        trial.push(ha[i].clone());
        if rank_i64(&trial, d) == trial.len() {
            chosen.push(i);
        }
        if chosen.len() == d {
            break;
        }
    }
    if chosen.len() < d {
        return Ok(None);
    }
    let target: BTreeSet<Vec<i64>> = hb.iter().cloned().collect();
    let mut assignment = Vec::with_capacity(d);
    let found = search_assignment(&ha, &hb, &chosen, &target, &mut assignment)?;
    Ok(found)
}

fn search_assignment(
    ha: &[Vec<i64>],
    hb: &[Vec<i64>],
    chosen: &[usize],
    target: &BTreeSet<Vec<i64>>,
    assignment: &mut Vec<usize>,
) -> Result<Option<Vec<Vec<i64>>>> {
    let d = chosen.len();
    if assignment.len() == d {
        return Ok(map_from_assignment(ha, hb, chosen, assignment, target));
    }
    for j in 0..hb.len() {
        if assignment.contains(&j) {
            continue;
        }
        assignment.push(j);
        if let Some(m) = search_assignment(ha, hb, chosen, target, assignment)? {
            return Ok(Some(m));
        }
        assignment.pop();
    }
    Ok(None)
}

fn map_from_assignment(
    ha: &[Vec<i64>],
    hb: &[Vec<i64>],
    chosen: &[usize],
    assignment: &[usize],
    target: &BTreeSet<Vec<i64>>,
) -> Option<Vec<Vec<i64>>> {
    let d = chosen.len();
    // row k of M satisfies  M_k . a_i = b_{pi(i)}[k]  for chosen i
    let a_rows: Vec<Vec<BigRational>> = chosen
        .iter()
        .map(|&i| ha[i].iter().map(|&x| rational(x)).collect())
        .collect();
    let mut m = Vec::with_capacity(d);
    for k in 0..d {
        let rhs: Vec<BigRational> = assignment.iter().map(|&j| rational(hb[j][k])).collect();
        let row = solve_rational(&a_rows, &rhs, d)?;
        let mut ints = Vec::with_capacity(d);
        for x in row {
            if !x.is_integer() {
                return None;
            }
            ints.push(i64::try_from(x.to_integer()).ok()?);
        }
        m.push(ints);
    }
    let det = crate::lattice::det_i64(&m).ok()?;
    if !det.abs().is_one() {
        return None;
    }
    let image: BTreeSet<Vec<i64>> = ha.iter().map(|v| crate::lattice::mat_vec_i64(&m, v)).collect();
    (image == *target).then_some(m)
}

/// A homomorphism acting separately on the lattice, unit and torsion parts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MonoidHom {
    pub source: AffineMonoid,
    pub target: AffineMonoid,
    /// `target.ambient_rank x source.ambient_rank`
    pub lattice_map: Vec<Vec<i64>>,
    /// `target.unit_rank x source.unit_rank`
    pub unit_map: Vec<Vec<i64>>,
    /// `target.torsion x source.torsion`, images of the cyclic generators
    pub torsion_map: Vec<Vec<i64>>,
}

impl MonoidHom {
    /// A hom given by a lattice matrix; units and torsion map to zero.
    pub fn new(source: &AffineMonoid, target: &AffineMonoid, lattice_map: Vec<Vec<i64>>) -> Result<Self> {
        let unit_map = vec![vec![0; source.unit_rank]; target.unit_rank];
        let torsion_map = vec![vec![0; source.torsion_invariants.len()]; target.torsion_invariants.len()];
        Self::with_parts(source, target, lattice_map, unit_map, torsion_map)
    }

    pub fn with_parts(
        source: &AffineMonoid,
        target: &AffineMonoid,
        lattice_map: Vec<Vec<i64>>,
        unit_map: Vec<Vec<i64>>,
        torsion_map: Vec<Vec<i64>>,
    ) -> Result<Self> {
        let shape_ok = |m: &Vec<Vec<i64>>, r: usize, c: usize| m.len() == r && m.iter().all(|row| row.len() == c);
        if !shape_ok(&lattice_map, target.ambient_rank, source.ambient_rank)
            || !shape_ok(&unit_map, target.unit_rank, source.unit_rank)
            || !shape_ok(&torsion_map, target.torsion_invariants.len(), source.torsion_invariants.len())
        {
            return Err(Error::NotHomomorphism("matrix shapes do not match the monoids".into()));
        }
        for (j, &d) in source.torsion_invariants.iter().enumerate() {
            for (k, &e) in target.torsion_invariants.iter().enumerate() {
                if (d * torsion_map[k][j]) % e != 0 {
                    return Err(Error::NotHomomorphism(format!(
                        "torsion generator of order {d} cannot map to {} in Z/{e}",
                        torsion_map[k][j]
                    )));
                }
            }
        }
        for g in &source.generators {
            let image = crate::lattice::mat_vec_i64(&lattice_map, g);
            if !target.contains(&image)? {
                return Err(Error::NotHomomorphism(format!(
                    "generator {g:?} maps to {image:?}, which is outside the target"
                )));
            }
        }
        Ok(Self {
            source: source.clone(),
            target: target.clone(),
            lattice_map,
            unit_map,
            torsion_map,
        })
    }

    pub fn identity(m: &AffineMonoid) -> Self {
        Self::identity_into(m, m).expect("identity is a homomorphism")
    }

    /// The identity matrix viewed as a map into a monoid on the same lattice.
    pub fn identity_into(source: &AffineMonoid, target: &AffineMonoid) -> Result<Self> {
        let id = |n: usize| crate::lattice::identity_i64(n);
        let tors = source.torsion_invariants.len();
        Self::with_parts(source, target, id(source.ambient_rank), id(source.unit_rank), id(tors))
    }

    pub fn apply(&self, v: &[i64]) -> Vec<i64> {
        crate::lattice::mat_vec_i64(&self.lattice_map, v)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MonoidHom) -> Result<Self> {
        let mul = |a: &Vec<Vec<i64>>, b: &Vec<Vec<i64>>, cols: usize| crate::lattice::mat_mul_i64(a, b, cols);
        let mut torsion_map = mul(&self.torsion_map, &other.torsion_map, other.source.torsion_invariants.len());
        for (row, &e) in torsion_map.iter_mut().zip(&self.target.torsion_invariants) {
            row.iter_mut().for_each(|x| *x = x.rem_euclid(e));
        }
        Self::with_parts(
            &other.source,
            &self.target,
            mul(&self.lattice_map, &other.lattice_map, other.source.ambient_rank),
            mul(&self.unit_map, &other.unit_map, other.source.unit_rank),
            torsion_map,
        )
    }

    /// `phi(m_source) ⊆ m_target` for sharp source and target.
    pub fn is_local(&self) -> Result<bool> {
        if !self.source.is_sharp()? || !self.target.is_sharp()? {
            return Err(Error::NotSharp);
        }
        Ok(self
            .source
            .hilbert_basis()?
            .iter()
            .all(|h| self.apply(h).iter().any(|&x| x != 0)))
    }

    /// For sharp monoids: Hilbert basis maps bijectively onto Hilbert basis
    /// and the groups have equal rank.
    pub fn is_isomorphism(&self) -> Result<bool> {
        if !self.source.is_sharp()? || !self.target.is_sharp()? {
            return Err(Error::NotSharp);
        }
        let hs = self.source.hilbert_basis()?;
        let ht: BTreeSet<Vec<i64>> = self.target.hilbert_basis()?.into_iter().collect();
        let image: BTreeSet<Vec<i64>> = hs.iter().map(|h| self.apply(h)).collect();
        Ok(image.len() == hs.len() && image == ht && self.source.group_rank() == self.target.group_rank())
    }
}

/// `is_local_hom` for a map given by its lattice matrix.
pub fn is_local_hom(source: &AffineMonoid, target: &AffineMonoid, lattice_map: Vec<Vec<i64>>) -> Result<bool> {
    MonoidHom::new(source, target, lattice_map)?.is_local()
}

/// `Hom(P, R>=0)` in `N_P = Hom(P^gp, Z)`: coordinates of the lattice part's
/// group followed by the free unit directions. Torsion is invisible.
pub fn cone_of_monoid(p: &AffineMonoid) -> Result<Cone> {
    let (lam, coords) = p.group_coordinates()?;
    let r = lam.as_ref().map_or(p.ambient_rank, Sublattice::rank);
    let dual = Cone::from_generators(r, &coords)?.dual()?;
    let pad = |v: &Vec<i64>| {
        let mut out = v.clone();
        out.extend(std::iter::repeat_n(0, p.unit_rank));
        out
    };
    let mut gens: Vec<Vec<i64>> = dual.rays().iter().map(pad).collect();
    for l in dual.lineality() {
        gens.push(pad(l));
        gens.push(pad(&l.iter().map(|x| -x).collect()));
    }
    Cone::from_generators(r + p.unit_rank, &gens)
}

/// `S_sigma = sigma^vee ∩ M`, generated by its Hilbert basis together
/// with `+-` a basis of its unit lattice.
pub fn monoid_of_cone(sigma: &Cone) -> Result<AffineMonoid> {
    let gens = cone_lattice_generators(&sigma.dual()?)?;
    AffineMonoid::from_generators(sigma.lattice_rank(), gens)
}
