//! Rational polyhedral cones in `Z^n`, their duals and face lattices.
//!
//! A [`Cone`] keeps both descriptions: extreme rays plus a lineality basis,
//! and facet inequalities plus equations of its linear span. The two are
//! computed from each other by the double description method.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::{kernel_vectors, rank_i64, solve_rational};

/// Generators of `{x : A x >= 0}`: rays of the pointed part and a basis of
/// the lineality space.
#[derive(Clone, Debug, Default)]
pub(crate) struct DdOutput {
    pub rays: Vec<Vec<i128>>,
    pub lineality: Vec<Vec<i128>>,
}

fn dot128(a: &[i128], b: &[i128]) -> i128 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn primitive128(v: &mut [i128]) {
    let g = v.iter().fold(0i128, |g, &x| g.gcd(&x));
    if g > 1 {
        v.iter_mut().for_each(|x| *x /= g);
    }
}

/// `s * v - t * w`, made primitive.
fn combine(s: i128, v: &[i128], t: i128, w: &[i128]) -> Vec<i128> {
    let mut out: Vec<i128> = v.iter().zip(w).map(|(x, y)| s * x - t * y).collect();
    primitive128(&mut out);
    out
}

/// Incremental double description. Lineality directions are consumed one
/// constraint at a time; afterwards rays are split into positive, zero and
/// negative parts and adjacent pairs are combined (combinatorial test).
pub(crate) fn double_description(dim: usize, constraints: &[Vec<i64>]) -> DdOutput {
    let cons: Vec<Vec<i128>> = constraints
        .iter()
        .map(|c| c.iter().map(|&x| x as i128).collect())
        .collect();
    let mut lineality: Vec<Vec<i128>> = (0..dim)
        .map(|i| (0..dim).map(|j| i128::from(i == j)).collect())
        .collect();
    let mut rays: Vec<Vec<i128>> = Vec::new();

    for (k, a) in cons.iter().enumerate() {
        if let Some(p) = lineality.iter().position(|l| dot128(a, l) != 0) {
            let mut l0 = lineality.remove(p);
            if dot128(a, &l0) < 0 {
                l0.iter_mut().for_each(|x| *x = -*x);
            }
            let al0 = dot128(a, &l0);
            for l in lineality.iter_mut() {
                let al = dot128(a, l);
                if al != 0 {
                    *l = combine(al0, l, al, &l0);
                }
            }
            for r in rays.iter_mut() {
                let ar = dot128(a, r);
                if ar != 0 {
                    *r = combine(al0, r, ar, &l0);
                }
            }
            rays.push(l0);
            continue;
        }

        let vals: Vec<i128> = rays.iter().map(|r| dot128(a, r)).collect();
        if vals.iter().all(|&v| v >= 0) {
            continue;
        }
        let zero_sets: Vec<Vec<bool>> = rays
            .iter()
            .map(|r| cons[..k].iter().map(|c| dot128(c, r) == 0).collect())
            .collect();
        let mut next: Vec<Vec<i128>> = rays
            .iter()
            .zip(&vals)
            .filter(|(_, &v)| v >= 0)
            .map(|(r, _)| r.clone())
            .collect();
        for p in (0..rays.len()).filter(|&i| vals[i] > 0) {
            for n in (0..rays.len()).filter(|&i| vals[i] < 0) {
                let common: Vec<bool> = zero_sets[p]
                    .iter()
                    .zip(&zero_sets[n])
                    .map(|(x, y)| *x && *y)
                    .collect();
                let blocked = (0..rays.len()).any(|r| {
                    r != p
                        && r != n
                        && common
                            .iter()
                            .zip(&zero_sets[r])
                            .all(|(c, z)| !*c || *z)
                });
                if !blocked {
                    next.push(combine(vals[p], &rays[n], vals[n], &rays[p]));
                }
            }
        }
        rays = next;
    }
    DdOutput { rays, lineality }
}

fn narrow(v: &[i128]) -> Result<Vec<i64>> {
    v.iter().map(|&x| i64::try_from(x).map_err(|_| Error::Overflow)).collect()
}

/// Orthogonal projection of `v` onto the complement of `span(basis)`,
/// scaled to a primitive integer vector. This gives a canonical
/// representative of `v` modulo the subspace.
fn project_out(v: &[i64], basis: &[Vec<i64>]) -> Result<Vec<i64>> {
    if basis.is_empty() {
        let mut out = v.to_vec();
        crate::lattice::make_primitive(&mut out);
        return Ok(out);
    }
    let q = |x: i64| BigRational::from_integer(BigInt::from(x));
    let k = basis.len();
    let gram: Vec<Vec<BigRational>> = (0..k)
        .map(|i| (0..k).map(|j| q(crate::lattice::dot(&basis[i], &basis[j]))).collect())
        .collect();
    let rhs: Vec<BigRational> = basis.iter().map(|b| q(crate::lattice::dot(b, v))).collect();
    let c = solve_rational(&gram, &rhs, k).expect("gram matrix of a basis is invertible");
    let proj: Vec<BigRational> = (0..v.len())
        .map(|i| {
            let mut x = q(v[i]);
            for (cj, b) in c.iter().zip(basis) {
                x -= cj * q(b[i]);
            }
            x
        })
        .collect();
    let lcm = proj.iter().fold(BigInt::from(1), |l, x| l.lcm(x.denom()));
    let mut ints: Vec<BigInt> = proj.iter().map(|x| (x * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() {
        ints.iter_mut().for_each(|x| *x /= &g);
    }
    ints.iter().map(|x| x.to_i64().ok_or(Error::Overflow)).collect()
}

/// A rational polyhedral cone in `R^lattice_rank`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cone {
    lattice_rank: usize,
    rays: Vec<Vec<i64>>,
    lineality: Vec<Vec<i64>>,
    inequalities: Vec<Vec<i64>>,
    equations: Vec<Vec<i64>>,
}

/// Faces as subsets of ray indices, sorted by size then lexicographically.
/// Every face contains the lineality space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FaceLattice {
    pub faces: Vec<Vec<usize>>,
}

impl FaceLattice {
    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// `faces[i]` is a face of `faces[j]`.
    pub fn is_face_of(&self, i: usize, j: usize) -> bool {
        self.faces[i].iter().all(|r| self.faces[j].contains(r))
    }

    pub fn index_of(&self, face: &[usize]) -> Option<usize> {
        self.faces.iter().position(|f| f == face)
    }
}

impl Cone {
    /// The cone generated by the given vectors (the zero cone if empty).
    pub fn from_generators(lattice_rank: usize, generators: &[Vec<i64>]) -> Result<Self> {
        for g in generators {
            if g.len() != lattice_rank {
                return Err(Error::DimensionMismatch {
                    expected: lattice_rank,
                    got: g.len(),
                });
            }
        }
        let gens: Vec<Vec<i64>> = generators.iter().filter(|g| g.iter().any(|&x| x != 0)).cloned().collect();
        let equations = kernel_vectors(&gens, lattice_rank)?;
        let dual = double_description(lattice_rank, &gens);
        let mut inequalities = Vec::new();
        for r in &dual.rays {
            let v = project_out(&narrow(r)?, &equations)?;
            if v.iter().any(|&x| x != 0) {
                inequalities.push(v);
            }
        }
        inequalities.sort();
        inequalities.dedup();
        Self::from_h_description(lattice_rank, inequalities, equations)
    }

    /// `{x : a.x >= 0 for a in inequalities, e.x = 0 for e in equations}`.
    pub fn from_inequalities(lattice_rank: usize, inequalities: &[Vec<i64>], equations: &[Vec<i64>]) -> Result<Self> {
        for a in inequalities.iter().chain(equations) {
            if a.len() != lattice_rank {
                return Err(Error::DimensionMismatch {
                    expected: lattice_rank,
                    got: a.len(),
                });
            }
        }
        let mut cons: Vec<Vec<i64>> = inequalities.to_vec();
        for e in equations {
            cons.push(e.clone());
            cons.push(e.iter().map(|x| -x).collect());
        }
        let dd = double_description(lattice_rank, &cons);
        let mut gens = Vec::new();
        for r in dd.rays.iter().chain(&dd.lineality) {
            gens.push(narrow(r)?);
        }
        for l in &dd.lineality {
            gens.push(narrow(l)?.iter().map(|x| -x).collect());
        }
        Self::from_generators(lattice_rank, &gens)
    }

    /// Recomputes canonical rays and lineality from an irredundant
    /// inequality description.
    fn from_h_description(lattice_rank: usize, inequalities: Vec<Vec<i64>>, equations: Vec<Vec<i64>>) -> Result<Self> {
        let mut cons = inequalities.clone();
        for e in &equations {
            cons.push(e.clone());
            cons.push(e.iter().map(|x| -x).collect());
        }
        let dd = double_description(lattice_rank, &cons);
        let mut tight = inequalities.clone();
        tight.extend(equations.iter().cloned());
        let lineality = kernel_vectors(&tight, lattice_rank)?;
        let mut rays = Vec::new();
        for r in &dd.rays {
            let v = project_out(&narrow(r)?, &lineality)?;
            if v.iter().any(|&x| x != 0) {
                rays.push(v);
            }
        }
        rays.sort();
        rays.dedup();
        Ok(Self {
            lattice_rank,
            rays,
            lineality,
            inequalities,
            equations,
        })
    }

    pub fn lattice_rank(&self) -> usize {
        self.lattice_rank
    }

    /// Extreme rays modulo the lineality space (canonical representatives
    /// orthogonal to it, primitive, sorted).
    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn lineality(&self) -> &[Vec<i64>] {
        &self.lineality
    }

    /// Facet normals `a` with `a.x >= 0` on the cone.
    pub fn inequalities(&self) -> &[Vec<i64>] {
        &self.inequalities
    }

    /// Basis of the orthogonal complement of the linear span.
    pub fn equations(&self) -> &[Vec<i64>] {
        &self.equations
    }

    /// Rays followed by `+l, -l` for each lineality basis vector `l`.
    pub fn generators(&self) -> Vec<Vec<i64>> {
        let mut out = self.rays.clone();
        for l in &self.lineality {
            out.push(l.clone());
            out.push(l.iter().map(|x| -x).collect());
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.lattice_rank - self.equations.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equations.is_empty()
    }

    pub fn is_strictly_convex(&self) -> bool {
        self.lineality.is_empty()
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        v.len() == self.lattice_rank
            && self.equations.iter().all(|e| crate::lattice::dot(e, v) == 0)
            && self.inequalities.iter().all(|a| crate::lattice::dot(a, v) >= 0)
    }

    pub fn contains_rational(&self, v: &[BigRational]) -> bool {
        let eval = |a: &[i64]| {
            a.iter()
                .zip(v)
                .fold(BigRational::zero(), |acc, (x, y)| acc + y * BigRational::from_integer(BigInt::from(*x)))
        };
        v.len() == self.lattice_rank
            && self.equations.iter().all(|e| eval(e).is_zero())
            && self.inequalities.iter().all(|a| !eval(a).is_negative())
    }

    /// True iff `v` lies in the relative interior.
    pub fn in_relative_interior(&self, v: &[i64]) -> bool {
        self.contains(v) && self.inequalities.iter().all(|a| crate::lattice::dot(a, v) > 0)
    }

    /// `sigma^vee = {u : <u, v> >= 0 for all v in sigma}`.
    pub fn dual(&self) -> Result<Self> {
        let mut gens = self.inequalities.clone();
        for e in &self.equations {
            gens.push(e.clone());
            gens.push(e.iter().map(|x| -x).collect());
        }
        Self::from_generators(self.lattice_rank, &gens)
    }

    /// Indices of rays `r` with `a.r = 0`.
    fn tight_rays(&self, a: &[i64]) -> Vec<usize> {
        (0..self.rays.len())
            .filter(|&i| crate::lattice::dot(a, &self.rays[i]) == 0)
            .collect()
    }

    /// All faces, obtained by closing the facets under intersection.
    pub fn faces(&self) -> FaceLattice {
        let facets: Vec<Vec<usize>> = self.inequalities.iter().map(|a| self.tight_rays(a)).collect();
        let full: Vec<usize> = (0..self.rays.len()).collect();
        let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
        let mut stack = vec![full];
        while let Some(f) = stack.pop() {
            if !seen.insert(f.clone()) {
                continue;
            }
            for facet in &facets {
                let g: Vec<usize> = f.iter().copied().filter(|r| facet.contains(r)).collect();
                if !seen.contains(&g) {
                    stack.push(g);
                }
            }
        }
        let mut faces: Vec<Vec<usize>> = seen.into_iter().collect();
        faces.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        FaceLattice { faces }
    }

    /// The face spanned by the given rays and the lineality space.
    pub fn face(&self, ray_indices: &[usize]) -> Result<Self> {
        let mut gens: Vec<Vec<i64>> = ray_indices.iter().map(|&i| self.rays[i].clone()).collect();
        for l in &self.lineality {
            gens.push(l.clone());
            gens.push(l.iter().map(|x| -x).collect());
        }
        Self::from_generators(self.lattice_rank, &gens)
    }

    /// Dimension of the face spanned by the given rays.
    pub fn face_dim(&self, ray_indices: &[usize]) -> usize {
        let mut gens: Vec<Vec<i64>> = ray_indices.iter().map(|&i| self.rays[i].clone()).collect();
        gens.extend(self.lineality.iter().cloned());
        rank_i64(&gens, self.lattice_rank)
    }

    /// The sum of the face's rays: an integral point of its relative interior.
    pub fn relative_interior_point(&self, ray_indices: &[usize]) -> Vec<i64> {
        let mut p = vec![0i64; self.lattice_rank];
        for &i in ray_indices {
            for (x, y) in p.iter_mut().zip(&self.rays[i]) {
                *x += y;
            }
        }
        p
    }

    /// Smallest face containing `v` (as ray indices), or `None` if `v` is
    /// not in the cone.
    pub fn face_containing(&self, v: &[i64]) -> Option<Vec<usize>> {
        if !self.contains(v) {
            return None;
        }
        let mut face: Vec<usize> = (0..self.rays.len()).collect();
        for a in &self.inequalities {
            if crate::lattice::dot(a, v) == 0 {
                let t = self.tight_rays(a);
                face.retain(|r| t.contains(r));
            }
        }
        Some(face)
    }

    /// Inequalities vanishing on the whole face: together with the
    /// equations they cut out the face's linear span inside the cone.
    pub fn face_normals(&self, ray_indices: &[usize]) -> Vec<Vec<i64>> {
        self.inequalities
            .iter()
            .filter(|a| ray_indices.iter().all(|&i| crate::lattice::dot(a, &self.rays[i]) == 0))
            .cloned()
            .collect()
    }

    /// `true` iff `other` is one of this cone's faces.
    pub fn has_face(&self, other: &Cone) -> bool {
        if other.lattice_rank != self.lattice_rank || other.lineality != self.lineality {
            return false;
        }
        if !other.rays.iter().all(|r| self.rays.contains(r)) {
            return false;
        }
        let idx: Vec<usize> = other
            .rays
            .iter()
            .map(|r| self.rays.iter().position(|s| s == r).unwrap())
            .collect();
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        self.faces().faces.contains(&sorted)
    }
}
