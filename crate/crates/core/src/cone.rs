//! The polyhedral side of the degree-4 polymatroidal region: its 28 facets,
//! its 41 extreme rays, enumeration of all 2-dimensional faces, and their
//! classification into orbit types under relabeling of the four indices.

use std::collections::BTreeMap;
use std::fmt;

use once_cell::sync::Lazy;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::linalg::integer_matrix_rank;
use crate::setfn::{
    elemental_inequalities, elements, named_rank, subset_key, Elemental, RankVector, RayType,
    Subset, RAY_TYPES,
};

/// Identifier of an extreme ray: its type plus the index subset picking the
/// labeled representative (0 for the three index-free types).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RayId {
    pub ty: RayType,
    pub alpha: Subset,
}

impl RayId {
    pub fn new(ty: RayType, alpha: Subset) -> Result<Self> {
        named_rank(ty, alpha)?;
        Ok(RayId { ty, alpha })
    }

    pub fn rank(&self) -> RankVector {
        named_rank(self.ty, self.alpha).expect("validated at construction")
    }

    /// Image under a permutation of the ground set (1-based `perm[i-1] = σ(i)`).
    pub fn permuted(&self, perm: &[usize]) -> RayId {
        let mut alpha = 0u32;
        for e in elements(self.alpha) {
            alpha |= 1 << (perm[e - 1] - 1);
        }
        RayId { ty: self.ty, alpha }
    }

    fn order_key(&self) -> (usize, Vec<usize>) {
        let idx = RAY_TYPES.iter().position(|t| t == &self.ty).unwrap();
        (idx, elements(self.alpha))
    }

    /// Name in the form used by the CLI, e.g. `U2_3:123` or `U2_4`.
    pub fn label(&self) -> String {
        if self.alpha == 0 {
            self.ty.as_str().to_string()
        } else {
            format!("{}:{}", self.ty.as_str(), subset_key(self.alpha))
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (ty, alpha) = match s.split_once(':') {
            Some((t, a)) => (RayType::parse(t)?, crate::setfn::subset_from_key(a, 4)?),
            None => (RayType::parse(s)?, 0),
        };
        RayId::new(ty, alpha)
    }
}

impl PartialOrd for RayId {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for RayId {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order_key().cmp(&other.order_key())
    }
}

impl fmt::Display for RayId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// An extreme ray with its minimal integer polymatroid.
#[derive(Clone, Debug)]
pub struct Ray {
    pub id: RayId,
    pub rank: RankVector,
}

/// The facet descriptors of the degree-4 region in canonical order.
pub fn facets() -> &'static [Elemental] {
    static FACETS: Lazy<Vec<Elemental>> = Lazy::new(|| elemental_inequalities(4).unwrap());
    &FACETS
}

fn alpha_choices(arity: usize) -> Vec<Subset> {
    let mut v: Vec<Subset> = (0u32..16)
        .filter(|m| m.count_ones() as usize == arity)
        .collect();
    v.sort_by_key(|m| elements(*m));
    v
}

/// All 41 extreme rays in canonical id order.
pub fn all_rays() -> Vec<Ray> {
    let mut out = Vec::new();
    for ty in RAY_TYPES {
        for alpha in alpha_choices(ty.alpha_arity()) {
            let id = RayId { ty, alpha };
            out.push(Ray {
                id,
                rank: id.rank(),
            });
        }
    }
    out
}

/// Bitmask over `facets()` of the inequalities holding with equality at `rank`.
pub fn tight_facets(rank: &RankVector) -> u32 {
    let mut mask = 0u32;
    for (i, f) in facets().iter().enumerate() {
        if f.eval(rank) == 0 {
            mask |= 1 << i;
        }
    }
    mask
}

/// True iff the ray is extreme: the solution space of its tight facets is a line.
pub fn is_extreme(rank: &RankVector) -> bool {
    let tight = tight_facets(rank);
    let normals: Vec<Vec<i64>> = facets()
        .iter()
        .enumerate()
        .filter(|(i, _)| tight >> i & 1 == 1)
        .map(|(_, f)| f.normal(4))
        .collect();
    integer_matrix_rank(&normals) == 14
}

/// A 2-dimensional face, recorded as its two extreme rays and the facets
/// tight on both.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Face2D {
    pub rays: (RayId, RayId),
    pub tight_facets: u32,
}

/// Enumerate all 2-dimensional faces.
///
/// A pair of rays spans a 2-face exactly when the rays tight on every facet
/// common to both are those two alone (the face lattice is atomic over the
/// extreme rays), cross-checked by the pair being linearly independent.
pub fn enumerate_2faces() -> Vec<Face2D> {
    let rays = all_rays();
    let tight: Vec<u32> = rays.iter().map(|r| tight_facets(&r.rank)).collect();
    let pairs: Vec<(usize, usize)> = (0..rays.len())
        .flat_map(|i| (i + 1..rays.len()).map(move |j| (i, j)))
        .collect();
    let mut faces: Vec<Face2D> = pairs
        .into_par_iter()
        .filter_map(|(i, j)| {
            let common = tight[i] & tight[j];
            let members = (0..rays.len())
                .filter(|&k| tight[k] & common == common)
                .count();
            if members != 2 {
                return None;
            }
            let span = integer_matrix_rank(&[
                rays[i].rank.table_row(),
                rays[j].rank.table_row(),
            ]);
            debug_assert_eq!(span, 2);
            (span == 2).then(|| Face2D {
                rays: (rays[i].id, rays[j].id),
                tight_facets: common,
            })
        })
        .collect();
    faces.sort_by(|a, b| a.rays.cmp(&b.rays));
    faces
}

/// Canonical form of a face as an unordered ray pair.
fn sorted_pair(a: RayId, b: RayId) -> (RayId, RayId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// All 24 permutations of {1,2,3,4}.
pub fn s4() -> Vec<[usize; 4]> {
    let mut out = Vec::with_capacity(24);
    let mut items = [1usize, 2, 3, 4];
    permute_into(&mut items, 0, &mut out);
    out.sort();
    out
}

fn permute_into(items: &mut [usize; 4], k: usize, out: &mut Vec<[usize; 4]>) {
    if k == 4 {
        out.push(*items);
        return;
    }
    for i in k..4 {
        items.swap(k, i);
        permute_into(items, k + 1, out);
        items.swap(k, i);
    }
}

/// Lexicographically least member of the orbit of an unordered ray pair.
pub fn canonical_pair(a: RayId, b: RayId) -> (RayId, RayId) {
    s4().iter()
        .map(|perm| sorted_pair(a.permuted(perm), b.permuted(perm)))
        .min()
        .unwrap()
}

/// An orbit of 2-faces under simultaneous relabeling of the four indices.
#[derive(Clone, Debug, Serialize)]
pub struct OrbitType {
    /// Lexicographically least member.
    pub representative: (RayId, RayId),
    /// All faces of this type, canonically ordered.
    pub members: Vec<(RayId, RayId)>,
}

impl OrbitType {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Partition faces into orbit types. Output is sorted by representative.
pub fn orbit_types(faces: &[Face2D]) -> Vec<OrbitType> {
    let mut orbits: BTreeMap<(RayId, RayId), Vec<(RayId, RayId)>> = BTreeMap::new();
    for f in faces {
        let rep = canonical_pair(f.rays.0, f.rays.1);
        orbits.entry(rep).or_default().push(sorted_pair(f.rays.0, f.rays.1));
    }
    orbits
        .into_iter()
        .map(|(representative, mut members)| {
            members.sort();
            members.dedup();
            OrbitType {
                representative,
                members,
            }
        })
        .collect()
}

/// Find a relabeling carrying the ordered pair `(from.0, from.1)` onto
/// `(to.0, to.1)`, if one exists.
pub fn relabeling_onto(from: (RayId, RayId), to: (RayId, RayId)) -> Option<[usize; 4]> {
    s4().into_iter()
        .find(|perm| from.0.permuted(perm) == to.0 && from.1.permuted(perm) == to.1)
}

/// Sanity error for callers that need a ray by label.
pub fn ray_by_id(id: RayId) -> Result<Ray> {
    all_rays()
        .into_iter()
        .find(|r| r.id == id)
        .ok_or_else(|| domain(format!("{id} is not an extreme ray")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ray_inventory() {
        let rays = all_rays();
        assert_eq!(rays.len(), 41);
        let by_type = |ty: RayType| rays.iter().filter(|r| r.id.ty == ty).count();
        assert_eq!(by_type(RayType::U12), 6);
        assert_eq!(by_type(RayType::UHat25), 4);
        assert_eq!(by_type(RayType::V8), 6);
        for r in &rays {
            let (ok, _) = r.rank.is_polymatroid();
            assert!(ok, "{}", r.id);
            assert_eq!(r.rank.coordinate_gcd(), 1, "{}", r.id);
            assert!(is_extreme(&r.rank), "{} is not extreme", r.id);
        }
    }

    #[test]
    fn u14_tight_facets_by_direct_evaluation() {
        // All-ones rank: every monotonicity facet tight; a submodularity facet
        // is tight exactly when K is nonempty (1+1−1−1) and slack when K = ∅.
        let u14 = named_rank(RayType::U14, 0).unwrap();
        let tight = tight_facets(&u14);
        for (i, f) in facets().iter().enumerate() {
            let expect = match f {
                Elemental::Mono { .. } => true,
                Elemental::Submod { k, .. } => *k != 0,
            };
            assert_eq!(tight >> i & 1 == 1, expect, "{f}");
        }
        assert_eq!(tight.count_ones(), 22);
    }

    #[test]
    fn origin_is_tight_everywhere() {
        let zero = RankVector::from_table_row(4, &[0i64; 15]).unwrap();
        assert_eq!(tight_facets(&zero), (1 << 28) - 1);
    }

    #[test]
    fn face_pair_examples() {
        let faces = enumerate_2faces();
        let u24 = RayId::parse("U2_4").unwrap();
        let u34 = RayId::parse("U3_4").unwrap();
        assert!(!faces
            .iter()
            .any(|f| f.rays == sorted_pair(u24, u34) || f.rays == (u34, u24)));
        // Every face's common tight set pins exactly the two member rays, and
        // no third ray sits in the intersection.
        let rays = all_rays();
        for f in &faces {
            let members: Vec<&Ray> = rays
                .iter()
                .filter(|r| tight_facets(&r.rank) & f.tight_facets == f.tight_facets)
                .collect();
            assert_eq!(members.len(), 2);
        }
    }

    #[test]
    fn relabeling_invariance_of_face_set() {
        let faces = enumerate_2faces();
        let perm = [2usize, 4, 1, 3];
        let mut mapped: Vec<(RayId, RayId)> = faces
            .iter()
            .map(|f| sorted_pair(f.rays.0.permuted(&perm), f.rays.1.permuted(&perm)))
            .collect();
        mapped.sort();
        let mut original: Vec<(RayId, RayId)> = faces.iter().map(|f| f.rays).collect();
        original.sort();
        assert_eq!(mapped, original);
    }

    #[test]
    fn orbit_examples() {
        let faces = enumerate_2faces();
        let orbits = orbit_types(&faces);
        assert_eq!(orbits.len(), 59);
        let find = |a: &str, b: &str| {
            let rep = canonical_pair(RayId::parse(a).unwrap(), RayId::parse(b).unwrap());
            orbits
                .iter()
                .find(|o| o.representative == rep)
                .map(OrbitType::size)
        };
        assert_eq!(find("U1_1:1", "U1_1:2"), Some(6));
        assert_eq!(find("U1_2:12", "U1_2:34"), Some(3));
        assert_eq!(find("U2_4", "U1_2:12"), Some(6));
        assert_eq!(find("Uhat2_5:1", "U2_4"), Some(4));
    }
}
