//! Bundled desk-scale instances: realized filtered complexes spanning
//! codimensions 1–3, torsion, pinch points and suspensions. Topological
//! instances that need no cross-cell test geometry sit on the moment curve
//! (every small vertex subset is affinely independent); the crafted planar
//! instances are embedded so cross-cell linear simplexes can be built on
//! them.

use std::collections::HashMap;

use crate::allowability::Realization;
use crate::filtered::{FilteredComplex, Simplex, VertexId};
use crate::geometry::{point_from_i64, Point};
use crate::linalg::rat_i;

fn sx(v: &[u32]) -> Simplex {
    Simplex::new(v.to_vec())
}

fn moment_coords(ids: &[VertexId]) -> HashMap<VertexId, Point> {
    ids.iter()
        .map(|&v| {
            let t = v as i64 + 1;
            (v, point_from_i64(&[t, t * t, t * t * t, t * t * t * t]))
        })
        .collect()
}

/// Full 2-simplex, unfiltered: the trivial manifold case.
pub fn full_simplex2() -> Realization {
    let complex = FilteredComplex::build(&[sx(&[0, 1, 2])], &|_| Some(2), 2).unwrap();
    let mut coords = HashMap::new();
    coords.insert(0, point_from_i64(&[0, 0]));
    coords.insert(1, point_from_i64(&[1, 0]));
    coords.insert(2, point_from_i64(&[0, 1]));
    Realization::new(complex, coords).unwrap()
}

/// Triangle boundary: a circle.
pub fn circle() -> Realization {
    let complex =
        FilteredComplex::build(&[sx(&[0, 1]), sx(&[1, 2]), sx(&[0, 2])], &|_| Some(1), 1).unwrap();
    let mut coords = HashMap::new();
    coords.insert(0, point_from_i64(&[0, 0]));
    coords.insert(1, point_from_i64(&[2, 0]));
    coords.insert(2, point_from_i64(&[0, 2]));
    Realization::new(complex, coords).unwrap()
}

/// Two disjoint circles.
pub fn two_circles() -> Realization {
    let edges = [
        sx(&[0, 1]),
        sx(&[1, 2]),
        sx(&[0, 2]),
        sx(&[3, 4]),
        sx(&[4, 5]),
        sx(&[3, 5]),
    ];
    let complex = FilteredComplex::build(&edges, &|_| Some(1), 1).unwrap();
    let mut coords = HashMap::new();
    coords.insert(0, point_from_i64(&[0, 0]));
    coords.insert(1, point_from_i64(&[2, 0]));
    coords.insert(2, point_from_i64(&[0, 2]));
    coords.insert(3, point_from_i64(&[10, 0]));
    coords.insert(4, point_from_i64(&[12, 0]));
    coords.insert(5, point_from_i64(&[10, 2]));
    Realization::new(complex, coords).unwrap()
}

/// Six-vertex projective plane (torsion Z/2 in degree 1).
pub fn rp2() -> Realization {
    // antipodal icosahedron quotient: 10 triangles on the complete graph K6
    let tris = [
        sx(&[0, 1, 2]),
        sx(&[0, 1, 4]),
        sx(&[0, 2, 3]),
        sx(&[0, 3, 5]),
        sx(&[0, 4, 5]),
        sx(&[1, 2, 5]),
        sx(&[1, 3, 4]),
        sx(&[1, 3, 5]),
        sx(&[2, 3, 4]),
        sx(&[2, 4, 5]),
    ];
    let complex = FilteredComplex::build(&tris, &|_| Some(2), 2).unwrap();
    Realization::new(complex, moment_coords(&[0, 1, 2, 3, 4, 5])).unwrap()
}

/// Pinched torus: a triangulated cylinder with both rims coned to a single
/// apex. The apex (vertex 0) is the singular point, filtration 0.
pub fn pinched_torus() -> Realization {
    let mut tris = vec![];
    // cylinder walls between rims {1,2,3} and {4,5,6}
    let bottom = [1u32, 2, 3];
    let top = [4u32, 5, 6];
    for i in 0..3 {
        let j = (i + 1) % 3;
        tris.push(sx(&[bottom[i], bottom[j], top[j]]));
        tris.push(sx(&[bottom[i], top[j], top[i]]));
    }
    // cones from the apex over both rims
    for i in 0..3 {
        let j = (i + 1) % 3;
        tris.push(sx(&[0, bottom[i], bottom[j]]));
        tris.push(sx(&[0, top[i], top[j]]));
    }
    let complex =
        FilteredComplex::build(&tris, &|s| Some(if s.0 == vec![0] { 0 } else { 2 }), 2).unwrap();
    Realization::new(complex, moment_coords(&[0, 1, 2, 3, 4, 5, 6])).unwrap()
}

/// Suspension of two circles: two apexes (0 and 1, filtration 0) joined to
/// two disjoint triangle boundaries.
pub fn suspension_two_circles() -> Realization {
    let mut cells = vec![];
    for ring in [[2u32, 3, 4], [5u32, 6, 7]] {
        for i in 0..3 {
            let j = (i + 1) % 3;
            cells.push(sx(&[0, ring[i], ring[j]]));
            cells.push(sx(&[1, ring[i], ring[j]]));
        }
    }
    let complex = FilteredComplex::build(
        &cells,
        &|s| Some(if s.0 == vec![0] || s.0 == vec![1] { 0 } else { 2 }),
        2,
    )
    .unwrap();
    Realization::new(complex, moment_coords(&[0, 1, 2, 3, 4, 5, 6, 7])).unwrap()
}

/// Seven-vertex torus (the cyclic triangulation on K7).
pub fn torus7() -> Realization {
    let mut tris = vec![];
    for i in 0u32..7 {
        tris.push(sx(&[i, (i + 1) % 7, (i + 3) % 7]));
        tris.push(sx(&[i, (i + 2) % 7, (i + 3) % 7]));
    }
    let complex = FilteredComplex::build(&tris, &|_| Some(2), 2).unwrap();
    Realization::new(complex, moment_coords(&[0, 1, 2, 3, 4, 5, 6])).unwrap()
}

/// Cone over the seven-vertex torus: the three-dimensional instance with a
/// codimension-3 singular apex.
pub fn cone_over_torus7() -> Realization {
    torus7().cone().0
}

/// Embedded planar disk with the singular point at the barycentre of the
/// outer triangle: the motivating divergence instance.
pub fn pinched_disk() -> Realization {
    let complex = FilteredComplex::build(
        &[sx(&[0, 1, 3]), sx(&[1, 2, 3]), sx(&[0, 2, 3])],
        &|s| Some(if s.0 == vec![3] { 0 } else { 2 }),
        2,
    )
    .unwrap();
    let mut coords = HashMap::new();
    coords.insert(0, point_from_i64(&[0, 0]));
    coords.insert(1, point_from_i64(&[3, 0]));
    coords.insert(2, point_from_i64(&[0, 3]));
    coords.insert(3, point_from_i64(&[1, 1]));
    Realization::new(complex, coords).unwrap()
}

/// Embedded square with a singular diagonal edge (codimension 1).
pub fn singular_edge_square() -> Realization {
    let complex = FilteredComplex::build(
        &[sx(&[0, 1, 2]), sx(&[1, 2, 3])],
        &|s| {
            Some(match s.0.as_slice() {
                [1] | [2] | [1, 2] => 1,
                _ => 2,
            })
        },
        2,
    )
    .unwrap();
    let mut coords = HashMap::new();
    coords.insert(0, point_from_i64(&[0, 0]));
    coords.insert(1, point_from_i64(&[4, 0]));
    coords.insert(2, point_from_i64(&[0, 4]));
    coords.insert(3, point_from_i64(&[4, 4]));
    Realization::new(complex, coords).unwrap()
}

/// Staircase triangulation of `X × [0,1]` with the product filtration, plus
/// the two vertex sections. Top copies of vertex `v` get id `v + offset`.
pub fn interval_product(real: &Realization) -> (Realization, u32) {
    let complex = real.complex();
    let offset = complex.vertices().iter().max().unwrap() + 1;
    let mut cells = vec![];
    let mut filtration: HashMap<Simplex, i64> = HashMap::new();
    for (i, s) in complex.simplexes().iter().enumerate() {
        let value = complex.filtration_value(i) + 1;
        let k = s.0.len();
        for j in 0..k {
            // staircase cell [b_0..b_j, t_j..t_{k-1}]
            let mut verts: Vec<u32> = s.0[..=j].to_vec();
            verts.extend(s.0[j..].iter().map(|v| v + offset));
            let cell = Simplex::new(verts);
            filtration.insert(cell.clone(), value);
            cells.push(cell);
        }
    }
    let product = FilteredComplex::build(
        &cells,
        &|s: &Simplex| {
            filtration.get(s).copied().or_else(|| {
                // faces of staircase cells: project to the base cell
                let base: Vec<u32> = s
                    .0
                    .iter()
                    .map(|&v| if v >= offset { v - offset } else { v })
                    .collect();
                let base = Simplex::new(base);
                real.complex()
                    .simplex_index(&base)
                    .map(|i| real.complex().filtration_value(i) + 1)
            })
        },
        complex.formal_dim() + 1,
    )
    .unwrap();
    let mut coords = HashMap::new();
    for (v, p) in real.coords() {
        let mut bottom = p.clone();
        bottom.push(rat_i(0));
        coords.insert(*v, bottom);
        let mut top = p.clone();
        top.push(rat_i(1));
        coords.insert(v + offset, top);
    }
    (Realization::new(product, coords).unwrap(), offset)
}

/// All bundled instances by name, in deterministic order.
pub fn all_instances() -> Vec<(&'static str, Realization)> {
    vec![
        ("simplex2", full_simplex2()),
        ("circle", circle()),
        ("two_circles", two_circles()),
        ("rp2", rp2()),
        ("pinched_torus", pinched_torus()),
        ("suspension_two_circles", suspension_two_circles()),
        ("torus7", torus7()),
        ("cone_torus7", cone_over_torus7()),
        ("pinched_disk", pinched_disk()),
        ("singular_edge_square", singular_edge_square()),
    ]
}

pub fn by_name(name: &str) -> Option<Realization> {
    all_instances()
        .into_iter()
        .find(|(n, _)| *n == name)
        .map(|(_, r)| r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instances_build_and_stratify() {
        for (name, real) in all_instances() {
            let strata = real.strata();
            assert!(!strata.is_empty(), "{name}");
            let total: usize = strata.iter().map(|s| s.simplexes.len()).sum();
            assert_eq!(total, real.complex().simplexes().len(), "{name}");
        }
    }

    #[test]
    fn pinched_torus_counts() {
        let real = pinched_torus();
        let c = real.complex();
        let tris = c.simplexes().iter().filter(|s| s.dim() == 2).count();
        let edges = c.simplexes().iter().filter(|s| s.dim() == 1).count();
        let verts = c.simplexes().iter().filter(|s| s.dim() == 0).count();
        assert_eq!((verts, edges, tris), (7, 18, 12));
        // Euler characteristic of the pinched torus is 1
        assert_eq!(verts as i64 - edges as i64 + tris as i64, 1);
    }

    #[test]
    fn torus7_is_a_closed_surface() {
        let real = torus7();
        let c = real.complex();
        let tris: Vec<_> = c.simplexes().iter().filter(|s| s.dim() == 2).collect();
        assert_eq!(tris.len(), 14);
        for e in c.simplexes().iter().filter(|s| s.dim() == 1) {
            let cofaces = tris.iter().filter(|t| e.is_face_of(t)).count();
            assert_eq!(cofaces, 2, "edge {:?}", e.0);
        }
    }

    #[test]
    fn interval_product_shapes() {
        let (prod, offset) = interval_product(&circle());
        assert_eq!(offset, 3);
        assert_eq!(prod.complex().formal_dim(), 2);
        // strata correspond one to one with the base strata
        assert_eq!(prod.strata().len(), circle().strata().len());
        // each base edge contributes two staircase triangles
        let tris = prod
            .complex()
            .simplexes()
            .iter()
            .filter(|s| s.dim() == 2)
            .count();
        assert_eq!(tris, 6);
    }
}
