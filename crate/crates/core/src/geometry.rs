//! Exact rational geometric kernel.
//!
//! Points, geometric simplexes, H/V-form polytopes with brute-force vertex
//! enumeration (desk scale, ambient dimension ≤ 8), affine dimensions,
//! general position and strong general position predicates, cones, and the
//! rejection sampler for pseudo-barycentres.
//!
//! Three recurring exact tricks, used instead of linear programming:
//!
//! * the dimension of a polytope is the affine rank of its vertex set;
//! * a family of nonnegative affine functionals on a polytope `P` has a
//!   common strictly-positive point iff each functional is positive at the
//!   centroid of `P`'s vertices (convexity makes the centroid a relative
//!   interior point);
//! * a convex subset of the boundary of a simplex lies inside a single facet,
//!   so `P ⊆ ∂Δ` reduces to one vanishing barycentric functional.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::extint::ExtInt;
use crate::linalg::{self, affine_rank, dist2, dot, Mat};

pub use crate::linalg::Rat;

pub type Point = Vec<Rat>;

pub const MAX_AMBIENT_DIM: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("simplex vertices are affinely dependent")]
    DegenerateSimplex,
    #[error("ambient dimensions disagree: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("ambient dimension {0} exceeds the desk-scale limit {MAX_AMBIENT_DIM}")]
    AmbientTooLarge(usize),
    #[error("pseudo-barycentre sampling exhausted after {attempts} attempts")]
    SamplingExhausted { attempts: u32 },
}

/// Affine functional `x ↦ coeffs·x + constant`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineForm {
    pub coeffs: Vec<Rat>,
    pub constant: Rat,
}

impl AffineForm {
    pub fn eval(&self, p: &[Rat]) -> Rat {
        dot(&self.coeffs, p) + self.constant.clone()
    }
}

/// Conjunction of affine equalities (`form = 0`) and inequalities
/// (`form ≥ 0`) in a common ambient space.
#[derive(Clone, Debug, Default)]
pub struct HForm {
    pub ambient: usize,
    pub equalities: Vec<AffineForm>,
    pub inequalities: Vec<AffineForm>,
}

impl HForm {
    pub fn satisfied_by(&self, p: &[Rat]) -> bool {
        self.equalities.iter().all(|f| f.eval(p).is_zero())
            && self.inequalities.iter().all(|f| !f.eval(p).is_negative())
    }

    pub fn merge(mut self, other: &HForm) -> HForm {
        assert_eq!(self.ambient, other.ambient);
        self.equalities.extend(other.equalities.iter().cloned());
        self.inequalities.extend(other.inequalities.iter().cloned());
        self
    }
}

/// Geometric simplex: ordered, affinely independent rational vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeoSimplex {
    verts: Vec<Point>,
}

impl GeoSimplex {
    pub fn new(verts: Vec<Point>) -> Result<Self, GeometryError> {
        if verts.is_empty() {
            return Err(GeometryError::DegenerateSimplex);
        }
        let ambient = verts[0].len();
        if ambient > MAX_AMBIENT_DIM {
            return Err(GeometryError::AmbientTooLarge(ambient));
        }
        for v in &verts {
            if v.len() != ambient {
                return Err(GeometryError::AmbientMismatch(ambient, v.len()));
            }
        }
        if affine_rank(&verts) != Some(verts.len() - 1) {
            return Err(GeometryError::DegenerateSimplex);
        }
        Ok(GeoSimplex { verts })
    }

    /// The standard simplex `Δ^k = conv(e_0, …, e_k) ⊂ R^{k+1}`; barycentric
    /// coordinates are literally the ambient coordinates here.
    pub fn standard(k: usize) -> Self {
        let mut verts = Vec::with_capacity(k + 1);
        for i in 0..=k {
            let mut v = vec![Rat::zero(); k + 1];
            v[i] = Rat::one();
            verts.push(v);
        }
        GeoSimplex { verts }
    }

    pub fn verts(&self) -> &[Point] {
        &self.verts
    }

    pub fn ambient(&self) -> usize {
        self.verts[0].len()
    }

    pub fn dim(&self) -> usize {
        self.verts.len() - 1
    }

    pub fn barycentre(&self) -> Point {
        centroid(&self.verts)
    }

    /// Maximum squared distance between two vertices.
    pub fn diam2(&self) -> Rat {
        let mut best = Rat::zero();
        for i in 0..self.verts.len() {
            for j in i + 1..self.verts.len() {
                let d = dist2(&self.verts[i], &self.verts[j]);
                if d > best {
                    best = d;
                }
            }
        }
        best
    }

    /// Face spanned by the given vertex positions (must be nonempty).
    pub fn face(&self, positions: &[usize]) -> GeoSimplex {
        assert!(!positions.is_empty());
        GeoSimplex {
            verts: positions.iter().map(|&i| self.verts[i].clone()).collect(),
        }
    }

    /// Cone `c_u(self)`: `u` prepended to the vertex list.
    pub fn cone(&self, u: &Point) -> Result<GeoSimplex, GeometryError> {
        let mut verts = Vec::with_capacity(self.verts.len() + 1);
        verts.push(u.clone());
        verts.extend(self.verts.iter().cloned());
        GeoSimplex::new(verts)
    }

    /// Equalities cutting out the affine hull.
    pub fn hull_equalities(&self) -> Vec<AffineForm> {
        let ambient = self.ambient();
        // Normal vectors: nullspace of the span of difference vectors.
        let diffs: Vec<Vec<Rat>> = self.verts[1..]
            .iter()
            .map(|v| linalg::sub(v, &self.verts[0]))
            .collect();
        let normals = if diffs.is_empty() {
            // A point: every coordinate direction is normal.
            (0..ambient)
                .map(|i| {
                    let mut n = vec![Rat::zero(); ambient];
                    n[i] = Rat::one();
                    n
                })
                .collect::<Vec<_>>()
        } else {
            Mat::from_rows(diffs).nullspace()
        };
        normals
            .into_iter()
            .map(|n| {
                let c = -dot(&n, &self.verts[0]);
                AffineForm {
                    coeffs: n,
                    constant: c,
                }
            })
            .collect()
    }

    /// Affine functionals extending the barycentric coordinates off the hull
    /// (any extension; exact on the hull, which is where they are used).
    pub fn barycentric_forms(&self) -> Vec<AffineForm> {
        let ambient = self.ambient();
        let n = self.verts.len();
        // Solve rows (v_j, 1) · (a, c) = δ_ij for each i.
        let mut sys = Mat::zero(n, ambient + 1);
        for (j, v) in self.verts.iter().enumerate() {
            for c in 0..ambient {
                *sys.at_mut(j, c) = v[c].clone();
            }
            *sys.at_mut(j, ambient) = Rat::one();
        }
        (0..n)
            .map(|i| {
                let mut rhs = vec![Rat::zero(); n];
                rhs[i] = Rat::one();
                let sol = sys.solve(&rhs).expect("independent vertices");
                AffineForm {
                    coeffs: sol[..ambient].to_vec(),
                    constant: sol[ambient].clone(),
                }
            })
            .collect()
    }

    /// Barycentric coordinates of a point of the affine hull.
    pub fn barycentric_coords(&self, p: &[Rat]) -> Option<Vec<Rat>> {
        for eq in self.hull_equalities() {
            if !eq.eval(p).is_zero() {
                return None;
            }
        }
        Some(
            self.barycentric_forms()
                .iter()
                .map(|f| f.eval(p))
                .collect(),
        )
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        match self.barycentric_coords(p) {
            Some(b) => b.iter().all(|x| !x.is_negative()),
            None => false,
        }
    }

    pub fn relint_contains(&self, p: &[Rat]) -> bool {
        match self.barycentric_coords(p) {
            Some(b) => b.iter().all(|x| x.is_positive()),
            None => false,
        }
    }

    pub fn to_hform(&self) -> HForm {
        HForm {
            ambient: self.ambient(),
            equalities: self.hull_equalities(),
            inequalities: self.barycentric_forms(),
        }
    }

    pub fn to_polytope(&self) -> Polytope {
        Polytope::from_points(self.verts.clone())
    }
}

pub fn centroid(points: &[Point]) -> Point {
    assert!(!points.is_empty());
    let n = linalg::rat_i(points.len() as i64);
    let mut acc = vec![Rat::zero(); points[0].len()];
    for p in points {
        acc = linalg::add(&acc, p);
    }
    acc.into_iter().map(|x| x / n.clone()).collect()
}

/// Convex polytope carrying both descriptions. Construction from an H-form
/// runs exact vertex enumeration immediately; every polytope here is bounded
/// (always cut out inside some simplex).
#[derive(Clone, Debug)]
pub struct Polytope {
    pub hform: HForm,
    pub verts: Vec<Point>,
}

impl Polytope {
    pub fn from_hform(h: HForm) -> Polytope {
        let verts = vertex_enumeration(&h);
        Polytope { hform: h, verts }
    }

    pub fn from_points(points: Vec<Point>) -> Polytope {
        assert!(!points.is_empty());
        // H-form of a V-polytope is only needed for membership tests on the
        // polytopes we build from simplexes; keep hull equalities so `dim`
        // and containment of hull points stay exact.
        let h = HForm {
            ambient: points[0].len(),
            equalities: Vec::new(),
            inequalities: Vec::new(),
        };
        Polytope { hform: h, verts: points }
    }

    pub fn is_empty(&self) -> bool {
        self.verts.is_empty()
    }

    pub fn dim(&self) -> ExtInt {
        match affine_rank(&self.verts) {
            None => ExtInt::NegInf,
            Some(r) => ExtInt::Fin(r as i64),
        }
    }

    pub fn contains(&self, p: &[Rat]) -> bool {
        if !self.hform.equalities.is_empty() || !self.hform.inequalities.is_empty() {
            return self.hform.satisfied_by(p);
        }
        if self.verts.is_empty() {
            return false;
        }
        // V-only polytope: Carathéodory scan over affine bases (desk scale).
        convex_membership(&self.verts, p).unwrap_or(false)
    }

    pub fn centroid(&self) -> Option<Point> {
        if self.verts.is_empty() {
            None
        } else {
            Some(centroid(&self.verts))
        }
    }
}

/// Exact convex-hull membership by Carathéodory search over affinely
/// independent vertex subsets. Returns `None` when the scan is inconclusive
/// (cannot happen for spanning subsets; kept for clarity).
fn convex_membership(verts: &[Point], p: &[Rat]) -> Option<bool> {
    let rank = affine_rank(verts)?;
    let idx: Vec<usize> = (0..verts.len()).collect();
    for subset in subsets_of_size(&idx, rank + 1) {
        let pts: Vec<Point> = subset.iter().map(|&i| verts[i].clone()).collect();
        if affine_rank(&pts) != Some(rank) {
            continue;
        }
        let sim = GeoSimplex { verts: pts };
        if sim.contains(p) {
            return Some(true);
        }
    }
    Some(false)
}

fn subsets_of_size(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let n = items.len();
    if k > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All vertices of the bounded polyhedron described by `h`, exactly.
///
/// The equalities are eliminated first (parametrize the solution space),
/// then every subset of inequalities of size equal to the residual dimension
/// is solved and feasibility-checked.
pub fn vertex_enumeration(h: &HForm) -> Vec<Point> {
    let ambient = h.ambient;
    assert!(
        ambient <= MAX_AMBIENT_DIM + 1,
        "vertex enumeration beyond desk scale"
    );
    // Parametrize {x : equalities} as x0 + N y.
    let (x0, basis) = match affine_solution_space(ambient, &h.equalities) {
        Some(v) => v,
        None => return Vec::new(),
    };
    let f = basis.len();
    if f == 0 {
        return if h
            .inequalities
            .iter()
            .all(|form| !form.eval(&x0).is_negative())
        {
            vec![x0]
        } else {
            Vec::new()
        };
    }
    // Rewrite inequalities in y-space: a·(x0 + Ny) + c ≥ 0.
    let ineqs_y: Vec<AffineForm> = h
        .inequalities
        .iter()
        .map(|form| {
            let coeffs = basis
                .iter()
                .map(|b| dot(&form.coeffs, b))
                .collect::<Vec<_>>();
            AffineForm {
                coeffs,
                constant: form.eval(&x0),
            }
        })
        .collect();
    let idx: Vec<usize> = (0..ineqs_y.len()).collect();
    let mut seen: BTreeSet<Vec<String>> = BTreeSet::new();
    let mut verts = Vec::new();
    for subset in subsets_of_size(&idx, f) {
        let rows: Vec<Vec<Rat>> = subset.iter().map(|&i| ineqs_y[i].coeffs.clone()).collect();
        let rhs: Vec<Rat> = subset
            .iter()
            .map(|&i| -ineqs_y[i].constant.clone())
            .collect();
        let m = Mat::from_rows(rows);
        if m.rank() != f {
            continue;
        }
        if let Some(y) = m.solve(&rhs) {
            if ineqs_y.iter().all(|form| !form.eval(&y).is_negative()) {
                let mut x = x0.clone();
                for (b, yi) in basis.iter().zip(y.iter()) {
                    x = linalg::add(&x, &linalg::scale(b, yi));
                }
                let key: Vec<String> = x.iter().map(|r| r.to_string()).collect();
                if seen.insert(key) {
                    verts.push(x);
                }
            }
        }
    }
    verts
}

/// Solve an affine equality system: a particular solution plus a basis of the
/// homogeneous solution space. `None` if inconsistent.
fn affine_solution_space(
    ambient: usize,
    equalities: &[AffineForm],
) -> Option<(Point, Vec<Vec<Rat>>)> {
    if equalities.is_empty() {
        let basis = (0..ambient)
            .map(|i| {
                let mut v = vec![Rat::zero(); ambient];
                v[i] = Rat::one();
                v
            })
            .collect();
        return Some((vec![Rat::zero(); ambient], basis));
    }
    let rows: Vec<Vec<Rat>> = equalities.iter().map(|f| f.coeffs.clone()).collect();
    let rhs: Vec<Rat> = equalities.iter().map(|f| -f.constant.clone()).collect();
    let m = Mat::from_rows(rows);
    let x0 = m.solve(&rhs)?;
    Some((x0, m.nullspace()))
}

/// Dimension convention: `dim ∅ = −∞`, otherwise the affine rank.
pub fn affine_dim(points: &[Point]) -> ExtInt {
    match affine_rank(points) {
        None => ExtInt::NegInf,
        Some(r) => ExtInt::Fin(r as i64),
    }
}

/// Exact intersection `P ∩ Q` of two simplexes as an H-polytope
/// (both affine hulls plus both families of facet inequalities).
pub fn simplex_intersection(p: &GeoSimplex, q: &GeoSimplex) -> Polytope {
    assert_eq!(p.ambient(), q.ambient(), "ambient mismatch");
    let h = p.to_hform().merge(&q.to_hform());
    Polytope::from_hform(h)
}

/// Do the relative interiors of `t` and `c` meet?
///
/// Decided on the closed intersection polytope: its vertex centroid is a
/// relative interior point, and each barycentric functional of `t` and `c`
/// is nonnegative there, so joint strict positivity at the centroid is
/// equivalent to strict feasibility.
pub fn interiors_meet(t: &GeoSimplex, c: &GeoSimplex) -> bool {
    let inter = simplex_intersection(t, c);
    let centre = match inter.centroid() {
        Some(x) => x,
        None => return false,
    };
    t.barycentric_forms()
        .iter()
        .chain(c.barycentric_forms().iter())
        .all(|f| f.eval(&centre).is_positive())
}

/// General position of `{p, q}` inside `delta`:
/// `dim(p ∩ q) ≤ dim p + dim q − dim delta`.
pub fn general_position(p: &GeoSimplex, q: &GeoSimplex, delta: &GeoSimplex) -> bool {
    let inter_dim = simplex_intersection(p, q).dim();
    inter_dim
        <= ExtInt::Fin(p.dim() as i64 + q.dim() as i64 - delta.dim() as i64)
}

/// Is the polytope contained in `∂delta`? A convex subset of the boundary
/// lies inside a single facet, so it suffices to find one barycentric
/// functional of `delta` vanishing on every vertex.
pub fn polytope_in_boundary(p: &Polytope, delta: &GeoSimplex) -> bool {
    if p.is_empty() {
        return true;
    }
    delta
        .barycentric_forms()
        .iter()
        .any(|f| p.verts.iter().all(|v| f.eval(v).is_zero()))
}

/// Is the simplex `t` contained in `∂delta`?
pub fn simplex_in_boundary(t: &GeoSimplex, delta: &GeoSimplex) -> bool {
    delta
        .barycentric_forms()
        .iter()
        .any(|f| t.verts().iter().all(|v| f.eval(v).is_zero()))
}

/// Strong general position `𝒫(u, T, V)` of `{T, c_u V}` inside `delta`:
/// either `T ∩ c_uV ⊆ ∂delta`, or the relative interiors meet and
/// `dim(T ∩ c_uV) = dim T + dim V + 1 − dim delta`.
///
/// `V = None` encodes the empty simplex with `c_u∅ = {u}` and `dim V = −1`.
/// Preconditions: `u ∈ int delta`, `T ⊆ delta`, `V ⊆ ∂delta`.
pub fn strong_general_position(
    u: &Point,
    t: &GeoSimplex,
    v: Option<&GeoSimplex>,
    delta: &GeoSimplex,
) -> bool {
    debug_assert!(delta.relint_contains(u), "apex must be interior");
    // T inside the boundary makes the first branch automatic.
    if simplex_in_boundary(t, delta) {
        return true;
    }
    // T equal to delta always satisfies the dimension branch.
    if t.dim() == delta.dim() {
        let vset: BTreeSet<&Point> = t.verts().iter().collect();
        let dset: BTreeSet<&Point> = delta.verts().iter().collect();
        if vset == dset {
            return true;
        }
    }
    let cone = match v {
        Some(vs) => vs.cone(u).expect("apex off the hull of a boundary simplex"),
        None => GeoSimplex {
            verts: vec![u.clone()],
        },
    };
    let inter = simplex_intersection(t, &cone);
    if inter.is_empty() {
        return true;
    }
    if polytope_in_boundary(&inter, delta) {
        return true;
    }
    // Second branch: interiors must meet with the exact excess dimension.
    let centre = inter.centroid().expect("nonempty");
    let open = t
        .barycentric_forms()
        .iter()
        .chain(cone.barycentric_forms().iter())
        .all(|f| f.eval(&centre).is_positive());
    if !open {
        return false;
    }
    let dim_v = v.map(|s| s.dim() as i64).unwrap_or(-1);
    inter.dim() == ExtInt::Fin(t.dim() as i64 + dim_v + 1 - delta.dim() as i64)
}

/// Rational lower bound for `sqrt(q)`, `q ≥ 0`.
pub fn ratsqrt_lower(q: &Rat) -> Rat {
    assert!(!q.is_negative());
    let scale = BigInt::one() << 32;
    let scaled: BigInt = (q.numer() * &scale * &scale) / q.denom();
    let root = scaled.sqrt();
    Rat::new(root, scale)
}

/// A chosen pseudo-barycentre with its sampling provenance.
#[derive(Clone, Debug)]
pub struct PseudoBarycentreChoice {
    pub point: Point,
    pub parent: GeoSimplex,
    pub seed: u64,
    pub attempts: u32,
}

pub const DEFAULT_MAX_ATTEMPTS: u32 = 10_000;

/// Squared radius of the pseudo-barycentre ball for a simplex of dimension
/// `l`: `(l / ((l+1)(2l+1)))² · diam²` — the barycentric subdivision bound
/// scaled by the simplex's diameter.
pub fn pb_ball_radius2(l: usize, diam2: &Rat) -> Rat {
    let l = l as i64;
    let num = l * l;
    let den = (l + 1) * (l + 1) * (2 * l + 1) * (2 * l + 1);
    linalg::rat(num, den) * diam2.clone()
}

/// Rejection-sample a pseudo-barycentre of `delta`:
///
/// * inside the open ball of radius `l/((l+1)(2l+1))·diam` around the
///   barycentre (exact squared-norm comparison),
/// * in strong general position `𝒫(u, T, B)` against every envelope simplex
///   `T` and boundary face `B`,
/// * outside every forbidden polytope.
///
/// Candidates are drawn from dyadic barycentric grids whose denominator
/// doubles every 1000 failed attempts; the predicate's good set is open and
/// dense, so refinement terminates with probability 1.
pub fn sample_pseudobarycentre(
    delta: &GeoSimplex,
    boundary_faces: &[GeoSimplex],
    envelopes: &[GeoSimplex],
    forbidden: &[Polytope],
    seed: u64,
    max_attempts: u32,
) -> Result<PseudoBarycentreChoice, GeometryError> {
    let l = delta.dim();
    assert!(l >= 1, "sampling needs dim ≥ 1");
    let b = delta.barycentre();
    let diam2 = delta.diam2();
    let r2 = pb_ball_radius2(l, &diam2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Envelope pieces that can never fail the predicate: T inside the
    // boundary (first branch automatic) and T equal to delta itself.
    let delta_set: BTreeSet<&Point> = delta.verts().iter().collect();
    let active: Vec<&GeoSimplex> = envelopes
        .iter()
        .filter(|t| {
            if simplex_in_boundary(t, delta) {
                return false;
            }
            let tset: BTreeSet<&Point> = t.verts().iter().collect();
            tset != delta_set
        })
        .collect();

    let mut attempts = 0u32;
    while attempts < max_attempts {
        attempts += 1;
        let k = 8 + (attempts / 1000) as u32;
        let denom = BigInt::one() << k;
        // Random direction inside the hull: sum of c_i (v_i − b), sum c = 0.
        let raw: Vec<BigInt> = (0..=l)
            .map(|_| BigInt::from(rng.gen_range(0..(1i64 << k.min(30)))))
            .collect();
        let mean = raw.iter().sum::<BigInt>();
        let npts = BigInt::from((l + 1) as i64);
        let mut w = vec![Rat::zero(); delta.ambient()];
        for (i, m) in raw.iter().enumerate() {
            let c = Rat::new(m * &npts - &mean, &npts * &denom);
            w = linalg::add(&w, &linalg::scale(&linalg::sub(&delta.verts[i], &b), &c));
        }
        let w2 = linalg::norm2(&w);
        if w2.is_zero() {
            continue;
        }
        // Spread samples across the ball: u = b + s·t·w with t²·‖w‖² ≤ r²/4.
        let t = ratsqrt_lower(&(r2.clone() / (linalg::rat_i(4) * w2)));
        let s = Rat::new(
            BigInt::from(rng.gen_range(1..(1i64 << k.min(30)))),
            denom.clone(),
        );
        let factor = t * s;
        let u = linalg::add(&b, &linalg::scale(&w, &factor));

        if !delta.relint_contains(&u) {
            continue;
        }
        if dist2(&u, &b) >= r2 {
            continue;
        }
        if forbidden.iter().any(|f| f.contains(&u)) {
            continue;
        }
        let ok = active.iter().all(|t_piece| {
            boundary_faces
                .iter()
                .all(|bf| strong_general_position(&u, t_piece, Some(bf), delta))
        });
        if !ok {
            continue;
        }
        return Ok(PseudoBarycentreChoice {
            point: u,
            parent: delta.clone(),
            seed,
            attempts,
        });
    }
    Err(GeometryError::SamplingExhausted { attempts })
}

/// Triangulate a polytope given in H-form, every output simplex contained in
/// the polytope and their union covering it. Placing-style recursion: cone
/// from the lexicographically smallest vertex over the triangulated facets
/// that miss it.
pub fn triangulate_polytope(h: &HForm) -> Vec<GeoSimplex> {
    let mut memo: HashMap<Vec<Vec<String>>, Vec<Vec<Point>>> = HashMap::new();
    let verts = vertex_enumeration(h);
    if verts.is_empty() {
        return Vec::new();
    }
    let cells = triangulate_rec(h, &verts, &mut memo);
    cells
        .into_iter()
        .map(|vs| GeoSimplex::new(vs).expect("triangulation produced a degenerate cell"))
        .collect()
}

fn vert_key(verts: &[Point]) -> Vec<Vec<String>> {
    let mut key: Vec<Vec<String>> = verts
        .iter()
        .map(|p| p.iter().map(|r| r.to_string()).collect())
        .collect();
    key.sort();
    key
}

fn triangulate_rec(
    h: &HForm,
    verts: &[Point],
    memo: &mut HashMap<Vec<Vec<String>>, Vec<Vec<Point>>>,
) -> Vec<Vec<Point>> {
    let key = vert_key(verts);
    if let Some(cached) = memo.get(&key) {
        return cached.clone();
    }
    let dim = affine_rank(verts).expect("nonempty");
    let result = if verts.len() == dim + 1 {
        vec![verts.to_vec()]
    } else {
        let v0 = verts
            .iter()
            .min_by(|a, b| cmp_points(a, b))
            .unwrap()
            .clone();
        let mut cells = Vec::new();
        let mut seen_facets: BTreeSet<Vec<Vec<String>>> = BTreeSet::new();
        for (i, ineq) in h.inequalities.iter().enumerate() {
            // Facet candidate: vertices tight at this inequality.
            let tight: Vec<Point> = verts
                .iter()
                .filter(|v| ineq.eval(v).is_zero())
                .cloned()
                .collect();
            if tight.is_empty() || affine_rank(&tight) != Some(dim - 1) {
                continue;
            }
            if ineq.eval(&v0).is_zero() {
                continue; // v0 on the facet; cone would be degenerate
            }
            let fkey = vert_key(&tight);
            if !seen_facets.insert(fkey) {
                continue;
            }
            let mut hf = h.clone();
            let form = hf.inequalities.remove(i);
            hf.equalities.push(form);
            for cell in triangulate_rec(&hf, &tight, memo) {
                let mut coned = vec![v0.clone()];
                coned.extend(cell);
                cells.push(coned);
            }
        }
        cells
    };
    memo.insert(key, result.clone());
    result
}

fn cmp_points(a: &Point, b: &Point) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Extreme points of the convex hull of a finite point set: those not in
/// the hull of the others.
pub fn extreme_points(points: &[Point]) -> Vec<Point> {
    let mut dedup: Vec<Point> = Vec::new();
    for p in points {
        if !dedup.contains(p) {
            dedup.push(p.clone());
        }
    }
    dedup
        .iter()
        .filter(|p| {
            let others: Vec<Point> = dedup.iter().filter(|q| q != p).cloned().collect();
            others.is_empty() || !convex_membership(&others, p).unwrap_or(false)
        })
        .cloned()
        .collect()
}

pub fn point_from_i64(coords: &[i64]) -> Point {
    coords.iter().map(|&c| linalg::rat_i(c)).collect()
}

pub fn point_from_pairs(coords: &[(i64, i64)]) -> Point {
    coords.iter().map(|&(n, d)| linalg::rat(n, d)).collect()
}
