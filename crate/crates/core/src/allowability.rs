//! Linear simplexes over a realized filtered complex: carrier polytopes,
//! preimage dimensions of strata in both notions (polyhedral and skeleton),
//! simplicial envelopes, allowability and intersection-chain membership.
//!
//! Every linear simplex is stored as its ordered tuple of image points; the
//! domain is always the standard simplex `Δ^ℓ ⊂ R^{ℓ+1}`, so barycentric
//! coordinates on the domain are ambient coordinates and the affine map is
//! `x ↦ Σ x_i y_i`. Two linear simplexes with equal image tuples are the
//! same singular simplex, which makes the tuple a sound generator key for
//! chains.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::extint::ExtInt;
use crate::filtered::{FilteredComplex, Perversity, Stratum, VertexId};
use crate::geometry::{
    triangulate_polytope, AffineForm, GeoSimplex, GeometryError, HForm, Point, Polytope, Rat,
};
use crate::linalg;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AllowError {
    #[error("vertex {0} has no coordinates")]
    MissingCoordinates(VertexId),
    #[error("cell {0:?} realizes degenerately")]
    DegenerateCell(Vec<VertexId>),
    #[error("image point {0} lies outside the realized complex")]
    ImageLeavesComplex(usize),
    #[error("geometry error: {0}")]
    Geometry(#[from] GeometryError),
}

/// A filtered complex together with exact rational vertex coordinates.
/// Each cell must realize as a nondegenerate geometric simplex; cells sharing
/// a face share its coordinates, which is all the locality the subdivision
/// and allowability machinery relies on.
#[derive(Clone, Debug)]
pub struct Realization {
    complex: FilteredComplex,
    strata: Vec<Stratum>,
    stratum_of_cell: Vec<usize>,
    coords: HashMap<VertexId, Point>,
    ambient: usize,
    cells: Vec<GeoSimplex>,
    cell_hulls: Vec<Vec<AffineForm>>,
    cell_barys: Vec<Vec<AffineForm>>,
}

impl Realization {
    pub fn new(
        complex: FilteredComplex,
        coords: HashMap<VertexId, Point>,
    ) -> Result<Self, AllowError> {
        let ambient = coords.values().next().map(|p| p.len()).unwrap_or(0);
        let mut cells = Vec::with_capacity(complex.simplexes().len());
        for s in complex.simplexes() {
            let pts: Result<Vec<Point>, AllowError> = s
                .0
                .iter()
                .map(|v| {
                    coords
                        .get(v)
                        .cloned()
                        .ok_or(AllowError::MissingCoordinates(*v))
                })
                .collect();
            let geo =
                GeoSimplex::new(pts?).map_err(|_| AllowError::DegenerateCell(s.0.clone()))?;
            cells.push(geo);
        }
        let strata = complex.compute_strata();
        let mut stratum_of_cell = vec![0usize; complex.simplexes().len()];
        for st in &strata {
            for &c in &st.simplexes {
                stratum_of_cell[c] = st.id;
            }
        }
        let cell_hulls = cells.iter().map(|g| g.hull_equalities()).collect();
        let cell_barys = cells.iter().map(|g| g.barycentric_forms()).collect();
        Ok(Realization {
            complex,
            strata,
            stratum_of_cell,
            coords,
            ambient,
            cells,
            cell_hulls,
            cell_barys,
        })
    }

    pub fn complex(&self) -> &FilteredComplex {
        &self.complex
    }

    pub fn strata(&self) -> &[Stratum] {
        &self.strata
    }

    pub fn stratum_of_cell(&self, cell: usize) -> &Stratum {
        &self.strata[self.stratum_of_cell[cell]]
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn coords(&self) -> &HashMap<VertexId, Point> {
        &self.coords
    }

    pub fn cell_geo(&self, cell: usize) -> &GeoSimplex {
        &self.cells[cell]
    }

    pub fn cell_hull_equalities(&self, cell: usize) -> &[AffineForm] {
        &self.cell_hulls[cell]
    }

    pub fn cell_barycentric_forms(&self, cell: usize) -> &[AffineForm] {
        &self.cell_barys[cell]
    }

    /// Geometric cone: the abstract cone with the apex lifted one unit above
    /// the centroid of the existing vertices.
    pub fn cone(&self) -> (Realization, VertexId) {
        let (cone, apex) = self.complex.cone();
        let pts: Vec<&Point> = self.coords.values().collect();
        let mut centre = vec![Rat::from_integer(0.into()); self.ambient];
        for p in &pts {
            centre = linalg::add(&centre, p);
        }
        let n = linalg::rat_i(pts.len() as i64);
        let mut apex_coord: Point = centre.into_iter().map(|x| x / n.clone()).collect();
        apex_coord.push(linalg::rat_i(1));
        let mut coords: HashMap<VertexId, Point> = HashMap::new();
        for (v, p) in &self.coords {
            let mut lifted = p.clone();
            lifted.push(linalg::rat_i(0));
            coords.insert(*v, lifted);
        }
        coords.insert(apex, apex_coord);
        (
            Realization::new(cone, coords).expect("cone lift is nondegenerate"),
            apex,
        )
    }
}

pub type GenId = u32;
pub type PointId = u32;

#[derive(Clone, Debug)]
struct GenData {
    tuple: Vec<PointId>,
    host: Option<usize>,
    /// Cell of an iterated subdivision of the complex's own triangulation:
    /// stratum preimages of such generators are coordinate faces of the
    /// domain, so carriers skip polytope enumeration entirely.
    is_subdivision_cell: bool,
}

/// One cached carrier piece: the domain polytope `σ⁻¹(c̄)` for a cell `c`,
/// plus whether the open cell is actually met. The pulled-back barycentric
/// forms of the cell are kept so face restrictions can re-run the open-part
/// test on sub-polytopes.
#[derive(Clone, Debug)]
pub struct CarrierPiece {
    pub cell: usize,
    pub poly: Polytope,
    pub meets_open: bool,
    pub cell_barys: Vec<AffineForm>,
}

#[derive(Clone, Debug, Default)]
pub struct Carrier {
    pub pieces: Vec<CarrierPiece>,
}

/// Simplicial envelope of `σ⁻¹S`: simplexes in the domain covering the
/// preimage, with matching maximal dimension.
#[derive(Clone, Debug)]
pub struct SimplicialEnvelope {
    pub stratum: usize,
    pub pieces: Vec<GeoSimplex>,
    pub max_dim: ExtInt,
}

/// Which notion of preimage dimension enters the allowability inequality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Notion {
    Poly,
    Gm,
}

impl Notion {
    pub fn tag(self) -> &'static str {
        match self {
            Notion::Poly => "poly",
            Notion::Gm => "gm",
        }
    }
}

/// Interning session for linear simplexes over one realization. Generator
/// ids are assigned in construction order, so identical build sequences give
/// identical ids.
pub struct Session {
    pub real: Realization,
    points: Vec<Point>,
    point_index: BTreeMap<Point, PointId>,
    gens: Vec<GenData>,
    gen_index: HashMap<Vec<PointId>, GenId>,
    carriers: HashMap<GenId, Carrier>,
    /// (poly dim, skeleton dim) per (generator, stratum id).
    dims: HashMap<(GenId, usize), (ExtInt, ExtInt)>,
}

/// A linear simplex handle; the session holds all of its data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinearSimplex(pub GenId);

impl Session {
    pub fn new(real: Realization) -> Self {
        Session {
            real,
            points: Vec::new(),
            point_index: BTreeMap::new(),
            gens: Vec::new(),
            gen_index: HashMap::new(),
            carriers: HashMap::new(),
            dims: HashMap::new(),
        }
    }

    pub fn intern_point(&mut self, p: Point) -> PointId {
        if let Some(&id) = self.point_index.get(&p) {
            return id;
        }
        let id = self.points.len() as PointId;
        self.points.push(p.clone());
        self.point_index.insert(p, id);
        id
    }

    pub fn point(&self, id: PointId) -> &Point {
        &self.points[id as usize]
    }

    pub fn intern_gen(&mut self, tuple: Vec<PointId>, host: Option<usize>) -> GenId {
        self.intern_gen_inner(tuple, host, false)
    }

    /// Intern a generator known to be a cell of an iterated subdivision of
    /// the triangulation (level-0 cells and pseudo-barycentric cells).
    pub fn intern_cell_gen(&mut self, tuple: Vec<PointId>, host: Option<usize>) -> GenId {
        self.intern_gen_inner(tuple, host, true)
    }

    fn intern_gen_inner(
        &mut self,
        tuple: Vec<PointId>,
        host: Option<usize>,
        is_cell: bool,
    ) -> GenId {
        if let Some(&id) = self.gen_index.get(&tuple) {
            let data = &mut self.gens[id as usize];
            if data.host.is_none() {
                data.host = host;
            }
            if is_cell && !data.is_subdivision_cell {
                data.is_subdivision_cell = true;
                self.carriers.remove(&id);
            }
            return id;
        }
        let id = self.gens.len() as GenId;
        self.gen_index.insert(tuple.clone(), id);
        self.gens.push(GenData {
            tuple,
            host,
            is_subdivision_cell: is_cell,
        });
        id
    }

    pub fn gen_dim(&self, g: GenId) -> usize {
        self.gens[g as usize].tuple.len() - 1
    }

    pub fn gen_tuple(&self, g: GenId) -> &[PointId] {
        &self.gens[g as usize].tuple
    }

    pub fn gen_host(&self, g: GenId) -> Option<usize> {
        self.gens[g as usize].host
    }

    pub fn gen_is_cell(&self, g: GenId) -> bool {
        self.gens[g as usize].is_subdivision_cell
    }

    pub fn gen_points(&self, g: GenId) -> Vec<Point> {
        self.gens[g as usize]
            .tuple
            .iter()
            .map(|&p| self.points[p as usize].clone())
            .collect()
    }

    pub fn gen_count(&self) -> usize {
        self.gens.len()
    }

    /// The image tuple spans a nondegenerate simplex.
    pub fn gen_is_embedding(&self, g: GenId) -> bool {
        let pts = self.gen_points(g);
        linalg::affine_rank(&pts) == Some(pts.len() - 1)
    }

    pub fn domain(&self, g: GenId) -> GeoSimplex {
        GeoSimplex::standard(self.gen_dim(g))
    }

    /// Face in position `i` (delete one tuple entry), interned.
    pub fn face(&mut self, g: GenId, i: usize) -> GenId {
        let data = &self.gens[g as usize];
        let mut t = data.tuple.clone();
        let host = data.host;
        t.remove(i);
        self.intern_gen(t, host)
    }

    pub fn faces(&mut self, g: GenId) -> Vec<GenId> {
        (0..=self.gen_dim(g)).map(|i| self.face(g, i)).collect()
    }

    /// Build a linear simplex from raw image points, validating that the
    /// image stays inside the realized complex (tuple points and face
    /// centroids must lie in some closed cell). A host is recorded when one
    /// closed cell carries the whole tuple; cross-cell simplexes scan every
    /// cell and therefore assume an embedded realization.
    pub fn linear_simplex(&mut self, image: Vec<Point>) -> Result<LinearSimplex, AllowError> {
        for (i, p) in image.iter().enumerate() {
            if !self.point_in_complex(p) {
                return Err(AllowError::ImageLeavesComplex(i));
            }
        }
        let centroid = crate::geometry::centroid(&image);
        if !self.point_in_complex(&centroid) {
            return Err(AllowError::ImageLeavesComplex(usize::MAX));
        }
        let host = (0..self.real.complex().simplexes().len())
            .filter(|&c| image.iter().all(|p| self.real.cell_geo(c).contains(p)))
            .min_by_key(|&c| self.real.complex().simplex(c).0.len());
        let tuple: Vec<PointId> = image.into_iter().map(|p| self.intern_point(p)).collect();
        Ok(LinearSimplex(self.intern_gen(tuple, host)))
    }

    fn point_in_complex(&self, p: &Point) -> bool {
        (0..self.real.complex().simplexes().len()).any(|c| self.real.cell_geo(c).contains(p))
    }

    /// Candidate cells whose closed realization can meet the image: the
    /// faces of the host when one is known, every cell otherwise.
    fn candidate_cells(&self, g: GenId) -> Vec<usize> {
        match self.gens[g as usize].host {
            Some(h) => {
                let host_simplex = self.real.complex().simplex(h).clone();
                (0..self.real.complex().simplexes().len())
                    .filter(|&c| self.real.complex().simplex(c).is_face_of(&host_simplex))
                    .collect()
            }
            None => (0..self.real.complex().simplexes().len()).collect(),
        }
    }

    fn compute_carrier(&self, g: GenId) -> Carrier {
        if self.gens[g as usize].is_subdivision_cell {
            return self.compute_cell_carrier(g);
        }
        self.compute_carrier_general(g)
    }

    fn compute_carrier_general(&self, g: GenId) -> Carrier {
        let dim = self.gen_dim(g);
        let pts = self.gen_points(g);
        let mut pieces = Vec::new();
        for c in self.candidate_cells(g) {
            let mut eqs: Vec<AffineForm> = vec![AffineForm {
                coeffs: vec![linalg::rat_i(1); dim + 1],
                constant: linalg::rat_i(-1),
            }];
            for hull_eq in self.real.cell_hull_equalities(c) {
                eqs.push(pullback(hull_eq, &pts));
            }
            let mut ineqs: Vec<AffineForm> = (0..=dim)
                .map(|i| {
                    let mut coeffs = vec![Rat::from_integer(0.into()); dim + 1];
                    coeffs[i] = linalg::rat_i(1);
                    AffineForm {
                        coeffs,
                        constant: linalg::rat_i(0),
                    }
                })
                .collect();
            let bary_pullbacks: Vec<AffineForm> = self
                .real
                .cell_barycentric_forms(c)
                .iter()
                .map(|f| pullback(f, &pts))
                .collect();
            ineqs.extend(bary_pullbacks.iter().cloned());
            let h = HForm {
                ambient: dim + 1,
                equalities: eqs,
                inequalities: ineqs,
            };
            let poly = Polytope::from_hform(h);
            if poly.is_empty() {
                continue;
            }
            // The open cell is met iff all cell barycentrics are strictly
            // positive at the piece centroid (a relative interior point).
            let centre = poly.centroid().unwrap();
            let meets_open = bary_pullbacks.iter().all(|f| f.eval(&centre).is_positive());
            pieces.push(CarrierPiece {
                cell: c,
                poly,
                meets_open,
                cell_barys: bary_pullbacks,
            });
        }
        Carrier { pieces }
    }

    /// Carrier of a subdivision cell: its intersection with each closed
    /// cell of the complex is the coordinate face spanned by the tuple
    /// entries lying in that cell, a consequence of the flag structure of
    /// iterated (pseudo-)barycentric subdivisions.
    fn compute_cell_carrier(&self, g: GenId) -> Carrier {
        let dim = self.gen_dim(g);
        let pts = self.gen_points(g);
        let mut pieces = Vec::new();
        for c in self.candidate_cells(g) {
            let hull_eqs = self.real.cell_hull_equalities(c);
            let barys = self.real.cell_barycentric_forms(c);
            let inside: Vec<usize> = (0..=dim)
                .filter(|&i| {
                    hull_eqs.iter().all(|f| f.eval(&pts[i]).is_zero())
                        && barys.iter().all(|f| !f.eval(&pts[i]).is_negative())
                })
                .collect();
            if inside.is_empty() {
                continue;
            }
            // the piece is the coordinate face on `inside`
            let mut verts = Vec::new();
            for &i in &inside {
                let mut v = vec![Rat::from_integer(0.into()); dim + 1];
                v[i] = linalg::rat_i(1);
                verts.push(v);
            }
            let mut eqs: Vec<AffineForm> = vec![AffineForm {
                coeffs: vec![linalg::rat_i(1); dim + 1],
                constant: linalg::rat_i(-1),
            }];
            let mut ineqs: Vec<AffineForm> = Vec::new();
            for i in 0..=dim {
                let mut coeffs = vec![Rat::from_integer(0.into()); dim + 1];
                coeffs[i] = linalg::rat_i(1);
                let form = AffineForm {
                    coeffs,
                    constant: linalg::rat_i(0),
                };
                if inside.contains(&i) {
                    ineqs.push(form);
                } else {
                    eqs.push(form);
                }
            }
            let cell_barys: Vec<AffineForm> = barys.iter().map(|f| pullback(f, &pts)).collect();
            ineqs.extend(cell_barys.iter().cloned());
            let hform = HForm {
                ambient: dim + 1,
                equalities: eqs,
                inequalities: ineqs,
            };
            // open part nonempty iff the face centroid maps into the open
            // cell
            let centre = crate::geometry::centroid(&verts);
            let meets_open = cell_barys.iter().all(|f| f.eval(&centre).is_positive());
            pieces.push(CarrierPiece {
                cell: c,
                poly: Polytope {
                    hform,
                    verts,
                },
                meets_open,
                cell_barys,
            });
        }
        Carrier { pieces }
    }

    pub fn carrier(&mut self, g: GenId) -> &Carrier {
        if !self.carriers.contains_key(&g) {
            let c = self.compute_carrier(g);
            self.carriers.insert(g, c);
        }
        &self.carriers[&g]
    }

    pub fn carrier_pieces(&mut self, g: GenId) -> Vec<CarrierPiece> {
        self.carrier(g);
        self.carriers[&g].pieces.clone()
    }

    /// Compute carriers for a batch of generators in parallel.
    pub fn ensure_carriers(&mut self, gens: &[GenId]) {
        let missing: Vec<GenId> = gens
            .iter()
            .copied()
            .filter(|g| !self.carriers.contains_key(g))
            .collect();
        let computed: Vec<(GenId, Carrier)> = missing
            .par_iter()
            .map(|&g| (g, self.compute_carrier(g)))
            .collect();
        for (g, c) in computed {
            self.carriers.insert(g, c);
        }
    }

    /// (polyhedral, skeleton) preimage dimensions of a stratum.
    fn stratum_dims(&mut self, g: GenId, stratum: usize) -> (ExtInt, ExtInt) {
        if let Some(&d) = self.dims.get(&(g, stratum)) {
            return d;
        }
        let members: Vec<usize> = self.real.strata()[stratum].simplexes.clone();
        self.carrier(g);
        let carrier = &self.carriers[&g];
        let mut poly_dim = ExtInt::NegInf;
        let mut skel_dim = ExtInt::NegInf;
        let dim = self.gens[g as usize].tuple.len() - 1;
        for piece in &carrier.pieces {
            if !piece.meets_open || !members.contains(&piece.cell) {
                continue;
            }
            poly_dim = poly_dim.max(piece.poly.dim());
            // minimal face of the domain containing the piece: union of
            // coordinate supports over its vertices
            let mut support = vec![false; dim + 1];
            for v in &piece.poly.verts {
                for (i, x) in v.iter().enumerate() {
                    if x.is_positive() {
                        support[i] = true;
                    }
                }
            }
            let k = support.iter().filter(|&&b| b).count() as i64 - 1;
            skel_dim = skel_dim.max(ExtInt::Fin(k));
        }
        self.dims.insert((g, stratum), (poly_dim, skel_dim));
        (poly_dim, skel_dim)
    }

    /// Polyhedral dimension of `σ⁻¹S`: max over the open cells of `S` met by
    /// the image of the dimension of the closed carrier piece.
    pub fn preimage_dim_polyhedral(&mut self, sigma: LinearSimplex, stratum: usize) -> ExtInt {
        self.stratum_dims(sigma.0, stratum).0
    }

    /// Skeleton dimension: the least `k` with `σ⁻¹S` inside the `k`-skeleton
    /// of the domain.
    pub fn preimage_dim_skeleton(&mut self, sigma: LinearSimplex, stratum: usize) -> ExtInt {
        self.stratum_dims(sigma.0, stratum).1
    }

    pub fn preimage_dim(
        &mut self,
        sigma: LinearSimplex,
        stratum: usize,
        notion: Notion,
    ) -> ExtInt {
        match notion {
            Notion::Poly => self.preimage_dim_polyhedral(sigma, stratum),
            Notion::Gm => self.preimage_dim_skeleton(sigma, stratum),
        }
    }

    /// Triangulated envelope of `σ⁻¹S`.
    pub fn build_envelope(&mut self, sigma: LinearSimplex, stratum: usize) -> SimplicialEnvelope {
        let g = sigma.0;
        let members: Vec<usize> = self.real.strata()[stratum].simplexes.clone();
        self.carrier(g);
        let carrier = self.carriers[&g].clone();
        let mut pieces = Vec::new();
        let mut max_dim = ExtInt::NegInf;
        for piece in &carrier.pieces {
            if !piece.meets_open || !members.contains(&piece.cell) {
                continue;
            }
            max_dim = max_dim.max(piece.poly.dim());
            let nverts = piece.poly.verts.len();
            let dim = match piece.poly.dim() {
                ExtInt::Fin(d) => d as usize,
                _ => continue,
            };
            if nverts == dim + 1 {
                pieces.push(GeoSimplex::new(piece.poly.verts.clone()).expect("piece simplex"));
            } else {
                pieces.extend(triangulate_polytope(&piece.poly.hform));
            }
        }
        SimplicialEnvelope {
            stratum,
            pieces,
            max_dim,
        }
    }

    /// Envelope pieces over all strata: the `𝒯_σ` family fed to the strong
    /// general position constraint of the subdivision sampler.
    pub fn envelope_pieces_all(&mut self, sigma: LinearSimplex) -> Vec<GeoSimplex> {
        let strata: Vec<usize> = self.real.strata().iter().map(|s| s.id).collect();
        let mut out = Vec::new();
        for s in strata {
            out.extend(self.build_envelope(sigma, s).pieces);
        }
        out
    }

    /// Closed sub-full-dimensional carrier pieces over the given strata; the
    /// sampler keeps pseudo-barycentres off them so point restrictions at
    /// pseudo-barycentres stay allowable wherever avoidance is possible.
    pub fn forbidden_pieces(&mut self, sigma: LinearSimplex, strata: &[usize]) -> Vec<Polytope> {
        let g = sigma.0;
        let l = self.gen_dim(g) as i64;
        self.carrier(g);
        let carrier = &self.carriers[&g];
        let mut out = Vec::new();
        for piece in &carrier.pieces {
            let st = self.real.stratum_of_cell(piece.cell).id;
            if !strata.contains(&st) || !piece.meets_open {
                continue;
            }
            if piece.poly.dim() < ExtInt::Fin(l) {
                out.push(piece.poly.clone());
            }
        }
        out
    }

    /// Allowability: `dim σ⁻¹S ≤ dim Δ − 2 − Dp̄(S)` for every singular
    /// stratum; regular strata never constrain.
    pub fn is_allowable(
        &mut self,
        sigma: LinearSimplex,
        perversity: &Perversity,
        notion: Notion,
    ) -> bool {
        let l = self.gen_dim(sigma.0) as i64;
        let strata: Vec<Stratum> = self.real.strata().to_vec();
        let dual = perversity.dual(&strata);
        for s in &strata {
            if s.regular {
                continue;
            }
            let bound = ExtInt::Fin(l - 2).sub(dual.value(s));
            if self.preimage_dim(sigma, s.id, notion) > bound {
                return false;
            }
        }
        true
    }
}

fn pullback(form: &AffineForm, image: &[Point]) -> AffineForm {
    // (a·y + c) composed with x ↦ Σ x_i y_i on the hyperplane Σ x_i = 1
    let coeffs: Vec<Rat> = image
        .iter()
        .map(|y| linalg::dot(&form.coeffs, y) + form.constant.clone())
        .collect();
    AffineForm {
        coeffs,
        constant: linalg::rat_i(0),
    }
}

/// Integer chain of linear simplexes of one degree; zero coefficients are
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Chain {
    pub degree: usize,
    pub terms: BTreeMap<GenId, i64>,
}

impl Chain {
    pub fn zero(degree: usize) -> Self {
        Chain {
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn generator(degree: usize, g: GenId) -> Self {
        let mut c = Chain::zero(degree);
        c.add_term(g, 1);
        c
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, g: GenId, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let entry = self.terms.entry(g).or_insert(0);
        *entry = entry.checked_add(coeff).expect("chain coefficient overflow");
        if *entry == 0 {
            self.terms.remove(&g);
        }
    }

    pub fn add_scaled(&mut self, other: &Chain, scale: i64) {
        assert_eq!(self.degree, other.degree);
        for (&g, &c) in &other.terms {
            self.add_term(g, c.checked_mul(scale).expect("chain coefficient overflow"));
        }
    }

    /// Simplicial boundary with alternating signs and cancellation.
    pub fn boundary(&self, session: &mut Session) -> Chain {
        if self.degree == 0 {
            return Chain::zero(0);
        }
        let mut out = Chain::zero(self.degree - 1);
        for (&g, &coeff) in &self.terms {
            for (i, f) in session.faces(g).into_iter().enumerate() {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                out.add_term(f, coeff * sign);
            }
        }
        out
    }

    /// Cone with a prepended point: each generator tuple gains `apex` in
    /// front, keeping coefficients. `∂(u∗ξ) = ξ − u∗∂ξ` in degrees ≥ 1.
    pub fn cone(&self, session: &mut Session, apex: PointId) -> Chain {
        let mut out = Chain::zero(self.degree + 1);
        for (&g, &coeff) in &self.terms {
            let host = session.gen_host(g);
            let mut tuple = vec![apex];
            tuple.extend_from_slice(session.gen_tuple(g));
            let coned = session.intern_gen(tuple, host);
            out.add_term(coned, coeff);
        }
        out
    }
}

/// Is every simplex of `ξ` and of `∂ξ` (after cancellation) allowable?
pub fn is_intersection_chain(
    session: &mut Session,
    xi: &Chain,
    perversity: &Perversity,
    notion: Notion,
) -> bool {
    for &g in xi.terms.keys() {
        if !session.is_allowable(LinearSimplex(g), perversity, notion) {
            return false;
        }
    }
    let boundary = xi.boundary(session);
    for &g in boundary.terms.keys() {
        if !session.is_allowable(LinearSimplex(g), perversity, notion) {
            return false;
        }
    }
    true
}
