//! Pseudo-barycentric subdivision: per-simplex triangulation systems whose
//! new vertices are points near the barycentres chosen in strong general
//! position against the simplicial envelopes, the induced chain map `sd`,
//! prism triangulations of `Δ × [0,1]`, the chain homotopy `T` with
//! `id − sd = T∂ + ∂T`, and the critical/bad face analysis of top cells.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use thiserror::Error;

use crate::allowability::{Chain, GenId, LinearSimplex, PointId, Session};
use crate::extint::ExtInt;
use crate::filtered::Perversity;
use crate::geometry::{
    sample_pseudobarycentre, GeoSimplex, GeometryError, Point, Polytope, Rat,
    DEFAULT_MAX_ATTEMPTS,
};
use crate::linalg::{self, dist2, rat};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubdivisionError {
    #[error("sampling failed: {0}")]
    Sampling(#[from] GeometryError),
    #[error("pseudo-barycentric invariant {0} violated")]
    InvariantViolation(&'static str),
    #[error("critical face set has no minimum element")]
    NotMinimal,
}

/// Which carrier pieces the sampler must avoid, beyond the ball and the
/// strong general position constraints. Only sub-full-dimensional pieces
/// are ever avoidable.
#[derive(Clone, Debug, Default)]
pub enum SamplerPolicy {
    /// Avoid sub-full-dimensional pieces of every singular stratum; makes
    /// one system usable for every perversity at once.
    #[default]
    AvoidAllSingular,
    /// Avoid pieces only of strata with `Dp̄(S) ≥ −1`, and only when the
    /// simplex is `p̄`-allowable: the refined existence statement.
    ForPerversity(Perversity),
    /// Ball and strong general position only.
    NoAvoidance,
}

/// One cell of a domain triangulation, apex-first order. The generator is
/// the restriction of the parent simplex to the cell.
#[derive(Clone, Debug)]
pub struct DomainCell {
    pub verts: Vec<Point>,
    pub gen: GenId,
}

/// Pseudo-barycentric subdivision data for one generator.
#[derive(Clone, Debug)]
pub struct System {
    /// `u_σ` in the standard domain.
    pub apex_domain: Point,
    /// `σ(u_σ)` interned in the session's point table.
    pub apex_image: PointId,
    /// All cells of the triangulation `ℬ_σ` (boundary cells, apex, cones).
    pub cells: Vec<DomainCell>,
    /// Indices of the cells coming from the boundary systems.
    pub boundary_cells: Vec<usize>,
    /// Indices of top-dimensional cells.
    pub top_cells: Vec<usize>,
    pub attempts: u32,
}

/// Triangulation of `Δ × [0,1]` compatible with a system.
#[derive(Clone, Debug)]
pub struct PrismTriangulation {
    /// Face-closed list of cells in `R^{ℓ+2}` (barycentric + height).
    pub cells: Vec<Vec<Point>>,
    pub top_cells: Vec<usize>,
}

/// Outcome of the bad-face analysis for one top cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadFaceReport {
    pub cell_gen: GenId,
    /// Positions (into the cell's tuple) of the bad face, when one exists.
    pub bad_face: Option<Vec<usize>>,
    /// Witnessing stratum and the common value `dim B − Dp̄(S) − 2`.
    pub witness: Option<(usize, i64)>,
}

/// Builds and memoizes pseudo-barycentric systems per generator, plus the
/// derived chain operators. Construction is deterministic given the seed:
/// each generator's sampler seed is derived from the canonical text of its
/// image tuple.
pub struct Subdivider {
    pub session: Session,
    pub seed: u64,
    pub policy: SamplerPolicy,
    pub max_attempts: u32,
    systems: HashMap<GenId, System>,
    sd_memo: HashMap<GenId, Chain>,
    t_memo: HashMap<GenId, Chain>,
}

impl Subdivider {
    pub fn new(session: Session, seed: u64) -> Self {
        Subdivider {
            session,
            seed,
            policy: SamplerPolicy::default(),
            max_attempts: DEFAULT_MAX_ATTEMPTS,
            systems: HashMap::new(),
            sd_memo: HashMap::new(),
            t_memo: HashMap::new(),
        }
    }

    pub fn with_policy(mut self, policy: SamplerPolicy) -> Self {
        self.policy = policy;
        self
    }

    fn gen_seed(&self, g: GenId) -> u64 {
        let mut h = self.seed ^ 0x9e37_79b9_7f4a_7c15;
        for p in self.session.gen_points(g) {
            for r in p {
                for b in r.to_string().bytes() {
                    h = h
                        .wrapping_mul(0x100_0000_01b3)
                        .wrapping_add(b as u64)
                        .rotate_left(7);
                }
            }
            h = h.wrapping_mul(0x9e37_79b9_7f4a_7c15);
        }
        h
    }

    fn image_of_domain_point(&self, g: GenId, x: &Point) -> Point {
        let pts = self.session.gen_points(g);
        let mut out = vec![Rat::zero(); pts[0].len()];
        for (xi, y) in x.iter().zip(pts.iter()) {
            out = linalg::add(&out, &linalg::scale(y, xi));
        }
        out
    }

    /// Forbidden polytopes according to the sampler policy.
    fn forbidden_for(&mut self, sigma: LinearSimplex) -> Vec<Polytope> {
        match self.policy.clone() {
            SamplerPolicy::NoAvoidance => Vec::new(),
            SamplerPolicy::AvoidAllSingular => {
                let strata: Vec<usize> = self
                    .session
                    .real
                    .strata()
                    .iter()
                    .filter(|s| !s.regular)
                    .map(|s| s.id)
                    .collect();
                self.session.forbidden_pieces(sigma, &strata)
            }
            SamplerPolicy::ForPerversity(p) => {
                let strata_all = self.session.real.strata().to_vec();
                let dual = p.dual(&strata_all);
                let strata: Vec<usize> = strata_all
                    .iter()
                    .filter(|s| !s.regular && dual.value(s) >= ExtInt::Fin(-1))
                    .map(|s| s.id)
                    .collect();
                if self
                    .session
                    .is_allowable(sigma, &p, crate::allowability::Notion::Poly)
                {
                    self.session.forbidden_pieces(sigma, &strata)
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Build (memoized) the system for a generator, faces first.
    pub fn ensure_system(&mut self, g: GenId) -> Result<(), SubdivisionError> {
        if self.systems.contains_key(&g) {
            return Ok(());
        }
        let l = self.session.gen_dim(g);
        if l == 0 {
            let apex_domain = vec![Rat::from_integer(1.into())];
            let image = self.session.gen_points(g).pop().unwrap();
            let apex_image = self.session.intern_point(image);
            let cells = vec![DomainCell {
                verts: vec![apex_domain.clone()],
                gen: g,
            }];
            self.systems.insert(
                g,
                System {
                    apex_domain,
                    apex_image,
                    cells,
                    boundary_cells: vec![],
                    top_cells: vec![0],
                    attempts: 0,
                },
            );
            return Ok(());
        }
        for f in self.session.faces(g) {
            self.ensure_system(f)?;
        }
        let boundary = self.boundary_cells_of(g);
        let delta = GeoSimplex::standard(l);
        let envelopes = self.session.envelope_pieces_all(LinearSimplex(g));
        let forbidden = self.forbidden_for(LinearSimplex(g));
        let boundary_geo: Vec<GeoSimplex> = boundary
            .iter()
            .map(|c| GeoSimplex::new(c.0.clone()).expect("boundary cell"))
            .collect();
        let choice = sample_pseudobarycentre(
            &delta,
            &boundary_geo,
            &envelopes,
            &forbidden,
            self.gen_seed(g),
            self.max_attempts,
        )?;
        let u = choice.point;
        let apex_image_pt = self.image_of_domain_point(g, &u);
        let apex_image = self.session.intern_point(apex_image_pt);
        let host = self.session.gen_host(g);

        let mut cells: Vec<DomainCell> = Vec::new();
        let mut boundary_idx = Vec::new();
        let mut top_idx = Vec::new();
        for (verts, gen) in &boundary {
            debug_assert_eq!(*gen, self.restriction_gen(g, verts, host));
            boundary_idx.push(cells.len());
            cells.push(DomainCell {
                verts: verts.clone(),
                gen: *gen,
            });
        }
        // apex vertex cell
        let apex_gen = if self.session.gen_is_cell(g) {
            self.session.intern_cell_gen(vec![apex_image], host)
        } else {
            self.session.intern_gen(vec![apex_image], host)
        };
        cells.push(DomainCell {
            verts: vec![u.clone()],
            gen: apex_gen,
        });
        // cones over every boundary cell
        for (verts, _) in &boundary {
            let mut coned = vec![u.clone()];
            coned.extend(verts.iter().cloned());
            let cell_gen = self.restriction_gen(g, &coned, host);
            if coned.len() == l + 1 {
                top_idx.push(cells.len());
            }
            cells.push(DomainCell {
                verts: coned,
                gen: cell_gen,
            });
        }
        let system = System {
            apex_domain: u,
            apex_image,
            cells,
            boundary_cells: boundary_idx,
            top_cells: top_idx,
            attempts: choice.attempts,
        };
        self.validate_system(g, &system)?;
        self.systems.insert(g, system);
        Ok(())
    }

    fn restriction_gen(&mut self, g: GenId, domain_verts: &[Point], host: Option<usize>) -> GenId {
        let tuple: Vec<PointId> = domain_verts
            .iter()
            .map(|x| {
                let img = self.image_of_domain_point(g, x);
                self.session.intern_point(img)
            })
            .collect();
        if self.session.gen_is_cell(g) {
            self.session.intern_cell_gen(tuple, host)
        } else {
            self.session.intern_gen(tuple, host)
        }
    }

    /// Cells of `ℬ_{∂σ}`: pushforwards of the facet systems through the
    /// coordinate inclusions, deduplicated on shared faces. Restriction
    /// generators are re-derived through σ so they coincide with the facet
    /// systems' own generators.
    fn boundary_cells_of(&mut self, g: GenId) -> Vec<(Vec<Point>, GenId)> {
        let l = self.session.gen_dim(g);
        let host = self.session.gen_host(g);
        let mut seen: BTreeSet<Vec<Point>> = BTreeSet::new();
        let mut out = Vec::new();
        for (i, f) in self.session.faces(g).into_iter().enumerate() {
            let sys = self.systems.get(&f).expect("face system built").clone();
            for cell in &sys.cells {
                let pushed: Vec<Point> = cell
                    .verts
                    .iter()
                    .map(|x| {
                        let mut y = x.clone();
                        y.insert(i, Rat::zero());
                        debug_assert_eq!(y.len(), l + 1);
                        y
                    })
                    .collect();
                if seen.insert(pushed.clone()) {
                    let gen = self.restriction_gen(g, &pushed, host);
                    out.push((pushed, gen));
                }
            }
        }
        out
    }

    pub fn system(&self, g: GenId) -> &System {
        &self.systems[&g]
    }

    pub fn has_system(&self, g: GenId) -> bool {
        self.systems.contains_key(&g)
    }

    /// Validate PB1–PB5 on a freshly built system.
    fn validate_system(&mut self, g: GenId, sys: &System) -> Result<(), SubdivisionError> {
        let l = self.session.gen_dim(g);
        let delta = GeoSimplex::standard(l);
        // PB1: interior apex
        if !delta.relint_contains(&sys.apex_domain) {
            return Err(SubdivisionError::InvariantViolation("PB1"));
        }
        // PB2: cells inside facet i match the facet system's pushforward
        for (i, f) in self.session.faces(g).into_iter().enumerate() {
            let fsys = self.systems[&f].clone();
            let pushed: BTreeSet<Vec<Point>> = fsys
                .cells
                .iter()
                .map(|c| {
                    c.verts
                        .iter()
                        .map(|x| {
                            let mut y = x.clone();
                            y.insert(i, Rat::zero());
                            y
                        })
                        .collect()
                })
                .collect();
            let in_facet: BTreeSet<Vec<Point>> = sys
                .cells
                .iter()
                .filter(|c| c.verts.iter().all(|v| v[i].is_zero()))
                .map(|c| c.verts.clone())
                .collect();
            if pushed != in_facet {
                return Err(SubdivisionError::InvariantViolation("PB2"));
            }
        }
        // PB3: every cell is a boundary cell, the apex, or an apex cone
        for c in &sys.cells {
            let is_boundary = c.verts.iter().all(|v| v != &sys.apex_domain);
            let is_cone = c.verts.first() == Some(&sys.apex_domain);
            if !(is_boundary || is_cone) {
                return Err(SubdivisionError::InvariantViolation("PB3"));
            }
        }
        // PB4: diameters within 2ℓ/(2ℓ+1) of the domain diameter (scaled)
        let bound = rat(2 * l as i64, 2 * l as i64 + 1);
        let cap = bound.clone() * bound * delta.diam2();
        for c in &sys.cells {
            for a in 0..c.verts.len() {
                for b in a + 1..c.verts.len() {
                    if dist2(&c.verts[a], &c.verts[b]) > cap {
                        return Err(SubdivisionError::InvariantViolation("PB4"));
                    }
                }
            }
        }
        // PB5: strong general position for every (envelope, boundary) pair
        let envelopes = self.session.envelope_pieces_all(LinearSimplex(g));
        for b_idx in &sys.boundary_cells {
            let bcell = GeoSimplex::new(sys.cells[*b_idx].verts.clone()).expect("cell");
            for t in &envelopes {
                if !crate::geometry::strong_general_position(
                    &sys.apex_domain,
                    t,
                    Some(&bcell),
                    &delta,
                ) {
                    return Err(SubdivisionError::InvariantViolation("PB5"));
                }
            }
        }
        Ok(())
    }

    /// Chain map `sd`: identity in degree 0, cone of the subdivided boundary
    /// above, extended linearly with memoization per generator.
    pub fn sd_gen(&mut self, g: GenId) -> Result<Chain, SubdivisionError> {
        if let Some(c) = self.sd_memo.get(&g) {
            return Ok(c.clone());
        }
        let l = self.session.gen_dim(g);
        let result = if l == 0 {
            Chain::generator(0, g)
        } else {
            self.ensure_system(g)?;
            let mut boundary_sd = Chain::zero(l - 1);
            for (i, f) in self.session.faces(g).into_iter().enumerate() {
                let part = self.sd_gen(f)?;
                boundary_sd.add_scaled(&part, if i % 2 == 0 { 1 } else { -1 });
            }
            let apex = self.systems[&g].apex_image;
            boundary_sd.cone(&mut self.session, apex)
        };
        self.sd_memo.insert(g, result.clone());
        Ok(result)
    }

    pub fn sd_chain(&mut self, xi: &Chain) -> Result<Chain, SubdivisionError> {
        let mut out = Chain::zero(xi.degree);
        let gens: Vec<(GenId, i64)> = xi.terms.iter().map(|(&g, &c)| (g, c)).collect();
        for (g, coeff) in gens {
            let part = self.sd_gen(g)?;
            out.add_scaled(&part, coeff);
        }
        Ok(out)
    }

    /// Homotopy operator: `T(σ) = u_σ ∗ (σ − T(∂σ))`; in degree 0 the
    /// formula degenerates to `u_σ ∗ σ`.
    pub fn t_gen(&mut self, g: GenId) -> Result<Chain, SubdivisionError> {
        if let Some(c) = self.t_memo.get(&g) {
            return Ok(c.clone());
        }
        self.ensure_system(g)?;
        let l = self.session.gen_dim(g);
        let mut arg = Chain::generator(l, g);
        if l > 0 {
            for (i, f) in self.session.faces(g).into_iter().enumerate() {
                let part = self.t_gen(f)?;
                arg.add_scaled(&part, if i % 2 == 0 { -1 } else { 1 });
            }
        }
        let apex = self.systems[&g].apex_image;
        let result = arg.cone(&mut self.session, apex);
        self.t_memo.insert(g, result.clone());
        Ok(result)
    }

    pub fn t_chain(&mut self, xi: &Chain) -> Result<Chain, SubdivisionError> {
        let mut out = Chain::zero(xi.degree + 1);
        let gens: Vec<(GenId, i64)> = xi.terms.iter().map(|(&g, &c)| (g, c)).collect();
        for (g, coeff) in gens {
            let part = self.t_gen(g)?;
            out.add_scaled(&part, coeff);
        }
        Ok(out)
    }

    /// Prism triangulation of `Δ_σ × [0,1]` satisfying PB6–PB9, built
    /// recursively and validated against PB9 cell by cell.
    pub fn build_prism(&mut self, g: GenId) -> Result<PrismTriangulation, SubdivisionError> {
        self.ensure_system(g)?;
        let prism = self.prism_rec(g)?;
        self.validate_prism(g, &prism)?;
        Ok(prism)
    }

    fn prism_rec(&mut self, g: GenId) -> Result<PrismTriangulation, SubdivisionError> {
        self.ensure_system(g)?;
        let l = self.session.gen_dim(g);
        let zero = Rat::zero();
        let one = Rat::from_integer(1.into());
        if l == 0 {
            let bottom = vec![one.clone(), zero.clone()];
            let top = vec![one.clone(), one.clone()];
            let cells = face_closure(vec![vec![bottom, top]]);
            let top_cells = top_cell_indices(&cells, 1);
            return Ok(PrismTriangulation { cells, top_cells });
        }
        // boundary prisms, pushed into the facets of Δ^ℓ × [0,1]
        let mut boundary: Vec<Vec<Point>> = Vec::new();
        let mut seen: BTreeSet<Vec<Point>> = BTreeSet::new();
        for (i, f) in self.session.faces(g).into_iter().enumerate() {
            let sub = self.prism_rec(f)?;
            for cell in &sub.cells {
                let pushed: Vec<Point> = cell
                    .iter()
                    .map(|x| {
                        // barycentric part gains a zero at position i, the
                        // height coordinate stays last
                        let mut y = x[..x.len() - 1].to_vec();
                        y.insert(i, zero.clone());
                        y.push(x[x.len() - 1].clone());
                        y
                    })
                    .collect();
                if seen.insert(pushed.clone()) {
                    boundary.push(pushed);
                }
            }
        }
        let sys = self.systems[&g].clone();
        let mut apex_top = sys.apex_domain.clone();
        apex_top.push(one.clone());
        let mut tops: Vec<Vec<Point>> = Vec::new();
        // cones from (u,1) over every boundary prism cell
        for cell in &boundary {
            let mut coned = vec![apex_top.clone()];
            coned.extend(cell.iter().cloned());
            if coned.len() == l + 2 {
                tops.push(coned);
            }
        }
        // the cone over the base Δ × {0}
        let mut base_cone = vec![apex_top.clone()];
        for i in 0..=l {
            let mut v = vec![zero.clone(); l + 1];
            v[i] = one.clone();
            v.push(zero.clone());
            base_cone.push(v);
        }
        tops.push(base_cone);
        let mut all = boundary;
        all.extend(tops);
        let cells = face_closure(all);
        let top_cells = top_cell_indices(&cells, l + 1);
        Ok(PrismTriangulation { cells, top_cells })
    }

    /// PB9: the projections of the prism cells are exactly `ℬ_σ ∪ {Δ}`.
    fn validate_prism(
        &mut self,
        g: GenId,
        prism: &PrismTriangulation,
    ) -> Result<(), SubdivisionError> {
        let l = self.session.gen_dim(g);
        let sys = self.systems[&g].clone();
        let mut allowed: BTreeSet<BTreeSet<Point>> = sys
            .cells
            .iter()
            .map(|c| c.verts.iter().cloned().collect())
            .collect();
        let delta: BTreeSet<Point> = GeoSimplex::standard(l).verts().iter().cloned().collect();
        allowed.insert(delta);
        let mut projected: BTreeSet<BTreeSet<Point>> = BTreeSet::new();
        for cell in &prism.cells {
            // the projected simplex is the hull of the projected vertices;
            // interior images (the lifted apex over the base) drop out
            let raw: Vec<Point> = cell.iter().map(|x| x[..x.len() - 1].to_vec()).collect();
            let proj: BTreeSet<Point> =
                crate::geometry::extreme_points(&raw).into_iter().collect();
            if !allowed.contains(&proj) {
                return Err(SubdivisionError::InvariantViolation("PB9"));
            }
            projected.insert(proj);
        }
        if projected != allowed {
            return Err(SubdivisionError::InvariantViolation("PB9"));
        }
        Ok(())
    }

    /// Critical faces of a top-cell restriction: proper faces `F` of the
    /// domain with `dim(F ∩ σ⁻¹S) = dim Δ − Dp̄(S) − 2 ≥ 0` for some
    /// singular stratum. Faces are position subsets of the generator tuple.
    pub fn critical_faces(
        &mut self,
        g: GenId,
        perversity: &Perversity,
    ) -> Vec<(Vec<usize>, usize, i64)> {
        let l = self.session.gen_dim(g);
        let strata = self.session.real.strata().to_vec();
        let dual = perversity.dual(&strata);
        let pieces = self.session.carrier_pieces(g);
        let mut out = Vec::new();
        for face in proper_faces(l) {
            for s in strata.iter().filter(|s| !s.regular) {
                let target = match ExtInt::Fin(l as i64 - 2).sub(dual.value(s)) {
                    ExtInt::Fin(v) => v,
                    _ => continue,
                };
                if target < 0 {
                    continue;
                }
                let mut best = ExtInt::NegInf;
                for piece in pieces.iter().filter(|p| s.simplexes.contains(&p.cell)) {
                    if let Some(d) = face_piece_dim(piece, &face, l) {
                        best = best.max(d);
                    }
                }
                if best == ExtInt::Fin(target) {
                    out.push((face.clone(), s.id, target));
                }
            }
        }
        out
    }

    /// The bad face of a top cell: the minimum critical face, verified to be
    /// a complete face (a suffix of the apex-first cell order).
    pub fn bad_face(
        &mut self,
        g: GenId,
        perversity: &Perversity,
    ) -> Result<BadFaceReport, SubdivisionError> {
        let l = self.session.gen_dim(g);
        let criticals = self.critical_faces(g, perversity);
        if criticals.is_empty() {
            return Ok(BadFaceReport {
                cell_gen: g,
                bad_face: None,
                witness: None,
            });
        }
        let faces: Vec<BTreeSet<usize>> = criticals
            .iter()
            .map(|(f, _, _)| f.iter().copied().collect())
            .collect();
        let min = faces
            .iter()
            .enumerate()
            .find(|(_, cand)| faces.iter().all(|other| cand.is_subset(other)));
        let (idx, min_set) = match min {
            Some(x) => x,
            None => return Err(SubdivisionError::NotMinimal),
        };
        // complete faces are suffixes of the apex-first order
        let start = *min_set.iter().next().unwrap();
        let is_suffix = min_set.len() == l + 1 - start && min_set.iter().copied().eq(start..=l);
        if !is_suffix {
            return Err(SubdivisionError::NotMinimal);
        }
        let (face, stratum, value) = criticals[idx].clone();
        Ok(BadFaceReport {
            cell_gen: g,
            bad_face: Some(face),
            witness: Some((stratum, value)),
        })
    }

    /// Attempts used per built system, for reports.
    pub fn attempts(&self) -> BTreeMap<GenId, u32> {
        self.systems.iter().map(|(&g, s)| (g, s.attempts)).collect()
    }

    pub fn built_systems(&self) -> Vec<GenId> {
        let mut v: Vec<GenId> = self.systems.keys().copied().collect();
        v.sort_unstable();
        v
    }
}

/// `dim(F ∩ piece)` when the open part of the piece meets `F`, else None.
/// `F` is a coordinate face of the standard domain.
fn face_piece_dim(
    piece: &crate::allowability::CarrierPiece,
    face: &[usize],
    l: usize,
) -> Option<ExtInt> {
    let mut h = piece.poly.hform.clone();
    for pos in 0..=l {
        if !face.contains(&pos) {
            let mut coeffs = vec![Rat::zero(); l + 1];
            coeffs[pos] = Rat::from_integer(1.into());
            h.equalities.push(crate::geometry::AffineForm {
                coeffs,
                constant: Rat::zero(),
            });
        }
    }
    let poly = Polytope::from_hform(h);
    let centre = poly.centroid()?;
    if piece
        .cell_barys
        .iter()
        .all(|f| num_traits::Signed::is_positive(&f.eval(&centre)))
    {
        Some(poly.dim())
    } else {
        None
    }
}

fn proper_faces(l: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << (l + 1)) - 1 {
        let face: Vec<usize> = (0..=l).filter(|i| mask & (1 << i) != 0).collect();
        out.push(face);
    }
    out.sort_by_key(|f| f.len());
    out
}

fn face_closure(tops: Vec<Vec<Point>>) -> Vec<Vec<Point>> {
    let mut seen: BTreeSet<Vec<Point>> = BTreeSet::new();
    let mut queue = tops;
    let mut out = Vec::new();
    while let Some(cell) = queue.pop() {
        if !seen.insert(cell.clone()) {
            continue;
        }
        if cell.len() > 1 {
            for i in 0..cell.len() {
                let mut f = cell.clone();
                f.remove(i);
                queue.push(f.clone());
            }
        }
        out.push(cell);
    }
    out.sort();
    out
}

fn top_cell_indices(cells: &[Vec<Point>], dim: usize) -> Vec<usize> {
    cells
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len() == dim + 1)
        .map(|(i, _)| i)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::allowability::{is_intersection_chain, Notion, Realization};
    use crate::filtered::{FilteredComplex, Simplex};
    use crate::geometry::point_from_i64;
    use std::collections::HashMap as StdHashMap;

    fn pinched_disk() -> Realization {
        let complex = FilteredComplex::build(
            &[
                Simplex::new(vec![0, 1, 3]),
                Simplex::new(vec![1, 2, 3]),
                Simplex::new(vec![0, 2, 3]),
            ],
            &|s| Some(if s.0 == vec![3] { 0 } else { 2 }),
            2,
        )
        .unwrap();
        let mut coords = StdHashMap::new();
        coords.insert(0, point_from_i64(&[0, 0]));
        coords.insert(1, point_from_i64(&[3, 0]));
        coords.insert(2, point_from_i64(&[0, 3]));
        coords.insert(3, point_from_i64(&[1, 1]));
        Realization::new(complex, coords).unwrap()
    }

    fn big_triangle(sub: &mut Subdivider) -> GenId {
        sub.session
            .linear_simplex(vec![
                point_from_i64(&[0, 0]),
                point_from_i64(&[3, 0]),
                point_from_i64(&[0, 3]),
            ])
            .unwrap()
            .0
    }

    #[test]
    fn one_simplex_system_shape() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 41);
        let seg = sub
            .session
            .linear_simplex(vec![point_from_i64(&[0, 0]), point_from_i64(&[3, 0])])
            .unwrap();
        sub.ensure_system(seg.0).unwrap();
        let sys = sub.system(seg.0).clone();
        // two subsegments plus three vertex cells
        assert_eq!(sys.top_cells.len(), 2);
        assert_eq!(sys.cells.len(), 5);
        // diameters ≤ 2/3 of the domain diameter, exactly (PB4 at ℓ = 1)
        let delta = GeoSimplex::standard(1);
        let cap = rat(2, 3) * rat(2, 3) * delta.diam2();
        for c in &sys.cells {
            for a in 0..c.verts.len() {
                for b in a + 1..c.verts.len() {
                    assert!(dist2(&c.verts[a], &c.verts[b]) <= cap);
                }
            }
        }
    }

    #[test]
    fn zero_simplex_system_is_the_point() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 41);
        let v = sub
            .session
            .linear_simplex(vec![point_from_i64(&[3, 0])])
            .unwrap();
        sub.ensure_system(v.0).unwrap();
        let sys = sub.system(v.0);
        assert_eq!(sys.cells.len(), 1);
        assert_eq!(sys.cells[0].gen, v.0);
    }

    #[test]
    fn barycentre_simplex_system_avoids_the_singular_point() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 4242);
        let g = big_triangle(&mut sub);
        sub.ensure_system(g).unwrap();
        let sys = sub.system(g).clone();
        let b = vec![rat(1, 3), rat(1, 3), rat(1, 3)];
        assert_ne!(sys.apex_domain, b);
        // the singular preimage point lies in the interior of exactly one
        // top cell, on no cell walls
        let mut interior_count = 0;
        for &i in &sys.top_cells {
            let cell = GeoSimplex::new(sys.cells[i].verts.clone()).unwrap();
            if cell.relint_contains(&b) {
                interior_count += 1;
            } else {
                assert!(!cell.contains(&b), "wall through the singular preimage");
            }
        }
        assert_eq!(interior_count, 1);
    }

    #[test]
    fn sd_of_segment_telescopes() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 7);
        let seg = sub
            .session
            .linear_simplex(vec![point_from_i64(&[0, 0]), point_from_i64(&[3, 0])])
            .unwrap();
        let xi = Chain::generator(1, seg.0);
        let sd = sub.sd_chain(&xi).unwrap();
        assert_eq!(sd.terms.len(), 2);
        // boundary telescopes: ∂(sd ξ) = sd(∂ξ) = ∂ξ in degree 0
        let lhs = sd.boundary(&mut sub.session);
        let rhs = xi.boundary(&mut sub.session);
        assert_eq!(lhs, rhs);
        // the two halves carry opposite signs on apex-first tuples, which is
        // the compatible geometric orientation [y0,m] + [m,y1]
        let mut coeffs: Vec<i64> = sd.terms.values().copied().collect();
        coeffs.sort_unstable();
        assert_eq!(coeffs, vec![-1, 1]);
    }

    #[test]
    fn sd_is_a_chain_map_on_the_disk() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 99);
        let g = big_triangle(&mut sub);
        let xi = Chain::generator(2, g);
        let sd = sub.sd_chain(&xi).unwrap();
        assert_eq!(sd.terms.len(), 6);
        let b_sd = sd.boundary(&mut sub.session);
        let b_xi = xi.boundary(&mut sub.session);
        let sd_b = sub.sd_chain(&b_xi).unwrap();
        assert_eq!(b_sd, sd_b);
    }

    #[test]
    fn sd_zero_chain_in_degree_zero_is_identity() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 3);
        let v = sub
            .session
            .linear_simplex(vec![point_from_i64(&[3, 0])])
            .unwrap();
        let xi = Chain::generator(0, v.0);
        assert_eq!(sub.sd_chain(&xi).unwrap(), xi);
    }

    #[test]
    fn sd_preserves_allowability_on_the_motivating_example() {
        let real = pinched_disk();
        let strata = real.strata().to_vec();
        let top = Perversity::top(&strata);
        let mut sub = Subdivider::new(Session::new(real), 2026);
        let g = big_triangle(&mut sub);
        assert!(sub
            .session
            .is_allowable(LinearSimplex(g), &top, Notion::Poly));
        let sd = sub.sd_chain(&Chain::generator(2, g)).unwrap();
        for &cell in sd.terms.keys() {
            assert!(sub
                .session
                .is_allowable(LinearSimplex(cell), &top, Notion::Poly));
        }
        // pseudo-barycentric subdivision keeps the chain an intersection
        // chain, which the true barycentric subdivision would break
        assert!(is_intersection_chain(
            &mut sub.session,
            &sd,
            &top,
            Notion::Poly
        ));
        for &cell in sd.terms.keys() {
            assert!(sub.critical_faces(cell, &top).is_empty());
            let report = sub.bad_face(cell, &top).unwrap();
            assert!(report.bad_face.is_none());
        }
    }

    #[test]
    fn barycentric_cells_have_critical_faces() {
        // the true barycentric subdivision of the motivating example: cells
        // keep the singular preimage at a vertex, so edges into it are
        // critical. Constructed directly, not via the sampler.
        let real = pinched_disk();
        let strata = real.strata().to_vec();
        let top = Perversity::top(&strata);
        let mut sub = Subdivider::new(Session::new(real), 1);
        // cell [b, m01, v0] of the barycentric subdivision of the big
        // triangle, apex-first order; b = (1,1) is the singular point
        let cell = sub
            .session
            .linear_simplex(vec![
                point_from_i64(&[1, 1]),
                vec![rat(3, 2), Rat::zero()],
                point_from_i64(&[0, 0]),
            ])
            .unwrap();
        let criticals = sub.critical_faces(cell.0, &top);
        // every face containing position 0 (the singular vertex) is critical
        let faces: Vec<Vec<usize>> = criticals.iter().map(|(f, _, _)| f.clone()).collect();
        assert!(faces.contains(&vec![0]));
        assert!(faces.contains(&vec![0, 1]));
        assert!(faces.contains(&vec![0, 2]));
        assert_eq!(faces.len(), 3);
        // the minimum is the vertex [0]: a prefix, not a suffix of the
        // apex-first order, so the completeness verification rejects it
        assert_eq!(sub.bad_face(cell.0, &top), Err(SubdivisionError::NotMinimal));
    }

    #[test]
    fn homotopy_identity_on_disk_chains() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 5);
        let g = big_triangle(&mut sub);
        let mut xi = Chain::generator(2, g);
        let t2 = sub
            .session
            .linear_simplex(vec![
                point_from_i64(&[1, 1]),
                point_from_i64(&[0, 0]),
                point_from_i64(&[3, 0]),
            ])
            .unwrap();
        xi.add_term(t2.0, -3);
        // ξ − sd ξ = ∂T(ξ) + T(∂ξ), exactly
        let sd = sub.sd_chain(&xi).unwrap();
        let t_xi = sub.t_chain(&xi).unwrap();
        let b_xi = xi.boundary(&mut sub.session);
        let t_b = sub.t_chain(&b_xi).unwrap();
        let mut lhs = xi.clone();
        lhs.add_scaled(&sd, -1);
        let mut rhs = t_xi.boundary(&mut sub.session);
        rhs.add_scaled(&t_b, 1);
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn homotopy_on_zero_and_point_chains() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 5);
        let zero = Chain::zero(1);
        assert!(sub.t_chain(&zero).unwrap().is_zero());
        let v = sub
            .session
            .linear_simplex(vec![point_from_i64(&[3, 0])])
            .unwrap();
        let xi = Chain::generator(0, v.0);
        let t = sub.t_chain(&xi).unwrap();
        // ∂T(σ) = σ − sd σ = 0 in degree 0
        assert!(t.boundary(&mut sub.session).is_zero());
    }

    #[test]
    fn t_preserves_allowability() {
        let real = pinched_disk();
        let strata = real.strata().to_vec();
        let top = Perversity::top(&strata);
        let mut sub = Subdivider::new(Session::new(real), 2026);
        let g = big_triangle(&mut sub);
        let t = sub.t_chain(&Chain::generator(2, g)).unwrap();
        for &cell in t.terms.keys() {
            assert!(sub
                .session
                .is_allowable(LinearSimplex(cell), &top, Notion::Poly));
        }
    }

    #[test]
    fn prism_shapes_and_projection() {
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 11);
        // dimension 0: a single segment cell
        let v = sub
            .session
            .linear_simplex(vec![point_from_i64(&[3, 0])])
            .unwrap();
        let prism0 = sub.build_prism(v.0).unwrap();
        assert_eq!(prism0.top_cells.len(), 1);
        // dimension 1: three triangles (two boundary cones, one base cone)
        let seg = sub
            .session
            .linear_simplex(vec![point_from_i64(&[0, 0]), point_from_i64(&[3, 0])])
            .unwrap();
        let prism1 = sub.build_prism(seg.0).unwrap();
        assert_eq!(prism1.top_cells.len(), 3);
        // PB9 validated inside build_prism; spot-check one projection
        let sys = sub.system(seg.0);
        let proj: BTreeSet<Point> = prism1.cells[prism1.top_cells[0]]
            .iter()
            .map(|x| x[..x.len() - 1].to_vec())
            .collect();
        let in_system = sys
            .cells
            .iter()
            .any(|c| c.verts.iter().cloned().collect::<BTreeSet<_>>() == proj)
            || proj == GeoSimplex::standard(1).verts().iter().cloned().collect();
        assert!(in_system);
    }

    #[test]
    fn t_cells_live_on_prism_cells() {
        // the generators of T(σ) are exactly the restrictions of σ∘pr to the
        // top cells of the prism triangulation
        let real = pinched_disk();
        let mut sub = Subdivider::new(Session::new(real), 13);
        let seg = sub
            .session
            .linear_simplex(vec![point_from_i64(&[0, 0]), point_from_i64(&[3, 0])])
            .unwrap();
        let t = sub.t_chain(&Chain::generator(1, seg.0)).unwrap();
        let prism = sub.build_prism(seg.0).unwrap();
        let seg_points = sub.session.gen_points(seg.0);
        let mut expected: BTreeSet<Vec<Point>> = BTreeSet::new();
        for &i in &prism.top_cells {
            let image: Vec<Point> = prism.cells[i]
                .iter()
                .map(|x| {
                    let bary = &x[..x.len() - 1];
                    let mut out = vec![Rat::zero(); 2];
                    for (c, y) in bary.iter().zip(seg_points.iter()) {
                        out = linalg::add(&out, &linalg::scale(y, c));
                    }
                    out
                })
                .collect();
            expected.insert(image);
        }
        let got: BTreeSet<Vec<Point>> = t
            .terms
            .keys()
            .map(|&g| sub.session.gen_points(g))
            .collect();
        assert_eq!(got, expected);
    }

    #[test]
    fn cone_cells_share_the_singular_bad_face() {
        // in the disk, every top cell of the subdivision of a cone triangle
        // that touches the singular vertex has bad face = that vertex
        let real = pinched_disk();
        let strata = real.strata().to_vec();
        let top = Perversity::top(&strata);
        let mut sub = Subdivider::new(Session::new(real), 17);
        let tri = sub
            .session
            .linear_simplex(vec![
                point_from_i64(&[1, 1]),
                point_from_i64(&[0, 0]),
                point_from_i64(&[3, 0]),
            ])
            .unwrap();
        sub.ensure_system(tri.0).unwrap();
        let sys = sub.system(tri.0).clone();
        let sing = vec![linalg::rat_i(1), linalg::rat_i(1)];
        let mut with_bad = 0;
        for &i in &sys.top_cells {
            let gen = sys.cells[i].gen;
            let report = sub.bad_face(gen, &top).unwrap();
            let touches = sub
                .session
                .gen_points(gen)
                .iter()
                .any(|p| *p == sing);
            if touches {
                let face = report.bad_face.expect("cells at the vertex have a bad face");
                // the bad face is the singular vertex itself
                let pts = sub.session.gen_points(gen);
                assert_eq!(face.len(), 1);
                assert_eq!(pts[face[0]], sing);
                with_bad += 1;
            } else {
                assert!(report.bad_face.is_none());
            }
        }
        assert!(with_bad > 0);
    }
}
