//! Intersection chain complexes and their homology.
//!
//! The generator universe at level `r` consists of the cells of the `r`-fold
//! pseudo-barycentric subdivision of the complex's own triangulation. The
//! intersection complex is not spanned by single simplexes: it is the
//! kernel pair `{ξ : ξ and ∂ξ allowable}`, realized as the integer kernel of
//! the boundary matrix restricted to allowable columns and projected to
//! non-allowable rows. Homology over `Z` comes from Smith normal form; over
//! `Z/p` from modular ranks of the same integer presentation.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use thiserror::Error;

use crate::allowability::{Chain, GenId, LinearSimplex, Notion, Realization, Session};
use crate::extint::ExtInt;
use crate::filtered::{Perversity, Simplex, VertexId};
use crate::geometry::Point;
use crate::intalg::{
    kernel_basis, lattice_canonical, lattice_eq, preimage_lattice, smith_invariant_factors,
    IMat, PMat, Solver,
};
use crate::linalg;
use crate::subdivision::{Subdivider, SubdivisionError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HomologyError {
    #[error("subdivision failed: {0}")]
    Subdivision(#[from] SubdivisionError),
    #[error("cover is not open: {0}")]
    CoverNotOpen(String),
    #[error("map is not stratified: {0}")]
    NotStratified(String),
    #[error("internal solve failed: {0}")]
    Internal(&'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ring {
    Z,
    Zp(u64),
}

impl std::fmt::Display for Ring {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ring::Z => write!(f, "Z"),
            Ring::Zp(p) => write!(f, "Z/{p}"),
        }
    }
}

/// Betti number and invariant factors (> 1, divisibility order) per degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDesc {
    pub betti: i64,
    pub torsion: Vec<BigInt>,
}

impl GroupDesc {
    pub fn zero() -> Self {
        GroupDesc {
            betti: 0,
            torsion: vec![],
        }
    }

    pub fn free(betti: i64) -> Self {
        GroupDesc {
            betti,
            torsion: vec![],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyResult {
    pub ring: Ring,
    pub groups: Vec<GroupDesc>,
}

/// Finite presentation of one intersection chain complex: per degree the
/// ambient generators, an integer lattice basis of the kernel-pair subgroup,
/// and the boundary expressed in those bases.
#[derive(Clone)]
pub struct Presentation {
    pub level: usize,
    pub degrees: Vec<DegreeData>,
}

#[derive(Clone)]
pub struct DegreeData {
    pub gens: Vec<GenId>,
    /// gens.len() × rank lattice basis of `I_k` in generator coordinates.
    pub basis: IMat,
    /// rank_{k−1} × rank_k boundary in the chosen bases.
    pub boundary: IMat,
}

impl Presentation {
    pub fn rank(&self, k: usize) -> usize {
        self.degrees.get(k).map_or(0, |d| d.basis.cols)
    }
}

/// Subdivision-level generator universes over one realized complex.
pub struct Engine {
    pub sub: Subdivider,
    levels: Vec<Vec<Vec<GenId>>>,
    /// Presentations keyed by (level, per-degree admissibility flags):
    /// perversities or notions inducing the same admissible generator set
    /// share the assembled complex.
    pres_cache: HashMap<(usize, Vec<Vec<bool>>), Presentation>,
    hom_cache: HashMap<(usize, Vec<Vec<bool>>, Ring), HomologyResult>,
}

impl Engine {
    pub fn new(real: Realization, seed: u64) -> Self {
        let mut session = Session::new(real);
        let n_cells = session.real.complex().simplexes().len();
        let max_dim = session
            .real
            .complex()
            .simplexes()
            .iter()
            .map(|s| s.dim())
            .max()
            .unwrap_or(0);
        let mut by_dim: Vec<Vec<GenId>> = vec![Vec::new(); max_dim + 1];
        for cell in 0..n_cells {
            let simplex = session.real.complex().simplex(cell).clone();
            let coords: Vec<Point> = simplex
                .0
                .iter()
                .map(|v| session.real.coords()[v].clone())
                .collect();
            let tuple: Vec<u32> = coords
                .into_iter()
                .map(|p| session.intern_point(p))
                .collect();
            let g = session.intern_cell_gen(tuple, Some(cell));
            by_dim[simplex.dim()].push(g);
        }
        for v in &mut by_dim {
            v.sort_unstable();
        }
        Engine {
            sub: Subdivider::new(session, seed),
            levels: vec![by_dim],
            pres_cache: HashMap::new(),
            hom_cache: HashMap::new(),
        }
    }

    pub fn session(&mut self) -> &mut Session {
        &mut self.sub.session
    }

    pub fn max_dim(&self) -> usize {
        self.levels[0].len() - 1
    }

    /// Generators of one level, grouped by dimension.
    pub fn level(&mut self, r: usize) -> Result<&Vec<Vec<GenId>>, HomologyError> {
        while self.levels.len() <= r {
            let prev = self.levels.last().unwrap().clone();
            let max_dim = prev.len() - 1;
            let mut next: Vec<Vec<GenId>> = vec![Vec::new(); max_dim + 1];
            let mut seen: Vec<std::collections::BTreeSet<GenId>> =
                vec![Default::default(); max_dim + 1];
            for dim_gens in &prev {
                for &g in dim_gens {
                    self.sub.ensure_system(g)?;
                    let sys = self.sub.system(g).clone();
                    for cell in &sys.cells {
                        let d = cell.verts.len() - 1;
                        if seen[d].insert(cell.gen) {
                            next[d].push(cell.gen);
                        }
                    }
                }
            }
            for v in &mut next {
                v.sort_unstable();
            }
            self.levels.push(next);
        }
        Ok(&self.levels[r])
    }

    /// Full boundary matrix of the level-`r` universe from degree `k` to
    /// `k − 1`, rows and columns in the level's generator order.
    fn boundary_matrix(&mut self, r: usize, k: usize) -> Result<IMat, HomologyError> {
        let gens = self.level(r)?.clone();
        let cols = gens.get(k).cloned().unwrap_or_default();
        let rows = if k == 0 {
            Vec::new()
        } else {
            gens.get(k - 1).cloned().unwrap_or_default()
        };
        let row_index: HashMap<GenId, usize> =
            rows.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let mut m = IMat::zero(rows.len(), cols.len());
        if k == 0 {
            return Ok(m);
        }
        for (j, &g) in cols.iter().enumerate() {
            for (i, f) in self.sub.session.faces(g).into_iter().enumerate() {
                let sign = if i % 2 == 0 { 1 } else { -1 };
                let row = *row_index.get(&f).expect("universe is face-closed");
                *m.at_mut(row, j) += BigInt::from(sign);
            }
        }
        Ok(m)
    }

    /// Assemble the kernel-pair presentation `{ξ : ξ, ∂ξ allowable}` at the
    /// given level, optionally restricted to generators passing `filter`
    /// (used for open-cover subcomplexes).
    pub fn assemble(
        &mut self,
        perversity: &Perversity,
        notion: Notion,
        level: usize,
        filter: Option<&dyn Fn(&mut Session, GenId) -> bool>,
    ) -> Result<Presentation, HomologyError> {
        Ok(self.assemble_keyed(perversity, notion, level, filter)?.0)
    }

    fn assemble_keyed(
        &mut self,
        perversity: &Perversity,
        notion: Notion,
        level: usize,
        filter: Option<&dyn Fn(&mut Session, GenId) -> bool>,
    ) -> Result<(Presentation, Vec<Vec<bool>>), HomologyError> {
        let gens = self.level(level)?.clone();
        let all: Vec<GenId> = gens.iter().flatten().copied().collect();
        self.sub.session.ensure_carriers(&all);
        let mut flags: Vec<Vec<bool>> = Vec::new();
        for dim_gens in &gens {
            let mut row = Vec::with_capacity(dim_gens.len());
            for &g in dim_gens {
                let ok = self
                    .sub
                    .session
                    .is_allowable(LinearSimplex(g), perversity, notion)
                    && filter.map_or(true, |f| f(&mut self.sub.session, g));
                row.push(ok);
            }
            flags.push(row);
        }
        let key = (level, flags.clone());
        if let Some(cached) = self.pres_cache.get(&key) {
            return Ok((cached.clone(), flags));
        }
        let admissible: Vec<HashMap<GenId, bool>> = gens
            .iter()
            .zip(flags.iter())
            .map(|(dim_gens, row)| dim_gens.iter().copied().zip(row.iter().copied()).collect())
            .collect();
        let max_dim = gens.len() - 1;
        let mut degrees: Vec<DegreeData> = Vec::new();
        for k in 0..=max_dim {
            let cols = gens[k].clone();
            let d_full = self.boundary_matrix(level, k)?;
            // columns restricted to admissible generators
            let adm_cols: Vec<usize> = (0..cols.len())
                .filter(|&j| admissible[k][&cols[j]])
                .collect();
            let basis = if k == 0 {
                let mut b = IMat::zero(cols.len(), adm_cols.len());
                for (jj, &j) in adm_cols.iter().enumerate() {
                    *b.at_mut(j, jj) = BigInt::from(1);
                }
                b
            } else {
                let rows = gens[k - 1].clone();
                let bad_rows: Vec<usize> = (0..rows.len())
                    .filter(|&i| !admissible[k - 1][&rows[i]])
                    .collect();
                let mut n = IMat::zero(bad_rows.len(), adm_cols.len());
                for (ii, &i) in bad_rows.iter().enumerate() {
                    for (jj, &j) in adm_cols.iter().enumerate() {
                        *n.at_mut(ii, jj) = d_full.at(i, j).clone();
                    }
                }
                let ker = kernel_basis(&n);
                // expand kernel coordinates back to the full generator basis;
                // the HNF kernel columns already form a lattice basis
                let mut b = IMat::zero(cols.len(), ker.cols);
                for (jj, &j) in adm_cols.iter().enumerate() {
                    for c in 0..ker.cols {
                        *b.at_mut(j, c) = ker.at(jj, c).clone();
                    }
                }
                b
            };
            // boundary in bases: solve B_{k−1} X = D_k B_k
            let boundary = if k == 0 {
                IMat::zero(0, basis.cols)
            } else {
                let prev = &degrees[k - 1].basis;
                let target = d_full.mul(&basis);
                let x = Solver::new(prev)
                    .solve_matrix(&target)
                    .ok_or(HomologyError::Internal("boundary not in subcomplex"))?;
                // closure: the solved boundary reproduces the geometric one
                if prev.mul(&x) != target {
                    return Err(HomologyError::Internal("boundary closure mismatch"));
                }
                x
            };
            degrees.push(DegreeData {
                gens: cols,
                basis,
                boundary,
            });
        }
        // ∂∂ = 0, exactly
        for k in 2..=max_dim {
            if !degrees[k - 1].boundary.mul(&degrees[k].boundary).is_zero() {
                return Err(HomologyError::Internal("dd != 0"));
            }
        }
        let pres = Presentation { level, degrees };
        self.pres_cache.insert(key, pres.clone());
        Ok((pres, flags))
    }

    /// Assemble and take homology, cached on the admissible generator set.
    pub fn homology(
        &mut self,
        perversity: &Perversity,
        notion: Notion,
        level: usize,
        ring: Ring,
    ) -> Result<HomologyResult, HomologyError> {
        let (pres, flags) = self.assemble_keyed(perversity, notion, level, None)?;
        let key = (level, flags, ring);
        if let Some(h) = self.hom_cache.get(&key) {
            return Ok(h.clone());
        }
        let h = smith_homology(&pres, ring);
        self.hom_cache.insert(key, h.clone());
        Ok(h)
    }
}

/// Homology of a presentation over the requested ring.
pub fn smith_homology(pres: &Presentation, ring: Ring) -> HomologyResult {
    let n = pres.degrees.len();
    let mut groups = Vec::new();
    for k in 0..n {
        let rank_k = pres.degrees[k].basis.cols as i64;
        let d_k = &pres.degrees[k].boundary;
        let d_k1 = pres.degrees.get(k + 1).map(|d| &d.boundary);
        match ring {
            Ring::Z => {
                let rank_dk = d_k.rank() as i64;
                let (rank_dk1, factors) = match d_k1 {
                    Some(m) => (m.rank() as i64, smith_invariant_factors(m)),
                    None => (0, vec![]),
                };
                let betti = rank_k - rank_dk - rank_dk1;
                let torsion: Vec<BigInt> = factors
                    .into_iter()
                    .filter(|f| f > &BigInt::from(1))
                    .collect();
                groups.push(GroupDesc { betti, torsion });
            }
            Ring::Zp(p) => {
                let rank_dk = PMat::from_imat(d_k, p).rank() as i64;
                let rank_dk1 = d_k1.map_or(0, |m| PMat::from_imat(m, p).rank() as i64);
                groups.push(GroupDesc {
                    betti: rank_k - rank_dk - rank_dk1,
                    torsion: vec![],
                });
            }
        }
    }
    HomologyResult { ring, groups }
}

// --- cone formula -----------------------------------------------------------

#[derive(Clone, Debug)]
pub struct ConeDegreeLine {
    pub degree: usize,
    pub expected: GroupDesc,
    pub got: GroupDesc,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct ConeFormulaReport {
    pub dual_apex: ExtInt,
    pub notion: Notion,
    pub lines: Vec<ConeDegreeLine>,
    pub pass: bool,
}

/// Extend a perversity on the base to the cone, assigning `apex_value` at
/// the apex stratum; non-apex strata inherit the base values through the
/// canonical stratum correspondence.
pub fn cone_perversity(
    base: &Realization,
    base_perversity: &Perversity,
    cone: &Realization,
    apex: VertexId,
    apex_value: ExtInt,
) -> Perversity {
    let cone_strata = cone.strata();
    let mut values: BTreeMap<usize, ExtInt> = BTreeMap::new();
    for cs in cone_strata {
        if cs.regular {
            values.insert(cs.id, ExtInt::Fin(0));
            continue;
        }
        let member = cone.complex().simplex(cs.simplexes[0]).clone();
        if member.0 == vec![apex] {
            values.insert(cs.id, apex_value);
            continue;
        }
        // a non-apex stratum contains some base simplex (drop the apex)
        let witness: Simplex = if member.0.contains(&apex) {
            Simplex::new(member.0.iter().copied().filter(|&v| v != apex).collect())
        } else {
            member
        };
        let base_idx = base
            .complex()
            .simplex_index(&witness)
            .expect("cone stratum witnesses a base simplex");
        let bs = base.stratum_of_cell(base_idx);
        values.insert(cs.id, base_perversity.value(bs));
    }
    Perversity {
        values,
        kind: base_perversity.kind.clone(),
    }
}

/// Check the cone formula: `H_k(c̊X) = H_k(X)` for `k ≤ Dp̄(v)`, vanishing
/// above that in positive degrees, rank one in degree zero when even degree
/// zero is above.
pub fn cone_formula_check(
    base: &Realization,
    base_perversity: &Perversity,
    apex_value: ExtInt,
    notion: Notion,
    level: usize,
    ring: Ring,
    seed: u64,
) -> Result<ConeFormulaReport, HomologyError> {
    let (cone_real, apex) = base.cone();
    let cone_p = cone_perversity(base, base_perversity, &cone_real, apex, apex_value);
    // Dp̄(v) with codim(v) = n + 1
    let n1 = cone_real.complex().formal_dim();
    let dual_apex = ExtInt::Fin(n1 - 2).sub(apex_value);

    let mut base_engine = Engine::new(base.clone(), seed);
    let base_pres = base_engine.assemble(base_perversity, notion, level, None)?;
    let base_h = smith_homology(&base_pres, ring);

    let mut cone_engine = Engine::new(cone_real, seed);
    let cone_pres = cone_engine.assemble(&cone_p, notion, level, None)?;
    let cone_h = smith_homology(&cone_pres, ring);

    let mut lines = Vec::new();
    let degrees = cone_h.groups.len().max(base_h.groups.len());
    for k in 0..degrees {
        let got = cone_h.groups.get(k).cloned().unwrap_or(GroupDesc::zero());
        let expected = if ExtInt::Fin(k as i64) <= dual_apex {
            base_h.groups.get(k).cloned().unwrap_or(GroupDesc::zero())
        } else if k == 0 {
            GroupDesc::free(1)
        } else {
            GroupDesc::zero()
        };
        let pass = got == expected;
        lines.push(ConeDegreeLine {
            degree: k,
            expected,
            got,
            pass,
        });
    }
    let pass = lines.iter().all(|l| l.pass);
    Ok(ConeFormulaReport {
        dual_apex,
        notion,
        lines,
        pass,
    })
}

// --- Mayer-Vietoris ---------------------------------------------------------

#[derive(Clone, Debug)]
pub struct MvNode {
    pub degree: usize,
    pub node: &'static str,
    pub pass: bool,
}

#[derive(Clone, Debug)]
pub struct MvReport {
    pub ses_pass: bool,
    pub nodes: Vec<MvNode>,
    pub union_iso_pass: bool,
    pub pass: bool,
}

struct LatticeComplex {
    /// per degree: ambient-gens × rank basis (empty for the formal sum)
    bases: Vec<IMat>,
    /// per degree: boundary in the bases (rank_{k−1} × rank_k)
    boundaries: Vec<IMat>,
}

struct GroupPres {
    ngens: usize,
    rels: IMat,
}

fn homology_data(c: &LatticeComplex) -> Vec<(IMat, GroupPres)> {
    let n = c.boundaries.len();
    let mut out = Vec::new();
    for k in 0..n {
        let z = kernel_basis(&c.boundaries[k]);
        let rels = match c.boundaries.get(k + 1) {
            Some(d1) => Solver::new(&z)
                .solve_matrix(d1)
                .expect("image inside kernel"),
            None => IMat::zero(z.cols, 0),
        };
        out.push((
            z.clone(),
            GroupPres {
                ngens: z.cols,
                rels,
            },
        ));
    }
    out
}

/// Matrix of the map induced on homology by a chain map given in basis
/// coordinates.
fn induced_on_homology(z_src: &IMat, chain_map: &IMat, z_tgt: &IMat) -> IMat {
    let mapped = chain_map.mul(z_src);
    Solver::new(z_tgt)
        .solve_matrix(&mapped)
        .expect("cycles map to cycles")
}

/// Exactness of `A --f--> B --g--> C` at `B` for presented groups: the image
/// lattice of `f` plus the relations equals the preimage of `C`'s relations
/// under `g`.
fn exact_at(f: &IMat, rels_b: &IMat, g: &IMat, rels_c: &IMat) -> bool {
    let im = f.hstack(rels_b);
    let ker = preimage_lattice(g, rels_c).hstack(rels_b);
    lattice_eq(&im, &ker)
}

/// Express each column of `cols` (ambient coordinates) in `basis`.
fn in_basis(basis: &IMat, cols: &IMat) -> Option<IMat> {
    Solver::new(basis).solve_matrix(cols)
}

/// Mayer–Vietoris verification for an open cover given by two subcomplex
/// carriers. Builds the short exact sequence of intersection complexes, the
/// long sequence with its connecting maps, checks im = ker at every node,
/// and checks that the sum subcomplex computes the homology of the whole
/// complex.
pub fn mayer_vietoris_check(
    engine: &mut Engine,
    u_carrier: &[Simplex],
    v_carrier: &[Simplex],
    perversity: &Perversity,
    notion: Notion,
    level: usize,
) -> Result<MvReport, HomologyError> {
    validate_carrier(engine, u_carrier, "U")?;
    validate_carrier(engine, v_carrier, "V")?;
    // openness: the union of open stars covers, i.e. every cell has a face
    // in U or in V
    {
        let complex = engine.sub.session.real.complex();
        for s in complex.simplexes() {
            let covered = u_carrier.iter().any(|f| f.is_face_of(s))
                || v_carrier.iter().any(|f| f.is_face_of(s));
            if !covered {
                return Err(HomologyError::CoverNotOpen(format!(
                    "cell {:?} misses both stars",
                    s.0
                )));
            }
        }
    }
    let k_u = star_complement(engine, u_carrier);
    let k_v = star_complement(engine, v_carrier);

    let in_u = |session: &mut Session, g: GenId| gen_in_open(session, g, &k_u);
    let in_v = |session: &mut Session, g: GenId| gen_in_open(session, g, &k_v);
    let in_uv = |session: &mut Session, g: GenId| {
        gen_in_open(session, g, &k_u) && gen_in_open(session, g, &k_v)
    };

    let pres_u = engine.assemble(perversity, notion, level, Some(&in_u))?;
    let pres_v = engine.assemble(perversity, notion, level, Some(&in_v))?;
    let pres_uv = engine.assemble(perversity, notion, level, Some(&in_uv))?;
    let pres_x = engine.assemble(perversity, notion, level, None)?;

    let max_dim = pres_x.degrees.len() - 1;
    // SES sanity: I^{U∩V} = I^U ∩ I^V degree-wise
    let mut ses_pass = true;
    for k in 0..=max_dim {
        let bu = &pres_u.degrees[k].basis;
        let bv = &pres_v.degrees[k].basis;
        let buv = &pres_uv.degrees[k].basis;
        // x = bu·y with x ∈ lat(bv): y ∈ preimage of lat(bv) under bu
        let pre = preimage_lattice(bu, bv);
        let inter = bu.mul(&pre);
        if !lattice_eq(&inter, buv) {
            ses_pass = false;
        }
    }

    // sum complex: lattice sums degree-wise, with its boundary
    let mut sum_bases = Vec::new();
    for k in 0..=max_dim {
        let b = lattice_canonical(&pres_u.degrees[k].basis.hstack(&pres_v.degrees[k].basis));
        sum_bases.push(b);
    }
    let mut sum_boundaries = Vec::new();
    for k in 0..=max_dim {
        if k == 0 {
            sum_boundaries.push(IMat::zero(0, sum_bases[0].cols));
            continue;
        }
        let d_full = engine.boundary_matrix(level, k)?;
        let target = d_full.mul(&sum_bases[k]);
        let x =
            in_basis(&sum_bases[k - 1], &target).ok_or(HomologyError::Internal("sum boundary"))?;
        sum_boundaries.push(x);
    }

    let complex_a = LatticeComplex {
        bases: pres_uv.degrees.iter().map(|d| d.basis.clone()).collect(),
        boundaries: pres_uv.degrees.iter().map(|d| d.boundary.clone()).collect(),
    };
    let complex_sum = LatticeComplex {
        bases: sum_bases,
        boundaries: sum_boundaries,
    };
    let complex_x = LatticeComplex {
        bases: pres_x.degrees.iter().map(|d| d.basis.clone()).collect(),
        boundaries: pres_x.degrees.iter().map(|d| d.boundary.clone()).collect(),
    };
    // direct sum B = I^U ⊕ I^V
    let mut b_sizes = Vec::new();
    let mut b_boundaries = Vec::new();
    for k in 0..=max_dim {
        let ru = pres_u.degrees[k].basis.cols;
        let rv = pres_v.degrees[k].basis.cols;
        b_sizes.push((ru, rv));
        let du = &pres_u.degrees[k].boundary;
        let dv = &pres_v.degrees[k].boundary;
        let mut m = IMat::zero(du.rows + dv.rows, ru + rv);
        for i in 0..du.rows {
            for j in 0..du.cols {
                *m.at_mut(i, j) = du.at(i, j).clone();
            }
        }
        for i in 0..dv.rows {
            for j in 0..dv.cols {
                *m.at_mut(du.rows + i, ru + j) = dv.at(i, j).clone();
            }
        }
        b_boundaries.push(m);
    }
    let complex_b = LatticeComplex {
        bases: vec![],
        boundaries: b_boundaries,
    };

    // chain maps in basis coordinates
    let mut j_maps = Vec::new(); // A → B: (ι_U, −ι_V)
    let mut q_maps = Vec::new(); // B → SUM: φ(α, β) = α + β
    let mut iota_maps = Vec::new(); // SUM → X
    for k in 0..=max_dim {
        let buv = &pres_uv.degrees[k].basis;
        let into_u =
            in_basis(&pres_u.degrees[k].basis, buv).ok_or(HomologyError::Internal("UV in U"))?;
        let into_v =
            in_basis(&pres_v.degrees[k].basis, buv).ok_or(HomologyError::Internal("UV in V"))?;
        let (ru, rv) = b_sizes[k];
        let mut j = IMat::zero(ru + rv, buv.cols);
        for jcol in 0..buv.cols {
            for i in 0..ru {
                *j.at_mut(i, jcol) = into_u.at(i, jcol).clone();
            }
            for i in 0..rv {
                *j.at_mut(ru + i, jcol) = -into_v.at(i, jcol).clone();
            }
        }
        j_maps.push(j);
        let su = in_basis(&complex_sum.bases[k], &pres_u.degrees[k].basis)
            .ok_or(HomologyError::Internal("U in sum"))?;
        let sv = in_basis(&complex_sum.bases[k], &pres_v.degrees[k].basis)
            .ok_or(HomologyError::Internal("V in sum"))?;
        q_maps.push(su.hstack(&sv));
        let ix = in_basis(&pres_x.degrees[k].basis, &complex_sum.bases[k])
            .ok_or(HomologyError::Internal("sum in X"))?;
        iota_maps.push(ix);
    }

    let h_a = homology_data(&complex_a);
    let h_b = homology_data(&complex_b);
    let h_sum = homology_data(&complex_sum);
    let h_x = homology_data(&complex_x);

    // induced maps on homology
    let mut jh = Vec::new();
    let mut qh = Vec::new();
    let mut ih = Vec::new();
    for k in 0..=max_dim {
        jh.push(induced_on_homology(&h_a[k].0, &j_maps[k], &h_b[k].0));
        qh.push(induced_on_homology(&h_b[k].0, &q_maps[k], &h_sum[k].0));
        ih.push(induced_on_homology(&h_sum[k].0, &iota_maps[k], &h_x[k].0));
    }
    // connecting maps ∂*: H_k(SUM) → H_{k−1}(A) by the zig-zag
    let mut connecting = Vec::new();
    for k in 0..=max_dim {
        if k == 0 {
            connecting.push(IMat::zero(0, h_sum[0].1.ngens));
            continue;
        }
        let z_sum = &h_sum[k].0;
        let d_full = engine.boundary_matrix(level, k)?;
        let buv_prev = &pres_uv.degrees[k - 1].basis;
        let z_a_prev = &h_a[k - 1].0;
        let split_basis = pres_u.degrees[k].basis.hstack(&pres_v.degrees[k].basis);
        let ru = pres_u.degrees[k].basis.cols;
        let split_solver = Solver::new(&split_basis);
        let uv_solver = Solver::new(buv_prev);
        let cycle_solver = Solver::new(z_a_prev);
        let mut m = IMat::zero(z_a_prev.cols, z_sum.cols);
        for j in 0..z_sum.cols {
            let z_ambient = complex_sum.bases[k].mul_vec(&z_sum.col(j));
            // split z = α + β with α ∈ I^U, β ∈ I^V
            let split = split_solver
                .solve(&z_ambient)
                .ok_or(HomologyError::Internal("SES split"))?;
            let alpha_coords: Vec<BigInt> = split[..ru].to_vec();
            let alpha_ambient = pres_u.degrees[k].basis.mul_vec(&alpha_coords);
            let boundary_alpha = d_full.mul_vec(&alpha_ambient);
            // ∂α lies in I^{U∩V}
            let in_uv_coords = uv_solver
                .solve(&boundary_alpha)
                .ok_or(HomologyError::Internal("connecting image"))?;
            let cycle_coords = cycle_solver
                .solve(&in_uv_coords)
                .ok_or(HomologyError::Internal("connecting cycle"))?;
            for i in 0..z_a_prev.cols {
                *m.at_mut(i, j) = cycle_coords[i].clone();
            }
        }
        connecting.push(m);
    }

    // exactness at every node of
    //   … → H_k(A) → H_k(B) → H_k(SUM) → H_{k−1}(A) → …
    let mut nodes = Vec::new();
    for k in 0..=max_dim {
        nodes.push(MvNode {
            degree: k,
            node: "B",
            pass: exact_at(&jh[k], &h_b[k].1.rels, &qh[k], &h_sum[k].1.rels),
        });
        if k >= 1 {
            nodes.push(MvNode {
                degree: k,
                node: "C",
                pass: exact_at(&qh[k], &h_sum[k].1.rels, &connecting[k], &h_a[k - 1].1.rels),
            });
            nodes.push(MvNode {
                degree: k - 1,
                node: "A",
                pass: exact_at(
                    &connecting[k],
                    &h_a[k - 1].1.rels,
                    &jh[k - 1],
                    &h_b[k - 1].1.rels,
                ),
            });
        }
    }
    // the ends: H_top(A) injects, and q is onto H_0(SUM) since ∂₀ = 0
    {
        let k = max_dim;
        let zero_in = IMat::zero(h_a[k].1.ngens, 0);
        nodes.push(MvNode {
            degree: k,
            node: "A",
            pass: exact_at(&zero_in, &h_a[k].1.rels, &jh[k], &h_b[k].1.rels),
        });
        let onto = lattice_eq(
            &qh[0].hstack(&h_sum[0].1.rels),
            &IMat::identity(h_sum[0].1.ngens),
        );
        nodes.push(MvNode {
            degree: 0,
            node: "C",
            pass: onto,
        });
    }

    // ι*: H(SUM) ≅ H(X): the sum subcomplex computes the global homology
    let mut union_iso_pass = true;
    for k in 0..=max_dim {
        let inj = lattice_eq(
            &preimage_lattice(&ih[k], &h_x[k].1.rels),
            &lattice_canonical(&h_sum[k].1.rels),
        ) || h_sum[k].1.ngens == 0;
        let surj = lattice_eq(
            &ih[k].hstack(&h_x[k].1.rels),
            &IMat::identity(h_x[k].1.ngens),
        );
        if !(inj && surj) {
            union_iso_pass = false;
        }
    }

    let pass = ses_pass && union_iso_pass && nodes.iter().all(|n| n.pass);
    Ok(MvReport {
        ses_pass,
        nodes,
        union_iso_pass,
        pass,
    })
}

fn validate_carrier(
    engine: &mut Engine,
    carrier: &[Simplex],
    name: &str,
) -> Result<(), HomologyError> {
    if carrier.is_empty() {
        return Err(HomologyError::CoverNotOpen(format!("{name} is empty")));
    }
    let complex = engine.sub.session.real.complex();
    for s in carrier {
        if complex.simplex_index(s).is_none() {
            return Err(HomologyError::CoverNotOpen(format!(
                "{name} names unknown simplex {:?}",
                s.0
            )));
        }
        for f in s.faces() {
            if !carrier.contains(&f) {
                return Err(HomologyError::CoverNotOpen(format!(
                    "{name} is not face-closed at {:?}",
                    f.0
                )));
            }
        }
    }
    Ok(())
}

/// Cells whose open star misses the carrier entirely: no face in the
/// carrier. Their union is the closed complement of the open star union.
fn star_complement(engine: &mut Engine, carrier: &[Simplex]) -> Vec<usize> {
    let complex = engine.sub.session.real.complex();
    (0..complex.simplexes().len())
        .filter(|&c| {
            let s = complex.simplex(c);
            !carrier.iter().any(|f| f.is_face_of(s))
        })
        .collect()
}

/// The generator's image avoids the closed complement iff none of its open
/// carrier pieces sits on one of the complement's cells.
fn gen_in_open(session: &mut Session, g: GenId, complement: &[usize]) -> bool {
    let pieces = session.carrier_pieces(g);
    pieces
        .iter()
        .all(|p| !p.meets_open || !complement.contains(&p.cell))
}

// --- pushforward along stratified simplicial maps ---------------------------

/// Simplicial map data: a vertex map whose cell images are cells.
#[derive(Clone, Debug)]
pub struct SimplicialMap {
    pub vertex_map: HashMap<VertexId, VertexId>,
}

/// Validate that the vertex map is simplicial and stratified (the pullback
/// of each stratum is a union of strata of no smaller codimension), then
/// return the stratum correspondence.
pub fn validate_stratified(
    src: &Realization,
    dst: &Realization,
    map: &SimplicialMap,
) -> Result<HashMap<usize, usize>, HomologyError> {
    let mut image_cell: Vec<usize> = Vec::new();
    for s in src.complex().simplexes() {
        let image: Option<Vec<VertexId>> =
            s.0.iter().map(|v| map.vertex_map.get(v).copied()).collect();
        let image =
            image.ok_or_else(|| HomologyError::NotStratified("vertex map misses a vertex".into()))?;
        let cell = Simplex::new(image);
        let idx = dst.complex().simplex_index(&cell).ok_or_else(|| {
            HomologyError::NotStratified(format!("image {:?} is not a cell", cell.0))
        })?;
        image_cell.push(idx);
    }
    let mut correspondence = HashMap::new();
    for st in src.strata() {
        let mut targets: Vec<usize> = st
            .simplexes
            .iter()
            .map(|&c| dst.stratum_of_cell(image_cell[c]).id)
            .collect();
        targets.sort_unstable();
        targets.dedup();
        if targets.len() != 1 {
            return Err(HomologyError::NotStratified(format!(
                "stratum {} maps into several strata",
                st.id
            )));
        }
        let target = &dst.strata()[targets[0]];
        if target.codim > st.codim {
            return Err(HomologyError::NotStratified(format!(
                "stratum {} raises codimension",
                st.id
            )));
        }
        correspondence.insert(st.id, target.id);
    }
    Ok(correspondence)
}

/// Push a chain forward along a validated stratified simplicial map:
/// point-wise affine application on each generator tuple.
pub fn pushforward(
    src: &mut Session,
    dst: &mut Session,
    map: &SimplicialMap,
    xi: &Chain,
) -> Result<Chain, HomologyError> {
    let mut out = Chain::zero(xi.degree);
    let terms: Vec<(GenId, i64)> = xi.terms.iter().map(|(&g, &c)| (g, c)).collect();
    for (g, coeff) in terms {
        let points = src.gen_points(g);
        let mut image_tuple = Vec::new();
        let mut image_host: Option<usize> = None;
        for p in &points {
            let cell = match src.gen_host(g) {
                Some(h) if src.real.cell_geo(h).contains(p) => h,
                _ => (0..src.real.complex().simplexes().len())
                    .find(|&c| src.real.cell_geo(c).contains(p))
                    .ok_or(HomologyError::Internal("point outside the complex"))?,
            };
            let geo = src.real.cell_geo(cell);
            let bary = geo.barycentric_coords(p).expect("point in cell");
            let verts = src.real.complex().simplex(cell).0.clone();
            let image_cell = Simplex::new(verts.iter().map(|v| map.vertex_map[v]).collect());
            let image_idx = dst
                .real
                .complex()
                .simplex_index(&image_cell)
                .ok_or(HomologyError::NotStratified("image cell missing".into()))?;
            image_host = Some(image_idx);
            let mut q = vec![linalg::rat_i(0); dst.real.ambient()];
            for (lambda, v) in bary.iter().zip(verts.iter()) {
                let target = dst.real.coords()[&map.vertex_map[v]].clone();
                q = linalg::add(&q, &linalg::scale(&target, lambda));
            }
            image_tuple.push(q);
        }
        let tuple: Vec<u32> = image_tuple
            .into_iter()
            .map(|p| dst.intern_point(p))
            .collect();
        let mapped = dst.intern_gen(tuple, image_host);
        out.add_term(mapped, coeff);
    }
    Ok(out)
}

// --- prism decomposition ------------------------------------------------------

/// The alternating prism chain on `Δ × [0,1]` over a base tuple:
/// `P = Σ (−1)^j [a_0, …, a_j, b_j, …, b_m]` with `a_i = (y_i, 0)`,
/// `b_i = (y_i, 1)`. Satisfies `∂P = (top − bottom) − P(∂σ)` exactly.
pub fn prism_chain(session: &mut Session, base_points: &[Point]) -> Chain {
    let m = base_points.len() - 1;
    let mut out = Chain::zero(m + 1);
    for j in 0..=m {
        let mut tuple: Vec<u32> = Vec::new();
        for p in &base_points[..=j] {
            let mut q = p.clone();
            q.push(linalg::rat_i(0));
            tuple.push(session.intern_point(q));
        }
        for p in &base_points[j..] {
            let mut q = p.clone();
            q.push(linalg::rat_i(1));
            tuple.push(session.intern_point(q));
        }
        let g = session.intern_gen(tuple, None);
        out.add_term(g, if j % 2 == 0 { 1 } else { -1 });
    }
    out
}

/// Lift a base tuple to height `t ∈ {0, 1}` as a generator of the product
/// session.
pub fn lifted_generator(session: &mut Session, base_points: &[Point], t: i64) -> GenId {
    let tuple: Vec<u32> = base_points
        .iter()
        .map(|p| {
            let mut q = p.clone();
            q.push(linalg::rat_i(t));
            session.intern_point(q)
        })
        .collect();
    session.intern_gen(tuple, None)
}

// --- main theorem comparison ---------------------------------------------------

#[derive(Clone, Debug)]
pub struct CompareReport {
    pub poly_levels: Vec<HomologyResult>,
    pub gm_levels: Vec<HomologyResult>,
    pub stabilized_at: Option<usize>,
    pub agree: bool,
    pub no_stabilization: bool,
}

/// Compute homology in both notions at increasing subdivision levels, find
/// the first level where two consecutive levels agree for both notions, and
/// compare the stabilized results across notions.
pub fn main_theorem_compare(
    engine: &mut Engine,
    perversity: &Perversity,
    max_level: usize,
    ring: Ring,
) -> Result<CompareReport, HomologyError> {
    let mut poly_levels = Vec::new();
    let mut gm_levels = Vec::new();
    let mut stabilized_at = None;
    for r in 0..=max_level {
        poly_levels.push(engine.homology(perversity, Notion::Poly, r, ring)?);
        gm_levels.push(engine.homology(perversity, Notion::Gm, r, ring)?);
        if r >= 1
            && stabilized_at.is_none()
            && poly_levels[r - 1] == poly_levels[r]
            && gm_levels[r - 1] == gm_levels[r]
        {
            stabilized_at = Some(r - 1);
            break;
        }
    }
    let agree = match stabilized_at {
        Some(r) => poly_levels[r] == gm_levels[r],
        None => false,
    };
    Ok(CompareReport {
        poly_levels,
        gm_levels,
        stabilized_at,
        agree,
        no_stabilization: stabilized_at.is_none(),
    })
}
