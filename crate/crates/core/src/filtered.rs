//! Finite filtered simplicial complexes, their strata, and the perversity
//! algebra.
//!
//! A complex stores abstract simplexes (sorted vertex-id tuples) together
//! with a filtration value per simplex: the index of the smallest closed set
//! `X_i` containing it. Strata are connected components of `X_i ∖ X_{i−1}`,
//! computed combinatorially: two simplexes with filtration value `i` belong
//! to the same stratum iff a face/coface chain connects them without leaving
//! value `i`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use thiserror::Error;

use crate::extint::ExtInt;

pub type VertexId = u32;

/// Abstract simplex: strictly increasing vertex ids.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex(pub Vec<VertexId>);

impl Simplex {
    pub fn new(mut verts: Vec<VertexId>) -> Self {
        verts.sort_unstable();
        verts.dedup();
        Simplex(verts)
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn faces(&self) -> Vec<Simplex> {
        if self.0.len() == 1 {
            return Vec::new();
        }
        (0..self.0.len())
            .map(|i| {
                let mut v = self.0.clone();
                v.remove(i);
                Simplex(v)
            })
            .collect()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.0.iter().all(|v| other.0.binary_search(v).is_ok())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexError {
    #[error("filtration level {level} is not face-closed: {simplex:?} has face {face:?} above it")]
    NonClosedFiltration {
        level: i64,
        simplex: Vec<VertexId>,
        face: Vec<VertexId>,
    },
    #[error("empty regular part: X_{{n-1}} = X_n")]
    EmptyRegularPart,
    #[error("filtration value {value} outside [0, {formal_dim}]")]
    FiltrationOutOfRange { value: i64, formal_dim: i64 },
    #[error("formal dimension {formal_dim} below geometric dimension {geometric}")]
    FormalDimTooSmall { formal_dim: i64, geometric: i64 },
}

/// A finite filtered simplicial complex.
#[derive(Clone, Debug)]
pub struct FilteredComplex {
    /// All simplexes in deterministic (lexicographic) order, face-closed.
    simplexes: Vec<Simplex>,
    index: HashMap<Simplex, usize>,
    filtration: Vec<i64>,
    formal_dim: i64,
}

/// One stratum: a connected component of `X_i ∖ X_{i−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stratum {
    pub id: usize,
    pub dim: i64,
    pub codim: i64,
    pub simplexes: Vec<usize>,
    pub regular: bool,
}

impl Stratum {
    /// Deterministic name used by perversity specifications and reports.
    pub fn name(&self, complex: &FilteredComplex) -> String {
        let least = self
            .simplexes
            .iter()
            .map(|&i| complex.simplex(i))
            .min()
            .expect("nonempty stratum");
        let ids: Vec<String> = least.0.iter().map(|v| v.to_string()).collect();
        format!("d{}.{}", self.dim, ids.join("-"))
    }
}

impl FilteredComplex {
    /// Build a complex from raw simplexes and a per-simplex filtration.
    /// Faces missing from the input are added with the minimum filtration
    /// value of their cofaces (the smallest `X_i` already containing them).
    pub fn build(
        raw: &[Simplex],
        filtration: &dyn Fn(&Simplex) -> Option<i64>,
        formal_dim: i64,
    ) -> Result<Self, ComplexError> {
        assert!(formal_dim >= 0);
        // face closure
        let mut all: BTreeSet<Simplex> = BTreeSet::new();
        let mut queue: Vec<Simplex> = raw.to_vec();
        while let Some(s) = queue.pop() {
            if all.insert(s.clone()) {
                queue.extend(s.faces());
            }
        }
        let simplexes: Vec<Simplex> = all.into_iter().collect();
        let index: HashMap<Simplex, usize> = simplexes
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i))
            .collect();
        let geometric = simplexes.iter().map(|s| s.dim() as i64).max().unwrap_or(0);
        if geometric > formal_dim {
            return Err(ComplexError::FormalDimTooSmall {
                formal_dim,
                geometric,
            });
        }
        // assign filtration: explicit values first, then propagate to faces
        let mut values: Vec<Option<i64>> = vec![None; simplexes.len()];
        for (i, s) in simplexes.iter().enumerate() {
            if let Some(v) = filtration(s) {
                if v < 0 || v > formal_dim {
                    return Err(ComplexError::FiltrationOutOfRange {
                        value: v,
                        formal_dim,
                    });
                }
                values[i] = Some(v);
            }
        }
        // unassigned simplexes inherit the min over direct cofaces, top-down
        let mut order: Vec<usize> = (0..simplexes.len()).collect();
        order.sort_by_key(|&i| std::cmp::Reverse(simplexes[i].dim()));
        for &i in &order {
            if values[i].is_some() {
                continue;
            }
            let mut best: Option<i64> = None;
            for (j, t) in simplexes.iter().enumerate() {
                if t.dim() == simplexes[i].dim() + 1 && simplexes[i].is_face_of(t) {
                    if let Some(v) = values[j] {
                        best = Some(best.map_or(v, |b: i64| b.min(v)));
                    }
                }
            }
            values[i] = Some(best.unwrap_or(formal_dim));
        }
        let filtration_values: Vec<i64> = values.into_iter().map(|v| v.unwrap()).collect();

        let complex = FilteredComplex {
            simplexes,
            index,
            filtration: filtration_values,
            formal_dim,
        };
        complex.validate()?;
        Ok(complex)
    }

    /// Convenience form: per-vertex filtration, each simplex taking the max
    /// over its vertices. Validated exactly like the per-simplex form.
    pub fn build_per_vertex(
        raw: &[Simplex],
        vertex_values: &HashMap<VertexId, i64>,
        formal_dim: i64,
    ) -> Result<Self, ComplexError> {
        Self::build(
            raw,
            &|s: &Simplex| {
                s.0.iter()
                    .map(|v| vertex_values.get(v).copied())
                    .collect::<Option<Vec<i64>>>()
                    .map(|vs| vs.into_iter().max().unwrap())
            },
            formal_dim,
        )
    }

    fn validate(&self) -> Result<(), ComplexError> {
        // every X_i face-closed ⟺ filtration monotone under faces
        for (i, s) in self.simplexes.iter().enumerate() {
            for f in s.faces() {
                let fi = self.index[&f];
                if self.filtration[fi] > self.filtration[i] {
                    return Err(ComplexError::NonClosedFiltration {
                        level: self.filtration[i],
                        simplex: s.0.clone(),
                        face: f.0.clone(),
                    });
                }
            }
        }
        if !self.filtration.iter().any(|&v| v == self.formal_dim) {
            return Err(ComplexError::EmptyRegularPart);
        }
        Ok(())
    }

    pub fn simplexes(&self) -> &[Simplex] {
        &self.simplexes
    }

    pub fn simplex(&self, i: usize) -> &Simplex {
        &self.simplexes[i]
    }

    pub fn simplex_index(&self, s: &Simplex) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn filtration_value(&self, i: usize) -> i64 {
        self.filtration[i]
    }

    pub fn formal_dim(&self) -> i64 {
        self.formal_dim
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .simplexes
            .iter()
            .filter(|s| s.0.len() == 1)
            .map(|s| s.0[0])
            .collect();
        out.sort_unstable();
        out
    }

    /// Strata as connected components of constant-filtration face/coface
    /// chains. Ordering is deterministic: by dimension, then by least
    /// simplex.
    pub fn compute_strata(&self) -> Vec<Stratum> {
        let n = self.simplexes.len();
        let mut comp: Vec<Option<usize>> = vec![None; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for start in 0..n {
            if comp[start].is_some() {
                continue;
            }
            let id = comps.len();
            let value = self.filtration[start];
            let mut stack = vec![start];
            let mut members = Vec::new();
            comp[start] = Some(id);
            while let Some(cur) = stack.pop() {
                members.push(cur);
                for other in 0..n {
                    if comp[other].is_some() || self.filtration[other] != value {
                        continue;
                    }
                    let a = &self.simplexes[cur];
                    let b = &self.simplexes[other];
                    if a.is_face_of(b) || b.is_face_of(a) {
                        comp[other] = Some(id);
                        stack.push(other);
                    }
                }
            }
            members.sort_unstable();
            comps.push(members);
        }
        let mut strata: Vec<Stratum> = comps
            .into_iter()
            .map(|members| {
                let dim = self.filtration[members[0]];
                Stratum {
                    id: 0,
                    dim,
                    codim: self.formal_dim - dim,
                    simplexes: members,
                    regular: dim == self.formal_dim,
                }
            })
            .collect();
        strata.sort_by(|a, b| {
            (a.dim, &self.simplexes[a.simplexes[0]]).cmp(&(b.dim, &self.simplexes[b.simplexes[0]]))
        });
        for (i, s) in strata.iter_mut().enumerate() {
            s.id = i;
        }
        strata
    }

    /// Simplicial cone: a fresh apex joined to every simplex, with the
    /// conical filtration (apex at 0, everything else shifted up by one).
    pub fn cone(&self) -> (FilteredComplex, VertexId) {
        let apex: VertexId = self.vertices().iter().max().map_or(0, |m| m + 1);
        let mut raw: Vec<Simplex> = Vec::new();
        let mut values: HashMap<Simplex, i64> = HashMap::new();
        values.insert(Simplex(vec![apex]), 0);
        raw.push(Simplex(vec![apex]));
        for (i, s) in self.simplexes.iter().enumerate() {
            raw.push(s.clone());
            values.insert(s.clone(), self.filtration[i] + 1);
            let mut coned = s.0.clone();
            coned.push(apex);
            let coned = Simplex::new(coned);
            values.insert(coned.clone(), self.filtration[i] + 1);
            raw.push(coned);
        }
        let cone = FilteredComplex::build(
            &raw,
            &|s: &Simplex| values.get(s).copied(),
            self.formal_dim + 1,
        )
        .expect("coning preserves validity");
        (cone, apex)
    }
}

/// How a perversity was specified; the per-stratum values are what matters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PerversityKind {
    General,
    Codimensional,
    Gm,
}

/// A perversity: extended-integer values per stratum, zero on regular strata.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Perversity {
    pub values: BTreeMap<usize, ExtInt>,
    pub kind: PerversityKind,
}

impl Perversity {
    /// Constant perversity `k̄` on the singular strata.
    pub fn constant(strata: &[Stratum], k: ExtInt) -> Self {
        let values = strata
            .iter()
            .map(|s| (s.id, if s.regular { ExtInt::Fin(0) } else { k }))
            .collect();
        Perversity {
            values,
            kind: PerversityKind::Codimensional,
        }
    }

    pub fn zero(strata: &[Stratum]) -> Self {
        Self::constant(strata, ExtInt::Fin(0))
    }

    /// Top perversity `t̄(S) = codim S − 2`.
    pub fn top(strata: &[Stratum]) -> Self {
        Self::codimensional(strata, &|c| ExtInt::Fin(c - 2))
    }

    /// Lower middle GM perversity `m̄(c) = ⌊(c − 2)/2⌋`.
    pub fn lower_middle(strata: &[Stratum]) -> Self {
        let mut p = Self::codimensional(strata, &|c| ExtInt::Fin((c - 2).div_euclid(2)));
        p.kind = PerversityKind::Gm;
        p
    }

    /// Perversity from a function of the codimension.
    pub fn codimensional(strata: &[Stratum], f: &dyn Fn(i64) -> ExtInt) -> Self {
        let values = strata
            .iter()
            .map(|s| {
                (
                    s.id,
                    if s.regular { ExtInt::Fin(0) } else { f(s.codim) },
                )
            })
            .collect();
        Perversity {
            values,
            kind: PerversityKind::Codimensional,
        }
    }

    pub fn from_values(
        strata: &[Stratum],
        singular_values: &BTreeMap<usize, ExtInt>,
    ) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for s in strata {
            if s.regular {
                values.insert(s.id, ExtInt::Fin(0));
            } else {
                let v = singular_values
                    .get(&s.id)
                    .copied()
                    .ok_or_else(|| format!("no value for singular stratum {}", s.id))?;
                values.insert(s.id, v);
            }
        }
        for id in singular_values.keys() {
            if !strata.iter().any(|s| s.id == *id && !s.regular) {
                return Err(format!("perversity names unknown singular stratum {id}"));
            }
        }
        Ok(Perversity {
            values,
            kind: PerversityKind::General,
        })
    }

    pub fn value(&self, stratum: &Stratum) -> ExtInt {
        self.values[&stratum.id]
    }

    /// Dual perversity `Dp̄ = t̄ − p̄`, with saturating extended arithmetic
    /// (`t̄ − (+∞) = −∞`, `t̄ − (−∞) = +∞`) and zero on regular strata.
    pub fn dual(&self, strata: &[Stratum]) -> Perversity {
        let values = strata
            .iter()
            .map(|s| {
                let v = if s.regular {
                    ExtInt::Fin(0)
                } else {
                    ExtInt::Fin(s.codim - 2).sub(self.values[&s.id])
                };
                (s.id, v)
            })
            .collect();
        Perversity {
            values,
            kind: self.kind.clone(),
        }
    }

    /// GM-perversity growth condition: `p̄(2) = 0`,
    /// `p̄(c) ≤ p̄(c+1) ≤ p̄(c) + 1`. Only meaningful for codimensional data.
    pub fn is_gm_growth(values_by_codim: &BTreeMap<i64, i64>) -> bool {
        if values_by_codim.get(&2).map_or(false, |&v| v != 0) {
            return false;
        }
        let mut prev: Option<(i64, i64)> = None;
        for (&c, &v) in values_by_codim {
            if let Some((pc, pv)) = prev {
                if c == pc + 1 && !(pv <= v && v <= pv + 1) {
                    return false;
                }
            }
            prev = Some((c, v));
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sx(v: &[u32]) -> Simplex {
        Simplex::new(v.to_vec())
    }

    /// Independent stratification oracle: brute-force transitive closure of
    /// the "adjacent at equal filtration value" relation.
    fn strata_oracle(c: &FilteredComplex) -> Vec<BTreeSet<usize>> {
        let n = c.simplexes().len();
        let mut adj = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                if c.filtration_value(i) == c.filtration_value(j)
                    && (c.simplex(i).is_face_of(c.simplex(j))
                        || c.simplex(j).is_face_of(c.simplex(i)))
                {
                    adj[i][j] = true;
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    if adj[i][k] && adj[k][j] {
                        adj[i][j] = true;
                    }
                }
            }
        }
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for i in 0..n {
            if seen[i] {
                continue;
            }
            let cls: BTreeSet<usize> = (0..n).filter(|&j| adj[i][j]).collect();
            for &j in &cls {
                seen[j] = true;
            }
            out.push(cls);
        }
        out
    }

    fn assert_matches_oracle(c: &FilteredComplex) {
        let strata = c.compute_strata();
        let got: BTreeSet<BTreeSet<usize>> = strata
            .iter()
            .map(|s| s.simplexes.iter().copied().collect())
            .collect();
        let want: BTreeSet<BTreeSet<usize>> = strata_oracle(c).into_iter().collect();
        assert_eq!(got, want);
        // partition property
        let total: usize = strata.iter().map(|s| s.simplexes.len()).sum();
        assert_eq!(total, c.simplexes().len());
    }

    #[test]
    fn unfiltered_full_simplex() {
        let c = FilteredComplex::build(&[sx(&[0, 1, 2])], &|_| Some(2), 2).unwrap();
        assert_eq!(c.simplexes().len(), 7);
        let strata = c.compute_strata();
        assert_eq!(strata.len(), 1);
        assert!(strata[0].regular);
        assert_matches_oracle(&c);
    }

    #[test]
    fn cone_over_two_points_strata() {
        // apex 0 at filtration 0, the rest at 1
        let c = FilteredComplex::build(
            &[sx(&[0, 1]), sx(&[0, 2])],
            &|s| Some(if s.0 == vec![0] { 0 } else { 1 }),
            1,
        )
        .unwrap();
        let strata = c.compute_strata();
        assert_eq!(strata.len(), 3);
        let singular: Vec<_> = strata.iter().filter(|s| !s.regular).collect();
        assert_eq!(singular.len(), 1);
        assert_eq!(singular[0].simplexes.len(), 1);
        // the two regular strata are the half-open edges with their endpoint
        let regular: Vec<_> = strata.iter().filter(|s| s.regular).collect();
        assert_eq!(regular.len(), 2);
        for r in regular {
            assert_eq!(r.simplexes.len(), 2);
        }
        assert_matches_oracle(&c);
    }

    #[test]
    fn non_closed_filtration_rejected() {
        // edge at level 1 whose vertex is pushed above it
        let err = FilteredComplex::build(
            &[sx(&[0, 1])],
            &|s| {
                Some(match s.0.as_slice() {
                    [0] => 2,
                    _ => 1,
                })
            },
            2,
        )
        .unwrap_err();
        assert!(matches!(err, ComplexError::NonClosedFiltration { .. }));
    }

    #[test]
    fn empty_regular_part_rejected() {
        let err = FilteredComplex::build(&[sx(&[0, 1])], &|_| Some(0), 1).unwrap_err();
        assert_eq!(err, ComplexError::EmptyRegularPart);
    }

    #[test]
    fn formal_dim_below_geometric_rejected() {
        let err = FilteredComplex::build(&[sx(&[0, 1, 2])], &|_| Some(1), 1).unwrap_err();
        assert!(matches!(err, ComplexError::FormalDimTooSmall { .. }));
    }

    #[test]
    fn two_singular_vertices_make_two_strata() {
        let c = FilteredComplex::build(
            &[sx(&[0, 1]), sx(&[2, 3])],
            &|s| {
                Some(match s.0.as_slice() {
                    [0] | [2] => 0,
                    _ => 1,
                })
            },
            1,
        )
        .unwrap();
        let singular: Vec<_> = c
            .compute_strata()
            .into_iter()
            .filter(|s| !s.regular)
            .collect();
        assert_eq!(singular.len(), 2);
        assert_matches_oracle(&c);
    }

    #[test]
    fn suspension_of_four_points() {
        // apexes 0 and 1 at filtration 0, points 2..=5 joined to both
        let raw: Vec<Simplex> = (2..=5u32)
            .flat_map(|p| vec![sx(&[0, p]), sx(&[1, p])])
            .collect();
        let c = FilteredComplex::build(
            &raw,
            &|s| Some(if s.0 == vec![0] || s.0 == vec![1] { 0 } else { 1 }),
            1,
        )
        .unwrap();
        let strata = c.compute_strata();
        let singular = strata.iter().filter(|s| !s.regular).count();
        let regular = strata.iter().filter(|s| s.regular).count();
        assert_eq!((singular, regular), (2, 4));
        assert_matches_oracle(&c);
    }

    #[test]
    fn dual_perversity_laws() {
        let c = FilteredComplex::build(
            &[sx(&[0, 1, 2])],
            &|s| Some(if s.0 == vec![0] { 0 } else { 2 }),
            2,
        )
        .unwrap();
        let strata = c.compute_strata();
        let sing: Vec<_> = strata.iter().filter(|s| !s.regular).collect();
        assert_eq!(sing[0].codim, 2);
        // p̄ = 0̄ on a codim-2 stratum → Dp̄ = 0
        let zero = Perversity::zero(&strata);
        assert_eq!(zero.dual(&strata).value(sing[0]), ExtInt::Fin(0));
        // p̄ = t̄ → Dp̄ = 0̄
        let top = Perversity::top(&strata);
        let dtop = top.dual(&strata);
        for s in &strata {
            assert_eq!(dtop.value(s), ExtInt::Fin(0));
        }
        // +∞ dualizes to −∞ (extended arithmetic)
        let inf = Perversity::constant(&strata, ExtInt::PosInf);
        assert_eq!(inf.dual(&strata).value(sing[0]), ExtInt::NegInf);
        // involution on finite values
        for k in -3..=3 {
            let p = Perversity::constant(&strata, ExtInt::Fin(k));
            assert_eq!(p.dual(&strata).dual(&strata), p);
        }
    }

    #[test]
    fn cone_complex_shapes() {
        // cone over a point: an edge with apex filtration 0
        let point = FilteredComplex::build(&[sx(&[0])], &|_| Some(0), 0).unwrap();
        let (cone, apex) = point.cone();
        assert_eq!(cone.formal_dim(), 1);
        assert_eq!(
            cone.filtration_value(cone.simplex_index(&sx(&[apex])).unwrap()),
            0
        );
        assert_eq!(cone.simplexes().len(), 3);

        // cone over S^1: disk with a central singular vertex
        let circle =
            FilteredComplex::build(&[sx(&[0, 1]), sx(&[1, 2]), sx(&[0, 2])], &|_| Some(1), 1)
                .unwrap();
        let (disk, _) = circle.cone();
        let strata = disk.compute_strata();
        let singular: Vec<_> = strata.iter().filter(|s| !s.regular).collect();
        assert_eq!(singular.len(), 1);
        assert_eq!(singular[0].simplexes.len(), 1);
        assert_eq!(singular[0].codim, 2);

        // cone over cone over point: apex stratum of codimension 2
        let (cc, apex2) = point.cone().0.cone();
        let strata2 = cc.compute_strata();
        let apex_stratum = strata2
            .iter()
            .find(|s| s.simplexes.iter().any(|&i| cc.simplex(i).0 == vec![apex2]))
            .unwrap();
        assert_eq!(apex_stratum.codim, 2);

        // strata of the cone: the apex plus one per stratum of the base
        let base_strata = circle.compute_strata();
        assert_eq!(strata.len(), base_strata.len() + 1);
    }
}
