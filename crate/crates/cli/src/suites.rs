//! Named verification suites over a corpus directory: the cone formula,
//! Mayer–Vietoris exactness, subdivision identities, the two-notion
//! comparison, and the geometric genericity/stability statistics.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use ih_core::allowability::{Chain, LinearSimplex, Notion, Realization};
use ih_core::extint::ExtInt;
use ih_core::filtered::{Perversity, Simplex};
use ih_core::geometry::{sample_pseudobarycentre, strong_general_position, GeoSimplex};
use ih_core::homology::{cone_formula_check, main_theorem_compare, mayer_vietoris_check, Engine, Ring};
use ih_core::linalg::{dist2, rat};

use crate::document::ComplexDocument;
use crate::report::{Record, RunReport};

pub fn load_corpus(dir: &Path) -> Result<Vec<(String, ComplexDocument, Realization)>> {
    let mut out = Vec::new();
    let mut entries: Vec<_> = std::fs::read_dir(dir)
        .with_context(|| format!("corpus directory {dir:?}"))?
        .collect::<std::io::Result<Vec<_>>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        if path.extension().map_or(true, |e| e != "json") {
            continue;
        }
        let text = std::fs::read_to_string(&path)?;
        let doc = ComplexDocument::parse(&text)
            .with_context(|| format!("parsing {path:?}"))?;
        let real = doc
            .realize()
            .with_context(|| format!("validating {path:?}"))?;
        out.push((doc.name.clone(), doc, real));
    }
    if out.is_empty() {
        bail!("no corpus documents found in {dir:?}");
    }
    Ok(out)
}

fn standard_perversities(real: &Realization) -> Vec<(&'static str, Perversity)> {
    let strata = real.strata();
    vec![
        ("zero", Perversity::zero(strata)),
        ("lower-middle", Perversity::lower_middle(strata)),
        ("top", Perversity::top(strata)),
        ("minus-one", Perversity::constant(strata, ExtInt::Fin(-1))),
    ]
}

pub fn suite_cone(corpus: &[(String, ComplexDocument, Realization)], seed: u64, report: &mut RunReport) -> Result<()> {
    for (name, _, real) in corpus {
        // cone every base; double-cone the small two-dimensional ones
        let mut bases = vec![(name.clone(), real.clone())];
        if real.complex().formal_dim() <= 1 {
            bases.push((format!("cone_{name}"), real.cone().0));
        }
        for (bname, base) in bases {
            let strata = base.strata().to_vec();
            let p = Perversity::zero(&strata);
            let n1 = base.complex().formal_dim() + 1;
            for dual in [-2i64, -1, 0, 1] {
                let apex_value = ExtInt::Fin(n1 - 2 - dual);
                for notion in [Notion::Poly, Notion::Gm] {
                    let r = cone_formula_check(&base, &p, apex_value, notion, 0, Ring::Z, seed)?;
                    report.push(Record::Check {
                        suite: "cone".into(),
                        item: format!("{bname} dual={dual} notion={}", notion.tag()),
                        status: if r.pass { "pass" } else { "fail" }.into(),
                        detail: json!({
                            "lines": r.lines.iter().map(|l| json!({
                                "degree": l.degree,
                                "expected_betti": l.expected.betti,
                                "got_betti": l.got.betti,
                                "pass": l.pass,
                            })).collect::<Vec<_>>(),
                        }),
                    });
                }
            }
        }
    }
    Ok(())
}

pub fn suite_mv(corpus: &[(String, ComplexDocument, Realization)], seed: u64, report: &mut RunReport) -> Result<()> {
    for (name, _, real) in corpus {
        // only desk-sized instances join the exactness sweep
        if real.complex().simplexes().len() > 40 {
            continue;
        }
        let star_vertex = real.complex().vertices()[0];
        let u = vec![Simplex::new(vec![star_vertex])];
        let v: Vec<Simplex> = real
            .complex()
            .simplexes()
            .iter()
            .filter(|s| !s.0.contains(&star_vertex))
            .cloned()
            .collect();
        if v.is_empty() {
            continue;
        }
        let mut engine = Engine::new(real.clone(), seed);
        for (pname, p) in standard_perversities(real).into_iter().take(3) {
            for notion in [Notion::Poly, Notion::Gm] {
                let r = mayer_vietoris_check(&mut engine, &u, &v, &p, notion, 1)?;
                report.push(Record::Check {
                    suite: "mv".into(),
                    item: format!("{name} perversity={pname} notion={}", notion.tag()),
                    status: if r.pass { "pass" } else { "fail" }.into(),
                    detail: json!({
                        "ses": r.ses_pass,
                        "union_iso": r.union_iso_pass,
                        "nodes": r.nodes.iter().filter(|n| !n.pass).count(),
                    }),
                });
            }
        }
    }
    Ok(())
}

pub fn suite_subdivision(
    corpus: &[(String, ComplexDocument, Realization)],
    seed: u64,
    report: &mut RunReport,
) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, _, real) in corpus {
        if real.complex().simplexes().len() > 40 {
            continue;
        }
        let mut engine = Engine::new(real.clone(), seed);
        let level0 = engine.level(0)?.clone();
        let max_dim = level0.len() - 1;
        // homotopy identity on random chains
        let mut identity_ok = true;
        for _ in 0..25 {
            let degree = rng.gen_range(1..=max_dim.max(1));
            let gens = &level0[degree];
            let mut xi = Chain::zero(degree);
            for _ in 0..rng.gen_range(1..=3) {
                xi.add_term(gens[rng.gen_range(0..gens.len())], rng.gen_range(-3i64..=3));
            }
            let sd = engine.sub.sd_chain(&xi)?;
            let t_xi = engine.sub.t_chain(&xi)?;
            let b_xi = xi.boundary(&mut engine.sub.session);
            let t_b = engine.sub.t_chain(&b_xi)?;
            let mut lhs = xi.clone();
            lhs.add_scaled(&sd, -1);
            let mut rhs = t_xi.boundary(&mut engine.sub.session);
            rhs.add_scaled(&t_b, 1);
            if lhs != rhs {
                identity_ok = false;
            }
        }
        report.push(Record::Check {
            suite: "subdivision".into(),
            item: format!("{name} homotopy-identity"),
            status: if identity_ok { "pass" } else { "fail" }.into(),
            detail: json!({"chains": 25}),
        });
        // diameter bound on every built system
        let mut diam_ok = true;
        for g in engine.sub.built_systems() {
            let l = engine.sub.session.gen_dim(g);
            if l == 0 {
                continue;
            }
            let delta = GeoSimplex::standard(l);
            let bound = rat(2 * l as i64, 2 * l as i64 + 1);
            let cap = bound.clone() * bound * delta.diam2();
            let sys = engine.sub.system(g).clone();
            for cell in &sys.cells {
                for a in 0..cell.verts.len() {
                    for b in a + 1..cell.verts.len() {
                        if dist2(&cell.verts[a], &cell.verts[b]) > cap {
                            diam_ok = false;
                        }
                    }
                }
            }
        }
        report.push(Record::Check {
            suite: "subdivision".into(),
            item: format!("{name} diameter-bound"),
            status: if diam_ok { "pass" } else { "fail" }.into(),
            detail: json!({"systems": engine.sub.built_systems().len()}),
        });
        // sd preserves allowability for the standard perversities
        let mut allow_ok = true;
        for (_, p) in standard_perversities(real) {
            for &g in level0.iter().flatten() {
                if !engine
                    .sub
                    .session
                    .is_allowable(LinearSimplex(g), &p, Notion::Poly)
                {
                    continue;
                }
                let degree = engine.sub.session.gen_dim(g);
                let sd = engine.sub.sd_chain(&Chain::generator(degree, g))?;
                for &cell in sd.terms.keys() {
                    if !engine
                        .sub
                        .session
                        .is_allowable(LinearSimplex(cell), &p, Notion::Poly)
                    {
                        allow_ok = false;
                    }
                }
            }
        }
        report.push(Record::Check {
            suite: "subdivision".into(),
            item: format!("{name} allowability-preservation"),
            status: if allow_ok { "pass" } else { "fail" }.into(),
            detail: json!({}),
        });
    }
    Ok(())
}

pub fn suite_compare(
    corpus: &[(String, ComplexDocument, Realization)],
    seed: u64,
    report: &mut RunReport,
) -> Result<()> {
    for (name, _, real) in corpus {
        let mut engine = Engine::new(real.clone(), seed);
        for (pname, p) in standard_perversities(real) {
            let r = main_theorem_compare(&mut engine, &p, 2, Ring::Z)?;
            let pass = !r.no_stabilization && r.agree;
            let table: Vec<_> = r
                .poly_levels
                .iter()
                .zip(r.gm_levels.iter())
                .enumerate()
                .map(|(level, (hp, hg))| {
                    json!({
                        "level": level,
                        "poly_betti": hp.groups.iter().map(|g| g.betti).collect::<Vec<_>>(),
                        "gm_betti": hg.groups.iter().map(|g| g.betti).collect::<Vec<_>>(),
                    })
                })
                .collect();
            report.push(Record::Check {
                suite: "compare".into(),
                item: format!("{name} perversity={pname}"),
                status: if pass { "pass" } else { "fail" }.into(),
                detail: json!({
                    "stabilized_at": r.stabilized_at,
                    "levels": table,
                }),
            });
        }
    }
    Ok(())
}

pub fn suite_geometry(seed: u64, report: &mut RunReport) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0usize;
    let mut stable = 0usize;
    let total = 100usize;
    let mut attempted = 0usize;
    for trial in 0..total {
        let l = if trial % 2 == 0 { 2 } else { 3 };
        let delta = GeoSimplex::standard(l);
        let t = match random_subsimplex(&delta, rng.gen_range(0..l), &mut rng) {
            Some(s) => s,
            None => continue,
        };
        let facet: Vec<usize> = (0..=l).filter(|&i| i != (trial % (l + 1))).collect();
        let face = delta.face(&facet);
        let v = match random_subsimplex(&face, rng.gen_range(0..l.min(2)), &mut rng) {
            Some(s) => s,
            None => continue,
        };
        attempted += 1;
        let choice = match sample_pseudobarycentre(
            &delta,
            std::slice::from_ref(&v),
            std::slice::from_ref(&t),
            &[],
            seed.wrapping_add(trial as u64),
            10_000,
        ) {
            Ok(c) => c,
            Err(_) => continue,
        };
        successes += 1;
        let mut radius2 = delta.diam2() / ih_core::linalg::rat_i(1 << 20);
        for _ in 0..40 {
            let mut all_ok = true;
            for _ in 0..50 {
                let omega = perturb(&delta, &choice.point, &radius2, &mut rng);
                if !delta.relint_contains(&omega)
                    || !strong_general_position(&omega, &t, Some(&v), &delta)
                {
                    all_ok = false;
                    break;
                }
            }
            if all_ok {
                stable += 1;
                break;
            }
            radius2 = radius2 / ih_core::linalg::rat_i(4);
        }
    }
    let pass = successes * 100 >= attempted * 99 && stable == successes;
    report.push(Record::Check {
        suite: "geometry".into(),
        item: "genericity-stability".into(),
        status: if pass { "pass" } else { "fail" }.into(),
        detail: json!({
            "instances": attempted,
            "successes": successes,
            "stable": stable,
        }),
    });
    Ok(())
}

fn random_subsimplex(
    delta: &GeoSimplex,
    dim: usize,
    rng: &mut ChaCha8Rng,
) -> Option<GeoSimplex> {
    use ih_core::geometry::{Point, Rat};
    use num_bigint::BigInt;
    for _ in 0..50 {
        let pts: Vec<Point> = (0..=dim)
            .map(|_| {
                let n = delta.verts().len();
                let weights: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=12)).collect();
                let total: i64 = weights.iter().sum::<i64>().max(1);
                let mut p = vec![Rat::new(BigInt::from(0), BigInt::from(1)); delta.ambient()];
                for (w, vert) in weights.iter().zip(delta.verts()) {
                    for (pi, vi) in p.iter_mut().zip(vert.iter()) {
                        *pi += Rat::new(BigInt::from(*w), BigInt::from(total)) * vi.clone();
                    }
                }
                p
            })
            .collect();
        if let Ok(s) = GeoSimplex::new(pts) {
            return Some(s);
        }
    }
    None
}

fn perturb(
    delta: &GeoSimplex,
    u: &[ih_core::geometry::Rat],
    radius2: &ih_core::geometry::Rat,
    rng: &mut ChaCha8Rng,
) -> Vec<ih_core::geometry::Rat> {
    use ih_core::geometry::ratsqrt_lower;
    use ih_core::linalg::{norm2, rat_i};
    let b = delta.barycentre();
    let mut w = vec![rat(0, 1); delta.ambient()];
    for v in delta.verts() {
        let c = rat(rng.gen_range(-8i64..=8), 17);
        for (wi, (vi, bi)) in w.iter_mut().zip(v.iter().zip(b.iter())) {
            *wi += c.clone() * (vi.clone() - bi.clone());
        }
    }
    let n2 = norm2(&w);
    if n2 == rat(0, 1) {
        return u.to_vec();
    }
    let scale = ratsqrt_lower(&(radius2.clone() / (rat_i(4) * n2)));
    u.iter()
        .zip(w.iter())
        .map(|(ui, wi)| ui.clone() + scale.clone() * wi.clone())
        .collect()
}

/// Digest of all corpus documents, for report metadata.
pub fn corpus_digest(corpus: &[(String, ComplexDocument, Realization)]) -> String {
    let mut map = BTreeMap::new();
    for (name, doc, _) in corpus {
        map.insert(name.clone(), doc.to_json());
    }
    crate::report::digest(&serde_json::to_string(&map).unwrap())
}
