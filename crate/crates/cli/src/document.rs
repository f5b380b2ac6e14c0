//! On-disk complex documents: exact rational vertex coordinates as "p/q"
//! strings, simplex lists, filtration (per-simplex or per-vertex), formal
//! dimension and optional named perversities. Canonical serialization is
//! idempotent: parse ∘ serialize = id on canonical documents, and no
//! floating point appears anywhere.

use std::collections::{BTreeMap, HashMap};

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use ih_core::allowability::Realization;
use ih_core::extint::ExtInt;
use ih_core::filtered::{FilteredComplex, Perversity, Simplex, Stratum};

pub const FORMAT: &str = "ih-complex/1";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct ComplexDocument {
    pub format: String,
    pub name: String,
    pub vertices: Vec<VertexEntry>,
    pub simplexes: Vec<Vec<u32>>,
    pub filtration: FiltrationSpec,
    pub formal_dim: i64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub perversities: BTreeMap<String, PerversitySpec>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct VertexEntry {
    pub id: u32,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case")]
pub enum FiltrationSpec {
    PerSimplex(Vec<SimplexValue>),
    PerVertex(BTreeMap<String, i64>),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SimplexValue {
    pub simplex: Vec<u32>,
    pub value: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PerversitySpec {
    Constant { value: String },
    Codimensional { values: BTreeMap<String, String> },
    GmPreset { preset: String },
    PerStratum { values: BTreeMap<String, String> },
}

/// Parse "p/q" (or "p") into an exact rational; zero denominators are a
/// parse error.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = num
        .parse()
        .with_context(|| format!("bad rational numerator {num:?}"))?;
    let d: BigInt = den
        .parse()
        .with_context(|| format!("bad rational denominator {den:?}"))?;
    if d == BigInt::from(0) {
        bail!("zero denominator in rational {s:?}");
    }
    Ok(BigRational::new(n, d))
}

pub fn rational_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_extint(s: &str) -> Result<ExtInt> {
    match s.trim() {
        "+inf" | "inf" => Ok(ExtInt::PosInf),
        "-inf" => Ok(ExtInt::NegInf),
        other => Ok(ExtInt::Fin(
            other.parse().with_context(|| format!("bad value {other:?}"))?,
        )),
    }
}

impl ComplexDocument {
    pub fn parse(text: &str) -> Result<Self> {
        let doc: ComplexDocument = serde_json::from_str(text)?;
        if doc.format != FORMAT {
            bail!("unsupported format {:?}", doc.format);
        }
        Ok(doc)
    }

    /// Build the realized complex, validating every invariant on the way.
    pub fn realize(&self) -> Result<Realization> {
        let raw: Vec<Simplex> = self
            .simplexes
            .iter()
            .map(|v| Simplex::new(v.clone()))
            .collect();
        let complex = match &self.filtration {
            FiltrationSpec::PerSimplex(entries) => {
                let values: HashMap<Simplex, i64> = entries
                    .iter()
                    .map(|e| (Simplex::new(e.simplex.clone()), e.value))
                    .collect();
                FilteredComplex::build(
                    &raw,
                    &|s: &Simplex| values.get(s).copied(),
                    self.formal_dim,
                )
            }
            FiltrationSpec::PerVertex(map) => {
                let mut values: HashMap<u32, i64> = HashMap::new();
                for (k, v) in map {
                    let id: u32 = k.parse().map_err(|_| anyhow!("bad vertex id {k:?}"))?;
                    values.insert(id, *v);
                }
                FilteredComplex::build_per_vertex(&raw, &values, self.formal_dim)
            }
        }
        .map_err(|e| anyhow!("invalid complex: {e}"))?;
        let mut coords = HashMap::new();
        let ambient = self
            .vertices
            .first()
            .map(|v| v.coords.len())
            .unwrap_or_default();
        for v in &self.vertices {
            if v.coords.len() != ambient {
                bail!("vertex {} has mismatched ambient dimension", v.id);
            }
            let p: Result<Vec<BigRational>> =
                v.coords.iter().map(|s| parse_rational(s)).collect();
            coords.insert(v.id, p?);
        }
        Realization::new(complex, coords).map_err(|e| anyhow!("invalid realization: {e}"))
    }

    /// Canonical form: sorted vertices and simplexes, reduced rationals,
    /// per-simplex filtration covering the full face closure.
    pub fn canonical(&self) -> Result<ComplexDocument> {
        let real = self.realize()?;
        let complex = real.complex();
        let mut vertices: Vec<VertexEntry> = real
            .coords()
            .iter()
            .map(|(id, p)| VertexEntry {
                id: *id,
                coords: p.iter().map(rational_string).collect(),
            })
            .collect();
        vertices.sort_by_key(|v| v.id);
        let simplexes: Vec<Vec<u32>> = complex.simplexes().iter().map(|s| s.0.clone()).collect();
        let filtration = FiltrationSpec::PerSimplex(
            complex
                .simplexes()
                .iter()
                .enumerate()
                .map(|(i, s)| SimplexValue {
                    simplex: s.0.clone(),
                    value: complex.filtration_value(i),
                })
                .collect(),
        );
        Ok(ComplexDocument {
            format: FORMAT.to_string(),
            name: self.name.clone(),
            vertices,
            simplexes,
            filtration,
            formal_dim: self.formal_dim,
            perversities: self.perversities.clone(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    /// Canonical document for a realized complex.
    pub fn from_realization(name: &str, real: &Realization) -> ComplexDocument {
        let complex = real.complex();
        let mut vertices: Vec<VertexEntry> = real
            .coords()
            .iter()
            .map(|(id, p)| VertexEntry {
                id: *id,
                coords: p.iter().map(rational_string).collect(),
            })
            .collect();
        vertices.sort_by_key(|v| v.id);
        ComplexDocument {
            format: FORMAT.to_string(),
            name: name.to_string(),
            vertices,
            simplexes: complex.simplexes().iter().map(|s| s.0.clone()).collect(),
            filtration: FiltrationSpec::PerSimplex(
                complex
                    .simplexes()
                    .iter()
                    .enumerate()
                    .map(|(i, s)| SimplexValue {
                        simplex: s.0.clone(),
                        value: complex.filtration_value(i),
                    })
                    .collect(),
            ),
            formal_dim: complex.formal_dim(),
            perversities: BTreeMap::new(),
        }
    }
}

/// Resolve a perversity specification string against the strata of a
/// complex. Accepted forms: `zero`/`0`, `top`/`t`, `m`/`lower-middle`,
/// `const:<v>`, `c<codim>:<v>,...`, `s<stratum-name>:<v>,...`, or the name
/// of a perversity defined in the document.
pub fn resolve_perversity(
    spec: &str,
    real: &Realization,
    doc: Option<&ComplexDocument>,
) -> Result<Perversity> {
    let strata = real.strata();
    match spec {
        "zero" | "0" => return Ok(Perversity::zero(strata)),
        "top" | "t" => return Ok(Perversity::top(strata)),
        "m" | "lower-middle" => return Ok(Perversity::lower_middle(strata)),
        _ => {}
    }
    if let Some(doc) = doc {
        if let Some(named) = doc.perversities.get(spec) {
            return perversity_from_spec(named, strata, real);
        }
    }
    if let Some(v) = spec.strip_prefix("const:") {
        let value = parse_extint(v)?;
        return Ok(Perversity::constant(strata, value));
    }
    if spec.starts_with('c') {
        let mut by_codim: BTreeMap<i64, ExtInt> = BTreeMap::new();
        for part in spec.split(',') {
            let part = part.trim();
            let rest = part
                .strip_prefix('c')
                .ok_or_else(|| anyhow!("bad codimensional entry {part:?}"))?;
            let (codim, value) = rest
                .split_once(':')
                .ok_or_else(|| anyhow!("bad codimensional entry {part:?}"))?;
            by_codim.insert(codim.parse()?, parse_extint(value)?);
        }
        for s in strata.iter().filter(|s| !s.regular) {
            if !by_codim.contains_key(&s.codim) {
                bail!("perversity misses codimension {}", s.codim);
            }
        }
        return Ok(Perversity::codimensional(strata, &|c| by_codim[&c]));
    }
    if spec.starts_with('s') {
        let mut values: BTreeMap<usize, ExtInt> = BTreeMap::new();
        for part in spec.split(',') {
            let part = part.trim();
            let rest = part
                .strip_prefix('s')
                .ok_or_else(|| anyhow!("bad stratum entry {part:?}"))?;
            let (name, value) = rest
                .split_once(':')
                .ok_or_else(|| anyhow!("bad stratum entry {part:?}"))?;
            let stratum = find_stratum(real, name)?;
            values.insert(stratum, parse_extint(value)?);
        }
        return Perversity::from_values(strata, &values).map_err(|e| anyhow!(e));
    }
    bail!("unrecognized perversity specification {spec:?}")
}

fn perversity_from_spec(
    spec: &PerversitySpec,
    strata: &[Stratum],
    real: &Realization,
) -> Result<Perversity> {
    match spec {
        PerversitySpec::Constant { value } => {
            Ok(Perversity::constant(strata, parse_extint(value)?))
        }
        PerversitySpec::GmPreset { preset } => match preset.as_str() {
            "zero" | "0" => Ok(Perversity::zero(strata)),
            "top" | "t" => Ok(Perversity::top(strata)),
            "m" | "lower-middle" => Ok(Perversity::lower_middle(strata)),
            other => bail!("unknown preset {other:?}"),
        },
        PerversitySpec::Codimensional { values } => {
            let mut by_codim: BTreeMap<i64, ExtInt> = BTreeMap::new();
            for (k, v) in values {
                by_codim.insert(k.parse()?, parse_extint(v)?);
            }
            for s in strata.iter().filter(|s| !s.regular) {
                if !by_codim.contains_key(&s.codim) {
                    bail!("perversity misses codimension {}", s.codim);
                }
            }
            Ok(Perversity::codimensional(strata, &|c| by_codim[&c]))
        }
        PerversitySpec::PerStratum { values } => {
            let mut resolved: BTreeMap<usize, ExtInt> = BTreeMap::new();
            for (name, v) in values {
                resolved.insert(find_stratum(real, name)?, parse_extint(v)?);
            }
            Perversity::from_values(strata, &resolved).map_err(|e| anyhow!(e))
        }
    }
}

fn find_stratum(real: &Realization, name: &str) -> Result<usize> {
    real.strata()
        .iter()
        .find(|s| s.name(real.complex()) == name)
        .map(|s| s.id)
        .ok_or_else(|| anyhow!("perversity names unknown stratum {name:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("3/4").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_rational("5").unwrap(), BigRational::from_integer(5.into()));
        assert!(parse_rational("3/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn canonical_round_trip() {
        let real = ih_core::corpus::circle();
        let doc = ComplexDocument::from_realization("circle", &real);
        let canon = doc.canonical().unwrap();
        let text = canon.to_json();
        let parsed = ComplexDocument::parse(&text).unwrap();
        assert_eq!(parsed, canon);
        // idempotence of canonicalization
        assert_eq!(parsed.canonical().unwrap(), canon);
    }

    #[test]
    fn perversity_resolution() {
        let real = ih_core::corpus::pinched_disk();
        let strata_count = real.strata().len();
        assert!(strata_count >= 2);
        for spec in ["zero", "top", "m", "const:-1", "c2:1"] {
            resolve_perversity(spec, &real, None).unwrap();
        }
        assert!(resolve_perversity("sUNKNOWN:1", &real, None).is_err());
        // per-stratum naming
        let singular = real
            .strata()
            .iter()
            .find(|s| !s.regular)
            .unwrap()
            .name(real.complex());
        let spec = format!("s{}:1", &singular[1..]);
        let _ = spec; // stratum names already start with 'd'
        let full = format!("s{singular}:1");
        resolve_perversity(&full, &real, None).unwrap();
    }
}
