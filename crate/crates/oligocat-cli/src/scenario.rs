use std::path::Path;

use serde::Deserialize;

use oligocat::group::{transitive_gsets, GSet, PermGroup};
use oligocat::regcat::{FinGSetCat, LabeledSet, OpFinSetCat};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: Option<String>,
    pub category: CategorySpec,
    #[serde(default)]
    pub ring: Option<RingName>,
    #[serde(default)]
    pub degree: Option<DegreeName>,
    #[serde(default)]
    pub measure: Option<MeasureName>,
    #[serde(default)]
    pub bounds: Bounds,
    #[serde(default)]
    pub object: Option<String>,
    #[serde(default)]
    pub object2: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CategorySpec {
    Gset { group: GroupSpec },
    Opfinset,
}

/// `{"degree": n, "generators": [[cycle, ...], ...]}` in cycle notation.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupSpec {
    pub degree: usize,
    #[serde(default)]
    pub generators: Vec<Vec<Vec<usize>>>,
}

/// `{"points": m, "action": [images per generator]}`.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GSetSpec {
    pub points: usize,
    #[serde(default)]
    pub action: Vec<Vec<usize>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Bounds {
    pub max_points: Option<usize>,
    pub max_elements: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum RingName {
    Rational,
    PolyT,
    Gf2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DegreeName {
    Trivial,
    TPower,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasureName {
    Derived,
    Alpha,
    Beta,
    Gf2AllOnes,
}

pub enum Instance {
    GSet(FinGSetCat),
    OpFinSet(OpFinSetCat),
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("malformed scenario {}: {e}", path.display()))
    }

    pub fn instance(&self) -> Result<Instance, String> {
        match &self.category {
            CategorySpec::Gset { group } => {
                if group.degree == 0 {
                    return Err("group degree must be positive".into());
                }
                let g = PermGroup::from_cycle_generators(group.degree, &group.generators).map_err(|e| e.to_string())?;
                Ok(Instance::GSet(FinGSetCat::new(g)))
            }
            CategorySpec::Opfinset => Ok(Instance::OpFinSet(OpFinSetCat::new())),
        }
    }

    pub fn ring(&self) -> RingName {
        self.ring.unwrap_or(match self.category {
            CategorySpec::Gset { .. } => RingName::Rational,
            CategorySpec::Opfinset => RingName::PolyT,
        })
    }

    pub fn degree(&self, ring: RingName) -> DegreeName {
        self.degree.unwrap_or(match (&self.category, ring) {
            (CategorySpec::Opfinset, RingName::PolyT) => DegreeName::TPower,
            _ => DegreeName::Trivial,
        })
    }

    pub fn measure(&self) -> MeasureName {
        self.measure.unwrap_or(MeasureName::Derived)
    }
}

fn parse_count(term: &str) -> Option<usize> {
    let inner = term.strip_prefix('[')?.strip_suffix(']')?;
    inner.trim().parse().ok()
}

/// Objects of the G-set instance: `[n]` (n fixed points), `G` (the regular
/// G-set), `orbit(n)` (the transitive G-set with n points), sums joined by `+`,
/// or a JSON G-set.
pub fn parse_gset(cat: &FinGSetCat, text: &str) -> Result<GSet, String> {
    let text = text.trim();
    if text.starts_with('{') {
        let spec: GSetSpec = serde_json::from_str(text).map_err(|e| format!("malformed G-set: {e}"))?;
        return GSet::new(cat.group(), spec.points, spec.action).map_err(|e| e.to_string());
    }
    let mut out: Option<GSet> = None;
    for term in text.split('+').map(str::trim) {
        let part = if let Some(n) = parse_count(term) {
            cat.points(n)
        } else if term == "G" {
            cat.regular().map_err(|e| e.to_string())?
        } else if let Some(n) = term.strip_prefix("orbit(").and_then(|r| r.strip_suffix(')')) {
            let n: usize = n.trim().parse().map_err(|_| format!("bad orbit size in {term:?}"))?;
            let found: Vec<GSet> = transitive_gsets(cat.group())
                .map_err(|e| e.to_string())?
                .into_iter()
                .filter(|t| t.points() == n)
                .collect();
            match found.len() {
                0 => return Err(format!("no transitive G-set with {n} points")),
                1 => found.into_iter().next().unwrap(),
                k => return Err(format!("{k} transitive G-sets have {n} points; give the object as JSON")),
            }
        } else {
            return Err(format!("cannot parse object term {term:?}"));
        };
        out = Some(match out {
            None => part,
            Some(acc) => acc.disjoint_union(&part),
        });
    }
    out.ok_or_else(|| "empty object".into())
}

/// Objects of the opposite-of-finite-sets instance: `[n]` or `n`.
pub fn parse_set(cat: &OpFinSetCat, text: &str) -> Result<LabeledSet, String> {
    let text = text.trim();
    let n = parse_count(text)
        .or_else(|| text.parse().ok())
        .ok_or_else(|| format!("cannot parse object {text:?}; expected [n]"))?;
    Ok(cat.set(n))
}
