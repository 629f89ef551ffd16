//! JSON interchange for functions, filters, and networks.
//!
//! A space is `{"group": "S3"}` or
//! `{"group": "S3", "quotient": {"kind": "LEFT", "H": ["(12)"]}}` with
//! subgroups given by generator labels (DOUBLE adds `"K"`). Function values
//! are listed in canonical point order, each value a rows x cols matrix of
//! `[re, im]` pairs.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::convolution::{Filter, ProductMode};
use crate::error::{Error, Result};
use crate::gcnn::{LayerSpec, Network, Nonlinearity};
use crate::group::{
    build_group, coset_space, subgroup_from_labels, FiniteGroup, QuotientKind, Space,
    SpaceFunction, Subgroup,
};
use crate::linalg::{CMat, C};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuotientSpec {
    pub kind: QuotientKind,
    #[serde(rename = "H")]
    pub h: Vec<String>,
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k: Option<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceSpec {
    pub group: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub quotient: Option<QuotientSpec>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FunctionSpec {
    pub space: SpaceSpec,
    pub shape: (usize, usize),
    /// Per point, rows x cols of [re, im].
    pub values: Vec<Vec<Vec<[f64; 2]>>>,
}

fn subgroup_from_gen_list(group: &Arc<FiniteGroup>, gens: &[String]) -> Result<Subgroup> {
    subgroup_from_labels(group, &gens.join(","))
}

pub fn space_from_spec(spec: &SpaceSpec) -> Result<Space> {
    let group = build_group(&spec.group)?;
    match &spec.quotient {
        None => Ok(Space::Group(group)),
        Some(q) => {
            let h = subgroup_from_gen_list(&group, &q.h)?;
            let k = match &q.k {
                Some(kgens) => Some(subgroup_from_gen_list(&group, kgens)?),
                None => None,
            };
            Ok(Space::Quotient(coset_space(q.kind, &h, k.as_ref())?))
        }
    }
}

pub fn space_to_spec(space: &Space) -> SpaceSpec {
    match space {
        Space::Group(g) => SpaceSpec {
            group: g.name.clone(),
            quotient: None,
        },
        Space::Quotient(q) => SpaceSpec {
            group: q.group.name.clone(),
            quotient: Some(QuotientSpec {
                kind: q.kind,
                h: vec![subgroup_label_list(&q.h)],
                k: q.k.as_ref().map(|k| vec![subgroup_label_list(k)]),
            }),
        },
    }
}

/// Generators are not stored on subgroups, so round-trips list the full
/// member set (which regenerates the same subgroup).
fn subgroup_label_list(h: &Subgroup) -> String {
    h.members
        .iter()
        .map(|&m| h.parent.label(m).to_string())
        .collect::<Vec<_>>()
        .join(",")
}

pub fn function_to_spec(f: &SpaceFunction) -> FunctionSpec {
    FunctionSpec {
        space: space_to_spec(&f.space),
        shape: f.shape,
        values: f
            .values
            .iter()
            .map(|m| {
                (0..f.shape.0)
                    .map(|i| {
                        (0..f.shape.1)
                            .map(|j| [m[(i, j)].re, m[(i, j)].im])
                            .collect()
                    })
                    .collect()
            })
            .collect(),
    }
}

pub fn function_from_spec(spec: &FunctionSpec) -> Result<SpaceFunction> {
    let space = space_from_spec(&spec.space)?;
    let (rows, cols) = spec.shape;
    if spec.values.len() != space.len() {
        return Err(Error::ShapeMismatch(format!(
            "space has {} points but {} values were given",
            space.len(),
            spec.values.len()
        )));
    }
    let mut values = Vec::with_capacity(spec.values.len());
    for v in &spec.values {
        if v.len() != rows || v.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch(
                "value matrix disagrees with shape".into(),
            ));
        }
        values.push(CMat::from_fn(rows, cols, |i, j| {
            C::new(v[i][j][0], v[i][j][1])
        }));
    }
    SpaceFunction::from_values(space, spec.shape, values)
}

pub fn read_function(path: &str) -> Result<SpaceFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Invalid(format!("cannot read {path}: {e}")))?;
    let spec: FunctionSpec = serde_json::from_str(&text)
        .map_err(|e| Error::Invalid(format!("cannot parse {path}: {e}")))?;
    function_from_spec(&spec)
}

// ---------------------------------------------------------------------------
// Networks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayerJson {
    pub h_prev: Vec<String>,
    pub h_next: Vec<String>,
    pub channels_in: usize,
    pub channels_out: usize,
    pub nonlinearity: Nonlinearity,
    /// Filter values on H_prev\G/H_next in canonical point order, each a
    /// channels_in x channels_out matrix of [re, im]. Omitted values fall
    /// back to a seeded random filter.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub filter: Option<Vec<Vec<Vec<[f64; 2]>>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NetworkJson {
    pub group: String,
    pub layers: Vec<LayerJson>,
}

pub fn network_from_json(spec: &NetworkJson) -> Result<Network> {
    let group = build_group(&spec.group)?;
    let mut layers = Vec::new();
    for (i, l) in spec.layers.iter().enumerate() {
        let h = subgroup_from_gen_list(&group, &l.h_prev)?;
        let k = subgroup_from_gen_list(&group, &l.h_next)?;
        let filter = match (&l.filter, l.seed) {
            (Some(values), _) => {
                let space = coset_space(QuotientKind::Double, &h, Some(&k))?;
                let fspec = FunctionSpec {
                    space: SpaceSpec {
                        group: spec.group.clone(),
                        quotient: None,
                    },
                    shape: (l.channels_in, l.channels_out),
                    values: values.clone(),
                };
                // reuse the value parser, then rebind onto the double space
                if fspec.values.len() != space.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "layer {i}: filter has {} values but {} double cosets",
                        fspec.values.len(),
                        space.len()
                    )));
                }
                let mut values_m = Vec::with_capacity(fspec.values.len());
                for v in &fspec.values {
                    values_m.push(CMat::from_fn(l.channels_in, l.channels_out, |r, c| {
                        C::new(v[r][c][0], v[r][c][1])
                    }));
                }
                let function = SpaceFunction::from_values(
                    Space::Quotient(space),
                    (l.channels_in, l.channels_out),
                    values_m,
                )?;
                Filter::new(function, ProductMode::MatVec)?
            }
            (None, Some(seed)) => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                crate::gcnn::random_filter(&h, &k, l.channels_in, l.channels_out, &mut rng)?
            }
            (None, None) => {
                return Err(Error::Invalid(format!(
                    "layer {i}: provide either filter values or a seed"
                )))
            }
        };
        layers.push(LayerSpec::new(
            filter,
            l.channels_in,
            l.channels_out,
            l.nonlinearity,
        )?);
    }
    let net = Network { group, layers };
    net.validate()?;
    Ok(net)
}

pub fn network_to_json(net: &Network) -> NetworkJson {
    NetworkJson {
        group: net.group.name.clone(),
        layers: net
            .layers
            .iter()
            .map(|l| LayerJson {
                h_prev: vec![subgroup_label_list(&l.h_prev)],
                h_next: vec![subgroup_label_list(&l.h_next)],
                channels_in: l.channels_in,
                channels_out: l.channels_out,
                nonlinearity: l.nonlinearity,
                filter: Some(function_to_spec(&l.filter.function).values),
                seed: None,
            })
            .collect(),
    }
}
