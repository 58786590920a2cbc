//! Flow persistence.
//!
//! A model is a single JSON document:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "d": 2,
//!   "base": "standard_normal",
//!   "layers": [
//!     {
//!       "kind": "rq_spline",
//!       "mask": [true, false],
//!       "spline": {"K": 8, "B": 4.0},
//!       "conditioner": {
//!         "sizes": [1, 32, 32, 23],
//!         "activation": "tanh",
//!         "weights": [...],
//!         "biases": [...]
//!       }
//!     }
//!   ]
//! }
//! ```
//!
//! Affine layers omit the `spline` object. Parameters are serialized with
//! the shortest decimal representation that round-trips `f64` exactly, so
//! save then load reproduces the model bit for bit. Flat parameter order
//! (layer by layer, weights then biases) matches
//! [`FlowModel::param_layout`](super::FlowModel::param_layout).

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Activation, ConditionerMlp, CouplingLayer, FlowError, FlowModel, TransformKind};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("i/o error on flow file: {0}")]
    Io(#[from] std::io::Error),
    #[error("flow file schema error: {0}")]
    Schema(String),
    #[error("unsupported flow schema version {found} (supported: {supported})")]
    UnsupportedVersion { found: u32, supported: u32 },
    #[error("flow file holds an invalid model: {0}")]
    Invalid(#[from] FlowError),
}

#[derive(Serialize, Deserialize)]
struct FlowDoc {
    schema_version: u32,
    d: usize,
    base: String,
    layers: Vec<LayerDoc>,
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    kind: String,
    mask: Vec<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    spline: Option<SplineDoc>,
    conditioner: ConditionerDoc,
}

#[derive(Serialize, Deserialize)]
struct SplineDoc {
    #[serde(rename = "K")]
    k: usize,
    #[serde(rename = "B")]
    b: f64,
}

#[derive(Serialize, Deserialize)]
struct ConditionerDoc {
    sizes: Vec<usize>,
    activation: String,
    weights: Vec<f64>,
    biases: Vec<f64>,
}

fn to_doc(flow: &FlowModel) -> FlowDoc {
    FlowDoc {
        schema_version: SCHEMA_VERSION,
        d: flow.d(),
        base: "standard_normal".to_string(),
        layers: flow
            .layers()
            .iter()
            .map(|layer| {
                let (kind, spline) = match layer.transform {
                    TransformKind::Affine => ("affine".to_string(), None),
                    TransformKind::RqSpline { bins, bound } => (
                        "rq_spline".to_string(),
                        Some(SplineDoc { k: bins, b: bound }),
                    ),
                };
                LayerDoc {
                    kind,
                    mask: layer.mask.clone(),
                    spline,
                    conditioner: ConditionerDoc {
                        sizes: layer.conditioner.sizes.clone(),
                        activation: match layer.conditioner.activation {
                            Activation::Tanh => "tanh".to_string(),
                            Activation::Relu => "relu".to_string(),
                        },
                        weights: layer.conditioner.weights.clone(),
                        biases: layer.conditioner.biases.clone(),
                    },
                }
            })
            .collect(),
    }
}

fn from_doc(doc: FlowDoc) -> Result<FlowModel, PersistError> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(PersistError::UnsupportedVersion {
            found: doc.schema_version,
            supported: SCHEMA_VERSION,
        });
    }
    if doc.base != "standard_normal" {
        return Err(PersistError::Schema(format!(
            "unsupported base distribution `{}`",
            doc.base
        )));
    }
    let layers = doc
        .layers
        .into_iter()
        .enumerate()
        .map(|(i, l)| {
            let transform = match l.kind.as_str() {
                "affine" => TransformKind::Affine,
                "rq_spline" => {
                    let sp = l.spline.ok_or_else(|| {
                        PersistError::Schema(format!("layer {i}: rq_spline requires a `spline` object"))
                    })?;
                    TransformKind::RqSpline {
                        bins: sp.k,
                        bound: sp.b,
                    }
                }
                other => {
                    return Err(PersistError::Schema(format!(
                        "layer {i}: unknown transform kind `{other}`"
                    )))
                }
            };
            let activation = match l.conditioner.activation.as_str() {
                "tanh" => Activation::Tanh,
                "relu" => Activation::Relu,
                other => {
                    return Err(PersistError::Schema(format!(
                        "layer {i}: unknown activation `{other}`"
                    )))
                }
            };
            Ok(CouplingLayer {
                mask: l.mask,
                transform,
                conditioner: ConditionerMlp {
                    sizes: l.conditioner.sizes,
                    activation,
                    weights: l.conditioner.weights,
                    biases: l.conditioner.biases,
                },
            })
        })
        .collect::<Result<Vec<_>, PersistError>>()?;
    Ok(FlowModel::new(doc.d, layers)?)
}

/// Serialize a flow to its JSON document.
pub fn flow_to_json(flow: &FlowModel) -> String {
    serde_json::to_string(&to_doc(flow)).expect("flow serialization cannot fail")
}

/// Parse a flow from its JSON document.
pub fn flow_from_json(json: &str) -> Result<FlowModel, PersistError> {
    let doc: FlowDoc =
        serde_json::from_str(json).map_err(|e| PersistError::Schema(e.to_string()))?;
    from_doc(doc)
}

/// Write a flow to `path`.
pub fn flow_save(flow: &FlowModel, path: &Path) -> Result<(), PersistError> {
    let mut file = std::fs::File::create(path)?;
    file.write_all(flow_to_json(flow).as_bytes())?;
    file.write_all(b"\n")?;
    Ok(())
}

/// Read a flow from `path`.
pub fn flow_load(path: &Path) -> Result<FlowModel, PersistError> {
    let json = std::fs::read_to_string(path)?;
    flow_from_json(&json)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_flow() -> FlowModel {
        let mut flow = FlowModel::coupling_stack(
            3,
            4,
            TransformKind::RqSpline { bins: 5, bound: 3.0 },
            &[7],
            Activation::Relu,
        )
        .unwrap();
        flow.randomize_params(123);
        let mut p = flow.params_flat();
        for (i, v) in p.iter_mut().enumerate() {
            *v += (i as f64 * 0.7612).sin() * 0.3;
        }
        flow.set_params_flat(&p);
        flow
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let flow = sample_flow();
        let loaded = flow_from_json(&flow_to_json(&flow)).unwrap();
        assert_eq!(flow, loaded);
        // and densities agree exactly
        for i in 0..100 {
            let x = vec![(i as f64).sin() * 2.0, (i as f64).cos(), i as f64 * 0.01 - 0.5];
            let a = flow.log_density(&x).unwrap();
            let b = loaded.log_density(&x).unwrap();
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn missing_layers_field_is_a_schema_error() {
        let err = flow_from_json(r#"{"schema_version":1,"d":2,"base":"standard_normal"}"#)
            .unwrap_err();
        match err {
            PersistError::Schema(msg) => assert!(msg.contains("layers"), "{msg}"),
            other => panic!("expected Schema error, got {other:?}"),
        }
    }

    #[test]
    fn version_mismatch_is_reported() {
        let mut json = flow_to_json(&sample_flow());
        json = json.replace("\"schema_version\":1", "\"schema_version\":2");
        match flow_from_json(&json) {
            Err(PersistError::UnsupportedVersion { found: 2, .. }) => {}
            other => panic!("expected UnsupportedVersion, got {other:?}"),
        }
    }

    #[test]
    fn file_round_trip() {
        let dir = std::env::temp_dir().join(format!("flowqmc-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("flow.json");
        let flow = sample_flow();
        flow_save(&flow, &path).unwrap();
        let loaded = flow_load(&path).unwrap();
        assert_eq!(flow, loaded);
        std::fs::remove_dir_all(&dir).ok();
    }
}
