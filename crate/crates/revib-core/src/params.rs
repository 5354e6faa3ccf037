//! Named parameter store with gradient accumulators and checkpoint I/O.
//!
//! Initialization of each parameter is a pure function of
//! `(store seed, parameter name, shape)`, so registration order never
//! affects values. Checkpoints are a single JSON document with a version
//! tag, the init seed, and every tensor by name.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::tape::{Gradients, Tape, Var};
use crate::tensor::Tensor;

/// How to fill a freshly registered parameter.
#[derive(Debug, Clone, Copy)]
pub enum Init {
    /// Uniform in `[-1/√fan_in, +1/√fan_in]`.
    UniformFanIn { fan_in: usize },
    Zeros,
    Ones,
}

/// Named parameters plus per-parameter gradient accumulators.
#[derive(Debug, Clone)]
pub struct ParamStore {
    seed: u64,
    params: BTreeMap<String, Tensor>,
    grads: BTreeMap<String, Tensor>,
}

impl ParamStore {
    pub fn new(seed: u64) -> Self {
        ParamStore {
            seed,
            params: BTreeMap::new(),
            grads: BTreeMap::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Register a parameter. Idempotent for the same name/shape.
    pub fn register(&mut self, name: &str, shape: &[usize], init: Init) {
        if let Some(existing) = self.params.get(name) {
            assert_eq!(
                existing.shape(),
                shape,
                "parameter {name} re-registered with a different shape"
            );
            return;
        }
        let value = match init {
            Init::Zeros => Tensor::zeros(shape),
            Init::Ones => Tensor::ones(shape),
            Init::UniformFanIn { fan_in } => {
                let bound = 1.0 / (fan_in.max(1) as f64).sqrt();
                let mut rng = rng::rng_from(rng::subseed(self.seed, name, 0));
                rng::uniform_symmetric(&mut rng, shape, bound)
            }
        };
        self.grads.insert(name.to_string(), Tensor::zeros(shape));
        self.params.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> &Tensor {
        self.params
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))
    }

    pub fn set(&mut self, name: &str, value: Tensor) {
        let slot = self
            .params
            .get_mut(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"));
        assert_eq!(slot.shape(), value.shape(), "shape change for {name}");
        *slot = value;
    }

    pub fn grad(&self, name: &str) -> &Tensor {
        self.grads
            .get(name)
            .unwrap_or_else(|| panic!("unknown parameter {name}"))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.params.keys().map(|s| s.as_str())
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn n_values(&self) -> usize {
        self.params.values().map(|t| t.len()).sum()
    }

    /// Put every parameter on a tape as a leaf; returns the name → var map.
    pub fn bind(&self, tape: &mut Tape) -> Bound {
        let mut vars = BTreeMap::new();
        for (name, value) in &self.params {
            vars.insert(name.clone(), tape.leaf(value.clone()));
        }
        Bound { vars }
    }

    /// Add `scale ×` the tape gradients of every bound parameter into the
    /// accumulators. Parameters the loss never reached contribute zero.
    pub fn accumulate_grads(&mut self, grads: &Gradients, bound: &Bound, scale: f64) {
        for (name, var) in &bound.vars {
            if let Some(g) = grads.try_get(*var) {
                let acc = self.grads.get_mut(name).expect("grad slot");
                for (a, d) in acc.data_mut().iter_mut().zip(g.data()) {
                    *a += scale * d;
                }
            }
        }
    }

    pub fn zero_grads(&mut self) {
        for g in self.grads.values_mut() {
            g.data_mut().fill(0.0);
        }
    }

    /// Iterate `(name, param, grad)` in name order.
    pub fn iter_with_grads(&mut self) -> impl Iterator<Item = (&str, &mut Tensor, &Tensor)> {
        let grads = &self.grads;
        self.params.iter_mut().map(move |(name, p)| {
            let g = grads.get(name).expect("grad slot");
            (name.as_str(), p, g)
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = CheckpointFile {
            version: CHECKPOINT_VERSION,
            seed: self.seed,
            params: self
                .params
                .iter()
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect(),
        };
        let json = serde_json::to_string(&file)?;
        std::fs::write(path, json).map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        let file: CheckpointFile = serde_json::from_str(&text)?;
        if file.version != CHECKPOINT_VERSION {
            return Err(Error::Config(format!(
                "checkpoint version {} unsupported (expected {})",
                file.version, CHECKPOINT_VERSION
            )));
        }
        let grads = file
            .params
            .iter()
            .map(|(k, v)| (k.clone(), Tensor::zeros(v.shape())))
            .collect();
        Ok(ParamStore {
            seed: file.seed,
            params: file.params,
            grads,
        })
    }
}

const CHECKPOINT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct CheckpointFile {
    version: u32,
    seed: u64,
    params: BTreeMap<String, Tensor>,
}

/// Tape handles for every parameter of a store, one forward pass worth.
pub struct Bound {
    vars: BTreeMap<String, Var>,
}

impl Bound {
    pub fn var(&self, name: &str) -> Var {
        *self
            .vars
            .get(name)
            .unwrap_or_else(|| panic!("parameter {name} not bound"))
    }
}
