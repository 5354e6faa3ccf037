//! Layer primitives: affine maps, MLPs, layer norm, multi-head attention,
//! and the encoder-decoder Transformer every forecasting head builds on.
//!
//! Layers own parameter *names*; values live in a [`ParamStore`] and are
//! bound onto a [`Tape`] per forward pass, so the same layer object serves
//! training and inference.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{Bound, Init, ParamStore};
use crate::tape::{Tape, Var};
use crate::tensor::Tensor;

pub const LAYER_NORM_EPS: f64 = 1e-5;

/// Width/depth settings for the Transformer backbones.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TransformerConfig {
    /// Feature width `d`.
    pub d: usize,
    pub n_heads: usize,
    pub n_encoder_layers: usize,
    pub n_decoder_layers: usize,
    /// Feed-forward hidden width; 0 means `2 d`.
    pub ffn_width: usize,
}

impl Default for TransformerConfig {
    fn default() -> Self {
        TransformerConfig {
            d: 128,
            n_heads: 8,
            n_encoder_layers: 2,
            n_decoder_layers: 2,
            ffn_width: 0,
        }
    }
}

impl TransformerConfig {
    pub fn ffn(&self) -> usize {
        if self.ffn_width == 0 {
            2 * self.d
        } else {
            self.ffn_width
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.n_heads == 0 || self.n_encoder_layers == 0 || self.n_decoder_layers == 0 {
            return Err(Error::Config("transformer sizes must be >= 1".into()));
        }
        if self.d % self.n_heads != 0 {
            return Err(Error::Config(format!(
                "feature width {} not divisible by {} heads",
                self.d, self.n_heads
            )));
        }
        Ok(())
    }
}

/// `y = x w + b`, broadcast over the rows of `x`.
#[derive(Debug, Clone)]
pub struct Affine {
    w: String,
    b: String,
    pub in_dim: usize,
    pub out_dim: usize,
}

impl Affine {
    pub fn init(store: &mut ParamStore, prefix: &str, in_dim: usize, out_dim: usize) -> Self {
        Self::init_with(store, prefix, in_dim, out_dim, false)
    }

    /// `zero_init` fills both tensors with zeros (used for bias decoders
    /// that must start at the equilibrium output).
    pub fn init_with(
        store: &mut ParamStore,
        prefix: &str,
        in_dim: usize,
        out_dim: usize,
        zero_init: bool,
    ) -> Self {
        let w = format!("{prefix}.w");
        let b = format!("{prefix}.b");
        let init = if zero_init {
            Init::Zeros
        } else {
            Init::UniformFanIn { fan_in: in_dim }
        };
        store.register(&w, &[in_dim, out_dim], init);
        store.register(&b, &[out_dim], if zero_init { Init::Zeros } else { Init::UniformFanIn { fan_in: in_dim } });
        Affine { w, b, in_dim, out_dim }
    }

    pub fn forward(&self, tape: &mut Tape, bound: &Bound, x: Var) -> Result<Var> {
        let got = tape.value(x).shape().to_vec();
        if got.len() != 2 || got[1] != self.in_dim {
            return Err(Error::shape("affine", &got, &[self.in_dim, self.out_dim]));
        }
        let y = tape.matmul(x, bound.var(&self.w))?;
        tape.add_row_broadcast(y, bound.var(&self.b))
    }

    pub fn weight_name(&self) -> &str {
        &self.w
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Relu,
    Tanh,
}

/// Fully connected stack with an activation between layers (not after the
/// last one).
#[derive(Debug, Clone)]
pub struct Mlp {
    layers: Vec<Affine>,
    activation: Activation,
}

impl Mlp {
    /// `dims` is `[in, hidden..., out]`; `zero_init_last` zeroes the final
    /// affine so a fresh network outputs exactly zero.
    pub fn init(
        store: &mut ParamStore,
        prefix: &str,
        dims: &[usize],
        activation: Activation,
        zero_init_last: bool,
    ) -> Self {
        assert!(dims.len() >= 2, "mlp needs at least in/out dims");
        let mut layers = Vec::new();
        for i in 0..dims.len() - 1 {
            let last = i == dims.len() - 2;
            layers.push(Affine::init_with(
                store,
                &format!("{prefix}.{i}"),
                dims[i],
                dims[i + 1],
                zero_init_last && last,
            ));
        }
        Mlp { layers, activation }
    }

    pub fn forward(&self, tape: &mut Tape, bound: &Bound, x: Var) -> Result<Var> {
        let mut h = x;
        for (i, layer) in self.layers.iter().enumerate() {
            h = layer.forward(tape, bound, h)?;
            if i + 1 < self.layers.len() {
                h = match self.activation {
                    Activation::Relu => tape.relu(h),
                    Activation::Tanh => tape.tanh(h),
                };
            }
        }
        Ok(h)
    }
}

#[derive(Debug, Clone)]
pub struct LayerNorm {
    gamma: String,
    beta: String,
}

impl LayerNorm {
    pub fn init(store: &mut ParamStore, prefix: &str, dim: usize) -> Self {
        let gamma = format!("{prefix}.g");
        let beta = format!("{prefix}.b");
        store.register(&gamma, &[dim], Init::Ones);
        store.register(&beta, &[dim], Init::Zeros);
        LayerNorm { gamma, beta }
    }

    pub fn forward(&self, tape: &mut Tape, bound: &Bound, x: Var) -> Result<Var> {
        tape.layer_norm_rows(x, bound.var(&self.gamma), bound.var(&self.beta), LAYER_NORM_EPS)
    }
}

/// Multi-head scaled dot-product attention with input/output projections.
#[derive(Debug, Clone)]
pub struct MultiHeadAttention {
    wq: Affine,
    wk: Affine,
    wv: Affine,
    wo: Affine,
    d: usize,
    n_heads: usize,
}

impl MultiHeadAttention {
    pub fn init(store: &mut ParamStore, prefix: &str, cfg: &TransformerConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(MultiHeadAttention {
            wq: Affine::init(store, &format!("{prefix}.wq"), cfg.d, cfg.d),
            wk: Affine::init(store, &format!("{prefix}.wk"), cfg.d, cfg.d),
            wv: Affine::init(store, &format!("{prefix}.wv"), cfg.d, cfg.d),
            wo: Affine::init(store, &format!("{prefix}.wo"), cfg.d, cfg.d),
            d: cfg.d,
            n_heads: cfg.n_heads,
        })
    }

    pub fn forward(&self, tape: &mut Tape, bound: &Bound, q: Var, k: Var, v: Var) -> Result<Var> {
        Ok(self.forward_with_probs(tape, bound, q, k, v)?.0)
    }

    /// Forward pass that also returns the per-head attention weight nodes
    /// (rows sum to 1); used by tests and diagnostics.
    pub fn forward_with_probs(
        &self,
        tape: &mut Tape,
        bound: &Bound,
        q: Var,
        k: Var,
        v: Var,
    ) -> Result<(Var, Vec<Var>)> {
        for (name, var) in [("q", q), ("k", k), ("v", v)] {
            let shape = tape.value(var).shape();
            if shape.len() != 2 || shape[1] != self.d {
                return Err(Error::shape("multi_head_attention", shape, &[self.d]));
            }
            let _ = name;
        }
        let qp = self.wq.forward(tape, bound, q)?;
        let kp = self.wk.forward(tape, bound, k)?;
        let vp = self.wv.forward(tape, bound, v)?;

        let dh = self.d / self.n_heads;
        let scale = 1.0 / (dh as f64).sqrt();
        let mut heads = Vec::with_capacity(self.n_heads);
        let mut probs = Vec::with_capacity(self.n_heads);
        for h in 0..self.n_heads {
            let (lo, hi) = (h * dh, (h + 1) * dh);
            let qh = tape.slice_cols(qp, lo, hi)?;
            let kh = tape.slice_cols(kp, lo, hi)?;
            let vh = tape.slice_cols(vp, lo, hi)?;
            let kt = tape.transpose(kh);
            let scores = tape.matmul(qh, kt)?;
            let scores = tape.scale(scores, scale);
            let attn = tape.softmax_rows(scores);
            probs.push(attn);
            heads.push(tape.matmul(attn, vh)?);
        }
        let joined = tape.concat_cols(&heads)?;
        Ok((self.wo.forward(tape, bound, joined)?, probs))
    }
}

fn ffn_block(store: &mut ParamStore, prefix: &str, cfg: &TransformerConfig) -> Mlp {
    Mlp::init(
        store,
        prefix,
        &[cfg.d, cfg.ffn(), cfg.d],
        Activation::Relu,
        false,
    )
}

#[derive(Debug, Clone)]
struct EncoderLayer {
    ln1: LayerNorm,
    attn: MultiHeadAttention,
    ln2: LayerNorm,
    ffn: Mlp,
}

#[derive(Debug, Clone)]
struct DecoderLayer {
    ln1: LayerNorm,
    self_attn: MultiHeadAttention,
    ln2: LayerNorm,
    cross_attn: MultiHeadAttention,
    ln3: LayerNorm,
    ffn: Mlp,
}

/// Pre-norm encoder-decoder Transformer.
///
/// The encoder self-attends over a width-`d` source sequence. The decoder
/// input is a spectrum (`Tt × in_dim`), projected to width `d` by one
/// affine layer; its queries cross-attend the encoder output. Sinusoidal
/// positional encodings are added to both inputs. No causal masking: the
/// whole target sequence is presented at once.
#[derive(Debug, Clone)]
pub struct Transformer {
    cfg: TransformerConfig,
    dec_in: Affine,
    encoder: Vec<EncoderLayer>,
    enc_ln: LayerNorm,
    decoder: Vec<DecoderLayer>,
    dec_ln: LayerNorm,
}

impl Transformer {
    /// `dec_in_dim` is the width of the decoder target sequence (spectrum
    /// channel count `M`).
    pub fn init(
        store: &mut ParamStore,
        prefix: &str,
        dec_in_dim: usize,
        cfg: &TransformerConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let mut encoder = Vec::new();
        for i in 0..cfg.n_encoder_layers {
            encoder.push(EncoderLayer {
                ln1: LayerNorm::init(store, &format!("{prefix}.enc.{i}.ln1"), cfg.d),
                attn: MultiHeadAttention::init(store, &format!("{prefix}.enc.{i}.attn"), cfg)?,
                ln2: LayerNorm::init(store, &format!("{prefix}.enc.{i}.ln2"), cfg.d),
                ffn: ffn_block(store, &format!("{prefix}.enc.{i}.ffn"), cfg),
            });
        }
        let mut decoder = Vec::new();
        for i in 0..cfg.n_decoder_layers {
            decoder.push(DecoderLayer {
                ln1: LayerNorm::init(store, &format!("{prefix}.dec.{i}.ln1"), cfg.d),
                self_attn: MultiHeadAttention::init(
                    store,
                    &format!("{prefix}.dec.{i}.self_attn"),
                    cfg,
                )?,
                ln2: LayerNorm::init(store, &format!("{prefix}.dec.{i}.ln2"), cfg.d),
                cross_attn: MultiHeadAttention::init(
                    store,
                    &format!("{prefix}.dec.{i}.cross_attn"),
                    cfg,
                )?,
                ln3: LayerNorm::init(store, &format!("{prefix}.dec.{i}.ln3"), cfg.d),
                ffn: ffn_block(store, &format!("{prefix}.dec.{i}.ffn"), cfg),
            });
        }
        Ok(Transformer {
            cfg: *cfg,
            dec_in: Affine::init(store, &format!("{prefix}.dec_in"), dec_in_dim, cfg.d),
            encoder,
            enc_ln: LayerNorm::init(store, &format!("{prefix}.enc_ln"), cfg.d),
            decoder,
            dec_ln: LayerNorm::init(store, &format!("{prefix}.dec_ln"), cfg.d),
        })
    }

    /// `src`: `Ts × d` source sequence; `tgt`: `Tt × dec_in_dim` target
    /// value sequence. Output: `Tt × d`.
    pub fn forward(&self, tape: &mut Tape, bound: &Bound, src: Var, tgt: Var) -> Result<Var> {
        if !tape.value(src).is_finite() || !tape.value(tgt).is_finite() {
            return Err(Error::NonFinite("transformer input"));
        }
        let memory = self.encode(tape, bound, src)?;
        self.decode(tape, bound, memory, tgt)
    }

    fn encode(&self, tape: &mut Tape, bound: &Bound, src: Var) -> Result<Var> {
        let shape = tape.value(src).shape().to_vec();
        if shape.len() != 2 || shape[1] != self.cfg.d {
            return Err(Error::shape("transformer src", &shape, &[self.cfg.d]));
        }
        let pe = tape.leaf(positional_encoding(shape[0], self.cfg.d));
        let mut x = tape.add(src, pe)?;
        for layer in &self.encoder {
            let n = layer.ln1.forward(tape, bound, x)?;
            let a = layer.attn.forward(tape, bound, n, n, n)?;
            x = tape.add(x, a)?;
            let n = layer.ln2.forward(tape, bound, x)?;
            let f = layer.ffn.forward(tape, bound, n)?;
            x = tape.add(x, f)?;
        }
        self.enc_ln.forward(tape, bound, x)
    }

    fn decode(&self, tape: &mut Tape, bound: &Bound, memory: Var, tgt: Var) -> Result<Var> {
        let projected = self.dec_in.forward(tape, bound, tgt)?;
        let rows = tape.value(projected).rows();
        let pe = tape.leaf(positional_encoding(rows, self.cfg.d));
        let mut x = tape.add(projected, pe)?;
        for layer in &self.decoder {
            let n = layer.ln1.forward(tape, bound, x)?;
            let a = layer.self_attn.forward(tape, bound, n, n, n)?;
            x = tape.add(x, a)?;
            let n = layer.ln2.forward(tape, bound, x)?;
            let a = layer.cross_attn.forward(tape, bound, n, memory, memory)?;
            x = tape.add(x, a)?;
            let n = layer.ln3.forward(tape, bound, x)?;
            let f = layer.ffn.forward(tape, bound, n)?;
            x = tape.add(x, f)?;
        }
        self.dec_ln.forward(tape, bound, x)
    }
}

/// Fixed sinusoidal positional encoding, `len × d`.
pub fn positional_encoding(len: usize, d: usize) -> Tensor {
    let mut t = Tensor::zeros(&[len, d]);
    for pos in 0..len {
        for i in 0..d / 2 {
            let freq = 1.0 / 10000f64.powf(2.0 * i as f64 / d as f64);
            t.set(pos, 2 * i, (pos as f64 * freq).sin());
            t.set(pos, 2 * i + 1, (pos as f64 * freq).cos());
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_cfg() -> TransformerConfig {
        TransformerConfig {
            d: 8,
            n_heads: 2,
            n_encoder_layers: 1,
            n_decoder_layers: 1,
            ffn_width: 16,
        }
    }

    #[test]
    fn affine_zero_input_passes_bias() {
        let mut store = ParamStore::new(1);
        let layer = Affine::init(&mut store, "l", 3, 2);
        store.set("l.b", Tensor::new(vec![2], vec![1.0, 2.0]).unwrap());
        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let x = tape.leaf(Tensor::zeros(&[4, 3]));
        let y = layer.forward(&mut tape, &bound, x).unwrap();
        for r in 0..4 {
            assert_eq!(tape.value(y).row(r), &[1.0, 2.0]);
        }
    }

    #[test]
    fn affine_identity_weights_pass_input() {
        let mut store = ParamStore::new(1);
        let layer = Affine::init(&mut store, "l", 3, 3);
        store.set(
            "l.w",
            Tensor::from_fn(&[3, 3], |i| if i % 4 == 0 { 1.0 } else { 0.0 }),
        );
        store.set("l.b", Tensor::zeros(&[3]));
        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let input = Tensor::from_rows(&[vec![0.5, -1.0, 2.0], vec![3.0, 4.0, 5.0]]);
        let x = tape.leaf(input.clone());
        let y = layer.forward(&mut tape, &bound, x).unwrap();
        assert_eq!(tape.value(y), &input);
    }

    #[test]
    fn affine_shape_error_names_both_shapes() {
        let mut store = ParamStore::new(1);
        let layer = Affine::init(&mut store, "l", 3, 2);
        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let x = tape.leaf(Tensor::zeros(&[4, 5]));
        let err = layer.forward(&mut tape, &bound, x).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[4, 5]") && msg.contains("[3, 2]"), "{msg}");
    }

    #[test]
    fn affine_matches_row_dot_oracle() {
        let mut store = ParamStore::new(5);
        let layer = Affine::init(&mut store, "l", 4, 2);
        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let mut rng = crate::rng::rng_from(42);
        let x = crate::rng::standard_normal(&mut rng, &[3, 4]);
        let xv = tape.leaf(x.clone());
        let y = layer.forward(&mut tape, &bound, xv).unwrap();

        let w = store.get("l.w");
        let b = store.get("l.b");
        for r in 0..3 {
            for c in 0..2 {
                let mut acc = b.data()[c];
                for i in 0..4 {
                    acc += x.at(r, i) * w.at(i, c);
                }
                assert!((tape.value(y).at(r, c) - acc).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn attention_single_key_ignores_query() {
        let cfg = small_cfg();
        let mut store = ParamStore::new(2);
        let mha = MultiHeadAttention::init(&mut store, "a", &cfg).unwrap();
        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let mut rng = crate::rng::rng_from(3);
        let k = tape.leaf(crate::rng::standard_normal(&mut rng, &[1, 8]));
        let v = tape.leaf(crate::rng::standard_normal(&mut rng, &[1, 8]));
        let q1 = tape.leaf(crate::rng::standard_normal(&mut rng, &[2, 8]));
        let q2 = tape.leaf(crate::rng::standard_normal(&mut rng, &[2, 8]));
        let y1 = mha.forward(&mut tape, &bound, q1, k, v).unwrap();
        let y2 = mha.forward(&mut tape, &bound, q2, k, v).unwrap();
        assert!(tape.value(y1).max_abs_diff(tape.value(y2)) < 1e-12);
        // both query rows see the softmax-of-one weight 1
        assert!(tape.value(y1).row(0)
            .iter()
            .zip(tape.value(y1).row(1))
            .all(|(a, b)| (a - b).abs() < 1e-12));
    }

    #[test]
    fn attention_identical_keys_give_identical_outputs() {
        let cfg = small_cfg();
        let mut store = ParamStore::new(4);
        let mha = MultiHeadAttention::init(&mut store, "a", &cfg).unwrap();
        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let mut rng = crate::rng::rng_from(8);
        let krow = crate::rng::standard_normal(&mut rng, &[1, 8]);
        let rows: Vec<Vec<f64>> = (0..3).map(|_| krow.data().to_vec()).collect();
        let k = tape.leaf(Tensor::from_rows(&rows));
        let v = tape.leaf(Tensor::from_rows(&rows));
        let q = tape.leaf(crate::rng::standard_normal(&mut rng, &[4, 8]));
        let y = mha.forward(&mut tape, &bound, q, k, v).unwrap();
        for r in 1..4 {
            for c in 0..8 {
                assert!((tape.value(y).at(r, c) - tape.value(y).at(0, c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn attention_matches_bruteforce_two_head_oracle() {
        let cfg = small_cfg();
        let mut store = ParamStore::new(6);
        let mha = MultiHeadAttention::init(&mut store, "a", &cfg).unwrap();
        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let mut rng = crate::rng::rng_from(15);
        let q = crate::rng::standard_normal(&mut rng, &[3, 8]);
        let k = crate::rng::standard_normal(&mut rng, &[5, 8]);
        let v = crate::rng::standard_normal(&mut rng, &[5, 8]);
        let (qv, kv, vv) = (tape.leaf(q.clone()), tape.leaf(k.clone()), tape.leaf(v.clone()));
        let y = mha.forward(&mut tape, &bound, qv, kv, vv).unwrap();

        // explicit per-head loop oracle
        let dot = |a: &[f64], w: &Tensor, c: usize| -> f64 {
            a.iter().enumerate().map(|(i, x)| x * w.at(i, c)).sum()
        };
        let project = |x: &Tensor, w: &Tensor, b: &Tensor| -> Vec<Vec<f64>> {
            (0..x.rows())
                .map(|r| (0..8).map(|c| dot(x.row(r), w, c) + b.data()[c]).collect())
                .collect()
        };
        let qp = project(&q, store.get("a.wq.w"), store.get("a.wq.b"));
        let kp = project(&k, store.get("a.wk.w"), store.get("a.wk.b"));
        let vp = project(&v, store.get("a.wv.w"), store.get("a.wv.b"));
        let dh = 4;
        let mut joined = vec![vec![0.0; 8]; 3];
        for h in 0..2 {
            for r in 0..3 {
                let mut scores = vec![0.0; 5];
                for t in 0..5 {
                    let s: f64 = (0..dh)
                        .map(|i| qp[r][h * dh + i] * kp[t][h * dh + i])
                        .sum();
                    scores[t] = s / (dh as f64).sqrt();
                }
                let mx = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let exps: Vec<f64> = scores.iter().map(|s| (s - mx).exp()).collect();
                let z: f64 = exps.iter().sum();
                for i in 0..dh {
                    let mut acc = 0.0;
                    for t in 0..5 {
                        acc += exps[t] / z * vp[t][h * dh + i];
                    }
                    joined[r][h * dh + i] = acc;
                }
            }
        }
        let wo = store.get("a.wo.w");
        let bo = store.get("a.wo.b");
        for r in 0..3 {
            for c in 0..8 {
                let expect = dot(&joined[r], wo, c) + bo.data()[c];
                assert!((tape.value(y).at(r, c) - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn config_rejects_indivisible_heads() {
        let cfg = TransformerConfig {
            d: 10,
            n_heads: 4,
            ..small_cfg()
        };
        assert!(cfg.validate().is_err());
        let mut store = ParamStore::new(0);
        assert!(MultiHeadAttention::init(&mut store, "a", &cfg).is_err());
    }

    #[test]
    fn transformer_all_zero_params_collapse_to_final_bias() {
        let cfg = small_cfg();
        let mut store = ParamStore::new(3);
        let tr = Transformer::init(&mut store, "t", 4, &cfg).unwrap();
        // zero every parameter, then set the final layer-norm shift
        let names: Vec<String> = store.names().map(String::from).collect();
        for name in &names {
            let shape = store.get(name).shape().to_vec();
            store.set(name, Tensor::zeros(&shape));
        }
        let beta = Tensor::from_fn(&[8], |i| 0.25 * (i as f64 + 1.0));
        store.set("t.dec_ln.b", beta.clone());

        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let mut rng = crate::rng::rng_from(5);
        let src = tape.leaf(crate::rng::standard_normal(&mut rng, &[5, 8]));
        let tgt = tape.leaf(crate::rng::standard_normal(&mut rng, &[3, 4]));
        let y = tr.forward(&mut tape, &bound, src, tgt).unwrap();
        for r in 0..3 {
            for c in 0..8 {
                assert!((tape.value(y).at(r, c) - beta.data()[c]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn transformer_is_deterministic() {
        let cfg = small_cfg();
        let mut store = ParamStore::new(21);
        let tr = Transformer::init(&mut store, "t", 4, &cfg).unwrap();
        let mut rng = crate::rng::rng_from(99);
        let src = crate::rng::standard_normal(&mut rng, &[5, 8]);
        let tgt = crate::rng::standard_normal(&mut rng, &[3, 4]);

        let run = || {
            let mut tape = Tape::new();
            let bound = store.bind(&mut tape);
            let s = tape.leaf(src.clone());
            let t = tape.leaf(tgt.clone());
            let y = tr.forward(&mut tape, &bound, s, t).unwrap();
            tape.value(y).clone()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn transformer_rejects_non_finite_input() {
        let cfg = small_cfg();
        let mut store = ParamStore::new(21);
        let tr = Transformer::init(&mut store, "t", 4, &cfg).unwrap();
        let mut tape = Tape::new();
        let bound = store.bind(&mut tape);
        let mut bad = Tensor::zeros(&[5, 8]);
        bad.data_mut()[3] = f64::NAN;
        let src = tape.leaf(bad);
        let tgt = tape.leaf(Tensor::zeros(&[3, 4]));
        let err = tr.forward(&mut tape, &bound, src, tgt).unwrap_err();
        assert!(matches!(err, Error::NonFinite(_)));
    }
}
