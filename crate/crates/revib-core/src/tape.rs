//! Reverse-mode automatic differentiation on a flat tape.
//!
//! Every forward operation appends a node holding its output tensor and the
//! indices of its inputs. `backward` walks the tape in reverse creation
//! order, which is already a topological order, and accumulates gradients
//! into per-node buffers. Gradients of leaves are read back through their
//! [`Var`] handles.

use crate::error::{Error, Result};
use crate::spectrum::TransformKind;
use crate::tensor::Tensor;

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Var(usize);

enum Op {
    Leaf,
    MatMul(Var, Var),
    Transpose(Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    AddRowBroadcast(Var, Var),
    Relu(Var),
    Tanh(Var),
    SoftmaxRows(Var),
    LayerNormRows {
        x: Var,
        gamma: Var,
        beta: Var,
        eps: f64,
        // cached per-row (mean, inv_std) from the forward pass
        stats: Vec<(f64, f64)>,
    },
    ConcatRows(Vec<Var>),
    ConcatCols(Vec<Var>),
    SliceCols(Var, usize, usize),
    Reshape(Var),
    RowOuterAugment(Var),
    SumAll(Var),
    L2Norm(Var),
    /// Inverse trajectory transform (spectrum -> trajectory), a linear map.
    InverseTransform(Var, TransformKind),
}

struct Node {
    value: Tensor,
    op: Op,
}

/// Flat computation tape. One tape records one forward pass.
#[derive(Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

impl Tape {
    pub fn new() -> Self {
        Tape { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    /// Record a constant/leaf tensor. Parameters and inputs both enter here.
    pub fn leaf(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = crate::tensor::matmul(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::MatMul(a, b)))
    }

    pub fn transpose(&mut self, a: Var) -> Var {
        let out = crate::tensor::transpose(self.value(a));
        self.push(out, Op::Transpose(a))
    }

    fn zip_same_shape(
        &mut self,
        op: &'static str,
        a: Var,
        b: Var,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<Tensor> {
        let (ta, tb) = (self.value(a), self.value(b));
        if ta.shape() != tb.shape() {
            return Err(Error::shape(op, ta.shape(), tb.shape()));
        }
        let data = ta
            .data()
            .iter()
            .zip(tb.data())
            .map(|(&x, &y)| f(x, y))
            .collect();
        Tensor::new(ta.shape().to_vec(), data)
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = self.zip_same_shape("add", a, b, |x, y| x + y)?;
        Ok(self.push(out, Op::Add(a, b)))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = self.zip_same_shape("sub", a, b, |x, y| x - y)?;
        Ok(self.push(out, Op::Sub(a, b)))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = self.zip_same_shape("mul", a, b, |x, y| x * y)?;
        Ok(self.push(out, Op::Mul(a, b)))
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        let ta = self.value(a);
        let out = Tensor::new(
            ta.shape().to_vec(),
            ta.data().iter().map(|&x| x * k).collect(),
        )
        .expect("scale shape");
        self.push(out, Op::Scale(a, k))
    }

    /// `x + b` where `b` is broadcast over the rows of 2-D `x`.
    pub fn add_row_broadcast(&mut self, x: Var, b: Var) -> Result<Var> {
        let (tx, tb) = (self.value(x), self.value(b));
        if tx.shape().len() != 2 || tb.len() != tx.cols() {
            return Err(Error::shape("add_row_broadcast", tx.shape(), tb.shape()));
        }
        let cols = tx.cols();
        let data = tx
            .data()
            .iter()
            .enumerate()
            .map(|(i, &v)| v + tb.data()[i % cols])
            .collect();
        let out = Tensor::new(tx.shape().to_vec(), data)?;
        Ok(self.push(out, Op::AddRowBroadcast(x, b)))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let ta = self.value(a);
        let out = Tensor::new(
            ta.shape().to_vec(),
            ta.data().iter().map(|&x| x.max(0.0)).collect(),
        )
        .expect("relu shape");
        self.push(out, Op::Relu(a))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let ta = self.value(a);
        let out = Tensor::new(
            ta.shape().to_vec(),
            ta.data().iter().map(|&x| x.tanh()).collect(),
        )
        .expect("tanh shape");
        self.push(out, Op::Tanh(a))
    }

    /// Row-wise softmax of a 2-D tensor; rows of the output sum to 1.
    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let ta = self.value(a);
        assert_eq!(ta.shape().len(), 2, "softmax_rows needs a 2-D tensor");
        let (m, n) = (ta.rows(), ta.cols());
        let mut data = vec![0.0; m * n];
        for i in 0..m {
            let row = ta.row(i);
            let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut sum = 0.0;
            for j in 0..n {
                let e = (row[j] - mx).exp();
                data[i * n + j] = e;
                sum += e;
            }
            for j in 0..n {
                data[i * n + j] /= sum;
            }
        }
        let out = Tensor::new(vec![m, n], data).expect("softmax shape");
        self.push(out, Op::SoftmaxRows(a))
    }

    /// Row-wise layer normalization with learnable gain/shift.
    pub fn layer_norm_rows(&mut self, x: Var, gamma: Var, beta: Var, eps: f64) -> Result<Var> {
        let tx = self.value(x);
        if tx.shape().len() != 2 {
            return Err(Error::shape("layer_norm_rows", tx.shape(), &[]));
        }
        let (m, n) = (tx.rows(), tx.cols());
        let (tg, tb) = (self.value(gamma), self.value(beta));
        if tg.len() != n || tb.len() != n {
            return Err(Error::shape("layer_norm_rows", &[n], tg.shape()));
        }
        let mut data = vec![0.0; m * n];
        let mut stats = Vec::with_capacity(m);
        for i in 0..m {
            let row = tx.row(i);
            let mean = row.iter().sum::<f64>() / n as f64;
            let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64;
            let inv_std = 1.0 / (var + eps).sqrt();
            stats.push((mean, inv_std));
            for j in 0..n {
                let xhat = (row[j] - mean) * inv_std;
                data[i * n + j] = tg.data()[j] * xhat + tb.data()[j];
            }
        }
        let out = Tensor::new(vec![m, n], data)?;
        Ok(self.push(
            out,
            Op::LayerNormRows {
                x,
                gamma,
                beta,
                eps,
                stats,
            },
        ))
    }

    /// Stack 2-D tensors along the row (sequence) dimension.
    pub fn concat_rows(&mut self, parts: &[Var]) -> Result<Var> {
        assert!(!parts.is_empty(), "concat_rows on empty list");
        let cols = self.value(parts[0]).cols();
        let mut data = Vec::new();
        let mut rows = 0;
        for &p in parts {
            let t = self.value(p);
            if t.cols() != cols {
                return Err(Error::shape("concat_rows", &[cols], t.shape()));
            }
            rows += t.rows();
            data.extend_from_slice(t.data());
        }
        let out = Tensor::new(vec![rows, cols], data)?;
        Ok(self.push(out, Op::ConcatRows(parts.to_vec())))
    }

    /// Join 2-D tensors along the column (feature) dimension.
    pub fn concat_cols(&mut self, parts: &[Var]) -> Result<Var> {
        assert!(!parts.is_empty(), "concat_cols on empty list");
        let rows = self.value(parts[0]).rows();
        let widths: Vec<usize> = parts.iter().map(|&p| self.value(p).cols()).collect();
        let total: usize = widths.iter().sum();
        let mut data = vec![0.0; rows * total];
        let mut offset = 0;
        for (&p, &w) in parts.iter().zip(&widths) {
            let t = self.value(p);
            if t.rows() != rows {
                return Err(Error::shape("concat_cols", &[rows], t.shape()));
            }
            for r in 0..rows {
                data[r * total + offset..r * total + offset + w].copy_from_slice(t.row(r));
            }
            offset += w;
        }
        let out = Tensor::new(vec![rows, total], data)?;
        Ok(self.push(out, Op::ConcatCols(parts.to_vec())))
    }

    /// Columns `[start, end)` of a 2-D tensor.
    pub fn slice_cols(&mut self, a: Var, start: usize, end: usize) -> Result<Var> {
        let ta = self.value(a);
        if ta.shape().len() != 2 || end > ta.cols() || start >= end {
            return Err(Error::shape("slice_cols", ta.shape(), &[start, end]));
        }
        let (m, w) = (ta.rows(), end - start);
        let mut data = Vec::with_capacity(m * w);
        for r in 0..m {
            data.extend_from_slice(&ta.row(r)[start..end]);
        }
        let out = Tensor::new(vec![m, w], data)?;
        Ok(self.push(out, Op::SliceCols(a, start, end)))
    }

    pub fn reshape(&mut self, a: Var, shape: Vec<usize>) -> Result<Var> {
        let out = self.value(a).reshaped(shape)?;
        Ok(self.push(out, Op::Reshape(a)))
    }

    /// Augment each row `r` of a 2-D tensor with the flattened outer product
    /// `r ⊗ r`: output row is `[r, vec(r rᵀ)]`, width `c + c²`.
    pub fn row_outer_augment(&mut self, a: Var) -> Var {
        let ta = self.value(a);
        assert_eq!(ta.shape().len(), 2, "row_outer_augment needs 2-D input");
        let (m, c) = (ta.rows(), ta.cols());
        let width = c + c * c;
        let mut data = Vec::with_capacity(m * width);
        for r in 0..m {
            let row = ta.row(r);
            data.extend_from_slice(row);
            for i in 0..c {
                for j in 0..c {
                    data.push(row[i] * row[j]);
                }
            }
        }
        let out = Tensor::new(vec![m, width], data).expect("augment shape");
        self.push(out, Op::RowOuterAugment(a))
    }

    /// Sum of all entries, as a scalar node.
    pub fn sum_all(&mut self, a: Var) -> Var {
        let s: f64 = self.value(a).data().iter().sum();
        self.push(Tensor::scalar(s), Op::SumAll(a))
    }

    /// Frobenius norm `sqrt(Σ x²)` as a scalar node. Gradient is defined as
    /// zero at the origin.
    pub fn l2_norm(&mut self, a: Var) -> Var {
        let s = self.value(a).sq_norm().sqrt();
        self.push(Tensor::scalar(s), Op::L2Norm(a))
    }

    /// Inverse trajectory transform as a differentiable (linear) op.
    pub fn inverse_transform(&mut self, a: Var, kind: TransformKind) -> Result<Var> {
        let out = crate::spectrum::inverse_coeffs(self.value(a), kind)?;
        Ok(self.push(out, Op::InverseTransform(a, kind)))
    }

    /// Run reverse accumulation from a scalar `loss` node. Returns per-node
    /// gradient buffers indexable through [`Tape::grad`].
    pub fn backward(&mut self, loss: Var) -> Result<Gradients> {
        if loss.0 >= self.nodes.len() {
            return Err(Error::State(format!(
                "backward on unknown node {} (tape has {})",
                loss.0,
                self.nodes.len()
            )));
        }
        if self.nodes[loss.0].value.len() != 1 {
            return Err(Error::State(
                "backward requires a scalar loss node".to_string(),
            ));
        }
        let mut grads: Vec<Option<Tensor>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::scalar(1.0));

        for idx in (0..=loss.0).rev() {
            let g = match grads[idx].take() {
                Some(g) => g,
                None => continue,
            };
            self.accumulate_node(idx, &g, &mut grads);
            grads[idx] = Some(g);
        }
        Ok(Gradients { grads })
    }

    fn accumulate_node(&self, idx: usize, g: &Tensor, grads: &mut [Option<Tensor>]) {
        let add_to = |grads: &mut [Option<Tensor>], v: Var, delta: Tensor| {
            match &mut grads[v.0] {
                Some(acc) => {
                    for (a, d) in acc.data_mut().iter_mut().zip(delta.data()) {
                        *a += d;
                    }
                }
                slot @ None => *slot = Some(delta),
            };
        };

        match &self.nodes[idx].op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                let ta = &self.nodes[a.0].value;
                let tb = &self.nodes[b.0].value;
                let da = crate::tensor::matmul(g, &crate::tensor::transpose(tb)).expect("dA");
                let db = crate::tensor::matmul(&crate::tensor::transpose(ta), g).expect("dB");
                add_to(grads, *a, da);
                add_to(grads, *b, db);
            }
            Op::Transpose(a) => {
                add_to(grads, *a, crate::tensor::transpose(g));
            }
            Op::Add(a, b) => {
                add_to(grads, *a, g.clone());
                add_to(grads, *b, g.clone());
            }
            Op::Sub(a, b) => {
                add_to(grads, *a, g.clone());
                let neg = Tensor::new(
                    g.shape().to_vec(),
                    g.data().iter().map(|v| -v).collect(),
                )
                .expect("neg");
                add_to(grads, *b, neg);
            }
            Op::Mul(a, b) => {
                let ta = &self.nodes[a.0].value;
                let tb = &self.nodes[b.0].value;
                let da = Tensor::new(
                    g.shape().to_vec(),
                    g.data().iter().zip(tb.data()).map(|(x, y)| x * y).collect(),
                )
                .expect("da");
                let db = Tensor::new(
                    g.shape().to_vec(),
                    g.data().iter().zip(ta.data()).map(|(x, y)| x * y).collect(),
                )
                .expect("db");
                add_to(grads, *a, da);
                add_to(grads, *b, db);
            }
            Op::Scale(a, k) => {
                let da = Tensor::new(
                    g.shape().to_vec(),
                    g.data().iter().map(|v| v * k).collect(),
                )
                .expect("scale grad");
                add_to(grads, *a, da);
            }
            Op::AddRowBroadcast(x, b) => {
                add_to(grads, *x, g.clone());
                let cols = self.nodes[b.0].value.len();
                let mut db = vec![0.0; cols];
                for (i, v) in g.data().iter().enumerate() {
                    db[i % cols] += v;
                }
                add_to(grads, *b, Tensor::new(vec![cols], db).expect("db"));
            }
            Op::Relu(a) => {
                let ta = &self.nodes[a.0].value;
                let da = Tensor::new(
                    g.shape().to_vec(),
                    g.data()
                        .iter()
                        .zip(ta.data())
                        .map(|(gv, xv)| if *xv > 0.0 { *gv } else { 0.0 })
                        .collect(),
                )
                .expect("relu grad");
                add_to(grads, *a, da);
            }
            Op::Tanh(a) => {
                let ty = &self.nodes[idx].value;
                let da = Tensor::new(
                    g.shape().to_vec(),
                    g.data()
                        .iter()
                        .zip(ty.data())
                        .map(|(gv, yv)| gv * (1.0 - yv * yv))
                        .collect(),
                )
                .expect("tanh grad");
                add_to(grads, *a, da);
            }
            Op::SoftmaxRows(a) => {
                let y = &self.nodes[idx].value;
                let (m, n) = (y.rows(), y.cols());
                let mut da = vec![0.0; m * n];
                for i in 0..m {
                    let yrow = y.row(i);
                    let grow = &g.data()[i * n..(i + 1) * n];
                    let dot: f64 = yrow.iter().zip(grow).map(|(yv, gv)| yv * gv).sum();
                    for j in 0..n {
                        da[i * n + j] = yrow[j] * (grow[j] - dot);
                    }
                }
                add_to(grads, *a, Tensor::new(vec![m, n], da).expect("softmax grad"));
            }
            Op::LayerNormRows {
                x,
                gamma,
                beta,
                eps: _,
                stats,
            } => {
                let tx = &self.nodes[x.0].value;
                let tg = &self.nodes[gamma.0].value;
                let (m, n) = (tx.rows(), tx.cols());
                let mut dx = vec![0.0; m * n];
                let mut dgamma = vec![0.0; n];
                let mut dbeta = vec![0.0; n];
                for i in 0..m {
                    let (mean, inv_std) = stats[i];
                    let xrow = tx.row(i);
                    let grow = &g.data()[i * n..(i + 1) * n];
                    // dL/dxhat, plus the two row means needed for dx
                    let mut sum_gh = 0.0;
                    let mut sum_gh_xhat = 0.0;
                    let mut xhat = vec![0.0; n];
                    let mut gh = vec![0.0; n];
                    for j in 0..n {
                        xhat[j] = (xrow[j] - mean) * inv_std;
                        gh[j] = grow[j] * tg.data()[j];
                        sum_gh += gh[j];
                        sum_gh_xhat += gh[j] * xhat[j];
                        dgamma[j] += grow[j] * xhat[j];
                        dbeta[j] += grow[j];
                    }
                    let inv_n = 1.0 / n as f64;
                    for j in 0..n {
                        dx[i * n + j] = inv_std
                            * (gh[j] - inv_n * sum_gh - xhat[j] * inv_n * sum_gh_xhat);
                    }
                }
                add_to(grads, *x, Tensor::new(vec![m, n], dx).expect("ln dx"));
                add_to(grads, *gamma, Tensor::new(vec![n], dgamma).expect("ln dg"));
                add_to(grads, *beta, Tensor::new(vec![n], dbeta).expect("ln db"));
            }
            Op::ConcatRows(parts) => {
                let cols = g.cols();
                let mut offset = 0;
                for &p in parts {
                    let r = self.nodes[p.0].value.rows();
                    let slice = g.data()[offset * cols..(offset + r) * cols].to_vec();
                    add_to(grads, p, Tensor::new(vec![r, cols], slice).expect("dpart"));
                    offset += r;
                }
            }
            Op::ConcatCols(parts) => {
                let rows = g.rows();
                let total = g.cols();
                let mut offset = 0;
                for &p in parts {
                    let w = self.nodes[p.0].value.cols();
                    let mut dp = vec![0.0; rows * w];
                    for r in 0..rows {
                        dp[r * w..(r + 1) * w]
                            .copy_from_slice(&g.row(r)[offset..offset + w]);
                    }
                    add_to(grads, p, Tensor::new(vec![rows, w], dp).expect("dpart"));
                    offset += w;
                }
            }
            Op::SliceCols(a, start, _end) => {
                let ta = &self.nodes[a.0].value;
                let (m, n) = (ta.rows(), ta.cols());
                let w = g.cols();
                let mut da = vec![0.0; m * n];
                for r in 0..m {
                    da[r * n + start..r * n + start + w].copy_from_slice(g.row(r));
                }
                add_to(grads, *a, Tensor::new(vec![m, n], da).expect("dslice"));
            }
            Op::Reshape(a) => {
                let shape = self.nodes[a.0].value.shape().to_vec();
                add_to(grads, *a, g.reshaped(shape).expect("dreshape"));
            }
            Op::RowOuterAugment(a) => {
                let ta = &self.nodes[a.0].value;
                let (m, c) = (ta.rows(), ta.cols());
                let width = c + c * c;
                let mut da = vec![0.0; m * c];
                for r in 0..m {
                    let xrow = ta.row(r);
                    let grow = &g.data()[r * width..(r + 1) * width];
                    for i in 0..c {
                        let mut acc = grow[i];
                        for j in 0..c {
                            acc += grow[c + i * c + j] * xrow[j]; // d(x_i x_j)/dx_i
                            acc += grow[c + j * c + i] * xrow[j]; // d(x_j x_i)/dx_i
                        }
                        da[r * c + i] = acc;
                    }
                }
                add_to(grads, *a, Tensor::new(vec![m, c], da).expect("daug"));
            }
            Op::SumAll(a) => {
                let ta = &self.nodes[a.0].value;
                let gv = g.item();
                add_to(
                    grads,
                    *a,
                    Tensor::new(ta.shape().to_vec(), vec![gv; ta.len()]).expect("dsum"),
                );
            }
            Op::L2Norm(a) => {
                let ta = &self.nodes[a.0].value;
                let norm = self.nodes[idx].value.item();
                let gv = g.item();
                let da = if norm == 0.0 {
                    Tensor::zeros(ta.shape())
                } else {
                    Tensor::new(
                        ta.shape().to_vec(),
                        ta.data().iter().map(|v| gv * v / norm).collect(),
                    )
                    .expect("dnorm")
                };
                add_to(grads, *a, da);
            }
            Op::InverseTransform(a, kind) => {
                let da = crate::spectrum::inverse_adjoint(g, *kind, self.nodes[a.0].value.shape());
                add_to(grads, *a, da);
            }
        }
    }
}

/// Gradient buffers produced by [`Tape::backward`].
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    /// Gradient of the loss w.r.t. node `v`; zeros if the node does not
    /// reach the loss.
    pub fn get(&self, tape: &Tape, v: Var) -> Tensor {
        match &self.grads[v.0] {
            Some(g) => g.clone(),
            None => Tensor::zeros(tape.value(v).shape()),
        }
    }

    /// Borrowing variant of [`Gradients::get`]; `None` means "unreached".
    pub fn try_get(&self, v: Var) -> Option<&Tensor> {
        self.grads[v.0].as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn backward_of_sum_is_ones() {
        let mut tape = Tape::new();
        let w = tape.leaf(Tensor::from_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]));
        let loss = tape.sum_all(w);
        let grads = tape.backward(loss).unwrap();
        assert_eq!(grads.get(&tape, w).data(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn backward_requires_scalar() {
        let mut tape = Tape::new();
        let w = tape.leaf(Tensor::zeros(&[2, 2]));
        assert!(tape.backward(w).is_err());
    }

    #[test]
    fn backward_on_empty_tape_is_state_error() {
        let mut tape = Tape::new();
        let err = tape.backward(Var(0)).unwrap_err();
        assert!(matches!(err, crate::error::Error::State(_)));
    }

    #[test]
    fn quadratic_form_gradient_matches_closed_form() {
        // loss = ||x w||²  =>  dloss/dw = 2 xᵀ x w
        let x = Tensor::from_rows(&[vec![1.0, -2.0], vec![0.5, 3.0], vec![-1.5, 0.25]]);
        let w0 = Tensor::from_rows(&[vec![0.7], vec![-0.3]]);

        let mut tape = Tape::new();
        let xv = tape.leaf(x.clone());
        let wv = tape.leaf(w0.clone());
        let y = tape.matmul(xv, wv).unwrap();
        let sq = tape.mul(y, y).unwrap();
        let loss = tape.sum_all(sq);
        let grads = tape.backward(loss).unwrap();
        let got = grads.get(&tape, wv);

        let xt = crate::tensor::transpose(&x);
        let xtx = crate::tensor::matmul(&xt, &x).unwrap();
        let xtxw = crate::tensor::matmul(&xtx, &w0).unwrap();
        let expect = Tensor::new(
            vec![2, 1],
            xtxw.data().iter().map(|v| 2.0 * v).collect(),
        )
        .unwrap();
        assert!(got.max_abs_diff(&expect) < 1e-10);
    }

    #[test]
    fn detached_input_gets_no_gradient() {
        let mut tape = Tape::new();
        let w = tape.leaf(Tensor::scalar(2.0));
        let detached = tape.leaf(Tensor::scalar(5.0));
        let loss = tape.mul(w, w).unwrap();
        let loss = tape.sum_all(loss);
        let grads = tape.backward(loss).unwrap();
        assert!(grads.try_get(detached).is_none());
        assert_eq!(grads.get(&tape, detached).data(), &[0.0]);
    }

    #[test]
    fn softmax_rows_sum_to_one() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::from_rows(&[
            vec![0.3, -1.2, 2.0],
            vec![100.0, 100.0, 100.0],
        ]));
        let y = tape.softmax_rows(x);
        for r in 0..2 {
            let s: f64 = tape.value(y).row(r).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn l2_norm_zero_input_has_zero_grad() {
        let mut tape = Tape::new();
        let x = tape.leaf(Tensor::zeros(&[3, 2]));
        let n = tape.l2_norm(x);
        let grads = tape.backward(n).unwrap();
        assert_eq!(grads.get(&tape, x).data(), &[0.0; 6]);
    }
}
