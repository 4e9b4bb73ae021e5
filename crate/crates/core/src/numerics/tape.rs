//! Reverse-mode differentiation over rank-2 tensors.
//!
//! A [`Tape`] records every primitive in evaluation order, so node ids are
//! already a topological order and the backward pass is a single reverse
//! sweep. Gradients from multiple consumers of a node are summed.

use super::tensor::{gemm, Tensor};
use crate::error::{Error, Result};

/// Handle to a node on a [`Tape`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Unary {
    Relu,
    Tanh,
    Exp,
    Square,
}

impl Unary {
    fn apply(self, v: f64) -> f64 {
        match self {
            Unary::Relu => v.max(0.0),
            Unary::Tanh => v.tanh(),
            Unary::Exp => v.exp(),
            Unary::Square => v * v,
        }
    }

    /// Derivative given the input `x` and output `y`.
    fn derivative(self, x: f64, y: f64) -> f64 {
        match self {
            Unary::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Unary::Tanh => 1.0 - y * y,
            Unary::Exp => y,
            Unary::Square => 2.0 * x,
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Leaf,
    /// `x[B×n] · wᵀ + b`, with `w[m×n]` and `b[m]`.
    Affine { x: Var, w: Var, b: Var },
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Scale(Var, f64),
    AddScalar(Var),
    Unary(Var, Unary),
    Sum(Var),
    /// Row-wise sum to a `[B×1]` column.
    SumCols(Var),
    ConcatCols(Var, Var),
    Columns { x: Var, start: usize },
    PickPerRow { x: Var, idx: Vec<usize> },
    /// Row-wise softmax.
    Softmax(Var),
    /// Row-wise log-softmax.
    LogSoftmax(Var),
    /// `ln(max(x, floor))`; zero gradient where the floor is active.
    LogFloor(Var, f64),
    GatherRows { table: Var, idx: Vec<usize> },
    /// Forward value is supplied externally; gradient is copied to `x`.
    StraightThrough(Var),
}

#[derive(Debug)]
struct Node {
    value: Tensor,
    op: Op,
    needs_grad: bool,
}

#[derive(Debug, Default)]
pub struct Tape {
    nodes: Vec<Node>,
}

/// Gradients of one scalar with respect to every node that required them.
#[derive(Debug)]
pub struct Gradients {
    grads: Vec<Option<Tensor>>,
}

impl Gradients {
    pub fn get(&self, v: Var) -> Option<&Tensor> {
        self.grads.get(v.0).and_then(|g| g.as_ref())
    }

    /// Gradient of `v`, or zeros of `shape` when nothing flowed into it.
    pub fn get_or_zeros(&self, v: Var, shape: &[usize]) -> Tensor {
        self.get(v).cloned().unwrap_or_else(|| Tensor::zeros(shape))
    }

    pub fn take(&mut self, v: Var) -> Option<Tensor> {
        self.grads.get_mut(v.0).and_then(|g| g.take())
    }
}

fn as_matrix(t: Tensor) -> Tensor {
    if t.shape().len() == 1 {
        let n = t.len();
        t.reshaped(vec![1, n])
    } else {
        t
    }
}

impl Tape {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor, op: Op, needs_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op,
            needs_grad,
        });
        Var(self.nodes.len() - 1)
    }

    fn needs(&self, v: Var) -> bool {
        self.nodes[v.0].needs_grad
    }

    fn checked(&mut self, value: Tensor, op: Op, needs_grad: bool, what: &str) -> Result<Var> {
        if !value.is_finite() {
            return Err(Error::NonFinite(format!("{what} produced a non-finite value")));
        }
        Ok(self.push(value, op, needs_grad))
    }

    /// Leaf that receives a gradient.
    pub fn param(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, true)
    }

    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(value, Op::Leaf, false)
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    pub fn affine(&mut self, x: Var, w: Var, b: Var) -> Result<Var> {
        let (xv, wv, bv) = (self.value(x), self.value(w), self.value(b));
        if wv.shape().len() != 2 {
            return Err(Error::invalid("affine weight must be a matrix"));
        }
        let (m, n) = (wv.shape()[0], wv.shape()[1]);
        if xv.cols() != n || bv.len() != m {
            return Err(Error::invalid(format!(
                "affine shapes: w {:?}, b {:?}, x {:?}",
                wv.shape(),
                bv.shape(),
                xv.shape()
            )));
        }
        let rows = xv.rows();
        let mut out = vec![0.0; rows * m];
        for r in 0..rows {
            out[r * m..(r + 1) * m].copy_from_slice(bv.data());
        }
        gemm(rows, n, m, xv.data(), false, wv.data(), true, &mut out, true);
        let shape = if xv.shape().len() == 1 {
            vec![m]
        } else {
            vec![rows, m]
        };
        let needs = self.needs(x) || self.needs(w) || self.needs(b);
        self.checked(Tensor::new(shape, out)?, Op::Affine { x, w, b }, needs, "affine")
    }

    fn binary(&mut self, a: Var, b: Var, op: Op, f: impl Fn(f64, f64) -> f64) -> Result<Var> {
        let value = self.value(a).zip_map(self.value(b), f)?;
        let needs = self.needs(a) || self.needs(b);
        self.checked(value, op, needs, "binary op")
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(a, b, Op::Add(a, b), |x, y| x + y)
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(a, b, Op::Sub(a, b), |x, y| x - y)
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.binary(a, b, Op::Mul(a, b), |x, y| x * y)
    }

    pub fn scale(&mut self, a: Var, k: f64) -> Var {
        let value = self.value(a).map(|v| v * k);
        let needs = self.needs(a);
        self.push(value, Op::Scale(a, k), needs)
    }

    pub fn add_scalar(&mut self, a: Var, k: f64) -> Var {
        let value = self.value(a).map(|v| v + k);
        let needs = self.needs(a);
        self.push(value, Op::AddScalar(a), needs)
    }

    pub fn unary(&mut self, a: Var, f: Unary) -> Result<Var> {
        if !self.value(a).is_finite() {
            return Err(Error::NonFinite(format!("{f:?} input")));
        }
        let value = self.value(a).map(|v| f.apply(v));
        let needs = self.needs(a);
        self.checked(value, Op::Unary(a, f), needs, "elementwise op")
    }

    pub fn relu(&mut self, a: Var) -> Result<Var> {
        self.unary(a, Unary::Relu)
    }

    pub fn tanh(&mut self, a: Var) -> Result<Var> {
        self.unary(a, Unary::Tanh)
    }

    pub fn exp(&mut self, a: Var) -> Result<Var> {
        self.unary(a, Unary::Exp)
    }

    pub fn square(&mut self, a: Var) -> Result<Var> {
        self.unary(a, Unary::Square)
    }

    pub fn sum(&mut self, a: Var) -> Var {
        let value = Tensor::scalar(self.value(a).sum());
        let needs = self.needs(a);
        self.push(value, Op::Sum(a), needs)
    }

    pub fn mean(&mut self, a: Var) -> Var {
        let n = self.value(a).len() as f64;
        let s = self.sum(a);
        self.scale(s, 1.0 / n)
    }

    pub fn sum_cols(&mut self, a: Var) -> Var {
        let v = self.value(a);
        let rows = v.rows();
        let data = (0..rows).map(|r| v.row(r).iter().sum()).collect();
        let needs = self.needs(a);
        self.push(
            Tensor::new(vec![rows, 1], data).unwrap(),
            Op::SumCols(a),
            needs,
        )
    }

    pub fn concat_cols(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.rows() != bv.rows() {
            return Err(Error::invalid("concat_cols: row count mismatch"));
        }
        let (ca, cb) = (av.cols(), bv.cols());
        let mut data = Vec::with_capacity(av.len() + bv.len());
        for r in 0..av.rows() {
            data.extend_from_slice(av.row(r));
            data.extend_from_slice(bv.row(r));
        }
        let rows = av.rows();
        let needs = self.needs(a) || self.needs(b);
        Ok(self.push(
            Tensor::new(vec![rows, ca + cb], data)?,
            Op::ConcatCols(a, b),
            needs,
        ))
    }

    pub fn columns(&mut self, x: Var, start: usize, len: usize) -> Result<Var> {
        let v = self.value(x);
        if start + len > v.cols() {
            return Err(Error::invalid("columns: range out of bounds"));
        }
        let rows = v.rows();
        let mut data = Vec::with_capacity(rows * len);
        for r in 0..rows {
            data.extend_from_slice(&v.row(r)[start..start + len]);
        }
        let needs = self.needs(x);
        Ok(self.push(
            Tensor::new(vec![rows, len], data)?,
            Op::Columns { x, start },
            needs,
        ))
    }

    /// `out[r] = x[r, idx[r]]` as a `[B×1]` column.
    pub fn pick_per_row(&mut self, x: Var, idx: &[usize]) -> Result<Var> {
        let v = self.value(x);
        if idx.len() != v.rows() || idx.iter().any(|&i| i >= v.cols()) {
            return Err(Error::invalid("pick_per_row: bad indices"));
        }
        let data = idx.iter().enumerate().map(|(r, &c)| v.get(r, c)).collect();
        let needs = self.needs(x);
        Ok(self.push(
            Tensor::new(vec![idx.len(), 1], data)?,
            Op::PickPerRow {
                x,
                idx: idx.to_vec(),
            },
            needs,
        ))
    }

    pub fn softmax(&mut self, x: Var) -> Result<Var> {
        let v = as_matrix(self.value(x).clone());
        let mut out = v.clone();
        let cols = v.cols();
        for r in 0..v.rows() {
            let row = &mut out.data_mut()[r * cols..(r + 1) * cols];
            softmax_in_place(row);
        }
        let needs = self.needs(x);
        self.checked(out, Op::Softmax(x), needs, "softmax")
    }

    pub fn log_softmax(&mut self, x: Var) -> Result<Var> {
        let v = as_matrix(self.value(x).clone());
        let mut out = v.clone();
        let cols = v.cols();
        for r in 0..v.rows() {
            let row = &mut out.data_mut()[r * cols..(r + 1) * cols];
            let lse = log_sum_exp(row);
            row.iter_mut().for_each(|z| *z -= lse);
        }
        let needs = self.needs(x);
        self.checked(out, Op::LogSoftmax(x), needs, "log_softmax")
    }

    pub fn log_floor(&mut self, x: Var, floor: f64) -> Var {
        let value = self.value(x).map(|v| v.max(floor).ln());
        let needs = self.needs(x);
        self.push(value, Op::LogFloor(x, floor), needs)
    }

    /// Rows `idx` of `table`; backward scatters into the selected rows.
    pub fn gather_rows(&mut self, table: Var, idx: &[usize]) -> Result<Var> {
        let t = self.value(table);
        if idx.iter().any(|&i| i >= t.rows()) {
            return Err(Error::invalid("gather_rows: index out of range"));
        }
        let cols = t.cols();
        let mut data = Vec::with_capacity(idx.len() * cols);
        for &i in idx {
            data.extend_from_slice(t.row(i));
        }
        let needs = self.needs(table);
        Ok(self.push(
            Tensor::new(vec![idx.len(), cols], data)?,
            Op::GatherRows {
                table,
                idx: idx.to_vec(),
            },
            needs,
        ))
    }

    /// Node whose forward value is `forward` but whose gradient passes
    /// unchanged to `x`.
    pub fn straight_through(&mut self, x: Var, forward: Tensor) -> Result<Var> {
        if forward.shape() != self.value(x).shape() {
            return Err(Error::invalid("straight_through: shape mismatch"));
        }
        let needs = self.needs(x);
        self.checked(forward, Op::StraightThrough(x), needs, "straight_through")
    }

    /// Copy of `x`'s value with no gradient path.
    pub fn detach(&mut self, x: Var) -> Var {
        let value = self.value(x).clone();
        self.constant(value)
    }

    /// Gradients of the scalar node `output` with respect to every node.
    pub fn backward(&self, output: Var) -> Result<Gradients> {
        if self.value(output).len() != 1 {
            return Err(Error::invalid("backward requires a scalar output"));
        }
        let mut grads: Vec<Option<Tensor>> = vec![None; self.nodes.len()];
        let out_shape = self.value(output).shape().to_vec();
        grads[output.0] = Some(Tensor::full(&out_shape, 1.0));

        for id in (0..=output.0).rev() {
            let Some(g) = grads[id].take() else { continue };
            let node = &self.nodes[id];
            if !node.needs_grad {
                continue;
            }
            self.propagate(&node.op, &node.value, &g, &mut grads)?;
            grads[id] = Some(g);
        }
        for (g, n) in grads.iter().zip(&self.nodes) {
            if let Some(g) = g {
                if !g.is_finite() {
                    return Err(Error::NonFinite(format!(
                        "gradient of node with shape {:?}",
                        n.value.shape()
                    )));
                }
            }
        }
        Ok(Gradients { grads })
    }

    fn accumulate(&self, grads: &mut [Option<Tensor>], v: Var, g: Tensor) {
        if !self.needs(v) {
            return;
        }
        let shape = self.value(v).shape();
        let g = if g.shape() == shape {
            g
        } else {
            g.reshaped(shape.to_vec())
        };
        match &mut grads[v.0] {
            Some(acc) => acc.add_assign(&g),
            slot @ None => *slot = Some(g),
        }
    }

    fn propagate(
        &self,
        op: &Op,
        value: &Tensor,
        g: &Tensor,
        grads: &mut [Option<Tensor>],
    ) -> Result<()> {
        match op {
            Op::Leaf => {}
            Op::Affine { x, w, b } => {
                let (xv, wv) = (self.value(*x), self.value(*w));
                let (m, n) = (wv.shape()[0], wv.shape()[1]);
                let rows = xv.rows();
                if self.needs(*x) {
                    let mut dx = vec![0.0; rows * n];
                    gemm(rows, m, n, g.data(), false, wv.data(), false, &mut dx, false);
                    self.accumulate(grads, *x, Tensor::new(vec![rows, n], dx)?);
                }
                if self.needs(*w) {
                    let mut dw = vec![0.0; m * n];
                    gemm(m, rows, n, g.data(), true, xv.data(), false, &mut dw, false);
                    self.accumulate(grads, *w, Tensor::new(vec![m, n], dw)?);
                }
                if self.needs(*b) {
                    let mut db = vec![0.0; m];
                    for r in 0..rows {
                        for (acc, v) in db.iter_mut().zip(&g.data()[r * m..(r + 1) * m]) {
                            *acc += v;
                        }
                    }
                    self.accumulate(grads, *b, Tensor::vector(db));
                }
            }
            Op::Add(a, b) => {
                self.accumulate(grads, *a, g.clone());
                self.accumulate(grads, *b, g.clone());
            }
            Op::Sub(a, b) => {
                self.accumulate(grads, *a, g.clone());
                self.accumulate(grads, *b, g.map(|v| -v));
            }
            Op::Mul(a, b) => {
                let (av, bv) = (self.value(*a), self.value(*b));
                if self.needs(*a) {
                    self.accumulate(grads, *a, g.zip_map(bv, |x, y| x * y)?);
                }
                if self.needs(*b) {
                    self.accumulate(grads, *b, g.zip_map(av, |x, y| x * y)?);
                }
            }
            Op::Scale(a, k) => self.accumulate(grads, *a, g.map(|v| v * k)),
            Op::AddScalar(a) => self.accumulate(grads, *a, g.clone()),
            Op::Unary(a, f) => {
                let x = self.value(*a);
                let mut d = g.clone();
                for ((dv, &xv), &yv) in d.data_mut().iter_mut().zip(x.data()).zip(value.data()) {
                    *dv *= f.derivative(xv, yv);
                }
                self.accumulate(grads, *a, d);
            }
            Op::Sum(a) => {
                let shape = self.value(*a).shape().to_vec();
                self.accumulate(grads, *a, Tensor::full(&shape, g.item()));
            }
            Op::SumCols(a) => {
                let av = self.value(*a);
                let cols = av.cols();
                let data = (0..av.len()).map(|i| g.data()[i / cols]).collect();
                self.accumulate(grads, *a, Tensor::new(av.shape().to_vec(), data)?);
            }
            Op::ConcatCols(a, b) => {
                let (ca, cb) = (self.value(*a).cols(), self.value(*b).cols());
                let rows = value.rows();
                let mut ga = Vec::with_capacity(rows * ca);
                let mut gb = Vec::with_capacity(rows * cb);
                for r in 0..rows {
                    let row = g.row(r);
                    ga.extend_from_slice(&row[..ca]);
                    gb.extend_from_slice(&row[ca..]);
                }
                self.accumulate(grads, *a, Tensor::new(vec![rows, ca], ga)?);
                self.accumulate(grads, *b, Tensor::new(vec![rows, cb], gb)?);
            }
            Op::Columns { x, start } => {
                let xv = self.value(*x);
                let (rows, cols, len) = (xv.rows(), xv.cols(), value.cols());
                let mut d = vec![0.0; rows * cols];
                for r in 0..rows {
                    d[r * cols + start..r * cols + start + len].copy_from_slice(g.row(r));
                }
                self.accumulate(grads, *x, Tensor::new(vec![rows, cols], d)?);
            }
            Op::PickPerRow { x, idx } => {
                let xv = self.value(*x);
                let cols = xv.cols();
                let mut d = vec![0.0; xv.len()];
                for (r, &c) in idx.iter().enumerate() {
                    d[r * cols + c] = g.data()[r];
                }
                self.accumulate(grads, *x, Tensor::new(xv.shape().to_vec(), d)?);
            }
            Op::Softmax(x) => {
                let cols = value.cols();
                let mut d = vec![0.0; value.len()];
                for r in 0..value.rows() {
                    let (y, gy) = (value.row(r), g.row(r));
                    let dot: f64 = y.iter().zip(gy).map(|(a, b)| a * b).sum();
                    for c in 0..cols {
                        d[r * cols + c] = y[c] * (gy[c] - dot);
                    }
                }
                self.accumulate(grads, *x, Tensor::new(value.shape().to_vec(), d)?);
            }
            Op::LogSoftmax(x) => {
                let cols = value.cols();
                let mut d = vec![0.0; value.len()];
                for r in 0..value.rows() {
                    let (y, gy) = (value.row(r), g.row(r));
                    let total: f64 = gy.iter().sum();
                    for c in 0..cols {
                        d[r * cols + c] = gy[c] - y[c].exp() * total;
                    }
                }
                self.accumulate(grads, *x, Tensor::new(value.shape().to_vec(), d)?);
            }
            Op::LogFloor(x, floor) => {
                let xv = self.value(*x);
                let d = g.zip_map(xv, |gv, v| if v > *floor { gv / v } else { 0.0 })?;
                self.accumulate(grads, *x, d);
            }
            Op::GatherRows { table, idx } => {
                let tv = self.value(*table);
                let cols = tv.cols();
                let mut d = vec![0.0; tv.len()];
                for (r, &i) in idx.iter().enumerate() {
                    for (acc, v) in d[i * cols..(i + 1) * cols].iter_mut().zip(g.row(r)) {
                        *acc += v;
                    }
                }
                self.accumulate(grads, *table, Tensor::new(tv.shape().to_vec(), d)?);
            }
            Op::StraightThrough(x) => self.accumulate(grads, *x, g.clone()),
        }
        Ok(())
    }
}

pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}

pub fn softmax_in_place(row: &mut [f64]) {
    let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in row.iter_mut() {
        *v = (*v - m).exp();
        total += *v;
    }
    row.iter_mut().for_each(|v| *v /= total);
}
