//! Minimal tape-based reverse-mode differentiation.
//!
//! A [`Tape`] records one scalar computation as a flat arena of nodes, each
//! holding up to three parent indices with local partial derivatives. The
//! backward pass visits nodes once in reverse creation order (creation
//! order is a topological order by construction) and accumulates adjoints.
//!
//! [`Var`] is a copyable handle implementing [`Scalar`], so the flow and
//! target math written against that trait runs unchanged on the tape.
//! Tapes are single-threaded; batch parallelism uses one tape per sample.

use std::cell::RefCell;

use crate::scalar::Scalar;

#[derive(Clone, Copy)]
struct Node {
    parents: [u32; 3],
    partials: [f64; 3],
}

/// Records operations for one backward pass.
pub struct Tape {
    nodes: RefCell<Vec<Node>>,
}

/// A value living on a tape.
#[derive(Clone, Copy)]
pub struct Var<'t> {
    tape: &'t Tape,
    idx: u32,
    v: f64,
}

impl Default for Tape {
    fn default() -> Self {
        Self::new()
    }
}

impl Tape {
    pub fn new() -> Self {
        Tape {
            nodes: RefCell::new(Vec::new()),
        }
    }

    pub fn with_capacity(nodes: usize) -> Self {
        Tape {
            nodes: RefCell::new(Vec::with_capacity(nodes)),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Introduce a leaf variable.
    pub fn var(&self, v: f64) -> Var<'_> {
        let idx = self.push_leaf();
        Var { tape: self, idx, v }
    }

    fn push_leaf(&self) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len() as u32;
        nodes.push(Node {
            parents: [idx; 3],
            partials: [0.0; 3],
        });
        idx
    }

    fn push1(&self, p: u32, w: f64) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len() as u32;
        nodes.push(Node {
            parents: [p, idx, idx],
            partials: [w, 0.0, 0.0],
        });
        idx
    }

    fn push2(&self, p0: u32, w0: f64, p1: u32, w1: f64) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len() as u32;
        nodes.push(Node {
            parents: [p0, p1, idx],
            partials: [w0, w1, 0.0],
        });
        idx
    }

    fn push3(&self, p0: u32, w0: f64, p1: u32, w1: f64, p2: u32, w2: f64) -> u32 {
        let mut nodes = self.nodes.borrow_mut();
        let idx = nodes.len() as u32;
        nodes.push(Node {
            parents: [p0, p1, p2],
            partials: [w0, w1, w2],
        });
        idx
    }

    /// Adjoints of every node with respect to `output`. Index the result by
    /// `Var::index` (leaf variables created first occupy the first slots).
    pub fn gradient(&self, output: Var<'_>) -> Vec<f64> {
        let nodes = self.nodes.borrow();
        let mut adjoint = vec![0.0; nodes.len()];
        adjoint[output.idx as usize] = 1.0;
        for i in (0..nodes.len()).rev() {
            let g = adjoint[i];
            if g == 0.0 {
                continue;
            }
            let node = &nodes[i];
            for j in 0..3 {
                let p = node.parents[j] as usize;
                if p != i {
                    adjoint[p] += node.partials[j] * g;
                }
            }
        }
        adjoint
    }
}

impl<'t> Var<'t> {
    pub fn value(self) -> f64 {
        self.v
    }

    pub fn index(self) -> usize {
        self.idx as usize
    }
}

macro_rules! same_tape {
    ($a:expr, $b:expr) => {
        debug_assert!(
            std::ptr::eq($a.tape, $b.tape),
            "variables from different tapes"
        )
    };
}

impl<'t> std::ops::Add for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: Self) -> Self::Output {
        same_tape!(self, rhs);
        Var {
            tape: self.tape,
            idx: self.tape.push2(self.idx, 1.0, rhs.idx, 1.0),
            v: self.v + rhs.v,
        }
    }
}

impl<'t> std::ops::Sub for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: Self) -> Self::Output {
        same_tape!(self, rhs);
        Var {
            tape: self.tape,
            idx: self.tape.push2(self.idx, 1.0, rhs.idx, -1.0),
            v: self.v - rhs.v,
        }
    }
}

impl<'t> std::ops::Mul for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: Self) -> Self::Output {
        same_tape!(self, rhs);
        Var {
            tape: self.tape,
            idx: self.tape.push2(self.idx, rhs.v, rhs.idx, self.v),
            v: self.v * rhs.v,
        }
    }
}

impl<'t> std::ops::Div for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: Self) -> Self::Output {
        same_tape!(self, rhs);
        let inv = 1.0 / rhs.v;
        Var {
            tape: self.tape,
            idx: self
                .tape
                .push2(self.idx, inv, rhs.idx, -self.v * inv * inv),
            v: self.v * inv,
        }
    }
}

impl<'t> std::ops::Neg for Var<'t> {
    type Output = Var<'t>;
    fn neg(self) -> Self::Output {
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, -1.0),
            v: -self.v,
        }
    }
}

impl<'t> std::ops::Add<f64> for Var<'t> {
    type Output = Var<'t>;
    fn add(self, rhs: f64) -> Self::Output {
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, 1.0),
            v: self.v + rhs,
        }
    }
}

impl<'t> std::ops::Sub<f64> for Var<'t> {
    type Output = Var<'t>;
    fn sub(self, rhs: f64) -> Self::Output {
        self + (-rhs)
    }
}

impl<'t> std::ops::Mul<f64> for Var<'t> {
    type Output = Var<'t>;
    fn mul(self, rhs: f64) -> Self::Output {
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, rhs),
            v: self.v * rhs,
        }
    }
}

impl<'t> std::ops::Div<f64> for Var<'t> {
    type Output = Var<'t>;
    fn div(self, rhs: f64) -> Self::Output {
        self * (1.0 / rhs)
    }
}

impl<'t> Scalar for Var<'t> {
    fn val(self) -> f64 {
        self.v
    }

    fn exp(self) -> Self {
        let e = self.v.exp();
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, e),
            v: e,
        }
    }

    fn ln(self) -> Self {
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, 1.0 / self.v),
            v: self.v.ln(),
        }
    }

    fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, 0.5 / r),
            v: r,
        }
    }

    fn tanh(self) -> Self {
        let t = self.v.tanh();
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, 1.0 - t * t),
            v: t,
        }
    }

    fn sin(self) -> Self {
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, self.v.cos()),
            v: self.v.sin(),
        }
    }

    fn cos(self) -> Self {
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, -self.v.sin()),
            v: self.v.cos(),
        }
    }

    fn powi(self, n: i32) -> Self {
        Var {
            tape: self.tape,
            idx: self
                .tape
                .push1(self.idx, f64::from(n) * self.v.powi(n - 1)),
            v: self.v.powi(n),
        }
    }

    fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        Var {
            tape: self.tape,
            idx: self.tape.push1(self.idx, -inv * inv),
            v: inv,
        }
    }

    fn mul_add(self, b: Self, c: Self) -> Self {
        same_tape!(self, b);
        same_tape!(self, c);
        Var {
            tape: self.tape,
            idx: self
                .tape
                .push3(self.idx, b.v, b.idx, self.v, c.idx, 1.0),
            v: self.v * b.v + c.v,
        }
    }

    fn max_val(self, other: Self) -> Self {
        if self.v >= other.v {
            self
        } else {
            other
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::log_sum_exp;

    fn central_diff(f: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
        (f(x + h) - f(x - h)) / (2.0 * h)
    }

    #[test]
    fn gradient_of_product() {
        let tape = Tape::new();
        let x = tape.var(3.0);
        let y = tape.var(4.0);
        let z = x * y + x;
        assert_eq!(z.value(), 15.0);
        let g = tape.gradient(z);
        assert_eq!(g[x.index()], 5.0);
        assert_eq!(g[y.index()], 3.0);
    }

    #[test]
    fn elementary_functions_match_finite_differences() {
        let cases: Vec<(fn(Var) -> Var, fn(f64) -> f64, f64)> = vec![
            (|x| x.exp(), |x| x.exp(), 0.7),
            (|x| x.ln(), |x| x.ln(), 1.3),
            (|x| x.sqrt(), |x| x.sqrt(), 2.1),
            (|x| Scalar::tanh(x), |x| x.tanh(), -0.4),
            (|x| Scalar::sin(x), |x| x.sin(), 0.9),
            (|x| Scalar::cos(x), |x| x.cos(), 0.9),
            (|x| x.powi(4), |x| x.powi(4), 1.2),
            (|x| x.recip(), |x| 1.0 / x, 0.8),
        ];
        for (vf, ff, at) in cases {
            let tape = Tape::new();
            let x = tape.var(at);
            let y = vf(x);
            let g = tape.gradient(y)[x.index()];
            let fd = central_diff(ff, at, 1e-6);
            assert!(
                (g - fd).abs() <= 1e-4 * fd.abs().max(1.0),
                "at {at}: {g} vs {fd}"
            );
        }
    }

    #[test]
    fn mul_add_partials() {
        let tape = Tape::new();
        let a = tape.var(2.0);
        let b = tape.var(-3.0);
        let c = tape.var(0.5);
        let y = a.mul_add(b, c);
        assert_eq!(y.value(), -5.5);
        let g = tape.gradient(y);
        assert_eq!(g[a.index()], -3.0);
        assert_eq!(g[b.index()], 2.0);
        assert_eq!(g[c.index()], 1.0);
    }

    #[test]
    fn fan_out_accumulates() {
        // y = x^2 via x*x, reused var
        let tape = Tape::new();
        let x = tape.var(5.0);
        let y = x * x;
        let g = tape.gradient(y);
        assert_eq!(g[x.index()], 10.0);
    }

    #[test]
    fn generic_logsumexp_gradient_is_softmax() {
        let tape = Tape::new();
        let xs = [tape.var(0.1), tape.var(-0.4), tape.var(1.2)];
        let y = log_sum_exp(&xs);
        let g = tape.gradient(y);
        let m: f64 = 1.2;
        let z: f64 = (0.1f64 - m).exp() + (-0.4f64 - m).exp() + (1.2f64 - m).exp();
        for (i, x) in xs.iter().enumerate() {
            let want = (x.value() - m).exp() / z;
            assert!((g[x.index()] - want).abs() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn branch_by_value_differentiates_taken_branch() {
        let tape = Tape::new();
        let a = tape.var(2.0);
        let b = tape.var(3.0);
        let y = a.max_val(b) * 2.0;
        let g = tape.gradient(y);
        assert_eq!(g[a.index()], 0.0);
        assert_eq!(g[b.index()], 2.0);
    }
}
