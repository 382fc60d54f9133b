//! Flat evaluation tapes for batches of expressions.
//!
//! Structurally identical subtrees are stored once, so a batch of entries
//! built from shared pieces (cofactors, determinants) evaluates in time
//! proportional to the number of distinct subexpressions. Each operation is
//! applied exactly as the tree evaluator applies it, so results agree
//! bit for bit.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::expr::{Expr, Func};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Lit(f64),
    Var(usize),
    Neg(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    PowI(usize, i32),
    PowF(usize, f64),
    Call(Func, usize),
}

fn func_tag(f: Func) -> u8 {
    match f {
        Func::Sin => 0,
        Func::Cos => 1,
        Func::Tan => 2,
        Func::Exp => 3,
        Func::Log => 4,
        Func::Sqrt => 5,
        Func::Abs => 6,
    }
}

impl Op {
    fn key(&self) -> (u8, u64, u64) {
        match *self {
            Op::Lit(x) => (0, x.to_bits(), 0),
            Op::Var(i) => (1, i as u64, 0),
            Op::Neg(a) => (2, a as u64, 0),
            Op::Add(a, b) => (3, a as u64, b as u64),
            Op::Sub(a, b) => (4, a as u64, b as u64),
            Op::Mul(a, b) => (5, a as u64, b as u64),
            Op::Div(a, b) => (6, a as u64, b as u64),
            Op::PowI(a, e) => (7, a as u64, e as i64 as u64),
            Op::PowF(a, e) => (8, a as u64, e.to_bits()),
            Op::Call(f, a) => (16 + func_tag(f), a as u64, 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tape {
    ops: Vec<Op>,
    outputs: Vec<usize>,
    vars: usize,
}

struct Builder {
    ops: Vec<Op>,
    seen: BTreeMap<(u8, u64, u64), usize>,
    vars: usize,
}

impl Builder {
    fn push(&mut self, op: Op) -> usize {
        let key = op.key();
        if let Some(&i) = self.seen.get(&key) {
            return i;
        }
        self.ops.push(op);
        self.seen.insert(key, self.ops.len() - 1);
        self.ops.len() - 1
    }

    fn node(&mut self, e: &Expr) -> Option<usize> {
        let op = match e {
            Expr::Lit(x) => Op::Lit(*x),
            Expr::Var(i) => {
                self.vars = self.vars.max(i + 1);
                Op::Var(*i)
            }
            Expr::Const(c) => Op::Lit(c.value()),
            Expr::Neg(a) => Op::Neg(self.node(a)?),
            Expr::Add(a, b) => Op::Add(self.node(a)?, self.node(b)?),
            Expr::Sub(a, b) => Op::Sub(self.node(a)?, self.node(b)?),
            Expr::Mul(a, b) => Op::Mul(self.node(a)?, self.node(b)?),
            Expr::Div(a, b) => Op::Div(self.node(a)?, self.node(b)?),
            Expr::Pow(a, b) => {
                let base = self.node(a)?;
                let ex = b.evaluate::<f64>(&[]).ok()?;
                if libm::trunc(ex) == ex && libm::fabs(ex) <= i32::MAX as f64 {
                    Op::PowI(base, ex as i32)
                } else {
                    Op::PowF(base, ex)
                }
            }
            Expr::Call(f, a) => Op::Call(*f, self.node(a)?),
        };
        Some(self.push(op))
    }
}

impl Tape {
    /// `None` when an exponent cannot be folded to a constant; callers then
    /// evaluate the trees directly.
    pub fn compile(exprs: &[Expr]) -> Option<Tape> {
        let mut b = Builder { ops: Vec::new(), seen: BTreeMap::new(), vars: 0 };
        let outputs = exprs.iter().map(|e| b.node(e)).collect::<Option<Vec<_>>>()?;
        Some(Tape { ops: b.ops, outputs, vars: b.vars })
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// All outputs at `env`, or `None` on any domain violation, non-finite
    /// output or short environment. Tree evaluation reports the precise error.
    pub fn eval<S: Scalar>(&self, env: &[S]) -> Option<Vec<S>> {
        if env.len() < self.vars {
            return None;
        }
        let mut v: Vec<S> = Vec::with_capacity(self.ops.len());
        for op in &self.ops {
            let x = match *op {
                Op::Lit(x) => S::from_f64(x),
                Op::Var(i) => env[i],
                Op::Neg(a) => -v[a],
                Op::Add(a, b) => v[a] + v[b],
                Op::Sub(a, b) => v[a] - v[b],
                Op::Mul(a, b) => v[a] * v[b],
                Op::Div(a, b) => {
                    if v[b].value() == 0.0 {
                        return None;
                    }
                    v[a] / v[b]
                }
                Op::PowI(a, e) => {
                    if e < 0 && v[a].value() == 0.0 {
                        return None;
                    }
                    v[a].powi(e)
                }
                Op::PowF(a, e) => {
                    let bv = v[a].value();
                    if bv < 0.0 || bv == 0.0 && e < 0.0 {
                        return None;
                    }
                    v[a].powf(e)
                }
                Op::Call(f, a) => {
                    let x = v[a];
                    match f {
                        Func::Sin => x.sin(),
                        Func::Cos => x.cos(),
                        Func::Tan => x.tan(),
                        Func::Exp => x.exp(),
                        Func::Log if x.value() <= 0.0 => return None,
                        Func::Log => x.ln(),
                        Func::Sqrt if x.value() < 0.0 => return None,
                        Func::Sqrt => x.sqrt(),
                        Func::Abs => x.abs(),
                    }
                }
            };
            v.push(x);
        }
        let out: Vec<S> = self.outputs.iter().map(|&i| v[i]).collect();
        if out.iter().all(|x| x.value().is_finite()) {
            Some(out)
        } else {
            None
        }
    }
}
