//! Rational expressions over named variables.
//!
//! Expressions are immutable DAGs: cloning shares subtrees, and evaluation,
//! differentiation and substitution memoize on node identity so shared
//! subexpressions are processed once.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::ring::{rational_to_f64, Ring};
use super::trunc::Series;
use super::SeriesError;

#[derive(Debug)]
pub enum Node {
    Const(BigRational),
    Var(Arc<str>),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Neg(Expr),
    Pow(Expr, u32),
}

#[derive(Clone, Debug)]
pub struct Expr(Arc<Node>);

type Key = usize;

impl Expr {
    fn key(&self) -> Key {
        Arc::as_ptr(&self.0) as Key
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn constant(q: BigRational) -> Self {
        Expr(Arc::new(Node::Const(q)))
    }

    pub fn int(n: i64) -> Self {
        Self::constant(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn var(name: &str) -> Self {
        Expr(Arc::new(Node::Var(Arc::from(name))))
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self.node() {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }

    fn is_const_zero(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_zero())
    }

    fn is_const_one(&self) -> bool {
        self.as_const().is_some_and(|q| q.is_one())
    }

    pub fn ptr_eq(&self, other: &Expr) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    pub fn pow(&self, k: u32) -> Expr {
        match (k, self.as_const()) {
            (0, _) => Expr::int(1),
            (1, _) => self.clone(),
            (_, Some(c)) => Expr::constant(num_traits::pow(c.clone(), k as usize)),
            _ => Expr(Arc::new(Node::Pow(self.clone(), k))),
        }
    }

    /// `1 + t + ... + t^k`-style helper: sum of `x^i` for `i` in `lo..=hi`.
    pub fn power_sum(&self, lo: u32, hi: u32) -> Expr {
        (lo..=hi).fold(Expr::int(0), |acc, i| acc + self.pow(i))
    }

    /// Free variables.
    pub fn vars(&self) -> BTreeSet<String> {
        let mut seen = HashMap::new();
        let mut out = BTreeSet::new();
        self.collect_vars(&mut seen, &mut out);
        out
    }

    fn collect_vars(&self, seen: &mut HashMap<Key, ()>, out: &mut BTreeSet<String>) {
        if seen.insert(self.key(), ()).is_some() {
            return;
        }
        match self.node() {
            Node::Const(_) => {}
            Node::Var(v) => {
                out.insert(v.to_string());
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.collect_vars(seen, out);
                b.collect_vars(seen, out);
            }
            Node::Neg(a) | Node::Pow(a, _) => a.collect_vars(seen, out),
        }
    }

    pub fn depends_on(&self, var: &str) -> bool {
        self.vars().contains(var)
    }

    /// Every distinct denominator appearing in a division.
    pub fn denominators(&self) -> Vec<Expr> {
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        self.collect_denominators(&mut seen, &mut out);
        out
    }

    fn collect_denominators(&self, seen: &mut HashMap<Key, ()>, out: &mut Vec<Expr>) {
        if seen.insert(self.key(), ()).is_some() {
            return;
        }
        match self.node() {
            Node::Const(_) | Node::Var(_) => {}
            Node::Div(a, b) => {
                out.push(b.clone());
                a.collect_denominators(seen, out);
                b.collect_denominators(seen, out);
            }
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) => {
                a.collect_denominators(seen, out);
                b.collect_denominators(seen, out);
            }
            Node::Neg(a) | Node::Pow(a, _) => a.collect_denominators(seen, out),
        }
    }

    /// Number of distinct nodes.
    pub fn size(&self) -> usize {
        let mut seen = HashMap::new();
        self.count_nodes(&mut seen);
        seen.len()
    }

    fn count_nodes(&self, seen: &mut HashMap<Key, ()>) {
        if seen.insert(self.key(), ()).is_some() {
            return;
        }
        match self.node() {
            Node::Const(_) | Node::Var(_) => {}
            Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
                a.count_nodes(seen);
                b.count_nodes(seen);
            }
            Node::Neg(a) | Node::Pow(a, _) => a.count_nodes(seen),
        }
    }

    /// Symbolic partial derivative.
    pub fn diff(&self, var: &str) -> Expr {
        let mut memo = HashMap::new();
        self.diff_memo(var, &mut memo)
    }

    fn diff_memo(&self, var: &str, memo: &mut HashMap<Key, Expr>) -> Expr {
        if let Some(d) = memo.get(&self.key()) {
            return d.clone();
        }
        let d = match self.node() {
            Node::Const(_) => Expr::int(0),
            Node::Var(v) => Expr::int(if &**v == var { 1 } else { 0 }),
            Node::Add(a, b) => a.diff_memo(var, memo) + b.diff_memo(var, memo),
            Node::Sub(a, b) => a.diff_memo(var, memo) - b.diff_memo(var, memo),
            Node::Neg(a) => -a.diff_memo(var, memo),
            Node::Mul(a, b) => {
                let da = a.diff_memo(var, memo);
                let db = b.diff_memo(var, memo);
                da * b + a * db
            }
            Node::Div(a, b) => {
                // (a/b)' = (a' - (a/b) b') / b
                let da = a.diff_memo(var, memo);
                let db = b.diff_memo(var, memo);
                (da - self * db) / b
            }
            Node::Pow(a, k) => {
                let da = a.diff_memo(var, memo);
                Expr::int(i64::from(*k)) * a.pow(k - 1) * da
            }
        };
        memo.insert(self.key(), d.clone());
        d
    }

    /// Replaces variables by expressions.
    pub fn substitute(&self, bindings: &HashMap<&str, Expr>) -> Expr {
        let mut memo = HashMap::new();
        self.subst_memo(bindings, &mut memo)
    }

    fn subst_memo(&self, bindings: &HashMap<&str, Expr>, memo: &mut HashMap<Key, Expr>) -> Expr {
        if let Some(e) = memo.get(&self.key()) {
            return e.clone();
        }
        let e = match self.node() {
            Node::Const(_) => self.clone(),
            Node::Var(v) => bindings.get(&**v).cloned().unwrap_or_else(|| self.clone()),
            Node::Add(a, b) => a.subst_memo(bindings, memo) + b.subst_memo(bindings, memo),
            Node::Sub(a, b) => a.subst_memo(bindings, memo) - b.subst_memo(bindings, memo),
            Node::Mul(a, b) => a.subst_memo(bindings, memo) * b.subst_memo(bindings, memo),
            Node::Div(a, b) => a.subst_memo(bindings, memo) / b.subst_memo(bindings, memo),
            Node::Neg(a) => -a.subst_memo(bindings, memo),
            Node::Pow(a, k) => a.subst_memo(bindings, memo).pow(*k),
        };
        memo.insert(self.key(), e.clone());
        e
    }

    pub fn eval<A: Algebra>(&self, env: &Env<A>) -> Result<A, SeriesError> {
        Evaluator::new(env).eval(self)
    }

    /// Floating-point value under `f64` bindings.
    pub fn eval_f64(&self, bindings: &[(&str, f64)]) -> Result<f64, SeriesError> {
        let mut env = Env::new(());
        for (k, v) in bindings {
            env.bind(k, *v);
        }
        self.eval(&env)
    }
}

fn add(a: Expr, b: Expr) -> Expr {
    if a.is_const_zero() {
        return b;
    }
    if b.is_const_zero() {
        return a;
    }
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return Expr::constant(x + y);
    }
    Expr(Arc::new(Node::Add(a, b)))
}

fn sub(a: Expr, b: Expr) -> Expr {
    if b.is_const_zero() {
        return a;
    }
    if a.ptr_eq(&b) {
        return Expr::int(0);
    }
    if a.is_const_zero() {
        return neg(b);
    }
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return Expr::constant(x - y);
    }
    Expr(Arc::new(Node::Sub(a, b)))
}

fn mul(a: Expr, b: Expr) -> Expr {
    if a.is_const_zero() || b.is_const_zero() {
        return Expr::int(0);
    }
    if a.is_const_one() {
        return b;
    }
    if b.is_const_one() {
        return a;
    }
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        return Expr::constant(x * y);
    }
    Expr(Arc::new(Node::Mul(a, b)))
}

fn div(a: Expr, b: Expr) -> Expr {
    if b.is_const_one() {
        return a;
    }
    if a.is_const_zero() && !b.is_const_zero() {
        return Expr::int(0);
    }
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        if !y.is_zero() {
            return Expr::constant(x / y);
        }
    }
    Expr(Arc::new(Node::Div(a, b)))
}

fn neg(a: Expr) -> Expr {
    match a.node() {
        Node::Const(x) => Expr::constant(-x),
        Node::Neg(inner) => inner.clone(),
        _ => Expr(Arc::new(Node::Neg(a))),
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $f:ident) => {
        impl ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $f(self, rhs)
            }
        }
        impl ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $f(self, rhs.clone())
            }
        }
        impl ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $f(self.clone(), rhs)
            }
        }
        impl ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $f(self.clone(), rhs.clone())
            }
        }
        impl ops::$trait<i64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $f(self, Expr::int(rhs))
            }
        }
        impl ops::$trait<i64> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: i64) -> Expr {
                $f(self.clone(), Expr::int(rhs))
            }
        }
        impl ops::$trait<Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                $f(Expr::int(self), rhs)
            }
        }
        impl ops::$trait<&Expr> for i64 {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                $f(Expr::int(self), rhs.clone())
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(self)
    }
}

impl ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        neg(self.clone())
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node() {
            Node::Const(q) => write!(f, "{q}"),
            Node::Var(v) => write!(f, "{v}"),
            Node::Add(a, b) => write!(f, "({a} + {b})"),
            Node::Sub(a, b) => write!(f, "({a} - {b})"),
            Node::Mul(a, b) => write!(f, "{a}*{b}"),
            Node::Div(a, b) => write!(f, "{a}/{b}"),
            Node::Neg(a) => write!(f, "-{a}"),
            Node::Pow(a, k) => write!(f, "{a}^{k}"),
        }
    }
}

/// Values an expression can be evaluated in.
pub trait Algebra: Clone {
    /// Evaluation context (the truncation order for series).
    type Ctx: Clone;
    fn constant(ctx: &Self::Ctx, q: &BigRational) -> Result<Self, SeriesError>;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn div(&self, other: &Self) -> Result<Self, SeriesError>;
    fn neg(&self) -> Self;
    fn pow(&self, k: u32) -> Self;
}

impl Algebra for f64 {
    type Ctx = ();
    fn constant(_: &(), q: &BigRational) -> Result<Self, SeriesError> {
        rational_to_f64(q).ok_or(SeriesError::Unrepresentable)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self / other)
    }
    fn neg(&self) -> Self {
        -self
    }
    fn pow(&self, k: u32) -> Self {
        self.powi(k as i32)
    }
}

impl<R: Ring> Algebra for Series<R> {
    type Ctx = usize;
    fn constant(order: &usize, q: &BigRational) -> Result<Self, SeriesError> {
        let c = R::from_rational(q).ok_or(SeriesError::Unrepresentable)?;
        Ok(Series::constant(c, *order))
    }
    fn add(&self, other: &Self) -> Self {
        Series::add(self, other)
    }
    fn sub(&self, other: &Self) -> Self {
        Series::sub(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Series::mul(self, other)
    }
    fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Series::div(self, other)
    }
    fn neg(&self) -> Self {
        Series::neg(self)
    }
    fn pow(&self, k: u32) -> Self {
        Series::pow(self, k)
    }
}

/// Variable bindings plus the evaluation context.
#[derive(Clone, Debug)]
pub struct Env<A: Algebra> {
    ctx: A::Ctx,
    values: HashMap<String, A>,
}

impl<A: Algebra> Env<A> {
    pub fn new(ctx: A::Ctx) -> Self {
        Env {
            ctx,
            values: HashMap::new(),
        }
    }

    pub fn bind(&mut self, var: &str, value: A) -> &mut Self {
        self.values.insert(var.to_string(), value);
        self
    }

    pub fn with(mut self, var: &str, value: A) -> Self {
        self.bind(var, value);
        self
    }

    pub fn get(&self, var: &str) -> Option<&A> {
        self.values.get(var)
    }

    pub fn ctx(&self) -> &A::Ctx {
        &self.ctx
    }
}

/// Evaluates several expressions under one environment, sharing work
/// between common subexpressions.
pub struct Evaluator<'a, A: Algebra> {
    env: &'a Env<A>,
    memo: HashMap<Key, A>,
}

impl<'a, A: Algebra> Evaluator<'a, A> {
    pub fn new(env: &'a Env<A>) -> Self {
        Evaluator {
            env,
            memo: HashMap::new(),
        }
    }

    /// Seeds a precomputed value for a node (used to freeze subexpressions).
    pub fn preset(&mut self, e: &Expr, value: A) {
        self.memo.insert(e.key(), value);
    }

    pub fn eval(&mut self, e: &Expr) -> Result<A, SeriesError> {
        if let Some(v) = self.memo.get(&e.key()) {
            return Ok(v.clone());
        }
        let v = match e.node() {
            Node::Const(q) => A::constant(&self.env.ctx, q)?,
            Node::Var(name) => self
                .env
                .values
                .get(&**name)
                .cloned()
                .ok_or_else(|| SeriesError::UnboundVariable(name.to_string()))?,
            Node::Add(a, b) => self.eval(a)?.add(&self.eval(b)?),
            Node::Sub(a, b) => self.eval(a)?.sub(&self.eval(b)?),
            Node::Mul(a, b) => self.eval(a)?.mul(&self.eval(b)?),
            Node::Div(a, b) => self.eval(a)?.div(&self.eval(b)?)?,
            Node::Neg(a) => self.eval(a)?.neg(),
            Node::Pow(a, k) => self.eval(a)?.pow(*k),
        };
        self.memo.insert(e.key(), v.clone());
        Ok(v)
    }
}

/// Maximal non-leaf subtrees of `e` that depend on none of `vars`.
pub fn frozen_subtrees(e: &Expr, vars: &[&str]) -> Vec<Expr> {
    let mut dep: HashMap<Key, bool> = HashMap::new();
    mark_dependence(e, vars, &mut dep);
    let mut out = Vec::new();
    let mut seen = HashMap::new();
    collect_frozen(e, &dep, &mut seen, &mut out);
    out
}

fn mark_dependence(e: &Expr, vars: &[&str], dep: &mut HashMap<Key, bool>) -> bool {
    if let Some(&d) = dep.get(&e.key()) {
        return d;
    }
    let d = match e.node() {
        Node::Const(_) => false,
        Node::Var(v) => vars.contains(&&**v),
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            let da = mark_dependence(a, vars, dep);
            let db = mark_dependence(b, vars, dep);
            da || db
        }
        Node::Neg(a) | Node::Pow(a, _) => mark_dependence(a, vars, dep),
    };
    dep.insert(e.key(), d);
    d
}

fn collect_frozen(
    e: &Expr,
    dep: &HashMap<Key, bool>,
    seen: &mut HashMap<Key, ()>,
    out: &mut Vec<Expr>,
) {
    if seen.insert(e.key(), ()).is_some() {
        return;
    }
    if !dep[&e.key()] {
        if !matches!(e.node(), Node::Const(_) | Node::Var(_)) {
            out.push(e.clone());
        }
        return;
    }
    match e.node() {
        Node::Const(_) | Node::Var(_) => {}
        Node::Add(a, b) | Node::Sub(a, b) | Node::Mul(a, b) | Node::Div(a, b) => {
            collect_frozen(a, dep, seen, out);
            collect_frozen(b, dep, seen, out);
        }
        Node::Neg(a) | Node::Pow(a, _) => collect_frozen(a, dep, seen, out),
    }
}
