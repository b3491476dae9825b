//! Terms, normal-form atoms and quantifier-free formulas.
//!
//! Atoms are always `t > 0` or `t >= 0`. Negation is eliminated when a
//! formula is built (sign flips on the term), and an equality `a = b` is the
//! pair `a - b >= 0`, `b - a >= 0`.
//!
//! Variables are referenced by index into whatever variable table the term is
//! evaluated against: the problem's declarations for solver formulas, the
//! system's state vector for ODE right-hand sides and trajectory invariants.

use std::collections::BTreeSet;
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::interval::{Interval, VarBox};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    Neg,
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
    Abs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Min,
    Max,
}

impl UnaryOp {
    pub fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Abs => "abs",
        }
    }

    pub fn apply(self, a: Interval) -> Interval {
        match self {
            UnaryOp::Neg => -a,
            UnaryOp::Exp => a.exp(),
            UnaryOp::Log => a.ln(),
            UnaryOp::Sqrt => a.sqrt(),
            UnaryOp::Sin => a.sin(),
            UnaryOp::Cos => a.cos(),
            UnaryOp::Abs => a.abs(),
        }
    }

    fn apply_f64(self, a: f64) -> f64 {
        match self {
            UnaryOp::Neg => -a,
            UnaryOp::Exp => a.exp(),
            UnaryOp::Log => a.ln(),
            UnaryOp::Sqrt => a.sqrt(),
            UnaryOp::Sin => a.sin(),
            UnaryOp::Cos => a.cos(),
            UnaryOp::Abs => a.abs(),
        }
    }
}

impl BinaryOp {
    pub fn name(self) -> &'static str {
        match self {
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Min => "min",
            BinaryOp::Max => "max",
        }
    }

    pub fn apply(self, a: Interval, b: Interval) -> Interval {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
            BinaryOp::Min => a.min(&b),
            BinaryOp::Max => a.max(&b),
        }
    }

    fn apply_f64(self, a: f64, b: f64) -> f64 {
        match self {
            BinaryOp::Add => a + b,
            BinaryOp::Sub => a - b,
            BinaryOp::Mul => a * b,
            BinaryOp::Div => a / b,
            BinaryOp::Min => a.min(b),
            BinaryOp::Max => a.max(b),
        }
    }
}

/// Smallest floating-point interval containing an exact rational.
pub fn rational_to_interval(r: &BigRational) -> Interval {
    let approx = r.to_f64().unwrap_or(f64::NAN);
    if !approx.is_finite() {
        return if r.is_positive() {
            Interval::new(f64::MAX, f64::INFINITY)
        } else {
            Interval::new(f64::NEG_INFINITY, f64::MIN)
        };
    }
    let exact = |x: f64| BigRational::from_float(x).expect("finite float");
    let mut lo = approx;
    while exact(lo) > *r {
        lo = lo.next_down();
    }
    let mut hi = approx;
    while exact(hi) < *r {
        hi = hi.next_up();
    }
    if lo == hi {
        Interval::point(lo)
    } else {
        Interval::new(lo, hi)
    }
}

/// An expression tree over real variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(usize),
    Const(BigRational),
    Unary(UnaryOp, Arc<Term>),
    Binary(BinaryOp, Arc<Term>, Arc<Term>),
    /// Integer power.
    Pow(Arc<Term>, i32),
}

impl Term {
    pub fn var(index: usize) -> Term {
        Term::Var(index)
    }

    pub fn int(n: i64) -> Term {
        Term::Const(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(num: i64, den: i64) -> Term {
        Term::Const(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    /// The exact rational value of a finite float.
    pub fn float(x: f64) -> Term {
        Term::Const(BigRational::from_float(x).expect("finite constant"))
    }

    pub fn unary(op: UnaryOp, a: Term) -> Term {
        Term::Unary(op, Arc::new(a))
    }

    pub fn binary(op: BinaryOp, a: Term, b: Term) -> Term {
        Term::Binary(op, Arc::new(a), Arc::new(b))
    }

    pub fn pow(a: Term, k: i32) -> Term {
        Term::Pow(Arc::new(a), k)
    }

    pub fn exp(self) -> Term {
        Term::unary(UnaryOp::Exp, self)
    }

    pub fn ln(self) -> Term {
        Term::unary(UnaryOp::Log, self)
    }

    pub fn sqrt(self) -> Term {
        Term::unary(UnaryOp::Sqrt, self)
    }

    pub fn sin(self) -> Term {
        Term::unary(UnaryOp::Sin, self)
    }

    pub fn cos(self) -> Term {
        Term::unary(UnaryOp::Cos, self)
    }

    pub fn abs(self) -> Term {
        Term::unary(UnaryOp::Abs, self)
    }

    pub fn min(self, other: Term) -> Term {
        Term::binary(BinaryOp::Min, self, other)
    }

    pub fn max(self, other: Term) -> Term {
        Term::binary(BinaryOp::Max, self, other)
    }

    pub fn powi(self, k: i32) -> Term {
        Term::pow(self, k)
    }

    pub fn as_const(&self) -> Option<&BigRational> {
        match self {
            Term::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Negation that cancels an outer negation instead of stacking one.
    pub fn negate(&self) -> Term {
        match self {
            Term::Unary(UnaryOp::Neg, inner) => (**inner).clone(),
            Term::Const(c) => Term::Const(-c),
            other => Term::unary(UnaryOp::Neg, other.clone()),
        }
    }

    /// Natural interval extension: evaluates every node with interval
    /// arithmetic. Variables missing from `vars` panic.
    pub fn eval(&self, vars: &[Interval]) -> Interval {
        match self {
            Term::Var(i) => vars[*i],
            Term::Const(c) => rational_to_interval(c),
            Term::Unary(op, a) => op.apply(a.eval(vars)),
            Term::Binary(op, a, b) => op.apply(a.eval(vars), b.eval(vars)),
            Term::Pow(a, k) => a.eval(vars).powi(*k),
        }
    }

    /// Floating-point evaluation at a point (no rounding control; for
    /// simulation and sampling).
    pub fn eval_f64(&self, vars: &[f64]) -> f64 {
        match self {
            Term::Var(i) => vars[*i],
            Term::Const(c) => c.to_f64().unwrap_or(f64::NAN),
            Term::Unary(op, a) => op.apply_f64(a.eval_f64(vars)),
            Term::Binary(op, a, b) => op.apply_f64(a.eval_f64(vars), b.eval_f64(vars)),
            Term::Pow(a, k) => a.eval_f64(vars).powi(*k),
        }
    }

    pub fn collect_vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Term::Var(i) => {
                out.insert(*i);
            }
            Term::Const(_) => {}
            Term::Unary(_, a) | Term::Pow(a, _) => a.collect_vars(out),
            Term::Binary(_, a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    /// Renumbers variables through `map`.
    pub fn map_vars(&self, map: &impl Fn(usize) -> usize) -> Term {
        match self {
            Term::Var(i) => Term::Var(map(*i)),
            Term::Const(_) => self.clone(),
            Term::Unary(op, a) => Term::unary(*op, a.map_vars(map)),
            Term::Binary(op, a, b) => Term::binary(*op, a.map_vars(map), b.map_vars(map)),
            Term::Pow(a, k) => Term::pow(a.map_vars(map), *k),
        }
    }

    /// Whether the term is built only from operations that are smooth on
    /// their domain (no `abs`, `min`, `max`).
    pub fn is_smooth(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::Unary(UnaryOp::Abs, _) => false,
            Term::Unary(_, a) | Term::Pow(a, _) => a.is_smooth(),
            Term::Binary(BinaryOp::Min | BinaryOp::Max, _, _) => false,
            Term::Binary(_, a, b) => a.is_smooth() && b.is_smooth(),
        }
    }

    /// Symbolic partial derivative with light constant folding. `None` for
    /// non-smooth terms.
    pub fn derivative(&self, var: usize) -> Option<Term> {
        use Term::*;
        Some(match self {
            Var(i) => {
                if *i == var {
                    Term::int(1)
                } else {
                    Term::int(0)
                }
            }
            Const(_) => Term::int(0),
            Unary(op, a) => {
                let da = a.derivative(var)?;
                let a = (**a).clone();
                match op {
                    UnaryOp::Neg => da.negate(),
                    UnaryOp::Exp => smul(a.exp(), da),
                    UnaryOp::Log => sdiv(da, a),
                    UnaryOp::Sqrt => sdiv(da, smul(Term::int(2), a.sqrt())),
                    UnaryOp::Sin => smul(a.cos(), da),
                    UnaryOp::Cos => smul(a.sin(), da).negate(),
                    UnaryOp::Abs => return None,
                }
            }
            Binary(op, a, b) => {
                let da = a.derivative(var)?;
                let db = b.derivative(var)?;
                let (a, b) = ((**a).clone(), (**b).clone());
                match op {
                    BinaryOp::Add => sadd(da, db),
                    BinaryOp::Sub => ssub(da, db),
                    BinaryOp::Mul => sadd(smul(da, b), smul(a, db)),
                    BinaryOp::Div => ssub(sdiv(da, b.clone()), sdiv(smul(a, db), spow(b, 2))),
                    BinaryOp::Min | BinaryOp::Max => return None,
                }
            }
            Pow(a, k) => {
                let da = a.derivative(var)?;
                let k = *k;
                if k == 0 {
                    Term::int(0)
                } else {
                    smul(smul(Term::int(i64::from(k)), spow((**a).clone(), k - 1)), da)
                }
            }
        })
    }
}

fn is_const(t: &Term, v: i64) -> bool {
    matches!(t, Term::Const(c) if *c == BigRational::from_i64(v).expect("small int"))
}

/// Sum with folding of zero and of constant pairs.
pub(crate) fn sadd(a: Term, b: Term) -> Term {
    match (&a, &b) {
        (Term::Const(x), Term::Const(y)) => Term::Const(x + y),
        _ if is_const(&a, 0) => b,
        _ if is_const(&b, 0) => a,
        _ => Term::binary(BinaryOp::Add, a, b),
    }
}

pub(crate) fn ssub(a: Term, b: Term) -> Term {
    match (&a, &b) {
        (Term::Const(x), Term::Const(y)) => Term::Const(x - y),
        _ if is_const(&b, 0) => a,
        _ if is_const(&a, 0) => b.negate(),
        _ => Term::binary(BinaryOp::Sub, a, b),
    }
}

pub(crate) fn smul(a: Term, b: Term) -> Term {
    match (&a, &b) {
        (Term::Const(x), Term::Const(y)) => Term::Const(x * y),
        _ if is_const(&a, 0) || is_const(&b, 0) => Term::int(0),
        _ if is_const(&a, 1) => b,
        _ if is_const(&b, 1) => a,
        _ if is_const(&a, -1) => b.negate(),
        _ if is_const(&b, -1) => a.negate(),
        _ => Term::binary(BinaryOp::Mul, a, b),
    }
}

fn sdiv(a: Term, b: Term) -> Term {
    if is_const(&a, 0) {
        return Term::int(0);
    }
    if is_const(&b, 1) {
        return a;
    }
    Term::binary(BinaryOp::Div, a, b)
}

fn spow(a: Term, k: i32) -> Term {
    match k {
        0 => Term::int(1),
        1 => a,
        _ => Term::pow(a, k),
    }
}

impl ops::Add for Term {
    type Output = Term;
    fn add(self, rhs: Term) -> Term {
        Term::binary(BinaryOp::Add, self, rhs)
    }
}

impl ops::Sub for Term {
    type Output = Term;
    fn sub(self, rhs: Term) -> Term {
        Term::binary(BinaryOp::Sub, self, rhs)
    }
}

impl ops::Mul for Term {
    type Output = Term;
    fn mul(self, rhs: Term) -> Term {
        Term::binary(BinaryOp::Mul, self, rhs)
    }
}

impl ops::Div for Term {
    type Output = Term;
    fn div(self, rhs: Term) -> Term {
        Term::binary(BinaryOp::Div, self, rhs)
    }
}

impl ops::Neg for Term {
    type Output = Term;
    fn neg(self) -> Term {
        Term::unary(UnaryOp::Neg, self)
    }
}

/// A term flattened into post-order for repeated evaluation and for the
/// forward/backward passes of the contractor.
#[derive(Clone, Debug)]
pub struct CompiledTerm {
    pub(crate) nodes: Vec<Node>,
}

#[derive(Clone, Debug)]
pub(crate) enum Node {
    Var(usize),
    Const(Interval),
    Unary(UnaryOp, usize),
    Binary(BinaryOp, usize, usize),
    Pow(usize, i32),
}

impl CompiledTerm {
    pub fn new(term: &Term) -> Self {
        let mut nodes = Vec::new();
        flatten(term, &mut nodes);
        Self { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Evaluates every node into `values` (resized as needed) and returns
    /// the root value.
    pub fn eval_into(&self, vars: &[Interval], values: &mut Vec<Interval>) -> Interval {
        values.clear();
        for node in &self.nodes {
            let v = match *node {
                Node::Var(i) => vars[i],
                Node::Const(c) => c,
                Node::Unary(op, a) => op.apply(values[a]),
                Node::Binary(op, a, b) => op.apply(values[a], values[b]),
                Node::Pow(a, k) => values[a].powi(k),
            };
            values.push(v);
        }
        *values.last().expect("non-empty term")
    }

    pub fn eval(&self, vars: &[Interval]) -> Interval {
        let mut scratch = Vec::with_capacity(self.nodes.len());
        self.eval_into(vars, &mut scratch)
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        self.nodes
            .iter()
            .filter_map(|n| match n {
                Node::Var(i) => Some(*i),
                _ => None,
            })
            .collect()
    }
}

fn flatten(term: &Term, nodes: &mut Vec<Node>) -> usize {
    let node = match term {
        Term::Var(i) => Node::Var(*i),
        Term::Const(c) => Node::Const(rational_to_interval(c)),
        Term::Unary(op, a) => {
            let a = flatten(a, nodes);
            Node::Unary(*op, a)
        }
        Term::Binary(op, a, b) => {
            let a = flatten(a, nodes);
            let b = flatten(b, nodes);
            Node::Binary(*op, a, b)
        }
        Term::Pow(a, k) => {
            let a = flatten(a, nodes);
            Node::Pow(a, *k)
        }
    };
    nodes.push(node);
    nodes.len() - 1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Relation {
    /// `t > 0`
    Gt,
    /// `t >= 0`
    Ge,
}

/// `term > 0` or `term >= 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub term: Term,
    pub rel: Relation,
}

impl Atom {
    pub fn ge(term: Term) -> Self {
        Self {
            term,
            rel: Relation::Ge,
        }
    }

    pub fn gt(term: Term) -> Self {
        Self {
            term,
            rel: Relation::Gt,
        }
    }

    /// The negation, again in normal form: `¬(t >= 0)` is `-t > 0`.
    pub fn negated(&self) -> Atom {
        let term = self.term.negate();
        match self.rel {
            Relation::Ge => Atom::gt(term),
            Relation::Gt => Atom::ge(term),
        }
    }

    /// The atom's term shifted by `slack`: `t + slack ⋈ 0`.
    pub fn weakened(&self, slack: &BigRational) -> Atom {
        if slack.is_zero() {
            return self.clone();
        }
        Atom {
            term: self.term.clone() + Term::Const(slack.clone()),
            rel: self.rel,
        }
    }

    /// No point with residual in `res` satisfies `t + slack ⋈ 0`.
    pub fn certainly_violated(&self, res: Interval, slack: f64) -> bool {
        if res.is_empty() {
            return true;
        }
        match self.rel {
            Relation::Ge => res.hi() < -slack,
            Relation::Gt => res.hi() <= -slack,
        }
    }

    /// Every point with residual in `res` satisfies `t + slack ⋈ 0`.
    pub fn certainly_satisfied(&self, res: Interval, slack: f64) -> bool {
        if res.is_empty() {
            return false;
        }
        match self.rel {
            Relation::Ge => res.lo() >= -slack,
            Relation::Gt => res.lo() > -slack,
        }
    }

    pub fn holds_at(&self, point: &[f64], slack: f64) -> bool {
        let v = self.term.eval_f64(point);
        match self.rel {
            Relation::Ge => v >= -slack,
            Relation::Gt => v > -slack,
        }
    }
}

/// A negation-free quantifier-free formula. `Flow(i)` refers to the `i`-th
/// flow constraint of the enclosing problem.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom(Atom),
    Flow(usize),
    And(Vec<Formula>),
    Or(Vec<Formula>),
}

impl Formula {
    /// Conjunction with nested conjunctions flattened; a single conjunct is
    /// returned as is.
    pub fn and(fs: Vec<Formula>) -> Formula {
        let mut out = Vec::with_capacity(fs.len());
        for f in fs {
            match f {
                Formula::And(gs) => out.extend(gs),
                Formula::True => {}
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::True,
            1 => out.pop().expect("one"),
            _ => Formula::And(out),
        }
    }

    /// Disjunction, flattened like [`Formula::and`].
    pub fn or(fs: Vec<Formula>) -> Formula {
        let mut out = Vec::with_capacity(fs.len());
        for f in fs {
            match f {
                Formula::Or(gs) => out.extend(gs),
                Formula::False => {}
                f => out.push(f),
            }
        }
        match out.len() {
            0 => Formula::False,
            1 => out.pop().expect("one"),
            _ => Formula::Or(out),
        }
    }

    /// `a = b` as two non-strict atoms.
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::And(vec![
            Formula::Atom(Atom::ge(a.clone() - b.clone())),
            Formula::Atom(Atom::ge(b - a)),
        ])
    }

    pub fn ge(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::ge(a - b))
    }

    pub fn gt(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::gt(a - b))
    }

    pub fn le(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::ge(b - a))
    }

    pub fn lt(a: Term, b: Term) -> Formula {
        Formula::Atom(Atom::gt(b - a))
    }

    /// Pushes a negation down to the atoms. Flow constraints cannot be
    /// negated and yield `None`.
    pub fn negated(&self) -> Option<Formula> {
        Some(match self {
            Formula::True => Formula::False,
            Formula::False => Formula::True,
            Formula::Atom(a) => Formula::Atom(a.negated()),
            Formula::Flow(_) => return None,
            Formula::And(fs) => Formula::Or(fs.iter().map(Formula::negated).collect::<Option<_>>()?),
            Formula::Or(fs) => Formula::And(fs.iter().map(Formula::negated).collect::<Option<_>>()?),
        })
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    pub fn flows(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Formula::Flow(i) = f {
                out.push(*i);
            }
        });
        out
    }

    pub fn vars(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for a in self.atoms() {
            a.term.collect_vars(&mut out);
        }
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        if let Formula::And(fs) | Formula::Or(fs) = self {
            for g in fs {
                g.visit(f);
            }
        }
    }

    pub fn map_vars(&self, map: &impl Fn(usize) -> usize) -> Formula {
        self.map_atoms(&|a| Atom {
            term: a.term.map_vars(map),
            rel: a.rel,
        })
    }

    pub fn map_atoms(&self, f: &impl Fn(&Atom) -> Atom) -> Formula {
        match self {
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.map_atoms(f)).collect()),
            other => other.clone(),
        }
    }

    pub fn map_flows(&self, f: &impl Fn(usize) -> usize) -> Formula {
        match self {
            Formula::Flow(i) => Formula::Flow(f(*i)),
            Formula::And(fs) => Formula::And(fs.iter().map(|g| g.map_flows(f)).collect()),
            Formula::Or(fs) => Formula::Or(fs.iter().map(|g| g.map_flows(f)).collect()),
            other => other.clone(),
        }
    }

    /// Point evaluation of the algebraic part; flow references are treated
    /// as satisfied.
    pub fn holds_at(&self, point: &[f64], slack: f64) -> bool {
        match self {
            Formula::True | Formula::Flow(_) => true,
            Formula::False => false,
            Formula::Atom(a) => a.holds_at(point, slack),
            Formula::And(fs) => fs.iter().all(|g| g.holds_at(point, slack)),
            Formula::Or(fs) => fs.iter().any(|g| g.holds_at(point, slack)),
        }
    }
}

/// Relaxes every atom `t ⋈ 0` to `t ⋈ -delta`; flow references are kept.
pub fn delta_weaken(f: &Formula, delta: &BigRational) -> Formula {
    f.map_atoms(&|a| a.weakened(delta))
}

/// Interval extension of `t` over the box.
pub fn eval_term(t: &Term, b: &VarBox) -> Interval {
    t.eval(b.intervals())
}

/// Range of the atom's term over the box.
pub fn atom_residual(a: &Atom, b: &VarBox) -> Interval {
    eval_term(&a.term, b)
}

/// Parses a decimal or `p/q` literal into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    if let Some((n, d)) = text.split_once('/') {
        let n: BigInt = n.parse().ok()?;
        let d: BigInt = d.parse().ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let all: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(all);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Shortest text that parses back to exactly `r`: an integer, a terminating
/// decimal, or `p/q`.
pub fn format_rational(r: &BigRational) -> String {
    if r.is_integer() {
        return r.numer().to_string();
    }
    // Terminating decimal iff the reduced denominator is 2^a 5^b.
    let mut d = r.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut twos = 0usize;
    let mut fives = 0usize;
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if d.is_one() {
        let digits = twos.max(fives);
        if digits <= 40 {
            let scaled = r * BigRational::from_integer(num_traits::pow(BigInt::from(10), digits));
            let n = scaled.to_integer();
            let neg = n.is_negative();
            let s = n.abs().to_string();
            let s = format!("{s:0>width$}", width = digits + 1);
            let (ip, fp) = s.split_at(s.len() - digits);
            return format!("{}{ip}.{fp}", if neg { "-" } else { "" });
        }
    }
    format!("{}/{}", r.numer(), r.denom())
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Gt => ">",
            Relation::Ge => ">=",
        })
    }
}
