//! Box-narrowing for algebraic atoms by forward-backward propagation over
//! the term tree (hull consistency).
//!
//! Every operator here keeps every real point of the input box that
//! satisfies the constraint, returns a subset of its input, and reports an
//! empty box only when the constraint is certainly violated.

use std::f64::consts::PI;

use crate::formula::{Atom, BinaryOp, CompiledTerm, Formula, Node, Relation, UnaryOp};
use crate::interval::{Interval, VarBox};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certificate {
    Shrunk,
    Unchanged,
    Emptied,
}

#[derive(Clone, Debug)]
pub struct PruneOutcome {
    pub pruned: VarBox,
    pub changed: bool,
    pub certificate: Certificate,
}

/// Contractor for one atom, compiled once and reused across boxes.
#[derive(Clone, Debug)]
pub struct AtomContractor {
    term: CompiledTerm,
    rel: Relation,
}

impl AtomContractor {
    pub fn new(atom: &Atom) -> Self {
        Self {
            term: CompiledTerm::new(&atom.term),
            rel: atom.rel,
        }
    }

    pub fn vars(&self) -> std::collections::BTreeSet<usize> {
        self.term.vars()
    }

    pub fn residual(&self, ivs: &[Interval]) -> Interval {
        self.term.eval(ivs)
    }

    pub fn relation(&self) -> Relation {
        self.rel
    }

    /// Narrows `ivs` in place. Returns `false` if the box became empty.
    pub fn contract(&self, ivs: &mut [Interval], values: &mut Vec<Interval>) -> bool {
        let root = self.term.eval_into(ivs, values);
        let feasible = Interval::new(0.0, f64::INFINITY);
        let root = root.intersect(&feasible);
        if root.is_empty() || (self.rel == Relation::Gt && root.hi() <= 0.0) {
            return false;
        }
        let last = values.len() - 1;
        values[last] = root;
        if !backward(&self.term.nodes, values) {
            return false;
        }
        for (i, node) in self.term.nodes.iter().enumerate() {
            if let Node::Var(v) = node {
                let narrowed = ivs[*v].intersect(&values[i]);
                if narrowed.is_empty() {
                    return false;
                }
                ivs[*v] = narrowed;
            }
        }
        // The narrowed box must still admit the relation.
        let res = self.term.eval_into(ivs, values);
        match self.rel {
            Relation::Ge => !res.is_empty() && res.hi() >= 0.0,
            Relation::Gt => !res.is_empty() && res.hi() > 0.0,
        }
    }
}

fn backward(nodes: &[Node], values: &mut [Interval]) -> bool {
    for i in (0..nodes.len()).rev() {
        let c = values[i];
        if c.is_empty() {
            return false;
        }
        match nodes[i] {
            Node::Var(_) => {}
            Node::Const(k) => {
                if !k.overlaps(&c) {
                    return false;
                }
            }
            Node::Unary(op, a) => {
                let pre = unary_preimage(op, values[a], c);
                if pre.is_empty() {
                    return false;
                }
                values[a] = pre;
            }
            Node::Binary(op, a, b) => {
                let (pa, pb) = binary_preimage(op, values[a], values[b], c);
                if pa.is_empty() || pb.is_empty() {
                    return false;
                }
                values[a] = pa;
                values[b] = pb;
            }
            Node::Pow(a, k) => {
                let pre = pow_preimage(values[a], k, c);
                if pre.is_empty() {
                    return false;
                }
                values[a] = pre;
            }
        }
    }
    true
}

fn nonneg() -> Interval {
    Interval::new(0.0, f64::INFINITY)
}

/// `a ∩ (r ∪ -r)` as a hull, for the two branches of even functions.
fn symmetric_preimage(a: Interval, r: Interval) -> Interval {
    let pos = a.intersect(&r);
    let neg = a.intersect(&-r);
    pos.hull(&neg)
}

fn unary_preimage(op: UnaryOp, a: Interval, c: Interval) -> Interval {
    match op {
        UnaryOp::Neg => a.intersect(&-c),
        UnaryOp::Exp => a.intersect(&c.ln()),
        UnaryOp::Log => a.intersect(&c.exp()),
        UnaryOp::Sqrt => {
            let c = c.intersect(&nonneg());
            a.intersect(&c.sqr())
        }
        UnaryOp::Abs => symmetric_preimage(a, c.intersect(&nonneg())),
        UnaryOp::Sin => periodic_preimage(a, c, Wave::Sin),
        UnaryOp::Cos => periodic_preimage(a, c, Wave::Cos),
    }
}

fn binary_preimage(op: BinaryOp, a: Interval, b: Interval, c: Interval) -> (Interval, Interval) {
    match op {
        BinaryOp::Add => {
            let a = a.intersect(&(c - b));
            let b = b.intersect(&(c - a));
            (a, b)
        }
        BinaryOp::Sub => {
            let a = a.intersect(&(c + b));
            let b = b.intersect(&(a - c));
            (a, b)
        }
        BinaryOp::Mul => {
            let a = if b.contains(0.0) && c.contains(0.0) {
                a
            } else {
                a.intersect(&(c / b))
            };
            let b = if a.contains(0.0) && c.contains(0.0) {
                b
            } else {
                b.intersect(&(c / a))
            };
            (a, b)
        }
        BinaryOp::Div => {
            // c = a / b with b != 0
            let a = a.intersect(&(c * b));
            let b = if a.contains(0.0) && c.contains(0.0) {
                b
            } else {
                b.intersect(&(a / c))
            };
            (a, b)
        }
        BinaryOp::Min => {
            let floor = Interval::new(c.lo(), f64::INFINITY);
            let mut na = a.intersect(&floor);
            let mut nb = b.intersect(&floor);
            if nb.lo() > c.hi() {
                na = na.intersect(&c);
            }
            if na.lo() > c.hi() {
                nb = nb.intersect(&c);
            }
            (na, nb)
        }
        BinaryOp::Max => {
            let ceil = Interval::new(f64::NEG_INFINITY, c.hi());
            let mut na = a.intersect(&ceil);
            let mut nb = b.intersect(&ceil);
            if nb.hi() < c.lo() {
                na = na.intersect(&c);
            }
            if na.hi() < c.lo() {
                nb = nb.intersect(&c);
            }
            (na, nb)
        }
    }
}

fn pow_preimage(a: Interval, k: i32, c: Interval) -> Interval {
    if k == 0 {
        return a;
    }
    let (m, target) = if k < 0 {
        // c = 1 / a^m
        (k.unsigned_abs(), Interval::ONE / c)
    } else {
        (k as u32, c)
    };
    if m % 2 == 1 {
        a.intersect(&target.root(m))
    } else {
        symmetric_preimage(a, target.root(m))
    }
}

#[derive(Clone, Copy)]
enum Wave {
    Sin,
    Cos,
}

/// Hull of `{x ∈ a : f(x) ∈ c}` for `f = sin` or `cos`, taken piecewise over
/// the monotone segments of `f` inside `a`.
fn periodic_preimage(a: Interval, c: Interval, wave: Wave) -> Interval {
    let c = c.intersect(&Interval::new(-1.0, 1.0));
    if c.is_empty() {
        return Interval::EMPTY;
    }
    if !a.is_finite() || a.width() >= 2.0 * PI || a.mag() > 1e8 || (c.lo() <= -1.0 && c.hi() >= 1.0)
    {
        return a;
    }
    let pad = |x: f64| 1e-13 * (1.0 + x.abs());
    // Segment k spans [offset + kπ, offset + (k+1)π].
    let offset = match wave {
        Wave::Sin => PI / 2.0,
        Wave::Cos => 0.0,
    };
    let mut k = ((a.lo() - offset) / PI).floor() - 1.0;
    let mut out = Interval::EMPTY;
    loop {
        let p = offset + k * PI;
        let q = p + PI;
        if p - pad(p) > a.hi() {
            break;
        }
        if q + pad(q) >= a.lo() {
            let seg = a.intersect(&Interval::new(p - pad(p), q + pad(q)));
            if !seg.is_empty() {
                // Inverse of f on segment k and whether f increases there.
                let (x_of, increasing): (Box<dyn Fn(f64) -> f64>, bool) = match wave {
                    Wave::Sin => {
                        let odd = (k as i64).rem_euclid(2) == 1;
                        let s = if odd { 1.0 } else { -1.0 };
                        (Box::new(move |y: f64| (k + 1.0) * PI + s * y.asin()), odd)
                    }
                    Wave::Cos => {
                        let even = (k as i64).rem_euclid(2) == 0;
                        if even {
                            (Box::new(move |y: f64| k * PI + y.acos()), false)
                        } else {
                            (Box::new(move |y: f64| (k + 1.0) * PI - y.acos()), true)
                        }
                    }
                };
                let (x1, x2) = (x_of(c.lo()), x_of(c.hi()));
                let (lo, hi) = if increasing { (x1, x2) } else { (x2, x1) };
                let window = Interval::new(lo - pad(lo), hi + pad(hi));
                out = out.hull(&seg.intersect(&window));
            }
        }
        k += 1.0;
    }
    out
}

/// One application of the atom contractor to `b`.
pub fn prune_atom(b: &VarBox, a: &Atom) -> PruneOutcome {
    let contractor = AtomContractor::new(a);
    let mut pruned = b.clone();
    let mut scratch = Vec::new();
    let ok = contractor.contract(pruned.intervals_mut(), &mut scratch);
    if !ok {
        for iv in pruned.intervals_mut() {
            *iv = Interval::EMPTY;
        }
        return PruneOutcome {
            pruned,
            changed: true,
            certificate: Certificate::Emptied,
        };
    }
    debug_assert!(pruned.is_subset(b));
    let changed = pruned != *b;
    PruneOutcome {
        pruned,
        changed,
        certificate: if changed {
            Certificate::Shrunk
        } else {
            Certificate::Unchanged
        },
    }
}

/// Largest width reduction over the components of two boxes.
pub(crate) fn max_shrink(before: &[Interval], after: &[Interval]) -> f64 {
    before
        .iter()
        .zip(after)
        .map(|(b, a)| {
            let (wb, wa) = (b.width(), a.width());
            if wb.is_infinite() && wa.is_finite() {
                f64::INFINITY
            } else {
                wb - wa
            }
        })
        .filter(|d| !d.is_nan())
        .fold(0.0, f64::max)
}

/// Upper bound on passes; the tolerance test terminates far earlier on any
/// bounded box.
const MAX_PASSES: usize = 100_000;

/// Applies contractors round-robin until a full pass shrinks no component by
/// more than `tol`. Returns `false` if the box became empty.
pub fn contract_all(
    contractors: &[AtomContractor],
    ivs: &mut [Interval],
    tol: f64,
    scratch: &mut Vec<Interval>,
) -> bool {
    for _ in 0..MAX_PASSES {
        let before = ivs.to_vec();
        for c in contractors {
            if !c.contract(ivs, scratch) {
                return false;
            }
        }
        if max_shrink(&before, ivs) <= tol {
            return true;
        }
    }
    true
}

/// Fixpoint of [`prune_atom`] over all atoms at tolerance `tol`.
pub fn prune_fixpoint(b: &VarBox, atoms: &[Atom], tol: f64) -> VarBox {
    let contractors: Vec<AtomContractor> = atoms.iter().map(AtomContractor::new).collect();
    let mut out = b.clone();
    let mut scratch = Vec::new();
    if !contract_all(&contractors, out.intervals_mut(), tol, &mut scratch) {
        for iv in out.intervals_mut() {
            *iv = Interval::EMPTY;
        }
    }
    debug_assert!(out.is_empty() || out.is_subset(b));
    out
}

/// Contractor for a negation-free formula: conjunctions are contracted to a
/// fixpoint, disjunctions by the hull of their contracted branches. Flow
/// references are ignored.
#[derive(Clone, Debug)]
pub enum FormulaContractor {
    True,
    False,
    Atom(AtomContractor),
    And(Vec<FormulaContractor>),
    Or(Vec<FormulaContractor>),
}

impl FormulaContractor {
    pub fn new(f: &Formula) -> Self {
        match f {
            Formula::True | Formula::Flow(_) => FormulaContractor::True,
            Formula::False => FormulaContractor::False,
            Formula::Atom(a) => FormulaContractor::Atom(AtomContractor::new(a)),
            Formula::And(fs) => FormulaContractor::And(fs.iter().map(Self::new).collect()),
            Formula::Or(fs) => FormulaContractor::Or(fs.iter().map(Self::new).collect()),
        }
    }

    pub fn is_trivial(&self) -> bool {
        matches!(self, FormulaContractor::True)
    }

    /// Narrows `ivs` in place; `false` when no point can satisfy the formula.
    pub fn contract(&self, ivs: &mut [Interval], tol: f64, scratch: &mut Vec<Interval>) -> bool {
        match self {
            FormulaContractor::True => true,
            FormulaContractor::False => false,
            FormulaContractor::Atom(a) => a.contract(ivs, scratch),
            FormulaContractor::And(parts) => {
                for _ in 0..MAX_PASSES {
                    let before = ivs.to_vec();
                    for p in parts {
                        if !p.contract(ivs, tol, scratch) {
                            return false;
                        }
                    }
                    if max_shrink(&before, ivs) <= tol {
                        break;
                    }
                }
                true
            }
            FormulaContractor::Or(parts) => {
                let mut acc: Option<Vec<Interval>> = None;
                for p in parts {
                    let mut branch = ivs.to_vec();
                    if p.contract(&mut branch, tol, scratch) {
                        acc = Some(match acc {
                            None => branch,
                            Some(h) => h.iter().zip(&branch).map(|(x, y)| x.hull(y)).collect(),
                        });
                    }
                }
                match acc {
                    Some(h) => {
                        ivs.copy_from_slice(&h);
                        true
                    }
                    None => false,
                }
            }
        }
    }
}
