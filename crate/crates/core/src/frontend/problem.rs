//! The `.prob` problem format: parsing and printing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::sexpr::{read_all, Pos, Sexp};
use crate::error::{ParseError, ParseErrorKind};
use crate::formula::{format_rational, parse_rational, rational_to_interval, Atom, BinaryOp, Formula, Term, UnaryOp};
use crate::interval::{Interval, VarBox};
use crate::ode::{FlowConstraint, OdeSystem};
use crate::solver::Problem;

pub const DEFAULT_DELTA: (i64, i64) = (1, 1000);

pub fn default_delta() -> BigRational {
    BigRational::new(BigInt::from(DEFAULT_DELTA.0), BigInt::from(DEFAULT_DELTA.1))
}

pub(crate) fn is_number(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_digit() || c == '-' || c == '+' || c == '.')
        && parse_rational(s).is_some()
}

pub(crate) fn number(s: &Sexp) -> Result<BigRational, ParseError> {
    let a = s.atom("a number")?;
    parse_rational(a).ok_or_else(|| s.pos().syntax(format!("`{a}` is not a number")))
}

/// `[lo hi]`, rounded outward.
pub(crate) fn interval(s: &Sexp) -> Result<Interval, ParseError> {
    let Sexp::Bracket(items, pos) = s else {
        return Err(s.pos().syntax("expected an interval `[lo hi]`"));
    };
    let [lo, hi] = items.as_slice() else {
        return Err(pos.syntax("an interval has exactly two bounds"));
    };
    let (lo, hi) = (number(lo)?, number(hi)?);
    if lo > hi {
        return Err(pos.error(ParseErrorKind::Invalid(format!(
            "empty interval [{} {}]",
            format_rational(&lo),
            format_rational(&hi)
        ))));
    }
    Ok(Interval::new(rational_to_interval(&lo).lo(), rational_to_interval(&hi).hi()))
}

/// Name resolution for terms.
pub(crate) type Scope<'a> = dyn Fn(&str) -> Option<usize> + 'a;

pub(crate) fn term(s: &Sexp, scope: &Scope) -> Result<Term, ParseError> {
    match s {
        Sexp::Atom(a, pos) => {
            if is_number(a) {
                return Ok(Term::Const(parse_rational(a).expect("checked")));
            }
            scope(a)
                .map(Term::Var)
                .ok_or_else(|| pos.error(ParseErrorKind::Undeclared(a.clone())))
        }
        Sexp::Bracket(_, pos) => Err(pos.syntax("an interval is not a term")),
        Sexp::List(items, pos) => {
            let Some((head, args)) = s.form() else {
                return Err(pos.syntax(if items.is_empty() {
                    "empty term"
                } else {
                    "expected an operator"
                }));
            };
            let arity = |n: usize| -> Result<(), ParseError> {
                if args.len() == n {
                    Ok(())
                } else {
                    Err(pos.syntax(format!("`{head}` takes {n} argument(s)")))
                }
            };
            let sub = |i: usize| term(&args[i], scope);
            let fold = |op: BinaryOp| -> Result<Term, ParseError> {
                if args.is_empty() {
                    return Err(pos.syntax(format!("`{head}` needs arguments")));
                }
                let mut acc = sub(0)?;
                for i in 1..args.len() {
                    acc = Term::binary(op, acc, sub(i)?);
                }
                Ok(acc)
            };
            let unary = |op: UnaryOp| -> Result<Term, ParseError> {
                arity(1)?;
                Ok(Term::unary(op, sub(0)?))
            };
            match head {
                "+" => fold(BinaryOp::Add),
                "*" => fold(BinaryOp::Mul),
                "/" => {
                    arity(2)?;
                    Ok(sub(0)? / sub(1)?)
                }
                "min" => fold(BinaryOp::Min),
                "max" => fold(BinaryOp::Max),
                "-" => match args.len() {
                    0 => Err(pos.syntax("`-` needs arguments")),
                    1 => Ok(-sub(0)?),
                    2 => {
                        let (a, b) = (sub(0)?, sub(1)?);
                        Ok(match a.as_const() {
                            Some(c) if c.is_zero() => -b,
                            _ => a - b,
                        })
                    }
                    _ => fold(BinaryOp::Sub),
                },
                "^" => {
                    arity(2)?;
                    let k = number(&args[1])?;
                    let k = k
                        .is_integer()
                        .then(|| k.to_integer().to_i32())
                        .flatten()
                        .ok_or_else(|| args[1].pos().syntax("exponent must be a small integer"))?;
                    Ok(Term::pow(sub(0)?, k))
                }
                "exp" => unary(UnaryOp::Exp),
                "log" | "ln" => unary(UnaryOp::Log),
                "sqrt" => unary(UnaryOp::Sqrt),
                "sin" => unary(UnaryOp::Sin),
                "cos" => unary(UnaryOp::Cos),
                "abs" => unary(UnaryOp::Abs),
                _ => Err(pos.syntax(format!("unknown operator `{head}`"))),
            }
        }
    }
}

/// `a - b`, without a spurious subtraction of zero.
fn diff(a: Term, b: Term) -> Term {
    match (a.as_const(), b.as_const()) {
        (_, Some(c)) if c.is_zero() => a,
        (Some(c), _) if c.is_zero() => -b,
        _ => a - b,
    }
}

/// Parses formulas; `flow` forms are handed to `on_flow`, which returns the
/// flow index, or `None` where flows are not allowed.
pub(crate) fn formula(
    s: &Sexp,
    scope: &Scope,
    on_flow: &mut dyn FnMut(&[Sexp], Pos) -> Option<Result<usize, ParseError>>,
) -> Result<Formula, ParseError> {
    if let Sexp::Atom(a, pos) = s {
        return match a.as_str() {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            _ => Err(pos.syntax(format!("expected a formula, found `{a}`"))),
        };
    }
    let pos = s.pos();
    let Some((head, args)) = s.form() else {
        return Err(pos.syntax("expected a formula"));
    };
    let cmp = |build: fn(Term, Term) -> Formula| -> Result<Formula, ParseError> {
        if args.len() != 2 {
            return Err(pos.syntax(format!("`{head}` takes two terms")));
        }
        Ok(build(term(&args[0], scope)?, term(&args[1], scope)?))
    };
    match head {
        "and" | "or" => {
            let fs = args
                .iter()
                .map(|a| formula(a, scope, on_flow))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(if head == "and" { Formula::and(fs) } else { Formula::or(fs) })
        }
        "not" => {
            if args.len() != 1 {
                return Err(pos.syntax("`not` takes one formula"));
            }
            formula(&args[0], scope, on_flow)?
                .negated()
                .ok_or_else(|| pos.error(ParseErrorKind::Invalid("a flow constraint cannot be negated".into())))
        }
        ">=" => cmp(|a, b| Formula::Atom(Atom::ge(diff(a, b)))),
        ">" => cmp(|a, b| Formula::Atom(Atom::gt(diff(a, b)))),
        "<=" => cmp(|a, b| Formula::Atom(Atom::ge(diff(b, a)))),
        "<" => cmp(|a, b| Formula::Atom(Atom::gt(diff(b, a)))),
        "=" => cmp(|a, b| {
            Formula::And(vec![
                Formula::Atom(Atom::ge(diff(a.clone(), b.clone()))),
                Formula::Atom(Atom::ge(diff(b, a))),
            ])
        }),
        "flow" => match on_flow(args, pos) {
            Some(r) => r.map(Formula::Flow),
            None => Err(pos.syntax("a flow constraint is not allowed here")),
        },
        _ => Err(pos.syntax(format!("unknown connective `{head}`"))),
    }
}

struct OdeDef {
    name: String,
    state: Vec<String>,
    rhs: Vec<Term>,
    domain: Option<Vec<Interval>>,
    lipschitz: Option<Vec<f64>>,
    pos: Pos,
}

#[derive(PartialEq)]
struct FlowDef {
    system: usize,
    x0: Vec<usize>,
    time: usize,
    xt: Vec<usize>,
    invariant: Option<Formula>,
}

/// Splits `items` into positional arguments and `:key value` options.
pub(crate) fn keywords<'a>(
    items: &'a [Sexp],
    allowed: &[&str],
) -> Result<(Vec<&'a Sexp>, HashMap<&'a str, &'a Sexp>), ParseError> {
    let mut pos = Vec::new();
    let mut opts = HashMap::new();
    let mut it = items.iter();
    while let Some(s) = it.next() {
        match s.as_atom() {
            Some(k) if k.starts_with(':') => {
                if !allowed.contains(&k) {
                    return Err(s.pos().syntax(format!("unknown option `{k}`")));
                }
                let v = it
                    .next()
                    .ok_or_else(|| s.pos().syntax(format!("`{k}` needs a value")))?;
                if opts.insert(k, v).is_some() {
                    return Err(s.pos().syntax(format!("`{k}` given twice")));
                }
            }
            _ => pos.push(s),
        }
    }
    Ok((pos, opts))
}

/// `((x rhs) (y rhs) ...)` with rhs over the listed names, in order.
pub(crate) fn ode_equations(s: &Sexp) -> Result<(Vec<String>, Vec<Term>), ParseError> {
    let eqs = s.list("a list of `(var rhs)` equations")?;
    let mut state = Vec::new();
    for e in eqs {
        let pair = e.list("an equation `(var rhs)`")?;
        let [v, _] = pair else {
            return Err(e.pos().syntax("an equation is `(var rhs)`"));
        };
        let name = v.atom("a state variable")?.to_string();
        if state.contains(&name) {
            return Err(v.pos().syntax(format!("`{name}` has two equations")));
        }
        state.push(name);
    }
    let scope = |n: &str| state.iter().position(|s| s == n);
    let rhs = eqs
        .iter()
        .map(|e| term(&e.list("")?[1], &scope))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((state, rhs))
}

/// `((x [lo hi]) ...)` for the given state names.
fn domain(s: &Sexp, state: &[String]) -> Result<Vec<Interval>, ParseError> {
    let mut out: Vec<Option<Interval>> = vec![None; state.len()];
    for e in s.list("a list of `(var [lo hi])`")? {
        let pair = e.list("`(var [lo hi])`")?;
        let [v, iv] = pair else {
            return Err(e.pos().syntax("a domain entry is `(var [lo hi])`"));
        };
        let name = v.atom("a state variable")?;
        let i = state
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| v.pos().error(ParseErrorKind::Undeclared(name.to_string())))?;
        out[i] = Some(interval(iv)?);
    }
    out.into_iter()
        .zip(state)
        .map(|(d, n)| d.ok_or_else(|| s.pos().error(ParseErrorKind::Unbounded(n.clone()))))
        .collect()
}

fn lipschitz(s: &Sexp) -> Result<Vec<f64>, ParseError> {
    s.list("a list of numbers")?
        .iter()
        .map(|x| {
            let q = number(x)?;
            let v = rational_to_interval(&q).hi();
            if v > 0.0 {
                Ok(v)
            } else {
                Err(x.pos().error(ParseErrorKind::Invalid("Lipschitz hints must be positive".into())))
            }
        })
        .collect()
}

/// Parses a problem file.
pub fn parse(text: &str) -> Result<Problem, ParseError> {
    let forms = read_all(text)?;
    let origin = Pos { line: 1, col: 1 };
    let mut names: Vec<String> = Vec::new();
    let mut bounds: Vec<Interval> = Vec::new();
    let mut odes: Vec<OdeDef> = Vec::new();
    let mut delta: Option<BigRational> = None;

    // Declarations, systems and delta first so later forms may refer to them
    // regardless of order.
    for f in &forms {
        let Some((head, args)) = f.form() else {
            return Err(f.pos().syntax("expected a `(statement ...)`"));
        };
        match head {
            "declare" => {
                let [v, iv] = args else {
                    return Err(f.pos().syntax("`declare` is `(declare name [lo hi])`"));
                };
                let name = v.atom("a variable name")?;
                if is_number(name) || name.starts_with(':') {
                    return Err(v.pos().syntax(format!("`{name}` is not a valid name")));
                }
                if names.iter().any(|n| n == name) {
                    return Err(v.pos().syntax(format!("`{name}` declared twice")));
                }
                let iv = interval(iv)?;
                names.push(name.to_string());
                bounds.push(iv);
            }
            "ode" => {
                let (pos_args, opts) = keywords(args, &[":domain", ":lipschitz"])?;
                let [name, eqs] = pos_args.as_slice() else {
                    return Err(f.pos().syntax("`ode` is `(ode name ((var rhs) ...) [:domain ...])`"));
                };
                let name = name.atom("a system name")?.to_string();
                if odes.iter().any(|o| o.name == name) {
                    return Err(f.pos().syntax(format!("system `{name}` defined twice")));
                }
                let (state, rhs) = ode_equations(eqs)?;
                let domain = opts.get(":domain").map(|d| domain(d, &state)).transpose()?;
                let lipschitz = opts.get(":lipschitz").map(|l| lipschitz(l)).transpose()?;
                if let Some(l) = &lipschitz {
                    if l.len() != state.len() {
                        return Err(f.pos().syntax("one Lipschitz hint per state variable"));
                    }
                }
                odes.push(OdeDef {
                    name,
                    state,
                    rhs,
                    domain,
                    lipschitz,
                    pos: f.pos(),
                });
            }
            "delta" => {
                let [d] = args else {
                    return Err(f.pos().syntax("`delta` takes one number"));
                };
                let q = number(d)?;
                if q <= BigRational::zero() {
                    return Err(d.pos().error(ParseErrorKind::NonPositiveDelta(format_rational(&q))));
                }
                delta = Some(q);
            }
            "assert" | "flow" => {}
            _ => return Err(f.pos().syntax(format!("unknown statement `{head}`"))),
        }
    }

    let scope = |n: &str| names.iter().position(|m| m == n);
    let mut flows: Vec<FlowDef> = Vec::new();
    let mut flow_pos: Vec<Pos> = Vec::new();
    let mut on_flow = |args: &[Sexp], pos: Pos| -> Option<Result<usize, ParseError>> {
        Some((|| {
            let (pos_args, opts) = keywords(args, &[":invariant"])?;
            let [sys, x0, t, xt] = pos_args.as_slice() else {
                return Err(pos.syntax("`flow` is `(flow system (x0 ...) t (xt ...) [:invariant φ])`"));
            };
            let sys_name = sys.atom("a system name")?;
            let system = odes
                .iter()
                .position(|o| o.name == sys_name)
                .ok_or_else(|| sys.pos().error(ParseErrorKind::Undeclared(sys_name.to_string())))?;
            let vars = |s: &Sexp| -> Result<Vec<usize>, ParseError> {
                s.list("a list of variables")?
                    .iter()
                    .map(|v| {
                        let n = v.atom("a variable")?;
                        scope(n).ok_or_else(|| v.pos().error(ParseErrorKind::Undeclared(n.to_string())))
                    })
                    .collect()
            };
            let (x0v, xtv) = (vars(x0)?, vars(xt)?);
            let dim = odes[system].state.len();
            if x0v.len() != dim || xtv.len() != dim {
                return Err(pos.error(ParseErrorKind::Invalid(format!(
                    "system `{sys_name}` has {dim} state variables"
                ))));
            }
            let tn = t.atom("a duration variable")?;
            let time = scope(tn).ok_or_else(|| t.pos().error(ParseErrorKind::Undeclared(tn.to_string())))?;
            if bounds[time].lo() < 0.0 {
                return Err(t.pos().error(ParseErrorKind::Invalid(format!(
                    "duration `{tn}` must be bounded below by 0"
                ))));
            }
            let state = &odes[system].state;
            let local = |n: &str| state.iter().position(|s| s == n);
            let invariant = opts
                .get(":invariant")
                .map(|f| formula(f, &local, &mut |_, _| None))
                .transpose()?;
            let def = FlowDef {
                system,
                x0: x0v,
                time,
                xt: xtv,
                invariant,
            };
            Ok(match flows.iter().position(|g| *g == def) {
                Some(i) => i,
                None => {
                    flows.push(def);
                    flow_pos.push(pos);
                    flows.len() - 1
                }
            })
        })())
    };

    let mut asserts = Vec::new();
    for f in &forms {
        match f.form() {
            Some(("assert", args)) => {
                let [body] = args else {
                    return Err(f.pos().syntax("`assert` takes one formula"));
                };
                asserts.push(formula(body, &scope, &mut on_flow)?);
            }
            Some(("flow", _)) => asserts.push(formula(f, &scope, &mut on_flow)?),
            _ => {}
        }
    }

    // Systems without an explicit domain range over the declared bounds of
    // the variables their flows bind.
    let mut systems = Vec::with_capacity(odes.len());
    for (k, o) in odes.iter().enumerate() {
        let dom = match &o.domain {
            Some(d) => d.clone(),
            None => {
                let mut d = vec![Interval::EMPTY; o.state.len()];
                for fl in flows.iter().filter(|fl| fl.system == k) {
                    for i in 0..o.state.len() {
                        d[i] = d[i].hull(&bounds[fl.x0[i]]).hull(&bounds[fl.xt[i]]);
                    }
                }
                if let Some(i) = d.iter().position(Interval::is_empty) {
                    return Err(o.pos.error(ParseErrorKind::Unbounded(o.state[i].clone())));
                }
                d
            }
        };
        let mut sys = OdeSystem::new(o.name.clone(), o.state.clone(), o.rhs.clone(), dom)
            .map_err(|e| o.pos.error(ParseErrorKind::Invalid(e.to_string())))?;
        if let Some(l) = &o.lipschitz {
            sys = sys.with_lipschitz(l.clone());
        }
        systems.push(Arc::new(sys));
    }
    let flows: Vec<FlowConstraint> = flows
        .into_iter()
        .map(|d| {
            let fc = FlowConstraint::new(systems[d.system].clone(), d.x0, d.time, d.xt);
            match d.invariant {
                Some(inv) => fc.with_invariant(inv),
                None => fc,
            }
        })
        .collect();

    let formula = Formula::and(asserts);
    let bounds = VarBox::new(names.into(), bounds);
    Problem::new(bounds, formula, flows, systems, delta.unwrap_or_else(default_delta))
        .map_err(|e| origin.error(ParseErrorKind::Invalid(e.to_string())))
}

/// Exact decimal (or `p/q`) text for a float.
pub(crate) fn float_literal(x: f64) -> String {
    let short = format!("{x:?}");
    match parse_rational(&short) {
        Some(q) if rational_to_interval(&q) == Interval::point(x) => {
            short.trim_end_matches(".0").to_string()
        }
        _ => format_rational(&BigRational::from_float(x).expect("finite")),
    }
}

pub(crate) fn print_interval(iv: Interval) -> String {
    format!("[{} {}]", float_literal(iv.lo()), float_literal(iv.hi()))
}

pub(crate) fn print_term(t: &Term, names: &dyn Fn(usize) -> String) -> String {
    match t {
        Term::Var(i) => names(*i),
        Term::Const(c) => format_rational(c),
        Term::Unary(op, a) => format!("({} {})", op.name(), print_term(a, names)),
        Term::Binary(op, a, b) => format!("({} {} {})", op.name(), print_term(a, names), print_term(b, names)),
        Term::Pow(a, k) => format!("(^ {} {k})", print_term(a, names)),
    }
}

pub(crate) fn print_formula(
    f: &Formula,
    names: &dyn Fn(usize) -> String,
    flow: &dyn Fn(usize) -> String,
) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(a) => format!("({} {} 0)", a.rel, print_term(&a.term, names)),
        Formula::Flow(i) => flow(*i),
        Formula::And(fs) | Formula::Or(fs) => {
            let head = if matches!(f, Formula::And(_)) { "and" } else { "or" };
            let mut s = format!("({head}");
            for g in fs {
                s.push(' ');
                s.push_str(&print_formula(g, names, flow));
            }
            s.push(')');
            s
        }
    }
}

/// Renders a problem in the format accepted by [`parse`].
pub fn print(p: &Problem) -> String {
    let names = p.bounds.names().clone();
    let var = |i: usize| names[i].clone();
    let mut out = String::new();
    for (name, iv) in p.bounds.iter() {
        let _ = writeln!(out, "(declare {name} {})", print_interval(iv));
    }
    for s in &p.systems {
        let local = |i: usize| s.state()[i].clone();
        let _ = write!(out, "(ode {} (", s.name());
        for (k, (v, g)) in s.state().iter().zip(s.rhs()).enumerate() {
            let sep = if k == 0 { "" } else { " " };
            let _ = write!(out, "{sep}({v} {})", print_term(g, &local));
        }
        let _ = write!(out, ") :domain (");
        for (k, (v, d)) in s.state().iter().zip(s.domain()).enumerate() {
            let sep = if k == 0 { "" } else { " " };
            let _ = write!(out, "{sep}({v} {})", print_interval(*d));
        }
        out.push(')');
        if let Some(l) = s.lipschitz() {
            let hints: Vec<String> = l.iter().map(|x| float_literal(*x)).collect();
            let _ = write!(out, " :lipschitz ({})", hints.join(" "));
        }
        out.push_str(")\n");
    }
    let flow = |i: usize| {
        let fc = &p.flows[i];
        let list = |vs: &[usize]| vs.iter().map(|&v| names[v].clone()).collect::<Vec<_>>().join(" ");
        let mut s = format!(
            "(flow {} ({}) {} ({})",
            fc.system.name(),
            list(&fc.x0),
            names[fc.time],
            list(&fc.xt)
        );
        if let Some(inv) = &fc.invariant {
            let local = |k: usize| fc.system.state()[k].clone();
            let _ = write!(s, " :invariant {}", print_formula(inv.body(), &local, &|_| String::new()));
        }
        s.push(')');
        s
    };
    let top: Vec<&Formula> = match &p.formula {
        Formula::True => Vec::new(),
        Formula::And(fs) if !fs.is_empty() => fs.iter().collect(),
        f => vec![f],
    };
    for f in top {
        let _ = writeln!(out, "(assert {})", print_formula(f, &var, &flow));
    }
    let _ = writeln!(out, "(delta {})", format_rational(&p.delta));
    out
}
