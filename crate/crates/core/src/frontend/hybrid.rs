//! Hybrid automata (`.hyb` files) and their bounded unrolling into problems.

use std::collections::HashMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Zero;

use super::problem::{default_delta, formula, interval, keywords, number, ode_equations};
use super::sexpr::{read_all, Pos, Sexp};
use crate::error::{EncodeError, ParseError, ParseErrorKind};
use crate::formula::{format_rational, rational_to_interval, Formula, Term};
use crate::interval::{Interval, VarBox};
use crate::ode::{FlowConstraint, OdeSystem};
use crate::solver::Problem;

/// Largest number of real variables an unrolling may introduce.
pub const MAX_VARIABLES: usize = 100_000;
/// Largest number of mode sequences expanded into the formula.
pub const MAX_PATHS: usize = 4096;

#[derive(Clone, Debug, PartialEq)]
pub struct Mode {
    pub name: String,
    pub system: Arc<OdeSystem>,
    /// Over state indices; must hold along every trajectory in the mode.
    pub invariant: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jump {
    pub from: usize,
    pub to: usize,
    /// Over state indices (the state when the jump is taken).
    pub guard: Formula,
    /// Over `0..n` (before) and `n..2n` (after the jump).
    pub reset: Formula,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HybridAutomaton {
    pub state: Vec<String>,
    pub bounds: Vec<Interval>,
    /// Upper bound on the time spent in one mode.
    pub time_bound: f64,
    pub modes: Vec<Mode>,
    pub jumps: Vec<Jump>,
    pub init_mode: usize,
    pub init: Formula,
    pub unsafe_set: Formula,
    pub delta: Option<BigRational>,
}

impl HybridAutomaton {
    pub fn dim(&self) -> usize {
        self.state.len()
    }

    pub fn mode_index(&self, name: &str) -> Option<usize> {
        self.modes.iter().position(|m| m.name == name)
    }

    /// Variables of the depth-`k` unrolling, without ∀ᵗ time variables.
    pub fn variable_count(&self, k: usize) -> usize {
        (k + 1) * (2 * self.dim() + 1)
    }

    /// All mode sequences of length `k + 1` from the initial mode.
    pub fn mode_paths(&self, k: usize) -> Result<Vec<Vec<usize>>, EncodeError> {
        let mut paths = vec![vec![self.init_mode]];
        for _ in 0..k {
            let mut next = Vec::new();
            for p in &paths {
                let last = *p.last().expect("non-empty");
                let mut targets: Vec<usize> = self.jumps.iter().filter(|j| j.from == last).map(|j| j.to).collect();
                targets.sort_unstable();
                targets.dedup();
                for t in targets {
                    let mut q = p.clone();
                    q.push(t);
                    next.push(q);
                    if next.len() > MAX_PATHS {
                        return Err(EncodeError::TooManyPaths {
                            depth: k,
                            paths: next.len(),
                            cap: MAX_PATHS,
                        });
                    }
                }
            }
            paths = next;
        }
        if paths.is_empty() {
            return Err(EncodeError::NoPath(k));
        }
        Ok(paths)
    }
}

/// Parses a `.hyb` automaton description.
pub fn parse_hybrid(text: &str) -> Result<HybridAutomaton, ParseError> {
    let forms = read_all(text)?;
    let origin = Pos { line: 1, col: 1 };
    let mut state: Option<(Vec<String>, Vec<Interval>)> = None;
    let mut time_bound = None;
    let mut delta = None;
    for f in &forms {
        let Some((head, args)) = f.form() else {
            return Err(f.pos().syntax("expected a `(statement ...)`"));
        };
        match head {
            "state" => {
                let mut names = Vec::new();
                let mut bounds = Vec::new();
                for e in args {
                    let pair = e.list("`(var [lo hi])`")?;
                    let [v, iv] = pair else {
                        return Err(e.pos().syntax("a state entry is `(var [lo hi])`"));
                    };
                    let name = v.atom("a variable name")?.to_string();
                    if name == "time" || name.ends_with('\'') || names.contains(&name) {
                        return Err(v.pos().syntax(format!("`{name}` is not a usable state name")));
                    }
                    names.push(name);
                    bounds.push(interval(iv)?);
                }
                state = Some((names, bounds));
            }
            "time" => {
                let [t] = args else {
                    return Err(f.pos().syntax("`time` takes one number"));
                };
                let q = number(t)?;
                if q <= BigRational::zero() {
                    return Err(t.pos().error(ParseErrorKind::Invalid("time bound must be positive".into())));
                }
                time_bound = Some(rational_to_interval(&q).hi());
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
            "mode" | "jump" | "init" | "unsafe" => {}
            _ => return Err(f.pos().syntax(format!("unknown statement `{head}`"))),
        }
    }
    let (state, bounds) = state.ok_or_else(|| origin.syntax("missing `(state ...)`"))?;
    let time_bound = time_bound.ok_or_else(|| origin.syntax("missing `(time T)`"))?;
    let n = state.len();
    let scope = |name: &str| state.iter().position(|s| s == name);
    let primed = |name: &str| match name.strip_suffix('\'') {
        Some(base) => scope(base).map(|i| i + n),
        None => scope(name),
    };
    let no_flow = &mut |_: &[Sexp], _: Pos| None;

    let mut modes = Vec::new();
    for f in &forms {
        if let Some(("mode", args)) = f.form() {
            let (pos_args, opts) = keywords(args, &[":invariant"])?;
            let [name, eqs] = pos_args.as_slice() else {
                return Err(f.pos().syntax("`mode` is `(mode name ((var rhs) ...) [:invariant φ])`"));
            };
            let name = name.atom("a mode name")?.to_string();
            if modes.iter().any(|m: &Mode| m.name == name) {
                return Err(f.pos().syntax(format!("mode `{name}` defined twice")));
            }
            let (vars, rhs) = ode_equations(eqs)?;
            if let Some(v) = vars.iter().find(|v| scope(v).is_none()) {
                return Err(eqs.pos().error(ParseErrorKind::Undeclared(v.clone())));
            }
            // Reorder to the automaton's state order.
            let to_global = |i: usize| scope(&vars[i]).expect("checked");
            let rhs = state
                .iter()
                .map(|s| {
                    vars.iter()
                        .position(|v| v == s)
                        .map(|k| rhs[k].map_vars(&to_global))
                        .ok_or_else(|| eqs.pos().error(ParseErrorKind::Invalid(format!("no equation for `{s}`"))))
                })
                .collect::<Result<Vec<Term>, _>>()?;
            let system = OdeSystem::new(name.clone(), state.clone(), rhs, bounds.clone())
                .map_err(|e| f.pos().error(ParseErrorKind::Invalid(e.to_string())))?;
            let invariant = opts
                .get(":invariant")
                .map(|s| formula(s, &scope, no_flow))
                .transpose()?
                .unwrap_or(Formula::True);
            modes.push(Mode {
                name,
                system: Arc::new(system),
                invariant,
            });
        }
    }
    let mode_ref = |s: &Sexp| -> Result<usize, ParseError> {
        let name = s.atom("a mode name")?;
        modes
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| s.pos().error(ParseErrorKind::Undeclared(name.to_string())))
    };

    let mut jumps = Vec::new();
    let mut init = None;
    let mut unsafe_set = None;
    for f in &forms {
        match f.form() {
            Some(("jump", args)) => {
                let (pos_args, opts) = keywords(args, &[":guard", ":reset"])?;
                let [from, to] = pos_args.as_slice() else {
                    return Err(f.pos().syntax("`jump` is `(jump from to :guard φ :reset ψ)`"));
                };
                let guard = opts
                    .get(":guard")
                    .map(|s| formula(s, &scope, no_flow))
                    .transpose()?
                    .unwrap_or(Formula::True);
                let reset = match opts.get(":reset") {
                    Some(s) => formula(s, &primed, no_flow)?,
                    None => Formula::And((0..n).flat_map(|i| identity(i, n)).collect()),
                };
                jumps.push(Jump {
                    from: mode_ref(from)?,
                    to: mode_ref(to)?,
                    guard,
                    reset,
                });
            }
            Some(("init", args)) => {
                let [m, phi] = args else {
                    return Err(f.pos().syntax("`init` is `(init mode φ)`"));
                };
                init = Some((mode_ref(m)?, formula(phi, &scope, no_flow)?));
            }
            Some(("unsafe", args)) => {
                let [phi] = args else {
                    return Err(f.pos().syntax("`unsafe` takes one formula"));
                };
                unsafe_set = Some(formula(phi, &scope, no_flow)?);
            }
            _ => {}
        }
    }
    let (init_mode, init) = init.ok_or_else(|| origin.syntax("missing `(init mode φ)`"))?;
    let unsafe_set = unsafe_set.ok_or_else(|| origin.syntax("missing `(unsafe φ)`"))?;
    Ok(HybridAutomaton {
        state,
        bounds,
        time_bound,
        modes,
        jumps,
        init_mode,
        init,
        unsafe_set,
        delta,
    })
}

/// `x_i' = x_i` as two atoms.
fn identity(i: usize, n: usize) -> Vec<Formula> {
    match Formula::eq(Term::var(i + n), Term::var(i)) {
        Formula::And(fs) => fs,
        f => vec![f],
    }
}

/// Index layout of the unrolling: per step `x.i`, `x.i.t`, `time.i`.
fn start_var(n: usize, step: usize, i: usize) -> usize {
    step * (2 * n + 1) + i
}

fn end_var(n: usize, step: usize, i: usize) -> usize {
    step * (2 * n + 1) + n + i
}

fn time_var(n: usize, step: usize) -> usize {
    step * (2 * n + 1) + 2 * n
}

/// Unrolls `h` to `k` jumps: `init(x.0) ∧ flow₀ ∧ jump₀ ∧ … ∧ flow_k ∧
/// unsafe(x.k.t)`, one conjunction per mode sequence, joined by `or` when
/// there is more than one.
pub fn encode_bmc(h: &HybridAutomaton, k: usize) -> Result<Problem, EncodeError> {
    let n = h.dim();
    let needed = h.variable_count(k);
    if needed > MAX_VARIABLES {
        return Err(EncodeError::TooManyVariables {
            depth: k,
            needed,
            cap: MAX_VARIABLES,
        });
    }
    let paths = h.mode_paths(k)?;

    let mut names = Vec::with_capacity(needed);
    let mut bounds = Vec::with_capacity(needed);
    for step in 0..=k {
        for (s, b) in h.state.iter().zip(&h.bounds) {
            names.push(format!("{s}.{step}"));
            bounds.push(*b);
        }
        for (s, b) in h.state.iter().zip(&h.bounds) {
            names.push(format!("{s}.{step}.t"));
            bounds.push(*b);
        }
        names.push(format!("time.{step}"));
        bounds.push(Interval::new(0.0, h.time_bound));
    }

    let mut flows: Vec<FlowConstraint> = Vec::new();
    let mut flow_ids: HashMap<(usize, usize), usize> = HashMap::new();
    let mut flow = |step: usize, mode: usize| -> Formula {
        let id = *flow_ids.entry((step, mode)).or_insert_with(|| {
            let m = &h.modes[mode];
            let mut fc = FlowConstraint::new(
                m.system.clone(),
                (0..n).map(|i| start_var(n, step, i)).collect(),
                time_var(n, step),
                (0..n).map(|i| end_var(n, step, i)).collect(),
            );
            if m.invariant != Formula::True {
                fc = fc.with_invariant(m.invariant.clone());
            }
            flows.push(fc);
            flows.len() - 1
        });
        Formula::Flow(id)
    };

    let init = h.init.map_vars(&|i| start_var(n, 0, i));
    let unsafe_end = h.unsafe_set.map_vars(&|i| end_var(n, k, i));
    let mut disjuncts = Vec::with_capacity(paths.len());
    for path in &paths {
        let mut conj = vec![init.clone(), flow(0, path[0])];
        for step in 1..=k {
            let (from, to) = (path[step - 1], path[step]);
            let mut options: Vec<Formula> = h
                .jumps
                .iter()
                .filter(|j| j.from == from && j.to == to)
                .map(|j| {
                    let guard = j.guard.map_vars(&|i| end_var(n, step - 1, i));
                    let reset = j.reset.map_vars(&|i| {
                        if i < n {
                            end_var(n, step - 1, i)
                        } else {
                            start_var(n, step, i - n)
                        }
                    });
                    Formula::And(vec![guard, reset])
                })
                .collect();
            conj.push(if options.len() == 1 {
                options.pop().expect("one")
            } else {
                Formula::Or(options)
            });
            conj.push(flow(step, to));
        }
        conj.push(unsafe_end.clone());
        disjuncts.push(Formula::And(conj));
    }
    let formula = if disjuncts.len() == 1 {
        disjuncts.pop().expect("one")
    } else {
        Formula::Or(disjuncts)
    };
    let systems = h.modes.iter().map(|m| m.system.clone()).collect();
    let bounds = VarBox::new(names.into(), bounds);
    let delta = h.delta.clone().unwrap_or_else(default_delta);
    Ok(Problem::new(bounds, formula, flows, systems, delta).expect("unrolling is well-formed"))
}
