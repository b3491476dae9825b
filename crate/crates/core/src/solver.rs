//! The δ-complete decision procedure: branch-and-prune over conjunctions of
//! atoms and flow constraints, driven by a backtracking search over the
//! formula's and/or structure.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Condvar, Mutex};
use std::time::{Duration, Instant};

use num_rational::BigRational;
use num_traits::Signed;

use crate::contractor::{contract_all, max_shrink, AtomContractor};
use crate::error::ProblemError;
use crate::formula::{rational_to_interval, Atom, Formula};
use crate::interval::{Interval, VarBox};
use crate::ode::{ode_prune_fixpoint, FlowConstraint, FlowPrune, OdeOptions, OdeSystem};

/// Rounds of the combined algebraic/ODE pruning loop per box.
const MAX_PRUNE_ROUNDS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BranchPolicy {
    /// Widest candidate variable, ties by declaration order.
    #[default]
    WidestFirst,
    /// First candidate variable in declaration order.
    DeclarationOrder,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// ODE slice width; `None` picks `min(0.05·T, δ)` with `T` the largest
    /// declared duration bound.
    pub eps: Option<f64>,
    /// Pruning fixpoint tolerance; `None` picks `δ/10`.
    pub tol: Option<f64>,
    pub branch: BranchPolicy,
    /// Largest number of pending boxes.
    pub max_queue: usize,
    /// Largest number of bisections per theory call.
    pub max_branches: u64,
    pub time_limit: Option<Duration>,
    /// Worker threads for the box search; 1 keeps runs deterministic.
    pub threads: usize,
    /// Keep what trace emission needs (the active flows) in the result.
    pub trace: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps: None,
            tol: None,
            branch: BranchPolicy::default(),
            max_queue: 100_000,
            max_branches: 1_000_000,
            time_limit: None,
            threads: 1,
            trace: false,
        }
    }
}

/// A bounded existential problem: declared variables with finite bounds, a
/// negation-free formula and the flow constraints it references.
#[derive(Clone, Debug)]
pub struct Problem {
    pub bounds: VarBox,
    pub formula: Formula,
    pub flows: Vec<FlowConstraint>,
    pub systems: Vec<Arc<OdeSystem>>,
    pub delta: BigRational,
    pub config: SolverConfig,
}

impl Problem {
    pub fn new(
        bounds: VarBox,
        formula: Formula,
        flows: Vec<FlowConstraint>,
        systems: Vec<Arc<OdeSystem>>,
        delta: BigRational,
    ) -> Result<Self, ProblemError> {
        if !delta.is_positive() {
            return Err(ProblemError::NonPositiveDelta);
        }
        for (name, iv) in bounds.iter() {
            if !iv.is_finite() || iv.is_empty() {
                return Err(ProblemError::Unbounded(name.to_string()));
            }
        }
        if let Some(&i) = formula.flows().iter().find(|&&i| i >= flows.len()) {
            return Err(ProblemError::UnknownFlow(i));
        }
        let n = bounds.dim();
        for fc in &flows {
            let bad = |reason: String| ProblemError::BadFlow {
                system: fc.system.name().to_string(),
                reason,
            };
            let dim = fc.system.dim();
            if fc.x0.len() != dim || fc.xt.len() != dim {
                return Err(bad(format!("expects {dim} state variables")));
            }
            if fc.vars().any(|v| v >= n) {
                return Err(bad("references an undeclared variable".into()));
            }
            if bounds[fc.time].lo() < 0.0 {
                return Err(bad(format!("duration `{}` may be negative", bounds.names()[fc.time])));
            }
        }
        Ok(Self {
            bounds,
            formula,
            flows,
            systems,
            delta,
            config: SolverConfig::default(),
        })
    }

    pub fn with_config(mut self, config: SolverConfig) -> Self {
        self.config = config;
        self
    }

    /// δ as a float, rounded down.
    pub fn delta_f64(&self) -> f64 {
        rational_to_interval(&self.delta).lo()
    }

    /// Largest declared duration bound over all flows.
    pub fn horizon(&self) -> Option<f64> {
        self.flows
            .iter()
            .map(|f| self.bounds[f.time].hi())
            .fold(None, |acc, t| Some(acc.map_or(t, |a: f64| a.max(t))))
    }

    pub fn eps(&self) -> f64 {
        default_eps(&self.config, self.delta_f64(), self.horizon())
    }

    pub fn tol(&self) -> f64 {
        self.config.tol.unwrap_or(self.delta_f64() / 10.0)
    }

    pub fn ode_options(&self) -> OdeOptions {
        OdeOptions {
            eps: self.eps(),
            tol: self.tol(),
        }
    }
}

fn default_eps(config: &SolverConfig, delta: f64, horizon: Option<f64>) -> f64 {
    config.eps.unwrap_or_else(|| match horizon {
        Some(t) if t > 0.0 => (0.05 * t).min(delta),
        _ => delta,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    DeltaSat,
    Unsat,
    /// A resource limit was hit; says nothing about satisfiability.
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::DeltaSat => "delta-sat",
            Verdict::Unsat => "unsat",
            Verdict::Unknown => "unknown: resource limit",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Stats {
    pub branches: u64,
    pub prunes: u64,
    pub ode_steps: u64,
    /// Conjunctions handed to branch-and-prune.
    pub theory_calls: u64,
    pub elapsed: Duration,
}

impl Stats {
    fn absorb(&mut self, other: &Stats) {
        self.branches += other.branches;
        self.prunes += other.prunes;
        self.ode_steps += other.ode_steps;
        self.theory_calls += other.theory_calls;
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "branches={} prunes={} ode_steps={} theory_calls={} time_ms={}",
            self.branches,
            self.prunes,
            self.ode_steps,
            self.theory_calls,
            self.elapsed.as_millis()
        )
    }
}

#[derive(Clone, Debug)]
pub struct SolverResult {
    pub verdict: Verdict,
    pub witness: Option<VarBox>,
    pub stats: Stats,
    /// Flows of the satisfied conjunction, as indices into the problem.
    pub active_flows: Vec<usize>,
    /// Which limit was hit, for unknown verdicts.
    pub note: Option<String>,
}

impl SolverResult {
    pub fn is_delta_sat(&self) -> bool {
        self.verdict == Verdict::DeltaSat
    }

    pub fn is_unsat(&self) -> bool {
        self.verdict == Verdict::Unsat
    }
}

/// One conjunct handed to branch-and-prune.
#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Atom(Atom),
    Flow(FlowConstraint),
}

enum Outcome {
    Sat(VarBox),
    Unsat,
    Unknown(String),
}

struct Limits {
    max_queue: usize,
    max_branches: u64,
    deadline: Option<Instant>,
}

impl Limits {
    fn new(config: &SolverConfig, start: Instant) -> Self {
        Self {
            max_queue: config.max_queue,
            max_branches: config.max_branches,
            deadline: config.time_limit.map(|d| start + d),
        }
    }

    fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Branch-and-prune over one conjunction.
struct Engine {
    atoms: Vec<AtomContractor>,
    flows: Vec<FlowConstraint>,
    delta: f64,
    tol: f64,
    opts: OdeOptions,
    policy: BranchPolicy,
}

impl Engine {
    fn new(literals: &[Literal], delta: f64, tol: f64, eps: f64, policy: BranchPolicy) -> Self {
        let mut atoms = Vec::new();
        let mut flows = Vec::new();
        for l in literals {
            match l {
                Literal::Atom(a) => atoms.push(AtomContractor::new(a)),
                Literal::Flow(f) => flows.push(f.clone()),
            }
        }
        Self {
            atoms,
            flows,
            delta,
            tol,
            opts: OdeOptions { eps, tol },
            policy,
        }
    }

    fn flow_prune(&self, fc: &FlowConstraint, ivs: &[Interval]) -> FlowPrune {
        let b0: Vec<Interval> = fc.x0.iter().map(|&i| ivs[i]).collect();
        let bt: Vec<Interval> = fc.xt.iter().map(|&i| ivs[i]).collect();
        ode_prune_fixpoint(fc, &b0, &bt, ivs[fc.time], &self.opts)
    }

    /// Contracts `ivs` to a fixpoint of all pruning operators. `false` if
    /// the box was refuted.
    fn prune(&self, ivs: &mut [Interval], stats: &mut Stats, scratch: &mut Vec<Interval>) -> bool {
        stats.prunes += 1;
        for _ in 0..MAX_PRUNE_ROUNDS {
            let before = ivs.to_vec();
            if !contract_all(&self.atoms, ivs, self.tol, scratch) {
                return false;
            }
            for fc in &self.flows {
                let r = self.flow_prune(fc, ivs);
                stats.ode_steps += r.steps as u64;
                if r.is_empty() {
                    return false;
                }
                for (k, &i) in fc.x0.iter().enumerate() {
                    ivs[i] = ivs[i].intersect(&r.x0[k]);
                }
                for (k, &i) in fc.xt.iter().enumerate() {
                    ivs[i] = ivs[i].intersect(&r.xt[k]);
                }
                ivs[fc.time] = ivs[fc.time].intersect(&r.time);
                if ivs.iter().any(Interval::is_empty) {
                    return false;
                }
            }
            debug_assert!(ivs.iter().zip(&before).all(|(a, b)| a.is_subset(b)));
            if self.flows.is_empty() || max_shrink(&before, ivs) <= self.tol {
                break;
            }
        }
        true
    }

    fn atom_resolved(&self, a: &AtomContractor, ivs: &[Interval]) -> bool {
        let res = a.residual(ivs);
        !res.is_empty()
            && match a.relation() {
                crate::formula::Relation::Ge => res.lo() >= -self.delta,
                crate::formula::Relation::Gt => res.lo() > -self.delta,
            }
    }

    fn flow_resolved(&self, fc: &FlowConstraint, ivs: &[Interval]) -> bool {
        fc.vars().all(|v| ivs[v].width() < self.delta)
    }

    /// Variables of literals not yet δ-resolved on the box.
    fn unresolved_vars(&self, ivs: &[Interval]) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for a in &self.atoms {
            if !self.atom_resolved(a, ivs) {
                out.extend(a.vars());
            }
        }
        for fc in &self.flows {
            if !self.flow_resolved(fc, ivs) {
                out.extend(fc.vars());
            }
        }
        out
    }

    fn pick_branch(&self, ivs: &[Interval], candidates: &BTreeSet<usize>) -> Option<usize> {
        let splittable = candidates
            .iter()
            .copied()
            .filter(|&v| ivs[v].split().is_some());
        match self.policy {
            BranchPolicy::WidestFirst => splittable.fold(None, |best: Option<usize>, v| match best {
                Some(b) if ivs[b].width() >= ivs[v].width() => Some(b),
                _ => Some(v),
            }),
            BranchPolicy::DeclarationOrder => splittable.min(),
        }
    }

    /// The witness gate on a pruned box: no atom certainly violates its
    /// δ-weakening and every flow still prunes to a non-empty triple.
    fn consistent(&self, ivs: &[Interval], stats: &mut Stats) -> bool {
        self.atoms.iter().all(|a| {
            let res = a.residual(ivs);
            let atom = match a.relation() {
                crate::formula::Relation::Ge => Atom::ge(crate::formula::Term::int(0)),
                crate::formula::Relation::Gt => Atom::gt(crate::formula::Term::int(0)),
            };
            !atom.certainly_violated(res, self.delta)
        }) && self.flows.iter().all(|fc| {
            let r = self.flow_prune(fc, ivs);
            stats.ode_steps += r.steps as u64;
            !r.is_empty()
        })
    }

    /// Processes one box: `Ok(Some(sat))`, `Ok(None)` after pushing children
    /// or refuting, `Err(())` when the box could be neither resolved nor split
    /// (incompleteness, not a refutation).
    fn step(
        &self,
        mut b: VarBox,
        push: &mut dyn FnMut(VarBox),
        stats: &mut Stats,
        scratch: &mut Vec<Interval>,
    ) -> Result<Option<VarBox>, ()> {
        if !self.prune(b.intervals_mut(), stats, scratch) {
            return Ok(None);
        }
        let unresolved = self.unresolved_vars(b.intervals());
        if unresolved.is_empty() {
            return if self.consistent(b.intervals(), stats) {
                Ok(Some(b))
            } else {
                let all = (0..b.dim()).collect();
                self.split(b, &all, push, stats)
            };
        }
        self.split(b, &unresolved, push, stats)
    }

    fn split(
        &self,
        b: VarBox,
        candidates: &BTreeSet<usize>,
        push: &mut dyn FnMut(VarBox),
        stats: &mut Stats,
    ) -> Result<Option<VarBox>, ()> {
        match self.pick_branch(b.intervals(), candidates) {
            Some(v) => {
                let (lo, hi) = b.bisect(v).expect("splittable");
                stats.branches += 1;
                push(hi);
                push(lo);
                Ok(None)
            }
            // Nothing left to split: accept on the weak gate.
            None if self.consistent(b.intervals(), stats) => Ok(Some(b)),
            None => Err(()),
        }
    }

    fn search(&self, root: VarBox, limits: &Limits, stats: &mut Stats) -> Outcome {
        let mut stack = vec![root];
        let mut scratch = Vec::new();
        let mut incomplete = false;
        while let Some(b) = stack.pop() {
            if stats.branches >= limits.max_branches {
                return Outcome::Unknown(format!("branch limit {} reached", limits.max_branches));
            }
            if limits.expired() {
                return Outcome::Unknown("time limit reached".into());
            }
            let mut children = Vec::new();
            match self.step(b, &mut |c| children.push(c), stats, &mut scratch) {
                Ok(Some(w)) => return Outcome::Sat(w),
                Ok(None) => stack.extend(children),
                Err(()) => incomplete = true,
            }
            if stack.len() > limits.max_queue {
                return Outcome::Unknown(format!("queue limit {} reached", limits.max_queue));
            }
        }
        if incomplete {
            Outcome::Unknown("box could not be resolved or split".into())
        } else {
            Outcome::Unsat
        }
    }

    fn search_parallel(&self, root: VarBox, limits: &Limits, threads: usize, stats: &mut Stats) -> Outcome {
        struct Shared {
            stack: Vec<VarBox>,
            active: usize,
            result: Option<Outcome>,
            incomplete: bool,
        }
        let shared = Mutex::new(Shared {
            stack: vec![root],
            active: 0,
            result: None,
            incomplete: false,
        });
        let wake = Condvar::new();
        let done = AtomicBool::new(false);
        let branches = AtomicU64::new(0);
        let totals = Mutex::new(Stats::default());

        std::thread::scope(|s| {
            for _ in 0..threads {
                s.spawn(|| {
                    let mut local = Stats::default();
                    let mut scratch = Vec::new();
                    loop {
                        let b = {
                            let mut g = shared.lock().unwrap();
                            loop {
                                if done.load(Ordering::Acquire) {
                                    break None;
                                }
                                if let Some(b) = g.stack.pop() {
                                    g.active += 1;
                                    break Some(b);
                                }
                                if g.active == 0 {
                                    done.store(true, Ordering::Release);
                                    wake.notify_all();
                                    break None;
                                }
                                g = wake.wait(g).unwrap();
                            }
                        };
                        let Some(b) = b else { break };
                        let before = local.branches;
                        let mut children = Vec::new();
                        let r = self.step(b, &mut |c| children.push(c), &mut local, &mut scratch);
                        let total = branches.fetch_add(local.branches - before, Ordering::Relaxed)
                            + (local.branches - before);
                        let mut g = shared.lock().unwrap();
                        g.active -= 1;
                        match r {
                            Ok(Some(w)) => {
                                if g.result.is_none() {
                                    g.result = Some(Outcome::Sat(w));
                                }
                                done.store(true, Ordering::Release);
                            }
                            Ok(None) => g.stack.extend(children),
                            Err(()) => g.incomplete = true,
                        }
                        let limit = if total >= limits.max_branches {
                            Some(format!("branch limit {} reached", limits.max_branches))
                        } else if g.stack.len() > limits.max_queue {
                            Some(format!("queue limit {} reached", limits.max_queue))
                        } else if limits.expired() {
                            Some("time limit reached".into())
                        } else {
                            None
                        };
                        if let Some(msg) = limit {
                            if g.result.is_none() {
                                g.result = Some(Outcome::Unknown(msg));
                            }
                            done.store(true, Ordering::Release);
                        }
                        wake.notify_all();
                    }
                    totals.lock().unwrap().absorb(&local);
                });
            }
        });

        stats.absorb(&totals.into_inner().unwrap());
        let g = shared.into_inner().unwrap();
        match g.result {
            Some(r) => r,
            None if g.incomplete => Outcome::Unknown("box could not be resolved or split".into()),
            None => Outcome::Unsat,
        }
    }
}

fn run_engine(engine: &Engine, root: VarBox, config: &SolverConfig, limits: &Limits, stats: &mut Stats) -> Outcome {
    stats.theory_calls += 1;
    if config.threads > 1 {
        engine.search_parallel(root, limits, config.threads, stats)
    } else {
        engine.search(root, limits, stats)
    }
}

/// Branch-and-prune on a conjunction of literals within `bounds`.
pub fn icp_solve(literals: &[Literal], bounds: &VarBox, delta: f64, config: &SolverConfig) -> SolverResult {
    let start = Instant::now();
    let horizon = literals
        .iter()
        .filter_map(|l| match l {
            Literal::Flow(f) => Some(bounds[f.time].hi()),
            Literal::Atom(_) => None,
        })
        .fold(None, |acc: Option<f64>, t| Some(acc.map_or(t, |a| a.max(t))));
    let eps = default_eps(config, delta, horizon);
    let tol = config.tol.unwrap_or(delta / 10.0);
    let engine = Engine::new(literals, delta, tol, eps, config.branch);
    let limits = Limits::new(config, start);
    let mut stats = Stats::default();
    let outcome = run_engine(&engine, bounds.clone(), config, &limits, &mut stats);
    stats.elapsed = start.elapsed();
    finish(outcome, stats, Vec::new())
}

fn finish(outcome: Outcome, stats: Stats, active_flows: Vec<usize>) -> SolverResult {
    match outcome {
        Outcome::Sat(w) => SolverResult {
            verdict: Verdict::DeltaSat,
            witness: Some(w),
            stats,
            active_flows,
            note: None,
        },
        Outcome::Unsat => SolverResult {
            verdict: Verdict::Unsat,
            witness: None,
            stats,
            active_flows: Vec::new(),
            note: None,
        },
        Outcome::Unknown(msg) => SolverResult {
            verdict: Verdict::Unknown,
            witness: None,
            stats,
            active_flows: Vec::new(),
            note: Some(msg),
        },
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum LitId {
    Atom(usize),
    Flow(usize),
}

/// Backtracking search over the and/or structure. Each node's cube is
/// pruned before descending; refuted cubes are memoized and any superset
/// is skipped.
struct Dpll<'p> {
    problem: &'p Problem,
    atoms: Vec<Atom>,
    refuted: Vec<BTreeSet<LitId>>,
    limits: Limits,
    stats: Stats,
    delta: f64,
    eps: f64,
    tol: f64,
    unknown: Option<String>,
}

impl<'p> Dpll<'p> {
    fn atom_id(&mut self, a: &Atom) -> usize {
        match self.atoms.iter().position(|b| b == a) {
            Some(i) => i,
            None => {
                self.atoms.push(a.clone());
                self.atoms.len() - 1
            }
        }
    }

    fn literals(&self, cube: &BTreeSet<LitId>) -> Vec<Literal> {
        cube.iter()
            .map(|id| match *id {
                LitId::Atom(i) => Literal::Atom(self.atoms[i].clone()),
                LitId::Flow(i) => Literal::Flow(self.problem.flows[i].clone()),
            })
            .collect()
    }

    fn engine(&self, cube: &BTreeSet<LitId>) -> Engine {
        Engine::new(
            &self.literals(cube),
            self.delta,
            self.tol,
            self.eps,
            self.problem.config.branch,
        )
    }

    fn is_refuted(&self, cube: &BTreeSet<LitId>) -> bool {
        self.refuted.iter().any(|r| r.is_subset(cube))
    }

    fn dfs(
        &mut self,
        mut cube: BTreeSet<LitId>,
        mut agenda: Vec<&'p Formula>,
        mut ors: Vec<&'p [Formula]>,
        bounds: &VarBox,
    ) -> Option<(VarBox, BTreeSet<LitId>)> {
        while let Some(f) = agenda.pop() {
            match f {
                Formula::True => {}
                Formula::False => return None,
                Formula::Atom(a) => {
                    let id = self.atom_id(a);
                    cube.insert(LitId::Atom(id));
                }
                Formula::Flow(i) => {
                    cube.insert(LitId::Flow(*i));
                }
                Formula::And(fs) => agenda.extend(fs.iter().rev()),
                Formula::Or(fs) => ors.push(fs),
            }
        }
        if self.is_refuted(&cube) {
            return None;
        }
        if self.limits.expired() {
            self.unknown.get_or_insert_with(|| "time limit reached".into());
            return None;
        }
        let engine = self.engine(&cube);
        let mut pruned = bounds.clone();
        let mut scratch = Vec::new();
        if !engine.prune(pruned.intervals_mut(), &mut self.stats, &mut scratch) {
            self.refuted.push(cube);
            return None;
        }
        // Disjunctions already satisfied by the cube need no choice.
        ors.retain(|fs| !fs.iter().any(|g| self.implied(g, &cube)));
        match ors.pop() {
            None => {
                let outcome = run_engine(&engine, pruned, &self.problem.config, &self.limits, &mut self.stats);
                match outcome {
                    Outcome::Sat(w) => Some((w, cube)),
                    Outcome::Unsat => {
                        self.refuted.push(cube);
                        None
                    }
                    Outcome::Unknown(msg) => {
                        self.unknown.get_or_insert(msg);
                        None
                    }
                }
            }
            Some(choices) => {
                for g in choices {
                    if let Some(found) = self.dfs(cube.clone(), vec![g], ors.clone(), &pruned) {
                        return Some(found);
                    }
                    if self.unknown.is_some() && self.limits.expired() {
                        return None;
                    }
                }
                None
            }
        }
    }

    /// `g` is a literal (or conjunction of literals) already in the cube.
    fn implied(&self, g: &Formula, cube: &BTreeSet<LitId>) -> bool {
        match g {
            Formula::True => true,
            Formula::Atom(a) => self
                .atoms
                .iter()
                .position(|b| b == a)
                .is_some_and(|i| cube.contains(&LitId::Atom(i))),
            Formula::Flow(i) => cube.contains(&LitId::Flow(*i)),
            Formula::And(fs) => fs.iter().all(|h| self.implied(h, cube)),
            Formula::Or(fs) => fs.iter().any(|h| self.implied(h, cube)),
            Formula::False => false,
        }
    }
}

/// Decides `p` up to δ.
pub fn dpll_solve(p: &Problem) -> SolverResult {
    let start = Instant::now();
    let mut d = Dpll {
        problem: p,
        atoms: Vec::new(),
        refuted: Vec::new(),
        limits: Limits::new(&p.config, start),
        stats: Stats::default(),
        delta: p.delta_f64(),
        eps: p.eps(),
        tol: p.tol(),
        unknown: None,
    };
    let found = d.dfs(BTreeSet::new(), vec![&p.formula], Vec::new(), &p.bounds);
    let mut stats = std::mem::take(&mut d.stats);
    stats.elapsed = start.elapsed();
    match found {
        Some((w, cube)) => {
            debug_assert!(check_witness(&w, p));
            let flows = cube
                .iter()
                .filter_map(|id| match id {
                    LitId::Flow(i) => Some(*i),
                    LitId::Atom(_) => None,
                })
                .collect();
            finish(Outcome::Sat(w), stats, flows)
        }
        None => match d.unknown {
            Some(msg) => finish(Outcome::Unknown(msg), stats, Vec::new()),
            None => finish(Outcome::Unsat, stats, Vec::new()),
        },
    }
}

/// Whether `b` certifies the δ-weakening of `p`: within the declared bounds,
/// and the formula evaluates to possibly-true with every atom's residual
/// meeting its weakened relation and every used flow pruning to a non-empty
/// triple.
pub fn check_witness(b: &VarBox, p: &Problem) -> bool {
    if !b.same_vars(&p.bounds) || b.is_empty() || !b.is_subset(&p.bounds) {
        return false;
    }
    let delta = p.delta_f64();
    let opts = p.ode_options();
    holds_weakly(&p.formula, b.intervals(), p, delta, &opts)
}

fn holds_weakly(f: &Formula, ivs: &[Interval], p: &Problem, delta: f64, opts: &OdeOptions) -> bool {
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => !a.certainly_violated(a.term.eval(ivs), delta),
        Formula::Flow(i) => {
            let fc = &p.flows[*i];
            let b0: Vec<Interval> = fc.x0.iter().map(|&v| ivs[v]).collect();
            let bt: Vec<Interval> = fc.xt.iter().map(|&v| ivs[v]).collect();
            !ode_prune_fixpoint(fc, &b0, &bt, ivs[fc.time], opts).is_empty()
        }
        Formula::And(fs) => fs.iter().all(|g| holds_weakly(g, ivs, p, delta, opts)),
        Formula::Or(fs) => fs.iter().any(|g| holds_weakly(g, ivs, p, delta, opts)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Term;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi)
    }

    fn x() -> Term {
        Term::var(0)
    }

    fn delta(num: i64, den: i64) -> BigRational {
        BigRational::new(num.into(), den.into())
    }

    #[test]
    fn square_root_of_two_is_delta_sat() {
        let lits = vec![
            Literal::Atom(Atom::ge(x() * x() - Term::int(2))),
            Literal::Atom(Atom::ge(Term::int(2) - x() * x())),
        ];
        let b = VarBox::from_pairs([("x", iv(0.0, 2.0))]);
        let r = icp_solve(&lits, &b, 0.01, &SolverConfig::default());
        assert!(r.is_delta_sat());
        let w = r.witness.unwrap();
        let m = w[0].mid();
        assert!((m * m - 2.0).abs() <= 0.01 + 1e-9, "{w}");
    }

    #[test]
    fn contradictory_bounds_are_unsat() {
        let lits = vec![
            Literal::Atom(Atom::ge(x())),
            Literal::Atom(Atom::ge(-x() - Term::int(1))),
        ];
        let b = VarBox::from_pairs([("x", iv(-5.0, 5.0))]);
        assert!(icp_solve(&lits, &b, 0.01, &SolverConfig::default()).is_unsat());
    }

    #[test]
    fn case_split_finds_the_right_branch() {
        let f = Formula::And(vec![
            Formula::Or(vec![
                Formula::Atom(Atom::ge(x() - Term::int(3))),
                Formula::Atom(Atom::ge(-x() - Term::int(3))),
            ]),
            Formula::Atom(Atom::ge(x())),
        ]);
        let b = VarBox::from_pairs([("x", iv(-10.0, 10.0))]);
        let p = Problem::new(b, f, vec![], vec![], delta(1, 100)).unwrap();
        let r = dpll_solve(&p);
        assert!(r.is_delta_sat());
        assert!(r.witness.as_ref().unwrap()[0].lo() >= 3.0 - 0.01);
        assert!(check_witness(r.witness.as_ref().unwrap(), &p));
    }

    #[test]
    fn sign_flipped_atoms_are_unsat() {
        let a = Atom::gt(x() - Term::int(1));
        let f = Formula::And(vec![Formula::Atom(a.clone()), Formula::Atom(a.negated())]);
        let b = VarBox::from_pairs([("x", iv(-10.0, 10.0))]);
        let p = Problem::new(b, f, vec![], vec![], delta(1, 100)).unwrap();
        let r = dpll_solve(&p);
        assert!(r.is_unsat());
        assert_eq!(r.stats.theory_calls, 0);
    }

    #[test]
    fn parallel_search_agrees() {
        let lits = vec![
            Literal::Atom(Atom::ge(x() * x() - Term::int(2))),
            Literal::Atom(Atom::ge(Term::int(2) - x() * x())),
        ];
        let b = VarBox::from_pairs([("x", iv(-2.0, 2.0))]);
        let cfg = SolverConfig {
            threads: 4,
            ..SolverConfig::default()
        };
        assert!(icp_solve(&lits, &b, 0.001, &cfg).is_delta_sat());
        let lits = vec![Literal::Atom(Atom::ge(x() * x() + Term::int(1)).negated())];
        assert!(icp_solve(&lits, &b, 0.001, &cfg).is_unsat());
    }

    #[test]
    fn bad_problems_are_rejected() {
        let b = VarBox::from_pairs([("x", iv(0.0, 1.0))]);
        assert_eq!(
            Problem::new(b.clone(), Formula::True, vec![], vec![], delta(0, 1)).unwrap_err(),
            ProblemError::NonPositiveDelta
        );
        assert_eq!(
            Problem::new(b, Formula::Flow(0), vec![], vec![], delta(1, 10)).unwrap_err(),
            ProblemError::UnknownFlow(0)
        );
        let b = VarBox::from_pairs([("x", iv(0.0, f64::INFINITY))]);
        assert!(Problem::new(b, Formula::True, vec![], vec![], delta(1, 10)).is_err());
    }
}
