//! Validated enclosures of ODE solution functions and the pruning operators
//! for flow constraints `x_t = y(t, x_0)`.
//!
//! One integration step first validates an a-priori box `A` with
//! `B + [0,h]·g(A) ⊆ A` (interval Picard iteration), which encloses every
//! trajectory from `B` over the step. The end box comes from the first-order
//! Taylor polynomial in mean-value form plus a second-order remainder over
//! `A`, intersected with the plain first-order bound. Non-smooth right-hand
//! sides (`abs`, `min`, `max`) use the first-order bound only.
//!
//! The system domain `D` and an optional trajectory invariant both act as
//! constraints on every point of the trajectory: slices are intersected with
//! them and a slice that misses them ends the march.

use std::sync::{Arc, OnceLock};

use crate::contractor::{max_shrink, FormulaContractor};
use crate::error::OdeError;
use crate::formula::{CompiledTerm, Formula, Term};
use crate::interval::Interval;

/// Picard validation attempts per step.
const PICARD_ITERS: usize = 20;
/// Relative inflation of the a-priori candidate.
const INFLATE_REL: f64 = 0.1;
/// Smallest step, relative to the slice width, before giving up.
const MIN_STEP_FRACTION: f64 = 1.0 / 4096.0;
/// Contraction tolerance for invariant bodies on slice boxes.
const INVARIANT_TOL: f64 = 1e-9;

#[derive(Debug)]
struct Compiled {
    g: Vec<CompiledTerm>,
    /// `jac[i][j] = ∂g_i/∂x_j`, present for smooth systems.
    jac: Option<Vec<Vec<CompiledTerm>>>,
    /// `(Dg · g)_i`, the second time derivative along the flow.
    second: Option<Vec<CompiledTerm>>,
}

impl Compiled {
    fn new(rhs: &[Term]) -> Self {
        let n = rhs.len();
        let g = rhs.iter().map(CompiledTerm::new).collect();
        let smooth = rhs.iter().all(Term::is_smooth);
        let jac_terms: Option<Vec<Vec<Term>>> = smooth
            .then(|| {
                rhs.iter()
                    .map(|gi| (0..n).map(|j| gi.derivative(j)).collect::<Option<Vec<_>>>())
                    .collect::<Option<Vec<_>>>()
            })
            .flatten();
        let second = jac_terms.as_ref().map(|jac| {
            jac.iter()
                .map(|row| {
                    let sum = row.iter().zip(rhs).fold(Term::int(0), |acc, (d, gj)| {
                        crate::formula::sadd(acc, crate::formula::smul(d.clone(), gj.clone()))
                    });
                    CompiledTerm::new(&sum)
                })
                .collect()
        });
        let jac = jac_terms.map(|jac| {
            jac.iter()
                .map(|row| row.iter().map(CompiledTerm::new).collect())
                .collect()
        });
        Self { g, jac, second }
    }
}

/// An autonomous system `dx/dt = g(x)` over a compact domain.
#[derive(Debug, Clone)]
pub struct OdeSystem {
    name: String,
    state: Vec<String>,
    rhs: Vec<Term>,
    domain: Vec<Interval>,
    lipschitz: Option<Vec<f64>>,
    reversed: bool,
    compiled: Arc<Compiled>,
    reverse: OnceLock<Arc<OdeSystem>>,
}

impl PartialEq for OdeSystem {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.state == other.state
            && self.rhs == other.rhs
            && self.domain == other.domain
            && self.lipschitz == other.lipschitz
            && self.reversed == other.reversed
    }
}

impl OdeSystem {
    /// `rhs[i]` is the derivative of `state[i]` and may only reference state
    /// indices; `domain` must be finite.
    pub fn new(
        name: impl Into<String>,
        state: Vec<String>,
        rhs: Vec<Term>,
        domain: Vec<Interval>,
    ) -> Result<Self, OdeError> {
        let n = state.len();
        if rhs.len() != n || domain.len() != n {
            return Err(OdeError::Invalid(format!(
                "{n} state variables, {} right-hand sides, {} domain intervals",
                rhs.len(),
                domain.len()
            )));
        }
        if let Some(v) = rhs.iter().flat_map(Term::vars).find(|&v| v >= n) {
            return Err(OdeError::Invalid(format!("right-hand side references variable #{v}")));
        }
        if let Some(i) = domain.iter().position(|d| !d.is_finite()) {
            return Err(OdeError::Invalid(format!("domain of `{}` is not finite", state[i])));
        }
        let compiled = Arc::new(Compiled::new(&rhs));
        Ok(Self {
            name: name.into(),
            state,
            rhs,
            domain,
            lipschitz: None,
            reversed: false,
            compiled,
            reverse: OnceLock::new(),
        })
    }

    pub fn with_lipschitz(mut self, hint: Vec<f64>) -> Self {
        self.lipschitz = Some(hint);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn state(&self) -> &[String] {
        &self.state
    }

    pub fn rhs(&self) -> &[Term] {
        &self.rhs
    }

    pub fn domain(&self) -> &[Interval] {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.state.len()
    }

    pub fn is_reversed(&self) -> bool {
        self.reversed
    }

    pub fn lipschitz(&self) -> Option<&[f64]> {
        self.lipschitz.as_deref()
    }

    /// Whether steps use the second-order mean-value form.
    pub fn is_smooth(&self) -> bool {
        self.compiled.second.is_some()
    }

    /// Evaluates `g` at a point (for simulation oracles).
    pub fn rhs_at(&self, x: &[f64]) -> Vec<f64> {
        self.rhs.iter().map(|t| t.eval_f64(x)).collect()
    }

    /// Range of `g` over a box.
    pub fn rhs_range(&self, b: &[Interval]) -> Vec<Interval> {
        self.compiled.g.iter().map(|g| g.eval(b)).collect()
    }

    /// The time-reversed system (cached).
    pub fn reversed_system(&self) -> Arc<OdeSystem> {
        self.reverse.get_or_init(|| Arc::new(reverse_system(self))).clone()
    }

    /// One validated step of length `h` from `b0`: `(slice, end)`.
    fn step(&self, b0: &[Interval], h: Interval) -> Result<(Vec<Interval>, Vec<Interval>), OdeError> {
        let n = self.dim();
        let span = Interval::new(0.0, h.hi());
        let eval = |terms: &[CompiledTerm], at: &[Interval]| -> Option<Vec<Interval>> {
            let v: Vec<Interval> = terms.iter().map(|t| t.eval(at)).collect();
            v.iter().all(Interval::is_finite).then_some(v)
        };
        let fail = || OdeError::StepTooLarge { h: h.hi() };

        let g0 = eval(&self.compiled.g, b0).ok_or_else(fail)?;
        let mut apriori: Vec<Interval> = (0..n).map(|i| b0[i] + span * g0[i]).collect();
        let mut validated = None;
        for _ in 0..PICARD_ITERS {
            let cand: Vec<Interval> = apriori
                .iter()
                .map(|a| a.inflate(INFLATE_REL, 1e-12 * (1.0 + a.mag())))
                .collect();
            let ga = eval(&self.compiled.g, &cand).ok_or_else(fail)?;
            let next: Vec<Interval> = (0..n).map(|i| b0[i] + span * ga[i]).collect();
            if next.iter().zip(&cand).all(|(x, c)| x.is_subset(c)) {
                validated = Some((next, ga));
                break;
            }
            apriori = next;
        }
        let (apriori, ga) = validated.ok_or_else(fail)?;

        let mut end: Vec<Interval> = (0..n)
            .map(|i| (b0[i] + h * ga[i]).intersect(&apriori[i]))
            .collect();

        if let (Some(jac), Some(second)) = (&self.compiled.jac, &self.compiled.second) {
            if let Some(mv) = self.mean_value_end(b0, h, &apriori, jac, second) {
                for (e, m) in end.iter_mut().zip(mv) {
                    *e = e.intersect(&m);
                }
            }
        }
        Ok((apriori, end))
    }

    /// `φ(m) + (I + h·Dg(B))(B − m) + h²/2·(Dg·g)(A)` with `φ(x) = x + h·g(x)`.
    fn mean_value_end(
        &self,
        b0: &[Interval],
        h: Interval,
        apriori: &[Interval],
        jac: &[Vec<CompiledTerm>],
        second: &[CompiledTerm],
    ) -> Option<Vec<Interval>> {
        let n = self.dim();
        let mid: Vec<Interval> = b0.iter().map(|b| Interval::point(b.mid())).collect();
        let gm: Vec<Interval> = self.compiled.g.iter().map(|g| g.eval(&mid)).collect();
        let dev: Vec<Interval> = b0.iter().zip(&mid).map(|(b, m)| *b - *m).collect();
        let half_h2 = h.sqr() * Interval::point(0.5);
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut acc = mid[i] + h * gm[i];
            for j in 0..n {
                let d = jac[i][j].eval(b0);
                let coeff = if i == j { Interval::ONE + h * d } else { h * d };
                acc = acc + coeff * dev[j];
            }
            acc = acc + half_h2 * second[i].eval(apriori);
            if !acc.is_finite() {
                return None;
            }
            out.push(acc);
        }
        Some(out)
    }
}

/// The system with negated right-hand side; `x_t = y(t, x_0)` iff
/// `x_0 = y₋(t, x_t)`.
pub fn reverse_system(s: &OdeSystem) -> OdeSystem {
    let rhs: Vec<Term> = s.rhs.iter().map(Term::negate).collect();
    OdeSystem {
        name: s.name.clone(),
        state: s.state.clone(),
        compiled: Arc::new(Compiled::new(&rhs)),
        rhs,
        domain: s.domain.clone(),
        lipschitz: s.lipschitz.clone(),
        reversed: !s.reversed,
        reverse: OnceLock::new(),
    }
}

/// A formula that must hold at every point of a trajectory, written over the
/// system's state indices.
#[derive(Debug, Clone)]
pub struct ForallT {
    body: Formula,
    contractor: FormulaContractor,
}

impl PartialEq for ForallT {
    fn eq(&self, other: &Self) -> bool {
        self.body == other.body
    }
}

impl ForallT {
    pub fn new(body: Formula) -> Self {
        let contractor = FormulaContractor::new(&body);
        Self { body, contractor }
    }

    pub fn body(&self) -> &Formula {
        &self.body
    }

    pub fn contractor(&self) -> &FormulaContractor {
        &self.contractor
    }
}

/// `x_t = y(t, x_0)` over problem variables: `x0[i]`, `xt[i]` are indices of
/// the problem variables bound to state component `i`, `time` the duration.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowConstraint {
    pub system: Arc<OdeSystem>,
    pub x0: Vec<usize>,
    pub xt: Vec<usize>,
    pub time: usize,
    pub invariant: Option<ForallT>,
}

impl FlowConstraint {
    pub fn new(system: Arc<OdeSystem>, x0: Vec<usize>, time: usize, xt: Vec<usize>) -> Self {
        Self {
            system,
            x0,
            xt,
            time,
            invariant: None,
        }
    }

    pub fn with_invariant(mut self, body: Formula) -> Self {
        self.invariant = Some(ForallT::new(body));
        self
    }

    /// All problem variables the constraint touches.
    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.x0
            .iter()
            .chain(&self.xt)
            .copied()
            .chain(std::iter::once(self.time))
    }

    fn invariant_contractor(&self) -> Option<&FormulaContractor> {
        self.invariant
            .as_ref()
            .map(ForallT::contractor)
            .filter(|c| !c.is_trivial())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    /// Slice width and nominal integration step.
    pub eps: f64,
    /// Fixpoint tolerance for the pruning loop.
    pub tol: f64,
}

impl OdeOptions {
    pub fn new(eps: f64) -> Self {
        Self { eps, tol: eps / 10.0 }
    }
}

/// A time sub-interval and a box enclosing every trajectory point over it.
#[derive(Debug, Clone, PartialEq)]
pub struct Slice {
    pub time: Interval,
    pub state: Vec<Interval>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlowEnclosure {
    /// Slices tiling the queried time interval, in time order. A point query
    /// yields a single degenerate slice.
    pub slices: Vec<Slice>,
    /// Hull of the states reachable at queried times.
    pub endpoint: Vec<Interval>,
    /// Integration steps taken.
    pub steps: usize,
    /// Set when the integrator gave up and fell back to the domain.
    pub diagnostic: Option<String>,
}

impl FlowEnclosure {
    fn empty(n: usize) -> Self {
        Self {
            slices: Vec::new(),
            endpoint: vec![Interval::EMPTY; n],
            steps: 0,
            diagnostic: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }
}

fn within(out: &[Interval], inp: &[Interval]) -> bool {
    out.len() == inp.len() && out.iter().zip(inp).all(|(a, b)| a.is_empty() || a.is_subset(b))
}

fn is_void(b: &[Interval]) -> bool {
    b.iter().any(Interval::is_empty)
}

fn intersect_all(a: &[Interval], b: &[Interval]) -> Vec<Interval> {
    a.iter().zip(b).map(|(x, y)| x.intersect(y)).collect()
}

fn hull_into(acc: &mut Vec<Interval>, b: &[Interval]) {
    for (a, x) in acc.iter_mut().zip(b) {
        *a = a.hull(x);
    }
}

/// Clips a state box to the domain and the invariant. `false` when nothing
/// remains.
fn restrict(
    sys: &OdeSystem,
    inv: Option<&FormulaContractor>,
    state: &mut [Interval],
    scratch: &mut Vec<Interval>,
) -> bool {
    for (s, d) in state.iter_mut().zip(&sys.domain) {
        *s = s.intersect(d);
        if s.is_empty() {
            return false;
        }
    }
    match inv {
        Some(c) => c.contract(state, INVARIANT_TOL, scratch),
        None => true,
    }
}

/// One validated step from `b0` over `[0, h]`: returns `(slice, end)` boxes,
/// both clipped to the domain.
pub fn enclose_step(
    s: &OdeSystem,
    b0: &[Interval],
    h: f64,
) -> Result<(Vec<Interval>, Vec<Interval>), OdeError> {
    let (a, e) = s.step(b0, Interval::point(h))?;
    Ok((intersect_all(&a, &s.domain), intersect_all(&e, &s.domain)))
}

/// Encloses all trajectories from `b0` at times in `it`.
pub fn enclose_flow(s: &OdeSystem, b0: &[Interval], it: Interval, eps: f64) -> FlowEnclosure {
    march(s, None, b0, it, eps)
}

/// Marches from time 0 to `it.hi()`, recording slices from `it.lo()` on.
fn march(
    sys: &OdeSystem,
    inv: Option<&FormulaContractor>,
    b0: &[Interval],
    it: Interval,
    eps: f64,
) -> FlowEnclosure {
    let n = sys.dim();
    let mut scratch = Vec::new();
    let it = it.intersect(&Interval::new(0.0, f64::INFINITY));
    let Some((t_lo, t_hi)) = it.bounds() else {
        return FlowEnclosure::empty(n);
    };
    if !t_hi.is_finite() {
        return FlowEnclosure::empty(n);
    }
    let mut b = b0.to_vec();
    if is_void(&b) || !restrict(sys, inv, &mut b, &mut scratch) {
        return FlowEnclosure::empty(n);
    }

    let nominal = match sys.lipschitz() {
        Some(l) => {
            let lmax = l.iter().copied().fold(0.0, f64::max);
            if lmax > 0.0 {
                eps.min(0.5 / lmax)
            } else {
                eps
            }
        }
        None => eps,
    };
    let min_step = eps * MIN_STEP_FRACTION;
    let mut out = FlowEnclosure::empty(n);
    let mut t = 0.0f64;
    let mut h = nominal;
    let mut alive = true;

    while t < t_hi {
        let target = if t < t_lo { t_lo } else { t_hi };
        let t_next = if t + h >= target || target - (t + h) < 1e-3 * h {
            target
        } else {
            t + h
        };
        let step_len = Interval::point(t_next) - Interval::point(t);
        match sys.step(&b, step_len) {
            Ok((mut a, mut e)) => {
                out.steps += 1;
                let a_ok = restrict(sys, inv, &mut a, &mut scratch);
                let e_ok = a_ok && restrict(sys, inv, &mut e, &mut scratch);
                if t >= t_lo && a_ok {
                    out.slices.push(Slice {
                        time: Interval::new(t, t_next),
                        state: a,
                    });
                }
                if !e_ok {
                    alive = false;
                    break;
                }
                b = e;
                t = t_next;
                h = (h * 2.0).min(nominal);
            }
            Err(_) => {
                h /= 2.0;
                if h < min_step {
                    // Sound but uninformative: everything the domain allows.
                    let mut dom = sys.domain.clone();
                    if !restrict(sys, inv, &mut dom, &mut scratch) {
                        alive = false;
                        break;
                    }
                    out.diagnostic = Some(format!(
                        "step size underflow at t = {t}; enclosure widened to the domain"
                    ));
                    let mut s = t.max(t_lo);
                    if s == t_hi {
                        out.slices.push(Slice {
                            time: Interval::point(s),
                            state: dom.clone(),
                        });
                    }
                    while s < t_hi {
                        let e = if s + eps >= t_hi { t_hi } else { s + eps };
                        out.slices.push(Slice {
                            time: Interval::new(s, e),
                            state: dom.clone(),
                        });
                        s = e;
                    }
                    alive = false;
                    break;
                }
            }
        }
    }

    if alive && t_lo == t_hi && t == t_lo {
        out.slices.push(Slice {
            time: Interval::point(t_lo),
            state: b,
        });
    }
    let mut endpoint = vec![Interval::EMPTY; n];
    for s in &out.slices {
        hull_into(&mut endpoint, &s.state);
    }
    out.endpoint = endpoint;
    out
}

fn empty_state(n: usize) -> Vec<Interval> {
    vec![Interval::EMPTY; n]
}

fn time_hull(slices: &[Slice], target: &[Interval], it: Interval) -> Interval {
    slices
        .iter()
        .filter(|s| s.state.iter().zip(target).all(|(x, y)| x.overlaps(y)))
        .fold(Interval::EMPTY, |acc, s| acc.hull(&s.time))
        .intersect(&it)
}

/// `Hull(bt ∩ ♯y(it, b0))`.
pub fn prune_fwd(
    fc: &FlowConstraint,
    b0: &[Interval],
    bt: &[Interval],
    it: Interval,
    eps: f64,
) -> Vec<Interval> {
    let enc = march(&fc.system, None, b0, it, eps);
    let out = intersect_all(bt, &enc.endpoint);
    debug_assert!(within(&out, bt));
    out
}

/// `Hull(b0 ∩ ♯y₋(it, bt))`.
pub fn prune_bwd(
    fc: &FlowConstraint,
    b0: &[Interval],
    bt: &[Interval],
    it: Interval,
    eps: f64,
) -> Vec<Interval> {
    let enc = march(&fc.system.reversed_system(), None, bt, it, eps);
    let out = intersect_all(b0, &enc.endpoint);
    debug_assert!(within(&out, b0));
    out
}

/// Hull of the time slices whose forward enclosure meets `bt`.
pub fn prune_time(
    fc: &FlowConstraint,
    b0: &[Interval],
    bt: &[Interval],
    it: Interval,
    eps: f64,
) -> Interval {
    let enc = march(&fc.system, None, b0, it, eps);
    let out = time_hull(&enc.slices, bt, it);
    debug_assert!(out.is_empty() || out.is_subset(&it));
    out
}

/// Cheap pre-pruning from derivative bounds: `bt ∩ (b0 + it·♯g(D'))`,
/// where `D'` is the domain restricted by the invariant, if any.
pub fn prune_loworder(
    fc: &FlowConstraint,
    b0: &[Interval],
    bt: &[Interval],
    it: Interval,
) -> Vec<Interval> {
    let Some(range) = derivative_bounds(fc) else {
        return empty_state(bt.len());
    };
    let out: Vec<Interval> = (0..bt.len())
        .map(|i| bt[i].intersect(&(b0[i] + it * range[i])))
        .collect();
    debug_assert!(within(&out, bt));
    out
}

fn derivative_bounds(fc: &FlowConstraint) -> Option<Vec<Interval>> {
    let sys = &fc.system;
    let mut region = sys.domain.clone();
    let mut scratch = Vec::new();
    if !restrict(sys, fc.invariant_contractor(), &mut region, &mut scratch) {
        return None;
    }
    Some(sys.rhs_range(&region))
}

/// Forward, time and backward pruning refined by the flow's invariant:
/// slices certainly violating it are dropped and end the march.
pub fn prune_forall_t(
    fc: &FlowConstraint,
    b0: &[Interval],
    bt: &[Interval],
    it: Interval,
    eps: f64,
) -> (Vec<Interval>, Vec<Interval>, Interval) {
    let inv = fc.invariant_contractor();
    let n = fc.system.dim();
    let fwd = march(&fc.system, inv, b0, it, eps);
    let bt2 = intersect_all(bt, &fwd.endpoint);
    let it2 = time_hull(&fwd.slices, &bt2, it);
    if is_void(&bt2) || it2.is_empty() {
        return (empty_state(n), empty_state(n), Interval::EMPTY);
    }
    let bwd = march(&fc.system.reversed_system(), inv, &bt2, it2, eps);
    let b02 = intersect_all(b0, &bwd.endpoint);
    if is_void(&b02) {
        return (empty_state(n), empty_state(n), Interval::EMPTY);
    }
    debug_assert!(within(&b02, b0) && within(&bt2, bt) && it2.is_subset(&it));
    (b02, bt2, it2)
}

/// Result of [`ode_prune_fixpoint`].
#[derive(Debug, Clone, PartialEq)]
pub struct FlowPrune {
    pub x0: Vec<Interval>,
    pub xt: Vec<Interval>,
    pub time: Interval,
    pub rounds: usize,
    pub steps: usize,
}

impl FlowPrune {
    pub fn is_empty(&self) -> bool {
        self.time.is_empty() || is_void(&self.x0) || is_void(&self.xt)
    }

    fn emptied(n: usize, rounds: usize, steps: usize) -> Self {
        Self {
            x0: empty_state(n),
            xt: empty_state(n),
            time: Interval::EMPTY,
            rounds,
            steps,
        }
    }
}

/// Repeats low-order, forward, time and backward pruning (with the
/// invariant refinement when present) until no component shrinks by more
/// than `opts.tol`.
pub fn ode_prune_fixpoint(
    fc: &FlowConstraint,
    b0: &[Interval],
    bt: &[Interval],
    it: Interval,
    opts: &OdeOptions,
) -> FlowPrune {
    let sys = &fc.system;
    let rev = sys.reversed_system();
    let inv = fc.invariant_contractor();
    let n = sys.dim();
    let mut x0 = b0.to_vec();
    let mut xt = bt.to_vec();
    let mut time = it.intersect(&Interval::new(0.0, f64::INFINITY));
    let mut rounds = 0;
    let mut steps = 0;
    if is_void(&x0) || is_void(&xt) || time.is_empty() {
        return FlowPrune::emptied(n, rounds, steps);
    }
    let slopes = derivative_bounds(fc);

    loop {
        rounds += 1;
        let before: Vec<Interval> = x0
            .iter()
            .chain(&xt)
            .copied()
            .chain(std::iter::once(time))
            .collect();

        if let Some(g) = &slopes {
            for i in 0..n {
                let drift = time * g[i];
                xt[i] = xt[i].intersect(&(x0[i] + drift));
                x0[i] = x0[i].intersect(&(xt[i] - drift));
            }
        } else {
            return FlowPrune::emptied(n, rounds, steps);
        }
        if is_void(&xt) || is_void(&x0) {
            return FlowPrune::emptied(n, rounds, steps);
        }

        let fwd = march(sys, inv, &x0, time, opts.eps);
        steps += fwd.steps;
        xt = intersect_all(&xt, &fwd.endpoint);
        if is_void(&xt) {
            return FlowPrune::emptied(n, rounds, steps);
        }
        time = time_hull(&fwd.slices, &xt, time);
        if time.is_empty() {
            return FlowPrune::emptied(n, rounds, steps);
        }

        let bwd = march(&rev, inv, &xt, time, opts.eps);
        steps += bwd.steps;
        x0 = intersect_all(&x0, &bwd.endpoint);
        if is_void(&x0) {
            return FlowPrune::emptied(n, rounds, steps);
        }
        time = time_hull(&bwd.slices, &x0, time);
        if time.is_empty() {
            return FlowPrune::emptied(n, rounds, steps);
        }

        let after: Vec<Interval> = x0
            .iter()
            .chain(&xt)
            .copied()
            .chain(std::iter::once(time))
            .collect();
        if max_shrink(&before, &after) <= opts.tol {
            break;
        }
    }
    debug_assert!(within(&x0, b0) && within(&xt, bt) && time.is_subset(&it));
    FlowPrune {
        x0,
        xt,
        time,
        rounds,
        steps,
    }
}
