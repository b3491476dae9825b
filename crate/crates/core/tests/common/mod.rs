//! Independent reference models: closed-form solutions and a fine-step
//! RK4 simulator. Nothing here calls into the interval code.
#![allow(dead_code)]

use std::sync::Arc;

use num_rational::BigRational;
use odesat::formula::{BinaryOp, UnaryOp};
use odesat::interval::Interval;
use odesat::ode::OdeSystem;
use odesat::Term;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi)
}

pub fn uniform(r: &mut impl Rng, i: Interval) -> f64 {
    if i.is_point() {
        i.lo()
    } else {
        r.gen_range(i.lo()..=i.hi())
    }
}

/// A benchmark system with its exact flow.
pub struct Oracle {
    pub name: &'static str,
    pub system: Arc<OdeSystem>,
    /// Initial states to sample from.
    pub init: Vec<Interval>,
    pub flow: fn(&[f64], f64) -> Vec<f64>,
}

pub fn decay() -> Oracle {
    Oracle {
        name: "decay",
        system: Arc::new(OdeSystem::new("decay", vec!["x".into()], vec![-Term::var(0)], vec![iv(-5.0, 5.0)]).unwrap()),
        init: vec![iv(-2.0, 2.0)],
        flow: |x, t| vec![x[0] * (-t).exp()],
    }
}

pub fn drift() -> Oracle {
    Oracle {
        name: "drift",
        system: Arc::new(OdeSystem::new("drift", vec!["x".into()], vec![Term::int(1)], vec![iv(-10.0, 10.0)]).unwrap()),
        init: vec![iv(-2.0, 2.0)],
        flow: |x, t| vec![x[0] + t],
    }
}

pub fn harmonic() -> Oracle {
    Oracle {
        name: "harmonic",
        system: Arc::new(
            OdeSystem::new(
                "harmonic",
                vec!["x".into(), "v".into()],
                vec![Term::var(1), -Term::var(0)],
                vec![iv(-3.0, 3.0), iv(-3.0, 3.0)],
            )
            .unwrap(),
        ),
        init: vec![iv(-1.0, 1.0), iv(-1.0, 1.0)],
        flow: |x, t| vec![x[0] * t.cos() + x[1] * t.sin(), -x[0] * t.sin() + x[1] * t.cos()],
    }
}

pub fn logistic() -> Oracle {
    let x = Term::var(0);
    Oracle {
        name: "logistic",
        system: Arc::new(
            OdeSystem::new("logistic", vec!["x".into()], vec![x.clone() * (Term::int(1) - x)], vec![iv(0.0, 2.0)])
                .unwrap(),
        ),
        init: vec![iv(0.05, 1.5)],
        flow: |x, t| {
            let e = t.exp();
            vec![x[0] * e / (1.0 - x[0] + x[0] * e)]
        },
    }
}

pub fn all_oracles() -> Vec<Oracle> {
    vec![decay(), drift(), harmonic(), logistic()]
}

/// Classic fixed-step RK4 on `x' = f(x)`.
pub fn rk4_step(f: &dyn Fn(&[f64]) -> Vec<f64>, x: &[f64], h: f64) -> Vec<f64> {
    let add = |a: &[f64], b: &[f64], s: f64| a.iter().zip(b).map(|(p, q)| p + s * q).collect::<Vec<_>>();
    let k1 = f(x);
    let k2 = f(&add(x, &k1, h / 2.0));
    let k3 = f(&add(x, &k2, h / 2.0));
    let k4 = f(&add(x, &k3, h));
    (0..x.len())
        .map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
        .collect()
}

/// Integrates until `stop` turns true (located by bisection on the step) or
/// `t_max` elapses. Returns the final state and the elapsed time.
pub fn simulate_until(
    f: &dyn Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    h: f64,
    t_max: f64,
    stop: &dyn Fn(&[f64]) -> bool,
) -> (Vec<f64>, f64) {
    let mut x = x0.to_vec();
    let mut t = 0.0;
    while t < t_max {
        let next = rk4_step(f, &x, h);
        if stop(&next) {
            let (mut lo, mut hi) = (0.0, h);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if stop(&rk4_step(f, &x, mid)) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return (rk4_step(f, &x, hi), t + hi);
        }
        x = next;
        t += h;
    }
    (x, t)
}

/// Bouncing ball with quadratic drag as in `problems/ball.hyb`.
pub struct Ball {
    pub g: f64,
    pub drag: f64,
    pub restitution: f64,
    pub drop_height: f64,
}

pub const BALL: Ball = Ball {
    g: 9.8,
    drag: 0.05,
    restitution: 0.85,
    drop_height: 10.0,
};

impl Ball {
    /// Heights the ball reaches at the start of each segment: index 0 is the
    /// drop, then (segment 2j) the apex after the j-th bounce. Odd segments
    /// (rising) start at height 0. Returns the largest height attained in
    /// each of the `segments` first segments.
    pub fn segment_peaks(&self, segments: usize) -> Vec<f64> {
        let (g, c) = (self.g, self.drag);
        let falling = move |y: &[f64]| vec![y[1], -g + c * y[1] * y[1]];
        let rising = move |y: &[f64]| vec![y[1], -g - c * y[1] * y[1]];
        let h = 1e-5;
        let mut state = vec![self.drop_height, 0.0];
        let mut peaks = Vec::new();
        for seg in 0..segments {
            if seg % 2 == 0 {
                peaks.push(state[0]);
                let (end, _) = simulate_until(&falling, &state, h, 10.0, &|y| y[0] <= 0.0);
                state = vec![0.0, -self.restitution * end[1]];
            } else {
                let (end, _) = simulate_until(&rising, &state, h, 10.0, &|y| y[1] <= 0.0);
                peaks.push(end[0]);
                state = vec![end[0], 0.0];
            }
        }
        peaks
    }
}

pub fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite")
}

/// Whether the exact value `q` lies in `i`.
pub fn encloses(i: Interval, q: &BigRational) -> bool {
    !i.is_empty()
        && (i.lo() == f64::NEG_INFINITY || exact(i.lo()) <= *q)
        && (i.hi() == f64::INFINITY || *q <= exact(i.hi()))
}

/// Exact value of a term built from `+ - * /`, negation and integer powers;
/// `None` for other operators or division by zero.
pub fn exact_eval(t: &Term, point: &[f64]) -> Option<BigRational> {
    use num_traits::{One, Zero};
    Some(match t {
        Term::Var(i) => exact(point[*i]),
        Term::Const(c) => c.clone(),
        Term::Unary(UnaryOp::Neg, a) => -exact_eval(a, point)?,
        Term::Unary(..) => return None,
        Term::Binary(op, a, b) => {
            let (a, b) = (exact_eval(a, point)?, exact_eval(b, point)?);
            match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div if b.is_zero() => return None,
                BinaryOp::Div => a / b,
                BinaryOp::Min => a.min(b),
                BinaryOp::Max => a.max(b),
            }
        }
        Term::Pow(a, k) => {
            let a = exact_eval(a, point)?;
            if *k < 0 && a.is_zero() {
                return None;
            }
            let mut r = BigRational::one();
            for _ in 0..k.unsigned_abs() {
                r *= &a;
            }
            if *k < 0 {
                r.recip()
            } else {
                r
            }
        }
    })
}

impl Oracle {
    pub fn dim(&self) -> usize {
        self.system.dim()
    }

    /// A flow constraint over variables `x0 = 0..n`, `xt = n..2n`, `t = 2n`.
    pub fn constraint(&self) -> odesat::FlowConstraint {
        let n = self.dim();
        odesat::FlowConstraint::new(self.system.clone(), (0..n).collect(), 2 * n, (n..2 * n).collect())
    }

    /// A state invariant that some sampled trajectories violate.
    pub fn invariant(&self) -> odesat::Formula {
        use odesat::Formula;
        let x = Term::var(0);
        match self.name {
            "decay" => Formula::ge(x, Term::int(-1)),
            "drift" => Formula::le(x, Term::int(1)),
            "harmonic" => Formula::ge(x, Term::ratio(-4, 5)),
            _ => Formula::le(x, Term::ratio(6, 5)),
        }
    }

    pub fn path_satisfies(&self, inv: &odesat::Formula, x0: &[f64], t: f64) -> bool {
        (0..=64).all(|k| inv.holds_at(&(self.flow)(x0, t * k as f64 / 64.0), 0.0))
    }

    /// A random query `(b0, bt, it)` whose target box sits near the image of
    /// a sampled trajectory, so that rejection sampling finds solutions.
    pub fn query(&self, r: &mut impl Rng) -> (Vec<Interval>, Vec<Interval>, Interval) {
        let b0: Vec<Interval> = self
            .init
            .iter()
            .map(|i| {
                let w = r.gen_range(0.0..0.6f64).min(i.width());
                let lo = r.gen_range(i.lo()..=i.hi() - w);
                iv(lo, lo + w)
            })
            .collect();
        let it = if r.gen_bool(0.15) {
            Interval::point(r.gen_range(0.0..2.0))
        } else {
            let a = r.gen_range(0.0..2.0f64);
            let b = r.gen_range(0.0..2.0f64);
            iv(a.min(b), a.max(b))
        };
        let x0: Vec<f64> = b0.iter().map(|i| uniform(r, *i)).collect();
        let y = (self.flow)(&x0, uniform(r, it));
        let bt = if r.gen_bool(0.1) {
            self.system.domain().to_vec()
        } else {
            y.iter()
                .zip(self.system.domain())
                .map(|(c, d)| {
                    let (a, b) = (r.gen_range(0.02..0.8), r.gen_range(0.02..0.8));
                    iv(c - a, c + b).intersect(d)
                })
                .collect()
        };
        (b0, bt, it)
    }

    /// Up to `n` true flow triples `(x0, y(t, x0), t)` inside the query,
    /// optionally restricted to paths satisfying `inv`.
    pub fn triples(
        &self,
        r: &mut impl Rng,
        (b0, bt, it): (&[Interval], &[Interval], Interval),
        inv: Option<&odesat::Formula>,
        n: usize,
    ) -> Vec<(Vec<f64>, Vec<f64>, f64)> {
        let mut out = Vec::new();
        for _ in 0..20 * n {
            if out.len() == n {
                break;
            }
            let x0: Vec<f64> = b0.iter().map(|i| uniform(r, *i)).collect();
            let t = uniform(r, it);
            let y = (self.flow)(&x0, t);
            if !y.iter().zip(bt).all(|(v, b)| b.contains(*v)) {
                continue;
            }
            if inv.is_some_and(|f| !self.path_satisfies(f, &x0, t)) {
                continue;
            }
            out.push((x0, y, t));
        }
        out
    }
}

pub fn inside(p: &[f64], b: &[Interval]) -> bool {
    p.iter().zip(b).all(|(v, i)| i.contains(*v))
}

pub fn subset(a: &[Interval], b: &[Interval]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.is_subset(y))
}
