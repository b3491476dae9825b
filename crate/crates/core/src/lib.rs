//! A δ-complete solver for bounded formulas over the reals with ODE
//! constraints.
//!
//! Problems are conjunctions and disjunctions of atoms `t > 0`, `t >= 0` and
//! flow constraints `x_t = y(t, x_0)`. The answer is either `unsat`, which is
//! exact, or `delta-sat` with a witness box on which every atom relaxed by
//! δ is consistent.
//!
//! ```
//! use odesat::{frontend, solver};
//!
//! let p = frontend::parse("(declare x [0 2]) (assert (= (* x x) 2)) (delta 0.01)").unwrap();
//! let r = solver::dpll_solve(&p);
//! assert!(r.is_delta_sat());
//! assert!(r.witness.unwrap()[0].contains(std::f64::consts::SQRT_2));
//! ```

pub mod contractor;
pub mod error;
pub mod formula;
pub mod frontend;
pub mod interval;
pub mod ode;
pub mod solver;

pub use error::Error;
pub use formula::{Atom, Formula, Relation, Term};
pub use interval::{Interval, VarBox};
pub use ode::{FlowConstraint, OdeSystem};
pub use solver::{dpll_solve, Problem, SolverConfig, SolverResult, Verdict};
