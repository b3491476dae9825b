//! The smallest delta-sat problem: x^2 = 2 on [0, 2], built through the API
//! and solved at a few precisions.

use num_rational::BigRational;
use odesat::{dpll_solve, Formula, Interval, Problem, Term, VarBox};

fn main() {
    let x = Term::var(0);
    let f = Formula::eq(x.clone() * x, Term::int(2));
    for den in [10, 1000, 1_000_000] {
        let b = VarBox::from_pairs([("x", Interval::new(0.0, 2.0))]);
        let delta = BigRational::new(1.into(), den.into());
        let p = Problem::new(b, f.clone(), vec![], vec![], delta).unwrap();
        let r = dpll_solve(&p);
        println!("delta = 1/{den:<8} {}  {}  [{}]", r.verdict, r.witness.unwrap(), r.stats);
    }
}
