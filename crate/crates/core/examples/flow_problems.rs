//! Problems with ODE constraints read from the shipped `.prob` files:
//! an initial value problem, a boundary value problem, parameter fitting
//! and flows with invariants.

use odesat::frontend::parse;
use odesat::dpll_solve;

const DIR: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/problems");

fn main() {
    for name in [
        "decay_ivp",
        "decay_unreachable",
        "projectile_bvp",
        "decay_fit",
        "decay_invariant",
        "dae_circle",
        "dae_broken",
    ] {
        let text = std::fs::read_to_string(format!("{DIR}/{name}.prob")).unwrap();
        let p = parse(&text).unwrap();
        let r = dpll_solve(&p);
        println!("{name}: {}", r.verdict);
        if let Some(w) = r.witness {
            for (v, i) in w.iter() {
                println!("    {v:<4} in {i}");
            }
        }
    }
}
