//! Validated enclosures of ODE flows: time slices with state boxes that
//! contain every trajectory from the initial box.

use std::sync::Arc;

use odesat::ode::{enclose_flow, ode_prune_fixpoint, OdeOptions};
use odesat::{FlowConstraint, Interval, OdeSystem, Term};

fn main() {
    let iv = Interval::new;
    let osc = OdeSystem::new(
        "harmonic",
        vec!["x".into(), "v".into()],
        vec![Term::var(1), -Term::var(0)],
        vec![iv(-3.0, 3.0), iv(-3.0, 3.0)],
    )
    .unwrap();

    let b0 = [iv(0.99, 1.01), iv(-0.01, 0.01)];
    let quarter = std::f64::consts::FRAC_PI_2;
    let enc = enclose_flow(&osc, &b0, Interval::new(0.0, quarter), 0.05);
    println!("{} slices, {} steps", enc.slices.len(), enc.steps);
    for s in enc.slices.iter().step_by(8) {
        println!("  t in {:<40} x in {:<40} v in {}", s.time.to_string(), s.state[0].to_string(), s.state[1]);
    }
    let end = enclose_flow(&osc, &b0, Interval::point(quarter), 0.01);
    println!("at t = pi/2: x in {}, v in {} (exact: 0, -1)", end.endpoint[0], end.endpoint[1]);

    // Pruning a flow constraint: which times let x' = -x go from [0.9, 1.1]
    // into [0.30, 0.40]?
    let decay = OdeSystem::new("decay", vec!["x".into()], vec![-Term::var(0)], vec![iv(-5.0, 5.0)]).unwrap();
    let fc = FlowConstraint::new(Arc::new(decay), vec![0], 2, vec![1]);
    let out = ode_prune_fixpoint(&fc, &[iv(0.9, 1.1)], &[iv(0.30, 0.40)], iv(0.0, 3.0), &OdeOptions::new(0.01));
    println!(
        "decay: t in {} (exact [{:.4}, {:.4}]) after {} rounds",
        out.time,
        (0.9f64 / 0.4).ln(),
        (1.1f64 / 0.3).ln(),
        out.rounds
    );
}
