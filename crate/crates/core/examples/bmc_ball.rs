//! Bounded model checking of the bouncing ball: unroll the automaton,
//! solve, and write the witness trajectory as CSV.
//!
//! ```text
//! cargo run --release --example bmc_ball -- 4 ball.csv
//! ```

use odesat::frontend::{encode_bmc, parse_hybrid, write_trace};
use odesat::dpll_solve;

fn main() {
    let mut args = std::env::args().skip(1);
    let depth: usize = args.next().map_or(4, |d| d.parse().expect("depth"));
    let out = args.next();

    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/problems/ball.hyb")).unwrap();
    let h = parse_hybrid(&text).unwrap();
    let mut p = encode_bmc(&h, depth).unwrap();
    p.config.trace = true;
    println!("depth {depth}: {} variables, {} flows", p.bounds.dim(), p.flows.len());

    let r = dpll_solve(&p);
    println!("{}  [{}]", r.verdict, r.stats);
    if !r.is_delta_sat() {
        return;
    }
    let w = r.witness.as_ref().unwrap();
    for k in 0..=depth {
        let get = |v: &str| w.get(v).unwrap();
        println!(
            "  segment {k:>2} ({}): time {}  x: {} -> {}",
            p.flows[r.active_flows[k]].system.name(),
            get(&format!("time.{k}")),
            get(&format!("x.{k}")),
            get(&format!("x.{k}.t")),
        );
    }
    match out {
        Some(path) => {
            write_trace(std::fs::File::create(&path).unwrap(), &r, &p).unwrap();
            println!("trace written to {path}");
        }
        None => {
            let mut csv = Vec::new();
            write_trace(&mut csv, &r, &p).unwrap();
            let csv = String::from_utf8(csv).unwrap();
            println!("trace: {} rows; first lines:", csv.lines().count() - 1);
            for line in csv.lines().take(4) {
                println!("  {line}");
            }
        }
    }
}
