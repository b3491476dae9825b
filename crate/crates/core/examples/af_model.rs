//! The four-variable atrial cell model unrolled one jump deep: from rest,
//! a stimulus raises u to the threshold, then the excited dynamics must
//! reach u >= 1.

use odesat::frontend::{encode_bmc, parse_hybrid};
use odesat::dpll_solve;

fn main() {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/problems/af.hyb")).unwrap();
    let h = parse_hybrid(&text).unwrap();
    let p = encode_bmc(&h, 1).unwrap();
    let r = dpll_solve(&p);
    println!("{}  [{}]", r.verdict, r.stats);
    if let Some(w) = r.witness {
        for v in ["time.0", "u.0.t", "s.0.t", "time.1", "u.1.t"] {
            println!("  {v:<6} in {}", w.get(v).unwrap());
        }
    }
}
