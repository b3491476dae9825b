//! Outward-rounded interval arithmetic: every result encloses the exact
//! real range of the operation.

use odesat::Interval;

fn main() {
    let a = Interval::new(0.1, 0.2);
    let b = Interval::new(-1.0, 3.0);

    println!("a        = {a}");
    println!("b        = {b}");
    println!("a + b    = {}", a + b);
    println!("a * b    = {}", a * b);
    println!("a / b    = {}  (b contains 0)", a / b);
    println!("b^2      = {}", b.powi(2));
    println!("b * b    = {}  (dependency problem)", b * b);
    println!("exp(b)   = {}", b.exp());
    println!("sin(b)   = {}", b.sin());
    println!("ln(b)    = {}  (restricted to b > 0)", b.ln());
    println!("sqrt(-b) = {}", (-b).sqrt());

    // 0.1 is not a binary fraction; the point interval brackets it.
    let tenth = Interval::point(0.1);
    let sum = (0..10).fold(Interval::point(0.0), |acc, _| acc + tenth);
    println!("0.1 added ten times = {sum}, contains 1: {}", sum.contains(1.0));
}
