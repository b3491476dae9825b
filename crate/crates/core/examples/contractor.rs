//! Forward-backward (HC4) contraction of a box against single atoms and
//! against a set of atoms run to a fixpoint.

use odesat::contractor::{prune_atom, prune_fixpoint};
use odesat::{Atom, Interval, Term, VarBox};

fn show(b: &VarBox) -> String {
    b.iter().map(|(v, i)| format!("{v} in {i}")).collect::<Vec<_>>().join(", ")
}

fn main() {
    let (x, y) = (Term::var(0), Term::var(1));
    let b = VarBox::from_pairs([("x", Interval::new(-3.0, 3.0)), ("y", Interval::new(-3.0, 3.0))]);

    // x^2 + y^2 <= 1
    let disk = Atom::ge(Term::int(1) - x.clone().powi(2) - y.clone().powi(2));
    let out = prune_atom(&b, &disk);
    println!("disk:            {} ({:?})", show(&out.pruned), out.certificate);

    // y >= x + 1/2, on top of the disk
    let line = Atom::ge(y.clone() - x.clone() - Term::ratio(1, 2));
    println!("disk and line:   {}", show(&prune_fixpoint(&b, &[disk.clone(), line], 1e-9)));

    // exp(x) = 2 as two inequalities
    let e = x.clone().exp() - Term::int(2);
    let pinned = prune_fixpoint(&b, &[Atom::ge(e.clone()), Atom::ge(-e)], 1e-12);
    println!("exp(x) = 2:      x in {} (ln 2 = {})", pinned.intervals()[0], 2f64.ln());

    // x^2 + y^2 <= 1 and x >= 2 has no solution
    let far = Atom::ge(x - Term::int(2));
    println!("disk and x >= 2: empty = {}", prune_fixpoint(&b, &[disk, far], 1e-9).is_empty());
}
