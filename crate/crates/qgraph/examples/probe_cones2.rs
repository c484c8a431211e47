use qgraph::edge::Potential;
use qgraph::graphene::{cone_scan, Coupling, LayerSpec, Shift, StackSpec};

fn q0() -> Potential { Potential::well(-16.0, 1.0/3.0, 2.0/3.0).unwrap() }

fn main() {
    let aa_sym = StackSpec {
        layers: vec![(LayerSpec::uniform(q0()), Shift::A); 2],
        connectors: vec![Coupling::PerColor { color1: q0(), color2: q0() }],
    };
    for window in [(-5.2, -4.6), (-20.0, 120.0)] {
        let reports = cone_scan(&aa_sym, window, 0.02).unwrap();
        println!("window {window:?}: {} reports", reports.len());
        for r in &reports {
            println!("  comp {} lam {:.6} {:?} mu' {:.3e} mu'' {:.3e}", r.component, r.lambda_star, r.classification, r.mu_prime, r.mu_second);
        }
    }
}
