use qgraph::edge::Potential;
use qgraph::graphene::{mu_curves, Coupling, LayerSpec, Shift, StackSpec};

fn q0() -> Potential { Potential::well(-16.0, 1.0/3.0, 2.0/3.0).unwrap() }

fn main() {
    let aa_sym = StackSpec {
        layers: vec![(LayerSpec::uniform(q0()), Shift::A); 2],
        connectors: vec![Coupling::PerColor { color1: q0(), color2: q0() }],
    };
    let curves = mu_curves(&aa_sym, (-5.2, -4.6), 0.02).unwrap();
    for (j, lam) in curves.lambdas.iter().enumerate() {
        let row: Vec<String> = curves.curves.iter().map(|c| match c[j] {
            Some(v) => format!("{:+.4e}{:+.1e}i", v.re, v.im),
            None => "None".into(),
        }).collect();
        println!("{lam:.3}  {}", row.join("  "));
    }
}
