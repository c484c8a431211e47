use qgraph::edge::Potential;
use qgraph::graphene::{Coupling, LayerSpec, MuPipeline, Shift, StackSpec};

fn main() {
    let q0 = Potential::well(-16.0, 1.0 / 3.0, 2.0 / 3.0).unwrap();
    let ss = StackSpec {
        layers: vec![
            (LayerSpec::uniform(q0.clone()), Shift::A),
            (LayerSpec::uniform(q0.clone()), Shift::B),
        ],
        connectors: vec![Coupling::Single { q: q0 }],
    };
    let p = MuPipeline::new(&ss).unwrap();
    let mut lam = 17.55;
    while lam <= 17.68 {
        match p.mu_at(lam) {
            Ok(mu) => {
                let strs: Vec<String> = mu.iter().map(|m| format!("{:+.6e}{:+.6e}i", m.re, m.im)).collect();
                println!("{lam:.4}  {}", strs.join("   "));
            }
            Err(e) => println!("{lam:.4}  ERR {e}"),
        }
        lam += 0.01;
    }
}
