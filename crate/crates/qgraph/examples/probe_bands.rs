use qgraph::edge::Potential;
use qgraph::graphene::{band_union, bands, cone_scan, stack, Coupling, LayerSpec, Shift, StackSpec};
use qgraph::spectral::spectrum_scan;
use std::time::Instant;

fn q0() -> Potential { Potential::well(-16.0, 1.0/3.0, 2.0/3.0).unwrap() }
fn qc() -> Potential { Potential::well(-10.0, 0.5, 1.0).unwrap() }

fn main() {
    let window = (-20.0, 60.0);
    let step = 0.02;
    let stacks: Vec<(&str, StackSpec)> = vec![
        ("AA-2 (q0,qc)", StackSpec {
            layers: vec![(LayerSpec::uniform(q0()), Shift::A); 2],
            connectors: vec![Coupling::PerColor { color1: q0(), color2: qc() }],
        }),
        ("AA-3 mixed", StackSpec {
            layers: vec![(LayerSpec::uniform(q0()), Shift::A); 3],
            connectors: vec![
                Coupling::PerColor { color1: q0(), color2: qc() },
                Coupling::PerColor { color1: qc(), color2: q0() },
            ],
        }),
        ("AB-2", StackSpec {
            layers: vec![(LayerSpec::uniform(q0()), Shift::A), (LayerSpec::uniform(q0()), Shift::B)],
            connectors: vec![Coupling::Single { q: q0() }],
        }),
    ];
    for (name, ss) in &stacks {
        let t0 = Instant::now();
        let b = bands(ss, window, step).unwrap();
        let union = band_union(&b, 1e-9);
        let t1 = Instant::now();
        let g = stack(ss).unwrap();
        let scan = spectrum_scan(&g, window, step, 12).unwrap();
        let t2 = Instant::now();
        println!("== {name}: mu-bands {:?} ({} intervals, {:.2?})", union.iter().map(|i| (format!("{:.4}", i.0), format!("{:.4}", i.1))).collect::<Vec<_>>(), union.len(), t1-t0);
        println!("   scan      {:?} ({} intervals, {:.2?})", scan.bands.iter().map(|i| (format!("{:.4}", i.0), format!("{:.4}", i.1))).collect::<Vec<_>>(), scan.bands.len(), t2-t1);
        if union.len() == scan.bands.len() {
            let worst = union.iter().zip(&scan.bands).map(|(a, b)| (a.0-b.0).abs().max((a.1-b.1).abs())).fold(0.0f64, f64::max);
            println!("   interval count matches; worst edge diff {worst:.2e}");
        } else {
            println!("   INTERVAL COUNT MISMATCH");
        }
    }

    // Cone scan probes.
    let aa_sym = StackSpec {
        layers: vec![(LayerSpec::uniform(q0()), Shift::A); 2],
        connectors: vec![Coupling::PerColor { color1: q0(), color2: q0() }],
    };
    let t0 = Instant::now();
    let reports = cone_scan(&aa_sym, (-20.0, 120.0), 0.02).unwrap();
    println!("AA-2 symmetric cones ({:.2?}):", t0.elapsed());
    for r in &reports {
        println!("  comp {} lam {:.6} {:?} mu' {:.3e} mu'' {:.3e}", r.component, r.lambda_star, r.classification, r.mu_prime, r.mu_second);
    }
    let aa_broken = StackSpec {
        layers: vec![(LayerSpec::uniform(q0()), Shift::A); 2],
        connectors: vec![Coupling::PerColor { color1: Potential::zero(1.0), color2: qc() }],
    };
    let reports = cone_scan(&aa_broken, (-20.0, 120.0), 0.02).unwrap();
    println!("AA-2 broken cones:");
    for r in &reports {
        println!("  comp {} lam {:.6} {:?} mu' {:.3e} mu'' {:.3e}", r.component, r.lambda_star, r.classification, r.mu_prime, r.mu_second);
    }
}
