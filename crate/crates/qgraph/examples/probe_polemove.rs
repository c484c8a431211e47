use num_complex::Complex64;
use qgraph::edge::Potential;
use qgraph::graph::{PeriodicGraph, VertexCondition};
use qgraph::reduce::verify_pole_move;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q0() -> Potential { Potential::well(-16.0, 1.0/3.0, 2.0/3.0).unwrap() }

fn random_graph(rng: &mut ChaCha8Rng, d: usize) -> PeriodicGraph {
    loop {
        let mut g = PeriodicGraph::new(d);
        let nv = rng.gen_range(1..=4);
        for i in 0..nv {
            let cond = if rng.gen_bool(0.25) && i > 0 { VertexCondition::Dirichlet } else { VertexCondition::Robin(rng.gen_range(-2.0..2.0)) };
            g.add_vertex(format!("v{i}"), cond);
        }
        for _ in 0..rng.gen_range(1..=5) {
            let t = rng.gen_range(0..nv);
            let h = rng.gen_range(0..nv);
            let shift: Vec<i32> = (0..d).map(|_| rng.gen_range(-1..=1)).collect();
            let q = match rng.gen_range(0..3) {
                0 => Potential::zero(rng.gen_range(0.6..1.4)),
                1 => Potential::constant(rng.gen_range(-12.0..6.0), 1.0),
                _ => q0(),
            };
            g.add_edge(t, h, shift, q).unwrap();
        }
        if g.vertices().iter().any(|v| !v.condition.is_dirichlet()) { return g; }
    }
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let mut stats = (0usize, 0usize, 0usize); // both-robin, one-dirichlet, failures
    let mut done = 0;
    while done < 120 {
        let d = if done % 2 == 0 { 1 } else { 2 };
        let g = random_graph(&mut rng, d);
        let e = rng.gen_range(0..g.edges().len());
        let edge = &g.edges()[e];
        let t_dir = g.vertices()[edge.tail].condition.is_dirichlet();
        let h_dir = g.vertices()[edge.head].condition.is_dirichlet();
        if t_dir && h_dir { continue; }
        let t = rng.gen_range(0.2..0.8);
        let samples: Vec<(Vec<Complex64>, f64)> = (0..5).map(|_| {
            let z: Vec<Complex64> = (0..d).map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.28))).collect();
            (z, rng.gen_range(-5.0..60.0))
        }).collect();
        match verify_pole_move(&g, e, t, &samples) {
            Ok(rep) => {
                if t_dir || h_dir { stats.1 += 1 } else { stats.0 += 1 }
                if rep.max_rel_err > 1e-8 {
                    stats.2 += 1;
                    println!("FAIL err {:.2e} sign {} dirichlet-end {}", rep.max_rel_err, rep.sign, t_dir || h_dir);
                }
                done += 1;
            }
            Err(_) => continue, // pole sample; redraw
        }
    }
    println!("both-robin {} one-dirichlet {} failures {}", stats.0, stats.1, stats.2);
}
