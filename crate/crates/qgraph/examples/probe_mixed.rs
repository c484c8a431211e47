use qgraph::edge::{transfer_matrix, Potential};
use qgraph::graphene::{stack, zeta_poly, Coupling, LayerSpec, Shift, StackSpec};
use qgraph::laurent::fit_in_zeta;
use qgraph::spectral::dispersion;

fn q0() -> Potential { Potential::well(-16.0, 1.0/3.0, 2.0/3.0).unwrap() }
fn qc() -> Potential { Potential::well(-10.0, 0.5, 1.0).unwrap() }

fn main() {
    let mixed = StackSpec {
        layers: vec![
            (LayerSpec::uniform(q0()), Shift::A),
            (LayerSpec::uniform(q0()), Shift::A),
            (LayerSpec::uniform(q0()), Shift::B),
            (LayerSpec::uniform(q0()), Shift::C),
            (LayerSpec::uniform(q0()), Shift::C),
        ],
        connectors: vec![
            Coupling::PerColor { color1: q0(), color2: qc() },
            Coupling::Single { q: q0() },
            Coupling::Single { q: qc() },
            Coupling::PerColor { color1: qc(), color2: qc() },
        ],
    };
    let gm = stack(&mixed).unwrap();
    for lam in [5.5f64, 23.7] {
        let d = dispersion(&gm, lam).unwrap();
        let s = transfer_matrix(&q0(), lam).s;
        let zeta = zeta_poly(&[s, s, s]);
        println!("lam {lam}, s {s:.4e}, zeta max coeff {:.3e}", zeta.max_coeff());
        for max_deg in [5usize, 6] {
            let fit = fit_in_zeta(&d, &zeta, max_deg).unwrap();
            let raw: Vec<String> = fit.coeffs.iter().map(|c| format!("{:.3e}", c.norm())).collect();
            println!("  max_deg {max_deg}: residual {:.2e} coeffs {:?}", fit.residual, raw);
        }
        // Span of D in z1: degree-5 polynomial in zeta means z1-span [-5, 5].
        println!("  d z1-span {:?} z2-span {:?}", d.var_span(0), d.var_span(1));
    }
}
