use nalgebra::DMatrix;
use num_complex::Complex64;
use qgraph::edge::{transfer_matrix, Potential};
use qgraph::graphene::{stack, zeta_poly, Coupling, LayerSpec, Shift, StackSpec};
use qgraph::reduce::{type2_characteristic, zeta_components};
use qgraph::spectral::{dispersion, dispersion_at};

fn q0() -> Potential { Potential::well(-16.0, 1.0/3.0, 2.0/3.0).unwrap() }
fn qc() -> Potential { Potential::well(-10.0, 0.5, 1.0).unwrap() }

fn main() {
    // AA-2 with mixed connectors: direct dispersion vs det(B1 B2 - zeta I).
    let ss = StackSpec {
        layers: vec![(LayerSpec::uniform(q0()), Shift::A), (LayerSpec::uniform(q0()), Shift::A)],
        connectors: vec![Coupling::PerColor { color1: q0(), color2: qc() }],
    };
    let g = stack(&ss).unwrap();
    let t2 = ss.to_type2().unwrap();
    let n = 2;
    for lam in [3.3f64, 17.9, 41.2] {
        let ch = type2_characteristic(&t2, lam).unwrap();
        let s = transfer_matrix(&q0(), lam).s;
        let z = [Complex64::from_polar(1.0, 0.9), Complex64::from_polar(1.0, 2.3)];
        let w = Complex64::new(1.0/s, 0.0) * (Complex64::new(1.0,0.0) + z[0] + z[1]);
        let wbar = Complex64::new(1.0/s, 0.0) * (Complex64::new(1.0,0.0) + z[0].inv() + z[1].inv());
        let zeta = w * wbar;
        // det(B1B2 - zeta I) = s^(-2n) det(Delta - s^2 zeta I)
        let m = DMatrix::from_fn(n, n, |i, j| {
            Complex64::new(ch.delta[(i, j)], 0.0) - if i == j { Complex64::new(s*s, 0.0) * zeta } else { Complex64::new(0.0, 0.0) }
        });
        let rhs = m.lu().determinant() * Complex64::new(s.powi(-2 * n as i32), 0.0);
        let direct = dispersion_at(&g, lam, &z).unwrap();
        println!("lam {lam}: direct {direct:.6e}  rhs {rhs:.6e}  relerr {:.2e}", (direct-rhs).norm()/(1.0+direct.norm()));
    }

    // Mixed 5-layer stack: zeta-fit degree.
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
        match zeta_components(&d, &zeta, 7) {
            Ok(st) => println!("mixed-5 lam {lam}: degree {} residual {:.2e} roots {}", st.degree(), st.residual, st.roots.len()),
            Err(e) => println!("mixed-5 lam {lam}: ERR {e}"),
        }
        println!("   dispersion terms: {}", d.num_terms());
    }

    // AB-2 and ABC-3 degree law.
    let ab = StackSpec {
        layers: vec![(LayerSpec::uniform(q0()), Shift::A), (LayerSpec::uniform(q0()), Shift::B)],
        connectors: vec![Coupling::Single { q: q0() }],
    };
    let gab = stack(&ab).unwrap();
    let d = dispersion(&gab, 9.1).unwrap();
    let s = transfer_matrix(&q0(), 9.1).s;
    let st = zeta_components(&d, &zeta_poly(&[s,s,s]), 4).unwrap();
    println!("AB-2: degree {} residual {:.2e}", st.degree(), st.residual);

    let abc = StackSpec {
        layers: vec![
            (LayerSpec::uniform(q0()), Shift::A),
            (LayerSpec::uniform(q0()), Shift::B),
            (LayerSpec::uniform(q0()), Shift::C),
        ],
        connectors: vec![Coupling::Single { q: q0() }, Coupling::Single { q: qc() }],
    };
    let gabc = stack(&abc).unwrap();
    let d = dispersion(&gabc, 9.1).unwrap();
    let st = zeta_components(&d, &zeta_poly(&[s,s,s]), 5).unwrap();
    println!("ABC-3: degree {} residual {:.2e}", st.degree(), st.residual);
}
