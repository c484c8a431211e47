//! Acceptance suite: each test exercises one exit criterion end to end at
//! its stated tolerance and prints one pass line. Randomized checks are
//! seeded and print their seed.

use nalgebra::DMatrix;
use num_complex::Complex64;
use qgraph::edge::{bisect, transfer_matrix, transfer_matrix_ode, Potential};
use qgraph::graph::{PeriodicGraph, VertexCondition};
use qgraph::graphene::{
    band_union, bands, cone_scan, g_tilde_extrema, stack, zeta_poly, ConeClass, Coupling,
    LayerSpec, Shift, StackSpec,
};
use qgraph::laurent::{self, factor_probe, FactorVerdict};
use qgraph::reduce::{join_dispersion, type2_characteristic, verify_pole_move, zeta_components};
use qgraph::spectral::{dispersion, dispersion_at, spectrum_scan};
use qgraph::QgError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn q0() -> Potential {
    Potential::well(-16.0, 1.0 / 3.0, 2.0 / 3.0).unwrap()
}

fn qc() -> Potential {
    Potential::well(-10.0, 0.5, 1.0).unwrap()
}

/// Random piecewise-constant potential on a length-1 edge, in the range
/// of well depths the models use. The hyperbolic growth of the transfer
/// matrix is then bounded (kappa <= sqrt(30 + 25) on the window), which
/// keeps the Wronskian condition number within the 1e-10 criterion.
fn random_potential(rng: &mut ChaCha8Rng) -> Potential {
    let n = rng.gen_range(1..=4);
    let mut lengths: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = lengths.iter().sum();
    for l in &mut lengths {
        *l /= total;
    }
    Potential::new(
        lengths
            .into_iter()
            .map(|l| (l, rng.gen_range(-25.0..15.0)))
            .collect(),
    )
    .unwrap()
}

fn random_graph(rng: &mut ChaCha8Rng, d: usize) -> PeriodicGraph {
    loop {
        let mut g = PeriodicGraph::new(d);
        let nv = rng.gen_range(1..=4);
        for i in 0..nv {
            let cond = if rng.gen_bool(0.2) && i > 0 {
                VertexCondition::Dirichlet
            } else {
                VertexCondition::Robin(rng.gen_range(-2.0..2.0))
            };
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
        if g.vertices().iter().any(|v| !v.condition.is_dirichlet()) {
            return g;
        }
    }
}

fn robin_vertex(g: &PeriodicGraph, rng: &mut ChaCha8Rng) -> usize {
    loop {
        let v = rng.gen_range(0..g.vertices().len());
        if !g.vertices()[v].condition.is_dirichlet() {
            return v;
        }
    }
}

fn uniform_layer(q: Potential, shift: Shift) -> (LayerSpec, Shift) {
    (LayerSpec::uniform(q), shift)
}

fn aa_stack(n: usize, color1: Potential, color2: Potential) -> StackSpec {
    StackSpec {
        layers: (0..n).map(|_| uniform_layer(q0(), Shift::A)).collect(),
        connectors: (0..n - 1)
            .map(|_| Coupling::PerColor {
                color1: color1.clone(),
                color2: color2.clone(),
            })
            .collect(),
    }
}

fn criterion_stacks() -> Vec<(&'static str, StackSpec)> {
    vec![
        ("aa2", aa_stack(2, q0(), qc())),
        ("aa3", aa_stack(3, qc(), q0())),
        (
            "ab2",
            StackSpec {
                layers: vec![
                    uniform_layer(q0(), Shift::A),
                    uniform_layer(q0(), Shift::B),
                ],
                connectors: vec![Coupling::Single { q: q0() }],
            },
        ),
        (
            "abc3",
            StackSpec {
                layers: vec![
                    uniform_layer(q0(), Shift::A),
                    uniform_layer(q0(), Shift::B),
                    uniform_layer(q0(), Shift::C),
                ],
                connectors: vec![
                    Coupling::Single { q: q0() },
                    Coupling::Single { q: qc() },
                ],
            },
        ),
        (
            "mixed5",
            StackSpec {
                layers: vec![
                    uniform_layer(q0(), Shift::A),
                    uniform_layer(q0(), Shift::A),
                    uniform_layer(q0(), Shift::B),
                    uniform_layer(q0(), Shift::C),
                    uniform_layer(q0(), Shift::C),
                ],
                connectors: vec![
                    Coupling::PerColor {
                        color1: q0(),
                        color2: qc(),
                    },
                    Coupling::Single { q: q0() },
                    Coupling::Single { q: qc() },
                    Coupling::PerColor {
                        color1: qc(),
                        color2: qc(),
                    },
                ],
            },
        ),
    ]
}

#[test]
fn c01_transfer_matrix_against_ode_oracle() {
    let seed = 101;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..200 {
        let q = random_potential(&mut rng);
        for _ in 0..2 {
            let lam = rng.gen_range(-30.0..150.0);
            let a = transfer_matrix(&q, lam);
            let b = transfer_matrix_ode(&q, lam, 10_000);
            let scale = [a.c, a.s, a.cp, a.sp]
                .iter()
                .map(|x| x.abs())
                .fold(1.0, f64::max);
            for (x, y) in [(a.c, b.c), (a.s, b.s), (a.cp, b.cp), (a.sp, b.sp)] {
                assert!(
                    (x - y).abs() <= 1e-7 * scale,
                    "trial {trial}: closed {x} vs ode {y} (lambda {lam}, seed {seed})"
                );
            }
            assert!(
                (a.det() - 1.0).abs() <= 1e-10,
                "trial {trial}: Wronskian {} (seed {seed})",
                a.det()
            );
        }
    }
    println!("criterion 01 transfer-matrix oracle agreement: PASS");
}

#[test]
fn c02_reversal_matches_inverse_conjugation() {
    let seed = 202;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..200 {
        let q = random_potential(&mut rng);
        let lam = rng.gen_range(-30.0..150.0);
        let t = transfer_matrix(&q, lam);
        let r = transfer_matrix(&q.reversed(), lam);
        // J T^{-1} J with J = diag(1, -1) is [[sp, s], [cp, c]].
        let scale = [t.c, t.s, t.cp, t.sp]
            .iter()
            .map(|x| x.abs())
            .fold(1.0, f64::max);
        for (x, y) in [(r.c, t.sp), (r.s, t.s), (r.cp, t.cp), (r.sp, t.c)] {
            assert!(
                (x - y).abs() <= 1e-9 * scale,
                "trial {trial}: {x} vs {y} (seed {seed})"
            );
        }
        // The Dirichlet spectral function is orientation-independent.
        assert!((r.s - t.s).abs() <= 1e-9 * (1.0 + t.s.abs()));
    }
    println!("criterion 02 reversal law: PASS");
}

#[test]
fn c03_join_calculus_identities() {
    let seed = 303;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs = 0;
    while pairs < 100 {
        let d = if pairs % 2 == 0 { 1 } else { 2 };
        let g1 = random_graph(&mut rng, d);
        let g2 = random_graph(&mut rng, d);
        let v1 = robin_vertex(&g1, &mut rng);
        let v2 = robin_vertex(&g2, &mut rng);
        let mut lambdas_done = 0;
        let mut attempts = 0;
        while lambdas_done < 5 && attempts < 50 {
            attempts += 1;
            let lam = rng.gen_range(-5.0..60.0);
            let alpha = if lambdas_done % 2 == 1 {
                Some(rng.gen_range(-3.0..3.0))
            } else {
                None
            };
            // join_dispersion verifies both calculus routes to 1e-8
            // internally and fails loudly on disagreement.
            match join_dispersion(&g1, v1, &g2, v2, alpha, lam) {
                Ok(_) => lambdas_done += 1,
                Err(QgError::PoleAtLambda { .. }) => continue,
                Err(e) => panic!("pair {pairs}: {e} (seed {seed})"),
            }
        }
        if lambdas_done == 5 {
            pairs += 1;
        }
    }
    println!("criterion 03 join calculus (plain and override): PASS");
}

#[test]
fn c04_pole_moving_identity() {
    let seed = 404;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut instances = 0;
    while instances < 50 {
        let d = if instances % 2 == 0 { 1 } else { 2 };
        let g = random_graph(&mut rng, d);
        let e = rng.gen_range(0..g.edges().len());
        let edge = &g.edges()[e];
        // The identity needs the subdivided edge visible in the matrix:
        // skip edges with both endpoints Dirichlet.
        if g.vertices()[edge.tail].condition.is_dirichlet()
            && g.vertices()[edge.head].condition.is_dirichlet()
        {
            continue;
        }
        let t = rng.gen_range(0.2..0.8);
        let samples: Vec<(Vec<Complex64>, f64)> = (0..5)
            .map(|_| {
                let z: Vec<Complex64> = (0..d)
                    .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.28)))
                    .collect();
                (z, rng.gen_range(-5.0..60.0))
            })
            .collect();
        match verify_pole_move(&g, e, t, &samples) {
            Ok(rep) => {
                assert!(
                    rep.max_rel_err <= 1e-8,
                    "instance {instances}: err {} sign {} (seed {seed})",
                    rep.max_rel_err,
                    rep.sign
                );
                assert!(rep.sign == 1.0 || rep.sign == -1.0);
                instances += 1;
            }
            Err(QgError::PoleAtLambda { .. }) | Err(QgError::SampleAtPole(_)) => continue,
            Err(e) => panic!("instance {instances}: {e} (seed {seed})"),
        }
    }
    println!("criterion 04 pole-moving identity: PASS");
}

/// Band set of the 1-D periodic operator with the given edge data: for a
/// symmetric potential the discriminant condition reduces to |c| <= 1.
fn hill_bands(q: &Potential, window: (f64, f64), step: f64) -> Vec<(f64, f64)> {
    let inside = |lam: f64| transfer_matrix(q, lam).c.abs() <= 1.0;
    let edge_fn = |lam: f64| transfer_matrix(q, lam).c.abs() - 1.0;
    let n = ((window.1 - window.0) / step).round() as usize;
    let mut bands: Vec<(f64, f64)> = Vec::new();
    let mut run: Option<f64> = None;
    let mut prev = window.0;
    let mut prev_in = inside(window.0);
    if prev_in {
        run = Some(window.0);
    }
    for i in 1..=n {
        let lam = window.0 + step * i as f64;
        let now = inside(lam);
        if now && !prev_in {
            run = Some(bisect(&edge_fn, prev, lam, 1e-10));
        } else if !now && prev_in {
            bands.push((run.take().unwrap(), bisect(&edge_fn, prev, lam, 1e-10)));
        }
        prev = lam;
        prev_in = now;
    }
    if let Some(lo) = run {
        bands.push((lo, window.1));
    }
    bands
}

#[test]
fn c05_hill_equivalence_of_single_layer() {
    let window = (-20.0, 120.0);
    // Square-well layer: bands equal the 1-D band condition |c| <= 1.
    let ss = StackSpec {
        layers: vec![uniform_layer(q0(), Shift::A)],
        connectors: vec![],
    };
    let mine = band_union(&bands(&ss, window, 0.02).unwrap(), 1e-9);
    let oracle = hill_bands(&q0(), window, 0.02);
    assert_eq!(
        mine.len(),
        oracle.len(),
        "band count: {mine:?} vs {oracle:?}"
    );
    for (a, b) in mine.iter().zip(&oracle) {
        assert!(
            (a.0 - b.0).abs() <= 1e-6 && (a.1 - b.1).abs() <= 1e-6,
            "band edge mismatch: {a:?} vs {b:?}"
        );
    }
    assert!(mine.len() >= 3, "expected gaps in the window: {mine:?}");

    // Free layer: a single gapless band [0, 120].
    let free = StackSpec {
        layers: vec![uniform_layer(Potential::zero(1.0), Shift::A)],
        connectors: vec![],
    };
    let mine = band_union(&bands(&free, window, 0.02).unwrap(), 1e-9);
    assert_eq!(mine.len(), 1, "free layer bands: {mine:?}");
    assert!((mine[0].0 - 0.0).abs() <= 1e-6 && (mine[0].1 - 120.0).abs() <= 1e-9);
    println!("criterion 05 Hill equivalence: PASS");
}

#[test]
fn c06_torus_weight_geometry() {
    let ((min_v, argmin), (max_v, _)) = g_tilde_extrema(1024);
    assert!(min_v.abs() <= 1e-9, "min {min_v}");
    assert!((max_v - 9.0).abs() <= 1e-9, "max {max_v}");
    let cell = 2.0 * PI / 1024.0;
    let k = 2.0 * PI / 3.0;
    let near_plus = (argmin[0] - k).abs() <= cell && (argmin[1] + k).abs() <= cell;
    let near_minus = (argmin[0] + k).abs() <= cell && (argmin[1] - k).abs() <= cell;
    assert!(near_plus || near_minus, "argmin {argmin:?}");
    println!("criterion 06 torus weight geometry: PASS");
}

#[test]
fn c07_stacked_dispersion_identity() {
    let seed = 707;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, ss) in [("aa2", aa_stack(2, q0(), qc())), ("aa3", aa_stack(3, qc(), q0()))] {
        let n = ss.layer_count();
        let g = stack(&ss).unwrap();
        let t2 = ss.to_type2().unwrap();
        let mut checked = 0;
        while checked < 100 {
            let lam = rng.gen_range(-20.0..120.0);
            let ch = match type2_characteristic(&t2, lam) {
                Ok(ch) => ch,
                Err(_) => continue,
            };
            let z: Vec<Complex64> = (0..2)
                .map(|_| Complex64::from_polar(1.0, rng.gen_range(0.0..6.28)))
                .collect();
            let s = transfer_matrix(&q0(), lam).s;
            let one = Complex64::new(1.0, 0.0);
            let w = (one + z[0] + z[1]) / s;
            let zeta = w * ((one + z[0].inv() + z[1].inv()) / s);
            let m = DMatrix::from_fn(n, n, |i, j| {
                Complex64::new(ch.delta[(i, j)], 0.0)
                    - if i == j {
                        Complex64::new(s * s, 0.0) * zeta
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
            });
            let rhs = m.lu().determinant() * Complex64::new(s.powi(-2 * n as i32), 0.0);
            let direct = match dispersion_at(&g, lam, &z) {
                Ok(v) => v,
                Err(_) => continue,
            };
            assert!(
                (direct - rhs).norm() <= 1e-8 * (1.0 + direct.norm().max(rhs.norm())),
                "{name}: {direct} vs {rhs} at lambda {lam} (seed {seed})"
            );
            checked += 1;
        }
        // The fit in the composite variable has exactly n roots. Deep in
        // the hyperbolic region the constant term dwarfs everything and
        // the degree is not numerically observable, so probe energies
        // around the spectral range.
        let mut fitted = 0;
        while fitted < 5 {
            let lam = rng.gen_range(-10.0..120.0);
            let d = match dispersion(&g, lam) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let s = transfer_matrix(&q0(), lam).s;
            let st = zeta_components(&d, &zeta_poly(&[s, s, s]), n).unwrap();
            assert_eq!(st.degree(), n, "{name} at lambda {lam}");
            assert_eq!(st.roots.len(), n);
            assert!(st.residual <= 1e-8);
            fitted += 1;
        }
    }
    println!("criterion 07 stacked dispersion identity: PASS");
}

#[test]
fn c08_composite_variable_degree_law() {
    let seed = 808;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (name, ss) in criterion_stacks() {
        if name == "aa2" || name == "aa3" {
            continue; // covered by criterion 7
        }
        let n = ss.layer_count();
        let g = stack(&ss).unwrap();
        let mut fitted = 0;
        while fitted < 5 {
            let lam = rng.gen_range(-10.0..120.0);
            let d = match dispersion(&g, lam) {
                Ok(d) => d,
                Err(_) => continue,
            };
            let s = transfer_matrix(&q0(), lam).s;
            let st = match zeta_components(&d, &zeta_poly(&[s, s, s]), n + 2) {
                Ok(st) => st,
                Err(QgError::RankDeficient { .. }) => continue,
                Err(e) => panic!("{name}: {e}"),
            };
            assert!(
                st.residual <= 1e-8,
                "{name}: residual {} at lambda {lam} (seed {seed})",
                st.residual
            );
            assert_eq!(
                st.degree(),
                n,
                "{name}: degree {} != layer count {n} at lambda {lam}",
                st.degree()
            );
            fitted += 1;
        }
    }
    println!("criterion 08 composite-variable degree law: PASS");
}

#[test]
fn c09_conical_points_and_their_destruction() {
    let window = (-20.0, 120.0);
    // Hypotheses satisfied: identical symmetric potentials, equal Robin
    // parameters, the same connector at both vertex colors.
    let symmetric = aa_stack(2, q0(), q0());
    let reports = cone_scan(&symmetric, window, 0.02).unwrap();
    assert!(!reports.is_empty(), "no zeros found");
    for r in &reports {
        assert_eq!(
            r.classification,
            ConeClass::Cone,
            "expected a conical point: {r:?}"
        );
    }
    // Hypothesis (3) broken: different connectors per color.
    let broken = aa_stack(2, Potential::zero(1.0), qc());
    let reports = cone_scan(&broken, window, 0.02).unwrap();
    assert!(!reports.is_empty(), "no zeros found");
    for r in &reports {
        assert_eq!(
            r.classification,
            ConeClass::Transversal,
            "conical point should be destroyed: {r:?}"
        );
    }
    println!("criterion 09 conical points: PASS");
}

#[test]
fn c10_cone_energies_of_free_layer() {
    let ss = StackSpec {
        layers: vec![uniform_layer(Potential::zero(1.0), Shift::A)],
        connectors: vec![],
    };
    let reports = cone_scan(&ss, (0.5, 30.0), 0.02).unwrap();
    let expected = [(PI / 2.0) * (PI / 2.0), (3.0 * PI / 2.0) * (3.0 * PI / 2.0)];
    assert_eq!(reports.len(), expected.len(), "{reports:?}");
    for (r, e) in reports.iter().zip(&expected) {
        assert!(
            (r.lambda_star - e).abs() <= 1e-6,
            "cone at {} expected {e}",
            r.lambda_star
        );
        assert_eq!(r.classification, ConeClass::Cone);
    }
    println!("criterion 10 cone energies: PASS");
}

#[test]
fn c11_irreducibility_fixtures() {
    let seed = 1111;
    // The hexagonal weight factors (self-validated).
    let g = laurent::hexagonal_weight();
    match factor_probe(&g, 32, seed).unwrap() {
        FactorVerdict::Factored(f, h) => {
            assert!(f.mul(&h).unwrap().rel_distance(&g) <= 1e-8);
        }
        other => panic!("hexagonal weight should factor, got {other:?}"),
    }
    // Both explicit bilayer determinants resist factorization at the
    // standard specialization.
    let values = qgraph::reduce::fixtures::FixtureValues::nonfactorable_specialization();
    for (name, m) in [
        (
            "crossed bilayer",
            qgraph::reduce::fixtures::crossed_bilayer(values),
        ),
        (
            "tripartite bilayer",
            qgraph::reduce::fixtures::tripartite_bilayer(values),
        ),
    ] {
        let det = laurent::det(&m).unwrap();
        match factor_probe(&det, 32, seed).unwrap() {
            FactorVerdict::NoFactorizationFound {
                lattice_points,
                splits_tried,
                restarts_per_split,
            } => {
                println!(
                    "  {name}: no factorization over {lattice_points} lattice points, \
                     {splits_tried} polytope splits, {restarts_per_split} restarts each"
                );
                assert!(splits_tried > 0);
            }
            FactorVerdict::Factored(f, g) => {
                panic!("{name} unexpectedly factored: {f} * {g}")
            }
        }
        // Degree consistency of univariate specializations D(z1, t).
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let full_span = det.var_span(0).unwrap();
        for _ in 0..5 {
            let t = Complex64::from_polar(1.0, rng.gen_range(0.0..6.28));
            let mut uni = qgraph::laurent::LaurentPoly::zero(1);
            for (e, c) in det.terms() {
                uni.add_term(&[e[0]], c * t.powi(e[1]));
            }
            let uni = uni.cleaned();
            assert_eq!(uni.var_span(0), Some(full_span), "degree dropped at t={t}");
        }
    }
    println!("criterion 11 irreducibility fixtures: PASS");
}

#[test]
fn c12_two_pipeline_band_consistency() {
    let window = (-20.0, 60.0);
    let step = 0.02;
    for (name, ss) in criterion_stacks() {
        let union = band_union(&bands(&ss, window, step).unwrap(), 1e-9);
        let g = stack(&ss).unwrap();
        let scan = spectrum_scan(&g, window, step, 12).unwrap();
        assert_eq!(
            union.len(),
            scan.bands.len(),
            "{name}: interval count {union:?} vs {:?}",
            scan.bands
        );
        for (a, b) in union.iter().zip(&scan.bands) {
            assert!(
                (a.0 - b.0).abs() <= 1e-6 && (a.1 - b.1).abs() <= 1e-6,
                "{name}: band {a:?} vs {b:?}"
            );
        }
        println!("  {name}: {} bands agree", union.len());
    }
    println!("criterion 12 two-pipeline band consistency: PASS");
}
