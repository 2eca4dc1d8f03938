use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use necklace::bloch::full_spectrum;
use necklace::dynamics::{probability_at_time, time_averaged, Eigenbasis, InitialState};
use necklace::graph::{assemble_hamiltonian, NecklaceSpec, PearlSpec};
use necklace::oracle::{brute_spectrum, evolve_matrix_exponential, quadrature_time_average};

fn pearls() -> Vec<PearlSpec> {
    vec![
        PearlSpec::cycle(),
        PearlSpec::comb(1).unwrap(),
        PearlSpec::comb(2).unwrap(),
        PearlSpec::comb(3).unwrap(),
        PearlSpec::comb(5).unwrap(),
        // triangle with a pendant, roots on the triangle
        PearlSpec::custom(4, &[(0, 1), (1, 2), (2, 0), (2, 3)], 0, 1).unwrap(),
        // six-vertex pearl with one root
        PearlSpec::custom(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (1, 4)], 2, 2).unwrap(),
    ]
}

#[test]
fn sector_union_equals_brute_spectrum() {
    for pearl in pearls() {
        for k in 3..=12 {
            let neck = NecklaceSpec::new(pearl.clone(), k).unwrap();
            let fast = full_spectrum(&neck).unwrap().sorted_values();
            let brute = brute_spectrum(&assemble_hamiltonian(&neck)).unwrap().values;
            for (a, b) in fast.iter().zip(&brute) {
                assert!((a - b).abs() < 1e-9, "M={} K={k}: {a} vs {b}", pearl.m());
            }
        }
    }
}

#[test]
fn comb_k5_d3_multiset() {
    let neck = NecklaceSpec::new(PearlSpec::comb(3).unwrap(), 5).unwrap();
    let fast = full_spectrum(&neck).unwrap().sorted_values();
    let brute = brute_spectrum(&assemble_hamiltonian(&neck)).unwrap().values;
    assert_eq!(fast.len(), 20);
    for (a, b) in fast.iter().zip(&brute) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn lifted_vectors_diagonalize_hamiltonian() {
    for pearl in pearls() {
        for k in [3, 4, 7] {
            let neck = NecklaceSpec::new(pearl.clone(), k).unwrap();
            let spec = full_spectrum(&neck).unwrap();
            let (entries, v) = spec.eigenbasis();
            let h: Array2<Complex64> = assemble_hamiltonian(&neck).as_array().mapv(|x| Complex64::new(x, 0.0));
            let d = v.t().mapv(|z| z.conj()).dot(&h).dot(&v);
            for a in 0..entries.len() {
                for b in 0..entries.len() {
                    let want = if a == b { entries[a].value } else { 0.0 };
                    assert!((d[[a, b]] - want).norm() < 1e-9, "M={} K={k} ({a},{b})", pearl.m());
                }
            }
        }
    }
}

#[test]
fn cycle_evolution_matches_matrix_exponential() {
    let neck = NecklaceSpec::new(PearlSpec::cycle(), 4).unwrap();
    let basis = Eigenbasis::from(&full_spectrum(&neck).unwrap());
    let h = assemble_hamiltonian(&neck);
    let phi = InitialState::vertex(4, 0).unwrap();
    let fast = probability_at_time(&basis, &phi, PI / 2.0).unwrap();
    let slow = evolve_matrix_exponential(&h, &phi, PI / 2.0).unwrap();
    for x in 0..4 {
        assert!((fast[x] - slow[x]).abs() < 1e-9);
    }
    // e^{-iHt} on the 4-cycle at t = pi/2: the walker sits on the antipode
    assert!((slow[2] - 1.0).abs() < 1e-9);
}

#[test]
fn evolution_matches_on_combs() {
    for d in 1..=4 {
        let neck = NecklaceSpec::new(PearlSpec::comb(d).unwrap(), 7).unwrap();
        let basis = Eigenbasis::from(&full_spectrum(&neck).unwrap());
        let h = assemble_hamiltonian(&neck);
        let phi = InitialState::vertex(neck.vertex_count(), neck.index(2, d)).unwrap();
        for t in [0.3, 2.0, 11.5, 80.0] {
            let fast = probability_at_time(&basis, &phi, t).unwrap();
            let slow = evolve_matrix_exponential(&h, &phi, t).unwrap();
            for x in 0..neck.vertex_count() {
                assert!((fast[x] - slow[x]).abs() < 1e-9, "d={d} t={t}");
            }
        }
    }
}

fn quadrature_agreement(pearl: PearlSpec, k: usize, t_avg: f64, steps: usize) -> f64 {
    let neck = NecklaceSpec::new(pearl, k).unwrap();
    let basis = Eigenbasis::from(&full_spectrum(&neck).unwrap());
    let h = assemble_hamiltonian(&neck);
    let phi = InitialState::vertex(neck.vertex_count(), 0).unwrap();
    let exact = time_averaged(&basis, &phi, t_avg, basis.default_tau()).unwrap();
    let quad = quadrature_time_average(&h, &phi, t_avg, steps).unwrap();
    (0..neck.vertex_count()).map(|x| (exact[x] - quad[x]).abs()).fold(0.0, f64::max)
}

#[test]
fn exact_average_matches_quadrature_cycle() {
    // step 1e-3: trapezoid error well below 1e-6
    assert!(quadrature_agreement(PearlSpec::cycle(), 6, 10.0, 10_000) < 1e-6);
}

#[test]
fn exact_average_matches_quadrature_comb() {
    assert!(quadrature_agreement(PearlSpec::comb(2).unwrap(), 4, 50.0, 50_000) < 1e-5);
}
