use std::f64::consts::SQRT_2;

use proptest::prelude::*;

use necklace::analysis::{cos_bound_constant, mixing_bound_curve};
use necklace::bloch::full_spectrum;
use necklace::comb1::{comb1_limiting_distribution, VertexType};
use necklace::dynamics::{
    limiting_distribution, lemma43_bound, probability_at_time, time_averaged, tv_distance, Eigenbasis, InitialState,
    ProjectedState,
};
use necklace::graph::{assemble_hamiltonian, NecklaceSpec, PearlSpec};
use necklace::oracle::brute_spectrum;

/// Pearl with up to `max_m` vertices, random edges and roots.
fn pearl_strategy(max_m: usize) -> impl Strategy<Value = PearlSpec> {
    (1..=max_m).prop_flat_map(|m| {
        let pairs: Vec<(usize, usize)> = (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
        let n_pairs = pairs.len();
        (proptest::collection::vec(any::<bool>(), n_pairs), 0..m, 0..m).prop_map(move |(mask, r_in, r_out)| {
            let edges: Vec<(usize, usize)> = pairs.iter().zip(&mask).filter(|(_, &on)| on).map(|(&e, _)| e).collect();
            PearlSpec::custom(m, &edges, r_in, r_out).unwrap()
        })
    })
}

fn degrees(neck: &NecklaceSpec) -> Vec<usize> {
    let p = neck.pearl();
    let mut deg = vec![0; neck.vertex_count()];
    for j in 0..neck.pearls() {
        for &(a, b) in p.edges() {
            deg[neck.index(j, a)] += 1;
            deg[neck.index(j, b)] += 1;
        }
        deg[neck.index(j, p.root_out())] += 1;
        deg[neck.index((j + 1) % neck.pearls(), p.root_in())] += 1;
    }
    deg
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hamiltonian_structure(pearl in pearl_strategy(6), k in 3usize..10) {
        let neck = NecklaceSpec::new(pearl.clone(), k).unwrap();
        let h = assemble_hamiltonian(&neck);
        let a = h.as_array();
        let n = neck.vertex_count();
        let mut upper = 0;
        for i in 0..n {
            prop_assert_eq!(a[[i, i]], 0.0);
            for j in 0..n {
                prop_assert_eq!(a[[i, j]], a[[j, i]]);
                prop_assert!(a[[i, j]] == 0.0 || a[[i, j]] == 1.0);
                if j > i && a[[i, j]] == 1.0 {
                    upper += 1;
                }
            }
        }
        prop_assert_eq!(upper, k * pearl.edges().len() + k);
        let deg = degrees(&neck);
        for i in 0..n {
            prop_assert_eq!(a.row(i).sum() as usize, deg[i]);
        }
    }

    #[test]
    fn relabeling_preserves_spectrum(
        (pearl, perm) in pearl_strategy(6).prop_flat_map(|p| {
            let ids: Vec<usize> = (0..p.m()).collect();
            (Just(p), Just(ids).prop_shuffle())
        }),
        k in 3usize..9,
    ) {
        let a = full_spectrum(&NecklaceSpec::new(pearl.clone(), k).unwrap()).unwrap().sorted_values();
        let b = full_spectrum(&NecklaceSpec::new(pearl.relabel(&perm).unwrap(), k).unwrap()).unwrap().sorted_values();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-12, "{} vs {}", x, y);
        }
    }

    #[test]
    fn sector_union_matches_brute(pearl in pearl_strategy(6), k in 3usize..13) {
        let neck = NecklaceSpec::new(pearl, k).unwrap();
        let fast = full_spectrum(&neck).unwrap().sorted_values();
        let brute = brute_spectrum(&assemble_hamiltonian(&neck)).unwrap().values;
        for (x, y) in fast.iter().zip(&brute) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn conjugate_sectors_share_spectrum(pearl in pearl_strategy(6), k in 3usize..16) {
        let spec = full_spectrum(&NecklaceSpec::new(pearl, k).unwrap()).unwrap();
        for q in 1..k {
            let (a, b) = (&spec.sectors()[q].values, &spec.sectors()[k - q].values);
            for (x, y) in a.iter().zip(b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn evolution_is_unitary(pearl in pearl_strategy(5), k in 3usize..9, start in 0usize..100, t in 0.0f64..500.0) {
        let neck = NecklaceSpec::new(pearl, k).unwrap();
        let basis = Eigenbasis::from(&full_spectrum(&neck).unwrap());
        let phi = InitialState::vertex(neck.vertex_count(), start % neck.vertex_count()).unwrap();
        let p = probability_at_time(&basis, &phi, t).unwrap();
        prop_assert!((p.total() - 1.0).abs() < 1e-10);
        prop_assert!(p.probabilities().iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn time_average_within_lemma_bound(pearl in pearl_strategy(5), k in 3usize..9, start in 0usize..100, t in 0.5f64..2000.0) {
        let neck = NecklaceSpec::new(pearl, k).unwrap();
        let basis = Eigenbasis::from(&full_spectrum(&neck).unwrap());
        let phi = InitialState::vertex(neck.vertex_count(), start % neck.vertex_count()).unwrap();
        let tau = basis.default_tau();
        let avg = time_averaged(&basis, &phi, t, tau).unwrap();
        let limit = limiting_distribution(&basis, &phi, tau).unwrap().distribution;
        prop_assert!((avg.total() - 1.0).abs() < 1e-9);
        prop_assert!((limit.total() - 1.0).abs() < 1e-9);
        let tv = tv_distance(&avg, &limit).unwrap();
        prop_assert!(tv <= lemma43_bound(&basis, &phi, t, tau).unwrap() + 1e-12);
    }

    #[test]
    fn comb1_closed_form_matches_projector(k in 3usize..24, z in 0usize..24, tooth in any::<bool>()) {
        let z = z % k;
        let start = if tooth { VertexType::Tooth } else { VertexType::Base };
        let neck = NecklaceSpec::new(PearlSpec::comb(1).unwrap(), k).unwrap();
        let basis = Eigenbasis::from(&full_spectrum(&neck).unwrap());
        let phi = InitialState::vertex(2 * k, 2 * z + start.offset()).unwrap();
        let pi = limiting_distribution(&basis, &phi, basis.default_tau()).unwrap().distribution;
        let closed = comb1_limiting_distribution(k, start, z).unwrap();
        prop_assert!((closed.total() - 1.0).abs() < 1e-10);
        for v in 0..2 * k {
            prop_assert!((pi[v] - closed[v]).abs() < 1e-10);
        }
    }

    #[test]
    fn cycle_ratio_is_exactly_two(k in 3usize..200) {
        let spec = full_spectrum(&NecklaceSpec::new(PearlSpec::cycle(), k).unwrap()).unwrap();
        let r = cos_bound_constant(&spec, 0, 0, 1e-8).unwrap();
        prop_assert!((r.c_measured - 2.0).abs() < 1e-12);
    }

    #[test]
    fn comb1_same_branch_constant(k in 4usize..=512) {
        let spec = full_spectrum(&NecklaceSpec::new(PearlSpec::comb(1).unwrap(), k).unwrap()).unwrap();
        let floor = (SQRT_2 - 1.0) / SQRT_2;
        for n in 0..2 {
            prop_assert!(cos_bound_constant(&spec, n, n, 1e-8).unwrap().c_measured >= floor - 1e-12);
        }
    }

    #[test]
    fn comb2_same_branch_constant(k in 4usize..=512) {
        // |d sqrt(3 + 2c) / dc| = 1 / sqrt(3 + 2c) >= 1 / sqrt(5)
        let spec = full_spectrum(&NecklaceSpec::new(PearlSpec::comb(2).unwrap(), k).unwrap()).unwrap();
        for n in [0, 2] {
            prop_assert!(cos_bound_constant(&spec, n, n, 1e-8).unwrap().c_measured >= 1.0 / 5f64.sqrt() - 1e-12);
        }
    }
}

#[test]
fn bound_curve_dominates_distance() {
    for d in [1, 2] {
        for k in [16, 32, 64] {
            let neck = NecklaceSpec::new(PearlSpec::comb(d).unwrap(), k).unwrap();
            let spec = full_spectrum(&neck).unwrap();
            let m = neck.pearl().m();
            let c = [0, m - 1]
                .iter()
                .map(|&n| cos_bound_constant(&spec, n, n, 1e-8).unwrap().c_measured)
                .fold(f64::INFINITY, f64::min);
            let basis = Eigenbasis::from(&spec);
            let phi = InitialState::vertex(neck.vertex_count(), 0).unwrap();
            let state = ProjectedState::new(&basis, &phi, basis.default_tau()).unwrap();
            let mut t = k as f64;
            while t <= 1e5 {
                let tv = state.distance_to_limit(t).unwrap();
                let bound = mixing_bound_curve(c, k as f64, t).unwrap();
                assert!(tv <= bound, "d={d} K={k} T={t}: tv {tv} > {bound}");
                t *= 1.5;
            }
        }
    }
}
