use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use qnd_core::fock::{FockVector, ModeLabel, ModeRegistry, Occupation, PathId, C64};

fn registry(n: usize) -> ModeRegistry {
    ModeRegistry::new((0..n).map(|i| ModeLabel::h(PathId(i as u8))).collect()).unwrap()
}

fn random_unitary(n: usize, seed: u64) -> DMatrix<C64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
    let m = DMatrix::from_fn(n, n, |_, _| C64::new(gauss(), gauss()));
    m.qr().q()
}

/// All occupations of `n` modes with exactly `total` photons.
fn sector(n: usize, total: u8) -> Vec<Vec<u8>> {
    if n == 1 {
        return vec![vec![total]];
    }
    (0..=total)
        .flat_map(|first| {
            sector(n - 1, total - first)
                .into_iter()
                .map(move |mut rest| {
                    rest.insert(0, first);
                    rest
                })
        })
        .collect()
}

fn factorial(k: u8) -> f64 {
    (1..=u32::from(k)).map(f64::from).product()
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    permutations(k - 1)
        .into_iter()
        .flat_map(|p| {
            (0..k).map(move |pos| {
                let mut q = p.clone();
                q.insert(pos, k - 1);
                q
            })
        })
        .collect()
}

fn permanent(m: &DMatrix<C64>) -> C64 {
    let k = m.nrows();
    permutations(k)
        .iter()
        .map(|p| (0..k).map(|i| m[(i, p[i])]).product::<C64>())
        .sum()
}

fn expand(counts: &[u8]) -> Vec<usize> {
    counts
        .iter()
        .enumerate()
        .flat_map(|(i, &c)| std::iter::repeat_n(i, usize::from(c)))
        .collect()
}

/// `⟨m|U|n⟩ = Perm(U[m, n]) / sqrt(Π m! Π n!)` with rows repeated by output and
/// columns by input occupation.
fn dense_transition(u: &DMatrix<C64>, input: &[u8], output: &[u8]) -> C64 {
    let (rows, cols) = (expand(output), expand(input));
    let sub = DMatrix::from_fn(rows.len(), cols.len(), |r, c| u[(rows[r], cols[c])]);
    let norm: f64 = input.iter().chain(output).map(|&c| factorial(c)).product();
    permanent(&sub) / norm.sqrt()
}

fn state_strategy() -> impl Strategy<Value = (usize, u8, Vec<(f64, f64)>, u64)> {
    (2usize..=6, 0u8..=3).prop_flat_map(|(n, total)| {
        let dim = sector(n, total).len();
        (
            Just(n),
            Just(total),
            prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim),
            any::<u64>(),
        )
    })
}

fn build(n: usize, total: u8, amps: &[(f64, f64)]) -> Option<FockVector> {
    let basis = sector(n, total);
    let terms: Vec<(Occupation, C64)> = basis
        .into_iter()
        .zip(amps)
        .map(|(o, &(re, im))| (Occupation::from(o), C64::new(re, im)))
        .collect();
    let v = FockVector::from_terms(registry(n), terms).ok()?;
    (v.norm_sq() > 1e-3).then(|| v.normalized())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn element_preserves_norm_and_photon_number((n, total, amps, seed) in state_strategy()) {
        let Some(psi) = build(n, total, &amps) else { return Ok(()); };
        let u = random_unitary(n, seed);
        let modes = registry(n).modes().to_vec();
        let out = psi.apply_element(&modes, &u).unwrap();
        prop_assert!((out.norm_sq() - 1.0).abs() < 1e-12);
        if !out.is_empty() {
            prop_assert_eq!(out.photon_number(), Some(u32::from(total)));
        }
    }

    #[test]
    fn element_matches_permanent_oracle((n, total, amps, seed) in state_strategy()) {
        let Some(psi) = build(n, total, &amps) else { return Ok(()); };
        let u = random_unitary(n, seed);
        let modes = registry(n).modes().to_vec();
        let out = psi.apply_element(&modes, &u).unwrap();
        for m in sector(n, total) {
            let expected: C64 = psi
                .amplitudes()
                .map(|(occ, a)| a * dense_transition(&u, occ.counts(), &m))
                .sum();
            let got = out.amplitude(&Occupation::from(m.clone()));
            prop_assert!((got - expected).norm() < 1e-12, "{:?}: {} vs {}", m, got, expected);
        }
    }

    #[test]
    fn patterns_are_complete((n, total, amps, seed) in state_strategy()) {
        let Some(psi) = build(n, total, &amps) else { return Ok(()); };
        let out = psi.apply_element(registry(n).modes(), &random_unitary(n, seed)).unwrap();
        let watched: Vec<ModeLabel> = registry(n).modes()[..n / 2 + 1].to_vec();
        let total_p: f64 = out
            .patterns(&watched)
            .unwrap()
            .iter()
            .map(|p| {
                let pattern: Vec<(ModeLabel, u8)> =
                    watched.iter().copied().zip(p.counts().iter().copied()).collect();
                out.project_counts(&pattern).unwrap().probability
            })
            .sum();
        prop_assert!((total_p - 1.0).abs() < 1e-12);
    }

    #[test]
    fn element_then_adjoint_is_identity((n, total, amps, seed) in state_strategy()) {
        let Some(psi) = build(n, total, &amps) else { return Ok(()); };
        let u = random_unitary(n, seed);
        let modes = registry(n).modes().to_vec();
        let back = psi
            .apply_element(&modes, &u)
            .unwrap()
            .apply_element(&modes, &u.adjoint())
            .unwrap();
        prop_assert!((back.inner(&psi).unwrap().norm() - 1.0).abs() < 1e-12);
    }
}

#[test]
fn oracle_self_check_on_balanced_splitter() {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let u = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(r, 0.0),
            C64::new(r, 0.0),
            C64::new(r, 0.0),
            C64::new(-r, 0.0),
        ],
    );
    // two-photon interference: |1,1⟩ has no |1,1⟩ component afterwards
    assert!(dense_transition(&u, &[1, 1], &[1, 1]).norm() < 1e-15);
    assert!((dense_transition(&u, &[1, 1], &[2, 0]).re - r).abs() < 1e-15);
    assert!((dense_transition(&u, &[1, 1], &[0, 2]).re + r).abs() < 1e-15);
    assert_eq!(sector(3, 2).len(), 6);
}
