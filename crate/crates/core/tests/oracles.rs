//! Brute-force oracles for distance, the transversal gate and CCZ triples.

mod common;

use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rainbow_codes::gf2::BitVec;
use rainbow_codes::triorth::{check_triorthogonality, triple_overlaps, Bipartition};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(160))]

    #[test]
    fn exact_search_matches_brute_force(n in 3usize..=14, seed in any::<u64>()) {
        check_exact_search(n, seed)?;
    }
}

#[test]
fn cube_code_has_one_ccz() {
    let code = cube_code();
    assert_eq!(code.k(), 3);
    let a = parity_bipartition(8);
    let report = check_triorthogonality(&code, &a).unwrap();
    assert!(report.gate_found, "{report:?}");
    let action = state_vector_action(&code, &a).expect("pattern keeps the code space");
    let cubic = cubic_terms(&phase_polynomial(&action));
    assert_eq!(cubic, vec![(0, 1, 2)]);
    assert_eq!(triple_overlaps(code.lx()), cubic);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn verdicts_match_state_vector_on_random_codes(n in 3usize..=12, seed in any::<u64>()) {
        let code = random_css(n, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        agree_with_state_vector(&code, &random_bipartition(n, &mut rng))?;
    }

    #[test]
    fn verdicts_match_state_vector_on_cube_variants(mask in 0u32..256, relabel in any::<u64>()) {
        // cube code with an arbitrary T pattern and a shuffled logical basis
        let code = cube_code();
        let ones: Vec<usize> = (0..8).filter(|i| mask >> i & 1 == 1).collect();
        let a = Bipartition::new(BitVec::from_support(8, &ones));
        let mut rng = ChaCha8Rng::seed_from_u64(relabel);
        let m = loop {
            let m = random_rows(&mut rng, 3, 3);
            if let Some(inv) = m.inverse() {
                break (m, inv);
            }
        };
        let lx = m.0.matmul(code.lx()).unwrap();
        let lz = m.1.transpose().matmul(code.lz()).unwrap();
        let rebased = code.with_logicals(lx, lz).unwrap();
        agree_with_state_vector(&rebased, &a)?;
    }
}
