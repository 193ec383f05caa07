mod support;

use ffemu_core::optim::{aco_sigma, aco_weights, selection_probabilities, SolutionArchive};
use support::{check_constants, precise_probabilities, precise_weights};

#[test]
fn fixed_point_oracle_is_sound() {
    check_constants();
}

#[test]
fn weights_match_high_precision_evaluation() {
    for (q_size, num, den) in [(10, 1, 2), (1, 1, 2), (5, 1, 10), (50, 3, 4)] {
        let ours = aco_weights(q_size as usize, num as f64 / den as f64);
        let oracle = precise_weights(q_size, num, den);
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() <= 1e-12, "Q={q_size}: {a} vs {b}");
        }
    }
    let w = aco_weights(10, 0.5);
    assert!((w[0] - 0.079_788_5).abs() < 1e-7);
}

#[test]
fn probabilities_match_independent_normalization() {
    let ours = selection_probabilities(&aco_weights(10, 0.5)).unwrap();
    let oracle = precise_probabilities(10, 1, 2);
    for (a, b) in ours.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-12);
    }
    assert!((ours.iter().sum::<f64>() - 1.0).abs() <= 1e-15);
}

#[test]
fn sigma_scales_linearly_with_xi() {
    let archive = SolutionArchive::from_evaluated(3, vec![vec![0.0], vec![2.0], vec![5.0]], vec![0.0, 1.0, 2.0]).unwrap();
    let s1 = aco_sigma(&archive, 0, 1, 1.0).unwrap();
    let s2 = aco_sigma(&archive, 0, 1, 2.0).unwrap();
    assert_eq!(s1, (2.0 + 3.0) / 2.0);
    assert_eq!(s2, 2.0 * s1);
}
