use permuperc::branching::{solve_gamma, survival_probability_mc, truncated_binomial_mean, truncation_parameters};
use permuperc::trees::{count_rooted_trees, sample_uniform_tree, tree_count_bounds, LabelledTree};

#[test]
fn gamma_fixed_point() {
    for c in [1.05, 1.5, 2.0, 3.0, 5.0] {
        let g = solve_gamma(c).unwrap();
        assert!((g - (1.0 - (-c * g).exp())).abs() < 1e-12);
    }
    assert_eq!(solve_gamma(1.0).unwrap(), 0.0);
}

#[test]
fn survival_matches_poisson_limit() {
    let est = survival_probability_mc(200, 2.0, 60, 4000, 3).unwrap();
    assert!((est.estimate - solve_gamma(2.0).unwrap()).abs() < 0.03, "{est:?}");
}

#[test]
fn truncated_means_exceed_bound() {
    for beta in [0.5, 1.0] {
        let (mp, p, k) = truncation_parameters(beta, 100).unwrap();
        let est = truncated_binomial_mean(mp, p, k, 20_000, 1).unwrap();
        assert!(est.estimate >= 1.0 + beta / 4.0 - 3.0 * est.stderr);
    }
}

#[test]
fn hexagon_trees() {
    assert_eq!(count_rooted_trees(2, 2).unwrap(), 12);
    assert_eq!(count_rooted_trees(2, 6).unwrap(), 36);
    assert!(count_rooted_trees(4, 2).is_err());
    let (lo, hi) = tree_count_bounds(6.0, 2, 2, 2);
    assert!(lo.is_none() && hi >= 12.0);
}

#[test]
fn prufer_trees() {
    let t = LabelledTree::from_prufer(5, &[3, 3, 3]).unwrap();
    assert_eq!(t.max_degree(), 4);
    assert_eq!(t.diameter(), 2);
    let s = sample_uniform_tree(500, 4).unwrap();
    assert_eq!(s.canonical_edges().len(), 499);
    assert_eq!(s.degrees().iter().sum::<usize>(), 998);
}
