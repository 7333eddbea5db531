use kicktop::classical::{chaotic_fraction, initial_condition_grid, LyapunovOptions, DEFAULT_H_TOL};
use kicktop::liouville::TopParams;

#[test]
fn doubling_or_halving_h_tol_moves_few_points() {
    let grid = initial_condition_grid(1245).unwrap();
    let opts = LyapunovOptions::default();
    for (k1, expected) in [(8.0, 1.0), (0.0, 0.0)] {
        let par = TopParams { p: 2.0, k0: 10.0, k1, gamma: 0.1 };
        let r = chaotic_fraction(&par, &grid, &opts).unwrap();
        assert_eq!(r.f_c, expected);
        for factor in [0.5, 2.0] {
            let h = DEFAULT_H_TOL * factor;
            let flipped = r.points.iter().filter(|m| (m.h1 > h) != (m.upsilon == 1)).count();
            assert!((flipped as f64) < 0.02 * r.n_points as f64, "k1 = {k1}, factor {factor}: {flipped} flips");
        }
    }
}
