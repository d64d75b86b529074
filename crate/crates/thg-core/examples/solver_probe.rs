// Convergence probe for the Nehari flow at several regimes.
use std::time::Instant;
use thg_core::grid::make_grid;
use thg_core::groundstate::{scalar_ground_state_nd, solve_ground_state};
use thg_core::PhysParams;

fn main() {
    env_logger::init();
    let cases: Vec<(&str, usize, usize, f64, f64, f64, f64)> = vec![
        // label, n, points, half_width, sigma, mu, tol
        ("1d kappa=1", 1, 512, 16.0, 1.0 / 3.0, 1.0, 1e-8),
        ("1d kappa=9", 1, 512, 16.0, 3.0, 9.0, 1e-8),
        ("2d kappa=1", 2, 128, 12.0, 1.0 / 3.0, 1.0, 1e-8),
        ("2d kappa=9", 2, 128, 12.0, 3.0, 9.0, 1e-8),
    ];
    for (label, n, points, hw, sigma, mu, tol) in cases {
        let grid = make_grid(n, points, hw).unwrap();
        let p = PhysParams::new(n, sigma, mu, 0.0).unwrap();
        let t0 = Instant::now();
        match solve_ground_state(&p, &grid, None, tol, 20_000) {
            Ok(gs) => println!(
                "{label}: iters={} resid={:.3e} S={:.6} P0={} dt={:.2?}",
                gs.iterations,
                gs.equation_residual,
                gs.action,
                gs.p_is_zero(),
                t0.elapsed()
            ),
            Err(e) => println!("{label}: FAILED after {:.2?}: {e}", t0.elapsed()),
        }
    }
    // the kappa=81 boundary case
    let grid = make_grid(2, 256, 4.0).unwrap();
    let p = PhysParams::new(2, 27.0, 81.0, 0.0).unwrap();
    let t0 = Instant::now();
    match scalar_ground_state_nd(&p, &grid, 1e-9) {
        Ok(_) => println!("2d kappa=81: ok dt={:.2?}", t0.elapsed()),
        Err(e) => println!("2d kappa=81: FAILED after {:.2?}: {e}", t0.elapsed()),
    }
}
