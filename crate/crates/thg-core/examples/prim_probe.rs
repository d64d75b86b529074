// Timing probe for the spectral primitives.
use std::time::Instant;
use thg_core::grid::{grad_norm_sq, laplacian, make_grid, Field};

fn main() {
    for (n, points) in [(1usize, 512usize), (2, 128), (2, 256)] {
        let grid = make_grid(n, points, 12.0).unwrap();
        let f = Field::from_real_fn(grid.clone(), |x| {
            (-x.iter().map(|c| c * c).sum::<f64>()).exp()
        });
        let t0 = Instant::now();
        let mut acc = 0.0;
        for _ in 0..100 {
            acc += grad_norm_sq(&f);
        }
        let t1 = t0.elapsed();
        let t0 = Instant::now();
        for _ in 0..100 {
            let l = laplacian(&f);
            acc += l.values()[0].re;
        }
        let t2 = t0.elapsed();
        println!("n={n} N={points}: grad_norm_sq x100 = {t1:.2?}, laplacian x100 = {t2:.2?}, {acc:.3}");
    }
}
