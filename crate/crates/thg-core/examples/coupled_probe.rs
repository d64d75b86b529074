// Inspect the coupled bound state found at sigma = 3, mu = 9, n = 1.
use thg_core::functionals::{kinetic, mass, quartic_n};
use thg_core::grid::make_grid;
use thg_core::groundstate::solve_ground_state;
use thg_core::PhysParams;

fn main() {
    let grid = make_grid(1, 512, 16.0).unwrap();
    let p = PhysParams::new(1, 3.0, 9.0, 0.0).unwrap();
    let gs = solve_ground_state(&p, &grid, None, 1e-9, 20_000).unwrap();
    let m = mass(&gs.p, &gs.q, &p).unwrap();
    let k = kinetic(&gs.p, &gs.q).unwrap();
    let n = quartic_n(&gs.p, &gs.q).unwrap();
    let s = gs.action;
    let p_peak = gs.p.values().iter().map(|v| v.re.abs()).fold(0.0f64, f64::max);
    let q_peak = gs.q.values().iter().map(|v| v.re.abs()).fold(0.0f64, f64::max);
    println!("S = {s:.9}  (semitrivial reference: 4.0)");
    println!("resid = {:.3e}, |tau| = {:.3e}", gs.equation_residual, gs.nehari_residual);
    println!("pohozaev = ({:.3e}, {:.3e}, {:.3e})", gs.pohozaev.0, gs.pohozaev.1, gs.pohozaev.2);
    println!("P peak = {p_peak:.6}, Q peak = {q_peak:.6}");
    println!("Lemma 3.4 checks: N/S = {:.9}, K/(nS) = {:.9}, K(4-n)/(nM) = {:.9}",
        n / s, k / s, k * 3.0 / m);
}
