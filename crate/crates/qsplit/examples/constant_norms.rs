//! Channel norms over time: asymptotically constant, transiently not.
//!
//! The transmitted share computed from the spectrum alone equals the
//! late-time norm of the transmission piece. During the interaction
//! the transmission piece briefly holds extra weight under the
//! barrier; the reflection piece barely moves and the full norm
//! stays exactly one.
//!
//! ```bash
//! cargo run --example constant_norms
//! ```

use qsplit::observables::{channel_fraction, Weight};
use qsplit::scenario::Scenario;
use qsplit::spectral::{synthesize_with, SynthesisTable};
use qsplit::stationary::Channel;
use qsplit::transfer::ParamTable;

fn norm2(field: &[num_complex::Complex64], dx: f64) -> f64 {
    let n = field.len();
    field
        .iter()
        .enumerate()
        .map(|(i, v)| v.norm_sqr() * if i == 0 || i == n - 1 { 0.5 } else { 1.0 })
        .sum::<f64>()
        * dx
}

fn main() {
    let mut sc = Scenario::load("barrier_fig1").expect("bundled scenario");
    sc.grids.k.n = 1024;
    let pot = sc.potential().expect("validated");
    let grid = sc.kgrid().expect("k-grid");
    let packet = sc.spectrum(&grid).expect("spectrum");
    let table = SynthesisTable::build(&pot, &grid).expect("synthesis table");
    let ptable = ParamTable::build(&pot, &grid.points(), 1e-3).expect("params");

    let mean_t = channel_fraction(&ptable, Weight::T, &packet).unwrap();
    let mean_r = channel_fraction(&ptable, Weight::R, &packet).unwrap();
    println!("spectrum-weighted shares: <T>_in = {mean_t:.6}, <R>_in = {mean_r:.6}\n");

    let xs: Vec<f64> = (0..=3200).map(|i| -400.0 + 0.5 * i as f64).collect();
    println!("{:>6} {:>12} {:>12} {:>12}", "t_fs", "norm2_full", "norm2_tr", "norm2_ref");
    for t in [0.0, 100.0, 200.0, 300.0, 400.0, 500.0, 600.0] {
        let f = synthesize_with(&table, &packet, Channel::Full, t, &xs).unwrap();
        let tr = synthesize_with(&table, &packet, Channel::Tr, t, &xs).unwrap();
        let rf = synthesize_with(&table, &packet, Channel::Ref, t, &xs).unwrap();
        println!(
            "{:>6.0} {:>12.8} {:>12.8} {:>12.8}",
            t,
            norm2(&f, 0.5),
            norm2(&tr, 0.5),
            norm2(&rf, 0.5)
        );
    }
    println!("\nThe tr bump near 400 fs is real: the stationary pieces of the");
    println!("transmission channel are not mutually orthogonal across k, so");
    println!("its norm is conserved only once the packet clears the barrier.");
}
