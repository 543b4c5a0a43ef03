//! A Gaussian packet hitting the reference barrier, decomposed into
//! the to-be-transmitted and to-be-reflected pieces at three times.
//!
//! Reproduces the content of the bundled barrier scenario with a
//! lighter k-grid: per-channel norms, centers, and the pointwise
//! decomposition error.
//!
//! ```bash
//! cargo run --example packet_through_barrier
//! ```

use qsplit::observables::moments_x;
use qsplit::scenario::Scenario;
use qsplit::spectral::{synthesize_with, SynthesisTable};
use qsplit::stationary::Channel;

fn main() {
    let mut sc = Scenario::load("barrier_fig1").expect("bundled scenario");
    sc.grids.k.n = 1024; // plenty for summary numbers
    let pot = sc.potential().expect("validated");
    let grid = sc.kgrid().expect("k-grid");
    let packet = sc.spectrum(&grid).expect("spectrum");
    let table = SynthesisTable::build(&pot, &grid).expect("synthesis table");
    let xs: Vec<f64> = (0..=3200).map(|i| -400.0 + 0.5 * i as f64).collect();

    for t_fs in [0.0, 400.0, 420.0] {
        let full = synthesize_with(&table, &packet, Channel::Full, t_fs, &xs).unwrap();
        let tr = synthesize_with(&table, &packet, Channel::Tr, t_fs, &xs).unwrap();
        let rf = synthesize_with(&table, &packet, Channel::Ref, t_fs, &xs).unwrap();

        let gap = (0..xs.len())
            .map(|i| (full[i] - tr[i] - rf[i]).norm())
            .fold(0.0, f64::max);
        println!("t = {t_fs} fs  (decomposition gap {gap:.2e})");
        for (name, field) in [("full", &full), ("tr", &tr), ("ref", &rf)] {
            let m = moments_x(&xs, field, pot.mass_me).unwrap();
            println!(
                "  {:<5} norm2 {:>9.6}  <x> {:>8.2} nm  sigma_x {:>6.2} nm  <k> {:>7.4}",
                name,
                m.norm2,
                m.mean_x,
                m.var_x.sqrt(),
                m.mean_k
            );
        }
    }
    println!("\nThe barrier sits at [500, 505] nm; by 420 fs the two pieces");
    println!("have separated and their centers move ballistically.");
}
