//! Effective width and starting point across wavenumber, closed form
//! against finite differences.
//!
//! Below the barrier top the effective width saturates at 2/kappa
//! (independent of the true width d); far above it approaches d. The
//! spike potential has zero effective width at every k.
//!
//! ```bash
//! cargo run --example effective_width_sweep
//! ```

use qsplit::potential::{DeltaSpike, PotentialSpec, Segment};
use qsplit::timing::{delta_xstart, deff_xstart_sweep, rect_deff_xstart};
use qsplit::units::hbar2_over_2m;

fn main() {
    let mass = 0.067;
    let (v0, d) = (0.3, 5.0);
    let pot = PotentialSpec {
        a_nm: Some(500.0),
        b_nm: Some(505.0),
        segments: Some(vec![Segment { width_nm: d, v0_ev: v0 }]),
        delta: None,
        mass_me: mass,
    }
    .validate()
    .expect("barrier");

    let kappa0 = (v0 / hbar2_over_2m(mass)).sqrt();
    println!("rectangular barrier, kappa0 = {kappa0:.4} 1/nm\n");
    println!(
        "{:>7} {:>12} {:>12} {:>11} {:>12} {:>12}",
        "k", "d_eff_fd", "d_eff_cf", "gap", "x_start_cf", "deff-d"
    );
    let ks: Vec<f64> = [0.25, 0.5, 0.75, 0.95, 1.2, 2.0, 4.0, 10.0, 20.0]
        .iter()
        .map(|f| f * kappa0)
        .collect();
    let swept = deff_xstart_sweep(&pot, &ks, 1e-3).expect("sweep");
    for (k, d_fd, _xs_fd) in swept {
        let (d_cf, xs_cf) = rect_deff_xstart(v0, d, mass, k);
        println!(
            "{:>7.3} {:>12.5} {:>12.5} {:>11.2e} {:>12.5} {:>12.5}",
            k,
            d_fd,
            d_cf,
            (d_fd - d_cf).abs(),
            xs_cf,
            d_cf - d
        );
    }

    // the opaque limit: kappa*d = 15 makes d_eff forget d entirely.
    // needs a wide barrier, since kappa cannot exceed kappa0
    let d_wide = 25.0;
    let kappa_target = 15.0 / d_wide;
    let k_deep = (kappa0 * kappa0 - kappa_target * kappa_target).sqrt();
    let (d_opaque, _) = rect_deff_xstart(v0, d_wide, mass, k_deep);
    println!(
        "\nopaque limit, width {d_wide} nm at kappa*d = 15: d_eff = {:.5} nm vs 2/kappa = {:.5} nm",
        d_opaque,
        2.0 / kappa_target
    );

    let spike = PotentialSpec {
        a_nm: None,
        b_nm: None,
        segments: None,
        delta: Some(DeltaSpike { x_nm: 500.0, w_ev_nm: 1.5 }),
        mass_me: mass,
    }
    .validate()
    .expect("spike");
    let rows = deff_xstart_sweep(&spike, &[0.3, 0.6, 1.2], 1e-3).expect("spike sweep");
    println!("\nspike of strength 1.5 eV nm:");
    for (k, d_eff, x_start) in rows {
        println!(
            "  k {:>4.1}: d_eff = {:>9.2e} nm, x_start = {:>9.5} nm (closed form {:>9.5})",
            k,
            d_eff,
            x_start,
            delta_xstart(1.5, mass, k)
        );
    }
}
