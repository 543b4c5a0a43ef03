//! One stationary scattering state split into its transmission and
//! reflection parts.
//!
//! The two pieces sum to the full state everywhere, the reflection
//! part vanishes right of the barrier midpoint, and each piece carries
//! the expected probability current.
//!
//! ```bash
//! cargo run --example stationary_split
//! ```

use qsplit::scenario::Scenario;
use qsplit::stationary::channel_states;
use qsplit::transfer::tunneling_params;
use qsplit::units::velocity_of_k;

fn main() {
    let sc = Scenario::load("barrier_fig1").expect("bundled scenario");
    let pot = sc.potential().expect("validated");
    let k = sc.k0();
    let params = tunneling_params(&pot, k).expect("transfer matrix");
    let states = channel_states(&params, &pot).expect("channel split");

    println!("k = {k:.6} 1/nm, T = {:.6}, R = {:.6}", params.t, params.r);
    println!("barrier midpoint x_mid = {} nm\n", pot.x_mid);

    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "x_nm", "|full|", "|tr|", "|ref|", "|full-(tr+ref)|");
    for x in [460.0, 495.0, 501.0, 502.5, 504.0, 510.0, 545.0] {
        let f = states.full.eval(x);
        let t = states.tr.eval(x);
        let r = states.rf.eval(x);
        println!(
            "{:>8.1} {:>12.6} {:>12.6} {:>12.6} {:>12.2e}",
            x,
            f.norm(),
            t.norm(),
            r.norm(),
            (f - t - r).norm()
        );
    }

    // currents: the reflection part is a standing wave, the
    // transmission part carries T times the incident current
    let v = velocity_of_k(k, pot.mass_me);
    println!("\nincident current       {:>12.6} nm/fs", v);
    println!("tr current at x = 450  {:>12.6} nm/fs", states.tr.flux_at(450.0));
    println!("tr current at x = 502  {:>12.6} nm/fs", states.tr.flux_at(502.5));
    println!("expected T * v         {:>12.6} nm/fs", params.t * v);
    println!("ref current at x = 450 {:>12.2e} nm/fs", states.rf.flux_at(450.0));
    println!("ref value at x_mid     {:>12.2e}", states.rf.eval(pot.x_mid).norm());
    println!("ref value right of mid {:>12.2e}", states.rf.eval(600.0).norm());
}
