//! Tunneling parameters of the reference barrier across energy.
//!
//! Prints T, R and the two phases J, F at a few wavenumbers, plus the
//! k-derivatives that the timing formulas consume.
//!
//! ```bash
//! cargo run --example tunneling_params
//! ```

use qsplit::scenario::Scenario;
use qsplit::transfer::ParamTable;
use qsplit::units::energy_of_k;

fn main() {
    let sc = Scenario::load("barrier_fig1").expect("bundled scenario");
    let pot = sc.potential().expect("validated");
    let ks: Vec<f64> = (1..=12).map(|i| 0.1 * i as f64).collect();
    let table = ParamTable::build(&pot, &ks, 1e-3).expect("derivative table");

    println!("barrier: {} eV over [{}, {}] nm, m = {} m_e", 0.3, pot.a, pot.b, pot.mass_me);
    println!(
        "{:>6} {:>9} {:>10} {:>10} {:>8} {:>8} {:>10} {:>10}",
        "k", "E_eV", "T", "R", "J", "F", "dT_dk", "dJ_dk"
    );
    for e in &table.entries {
        let p = &e.params;
        println!(
            "{:>6.2} {:>9.4} {:>10.5} {:>10.5} {:>8.4} {:>8.4} {:>10.4} {:>10.4}",
            p.k,
            energy_of_k(p.k, pot.mass_me),
            p.t,
            p.r,
            p.j,
            p.f,
            e.t_prime,
            e.j_prime,
        );
        assert!((p.t + p.r - 1.0).abs() < 1e-12, "flux conservation");
    }
    println!("\nT + R = 1 held to 1e-12 at every row.");
    println!("F stays pinned to 0 or pi for this mirror-symmetric profile.");
}
