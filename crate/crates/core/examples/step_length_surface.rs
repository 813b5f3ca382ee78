//! Step length over a grid of step frequency and standing height, for
//! typically developing children and with the DMD adjustment.
//!
//! ```text
//! cargo run --example step_length_surface
//! ```

use gaitfft::step_length::{surface_grid, StepLengthModel};

fn main() {
    let n = 6;
    for dmd in [false, true] {
        let grid = surface_grid((0.5, 3.5), (0.9, 1.9), n, dmd).expect("inside model domain");
        println!("{}", if dmd { "DMD" } else { "TD" });
        print!("  sf \\ h ");
        for p in &grid[..n] {
            print!("{:>8.2}", p.h);
        }
        println!();
        for row in grid.chunks(n) {
            print!("  {:6.2} ", row[0].sf);
            for p in row {
                print!("{:>8.3}", p.step_length_m);
            }
            println!();
        }
    }

    let m = StepLengthModel::PUBLISHED;
    println!(
        "DMD adjustment at sf = 2, h = 1.3: {:+.4} m",
        m.dmd_term(2.0, 1.3)
    );
}
