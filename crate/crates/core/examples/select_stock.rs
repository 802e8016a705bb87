//! Scans random-potential seeds for the two ground-state classes used by
//! the stock pair: a strongly trapped state (one microwell holds almost all
//! of the density) whose reflected-and-weakened partner delocalizes over
//! two microwells. Run with `--dump <dir>` to write the stock .pot files.
//!
//!     cargo run --release --example select_stock -- [max_seed] [--dump DIR]

use std::path::Path;

use adiab::eigen::{build_hamiltonian, lowest_eigenpairs};
use adiab::grid::{density_of, Grid};
use adiab::potential::{
    generate_random, stock_ho, stock_r1, stock_r2, PotentialSpec, STOCK_SEED,
};

/// Integrated density per basin, where basins are delimited by local maxima
/// of the static potential (the microwell barriers). Sorted descending.
fn basin_masses(spec: &PotentialSpec, grid: Grid) -> Vec<f64> {
    let v = spec.evaluate_static(grid).unwrap();
    let h = build_hamiltonian(spec, grid, 0.0).unwrap();
    let sol = lowest_eigenpairs(&h, 1).unwrap();
    let density = density_of(&sol.states[0]);
    let n = grid.n_points();

    let mut cuts = vec![0];
    for i in 1..n - 1 {
        if v[i] > v[i - 1] && v[i] > v[i + 1] {
            cuts.push(i);
        }
    }
    cuts.push(n - 1);

    let dx = grid.dx();
    let mut masses: Vec<f64> = cuts
        .windows(2)
        .map(|w| density.values()[w[0]..=w[1]].iter().sum::<f64>() * dx)
        .collect();
    masses.sort_by(|a, b| b.partial_cmp(a).unwrap());
    masses
}

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    if let Some(pos) = args.iter().position(|a| a == "--dump") {
        let dir = Path::new(args.get(pos + 1).map(String::as_str).unwrap_or("data"));
        std::fs::create_dir_all(dir).unwrap();
        stock_ho().save(&dir.join("ho.pot")).unwrap();
        stock_r1().save(&dir.join("r1.pot")).unwrap();
        stock_r2().save(&dir.join("r2.pot")).unwrap();
        println!("wrote ho.pot, r1.pot, r2.pot to {}", dir.display());
        return;
    }

    let max_seed: u64 = args
        .first()
        .and_then(|a| a.parse().ok())
        .unwrap_or(500);
    let grid = Grid::default_box();

    println!("seed  r1_top_basin  r2_basin_1  r2_basin_2");
    for seed in 0..=max_seed {
        let r1 = generate_random(seed, 0.5, 15.0).unwrap();
        let r2 = r1.reflect_and_scale(5.0).unwrap();
        let m1 = basin_masses(&r1, grid);
        let m2 = basin_masses(&r2, grid);
        let trapped = m1[0] > 0.99;
        let split = m2.len() >= 2 && m2[1] > 0.2 && m2[0] < 0.8;
        if trapped && split {
            let mark = if seed == STOCK_SEED { "  <- stock" } else { "" };
            println!(
                "{seed:4}  {:.6}      {:.6}    {:.6}{mark}",
                m1[0], m2[0], m2[1]
            );
        }
    }
}
