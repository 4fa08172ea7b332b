//! Throwaway diagnostic: spectrum measurements for generator tuning.
use omega_core::generators::*;
use omega_core::neighbors::{NeighborKind, Tolerances};
use omega_core::spectrum::*;
use omega_core::Parallelism;

fn dump(label: &str, g: &TorusGrid, kind: NeighborKind) {
    let s = spectrum_of(g, kind).expect("spectrum");
    println!(
        "{label} {kind:?}: measure {:.4}, distinct(0.01) {}, intervals {:?}",
        s.measure,
        distinct_distances(&s, 0.01).expect("distinct"),
        s.intervals
            .iter()
            .map(|&(a, b)| (((a * 1000.0).round()) / 1000.0, ((b * 1000.0).round()) / 1000.0))
            .collect::<Vec<_>>()
    );
}

fn main() {
    let e1 = gen_example1(2048, 0.35, 0.05).expect("example1");
    let tol = Tolerances::for_loop(&e1);
    for n in [256usize, 512] {
        let g = classify_grid(&e1, n, &tol, None, Parallelism::Sequential).expect("grid");
        dump(&format!("example1@{n}"), &g, NeighborKind::Spherical);
    }
    let q = 4usize;
    let k = gen_torusknot(2048, q, default_red_total(q)).expect("knot");
    let tol = Tolerances::for_loop(&k);
    for n in [256usize, 512] {
        let g = classify_grid(&k, n, &tol, None, Parallelism::Sequential).expect("grid");
        dump(&format!("knot q={q}@{n}"), &g, NeighborKind::Spherical);
        if n == 512 {
            dump(&format!("knot q={q}@{n}"), &g, NeighborKind::Visual);
            println!(
                "bands(q=4) = {}",
                red_band_count(&g, NeighborKind::Visual, q).expect("bands")
            );
        }
    }
}
