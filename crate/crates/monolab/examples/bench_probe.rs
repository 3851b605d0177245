use monolab::chains;
use monolab::geometry::{DensityDomain, RngStream};
use std::time::Instant;

fn main() {
    let n = 100_000usize;
    let dom = DensityDomain::unit_square();
    let t0 = Instant::now();
    let ps = dom.sample_fixed(n, &RngStream::new(1, 0)).unwrap();
    println!("sample {n}: {:?}", t0.elapsed());

    let t0 = Instant::now();
    let shape = chains::rsk_shape(&ps);
    println!("rsk full shape: {:?} (cols {})", t0.elapsed(), shape.columns().len());

    let k = (1.0 * (n as f64).sqrt()).floor() as usize;
    let t0 = Instant::now();
    let cover = chains::max_k_decreasing(&ps, k).unwrap();
    println!(
        "flow k={k}: {:?} (|P| = {}, greene = {})",
        t0.elapsed(),
        cover.subset.len(),
        chains::greene_sum(&shape, k)
    );

    let t0 = Instant::now();
    let (l, _) = chains::lis(&ps);
    println!("lis: {:?} ({l})", t0.elapsed());

    // criterion 3 scale
    let n6 = 1_000_000usize;
    let t0 = Instant::now();
    let ps6 = dom.sample_fixed(n6, &RngStream::new(2, 0)).unwrap();
    println!("sample 1e6: {:?}", t0.elapsed());
    let t0 = Instant::now();
    let (l6, _) = chains::lds(&ps6);
    println!("lds 1e6: {:?} ({}, scaled {})", t0.elapsed(), l6, l6 as f64 / 1000.0);
}
