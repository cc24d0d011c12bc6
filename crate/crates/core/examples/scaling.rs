//! Timing probe for the heavy computations, used to size the test suite.

use dp4_core::surfaces::SurfaceId;
use dp4_core::{oracle, peyre, torsor};
use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let mode = args.get(1).map(String::as_str).unwrap_or("all");

    if mode == "all" || mode == "torsor" {
        for b in [500u64, 10_000, 100_000, 1_000_000] {
            for surface in SurfaceId::BOTH {
                let t = Instant::now();
                let hist = torsor::count_histogram(surface, b).unwrap();
                let n: u64 = hist.iter().sum();
                println!("torsor {surface} B={b}: N={n} in {:?}", t.elapsed());
            }
        }
    }
    if mode == "all" || mode == "oracle" {
        for b in [500u64, 1_000, 10_000] {
            for surface in SurfaceId::BOTH {
                let t = Instant::now();
                let hist = oracle::parametrized_histogram(surface, b).unwrap();
                let n: u64 = hist.iter().sum();
                println!("oracle {surface} B={b}: N={n} in {:?}", t.elapsed());
            }
        }
        let t = Instant::now();
        let h = oracle::full_scan_histogram(SurfaceId::V1, 60).unwrap();
        println!("full scan V1 B=60: N={} in {:?}", h.iter().sum::<u64>(), t.elapsed());
        let t = Instant::now();
        let h = oracle::full_scan_histogram(SurfaceId::V2, 60).unwrap();
        println!("full scan V2 B=60: N={} in {:?}", h.iter().sum::<u64>(), t.elapsed());
    }
    if mode == "all" || mode == "peyre" {
        let t = Instant::now();
        let q = peyre::omega_infinity_v1(1e-3);
        println!("omega_inf V1 = {} +- {} in {:?}", q.value, q.error, t.elapsed());
        let t = Instant::now();
        let a = peyre::tau_infinity_a(1e-3);
        println!("tau_a = {} +- {} in {:?}", a.value, a.error, t.elapsed());
        let t = Instant::now();
        let b = peyre::tau_infinity_b(1e-3);
        println!("tau_b = {} +- {} in {:?}", b.value, b.error, t.elapsed());
        for surface in SurfaceId::BOTH {
            let t = Instant::now();
            let p = peyre::peyre_constant(surface, 1e-3).unwrap();
            println!(
                "peyre {surface}: c={} err={} omega={} euler={} in {:?}",
                p.c, p.c_error, p.omega_infinity, p.euler_product, t.elapsed()
            );
        }
    }
}
