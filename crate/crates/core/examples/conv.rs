use dp4_core::peyre;
fn main() {
    for tol in [1e-2, 1e-3, 1e-4, 1e-5] {
        let q = peyre::omega_infinity_v1(tol);
        println!("omega abs_tol={tol:.0e}: {:.9} +- {:.2e}", q.value, q.error);
    }
    for tol in [1e-2, 1e-3, 1e-4] {
        let a = peyre::tau_infinity_a(tol);
        let b = peyre::tau_infinity_b(tol);
        println!("tau abs_tol={tol:.0e}: a={:.9}+-{:.2e}  b={:.9}+-{:.2e}  diff={:.2e}", a.value, a.error, b.value, b.error, (a.value-b.value).abs());
    }
}
