// MC check of the archimedean density in the original chart:
// omega = 2 * int_{x0,x4 in (0,1], |x2|<=1, constraints} dx0 dx2 dx4 / (x0 x4)
// with x1 = x2^2/x0 <= 1 and |x3| = x2^2|x2+x0|/(x0 x4) <= 1.
// Importance-sample x0 = u^2, x4 = v^2 to tame the 1/(x0 x4) singularity:
// dx0/x0 = 2 du/u * u^2/u^2 ... du: dx0 = 2u du, 1/x0 = 1/u^2 -> 2/u du.
fn main() {
    let mut state = 0x12345678u64;
    let mut next = move || {
        state ^= state << 13; state ^= state >> 7; state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let n = 40_000_000u64;
    let mut acc = 0.0f64;
    for _ in 0..n {
        let u = next(); // x0 = u^2
        let v = next(); // x4 = v^2
        let x2 = 2.0 * next() - 1.0;
        let x0 = u * u;
        let x4 = v * v;
        if x0 == 0.0 || x4 == 0.0 { continue; }
        let x1 = x2 * x2 / x0;
        if x1 > 1.0 { continue; }
        let x3 = x2 * x2 * (x2 + x0).abs() / (x0 * x4);
        if x3 > 1.0 { continue; }
        // weight: dx0 dx4 / (x0 x4) = (2u du)(2v dv)/(u^2 v^2) = 4/(u v) du dv
        acc += 4.0 / (u * v);
    }
    // sample box volume for (u, v, x2) is 1*1*2 = 2
    let omega = 2.0 * acc / n as f64 * 2.0;
    println!("MC omega_inf(V1) ~ {omega:.4} (vs quadrature 30.5049)");
}
