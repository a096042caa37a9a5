use std::time::Instant;

use modrebal::model::{compute_imbalance, generate_instance};
use modrebal::rebalancer::{solve_alpha, solve_beta};

fn main() {
    for n in [10usize, 25, 50, 100, 200] {
        let net = generate_instance(n, 1, &Default::default()).unwrap();
        let d = compute_imbalance(&net);
        let t = Instant::now();
        let (_, oa) = solve_alpha(&net, &d).unwrap();
        let ta = t.elapsed();
        let t = Instant::now();
        let (_, ob) = solve_beta(&net, &d).unwrap();
        println!("n={n} alpha {ta:.2?} ({oa:.3}) beta {:.2?} ({ob:.3})", t.elapsed());
    }
}
