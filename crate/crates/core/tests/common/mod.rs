#![allow(dead_code)]

use modrebal::{generate_instance, Arc, FlowProblem, GeneratorConfig, Matrix, StationNetwork};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Small random flow problem within the oracle's limits. Roughly a third use
/// small integers so that ties and degenerate bases show up.
pub fn random_flow_problem(seed: u64) -> FlowProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=6usize);
    let integral = rng.random_bool(0.35);
    let value = |rng: &mut ChaCha8Rng, hi: f64| {
        if integral {
            rng.random_range(0..=hi as u32) as f64
        } else {
            rng.random::<f64>() * hi
        }
    };

    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    pairs.shuffle(&mut rng);
    // Half of the problems get an expensive uncapacitated ring, which makes
    // them feasible.
    let ring: Vec<(usize, usize)> = if rng.random_bool(0.5) {
        (0..n).map(|i| (i, (i + 1) % n)).collect()
    } else {
        Vec::new()
    };
    pairs.retain(|e| !ring.contains(e));
    let room = 12 - ring.len();
    let least = usize::from(ring.is_empty());
    let m = rng.random_range(least..=pairs.len().min(room));
    let mut arcs: Vec<Arc> = ring
        .iter()
        .map(|&(i, j)| Arc::uncapacitated(i, j, 10.0 + value(&mut rng, 10.0)))
        .collect();
    let random_arcs: Vec<Arc> = pairs[..m]
        .iter()
        .map(|&(i, j)| {
            let cost = value(&mut rng, 10.0);
            if rng.random_bool(0.3) {
                Arc::uncapacitated(i, j, cost)
            } else {
                let cap = value(&mut rng, 3.0);
                Arc::new(i, j, cost, cap)
            }
        })
        .collect();
    arcs.extend(random_arcs);

    let mut supply: Vec<f64> = (0..n)
        .map(|_| {
            if integral {
                rng.random_range(-2..=2) as f64
            } else {
                rng.random_range(-1.0..1.0)
            }
        })
        .collect();
    let total: f64 = supply.iter().sum();
    if integral {
        supply[n - 1] -= total;
    } else {
        for b in &mut supply {
            *b -= total / n as f64;
        }
    }
    FlowProblem::new(supply, arcs)
}

/// Generated network with a random willingness matrix: a constant in
/// `[0, 1.5]` for even seeds, independent entries in `[0, 1.5]` otherwise.
pub fn random_willingness_network(seed: u64) -> StationNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.random_range(2..=10usize);
    let net = generate_instance(n, seed, &GeneratorConfig::default()).unwrap();
    let f = if seed.is_multiple_of(2) {
        Matrix::filled(n, rng.random::<f64>() * 1.5)
    } else {
        Matrix::from_fn(n, |_, _| rng.random::<f64>() * 1.5)
    };
    net.with_f(f).unwrap()
}

/// The hand-checked pair: station 1 loses 0.3 vehicles per unit time, station 2 gains them.
pub fn hand_pair(f12: f64) -> StationNetwork {
    StationNetwork::new(
        vec![0.4, 0.1],
        vec![0.8, 0.2],
        Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap(),
        Matrix::from_rows(vec![vec![0.0, 10.0], vec![10.0, 0.0]]).unwrap(),
        Matrix::from_rows(vec![vec![1.0, f12], vec![1.0, 1.0]]).unwrap(),
    )
    .unwrap()
}
