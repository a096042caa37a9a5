use super::{ImbalanceVector, StationNetwork};
use crate::error::{Error, Result};
use crate::tolerance;

/// Largest network accepted by [`check_feasibility_bruteforce`].
pub const BRUTE_FORCE_MAX_STATIONS: usize = 20;

/// Outcome of the subset-enumeration feasibility test.
#[derive(Debug, Clone, PartialEq)]
pub enum CutFeasibility {
    Feasible,
    /// A station set `S` (0-based) whose driver deficit `-sum_{i in S} D_i`
    /// exceeds the taxi capacity leaving it.
    Violated {
        stations: Vec<usize>,
        deficit: f64,
        cut_capacity: f64,
    },
}

impl CutFeasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, CutFeasibility::Feasible)
    }
}

/// Enumerates all `2^n` station subsets `S` and checks
/// `-sum_{i in S} D_i <= sum_{i in S, j not in S} f_ij lambda_i p_ij`.
///
/// Returns the first violating subset in bitmask order.
pub fn check_feasibility_bruteforce(
    net: &StationNetwork,
    d: &ImbalanceVector,
) -> Result<CutFeasibility> {
    let n = net.n();
    if n > BRUTE_FORCE_MAX_STATIONS {
        return Err(Error::SizeLimit(format!(
            "subset enumeration supports at most {BRUTE_FORCE_MAX_STATIONS} stations, got {n}"
        )));
    }
    if d.len() != n {
        return Err(Error::InvalidInput(format!(
            "imbalance has {} entries for {n} stations",
            d.len()
        )));
    }
    for mask in 1u32..(1u32 << n) {
        let inside = |i: usize| mask & (1 << i) != 0;
        let deficit = d.deficit_of((0..n).filter(|&i| inside(i)));
        let mut cut_capacity = 0.0;
        for i in (0..n).filter(|&i| inside(i)) {
            for j in (0..n).filter(|&j| !inside(j)) {
                cut_capacity += net.taxi_capacity(i, j);
            }
        }
        if deficit > cut_capacity + tolerance::CAPACITY {
            return Ok(CutFeasibility::Violated {
                stations: (0..n).filter(|&i| inside(i)).collect(),
                deficit,
                cut_capacity,
            });
        }
    }
    Ok(CutFeasibility::Feasible)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{compute_imbalance, Matrix};

    fn example(f01: f64) -> StationNetwork {
        let p = Matrix::from_rows(vec![vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let t = Matrix::from_rows(vec![vec![0.0, 10.0], vec![10.0, 0.0]]).unwrap();
        let mut f = Matrix::filled(2, 1.0);
        f[(0, 1)] = f01;
        StationNetwork::new(vec![0.4, 0.1], vec![0.8, 0.2], p, t, f).unwrap()
    }

    #[test]
    fn unit_willingness_is_feasible() {
        let net = example(1.0);
        let d = compute_imbalance(&net);
        assert!(check_feasibility_bruteforce(&net, &d).unwrap().is_feasible());
    }

    #[test]
    fn half_willingness_violates_first_station() {
        let net = example(0.5);
        let d = compute_imbalance(&net);
        match check_feasibility_bruteforce(&net, &d).unwrap() {
            CutFeasibility::Violated {
                stations,
                deficit,
                cut_capacity,
            } => {
                assert_eq!(stations, vec![0]);
                assert!((deficit - 0.3).abs() < 1e-12);
                assert!((cut_capacity - 0.2).abs() < 1e-12);
            }
            other => panic!("expected violation, got {other:?}"),
        }
    }

    #[test]
    fn size_limit() {
        let n = 21;
        let p = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { 1.0 / (n - 1) as f64 });
        let t = Matrix::from_fn(n, |i, j| if i == j { 0.0 } else { 1.0 });
        let net =
            StationNetwork::new(vec![0.0; n], vec![1.0; n], p, t, Matrix::filled(n, 1.0)).unwrap();
        let d = compute_imbalance(&net);
        assert!(matches!(
            check_feasibility_bruteforce(&net, &d),
            Err(Error::SizeLimit(_))
        ));
    }
}
