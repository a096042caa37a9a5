//! Independent checks for small flow problems: exhaustive enumeration of
//! basic solutions, and negative-cycle detection in the residual graph.

use super::{FlowProblem, FlowSolution, FlowStatus};
use crate::error::{Error, Result};

pub const ORACLE_MAX_NODES: usize = 6;
pub const ORACLE_MAX_ARCS: usize = 12;

const FEAS_TOL: f64 = 1e-9;

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

fn component_count(n: usize, problem: &FlowProblem) -> usize {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut count = n;
    for arc in &problem.arcs {
        let (a, b) = (find(&mut parent, arc.from), find(&mut parent, arc.to));
        if a != b {
            parent[a] = b;
            count -= 1;
        }
    }
    count
}

/// Calls `visit` with every `k`-subset of `0..m` as a bitmask.
fn for_each_subset(m: usize, k: usize, visit: &mut impl FnMut(u32)) {
    for mask in 0u32..(1u32 << m) {
        if mask.count_ones() as usize == k {
            visit(mask);
        }
    }
}

/// Solves for the flows on a forest given the node requirements.
/// Returns `None` if the requirements are inconsistent.
fn forest_flows(
    n: usize,
    problem: &FlowProblem,
    tree: &[usize],
    mut need: Vec<f64>,
) -> Option<Vec<(usize, f64)>> {
    let mut degree = vec![0usize; n];
    for &a in tree {
        degree[problem.arcs[a].from] += 1;
        degree[problem.arcs[a].to] += 1;
    }
    let mut used = vec![false; tree.len()];
    let mut flows = Vec::with_capacity(tree.len());
    let mut remaining = tree.len();
    while remaining > 0 {
        let leaf = (0..n).find(|&v| degree[v] == 1)?;
        let k = (0..tree.len()).find(|&k| {
            let arc = &problem.arcs[tree[k]];
            !used[k] && (arc.from == leaf || arc.to == leaf)
        })?;
        let arc = &problem.arcs[tree[k]];
        // need[v] is the net outflow v still has to produce.
        let (x, other) = if arc.from == leaf {
            (need[leaf], arc.to)
        } else {
            (-need[leaf], arc.from)
        };
        if arc.from == leaf {
            need[other] += x;
        } else {
            need[other] -= x;
        }
        need[leaf] = 0.0;
        used[k] = true;
        degree[leaf] -= 1;
        degree[other] -= 1;
        remaining -= 1;
        flows.push((tree[k], x));
    }
    if need.iter().any(|r| r.abs() > FEAS_TOL) {
        return None;
    }
    Some(flows)
}

/// Exact optimum by enumerating every basic solution: a spanning forest of
/// free arcs, with each remaining arc at zero or at its capacity.
///
/// Limited to [`ORACLE_MAX_NODES`] nodes and [`ORACLE_MAX_ARCS`] arcs.
pub fn brute_force_mcf(problem: &FlowProblem) -> Result<FlowSolution> {
    problem.validate()?;
    let n = problem.node_count;
    let m = problem.arcs.len();
    if n > ORACLE_MAX_NODES || m > ORACLE_MAX_ARCS {
        return Err(Error::SizeLimit(format!(
            "oracle supports at most {ORACLE_MAX_NODES} nodes and {ORACLE_MAX_ARCS} arcs, got {n} and {m}"
        )));
    }
    let tree_size = n - component_count(n, problem);
    let mut best: Option<(f64, Vec<f64>)> = None;

    for_each_subset(m, tree_size, &mut |tree_mask| {
        let tree: Vec<usize> = (0..m).filter(|&a| tree_mask & (1 << a) != 0).collect();
        let mut parent: Vec<usize> = (0..n).collect();
        for &a in &tree {
            let (x, y) = (
                find(&mut parent, problem.arcs[a].from),
                find(&mut parent, problem.arcs[a].to),
            );
            if x == y {
                return;
            }
            parent[x] = y;
        }
        let bounded: Vec<usize> = (0..m)
            .filter(|&a| tree_mask & (1 << a) == 0 && !problem.arcs[a].is_unbounded())
            .collect();
        for at_cap in 0u32..(1u32 << bounded.len()) {
            let mut flow = vec![0.0; m];
            let mut need = problem.supply.clone();
            for (k, &a) in bounded.iter().enumerate() {
                if at_cap & (1 << k) != 0 {
                    let arc = &problem.arcs[a];
                    flow[a] = arc.capacity;
                    need[arc.from] -= arc.capacity;
                    need[arc.to] += arc.capacity;
                }
            }
            let Some(tree_flows) = forest_flows(n, problem, &tree, need) else {
                continue;
            };
            let mut ok = true;
            for (a, x) in tree_flows {
                let arc = &problem.arcs[a];
                if x < -FEAS_TOL || (!arc.is_unbounded() && x > arc.capacity + FEAS_TOL) {
                    ok = false;
                    break;
                }
                flow[a] = x.max(0.0);
            }
            if !ok {
                continue;
            }
            let cost: f64 = problem.arcs.iter().zip(&flow).map(|(a, x)| a.cost * x).sum();
            if best.as_ref().is_none_or(|(c, _)| cost < *c) {
                best = Some((cost, flow));
            }
        }
    });

    Ok(match best {
        Some((objective, flow)) => FlowSolution {
            flow,
            objective,
            status: FlowStatus::Optimal,
        },
        None => FlowSolution {
            flow: vec![0.0; m],
            objective: 0.0,
            status: FlowStatus::Infeasible,
        },
    })
}

/// Bellman-Ford over the residual graph of `flow`. A cycle of total
/// reduced cost below `-1e-8` means `flow` is not cost-optimal.
pub fn has_negative_residual_cycle(problem: &FlowProblem, flow: &[f64]) -> bool {
    const RESIDUAL_TOL: f64 = 1e-9;
    const IMPROVE_TOL: f64 = 1e-8;
    let mut edges = Vec::new();
    for (arc, &x) in problem.arcs.iter().zip(flow) {
        if arc.is_unbounded() || arc.capacity - x > RESIDUAL_TOL {
            edges.push((arc.from, arc.to, arc.cost));
        }
        if x > RESIDUAL_TOL {
            edges.push((arc.to, arc.from, -arc.cost));
        }
    }
    let n = problem.node_count;
    let mut dist = vec![0.0; n];
    for round in 0..=n {
        let mut changed = false;
        for &(u, v, c) in &edges {
            if dist[u] + c < dist[v] - IMPROVE_TOL {
                dist[v] = dist[u] + c;
                changed = true;
            }
        }
        if !changed {
            return false;
        }
        if round == n {
            return true;
        }
    }
    false
}
