//! Feasibility of supplies under arc capacities via maximum flow.

use std::collections::VecDeque;

use super::{FlowProblem, UNBOUNDED};
use crate::error::Result;
use crate::tolerance;

const RESIDUAL_EPS: f64 = 1e-14;

/// Result of the super-source/super-sink max-flow computation.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityDiagnosis {
    /// Total supply that must be routed.
    pub required: f64,
    pub max_flow: f64,
    /// Nodes on the source side of a minimum cut (0-based). When the
    /// problem is infeasible, their net supply exceeds the capacity of the
    /// arcs leaving them.
    pub source_side: Vec<usize>,
}

impl FeasibilityDiagnosis {
    pub fn is_feasible(&self) -> bool {
        self.max_flow >= self.required - tolerance::CAPACITY
    }
}

struct Dinic {
    to: Vec<usize>,
    residual: Vec<f64>,
    adj: Vec<Vec<usize>>,
    level: Vec<usize>,
    next_arc: Vec<usize>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            to: Vec::new(),
            residual: Vec::new(),
            adj: vec![Vec::new(); n],
            level: vec![0; n],
            next_arc: vec![0; n],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize, capacity: f64) {
        let id = self.to.len();
        self.to.extend([to, from]);
        self.residual.extend([capacity.min(UNBOUNDED), 0.0]);
        self.adj[from].push(id);
        self.adj[to].push(id + 1);
    }

    fn bfs(&mut self, s: usize) {
        self.level.fill(usize::MAX);
        self.level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &e in &self.adj[u] {
                let v = self.to[e];
                if self.residual[e] > RESIDUAL_EPS && self.level[v] == usize::MAX {
                    self.level[v] = self.level[u] + 1;
                    queue.push_back(v);
                }
            }
        }
    }

    fn dfs(&mut self, u: usize, t: usize, limit: f64) -> f64 {
        if u == t {
            return limit;
        }
        while self.next_arc[u] < self.adj[u].len() {
            let e = self.adj[u][self.next_arc[u]];
            let v = self.to[e];
            if self.residual[e] > RESIDUAL_EPS && self.level[v] == self.level[u] + 1 {
                let pushed = self.dfs(v, t, limit.min(self.residual[e]));
                if pushed > 0.0 {
                    if self.residual[e] < UNBOUNDED {
                        self.residual[e] -= pushed;
                    }
                    self.residual[e ^ 1] += pushed;
                    return pushed;
                }
            }
            self.next_arc[u] += 1;
        }
        0.0
    }

    fn run(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            self.bfs(s);
            if self.level[t] == usize::MAX {
                return total;
            }
            self.next_arc.fill(0);
            loop {
                let pushed = self.dfs(s, t, f64::INFINITY);
                if pushed <= 0.0 {
                    break;
                }
                total += pushed;
            }
        }
    }
}

/// Max flow from a super-source (feeding supply nodes) to a super-sink
/// (drained by demand nodes), with the resulting minimum cut.
pub fn feasibility_diagnosis(problem: &FlowProblem) -> Result<FeasibilityDiagnosis> {
    problem.validate()?;
    let n = problem.node_count;
    let (s, t) = (n, n + 1);
    let mut dinic = Dinic::new(n + 2);
    for arc in &problem.arcs {
        dinic.add_arc(arc.from, arc.to, arc.capacity);
    }
    for (v, &b) in problem.supply.iter().enumerate() {
        if b > 0.0 {
            dinic.add_arc(s, v, b);
        } else if b < 0.0 {
            dinic.add_arc(v, t, -b);
        }
    }
    let max_flow = dinic.run(s, t);
    // After the final BFS, reachable nodes have a finite level.
    let source_side = (0..n).filter(|&v| dinic.level[v] != usize::MAX).collect();
    Ok(FeasibilityDiagnosis {
        required: problem.total_supply(),
        max_flow,
        source_side,
    })
}

/// True iff all supplies can be routed within the arc capacities.
pub fn check_flow_feasibility(problem: &FlowProblem) -> Result<bool> {
    Ok(feasibility_diagnosis(problem)?.is_feasible())
}

#[cfg(test)]
mod tests {
    use super::super::Arc;
    use super::*;

    #[test]
    fn bottleneck_cut() {
        let p = FlowProblem::new(vec![0.3, -0.3], vec![Arc::new(0, 1, 10.0, 0.2)]);
        let diag = feasibility_diagnosis(&p).unwrap();
        assert!(!diag.is_feasible());
        assert!((diag.max_flow - 0.2).abs() < 1e-15);
        assert_eq!(diag.source_side, vec![0]);
    }

    #[test]
    fn uncapacitated_strongly_connected_is_feasible() {
        let arcs = vec![
            Arc::uncapacitated(0, 1, 1.0),
            Arc::uncapacitated(1, 2, 1.0),
            Arc::uncapacitated(2, 0, 1.0),
        ];
        let p = FlowProblem::new(vec![-2.0, 0.5, 1.5], arcs);
        assert!(check_flow_feasibility(&p).unwrap());
    }

    #[test]
    fn zero_supplies_trivially_feasible() {
        let p = FlowProblem::new(vec![0.0, 0.0], vec![]);
        assert!(check_flow_feasibility(&p).unwrap());
    }
}
