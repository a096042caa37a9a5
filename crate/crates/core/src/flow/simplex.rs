//! Primal network simplex.
//!
//! Every node is hung from an artificial root by an uncapacitated arc whose
//! cost exceeds any simple path, so the starting tree is feasible and the
//! optimum routes as much supply as the real arcs allow. Pricing is a block
//! search over all arcs; the leaving arc is chosen so the tree stays strongly
//! feasible, which rules out cycling on degenerate pivots.

use super::{FlowProblem, FlowSolution, FlowStatus, UNBOUNDED};
use crate::error::{Error, Result};
use crate::tolerance;

const LOWER: i8 = 1;
const TREE: i8 = 0;
const UPPER: i8 = -1;

/// Relative pricing tolerance, scaled by the largest arc cost.
const REDUCED_COST_EPS: f64 = 1e-10;

struct Simplex {
    source: Vec<usize>,
    target: Vec<usize>,
    cost: Vec<f64>,
    cap: Vec<f64>,
    flow: Vec<f64>,
    state: Vec<i8>,
    parent: Vec<usize>,
    pred: Vec<usize>,
    /// Whether `pred[u]` points from `u` to its parent.
    up: Vec<bool>,
    depth: Vec<usize>,
    pi: Vec<f64>,
    children: Vec<Vec<usize>>,
    root: usize,
    block: usize,
    next_arc: usize,
    eps: f64,
}

impl Simplex {
    fn new(problem: &FlowProblem) -> Self {
        let n = problem.node_count;
        let m = problem.arcs.len();
        let root = n;
        let max_cost = problem.arcs.iter().map(|a| a.cost).fold(0.0, f64::max);
        let art_cost = (max_cost + 1.0) * (n as f64 + 1.0);

        let mut s = Simplex {
            source: Vec::with_capacity(m + n),
            target: Vec::with_capacity(m + n),
            cost: Vec::with_capacity(m + n),
            cap: Vec::with_capacity(m + n),
            flow: vec![0.0; m + n],
            state: vec![LOWER; m + n],
            parent: vec![root; n + 1],
            pred: vec![usize::MAX; n + 1],
            up: vec![true; n + 1],
            depth: vec![1; n + 1],
            pi: vec![0.0; n + 1],
            children: vec![Vec::new(); n + 1],
            root,
            block: ((m + n) as f64).sqrt().ceil().max(10.0) as usize,
            next_arc: 0,
            eps: REDUCED_COST_EPS * max_cost.max(1.0),
        };
        for a in &problem.arcs {
            s.source.push(a.from);
            s.target.push(a.to);
            s.cost.push(a.cost);
            s.cap.push(a.capacity);
        }
        for (u, &b) in problem.supply.iter().enumerate() {
            let e = m + u;
            if b >= 0.0 {
                s.source.push(u);
                s.target.push(root);
                s.cost.push(0.0);
                s.flow[e] = b;
            } else {
                s.source.push(root);
                s.target.push(u);
                s.cost.push(art_cost);
                s.flow[e] = -b;
                s.up[u] = false;
                s.pi[u] = art_cost;
            }
            s.cap.push(UNBOUNDED);
            s.state[e] = TREE;
            s.pred[u] = e;
            s.children[root].push(u);
        }
        s.depth[root] = 0;
        s
    }

    fn reduced_cost(&self, e: usize) -> f64 {
        self.cost[e] + self.pi[self.source[e]] - self.pi[self.target[e]]
    }

    fn residual(&self, e: usize) -> f64 {
        if self.cap[e] >= UNBOUNDED {
            f64::INFINITY
        } else {
            (self.cap[e] - self.flow[e]).max(0.0)
        }
    }

    fn find_entering(&mut self) -> Option<usize> {
        let total = self.source.len();
        let mut best = None;
        let mut best_violation = -self.eps;
        let mut e = self.next_arc;
        let mut scanned = 0;
        for _ in 0..total {
            let st = self.state[e];
            if st != TREE {
                let violation = f64::from(st) * self.reduced_cost(e);
                if violation < best_violation {
                    best_violation = violation;
                    best = Some(e);
                }
            }
            e += 1;
            if e == total {
                e = 0;
            }
            scanned += 1;
            if scanned == self.block {
                if best.is_some() {
                    break;
                }
                scanned = 0;
            }
        }
        self.next_arc = e;
        best
    }

    fn join(&self, mut a: usize, mut b: usize) -> usize {
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a];
            } else {
                b = self.parent[b];
            }
        }
        a
    }

    /// One pivot on entering arc `e_in`.
    fn pivot(&mut self, e_in: usize) -> Result<()> {
        let forward = self.state[e_in] == LOWER;
        let (first, second) = if forward {
            (self.source[e_in], self.target[e_in])
        } else {
            (self.target[e_in], self.source[e_in])
        };
        let join = self.join(first, second);

        // 0: the entering arc blocks; 1 or 2: the pred arc of `u_out` on the
        // first or second side.
        let mut delta = if forward {
            self.residual(e_in)
        } else {
            self.flow[e_in].max(0.0)
        };
        let mut side = 0;
        let mut u_out = usize::MAX;
        let mut u = first;
        while u != join {
            let e = self.pred[u];
            let d = if self.up[u] {
                self.flow[e].max(0.0)
            } else {
                self.residual(e)
            };
            if d < delta {
                delta = d;
                side = 1;
                u_out = u;
            }
            u = self.parent[u];
        }
        u = second;
        while u != join {
            let e = self.pred[u];
            let d = if self.up[u] {
                self.residual(e)
            } else {
                self.flow[e].max(0.0)
            };
            if d <= delta {
                delta = d;
                side = 2;
                u_out = u;
            }
            u = self.parent[u];
        }
        if delta.is_infinite() {
            return Err(Error::InvalidState(
                "min-cost flow is unbounded below".into(),
            ));
        }

        if delta > 0.0 {
            self.shift(e_in, if forward { delta } else { -delta });
            let mut u = first;
            while u != join {
                let e = self.pred[u];
                self.shift(e, if self.up[u] { -delta } else { delta });
                u = self.parent[u];
            }
            u = second;
            while u != join {
                let e = self.pred[u];
                self.shift(e, if self.up[u] { delta } else { -delta });
                u = self.parent[u];
            }
        }

        if side == 0 {
            if forward {
                self.flow[e_in] = self.cap[e_in];
                self.state[e_in] = UPPER;
            } else {
                self.flow[e_in] = 0.0;
                self.state[e_in] = LOWER;
            }
            return Ok(());
        }

        let e_out = self.pred[u_out];
        let at_zero = (side == 1) == self.up[u_out];
        if at_zero {
            self.flow[e_out] = 0.0;
            self.state[e_out] = LOWER;
        } else {
            self.flow[e_out] = self.cap[e_out];
            self.state[e_out] = UPPER;
        }
        self.state[e_in] = TREE;

        let (u_in, v_in) = if side == 1 {
            (first, second)
        } else {
            (second, first)
        };
        self.rehang(u_in, v_in, e_in, u_out);
        Ok(())
    }

    fn shift(&mut self, e: usize, by: f64) {
        let x = self.flow[e] + by;
        self.flow[e] = x.max(0.0).min(self.cap[e]);
    }

    /// Cuts the subtree at `u_out` and hangs it from `v_in` through `e_in`,
    /// re-rooting it at `u_in`.
    fn rehang(&mut self, u_in: usize, v_in: usize, e_in: usize, u_out: usize) {
        let mut v = u_in;
        let mut new_parent = v_in;
        let mut new_pred = e_in;
        loop {
            let old_parent = self.parent[v];
            let old_pred = self.pred[v];
            let siblings = &mut self.children[old_parent];
            if let Some(pos) = siblings.iter().position(|&c| c == v) {
                siblings.swap_remove(pos);
            }
            self.parent[v] = new_parent;
            self.pred[v] = new_pred;
            self.up[v] = self.source[new_pred] == v;
            self.children[new_parent].push(v);
            if v == u_out {
                break;
            }
            new_parent = v;
            new_pred = old_pred;
            v = old_parent;
        }

        let mut stack = vec![u_in];
        while let Some(x) = stack.pop() {
            let p = self.parent[x];
            let c = self.cost[self.pred[x]];
            self.depth[x] = self.depth[p] + 1;
            self.pi[x] = if self.up[x] {
                self.pi[p] - c
            } else {
                self.pi[p] + c
            };
            stack.extend_from_slice(&self.children[x]);
        }
    }
}

/// Solves a minimum-cost flow problem. Returns `Infeasible` status (not an
/// error) when the supplies cannot all be routed; the flow then routes as
/// much as possible at least cost.
pub fn solve_mcf(problem: &FlowProblem) -> Result<FlowSolution> {
    problem.validate()?;
    let m = problem.arcs.len();
    let mut sx = Simplex::new(problem);
    let max_pivots = 50 * (m + problem.node_count + 1) * (problem.node_count + 1);
    let mut pivots = 0;
    while let Some(e) = sx.find_entering() {
        sx.pivot(e)?;
        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::InvalidState(
                "network simplex exceeded its pivot limit".into(),
            ));
        }
    }

    let unrouted: f64 = (m..sx.source.len())
        .filter(|&e| sx.target[e] == sx.root)
        .map(|e| sx.flow[e])
        .sum();
    sx.flow.truncate(m);
    let objective = problem
        .arcs
        .iter()
        .zip(&sx.flow)
        .map(|(a, x)| a.cost * x)
        .sum();
    let status = if unrouted <= tolerance::CAPACITY {
        FlowStatus::Optimal
    } else {
        FlowStatus::Infeasible
    };
    Ok(FlowSolution {
        flow: sx.flow,
        objective,
        status,
    })
}
