//! JSON instance and assignment files.
//!
//! Instance file:
//!
//! ```json
//! { "n": 2, "lambda": [..], "mu": [..], "p": [[..],[..]], "T": [[..],[..]],
//!   "f": 1.0, "meta": { "seed": 7, "generator_config": { .. } } }
//! ```
//!
//! `f` may be a full matrix or a single number broadcast to every pair.
//! Assignment files hold `alpha`, `beta`, `v_alpha`, `r_alpha_beta`,
//! `objective_alpha` and `objective_beta`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{InstanceMeta, Matrix, RebalanceAssignment, StationNetwork};
use crate::error::{Error, Result};
use crate::rebalancer::RebalanceSolution;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Willingness {
    Scalar(f64),
    Matrix(Matrix),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    n: usize,
    lambda: Vec<f64>,
    mu: Vec<f64>,
    p: Matrix,
    #[serde(rename = "T")]
    travel_time: Matrix,
    f: Willingness,
    #[serde(default)]
    meta: InstanceMeta,
}

pub fn instance_to_json(net: &StationNetwork) -> Result<String> {
    let file = InstanceFile {
        n: net.n(),
        lambda: net.lambda().to_vec(),
        mu: net.mu().to_vec(),
        p: net.p().clone(),
        travel_time: net.travel_time().clone(),
        f: Willingness::Matrix(net.f().clone()),
        meta: net.meta().clone(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

pub fn instance_from_json(text: &str) -> Result<StationNetwork> {
    let file: InstanceFile = serde_json::from_str(text)?;
    let n = file.n;
    if file.lambda.len() != n {
        return Err(Error::validation(
            "lambda",
            format!("length {} does not match n = {n}", file.lambda.len()),
        ));
    }
    let f = match file.f {
        Willingness::Scalar(x) => Matrix::filled(n, x),
        Willingness::Matrix(m) => m,
    };
    let net = StationNetwork::new(file.lambda, file.mu, file.p, file.travel_time, f)?;
    Ok(net.with_meta(file.meta))
}

pub fn save_instance(net: &StationNetwork, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, instance_to_json(net)?)?;
    Ok(())
}

pub fn load_instance(path: impl AsRef<Path>) -> Result<StationNetwork> {
    instance_from_json(&fs::read_to_string(path)?)
}

/// On-disk form of a solved assignment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentFile {
    pub alpha: Matrix,
    pub beta: Matrix,
    pub v_alpha: f64,
    pub r_alpha_beta: f64,
    pub objective_alpha: f64,
    pub objective_beta: f64,
    #[serde(default)]
    pub meta: InstanceMeta,
}

impl AssignmentFile {
    pub fn from_solution(solution: &RebalanceSolution, meta: InstanceMeta) -> Self {
        AssignmentFile {
            alpha: solution.assignment.alpha.clone(),
            beta: solution.assignment.beta.clone(),
            v_alpha: solution.assignment.v_alpha,
            r_alpha_beta: solution.assignment.r_alpha_beta,
            objective_alpha: solution.objective_alpha,
            objective_beta: solution.objective_beta,
            meta,
        }
    }

    pub fn assignment(&self) -> RebalanceAssignment {
        RebalanceAssignment {
            alpha: self.alpha.clone(),
            beta: self.beta.clone(),
            v_alpha: self.v_alpha,
            r_alpha_beta: self.r_alpha_beta,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.alpha.dim() != self.beta.dim() {
            return Err(Error::validation(
                "beta",
                format!(
                    "dimension {} differs from alpha ({})",
                    self.beta.dim(),
                    self.alpha.dim()
                ),
            ));
        }
        for (name, m) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            for ((i, j), x) in m.iter() {
                if !x.is_finite() || x < 0.0 || (i == j && x != 0.0) {
                    return Err(Error::validation(
                        format!("{name}[{}][{}]", i + 1, j + 1),
                        format!("must be finite, nonnegative and zero on the diagonal, got {x}"),
                    ));
                }
            }
        }
        for (name, x) in [
            ("v_alpha", self.v_alpha),
            ("r_alpha_beta", self.r_alpha_beta),
            ("objective_alpha", self.objective_alpha),
            ("objective_beta", self.objective_beta),
        ] {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::validation(
                    name,
                    format!("must be finite and nonnegative, got {x}"),
                ));
            }
        }
        Ok(())
    }
}

pub fn save_assignment(file: &AssignmentFile, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(file)?)?;
    Ok(())
}

pub fn assignment_from_json(text: &str) -> Result<AssignmentFile> {
    let file: AssignmentFile = serde_json::from_str(text)?;
    file.validate()?;
    Ok(file)
}

pub fn load_assignment(path: impl AsRef<Path>) -> Result<AssignmentFile> {
    assignment_from_json(&fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_instance, GeneratorConfig};

    fn example_json(p_row: &str, mu: &str) -> String {
        format!(
            r#"{{"n": 3, "lambda": [0.1, 0.2, 0.3], "mu": {mu},
                "p": [[0, 0.5, 0.5], [0.5, 0, 0.5], {p_row}],
                "T": [[0, 1, 1], [1, 0, 1], [1, 1, 0]], "f": 1.0}}"#
        )
    }

    #[test]
    fn scalar_willingness_broadcasts() {
        let net = instance_from_json(&example_json("[0.5, 0.5, 0]", "[1, 1, 1]")).unwrap();
        assert_eq!(net.f(), &Matrix::filled(3, 1.0));
        assert_eq!(net.meta().seed, None);
    }

    #[test]
    fn bad_row_names_the_row() {
        let err = instance_from_json(&example_json("[0.45, 0.45, 0]", "[1, 1, 1]")).unwrap_err();
        assert!(err.to_string().contains("p row 3"), "{err}");
    }

    #[test]
    fn service_rate_equal_to_arrival_rate_rejected() {
        let err = instance_from_json(&example_json("[0.5, 0.5, 0]", "[1, 1, 0.3]")).unwrap_err();
        assert!(err.to_string().contains("mu[3]"), "{err}");
    }

    #[test]
    fn nan_and_negative_rejected() {
        let text = example_json("[0.5, 0.5, 0]", "[1, 1, 1]").replace("[0.1, 0.2, 0.3]", "[-0.1, 0.2, 0.3]");
        assert!(instance_from_json(&text).unwrap_err().to_string().contains("lambda[1]"));
        assert!(instance_from_json("{\"n\": 1, \"lambda\": [NaN]}").is_err());
    }

    #[test]
    fn generated_instance_round_trips() {
        let net = generate_instance(12, 5, &GeneratorConfig::default()).unwrap();
        let back = instance_from_json(&instance_to_json(&net).unwrap()).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn assignment_validation() {
        let good = r#"{"alpha": [[0, 0], [0.3, 0]], "beta": [[0, 0.3], [0, 0]],
            "v_alpha": 8.0, "r_alpha_beta": 6.0, "objective_alpha": 3.0, "objective_beta": 3.0}"#;
        let file = assignment_from_json(good).unwrap();
        assert_eq!(file.assignment().r_alpha_beta, 6.0);
        let bad = good.replace("[0.3, 0]", "[-0.3, 0]");
        assert!(assignment_from_json(&bad).unwrap_err().to_string().contains("alpha[2][1]"));
    }
}
