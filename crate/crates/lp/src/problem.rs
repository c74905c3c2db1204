/// Direction of a linear constraint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    /// `coeffs · x >= rhs`
    Ge,
    /// `coeffs · x == rhs`
    Eq,
}

/// One linear constraint row.
#[derive(Debug, Clone)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// A minimization problem: `min objective · x` subject to constraint rows
/// and optional per-variable bounds. Variables are free unless bounded.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub constraints: Vec<Constraint>,
    /// Per-variable `(lower, upper)`; `None` means unbounded on that side.
    pub bounds: Vec<(Option<f64>, Option<f64>)>,
}

impl LpProblem {
    /// Minimize `objective · x` over free variables; constraints added after.
    pub fn minimize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            objective,
            constraints: Vec::new(),
            bounds: vec![(None, None); n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn add_ge(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Ge,
            rhs,
        });
    }

    pub fn add_eq(&mut self, coeffs: Vec<f64>, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation: Relation::Eq,
            rhs,
        });
    }

    pub fn set_lower_bound(&mut self, var: usize, lower: f64) {
        self.bounds[var].0 = Some(lower);
    }

    pub fn set_upper_bound(&mut self, var: usize, upper: f64) {
        self.bounds[var].1 = Some(upper);
    }

    /// Structural validation; returns a description of the first defect.
    pub(crate) fn validate(&self) -> Result<(), String> {
        let n = self.num_vars();
        if n == 0 {
            return Err("problem has no variables".into());
        }
        if self.constraints.is_empty() {
            return Err("problem has no constraints".into());
        }
        if self.bounds.len() != n {
            return Err(format!(
                "bounds length {} does not match {} variables",
                self.bounds.len(),
                n
            ));
        }
        if !self.objective.iter().all(|c| c.is_finite()) {
            return Err("objective contains a non-finite coefficient".into());
        }
        for (i, con) in self.constraints.iter().enumerate() {
            if con.coeffs.len() != n {
                return Err(format!(
                    "constraint {} has {} coefficients, expected {}",
                    i,
                    con.coeffs.len(),
                    n
                ));
            }
            if !con.coeffs.iter().all(|c| c.is_finite()) || !con.rhs.is_finite() {
                return Err(format!("constraint {} contains a non-finite value", i));
            }
        }
        Ok(())
    }
}
