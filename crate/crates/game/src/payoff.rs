/// A payoff allocation, one entry per player.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffVector {
    values: Vec<f64>,
}

impl PayoffVector {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "payoff vector needs at least one entry");
        PayoffVector { values }
    }

    pub fn zeros(n: usize) -> Self {
        Self::new(vec![0.0; n])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }

    /// Sum of the entries belonging to `coalition`.
    pub fn coalition_sum(&self, coalition: crate::Coalition) -> f64 {
        coalition.members().map(|i| self.values[i]).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().copied()
    }
}

impl From<PayoffVector> for Vec<f64> {
    fn from(p: PayoffVector) -> Self {
        p.values
    }
}
