use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid time grid: {0}")]
pub struct GridError(pub String);

/// Time levels `0 = t⁰ < t¹ < … < t^N = T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    t: Vec<f64>,
}

impl TimeGrid {
    pub fn uniform(t_end: f64, steps: usize) -> Result<Self, GridError> {
        if !(t_end > 0.0) {
            return Err(GridError("final time must be positive".into()));
        }
        let n = steps as f64;
        let mut t: Vec<f64> = (0..=steps).map(|i| t_end * (i as f64 / n)).collect();
        if steps == 0 {
            t.truncate(1);
        } else {
            t[steps] = t_end;
        }
        Ok(TimeGrid { t })
    }

    pub fn from_nodes(t: Vec<f64>) -> Result<Self, GridError> {
        if t.first() != Some(&0.0) {
            return Err(GridError("first time level must be 0".into()));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(GridError("time levels must increase strictly".into()));
        }
        Ok(TimeGrid { t })
    }

    /// Uniform grid with `node` inserted if it is not already a level.
    pub fn uniform_with_node(t_end: f64, steps: usize, node: f64) -> Result<Self, GridError> {
        let mut g = Self::uniform(t_end, steps)?;
        if node > 0.0 && node < t_end && !g.t.iter().any(|&x| (x - node).abs() < 1e-12 * t_end) {
            let i = g.t.partition_point(|&x| x < node);
            g.t.insert(i, node);
        } else if let Some(x) = g.t.iter_mut().find(|x| (**x - node).abs() < 1e-12 * t_end) {
            *x = node;
        }
        Ok(g)
    }

    pub fn steps(&self) -> usize {
        self.t.len() - 1
    }

    pub fn times(&self) -> &[f64] {
        &self.t
    }

    pub fn t(&self, n: usize) -> f64 {
        self.t[n]
    }

    pub fn t_end(&self) -> f64 {
        *self.t.last().unwrap()
    }

    /// `k_n = t^n − t^{n−1}`, `n ≥ 1`.
    pub fn k(&self, n: usize) -> f64 {
        self.t[n] - self.t[n - 1]
    }

    /// `t^{n−1/2}`.
    pub fn t_half(&self, n: usize) -> f64 {
        0.5 * (self.t[n] + self.t[n - 1])
    }

    pub fn k_max(&self) -> f64 {
        (1..=self.steps()).map(|n| self.k(n)).fold(0.0, f64::max)
    }

    /// Smallest `C` with `|k_{n+1} − k_n| ≤ C max(k_n², k_{n+1}²)` for all `n`.
    pub fn mesh_condition_constant(&self) -> f64 {
        (1..self.steps())
            .map(|n| {
                let (k0, k1) = (self.k(n), self.k(n + 1));
                (k1 - k0).abs() / (k0 * k0).max(k1 * k1)
            })
            .fold(0.0, f64::max)
    }
}
