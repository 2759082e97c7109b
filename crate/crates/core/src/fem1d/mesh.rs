use super::FemError;

/// A partition of `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D {
    nodes: Vec<f64>,
    h_max: f64,
}

impl Mesh1D {
    /// Uniform mesh with `elements` intervals.
    pub fn uniform(elements: usize) -> Result<Self, FemError> {
        if elements == 0 {
            return Err(FemError::InvalidMesh("need at least one element".into()));
        }
        let n = elements as f64;
        let mut nodes: Vec<f64> = (0..=elements).map(|i| i as f64 / n).collect();
        nodes[elements] = 1.0;
        Self::from_nodes(nodes)
    }

    /// Mesh from explicit nodes; they must increase strictly from 0 to 1.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self, FemError> {
        if nodes.len() < 2 {
            return Err(FemError::InvalidMesh("need at least two nodes".into()));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(FemError::InvalidMesh(
                "nodes must start at 0 and end at 1".into(),
            ));
        }
        let mut h_max: f64 = 0.0;
        for w in nodes.windows(2) {
            let h = w[1] - w[0];
            if !(h > 0.0) {
                return Err(FemError::InvalidMesh(format!(
                    "nodes not strictly increasing near x={}",
                    w[0]
                )));
            }
            h_max = h_max.max(h);
        }
        Ok(Mesh1D { nodes, h_max })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn h_min(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }

    /// Endpoints of element `e`.
    #[inline]
    pub fn element(&self, e: usize) -> (f64, f64) {
        (self.nodes[e], self.nodes[e + 1])
    }

    /// Index of the element containing `x` (right-closed at the last element).
    pub fn locate(&self, x: f64) -> usize {
        let ne = self.element_count();
        if x <= 0.0 {
            return 0;
        }
        if x >= 1.0 {
            return ne - 1;
        }
        // first node strictly greater than x
        let idx = self.nodes.partition_point(|&n| n <= x);
        (idx - 1).min(ne - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_invariants() {
        let m = Mesh1D::uniform(8).unwrap();
        assert_eq!(m.element_count(), 8);
        assert_eq!(m.nodes()[0], 0.0);
        assert_eq!(*m.nodes().last().unwrap(), 1.0);
        assert!((m.h_max() - 0.125).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_meshes() {
        assert!(Mesh1D::uniform(0).is_err());
        assert!(Mesh1D::from_nodes(vec![0.0, 0.5, 0.5, 1.0]).is_err());
        assert!(Mesh1D::from_nodes(vec![0.1, 1.0]).is_err());
        assert!(Mesh1D::from_nodes(vec![0.0, 0.9]).is_err());
        assert!(Mesh1D::from_nodes(vec![0.0]).is_err());
    }

    #[test]
    fn h_max_is_largest_gap() {
        let m = Mesh1D::from_nodes(vec![0.0, 0.1, 0.5, 0.6, 1.0]).unwrap();
        assert!((m.h_max() - 0.4).abs() < 1e-15);
        assert!((m.h_min() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn locate_points() {
        let m = Mesh1D::from_nodes(vec![0.0, 0.25, 0.5, 1.0]).unwrap();
        assert_eq!(m.locate(0.0), 0);
        assert_eq!(m.locate(0.1), 0);
        assert_eq!(m.locate(0.25), 1);
        assert_eq!(m.locate(0.7), 2);
        assert_eq!(m.locate(1.0), 2);
    }
}
