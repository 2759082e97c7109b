use std::sync::Arc;

use super::{FemError, Mesh1D, QuadratureRule};

/// Element family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Continuous piecewise linears.
    LagrangeLinear,
    /// C¹ piecewise cubics with a value and a (physical) slope per node.
    HermiteCubic,
}

/// Values of one local basis function and its first two derivatives at a point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BasisValue {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

/// A conforming finite-element space on a [`Mesh1D`].
///
/// By default the value at `x = 0` is eliminated, so every field vanishes
/// there. [`FeSpace::lagrange_unpinned`] keeps that DOF (used by the
/// p-formulation, whose unknown has a natural condition at the surface).
///
/// DOF numbering:
/// * linear, pinned: node `i` → DOF `i - 1`;
/// * linear, unpinned: node `i` → DOF `i`;
/// * Hermite: slope at node 0 → DOF 0, then for node `i ≥ 1` value → `2i - 1`
///   and slope → `2i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeSpace {
    mesh: Mesh1D,
    family: Family,
    pinned_at_zero: bool,
    dof_count: usize,
}

impl FeSpace {
    pub fn lagrange(mesh: Mesh1D) -> Arc<Self> {
        let dof_count = mesh.node_count() - 1;
        Arc::new(FeSpace {
            mesh,
            family: Family::LagrangeLinear,
            pinned_at_zero: true,
            dof_count,
        })
    }

    pub fn lagrange_unpinned(mesh: Mesh1D) -> Arc<Self> {
        let dof_count = mesh.node_count();
        Arc::new(FeSpace {
            mesh,
            family: Family::LagrangeLinear,
            pinned_at_zero: false,
            dof_count,
        })
    }

    pub fn hermite(mesh: Mesh1D) -> Arc<Self> {
        let dof_count = 2 * mesh.node_count() - 1;
        Arc::new(FeSpace {
            mesh,
            family: Family::HermiteCubic,
            pinned_at_zero: true,
            dof_count,
        })
    }

    /// Shorthand for a uniform mesh.
    pub fn uniform(family: Family, elements: usize) -> Result<Arc<Self>, FemError> {
        let mesh = Mesh1D::uniform(elements)?;
        Ok(match family {
            Family::LagrangeLinear => Self::lagrange(mesh),
            Family::HermiteCubic => Self::hermite(mesh),
        })
    }

    pub fn mesh(&self) -> &Mesh1D {
        &self.mesh
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn pinned_at_zero(&self) -> bool {
        self.pinned_at_zero
    }

    pub fn dof_count(&self) -> usize {
        self.dof_count
    }

    /// Half-bandwidth of every matrix assembled on this space.
    pub fn bandwidth(&self) -> usize {
        match self.family {
            Family::LagrangeLinear => 1,
            Family::HermiteCubic => 3,
        }
    }

    pub fn local_dofs(&self) -> usize {
        match self.family {
            Family::LagrangeLinear => 2,
            Family::HermiteCubic => 4,
        }
    }

    /// Gauss-Legendre rule used for assembly on this family.
    pub fn default_quadrature(&self) -> QuadratureRule {
        match self.family {
            Family::LagrangeLinear => QuadratureRule::gauss_legendre(4),
            Family::HermiteCubic => QuadratureRule::gauss_legendre(6),
        }
    }

    /// Global DOF of each local basis function of element `e`
    /// (`None` for the eliminated value at `x = 0`).
    pub fn element_dofs(&self, e: usize) -> [Option<usize>; 4] {
        match (self.family, self.pinned_at_zero) {
            (Family::LagrangeLinear, true) => {
                [if e == 0 { None } else { Some(e - 1) }, Some(e), None, None]
            }
            (Family::LagrangeLinear, false) => [Some(e), Some(e + 1), None, None],
            (Family::HermiteCubic, _) => {
                let left_value = if e == 0 { None } else { Some(2 * e - 1) };
                [left_value, Some(2 * e), Some(2 * e + 1), Some(2 * e + 2)]
            }
        }
    }

    /// Local basis functions of element `e` evaluated at reference coordinate `xi`.
    pub fn local_basis(&self, e: usize, xi: f64) -> [BasisValue; 4] {
        let (a, b) = self.mesh.element(e);
        let h = b - a;
        match self.family {
            Family::LagrangeLinear => [
                BasisValue {
                    v: 1.0 - xi,
                    d1: -1.0 / h,
                    d2: 0.0,
                },
                BasisValue {
                    v: xi,
                    d1: 1.0 / h,
                    d2: 0.0,
                },
                BasisValue::default(),
                BasisValue::default(),
            ],
            Family::HermiteCubic => {
                let x2 = xi * xi;
                let x3 = x2 * xi;
                let hi = 1.0 / h;
                let hi2 = hi * hi;
                [
                    BasisValue {
                        v: 1.0 - 3.0 * x2 + 2.0 * x3,
                        d1: (-6.0 * xi + 6.0 * x2) * hi,
                        d2: (-6.0 + 12.0 * xi) * hi2,
                    },
                    BasisValue {
                        v: h * (xi - 2.0 * x2 + x3),
                        d1: 1.0 - 4.0 * xi + 3.0 * x2,
                        d2: (-4.0 + 6.0 * xi) * hi,
                    },
                    BasisValue {
                        v: 3.0 * x2 - 2.0 * x3,
                        d1: (6.0 * xi - 6.0 * x2) * hi,
                        d2: (6.0 - 12.0 * xi) * hi2,
                    },
                    BasisValue {
                        v: h * (-x2 + x3),
                        d1: -2.0 * xi + 3.0 * x2,
                        d2: (-2.0 + 6.0 * xi) * hi,
                    },
                ]
            }
        }
    }

    /// DOF carrying the value at `x = 1`.
    pub fn last_value_dof(&self) -> usize {
        match self.family {
            Family::LagrangeLinear => self.dof_count - 1,
            Family::HermiteCubic => self.dof_count - 2,
        }
    }

    /// DOF carrying the slope at `x = 1` (Hermite only).
    pub fn last_slope_dof(&self) -> Option<usize> {
        match self.family {
            Family::LagrangeLinear => None,
            Family::HermiteCubic => Some(self.dof_count - 1),
        }
    }

    /// DOF carrying the slope at `x = 0` (Hermite only).
    pub fn first_slope_dof(&self) -> Option<usize> {
        match self.family {
            Family::LagrangeLinear => None,
            Family::HermiteCubic => Some(0),
        }
    }

    /// Nodal interpolant coefficients of `v` (and `dv` for Hermite slopes).
    pub fn interpolate<T: super::Scalar>(
        &self,
        v: impl Fn(f64) -> T,
        dv: impl Fn(f64) -> T,
    ) -> Vec<T> {
        let nodes = self.mesh.nodes();
        match (self.family, self.pinned_at_zero) {
            (Family::LagrangeLinear, true) => nodes[1..].iter().map(|&x| v(x)).collect(),
            (Family::LagrangeLinear, false) => nodes.iter().map(|&x| v(x)).collect(),
            (Family::HermiteCubic, _) => {
                let mut c = Vec::with_capacity(self.dof_count);
                c.push(dv(0.0));
                for &x in &nodes[1..] {
                    c.push(v(x));
                    c.push(dv(x));
                }
                c
            }
        }
    }
}
