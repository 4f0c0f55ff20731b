//! 1D interval mesh.

use crate::error::{Error, Result};

/// Treatment applied at both ends of the domain.
///
/// Transmissive copies the interior trace into the ghost state; periodic
/// identifies the two end faces. Reflective walls are not provided: no
/// benchmark here needs them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Transmissive,
    Periodic,
}

impl BoundaryKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "transmissive" => Ok(Self::Transmissive),
            "periodic" => Ok(Self::Periodic),
            other => Err(Error::Config(format!(
                "boundary must be transmissive|periodic, got `{other}`"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Transmissive => "transmissive",
            Self::Periodic => "periodic",
        }
    }
}

/// Partition of `[x_0, x_n]` into intervals `K_j = [x_j, x_{j+1}]`.
#[derive(Debug, Clone)]
pub struct Mesh1d {
    nodes: Vec<f64>,
    boundary: BoundaryKind,
}

impl Mesh1d {
    pub fn from_nodes(nodes: Vec<f64>, boundary: BoundaryKind) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidArgument(
                "mesh needs at least two nodes".into(),
            ));
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument(
                "mesh nodes must be strictly increasing".into(),
            ));
        }
        Ok(Self { nodes, boundary })
    }

    pub fn uniform(a: f64, b: f64, n_elements: usize, boundary: BoundaryKind) -> Result<Self> {
        if n_elements == 0 || !(b > a) {
            return Err(Error::InvalidArgument(format!(
                "bad uniform mesh: [{a}, {b}] with {n_elements} elements"
            )));
        }
        let h = (b - a) / n_elements as f64;
        let mut nodes: Vec<f64> = (0..=n_elements).map(|i| a + i as f64 * h).collect();
        nodes[n_elements] = b;
        Self::from_nodes(nodes, boundary)
    }

    pub fn n_elements(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn boundary(&self) -> BoundaryKind {
        self.boundary
    }

    pub fn element_bounds(&self, elem: usize) -> (f64, f64) {
        (self.nodes[elem], self.nodes[elem + 1])
    }

    pub fn h(&self, elem: usize) -> f64 {
        self.nodes[elem + 1] - self.nodes[elem]
    }

    pub fn min_h(&self) -> f64 {
        (0..self.n_elements())
            .map(|j| self.h(j))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    pub fn length(&self) -> f64 {
        let (a, b) = self.domain();
        b - a
    }

    /// Element containing `x`; a node belongs to the element on its right
    /// except for the final node.
    pub fn locate(&self, x: f64) -> Result<usize> {
        let (a, b) = self.domain();
        if !(x >= a && x <= b) {
            return Err(Error::InvalidArgument(format!(
                "x = {x} outside domain [{a}, {b}]"
            )));
        }
        let idx = match self
            .nodes
            .binary_search_by(|n| n.partial_cmp(&x).expect("finite nodes"))
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        Ok(idx.min(self.n_elements() - 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_mesh_layout() {
        let mesh = Mesh1d::uniform(0.0, 1.0, 4, BoundaryKind::Transmissive).unwrap();
        assert_eq!(mesh.n_elements(), 4);
        assert_eq!(mesh.element_bounds(1), (0.25, 0.5));
        assert!((mesh.min_h() - 0.25).abs() < 1e-15);
        assert_eq!(mesh.length(), 1.0);
    }

    #[test]
    fn locate_including_nodes() {
        let mesh = Mesh1d::uniform(0.0, 1.0, 4, BoundaryKind::Transmissive).unwrap();
        assert_eq!(mesh.locate(0.1).unwrap(), 0);
        assert_eq!(mesh.locate(0.25).unwrap(), 1);
        assert_eq!(mesh.locate(1.0).unwrap(), 3);
        assert!(mesh.locate(1.5).is_err());
        assert!(mesh.locate(-0.1).is_err());
    }

    #[test]
    fn bad_meshes_rejected() {
        assert!(Mesh1d::uniform(0.0, 1.0, 0, BoundaryKind::Periodic).is_err());
        assert!(Mesh1d::from_nodes(vec![0.0, 0.0, 1.0], BoundaryKind::Periodic).is_err());
        assert!(Mesh1d::from_nodes(vec![1.0], BoundaryKind::Periodic).is_err());
    }
}
