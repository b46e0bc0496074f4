use crate::error::{Error, Result};
use crate::geometry::locate;
use crate::real::Real;

/// Radial cells between the current inner sphere and the outer sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMesh<T> {
    edges: Vec<T>,
    centers: Vec<T>,
    offset: usize,
}

impl<T: Real> RadialMesh<T> {
    /// `n` equal cells spanning `[r_inner, r_outer]`.
    pub fn uniform(r_inner: T, r_outer: T, n: usize) -> Result<Self> {
        if n == 0 || !(r_inner >= T::zero()) || !(r_outer > r_inner) {
            return Err(Error::Domain(format!(
                "bad radial mesh: [{r_inner:e}, {r_outer:e}] with {n} cells"
            )));
        }
        let dr = (r_outer - r_inner) / T::from_usize_lossy(n);
        let mut edges: Vec<T> = (0..=n).map(|k| r_inner + dr * T::from_usize_lossy(k)).collect();
        edges[n] = r_outer;
        Ok(Self::from_edges(edges, 0))
    }

    /// Fixed spacing `r_outer / n_total` from the origin; cells lying wholly
    /// below `r_inner` are dropped and the cell containing it is cut at
    /// `r_inner` (or merged outward if the remainder is a sliver).
    pub fn truncated(r_inner: T, r_outer: T, n_total: usize) -> Result<Self> {
        if n_total == 0 || !(r_inner >= T::zero()) || !(r_outer > r_inner) {
            return Err(Error::Domain(format!(
                "bad radial mesh: [{r_inner:e}, {r_outer:e}] with {n_total} cells"
            )));
        }
        let dr = r_outer / T::from_usize_lossy(n_total);
        let fixed: Vec<T> = (0..=n_total).map(|k| dr * T::from_usize_lossy(k)).collect();
        let mut first = locate(&fixed, r_inner);
        if fixed[first + 1] - r_inner < T::lit(1e-6) * dr && first + 1 < n_total {
            first += 1;
        }
        let mut edges = Vec::with_capacity(n_total - first + 1);
        edges.push(r_inner);
        edges.extend_from_slice(&fixed[first + 1..]);
        let last = edges.len() - 1;
        edges[last] = r_outer;
        Ok(Self::from_edges(edges, first))
    }

    fn from_edges(edges: Vec<T>, offset: usize) -> Self {
        let centers = edges.windows(2).map(|w| (w[0] + w[1]) * T::lit(0.5)).collect();
        Self { edges, centers, offset }
    }

    pub fn n_cells(&self) -> usize {
        self.centers.len()
    }

    pub fn r_inner(&self) -> T {
        self.edges[0]
    }

    pub fn r_outer(&self) -> T {
        self.edges[self.edges.len() - 1]
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn width(&self, j: usize) -> T {
        self.edges[j + 1] - self.edges[j]
    }

    /// Index of the first active cell within the fixed mesh of [`Self::truncated`]
    /// (always 0 for uniform meshes).
    pub fn offset(&self) -> usize {
        self.offset
    }

    pub fn locate(&self, r: T) -> usize {
        locate(&self.edges, r)
    }
}

/// Uniform cells in direction cosine on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionMesh<T> {
    edges: Vec<T>,
    centers: Vec<T>,
}

impl<T: Real> DirectionMesh<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("direction mesh needs at least one cell".into()));
        }
        let d = T::lit(2.0) / T::from_usize_lossy(n);
        let mut edges: Vec<T> = (0..=n).map(|k| -T::one() + d * T::from_usize_lossy(k)).collect();
        edges[n] = T::one();
        if n.is_multiple_of(2) {
            edges[n / 2] = T::zero();
        }
        let centers = edges.windows(2).map(|w| (w[0] + w[1]) * T::lit(0.5)).collect();
        Ok(Self { edges, centers })
    }

    pub fn n_cells(&self) -> usize {
        self.centers.len()
    }

    pub fn edges(&self) -> &[T] {
        &self.edges
    }

    pub fn centers(&self) -> &[T] {
        &self.centers
    }

    pub fn width(&self, l: usize) -> T {
        self.edges[l + 1] - self.edges[l]
    }

    pub fn locate(&self, mu: T) -> usize {
        locate(&self.edges, mu)
    }
}
