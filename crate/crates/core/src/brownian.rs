//! Coupled Brownian paths.
//!
//! Increments are drawn once on the finest grid and accumulated left to right
//! into node positions. Coarser paths are obtained by keeping every `q`-th
//! node, so every grid derived from one fine path sees bit-identical positions
//! at the nodes they share; coarse increments are differences of those
//! positions, i.e. block sums of the fine increments.

use crate::error::{Error, Result};
use crate::rng::RngStream;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub struct BrownianPath {
    d: usize,
    n: usize,
    /// Row-major `(n + 1) x d`; row 0 is the origin.
    positions: Vec<f64>,
    origin: Option<RngStream>,
}

impl BrownianPath {
    /// Sample a `d`-dimensional path on the grid of resolution `n_fine`.
    ///
    /// Component `l` of increment `j` is `normal(j * d + l) / sqrt(n_fine)`.
    pub fn sample(n_fine: usize, d: usize, stream: &RngStream) -> Result<Self> {
        if n_fine == 0 || d == 0 {
            return Err(Error::Argument(
                "path resolution and dimension must be positive".into(),
            ));
        }
        let mut increments = vec![0.0; n_fine * d];
        stream.fill_normals(&mut increments, libm::sqrt(1.0 / n_fine as f64));
        let mut path = Self::from_increments(d, &increments)?;
        path.origin = Some(stream.clone());
        Ok(path)
    }

    /// Build a path from explicit row-major increments of shape `n x d`.
    pub fn from_increments(d: usize, increments: &[f64]) -> Result<Self> {
        if d == 0 || increments.is_empty() || !increments.len().is_multiple_of(d) {
            return Err(Error::Argument(format!(
                "{} increments do not form whole rows of dimension {d}",
                increments.len()
            )));
        }
        let n = increments.len() / d;
        let mut positions = vec![0.0; (n + 1) * d];
        for j in 0..n {
            for l in 0..d {
                positions[(j + 1) * d + l] = positions[j * d + l] + increments[j * d + l];
            }
        }
        Ok(Self {
            d,
            n,
            positions,
            origin: None,
        })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of increments (grid resolution).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Stream the path was drawn from, if any.
    pub fn origin(&self) -> Option<&RngStream> {
        self.origin.as_ref()
    }

    /// `B(j / n)`.
    #[inline]
    pub fn position(&self, j: usize) -> &[f64] {
        &self.positions[j * self.d..(j + 1) * self.d]
    }

    /// Component `l` of `B((j+1)/n) - B(j/n)`.
    #[inline]
    pub fn increment(&self, j: usize, l: usize) -> f64 {
        self.positions[(j + 1) * self.d + l] - self.positions[j * self.d + l]
    }

    /// All increments, row-major `n x d`.
    pub fn increments(&self) -> Vec<f64> {
        (0..self.n)
            .flat_map(|j| (0..self.d).map(move |l| (j, l)))
            .map(|(j, l)| self.increment(j, l))
            .collect()
    }

    /// View on the grid of resolution `n / factor`.
    pub fn coarsen(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !self.n.is_multiple_of(factor) {
            return Err(Error::Argument(format!(
                "factor {factor} does not divide resolution {}",
                self.n
            )));
        }
        let n = self.n / factor;
        let mut positions = Vec::with_capacity((n + 1) * self.d);
        for j in 0..=n {
            positions.extend_from_slice(self.position(j * factor));
        }
        Ok(Self {
            d: self.d,
            n,
            positions,
            origin: self.origin.clone(),
        })
    }

    /// Coarsen to an explicit target resolution.
    pub fn at_resolution(&self, n: usize) -> Result<Self> {
        if n == 0 || !self.n.is_multiple_of(n) {
            return Err(Error::Argument(format!(
                "resolution {n} does not divide {}",
                self.n
            )));
        }
        self.coarsen(self.n / n)
    }

    /// True when `coarse` agrees bit-exactly with this path on its nodes.
    pub fn refines(&self, coarse: &BrownianPath) -> bool {
        if coarse.d != self.d || coarse.n == 0 || !self.n.is_multiple_of(coarse.n) {
            return false;
        }
        let q = self.n / coarse.n;
        (0..=coarse.n).all(|j| {
            self.position(j * q)
                .iter()
                .zip(coarse.position(j))
                .all(|(a, b)| a.to_bits() == b.to_bits())
        })
    }
}
