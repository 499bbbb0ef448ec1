use crate::error::{Error, Result};
use crate::rng::RngStream;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

/// I.i.d. uniform evaluation offsets, one per subinterval.
///
/// Zero-based: subinterval `[j/n, (j+1)/n)` is evaluated at `(j + taus[j]) / n`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomOffsets {
    taus: Vec<f64>,
}

impl RandomOffsets {
    /// Draw `n` offsets from `stream`; offset `j` is uniform draw `j`.
    pub fn sample(n: usize, stream: &RngStream) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("offset count must be at least 1".into()));
        }
        let mut taus = vec![0.0; n];
        stream.fill_uniform(&mut taus);
        Ok(Self { taus })
    }

    /// Wrap explicit offsets; each must lie strictly inside (0, 1).
    pub fn from_taus(taus: Vec<f64>) -> Result<Self> {
        if let Some(bad) = taus.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
            return Err(Error::Domain(format!("offset {bad} not in (0, 1)")));
        }
        Ok(Self { taus })
    }

    pub fn len(&self) -> usize {
        self.taus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.taus.is_empty()
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }
}
