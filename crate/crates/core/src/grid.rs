//! Tensor-product index bookkeeping. The first direction runs fastest.

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TensorGrid {
    sizes: Vec<usize>,
}

impl TensorGrid {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::InvalidSpline(format!(
                "grid sizes must be positive, got {sizes:?}"
            )));
        }
        Ok(Self { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    pub fn len(&self) -> usize {
        self.sizes.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance in the linear index between neighbours along `dir`.
    pub fn stride(&self, dir: usize) -> usize {
        self.sizes[..dir].iter().product()
    }

    pub fn linearize(&self, index: &[usize]) -> Result<usize> {
        if index.len() != self.sizes.len() {
            return Err(Error::IndexOutOfRange {
                index: index.len(),
                size: self.sizes.len(),
            });
        }
        let mut linear = 0;
        let mut stride = 1;
        for (&i, &n) in index.iter().zip(&self.sizes) {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, size: n });
            }
            linear += i * stride;
            stride *= n;
        }
        Ok(linear)
    }

    pub fn delinearize(&self, linear: usize) -> Result<Vec<usize>> {
        if linear >= self.len() {
            return Err(Error::IndexOutOfRange {
                index: linear,
                size: self.len(),
            });
        }
        let mut rest = linear;
        Ok(self
            .sizes
            .iter()
            .map(|&n| {
                let i = rest % n;
                rest /= n;
                i
            })
            .collect())
    }

    /// All multi-indices in linear order.
    pub fn indices(&self) -> impl Iterator<Item = Vec<usize>> + '_ {
        (0..self.len()).map(|l| self.delinearize(l).expect("in range"))
    }

    /// Same grid with the size along `dir` replaced.
    pub fn with_size(&self, dir: usize, size: usize) -> Self {
        let mut sizes = self.sizes.clone();
        sizes[dir] = size;
        Self { sizes }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let g = TensorGrid::new(vec![3, 2]).unwrap();
        assert_eq!(g.linearize(&[2, 1]).unwrap(), 5);
        assert_eq!(g.linearize(&[0, 0]).unwrap(), 0);
        assert_eq!(g.delinearize(4).unwrap(), vec![1, 1]);
        assert!(g.linearize(&[3, 0]).is_err());
        assert!(g.linearize(&[0]).is_err());
        assert!(g.delinearize(6).is_err());
        assert!(TensorGrid::new(vec![2, 0]).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip(sizes in prop::collection::vec(1usize..6, 1..=4)) {
            let g = TensorGrid::new(sizes).unwrap();
            for l in 0..g.len() {
                let idx = g.delinearize(l).unwrap();
                prop_assert_eq!(g.linearize(&idx).unwrap(), l);
            }
        }
    }
}
