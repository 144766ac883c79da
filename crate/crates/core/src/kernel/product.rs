use crate::error::{Error, Result};
use crate::scalar::Prob;

use super::matrix::Kernel;

/// Largest tuple space materialised densely.
pub const DENSE_GUARD: usize = 4096;

/// Memoryless `n`-fold extension `W^{⊗n}`, evaluated per tuple pair.
///
/// Tuples are indexed in mixed radix with the first coordinate most
/// significant.
#[derive(Clone, Copy, Debug)]
pub struct ProductKernel<'a, T> {
    base: &'a Kernel<T>,
    n: usize,
}

pub fn product_extension<T: Prob>(w: &Kernel<T>, n: usize) -> Result<ProductKernel<'_, T>> {
    if n == 0 {
        return Err(Error::InvalidParameter("blocklength must be at least 1".into()));
    }
    Ok(ProductKernel { base: w, n })
}

fn checked_pow(base: usize, n: usize) -> Option<usize> {
    (0..n).try_fold(1usize, |acc, _| acc.checked_mul(base))
}

impl<'a, T: Prob> ProductKernel<'a, T> {
    pub fn base(&self) -> &'a Kernel<T> {
        self.base
    }

    pub fn blocklength(&self) -> usize {
        self.n
    }

    pub fn n_inputs(&self) -> Option<usize> {
        checked_pow(self.base.n_inputs(), self.n)
    }

    pub fn n_outputs(&self) -> Option<usize> {
        checked_pow(self.base.n_outputs(), self.n)
    }

    /// `∏ W(y_i | x_i)`.
    pub fn prob(&self, x: &[usize], y: &[usize]) -> T {
        assert_eq!(x.len(), self.n, "input tuple length");
        assert_eq!(y.len(), self.n, "output tuple length");
        x.iter()
            .zip(y)
            .fold(T::one(), |acc, (&a, &b)| acc * self.base.prob(a, b).clone())
    }

    /// Decodes a tuple index into coordinates.
    pub fn digits(index: usize, radix: usize, n: usize) -> Vec<usize> {
        let mut out = vec![0; n];
        let mut rest = index;
        for slot in out.iter_mut().rev() {
            *slot = rest % radix;
            rest /= radix;
        }
        out
    }

    fn tuple_labels(space: &[String], n: usize, count: usize) -> Vec<String> {
        (0..count)
            .map(|i| {
                Self::digits(i, space.len(), n)
                    .iter()
                    .map(|&d| space[d].as_str())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect()
    }

    /// Dense matrix, refused when either tuple space exceeds `guard`.
    pub fn to_dense(&self, guard: usize) -> Result<Kernel<T>> {
        let too_big = || Error::GuardExceeded {
            size: u128::MAX,
            guard: guard as u128,
        };
        let ni = self.n_inputs().ok_or_else(too_big)?;
        let no = self.n_outputs().ok_or_else(too_big)?;
        if ni.max(no) > guard {
            return Err(Error::GuardExceeded {
                size: ni.max(no) as u128,
                guard: guard as u128,
            });
        }
        if self.n == 1 {
            return Ok(self.base.clone());
        }
        let (q_in, q_out) = (self.base.n_inputs(), self.base.n_outputs());
        let mut matrix = Vec::with_capacity(ni * no);
        for i in 0..ni {
            let x = Self::digits(i, q_in, self.n);
            for j in 0..no {
                matrix.push(self.prob(&x, &Self::digits(j, q_out, self.n)));
            }
        }
        Kernel::from_flat(
            Self::tuple_labels(self.base.input_space(), self.n, ni),
            Self::tuple_labels(self.base.output_space(), self.n, no),
            matrix,
        )
    }
}
