use crate::error::{Error, Result};
use crate::scalar::Prob;

use super::enabling::EnablingMap;
use super::matrix::{check_labels, from_count, sum, Kernel, STOCHASTIC_TOL};

fn check_mass<T: Prob>(mass: &[T]) -> Result<()> {
    if let Some(v) = mass.iter().find(|v| **v < T::zero()) {
        return Err(Error::InvalidDistribution(format!("negative mass {v:?}")));
    }
    let s = sum(mass.iter().cloned());
    if !s.close_to(&T::one(), STOCHASTIC_TOL) {
        return Err(Error::InvalidDistribution(format!(
            "total mass {} is not 1",
            s.to_f64()
        )));
    }
    Ok(())
}

/// Probability mass function over a labelled finite space.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution<T> {
    space: Vec<String>,
    mass: Vec<T>,
}

impl<T: Prob> Distribution<T> {
    pub fn new(space: Vec<String>, mass: Vec<T>) -> Result<Self> {
        check_labels(&space, "state")?;
        if space.len() != mass.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} masses for {} states",
                mass.len(),
                space.len()
            )));
        }
        check_mass(&mass)?;
        Ok(Self { space, mass })
    }

    pub fn uniform(space: Vec<String>) -> Result<Self> {
        if space.is_empty() {
            return Err(Error::InvalidDistribution("empty space".into()));
        }
        let w = T::one() / from_count::<T>(space.len());
        let mass = vec![w; space.len()];
        Self::new(space, mass)
    }

    pub fn point(space: Vec<String>, at: usize) -> Result<Self> {
        let mut mass = vec![T::zero(); space.len()];
        *mass
            .get_mut(at)
            .ok_or_else(|| Error::InvalidParameter(format!("index {at} outside space")))? = T::one();
        Self::new(space, mass)
    }

    pub fn space(&self) -> &[String] {
        &self.space
    }

    pub fn mass(&self) -> &[T] {
        &self.mass
    }

    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| **m > T::zero())
            .map(|(i, _)| i)
    }

    pub fn get(&self, label: &str) -> Option<&T> {
        self.space.iter().position(|l| l == label).map(|i| &self.mass[i])
    }

    pub fn total(&self) -> T {
        sum(self.mass.iter().cloned())
    }
}

/// Joint law `P(x, y) = p(x) κ(y|x)` stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Joint<T> {
    rows: Vec<String>,
    cols: Vec<String>,
    mass: Vec<T>,
}

impl<T: Prob> Joint<T> {
    pub fn new(rows: Vec<String>, cols: Vec<String>, mass: Vec<T>) -> Result<Self> {
        if mass.len() != rows.len() * cols.len() {
            return Err(Error::SpaceMismatch("joint table has the wrong size".into()));
        }
        check_mass(&mass)?;
        Ok(Self { rows, cols, mass })
    }

    pub fn row_space(&self) -> &[String] {
        &self.rows
    }

    pub fn col_space(&self) -> &[String] {
        &self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.mass[i * self.cols.len() + j]
    }

    pub fn row_marginal(&self) -> Vec<T> {
        (0..self.rows.len())
            .map(|i| sum((0..self.cols.len()).map(|j| self.get(i, j).clone())))
            .collect()
    }

    pub fn col_marginal(&self) -> Vec<T> {
        (0..self.cols.len())
            .map(|j| sum((0..self.rows.len()).map(|i| self.get(i, j).clone())))
            .collect()
    }

    /// Swaps the roles of the two coordinates.
    pub fn transpose(&self) -> Self {
        let (n, m) = (self.rows.len(), self.cols.len());
        let mut mass = Vec::with_capacity(n * m);
        for j in 0..m {
            for i in 0..n {
                mass.push(self.get(i, j).clone());
            }
        }
        Self {
            rows: self.cols.clone(),
            cols: self.rows.clone(),
            mass,
        }
    }

    /// Whether every positive-mass pair is allowed by `e`.
    pub fn respects(&self, e: &EnablingMap) -> bool {
        self.rows.iter().enumerate().all(|(i, x)| {
            self.cols
                .iter()
                .enumerate()
                .all(|(j, y)| *self.get(i, j) == T::zero() || e.allows(x, y))
        })
    }
}

fn check_aligned<T: Prob>(p: &Distribution<T>, k: &Kernel<T>) -> Result<()> {
    if p.space() != k.input_space() {
        return Err(Error::SpaceMismatch(format!(
            "distribution over {:?} does not match kernel input {:?}",
            p.space(),
            k.input_space()
        )));
    }
    Ok(())
}

/// Output marginal `p·κ`.
pub fn push_forward<T: Prob>(p: &Distribution<T>, k: &Kernel<T>) -> Result<Distribution<T>> {
    check_aligned(p, k)?;
    let mut out = vec![T::zero(); k.n_outputs()];
    for (i, pi) in p.mass().iter().enumerate() {
        for (j, v) in k.row(i).iter().enumerate() {
            out[j] = out[j].clone() + pi.clone() * v.clone();
        }
    }
    Distribution::new(k.output_space().to_vec(), out)
}

pub fn joint<T: Prob>(p: &Distribution<T>, k: &Kernel<T>) -> Result<Joint<T>> {
    check_aligned(p, k)?;
    let mut mass = Vec::with_capacity(p.len() * k.n_outputs());
    for (i, pi) in p.mass().iter().enumerate() {
        mass.extend(k.row(i).iter().map(|v| pi.clone() * v.clone()));
    }
    Joint::new(k.input_space().to_vec(), k.output_space().to_vec(), mass)
}
