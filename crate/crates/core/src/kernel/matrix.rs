use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};
use crate::scalar::Prob;

/// Tolerance for row sums of float kernels and distributions.
pub const STOCHASTIC_TOL: f64 = 1e-12;

pub(crate) fn check_labels(space: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(space.len());
    for l in space {
        if !seen.insert(l.as_str()) {
            return Err(Error::SpaceMismatch(format!("duplicate {what} label {l:?}")));
        }
    }
    Ok(())
}

pub(crate) fn sum<T: Prob>(values: impl IntoIterator<Item = T>) -> T {
    values.into_iter().fold(T::zero(), |acc, v| acc + v)
}

/// Exact count `n` as a scalar.
pub(crate) fn from_count<T: Prob>(n: usize) -> T {
    (0..n).fold(T::zero(), |acc, _| acc + T::one())
}

/// Row-stochastic matrix between two labelled finite spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct Kernel<T> {
    input: Vec<String>,
    output: Vec<String>,
    matrix: Vec<T>,
}

impl<T: Prob> Kernel<T> {
    pub fn new(input: Vec<String>, output: Vec<String>, rows: Vec<Vec<T>>) -> Result<Self> {
        if rows.len() != input.len() {
            return Err(Error::SpaceMismatch(format!(
                "{} rows for {} input states",
                rows.len(),
                input.len()
            )));
        }
        let mut matrix = Vec::with_capacity(input.len() * output.len());
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != output.len() {
                return Err(Error::SpaceMismatch(format!(
                    "row {i} has {} entries for {} output states",
                    row.len(),
                    output.len()
                )));
            }
            matrix.extend(row);
        }
        Self::from_flat(input, output, matrix)
    }

    pub(crate) fn from_flat(input: Vec<String>, output: Vec<String>, matrix: Vec<T>) -> Result<Self> {
        check_labels(&input, "input")?;
        check_labels(&output, "output")?;
        debug_assert_eq!(matrix.len(), input.len() * output.len());
        let k = Self { input, output, matrix };
        k.check_stochastic()?;
        Ok(k)
    }

    fn check_stochastic(&self) -> Result<()> {
        if self.output.is_empty() && !self.input.is_empty() {
            return Err(Error::SpaceMismatch("empty output space".into()));
        }
        for i in 0..self.input.len() {
            let row = self.row(i);
            if let Some(v) = row.iter().find(|v| **v < T::zero()) {
                return Err(Error::InvalidDistribution(format!("negative entry {v:?} in row {i}")));
            }
            let s = sum(row.iter().cloned());
            if !s.close_to(&T::one(), STOCHASTIC_TOL) {
                return Err(Error::NotStochastic {
                    row: i,
                    sum: s.to_f64(),
                });
            }
        }
        Ok(())
    }

    pub fn identity(space: Vec<String>) -> Result<Self> {
        let n = space.len();
        let mut matrix = vec![T::zero(); n * n];
        for i in 0..n {
            matrix[i * n + i] = T::one();
        }
        Self::from_flat(space.clone(), space, matrix)
    }

    pub fn input_space(&self) -> &[String] {
        &self.input
    }

    pub fn output_space(&self) -> &[String] {
        &self.output
    }

    pub fn n_inputs(&self) -> usize {
        self.input.len()
    }

    pub fn n_outputs(&self) -> usize {
        self.output.len()
    }

    pub fn row(&self, i: usize) -> &[T] {
        let m = self.output.len();
        &self.matrix[i * m..(i + 1) * m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[T]> {
        (0..self.input.len()).map(move |i| self.row(i))
    }

    pub fn prob(&self, i: usize, j: usize) -> &T {
        &self.matrix[i * self.output.len() + j]
    }

    pub fn input_index(&self, label: &str) -> Option<usize> {
        self.input.iter().position(|l| l == label)
    }

    pub fn output_index(&self, label: &str) -> Option<usize> {
        self.output.iter().position(|l| l == label)
    }

    /// `κ(y | x)` by label; zero for a label outside the output space.
    pub fn prob_by_label(&self, x: &str, y: &str) -> Option<T> {
        let i = self.input_index(x)?;
        Some(self.output_index(y).map_or(T::zero(), |j| self.prob(i, j).clone()))
    }

    /// Support of the row for input `i`, as output indices.
    pub fn support(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i)
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > T::zero())
            .map(|(j, _)| j)
    }

    /// Whether every row is a point mass.
    pub fn is_deterministic(&self) -> bool {
        self.rows()
            .all(|r| r.iter().filter(|v| **v > T::zero()).count() == 1 && r.iter().any(|v| *v == T::one()))
    }

    pub fn map<U: Prob>(&self, f: impl Fn(&T) -> U) -> Result<Kernel<U>> {
        Kernel::from_flat(
            self.input.clone(),
            self.output.clone(),
            self.matrix.iter().map(f).collect(),
        )
    }

    pub fn to_f64(&self) -> Kernel<f64> {
        Kernel {
            input: self.input.clone(),
            output: self.output.clone(),
            matrix: self.matrix.iter().map(Prob::to_f64).collect(),
        }
    }

    /// Entrywise comparison with tolerance, requiring identical spaces.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.input == other.input
            && self.output == other.output
            && self.matrix.iter().zip(&other.matrix).all(|(a, b)| a.close_to(b, tol))
    }
}

/// Kernel composition `x ⇝ y ⇝ z`; rows are checked, never renormalised.
pub fn compose<T: Prob>(k1: &Kernel<T>, k2: &Kernel<T>) -> Result<Kernel<T>> {
    if k1.output != k2.input {
        return Err(Error::SpaceMismatch(format!(
            "cannot compose: output space {:?} differs from input space {:?}",
            k1.output, k2.input
        )));
    }
    let (n, m, r) = (k1.n_inputs(), k1.n_outputs(), k2.n_outputs());
    let mut matrix = vec![T::zero(); n * r];
    for i in 0..n {
        for j in 0..m {
            let a = k1.prob(i, j);
            if *a == T::zero() {
                continue;
            }
            for (l, b) in k2.row(j).iter().enumerate() {
                matrix[i * r + l] = matrix[i * r + l].clone() + a.clone() * b.clone();
            }
        }
    }
    Kernel::from_flat(k1.input.clone(), k2.output.clone(), matrix)
}

/// 0/1 kernel of a function `input -> output`.
pub fn deterministic_kernel<T: Prob>(
    f: &BTreeMap<String, String>,
    input: Vec<String>,
    output: Vec<String>,
) -> Result<Kernel<T>> {
    let m = output.len();
    let mut matrix = vec![T::zero(); input.len() * m];
    for (i, x) in input.iter().enumerate() {
        let y = f.get(x).ok_or_else(|| Error::PartialFunction(x.clone()))?;
        let j = output.iter().position(|o| o == y).ok_or_else(|| Error::ImageEscape {
            input: x.clone(),
            image: y.clone(),
        })?;
        matrix[i * m + j] = T::one();
    }
    Kernel::from_flat(input, output, matrix)
}

/// Carrier labels `0..q-1`.
pub fn symbol_space(q: usize) -> Vec<String> {
    (0..q).map(|i| i.to_string()).collect()
}

/// q-ary symmetric channel: `1-p` on the diagonal, `p/(q-1)` elsewhere.
pub fn q_symmetric_channel(q: usize, p: f64) -> Result<Kernel<f64>> {
    if q < 2 {
        return Err(Error::InvalidParameter(format!("alphabet size {q} < 2")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("crossover {p} outside [0,1]")));
    }
    let off = p / (q - 1) as f64;
    let mut matrix = vec![off; q * q];
    for i in 0..q {
        matrix[i * q + i] = 1.0 - p;
    }
    Kernel::from_flat(symbol_space(q), symbol_space(q), matrix)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn labels(n: usize) -> Vec<String> {
        symbol_space(n)
    }

    #[test]
    fn rejects_bad_rows() {
        assert!(matches!(
            Kernel::new(labels(1), labels(2), vec![vec![0.5, 0.4]]),
            Err(Error::NotStochastic { .. })
        ));
        assert!(Kernel::new(labels(1), labels(2), vec![vec![1.5, -0.5]]).is_err());
        assert!(Kernel::<f64>::new(labels(2), labels(2), vec![vec![1.0, 0.0]]).is_err());
        assert!(Kernel::new(vec!["a".into(), "a".into()], labels(1), vec![vec![1.0], vec![1.0]]).is_err());
    }

    #[test]
    fn identity_law() {
        let k = q_symmetric_channel(3, 0.3).unwrap();
        let id = Kernel::identity(labels(3)).unwrap();
        assert!(compose(&id, &k).unwrap().approx_eq(&k, 1e-15));
        assert!(compose(&k, &id).unwrap().approx_eq(&k, 1e-15));
    }

    #[test]
    fn composition_space_mismatch() {
        let a = q_symmetric_channel(3, 0.1).unwrap();
        let b = q_symmetric_channel(4, 0.1).unwrap();
        assert!(matches!(compose(&a, &b), Err(Error::SpaceMismatch(_))));
    }

    #[test]
    fn deterministic_composition_matches_function_composition() {
        // f, g over a 4-state space; compare against g∘f pointwise.
        let sp = labels(4);
        let f_tab = [2usize, 0, 3, 3];
        let g_tab = [1usize, 1, 0, 2];
        let f: BTreeMap<String, String> = (0..4).map(|i| (sp[i].clone(), sp[f_tab[i]].clone())).collect();
        let g: BTreeMap<String, String> = (0..4).map(|i| (sp[i].clone(), sp[g_tab[i]].clone())).collect();
        let gf: BTreeMap<String, String> = (0..4).map(|i| (sp[i].clone(), sp[g_tab[f_tab[i]]].clone())).collect();
        let kf: Kernel<Rational> = deterministic_kernel(&f, sp.clone(), sp.clone()).unwrap();
        let kg: Kernel<Rational> = deterministic_kernel(&g, sp.clone(), sp.clone()).unwrap();
        let kgf: Kernel<Rational> = deterministic_kernel(&gf, sp.clone(), sp.clone()).unwrap();
        assert_eq!(compose(&kf, &kg).unwrap(), kgf);
    }

    #[test]
    fn deterministic_kernel_errors() {
        let sp = labels(2);
        let mut f = BTreeMap::new();
        f.insert("0".to_string(), "1".to_string());
        assert!(matches!(
            deterministic_kernel::<f64>(&f, sp.clone(), sp.clone()),
            Err(Error::PartialFunction(_))
        ));
        f.insert("1".to_string(), "7".to_string());
        assert!(matches!(
            deterministic_kernel::<f64>(&f, sp.clone(), sp),
            Err(Error::ImageEscape { .. })
        ));
    }

    #[test]
    fn identity_and_constant_maps() {
        let sp = labels(3);
        let id: BTreeMap<String, String> = sp.iter().map(|s| (s.clone(), s.clone())).collect();
        let k: Kernel<Rational> = deterministic_kernel(&id, sp.clone(), sp.clone()).unwrap();
        assert_eq!(k, Kernel::identity(sp.clone()).unwrap());
        let c: BTreeMap<String, String> = sp.iter().map(|s| (s.clone(), "1".to_string())).collect();
        let k: Kernel<f64> = deterministic_kernel(&c, sp.clone(), sp).unwrap();
        assert!(k.rows().all(|r| r == [0.0, 1.0, 0.0]));
        assert!(k.is_deterministic());
    }

    #[test]
    fn symmetric_channel_entries() {
        let w = q_symmetric_channel(10, 0.1).unwrap();
        assert_eq!(*w.prob(3, 3), 0.9);
        assert!((w.prob(3, 4) - 0.1 / 9.0).abs() < 1e-18);
        let id = q_symmetric_channel(5, 0.0).unwrap();
        assert!(id.approx_eq(&Kernel::identity(labels(5)).unwrap(), 0.0));
        let flat = q_symmetric_channel(4, 0.75).unwrap();
        assert!(flat.rows().all(|r| r.iter().all(|v| (v - 0.25).abs() < 1e-15)));
        assert!(q_symmetric_channel(1, 0.1).is_err());
        assert!(q_symmetric_channel(3, 1.1).is_err());
    }
}
