use crate::kernel::{Distribution, Joint};
use crate::scalar::Prob;

/// `-Σ p log2 p` with `0 log 0 = 0`.
pub fn entropy_bits(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

/// Binary entropy `h_b(ε)`.
pub fn binary_entropy(eps: f64) -> f64 {
    entropy_bits(&[eps, 1.0 - eps])
}

pub fn entropy<T: Prob>(p: &Distribution<T>) -> f64 {
    let mass: Vec<f64> = p.mass().iter().map(Prob::to_f64).collect();
    entropy_bits(&mass)
}

fn joint_f64<T: Prob>(j: &Joint<T>) -> (Vec<f64>, usize, usize) {
    let (n, m) = (j.row_space().len(), j.col_space().len());
    let mut v = Vec::with_capacity(n * m);
    for i in 0..n {
        for k in 0..m {
            v.push(j.get(i, k).to_f64());
        }
    }
    (v, n, m)
}

/// `H(X|Y)` for a joint over `X × Y`.
pub fn conditional_entropy<T: Prob>(j: &Joint<T>) -> f64 {
    let (v, n, m) = joint_f64(j);
    let mut h = 0.0;
    for k in 0..m {
        let py: f64 = (0..n).map(|i| v[i * m + k]).sum();
        for i in 0..n {
            let pxy = v[i * m + k];
            if pxy > 0.0 {
                h -= pxy * (pxy / py).log2();
            }
        }
    }
    h
}

/// `I(X;Y) = Σ p(x,y) log2 p(x,y) / (p(x)p(y))`.
pub fn mutual_information<T: Prob>(j: &Joint<T>) -> f64 {
    let (v, n, m) = joint_f64(j);
    let px: Vec<f64> = (0..n).map(|i| v[i * m..(i + 1) * m].iter().sum()).collect();
    let py: Vec<f64> = (0..m).map(|k| (0..n).map(|i| v[i * m + k]).sum()).collect();
    let mut mi = 0.0;
    for i in 0..n {
        for k in 0..m {
            let pxy = v[i * m + k];
            if pxy > 0.0 {
                mi += pxy * (pxy / (px[i] * py[k])).log2();
            }
        }
    }
    mi.max(0.0)
}

/// `I(P, W)` for an input pmf given as a slice and a row-major kernel.
pub(crate) fn mi_of(p: &[f64], w: &[f64], m: usize) -> f64 {
    let mut q = vec![0.0; m];
    for (i, pi) in p.iter().enumerate() {
        for (k, qk) in q.iter_mut().enumerate() {
            *qk += pi * w[i * m + k];
        }
    }
    let mut mi = 0.0;
    for (i, pi) in p.iter().enumerate() {
        if *pi <= 0.0 {
            continue;
        }
        for (k, qk) in q.iter().enumerate() {
            let x = w[i * m + k];
            if x > 0.0 {
                mi += pi * x * (x / qk).log2();
            }
        }
    }
    mi.max(0.0)
}
