use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use semchan::kernel::{compose, symbol_space, validate_enabling, EnablingMap, Kernel, STOCHASTIC_TOL};
use semchan::{ExactKernel, Kernel64, Rational};

use super::super::{space, stochastic};
use super::{run, Check};

pub const ALL: &[(&str, Check)] = &[
    (
        "exact composition stochastic and associative",
        exact_composition_is_stochastic_and_associative,
    ),
    (
        "float composition stochastic and associative",
        float_composition_is_stochastic_and_associative,
    ),
    ("non-stochastic rows rejected", rejects_non_stochastic_rows),
    (
        "composition preserves enabling support",
        composition_preserves_enabling_support,
    ),
];

/// Exact kernel with small integer weights; the first column of an all-zero
/// row gets mass so every row is a distribution.
fn exact(input: Vec<String>, output: Vec<String>) -> impl Strategy<Value = ExactKernel> {
    let (n, m) = (input.len(), output.len());
    proptest::collection::vec(proptest::collection::vec(0i64..5, m), n).prop_map(move |rows| {
        let rows = rows
            .into_iter()
            .map(|mut r| {
                if r.iter().all(|&x| x == 0) {
                    r[0] = 1;
                }
                let t: i64 = r.iter().sum();
                r.into_iter().map(|x| Rational::new(x, t)).collect()
            })
            .collect();
        Kernel::new(input.clone(), output.clone(), rows).unwrap()
    })
}

fn float(input: Vec<String>, output: Vec<String>) -> impl Strategy<Value = Kernel64> {
    stochastic(input.len(), output.len())
        .prop_map(move |rows| Kernel::new(input.clone(), output.clone(), rows).unwrap())
}

fn dims() -> impl Strategy<Value = (usize, usize, usize, usize)> {
    (1usize..5, 1usize..5, 1usize..5, 1usize..5)
}

/// Random enabling map plus a kernel supported inside it.
fn enabled(input: Vec<String>, output: Vec<String>) -> impl Strategy<Value = (EnablingMap, Kernel64)> {
    let (n, m) = (input.len(), output.len());
    (
        proptest::collection::vec(proptest::collection::vec(any::<bool>(), m), n),
        proptest::collection::vec(proptest::collection::vec(1u32..5, m), n),
        proptest::collection::vec(any::<bool>(), n * m),
    )
        .prop_map(move |(mut mask, weights, drop)| {
            for r in mask.iter_mut() {
                if !r.iter().any(|&b| b) {
                    r[0] = true;
                }
            }
            // Coverage: every output is allowed for some input.
            for j in 0..m {
                if !mask.iter().any(|r| r[j]) {
                    mask[j % n][j] = true;
                }
            }
            let allowed: BTreeMap<String, BTreeSet<String>> = input
                .iter()
                .zip(&mask)
                .map(|(x, r)| {
                    let set = output
                        .iter()
                        .zip(r)
                        .filter(|(_, &b)| b)
                        .map(|(y, _)| y.clone())
                        .collect();
                    (x.clone(), set)
                })
                .collect();
            let e = EnablingMap::new(input.clone(), output.clone(), allowed).unwrap();
            // Support is a non-empty subset of the allowed set.
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| {
                    let first = mask[i].iter().position(|&b| b).unwrap();
                    let w: Vec<f64> = (0..m)
                        .map(|j| {
                            let on = mask[i][j] && (j == first || !drop[i * m + j]);
                            if on {
                                f64::from(weights[i][j])
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    let t: f64 = w.iter().sum();
                    w.iter().map(|x| x / t).collect()
                })
                .collect();
            let k = Kernel::new(input.clone(), output.clone(), rows).unwrap();
            (e, k)
        })
}

fn row_sums_exact(k: &ExactKernel) -> bool {
    k.rows()
        .all(|r| r.iter().cloned().fold(Rational::from_integer(0), |a, b| a + b) == Rational::from_integer(1))
}

pub fn exact_composition_is_stochastic_and_associative() -> Result<(), String> {
    let s = dims().prop_flat_map(|(n, m, r, s)| {
        (
            exact(space("x", n), space("y", m)),
            exact(space("y", m), space("z", r)),
            exact(space("z", r), space("w", s)),
        )
    });
    run(s, |(a, b, c)| {
        let ab = compose(&a, &b).unwrap();
        let bc = compose(&b, &c).unwrap();
        prop_assert!(row_sums_exact(&ab));
        prop_assert!(row_sums_exact(&bc));
        let left = compose(&ab, &c).unwrap();
        let right = compose(&a, &bc).unwrap();
        prop_assert!(row_sums_exact(&left));
        prop_assert_eq!(left, right);
        Ok(())
    })
}

pub fn float_composition_is_stochastic_and_associative() -> Result<(), String> {
    let s = dims().prop_flat_map(|(n, m, r, s)| {
        (
            float(space("x", n), space("y", m)),
            float(space("y", m), space("z", r)),
            float(space("z", r), space("w", s)),
        )
    });
    run(s, |(a, b, c)| {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        for row in left.rows() {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() <= STOCHASTIC_TOL);
            prop_assert!(row.iter().all(|&v| v >= 0.0));
        }
        prop_assert!(left.approx_eq(&right, 1e-12));
        Ok(())
    })
}

pub fn rejects_non_stochastic_rows() -> Result<(), String> {
    run((stochastic(3, 3), 1e-9f64..0.5), |(mut rows, bump)| {
        rows[1][0] += bump;
        prop_assert!(Kernel::new(symbol_space(3), symbol_space(3), rows).is_err());
        Ok(())
    })
}

pub fn composition_preserves_enabling_support() -> Result<(), String> {
    let s = (1usize..5, 1usize..5, 1usize..5).prop_flat_map(|(n, m, r)| {
        (
            enabled(space("x", n), space("y", m)),
            enabled(space("y", m), space("z", r)),
        )
    });
    run(s, |((e1, k1), (e2, k2))| {
        prop_assert!(validate_enabling(&k1, &e1).unwrap().holds);
        prop_assert!(validate_enabling(&k2, &e2).unwrap().holds);
        let k = compose(&k1, &k2).unwrap();
        let e = e1.compose(&e2).unwrap();
        prop_assert!(validate_enabling(&k, &e).unwrap().holds);
        Ok(())
    })
}
