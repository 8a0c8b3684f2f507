use jacobi_core::jacobi::product::{jacobi_series, product_index};
use jacobi_core::jacobi::{conjecture_scan, p_coefficients, product_decompose, QSeries, ScanStatus};
use jacobi_core::lattice::Q;
use jacobi_core::Error;
use num_bigint::BigInt;
use num_rational::BigRational;

fn one(k: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(k))
}

/// `Σ_{h ∈ Z + l/2N} q^{N h²}` by direct enumeration.
fn unary(n: i128, l: i128, bound: i128) -> QSeries {
    let b = Q::from_integer(bound);
    let terms = (-50i128..50).map(|j| {
        let h = Q::new(2 * n * j + l, 2 * n);
        (h * h * Q::from_integer(n), one(1))
    });
    QSeries::from_terms(b, terms.filter(|(e, _)| *e <= b))
}

#[test]
fn index_one_one_table_is_exact() {
    let table = p_coefficients(1, 1, 20).unwrap();
    let theta_2 = unary(2, 0, 20); // θ(2τ)
    let theta_tilde_2 = unary(2, 2, 20); // θ̃(2τ)
    let theta_hat = unary(2, 1, 20); // θ̂(τ)
    assert_eq!(unary(2, 3, 20), theta_hat);
    assert_eq!(theta_2.coeff(&Q::from_integer(18)), one(2));

    let rows: Vec<_> = table.iter().collect();
    assert_eq!(rows.len(), 4);
    let pairs = |key: (i64, i64)| -> Vec<(i64, QSeries)> {
        table[&key].iter().map(|p| (p.t, p.series.clone())).collect()
    };
    assert_eq!(pairs((0, 0)), vec![(0, theta_2.clone()), (2, theta_tilde_2.clone())]);
    assert_eq!(pairs((1, 1)), vec![(0, theta_tilde_2), (2, theta_2)]);
    assert_eq!(pairs((0, 1)), vec![(1, theta_hat.clone()), (3, theta_hat.clone())]);
    assert_eq!(pairs((1, 0)), vec![(1, theta_hat.clone()), (3, theta_hat)]);
}

#[test]
fn displayed_leading_terms() {
    let table = p_coefficients(1, 1, 20).unwrap();
    assert_eq!(table[&(0, 0)][0].series.to_string().split(" + ").next(), Some("1"));
    let hat = &table[&(0, 1)][0].series;
    assert_eq!(hat.coeff(&Q::new(1, 8)), one(1));
    assert_eq!(hat.coeff(&Q::new(9, 8)), one(1));
    assert_eq!(hat.coeff(&Q::new(25, 8)), one(1));
    assert_eq!(hat.coeff(&Q::new(49, 8)), one(1));
    assert_eq!(hat.coeff(&Q::new(1, 2)), one(0));
}

#[test]
fn bad_arguments() {
    assert!(matches!(p_coefficients(0, 1, 10), Err(Error::BadConfig(_))));
    assert!(matches!(p_coefficients(1, 1, 0), Err(Error::PrecisionTooLow(_))));
    assert!(matches!(conjecture_scan(0, 2, 10), Err(Error::BadConfig(_))));
}

#[test]
fn decomposition_reproduces_the_product_exactly() {
    let bound = Q::from_integer(15);
    let f = vec![unary(1, 0, 15), QSeries::from_terms(bound, [(Q::new(1, 4), one(3)), (Q::new(5, 2), one(-1))])];
    let h = vec![QSeries::from_terms(bound, [(Q::from_integer(0), one(1))]), unary(1, 1, 15)];
    let lhs = jacobi_series(1, &f, bound).unwrap().mul(&jacobi_series(1, &h, bound).unwrap()).truncate(bound);
    let p = product_decompose(1, 1, &f, &h, 15).unwrap();
    assert_eq!(jacobi_series(2, &p, bound).unwrap(), lhs);
    // moving one coefficient to the wrong slot breaks the identity
    let mut wrong = p.clone();
    wrong.swap(0, 2);
    assert_ne!(jacobi_series(2, &wrong, bound).unwrap(), lhs);
}

#[test]
fn scan_small_indices() {
    let scan = conjecture_scan(3, 3, 30).unwrap();
    assert!(!scan.is_empty());
    for entry in &scan {
        assert!(entry.parity_ok, "{entry:?}");
        assert!(entry.denominators_ok, "{entry:?}");
        assert_eq!(entry.index, product_index(entry.m, entry.n));
        if entry.m <= 2 && entry.n <= 2 {
            assert_eq!(entry.status, ScanStatus::Match, "{entry:?}");
        }
        if let Some(l) = entry.l {
            assert!(l >= 0 && l <= entry.index);
        }
    }
    assert_eq!(product_index(2, 2), 4);
    assert_eq!(product_index(1, 2), 6);
    assert_eq!(product_index(2, 3), 30);
}
