#![allow(dead_code)]

use num_bigint::BigInt;
use proptest::prelude::*;

use steinberg_core::linalg::IntMatrix;

/// Random element of SL(n,Z) as a product of elementary matrices and signed
/// swaps.
pub fn sl_matrix(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 0..n, -2i64..=2), 0..10).prop_map(move |ops| {
        let mut g = IntMatrix::identity(n);
        for (i, j, t) in ops {
            if i != j {
                g.add_row_multiple(i, j, &BigInt::from(t));
            } else {
                let k = (i + 1) % n;
                g.swap_rows(i, k);
                g.negate_row(i);
            }
        }
        g
    })
}

/// Random element of Gamma_0(N): elementary matrices whose first row stays
/// `(*, 0, ..., 0)` mod N.
pub fn gamma0_matrix(n: usize, level: u64) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n, 1..n, -2i64..=2), 0..10).prop_map(move |ops| {
        let mut g = IntMatrix::identity(n);
        for (i, j, t) in ops {
            let j = if j == i { 0 } else { j };
            if i == j {
                continue;
            }
            let t = if i == 0 { BigInt::from(t) * level } else { BigInt::from(t) };
            g.add_row_multiple(i, j, &t);
        }
        g
    })
}
