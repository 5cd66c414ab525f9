//! Small linear-algebra facts the decoding arguments rest on, in checkable
//! form.

use std::collections::HashSet;

use thiserror::Error;

use crate::field::{all_vectors, Field, FieldMatrix};

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq)]
pub enum DetIdentityError {
    #[error("beta_1 must be nonzero")]
    BetaOneZero,
    #[error("xi is not orthogonal to beta")]
    XiNotOrthogonal,
    #[error("xi_2 must be nonzero")]
    XiTwoZero,
    #[error("expected a 2x3 matrix [M21 | M22]")]
    Shape,
}

/// For `m2 = [M21 | M22]` (2x3), `beta` with `beta_1 != 0` and `xi` with
/// `beta . xi = 0`, compares `det([M21 | M22 xi])` against
/// `(xi_2 / beta_1) * det([[a1, -b2 m11 + b1 m12], [a2, -b2 m21 + b1 m22]])`.
pub fn det_identity_check(
    m2: &FieldMatrix,
    beta: [u32; 2],
    xi: [u32; 2],
) -> Result<bool, DetIdentityError> {
    let f = m2.field();
    if m2.rows() != 2 || m2.cols() != 3 {
        return Err(DetIdentityError::Shape);
    }
    let [b1, b2] = beta.map(|v| v % f.modulus());
    let [x1, x2] = xi.map(|v| v % f.modulus());
    if b1 == 0 {
        return Err(DetIdentityError::BetaOneZero);
    }
    if f.add(f.mul(b1, x1), f.mul(b2, x2)) != 0 {
        return Err(DetIdentityError::XiNotOrthogonal);
    }
    if x2 == 0 {
        return Err(DetIdentityError::XiTwoZero);
    }
    let lhs = {
        let c = |r: usize| f.add(f.mul(m2.get(r, 1), x1), f.mul(m2.get(r, 2), x2));
        FieldMatrix::from_rows(f, &[[m2.get(0, 0), c(0)], [m2.get(1, 0), c(1)]]).det()
    };
    let rhs = {
        let c = |r: usize| f.add(f.neg(f.mul(b2, m2.get(r, 1))), f.mul(b1, m2.get(r, 2)));
        let d = FieldMatrix::from_rows(f, &[[m2.get(0, 0), c(0)], [m2.get(1, 0), c(1)]]).det();
        f.mul(f.mul(x2, f.inv(b1).expect("nonzero")), d)
    };
    Ok(lhs == rhs)
}

/// The unique `x2` with `z = h1 x1 + h2 x2` for some `x1`, when `h2` has full
/// column rank, the column spans of `h1` and `h2` meet only in zero, and `z`
/// lies in their sum. Otherwise `None`.
pub fn partial_decode(z: &[u32], h1: &FieldMatrix, h2: &FieldMatrix) -> Option<Vec<u32>> {
    let f = h2.field();
    assert_eq!(h1.rows(), h2.rows(), "row count mismatch");
    assert_eq!(z.len(), h2.rows(), "received vector length");
    let r2 = h2.rank();
    if r2 != h2.cols() {
        return None;
    }
    let joint = h1.hstack(h2);
    if joint.rank() != h1.rank() + r2 {
        return None;
    }
    let x = joint.solve(&FieldMatrix::column_vector(f, z))?;
    Some((h1.cols()..joint.cols()).map(|r| x.get(r, 0)).collect())
}

/// Number of distinct `m . theta` over nonzero `theta` with
/// `constraints . theta = 0`, by enumeration. Meant for tiny fields.
pub fn distinct_image_count(m: &FieldMatrix, constraints: &FieldMatrix) -> usize {
    let f: Field = m.field();
    assert_eq!(m.cols(), constraints.cols(), "column count mismatch");
    let mut seen = HashSet::new();
    for theta in all_vectors(f, m.cols()) {
        if theta.iter().all(|&v| v == 0) {
            continue;
        }
        if constraints.mul_vec(&theta).iter().any(|&v| v != 0) {
            continue;
        }
        seen.insert(m.mul_vec(&theta));
    }
    seen.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf(p: u32) -> Field {
        Field::new(p).unwrap()
    }

    #[test]
    fn det_identity_substitution_case() {
        let f = gf(7);
        let m = FieldMatrix::from_rows(f, &[[2, 3, 5], [1, 4, 6]]);
        assert_eq!(det_identity_check(&m, [1, 0], [0, 1]), Ok(true));
        assert_eq!(
            det_identity_check(&m, [0, 1], [1, 0]),
            Err(DetIdentityError::BetaOneZero)
        );
        assert_eq!(
            det_identity_check(&m, [1, 1], [1, 1]),
            Err(DetIdentityError::XiNotOrthogonal)
        );
    }

    #[test]
    fn partial_decode_trivial_cases() {
        let f = gf(5);
        let empty = FieldMatrix::zeros(f, 3, 0);
        let id = FieldMatrix::identity(f, 3);
        assert_eq!(partial_decode(&[1, 2, 3], &empty, &id), Some(vec![1, 2, 3]));
        // Overlapping spans.
        assert_eq!(partial_decode(&[1, 0, 0], &id, &id), None);
    }

    #[test]
    fn distinct_images_of_identity() {
        let f = gf(3);
        let id = FieldMatrix::identity(f, 3);
        let none = FieldMatrix::zeros(f, 0, 3);
        assert_eq!(distinct_image_count(&id, &none), 26);
        assert_eq!(distinct_image_count(&FieldMatrix::zeros(f, 2, 3), &none), 1);
    }
}
