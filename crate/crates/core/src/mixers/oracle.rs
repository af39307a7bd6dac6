use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::space::SolutionSpace;

/// Largest space the dense oracle accepts.
pub const ORACLE_CEILING: usize = 4096;

fn check(space: &SolutionSpace) -> Result<()> {
    if space.len() > ORACLE_CEILING {
        return Err(Error::TooLarge {
            what: "dense oracle",
            size: space.len() as u128,
            ceiling: ORACLE_CEILING as u128,
        });
    }
    Ok(())
}

/// Dense adjacency matrix of the mixing graph, built from `neighbors`.
pub fn dense_adjacency(space: &SolutionSpace) -> Result<DMatrix<f64>> {
    check(space)?;
    let mut a = DMatrix::zeros(space.len(), space.len());
    for (u, x) in space.iter().enumerate() {
        for y in space.neighbors(&x)? {
            a[(space.index_of(&y)?, u)] = 1.0;
        }
    }
    Ok(a)
}

/// `e^{-itA}` from the eigendecomposition of the symmetric adjacency matrix.
pub fn dense_mixer_oracle(space: &SolutionSpace, t: f64) -> Result<DMatrix<Complex64>> {
    let a = dense_adjacency(space)?;
    let eig = SymmetricEigen::new(a);
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|lambda| Complex64::from_polar(1.0, -t * lambda)));
    Ok(&v * phases * v.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_time_identity_and_unitarity() {
        for space in [
            SolutionSpace::binary(3).unwrap(),
            SolutionSpace::integer(2, 3).unwrap(),
            SolutionSpace::permutation(4).unwrap(),
        ] {
            let id = dense_mixer_oracle(&space, 0.0).unwrap();
            let n = space.len();
            assert!((id - DMatrix::<Complex64>::identity(n, n)).camax() < 1e-12);
            let u = dense_mixer_oracle(&space, 0.9).unwrap();
            let uu = u.adjoint() * &u;
            assert!((uu - DMatrix::<Complex64>::identity(n, n)).camax() < 1e-12);
        }
    }

    #[test]
    fn hypercube_tensor_closed_form() {
        let t: f64 = 0.37;
        let space = SolutionSpace::binary(3).unwrap();
        let single = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(t.cos(), 0.0),
                Complex64::new(0.0, -t.sin()),
                Complex64::new(0.0, -t.sin()),
                Complex64::new(t.cos(), 0.0),
            ],
        );
        let closed = single.kronecker(&single).kronecker(&single);
        let oracle = dense_mixer_oracle(&space, t).unwrap();
        assert!((oracle - closed).camax() < 1e-12);
    }

    #[test]
    fn ceiling_enforced() {
        let space = SolutionSpace::binary(13).unwrap();
        assert!(matches!(dense_mixer_oracle(&space, 0.1), Err(Error::TooLarge { .. })));
    }
}
