use num_complex::Complex;

use crate::error::Result;
use crate::scalar::Real;
use crate::space::SpaceKind;
use crate::state::StateVector;

/// Walk on the hypercube: one `e^{-it sigma_x}` rotation per variable.
pub fn apply_hypercube_mixer<T: Real>(state: &mut StateVector<T>, t: T) -> Result<()> {
    super::expect_kind(state, SpaceKind::Binary)?;
    let n = state.space().n();
    let (s, c) = t.sin_cos();
    let amps = state.amplitudes_mut();
    for j in 0..n {
        let bit = 1usize << (n - 1 - j);
        for block in amps.chunks_exact_mut(2 * bit) {
            let (lo, hi) = block.split_at_mut(bit);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                // (x, y) -> (x cos t - i y sin t, -i x sin t + y cos t)
                *a = Complex::new(x.re * c + y.im * s, x.im * c - y.re * s);
                *b = Complex::new(y.re * c + x.im * s, y.im * c - x.re * s);
            }
        }
    }
    Ok(())
}
