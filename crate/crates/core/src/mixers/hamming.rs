use num_complex::Complex;

use crate::error::Result;
use crate::scalar::{cis_neg, Real};
use crate::space::SpaceKind;
use crate::state::StateVector;

/// Walk on the Hamming graph `H(n, k)` in phase-free product form.
///
/// Each variable axis applies `e^{-ikt}|k><k| + (1 - |k><k|)`, i.e. every
/// group of `k` amplitudes sharing the other variables is shifted by
/// `(e^{-ikt} - 1)/k` times its sum. The result equals `e^{-int} e^{-itA}`.
pub fn apply_hamming_mixer<T: Real>(state: &mut StateVector<T>, t: T) -> Result<()> {
    super::expect_kind(state, SpaceKind::Integer)?;
    let space = *state.space();
    let (n, k) = (space.n(), space.k());
    let kt = T::of(k as f64);
    let shift = (cis_neg(kt * t) - Complex::new(T::one(), T::zero())).unscale(kt);
    let amps = state.amplitudes_mut();
    for j in 0..n {
        let stride = space.stride(j);
        for block in amps.chunks_exact_mut(k * stride) {
            for offset in 0..stride {
                let sum: Complex<T> = (0..k).map(|v| block[v * stride + offset]).sum();
                let delta = shift * sum;
                for v in 0..k {
                    block[v * stride + offset] += delta;
                }
            }
        }
    }
    Ok(())
}
