use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::space::{SolutionSpace, SpaceKind};
use crate::state::StateVector;

/// Precomputed neighbour table of the transposition graph.
#[derive(Debug, Clone)]
pub struct TranspositionGraph {
    space: SolutionSpace,
    degree: usize,
    table: Vec<u32>,
}

impl TranspositionGraph {
    pub fn new(space: SolutionSpace) -> Result<Self> {
        if space.kind() != SpaceKind::Permutation {
            return Err(Error::WrongSpaceKind {
                expected: SpaceKind::Permutation.name(),
                actual: space.kind().name(),
            });
        }
        if space.len() > u32::MAX as usize {
            return Err(Error::TooLarge {
                what: "transposition graph",
                size: space.len() as u128,
                ceiling: u32::MAX as u128,
            });
        }
        let degree = space.degree();
        let mut table = Vec::with_capacity(space.len() * degree);
        let (mut scratch, mut nbrs) = (Vec::new(), Vec::with_capacity(degree));
        for u in 0..space.len() {
            space.neighbor_indices(u, &mut scratch, &mut nbrs);
            table.extend(nbrs.iter().map(|&w| w as u32));
        }
        Ok(TranspositionGraph { space, degree, table })
    }

    pub fn space(&self) -> &SolutionSpace {
        &self.space
    }

    /// `out = scale * A v`.
    fn matvec_scaled<T: Real>(&self, v: &[Complex<T>], scale: T, out: &mut [Complex<T>]) {
        if self.degree == 0 {
            out.iter_mut().for_each(|o| *o = Complex::new(T::zero(), T::zero()));
            return;
        }
        for (o, row) in out.iter_mut().zip(self.table.chunks_exact(self.degree)) {
            let sum: Complex<T> = row.iter().map(|&w| v[w as usize]).sum();
            *o = sum.scale(scale);
        }
    }

    /// Applies `e^{-itA}` to `state` with 2-norm error at most `tol`.
    ///
    /// Uses `e^{-i tau B} = J_0(tau) + 2 sum_m (-i)^m J_m(tau) T_m(B)` with
    /// `B = A/d` and `tau = t d`; the spectrum of `A` lies in `[-d, d]`.
    pub fn apply_exp<T: Real>(&self, state: &mut StateVector<T>, t: T, tol: f64) -> Result<()> {
        super::expect_kind(state, SpaceKind::Permutation)?;
        if *state.space() != self.space {
            return Err(Error::InvalidParameter("state and graph spaces differ".into()));
        }
        let t64 = t.f64();
        if t64 == 0.0 || self.degree == 0 {
            return Ok(());
        }
        let d = self.degree as f64;
        let tau = t64.abs() * d;
        let norm = state.norm_sqr().f64().sqrt();
        let degree = chebyshev_degree(tau, tol / norm.max(f64::MIN_POSITIVE))?;
        let ceiling = degree_ceiling(t64.abs(), d);
        if degree > ceiling {
            return Err(Error::NonConvergence {
                required: degree,
                ceiling,
            });
        }
        let bessel = bessel_j_sequence(tau, degree);
        // (-i sgn t)^m cycles through 1, -i s, -1, i s
        let sgn = t64.signum();
        let unit = |m: usize| -> Complex<f64> {
            match m % 4 {
                0 => Complex::new(1.0, 0.0),
                1 => Complex::new(0.0, -sgn),
                2 => Complex::new(-1.0, 0.0),
                _ => Complex::new(0.0, sgn),
            }
        };
        let coeff = |m: usize| -> Complex<T> {
            let c = unit(m) * if m == 0 { bessel[0] } else { 2.0 * bessel[m] };
            Complex::new(T::of(c.re), T::of(c.im))
        };

        let len = self.space.len();
        let inv_d = T::of(1.0 / d);
        let two_inv_d = T::of(2.0 / d);
        let mut prev: Vec<Complex<T>> = state.amplitudes().to_vec();
        let mut cur = vec![Complex::new(T::zero(), T::zero()); len];
        let mut next = vec![Complex::new(T::zero(), T::zero()); len];
        let mut acc: Vec<Complex<T>> = prev.iter().map(|&x| x * coeff(0)).collect();
        if degree >= 1 {
            self.matvec_scaled(&prev, inv_d, &mut cur);
            let c1 = coeff(1);
            acc.iter_mut().zip(&cur).for_each(|(a, &w)| *a += w * c1);
        }
        for m in 2..=degree {
            self.matvec_scaled(&cur, two_inv_d, &mut next);
            let cm = coeff(m);
            for ((nx, &pv), a) in next.iter_mut().zip(&prev).zip(acc.iter_mut()) {
                *nx -= pv;
                *a += *nx * cm;
            }
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
        state.amplitudes_mut().copy_from_slice(&acc);
        Ok(())
    }
}

/// Builds the transposition graph and applies one walk. Prefer
/// [`super::Mixer`] when applying repeatedly.
pub fn apply_transposition_mixer<T: Real>(state: &mut StateVector<T>, t: T, tol: f64) -> Result<()> {
    super::expect_kind(state, SpaceKind::Permutation)?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tolerance must be positive, got {tol}")));
    }
    TranspositionGraph::new(*state.space())?.apply_exp(state, t, tol)
}

fn degree_ceiling(t: f64, d: f64) -> usize {
    (10.0 * (t * d + 30.0)).ceil() as usize
}

/// Smallest truncation degree `M` with `2 sum_{m>M} |J_m(tau)| <= tol`, using
/// the bound `|J_m(tau)| <= (tau/2)^m / m!`.
pub fn chebyshev_degree(tau: f64, tol: f64) -> Result<usize> {
    if tau == 0.0 {
        return Ok(0);
    }
    let half = tau / 2.0;
    let log_half = half.ln();
    let ceiling = 10 * (tau.ceil() as usize + 30);
    let mut log_term = 0.0; // log of (tau/2)^m / m! at m = 0
    for m in 0..ceiling {
        // bound on the tail starting at m + 1
        log_term += log_half - ((m + 1) as f64).ln();
        let ratio = half / (m + 2) as f64;
        if ratio < 1.0 {
            let tail = 2.0 * log_term.exp() / (1.0 - ratio);
            if tail <= tol {
                return Ok(m);
            }
        }
    }
    Err(Error::NonConvergence {
        required: ceiling,
        ceiling,
    })
}

/// `J_0(x) .. J_max(x)` for `x >= 0` by Miller's backward recurrence,
/// normalised with `J_0 + 2 sum J_{2m} = 1`.
pub fn bessel_j_sequence(x: f64, max: usize) -> Vec<f64> {
    let mut out = vec![0.0; max + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = max.max(x.ceil() as usize);
    let mut start = top + 30 + (50.0 * top as f64).sqrt() as usize;
    start += start % 2;
    let mut j_next = 0.0;
    let mut j_cur = 1e-300;
    let mut norm = 0.0;
    for m in (1..=start).rev() {
        let j_prev = 2.0 * m as f64 / x * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        // j_cur now holds the value at order m - 1
        let order = m - 1;
        if order <= max {
            out[order] = j_cur;
        }
        if order > 0 && order % 2 == 0 {
            norm += 2.0 * j_cur;
        }
        if j_cur.abs() > 1e250 {
            j_cur *= 1e-250;
            j_next *= 1e-250;
            norm *= 1e-250;
            out.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    norm += j_cur;
    out.iter_mut().for_each(|v| *v /= norm);
    out
}
