//! Diagnostics: the subset-mean condition fit, iteration traces and
//! objective distributions, plus their tabular output.
//!
//! The condition relates the mean objective `mu_{h,x}` over the solutions at
//! distance `h` from `x` to the deviation of `x` itself:
//!
//! ```text
//! mu_{h,x} - f(x) ~= -alpha_h (f(x) - mu)
//! ```
//!
//! `alpha_h` is fitted by least squares through the origin.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::engine::{prepare_amplified_state, IterationTrace, Landscape, RunParams};
use crate::error::{Error, Result};
use crate::problems::{self, Optimum};
use crate::space::{SolutionSpace, SpaceKind};
use crate::state::StateVector;

/// Bins used for the binned condition summary.
pub const CONDITION_BINS: usize = 200;
/// Largest binary/integer space fitted exhaustively.
pub const EXHAUSTIVE_PRODUCT_CEILING: usize = 1 << 20;
/// Largest permutation space fitted exhaustively (cost grows as `N^2`).
pub const EXHAUSTIVE_PERMUTATION_CEILING: usize = 5040;
pub const DEFAULT_REFERENCES: usize = 256;
pub const DEFAULT_MEMBERS: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum FitMode {
    /// Every solution as a reference and every subset member.
    Exhaustive,
    /// Uniform reference solutions with uniform draws from each subset.
    Sampled { references: usize, members: usize, seed: u64 },
}

impl FitMode {
    pub fn sampled(seed: u64) -> Self {
        FitMode::Sampled {
            references: DEFAULT_REFERENCES,
            members: DEFAULT_MEMBERS,
            seed,
        }
    }
}

/// One bin of `z = -(f(x) - mu)` with the spread of `y = mu_{h,x} - f(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub mean_z: f64,
    pub mean_y: f64,
    pub std_y: f64,
}

/// Condition fit at one distance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetStats {
    pub h: usize,
    /// Members per subset (identical for every reference).
    pub size: u64,
    /// Subset members averaged per reference.
    pub members: usize,
    pub references: usize,
    /// Reference-averaged `mu_{h,x}`.
    pub mean_subset: f64,
    pub alpha: f64,
    pub std_err: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    pub bins: Vec<Bin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionFit {
    pub mode: FitMode,
    pub mu: f64,
    pub sigma: f64,
    pub rows: Vec<SubsetStats>,
}

impl ConditionFit {
    pub fn alphas(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.alpha).collect()
    }
}

/// Fits `alpha_h` for every `h` in `1..=D` on the objective table `values`.
pub fn condition_fit(space: &SolutionSpace, values: &[f64], mode: FitMode) -> Result<ConditionFit> {
    if values.len() != space.len() {
        return Err(Error::LengthMismatch {
            expected: space.len(),
            actual: values.len(),
        });
    }
    let mu = problems::mean(values);
    let sigma = problems::population_std(values);
    let sizes = space.subset_sizes();
    let dmax = space.diameter();
    // samples[h][r] = (f(x_r), mu_{h, x_r})
    let (references, members, samples) = match mode {
        FitMode::Exhaustive => {
            let sums = subset_sums(space, values)?;
            let per_h = (1..=dmax)
                .map(|h| {
                    (0..space.len())
                        .map(|x| (values[x], sums[x * (dmax + 1) + h] / sizes[h] as f64))
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>();
            (space.len(), None, per_h)
        }
        FitMode::Sampled {
            references,
            members,
            seed,
        } => {
            if references < 2 || members == 0 {
                return Err(Error::InvalidParameter(
                    "sampled fit needs at least 2 references and 1 member".into(),
                ));
            }
            let mut rng = crate::rng(seed);
            let mut x = vec![0; space.n()];
            let refs: Vec<usize> = (0..references).map(|_| space.random_index(&mut rng)).collect();
            let mut per_h = vec![Vec::with_capacity(references); dmax];
            for &r in &refs {
                space.decode_into(r, &mut x);
                for h in 1..=dmax {
                    if sizes[h] == 0 {
                        return Err(Error::EmptySubset(h));
                    }
                    let draws = members.min(sizes[h] as usize).max(1);
                    let total: f64 = (0..draws)
                        .map(|_| values[space.index_of_unchecked(&space.sample_at_distance(&x, h, &mut rng))])
                        .sum();
                    per_h[h - 1].push((values[r], total / draws as f64));
                }
            }
            (references, Some(members), per_h)
        }
    };
    let rows = samples
        .into_iter()
        .enumerate()
        .map(|(i, pairs)| {
            let h = i + 1;
            let mut stats = fit_through_origin(&pairs, mu);
            stats.h = h;
            stats.size = sizes[h];
            stats.members = members.map_or(sizes[h] as usize, |m| m.min(sizes[h] as usize));
            stats.references = references;
            stats
        })
        .collect();
    Ok(ConditionFit { mode, mu, sigma, rows })
}

fn fit_through_origin(pairs: &[(f64, f64)], mu: f64) -> SubsetStats {
    let zy: Vec<(f64, f64)> = pairs.iter().map(|&(f, m)| (mu - f, m - f)).collect();
    let szz: f64 = zy.iter().map(|(z, _)| z * z).sum();
    let szy: f64 = zy.iter().map(|(z, y)| z * y).sum();
    let alpha = if szz > 0.0 { szy / szz } else { 0.0 };
    let sse: f64 = zy.iter().map(|(z, y)| (y - alpha * z).powi(2)).sum();
    let m = zy.len();
    let std_err = if szz > 0.0 && m > 1 {
        (sse / (m - 1) as f64 / szz).sqrt()
    } else {
        0.0
    };
    SubsetStats {
        h: 0,
        size: 0,
        members: 0,
        references: m,
        mean_subset: pairs.iter().map(|p| p.1).sum::<f64>() / m as f64,
        alpha,
        std_err,
        residual: (sse / m as f64).sqrt(),
        bins: bin_pairs(&zy, CONDITION_BINS),
    }
}

/// Equal-width bins over the observed `z` range; empty bins are dropped.
fn bin_pairs(zy: &[(f64, f64)], bins: usize) -> Vec<Bin> {
    let (lo, hi) = zy
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &(z, _)| (a.min(z), b.max(z)));
    if !(lo.is_finite() && hi.is_finite()) {
        return Vec::new();
    }
    let width = (hi - lo) / bins as f64;
    let mut acc = vec![(0usize, 0.0, 0.0, 0.0); bins];
    for &(z, y) in zy {
        let b = if width > 0.0 {
            (((z - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        let a = &mut acc[b];
        a.0 += 1;
        a.1 += z;
        a.2 += y;
        a.3 += y * y;
    }
    acc.iter()
        .enumerate()
        .filter(|(_, a)| a.0 > 0)
        .map(|(b, &(count, sz, sy, syy))| {
            let c = count as f64;
            let mean_y = sy / c;
            Bin {
                lo: lo + width * b as f64,
                hi: if b + 1 == bins { hi } else { lo + width * (b + 1) as f64 },
                count,
                mean_z: sz / c,
                mean_y,
                std_y: (syy / c - mean_y * mean_y).max(0.0).sqrt(),
            }
        })
        .collect()
}

/// `S[x * (D + 1) + h] = sum_{y : d(x, y) = h} f(y)` for every solution.
pub fn subset_sums(space: &SolutionSpace, values: &[f64]) -> Result<Vec<f64>> {
    match space.kind() {
        SpaceKind::Binary | SpaceKind::Integer => {
            if space.len() > EXHAUSTIVE_PRODUCT_CEILING {
                return Err(Error::TooLarge {
                    what: "exhaustive condition fit",
                    size: space.len() as u128,
                    ceiling: EXHAUSTIVE_PRODUCT_CEILING as u128,
                });
            }
            Ok(product_subset_sums(space, values))
        }
        SpaceKind::Permutation => {
            if space.len() > EXHAUSTIVE_PERMUTATION_CEILING {
                return Err(Error::TooLarge {
                    what: "exhaustive condition fit",
                    size: space.len() as u128,
                    ceiling: EXHAUSTIVE_PERMUTATION_CEILING as u128,
                });
            }
            Ok(permutation_subset_sums(space, values))
        }
    }
}

/// Distance generating polynomials `sum_y f(y) z^{d(x,y)}`, built one axis at
/// a time: along an axis the value either stays (`1`) or changes (`z`).
fn product_subset_sums(space: &SolutionSpace, values: &[f64]) -> Vec<f64> {
    let (n, k, len) = (space.n(), space.k(), space.len());
    let w = n + 1;
    let mut poly = vec![0.0; len * w];
    for (x, &f) in values.iter().enumerate() {
        poly[x * w] = f;
    }
    let mut total = vec![0.0; w];
    for j in 0..n {
        let stride = space.stride(j);
        for block in (0..len).step_by(stride * k) {
            for off in 0..stride {
                let base = block + off;
                total.iter_mut().for_each(|t| *t = 0.0);
                for a in 0..k {
                    let x = base + a * stride;
                    total.iter_mut().zip(&poly[x * w..(x + 1) * w]).for_each(|(t, p)| *t += p);
                }
                for a in 0..k {
                    let x = base + a * stride;
                    let row = &mut poly[x * w..(x + 1) * w];
                    // p + z (total - p), shifting from the top down
                    for d in (0..w).rev() {
                        let shifted = if d > 0 { total[d - 1] - row[d - 1] } else { 0.0 };
                        row[d] += shifted;
                    }
                }
            }
        }
    }
    poly
}

fn permutation_subset_sums(space: &SolutionSpace, values: &[f64]) -> Vec<f64> {
    let (n, len) = (space.n(), space.len());
    let w = space.diameter() + 1;
    let identity: Vec<usize> = (0..n).collect();
    let mut sigma = vec![0; n];
    let moves: Vec<(Vec<usize>, usize)> = (0..len)
        .map(|i| {
            space.decode_into(i, &mut sigma);
            (sigma.clone(), space.distance_unchecked(&identity, &sigma))
        })
        .collect();
    let mut out = vec![0.0; len * w];
    let (mut x, mut y) = (vec![0; n], vec![0; n]);
    for u in 0..len {
        space.decode_into(u, &mut x);
        let row = &mut out[u * w..(u + 1) * w];
        for (s, h) in &moves {
            for (yi, &xi) in y.iter_mut().zip(&x) {
                *yi = s[xi];
            }
            row[*h] += values[space.index_of_unchecked(&y)];
        }
    }
    out
}

/// Probability trace of `tracked` (the optimum set when `None`) over the
/// `p` iterations of a run.
pub fn iteration_probability_trace(
    landscape: &Landscape,
    params: &RunParams,
    tracked: Option<&[usize]>,
) -> Result<IterationTrace> {
    match tracked {
        None => Ok(prepare_amplified_state(landscape, params)?.1),
        Some([]) => Err(Error::InvalidParameter("tracked set is empty".into())),
        Some(set) => {
            if let Some(&i) = set.iter().find(|&&i| i >= landscape.space().len()) {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: landscape.space().len(),
                });
            }
            let mut custom = landscape.clone();
            custom.optimum = Optimum {
                value: landscape.optimum.value,
                indices: set.to_vec(),
            };
            Ok(prepare_amplified_state(&custom, params)?.1)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HistogramAxis {
    /// `f(x) / f(x*)`.
    Ratio,
    /// `f(x)` under `lambda_F`.
    Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub axis: HistogramAxis,
    /// `bins + 1` edges; bin `b` covers `[edges[b], edges[b + 1])`, the last closed.
    pub edges: Vec<f64>,
    pub masses: Vec<f64>,
}

/// Axis a family's distribution plots use: penalised objectives are shown as
/// values, the rest as approximation ratios unless the optimum is zero.
pub fn default_axis(landscape: &Landscape) -> HistogramAxis {
    if landscape.instance.has_penalties() || landscape.optimum.value == 0.0 {
        HistogramAxis::Value
    } else {
        HistogramAxis::Ratio
    }
}

/// Bins the measurement distribution of `state` over the instance's range of
/// objective values (or ratios).
pub fn ratio_histogram<T: crate::Real>(
    state: &StateVector<T>,
    landscape: &Landscape,
    bins: usize,
    axis: HistogramAxis,
) -> Result<Histogram> {
    if bins == 0 {
        return Err(Error::InvalidParameter("histogram needs at least one bin".into()));
    }
    if state.space() != landscape.space() {
        return Err(Error::InvalidParameter("state and instance spaces differ".into()));
    }
    let scale = match axis {
        HistogramAxis::Ratio if landscape.optimum.value == 0.0 => return Err(Error::ZeroOptimum),
        HistogramAxis::Ratio => 1.0 / landscape.optimum.value,
        HistogramAxis::Value => 1.0,
    };
    let coords: Vec<f64> = landscape.eval_values.iter().map(|v| v * scale).collect();
    let (lo, hi) = coords
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &c| (a.min(c), b.max(c)));
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..=bins).map(|b| lo + width * b as f64).collect();
    edges[bins] = hi;
    let mut masses = vec![0.0; bins];
    for (c, a) in coords.iter().zip(state.amplitudes()) {
        let b = if width > 0.0 {
            (((c - lo) / width) as usize).min(bins - 1)
        } else {
            0
        };
        masses[b] += a.norm_sqr().f64();
    }
    let total: f64 = masses.iter().sum();
    masses.iter_mut().for_each(|m| *m /= total);
    Ok(Histogram { axis, edges, masses })
}

fn digest_line<W: Write>(out: &mut W, digest: &str) -> std::io::Result<()> {
    writeln!(out, "# digest: {digest}")
}

fn csv_writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().from_writer(out)
}

fn io_err(e: impl std::fmt::Display) -> Error {
    Error::Document(e.to_string())
}

/// One row per distance: `h,size,members,references,mean_subset,alpha,std_err,residual`.
pub fn write_condition_fit<W: Write>(mut out: W, fit: &ConditionFit, digest: &str) -> Result<()> {
    digest_line(&mut out, digest).map_err(io_err)?;
    let mut w = csv_writer(out);
    w.write_record(["h", "size", "members", "references", "mean_subset", "alpha", "std_err", "residual"])
        .map_err(io_err)?;
    for r in &fit.rows {
        w.write_record([
            r.h.to_string(),
            r.size.to_string(),
            r.members.to_string(),
            r.references.to_string(),
            r.mean_subset.to_string(),
            r.alpha.to_string(),
            r.std_err.to_string(),
            r.residual.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// Non-empty bins of every distance: `h,lo,hi,count,mean_z,mean_y,std_y`.
pub fn write_condition_bins<W: Write>(mut out: W, fit: &ConditionFit, digest: &str) -> Result<()> {
    digest_line(&mut out, digest).map_err(io_err)?;
    let mut w = csv_writer(out);
    w.write_record(["h", "lo", "hi", "count", "mean_z", "mean_y", "std_y"])
        .map_err(io_err)?;
    for r in &fit.rows {
        for b in &r.bins {
            w.write_record([
                r.h.to_string(),
                b.lo.to_string(),
                b.hi.to_string(),
                b.count.to_string(),
                b.mean_z.to_string(),
                b.mean_y.to_string(),
                b.std_y.to_string(),
            ])
            .map_err(io_err)?;
        }
    }
    w.flush().map_err(io_err)
}

/// `iteration,gamma,t,expectation,norm_drift,tracked_total,p_<index>...`
pub fn write_trace<W: Write>(mut out: W, trace: &IterationTrace, digest: &str) -> Result<()> {
    digest_line(&mut out, digest).map_err(io_err)?;
    let mut w = csv_writer(out);
    let mut header: Vec<String> = ["iteration", "gamma", "t", "expectation", "norm_drift", "tracked_total"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(trace.tracked.iter().map(|i| format!("p_{i}")));
    w.write_record(&header).map_err(io_err)?;
    for row in 0..trace.rows() {
        let mut rec = vec![
            row.to_string(),
            trace.gammas[row].to_string(),
            trace.times[row].to_string(),
            trace.expectation[row].to_string(),
            trace.norm_drift[row].to_string(),
            trace.tracked_total(row).to_string(),
        ];
        rec.extend(trace.probabilities[row].iter().map(|p| p.to_string()));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

/// `axis,lo,hi,mass`
pub fn write_histogram<W: Write>(mut out: W, hist: &Histogram, digest: &str) -> Result<()> {
    digest_line(&mut out, digest).map_err(io_err)?;
    let mut w = csv_writer(out);
    w.write_record(["axis", "lo", "hi", "mass"]).map_err(io_err)?;
    let axis = match hist.axis {
        HistogramAxis::Ratio => "ratio",
        HistogramAxis::Value => "value",
    };
    for (b, m) in hist.masses.iter().enumerate() {
        w.write_record([
            axis.to_string(),
            hist.edges[b].to_string(),
            hist.edges[b + 1].to_string(),
            m.to_string(),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(io_err)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::AmplifyParams;
    use crate::problems::{generate_instance, Family, SizeParams};

    fn brute_sums(space: &SolutionSpace, values: &[f64]) -> Vec<f64> {
        let w = space.diameter() + 1;
        let sols: Vec<_> = space.iter().collect();
        let mut out = vec![0.0; space.len() * w];
        for (u, a) in sols.iter().enumerate() {
            for (v, b) in sols.iter().enumerate() {
                out[u * w + space.graph_distance(a, b).unwrap()] += values[v];
            }
        }
        out
    }

    #[test]
    fn subset_sums_match_brute_force() {
        for space in [
            SolutionSpace::binary(5).unwrap(),
            SolutionSpace::integer(4, 3).unwrap(),
            SolutionSpace::permutation(4).unwrap(),
        ] {
            let values: Vec<f64> = (0..space.len()).map(|i| ((i * 7919) % 23) as f64 - 5.0).collect();
            let fast = subset_sums(&space, &values).unwrap();
            let slow = brute_sums(&space, &values);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn constant_objective_gives_zero_alpha() {
        let space = SolutionSpace::integer(4, 3).unwrap();
        let fit = condition_fit(&space, &vec![2.5; space.len()], FitMode::Exhaustive).unwrap();
        assert!(fit.rows.iter().all(|r| r.alpha == 0.0));
        assert_eq!(fit.rows.len(), space.diameter());
    }

    #[test]
    fn exhaustive_sizes_sum_to_n() {
        let space = SolutionSpace::permutation(5).unwrap();
        let values: Vec<f64> = (0..space.len()).map(|i| (i % 13) as f64).collect();
        let fit = condition_fit(&space, &values, FitMode::Exhaustive).unwrap();
        let total: u64 = fit.rows.iter().map(|r| r.size).sum::<u64>() + 1;
        assert_eq!(total, space.len() as u64);
    }

    #[test]
    fn linear_objective_alpha_is_exact() {
        // f = number of ones: mu_{h,x} - f(x) = -2h/n (f(x) - n/2)
        let n = 8;
        let space = SolutionSpace::binary(n).unwrap();
        let values: Vec<f64> = (0..space.len()).map(|i| (i as u32).count_ones() as f64).collect();
        let fit = condition_fit(&space, &values, FitMode::Exhaustive).unwrap();
        for r in &fit.rows {
            assert!((r.alpha - 2.0 * r.h as f64 / n as f64).abs() < 1e-12);
            assert!(r.residual < 1e-12);
        }
    }

    #[test]
    fn histogram_of_point_mass() {
        let inst = generate_instance(Family::Maxcut, SizeParams::new(6, 2), 1).unwrap();
        let land = Landscape::new(inst).unwrap();
        let idx = land.optimum.indices[0];
        let state = StateVector::<f64>::basis(*land.space(), idx).unwrap();
        let h = ratio_histogram(&state, &land, 10, HistogramAxis::Ratio).unwrap();
        assert_eq!(h.masses[9], 1.0);
        assert_eq!(*h.edges.last().unwrap(), 1.0);
    }

    #[test]
    fn histogram_zero_optimum_rejected() {
        let inst = crate::problems::ProblemInstance::new(
            Family::Maxcut,
            SolutionSpace::binary(3).unwrap(),
            0,
            crate::problems::ProblemData::Maxcut(crate::problems::MaxcutData { edges: vec![] }),
            vec![],
        )
        .unwrap();
        let land = Landscape::new(inst).unwrap();
        let state = StateVector::<f64>::equal_superposition(*land.space()).unwrap();
        assert!(matches!(
            ratio_histogram(&state, &land, 5, HistogramAxis::Ratio),
            Err(Error::ZeroOptimum)
        ));
        assert_eq!(default_axis(&land), HistogramAxis::Value);
    }

    #[test]
    fn trace_csv_has_p_plus_two_lines_after_comment() {
        let inst = generate_instance(Family::Mis, SizeParams::new(6, 2), 2).unwrap();
        let land = Landscape::new(inst).unwrap();
        let params = RunParams::new(AmplifyParams::new(3, 1.0, 0.2, 0.5));
        let trace = iteration_probability_trace(&land, &params, None).unwrap();
        let mut buf = Vec::new();
        write_trace(&mut buf, &trace, "abc").unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# digest: abc");
        assert!(lines[1].starts_with("iteration,gamma,t,expectation"));
        assert_eq!(lines.len(), 2 + 4);
        assert!(iteration_probability_trace(&land, &params, Some(&[])).is_err());
    }
}
