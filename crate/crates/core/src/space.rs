//! Feasible solution sets, their indexing, and mixing-graph structure.
//!
//! Three families are supported:
//!
//! * `Binary`: `{0,1}^n` on the hypercube (single bit flips).
//! * `Integer`: `{0..k-1}^n` on the Hamming graph `H(n, k)` (single substitutions).
//! * `Permutation`: permutations of `0..n` on the transposition graph (single swaps).
//!
//! Binary and integer solutions are indexed by mixed-radix positional encoding
//! with the first variable most significant. Permutations are indexed by their
//! lexicographic rank (Lehmer code).

use std::fmt;
use std::ops::Deref;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on exhaustive enumeration of a distance partition.
pub const ENUMERATION_CEILING: usize = 1 << 22;

/// Largest space the indexing layer will construct.
pub const SPACE_CEILING: u128 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpaceKind {
    Binary,
    Integer,
    Permutation,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            SpaceKind::Binary => "binary",
            SpaceKind::Integer => "integer",
            SpaceKind::Permutation => "permutation",
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A candidate solution: one value per decision variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Solution(Vec<usize>);

impl Solution {
    pub fn new(values: Vec<usize>) -> Self {
        Solution(values)
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<usize> {
        self.0
    }
}

impl Deref for Solution {
    type Target = [usize];

    fn deref(&self) -> &[usize] {
        &self.0
    }
}

impl From<Vec<usize>> for Solution {
    fn from(values: Vec<usize>) -> Self {
        Solution(values)
    }
}

impl<const M: usize> From<[usize; M]> for Solution {
    fn from(values: [usize; M]) -> Self {
        Solution(values.to_vec())
    }
}

impl fmt::Display for Solution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// The feasible set together with its mixing graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SolutionSpace {
    kind: SpaceKind,
    n: usize,
    k: usize,
    size: usize,
}

impl SolutionSpace {
    pub fn binary(n: usize) -> Result<Self> {
        Self::new(SpaceKind::Binary, n, 2)
    }

    /// Integer space `{0..k-1}^n`. `k = 2` is accepted so the Hamming mixer
    /// can be compared against the hypercube.
    pub fn integer(n: usize, k: usize) -> Result<Self> {
        Self::new(SpaceKind::Integer, n, k)
    }

    pub fn permutation(n: usize) -> Result<Self> {
        Self::new(SpaceKind::Permutation, n, n)
    }

    pub fn new(kind: SpaceKind, n: usize, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("variable count must be positive".into()));
        }
        let size: u128 = match kind {
            SpaceKind::Binary => {
                if k != 2 {
                    return Err(Error::InvalidParameter(format!(
                        "binary space requires k=2, got {k}"
                    )));
                }
                checked_pow(2, n)
            }
            SpaceKind::Integer => {
                if k < 2 {
                    return Err(Error::InvalidParameter(format!(
                        "integer space requires k>=2, got {k}"
                    )));
                }
                checked_pow(k as u128, n)
            }
            SpaceKind::Permutation => {
                if k != n {
                    return Err(Error::InvalidParameter(format!(
                        "permutation space requires k=n, got n={n}, k={k}"
                    )));
                }
                (1..=n as u128).try_fold(1u128, |acc, m| acc.checked_mul(m)).unwrap_or(u128::MAX)
            }
        };
        if size > SPACE_CEILING {
            return Err(Error::TooLarge {
                what: "solution space",
                size,
                ceiling: SPACE_CEILING,
            });
        }
        Ok(SolutionSpace {
            kind,
            n,
            k,
            size: size as usize,
        })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    /// Number of decision variables.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Alphabet size of each variable.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of feasible solutions `N`.
    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    /// Mixing-graph degree `d`.
    pub fn degree(&self) -> usize {
        match self.kind {
            SpaceKind::Binary => self.n,
            SpaceKind::Integer => self.n * (self.k - 1),
            SpaceKind::Permutation => self.n * (self.n - 1) / 2,
        }
    }

    /// Mixing-graph diameter `D`.
    pub fn diameter(&self) -> usize {
        match self.kind {
            SpaceKind::Binary | SpaceKind::Integer => self.n,
            SpaceKind::Permutation => self.n - 1,
        }
    }

    /// Positional weight of variable `j` in the mixed-radix encoding.
    pub(crate) fn stride(&self, j: usize) -> usize {
        debug_assert!(self.kind != SpaceKind::Permutation);
        self.k.pow((self.n - 1 - j) as u32)
    }

    pub fn validate(&self, x: &[usize]) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::Encoding(format!(
                "expected {} variables, got {}",
                self.n,
                x.len()
            )));
        }
        if let Some(&v) = x.iter().find(|&&v| v >= self.k) {
            return Err(Error::Encoding(format!(
                "value {v} outside [0, {}]",
                self.k - 1
            )));
        }
        if self.kind == SpaceKind::Permutation {
            let mut seen = 0u64;
            for &v in x {
                if seen & (1 << v) != 0 {
                    return Err(Error::Encoding(format!("repeated permutation element {v}")));
                }
                seen |= 1 << v;
            }
        }
        Ok(())
    }

    pub fn index_of(&self, x: &[usize]) -> Result<usize> {
        self.validate(x)?;
        Ok(self.index_of_unchecked(x))
    }

    pub(crate) fn index_of_unchecked(&self, x: &[usize]) -> usize {
        match self.kind {
            SpaceKind::Binary | SpaceKind::Integer => {
                x.iter().fold(0usize, |acc, &v| acc * self.k + v)
            }
            SpaceKind::Permutation => lehmer_rank(x),
        }
    }

    pub fn solution_of(&self, index: usize) -> Result<Solution> {
        if index >= self.size {
            return Err(Error::IndexOutOfRange {
                index,
                size: self.size,
            });
        }
        let mut values = vec![0; self.n];
        self.decode_into(index, &mut values);
        Ok(Solution(values))
    }

    /// Decodes `index` into a caller-provided buffer of length `n`.
    pub fn decode_into(&self, index: usize, out: &mut [usize]) {
        debug_assert!(index < self.size && out.len() == self.n);
        match self.kind {
            SpaceKind::Binary | SpaceKind::Integer => {
                let mut rest = index;
                for slot in out.iter_mut().rev() {
                    *slot = rest % self.k;
                    rest /= self.k;
                }
            }
            SpaceKind::Permutation => lehmer_unrank(index, out),
        }
    }

    /// Iterates over all solutions in index order.
    pub fn iter(&self) -> impl Iterator<Item = Solution> + '_ {
        (0..self.size).map(move |i| {
            let mut values = vec![0; self.n];
            self.decode_into(i, &mut values);
            Solution(values)
        })
    }

    /// All `d` nearest neighbours of `x`, in position-major, value-ascending order.
    pub fn neighbors(&self, x: &[usize]) -> Result<Vec<Solution>> {
        self.validate(x)?;
        let mut out = Vec::with_capacity(self.degree());
        match self.kind {
            SpaceKind::Binary | SpaceKind::Integer => {
                for j in 0..self.n {
                    for v in (0..self.k).filter(|&v| v != x[j]) {
                        let mut y = x.to_vec();
                        y[j] = v;
                        out.push(Solution(y));
                    }
                }
            }
            SpaceKind::Permutation => {
                for i in 0..self.n {
                    for j in i + 1..self.n {
                        let mut y = x.to_vec();
                        y.swap(i, j);
                        out.push(Solution(y));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Neighbour indices of the solution at `index`, same order as [`neighbors`](Self::neighbors).
    pub fn neighbor_indices(&self, index: usize, scratch: &mut Vec<usize>, out: &mut Vec<usize>) {
        out.clear();
        match self.kind {
            SpaceKind::Binary => {
                for j in 0..self.n {
                    out.push(index ^ (1 << (self.n - 1 - j)));
                }
            }
            SpaceKind::Integer => {
                for j in 0..self.n {
                    let stride = self.stride(j);
                    let digit = (index / stride) % self.k;
                    let base = index - digit * stride;
                    for v in (0..self.k).filter(|&v| v != digit) {
                        out.push(base + v * stride);
                    }
                }
            }
            SpaceKind::Permutation => {
                scratch.resize(self.n, 0);
                lehmer_unrank(index, scratch);
                for i in 0..self.n {
                    for j in i + 1..self.n {
                        scratch.swap(i, j);
                        out.push(lehmer_rank(scratch));
                        scratch.swap(i, j);
                    }
                }
            }
        }
    }

    /// Minimum number of moves between `u` and `v`.
    pub fn graph_distance(&self, u: &[usize], v: &[usize]) -> Result<usize> {
        self.validate(u)?;
        self.validate(v)?;
        Ok(self.distance_unchecked(u, v))
    }

    pub(crate) fn distance_unchecked(&self, u: &[usize], v: &[usize]) -> usize {
        match self.kind {
            SpaceKind::Binary | SpaceKind::Integer => {
                u.iter().zip(v).filter(|(a, b)| a != b).count()
            }
            SpaceKind::Permutation => cayley_distance(u, v),
        }
    }

    /// Closed-form sizes of the distance subsets `h = 0..=D` around any vertex.
    pub fn subset_sizes(&self) -> Vec<u64> {
        match self.kind {
            SpaceKind::Binary | SpaceKind::Integer => (0..=self.n)
                .map(|h| binomial(self.n, h) * ((self.k - 1) as u64).pow(h as u32))
                .collect(),
            SpaceKind::Permutation => {
                let table = stirling_first_kind(self.n);
                (0..self.n).map(|h| table[self.n][self.n - h] as u64).collect()
            }
        }
    }

    /// Splits the space into the subsets at each distance from `u`.
    pub fn distance_partition(&self, u: &[usize], mode: PartitionMode) -> Result<DistancePartition> {
        self.validate(u)?;
        let sizes = self.subset_sizes();
        match mode {
            PartitionMode::Exhaustive => {
                if self.size > ENUMERATION_CEILING {
                    return Err(Error::TooLarge {
                        what: "exhaustive partition",
                        size: self.size as u128,
                        ceiling: ENUMERATION_CEILING as u128,
                    });
                }
                let mut members = vec![Vec::new(); self.diameter() + 1];
                let mut buf = vec![0; self.n];
                for i in 0..self.size {
                    self.decode_into(i, &mut buf);
                    members[self.distance_unchecked(u, &buf)].push(i);
                }
                Ok(DistancePartition {
                    members,
                    sizes,
                    exhaustive: true,
                })
            }
            PartitionMode::Sampled { per_subset, seed } => {
                let mut rng = crate::rng(seed);
                let members = (0..=self.diameter())
                    .map(|h| {
                        (0..per_subset)
                            .map(|_| {
                                let v = self.sample_at_distance(u, h, &mut rng);
                                self.index_of_unchecked(&v)
                            })
                            .collect()
                    })
                    .collect();
                Ok(DistancePartition {
                    members,
                    sizes,
                    exhaustive: false,
                })
            }
        }
    }

    /// Draws a solution uniformly from the subset at distance `h` from `u`.
    pub fn sample_at_distance<R: Rng + ?Sized>(&self, u: &[usize], h: usize, rng: &mut R) -> Vec<usize> {
        assert!(h <= self.diameter(), "distance {h} beyond diameter");
        match self.kind {
            SpaceKind::Binary | SpaceKind::Integer => {
                let mut positions: Vec<usize> = (0..self.n).collect();
                let mut v = u.to_vec();
                for m in 0..h {
                    let pick = rng.random_range(m..self.n);
                    positions.swap(m, pick);
                    let j = positions[m];
                    // uniform over the k-1 values different from u[j]
                    let r = rng.random_range(0..self.k - 1);
                    v[j] = if r >= u[j] { r + 1 } else { r };
                }
                v
            }
            SpaceKind::Permutation => {
                let sigma = random_permutation_with_cycles(self.n, self.n - h, rng);
                u.iter().map(|&x| sigma[x]).collect()
            }
        }
    }

    pub fn random_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        rng.random_range(0..self.size)
    }
}

/// How to populate a [`DistancePartition`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PartitionMode {
    Exhaustive,
    /// Uniform draws (with replacement) from each subset.
    Sampled { per_subset: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistancePartition {
    /// Member indices per distance `h = 0..=D`.
    pub members: Vec<Vec<usize>>,
    /// True subset sizes per distance.
    pub sizes: Vec<u64>,
    pub exhaustive: bool,
}

fn checked_pow(base: u128, exp: usize) -> u128 {
    (0..exp).try_fold(1u128, |acc, _| acc.checked_mul(base)).unwrap_or(u128::MAX)
}

pub(crate) fn binomial(n: usize, r: usize) -> u64 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Lexicographic rank of a permutation of `0..n`.
pub(crate) fn lehmer_rank(x: &[usize]) -> usize {
    let n = x.len();
    let mut used = 0u64;
    let mut rank = 0usize;
    for (i, &v) in x.iter().enumerate() {
        let smaller_used = (used & ((1u64 << v) - 1)).count_ones() as usize;
        rank = rank * (n - i) + (v - smaller_used);
        used |= 1 << v;
    }
    rank
}

pub(crate) fn lehmer_unrank(mut rank: usize, out: &mut [usize]) {
    let n = out.len();
    // factorial-base digits, least significant last
    for i in (0..n).rev() {
        let radix = n - i;
        out[i] = rank % radix;
        rank /= radix;
    }
    let mut available = (1u64 << n) - 1;
    for slot in out.iter_mut() {
        let mut skip = *slot;
        let mut bits = available;
        while skip > 0 {
            bits &= bits - 1;
            skip -= 1;
        }
        let v = bits.trailing_zeros() as usize;
        *slot = v;
        available &= !(1 << v);
    }
}

/// `n` minus the number of cycles of `u^{-1} v`.
fn cayley_distance(u: &[usize], v: &[usize]) -> usize {
    let n = u.len();
    let mut inv_u = vec![0; n];
    for (i, &x) in u.iter().enumerate() {
        inv_u[x] = i;
    }
    let mut visited = vec![false; n];
    let mut cycles = 0;
    for start in 0..n {
        if visited[start] {
            continue;
        }
        cycles += 1;
        let mut i = start;
        while !visited[i] {
            visited[i] = true;
            i = inv_u[v[i]];
        }
    }
    n - cycles
}

/// Unsigned Stirling numbers of the first kind, `table[m][c]` for `m <= n`.
pub(crate) fn stirling_first_kind(n: usize) -> Vec<Vec<u128>> {
    let mut table = vec![vec![0u128; n + 1]; n + 1];
    table[0][0] = 1;
    for m in 1..=n {
        for c in 1..=m {
            table[m][c] = table[m - 1][c - 1] + (m as u128 - 1) * table[m - 1][c];
        }
    }
    table
}

/// Uniform permutation of `0..n` with exactly `cycles` cycles.
fn random_permutation_with_cycles<R: Rng + ?Sized>(n: usize, cycles: usize, rng: &mut R) -> Vec<usize> {
    let table = stirling_first_kind(n);
    // Walk down from m = n deciding, for each element, whether it opens a new
    // cycle or joins an existing one.
    let mut joins_after: Vec<Option<usize>> = vec![None; n];
    let mut c = cycles;
    for m in (1..=n).rev() {
        let element = m - 1;
        let total = table[m][c] as f64;
        let fresh = if c >= 1 { table[m - 1][c - 1] as f64 } else { 0.0 };
        if rng.random::<f64>() * total < fresh {
            joins_after[element] = None;
            c -= 1;
        } else {
            joins_after[element] = Some(rng.random_range(0..element));
        }
    }
    let mut sigma: Vec<usize> = (0..n).collect();
    for element in 0..n {
        if let Some(prev) = joins_after[element] {
            sigma[element] = sigma[prev];
            sigma[prev] = element;
        }
    }
    sigma
}
