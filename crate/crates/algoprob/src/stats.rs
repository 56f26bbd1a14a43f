//! Rank-correlation statistics between tuple distributions: Spearman's rho
//! under two tie policies, permutation-test significance, correlation
//! matrices with significance markers, total-variation distances and the
//! algorithmicity report.

use rayon::prelude::*;
use serde::Serialize;

use crate::distribution::{tuple_label, TupleCode, TupleDistribution};
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::{derive_seed, Xoshiro256};

/// How tied probabilities are ranked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TiePolicy {
    /// Strict ranks broken by lexicographic tuple order, then the textbook
    /// difference formula `rho = 1 - 6*sum(d^2) / (n(n^2-1))`. Only valid
    /// as a correlation when ties are absent; kept for comparability.
    Paper,
    /// Average (fractional) ranks with Pearson correlation on the rank
    /// vectors; exact in the presence of ties. The default.
    #[default]
    Fractional,
}

impl std::fmt::Display for TiePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TiePolicy::Paper => "paper",
            TiePolicy::Fractional => "fractional",
        })
    }
}

/// Options shared by every comparison operation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct StatsOptions {
    pub tie_policy: TiePolicy,
    pub permutations: u32,
    pub seed: u64,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            tie_policy: TiePolicy::Fractional,
            permutations: 10_000,
            seed: 0,
        }
    }
}

/// Two value vectors over a common universe, ready for rank correlation.
///
/// Built from two distributions by [`join`] (universe = all `2^k` tuples in
/// lexicographic order, absent tuples at probability zero) or from raw
/// paired values.
#[derive(Clone, Debug)]
pub struct PairedRanking<F: Real> {
    x: Vec<F>,
    y: Vec<F>,
}

impl<F: Real> PairedRanking<F> {
    pub fn from_values(x: Vec<F>, y: Vec<F>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::MismatchedLengths {
                left: x.len(),
                right: y.len(),
            });
        }
        if x.len() < 2 {
            return Err(Error::TooFewValues {
                needed: 2,
                got: x.len(),
            });
        }
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue);
        }
        Ok(PairedRanking { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[F] {
        &self.x
    }

    pub fn y(&self) -> &[F] {
        &self.y
    }
}

/// Aligns two distributions of the same k on the full 2^k tuple universe,
/// zero-filling absent tuples.
pub fn join<F: Real>(d1: &TupleDistribution, d2: &TupleDistribution) -> Result<PairedRanking<F>> {
    if d1.k() != d2.k() {
        return Err(Error::MismatchedK {
            left: d1.k(),
            right: d2.k(),
        });
    }
    let probs = |d: &TupleDistribution| -> Vec<F> {
        let mut v = vec![F::zero(); 1usize << d.k()];
        if d.total() > 0 {
            for &(code, count) in d.entries() {
                v[code as usize] = F::ratio(count, d.total());
            }
        }
        v
    };
    PairedRanking::from_values(probs(d1), probs(d2))
}

/// Ranks with 1 = largest value; ties broken by index ascending (for tuple
/// universes, lexicographic order).
fn strict_ranks<F: Real>(values: &[F]) -> Vec<F> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("finite values")
            .then(a.cmp(&b))
    });
    let mut ranks = vec![F::zero(); values.len()];
    for (pos, &i) in idx.iter().enumerate() {
        ranks[i] = F::from_usize(pos + 1).expect("rank fits scalar");
    }
    ranks
}

/// Average ranks: tied values share the mean of the positions they span.
fn fractional_ranks<F: Real>(values: &[F]) -> Vec<F> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .expect("finite values")
            .then(a.cmp(&b))
    });
    let two = F::from_u8(2).unwrap();
    let mut ranks = vec![F::zero(); values.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && values[idx[end]] == values[idx[start]] {
            end += 1;
        }
        // Positions start+1 ..= end average to (start+1 + end) / 2.
        let avg = F::from_usize(start + 1 + end).unwrap() / two;
        for &i in &idx[start..end] {
            ranks[i] = avg;
        }
        start = end;
    }
    ranks
}

fn ranks_for<F: Real>(values: &[F], policy: TiePolicy) -> Vec<F> {
    match policy {
        TiePolicy::Paper => strict_ranks(values),
        TiePolicy::Fractional => fractional_ranks(values),
    }
}

fn pearson<F: Real>(x: &[F], y: &[F]) -> Result<F> {
    let n = F::from_usize(x.len()).unwrap();
    let mean = |v: &[F]| v.iter().fold(F::zero(), |a, &b| a + b) / n;
    let (mx, my) = (mean(x), mean(y));
    let mut cov = F::zero();
    let mut vx = F::zero();
    let mut vy = F::zero();
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        cov = cov + da * db;
        vx = vx + da * da;
        vy = vy + db * db;
    }
    if vx <= F::zero() || vy <= F::zero() {
        return Err(Error::UndefinedCorrelation);
    }
    Ok(cov / (vx * vy).sqrt())
}

fn spearman_values<F: Real>(x: &[F], y: &[F], policy: TiePolicy) -> Result<F> {
    let rx = ranks_for(x, policy);
    let ry = ranks_for(y, policy);
    let rho = match policy {
        TiePolicy::Paper => {
            let n = F::from_usize(x.len()).unwrap();
            let six = F::from_u8(6).unwrap();
            let d2 = rx
                .iter()
                .zip(&ry)
                .fold(F::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
            F::one() - six * d2 / (n * (n * n - F::one()))
        }
        TiePolicy::Fractional => {
            let rho = pearson(&rx, &ry)?;
            if rx == ry {
                F::one()
            } else {
                rho
            }
        }
    };
    Ok(rho.max(-F::one()).min(F::one()))
}

/// Spearman's rank correlation coefficient under the chosen tie policy.
pub fn spearman<F: Real>(p: &PairedRanking<F>, policy: TiePolicy) -> Result<F> {
    spearman_values(&p.x, &p.y, policy)
}

/// Two-sided permutation test with add-one smoothing:
/// `p = (#{|rho_perm| >= |rho_obs|} + 1) / (N + 1)`.
///
/// Trial `i` draws its permutation from an independent stream derived from
/// `(seed, i)`, so serial and parallel execution give identical p-values.
pub fn permutation_test<F: Real>(
    p: &PairedRanking<F>,
    rho_obs: F,
    policy: TiePolicy,
    permutations: u32,
    seed: u64,
) -> F {
    let threshold = rho_obs.abs();
    let exceed: u64 = (0..permutations)
        .into_par_iter()
        .map(|trial| {
            let mut rng = Xoshiro256::stream(seed, trial as u64);
            let mut y = p.y.clone();
            rng.shuffle(&mut y);
            let rho =
                spearman_values(&p.x, &y, policy).expect("permutation preserves rank variance");
            u64::from(rho.abs() >= threshold)
        })
        .sum();
    F::from_u64(exceed + 1).unwrap() / F::from_u64(permutations as u64 + 1).unwrap()
}

/// A correlation coefficient with its permutation significance.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CorrelationResult<F: Real> {
    pub rho: F,
    pub p_value: F,
    pub n: usize,
    pub tie_policy: TiePolicy,
    pub permutations: u32,
    pub seed: u64,
}

impl<F: Real> CorrelationResult<F> {
    /// Significance marker: strong (‡) at p <= 0.01, weak (†) up to 0.10.
    pub fn marker(&self) -> &'static str {
        marker_for(self.p_value)
    }
}

pub fn marker_for<F: Real>(p_value: F) -> &'static str {
    let strong = F::from_f64(0.01).unwrap();
    let weak = F::from_f64(0.10).unwrap();
    if p_value <= strong {
        "‡"
    } else if p_value <= weak {
        "†"
    } else {
        ""
    }
}

/// Joins, correlates and tests two distributions in one step.
pub fn correlate<F: Real>(
    d1: &TupleDistribution,
    d2: &TupleDistribution,
    opts: &StatsOptions,
) -> Result<CorrelationResult<F>> {
    let paired = join::<F>(d1, d2)?;
    let rho = spearman(&paired, opts.tie_policy)?;
    let p_value = permutation_test(&paired, rho, opts.tie_policy, opts.permutations, opts.seed);
    Ok(CorrelationResult {
        rho,
        p_value,
        n: paired.n(),
        tie_policy: opts.tie_policy,
        permutations: opts.permutations,
        seed: opts.seed,
    })
}

/// Symmetric matrix of pairwise correlations with significance markers.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationMatrix<F: Real> {
    pub k: u8,
    pub names: Vec<String>,
    pub tie_policy: TiePolicy,
    pub permutations: u32,
    pub seed: u64,
    /// `cells[i][j]`; `None` where the correlation is undefined.
    pub cells: Vec<Vec<Option<CorrelationResult<F>>>>,
    /// One line per absent cell explaining why.
    pub notes: Vec<String>,
}

/// Computes all pairwise correlations. Cell (i, j) uses the deterministic
/// sub-seed `derive_seed(opts.seed, i*n + j)` of the upper triangle and is
/// mirrored, so the matrix is exactly symmetric. Diagonal cells are fixed
/// at rho 1 with the smallest attainable p-value whenever the
/// self-correlation is defined.
pub fn correlation_matrix<F: Real>(
    dists: &[(String, &TupleDistribution)],
    opts: &StatsOptions,
) -> Result<CorrelationMatrix<F>> {
    if dists.is_empty() {
        return Err(Error::TooFewValues { needed: 1, got: 0 });
    }
    let k = dists[0].1.k();
    for (_, d) in dists {
        if d.k() != k {
            return Err(Error::MismatchedK {
                left: k,
                right: d.k(),
            });
        }
    }
    let n = dists.len();
    let mut cells: Vec<Vec<Option<CorrelationResult<F>>>> = vec![vec![None; n]; n];
    let mut notes = Vec::new();

    for i in 0..n {
        for j in i..n {
            let cell_seed = derive_seed(opts.seed, (i * n + j) as u64);
            let cell_opts = StatsOptions {
                seed: cell_seed,
                ..*opts
            };
            if i == j {
                match join::<F>(dists[i].1, dists[i].1).and_then(|p| spearman(&p, opts.tie_policy))
                {
                    Ok(_) => {
                        cells[i][i] = Some(CorrelationResult {
                            rho: F::one(),
                            p_value: F::one() / F::from_u64(opts.permutations as u64 + 1).unwrap(),
                            n: 1usize << k,
                            tie_policy: opts.tie_policy,
                            permutations: opts.permutations,
                            seed: cell_seed,
                        });
                    }
                    Err(e) => notes.push(format!("{} vs {}: {}", dists[i].0, dists[i].0, e)),
                }
            } else {
                match correlate::<F>(dists[i].1, dists[j].1, &cell_opts) {
                    Ok(r) => {
                        cells[i][j] = Some(r);
                        cells[j][i] = Some(r);
                    }
                    Err(e @ Error::UndefinedCorrelation) => {
                        notes.push(format!("{} vs {}: {}", dists[i].0, dists[j].0, e))
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    }

    Ok(CorrelationMatrix {
        k,
        names: dists.iter().map(|(name, _)| name.clone()).collect(),
        tie_policy: opts.tie_policy,
        permutations: opts.permutations,
        seed: opts.seed,
        cells,
        notes,
    })
}

impl<F: Real> CorrelationMatrix<F> {
    /// Table-style CSV: header row of names, one row per distribution,
    /// cells formatted as rho with the significance marker appended.
    pub fn to_csv(&self) -> String {
        let mut out = format!("k={}", self.k);
        for name in &self.names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (i, name) in self.names.iter().enumerate() {
            out.push_str(name);
            for j in 0..self.names.len() {
                out.push(',');
                if let Some(cell) = &self.cells[i][j] {
                    out.push_str(&format_rho(cell.rho));
                    out.push_str(cell.marker());
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Cell<'a, F: Real> {
            #[serde(flatten)]
            result: &'a CorrelationResult<F>,
            marker: &'a str,
        }
        #[derive(Serialize)]
        struct Doc<'a, F: Real> {
            format: &'a str,
            version: u32,
            k: u8,
            names: &'a [String],
            tie_policy: TiePolicy,
            permutations: u32,
            seed: u64,
            cells: Vec<Vec<Option<Cell<'a, F>>>>,
            notes: &'a [String],
        }
        let doc = Doc {
            format: "algoprob.correlation-matrix",
            version: 1,
            k: self.k,
            names: &self.names,
            tie_policy: self.tie_policy,
            permutations: self.permutations,
            seed: self.seed,
            cells: self
                .cells
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|c| {
                            c.as_ref().map(|result| Cell {
                                result,
                                marker: result.marker(),
                            })
                        })
                        .collect()
                })
                .collect(),
            notes: &self.notes,
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("matrix serializes");
        s.push('\n');
        s
    }
}

fn format_rho<F: Real>(rho: F) -> String {
    format!("{:.4}", rho.to_f64().expect("rho converts"))
}

/// Half the L1 distance between the probability vectors over the full
/// tuple universe; symmetric, in [0, 1].
pub fn total_variation<F: Real>(d1: &TupleDistribution, d2: &TupleDistribution) -> Result<F> {
    if d1.k() != d2.k() {
        return Err(Error::MismatchedK {
            left: d1.k(),
            right: d2.k(),
        });
    }
    if d1.total() == 0 || d2.total() == 0 {
        return Err(Error::EmptyDistribution);
    }
    let (mut i, mut j) = (0, 0);
    let (a, b) = (d1.entries(), d2.entries());
    let mut sum = F::zero();
    while i < a.len() || j < b.len() {
        let pa = a.get(i);
        let pb = b.get(j);
        let (p, q) = match (pa, pb) {
            (Some(&(ca, na)), Some(&(cb, nb))) => {
                use std::cmp::Ordering::*;
                match ca.cmp(&cb) {
                    Less => {
                        i += 1;
                        (F::ratio(na, d1.total()), F::zero())
                    }
                    Greater => {
                        j += 1;
                        (F::zero(), F::ratio(nb, d2.total()))
                    }
                    Equal => {
                        i += 1;
                        j += 1;
                        (F::ratio(na, d1.total()), F::ratio(nb, d2.total()))
                    }
                }
            }
            (Some(&(_, na)), None) => {
                i += 1;
                (F::ratio(na, d1.total()), F::zero())
            }
            (None, Some(&(_, nb))) => {
                j += 1;
                (F::zero(), F::ratio(nb, d2.total()))
            }
            (None, None) => unreachable!(),
        };
        sum = sum + (p - q).abs();
    }
    Ok(sum / F::from_u8(2).unwrap())
}

/// Evidence that a distribution is closer to a machine-model reference than
/// to the non-informative uniform prior.
#[derive(Clone, Debug, Serialize)]
pub struct AlgorithmicityReport<F: Real> {
    pub k: u8,
    /// Correlation against the reference; absent when undefined.
    pub correlation: Option<CorrelationResult<F>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation_note: Option<String>,
    pub tv_reference: F,
    pub tv_uniform: F,
    /// The distribution sits closer (in total variation) to the reference
    /// than to uniform.
    pub more_algorithmic: bool,
}

/// Compares `d` against a machine-generated reference distribution.
pub fn algorithmicity_score<F: Real>(
    d: &TupleDistribution,
    reference: &TupleDistribution,
    opts: &StatsOptions,
) -> Result<AlgorithmicityReport<F>> {
    if d.k() != reference.k() {
        return Err(Error::MismatchedK {
            left: d.k(),
            right: reference.k(),
        });
    }
    let tv_reference = total_variation::<F>(d, reference)?;
    let uniform = TupleDistribution::uniform(d.k())?;
    let tv_uniform = total_variation::<F>(d, &uniform)?;
    let (correlation, correlation_note) = match correlate::<F>(d, reference, opts) {
        Ok(r) => (Some(r), None),
        Err(e @ Error::UndefinedCorrelation) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    Ok(AlgorithmicityReport {
        k: d.k(),
        correlation,
        correlation_note,
        tv_reference,
        tv_uniform,
        more_algorithmic: tv_reference < tv_uniform,
    })
}

/// (rank, tuple, probability) series, most frequent first.
pub fn rank_series<F: Real>(d: &TupleDistribution) -> Result<Vec<(usize, String, F)>> {
    let ranked = d.rank()?;
    Ok(ranked
        .entries()
        .iter()
        .enumerate()
        .map(|(i, &(code, count))| (i + 1, tuple_label(code, d.k()), F::ratio(count, d.total())))
        .collect())
}

/// (lexicographic index, tuple, probability) series over all 2^k tuples,
/// zero-filled.
pub fn lex_series<F: Real>(d: &TupleDistribution) -> Result<Vec<(TupleCode, String, F)>> {
    if d.total() == 0 {
        return Err(Error::EmptyDistribution);
    }
    Ok((0..1u32 << d.k())
        .map(|code| {
            (
                code,
                tuple_label(code, d.k()),
                d.probability(code).unwrap_or_else(F::zero),
            )
        })
        .collect())
}

pub fn rank_series_csv<F: Real>(d: &TupleDistribution) -> Result<String> {
    let mut out = String::from("rank,tuple,probability\n");
    for (rank, label, p) in rank_series::<F>(d)? {
        out.push_str(&format!("{rank},{label},{p}\n"));
    }
    Ok(out)
}

pub fn lex_series_csv<F: Real>(d: &TupleDistribution) -> Result<String> {
    let mut out = String::from("index,tuple,probability\n");
    for (index, label, p) in lex_series::<F>(d)? {
        out.push_str(&format!("{index},{label},{p}\n"));
    }
    Ok(out)
}
