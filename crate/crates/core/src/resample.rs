//! Oversampling methods over feature matrices (and raw-record duplication
//! over datasets).
//!
//! All methods share the same skeleton: a [`ResamplePlan`] fixes how many
//! synthetic samples each class gets, and each class generates its quota
//! with its own RNG stream derived from the master seed. Per-class
//! generation therefore parallelizes without changing output.
//!
//! Synthetic rows carry provenance (base row, neighbor row, interpolation
//! coefficient) so tests can re-check the segment geometry of every
//! generated point.

use indexmap::IndexMap;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::{ClassDistribution, Dataset, LabeledRecord};
use crate::error::{Error, Result};
use crate::exec;
use crate::matrix::FeatureMatrix;
use crate::neighbors::{NeighborIndex, NeighborList};
use crate::seed::{mix, rng_from};

/// Neighborhood size shared by the samplers when nothing else is configured;
/// mirrors the KNN classifier's default.
pub const DEFAULT_NEIGHBORS: usize = 5;

/// Per-class synthetic-sample quotas.
///
/// With `M` the size of the largest class, each class of size `s` gets
/// `floor((M - s) * k_percent)` synthetic samples; the largest class (and
/// any class tied with it) gets zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ResamplePlan {
    quotas: IndexMap<String, usize>,
    k_percent: f64,
    majority_size: usize,
}

impl ResamplePlan {
    pub fn quotas(&self) -> &IndexMap<String, usize> {
        &self.quotas
    }

    pub fn quota(&self, label: &str) -> usize {
        self.quotas.get(label).copied().unwrap_or(0)
    }

    pub fn k_percent(&self) -> f64 {
        self.k_percent
    }

    pub fn majority_size(&self) -> usize {
        self.majority_size
    }

    /// Total synthetic samples the plan asks for.
    pub fn total_quota(&self) -> usize {
        self.quotas.values().sum()
    }
}

/// Compute per-class quotas from a class distribution.
pub fn target_sizes(dist: &ClassDistribution, k_percent: f64) -> Result<ResamplePlan> {
    if dist.total() == 0 {
        return Err(Error::invalid("cannot plan resampling over an empty distribution"));
    }
    if !(0.0..=1.0).contains(&k_percent) {
        return Err(Error::invalid(format!(
            "k_percent {k_percent} must lie in [0, 1]"
        )));
    }
    let majority = dist.max_count();
    let quotas = dist
        .counts()
        .iter()
        .map(|(label, &count)| {
            let gap = (majority - count) as f64;
            (label.clone(), (gap * k_percent).floor() as usize)
        })
        .collect();
    Ok(ResamplePlan {
        quotas,
        k_percent,
        majority_size: majority,
    })
}

/// Linear interpolation `base + alpha * (neighbor - base)`, exact
/// componentwise.
pub fn interpolate(base: &[f64], neighbor: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if base.len() != neighbor.len() {
        return Err(Error::invalid(format!(
            "interpolation endpoints have dimensions {} and {}",
            base.len(),
            neighbor.len()
        )));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::invalid(format!("alpha {alpha} must lie in [0, 1]")));
    }
    Ok(base
        .iter()
        .zip(neighbor)
        .map(|(s, t)| s + alpha * (t - s))
        .collect())
}

/// How a synthetic row was produced.
#[derive(Debug, Clone, PartialEq)]
pub enum SyntheticOrigin {
    /// Verbatim copy of an original row.
    Duplicate { source: usize },
    /// Interpolation between two original rows of the same class.
    Interpolated {
        base: usize,
        neighbor: usize,
        alpha: f64,
    },
}

impl SyntheticOrigin {
    /// The original row the sample was grown from.
    pub fn base_row(&self) -> usize {
        match *self {
            SyntheticOrigin::Duplicate { source } => source,
            SyntheticOrigin::Interpolated { base, .. } => base,
        }
    }
}

/// A feature matrix with synthetic rows appended after the originals.
#[derive(Debug, Clone, PartialEq)]
pub struct OversampledMatrix {
    /// Original rows first (bit-identical to the input), synthetic rows after.
    pub matrix: FeatureMatrix,
    /// True exactly for appended rows.
    pub synthetic_mask: Vec<bool>,
    /// Provenance, one entry per appended row, in append order.
    pub origins: Vec<SyntheticOrigin>,
    /// Classes that fell back to plain interpolation (empty danger set or
    /// all-zero adaptive ratios). Also logged as warnings.
    pub fallback_classes: Vec<String>,
}

impl OversampledMatrix {
    pub fn synthetic_count(&self) -> usize {
        self.origins.len()
    }
}

/// Neighborhood position of a sample relative to other classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryTag {
    /// Fewer than half the neighbors belong to other classes.
    Safe,
    /// At least half, but not all, neighbors belong to other classes.
    Danger,
    /// Every neighbor belongs to another class.
    Noise,
}

fn tag_from_counts(differing: usize, m: usize) -> BoundaryTag {
    if differing == m {
        BoundaryTag::Noise
    } else if 2 * differing >= m {
        BoundaryTag::Danger
    } else {
        BoundaryTag::Safe
    }
}

/// Tag one row by the labels of its `m_neighbors` nearest rows over the
/// whole set (any class, self excluded).
pub fn classify_boundary(fm: &FeatureMatrix, row: usize, m_neighbors: usize) -> Result<BoundaryTag> {
    if row >= fm.len() {
        return Err(Error::invalid(format!(
            "row {row} out of range for {} samples",
            fm.len()
        )));
    }
    if m_neighbors == 0 || m_neighbors > fm.len() - 1 {
        return Err(Error::invalid(format!(
            "m_neighbors {m_neighbors} out of range for {} samples",
            fm.len()
        )));
    }
    let index = NeighborIndex::new(fm.features().clone())?;
    Ok(boundary_tag_with_index(fm, &index, row, m_neighbors)?)
}

fn boundary_tag_with_index(
    fm: &FeatureMatrix,
    index: &NeighborIndex,
    row: usize,
    m_neighbors: usize,
) -> Result<BoundaryTag> {
    let list = index.query(fm.features().row(row), m_neighbors, Some(row))?;
    let own = &fm.labels()[row];
    let differing = list
        .indices
        .iter()
        .filter(|&&i| &fm.labels()[i] != own)
        .count();
    Ok(tag_from_counts(differing, m_neighbors))
}

/// Round-half-up allocation of `total` units proportional to `weights`,
/// corrected by largest remainder so the result sums to `total` exactly.
///
/// `weights` must be non-negative with a positive sum. Every entry ends
/// within one unit of its exact share.
pub fn largest_remainder_allocation(weights: &[f64], total: usize) -> Result<Vec<usize>> {
    let sum: f64 = weights.iter().sum();
    if weights.is_empty() || sum <= 0.0 || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
        return Err(Error::invalid(
            "allocation weights must be non-negative, finite and sum to a positive value",
        ));
    }
    let targets: Vec<f64> = weights.iter().map(|w| w / sum * total as f64).collect();
    let mut allocated: Vec<usize> = targets.iter().map(|t| (t + 0.5).floor() as usize).collect();
    let assigned: usize = allocated.iter().sum();

    if assigned < total {
        // Most under-allocated rows gain one unit each.
        let mut order: Vec<usize> = (0..allocated.len()).collect();
        order.sort_by(|&a, &b| {
            let da = targets[a] - allocated[a] as f64;
            let db = targets[b] - allocated[b] as f64;
            db.total_cmp(&da).then(a.cmp(&b))
        });
        for &i in order.iter().take(total - assigned) {
            allocated[i] += 1;
        }
    } else if assigned > total {
        // Most over-allocated rows lose one unit each.
        let mut order: Vec<usize> = (0..allocated.len()).filter(|&i| allocated[i] > 0).collect();
        order.sort_by(|&a, &b| {
            let da = allocated[a] as f64 - targets[a];
            let db = allocated[b] as f64 - targets[b];
            db.total_cmp(&da).then(a.cmp(&b))
        });
        for &i in order.iter().take(assigned - total) {
            allocated[i] -= 1;
        }
    }
    debug_assert_eq!(allocated.iter().sum::<usize>(), total);
    Ok(allocated)
}

// ---------------------------------------------------------------------------
// Shared per-class machinery
// ---------------------------------------------------------------------------

type SyntheticRow = (Vec<f64>, SyntheticOrigin);

struct ClassOutput {
    label: String,
    rows: Vec<SyntheticRow>,
    fell_back: bool,
}

/// Rows of each planned class, validated against the plan: a positive quota
/// with no rows is an error.
fn planned_classes(fm: &FeatureMatrix, plan: &ResamplePlan) -> Result<Vec<(String, Vec<usize>, usize)>> {
    let by_class = fm.class_indices();
    let mut out = Vec::new();
    for (label, &quota) in plan.quotas() {
        if quota == 0 {
            continue;
        }
        let rows = by_class.get(label).cloned().unwrap_or_default();
        if rows.is_empty() {
            return Err(Error::invalid(format!(
                "class {label:?} has quota {quota} but no rows to sample from"
            )));
        }
        out.push((label.clone(), rows, quota));
    }
    Ok(out)
}

fn append_synthetic(
    fm: &FeatureMatrix,
    outputs: Vec<ClassOutput>,
) -> Result<OversampledMatrix> {
    let mut x = fm.features().clone();
    let mut labels = fm.labels().to_vec();
    let mut mask = vec![false; fm.len()];
    let mut origins = Vec::new();
    let mut fallback_classes = Vec::new();

    for output in outputs {
        if output.fell_back {
            fallback_classes.push(output.label.clone());
        }
        for (row, origin) in output.rows {
            x.push_row(&row)?;
            labels.push(output.label.clone());
            mask.push(true);
            origins.push(origin);
        }
    }
    let matrix = FeatureMatrix::new(x, labels, fm.kind())?;
    Ok(OversampledMatrix {
        matrix,
        synthetic_mask: mask,
        origins,
        fallback_classes,
    })
}

/// Per-class index over the class's own rows, mapping local ids back to
/// global row ids.
struct ClassIndex {
    index: NeighborIndex,
    global_rows: Vec<usize>,
}

impl ClassIndex {
    fn build(fm: &FeatureMatrix, rows: &[usize]) -> Result<Self> {
        let data: Vec<Vec<f64>> = rows.iter().map(|&r| fm.features().row(r).to_vec()).collect();
        Ok(Self {
            index: NeighborIndex::new(crate::matrix::DenseMatrix::from_rows(&data)?)?,
            global_rows: rows.to_vec(),
        })
    }

    /// Same-class neighbors of the class-local row `local`, self excluded.
    fn neighbors_of(&self, local: usize, k: usize) -> Result<NeighborList> {
        self.index
            .query(self.index.points().row(local), k, Some(local))
    }
}

fn duplicate_rows(
    fm: &FeatureMatrix,
    rows: &[usize],
    quota: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<SyntheticRow> {
    (0..quota)
        .map(|_| {
            let source = rows[rng.random_range(0..rows.len())];
            (
                fm.features().row(source).to_vec(),
                SyntheticOrigin::Duplicate { source },
            )
        })
        .collect()
}

/// Plain interpolation quota for one class: uniform base over all class
/// rows, neighbor among the base's k nearest same-class rows.
fn smote_class_rows(
    fm: &FeatureMatrix,
    rows: &[usize],
    quota: usize,
    k_neighbors: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<SyntheticRow>> {
    if rows.len() == 1 {
        return Ok(duplicate_rows(fm, rows, quota, rng));
    }
    let class = ClassIndex::build(fm, rows)?;
    let k = k_neighbors.min(rows.len() - 1);
    let neighbor_lists: Vec<NeighborList> = (0..rows.len())
        .map(|local| class.neighbors_of(local, k))
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(quota);
    for _ in 0..quota {
        let base_local = rng.random_range(0..rows.len());
        let pick = rng.random_range(0..k);
        let alpha: f64 = rng.random_range(0.0..=1.0);
        let base = rows[base_local];
        let neighbor = class.global_rows[neighbor_lists[base_local].indices[pick]];
        let row = interpolate(fm.features().row(base), fm.features().row(neighbor), alpha)?;
        out.push((
            row,
            SyntheticOrigin::Interpolated {
                base,
                neighbor,
                alpha,
            },
        ));
    }
    Ok(out)
}

fn run_per_class<F>(fm: &FeatureMatrix, plan: &ResamplePlan, seed: u64, f: F) -> Result<OversampledMatrix>
where
    F: Fn(&str, &[usize], usize, &mut ChaCha8Rng) -> Result<(Vec<SyntheticRow>, bool)> + Sync,
{
    let classes = planned_classes(fm, plan)?;
    // Sub-seed by the class's position in the plan, so per-class generation
    // is identical whether classes run serially or in parallel.
    let positions: IndexMap<&String, usize> = plan
        .quotas()
        .keys()
        .enumerate()
        .map(|(i, label)| (label, i))
        .collect();
    let outputs = exec::map_indexed(classes.len(), |ci| {
        let (label, rows, quota) = &classes[ci];
        let mut rng = rng_from(mix(seed, positions[label] as u64));
        f(label, rows, *quota, &mut rng).map(|(rows, fell_back)| ClassOutput {
            label: label.clone(),
            rows,
            fell_back,
        })
    });
    let outputs: Vec<ClassOutput> = outputs.into_iter().collect::<Result<_>>()?;
    for output in outputs.iter().filter(|o| o.fell_back) {
        log::warn!(
            "class {:?} fell back to plain interpolation oversampling",
            output.label
        );
    }
    append_synthetic(fm, outputs)
}

// ---------------------------------------------------------------------------
// The four methods
// ---------------------------------------------------------------------------

/// Duplicate uniformly drawn class rows until each quota is met.
pub fn random_oversample(
    fm: &FeatureMatrix,
    plan: &ResamplePlan,
    seed: u64,
) -> Result<OversampledMatrix> {
    run_per_class(fm, plan, seed, |_, rows, quota, rng| {
        Ok((duplicate_rows(fm, rows, quota, rng), false))
    })
}

/// Record-level twin of [`random_oversample`]: duplicates raw labeled
/// records instead of vectors, so downstream vectorization sees the copies.
pub fn random_oversample_records(ds: &Dataset, plan: &ResamplePlan, seed: u64) -> Result<Dataset> {
    let mut by_class: IndexMap<&str, Vec<usize>> = IndexMap::new();
    for (i, record) in ds.records().iter().enumerate() {
        by_class.entry(record.label.as_str()).or_default().push(i);
    }

    let mut appended: Vec<LabeledRecord> = Vec::new();
    for (pos, (label, &quota)) in plan.quotas().iter().enumerate() {
        if quota == 0 {
            continue;
        }
        let rows = by_class.get(label.as_str()).cloned().unwrap_or_default();
        if rows.is_empty() {
            return Err(Error::invalid(format!(
                "class {label:?} has quota {quota} but no records to sample from"
            )));
        }
        let mut rng = rng_from(mix(seed, pos as u64));
        for _ in 0..quota {
            let source = rows[rng.random_range(0..rows.len())];
            appended.push(ds.records()[source].clone());
        }
    }

    let mut records = ds.records().to_vec();
    records.extend(appended);
    Ok(Dataset::new(records))
}

/// Interpolate between a uniformly drawn class row and one of its k nearest
/// same-class neighbors. Classes of one row duplicate instead.
pub fn smote(
    fm: &FeatureMatrix,
    plan: &ResamplePlan,
    k_neighbors: usize,
    seed: u64,
) -> Result<OversampledMatrix> {
    if k_neighbors == 0 {
        return Err(Error::invalid("k_neighbors must be positive"));
    }
    run_per_class(fm, plan, seed, |_, rows, quota, rng| {
        Ok((smote_class_rows(fm, rows, quota, k_neighbors, rng)?, false))
    })
}

/// As [`smote`], but base samples are drawn only from the class's danger
/// set: rows whose whole-set neighborhood is at least half other-class but
/// not entirely so. Classes with an empty danger set fall back to plain
/// interpolation.
pub fn borderline_smote(
    fm: &FeatureMatrix,
    plan: &ResamplePlan,
    m_neighbors: usize,
    k_neighbors: usize,
    seed: u64,
) -> Result<OversampledMatrix> {
    if k_neighbors == 0 || m_neighbors == 0 {
        return Err(Error::invalid("neighbor counts must be positive"));
    }
    if fm.len() < 2 {
        return Err(Error::invalid("boundary tagging needs at least 2 samples"));
    }
    let whole = NeighborIndex::new(fm.features().clone())?;
    let m = m_neighbors.min(fm.len() - 1);

    run_per_class(fm, plan, seed, |_, rows, quota, rng| {
        let danger: Vec<usize> = rows
            .iter()
            .copied()
            .filter_map(|g| match boundary_tag_with_index(fm, &whole, g, m) {
                Ok(BoundaryTag::Danger) => Some(Ok(g)),
                Ok(_) => None,
                Err(e) => Some(Err(e)),
            })
            .collect::<Result<_>>()?;

        if danger.is_empty() {
            return Ok((smote_class_rows(fm, rows, quota, k_neighbors, rng)?, true));
        }
        if rows.len() == 1 {
            // A singleton class cannot be danger-tagged, so this arm is
            // unreachable; kept for symmetry with smote_class_rows.
            return Ok((duplicate_rows(fm, rows, quota, rng), false));
        }

        let class = ClassIndex::build(fm, rows)?;
        let k = k_neighbors.min(rows.len() - 1);
        let local_of: IndexMap<usize, usize> = rows
            .iter()
            .enumerate()
            .map(|(local, &g)| (g, local))
            .collect();
        let danger_neighbors: Vec<NeighborList> = danger
            .iter()
            .map(|&g| class.neighbors_of(local_of[&g], k))
            .collect::<Result<_>>()?;

        let mut out = Vec::with_capacity(quota);
        for _ in 0..quota {
            let d = rng.random_range(0..danger.len());
            let pick = rng.random_range(0..k);
            let alpha: f64 = rng.random_range(0.0..=1.0);
            let base = danger[d];
            let neighbor = class.global_rows[danger_neighbors[d].indices[pick]];
            let row = interpolate(fm.features().row(base), fm.features().row(neighbor), alpha)?;
            out.push((
                row,
                SyntheticOrigin::Interpolated {
                    base,
                    neighbor,
                    alpha,
                },
            ));
        }
        Ok((out, false))
    })
}

/// Adaptive variant: each class row gets a share of the quota proportional
/// to how many of its whole-set neighbors belong to other classes, then
/// interpolates toward same-class neighbors. All-zero shares fall back to
/// plain interpolation.
pub fn adasyn(
    fm: &FeatureMatrix,
    plan: &ResamplePlan,
    k_neighbors: usize,
    seed: u64,
) -> Result<OversampledMatrix> {
    if k_neighbors == 0 {
        return Err(Error::invalid("k_neighbors must be positive"));
    }
    if fm.len() < 2 {
        return Err(Error::invalid("adaptive sampling needs at least 2 samples"));
    }
    let whole = NeighborIndex::new(fm.features().clone())?;
    let k_whole = k_neighbors.min(fm.len() - 1);

    run_per_class(fm, plan, seed, |label, rows, quota, rng| {
        let differing: Vec<f64> = rows
            .iter()
            .map(|&g| {
                let list = whole.query(fm.features().row(g), k_whole, Some(g))?;
                Ok(list
                    .indices
                    .iter()
                    .filter(|&&i| fm.labels()[i] != *label)
                    .count() as f64)
            })
            .collect::<Result<_>>()?;

        if differing.iter().sum::<f64>() == 0.0 {
            return Ok((smote_class_rows(fm, rows, quota, k_neighbors, rng)?, true));
        }
        let per_row = largest_remainder_allocation(&differing, quota)?;

        if rows.len() == 1 {
            return Ok((duplicate_rows(fm, rows, quota, rng), false));
        }
        let class = ClassIndex::build(fm, rows)?;
        let k = k_neighbors.min(rows.len() - 1);

        let mut out = Vec::with_capacity(quota);
        for (local, &share) in per_row.iter().enumerate() {
            if share == 0 {
                continue;
            }
            let neighbors = class.neighbors_of(local, k)?;
            let base = rows[local];
            for _ in 0..share {
                let pick = rng.random_range(0..k);
                let alpha: f64 = rng.random_range(0.0..=1.0);
                let neighbor = class.global_rows[neighbors.indices[pick]];
                let row =
                    interpolate(fm.features().row(base), fm.features().row(neighbor), alpha)?;
                out.push((
                    row,
                    SyntheticOrigin::Interpolated {
                        base,
                        neighbor,
                        alpha,
                    },
                ));
            }
        }
        Ok((out, false))
    })
}
