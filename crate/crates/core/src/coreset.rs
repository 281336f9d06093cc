//! Coreset construction for robust clustering with an exact target size.
//!
//! The `m` points furthest from an approximate solution are copied into the
//! coreset unchanged. The rest are decomposed into rings and groups around
//! the approximate centers; rings are sampled uniformly and every group is
//! replaced by its two-point coreset. The ring sample size is chosen so that
//! the coreset has exactly the requested number of points.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::approx::{
    find_outliers, tri_criteria_approx, OutlierEntry, TriCriteriaSolution, DEFAULT_BETA, DEFAULT_GAMMA,
};
use crate::cost::{check_z, squared_distance};
use crate::decompose::{decompose, Decomposition, RingIndex};
use crate::error::{invalid, CoresetError, Result};
use crate::rng::{self, StreamRng, LABEL_RING};
use crate::timing::Stopwatch;
use crate::types::Dataset;

/// Why a point is in a coreset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Provenance {
    Outlier,
    RingSample,
    GroupEndpoint,
    /// Member of a group kept at its own weight to reach the target size.
    GroupMember,
    /// Drawn by one of the sampling baselines.
    Sample,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Outlier => "OUTLIER",
            Provenance::RingSample => "RING_SAMPLE",
            Provenance::GroupEndpoint => "GROUP_ENDPOINT",
            Provenance::GroupMember => "GROUP_MEMBER",
            Provenance::Sample => "SAMPLE",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "OUTLIER" => Provenance::Outlier,
            "RING_SAMPLE" => Provenance::RingSample,
            "GROUP_ENDPOINT" => Provenance::GroupEndpoint,
            "GROUP_MEMBER" => Provenance::GroupMember,
            "SAMPLE" => Provenance::Sample,
            _ => return None,
        })
    }
}

/// A weighted subset of a source dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCoreset {
    /// Coreset points with their source ids and coreset weights.
    pub points: Dataset,
    pub provenance: Vec<Provenance>,
    /// Row of each point in the source dataset.
    pub source_rows: Vec<usize>,
}

impl WeightedCoreset {
    /// Builds a coreset from `(source row, weight, provenance)` entries.
    pub fn from_entries(source: &Dataset, entries: &[(usize, f64, Provenance)]) -> Result<Self> {
        let rows: Vec<usize> = entries.iter().map(|e| e.0).collect();
        let points = source.select(&rows).reweighted(entries.iter().map(|e| e.1).collect())?;
        Ok(Self {
            points,
            provenance: entries.iter().map(|e| e.2).collect(),
            source_rows: rows,
        })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.points.total_weight()
    }

    pub fn count(&self, p: Provenance) -> usize {
        self.provenance.iter().filter(|&&q| q == p).count()
    }
}

/// Two weighted points standing in for a group.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPointCoreset {
    pub close: usize,
    pub close_weight: f64,
    /// `None` when all members are equally far from the center.
    pub far: Option<usize>,
    pub far_weight: f64,
    /// Interpolation coefficient of every member, in member order.
    pub lambdas: Vec<f64>,
}

impl TwoPointCoreset {
    pub fn entries(&self) -> Vec<(usize, f64)> {
        let mut out = vec![(self.close, self.close_weight)];
        if let Some(f) = self.far {
            out.push((f, self.far_weight));
        }
        out
    }

    pub fn len(&self) -> usize {
        1 + usize::from(self.far.is_some())
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Compresses a group to its closest and furthest member.
///
/// Each member `p` is written as `dist^z(p,c) = λ dist^z(close,c) + (1-λ) dist^z(far,c)`
/// and contributes `λ w(p)` to the close point and `(1-λ) w(p)` to the far
/// point, so the group's weight and its cost to `center` are preserved.
pub fn two_point_coreset(data: &Dataset, members: &[usize], center: &[f64], z: f64) -> Result<TwoPointCoreset> {
    check_z(z)?;
    if members.is_empty() {
        return Err(invalid("cannot build a two-point coreset of an empty group"));
    }
    let powered: Vec<f64> = members
        .iter()
        .map(|&r| squared_distance(data.point(r), center).sqrt().powf(z))
        .collect();
    let key = |i: usize| (powered[i], data.id(members[i]));
    let by_key = |a: &usize, b: &usize| {
        let (ka, kb) = (key(*a), key(*b));
        ka.0.total_cmp(&kb.0).then(ka.1.cmp(&kb.1))
    };
    let close = (0..members.len()).min_by(by_key).expect("nonempty");
    let far = (0..members.len()).max_by(by_key).expect("nonempty");
    let total: f64 = members.iter().map(|&r| data.weight(r)).sum();

    let span = powered[far] - powered[close];
    if span <= 0.0 {
        return Ok(TwoPointCoreset {
            close: members[close],
            close_weight: total,
            far: None,
            far_weight: 0.0,
            lambdas: vec![1.0; members.len()],
        });
    }
    let lambdas: Vec<f64> = powered
        .iter()
        .map(|&v| ((powered[far] - v) / span).clamp(0.0, 1.0))
        .collect();
    let mut close_weight: f64 = lambdas.iter().zip(members).map(|(l, &r)| l * data.weight(r)).sum::<f64>().min(total);
    // One of the two subtractions is exact (Sterbenz), so the weights add up
    // to the group weight exactly in floating point.
    let far_weight = total - close_weight;
    if close_weight + far_weight != total {
        close_weight = total - far_weight;
    }
    Ok(TwoPointCoreset { close: members[close], close_weight, far: Some(members[far]), far_weight, lambdas })
}

/// Uniform sample of `s` ring members without replacement, each weighted by
/// `ring weight / s`. A ring no larger than `s` is returned whole.
pub fn uniform_sample_ring(
    data: &Dataset,
    members: &[usize],
    s: usize,
    rng: &mut StreamRng,
) -> Result<Vec<(usize, f64)>> {
    if members.is_empty() {
        return Err(invalid("cannot sample an empty ring"));
    }
    if s == 0 {
        return Err(invalid("ring sample size must be at least 1"));
    }
    if s >= members.len() {
        return Ok(members.iter().map(|&r| (r, data.weight(r))).collect());
    }
    let ring_weight: f64 = members.iter().map(|&r| data.weight(r)).sum();
    let w = ring_weight / s as f64;
    let mut picked = index::sample(rng, members.len(), s).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| (members[i], w)).collect())
}

/// Per-ring sample sizes that bring the coreset to the target size.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleSizing {
    /// The common sample size `s` before slack is distributed.
    pub base: usize,
    pub per_ring: Vec<usize>,
    /// Coreset size produced by `per_ring`.
    pub total: usize,
    pub minimum: usize,
    /// Size reached when every ring is taken whole.
    pub maximum: usize,
}

/// Chooses the largest `s` with `fixed + sum_R min(s, |R|) <= target`, then
/// hands one extra sample to the largest unsaturated rings until the total is
/// exactly `target`. `fixed` counts outliers plus group points.
///
/// When `target` exceeds the size with every ring taken whole, all rings are
/// taken whole and the total falls short of the target; [`build_coreset`]
/// then fills the gap with group members.
pub fn solve_sample_size(ring_sizes: &[usize], fixed: usize, target: usize) -> Result<SampleSizing> {
    let minimum = fixed + ring_sizes.len();
    let maximum = fixed + ring_sizes.iter().sum::<usize>();
    if target < minimum {
        return Err(CoresetError::SizeTooSmall { target, minimum });
    }
    let size_at = |s: usize| fixed + ring_sizes.iter().map(|&n| n.min(s)).sum::<usize>();
    let largest = ring_sizes.iter().copied().max().unwrap_or(0);
    if target >= maximum {
        return Ok(SampleSizing {
            base: largest,
            per_ring: ring_sizes.to_vec(),
            total: maximum,
            minimum,
            maximum,
        });
    }
    // size_at is nondecreasing; find the largest s in [1, largest) that fits.
    let (mut lo, mut hi) = (1usize, largest);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if size_at(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let s = lo;
    let mut per_ring: Vec<usize> = ring_sizes.iter().map(|&n| n.min(s)).collect();
    let mut slack = target - size_at(s);
    let mut open: Vec<usize> = (0..ring_sizes.len()).filter(|&j| ring_sizes[j] > s).collect();
    open.sort_by(|&a, &b| ring_sizes[b].cmp(&ring_sizes[a]).then(a.cmp(&b)));
    for j in open {
        if slack == 0 {
            break;
        }
        per_ring[j] += 1;
        slack -= 1;
    }
    debug_assert_eq!(slack, 0);
    Ok(SampleSizing { base: s, per_ring, total: target, minimum, maximum })
}

/// Knobs of [`build_coreset`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetParams {
    pub k: usize,
    pub z: f64,
    /// Number of outliers kept verbatim.
    pub m: usize,
    /// Requested coreset size `N`.
    pub target_size: usize,
    pub seed: u64,
    pub beta: f64,
    pub gamma: f64,
    /// `t = threshold_constant / (N - m)`.
    pub threshold_constant: f64,
}

impl CoresetParams {
    pub fn new(k: usize, z: f64, m: usize, target_size: usize) -> Self {
        Self {
            k,
            z,
            m,
            target_size,
            seed: 0,
            beta: DEFAULT_BETA,
            gamma: DEFAULT_GAMMA,
            threshold_constant: 1.0,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn threshold_fraction(&self) -> f64 {
        let samples = self.target_size.saturating_sub(self.m).max(1);
        (self.threshold_constant / samples as f64).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoresetBuildReport {
    pub target_size: usize,
    pub actual_size: usize,
    pub threshold_fraction: f64,
    pub sample_size: usize,
    pub clusters: usize,
    pub rings: usize,
    pub groups: usize,
    pub degenerate_groups: usize,
    /// Group members kept at their own weight because every ring was
    /// already taken whole.
    pub group_members_kept: usize,
    pub outliers_found: usize,
    pub outliers_kept: usize,
    pub min_feasible_size: usize,
    /// Size with every ring taken whole and every group compressed.
    pub max_size: usize,
    pub approx_centers: usize,
    pub approx_cost: f64,
    pub build_seconds: f64,
}

/// Everything [`build_coreset`] computed on the way, for inspection.
#[derive(Debug, Clone)]
pub struct CoresetBuild {
    pub coreset: WeightedCoreset,
    pub report: CoresetBuildReport,
    pub decomposition: Decomposition,
    pub approx: TriCriteriaSolution,
}

fn ring_label(idx: RingIndex) -> u64 {
    match idx {
        RingIndex::NegInf => u64::MAX,
        RingIndex::Finite(i) => i as i64 as u64,
    }
}

/// Runs the approximation, extracts its `gamma * m` outliers and keeps the
/// furthest ones covering `m` units of mass. The others rejoin the inliers.
pub(crate) fn approx_and_outliers(
    data: &Dataset,
    params: &CoresetParams,
) -> Result<(TriCriteriaSolution, Vec<OutlierEntry>, Vec<usize>)> {
    let m = params.m as f64;
    let approx = tri_criteria_approx(data, params.k, params.z, m, params.beta, params.gamma, params.seed)?;
    let found = find_outliers(data, &approx.centers, approx.trimmed_mass)?;
    let mut kept = Vec::new();
    let mut covered = 0.0;
    for e in &found {
        if covered >= m {
            break;
        }
        kept.push(e.row);
        covered += data.weight(e.row);
    }
    Ok((approx, found, kept))
}

/// Replaces group endpoints by raw group members, largest groups first, until
/// `slack` extra points are used. The last group touched is split into raw
/// members and a two-point coreset of the rest. Returns the number of raw
/// members kept.
fn expand_groups(
    data: &Dataset,
    decomposition: &Decomposition,
    z: f64,
    mut slack: usize,
    group_entries: &mut [Vec<(usize, f64, Provenance)>],
) -> Result<usize> {
    let groups = &decomposition.groups;
    let mut order: Vec<usize> = (0..groups.len()).collect();
    order.sort_by(|&a, &b| groups[b].members.len().cmp(&groups[a].members.len()).then(a.cmp(&b)));
    let mut kept = 0;
    for g in order {
        if slack == 0 {
            break;
        }
        let members = &groups[g].members;
        let base = group_entries[g].len();
        let raw = |rows: &[usize]| -> Vec<(usize, f64, Provenance)> {
            rows.iter().map(|&r| (r, data.weight(r), Provenance::GroupMember)).collect()
        };
        if members.len() - base <= slack {
            slack -= members.len() - base;
            kept += members.len();
            group_entries[g] = raw(members);
            continue;
        }
        let center = &decomposition.clusters[groups[g].cluster_index].center;
        let mut by_distance = members.clone();
        by_distance.sort_by(|&a, &b| {
            squared_distance(data.point(b), center)
                .total_cmp(&squared_distance(data.point(a), center))
                .then(data.id(a).cmp(&data.id(b)))
        });
        // Keep the farthest `r` members whole and compress the rest.
        for r in [slack + base - 2, slack + base - 1] {
            if r == 0 || r >= by_distance.len() {
                continue;
            }
            let rest = two_point_coreset(data, &by_distance[r..], center, z)?;
            if r + rest.len() == base + slack {
                let mut e = raw(&by_distance[..r]);
                e.extend(rest.entries().into_iter().map(|(row, w)| (row, w, Provenance::GroupEndpoint)));
                group_entries[g] = e;
                kept += r;
                slack = 0;
                break;
            }
        }
    }
    Ok(kept)
}

/// Builds a coreset of exactly `params.target_size` points.
pub fn build_coreset(data: &Dataset, params: &CoresetParams) -> Result<(WeightedCoreset, CoresetBuildReport)> {
    build_coreset_detailed(data, params).map(|b| (b.coreset, b.report))
}

pub fn build_coreset_detailed(data: &Dataset, params: &CoresetParams) -> Result<CoresetBuild> {
    let clock = Stopwatch::start();
    check_z(params.z)?;
    let n = data.len();
    if params.m > n {
        return Err(invalid(format!("m={} exceeds the number of points {n}", params.m)));
    }
    if params.target_size <= params.m {
        return Err(CoresetError::SizeTooSmall { target: params.target_size, minimum: params.m + 1 });
    }
    if !(params.threshold_constant > 0.0) {
        return Err(invalid("threshold constant must be positive"));
    }
    let (approx, found, outlier_rows) = approx_and_outliers(data, params)?;
    let mut is_outlier = vec![false; n];
    for &r in &outlier_rows {
        is_outlier[r] = true;
    }
    let inliers: Vec<usize> = (0..n).filter(|&r| !is_outlier[r]).collect();

    let t = params.threshold_fraction();
    let decomposition = decompose(data, &inliers, &approx.centers, params.z, t)?;

    let mut group_points = Vec::with_capacity(decomposition.groups.len());
    for g in &decomposition.groups {
        let center = &decomposition.clusters[g.cluster_index].center;
        group_points.push(two_point_coreset(data, &g.members, center, params.z)?);
    }
    let fixed = outlier_rows.len() + group_points.iter().map(TwoPointCoreset::len).sum::<usize>();
    let ring_sizes: Vec<usize> = decomposition.rings.iter().map(|r| r.members.len()).collect();
    let sizing = solve_sample_size(&ring_sizes, fixed, params.target_size)?;

    let mut entries: Vec<(usize, f64, Provenance)> = Vec::with_capacity(sizing.total);
    entries.extend(outlier_rows.iter().map(|&r| (r, data.weight(r), Provenance::Outlier)));
    for (ring, &s) in decomposition.rings.iter().zip(&sizing.per_ring) {
        let mut rng = rng::stream(
            params.seed,
            &[LABEL_RING, ring.cluster_index as u64, ring_label(ring.dyadic_index)],
        );
        for (r, w) in uniform_sample_ring(data, &ring.members, s, &mut rng)? {
            entries.push((r, w, Provenance::RingSample));
        }
    }
    let mut group_entries: Vec<Vec<(usize, f64, Provenance)>> = group_points
        .iter()
        .map(|tp| tp.entries().into_iter().map(|(r, w)| (r, w, Provenance::GroupEndpoint)).collect())
        .collect();
    let mut expanded = 0;
    if sizing.total < params.target_size {
        let slack = params.target_size - sizing.total;
        expanded = expand_groups(data, &decomposition, params.z, slack, &mut group_entries)?;
    }
    entries.extend(group_entries.into_iter().flatten());
    let coreset = WeightedCoreset::from_entries(data, &entries)?;

    let report = CoresetBuildReport {
        target_size: params.target_size,
        actual_size: coreset.len(),
        threshold_fraction: t,
        sample_size: sizing.base,
        clusters: decomposition.clusters.iter().filter(|c| !c.members.is_empty()).count(),
        rings: decomposition.rings.len(),
        groups: decomposition.groups.len(),
        degenerate_groups: group_points.iter().filter(|g| g.far.is_none()).count(),
        group_members_kept: expanded,
        outliers_found: found.len(),
        outliers_kept: outlier_rows.len(),
        min_feasible_size: sizing.minimum,
        max_size: sizing.maximum,
        approx_centers: approx.centers.len(),
        approx_cost: approx.achieved_cost,
        build_seconds: clock.seconds(),
    };
    Ok(CoresetBuild { coreset, report, decomposition, approx })
}
