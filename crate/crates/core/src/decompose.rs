//! Ring and group decomposition of clusters.
//!
//! Each cluster is cut into dyadic rings around its center: ring `i` holds the
//! points with `2^{i-1} < dist <= 2^i`, and the special ring `-inf` holds the
//! points sitting exactly on the center. A ring whose cost reaches the fraction
//! `t` of the cluster cost is *heavy* and is kept as a ring. Runs of light
//! rings are merged greedily, left to right, into groups whose cost stays at
//! or below `t` times the cluster cost. Empty dyadic indices do not break a run.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::cost::{check_z, nearest_squared, squared_distance};
use crate::error::{invalid, Result};
use crate::types::{CenterSet, Dataset};

/// Dyadic ring index; `NegInf` is the ring of points located on the center.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RingIndex {
    NegInf,
    Finite(i32),
}

impl fmt::Display for RingIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingIndex::NegInf => f.write_str("-inf"),
            RingIndex::Finite(i) => write!(f, "{i}"),
        }
    }
}

impl Serialize for RingIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RingIndex::NegInf => s.serialize_str("-inf"),
            RingIndex::Finite(i) => s.serialize_i32(*i),
        }
    }
}

/// The unique `i` with `2^{i-1} < dist <= 2^i`, or `NegInf` for `dist == 0`.
pub fn ring_index_of_distance(dist: f64) -> RingIndex {
    if dist <= 0.0 {
        return RingIndex::NegInf;
    }
    let mut i = dist.log2().ceil() as i32;
    // log2 can be off by one ulp near exact powers of two.
    while (i as f64).exp2() < dist {
        i += 1;
    }
    while ((i - 1) as f64).exp2() >= dist {
        i -= 1;
    }
    RingIndex::Finite(i)
}

pub fn ring_index(p: &[f64], c: &[f64]) -> RingIndex {
    ring_index_of_distance(squared_distance(p, c).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ring {
    pub cluster_index: usize,
    pub dyadic_index: RingIndex,
    /// Dataset rows.
    pub members: Vec<usize>,
    pub weight: f64,
    /// `cost_z` of the members to the cluster center.
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    pub cluster_index: usize,
    pub lo: RingIndex,
    pub hi: RingIndex,
    pub members: Vec<usize>,
    pub weight: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterSummary {
    pub center: Vec<f64>,
    pub members: Vec<usize>,
    pub cost: f64,
    pub ring_count: usize,
    pub group_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub clusters: Vec<ClusterSummary>,
    pub rings: Vec<Ring>,
    pub groups: Vec<Group>,
    /// Fraction `t` of the cluster cost used as the heavy/group threshold.
    pub threshold_fraction: f64,
}

impl Decomposition {
    pub fn member_count(&self) -> usize {
        self.rings.iter().map(|r| r.members.len()).sum::<usize>()
            + self.groups.iter().map(|g| g.members.len()).sum::<usize>()
    }
}

/// Assigns each of `rows` to its nearest center. Returns one row list per center.
pub fn partition_clusters(data: &Dataset, rows: &[usize], centers: &CenterSet) -> Result<Vec<Vec<usize>>> {
    crate::cost::check_dims(data, centers)?;
    let mut clusters = vec![Vec::new(); centers.len()];
    for &r in rows {
        let (i, _) = nearest_squared(data.point(r), centers);
        clusters[i].push(r);
    }
    Ok(clusters)
}

struct RingAccumulator {
    members: Vec<usize>,
    weight: f64,
    cost: f64,
}

/// Splits one cluster into heavy rings and groups of light rings.
pub fn decompose_cluster(
    data: &Dataset,
    members: &[usize],
    center: &[f64],
    cluster_index: usize,
    z: f64,
    t: f64,
) -> Result<(Vec<Ring>, Vec<Group>)> {
    check_z(z)?;
    if !(t > 0.0 && t <= 1.0) {
        return Err(invalid(format!("threshold fraction must lie in (0, 1], got {t}")));
    }
    if members.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }
    let mut by_index: BTreeMap<RingIndex, RingAccumulator> = BTreeMap::new();
    for &r in members {
        let dist = squared_distance(data.point(r), center).sqrt();
        let acc = by_index.entry(ring_index_of_distance(dist)).or_insert(RingAccumulator {
            members: Vec::new(),
            weight: 0.0,
            cost: 0.0,
        });
        acc.members.push(r);
        acc.weight += data.weight(r);
        acc.cost += data.weight(r) * dist.powf(z);
    }
    let total: f64 = by_index.values().map(|a| a.cost).sum();
    let bound = t * total;

    let mut rings = Vec::new();
    let mut groups = Vec::new();
    let mut open: Option<Group> = None;
    for (idx, acc) in by_index {
        if idx == RingIndex::NegInf {
            groups.push(Group {
                cluster_index,
                lo: idx,
                hi: idx,
                members: acc.members,
                weight: acc.weight,
                cost: 0.0,
            });
            continue;
        }
        if total > 0.0 && acc.cost >= bound {
            groups.extend(open.take());
            rings.push(Ring {
                cluster_index,
                dyadic_index: idx,
                members: acc.members,
                weight: acc.weight,
                cost: acc.cost,
            });
            continue;
        }
        match open.as_mut() {
            Some(g) if g.cost + acc.cost <= bound => {
                g.hi = idx;
                g.members.extend(acc.members);
                g.weight += acc.weight;
                g.cost += acc.cost;
            }
            _ => {
                groups.extend(open.take());
                open = Some(Group {
                    cluster_index,
                    lo: idx,
                    hi: idx,
                    members: acc.members,
                    weight: acc.weight,
                    cost: acc.cost,
                });
            }
        }
    }
    groups.extend(open);
    Ok((rings, groups))
}

/// Partitions `rows` around `centers` and decomposes every nonempty cluster.
pub fn decompose(data: &Dataset, rows: &[usize], centers: &CenterSet, z: f64, t: f64) -> Result<Decomposition> {
    let clusters = partition_clusters(data, rows, centers)?;
    let mut out = Decomposition {
        clusters: Vec::with_capacity(clusters.len()),
        rings: Vec::new(),
        groups: Vec::new(),
        threshold_fraction: t,
    };
    for (i, members) in clusters.into_iter().enumerate() {
        let center = centers.center(i);
        let (rings, groups) = decompose_cluster(data, &members, center, i, z, t)?;
        let cost = rings.iter().map(|r| r.cost).sum::<f64>() + groups.iter().map(|g| g.cost).sum::<f64>();
        out.clusters.push(ClusterSummary {
            center: center.to_vec(),
            members,
            cost,
            ring_count: rings.len(),
            group_count: groups.len(),
        });
        out.rings.extend(rings);
        out.groups.extend(groups);
    }
    Ok(out)
}
