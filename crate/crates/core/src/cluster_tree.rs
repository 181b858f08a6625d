//! Level-set cluster tree built on a Quick Shift forest.
//!
//! For a level `lambda`, keep the samples with estimated density strictly
//! above `lambda` together with the forest edges among them, take connected
//! components, then repeatedly merge any two components whose closest points
//! are strictly less than `tau` apart. Only the distinct sample densities
//! change the vertex set, so the tree stores one level per distinct density.
//!
//! The tree is stored incrementally: each level records the samples it adds
//! and the merges they cause. Partitions are rebuilt by replaying levels.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::kernels::DensityModel;
use crate::points::{distance, PointSet};
use crate::quickshift::{quickshift, QuickShiftForest};
use crate::spatial::GridIndex;

/// A partition of the samples surviving at `level` into linked components.
/// Components are sorted internally and ordered by their smallest index.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelComponents {
    pub level: f64,
    pub components: Vec<Vec<usize>>,
}

impl LevelComponents {
    fn new(level: f64, components: Vec<Vec<usize>>) -> Self {
        Self {
            level,
            components: canonical(components),
        }
    }

    /// Component id of every sample, `None` for samples below the level.
    pub fn labels(&self, n: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; n];
        for (c, members) in self.components.iter().enumerate() {
            for &i in members {
                out[i] = Some(c);
            }
        }
        out
    }
}

/// One level of the tree. `threshold` lies halfway between this level's
/// density and the next lower distinct density, so the surviving set
/// `{i : density[i] > threshold}` is unambiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct TreeLevel {
    pub threshold: f64,
    pub density: f64,
    pub added: Vec<usize>,
    merges: Vec<(usize, usize)>,
}

/// Height at which two samples first share a component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MergeHeight {
    Level(f64),
    Never,
}

impl MergeHeight {
    pub fn value(self) -> Option<f64> {
        match self {
            MergeHeight::Level(v) => Some(v),
            MergeHeight::Never => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterTree {
    tau: f64,
    n: usize,
    levels: Vec<TreeLevel>,
}

impl ClusterTree {
    /// Builds the tree over an existing forest, linking with the forest's `tau`.
    pub fn from_forest(forest: &QuickShiftForest, samples: &PointSet) -> Result<Self> {
        let n = samples.len();
        if forest.len() != n {
            return Err(Error::LengthMismatch {
                what: "forest",
                expected: n,
                found: forest.len(),
            });
        }
        let tau = forest.tau();
        let density = forest.density();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            density[b]
                .partial_cmp(&density[a])
                .unwrap_or(Ordering::Equal)
                .then(a.cmp(&b))
        });

        let index = tau.is_finite().then(|| GridIndex::new(samples, tau));
        let mut sets = DisjointSet::new(n);
        let mut present = vec![false; n];
        let mut any_present: Option<usize> = None;
        let mut levels: Vec<TreeLevel> = Vec::new();

        let mut start = 0;
        while start < n {
            let value = density[order[start]];
            let end = start
                + order[start..]
                    .iter()
                    .take_while(|&&i| density[i] == value)
                    .count();
            let added: Vec<usize> = {
                let mut v = order[start..end].to_vec();
                v.sort_unstable();
                v
            };
            let threshold = match order.get(end) {
                Some(&next) => value - 0.5 * (value - density[next]),
                None => lowest_threshold(value),
            };
            let mut merges = Vec::new();
            for &i in &added {
                present[i] = true;
                if let Some(p) = forest.parent(i) {
                    if sets.union(i, p) {
                        merges.push((i, p));
                    }
                }
                match &index {
                    Some(index) => {
                        index.for_each_within(samples.row(i), tau, |j, dist| {
                            if present[j] && dist < tau && sets.union(i, j) {
                                merges.push((i, j));
                            }
                        });
                    }
                    // infinite linking radius joins everything present
                    None => {
                        if let Some(j) = any_present {
                            if sets.union(i, j) {
                                merges.push((i, j));
                            }
                        }
                    }
                }
                any_present.get_or_insert(i);
            }
            levels.push(TreeLevel {
                threshold,
                density: value,
                added,
                merges,
            });
            start = end;
        }
        Ok(Self { tau, n, levels })
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn sample_count(&self) -> usize {
        self.n
    }

    /// Levels in descending order of density.
    pub fn levels(&self) -> &[TreeLevel] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Partition at tree level `k` (0 is the highest density level).
    pub fn level_components(&self, k: usize) -> LevelComponents {
        let mut replay = Replay::new(self.n);
        for level in &self.levels[..=k] {
            replay.apply(level);
        }
        LevelComponents::new(self.levels[k].threshold, replay.groups())
    }

    /// Every level's partition, highest level first.
    pub fn all_levels(&self) -> Vec<LevelComponents> {
        let mut replay = Replay::new(self.n);
        self.levels
            .iter()
            .map(|level| {
                replay.apply(level);
                LevelComponents::new(level.threshold, replay.groups())
            })
            .collect()
    }

    /// Partition of `{i : density[i] > lambda}` for an arbitrary `lambda`.
    pub fn partition_at(&self, lambda: f64) -> LevelComponents {
        let mut replay = Replay::new(self.n);
        for level in self.levels.iter().take_while(|l| l.density > lambda) {
            replay.apply(level);
        }
        LevelComponents::new(lambda, replay.groups())
    }

    /// Largest level threshold at which `i` and `j` share a component.
    pub fn merge_height(&self, i: usize, j: usize) -> MergeHeight {
        assert!(i < self.n && j < self.n, "sample index out of range");
        let mut replay = Replay::new(self.n);
        for level in &self.levels {
            replay.apply(level);
            if replay.present[i] && replay.present[j] && replay.sets.same(i, j) {
                return MergeHeight::Level(level.threshold);
            }
        }
        MergeHeight::Never
    }
}

fn lowest_threshold(value: f64) -> f64 {
    if value > 0.0 {
        0.5 * value
    } else if value < 0.0 {
        1.5 * value
    } else {
        -1.0
    }
}

/// Runs Quick Shift and builds the cluster tree over its forest.
pub fn cluster_tree(samples: &PointSet, model: &DensityModel, tau: f64) -> Result<ClusterTree> {
    let forest = quickshift(samples, model, tau)?;
    ClusterTree::from_forest(&forest, samples)
}

/// Components of the forest restricted to samples with density `> lambda`,
/// before any linking.
pub fn level_subgraph(forest: &QuickShiftForest, lambda: f64) -> LevelComponents {
    let n = forest.len();
    let density = forest.density();
    let mut sets = DisjointSet::new(n);
    for i in 0..n {
        if let Some(p) = forest.parent(i) {
            if density[i] > lambda && density[p] > lambda {
                sets.union(i, p);
            }
        }
    }
    let alive: Vec<usize> = (0..n).filter(|&i| density[i] > lambda).collect();
    LevelComponents::new(lambda, group_by_root(&mut sets, &alive))
}

/// Repeatedly merges components whose closest points are strictly less than
/// `delta` apart, until no such pair remains. The fixpoint is the transitive
/// closure of that proximity relation and does not depend on merge order.
pub fn link(components: &[Vec<usize>], samples: &PointSet, delta: f64) -> Result<Vec<Vec<usize>>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "link radius must be positive, got {delta}"
        )));
    }
    let n = samples.len();
    let mut owner = vec![usize::MAX; n];
    let mut members = Vec::new();
    for (c, comp) in components.iter().enumerate() {
        for &i in comp {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            if owner[i] != usize::MAX {
                return Err(Error::OverlappingComponents(i));
            }
            owner[i] = c;
            members.push(i);
        }
    }
    let mut sets = DisjointSet::new(components.len());
    if delta.is_infinite() {
        for c in 1..components.len() {
            sets.union(0, c);
        }
    } else {
        let subset = samples.select(&members);
        let index = GridIndex::new(&subset, delta);
        for (a, &i) in members.iter().enumerate() {
            index.for_each_within(subset.row(a), delta, |b, dist| {
                if dist < delta {
                    sets.union(owner[i], owner[members[b]]);
                }
            });
        }
    }
    let mut merged: Vec<Vec<usize>> = vec![Vec::new(); components.len()];
    for (c, comp) in components.iter().enumerate() {
        merged[sets.find(c)].extend_from_slice(comp);
    }
    Ok(canonical(
        merged.into_iter().filter(|m| !m.is_empty()).collect(),
    ))
}

/// Smallest distance between any point of `a` and any point of `b`.
pub fn set_distance(samples: &PointSet, a: &[usize], b: &[usize]) -> f64 {
    a.iter()
        .flat_map(|&i| {
            b.iter()
                .map(move |&j| distance(samples.row(i), samples.row(j)))
        })
        .fold(f64::INFINITY, f64::min)
}

fn canonical(mut components: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for c in &mut components {
        c.sort_unstable();
    }
    components.retain(|c| !c.is_empty());
    components.sort_unstable_by_key(|c| c[0]);
    components
}

fn group_by_root(sets: &mut DisjointSet, members: &[usize]) -> Vec<Vec<usize>> {
    let mut slot = vec![usize::MAX; sets.parent.len()];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &i in members {
        let r = sets.find(i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(i);
    }
    groups
}

struct Replay {
    sets: DisjointSet,
    present: Vec<bool>,
    alive: Vec<usize>,
}

impl Replay {
    fn new(n: usize) -> Self {
        Self {
            sets: DisjointSet::new(n),
            present: vec![false; n],
            alive: Vec::new(),
        }
    }

    fn apply(&mut self, level: &TreeLevel) {
        for &i in &level.added {
            self.present[i] = true;
            self.alive.push(i);
        }
        for &(a, b) in &level.merges {
            self.sets.union(a, b);
        }
    }

    fn groups(&mut self) -> Vec<Vec<usize>> {
        group_by_root(&mut self.sets, &self.alive)
    }
}

#[derive(Debug, Clone)]
struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    /// Returns whether two distinct sets were joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.rank[a] < self.rank[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        if self.rank[a] == self.rank[b] {
            self.rank[a] += 1;
        }
        true
    }
}
