//! Brute-force reference implementations.
//!
//! Each routine restates a definition as directly as possible, with no
//! indexing, memoization or parallelism. They exist to cross-check the fast
//! paths and back the CLI's `--verify` flag.

use crate::error::{Error, Result};
use crate::kernels::DensityModel;
use crate::points::{distance, PointSet};
use crate::quickshift::QuickShiftForest;

/// `1 / (n h^d) sum_i K((x - X_i) / h)` by a double loop.
pub fn naive_kde(model: &DensityModel, samples: &PointSet, queries: &PointSet) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let d = model.dim();
    samples.check_dim(d)?;
    queries.check_dim(d)?;
    let h = model.bandwidth();
    let n = samples.len() as f64;
    let mut out = Vec::with_capacity(queries.len());
    for q in queries.rows() {
        let mut sum = 0.0;
        for x in samples.rows() {
            let u: Vec<f64> = q.iter().zip(x).map(|(a, b)| (a - b) / h).collect();
            sum += model.kernel().evaluate(&u);
        }
        out.push(sum / (n * h.powi(d as i32)));
    }
    Ok(out)
}

/// Nearest strictly-higher-density sample to `i` (lowest index among equally
/// near ones), if it lies within `tau`.
pub fn naive_parent(samples: &PointSet, density: &[f64], tau: f64, i: usize) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for j in 0..samples.len() {
        if density[j] <= density[i] {
            continue;
        }
        let dist = distance(samples.row(i), samples.row(j));
        let better = match best {
            None => true,
            Some((_, bd)) => dist < bd,
        };
        if better {
            best = Some((j, dist));
        }
    }
    best.filter(|&(_, dist)| dist <= tau).map(|(j, _)| j)
}

pub fn naive_parents(samples: &PointSet, density: &[f64], tau: f64) -> Vec<Option<usize>> {
    (0..samples.len())
        .map(|i| naive_parent(samples, density, tau, i))
        .collect()
}

/// Root of each sample's tree by walking parents one step at a time.
pub fn naive_assignments(parents: &[Option<usize>]) -> Vec<usize> {
    (0..parents.len())
        .map(|mut i| {
            while let Some(p) = parents[i] {
                i = p;
            }
            i
        })
        .collect()
}

/// Samples reachable from `from` by following parent links, `from` included.
pub fn reachable(parents: &[Option<usize>], from: usize) -> Vec<usize> {
    let mut out = vec![from];
    let mut node = from;
    while let Some(p) = parents[node] {
        out.push(p);
        node = p;
    }
    out
}

/// Link by exhaustive pairwise scans: merge any two sets with a pair of
/// points strictly closer than `delta`, and repeat until nothing changes.
/// Output is in the same canonical order as [`crate::link`].
pub fn naive_components(
    components: &[Vec<usize>],
    samples: &PointSet,
    delta: f64,
) -> Result<Vec<Vec<usize>>> {
    if !(delta > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "link radius must be positive, got {delta}"
        )));
    }
    let mut seen = vec![false; samples.len()];
    for comp in components {
        for &i in comp {
            if i >= samples.len() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    len: samples.len(),
                });
            }
            if seen[i] {
                return Err(Error::OverlappingComponents(i));
            }
            seen[i] = true;
        }
    }
    let mut sets: Vec<Vec<usize>> = components
        .iter()
        .filter(|c| !c.is_empty())
        .cloned()
        .collect();
    loop {
        let mut pair = None;
        'search: for a in 0..sets.len() {
            for b in a + 1..sets.len() {
                for &i in &sets[a] {
                    for &j in &sets[b] {
                        if distance(samples.row(i), samples.row(j)) < delta {
                            pair = Some((a, b));
                            break 'search;
                        }
                    }
                }
            }
        }
        match pair {
            Some((a, b)) => {
                let moved = sets.remove(b);
                sets[a].extend(moved);
            }
            None => break,
        }
    }
    for s in &mut sets {
        s.sort_unstable();
    }
    sets.sort_by_key(|s| s[0]);
    Ok(sets)
}

/// Connected components of the forest restricted to samples with density
/// `> lambda`, by breadth-first search over the undirected edge list.
pub fn naive_level_components(
    parents: &[Option<usize>],
    density: &[f64],
    lambda: f64,
) -> Vec<Vec<usize>> {
    let n = parents.len();
    let alive: Vec<bool> = density.iter().map(|&v| v > lambda).collect();
    let mut label = vec![usize::MAX; n];
    let mut out: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if !alive[start] || label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut comp = vec![start];
        label[start] = id;
        let mut k = 0;
        while k < comp.len() {
            let v = comp[k];
            k += 1;
            for u in 0..n {
                let adjacent = parents[u] == Some(v) || parents[v] == Some(u);
                if adjacent && alive[u] && label[u] == usize::MAX {
                    label[u] = id;
                    comp.push(u);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Checks every defining property of a Quick Shift forest and returns a
/// description of each violation.
pub fn check_forest(forest: &QuickShiftForest, samples: &PointSet) -> Vec<String> {
    let mut problems = Vec::new();
    let n = samples.len();
    if forest.len() != n {
        problems.push(format!(
            "forest has {} nodes for {} samples",
            forest.len(),
            n
        ));
        return problems;
    }
    let density = forest.density();
    let tau = forest.tau();
    for i in 0..n {
        let expected = naive_parent(samples, density, tau, i);
        match forest.parent(i) {
            Some(p) => {
                if !(density[p] > density[i]) {
                    problems.push(format!("edge {i} -> {p} does not increase density"));
                }
                let len = distance(samples.row(i), samples.row(p));
                if len > tau {
                    problems.push(format!("edge {i} -> {p} has length {len} > tau {tau}"));
                }
                if forest.edge_length(i) != Some(len) {
                    problems.push(format!("edge {i} -> {p} stores a wrong length"));
                }
            }
            None => {
                let higher_nearby = (0..n).any(|j| {
                    density[j] > density[i] && distance(samples.row(i), samples.row(j)) <= tau
                });
                if higher_nearby {
                    problems.push(format!("root {i} has a higher-density sample within tau"));
                }
            }
        }
        if forest.parent(i) != expected {
            problems.push(format!(
                "sample {i}: parent {:?}, nearest higher with lowest index is {:?}",
                forest.parent(i),
                expected
            ));
        }
    }
    problems
}
