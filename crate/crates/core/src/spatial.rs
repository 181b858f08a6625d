//! Uniform-grid spatial hashing for fixed-radius neighbour queries.

use std::collections::HashMap;

use crate::points::{distance, PointSet};

/// Buckets sample indices by the integer cell `floor(x / cell)` they fall in.
/// Each bucket lists indices in ascending order.
#[derive(Debug, Clone)]
pub struct GridIndex<'a> {
    points: &'a PointSet,
    cell: f64,
    cells: HashMap<Vec<i64>, Vec<usize>>,
}

impl<'a> GridIndex<'a> {
    /// `cell` must be positive and finite.
    pub fn new(points: &'a PointSet, cell: f64) -> Self {
        assert!(
            cell > 0.0 && cell.is_finite(),
            "grid cell size must be positive and finite"
        );
        let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, p) in points.rows().enumerate() {
            cells.entry(cell_of(p, cell)).or_default().push(i);
        }
        Self {
            points,
            cell,
            cells,
        }
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    /// Calls `visit(j, dist)` for every indexed point with `dist(q, x_j) <= radius`.
    /// Visiting order follows the cell layout, not the index order.
    pub fn for_each_within(&self, q: &[f64], radius: f64, mut visit: impl FnMut(usize, f64)) {
        let reach = (radius / self.cell).ceil().max(1.0) as i64;
        let center = cell_of(q, self.cell);
        let mut key = center.clone();
        let mut offset = vec![-reach; center.len()];
        loop {
            for ((k, c), o) in key.iter_mut().zip(&center).zip(&offset) {
                *k = c.saturating_add(*o);
            }
            if let Some(bucket) = self.cells.get(key.as_slice()) {
                for &j in bucket {
                    let dist = distance(q, self.points.row(j));
                    if dist <= radius {
                        visit(j, dist);
                    }
                }
            }
            // odometer over the (2 reach + 1)^d neighbouring cells
            let mut axis = 0;
            loop {
                if axis == offset.len() {
                    return;
                }
                if offset[axis] < reach {
                    offset[axis] += 1;
                    break;
                }
                offset[axis] = -reach;
                axis += 1;
            }
        }
    }

    pub fn within(&self, q: &[f64], radius: f64) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_within(q, radius, |j, _| out.push(j));
        out
    }
}

fn cell_of(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|v| (v / cell).floor() as i64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_exactly_the_ball() {
        let mut rows = Vec::new();
        for i in 0..15 {
            for j in 0..15 {
                rows.push(vec![i as f64 * 0.37 - 2.0, j as f64 * 0.29 - 1.0]);
            }
        }
        let pts = PointSet::from_rows(&rows).unwrap();
        for cell in [0.2, 0.5, 1.3] {
            let index = GridIndex::new(&pts, cell);
            for radius in [0.1, 0.5, 1.0, 2.7] {
                let q = [0.11, 0.52];
                let mut got = index.within(&q, radius);
                got.sort_unstable();
                let want: Vec<usize> = (0..pts.len())
                    .filter(|&j| distance(&q, pts.row(j)) <= radius)
                    .collect();
                assert_eq!(got, want, "cell {cell} radius {radius}");
            }
        }
    }

    #[test]
    fn boundary_distance_is_included() {
        let pts = PointSet::from_column(&[0.0, 1.0, 2.0]);
        let index = GridIndex::new(&pts, 1.0);
        let mut got = index.within(&[1.0], 1.0);
        got.sort_unstable();
        assert_eq!(got, vec![0, 1, 2]);
    }
}
