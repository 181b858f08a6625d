//! Serializable result records.
//!
//! Infinite radii are written as the string `"inf"` and "never merged" as
//! `"-inf"`, since JSON has no non-finite numbers.

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

use crate::cluster_tree::{ClusterTree, LevelComponents, MergeHeight};
use crate::error::Result;
use crate::modal_regression::ConditionalModeResult;
use crate::points::PointSet;
use crate::quickshift::{assignments, QuickShiftForest};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestReport {
    pub n: usize,
    pub d: usize,
    /// Bandwidth, absent when densities were supplied directly.
    pub h: Option<f64>,
    #[serde(with = "radius")]
    pub tau: f64,
    pub kernel: Option<String>,
    pub parents: Vec<Option<usize>>,
    pub density: Vec<f64>,
    pub roots: Vec<usize>,
    pub assignments: Vec<usize>,
}

impl ForestReport {
    pub fn new(
        forest: &QuickShiftForest,
        dim: usize,
        h: Option<f64>,
        kernel: Option<String>,
    ) -> Self {
        Self {
            n: forest.len(),
            d: dim,
            h,
            tau: forest.tau(),
            kernel,
            parents: forest.parents().to_vec(),
            density: forest.density().to_vec(),
            roots: forest.roots(),
            assignments: assignments(forest),
        }
    }

    /// Rebuilds the forest over the samples it was computed from.
    pub fn to_forest(&self, samples: &PointSet) -> Result<QuickShiftForest> {
        QuickShiftForest::from_parents(
            samples,
            self.density.clone(),
            self.parents.clone(),
            self.tau,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelReport {
    pub level: f64,
    pub components: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeReport {
    #[serde(with = "radius")]
    pub tau: f64,
    pub levels: Vec<LevelReport>,
}

impl TreeReport {
    pub fn new(tree: &ClusterTree) -> Self {
        Self {
            tau: tree.tau(),
            levels: tree
                .all_levels()
                .into_iter()
                .map(|l| LevelReport {
                    level: l.level,
                    components: l.components,
                })
                .collect(),
        }
    }

    pub fn to_levels(&self) -> Vec<LevelComponents> {
        self.levels
            .iter()
            .map(|l| LevelComponents {
                level: l.level,
                components: l.components.clone(),
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryModes {
    pub x: Vec<f64>,
    pub modes: Vec<f64>,
}

impl From<&ConditionalModeResult> for QueryModes {
    fn from(r: &ConditionalModeResult) -> Self {
        Self {
            x: r.query.clone(),
            modes: r.mode_estimates.clone(),
        }
    }
}

impl Serialize for MergeHeight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            MergeHeight::Level(v) => s.serialize_f64(*v),
            MergeHeight::Never => s.serialize_str("-inf"),
        }
    }
}

impl<'de> Deserialize<'de> for MergeHeight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match NumberOrTag::deserialize(d)? {
            NumberOrTag::Number(v) => Ok(MergeHeight::Level(v)),
            NumberOrTag::Tag(t) if t == "-inf" => Ok(MergeHeight::Never),
            NumberOrTag::Tag(t) => Err(de::Error::custom(format!("unexpected merge height {t:?}"))),
        }
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NumberOrTag {
    Number(f64),
    Tag(String),
}

mod radius {
    use super::*;

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if v.is_infinite() && *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        match NumberOrTag::deserialize(d)? {
            NumberOrTag::Number(v) => Ok(v),
            NumberOrTag::Tag(t) if t == "inf" => Ok(f64::INFINITY),
            NumberOrTag::Tag(t) => Err(de::Error::custom(format!("unexpected radius {t:?}"))),
        }
    }
}
