//! Test splits over (user, tag) pairs.
//!
//! * Split I: liked tags of observational pairs that the user did not label.
//! * Split II: tags of held-out pairs that have an observed rating.
//! * Split III: tags of held-out pairs without an observed rating.
//!
//! Pairs derivable from the training files are excluded, and a (user, tag)
//! pair reached from several movies lands in the first split that claims it.

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

use super::observe::{TagRow, NO_TAG};
use super::world::World;
use crate::catalog::TagId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TestRow {
    pub user: u32,
    pub tag: TagId,
    pub islike: bool,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TestSplits {
    pub split1: Vec<TestRow>,
    pub split2: Vec<TestRow>,
    pub split3: Vec<TestRow>,
}

impl TestSplits {
    /// Union of the three splits, sorted by (user, tag).
    pub fn all(&self) -> Vec<TestRow> {
        let mut all: Vec<TestRow> = self
            .split1
            .iter()
            .chain(&self.split2)
            .chain(&self.split3)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

/// (user, tag) keys whose label can be read off the tag files: labelled tags
/// and, for `-1` rows, every tag of the movie.
pub fn training_label_keys(world: &World, rows: &[&[TagRow]]) -> HashSet<(u32, TagId)> {
    let mut keys = HashSet::new();
    for r in rows.iter().flat_map(|rs| rs.iter()) {
        if r.tag == NO_TAG {
            for &t in &world.movies[r.movie as usize].tags {
                keys.insert((r.user, t));
            }
        } else {
            keys.insert((r.user, r.tag as TagId));
        }
    }
    keys
}

pub fn build_test_splits(
    world: &World,
    obstag: &[TagRow],
    rcttag: &[TagRow],
    pool_rated: &[(u32, u32)],
    pool_unrated: &[(u32, u32)],
) -> TestSplits {
    let mut claimed = training_label_keys(world, &[obstag, rcttag]);

    // Labelled tags per observational pair.
    let mut labelled: BTreeMap<(u32, u32), Vec<i64>> = BTreeMap::new();
    for r in obstag {
        labelled.entry((r.user, r.movie)).or_default().push(r.tag);
    }

    let mut split1 = Vec::new();
    for (&(u, m), tags) in &labelled {
        for t in world.liked(u as usize, m as usize) {
            if !tags.contains(&(t as i64)) && claimed.insert((u, t)) {
                split1.push(TestRow {
                    user: u,
                    tag: t,
                    islike: world.islike(u as usize, t),
                });
            }
        }
    }

    let mut from_pool = |pool: &[(u32, u32)]| {
        let mut out = Vec::new();
        for &(u, m) in pool {
            for &t in &world.movies[m as usize].tags {
                if claimed.insert((u, t)) {
                    out.push(TestRow {
                        user: u,
                        tag: t,
                        islike: world.islike(u as usize, t),
                    });
                }
            }
        }
        out
    };
    let split2 = from_pool(pool_rated);
    let split3 = from_pool(pool_unrated);

    let mut splits = TestSplits { split1, split2, split3 };
    for s in [&mut splits.split1, &mut splits.split2, &mut splits.split3] {
        s.sort_unstable();
    }
    splits
}
