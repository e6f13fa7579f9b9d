//! Descriptive statistics of a dataset: the rating histogram, rating counts
//! per user and movie, and label proportions per file.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::baselines::derive_training_labels;
use crate::generator::{ObservedDataset, TestRow};

use super::EvalError;

/// Half-star bins over `[1, 5]`, plus counts outside that range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatingHistogram {
    /// `edges[i]..edges[i+1]`; the last bin is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
    pub below: u64,
    pub above: u64,
}

impl RatingHistogram {
    pub fn new(ratings: impl IntoIterator<Item = f64>) -> Self {
        let edges: Vec<f64> = (0..=8).map(|i| 1.0 + 0.5 * f64::from(i)).collect();
        let mut h = RatingHistogram {
            counts: vec![0; edges.len() - 1],
            edges,
            below: 0,
            above: 0,
        };
        for r in ratings {
            if r < 1.0 {
                h.below += 1;
            } else if r > 5.0 {
                h.above += 1;
            } else {
                let bin = (((r - 1.0) / 0.5) as usize).min(h.counts.len() - 1);
                h.counts[bin] += 1;
            }
        }
        h
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum::<u64>() + self.below + self.above
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LabelCounts {
    pub positive: usize,
    pub negative: usize,
}

impl LabelCounts {
    pub fn total(&self) -> usize {
        self.positive + self.negative
    }

    /// Share of positives; `None` for an empty file.
    pub fn positive_share(&self) -> Option<f64> {
        (self.total() > 0).then(|| self.positive as f64 / self.total() as f64)
    }

    fn of_test(rows: &[TestRow]) -> Self {
        let positive = rows.iter().filter(|r| r.islike).count();
        LabelCounts {
            positive,
            negative: rows.len() - positive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DatasetStats {
    pub rating_histogram: RatingHistogram,
    /// `(id, number of observed ratings)`, sorted by id; ids without ratings
    /// are omitted.
    pub ratings_per_user: Vec<(u32, usize)>,
    pub ratings_per_movie: Vec<(u32, usize)>,
    /// `(file, counts)`. Tag files are counted on their derived (user, tag)
    /// labels, test files on their rows.
    pub labels: Vec<(String, LabelCounts)>,
}

fn count_by(ids: impl Iterator<Item = u32>) -> Vec<(u32, usize)> {
    let mut m = BTreeMap::new();
    for id in ids {
        *m.entry(id).or_insert(0) += 1;
    }
    m.into_iter().collect()
}

pub fn describe(ds: &ObservedDataset) -> Result<DatasetStats, EvalError> {
    let (biased, unbiased) = derive_training_labels(&ds.obstag, &ds.rcttag, &ds.movies)?;
    let of_labels = |v: &[crate::baselines::Interaction]| {
        let positive = v.iter().filter(|i| i.label == 1).count();
        LabelCounts {
            positive,
            negative: v.len() - positive,
        }
    };
    let labels = vec![
        ("obstag".to_string(), of_labels(&biased)),
        ("rcttag".to_string(), of_labels(&unbiased)),
        ("test_1".to_string(), LabelCounts::of_test(&ds.splits.split1)),
        ("test_2".to_string(), LabelCounts::of_test(&ds.splits.split2)),
        ("test_3".to_string(), LabelCounts::of_test(&ds.splits.split3)),
        ("test".to_string(), LabelCounts::of_test(&ds.splits.all())),
    ];
    Ok(DatasetStats {
        rating_histogram: RatingHistogram::new(ds.ratings.iter().map(|r| r.rating)),
        ratings_per_user: count_by(ds.ratings.iter().map(|r| r.user)),
        ratings_per_movie: count_by(ds.ratings.iter().map(|r| r.movie)),
        labels,
    })
}

impl DatasetStats {
    /// Plot-ready tables: `bin_lo,bin_hi,count` for the histogram and
    /// `file,positive,negative,positive_share` for the labels.
    pub fn histogram_csv(&self) -> String {
        let h = &self.rating_histogram;
        let mut s = String::from("bin_lo,bin_hi,count\n");
        s += &format!("-inf,1,{}\n", h.below);
        for (i, c) in h.counts.iter().enumerate() {
            s += &format!("{},{},{c}\n", h.edges[i], h.edges[i + 1]);
        }
        s += &format!("5,inf,{}\n", h.above);
        s
    }

    pub fn labels_csv(&self) -> String {
        let mut s = String::from("file,positive,negative,positive_share\n");
        for (name, c) in &self.labels {
            let share = c.positive_share().map_or(String::new(), |p| format!("{p:.6}"));
            s += &format!("{name},{},{},{share}\n", c.positive, c.negative);
        }
        s
    }

    pub fn counts_csv(&self) -> String {
        let mut s = String::from("kind,id,ratings\n");
        for (kind, v) in [("user", &self.ratings_per_user), ("movie", &self.ratings_per_movie)] {
            for (id, n) in v {
                s += &format!("{kind},{id},{n}\n");
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generator::RatingRow;

    #[test]
    fn empty_dataset_has_zero_histogram() {
        let s = describe(&ObservedDataset::default()).unwrap();
        assert_eq!(s.rating_histogram.total(), 0);
        assert!(s
            .labels
            .iter()
            .all(|(_, c)| c.total() == 0 && c.positive_share().is_none()));
    }

    #[test]
    fn histogram_bins() {
        let h = RatingHistogram::new([1.0, 1.49, 1.5, 5.0, 4.99, 0.5, 5.5]);
        assert_eq!(h.counts, vec![2, 1, 0, 0, 0, 0, 0, 2]);
        assert_eq!((h.below, h.above, h.total()), (1, 1, 7));
    }

    #[test]
    fn per_entity_counts() {
        let ds = ObservedDataset {
            ratings: vec![
                RatingRow {
                    user: 0,
                    movie: 1,
                    rating: 3.0,
                },
                RatingRow {
                    user: 0,
                    movie: 2,
                    rating: 3.0,
                },
                RatingRow {
                    user: 4,
                    movie: 1,
                    rating: 3.0,
                },
            ],
            ..ObservedDataset::default()
        };
        let s = describe(&ds).unwrap();
        assert_eq!(s.ratings_per_user, vec![(0, 2), (4, 1)]);
        assert_eq!(s.ratings_per_movie, vec![(1, 2), (2, 1)]);
        assert!(s
            .histogram_csv()
            .starts_with("bin_lo,bin_hi,count\n-inf,1,0\n1,1.5,0\n"));
    }
}
