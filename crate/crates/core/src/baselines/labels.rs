//! Tag-level training labels from the movie-level tag files.

use std::collections::{BTreeMap, HashMap};

use super::{BaselineError, Interaction};
use crate::catalog::TagId;
use crate::generator::{TagRow, NO_TAG};

fn collect(rows: &[TagRow], movie_tags: &HashMap<u32, &[TagId]>) -> Result<Vec<Interaction>, BaselineError> {
    let mut labels: BTreeMap<(u32, TagId), u8> = BTreeMap::new();
    for r in rows {
        let tags = movie_tags
            .get(&r.movie)
            .ok_or(BaselineError::UnknownMovie { movie: r.movie })?;
        if r.tag == NO_TAG {
            for &t in tags.iter() {
                labels.entry((r.user, t)).or_insert(0);
            }
        } else {
            let t = TagId::try_from(r.tag)
                .ok()
                .filter(|t| tags.contains(t))
                .ok_or(BaselineError::TagNotInMovie {
                    user: r.user,
                    movie: r.movie,
                    tag: r.tag,
                })?;
            labels.insert((r.user, t), 1);
        }
    }
    Ok(labels
        .into_iter()
        .map(|((user, tag), label)| Interaction::new(user, tag, label))
        .collect())
}

/// Biased (observational) and unbiased (RCT) interaction sets, each sorted by
/// (user, tag) with duplicates collapsed to their maximum label.
///
/// A row with tag `t` gives label 1 for `(u, t)`; a `-1` row gives label 0 for
/// every tag of the movie.
pub fn derive_training_labels(
    obstag: &[TagRow],
    rcttag: &[TagRow],
    movies: &[(u32, Vec<TagId>)],
) -> Result<(Vec<Interaction>, Vec<Interaction>), BaselineError> {
    let movie_tags: HashMap<u32, &[TagId]> = movies.iter().map(|(m, t)| (*m, t.as_slice())).collect();
    Ok((collect(obstag, &movie_tags)?, collect(rcttag, &movie_tags)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(user: u32, movie: u32, tag: i64) -> TagRow {
        TagRow { user, movie, tag }
    }

    fn movies() -> Vec<(u32, Vec<TagId>)> {
        vec![(0, (10..18).collect()), (1, vec![3, 10, 40])]
    }

    #[test]
    fn no_tag_row_gives_a_negative_per_movie_tag() {
        let (b, u) = derive_training_labels(&[row(4, 0, NO_TAG)], &[], &movies()).unwrap();
        assert!(u.is_empty());
        assert_eq!(b.len(), 8);
        assert!(b.iter().all(|i| i.user == 4 && i.label == 0 && i.weight == 1.0));
    }

    #[test]
    fn tag_row_gives_one_positive() {
        let (b, _) = derive_training_labels(&[row(2, 1, 40)], &[], &movies()).unwrap();
        assert_eq!(b, vec![Interaction::new(2, 40, 1)]);
    }

    #[test]
    fn positive_beats_negative_regardless_of_order() {
        for rows in [
            vec![row(2, 0, NO_TAG), row(2, 1, 10)],
            vec![row(2, 1, 10), row(2, 0, NO_TAG)],
        ] {
            let (b, _) = derive_training_labels(&rows, &[], &movies()).unwrap();
            let l = b.iter().find(|i| i.tag == 10).unwrap();
            assert_eq!(l.label, 1);
            assert_eq!(b.len(), 8);
        }
    }

    #[test]
    fn rct_rows_form_the_unbiased_set() {
        let (b, u) = derive_training_labels(&[], &[row(0, 1, 3)], &movies()).unwrap();
        assert!(b.is_empty());
        assert_eq!(u, vec![Interaction::new(0, 3, 1)]);
    }

    #[test]
    fn foreign_tag_is_corruption() {
        let err = derive_training_labels(&[row(0, 1, 11)], &[], &movies()).unwrap_err();
        assert!(matches!(err, BaselineError::TagNotInMovie { tag: 11, .. }));
        let err = derive_training_labels(&[row(0, 9, 11)], &[], &movies()).unwrap_err();
        assert!(matches!(err, BaselineError::UnknownMovie { movie: 9 }));
    }
}
