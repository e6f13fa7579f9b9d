//! Dataset files.
//!
//! | file | columns |
//! |------|---------|
//! | `movie.csv` | `movieID,tags` (tags `;`-separated) |
//! | `rating.csv` | `userID,movieID,rating` |
//! | `obstag.csv`, `rcttag.csv` | `userID,movieID,tagID` (`-1`: likes none) |
//! | `test_1.csv` … `test_3.csv`, `test.csv` | `userID,tagID,islike` |
//! | `ground_truth.csv` | `userID,tagID,islike,tau` |
//! | `world.json` | full world dump |
//!
//! All rows are sorted by their leading columns and files end with `\n`.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::missing::RatingRow;
use super::observe::TagRow;
use super::splits::{TestRow, TestSplits};
use super::tau::TauTable;
use super::world::World;
use super::GenError;
use crate::catalog::TagId;

pub const MOVIE_FILE: &str = "movie.csv";
pub const RATING_FILE: &str = "rating.csv";
pub const OBSTAG_FILE: &str = "obstag.csv";
pub const RCTTAG_FILE: &str = "rcttag.csv";
pub const TEST_FILES: [&str; 3] = ["test_1.csv", "test_2.csv", "test_3.csv"];
pub const TEST_ALL_FILE: &str = "test.csv";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.csv";
pub const WORLD_FILE: &str = "world.json";

/// Everything a model may train and be tested on.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservedDataset {
    /// `(movieID, tags)` sorted by id.
    pub movies: Vec<(u32, Vec<TagId>)>,
    pub ratings: Vec<RatingRow>,
    pub obstag: Vec<TagRow>,
    pub rcttag: Vec<TagRow>,
    pub splits: TestSplits,
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>, GenError> {
    Ok(BufWriter::new(File::create(dir.join(name))?))
}

fn write_tag_rows(dir: &Path, name: &str, rows: &[TagRow]) -> Result<(), GenError> {
    let mut w = create(dir, name)?;
    writeln!(w, "userID,movieID,tagID")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.user, r.movie, r.tag)?;
    }
    w.flush()?;
    Ok(())
}

fn write_test_rows(dir: &Path, name: &str, rows: &[TestRow]) -> Result<(), GenError> {
    let mut w = create(dir, name)?;
    writeln!(w, "userID,tagID,islike")?;
    for r in rows {
        writeln!(w, "{},{},{}", r.user, r.tag, u8::from(r.islike))?;
    }
    w.flush()?;
    Ok(())
}

impl ObservedDataset {
    /// Writes the training and test files; returns the file names written.
    pub fn write_dir(&self, dir: impl AsRef<Path>) -> Result<Vec<&'static str>, GenError> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;

        let mut w = create(dir, MOVIE_FILE)?;
        writeln!(w, "movieID,tags")?;
        for (id, tags) in &self.movies {
            let tags: Vec<String> = tags.iter().map(ToString::to_string).collect();
            writeln!(w, "{id},{}", tags.join(";"))?;
        }
        w.flush()?;

        let mut w = create(dir, RATING_FILE)?;
        writeln!(w, "userID,movieID,rating")?;
        for r in &self.ratings {
            writeln!(w, "{},{},{:.4}", r.user, r.movie, r.rating)?;
        }
        w.flush()?;

        write_tag_rows(dir, OBSTAG_FILE, &self.obstag)?;
        write_tag_rows(dir, RCTTAG_FILE, &self.rcttag)?;
        let splits = [&self.splits.split1, &self.splits.split2, &self.splits.split3];
        for (name, rows) in TEST_FILES.iter().zip(splits) {
            write_test_rows(dir, name, rows)?;
        }
        write_test_rows(dir, TEST_ALL_FILE, &self.splits.all())?;

        let mut names = vec![MOVIE_FILE, RATING_FILE, OBSTAG_FILE, RCTTAG_FILE];
        names.extend(TEST_FILES);
        names.push(TEST_ALL_FILE);
        Ok(names)
    }

    pub fn read_dir(dir: impl AsRef<Path>) -> Result<ObservedDataset, GenError> {
        let dir = dir.as_ref();
        let movies = read_rows(dir, MOVIE_FILE, &["movieID", "tags"], |f| {
            let tags = f[1]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(str::parse)
                .collect::<Result<Vec<TagId>, _>>()
                .map_err(|e| e.to_string())?;
            Ok((parse(f[0])?, tags))
        })?;
        let ratings = read_rows(dir, RATING_FILE, &["userID", "movieID", "rating"], |f| {
            Ok(RatingRow {
                user: parse(f[0])?,
                movie: parse(f[1])?,
                rating: parse(f[2])?,
            })
        })?;
        let tag_row = |f: &[&str]| -> Result<TagRow, String> {
            Ok(TagRow {
                user: parse(f[0])?,
                movie: parse(f[1])?,
                tag: parse(f[2])?,
            })
        };
        let cols = ["userID", "movieID", "tagID"];
        let obstag = read_rows(dir, OBSTAG_FILE, &cols, tag_row)?;
        let rcttag = read_rows(dir, RCTTAG_FILE, &cols, tag_row)?;
        let mut splits = TEST_FILES.iter().map(|name| read_test_rows(dir, name));
        Ok(ObservedDataset {
            movies,
            ratings,
            obstag,
            rcttag,
            splits: TestSplits {
                split1: splits.next().expect("three splits")?,
                split2: splits.next().expect("three splits")?,
                split3: splits.next().expect("three splits")?,
            },
        })
    }
}

pub fn read_test_rows(dir: &Path, name: &str) -> Result<Vec<TestRow>, GenError> {
    read_rows(dir, name, &["userID", "tagID", "islike"], |f| {
        Ok(TestRow {
            user: parse(f[0])?,
            tag: parse(f[1])?,
            islike: match f[2] {
                "0" => false,
                "1" => true,
                other => return Err(format!("islike must be 0 or 1, got `{other}`")),
            },
        })
    })
}

fn parse<T: std::str::FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.trim().parse().map_err(|e| format!("`{s}`: {e}"))
}

fn read_rows<T>(
    dir: &Path,
    name: &str,
    header: &[&str],
    mut row: impl FnMut(&[&str]) -> Result<T, String>,
) -> Result<Vec<T>, GenError> {
    let path = dir.join(name);
    if !path.exists() {
        return Err(GenError::MissingFile(path.display().to_string()));
    }
    let mut rdr = csv::ReaderBuilder::new().from_path(&path)?;
    let got: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if got != header {
        return Err(GenError::Format {
            file: name.to_string(),
            line: 1,
            message: format!("expected header `{}`", header.join(",")),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        let fields: Vec<&str> = rec.iter().collect();
        if fields.len() != header.len() {
            return Err(GenError::Format {
                file: name.to_string(),
                line,
                message: format!("expected {} fields", header.len()),
            });
        }
        out.push(row(&fields).map_err(|message| GenError::Format {
            file: name.to_string(),
            line,
            message,
        })?);
    }
    Ok(out)
}

pub fn write_ground_truth(dir: &Path, tau: &TauTable<'_>) -> Result<(), GenError> {
    let mut w = create(dir, GROUND_TRUTH_FILE)?;
    writeln!(w, "userID,tagID,islike,tau")?;
    for e in tau.iter() {
        writeln!(w, "{},{},{},{}", e.user, e.tag, u8::from(e.tau_prime), e.tau)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_world(dir: &Path, world: &World) -> Result<(), GenError> {
    let mut w = create(dir, WORLD_FILE)?;
    serde_json::to_writer(&mut w, world).map_err(std::io::Error::from)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}
