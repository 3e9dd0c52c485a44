//! On-disk cache of fixed-point tables, one JSON-lines file per `(r, N)`.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use orbidt::partitions::{color_vector, index, macmahon_counts, ColorVector, PlanePartition};
use orbidt::qseries::{FixedPoint, FixedPointTable};
use orbidt::vertex::WeightMultiset;
use orbidt::{Error, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

const VERSION: &str = "orbidt-fixed-points-v1";

#[derive(Serialize, Deserialize)]
struct Record {
    boxes: Vec<[u32; 3]>,
    alpha: Vec<i64>,
    index: i64,
    #[serde(rename = "W")]
    w: Vec<[i32; 3]>,
}

impl Record {
    fn from_point(f: &FixedPoint) -> Self {
        Record {
            boxes: f.partition.boxes().to_vec(),
            alpha: f.alpha.0.clone(),
            index: f.index,
            w: f.weights.0.clone(),
        }
    }

    /// Alpha and index are cheap to recompute, so a record that disagrees is rejected.
    fn into_point(self, r: usize) -> Result<FixedPoint> {
        let partition = PlanePartition::from_boxes(self.boxes)?;
        let alpha = ColorVector(self.alpha);
        if alpha != color_vector(&partition, r) || self.index != index(&partition, r) {
            return Err(Error::Domain(format!("stale cache record for {partition}")));
        }
        Ok(FixedPoint {
            partition,
            alpha,
            index: self.index,
            weights: WeightMultiset(self.w),
        })
    }
}

pub fn cache_key(r: usize, order: usize) -> String {
    let mut h = Sha256::new();
    h.update(format!("{VERSION}|r={r}|N={order}"));
    hex::encode(h.finalize())
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: Option<PathBuf>,
}

impl Cache {
    pub fn new(dir: Option<PathBuf>) -> Self {
        Cache { dir }
    }

    pub fn path(&self, r: usize, order: usize) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{}.jsonl", cache_key(r, order))))
    }

    /// Load the table, falling back to a fresh computation when the file is missing or unusable.
    pub fn table(&self, r: usize, order: usize) -> Result<FixedPointTable> {
        let Some(path) = self.path(r, order) else {
            return FixedPointTable::new(r, order);
        };
        if let Some(t) = load(&path, r, order) {
            return Ok(t);
        }
        let t = FixedPointTable::new(r, order)?;
        // a cache that cannot be written is not an error
        let _ = store(&path, &t);
        Ok(t)
    }
}

fn expected_len(order: usize) -> usize {
    macmahon_counts(order).iter().map(|&c| c as usize).sum()
}

fn load(path: &Path, r: usize, order: usize) -> Option<FixedPointTable> {
    let file = fs::File::open(path).ok()?;
    let mut points = Vec::new();
    for line in BufReader::new(file).lines() {
        let rec: Record = serde_json::from_str(&line.ok()?).ok()?;
        points.push(rec.into_point(r).ok()?);
    }
    if points.len() != expected_len(order) {
        return None;
    }
    FixedPointTable::from_points(r, order, points).ok()
}

fn store(path: &Path, t: &FixedPointTable) -> std::io::Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir)?;
    }
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    {
        let mut f = std::io::BufWriter::new(fs::File::create(&tmp)?);
        for p in t.points() {
            serde_json::to_writer(&mut f, &Record::from_point(p))?;
            f.write_all(b"\n")?;
        }
        f.flush()?;
    }
    fs::rename(tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_depends_on_parameters() {
        assert_eq!(cache_key(2, 5), cache_key(2, 5));
        assert_ne!(cache_key(2, 5), cache_key(2, 6));
        assert_ne!(cache_key(2, 5), cache_key(3, 5));
        assert_eq!(cache_key(1, 1).len(), 64);
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        let cold = cache.table(2, 4).unwrap();
        let path = cache.path(2, 4).unwrap();
        assert!(path.exists());
        let warm = load(&path, 2, 4).expect("cache readable");
        assert_eq!(cold.points(), warm.points());

        fs::write(&path, "{not json\n").unwrap();
        assert!(load(&path, 2, 4).is_none());
        let again = cache.table(2, 4).unwrap();
        assert_eq!(cold.points(), again.points());
        assert!(load(&path, 2, 4).is_some());
    }

    #[test]
    fn truncated_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(Some(dir.path().to_path_buf()));
        cache.table(1, 3).unwrap();
        let path = cache.path(1, 3).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        let first: Vec<&str> = text.lines().take(2).collect();
        fs::write(&path, first.join("\n")).unwrap();
        assert!(load(&path, 1, 3).is_none());
    }
}
