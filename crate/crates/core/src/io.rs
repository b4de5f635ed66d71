//! Scene files, JSON results and timing CSV.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::geometry::Scene;
use crate::Result;

pub fn read_scene(path: impl AsRef<Path>) -> Result<Scene> {
    read_json(path)
}

pub fn write_scene(path: impl AsRef<Path>, scene: &Scene) -> Result<()> {
    write_json(path, scene)
}

pub fn read_json<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<T> {
    let file = File::open(path)?;
    Ok(serde_json::from_reader(BufReader::new(file))?)
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: impl AsRef<Path>, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// One row of the timing CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub n: usize,
    pub structure: String,
    pub op: String,
    /// Operations timed in this row.
    pub count: usize,
    pub wall_ms: f64,
    /// Node counts plus bucket bytes of the structure.
    pub peak_mem_bytes: usize,
}

pub const TIMING_HEADER: [&str; 6] = ["n", "structure", "op", "count", "wall_ms", "peak_mem_bytes"];

pub fn write_timings<W: std::io::Write>(out: W, rows: &[TimingRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(|e| crate::Error::InvalidSpec(e.to_string()))?;
    }
    if rows.is_empty() {
        w.write_record(TIMING_HEADER).map_err(|e| crate::Error::InvalidSpec(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_timings<R: std::io::Read>(input: R) -> Result<Vec<TimingRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| crate::Error::InvalidSpec(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ConvexBody, Homothet};

    #[test]
    fn timings_round_trip_with_stable_header() {
        let rows = vec![TimingRow {
            n: 2000,
            structure: "fast".into(),
            op: "bfs".into(),
            count: 1,
            wall_ms: 12.5,
            peak_mem_bytes: 4096,
        }];
        let mut buf = Vec::new();
        write_timings(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(text.lines().next().unwrap(), TIMING_HEADER.join(","));
        assert_eq!(read_timings(&buf[..]).unwrap(), rows);
    }

    #[test]
    fn scene_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("kprox-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("scene.json");
        let s = Scene::new(ConvexBody::ellipsoid_axes([1.0, 2.0, 0.5]).unwrap(), vec![Homothet::new([1.0, 2.0, 3.0], 0.5)]);
        write_scene(&path, &s).unwrap();
        let back = read_scene(&path).unwrap();
        assert_eq!(back.members(), s.members());
        assert_eq!(back.body, s.body);
        std::fs::remove_dir_all(dir).unwrap();
    }
}
