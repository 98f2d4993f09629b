//! Artifact output: CSV and JSON files collected under one directory, with a
//! manifest written last so a complete run is distinguishable from an
//! aborted one.

use crate::dynamics::{State, SupSample};
use crate::eigen::SweepPoint;
use crate::error::Result;
use crate::geometry::Geometry;
use crate::util::fmt17;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Accumulates artifact files in a directory. Call [`ArtifactSink::finish`]
/// to seal the run with `manifest.json`, or [`ArtifactSink::discard`] to
/// remove everything written so far after a failure.
#[derive(Debug)]
pub struct ArtifactSink {
    dir: PathBuf,
    written: Vec<ManifestEntry>,
    started: Instant,
}

#[derive(Debug, Clone, Serialize)]
struct ManifestEntry {
    file: String,
    kind: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    subcommand: &'a str,
    config_sha256: &'a str,
    version: &'a str,
    wall_clock_seconds: f64,
    artifacts: &'a [ManifestEntry],
}

impl ArtifactSink {
    pub fn new(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir)?;
        Ok(ArtifactSink { dir: dir.to_path_buf(), written: Vec::new(), started: Instant::now() })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Number of artifacts written so far (the manifest not included).
    pub fn count(&self) -> usize {
        self.written.len()
    }

    /// Writes a text artifact and records it for the manifest.
    pub fn write_text(&mut self, name: &str, kind: &str, text: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, text)?;
        self.written.push(ManifestEntry { file: name.to_string(), kind: kind.to_string() });
        Ok(path)
    }

    /// Writes a pretty-printed JSON artifact.
    pub fn write_json<T: Serialize>(&mut self, name: &str, kind: &str, value: &T) -> Result<PathBuf> {
        let mut text = serde_json::to_string_pretty(value).expect("artifact serialization");
        text.push('\n');
        self.write_text(name, kind, &text)
    }

    /// Writes the road component of a state or eigenvector as
    /// `i,x,value` rows.
    pub fn write_road_csv(&mut self, name: &str, geom: &Geometry, road: &[f64]) -> Result<PathBuf> {
        let mut out = String::from("i,x,value\n");
        for (i, &v) in road.iter().enumerate() {
            out.push_str(&format!("{i},{},{}\n", geom.x(i), fmt17(v)));
        }
        self.write_text(name, "road-vector", &out)
    }

    /// Writes a field component (2D or 1D cell) as `i,j,x,y,value` rows;
    /// the 1D cell has a single `j = 0` row at `y = 0`.
    pub fn write_field_csv(&mut self, name: &str, geom: &Geometry, field: &[f64]) -> Result<PathBuf> {
        let mut out = String::from("i,j,x,y,value\n");
        if geom.is_1d() {
            for (i, &v) in field.iter().enumerate() {
                out.push_str(&format!("{i},0,{},0,{}\n", geom.x(i), fmt17(v)));
            }
        } else {
            for j in 0..geom.ny {
                for i in 0..geom.nx {
                    let v = field[j * geom.nx + i];
                    out.push_str(&format!("{i},{j},{},{},{}\n", geom.x(i), geom.y(j), fmt17(v)));
                }
            }
        }
        self.write_text(name, "field-vector", &out)
    }

    /// Writes both components of a dynamics state.
    pub fn write_state(&mut self, stem: &str, geom: &Geometry, state: &State) -> Result<()> {
        if !state.road.is_empty() {
            self.write_road_csv(&format!("{stem}_road.csv"), geom, &state.road)?;
        }
        self.write_field_csv(&format!("{stem}_field.csv"), geom, &state.field)?;
        Ok(())
    }

    /// Sweep points as `size,lambda,residual,iters` rows.
    pub fn sweep_csv(points: &[SweepPoint]) -> String {
        let mut out = String::from("size,lambda,residual,iters\n");
        for p in points {
            out.push_str(&format!("{},{},{},{}\n", p.r, fmt17(p.lambda), fmt17(p.residual), p.iters));
        }
        out
    }

    /// Trajectory history as
    /// `t,sup_road,sup_field,min_road,min_field,residual` rows.
    pub fn trajectory_csv(history: &[SupSample]) -> String {
        let mut out = String::from("t,sup_road,sup_field,min_road,min_field,residual\n");
        for s in history {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                s.t,
                fmt17(s.sup_road),
                fmt17(s.sup_field),
                fmt17(s.min_road),
                fmt17(s.min_field),
                fmt17(s.residual)
            ));
        }
        out
    }

    /// Seals the run: writes `manifest.json` listing every artifact.
    pub fn finish(self, subcommand: &str, config_sha256: &str) -> Result<PathBuf> {
        let manifest = Manifest {
            subcommand,
            config_sha256,
            version: env!("CARGO_PKG_VERSION"),
            wall_clock_seconds: self.started.elapsed().as_secs_f64(),
            artifacts: &self.written,
        };
        let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serialization");
        text.push('\n');
        let path = self.dir.join("manifest.json");
        fs::write(&path, text)?;
        Ok(path)
    }

    /// Removes every artifact this sink wrote (for aborted runs). The
    /// directory itself is left in place.
    pub fn discard(self) {
        for entry in &self.written {
            let _ = fs::remove_file(self.dir.join(&entry.file));
        }
    }
}
