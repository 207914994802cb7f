//! File output for external plotting: CSV snapshots and diagnostics with
//! commented headers, plus the plain-text run summary.
//!
//! Every number is serialized with 17 significant digits so re-running a
//! config reproduces each file byte for byte.

use crate::grid::Dim;
use crate::state::ConservedState;
use crate::timestep::DiagnosticsRow;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// `snapshot_t00001.500000.csv`: fixed-width time so names sort temporally.
pub fn snapshot_filename(time: f64) -> String {
    format!("snapshot_t{time:012.6}.csv")
}

/// Write one state as CSV. Columns are `x,rho,u,rho_u` in 1D and
/// `x,y,rho,u1,u2,rho_u1,rho_u2` in 2D, cell-centered, x fastest.
pub fn write_snapshot(
    dir: &Path,
    state: &ConservedState,
    config_hash: &str,
) -> std::io::Result<PathBuf> {
    let path = dir.join(snapshot_filename(state.time));
    let mut w = BufWriter::new(File::create(&path)?);
    let grid = &state.grid;
    writeln!(w, "# euler-alignment snapshot")?;
    writeln!(w, "# dim = {}", grid.dim().as_usize())?;
    writeln!(w, "# half_width = {}", fmt(grid.half_width()))?;
    match grid.dim() {
        Dim::One => writeln!(w, "# cells = {}", grid.nx())?,
        Dim::Two => writeln!(w, "# cells = {} {}", grid.nx(), grid.ny())?,
    }
    writeln!(w, "# time = {}", fmt(state.time))?;
    writeln!(w, "# config = {config_hash}")?;
    match grid.dim() {
        Dim::One => {
            writeln!(w, "x,rho,u,rho_u")?;
            for i in 0..grid.nx() {
                let rho = state.rho[i];
                let u = state.u[0][i];
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt(grid.center_x(i)),
                    fmt(rho),
                    fmt(u),
                    fmt(rho * u)
                )?;
            }
        }
        Dim::Two => {
            writeln!(w, "x,y,rho,u1,u2,rho_u1,rho_u2")?;
            for j in 0..grid.ny() {
                for i in 0..grid.nx() {
                    let k = grid.idx(i, j);
                    let rho = state.rho[k];
                    let (u1, u2) = (state.u[0][k], state.u[1][k]);
                    writeln!(
                        w,
                        "{},{},{},{},{},{},{}",
                        fmt(grid.center_x(i)),
                        fmt(grid.center_y(j)),
                        fmt(rho),
                        fmt(u1),
                        fmt(u2),
                        fmt(rho * u1),
                        fmt(rho * u2)
                    )?;
                }
            }
        }
    }
    w.flush()?;
    Ok(path)
}

/// Write the diagnostics time series, one row per recorded step.
pub fn write_diagnostics(
    dir: &Path,
    rows: &[DiagnosticsRow],
    dim: Dim,
    config_hash: &str,
) -> std::io::Result<PathBuf> {
    let path = dir.join("diagnostics.csv");
    let mut w = BufWriter::new(File::create(&path)?);
    writeln!(w, "# euler-alignment diagnostics")?;
    writeln!(w, "# config = {config_hash}")?;
    let momentum_cols = match dim {
        Dim::One => "momentum_x",
        Dim::Two => "momentum_x,momentum_y",
    };
    writeln!(
        w,
        "t,mass,{momentum_cols},kinetic_energy,alignment_dissipation,\
         support_diameter,velocity_diameter,max_abs_u,min_rho,max_rho,dt"
    )?;
    for row in rows {
        let momentum = row
            .momentum
            .iter()
            .map(|&p| fmt(p))
            .collect::<Vec<_>>()
            .join(",");
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt(row.t),
            fmt(row.mass),
            momentum,
            fmt(row.kinetic_energy),
            fmt(row.alignment_dissipation),
            fmt(row.support_diameter),
            fmt(row.velocity_diameter),
            fmt(row.max_abs_u),
            fmt(row.min_rho),
            fmt(row.max_rho),
            fmt(row.dt)
        )?;
    }
    w.flush()?;
    Ok(path)
}

pub fn write_text(dir: &Path, name: &str, content: &str) -> std::io::Result<PathBuf> {
    let path = dir.join(name);
    fs::write(&path, content)?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;
    use crate::presets::InitialPreset;

    #[test]
    fn filenames_sort_with_time() {
        let names: Vec<String> = [0.0, 0.65, 1.0, 2.5, 10.0]
            .iter()
            .map(|&t| snapshot_filename(t))
            .collect();
        let mut sorted = names.clone();
        sorted.sort();
        assert_eq!(names, sorted);
        assert_eq!(names[1], "snapshot_t00000.650000.csv");
    }

    #[test]
    fn snapshot_round_trips_column_count() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(Dim::Two, 1.0, 4).unwrap();
        let s = InitialPreset::UniformFlock.build(&g).unwrap();
        let path = write_snapshot(dir.path(), &s, "deadbeef00000000").unwrap();
        let text = fs::read_to_string(path).unwrap();
        let mut lines = text.lines();
        let header_count = lines.by_ref().take_while(|l| l.starts_with('#')).count();
        assert_eq!(header_count, 6);
        let body: Vec<&str> = text.lines().skip(header_count).collect();
        assert_eq!(body[0], "x,y,rho,u1,u2,rho_u1,rho_u2");
        assert_eq!(body.len(), 1 + 16);
        for row in &body[1..] {
            assert_eq!(row.split(',').count(), 7);
            for value in row.split(',') {
                assert!(value.parse::<f64>().is_ok(), "{value}");
            }
        }
    }

    #[test]
    fn writes_are_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(Dim::One, 2.0, 16).unwrap();
        let s = InitialPreset::TwoBlocks.build(&g).unwrap();
        let p1 = write_snapshot(dir.path(), &s, "c0ffee0000000000").unwrap();
        let first = fs::read(&p1).unwrap();
        let p2 = write_snapshot(dir.path(), &s, "c0ffee0000000000").unwrap();
        assert_eq!(p1, p2);
        assert_eq!(first, fs::read(&p2).unwrap());
    }
}
