//! CSV emission for patterns, meta-distribution estimates and level sets.
//!
//! Dialect: comma separator, `.` decimal point, LF newlines, one header
//! row, and `#`-prefixed `key=value` metadata lines before the header.
//! Nothing time-dependent is ever written, so identical inputs produce
//! identical bytes.

use std::io::Write;

use crate::contours::{LevelSet, SweepResult};
use crate::coverage::MetaDistEstimate;
use crate::error::Result;
use crate::geometry::PointPattern;

fn write_metadata<W: Write>(w: &mut W, meta: &[(String, String)]) -> Result<()> {
    for (key, value) in meta {
        writeln!(w, "# {key}={value}")?;
    }
    Ok(())
}

/// `x,y[,parent]` rows, window recorded in the metadata block.
pub fn write_pattern_csv<W: Write>(
    w: &mut W,
    pattern: &PointPattern,
    extra_meta: &[(String, String)],
) -> Result<()> {
    let mut meta = pattern.window.metadata();
    meta.extend(extra_meta.iter().cloned());
    meta.push(("points".into(), format!("{}", pattern.len())));
    write_metadata(w, &meta)?;

    match &pattern.parents {
        Some(parents) => {
            writeln!(w, "x,y,parent")?;
            for (p, idx) in pattern.points.iter().zip(parents) {
                writeln!(w, "{},{},{}", p.x, p.y, idx)?;
            }
        }
        None => {
            writeln!(w, "x,y")?;
            for p in &pattern.points {
                writeln!(w, "{},{}", p.x, p.y)?;
            }
        }
    }
    Ok(())
}

/// `epsilon,ccdf,ci_lo,ci_hi` rows plus mean coverage in the metadata.
pub fn write_metadist_csv<W: Write>(
    w: &mut W,
    est: &MetaDistEstimate,
    extra_meta: &[(String, String)],
) -> Result<()> {
    let mut meta = extra_meta.to_vec();
    meta.push(("n_outer".into(), format!("{}", est.n_outer)));
    meta.push(("mean_coverage".into(), format!("{}", est.mean_coverage)));
    meta.push(("mean_ci_lo".into(), format!("{}", est.mean_ci.0)));
    meta.push(("mean_ci_hi".into(), format!("{}", est.mean_ci.1)));
    write_metadata(w, &meta)?;

    writeln!(w, "epsilon,ccdf,ci_lo,ci_hi")?;
    for i in 0..est.epsilons.len() {
        writeln!(
            w,
            "{},{},{},{}",
            est.epsilons[i], est.ccdf[i], est.ccdf_ci[i].0, est.ccdf_ci[i].1
        )?;
    }
    Ok(())
}

/// `level,segment_id,x,y` rows; axis names and scales go in the metadata.
pub fn write_levelsets_csv<W: Write>(
    w: &mut W,
    level_sets: &[LevelSet],
    extra_meta: &[(String, String)],
) -> Result<()> {
    write_metadata(w, extra_meta)?;
    writeln!(w, "level,segment_id,x,y")?;
    for set in level_sets {
        for (segment_id, polyline) in set.polylines.iter().enumerate() {
            for p in polyline {
                writeln!(w, "{},{},{},{}", set.level, segment_id, p.x, p.y)?;
            }
        }
    }
    Ok(())
}

/// `x,y,coverage` rows for the raw sweep grid.
pub fn write_sweep_grid_csv<W: Write>(
    w: &mut W,
    sweep: &SweepResult,
    extra_meta: &[(String, String)],
) -> Result<()> {
    write_metadata(w, extra_meta)?;
    writeln!(w, "x,y,coverage")?;
    for (ix, x) in sweep.x_values.iter().enumerate() {
        for (iy, y) in sweep.y_values.iter().enumerate() {
            writeln!(w, "{},{},{}", x, y, sweep.coverage[ix][iy])?;
        }
    }
    Ok(())
}
