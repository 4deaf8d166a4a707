//! CSV export of rasters and its parser.
//!
//! One header row and one row per grid node in raster order. Provenance goes
//! to a `<name>.meta.json` sidecar so the CSV itself stays plain.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use accelbeam_core::{C64, Complex3, Point3};
use anyhow::{bail, Context, Result};

use crate::grid::FieldRaster;

pub const HEADER: [&str; 11] = ["u", "v", "x1", "x2", "x3", "re0", "im0", "re1", "im1", "re2", "im2"];

fn num(v: f64) -> String {
    if v.is_nan() {
        "nan".to_string()
    } else {
        format!("{v:.16e}")
    }
}

/// Write the CSV rows to any writer.
pub fn write_csv_to<W: Write>(raster: &FieldRaster, w: W) -> Result<()> {
    let mut wr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w);
    wr.write_record(HEADER)?;
    for (gp, val) in raster.points.iter().zip(&raster.values) {
        let mut rec = vec![num(gp.u), num(gp.v), num(gp.x.x1), num(gp.x.x2), num(gp.x.x3)];
        match val {
            Some(v) => {
                for z in v.to_array() {
                    rec.push(num(z.re));
                    rec.push(num(z.im));
                }
            }
            None => rec.extend(std::iter::repeat("nan".to_string()).take(6)),
        }
        wr.write_record(&rec)?;
    }
    wr.flush()?;
    Ok(())
}

pub fn meta_path(csv_path: &Path) -> PathBuf {
    let mut s = csv_path.as_os_str().to_owned();
    s.push(".meta.json");
    PathBuf::from(s)
}

/// Write `path` and its provenance sidecar.
pub fn export_csv(raster: &FieldRaster, path: &Path) -> Result<()> {
    let f = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
    write_csv_to(raster, BufWriter::new(f)).with_context(|| format!("cannot write {}", path.display()))?;
    let meta = serde_json::json!({
        "grid": raster.spec,
        "shape": [raster.nu, raster.nv],
        "masked": raster.masked,
        "missing": raster.missing,
        "provenance": raster.meta,
    });
    let mp = meta_path(path);
    let mut text = serde_json::to_string_pretty(&meta)?;
    text.push('\n');
    std::fs::write(&mp, text).with_context(|| format!("cannot write {}", mp.display()))?;
    Ok(())
}

/// One parsed CSV row; `value` is `None` when any component is non-finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub u: f64,
    pub v: f64,
    pub x: Point3,
    pub value: Option<Complex3>,
}

pub fn read_csv_from<R: Read>(r: R) -> Result<Vec<CsvRow>> {
    let mut rd = csv::Reader::from_reader(r);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        bail!("unexpected CSV header {header:?}");
    }
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let rec = rec?;
        let f: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().with_context(|| format!("row {}: bad number {s:?}", i + 1)))
            .collect::<Result<_>>()?;
        if f.len() != HEADER.len() {
            bail!("row {}: expected {} fields, got {}", i + 1, HEADER.len(), f.len());
        }
        let value = if f[5..].iter().all(|v| v.is_finite()) {
            Some(Complex3::new(C64::new(f[5], f[6]), C64::new(f[7], f[8]), C64::new(f[9], f[10])))
        } else {
            None
        };
        rows.push(CsvRow { u: f[0], v: f[1], x: Point3::new(f[2], f[3], f[4]), value });
    }
    Ok(rows)
}

pub fn read_csv(path: &Path) -> Result<Vec<CsvRow>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_csv_from(f).with_context(|| format!("cannot parse {}", path.display()))
}

/// Rebuild a raster (without grid geometry beyond node positions) from parsed rows.
pub fn raster_from_rows(rows: &[CsvRow], spec: crate::grid::GridSpec) -> Result<FieldRaster> {
    let (nu, nv) = spec.shape();
    if rows.len() != nu * nv {
        bail!("CSV has {} rows but the grid has {} nodes", rows.len(), nu * nv);
    }
    let mut points = spec.points()?;
    for (p, r) in points.iter_mut().zip(rows) {
        p.u = r.u;
        p.v = r.v;
        p.x = r.x;
    }
    let values: Vec<Option<Complex3>> = rows.iter().map(|r| r.value).collect();
    let masked = points.iter().filter(|p| !p.inside).count();
    let missing = values.iter().zip(&points).filter(|(v, p)| v.is_none() && p.inside).count();
    Ok(FieldRaster { spec, nu, nv, points, values, masked, missing, meta: serde_json::Value::Null })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{sample_grid, Axis, GridSpec};

    fn raster() -> FieldRaster {
        let g = GridSpec::Plane { normal: Axis::X3, offset: 0.5, u_range: [0.0, 1.0], v_range: [0.0, 1.0], nu: 2, nv: 2 };
        sample_grid(&g, &|x: Point3| {
            Ok(Complex3::new(C64::new(x.x1.exp(), 1.0 / 3.0), C64::new(-1e-300, 2.5e300), C64::new(x.x2, -x.x1)))
        })
        .unwrap()
    }

    #[test]
    fn two_by_two_gives_five_lines() {
        let mut buf = Vec::new();
        write_csv_to(&raster(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 5);
        assert_eq!(text.lines().next().unwrap(), "u,v,x1,x2,x3,re0,im0,re1,im1,re2,im2");
    }

    #[test]
    fn round_trip_is_exact() {
        let r = raster();
        let mut buf = Vec::new();
        write_csv_to(&r, &mut buf).unwrap();
        let rows = read_csv_from(buf.as_slice()).unwrap();
        for (row, (gp, v)) in rows.iter().zip(r.points.iter().zip(&r.values)) {
            assert_eq!(row.x, gp.x);
            let (a, b) = (row.value.unwrap(), v.unwrap());
            for (p, q) in a.to_array().iter().zip(b.to_array()) {
                assert!((p - q).norm() <= 1e-14 * q.norm());
            }
        }
    }

    #[test]
    fn masked_point_round_trips_as_nan() {
        let mut r = raster();
        r.values[2] = None;
        let mut buf = Vec::new();
        write_csv_to(&r, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.lines().nth(3).unwrap().ends_with("nan,nan,nan,nan,nan,nan"));
        let rows = read_csv_from(buf.as_slice()).unwrap();
        assert_eq!(rows[2].value, None);
        assert!(rows[1].value.is_some());
    }

    #[test]
    fn io_errors_name_the_destination() {
        let err = export_csv(&raster(), Path::new("/nonexistent-dir/out.csv")).unwrap_err();
        assert!(format!("{err:#}").contains("/nonexistent-dir/out.csv"));
    }
}
