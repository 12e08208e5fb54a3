//! CSV ingestion and export.
//!
//! Format: a header row `x0,...,xk,label` (coordinate column names are
//! free-form), comma separated, `\n` line endings. Floats are written in
//! shortest round-trip form, so `load(save(ds)) == ds` exactly.

use std::collections::HashMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::classifier::CondensedSet;
use crate::dataset::{Dataset, Label, LabeledPoint};
use crate::error::{Error, Result};
use crate::metric::Metric;

pub const LABEL_COLUMN: &str = "label";
pub const WEIGHT_COLUMN: &str = "weight";

pub(crate) fn format_f64(x: f64) -> String {
    // Debug prints the shortest string that parses back to the same bits.
    format!("{x:?}")
}

pub(crate) fn parse_cell(cell: &str, row: usize) -> Result<f64> {
    let v: f64 = cell
        .trim()
        .parse()
        .map_err(|_| Error::csv(row, format!("non-numeric cell `{cell}`")))?;
    if !v.is_finite() {
        return Err(Error::csv(row, format!("non-finite value `{cell}`")));
    }
    Ok(v)
}

/// A dataset read from CSV, plus the optional `weight` column.
#[derive(Clone, Debug)]
pub struct Table {
    pub dataset: Dataset,
    pub weights: Option<Vec<f64>>,
}

/// Reads a dataset. Every column other than `label_column` (and a column
/// named `weight`, returned separately) is a coordinate. Labels that are
/// all non-negative integers are used as is; otherwise distinct label
/// strings are numbered in order of first appearance.
pub fn read_csv<R: Read>(input: R, label_column: &str, metric: Metric) -> Result<Table> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(|e| Error::csv(1, e.to_string()))?.clone();
    let label_at = header
        .iter()
        .position(|h| h.trim() == label_column)
        .ok_or_else(|| Error::csv(1, format!("no label column `{label_column}`")))?;
    let weight_at = header.iter().position(|h| h.trim() == WEIGHT_COLUMN);
    let coord_cols: Vec<usize> = (0..header.len())
        .filter(|&c| c != label_at && Some(c) != weight_at)
        .collect();
    if coord_cols.is_empty() {
        return Err(Error::csv(1, "no coordinate columns"));
    }

    let mut coords = Vec::new();
    let mut raw_labels = Vec::new();
    let mut weights = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| Error::csv(row, e.to_string()))?;
        if rec.len() != header.len() {
            return Err(Error::csv(
                row,
                format!("expected {} fields, found {}", header.len(), rec.len()),
            ));
        }
        coords.push(
            coord_cols
                .iter()
                .map(|&c| parse_cell(&rec[c], row))
                .collect::<Result<Vec<_>>>()?,
        );
        raw_labels.push(rec[label_at].trim().to_string());
        if let Some(w) = weight_at {
            let v: f64 = rec[w]
                .trim()
                .parse()
                .map_err(|_| Error::csv(row, format!("non-numeric weight `{}`", &rec[w])))?;
            if v.is_nan() || v <= 0.0 {
                return Err(Error::csv(row, format!("weight must be positive, got `{}`", &rec[w])));
            }
            weights.push(v);
        }
    }
    if coords.is_empty() {
        return Err(Error::EmptyDataset);
    }

    let labels = encode_labels(&raw_labels);
    let points = coords
        .into_iter()
        .zip(labels)
        .map(|(c, l)| LabeledPoint::new(c, l))
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        dataset: Dataset::new(points, metric)?,
        weights: weight_at.map(|_| weights),
    })
}

fn encode_labels(raw: &[String]) -> Vec<Label> {
    if let Ok(ints) = raw.iter().map(|s| s.parse::<Label>()).collect::<std::result::Result<Vec<_>, _>>() {
        return ints;
    }
    let mut codes: HashMap<&str, Label> = HashMap::new();
    raw.iter()
        .map(|s| {
            let next = codes.len() as Label;
            *codes.entry(s.as_str()).or_insert(next)
        })
        .collect()
}

pub fn load_csv(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset> {
    Ok(load_table(path, label_column, Metric::Euclidean)?.dataset)
}

pub fn load_table(path: impl AsRef<Path>, label_column: &str, metric: Metric) -> Result<Table> {
    read_csv(std::fs::File::open(path)?, label_column, metric)
}

fn header(dim: usize, weighted: bool) -> Vec<String> {
    let mut h: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    h.push(LABEL_COLUMN.into());
    if weighted {
        h.push(WEIGHT_COLUMN.into());
    }
    h
}

fn writer<W: Write>(out: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out)
}

fn io_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

pub fn write_csv<W: Write>(ds: &Dataset, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(header(ds.dim(), false)).map_err(io_err)?;
    for p in ds.points() {
        let mut rec: Vec<String> = p.coords().iter().map(|&c| format_f64(c)).collect();
        rec.push(p.label.to_string());
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    write_csv(ds, std::fs::File::create(path)?)
}

/// Writes the condensed points with a trailing `weight` column, in the
/// set's order.
pub fn write_condensed_csv<W: Write>(ds: &Dataset, set: &CondensedSet, out: W) -> Result<()> {
    let mut w = writer(out);
    w.write_record(header(ds.dim(), true)).map_err(io_err)?;
    for (i, weight) in set.iter() {
        let p = ds.point(i);
        let mut rec: Vec<String> = p.coords().iter().map(|&c| format_f64(c)).collect();
        rec.push(p.label.to_string());
        rec.push(format_f64(weight));
        w.write_record(&rec).map_err(io_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str) -> Result<Table> {
        read_csv(text.as_bytes(), LABEL_COLUMN, Metric::Euclidean)
    }

    #[test]
    fn reads_hand_written_file() {
        let t = read("x0,x1,label\n0,0,0\n1.5,2,1\n-3,4e-1,1\n").unwrap();
        assert_eq!(t.dataset.len(), 3);
        assert_eq!(t.dataset.coords(2), &[-3.0, 0.4]);
        assert_eq!(t.dataset.label(1), 1);
        assert!(t.weights.is_none());
    }

    #[test]
    fn label_column_can_be_anywhere_and_strings_are_coded() {
        let t = read_csv(
            "species,a,b\nsetosa,1,2\nversicolor,3,4\nsetosa,5,6\n".as_bytes(),
            "species",
            Metric::Euclidean,
        )
        .unwrap();
        assert_eq!(t.dataset.labels().collect::<Vec<_>>(), vec![0, 1, 0]);
        assert_eq!(t.dataset.coords(1), &[3.0, 4.0]);
    }

    #[test]
    fn errors_name_the_row() {
        let nan = read("x0,label\n1,0\nNaN,1\n").unwrap_err();
        assert!(matches!(nan, Error::Csv { row: 3, .. }), "{nan}");
        let text = read("x0,label\n1,0\nabc,1\n").unwrap_err();
        assert!(matches!(text, Error::Csv { row: 3, .. }));
        let ragged = read("x0,x1,label\n1,2,0\n1,1\n").unwrap_err();
        assert!(matches!(ragged, Error::Csv { row: 3, .. }));
        let missing = read_csv("x0,y\n1,0\n".as_bytes(), "label", Metric::Euclidean).unwrap_err();
        assert!(matches!(missing, Error::Csv { row: 1, .. }));
    }

    #[test]
    fn weight_column_is_split_off() {
        let t = read("x0,label,weight\n1,0,2.5\n3,1,0.5\n").unwrap();
        assert_eq!(t.dataset.dim(), 1);
        assert_eq!(t.weights, Some(vec![2.5, 0.5]));
        assert!(read("x0,label,weight\n1,0,0\n").is_err());
    }

    #[test]
    fn round_trip_is_exact() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let n = rng.gen_range(1..30);
            let dim = rng.gen_range(1..5);
            let ds = Dataset::from_rows(
                (0..n).map(|_| {
                    let c = (0..dim).map(|_| rng.gen_range(-1e6..1e6) * rng.gen::<f64>().powi(7)).collect();
                    (c, rng.gen_range(0..4))
                }),
                Metric::Euclidean,
            )
            .unwrap();
            let mut buf = Vec::new();
            write_csv(&ds, &mut buf).unwrap();
            let back = read(std::str::from_utf8(&buf).unwrap()).unwrap().dataset;
            assert_eq!(back, ds);
        }
    }
}
