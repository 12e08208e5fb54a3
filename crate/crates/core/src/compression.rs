//! Sample compression for nearest-enemy-weighted classifiers.
//!
//! A condensed set whose weights are the prototypes' nearest-enemy distances
//! is stored as two unordered sets of labeled samples: the prototypes, and
//! the witnesses (their nearest enemies). Each weight is recovered as the
//! distance from the prototype to the closest witness of another label.

use std::io::{Read, Write};
use std::path::Path;

use crate::classifier::{CondensedSet, WnnClassifier};
use crate::data::io::{format_f64, parse_cell};
use crate::dataset::{nearest_enemy, Dataset, LabeledPoint};
use crate::error::{Error, Result};
use crate::metric::Metric;

#[derive(Clone, Debug, PartialEq)]
pub struct CompressionCode {
    pub metric: Metric,
    pub prototypes: Vec<LabeledPoint>,
    pub witnesses: Vec<LabeledPoint>,
}

impl CompressionCode {
    /// Number of samples the code retains.
    pub fn size(&self) -> usize {
        self.prototypes.len() + self.witnesses.len()
    }
}

/// Encodes a nearest-enemy-weighted condensed set.
pub fn encode(ds: &Dataset, set: &CondensedSet) -> Result<CompressionCode> {
    let mut witness_idx = Vec::new();
    for (i, w) in set.iter() {
        match nearest_enemy(ds, i) {
            Some((enemy, d)) => {
                if w != d {
                    return Err(Error::NotEnemyWeighted {
                        index: i,
                        weight: w,
                        expected: d,
                    });
                }
                witness_idx.push(enemy);
            }
            None if w.is_infinite() => {}
            None => {
                return Err(Error::NotEnemyWeighted {
                    index: i,
                    weight: w,
                    expected: f64::INFINITY,
                })
            }
        }
    }
    witness_idx.sort_unstable();
    witness_idx.dedup();
    Ok(CompressionCode {
        metric: ds.metric(),
        prototypes: set.indices().iter().map(|&i| ds.point(i).clone()).collect(),
        witnesses: witness_idx.iter().map(|&i| ds.point(i).clone()).collect(),
    })
}

/// Rebuilds the classifier from a code.
///
/// Prototypes are put in a canonical order (coordinates, then label) before
/// building the classifier, so the result does not depend on the order in
/// which either set is stored.
pub fn reconstruct(code: &CompressionCode) -> Result<WnnClassifier> {
    if code.prototypes.is_empty() {
        return Err(Error::EmptyCondensedSet);
    }
    let mut prototypes = code.prototypes.clone();
    prototypes.sort_by(|a, b| {
        a.coords()
            .partial_cmp(b.coords())
            .expect("finite coordinates")
            .then(a.label.cmp(&b.label))
    });
    let single_class = prototypes.iter().all(|p| p.label == prototypes[0].label);
    let mut weights = Vec::with_capacity(prototypes.len());
    for (k, p) in prototypes.iter().enumerate() {
        let w = code
            .witnesses
            .iter()
            .filter(|x| x.label != p.label)
            .map(|x| code.metric.dist(p.coords(), x.coords()))
            .fold(f64::INFINITY, f64::min);
        if w.is_infinite() && !single_class {
            return Err(Error::MissingWitness(k));
        }
        weights.push(w);
    }
    WnnClassifier::new(code.metric, prototypes, weights)
}

const ROLE_PROTOTYPE: &str = "prototype";
const ROLE_WITNESS: &str = "witness";

/// Writes `x0,...,xk,label,role` rows.
pub fn write_code<W: Write>(code: &CompressionCode, out: W) -> Result<()> {
    let dim = code
        .prototypes
        .first()
        .map(|p| p.point.dim())
        .ok_or(Error::EmptyCondensedSet)?;
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    header.push("label".into());
    header.push("role".into());
    w.write_record(&header).map_err(csv_err)?;
    let rows = code
        .prototypes
        .iter()
        .map(|p| (p, ROLE_PROTOTYPE))
        .chain(code.witnesses.iter().map(|p| (p, ROLE_WITNESS)));
    for (p, role) in rows {
        let mut rec: Vec<String> = p.coords().iter().map(|&c| format_f64(c)).collect();
        rec.push(p.label.to_string());
        rec.push(role.into());
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_code<R: Read>(input: R, metric: Metric) -> Result<CompressionCode> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers().map_err(|e| Error::csv(1, e.to_string()))?.clone();
    let ncols = header.len();
    if ncols < 3 || &header[ncols - 2] != "label" || &header[ncols - 1] != "role" {
        return Err(Error::csv(1, "expected header x0,...,xk,label,role"));
    }
    let mut code = CompressionCode {
        metric,
        prototypes: Vec::new(),
        witnesses: Vec::new(),
    };
    for (k, rec) in r.records().enumerate() {
        let row = k + 2;
        let rec = rec.map_err(|e| Error::csv(row, e.to_string()))?;
        if rec.len() != ncols {
            return Err(Error::csv(row, format!("expected {ncols} fields, found {}", rec.len())));
        }
        let coords = (0..ncols - 2)
            .map(|c| parse_cell(&rec[c], row))
            .collect::<Result<Vec<_>>>()?;
        let label = rec[ncols - 2]
            .trim()
            .parse()
            .map_err(|_| Error::csv(row, format!("bad label `{}`", &rec[ncols - 2])))?;
        let point = LabeledPoint::new(coords, label).map_err(|e| Error::csv(row, e.to_string()))?;
        match rec[ncols - 1].trim() {
            ROLE_PROTOTYPE => code.prototypes.push(point),
            ROLE_WITNESS => code.witnesses.push(point),
            other => return Err(Error::csv(row, format!("unknown role `{other}`"))),
        }
    }
    Ok(code)
}

pub fn save_code(code: &CompressionCode, path: impl AsRef<Path>) -> Result<()> {
    write_code(code, std::fs::File::create(path)?)
}

pub fn load_code(path: impl AsRef<Path>, metric: Metric) -> Result<CompressionCode> {
    read_code(std::fs::File::open(path)?, metric)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::condense::greedy_wnn;
    use crate::data::generate::bc_friendly;
    use crate::dataset::enemy_distances;

    #[test]
    fn bc_friendly_code_has_four_points() {
        let ds = bc_friendly(5).unwrap();
        let (set, _) = greedy_wnn(&ds).unwrap();
        let code = encode(&ds, &set).unwrap();
        assert_eq!(code.prototypes.len(), 2);
        assert_eq!(code.witnesses.len(), 2);
        // brute-force nearest enemies of r = (-18, 6) and b = (36, 6)
        let mut w: Vec<&[f64]> = code.witnesses.iter().map(|p| p.coords()).collect();
        w.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(w, vec![&[0.0, 6.0][..], &[1.0, 5.0][..]]);
    }

    #[test]
    fn two_point_code() {
        let ds = Dataset::from_rows(vec![(vec![0.0, 0.0], 0), (vec![3.0, 4.0], 1)], Metric::Euclidean).unwrap();
        let set = CondensedSet::new(&ds, vec![0], vec![5.0]).unwrap();
        let code = encode(&ds, &set).unwrap();
        assert_eq!(code.witnesses, vec![ds.point(1).clone()]);
        let clf = reconstruct(&code).unwrap();
        assert_eq!(clf.weights(), &[5.0]);
    }

    #[test]
    fn rejects_foreign_weights() {
        let ds = bc_friendly(3).unwrap();
        let set = CondensedSet::new(&ds, vec![0], vec![1.0]).unwrap();
        assert!(matches!(encode(&ds, &set), Err(Error::NotEnemyWeighted { .. })));
    }

    #[test]
    fn missing_witness_is_an_error() {
        let code = CompressionCode {
            metric: Metric::Euclidean,
            prototypes: vec![
                LabeledPoint::new(vec![0.0], 0).unwrap(),
                LabeledPoint::new(vec![5.0], 1).unwrap(),
            ],
            witnesses: vec![LabeledPoint::new(vec![1.0], 1).unwrap()],
        };
        assert!(matches!(reconstruct(&code), Err(Error::MissingWitness(_))));
    }

    #[test]
    fn single_class_code_reconstructs_infinite_weight() {
        let ds = Dataset::from_rows((0..4).map(|i| (vec![i as f64], 2)), Metric::Euclidean).unwrap();
        let (set, _) = greedy_wnn(&ds).unwrap();
        let code = encode(&ds, &set).unwrap();
        assert!(code.witnesses.is_empty());
        let clf = reconstruct(&code).unwrap();
        assert!(clf.weights()[0].is_infinite());
        assert_eq!(clf.classify(&[10.0]), 2);
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let ds = crate::data::generate::circle(60, 3).unwrap();
        let (set, _) = greedy_wnn(&ds).unwrap();
        let code = encode(&ds, &set).unwrap();
        let mut buf = Vec::new();
        write_code(&code, &mut buf).unwrap();
        let back = read_code(buf.as_slice(), Metric::Euclidean).unwrap();
        assert_eq!(back, code);
        let radii = enemy_distances(&ds);
        let clf = reconstruct(&back).unwrap();
        for (p, w) in clf.prototypes().iter().zip(clf.weights()) {
            let i = (0..ds.len()).find(|&i| ds.point(i) == p).unwrap();
            assert_eq!(*w, radii[i]);
        }
    }

    #[test]
    fn read_code_rejects_bad_role() {
        let text = "x0,label,role\n1.0,0,prototype\n2.0,1,oracle\n";
        let err = read_code(text.as_bytes(), Metric::Euclidean).unwrap_err();
        assert!(matches!(err, Error::Csv { row: 3, .. }));
    }
}
