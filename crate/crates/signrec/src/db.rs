//! Template database persistence: a line-oriented, version-tagged text
//! format. Reals are written as shortest round-trip decimals, so
//! `load(save(db))` reproduces every field exactly.
//!
//! ```text
//! SIGNDB 1 <template count>
//! T <label> <source id>
//! L <5 eigenvalues>
//! V 1 <eigenvector components>
//! ...
//! V 5 <eigenvector components>
//! ```

use std::fmt::Write as _;
use std::path::Path;

use crate::classifier::{Template, TemplateDb};
use crate::error::{DbErrorKind, Error, Result};
use crate::features::{FeatureVector, TOP_K};

const FORMAT_VERSION: u64 = 1;

fn db_err(line: usize, kind: DbErrorKind) -> Error {
    Error::Db { line, kind }
}

fn check_label(label: &str) -> Result<()> {
    if label.is_empty() {
        return Err(Error::InvalidLabel {
            label: label.into(),
            reason: "label must be non-empty".into(),
        });
    }
    if label.chars().any(|c| c.is_whitespace()) {
        return Err(Error::InvalidLabel {
            label: label.into(),
            reason: "label must not contain whitespace".into(),
        });
    }
    Ok(())
}

/// Serializes a database to the text format.
pub fn encode_db(db: &TemplateDb) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "SIGNDB {FORMAT_VERSION} {}", db.len()).unwrap();
    for t in db.templates() {
        check_label(&t.label)?;
        if t.source_id.contains(['\n', '\r']) {
            return Err(Error::InvalidLabel {
                label: t.source_id.clone(),
                reason: "source id must not contain line breaks".into(),
            });
        }
        writeln!(out, "T {} {}", t.label, t.source_id).unwrap();
        out.push('L');
        for v in &t.features.values {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
        for (i, vec) in t.features.vectors.iter().enumerate() {
            write!(out, "V {}", i + 1).unwrap();
            for c in vec {
                write!(out, " {c}").unwrap();
            }
            out.push('\n');
        }
    }
    Ok(out)
}

fn parse_real(line_no: usize, token: &str) -> Result<f64> {
    token
        .parse::<f64>()
        .map_err(|_| db_err(line_no, DbErrorKind::MalformedReal(token.to_string())))
}

/// Parses the text format back into a database.
pub fn parse_db(text: &str) -> Result<TemplateDb> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));

    let (_, header) = lines
        .next()
        .ok_or_else(|| db_err(1, DbErrorKind::Version("empty file".into())))?;
    let mut fields = header.split_whitespace();
    if fields.next() != Some("SIGNDB") {
        return Err(db_err(1, DbErrorKind::Version(header.to_string())));
    }
    let version = fields
        .next()
        .and_then(|v| v.parse::<u64>().ok())
        .ok_or_else(|| db_err(1, DbErrorKind::Version(header.to_string())))?;
    if version != FORMAT_VERSION {
        return Err(db_err(1, DbErrorKind::Version(format!("unsupported version {version}"))));
    }
    let count = fields
        .next()
        .and_then(|v| v.parse::<u64>().ok())
        .ok_or_else(|| db_err(1, DbErrorKind::Structure("header missing template count".into())))?;
    if fields.next().is_some() {
        return Err(db_err(1, DbErrorKind::Structure("trailing header fields".into())));
    }

    let mut db = TemplateDb::new();
    for _ in 0..count {
        let (line_no, line) = lines.next().ok_or_else(|| {
            db_err(
                text.lines().count() + 1,
                DbErrorKind::CountMismatch { expected: count, found: db.len() as u64 },
            )
        })?;
        let rest = line.strip_prefix("T ").ok_or_else(|| {
            db_err(line_no, DbErrorKind::Structure(format!("expected `T` line, got {line:?}")))
        })?;
        let (label, source_id) = rest.split_once(' ').unwrap_or((rest, ""));
        check_label(label)?;

        let (line_no, line) = lines
            .next()
            .ok_or_else(|| db_err(line_no + 1, DbErrorKind::Structure("missing `L` line".into())))?;
        let rest = line.strip_prefix("L ").ok_or_else(|| {
            db_err(line_no, DbErrorKind::Structure(format!("expected `L` line, got {line:?}")))
        })?;
        let tokens: Vec<&str> = rest.split(' ').collect();
        if tokens.len() != TOP_K {
            return Err(db_err(
                line_no,
                DbErrorKind::Structure(format!("expected {TOP_K} eigenvalues, got {}", tokens.len())),
            ));
        }
        let mut values = [0.0; TOP_K];
        for (dst, token) in values.iter_mut().zip(&tokens) {
            *dst = parse_real(line_no, token)?;
        }

        let mut vectors: [Vec<f64>; TOP_K] = Default::default();
        let mut dim: Option<usize> = None;
        for (i, slot) in vectors.iter_mut().enumerate() {
            let (line_no, line) = lines.next().ok_or_else(|| {
                db_err(line_no + 1, DbErrorKind::Structure(format!("missing `V {}` line", i + 1)))
            })?;
            let rest = line.strip_prefix("V ").ok_or_else(|| {
                db_err(line_no, DbErrorKind::Structure(format!("expected `V` line, got {line:?}")))
            })?;
            let mut tokens = rest.split(' ');
            let index = tokens.next().and_then(|t| t.parse::<usize>().ok());
            if index != Some(i + 1) {
                return Err(db_err(
                    line_no,
                    DbErrorKind::Structure(format!("expected eigenvector index {}", i + 1)),
                ));
            }
            let components: Vec<f64> = tokens
                .map(|t| parse_real(line_no, t))
                .collect::<Result<_>>()?;
            if components.is_empty() {
                return Err(db_err(line_no, DbErrorKind::Structure("empty eigenvector".into())));
            }
            match dim {
                None => dim = Some(components.len()),
                Some(d) if d != components.len() => {
                    return Err(db_err(
                        line_no,
                        DbErrorKind::Structure(format!(
                            "eigenvector length {} differs from {d}",
                            components.len()
                        )),
                    ));
                }
                _ => {}
            }
            *slot = components;
        }

        db.push(Template {
            label: label.to_string(),
            features: FeatureVector { values, vectors },
            source_id: source_id.to_string(),
        });
    }

    if let Some((line_no, line)) = lines.next() {
        if !line.trim().is_empty() {
            return Err(db_err(
                line_no,
                DbErrorKind::CountMismatch { expected: count, found: count + 1 },
            ));
        }
    }
    Ok(db)
}

pub fn save_db(db: &TemplateDb, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let text = encode_db(db)?;
    std::fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_db(path: impl AsRef<Path>) -> Result<TemplateDb> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_db(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn random_db(rng: &mut impl Rng, labels: usize, per_label: usize, dim: usize) -> TemplateDb {
        let mut db = TemplateDb::new();
        for l in 0..labels {
            for k in 0..per_label {
                let mut values: [f64; TOP_K] = std::array::from_fn(|_| rng.gen_range(0.0..10.0));
                values.sort_by(|a, b| b.total_cmp(a));
                let vectors = std::array::from_fn(|_| {
                    let mut v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                    let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-9);
                    v.iter_mut().for_each(|x| *x /= norm);
                    crate::features::canonicalize_sign(&mut v);
                    v
                });
                db.push(Template {
                    label: format!("L{l:02}"),
                    features: FeatureVector { values, vectors },
                    source_id: format!("frames/L{l:02}/img_{k:03}.ppm"),
                });
            }
        }
        db
    }

    #[test]
    fn empty_db_is_header_only() {
        let text = encode_db(&TemplateDb::new()).unwrap();
        assert_eq!(text, "SIGNDB 1 0\n");
        let db = parse_db(&text).unwrap();
        assert!(db.is_empty());
    }

    #[test]
    fn single_template_has_eight_lines() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let db = random_db(&mut rng, 1, 1, 70);
        let text = encode_db(&db).unwrap();
        assert_eq!(text.lines().count(), 8);
        assert!(text.starts_with("SIGNDB 1 1\nT L00 frames/L00/img_000.ppm\nL "));
        assert_eq!(parse_db(&text).unwrap(), db);
    }

    #[test]
    fn round_trip_is_field_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        let db = random_db(&mut rng, 4, 3, 70);
        let loaded = parse_db(&encode_db(&db).unwrap()).unwrap();
        assert_eq!(loaded, db);
        // and stable under a second round trip
        assert_eq!(encode_db(&loaded).unwrap(), encode_db(&db).unwrap());
    }

    #[test]
    fn source_id_may_contain_spaces() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let mut db = random_db(&mut rng, 1, 1, 8);
        let t = Template {
            source_id: "a path with spaces.ppm".into(),
            ..db.templates()[0].clone()
        };
        db = std::iter::once(t).collect();
        let loaded = parse_db(&encode_db(&db).unwrap()).unwrap();
        assert_eq!(loaded.templates()[0].source_id, "a path with spaces.ppm");
    }

    #[test]
    fn label_with_whitespace_is_rejected_on_save() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let mut db = random_db(&mut rng, 1, 1, 8);
        let t = Template {
            label: "two words".into(),
            ..db.templates()[0].clone()
        };
        db = std::iter::once(t).collect();
        assert!(matches!(encode_db(&db), Err(Error::InvalidLabel { .. })));
    }

    #[test]
    fn version_mismatch_is_reported_on_line_one() {
        match parse_db("SIGNDB 2 0\n").unwrap_err() {
            Error::Db { line: 1, kind: DbErrorKind::Version(_) } => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_db("NOTADB\n").unwrap_err(),
            Error::Db { line: 1, kind: DbErrorKind::Version(_) }
        ));
    }

    #[test]
    fn count_mismatch_too_few_templates() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        let db = random_db(&mut rng, 1, 1, 8);
        let text = encode_db(&db).unwrap().replace("SIGNDB 1 1", "SIGNDB 1 2");
        assert!(matches!(
            parse_db(&text).unwrap_err(),
            Error::Db { kind: DbErrorKind::CountMismatch { expected: 2, found: 1 }, .. }
        ));
    }

    #[test]
    fn count_mismatch_extra_templates() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        let db = random_db(&mut rng, 1, 2, 8);
        let text = encode_db(&db).unwrap().replace("SIGNDB 1 2", "SIGNDB 1 1");
        assert!(matches!(
            parse_db(&text).unwrap_err(),
            Error::Db { kind: DbErrorKind::CountMismatch { .. }, .. }
        ));
    }

    #[test]
    fn malformed_real_names_its_line() {
        let mut rng = ChaCha8Rng::seed_from_u64(131);
        let db = random_db(&mut rng, 1, 1, 8);
        let text = encode_db(&db).unwrap();
        // third line is the first eigenvector
        let broken: String = text
            .lines()
            .enumerate()
            .map(|(i, l)| {
                if i == 3 {
                    "V 1 not-a-number\n".to_string()
                } else {
                    format!("{l}\n")
                }
            })
            .collect();
        match parse_db(&broken).unwrap_err() {
            Error::Db { line: 4, kind: DbErrorKind::MalformedReal(t) } => {
                assert_eq!(t, "not-a-number");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn wrong_vector_index_is_structural() {
        let mut rng = ChaCha8Rng::seed_from_u64(137);
        let db = random_db(&mut rng, 1, 1, 8);
        let text = encode_db(&db).unwrap().replacen("V 1 ", "V 9 ", 1);
        assert!(matches!(
            parse_db(&text).unwrap_err(),
            Error::Db { kind: DbErrorKind::Structure(_), .. }
        ));
    }

    #[test]
    fn save_load_files_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(139);
        let db = random_db(&mut rng, 3, 2, 70);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("templates.db");
        save_db(&db, &path).unwrap();
        assert_eq!(load_db(&path).unwrap(), db);
    }
}
