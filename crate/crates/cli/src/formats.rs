// SPDX-License-Identifier: Apache-2.0

//! On-disk formats.
//!
//! - Contours: JSON Lines, `{"id": str, "class": int, "points": [[x, y], ...]}`;
//!   `id` and `class` may be omitted.
//! - Descriptors: `{"center": [x, y], "n": int, "coeffs": [[a, b, c, d], ...]}`,
//!   optionally carrying `"id"`, `"class"` and `"t"` (encode sample count).
//!   A file holds one such object, a JSON array of them, or one per line.
//! - Anchors: `{"k": int, "stride": int, "image_size": [W, H], "anchors": [descriptor, ...]}`.
//! - Proposals: JSON Lines, `{"class": int, "score": float, "descriptor": {...}}`.
//! - Masks: binary PGM (`P5`), pixel value = class id; 8- or 16-bit.
//! - Metric tables: CSV with header `metric,mean,std`.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use fcontour_core::anchor::AnchorSet;
use fcontour_core::csr::ScoredProposal;
use fcontour_core::mask::LabelMask;
use fcontour_core::{Contour, FourierDescriptor, Harmonic, Point};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{MetricsTable, Stat};

/// Read a file, or standard input for `None` / `-`.
pub fn read_input(path: Option<&Path>) -> Result<(String, Vec<u8>)> {
    match path {
        Some(p) if p != Path::new("-") => {
            let name = p.display().to_string();
            let bytes = fs::read(p).map_err(|e| Error::io(format!("reading {name}"), e))?;
            Ok((name, bytes))
        }
        _ => {
            let mut buf = Vec::new();
            std::io::stdin()
                .read_to_end(&mut buf)
                .map_err(|e| Error::io("reading standard input", e))?;
            Ok(("<stdin>".to_string(), buf))
        }
    }
}

pub fn read_text(path: Option<&Path>) -> Result<(String, String)> {
    let (name, bytes) = read_input(path)?;
    let text = String::from_utf8(bytes).map_err(|e| Error::Parse {
        file: name.clone(),
        line: 0,
        message: format!("not UTF-8: {e}"),
    })?;
    Ok((name, text))
}

/// Write to a file, or standard output for `None` / `-`.
pub fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => {
            fs::write(p, bytes).map_err(|e| Error::io(format!("writing {}", p.display()), e))
        }
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| Error::io("writing standard output", e))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContourRecord {
    #[serde(default)]
    pub id: String,
    #[serde(default)]
    pub class: u32,
    pub points: Vec<[f64; 2]>,
}

impl ContourRecord {
    pub fn from_contour(id: impl Into<String>, c: &Contour) -> Self {
        ContourRecord {
            id: id.into(),
            class: c.class_id,
            points: c.points.iter().map(|p| [p.x, p.y]).collect(),
        }
    }

    pub fn to_contour(&self) -> Contour {
        Contour::new(
            self.points.iter().map(|&[x, y]| Point::new(x, y)).collect(),
            self.class,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescriptorRecord {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<u32>,
    pub center: [f64; 2],
    pub n: usize,
    pub coeffs: Vec<[f64; 4]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<usize>,
}

impl DescriptorRecord {
    pub fn from_descriptor(d: &FourierDescriptor) -> Self {
        DescriptorRecord {
            id: None,
            class: None,
            center: [d.center.x, d.center.y],
            n: d.n_harmonics(),
            coeffs: d.harmonics.iter().map(|h| h.to_array()).collect(),
            t: (d.period_samples > 0).then_some(d.period_samples),
        }
    }

    pub fn to_descriptor(&self) -> std::result::Result<FourierDescriptor, String> {
        if self.n != self.coeffs.len() {
            return Err(format!(
                "\"n\" is {} but {} coefficient rows given",
                self.n,
                self.coeffs.len()
            ));
        }
        let mut d = FourierDescriptor::new(
            Point::new(self.center[0], self.center[1]),
            self.coeffs
                .iter()
                .map(|&c| Harmonic::from_array(c))
                .collect(),
        );
        d.period_samples = self.t.unwrap_or(0);
        d.validate().map_err(|e| e.to_string())?;
        Ok(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnchorFile {
    pub k: usize,
    pub stride: u32,
    pub image_size: [u32; 2],
    pub anchors: Vec<DescriptorRecord>,
}

impl AnchorFile {
    pub fn from_set(set: &AnchorSet) -> Self {
        AnchorFile {
            k: set.k(),
            stride: set.stride,
            image_size: [set.image_size.0, set.image_size.1],
            anchors: set
                .base_anchors
                .iter()
                .map(DescriptorRecord::from_descriptor)
                .collect(),
        }
    }

    pub fn to_set(&self) -> std::result::Result<AnchorSet, String> {
        if self.k != self.anchors.len() {
            return Err(format!(
                "\"k\" is {} but {} anchors given",
                self.k,
                self.anchors.len()
            ));
        }
        let base = self
            .anchors
            .iter()
            .map(DescriptorRecord::to_descriptor)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        AnchorSet::new(base, self.stride, (self.image_size[0], self.image_size[1]))
            .map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalRecord {
    pub class: u32,
    pub score: f64,
    pub descriptor: DescriptorRecord,
}

impl ProposalRecord {
    pub fn from_proposal(p: &ScoredProposal) -> Self {
        ProposalRecord {
            class: p.class_id,
            score: p.score,
            descriptor: DescriptorRecord::from_descriptor(&p.descriptor),
        }
    }

    pub fn to_proposal(&self) -> std::result::Result<ScoredProposal, String> {
        if !(self.score.is_finite() && (0.0..=1.0).contains(&self.score)) {
            return Err(format!("score {} outside [0, 1]", self.score));
        }
        Ok(ScoredProposal {
            descriptor: self.descriptor.to_descriptor()?,
            score: self.score,
            class_id: self.class,
        })
    }
}

/// Parse non-blank lines as JSON records, reporting 1-based line numbers.
pub fn parse_jsonl<T: for<'de> Deserialize<'de>>(
    name: &str,
    text: &str,
) -> Result<Vec<(usize, T)>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map(|v| (i + 1, v))
                .map_err(|e| Error::Parse {
                    file: name.to_string(),
                    line: i + 1,
                    message: e.to_string(),
                })
        })
        .collect()
}

pub fn to_jsonl<T: Serialize>(records: &[T]) -> Vec<u8> {
    let mut out = Vec::new();
    for r in records {
        serde_json::to_writer(&mut out, r).expect("records serialize");
        out.push(b'\n');
    }
    out
}

/// Contours with their ids. Geometry is validated per line; a missing id
/// becomes the record's zero-based position.
pub fn parse_contours(name: &str, text: &str) -> Result<Vec<(String, Contour)>> {
    parse_jsonl::<ContourRecord>(name, text)?
        .into_iter()
        .enumerate()
        .map(|(i, (line, mut r))| {
            if r.id.is_empty() {
                r.id = i.to_string();
            }
            let c = r.to_contour();
            c.validate()
                .map_err(|e| Error::geometry(format!("{name}:{line}: contour {:?}", r.id), e))?;
            Ok((r.id, c))
        })
        .collect()
}

pub fn parse_descriptors(name: &str, text: &str) -> Result<Vec<DescriptorRecord>> {
    let records: Vec<(usize, DescriptorRecord)> =
        match serde_json::from_str::<serde_json::Value>(text) {
            Ok(serde_json::Value::Array(items)) => items
                .into_iter()
                .enumerate()
                .map(|(i, v)| {
                    serde_json::from_value(v)
                        .map(|r| (i + 1, r))
                        .map_err(|e| Error::Parse {
                            file: name.to_string(),
                            line: 1,
                            message: format!("array element {}: {e}", i + 1),
                        })
                })
                .collect::<Result<_>>()?,
            Ok(v @ serde_json::Value::Object(_)) => {
                vec![(
                    1,
                    serde_json::from_value(v).map_err(|e| Error::Parse {
                        file: name.to_string(),
                        line: 1,
                        message: e.to_string(),
                    })?,
                )]
            }
            _ => parse_jsonl(name, text)?,
        };
    records
        .into_iter()
        .map(|(line, r)| {
            r.to_descriptor().map_err(|message| Error::Parse {
                file: name.to_string(),
                line,
                message,
            })?;
            Ok(r)
        })
        .collect()
}

pub fn parse_anchor_file(name: &str, text: &str) -> Result<AnchorSet> {
    let file: AnchorFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        file: name.to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    file.to_set().map_err(|message| Error::Parse {
        file: name.to_string(),
        line: 1,
        message,
    })
}

pub fn parse_proposals(name: &str, text: &str) -> Result<Vec<ScoredProposal>> {
    parse_jsonl::<ProposalRecord>(name, text)?
        .into_iter()
        .map(|(line, r)| {
            r.to_proposal().map_err(|message| Error::Parse {
                file: name.to_string(),
                line,
                message,
            })
        })
        .collect()
}

/// Pretty JSON with a trailing newline.
pub fn to_json_pretty<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("value serializes");
    out.push(b'\n');
    out
}

/// Decode a binary (`P5`) PGM into a label mask.
pub fn parse_pgm(name: &str, bytes: &[u8]) -> Result<LabelMask> {
    let mut pos = 0usize;
    let mut line = 1usize;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // Whitespace and comments between header fields.
        while pos < bytes.len() {
            match bytes[pos] {
                b'#' => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                b'\n' => {
                    line += 1;
                    pos += 1;
                }
                b if b.is_ascii_whitespace() => pos += 1,
                _ => break,
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse {
                file: name.to_string(),
                line,
                message: "truncated PGM header".to_string(),
            });
        }
        fields.push((
            line,
            String::from_utf8_lossy(&bytes[start..pos]).into_owned(),
        ));
    }
    if fields[0].1 != "P5" {
        return Err(Error::Parse {
            file: name.to_string(),
            line: fields[0].0,
            message: format!("expected binary PGM magic P5, found {:?}", fields[0].1),
        });
    }
    let num = |i: usize| -> Result<usize> {
        fields[i].1.parse::<usize>().map_err(|_| Error::Parse {
            file: name.to_string(),
            line: fields[i].0,
            message: format!("invalid PGM header number {:?}", fields[i].1),
        })
    };
    let (width, height, maxval) = (num(1)?, num(2)?, num(3)?);
    if maxval == 0 || maxval > 65535 {
        return Err(Error::Parse {
            file: name.to_string(),
            line: fields[3].0,
            message: format!("PGM maxval {maxval} out of range"),
        });
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let bpp = if maxval < 256 { 1 } else { 2 };
    let need = width * height * bpp;
    let data = bytes.get(pos..pos + need).ok_or_else(|| Error::Parse {
        file: name.to_string(),
        line: fields[3].0,
        message: format!(
            "PGM raster truncated: need {need} bytes, have {}",
            bytes.len().saturating_sub(pos)
        ),
    })?;
    let values = if bpp == 1 {
        data.iter().map(|&b| u16::from(b)).collect()
    } else {
        data.chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    };
    LabelMask::new(width, height, values).map_err(|e| Error::geometry(name.to_string(), e))
}

pub fn write_pgm(mask: &LabelMask) -> Vec<u8> {
    let maxval = mask.values.iter().copied().max().unwrap_or(0).max(1);
    let mut out = format!("P5\n{} {}\n{}\n", mask.width, mask.height, maxval).into_bytes();
    if maxval < 256 {
        out.extend(mask.values.iter().map(|&v| v as u8));
    } else {
        for &v in &mask.values {
            out.extend_from_slice(&v.to_be_bytes());
        }
    }
    out
}

/// `metric,mean,std` rows. Values use Rust's shortest round-trip float
/// formatting, so parsing the CSV recovers them exactly.
pub fn metrics_csv(table: &MetricsTable) -> String {
    let mut out = String::from("metric,mean,std\n");
    for (name, stat) in table.stats() {
        out.push_str(&format!("{name},{:?},{:?}\n", stat.mean, stat.std));
    }
    out
}

/// Parse the rows written by [`metrics_csv`].
pub fn parse_metrics_csv(name: &str, text: &str) -> Result<Vec<(String, Stat)>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, "metric,mean,std")) => {}
        _ => {
            return Err(Error::Parse {
                file: name.to_string(),
                line: 1,
                message: "expected header metric,mean,std".to_string(),
            })
        }
    }
    lines
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let err = |m: &str| Error::Parse {
                file: name.to_string(),
                line: i + 1,
                message: m.to_string(),
            };
            let cols: Vec<&str> = l.split(',').collect();
            if cols.len() != 3 {
                return Err(err("expected 3 columns"));
            }
            let mean = cols[1].parse().map_err(|_| err("bad mean"))?;
            let std = cols[2].parse().map_err(|_| err("bad std"))?;
            Ok((cols[0].to_string(), Stat { mean, std }))
        })
        .collect()
}
