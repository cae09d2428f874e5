// SPDX-License-Identifier: Apache-2.0

//! The `fcontour` command line.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fcontour_core::anchor::{
    fit_anchors, tile_anchors, AnchorLabel, AnchorSet, AssignConfig, GroundTruth,
};
use fcontour_core::csr::{refine_all, RefineConfig, RefineOutput};
use fcontour_core::efd::{efd_decode, efd_encode, project_samples};
use fcontour_core::mask::extract_contours;
use fcontour_core::Contour;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::evaluate;
use crate::formats::{
    metrics_csv, parse_anchor_file, parse_contours, parse_descriptors, parse_pgm, parse_proposals,
    read_input, read_text, to_json_pretty, to_jsonl, write_output, AnchorFile, ContourRecord,
    DescriptorRecord, ProposalRecord,
};
use crate::noise::{simulate_proposals, NoiseConfig};
use crate::parallel::assign_parallel;
use crate::synth::{synth_dataset, SynthConfig};

#[derive(Debug, Parser)]
#[command(
    name = "fcontour",
    version,
    about = "Fourier contour codec, anchors, refinement and metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Io {
    /// Input file; `-` or absent reads standard input.
    pub input: Option<PathBuf>,
    /// Output file; `-` or absent writes standard output.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Contours (JSONL) to descriptors (JSONL).
    Encode {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 360)]
        t: usize,
        /// Treat the points as uniform series samples: no canonicalization or
        /// arc-length resampling. Exact for contours produced by `decode`.
        #[arg(long)]
        presampled: bool,
    },
    /// Descriptors to contours (JSONL).
    Decode {
        #[command(flatten)]
        io: Io,
        #[arg(long = "t-out", default_value_t = 128)]
        t_out: usize,
    },
    /// Cluster descriptors into base anchors (JSON).
    Anchors {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 9)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        stride: u32,
        #[arg(long, default_value_t = 416)]
        width: u32,
        #[arg(long, default_value_t = 416)]
        height: u32,
    },
    /// Label tiled anchors against ground-truth contours (JSON report).
    Assign {
        /// Anchor file written by `anchors`.
        #[arg(long)]
        anchors: PathBuf,
        /// Ground-truth contours (JSONL).
        #[arg(long)]
        gt: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0.25)]
        pos: f64,
        #[arg(long, default_value_t = 0.10)]
        neg: f64,
        /// Do not promote the best anchor of an unmatched ground truth.
        #[arg(long)]
        no_force_match: bool,
        /// Worker threads; 0 uses every core.
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Cluster, merge and sample proposals per class (JSON).
    Refine {
        #[command(flatten)]
        io: Io,
        #[arg(long = "top-n", default_value_t = 20)]
        top_n: usize,
        #[arg(long, default_value_t = 0.7)]
        iou: f64,
        #[arg(long, default_value_t = 16)]
        k: usize,
        #[arg(long = "box-scale", default_value_t = 0.2)]
        box_scale: f64,
    },
    /// Index-paired prediction and ground-truth contours to a CSV table.
    Metrics {
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        gt: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
    /// Synthetic contours (JSONL).
    Synth {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 60.0)]
        radius: f64,
        #[arg(long, default_value_t = 2.0)]
        decay: f64,
        #[arg(long, default_value_t = 416.0)]
        width: f64,
        #[arg(long, default_value_t = 416.0)]
        height: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Outer contours of every class in a PGM label mask (JSONL).
    Extract {
        #[command(flatten)]
        io: Io,
        /// Only this class; default is every non-zero value.
        #[arg(long)]
        class: Option<u16>,
    },
    /// Noisy scored proposals around each descriptor (JSONL).
    Propose {
        #[command(flatten)]
        io: Io,
        #[arg(long, default_value_t = 0.1)]
        sigma: f64,
        #[arg(long = "center-sigma", default_value_t = 0.0)]
        center_sigma: f64,
        #[arg(long = "per-gt", default_value_t = 20)]
        per_gt: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// Parse `args` (including the program name), run, and return the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("fcontour: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Encode {
            io,
            n,
            t,
            presampled,
        } => {
            let (name, text) = read_text(io.input.as_deref())?;
            let records = parse_contours(&name, &text)?
                .into_iter()
                .map(|(id, c)| {
                    let d = if presampled {
                        project_samples(&c.points, n)
                    } else {
                        efd_encode(&c, n, t)
                    }
                    .map_err(|e| Error::geometry(format!("encoding contour {id:?}"), e))?;
                    let mut r = DescriptorRecord::from_descriptor(&d);
                    r.id = Some(id);
                    r.class = Some(c.class_id);
                    Ok(r)
                })
                .collect::<Result<Vec<_>>>()?;
            write_output(io.output.as_deref(), &to_jsonl(&records))
        }
        Command::Decode { io, t_out } => {
            let (name, text) = read_text(io.input.as_deref())?;
            let records = parse_descriptors(&name, &text)?
                .into_iter()
                .enumerate()
                .map(|(i, r)| {
                    let d = r.to_descriptor().map_err(Error::Invalid)?;
                    let mut c =
                        efd_decode(&d, t_out).map_err(|e| Error::geometry("decoding", e))?;
                    c.class_id = r.class.unwrap_or(0);
                    Ok(ContourRecord::from_contour(
                        r.id.unwrap_or_else(|| i.to_string()),
                        &c,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            write_output(io.output.as_deref(), &to_jsonl(&records))
        }
        Command::Anchors {
            io,
            k,
            seed,
            stride,
            width,
            height,
        } => {
            let (name, text) = read_text(io.input.as_deref())?;
            let descs = parse_descriptors(&name, &text)?
                .iter()
                .map(|r| r.to_descriptor().map_err(Error::Invalid))
                .collect::<Result<Vec<_>>>()?;
            let fitted =
                fit_anchors(&descs, k, seed).map_err(|e| Error::geometry("fitting anchors", e))?;
            let set = AnchorSet::new(fitted.base_anchors, stride, (width, height))?;
            write_output(
                io.output.as_deref(),
                &to_json_pretty(&AnchorFile::from_set(&set)),
            )
        }
        Command::Assign {
            anchors,
            gt,
            output,
            pos,
            neg,
            no_force_match,
            workers,
        } => {
            let (aname, atext) = read_text(Some(&anchors))?;
            let set = parse_anchor_file(&aname, &atext)?;
            let (gname, gtext) = read_text(Some(&gt))?;
            let n = set.base_anchors[0].n_harmonics();
            let gts = parse_contours(&gname, &gtext)?
                .into_iter()
                .map(|(id, c)| {
                    GroundTruth::from_contour(c, n)
                        .map_err(|e| Error::geometry(format!("encoding ground truth {id:?}"), e))
                })
                .collect::<Result<Vec<_>>>()?;
            let cfg = AssignConfig {
                pos_threshold: pos,
                neg_threshold: neg,
                force_match: !no_force_match,
                ..AssignConfig::default()
            };
            let placed = tile_anchors(&set);
            let result = assign_parallel(&placed, &gts, &cfg, workers)?;
            let (p, ng, ig) = result.counts();
            let report = AssignReport {
                anchors: placed.len(),
                ground_truths: gts.len(),
                positives: p,
                negatives: ng,
                ignored: ig,
                labels: result
                    .labels
                    .iter()
                    .map(|l| match *l {
                        AnchorLabel::Positive(g) => g as i64,
                        AnchorLabel::Negative => -1,
                        AnchorLabel::Ignore => -2,
                    })
                    .collect(),
                matches: result
                    .positives
                    .iter()
                    .map(|m| MatchRecord {
                        anchor: m.anchor,
                        cell: [placed[m.anchor].cell.0, placed[m.anchor].cell.1],
                        base: placed[m.anchor].base,
                        gt: m.gt,
                        iou: m.iou,
                        forced: m.forced,
                        loc: m.delta.loc,
                        fourier: m.delta.fourier.clone(),
                    })
                    .collect(),
            };
            write_output(output.as_deref(), &to_json_pretty(&report))
        }
        Command::Refine {
            io,
            top_n,
            iou,
            k,
            box_scale,
        } => {
            let (name, text) = read_text(io.input.as_deref())?;
            let proposals = parse_proposals(&name, &text)?;
            let cfg = RefineConfig {
                top_n,
                cluster_iou: iou,
                sample_k: k,
                box_scale,
                ..RefineConfig::default()
            };
            let out: Vec<RefineRecord> = refine_all(&proposals, &cfg)
                .map_err(|e| Error::geometry("refining", e))?
                .iter()
                .map(RefineRecord::from)
                .collect();
            write_output(io.output.as_deref(), &to_json_pretty(&out))
        }
        Command::Metrics {
            pred,
            gt,
            output,
            workers,
        } => {
            let load = |p: &PathBuf| -> Result<Vec<Contour>> {
                let (name, text) = read_text(Some(p))?;
                Ok(parse_contours(&name, &text)?
                    .into_iter()
                    .map(|(_, c)| c)
                    .collect())
            };
            let table = evaluate(&load(&pred)?, &load(&gt)?, workers)?;
            if !table.excluded.is_empty() {
                eprintln!(
                    "fcontour: excluded {} degenerate pair(s): {:?}",
                    table.excluded.len(),
                    table.excluded
                );
            }
            write_output(output.as_deref(), metrics_csv(&table).as_bytes())
        }
        Command::Synth {
            count,
            seed,
            n,
            radius,
            decay,
            width,
            height,
            output,
        } => {
            let cfg = SynthConfig {
                count,
                n_harmonics: n,
                base_radius: radius,
                decay_power: decay,
                image_size: (width, height),
                seed,
            };
            let records: Vec<ContourRecord> = synth_dataset(&cfg)?
                .iter()
                .enumerate()
                .map(|(i, item)| ContourRecord::from_contour(i.to_string(), &item.contour))
                .collect();
            write_output(output.as_deref(), &to_jsonl(&records))
        }
        Command::Extract { io, class } => {
            let (name, bytes) = read_input(io.input.as_deref())?;
            let mask = parse_pgm(&name, &bytes)?;
            let classes = match class {
                Some(c) => vec![c],
                None => mask.classes(),
            };
            let mut records = Vec::new();
            for c in classes {
                for (i, contour) in extract_contours(&mask, c).iter().enumerate() {
                    records.push(ContourRecord::from_contour(format!("{c}-{i}"), contour));
                }
            }
            write_output(io.output.as_deref(), &to_jsonl(&records))
        }
        Command::Propose {
            io,
            sigma,
            center_sigma,
            per_gt,
            seed,
        } => {
            let (name, text) = read_text(io.input.as_deref())?;
            let mut records = Vec::new();
            for (i, r) in parse_descriptors(&name, &text)?.iter().enumerate() {
                let gt = r.to_descriptor().map_err(Error::Invalid)?;
                let cfg = NoiseConfig {
                    coeff_sigma: sigma,
                    center_sigma,
                    proposals_per_gt: per_gt,
                    seed: seed.wrapping_add(i as u64),
                };
                let props = simulate_proposals(&gt, r.class.unwrap_or(0), &cfg)?;
                records.extend(props.iter().map(ProposalRecord::from_proposal));
            }
            write_output(io.output.as_deref(), &to_jsonl(&records))
        }
    }
}

#[derive(Debug, Serialize)]
struct MatchRecord {
    anchor: usize,
    cell: [usize; 2],
    base: usize,
    gt: usize,
    iou: f64,
    forced: bool,
    loc: [f64; 2],
    fourier: Vec<[f64; 4]>,
}

/// Labels: ground-truth index for positives, -1 negative, -2 ignored.
#[derive(Debug, Serialize)]
struct AssignReport {
    anchors: usize,
    ground_truths: usize,
    positives: usize,
    negatives: usize,
    ignored: usize,
    labels: Vec<i64>,
    matches: Vec<MatchRecord>,
}

#[derive(Debug, Serialize)]
struct MergedRecord {
    descriptor: DescriptorRecord,
    member_count: usize,
    mean_member_iou: f64,
}

#[derive(Debug, Serialize)]
struct RefineRecord {
    class: u32,
    selected: usize,
    pivot: usize,
    members: Vec<usize>,
    merged: MergedRecord,
    points: Vec<[f64; 2]>,
    /// `[x_min, y_min, x_max, y_max]`.
    boxes: Vec<[f64; 4]>,
}

impl From<&RefineOutput> for RefineRecord {
    fn from(o: &RefineOutput) -> Self {
        RefineRecord {
            class: o.class_id,
            selected: o.selected.len(),
            pivot: o.cluster.pivot,
            members: o.cluster.members.clone(),
            merged: MergedRecord {
                descriptor: DescriptorRecord::from_descriptor(&o.merged.descriptor),
                member_count: o.merged.member_count,
                mean_member_iou: o.merged.mean_member_iou,
            },
            points: o.points.iter().map(|p| [p.x, p.y]).collect(),
            boxes: o
                .boxes
                .iter()
                .map(|b| [b.min.x, b.min.y, b.max.x, b.max.y])
                .collect(),
        }
    }
}
