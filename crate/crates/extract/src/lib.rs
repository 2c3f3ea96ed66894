//! Slide extraction from a directory of decoded video frames.
//!
//! Frames (PNG or binary PPM) are read in file-name order, hashed, and fed to
//! [`SlideDetector`]. Each captured slide is written as
//! `slide_{index:04}.png` next to a line-delimited `manifest.jsonl`.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use image::RgbImage;
use serde::{Deserialize, Serialize};
use shadowlayout_core::{dhash, ExtractorConfig, FrameHash, RgbFrame, SlideDetector};
use thiserror::Error;

pub const MANIFEST_FILE: &str = "manifest.jsonl";

#[derive(Debug, Error)]
pub enum ExtractError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        source: image::ImageError,
    },
    #[error("no PNG or PPM frames in {}", .0.display())]
    NoFrames(PathBuf),
    #[error("{}: {source}", path.display())]
    Frame {
        path: PathBuf,
        source: shadowlayout_core::Error,
    },
    #[error(transparent)]
    Core(#[from] shadowlayout_core::Error),
    #[error("manifest line {line}: {message}")]
    Manifest { line: usize, message: String },
}

type Result<T, E = ExtractError> = std::result::Result<T, E>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ExtractError + '_ {
    move |source| ExtractError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedSlide {
    pub index: usize,
    pub frame_number: usize,
    pub hash: FrameHash,
    pub image_ref: PathBuf,
}

/// One manifest line: `{"index", "frame", "hash", "image"}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRecord {
    pub index: usize,
    pub frame: usize,
    pub hash: String,
    pub image: String,
}

fn is_frame_file(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| matches!(e.to_ascii_lowercase().as_str(), "png" | "ppm"))
}

/// Frame files in `dir`, sorted by file name. Other files are ignored.
pub fn list_frames(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut frames = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let path = entry.map_err(io_err(dir))?.path();
        if path.is_file() && is_frame_file(&path) {
            frames.push(path);
        }
    }
    frames.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if frames.is_empty() {
        return Err(ExtractError::NoFrames(dir.to_path_buf()));
    }
    Ok(frames)
}

pub fn load_frame(path: &Path) -> Result<RgbImage> {
    image::open(path)
        .map(|img| img.to_rgb8())
        .map_err(|source| ExtractError::Image {
            path: path.to_path_buf(),
            source,
        })
}

pub fn hash_image(img: &RgbImage) -> Result<FrameHash, shadowlayout_core::Error> {
    let frame = RgbFrame::new(img.width() as usize, img.height() as usize, img.as_raw())?;
    dhash(&frame)
}

pub fn hash_frame(path: &Path) -> Result<FrameHash> {
    hash_image(&load_frame(path)?).map_err(|source| ExtractError::Frame {
        path: path.to_path_buf(),
        source,
    })
}

pub fn slide_file_name(index: usize) -> String {
    format!("slide_{index:04}.png")
}

/// Extracts slides from `frames_dir` into `out_dir` and writes the manifest.
pub fn extract_slides(frames_dir: &Path, out_dir: &Path, config: ExtractorConfig) -> Result<Vec<ExtractedSlide>> {
    let frames = list_frames(frames_dir)?;
    let mut detector = SlideDetector::new(config)?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;

    let mut slides = Vec::new();
    let mut save = |d: shadowlayout_core::Detection| -> Result<()> {
        let source = &frames[d.frame_number];
        let image_ref = out_dir.join(slide_file_name(d.index));
        load_frame(source)?
            .save_with_format(&image_ref, image::ImageFormat::Png)
            .map_err(|source| ExtractError::Image {
                path: image_ref.clone(),
                source,
            })?;
        slides.push(ExtractedSlide {
            index: d.index,
            frame_number: d.frame_number,
            hash: d.hash,
            image_ref,
        });
        Ok(())
    };
    for path in &frames {
        if let Some(d) = detector.push(hash_frame(path)?) {
            save(d)?;
        }
    }
    if let Some(d) = detector.finish() {
        save(d)?;
    }
    write_manifest(&out_dir.join(MANIFEST_FILE), &slides)?;
    Ok(slides)
}

pub fn manifest_record(slide: &ExtractedSlide) -> ManifestRecord {
    ManifestRecord {
        index: slide.index,
        frame: slide.frame_number,
        hash: slide.hash.to_string(),
        image: slide
            .image_ref
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    }
}

/// Writes one record per slide. Image paths are stored relative to the
/// manifest's directory so the output folder can be moved.
pub fn write_manifest(path: &Path, slides: &[ExtractedSlide]) -> Result<()> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut out = BufWriter::new(file);
    for slide in slides {
        let line = serde_json::to_string(&manifest_record(slide)).expect("manifest record serializes");
        writeln!(out, "{line}").map_err(io_err(path))?;
    }
    out.flush().map_err(io_err(path))
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRecord>> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut records = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ManifestRecord = serde_json::from_str(&line).map_err(|e| ExtractError::Manifest {
            line: i + 1,
            message: e.to_string(),
        })?;
        rec.hash.parse::<FrameHash>().map_err(|e| ExtractError::Manifest {
            line: i + 1,
            message: format!("bad hash {:?}: {e}", rec.hash),
        })?;
        records.push(rec);
    }
    Ok(records)
}
