//! Raw video ingestion and deterministic synthetic content.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::codec::Frame;
use crate::error::{Error, Result};

/// Layout of a raw input file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum YuvFormat {
    /// Planar 4:2:0: luma followed by two quarter-size chroma planes.
    Yuv420,
    /// Luma only.
    Y8,
}

impl YuvFormat {
    pub fn frame_bytes(&self, width: usize, height: usize) -> usize {
        match self {
            YuvFormat::Yuv420 => width * height + 2 * (width / 2) * (height / 2),
            YuvFormat::Y8 => width * height,
        }
    }
}

/// Extracts `frame_count` luma planes from raw bytes; chroma is skipped.
pub fn parse_yuv(
    bytes: &[u8],
    width: usize,
    height: usize,
    frame_count: usize,
    format: YuvFormat,
) -> Result<Vec<Frame>> {
    // validates geometry before any length arithmetic matters
    Frame::filled(width, height, 0)?;
    let stride = format.frame_bytes(width, height);
    let needed = stride as u64 * frame_count as u64;
    if (bytes.len() as u64) < needed {
        return Err(Error::Truncated {
            needed,
            found: bytes.len() as u64,
        });
    }
    (0..frame_count)
        .map(|i| {
            Frame::new(
                width,
                height,
                bytes[i * stride..i * stride + width * height].to_vec(),
            )
        })
        .collect()
}

pub fn ingest_yuv(
    path: impl AsRef<Path>,
    width: usize,
    height: usize,
    frame_count: usize,
    format: YuvFormat,
) -> Result<Vec<Frame>> {
    let bytes = std::fs::read(path)?;
    parse_yuv(&bytes, width, height, frame_count, format)
}

/// Synthetic content generators.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    /// Every sample 128.
    Flat,
    /// Diagonal ramp.
    Gradient,
    /// 8x8 squares of 32 and 224.
    Checkerboard,
    /// Fresh uniform noise in every frame.
    Noise,
    /// One noise texture shifted left by 2 samples per frame.
    MovingTexture,
}

impl Pattern {
    pub const ALL: [Pattern; 5] = [
        Pattern::Flat,
        Pattern::Gradient,
        Pattern::Checkerboard,
        Pattern::Noise,
        Pattern::MovingTexture,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Pattern::Flat => "flat",
            Pattern::Gradient => "gradient",
            Pattern::Checkerboard => "checkerboard",
            Pattern::Noise => "noise",
            Pattern::MovingTexture => "moving-texture",
        }
    }
}

impl std::str::FromStr for Pattern {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Pattern::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown pattern '{s}'")))
    }
}

/// Samples per frame the moving texture advances.
pub const TEXTURE_SPEED: usize = 2;

pub fn gen_synthetic(
    pattern: Pattern,
    width: usize,
    height: usize,
    frames: usize,
    seed: u64,
) -> Result<Vec<Frame>> {
    Frame::filled(width, height, 0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let texture_w = width + TEXTURE_SPEED * frames;
    let texture: Vec<u8> = if pattern == Pattern::MovingTexture {
        (0..texture_w * height).map(|_| rng.gen()).collect()
    } else {
        Vec::new()
    };
    (0..frames)
        .map(|t| {
            let data: Vec<u8> = match pattern {
                Pattern::Flat => vec![128; width * height],
                Pattern::Gradient => (0..height)
                    .flat_map(|y| {
                        (0..width).map(move |x| {
                            ((x * 255 / (width - 1).max(1) + y * 255 / (height - 1).max(1)) / 2)
                                as u8
                        })
                    })
                    .collect(),
                Pattern::Checkerboard => (0..height)
                    .flat_map(|y| {
                        (0..width).map(move |x| if (x / 8 + y / 8) % 2 == 0 { 32 } else { 224 })
                    })
                    .collect(),
                Pattern::Noise => (0..width * height).map(|_| rng.gen()).collect(),
                Pattern::MovingTexture => (0..height)
                    .flat_map(|y| {
                        let row = &texture[y * texture_w + TEXTURE_SPEED * t..];
                        row[..width].to_vec()
                    })
                    .collect(),
            };
            Frame::new(width, height, data)
        })
        .collect()
}
