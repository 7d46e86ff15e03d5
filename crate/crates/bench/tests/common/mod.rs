#![allow(dead_code)]

use std::path::{Path, PathBuf};

use phaseret::io::{load_image, save_image};
use phaseret::Image;

pub fn desk_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/desk"))
}

/// Desk image `name` box-downsampled by `factor`.
pub fn desk_small(name: &str, factor: usize) -> Image {
    let x = load_image(desk_dir().join(format!("{name}.pgm"))).unwrap();
    Image::from_fn(x.height() / factor, x.width() / factor, |r, c| {
        let mut acc = 0.0;
        for dr in 0..factor {
            for dc in 0..factor {
                acc += x.get(factor * r + dr, factor * c + dc);
            }
        }
        (acc / (factor * factor) as f64).round()
    })
    .unwrap()
}

/// Writes downsampled copies of the named desk images into `dir`.
pub fn small_dataset(dir: &Path, names: &[&str], factor: usize) {
    for name in names {
        save_image(&desk_small(name, factor), dir.join(format!("{name}.pgm"))).unwrap();
    }
}
