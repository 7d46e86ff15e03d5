mod common;

use common::*;
use phaseret::io::{load_image, save_image};
use phaseret::Image;
use rand::Rng;

#[test]
fn round_trip_is_exact() {
    let mut r = rng(20);
    let img = Image::from_fn(32, 32, |_, _| r.random_range(0..=255u8) as f64).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for ext in ["pgm", "png", "PNG"] {
        let path = dir.path().join(format!("x.{ext}"));
        save_image(&img, &path).unwrap();
        assert_eq!(load_image(&path).unwrap(), img);
    }
}

#[test]
fn saving_rounds_and_clamps() {
    let img = Image::new(1, 4, vec![-3.0, 1.4, 1.6, 300.0]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.pgm");
    save_image(&img, &path).unwrap();
    assert_eq!(load_image(&path).unwrap().data(), &[0.0, 1.0, 2.0, 255.0]);
}

#[test]
fn bad_paths_and_formats() {
    let dir = tempfile::tempdir().unwrap();
    assert!(load_image(dir.path().join("missing.pgm")).is_err());
    let junk = dir.path().join("junk.pgm");
    std::fs::write(&junk, b"not an image").unwrap();
    assert!(load_image(&junk).is_err());
    let truncated = dir.path().join("short.pgm");
    std::fs::write(&truncated, b"P5\n4 4\n255\n\x00\x01").unwrap();
    assert!(load_image(&truncated).is_err());
    assert!(save_image(&Image::zeros(2, 2), dir.path().join("x.bmp")).is_err());
}

#[test]
fn test_asset_has_expected_size() {
    let img = load_image(concat!(env!("CARGO_MANIFEST_DIR"), "/tests/assets/camera_128.pgm")).unwrap();
    assert_eq!(img.dims(), (128, 128));
    assert!(img.data().iter().all(|v| (0.0..=255.0).contains(v)));
}
