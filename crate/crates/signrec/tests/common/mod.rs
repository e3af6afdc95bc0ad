//! Shared helpers for integration tests: synthetic sign corpora drawn as
//! skin-colored blobs on black, plus noise perturbation.

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signrec::imaging::RgbFrame;
use signrec::netpbm::encode_p6;

/// Orange-ish color inside the default skin thresholds (h ~ 20 degrees,
/// s ~ 0.45, v = 0.8).
pub const SKIN: (u8, u8, u8) = (204, 143, 112);

pub const FRAME_SIDE: u32 = 96;

/// Eight distinct blob silhouettes, alphabetical.
pub const SHAPES: [&str; 8] = [
    "cross", "diamond", "disk", "lshape", "ring", "square", "tall", "wide",
];

fn inside(shape: &str, x: u32, y: u32) -> bool {
    let c = FRAME_SIDE as i64 / 2;
    let dx = x as i64 - c;
    let dy = y as i64 - c;
    let r2 = dx * dx + dy * dy;
    match shape {
        "square" => dx.abs() <= 18 && dy.abs() <= 18,
        "wide" => dx.abs() <= 30 && dy.abs() <= 10,
        "tall" => dx.abs() <= 10 && dy.abs() <= 30,
        "diamond" => dx.abs() + dy.abs() <= 24,
        "disk" => r2 <= 22 * 22,
        "ring" => r2 <= 22 * 22 && r2 >= 12 * 12,
        "lshape" => {
            ((-20..=-8).contains(&dx) && (-30..=30).contains(&dy))
                || ((-20..=24).contains(&dx) && (16..=30).contains(&dy))
        }
        "cross" => {
            (dx.abs() <= 8 && dy.abs() <= 30) || (dx.abs() <= 30 && dy.abs() <= 8)
        }
        other => panic!("unknown shape {other}"),
    }
}

pub fn shape_frame(shape: &str) -> RgbFrame {
    RgbFrame::from_fn(FRAME_SIDE, FRAME_SIDE, |x, y| {
        if inside(shape, x, y) {
            SKIN
        } else {
            (0, 0, 0)
        }
    })
}

/// Adds independent integer noise in `[-amplitude, amplitude]` to every
/// channel of every pixel.
pub fn perturb(frame: &RgbFrame, amplitude: i16, seed: u64) -> RgbFrame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut noisy = |v: u8| -> u8 {
        (v as i16 + rng.gen_range(-amplitude..=amplitude)).clamp(0, 255) as u8
    };
    let data: Vec<u8> = frame.data().iter().map(|&v| noisy(v)).collect();
    RgbFrame::new(frame.width(), frame.height(), data).unwrap()
}

pub fn write_ppm(path: &Path, frame: &RgbFrame) {
    std::fs::write(path, encode_p6(frame)).unwrap();
}

/// Writes `root/<shape>/img_<k>.ppm` for every shape: the clean silhouette
/// plus `extra_noisy` perturbed variants with fixed seeds.
pub fn write_corpus(root: &Path, extra_noisy: usize) {
    for (s, shape) in SHAPES.iter().enumerate() {
        let dir = root.join(shape);
        std::fs::create_dir_all(&dir).unwrap();
        let base = shape_frame(shape);
        write_ppm(&dir.join("img_0.ppm"), &base);
        for k in 0..extra_noisy {
            let noisy = perturb(&base, 2, (s * 100 + k) as u64);
            write_ppm(&dir.join(format!("img_{}.ppm", k + 1)), &noisy);
        }
    }
}
