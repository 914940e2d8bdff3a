//! Deterministic synthetic inputs: noisy-disk images, small graphs and
//! random hierarchies.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde_json::json;

use crate::error::{Error, Result};
use crate::graph::{Edge, Graph, IndexedHierarchy, Mst};
use crate::io::{write_manifest, ManifestEntry};
use crate::pixel::{save_image, Image, LabelMap};
use crate::scoring::{judge, DEFAULT_DELTA};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disk {
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
    pub intensity: f64,
}

impl Disk {
    pub fn contains(&self, x: usize, y: usize) -> bool {
        let (dx, dy) = (x as f64 - self.cx, y as f64 - self.cy);
        dx * dx + dy * dy <= self.radius * self.radius
    }
}

/// Non-overlapping disks on a flat background, with Gaussian noise.
#[derive(Clone, Debug, PartialEq)]
pub struct DiskScene {
    pub width: usize,
    pub height: usize,
    pub background: f64,
    pub noise: f64,
    pub disks: Vec<Disk>,
}

impl DiskScene {
    /// A scene of `n_disks` random disks of radius 10 to 14 and contrast 0.7
    /// to 0.8, at least 4 pixels apart and from the border.
    pub fn random(seed: u64, width: usize, height: usize, n_disks: usize) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let background = rng.random_range(0.1..0.2);
        let gap = 4.0;
        let mut disks: Vec<Disk> = Vec::with_capacity(n_disks);
        let mut attempts = 0;
        while disks.len() < n_disks {
            attempts += 1;
            if attempts > 10_000 {
                return Err(Error::InvalidParameter(format!(
                    "cannot place {n_disks} disks in {width}x{height}"
                )));
            }
            let radius = rng.random_range(10.0..14.0);
            let margin = radius + gap;
            if 2.0 * margin >= width.min(height) as f64 {
                continue;
            }
            let cx = rng.random_range(margin..width as f64 - margin);
            let cy = rng.random_range(margin..height as f64 - margin);
            let clear = disks.iter().all(|d| {
                let dist = ((d.cx - cx).powi(2) + (d.cy - cy).powi(2)).sqrt();
                dist > d.radius + radius + gap
            });
            if clear {
                let intensity = background + rng.random_range(0.7..0.8);
                disks.push(Disk {
                    cx,
                    cy,
                    radius,
                    intensity,
                });
            }
        }
        Ok(Self {
            width,
            height,
            background,
            noise: 0.04,
            disks,
        })
    }

    /// Noise-free intensity at a pixel.
    pub fn clean_value(&self, x: usize, y: usize) -> f64 {
        self.disks
            .iter()
            .find(|d| d.contains(x, y))
            .map_or(self.background, |d| d.intensity)
    }

    pub fn render(&self, seed: u64) -> Result<Image> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, self.noise)
            .map_err(|e| Error::InvalidParameter(format!("noise level: {e}")))?;
        let mut values = Vec::with_capacity(self.width * self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                let v = self.clean_value(x, y) + normal.sample(&mut rng);
                values.push(v.clamp(0.0, 1.0));
            }
        }
        Image::gray(self.width, self.height, values)
    }

    /// Pixel mask of each disk.
    pub fn disk_masks(&self) -> Vec<Vec<bool>> {
        self.disks
            .iter()
            .map(|d| {
                (0..self.height)
                    .flat_map(|y| (0..self.width).map(move |x| d.contains(x, y)))
                    .collect()
            })
            .collect()
    }
}

/// Judgment file for `n_pairs` random point pairs, answered from the
/// noise-free intensities with tolerance `delta`.
pub fn scene_judgments_json(scene: &DiskScene, n_pairs: usize, seed: u64, delta: f64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (w, h) = (scene.width, scene.height);
    let mut points = Vec::with_capacity(2 * n_pairs);
    let mut comparisons = Vec::with_capacity(n_pairs);
    for i in 0..n_pairs {
        let a = (rng.random_range(0..w), rng.random_range(0..h));
        let b = (rng.random_range(0..w), rng.random_range(0..h));
        for (k, (x, y)) in [(2 * i, a), (2 * i + 1, b)] {
            points.push(json!({
                "id": k,
                "x_rel": (x as f64 + 0.5) / w as f64,
                "y_rel": (y as f64 + 0.5) / h as f64,
            }));
        }
        let darker = judge(
            scene.clean_value(a.0, a.1),
            scene.clean_value(b.0, b.1),
            delta,
        );
        comparisons.push(json!({
            "p1": 2 * i,
            "p2": 2 * i + 1,
            "darker": darker,
            "weight": rng.random_range(0.5..1.0),
        }));
    }
    serde_json::to_string_pretty(&json!({ "points": points, "comparisons": comparisons }))
        .expect("json value serializes")
}

/// Files of a dataset written by [`write_disk_dataset`].
#[derive(Clone, Debug)]
pub struct SyntheticDataset {
    pub manifest: PathBuf,
    pub scenes: Vec<DiskScene>,
}

/// Writes `n_images` noisy-disk PNGs of `size × size` pixels, optional
/// judgment files, and `manifest.json` into `dir`.
pub fn write_disk_dataset(
    dir: impl AsRef<Path>,
    n_images: usize,
    size: usize,
    seed: u64,
    judgments: bool,
) -> Result<SyntheticDataset> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut scenes = Vec::with_capacity(n_images);
    let mut entries = Vec::with_capacity(n_images);
    for i in 0..n_images {
        let s = seed.wrapping_mul(1_000_003).wrapping_add(i as u64);
        let scene = DiskScene::random(s, size, size, 1 + i % 2)?;
        let id = format!("disks{i:02}");
        let image = PathBuf::from(format!("{id}.png"));
        save_image(&scene.render(s)?, dir.join(&image))?;
        let judgment_path = if judgments {
            let p = PathBuf::from(format!("{id}.json"));
            let text = scene_judgments_json(&scene, 200, s, DEFAULT_DELTA);
            fs::write(dir.join(&p), text).map_err(|e| Error::io(dir.join(&p), e))?;
            Some(p)
        } else {
            None
        };
        entries.push(ManifestEntry {
            id: Some(id),
            image,
            labels: None,
            judgments: judgment_path,
        });
        scenes.push(scene);
    }
    let manifest = dir.join("manifest.json");
    write_manifest(&entries, &manifest)?;
    Ok(SyntheticDataset { manifest, scenes })
}

/// Largest intersection-over-union between `mask` and any region of `seg`.
pub fn best_iou(mask: &[bool], seg: &LabelMap) -> f64 {
    let n = seg.n_regions();
    let mut inter = vec![0u64; n];
    let areas = seg.areas();
    let mask_area = mask.iter().filter(|&&m| m).count() as u64;
    for (&l, &m) in seg.labels().iter().zip(mask) {
        if m {
            inter[l as usize] += 1;
        }
    }
    (0..n)
        .map(|r| inter[r] as f64 / (areas[r] + mask_area - inter[r]) as f64)
        .fold(0.0, f64::max)
}

/// Eight nodes in two groups of four. Edges inside a group weigh at most 5;
/// the groups are joined by edges of weight 7 and 9, so the minimum spanning
/// tree has exactly one edge above 6.
pub fn two_group_graph() -> Graph {
    let e = [
        (0, 1, 2.0),
        (1, 2, 3.0),
        (2, 3, 1.0),
        (0, 3, 5.0),
        (0, 2, 4.0),
        (4, 5, 1.0),
        (5, 6, 4.0),
        (6, 7, 2.0),
        (4, 7, 3.0),
        (5, 7, 5.0),
        (3, 4, 7.0),
        (2, 6, 9.0),
    ];
    Graph::new(8, e.iter().map(|&(a, b, w)| Edge::new(a, b, w)).collect())
        .expect("valid fixed graph")
}

/// A connected graph on `n` nodes: a random spanning tree plus `extra`
/// distinct random edges. Weights are integers in `1..=levels`, so small `levels`
/// produce ties.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, extra: usize, levels: u32) -> Graph {
    let weight = |rng: &mut _| Rng::random_range(rng, 1..=levels) as f64;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for i in 1..n {
        let j = rng.random_range(0..i);
        let (a, b) = (order[i].min(order[j]), order[i].max(order[j]));
        seen.insert((a, b));
        edges.push(Edge::new(a, b, weight(rng)));
    }
    if n >= 2 {
        for _ in 0..extra {
            let a = rng.random_range(0..n);
            let b = rng.random_range(0..n);
            let key = (a.min(b), a.max(b));
            if a != b && seen.insert(key) {
                edges.push(Edge::new(key.0, key.1, weight(rng)));
            }
        }
    }
    Graph::new(n, edges).expect("endpoints are in range")
}

/// A random tree hierarchy on `n_leaves` leaves with distinct random
/// altitudes and random leaf areas in `1..=max_area`.
pub fn random_hierarchy(rng: &mut impl Rng, n_leaves: usize, max_area: u64) -> IndexedHierarchy {
    let mut edges = Vec::with_capacity(n_leaves.saturating_sub(1));
    for i in 1..n_leaves {
        let j = rng.random_range(0..i);
        edges.push(Edge::new(j, i, rng.random_range(0.0..1.0)));
    }
    let mst = Mst::from_tree(n_leaves, edges).expect("random tree");
    let areas = (0..n_leaves)
        .map(|_| rng.random_range(1..=max_area))
        .collect();
    IndexedHierarchy::build(mst, areas).expect("non-empty tree")
}

/// The 30-leaf hierarchy used by self-checks.
pub fn bundled_hierarchy() -> IndexedHierarchy {
    random_hierarchy(&mut ChaCha8Rng::seed_from_u64(30), 30, 20)
}
