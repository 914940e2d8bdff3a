//! Flooding watershed producing the fine partition.
//!
//! Regional minima are 4-connected plateaus with no strictly lower neighbor;
//! they are numbered in raster order of their first pixel. Flooding runs a
//! hierarchical queue keyed by `(level, arrival)`: a pixel joins the basin of
//! the first front that reaches it, and fronts tied at the same level expand
//! in FIFO order, seeded by basin id. No watershed-line pixels are produced.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use super::image::ScalarField;
use super::labels::{neighbors4, LabelMap};
use crate::error::Result;

#[derive(Clone, Copy, Debug)]
struct QueueEntry {
    level: f64,
    seq: u64,
    pixel: usize,
}

impl PartialEq for QueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for QueueEntry {}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for QueueEntry {
    // Reversed so that the max-heap pops the lowest (level, seq).
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .level
            .total_cmp(&self.level)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Labels of the regional minima of `relief` (others `u32::MAX`) and their count.
pub fn regional_minima(relief: &ScalarField) -> (Vec<u32>, usize) {
    let (w, h) = (relief.width(), relief.height());
    let vals = relief.values();
    let mut plateau = vec![u32::MAX; w * h];
    let mut minima = vec![u32::MAX; w * h];
    let mut members = Vec::new();
    let mut queue = VecDeque::new();
    let mut n_plateaus = 0u32;
    let mut n_minima = 0u32;
    for start in 0..w * h {
        if plateau[start] != u32::MAX {
            continue;
        }
        let level = vals[start];
        let mut is_minimum = true;
        members.clear();
        plateau[start] = n_plateaus;
        queue.push_back(start);
        while let Some(p) = queue.pop_front() {
            members.push(p);
            for q in neighbors4(p, w, h) {
                if vals[q] < level {
                    is_minimum = false;
                } else if vals[q] == level && plateau[q] == u32::MAX {
                    plateau[q] = n_plateaus;
                    queue.push_back(q);
                }
            }
        }
        n_plateaus += 1;
        if is_minimum {
            for &p in &members {
                minima[p] = n_minima;
            }
            n_minima += 1;
        }
    }
    (minima, n_minima as usize)
}

/// Watershed basins of `relief`, one region per regional minimum.
pub fn watershed_fine_partition(relief: &ScalarField) -> Result<LabelMap> {
    let (w, h) = (relief.width(), relief.height());
    let vals = relief.values();
    let (mut labels, n_minima) = regional_minima(relief);

    // Seed pixels ordered by basin id, then raster order.
    let mut seeds: Vec<usize> = (0..w * h).filter(|&p| labels[p] != u32::MAX).collect();
    seeds.sort_by_key(|&p| (labels[p], p));

    let mut heap = BinaryHeap::with_capacity(w * h);
    let mut seq = 0u64;
    for p in seeds {
        heap.push(QueueEntry {
            level: vals[p],
            seq,
            pixel: p,
        });
        seq += 1;
    }
    while let Some(QueueEntry { level, pixel, .. }) = heap.pop() {
        let basin = labels[pixel];
        for q in neighbors4(pixel, w, h) {
            if labels[q] == u32::MAX {
                labels[q] = basin;
                heap.push(QueueEntry {
                    level: vals[q].max(level),
                    seq,
                    pixel: q,
                });
                seq += 1;
            }
        }
    }
    debug_assert!(labels.iter().all(|&l| (l as usize) < n_minima));
    // Basins grow from connected seeds through 4-adjacency, so they are
    // connected; normalizing only renumbers them in raster order.
    LabelMap::normalize(w, h, &labels)
}
