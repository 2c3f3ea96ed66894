//! Test-only corpus generators and an independent brute-force scorer.
#![allow(dead_code)]

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowlayout_core::{ElementCategory, LayoutElement, Rect, SlideLayout};

pub type Layout = SlideLayout<f64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn element(category: ElementCategory, bbox: [f64; 4]) -> LayoutElement<f64> {
    LayoutElement::new(category, Rect::from_bbox(bbox).expect("generated bbox is valid"))
}

/// Random box inside `[x0, x1] x [y0, y1]`.
pub fn random_box(rng: &mut impl Rng, x0: f64, x1: f64, y0: f64, y1: f64) -> [f64; 4] {
    let w = rng.random_range(0.05..=1.0) * (x1 - x0) * 0.9;
    let h = rng.random_range(0.05..=1.0) * (y1 - y0) * 0.9;
    let x = x0 + rng.random_range(0.0..=1.0) * (x1 - x0 - w);
    let y = y0 + rng.random_range(0.0..=1.0) * (y1 - y0 - h);
    [x, y, w, h]
}

pub fn random_layout(rng: &mut impl Rng, id: String) -> Layout {
    let n = rng.random_range(1..=6);
    let elements = (0..n)
        .map(|_| {
            let c = *ElementCategory::ALL.choose(rng).unwrap();
            element(c, random_box(rng, 0.0, 1.0, 0.0, 1.0))
        })
        .collect();
    let mut l = SlideLayout::new(id, elements);
    l.source = "synthetic".into();
    l
}

pub fn random_corpus(seed: u64, n: usize) -> Vec<Layout> {
    let mut r = rng(seed);
    (0..n).map(|i| random_layout(&mut r, format!("L{i:05}"))).collect()
}

/// Slide-like corpus: a title band, then text and figure blocks in a few
/// column arrangements, with jitter.
pub fn slide_corpus(seed: u64, n: usize) -> Vec<Layout> {
    let mut r = rng(seed);
    (0..n)
        .map(|i| {
            use ElementCategory::*;
            let j = |r: &mut ChaCha8Rng| -> f64 { r.random_range(-0.03..0.03) };
            let mut els = vec![element(Title, [0.05 + j(&mut r).abs(), 0.04, 0.85, 0.1 + j(&mut r).abs()])];
            match r.random_range(0..4) {
                0 => els.push(element(Text, [0.06, 0.2 + j(&mut r).abs(), 0.88, 0.7])),
                1 => {
                    els.push(element(Text, [0.05, 0.2, 0.42 + j(&mut r), 0.7]));
                    els.push(element(Figure, [0.52, 0.22, 0.43, 0.6 + j(&mut r)]));
                }
                2 => els.push(element(Figure, [0.1 + j(&mut r).abs(), 0.2, 0.8, 0.75])),
                _ => {
                    els.push(element(Figure, [0.05, 0.2, 0.43, 0.35 + j(&mut r)]));
                    els.push(element(Figure, [0.52, 0.2, 0.43, 0.35]));
                    els.push(element(Text, [0.05, 0.62, 0.9, 0.3 + j(&mut r).abs() / 2.0]));
                }
            }
            let mut l = SlideLayout::new(format!("slide-{i:04}"), els);
            l.source = format!("talk-{:02}", i / 20);
            l
        })
        .collect()
}

/// A case for the incomplete-query property: `corpus` contains `target`,
/// whose boxes sit in the left half with title/text categories; every other
/// layout only has figure boxes in the right half. `draft` holds a strict
/// nonempty subset of the target's boxes.
pub struct PartialCase {
    pub corpus: Vec<Layout>,
    pub target: String,
    pub draft: Layout,
}

pub fn partial_case(seed: u64, others: usize) -> PartialCase {
    let mut r = rng(seed);
    let n = r.random_range(2..=5);
    let target_els: Vec<_> = (0..n)
        .map(|_| {
            let c = if r.random_bool(0.5) { ElementCategory::Title } else { ElementCategory::Text };
            element(c, random_box(&mut r, 0.0, 0.5, 0.0, 1.0))
        })
        .collect();
    let keep = r.random_range(1..n);
    let mut picked: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        picked.swap(i, r.random_range(0..=i));
    }
    let draft = SlideLayout::draft(picked[..keep].iter().map(|&i| target_els[i]).collect());
    let target = format!("target-{seed}");
    let mut corpus = vec![SlideLayout::new(target.clone(), target_els)];
    for i in 0..others {
        let m = r.random_range(1..=3);
        let els = (0..m)
            .map(|_| element(ElementCategory::Figure, random_box(&mut r, 0.5, 1.0, 0.0, 1.0)))
            .collect();
        corpus.push(SlideLayout::new(format!("other-{i:03}"), els));
    }
    PartialCase { corpus, target, draft }
}

/// Descriptor computed without the library: per-cell box intersection in
/// canvas coordinates, max over boxes, L2 normalization of the whole vector.
pub fn oracle_descriptor(layout: &Layout, g: usize) -> Vec<f64> {
    let side = 1.0 / g as f64;
    let mut v = vec![0.0f64; 3 * g * g];
    for e in &layout.elements {
        let [bx, by, bw, bh] = e.rect.to_bbox();
        let base = match e.category {
            ElementCategory::Title => 0,
            ElementCategory::Text => g * g,
            ElementCategory::Figure => 2 * g * g,
        };
        for row in 0..g {
            for col in 0..g {
                let (cx, cy) = (col as f64 * side, row as f64 * side);
                let ox = ((bx + bw).min(cx + side) - bx.max(cx)).max(0.0);
                let oy = ((by + bh).min(cy + side) - by.max(cy)).max(0.0);
                let cov = (ox / side) * (oy / side);
                let slot = &mut v[base + row * g + col];
                *slot = f64::max(*slot, cov.min(1.0));
            }
        }
    }
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

/// Scores every corpus layout against the draft and sorts the full list.
pub fn brute_force_top_k(corpus: &[Layout], draft: &Layout, g: usize, k: usize) -> Vec<(String, f64)> {
    let q = oracle_descriptor(draft, g);
    let mut all: Vec<(String, f64)> = corpus
        .iter()
        .filter(|l| !l.elements.is_empty())
        .map(|l| {
            let d = oracle_descriptor(l, g);
            (l.id.clone(), q.iter().zip(&d).map(|(a, b)| a * b).sum::<f64>())
        })
        .collect();
    all.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    all.truncate(k);
    all
}
