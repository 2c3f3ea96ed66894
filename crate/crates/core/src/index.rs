//! Exhaustive top-k retrieval over embedded corpus layouts.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::sync::Arc;

use crate::descriptor::{dot, embed, FeatureVector};
use crate::error::{Error, Result};
use crate::layout::SlideLayout;
use crate::scalar::Real;

#[derive(Debug, Clone)]
pub struct IndexEntry<T> {
    pub layout: Arc<SlideLayout<T>>,
    pub vector: FeatureVector<T>,
}

/// Immutable snapshot of the embedded corpus, entries sorted by id.
///
/// Every rebuild or upsert produces a new snapshot with a higher revision;
/// existing snapshots are never modified.
#[derive(Debug, Clone)]
pub struct CorpusIndex<T> {
    g: usize,
    revision: u64,
    entries: Vec<IndexEntry<T>>,
}

#[derive(Debug, Clone)]
pub struct BuildOutcome<T> {
    pub index: CorpusIndex<T>,
    /// Layouts left out because they have no elements.
    pub skipped: usize,
}

#[derive(Debug, Clone)]
pub struct Hit<T> {
    pub id: String,
    pub score: T,
    pub layout: Arc<SlideLayout<T>>,
}

impl<T> Hit<T> {
    pub fn image_ref(&self) -> Option<&str> {
        self.layout.image_ref.as_deref()
    }
}

/// Ranked hits (score descending, id ascending) and the snapshot revision
/// they were computed against.
#[derive(Debug, Clone)]
pub struct RetrievalResult<T> {
    pub revision: u64,
    pub query: SlideLayout<T>,
    pub hits: Vec<Hit<T>>,
}

/// Total order used for ranking: higher score first, then ascending id.
pub fn rank_order<T: Real>(a: (T, &str), b: (T, &str)) -> Ordering {
    b.0.partial_cmp(&a.0)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.1.cmp(b.1))
}

impl<T: Real> CorpusIndex<T> {
    /// Embeds every non-empty layout. Revision starts at 1.
    pub fn build(corpus: &[SlideLayout<T>], g: usize) -> Result<BuildOutcome<T>> {
        Self::build_at(corpus, g, 1)
    }

    /// Builds a replacement snapshot one revision past this one.
    pub fn rebuild(&self, corpus: &[SlideLayout<T>]) -> Result<BuildOutcome<T>> {
        Self::build_at(corpus, self.g, self.revision + 1)
    }

    fn build_at(corpus: &[SlideLayout<T>], g: usize, revision: u64) -> Result<BuildOutcome<T>> {
        if g == 0 {
            return Err(Error::ZeroGrid);
        }
        let mut seen = HashSet::new();
        for layout in corpus {
            if !seen.insert(layout.id.as_str()) {
                return Err(Error::DuplicateId(layout.id.clone()));
            }
        }
        let mut skipped = 0;
        let mut entries = Vec::with_capacity(corpus.len());
        for layout in corpus {
            if layout.is_empty() {
                skipped += 1;
                continue;
            }
            entries.push(IndexEntry {
                vector: embed(layout, g)?,
                layout: Arc::new(layout.clone()),
            });
        }
        entries.sort_by(|a, b| a.layout.id.cmp(&b.layout.id));
        Ok(BuildOutcome {
            index: Self { g, revision, entries },
            skipped,
        })
    }

    /// Builds from precomputed descriptors, e.g. vectors imported from an
    /// external feature extractor. All vectors must share one dimension.
    pub fn from_vectors(
        g: usize,
        revision: u64,
        pairs: Vec<(SlideLayout<T>, FeatureVector<T>)>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut entries = Vec::with_capacity(pairs.len());
        for (layout, vector) in pairs {
            if vector.g() != g {
                return Err(Error::DimensionMismatch {
                    left: vector.dim(),
                    right: 3 * g * g,
                });
            }
            if !seen.insert(layout.id.clone()) {
                return Err(Error::DuplicateId(layout.id));
            }
            entries.push(IndexEntry {
                layout: Arc::new(layout),
                vector,
            });
        }
        entries.sort_by(|a, b| a.layout.id.cmp(&b.layout.id));
        Ok(Self { g, revision, entries })
    }

    /// Relabels the snapshot, for callers that keep their own revision
    /// counter across rebuilds.
    pub fn with_revision(mut self, revision: u64) -> Self {
        self.revision = revision;
        self
    }

    pub fn g(&self) -> usize {
        self.g
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[IndexEntry<T>] {
        &self.entries
    }

    pub fn get(&self, id: &str) -> Option<&IndexEntry<T>> {
        self.entries
            .binary_search_by(|e| e.layout.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.entries[i])
    }

    /// Returns a new snapshot with `layout` replacing the entry of the same
    /// id, or added if the id is new.
    pub fn upsert(&self, layout: SlideLayout<T>) -> Result<Self> {
        if layout.is_empty() {
            return Err(Error::EmptyLayout);
        }
        let entry = IndexEntry {
            vector: embed(&layout, self.g)?,
            layout: Arc::new(layout),
        };
        let mut entries = self.entries.clone();
        match entries.binary_search_by(|e| e.layout.id.cmp(&entry.layout.id)) {
            Ok(i) => entries[i] = entry,
            Err(i) => entries.insert(i, entry),
        }
        Ok(Self {
            g: self.g,
            revision: self.revision + 1,
            entries,
        })
    }

    /// Top-`k` corpus layouts for a draft. Any non-empty draft is a valid
    /// query, including one that holds only part of a layout.
    pub fn query(&self, draft: &SlideLayout<T>, k: usize) -> Result<RetrievalResult<T>> {
        if draft.is_empty() {
            return Err(Error::EmptyQuery);
        }
        if self.entries.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let vector = embed(draft, self.g)?;
        Ok(RetrievalResult {
            revision: self.revision,
            query: draft.clone(),
            hits: self.query_vector(&vector, k)?,
        })
    }

    pub fn query_vector(&self, vector: &FeatureVector<T>, k: usize) -> Result<Vec<Hit<T>>> {
        if k == 0 {
            return Err(Error::ZeroK);
        }
        if self.entries.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let dim = 3 * self.g * self.g;
        if vector.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: vector.dim(),
                right: dim,
            });
        }
        let mut scored: Vec<(T, usize)> = self
            .entries
            .iter()
            .enumerate()
            .map(|(i, e)| (dot(vector.values(), e.vector.values()), i))
            .collect();
        let cmp = |a: &(T, usize), b: &(T, usize)| {
            rank_order(
                (a.0, self.entries[a.1].layout.id.as_str()),
                (b.0, self.entries[b.1].layout.id.as_str()),
            )
        };
        let k = k.min(scored.len());
        if k < scored.len() {
            scored.select_nth_unstable_by(k - 1, cmp);
            scored.truncate(k);
        }
        scored.sort_by(cmp);
        Ok(scored
            .into_iter()
            .map(|(score, i)| {
                let layout = Arc::clone(&self.entries[i].layout);
                Hit {
                    id: layout.id.clone(),
                    score,
                    layout,
                }
            })
            .collect())
    }
}
