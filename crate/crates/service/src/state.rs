//! Shared service state: one immutable corpus snapshot, swapped atomically.

use std::collections::HashMap;
use std::fs::File;
use std::io::BufReader;
use std::sync::{Arc, Mutex};

use arc_swap::ArcSwap;
use shadowlayout_core::record::read_corpus;
use shadowlayout_core::{compute_heatmap, CorpusIndex64, HeatmapGrid64, HeatmapMode, SlideLayout64};

use crate::config::ServiceConfig;
use crate::ServiceError;

/// Everything a request needs, consistent at one revision.
#[derive(Debug)]
pub struct Snapshot {
    pub index: CorpusIndex64,
    pub slides: HashMap<String, Arc<SlideLayout64>>,
    /// Indexed by [`mode_slot`]; `None` when the corpus is empty.
    pub heatmaps: Option<[HeatmapGrid64; 4]>,
    pub skipped: usize,
}

pub fn mode_slot(mode: HeatmapMode) -> usize {
    match mode {
        HeatmapMode::Title => 0,
        HeatmapMode::Text => 1,
        HeatmapMode::Figure => 2,
        HeatmapMode::All => 3,
    }
}

impl Snapshot {
    fn build(corpus: Vec<SlideLayout64>, config: &ServiceConfig, revision: u64) -> Result<Self, ServiceError> {
        let outcome = CorpusIndex64::build(&corpus, config.descriptor_g)?;
        let index = outcome.index.with_revision(revision);
        let heatmaps = if corpus.is_empty() {
            None
        } else {
            let grid = |m| compute_heatmap(&corpus, m, config.heatmap_g);
            Some([
                grid(HeatmapMode::Title)?,
                grid(HeatmapMode::Text)?,
                grid(HeatmapMode::Figure)?,
                grid(HeatmapMode::All)?,
            ])
        };
        let slides = corpus.into_iter().map(|l| (l.id.clone(), Arc::new(l))).collect();
        Ok(Self {
            index,
            slides,
            heatmaps,
            skipped: outcome.skipped,
        })
    }

    pub fn revision(&self) -> u64 {
        self.index.revision()
    }

    pub fn heatmap(&self, mode: HeatmapMode) -> Option<&HeatmapGrid64> {
        self.heatmaps.as_ref().map(|h| &h[mode_slot(mode)])
    }
}

/// Config plus the current snapshot. Readers load the snapshot pointer once
/// per request and never wait on a reload.
pub struct AppState {
    config: ServiceConfig,
    snapshot: ArcSwap<Snapshot>,
    reload: Mutex<()>,
}

impl AppState {
    /// Reads the corpus file named in the config and builds revision 1.
    pub fn load(config: ServiceConfig) -> Result<Self, ServiceError> {
        config.validate()?;
        let corpus = read_corpus_file(&config)?;
        Self::with_corpus(config, corpus)
    }

    pub fn with_corpus(config: ServiceConfig, corpus: Vec<SlideLayout64>) -> Result<Self, ServiceError> {
        let snapshot = Snapshot::build(corpus, &config, 1)?;
        Ok(Self {
            config,
            snapshot: ArcSwap::from_pointee(snapshot),
            reload: Mutex::new(()),
        })
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    pub fn snapshot(&self) -> Arc<Snapshot> {
        self.snapshot.load_full()
    }

    /// Re-reads the corpus file and publishes a new snapshot. On failure the
    /// current snapshot stays in place.
    pub fn reload(&self) -> Result<Arc<Snapshot>, ServiceError> {
        let corpus = read_corpus_file(&self.config)?;
        self.replace_corpus(corpus)
    }

    /// Publishes a snapshot built from `corpus` at the next revision.
    pub fn replace_corpus(&self, corpus: Vec<SlideLayout64>) -> Result<Arc<Snapshot>, ServiceError> {
        let _guard = self.reload.lock().unwrap_or_else(|e| e.into_inner());
        let next = self.snapshot.load().revision() + 1;
        let snapshot = Arc::new(Snapshot::build(corpus, &self.config, next)?);
        self.snapshot.store(Arc::clone(&snapshot));
        Ok(snapshot)
    }

    /// Adds or replaces one layout, publishing the next revision.
    pub fn upsert(&self, layout: SlideLayout64) -> Result<Arc<Snapshot>, ServiceError> {
        let _guard = self.reload.lock().unwrap_or_else(|e| e.into_inner());
        let current = self.snapshot.load_full();
        let mut corpus: Vec<SlideLayout64> = current.slides.values().map(|l| (**l).clone()).collect();
        corpus.retain(|l| l.id != layout.id);
        corpus.push(layout);
        corpus.sort_by(|a, b| a.id.cmp(&b.id));
        let snapshot = Arc::new(Snapshot::build(corpus, &self.config, current.revision() + 1)?);
        self.snapshot.store(Arc::clone(&snapshot));
        Ok(snapshot)
    }
}

fn read_corpus_file(config: &ServiceConfig) -> Result<Vec<SlideLayout64>, ServiceError> {
    let file = File::open(&config.corpus)
        .map_err(|e| ServiceError::Config(format!("{}: {e}", config.corpus.display())))?;
    Ok(read_corpus(BufReader::new(file))?)
}
