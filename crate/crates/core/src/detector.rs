//! Slide change detection over a stream of frame hashes.
//!
//! A slide is a run of consecutive frames whose neighbouring hashes differ
//! by at most the dedup threshold D and that lasts at least S frames. The
//! last frame of such a run is captured, after animations have settled.
//! Once a slide is on screen, only a frame further than T bits from it
//! starts looking for the next run; a captured run within D of any earlier
//! slide is a revisit and is not emitted again.

use crate::error::{Error, Result};
use crate::hash::FrameHash;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExtractorConfig {
    /// Bits a frame must differ from the current slide to start a transition.
    pub transition_threshold: u32,
    /// Consecutive stable frames needed before a slide is captured.
    pub stability_window: usize,
    /// Bits within which two frames count as the same picture.
    pub dedup_threshold: u32,
}

impl Default for ExtractorConfig {
    fn default() -> Self {
        Self {
            transition_threshold: 10,
            stability_window: 5,
            dedup_threshold: 4,
        }
    }
}

impl ExtractorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dedup_threshold > self.transition_threshold || self.transition_threshold > 64 {
            return Err(Error::Config(format!(
                "need 0 <= dedup ({}) <= threshold ({}) <= 64",
                self.dedup_threshold, self.transition_threshold
            )));
        }
        if self.stability_window == 0 {
            return Err(Error::Config("stability window must be at least 1".into()));
        }
        Ok(())
    }
}

/// A captured slide: its ordinal, the frame it was taken from, and the hash
/// of that frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Detection {
    pub index: usize,
    pub frame_number: usize,
    pub hash: FrameHash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    /// Waiting for a stable run (before the first slide, or after a transition).
    Seeking,
    /// A slide is on screen; watching for a frame far enough from it.
    Showing,
}

/// Incremental detector; feed hashes in frame order with [`push`], then call
/// [`finish`] to flush a run still open at the end of the stream.
///
/// [`push`]: SlideDetector::push
/// [`finish`]: SlideDetector::finish
#[derive(Debug, Clone)]
pub struct SlideDetector {
    config: ExtractorConfig,
    phase: Phase,
    emitted: Vec<FrameHash>,
    current: Option<FrameHash>,
    prev: Option<FrameHash>,
    run_len: usize,
    candidate: Option<(usize, FrameHash)>,
    next_frame: usize,
}

impl SlideDetector {
    pub fn new(config: ExtractorConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            phase: Phase::Seeking,
            emitted: Vec::new(),
            current: None,
            prev: None,
            run_len: 0,
            candidate: None,
            next_frame: 0,
        })
    }

    pub fn config(&self) -> &ExtractorConfig {
        &self.config
    }

    /// Number of frames consumed so far.
    pub fn frames_seen(&self) -> usize {
        self.next_frame
    }

    /// Consumes the next frame's hash. Returns a slide when this frame ends
    /// a stable run that qualifies as a new slide.
    pub fn push(&mut self, hash: FrameHash) -> Option<Detection> {
        let frame = self.next_frame;
        self.next_frame += 1;
        let prev = self.prev.replace(hash);
        let mut out = None;

        if self.phase == Phase::Seeking {
            if prev.is_some_and(|p| p.distance(hash) <= self.config.dedup_threshold) {
                self.run_len += 1;
                self.candidate = Some((frame, hash));
                return None;
            }
            out = self.close_run();
            if self.phase == Phase::Seeking {
                self.start_run(frame, hash);
                return out;
            }
        }

        let current = self.current.expect("a slide is showing");
        if current.distance(hash) > self.config.transition_threshold {
            self.phase = Phase::Seeking;
            self.start_run(frame, hash);
        }
        out
    }

    /// Flushes the open run at end of stream.
    pub fn finish(&mut self) -> Option<Detection> {
        if self.phase == Phase::Seeking {
            self.close_run()
        } else {
            None
        }
    }

    fn start_run(&mut self, frame: usize, hash: FrameHash) {
        self.run_len = 1;
        self.candidate = Some((frame, hash));
    }

    fn close_run(&mut self) -> Option<Detection> {
        let candidate = self.candidate.take();
        let long_enough = self.run_len >= self.config.stability_window;
        self.run_len = 0;
        let (frame_number, hash) = candidate.filter(|_| long_enough)?;
        self.phase = Phase::Showing;
        let d = self.config.dedup_threshold;
        if let Some(&seen) = self.emitted.iter().find(|e| e.distance(hash) <= d) {
            self.current = Some(seen);
            return None;
        }
        self.current = Some(hash);
        self.emitted.push(hash);
        Some(Detection {
            index: self.emitted.len() - 1,
            frame_number,
            hash,
        })
    }
}

/// Runs the detector over a whole hash sequence.
pub fn detect_slides<I>(hashes: I, config: ExtractorConfig) -> Result<Vec<Detection>>
where
    I: IntoIterator<Item = FrameHash>,
{
    let mut detector = SlideDetector::new(config)?;
    let mut out: Vec<Detection> = hashes.into_iter().filter_map(|h| detector.push(h)).collect();
    if detector.frames_seen() == 0 {
        return Err(Error::NoFrames);
    }
    out.extend(detector.finish());
    Ok(out)
}
