//! Passive-security statistics: the exchanged bits of honest runs carry no
//! information about the inputs.
//!
//! All a passive observer sees of the quantum computation is the commitment
//! traffic, and the two bits it carries per round come from Bell
//! measurements on halves of maximally entangled pairs, uniformly
//! distributed whatever the inputs. The analyzer takes transcripts grouped
//! by input class, builds the per-class empirical distribution of exchanged
//! bit pairs, and flags any pair of classes whose total-variation distance
//! exceeds the threshold.

use serde::Serialize;

use super::AttackError;
use crate::commitment::{SwapBody, SwapMessage};
use crate::protocol::{EventKind, Transcript};

/// Empirical exchanged-bit statistics for one input class.
#[derive(Clone, Debug, Serialize)]
pub struct ClassStats {
    pub label: String,
    pub samples: usize,
    /// Joint distribution of `(x, z)` pairs, indexed `x·2 + z`.
    pub joint: [f64; 4],
}

/// Analyzer output.
#[derive(Clone, Debug, Serialize)]
pub struct PassiveReport {
    pub classes: Vec<ClassStats>,
    /// `(label a, label b, total variation distance)` for every class pair.
    pub pairwise: Vec<(String, String, f64)>,
    pub threshold: f64,
    /// True when some pair exceeds the threshold.
    pub flagged: bool,
}

impl PassiveReport {
    pub fn max_distance(&self) -> f64 {
        self.pairwise.iter().map(|(_, _, d)| *d).fold(0.0, f64::max)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data serializes")
    }
}

/// Extracts the exchanged bit pairs of a transcript, one `(x, z)` pair per
/// nonlocal round, from the opened commitments in order.
pub fn exchanged_bits(transcript: &Transcript) -> Vec<(u8, u8)> {
    let mut opens = Vec::new();
    for event in transcript.events() {
        if let EventKind::Commitment { payload, .. } = &event.kind {
            if let Some(SwapMessage {
                body: SwapBody::Open(opening),
                ..
            }) = SwapMessage::from_bytes(payload)
            {
                opens.push(opening.bit);
            }
        }
    }
    opens
        .chunks_exact(2)
        .map(|pair| (pair[0], pair[1]))
        .collect()
}

/// Builds per-class distributions of exchanged bits and their pairwise
/// total-variation distances. Every class needs at least `min_samples`
/// exchanged pairs; a single class yields a report with no comparisons.
pub fn analyze_passive(
    classes: &[(String, Vec<Transcript>)],
    threshold: f64,
    min_samples: usize,
) -> Result<PassiveReport, AttackError> {
    if classes.is_empty() {
        return Err(AttackError::TooFewClasses { got: 0 });
    }
    let mut stats = Vec::with_capacity(classes.len());
    for (label, transcripts) in classes {
        let mut counts = [0usize; 4];
        for t in transcripts {
            for (x, z) in exchanged_bits(t) {
                counts[(x as usize) * 2 + z as usize] += 1;
            }
        }
        let samples: usize = counts.iter().sum();
        if samples < min_samples {
            return Err(AttackError::InsufficientSamples {
                class: label.clone(),
                got: samples,
                want: min_samples,
            });
        }
        let mut joint = [0.0f64; 4];
        for (j, c) in joint.iter_mut().zip(counts.iter()) {
            *j = *c as f64 / samples as f64;
        }
        stats.push(ClassStats {
            label: label.clone(),
            samples,
            joint,
        });
    }

    let mut pairwise = Vec::new();
    for i in 0..stats.len() {
        for j in (i + 1)..stats.len() {
            let tv = 0.5
                * stats[i]
                    .joint
                    .iter()
                    .zip(stats[j].joint.iter())
                    .map(|(a, b)| (a - b).abs())
                    .sum::<f64>();
            pairwise.push((stats[i].label.clone(), stats[j].label.clone(), tv));
        }
    }
    let flagged = pairwise.iter().any(|(_, _, d)| *d > threshold);
    Ok(PassiveReport {
        classes: stats,
        pairwise,
        threshold,
        flagged,
    })
}

/// Builds a synthetic transcript whose opened bits are fixed: the leaky
/// counterexample used to show the analyzer is not vacuous.
pub fn synthetic_leaky_transcript(x: u8, z: u8, rng: &mut crate::rng::SimRng) -> Transcript {
    use crate::commitment::{commit, Nonce, Opening};
    use crate::protocol::Actor;
    use crate::PartyId;

    let mut t = Transcript::new();
    let nonce_a = Nonce::random(rng);
    let nonce_b = Nonce::random(rng);
    let msgs = [
        SwapMessage {
            sender: 0,
            body: SwapBody::Commit(commit(x, &nonce_a)),
        },
        SwapMessage {
            sender: 1,
            body: SwapBody::Commit(commit(z, &nonce_b)),
        },
        SwapMessage {
            sender: 0,
            body: SwapBody::Open(Opening {
                bit: x,
                nonce: nonce_a,
            }),
        },
        SwapMessage {
            sender: 1,
            body: SwapBody::Open(Opening {
                bit: z,
                nonce: nonce_b,
            }),
        },
    ];
    for msg in msgs {
        let (from, to) = if msg.sender == 0 { (0, 1) } else { (1, 0) };
        t.record(EventKind::Commitment {
            from: Actor::Party(PartyId(from)),
            to: Actor::Party(PartyId(to)),
            payload: msg.to_bytes(),
        });
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn leaky_classes_are_flagged() {
        let mut rng = seeded(81);
        let class_a: Vec<Transcript> = (0..1200)
            .map(|_| synthetic_leaky_transcript(0, 0, &mut rng))
            .collect();
        let class_b: Vec<Transcript> = (0..1200)
            .map(|_| synthetic_leaky_transcript(1, 0, &mut rng))
            .collect();
        let report = analyze_passive(
            &[("zero".to_string(), class_a), ("one".to_string(), class_b)],
            0.02,
            1000,
        )
        .unwrap();
        assert!(report.flagged);
        assert!((report.max_distance() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_class_reports_without_comparisons() {
        let mut rng = seeded(82);
        let class: Vec<Transcript> = (0..1000)
            .map(|_| synthetic_leaky_transcript(0, 1, &mut rng))
            .collect();
        let report = analyze_passive(&[("only".to_string(), class)], 0.02, 1000).unwrap();
        assert!(report.pairwise.is_empty());
        assert!(!report.flagged);
    }

    #[test]
    fn insufficient_samples_is_an_error() {
        let mut rng = seeded(83);
        let class: Vec<Transcript> = (0..10)
            .map(|_| synthetic_leaky_transcript(0, 1, &mut rng))
            .collect();
        let err = analyze_passive(&[("small".to_string(), class)], 0.02, 1000).unwrap_err();
        assert!(matches!(err, AttackError::InsufficientSamples { .. }));
    }
}
