//! File formats: line-delimited correspondence JSON, the ground-truth scene
//! file, and the candidate file with decimal residues and digit strings.
//!
//! Correspondence coordinates are plain integers before any reduction;
//! residue reduction happens at load time against the requested precision.

use crate::scene::{ImagePair, Scene};
use dyadic_core::pose::{EssentialCandidate, ResidueMat3, Seed, SolveMethod};
use dyadic_core::TruncatedPadic;
use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("malformed input: {0}")]
    Malformed(String),
}

fn malformed(msg: impl Into<String>) -> FileError {
    FileError::Malformed(msg.into())
}

/// One correspondence line: `{"u":[..3 ints..],"v":[..3 ints..]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrespondenceLine {
    pub u: [i128; 3],
    pub v: [i128; 3],
}

pub fn write_correspondences(corrs: &[ImagePair]) -> Result<String, FileError> {
    let mut out = String::new();
    for (u, v) in corrs {
        let as_i128 = |c: &BigInt| -> Result<i128, FileError> {
            i128::try_from(c.clone())
                .map_err(|_| malformed("coordinate exceeds the i128 wire format"))
        };
        let line = CorrespondenceLine {
            u: [as_i128(&u[0])?, as_i128(&u[1])?, as_i128(&u[2])?],
            v: [as_i128(&v[0])?, as_i128(&v[1])?, as_i128(&v[2])?],
        };
        out.push_str(&serde_json::to_string(&line).expect("serializable"));
        out.push('\n');
    }
    Ok(out)
}

pub fn parse_correspondences(text: &str) -> Result<Vec<ImagePair>, FileError> {
    let mut corrs = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parsed: CorrespondenceLine = serde_json::from_str(line)
            .map_err(|e| malformed(format!("correspondence line {}: {e}", idx + 1)))?;
        corrs.push((parsed.u.map(BigInt::from), parsed.v.map(BigInt::from)));
    }
    Ok(corrs)
}

/// The ground-truth file for a generated scene.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthFile {
    pub seed: u64,
    pub quaternion: [i64; 4],
    pub translation: [i64; 3],
    /// Row-major numerator of the essential matrix; the true matrix is this
    /// over `denominator`.
    pub e_numerator: [i64; 9],
    pub denominator: i64,
    pub points: Vec<[i64; 4]>,
}

impl From<&Scene> for TruthFile {
    fn from(scene: &Scene) -> Self {
        Self {
            seed: scene.seed,
            quaternion: scene.quaternion,
            translation: scene.translation,
            e_numerator: scene.e_numerator,
            denominator: scene.denominator,
            points: scene.points.clone(),
        }
    }
}

pub fn parse_truth(text: &str) -> Result<TruthFile, FileError> {
    serde_json::from_str(text).map_err(|e| malformed(format!("truth file: {e}")))
}

/// Serialized candidate: everything needed to re-verify independently.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateRecord {
    /// Decimal residues modulo `2^precision`, row-major.
    pub e_residues: [String; 9],
    /// Digit-string serialization of each entry, least significant first.
    pub e_digits: [String; 9],
    pub seed: SeedRecord,
    pub iterations: u32,
    pub witness_minor: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum SeedRecord {
    #[serde(rename = "8pt")]
    EightPoint { nullspace: Vec<u8> },
    #[serde(rename = "7pt")]
    SevenPoint { root: u8, condition: String },
    #[serde(rename = "5pt")]
    FivePoint {
        z: u8,
        x: u8,
        y: u8,
        subsystem: [usize; 2],
    },
}

impl From<&Seed> for SeedRecord {
    fn from(seed: &Seed) -> Self {
        match seed {
            Seed::EightPoint { nullspace } => SeedRecord::EightPoint {
                nullspace: nullspace.clone(),
            },
            Seed::SevenPoint { root, condition } => SeedRecord::SevenPoint {
                root: *root,
                condition: condition.as_str().to_string(),
            },
            Seed::FivePoint { z, x, y, subsystem } => SeedRecord::FivePoint {
                z: *z,
                x: *x,
                y: *y,
                subsystem: [subsystem.0, subsystem.1],
            },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateFile {
    pub method: String,
    pub precision: u32,
    pub candidates: Vec<CandidateRecord>,
}

impl CandidateFile {
    pub fn from_candidates(
        method: SolveMethod,
        precision: u32,
        candidates: &[EssentialCandidate],
    ) -> Self {
        let records = candidates
            .iter()
            .map(|c| CandidateRecord {
                e_residues: entry_array(&c.matrix, |t| t.residue().to_string()),
                e_digits: entry_array(&c.matrix, TruncatedPadic::to_digit_string),
                seed: SeedRecord::from(&c.seed),
                iterations: c.iterations,
                witness_minor: c.witness_minor,
            })
            .collect();
        Self {
            method: method.as_str().to_string(),
            precision,
            candidates: records,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn entry_array(m: &ResidueMat3, f: impl Fn(&TruncatedPadic) -> String) -> [String; 9] {
    let v: Vec<String> = m.entries().iter().map(f).collect();
    v.try_into().expect("nine entries")
}

pub fn parse_candidates(text: &str) -> Result<CandidateFile, FileError> {
    serde_json::from_str(text).map_err(|e| malformed(format!("candidate file: {e}")))
}

impl CandidateRecord {
    /// Rebuilds the residue matrix at the file's precision.
    pub fn matrix(&self, precision: u32) -> Result<ResidueMat3, FileError> {
        let mut entries = Vec::with_capacity(9);
        for s in &self.e_residues {
            let r = BigUint::from_str(s).map_err(|_| malformed(format!("bad residue {s:?}")))?;
            entries.push(r);
        }
        Ok(ResidueMat3::from_residue_vec(&entries, precision))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{gen_scene, SceneParams};

    #[test]
    fn correspondence_round_trip() {
        let scene = gen_scene(5, &SceneParams::default());
        let text = write_correspondences(&scene.correspondences).unwrap();
        let parsed = parse_correspondences(&text).unwrap();
        assert_eq!(parsed, scene.correspondences);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(parse_correspondences("{\"u\":[1,2],\"v\":[1,2,3]}").is_err());
        assert!(parse_correspondences("not json").is_err());
    }

    #[test]
    fn truth_file_round_trip() {
        let scene = gen_scene(11, &SceneParams::default());
        let truth = TruthFile::from(&scene);
        let text = serde_json::to_string_pretty(&truth).unwrap();
        let parsed = parse_truth(&text).unwrap();
        assert_eq!(parsed.e_numerator, scene.e_numerator);
        assert_eq!(parsed.denominator, scene.denominator);
    }

    #[test]
    fn candidate_matrix_round_trip() {
        let n = 16;
        let m = ResidueMat3::from_integers(&[0, 0, 0, 2, -2, 1, 2, 1, -2], n);
        let record = CandidateRecord {
            e_residues: entry_array(&m, |t| t.residue().to_string()),
            e_digits: entry_array(&m, TruncatedPadic::to_digit_string),
            seed: SeedRecord::EightPoint {
                nullspace: vec![0; 9],
            },
            iterations: n - 1,
            witness_minor: Some(0),
        };
        assert_eq!(record.matrix(n).unwrap(), m);
    }
}
