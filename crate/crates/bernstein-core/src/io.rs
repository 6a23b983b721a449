//! JSON state file format.
//!
//! A state is stored as `{"n": N, "amps": [{"bits": "...", "re": x, "im": y}, ...]}`
//! where `bits` is an N-character label over `01` or `↑↓` (up = 0) and omitted
//! labels mean amplitude zero. The reader normalizes and reports whether the
//! stored amplitudes deviated from unit norm by more than 1e-9.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{StateVector, MAX_STATE_PARTICLES};

/// Renormalization threshold reported by the reader.
pub const RENORM_REPORT_TOL: f64 = 1e-9;

#[derive(Debug, Serialize, Deserialize)]
struct AmplitudeEntry {
    bits: String,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct StateFile {
    n: usize,
    amps: Vec<AmplitudeEntry>,
}

/// A state read from JSON plus whether the reader had to renormalize by more
/// than [`RENORM_REPORT_TOL`].
#[derive(Debug, Clone)]
pub struct LoadedState {
    pub state: StateVector,
    pub renormalized: bool,
}

/// Serialize a state; exact-zero amplitudes are omitted.
pub fn state_to_json(s: &StateVector) -> String {
    let n = s.n_particles();
    let amps = (0..s.dim())
        .filter(|&i| s.amplitude(i).norm_sqr() > 0.0)
        .map(|i| {
            let a = s.amplitude(i);
            let bits: String = (0..n)
                .map(|k| if (i >> (n - 1 - k)) & 1 == 0 { '0' } else { '1' })
                .collect();
            AmplitudeEntry {
                bits,
                re: a.re,
                im: a.im,
            }
        })
        .collect();
    serde_json::to_string_pretty(&StateFile { n, amps }).expect("state file serializes")
}

/// Parse a state file, normalizing the amplitudes.
pub fn state_from_json(json: &str) -> Result<LoadedState> {
    let file: StateFile =
        serde_json::from_str(json).map_err(|e| Error::StateFormat(e.to_string()))?;
    if file.n < 1 || file.n > MAX_STATE_PARTICLES {
        return Err(Error::StateFormat(format!(
            "n = {} outside 1..={}",
            file.n, MAX_STATE_PARTICLES
        )));
    }
    let dim = 1usize << file.n;
    let mut amps = vec![Complex64::new(0.0, 0.0); dim];
    let mut seen = vec![false; dim];
    for entry in &file.amps {
        let idx = parse_bits(&entry.bits, file.n)?;
        if seen[idx] {
            return Err(Error::StateFormat(format!(
                "duplicate basis label {:?}",
                entry.bits
            )));
        }
        seen[idx] = true;
        if !entry.re.is_finite() || !entry.im.is_finite() {
            return Err(Error::StateFormat(format!(
                "non-finite amplitude on {:?}",
                entry.bits
            )));
        }
        amps[idx] = Complex64::new(entry.re, entry.im);
    }
    let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if norm_sqr <= 0.0 {
        return Err(Error::StateFormat("all amplitudes are zero".into()));
    }
    let renormalized = (norm_sqr.sqrt() - 1.0).abs() > RENORM_REPORT_TOL;
    let state = StateVector::from_amplitudes(file.n, amps)?;
    Ok(LoadedState {
        state,
        renormalized,
    })
}

fn parse_bits(bits: &str, n: usize) -> Result<usize> {
    let chars: Vec<char> = bits.chars().collect();
    if chars.len() != n {
        return Err(Error::StateFormat(format!(
            "basis label {:?} has {} characters, expected {}",
            bits,
            chars.len(),
            n
        )));
    }
    let mut idx = 0usize;
    for ch in chars {
        let bit = match ch {
            '0' | '↑' => 0,
            '1' | '↓' => 1,
            other => {
                return Err(Error::StateFormat(format!(
                    "basis label {:?} contains {:?}",
                    bits, other
                )))
            }
        };
        idx = (idx << 1) | bit;
    }
    Ok(idx)
}
