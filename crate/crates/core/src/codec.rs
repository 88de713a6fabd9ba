//! Quantization of coverage vectors and their positional integer encoding.
//!
//! Each coverage rate collapses to one of three states (untouched, partial,
//! complete). Up to three states pack into a six-digit decimal codeword,
//! two digits per position: `00`, `05` or `10`. So `(1/2, 1/2, 0)` encodes
//! as `50500` (zero-padded `050500`) and `(1, 1, 1)` as `101010`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::Ccm;
use crate::rate::Rate;

/// Positions available in one codeword.
pub const MAX_ARITY: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum CoverageState {
    Untouched,
    Partial,
    Complete,
}

impl CoverageState {
    pub const ALL: [CoverageState; 3] = [CoverageState::Untouched, CoverageState::Partial, CoverageState::Complete];

    pub fn as_rate(self) -> Rate {
        match self {
            CoverageState::Untouched => Rate::from_integer(0),
            CoverageState::Partial => Rate::new(1, 2),
            CoverageState::Complete => Rate::from_integer(1),
        }
    }

    /// Two-digit group written for this state.
    fn digits(self) -> u32 {
        match self {
            CoverageState::Untouched => 0,
            CoverageState::Partial => 5,
            CoverageState::Complete => 10,
        }
    }

    fn from_digits(pair: u32) -> Option<Self> {
        match pair {
            0 => Some(CoverageState::Untouched),
            5 => Some(CoverageState::Partial),
            10 => Some(CoverageState::Complete),
            _ => None,
        }
    }
}

impl fmt::Display for CoverageState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CoverageState::Untouched => "0",
            CoverageState::Partial => "1/2",
            CoverageState::Complete => "1",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodecError {
    #[error("coverage {0} is outside [0, 1]")]
    OutOfRange(Rate),
    #[error("{0} components do not fit in one codeword (max {MAX_ARITY})")]
    TooManyComponents(usize),
    #[error("arity {0} is not in 1..={MAX_ARITY}")]
    InvalidArity(usize),
    #[error("{value} is not a valid codeword: {reason}")]
    InvalidCodeword { value: u32, reason: String },
}

pub fn quantize(x: Rate) -> Result<CoverageState, CodecError> {
    let one = Rate::from_integer(1);
    if x > one {
        return Err(CodecError::OutOfRange(x));
    }
    Ok(if x == one {
        CoverageState::Complete
    } else if *x.numer() == 0 {
        CoverageState::Untouched
    } else {
        CoverageState::Partial
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct QuantizedCcm(pub Vec<CoverageState>);

impl QuantizedCcm {
    pub fn arity(&self) -> usize {
        self.0.len()
    }
}

impl fmt::Display for QuantizedCcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str(")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EncodedCcm(pub u32);

impl fmt::Display for EncodedCcm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn quantize_ccm(ccm: &Ccm) -> Result<QuantizedCcm, CodecError> {
    ccm.0.iter().map(|x| quantize(*x)).collect::<Result<_, _>>().map(QuantizedCcm)
}

pub fn encode_ccm(q: &QuantizedCcm) -> Result<EncodedCcm, CodecError> {
    if q.arity() > MAX_ARITY {
        return Err(CodecError::TooManyComponents(q.arity()));
    }
    // position j (1-based) sits at 10^(7-2j); the digit pair is 10x the state
    let value = q
        .0
        .iter()
        .enumerate()
        .map(|(j, s)| s.digits() * 10u32.pow((2 * (MAX_ARITY - 1 - j)) as u32))
        .sum();
    Ok(EncodedCcm(value))
}

/// Exact inverse of [`encode_ccm`] for a known arity. Positions beyond the
/// arity must be `00`.
pub fn decode_ccm(e: EncodedCcm, arity: usize) -> Result<QuantizedCcm, CodecError> {
    if !(1..=MAX_ARITY).contains(&arity) {
        return Err(CodecError::InvalidArity(arity));
    }
    let invalid = |reason: String| CodecError::InvalidCodeword { value: e.0, reason };
    if e.0 > 999_999 {
        return Err(invalid("more than six digits".into()));
    }
    let digits = format!("{:06}", e.0);
    let mut states = Vec::with_capacity(arity);
    for j in 0..MAX_ARITY {
        let pair: u32 = digits[2 * j..2 * j + 2].parse().expect("ascii digits");
        let state = CoverageState::from_digits(pair)
            .ok_or_else(|| invalid(format!("digit pair `{}` is not 00, 05 or 10", &digits[2 * j..2 * j + 2])))?;
        if j < arity {
            states.push(state);
        } else if state != CoverageState::Untouched {
            return Err(invalid(format!("position {} is set but arity is {arity}", j + 1)));
        }
    }
    Ok(QuantizedCcm(states))
}

/// Quantizes and encodes every vector, then collapses consecutive repeats
/// so the result records only state changes.
pub fn encode_sequence(ccms: &[Ccm]) -> Result<Vec<EncodedCcm>, CodecError> {
    let mut out: Vec<EncodedCcm> = Vec::new();
    for ccm in ccms {
        let code = encode_ccm(&quantize_ccm(ccm)?)?;
        if out.last() != Some(&code) {
            out.push(code);
        }
    }
    Ok(out)
}

pub fn decode_sequence(codes: &[EncodedCcm], arity: usize) -> Result<Vec<QuantizedCcm>, CodecError> {
    codes.iter().map(|c| decode_ccm(*c, arity)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use CoverageState::*;

    fn q(states: &[CoverageState]) -> QuantizedCcm {
        QuantizedCcm(states.to_vec())
    }

    fn ccm(values: &[(u64, u64)]) -> Ccm {
        Ccm(values.iter().map(|(n, d)| Rate::new(*n, *d)).collect())
    }

    #[test]
    fn quantize_cases() {
        assert_eq!(quantize(Rate::from_integer(0)).unwrap(), Untouched);
        assert_eq!(quantize(Rate::from_integer(1)).unwrap(), Complete);
        assert_eq!(quantize(Rate::new(3, 5)).unwrap(), Partial);
        assert_eq!(quantize(Rate::new(999_999, 1_000_000)).unwrap(), Partial);
        assert_eq!(quantize(Rate::new(1, 1_000_000)).unwrap(), Partial);
        assert!(matches!(quantize(Rate::new(6, 5)), Err(CodecError::OutOfRange(_))));
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_ccm(&q(&[Partial, Partial, Untouched])).unwrap(), EncodedCcm(50500));
        assert_eq!(encode_ccm(&q(&[Untouched; 3])).unwrap(), EncodedCcm(0));
        assert_eq!(encode_ccm(&q(&[Complete; 3])).unwrap(), EncodedCcm(101010));
        assert_eq!(encode_ccm(&q(&[Complete])).unwrap(), EncodedCcm(100000));
        assert_eq!(encode_ccm(&q(&[Untouched, Partial])).unwrap(), EncodedCcm(500));
        assert!(matches!(
            encode_ccm(&q(&[Untouched; 4])),
            Err(CodecError::TooManyComponents(4))
        ));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_ccm(EncodedCcm(50500), 3).unwrap(), q(&[Partial, Partial, Untouched]));
        assert_eq!(decode_ccm(EncodedCcm(0), 3).unwrap(), q(&[Untouched; 3]));
        assert_eq!(decode_ccm(EncodedCcm(100000), 1).unwrap(), q(&[Complete]));
        assert!(matches!(decode_ccm(EncodedCcm(123456), 3), Err(CodecError::InvalidCodeword { .. })));
        assert!(matches!(decode_ccm(EncodedCcm(1_010_100), 3), Err(CodecError::InvalidCodeword { .. })));
        assert!(matches!(decode_ccm(EncodedCcm(50500), 1), Err(CodecError::InvalidCodeword { .. })));
        assert!(matches!(decode_ccm(EncodedCcm(0), 0), Err(CodecError::InvalidArity(0))));
        assert!(matches!(decode_ccm(EncodedCcm(0), 4), Err(CodecError::InvalidArity(4))));
    }

    #[test]
    fn all_triples_round_trip() {
        let mut seen = std::collections::BTreeSet::new();
        for a in CoverageState::ALL {
            for b in CoverageState::ALL {
                for c in CoverageState::ALL {
                    let v = q(&[a, b, c]);
                    let code = encode_ccm(&v).unwrap();
                    assert!(seen.insert(code), "codeword {code} reused");
                    assert_eq!(decode_ccm(code, 3).unwrap(), v);
                    assert_eq!(encode_ccm(&decode_ccm(code, 3).unwrap()).unwrap(), code);
                }
            }
        }
        assert_eq!(seen.len(), 27);
    }

    #[test]
    fn sequence_encoding_collapses_plateaus() {
        let s = vec![ccm(&[(0, 1), (0, 1), (0, 1)]), ccm(&[(1, 6), (0, 1), (0, 1)]), ccm(&[(1, 2), (0, 1), (0, 1)])];
        assert_eq!(encode_sequence(&s).unwrap(), vec![EncodedCcm(0), EncodedCcm(50000)]);
        assert!(encode_sequence(&[]).unwrap().is_empty());
        let done = vec![ccm(&[(1, 2), (0, 1), (0, 1)]), ccm(&[(1, 1), (1, 1), (1, 1)])];
        assert_eq!(encode_sequence(&done).unwrap().last(), Some(&EncodedCcm(101010)));
    }

    #[test]
    fn decode_sequence_is_elementwise() {
        let out = decode_sequence(&[EncodedCcm(0), EncodedCcm(100500)], 3).unwrap();
        assert_eq!(out, vec![q(&[Untouched; 3]), q(&[Complete, Partial, Untouched])]);
    }
}
