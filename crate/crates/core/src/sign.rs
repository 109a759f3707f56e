use serde::{Deserialize, Serialize};

/// A coefficient sign `±1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl Sign {
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// Sign of `x`, with `+` for zero.
    #[inline]
    pub fn of(x: f64) -> Self {
        if x < 0.0 {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    /// The sign pattern encoded by the low bits of `mask` (bit set = `-`).
    pub fn pattern(len: usize, mask: u64) -> Vec<Sign> {
        (0..len).map(|k| if mask >> k & 1 == 1 { Sign::Minus } else { Sign::Plus }).collect()
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}
