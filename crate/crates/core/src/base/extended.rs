use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// A real number or ±∞, never NaN.
///
/// Grid carriers store raw `f64` for speed; this type is the checked view used
/// at API boundaries and for arithmetic where an indeterminate form must be an
/// error rather than a silent NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtendedValue(f64);

impl ExtendedValue {
    pub const INFINITY: ExtendedValue = ExtendedValue(f64::INFINITY);
    pub const NEG_INFINITY: ExtendedValue = ExtendedValue(f64::NEG_INFINITY);
    pub const ZERO: ExtendedValue = ExtendedValue(0.0);

    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::NotANumber("extended value"))
        } else {
            Ok(ExtendedValue(v))
        }
    }

    pub fn finite(v: f64) -> Result<Self> {
        if v.is_finite() {
            Ok(ExtendedValue(v))
        } else {
            Err(Error::InvalidArgument(format!("{v} is not finite")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    pub fn is_pos_inf(self) -> bool {
        self.0 == f64::INFINITY
    }

    /// Sum with +∞ absorbing finite values; `+∞ + −∞` is an error.
    pub fn checked_add(self, other: ExtendedValue) -> Result<ExtendedValue> {
        let s = self.0 + other.0;
        if s.is_nan() {
            Err(Error::NotANumber("+inf + -inf"))
        } else {
            Ok(ExtendedValue(s))
        }
    }

    pub fn min(self, other: ExtendedValue) -> ExtendedValue {
        if self.0 <= other.0 {
            self
        } else {
            other
        }
    }

    pub fn max(self, other: ExtendedValue) -> ExtendedValue {
        if self.0 >= other.0 {
            self
        } else {
            other
        }
    }

    /// Minimum of a sequence; `None` for an empty sequence.
    pub fn min_of<I: IntoIterator<Item = ExtendedValue>>(iter: I) -> Option<ExtendedValue> {
        iter.into_iter().reduce(ExtendedValue::min)
    }
}

impl Eq for ExtendedValue {}

impl PartialOrd for ExtendedValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtendedValue {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.partial_cmp(&other.0).expect("ExtendedValue is never NaN")
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0 == f64::INFINITY {
            write!(f, "inf")
        } else if self.0 == f64::NEG_INFINITY {
            write!(f, "-inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl TryFrom<f64> for ExtendedValue {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        ExtendedValue::new(v)
    }
}

impl From<ExtendedValue> for f64 {
    fn from(v: ExtendedValue) -> f64 {
        v.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn infinity_absorbs_finite_addition() {
        let inf = ExtendedValue::INFINITY;
        let x = ExtendedValue::finite(3.5).unwrap();
        assert_eq!(inf.checked_add(x).unwrap(), inf);
        assert_eq!(inf.min(x), x);
    }

    #[test]
    fn indeterminate_sum_is_an_error() {
        assert!(ExtendedValue::INFINITY
            .checked_add(ExtendedValue::NEG_INFINITY)
            .is_err());
        assert!(ExtendedValue::new(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn min_over_sequence_with_a_finite_entry_is_finite(
            vals in proptest::collection::vec(prop_oneof![
                (-1e6f64..1e6).prop_map(Some),
                Just(None),
            ], 1..40),
            pos in 0usize..40,
            anchor in -1e6f64..1e6,
        ) {
            let mut seq: Vec<ExtendedValue> = vals
                .iter()
                .map(|v| match v {
                    Some(x) => ExtendedValue::finite(*x).unwrap(),
                    None => ExtendedValue::INFINITY,
                })
                .collect();
            let at = pos % (seq.len() + 1);
            seq.insert(at, ExtendedValue::finite(anchor).unwrap());
            let m = ExtendedValue::min_of(seq).unwrap();
            prop_assert!(m.is_finite());
            prop_assert!(m.get() <= anchor);
        }
    }
}
