//! Integer weight scalars and saturating path distances.

use std::cmp::Ordering;
use std::fmt::{self, Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_traits::{CheckedAdd, CheckedMul, NumCast, PrimInt, Unsigned};

/// Edge weight / path length scalar.
///
/// Weights are positive integers; the maximal value of the type is reserved
/// as the infinity sentinel. Blanket-implemented for the unsigned primitives.
pub trait Weight:
    PrimInt + Unsigned + CheckedAdd + CheckedMul + Hash + Debug + Display + FromStr + Send + Sync + 'static
{
    /// Lossless widening into a message word.
    fn to_word(self) -> u64 {
        self.to_u64().expect("weight exceeds a 64-bit word")
    }

    /// Narrowing from a message word; `None` if it does not fit.
    fn from_word(word: u64) -> Option<Self> {
        <Self as NumCast>::from(word)
    }
}

impl<T> Weight for T where
    T: PrimInt + Unsigned + CheckedAdd + CheckedMul + Hash + Debug + Display + FromStr + Send + Sync + 'static
{
}

/// Word used on the wire for an infinite distance.
pub const INF_WORD: u64 = u64::MAX;

/// A path weight, or infinity when no path exists.
///
/// Addition saturates at infinity. Legal finite values never reach the
/// reserved maximum because graph construction bounds `n * W_max`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Distance<W>(W);

impl<W: Weight> Distance<W> {
    pub fn infinity() -> Self {
        Distance(W::max_value())
    }

    pub fn zero() -> Self {
        Distance(W::zero())
    }

    /// Panics if `value` collides with the infinity sentinel.
    pub fn finite(value: W) -> Self {
        assert!(value != W::max_value(), "finite distance collides with the infinity sentinel");
        Distance(value)
    }

    pub fn is_infinite(self) -> bool {
        self.0 == W::max_value()
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }

    pub fn value(self) -> Option<W> {
        if self.is_infinite() {
            None
        } else {
            Some(self.0)
        }
    }

    /// Saturating path extension.
    pub fn plus(self, other: Self) -> Self {
        if self.is_infinite() || other.is_infinite() {
            return Self::infinity();
        }
        match self.0.checked_add(&other.0) {
            Some(s) if s != W::max_value() => Distance(s),
            _ => Self::infinity(),
        }
    }

    pub fn plus_weight(self, w: W) -> Self {
        self.plus(Distance::finite(w))
    }

    pub fn to_word(self) -> u64 {
        match self.value() {
            Some(v) => v.to_word(),
            None => INF_WORD,
        }
    }

    /// Inverse of [`Distance::to_word`]; words that do not fit `W` decode as infinity.
    pub fn from_word(word: u64) -> Self {
        if word == INF_WORD {
            return Self::infinity();
        }
        match W::from_word(word) {
            Some(v) if v != W::max_value() => Distance(v),
            _ => Self::infinity(),
        }
    }
}

impl<W: Weight> Default for Distance<W> {
    fn default() -> Self {
        Self::infinity()
    }
}

impl<W: Weight> PartialOrd for Distance<W> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<W: Weight> Ord for Distance<W> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.cmp(&other.0)
    }
}

impl<W: Weight> Display for Distance<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("INF"),
        }
    }
}

impl<W: Weight> Debug for Distance<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Display::fmt(self, f)
    }
}

/// `n * w_max` must stay strictly below the sentinel for every finite distance to be representable.
pub(crate) fn fits_distance_range<W: Weight>(n: usize, w_max: W) -> bool {
    let Some(n_w) = <W as NumCast>::from(n) else {
        return false;
    };
    match n_w.checked_mul(&w_max) {
        Some(bound) => bound < W::max_value(),
        None => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn addition_saturates() {
        let inf = Distance::<u32>::infinity();
        assert_eq!(inf.plus(Distance::finite(3)), inf);
        assert_eq!(Distance::finite(4u32).plus(Distance::finite(6)), Distance::finite(10));
        assert!(Distance::finite(u32::MAX - 1).plus_weight(1).is_infinite());
    }

    #[test]
    fn word_encoding_reserves_infinity() {
        assert_eq!(Distance::<u64>::infinity().to_word(), INF_WORD);
        assert_eq!(Distance::<u16>::infinity().to_word(), INF_WORD);
        assert_eq!(Distance::<u16>::from_word(INF_WORD), Distance::infinity());
        assert_eq!(Distance::<u16>::from_word(77), Distance::finite(77));
        assert!(Distance::<u16>::from_word(1 << 20).is_infinite());
    }

    #[test]
    fn ordering_places_infinity_last() {
        let mut v = vec![Distance::<u64>::infinity(), Distance::finite(3), Distance::zero()];
        v.sort();
        assert_eq!(v, vec![Distance::zero(), Distance::finite(3), Distance::infinity()]);
        assert_eq!(format!("{}", v[2]), "INF");
    }

    #[test]
    fn distance_range_check() {
        assert!(fits_distance_range::<u64>(128, 128 * 128));
        assert!(!fits_distance_range::<u8>(16, 16));
        assert!(fits_distance_range::<u8>(15, 16));
    }
}
