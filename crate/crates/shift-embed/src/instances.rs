//! Small shifts and channels used in examples, tests and benchmarks.

use crate::codes::BlockMap;
use crate::shift_core::{from_forbidden, Alphabet, ForbiddenWordSet, Presentation};

/// Binary sequences with no two adjacent 1s.
pub fn golden_mean() -> Presentation {
    forbidding(&["11"])
}

/// Binary sequences whose 0-runs between 1s have even length.
pub fn even_shift() -> Presentation {
    Presentation::from_triples(&["0", "1"], &[("a", "a", "1"), ("a", "b", "0"), ("b", "a", "0")])
        .expect("valid presentation")
}

/// Binary sequences whose 0-runs between 1s have odd length.
pub fn odd_shift() -> Presentation {
    Presentation::from_triples(&["0", "1"], &[("a", "b", "0"), ("b", "a", "0"), ("b", "a", "1")])
        .expect("valid presentation")
}

/// Binary sequences avoiding the word `10`: a ray of 0s followed by a ray of 1s.
pub fn no_descent() -> Presentation {
    forbidding(&["10"])
}

/// The single point `0^∞`.
pub fn fixed_point() -> Presentation {
    Presentation::full_shift(1)
}

/// The points `0^∞` and `1^∞`.
pub fn two_fixed_points() -> Presentation {
    forbidding(&["01", "10"])
}

fn forbidding(words: &[&str]) -> Presentation {
    from_forbidden(&ForbiddenWordSet::parse(Alphabet::digits(2), words).expect("valid words")).expect("nonempty shift")
}

/// Full 3-shift onto the full 2-shift merging symbols 1 and 2.
pub fn ti_channel() -> (Presentation, BlockMap) {
    let x = Presentation::full_shift(3);
    let y = Alphabet::new(["a", "b"]).expect("valid alphabet");
    let pi = BlockMap::relabeling(x.alphabet(), &y, &[("0", "a"), ("1", "b"), ("2", "b")]).expect("valid relabeling");
    (x, pi)
}

/// Golden-mean edge shift labeled onto the even shift.
pub fn even_labeling() -> (Presentation, BlockMap) {
    let x = Presentation::from_triples(&["l", "p", "q"], &[("u", "u", "l"), ("u", "v", "p"), ("v", "u", "q")])
        .expect("valid presentation");
    let pi = BlockMap::relabeling(x.alphabet(), &Alphabet::digits(2), &[("l", "1"), ("p", "0"), ("q", "0")])
        .expect("valid relabeling");
    (x, pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Budget;
    use crate::shift_core::count_blocks;

    #[test]
    fn block_counts() {
        let b = Budget::default();
        assert_eq!(count_blocks(&golden_mean(), 5, &b).unwrap(), vec![1, 2, 3, 5, 8, 13]);
        assert_eq!(count_blocks(&no_descent(), 5, &b).unwrap(), vec![1, 2, 3, 4, 5, 6]);
        assert_eq!(count_blocks(&two_fixed_points(), 3, &b).unwrap(), vec![1, 2, 2, 2]);
        assert_eq!(count_blocks(&odd_shift(), 3, &b).unwrap()[3], 5);
    }
}
