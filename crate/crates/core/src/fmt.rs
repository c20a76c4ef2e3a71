//! Number formatting for text exports.

/// Shortest decimal string that parses back to exactly `x`.
///
/// Plain notation inside `[1e-5, 1e16)`, scientific outside it, so no output
/// ever carries long runs of padding zeros.
pub fn fmt_f64(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn formats_common_values() {
        assert_eq!(fmt_f64(0.0), "0");
        assert_eq!(fmt_f64(0.1), "0.1");
        assert_eq!(fmt_f64(2.0), "2");
        assert_eq!(fmt_f64(1e-8), "1e-8");
        assert_eq!(fmt_f64(1e8), "100000000");
    }

    proptest! {
        #[test]
        fn round_trips_bit_exactly(bits in any::<u64>()) {
            let x = f64::from_bits(bits);
            prop_assume!(x.is_finite());
            let back: f64 = fmt_f64(x).parse().unwrap();
            prop_assert_eq!(back.to_bits(), x.to_bits());
        }
    }
}
