mod common;

use common::{config, instance};
use proptest::prelude::*;

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn round_trip(inst in instance()) {
        common::round_trip(&inst)?;
    }

    #[test]
    fn difference_then_sum(inst in instance()) {
        common::difference_then_sum(&inst)?;
    }

    #[test]
    fn zero_identity(inst in instance()) {
        common::zero_identity(&inst)?;
    }

    #[test]
    fn difference_monotone(inst in instance()) {
        common::difference_monotone(&inst)?;
    }

    #[test]
    fn support_consistency(inst in instance()) {
        common::support_consistency(&inst)?;
    }

    #[test]
    fn reduce_sound(inst in instance()) {
        common::reduce_sound(&inst)?;
    }
}
