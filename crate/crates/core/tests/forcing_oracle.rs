//! eval3 and min_query_set against brute force over all total extensions.

mod common;

use common::{arb_formula, arb_rho, arb_wide, check_case};
use ordgame_core::wellorder::make_codec;
use ordgame_core::Ordinal;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn forcing_matches_brute_force(
        o in prop_oneof![arb_formula(), arb_wide()],
        env in proptest::collection::vec(0u64..4, 4),
        rho_bits in arb_rho(),
    ) {
        let c = make_codec(&Ordinal::omega()).unwrap();
        let checked = check_case(&o, env, &rho_bits, c.as_ref()).map_err(TestCaseError::fail)?;
        prop_assume!(checked);
    }
}
