//! Exact coordination times, closed forms and table generators.

mod chain;
mod formulas;
pub mod linsolve;
mod tables;

use alloc::sync::Arc;

use num_traits::Zero;

pub use chain::{
    exact_ect, exact_ect_from, exact_ect_with, gct, gct_from, gct_with, raw_bracket, ChainOptions,
    ChainRow, EctResult, GctResult, GctValue, MarkovQuotient, DEFAULT_MAX_CLASSES,
};
pub use formulas::{
    formula_e, la_cm_closed_form, three_choice_fixed_point, Algebraic, FixedPoint, FormulaE,
    FormulaEParams, LaClosedForm, Minimizers, FIXED_POINT_TOLERANCE,
};
pub use tables::{
    bounds_table, summary_table, wm_vs_la_table, BoundRow, BoundValue, SummaryRow, WmVsLaRow,
    DEFAULT_TABLE_LIMIT, GCT_TYPO_NOTE,
};

use crate::error::{Error, Result};
use crate::game::{Stage, WlcGame};
use crate::protocols::{support_profiles, ProtocolSpec};
use crate::rational::{qi, Q};

/// Probability of coordinating in the next round when both players follow `p`.
pub fn oscp(stage: &Stage, p: &ProtocolSpec) -> Result<Q> {
    if stage.is_final() {
        return Err(Error::FinalStage);
    }
    let mut total = Q::zero();
    for (prof, w) in support_profiles(p, stage)? {
        if stage.game().is_winning(&prof.0) {
            total += w;
        }
    }
    Ok(total)
}

/// Upper bound `3 − 2p` on the WM coordination time, `p` the one-shot
/// probability of uniform play.
pub fn wm_ect_bound(game: &WlcGame) -> Result<Q> {
    game.require_two_players()?;
    let p = oscp(&Stage::initial(Arc::new(game.clone())), &ProtocolSpec::Uniform)?;
    Ok(qi(3) - qi(2) * p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::Profile;
    use crate::notation::build_str;
    use crate::rational::q;

    fn initial(s: &str) -> Stage {
        Stage::initial(Arc::new(build_str(s).unwrap()))
    }

    #[test]
    fn oscp_examples() {
        for m in 2..=7 {
            let s = initial(&alloc::format!("CM({m})"));
            assert_eq!(oscp(&s, &ProtocolSpec::Uniform).unwrap(), q(1, m));
        }
        assert_eq!(oscp(&initial("O(3)"), &ProtocolSpec::Uniform).unwrap(), q(2, 3));
        let g = build_str("complement(O(5))").unwrap();
        let expected = Q::new((g.winning().len() as i64).into(), 25.into());
        assert_eq!(expected, q(3, 5));
        assert_eq!(oscp(&initial("complement(O(5))"), &ProtocolSpec::Uniform).unwrap(), expected);
    }

    #[test]
    fn oscp_rejects_final_stage() {
        let s = initial("CM(2)").play_round(&Profile::pair(0, 0)).unwrap();
        assert_eq!(oscp(&s, &ProtocolSpec::Wm).unwrap_err(), Error::FinalStage);
    }

    #[test]
    fn wm_bound_examples() {
        assert_eq!(wm_ect_bound(&build_str("CM(7)").unwrap()).unwrap(), q(19, 7));
        assert_eq!(wm_ect_bound(&build_str("1x1").unwrap()).unwrap(), qi(1));
        // 4×5 choices, 6 winning cells: p = 6/20
        let g = build_str("Sigma(3)+2*(1x1)").unwrap();
        assert_eq!(g.winning().len(), 6);
        assert_eq!(g.product_size(), 20);
        assert_eq!(wm_ect_bound(&g).unwrap(), qi(3) - q(6, 10));
    }

    #[test]
    fn fig1_examples() {
        let ect = |s: &str, p: ProtocolSpec| exact_ect(&build_str(s).unwrap(), &p).unwrap().value;
        assert_eq!(ect("CM(6)", ProtocolSpec::Wm), q(8, 3));
        assert_eq!(ect("CM(2)", ProtocolSpec::Wm), qi(2));
        assert_eq!(ect("O(3)", ProtocolSpec::Uniform), q(3, 2));
        assert_eq!(ect("CM(3)", ProtocolSpec::La), q(5, 3));
        let g = |s: &str, p: ProtocolSpec| gct(&build_str(s).unwrap(), &p).unwrap().value;
        assert_eq!(g("CM(5)", ProtocolSpec::La), GctValue::Finite(3));
        assert_eq!(g("CM(2)", ProtocolSpec::Wm), GctValue::Infinite);
        assert_eq!(g("CM(7)", ProtocolSpec::La), GctValue::Finite(4));
    }

    #[test]
    fn gct_witness_is_a_real_losing_history() {
        let game = Arc::new(build_str("CM(5)").unwrap());
        let r = gct(&game, &ProtocolSpec::La).unwrap();
        assert_eq!(r.witness.len(), 2);
        let s = Stage::with_history(game, r.witness).unwrap();
        assert!(!s.is_final());
    }

    #[test]
    fn chain_is_stochastic() {
        let s = initial("CM(4)");
        let c = MarkovQuotient::build(&s, &ProtocolSpec::Wm, ChainOptions::default()).unwrap();
        assert!(c.is_stochastic());
        let d = c.round_distribution(1);
        assert_eq!(d[0], q(1, 4));
    }

    #[test]
    fn uniform_trap_free_but_stuck_protocol_is_singular() {
        // a table that always replays a1/a2 after the first failure traps the players
        use crate::protocols::TableProtocol;
        let g = build_str("CM(2)").unwrap();
        let s = Stage::initial(Arc::new(g));
        let mut t = TableProtocol::new();
        t.insert("initial", 0, &[(0, "1")]).unwrap();
        t.insert("initial", 1, &[(1, "1")]).unwrap();
        let failed = s.play_round(&Profile::pair(0, 1)).unwrap();
        let key = crate::protocols::table_key(&failed).unwrap();
        t.insert(&key, 0, &[(0, "1")]).unwrap();
        t.insert(&key, 1, &[(1, "1")]).unwrap();
        let p = ProtocolSpec::Table(Arc::new(t));
        assert_eq!(exact_ect_from(&s, &p).unwrap_err(), Error::SingularSystem);
        assert_eq!(gct_from(&s, &p).unwrap().value, GctValue::Infinite);
    }
}
