//! Internal protocol state machines behind the transcript-pure `Strategy`
//! trait: a strategy replays its machine over the recorded answers on every
//! `decide` call.

use crate::gf2::ParityMask;
use crate::pdt::StrategyAction;

/// One protocol engine. `next_action` is called once per step; `feed`
/// consumes the answer to the query most recently returned.
pub(crate) trait Machine {
    fn next_action(&mut self) -> StrategyAction;
    fn feed(&mut self, answer: bool);
}

pub(crate) fn replay<M: Machine>(mut m: M, transcript: &[(ParityMask, bool)]) -> StrategyAction {
    for &(_, a) in transcript {
        let act = m.next_action();
        debug_assert!(
            matches!(act, StrategyAction::Query(_)),
            "transcript answer without a pending query"
        );
        m.feed(a);
    }
    m.next_action()
}
