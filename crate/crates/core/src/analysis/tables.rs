//! Reproductions of the summary tables for choice matching games.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::analysis::chain::{exact_ect, gct, GctValue};
use crate::analysis::formulas::{la_cm_closed_form, three_choice_fixed_point, Algebraic};
use crate::error::{Error, Result};
use crate::notation::build_str;
use crate::protocols::ProtocolSpec;
use crate::rational::{q, qi, Q};

pub const DEFAULT_TABLE_LIMIT: usize = 9;

pub const GCT_TYPO_NOTE: &str = "note: the generic row m = 2k+1 is sometimes printed with GCT k; \
the computed values are ceil(m/2) = k+1, consistent with the rows m = 3, 5, 7";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SummaryRow {
    pub m: usize,
    pub ect: Q,
    /// `"(any)"`, `"WM"`, `"LA"` or `"NONE-UNIQUE"`.
    pub ect_protocol: &'static str,
    pub gct: GctValue,
    /// `"(any)"`, `"LA"` or `"---"` when no protocol guarantees coordination.
    pub gct_protocol: &'static str,
    /// Value predicted by the closed forms, for cross-checking `ect`.
    pub expected_ect: Q,
    pub expected_gct: GctValue,
}

fn cm(m: usize) -> Result<crate::game::WlcGame> {
    build_str(&format!("CM({m})"))
}

/// Closed-form optimal ECT of CM(m): `3 − 2/m` except `E_m` for m = 3, 5
/// and `5/2` for m = 4.
fn predicted_ect(m: usize) -> Result<Q> {
    Ok(match m {
        3 | 5 => la_cm_closed_form(m)?.ect,
        4 => q(5, 2),
        _ => qi(3) - q(2, m as i64),
    })
}

pub fn summary_table(m_max: usize) -> Result<Vec<SummaryRow>> {
    if m_max > DEFAULT_TABLE_LIMIT {
        return Err(Error::LimitExceeded(format!(
            "summary table is limited to m ≤ {DEFAULT_TABLE_LIMIT} (asked for {m_max})"
        )));
    }
    (1..=m_max).map(summary_row).collect()
}

fn summary_row(m: usize) -> Result<SummaryRow> {
    let game = cm(m)?;
    let (ect_protocol, spec) = match m {
        1 => ("(any)", ProtocolSpec::Wm),
        3 | 5 => ("LA", ProtocolSpec::La),
        4 => ("NONE-UNIQUE", ProtocolSpec::Wm),
        _ => ("WM", ProtocolSpec::Wm),
    };
    let ect = exact_ect(&game, &spec)?.value;
    let gct_value = gct(&game, &ProtocolSpec::La)?.value;
    let gct_protocol = match (m, gct_value) {
        (1, _) => "(any)",
        (_, GctValue::Infinite) => "---",
        _ => "LA",
    };
    let expected_gct = if m % 2 == 1 {
        GctValue::Finite(m.div_ceil(2) as u64)
    } else {
        GctValue::Infinite
    };
    Ok(SummaryRow {
        m,
        ect,
        ect_protocol,
        gct: gct_value,
        gct_protocol,
        expected_ect: predicted_ect(m)?,
        expected_gct,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BoundValue {
    Exact(Q),
    Algebraic(Algebraic),
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundValue::Exact(x) => write!(f, "{x}"),
            BoundValue::Algebraic(a) => write!(f, "{a}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundRow {
    pub m: usize,
    /// Greatest optimal ECT among m-choice games.
    pub value: BoundValue,
    pub witness: &'static str,
}

pub fn bounds_table(m: usize) -> Result<BoundRow> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be at least 1".into()));
    }
    Ok(match m {
        3 => BoundRow {
            m,
            value: BoundValue::Algebraic(three_choice_fixed_point()?.e1),
            witness: "1x2+2x1",
        },
        5 => BoundRow {
            m,
            value: BoundValue::Exact(la_cm_closed_form(5)?.ect),
            witness: "CM(5)",
        },
        _ => BoundRow {
            m,
            value: BoundValue::Exact(qi(3) - q(2, m as i64)),
            witness: "CM(m)",
        },
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WmVsLaRow {
    pub m: usize,
    pub wm: Q,
    pub la: Q,
}

/// Exact ECTs of WM and LA on CM(m) for odd m up to `m_max`.
pub fn wm_vs_la_table(m_max: usize) -> Result<Vec<WmVsLaRow>> {
    if m_max > DEFAULT_TABLE_LIMIT {
        return Err(Error::LimitExceeded(format!(
            "comparison table is limited to m ≤ {DEFAULT_TABLE_LIMIT} (asked for {m_max})"
        )));
    }
    (1..=m_max)
        .step_by(2)
        .map(|m| {
            let g = cm(m)?;
            Ok(WmVsLaRow {
                m,
                wm: exact_ect(&g, &ProtocolSpec::Wm)?.value,
                la: exact_ect(&g, &ProtocolSpec::La)?.value,
            })
        })
        .collect()
}
