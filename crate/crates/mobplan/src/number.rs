//! One-decimal rendering of quantities and timestamps.

/// Rounds to one decimal, ties to even.
///
/// The value is first snapped to the nearest millionth of a tenth, so a
/// computed 1.25 that lands a few ulps off still counts as a tie.
pub fn round1(x: f64) -> f64 {
    let tenths = x * 10.0;
    let snapped = (tenths * 1e6).round() / 1e6;
    snapped.round_ties_even() / 10.0 + 0.0
}

pub fn fmt1(x: f64) -> String {
    format!("{:.1}", round1(x))
}
