use std::fmt::Write;

use super::Alignment;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('"', "\"\""))
}

/// Long ("text") format as written by Praat. Times use the shortest
/// representation that reads back to the same `f64`.
pub fn to_long_format(a: &Alignment) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "File type = \"ooTextFile\"");
    let _ = writeln!(out, "Object class = \"TextGrid\"");
    let _ = writeln!(out);
    let _ = writeln!(out, "xmin = {}", a.xmin);
    let _ = writeln!(out, "xmax = {}", a.xmax);
    if a.tiers.is_empty() {
        let _ = writeln!(out, "tiers? <absent>");
        return out;
    }
    let _ = writeln!(out, "tiers? <exists>");
    let _ = writeln!(out, "size = {}", a.tiers.len());
    let _ = writeln!(out, "item []:");
    for (i, tier) in a.tiers.iter().enumerate() {
        let _ = writeln!(out, "    item [{}]:", i + 1);
        let _ = writeln!(out, "        class = \"IntervalTier\"");
        let _ = writeln!(out, "        name = {}", quote(&tier.name));
        let _ = writeln!(out, "        xmin = {}", a.xmin);
        let _ = writeln!(out, "        xmax = {}", a.xmax);
        let _ = writeln!(out, "        intervals: size = {}", tier.intervals.len());
        for (j, iv) in tier.intervals.iter().enumerate() {
            let _ = writeln!(out, "        intervals [{}]:", j + 1);
            let _ = writeln!(out, "            xmin = {}", iv.start);
            let _ = writeln!(out, "            xmax = {}", iv.end);
            let _ = writeln!(out, "            text = {}", quote(&iv.label));
        }
    }
    out
}

/// Short format: the same values, one per line, without keys.
pub fn to_short_format(a: &Alignment) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "File type = \"ooTextFile\"");
    let _ = writeln!(out, "Object class = \"TextGrid\"");
    let _ = writeln!(out);
    let _ = writeln!(out, "{}", a.xmin);
    let _ = writeln!(out, "{}", a.xmax);
    if a.tiers.is_empty() {
        let _ = writeln!(out, "<absent>");
        return out;
    }
    let _ = writeln!(out, "<exists>");
    let _ = writeln!(out, "{}", a.tiers.len());
    for tier in &a.tiers {
        let _ = writeln!(out, "\"IntervalTier\"");
        let _ = writeln!(out, "{}", quote(&tier.name));
        let _ = writeln!(out, "{}", a.xmin);
        let _ = writeln!(out, "{}", a.xmax);
        let _ = writeln!(out, "{}", tier.intervals.len());
        for iv in &tier.intervals {
            let _ = writeln!(out, "{}", iv.start);
            let _ = writeln!(out, "{}", iv.end);
            let _ = writeln!(out, "{}", quote(&iv.label));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::textgrid::{parse_textgrid, Interval, Tier};
    use proptest::prelude::*;

    fn arb_alignment() -> impl Strategy<Value = Alignment> {
        let label = prop_oneof![Just(String::new()), "[a-zA-Z\"' ]{1,8}".prop_map(|s| s.trim().to_string())];
        let tier = (prop::collection::vec((1u32..1000, label), 1..12), "[a-z]{1,6}");
        (prop::collection::vec(tier, 1..4), 0.0f64..5.0).prop_map(|(tiers, xmin)| {
            // Every tier gets rescaled to the same span.
            let span = 3.7;
            let tiers: Vec<Tier> = tiers
                .into_iter()
                .enumerate()
                .map(|(i, (ivs, name))| {
                    let total: u32 = ivs.iter().map(|(w, _)| w).sum();
                    let mut t = xmin;
                    let n = ivs.len();
                    let intervals = ivs
                        .into_iter()
                        .enumerate()
                        .map(|(j, (w, l))| {
                            let end = if j + 1 == n { xmin + span } else { t + span * w as f64 / total as f64 };
                            let iv = Interval::new(t, end, l);
                            t = end;
                            iv
                        })
                        .collect();
                    Tier { name: if i == 0 { "words".into() } else { name }, intervals }
                })
                .collect();
            Alignment { xmin, xmax: xmin + span, tiers }
        })
    }

    proptest! {
        #[test]
        fn round_trip_both_formats(a in arb_alignment()) {
            prop_assert_eq!(&parse_textgrid(&to_long_format(&a)).unwrap(), &a);
            prop_assert_eq!(&parse_textgrid(&to_short_format(&a)).unwrap(), &a);
        }
    }
}
