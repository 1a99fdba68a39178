//! Synthetic protocol generation shared by the benchmarks.

/// Emits a well-formed protocol of `episodes` episodes cycling through the
/// activity mix of a review meeting, with backward kind-correct message
/// references and twelve document sections.
pub fn synthetic_protocol(episodes: usize) -> String {
    let mut out = String::from("protocol-tsv v1 synthetic\nparticipants:\tP1\tP2\tP3\tP4\n");
    let mut at_ms: u64 = 0;
    let mut last_eval = 0usize;
    let mut last_inform = 0usize;
    let section_every = episodes.div_ceil(12).max(1);
    let mut section = 0u32;
    for id in 1..=episodes {
        let speaker = format!("P{}", (id % 4) + 1);
        let code = if (id - 1) % section_every == 0 && section < 12 {
            section += 1;
            format!("READ/SECTION-{section}")
        } else {
            match id % 10 {
                0 => "MANAGE/MEETING".to_string(),
                1 | 2 => {
                    last_inform = id;
                    format!("INFORM/SECTION-{}", section.max(1))
                }
                3 => format!("REQUEST/SECTION-{}", section.max(1)),
                4 => {
                    last_eval = id;
                    format!("EVALUATE/SECTION-{}//CONTENT", section.max(1))
                }
                5 if last_eval > 0 => format!("JUSTIFY/EVALUATION-{last_eval}//CONTENT"),
                6 if last_inform > 0 => format!("HYPOTHESIZE/INFORMATION-{last_inform}"),
                7 => format!("DEVELOP/SECTION-{}", section.max(1)),
                8 if last_eval > 0 => format!("ACCEPT/EVALUATION-{last_eval}"),
                _ => format!("EXPLAIN/SECTION-{}", section.max(1)),
            }
        };
        let dur: u64 = 2_000 + (id as u64 % 7) * 500;
        out.push_str(&format!(
            "{id}\t{}.{:03}\t{}.{:03}\t{speaker}\t{code}\n",
            at_ms / 1000,
            at_ms % 1000,
            (at_ms + dur) / 1000,
            (at_ms + dur) % 1000,
        ));
        at_ms += dur;
    }
    out
}
