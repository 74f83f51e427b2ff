//! Propagation schedule document.
//!
//! ```text
//! tpc-schedule 1
//! frames 7
//! groups 3
//! steps 2
//! seed 42
//! partition 1-2 3-4 5-7
//! step 2 1 2 3
//! step 1 2 1 1
//! ```
//!
//! `partition` lists each group's 1-based inclusive frame range. Each
//! `step t` line holds the picked 1-based offset of every group at
//! denoising step `t`, in execution order (t counts down).

use std::fmt::Write as _;
use std::path::Path;

use super::text::Lines;
use crate::error::{Result, TpcError};
use crate::propagation::PropagationSchedule;

pub const SCHEDULE_FORMAT: &str = "tpc-schedule";
pub const SCHEDULE_VERSION: u32 = 1;

pub fn schedule_to_text(schedule: &PropagationSchedule) -> Result<String> {
    let partition = schedule.partition()?;
    let mut out = String::new();
    let _ = writeln!(out, "{SCHEDULE_FORMAT} {SCHEDULE_VERSION}");
    let _ = writeln!(out, "frames {}", schedule.frames);
    let _ = writeln!(out, "groups {}", schedule.groups);
    let _ = writeln!(out, "steps {}", schedule.steps);
    let _ = writeln!(out, "seed {}", schedule.seed);
    let ranges: Vec<String> = partition
        .bounds()
        .iter()
        .map(|(s, e)| format!("{s}-{e}"))
        .collect();
    let _ = writeln!(out, "partition {}", ranges.join(" "));
    for (k, row) in schedule.picks.iter().enumerate() {
        let picks: Vec<String> = row.iter().map(|p| p.to_string()).collect();
        let _ = writeln!(out, "step {} {}", schedule.step_label(k), picks.join(" "));
    }
    Ok(out)
}

pub fn parse_schedule(text: &str, path: &Path) -> Result<PropagationSchedule> {
    let mut lines = Lines::new(text, path);
    lines.expect_header(SCHEDULE_FORMAT, SCHEDULE_VERSION)?;
    let frames = lines.keyed("frames")?;
    let groups = lines.keyed("groups")?;
    let steps: usize = lines.keyed("steps")?;
    let seed = lines.keyed("seed")?;

    let (line, ranges) = lines.keyed_list("partition")?;
    let partition = crate::propagation::group_partition(frames, groups)
        .map_err(|e| lines.error(line, e.to_string()))?;
    let expected: Vec<String> = partition
        .bounds()
        .iter()
        .map(|(s, e)| format!("{s}-{e}"))
        .collect();
    if ranges != expected {
        return Err(lines.error(
            line,
            format!("partition does not match {frames} frames in {groups} groups"),
        ));
    }

    let mut picks = Vec::with_capacity(steps);
    while let Some((line, fields)) = lines.next_fields() {
        if fields[0] != "step" {
            return Err(lines.error(line, "expected `step t picks...`".into()));
        }
        let t: usize = lines.field(line, &fields, 1)?;
        if t + picks.len() != steps {
            return Err(lines.error(
                line,
                format!("step {t} out of order, expected {}", steps - picks.len()),
            ));
        }
        let row = (2..fields.len())
            .map(|i| lines.field(line, &fields, i))
            .collect::<Result<Vec<usize>>>()?;
        picks.push(row);
    }
    let schedule = PropagationSchedule {
        frames,
        groups,
        steps,
        seed,
        picks,
    };
    schedule.validate().map_err(|e| match e {
        TpcError::InvalidInput(message) => lines.error(lines.last_line(), message),
        other => other,
    })?;
    Ok(schedule)
}

pub fn save_schedule(schedule: &PropagationSchedule, path: &Path) -> Result<()> {
    std::fs::write(path, schedule_to_text(schedule)?).map_err(|e| TpcError::io(path, e))
}

pub fn load_schedule(path: &Path) -> Result<PropagationSchedule> {
    let text = std::fs::read_to_string(path).map_err(|e| TpcError::io(path, e))?;
    parse_schedule(&text, path)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::propagation::{run_propagation, FeatureSequence};

    fn schedule(frames: usize, groups: usize, steps: usize, seed: u64) -> PropagationSchedule {
        let f = FeatureSequence::new(frames, 1, 1, vec![0.0; frames]).unwrap();
        run_propagation(&f, groups, steps, seed).unwrap().1
    }

    #[test]
    fn shows_partition() {
        let text = schedule_to_text(&schedule(7, 3, 2, 5)).unwrap();
        assert!(text.contains("\npartition 1-2 3-4 5-7\n"), "{text}");
        assert!(text.contains("\nstep 2 "));
    }

    #[test]
    fn rejects_tampered_documents() {
        let text = schedule_to_text(&schedule(7, 3, 2, 5)).unwrap();
        let p = Path::new("s");
        assert!(parse_schedule(&text.replace("partition 1-2", "partition 1-3"), p).is_err());
        let bad_pick = text.replace("step 1 ", "step 1 9 ");
        assert!(parse_schedule(&bad_pick, p).is_err());
        let truncated: String = text.lines().take(7).map(|l| format!("{l}\n")).collect();
        assert!(parse_schedule(&truncated, p).is_err());
    }

    proptest! {
        #[test]
        fn round_trip(frames in 1usize..40, g in 1usize..40, steps in 1usize..20, seed in any::<u64>()) {
            prop_assume!(g <= frames);
            let s = schedule(frames, g, steps, seed);
            let back = parse_schedule(&schedule_to_text(&s).unwrap(), Path::new("s")).unwrap();
            prop_assert_eq!(back, s);
        }
    }
}
