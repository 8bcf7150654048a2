//! Long-format sequence CSV files: one row per event or interval, grouped by
//! `sequence_id`. Durations and onsets are in seconds.

use std::fmt;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, ResultExt};
use crate::null_models::NullModel;
use crate::ratio::{intervals_from_onsets, IntervalSequence, OnsetSequence};
use crate::rng::seeded_rng;

/// Sequences with fewer events than this are skipped on load.
pub const MIN_EVENTS: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceKind {
    Onsets,
    Intervals,
}

impl SequenceKind {
    pub fn column(&self) -> &'static str {
        match self {
            SequenceKind::Onsets => "onset_s",
            SequenceKind::Intervals => "interval_s",
        }
    }
}

impl FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "onsets" => Ok(SequenceKind::Onsets),
            "intervals" => Ok(SequenceKind::Intervals),
            other => Err(Error::invalid(format!(
                "unknown sequence kind '{other}' (onsets or intervals)"
            ))),
        }
    }
}

impl fmt::Display for SequenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SequenceKind::Onsets => "onsets",
            SequenceKind::Intervals => "intervals",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedSequences {
    pub sequences: Vec<IntervalSequence>,
    /// Sequences dropped for having fewer than [`MIN_EVENTS`] events.
    pub skipped: usize,
}

pub fn load_sequences(path: &Path, kind: SequenceKind) -> Result<LoadedSequences> {
    let file = File::open(path)
        .map_err(|e| Error::from(e).context(format!("opening {}", path.display())))?;
    read_sequences(file, kind).context(|| path.display().to_string())
}

/// Same as [`load_sequences`] for any reader.
pub fn read_sequences<R: Read>(reader: R, kind: SequenceKind) -> Result<LoadedSequences> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.is_empty() || (headers.len() == 1 && headers[0].is_empty()) {
        return Err(Error::invalid("no sequences"));
    }
    let expected = ["sequence_id", kind.column()];
    if headers.len() != 2 || headers[0] != *expected[0] || headers[1] != *expected[1] {
        return Err(Error::Row {
            line: 1,
            message: format!(
                "header must be '{},{}', found '{}'",
                expected[0],
                expected[1],
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }

    let mut groups: Vec<(String, Vec<f64>, u64)> = Vec::new();
    let mut record = csv::StringRecord::new();
    while rdr.read_record(&mut record)? {
        let line = record.position().map_or(0, |p| p.line());
        let row_err = |message: String| Error::Row { line, message };
        let id = record[0].to_string();
        if id.is_empty() {
            return Err(row_err("empty sequence_id".into()));
        }
        let value: f64 = record[1]
            .parse()
            .map_err(|_| row_err(format!("cannot parse '{}' as a number", &record[1])))?;
        if !value.is_finite() {
            return Err(row_err(format!("{} must be finite", kind.column())));
        }
        if kind == SequenceKind::Intervals && value <= 0.0 {
            return Err(row_err(format!("interval {value} is not positive")));
        }

        match groups.last_mut() {
            Some((last, values, _)) if *last == id => {
                if kind == SequenceKind::Onsets && values.last().is_some_and(|&prev| value <= prev)
                {
                    return Err(row_err(format!(
                        "onset {value} does not follow the previous onset of '{id}'"
                    )));
                }
                values.push(value);
            }
            _ => {
                if groups.iter().any(|(g, _, _)| *g == id) {
                    return Err(row_err(format!(
                        "rows of sequence '{id}' are not contiguous"
                    )));
                }
                groups.push((id, vec![value], line));
            }
        }
    }
    if groups.is_empty() {
        return Err(Error::invalid("no sequences"));
    }

    let mut sequences = Vec::new();
    let mut skipped = 0;
    for (id, values, line) in groups {
        let events = match kind {
            SequenceKind::Onsets => values.len(),
            SequenceKind::Intervals => values.len() + 1,
        };
        if events < MIN_EVENTS {
            skipped += 1;
            continue;
        }
        let seq = match kind {
            SequenceKind::Onsets => {
                OnsetSequence::new(id.clone(), values).and_then(|o| intervals_from_onsets(&o))
            }
            SequenceKind::Intervals => IntervalSequence::new(id.clone(), values),
        }
        .map_err(|e| e.context(format!("sequence '{id}' starting at line {line}")))?;
        sequences.push(seq);
    }
    if sequences.is_empty() {
        return Err(Error::invalid(format!(
            "no sequences with at least {MIN_EVENTS} events ({skipped} skipped)"
        )));
    }
    Ok(LoadedSequences { sequences, skipped })
}

/// Writes the interval format with 17 significant digits, which round-trips
/// every `f64` exactly.
pub fn write_sequences<W: Write>(writer: W, sequences: &[IntervalSequence]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    wtr.write_record(["sequence_id", "interval_s"])?;
    for seq in sequences {
        for i in seq.intervals() {
            wtr.write_record([seq.source_id(), &format!("{i:.16e}")])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Draws `n_sequences` sequences of `seq_len` intervals; sequence `j` uses
/// stream `j` of `seed` and is labelled `seq{j}`.
pub fn simulate_sequences(
    model: &NullModel,
    n_sequences: usize,
    seq_len: usize,
    seed: u64,
) -> Result<Vec<IntervalSequence>> {
    if n_sequences == 0 {
        return Err(Error::invalid("need at least one sequence"));
    }
    (0..n_sequences)
        .map(|j| model.sample_sequence(seq_len, &mut seeded_rng(seed, j as u64), format!("seq{j}")))
        .collect()
}

/// Simulates and writes a sequences CSV to `out`.
pub fn simulate_command(
    model: &NullModel,
    n_sequences: usize,
    seq_len: usize,
    seed: u64,
    out: &Path,
) -> Result<Vec<IntervalSequence>> {
    let sequences = simulate_sequences(model, n_sequences, seq_len, seed)?;
    let file = File::create(out)
        .map_err(|e| Error::from(e).context(format!("creating {}", out.display())))?;
    write_sequences(std::io::BufWriter::new(file), &sequences)?;
    Ok(sequences)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, kind: SequenceKind) -> Result<LoadedSequences> {
        read_sequences(text.as_bytes(), kind)
    }

    #[test]
    fn onsets_are_differenced() {
        let l = read(
            "sequence_id,onset_s\na,0\na,1\na,3\nb,0\nb,2\nb,4\nb,6\n",
            SequenceKind::Onsets,
        )
        .unwrap();
        assert_eq!(l.sequences[0].intervals(), &[1.0, 2.0]);
        assert_eq!(l.sequences[1].intervals(), &[2.0, 2.0, 2.0]);
        assert_eq!(l.skipped, 0);
    }

    #[test]
    fn negative_interval_reports_line() {
        let err = read(
            "sequence_id,interval_s\na,1\na,-1\n",
            SequenceKind::Intervals,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Row { line: 3, .. }), "{err}");
    }

    #[test]
    fn empty_inputs() {
        for text in ["", "sequence_id,interval_s\n"] {
            let err = read(text, SequenceKind::Intervals).unwrap_err();
            assert!(err.to_string().contains("no sequences"), "{err}");
        }
    }

    #[test]
    fn short_sequences_skipped() {
        let l = read(
            "sequence_id,onset_s\na,0\na,1\nb,0\nb,1\nb,2\n",
            SequenceKind::Onsets,
        )
        .unwrap();
        assert_eq!(l.sequences.len(), 1);
        assert_eq!(l.skipped, 1);
    }

    #[test]
    fn malformed_rows() {
        let bad = [
            ("sequence_id,interval_s\na,x\n", 2),
            ("sequence_id,onset_s\na,0\na,1\na,1\n", 4),
            ("sequence_id,interval_s\na,1\nb,1\na,1\n", 4),
        ];
        let kinds = [
            SequenceKind::Intervals,
            SequenceKind::Onsets,
            SequenceKind::Intervals,
        ];
        for ((text, line), kind) in bad.iter().zip(kinds) {
            match read(text, kind).unwrap_err() {
                Error::Row { line: l, .. } => assert_eq!(l, *line as u64),
                other => panic!("{other}"),
            }
        }
        assert!(read("sequence_id,onset_s\na,1\n", SequenceKind::Intervals).is_err());
    }

    #[test]
    fn write_read_round_trip() {
        let model = NullModel::exponential(1.0).unwrap();
        let seqs = simulate_sequences(&model, 3, 5, 42).unwrap();
        let mut buf = Vec::new();
        write_sequences(&mut buf, &seqs).unwrap();
        let back = read_sequences(buf.as_slice(), SequenceKind::Intervals).unwrap();
        assert_eq!(back.sequences, seqs);
    }

    #[test]
    fn simulated_uniform_in_range() {
        let seqs = simulate_sequences(&NullModel::uniform(1.0, 3.0).unwrap(), 4, 50, 1).unwrap();
        assert!(seqs
            .iter()
            .flat_map(|s| s.intervals())
            .all(|&i| (1.0..=3.0).contains(&i)));
    }
}
