//! LIBSVM parsing: round trips and streaming scale.

use std::io::{BufReader, Read};

use proptest::prelude::*;
use trish_core::ingest::{parse_libsvm, to_libsvm_string, SparseRow};
use trish_core::Error;

fn rows() -> impl Strategy<Value = Vec<SparseRow>> {
    let row = (
        prop_oneof![Just(1.0), Just(-1.0), -5.0f64..5.0],
        prop::collection::btree_map(1u32..10_000, -1e6f64..1e6, 0..12),
    )
        .prop_map(|(label, feats)| SparseRow {
            label,
            indices: feats.keys().copied().collect(),
            values: feats.values().copied().collect(),
        });
    prop::collection::vec(row, 0..30)
}

proptest! {
    #[test]
    fn write_then_parse_is_identity(rs in rows()) {
        let text = to_libsvm_string(&rs);
        let parsed = parse_libsvm(text.as_bytes()).unwrap();
        prop_assert_eq!(&parsed.rows, &rs);
        prop_assert_eq!(to_libsvm_string(&parsed.rows), text);
    }

    #[test]
    fn shuffled_pairs_are_rejected_on_the_right_line(
        prefix in 0usize..5,
        a in 2u32..100,
        b in 1u32..100,
    ) {
        prop_assume!(b < a);
        let mut text = "1 1:1\n".repeat(prefix);
        text.push_str(&format!("-1 {a}:0.5 {b}:0.5\n"));
        match parse_libsvm(text.as_bytes()) {
            Err(Error::Parse { line, message, .. }) => {
                prop_assert_eq!(line, prefix + 1);
                prop_assert!(message.contains("non-increasing"));
            }
            other => prop_assert!(false, "unexpected {other:?}"),
        }
    }
}

/// Generates records on the fly so nothing of the input is held in memory.
struct Synthetic {
    remaining: usize,
    buf: Vec<u8>,
    pos: usize,
}

impl Read for Synthetic {
    fn read(&mut self, out: &mut [u8]) -> std::io::Result<usize> {
        if self.pos == self.buf.len() {
            if self.remaining == 0 {
                return Ok(0);
            }
            self.remaining -= 1;
            let i = self.remaining;
            self.buf = format!(
                "{} {}:0.25 {}:1.5 {}:-2\n",
                if i.is_multiple_of(2) { 1 } else { -1 },
                i % 7 + 1,
                i % 7 + 9,
                i % 5 + 20
            )
            .into_bytes();
            self.pos = 0;
        }
        let n = out.len().min(self.buf.len() - self.pos);
        out[..n].copy_from_slice(&self.buf[self.pos..self.pos + n]);
        self.pos += n;
        Ok(n)
    }
}

#[test]
fn streams_large_inputs() {
    let n = 200_000;
    let reader = BufReader::new(Synthetic {
        remaining: n,
        buf: Vec::new(),
        pos: 0,
    });
    let ds = parse_libsvm(reader).unwrap();
    assert_eq!(ds.rows.len(), n);
    assert_eq!(ds.max_index, 24);
    assert_eq!(ds.rows.iter().map(|r| r.nnz()).sum::<usize>(), 3 * n);
}
