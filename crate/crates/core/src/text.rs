//! Alphabet reduction for sensitivity experiments.

/// Collapse bytes to a 27-symbol alphabet: ASCII letters map to `1..=26`
/// (case-folded), everything else to the space symbol `0`, with runs of
/// spaces collapsed to one.
pub fn collapse_to_27(bytes: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(bytes.len());
    let mut prev_space = false;
    for &b in bytes {
        let sym = match b {
            b'a'..=b'z' => b - b'a' + 1,
            b'A'..=b'Z' => b - b'A' + 1,
            _ => 0,
        };
        if sym == 0 {
            if !prev_space {
                out.push(0);
            }
            prev_space = true;
        } else {
            out.push(sym);
            prev_space = false;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_case_and_collapses_runs() {
        let got = collapse_to_27(b"Ab, cD!!  e");
        assert_eq!(got, vec![1, 2, 0, 3, 4, 0, 5]);
        assert!(collapse_to_27(b"...").len() == 1);
        assert!(collapse_to_27(b"").is_empty());
        assert!(collapse_to_27(b"zZ").iter().all(|&s| s == 26));
    }
}
