//! Shared test support: an independent evaluation of the uncapped switch
//! recursion built on the quadratic reference counter, plus corpus helpers.
//! Deliberately slow and literal; it must not share code with the
//! implementation it checks.

#![allow(dead_code)]

use switchcode::counts::count;

pub enum OracleMode<'a> {
    Plain,
    Fixed(&'a [u8]),
    Preadapted(&'a [u8]),
}

/// `ln P(x)` by direct dynamic programming over all orders `-1..=n-1`,
/// without the above-cap bucket. Conditionals are recomputed from scratch
/// with the reference counter at every step.
pub fn oracle_ln_total(x: &[u8], d: u16, alpha: f64, mode: &OracleMode) -> f64 {
    assert!(!x.is_empty());
    let n_total = x.len();
    let p = |n: usize| (-((n as f64 + 1.0).powf(-alpha))).exp();
    // masses[k + 1] = P(x_1^n, k)
    let mut masses = vec![0.0f64; n_total + 1];
    let b0 = oracle_ladder(x, 0, x[0], 0, d, mode);
    masses[0] = p(0) * b0[0];
    masses[1] = (1.0 - p(0)) * b0[1];
    for n in 1..n_total {
        let pn = p(n);
        let qn = 1.0 - pn;
        let ladder = oracle_ladder(x, n, x[n], n, d, mode);
        let mut new = vec![0.0f64; n_total + 1];
        for k in -1..=(n as isize) {
            let idx = (k + 1) as usize;
            let stay = masses[idx];
            let climb = if idx >= 1 { masses[idx - 1] } else { 0.0 };
            if stay == 0.0 && climb == 0.0 {
                continue;
            }
            new[idx] = (pn * stay + qn * climb) * ladder[idx];
        }
        masses = new;
    }
    masses.iter().sum::<f64>().ln()
}

/// Conditionals of `a` after `x_1^n` for orders `-1..=kmax`, evaluated with
/// reference counts; `result[k + 1]` is the order-`k` value.
pub fn oracle_ladder(
    x: &[u8],
    n: usize,
    a: u8,
    kmax: usize,
    d: u16,
    mode: &OracleMode,
) -> Vec<f64> {
    assert!(kmax <= n, "order {kmax} has no context after {n} symbols");
    let mut out = Vec::with_capacity(kmax + 2);
    out.push(1.0 / f64::from(d));
    for k in 0..=kmax {
        let ctx = &x[n - k..n];
        let mut gram = ctx.to_vec();
        gram.push(a);
        let (num_c, den_c) = match mode {
            OracleMode::Plain => {
                let num = count(&gram, &x[..n]);
                let den = if n == 0 { 0 } else { count(ctx, &x[..n - 1]) };
                (num, den)
            }
            OracleMode::Fixed(y) => (count(&gram, y), count(ctx, &y[..y.len() - 1])),
            OracleMode::Preadapted(y) => {
                let mut z = y.to_vec();
                z.extend_from_slice(&x[..n]);
                let num = count(&gram, &z);
                let den = count(ctx, &z[..z.len() - 1]);
                (num, den)
            }
        };
        let prev = *out.last().unwrap();
        out.push((num_c as f64 + prev) / (den_c as f64 + 1.0));
    }
    out
}

/// Deterministic English-like filler for corpus-shaped tests.
pub fn filler_text(len: usize) -> Vec<u8> {
    const BASE: &str = "the coding of long texts rewards models that remember their \
contexts. short windows forget the phrases that keep returning, while deeper windows \
pay for their state in slow warmup. a balanced mixture moves its weight upward only \
when the evidence for longer contexts has actually arrived, and that is what keeps \
the guarantee intact. ";
    let mut out = Vec::with_capacity(len + 128);
    let mut i = 0usize;
    while out.len() < len {
        out.extend_from_slice(BASE.as_bytes());
        out.extend_from_slice(format!("passage {i} ends here. ").as_bytes());
        i += 1;
    }
    out.truncate(len);
    out
}

/// Paths to the user-supplied reference corpora, if present.
pub fn reference_corpora() -> Option<(Vec<u8>, Vec<u8>)> {
    let gulliver = corpus_from("SWITCHCODE_GULLIVER", concat!("corpora/", "gulliver.txt"))?;
    let casanova = corpus_from("SWITCHCODE_CASANOVA", concat!("corpora/", "casanova.txt"))?;
    Some((gulliver, casanova))
}

fn corpus_from(env_key: &str, default_path: &str) -> Option<Vec<u8>> {
    let path = std::env::var(env_key)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|_| {
            let mut p = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR"));
            p.pop();
            p.pop();
            p.push(default_path);
            p
        });
    std::fs::read(path).ok()
}
