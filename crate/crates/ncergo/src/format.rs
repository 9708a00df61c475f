//! Element text format.
//!
//! ```text
//! blocks: 2,1; weights: 1,0.5
//! 1,0 0,0
//! 0,0 1,0
//! 3,-1
//! ```
//!
//! The header names the block sizes and trace weights; the body lists the
//! entries of every block row-major as `re,im` tokens separated by
//! whitespace. Line breaks are cosmetic.

use std::fmt::Write as _;
use std::sync::Arc;

use ncergo_core::{Algebra, Block, Element, C64};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum FormatError {
    #[error("missing header line")]
    MissingHeader,
    #[error("malformed header: {0}")]
    Header(String),
    #[error("malformed entry {index}: {token:?}")]
    Entry { index: usize, token: String },
    #[error("expected {expected} entries, found {found}")]
    Count { expected: usize, found: usize },
    #[error(transparent)]
    Core(#[from] ncergo_core::Error),
}

/// `{:.16e}`: 17 significant digits, enough for an exact round trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(alg: &Algebra) -> String {
    let dims: Vec<String> = alg.block_dims().iter().map(|d| d.to_string()).collect();
    let weights: Vec<String> = alg.trace_weights().iter().map(|&w| fmt_f64(w)).collect();
    format!("blocks: {}; weights: {}", dims.join(","), weights.join(","))
}

pub fn parse_header(line: &str) -> Result<Algebra, FormatError> {
    let bad = || FormatError::Header(line.to_string());
    let (blocks, weights) = line.split_once(';').ok_or_else(bad)?;
    let blocks = blocks.trim().strip_prefix("blocks:").ok_or_else(bad)?;
    let weights = weights.trim().strip_prefix("weights:").ok_or_else(bad)?;
    let dims = blocks
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    let ws = weights
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| bad())?;
    Ok(Algebra::new(dims, ws)?)
}

pub fn write_element(x: &Element) -> String {
    let mut out = header(x.algebra());
    out.push('\n');
    for b in x.blocks() {
        for i in 0..b.nrows() {
            for j in 0..b.ncols() {
                if j > 0 {
                    out.push(' ');
                }
                let z = b[(i, j)];
                write!(out, "{},{}", fmt_f64(z.re), fmt_f64(z.im)).unwrap();
            }
            out.push('\n');
        }
    }
    out
}

fn parse_entry(index: usize, token: &str) -> Result<C64, FormatError> {
    let bad = || FormatError::Entry {
        index,
        token: token.to_string(),
    };
    let (re, im) = token.split_once(',').ok_or_else(bad)?;
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

/// Parses an element together with its algebra.
pub fn read_element(text: &str) -> Result<Element, FormatError> {
    let mut lines = text.lines().skip_while(|l| l.trim().is_empty());
    let head = lines.next().ok_or(FormatError::MissingHeader)?;
    let alg = Arc::new(parse_header(head)?);
    let entries = lines
        .flat_map(str::split_whitespace)
        .enumerate()
        .map(|(i, t)| parse_entry(i, t))
        .collect::<Result<Vec<_>, _>>()?;
    let expected: usize = alg.block_dims().iter().map(|n| n * n).sum();
    if entries.len() != expected {
        return Err(FormatError::Count {
            expected,
            found: entries.len(),
        });
    }
    let mut at = 0;
    let blocks = alg
        .block_dims()
        .iter()
        .map(|&n| {
            let b = Block::from_row_slice(n, n, &entries[at..at + n * n]);
            at += n * n;
            b
        })
        .collect();
    Ok(Element::from_blocks(&alg, blocks)?)
}

/// Parses an element and checks it lives on `alg`.
pub fn read_element_on(alg: &Arc<Algebra>, text: &str) -> Result<Element, FormatError> {
    let x = read_element(text)?;
    if x.algebra().block_dims() != alg.block_dims() || x.algebra().trace_weights() != alg.trace_weights() {
        return Err(FormatError::Header(format!(
            "element algebra `{}` differs from `{}`",
            header(x.algebra()),
            header(alg)
        )));
    }
    Ok(Element::from_blocks(alg, x.blocks().to_vec())?)
}
