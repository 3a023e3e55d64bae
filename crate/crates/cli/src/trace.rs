//! Trace format: a diff-able, generator-friendly edit script.
//!
//! ```text
//! INIT 3 1 4 1 5      # optional header: initial sequence values
//! I <pos> <val>       # insert val so it lands at 1-based pos
//! D <pos>             # delete the element at pos
//! L                   # report the LIS length
//! Q <xlo> <xhi> <ylo> <yhi>   # rectangle LIS query (point view)
//! ```
//!
//! Blank lines and `#` comments are ignored.

use anyhow::{anyhow, bail, Context, Result};
use dynlis_core::seq::EditOp;
use dynlis_core::static_lis::Rect;

#[derive(Clone, Debug, PartialEq)]
pub enum TraceOp {
    Edit(EditOp),
    ReportLis,
    QueryRect(Rect),
}

#[derive(Clone, Debug, Default)]
pub struct Trace {
    pub initial: Vec<i64>,
    pub ops: Vec<TraceOp>,
}

pub fn parse_trace(text: &str) -> Result<Trace> {
    let mut trace = Trace::default();
    let mut saw_op = false;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut toks = line.split_whitespace();
        let head = toks.next().unwrap();
        let ctx = |what: &str| format!("line {}: {what}", lineno + 1);
        match head {
            "INIT" => {
                if saw_op || !trace.initial.is_empty() {
                    bail!("line {}: INIT must come first", lineno + 1);
                }
                for t in toks {
                    trace
                        .initial
                        .push(t.parse().with_context(|| ctx("bad INIT value"))?);
                }
                continue;
            }
            "I" => {
                let pos = next_num(&mut toks).with_context(|| ctx("I needs <pos> <val>"))?;
                let val = next_num(&mut toks).with_context(|| ctx("I needs <pos> <val>"))?;
                trace.ops.push(TraceOp::Edit(EditOp::Insert {
                    pos: pos as usize,
                    val,
                }));
            }
            "D" => {
                let pos = next_num(&mut toks).with_context(|| ctx("D needs <pos>"))?;
                trace.ops.push(TraceOp::Edit(EditOp::Delete {
                    pos: pos as usize,
                }));
            }
            "L" => trace.ops.push(TraceOp::ReportLis),
            "Q" => {
                let xlo = next_num(&mut toks).with_context(|| ctx("Q needs 4 bounds"))?;
                let xhi = next_num(&mut toks).with_context(|| ctx("Q needs 4 bounds"))?;
                let ylo = next_num(&mut toks).with_context(|| ctx("Q needs 4 bounds"))?;
                let yhi = next_num(&mut toks).with_context(|| ctx("Q needs 4 bounds"))?;
                if xlo >= xhi || ylo >= yhi {
                    bail!("line {}: degenerate rectangle", lineno + 1);
                }
                trace.ops.push(TraceOp::QueryRect(Rect::new(xlo, xhi, ylo, yhi)));
            }
            other => bail!("line {}: unknown op {other:?}", lineno + 1),
        }
        if toks.next().is_some() {
            bail!("line {}: trailing tokens", lineno + 1);
        }
        saw_op = true;
    }
    Ok(trace)
}

fn next_num<'a>(toks: &mut impl Iterator<Item = &'a str>) -> Result<i64> {
    toks.next()
        .ok_or_else(|| anyhow!("missing argument"))?
        .parse()
        .map_err(|e| anyhow!("bad number: {e}"))
}
