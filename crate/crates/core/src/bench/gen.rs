//! Synthetic program families for sweeps.
//!
//! Every generated program is safe by construction unless a bug is planted,
//! in which case exactly one assertion can fail.

use std::fmt::{self, Write};
use std::str::FromStr;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// An else-if chain of guarded blocks, one infeasible assertion path
    /// each.
    Branches,
    /// Counting loops checked like NotZero.
    Loops,
    /// A seeded mix of branch, loop and havoc blocks.
    Mixed,
}

impl FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "branches" => Ok(Family::Branches),
            "loops" => Ok(Family::Loops),
            "mixed" => Ok(Family::Mixed),
            _ => Err(format!("unknown family `{s}` (expected branches, loops or mixed)")),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Branches => "branches",
            Family::Loops => "loops",
            Family::Mixed => "mixed",
        })
    }
}

#[derive(Clone, Copy, Debug)]
enum Block {
    /// `if (x > c) { y = x - c; assert(y > 0); }`
    Branch { c: i64 },
    /// NotZero with bound `-c`.
    Loop { c: i64 },
    /// `havoc y; if (y >= 0) { x = y + c; assert(x >= c); }`
    Havoc { c: i64 },
}

impl Block {
    fn vars(&self, i: usize) -> Vec<String> {
        match self {
            Block::Branch { .. } | Block::Havoc { .. } => vec![format!("x{i}"), format!("y{i}")],
            Block::Loop { .. } => vec![format!("x{i}")],
        }
    }

    fn write(&self, out: &mut String, i: usize, bug: bool) {
        let (x, y) = (format!("x{i}"), format!("y{i}"));
        // The planted bug weakens the assertion just enough to be reachable.
        match *self {
            Block::Branch { c } => {
                let bound = i32::from(bug);
                let _ = write!(
                    out,
                    "if ({x} > {c}) {{\n  {y} = {x} - {c};\n  assert({y} > {bound});\n}}\n"
                );
            }
            Block::Loop { c } => {
                let cmp = if bug { format!("{x} != -{c}") } else { format!("{x} != 0") };
                let _ = write!(
                    out,
                    "if ({x} > 0) {{\n  {x} = -{x};\n}} else {{\n  while ({x} > -{c}) {{\n    {x} = {x} - 1;\n  }}\n}}\nassert({cmp});\n"
                );
            }
            Block::Havoc { c } => {
                let cmp = if bug { ">" } else { ">=" };
                let _ = write!(
                    out,
                    "havoc {y};\nif ({y} >= 0) {{\n  {x} = {y} + {c};\n  assert({x} {cmp} {c});\n}}\n"
                );
            }
        }
    }
}

/// Generates a program of `n` blocks. With `bug`, one block (chosen from
/// the seed) gets an assertion that can fail.
pub fn gen_family(family: Family, n: usize, seed: u64, bug: bool) -> String {
    assert!(n >= 1, "a family needs at least one block");
    let mut rng = StdRng::seed_from_u64(seed);
    let blocks: Vec<Block> = (0..n)
        .map(|i| {
            let step = i as i64 + 1;
            match family {
                Family::Branches => Block::Branch { c: 10 * step },
                Family::Loops => Block::Loop { c: 10 * step },
                Family::Mixed => {
                    let c = rng.gen_range(1..=20);
                    match rng.gen_range(0..3) {
                        0 => Block::Branch { c },
                        1 => Block::Loop { c },
                        _ => Block::Havoc { c },
                    }
                }
            }
        })
        .collect();
    let buggy = bug.then(|| rng.gen_range(0..n));

    let mut out = String::new();
    for (i, b) in blocks.iter().enumerate() {
        for v in b.vars(i + 1) {
            let _ = writeln!(out, "int {v};");
        }
    }
    let texts: Vec<String> = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let mut t = String::new();
            b.write(&mut t, i + 1, buggy == Some(i));
            t
        })
        .collect();
    if family == Family::Branches {
        // An else-if chain: every error path runs through exactly one
        // guarded block, so each path needs its own proof and a diverse
        // selection lands on a different block each time.
        let chain: Vec<&str> = texts.iter().map(|t| t.trim_end()).collect();
        out.push_str(&chain.join(" else "));
        out.push('\n');
    } else {
        texts.iter().for_each(|t| out.push_str(t));
    }
    out
}
