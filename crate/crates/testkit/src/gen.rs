//! Random inputs. All generators take the RNG explicitly so suites can seed
//! them.

use rand::seq::IndexedRandom;
use rand::Rng;

const ATOMS: &[&str] = &[
    "x", "y", "a", "b", "n", "1", "2", "0", "+", "-", "=", "(", ")", "|", ",", "<", "'",
];

/// A well-formed formula built from single characters, the given commands
/// (used with zero, one or two braced arguments), scripts, groups and
/// environments. Whitespace between items is random but never glues a
/// control word to a following letter.
pub fn formula(rng: &mut impl Rng, commands: &[String], environments: &[String]) -> String {
    let mut out = String::new();
    items(rng, commands, environments, 3, &mut out);
    out
}

fn items(rng: &mut impl Rng, commands: &[String], envs: &[String], depth: u32, out: &mut String) {
    let n = rng.random_range(1..=4);
    for _ in 0..n {
        separator(rng, out);
        item(rng, commands, envs, depth, out);
    }
}

fn separator(rng: &mut impl Rng, out: &mut String) {
    let needs_space = out.rfind('\\').is_some_and(|i| {
        let tail = &out[i + 1..];
        !tail.is_empty() && tail.bytes().all(|b| b.is_ascii_alphabetic())
    });
    match rng.random_range(0..4) {
        0 => out.push_str("  "),
        1 => out.push(' '),
        _ if needs_space => out.push(' '),
        _ => {}
    }
}

fn item(rng: &mut impl Rng, commands: &[String], envs: &[String], depth: u32, out: &mut String) {
    let choice = if depth == 0 {
        rng.random_range(0..2)
    } else {
        rng.random_range(0..6)
    };
    match choice {
        0 => out.push_str(ATOMS.choose(rng).unwrap()),
        1 => match commands.choose(rng) {
            Some(c) => out.push_str(c),
            None => out.push('z'),
        },
        2 => {
            out.push_str(commands.choose(rng).map_or("\\frac", String::as_str));
            for _ in 0..rng.random_range(1..=2) {
                group(rng, commands, envs, depth - 1, out);
            }
        }
        3 => group(rng, commands, envs, depth - 1, out),
        4 => {
            out.push_str(ATOMS.choose(rng).unwrap());
            out.push(if rng.random_bool(0.5) { '^' } else { '_' });
            if rng.random_bool(0.5) {
                out.push_str(["2", "i", "n"].choose(rng).unwrap());
            } else {
                group(rng, commands, envs, depth - 1, out);
            }
        }
        _ => match envs.choose(rng) {
            Some(env) => {
                out.push_str(&format!("\\begin{{{env}}}"));
                items(rng, commands, envs, depth - 1, out);
                out.push_str(" \\\\ ");
                items(rng, commands, envs, depth - 1, out);
                out.push_str(&format!("\\end{{{env}}}"));
            }
            None => group(rng, commands, envs, depth - 1, out),
        },
    }
}

fn group(rng: &mut impl Rng, commands: &[String], envs: &[String], depth: u32, out: &mut String) {
    out.push('{');
    items(rng, commands, envs, depth, out);
    separator(rng, out);
    out.push('}');
}

/// A brace-balanced string over a small alphabet that stresses nesting,
/// whitespace around braces, escaped braces and script operators. Script
/// operators are always followed by an argument.
pub fn brace_string(rng: &mut impl Rng) -> String {
    let mut out = String::new();
    brace_items(rng, 4, &mut out);
    out
}

fn brace_items(rng: &mut impl Rng, depth: u32, out: &mut String) {
    for _ in 0..rng.random_range(0..=4) {
        if rng.random_bool(0.25) {
            out.push_str([" ", "  ", "\t"].choose(rng).unwrap());
        }
        let choice = if depth == 0 {
            rng.random_range(0..3)
        } else {
            rng.random_range(0..7)
        };
        match choice {
            0 => out.push_str(["a", "x", "2", "+"].choose(rng).unwrap()),
            1 => out.push_str(
                ["\\alpha ", "\\{", "\\}", "\\le ", "\\,"]
                    .choose(rng)
                    .unwrap(),
            ),
            2 => {
                out.push_str(["^", "_"].choose(rng).unwrap());
                if rng.random_bool(0.3) {
                    out.push(' ');
                }
                out.push_str(["b", "3", "\\beta"].choose(rng).unwrap());
            }
            3 | 4 => {
                out.push('{');
                brace_items(rng, depth - 1, out);
                out.push('}');
            }
            5 => {
                out.push_str(["^", "_"].choose(rng).unwrap());
                out.push('{');
                brace_items(rng, depth - 1, out);
                out.push('}');
            }
            _ => {
                // Directly nested groups, possibly padded.
                let pad = if rng.random_bool(0.5) { " " } else { "" };
                out.push('{');
                out.push_str(pad);
                out.push('{');
                brace_items(rng, depth - 1, out);
                out.push('}');
                out.push_str(pad);
                out.push('}');
            }
        }
    }
}

/// A merge table over `alphabet`: every merge joins two existing tokens
/// into a new one. Returns the vocabulary (alphabet first, in merge order
/// after that) and the merges in rank order.
pub fn merge_table(
    rng: &mut impl Rng,
    alphabet: &[char],
    merges: usize,
) -> (Vec<String>, Vec<(String, String)>) {
    let mut vocab: Vec<String> = alphabet.iter().map(|c| c.to_string()).collect();
    let mut rules = Vec::new();
    let mut attempts = 0;
    while rules.len() < merges && attempts < merges * 50 {
        attempts += 1;
        let left = vocab.choose(rng).unwrap().clone();
        let right = vocab.choose(rng).unwrap().clone();
        let merged = format!("{left}{right}");
        if merged.chars().count() > 6 || rules.contains(&(left.clone(), right.clone())) {
            continue;
        }
        if !vocab.contains(&merged) {
            vocab.push(merged);
        }
        rules.push((left, right));
    }
    (vocab, rules)
}

/// Every string of length `0..=max_len` over `alphabet`.
pub fn all_strings(alphabet: &[char], max_len: usize) -> Vec<String> {
    let mut all = vec![String::new()];
    let mut frontier = vec![String::new()];
    for _ in 0..max_len {
        frontier = frontier
            .iter()
            .flat_map(|s| {
                alphabet.iter().map(move |c| {
                    let mut t = s.clone();
                    t.push(*c);
                    t
                })
            })
            .collect();
        all.extend(frontier.iter().cloned());
    }
    all
}

/// Finite values spanning several magnitudes and both signs.
pub fn matrix(rng: &mut impl Rng, rows: usize, dim: usize) -> Vec<f32> {
    (0..rows * dim)
        .map(|_| {
            let mag = 10f32.powi(rng.random_range(-3..=3));
            rng.random_range(-1.0f32..1.0) * mag
        })
        .collect()
}

/// `targets` non-empty id lists of length `1..=max_len`, ids below `rows`.
pub fn mapping(rng: &mut impl Rng, targets: usize, rows: usize, max_len: usize) -> Vec<Vec<u32>> {
    (0..targets)
        .map(|_| {
            let len = rng.random_range(1..=max_len);
            (0..len).map(|_| rng.random_range(0..rows as u32)).collect()
        })
        .collect()
}
