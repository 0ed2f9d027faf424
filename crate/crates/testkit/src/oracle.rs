//! Reference implementations. Each favors the most literal reading of the
//! definition over speed.

/// BPE by scanning the merge list in rank order and applying the first rule
/// that matches anywhere, at its leftmost position, then starting over.
pub fn naive_bpe(word: &str, merges: &[(String, String)]) -> Vec<String> {
    let mut symbols: Vec<String> = word.chars().map(String::from).collect();
    'restart: loop {
        for (left, right) in merges {
            for pos in 0..symbols.len().saturating_sub(1) {
                if &symbols[pos] == left && &symbols[pos + 1] == right {
                    let merged = format!("{left}{right}");
                    symbols.splice(pos..pos + 2, [merged]);
                    continue 'restart;
                }
            }
        }
        return symbols;
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Text(String),
    Space(String),
    Group(Vec<Node>),
}

/// Parses brace structure. A backslash escapes the next character, so `\{`
/// and `\}` are plain text. Returns `None` when braces are unbalanced or
/// the input ends in a lone backslash.
fn parse_tree(text: &str) -> Option<Vec<Node>> {
    let mut stack: Vec<Vec<Node>> = vec![Vec::new()];
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '{' => stack.push(Vec::new()),
            '}' => {
                let group = stack.pop()?;
                stack.last_mut()?.push(Node::Group(group));
            }
            '\\' => {
                let mut s = String::from('\\');
                let next = chars.next()?;
                s.push(next);
                if next.is_ascii_alphabetic() {
                    while let Some(&n) = chars.peek().filter(|n| n.is_ascii_alphabetic()) {
                        s.push(n);
                        chars.next();
                    }
                }
                stack.last_mut()?.push(Node::Text(s));
            }
            c if c.is_whitespace() => {
                let top = stack.last_mut()?;
                match top.last_mut() {
                    Some(Node::Space(s)) => s.push(c),
                    _ => top.push(Node::Space(c.to_string())),
                }
            }
            c => stack.last_mut()?.push(Node::Text(c.to_string())),
        }
    }
    (stack.len() == 1).then(|| stack.pop().unwrap())
}

fn reduce(nodes: Vec<Node>) -> Vec<Node> {
    nodes
        .into_iter()
        .map(|node| match node {
            Node::Group(children) => {
                let children = reduce(children);
                let mut solid = children.iter().filter(|n| !matches!(n, Node::Space(_)));
                match (solid.next(), solid.next()) {
                    (Some(inner @ Node::Group(_)), None) => inner.clone(),
                    _ => Node::Group(children),
                }
            }
            other => other,
        })
        .collect()
}

fn render(nodes: &[Node], out: &mut String) {
    for node in nodes {
        match node {
            Node::Text(s) | Node::Space(s) => out.push_str(s),
            Node::Group(children) => {
                out.push('{');
                render(children, out);
                out.push('}');
            }
        }
    }
}

/// Removes redundant braces bottom-up on an explicit tree: a group whose
/// only non-space child is a group is replaced by that child.
pub fn strip_braces_tree(text: &str) -> Option<String> {
    let tree = reduce(parse_tree(text)?);
    let mut out = String::new();
    render(&tree, &mut out);
    Some(out)
}

/// Row-wise mean of `rows` (indices into a row-major `source` of width
/// `dim`), accumulated in f64.
pub fn mean_rows(source: &[f32], dim: usize, rows: &[u32]) -> Vec<f64> {
    (0..dim)
        .map(|c| {
            let sum: f64 = rows
                .iter()
                .map(|&r| f64::from(source[r as usize * dim + c]))
                .sum();
            sum / rows.len() as f64
        })
        .collect()
}

/// Textbook dynamic-programming Levenshtein distance.
pub fn levenshtein<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut table = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in table.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in table[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let substitute = table[i - 1][j - 1] + usize::from(a[i - 1] != b[j - 1]);
            table[i][j] = substitute.min(table[i - 1][j] + 1).min(table[i][j - 1] + 1);
        }
    }
    table[a.len()][b.len()]
}

/// Counts the lexemes of `text` the slow way: one character at a time,
/// dropping whitespace. Environments are fused when `is_env` accepts the
/// name. Only suitable for inputs without a trailing lone backslash.
pub fn count_lexemes(text: &str, is_env: impl Fn(&str) -> bool) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c != '\\' {
            out.push(c.to_string());
            i += 1;
            continue;
        }
        let mut j = i + 1;
        while j < chars.len() && chars[j].is_ascii_alphabetic() {
            j += 1;
        }
        if j == i + 1 {
            out.push(chars[i..i + 2].iter().collect());
            i += 2;
            continue;
        }
        let word: String = chars[i..j].iter().collect();
        if (word == "\\begin" || word == "\\end") && chars.get(j) == Some(&'{') {
            if let Some(close) = chars[j..].iter().position(|&c| c == '}') {
                let name: String = chars[j + 1..j + close].iter().collect();
                if is_env(&name) {
                    out.push(chars[i..=j + close].iter().collect());
                    i = j + close + 1;
                    continue;
                }
            }
        }
        out.push(word);
        i = j;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bpe_reference() {
        let merges = vec![
            ("a".to_string(), "b".to_string()),
            ("ab".to_string(), "c".to_string()),
        ];
        assert_eq!(naive_bpe("abcab", &merges), ["abc", "ab"]);
        assert_eq!(naive_bpe("", &merges), Vec::<String>::new());
    }

    #[test]
    fn brace_tree() {
        assert_eq!(strip_braces_tree("{{x}}").as_deref(), Some("{x}"));
        assert_eq!(strip_braces_tree("{ {x} }").as_deref(), Some("{x}"));
        assert_eq!(strip_braces_tree("{{a}{b}}").as_deref(), Some("{{a}{b}}"));
        assert_eq!(strip_braces_tree("\\{{x}\\}").as_deref(), Some("\\{{x}\\}"));
        assert_eq!(strip_braces_tree("{x"), None);
    }

    #[test]
    fn edit_distance() {
        assert_eq!(levenshtein(b"kitten", b"sitting"), 3);
        assert_eq!(levenshtein::<u8>(&[], b"ab"), 2);
    }

    #[test]
    fn lexeme_count() {
        let env = |n: &str| n == "matrix";
        assert_eq!(
            count_lexemes("\\begin{matrix} a \\\\ \\alpha2\\end{cases}", env),
            [
                "\\begin{matrix}",
                "a",
                "\\\\",
                "\\alpha",
                "2",
                "\\end",
                "{",
                "c",
                "a",
                "s",
                "e",
                "s",
                "}"
            ]
        );
    }
}
