//! Text formats: edge lists, tweet tables, word vectors and embeddings.
//!
//! All tabular formats are UTF-8 TSV. Blank lines and lines starting with
//! `#` are skipped in edge and word-vector files.

use std::io::{BufRead, Write};

use relstance_core::data::{
    InteractionKind, InteractionPair, InteractionSet, LabeledTweet, Split, Stance, TweetDataset,
    WordVectorTable,
};
use relstance_core::RelationalEmbedding;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("duplicate tweet id `{0}`")]
    DuplicateId(String),
    #[error("word `{word}` has {got} components, expected {expected}")]
    WordDim {
        word: String,
        expected: usize,
        got: usize,
    },
    #[error("header declares {declared} rows but {found} follow")]
    RowCount { declared: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] relstance_core::Error),
}

type Result<T, E = FormatError> = std::result::Result<T, E>;

fn parse_err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Parse {
        line,
        message: message.into(),
    }
}

fn skippable(line: &str) -> bool {
    let t = line.trim();
    t.is_empty() || t.starts_with('#')
}

fn parse_edge_line(line: &str, n: usize, kind_default: InteractionKind) -> Result<InteractionPair> {
    let cols: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
    let kind = match cols.len() {
        2 => kind_default,
        3 => cols[2]
            .trim()
            .parse()
            .map_err(|_| parse_err(n, format!("unknown interaction kind `{}`", cols[2])))?,
        c => return Err(parse_err(n, format!("expected 2 or 3 tab-separated columns, found {c}"))),
    };
    InteractionPair::new(cols[0], cols[1], kind).map_err(|e| parse_err(n, e.to_string()))
}

/// Parses an edge list, collecting every malformed line instead of stopping
/// at the first one.
pub fn parse_edges_lenient<R: BufRead>(
    reader: R,
    kind_default: InteractionKind,
) -> Result<(InteractionSet, Vec<FormatError>)> {
    let mut set = InteractionSet::new();
    let mut errors = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if skippable(&line) {
            continue;
        }
        match parse_edge_line(&line, i + 1, kind_default) {
            Ok(p) => set.push(p),
            Err(e) => errors.push(e),
        }
    }
    Ok((set, errors))
}

/// `source<TAB>target[<TAB>kind]` per line; an explicit kind overrides
/// `kind_default`. Fails on the first malformed line.
pub fn parse_edges<R: BufRead>(reader: R, kind_default: InteractionKind) -> Result<InteractionSet> {
    let (set, mut errors) = parse_edges_lenient(reader, kind_default)?;
    if errors.is_empty() {
        Ok(set)
    } else {
        Err(errors.swap_remove(0))
    }
}

/// Writes every pair with an explicit kind column.
pub fn serialize_edges<W: Write>(set: &InteractionSet, mut w: W) -> Result<()> {
    for p in set {
        writeln!(w, "{}\t{}\t{}", p.source, p.target, p.kind)?;
    }
    Ok(())
}

pub const TWEET_HEADER: &str = "id\tuser\ttext\tlabel\tsplit";

/// Undoes `\t`, `\n`, `\r` and `\\` escapes in a text field.
pub fn unescape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            Some('\\') => out.push('\\'),
            Some(o) => {
                out.push('\\');
                out.push(o);
            }
            None => out.push('\\'),
        }
    }
    out
}

pub fn escape_text(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\\' => out.push_str("\\\\"),
            _ => out.push(c),
        }
    }
    out
}

/// Header `id user text label split`, then one tweet per line. `NEUTRAL`
/// is read as `NONE`.
pub fn parse_tweets<R: BufRead>(reader: R) -> Result<TweetDataset> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(h) => h?,
        None => return Err(parse_err(1, "missing header line")),
    };
    let cols: Vec<String> = header
        .trim_end_matches('\r')
        .split('\t')
        .map(|c| c.trim().to_ascii_lowercase())
        .collect();
    if cols.join("\t") != TWEET_HEADER {
        return Err(parse_err(1, format!("expected header `{}`", TWEET_HEADER.replace('\t', "<TAB>"))));
    }
    let mut records = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (i, line) in lines.enumerate() {
        let n = i + 2;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.trim_end_matches('\r').split('\t').collect();
        if cols.len() != 5 {
            return Err(parse_err(n, format!("expected 5 tab-separated columns, found {}", cols.len())));
        }
        if cols[0].is_empty() || cols[1].is_empty() {
            return Err(parse_err(n, "empty tweet or user id"));
        }
        let stance: Stance = cols[3]
            .trim()
            .parse()
            .map_err(|_| parse_err(n, format!("unknown label `{}`", cols[3])))?;
        let split: Split = cols[4]
            .trim()
            .parse()
            .map_err(|_| parse_err(n, format!("unknown split `{}`", cols[4])))?;
        if !seen.insert(cols[0].to_string()) {
            return Err(FormatError::DuplicateId(cols[0].to_string()));
        }
        records.push(LabeledTweet {
            tweet_id: cols[0].to_string(),
            author: cols[1].to_string(),
            text: unescape_text(cols[2]),
            stance,
            split,
        });
    }
    Ok(TweetDataset::new(records)?)
}

pub fn write_tweets<W: Write>(data: &TweetDataset, mut w: W) -> Result<()> {
    writeln!(w, "{TWEET_HEADER}")?;
    for t in data.records() {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            t.tweet_id,
            t.author,
            escape_text(&t.text),
            t.stance,
            t.split
        )?;
    }
    Ok(())
}

/// Standard textual word-vector layout: an optional `<count> <dim>` header,
/// then `word v1 ... vdim`. Later duplicates overwrite earlier ones.
pub fn load_word_vectors<R: BufRead>(reader: R) -> Result<WordVectorTable> {
    let mut table: Option<WordVectorTable> = None;
    let mut declared: Option<usize> = None;
    let mut rows = 0usize;
    for (i, line) in reader.lines().enumerate() {
        let n = i + 1;
        let line = line?;
        if skippable(&line) {
            continue;
        }
        let mut parts = line.split_whitespace();
        let word = parts.next().expect("line is not blank");
        let rest: Vec<&str> = parts.collect();
        if table.is_none() && declared.is_none() && rows == 0 && rest.len() == 1 {
            if let (Ok(count), Ok(dim)) = (word.parse::<usize>(), rest[0].parse::<usize>()) {
                if dim == 0 {
                    return Err(parse_err(n, "dimension must be positive"));
                }
                declared = Some(count);
                table = Some(WordVectorTable::new(dim)?);
                continue;
            }
        }
        let v = rest
            .iter()
            .map(|x| {
                x.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| parse_err(n, format!("non-numeric component `{x}` for `{word}`")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let t = match &mut table {
            Some(t) => t,
            None => {
                if v.is_empty() {
                    return Err(parse_err(n, format!("word `{word}` has no components")));
                }
                table.insert(WordVectorTable::new(v.len())?)
            }
        };
        if v.len() != t.dim() {
            return Err(FormatError::WordDim {
                word: word.to_string(),
                expected: t.dim(),
                got: v.len(),
            });
        }
        t.insert(word, v)?;
        rows += 1;
    }
    if let Some(d) = declared {
        if d != rows {
            return Err(FormatError::RowCount {
                declared: d,
                found: rows,
            });
        }
    }
    table.ok_or_else(|| parse_err(0, "no word vectors found"))
}

pub fn write_word_vectors<W: Write>(table: &WordVectorTable, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", table.len(), table.dim())?;
    for (word, v) in table.iter() {
        write!(w, "{word}")?;
        for x in v {
            write!(w, " {}", fmt_g9(*x))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// `printf("%.9g")`: nine significant digits, trailing zeros stripped,
/// scientific notation outside `[1e-4, 1e9)`.
pub fn fmt_g9(x: f64) -> String {
    const P: i32 = 9;
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (P - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..P).contains(&exp) {
        let s = format!("{:.*}", (P - 1 - exp) as usize, x);
        strip_zeros(&s).to_string()
    } else {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Header `U D`, then `user v1 ... vD` per user in embedding order.
pub fn write_embedding<W: Write>(emb: &RelationalEmbedding, mut w: W) -> Result<()> {
    writeln!(w, "{} {}", emb.len(), emb.dim())?;
    for (user, row) in emb.iter() {
        write!(w, "{user}")?;
        for x in row {
            write!(w, " {}", fmt_g9(*x))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_embedding<R: BufRead>(reader: R) -> Result<RelationalEmbedding> {
    let mut lines = reader.lines().enumerate();
    let (u, d) = loop {
        match lines.next() {
            None => return Err(parse_err(1, "missing `U D` header")),
            Some((_, l)) if l.as_ref().map_or(false, |l| l.trim().is_empty()) => continue,
            Some((i, l)) => {
                let l = l?;
                let parts: Vec<&str> = l.split_whitespace().collect();
                let parsed = match parts.as_slice() {
                    [u, d] => u.parse::<usize>().ok().zip(d.parse::<usize>().ok()),
                    _ => None,
                };
                break parsed.ok_or_else(|| parse_err(i + 1, "expected `U D` header"))?;
            }
        }
    };
    if d == 0 {
        return Err(parse_err(1, "embedding dimension must be positive"));
    }
    let mut users = Vec::with_capacity(u);
    let mut values = Vec::with_capacity(u * d);
    for (i, line) in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let n = i + 1;
        let mut parts = line.split_whitespace();
        let user = parts.next().expect("line is not blank");
        let row: Vec<f64> = parts
            .map(|x| x.parse::<f64>().map_err(|_| parse_err(n, format!("non-numeric value `{x}`"))))
            .collect::<Result<_>>()?;
        if row.len() != d {
            return Err(parse_err(n, format!("expected {d} values for `{user}`, found {}", row.len())));
        }
        users.push(user.to_string());
        values.extend(row);
    }
    if users.len() != u {
        return Err(FormatError::RowCount {
            declared: u,
            found: users.len(),
        });
    }
    Ok(RelationalEmbedding::new(users, values, d)?)
}
