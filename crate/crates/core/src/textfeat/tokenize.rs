use alloc::string::{String, ToString};
use alloc::vec::Vec;

/// Replacement token for links.
pub const URL_TOKEN: &str = "<url>";

/// Lowercases, splits on whitespace, collapses links to [`URL_TOKEN`] and
/// trims punctuation from both ends. A leading `#` or `@` is kept.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let lower = raw.to_lowercase();
            if lower.starts_with("http://") || lower.starts_with("https://") {
                return Some(URL_TOKEN.to_string());
            }
            let start = lower.trim_start_matches(|c: char| !c.is_alphanumeric() && c != '#' && c != '@');
            let tok = start.trim_end_matches(|c: char| !c.is_alphanumeric());
            let has_word = tok.chars().any(char::is_alphanumeric);
            has_word.then(|| tok.to_string())
        })
        .collect()
}
