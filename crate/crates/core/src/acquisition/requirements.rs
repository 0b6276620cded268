//! A small PEP 508 subset: enough of a requirements file to recover the
//! package names it installs.

use std::collections::BTreeSet;

use crate::package::System;

/// `requirements.txt` or `requirements-<env>.txt`.
pub fn is_requirements_file_name(file_name: &str) -> bool {
    if file_name == "requirements.txt" {
        return true;
    }
    file_name
        .strip_prefix("requirements-")
        .and_then(|rest| rest.strip_suffix(".txt"))
        .is_some_and(|env| !env.is_empty())
}

/// The distribution name at the start of a requirement specifier, or `None`
/// for URL/path requirements and anything that does not start with a name.
///
/// `raven[flask]>=6.0` gives `raven`; `pkg @ https://...` gives `None`.
pub fn requirement_name(spec: &str) -> Option<&str> {
    let spec = spec.trim();
    let bytes = spec.as_bytes();
    if !bytes.first()?.is_ascii_alphanumeric() {
        return None;
    }
    let mut end = spec
        .find(|c: char| !(c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '-')))
        .unwrap_or(spec.len());
    // names end in an alphanumeric
    while end > 0 && !bytes[end - 1].is_ascii_alphanumeric() {
        end -= 1;
    }
    let (name, rest) = spec.split_at(end);
    let mut rest = rest.trim_start();
    if let Some(after) = rest.strip_prefix('[') {
        rest = after.split_once(']').map(|(_, r)| r)?.trim_start();
    }
    match rest.chars().next() {
        None => Some(name),
        Some('@') => None,
        Some('<' | '>' | '=' | '!' | '~' | ';' | '(' | ',') => Some(name),
        Some(_) => None,
    }
}

fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_ws {
            return &line[..i];
        }
        prev_ws = c.is_whitespace();
    }
    line
}

/// Joins `\`-continued lines.
fn logical_lines(contents: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut current = String::new();
    for line in contents.lines() {
        match line.strip_suffix('\\') {
            Some(head) => current.push_str(head),
            None => {
                current.push_str(line);
                out.push(std::mem::take(&mut current));
            }
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}

/// Prefixed `pip_` items for every requirement line whose name passes
/// `known_pip`. Options (`-r`, `-e`, `--hash`...), URLs and paths are skipped.
/// Files not following the requirements naming convention yield nothing.
pub fn extract_requirements_packages(
    file_name: &str,
    contents: &str,
    known_pip: impl Fn(&str) -> bool,
) -> BTreeSet<String> {
    let mut items = BTreeSet::new();
    if !is_requirements_file_name(file_name) {
        return items;
    }
    for line in logical_lines(contents) {
        let line = strip_comment(&line).trim();
        if line.is_empty() || line.starts_with('-') || line.contains("://") {
            continue;
        }
        let Some(name) = requirement_name(line) else {
            continue;
        };
        let normalized = System::Pip.normalize(name);
        if known_pip(&normalized) {
            items.insert(format!("{}{normalized}", System::Pip.item_prefix()));
        }
    }
    items
}
