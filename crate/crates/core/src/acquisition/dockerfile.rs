//! Extracts apt and pip installs from Dockerfile `RUN` instructions.

use super::requirements::requirement_name;
use super::Transaction;
use crate::package::System;

/// Command separators recognised inside a `RUN` command string.
pub const SEPARATORS: [&str; 3] = ["&&", "||", ";"];

fn escape_char(text: &str) -> char {
    for line in text.lines() {
        let trimmed = line.trim();
        let Some(directive) = trimmed.strip_prefix('#') else {
            break;
        };
        let directive = directive.trim();
        if let Some(value) = directive
            .split_once('=')
            .filter(|(k, _)| k.trim().eq_ignore_ascii_case("escape"))
            .map(|(_, v)| v.trim())
        {
            if value == "`" {
                return '`';
            }
        }
    }
    '\\'
}

/// Logical instruction lines: comments dropped, continuations joined.
fn instructions(text: &str) -> Vec<String> {
    let escape = escape_char(text);
    let mut out = Vec::new();
    let mut current: Option<String> = None;
    for line in text.lines() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let trimmed = line.trim_start();
        if trimmed.starts_with('#') || (current.is_some() && trimmed.is_empty()) {
            continue;
        }
        let (body, continues) = match line.trim_end().strip_suffix(escape) {
            Some(head) => (head, true),
            None => (line, false),
        };
        let acc = current.get_or_insert_with(String::new);
        acc.push_str(body);
        if !continues {
            out.push(current.take().unwrap());
        }
    }
    if let Some(rest) = current {
        out.push(rest);
    }
    out
}

fn is_shell(program: &str) -> bool {
    let name = program.rsplit('/').next().unwrap_or(program);
    matches!(name, "sh" | "bash" | "dash" | "ash" | "zsh")
}

/// The command string of every `RUN` instruction. Exec-form arguments are
/// joined with single spaces.
pub fn run_commands(dockerfile: &str) -> Vec<String> {
    let mut out = Vec::new();
    for line in instructions(dockerfile) {
        let line = line.trim();
        let (keyword, mut rest) = match line.split_once(char::is_whitespace) {
            Some((k, r)) => (k, r.trim()),
            None => (line, ""),
        };
        if !keyword.eq_ignore_ascii_case("RUN") {
            continue;
        }
        // BuildKit options (`--mount=...`) precede the command
        while rest.starts_with("--") {
            rest = rest
                .split_once(char::is_whitespace)
                .map(|(_, r)| r.trim_start())
                .unwrap_or("");
        }
        if rest.starts_with('[') {
            if let Ok(args) = serde_json::from_str::<Vec<String>>(rest) {
                out.push(match args.as_slice() {
                    // `["/bin/sh", "-c", "<script>"]` runs the script
                    [shell, flag, script] if is_shell(shell) && flag == "-c" => script.clone(),
                    _ => args.join(" "),
                });
                continue;
            }
        }
        out.push(rest.to_string());
    }
    out
}

/// Splits a command string on `&&`, `||` and `;`.
pub fn split_commands(command: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut start = 0;
    let mut i = 0;
    let bytes = command.as_bytes();
    while i < bytes.len() {
        if let Some(sep) = SEPARATORS
            .iter()
            .find(|sep| bytes[i..].starts_with(sep.as_bytes()))
        {
            parts.push(command[start..i].trim());
            i += sep.len();
            start = i;
        } else {
            i += 1;
        }
    }
    parts.push(command[start..].trim());
    parts.retain(|p| !p.is_empty());
    parts
}

fn unquote(token: &str) -> &str {
    token.trim_matches(|c| c == '"' || c == '\'')
}

/// Options whose value is the next token, which must not be read as a
/// package name.
const PIP_VALUE_OPTIONS: &[&str] = &[
    "-r",
    "--requirement",
    "-c",
    "--constraint",
    "-e",
    "--editable",
    "-i",
    "--index-url",
    "--extra-index-url",
    "-f",
    "--find-links",
    "-t",
    "--target",
    "--prefix",
    "--root",
    "--src",
];
const APT_VALUE_OPTIONS: &[&str] = &[
    "-o",
    "--option",
    "-t",
    "--target-release",
    "-c",
    "--config-file",
];

/// Whitespace-separated, unquoted tokens of one command.
fn tokens(command: &str) -> Vec<&str> {
    command
        .split_whitespace()
        .map(unquote)
        .filter(|t| !t.is_empty())
        .collect()
}

/// Non-flag arguments, also skipping the values of `value_options`.
fn arguments<'a>(tokens: &[&'a str], value_options: &[&str]) -> Vec<&'a str> {
    let mut out = Vec::new();
    let mut skip_next = false;
    for &t in tokens {
        if skip_next {
            skip_next = false;
        } else if t.starts_with('-') {
            skip_next = value_options.contains(&t);
        } else {
            out.push(t);
        }
    }
    out
}

/// Package names installed by one command, before validation.
pub fn install_candidates(command: &str) -> Option<(System, Vec<String>)> {
    let raw = tokens(command);
    let (system, value_options) = match raw.first() {
        Some(&"apt-get") => (System::Apt, APT_VALUE_OPTIONS),
        Some(&"pip") => (System::Pip, PIP_VALUE_OPTIONS),
        _ => return None,
    };
    let args = arguments(&raw, value_options);
    let rest = match (system, args.as_slice()) {
        (System::Apt, ["apt-get", "install", rest @ ..]) => rest,
        (System::Pip, ["pip", "install", rest @ ..]) => rest,
        _ => return None,
    };
    let names = rest
        .iter()
        .filter_map(|arg| match system {
            // `pkg=1.2` pins a version
            System::Apt => arg.split('=').next().filter(|n| !n.is_empty()),
            System::Pip => requirement_name(arg),
        })
        .map(|name| system.normalize(name))
        .collect();
    Some((system, names))
}

/// Items for every apt/pip package installed by the Dockerfile's `RUN`
/// instructions and accepted by the matching known-package predicate.
pub fn extract_dockerfile_packages(
    dockerfile: &str,
    known_apt: impl Fn(&str) -> bool,
    known_pip: impl Fn(&str) -> bool,
) -> Transaction {
    let mut items = Vec::new();
    for run in run_commands(dockerfile) {
        for command in split_commands(&run) {
            let Some((system, names)) = install_candidates(command) else {
                continue;
            };
            for name in names {
                let known = match system {
                    System::Apt => known_apt(&name),
                    System::Pip => known_pip(&name),
                };
                if known {
                    items.push(format!("{}{name}", system.item_prefix()));
                }
            }
        }
    }
    Transaction::new(items).expect("extracted items carry a valid prefix")
}
