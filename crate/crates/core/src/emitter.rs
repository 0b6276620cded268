//! Dockerfile rendering for an [`InstallPlan`].

use thiserror::Error;

use crate::inference::InstallPlan;
use crate::package::System;

pub const DEFAULT_BASE_IMAGE: &str = "python:2.7.14";
pub const DEFAULT_SNIPPET_NAME: &str = "snippet.py";
/// Where the snippet lives inside the image.
pub const SNIPPET_TARGET: &str = "/snippet.py";

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EmitError {
    #[error("base image must not be empty")]
    EmptyBaseImage,
    #[error("base image {0:?} contains whitespace")]
    BadBaseImage(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DockerfileSpec {
    base_image: String,
    snippet_name: String,
    plan: InstallPlan,
}

/// Final path component, falling back to [`DEFAULT_SNIPPET_NAME`] when
/// nothing usable remains.
pub fn sanitize_snippet_name(name: &str) -> String {
    let base = name.rsplit(['/', '\\']).next().unwrap_or("").trim();
    if base.is_empty() || base == "." || base == ".." || base.chars().any(char::is_whitespace) {
        DEFAULT_SNIPPET_NAME.to_string()
    } else {
        base.to_string()
    }
}

impl DockerfileSpec {
    pub fn new(base_image: &str, snippet_name: &str, plan: InstallPlan) -> Result<Self, EmitError> {
        let base_image = base_image.trim();
        if base_image.is_empty() {
            return Err(EmitError::EmptyBaseImage);
        }
        if base_image.chars().any(char::is_whitespace) {
            return Err(EmitError::BadBaseImage(base_image.to_string()));
        }
        Ok(Self {
            base_image: base_image.to_string(),
            snippet_name: sanitize_snippet_name(snippet_name),
            plan,
        })
    }

    /// Default base image and snippet name.
    pub fn for_plan(plan: InstallPlan) -> Self {
        Self {
            base_image: DEFAULT_BASE_IMAGE.to_string(),
            snippet_name: DEFAULT_SNIPPET_NAME.to_string(),
            plan,
        }
    }

    pub fn base_image(&self) -> &str {
        &self.base_image
    }

    pub fn snippet_name(&self) -> &str {
        &self.snippet_name
    }

    pub fn plan(&self) -> &InstallPlan {
        &self.plan
    }
}

fn exec_form(instruction: &str, args: &[&str]) -> String {
    format!(
        "{instruction} {}",
        serde_json::to_string(args).expect("strings serialize")
    )
}

/// One exec-form `RUN` per plan entry, in plan order, with a single
/// `apt-get update` right before the first apt install.
pub fn render(spec: &DockerfileSpec) -> String {
    let mut lines = vec![
        format!("FROM {}", spec.base_image),
        format!("COPY {} {SNIPPET_TARGET}", spec.snippet_name),
    ];
    let mut updated = false;
    for entry in &spec.plan.entries {
        match entry.key.system() {
            System::Apt => {
                if !updated {
                    lines.push(exec_form("RUN", &["apt-get", "update"]));
                    updated = true;
                }
                lines.push(exec_form(
                    "RUN",
                    &["apt-get", "install", "-y", entry.key.name()],
                ));
            }
            System::Pip => {
                let name = if entry.display_name.is_empty() {
                    entry.key.name()
                } else {
                    &entry.display_name
                };
                lines.push(exec_form("RUN", &["pip", "install", name]));
            }
        }
    }
    lines.push(exec_form("CMD", &["python", SNIPPET_TARGET]));
    let mut out = lines.join("\n");
    out.push('\n');
    out
}
