//! Terminal output helpers.

/// ANSI color is opt-in through the QHL_COLOR environment variable.
pub fn use_color() -> bool {
    matches!(
        std::env::var("QHL_COLOR").ok().as_deref(),
        Some("1") | Some("true") | Some("yes")
    )
}

pub fn paint(text: &str, code: &str, on: bool) -> String {
    if on {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}
