use unicode_normalization::UnicodeNormalization;

/// NFKC plus cleanup: control characters dropped, whitespace runs collapsed
/// to one ASCII space, ends trimmed.
///
/// Controls are removed *before* composition so that a stripped control can
/// never leave a composable sequence behind; that keeps the function
/// idempotent.
pub fn normalize_text(s: &str) -> String {
    let cleaned = s.chars().filter(|c| c.is_whitespace() || !c.is_control()).nfkc();

    let mut out = String::with_capacity(s.len());
    let mut pending_space = false;
    for c in cleaned {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
            continue;
        }
        if pending_space {
            out.push(' ');
            pending_space = false;
        }
        out.push(c);
    }
    out
}
