//! LaTeX snippet builders and a syntactic checker.

use super::{Plot, Table};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum LatexError {
    #[error("unbalanced braces at byte {0}")]
    UnbalancedBrace(usize),
    #[error("\\end{{{found}}} closes \\begin{{{expected}}}")]
    MismatchedEnd { expected: String, found: String },
    #[error("\\end{{{0}}} without \\begin")]
    UnexpectedEnd(String),
    #[error("environment {0} is never closed")]
    Unclosed(String),
    #[error("malformed \\{0}")]
    Malformed(&'static str),
}

pub fn escape_latex(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\textbackslash{}"),
            '&' | '%' | '$' | '#' | '_' | '{' | '}' => {
                out.push('\\');
                out.push(c);
            }
            '~' => out.push_str("\\textasciitilde{}"),
            '^' => out.push_str("\\textasciicircum{}"),
            _ => out.push(c),
        }
    }
    out
}

/// `fig:<request_id>:<name>` style labels.
pub fn label(prefix: &str, request_id: &str, name: &str) -> String {
    format!("{prefix}:{request_id}:{name}")
}

fn environment_name(src: &str, after: usize) -> Option<(String, usize)> {
    let rest = &src[after..];
    let rest_trim = rest.strip_prefix('{')?;
    let end = rest_trim.find('}')?;
    Some((rest_trim[..end].to_string(), after + 1 + end + 1))
}

/// Balanced `{}` (ignoring `\{` and `\}`) and properly nested environments.
pub fn check_latex(src: &str) -> Result<(), LatexError> {
    let bytes = src.as_bytes();
    let mut depth: i64 = 0;
    let mut envs: Vec<String> = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        match bytes[i] {
            b'\\' => {
                if i + 1 < bytes.len() && matches!(bytes[i + 1], b'{' | b'}' | b'\\' | b'%') {
                    i += 2;
                    continue;
                }
                if src[i + 1..].starts_with("begin") {
                    let (name, _) = environment_name(src, i + 6).ok_or(LatexError::Malformed("begin"))?;
                    envs.push(name);
                } else if src[i + 1..].starts_with("end") {
                    let (name, _) = environment_name(src, i + 4).ok_or(LatexError::Malformed("end"))?;
                    match envs.pop() {
                        Some(open) if open == name => {}
                        Some(open) => {
                            return Err(LatexError::MismatchedEnd { expected: open, found: name });
                        }
                        None => return Err(LatexError::UnexpectedEnd(name)),
                    }
                }
                i += 1;
            }
            b'%' => {
                // comment to end of line
                while i < bytes.len() && bytes[i] != b'\n' {
                    i += 1;
                }
            }
            b'{' => {
                depth += 1;
                i += 1;
            }
            b'}' => {
                depth -= 1;
                if depth < 0 {
                    return Err(LatexError::UnbalancedBrace(i));
                }
                i += 1;
            }
            _ => i += 1,
        }
    }
    if depth != 0 {
        return Err(LatexError::UnbalancedBrace(bytes.len()));
    }
    if let Some(open) = envs.pop() {
        return Err(LatexError::Unclosed(open));
    }
    Ok(())
}

pub fn figure(request_id: &str, plot: &Plot, text: &str, caption: &str) -> String {
    format!(
        "{text}\n\n\\begin{{figure}}[htb]\n\\centering\n\\includesvg[width=0.8\\linewidth]{{{}}}\n\\caption{{{caption}}}\n\\label{{{}}}\n\\end{{figure}}\n",
        plot.file.trim_end_matches(".svg"),
        label("fig", request_id, &plot.name),
    )
}

pub fn table(request_id: &str, t: &Table, text: &str, caption: &str) -> String {
    let mut s = format!("{text}\n\n\\begin{{table}}[htb]\n\\centering\n\\caption{{{caption}}}\n\\label{{{}}}\n", label("tab", request_id, &t.name));
    let spec: String = std::iter::once("l").chain(std::iter::repeat_n("r", t.headers.len().saturating_sub(1))).collect();
    s.push_str(&format!("\\begin{{tabular}}{{{spec}}}\n\\hline\n"));
    let row = |cells: &[String]| cells.iter().map(|c| escape_latex(c)).collect::<Vec<_>>().join(" & ") + " \\\\\n";
    s.push_str(&row(&t.headers));
    s.push_str("\\hline\n");
    for r in &t.rows {
        s.push_str(&row(r));
    }
    s.push_str("\\hline\n\\end{tabular}\n\\end{table}\n");
    s
}
