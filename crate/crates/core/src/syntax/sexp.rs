//! S-expression reader with source positions. `;` starts a line comment.

use std::fmt;

use super::ParseError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Sexp {
    Atom(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Atom(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(v, _) => Some(v),
            Sexp::Atom(..) => None,
        }
    }

    /// Head symbol of a nonempty list whose first element is an atom.
    pub fn head(&self) -> Option<&str> {
        self.as_list()
            .and_then(|v| v.first())
            .and_then(|s| s.as_atom())
    }
}

pub fn error(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError {
        line: pos.line,
        col: pos.col,
        message: msg.into(),
    }
}

/// Reads all top-level expressions.
pub fn read_all(src: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        let here = Pos { line, col };
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' => {
                chars.next();
                col += 1;
                stack.push((Vec::new(), here));
            }
            ')' => {
                chars.next();
                col += 1;
                let (items, start) = stack.pop().ok_or_else(|| error(here, "unbalanced ')'"))?;
                let e = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((v, _)) => v.push(e),
                    None => top.push(e),
                }
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                let e = Sexp::Atom(s, here);
                match stack.last_mut() {
                    Some((v, _)) => v.push(e),
                    None => top.push(e),
                }
            }
        }
    }
    if let Some((_, start)) = stack.last() {
        return Err(error(*start, "unclosed '('"));
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let v = read_all("; hi\n(a (b c))\n  d").unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v[0].pos(), Pos { line: 2, col: 1 });
        assert_eq!(v[1].pos(), Pos { line: 3, col: 3 });
        assert_eq!(v[0].head(), Some("a"));
    }

    #[test]
    fn unbalanced() {
        let e = read_all("(a\n (b)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 1));
        let e = read_all("a)").unwrap_err();
        assert_eq!((e.line, e.col), (1, 2));
    }
}
