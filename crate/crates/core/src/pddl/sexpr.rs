use std::fmt;

use super::ParseError;

/// 1-based source position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Sexp {
    Symbol(String, Pos),
    List(Vec<Sexp>, Pos),
}

impl Sexp {
    pub fn pos(&self) -> Pos {
        match self {
            Sexp::Symbol(_, p) | Sexp::List(_, p) => *p,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Sexp::Symbol(s, _) => Some(s),
            Sexp::List(..) => None,
        }
    }

    pub fn as_list(&self) -> Option<&[Sexp]> {
        match self {
            Sexp::List(items, _) => Some(items),
            Sexp::Symbol(..) => None,
        }
    }

    /// The leading symbol of a list, if it has one.
    pub fn head(&self) -> Option<&str> {
        self.as_list()?.first()?.as_symbol()
    }
}

/// Reads zero or more top-level s-expressions. Identifiers are lower-cased;
/// `;` starts a comment that runs to the end of the line.
pub fn read_all(text: &str) -> Result<Vec<Sexp>, ParseError> {
    let mut stack: Vec<(Vec<Sexp>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1u32, 1u32);

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
                let (items, start) = stack.pop().ok_or_else(|| ParseError::Syntax {
                    pos: here,
                    msg: "unbalanced `)`".into(),
                })?;
                let list = Sexp::List(items, start);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(list),
                    None => top.push(list),
                }
            }
            _ => {
                let mut tok = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' || c == ';' {
                        break;
                    }
                    tok.extend(c.to_lowercase());
                    chars.next();
                    col += 1;
                }
                let sym = Sexp::Symbol(tok, here);
                match stack.last_mut() {
                    Some((parent, _)) => parent.push(sym),
                    None => top.push(sym),
                }
            }
        }
    }
    if let Some((_, start)) = stack.pop() {
        return Err(ParseError::Syntax {
            pos: start,
            msg: "unclosed `(`".into(),
        });
    }
    Ok(top)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_case() {
        let v = read_all("; header\n(Define (X ?Y))").unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].pos(), Pos { line: 2, col: 1 });
        let items = v[0].as_list().unwrap();
        assert_eq!(items[0].as_symbol(), Some("define"));
        assert_eq!(items[1].as_list().unwrap()[1].as_symbol(), Some("?y"));
        assert_eq!(items[1].pos(), Pos { line: 2, col: 9 });
    }

    #[test]
    fn unbalanced() {
        assert!(matches!(read_all("(a (b)"), Err(ParseError::Syntax { pos: Pos { line: 1, col: 1 }, .. })));
        assert!(matches!(read_all("a)\n"), Err(ParseError::Syntax { pos: Pos { line: 1, col: 2 }, .. })));
    }
}
