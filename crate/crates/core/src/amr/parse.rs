use std::collections::BTreeMap;

use log::warn;

use super::{AmrError, AmrGraph, Constant, Edge, Role, Target};

// Tokens with byte offsets, plus the `::id` header if any.
type Tokens = (Vec<(Tok, usize)>, Option<String>);

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    Slash,
    Role(String),
    Str(String),
    Sym(String),
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    id: Option<String>,
    stripped_alignments: bool,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            id: None,
            stripped_alignments: false,
        }
    }

    fn tokens(mut self) -> Result<Tokens, AmrError> {
        let mut out = Vec::new();
        while let Some(tok) = self.next_token()? {
            out.push(tok);
        }
        if self.stripped_alignments {
            warn!("stripped alignment markers from PENMAN input");
        }
        Ok((out, self.id))
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn next_token(&mut self) -> Result<Option<(Tok, usize)>, AmrError> {
        loop {
            match self.peek() {
                None => return Ok(None),
                Some(c) if c.is_whitespace() => self.pos += c.len_utf8(),
                Some('#') => {
                    let end = self.src[self.pos..]
                        .find('\n')
                        .map_or(self.src.len(), |i| self.pos + i);
                    let line = &self.src[self.pos..end];
                    if let Some(rest) = line.find("::id").map(|i| &line[i + 4..]) {
                        if let Some(id) = rest.split_whitespace().next() {
                            self.id = Some(id.to_string());
                        }
                    }
                    self.pos = end;
                }
                Some(_) => break,
            }
        }
        let start = self.pos;
        let c = self.peek().expect("checked above");
        let tok = match c {
            '(' => {
                self.pos += 1;
                Tok::Open
            }
            ')' => {
                self.pos += 1;
                Tok::Close
            }
            '/' => {
                self.pos += 1;
                Tok::Slash
            }
            '"' => Tok::Str(self.quoted(start)?),
            ':' => {
                let word = self.word();
                let role = self.strip_alignment(word);
                Tok::Role(role)
            }
            _ => {
                let word = self.word();
                Tok::Sym(self.strip_alignment(word))
            }
        };
        Ok(Some((tok, start)))
    }

    fn word(&mut self) -> &'a str {
        let rest = &self.src[self.pos..];
        let len = rest
            .find(|c: char| c.is_whitespace() || matches!(c, '(' | ')' | '"' | '/'))
            .unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn strip_alignment(&mut self, word: &str) -> String {
        match word.find('~') {
            Some(i) if i > 0 => {
                self.stripped_alignments = true;
                word[..i].to_string()
            }
            _ => word.to_string(),
        }
    }

    fn quoted(&mut self, start: usize) -> Result<String, AmrError> {
        self.pos += 1;
        let mut out = String::new();
        let mut escaped = false;
        for (i, c) in self.src[self.pos..].char_indices() {
            if escaped {
                out.push(c);
                escaped = false;
            } else if c == '\\' {
                escaped = true;
            } else if c == '"' {
                self.pos += i + 1;
                if self.peek() == Some('~') {
                    let _ = self.word();
                    self.stripped_alignments = true;
                }
                return Ok(out);
            } else {
                out.push(c);
            }
        }
        Err(AmrError::Syntax {
            offset: start,
            message: "unterminated string".into(),
        })
    }
}

// Unresolved target: a nested node, a string, or a symbol that is either a
// variable reference or a constant depending on what gets defined.
enum RawTarget {
    Node(String),
    Str(String),
    Sym(String, usize),
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
    end: usize,
    nodes: BTreeMap<String, String>,
    edges: Vec<(String, Role, RawTarget)>,
}

impl Parser {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.toks.get(self.i)
    }

    fn offset(&self) -> usize {
        self.peek().map_or(self.end, |t| t.1)
    }

    fn syntax(&self, message: &str) -> AmrError {
        AmrError::Syntax {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn node(&mut self) -> Result<String, AmrError> {
        let open = self.offset();
        match self.peek() {
            Some((Tok::Open, _)) => self.i += 1,
            _ => return Err(self.syntax("expected `(`")),
        }
        let (var, var_off) = match self.peek() {
            Some((Tok::Sym(v), off)) => (v.clone(), *off),
            None => return Err(AmrError::UnbalancedParens { offset: open }),
            _ => return Err(self.syntax("expected variable")),
        };
        self.i += 1;
        match self.peek() {
            Some((Tok::Slash, _)) => self.i += 1,
            None => return Err(AmrError::UnbalancedParens { offset: open }),
            _ => return Err(self.syntax("expected `/` after variable")),
        }
        let concept = match self.peek() {
            Some((Tok::Sym(c), _)) => c.clone(),
            Some((Tok::Str(c), _)) => c.clone(),
            None => return Err(AmrError::UnbalancedParens { offset: open }),
            _ => return Err(self.syntax("expected concept")),
        };
        self.i += 1;
        if self.nodes.contains_key(&var) {
            return Err(AmrError::DuplicateVariableDefinition {
                var,
                offset: var_off,
            });
        }
        self.nodes.insert(var.clone(), concept);
        loop {
            match self.peek() {
                None => return Err(AmrError::UnbalancedParens { offset: open }),
                Some((Tok::Close, _)) => {
                    self.i += 1;
                    return Ok(var);
                }
                Some((Tok::Role(r), off)) => {
                    let role = Role::parse(r).map_err(|_| AmrError::Syntax {
                        offset: *off,
                        message: format!("invalid role `{r}`"),
                    })?;
                    self.i += 1;
                    // Reserve the slot so edge order follows document order.
                    let slot = self.edges.len();
                    self.edges
                        .push((var.clone(), role, RawTarget::Str(String::new())));
                    let target = match self.peek() {
                        Some((Tok::Open, _)) => RawTarget::Node(self.node()?),
                        Some((Tok::Str(s), _)) => {
                            let s = s.clone();
                            self.i += 1;
                            RawTarget::Str(s)
                        }
                        Some((Tok::Sym(s), off)) => {
                            let t = RawTarget::Sym(s.clone(), *off);
                            self.i += 1;
                            t
                        }
                        None => return Err(AmrError::UnbalancedParens { offset: open }),
                        _ => return Err(self.syntax("expected role target")),
                    };
                    self.edges[slot].2 = target;
                }
                Some((Tok::Slash, _)) => return Err(self.syntax("node has more than one concept")),
                _ => return Err(self.syntax("expected role or `)`")),
            }
        }
    }
}

// Shape of AMR variable names: a short lowercase prefix, optional digits, and
// an optional `_k` collision suffix.
fn looks_like_variable(s: &str) -> bool {
    let (head, suffix) = match s.split_once('_') {
        Some((h, k)) => (h, Some(k)),
        None => (s, None),
    };
    if let Some(k) = suffix {
        if k.is_empty() || !k.bytes().all(|b| b.is_ascii_digit()) {
            return false;
        }
    }
    let letters = head.bytes().take_while(u8::is_ascii_lowercase).count();
    (1..=2).contains(&letters) && head.bytes().skip(letters).all(|b| b.is_ascii_digit())
}

/// Parses a single PENMAN expression. `#` comment lines are skipped and a
/// `# ::id` line, if present, becomes the graph id.
pub fn parse_penman(text: &str) -> Result<AmrGraph, AmrError> {
    let (toks, id) = Lexer::new(text).tokens()?;
    if toks.is_empty() {
        return Err(AmrError::EmptyInput { offset: 0 });
    }
    let mut p = Parser {
        toks,
        i: 0,
        end: text.len(),
        nodes: BTreeMap::new(),
        edges: Vec::new(),
    };
    if let Some((Tok::Close, off)) = p.peek() {
        return Err(AmrError::UnbalancedParens { offset: *off });
    }
    let root = p.node()?;
    if let Some((tok, off)) = p.peek() {
        return Err(match tok {
            Tok::Close => AmrError::UnbalancedParens { offset: *off },
            _ => AmrError::Syntax {
                offset: *off,
                message: "trailing input after graph".into(),
            },
        });
    }
    let mut edges = Vec::with_capacity(p.edges.len());
    for (source, role, raw) in p.edges {
        let target = match raw {
            RawTarget::Node(v) => Target::Node(v),
            RawTarget::Str(s) => Target::Const(Constant::Str(s)),
            RawTarget::Sym(s, off) => {
                if p.nodes.contains_key(&s) {
                    Target::Node(s)
                } else if looks_like_variable(&s) {
                    return Err(AmrError::DanglingVariableReference {
                        var: s,
                        offset: off,
                    });
                } else {
                    Target::Const(Constant::from_symbol(&s))
                }
            }
        };
        edges.push(Edge {
            source,
            role,
            target,
        });
    }
    let g = AmrGraph {
        root,
        nodes: p.nodes,
        edges,
        id,
    };
    debug_assert!(g.validate().is_ok());
    Ok(g)
}

/// Parses a file of blank-line-separated PENMAN blocks.
pub fn parse_penman_blocks(text: &str) -> Result<Vec<AmrGraph>, (usize, AmrError)> {
    let mut out = Vec::new();
    let mut block = String::new();
    let mut block_start = 1;
    let mut flush = |block: &mut String, start: usize| -> Result<(), (usize, AmrError)> {
        let has_graph = block
            .lines()
            .any(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
        if has_graph {
            out.push(parse_penman(block).map_err(|e| (start, e))?);
        }
        block.clear();
        Ok(())
    };
    for (n, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            flush(&mut block, block_start)?;
            block_start = n + 2;
        } else {
            block.push_str(line);
            block.push('\n');
        }
    }
    flush(&mut block, block_start)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const COOK_SOUP: &str = "(c / cook-01
      :mode imperative
      :ARG0 (y / you)
      :ARG1 (a / and
            :op1 (c2 / chicken)
            :op2 (ii / ingredient
                  :mod (o / other)))
      :location (p / pot)
      :duration (t / temporal-quantity
            :quant 20
            :unit (m / minute))
      :manner (h / heat-01
            :mod (m2 / medium))
      :purpose (p2 / prepare-01
            :ARG0 y
            :ARG1 (s / soup)))";

    #[test]
    fn parses_cook_soup() {
        let g = parse_penman(COOK_SOUP).unwrap();
        assert_eq!(g.root_concept(), "cook-01");
        assert_eq!(g.node_count(), 13);
        let mode = g.child("c", &Role::named(":mode")).unwrap();
        assert_eq!(
            mode.target,
            Target::Const(Constant::Symbol("imperative".into()))
        );
        let quant = g.child("t", &Role::named(":quant")).unwrap();
        assert_eq!(quant.target, Target::Const(Constant::Number("20".into())));
        let refs = g
            .edges()
            .iter()
            .filter(|e| e.target == Target::Node("y".into()))
            .count();
        assert_eq!(refs, 2);
        assert_eq!(
            g.child("p2", &Role::named(":ARG0"))
                .unwrap()
                .target
                .as_node(),
            Some("y")
        );
    }

    #[test]
    fn minimal_graph() {
        let g = parse_penman("(a / amr-unknown)").unwrap();
        assert_eq!(g.node_count(), 1);
        assert!(g.edges().is_empty());
    }

    #[test]
    fn three_nodes_two_edges() {
        let g = parse_penman("(m / mix-01 :ARG1 (s / salt) :ARG2 (c / chicken))").unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edges().len(), 2);
    }

    #[test]
    fn error_offsets() {
        assert_eq!(parse_penman("   "), Err(AmrError::EmptyInput { offset: 0 }));
        assert_eq!(
            parse_penman("(a / b :ARG1 (c / d)"),
            Err(AmrError::UnbalancedParens { offset: 0 })
        );
        assert_eq!(
            parse_penman("(a / b))"),
            Err(AmrError::UnbalancedParens { offset: 7 })
        );
        assert_eq!(
            parse_penman("(a / b :ARG1 (a / c))"),
            Err(AmrError::DuplicateVariableDefinition {
                var: "a".into(),
                offset: 14
            })
        );
        assert_eq!(
            parse_penman("(a / b :ARG1 z2)"),
            Err(AmrError::DanglingVariableReference {
                var: "z2".into(),
                offset: 13
            })
        );
        assert!(matches!(
            parse_penman("(a / amr-unknown / and)"),
            Err(AmrError::Syntax { offset: 17, .. })
        ));
    }

    #[test]
    fn forward_references_resolve() {
        let g = parse_penman("(a / and :op1 b :op2 (b / bean))").unwrap();
        assert_eq!(g.edges()[0].target, Target::Node("b".into()));
    }

    #[test]
    fn alignments_and_comments_are_stripped() {
        let g = parse_penman(
            "# ::id r1.0\n# ::snt Cook rice.\n(c / cook-01~e.0 :ARG1~e.1 (r / rice~e.1))",
        )
        .unwrap();
        assert_eq!(g.id(), Some("r1.0"));
        assert_eq!(g.root_concept(), "cook-01");
        assert_eq!(g.concept("r"), Some("rice"));
    }

    #[test]
    fn strings_and_symbols() {
        let g = parse_penman(r#"(n / name :op1 "Gordon \"G\"" :polarity - :value 3.5)"#).unwrap();
        let t: Vec<_> = g.edges().iter().map(|e| e.target.clone()).collect();
        assert_eq!(t[0], Target::Const(Constant::Str("Gordon \"G\"".into())));
        assert_eq!(t[1], Target::Const(Constant::Symbol("-".into())));
        assert_eq!(t[2], Target::Const(Constant::Number("3.5".into())));
    }

    #[test]
    fn blocks() {
        let text = "# ::id r.0\n(a / b)\n\n\n# ::id r.1\n(c / d :ARG1 (e / f))\n";
        let gs = parse_penman_blocks(text).unwrap();
        assert_eq!(gs.len(), 2);
        assert_eq!(gs[1].id(), Some("r.1"));
        let err = parse_penman_blocks("(a / b)\n\n(c / d\n").unwrap_err();
        assert_eq!(err.0, 3);
    }

    #[test]
    fn variable_shape() {
        for v in ["a", "ii", "c2", "s_1", "a10"] {
            assert!(looks_like_variable(v), "{v}");
        }
        for v in ["imperative", "-", "350", "abc", "a_", "A"] {
            assert!(!looks_like_variable(v), "{v}");
        }
    }
}
