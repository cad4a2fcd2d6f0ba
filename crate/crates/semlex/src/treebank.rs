//! Reader and writer for bracketed constituency trees.
//!
//! The input format is the usual s-expression style: an internal node is
//! `(LABEL child ...)`, a leaf is `(TAG surface)`. A file holds any number of
//! top-level trees separated by whitespace; a line whose first non-blank byte
//! is `#` outside a tree is a comment. Trace leaves tagged `-NONE-` are
//! dropped during parsing and never receive token indices; the common
//! label-less wrapper `( (S ...) )` around a single sentence is unwrapped.

use std::fmt;

use thiserror::Error;

/// Tags whose stripped category counts as clausal for co-occurrence checks.
const S_CLASS: [&str; 5] = ["S", "SBAR", "SINV", "SQ", "SBARQ"];

/// Nesting depth cap; real treebanks stay far below this, and the cap keeps
/// recursion on parsed trees safe no matter what the input looks like.
const MAX_DEPTH: usize = 1024;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("unbalanced parentheses at byte {offset}")]
    Unbalanced { offset: usize },
    #[error("{message} at byte {offset}")]
    Structure { offset: usize, message: &'static str },
    #[error("nesting deeper than {MAX_DEPTH} at byte {offset}")]
    TooDeep { offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Unbalanced { offset }
            | ParseError::Structure { offset, .. }
            | ParseError::TooDeep { offset } => *offset,
        }
    }
}

/// One constituency tree. Token indices run from 0 within each sentence and
/// skip nothing: leaf `index` equals the leaf's position in [`Tree::leaves`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tree {
    Node {
        label: String,
        children: Vec<Tree>,
        /// Inclusive token-index range covered by this node.
        span: (usize, usize),
    },
    Leaf {
        tag: String,
        surface: String,
        index: usize,
    },
}

impl Tree {
    pub fn span(&self) -> (usize, usize) {
        match self {
            Tree::Node { span, .. } => *span,
            Tree::Leaf { index, .. } => (*index, *index),
        }
    }

    /// Node label or leaf tag as written in the source.
    pub fn label(&self) -> &str {
        match self {
            Tree::Node { label, .. } => label,
            Tree::Leaf { tag, .. } => tag,
        }
    }

    /// Label with any functional annotation removed: everything from the
    /// first `-` or `=` past position 0 is dropped, so `NP-SBJ` and `NP=2`
    /// both read as `NP`.
    pub fn category(&self) -> &str {
        strip_annotation(self.label())
    }

    pub fn is_np(&self) -> bool {
        matches!(self, Tree::Node { .. }) && self.category() == "NP"
    }

    /// True for clausal categories (S and its variants) and VP; pairs are
    /// never extracted from an NP that contains one of these.
    pub fn is_clausal_or_vp(&self) -> bool {
        if let Tree::Node { .. } = self {
            let cat = self.category();
            cat == "VP" || S_CLASS.contains(&cat)
        } else {
            false
        }
    }

    pub fn leaf_count(&self) -> usize {
        let (lo, hi) = self.span();
        hi - lo + 1
    }

    /// Leaves in token order.
    pub fn leaves(&self) -> Vec<&Tree> {
        let mut out = Vec::with_capacity(self.leaf_count());
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                Tree::Leaf { .. } => out.push(t),
                Tree::Node { children, .. } => stack.extend(children.iter().rev()),
            }
        }
        out
    }
}

fn strip_annotation(label: &str) -> &str {
    for (i, c) in label.char_indices() {
        if i > 0 && (c == '-' || c == '=') {
            return &label[..i];
        }
    }
    label
}

impl fmt::Display for Tree {
    /// Writes the bracketed form back out; parsing the result yields a tree
    /// equal to this one.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf { tag, surface, .. } => write!(f, "({tag} {surface})"),
            Tree::Node { label, children, .. } => {
                write!(f, "({label}")?;
                for child in children {
                    write!(f, " {child}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Parses every top-level tree in `text`.
///
/// `-NONE-` leaves are removed, along with any internal node left childless
/// by the removal; a sentence that loses all of its leaves this way is
/// omitted from the result. Errors carry the byte offset of the offending
/// input; unclosed trees report the end of input.
pub fn parse_trees(text: &str) -> Result<Vec<Tree>, ParseError> {
    Parser::new(text).run()
}

/// A partially built internal node.
struct Frame {
    label: Option<String>,
    label_offset: usize,
    children: Vec<Tree>,
    /// Set once a bare token has been read, making this frame a leaf.
    surface: Option<String>,
    saw_dropped_leaf: bool,
}

struct Parser<'a> {
    bytes: &'a [u8],
    text: &'a str,
    pos: usize,
    next_index: usize,
    at_line_start: bool,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Parser { bytes: text.as_bytes(), text, pos: 0, next_index: 0, at_line_start: true }
    }

    fn run(mut self) -> Result<Vec<Tree>, ParseError> {
        let mut trees = Vec::new();
        let mut stack: Vec<Frame> = Vec::new();
        loop {
            if stack.is_empty() {
                self.skip_blanks_and_comments();
            } else {
                self.skip_whitespace();
            }
            let Some(b) = self.peek() else {
                return if stack.is_empty() {
                    Ok(trees)
                } else {
                    Err(ParseError::Unbalanced { offset: self.pos })
                };
            };
            match b {
                b'(' => {
                    if stack.len() == MAX_DEPTH {
                        return Err(ParseError::TooDeep { offset: self.pos });
                    }
                    if let Some(top) = stack.last() {
                        if top.surface.is_some() {
                            return Err(ParseError::Structure {
                                offset: self.pos,
                                message: "leaf must hold exactly one surface token",
                            });
                        }
                    }
                    self.pos += 1;
                    self.skip_whitespace();
                    let label_offset = self.pos;
                    let label = if matches!(self.peek(), Some(b'(')) {
                        None
                    } else {
                        Some(self.read_atom()?)
                    };
                    stack.push(Frame {
                        label,
                        label_offset,
                        children: Vec::new(),
                        surface: None,
                        saw_dropped_leaf: false,
                    });
                }
                b')' => {
                    let Some(frame) = stack.pop() else {
                        return Err(ParseError::Unbalanced { offset: self.pos });
                    };
                    let close = self.pos;
                    self.pos += 1;
                    let built = self.close_frame(frame, close)?;
                    match (built, stack.last_mut()) {
                        (Some(tree), Some(parent)) => parent.children.push(tree),
                        (Some(tree), None) => trees.push(tree),
                        (None, Some(parent)) => parent.saw_dropped_leaf = true,
                        (None, None) => {}
                    }
                    // Token indices and spans are per sentence.
                    if stack.is_empty() {
                        self.next_index = 0;
                    }
                }
                _ => {
                    let offset = self.pos;
                    let atom = self.read_atom()?;
                    let Some(top) = stack.last_mut() else {
                        return Err(ParseError::Structure {
                            offset,
                            message: "token outside any tree",
                        });
                    };
                    if top.label.is_none() || !top.children.is_empty() || top.surface.is_some() {
                        return Err(ParseError::Structure {
                            offset,
                            message: "leaf must hold exactly one surface token",
                        });
                    }
                    top.surface = Some(atom);
                }
            }
        }
    }

    /// Turns a completed frame into a tree. Returns `Ok(None)` for dropped
    /// material: `-NONE-` leaves and nodes emptied by their removal.
    fn close_frame(&mut self, frame: Frame, close: usize) -> Result<Option<Tree>, ParseError> {
        let Frame { label, label_offset, children, surface, saw_dropped_leaf } = frame;
        match (label, surface) {
            (Some(tag), Some(surface)) => {
                if tag == "-NONE-" {
                    return Ok(None);
                }
                let index = self.next_index;
                self.next_index += 1;
                Ok(Some(Tree::Leaf { tag, surface, index }))
            }
            (Some(label), None) => {
                if children.is_empty() {
                    if saw_dropped_leaf {
                        return Ok(None);
                    }
                    return Err(ParseError::Structure {
                        offset: close,
                        message: "node has neither children nor a surface token",
                    });
                }
                let span = (children[0].span().0, children[children.len() - 1].span().1);
                Ok(Some(Tree::Node { label, children, span }))
            }
            (None, _) => {
                // Label-less node: accepted only as the conventional
                // single-child wrapper around a whole sentence.
                match children.len() {
                    1 => Ok(children.into_iter().next()),
                    0 if saw_dropped_leaf => Ok(None),
                    0 => Err(ParseError::Structure {
                        offset: label_offset,
                        message: "empty node",
                    }),
                    _ => Err(ParseError::Structure {
                        offset: label_offset,
                        message: "node without a label",
                    }),
                }
            }
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn skip_whitespace(&mut self) {
        while let Some(b) = self.peek() {
            if b == b'\n' {
                self.at_line_start = true;
            } else if !b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
    }

    /// Between trees, additionally skips `#` comment lines.
    fn skip_blanks_and_comments(&mut self) {
        loop {
            self.skip_whitespace();
            if self.at_line_start && self.peek() == Some(b'#') {
                while let Some(b) = self.peek() {
                    if b == b'\n' {
                        break;
                    }
                    self.pos += 1;
                }
            } else {
                return;
            }
        }
    }

    fn read_atom(&mut self) -> Result<String, ParseError> {
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b == b'(' || b == b')' || b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::Structure { offset: start, message: "expected a token" });
        }
        self.at_line_start = false;
        Ok(self.text[start..self.pos].to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn one(text: &str) -> Tree {
        let trees = parse_trees(text).unwrap();
        assert_eq!(trees.len(), 1);
        trees.into_iter().next().unwrap()
    }

    #[test]
    fn parses_leaf_and_node() {
        let t = one("(S (NP (DT a) (NN dog)) (VP (VBZ barks)))");
        assert_eq!(t.label(), "S");
        assert_eq!(t.span(), (0, 2));
        let leaves = t.leaves();
        let surfaces: Vec<_> = leaves
            .iter()
            .map(|l| match l {
                Tree::Leaf { surface, .. } => surface.as_str(),
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(surfaces, ["a", "dog", "barks"]);
    }

    #[test]
    fn token_indices_are_dense_and_ordered() {
        let t = one("(S (NP (NN cats) (CC and) (NNS dogs)) (VP (VB win)))");
        for (i, leaf) in t.leaves().iter().enumerate() {
            assert_eq!(leaf.span(), (i, i));
        }
    }

    #[test]
    fn token_indices_restart_for_each_tree() {
        let trees = parse_trees("(S (NN a) (NN b))\n(S (NP (NN c) (NN d)))\n").unwrap();
        assert_eq!(trees[1].span(), (0, 1));
        for (i, leaf) in trees[1].leaves().iter().enumerate() {
            assert_eq!(leaf.span(), (i, i));
        }
    }

    #[test]
    fn multiple_trees_and_comments() {
        let trees = parse_trees(
            "# corpus header\n(S (NN a))\n# between\n  (S (NN b))\n\n(S (NN c))\n",
        )
        .unwrap();
        assert_eq!(trees.len(), 3);
    }

    #[test]
    fn hash_inside_tree_is_an_atom() {
        let t = one("(S (NN #))");
        assert_eq!(t.to_string(), "(S (NN #))");
    }

    #[test]
    fn none_leaves_are_dropped() {
        let t = one("(S (NP (-NONE- *T*-1)) (NP (NN dog)))");
        // The emptied NP vanishes with its trace.
        assert_eq!(t.to_string(), "(S (NP (NN dog)))");
        assert_eq!(t.span(), (0, 0));
    }

    #[test]
    fn sentence_of_only_traces_is_omitted() {
        let trees = parse_trees("(S (NP (-NONE- *))) (S (NN dog))").unwrap();
        assert_eq!(trees.len(), 1);
        assert_eq!(trees[0].to_string(), "(S (NN dog))");
    }

    #[test]
    fn ptb_wrapper_is_unwrapped() {
        let t = one("( (S (NP (NN dog)) (VP (VBZ barks))) )");
        assert_eq!(t.label(), "S");
    }

    #[test]
    fn unbalanced_open_reports_end_of_input() {
        let text = "(S (NP (NN dog))";
        let err = parse_trees(text).unwrap_err();
        assert_eq!(err, ParseError::Unbalanced { offset: text.len() });
    }

    #[test]
    fn unbalanced_close_reports_its_offset() {
        let err = parse_trees("(S (NN dog)))").unwrap_err();
        assert_eq!(err, ParseError::Unbalanced { offset: 12 });
    }

    #[test]
    fn leaf_with_two_tokens_is_rejected() {
        let err = parse_trees("(S (NN dog cat))").unwrap_err();
        assert!(matches!(err, ParseError::Structure { offset: 11, .. }));
    }

    #[test]
    fn empty_node_is_rejected() {
        assert!(matches!(parse_trees("( )"), Err(ParseError::Structure { .. })));
        assert!(matches!(parse_trees("(NP)"), Err(ParseError::Structure { .. })));
    }

    #[test]
    fn mixed_leaf_and_children_is_rejected() {
        assert!(matches!(parse_trees("(NP dog (NN cat))"), Err(ParseError::Structure { .. })));
        assert!(matches!(parse_trees("(NP (NN cat) dog)"), Err(ParseError::Structure { .. })));
    }

    #[test]
    fn category_stripping() {
        let t = one("(NP-SBJ (NN dog))");
        assert_eq!(t.category(), "NP");
        assert!(t.is_np());
        let t = one("(S=2 (NN dog))");
        assert!(t.is_clausal_or_vp());
        let t = one("(SBARQ (NN dog))");
        assert!(t.is_clausal_or_vp());
        let t = one("(NNP U.S.-based)");
        assert_eq!(t.category(), "NNP");
    }

    #[test]
    fn depth_cap_is_enforced() {
        let mut text = String::new();
        for _ in 0..MAX_DEPTH {
            text.push_str("(A ");
        }
        text.push_str("(NN x)");
        let err = parse_trees(&text).unwrap_err();
        assert!(matches!(err, ParseError::TooDeep { .. }));
    }

    // Strategy for well-formed trees: labels exercise annotation stripping,
    // surfaces stay clear of structural bytes.
    fn arb_tree() -> impl Strategy<Value = String> {
        let label = prop::sample::select(vec!["S", "NP", "NP-SBJ", "VP", "X=2", "FRAG"]);
        let tag = prop::sample::select(vec!["NN", "NNS", "JJ", "CD", ",", "CC", "DT"]);
        let surface = "[a-z]{1,8}";
        let leaf = (tag, surface).prop_map(|(t, s)| format!("({t} {s})"));
        leaf.prop_recursive(5, 64, 4, move |inner| {
            (label.clone(), prop::collection::vec(inner, 1..4))
                .prop_map(|(l, cs)| format!("({l} {})", cs.join(" ")))
        })
    }

    proptest! {
        #[test]
        fn round_trip(text in arb_tree()) {
            let first = parse_trees(&text).unwrap();
            prop_assert_eq!(first.len(), 1);
            let rendered = first[0].to_string();
            let second = parse_trees(&rendered).unwrap();
            prop_assert_eq!(&first[0], &second[0]);
            prop_assert_eq!(rendered, second[0].to_string());
        }

        #[test]
        fn spans_cover_leaves(text in arb_tree()) {
            let tree = one(&text);
            let leaves = tree.leaves();
            prop_assert_eq!(tree.span().0, 0);
            prop_assert_eq!(tree.span().1 + 1, leaves.len());
            prop_assert_eq!(tree.leaf_count(), leaves.len());
        }

        #[test]
        fn parser_never_panics(text in "\\PC{0,200}") {
            let _ = parse_trees(&text);
        }
    }
}
