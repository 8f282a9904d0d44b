//! Construction expressions naming finite dendroidal sets, e.g.
//! `union(repr(e[c[a,b],d]), nerve(z2.json))` or `horn(C(2,2), bk)`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use thiserror::Error;

use crate::dset::{self, DSet, DendMap, SimplicialSetFin};
use crate::kan::HornProblem;
use crate::omega::{self, FaceLabel};
use crate::smc::PermutativeGroupoid;
use crate::tree::{Tree, TreeReader};

#[derive(Debug, Error)]
pub enum ExprError {
    #[error("parse error at byte {position}: {message}")]
    Parse { position: usize, message: String },
    #[error("at byte {position}: {message}")]
    Invalid { position: usize, message: String },
    #[error("{}: {message}", path.display())]
    File { path: PathBuf, message: String },
}

/// A tree argument, remembering the grafted-corolla shorthand so that its
/// labels `bk`, `v` and `w` can be resolved.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeArg {
    pub tree: Arc<Tree>,
    pub grafted: Option<(usize, usize)>,
    pub position: usize,
}

impl TreeArg {
    /// Resolves a horn label: an edge name, `@name` for the outer face
    /// chopping the vertex above `name`, or an alias for `C(n,k)`.
    pub fn label(&self, text: &str, position: usize) -> Result<FaceLabel, ExprError> {
        let t = &self.tree;
        if let Some((_, k)) = self.grafted {
            let bk = t.edge_by_name(&format!("b{k}")).expect("grafted corollas have bk");
            let alias = match text {
                "bk" => Some(FaceLabel::Inner(bk)),
                "v" => t.vertex_above(bk).map(FaceLabel::Outer),
                "w" => t.vertex_above(t.root()).map(FaceLabel::Outer),
                _ => None,
            };
            if let Some(a) = alias {
                return Ok(a);
            }
        }
        FaceLabel::parse(t, text).map_err(|_| ExprError::Invalid {
            position,
            message: format!("`{text}` is not a horn label of {t}"),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Label {
    pub text: String,
    pub position: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    Repr(TreeArg),
    Horn(TreeArg, Label),
    Boundary(TreeArg),
    Core(TreeArg),
    Eta,
    Empty,
    Terminal,
    Union(Vec<Expr>),
    Simplicial(PathBuf),
    Nerve(PathBuf),
    Attach {
        base: Box<Expr>,
        tree: TreeArg,
        label: Label,
        map: PathBuf,
    },
    Quotient(Box<Expr>, Box<Expr>),
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tree = |t: &TreeArg| match t.grafted {
            Some((n, k)) => format!("C({n},{k})"),
            None => t.tree.to_string(),
        };
        match self {
            Expr::Repr(t) => write!(f, "repr({})", tree(t)),
            Expr::Horn(t, a) => write!(f, "horn({}, {})", tree(t), a.text),
            Expr::Boundary(t) => write!(f, "boundary({})", tree(t)),
            Expr::Core(t) => write!(f, "core({})", tree(t)),
            Expr::Eta => f.write_str("eta"),
            Expr::Empty => f.write_str("empty"),
            Expr::Terminal => f.write_str("terminal"),
            Expr::Union(parts) => {
                let parts: Vec<String> = parts.iter().map(ToString::to_string).collect();
                write!(f, "union({})", parts.join(", "))
            }
            Expr::Simplicial(p) => write!(f, "simplicial({})", p.display()),
            Expr::Nerve(p) => write!(f, "nerve({})", p.display()),
            Expr::Attach { base, tree: t, label, map } => {
                write!(f, "attach({base}, {}, {}, {})", tree(t), label.text, map.display())
            }
            Expr::Quotient(d, d0) => write!(f, "quotient({d}, {d0})"),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> ExprError {
        ExprError::Parse {
            position: self.pos,
            message: message.into(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn expect(&mut self, c: char) -> Result<(), ExprError> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn ident(&mut self) -> Result<String, ExprError> {
        self.skip_ws();
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        if len == 0 {
            return Err(self.error("expected a name"));
        }
        let s = self.rest()[..len].to_string();
        self.pos += len;
        Ok(s)
    }

    fn number(&mut self) -> Result<usize, ExprError> {
        self.skip_ws();
        let len = self.rest().find(|c: char| !c.is_ascii_digit()).unwrap_or(self.rest().len());
        let n = self.rest()[..len].parse().map_err(|_| self.error("expected a number"))?;
        self.pos += len;
        Ok(n)
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        self.skip_ws();
        let start = self.pos;
        let head = self.ident()?;
        let e = match head.as_str() {
            "eta" => Expr::Eta,
            "empty" => Expr::Empty,
            "terminal" => Expr::Terminal,
            "repr" | "boundary" | "core" => {
                self.expect('(')?;
                let t = self.tree()?;
                self.expect(')')?;
                match head.as_str() {
                    "repr" => Expr::Repr(t),
                    "boundary" => Expr::Boundary(t),
                    _ => Expr::Core(t),
                }
            }
            "horn" => {
                self.expect('(')?;
                let t = self.tree()?;
                self.expect(',')?;
                let a = self.label()?;
                self.expect(')')?;
                Expr::Horn(t, a)
            }
            "union" => {
                self.expect('(')?;
                let mut parts = vec![self.expr()?];
                while self.peek() == Some(',') {
                    self.pos += 1;
                    parts.push(self.expr()?);
                }
                self.expect(')')?;
                Expr::Union(parts)
            }
            "simplicial" | "nerve" => {
                self.expect('(')?;
                let p = self.path()?;
                self.expect(')')?;
                if head == "nerve" {
                    Expr::Nerve(p)
                } else {
                    Expr::Simplicial(p)
                }
            }
            "attach" => {
                self.expect('(')?;
                let base = Box::new(self.expr()?);
                self.expect(',')?;
                let tree = self.tree()?;
                self.expect(',')?;
                let label = self.label()?;
                self.expect(',')?;
                let map = self.path()?;
                self.expect(')')?;
                Expr::Attach { base, tree, label, map }
            }
            "quotient" => {
                self.expect('(')?;
                let d = Box::new(self.expr()?);
                self.expect(',')?;
                let d0 = Box::new(self.expr()?);
                self.expect(')')?;
                Expr::Quotient(d, d0)
            }
            other => {
                return Err(ExprError::Parse {
                    position: start,
                    message: format!("unknown constructor `{other}`"),
                })
            }
        };
        Ok(e)
    }

    fn tree(&mut self) -> Result<TreeArg, ExprError> {
        self.skip_ws();
        let position = self.pos;
        if let Some(after) = self.rest().strip_prefix('C') {
            if after.trim_start().starts_with('(') {
                self.pos += 1;
                self.expect('(')?;
                let n = self.number()?;
                let k = if self.peek() == Some(',') {
                    self.pos += 1;
                    Some(self.number()?)
                } else {
                    None
                };
                self.expect(')')?;
                return Ok(match k {
                    None => TreeArg {
                        tree: Arc::new(Tree::corolla(n)),
                        grafted: None,
                        position,
                    },
                    Some(0) => {
                        return Err(ExprError::Invalid {
                            position,
                            message: "C(n,k) needs k >= 1".into(),
                        })
                    }
                    Some(k) => TreeArg {
                        tree: Arc::new(Tree::grafted_corollas(n, k)),
                        grafted: Some((n, k)),
                        position,
                    },
                });
            }
        }
        let mut reader = TreeReader::new(self.rest());
        let tree = reader.tree().map_err(|e| ExprError::Parse {
            position: position + e.position,
            message: e.message,
        })?;
        self.pos += reader.pos;
        Ok(TreeArg {
            tree: Arc::new(tree),
            grafted: None,
            position,
        })
    }

    fn label(&mut self) -> Result<Label, ExprError> {
        self.skip_ws();
        let position = self.pos;
        let at = if self.rest().starts_with('@') {
            self.pos += 1;
            "@"
        } else {
            ""
        };
        let name = self.ident()?;
        Ok(Label {
            text: format!("{at}{name}"),
            position,
        })
    }

    fn path(&mut self) -> Result<PathBuf, ExprError> {
        self.skip_ws();
        let len = self.rest().find([',', ')']).unwrap_or(self.rest().len());
        let p = self.rest()[..len].trim_end();
        if p.is_empty() {
            return Err(self.error("expected a file path"));
        }
        self.pos += len;
        Ok(PathBuf::from(p))
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(e)
}

/// Parses a tree argument on its own: tree grammar, `C(n)` or `C(n,k)`.
pub fn parse_tree(src: &str) -> Result<TreeArg, ExprError> {
    let mut p = Parser { src, pos: 0 };
    let t = p.tree()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.error("trailing input"));
    }
    Ok(t)
}

fn read(path: &Path) -> Result<String, ExprError> {
    std::fs::read_to_string(path).map_err(|e| ExprError::File {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

fn file_error(path: &Path, message: impl ToString) -> ExprError {
    ExprError::File {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

pub fn load_simplicial(path: &Path) -> Result<SimplicialSetFin, ExprError> {
    read(path)?.parse().map_err(|e| file_error(path, e))
}

/// Loads a groupoid table and validates the permutative structure.
pub fn load_groupoid(path: &Path) -> Result<PermutativeGroupoid, ExprError> {
    let p = PermutativeGroupoid::from_json(&read(path)?).map_err(|e| file_error(path, e))?;
    p.validate().map_err(|e| file_error(path, e))?;
    Ok(p)
}

/// An attaching map file: either `index = N`, picking the `N`-th horn map
/// in enumeration order, or one `LABEL = K` line per face of the horn,
/// sending that face to the `K`-th dendrex of its shape.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapSpec {
    Index(usize),
    Faces(Vec<(String, usize)>),
}

impl MapSpec {
    pub fn parse(text: &str) -> Result<MapSpec, String> {
        let mut faces = Vec::new();
        let mut index = None;
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `LABEL = K`", n + 1))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| format!("line {}: `{}` is not a number", n + 1, value.trim()))?;
            match key.trim() {
                "index" => index = Some(value),
                k => faces.push((k.to_string(), value)),
            }
        }
        match (index, faces.is_empty()) {
            (Some(i), true) => Ok(MapSpec::Index(i)),
            (None, false) => Ok(MapSpec::Faces(faces)),
            (Some(_), false) => Err("use either `index = N` or face lines, not both".into()),
            (None, true) => Err("empty map file".into()),
        }
    }
}

/// The attaching map `Λ^a[T] → d` described by `spec`.
pub fn attaching_map(d: &DSet, t: &TreeArg, a: FaceLabel, spec: &MapSpec) -> Result<DendMap, String> {
    let h = dset::horn(&t.tree, a).map_err(|e| e.to_string())?;
    let values = match spec {
        MapSpec::Index(i) => {
            let maps = HornProblem::new(d, &t.tree, a).map_err(|e| e.to_string())?.horn_maps();
            let count = maps.len();
            maps.into_iter()
                .nth(*i)
                .ok_or_else(|| format!("index {i} out of range: the horn has {count} maps"))?
                .values
        }
        MapSpec::Faces(lines) => {
            let faces: Vec<_> = omega::faces(&t.tree).into_iter().filter(|f| f.label != a).collect();
            let mut values = vec![None; faces.len()];
            for (text, k) in lines {
                let b = t.label(text, 0).map_err(|_| format!("`{text}` is not a face label"))?;
                let slot = faces
                    .iter()
                    .position(|f| f.label == b)
                    .ok_or_else(|| format!("`{text}` is the missing face of the horn"))?;
                let xs = d.dendrices(faces[slot].map.source());
                let x = xs
                    .get(*k)
                    .ok_or_else(|| format!("face `{text}`: index {k} out of range ({} dendrices)", xs.len()))?;
                if values[slot].replace(x.clone()).is_some() {
                    return Err(format!("face `{text}` given twice"));
                }
            }
            values
                .into_iter()
                .zip(&faces)
                .map(|(v, f)| v.ok_or_else(|| format!("no value for face `{}`", f.label.render(&t.tree))))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(h.extend(d, values))
}

/// Builds the dendroidal set named by `e`. Relative file paths are read
/// from the working directory.
pub fn evaluate(e: &Expr) -> Result<DSet, ExprError> {
    Ok(match e {
        Expr::Repr(t) => dset::representable(&t.tree),
        Expr::Horn(t, a) => {
            let label = t.label(&a.text, a.position)?;
            dset::horn(&t.tree, label).expect("resolved label").as_dset()
        }
        Expr::Boundary(t) => dset::boundary(&t.tree).as_dset(),
        Expr::Core(t) => dset::segal_core(&t.tree).as_dset(),
        Expr::Eta => dset::representable(&Arc::new(Tree::eta())),
        Expr::Empty => dset::empty(),
        Expr::Terminal => dset::terminal(),
        Expr::Union(parts) => {
            let parts = parts.iter().map(evaluate).collect::<Result<Vec<_>, _>>()?;
            dset::disjoint_union(parts).0
        }
        Expr::Simplicial(p) => dset::i_shriek(&load_simplicial(p)?),
        Expr::Nerve(p) => dset::nerve(&load_groupoid(p)?),
        Expr::Attach { base, tree, label, map } => {
            let d = evaluate(base)?;
            let a = tree.label(&label.text, label.position)?;
            let spec = MapSpec::parse(&read(map)?).map_err(|m| file_error(map, m))?;
            let f = attaching_map(&d, tree, a, &spec).map_err(|m| file_error(map, m))?;
            dset::attach_cell(&d, &tree.tree, a, &f).map_err(|err| file_error(map, err))?.0
        }
        Expr::Quotient(d, d0) => {
            let big = evaluate(d)?;
            let small = evaluate(d0)?;
            let inclusion = DendMap::token_inclusion(&small, &big);
            dset::quotient(&inclusion)
                .map_err(|err| ExprError::Invalid {
                    position: 0,
                    message: format!("`{d0}` is not a subobject of `{d}`: {err}"),
                })?
                .0
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kzero::k0;

    fn group(src: &str) -> String {
        k0(&evaluate(&parse(src).unwrap()).unwrap()).render()
    }

    #[test]
    fn examples() {
        assert_eq!(group("repr(e[c[a,b],d])"), "Z^3");
        assert_eq!(group("horn(C(2,2), bk)"), "Z^3");
        assert_eq!(group("empty"), "0");
        assert_eq!(group("terminal"), "0");
        assert_eq!(group("eta"), "Z");
        assert_eq!(group("union(repr(C(2)), eta)"), "Z^3");
        assert_eq!(group("quotient(repr(C(2)), boundary(C(2)))"), "0");
        assert_eq!(group("quotient(repr(C(3)), core(C(3)))"), "0");
        assert_eq!(group("horn(C(0,1), v)"), "0");
        assert_eq!(group("horn(r[x[]], @x)"), "0");
    }

    #[test]
    fn grafted_aliases() {
        let t = parse_tree("C(2,3)").unwrap();
        let names = |a: FaceLabel| a.render(&t.tree);
        assert_eq!(names(t.label("bk", 0).unwrap()), "b3");
        assert_eq!(names(t.label("v", 0).unwrap()), "@b3");
        assert_eq!(names(t.label("w", 0).unwrap()), "@c");
    }

    #[test]
    fn errors_have_positions() {
        let pos = |s: &str| match parse(s) {
            Err(ExprError::Parse { position, .. }) => position,
            other => panic!("{other:?}"),
        };
        assert_eq!(pos("repr(e[c[a,b],d]"), 16);
        assert_eq!(pos("frob(x)"), 0);
        assert_eq!(pos("repr(a[b,b])"), 9);
        assert_eq!(pos("union(eta, "), 11);
        assert!(matches!(
            evaluate(&parse("horn(C(2), zz)").unwrap()),
            Err(ExprError::Invalid { position: 11, .. })
        ));
    }

    #[test]
    fn display_reparses() {
        for s in ["horn(C(2,2), bk)", "union(repr(e[c[a,b],d]), empty)", "quotient(repr(a[b]), boundary(a[b]))"] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e);
        }
    }

    #[test]
    fn map_files() {
        assert_eq!(MapSpec::parse("index = 3\n").unwrap(), MapSpec::Index(3));
        assert_eq!(
            MapSpec::parse("# faces\na1 = 0\nb = 1").unwrap(),
            MapSpec::Faces(vec![("a1".into(), 0), ("b".into(), 1)])
        );
        assert!(MapSpec::parse("index = 1\na = 2").is_err());
        assert!(MapSpec::parse("a1 0").is_err());
    }
}
