//! Generators-and-relations presentations of monoidal structure.
//!
//! 1-cell expressions normalize to *states*: lists of layers, each layer a
//! tensor row of primitive tiles (generators, identity wires, cups, caps,
//! symmetries, rotated generators). 2-cells are sequences of rewrite steps
//! acting on states — a generator applied at a depth inside an identity
//! context, or one of the canonical structural moves of the ambient
//! compact closed bicategory (exchanges of disjoint tiles, slides through
//! symmetries, rewirings of pure permutation blocks, bends through cups and
//! caps, loop fusions). An equation is a parallel pair of such step
//! sequences; validation simulates both sides syntactically and the
//! interpreter checks them pointwise on coend representatives.

pub mod catalog;

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum PresError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("duplicate name `{0}`")]
    DuplicateName(String),
    #[error("boundary mismatch in {context}: expected {expected}, found {found}")]
    BoundaryMismatch {
        context: String,
        expected: String,
        found: String,
    },
    #[error("expression does not normalize to layers: {0}")]
    NotLayered(String),
    #[error("step {index} ({step}) does not apply: {reason}")]
    StepFails {
        index: usize,
        step: String,
        reason: String,
    },
    #[error("equation `{label}`: sides disagree syntactically: {reason}")]
    SidesDisagree { label: String, reason: String },
    #[error("`{0}` is not invertible")]
    NotMarkedInvertible(String),
    #[error("1-cell `{0}` already has a right adjoint")]
    AlreadyExtended(String),
    #[error("presentation does not extend the pseudomonoid data: missing `{0}`")]
    NotAnMExtension(String),
}

/// A signed colour: a generating 0-cell or its dual.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SColour {
    pub colour: String,
    pub dual: bool,
}

impl SColour {
    pub fn plain(c: &str) -> SColour {
        SColour {
            colour: c.to_string(),
            dual: false,
        }
    }

    pub fn dual_of(c: &str) -> SColour {
        SColour {
            colour: c.to_string(),
            dual: true,
        }
    }

    pub fn flip(&self) -> SColour {
        SColour {
            colour: self.colour.clone(),
            dual: !self.dual,
        }
    }
}

impl fmt::Display for SColour {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.dual {
            write!(f, "{}^", self.colour)
        } else {
            write!(f, "{}", self.colour)
        }
    }
}

pub type Word = Vec<SColour>;

pub fn word_str(w: &[SColour]) -> String {
    if w.is_empty() {
        return "ε".into();
    }
    w.iter().map(|s| s.to_string()).collect::<Vec<_>>().join("·")
}

/// Reverse-dual of a word: the boundary a block of wires presents when bent
/// through a cup or cap.
pub fn revdual(w: &[SColour]) -> Word {
    w.iter().rev().map(|s| s.flip()).collect()
}

/// A primitive tile of a layer.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tile {
    /// A generating 1-cell.
    Gen(String),
    /// The right rotation of a generating 1-cell (both boundary words
    /// reverse and dualize).
    RotGen(String),
    /// An identity wire.
    Id(SColour),
    /// Rainbow cup over a word: ε → w ++ revdual(w).
    Cup(Word),
    /// Rainbow cap over a word: revdual(w) ++ w → ε.
    Cap(Word),
    /// Exchange of two wire blocks: w1 ++ w2 → w2 ++ w1.
    Sym(Word, Word),
}

impl fmt::Display for Tile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tile::Gen(n) => write!(f, "{n}"),
            Tile::RotGen(n) => write!(f, "{n}∨"),
            Tile::Id(s) => write!(f, "1_{s}"),
            Tile::Cup(w) => write!(f, "cup({})", word_str(w)),
            Tile::Cap(w) => write!(f, "cap({})", word_str(w)),
            Tile::Sym(a, b) => write!(f, "sym({};{})", word_str(a), word_str(b)),
        }
    }
}

impl Tile {
    pub fn is_id(&self) -> bool {
        matches!(self, Tile::Id(_))
    }

    pub fn is_permutation(&self) -> bool {
        matches!(self, Tile::Id(_) | Tile::Sym(_, _))
    }
}

pub type Layer = Vec<Tile>;

pub fn layer_str(l: &[Tile]) -> String {
    l.iter().map(|t| t.to_string()).collect::<Vec<_>>().join("⊗")
}

/// A 1-cell in normal form: a source word and a stack of layers, bottom
/// (acting first) to top.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct State {
    pub source: Word,
    pub layers: Vec<Layer>,
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.layers.is_empty() {
            return write!(f, "id[{}]", word_str(&self.source));
        }
        let ls: Vec<String> = self.layers.iter().map(|l| layer_str(l)).collect();
        write!(f, "{}", ls.join(" ; "))
    }
}

/// Declaration of a generating 1-cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OneCellDecl {
    pub name: String,
    pub source: Word,
    pub target: Word,
}

/// Declaration of a generating 2-cell between 1-cell expressions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCellDecl {
    pub name: String,
    pub source: OneCellExpr,
    pub target: OneCellExpr,
}

/// 1-cell expressions. `VComp` composes bottom-to-top (first entry acts
/// first); `HComp` is a side-by-side tensor and requires its factors to
/// normalize to at most one layer each.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum OneCellExpr {
    Gen(String),
    RotGen(String),
    Id(Word),
    HComp(Vec<OneCellExpr>),
    VComp(Vec<OneCellExpr>),
    Cup(SColour),
    Cap(SColour),
    CupW(Word),
    CapW(Word),
    Sym(Word, Word),
}

/// Structural rewrite actions. Every step fires at a depth inside an
/// identity context given by the step's `left` and `right` words; the
/// affected pattern layers are determined by the action.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepAction {
    /// Apply a generating 2-cell (source layers ⇒ target layers).
    Gen2(String),
    /// Apply a marked-invertible generating 2-cell backwards.
    Inv(String),
    /// Apply a named derived 2-cell forwards.
    Derived(String),
    /// Exchange two adjacent layers whose active tiles are disjoint.
    /// Splits are tile counts of the left block in each layer.
    Exchange { below_left: usize, above_left: usize },
    /// [A ++ B ; Sym(tgt A, tgt B)] ⇒ [Sym(src A, src B) ; B ++ A].
    /// `split` is the tile count of A. A degenerate result symmetry (an
    /// empty side) is elided.
    SlideUp { split: usize },
    /// Inverse direction: [Sym(w1, w2) ; B ++ A] ⇒ [A ++ B ; Sym'].
    /// `split` is the tile count of B.
    SlideDown { split: usize },
    /// Replace a block of pure permutation layers (Sym/Id tiles only) by
    /// another block realizing the same wire permutation.
    Rewire { layers: usize, to: Vec<Layer> },
    /// Bend a state/costate generator through a cup or cap.
    Bend { kind: BendKind, gen: String },
    /// Inverse of `Bend`.
    Unbend { kind: BendKind, gen: String },
    /// Canonical fusion of two nested trace loops into one (the loop wire
    /// of the outer trace absorbs the inner loop through the monoid).
    Fuse { mult: String, psi: String },
    /// Canonical merge of a parallel strand into a trace loop through the
    /// monoid multiplication.
    Merge { mult: String, psi: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BendKind {
    /// g: ε → w:  [g] ⇒ [Cup(w) ; Id(w) ++ RotGen(g)]
    State,
    /// g: ε → w:  [RotGen(g)] ⇒ [g ++ Id(revdual w) ; Cap(revdual w)]
    RotState,
    /// g: w → ε:  [g] ⇒ [Id(w) ++ RotGen(g) ; Cap(revdual w)]
    Costate,
    /// g: w → ε:  [RotGen(g)] ⇒ [Cup(w) ; g ++ Id(revdual w)]
    RotCostate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RewriteStep {
    pub depth: usize,
    pub left: Word,
    pub right: Word,
    pub action: StepAction,
}

impl fmt::Display for RewriteStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}@{}", self.action, self.depth)?;
        if !self.left.is_empty() {
            write!(f, " l={}", word_str(&self.left))?;
        }
        if !self.right.is_empty() {
            write!(f, " r={}", word_str(&self.right))?;
        }
        Ok(())
    }
}

/// A 2-cell as a rewrite path from a source 1-cell expression.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TwoCellExpr {
    pub source: OneCellExpr,
    pub steps: Vec<RewriteStep>,
}

impl TwoCellExpr {
    pub fn id(source: OneCellExpr) -> TwoCellExpr {
        TwoCellExpr {
            source,
            steps: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Equation {
    pub label: String,
    pub lhs: TwoCellExpr,
    pub rhs: TwoCellExpr,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjunctionMark {
    pub left: String,
    pub right: String,
    pub unit: String,
    pub counit: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub name: String,
    pub zero_cells: Vec<String>,
    pub one_cells: Vec<OneCellDecl>,
    pub two_cells: Vec<TwoCellDecl>,
    /// Composite 2-cells given by rewrite paths, referenceable from steps
    /// and invertibility marks.
    pub derived_cells: Vec<(String, TwoCellExpr)>,
    pub equations: Vec<Equation>,
    pub invertible: BTreeSet<String>,
    pub adjunctions: Vec<AdjunctionMark>,
    /// Obligations with no syntactic content, discharged by the interpreter
    /// (semantic bijectivity checks and rotation round-trips).
    pub semantic_checks: Vec<(String, String)>,
}

impl Presentation {
    pub fn one_cell(&self, name: &str) -> Option<&OneCellDecl> {
        self.one_cells.iter().find(|d| d.name == name)
    }

    pub fn two_cell(&self, name: &str) -> Option<&TwoCellDecl> {
        self.two_cells.iter().find(|d| d.name == name)
    }

    pub fn derived_cell(&self, name: &str) -> Option<&TwoCellExpr> {
        self.derived_cells.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn tile_src(&self, t: &Tile) -> Result<Word, PresError> {
        Ok(match t {
            Tile::Gen(n) => {
                self.one_cell(n)
                    .ok_or_else(|| PresError::UnknownName(n.clone()))?
                    .source
                    .clone()
            }
            Tile::RotGen(n) => revdual(
                &self
                    .one_cell(n)
                    .ok_or_else(|| PresError::UnknownName(n.clone()))?
                    .target,
            ),
            Tile::Id(s) => vec![s.clone()],
            Tile::Cup(_) => Vec::new(),
            Tile::Cap(w) => {
                let mut out = revdual(w);
                out.extend(w.iter().cloned());
                out
            }
            Tile::Sym(a, b) => {
                let mut out = a.clone();
                out.extend(b.iter().cloned());
                out
            }
        })
    }

    pub fn tile_tgt(&self, t: &Tile) -> Result<Word, PresError> {
        Ok(match t {
            Tile::Gen(n) => {
                self.one_cell(n)
                    .ok_or_else(|| PresError::UnknownName(n.clone()))?
                    .target
                    .clone()
            }
            Tile::RotGen(n) => revdual(
                &self
                    .one_cell(n)
                    .ok_or_else(|| PresError::UnknownName(n.clone()))?
                    .source,
            ),
            Tile::Id(s) => vec![s.clone()],
            Tile::Cup(w) => {
                let mut out = w.clone();
                out.extend(revdual(w));
                out
            }
            Tile::Cap(_) => Vec::new(),
            Tile::Sym(a, b) => {
                let mut out = b.clone();
                out.extend(a.iter().cloned());
                out
            }
        })
    }

    pub fn layer_src(&self, l: &[Tile]) -> Result<Word, PresError> {
        let mut out = Vec::new();
        for t in l {
            out.extend(self.tile_src(t)?);
        }
        Ok(out)
    }

    pub fn layer_tgt(&self, l: &[Tile]) -> Result<Word, PresError> {
        let mut out = Vec::new();
        for t in l {
            out.extend(self.tile_tgt(t)?);
        }
        Ok(out)
    }

    /// Normalizes a 1-cell expression to a state: vertical composites
    /// flatten, identity layers are dropped, tensor factors must be single
    /// layers.
    pub fn normalize(&self, e: &OneCellExpr) -> Result<State, PresError> {
        match e {
            OneCellExpr::Gen(n) => {
                let d = self.one_cell(n).ok_or_else(|| PresError::UnknownName(n.clone()))?;
                Ok(State {
                    source: d.source.clone(),
                    layers: vec![vec![Tile::Gen(n.clone())]],
                })
            }
            OneCellExpr::RotGen(n) => {
                let t = Tile::RotGen(n.clone());
                Ok(State {
                    source: self.tile_src(&t)?,
                    layers: vec![vec![t]],
                })
            }
            OneCellExpr::Id(w) => Ok(State {
                source: w.clone(),
                layers: Vec::new(),
            }),
            OneCellExpr::Cup(s) => Ok(State {
                source: Vec::new(),
                layers: vec![vec![Tile::Cup(vec![s.clone()])]],
            }),
            OneCellExpr::Cap(s) => {
                let t = Tile::Cap(vec![s.flip()]);
                Ok(State {
                    source: self.tile_src(&t)?,
                    layers: vec![vec![t]],
                })
            }
            OneCellExpr::CupW(w) => Ok(State {
                source: Vec::new(),
                layers: vec![vec![Tile::Cup(w.clone())]],
            }),
            OneCellExpr::CapW(w) => {
                let t = Tile::Cap(w.clone());
                Ok(State {
                    source: self.tile_src(&t)?,
                    layers: vec![vec![t]],
                })
            }
            OneCellExpr::Sym(a, b) => {
                let t = Tile::Sym(a.clone(), b.clone());
                Ok(State {
                    source: self.tile_src(&t)?,
                    layers: vec![vec![t]],
                })
            }
            OneCellExpr::VComp(es) => {
                let mut source: Option<Word> = None;
                let mut layers = Vec::new();
                let mut wire: Option<Word> = None;
                for sub in es {
                    let st = self.normalize(sub)?;
                    if let Some(w) = &wire {
                        if *w != st.source {
                            return Err(PresError::BoundaryMismatch {
                                context: "VComp".into(),
                                expected: word_str(w),
                                found: word_str(&st.source),
                            });
                        }
                    } else {
                        source = Some(st.source.clone());
                    }
                    wire = Some(self.state_target(&st)?);
                    layers.extend(st.layers);
                }
                Ok(State {
                    source: source.unwrap_or_default(),
                    layers,
                })
            }
            OneCellExpr::HComp(es) => {
                let mut source = Vec::new();
                let mut tiles = Vec::new();
                for sub in es {
                    let st = self.normalize(sub)?;
                    match st.layers.len() {
                        0 => {
                            source.extend(st.source.iter().cloned());
                            tiles.extend(st.source.iter().cloned().map(Tile::Id));
                        }
                        1 => {
                            source.extend(st.source.iter().cloned());
                            tiles.extend(st.layers[0].iter().cloned());
                        }
                        _ => {
                            return Err(PresError::NotLayered(format!(
                                "tensor factor `{st}` spans {} layers; distribute it explicitly",
                                st.layers.len()
                            )))
                        }
                    }
                }
                if tiles.iter().all(|t| t.is_id()) {
                    Ok(State {
                        source,
                        layers: Vec::new(),
                    })
                } else {
                    Ok(State {
                        source,
                        layers: vec![tiles],
                    })
                }
            }
        }
    }

    /// Wire words between the layers: index 0 is the source, index k is the
    /// word after layer k-1.
    pub fn wire_words(&self, st: &State) -> Result<Vec<Word>, PresError> {
        let mut out = vec![st.source.clone()];
        for (i, l) in st.layers.iter().enumerate() {
            let src = self.layer_src(l)?;
            if src != out[i] {
                return Err(PresError::BoundaryMismatch {
                    context: format!("layer {i} ({})", layer_str(l)),
                    expected: word_str(&out[i]),
                    found: word_str(&src),
                });
            }
            out.push(self.layer_tgt(l)?);
        }
        Ok(out)
    }

    pub fn state_target(&self, st: &State) -> Result<Word, PresError> {
        Ok(self.wire_words(st)?.last().unwrap().clone())
    }

    /// Source and target pattern layers (without context) of a step action,
    /// given the active tiles currently at the step site.
    pub fn action_patterns(
        &self,
        action: &StepAction,
        active: &[Layer],
    ) -> Result<(Vec<Layer>, Vec<Layer>), PresError> {
        match action {
            StepAction::Gen2(n) => {
                let d = self.two_cell(n).ok_or_else(|| PresError::UnknownName(n.clone()))?;
                Ok((
                    self.normalize(&d.source)?.layers,
                    self.normalize(&d.target)?.layers,
                ))
            }
            StepAction::Inv(n) => {
                if !self.invertible.contains(n) {
                    return Err(PresError::NotMarkedInvertible(n.clone()));
                }
                if let Some(d) = self.two_cell(n) {
                    return Ok((
                        self.normalize(&d.target)?.layers,
                        self.normalize(&d.source)?.layers,
                    ));
                }
                let e = self
                    .derived_cell(n)
                    .ok_or_else(|| PresError::UnknownName(n.clone()))?;
                let src = self.normalize(&e.source)?;
                let tgt = self.simulate(&src, &e.steps)?;
                Ok((tgt.layers, src.layers))
            }
            StepAction::Derived(n) => {
                let e = self
                    .derived_cell(n)
                    .ok_or_else(|| PresError::UnknownName(n.clone()))?;
                let src = self.normalize(&e.source)?;
                let tgt = self.simulate(&src, &e.steps)?;
                Ok((src.layers, tgt.layers))
            }
            StepAction::Exchange {
                below_left,
                above_left,
            } => {
                if active.len() != 2 {
                    return Err(PresError::NotLayered("exchange needs two layers".into()));
                }
                let (below, above) = (&active[0], &active[1]);
                if *below_left > below.len() || *above_left > above.len() {
                    return Err(PresError::NotLayered("exchange split out of range".into()));
                }
                let (bl, br) = below.split_at(*below_left);
                let (al, ar) = above.split_at(*above_left);
                let lr = br.iter().all(Tile::is_id) && al.iter().all(Tile::is_id);
                let rl = bl.iter().all(Tile::is_id) && ar.iter().all(Tile::is_id);
                if lr && !rl {
                    // [A ++ Id ; Id ++ B] ⇒ [Id ++ B ; A ++ Id]
                    let a = bl.to_vec();
                    let b = ar.to_vec();
                    if self.layer_src(&b)? != self.layer_tgt(br)? {
                        return Err(PresError::NotLayered(
                            "exchange: passthrough wires do not match upper block".into(),
                        ));
                    }
                    if self.layer_src(al)? != self.layer_tgt(&a)? {
                        return Err(PresError::NotLayered(
                            "exchange: lower block target does not match passthrough".into(),
                        ));
                    }
                    let id_a_src: Layer = self.layer_src(&a)?.into_iter().map(Tile::Id).collect();
                    let id_b_tgt: Layer = self.layer_tgt(&b)?.into_iter().map(Tile::Id).collect();
                    let mut l1 = id_a_src;
                    l1.extend(b.iter().cloned());
                    let mut l2 = a;
                    l2.extend(id_b_tgt);
                    Ok((active.to_vec(), vec![l1, l2]))
                } else if rl && !lr {
                    // [Id ++ B ; A ++ Id] ⇒ [A ++ Id ; Id ++ B]
                    let b = br.to_vec();
                    let a = al.to_vec();
                    if self.layer_src(&a)? != self.layer_tgt(bl)? {
                        return Err(PresError::NotLayered(
                            "exchange: passthrough wires do not match upper block".into(),
                        ));
                    }
                    if self.layer_src(ar)? != self.layer_tgt(&b)? {
                        return Err(PresError::NotLayered(
                            "exchange: lower block target does not match passthrough".into(),
                        ));
                    }
                    let id_b_src: Layer = self.layer_src(&b)?.into_iter().map(Tile::Id).collect();
                    let id_a_tgt: Layer = self.layer_tgt(&a)?.into_iter().map(Tile::Id).collect();
                    let mut l1 = a.clone();
                    l1.extend(id_b_src);
                    let mut l2 = id_a_tgt;
                    l2.extend(b);
                    Ok((active.to_vec(), vec![l1, l2]))
                } else {
                    Err(PresError::NotLayered(
                        "exchange blocks are not disjoint (or both trivial)".into(),
                    ))
                }
            }
            StepAction::SlideUp { split } => {
                if active.len() != 2 || active[1].len() != 1 {
                    return Err(PresError::NotLayered(
                        "slide-up needs a tile layer below a single symmetry".into(),
                    ));
                }
                let Tile::Sym(w1p, w2p) = &active[1][0] else {
                    return Err(PresError::NotLayered("slide-up: upper tile is not a symmetry".into()));
                };
                let (a, b) = active[0].split_at((*split).min(active[0].len()));
                if self.layer_tgt(a)? != *w1p || self.layer_tgt(b)? != *w2p {
                    return Err(PresError::NotLayered(
                        "slide-up: symmetry arguments do not match block targets".into(),
                    ));
                }
                let (sa, sb) = (self.layer_src(a)?, self.layer_src(b)?);
                let mut swapped: Layer = b.to_vec();
                swapped.extend(a.iter().cloned());
                let mut out = Vec::new();
                if !sa.is_empty() && !sb.is_empty() {
                    out.push(vec![Tile::Sym(sa, sb)]);
                }
                out.push(swapped);
                Ok((active.to_vec(), out))
            }
            StepAction::SlideDown { split } => {
                if active.len() != 2 || active[0].len() != 1 {
                    return Err(PresError::NotLayered(
                        "slide-down needs a single symmetry below a tile layer".into(),
                    ));
                }
                let Tile::Sym(w1, w2) = &active[0][0] else {
                    return Err(PresError::NotLayered("slide-down: lower tile is not a symmetry".into()));
                };
                let (b, a) = active[1].split_at((*split).min(active[1].len()));
                if self.layer_src(b)? != *w2 || self.layer_src(a)? != *w1 {
                    return Err(PresError::NotLayered(
                        "slide-down: symmetry arguments do not match block sources".into(),
                    ));
                }
                let (ta, tb) = (self.layer_tgt(a)?, self.layer_tgt(b)?);
                let mut swapped: Layer = a.to_vec();
                swapped.extend(b.iter().cloned());
                let mut out = vec![swapped];
                if !ta.is_empty() && !tb.is_empty() {
                    out.push(vec![Tile::Sym(ta, tb)]);
                }
                Ok((active.to_vec(), out))
            }
            StepAction::Rewire { layers: _, to } => {
                for l in active.iter().chain(to.iter()) {
                    if !l.iter().all(Tile::is_permutation) {
                        return Err(PresError::NotLayered(
                            "rewire blocks must consist of identity and symmetry tiles".into(),
                        ));
                    }
                }
                let perm_src = self.block_permutation(active)?;
                let perm_to = if to.is_empty() {
                    (0..perm_src.len()).collect()
                } else {
                    self.block_permutation(to)?
                };
                if perm_src != perm_to {
                    return Err(PresError::NotLayered(format!(
                        "rewire blocks realize different permutations: {perm_src:?} vs {perm_to:?}"
                    )));
                }
                if !active.is_empty() && !to.is_empty() {
                    let from_src = self.layer_src(&active[0])?;
                    let to_src = self.layer_src(&to[0])?;
                    if from_src != to_src {
                        return Err(PresError::NotLayered("rewire boundary mismatch".into()));
                    }
                }
                Ok((active.to_vec(), to.clone()))
            }
            StepAction::Bend { kind, gen } => self.bend_patterns(*kind, gen),
            StepAction::Unbend { kind, gen } => {
                let (src, tgt) = self.bend_patterns(*kind, gen)?;
                Ok((tgt, src))
            }
            StepAction::Fuse { mult, psi } => self.fuse_patterns(mult, psi),
            StepAction::Merge { mult, psi } => self.merge_patterns(mult, psi),
        }
    }

    fn bend_patterns(&self, kind: BendKind, gen: &str) -> Result<(Vec<Layer>, Vec<Layer>), PresError> {
        let d = self
            .one_cell(gen)
            .ok_or_else(|| PresError::UnknownName(gen.to_string()))?;
        let (su, tu) = (d.source.clone(), d.target.clone());
        match kind {
            BendKind::State => {
                if !su.is_empty() {
                    return Err(PresError::NotLayered(format!("`{gen}` is not a state (source ε)")));
                }
                let mut l2: Layer = tu.iter().cloned().map(Tile::Id).collect();
                l2.push(Tile::RotGen(gen.to_string()));
                Ok((
                    vec![vec![Tile::Gen(gen.to_string())]],
                    vec![vec![Tile::Cup(tu.clone())], l2],
                ))
            }
            BendKind::RotState => {
                if !su.is_empty() {
                    return Err(PresError::NotLayered(format!("`{gen}` is not a state (source ε)")));
                }
                let rd = revdual(&tu);
                let mut l1: Layer = vec![Tile::Gen(gen.to_string())];
                l1.extend(rd.iter().cloned().map(Tile::Id));
                Ok((
                    vec![vec![Tile::RotGen(gen.to_string())]],
                    vec![l1, vec![Tile::Cap(rd)]],
                ))
            }
            BendKind::Costate => {
                if !tu.is_empty() {
                    return Err(PresError::NotLayered(format!("`{gen}` is not a costate (target ε)")));
                }
                let rd = revdual(&su);
                let mut l1: Layer = su.iter().cloned().map(Tile::Id).collect();
                l1.push(Tile::RotGen(gen.to_string()));
                Ok((
                    vec![vec![Tile::Gen(gen.to_string())]],
                    vec![l1, vec![Tile::Cap(rd)]],
                ))
            }
            BendKind::RotCostate => {
                if !tu.is_empty() {
                    return Err(PresError::NotLayered(format!("`{gen}` is not a costate (target ε)")));
                }
                let rd = revdual(&su);
                let mut l2: Layer = vec![Tile::Gen(gen.to_string())];
                l2.extend(rd.iter().cloned().map(Tile::Id));
                Ok((
                    vec![vec![Tile::RotGen(gen.to_string())]],
                    vec![vec![Tile::Cup(su.clone())], l2],
                ))
            }
        }
    }

    /// The single-colour right trace loop over a multiplication `m` and its
    /// adjoint `psi`: [1⊗cup ; m⊗1̂ ; psi⊗1̂ ; 1⊗cap].
    pub fn trace_loop_layers(&self, mult: &str, psi: &str) -> Result<Vec<Layer>, PresError> {
        let d = self
            .one_cell(mult)
            .ok_or_else(|| PresError::UnknownName(mult.to_string()))?;
        let c = d.target[0].clone();
        let ch = c.flip();
        Ok(vec![
            vec![Tile::Id(c.clone()), Tile::Cup(vec![c.clone()])],
            vec![Tile::Gen(mult.to_string()), Tile::Id(ch.clone())],
            vec![Tile::Gen(psi.to_string()), Tile::Id(ch.clone())],
            vec![Tile::Id(c), Tile::Cap(vec![ch])],
        ])
    }

    fn fuse_patterns(&self, mult: &str, psi: &str) -> Result<(Vec<Layer>, Vec<Layer>), PresError> {
        let d = self
            .one_cell(mult)
            .ok_or_else(|| PresError::UnknownName(mult.to_string()))?;
        let c = d.target[0].clone();
        let ch = c.flip();
        let one = Tile::Id(c.clone());
        let oneh = Tile::Id(ch.clone());
        let cup = Tile::Cup(vec![c.clone()]);
        let cap = Tile::Cap(vec![ch.clone()]);
        let m = Tile::Gen(mult.to_string());
        let p = Tile::Gen(psi.to_string());
        // nested two-loop state: open X, merge (b, X), open Y inside, merge
        // ((bX), Y), split, close Y, split, close X
        let src = vec![
            vec![one.clone(), cup.clone()],
            vec![m.clone(), oneh.clone()],
            vec![one.clone(), cup.clone(), oneh.clone()],
            vec![m.clone(), oneh.clone(), oneh.clone()],
            vec![p.clone(), oneh.clone(), oneh.clone()],
            vec![one.clone(), cap.clone(), oneh.clone()],
            vec![p.clone(), oneh.clone()],
            vec![one.clone(), cap.clone()],
        ];
        let tgt = self.trace_loop_layers(mult, psi)?;
        Ok((src, tgt))
    }

    fn merge_patterns(&self, mult: &str, psi: &str) -> Result<(Vec<Layer>, Vec<Layer>), PresError> {
        let d = self
            .one_cell(mult)
            .ok_or_else(|| PresError::UnknownName(mult.to_string()))?;
        let c = d.target[0].clone();
        let one = Tile::Id(c.clone());
        let loop_layers = self.trace_loop_layers(mult, psi)?;
        // source: the loop with an idle strand on the left
        let src: Vec<Layer> = loop_layers
            .iter()
            .map(|l| {
                let mut ll = vec![one.clone()];
                ll.extend(l.iter().cloned());
                ll
            })
            .collect();
        // target: merge below, loop, split above
        let mut tgt = vec![vec![Tile::Gen(mult.to_string())]];
        tgt.extend(loop_layers);
        tgt.push(vec![Tile::Gen(psi.to_string())]);
        Ok((src, tgt))
    }

    fn block_permutation(&self, layers: &[Layer]) -> Result<Vec<usize>, PresError> {
        // positions of source wires tracked through the block
        if layers.is_empty() {
            return Ok(Vec::new());
        }
        let src = self.layer_src(&layers[0])?;
        let mut positions: Vec<usize> = (0..src.len()).collect();
        for l in layers {
            let mut new_positions = Vec::with_capacity(positions.len());
            let mut offset = 0usize;
            for t in l {
                match t {
                    Tile::Id(_) => {
                        new_positions.push(positions[offset]);
                        offset += 1;
                    }
                    Tile::Sym(a, b) => {
                        let (ka, kb) = (a.len(), b.len());
                        for i in 0..kb {
                            new_positions.push(positions[offset + ka + i]);
                        }
                        for i in 0..ka {
                            new_positions.push(positions[offset + i]);
                        }
                        offset += ka + kb;
                    }
                    _ => unreachable!("pure permutation block"),
                }
            }
            positions = new_positions;
        }
        Ok(positions)
    }

    /// Applies one step syntactically.
    pub fn apply_step(&self, st: &State, step: &RewriteStep) -> Result<State, PresError> {
        let words = self.wire_words(st)?;
        let fail = |reason: String| PresError::StepFails {
            index: 0,
            step: step.to_string(),
            reason,
        };
        let strip = |layer: &Layer| -> Result<Layer, PresError> {
            let nl = step.left.len();
            let nr = step.right.len();
            if layer.len() < nl + nr {
                return Err(fail(format!("layer `{}` narrower than context", layer_str(layer))));
            }
            let (l, rest) = layer.split_at(nl);
            let (mid, r) = rest.split_at(rest.len() - nr);
            let lok = l
                .iter()
                .zip(step.left.iter())
                .all(|(t, s)| matches!(t, Tile::Id(x) if x == s));
            let rok = r
                .iter()
                .zip(step.right.iter())
                .all(|(t, s)| matches!(t, Tile::Id(x) if x == s));
            if !lok || !rok {
                return Err(fail(format!(
                    "context mismatch in layer `{}` (need l={}, r={})",
                    layer_str(layer),
                    word_str(&step.left),
                    word_str(&step.right)
                )));
            }
            Ok(mid.to_vec())
        };

        let n_src = self.action_src_len(&step.action)?;
        if step.depth + n_src > st.layers.len() {
            return Err(fail(format!(
                "pattern of {} layers at depth {} exceeds state of {} layers",
                n_src,
                step.depth,
                st.layers.len()
            )));
        }
        let active: Vec<Layer> = st.layers[step.depth..step.depth + n_src]
            .iter()
            .map(|l| strip(l))
            .collect::<Result<_, _>>()?;
        let (pat_src, pat_tgt) = self.action_patterns(&step.action, &active)?;
        if pat_src != active {
            return Err(fail(format!(
                "pattern mismatch: expected [{}], found [{}]",
                pat_src.iter().map(|l| layer_str(l)).collect::<Vec<_>>().join(" ; "),
                active.iter().map(|l| layer_str(l)).collect::<Vec<_>>().join(" ; ")
            )));
        }
        if n_src == 0 {
            let mut expected: Word = step.left.clone();
            expected.extend(self.action_boundary_word(&step.action)?);
            expected.extend(step.right.iter().cloned());
            if words[step.depth] != expected {
                return Err(fail(format!(
                    "insertion boundary: wire is {}, need {}",
                    word_str(&words[step.depth]),
                    word_str(&expected)
                )));
            }
        }
        let wrap = |l: &Layer| -> Layer {
            let mut out: Layer = step.left.iter().cloned().map(Tile::Id).collect();
            out.extend(l.iter().cloned());
            out.extend(step.right.iter().cloned().map(Tile::Id));
            out
        };
        let mut layers = st.layers[..step.depth].to_vec();
        layers.extend(pat_tgt.iter().map(wrap));
        layers.extend(st.layers[step.depth + n_src..].iter().cloned());
        let out = State {
            source: st.source.clone(),
            layers,
        };
        self.wire_words(&out)?;
        Ok(out)
    }

    /// Number of state layers an action's source pattern spans.
    pub fn action_src_len(&self, action: &StepAction) -> Result<usize, PresError> {
        Ok(match action {
            StepAction::Gen2(n) => self
                .normalize(&self.two_cell(n).ok_or_else(|| PresError::UnknownName(n.clone()))?.source)?
                .layers
                .len(),
            StepAction::Inv(n) => {
                if let Some(d) = self.two_cell(n) {
                    self.normalize(&d.target)?.layers.len()
                } else {
                    let e = self
                        .derived_cell(n)
                        .ok_or_else(|| PresError::UnknownName(n.clone()))?;
                    let src = self.normalize(&e.source)?;
                    self.simulate(&src, &e.steps)?.layers.len()
                }
            }
            StepAction::Derived(n) => self
                .normalize(
                    &self
                        .derived_cell(n)
                        .ok_or_else(|| PresError::UnknownName(n.clone()))?
                        .source,
                )?
                .layers
                .len(),
            StepAction::Exchange { .. } | StepAction::SlideUp { .. } | StepAction::SlideDown { .. } => 2,
            StepAction::Rewire { layers, .. } => *layers,
            StepAction::Bend { .. } => 1,
            StepAction::Unbend { .. } => 2,
            StepAction::Fuse { .. } => 8,
            StepAction::Merge { .. } => 4,
        })
    }

    /// The source word of a zero-layer pattern (insertions).
    fn action_boundary_word(&self, action: &StepAction) -> Result<Word, PresError> {
        match action {
            StepAction::Gen2(n) => {
                let d = self.two_cell(n).ok_or_else(|| PresError::UnknownName(n.clone()))?;
                Ok(self.normalize(&d.source)?.source)
            }
            StepAction::Inv(n) => {
                if let Some(d) = self.two_cell(n) {
                    return Ok(self.normalize(&d.target)?.source);
                }
                let e = self
                    .derived_cell(n)
                    .ok_or_else(|| PresError::UnknownName(n.clone()))?;
                Ok(self.normalize(&e.source)?.source)
            }
            StepAction::Derived(n) => {
                let e = self
                    .derived_cell(n)
                    .ok_or_else(|| PresError::UnknownName(n.clone()))?;
                Ok(self.normalize(&e.source)?.source)
            }
            _ => Err(PresError::NotLayered("action cannot insert".into())),
        }
    }

    pub fn simulate(&self, start: &State, steps: &[RewriteStep]) -> Result<State, PresError> {
        let mut st = start.clone();
        for (i, step) in steps.iter().enumerate() {
            st = self.apply_step(&st, step).map_err(|e| match e {
                PresError::StepFails { step, reason, .. } => PresError::StepFails {
                    index: i,
                    step,
                    reason,
                },
                other => other,
            })?;
        }
        Ok(st)
    }

    /// Full well-typedness report: declarations resolve, boundaries are
    /// globular, every equation's two sides start and end at the same state.
    pub fn validate(&self) -> Result<(), PresError> {
        let mut names: BTreeSet<&str> = BTreeSet::new();
        for z in &self.zero_cells {
            if !names.insert(z) {
                return Err(PresError::DuplicateName(z.clone()));
            }
        }
        for d in &self.one_cells {
            if !names.insert(&d.name) {
                return Err(PresError::DuplicateName(d.name.clone()));
            }
            for s in d.source.iter().chain(d.target.iter()) {
                if !self.zero_cells.contains(&s.colour) {
                    return Err(PresError::UnknownName(s.colour.clone()));
                }
            }
        }
        for d in &self.two_cells {
            if !names.insert(&d.name) {
                return Err(PresError::DuplicateName(d.name.clone()));
            }
            let s = self.normalize(&d.source)?;
            let t = self.normalize(&d.target)?;
            if s.source != t.source || self.state_target(&s)? != self.state_target(&t)? {
                return Err(PresError::BoundaryMismatch {
                    context: format!("2-cell `{}`", d.name),
                    expected: format!(
                        "{} → {}",
                        word_str(&s.source),
                        word_str(&self.state_target(&s)?)
                    ),
                    found: format!(
                        "{} → {}",
                        word_str(&t.source),
                        word_str(&self.state_target(&t)?)
                    ),
                });
            }
        }
        for (n, e) in &self.derived_cells {
            if !names.insert(n) {
                return Err(PresError::DuplicateName(n.clone()));
            }
            let src = self.normalize(&e.source)?;
            self.simulate(&src, &e.steps)?;
        }
        for m in &self.invertible {
            if self.two_cell(m).is_none() && self.derived_cell(m).is_none() {
                return Err(PresError::UnknownName(m.clone()));
            }
        }
        for adj in &self.adjunctions {
            for n in [&adj.left, &adj.right] {
                if self.one_cell(n).is_none() {
                    return Err(PresError::UnknownName(n.clone()));
                }
            }
            for n in [&adj.unit, &adj.counit] {
                if self.two_cell(n).is_none() {
                    return Err(PresError::UnknownName(n.clone()));
                }
            }
        }
        for eq in &self.equations {
            let ls = self.normalize(&eq.lhs.source)?;
            let rs = self.normalize(&eq.rhs.source)?;
            if ls != rs {
                return Err(PresError::SidesDisagree {
                    label: eq.label.clone(),
                    reason: format!("sources differ: {ls} vs {rs}"),
                });
            }
            let lt = self.simulate(&ls, &eq.lhs.steps)?;
            let rt = self.simulate(&rs, &eq.rhs.steps)?;
            if lt != rt {
                return Err(PresError::SidesDisagree {
                    label: eq.label.clone(),
                    reason: format!("targets differ: {lt} vs {rt}"),
                });
            }
        }
        Ok(())
    }

    /// Freely adds a right adjoint (reversed boundary), unit and counit, and
    /// the two triangle equations for each selected 1-cell.
    pub fn extend_right_adjoints(&self, which: &[&str]) -> Result<Presentation, PresError> {
        let mut out = self.clone();
        for name in which {
            let d = self
                .one_cell(name)
                .ok_or_else(|| PresError::UnknownName(name.to_string()))?
                .clone();
            let adj_name = format!("{name}_adj");
            if self.one_cell(&adj_name).is_some() || self.adjunctions.iter().any(|a| a.left == *name) {
                return Err(PresError::AlreadyExtended(name.to_string()));
            }
            out.one_cells.push(OneCellDecl {
                name: adj_name.clone(),
                source: d.target.clone(),
                target: d.source.clone(),
            });
            let unit = format!("eta_{name}");
            let counit = format!("eps_{name}");
            out.two_cells.push(TwoCellDecl {
                name: unit.clone(),
                source: OneCellExpr::Id(d.source.clone()),
                target: OneCellExpr::VComp(vec![
                    OneCellExpr::Gen(name.to_string()),
                    OneCellExpr::Gen(adj_name.clone()),
                ]),
            });
            out.two_cells.push(TwoCellDecl {
                name: counit.clone(),
                source: OneCellExpr::VComp(vec![
                    OneCellExpr::Gen(adj_name.clone()),
                    OneCellExpr::Gen(name.to_string()),
                ]),
                target: OneCellExpr::Id(d.target.clone()),
            });
            out.equations.push(Equation {
                label: format!("RA.{name}.triangle1"),
                lhs: TwoCellExpr {
                    source: OneCellExpr::Gen(name.to_string()),
                    steps: vec![
                        step(0, StepAction::Gen2(unit.clone())),
                        step(1, StepAction::Gen2(counit.clone())),
                    ],
                },
                rhs: TwoCellExpr::id(OneCellExpr::Gen(name.to_string())),
            });
            out.equations.push(Equation {
                label: format!("RA.{name}.triangle2"),
                lhs: TwoCellExpr {
                    source: OneCellExpr::Gen(adj_name.clone()),
                    steps: vec![
                        step(1, StepAction::Gen2(unit.clone())),
                        step(0, StepAction::Gen2(counit.clone())),
                    ],
                },
                rhs: TwoCellExpr::id(OneCellExpr::Gen(adj_name.clone())),
            });
            out.adjunctions.push(AdjunctionMark {
                left: name.to_string(),
                right: adj_name,
                unit,
                counit,
            });
        }
        Ok(out)
    }
}

/// A bare step with empty context.
pub fn step(depth: usize, action: StepAction) -> RewriteStep {
    RewriteStep {
        depth,
        left: Vec::new(),
        right: Vec::new(),
        action,
    }
}

/// A step inside an identity context.
pub fn step_ctx(depth: usize, left: Word, right: Word, action: StepAction) -> RewriteStep {
    RewriteStep {
        depth,
        left,
        right,
        action,
    }
}

/// Generates the pair of composition-to-identity equations for every marked
/// invertible generating 2-cell. Derived invertible cells are checked
/// semantically instead.
pub fn invertibility_equations(p: &Presentation) -> Vec<Equation> {
    let mut out = Vec::new();
    for name in &p.invertible {
        let Some(d) = p.two_cell(name) else { continue };
        out.push(Equation {
            label: format!("{name}.inv_l"),
            lhs: TwoCellExpr {
                source: d.source.clone(),
                steps: vec![
                    step(0, StepAction::Gen2(name.clone())),
                    step(0, StepAction::Inv(name.clone())),
                ],
            },
            rhs: TwoCellExpr::id(d.source.clone()),
        });
        out.push(Equation {
            label: format!("{name}.inv_r"),
            lhs: TwoCellExpr {
                source: d.target.clone(),
                steps: vec![
                    step(0, StepAction::Inv(name.clone())),
                    step(0, StepAction::Gen2(name.clone())),
                ],
            },
            rhs: TwoCellExpr::id(d.target.clone()),
        });
    }
    out
}
