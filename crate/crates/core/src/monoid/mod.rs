//! A closed transformation monoid built from a closed set of function pairs.
//!
//! ℕ splits into `{0}`, `T_x`, `T_y`, `A_x`, `A_y`. A member of ℱ fixes
//! `{0} ∪ T_x ∪ T_y` and sends `A_x` into `T_x` and `A_y` into `T_y` along a
//! branch of a [`ClosedPairSet`]. The collapse map `h` fixes everything except
//! `A_y`, which it sends to 0. Composites of `h` and ℱ are `h`, ℱ itself, or
//! 𝒢′: functions fixing `{0} ∪ T_x ∪ T_y`, killing `A_y`, and following the
//! first coordinate of a branch on `A_x`.
//!
//! The tree has finite depth `D`. Past level `D` every member sends `A_x` to
//! the least element of `T_x` and `A_y` to the least element of `T_y`.

mod tree;

pub use tree::{ClosedPairSet, Label, TreeNode, Value};

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::func::FinFun;
use crate::natset::{NatSet, SetError};
use crate::parse::ParseError;

/// Depth-6 tree with the single branch `<0,0>` at every level.
pub const SINGLE_BRANCH_D6: &str = include_str!("../../data/single_branch_d6.tree");
/// Depth-6 tree where every node has the children `<0,0>` and `<1,1>`.
pub const FULL_BINARY_D6: &str = include_str!("../../data/full_binary_d6.tree");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MonoidError {
    #[error("tree parse error at byte {}: {}", .0.pos, .0.message)]
    Parse(#[from] ParseError),
    #[error("leaf at level {level} in a tree of depth {depth}")]
    DeadLeaf { level: usize, depth: usize },
    #[error("horizon {0} is below 8")]
    HorizonTooSmall(u64),
    #[error("{x} lies in more than one cell")]
    Overlap { x: u64 },
    #[error("{x} lies in no cell")]
    Gap { x: u64 },
    #[error("cell {cell:?} has {count} elements below the horizon, need {need}")]
    TooSparse { cell: Cell, count: u64, need: u64 },
    #[error("branch leaves the tree at level {level}")]
    BranchNotInTree { level: usize },
    #[error("tree index {index} has no element in {cell:?}")]
    NoSuchElement { cell: Cell, index: u64 },
    #[error(transparent)]
    Set(#[from] SetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Cell {
    Zero,
    Tx,
    Ty,
    Ax,
    Ay,
}

#[derive(Debug, Clone)]
pub struct Partition {
    tx: NatSet,
    ty: NatSet,
    ax: NatSet,
    ay: NatSet,
    horizon: u64,
}

/// Residues mod 4 on the positive integers: `T_x ≡ 1`, `T_y ≡ 2`, `A_x ≡ 3`,
/// `A_y ≡ 0`.
pub fn make_partition(horizon: u64) -> Result<Partition, MonoidError> {
    Partition::new(
        NatSet::progression(1, 4)?,
        NatSet::progression(2, 4)?,
        NatSet::progression(3, 4)?,
        NatSet::progression(4, 4)?,
        horizon,
    )
}

impl Partition {
    /// Checks disjointness and coverage on `[0, horizon)` and that each
    /// nonzero cell has at least `horizon / 8` elements there.
    pub fn new(tx: NatSet, ty: NatSet, ax: NatSet, ay: NatSet, horizon: u64) -> Result<Self, MonoidError> {
        if horizon < 8 {
            return Err(MonoidError::HorizonTooSmall(horizon));
        }
        let p = Partition { tx, ty, ax, ay, horizon };
        for x in 0..horizon {
            let mut hits = u32::from(x == 0);
            for set in p.sets() {
                hits += u32::from(set.1.contains(x)?);
            }
            match hits {
                0 => return Err(MonoidError::Gap { x }),
                1 => {}
                _ => return Err(MonoidError::Overlap { x }),
            }
        }
        for (cell, set) in p.sets() {
            let count = set.prefix_count(horizon)?;
            if count < horizon / 8 {
                return Err(MonoidError::TooSparse { cell, count, need: horizon / 8 });
            }
        }
        Ok(p)
    }

    fn sets(&self) -> [(Cell, &NatSet); 4] {
        [(Cell::Tx, &self.tx), (Cell::Ty, &self.ty), (Cell::Ax, &self.ax), (Cell::Ay, &self.ay)]
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    pub fn set(&self, cell: Cell) -> Option<&NatSet> {
        match cell {
            Cell::Zero => None,
            Cell::Tx => Some(&self.tx),
            Cell::Ty => Some(&self.ty),
            Cell::Ax => Some(&self.ax),
            Cell::Ay => Some(&self.ay),
        }
    }

    /// The cell of `x`, or `None` if no cell claims it (possible past the
    /// checked horizon for a custom partition).
    pub fn cell_of(&self, x: u64) -> Option<Cell> {
        if x == 0 {
            return Some(Cell::Zero);
        }
        self.sets().into_iter().find(|(_, s)| s.contains(x).unwrap_or(false)).map(|(c, _)| c)
    }

    /// Position of `x` in the increasing enumeration of its cell.
    pub fn index_in(&self, cell: Cell, x: u64) -> Option<u64> {
        self.set(cell)?.prefix_count(x).ok()
    }

    pub fn nth(&self, cell: Cell, j: u64) -> Option<u64> {
        self.set(cell)?.nth(j).ok().flatten()
    }

    /// Least element of `T_x` or `T_y`, the value used past the tree depth.
    pub fn default_target(&self, cell: Cell) -> u64 {
        self.nth(cell, 0).unwrap_or(0)
    }

    fn resolve(&self, cell: Cell, v: Value) -> Result<u64, MonoidError> {
        match v {
            Value::Literal(v) => Ok(v),
            Value::Index(i) => self.nth(cell, i).ok_or(MonoidError::NoSuchElement { cell, index: i }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Tag {
    Identity,
    /// Member of ℱ; resolved images of the first elements of `A_x` and `A_y`.
    Family { xs: Vec<u64>, ys: Vec<u64> },
    Collapse,
    /// Member of 𝒢′; resolved images of the first elements of `A_x`.
    Projected { xs: Vec<u64> },
}

impl Tag {
    fn in_family(&self) -> bool {
        matches!(self, Tag::Identity | Tag::Family { .. })
    }
}

#[derive(Debug, Clone)]
pub struct MonoidElement {
    pub tag: Tag,
    pub label: String,
    pub fun: FinFun,
}

impl MonoidElement {
    pub fn identity() -> Self {
        MonoidElement { tag: Tag::Identity, label: "id".into(), fun: FinFun::identity() }
    }

    /// The same element with `x ↦ value` forced; the tag is kept, so the
    /// change is only visible through the laws.
    pub fn with_override(&self, x: u64, value: u64) -> Self {
        let base = self.fun.clone();
        let label = format!("{}[{x}->{value}]", self.label);
        let fun = FinFun::host(1, label.clone(), move |a| if a[0] == x { value } else { base.call1(a[0]) });
        MonoidElement { tag: self.tag.clone(), label, fun }
    }
}

fn shaped(p: &Partition, label: String, xs: Vec<u64>, ys: Option<Vec<u64>>) -> FinFun {
    let p = Arc::new(p.clone());
    let (xs, ys) = (Arc::new(xs), ys.map(Arc::new));
    let (dx, dy) = (p.default_target(Cell::Tx), p.default_target(Cell::Ty));
    FinFun::host(1, label, move |a| {
        let n = a[0];
        match p.cell_of(n) {
            Some(Cell::Ax) => {
                let j = p.index_in(Cell::Ax, n).unwrap_or(u64::MAX);
                usize::try_from(j).ok().and_then(|j| xs.get(j)).copied().unwrap_or(dx)
            }
            Some(Cell::Ay) => match &ys {
                None => 0,
                Some(ys) => {
                    let j = p.index_in(Cell::Ay, n).unwrap_or(u64::MAX);
                    usize::try_from(j).ok().and_then(|j| ys.get(j)).copied().unwrap_or(dy)
                }
            },
            _ => n,
        }
    })
}

/// The ℱ-member along `branch`, which must be a path from the root.
pub fn monoid_element_from_branch(p: &Partition, tree: &ClosedPairSet, branch: &[Label]) -> Result<MonoidElement, MonoidError> {
    let matched = tree.matched_prefix(branch);
    if matched < branch.len() {
        return Err(MonoidError::BranchNotInTree { level: matched + 1 });
    }
    let xs = branch.iter().map(|l| p.resolve(Cell::Tx, l.x)).collect::<Result<Vec<_>, _>>()?;
    let ys = branch.iter().map(|l| p.resolve(Cell::Ty, l.y)).collect::<Result<Vec<_>, _>>()?;
    let label = format!("f{}", branch.iter().map(|l| l.to_string()).collect::<String>());
    let fun = shaped(p, label.clone(), xs.clone(), Some(ys.clone()));
    Ok(MonoidElement { tag: Tag::Family { xs, ys }, label, fun })
}

pub fn collapse_map(p: &Partition) -> MonoidElement {
    let p = p.clone();
    let fun = FinFun::host(1, "h", move |a| if p.cell_of(a[0]) == Some(Cell::Ay) { 0 } else { a[0] });
    MonoidElement { tag: Tag::Collapse, label: "h".into(), fun }
}

/// `f ∘ h` for an ℱ-member `f`, the 𝒢′-member agreeing with `f` on `A_x`.
pub fn projected(p: &Partition, f: &MonoidElement) -> MonoidElement {
    match &f.tag {
        Tag::Family { xs, .. } => {
            let label = format!("{}.h", f.label);
            MonoidElement { tag: Tag::Projected { xs: xs.clone() }, label: label.clone(), fun: shaped(p, label, xs.clone(), None) }
        }
        _ => collapse_map(p),
    }
}

/// `id`, `h`, the ℱ-members of up to `cap` branches, and their projections.
/// The flag reports whether branches were dropped by the cap.
pub fn standard_elements(p: &Partition, tree: &ClosedPairSet, cap: usize) -> Result<(Vec<MonoidElement>, bool), MonoidError> {
    let (branches, truncated) = tree.branches(cap);
    let mut out = vec![MonoidElement::identity(), collapse_map(p)];
    let mut family = Vec::new();
    for b in branches.iter().filter(|b| !b.is_empty()) {
        family.push(monoid_element_from_branch(p, tree, b)?);
    }
    let proj: Vec<MonoidElement> = family.iter().map(|f| projected(p, f)).collect();
    out.extend(family);
    out.extend(proj);
    Ok((out, truncated))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Law {
    /// `f ∘ f′ = f′` for `f, f′ ∈ ℱ`, `f′ ≠ id`.
    FamilyAbsorbs,
    /// `h ∘ f = f` for `f ∈ ℱ`, `f ≠ id`.
    CollapseThenFamily,
    /// `f ∘ h` fixes `{0} ∪ T_x ∪ T_y`, equals `f` on `A_x`, and kills `A_y`.
    FamilyThenCollapse,
    /// Every pairwise composite is `id`, `h`, an ℱ-shape or a 𝒢′-shape.
    Closure,
}

impl Law {
    pub const ALL: [Law; 4] = [Law::FamilyAbsorbs, Law::CollapseThenFamily, Law::FamilyThenCollapse, Law::Closure];
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawViolation {
    pub law: Law,
    /// The composite is `outer ∘ inner`.
    pub outer: String,
    pub inner: String,
    pub point: u64,
    pub expected: Option<u64>,
    pub got: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LawSummary {
    pub law: Law,
    pub pairs_checked: u64,
    pub violations: u64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct ClassCounts {
    pub identity: u64,
    pub collapse: u64,
    pub family: u64,
    pub projected: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MonoidVerification {
    pub horizon: u64,
    pub elements: usize,
    pub depth: usize,
    pub laws: Vec<LawSummary>,
    /// First few violations per law.
    pub violations: Vec<LawViolation>,
    pub classes: ClassCounts,
    /// No 𝒢′-member agrees with an ℱ-member on `[0, horizon)`.
    pub disjoint: bool,
    /// Points of `A_x ∪ A_y` below the horizon whose image comes from the
    /// default extension past the tree depth.
    pub default_points: u64,
    pub pass: bool,
}

impl MonoidVerification {
    pub fn first_violation(&self, law: Law) -> Option<&LawViolation> {
        self.violations.iter().find(|v| v.law == law)
    }
}

const VIOLATIONS_PER_LAW: usize = 8;

enum Shape {
    Identity,
    Collapse,
    Family,
    Projected,
}

struct Checker<'a> {
    p: &'a Partition,
    tree: &'a ClosedPairSet,
    n: u64,
    cells: Vec<Cell>,
    /// First `depth` elements of `A_x` and `A_y` that lie below the horizon.
    ax: Vec<u64>,
    ay: Vec<u64>,
    /// Points of `A_x` (resp. `A_y`) below the horizon past the tree depth.
    ax_tail: Vec<u64>,
    ay_tail: Vec<u64>,
    resolved: Vec<ResolvedNode>,
    dx: u64,
    dy: u64,
}

struct ResolvedNode {
    x: u64,
    y: u64,
    children: Vec<ResolvedNode>,
}

fn resolve_tree(p: &Partition, nodes: &[TreeNode]) -> Result<Vec<ResolvedNode>, MonoidError> {
    nodes
        .iter()
        .map(|n| {
            Ok(ResolvedNode {
                x: p.resolve(Cell::Tx, n.label.x)?,
                y: p.resolve(Cell::Ty, n.label.y)?,
                children: resolve_tree(p, &n.children)?,
            })
        })
        .collect()
}

impl<'a> Checker<'a> {
    fn new(p: &'a Partition, tree: &'a ClosedPairSet, n: u64) -> Result<Self, MonoidError> {
        let cells: Vec<Cell> = (0..n).map(|x| p.cell_of(x).ok_or(MonoidError::Gap { x })).collect::<Result<_, _>>()?;
        let ax_all: Vec<u64> = (0..n).filter(|&x| cells[x as usize] == Cell::Ax).collect();
        let ay_all: Vec<u64> = (0..n).filter(|&x| cells[x as usize] == Cell::Ay).collect();
        let d = tree.depth();
        let split = |v: Vec<u64>| {
            let cut = v.len().min(d);
            let (head, tail) = v.split_at(cut);
            (head.to_vec(), tail.to_vec())
        };
        let (ax, ax_tail) = split(ax_all);
        let (ay, ay_tail) = split(ay_all);
        Ok(Checker {
            p,
            tree,
            n,
            cells,
            ax,
            ay,
            ax_tail,
            ay_tail,
            resolved: resolve_tree(p, tree.roots())?,
            dx: p.default_target(Cell::Tx),
            dy: p.default_target(Cell::Ty),
        })
    }

    fn fixed(&self, x: u64) -> bool {
        matches!(self.cells[x as usize], Cell::Zero | Cell::Tx | Cell::Ty)
    }

    /// Classifies a table on `[0, n)`, or returns the first point that fits no shape.
    fn classify(&self, c: &[u64]) -> Result<Shape, u64> {
        if c.iter().enumerate().all(|(x, &v)| v == x as u64) {
            return Ok(Shape::Identity);
        }
        if let Some(x) = (0..self.n).find(|&x| self.fixed(x) && c[x as usize] != x) {
            return Err(x);
        }
        let in_cell = |v: u64, cell: Cell| self.p.cell_of(v) == Some(cell);
        let ay_killed = self.ay.iter().chain(&self.ay_tail).all(|&x| c[x as usize] == 0);
        let ax_fixed = self.ax.iter().chain(&self.ax_tail).all(|&x| c[x as usize] == x);
        if ay_killed && ax_fixed {
            return Ok(Shape::Collapse);
        }
        if let Some(&x) = self.ax.iter().chain(&self.ax_tail).find(|&&x| !in_cell(c[x as usize], Cell::Tx)) {
            return Err(x);
        }
        if let Some(&x) = self.ax_tail.iter().find(|&&x| c[x as usize] != self.dx) {
            return Err(x);
        }
        let xs: Vec<u64> = self.ax.iter().map(|&x| c[x as usize]).collect();
        if ay_killed && !(self.ay.is_empty() && self.ay_tail.is_empty()) {
            return self.follow(&xs, None).map(|()| Shape::Projected);
        }
        if let Some(&x) = self.ay.iter().chain(&self.ay_tail).find(|&&x| !in_cell(c[x as usize], Cell::Ty)) {
            return Err(x);
        }
        if let Some(&x) = self.ay_tail.iter().find(|&&x| c[x as usize] != self.dy) {
            return Err(x);
        }
        let ys: Vec<u64> = self.ay.iter().map(|&y| c[y as usize]).collect();
        self.follow(&xs, Some(&ys)).map(|()| Shape::Family)
    }

    /// Searches for a branch matching the observed images; `ys = None` matches
    /// the first coordinate only. On failure returns the point where the
    /// deepest partial match breaks.
    fn follow(&self, xs: &[u64], ys: Option<&[u64]>) -> Result<(), u64> {
        // `best` is the deepest level entered and whether some node there
        // matched the first coordinate.
        fn go(nodes: &[ResolvedNode], level: usize, xs: &[u64], ys: Option<&[u64]>, best: &mut (usize, bool)) -> bool {
            if level >= xs.len().max(ys.map_or(0, <[u64]>::len)) {
                return true;
            }
            if level > best.0 {
                *best = (level, false);
            }
            for node in nodes {
                let x_ok = xs.get(level).is_none_or(|&v| v == node.x);
                let y_ok = ys.and_then(|ys| ys.get(level)).is_none_or(|&v| v == node.y);
                if x_ok && level == best.0 {
                    best.1 = true;
                }
                if x_ok && y_ok && go(&node.children, level + 1, xs, ys, best) {
                    return true;
                }
            }
            false
        }
        let mut best = (0usize, false);
        if go(&self.resolved, 0, xs, ys, &mut best) {
            return Ok(());
        }
        let (level, x_matched) = best;
        let (ax, ay) = (self.ax.get(level).copied(), self.ay.get(level).copied());
        let point = if x_matched && ys.is_some() { ay.or(ax) } else { ax.or(ay) };
        Err(point.expect("a failed match observed some point at its level"))
    }
}

struct Tally {
    summaries: Vec<LawSummary>,
    violations: Vec<LawViolation>,
}

impl Default for Tally {
    fn default() -> Self {
        Tally {
            summaries: Law::ALL.iter().map(|&law| LawSummary { law, pairs_checked: 0, violations: 0 }).collect(),
            violations: Vec::new(),
        }
    }
}

impl Tally {
    fn summary(&mut self, law: Law) -> &mut LawSummary {
        self.summaries.iter_mut().find(|s| s.law == law).expect("every law has a summary")
    }

    fn checked(&mut self, law: Law) {
        self.summary(law).pairs_checked += 1;
    }

    fn violation(&mut self, law: Law, outer: &str, inner: &str, point: u64, expected: Option<u64>, got: u64) {
        let s = self.summary(law);
        s.violations += 1;
        if s.violations as usize <= VIOLATIONS_PER_LAW {
            self.violations.push(LawViolation { law, outer: outer.into(), inner: inner.into(), point, expected, got });
        }
    }
}

fn tabulate(f: &FinFun, n: u64) -> Vec<u64> {
    (0..n).map(|x| f.call1(x)).collect()
}

/// Checks the composition laws for every ordered pair of `elements` on `[0, n)`.
pub fn verify_monoid_laws(p: &Partition, tree: &ClosedPairSet, elements: &[MonoidElement], n: u64) -> Result<MonoidVerification, MonoidError> {
    let checker = Checker::new(p, tree, n)?;
    let tables: Vec<Vec<u64>> = elements.iter().map(|e| tabulate(&e.fun, n)).collect();
    let compose = |outer: usize, inner: usize| -> Vec<u64> {
        tables[inner]
            .iter()
            .map(|&v| if v < n { tables[outer][v as usize] } else { elements[outer].fun.call1(v) })
            .collect()
    };
    let mut tally = Tally::default();
    let mut classes = ClassCounts::default();
    for (i, a) in elements.iter().enumerate() {
        for (j, b) in elements.iter().enumerate() {
            let c = compose(i, j);
            let mut check = |law: Law, expect: &dyn Fn(u64) -> u64| {
                tally.checked(law);
                if let Some(x) = (0..n).find(|&x| c[x as usize] != expect(x)) {
                    tally.violation(law, &elements[i].label, &elements[j].label, x, Some(expect(x)), c[x as usize]);
                }
            };
            if a.tag.in_family() && b.tag.in_family() && b.tag != Tag::Identity {
                check(Law::FamilyAbsorbs, &|x| tables[j][x as usize]);
            }
            if a.tag == Tag::Collapse && b.tag.in_family() && b.tag != Tag::Identity {
                check(Law::CollapseThenFamily, &|x| tables[j][x as usize]);
            }
            if a.tag.in_family() && b.tag == Tag::Collapse {
                check(Law::FamilyThenCollapse, &|x| match checker.cells[x as usize] {
                    Cell::Ax => tables[i][x as usize],
                    Cell::Ay => 0,
                    _ => x,
                });
            }
            tally.checked(Law::Closure);
            match checker.classify(&c) {
                Ok(Shape::Identity) => classes.identity += 1,
                Ok(Shape::Collapse) => classes.collapse += 1,
                Ok(Shape::Family) => classes.family += 1,
                Ok(Shape::Projected) => classes.projected += 1,
                Err(x) => tally.violation(Law::Closure, &a.label, &b.label, x, None, c[x as usize]),
            }
        }
    }

    let mut disjoint = true;
    if !checker.ay.is_empty() {
        for (i, a) in elements.iter().enumerate() {
            for (j, b) in elements.iter().enumerate() {
                if matches!(a.tag, Tag::Projected { .. }) && b.tag.in_family() && tables[i] == tables[j] {
                    disjoint = false;
                }
            }
        }
    }
    let default_points = (checker.ax_tail.len() + checker.ay_tail.len()) as u64;
    let Tally { summaries, violations } = tally;
    let pass = summaries.iter().all(|s| s.violations == 0) && disjoint;
    Ok(MonoidVerification {
        horizon: n,
        elements: elements.len(),
        depth: checker.tree.depth(),
        laws: summaries,
        violations,
        classes,
        disjoint,
        default_points,
        pass,
    })
}
