//! Parse trees over a user-declared primitive set.
//!
//! A tree is built from function symbols (fixed arity >= 1) and terminals:
//! named variables and, when the set declares a range, ephemeral constants
//! drawn once at creation time. Depth is counted in edges, so a lone
//! terminal has depth 0.

use std::fmt;
use std::sync::Arc;

use crate::error::{EvoError, Result};
use crate::rng::Rng;

/// Denominators smaller than this make protected division return 1.
pub const PROTECTED_DIV_EPS: f64 = 1e-9;

#[derive(Clone)]
pub struct FunctionSymbol {
    pub name: String,
    pub arity: usize,
    pub apply: fn(&[f64]) -> f64,
}

impl FunctionSymbol {
    pub fn new(name: &str, arity: usize, apply: fn(&[f64]) -> f64) -> Self {
        FunctionSymbol { name: name.to_string(), arity, apply }
    }
}

impl fmt::Debug for FunctionSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

impl PartialEq for FunctionSymbol {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.arity == other.arity
    }
}

/// The symbols a tree may be built from.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimitiveSet {
    functions: Vec<FunctionSymbol>,
    variables: Vec<String>,
    /// Inclusive range for ephemeral constants; `None` disables constants.
    constants: Option<(f64, f64)>,
}

impl PrimitiveSet {
    pub fn new(
        functions: Vec<FunctionSymbol>,
        variables: Vec<String>,
        constants: Option<(f64, f64)>,
    ) -> Result<Self> {
        if variables.is_empty() && constants.is_none() {
            return Err(EvoError::InvalidConfig(
                "primitive set needs at least one terminal (a variable or a constant range)"
                    .into(),
            ));
        }
        for f in &functions {
            if f.arity == 0 {
                return Err(EvoError::InvalidConfig(format!(
                    "function symbol `{}` has arity 0; terminals are declared separately",
                    f.name
                )));
            }
        }
        if let Some((lo, hi)) = constants {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(EvoError::InvalidConfig(format!(
                    "constant range [{lo}, {hi}] is not a finite interval"
                )));
            }
        }
        Ok(PrimitiveSet { functions, variables, constants })
    }

    /// The usual symbolic-regression set: +, -, *, protected /, named
    /// variables and an optional constant range.
    pub fn arithmetic(variables: &[&str], constants: Option<(f64, f64)>) -> Result<Self> {
        let functions = vec![
            FunctionSymbol::new("+", 2, |a| a[0] + a[1]),
            FunctionSymbol::new("-", 2, |a| a[0] - a[1]),
            FunctionSymbol::new("*", 2, |a| a[0] * a[1]),
            FunctionSymbol::new("/", 2, |a| {
                if a[1].abs() < PROTECTED_DIV_EPS {
                    1.0
                } else {
                    a[0] / a[1]
                }
            }),
        ];
        PrimitiveSet::new(
            functions,
            variables.iter().map(|v| v.to_string()).collect(),
            constants,
        )
    }

    pub fn functions(&self) -> &[FunctionSymbol] {
        &self.functions
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn constants(&self) -> Option<(f64, f64)> {
        self.constants
    }

    fn terminal_choices(&self) -> usize {
        self.variables.len() + usize::from(self.constants.is_some())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Func { index: usize, children: Vec<Node> },
    Var(usize),
    Const(f64),
}

impl Node {
    pub fn count(&self) -> usize {
        match self {
            Node::Func { children, .. } => 1 + children.iter().map(Node::count).sum::<usize>(),
            _ => 1,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Func { children, .. } => {
                1 + children.iter().map(Node::depth).max().unwrap_or(0)
            }
            _ => 0,
        }
    }
}

#[derive(Clone)]
pub struct ParseTree {
    set: Arc<PrimitiveSet>,
    root: Node,
}

impl ParseTree {
    pub fn new(set: Arc<PrimitiveSet>, root: Node) -> Self {
        ParseTree { set, root }
    }

    pub fn set(&self) -> &Arc<PrimitiveSet> {
        &self.set
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn depth(&self) -> usize {
        self.root.depth()
    }

    pub fn node_count(&self) -> usize {
        self.root.count()
    }

    /// Evaluates the tree with the given variable values, indexed as in the
    /// primitive set's variable list.
    pub fn eval(&self, vars: &[f64]) -> f64 {
        eval_node(&self.root, &self.set, vars)
    }

    /// Checks arity, depth, and symbol membership against the set.
    pub fn check(&self, max_depth: usize) -> Result<()> {
        if self.depth() > max_depth {
            return Err(EvoError::GenotypeMismatch(format!(
                "tree depth {} exceeds the configured maximum {max_depth}",
                self.depth()
            )));
        }
        check_node(&self.root, &self.set)
    }

    /// Clone of the subtree rooted at preorder index `index`.
    pub(crate) fn subtree(&self, index: usize) -> Node {
        let mut counter = 0;
        nth_node(&self.root, index, &mut counter)
            .expect("preorder index within node count")
            .clone()
    }

    /// Depth (from the root) of the node at preorder index `index`.
    pub(crate) fn depth_of(&self, index: usize) -> usize {
        let mut counter = 0;
        depth_of_nth(&self.root, index, 0, &mut counter)
            .expect("preorder index within node count")
    }

    /// New tree with the subtree at preorder index `index` replaced.
    pub(crate) fn with_replaced(&self, index: usize, replacement: Node) -> ParseTree {
        let mut root = self.root.clone();
        let mut counter = 0;
        let mut slot = Some(replacement);
        let replaced = replace_nth(&mut root, index, &mut counter, &mut slot);
        debug_assert!(replaced, "preorder index within node count");
        ParseTree { set: Arc::clone(&self.set), root }
    }
}

impl PartialEq for ParseTree {
    fn eq(&self, other: &Self) -> bool {
        self.root == other.root && self.set == other.set
    }
}

impl fmt::Debug for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ParseTree({self})")
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        render_node(&self.root, &self.set, f)
    }
}

fn eval_node(node: &Node, set: &PrimitiveSet, vars: &[f64]) -> f64 {
    match node {
        Node::Var(i) => vars[*i],
        Node::Const(c) => *c,
        Node::Func { index, children } => {
            let args: Vec<f64> = children.iter().map(|c| eval_node(c, set, vars)).collect();
            (set.functions[*index].apply)(&args)
        }
    }
}

fn check_node(node: &Node, set: &PrimitiveSet) -> Result<()> {
    match node {
        Node::Var(i) => {
            if *i >= set.variables.len() {
                return Err(EvoError::GenotypeMismatch(format!(
                    "variable index {i} outside the primitive set"
                )));
            }
        }
        Node::Const(_) => {
            if set.constants.is_none() {
                return Err(EvoError::GenotypeMismatch(
                    "constant node but the primitive set declares no constants".into(),
                ));
            }
        }
        Node::Func { index, children } => {
            let Some(sym) = set.functions.get(*index) else {
                return Err(EvoError::GenotypeMismatch(format!(
                    "function index {index} outside the primitive set"
                )));
            };
            if children.len() != sym.arity {
                return Err(EvoError::GenotypeMismatch(format!(
                    "`{}` expects {} children, found {}",
                    sym.name,
                    sym.arity,
                    children.len()
                )));
            }
            for c in children {
                check_node(c, set)?;
            }
        }
    }
    Ok(())
}

fn render_node(node: &Node, set: &PrimitiveSet, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match node {
        Node::Var(i) => write!(f, "{}", set.variables[*i]),
        Node::Const(c) => write!(f, "{c}"),
        Node::Func { index, children } => {
            write!(f, "({}", set.functions[*index].name)?;
            for c in children {
                write!(f, " ")?;
                render_node(c, set, f)?;
            }
            write!(f, ")")
        }
    }
}

fn nth_node<'a>(node: &'a Node, target: usize, counter: &mut usize) -> Option<&'a Node> {
    if *counter == target {
        return Some(node);
    }
    *counter += 1;
    if let Node::Func { children, .. } = node {
        for c in children {
            if let Some(found) = nth_node(c, target, counter) {
                return Some(found);
            }
        }
    }
    None
}

fn depth_of_nth(node: &Node, target: usize, depth: usize, counter: &mut usize) -> Option<usize> {
    if *counter == target {
        return Some(depth);
    }
    *counter += 1;
    if let Node::Func { children, .. } = node {
        for c in children {
            if let Some(found) = depth_of_nth(c, target, depth + 1, counter) {
                return Some(found);
            }
        }
    }
    None
}

fn replace_nth(
    node: &mut Node,
    target: usize,
    counter: &mut usize,
    replacement: &mut Option<Node>,
) -> bool {
    if *counter == target {
        *node = replacement.take().expect("replacement consumed once");
        return true;
    }
    *counter += 1;
    if let Node::Func { children, .. } = node {
        for c in children {
            if replace_nth(c, target, counter, replacement) {
                return true;
            }
        }
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeMethod {
    /// Terminals appear only at exactly `max_depth`.
    Full,
    /// Any node may close early with a terminal; depth is capped.
    Grow,
}

/// How initial trees are drawn.
#[derive(Debug, Clone, PartialEq)]
pub enum TreeInit {
    Full { depth: usize },
    Grow { depth: usize },
    /// Classic mixed initialization: depths `min_depth..=max_depth`, each
    /// depth split between full and grow. A draw picks one ramp slot
    /// uniformly; see [`ramp_slot`].
    RampedHalfAndHalf { min_depth: usize, max_depth: usize },
}

impl TreeInit {
    pub fn max_init_depth(&self) -> usize {
        match *self {
            TreeInit::Full { depth } | TreeInit::Grow { depth } => depth,
            TreeInit::RampedHalfAndHalf { max_depth, .. } => max_depth,
        }
    }
}

/// Maps a ramp slot to its (depth, method) pair: slots cycle through the
/// depths in order, alternating full and grow at each depth.
pub fn ramp_slot(slot: usize, min_depth: usize, max_depth: usize) -> (usize, TreeMethod) {
    debug_assert!(min_depth <= max_depth);
    let n_depths = max_depth - min_depth + 1;
    let slot = slot % (2 * n_depths);
    let depth = min_depth + slot / 2;
    let method = if slot % 2 == 0 { TreeMethod::Full } else { TreeMethod::Grow };
    (depth, method)
}

/// Number of distinct ramp slots for a depth range.
pub fn ramp_slots(min_depth: usize, max_depth: usize) -> usize {
    2 * (max_depth - min_depth + 1)
}

/// Draws a random tree of depth <= `max_depth`.
pub fn random_tree<R: Rng + ?Sized>(
    set: &Arc<PrimitiveSet>,
    max_depth: usize,
    method: TreeMethod,
    rng: &mut R,
) -> Result<ParseTree> {
    if set.terminal_choices() == 0 {
        return Err(EvoError::InvalidConfig(
            "cannot build a tree from a function-only primitive set".into(),
        ));
    }
    let root = grow_node(set, max_depth, method, rng);
    Ok(ParseTree::new(Arc::clone(set), root))
}

/// Draws one tree for an initialization policy. Ramped draws pick a slot
/// uniformly, so a sampled population covers all depths and both methods.
pub fn init_tree<R: Rng + ?Sized>(
    set: &Arc<PrimitiveSet>,
    init: &TreeInit,
    rng: &mut R,
) -> Result<ParseTree> {
    match *init {
        TreeInit::Full { depth } => random_tree(set, depth, TreeMethod::Full, rng),
        TreeInit::Grow { depth } => random_tree(set, depth, TreeMethod::Grow, rng),
        TreeInit::RampedHalfAndHalf { min_depth, max_depth } => {
            let slot = rng.random_range(0..ramp_slots(min_depth, max_depth));
            let (depth, method) = ramp_slot(slot, min_depth, max_depth);
            random_tree(set, depth, method, rng)
        }
    }
}

/// Fresh subtree for mutation: grow method within a depth budget.
pub(crate) fn grow_subtree<R: Rng + ?Sized>(
    set: &Arc<PrimitiveSet>,
    depth_budget: usize,
    rng: &mut R,
) -> Node {
    grow_node(set, depth_budget, TreeMethod::Grow, rng)
}

fn grow_node<R: Rng + ?Sized>(
    set: &PrimitiveSet,
    depth_left: usize,
    method: TreeMethod,
    rng: &mut R,
) -> Node {
    let n_funcs = set.functions.len();
    let n_terms = set.terminal_choices();
    let pick_terminal = if depth_left == 0 || n_funcs == 0 {
        true
    } else {
        match method {
            TreeMethod::Full => false,
            TreeMethod::Grow => rng.random_range(0..n_funcs + n_terms) >= n_funcs,
        }
    };
    if pick_terminal {
        return gen_terminal(set, rng);
    }
    let index = rng.random_range(0..n_funcs);
    let arity = set.functions[index].arity;
    let children = (0..arity)
        .map(|_| grow_node(set, depth_left - 1, method, rng))
        .collect();
    Node::Func { index, children }
}

fn gen_terminal<R: Rng + ?Sized>(set: &PrimitiveSet, rng: &mut R) -> Node {
    let n_vars = set.variables.len();
    let choice = rng.random_range(0..set.terminal_choices());
    if choice < n_vars {
        Node::Var(choice)
    } else {
        let (lo, hi) = set.constants.expect("constant choice only offered when declared");
        Node::Const(if hi > lo { rng.random_range(lo..hi) } else { lo })
    }
}

/// Node count of the structural difference under simultaneous traversal:
/// matching symbols recurse into their children, any mismatch counts both
/// whole subtrees.
pub fn structural_distance(a: &ParseTree, b: &ParseTree) -> f64 {
    node_distance(&a.root, &b.root) as f64
}

fn node_distance(a: &Node, b: &Node) -> usize {
    let same = match (a, b) {
        (Node::Var(i), Node::Var(j)) => i == j,
        (Node::Const(x), Node::Const(y)) => x == y,
        (Node::Func { index: i, .. }, Node::Func { index: j, .. }) => i == j,
        _ => false,
    };
    if !same {
        return a.count() + b.count();
    }
    match (a, b) {
        (Node::Func { children: ca, .. }, Node::Func { children: cb, .. }) => {
            ca.iter().zip(cb).map(|(x, y)| node_distance(x, y)).sum()
        }
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    fn arith() -> Arc<PrimitiveSet> {
        Arc::new(PrimitiveSet::arithmetic(&["x"], Some((-1.0, 1.0))).unwrap())
    }

    fn leaves_at_depth(node: &Node, depth: usize, out: &mut Vec<usize>) {
        match node {
            Node::Func { children, .. } => {
                for c in children {
                    leaves_at_depth(c, depth + 1, out);
                }
            }
            _ => out.push(depth),
        }
    }

    #[test]
    fn max_depth_zero_is_a_single_terminal() {
        let set = arith();
        let mut rng = stream(1);
        for _ in 0..50 {
            let t = random_tree(&set, 0, TreeMethod::Full, &mut rng).unwrap();
            assert_eq!(t.node_count(), 1);
            assert_eq!(t.depth(), 0);
        }
    }

    #[test]
    fn full_method_puts_every_leaf_at_max_depth() {
        let set = arith();
        let mut rng = stream(2);
        for _ in 0..100 {
            let t = random_tree(&set, 2, TreeMethod::Full, &mut rng).unwrap();
            let mut depths = Vec::new();
            leaves_at_depth(t.root(), 0, &mut depths);
            assert!(depths.iter().all(|&d| d == 2), "leaf depths: {depths:?}");
        }
    }

    #[test]
    fn grow_method_respects_depth_cap() {
        let set = arith();
        let mut rng = stream(3);
        for _ in 0..1000 {
            let t = random_tree(&set, 4, TreeMethod::Grow, &mut rng).unwrap();
            assert!(t.depth() <= 4);
            t.check(4).unwrap();
        }
    }

    #[test]
    fn ramped_sampling_covers_every_depth_and_both_methods() {
        let set = arith();
        let init = TreeInit::RampedHalfAndHalf { min_depth: 2, max_depth: 6 };
        let mut rng = stream(4);
        let mut seen_slots = std::collections::HashSet::new();
        for _ in 0..1000 {
            let t = init_tree(&set, &init, &mut rng).unwrap();
            assert!(t.depth() <= 6);
            // A full tree of depth d realizes its slot exactly; grow trees may
            // close early. Recover coverage from the observed shapes: full
            // trees are identified per depth, and any early-terminating tree
            // witnesses the grow method.
            let mut depths = Vec::new();
            leaves_at_depth(t.root(), 0, &mut depths);
            let is_full_shaped = depths.iter().all(|&d| d == t.depth());
            seen_slots.insert((t.depth(), is_full_shaped));
        }
        for depth in 2..=6 {
            assert!(
                seen_slots.iter().any(|&(d, _)| d == depth),
                "no tree of depth {depth} in 1000 ramped samples"
            );
        }
        assert!(seen_slots.iter().any(|&(_, full)| full));
        assert!(seen_slots.iter().any(|&(_, full)| !full));
    }

    #[test]
    fn ramp_slots_cycle_depths_and_alternate_methods() {
        assert_eq!(ramp_slot(0, 2, 6), (2, TreeMethod::Full));
        assert_eq!(ramp_slot(1, 2, 6), (2, TreeMethod::Grow));
        assert_eq!(ramp_slot(2, 2, 6), (3, TreeMethod::Full));
        assert_eq!(ramp_slot(9, 2, 6), (6, TreeMethod::Grow));
        assert_eq!(ramp_slot(10, 2, 6), (2, TreeMethod::Full));
    }

    #[test]
    fn function_only_set_is_rejected() {
        let err = PrimitiveSet::new(
            vec![FunctionSymbol::new("+", 2, |a| a[0] + a[1])],
            vec![],
            None,
        );
        assert!(err.is_err());
    }

    #[test]
    fn protected_division_near_zero_denominator_returns_one() {
        let set = arith();
        let div = Node::Func { index: 3, children: vec![Node::Const(1.0), Node::Const(0.0)] };
        let t = ParseTree::new(Arc::clone(&set), div);
        assert_eq!(t.eval(&[0.0]), 1.0);
        let div_tiny =
            Node::Func { index: 3, children: vec![Node::Const(5.0), Node::Const(1e-10)] };
        let t = ParseTree::new(Arc::clone(&set), div_tiny);
        assert_eq!(t.eval(&[0.0]), 1.0);
        let div_ok = Node::Func { index: 3, children: vec![Node::Const(6.0), Node::Const(2.0)] };
        let t = ParseTree::new(set, div_ok);
        assert_eq!(t.eval(&[0.0]), 3.0);
    }

    #[test]
    fn renders_as_prefix_expression() {
        let set = arith();
        // (+ x (* x x))
        let inner = Node::Func { index: 2, children: vec![Node::Var(0), Node::Var(0)] };
        let root = Node::Func { index: 0, children: vec![Node::Var(0), inner] };
        let t = ParseTree::new(set, root);
        assert_eq!(t.to_string(), "(+ x (* x x))");
        assert_eq!(t.eval(&[3.0]), 12.0);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.node_count(), 5);
    }

    #[test]
    fn structural_distance_counts_mismatched_subtrees() {
        let set = arith();
        let x = ParseTree::new(Arc::clone(&set), Node::Var(0));
        assert_eq!(structural_distance(&x, &x), 0.0);

        let sum = ParseTree::new(
            Arc::clone(&set),
            Node::Func { index: 0, children: vec![Node::Var(0), Node::Var(0)] },
        );
        // Roots differ: whole trees counted, 1 + 3 nodes.
        assert_eq!(structural_distance(&x, &sum), 4.0);

        let prod = ParseTree::new(
            Arc::clone(&set),
            Node::Func { index: 2, children: vec![Node::Var(0), Node::Var(0)] },
        );
        // Same shape, different root symbol.
        assert_eq!(structural_distance(&sum, &prod), 6.0);

        let sum_c = ParseTree::new(
            Arc::clone(&set),
            Node::Func { index: 0, children: vec![Node::Var(0), Node::Const(0.5)] },
        );
        // Roots match, left children match, right leaf differs.
        assert_eq!(structural_distance(&sum, &sum_c), 2.0);
    }

    #[test]
    fn subtree_indexing_is_preorder() {
        let set = arith();
        let inner = Node::Func { index: 2, children: vec![Node::Var(0), Node::Const(0.5)] };
        let root = Node::Func { index: 0, children: vec![Node::Var(0), inner] };
        let t = ParseTree::new(set, root);
        assert_eq!(t.subtree(1), Node::Var(0));
        assert!(matches!(t.subtree(2), Node::Func { index: 2, .. }));
        assert_eq!(t.subtree(4), Node::Const(0.5));
        assert_eq!(t.depth_of(0), 0);
        assert_eq!(t.depth_of(2), 1);
        assert_eq!(t.depth_of(4), 2);

        let replaced = t.with_replaced(4, Node::Var(0));
        assert_eq!(replaced.to_string(), "(+ x (* x x))");
    }
}
