//! Syntax tree of model files and expressions.

use vtc_core::Rational;

/// A tensor or algebra index: a literal component or a bound variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Idx {
    Lit(u8),
    Var(String),
}

/// An inclusive range `lo..hi` for sums and rule families.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Range {
    pub lo: u8,
    pub hi: u8,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(Rational),
    /// A parameter, density, index variable, whole algebra-valued field,
    /// `vol`, or the shorthands `x0`, `dx0`.
    Name(String),
    /// `A[mu]` or `A[mu],[nu nu]`; `x[i]` and `dx[i]` are coordinates.
    Ref { name: String, idx: Vec<Idx>, der: Option<Vec<Idx>> },
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(String, Vec<Expr>),
    /// `sum(i, e)` over all base directions, or `sum(i in lo..hi, e)`.
    Sum { var: String, range: Option<Range>, body: Box<Expr> },
    /// `<a, b>` with the invariant form.
    Pair(Box<Expr>, Box<Expr>),
    /// `[a, b]` with the structure constants.
    Comm(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShapeKind {
    Scalar,
    Vector,
    Algebra,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Shape {
    pub kind: ShapeKind,
    /// Restricted component range for vectors.
    pub range: Option<Range>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FieldDecl {
    pub name: String,
    pub parity_odd: bool,
    pub ghost: i32,
    /// One of `field`, `antifield`, `source`.
    pub role: String,
    pub shape: Shape,
    pub conj: Option<String>,
    /// Base form multiplying every component, e.g. `dx[0] + dx[1]`.
    pub form: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraDecl {
    pub dim: u8,
    /// `[e_i, e_j] = c e_k` entries `(i, j, k, c)`.
    pub constants: Vec<(u8, u8, u8, Rational)>,
    /// Invariant form entries `(i, j, c)`.
    pub form: Vec<(u8, u8, Rational)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum StructureDecl {
    Theta(Expr),
    Omega(Expr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseRule {
    /// The rewritten jet, a `Ref` with a purely temporal derivative.
    pub lhs: Expr,
    pub rhs: Expr,
    /// `for i in lo..hi`.
    pub family: Option<(String, Range)>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct FoliationDecl {
    pub time: Vec<u8>,
    pub phase: Vec<PhaseRule>,
    pub energy: Option<String>,
    pub affine: Option<String>,
    pub central: Option<Expr>,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ModelAst {
    pub name: String,
    pub dim: u8,
    pub metric: Vec<i8>,
    pub params: Vec<String>,
    pub algebra: Option<AlgebraDecl>,
    pub fields: Vec<FieldDecl>,
    pub structure: Option<StructureDecl>,
    pub structure_ghost: Option<i64>,
    pub densities: Vec<(String, Expr)>,
    pub master: Option<String>,
    pub foliation: Option<FoliationDecl>,
}
