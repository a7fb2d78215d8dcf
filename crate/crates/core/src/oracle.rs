//! A brute-force oracle for row unification.
//!
//! Over a small finite universe of labels, base types and row sizes, the
//! oracle enumerates every ground assignment to a problem's variables and
//! keeps the ones that make both rows equal. A unifier agrees with the
//! oracle when the ground instances of its answer are exactly that set, or
//! when it fails and the set is empty. Comparing solution sets rather than
//! substitutions makes the check immune to fresh-variable naming.
//!
//! Nothing here calls into the unifier except through the function being
//! checked.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use thiserror::Error;

use crate::pretty::Renamer;
use crate::syntax::{Kind, Label, RowType, Type, TypeVar, VarSupply};
use crate::unify::{unify_rows, Subst, UnifyError};

/// Widest label alphabet the compact row encoding supports.
pub const MAX_LABELS: usize = 16;
/// Most base types the compact row encoding supports.
pub const MAX_BASE_TYPES: usize = 15;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SpaceError {
    #[error("the label alphabet must have between 1 and {MAX_LABELS} labels, got {0}")]
    Labels(usize),
    #[error("there must be between 1 and {MAX_BASE_TYPES} base types, got {0}")]
    BaseTypes(usize),
    #[error("labels in the alphabet must be distinct")]
    DuplicateLabel,
}

/// The finite universe the oracle enumerates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSpace {
    labels: Vec<Label>,
    base_types: Vec<Type>,
    max_row_size: usize,
}

impl Default for GroundSpace {
    /// Labels `a..d`, base types `Int`, `Bool`, `String`, rows of up to 3 fields.
    fn default() -> Self {
        GroundSpace::sized(4, 3, 3).expect("default space is valid")
    }
}

impl GroundSpace {
    pub fn new(
        labels: Vec<Label>,
        base_types: Vec<Type>,
        max_row_size: usize,
    ) -> Result<GroundSpace, SpaceError> {
        if labels.is_empty() || labels.len() > MAX_LABELS {
            return Err(SpaceError::Labels(labels.len()));
        }
        if base_types.is_empty() || base_types.len() > MAX_BASE_TYPES {
            return Err(SpaceError::BaseTypes(base_types.len()));
        }
        if labels.iter().collect::<BTreeSet<_>>().len() != labels.len() {
            return Err(SpaceError::DuplicateLabel);
        }
        Ok(GroundSpace {
            labels,
            base_types,
            max_row_size,
        })
    }

    /// The first `labels` letters of the alphabet and the first `types` of
    /// `Int`, `Bool`, `String`, followed by `T3`, `T4`, ... if more are asked for.
    pub fn sized(
        labels: usize,
        types: usize,
        max_row_size: usize,
    ) -> Result<GroundSpace, SpaceError> {
        if labels > MAX_LABELS {
            return Err(SpaceError::Labels(labels));
        }
        let labels = (0..labels)
            .map(|i| Label::new(&((b'a' + i as u8) as char).to_string()))
            .collect();
        let base_types = (0..types)
            .map(|i| match i {
                0 => Type::int(),
                1 => Type::bool(),
                2 => Type::string(),
                n => Type::Con(format!("T{n}")),
            })
            .collect();
        GroundSpace::new(labels, base_types, max_row_size)
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn base_types(&self) -> &[Type] {
        &self.base_types
    }

    pub fn max_row_size(&self) -> usize {
        self.max_row_size
    }

    fn label_index(&self, l: &Label) -> Option<usize> {
        self.labels.iter().position(|x| x == l)
    }

    fn type_index(&self, t: &Type) -> Option<u8> {
        self.base_types.iter().position(|x| x == t).map(|i| i as u8)
    }

    /// Every ground row code, smallest rows first.
    fn ground_codes(&self) -> Vec<u64> {
        let mut out = vec![0u64];
        let mut frontier = vec![(0u64, 0usize)];
        for _ in 0..self.max_row_size.min(self.labels.len()) {
            let mut next = Vec::new();
            for &(code, from) in &frontier {
                for l in from..self.labels.len() {
                    for t in 0..self.base_types.len() {
                        let grown = code | slot(l, t as u8);
                        next.push((grown, l + 1));
                        out.push(grown);
                    }
                }
            }
            frontier = next;
        }
        out
    }

    fn decode_row(&self, code: u64) -> RowType {
        RowType::closed((0..self.labels.len()).filter_map(|l| {
            let nibble = (code >> (4 * l)) & 0xf;
            (nibble != 0).then(|| {
                (
                    self.labels[l].clone(),
                    self.base_types[nibble as usize - 1].clone(),
                )
            })
        }))
    }
}

// A ground row is a u64 with one 4-bit slot per label: 0 when the label is
// absent, otherwise 1 + the index of its base type.

fn slot(label: usize, ty: u8) -> u64 {
    u64::from(ty + 1) << (4 * label)
}

fn presence(code: u64) -> u64 {
    (code | code >> 1 | code >> 2 | code >> 3) & 0x1111_1111_1111_1111
}

fn row_size(code: u64) -> usize {
    presence(code).count_ones() as usize
}

/// Union of two rows, `None` if they share a label.
fn merge(a: u64, b: u64) -> Option<u64> {
    (presence(a) & presence(b) == 0).then_some(a | b)
}

/// Every closed row over the space with at most `max_row_size` fields.
pub fn enumerate_ground_rows(space: &GroundSpace) -> impl Iterator<Item = RowType> + '_ {
    space
        .ground_codes()
        .into_iter()
        .map(|code| space.decode_row(code))
}

/// A row unification problem.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub left: RowType,
    pub right: RowType,
}

impl Problem {
    pub fn new(left: RowType, right: RowType) -> Problem {
        Problem { left, right }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut names = Renamer::new();
        let left = names.row_to_string(&self.left);
        let right = names.row_to_string(&self.right);
        write!(f, "{left} ~ {right}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("label `{0}` is not in the space")]
    UnknownLabel(Label),
    #[error("field type `{0}` is neither a base type of the space nor a type variable")]
    UnsupportedField(Type),
    #[error("the problem has {0} row variables; at most 2 are supported")]
    TooManyRowVars(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Val {
    Base(u8),
    Row(u64),
}

#[derive(Clone, Copy, Debug)]
enum Field {
    Base(u8),
    Star(usize),
}

#[derive(Debug)]
struct Side {
    fields: Vec<(usize, Field)>,
    tail: Option<usize>,
}

impl Side {
    fn eval(&self, stars: &[u8], rows: &[u64]) -> Option<u64> {
        let mut code = 0;
        for &(label, field) in &self.fields {
            let ty = match field {
                Field::Base(b) => b,
                Field::Star(i) => stars[i],
            };
            code |= slot(label, ty);
        }
        match self.tail {
            Some(i) => merge(code, rows[i]),
            None => Some(code),
        }
    }
}

/// A problem translated onto the compact encoding. Problem variables are
/// ordered star variables first, then row variables.
#[derive(Debug)]
struct Compiled {
    stars: Vec<TypeVar>,
    rows: Vec<TypeVar>,
    left: Side,
    right: Side,
}

impl Compiled {
    fn new(p: &Problem, space: &GroundSpace) -> Result<Compiled, ProblemError> {
        let mut stars: Vec<TypeVar> = Vec::new();
        let mut rows: Vec<TypeVar> = Vec::new();
        let mut side = |r: &RowType| -> Result<Side, ProblemError> {
            let mut fields = Vec::new();
            for (label, ty) in &r.fields {
                let l = space
                    .label_index(label)
                    .ok_or_else(|| ProblemError::UnknownLabel(label.clone()))?;
                let field = match ty {
                    Type::Var(v) if v.kind == Kind::Star => Field::Star(index_of(&mut stars, v)),
                    other => Field::Base(
                        space
                            .type_index(other)
                            .ok_or_else(|| ProblemError::UnsupportedField(other.clone()))?,
                    ),
                };
                fields.push((l, field));
            }
            let tail = r.tail.as_ref().map(|v| index_of(&mut rows, v));
            Ok(Side { fields, tail })
        };
        let left = side(&p.left)?;
        let right = side(&p.right)?;
        if rows.len() > 2 {
            return Err(ProblemError::TooManyRowVars(rows.len()));
        }
        Ok(Compiled {
            stars,
            rows,
            left,
            right,
        })
    }

    fn vars(&self) -> Vec<TypeVar> {
        self.stars.iter().chain(&self.rows).cloned().collect()
    }

    fn assignment(&self, stars: &[u8], rows: &[u64]) -> Vec<Val> {
        stars
            .iter()
            .map(|&b| Val::Base(b))
            .chain(rows.iter().map(|&r| Val::Row(r)))
            .collect()
    }

    /// All ground assignments solving the problem.
    fn solutions(&self, space: &GroundSpace, codes: &[u64]) -> BTreeSet<Vec<Val>> {
        let mut out = BTreeSet::new();
        let n_types = space.base_types.len();
        for stars in mixed_radix(&vec![n_types; self.stars.len()]) {
            let stars: Vec<u8> = stars.into_iter().map(|i| i as u8).collect();
            match self.rows.len() {
                0 => {
                    if self.left.eval(&stars, &[]) == self.right.eval(&stars, &[]) {
                        out.insert(self.assignment(&stars, &[]));
                    }
                }
                1 => {
                    for &r in codes {
                        let rows = [r];
                        let (l, rr) = (
                            self.left.eval(&stars, &rows),
                            self.right.eval(&stars, &rows),
                        );
                        if l.is_some() && l == rr {
                            out.insert(self.assignment(&stars, &rows));
                        }
                    }
                }
                _ => {
                    // Each side owns one of the two row variables, so the
                    // nested loop over pairs is a join on the evaluated rows.
                    let (left, right, swap) = match (self.left.tail, self.right.tail) {
                        (Some(0), Some(1)) => (&self.left, &self.right, false),
                        (Some(1), Some(0)) => (&self.right, &self.left, true),
                        _ => unreachable!("two row variables means one tail per side"),
                    };
                    let mut by_value: HashMap<u64, Vec<u64>> = HashMap::new();
                    for &r1 in codes {
                        if let Some(v) = right.eval(&stars, &[0, r1]) {
                            by_value.entry(v).or_default().push(r1);
                        }
                    }
                    for &r0 in codes {
                        let Some(v) = left.eval(&stars, &[r0, 0]) else {
                            continue;
                        };
                        for &r1 in by_value.get(&v).into_iter().flatten() {
                            let rows = if swap { [r1, r0] } else { [r0, r1] };
                            out.insert(self.assignment(&stars, &rows));
                        }
                    }
                }
            }
        }
        out
    }

    /// The ground instances, restricted to the space, of a unifier's answer.
    /// `Err` names a binding the space cannot express at all.
    fn instances(
        &self,
        subst: &Subst,
        space: &GroundSpace,
        codes: &[u64],
    ) -> Result<BTreeSet<Vec<Val>>, Type> {
        let images: Vec<Type> = self
            .vars()
            .into_iter()
            .map(|v| subst.get(&v).cloned().unwrap_or_else(|| Type::var(v)))
            .collect();
        let mut inst_stars: Vec<TypeVar> = Vec::new();
        let mut inst_rows: Vec<TypeVar> = Vec::new();
        for image in &images {
            for v in image.vars_in_order() {
                match v.kind {
                    Kind::Star => index_of(&mut inst_stars, &v),
                    Kind::Row => index_of(&mut inst_rows, &v),
                    Kind::Arrow(..) => return Err(image.clone()),
                };
            }
        }

        let mut radix = vec![space.base_types.len(); inst_stars.len()];
        radix.extend(std::iter::repeat_n(codes.len(), inst_rows.len()));
        let mut out = BTreeSet::new();
        'theta: for digits in mixed_radix(&radix) {
            let (star_digits, row_digits) = digits.split_at(inst_stars.len());
            let theta = Instance {
                stars: inst_stars
                    .iter()
                    .zip(star_digits)
                    .map(|(v, &d)| (v.id, d as u8))
                    .collect(),
                rows: inst_rows
                    .iter()
                    .zip(row_digits)
                    .map(|(v, &d)| (v.id, codes[d]))
                    .collect(),
            };
            let mut assignment = Vec::with_capacity(images.len());
            for image in &images {
                match theta.eval(image, space)? {
                    Some(Val::Row(code)) if row_size(code) > space.max_row_size => continue 'theta,
                    Some(val) => assignment.push(val),
                    None => continue 'theta,
                }
            }
            let (stars, rows) = split_assignment(&assignment, self.stars.len());
            // Instances under which a problem row repeats a label are not
            // rows at all; the enumeration skips them too.
            if self.left.eval(&stars, &rows).is_none() || self.right.eval(&stars, &rows).is_none() {
                continue;
            }
            out.insert(assignment);
        }
        Ok(out)
    }
}

fn split_assignment(assignment: &[Val], n_stars: usize) -> (Vec<u8>, Vec<u64>) {
    let stars = assignment[..n_stars]
        .iter()
        .map(|v| match v {
            Val::Base(b) => *b,
            Val::Row(_) => unreachable!("star variable assigned a row"),
        })
        .collect();
    let rows = assignment[n_stars..]
        .iter()
        .map(|v| match v {
            Val::Row(r) => *r,
            Val::Base(_) => unreachable!("row variable assigned a type"),
        })
        .collect();
    (stars, rows)
}

struct Instance {
    stars: HashMap<u32, u8>,
    rows: HashMap<u32, u64>,
}

impl Instance {
    /// `Ok(None)` when the instance is not a well-formed row.
    fn eval(&self, t: &Type, space: &GroundSpace) -> Result<Option<Val>, Type> {
        match t {
            Type::Var(v) if v.kind == Kind::Star => Ok(Some(Val::Base(self.stars[&v.id]))),
            Type::Row(row) => {
                let mut code = 0;
                for (label, ty) in &row.fields {
                    let l = space.label_index(label).ok_or_else(|| t.clone())?;
                    match self.eval(ty, space)? {
                        Some(Val::Base(b)) => code |= slot(l, b),
                        _ => return Err(t.clone()),
                    }
                }
                Ok(match &row.tail {
                    Some(v) => merge(code, self.rows[&v.id]).map(Val::Row),
                    None => Some(Val::Row(code)),
                })
            }
            other => space
                .type_index(other)
                .map(|b| Some(Val::Base(b)))
                .ok_or_else(|| t.clone()),
        }
    }
}

fn index_of(vars: &mut Vec<TypeVar>, v: &TypeVar) -> usize {
    match vars.iter().position(|w| w.id == v.id) {
        Some(i) => i,
        None => {
            vars.push(v.clone());
            vars.len() - 1
        }
    }
}

/// Every digit vector with `digits[i] < radix[i]`, in lexicographic order.
fn mixed_radix(radix: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = radix.iter().product();
    (0..total).map(move |mut n| {
        let mut digits = vec![0; radix.len()];
        for i in (0..radix.len()).rev() {
            digits[i] = n % radix[i];
            n /= radix[i];
        }
        digits
    })
}

/// All ground assignments to the problem's variables, drawn from the space,
/// that make the two rows equal.
pub fn ground_solutions(
    p: &Problem,
    space: &GroundSpace,
) -> Result<Vec<BTreeMap<TypeVar, Type>>, ProblemError> {
    let compiled = Compiled::new(p, space)?;
    let vars = compiled.vars();
    let solutions = compiled.solutions(space, &space.ground_codes());
    Ok(solutions
        .into_iter()
        .map(|assignment| {
            vars.iter()
                .cloned()
                .zip(assignment.into_iter().map(|val| match val {
                    Val::Base(b) => space.base_types[b as usize].clone(),
                    Val::Row(code) => Type::Row(space.decode_row(code)),
                }))
                .collect()
        })
        .collect())
}

/// How a unifier's answer compares with the enumerated solutions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// The unifier failed and nothing in the space solves the problem.
    NoSolution,
    /// The unifier's instances are exactly the enumerated solutions.
    Solutions(usize),
    /// The unifier failed on a solvable problem.
    MissedSolutions { error: UnifyError, solutions: usize },
    /// The unifier's answer is wrong: `unsound` instances that are not
    /// solutions, `incomplete` solutions that are not instances.
    Mismatch {
        subst: Subst,
        unsound: usize,
        incomplete: usize,
    },
    /// The answer binds a variable to something outside the space.
    Inexpressible { subst: Subst, binding: Type },
}

impl Verdict {
    pub fn agrees(&self) -> bool {
        matches!(self, Verdict::NoSolution | Verdict::Solutions(_))
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::NoSolution => f.write_str("no solution, unifier fails"),
            Verdict::Solutions(n) => write!(f, "{n} ground solutions, all instances of the unifier"),
            Verdict::MissedSolutions { error, solutions } => {
                write!(f, "unifier failed ({error}) but {solutions} ground solutions exist")
            }
            Verdict::Mismatch { subst, unsound, incomplete } => write!(
                f,
                "unifier {} has {unsound} instances that are not solutions and misses {incomplete} solutions",
                show_subst(subst)
            ),
            Verdict::Inexpressible { subst, binding } => {
                write!(f, "unifier {} binds outside the space: `{binding}`", show_subst(subst))
            }
        }
    }
}

fn show_subst(s: &Subst) -> String {
    let mut names = Renamer::new();
    let parts: Vec<String> = s
        .iter()
        .map(|(v, t)| format!("{} := {}", names.name(v), names.type_to_string(t)))
        .collect();
    format!("[{}]", parts.join(", "))
}

/// A row unifier under test.
pub type RowUnifier<'a> =
    dyn Fn(&RowType, &RowType, &mut VarSupply) -> Result<Subst, UnifyError> + 'a;

/// Runs `unifier` on the problem and compares it with the enumeration.
pub fn judge(
    p: &Problem,
    space: &GroundSpace,
    unifier: &RowUnifier<'_>,
) -> Result<Verdict, ProblemError> {
    judge_with_codes(p, space, unifier, &space.ground_codes())
}

fn judge_with_codes(
    p: &Problem,
    space: &GroundSpace,
    unifier: &RowUnifier<'_>,
    codes: &[u64],
) -> Result<Verdict, ProblemError> {
    let compiled = Compiled::new(p, space)?;
    let solutions = compiled.solutions(space, codes);
    let mut supply = VarSupply::starting_at(FRESH_BASE);
    Ok(match unifier(&p.left, &p.right, &mut supply) {
        Err(_) if solutions.is_empty() => Verdict::NoSolution,
        Err(error) => Verdict::MissedSolutions {
            error,
            solutions: solutions.len(),
        },
        Ok(subst) => match compiled.instances(&subst, space, codes) {
            Err(binding) => Verdict::Inexpressible { subst, binding },
            Ok(instances) if instances == solutions => Verdict::Solutions(solutions.len()),
            Ok(instances) => Verdict::Mismatch {
                unsound: instances.difference(&solutions).count(),
                incomplete: solutions.difference(&instances).count(),
                subst,
            },
        },
    })
}

/// True iff [`unify_rows`] fails exactly when the problem has no ground
/// solution, and otherwise its answer's ground instances are exactly the
/// ground solutions.
pub fn oracle_agrees(p: &Problem, space: &GroundSpace) -> Result<bool, ProblemError> {
    Ok(judge(p, space, &unify_rows)?.agrees())
}

/// Ids of the variables problems are built from.
pub const ROW_VAR_IDS: [u32; 2] = [0, 1];
pub const STAR_VAR_IDS: [u32; 2] = [2, 3];
/// First id the unifier may allocate; clear of the problem variables.
const FRESH_BASE: u32 = 16;

fn row_var(i: usize) -> TypeVar {
    TypeVar::new(ROW_VAR_IDS[i], Kind::Row)
}

fn star_var(i: usize) -> TypeVar {
    TypeVar::new(STAR_VAR_IDS[i], Kind::Star)
}

/// Every problem whose sides are ground rows of the space, the left one
/// optionally open on `r1` and the right one optionally open on `r1` or `r2`.
pub fn exhaustive_problems(space: &GroundSpace) -> impl Iterator<Item = Problem> + '_ {
    let codes = space.ground_codes();
    let left_tails = [None, Some(row_var(0))];
    let right_tails = [None, Some(row_var(0)), Some(row_var(1))];
    let rows: Vec<RowType> = codes.iter().map(|&c| space.decode_row(c)).collect();
    let mut lefts = Vec::new();
    for r in &rows {
        for t in &left_tails {
            lefts.push(RowType {
                tail: t.clone(),
                ..r.clone()
            });
        }
    }
    let mut rights = Vec::new();
    for r in &rows {
        for t in &right_tails {
            rights.push(RowType {
                tail: t.clone(),
                ..r.clone()
            });
        }
    }
    lefts.into_iter().flat_map(move |l| {
        rights
            .clone()
            .into_iter()
            .map(move |r| Problem::new(l.clone(), r))
    })
}

/// A random problem over the space. Fields draw from the base types and two
/// star variables; each side has at most one tail drawn from two row
/// variables.
pub fn random_problem<R: Rng>(rng: &mut R, space: &GroundSpace) -> Problem {
    let side = |rng: &mut R| {
        let size = rng.gen_range(0..=space.max_row_size.min(space.labels.len()));
        let labels: Vec<&Label> = space.labels.choose_multiple(rng, size).collect();
        let fields: Vec<(Label, Type)> = labels
            .into_iter()
            .map(|l| {
                let pick = rng.gen_range(0..space.base_types.len() + 2);
                let ty = match pick.checked_sub(space.base_types.len()) {
                    Some(i) => Type::var(star_var(i)),
                    None => space.base_types[pick].clone(),
                };
                (l.clone(), ty)
            })
            .collect();
        let tail = match rng.gen_range(0..3) {
            0 => None,
            i => Some(row_var(i - 1)),
        };
        RowType {
            fields: fields.into_iter().collect(),
            tail,
        }
    };
    let left = side(rng);
    let right = side(rng);
    Problem::new(left, right)
}

/// Summary of an oracle campaign.
#[derive(Clone, Debug)]
pub struct CampaignReport {
    pub exhaustive: usize,
    pub sampled: usize,
    pub failures: usize,
    pub solvable: usize,
    pub first_counterexample: Option<(Problem, Verdict)>,
}

impl CampaignReport {
    pub fn problems(&self) -> usize {
        self.exhaustive + self.sampled
    }
}

/// Runs the exhaustive problem set and `samples` random problems through
/// `unifier`.
pub fn run_campaign(
    space: &GroundSpace,
    samples: usize,
    seed: u64,
    unifier: &RowUnifier<'_>,
) -> CampaignReport {
    let codes = space.ground_codes();
    let mut report = CampaignReport {
        exhaustive: 0,
        sampled: 0,
        failures: 0,
        solvable: 0,
        first_counterexample: None,
    };
    let record = |report: &mut CampaignReport, p: Problem| {
        let verdict = judge_with_codes(&p, space, unifier, &codes)
            .expect("generated problems fit their space");
        if matches!(
            verdict,
            Verdict::Solutions(_) | Verdict::MissedSolutions { .. }
        ) {
            report.solvable += 1;
        }
        if !verdict.agrees() {
            report.failures += 1;
            report.first_counterexample.get_or_insert((p, verdict));
        }
    };
    for p in exhaustive_problems(space) {
        report.exhaustive += 1;
        record(&mut report, p);
    }
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    for _ in 0..samples {
        report.sampled += 1;
        let p = random_problem(&mut rng, space);
        record(&mut report, p);
    }
    report
}
