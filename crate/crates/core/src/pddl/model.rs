//! Lifted domain and problem model, plus its PDDL rendering.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    /// A named variable, stored without the leading `?`.
    Var(String),
    Const(String),
    /// The anonymous `*` slot of XOR-constraint patterns.
    Any,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(c) => f.write_str(c),
            Term::Any => f.write_str("*"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Self {
        Atom {
            predicate: predicate.into(),
            args,
        }
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.args.iter().filter_map(|t| match t {
            Term::Var(v) => Some(v.as_str()),
            _ => None,
        })
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

/// A variable-free atom as it appears in problem files.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroundAtom {
    pub predicate: String,
    pub args: Vec<String>,
}

impl GroundAtom {
    pub fn new<S: Into<String>>(predicate: impl Into<String>, args: impl IntoIterator<Item = S>) -> Self {
        GroundAtom {
            predicate: predicate.into(),
            args: args.into_iter().map(Into::into).collect(),
        }
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PredicateDecl {
    pub name: String,
    pub params: Vec<String>,
}

impl PredicateDecl {
    pub fn arity(&self) -> usize {
        self.params.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResourceUse {
    pub resource: Term,
    pub amount: u32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ActionSchema {
    pub name: String,
    pub params: Vec<String>,
    pub pre: Vec<Atom>,
    pub add: Vec<Atom>,
    pub del: Vec<Atom>,
    pub resource_use: Vec<ResourceUse>,
    /// Preconditions that are removed when present but never required.
    pub conditional_pre: Vec<Atom>,
}

/// `((xor ALT ...) COND ...)`: each alternative is a conjunction of patterns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorSchema {
    pub alternatives: Vec<Vec<Atom>>,
    pub conditions: Vec<Atom>,
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DomainDef {
    pub name: String,
    pub requirements: Vec<String>,
    pub predicates: Vec<PredicateDecl>,
    pub constants: Vec<String>,
    pub resources: Vec<String>,
    pub schemas: Vec<ActionSchema>,
    pub xor_schemas: Vec<XorSchema>,
}

impl DomainDef {
    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn schema(&self, name: &str) -> Option<&ActionSchema> {
        self.schemas.iter().find(|s| s.name == name)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ProblemDef {
    pub name: String,
    pub domain: String,
    pub objects: Vec<String>,
    pub resources: Vec<String>,
    pub init: Vec<GroundAtom>,
    /// `(amount r v)` entries from the initial state.
    pub amounts: BTreeMap<String, u32>,
    pub goals: Vec<GroundAtom>,
}

fn write_conj(out: &mut String, atoms: &[Atom], negated: &[Atom]) {
    let n = atoms.len() + negated.len();
    if n == 1 && negated.is_empty() {
        let _ = write!(out, "{}", atoms[0]);
        return;
    }
    out.push_str("(and");
    for a in atoms {
        let _ = write!(out, " {a}");
    }
    for a in negated {
        let _ = write!(out, " (not {a})");
    }
    out.push(')');
}

impl fmt::Display for XorSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("((xor")?;
        for alt in &self.alternatives {
            if alt.len() == 1 {
                write!(f, " {}", alt[0])?;
            } else {
                f.write_str(" (and (")?;
                for (i, a) in alt.iter().enumerate() {
                    if i > 0 {
                        f.write_str(" ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str("))")?;
            }
        }
        f.write_str(")")?;
        for c in &self.conditions {
            write!(f, " {c}")?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for ActionSchema {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        let _ = write!(out, "  (:action {}\n   :parameters (", self.name);
        for (i, p) in self.params.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "?{p}");
        }
        out.push_str(")\n   :precondition ");
        write_conj(&mut out, &self.pre, &[]);
        if !self.conditional_pre.is_empty() {
            out.push_str("\n   :conditional-precondition ");
            write_conj(&mut out, &self.conditional_pre, &[]);
        }
        out.push_str("\n   :effect ");
        write_conj(&mut out, &self.add, &self.del);
        if !self.resource_use.is_empty() {
            out.push_str("\n   :resources ");
            if self.resource_use.len() > 1 {
                out.push_str("(and");
            }
            for (i, r) in self.resource_use.iter().enumerate() {
                if self.resource_use.len() > 1 || i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "(amount {} {})", r.resource, r.amount);
            }
            if self.resource_use.len() > 1 {
                out.push(')');
            }
        }
        out.push(')');
        f.write_str(&out)
    }
}

impl fmt::Display for DomainDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            f.write_str("  (:requirements")?;
            for r in &self.requirements {
                write!(f, " {r}")?;
            }
            f.write_str(")\n")?;
        }
        f.write_str("  (:predicates")?;
        for p in &self.predicates {
            write!(f, " ({}", p.name)?;
            for v in &p.params {
                write!(f, " ?{v}")?;
            }
            f.write_str(")")?;
        }
        f.write_str(")\n")?;
        if !self.constants.is_empty() {
            writeln!(f, "  (:constants {})", self.constants.join(" "))?;
        }
        if !self.resources.is_empty() {
            writeln!(f, "  (:resources {})", self.resources.join(" "))?;
        }
        for s in &self.schemas {
            writeln!(f, "{s}")?;
        }
        if !self.xor_schemas.is_empty() {
            f.write_str("  (:xor-constraints")?;
            for x in &self.xor_schemas {
                write!(f, "\n    {x}")?;
            }
            f.write_str(")\n")?;
        }
        f.write_str(")\n")
    }
}

impl fmt::Display for ProblemDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain)?;
        writeln!(f, "  (:objects {})", self.objects.join(" "))?;
        if !self.resources.is_empty() {
            writeln!(f, "  (:resources {})", self.resources.join(" "))?;
        }
        f.write_str("  (:init")?;
        for a in &self.init {
            write!(f, "\n    {a}")?;
        }
        for (r, v) in &self.amounts {
            write!(f, "\n    (amount {r} {v})")?;
        }
        f.write_str(")\n  (:goal (and")?;
        for g in &self.goals {
            write!(f, " {g}")?;
        }
        f.write_str(")))\n")
    }
}
