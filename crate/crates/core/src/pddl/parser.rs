use std::collections::{BTreeMap, HashSet};

use super::model::*;
use super::sexpr::{read_all, Pos, Sexp};
use super::ParseError;

type Result<T> = std::result::Result<T, ParseError>;

const UNSUPPORTED_CONNECTIVES: &[&str] = &["or", "imply", "exists", "forall", "when", "="];

fn syntax(pos: Pos, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        pos,
        msg: msg.into(),
    }
}

fn unsupported(pos: Pos, feature: impl Into<String>) -> ParseError {
    ParseError::UnsupportedFeature {
        pos,
        feature: feature.into(),
    }
}

fn list<'a>(s: &'a Sexp, what: &str) -> Result<&'a [Sexp]> {
    s.as_list()
        .ok_or_else(|| syntax(s.pos(), format!("expected a list for {what}")))
}

fn symbol<'a>(s: &'a Sexp, what: &str) -> Result<&'a str> {
    s.as_symbol()
        .ok_or_else(|| syntax(s.pos(), format!("expected a symbol for {what}")))
}

fn identifier(s: &Sexp, what: &str) -> Result<String> {
    let name = symbol(s, what)?;
    if name.starts_with('?') || name.starts_with(':') || name == "*" {
        return Err(syntax(s.pos(), format!("`{name}` is not a valid {what}")));
    }
    Ok(name.to_string())
}

fn variable(s: &Sexp) -> Result<String> {
    let name = symbol(s, "variable")?;
    match name.strip_prefix('?') {
        Some(v) if !v.is_empty() => Ok(v.to_string()),
        _ => Err(syntax(s.pos(), format!("expected a variable, found `{name}`"))),
    }
}

fn number(s: &Sexp) -> Result<u32> {
    let text = symbol(s, "amount")?;
    text.parse::<u32>().map_err(|_| ParseError::Invalid {
        pos: s.pos(),
        msg: format!("`{text}` is not a non-negative integer amount"),
    })
}

/// Checks `(define (KIND name) ...)` and returns the name and remaining items.
fn define<'a>(top: &'a [Sexp], kind: &str) -> Result<(String, &'a [Sexp], Pos)> {
    let form = match top {
        [one] => one,
        [] => return Err(syntax(Pos { line: 1, col: 1 }, "empty input")),
        [_, extra, ..] => return Err(syntax(extra.pos(), "trailing input after definition")),
    };
    let items = list(form, "definition")?;
    if items.first().and_then(Sexp::as_symbol) != Some("define") {
        return Err(syntax(form.pos(), "expected `(define ...)`"));
    }
    let header = items
        .get(1)
        .ok_or_else(|| syntax(form.pos(), format!("missing ({kind} <name>)")))?;
    match list(header, "header")? {
        [k, name] if k.as_symbol() == Some(kind) => Ok((identifier(name, "name")?, &items[2..], form.pos())),
        _ => Err(syntax(header.pos(), format!("expected ({kind} <name>)"))),
    }
}

fn requirements(items: &[Sexp]) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for r in items {
        let name = symbol(r, "requirement")?;
        if name != ":strips" {
            return Err(unsupported(r.pos(), format!("requirement {name}")));
        }
        out.push(name.to_string());
    }
    Ok(out)
}

fn names(items: &[Sexp], what: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for s in items {
        if s.as_symbol() == Some("-") {
            return Err(unsupported(s.pos(), "typing"));
        }
        let n = identifier(s, what)?;
        if !out.contains(&n) {
            out.push(n);
        }
    }
    Ok(out)
}

/// Parses one atom; `allow_any` admits `*` slots.
fn atom(s: &Sexp, allow_any: bool) -> Result<Atom> {
    let items = list(s, "atom")?;
    let head = items.first().ok_or_else(|| syntax(s.pos(), "empty atom"))?;
    let pred = symbol(head, "predicate")?;
    if pred == "not" {
        return Err(unsupported(s.pos(), "negative literal"));
    }
    if pred == "and" || UNSUPPORTED_CONNECTIVES.contains(&pred) {
        return Err(unsupported(s.pos(), format!("`{pred}` here")));
    }
    let pred = identifier(head, "predicate")?;
    let mut args = Vec::new();
    for a in &items[1..] {
        let t = symbol(a, "argument")?;
        args.push(match t {
            "*" if allow_any => Term::Any,
            "*" => return Err(syntax(a.pos(), "`*` is only allowed in XOR constraints")),
            t if t.starts_with('?') => Term::Var(variable(a)?),
            _ => Term::Const(identifier(a, "constant")?),
        });
    }
    Ok(Atom::new(pred, args))
}

fn push_unique(v: &mut Vec<Atom>, a: Atom) {
    if !v.contains(&a) {
        v.push(a);
    }
}

/// `(and a b ...)`, a single atom, or `()`; positive atoms only.
fn conjunction(s: &Sexp, what: &str) -> Result<Vec<(Atom, Pos)>> {
    let items = list(s, what)?;
    let parts: Vec<&Sexp> = match items.first().and_then(Sexp::as_symbol) {
        None if items.is_empty() => return Ok(Vec::new()),
        Some("and") => items[1..].iter().collect(),
        Some("not") => {
            return Err(unsupported(
                s.pos(),
                if what == "goal" { "negative goal atoms" } else { "negative preconditions" },
            ))
        }
        Some(c) if UNSUPPORTED_CONNECTIVES.contains(&c) => {
            return Err(unsupported(s.pos(), format!("`{c}` formulas")))
        }
        _ => vec![s],
    };
    let mut out = Vec::new();
    for p in parts {
        match p.head() {
            Some("not") => {
                return Err(unsupported(
                    p.pos(),
                    if what == "goal" { "negative goal atoms" } else { "negative preconditions" },
                ))
            }
            Some(c) if c == "and" || UNSUPPORTED_CONNECTIVES.contains(&c) => {
                return Err(unsupported(p.pos(), format!("nested `{c}`")))
            }
            _ => out.push((atom(p, false)?, p.pos())),
        }
    }
    Ok(out)
}

type Positioned = Vec<(Atom, Pos)>;

fn effect(s: &Sexp) -> Result<(Positioned, Positioned)> {
    let items = list(s, "effect")?;
    let parts: Vec<&Sexp> = match items.first().and_then(Sexp::as_symbol) {
        None if items.is_empty() => Vec::new(),
        Some("and") => items[1..].iter().collect(),
        _ => vec![s],
    };
    let (mut add, mut del) = (Vec::new(), Vec::new());
    for p in parts {
        match p.head() {
            Some("not") => match list(p, "negation")? {
                [_, inner] => del.push((atom(inner, false)?, inner.pos())),
                _ => return Err(syntax(p.pos(), "`not` takes exactly one atom")),
            },
            Some(c) if c == "and" || UNSUPPORTED_CONNECTIVES.contains(&c) => {
                return Err(unsupported(p.pos(), format!("`{c}` in effects")))
            }
            _ => add.push((atom(p, false)?, p.pos())),
        }
    }
    Ok((add, del))
}

fn resource_slot(s: &Sexp) -> Result<Vec<(ResourceUse, Pos)>> {
    let items = list(s, "resources")?;
    let parts: Vec<&Sexp> = match items.first().and_then(Sexp::as_symbol) {
        None if items.is_empty() => Vec::new(),
        Some("and") => items[1..].iter().collect(),
        _ => vec![s],
    };
    let mut out = Vec::new();
    for p in parts {
        match list(p, "resource use")? {
            [head, r, k] if head.as_symbol() == Some("amount") => {
                let rname = symbol(r, "resource")?;
                let resource = if rname.starts_with('?') {
                    Term::Var(variable(r)?)
                } else {
                    Term::Const(identifier(r, "resource")?)
                };
                out.push((
                    ResourceUse {
                        resource,
                        amount: number(k)?,
                    },
                    p.pos(),
                ));
            }
            _ => return Err(syntax(p.pos(), "expected (amount <resource> <k>)")),
        }
    }
    Ok(out)
}

struct Scope<'a> {
    predicates: &'a [PredicateDecl],
}

impl Scope<'_> {
    fn check(&self, a: &Atom, pos: Pos) -> Result<()> {
        let decl = self
            .predicates
            .iter()
            .find(|p| p.name == a.predicate)
            .ok_or_else(|| ParseError::UndeclaredPredicate {
                pos,
                name: a.predicate.clone(),
            })?;
        if decl.arity() != a.args.len() {
            return Err(ParseError::ArityMismatch {
                pos,
                name: a.predicate.clone(),
                expected: decl.arity(),
                found: a.args.len(),
            });
        }
        Ok(())
    }
}

fn action(s: &Sexp, scope: &Scope<'_>) -> Result<ActionSchema> {
    let items = list(s, "action")?;
    let name = identifier(
        items.get(1).ok_or_else(|| syntax(s.pos(), "missing action name"))?,
        "action name",
    )?;
    let mut schema = ActionSchema {
        name,
        params: Vec::new(),
        pre: Vec::new(),
        add: Vec::new(),
        del: Vec::new(),
        resource_use: Vec::new(),
        conditional_pre: Vec::new(),
    };
    let mut positioned: Vec<(Atom, Pos)> = Vec::new();
    let mut rest = items[2..].iter();
    while let Some(key) = rest.next() {
        let k = symbol(key, "action keyword")?;
        let value = rest
            .next()
            .ok_or_else(|| syntax(key.pos(), format!("missing value for {k}")))?;
        match k {
            ":parameters" => {
                for p in list(value, "parameters")? {
                    if p.as_symbol() == Some("-") {
                        return Err(unsupported(p.pos(), "typing"));
                    }
                    let v = variable(p)?;
                    if schema.params.contains(&v) {
                        return Err(ParseError::Invalid {
                            pos: p.pos(),
                            msg: format!("duplicate parameter ?{v}"),
                        });
                    }
                    schema.params.push(v);
                }
            }
            ":precondition" => {
                for (a, pos) in conjunction(value, "precondition")? {
                    scope.check(&a, pos)?;
                    positioned.push((a.clone(), pos));
                    push_unique(&mut schema.pre, a);
                }
            }
            ":conditional-precondition" => {
                for (a, pos) in conjunction(value, "conditional precondition")? {
                    scope.check(&a, pos)?;
                    positioned.push((a.clone(), pos));
                    push_unique(&mut schema.conditional_pre, a);
                }
            }
            ":effect" => {
                let (add, del) = effect(value)?;
                for (a, pos) in add {
                    scope.check(&a, pos)?;
                    positioned.push((a.clone(), pos));
                    push_unique(&mut schema.add, a);
                }
                for (a, pos) in del {
                    scope.check(&a, pos)?;
                    positioned.push((a.clone(), pos));
                    push_unique(&mut schema.del, a);
                }
            }
            ":resources" => {
                for (r, pos) in resource_slot(value)? {
                    if let Term::Var(v) = &r.resource {
                        if !schema.params.contains(v) {
                            return Err(ParseError::UnboundVariable { pos, name: v.clone() });
                        }
                    }
                    schema.resource_use.push(r);
                }
            }
            other => return Err(unsupported(key.pos(), format!("action field {other}"))),
        }
    }
    for (a, pos) in &positioned {
        if let Some(v) = a.vars().find(|v| !schema.params.iter().any(|p| p == v)) {
            return Err(ParseError::UnboundVariable {
                pos: *pos,
                name: v.to_string(),
            });
        }
    }
    if let Some(a) = schema.add.iter().find(|a| schema.del.contains(a)) {
        let pos = positioned.iter().find(|(x, _)| x == a).map(|p| p.1).unwrap_or(s.pos());
        return Err(ParseError::Invalid {
            pos,
            msg: format!("{a} is both added and deleted by {}", schema.name),
        });
    }
    Ok(schema)
}

fn xor_alternative(s: &Sexp) -> Result<Vec<(Atom, Pos)>> {
    if s.head() != Some("and") {
        return Ok(vec![(atom(s, true)?, s.pos())]);
    }
    let items = &list(s, "alternative")?[1..];
    // Both `(and (p ..) (q ..))` and the bracketed `(and ((p ..) (q ..)))`.
    let parts: Vec<&Sexp> = match items {
        [only] if only.as_list().and_then(|l| l.first()).is_some_and(|f| f.as_list().is_some()) => {
            only.as_list().unwrap().iter().collect()
        }
        _ => items.iter().collect(),
    };
    if parts.is_empty() {
        return Err(syntax(s.pos(), "empty conjunction in XOR alternative"));
    }
    parts.into_iter().map(|p| Ok((atom(p, true)?, p.pos()))).collect()
}

fn xor_schema(s: &Sexp, scope: Option<&Scope<'_>>) -> Result<XorSchema> {
    let items = list(s, "XOR constraint")?;
    let head = items
        .first()
        .filter(|h| h.head() == Some("xor"))
        .ok_or_else(|| syntax(s.pos(), "expected ((xor ...) conditions...)"))?;
    let mut alternatives = Vec::new();
    let mut alt_vars: Vec<Vec<(String, Pos)>> = Vec::new();
    let mut has_any = false;
    for alt in &list(head, "xor")?[1..] {
        let conj = xor_alternative(alt)?;
        let mut vars = Vec::new();
        for (a, pos) in &conj {
            if let Some(sc) = scope {
                sc.check(a, *pos)?;
            }
            has_any |= a.args.contains(&Term::Any);
            vars.extend(a.vars().map(|v| (v.to_string(), *pos)));
        }
        alt_vars.push(vars);
        alternatives.push(conj.into_iter().map(|(a, _)| a).collect::<Vec<_>>());
    }
    if alternatives.is_empty() || (alternatives.len() == 1 && !has_any) {
        return Err(ParseError::Invalid {
            pos: head.pos(),
            msg: "an XOR constraint needs two alternatives or a `*` slot".into(),
        });
    }
    let mut conditions = Vec::new();
    let mut cond_vars = HashSet::new();
    for c in &items[1..] {
        let a = atom(c, false)?;
        if let Some(sc) = scope {
            sc.check(&a, c.pos())?;
        }
        cond_vars.extend(a.vars().map(str::to_string));
        conditions.push(a);
    }
    for (i, vars) in alt_vars.iter().enumerate() {
        for (v, pos) in vars {
            let elsewhere = alt_vars
                .iter()
                .enumerate()
                .any(|(j, other)| j != i && other.iter().any(|(w, _)| w == v));
            if !cond_vars.contains(v) && !elsewhere {
                return Err(ParseError::UnboundVariable {
                    pos: *pos,
                    name: v.clone(),
                });
            }
        }
    }
    Ok(XorSchema {
        alternatives,
        conditions,
    })
}

fn xor_block(items: &[Sexp], scope: Option<&Scope<'_>>) -> Result<Vec<XorSchema>> {
    items.iter().map(|s| xor_schema(s, scope)).collect()
}

pub fn parse_domain(text: &str) -> Result<DomainDef> {
    let top = read_all(text)?;
    let (name, sections, _) = define(&top, "domain")?;
    let mut d = DomainDef {
        name,
        ..DomainDef::default()
    };
    let mut actions = Vec::new();
    let mut xors = Vec::new();
    for sec in sections {
        let items = list(sec, "section")?;
        let key = items
            .first()
            .and_then(Sexp::as_symbol)
            .ok_or_else(|| syntax(sec.pos(), "expected a (:section ...)"))?;
        match key {
            ":requirements" => d.requirements = requirements(&items[1..])?,
            ":predicates" => {
                for p in &items[1..] {
                    let pl = list(p, "predicate declaration")?;
                    let pname = identifier(
                        pl.first().ok_or_else(|| syntax(p.pos(), "empty predicate declaration"))?,
                        "predicate",
                    )?;
                    let mut params = Vec::new();
                    for v in &pl[1..] {
                        if v.as_symbol() == Some("-") {
                            return Err(unsupported(v.pos(), "typing"));
                        }
                        params.push(variable(v)?);
                    }
                    if pname == "amount" {
                        return Err(ParseError::Invalid {
                            pos: p.pos(),
                            msg: "`amount` is reserved for resources".into(),
                        });
                    }
                    if d.predicates.iter().any(|q| q.name == pname) {
                        return Err(ParseError::Invalid {
                            pos: p.pos(),
                            msg: format!("predicate {pname} declared twice"),
                        });
                    }
                    d.predicates.push(PredicateDecl { name: pname, params });
                }
            }
            ":constants" => d.constants = names(&items[1..], "constant")?,
            ":resources" => d.resources = names(&items[1..], "resource")?,
            ":action" => actions.push(sec),
            ":xor-constraints" => xors.push(&items[1..]),
            ":types" => return Err(unsupported(sec.pos(), "typing")),
            ":functions" => return Err(unsupported(sec.pos(), "numeric fluents")),
            other => return Err(unsupported(sec.pos(), format!("domain section {other}"))),
        }
    }
    let scope = Scope {
        predicates: &d.predicates,
    };
    for a in actions {
        let schema = action(a, &scope)?;
        if d.schemas.iter().any(|s| s.name == schema.name) {
            return Err(ParseError::Invalid {
                pos: a.pos(),
                msg: format!("action {} defined twice", schema.name),
            });
        }
        d.schemas.push(schema);
    }
    for block in xors {
        d.xor_schemas.extend(xor_block(block, Some(&scope))?);
    }
    Ok(d)
}

fn ground_atom(s: &Sexp, known: &HashSet<&str>, what: &str) -> Result<GroundAtom> {
    ground_terms(atom(s, false)?, s.pos(), known, what)
}

fn ground_terms(a: Atom, pos: Pos, known: &HashSet<&str>, what: &str) -> Result<GroundAtom> {
    let mut args = Vec::new();
    for t in a.args {
        match t {
            Term::Const(c) => {
                if !known.contains(c.as_str()) {
                    return Err(ParseError::UndeclaredObject { pos, name: c });
                }
                args.push(c);
            }
            _ => return Err(syntax(pos, format!("variables are not allowed in {what}"))),
        }
    }
    Ok(GroundAtom {
        predicate: a.predicate,
        args,
    })
}

fn check_ground(a: &GroundAtom, pos: Pos, domain: Option<&DomainDef>) -> Result<()> {
    if let Some(d) = domain {
        let decl = d.predicate(&a.predicate).ok_or_else(|| ParseError::UndeclaredPredicate {
            pos,
            name: a.predicate.clone(),
        })?;
        if decl.arity() != a.args.len() {
            return Err(ParseError::ArityMismatch {
                pos,
                name: a.predicate.clone(),
                expected: decl.arity(),
                found: a.args.len(),
            });
        }
    }
    Ok(())
}

/// Parses a problem. With `domain` given, predicates are checked against its
/// declarations and domain constants and resources count as known objects.
pub fn parse_problem_in(text: &str, domain: Option<&DomainDef>) -> Result<ProblemDef> {
    let top = read_all(text)?;
    let (name, sections, _) = define(&top, "problem")?;
    let mut p = ProblemDef {
        name,
        ..ProblemDef::default()
    };
    let mut init_sec = None;
    let mut goal_sec = None;
    for sec in sections {
        let items = list(sec, "section")?;
        let key = items
            .first()
            .and_then(Sexp::as_symbol)
            .ok_or_else(|| syntax(sec.pos(), "expected a (:section ...)"))?;
        match key {
            ":domain" => match &items[1..] {
                [d] => p.domain = identifier(d, "domain name")?,
                _ => return Err(syntax(sec.pos(), "expected (:domain <name>)")),
            },
            ":requirements" => {
                requirements(&items[1..])?;
            }
            ":objects" => p.objects = names(&items[1..], "object")?,
            ":resources" => p.resources = names(&items[1..], "resource")?,
            ":init" => init_sec = Some(&items[1..]),
            ":goal" => match &items[1..] {
                [g] => goal_sec = Some(g),
                _ => return Err(syntax(sec.pos(), "expected (:goal <formula>)")),
            },
            ":metric" => return Err(unsupported(sec.pos(), "metrics")),
            other => return Err(unsupported(sec.pos(), format!("problem section {other}"))),
        }
    }
    let mut known: HashSet<&str> = p.objects.iter().map(String::as_str).collect();
    known.extend(p.resources.iter().map(String::as_str));
    if let Some(d) = domain {
        known.extend(d.constants.iter().map(String::as_str));
        known.extend(d.resources.iter().map(String::as_str));
    }
    let resource_names: HashSet<&str> = p
        .resources
        .iter()
        .chain(domain.map(|d| d.resources.iter()).into_iter().flatten())
        .map(String::as_str)
        .collect();

    let mut init = Vec::new();
    let mut amounts = BTreeMap::new();
    for s in init_sec.unwrap_or(&[]) {
        if s.head() == Some("amount") {
            match list(s, "amount")? {
                [_, r, v] => {
                    let rname = identifier(r, "resource")?;
                    if !resource_names.contains(rname.as_str()) {
                        return Err(ParseError::UndeclaredObject { pos: r.pos(), name: rname });
                    }
                    amounts.insert(rname, number(v)?);
                }
                _ => return Err(syntax(s.pos(), "expected (amount <resource> <value>)")),
            }
            continue;
        }
        if s.head() == Some("=") {
            return Err(unsupported(s.pos(), "numeric fluents"));
        }
        let a = ground_atom(s, &known, "the initial state")?;
        check_ground(&a, s.pos(), domain)?;
        if !init.contains(&a) {
            init.push(a);
        }
    }
    let mut goals = Vec::new();
    if let Some(g) = goal_sec {
        for (a, pos) in conjunction(g, "goal")? {
            let ga = ground_terms(a, pos, &known, "goals")?;
            check_ground(&ga, pos, domain)?;
            if !goals.contains(&ga) {
                goals.push(ga);
            }
        }
    }
    p.init = init;
    p.amounts = amounts;
    p.goals = goals;
    Ok(p)
}

/// Parses a problem on its own: object references are checked, predicate
/// declarations are not (see [`parse_problem_in`]).
pub fn parse_problem(text: &str) -> Result<ProblemDef> {
    parse_problem_in(text, None)
}

/// Parses zero or more XOR-constraint schemas, either bare or wrapped in a
/// `(:xor-constraints ...)` block.
pub fn parse_xor_schemas(text: &str) -> Result<Vec<XorSchema>> {
    parse_xor_schemas_in(text, None)
}

pub fn parse_xor_schemas_in(text: &str, domain: Option<&DomainDef>) -> Result<Vec<XorSchema>> {
    let top = read_all(text)?;
    let scope = domain.map(|d| Scope {
        predicates: &d.predicates,
    });
    let mut out = Vec::new();
    for s in &top {
        if s.head() == Some(":xor-constraints") {
            out.extend(xor_block(&s.as_list().unwrap()[1..], scope.as_ref())?);
        } else {
            out.push(xor_schema(s, scope.as_ref())?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BOARD: &str = "(define (domain elev) (:requirements :strips)
      (:predicates (floor ?f) (passenger ?p) (lift-at ?f) (origin ?p ?f) (boarded ?p))
      (:action board
        :parameters (?f ?p)
        :precondition (and (floor ?f) (passenger ?p) (lift-at ?f) (origin ?p ?f))
        :effect (boarded ?p)))";

    #[test]
    fn board_schema() {
        let d = parse_domain(BOARD).unwrap();
        let b = d.schema("board").unwrap();
        assert_eq!(b.params, vec!["f", "p"]);
        assert_eq!(b.pre.len(), 4);
        assert_eq!(b.add, vec![Atom::new("boarded", vec![Term::Var("p".into())])]);
        assert!(b.del.is_empty());
    }

    #[test]
    fn move_with_resources() {
        let d = parse_domain(
            "(define (domain m) (:requirements :strips)
              (:predicates (truck ?t) (city ?c) (at ?t ?c) (adjacent_cities ?a ?b) (city_fuel ?c ?f))
              (:action move :parameters (?tr ?c1 ?c2 ?f)
                :precondition (and (truck ?tr) (city ?c1) (city ?c2) (at ?tr ?c1)
                                   (adjacent_cities ?c1 ?c2) (city_fuel ?c1 ?f))
                :effect (and (not (at ?tr ?c1)) (at ?tr ?c2))
                :resources (amount ?f 1)))",
        )
        .unwrap();
        let m = d.schema("move").unwrap();
        assert_eq!(
            m.resource_use,
            vec![ResourceUse {
                resource: Term::Var("f".into()),
                amount: 1
            }]
        );
    }

    #[test]
    fn degenerate_domain() {
        let d = parse_domain("(define (domain d) (:predicates (p)))").unwrap();
        assert!(d.schemas.is_empty());
        assert_eq!(d.predicates.len(), 1);
    }

    #[test]
    fn rejections() {
        let cases: &[(&str, fn(&ParseError) -> bool)] = &[
            (
                "(define (domain d) (:requirements :typing) (:predicates (p)))",
                |e| matches!(e, ParseError::UnsupportedFeature { .. }),
            ),
            (
                "(define (domain d) (:predicates (p ?x))
                   (:action a :parameters (?x) :precondition (or (p ?x)) :effect (p ?x)))",
                |e| matches!(e, ParseError::UnsupportedFeature { .. }),
            ),
            (
                "(define (domain d) (:predicates (p ?x))
                   (:action a :parameters (?x) :precondition (and (q ?x)) :effect (p ?x)))",
                |e| matches!(e, ParseError::UndeclaredPredicate { .. }),
            ),
            (
                "(define (domain d) (:predicates (p ?x))
                   (:action a :parameters (?x ?x) :precondition () :effect (p ?x)))",
                |e| matches!(e, ParseError::Invalid { .. }),
            ),
            (
                "(define (domain d) (:predicates (p ?x))
                   (:action a :parameters (?x) :precondition () :effect (p ?y)))",
                |e| matches!(e, ParseError::UnboundVariable { .. }),
            ),
            (
                "(define (domain d) (:predicates (p ?x))
                   (:action a :parameters (?x) :precondition () :effect (and (p ?x) (not (p ?x)))))",
                |e| matches!(e, ParseError::Invalid { .. }),
            ),
            (
                "(define (domain d) (:predicates (p ?x)) (:action a :parameters (?x) :precondition (p ?x ?x) :effect ()))",
                |e| matches!(e, ParseError::ArityMismatch { expected: 1, found: 2, .. }),
            ),
            ("(define (domain d) (:predicates (p))", |e| matches!(e, ParseError::Syntax { .. })),
        ];
        for (text, ok) in cases {
            let e = parse_domain(text).unwrap_err();
            assert!(ok(&e), "{text}: {e}");
        }
    }

    #[test]
    fn error_positions() {
        let e = parse_domain("(define (domain d)\n  (:predicates (p))\n  (:action a :parameters () :precondition (q) :effect ()))")
            .unwrap_err();
        assert_eq!(e.pos(), Pos { line: 3, col: 43 });
    }

    #[test]
    fn problem_amounts_and_objects() {
        let p = parse_problem(
            "(define (problem x1) (:domain m)
               (:objects c1 c2)
               (:resources r1 r2 r3 r4 r5 r6)
               (:init (city c1) (amount r1 1) (amount r2 2) (amount r3 1)
                      (amount r4 2) (amount r5 1) (amount r6 3))
               (:goal (and (city c1))))",
        )
        .unwrap();
        assert_eq!(p.amounts.len(), 6);
        assert_eq!(p.amounts["r6"], 3);
        assert_eq!(p.init, vec![GroundAtom::new("city", ["c1"])]);
        assert_eq!(p.goals, p.init);

        let e = parse_problem("(define (problem x) (:domain m) (:objects a) (:init (p a)) (:goal (p b)))").unwrap_err();
        assert!(matches!(e, ParseError::UndeclaredObject { ref name, .. } if name == "b"));
        let e = parse_problem("(define (problem x) (:domain m) (:objects a) (:init) (:goal (not (p a))))").unwrap_err();
        assert!(matches!(e, ParseError::UnsupportedFeature { .. }));
    }

    #[test]
    fn problem_checked_against_domain() {
        let d = parse_domain(BOARD).unwrap();
        let text = "(define (problem x) (:domain elev) (:objects f0 p0) (:init (floor f0 p0)) (:goal (boarded p0)))";
        assert!(parse_problem(text).is_ok());
        let e = parse_problem_in(text, Some(&d)).unwrap_err();
        assert!(matches!(e, ParseError::ArityMismatch { .. }));
    }

    #[test]
    fn xor_forms() {
        let v = parse_xor_schemas("((xor (at ?Truck *)) (truck ?Truck))").unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].alternatives.len(), 1);
        assert_eq!(v[0].conditions.len(), 1);
        assert_eq!(v[0].alternatives[0][0].args[1], Term::Any);

        let v = parse_xor_schemas("(( xor ( at ?Key * ) ( holding ?Key ) ) ( key ?Key ))").unwrap();
        assert_eq!(v[0].alternatives.len(), 2);

        let v = parse_xor_schemas("((xor (in ?p *) (and ((at ?p *) (out ?p)))) (package ?p))").unwrap();
        assert_eq!(v[0].alternatives[1].len(), 2);

        assert!(parse_xor_schemas("").unwrap().is_empty());
        assert!(matches!(
            parse_xor_schemas("((xor (at ?k *)))"),
            Err(ParseError::UnboundVariable { .. })
        ));
        assert!(parse_xor_schemas("((xor (at ?k *) (holding ?j)) (key ?k))").is_err());
        assert!(parse_xor_schemas("((xor (at ?k *) (held ?k)))").is_ok());
        assert!(parse_xor_schemas("(:xor-constraints ((xor (a *) (b *))) ((xor (c ?x *)) (d ?x)))").unwrap().len() == 2);
    }

    mod roundtrip {
        use super::super::*;
        use proptest::prelude::*;

        fn name() -> impl Strategy<Value = String> {
            "[a-d][a-z0-9_-]{0,3}"
        }

        fn domain() -> impl Strategy<Value = DomainDef> {
            let preds = proptest::collection::btree_map(name(), 0usize..3, 1..5);
            preds.prop_flat_map(|preds| {
                let decls: Vec<PredicateDecl> = preds
                    .iter()
                    .map(|(n, &k)| PredicateDecl {
                        name: format!("p{n}"),
                        params: (0..k).map(|i| format!("v{i}")).collect(),
                    })
                    .collect();
                let d2 = decls.clone();
                let atom = move |nparams: usize| {
                    let d = d2.clone();
                    (0..d.len(), proptest::collection::vec(0..nparams.max(1), 0..3)).prop_map(move |(i, vs)| {
                        let decl = &d[i];
                        Atom::new(
                            decl.name.clone(),
                            (0..decl.arity())
                                .map(|j| {
                                    if nparams == 0 {
                                        Term::Const("k".into())
                                    } else {
                                        Term::Var(format!("x{}", vs.get(j).copied().unwrap_or(0)))
                                    }
                                })
                                .collect(),
                        )
                    })
                };
                let schema = (0usize..3).prop_flat_map(move |np| {
                    (
                        proptest::collection::vec(atom(np), 0..4),
                        proptest::collection::vec(atom(np), 0..3),
                        proptest::collection::vec(atom(np), 0..3),
                    )
                        .prop_map(move |(pre, add, del)| {
                            let mut s = ActionSchema {
                                name: String::new(),
                                params: (0..np).map(|i| format!("x{i}")).collect(),
                                pre: Vec::new(),
                                add: Vec::new(),
                                del: Vec::new(),
                                resource_use: Vec::new(),
                                conditional_pre: Vec::new(),
                            };
                            for a in pre {
                                push_unique(&mut s.pre, a);
                            }
                            for a in add {
                                push_unique(&mut s.add, a);
                            }
                            for a in del.into_iter().filter(|a| !s.add.contains(a)) {
                                push_unique(&mut s.del, a);
                            }
                            s
                        })
                });
                proptest::collection::vec(schema, 0..4).prop_map(move |schemas| DomainDef {
                    name: "dom".into(),
                    requirements: vec![":strips".into()],
                    predicates: decls.clone(),
                    constants: vec!["k".into()],
                    resources: Vec::new(),
                    schemas: schemas
                        .into_iter()
                        .enumerate()
                        .map(|(i, mut s)| {
                            s.name = format!("act{i}");
                            s
                        })
                        .collect(),
                    xor_schemas: Vec::new(),
                })
            })
        }

        proptest! {
            #[test]
            fn domain_roundtrip(d in domain()) {
                let text = d.to_string();
                let back = parse_domain(&text).map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?;
                prop_assert_eq!(&back, &d);
                prop_assert_eq!(parse_domain(&back.to_string()).unwrap(), back);
            }

            #[test]
            fn problem_roundtrip(objs in proptest::collection::btree_set(name(), 1..5),
                                 picks in proptest::collection::vec((0usize..5, 0usize..5), 0..6),
                                 amount in proptest::option::of(0u32..9)) {
                let objects: Vec<String> = objs.into_iter().collect();
                let g = |i: usize| objects[i % objects.len()].clone();
                let mut p = ProblemDef { name: "p".into(), domain: "d".into(), objects: objects.clone(), ..Default::default() };
                for (a, b) in &picks {
                    let at = GroundAtom::new("rel", [g(*a), g(*b)]);
                    if !p.init.contains(&at) { p.init.push(at.clone()); }
                    if a % 2 == 0 && !p.goals.contains(&at) { p.goals.push(at); }
                }
                if let Some(v) = amount {
                    p.resources = vec!["fuel".into()];
                    p.amounts.insert("fuel".into(), v);
                }
                let back = parse_problem(&p.to_string()).unwrap();
                prop_assert_eq!(back, p);
            }
        }
    }
}
