use std::collections::{BTreeSet, HashSet};

use crate::syntax::ast::*;
use crate::syntax::error::ParseError;
use crate::syntax::expr::{name, syntax, typed_list, Ctx, ListOf, Specials};
use crate::syntax::requirements::Requirement;
use crate::syntax::sexpr::{read_one, Pos, SExpr};

type Result<T> = std::result::Result<T, ParseError>;

/// Section ranks enforcing the field order of a domain. Constants,
/// predicates and functions share a rank and may come in any order.
fn rank(keyword: &str) -> Option<u8> {
    match keyword {
        "requirements" => Some(0),
        "types" => Some(1),
        "constants" | "predicates" | "functions" => Some(2),
        "action" | "durative-action" => Some(3),
        _ => None,
    }
}

pub(crate) fn parse_requirements(items: &[SExpr]) -> Result<BTreeSet<Requirement>> {
    let mut out = BTreeSet::new();
    for item in &items[1..] {
        let key = item
            .as_keyword()
            .ok_or_else(|| syntax(item.pos(), format!("expected a requirement key, found {}", item.describe())))?;
        let r = Requirement::from_key(key).ok_or_else(|| ParseError::Unknown {
            pos: item.pos(),
            kind: "requirement",
            name: format!(":{key}"),
        })?;
        out.insert(r);
    }
    if out.is_empty() {
        return Err(syntax(items[0].pos(), "`:requirements` needs at least one key"));
    }
    Ok(out)
}

fn no_duplicates<'a>(names: impl IntoIterator<Item = (&'a str, Pos)>, kind: &'static str) -> Result<()> {
    let mut seen = HashSet::new();
    for (n, pos) in names {
        if !seen.insert(n) {
            return Err(ParseError::Duplicate {
                pos,
                kind,
                name: n.to_string(),
            });
        }
    }
    Ok(())
}

pub(crate) fn expect_define<'a>(top: &'a SExpr, kind: &str) -> Result<(Name, &'a [SExpr])> {
    let items = top
        .as_list()
        .ok_or_else(|| syntax(top.pos(), "expected `(define ...)`"))?;
    if top.head_symbol() != Some("define") {
        return Err(syntax(top.pos(), "expected `(define ...)`"));
    }
    let header = items
        .get(1)
        .and_then(SExpr::as_list)
        .filter(|h| h.len() == 2 && h[0].as_symbol() == Some(kind))
        .ok_or_else(|| syntax(top.pos(), format!("expected `({kind} <name>)` after `define`")))?;
    Ok((name(&header[1], &format!("a {kind} name"))?, &items[2..]))
}

fn section(e: &SExpr) -> Result<(&str, &[SExpr])> {
    let items = e
        .as_list()
        .ok_or_else(|| syntax(e.pos(), format!("expected a section, found {}", e.describe())))?;
    let key = items
        .first()
        .and_then(SExpr::as_keyword)
        .ok_or_else(|| syntax(e.pos(), "expected a section starting with a keyword"))?;
    Ok((key, items))
}

/// Splits `:key value` pairs of an action body.
fn keyword_args(items: &[SExpr]) -> Result<Vec<(&str, &[SExpr], Pos)>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let key = items[i]
            .as_keyword()
            .ok_or_else(|| syntax(items[i].pos(), format!("expected a keyword, found {}", items[i].describe())))?;
        let start = i + 1;
        let mut end = start;
        while end < items.len() && items[end].as_keyword().is_none() {
            end += 1;
        }
        if end == start {
            return Err(syntax(items[i].pos(), format!("`:{key}` has no value")));
        }
        out.push((key, &items[start..end], items[i].pos()));
        i = end;
    }
    Ok(out)
}

fn single<'a>(key: &str, values: &'a [SExpr], pos: Pos) -> Result<&'a SExpr> {
    match values {
        [v] => Ok(v),
        _ => Err(syntax(pos, format!("`:{key}` takes exactly one value"))),
    }
}

/// `:parameters (...)`. Several consecutive parenthesised groups are
/// concatenated, as some published domains write one group per variable.
fn parameters(values: &[SExpr]) -> Result<Vec<TypedName>> {
    let mut out = Vec::new();
    for v in values {
        let items = v
            .as_list()
            .ok_or_else(|| syntax(v.pos(), "expected a parenthesised parameter list"))?;
        out.extend(typed_list(items, ListOf::Variables)?);
    }
    no_duplicates(out.iter().map(|p| (p.name.as_str(), values[0].pos())), "parameter")?;
    Ok(out)
}

struct Fields<'a> {
    parameters: Option<&'a [SExpr]>,
    rest: Vec<(&'a str, &'a [SExpr], Pos)>,
}

fn split_fields<'a>(items: &'a [SExpr], order: &[&str]) -> Result<Fields<'a>> {
    let args = keyword_args(items)?;
    let mut last = None;
    let mut parameters = None;
    let mut rest = Vec::new();
    for (key, values, kpos) in args {
        let idx = order
            .iter()
            .position(|k| *k == key)
            .ok_or_else(|| syntax(kpos, format!("unexpected field `:{key}`")))?;
        if last.is_some_and(|l| idx <= l) {
            return Err(syntax(kpos, format!("field `:{key}` is out of order or repeated")));
        }
        last = Some(idx);
        if key == "parameters" {
            parameters = Some(values);
        } else {
            rest.push((key, values, kpos));
        }
    }
    Ok(Fields { parameters, rest })
}

fn action(ctx: &mut Ctx, items: &[SExpr], pos: Pos) -> Result<ActionSchema> {
    let name = name(
        items.get(1).ok_or_else(|| syntax(pos, "missing action name"))?,
        "an action name",
    )?;
    let fields = split_fields(&items[2..], &["parameters", "precondition", "effect"])?;
    let parameters = match fields.parameters {
        Some(values) => parameters(values)?,
        None => Vec::new(),
    };
    ctx.check_types(&parameters, pos)?;
    ctx.bind(&parameters);
    ctx.specials = Specials::default();
    let mut precondition = GoalDesc::empty();
    let mut effect = Effect::empty();
    let result = (|| {
        for (key, values, kpos) in fields.rest {
            let v = single(key, values, kpos)?;
            match key {
                "precondition" => precondition = ctx.goal(v)?,
                "effect" => effect = ctx.effect(v)?,
                _ => unreachable!("filtered by split_fields"),
            }
        }
        Ok(())
    })();
    ctx.unbind(parameters.len());
    result?;
    Ok(ActionSchema {
        name,
        parameters,
        precondition,
        effect,
    })
}

fn durative_action(ctx: &mut Ctx, items: &[SExpr], pos: Pos) -> Result<DurativeSchema> {
    let name = name(
        items.get(1).ok_or_else(|| syntax(pos, "missing durative action name"))?,
        "a durative action name",
    )?;
    let fields = split_fields(&items[2..], &["parameters", "duration", "condition", "effect"])?;
    let parameters = match fields.parameters {
        Some(values) => parameters(values)?,
        None => Vec::new(),
    };
    ctx.check_types(&parameters, pos)?;
    ctx.bind(&parameters);
    ctx.specials = Specials {
        duration: true,
        total_time: false,
    };
    let mut duration = Vec::new();
    let mut condition = Vec::new();
    let mut effect = DaEffect::empty();
    let mut seen_duration = false;
    let result = (|| {
        for (key, values, kpos) in fields.rest {
            let v = single(key, values, kpos)?;
            match key {
                "duration" => {
                    duration = ctx.duration_constraint(v)?;
                    seen_duration = true;
                }
                "condition" => condition = ctx.da_goal(v)?,
                "effect" => effect = ctx.da_effect(v)?,
                _ => unreachable!("filtered by split_fields"),
            }
        }
        Ok(())
    })();
    ctx.unbind(parameters.len());
    ctx.specials = Specials::default();
    result?;
    if !seen_duration {
        return Err(syntax(pos, format!("durative action `{name}` has no `:duration`")));
    }
    Ok(DurativeSchema {
        name,
        parameters,
        duration,
        condition,
        effect,
    })
}

pub fn parse_domain(text: &str) -> Result<DomainAst> {
    let top = read_one(text)?;
    let (domain_name, sections) = expect_define(&top, "domain")?;
    let mut domain = DomainAst {
        name: domain_name,
        requirements: BTreeSet::new(),
        types: Vec::new(),
        constants: Vec::new(),
        predicates: Vec::new(),
        functions: Vec::new(),
        actions: Vec::new(),
        durative_actions: Vec::new(),
    };
    let mut ctx = Ctx {
        check: true,
        allow_variables: true,
        ..Ctx::default()
    };
    let mut last_rank = None;
    let mut seen_sections: HashSet<&str> = HashSet::new();
    let mut structure_names: Vec<(String, Pos)> = Vec::new();
    for s in sections {
        let (key, items) = section(s)?;
        let pos = s.pos();
        let r = rank(key).ok_or_else(|| syntax(pos, format!("unknown domain section `:{key}`")))?;
        if last_rank.is_some_and(|l| r < l) {
            return Err(syntax(pos, format!("section `:{key}` is out of order")));
        }
        last_rank = Some(r);
        if r < 3 && !seen_sections.insert(key) {
            return Err(syntax(pos, format!("section `:{key}` appears twice")));
        }
        match key {
            "requirements" => domain.requirements = parse_requirements(items)?,
            "types" => {
                domain.types = typed_list(&items[1..], ListOf::Names)?;
                no_duplicates(domain.types.iter().map(|t| (t.name.as_str(), pos)), "type")?;
                ctx.types = domain.types.iter().map(|t| t.name.clone()).collect();
                ctx.types.insert("object".to_string());
                for t in &domain.types {
                    if let Some(Type::Either(_)) = t.ty {
                        return Err(syntax(pos, "a type may not be declared as a subtype of `either`"));
                    }
                }
                ctx.check_types(&domain.types, pos)?;
            }
            "constants" => {
                domain.constants = typed_list(&items[1..], ListOf::Names)?;
                no_duplicates(domain.constants.iter().map(|t| (t.name.as_str(), pos)), "constant")?;
                ctx.check_types(&domain.constants, pos)?;
                ctx.objects = domain.constants.iter().map(|c| c.name.clone()).collect();
            }
            "predicates" => {
                for p in &items[1..] {
                    let parts = p
                        .as_list()
                        .filter(|l| !l.is_empty())
                        .ok_or_else(|| syntax(p.pos(), "expected a predicate skeleton"))?;
                    let pname = name(&parts[0], "a predicate name")?;
                    let parameters = typed_list(&parts[1..], ListOf::Variables)?;
                    ctx.check_types(&parameters, p.pos())?;
                    domain.predicates.push(PredicateDecl {
                        name: pname,
                        parameters,
                    });
                }
                no_duplicates(
                    domain.predicates.iter().map(|p| (p.name.as_str(), pos)),
                    "predicate",
                )?;
                ctx.predicates = domain
                    .predicates
                    .iter()
                    .map(|p| (p.name.clone(), p.parameters.len()))
                    .collect();
            }
            "functions" => {
                domain.functions = function_list(&items[1..])?;
                for f in &domain.functions {
                    ctx.check_types(&f.parameters, pos)?;
                }
                no_duplicates(
                    domain.functions.iter().map(|f| (f.name.as_str(), pos)),
                    "function",
                )?;
                ctx.functions = domain
                    .functions
                    .iter()
                    .map(|f| (f.name.clone(), f.parameters.len()))
                    .collect();
            }
            "action" => {
                let a = action(&mut ctx, items, pos)?;
                structure_names.push((a.name.clone(), pos));
                domain.actions.push(a);
            }
            "durative-action" => {
                let a = durative_action(&mut ctx, items, pos)?;
                structure_names.push((a.name.clone(), pos));
                domain.durative_actions.push(a);
            }
            _ => unreachable!("ranked above"),
        }
    }
    no_duplicates(structure_names.iter().map(|(n, p)| (n.as_str(), *p)), "action")?;
    Ok(domain)
}

/// `<function typed list>`: skeletons optionally followed by `- number`.
fn function_list(items: &[SExpr]) -> Result<Vec<FunctionDecl>> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        if item.as_symbol() == Some("-") {
            match items.get(i + 1).and_then(SExpr::as_symbol) {
                Some("number") if !out.is_empty() => {
                    i += 2;
                    continue;
                }
                _ => return Err(syntax(item.pos(), "function result type must be `number`")),
            }
        }
        let parts = item
            .as_list()
            .filter(|l| !l.is_empty())
            .ok_or_else(|| syntax(item.pos(), "expected a function skeleton"))?;
        out.push(FunctionDecl {
            name: name(&parts[0], "a function symbol")?,
            parameters: typed_list(&parts[1..], ListOf::Variables)?,
        });
        i += 1;
    }
    Ok(out)
}
