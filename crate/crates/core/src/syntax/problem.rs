use std::collections::{BTreeSet, HashSet};

use crate::syntax::ast::*;
use crate::syntax::domain::{expect_define, parse_requirements};
use crate::syntax::error::ParseError;
use crate::syntax::expr::{name, syntax, typed_list, Ctx, ListOf, Specials};
use crate::syntax::sexpr::{read_one, SExpr};

type Result<T> = std::result::Result<T, ParseError>;

/// Parses a problem on its own; symbols are not resolved.
pub fn parse_problem(text: &str) -> Result<ProblemAst> {
    parse(text, None)
}

/// Parses a problem and resolves every symbol against `domain`.
pub fn parse_problem_for(text: &str, domain: &DomainAst) -> Result<ProblemAst> {
    parse(text, Some(domain))
}

fn rank(keyword: &str) -> Option<u8> {
    match keyword {
        "domain" => Some(0),
        "requirements" => Some(1),
        "objects" => Some(2),
        "init" => Some(3),
        "goal" => Some(4),
        "metric" => Some(5),
        "length" => Some(6),
        _ => None,
    }
}

fn parse(text: &str, domain: Option<&DomainAst>) -> Result<ProblemAst> {
    let top = read_one(text)?;
    let (problem_name, sections) = expect_define(&top, "problem")?;
    let mut ctx = Ctx {
        check: domain.is_some(),
        allow_variables: false,
        ..Ctx::default()
    };
    if let Some(d) = domain {
        ctx.predicates = d.predicates.iter().map(|p| (p.name.clone(), p.parameters.len())).collect();
        ctx.functions = d.functions.iter().map(|f| (f.name.clone(), f.parameters.len())).collect();
        ctx.types = d.types.iter().map(|t| t.name.clone()).collect();
        ctx.types.insert("object".to_string());
        ctx.objects = d.constants.iter().map(|c| c.name.clone()).collect();
    }

    let mut problem = ProblemAst {
        name: problem_name,
        domain_name: String::new(),
        requirements: BTreeSet::new(),
        objects: Vec::new(),
        init_literals: Vec::new(),
        init_numeric: Vec::new(),
        goal: GoalDesc::empty(),
        metric: None,
        length: None,
    };
    let mut last = None;
    let mut seen = HashSet::new();
    for s in sections {
        let items = s
            .as_list()
            .ok_or_else(|| syntax(s.pos(), format!("expected a section, found {}", s.describe())))?;
        let pos = s.pos();
        let key = items
            .first()
            .and_then(SExpr::as_keyword)
            .ok_or_else(|| syntax(pos, "expected a section starting with a keyword"))?;
        let r = rank(key).ok_or_else(|| syntax(pos, format!("unknown problem section `:{key}`")))?;
        if last.is_some_and(|l| r <= l) {
            return Err(syntax(pos, format!("section `:{key}` is out of order or repeated")));
        }
        last = Some(r);
        seen.insert(key);
        match key {
            "domain" => {
                if items.len() != 2 {
                    return Err(syntax(pos, "`:domain` takes one name"));
                }
                problem.domain_name = name(&items[1], "a domain name")?;
                if let Some(d) = domain {
                    if d.name != problem.domain_name {
                        return Err(syntax(
                            items[1].pos(),
                            format!("problem is for domain `{}`, not `{}`", problem.domain_name, d.name),
                        ));
                    }
                }
            }
            "requirements" => problem.requirements = parse_requirements(items)?,
            "objects" => {
                problem.objects = typed_list(&items[1..], ListOf::Names)?;
                ctx.check_types(&problem.objects, pos)?;
                for o in &problem.objects {
                    if !ctx.objects.insert(o.name.clone()) && ctx.check {
                        return Err(ParseError::Duplicate {
                            pos,
                            kind: "object",
                            name: o.name.clone(),
                        });
                    }
                }
            }
            "init" => init(&ctx, &items[1..], &mut problem)?,
            "goal" => {
                if items.len() != 2 {
                    return Err(syntax(pos, "`:goal` takes one goal description"));
                }
                problem.goal = ctx.goal(&items[1])?;
            }
            "metric" => {
                if items.len() != 3 {
                    return Err(syntax(pos, "expected `(:metric minimize|maximize <expression>)`"));
                }
                let direction = match items[1].as_symbol() {
                    Some("minimize") => Optimization::Minimize,
                    Some("maximize") => Optimization::Maximize,
                    _ => return Err(syntax(items[1].pos(), "expected `minimize` or `maximize`")),
                };
                ctx.specials = Specials {
                    duration: false,
                    total_time: true,
                };
                let expression = ctx.fexp(&items[2]);
                ctx.specials = Specials::default();
                problem.metric = Some(MetricSpec {
                    direction,
                    expression: expression?,
                });
            }
            "length" => problem.length = Some(length(&items[1..])?),
            _ => unreachable!("ranked above"),
        }
    }
    for required in ["domain", "init", "goal"] {
        if !seen.contains(required) {
            return Err(syntax(top.pos(), format!("problem has no `:{required}` section")));
        }
    }
    Ok(problem)
}

fn init(ctx: &Ctx, items: &[SExpr], problem: &mut ProblemAst) -> Result<()> {
    let mut assigned = HashSet::new();
    for item in items {
        match item.head_symbol() {
            Some("=") => {
                let parts = item.as_list().expect("list");
                if parts.len() != 3 {
                    return Err(syntax(item.pos(), "expected `(= <f-head> <number>)`"));
                }
                let head = ctx.fhead(&parts[1])?;
                let value = parts[2]
                    .as_number()
                    .ok_or_else(|| syntax(parts[2].pos(), "numeric initialisations take a literal number"))?;
                if !assigned.insert(head.clone()) {
                    return Err(ParseError::Duplicate {
                        pos: item.pos(),
                        kind: "initial value for",
                        name: head.to_string(),
                    });
                }
                problem.init_numeric.push(NumericInit { head, value });
            }
            Some("not") => {
                let parts = item.as_list().expect("list");
                if parts.len() != 2 {
                    return Err(syntax(item.pos(), "`not` takes one atom"));
                }
                problem.init_literals.push(Literal {
                    positive: false,
                    atom: ctx.atomic(&parts[1])?,
                });
            }
            _ => problem.init_literals.push(Literal {
                positive: true,
                atom: ctx.atomic(item)?,
            }),
        }
    }
    Ok(())
}

fn length(items: &[SExpr]) -> Result<LengthSpec> {
    let mut spec = LengthSpec {
        serial: None,
        parallel: None,
    };
    for item in items {
        let parts = item
            .as_list()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| syntax(item.pos(), "expected `(:serial n)` or `(:parallel n)`"))?;
        let n = parts[1]
            .as_number()
            .filter(|n| n.fract() == 0.0 && *n >= 0.0)
            .ok_or_else(|| syntax(parts[1].pos(), "expected a non-negative integer"))? as u64;
        match parts[0].as_keyword() {
            Some("serial") => spec.serial = Some(n),
            Some("parallel") => spec.parallel = Some(n),
            _ => return Err(syntax(parts[0].pos(), "expected `:serial` or `:parallel`")),
        }
    }
    Ok(spec)
}
