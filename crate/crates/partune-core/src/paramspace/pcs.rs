//! Line-based pcs text format for parameter spaces.
//!
//! ```text
//! categorical:  name {v1,v2,...} [default]
//! integer:      name [lo,hi] [default] i     ("il" for log scale)
//! real:         name [lo,hi] [default]       ("l" for log scale)
//! conditional:  child | parent in {v1,v2,...}
//! forbidden:    {name1=v1, name2=v2, ...}
//! ```
//!
//! `#` starts a comment, blank lines are ignored, whitespace is free.

use std::collections::HashMap;

use super::{
    fmt_f64, ConditionClause, Domain, ForbiddenClause, ParameterSpace, ParameterSpec, Value,
};
use crate::error::{Error, Result};

struct PendingCondition {
    line: usize,
    child: String,
    parent: String,
    values: Vec<String>,
}

struct PendingForbidden {
    line: usize,
    assignments: Vec<(String, String)>,
}

/// Parses pcs text into a validated [`ParameterSpace`].
pub fn parse_pcs(text: &str) -> Result<ParameterSpace> {
    let mut params: Vec<(usize, ParameterSpec)> = Vec::new();
    let mut conditions: Vec<PendingCondition> = Vec::new();
    let mut forbidden: Vec<PendingForbidden> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if content.starts_with('{') {
            forbidden.push(parse_forbidden_line(line, content)?);
        } else if content.contains('|') {
            conditions.push(parse_condition_line(line, content)?);
        } else {
            params.push((line, parse_param_line(line, content)?));
        }
    }

    let index: HashMap<String, usize> = params
        .iter()
        .enumerate()
        .map(|(i, (_, p))| (p.name.clone(), i))
        .collect();
    if index.len() != params.len() {
        // Re-scan for an error message with a line number.
        let mut seen = HashMap::new();
        for (line, p) in &params {
            if seen.insert(p.name.clone(), *line).is_some() {
                return Err(Error::PcsSyntax {
                    line: *line,
                    msg: format!("duplicate parameter '{}'", p.name),
                });
            }
        }
    }

    let mut clauses = Vec::new();
    for c in conditions {
        let child = *index.get(&c.child).ok_or_else(|| Error::PcsSyntax {
            line: c.line,
            msg: format!("unknown child parameter '{}'", c.child),
        })?;
        let parent = *index.get(&c.parent).ok_or_else(|| Error::PcsSyntax {
            line: c.line,
            msg: format!("unknown parent parameter '{}'", c.parent),
        })?;
        let domain = &params[parent].1.domain;
        let allowed = c
            .values
            .iter()
            .map(|v| {
                domain.parse_value(v).map_err(|_| Error::PcsSyntax {
                    line: c.line,
                    msg: format!("condition value '{}' not in domain of '{}'", v, c.parent),
                })
            })
            .collect::<Result<Vec<Value>>>()?;
        clauses.push(ConditionClause {
            child,
            parent,
            allowed,
        });
    }

    let mut forbids = Vec::new();
    for f in forbidden {
        let mut assignments = Vec::new();
        for (name, value) in &f.assignments {
            let pi = *index.get(name).ok_or_else(|| Error::PcsSyntax {
                line: f.line,
                msg: format!("forbidden clause names unknown parameter '{name}'"),
            })?;
            let v = params[pi].1.domain.parse_value(value).map_err(|_| Error::PcsSyntax {
                line: f.line,
                msg: format!("forbidden value '{value}' not in domain of '{name}'"),
            })?;
            assignments.push((pi, v));
        }
        forbids.push(ForbiddenClause { assignments });
    }

    ParameterSpace::new(params.into_iter().map(|(_, p)| p).collect(), clauses, forbids)
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::PcsSyntax {
        line,
        msg: msg.into(),
    }
}

fn take_group(line: usize, s: &str, open: char, close: char) -> Result<(String, String)> {
    let s = s.trim_start();
    if !s.starts_with(open) {
        return Err(syntax(line, format!("expected '{open}'")));
    }
    match s.find(close) {
        Some(end) => Ok((s[1..end].to_string(), s[end + 1..].to_string())),
        None => Err(syntax(line, format!("unterminated '{open}'"))),
    }
}

fn parse_param_line(line: usize, content: &str) -> Result<ParameterSpec> {
    let name_end = content
        .find(|c: char| c.is_whitespace() || c == '{' || c == '[')
        .ok_or_else(|| syntax(line, "expected a domain after the parameter name"))?;
    let name = content[..name_end].to_string();
    if !super::valid_name(&name) {
        return Err(syntax(line, format!("invalid parameter name '{name}'")));
    }
    let rest = content[name_end..].trim_start();

    if rest.starts_with('{') {
        let (values, rest) = take_group(line, rest, '{', '}')?;
        let values: Vec<String> = split_list(&values);
        if values.is_empty() {
            return Err(syntax(line, "empty categorical domain"));
        }
        let (default, rest) = take_group(line, &rest, '[', ']')?;
        if !rest.trim().is_empty() {
            return Err(syntax(line, "trailing text after categorical default"));
        }
        let default = default.trim().to_string();
        let default_idx = values
            .iter()
            .position(|v| *v == default)
            .ok_or_else(|| syntax(line, format!("default '{default}' outside domain")))?;
        Ok(ParameterSpec {
            name,
            domain: Domain::Categorical(values),
            default: Value::Cat(default_idx),
            log_scale: false,
        })
    } else if rest.starts_with('[') {
        let (range, rest) = take_group(line, rest, '[', ']')?;
        let bounds = split_list(&range);
        if bounds.len() != 2 {
            return Err(syntax(line, "numeric domain needs exactly [lo,hi]"));
        }
        let (default, rest) = take_group(line, &rest, '[', ']')?;
        let mut integer = false;
        let mut log = false;
        for flag in rest.split_whitespace() {
            match flag {
                "i" => integer = true,
                "l" => log = true,
                "il" | "li" => {
                    integer = true;
                    log = true;
                }
                other => return Err(syntax(line, format!("unknown flag '{other}'"))),
            }
        }
        if integer {
            let lo = parse_i64(line, &bounds[0])?;
            let hi = parse_i64(line, &bounds[1])?;
            let d = parse_i64(line, default.trim())?;
            if d < lo || d > hi {
                return Err(syntax(line, format!("default {d} outside [{lo},{hi}]")));
            }
            Ok(ParameterSpec {
                name,
                domain: Domain::Integer { lo, hi },
                default: Value::Int(d),
                log_scale: log,
            })
        } else {
            let lo = parse_f64(line, &bounds[0])?;
            let hi = parse_f64(line, &bounds[1])?;
            let d = parse_f64(line, default.trim())?;
            if !(lo..=hi).contains(&d) {
                return Err(syntax(line, format!("default {d} outside [{lo},{hi}]")));
            }
            Ok(ParameterSpec {
                name,
                domain: Domain::Real { lo, hi },
                default: Value::Real(d),
                log_scale: log,
            })
        }
    } else {
        Err(syntax(line, "expected '{' or '[' after the parameter name"))
    }
}

fn parse_condition_line(line: usize, content: &str) -> Result<PendingCondition> {
    let (child, rest) = content
        .split_once('|')
        .ok_or_else(|| syntax(line, "expected 'child | parent in {...}'"))?;
    let child = child.trim().to_string();
    let rest = rest.trim();
    let (parent, rest) = rest
        .split_once(" in ")
        .map(|(p, r)| (p.trim().to_string(), r.trim()))
        .ok_or_else(|| syntax(line, "expected 'in' in conditional clause"))?;
    let (values, tail) = take_group(line, rest, '{', '}')?;
    if !tail.trim().is_empty() {
        return Err(syntax(line, "trailing text after conditional clause"));
    }
    let values = split_list(&values);
    if values.is_empty() {
        return Err(syntax(line, "conditional clause needs at least one value"));
    }
    Ok(PendingCondition {
        line,
        child,
        parent,
        values,
    })
}

fn parse_forbidden_line(line: usize, content: &str) -> Result<PendingForbidden> {
    let (body, tail) = take_group(line, content, '{', '}')?;
    if !tail.trim().is_empty() {
        return Err(syntax(line, "trailing text after forbidden clause"));
    }
    let mut assignments = Vec::new();
    for part in split_list(&body) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| syntax(line, "forbidden entries must be name=value"))?;
        assignments.push((name.trim().to_string(), value.trim().to_string()));
    }
    if assignments.is_empty() {
        return Err(syntax(line, "empty forbidden clause"));
    }
    Ok(PendingForbidden { line, assignments })
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',')
        .map(|v| v.trim().to_string())
        .filter(|v| !v.is_empty())
        .collect()
}

fn parse_i64(line: usize, s: &str) -> Result<i64> {
    s.trim()
        .parse()
        .map_err(|_| syntax(line, format!("'{s}' is not an integer")))
}

fn parse_f64(line: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| syntax(line, format!("'{s}' is not a number")))?;
    if !v.is_finite() {
        return Err(syntax(line, format!("'{s}' is not finite")));
    }
    Ok(v)
}

/// Serializes a space back to pcs text; the output re-parses to an equal
/// space.
pub fn serialize_pcs(space: &ParameterSpace) -> String {
    let mut out = String::new();
    for p in space.params() {
        match &p.domain {
            Domain::Categorical(vs) => {
                let Value::Cat(d) = p.default else { unreachable!() };
                out.push_str(&format!("{} {{{}}} [{}]\n", p.name, vs.join(","), vs[d]));
            }
            Domain::Integer { lo, hi } => {
                let Value::Int(d) = p.default else { unreachable!() };
                let flags = if p.log_scale { "il" } else { "i" };
                out.push_str(&format!("{} [{},{}] [{}] {}\n", p.name, lo, hi, d, flags));
            }
            Domain::Real { lo, hi } => {
                let Value::Real(d) = p.default else { unreachable!() };
                let flags = if p.log_scale { " l" } else { "" };
                out.push_str(&format!(
                    "{} [{},{}] [{}]{}\n",
                    p.name,
                    fmt_f64(*lo),
                    fmt_f64(*hi),
                    fmt_f64(d),
                    flags
                ));
            }
        }
    }
    for c in space.conditions() {
        let parent = &space.params()[c.parent];
        let values: Vec<String> = c
            .allowed
            .iter()
            .map(|v| space.render_value(c.parent, v))
            .collect();
        out.push_str(&format!(
            "{} | {} in {{{}}}\n",
            space.params()[c.child].name,
            parent.name,
            values.join(",")
        ));
    }
    for f in space.forbidden() {
        let parts: Vec<String> = f
            .assignments
            .iter()
            .map(|(pi, v)| format!("{}={}", space.params()[*pi].name, space.render_value(*pi, v)))
            .collect();
        out.push_str(&format!("{{{}}}\n", parts.join(", ")));
    }
    out
}
