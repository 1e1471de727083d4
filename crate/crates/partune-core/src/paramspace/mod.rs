//! Parameter configuration spaces: typed parameters, conditionals, forbidden
//! combinations, and the configurations that live inside them.
//!
//! A [`ParameterSpace`] is immutable after construction and cheap to share.
//! [`Configuration`]s are stored in canonical form: parameters deactivated by
//! an unsatisfied condition carry the [`Value::Inactive`] sentinel, so
//! equality and hashing only ever see the active assignment.

mod pcs;

pub use pcs::{parse_pcs, serialize_pcs};

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};

use rand::Rng;

use crate::error::{Error, Result};

/// Maximum rejection-sampling attempts before a space is declared too
/// constrained by its forbidden clauses.
pub const SAMPLE_ATTEMPTS: usize = 10_000;

/// Default grid size used when discretizing numeric parameters.
pub const DEFAULT_GRID: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParamKind {
    Categorical,
    Integer,
    Real,
}

/// Domain of a single parameter.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    /// Finite unordered value list.
    Categorical(Vec<String>),
    /// Closed integer interval.
    Integer { lo: i64, hi: i64 },
    /// Closed real interval.
    Real { lo: f64, hi: f64 },
}

impl Domain {
    pub fn kind(&self) -> ParamKind {
        match self {
            Domain::Categorical(_) => ParamKind::Categorical,
            Domain::Integer { .. } => ParamKind::Integer,
            Domain::Real { .. } => ParamKind::Real,
        }
    }

    pub fn contains(&self, value: &Value) -> bool {
        match (self, value) {
            (Domain::Categorical(vs), Value::Cat(i)) => *i < vs.len(),
            (Domain::Integer { lo, hi }, Value::Int(v)) => lo <= v && v <= hi,
            (Domain::Real { lo, hi }, Value::Real(v)) => {
                v.is_finite() && *lo <= *v && *v <= *hi
            }
            _ => false,
        }
    }

    /// Parses a textual value against this domain (pcs conventions).
    pub fn parse_value(&self, text: &str) -> Result<Value> {
        match self {
            Domain::Categorical(vs) => vs
                .iter()
                .position(|v| v == text)
                .map(Value::Cat)
                .ok_or_else(|| {
                    Error::InvalidConfiguration(format!("value '{text}' not in categorical domain"))
                }),
            Domain::Integer { .. } => text
                .parse::<i64>()
                .map(Value::Int)
                .map_err(|_| Error::InvalidConfiguration(format!("'{text}' is not an integer"))),
            Domain::Real { .. } => text
                .parse::<f64>()
                .map(Value::Real)
                .map_err(|_| Error::InvalidConfiguration(format!("'{text}' is not a real number"))),
        }
    }
}

/// A parameter value. `Cat` stores the index into the categorical domain.
#[derive(Clone, Copy, Debug)]
pub enum Value {
    Cat(usize),
    Int(i64),
    Real(f64),
    /// Canonical sentinel for parameters deactivated by their conditions.
    Inactive,
}

impl Value {
    pub fn is_inactive(&self) -> bool {
        matches!(self, Value::Inactive)
    }
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Cat(a), Value::Cat(b)) => a == b,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Real(a), Value::Real(b)) => a.to_bits() == b.to_bits(),
            (Value::Inactive, Value::Inactive) => true,
            _ => false,
        }
    }
}

impl Eq for Value {}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match self {
            Value::Cat(i) => {
                state.write_u8(0);
                state.write_usize(*i);
            }
            Value::Int(v) => {
                state.write_u8(1);
                state.write_i64(*v);
            }
            Value::Real(v) => {
                state.write_u8(2);
                state.write_u64(v.to_bits());
            }
            Value::Inactive => state.write_u8(3),
        }
    }
}

/// Specification of one parameter.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSpec {
    pub name: String,
    pub domain: Domain,
    pub default: Value,
    /// Numeric parameters only: sample and grid in log space.
    pub log_scale: bool,
}

/// One conditional clause: `child` is only active when `parent` takes one of
/// `allowed`. Multiple clauses on the same child are conjunctive.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionClause {
    pub child: usize,
    pub parent: usize,
    pub allowed: Vec<Value>,
}

/// A forbidden partial assignment; matching all entries (on active
/// parameters) makes a configuration invalid.
#[derive(Clone, Debug, PartialEq)]
pub struct ForbiddenClause {
    pub assignments: Vec<(usize, Value)>,
}

/// A full configuration space.
#[derive(Clone, Debug)]
pub struct ParameterSpace {
    params: Vec<ParameterSpec>,
    conditions: Vec<ConditionClause>,
    forbidden: Vec<ForbiddenClause>,
    index: HashMap<String, usize>,
    clauses_by_child: Vec<Vec<usize>>,
    topo: Vec<usize>,
}

impl PartialEq for ParameterSpace {
    fn eq(&self, other: &Self) -> bool {
        self.params == other.params
            && self.conditions == other.conditions
            && self.forbidden == other.forbidden
    }
}

/// A structured reason why a configuration fails validation.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    OutOfDomain { param: String },
    /// An active parameter carries the `Inactive` sentinel.
    MissingActive { param: String },
    /// An inactive parameter carries a concrete value.
    NonCanonicalInactive { param: String },
    Forbidden { clause: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::OutOfDomain { param } => write!(f, "value of '{param}' outside its domain"),
            Violation::MissingActive { param } => {
                write!(f, "active parameter '{param}' has no value")
            }
            Violation::NonCanonicalInactive { param } => {
                write!(f, "inactive parameter '{param}' carries a value")
            }
            Violation::Forbidden { clause } => write!(f, "matches forbidden clause #{clause}"),
        }
    }
}

/// One point of the configuration space in canonical form. Values are
/// aligned with the space's parameter order; construct and modify through
/// [`ParameterSpace`] methods so canonicalization is never skipped.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub values: Vec<Value>,
}

impl Configuration {
    /// Renders the active assignment as `name=value` pairs in space order.
    /// Inactive parameters are omitted, which makes this a canonical key.
    pub fn canonical_string(&self, space: &ParameterSpace) -> String {
        let mut out = String::new();
        for (i, v) in self.values.iter().enumerate() {
            if v.is_inactive() {
                continue;
            }
            if !out.is_empty() {
                out.push(' ');
            }
            out.push_str(&space.params[i].name);
            out.push('=');
            out.push_str(&space.render_value(i, v));
        }
        out
    }
}

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '@' | ':' | '.' | '-'))
}

impl ParameterSpace {
    /// Builds and validates a space from its raw parts.
    pub fn new(
        params: Vec<ParameterSpec>,
        conditions: Vec<ConditionClause>,
        forbidden: Vec<ForbiddenClause>,
    ) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, p) in params.iter().enumerate() {
            if !valid_name(&p.name) {
                return Err(Error::InvalidSpace(format!(
                    "parameter name '{}' contains invalid characters",
                    p.name
                )));
            }
            if index.insert(p.name.clone(), i).is_some() {
                return Err(Error::InvalidSpace(format!(
                    "duplicate parameter name '{}'",
                    p.name
                )));
            }
            match &p.domain {
                Domain::Categorical(vs) => {
                    if vs.is_empty() {
                        return Err(Error::InvalidSpace(format!(
                            "categorical domain of '{}' is empty",
                            p.name
                        )));
                    }
                    let mut seen = HashSet::new();
                    for v in vs {
                        if !seen.insert(v) {
                            return Err(Error::InvalidSpace(format!(
                                "duplicate value '{}' in domain of '{}'",
                                v, p.name
                            )));
                        }
                    }
                }
                Domain::Integer { lo, hi } => {
                    if lo >= hi {
                        return Err(Error::InvalidSpace(format!(
                            "integer domain of '{}' needs lo < hi",
                            p.name
                        )));
                    }
                    if p.log_scale && *lo <= 0 {
                        return Err(Error::InvalidSpace(format!(
                            "log-scale domain of '{}' needs lo > 0",
                            p.name
                        )));
                    }
                }
                Domain::Real { lo, hi } => {
                    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
                        return Err(Error::InvalidSpace(format!(
                            "real domain of '{}' needs finite lo < hi",
                            p.name
                        )));
                    }
                    if p.log_scale && *lo <= 0.0 {
                        return Err(Error::InvalidSpace(format!(
                            "log-scale domain of '{}' needs lo > 0",
                            p.name
                        )));
                    }
                }
            }
            if p.log_scale && p.domain.kind() == ParamKind::Categorical {
                return Err(Error::InvalidSpace(format!(
                    "categorical parameter '{}' cannot be log-scale",
                    p.name
                )));
            }
            if !p.domain.contains(&p.default) {
                return Err(Error::InvalidSpace(format!(
                    "default of '{}' lies outside its domain",
                    p.name
                )));
            }
        }

        for c in &conditions {
            if c.child >= params.len() || c.parent >= params.len() {
                return Err(Error::InvalidSpace("condition references unknown parameter".into()));
            }
            if c.child == c.parent {
                return Err(Error::InvalidSpace(format!(
                    "parameter '{}' cannot be conditional on itself",
                    params[c.child].name
                )));
            }
            if c.allowed.is_empty() {
                return Err(Error::InvalidSpace(format!(
                    "condition on '{}' has an empty value set",
                    params[c.child].name
                )));
            }
            for v in &c.allowed {
                if !params[c.parent].domain.contains(v) {
                    return Err(Error::InvalidSpace(format!(
                        "condition on '{}' names a value outside the domain of '{}'",
                        params[c.child].name, params[c.parent].name
                    )));
                }
            }
        }

        let mut clauses_by_child = vec![Vec::new(); params.len()];
        for (ci, c) in conditions.iter().enumerate() {
            clauses_by_child[c.child].push(ci);
        }

        let topo = topo_sort(params.len(), &conditions).ok_or_else(|| {
            Error::InvalidSpace("conditions form a cycle in the parent graph".into())
        })?;

        for (fi, f) in forbidden.iter().enumerate() {
            if f.assignments.is_empty() {
                return Err(Error::InvalidSpace(format!("forbidden clause #{fi} is empty")));
            }
            let mut seen = HashSet::new();
            for (pi, v) in &f.assignments {
                if *pi >= params.len() {
                    return Err(Error::InvalidSpace(format!(
                        "forbidden clause #{fi} names an unknown parameter"
                    )));
                }
                if !seen.insert(*pi) {
                    return Err(Error::InvalidSpace(format!(
                        "forbidden clause #{fi} names '{}' twice",
                        params[*pi].name
                    )));
                }
                if !params[*pi].domain.contains(v) {
                    return Err(Error::InvalidSpace(format!(
                        "forbidden clause #{fi}: value outside domain of '{}'",
                        params[*pi].name
                    )));
                }
            }
        }

        let space = ParameterSpace {
            params,
            conditions,
            forbidden,
            index,
            clauses_by_child,
            topo,
        };

        // The default configuration must itself be valid and not forbidden.
        space.default_configuration()?;
        Ok(space)
    }

    pub fn params(&self) -> &[ParameterSpec] {
        &self.params
    }

    pub fn conditions(&self) -> &[ConditionClause] {
        &self.conditions
    }

    pub fn forbidden(&self) -> &[ForbiddenClause] {
        &self.forbidden
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn param_index(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownParameter(name.to_string()))
    }

    pub fn is_conditional(&self, idx: usize) -> bool {
        !self.clauses_by_child[idx].is_empty()
    }

    /// True when every parameter is categorical (a discretized space).
    pub fn fully_categorical(&self) -> bool {
        self.params
            .iter()
            .all(|p| p.domain.kind() == ParamKind::Categorical)
    }

    /// Longest chain length (in parameters) of the condition graph; an
    /// unconditional space has depth 1.
    pub fn condition_depth(&self) -> usize {
        let mut depth = vec![1usize; self.params.len()];
        for &i in &self.topo {
            for &ci in &self.clauses_by_child[i] {
                let p = self.conditions[ci].parent;
                depth[i] = depth[i].max(depth[p] + 1);
            }
        }
        depth.into_iter().max().unwrap_or(1)
    }

    /// True if some condition has a numeric (integer/real) parent.
    pub fn has_numeric_condition_parent(&self) -> bool {
        self.conditions
            .iter()
            .any(|c| self.params[c.parent].domain.kind() != ParamKind::Categorical)
    }

    pub fn render_value(&self, idx: usize, value: &Value) -> String {
        match value {
            Value::Cat(i) => match &self.params[idx].domain {
                Domain::Categorical(vs) => vs[*i].clone(),
                _ => "?".to_string(),
            },
            Value::Int(v) => v.to_string(),
            Value::Real(v) => fmt_f64(*v),
            Value::Inactive => "INACTIVE".to_string(),
        }
    }

    /// Activity of every parameter under `values` (which may be raw or
    /// canonical). A parameter is active iff all its clauses are satisfied by
    /// active parents holding an allowed value; parameters without clauses
    /// are always active.
    fn activity(&self, values: &[Value]) -> Vec<bool> {
        let mut act = vec![true; self.params.len()];
        for &i in &self.topo {
            for &ci in &self.clauses_by_child[i] {
                let c = &self.conditions[ci];
                let pv = &values[c.parent];
                if !act[c.parent] || pv.is_inactive() || !c.allowed.contains(pv) {
                    act[i] = false;
                    break;
                }
            }
        }
        act
    }

    /// Whether `name` is active in `config` (transitively through the
    /// condition graph).
    pub fn is_active(&self, config: &Configuration, name: &str) -> Result<bool> {
        let idx = self.param_index(name)?;
        Ok(self.activity(&config.values)[idx])
    }

    /// Canonicalizes a raw full assignment: inactive parameters are replaced
    /// by the `Inactive` sentinel. Raw entries that are already `Inactive`
    /// are treated as "use the default" should the parameter be active.
    pub fn canonicalize(&self, mut raw: Vec<Value>) -> Configuration {
        debug_assert_eq!(raw.len(), self.params.len());
        for (i, v) in raw.iter_mut().enumerate() {
            if v.is_inactive() {
                *v = self.params[i].default;
            }
        }
        let act = self.activity(&raw);
        for (i, v) in raw.iter_mut().enumerate() {
            if !act[i] {
                *v = Value::Inactive;
            }
        }
        Configuration { values: raw }
    }

    /// Returns a copy of `config` with parameter `idx` set to `value` and the
    /// conditionals re-canonicalized. Parameters that become active re-enter
    /// at their defaults.
    pub fn set_value(&self, config: &Configuration, idx: usize, value: Value) -> Configuration {
        let mut raw = config.values.clone();
        raw[idx] = value;
        self.canonicalize(raw)
    }

    /// The declared default of every parameter, canonicalized. Fails when the
    /// space forbids its own default.
    pub fn default_configuration(&self) -> Result<Configuration> {
        let raw: Vec<Value> = self.params.iter().map(|p| p.default).collect();
        let config = self.canonicalize(raw);
        if let Some(clause) = self.matched_forbidden(&config) {
            return Err(Error::InvalidSpace(format!(
                "default configuration matches forbidden clause #{clause}"
            )));
        }
        Ok(config)
    }

    fn matched_forbidden(&self, config: &Configuration) -> Option<usize> {
        let act = self.activity(&config.values);
        'clause: for (fi, f) in self.forbidden.iter().enumerate() {
            for (pi, v) in &f.assignments {
                if !act[*pi] || config.values[*pi] != *v {
                    continue 'clause;
                }
            }
            return Some(fi);
        }
        None
    }

    /// Validates a configuration, returning every violation found.
    pub fn validate(&self, config: &Configuration) -> Vec<Violation> {
        let mut out = Vec::new();
        if config.values.len() != self.params.len() {
            out.push(Violation::OutOfDomain {
                param: "<arity mismatch>".into(),
            });
            return out;
        }
        let act = self.activity(&config.values);
        for (i, v) in config.values.iter().enumerate() {
            if act[i] {
                if v.is_inactive() {
                    out.push(Violation::MissingActive {
                        param: self.params[i].name.clone(),
                    });
                } else if !self.params[i].domain.contains(v) {
                    out.push(Violation::OutOfDomain {
                        param: self.params[i].name.clone(),
                    });
                }
            } else if !v.is_inactive() {
                out.push(Violation::NonCanonicalInactive {
                    param: self.params[i].name.clone(),
                });
            }
        }
        if out.is_empty() {
            if let Some(clause) = self.matched_forbidden(config) {
                out.push(Violation::Forbidden { clause });
            }
        }
        out
    }

    pub fn is_valid(&self, config: &Configuration) -> bool {
        self.validate(config).is_empty()
    }

    fn sample_value(&self, idx: usize, rng: &mut impl Rng) -> Value {
        let p = &self.params[idx];
        match &p.domain {
            Domain::Categorical(vs) => Value::Cat(rng.random_range(0..vs.len())),
            Domain::Integer { lo, hi } => {
                if p.log_scale {
                    let u = rng.random_range((*lo as f64).ln()..=(*hi as f64).ln());
                    Value::Int((u.exp().round() as i64).clamp(*lo, *hi))
                } else {
                    Value::Int(rng.random_range(*lo..=*hi))
                }
            }
            Domain::Real { lo, hi } => {
                if p.log_scale {
                    Value::Real(rng.random_range(lo.ln()..=hi.ln()).exp().clamp(*lo, *hi))
                } else {
                    Value::Real(rng.random_range(*lo..=*hi))
                }
            }
        }
    }

    /// Draws a valid, non-forbidden configuration uniformly at random.
    /// Conditionals are resolved top-down; forbidden combinations are handled
    /// by rejection with a [`SAMPLE_ATTEMPTS`] cap.
    pub fn sample_uniform(&self, rng: &mut impl Rng) -> Result<Configuration> {
        for _ in 0..SAMPLE_ATTEMPTS {
            let mut values = vec![Value::Inactive; self.params.len()];
            let mut act = vec![false; self.params.len()];
            for &i in &self.topo {
                let active = self.clauses_by_child[i].iter().all(|&ci| {
                    let c = &self.conditions[ci];
                    act[c.parent] && c.allowed.contains(&values[c.parent])
                });
                act[i] = active;
                if active {
                    values[i] = self.sample_value(i, rng);
                }
            }
            let config = Configuration { values };
            if self.matched_forbidden(&config).is_none() {
                return Ok(config);
            }
        }
        Err(Error::SpaceTooConstrained(SAMPLE_ATTEMPTS))
    }

    /// All valid, non-forbidden configurations reachable by changing exactly
    /// one active parameter to another value of its domain, re-canonicalized.
    /// Only enumerable (categorical) parameters are varied, so this is meant
    /// for discretized spaces.
    pub fn neighbors(&self, config: &Configuration) -> Vec<Configuration> {
        let mut out = Vec::new();
        let mut seen = HashSet::new();
        for (i, v) in config.values.iter().enumerate() {
            if v.is_inactive() {
                continue;
            }
            let Domain::Categorical(vs) = &self.params[i].domain else {
                continue;
            };
            for j in 0..vs.len() {
                let candidate = Value::Cat(j);
                if candidate == *v {
                    continue;
                }
                let neighbor = self.set_value(config, i, candidate);
                if neighbor != *config && self.is_valid(&neighbor) && seen.insert(neighbor.clone())
                {
                    out.push(neighbor);
                }
            }
        }
        out
    }

    /// Replaces numeric parameters with categorical grids of `grid_size`
    /// values (evenly spaced, log-spaced where flagged), injecting the
    /// original default at the nearest grid point when it is not on the grid.
    /// Conditionals and forbidden clauses are carried over.
    pub fn discretize(&self, grid_size: usize) -> Result<ParameterSpace> {
        assert!(grid_size >= 2, "grid_size must be at least 2");
        let mut specs = Vec::with_capacity(self.params.len());
        // Per-parameter map from original values to their textual rendering
        // in the discretized domain, used to translate clauses.
        let mut grids: Vec<Option<Vec<Value>>> = vec![None; self.params.len()];
        for (i, p) in self.params.iter().enumerate() {
            match &p.domain {
                Domain::Categorical(_) => specs.push(p.clone()),
                Domain::Integer { lo, hi } => {
                    let mut points = grid_points(*lo as f64, *hi as f64, grid_size, p.log_scale)
                        .into_iter()
                        .map(|x| (x.round() as i64).clamp(*lo, *hi))
                        .collect::<Vec<_>>();
                    points.dedup();
                    let Value::Int(d) = p.default else { unreachable!() };
                    inject_int_default(&mut points, d);
                    grids[i] = Some(points.iter().map(|&v| Value::Int(v)).collect());
                    let strings: Vec<String> = points.iter().map(|v| v.to_string()).collect();
                    let default_idx = points.iter().position(|&v| v == d).unwrap();
                    specs.push(ParameterSpec {
                        name: p.name.clone(),
                        domain: Domain::Categorical(strings),
                        default: Value::Cat(default_idx),
                        log_scale: false,
                    });
                }
                Domain::Real { lo, hi } => {
                    let mut points = grid_points(*lo, *hi, grid_size, p.log_scale);
                    points.dedup_by(|a, b| a.to_bits() == b.to_bits());
                    let Value::Real(d) = p.default else { unreachable!() };
                    inject_real_default(&mut points, d, p.log_scale);
                    grids[i] = Some(points.iter().map(|&v| Value::Real(v)).collect());
                    let strings: Vec<String> = points.iter().map(|v| fmt_f64(*v)).collect();
                    let default_idx = points.iter().position(|v| v.to_bits() == d.to_bits()).unwrap();
                    specs.push(ParameterSpec {
                        name: p.name.clone(),
                        domain: Domain::Categorical(strings),
                        default: Value::Cat(default_idx),
                        log_scale: false,
                    });
                }
            }
        }

        let translate = |param: usize, v: &Value| -> Option<Value> {
            match &grids[param] {
                None => Some(*v),
                Some(points) => points
                    .iter()
                    .position(|g| g == v)
                    .map(Value::Cat),
            }
        };

        let mut conditions = Vec::new();
        for c in &self.conditions {
            let allowed: Vec<Value> = c
                .allowed
                .iter()
                .filter_map(|v| translate(c.parent, v))
                .collect();
            if allowed.is_empty() {
                return Err(Error::InvalidSpace(format!(
                    "discretization removed every trigger value of the condition on '{}'",
                    self.params[c.child].name
                )));
            }
            conditions.push(ConditionClause {
                child: c.child,
                parent: c.parent,
                allowed,
            });
        }

        let mut forbidden = Vec::new();
        'clause: for f in &self.forbidden {
            let mut assignments = Vec::new();
            for (pi, v) in &f.assignments {
                match translate(*pi, v) {
                    Some(t) => assignments.push((*pi, t)),
                    // A value that fell off the grid can never be produced;
                    // the clause is vacuous on the discretized space.
                    None => continue 'clause,
                }
            }
            forbidden.push(ForbiddenClause { assignments });
        }

        ParameterSpace::new(specs, conditions, forbidden)
    }

    /// Enumerates every valid, non-forbidden canonical configuration of a
    /// fully categorical space, in deterministic order. Fails once more than
    /// `limit` configurations have been produced.
    pub fn enumerate(&self, limit: u64) -> Result<Vec<Configuration>> {
        if !self.fully_categorical() {
            return Err(Error::UnsupportedSpace(
                "enumeration requires a fully categorical space".into(),
            ));
        }
        let mut out = Vec::new();
        let mut values = vec![Value::Inactive; self.params.len()];
        let mut act = vec![false; self.params.len()];
        self.enumerate_rec(0, &mut values, &mut act, &mut out, limit)?;
        Ok(out)
    }

    fn enumerate_rec(
        &self,
        t: usize,
        values: &mut Vec<Value>,
        act: &mut Vec<bool>,
        out: &mut Vec<Configuration>,
        limit: u64,
    ) -> Result<()> {
        if t == self.topo.len() {
            let config = Configuration {
                values: values.clone(),
            };
            if self.matched_forbidden(&config).is_none() {
                if out.len() as u64 >= limit {
                    return Err(Error::SpaceTooLarge(limit));
                }
                out.push(config);
            }
            return Ok(());
        }
        let i = self.topo[t];
        let active = self.clauses_by_child[i].iter().all(|&ci| {
            let c = &self.conditions[ci];
            act[c.parent] && c.allowed.contains(&values[c.parent])
        });
        act[i] = active;
        if active {
            let Domain::Categorical(vs) = &self.params[i].domain else {
                unreachable!()
            };
            for j in 0..vs.len() {
                values[i] = Value::Cat(j);
                self.enumerate_rec(t + 1, values, act, out, limit)?;
            }
            values[i] = Value::Inactive;
        } else {
            values[i] = Value::Inactive;
            self.enumerate_rec(t + 1, values, act, out, limit)?;
        }
        act[i] = false;
        Ok(())
    }

    #[cfg(test)]
    pub(crate) fn push_forbidden_unchecked(&mut self, clause: ForbiddenClause) {
        self.forbidden.push(clause);
    }

    /// Parses a `name=value` assignment list (whitespace-separated) into a
    /// configuration; unassigned parameters take their defaults.
    pub fn parse_assignment(&self, text: &str) -> Result<Configuration> {
        let mut raw: Vec<Value> = self.params.iter().map(|p| p.default).collect();
        for token in text.split_whitespace() {
            let (name, value) = token.split_once('=').ok_or_else(|| {
                Error::InvalidConfiguration(format!("expected name=value, got '{token}'"))
            })?;
            let idx = self.param_index(name)?;
            let v = self.params[idx].domain.parse_value(value)?;
            if !self.params[idx].domain.contains(&v) {
                return Err(Error::InvalidConfiguration(format!(
                    "value of '{name}' outside its domain"
                )));
            }
            raw[idx] = v;
        }
        let config = self.canonicalize(raw);
        match self.validate(&config).into_iter().next() {
            None => Ok(config),
            Some(v) => Err(Error::InvalidConfiguration(v.to_string())),
        }
    }
}

fn grid_points(lo: f64, hi: f64, n: usize, log: bool) -> Vec<f64> {
    let (a, b) = if log { (lo.ln(), hi.ln()) } else { (lo, hi) };
    (0..n)
        .map(|i| {
            let x = a + (b - a) * i as f64 / (n - 1) as f64;
            let v = if log { x.exp() } else { x };
            v.clamp(lo, hi)
        })
        .collect()
}

fn inject_int_default(points: &mut Vec<i64>, default: i64) {
    if points.contains(&default) {
        return;
    }
    let nearest = points
        .iter()
        .enumerate()
        .min_by_key(|(_, &v)| (v - default).abs())
        .map(|(i, _)| i)
        .unwrap();
    points[nearest] = default;
    points.sort_unstable();
    points.dedup();
}

fn inject_real_default(points: &mut Vec<f64>, default: f64, log: bool) {
    if points.iter().any(|v| v.to_bits() == default.to_bits()) {
        return;
    }
    let dist = |v: f64| {
        if log {
            (v.ln() - default.ln()).abs()
        } else {
            (v - default).abs()
        }
    };
    let nearest = points
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| dist(**a).total_cmp(&dist(**b)))
        .map(|(i, _)| i)
        .unwrap();
    points[nearest] = default;
    points.sort_by(f64::total_cmp);
}

fn topo_sort(n: usize, conditions: &[ConditionClause]) -> Option<Vec<usize>> {
    // Kahn's algorithm over parent -> child edges.
    let mut indeg = vec![0usize; n];
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); n];
    for c in conditions {
        indeg[c.child] += 1;
        children[c.parent].push(c.child);
    }
    let mut queue: Vec<usize> = (0..n).filter(|&i| indeg[i] == 0).collect();
    let mut order = Vec::with_capacity(n);
    let mut head = 0;
    while head < queue.len() {
        let i = queue[head];
        head += 1;
        order.push(i);
        for &ch in &children[i] {
            indeg[ch] -= 1;
            if indeg[ch] == 0 {
                queue.push(ch);
            }
        }
    }
    (order.len() == n).then_some(order)
}

/// Convenience builder for constructing spaces in code and tests.
#[derive(Default)]
pub struct SpaceBuilder {
    params: Vec<ParameterSpec>,
    conditions: Vec<(String, String, Vec<String>)>,
    forbidden: Vec<Vec<(String, String)>>,
}

impl SpaceBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn categorical<S: Into<String>>(
        mut self,
        name: &str,
        values: impl IntoIterator<Item = S>,
        default: &str,
    ) -> Self {
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        let default_idx = values.iter().position(|v| v == default).unwrap_or(usize::MAX);
        self.params.push(ParameterSpec {
            name: name.into(),
            domain: Domain::Categorical(values),
            default: Value::Cat(default_idx),
            log_scale: false,
        });
        self
    }

    pub fn integer(mut self, name: &str, lo: i64, hi: i64, default: i64, log: bool) -> Self {
        self.params.push(ParameterSpec {
            name: name.into(),
            domain: Domain::Integer { lo, hi },
            default: Value::Int(default),
            log_scale: log,
        });
        self
    }

    pub fn real(mut self, name: &str, lo: f64, hi: f64, default: f64, log: bool) -> Self {
        self.params.push(ParameterSpec {
            name: name.into(),
            domain: Domain::Real { lo, hi },
            default: Value::Real(default),
            log_scale: log,
        });
        self
    }

    pub fn condition<S: Into<String>>(
        mut self,
        child: &str,
        parent: &str,
        allowed: impl IntoIterator<Item = S>,
    ) -> Self {
        self.conditions.push((
            child.into(),
            parent.into(),
            allowed.into_iter().map(Into::into).collect(),
        ));
        self
    }

    pub fn forbid<'a>(mut self, assignments: impl IntoIterator<Item = (&'a str, &'a str)>) -> Self {
        self.forbidden.push(
            assignments
                .into_iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        );
        self
    }

    pub fn build(self) -> Result<ParameterSpace> {
        let index: HashMap<String, usize> = self
            .params
            .iter()
            .enumerate()
            .map(|(i, p)| (p.name.clone(), i))
            .collect();
        let lookup = |name: &str| -> Result<usize> {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::UnknownParameter(name.to_string()))
        };
        let mut conditions = Vec::new();
        for (child, parent, allowed) in &self.conditions {
            let child = lookup(child)?;
            let parent = lookup(parent)?;
            let allowed = allowed
                .iter()
                .map(|s| self.params[parent].domain.parse_value(s))
                .collect::<Result<Vec<_>>>()?;
            conditions.push(ConditionClause {
                child,
                parent,
                allowed,
            });
        }
        let mut forbidden = Vec::new();
        for clause in &self.forbidden {
            let mut assignments = Vec::new();
            for (name, value) in clause {
                let pi = lookup(name)?;
                assignments.push((pi, self.params[pi].domain.parse_value(value)?));
            }
            forbidden.push(ForbiddenClause { assignments });
        }
        ParameterSpace::new(self.params, conditions, forbidden)
    }
}

#[cfg(test)]
mod tests;
