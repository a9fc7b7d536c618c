use std::collections::HashSet;
use std::fmt::Write;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    Continuous,
    Integer,
    Binary,
}

#[derive(Clone, Debug)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
    pub obj: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cmp {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(VarId, f64)>,
    pub cmp: Cmp,
    pub rhs: f64,
}

impl Constraint {
    pub fn new(name: impl Into<String>, terms: Vec<(VarId, f64)>, cmp: Cmp, rhs: f64) -> Self {
        Constraint {
            name: name.into(),
            terms,
            cmp,
            rhs,
        }
    }

    pub fn lhs(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v.0]).sum()
    }

    /// Amount by which `values` violates the row (zero when satisfied).
    pub fn violation(&self, values: &[f64]) -> f64 {
        let lhs = self.lhs(values);
        match self.cmp {
            Cmp::Le => (lhs - self.rhs).max(0.0),
            Cmp::Ge => (self.rhs - lhs).max(0.0),
            Cmp::Eq => (lhs - self.rhs).abs(),
        }
    }
}

/// Minimization model with named variables and linear rows.
#[derive(Clone, Debug, Default)]
pub struct MilpModel {
    pub vars: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    names: HashSet<String>,
}

impl MilpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(
        &mut self,
        name: impl Into<String>,
        kind: VarKind,
        lb: f64,
        ub: f64,
        obj: f64,
    ) -> VarId {
        let name = name.into();
        assert!(lb <= ub, "variable {name}: lb {lb} > ub {ub}");
        assert!(self.names.insert(name.clone()), "duplicate name {name}");
        let (lb, ub) = match kind {
            VarKind::Binary => (lb.max(0.0), ub.min(1.0)),
            _ => (lb, ub),
        };
        self.vars.push(Variable {
            name,
            kind,
            lb,
            ub,
            obj,
        });
        VarId(self.vars.len() - 1)
    }

    pub fn continuous(&mut self, name: impl Into<String>, lb: f64, ub: f64, obj: f64) -> VarId {
        self.add_var(name, VarKind::Continuous, lb, ub, obj)
    }

    pub fn integer(&mut self, name: impl Into<String>, lb: f64, ub: f64, obj: f64) -> VarId {
        self.add_var(name, VarKind::Integer, lb, ub, obj)
    }

    pub fn binary(&mut self, name: impl Into<String>, obj: f64) -> VarId {
        self.add_var(name, VarKind::Binary, 0.0, 1.0, obj)
    }

    pub fn add_constraint(&mut self, c: Constraint) {
        assert!(
            self.names.insert(c.name.clone()),
            "duplicate name {}",
            c.name
        );
        for &(v, _) in &c.terms {
            assert!(
                v.0 < self.vars.len(),
                "row {} references unknown variable",
                c.name
            );
        }
        self.constraints.push(c);
    }

    pub fn constrain(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(VarId, f64)>,
        cmp: Cmp,
        rhs: f64,
    ) {
        self.add_constraint(Constraint::new(name, terms, cmp, rhs));
    }

    pub fn has_name(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn is_mip(&self) -> bool {
        self.vars.iter().any(|v| v.kind != VarKind::Continuous)
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.vars.iter().zip(values).map(|(v, x)| v.obj * x).sum()
    }

    /// Checks bounds, integrality and rows within `tol`.
    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        if values.len() != self.vars.len() {
            return false;
        }
        let vars_ok = self.vars.iter().zip(values).all(|(v, &x)| {
            x >= v.lb - tol
                && x <= v.ub + tol
                && (v.kind == VarKind::Continuous || (x - x.round()).abs() <= tol)
        });
        vars_ok && self.constraints.iter().all(|c| c.violation(values) <= tol)
    }

    /// CPLEX LP file text.
    pub fn to_lp(&self) -> String {
        let mut out = String::new();
        let name = |v: VarId| lp_name(&self.vars[v.0].name);
        let _ = writeln!(out, "\\ generated by darpsv");
        let _ = writeln!(out, "Minimize");
        let _ = write!(out, " obj:");
        let mut any = false;
        for (k, v) in self.vars.iter().enumerate() {
            if v.obj != 0.0 {
                let _ = write!(out, " {} {}", signed(v.obj), name(VarId(k)));
                any = true;
            }
        }
        if !any {
            let _ = write!(out, " 0");
        }
        let _ = writeln!(out);
        let _ = writeln!(out, "Subject To");
        for c in &self.constraints {
            let _ = write!(out, " {}:", lp_name(&c.name));
            if c.terms.is_empty() {
                let _ = write!(out, " 0 {}", name_placeholder(self));
            }
            for &(v, a) in &c.terms {
                let _ = write!(out, " {} {}", signed(a), name(v));
            }
            let op = match c.cmp {
                Cmp::Le => "<=",
                Cmp::Eq => "=",
                Cmp::Ge => ">=",
            };
            let _ = writeln!(out, " {op} {}", c.rhs);
        }
        let _ = writeln!(out, "Bounds");
        for (k, v) in self.vars.iter().enumerate() {
            let lb = if v.lb == f64::NEG_INFINITY {
                "-inf".to_string()
            } else {
                v.lb.to_string()
            };
            let ub = if v.ub == f64::INFINITY {
                "+inf".to_string()
            } else {
                v.ub.to_string()
            };
            let _ = writeln!(out, " {lb} <= {} <= {ub}", name(VarId(k)));
        }
        let ints: Vec<_> = (0..self.vars.len())
            .filter(|&k| self.vars[k].kind == VarKind::Integer)
            .collect();
        if !ints.is_empty() {
            let _ = writeln!(out, "General");
            for k in ints {
                let _ = writeln!(out, " {}", name(VarId(k)));
            }
        }
        let bins: Vec<_> = (0..self.vars.len())
            .filter(|&k| self.vars[k].kind == VarKind::Binary)
            .collect();
        if !bins.is_empty() {
            let _ = writeln!(out, "Binary");
            for k in bins {
                let _ = writeln!(out, " {}", name(VarId(k)));
            }
        }
        let _ = writeln!(out, "End");
        out
    }
}

fn signed(a: f64) -> String {
    if a < 0.0 {
        format!("- {}", -a)
    } else {
        format!("+ {a}")
    }
}

fn name_placeholder(m: &MilpModel) -> String {
    m.vars
        .first()
        .map(|v| lp_name(&v.name))
        .unwrap_or_else(|| "x".into())
}

/// LP names may not contain spaces or a few operator characters.
fn lp_name(s: &str) -> String {
    s.chars()
        .map(|c| match c {
            ' ' | ':' | '+' | '-' | '*' | '/' | '<' | '>' | '=' | '^' | '\\' => '_',
            c => c,
        })
        .collect()
}
