use alloc::string::String;
use alloc::vec::Vec;

/// Index of a variable inside a [`Vars`] registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Role a variable plays in a structured problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    /// No special structure.
    Plain,
    /// Coordinate of a probability simplex.
    Alpha { simplex: usize, position: usize },
    /// Variable entering the target polynomial linearly (rewards, costs).
    X { index: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
}

/// Name and kind registry; the id order fixes monomial ordering.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vars {
    infos: Vec<VarInfo>,
}

impl Vars {
    pub fn new() -> Vars {
        Vars::default()
    }

    pub fn from_names<I, S>(names: I) -> Vars
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut v = Vars::new();
        for n in names {
            v.intern(&n.into());
        }
        v
    }

    /// Returns the existing variable named `name` or registers a new plain one.
    pub fn intern(&mut self, name: &str) -> Var {
        if let Some(v) = self.lookup(name) {
            return v;
        }
        self.infos.push(VarInfo {
            name: name.into(),
            kind: VarKind::Plain,
        });
        Var((self.infos.len() - 1) as u32)
    }

    pub fn intern_kind(&mut self, name: &str, kind: VarKind) -> Var {
        let v = self.intern(name);
        self.set_kind(v, kind);
        v
    }

    pub fn lookup(&self, name: &str) -> Option<Var> {
        self.infos
            .iter()
            .position(|i| i.name == name)
            .map(|p| Var(p as u32))
    }

    pub fn name(&self, v: Var) -> &str {
        &self.infos[v.index()].name
    }

    pub fn kind(&self, v: Var) -> VarKind {
        self.infos[v.index()].kind
    }

    pub fn set_kind(&mut self, v: Var, kind: VarKind) {
        self.infos[v.index()].kind = kind;
    }

    pub fn len(&self) -> usize {
        self.infos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.infos.is_empty()
    }

    pub fn all(&self) -> Vec<Var> {
        (0..self.infos.len() as u32).map(Var).collect()
    }

    pub fn infos(&self) -> &[VarInfo] {
        &self.infos
    }

    /// Simplex coordinates by (simplex, position), then x-type variables by
    /// index, then plain variables by registration order.
    pub fn default_order(&self) -> Vec<Var> {
        let mut vs = self.all();
        vs.sort_by_key(|&v| match self.kind(v) {
            VarKind::Alpha { simplex, position } => (0, simplex, position, v.0),
            VarKind::X { index } => (1, index, 0, v.0),
            VarKind::Plain => (2, 0, 0, v.0),
        });
        vs
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_order_puts_simplex_first() {
        let mut vs = Vars::new();
        let x = vs.intern_kind("x1", VarKind::X { index: 0 });
        let b = vs.intern_kind("b", VarKind::Alpha { simplex: 1, position: 0 });
        let a = vs.intern_kind("a", VarKind::Alpha { simplex: 0, position: 1 });
        let c = vs.intern_kind("c", VarKind::Alpha { simplex: 0, position: 0 });
        assert_eq!(vs.default_order(), alloc::vec![c, a, b, x]);
        assert_eq!(vs.intern("a"), a);
    }
}
