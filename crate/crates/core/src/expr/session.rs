use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use indexmap::{IndexMap, IndexSet};

use crate::coeff::Coeff;
use crate::error::{Error, Result};
use crate::symm::{Group, SymmetrySpec};

/// Dimension of a manifold: either a concrete integer or a symbol such as `d`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Dim {
    Int(i64),
    Sym(Arc<str>),
}

#[derive(Clone, Debug)]
pub struct Manifold {
    pub name: Arc<str>,
    pub dim: Dim,
    pub alphabet: Vec<Arc<str>>,
}

#[derive(Clone, Debug)]
pub struct MetricInfo {
    pub name: Arc<str>,
    /// Sign of the determinant; `-1` means an odd number of negative eigenvalues.
    pub det_sign: i32,
    pub covd: Arc<str>,
    pub flat: bool,
    pub print: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TensorKind {
    Metric,
    Riemann,
    Ricci,
    RicciScalar,
    Weyl,
    /// First-order metric perturbation `δg_{ab}`.
    Perturbation,
    /// Internal bookkeeping tensor carrying free indices through a computation.
    Aux,
    Plain,
}

#[derive(Clone, Debug)]
pub struct TensorInfo {
    pub name: Arc<str>,
    pub rank: usize,
    pub sym: SymmetrySpec,
    pub print: String,
    pub kind: TensorKind,
}

/// Declarations that give meaning to expressions.
#[derive(Clone, Debug)]
pub struct Session {
    pub manifold: Option<Manifold>,
    pub metric: Option<MetricInfo>,
    pub tensors: IndexMap<Arc<str>, TensorInfo>,
    pub constants: IndexSet<Arc<str>>,
    pub riemann_sign: i32,
    pub ricci_sign: i32,
    pub curvature_relations: bool,
    pub constant_counter: u32,
    pub group_cap: usize,
    cache: Arc<RwLock<HashMap<SymmetrySpec, Arc<Group>>>>,
}

impl Default for Session {
    fn default() -> Self {
        Session::new()
    }
}

pub const RIEMANN: &str = "Riemann";
pub const RICCI: &str = "Ricci";
pub const RICCI_SCALAR: &str = "RicciScalar";
pub const WEYL: &str = "Weyl";
pub const PERTURBATION: &str = "dg";

impl Session {
    pub fn new() -> Self {
        Session {
            manifold: None,
            metric: None,
            tensors: IndexMap::new(),
            constants: IndexSet::new(),
            riemann_sign: 1,
            ricci_sign: 1,
            curvature_relations: true,
            constant_counter: 0,
            group_cap: 10_000_000,
            cache: Arc::new(RwLock::new(HashMap::new())),
        }
    }

    /// A manifold `M` of dimension `dim` with indices `a..z`, a metric `g`
    /// of determinant sign `-1` and its derivative `CD`.
    pub fn standard(dim: Dim) -> Self {
        let mut s = Session::new();
        let alphabet = ('a'..='z').map(|c| Arc::from(c.to_string().as_str())).collect();
        s.declare_manifold("M", dim, alphabet).expect("fresh session");
        s.declare_metric("g", -1, "CD", false, "g").expect("fresh session");
        s
    }

    fn name_taken(&self, name: &str) -> bool {
        self.tensors.contains_key(name)
            || self.constants.contains(name)
            || self.manifold.as_ref().map(|m| &*m.name == name).unwrap_or(false)
            || self.metric.as_ref().map(|m| &*m.covd == name).unwrap_or(false)
            || matches!(self.manifold.as_ref().map(|m| &m.dim), Some(Dim::Sym(s)) if &**s == name)
    }

    fn check_fresh(&self, name: &str) -> Result<()> {
        if self.name_taken(name) {
            Err(Error::Duplicate(name.to_string()))
        } else {
            Ok(())
        }
    }

    pub fn declare_manifold(&mut self, name: &str, dim: Dim, alphabet: Vec<Arc<str>>) -> Result<()> {
        if self.manifold.is_some() {
            return Err(Error::Unsupported("more than one manifold".into()));
        }
        self.check_fresh(name)?;
        if let Dim::Sym(s) = &dim {
            self.check_fresh(s)?;
        }
        if alphabet.is_empty() {
            return Err(Error::Invalid("empty index alphabet".into()));
        }
        self.manifold = Some(Manifold {
            name: Arc::from(name),
            dim,
            alphabet,
        });
        Ok(())
    }

    /// Declares the metric, its derivative, and (unless flat) its curvature tensors.
    pub fn declare_metric(&mut self, name: &str, det_sign: i32, covd: &str, flat: bool, print: &str) -> Result<()> {
        if self.manifold.is_none() {
            return Err(Error::Invalid("declare a manifold before the metric".into()));
        }
        if self.metric.is_some() {
            return Err(Error::Unsupported("more than one metric".into()));
        }
        self.check_fresh(name)?;
        self.check_fresh(covd)?;
        self.declare_tensor(name, 2, SymmetrySpec::symmetric(2, &[0, 1]), print, TensorKind::Metric)?;
        self.metric = Some(MetricInfo {
            name: Arc::from(name),
            det_sign: if det_sign < 0 { -1 } else { 1 },
            covd: Arc::from(covd),
            flat,
            print: print.to_string(),
        });
        if !flat {
            self.declare_tensor(RIEMANN, 4, SymmetrySpec::riemann(), "R", TensorKind::Riemann)?;
            self.declare_tensor(RICCI, 2, SymmetrySpec::symmetric(2, &[0, 1]), "R", TensorKind::Ricci)?;
            self.declare_tensor(RICCI_SCALAR, 0, SymmetrySpec::none(0), "R", TensorKind::RicciScalar)?;
            self.declare_tensor(WEYL, 4, SymmetrySpec::riemann(), "C", TensorKind::Weyl)?;
        }
        self.declare_tensor(
            PERTURBATION,
            2,
            SymmetrySpec::symmetric(2, &[0, 1]),
            "h",
            TensorKind::Perturbation,
        )?;
        Ok(())
    }

    pub fn declare_tensor(
        &mut self,
        name: &str,
        rank: usize,
        sym: SymmetrySpec,
        print: &str,
        kind: TensorKind,
    ) -> Result<()> {
        self.check_fresh(name)?;
        if sym.n != rank {
            return Err(Error::Invalid(format!(
                "symmetry of `{}` acts on {} slots but the rank is {}",
                name, sym.n, rank
            )));
        }
        let name: Arc<str> = Arc::from(name);
        self.tensors.insert(
            name.clone(),
            TensorInfo {
                name,
                rank,
                sym,
                print: print.to_string(),
                kind,
            },
        );
        Ok(())
    }

    pub fn declare_constant(&mut self, name: &str) -> Result<()> {
        self.check_fresh(name)?;
        self.constants.insert(Arc::from(name));
        Ok(())
    }

    /// Next unused constant symbol `C<k>`, registered in the session.
    pub fn fresh_constant(&mut self) -> Arc<str> {
        loop {
            self.constant_counter += 1;
            let name = format!("C{}", self.constant_counter);
            if !self.name_taken(&name) {
                self.constants.insert(Arc::from(name.as_str()));
                return Arc::from(name.as_str());
            }
        }
    }

    pub fn tensor(&self, name: &str) -> Option<&TensorInfo> {
        self.tensors.get(name)
    }

    pub fn kind(&self, head: &str) -> TensorKind {
        self.tensors.get(head).map(|t| t.kind).unwrap_or(TensorKind::Plain)
    }

    pub fn is_constant(&self, name: &str) -> bool {
        self.constants.contains(name) || self.dim_symbol() == Some(name)
    }

    pub fn dim(&self) -> Option<&Dim> {
        self.manifold.as_ref().map(|m| &m.dim)
    }

    pub fn dim_symbol(&self) -> Option<&str> {
        match self.dim() {
            Some(Dim::Sym(s)) => Some(s),
            _ => None,
        }
    }

    pub fn dim_int(&self) -> Option<i64> {
        match self.dim() {
            Some(Dim::Int(n)) => Some(*n),
            _ => None,
        }
    }

    pub fn dim_coeff(&self) -> Coeff {
        match self.dim() {
            Some(Dim::Int(n)) => Coeff::int(*n),
            Some(Dim::Sym(s)) => Coeff::var(s),
            None => Coeff::var("d"),
        }
    }

    pub fn alphabet(&self) -> &[Arc<str>] {
        self.manifold.as_ref().map(|m| m.alphabet.as_slice()).unwrap_or(&[])
    }

    /// Whether `s` is a usable index label: an alphabet letter, optionally
    /// followed by digits.
    pub fn is_index_label(&self, s: &str) -> bool {
        let base = s.trim_end_matches(|c: char| c.is_ascii_digit());
        !base.is_empty() && self.alphabet().iter().any(|a| &**a == base)
    }

    pub fn metric_name(&self) -> Option<&str> {
        self.metric.as_ref().map(|m| &*m.name)
    }

    pub fn covd_name(&self) -> Option<&str> {
        self.metric.as_ref().map(|m| &*m.covd)
    }

    pub fn is_metric(&self, head: &str) -> bool {
        self.metric_name() == Some(head)
    }

    pub fn is_flat(&self) -> bool {
        self.metric.as_ref().map(|m| m.flat).unwrap_or(true)
    }

    pub fn det_sign(&self) -> i32 {
        self.metric.as_ref().map(|m| m.det_sign).unwrap_or(1)
    }

    /// Derivatives commute when the connection is flat.
    pub fn derivs_commute(&self) -> bool {
        self.is_flat()
    }

    pub fn group(&self, spec: &SymmetrySpec) -> Result<Arc<Group>> {
        if let Some(g) = self.cache.read().expect("group cache poisoned").get(spec) {
            return Ok(g.clone());
        }
        let g = Arc::new(Group::closure(spec, self.group_cap)?);
        self.cache
            .write()
            .expect("group cache poisoned")
            .insert(spec.clone(), g.clone());
        Ok(g)
    }

    /// Symmetry group of a factor's slots (tensor slots followed by derivative slots).
    pub fn factor_group(&self, head: &str, nderivs: usize) -> Result<Arc<Group>> {
        let info = self
            .tensor(head)
            .ok_or_else(|| Error::UndeclaredHead(head.to_string()))?;
        if nderivs == 0 {
            return self.group(&info.sym);
        }
        let dsym = if self.derivs_commute() {
            SymmetrySpec::symmetric(nderivs, &(0..nderivs).collect::<Vec<_>>())
        } else {
            SymmetrySpec::none(nderivs)
        };
        self.group(&info.sym.direct_sum(&dsym))
    }

    /// A clone carrying an extra tensor, used for bookkeeping tensors.
    pub fn with_tensor(&self, name: &str, rank: usize, sym: SymmetrySpec, kind: TensorKind) -> Result<Session> {
        let mut s = self.clone();
        s.declare_tensor(name, rank, sym, name, kind)?;
        Ok(s)
    }

    /// A clone whose manifold has the concrete dimension `n`.
    pub fn at_dim(&self, n: i64) -> Session {
        let mut s = self.clone();
        if let Some(m) = &mut s.manifold {
            m.dim = Dim::Int(n);
        }
        s
    }

    /// A fresh tensor name that is not yet declared.
    pub fn fresh_tensor_name(&self, stem: &str) -> String {
        let mut k = 0;
        loop {
            let n = if k == 0 { stem.to_string() } else { format!("{}{}", stem, k) };
            if !self.name_taken(&n) {
                return n;
            }
            k += 1;
        }
    }

    pub fn curvature_head(&self, kind: TensorKind) -> Option<&str> {
        self.tensors.values().find(|t| t.kind == kind).map(|t| &*t.name)
    }
}
