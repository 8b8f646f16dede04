use std::collections::BTreeSet;

use super::elim::exist_elim_with;
use super::{ElimOptions, ElimStats};
use crate::formula::{Formula, Var};
use crate::limits::QeError;

/// A quantifier-free formula equivalent to `f`, eliminating innermost quantifiers first.
pub fn eliminate_all(f: &Formula) -> Result<Formula, QeError> {
    Ok(eliminate_all_with(f, None, &ElimOptions::default())?.0)
}

/// [`eliminate_all`] with options. With `theory`, the result is equivalent to `f`
/// wherever `theory` holds; the assumption is used only at quantifiers whose scope
/// leaves every variable of `theory` free.
pub fn eliminate_all_with(
    f: &Formula,
    theory: Option<&Formula>,
    opts: &ElimOptions,
) -> Result<(Formula, ElimStats), QeError> {
    let mut stats = ElimStats::default();
    let theory = theory.filter(|t| *t != &Formula::True);
    let mut r = Recursion {
        opts,
        theory,
        theory_vars: theory.map(Formula::free_vars).unwrap_or_default(),
        bound: Vec::new(),
        stats: &mut stats,
    };
    let out = r.eliminate(f)?;
    Ok((out, stats))
}

struct Recursion<'a> {
    opts: &'a ElimOptions,
    theory: Option<&'a Formula>,
    theory_vars: BTreeSet<Var>,
    /// Variables bound by the quantifiers enclosing the current node.
    bound: Vec<Var>,
    stats: &'a mut ElimStats,
}

impl Recursion<'_> {
    fn eliminate(&mut self, f: &Formula) -> Result<Formula, QeError> {
        self.opts.budget.check_time()?;
        Ok(match f {
            Formula::True | Formula::False | Formula::Atom(_) => f.clone(),
            Formula::Not(g) => Formula::not(self.eliminate(g)?),
            Formula::And(cs) => Formula::and(cs.iter().map(|c| self.eliminate(c)).collect::<Result<_, _>>()?),
            Formula::Or(cs) => Formula::or(cs.iter().map(|c| self.eliminate(c)).collect::<Result<_, _>>()?),
            Formula::Exists(vs, body) => {
                let b = self.scoped(vs, body)?;
                self.exists(&b, vs)?
            }
            Formula::Forall(vs, body) => {
                let b = self.scoped(vs, body)?;
                Formula::not(self.exists(&Formula::not(b), vs)?).nnf()
            }
        })
    }

    fn scoped(&mut self, vs: &[Var], body: &Formula) -> Result<Formula, QeError> {
        let depth = self.bound.len();
        self.bound.extend(vs.iter().cloned());
        let r = self.eliminate(body);
        self.bound.truncate(depth);
        r
    }

    fn exists(&mut self, body: &Formula, vs: &[Var]) -> Result<Formula, QeError> {
        let free = body.free_vars();
        let vs: Vec<Var> = vs.iter().filter(|v| free.contains(v)).cloned().collect();
        if vs.is_empty() {
            return Ok(body.clone());
        }
        let applicable = !self.bound.iter().chain(vs.iter()).any(|v| self.theory_vars.contains(v));
        let theory = self.theory.filter(|_| applicable);
        let (dnf, stats) = exist_elim_with(body, &vs, theory, self.opts)?;
        self.stats.absorb(stats);
        Ok(dnf.to_formula())
    }
}
