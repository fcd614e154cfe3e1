use std::collections::BTreeSet;

use thiserror::Error;

use super::{Formula, PropName};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    #[error("formula is not in normal form: an iterated substitution on {0} lacks its initial assignment")]
    NotNormal(PropName),
    #[error("formula is not clean")]
    NotClean,
    #[error("formula contains an iterated substitution")]
    HasStar,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarSets {
    pub free: BTreeSet<PropName>,
    pub bound: BTreeSet<PropName>,
}

/// Matches `Sub(p, init, Star(p, step, scope))`.
pub(crate) fn as_iteration(f: &Formula) -> Option<(&PropName, &Formula, &Formula, &Formula)> {
    if let Formula::Sub { pivot, body, scope } = f {
        if let Formula::Star {
            pivot: p2,
            body: step,
            scope: inner,
            ..
        } = &**scope
        {
            if p2 == pivot {
                return Some((pivot, body, step, inner));
            }
        }
    }
    None
}

struct Summary {
    vars: VarSets,
    clean: bool,
}

fn summarize(f: &Formula) -> Result<Summary, FormulaError> {
    fn combine(parts: Vec<Summary>, drop: Option<&PropName>, keep: Vec<Summary>) -> Summary {
        let mut vars = VarSets::default();
        let mut clean = true;
        for s in keep {
            vars.free.extend(s.vars.free);
            vars.bound.extend(s.vars.bound);
            clean &= s.clean;
        }
        for s in parts {
            vars.free
                .extend(s.vars.free.into_iter().filter(|v| Some(v) != drop));
            vars.bound.extend(s.vars.bound);
            clean &= s.clean;
        }
        if let Some(p) = drop {
            vars.bound.insert(p.clone());
        }
        clean &= vars.free.is_disjoint(&vars.bound);
        Summary { vars, clean }
    }

    Ok(match f {
        Formula::Atom(q) => Summary {
            vars: VarSets {
                free: BTreeSet::from([q.clone()]),
                bound: BTreeSet::new(),
            },
            clean: true,
        },
        Formula::Bottom => Summary {
            vars: VarSets::default(),
            clean: true,
        },
        Formula::Neg(a) | Formula::Diamond(_, a) => combine(vec![], None, vec![summarize(a)?]),
        Formula::And(a, b) => combine(vec![], None, vec![summarize(a)?, summarize(b)?]),
        Formula::Sub { pivot, body, scope } => {
            if let Some((p, init, step, inner)) = as_iteration(f) {
                combine(
                    vec![summarize(step)?, summarize(inner)?],
                    Some(p),
                    vec![summarize(init)?],
                )
            } else {
                combine(vec![summarize(scope)?], Some(pivot), vec![summarize(body)?])
            }
        }
        Formula::Star { pivot, .. } => return Err(FormulaError::NotNormal(pivot.clone())),
    })
}

/// Free and bound variables of a normal formula.
pub fn var_sets(f: &Formula) -> Result<VarSets, FormulaError> {
    Ok(summarize(f)?.vars)
}

/// Every iterated substitution is the scope of an initial assignment to the same pivot.
pub fn is_normal(f: &Formula) -> bool {
    match f {
        Formula::Star { .. } => false,
        _ => match as_iteration(f) {
            Some((_, init, step, inner)) => is_normal(init) && is_normal(step) && is_normal(inner),
            None => f.children().into_iter().all(is_normal),
        },
    }
}

/// Normal, no variable both free and bound, and the same for every component.
pub fn is_clean(f: &Formula) -> bool {
    summarize(f).map(|s| s.clean).unwrap_or(false)
}

/// All nodes of the tree.
pub fn subformulas(f: &Formula) -> BTreeSet<Formula> {
    let mut out = BTreeSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if out.insert(g.clone()) {
            stack.extend(g.children());
        }
    }
    out
}

pub fn pivots(f: &Formula) -> BTreeSet<PropName> {
    let mut out = BTreeSet::new();
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if let Formula::Sub { pivot, .. } | Formula::Star { pivot, .. } = g {
            out.insert(pivot.clone());
        }
        stack.extend(g.children());
    }
    out
}

/// Every proposition letter occurring anywhere, pivots included.
pub fn all_names(f: &Formula) -> BTreeSet<PropName> {
    let mut out = pivots(f);
    let mut stack = vec![f];
    while let Some(g) = stack.pop() {
        if let Formula::Atom(q) = g {
            out.insert(q.clone());
        }
        stack.extend(g.children());
    }
    out
}

/// Simultaneously replaces the free occurrences of `p` in `f` by `with`.
/// No renaming is performed, so callers avoid capture themselves.
pub fn replace(f: &Formula, with: &Formula, p: &PropName) -> Result<Formula, FormulaError> {
    Ok(match f {
        Formula::Atom(q) if q == p => with.clone(),
        Formula::Atom(_) | Formula::Bottom => f.clone(),
        Formula::Neg(a) => replace(a, with, p)?.not(),
        Formula::And(a, b) => replace(a, with, p)?.and(replace(b, with, p)?),
        Formula::Diamond(l, a) => Formula::diamond_l(l, replace(a, with, p)?),
        Formula::Sub { pivot, body, scope } => {
            let body = replace(body, with, p)?;
            if pivot == p {
                Formula::sub(pivot, body, (**scope).clone())
            } else if let Some((q, _, step, inner)) = as_iteration(f) {
                let mode = match &**scope {
                    Formula::Star { mode, .. } => *mode,
                    _ => unreachable!(),
                };
                Formula::sub(
                    q,
                    body,
                    Formula::star(q, replace(step, with, p)?, replace(inner, with, p)?, mode),
                )
            } else {
                Formula::sub(pivot, body, replace(scope, with, p)?)
            }
        }
        Formula::Star { pivot, .. } => return Err(FormulaError::NotNormal(pivot.clone())),
    })
}

/// Prefixes every bare iterated substitution on `p` with the assignment `p := p`.
pub fn normalize(f: &Formula) -> Formula {
    match f {
        Formula::Atom(_) | Formula::Bottom => f.clone(),
        Formula::Neg(a) => normalize(a).not(),
        Formula::And(a, b) => normalize(a).and(normalize(b)),
        Formula::Diamond(l, a) => Formula::diamond_l(l, normalize(a)),
        Formula::Sub { pivot, body, scope } => match &**scope {
            Formula::Star {
                pivot: q,
                body: step,
                scope: inner,
                mode,
            } if q == pivot => Formula::sub(
                pivot,
                normalize(body),
                Formula::star(pivot, normalize(step), normalize(inner), *mode),
            ),
            _ => Formula::sub(pivot, normalize(body), normalize(scope)),
        },
        Formula::Star {
            pivot,
            body,
            scope,
            mode,
        } => Formula::sub(
            pivot,
            Formula::Atom(pivot.clone()),
            Formula::star(pivot, normalize(body), normalize(scope), *mode),
        ),
    }
}

/// Generator of names unused by a fixed set of formulas. A requested base is
/// returned as is when free, otherwise suffixed `_k` with the smallest such k.
#[derive(Debug, Clone, Default)]
pub struct FreshNames {
    used: BTreeSet<PropName>,
}

impl FreshNames {
    pub fn new<'a, I: IntoIterator<Item = &'a Formula>>(formulas: I) -> Self {
        let mut used = BTreeSet::new();
        for f in formulas {
            used.extend(all_names(f));
        }
        FreshNames { used }
    }

    pub fn reserve(&mut self, p: &PropName) {
        self.used.insert(p.clone());
    }

    pub fn fresh(&mut self, base: &PropName) -> PropName {
        if !self.used.contains(base) {
            self.used.insert(base.clone());
            return base.clone();
        }
        (1..)
            .map(|k| PropName::new(&format!("{}_{k}", base.as_str())).expect("suffixed name"))
            .find(|cand| !self.used.contains(cand))
            .map(|cand| {
                self.used.insert(cand.clone());
                cand
            })
            .expect("unbounded suffix search")
    }
}

fn free_anywhere(f: &Formula, ctx: &mut Vec<PropName>, out: &mut BTreeSet<PropName>) {
    match f {
        Formula::Atom(q) => {
            if !ctx.contains(q) {
                out.insert(q.clone());
            }
        }
        Formula::Sub { pivot, body, scope } => {
            free_anywhere(body, ctx, out);
            ctx.push(pivot.clone());
            match &**scope {
                Formula::Star {
                    pivot: q,
                    body: step,
                    scope: inner,
                    ..
                } if q == pivot => {
                    free_anywhere(step, ctx, out);
                    free_anywhere(inner, ctx, out);
                }
                _ => free_anywhere(scope, ctx, out),
            }
            ctx.pop();
        }
        _ => {
            for c in f.children() {
                free_anywhere(c, ctx, out);
            }
        }
    }
}

/// Normalizes and then renames bound pivots until the formula is clean with
/// pairwise distinct pivots. Already clean formulas with distinct pivots are
/// returned unchanged.
pub fn rename_to_clean(f: &Formula) -> Formula {
    struct Renamer {
        free: BTreeSet<PropName>,
        kept: BTreeSet<PropName>,
        fresh: FreshNames,
    }

    impl Renamer {
        fn choose(&mut self, p: &PropName) -> PropName {
            if !self.free.contains(p) && !self.kept.contains(p) {
                self.kept.insert(p.clone());
                p.clone()
            } else {
                self.fresh.fresh(p)
            }
        }

        fn rename(&mut self, f: &Formula) -> Formula {
            match f {
                Formula::Atom(_) | Formula::Bottom => f.clone(),
                Formula::Neg(a) => self.rename(a).not(),
                Formula::And(a, b) => {
                    let a = self.rename(a);
                    a.and(self.rename(b))
                }
                Formula::Diamond(l, a) => Formula::diamond_l(l, self.rename(a)),
                Formula::Sub { pivot, body, scope } => {
                    let q = self.choose(pivot);
                    let body = self.rename(body);
                    let to_q = |g: Formula| {
                        if &q == pivot {
                            g
                        } else {
                            replace(&g, &Formula::Atom(q.clone()), pivot).expect("normal input")
                        }
                    };
                    if let Formula::Star {
                        pivot: p2,
                        body: step,
                        scope: inner,
                        mode,
                    } = &**scope
                    {
                        if p2 == pivot {
                            let step = self.rename(step);
                            let inner = self.rename(inner);
                            return Formula::sub(
                                &q,
                                body,
                                Formula::star(&q, to_q(step), to_q(inner), *mode),
                            );
                        }
                    }
                    let scope = self.rename(scope);
                    Formula::sub(&q, body, to_q(scope))
                }
                Formula::Star { .. } => unreachable!("input is normalized"),
            }
        }
    }

    let nf = normalize(f);
    let mut free = BTreeSet::new();
    free_anywhere(&nf, &mut Vec::new(), &mut free);
    let mut r = Renamer {
        free,
        kept: BTreeSet::new(),
        fresh: FreshNames::new([&nf]),
    };
    r.rename(&nf)
}

/// Degree of iteration: nesting depth of iterated substitutions through their bodies.
pub fn doi(f: &Formula) -> usize {
    match f {
        Formula::Atom(_) | Formula::Bottom => 0,
        Formula::Star { body, scope, .. } => doi(scope).max(doi(body) + 1),
        _ => f.children().into_iter().map(doi).max().unwrap_or(0),
    }
}

/// Depth measure under which the reduction rules strictly decrease.
pub fn msl_depth(f: &Formula) -> Result<usize, FormulaError> {
    if f.has_star() {
        return Err(FormulaError::HasStar);
    }
    if !is_clean(f) {
        return Err(FormulaError::NotClean);
    }
    fn dep(f: &Formula) -> usize {
        match f {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Neg(a) | Formula::Diamond(_, a) => dep(a) + 1,
            Formula::And(a, b) => dep(a).max(dep(b)) + 1,
            Formula::Sub { pivot, body, scope } => {
                dep(&replace(scope, body, pivot).expect("star-free")) + 1
            }
            Formula::Star { .. } => unreachable!(),
        }
    }
    Ok(dep(f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{atom, parse_formula, prop};

    fn pf(s: &str) -> Formula {
        parse_formula(s).unwrap()
    }

    fn names(xs: &[&str]) -> BTreeSet<PropName> {
        xs.iter().map(|x| prop(x)).collect()
    }

    #[test]
    fn var_sets_of_iteration() {
        let v = var_sets(&pf("<p:=p | q; (p:=[]p)*>p")).unwrap();
        assert_eq!(v.free, names(&["p", "q"]));
        assert_eq!(v.bound, names(&["p"]));
        assert!(matches!(
            var_sets(&pf("<(p:=[]p)*>p")),
            Err(FormulaError::NotNormal(_))
        ));
    }

    #[test]
    fn normality() {
        assert!(is_normal(&pf("<p:=false; (p:=[]p)*>p")));
        assert!(!is_normal(&pf("<p:=false; q:=true; (p:=[]p)*>p")));
        assert!(is_normal(&normalize(&pf("<q:=true; (p:=[]p)*>p"))));
    }

    #[test]
    fn cleanness_is_hereditary() {
        assert!(is_clean(&pf("<p:=q>p")));
        assert!(!is_clean(&pf("<p:=q><p:=p>p")));
        assert!(!is_clean(&pf("<p:=[]p>p")));
        assert!(is_clean(&pf("<p:=q; (p:=[]p)*>p")));
    }

    #[test]
    fn replace_respects_binding() {
        let f = pf("p & <p:=p>p");
        assert_eq!(replace(&f, &atom("r"), &prop("p")).unwrap(), pf("r & <p:=r>p"));
        let g = pf("<q:=p; (q:=q & p)*>(q | p)");
        assert_eq!(
            replace(&g, &atom("r"), &prop("p")).unwrap(),
            pf("<q:=r; (q:=q & r)*>(q | r)")
        );
        let h = pf("<p:=p; (p:=[]p)*>p");
        assert_eq!(
            replace(&h, &atom("r"), &prop("p")).unwrap(),
            pf("<p:=r; (p:=[]p)*>p")
        );
    }

    #[test]
    fn renaming_examples() {
        assert_eq!(rename_to_clean(&pf("<p:=[]p>p")), pf("<p_1:=[]p>p_1"));
        assert_eq!(
            rename_to_clean(&pf("<(p:=[]p)*>p")),
            pf("<p_1:=p; (p_1:=[]p_1)*>p_1")
        );
        let clean = pf("<q:=r>q & <s:=r>s");
        assert_eq!(rename_to_clean(&clean), clean);
        let twice = rename_to_clean(&pf("<q:=r>q & <q:=s>q"));
        assert!(is_clean(&twice));
        assert_eq!(pivots(&twice).len(), 2);
    }

    #[test]
    fn fresh_names_skip_used() {
        let mut fresh = FreshNames::new([&pf("q & q_1")]);
        assert_eq!(fresh.fresh(&prop("q")), prop("q_2"));
        assert_eq!(fresh.fresh(&prop("r")), prop("r"));
        assert_eq!(fresh.fresh(&prop("r")), prop("r_1"));
    }

    #[test]
    fn depth_measures() {
        assert_eq!(doi(&pf("<p:=q; (p:=<q:=p; (q:=<>q)*>q)*>p")), 2);
        assert_eq!(doi(&pf("<>p & q")), 0);
        assert_eq!(msl_depth(&pf("<q:=r>q")).unwrap(), 1);
        assert_eq!(msl_depth(&pf("<q:=<>r>(q & q)")).unwrap(), 3);
        assert_eq!(msl_depth(&pf("<p:=[]p>p")), Err(FormulaError::NotClean));
        assert_eq!(
            msl_depth(&pf("<p:=q; (p:=[]p)*>p")),
            Err(FormulaError::HasStar)
        );
    }

    #[test]
    fn subformula_closure() {
        let s = subformulas(&pf("<p:=q>~p"));
        assert!(s.contains(&atom("q")));
        assert!(s.contains(&pf("~p")));
        assert_eq!(s.len(), 4);
    }
}
