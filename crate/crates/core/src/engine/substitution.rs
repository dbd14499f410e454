use std::fmt;

use serde::{Deserialize, Serialize};

use crate::clique::CliquePair;
use crate::error::DomainError;
use crate::freeness::{CliqueSharingFreeness, SharingFreeness};
use crate::groups::GroupSet;
use crate::normalize::{self, NormalizePolicy, Site};
use crate::notation::{render_vars, VarNames};
use crate::oracle;
use crate::sharing::SharingSet;
use crate::syntax::Term;
use crate::varset::{Var, VarSet};

/// Which abstract domain an analysis runs over.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Sharing,
    SharingFreeness,
    CliqueSharing,
    CliqueSharingFreeness,
}

impl DomainKind {
    pub const ALL: [DomainKind; 4] = [
        DomainKind::Sharing,
        DomainKind::SharingFreeness,
        DomainKind::CliqueSharing,
        DomainKind::CliqueSharingFreeness,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DomainKind::Sharing => "sharing",
            DomainKind::SharingFreeness => "sharing-freeness",
            DomainKind::CliqueSharing => "clique-sharing",
            DomainKind::CliqueSharingFreeness => "clique-sharing-freeness",
        }
    }

    pub fn parse(s: &str) -> Option<DomainKind> {
        DomainKind::ALL.into_iter().find(|d| d.name() == s)
    }

    pub fn has_cliques(self) -> bool {
        matches!(self, DomainKind::CliqueSharing | DomainKind::CliqueSharingFreeness)
    }

    pub fn has_freeness(self) -> bool {
        matches!(self, DomainKind::SharingFreeness | DomainKind::CliqueSharingFreeness)
    }

    /// The plain domain tracking the same information without cliques.
    pub fn plain_counterpart(self) -> DomainKind {
        if self.has_freeness() {
            DomainKind::SharingFreeness
        } else {
            DomainKind::Sharing
        }
    }
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// An abstract substitution of any of the four domains, or the unreachable
/// state. Binary operations require both sides to be of the same domain;
/// `Bottom` is neutral for `lub` and least for `leq`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum AbstractSubstitution {
    Sharing(SharingSet),
    SharingFreeness(SharingFreeness),
    CliqueSharing(CliquePair),
    CliqueSharingFreeness(CliqueSharingFreeness),
    Bottom(VarSet),
}

use AbstractSubstitution as AS;

/// Plain-sharing reading of a substitution, cliques expanded.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PlainView {
    pub domain: VarSet,
    /// `None` for an unreachable point.
    pub groups: Option<GroupSet>,
    /// `None` when the domain does not track freeness.
    pub free: Option<VarSet>,
}

impl AbstractSubstitution {
    /// Most general state over `vars`: every variable may share with every
    /// other. `free` is kept only by freeness domains.
    pub fn top(kind: DomainKind, vars: VarSet, free: VarSet) -> AbstractSubstitution {
        match kind {
            DomainKind::Sharing => AS::Sharing(SharingSet::top(vars)),
            DomainKind::SharingFreeness => {
                AS::SharingFreeness(SharingFreeness::new(SharingSet::top(vars), free))
            }
            DomainKind::CliqueSharing => AS::CliqueSharing(CliquePair::top(vars)),
            DomainKind::CliqueSharingFreeness => AS::CliqueSharingFreeness(
                CliqueSharingFreeness::new(CliquePair::top(vars), free),
            ),
        }
    }

    /// Every variable of `domain` ground.
    pub fn ground(kind: DomainKind, domain: VarSet) -> AbstractSubstitution {
        match kind {
            DomainKind::Sharing => AS::Sharing(SharingSet::empty(domain)),
            DomainKind::SharingFreeness => {
                AS::SharingFreeness(SharingFreeness::new(SharingSet::empty(domain), VarSet::EMPTY))
            }
            DomainKind::CliqueSharing => AS::CliqueSharing(CliquePair::empty(domain)),
            DomainKind::CliqueSharingFreeness => AS::CliqueSharingFreeness(
                CliqueSharingFreeness::new(CliquePair::empty(domain), VarSet::EMPTY),
            ),
        }
    }

    pub fn kind(&self) -> Option<DomainKind> {
        match self {
            AS::Sharing(_) => Some(DomainKind::Sharing),
            AS::SharingFreeness(_) => Some(DomainKind::SharingFreeness),
            AS::CliqueSharing(_) => Some(DomainKind::CliqueSharing),
            AS::CliqueSharingFreeness(_) => Some(DomainKind::CliqueSharingFreeness),
            AS::Bottom(_) => None,
        }
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, AS::Bottom(_))
    }

    pub fn domain(&self) -> VarSet {
        match self {
            AS::Sharing(s) => s.domain(),
            AS::SharingFreeness(s) => s.domain(),
            AS::CliqueSharing(p) => p.domain(),
            AS::CliqueSharingFreeness(s) => s.domain(),
            AS::Bottom(d) => *d,
        }
    }

    /// Variables that occur in no group; `None` at bottom.
    pub fn ground_vars(&self) -> Option<VarSet> {
        match self {
            AS::Sharing(s) => Some(s.ground_vars()),
            AS::SharingFreeness(s) => Some(s.sh.ground_vars()),
            AS::CliqueSharing(p) => Some(p.ground_vars()),
            AS::CliqueSharingFreeness(s) => Some(s.pair.ground_vars()),
            AS::Bottom(_) => None,
        }
    }

    pub fn free_vars(&self) -> Option<VarSet> {
        match self {
            AS::SharingFreeness(s) => Some(s.free),
            AS::CliqueSharingFreeness(s) => Some(s.free),
            _ => None,
        }
    }

    /// Explicit groups plus cliques.
    pub fn size(&self) -> usize {
        match self {
            AS::Sharing(s) => s.len(),
            AS::SharingFreeness(s) => s.sh.len(),
            AS::CliqueSharing(p) => p.size(),
            AS::CliqueSharingFreeness(s) => s.pair.size(),
            AS::Bottom(_) => 0,
        }
    }

    pub fn clique_count(&self) -> usize {
        self.pair().map_or(0, |p| p.cl.len())
    }

    /// Number of sharing groups represented, cliques counted by expansion.
    pub fn group_count(&self) -> u128 {
        match self {
            AS::Sharing(s) => s.len() as u128,
            AS::SharingFreeness(s) => s.sh.len() as u128,
            AS::CliqueSharing(p) => normalize::represented_count(p),
            AS::CliqueSharingFreeness(s) => normalize::represented_count(&s.pair),
            AS::Bottom(_) => 0,
        }
    }

    pub fn pair(&self) -> Option<&CliquePair> {
        match self {
            AS::CliqueSharing(p) => Some(p),
            AS::CliqueSharingFreeness(s) => Some(&s.pair),
            _ => None,
        }
    }

    pub fn amgu(&self, x: Var, t: &Term) -> AbstractSubstitution {
        match self {
            AS::Sharing(s) => AS::Sharing(s.amgu(x, t)),
            AS::SharingFreeness(s) => AS::SharingFreeness(s.amgu(x, t)),
            AS::CliqueSharing(p) => AS::CliqueSharing(p.amgu(x, t)),
            AS::CliqueSharingFreeness(s) => AS::CliqueSharingFreeness(s.amgu(x, t)),
            AS::Bottom(d) => AS::Bottom(*d),
        }
    }

    pub fn project(&self, vars: VarSet) -> AbstractSubstitution {
        match self {
            AS::Sharing(s) => AS::Sharing(s.project(vars)),
            AS::SharingFreeness(s) => AS::SharingFreeness(s.project(vars)),
            AS::CliqueSharing(p) => AS::CliqueSharing(p.project(vars)),
            AS::CliqueSharingFreeness(s) => AS::CliqueSharingFreeness(s.project(vars)),
            AS::Bottom(d) => AS::Bottom(d.intersection(vars)),
        }
    }

    pub fn augment(&self, vars: VarSet) -> Result<AbstractSubstitution, DomainError> {
        Ok(match self {
            AS::Sharing(s) => AS::Sharing(s.augment(vars)?),
            AS::SharingFreeness(s) => AS::SharingFreeness(s.augment(vars)?),
            AS::CliqueSharing(p) => AS::CliqueSharing(p.augment(vars)?),
            AS::CliqueSharingFreeness(s) => AS::CliqueSharingFreeness(s.augment(vars)?),
            AS::Bottom(d) => {
                if vars.meets(*d) {
                    return Err(DomainError::NotFresh(vars.intersection(*d)));
                }
                AS::Bottom(d.union(vars))
            }
        })
    }

    /// Success of a goal over `g` given its success `prime` on `g`. Clique
    /// primes are normalized first, as the clique extend requires.
    pub fn extend(
        &self,
        g: VarSet,
        prime: &AbstractSubstitution,
        policy: &NormalizePolicy,
        clsh_limit: usize,
    ) -> Result<AbstractSubstitution, DomainError> {
        Ok(match (self, prime) {
            (AS::Bottom(d), _) => AS::Bottom(*d),
            (_, AS::Bottom(_)) => AS::Bottom(self.domain()),
            (AS::Sharing(c), AS::Sharing(p)) => AS::Sharing(c.extend(g, p)),
            (AS::SharingFreeness(c), AS::SharingFreeness(p)) => AS::SharingFreeness(c.extend(g, p)),
            (AS::CliqueSharing(c), AS::CliqueSharing(p)) => {
                let p = policy.apply(Site::Extend, p);
                let out = c.extend_with_limit(g, &p, clsh_limit);
                AS::CliqueSharing(policy.apply(Site::Extend, &out))
            }
            (AS::CliqueSharingFreeness(c), AS::CliqueSharingFreeness(p)) => {
                let p = CliqueSharingFreeness::new(policy.apply(Site::Extend, &p.pair), p.free);
                let out = c.extend_with_limit(g, &p, clsh_limit);
                AS::CliqueSharingFreeness(CliqueSharingFreeness::new(
                    policy.apply(Site::Extend, &out.pair),
                    out.free,
                ))
            }
            _ => return Err(DomainError::KindMismatch),
        })
    }

    pub fn lub(&self, other: &AbstractSubstitution) -> Result<AbstractSubstitution, DomainError> {
        Ok(match (self, other) {
            (AS::Bottom(d), x) | (x, AS::Bottom(d)) => {
                if x.is_bottom() {
                    AS::Bottom(d.union(x.domain()))
                } else {
                    x.clone()
                }
            }
            (AS::Sharing(a), AS::Sharing(b)) => AS::Sharing(a.lub(b)),
            (AS::SharingFreeness(a), AS::SharingFreeness(b)) => AS::SharingFreeness(a.lub(b)),
            (AS::CliqueSharing(a), AS::CliqueSharing(b)) => AS::CliqueSharing(a.lub(b)),
            (AS::CliqueSharingFreeness(a), AS::CliqueSharingFreeness(b)) => {
                AS::CliqueSharingFreeness(a.lub(b))
            }
            _ => return Err(DomainError::KindMismatch),
        })
    }

    /// Sufficient ordering test; exact for the plain domains.
    pub fn leq(&self, other: &AbstractSubstitution) -> Result<bool, DomainError> {
        Ok(match (self, other) {
            (AS::Bottom(_), _) => true,
            (_, AS::Bottom(_)) => false,
            (AS::Sharing(a), AS::Sharing(b)) => a.leq(b),
            (AS::SharingFreeness(a), AS::SharingFreeness(b)) => a.leq(b),
            (AS::CliqueSharing(a), AS::CliqueSharing(b)) => a.leq(b),
            (AS::CliqueSharingFreeness(a), AS::CliqueSharingFreeness(b)) => a.leq(b),
            _ => return Err(DomainError::KindMismatch),
        })
    }

    /// Normalizes clique components if `policy` applies at `site`.
    pub fn normalized_at(&self, site: Site, policy: &NormalizePolicy) -> AbstractSubstitution {
        match self {
            AS::CliqueSharing(p) => AS::CliqueSharing(policy.apply(site, p)),
            AS::CliqueSharingFreeness(s) => AS::CliqueSharingFreeness(
                CliqueSharingFreeness::new(policy.apply(site, &s.pair), s.free),
            ),
            other => other.clone(),
        }
    }

    pub fn rename(&self, f: impl Fn(Var) -> Var) -> AbstractSubstitution {
        match self {
            AS::Sharing(s) => AS::Sharing(s.rename(f)),
            AS::SharingFreeness(s) => AS::SharingFreeness(s.rename(f)),
            AS::CliqueSharing(p) => AS::CliqueSharing(p.rename(f)),
            AS::CliqueSharingFreeness(s) => AS::CliqueSharingFreeness(s.rename(f)),
            AS::Bottom(d) => AS::Bottom(d.map(f)),
        }
    }

    /// Plain sharing with the free set marking the free variables of
    /// the domain, for freeness-aware unification in the plain domains.
    pub fn with_free(&self, free: VarSet) -> AbstractSubstitution {
        match self {
            AS::Sharing(s) => AS::SharingFreeness(SharingFreeness::new(s.clone(), free)),
            AS::CliqueSharing(p) => {
                AS::CliqueSharingFreeness(CliqueSharingFreeness::new(p.clone(), free))
            }
            other => other.clone(),
        }
    }

    /// Drops the free component of a freeness domain.
    pub fn without_free(&self) -> AbstractSubstitution {
        match self {
            AS::SharingFreeness(s) => AS::Sharing(s.sh.clone()),
            AS::CliqueSharingFreeness(s) => AS::CliqueSharing(s.pair.clone()),
            other => other.clone(),
        }
    }

    /// The substitution read as a plain sharing set (cliques expanded).
    pub fn plain_view(&self) -> Result<PlainView, DomainError> {
        let domain = self.domain();
        let free = self.free_vars();
        let groups = match self {
            AS::Sharing(s) => Some(s.groups().clone()),
            AS::SharingFreeness(s) => Some(s.sh.groups().clone()),
            AS::CliqueSharing(p) => Some(oracle::expand(p)?),
            AS::CliqueSharingFreeness(s) => Some(oracle::expand(&s.pair)?),
            AS::Bottom(_) => None,
        };
        Ok(PlainView { domain, groups, free })
    }

    pub fn render(&self, names: &(impl VarNames + ?Sized)) -> String {
        match self {
            AS::Sharing(s) => s.render(names),
            AS::SharingFreeness(s) => s.render(names),
            AS::CliqueSharing(p) => p.render(names),
            AS::CliqueSharingFreeness(s) => s.render(names),
            AS::Bottom(_) => "⊥".to_string(),
        }
    }

    pub fn render_ground(&self, names: &(impl VarNames + ?Sized)) -> Option<String> {
        self.ground_vars().map(|g| render_vars(g, names))
    }
}
