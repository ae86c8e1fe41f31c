use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

/// Modal formulas of every language handled by the crate.
///
/// `Diamond` with grade 1 is the plain `◇`; `Back` and `Global` count
/// predecessors and all states respectively.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Prop(String),
    Var(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Diamond { action: String, grade: usize, body: Box<Formula> },
    Square { action: String, body: Box<Formula> },
    Back { action: String, grade: usize, body: Box<Formula> },
    Global { grade: usize, body: Box<Formula> },
    Down(String, Box<Formula>),
    At(String, Box<Formula>),
}

/// Syntactic fragments, each a predicate over formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Language {
    /// Basic modal logic.
    Ml,
    /// Negation-free modal logic with `◇` and `□`.
    MlPlus,
    /// Positive existential: letters, `∧`, `∨`, `◇`.
    MlPlusDiamond,
    /// Positive existential with backward `◆`.
    MlPlusDiamondBackward,
    /// Positive existential with the global `E`.
    MlPlusDiamondGlobal,
    /// Graded modal logic.
    Graded,
    GradedBackward,
    GradedGlobal,
    /// Hybrid logic with `↓` and `@`.
    Hybrid,
    HybridBackward,
}

impl Language {
    pub const ALL: [Language; 10] = [
        Language::Ml,
        Language::MlPlus,
        Language::MlPlusDiamond,
        Language::MlPlusDiamondBackward,
        Language::MlPlusDiamondGlobal,
        Language::Graded,
        Language::GradedBackward,
        Language::GradedGlobal,
        Language::Hybrid,
        Language::HybridBackward,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Language::Ml => "ml",
            Language::MlPlus => "ml+",
            Language::MlPlusDiamond => "pml",
            Language::MlPlusDiamondBackward => "pmlb",
            Language::MlPlusDiamondGlobal => "pmlg",
            Language::Graded => "gml",
            Language::GradedBackward => "gmlb",
            Language::GradedGlobal => "gmlg",
            Language::Hybrid => "hl",
            Language::HybridBackward => "hlb",
        }
    }

    /// Whether the equivalence for this language takes a modal depth bound.
    pub fn is_depth_bounded(self) -> bool {
        matches!(
            self,
            Language::MlPlusDiamond | Language::MlPlusDiamondBackward | Language::Graded | Language::GradedBackward
        )
    }

    fn allows(self, f: &Formula) -> bool {
        use Language::*;
        let positive = matches!(self, MlPlus | MlPlusDiamond | MlPlusDiamondBackward | MlPlusDiamondGlobal);
        let existential = matches!(self, MlPlusDiamond | MlPlusDiamondBackward | MlPlusDiamondGlobal);
        let graded = matches!(self, Graded | GradedBackward | GradedGlobal);
        let backward = matches!(self, MlPlusDiamondBackward | GradedBackward | HybridBackward);
        let global = matches!(self, MlPlusDiamondGlobal | GradedGlobal);
        let hybrid = matches!(self, Hybrid | HybridBackward);
        match f {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::And(..) | Formula::Or(..) => true,
            Formula::Not(_) => !positive,
            Formula::Square { .. } => !existential,
            Formula::Diamond { grade, .. } => *grade == 1 || graded,
            Formula::Back { grade, .. } => backward && (*grade == 1 || graded),
            Formula::Global { grade, .. } => global && (*grade == 1 || graded),
            Formula::Var(_) | Formula::Down(..) | Formula::At(..) => hybrid,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Ok(match lower.as_str() {
            "ml" => Language::Ml,
            "ml+" | "mlplus" => Language::MlPlus,
            "pml" | "ml+<>" | "ml+dia" => Language::MlPlusDiamond,
            "pmlb" | "ml+<>b" | "ml+diab" => Language::MlPlusDiamondBackward,
            "pmlg" | "ml+<>g" | "ml+diag" => Language::MlPlusDiamondGlobal,
            "gml" | "ml#" => Language::Graded,
            "gmlb" | "ml#b" => Language::GradedBackward,
            "gmlg" | "ml#g" => Language::GradedGlobal,
            "hl" => Language::Hybrid,
            "hlb" => Language::HybridBackward,
            _ => return Err(format!("unknown logic `{s}`")),
        })
    }
}

impl Formula {
    pub fn prop(p: &str) -> Self {
        Formula::Prop(p.into())
    }

    pub fn var(x: &str) -> Self {
        Formula::Var(x.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Formula) -> Self {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn diamond(action: &str, body: Formula) -> Self {
        Formula::graded(action, 1, body)
    }

    pub fn graded(action: &str, grade: usize, body: Formula) -> Self {
        Formula::Diamond { action: action.into(), grade, body: Box::new(body) }
    }

    pub fn boxed(action: &str, body: Formula) -> Self {
        Formula::Square { action: action.into(), body: Box::new(body) }
    }

    pub fn back(action: &str, grade: usize, body: Formula) -> Self {
        Formula::Back { action: action.into(), grade, body: Box::new(body) }
    }

    pub fn global(grade: usize, body: Formula) -> Self {
        Formula::Global { grade, body: Box::new(body) }
    }

    pub fn down(x: &str, body: Formula) -> Self {
        Formula::Down(x.into(), Box::new(body))
    }

    pub fn at(x: &str, body: Formula) -> Self {
        Formula::At(x.into(), Box::new(body))
    }

    /// Left-nested conjunction; `⊤` when empty.
    pub fn conjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    pub fn disjunction(items: impl IntoIterator<Item = Formula>) -> Self {
        items.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Prop(_) | Formula::Var(_) => vec![],
            Formula::Not(a)
            | Formula::Diamond { body: a, .. }
            | Formula::Square { body: a, .. }
            | Formula::Back { body: a, .. }
            | Formula::Global { body: a, .. }
            | Formula::Down(_, a)
            | Formula::At(_, a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) => vec![a, b],
        }
    }

    /// Nesting depth of `◇`, `□`, `◆` and `E`.
    pub fn modal_depth(&self) -> usize {
        let inner = self.children().into_iter().map(Formula::modal_depth).max().unwrap_or(0);
        match self {
            Formula::Diamond { .. } | Formula::Square { .. } | Formula::Back { .. } | Formula::Global { .. } => inner + 1,
            _ => inner,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    pub fn in_language(&self, lang: Language) -> bool {
        lang.allows(self) && self.children().into_iter().all(|c| c.in_language(lang))
    }

    /// Every grade is at least 1.
    pub fn grades_valid(&self) -> bool {
        let own = match self {
            Formula::Diamond { grade, .. } | Formula::Back { grade, .. } | Formula::Global { grade, .. } => *grade >= 1,
            _ => true,
        };
        own && self.children().into_iter().all(Formula::grades_valid)
    }

    pub fn props(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| {
            if let Formula::Prop(p) = f {
                out.insert(p.clone());
            }
        });
        out
    }

    pub fn actions(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.walk(&mut |f| match f {
            Formula::Diamond { action, .. } | Formula::Square { action, .. } | Formula::Back { action, .. } => {
                out.insert(action.clone());
            }
            _ => {}
        });
        out
    }

    fn walk(&self, f: &mut dyn FnMut(&Formula)) {
        f(self);
        for c in self.children() {
            c.walk(f);
        }
    }

    /// World variables occurring free.
    pub fn free_vars(&self) -> BTreeSet<String> {
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
            match f {
                Formula::Var(x) | Formula::At(x, _) if !bound.contains(x) => {
                    out.insert(x.clone());
                }
                _ => {}
            }
            if let Formula::Down(x, body) = f {
                bound.push(x.clone());
                go(body, bound, out);
                bound.pop();
            } else {
                for c in f.children() {
                    go(c, bound, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_and_languages() {
        let f = Formula::and(Formula::graded("R", 2, Formula::prop("p")), Formula::boxed("R", Formula::diamond("R", Formula::True)));
        assert_eq!(f.modal_depth(), 2);
        assert!(f.in_language(Language::Graded));
        assert!(!f.in_language(Language::Ml));
        let pos = Formula::or(Formula::diamond("R", Formula::prop("p")), Formula::prop("p"));
        assert!(pos.in_language(Language::MlPlusDiamond));
        assert!(pos.in_language(Language::MlPlus));
        assert!(!Formula::boxed("R", Formula::True).in_language(Language::MlPlusDiamond));
        assert!(!Formula::not(Formula::True).in_language(Language::MlPlus));
        let h = Formula::down("x", Formula::diamond("R", Formula::var("x")));
        assert!(h.in_language(Language::Hybrid) && !h.in_language(Language::Graded));
        assert!(h.free_vars().is_empty());
        assert_eq!(Formula::at("y", Formula::True).free_vars().len(), 1);
        assert!(!Formula::global(0, Formula::True).grades_valid());
        for l in Language::ALL {
            assert_eq!(l.name().parse::<Language>(), Ok(l));
        }
    }
}
