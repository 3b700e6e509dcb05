use std::collections::BTreeMap;

use super::{Scenario, TheoremError, TheoremId};
use crate::classes::{
    check_class, check_nonnegative, check_similarly_ordered, check_supermultiplicative, ClassId,
    ConvexityClassSpec, Verdict,
};
use crate::expr::Expr;
use crate::Interval;

type Results = BTreeMap<String, Verdict>;

struct Checker<'a> {
    sc: &'a Scenario,
    out: Results,
}

impl Checker<'_> {
    /// Records whether `h` is nonnegative on `[0, 1]`; class checks that use
    /// `h` as a weight are skipped when it is not.
    fn weight_nonnegative(&mut self, name: &str, h: &Expr) -> Result<bool, TheoremError> {
        let v = check_nonnegative(h, &self.sc.bindings(), Interval::unit(), &self.sc.plan)?;
        let ok = !v.is_violated();
        self.out.insert(format!("{name} nonnegative on [0,1]"), v);
        Ok(ok)
    }

    fn member(&mut self, label: &str, spec: &ConvexityClassSpec) -> Result<(), TheoremError> {
        let sc = self.sc;
        for (name, e) in [("f", &sc.f), ("g", sc.g())] {
            let v = check_class(e, spec, sc.interval, &sc.plan)?;
            self.out.insert(format!("{name} in {label}"), v);
        }
        Ok(())
    }

    fn hs_members(&mut self, class: ClassId) -> Result<(), TheoremError> {
        if self.weight_nonnegative("h", &self.sc.h)? {
            let spec = ConvexityClassSpec::new(class, Some(self.sc.h.clone()), Some(self.sc.s))?;
            self.member(&format!("{class}(h, s)"), &spec)?;
        }
        Ok(())
    }

    fn supermultiplicative(&mut self) -> Result<(), TheoremError> {
        let v = check_supermultiplicative(
            &self.sc.h,
            &self.sc.bindings(),
            Interval::unit(),
            &self.sc.plan,
        )?;
        self.out.insert("h super-multiplicative on [0,1]".into(), v);
        Ok(())
    }

    fn similarly_ordered(&mut self) -> Result<(), TheoremError> {
        let sc = self.sc;
        let v = check_similarly_ordered(&sc.f, sc.g(), &sc.bindings(), sc.interval, &sc.plan)?;
        self.out.insert("f, g similarly ordered".into(), v);
        Ok(())
    }
}

/// Runs the sampling checks for every hypothesis `id` states, keyed by a
/// readable hypothesis name.
///
/// The weights are always checked for nonnegativity first; class membership
/// against a weight that takes negative values is not checked.
pub fn check_hypotheses(
    id: TheoremId,
    sc: &Scenario,
) -> Result<BTreeMap<String, Verdict>, TheoremError> {
    let mut c = Checker {
        sc,
        out: Results::new(),
    };
    match id {
        TheoremId::HhBaseline => {
            let v = check_class(
                &sc.f,
                &ConvexityClassSpec::ordinary_convex(),
                sc.interval,
                &sc.plan,
            )?;
            c.out.insert("f in ORDINARY_CONVEX".into(), v);
        }
        TheoremId::SarikayaProduct => {
            let h1_ok = c.weight_nonnegative("h1", &sc.h)?;
            let h2_ok = c.weight_nonnegative("h2", sc.h2())?;
            if h1_ok {
                let spec = ConvexityClassSpec::h_convex(sc.h.clone());
                let v = check_class(&sc.f, &spec, sc.interval, &sc.plan)?;
                c.out.insert("f in H_CONVEX(h1)".into(), v);
            }
            if h2_ok {
                let spec = ConvexityClassSpec::h_convex(sc.h2().clone());
                let v = check_class(sc.g(), &spec, sc.interval, &sc.plan)?;
                c.out.insert("g in H_CONVEX(h2)".into(), v);
            }
        }
        TheoremId::T1 | TheoremId::T1CorA | TheoremId::T1CorB | TheoremId::T1CorMid => {
            c.hs_members(ClassId::Hs1)?;
        }
        TheoremId::T2 | TheoremId::T2CorA | TheoremId::T2CorB | TheoremId::T2CorMid => {
            c.hs_members(ClassId::Hs2)?;
        }
        TheoremId::T3 => {
            c.hs_members(ClassId::Hs1)?;
            c.supermultiplicative()?;
        }
        TheoremId::T3Remark => {
            let spec = ConvexityClassSpec::hs1(Expr::identity("t"), 1.0)?;
            c.member("HS1(t, 1)", &spec)?;
        }
        TheoremId::T4Sum
        | TheoremId::T4Square
        | TheoremId::T5
        | TheoremId::T6a
        | TheoremId::T6b
        | TheoremId::T7 => {
            c.hs_members(ClassId::Hs2)?;
            c.supermultiplicative()?;
            c.similarly_ordered()?;
        }
        TheoremId::T6RemarkA | TheoremId::T6RemarkB => {
            let spec = ConvexityClassSpec::hs2(Expr::identity("t"), sc.s)?;
            c.member("HS2(t, s)", &spec)?;
            c.similarly_ordered()?;
        }
    }
    Ok(c.out)
}
