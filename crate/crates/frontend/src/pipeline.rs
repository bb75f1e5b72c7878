//! Staged execution of the checks on a model.

use std::collections::BTreeSet;

use vtc_core::forms::{commutator, d};
use vtc_core::grading::{find_homogenizer, EulerField, Homogenizer, HomogenizerBounds};
use vtc_core::symplectic::{
    bracket, check_master, descend, hamiltonian_field, DescentRoute, GaugeSystem, MasterCheck, PresympStructure,
};
use vtc_core::variational::equiv_mod_d;
use vtc_core::{Frame, Rational};

use crate::error::StageError;
use crate::model::{Model, P};
use crate::report::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Stage {
    CheckMaster,
    Descend,
    Current,
    Reduce,
    Brackets,
    Homogenize,
}

impl Stage {
    pub const ALL: [Stage; 6] =
        [Stage::CheckMaster, Stage::Descend, Stage::Current, Stage::Reduce, Stage::Brackets, Stage::Homogenize];

    pub fn name(self) -> &'static str {
        match self {
            Stage::CheckMaster => "check-master",
            Stage::Descend => "descend",
            Stage::Current => "current",
            Stage::Reduce => "reduce",
            Stage::Brackets => "brackets",
            Stage::Homogenize => "homogenize",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Options {
    /// Number of descents; `None` iterates until the descendant is trivial
    /// or the horizontal degree runs out.
    pub steps: Option<usize>,
}

/// Intermediate results shared between stages, computed on demand.
struct Run<'m> {
    m: &'m Model,
    sys: Option<GaugeSystem<Rational>>,
    master: Option<MasterCheck<Rational>>,
    chain: Vec<(GaugeSystem<Rational>, DescentRoute, bool)>,
    leaf: Option<Leaf>,
    hom: Option<Homogenizer<Rational>>,
}

struct Leaf {
    frame: Frame,
    omega: P,
    st: PresympStructure<Rational>,
    charge: P,
}

type SResult<T> = Result<T, StageError>;

trait At<T> {
    fn at(self, stage: Stage) -> SResult<T>;
}

impl<T, E: std::fmt::Display> At<T> for Result<T, E> {
    fn at(self, stage: Stage) -> SResult<T> {
        self.map_err(|e| StageError::new(stage.name(), e))
    }
}

impl<'m> Run<'m> {
    fn system(&mut self) -> SResult<&GaugeSystem<Rational>> {
        if self.sys.is_none() {
            let o = self.m.densities[&self.m.master].clone();
            let sys = GaugeSystem::from_hamiltonian(o, self.m.structure.clone()).at(Stage::CheckMaster)?;
            self.sys = Some(sys);
        }
        Ok(self.sys.as_ref().expect("set"))
    }

    fn master(&mut self) -> SResult<&MasterCheck<Rational>> {
        if self.master.is_none() {
            let sys = self.system()?.clone();
            let mc = check_master(&sys.h, &sys.omega).at(Stage::CheckMaster)?;
            self.master = Some(mc);
        }
        Ok(self.master.as_ref().expect("set"))
    }

    /// Extends the descent chain to `k` levels below the input.
    fn descend_to(&mut self, k: usize) -> SResult<()> {
        while self.chain.len() < k {
            let prev = match self.chain.last() {
                Some((s, _, _)) => s.clone(),
                None => self.system()?.clone(),
            };
            let dsc = descend(&prev).at(Stage::Descend)?;
            self.chain.push((dsc.system, dsc.route, dsc.cross_checked));
        }
        Ok(())
    }

    fn first(&mut self) -> SResult<GaugeSystem<Rational>> {
        self.descend_to(1)?;
        Ok(self.chain[0].0.clone())
    }

    fn leaf(&mut self) -> SResult<&Leaf> {
        if self.leaf.is_none() {
            let leaves = self
                .m
                .leaves
                .as_ref()
                .ok_or_else(|| StageError::new(Stage::Reduce.name(), "the model declares no foliation"))?;
            let s1 = self.first()?;
            let omega = leaves.ctx.reduce(&s1.omega.omega).at(Stage::Reduce)?;
            let frame = leaves.ctx.spatial_frame().clone();
            let st = PresympStructure::new(omega.clone(), frame.clone()).at(Stage::Reduce)?;
            let charge = leaves.ctx.reduce(&s1.h).at(Stage::Reduce)?;
            self.leaf = Some(Leaf { frame, omega, st, charge });
        }
        Ok(self.leaf.as_ref().expect("set"))
    }

    fn homogenizer(&mut self) -> SResult<&Homogenizer<Rational>> {
        if self.hom.is_none() {
            let (omega, frame) = {
                let l = self.leaf()?;
                (l.omega.clone(), l.frame.clone())
            };
            let em = EulerField::momentum(&self.m.sp);
            let h = find_homogenizer(&omega, &em, &self.m.sp, &frame, HomogenizerBounds::default())
                .at(Stage::Homogenize)?;
            self.hom = Some(h);
        }
        Ok(self.hom.as_ref().expect("set"))
    }
}

/// Runs the selected stages in order; prerequisites are computed but only
/// selected stages are recorded.
pub fn run_pipeline(m: &Model, stages: &BTreeSet<Stage>, opts: &Options) -> SResult<Report> {
    let mut report = Report::default();
    if stages.is_empty() {
        return Ok(report);
    }
    report.model = Some(m.name.clone());
    let sp = &m.sp;
    let ex = |p: &P| ExprOut::new(p, sp);
    let mut run = Run { m, sys: None, master: None, chain: vec![], leaf: None, hom: None };

    if stages.contains(&Stage::CheckMaster) {
        let st = m.structure.clone();
        let o = m.densities[&m.master].clone();
        let q = hamiltonian_field(&o, &st).at(Stage::CheckMaster)?;
        let homological = commutator(&q, &q).is_zero();
        let mc = run.master()?.clone();
        let residual = mc
            .residual
            .iter()
            .map(|(v, e)| FieldValue {
                component: if v.comp == u32::MAX { "field-free".into() } else { sp.gen_name(&vtc_core::Gen::Jet(v.clone())) },
                value: ex(e),
            })
            .collect();
        report.master = Some(MasterReport {
            ok: mc.ok,
            homological,
            q: field_values(&q, sp),
            sigma: mc.sigma.as_ref().map(ex),
            residual,
        });
    }

    if stages.contains(&Stage::Descend) {
        let f = &m.frame;
        let cap = opts.steps.unwrap_or(m.frame.top() as usize);
        let sys0 = run.system()?.clone();
        let mut out = vec![DescendantReport {
            level: 0,
            omega: ex(&sys0.omega.omega),
            hamiltonian: ex(&sys0.h),
            route: "input".into(),
            cross_checked: false,
            closed: sys0.check().at(Stage::Descend)?,
            trivial: sys0.omega.omega.is_zero(),
        }];
        for k in 1..=cap {
            if out.last().is_some_and(|d| d.trivial) {
                break;
            }
            run.descend_to(k)?;
            let (s, route, cross) = run.chain[k - 1].clone();
            let trivial = equiv_mod_d(&s.omega.omega, &P::zero(), f).at(Stage::Descend)?;
            out.push(DescendantReport {
                level: k,
                omega: ex(&s.omega.omega),
                hamiltonian: ex(&s.h),
                route: match route {
                    DescentRoute::Potential => "potential",
                    DescentRoute::Homotopy => "homotopy",
                }
                .into(),
                cross_checked: cross,
                closed: equiv_mod_d(&vtc_core::forms::lie(&s.q, &s.omega.omega), &P::zero(), f).at(Stage::Descend)?,
                trivial,
            });
        }
        report.descendants = Some(out);
    }

    if stages.contains(&Stage::Current) {
        let j = run.first()?.h;
        let mc = run.master()?.clone();
        let sys = run.system()?.clone();
        let cross = match &mc.sigma {
            Some(sigma) => {
                let hh = bracket(&sys.h, &sys.h, &sys.omega).at(Stage::Current)?;
                let half = -vtc_core::q(1, 2);
                d(sigma, &m.frame) == hh.scale(&half) && equiv_mod_d(&j, sigma, &m.frame).at(Stage::Current)?
            }
            None => false,
        };
        report.current = Some(CurrentReport { current: ex(&j), cross_check: cross });
    }

    if stages.contains(&Stage::Reduce) {
        let l = run.leaf()?;
        let jj = bracket(&l.charge, &l.charge, &l.st).at(Stage::Reduce)?;
        let closed = equiv_mod_d(&jj, &P::zero(), &l.frame).at(Stage::Reduce)?;
        report.reduction = Some(ReductionReport { omega: ex(&l.omega), charge_density: ex(&l.charge), charge_closed: closed });
    }

    if stages.contains(&Stage::Brackets) {
        report.brackets = Some(brackets(&mut run)?);
    }

    if stages.contains(&Stage::Homogenize) {
        let charge = run.leaf()?.charge.clone();
        let frame = run.leaf()?.frame.clone();
        let h = run.homogenizer()?;
        let certificate = equiv_mod_d(&h.pulled, &h.leading, &frame).at(Stage::Homogenize)?;
        let pulled = h.diffeo.pullback(&charge).at(Stage::Homogenize)?;
        report.homogenizer = Some(HomogenizerReport {
            generator: field_values(h.diffeo.generator(), sp),
            leading: ex(&h.leading),
            certificate,
            pulled_charge: ex(&pulled),
        });
    }
    Ok(report)
}

/// Test functions for the current algebra: polynomials in the leaf
/// coordinates, cycled over the algebra components.
fn test_functions(dim: usize, time: u8, space: u8) -> Vec<(Vec<P>, Vec<P>)> {
    let x = P::coord(space);
    let t = P::coord(time);
    let cyc = |pat: Vec<P>| (0..dim).map(|i| pat[i % pat.len()].clone()).collect::<Vec<_>>();
    vec![
        (cyc(vec![x.clone(), P::one(), x.mul(&x)]), cyc(vec![P::one(), x.mul(&x).mul(&x), x.clone()])),
        (cyc(vec![t.mul(&x), x.mul(&x), P::zero()]), cyc(vec![x.clone(), P::one(), &x + &t])),
    ]
}

fn brackets(run: &mut Run) -> SResult<Vec<BracketReport>> {
    let m = run.m;
    let leaves = m
        .leaves
        .as_ref()
        .ok_or_else(|| StageError::new(Stage::Brackets.name(), "the model declares no foliation"))?;
    let ex = |p: &P| ExprOut::new(p, &m.sp);
    let mut out = Vec::new();
    if let Some(h) = &leaves.energy {
        let l = run.leaf()?;
        let hb = leaves.ctx.reduce(&m.densities[h]).at(Stage::Brackets)?;
        let v = bracket(&hb, &l.charge, &l.st).at(Stage::Brackets)?;
        let ok = equiv_mod_d(&v, &P::zero(), &l.frame).at(Stage::Brackets)?;
        out.push(BracketReport { name: format!("{{{h},J0}}"), value: ex(&v), expected: ex(&P::zero()), ok });
    }
    if let Some(a) = &leaves.affine {
        let alg = m.algebra.as_ref().expect("affine fields are algebra valued");
        let comps: Vec<P> = m
            .algebra_field(a)
            .at(Stage::Brackets)?
            .iter()
            .map(|c| leaves.ctx.reduce(c))
            .collect::<Result<_, _>>()
            .at(Stage::Brackets)?;
        let charge = run.leaf()?.charge.clone();
        let frame = run.leaf()?.frame.clone();
        let h = run.homogenizer()?;
        let sigma = h.diffeo.pullback(&charge).at(Stage::Brackets)?;
        let st = PresympStructure::new(h.leading.clone(), frame.clone()).at(Stage::Brackets)?;
        let central = leaves.central.clone().unwrap_or_default();
        let space = frame.dirs()[0];
        let time = leaves.ctx.time_directions()[0];
        let phi = |e: &[P]| alg.pair(e, &comps);
        for (n, (e1, e2)) in test_functions(alg.dim as usize, time, space).into_iter().enumerate() {
            let inner = bracket(&phi(&e2), &sigma, &st).at(Stage::Brackets)?;
            let v = bracket(&phi(&e1), &inner, &st).at(Stage::Brackets)?;
            let de2: Vec<P> = e2.iter().map(|p| d(p, &frame)).collect();
            let expected = &phi(&alg.comm(&e1, &e2)) + &central.mul(&alg.pair(&e1, &de2));
            let ok = equiv_mod_d(&v, &expected, &frame).at(Stage::Brackets)?;
            out.push(BracketReport { name: format!("{{{a}(e1),{a}(e2)}} #{}", n + 1), value: ex(&v), expected: ex(&expected), ok });
        }
    }
    Ok(out)
}

/// `{a, b}` with the covariant structure, or on leaves with the reduced
/// descendant structure after reducing both arguments.
pub fn bracket_of(m: &Model, a: &P, b: &P, foliated: bool) -> SResult<P> {
    if !foliated {
        return bracket(a, b, &m.structure).at(Stage::Brackets);
    }
    let mut run = Run { m, sys: None, master: None, chain: vec![], leaf: None, hom: None };
    let ctx = &m
        .leaves
        .as_ref()
        .ok_or_else(|| StageError::new(Stage::Brackets.name(), "the model declares no foliation"))?
        .ctx;
    let (ra, rb) = (ctx.reduce(a).at(Stage::Brackets)?, ctx.reduce(b).at(Stage::Brackets)?);
    let l = run.leaf()?;
    bracket(&ra, &rb, &l.st).at(Stage::Brackets)
}
