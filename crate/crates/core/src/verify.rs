//! The self-verification battery.
//!
//! Ten named checks exercise the closed-form families, the boundary
//! projections, and the supporting linear algebra on seeded random data.
//! The battery is deterministic: every random draw comes from the
//! configured seed, checks run in a fixed order, and the report lists
//! them sorted by name, so identical `(seed, tolerance)` inputs produce
//! byte-identical reports.  Changing the seed changes the sampled points
//! but must never change a verdict.
//!
//! Float comparisons honor the configured tolerance; exact-backend checks
//! ignore it.  A check that hits a library error reports a failure
//! carrying the error name instead of aborting the battery.

use serde::Serialize;

use crate::case1111::{
    direction_with_backend, sp4, type1_closed_forms, type1_direction, type1_p_tilde_matrix,
    type2_closed_forms, type2_direction, type2_p_tilde_matrix, classify_1111, FamilyPoint,
    NilType, Schedule, Type1Param, Type2Param,
};
use crate::cyclespace::{
    boundary_cycle, f_tilde, gamma_act, in_cycle_space, p_even, p_odd, period_matrix, zeta,
    CycleLocation, SatakePoint,
};
use crate::degeneration::{
    classify_parity, deligne_bigrading, r_split_delta, sl2_complete, weight_filtration,
    x_action_check, NilDirection, Parity,
};
use crate::sampling::Sampler;
use crate::Result;
use crate::symplin::{subspace_close, Backend, Mat, Scalar, Subspace};

/// Convergence bound pinned for the continuity check: the last five
/// deviations of every lawful schedule must stay below this.
pub const CONTINUITY_BOUND: f64 = 1e-6;

/// Number of seeded parameter draws per family.
const FAMILY_POINTS: usize = 50;

/// Settings of one battery run.
#[derive(Clone, Copy, Debug)]
pub struct BatteryConfig {
    /// Seed for every random draw.
    pub seed: u64,
    /// Float comparison tolerance; also installed as the thread tolerance
    /// for the duration of the run.
    pub tolerance: f64,
}

impl Default for BatteryConfig {
    fn default() -> Self {
        BatteryConfig {
            seed: 0,
            tolerance: crate::tol::DEFAULT_EPS,
        }
    }
}

/// Outcome of a single named check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// Number of sampled cases the check examined.
    pub cases: usize,
    /// Largest numeric residual observed across all cases (0 for purely
    /// exact or purely structural checks).
    pub max_deviation: f64,
    /// Empty on success; otherwise a short description of the first
    /// failure and the failure count.
    pub detail: String,
}

/// Outcome of a full battery run, checks sorted by name.
#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub seed: u64,
    pub tolerance: f64,
    pub passed: bool,
    pub checks: Vec<CheckResult>,
}

impl BatteryReport {
    pub fn all_passed(&self) -> bool {
        self.passed
    }

    /// One line per check: "PASS name (cases, max deviation)" or
    /// "FAIL name: detail".
    pub fn render_lines(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            if c.passed {
                out.push_str(&format!(
                    "PASS {} ({} cases, max deviation {:.3e})\n",
                    c.name, c.cases, c.max_deviation
                ));
            } else {
                out.push_str(&format!("FAIL {}: {}\n", c.name, c.detail));
            }
        }
        out
    }
}

/// Run every check with the given settings.
pub fn run_battery(cfg: &BatteryConfig) -> BatteryReport {
    crate::tol::with_eps(cfg.tolerance, || {
        let mut checks = vec![
            check_closed_forms_even(cfg),
            check_closed_forms_odd(cfg),
            check_x_action_disk(cfg),
            check_boundary_cycle_closure(cfg),
            check_projection_well_defined(cfg),
            check_zeta_factorization(cfg),
            check_gamma_equivariance(cfg),
            check_continuity_schedules(cfg),
            check_classification_conjugation(cfg),
            check_linear_algebra_core(cfg),
        ];
        checks.sort_by(|a, b| a.name.cmp(b.name));
        let passed = checks.iter().all(|c| c.passed);
        BatteryReport {
            seed: cfg.seed,
            tolerance: cfg.tolerance,
            passed,
            checks,
        }
    })
}

// ---------------------------------------------------------------------------
// Check plumbing.

/// Mutable scratch state a check body accumulates into.
struct Ctx {
    cases: usize,
    failures: usize,
    max_dev: f64,
    first_failure: String,
}

impl Ctx {
    fn new() -> Ctx {
        Ctx {
            cases: 0,
            failures: 0,
            max_dev: 0.0,
            first_failure: String::new(),
        }
    }

    /// Record a numeric residual.
    fn dev(&mut self, d: f64) {
        if d.is_nan() || d > self.max_dev {
            self.max_dev = d;
        }
    }

    /// Record one pass/fail case; the message closure is only evaluated on
    /// the first failure.
    fn case(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_empty() {
                self.first_failure = msg();
            }
        }
    }
}

fn run_check(name: &'static str, body: impl FnOnce(&mut Ctx) -> Result<()>) -> CheckResult {
    let mut ctx = Ctx::new();
    let outcome = body(&mut ctx);
    match outcome {
        Ok(()) => CheckResult {
            name,
            passed: ctx.failures == 0,
            cases: ctx.cases,
            max_deviation: ctx.max_dev,
            detail: if ctx.failures == 0 {
                String::new()
            } else {
                format!("{}/{} cases failed; first: {}", ctx.failures, ctx.cases, ctx.first_failure)
            },
        },
        Err(e) => CheckResult {
            name,
            passed: false,
            cases: ctx.cases,
            max_deviation: ctx.max_dev,
            detail: format!("error {}: {}", e.name(), e),
        },
    }
}

/// The seeded even-family parameter stream of a check.
fn even_points(cfg: &BatteryConfig, salt: u64) -> (Sampler, Vec<Type1Param>) {
    let mut s = Sampler::new(cfg.seed.wrapping_add(salt));
    let pts = (0..FAMILY_POINTS).map(|_| s.type1()).collect();
    (s, pts)
}

/// The seeded odd-family parameter stream of a check.
fn odd_points(s: &mut Sampler) -> Vec<Type2Param> {
    (0..FAMILY_POINTS).map(|_| s.type2()).collect()
}

/// A sampled orbit parameter with positive imaginary part.
fn upper_half_z(s: &mut Sampler) -> Scalar {
    Scalar::gauss(s.int_in(-2, 2), 2, s.int_in(1, 8), 4)
}

/// The complexified image of a direction, as a subspace.
fn image_of(n: &NilDirection) -> Result<Subspace> {
    let backend = n.mat().backend();
    n.space().full_subspace(backend).image(n.mat())
}

// ---------------------------------------------------------------------------
// 1. Even-family closed forms against the general pipeline (exact).

fn check_closed_forms_even(cfg: &BatteryConfig) -> CheckResult {
    run_check("closed_forms_even", |ctx| {
        let (mut s, pts) = even_points(cfg, 0x01);
        let n = type1_direction();
        let im_n = image_of(&n)?;
        for p in &pts {
            let d = type1_closed_forms(p);
            let rs = r_split_delta(&n, &d.f)?;
            ctx.case(d.f_hat == rs.f_hat, || "splitting partner differs".into());
            let want_delta = n.mat().scale(&-(&(&d.gamma * &p.w().im_part())));
            ctx.case(rs.delta.sub(&want_delta).is_zero(), || {
                "splitting operator differs".into()
            });
            let big = deligne_bigrading(&weight_filtration(&n), &d.f)?;
            let level0 = big.piece(0, 0);
            ctx.case(level0.dim() == 1 && level0.contains_vec(&d.e_gen), || {
                "level-0 generator differs".into()
            });
            let sat = p_even(&n, &d.f)?;
            ctx.case(sat.u().equals(&d.p_even_subspace), || {
                "even projection differs".into()
            });
            ctx.case(sat.core().equals(&im_n), || "projection core differs".into());
            let orbit = f_tilde(&n, &d.f_hat, Parity::Even)?;
            let span = sp4().span(d.f_tilde_basis.clone())?;
            ctx.case(orbit.f0().equals(&span), || "orbit zero piece differs".into());
            let z = upper_half_z(&mut s);
            let closed = type1_p_tilde_matrix(p, &z)?;
            let tau = period_matrix(&orbit.f0().image(&n.exp_scaled(&z))?)?;
            ctx.case(tau.sub(&closed).is_zero(), || "period matrix differs".into());
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 2. Odd-family closed forms against the general pipeline (float).

fn check_closed_forms_odd(cfg: &BatteryConfig) -> CheckResult {
    run_check("closed_forms_odd", |ctx| {
        let mut s = Sampler::new(cfg.seed.wrapping_add(0x02));
        let pts = odd_points(&mut s);
        let tol = cfg.tolerance;
        for p in &pts {
            let d = type2_closed_forms(p);
            let n = direction_with_backend(&type2_direction(p.m()), Backend::Float);
            let im_n = image_of(&n)?;
            let rs = r_split_delta(&n, &d.f)?;
            for piece in (d.f.p_min()..=d.f.p_max()).rev() {
                ctx.case(
                    subspace_close(&d.f_hat.piece(piece), &rs.f_hat.piece(piece), tol),
                    || format!("splitting partner differs in piece {piece}"),
                );
            }
            let big = deligne_bigrading(&weight_filtration(&n), &d.f_hat)?;
            let up = big.piece(1, -1);
            ctx.case(up.dim() == 1 && up.contains_vec(&d.xi_hat), || {
                "upper generator differs".into()
            });
            let down = big.piece(-1, 1);
            ctx.case(down.dim() == 1 && down.contains_vec(&d.omega_hat), || {
                "lower generator differs".into()
            });
            let sat = p_odd(&n, &d.f)?;
            ctx.case(sat.u().equals(&d.p_odd_subspace), || {
                "odd projection differs".into()
            });
            ctx.case(sat.core().equals(&im_n), || "projection core differs".into());
            let orbit = f_tilde(&n, &d.f_hat, Parity::Odd)?;
            let span = sp4().span(d.xi_hat.hcat(&d.omega_hat))?;
            ctx.case(orbit.f0().equals(&span), || "orbit zero piece differs".into());
            let z = upper_half_z(&mut s).to_float();
            let closed = type2_p_tilde_matrix(p, &z)?;
            let tau = period_matrix(&orbit.f0().image(&n.exp_scaled(&z))?)?;
            let dev = tau.sub(&closed).max_abs();
            ctx.dev(dev);
            ctx.case(dev <= tol, || format!("period matrix off by {dev:.3e}"));
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 3. Rotation-action identities on the unit disk.

fn check_x_action_disk(cfg: &BatteryConfig) -> CheckResult {
    run_check("x_action_disk", |ctx| {
        let (mut s, even) = even_points(cfg, 0x03);
        let odd = odd_points(&mut s);
        let zs: Vec<Scalar> = (0..FAMILY_POINTS).map(|_| s.unit_disk(16)).collect();
        let zs_float: Vec<Scalar> = zs.iter().map(|z| z.to_float()).collect();
        let n_even = type1_direction();
        for p in &even {
            let d = type1_closed_forms(p);
            match sl2_complete(&n_even, &d.f_hat)
                .and_then(|sl2| x_action_check(&sl2, &n_even, &d.f_hat, &zs))
            {
                Ok(rep) => {
                    ctx.dev(rep.max_deviation);
                    ctx.case(rep.holds(), || "identity failed on even point".into());
                }
                Err(e) => ctx.case(false, || format!("even point error {}", e.name())),
            }
        }
        for p in &odd {
            let d = type2_closed_forms(p);
            let n = direction_with_backend(&type2_direction(p.m()), Backend::Float);
            match sl2_complete(&n, &d.f_hat)
                .and_then(|sl2| x_action_check(&sl2, &n, &d.f_hat, &zs_float))
            {
                Ok(rep) => {
                    ctx.dev(rep.max_deviation);
                    ctx.case(rep.holds(), || "identity failed on odd point".into());
                }
                Err(e) => ctx.case(false, || format!("odd point error {}", e.name())),
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 4. Boundary cycles land on the closure with the right kernel.

fn check_boundary_cycle_closure(cfg: &BatteryConfig) -> CheckResult {
    run_check("boundary_cycle_closure", |ctx| {
        let (mut s, even) = even_points(cfg, 0x04);
        let odd = odd_points(&mut s);
        let n_even = type1_direction();
        let im_even = image_of(&n_even)?;
        for p in &even {
            let d = type1_closed_forms(p);
            let c = boundary_cycle(&n_even, &d.f)?;
            ctx.case(in_cycle_space(&c) == CycleLocation::Closure, || {
                format!("even cycle sits {}", in_cycle_space(&c))
            });
            ctx.case(c.v().hermitian_kernel().equals(&im_even), || {
                "even kernel is not the image of the direction".into()
            });
        }
        for p in &odd {
            let d = type2_closed_forms(p);
            let n = direction_with_backend(&type2_direction(p.m()), Backend::Float);
            let im_n = image_of(&n)?;
            let c = boundary_cycle(&n, &d.f)?;
            ctx.case(in_cycle_space(&c) == CycleLocation::Closure, || {
                format!("odd cycle sits {}", in_cycle_space(&c))
            });
            ctx.case(c.w().hermitian_kernel().equals(&im_n), || {
                "odd kernel is not the image of the direction".into()
            });
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 5. The projections are constant along the orbit and under rescaling.

fn check_projection_well_defined(cfg: &BatteryConfig) -> CheckResult {
    run_check("projection_well_defined", |ctx| {
        let mut s = Sampler::new(cfg.seed.wrapping_add(0x05));
        let p1 = s.type1();
        let p2 = s.type2();
        let shifts: Vec<Scalar> = (0..20).map(|_| s.gauss(3, 3)).collect();
        let scales: Vec<Scalar> = (0..20).map(|_| s.positive_rational(6)).collect();

        let n_even = type1_direction();
        let d1 = type1_closed_forms(&p1);
        let ref_even = p_even(&n_even, &d1.f)?;
        let n_odd = direction_with_backend(&type2_direction(p2.m()), Backend::Float);
        let d2 = type2_closed_forms(&p2);
        let ref_odd = p_odd(&n_odd, &d2.f)?;

        for c in &shifts {
            let moved = d1.f.apply(&n_even.exp_scaled(c))?;
            ctx.case(p_even(&n_even, &moved)?.equals(&ref_even), || {
                "even projection moved along the orbit".into()
            });
            let moved = d2.f.apply(&n_odd.exp_scaled(&c.to_float()))?;
            ctx.case(p_odd(&n_odd, &moved)?.equals(&ref_odd), || {
                "odd projection moved along the orbit".into()
            });
        }
        for lam in &scales {
            let scaled = NilDirection::new(n_even.space().clone(), n_even.mat().scale(lam))?;
            ctx.case(p_even(&scaled, &d1.f)?.equals(&ref_even), || {
                "even projection changed under rescaling".into()
            });
            let scaled = NilDirection::new(n_odd.space().clone(), n_odd.mat().scale(&lam.to_float()))?;
            ctx.case(p_odd(&scaled, &d2.f)?.equals(&ref_odd), || {
                "odd projection changed under rescaling".into()
            });
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 6. The two-step collapse factors the direct projections.

fn check_zeta_factorization(cfg: &BatteryConfig) -> CheckResult {
    run_check("zeta_factorization", |ctx| {
        let (mut s, even) = even_points(cfg, 0x06);
        let odd = odd_points(&mut s);
        let n_even = type1_direction();
        for p in &even {
            let d = type1_closed_forms(p);
            let via_orbit = zeta(&f_tilde(&n_even, &d.f, Parity::Even)?)?;
            let direct = p_even(&n_even, &d.f)?;
            ctx.case(via_orbit.equals(&direct), || {
                "even factorization differs".into()
            });
        }
        for p in &odd {
            let d = type2_closed_forms(p);
            let n = direction_with_backend(&type2_direction(p.m()), Backend::Float);
            let via_orbit = zeta(&f_tilde(&n, &d.f, Parity::Odd)?)?;
            let direct = p_odd(&n, &d.f)?;
            ctx.case(via_orbit.equals(&direct), || "odd factorization differs".into());
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 7. Equivariance under integral symplectic substitutions.

fn check_gamma_equivariance(cfg: &BatteryConfig) -> CheckResult {
    run_check("gamma_equivariance", |ctx| {
        let mut s = Sampler::new(cfg.seed.wrapping_add(0x07));
        let p1 = s.type1();
        let p2 = s.type2();
        let gs: Vec<Mat> = (0..20).map(|_| s.symplectic(6)).collect();

        let n_even = type1_direction();
        let d1 = type1_closed_forms(&p1);
        let ref_even = p_even(&n_even, &d1.f)?;
        let n_odd = direction_with_backend(&type2_direction(p2.m()), Backend::Float);
        let d2 = type2_closed_forms(&p2);
        let ref_odd = p_odd(&n_odd, &d2.f)?;

        for g in &gs {
            let (n2, f2) = gamma_act(g, &n_even, &d1.f)?;
            let lhs = p_even(&n2, &f2)?;
            let rhs = SatakePoint::new(
                ref_even.u().image(g)?,
                ref_even.core().image(g)?,
                ref_even.conjugated(),
            )?;
            ctx.case(lhs.equals(&rhs), || "even projection not equivariant".into());
            ctx.case(classify_parity(&n2, &f2)? == Parity::Even, || {
                "even parity not preserved by substitution".into()
            });

            let (n2, f2) = gamma_act(g, &n_odd, &d2.f)?;
            let lhs = p_odd(&n2, &f2)?;
            let rhs = SatakePoint::new(
                ref_odd.u().image(g)?,
                ref_odd.core().image(g)?,
                ref_odd.conjugated(),
            )?;
            ctx.case(lhs.equals(&rhs), || "odd projection not equivariant".into());
            ctx.case(classify_parity(&n2, &f2)? == Parity::Odd, || {
                "odd parity not preserved by substitution".into()
            });
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 8. Lawful continuity schedules converge for both families.

fn check_continuity_schedules(_cfg: &BatteryConfig) -> CheckResult {
    run_check("continuity_schedules", |ctx| {
        // Real `w` keeps every schedule lawful from the first step on.
        let even = FamilyPoint::TypeI(Type1Param::new(
            Scalar::gauss(0, 1, -1, 1),
            Scalar::from_int(1),
        )?);
        let odd = FamilyPoint::TypeII(Type2Param::new(
            2,
            crate::case1111::SignChoice::Plus,
            Scalar::from_int(1),
        )?);
        for base in [&even, &odd] {
            for n_exp in 1..=3u32 {
                // Start the walk at radius 2^-6: the transported deviation
                // scales like |z| * log radius, so the shallow first octaves
                // sit above the convergence bound by construction and tell
                // us nothing about the limit.
                let schedule = Schedule::new(n_exp, n_exp, 25)?.with_start(6)?;
                match crate::case1111::continuity_experiment(base, &schedule, CONTINUITY_BOUND) {
                    Ok(report) => {
                        let tail = &report.deviations[report.deviations.len().saturating_sub(5)..];
                        let tail_max = tail.iter().cloned().fold(0.0, f64::max);
                        ctx.dev(tail_max);
                        ctx.case(report.converged && tail_max < CONTINUITY_BOUND, || {
                            format!("schedule t^{n_exp} tail deviation {tail_max:.3e}")
                        });
                    }
                    Err(e) => ctx.case(false, || {
                        format!("schedule t^{n_exp} aborted with {}", e.name())
                    }),
                }
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 9. Classification of rank-one directions is conjugation-invariant.

fn check_classification_conjugation(cfg: &BatteryConfig) -> CheckResult {
    run_check("classification_conjugation", |ctx| {
        let mut s = Sampler::new(cfg.seed.wrapping_add(0x09));
        let reps = [
            (type1_direction(), NilType::I),
            (type2_direction(1), NilType::II),
            (type2_direction(3), NilType::II),
            (crate::case1111::type3_direction(), NilType::III),
        ];
        for (n, want) in &reps {
            ctx.case(classify_1111(n) == *want, || {
                format!("representative classified as {}", classify_1111(n))
            });
        }
        for _ in 0..FAMILY_POINTS {
            let g = s.symplectic(6);
            for (n, want) in &reps {
                let moved = n.conjugated(&g)?;
                ctx.case(classify_1111(&moved) == *want, || {
                    format!("conjugate classified as {}", classify_1111(&moved))
                });
            }
        }
        Ok(())
    })
}

// ---------------------------------------------------------------------------
// 10. Core linear-algebra properties, exact and float in lockstep.

fn check_linear_algebra_core(cfg: &BatteryConfig) -> CheckResult {
    run_check("linear_algebra_core", |ctx| {
        let mut s = Sampler::new(cfg.seed.wrapping_add(0x0a));
        let space = sp4();
        for _ in 0..200 {
            let da = s.int_in(1, 3) as usize;
            let db = s.int_in(1, 3) as usize;
            let a = space.span(s.matrix(4, da, 3, 2))?;
            let b = space.span(s.matrix(4, db, 3, 2))?;

            // Orthogonal complement: involution and dimension formula.
            let perp = a.perp();
            ctx.case(perp.perp().equals(&a), || "perp involution failed".into());
            ctx.case(a.dim() + perp.dim() == 4, || {
                format!("perp dimensions {} + {}", a.dim(), perp.dim())
            });

            // Intersection/sum dimension formula.
            let inter = a.intersect(&b)?;
            let sum = a.sum(&b)?;
            ctx.case(inter.dim() + sum.dim() == a.dim() + b.dim(), || {
                "modular dimension formula failed".into()
            });

            // Signature does not depend on the spanning basis.
            if a.dim() > 0 {
                let coeff = invertible_coeff(&mut s, a.dim());
                let g1 = hermitian_gram(&a.basis());
                let g2 = hermitian_gram(&a.basis().mul(&coeff));
                ctx.case(
                    g1.hermitian_signature() == g2.hermitian_signature(),
                    || "signature changed under base change".into(),
                );
            }

            // Exact and float backends agree on ranks and pairings.
            let (af, bf) = (a.to_float(), b.to_float());
            let inter_f = af.intersect(&bf)?;
            let sum_f = af.sum(&bf)?;
            ctx.case(
                inter_f.dim() == inter.dim() && sum_f.dim() == sum.dim(),
                || "float ranks disagree with exact ranks".into(),
            );
            let gram_exact = space.form_gram(&a.basis(), &b.basis()).to_float();
            let gram_float = space.form_gram(&af.basis(), &bf.basis());
            // Both backends echelonize to the same canonical columns, so
            // the pairings must match entry by entry up to rounding.
            let dev = gram_exact.sub(&gram_float).max_abs();
            ctx.dev(dev);
            ctx.case(dev <= cfg.tolerance.max(1e-12), || {
                format!("pairing gram off by {dev:.3e}")
            });
        }
        Ok(())
    })
}

/// The Hermitian pairing matrix `-i * B^T Q conj(B)` of a column set.
fn hermitian_gram(basis: &Mat) -> Mat {
    let g = sp4().form_gram(basis, &basis.conj());
    g.scale(&-&Scalar::i_unit(g.backend()))
}

/// A random exact invertible `k x k` coefficient matrix.
fn invertible_coeff(s: &mut Sampler, k: usize) -> Mat {
    loop {
        let c = s.matrix(k, k, 2, 2);
        if !c.det().is_zero() {
            return c;
        }
    }
}
