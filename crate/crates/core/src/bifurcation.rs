//! The bifurcation equation `Delta = 0` as a quadratic in `t = eta^2`,
//! its roots, the region classification and the critical surfaces.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::params::{CouplingCase, LibrationPoint};
use crate::scalar::Scalar;

/// Quadratic part of `Delta` in the amplitudes, with `eta`-polynomial coefficients.
///
/// For the `x2z` and `y2z` couplings the nine coefficients are, in order,
/// the `eta^4` terms of `alpha1^2, alpha3^2`, the `eta^2` terms of
/// `alpha1^2, alpha2^2, alpha3^2`, and the `eta^0` terms of
/// `alpha1^2, alpha2^2, alpha3^2, e^2`. For `z2y` only the first five are
/// used: the `eta^2 alpha2^2` term and the `eta^0` terms of
/// `alpha1^2, alpha2^2, alpha3^2, e^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BifurcationForm<T> {
    pub case: CouplingCase,
    pub point: LibrationPoint,
    pub mu: T,
    pub coeffs: [T; 9],
    /// `Delta` at zero amplitude.
    pub constant: T,
}

/// Amplitudes at which the form is evaluated. `alpha3_sq` is signed: negative on the transit branch.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EvalPoint<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub alpha3_sq: T,
    pub e: T,
}

impl<T: Scalar> EvalPoint<T> {
    pub fn new(alpha1: T, alpha2: T, alpha3_sq: T, e: T) -> Self {
        EvalPoint { alpha1, alpha2, alpha3_sq, e }
    }
}

/// `(a, b, c)` with `Delta = a eta^4 + b eta^2 + c` at the given point.
pub fn quartic_at<T: Scalar>(form: &BifurcationForm<T>, pt: &EvalPoint<T>) -> Result<(T, T, T)> {
    let vals = [pt.alpha1, pt.alpha2, pt.alpha3_sq, pt.e];
    if vals.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("non-finite amplitude".into()));
    }
    let l = &form.coeffs;
    let a1 = pt.alpha1 * pt.alpha1;
    let a2 = pt.alpha2 * pt.alpha2;
    let a3 = pt.alpha3_sq;
    let e2 = pt.e * pt.e;
    Ok(match form.case {
        CouplingCase::XToZ | CouplingCase::YToZ => (
            l[0] * a1 + l[1] * a3,
            l[2] * a1 + l[3] * a2 + l[4] * a3,
            l[5] * a1 + l[6] * a2 + l[7] * a3 + l[8] * e2 + form.constant,
        ),
        CouplingCase::ZToY => (T::zero(), l[0] * a2, l[1] * a1 + l[2] * a2 + l[3] * a3 + l[4] * e2 + form.constant),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Root `t = eta^2` that is the smaller of the two quadratic roots (or the only root of a linear equation).
    SmallBranch,
    LargeBranch,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaRoot<T> {
    pub eta: T,
    pub branch: Branch,
}

/// Real nonzero roots of `a t^2 + b t + c` in `eta` with `t = eta^2 > 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EtaSolutions<T> {
    /// Sorted by branch, then by sign (negative first).
    pub roots: Vec<EtaRoot<T>>,
    /// Every `eta` solves the equation (`a = b = c = 0`).
    pub degenerate: bool,
}

impl<T: Scalar> EtaSolutions<T> {
    pub fn count(&self) -> usize {
        self.roots.len()
    }

    pub fn positive(&self) -> Vec<T> {
        let mut v: Vec<T> = self.roots.iter().map(|r| r.eta).filter(|&e| e > T::zero()).collect();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v
    }

    pub fn get(&self, branch: Branch, positive: bool) -> Option<T> {
        self.roots.iter().find(|r| r.branch == branch && (r.eta > T::zero()) == positive).map(|r| r.eta)
    }
}

/// Roots in `t` of `a t^2 + b t + c`, labelled by rank among the real roots.
fn t_roots<T: Scalar>(a: T, b: T, c: T) -> Vec<(T, Branch)> {
    let zero = T::zero();
    if a == zero {
        if b == zero {
            return vec![];
        }
        return vec![(-c / b, Branch::SmallBranch)];
    }
    let disc = b * b - T::lit(4.0) * a * c;
    if disc < zero {
        return vec![];
    }
    let sq = disc.sqrt();
    let qq = -(b + b.signum() * sq) / T::lit(2.0);
    let (r1, r2) = if qq == zero { (zero, zero) } else { (qq / a, c / qq) };
    let (lo, hi) = if r1 <= r2 { (r1, r2) } else { (r2, r1) };
    if disc == zero {
        return vec![(lo, Branch::SmallBranch)];
    }
    vec![(lo, Branch::SmallBranch), (hi, Branch::LargeBranch)]
}

pub fn solve_eta_from<T: Scalar>(a: T, b: T, c: T) -> EtaSolutions<T> {
    let zero = T::zero();
    if a == zero && b == zero && c == zero {
        return EtaSolutions { roots: vec![], degenerate: true };
    }
    let mut roots = Vec::new();
    for (t, branch) in t_roots(a, b, c) {
        if t > zero && t.is_finite() {
            let s = t.sqrt();
            roots.push(EtaRoot { eta: -s, branch });
            roots.push(EtaRoot { eta: s, branch });
        }
    }
    EtaSolutions { roots, degenerate: false }
}

pub fn solve_eta<T: Scalar>(form: &BifurcationForm<T>, pt: &EvalPoint<T>) -> Result<EtaSolutions<T>> {
    let (a, b, c) = quartic_at(form, pt)?;
    Ok(solve_eta_from(a, b, c))
}

/// Relative tolerance for deciding that a point lies on a critical surface.
pub const TIE_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of<T: Scalar>(v: T, scale: T) -> Sign {
        if v.abs() <= T::lit(TIE_TOL) * scale.max(T::one()) {
            Sign::Zero
        } else if v > T::zero() {
            Sign::Positive
        } else {
            Sign::Negative
        }
    }
}

/// The three surfaces across which the number of real `eta` can change.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Surface {
    /// `c = 0`: one root `t` passes through zero.
    C,
    /// `a = 0`: one root `t` escapes to infinity.
    A,
    /// `b^2 - 4ac = 0`: two roots `t` merge.
    Disc,
}

impl Surface {
    pub const ALL: [Surface; 3] = [Surface::C, Surface::A, Surface::Disc];

    pub fn label(self) -> &'static str {
        match self {
            Surface::C => "c=0",
            Surface::A => "a=0",
            Surface::Disc => "disc=0",
        }
    }
}

impl std::fmt::Display for Surface {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

impl std::str::FromStr for Surface {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c" | "c=0" => Ok(Surface::C),
            "a" | "a=0" => Ok(Surface::A),
            "disc" | "disc=0" => Ok(Surface::Disc),
            _ => Err(Error::Domain(format!("unknown surface '{s}' (expected c, a or disc)"))),
        }
    }
}

/// Real or imaginary `alpha3`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sheet {
    Transit,
    NonTransit,
}

impl Sheet {
    pub fn label(self) -> &'static str {
        match self {
            Sheet::Transit => "transit",
            Sheet::NonTransit => "non-transit",
        }
    }

    /// Signed `alpha3^2` for a real magnitude `s`.
    pub fn alpha3_sq<T: Scalar>(self, s: T) -> T {
        match self {
            Sheet::Transit => -s * s,
            Sheet::NonTransit => s * s,
        }
    }
}

impl std::str::FromStr for Sheet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "transit" => Ok(Sheet::Transit),
            "non-transit" | "nontransit" => Ok(Sheet::NonTransit),
            _ => Err(Error::Domain(format!("unknown branch '{s}' (expected transit or non-transit)"))),
        }
    }
}

/// Where a point sits relative to the critical surfaces, and how many `eta` solve `Delta = 0` there.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RegionReport<T> {
    pub point: EvalPoint<T>,
    pub a: T,
    pub b: T,
    pub c: T,
    pub disc: T,
    pub sign_a: Sign,
    pub sign_c: Sign,
    pub sign_disc: Sign,
    pub roots: EtaSolutions<T>,
    /// Number of real nonzero `eta`: 0, 2 or 4.
    pub count: usize,
    /// Critical surfaces the point lies on whose side condition (`-b/a > 0` or `-c/b > 0`) holds.
    pub on_surface: Vec<Surface>,
}

/// `(a, b, c)` with every term replaced by its absolute value, used to scale tie tests.
fn quartic_scales<T: Scalar>(form: &BifurcationForm<T>, pt: &EvalPoint<T>) -> Result<(T, T, T)> {
    let mut abs = *form;
    abs.coeffs.iter_mut().for_each(|c| *c = c.abs());
    abs.constant = abs.constant.abs();
    let p = EvalPoint::new(pt.alpha1, pt.alpha2, pt.alpha3_sq.abs(), pt.e);
    quartic_at(&abs, &p)
}

pub fn classify_region<T: Scalar>(form: &BifurcationForm<T>, pt: &EvalPoint<T>) -> Result<RegionReport<T>> {
    let (a, b, c) = quartic_at(form, pt)?;
    let (sa, sb, sc) = quartic_scales(form, pt)?;
    let four = T::lit(4.0);
    let disc = b * b - four * a * c;
    let sign_a = Sign::of(a, sa);
    let sign_c = Sign::of(c, sc);
    let sign_disc = Sign::of(disc, sb * sb + four * sa * sc);
    let roots = solve_eta_from(a, b, c);
    let zero = T::zero();
    let mut on_surface = Vec::new();
    if sign_c == Sign::Zero && a != zero && -b / a > zero {
        on_surface.push(Surface::C);
    }
    if sign_a == Sign::Zero && b != zero && -c / b > zero {
        on_surface.push(Surface::A);
    }
    if sign_disc == Sign::Zero && a != zero && -b / a > zero {
        on_surface.push(Surface::Disc);
    }
    Ok(RegionReport {
        point: *pt,
        a,
        b,
        c,
        disc,
        sign_a,
        sign_c,
        sign_disc,
        count: roots.count(),
        roots,
        on_surface,
    })
}

fn check_e<T: Scalar>(e: T) -> Result<()> {
    if !e.is_finite() || e < T::zero() || e >= T::one() {
        return Err(Error::Domain(format!("eccentricity {e} outside [0, 1)")));
    }
    Ok(())
}

fn expect_case<T>(form: &BifurcationForm<T>, case: CouplingCase) -> Result<()> {
    if form.case != case {
        return Err(Error::Contract(format!("expected a {case} form, got {}", form.case)));
    }
    Ok(())
}

/// Planar amplitude at which the halo pair branches off the planar Lyapunov family.
///
/// Fails with [`Error::NoBifurcation`] when the radicand is not positive.
pub fn halo_threshold<T: Scalar>(form: &BifurcationForm<T>, e: T) -> Result<T> {
    expect_case(form, CouplingCase::XToZ)?;
    check_e(e)?;
    let l = &form.coeffs;
    let rad = -(form.constant + l[8] * e * e) / l[5];
    if !(rad > T::zero()) || !rad.is_finite() {
        return Err(Error::NoBifurcation(format!("halo radicand {rad} is not positive at e = {e}")));
    }
    Ok(rad.sqrt())
}

/// Critical amplitudes of the two axial families. `None` where the radicand is not positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AxialThresholds<T> {
    /// Largest vertical amplitude with axial orbits from the `z2y` coupling.
    pub alpha2_max: Option<T>,
    /// Largest planar amplitude with axial orbits from the `y2z` coupling.
    pub alpha1_cri: Option<T>,
}

pub fn axial_thresholds<T: Scalar>(
    form_z2y: &BifurcationForm<T>,
    form_y2z: &BifurcationForm<T>,
    e: T,
) -> Result<AxialThresholds<T>> {
    expect_case(form_z2y, CouplingCase::ZToY)?;
    expect_case(form_y2z, CouplingCase::YToZ)?;
    check_e(e)?;
    let root = |rad: T| if rad > T::zero() && rad.is_finite() { Some(rad.sqrt()) } else { None };
    let (h, k) = (&form_z2y.coeffs, &form_y2z.coeffs);
    let e2 = e * e;
    Ok(AxialThresholds {
        alpha2_max: root(-(h[4] * e2 + form_z2y.constant) / h[2]),
        alpha1_cri: root(-(k[8] * e2 + form_y2z.constant) / k[5]),
    })
}

/// Bisects `[lo, hi]` for the parameter at which the number of `eta` solutions changes.
///
/// `at` maps the parameter to an evaluation point; the counts at the two ends must differ.
pub fn bisect_count_change<T: Scalar>(
    form: &BifurcationForm<T>,
    at: impl Fn(T) -> EvalPoint<T>,
    lo: T,
    hi: T,
) -> Result<T> {
    let count = |s: T| solve_eta(form, &at(s)).map(|r| r.count());
    let (mut lo, mut hi) = (lo, hi);
    let n_lo = count(lo)?;
    if n_lo == count(hi)? {
        return Err(Error::Domain("solution count is the same at both ends".into()));
    }
    for _ in 0..200 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if mid <= lo || mid >= hi {
            break;
        }
        if count(mid)? == n_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::lit(2.0))
}

/// Box sampled by [`critical_surface_mesh`]: `alpha1` and `alpha2` over symmetric ranges,
/// rays along `alpha3` from 0 to `alpha3_max`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec<T> {
    pub alpha1_max: T,
    pub alpha2_max: T,
    pub alpha3_max: T,
    /// Samples per axis.
    pub n: [usize; 3],
}

impl<T: Scalar> GridSpec<T> {
    pub fn new(alpha1_max: T, alpha2_max: T, alpha3_max: T) -> Self {
        GridSpec { alpha1_max, alpha2_max, alpha3_max, n: [101; 3] }
    }

    pub fn with_samples(mut self, n: [usize; 3]) -> Self {
        self.n = n;
        self
    }

    fn validate(&self) -> Result<()> {
        let m = [self.alpha1_max, self.alpha2_max, self.alpha3_max];
        if m.iter().any(|v| !(*v > T::zero()) || !v.is_finite()) {
            return Err(Error::Domain("grid bounds must be positive".into()));
        }
        if self.n.iter().any(|&k| k < 2) {
            return Err(Error::Domain("grid needs at least two samples per axis".into()));
        }
        Ok(())
    }

    fn node(max: T, n: usize, i: usize) -> T {
        -max + T::lit(2.0) * max * T::lit(i as f64) / T::lit((n - 1) as f64)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeshPoint<T> {
    pub alpha1: T,
    pub alpha2: T,
    /// Real magnitude; on the transit sheet the amplitude is `i * alpha3`.
    pub alpha3: T,
    /// Grid indices of the ray the point was found on.
    #[serde(skip)]
    pub ray: (usize, usize),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurfaceMesh<T> {
    pub surface: Surface,
    pub sheet: Sheet,
    pub grid: GridSpec<T>,
    pub points: Vec<MeshPoint<T>>,
    /// Why the mesh is empty, when it is.
    pub diagnostic: Option<String>,
}

impl<T: Scalar> SurfaceMesh<T> {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Writes `alpha1,alpha2,alpha3,surface_id,branch` rows.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "alpha1,alpha2,alpha3,surface_id,branch")?;
        for p in &self.points {
            writeln!(
                w,
                "{:.9e},{:.9e},{:.9e},{},{}",
                p.alpha1,
                p.alpha2,
                p.alpha3,
                self.surface.label(),
                self.sheet.label()
            )?;
        }
        Ok(())
    }
}

fn surface_value<T: Scalar>(form: &BifurcationForm<T>, surface: Surface, pt: &EvalPoint<T>) -> Result<T> {
    let (a, b, c) = quartic_at(form, pt)?;
    Ok(match surface {
        Surface::C => c,
        Surface::A => a,
        Surface::Disc => b * b - T::lit(4.0) * a * c,
    })
}

/// Samples a critical surface by marching along `alpha3` rays over an `(alpha1, alpha2)` grid.
///
/// Every sign change along a ray is refined by bisection and emitted at `+alpha3` and `-alpha3`.
pub fn critical_surface_mesh<T: Scalar>(
    form: &BifurcationForm<T>,
    surface: Surface,
    sheet: Sheet,
    e: T,
    grid: &GridSpec<T>,
) -> Result<SurfaceMesh<T>> {
    grid.validate()?;
    check_e(e)?;
    if form.case == CouplingCase::ZToY && surface == Surface::A {
        return Err(Error::Domain("a vanishes identically for the z2y form".into()));
    }
    let [n1, n2, n3] = grid.n;
    let mut points = Vec::new();
    for i1 in 0..n1 {
        let a1 = GridSpec::node(grid.alpha1_max, n1, i1);
        for i2 in 0..n2 {
            let a2 = GridSpec::node(grid.alpha2_max, n2, i2);
            let g = |s: T| surface_value(form, surface, &EvalPoint::new(a1, a2, sheet.alpha3_sq(s), e));
            let mut emit = |s: T| {
                points.push(MeshPoint { alpha1: a1, alpha2: a2, alpha3: s, ray: (i1, i2) });
                if s > T::zero() {
                    points.push(MeshPoint { alpha1: a1, alpha2: a2, alpha3: -s, ray: (i1, i2) });
                }
            };
            let step = grid.alpha3_max / T::lit((n3 - 1) as f64);
            let mut s_prev = T::zero();
            let mut g_prev = g(s_prev)?;
            if g_prev == T::zero() {
                emit(s_prev);
            }
            for k in 1..n3 {
                let s = step * T::lit(k as f64);
                let gs = g(s)?;
                if gs == T::zero() {
                    emit(s);
                } else if g_prev != T::zero() && (gs > T::zero()) != (g_prev > T::zero()) {
                    let (mut lo, mut hi, mut g_lo) = (s_prev, s, g_prev);
                    for _ in 0..200 {
                        let mid = lo + (hi - lo) / T::lit(2.0);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        let gm = g(mid)?;
                        if (gm > T::zero()) == (g_lo > T::zero()) {
                            lo = mid;
                            g_lo = gm;
                        } else {
                            hi = mid;
                        }
                    }
                    emit(lo + (hi - lo) / T::lit(2.0));
                }
                s_prev = s;
                g_prev = gs;
            }
        }
    }
    let diagnostic = points.is_empty().then(|| format!("no {} crossing inside the sampled box", surface.label()));
    Ok(SurfaceMesh { surface, sheet, grid: *grid, points, diagnostic })
}
