//! The twisted deformative Schrödinger-Virasoro Lie algebra L(lambda, mu).
//!
//! Basis {L_n, Y_n, M_n | n in Z} with brackets
//!
//! ```text
//! [L_n, L_m] = (m - n) L_{n+m}
//! [L_n, Y_m] = (m - (lambda+1)/2 * n + mu) Y_{n+m}
//! [L_n, M_m] = (m - lambda * n + 2 mu) M_{n+m}
//! [Y_n, Y_m] = (m - n) M_{n+m}
//! [Y_n, M_m] = [M_n, M_m] = 0
//! ```
//!
//! Parameters are restricted to mu not in 1/2 + Z, and mu = 0 with
//! lambda != 0 whenever mu is an integer (integer mu reduces to mu = 0 by a
//! basis shift, and lambda = mu = 0 is a different, separately studied
//! algebra). Elements and brackets are total: finitely supported elements
//! stay finitely supported, so no truncation happens at this layer. The
//! [`Window`] only scopes verification loops and the solvers built on top.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::exactlin::Scalar;

/// Basis family tag. Ordered L < Y < M so element iteration is canonical.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Family {
    L,
    Y,
    M,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::L, Family::Y, Family::M];

    pub fn letter(self) -> char {
        match self {
            Family::L => 'L',
            Family::Y => 'Y',
            Family::M => 'M',
        }
    }
}

/// Names one basis vector X_n.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BasisIndex {
    pub family: Family,
    pub degree: i64,
}

impl BasisIndex {
    pub fn new(family: Family, degree: i64) -> Self {
        BasisIndex { family, degree }
    }

    pub fn l(n: i64) -> Self {
        BasisIndex::new(Family::L, n)
    }

    pub fn y(n: i64) -> Self {
        BasisIndex::new(Family::Y, n)
    }

    pub fn m(n: i64) -> Self {
        BasisIndex::new(Family::M, n)
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.family.letter(), self.degree)
    }
}

/// Finite sparse linear combination of basis vectors; a vector of the algebra.
/// Stored coefficients are never zero.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Element {
    terms: BTreeMap<BasisIndex, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(idx: BasisIndex) -> Self {
        Element::term(idx, Scalar::one())
    }

    pub fn term(idx: BasisIndex, coeff: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(idx, coeff);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (BasisIndex, Scalar)>>(terms: I) -> Self {
        let mut e = Element::zero();
        for (idx, c) in terms {
            e.add_term(idx, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, idx: BasisIndex) -> Scalar {
        self.terms.get(&idx).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BasisIndex, &Scalar)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, idx: BasisIndex, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.get_mut(&idx) {
            Some(cur) => {
                let next = &*cur + &coeff;
                if next.is_zero() {
                    self.terms.remove(&idx);
                } else {
                    *cur = next;
                }
            }
            None => {
                self.terms.insert(idx, coeff);
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(*idx, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        let mut out = self.clone();
        for (idx, c) in &other.terms {
            out.add_term(*idx, -c);
        }
        out
    }

    pub fn scale(&self, c: &Scalar) -> Element {
        if c.is_zero() {
            return Element::zero();
        }
        Element {
            terms: self.terms.iter().map(|(idx, v)| (*idx, c * v)).collect(),
        }
    }

    pub fn neg(&self) -> Element {
        Element {
            terms: self.terms.iter().map(|(idx, v)| (*idx, -v)).collect(),
        }
    }

    /// Restriction to one family, as (degree, coefficient) pairs.
    pub fn family_part(&self, family: Family) -> Vec<(i64, Scalar)> {
        self.terms
            .iter()
            .filter(|(idx, _)| idx.family == family)
            .map(|(idx, c)| (idx.degree, c.clone()))
            .collect()
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (idx, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{idx}")?;
            } else {
                write!(f, "{c}*{idx}")?;
            }
        }
        Ok(())
    }
}

/// `n` when every term of `x` has degree `n`; `None` for 0 or mixed support.
/// The zero element deliberately has no degree so reports stay unambiguous.
pub fn degree_of(x: &Element) -> Option<i64> {
    let mut degrees = x.terms.keys().map(|idx| idx.degree);
    let first = degrees.next()?;
    degrees.all(|d| d == first).then_some(first)
}

/// Parameter classification cases, following how the classification theorems
/// split: generic mu (mu not in (1/2)Z), and mu = 0 refined by lambda.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ParamCase {
    GenericMu,
    MuZeroLambdaMinus2,
    MuZeroLambdaMinus1,
    MuZeroLambdaPlus1,
    MuZeroLambdaGeneric,
}

impl ParamCase {
    pub fn name(self) -> &'static str {
        match self {
            ParamCase::GenericMu => "generic_mu",
            ParamCase::MuZeroLambdaMinus2 => "mu0_lambda_minus2",
            ParamCase::MuZeroLambdaMinus1 => "mu0_lambda_minus1",
            ParamCase::MuZeroLambdaPlus1 => "mu0_lambda_plus1",
            ParamCase::MuZeroLambdaGeneric => "mu0_lambda_generic",
        }
    }

    pub fn mu_is_zero(self) -> bool {
        !matches!(self, ParamCase::GenericMu)
    }
}

/// Rejections of (lambda, mu) pairs outside the admissible range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamError {
    /// mu in 1/2 + Z: reduces to mu = 1/2, handled elsewhere.
    MuHalfInteger,
    /// mu a nonzero integer: reduces to mu = 0 by a basis shift.
    MuNonzeroInteger,
    /// lambda = mu = 0 is the twisted Schrödinger-Virasoro algebra, excluded.
    TwistedSVExcluded,
}

impl fmt::Display for ParamError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamError::MuHalfInteger => write!(f, "excluded: mu in 1/2 + Z"),
            ParamError::MuNonzeroInteger => {
                write!(f, "excluded: mu a nonzero integer (shift basis to mu = 0)")
            }
            ParamError::TwistedSVExcluded => {
                write!(
                    f,
                    "excluded: lambda = mu = 0 (twisted Schrödinger-Virasoro algebra)"
                )
            }
        }
    }
}

impl std::error::Error for ParamError {}

/// Validated parameter pair (lambda, mu) with its classification case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Params {
    lambda: Scalar,
    mu: Scalar,
    case: ParamCase,
}

impl Params {
    pub fn lambda(&self) -> &Scalar {
        &self.lambda
    }

    pub fn mu(&self) -> &Scalar {
        &self.mu
    }

    pub fn case(&self) -> ParamCase {
        self.case
    }

    pub fn mu_is_zero(&self) -> bool {
        self.mu.is_zero()
    }
}

/// Checks the admissibility conditions on (lambda, mu) and tags the case.
pub fn validate_params(lambda: Scalar, mu: Scalar) -> Result<Params, ParamError> {
    if mu.is_odd_half_integer() {
        return Err(ParamError::MuHalfInteger);
    }
    if mu.is_integer() && !mu.is_zero() {
        return Err(ParamError::MuNonzeroInteger);
    }
    let case = if mu.is_zero() {
        if lambda.is_zero() {
            return Err(ParamError::TwistedSVExcluded);
        }
        if lambda == Scalar::from_int(-2) {
            ParamCase::MuZeroLambdaMinus2
        } else if lambda == Scalar::from_int(-1) {
            ParamCase::MuZeroLambdaMinus1
        } else if lambda == Scalar::from_int(1) {
            ParamCase::MuZeroLambdaPlus1
        } else {
            ParamCase::MuZeroLambdaGeneric
        }
    } else {
        ParamCase::GenericMu
    };
    Ok(Params { lambda, mu, case })
}

/// Truncation window [-N, N] for verification loops and solvers. The algebra
/// itself is infinite-dimensional; nothing here truncates elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Window {
    radius: i64,
}

/// Proof bookkeeping needs index shifts up to 3 and evaluation points up to
/// |n| = 2, so radii below 5 would not pin down the solution spaces.
pub const MIN_WINDOW_RADIUS: i64 = 5;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowError(pub i64);

impl fmt::Display for WindowError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "window radius {} is too small (minimum {})",
            self.0, MIN_WINDOW_RADIUS
        )
    }
}

impl std::error::Error for WindowError {}

impl Window {
    pub fn new(radius: i64) -> Result<Window, WindowError> {
        if radius < MIN_WINDOW_RADIUS {
            return Err(WindowError(radius));
        }
        Ok(Window { radius })
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn contains(&self, degree: i64) -> bool {
        degree.abs() <= self.radius
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        -self.radius..=self.radius
    }

    /// Number of indices in the window, `2N + 1`.
    pub fn index_count(&self) -> usize {
        (2 * self.radius + 1) as usize
    }
}

/// Structure constants: bracket of two basis vectors.
pub fn bracket_basis(p: &Params, a: BasisIndex, b: BasisIndex) -> Element {
    use Family::*;
    let (n, m) = (a.degree, b.degree);
    match (a.family, b.family) {
        (L, L) => Element::term(BasisIndex::l(n + m), Scalar::from_int(m - n)),
        (L, Y) => {
            let half = Scalar::new(1, 2);
            let c = Scalar::from_int(m)
                - (p.lambda() + &Scalar::one()) * half * Scalar::from_int(n)
                + p.mu().clone();
            Element::term(BasisIndex::y(n + m), c)
        }
        (L, M) => {
            let c = Scalar::from_int(m) - p.lambda() * &Scalar::from_int(n)
                + Scalar::from_int(2) * p.mu();
            Element::term(BasisIndex::m(n + m), c)
        }
        (Y, Y) => Element::term(BasisIndex::m(n + m), Scalar::from_int(m - n)),
        (Y, M) | (M, Y) | (M, M) => Element::zero(),
        (Y, L) | (M, L) => bracket_basis(p, b, a).neg(),
    }
}

/// Bilinear extension of the structure constants; total on finite supports.
pub fn bracket(p: &Params, x: &Element, y: &Element) -> Element {
    let mut out = Element::zero();
    for (ix, cx) in x.iter() {
        for (iy, cy) in y.iter() {
            let br = bracket_basis(p, *ix, *iy);
            for (idx, c) in br.iter() {
                out.add_term(*idx, cx * cy * c);
            }
        }
    }
    out
}

/// The adjoint action ad_x(y) = [x, y].
pub fn ad_apply(p: &Params, x: &Element, y: &Element) -> Element {
    bracket(p, x, y)
}

/// A basis triple violating the Jacobi identity, with its nonzero defect.
#[derive(Clone, Debug)]
pub struct JacobiViolation {
    pub triple: [BasisIndex; 3],
    pub defect: Element,
}

impl fmt::Display for JacobiViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "jacobi defect at ({}, {}, {}): {}",
            self.triple[0], self.triple[1], self.triple[2], self.defect
        )
    }
}

#[derive(Clone, Debug, Default)]
pub struct JacobiReport {
    pub violations: Vec<JacobiViolation>,
    pub triples_checked: usize,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Exhaustive Jacobi check over all basis triples whose indices and all
/// pairwise/triple sums stay inside the window, using the given structure
/// constants. Taking the rule as an argument lets the test harness feed a
/// deliberately perturbed bracket and confirm the check catches it.
pub fn jacobi_check_with<F>(p: &Params, w: &Window, rule: F) -> JacobiReport
where
    F: Fn(&Params, BasisIndex, BasisIndex) -> Element,
{
    let mut report = JacobiReport::default();
    let bracket_elems = |x: &Element, y: &Element| -> Element {
        let mut out = Element::zero();
        for (ix, cx) in x.iter() {
            for (iy, cy) in y.iter() {
                for (idx, c) in rule(p, *ix, *iy).iter() {
                    out.add_term(*idx, cx * cy * c);
                }
            }
        }
        out
    };
    for a in w.indices() {
        for b in w.indices() {
            if !w.contains(a + b) {
                continue;
            }
            for c in w.indices() {
                if !(w.contains(a + c) && w.contains(b + c) && w.contains(a + b + c)) {
                    continue;
                }
                for fa in Family::ALL {
                    for fb in Family::ALL {
                        for fc in Family::ALL {
                            let x = Element::basis(BasisIndex::new(fa, a));
                            let y = Element::basis(BasisIndex::new(fb, b));
                            let z = Element::basis(BasisIndex::new(fc, c));
                            let mut defect = bracket_elems(&bracket_elems(&x, &y), &z);
                            defect = defect.add(&bracket_elems(&bracket_elems(&y, &z), &x));
                            defect = defect.add(&bracket_elems(&bracket_elems(&z, &x), &y));
                            report.triples_checked += 1;
                            if !defect.is_zero() {
                                report.violations.push(JacobiViolation {
                                    triple: [
                                        BasisIndex::new(fa, a),
                                        BasisIndex::new(fb, b),
                                        BasisIndex::new(fc, c),
                                    ],
                                    defect,
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    report
}

/// Jacobi check with the actual structure constants of L(lambda, mu).
pub fn jacobi_check(p: &Params, w: &Window) -> JacobiReport {
    jacobi_check_with(p, w, bracket_basis)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(lambda: (i64, i64), mu: (i64, i64)) -> Params {
        validate_params(Scalar::new(lambda.0, lambda.1), Scalar::new(mu.0, mu.1)).unwrap()
    }

    #[test]
    fn validate_params_cases() {
        assert_eq!(params((3, 1), (1, 3)).case(), ParamCase::GenericMu);
        assert_eq!(
            params((-1, 1), (0, 1)).case(),
            ParamCase::MuZeroLambdaMinus1
        );
        assert_eq!(
            params((-2, 1), (0, 1)).case(),
            ParamCase::MuZeroLambdaMinus2
        );
        assert_eq!(params((1, 1), (0, 1)).case(), ParamCase::MuZeroLambdaPlus1);
        assert_eq!(
            params((7, 1), (0, 1)).case(),
            ParamCase::MuZeroLambdaGeneric
        );
        // lambda = 0 is only excluded when mu is an integer
        assert_eq!(params((0, 1), (1, 3)).case(), ParamCase::GenericMu);
    }

    #[test]
    fn validate_params_rejections() {
        assert_eq!(
            validate_params(Scalar::from_int(0), Scalar::from_int(0)),
            Err(ParamError::TwistedSVExcluded)
        );
        assert_eq!(
            validate_params(Scalar::from_int(2), Scalar::new(1, 2)),
            Err(ParamError::MuHalfInteger)
        );
        assert_eq!(
            validate_params(Scalar::from_int(2), Scalar::from_int(3)),
            Err(ParamError::MuNonzeroInteger)
        );
        assert_eq!(
            validate_params(Scalar::from_int(1), Scalar::new(-5, 2)),
            Err(ParamError::MuHalfInteger)
        );
    }

    #[test]
    fn bracket_l0_y0_is_mu_y0() {
        let p = params((3, 1), (1, 3));
        let got = bracket_basis(&p, BasisIndex::l(0), BasisIndex::y(0));
        assert_eq!(got, Element::term(BasisIndex::y(0), Scalar::new(1, 3)));
    }

    #[test]
    fn bracket_antisymmetry_diagonal() {
        let p = params((3, 1), (1, 3));
        assert!(bracket_basis(&p, BasisIndex::y(2), BasisIndex::y(2)).is_zero());
    }

    #[test]
    fn bracket_l1_m1_example() {
        // lambda = 3, mu = 1/3: [L_1, M_1] = (1 - 3 + 2/3) M_2 = -4/3 M_2
        let p = params((3, 1), (1, 3));
        let got = bracket_basis(&p, BasisIndex::l(1), BasisIndex::m(1));
        assert_eq!(got, Element::term(BasisIndex::m(2), Scalar::new(-4, 3)));
    }

    #[test]
    fn bracket_l2_y3_example() {
        // lambda = 1, mu = 0: [L_2, Y_3] = (3 - 1*2 + 0) Y_5 = Y_5
        let p = params((1, 1), (0, 1));
        let got = bracket_basis(&p, BasisIndex::l(2), BasisIndex::y(3));
        assert_eq!(got, Element::basis(BasisIndex::y(5)));
    }

    #[test]
    fn ad_l0_weights() {
        // lambda = 3, mu = 1/3: ad L_0 has weights n, n + 1/3, n + 2/3
        let p = params((3, 1), (1, 3));
        let l0 = Element::basis(BasisIndex::l(0));
        for n in -4..=4 {
            assert_eq!(
                ad_apply(&p, &l0, &Element::basis(BasisIndex::l(n))),
                Element::term(BasisIndex::l(n), Scalar::from_int(n))
            );
            assert_eq!(
                ad_apply(&p, &l0, &Element::basis(BasisIndex::y(n))),
                Element::term(BasisIndex::y(n), Scalar::from_int(n) + Scalar::new(1, 3))
            );
            assert_eq!(
                ad_apply(&p, &l0, &Element::basis(BasisIndex::m(n))),
                Element::term(BasisIndex::m(n), Scalar::from_int(n) + Scalar::new(2, 3))
            );
        }
    }

    #[test]
    fn ad_m0_example() {
        // lambda = 1, mu = 0: ad M_0 sends L_n to n M_n and kills Y, M
        let p = params((1, 1), (0, 1));
        let m0 = Element::basis(BasisIndex::m(0));
        for n in -3..=3 {
            assert_eq!(
                ad_apply(&p, &m0, &Element::basis(BasisIndex::l(n))),
                Element::term(BasisIndex::m(n), Scalar::from_int(n))
            );
            assert!(ad_apply(&p, &m0, &Element::basis(BasisIndex::y(n))).is_zero());
            assert!(ad_apply(&p, &m0, &Element::basis(BasisIndex::m(n))).is_zero());
        }
    }

    #[test]
    fn ad_of_zero_is_zero_map() {
        let p = params((3, 1), (1, 3));
        let zero = Element::zero();
        assert!(ad_apply(&p, &zero, &Element::basis(BasisIndex::l(2))).is_zero());
    }

    #[test]
    fn degree_of_examples() {
        let mut e = Element::basis(BasisIndex::l(2));
        e.add_term(BasisIndex::m(2), Scalar::from_int(5));
        assert_eq!(degree_of(&e), Some(2));
        let mut mixed = Element::basis(BasisIndex::l(1));
        mixed.add_term(BasisIndex::y(2), Scalar::one());
        assert_eq!(degree_of(&mixed), None);
        assert_eq!(degree_of(&Element::zero()), None);
    }

    #[test]
    fn antisymmetry_on_window_pairs() {
        let p = params((-5, 1), (2, 3));
        let w = Window::new(5).unwrap();
        for a in w.indices() {
            for b in w.indices() {
                for fa in Family::ALL {
                    for fb in Family::ALL {
                        let ia = BasisIndex::new(fa, a);
                        let ib = BasisIndex::new(fb, b);
                        let xy = bracket_basis(&p, ia, ib);
                        let yx = bracket_basis(&p, ib, ia);
                        assert_eq!(xy, yx.neg(), "antisymmetry failed at {ia}, {ib}");
                    }
                }
            }
        }
    }

    #[test]
    fn grading_of_brackets() {
        let p = params((3, 1), (1, 3));
        for a in -4..=4i64 {
            for b in -4..=4i64 {
                for fa in Family::ALL {
                    for fb in Family::ALL {
                        let br = bracket_basis(&p, BasisIndex::new(fa, a), BasisIndex::new(fb, b));
                        if !br.is_zero() {
                            assert_eq!(degree_of(&br), Some(a + b));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ideal_structure() {
        // [J, J] lands in M and M is central in J, for J = Y + M.
        let p = params((-2, 1), (0, 1));
        for a in -3..=3i64 {
            for b in -3..=3i64 {
                for fa in [Family::Y, Family::M] {
                    for fb in [Family::Y, Family::M] {
                        let br = bracket_basis(&p, BasisIndex::new(fa, a), BasisIndex::new(fb, b));
                        assert!(br.iter().all(|(idx, _)| idx.family == Family::M));
                        if fa == Family::M || fb == Family::M {
                            assert!(br.is_zero());
                        }
                    }
                }
                // bracket of anything with the M family stays in M
                for fa in Family::ALL {
                    let br = bracket_basis(&p, BasisIndex::new(fa, a), BasisIndex::m(b));
                    assert!(br.iter().all(|(idx, _)| idx.family == Family::M));
                }
            }
        }
    }

    #[test]
    fn center_trivial_at_window_scale() {
        for p in [
            params((3, 1), (1, 3)),
            params((-2, 1), (0, 1)),
            params((-1, 1), (0, 1)),
            params((1, 1), (0, 1)),
            params((7, 1), (0, 1)),
        ] {
            let w = Window::new(5).unwrap();
            for k in -(w.radius() - 1)..=(w.radius() - 1) {
                for fam in Family::ALL {
                    let x = BasisIndex::new(fam, k);
                    let hit = (-1..=1i64).any(|d| {
                        Family::ALL
                            .iter()
                            .any(|&g| !bracket_basis(&p, x, BasisIndex::new(g, d)).is_zero())
                    });
                    assert!(hit, "{x} is central at window scale for {:?}", p.case());
                }
            }
        }
    }

    #[test]
    fn jacobi_holds_on_window() {
        for p in [params((3, 1), (1, 3)), params((-1, 1), (0, 1))] {
            let w = Window::new(5).unwrap();
            let report = jacobi_check(&p, &w);
            assert!(report.passed(), "violations: {:?}", report.violations);
            assert!(report.triples_checked > 0);
        }
    }

    #[test]
    fn jacobi_detects_mutated_constant() {
        // Replace (m - n) by (m + n) in [Y_n, Y_m]; the check must notice.
        let p = params((1, 1), (0, 1));
        let w = Window::new(5).unwrap();
        let mutated = |p: &Params, a: BasisIndex, b: BasisIndex| -> Element {
            if a.family == Family::Y && b.family == Family::Y {
                Element::term(
                    BasisIndex::m(a.degree + b.degree),
                    Scalar::from_int(b.degree + a.degree),
                )
            } else {
                bracket_basis(p, a, b)
            }
        };
        let report = jacobi_check_with(&p, &w, mutated);
        assert!(!report.passed());
    }

    #[test]
    fn window_minimum_radius() {
        assert!(Window::new(4).is_err());
        assert!(Window::new(5).is_ok());
    }
}
