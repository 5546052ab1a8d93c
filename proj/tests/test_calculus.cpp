#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "algkit/calculus.hpp"
#include "oracles.hpp"

using namespace algkit;

namespace {

Expr c(double v) { return Expr::constant(v); }

std::vector<std::vector<Expr>> n1_tensor() {
  const Expr f = Expr::div(Expr::pow(Expr::coord(0), 2) + Expr::pow(Expr::coord(1), 2), c(2.0));
  return {{f, c(0.0)}, {c(0.0), f}};
}

AlgebroidSpec jacobi_violating_fixture() {
  std::vector<std::vector<Expr>> anchor{{c(1.0), c(0.0)}, {c(0.0), c(1.0)}};
  std::vector<AlgebroidSpec::StructureEntry> structure{{0, 1, 0, Expr::coord(0)}};
  return AlgebroidSpec(2, 2, std::move(anchor), structure, Box::cube(2));
}

QForm random_one_form(Rng& rng, const AlgebroidSpec& a) {
  QForm omega = QForm::zero(a.rank(), 1);
  for (int alpha = 0; alpha < a.rank(); ++alpha)
    omega.component_at(static_cast<size_t>(alpha)) = random_polynomial(rng, a.base_dim());
  return omega;
}

}  // namespace

TEST_CASE("d on coordinates reproduces the anchor: dx^i = rho_alpha^i e^alpha") {
  const AlgebroidSpec t2 = tangent_algebroid(2);
  const auto nij = nijenhuis_algebroid(n1_tensor());
  const auto sympl = poisson_cotangent_algebroid({{c(0.0), c(1.0)}, {c(-1.0), c(0.0)}});
  for (const AlgebroidSpec* a : {&t2, &nij.spec, &sympl.spec}) {
    for (int i = 0; i < a->base_dim(); ++i) {
      const QForm df = d_rho(*a, QForm::function(a->rank(), Expr::coord(i)));
      REQUIRE(df.degree() == 1);
      for (int alpha = 0; alpha < a->rank(); ++alpha)
        CHECK(Expr::identical(df.components()[static_cast<size_t>(alpha)],
                              a->anchor_coef(i, alpha).simplify()));
    }
  }
  // concrete: tangent R^2, d(x^1) = (1, 0)
  const QForm dx1 = d_rho(t2, QForm::function(2, Expr::coord(0)));
  CHECK(dx1.components()[0].is_constant(1.0));
  CHECK(dx1.components()[1].is_zero());
}

TEST_CASE("d on the dual basis reproduces the structure functions") {
  // tangent: C = 0 so de^g = 0
  const AlgebroidSpec t2 = tangent_algebroid(2);
  for (int g = 0; g < 2; ++g) {
    const QForm de = d_rho(t2, QForm::basis_dual(2, g));
    for (const Expr& comp : de.components()) CHECK(comp.is_zero());
  }

  // (d e^g)(e_a, e_b) = -C_{ab}^g within 1e-12 everywhere on the box
  const auto nij = nijenhuis_algebroid(n1_tensor());
  const auto points = sample_points(nij.spec.sample_box(), 64);
  for (int g = 0; g < 2; ++g) {
    const QForm de = d_rho(nij.spec, QForm::basis_dual(2, g));
    REQUIRE(de.degree() == 2);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const std::vector<int> tuple{a, b};
        const Expr lhs = de.component(tuple);
        const Expr rhs = Expr::neg(nij.spec.structure_coef(a, b, g));
        for (const auto& p : points) CHECK(std::fabs(lhs.eval(p) - rhs.eval(p)) < 1e-12);
      }
  }
  // concrete: (d e^y)(e_x, e_y) at (1, 0) equals -C_{xy}^y = -x = -1
  const QForm dey = d_rho(nij.spec, QForm::basis_dual(2, 1));
  const std::vector<int> xy{0, 1};
  CHECK(dey.component(xy).eval(std::vector<double>{1.0, 0.0}) == doctest::Approx(-1.0));
}

TEST_CASE("components on arbitrary tuples are signed increasing-tuple values") {
  const auto nij = nijenhuis_algebroid(n1_tensor());
  const QForm de = d_rho(nij.spec, QForm::basis_dual(2, 0));
  const std::vector<int> inc{0, 1}, dec{1, 0}, rep{1, 1};
  CHECK(Expr::identical(de.component(dec), Expr::neg(de.component(inc)).simplify()));
  CHECK(de.component(rep).is_zero());
}

TEST_CASE("lie_derivative: worked values and FD cross-check") {
  // degree 0, tangent R^1: L_{e_1} x = 1
  const AlgebroidSpec t1 = tangent_algebroid(1);
  const QForm lf = lie_derivative(t1, Section::basis(1, 0), QForm::function(1, Expr::coord(0)));
  CHECK(lf.components()[0].is_constant(1.0));

  // zero form stays zero
  const auto nij = nijenhuis_algebroid(n1_tensor());
  const QForm lz = lie_derivative(nij.spec, Section::basis(2, 0), QForm::zero(2, 1));
  for (const Expr& e : lz.components()) CHECK(e.is_zero());

  // Nijenhuis, s = e_x, f = x: L = (rho e_x)(x) = (x^2+y^2)/2, so 1 at (1,1)
  const QForm lnij =
      lie_derivative(nij.spec, Section::basis(2, 0), QForm::function(2, Expr::coord(0)));
  CHECK(lnij.components()[0].eval(std::vector<double>{1.0, 1.0}) == doctest::Approx(1.0));

  // degree 1 against the defining formula with FD derivatives
  Rng rng(7);
  const Section s = random_section(rng, nij.spec);
  const QForm omega = random_one_form(rng, nij.spec);
  const QForm lomega = lie_derivative(nij.spec, s, omega);
  const auto points = sample_points(nij.spec.sample_box(), 16);
  const VectorField rho_s = anchor_apply(nij.spec, s);
  for (const auto& p : points) {
    for (int alpha = 0; alpha < 2; ++alpha) {
      double expected = 0.0;
      for (int i = 0; i < 2; ++i)
        expected += rho_s.comps[static_cast<size_t>(i)].eval(p) *
                    oracle::central_diff(omega.components()[static_cast<size_t>(alpha)], i, p);
      const auto br = oracle::numeric_bracket(nij.spec, oracle::section_fn(s),
                                              oracle::section_fn(Section::basis(2, alpha)))(p);
      for (int g = 0; g < 2; ++g)
        expected -=
            br[static_cast<size_t>(g)] * omega.components()[static_cast<size_t>(g)].eval(p);
      CHECK(std::fabs(lomega.components()[static_cast<size_t>(alpha)].eval(p) - expected) < 1e-5);
    }
  }
}

TEST_CASE("d squared vanishes iff Jacobi holds") {
  // classical: tangent R^3 on a polynomial function
  const AlgebroidSpec t3 = tangent_algebroid(3);
  const auto r0 = check_d_squared(t3, QForm::function(3, Expr::coord(0) * Expr::coord(1)));
  CHECK(r0.pass());
  CHECK(r0.max_residual() == 0.0);

  // Nijenhuis: random polynomial forms of degree 0 and 1
  const auto nij = nijenhuis_algebroid(n1_tensor());
  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    CHECK(check_d_squared(nij.spec, QForm::function(2, random_polynomial(rng, 2))).pass());
    CHECK(check_d_squared(nij.spec, random_one_form(rng, nij.spec)).pass());
  }

  // degree == rank: d yields the zero form by convention
  const QForm top = random_one_form(rng, nij.spec);
  const QForm dtop = d_rho(nij.spec, top);
  CHECK(dtop.degree() == 2);
  const QForm zero3 = d_rho(nij.spec, dtop);
  CHECK(zero3.degree() == 3);
  CHECK(zero3.components().empty());

  // the Jacobi-violating fixture fails on a 0-form
  const AlgebroidSpec bad = jacobi_violating_fixture();
  const auto r_bad = check_d_squared(bad, QForm::function(2, Expr::coord(0)));
  CHECK_FALSE(r_bad.pass());
  CHECK(r_bad.max_residual() > 1e-3);
}

TEST_CASE("pullback: identity, scaling, composition on worked forms") {
  const QForm e1 = QForm::basis_dual(1, 0);

  // identity morphism leaves forms unchanged
  const BundleMorphism id = BundleMorphism::identity(1, 1);
  CHECK(Expr::identical(pullback(id, e1).components()[0], c(1.0)));

  // phi(x) = x^2 with identity fiber map: e^1 pulls back to e^1
  BundleMorphism sq = BundleMorphism::identity(1, 1);
  sq.base_map[0] = Expr::pow(Expr::coord(0), 2);
  CHECK(Expr::identical(pullback(sq, e1).components()[0], c(1.0)));
  // but functions compose: x' -> x^2
  const QForm f = QForm::function(1, Expr::coord(0));
  CHECK(Expr::identical(pullback(sq, f).components()[0], Expr::pow(Expr::coord(0), 2)));

  // fiber map 2 Id doubles the dual basis
  BundleMorphism twice = BundleMorphism::identity(1, 1);
  twice.fiber_map[0][0] = c(2.0);
  CHECK(pullback(twice, e1).components()[0].is_constant(2.0));
}

TEST_CASE("pullback functoriality") {
  Rng rng(13);
  // psi2: rank 2 over R^2 -> rank 3 over R^3, psi1: rank 3 -> rank 2
  BundleMorphism psi2;
  psi2.base_map = {random_polynomial(rng, 2), random_polynomial(rng, 2),
                   random_polynomial(rng, 2)};
  psi2.fiber_map = {{c(1.0), c(2.0)}, {c(0.0), c(1.0)}, {c(1.0), c(-1.0)}};
  BundleMorphism psi1;
  psi1.base_map = {random_polynomial(rng, 3), random_polynomial(rng, 3)};
  psi1.fiber_map = {{c(1.0), c(0.0), c(2.0)}, {c(0.0), c(3.0), c(1.0)}};

  const BundleMorphism chained = compose(psi1, psi2);
  const auto points = sample_points(Box::cube(2), 32);
  for (int degree = 0; degree <= 2; ++degree) {
    QForm omega = QForm::zero(2, degree);
    for (size_t t = 0; t < omega.components().size(); ++t)
      omega.component_at(t) = random_polynomial(rng, 2);
    const QForm direct = pullback(chained, omega);
    const QForm staged = pullback(psi2, pullback(psi1, omega));
    REQUIRE(direct.components().size() == staged.components().size());
    for (size_t i = 0; i < direct.components().size(); ++i)
      for (const auto& p : points) {
        const double a = direct.components()[i].eval(p);
        const double b = staged.components()[i].eval(p);
        CHECK(std::fabs(a - b) < 1e-12 * (1.0 + std::fabs(a)));
      }
  }
}

TEST_CASE("check_morphism: identity, Nijenhuis positive, scaling negative") {
  const AlgebroidSpec t2 = tangent_algebroid(2);
  const auto nij = nijenhuis_algebroid(n1_tensor());
  const auto sympl = poisson_cotangent_algebroid({{c(0.0), c(1.0)}, {c(-1.0), c(0.0)}});

  // identity passes on every constructor-built algebroid
  for (const AlgebroidSpec* a : {&t2, &nij.spec, &sympl.spec}) {
    const auto report = check_morphism(BundleMorphism::identity(a->base_dim(), a->rank()), *a, *a);
    CHECK(report.pass());
  }

  // Phi = N over the identity base map, from (TM, [.,.]_N, anchor N) to the
  // standard tangent algebroid: the defining property of Nijenhuis tensors
  BundleMorphism phi_n = BundleMorphism::identity(2, 2);
  phi_n.fiber_map = n1_tensor();
  CHECK(check_morphism(phi_n, nij.spec, t2).pass());

  // Phi = 2 Id between two copies of the Nijenhuis algebroid fails
  BundleMorphism twice = BundleMorphism::identity(2, 2);
  twice.fiber_map[0][0] = c(2.0);
  twice.fiber_map[1][1] = c(2.0);
  const auto bad = check_morphism(twice, nij.spec, nij.spec);
  CHECK_FALSE(bad.pass());
  CHECK(bad.worst_failure()->max_residual > 1e-3);
  CHECK_FALSE(bad.worst_failure()->site.empty());
}

TEST_CASE("qform apply is alternating and multilinear") {
  const auto nij = nijenhuis_algebroid(n1_tensor());
  Rng rng(3);
  QForm omega = QForm::zero(2, 2);
  omega.component_at(0) = random_polynomial(rng, 2);
  const Section s1 = random_section(rng, nij.spec);
  const Section s2 = random_section(rng, nij.spec);
  std::vector<Section> fwd{s1, s2}, rev{s2, s1}, diag{s1, s1};
  const Expr sum = simplified_sum({omega.apply(fwd), omega.apply(rev)});
  CHECK(sum.is_zero());
  CHECK(omega.apply(diag).is_zero());

  // apply on basis tuples returns stored components
  std::vector<Section> basis{Section::basis(2, 0), Section::basis(2, 1)};
  CHECK(Expr::identical(omega.apply(basis), omega.components()[0].simplify()));
}
