#include <doctest.h>

#include <random>

#include "mechkit/multidim.hpp"
#include "test_support.hpp"

using namespace mechkit;

namespace {

VectorAllocation identity2() {
  return VectorAllocation::linear({{Rational(1), Rational(0)}, {Rational(0), Rational(1)}});
}

}  // namespace

TEST_CASE("ray reduction of the linear identity is f_x(t) = |x|^2 t") {
  const auto f = identity2();
  const auto red = ray_reduce(f, {Rational(1), Rational(1)});
  // f(t x) . x = 2 t on the diagonal
  CHECK(*eval_exact(red.curve, Rational(1)) == Rational(2));
  CHECK(*eval_exact(red.curve, Rational(1, 2)) == Rational(1));
  CHECK(*eval_exact(red.curve, Rational(0)) == Rational(0));
}

TEST_CASE("ray reduction through the zero vector is identically zero") {
  const auto f = identity2();
  const auto red = ray_reduce(f, {Rational(0), Rational(0)});
  CHECK(*eval_exact(red.curve, Rational(5)) == Rational(0));
  CHECK(*eval_exact(red.curve, Rational(0)) == Rational(0));
}

TEST_CASE("ray reduction of a diagonal of steps doubles the step") {
  // both coordinates step at 1/2; along (1,1) the reduction is 2 * H_{1/2}(t)
  const auto f = VectorAllocation::diagonal(
      {AllocationCurve::step(Rational(1, 2)), AllocationCurve::step(Rational(1, 2))});
  const auto red = ray_reduce(f, {Rational(1), Rational(1)});
  CHECK(*eval_exact(red.curve, Rational(1, 2)) == Rational(0));
  CHECK(*eval_exact(red.curve, Rational(3, 5)) == Rational(2));

  // along (2, 0): only the first coordinate contributes, and its step is
  // reached at t = 1/4
  const auto axis = ray_reduce(f, {Rational(2), Rational(0)});
  CHECK(*eval_exact(axis.curve, Rational(1, 4)) == Rational(0));
  CHECK(*eval_exact(axis.curve, Rational(1, 3)) == Rational(2));
}

TEST_CASE("diagonal coordinates must be piecewise families") {
  CHECK_THROWS_AS(VectorAllocation::diagonal({AllocationCurve::cantor()}), std::invalid_argument);
  CHECK_THROWS_AS(VectorAllocation::diagonal({AllocationCurve::step_series()}),
                  std::invalid_argument);
}

TEST_CASE("ray reduction matches direct evaluation everywhere it is sampled") {
  std::mt19937_64 eng(103);
  for (int i = 0; i < 30; ++i) {
    VectorAllocation f = [&]() -> VectorAllocation {
      switch (testsupport::draw(eng, 0, 1)) {
        case 0: {
          std::vector<AllocationCurve> coords;
          for (int j = 0; j < 2; ++j)
            coords.push_back(testsupport::random_piecewise_constant(eng, true));
          return VectorAllocation::diagonal(std::move(coords));
        }
        default: {
          std::vector<std::vector<Rational>> mat(2, std::vector<Rational>(2, Rational(0)));
          for (auto& row : mat)
            for (auto& v : row) v = testsupport::random_rational(eng, 6, 3);
          return VectorAllocation::linear(std::move(mat));
        }
      }
    }();
    const Vec x{testsupport::random_rational(eng, 30, 8), testsupport::random_rational(eng, 30, 8)};
    const auto red = ray_reduce(f, x);
    for (int s = 0; s <= 8; ++s) {
      const Rational t(s, 4);
      Vec tx{t * x[0], t * x[1]};
      CHECK(*eval_exact(red.curve, t) == dot(eval(f, tx), x));
    }
  }
}

TEST_CASE("ray monotonicity: nonnegative linear maps pass, a decreasing diagonal fails") {
  const auto lin = VectorAllocation::linear({{Rational(2), Rational(1)}, {Rational(1), Rational(3)}});
  const auto rays = sample_vectors(10, 2, 11);
  CHECK(is_ray_monotone(lin, rays).monotone);

  const auto down = VectorAllocation::diagonal(
      {AllocationCurve::piecewise_constant({Rational(1)}, {Rational(1), Rational(0)}),
       AllocationCurve::step(Rational(1, 2))});
  const auto report = is_ray_monotone(down, {{Rational(1), Rational(0)}});
  CHECK(!report.monotone);
  REQUIRE(report.witness.has_value());
  CHECK(report.witness->ray == Vec{Rational(1), Rational(0)});

  const auto flat = VectorAllocation::diagonal({AllocationCurve::constant(Rational(2))});
  CHECK(is_ray_monotone(flat, {{Rational(1)}}).monotone);

  CHECK_THROWS_AS(is_ray_monotone(lin, {}), std::invalid_argument);
}

TEST_CASE("vector payment of the linear identity at (1,1) is exactly 1") {
  // g = 2 - integral of 2z over [0,1] = 1
  CHECK(myerson_payment_nd_exact(identity2(), {Rational(1), Rational(1)}) == Rational(1));
  const auto bound = myerson_payment_nd(identity2(), {Rational(1), Rational(1)});
  CHECK(bound.exact);
  CHECK(*bound.value == Rational(1));
}

TEST_CASE("vector payment at the zero vector is the pivot, for every variant") {
  const Vec zero2{Rational(0), Rational(0)};
  CHECK(myerson_payment_nd_exact(identity2(), zero2, Rational(7, 2)) == Rational(7, 2));
  const auto diag = VectorAllocation::diagonal(
      {AllocationCurve::step(Rational(1, 3)), AllocationCurve::step(Rational(2, 3))});
  CHECK(myerson_payment_nd_exact(diag, zero2, Rational(1, 4)) == Rational(1, 4));
}

TEST_CASE("constant vector allocation pays exactly the pivot everywhere") {
  const auto f = VectorAllocation::diagonal(
      {AllocationCurve::constant(Rational(2)), AllocationCurve::constant(Rational(3))});
  std::mt19937_64 eng(107);
  for (int i = 0; i < 20; ++i) {
    const Vec x{testsupport::random_rational(eng, 40, 8), testsupport::random_rational(eng, 40, 8)};
    CHECK(myerson_payment_nd_exact(f, x, Rational(5, 4)) == Rational(5, 4));
  }
}

TEST_CASE("one-dimensional vector path agrees exactly with the scalar payment") {
  std::mt19937_64 eng(109);
  for (int i = 0; i < 50; ++i) {
    const auto curve = (i % 2 == 0) ? testsupport::random_piecewise_constant(eng, true)
                                    : testsupport::random_piecewise_poly(eng);
    const auto f = VectorAllocation::diagonal({curve});
    const Rational t = testsupport::random_rational(eng, 200, 20);
    const Rational c = testsupport::random_rational(eng, 8, 4);
    const Rational nd = myerson_payment_nd_exact(f, {t}, c);
    const Rational scalar = *payment_exact(myerson_payment(curve, c), t);
    CHECK(nd == scalar);
  }
}

TEST_CASE("substitution identity: the ray payment equals the direct formula") {
  std::mt19937_64 eng(113);
  for (int i = 0; i < 30; ++i) {
    std::vector<std::vector<Rational>> mat(2, std::vector<Rational>(2, Rational(0)));
    for (auto& row : mat)
      for (auto& v : row) v = testsupport::random_rational(eng, 5, 2);
    const auto f = VectorAllocation::linear(std::move(mat));
    const Vec x{testsupport::random_rational(eng, 20, 4), testsupport::random_rational(eng, 20, 4)};
    // direct: C + f(x).x - integral over [0,1] of f(z x).x dz, with the
    // integrand linear in z so the integral is (x.Mx)/2
    const Rational quad = dot(eval(f, x), x);
    const Rational direct = quad - quad / Rational(2);
    CHECK(myerson_payment_nd_exact(f, x) == direct);
  }
}

TEST_CASE("vector payment refuses non-monotone rays with the ray in the error") {
  const auto down = VectorAllocation::diagonal(
      {AllocationCurve::piecewise_constant({Rational(1)}, {Rational(2), Rational(0)})});
  try {
    myerson_payment_nd_exact(down, {Rational(3)});
    FAIL("expected NotRayMonotoneError");
  } catch (const NotRayMonotoneError& e) {
    CHECK(e.ray == Vec{Rational(3)});
    CHECK(e.report.witness.has_value());
  }
}

TEST_CASE("vector incentive check passes for the identity with its derived payment") {
  const auto f = identity2();
  auto g = [&](const Vec& v) { return myerson_payment_nd_exact(f, v); };
  const auto pairs = sample_pairs(200, 2, 31);
  const auto report = check_ic_nd(f, g, pairs, {});
  CHECK(report.passed);
  CHECK(report.pairs_checked == pairs.size());
  CHECK(report.scalar_checks > 0);
}

TEST_CASE("a bump on one ray produces a witness pair on that ray") {
  const auto f = identity2();
  auto g = [&](const Vec& v) {
    Rational base = myerson_payment_nd_exact(f, v);
    // non-constant bump along the diagonal ray: fires past (3/4, 3/4)
    if (v.size() == 2 && v[0] == v[1] && v[0] > Rational(3, 4)) base += Rational(1, 10);
    return base;
  };
  const Vec x{Rational(4, 5), Rational(4, 5)};
  const Vec y{Rational(7, 10), Rational(7, 10)};
  const auto report = check_ic_nd(f, g, {{x, y}}, {});
  CHECK(!report.passed);
  REQUIRE(!report.witnesses.empty());
  bool on_ray = false;
  for (const auto& w : report.witnesses)
    if (w.x == x && w.y == y && !w.scalar_route) on_ray = true;
  CHECK(on_ray);
}

TEST_CASE("trivial pair x == y never violates") {
  const auto f = identity2();
  auto g = [&](const Vec& v) { return myerson_payment_nd_exact(f, v); };
  const Vec x{Rational(2), Rational(3)};
  const auto report = check_ic_nd(f, g, {{x, x}}, {});
  CHECK(report.passed);
}

TEST_CASE("bundle tables: cell lookup, ray reduction, and validation") {
  // 1x1 lattice in 2-D: cells {0,1} per axis, allocations rise with quantity
  // table index = a0 + 2 * a1 (axis 0 fastest)
  std::vector<Vec> table = {
      {Rational(0), Rational(0)},  // cell (0, 0)
      {Rational(1), Rational(0)},  // cell (1, 0)
      {Rational(0), Rational(1)},  // cell (0, 1)
      {Rational(1), Rational(1)},  // cell (1, 1)
  };
  const auto f = VectorAllocation::bundle_table(2, Rational(1), {1, 1}, table);
  CHECK(eval(f, {Rational(1, 2), Rational(1, 2)}) == Vec{Rational(0), Rational(0)});
  CHECK(eval(f, {Rational(1), Rational(1)}) == Vec{Rational(0), Rational(0)});  // left-closed
  CHECK(eval(f, {Rational(3, 2), Rational(1, 2)}) == Vec{Rational(1), Rational(0)});
  CHECK(eval(f, {Rational(3, 2), Rational(3, 2)}) == Vec{Rational(1), Rational(1)});

  const auto red = ray_reduce(f, {Rational(1), Rational(1)});
  CHECK(red.curve.kind() == CurveKind::piecewise_constant);
  CHECK(*eval_exact(red.curve, Rational(1)) == Rational(0));
  CHECK(*eval_exact(red.curve, Rational(2)) == Rational(2));  // both coordinates allocated
  CHECK(is_monotone(red.curve).monotone);

  // the derived payment is well defined on bundle rays
  const Rational pay = myerson_payment_nd_exact(f, {Rational(3, 2), Rational(3, 2)});
  // f_x jumps from 0 to (1,1).(3/2,3/2) = 3 at t = 2/3 (where t * 3/2 = 1),
  // so the payment is the jump sum 2/3 * 3 = 2
  CHECK(pay == Rational(2));

  // a non-monotone table is rejected
  std::vector<Vec> bad = table;
  bad[3] = {Rational(0), Rational(0)};
  CHECK_THROWS_AS(VectorAllocation::bundle_table(2, Rational(1), {1, 1}, bad),
                  std::invalid_argument);
}

TEST_CASE("sample generators are deterministic in the seed") {
  const auto a = sample_pairs(50, 2, 99);
  const auto b = sample_pairs(50, 2, 99);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].first == b[i].first);
    CHECK(a[i].second == b[i].second);
  }
  const auto c = sample_pairs(50, 2, 100);
  bool any_diff = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!(a[i].first == c[i].first)) any_diff = true;
  CHECK(any_diff);
}
