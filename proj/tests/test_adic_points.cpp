#include <set>

#include "doctest.h"
#include "prl/adic_points.hpp"
#include "support.hpp"

using namespace prl;
using namespace prl::testing;

namespace {

PointSpec rational_spec(const PadicScalar& c, Rational v) {
  PointSpec s;
  s.center = c;
  s.radius = PointSpec::Radius::rational;
  s.v = v;
  return s;
}

LaurentFunction rand_laurent(std::mt19937_64& rng, const PrecisionContext& c, int lo, int hi) {
  LaurentFunction f(c, PadicScalar(c));
  for (int i = lo; i <= hi; ++i) {
    i64 x = static_cast<i64>(rand_below(rng, 40)) - 20;
    int shift = static_cast<int>(rand_below(rng, 3));
    for (int k = 0; k < shift; ++k) x *= static_cast<i64>(c.p());
    f.set(i, PadicScalar(c, x));
  }
  return f;
}

std::vector<PadicScalar> poly(const PrecisionContext& c, std::vector<i64> a) {
  std::vector<PadicScalar> out;
  for (i64 x : a) out.emplace_back(c, x);
  return out;
}

std::vector<PadicScalar> from_roots(const PrecisionContext& c, const std::vector<i64>& roots) {
  std::vector<PadicScalar> f{PadicScalar(c, 1)};
  for (i64 r : roots) {
    std::vector<PadicScalar> g(f.size() + 1, PadicScalar(c));
    for (size_t i = 0; i < f.size(); ++i) {
      g[i + 1] += f[i];
      g[i] -= f[i] * PadicScalar(c, r);
    }
    f = g;
  }
  return f;
}

std::multiset<Rational> root_valuations(const std::vector<Segment>& segs) {
  std::multiset<Rational> out;
  for (const auto& s : segs)
    for (int k = 0; k < s.length; ++k) out.insert(s.slope);
  return out;
}

}  // namespace

TEST_CASE("classification") {
  PrecisionContext c(5, 8);
  CHECK(kind_of(classify(rational_spec(PadicScalar(c), 0))) == PointKind::II);

  PointSpec s3;
  s3.center = PadicScalar(c, 2);
  s3.radius = PointSpec::Radius::irrational;
  s3.lo = Rational(1, 2);
  s3.hi = Rational(2, 3);
  CHECK(kind_of(classify(s3)) == PointKind::III);

  PointSpec s5 = rational_spec(PadicScalar(c), 1);
  s5.side = Side::outer;
  CHECK(kind_of(classify(s5)) == PointKind::V);

  PointSpec s1;
  s1.center = PadicScalar(c, 3);
  s1.radius = PointSpec::Radius::zero;
  CHECK(kind_of(classify(s1)) == PointKind::I);

  PointSpec s4;
  s4.prefix = {{PadicScalar(c, 0), 0}, {PadicScalar(c, 5), 1}, {PadicScalar(c, 30), 2}};
  s4.certified = true;
  CHECK(kind_of(classify(s4)) == PointKind::IV);
  CHECK(point_str(classify(s4)).rfind("IV[", 0) == 0);
}

TEST_CASE("malformed specs") {
  PrecisionContext c(5, 8);
  CHECK_THROWS_AS(classify(rational_spec(PadicScalar(c), -1)), MalformedSpec);
  PointSpec s4;
  s4.prefix = {{PadicScalar(c, 0), 1}, {PadicScalar(c, 1), 2}};
  s4.certified = true;
  CHECK_THROWS_AS(classify(s4), MalformedSpec);
  s4.prefix = {{PadicScalar(c, 0), 2}, {PadicScalar(c, 25), 1}};
  CHECK_THROWS_AS(classify(s4), MalformedSpec);
  s4.prefix = {{PadicScalar(c, 0), 1}, {PadicScalar(c, 25), 2}};
  s4.certified = false;
  CHECK_THROWS_AS(classify(s4), MalformedSpec);
  PointSpec s3;
  s3.center = PadicScalar(c);
  s3.radius = PointSpec::Radius::irrational;
  s3.lo = s3.hi = 1;
  CHECK_THROWS_AS(classify(s3), MalformedSpec);
  PointSpec inner = rational_spec(PadicScalar(c), 1);
  inner.side = Side::inner;
  CHECK_THROWS_AS(classify(inner), MalformedSpec);
  inner.beta = PadicScalar(c, 1);
  CHECK_THROWS_AS(classify(inner), MalformedSpec);
  inner.beta = PadicScalar(c, 10);
  CHECK(kind_of(classify(inner)) == PointKind::V);
  CHECK_THROWS_AS(classify(PointSpec{}), MalformedSpec);
}

TEST_CASE("gauss norm examples") {
  PrecisionContext c(5, 8);
  auto f = LaurentFunction::polynomial(c, {5, 0, 1});
  CHECK(gauss_norm(f, PadicScalar(c), 0) == ValueExponent(i64{0}));
  CHECK(gauss_norm(f, PadicScalar(c), 1) == ValueExponent(i64{1}));
  auto z = LaurentFunction::polynomial(c, {0, 1});
  CHECK(gauss_norm(z, PadicScalar(c), Rational(1, 2)) == ValueExponent(Rational(1, 2)));
  CHECK(gauss_norm(LaurentFunction(c, PadicScalar(c)), PadicScalar(c), 3).is_infinite());

  CHECK(annulus_spectral_norm(z, 0, 1) == ValueExponent(i64{0}));
  CHECK(annulus_spectral_norm(LaurentFunction::polynomial(c, {5}), 0, 1) == ValueExponent(i64{1}));
  LaurentFunction g(PadicScalar(c), {{-1, PadicScalar(c, 5)}, {1, PadicScalar(c, 1)}});
  CHECK(annulus_spectral_norm(g, 0, 1) == ValueExponent(i64{0}));
  CHECK(gauss_norm(g, PadicScalar(c), Rational(1, 2)) == ValueExponent(Rational(1, 2)));
  CHECK_THROWS_AS(annulus_spectral_norm(z, 1, 0), PreconditionFailed);
}

TEST_CASE("gauss norm around another center") {
  PrecisionContext c(5, 8);
  // (t - 1)^2 seen from the disc D(0, 1) and from D(1, 1)
  auto f = LaurentFunction::polynomial(c, {1, -2, 1});
  CHECK(gauss_norm(f, PadicScalar(c, 1), 1) == ValueExponent(i64{2}));
  CHECK(gauss_norm(f, PadicScalar(c, 0), 1) == ValueExponent(i64{0}));
  CHECK(gauss_norm(f, PadicScalar(c, 6), 1) == ValueExponent(i64{2}));
  LaurentFunction g(PadicScalar(c), {{-1, PadicScalar(c, 1)}});
  CHECK(gauss_norm(g, PadicScalar(c, 5), 1) == ValueExponent(i64{-1}));
  CHECK_THROWS_AS(gauss_norm(g, PadicScalar(c, 1), 1), PreconditionFailed);
}

TEST_CASE("gauss norm is multiplicative") {
  std::mt19937_64 rng(11);
  PrecisionContext c(7, 14);
  for (int k = 0; k < 60; ++k) {
    auto f = rand_laurent(rng, c, -2, 2);
    auto g = rand_laurent(rng, c, -1, 3);
    Rational v(static_cast<i64>(rand_below(rng, 7)), static_cast<i64>(1 + rand_below(rng, 3)));
    auto a = gauss_norm(f, PadicScalar(c), v), b = gauss_norm(g, PadicScalar(c), v);
    CHECK(gauss_norm(f * g, PadicScalar(c), v) == a + b);
  }
}

TEST_CASE("gauss norm at v = 0 against Teichmuller evaluations") {
  std::mt19937_64 rng(5);
  PrecisionContext c(7, 10);
  for (int k = 0; k < 60; ++k) {
    auto f = rand_laurent(rng, c, -2, 2);
    ValueExponent e = gauss_norm(f, PadicScalar(c), 0);
    ValueExponent best = ValueExponent::infinity();
    for (u64 a = 1; a < 7; ++a) {
      ValueExponent got = f.evaluate(teichmuller_lift(a, c)).valuation().exponent();
      CHECK(got >= e);
      best = std::min(best, got);
    }
    CHECK(best == e);
  }
}

TEST_CASE("gauss norm on smaller discs against sampled evaluation") {
  std::mt19937_64 rng(13);
  PrecisionContext c(7, 14);
  for (int k = 0; k < 40; ++k) {
    auto f = rand_laurent(rng, c, 0, 4);
    PadicScalar center(c, static_cast<i64>(rand_below(rng, 300)));
    int v = static_cast<int>(rand_below(rng, 3));
    ValueExponent best = ValueExponent::infinity();
    i64 scale = 1;
    for (int j = 0; j < v; ++j) scale *= 7;
    for (u64 a = 0; a < 7; ++a) {
      PadicScalar t = center + teichmuller_lift(a, c) * PadicScalar(c, scale);
      best = std::min(best, f.evaluate(t).valuation().exponent());
    }
    CHECK(gauss_norm(f, center, v) == best);
  }
}

TEST_CASE("evaluation errors") {
  PrecisionContext c(5, 6);
  LaurentFunction g(PadicScalar(c), {{-1, PadicScalar(c, 1)}});
  CHECK_THROWS_AS(g.evaluate(PadicScalar(c)), IndeterminateAtPole);
  CHECK_THROWS_AS(g.evaluate(PadicScalar(c, 5)), PreconditionFailed);
  LaurentFunction h(PadicScalar(c, 1), {{1, PadicScalar(c, 1)}});
  CHECK_THROWS_AS(g * h, PreconditionFailed);
  PrecisionContext d(5, 7);
  CHECK_THROWS_AS(g.set(0, PadicScalar(d, 1)), ContextMismatch);
}

TEST_CASE("specialization") {
  PrecisionContext c(5, 8);
  PadicScalar a(c, 3);
  DiscPoint x = classify(rational_spec(a, 1));
  PointSpec outer = rational_spec(PadicScalar(c, 8), 1);
  outer.side = Side::outer;
  DiscPoint y = classify(outer);
  CHECK(specializes(x, y));
  CHECK_FALSE(specializes(y, x));
  CHECK(specializes(x, x));

  PointSpec inner = rational_spec(a, 1);
  inner.side = Side::inner;
  inner.beta = PadicScalar(c, 13);
  CHECK(specializes(x, classify(inner)));

  PointSpec pt;
  pt.center = PadicScalar(c, 8);
  pt.radius = PointSpec::Radius::zero;
  DiscPoint t1 = classify(pt);
  CHECK_FALSE(specializes(x, t1));
  CHECK_FALSE(specializes(t1, x));
  CHECK_FALSE(specializes(t1, y));
  CHECK(specializes(t1, t1));

  CHECK_FALSE(specializes(classify(rational_spec(a, 2)), y));
  PointSpec far = rational_spec(PadicScalar(c, 4), 1);
  far.side = Side::outer;
  CHECK_FALSE(specializes(x, classify(far)));
}

TEST_CASE("specialization closures and antisymmetry") {
  PrecisionContext c(3, 6);
  std::vector<DiscPoint> pts;
  for (i64 a : {0, 1, 3, 9}) {
    for (int v : {0, 1, 2}) {
      pts.push_back(classify(rational_spec(PadicScalar(c, a), v)));
      PointSpec o = rational_spec(PadicScalar(c, a), v);
      o.side = Side::outer;
      pts.push_back(classify(o));
      for (i64 b : {0, 1, 2}) {
        i64 step = 1;
        for (int j = 0; j < v; ++j) step *= 3;
        PointSpec in = rational_spec(PadicScalar(c, a), v);
        in.side = Side::inner;
        in.beta = PadicScalar(c, a + b * step);
        pts.push_back(classify(in));
      }
    }
    PointSpec s;
    s.center = PadicScalar(c, a);
    s.radius = PointSpec::Radius::zero;
    pts.push_back(classify(s));
  }
  for (const auto& x : pts)
    for (const auto& y : pts) {
      if (specializes(x, y) && specializes(y, x)) CHECK(same_point(x, y));
      bool expect = same_point(x, y);
      if (auto* g = std::get_if<TypeII>(&x))
        if (auto* s = std::get_if<TypeV>(&y))
          expect = expect || (s->v == g->v && (s->center - g->center).valuation().value >= g->v);
      CHECK(specializes(x, y) == expect);
    }
}

TEST_CASE("disc relation examples") {
  PrecisionContext c(5, 8);
  CHECK(disc_relation({PadicScalar(c, 0), 0}, {PadicScalar(c, 5), 1}) == DiscRelation::first_contains_second);
  CHECK(disc_relation({PadicScalar(c, 5), 1}, {PadicScalar(c, 0), 0}) == DiscRelation::second_contains_first);
  CHECK(disc_relation({PadicScalar(c, 0), 1}, {PadicScalar(c, 1), 1}) == DiscRelation::disjoint);
  CHECK(disc_relation({PadicScalar(c, 0), 1}, {PadicScalar(c, 25), 1}) == DiscRelation::equal);
  CHECK(disc_relation({PadicScalar(c, 0), Rational(1, 2)}, {PadicScalar(c, 5), Rational(1, 3)}) ==
        DiscRelation::second_contains_first);
  CHECK(relation_name(DiscRelation::disjoint) == "disjoint");
}

TEST_CASE("disc relation against membership sets") {
  PrecisionContext c(3, 4);
  auto members = [&](const Disc& d) {
    std::set<u64> s;
    for (u64 t = 0; t < 81; ++t)
      if ((PadicScalar(c, static_cast<i64>(t)) - d.center).valuation().exponent() >= ValueExponent(d.v))
        s.insert(t);
    return s;
  };
  std::vector<Disc> discs;
  for (i64 a : {0, 1, 2, 3, 4, 9, 10, 27})
    for (int v = 0; v <= 3; ++v) discs.push_back({PadicScalar(c, a), v});
  for (const auto& d1 : discs)
    for (const auto& d2 : discs) {
      auto s1 = members(d1), s2 = members(d2);
      bool sub12 = std::includes(s1.begin(), s1.end(), s2.begin(), s2.end());
      bool sub21 = std::includes(s2.begin(), s2.end(), s1.begin(), s1.end());
      DiscRelation r = disc_relation(d1, d2);
      if (sub12 && sub21)
        CHECK(r == DiscRelation::equal);
      else if (sub12)
        CHECK(r == DiscRelation::first_contains_second);
      else if (sub21)
        CHECK(r == DiscRelation::second_contains_first);
      else
        CHECK(r == DiscRelation::disjoint);
    }
}

TEST_CASE("disc containment is monotone for gauss norms") {
  std::mt19937_64 rng(21);
  PrecisionContext c(5, 12);
  for (int k = 0; k < 40; ++k) {
    auto f = rand_laurent(rng, c, 0, 4);
    PadicScalar a(c, static_cast<i64>(rand_below(rng, 125)));
    Disc big{a, static_cast<i64>(rand_below(rng, 2))};
    Disc small{a + PadicScalar(c, 25) * PadicScalar(c, static_cast<i64>(rand_below(rng, 5))),
               big.v + 1 + static_cast<i64>(rand_below(rng, 2))};
    REQUIRE(disc_relation(big, small) == DiscRelation::first_contains_second);
    CHECK(gauss_norm(f, small.center, small.v) >= gauss_norm(f, big.center, big.v));
  }
}

TEST_CASE("newton polygon examples") {
  PrecisionContext c(5, 8);
  auto f = poly(c, {125, 5, 1});
  auto segs = newton_polygon(f);
  REQUIRE(segs.size() == 2);
  CHECK(segs[0] == Segment{2, 1});
  CHECK(segs[1] == Segment{1, 1});
  CHECK(newton_polygon(poly(c, {-25, 1})) == std::vector<Segment>{{2, 1}});
  CHECK(newton_polygon(poly(c, {1, 0, 1})) == std::vector<Segment>{{0, 2}});
  CHECK(newton_polygon(poly(c, {5, 0, 1})) == std::vector<Segment>{{Rational(1, 2), 2}});

  CHECK(polygon_stability_bound(f) == std::vector<Rational>{3, 1, 0});
  CHECK(polygon_stability_bound(poly(c, {1, 0, 1})) == std::vector<Rational>{0, 0, 0});
  CHECK(polygon_stability_bound(poly(c, {-25, 1})) == std::vector<Rational>{2, 0});
  CHECK(polygon_stability_bound(poly(c, {25, 1, 1})) == std::vector<Rational>{2, 0, 0});
  CHECK(polygon_stability_bound(poly(c, {25, 25, 1})) == std::vector<Rational>{2, 1, 0});
}

TEST_CASE("newton polygon errors") {
  PrecisionContext c(5, 4);
  CHECK_THROWS_AS(newton_polygon(poly(c, {1, 0, 5})), PreconditionFailed);
  CHECK_THROWS_AS(newton_polygon(poly(c, {0, 1})), PrecisionInsufficient);
  CHECK_THROWS_AS(newton_polygon(poly(c, {625, 1})), PrecisionInsufficient);
  CHECK_NOTHROW(newton_polygon(poly(c, {125, 0, 1})));
  CHECK_THROWS_AS(polygon_stability_bound(poly(c, {0, 1})), PrecisionInsufficient);
}

TEST_CASE("newton polygon recovers root valuations") {
  std::mt19937_64 rng(3);
  PrecisionContext c(5, 16);
  for (int k = 0; k < 50; ++k) {
    std::vector<i64> roots;
    std::multiset<Rational> expect;
    int n = 1 + static_cast<int>(rand_below(rng, 4));
    for (int j = 0; j < n; ++j) {
      int e = static_cast<int>(rand_below(rng, 3));
      i64 r = 1 + static_cast<i64>(rand_below(rng, 4));
      for (int s = 0; s < e; ++s) r *= 5;
      roots.push_back(rand_below(rng, 2) ? r : -r);
      expect.insert(e);
    }
    CHECK(root_valuations(newton_polygon(from_roots(c, roots))) == expect);
  }
}

TEST_CASE("newton polygon is stable under bounded perturbations") {
  std::mt19937_64 rng(17);
  PrecisionContext c(5, 12);
  for (int k = 0; k < 60; ++k) {
    std::vector<PadicScalar> f;
    int n = 1 + static_cast<int>(rand_below(rng, 4));
    for (int i = 0; i < n; ++i) {
      i64 x = 1 + static_cast<i64>(rand_below(rng, 20));
      for (int s = static_cast<int>(rand_below(rng, 4)); s > 0; --s) x *= 5;
      f.emplace_back(c, rand_below(rng, 5) == 0 ? 0 : x);
    }
    if (f[0].is_zero()) f[0] = PadicScalar(c, 1);
    f.emplace_back(c, 1);
    auto segs = newton_polygon(f);
    auto e = polygon_stability_bound(f);
    for (int trial = 0; trial < 5; ++trial) {
      auto g = f;
      for (size_t i = 0; i < g.size(); ++i) {
        int shift = static_cast<int>(floor_rational(e[i])) + 1;
        if (shift >= c.abs_prec()) continue;
        i64 delta = static_cast<i64>(rand_below(rng, 50)) - 25;
        for (int s = 0; s < shift; ++s) delta *= 5;
        g[i] += PadicScalar(c, delta);
      }
      CHECK(newton_polygon(g) == segs);
    }
  }
}
