#include "doctest.h"
#include "prl/line_node.hpp"
#include "support.hpp"

using namespace prl;
using namespace prl::testing;

namespace {

MultiIndex ix(std::initializer_list<int> e) {
  MultiIndex m{};
  int i = 0;
  for (int x : e) m[i++] = static_cast<std::int16_t>(x);
  return m;
}

}  // namespace

TEST_CASE("affine cocycle examples") {
  PrecisionContext c(5, 6);
  Ring r = affine_ring(4);
  CHECK(affine_cocycle_check(AffineDescentDatum(PDSeries::identity(r, c, 2))).ok);
  PadicMatrix n(c, 2, 2, {1, 2, 0, 3});
  CHECK(affine_cocycle_check(affine_gauge_datum(n, {}, 4)).ok);
  PDSeries bad = PDSeries::identity(r, c, 2) +
                 PDSeries::monomial(r, ix({0, 1, 1}), PadicMatrix::elementary(c, 2, 0, 1));
  Verdict v = affine_cocycle_check(AffineDescentDatum(bad));
  CHECK_FALSE(v.ok);
  CHECK(v.failing.find("t") != std::string::npos);
}

TEST_CASE("gauge data are cocycle valid") {
  std::mt19937_64 rng(7);
  PrecisionContext c(3, 6);
  for (int k = 0; k < 5; ++k) {
    PadicMatrix n = rand_strict_upper(rng, c, 3);
    AffineDescentDatum d = affine_gauge_datum(n, rand_gauge(rng, 3, 2, false), 4);
    CHECK(affine_cocycle_check(d).ok);
  }
  PDSeries x = PDSeries::variable(affine_ring(3), c, "x1");
  std::vector<GaugeFactor> g{{0, 1, 2, 1}, {1, 0, -1, 2}};
  Ring r = affine_ring(3);
  PDSeries none(r, c, 1);
  CHECK(gauge_matrix(r, c, 2, g, x, none) * gauge_inverse(r, c, 2, g, x, none) ==
        PDSeries::identity(r, c, 2));
  CHECK_THROWS_AS(gauge_matrix(r, c, 2, {{0, 0, 1, 1}}, x, none), InputError);
}

TEST_CASE("monodromy at points") {
  PrecisionContext c(5, 6);
  Ring r = affine_ring(4);
  AffineDescentDatum id(PDSeries::identity(r, c, 2));
  for (u64 a = 0; a < 5; ++a) CHECK(monodromy_at_point(id, a).is_zero());
  PadicMatrix n(c, 2, 2, {0, 7, 0, 0});
  AffineDescentDatum d = affine_gauge_datum(n, {}, 4);
  for (u64 a = 0; a < 5; ++a) CHECK(monodromy_at_point(d, a) == n);
  std::vector<GaugeFactor> g{{0, 1, 3, 1}, {1, 0, 2, 1}};
  AffineDescentDatum nonlog = affine_gauge_datum(PadicMatrix::zero(c, 2), g, 4);
  CHECK_FALSE(nonlog.T == PDSeries::identity(r, c, 2));
  for (u64 a = 0; a < 5; ++a) CHECK(monodromy_at_point(nonlog, a).is_zero());
  PDSeries bad = PDSeries::identity(r, c, 1) + PDSeries::scalar_monomial(r, c, ix({0, 1, 1}));
  CHECK_THROWS_AS(monodromy_at_point(AffineDescentDatum(bad), 1), CocycleInvalid);
}

TEST_CASE("gauged monodromy is conjugate at every point") {
  std::mt19937_64 rng(12);
  PrecisionContext c(7, 5);
  PadicMatrix n = rand_strict_upper(rng, c, 3);
  std::vector<GaugeFactor> g = rand_gauge(rng, 3, 2, false);
  AffineDescentDatum d = affine_gauge_datum(n, g, 3);
  Ring r = pd_ring({"t"}, 1);
  for (u64 a = 0; a < 7; ++a) {
    PDSeries x = PDSeries::constant(r, PadicMatrix::scalar(c, 1, teichmuller_lift(a, c).signed_residue()));
    PadicMatrix p = gauge_matrix(r, c, 3, g, x, PDSeries(r, c, 1)).constant_term();
    CHECK(monodromy_at_point(d, a) == p.inverse() * n * p);
  }
}

TEST_CASE("affine rigidity witness") {
  PrecisionContext c(5, 6);
  Ring r = affine_ring(4);
  CHECK(affine_rigidity_witness(AffineDescentDatum(PDSeries::identity(r, c, 2)), 2).ok);
  PDSeries bad = PDSeries::identity(r, c, 1) + PDSeries::scalar_monomial(r, c, ix({0, 1, 1}));
  CHECK_THROWS_AS(affine_rigidity_witness(AffineDescentDatum(bad), 0), CocycleInvalid);
  AffineDescentDatum d = affine_gauge_datum(PadicMatrix::elementary(c, 2, 0, 1), {}, 4);
  for (u64 a = 0; a < 5; ++a) CHECK_THROWS_AS(affine_rigidity_witness(d, a), PreconditionFailed);
  AffineDescentDatum nonlog = affine_gauge_datum(PadicMatrix::zero(c, 2), {{0, 1, 1, 1}}, 4);
  RigidityCertificate cert = affine_rigidity_witness(nonlog, 3);
  CHECK(cert.ok);
  CHECK(cert.precision == "mod 5^6, to order 4");
}

TEST_CASE("branch restriction examples") {
  PrecisionContext c(5, 6);
  Ring r = node_ring(4);
  NodeDescentDatum id(PDSeries::identity(r, c, 1));
  BranchDatum b0 = node_branch_restriction(id, 0);
  CHECK(b0.T == PDSeries::identity(branch_ring(0, 4), c, 1));

  PDSeries f = PDSeries::identity(r, c, 1) + PDSeries::scalar_monomial(r, c, ix({0, 0, 1, 0}), 3);
  BranchDatum fb = node_branch_restriction(NodeDescentDatum(f), 0);
  Ring br = branch_ring(0, 4);
  CHECK(fb.T == PDSeries::identity(br, c, 1) + PDSeries::scalar_monomial(br, c, ix({0, 0, 1}), 3));
  CHECK(branch_monodromy_at(fb, 1) == PadicMatrix::scalar(c, 1, 3));

  PDSeries fx = PDSeries::identity(r, c, 1) + PDSeries::scalar_monomial(r, c, ix({1, 0, 1, 0}), 3);
  BranchDatum fxb = node_branch_restriction(NodeDescentDatum(fx), 0);
  CHECK(fxb.T.coeff(ix({0, 0, 1})).is_zero());

  PDSeries fy = PDSeries::identity(r, c, 1) + PDSeries::scalar_monomial(r, c, ix({0, 2, 0, 1}), 2);
  BranchDatum fyb = node_branch_restriction(NodeDescentDatum(fy), 0);
  CHECK(fyb.T.scalar_coeff(ix({1, 1, 0})) == 2);
  CHECK_THROWS_AS(node_branch_restriction(id, 2), InputError);
  CHECK_THROWS_AS(branch_monodromy_at(b0, 0), InputError);
}

TEST_CASE("node descent examples") {
  PrecisionContext c(5, 6);
  Ring r = node_ring(4);
  CHECK(node_descends(NodeDescentDatum(PDSeries::identity(r, c, 2))));
  PadicMatrix a = PadicMatrix::elementary(c, 2, 0, 1);
  CHECK_FALSE(node_descends(node_gauge_datum(a, {}, 4)));
  PDSeries lone = PDSeries::identity(r, c, 2) + PDSeries::monomial(r, ix({0, 0, 1, 0}), a);
  CHECK_THROWS_AS(node_descends(NodeDescentDatum(lone)), CocycleInvalid);

  std::vector<GaugeFactor> g{{0, 1, 2, 1, 0}, {1, 0, 1, 0, 1}};
  NodeDescentDatum pb = node_gauge_datum(PadicMatrix::zero(c, 2), g, 4);
  CHECK(pb.T.coeff(ix({0, 0, 1, 0})).is_zero());
  CHECK_FALSE(pb.T.coeff(ix({1, 0, 1, 0})).is_zero());
  CHECK(node_cocycle_check(pb).ok);
  CHECK(node_descends(pb));
}

TEST_CASE("center restriction examples") {
  PrecisionContext c(5, 6);
  Ring r = node_ring(4);
  MultiLogPointDatum id = node_center_restriction(NodeDescentDatum(PDSeries::identity(r, c, 2)));
  CHECK(id.T == PDSeries::identity(pd_ring({"t1", "t2"}, 4), c, 2));

  PadicMatrix a = PadicMatrix::elementary(c, 2, 0, 1), b = PadicMatrix::elementary(c, 2, 1, 0);
  PDSeries f = PDSeries::identity(r, c, 2) + PDSeries::monomial(r, ix({0, 0, 1, 0}), a) +
               PDSeries::monomial(r, ix({1, 0, 1, 0}), b) + PDSeries::monomial(r, ix({0, 0, 0, 1}), b);
  MultiLogPointDatum z = node_center_restriction(NodeDescentDatum(f));
  CHECK(z.T.coeff(ix({1, 0})) == a);
  CHECK(z.T.coeff(ix({0, 1})) == b);

  PadicMatrix n(c, 2, 2, {2, 1, 0, 2});
  MultiLogPointDatum zn = node_center_restriction(node_gauge_datum(n, {}, 4));
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k) CHECK(directional_monodromy(zn, {m, k}) == n.scaled(m));
}

TEST_CASE("descent equivalences on gauged families") {
  std::mt19937_64 rng(44);
  PrecisionContext c(3, 6);
  for (int k = 0; k < 6; ++k) {
    bool log = k % 2;
    PadicMatrix n = log ? PadicMatrix::elementary(c, 2, 0, 1) : PadicMatrix::zero(c, 2);
    NodeDescentDatum d = node_gauge_datum(n, rand_gauge(rng, 2, 2, true), 4);
    bool desc = node_descends(d);
    bool branches_trivial = true;
    for (int br = 0; br < 2; ++br) {
      BranchDatum b = node_branch_restriction(d, br);
      for (u64 a = 1; a < 3; ++a) branches_trivial &= branch_monodromy_at(b, a).is_zero();
    }
    bool center = all_directions_trivial(node_center_restriction(d));
    CHECK(desc == !log);
    CHECK(branches_trivial == desc);
    CHECK(center == desc);
  }
}

TEST_CASE("frobenius is irrelevant to node verdicts") {
  PrecisionContext c(5, 5);
  NodeDescentDatum d = node_gauge_datum(PadicMatrix::elementary(c, 2, 0, 1), {{1, 0, 1, 1, 0}}, 3);
  NodeDescentDatum dphi(d.T, PadicMatrix(c, 2, 2, {1, 0, 0, 5}));
  CHECK(node_descends(d) == node_descends(dphi));
  CHECK(node_cocycle_check(d).ok == node_cocycle_check(dphi).ok);
  AffineDescentDatum a = affine_gauge_datum(PadicMatrix::elementary(c, 2, 0, 1), {}, 3);
  AffineDescentDatum aphi(a.T, PadicMatrix(c, 2, 2, {1, 0, 0, 5}));
  CHECK(monodromy_at_point(a, 2) == monodromy_at_point(aphi, 2));
}
