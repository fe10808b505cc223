#include "prl/line_node.hpp"

namespace prl {

Ring affine_ring(int order) {
  return make_ring({{"x1", VarKind::poly}, {"x2'", VarKind::pd}, {"t", VarKind::pd}}, order);
}

Ring affine_triple_ring(int order) {
  return make_ring({{"y1", VarKind::poly},
                    {"y2'", VarKind::pd},
                    {"y3'", VarKind::pd},
                    {"t1", VarKind::pd},
                    {"t2", VarKind::pd}},
                   order);
}

Ring node_ring(int order) {
  return make_ring(
      {{"x1", VarKind::poly}, {"y1", VarKind::poly}, {"dx", VarKind::pd}, {"dy", VarKind::pd}},
      order);
}

Ring node_triple_ring(int order) {
  return make_ring({{"x1", VarKind::poly},
                    {"y1", VarKind::poly},
                    {"dx1", VarKind::pd},
                    {"dy1", VarKind::pd},
                    {"dx2", VarKind::pd},
                    {"dy2", VarKind::pd}},
                   order);
}

Ring branch_ring(int branch, int order) {
  if (branch != 0 && branch != 1) throw InputError("branch must be 0 or 1");
  std::string c = branch == 0 ? "y" : "x";
  return make_ring({{c + "1", VarKind::laurent, -64, 64},
                    {"d_" + c, VarKind::pd},
                    {"t_" + c, VarKind::pd}},
                   order);
}

static void require_ring(const PDSeries& t, const Ring& want, const char* what) {
  if (!(*t.ring() == *want)) throw InputError(std::string(what) + " datum has the wrong ring");
  if (!t.constant_term().det().is_unit())
    throw NonUnitConstantTerm(std::string(what) + " datum has a non-invertible constant term");
}

AffineDescentDatum::AffineDescentDatum(PDSeries t, std::optional<PadicMatrix> f)
    : T(std::move(t)), phi(std::move(f)) {
  require_ring(T, affine_ring(T.ring()->pd_order()), "affine");
}

NodeDescentDatum::NodeDescentDatum(PDSeries t, std::optional<PadicMatrix> f)
    : T(std::move(t)), phi(std::move(f)) {
  require_ring(T, node_ring(T.ring()->pd_order()), "node");
}

BranchDatum::BranchDatum(PDSeries t, int b) : T(std::move(t)), branch(b) {
  require_ring(T, branch_ring(b, T.ring()->pd_order()), "branch");
}

Verdict affine_cocycle_check(const AffineDescentDatum& d) {
  const int order = d.T.ring()->pd_order();
  const PrecisionContext& c = d.T.ctx();
  Ring r = affine_triple_ring(order);
  auto v = [&](const char* n) { return PDSeries::variable(r, c, n); };
  PDSeries y1 = v("y1"), y2 = v("y2'"), y3 = v("y3'"), t1 = v("t1"), t2 = v("t2");
  PDSeries i12 = pd_substitute(d.T, {r, {{"x1", y1}, {"x2'", y2}, {"t", t1}}});
  PDSeries i13 = pd_substitute(d.T, {r, {{"x1", y1}, {"x2'", y2 + y3}, {"t", t1 * t2 + t1 + t2}}});
  PDSeries i23 = pd_substitute(d.T, {r, {{"x1", y1 + y2}, {"x2'", y3}, {"t", t2}}});
  return compare_series(i23 * i12, i13);
}

static PadicMatrix first_t_coefficient(const PDSeries& s) {
  MultiIndex one{};
  one[0] = 1;
  return s.coeff(one);
}

static PDSeries restrict_to_point(const AffineDescentDatum& d, u64 alpha) {
  const PrecisionContext& c = d.T.ctx();
  Ring r = pd_ring({"t"}, d.T.ring()->pd_order());
  PDSeries a = PDSeries::constant(r, PadicMatrix::scalar(c, 1, teichmuller_lift(alpha, c).signed_residue()));
  return pd_substitute(d.T, {r, {{"x1", a}, {"x2'", PDSeries(r, c, 1)}}});
}

PadicMatrix monodromy_at_point(const AffineDescentDatum& d, u64 alpha) {
  Verdict v = affine_cocycle_check(d);
  if (!v) throw CocycleInvalid("affine cocycle fails at coefficient " + v.failing);
  return first_t_coefficient(restrict_to_point(d, alpha));
}

RigidityCertificate affine_rigidity_witness(const AffineDescentDatum& d, u64 alpha) {
  if (!monodromy_at_point(d, alpha).is_zero())
    throw PreconditionFailed("monodromy at " + std::to_string(alpha) + " is nonzero");
  RigidityCertificate cert;
  cert.precision = precision_statement(d.T.ctx(), d.T.ring()->pd_order());
  const int ti = d.T.ring()->index("t");
  for (const auto& [idx, v] : d.T.terms())
    if (idx[ti] > 0) {
      cert.ok = false;
      cert.counterexample = "nonzero coefficient at " + d.T.index_str(idx) +
                            " (precision or truncation breach)";
      break;
    }
  return cert;
}

Verdict node_cocycle_check(const NodeDescentDatum& d) {
  const int order = d.T.ring()->pd_order();
  const PrecisionContext& c = d.T.ctx();
  Ring r = node_triple_ring(order);
  auto v = [&](const char* n) { return PDSeries::variable(r, c, n); };
  PDSeries x1 = v("x1"), y1 = v("y1"), dx1 = v("dx1"), dy1 = v("dy1"), dx2 = v("dx2"),
           dy2 = v("dy2");
  PDSeries one = PDSeries::identity(r, c, 1);
  PDSeries i12 = pd_substitute(d.T, {r, {{"dx", dx1}, {"dy", dy1}}});
  PDSeries i23 = pd_substitute(
      d.T, {r, {{"x1", x1 * (one + dx1)}, {"y1", y1 * (one + dy1)}, {"dx", dx2}, {"dy", dy2}}});
  PDSeries i13 =
      pd_substitute(d.T, {r, {{"dx", dx1 + dx2 + dx1 * dx2}, {"dy", dy1 + dy2 + dy1 * dy2}}});
  return compare_series(i23 * i12, i13);
}

BranchDatum node_branch_restriction(const NodeDescentDatum& d, int branch) {
  const PrecisionContext& c = d.T.ctx();
  Ring r = branch_ring(branch, d.T.ring()->pd_order());
  PDSeries zero(r, c, 1);
  if (branch == 0) {
    MultiIndex m{};
    m[0] = -1;
    m[1] = 1;
    PDSeries dy = PDSeries::scalar_monomial(r, c, m);
    return BranchDatum(pd_substitute(d.T, {r, {{"x1", zero},
                                                {"y1", PDSeries::variable(r, c, "y1")},
                                                {"dx", PDSeries::variable(r, c, "t_y")},
                                                {"dy", dy}}}),
                       0);
  }
  MultiIndex m{};
  m[0] = -1;
  m[1] = 1;
  PDSeries dx = PDSeries::scalar_monomial(r, c, m);
  return BranchDatum(pd_substitute(d.T, {r, {{"x1", PDSeries::variable(r, c, "x1")},
                                              {"y1", zero},
                                              {"dx", dx},
                                              {"dy", PDSeries::variable(r, c, "t_x")}}}),
                     1);
}

PadicMatrix branch_monodromy_at(const BranchDatum& b, u64 alpha) {
  const PrecisionContext& c = b.T.ctx();
  if (alpha % c.p() == 0) throw InputError("branch points must be units");
  Ring r = pd_ring({"t"}, b.T.ring()->pd_order());
  std::string n = b.branch == 0 ? "y" : "x";
  PDSeries a = PDSeries::constant(r, PadicMatrix::scalar(c, 1, teichmuller_lift(alpha, c).signed_residue()));
  PDSeries s = pd_substitute(
      b.T, {r, {{n + "1", a}, {"d_" + n, PDSeries(r, c, 1)}, {"t_" + n, PDSeries::variable(r, c, "t")}}});
  return first_t_coefficient(s);
}

bool node_descends(const NodeDescentDatum& d) {
  Verdict v = node_cocycle_check(d);
  if (!v) throw CocycleInvalid("node cocycle fails at coefficient " + v.failing);
  for (const auto& [idx, c] : d.T.terms())
    if (idx[0] < idx[2] || idx[1] < idx[3]) return false;
  return true;
}

MultiLogPointDatum node_center_restriction(const NodeDescentDatum& d) {
  const PrecisionContext& c = d.T.ctx();
  Ring r = pd_ring({"t1", "t2"}, d.T.ring()->pd_order());
  PDSeries zero(r, c, 1);
  return MultiLogPointDatum(pd_substitute(
      d.T, {r, {{"x1", zero}, {"y1", zero}, {"dx", PDSeries::variable(r, c, "t1")},
                {"dy", PDSeries::variable(r, c, "t2")}}}));
}

static PDSeries gauge_factor(const Ring& ring, const PrecisionContext& ctx, int d,
                             const GaugeFactor& f, i64 sign, const PDSeries& x, const PDSeries& y) {
  if (f.i == f.j || f.i < 0 || f.j < 0 || f.i >= d || f.j >= d)
    throw InputError("gauge factor needs an off-diagonal position");
  PDSeries mono = PDSeries::identity(ring, ctx, 1).scaled(ctx.reduce(sign * f.c));
  for (int k = 0; k < f.a; ++k) mono = mono * x;
  for (int k = 0; k < f.b; ++k) mono = mono * y;
  return PDSeries::identity(ring, ctx, d) + mono * PDSeries::constant(ring, PadicMatrix::elementary(ctx, d, f.i, f.j));
}

PDSeries gauge_matrix(const Ring& ring, const PrecisionContext& ctx, int d,
                      const std::vector<GaugeFactor>& g, const PDSeries& x, const PDSeries& y) {
  PDSeries p = PDSeries::identity(ring, ctx, d);
  for (const auto& f : g) p = p * gauge_factor(ring, ctx, d, f, 1, x, y);
  return p;
}

PDSeries gauge_inverse(const Ring& ring, const PrecisionContext& ctx, int d,
                       const std::vector<GaugeFactor>& g, const PDSeries& x, const PDSeries& y) {
  PDSeries p = PDSeries::identity(ring, ctx, d);
  for (auto it = g.rbegin(); it != g.rend(); ++it) p = p * gauge_factor(ring, ctx, d, *it, -1, x, y);
  return p;
}

AffineDescentDatum affine_gauge_datum(const PadicMatrix& n, const std::vector<GaugeFactor>& g,
                                      int order) {
  const PrecisionContext& c = n.ctx();
  const int d = n.dim();
  Ring r = affine_ring(order);
  PDSeries x1 = PDSeries::variable(r, c, "x1");
  PDSeries x2 = x1 + PDSeries::variable(r, c, "x2'");
  PDSeries none(r, c, 1);
  for (const auto& f : g)
    if (f.b) throw InputError("affine gauge factors depend on x only");
  PDSeries t = gauge_inverse(r, c, d, g, x2, none) * binomial_power(r, "t", n) *
               gauge_matrix(r, c, d, g, x1, none);
  return AffineDescentDatum(t);
}

NodeDescentDatum node_gauge_datum(const PadicMatrix& n, const std::vector<GaugeFactor>& g,
                                  int order) {
  const PrecisionContext& c = n.ctx();
  const int d = n.dim();
  Ring r = node_ring(order);
  PDSeries one = PDSeries::identity(r, c, 1);
  PDSeries x1 = PDSeries::variable(r, c, "x1"), y1 = PDSeries::variable(r, c, "y1");
  PDSeries x2 = x1 * (one + PDSeries::variable(r, c, "dx"));
  PDSeries y2 = y1 * (one + PDSeries::variable(r, c, "dy"));
  PDSeries t = gauge_inverse(r, c, d, g, x2, y2) * binomial_power(r, "dx", n) *
               gauge_matrix(r, c, d, g, x1, y1);
  return NodeDescentDatum(t);
}

}  // namespace prl
