#include "prl/log_point.hpp"

namespace prl {

std::string precision_statement(const PrecisionContext& ctx, int order) {
  return "mod " + std::to_string(ctx.p()) + "^" + std::to_string(ctx.abs_prec()) + ", to order " +
         std::to_string(order);
}

Verdict compare_series(const PDSeries& lhs, const PDSeries& rhs) {
  Verdict v;
  v.precision = precision_statement(lhs.ctx(), lhs.ring()->pd_order());
  if (auto idx = first_difference(lhs, rhs)) {
    v.ok = false;
    v.failing = lhs.index_str(*idx);
  }
  return v;
}

static void require_unit_constant(const PDSeries& t) {
  if (!t.constant_term().det().is_unit())
    throw NonUnitConstantTerm("constant term of the descent matrix is not invertible");
}

LogPointDatum::LogPointDatum(PDSeries t, std::optional<PadicMatrix> f) : T(std::move(t)), phi(std::move(f)) {
  const RingSpec& r = *T.ring();
  if (r.size() != 1 || r.var(0).kind != VarKind::pd)
    throw InputError("log-point datum needs a ring with one divided-power variable");
  require_unit_constant(T);
}

const std::string& LogPointDatum::var() const { return T.ring()->var(0).name; }

MultiLogPointDatum::MultiLogPointDatum(PDSeries t) : T(std::move(t)) {
  const RingSpec& r = *T.ring();
  if (r.size() < 1) throw InputError("multi log-point datum needs at least one variable");
  for (const auto& v : r.vars())
    if (v.kind != VarKind::pd) throw InputError("multi log-point variables must be divided powers");
  require_unit_constant(T);
}

PhiNModule::PhiNModule(PadicMatrix f, PadicMatrix n) : phi(std::move(f)), N(std::move(n)) {
  if (!phi.square() || !N.square() || phi.dim() != N.dim())
    throw InputError("phi and N must be square of equal size");
  Valuation v = phi.det().valuation();
  if (v.at_floor) throw InputError("det(phi) vanishes at the working precision");
  det_valuation = v.value;
}

Verdict cocycle_check(const LogPointDatum& d) {
  const std::string& t = d.var();
  const int order = d.T.ring()->pd_order();
  const PrecisionContext& c = d.T.ctx();
  Ring r2 = pd_ring({t + "1", t + "2"}, order);
  PDSeries t1 = PDSeries::variable(r2, c, t + "1"), t2 = PDSeries::variable(r2, c, t + "2");
  PDSeries lhs = pd_substitute(d.T, {r2, {{t, t2}}}) * pd_substitute(d.T, {r2, {{t, t1}}});
  PDSeries rhs = pd_substitute(d.T, {r2, {{t, t1 * t2 + t1 + t2}}});
  return compare_series(lhs, rhs);
}

PadicMatrix monodromy(const LogPointDatum& d) {
  Verdict v = cocycle_check(d);
  if (!v) throw CocycleInvalid("cocycle fails at coefficient " + v.failing);
  if (!d.T.constant_term().is_identity())
    throw InternalConsistency("cocycle holds but the constant term is not the identity");
  MultiIndex one{};
  one[0] = 1;
  return d.T.coeff(one);
}

LogPointDatum from_monodromy(const PadicMatrix& n, int order) {
  return LogPointDatum(binomial_power(pd_ring({"t"}, order), "t", n));
}

bool descends_to_point(const LogPointDatum& d) {
  PadicMatrix n = monodromy(d);
  if (!n.is_zero()) return false;
  if (!(d.T == PDSeries::identity(d.T.ring(), d.T.ctx(), d.dim())))
    throw InternalConsistency("monodromy vanishes but the descent matrix is not the identity");
  return true;
}

Verdict phi_compatibility(const PhiNModule& m) {
  Verdict v;
  v.precision = precision_statement(m.N.ctx(), 0);
  PadicMatrix lhs = m.N * m.phi;
  PadicMatrix rhs = (m.phi * m.N).scaled(m.N.ctx().p());
  if (!(lhs == rhs)) {
    v.ok = false;
    for (int i = 0; i < lhs.rows() && v.failing.empty(); ++i)
      for (int j = 0; j < lhs.cols(); ++j)
        if (lhs.at(i, j) != rhs.at(i, j)) {
          v.failing = "entry (" + std::to_string(i) + "," + std::to_string(j) + ")";
          break;
        }
  }
  return v;
}

Verdict multi_cocycle_check(const MultiLogPointDatum& d) {
  const RingSpec& r = *d.T.ring();
  const PrecisionContext& c = d.T.ctx();
  std::vector<std::string> names;
  for (const auto& v : r.vars()) names.push_back(v.name + "'1");
  for (const auto& v : r.vars()) names.push_back(v.name + "'2");
  Ring r2 = pd_ring(names, r.pd_order());
  Substitution first{r2, {}}, second{r2, {}}, joint{r2, {}};
  for (const auto& v : r.vars()) {
    PDSeries a = PDSeries::variable(r2, c, v.name + "'1");
    PDSeries b = PDSeries::variable(r2, c, v.name + "'2");
    first.images.emplace(v.name, a);
    second.images.emplace(v.name, b);
    joint.images.emplace(v.name, a * b + a + b);
  }
  return compare_series(pd_substitute(d.T, second) * pd_substitute(d.T, first),
                        pd_substitute(d.T, joint));
}

static void require_multi_cocycle(const MultiLogPointDatum& d) {
  Verdict v = multi_cocycle_check(d);
  if (!v) throw CocycleInvalid("cocycle fails at coefficient " + v.failing);
}

static PadicMatrix directional_unchecked(const MultiLogPointDatum& d, const std::vector<int>& dir) {
  const RingSpec& r = *d.T.ring();
  if (static_cast<int>(dir.size()) != r.size())
    throw InputError("direction has " + std::to_string(dir.size()) + " entries, expected " +
                     std::to_string(r.size()));
  const PrecisionContext& c = d.T.ctx();
  Ring r1 = pd_ring({"t"}, r.pd_order());
  Substitution s{r1, {}};
  for (int k = 0; k < r.size(); ++k) {
    if (dir[k] < 0) throw InputError("direction entries must be non-negative");
    PDSeries img = binomial_power(r1, "t", PadicMatrix::scalar(c, 1, dir[k])) -
                   PDSeries::identity(r1, c, 1);
    s.images.emplace(r.var(k).name, img);
  }
  PDSeries pulled = pd_substitute(d.T, s);
  MultiIndex one{};
  one[0] = 1;
  return pulled.coeff(one);
}

PadicMatrix directional_monodromy(const MultiLogPointDatum& d, const std::vector<int>& dir) {
  require_multi_cocycle(d);
  return directional_unchecked(d, dir);
}

std::vector<MultiIndex> nontrivial_coefficients(const MultiLogPointDatum& d) {
  std::vector<MultiIndex> out;
  for (const auto& [idx, v] : d.T.terms())
    if (!(idx == MultiIndex{})) out.push_back(idx);
  return out;
}

bool all_directions_trivial(const MultiLogPointDatum& d) {
  require_multi_cocycle(d);
  const int n = d.factors();
  bool coeff_trivial = nontrivial_coefficients(d).empty();
  std::vector<std::vector<int>> dirs;
  for (int k = 0; k < n; ++k) {
    std::vector<int> e(n, 0);
    e[k] = 1;
    dirs.push_back(e);
  }
  dirs.push_back(std::vector<int>(n, 1));
  for (const auto& dir : dirs)
    if (coeff_trivial && !directional_unchecked(d, dir).is_zero())
      throw InternalConsistency("trivial coefficients but a nonzero directional monodromy");
  return coeff_trivial;
}

MultiLogPointDatum multi_binomial(const Ring& ring, const std::vector<PadicMatrix>& ns) {
  if (static_cast<int>(ns.size()) != ring->size()) throw InputError("one exponent per variable");
  const PrecisionContext& c = ns.at(0).ctx();
  PDSeries t = PDSeries::identity(ring, c, ns[0].dim());
  for (int k = 0; k < ring->size(); ++k) t = t * binomial_power(ring, ring->var(k).name, ns[k]);
  return MultiLogPointDatum(t);
}

}  // namespace prl
