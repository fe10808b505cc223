#include "prl/log_connection.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace prl {

Ring isocrystal_ring(int order) {
  return make_ring({{"x1", VarKind::poly}, {"y1", VarKind::poly}, {"dx", VarKind::pd}}, order, Relation{0, 1});
}

Ring isocrystal_triple_ring(int order) {
  return make_ring({{"x1", VarKind::poly}, {"y1", VarKind::poly}, {"dx1", VarKind::pd}, {"dx2", VarKind::pd}},
                   order, Relation{0, 1});
}

NodeIsocrystalDatum::NodeIsocrystalDatum(PDSeries t) : T(std::move(t)) {
  if (!(*T.ring() == *isocrystal_ring(T.ring()->pd_order())))
    throw InputError("isocrystal data live over W<x1,y1><dx>/(x1 y1 - p)");
  if (!T.constant_term().det().is_unit()) throw NonUnitConstantTerm("constant term is not invertible");
}

NodeIsocrystalDatum to_isocrystal(const NodeDescentDatum& d) {
  const PrecisionContext& c = d.T.ctx();
  Ring r = isocrystal_ring(d.T.ring()->pd_order());
  PDSeries inv = binomial_power(r, "dx", PadicMatrix::scalar(c, 1, -1));
  return NodeIsocrystalDatum(pd_substitute(d.T, {r, {{"dy", inv - PDSeries::identity(r, c, 1)}}}));
}

Verdict isocrystal_cocycle_check(const NodeIsocrystalDatum& d) {
  const PrecisionContext& c = d.T.ctx();
  Ring r = isocrystal_triple_ring(d.T.ring()->pd_order());
  PDSeries x1 = PDSeries::variable(r, c, "x1"), y1 = PDSeries::variable(r, c, "y1");
  PDSeries dx1 = PDSeries::variable(r, c, "dx1"), dx2 = PDSeries::variable(r, c, "dx2");
  PDSeries one = PDSeries::identity(r, c, 1);
  PDSeries inv1 = binomial_power(r, "dx1", PadicMatrix::scalar(c, 1, -1));
  PDSeries i12 = pd_substitute(d.T, {r, {{"dx", dx1}}});
  PDSeries i23 = pd_substitute(d.T, {r, {{"x1", x1 * (one + dx1)}, {"y1", y1 * inv1}, {"dx", dx2}}});
  PDSeries i13 = pd_substitute(d.T, {r, {{"dx", dx1 + dx2 + dx1 * dx2}}});
  return compare_series(i23 * i12, i13);
}

LaurentMatrix laurent_mul(const LaurentMatrix& a, const LaurentMatrix& b) {
  LaurentMatrix out;
  for (const auto& [i, x] : a)
    for (const auto& [j, y] : b) {
      auto it = out.find(i + j);
      if (it == out.end())
        out.emplace(i + j, x * y);
      else
        it->second += x * y;
    }
  std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

LaurentMatrix laurent_add(const LaurentMatrix& a, const LaurentMatrix& b) {
  LaurentMatrix out = a;
  for (const auto& [j, y] : b) {
    auto it = out.find(j);
    if (it == out.end())
      out.emplace(j, y);
    else
      it->second += y;
  }
  std::erase_if(out, [](const auto& kv) { return kv.second.is_zero(); });
  return out;
}

LaurentMatrix laurent_theta(const LaurentMatrix& a) {
  LaurentMatrix out;
  for (const auto& [k, m] : a) {
    PadicMatrix t = m.scaled(m.ctx().reduce(k));
    if (!t.is_zero()) out.emplace(k, t);
  }
  return out;
}

std::string laurent_str(const LaurentMatrix& a) {
  if (a.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, m] : a) {
    os << (first ? "" : " + ") << m.str() << "*x^" << k;
    first = false;
  }
  return os.str();
}

LogConnection constant_connection(const PadicMatrix& a) {
  if (!a.square()) throw InputError("connection matrix must be square");
  LogConnection c{a.ctx(), a.dim(), {}};
  if (!a.is_zero()) c.A.emplace(0, a);
  return c;
}

LogConnection connection_from_descent(const NodeIsocrystalDatum& d) {
  Verdict v = isocrystal_cocycle_check(d);
  if (!v) throw CocycleInvalid("isocrystal cocycle fails at coefficient " + v.failing);
  const PrecisionContext& c = d.T.ctx();
  int dim = d.T.dim();
  for (const auto& [idx, coeff] : d.T.terms()) {
    if (idx[2] != 0) continue;
    bool constant = idx[0] == 0 && idx[1] == 0;
    PadicMatrix m = d.T.coeff(idx);
    if (!(constant ? m.is_identity() : m.is_zero()))
      throw InternalConsistency("restriction to dx = 0 of a cocycle is not the identity");
  }
  LogConnection out{c, dim, {}};
  for (const auto& [idx, coeff] : d.T.terms()) {
    if (idx[2] != 1) continue;
    // x^a y^b with a b = 0 after the relation; y = p x^{-1}
    int k = idx[0] - idx[1];
    PadicMatrix m = -d.T.coeff(idx);
    if (idx[1] > 0) m = m.scaled(c.pow(c.p(), idx[1]));
    out.A = laurent_add(out.A, {{k, m}});
  }
  return out;
}

LogConnection gauge_transform(const LogConnection& c, const LaurentMatrix& g, const LaurentMatrix& g_inv) {
  LaurentMatrix check = laurent_mul(g_inv, g);
  LaurentMatrix id{{0, PadicMatrix::identity(c.ctx, c.d)}};
  if (check != id) throw InputError("gauge and inverse do not multiply to the identity");
  LogConnection out{c.ctx, c.d, {}};
  out.A = laurent_add(laurent_mul(laurent_mul(g_inv, c.A), g), laurent_mul(g_inv, laurent_theta(g)));
  return out;
}

Residues residues(const LogConnection& c) {
  auto it = c.A.find(0);
  PadicMatrix a0 = it == c.A.end() ? PadicMatrix::zero(c.ctx, c.d) : it->second;
  return {a0, -a0};
}

HorizontalSolutions solve_horizontal(const LogConnection& c, int window) {
  if (window < 0) throw InputError("Laurent window must be non-negative");
  const PrecisionContext& ctx = c.ctx;
  const int d = c.d, D = window;
  int J = 0;
  for (const auto& [j, m] : c.A) J = std::max(J, std::abs(j));
  const int ncols = d * (2 * D + 1);
  const int mlo = -D - J, mhi = D + J;
  const int nrows = d * (mhi - mlo + 1);
  PadicMatrix sys(ctx, nrows, ncols);
  auto col = [&](int k, int l) { return (k + D) * d + l; };
  auto row = [&](int m, int i) { return (m - mlo) * d + i; };
  // coefficient of x^m: m c_m + sum_j A_j c_{m-j}
  for (int k = -D; k <= D; ++k)
    for (int i = 0; i < d; ++i) sys.at(row(k, i), col(k, i)) = ctx.add(sys.at(row(k, i), col(k, i)), ctx.reduce(k));
  for (const auto& [j, a] : c.A)
    for (int k = -D; k <= D; ++k)
      for (int i = 0; i < d; ++i)
        for (int l = 0; l < d; ++l) sys.at(row(k + j, i), col(k, l)) = ctx.add(sys.at(row(k + j, i), col(k, l)), a.at(i, l));

  SmithForm s = smith_form(sys);
  HorizontalSolutions out;
  out.window = D;
  for (int q = 0; q < ncols; ++q) {
    bool free = q >= static_cast<int>(s.invariants.size()) || s.invariants[q].at_floor;
    if (!free) continue;
    LaurentMatrix f;
    for (int k = -D; k <= D; ++k) {
      PadicMatrix v(ctx, d, 1);
      for (int l = 0; l < d; ++l) v.at(l, 0) = s.V.at(col(k, l), q);
      if (!v.is_zero()) f.emplace(k, v);
    }
    out.basis.push_back(f);
  }
  out.full = static_cast<int>(out.basis.size()) >= d;

  auto it = c.A.find(0);
  PadicMatrix a0 = it == c.A.end() ? PadicMatrix::zero(ctx, d) : it->second;
  for (int k = -D; k <= D; ++k)
    if ((a0 + PadicMatrix::scalar(ctx, d, k)).det().is_zero()) out.resonant.push_back(k);
  if (!out.full) {
    std::ostringstream os;
    os << "only " << out.basis.size() << " of " << d << " horizontal sections in |k| <= " << D;
    if (out.resonant.empty())
      os << "; no k in the window makes k I + A_0 singular";
    else {
      os << "; resonant k:";
      for (int k : out.resonant) os << " " << k;
    }
    out.obstruction = os.str();
  }
  out.precision = "mod p^" + std::to_string(ctx.abs_prec()) + ", Laurent window |k| <= " + std::to_string(D);
  return out;
}

namespace {

// Determinant of a matrix of Laurent polynomials by cofactor expansion.
std::map<int, PadicScalar> laurent_det(const std::vector<std::vector<std::map<int, PadicScalar>>>& m,
                                       const PrecisionContext& ctx) {
  int n = static_cast<int>(m.size());
  if (n == 0) return {{0, PadicScalar(ctx, 1)}};
  std::map<int, PadicScalar> total;
  for (int j = 0; j < n; ++j) {
    if (m[0][j].empty()) continue;
    std::vector<std::vector<std::map<int, PadicScalar>>> minor;
    for (int i = 1; i < n; ++i) {
      std::vector<std::map<int, PadicScalar>> r;
      for (int k = 0; k < n; ++k)
        if (k != j) r.push_back(m[i][k]);
      minor.push_back(r);
    }
    auto sub = laurent_det(minor, ctx);
    for (const auto& [a, x] : m[0][j])
      for (const auto& [b, y] : sub) {
        PadicScalar t = x * y;
        if (j % 2) t = -t;
        auto [pos, fresh] = total.try_emplace(a + b, ctx);
        pos->second += t;
      }
  }
  return total;
}

}  // namespace

bool thin_annulus_trivial(const LogConnection& c, int window) {
  HorizontalSolutions sol = solve_horizontal(c, window);
  if (!sol.full) return false;
  const PrecisionContext& ctx = c.ctx;
  int d = c.d;
  std::vector<std::vector<std::map<int, PadicScalar>>> f(d, std::vector<std::map<int, PadicScalar>>(d));
  for (int j = 0; j < d; ++j)
    for (const auto& [k, v] : sol.basis[j])
      for (int i = 0; i < d; ++i)
        if (v.at(i, 0) != 0) f[i][j].emplace(k, v.entry(i, 0));
  // a unit of Z_p<x, 1/x> reduces to a monomial mod p
  int unit_terms = 0;
  for (const auto& [k, x] : laurent_det(f, ctx))
    if (x.is_unit()) ++unit_terms;
  return unit_terms == 1;
}

}  // namespace prl
