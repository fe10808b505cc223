#include "prl/dodging.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <random>
#include <sstream>

namespace prl {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

ValueExponent val_exp(const PadicScalar& a) { return a.valuation().exponent(); }

PadicScalar p_power(const PrecisionContext& ctx, int k) {
  return PadicScalar::from_residue(ctx, ctx.pow(ctx.p(), static_cast<u64>(k)));
}

// Numerator and denominator polynomials in t, ascending.
std::pair<LaurentFunction, LaurentFunction> as_fraction(const CoordMap& map) {
  return std::visit(
      [](const auto& m) -> std::pair<LaurentFunction, LaurentFunction> {
        using T = std::decay_t<decltype(m)>;
        const PrecisionContext& ctx = m.a.ctx();
        LaurentFunction num(ctx, PadicScalar(ctx)), den(ctx, PadicScalar(ctx));
        if constexpr (std::is_same_v<T, Mobius>) {
          num.set(1, m.a);
          num.set(0, m.b);
          den.set(1, m.c);
          den.set(0, m.d);
        } else if constexpr (std::is_same_v<T, PolyHn>) {
          PadicScalar an = m.a.pow(m.n);
          num.set(1, an);
          num.set(m.n + 1, PadicScalar(ctx, -1));
          den.set(0, an);
        } else {
          num.set(m.n, PadicScalar(ctx, 1));
          num.set(0, -m.a.pow(m.n));
          den.set(m.n - 1, PadicScalar(ctx, 1));
        }
        return {num, den};
      },
      map);
}

}  // namespace

void validate(const CoordMap& map) {
  std::visit(
      [](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Mobius>) {
          if ((m.a * m.d - m.b * m.c).is_zero()) throw MalformedSpec("degenerate Mobius map");
        } else {
          if (m.n < 1) throw MalformedSpec("perturbation maps need n >= 1");
          if (m.a.is_zero()) throw MalformedSpec("perturbation parameter vanishes mod p^M");
        }
      },
      map);
}

std::string map_str(const CoordMap& map) {
  std::ostringstream os;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Mobius>)
          os << "(" << m.a.str() << "*t + " << m.b.str() << ")/(" << m.c.str() << "*t + " << m.d.str() << ")";
        else if constexpr (std::is_same_v<T, PolyHn>)
          os << "t - t^" << m.n + 1 << "/a^" << m.n << " with a = " << m.a.str();
        else
          os << "t - a^" << m.n << "/t^" << m.n - 1 << " with a = " << m.a.str();
      },
      map);
  return os.str();
}

Mobius dodging_mobius(const PadicScalar& a0, int shift) {
  const PrecisionContext& ctx = a0.ctx();
  return {PadicScalar(ctx, 1), PadicScalar(ctx), PadicScalar(ctx, 1), p_power(ctx, shift) - a0};
}

ValueExponent image_valuation(const CoordMap& map, const DiscPoint& x) {
  validate(map);
  auto [num, den] = as_fraction(map);
  ValueExponent vn, vd;
  if (const auto* pt = std::get_if<TypeI>(&x)) {
    vd = val_exp(den.evaluate(pt->center));
    vn = val_exp(num.evaluate(pt->center));
  } else if (const auto* g = std::get_if<TypeII>(&x)) {
    vd = gauss_norm(den, g->center, g->v);
    vn = gauss_norm(num, g->center, g->v);
  } else {
    throw PreconditionFailed("image valuations are computed at type I and type II points");
  }
  if (vd.is_infinite()) throw IndeterminateAtPole("denominator vanishes at the precision floor");
  if (vn.is_infinite()) return vn;
  return vn - vd;
}

std::string case_name(NbhdCase c) {
  switch (c) {
    case NbhdCase::typeII: return "typeII";
    case NbhdCase::typeIII: return "typeIII";
    case NbhdCase::typeIV: return "typeIV";
    case NbhdCase::typeV_inner: return "typeV_inner";
    case NbhdCase::typeV_outer: return "typeV_outer";
  }
  return "";
}

namespace {

ValueExponent point_val(const QpPoint& x) {
  ValueExponent v = val_exp(x.w);
  return v.is_infinite() ? v : v + ValueExponent(i64{x.shift});
}

// val(alpha x + beta)
ValueExponent linear_val(const PadicScalar& alpha, const PadicScalar& beta, const QpPoint& x) {
  if (x.shift >= 0) return val_exp(alpha * p_power(x.w.ctx(), x.shift) * x.w + beta);
  ValueExponent v = val_exp(alpha * x.w + beta * p_power(x.w.ctx(), -x.shift));
  return v.is_infinite() ? v : v + ValueExponent(i64{x.shift});
}

ValueExponent diff_val(const QpPoint& x, const PadicScalar& c) {
  return linear_val(PadicScalar(c.ctx(), 1), -c, x);
}

bool in_open_disc(const QpPoint& x, const Disc& d) { return diff_val(x, d.center) > ValueExponent(d.v); }

void check_nbhd(const NeighborhoodSpec& u) {
  auto bad = [&](const std::string& what) { throw ConfigMismatch(case_name(u.kind) + " neighborhood: " + what); };
  switch (u.kind) {
    case NbhdCase::typeII:
      if (u.v_min != Rational(0) || u.v_max != Rational(0)) bad("the ambient set is the thin annulus |t| = 1");
      for (const auto& d : u.removed)
        if (!d.center.is_unit() || d.v < Rational(0)) bad("removed discs must lie in |t| = 1");
      break;
    case NbhdCase::typeIII:
      if (!(u.v_min < u.v_max)) bad("annulus bounds must satisfy v_min < v_max");
      if (!u.removed.empty()) bad("annuli carry no removed discs");
      break;
    case NbhdCase::typeIV:
      if (u.prefix.empty()) bad("a prefix disc is required");
      break;
    case NbhdCase::typeV_inner:
      if (u.v_min != Rational(0) || !(u.v_max > Rational(0))) bad("the ambient set is r <= |t| <= 1 with r < 1");
      if (!u.direction || (!u.direction->is_zero() && !u.direction->is_unit()))
        bad("the direction must be 0 or a unit");
      break;
    case NbhdCase::typeV_outer:
      if (!(u.v_min < Rational(0)) || u.v_max != Rational(0)) bad("the ambient set is 1 <= |t| <= r with r > 1");
      break;
  }
}

struct Sampler {
  const NeighborhoodSpec& u;
  const PrecisionContext& ctx;
  std::vector<PadicScalar> teich;

  Sampler(const NeighborhoodSpec& nb, const PrecisionContext& c) : u(nb), ctx(c) {
    for (u64 a = 0; a < c.p(); ++a) teich.push_back(teichmuller_lift(a, c));
  }

  std::vector<PadicScalar> lattice(int depth, bool units) const {
    std::vector<PadicScalar> out{PadicScalar(ctx)};
    for (int k = 0; k < depth; ++k) {
      std::vector<PadicScalar> next;
      PadicScalar pk = p_power(ctx, k);
      for (const auto& x : out)
        for (u64 c = (units && k == 0) ? 1 : 0; c < ctx.p(); ++c) next.push_back(x + teich[c] * pk);
      out.swap(next);
    }
    return out;
  }

  std::vector<QpPoint> points(int depth) const {
    std::vector<QpPoint> out;
    if (u.kind == NbhdCase::typeIV) {
      const Disc& d = u.prefix.front();
      int e = static_cast<int>(-floor_rational(-d.v));
      if (e >= ctx.abs_prec()) return out;
      for (const auto& l : lattice(depth, false)) out.push_back({0, d.center + l * p_power(ctx, e)});
    } else {
      i64 lo = -floor_rational(-u.v_min), hi = floor_rational(u.v_max);
      for (i64 e = lo; e <= hi && e < ctx.abs_prec(); ++e)
        for (const auto& l : lattice(depth, true)) out.push_back({static_cast<int>(e), l});
    }
    std::vector<QpPoint> kept;
    for (const auto& x : out)
      if (contains(u, x)) kept.push_back(x);
    return kept;
  }
};

}  // namespace

bool contains(const NeighborhoodSpec& u, const QpPoint& x) {
  if (u.kind == NbhdCase::typeIV) {
    if (!(diff_val(x, u.prefix.front().center) >= ValueExponent(u.prefix.front().v))) return false;
  } else {
    ValueExponent v = point_val(x);
    if (v < ValueExponent(u.v_min) || v > ValueExponent(u.v_max)) return false;
  }
  return std::none_of(u.removed.begin(), u.removed.end(), [&](const Disc& d) { return in_open_disc(x, d); });
}

Lemma46Report lemma46_verify(const NeighborhoodSpec& nbhd, const PadicScalar& s0, const PadicScalar& s1,
                             int samples, const SamplingOptions& opts) {
  if (samples < 1) throw InputError("at least one sample is required");
  if (opts.depth < 1) throw InputError("sampling depth must be positive");
  check_nbhd(nbhd);
  const PrecisionContext& ctx = s0.ctx();
  if (!s1.is_zero()) throw ConfigMismatch("the coordinate must place s1 at t = 0");
  if (s0.is_zero()) throw ConfigMismatch("s0 coincides with s1");
  NeighborhoodSpec u = nbhd;
  int prefix_index = 0;
  if (u.kind == NbhdCase::typeIV) {
    auto outside = [&](const Disc& d) { return !contains({NbhdCase::typeIV, 0, 0, {d}, {}, {}}, {0, s0}) &&
                                               !contains({NbhdCase::typeIV, 0, 0, {d}, {}, {}}, {0, s1}); };
    auto it = std::find_if(u.prefix.begin(), u.prefix.end(), outside);
    if (it == u.prefix.end())
      throw InsufficientPrefix("no disc of the prefix separates U0 from s0 and s1");
    prefix_index = static_cast<int>(it - u.prefix.begin());
    u.prefix.erase(u.prefix.begin(), it);
  }
  if (contains(u, {0, s0})) throw ConfigMismatch("s0 lies in U0");
  if (contains(u, {0, s1})) throw ConfigMismatch("s1 lies in U0");

  Lemma46Report r(Mobius{PadicScalar(ctx, 1), PadicScalar(ctx), PadicScalar(ctx), PadicScalar(ctx, 1)});
  r.prefix_index = prefix_index;
  int va0 = s0.valuation().value;
  auto shrink_unit_disc = [&] {
    u.removed.push_back({s0, 0});
    r.shrunk = true;
  };
  auto use_identity = [&] { r.short_circuit = true; };

  switch (u.kind) {
    case NbhdCase::typeII:
      if (va0 != 0) {
        use_identity();
      } else {
        if (std::none_of(u.removed.begin(), u.removed.end(), [&](const Disc& d) {
              return d.v <= Rational(0) && in_open_disc({0, s0}, d);
            }))
          shrink_unit_disc();
        r.t_prime = dodging_mobius(s0, 1);
      }
      break;
    case NbhdCase::typeIII:
      use_identity();
      break;
    case NbhdCase::typeIV: {
      const Disc& d = u.prefix.front();
      ValueExponent vc = val_exp(d.center);
      if (ValueExponent(i64{va0}) != vc) {
        use_identity();
      } else {
        int k = (s0 - d.center).valuation().value;
        r.t_prime = dodging_mobius(s0, k + 2);
      }
      break;
    }
    case NbhdCase::typeV_inner:
      if (va0 != 0) {
        Rational cap = Rational(va0) - Rational(1, 2);
        if (u.v_max > cap) {
          u.v_max = cap;
          r.shrunk = true;
        }
        use_identity();
      } else if (u.direction->is_zero()) {
        shrink_unit_disc();
        r.t_prime = dodging_mobius(s0, 1);
      } else {
        std::optional<Rational> w;
        for (const auto& d : u.removed)
          if (in_open_disc({0, s0}, d) && (!w || d.v < *w)) w = d.v;
        if (!w) throw InternalConsistency("s0 is outside U0 but in no removed disc");
        r.t_prime = dodging_mobius(s0, static_cast<int>(floor_rational(*w)) + 2);
      }
      break;
    case NbhdCase::typeV_outer:
      if (va0 != 0) {
        use_identity();
      } else {
        shrink_unit_disc();
        r.t_prime = dodging_mobius(s0, static_cast<int>(-floor_rational(u.v_min)));
      }
      break;
  }

  const Mobius& m = r.t_prime;
  auto tval = [&](const QpPoint& x) -> ValueExponent {
    ValueExponent vd = linear_val(m.c, m.d, x);
    ValueExponent vn = linear_val(m.a, m.b, x);
    if (vd.is_infinite()) throw IndeterminateAtPole("t' has a pole at a sampled point");
    return vn.is_infinite() ? vn : vn - vd;
  };
  r.at_s1 = tval({0, s1});
  r.at_s0 = tval({0, s0});

  Sampler sampler(u, ctx);
  std::vector<QpPoint> pts;
  int depth = opts.depth;
  auto lattice_size = [&](int d) {
    double s = 1;
    for (int k = 0; k < d; ++k) s *= static_cast<double>(ctx.p());
    return s;
  };
  for (;; ++depth) {
    pts = sampler.points(depth);
    if (static_cast<int>(pts.size()) >= samples || depth >= ctx.abs_prec() || lattice_size(depth + 1) > 2e5)
      break;
  }
  if (pts.empty()) throw SampleExhausted("no classical sample of U0 survives at depth " + std::to_string(depth));
  std::mt19937_64 rng(opts.seed);
  std::shuffle(pts.begin(), pts.end(), rng);
  if (static_cast<int>(pts.size()) > samples) pts.erase(pts.begin() + samples, pts.end());
  r.depth = depth;

  ValueExponent lo = ValueExponent::infinity(), hi = ValueExponent(i64{-(1 << 20)});
  for (const auto& x : pts) {
    ValueExponent v = tval(x);
    r.sample_valuations.push_back(v);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  std::ostringstream prec;
  prec << "mod p^" << ctx.abs_prec() << ", " << pts.size() << " samples at depth " << depth;
  r.precision = prec.str();

  if (!r.at_s1.is_infinite()) {
    r.failing = "t'(s1) != 0";
    return r;
  }
  if (r.at_s0.is_infinite()) {
    r.failing = "t'(s0) vanishes";
    return r;
  }
  if (hi.is_infinite()) {
    r.failing = "t' vanishes on every sample";
    return r;
  }
  if (lo > r.at_s0) {
    r.separation_case = 1;
    r.delta_exponent = (lo - r.at_s0).value();
  } else if (hi < r.at_s0) {
    r.separation_case = 2;
    r.delta_exponent = (r.at_s0 - hi).value();
  } else {
    r.failing = "no delta separates |t'(s0)| from |t'(u)|";
    return r;
  }
  r.ok = true;
  return r;
}

namespace {

int padic_val(cpp_rational x, u64 p) {
  cpp_int n = boost::multiprecision::numerator(x), d = boost::multiprecision::denominator(x);
  int v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  while (d % p == 0) {
    d /= p;
    --v;
  }
  return v;
}

using QPoly = std::vector<cpp_rational>;

QPoly qmul(const QPoly& f, const QPoly& g, int order) {
  QPoly h(std::min<size_t>(f.size() + g.size() - 1, order + 1));
  for (size_t i = 0; i < f.size(); ++i)
    for (size_t j = 0; j < g.size() && i + j < h.size(); ++j) h[i + j] += f[i] * g[j];
  return h;
}

cpp_int binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  cpp_int r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Coefficients in t'' of the map at t = p^N t'' + a, up to `order`.
QPoly expansion(bool prime, int n, const cpp_rational& a, u64 p, int N, int order) {
  cpp_rational x = cpp_rational(boost::multiprecision::pow(cpp_int(p), N)) / a;  // X = x t''
  QPoly s(std::min(n, order) + 1);
  cpp_rational xi = 1;
  for (int i = 1; i < static_cast<int>(s.size()); ++i) {
    xi *= x;
    s[i] = cpp_rational(binom(n, i)) * xi;
  }
  if (!prime) {
    QPoly lin{-a, -cpp_rational(boost::multiprecision::pow(cpp_int(p), N))};
    return qmul(lin, s, order);
  }
  QPoly geo(order + 1);
  cpp_rational xj = 1;
  for (int j = 0; j <= order; ++j) {
    // (1 + X)^{-(n-1)}
    cpp_int c = n == 1 ? cpp_int(j == 0 ? 1 : 0) : binom(n - 2 + j, j);
    geo[j] = (j % 2 ? -1 : 1) * cpp_rational(c) * xj;
    xj *= x;
  }
  QPoly out = qmul(geo, s, order);
  for (auto& c : out) c *= a;
  return out;
}

}  // namespace

int hn_integral_exponent(const CoordMap& map, int order) {
  if (order < 1) throw InputError("expansion order must be at least 1");
  validate(map);
  bool prime = std::holds_alternative<PolyHnPrime>(map);
  if (std::holds_alternative<Mobius>(map)) throw InputError("integral exponents are defined for h_n and h'_n");
  int n = prime ? std::get<PolyHnPrime>(map).n : std::get<PolyHn>(map).n;
  const PadicScalar& a = prime ? std::get<PolyHnPrime>(map).a : std::get<PolyHn>(map).a;
  const PrecisionContext& ctx = a.ctx();
  int va = a.valuation().value;
  cpp_rational ar(static_cast<long long>(a.signed_residue()));
  for (int N = 0; N <= va + 1; ++N) {
    QPoly e = expansion(prime, n, ar, ctx.p(), N, order);
    bool ok = true;
    for (const auto& c : e)
      if (c != 0 && padic_val(c, ctx.p()) < 0) ok = false;
    if (!ok) continue;
    // Beyond the order every coefficient has valuation >= va + k (N - va).
    bool truncated = prime || order < n + 1;
    if (truncated && N < va)
      throw TruncationInsufficient("order " + std::to_string(order) +
                                   " does not certify the tail of the expansion; raise the order");
    return N;
  }
  throw InternalConsistency("no integral exponent up to val(a) + 1");
}

Rational hn_uniform_bound(int n, const Rational& val_a, const Rational& val_delta) {
  if (n < 0) throw InputError("n must be non-negative");
  if (!(val_delta > Rational(0))) throw InputError("delta must lie in (0, 1)");
  return val_a + Rational(n + 1) * val_delta;
}

}  // namespace prl
