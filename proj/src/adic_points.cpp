#include "prl/adic_points.hpp"

#include <algorithm>
#include <sstream>

#include "prl/pd_series.hpp"

namespace prl {

namespace {

ValueExponent val_exp(const PadicScalar& a) { return a.valuation().exponent(); }

bool in_disc(const PadicScalar& t, const Disc& d) {
  return val_exp(t - d.center) >= ValueExponent(d.v);
}

const PadicScalar& require_center(const PointSpec& s) {
  if (!s.center) throw MalformedSpec("point spec has no center");
  return *s.center;
}

void require_nonnegative(const Rational& v) {
  if (v < 0) throw MalformedSpec("negative radius exponent " + rational_str(v) + " lies off the unit disc");
}

}  // namespace

DiscPoint classify(const PointSpec& s) {
  if (s.side) {
    const auto& c = require_center(s);
    if (s.radius != PointSpec::Radius::rational)
      throw MalformedSpec("a side marker needs a rational radius");
    require_nonnegative(s.v);
    if (*s.side == Side::inner) {
      if (!s.beta) throw MalformedSpec("inner side marker needs a direction beta");
      if (!in_disc(*s.beta, {c, s.v})) throw MalformedSpec("direction beta lies outside the disc");
      return TypeV{c, s.v, Side::inner, s.beta};
    }
    return TypeV{c, s.v, Side::outer, std::nullopt};
  }
  if (!s.prefix.empty()) {
    if (!s.certified) throw MalformedSpec("nested prefix without an empty-intersection certificate");
    for (size_t k = 0; k < s.prefix.size(); ++k) {
      require_nonnegative(s.prefix[k].v);
      if (k == 0) continue;
      const auto& outer = s.prefix[k - 1];
      const auto& inner = s.prefix[k];
      if (!(inner.v > outer.v) || !in_disc(inner.center, outer))
        throw MalformedSpec("prefix disc " + std::to_string(k) + " is not strictly inside its predecessor");
    }
    return TypeIV{s.prefix, true};
  }
  switch (s.radius) {
    case PointSpec::Radius::zero:
      return TypeI{require_center(s)};
    case PointSpec::Radius::rational:
      require_nonnegative(s.v);
      return TypeII{require_center(s), s.v};
    case PointSpec::Radius::irrational:
      require_nonnegative(s.lo);
      if (!(s.lo < s.hi)) throw MalformedSpec("irrationality interval is empty");
      return TypeIII{require_center(s), s.lo, s.hi};
    case PointSpec::Radius::none:
      break;
  }
  throw MalformedSpec("point spec has no radius");
}

PointKind kind_of(const DiscPoint& x) { return static_cast<PointKind>(x.index()); }

std::string kind_name(PointKind k) {
  static const char* names[] = {"I", "II", "III", "IV", "V"};
  return names[static_cast<int>(k)];
}

std::string point_str(const DiscPoint& x) {
  std::ostringstream os;
  std::visit(
      [&](const auto& pt) {
        using T = std::decay_t<decltype(pt)>;
        if constexpr (std::is_same_v<T, TypeI>) {
          os << "I(" << pt.center.str() << ")";
        } else if constexpr (std::is_same_v<T, TypeII>) {
          os << "II(" << pt.center.str() << ", v=" << rational_str(pt.v) << ")";
        } else if constexpr (std::is_same_v<T, TypeIII>) {
          os << "III(" << pt.center.str() << ", v in (" << rational_str(pt.lo) << ", "
             << rational_str(pt.hi) << "))";
        } else if constexpr (std::is_same_v<T, TypeIV>) {
          os << "IV[";
          for (size_t k = 0; k < pt.prefix.size(); ++k)
            os << (k ? ", " : "") << "D(" << pt.prefix[k].center.str() << ", v=" << rational_str(pt.prefix[k].v)
               << ")";
          os << "]";
        } else {
          os << "V(" << pt.center.str() << ", v=" << rational_str(pt.v) << ", ";
          if (pt.side == Side::outer)
            os << "outer)";
          else
            os << "inner " << pt.beta->str() << ")";
        }
      },
      x);
  return os.str();
}

bool same_point(const DiscPoint& a, const DiscPoint& b) {
  if (a.index() != b.index()) return false;
  auto same_disc = [](const PadicScalar& c1, const Rational& v1, const PadicScalar& c2, const Rational& v2) {
    return disc_relation({c1, v1}, {c2, v2}) == DiscRelation::equal;
  };
  switch (kind_of(a)) {
    case PointKind::I:
      return std::get<TypeI>(a).center == std::get<TypeI>(b).center;
    case PointKind::II: {
      const auto &x = std::get<TypeII>(a), &y = std::get<TypeII>(b);
      return same_disc(x.center, x.v, y.center, y.v);
    }
    case PointKind::III: {
      const auto &x = std::get<TypeIII>(a), &y = std::get<TypeIII>(b);
      return x.lo == y.lo && x.hi == y.hi && val_exp(x.center - y.center) >= ValueExponent(x.hi);
    }
    case PointKind::IV: {
      const auto &x = std::get<TypeIV>(a), &y = std::get<TypeIV>(b);
      if (x.prefix.size() != y.prefix.size()) return false;
      for (size_t k = 0; k < x.prefix.size(); ++k)
        if (disc_relation(x.prefix[k], y.prefix[k]) != DiscRelation::equal) return false;
      return true;
    }
    case PointKind::V: {
      const auto &x = std::get<TypeV>(a), &y = std::get<TypeV>(b);
      if (x.side != y.side || !same_disc(x.center, x.v, y.center, y.v)) return false;
      return x.side == Side::outer || val_exp(*x.beta - *y.beta) > ValueExponent(x.v);
    }
  }
  return false;
}

LaurentFunction::LaurentFunction(const PrecisionContext& ctx, PadicScalar center)
    : ctx_(ctx), center_(std::move(center)) {
  if (!(center_.ctx() == ctx_)) throw ContextMismatch("expansion center carries another context");
}

LaurentFunction::LaurentFunction(PadicScalar center, const std::map<int, PadicScalar>& coeffs)
    : LaurentFunction(center.ctx(), center) {
  for (const auto& [i, c] : coeffs) set(i, c);
}

LaurentFunction LaurentFunction::polynomial(const PrecisionContext& ctx, const std::vector<i64>& ascending) {
  LaurentFunction f(ctx, PadicScalar(ctx));
  for (size_t i = 0; i < ascending.size(); ++i) f.set(static_cast<int>(i), PadicScalar(ctx, ascending[i]));
  return f;
}

PadicScalar LaurentFunction::coeff(int i) const {
  auto it = a_.find(i);
  return it == a_.end() ? PadicScalar(ctx_) : it->second;
}

void LaurentFunction::set(int i, const PadicScalar& c) {
  if (!(c.ctx() == ctx_)) throw ContextMismatch("coefficient carries another context");
  if (c.is_zero())
    a_.erase(i);
  else
    a_.insert_or_assign(i, c);
}

LaurentFunction LaurentFunction::operator*(const LaurentFunction& o) const {
  if (!(center_ == o.center_)) throw PreconditionFailed("product of expansions around different centers");
  LaurentFunction r(ctx_, center_);
  std::map<int, PadicScalar> acc;
  for (const auto& [i, a] : a_)
    for (const auto& [j, b] : o.a_) {
      auto [it, fresh] = acc.try_emplace(i + j, ctx_);
      it->second += a * b;
    }
  for (const auto& [k, c] : acc) r.set(k, c);
  return r;
}

PadicScalar LaurentFunction::evaluate(const PadicScalar& t) const {
  PadicScalar s = t - center_;
  PadicScalar total(ctx_);
  if (has_negative()) {
    if (s.is_zero()) throw IndeterminateAtPole("evaluation at the expansion center");
    if (!s.is_unit()) throw PreconditionFailed("negative powers need |t - center| = 1");
    PadicScalar si = s.inv();
    for (const auto& [i, a] : a_) total += a * (i < 0 ? si.pow(-i) : s.pow(i));
  } else {
    for (const auto& [i, a] : a_) total += a * s.pow(i);
  }
  return total;
}

LaurentFunction LaurentFunction::recentered(const PadicScalar& c) const {
  if (has_negative()) throw PreconditionFailed("cannot re-expand negative powers around another center");
  PadicScalar s = c - center_;
  std::vector<PadicScalar> b(high() + 1, PadicScalar(ctx_));
  for (const auto& [i, a] : a_)
    for (int k = 0; k <= i; ++k)
      b[k] += a * PadicScalar::from_residue(ctx_, binomial_mod(ctx_, i, k)) * s.pow(i - k);
  LaurentFunction r(ctx_, c);
  for (int k = 0; k < static_cast<int>(b.size()); ++k) r.set(k, b[k]);
  return r;
}

ValueExponent gauss_norm(const LaurentFunction& f, const PadicScalar& center, const Rational& v) {
  if (!(center == f.center()) && !in_disc(center, {f.center(), v}))
    return gauss_norm(f.recentered(center), center, v);
  ValueExponent best = ValueExponent::infinity();
  for (const auto& [i, a] : f.coeffs()) best = std::min(best, val_exp(a) + ValueExponent(Rational(i) * v));
  return best;
}

ValueExponent annulus_spectral_norm(const LaurentFunction& f, const Rational& v1, const Rational& v2) {
  if (v1 > v2) throw PreconditionFailed("annulus bounds must satisfy v1 <= v2");
  return std::min(gauss_norm(f, f.center(), v1), gauss_norm(f, f.center(), v2));
}

bool specializes(const DiscPoint& x, const DiscPoint& y) {
  if (same_point(x, y)) return true;
  const auto* gen = std::get_if<TypeII>(&x);
  const auto* sp = std::get_if<TypeV>(&y);
  if (!gen || !sp) return false;
  return disc_relation({gen->center, gen->v}, {sp->center, sp->v}) == DiscRelation::equal;
}

DiscRelation disc_relation(const Disc& a, const Disc& b) {
  ValueExponent d = val_exp(a.center - b.center);
  if (d < ValueExponent(std::min(a.v, b.v))) return DiscRelation::disjoint;
  if (a.v == b.v) return DiscRelation::equal;
  return a.v < b.v ? DiscRelation::first_contains_second : DiscRelation::second_contains_first;
}

std::string relation_name(DiscRelation r) {
  switch (r) {
    case DiscRelation::equal: return "equal";
    case DiscRelation::first_contains_second: return "nested_second_in_first";
    case DiscRelation::second_contains_first: return "nested_first_in_second";
    case DiscRelation::disjoint: return "disjoint";
  }
  return "";
}

namespace {

struct Hull {
  std::vector<std::pair<int, int>> vertices;  // (i, val a_i)
  Rational height(int i) const {
    for (size_t k = 1; k < vertices.size(); ++k) {
      auto [x0, y0] = vertices[k - 1];
      auto [x1, y1] = vertices[k];
      if (i <= x1) return Rational(y0) + Rational(y1 - y0, x1 - x0) * (i - x0);
    }
    return Rational(vertices.back().second);
  }
};

Hull lower_hull(const std::vector<PadicScalar>& f) {
  if (f.empty()) throw PreconditionFailed("empty polynomial");
  if (!f.back().is_unit()) throw PreconditionFailed("leading coefficient is not a unit");
  if (f.front().is_zero() && f.size() > 1)
    throw PrecisionInsufficient("constant coefficient vanishes at the working precision");
  Hull h;
  auto& v = h.vertices;
  for (int i = 0; i < static_cast<int>(f.size()); ++i) {
    if (f[i].is_zero()) continue;
    std::pair<int, int> q{i, f[i].valuation().value};
    while (v.size() >= 2) {
      auto [x1, y1] = v[v.size() - 2];
      auto [x2, y2] = v[v.size() - 1];
      i64 cross = i64(x2 - x1) * (q.second - y1) - i64(y2 - y1) * (q.first - x1);
      if (cross > 0) break;
      v.pop_back();
    }
    v.push_back(q);
  }
  return h;
}

}  // namespace

std::vector<Segment> newton_polygon(const std::vector<PadicScalar>& f) {
  Hull h = lower_hull(f);
  std::vector<Segment> out;
  for (size_t k = 1; k < h.vertices.size(); ++k) {
    auto [x0, y0] = h.vertices[k - 1];
    auto [x1, y1] = h.vertices[k];
    out.push_back({Rational(y0 - y1, x1 - x0), x1 - x0});
  }
  return out;
}

std::vector<Rational> polygon_stability_bound(const std::vector<PadicScalar>& f) {
  Hull h = lower_hull(f);
  std::vector<Rational> e;
  for (int i = 0; i < static_cast<int>(f.size()); ++i) e.push_back(h.height(i));
  return e;
}

}  // namespace prl
