#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prl/padic.hpp"

namespace prl {

// Closed disc {val(t - center) >= v}.
struct Disc {
  PadicScalar center;
  Rational v;
};

struct TypeI {
  PadicScalar center;
};
struct TypeII {
  PadicScalar center;
  Rational v;
};
// Radius exponent certified irrational inside (lo, hi).
struct TypeIII {
  PadicScalar center;
  Rational lo, hi;
};
struct TypeIV {
  std::vector<Disc> prefix;
  bool certified;
};
enum class Side { inner, outer };
struct TypeV {
  PadicScalar center;
  Rational v;
  Side side;
  std::optional<PadicScalar> beta;  // inner points: the open residue disc D(beta, <r)
};

using DiscPoint = std::variant<TypeI, TypeII, TypeIII, TypeIV, TypeV>;
enum class PointKind { I, II, III, IV, V };

struct PointSpec {
  enum class Radius { none, zero, rational, irrational };
  std::optional<PadicScalar> center;
  Radius radius = Radius::none;
  Rational v{0}, lo{0}, hi{0};
  std::vector<Disc> prefix;
  bool certified = false;
  std::optional<Side> side;
  std::optional<PadicScalar> beta;
};

DiscPoint classify(const PointSpec& spec);
PointKind kind_of(const DiscPoint& x);
std::string kind_name(PointKind k);
std::string point_str(const DiscPoint& x);
bool same_point(const DiscPoint& a, const DiscPoint& b);

// Finite Laurent expansion sum a_i (t - center)^i.
class LaurentFunction {
 public:
  LaurentFunction(const PrecisionContext& ctx, PadicScalar center);
  LaurentFunction(PadicScalar center, const std::map<int, PadicScalar>& coeffs);
  static LaurentFunction polynomial(const PrecisionContext& ctx, const std::vector<i64>& ascending);

  const PrecisionContext& ctx() const { return ctx_; }
  const PadicScalar& center() const { return center_; }
  const std::map<int, PadicScalar>& coeffs() const { return a_; }
  bool has_negative() const { return !a_.empty() && a_.begin()->first < 0; }
  int low() const { return a_.empty() ? 0 : a_.begin()->first; }
  int high() const { return a_.empty() ? 0 : a_.rbegin()->first; }
  PadicScalar coeff(int i) const;

  void set(int i, const PadicScalar& c);
  LaurentFunction operator*(const LaurentFunction& o) const;
  PadicScalar evaluate(const PadicScalar& t) const;
  // Same function expanded around another center; polynomials only.
  LaurentFunction recentered(const PadicScalar& c) const;

 private:
  PrecisionContext ctx_;
  PadicScalar center_;
  std::map<int, PadicScalar> a_;
};

ValueExponent gauss_norm(const LaurentFunction& f, const PadicScalar& center, const Rational& v);
ValueExponent annulus_spectral_norm(const LaurentFunction& f, const Rational& v1, const Rational& v2);

bool specializes(const DiscPoint& x, const DiscPoint& y);

enum class DiscRelation { equal, first_contains_second, second_contains_first, disjoint };
DiscRelation disc_relation(const Disc& a, const Disc& b);
std::string relation_name(DiscRelation r);

struct Segment {
  Rational slope;  // valuation of the roots on this segment
  int length;
  bool operator==(const Segment&) const = default;
};

// Coefficients in ascending order, leading one a unit.
std::vector<Segment> newton_polygon(const std::vector<PadicScalar>& f);
std::vector<Rational> polygon_stability_bound(const std::vector<PadicScalar>& f);

}  // namespace prl
