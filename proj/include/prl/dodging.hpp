#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "prl/adic_points.hpp"

namespace prl {

// t -> (a t + b) / (c t + d)
struct Mobius {
  PadicScalar a, b, c, d;
};
// t -> t - t^{n+1} / a^n
struct PolyHn {
  int n;
  PadicScalar a;
};
// t -> t - a^n / t^{n-1}
struct PolyHnPrime {
  int n;
  PadicScalar a;
};
using CoordMap = std::variant<Mobius, PolyHn, PolyHnPrime>;

void validate(const CoordMap& map);
std::string map_str(const CoordMap& map);
// t / (t - a0 + p^shift)
Mobius dodging_mobius(const PadicScalar& a0, int shift);

ValueExponent image_valuation(const CoordMap& map, const DiscPoint& x);

enum class NbhdCase { typeII, typeIII, typeIV, typeV_inner, typeV_outer };
std::string case_name(NbhdCase c);

// U0 = {v_min <= val(t) <= v_max} minus the open discs {val(t - c) > v}
// listed in removed.  For type IV, U0 is the first disc of the prefix.
// Coordinates put s1 at 0.
struct NeighborhoodSpec {
  NbhdCase kind;
  Rational v_min{0}, v_max{0};
  std::vector<Disc> prefix;
  std::vector<Disc> removed;
  std::optional<PadicScalar> direction;  // the a of x_{a,<1}
};

// The classical point p^shift * w of Q_p.
struct QpPoint {
  int shift;
  PadicScalar w;
};

bool contains(const NeighborhoodSpec& u, const QpPoint& x);

struct Lemma46Report {
  explicit Lemma46Report(Mobius m) : t_prime(std::move(m)) {}
  bool ok = false;
  Mobius t_prime;
  bool short_circuit = false;  // t' = t
  bool shrunk = false;         // U0 was shrunk away from s0
  int separation_case = 0;     // 1: |t'(u)| <= delta |a|, 2: |a| <= delta |t'(u)|
  Rational delta_exponent{0};  // delta = p^{-delta_exponent}
  ValueExponent at_s0, at_s1;
  std::vector<ValueExponent> sample_valuations;
  int depth = 0;
  int prefix_index = 0;  // type IV: the prefix disc used as U0
  std::string failing;
  std::string precision;
};

struct SamplingOptions {
  int depth = 2;
  unsigned long long seed = 0;
};

Lemma46Report lemma46_verify(const NeighborhoodSpec& nbhd, const PadicScalar& s0, const PadicScalar& s1,
                             int samples, const SamplingOptions& opts = {});

// Smallest N >= 0 making every coefficient of the map, written in
// t'' = p^{-N}(t - a), integral up to the given order.
int hn_integral_exponent(const CoordMap& map, int order);

Rational hn_uniform_bound(int n, const Rational& val_a, const Rational& val_delta);

}  // namespace prl
