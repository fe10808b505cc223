#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prl/padic.hpp"
#include "prl/pd_series.hpp"

namespace prl {

// Outcome of an identity check between two expansions.
struct Verdict {
  bool ok = true;
  std::string failing;  // first differing coefficient, graded order
  std::string precision;
  explicit operator bool() const { return ok; }
};

std::string precision_statement(const PrecisionContext& ctx, int order);
Verdict compare_series(const PDSeries& lhs, const PDSeries& rhs);

struct LogPointDatum {
  PDSeries T;  // over one divided-power variable
  std::optional<PadicMatrix> phi;

  explicit LogPointDatum(PDSeries t, std::optional<PadicMatrix> phi = std::nullopt);
  int dim() const { return T.dim(); }
  const std::string& var() const;
};

struct MultiLogPointDatum {
  PDSeries T;  // over divided-power variables t_1..t_{n+1}
  explicit MultiLogPointDatum(PDSeries t);
  int factors() const { return T.ring()->size(); }
};

struct PhiNModule {
  PadicMatrix phi, N;
  int det_valuation;
  PhiNModule(PadicMatrix phi, PadicMatrix n);
};

Verdict cocycle_check(const LogPointDatum& d);
PadicMatrix monodromy(const LogPointDatum& d);
LogPointDatum from_monodromy(const PadicMatrix& n, int order);
bool descends_to_point(const LogPointDatum& d);
Verdict phi_compatibility(const PhiNModule& m);

Verdict multi_cocycle_check(const MultiLogPointDatum& d);
PadicMatrix directional_monodromy(const MultiLogPointDatum& d, const std::vector<int>& dir);
// Indices I with |I| >= 1 whose coefficient is nonzero.
std::vector<MultiIndex> nontrivial_coefficients(const MultiLogPointDatum& d);
bool all_directions_trivial(const MultiLogPointDatum& d);

// (1 + t_k)^{N_k} multiplied in the given order; commuting N_k give a
// cocycle-valid datum.
MultiLogPointDatum multi_binomial(const Ring& ring, const std::vector<PadicMatrix>& ns);

}  // namespace prl
