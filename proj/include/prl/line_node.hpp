#pragma once

#include <optional>
#include <string>
#include <vector>

#include "prl/log_point.hpp"

namespace prl {

// Ring of the affine self-coproduct: x1 polynomial, x2' and t divided powers.
Ring affine_ring(int order);
Ring affine_triple_ring(int order);
// Node self-coproduct: x1, y1 polynomial, dx, dy divided powers.
Ring node_ring(int order);
Ring node_triple_ring(int order);
// Branch ring: y1^{+-1} with d_y, t_y (branch 0) or x1^{+-1} with d_x, t_x (branch 1).
Ring branch_ring(int branch, int order);

struct AffineDescentDatum {
  PDSeries T;
  std::optional<PadicMatrix> phi;
  explicit AffineDescentDatum(PDSeries t, std::optional<PadicMatrix> phi = std::nullopt);
};

struct NodeDescentDatum {
  PDSeries T;
  std::optional<PadicMatrix> phi;
  explicit NodeDescentDatum(PDSeries t, std::optional<PadicMatrix> phi = std::nullopt);
};

struct BranchDatum {
  PDSeries T;
  int branch;
  BranchDatum(PDSeries t, int branch);
};

struct RigidityCertificate {
  bool ok = true;
  std::string counterexample;
  std::string precision;
};

Verdict affine_cocycle_check(const AffineDescentDatum& d);
PadicMatrix monodromy_at_point(const AffineDescentDatum& d, u64 alpha);
RigidityCertificate affine_rigidity_witness(const AffineDescentDatum& d, u64 alpha);

Verdict node_cocycle_check(const NodeDescentDatum& d);
BranchDatum node_branch_restriction(const NodeDescentDatum& d, int branch);
// Monodromy of the branch datum at the Teichmuller point over alpha != 0.
PadicMatrix branch_monodromy_at(const BranchDatum& b, u64 alpha);
bool node_descends(const NodeDescentDatum& d);
MultiLogPointDatum node_center_restriction(const NodeDescentDatum& d);

// I + c x^a y^b E_ij with i != j.
struct GaugeFactor {
  int i, j;
  i64 c;
  int a, b = 0;
};

// Product of the factors in the given variables (y may be empty).
PDSeries gauge_matrix(const Ring& ring, const PrecisionContext& ctx, int d,
                      const std::vector<GaugeFactor>& g, const PDSeries& x, const PDSeries& y);
PDSeries gauge_inverse(const Ring& ring, const PrecisionContext& ctx, int d,
                       const std::vector<GaugeFactor>& g, const PDSeries& x, const PDSeries& y);

// P(x1 + x2')^{-1} (1+t)^N P(x1).
AffineDescentDatum affine_gauge_datum(const PadicMatrix& n, const std::vector<GaugeFactor>& g,
                                      int order);
// P(x2, y2)^{-1} (1+dx)^N P(x1, y1) with x2 = x1(1+dx), y2 = y1(1+dy).
NodeDescentDatum node_gauge_datum(const PadicMatrix& n, const std::vector<GaugeFactor>& g,
                                  int order);

}  // namespace prl
