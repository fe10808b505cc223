#pragma once

#include <map>
#include <string>
#include <vector>

#include "prl/line_node.hpp"

namespace prl {

// W<x1, y1><dx>^PD / (x1 y1 - p) and its self-coproduct.
Ring isocrystal_ring(int order);
Ring isocrystal_triple_ring(int order);

struct NodeIsocrystalDatum {
  PDSeries T;
  explicit NodeIsocrystalDatum(PDSeries t);
};

// dy -> (1 + dx)^{-1} - 1 under x1 y1 = p.
NodeIsocrystalDatum to_isocrystal(const NodeDescentDatum& d);
Verdict isocrystal_cocycle_check(const NodeIsocrystalDatum& d);

// Laurent polynomial in x with matrix coefficients.
using LaurentMatrix = std::map<int, PadicMatrix>;

LaurentMatrix laurent_mul(const LaurentMatrix& a, const LaurentMatrix& b);
LaurentMatrix laurent_add(const LaurentMatrix& a, const LaurentMatrix& b);
// x d/dx
LaurentMatrix laurent_theta(const LaurentMatrix& a);
std::string laurent_str(const LaurentMatrix& a);

// nabla = d + A dlog x
struct LogConnection {
  PrecisionContext ctx;
  int d;
  LaurentMatrix A;
};

LogConnection constant_connection(const PadicMatrix& a);
LogConnection connection_from_descent(const NodeIsocrystalDatum& d);
// A' = G^{-1} A G + G^{-1} theta(G); horizontal sections transform by G^{-1}.
LogConnection gauge_transform(const LogConnection& c, const LaurentMatrix& g, const LaurentMatrix& g_inv);

struct Residues {
  PadicMatrix res_x, res_y;
};
Residues residues(const LogConnection& c);

struct HorizontalSolutions {
  int window = 0;
  std::vector<LaurentMatrix> basis;  // d x 1 columns
  bool full = false;
  std::vector<int> resonant;  // k in the window with k I + A_0 singular
  std::string obstruction;
  std::string precision;
};

HorizontalSolutions solve_horizontal(const LogConnection& c, int window);

inline constexpr int kDefaultWindow = 8;
bool thin_annulus_trivial(const LogConnection& c, int window = kDefaultWindow);

}  // namespace prl
