#pragma once

#include <random>

#include "prl/padic.hpp"

namespace prl::testing {

inline u64 rand_below(std::mt19937_64& rng, u64 n) {
  return std::uniform_int_distribution<u64>(0, n - 1)(rng);
}

inline PadicScalar rand_scalar(std::mt19937_64& rng, const PrecisionContext& ctx) {
  return PadicScalar::from_residue(ctx, rand_below(rng, ctx.modulus()));
}

inline PadicMatrix rand_matrix(std::mt19937_64& rng, const PrecisionContext& ctx, int d) {
  PadicMatrix m(ctx, d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m.at(i, j) = rand_below(rng, ctx.modulus());
  return m;
}

// Product of a random permutation-free unipotent lower and upper factor.
inline PadicMatrix rand_invertible(std::mt19937_64& rng, const PrecisionContext& ctx, int d) {
  PadicMatrix l = PadicMatrix::identity(ctx, d), u = PadicMatrix::identity(ctx, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i > j) l.at(i, j) = rand_below(rng, ctx.modulus());
      if (i < j) u.at(i, j) = rand_below(rng, ctx.modulus());
      if (i == j) {
        u64 x;
        do x = rand_below(rng, ctx.modulus());
        while (x % ctx.p() == 0);
        u.at(i, i) = x;
      }
    }
  return l * u;
}

inline PadicMatrix rand_strict_upper(std::mt19937_64& rng, const PrecisionContext& ctx, int d) {
  PadicMatrix m(ctx, d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) m.at(i, j) = rand_below(rng, ctx.modulus());
  return m;
}

}  // namespace prl::testing

#include "prl/line_node.hpp"

namespace prl::testing {

// Random unipotent gauge: `count` elementary factors of low degree.
inline std::vector<GaugeFactor> rand_gauge(std::mt19937_64& rng, int d, int count, bool two_vars) {
  std::vector<GaugeFactor> g;
  if (d < 2) return g;
  for (int k = 0; k < count; ++k) {
    GaugeFactor f;
    f.i = static_cast<int>(rng() % d);
    do f.j = static_cast<int>(rng() % d);
    while (f.j == f.i);
    f.c = static_cast<i64>(rng() % 19) - 9;
    f.a = static_cast<int>(rng() % 2);
    f.b = two_vars ? static_cast<int>(rng() % 2) : 0;
    if (f.a + f.b == 0) (two_vars && rng() % 2 ? f.b : f.a) = 1;
    if (f.c == 0) f.c = 1;
    g.push_back(f);
  }
  return g;
}

}  // namespace prl::testing
