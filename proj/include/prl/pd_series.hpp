#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "prl/padic.hpp"

namespace prl {

enum class VarKind { pd, poly, laurent };

struct VarSpec {
  std::string name;
  VarKind kind = VarKind::pd;
  int lo = 0;   // lowest exponent (negative only for laurent)
  int hi = 64;  // highest exponent for poly/laurent
};

// x * y = p, applied to every monomial containing both.
struct Relation {
  int x, y;
};

inline constexpr int kMaxVars = 10;

class RingSpec {
 public:
  RingSpec(std::vector<VarSpec> vars, int pd_order, std::optional<Relation> rel = std::nullopt);

  const std::vector<VarSpec>& vars() const { return vars_; }
  int size() const { return static_cast<int>(vars_.size()); }
  const VarSpec& var(int i) const { return vars_[i]; }
  // Truncation: monomials of total divided-power degree above this vanish.
  int pd_order() const { return pd_order_; }
  const std::optional<Relation>& relation() const { return rel_; }
  int index(const std::string& name) const;
  std::optional<int> find(const std::string& name) const;

  bool operator==(const RingSpec& o) const;

 private:
  std::vector<VarSpec> vars_;
  int pd_order_;
  std::optional<Relation> rel_;
};

using Ring = std::shared_ptr<const RingSpec>;

Ring make_ring(std::vector<VarSpec> vars, int pd_order, std::optional<Relation> rel = std::nullopt);
// Ring of divided-power variables only.
Ring pd_ring(const std::vector<std::string>& names, int pd_order);

using MultiIndex = std::array<std::int16_t, kMaxVars>;

// Graded order: divided-power degree, then total degree, then lexicographic.
struct GradedLess {
  const RingSpec* ring = nullptr;
  bool operator()(const MultiIndex& a, const MultiIndex& b) const;
};

class PDSeries {
 public:
  using Coeff = std::vector<u64>;
  using TermMap = std::map<MultiIndex, Coeff, GradedLess>;

  PDSeries(Ring ring, const PrecisionContext& ctx, int dim);

  static PDSeries constant(Ring ring, const PadicMatrix& c);
  static PDSeries identity(Ring ring, const PrecisionContext& ctx, int dim);
  static PDSeries monomial(Ring ring, const MultiIndex& idx, const PadicMatrix& c);
  static PDSeries scalar_monomial(Ring ring, const PrecisionContext& ctx, const MultiIndex& idx,
                                  i64 c = 1);
  // The scalar series consisting of one variable to the first power.
  static PDSeries variable(Ring ring, const PrecisionContext& ctx, const std::string& name);

  const Ring& ring() const { return ring_; }
  const PrecisionContext& ctx() const { return ctx_; }
  int dim() const { return dim_; }
  const TermMap& terms() const { return terms_; }
  size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  MultiIndex zero_index() const { return MultiIndex{}; }
  MultiIndex index_of(const std::map<std::string, int>& exps) const;
  PadicMatrix coeff(const MultiIndex& idx) const;
  PadicMatrix coeff(const std::map<std::string, int>& exps) const { return coeff(index_of(exps)); }
  PadicMatrix constant_term() const { return coeff(zero_index()); }

  // Adds c times the monomial, normalizing by the relation and truncation.
  void add_term(MultiIndex idx, const Coeff& c);
  void add_term(const MultiIndex& idx, const PadicMatrix& c);

  PDSeries operator+(const PDSeries& o) const;
  PDSeries operator-(const PDSeries& o) const;
  PDSeries operator-() const;
  PDSeries operator*(const PDSeries& o) const;
  PDSeries& operator+=(const PDSeries& o);
  PDSeries scaled(u64 c) const;
  // Left and right products with a constant matrix.
  PDSeries left_mul(const PadicMatrix& m) const;
  PDSeries right_mul(const PadicMatrix& m) const;
  PDSeries change_prec(int m) const;
  // Keep only the terms satisfying pred.
  PDSeries filtered(const std::function<bool(const MultiIndex&)>& pred) const;
  // Scalar series only: the unique entry of each coefficient.
  u64 scalar_coeff(const MultiIndex& idx) const;

  bool operator==(const PDSeries& o) const;
  std::string index_str(const MultiIndex& idx) const;
  std::string str() const;

  int pd_degree(const MultiIndex& idx) const;

 private:
  friend PDSeries pd_multiply(const PDSeries&, const PDSeries&);
  bool normalize(MultiIndex& idx, u64& factor) const;

  Ring ring_;
  PrecisionContext ctx_;
  int dim_;
  TermMap terms_;
};

PDSeries pd_multiply(const PDSeries& f, const PDSeries& g);

// Images are scalar series over one target ring.  Variables of the source
// that are not listed map to the same-named variable of the target.
struct Substitution {
  Ring target;
  std::map<std::string, PDSeries> images;
};

PDSeries pd_substitute(const PDSeries& f, const Substitution& s);

// First index (graded order) where the two series differ.
std::optional<MultiIndex> first_difference(const PDSeries& a, const PDSeries& b);

// Sum over i >= 1 of (-1)^{i-1}(i-1)! var^[i], up to the ring's order.
PDSeries log1p_series(Ring ring, const PrecisionContext& ctx, const std::string& var);
// (1 + var)^N with var^[i]-coordinate N(N-1)...(N-i+1).
PDSeries binomial_power(Ring ring, const std::string& var, const PadicMatrix& n);

// Binomial coefficient reduced mod the context's modulus.
u64 binomial_mod(const PrecisionContext& ctx, int n, int k);

}  // namespace prl
