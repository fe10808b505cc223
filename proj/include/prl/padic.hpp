#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "prl/errors.hpp"

namespace prl {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using Rational = boost::rational<i64>;

class PrecisionContext {
 public:
  PrecisionContext(u64 p, int abs_prec);

  u64 p() const { return p_; }
  int abs_prec() const { return m_; }
  u64 modulus() const { return mod_; }

  PrecisionContext widened(int extra) const { return PrecisionContext(p_, m_ + extra); }
  PrecisionContext with_prec(int m) const { return PrecisionContext(p_, m); }

  u64 reduce(i64 v) const;
  u64 add(u64 a, u64 b) const { u64 s = a + b; return s >= mod_ ? s - mod_ : s; }
  u64 sub(u64 a, u64 b) const { return a >= b ? a - b : a + mod_ - b; }
  u64 neg(u64 a) const { return a == 0 ? 0 : mod_ - a; }
  u64 mul(u64 a, u64 b) const {
    return static_cast<u64>(static_cast<unsigned __int128>(a) * b % mod_);
  }
  u64 pow(u64 a, u64 e) const;
  // Inverse of a unit residue; throws NonUnitInverse otherwise.
  u64 inv(u64 a) const;
  // p-adic valuation of a residue, capped at abs_prec for zero.
  int val(u64 a) const;
  // Residue a / p^k when p^k | a, in the context of precision M - k.
  u64 shift_down(u64 a, int k) const;

  bool operator==(const PrecisionContext& o) const { return p_ == o.p_ && m_ == o.m_; }

 private:
  u64 p_;
  int m_;
  u64 mod_;
};

bool is_prime(u64 n);
// Largest power of p dividing n!.
int factorial_valuation(u64 p, u64 n);

// Exponent v of an absolute value p^{-v}; +infinity encodes the value 0.
class ValueExponent {
 public:
  ValueExponent() : inf_(true) {}
  ValueExponent(Rational v) : v_(v), inf_(false) {}
  ValueExponent(i64 v) : v_(v), inf_(false) {}
  static ValueExponent infinity() { return ValueExponent(); }

  bool is_infinite() const { return inf_; }
  const Rational& value() const;

  ValueExponent operator+(const ValueExponent& o) const;
  ValueExponent operator-(const ValueExponent& o) const;
  ValueExponent operator*(const Rational& k) const;

  std::strong_ordering operator<=>(const ValueExponent& o) const;
  bool operator==(const ValueExponent& o) const { return (*this <=> o) == 0; }

  std::string str() const;
  static ValueExponent parse(const std::string& s);

 private:
  Rational v_{0};
  bool inf_;
};

std::string rational_str(const Rational& r);
Rational parse_rational(const std::string& s);
i64 floor_rational(const Rational& r);

std::ostream& operator<<(std::ostream& os, const ValueExponent& v);

struct Valuation {
  int value;
  bool at_floor;
  ValueExponent exponent() const {
    return at_floor ? ValueExponent::infinity() : ValueExponent(i64{value});
  }
  bool operator==(const Valuation&) const = default;
};

class PadicScalar {
 public:
  PadicScalar(const PrecisionContext& ctx, i64 v = 0) : ctx_(ctx), r_(ctx.reduce(v)) {}
  static PadicScalar from_residue(const PrecisionContext& ctx, u64 r);
  static PadicScalar parse(const PrecisionContext& ctx, const std::string& s);

  const PrecisionContext& ctx() const { return ctx_; }
  u64 residue() const { return r_; }
  bool is_zero() const { return r_ == 0; }
  bool is_unit() const { return r_ % ctx_.p() != 0; }
  Valuation valuation() const;
  // Symmetric representative in (-p^M/2, p^M/2].
  i64 signed_residue() const;

  PadicScalar operator+(const PadicScalar& o) const;
  PadicScalar operator-(const PadicScalar& o) const;
  PadicScalar operator*(const PadicScalar& o) const;
  PadicScalar operator-() const;
  PadicScalar& operator+=(const PadicScalar& o) { return *this = *this + o; }
  PadicScalar& operator-=(const PadicScalar& o) { return *this = *this - o; }
  PadicScalar& operator*=(const PadicScalar& o) { return *this = *this * o; }
  PadicScalar inv() const;
  PadicScalar pow(u64 e) const;
  // Division by p^k; fails unless divisible and lowers the precision by k.
  PadicScalar exact_divide(int k) const;
  // Same residue read at another precision (reduction when lowering).
  PadicScalar change_prec(int m) const;

  bool operator==(const PadicScalar& o) const { return ctx_ == o.ctx_ && r_ == o.r_; }
  std::string str() const { return std::to_string(r_); }

 private:
  PrecisionContext ctx_;
  u64 r_;
};

enum class ArithKind { add, sub, mul, inv };
PadicScalar scalar_arith(const PadicScalar& a, const PadicScalar& b, ArithKind kind);

PadicScalar teichmuller_lift(u64 a, const PrecisionContext& ctx);

class PadicMatrix {
 public:
  PadicMatrix(const PrecisionContext& ctx, int rows, int cols);
  PadicMatrix(const PrecisionContext& ctx, int rows, int cols, const std::vector<i64>& entries);
  static PadicMatrix identity(const PrecisionContext& ctx, int d);
  static PadicMatrix zero(const PrecisionContext& ctx, int d) { return PadicMatrix(ctx, d, d); }
  static PadicMatrix scalar(const PrecisionContext& ctx, int d, i64 c);
  static PadicMatrix elementary(const PrecisionContext& ctx, int d, int i, int j);

  const PrecisionContext& ctx() const { return ctx_; }
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int dim() const { return rows_; }
  bool square() const { return rows_ == cols_; }

  u64 at(int i, int j) const { return e_[static_cast<size_t>(i) * cols_ + j]; }
  u64& at(int i, int j) { return e_[static_cast<size_t>(i) * cols_ + j]; }
  PadicScalar entry(int i, int j) const { return PadicScalar::from_residue(ctx_, at(i, j)); }
  void set(int i, int j, const PadicScalar& s);
  const std::vector<u64>& data() const { return e_; }

  bool is_zero() const;
  bool is_identity() const;

  PadicMatrix operator+(const PadicMatrix& o) const;
  PadicMatrix operator-(const PadicMatrix& o) const;
  PadicMatrix operator*(const PadicMatrix& o) const;
  PadicMatrix operator-() const;
  PadicMatrix& operator+=(const PadicMatrix& o);
  PadicMatrix& operator-=(const PadicMatrix& o);
  PadicMatrix scaled(u64 c) const;
  PadicMatrix scaled(const PadicScalar& c) const { return scaled(c.residue()); }
  void add_scaled(const PadicMatrix& o, u64 c);
  PadicMatrix pow(u64 e) const;
  PadicMatrix transpose() const;
  PadicMatrix inverse() const;
  PadicScalar det() const;
  PadicMatrix change_prec(int m) const;
  PadicMatrix exact_divide(int k) const;
  // Smallest valuation among entries; abs_prec when zero.
  int min_valuation() const;

  bool operator==(const PadicMatrix& o) const;
  std::string str() const;

 private:
  PrecisionContext ctx_;
  int rows_, cols_;
  std::vector<u64> e_;
};

struct SmithForm {
  PadicMatrix U, D, V;  // U * A * V = D with U, V invertible
  std::vector<Valuation> invariants;
  bool swap_parity;
};

SmithForm smith_form(const PadicMatrix& a);
int unit_rank(const PadicMatrix& a);

struct NilpotencyProfile {
  std::optional<int> index;
  std::vector<int> ranks;
  bool operator==(const NilpotencyProfile&) const = default;
};

NilpotencyProfile nilpotency_profile(const PadicMatrix& n);

}  // namespace prl
