#include "prl/padic.hpp"

#include <limits>
#include <ostream>
#include <sstream>
#include <utility>

namespace prl {

bool is_prime(u64 n) {
  if (n < 2) return false;
  for (u64 d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

int factorial_valuation(u64 p, u64 n) {
  int v = 0;
  while (n) {
    n /= p;
    v += static_cast<int>(n);
  }
  return v;
}

PrecisionContext::PrecisionContext(u64 p, int abs_prec) : p_(p), m_(abs_prec), mod_(1) {
  if (!is_prime(p)) throw InputError("p = " + std::to_string(p) + " is not prime");
  if (abs_prec < 1) throw InputError("absolute precision must be >= 1");
  for (int i = 0; i < abs_prec; ++i) {
    if (mod_ > (u64{1} << 62) / p)
      throw InputError("p^M exceeds the 62-bit residue range");
    mod_ *= p;
  }
}

u64 PrecisionContext::reduce(i64 v) const {
  if (v >= 0) return static_cast<u64>(v) % mod_;
  u64 m = static_cast<u64>(-(v + 1)) % mod_;
  return mod_ - 1 - m;
}

u64 PrecisionContext::pow(u64 a, u64 e) const {
  u64 r = 1 % mod_;
  while (e) {
    if (e & 1) r = mul(r, a);
    a = mul(a, a);
    e >>= 1;
  }
  return r;
}

u64 PrecisionContext::inv(u64 a) const {
  if (a % p_ == 0) throw NonUnitInverse("inverse of non-unit " + std::to_string(a));
  __int128 r0 = mod_, r1 = a, s0 = 0, s1 = 1;
  while (r1) {
    __int128 q = r0 / r1;
    std::swap(r0, r1);
    r1 -= q * r0;
    std::swap(s0, s1);
    s1 -= q * s0;
  }
  __int128 m = mod_;
  return static_cast<u64>(((s0 % m) + m) % m);
}

int PrecisionContext::val(u64 a) const {
  if (a == 0) return m_;
  int v = 0;
  while (a % p_ == 0) {
    a /= p_;
    ++v;
  }
  return v;
}

u64 PrecisionContext::shift_down(u64 a, int k) const {
  for (int i = 0; i < k; ++i) a /= p_;
  return a;
}

// ValueExponent

const Rational& ValueExponent::value() const {
  if (inf_) throw InputError("value of an infinite exponent");
  return v_;
}

ValueExponent ValueExponent::operator+(const ValueExponent& o) const {
  if (inf_ || o.inf_) return infinity();
  return ValueExponent(v_ + o.v_);
}

ValueExponent ValueExponent::operator-(const ValueExponent& o) const {
  if (o.inf_) throw InputError("subtracting an infinite exponent");
  if (inf_) return infinity();
  return ValueExponent(v_ - o.v_);
}

ValueExponent ValueExponent::operator*(const Rational& k) const {
  if (inf_) {
    if (k == 0) return ValueExponent(i64{0});
    return infinity();
  }
  return ValueExponent(v_ * k);
}

std::strong_ordering ValueExponent::operator<=>(const ValueExponent& o) const {
  if (inf_ || o.inf_) return inf_ <=> o.inf_;
  if (v_ < o.v_) return std::strong_ordering::less;
  if (o.v_ < v_) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::string rational_str(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

Rational parse_rational(const std::string& s) {
  try {
    size_t slash = s.find('/');
    size_t pos = 0;
    if (slash == std::string::npos) {
      i64 n = std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return Rational(n);
    }
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    i64 n = std::stoll(a, &pos);
    if (pos != a.size()) throw std::invalid_argument(s);
    i64 d = std::stoll(b, &pos);
    if (pos != b.size() || d == 0) throw std::invalid_argument(s);
    return Rational(n, d);
  } catch (const std::logic_error&) {
    throw InputError("malformed rational '" + s + "'");
  }
}

i64 floor_rational(const Rational& r) {
  i64 n = r.numerator(), d = r.denominator();
  i64 q = n / d;
  if (n % d != 0 && n < 0) --q;
  return q;
}

std::string ValueExponent::str() const { return inf_ ? "inf" : rational_str(v_); }

ValueExponent ValueExponent::parse(const std::string& s) {
  if (s == "inf") return infinity();
  return ValueExponent(parse_rational(s));
}

std::ostream& operator<<(std::ostream& os, const ValueExponent& v) { return os << v.str(); }

// PadicScalar

PadicScalar PadicScalar::from_residue(const PrecisionContext& ctx, u64 r) {
  PadicScalar s(ctx);
  s.r_ = r % ctx.modulus();
  return s;
}

PadicScalar PadicScalar::parse(const PrecisionContext& ctx, const std::string& s) {
  size_t pos = 0;
  i64 v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::logic_error&) {
    throw InputError("malformed integer '" + s + "'");
  }
  if (pos != s.size()) throw InputError("malformed integer '" + s + "'");
  return PadicScalar(ctx, v);
}

Valuation PadicScalar::valuation() const {
  return {ctx_.val(r_), r_ == 0};
}

i64 PadicScalar::signed_residue() const {
  u64 m = ctx_.modulus();
  return r_ > m / 2 ? -static_cast<i64>(m - r_) : static_cast<i64>(r_);
}

static void check_ctx(const PrecisionContext& a, const PrecisionContext& b) {
  if (!(a == b)) throw ContextMismatch("operands carry different precision contexts");
}

PadicScalar PadicScalar::operator+(const PadicScalar& o) const {
  check_ctx(ctx_, o.ctx_);
  return from_residue(ctx_, ctx_.add(r_, o.r_));
}

PadicScalar PadicScalar::operator-(const PadicScalar& o) const {
  check_ctx(ctx_, o.ctx_);
  return from_residue(ctx_, ctx_.sub(r_, o.r_));
}

PadicScalar PadicScalar::operator*(const PadicScalar& o) const {
  check_ctx(ctx_, o.ctx_);
  return from_residue(ctx_, ctx_.mul(r_, o.r_));
}

PadicScalar PadicScalar::operator-() const { return from_residue(ctx_, ctx_.neg(r_)); }
PadicScalar PadicScalar::inv() const { return from_residue(ctx_, ctx_.inv(r_)); }
PadicScalar PadicScalar::pow(u64 e) const { return from_residue(ctx_, ctx_.pow(r_, e)); }

PadicScalar PadicScalar::exact_divide(int k) const {
  if (k < 0) throw InputError("negative shift");
  if (k >= ctx_.abs_prec()) throw PrecisionInsufficient("division by p^k exhausts the precision");
  if (ctx_.val(r_) < k) throw InputError("residue not divisible by p^" + std::to_string(k));
  PrecisionContext lower = ctx_.with_prec(ctx_.abs_prec() - k);
  return from_residue(lower, ctx_.shift_down(r_, k));
}

PadicScalar PadicScalar::change_prec(int m) const {
  return from_residue(ctx_.with_prec(m), r_);
}

PadicScalar scalar_arith(const PadicScalar& a, const PadicScalar& b, ArithKind kind) {
  switch (kind) {
    case ArithKind::add: return a + b;
    case ArithKind::sub: return a - b;
    case ArithKind::mul: return a * b;
    case ArithKind::inv: return a.inv();
  }
  return a;
}

PadicScalar teichmuller_lift(u64 a, const PrecisionContext& ctx) {
  if (a >= ctx.p()) throw InputError("residue class out of range");
  u64 x = a;
  for (;;) {
    u64 y = ctx.pow(x, ctx.p());
    if (y == x) return PadicScalar::from_residue(ctx, x);
    x = y;
  }
}

// PadicMatrix

PadicMatrix::PadicMatrix(const PrecisionContext& ctx, int rows, int cols)
    : ctx_(ctx), rows_(rows), cols_(cols), e_(static_cast<size_t>(rows) * cols, 0) {
  if (rows < 0 || cols < 0) throw InputError("negative matrix size");
}

PadicMatrix::PadicMatrix(const PrecisionContext& ctx, int rows, int cols,
                         const std::vector<i64>& entries)
    : PadicMatrix(ctx, rows, cols) {
  if (entries.size() != e_.size()) throw InputError("matrix entry count mismatch");
  for (size_t i = 0; i < e_.size(); ++i) e_[i] = ctx.reduce(entries[i]);
}

PadicMatrix PadicMatrix::identity(const PrecisionContext& ctx, int d) { return scalar(ctx, d, 1); }

PadicMatrix PadicMatrix::scalar(const PrecisionContext& ctx, int d, i64 c) {
  PadicMatrix m(ctx, d, d);
  for (int i = 0; i < d; ++i) m.at(i, i) = ctx.reduce(c);
  return m;
}

PadicMatrix PadicMatrix::elementary(const PrecisionContext& ctx, int d, int i, int j) {
  PadicMatrix m(ctx, d, d);
  m.at(i, j) = 1 % ctx.modulus();
  return m;
}

void PadicMatrix::set(int i, int j, const PadicScalar& s) {
  check_ctx(ctx_, s.ctx());
  at(i, j) = s.residue();
}

bool PadicMatrix::is_zero() const {
  for (u64 x : e_)
    if (x) return false;
  return true;
}

bool PadicMatrix::is_identity() const {
  if (!square()) return false;
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j)
      if (at(i, j) != (i == j ? 1 % ctx_.modulus() : 0)) return false;
  return true;
}

static void check_shape(const PadicMatrix& a, const PadicMatrix& b) {
  check_ctx(a.ctx(), b.ctx());
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("matrix shape mismatch");
}

PadicMatrix PadicMatrix::operator+(const PadicMatrix& o) const {
  PadicMatrix r = *this;
  r += o;
  return r;
}

PadicMatrix PadicMatrix::operator-(const PadicMatrix& o) const {
  PadicMatrix r = *this;
  r -= o;
  return r;
}

PadicMatrix& PadicMatrix::operator+=(const PadicMatrix& o) {
  check_shape(*this, o);
  for (size_t i = 0; i < e_.size(); ++i) e_[i] = ctx_.add(e_[i], o.e_[i]);
  return *this;
}

PadicMatrix& PadicMatrix::operator-=(const PadicMatrix& o) {
  check_shape(*this, o);
  for (size_t i = 0; i < e_.size(); ++i) e_[i] = ctx_.sub(e_[i], o.e_[i]);
  return *this;
}

PadicMatrix PadicMatrix::operator-() const {
  PadicMatrix r = *this;
  for (auto& x : r.e_) x = ctx_.neg(x);
  return r;
}

PadicMatrix PadicMatrix::operator*(const PadicMatrix& o) const {
  check_ctx(ctx_, o.ctx_);
  if (cols_ != o.rows_) throw InputError("matrix shape mismatch in product");
  PadicMatrix r(ctx_, rows_, o.cols_);
  const u64 mod = ctx_.modulus();
  for (int i = 0; i < rows_; ++i)
    for (int k = 0; k < cols_; ++k) {
      u64 a = at(i, k);
      if (!a) continue;
      for (int j = 0; j < o.cols_; ++j) {
        u64 b = o.at(k, j);
        if (!b) continue;
        u64& t = r.at(i, j);
        t = static_cast<u64>((static_cast<unsigned __int128>(a) * b + t) % mod);
      }
    }
  return r;
}

PadicMatrix PadicMatrix::scaled(u64 c) const {
  PadicMatrix r = *this;
  for (auto& x : r.e_) x = ctx_.mul(x, c);
  return r;
}

void PadicMatrix::add_scaled(const PadicMatrix& o, u64 c) {
  check_shape(*this, o);
  const u64 mod = ctx_.modulus();
  for (size_t i = 0; i < e_.size(); ++i)
    e_[i] = static_cast<u64>((static_cast<unsigned __int128>(o.e_[i]) * c + e_[i]) % mod);
}

PadicMatrix PadicMatrix::pow(u64 e) const {
  if (!square()) throw InputError("power of a non-square matrix");
  PadicMatrix r = identity(ctx_, rows_), b = *this;
  while (e) {
    if (e & 1) r = r * b;
    b = b * b;
    e >>= 1;
  }
  return r;
}

PadicMatrix PadicMatrix::transpose() const {
  PadicMatrix r(ctx_, cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) r.at(j, i) = at(i, j);
  return r;
}

PadicMatrix PadicMatrix::inverse() const {
  if (!square()) throw InputError("inverse of a non-square matrix");
  int d = rows_;
  PadicMatrix a = *this, r = identity(ctx_, d);
  for (int c = 0; c < d; ++c) {
    int piv = -1;
    for (int i = c; i < d; ++i)
      if (a.at(i, c) % ctx_.p()) {
        piv = i;
        break;
      }
    if (piv < 0) throw NonUnitInverse("matrix is not invertible mod p");
    for (int j = 0; j < d; ++j) {
      std::swap(a.at(c, j), a.at(piv, j));
      std::swap(r.at(c, j), r.at(piv, j));
    }
    u64 s = ctx_.inv(a.at(c, c));
    for (int j = 0; j < d; ++j) {
      a.at(c, j) = ctx_.mul(a.at(c, j), s);
      r.at(c, j) = ctx_.mul(r.at(c, j), s);
    }
    for (int i = 0; i < d; ++i) {
      if (i == c || !a.at(i, c)) continue;
      u64 f = a.at(i, c);
      for (int j = 0; j < d; ++j) {
        a.at(i, j) = ctx_.sub(a.at(i, j), ctx_.mul(f, a.at(c, j)));
        r.at(i, j) = ctx_.sub(r.at(i, j), ctx_.mul(f, r.at(c, j)));
      }
    }
  }
  return r;
}

PadicScalar PadicMatrix::det() const {
  if (!square()) throw InputError("determinant of a non-square matrix");
  SmithForm s = smith_form(*this);
  u64 r = 1 % ctx_.modulus();
  for (int i = 0; i < rows_; ++i) r = ctx_.mul(r, s.D.at(i, i));
  return PadicScalar::from_residue(ctx_, s.swap_parity ? ctx_.neg(r) : r);
}

PadicMatrix PadicMatrix::change_prec(int m) const {
  PadicMatrix r(ctx_.with_prec(m), rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) r.e_[i] = e_[i] % r.ctx_.modulus();
  return r;
}

PadicMatrix PadicMatrix::exact_divide(int k) const {
  if (k >= ctx_.abs_prec()) throw PrecisionInsufficient("division by p^k exhausts the precision");
  PadicMatrix r(ctx_.with_prec(ctx_.abs_prec() - k), rows_, cols_);
  for (size_t i = 0; i < e_.size(); ++i) {
    if (ctx_.val(e_[i]) < k) throw InputError("matrix not divisible by p^" + std::to_string(k));
    r.e_[i] = ctx_.shift_down(e_[i], k);
  }
  return r;
}

int PadicMatrix::min_valuation() const {
  int v = ctx_.abs_prec();
  for (u64 x : e_) v = std::min(v, ctx_.val(x));
  return v;
}

bool PadicMatrix::operator==(const PadicMatrix& o) const {
  return ctx_ == o.ctx_ && rows_ == o.rows_ && cols_ == o.cols_ && e_ == o.e_;
}

std::string PadicMatrix::str() const {
  std::ostringstream os;
  os << '[';
  for (int i = 0; i < rows_; ++i) {
    os << (i ? ", [" : "[");
    for (int j = 0; j < cols_; ++j) os << (j ? ", " : "") << at(i, j);
    os << ']';
  }
  os << ']';
  return os.str();
}

SmithForm smith_form(const PadicMatrix& a) {
  const PrecisionContext& ctx = a.ctx();
  const int r = a.rows(), c = a.cols();
  SmithForm s{PadicMatrix::identity(ctx, r), a, PadicMatrix::identity(ctx, c), {}, false};
  PadicMatrix& D = s.D;
  PadicMatrix& U = s.U;
  PadicMatrix& V = s.V;
  const int n = std::min(r, c);
  int k = 0;
  for (; k < n; ++k) {
    int bi = -1, bj = -1, bv = ctx.abs_prec();
    for (int i = k; i < r; ++i)
      for (int j = k; j < c; ++j) {
        int v = ctx.val(D.at(i, j));
        if (D.at(i, j) && v < bv) {
          bv = v;
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;
    if (bi != k) {
      for (int j = 0; j < c; ++j) std::swap(D.at(k, j), D.at(bi, j));
      for (int j = 0; j < r; ++j) std::swap(U.at(k, j), U.at(bi, j));
      s.swap_parity = !s.swap_parity;
    }
    if (bj != k) {
      for (int i = 0; i < r; ++i) std::swap(D.at(i, k), D.at(i, bj));
      for (int i = 0; i < c; ++i) std::swap(V.at(i, k), V.at(i, bj));
      s.swap_parity = !s.swap_parity;
    }
    u64 uinv = ctx.inv(ctx.shift_down(D.at(k, k), bv));
    for (int i = k + 1; i < r; ++i) {
      if (!D.at(i, k)) continue;
      u64 q = ctx.mul(ctx.shift_down(D.at(i, k), bv), uinv);
      for (int j = k; j < c; ++j) D.at(i, j) = ctx.sub(D.at(i, j), ctx.mul(q, D.at(k, j)));
      for (int j = 0; j < r; ++j) U.at(i, j) = ctx.sub(U.at(i, j), ctx.mul(q, U.at(k, j)));
    }
    for (int j = k + 1; j < c; ++j) {
      if (!D.at(k, j)) continue;
      u64 q = ctx.mul(ctx.shift_down(D.at(k, j), bv), uinv);
      D.at(k, j) = 0;
      for (int i = 0; i < c; ++i) V.at(i, j) = ctx.sub(V.at(i, j), ctx.mul(q, V.at(i, k)));
    }
  }
  for (int i = 0; i < n; ++i) {
    u64 x = D.at(i, i);
    s.invariants.push_back({ctx.val(x), x == 0});
  }
  return s;
}

int unit_rank(const PadicMatrix& a) {
  int r = 0;
  for (const auto& v : smith_form(a).invariants)
    if (!v.at_floor && v.value == 0) ++r;
  return r;
}

NilpotencyProfile nilpotency_profile(const PadicMatrix& n) {
  if (!n.square()) throw InputError("nilpotency profile of a non-square matrix");
  NilpotencyProfile out;
  const int d = n.dim();
  PadicMatrix pw = n;
  for (int e = 1; e <= d; ++e) {
    if (pw.is_zero()) {
      out.index = e;
      return out;
    }
    out.ranks.push_back(unit_rank(pw));
    pw = pw * n;
  }
  if (d == 0) out.index = 1;
  return out;
}

}  // namespace prl
