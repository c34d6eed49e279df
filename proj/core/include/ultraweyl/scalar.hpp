#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "ultraweyl/padic.hpp"

namespace ultraweyl {

/// Cyclotomic context Q(zeta_N), N = p^M. p == 0 marks a context-free value
/// (a plain rational), compatible with any context of the same prime.
struct CycCtx {
  long p = 0;
  int M = 0;
  long N() const;    // p^M
  long phi() const;  // (p-1) p^{M-1}
  long pM1() const;  // p^{M-1}
  bool operator==(const CycCtx&) const = default;
};

/// One scalar of the dual backend. Exact values live in Q(zeta_{p^M}) as a
/// sparse sum of rational multiples of canonical power-basis monomials
/// (exponents in [0, phi)); float values are IEEE complex doubles.
class Scalar {
 public:
  Scalar() : backend_(Backend::exact) {}  // exact zero, context-free

  static Scalar zero(Backend b);
  static Scalar one(Backend b);
  static Scalar integer(Backend b, long v);
  static Scalar rational(Backend b, const mpq_class& q);
  static Scalar from_root(Backend b, const CycCtx& ctx, const RootOfUnity& r);
  static Scalar from_complex(const std::complex<double>& z);

  Backend backend() const { return backend_; }
  const CycCtx& ctx() const { return ctx_; }

  Scalar operator+(const Scalar& o) const;
  Scalar operator-(const Scalar& o) const;
  Scalar operator*(const Scalar& o) const;
  Scalar& operator+=(const Scalar& o);
  Scalar operator-() const;
  Scalar conj() const;
  Scalar scaled(const mpq_class& q) const;        // exact rational scale (both backends)
  Scalar scaled_pow(long p, long e) const;        // multiply by p^e
  Scalar abs2() const { return *this * conj(); }  // |z|^2, stays in the field

  bool is_zero() const;
  bool operator==(const Scalar& o) const;  // exact: field equality; float: bitwise
  /// Exact equality for exact backend, |a-b| <= tol for float.
  static bool close(const Scalar& a, const Scalar& b, double tol);

  std::complex<double> to_complex() const;
  double abs() const { return std::abs(to_complex()); }

  /// Rational value if the scalar is exact and purely rational.
  bool rational_value(mpq_class& out) const;

  /// Canonical power-basis coefficients, length phi (exact backend only).
  std::vector<mpq_class> dense_coeffs() const;

  std::string str() const;

  // Exposed for serialization.
  struct Term {
    long e;
    mpq_class c;
  };
  const std::vector<Term>& terms() const { return t_; }
  static Scalar from_terms(const CycCtx& ctx, std::vector<Term> terms);

 private:
  Backend backend_;
  CycCtx ctx_;            // exact backend only; p==0 for plain rationals
  std::vector<Term> t_;   // sorted by exponent, canonical, no zero coeffs
  std::complex<double> z_{0.0, 0.0};

  void merge_ctx(const Scalar& o, CycCtx& out) const;
  static void push_reduced(const CycCtx& ctx, long e, const mpq_class& c,
                           std::vector<Term>& out);
  static std::vector<Term> normalize(const CycCtx& ctx, std::vector<Term> raw);
};

/// Complex unit circle value of a root of unity (float backend and display).
std::complex<double> root_to_complex(const RootOfUnity& r);

}  // namespace ultraweyl
