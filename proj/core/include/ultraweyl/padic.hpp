#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "ultraweyl/errors.hpp"

namespace ultraweyl {

enum class Backend { exact, floating };

/// Global parameters of one computation: the prime, the half-dimension d
/// (phase space is Q_p^{2d}), and the deepest root of unity p^M the scalar
/// field admits.
struct FieldParams {
  long p = 3;
  int d = 1;
  int M = 4;
  Backend backend = Backend::exact;

  void validate() const;  // throws Error on violation
  int n_phase() const { return 2 * d; }
  bool operator==(const FieldParams&) const = default;
};

bool is_odd_prime(long p);

/// Levels beyond this are refused; a cell grid at level L has p^(L*n) cells,
/// so anything near this bound is unusable long before it is reached.
inline constexpr int kMaxLevel = 24;

/// (r, s): support contained in p^{-r}Z_p^n, constant on cosets of p^s Z_p^n.
struct Resolution {
  int r = 0;
  int s = 0;
  int level() const { return r + s; }
  bool operator==(const Resolution&) const = default;
  Resolution refined(const Resolution& o) const { return {r > o.r ? r : o.r, s > o.s ? s : o.s}; }
  void check() const {
    if (r + s < 0) throw Error("resolution must satisfy r+s >= 0");
    if (r + s > kMaxLevel) throw Error("resolution overflow beyond configured depth");
  }
};

mpz_class pow_p(long p, int e);   // p^e, e >= 0
mpq_class pow_q(long p, long e);  // p^e as a rational, any sign

/// p-adic valuation of a nonzero rational; nullopt for 0.
std::optional<long> padic_val(long p, const mpq_class& x);

/// Exactly p^e or 0. The value type of |.|_p and mu0.
class PowerOfP {
 public:
  static PowerOfP zero() { return PowerOfP(true, 0); }
  static PowerOfP one() { return PowerOfP(false, 0); }
  static PowerOfP pow(long e) { return PowerOfP(false, e); }

  bool is_zero() const { return zero_; }
  long exponent() const;  // throws if zero

  PowerOfP operator*(const PowerOfP& o) const {
    if (zero_ || o.zero_) return zero();
    return pow(e_ + o.e_);
  }
  PowerOfP pow_int(long m) const {
    if (zero_) {
      if (m <= 0) throw Error("0 raised to a non-positive power");
      return zero();
    }
    return pow(e_ * m);
  }
  static PowerOfP max(const PowerOfP& a, const PowerOfP& b) { return b < a ? a : b; }

  bool operator==(const PowerOfP&) const = default;
  bool operator<(const PowerOfP& o) const {
    if (zero_) return !o.zero_;
    if (o.zero_) return false;
    return e_ < o.e_;
  }
  bool operator<=(const PowerOfP& o) const { return *this < o || *this == o; }

  mpq_class to_rational(long p) const;
  double to_double(long p) const;

 private:
  PowerOfP(bool z, long e) : zero_(z), e_(e) {}
  bool zero_;
  long e_;
};

/// A p-power root of unity as its phase: a reduced fraction num/den mod 1,
/// den = p^m. The group law is addition of phases.
struct RootOfUnity {
  long num = 0;
  long den = 1;

  static RootOfUnity make(long p, long num, long den);  // canonicalizes
  RootOfUnity conj(long p) const { return make(p, den - num, den); }
  RootOfUnity add(const RootOfUnity& o, long p) const;
  bool is_one() const { return num == 0; }
  bool operator==(const RootOfUnity&) const = default;
  int depth(long p) const;  // m with den = p^m
};

/// Deformation parameter theta = p^t * u or 0. User-facing values have a
/// positive integer unit part u (syntax "t,u"); negation is supported
/// internally (stage composition, the inverse of Pi_theta).
struct ThetaParam {
  long p = 3;
  bool zero = false;
  long t = 0;
  long u = 1;

  static ThetaParam zero_value(long p) { return ThetaParam{p, true, 0, 1}; }
  static ThetaParam make(long p, long t, long u);               // requires u > 0
  static ThetaParam from_rational(long p, const mpq_class& v);  // v in Z_p cap Q, any sign
  mpq_class value() const;
  PowerOfP abs() const;  // |theta|_p
  long val() const;      // t; throws on zero
  ThetaParam add(const ThetaParam& o) const;
  ThetaParam negate() const;
  bool operator==(const ThetaParam&) const = default;
  std::string str() const;
};

/// An exact element of (p^{-r} Z_p / p^s Z_p)^n: per coordinate a canonical
/// digit word a in [0, p^{r+s}) representing a * p^{-r}.
class GridPoint {
 public:
  GridPoint(long p, int n, Resolution res);  // the zero point
  static GridPoint from_rationals(long p, const std::vector<mpq_class>& xs,
                                  std::optional<Resolution> res = std::nullopt);

  long p() const { return p_; }
  int dim() const { return static_cast<int>(a_.size()); }
  Resolution res() const { return res_; }
  const mpz_class& digits(int i) const { return a_[i]; }
  mpq_class coord(int i) const;
  std::vector<mpq_class> coords() const;

  bool is_zero() const;
  GridPoint add(const GridPoint& o) const;
  GridPoint sub(const GridPoint& o) const;
  GridPoint neg() const;
  /// Exact scaling by a nonzero rational (p-power times unit); gamma == 0
  /// collapses to the zero point at the transformed resolution.
  GridPoint scale(const mpq_class& gamma) const;
  GridPoint refine(Resolution target) const;  // target.r >= r, target.s <= s allowed (coarsen coset)

  /// Valuation of coordinate i; nullopt for the zero digit word.
  std::optional<long> valuation(int i) const;
  PowerOfP abs(int i) const;
  PowerOfP abs_sup() const;  // max over coordinates

  bool operator==(const GridPoint&) const = default;

 private:
  long p_;
  Resolution res_;
  std::vector<mpz_class> a_;
  mpz_class modulus() const { return pow_p(p_, res_.level()); }
};

/// An exact point of k^n as rational coordinates (finite p-adic expansions,
/// signs kept). Used wherever a point must be known exactly rather than as
/// a coset representative: spectral weights, translation amounts.
using RatPoint = std::vector<mpq_class>;

RatPoint rat_neg(const RatPoint& a);
RatPoint rat_add(const RatPoint& a, const RatPoint& b);
RatPoint rat_sub(const RatPoint& a, const RatPoint& b);
RatPoint rat_scaled(const RatPoint& a, const mpq_class& c);
/// max(0, log_p |v|_sup): the support exponent of the point.
int rat_sup_exp(long p, const RatPoint& v);

/// |x|_p as a PowerOfP (0 for x = 0).
PowerOfP padic_abs(long p, const mpq_class& x);

/// mu0(X) = max{1, |X|} for odd p (|2| = 1, the dual norm equals the norm).
PowerOfP mu0(const GridPoint& X);
PowerOfP mu0_rat(long p, const std::vector<mpq_class>& X);

/// The standard character Psi0 evaluated at an exact rational: the phase is
/// the p-adic fractional part. Throws DepthError if the p-part of the
/// denominator exceeds p^M.
RootOfUnity psi0(long p, int M, const mpq_class& x);

/// Symplectic pairing [X,Y] = <y,xi> - <x,eta> on k^{2d}, X=(x,xi), Y=(y,eta).
mpq_class sympl_pair(const GridPoint& X, const GridPoint& Y);
mpq_class sympl_pair_rat(const std::vector<mpq_class>& X, const std::vector<mpq_class>& Y);

/// Exact value of the integral of mu0^{-N} over k^{2d} (finite for N > 2d):
/// 1 + (1 - p^{-2d}) p^{2d-N} / (1 - p^{2d-N}).
mpq_class mu0_weight_l1(long p, int d, int N);

/// Unit-part inverse helpers.
mpz_class mod_inverse(const mpz_class& u, const mpz_class& m);

}  // namespace ultraweyl
