#include "ultraweyl/padic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ultraweyl {

bool is_odd_prime(long p) {
  if (p < 3 || p % 2 == 0) return false;
  for (long q = 3; q * q <= p; q += 2)
    if (p % q == 0) return false;
  return true;
}

void FieldParams::validate() const {
  if (!is_odd_prime(p)) throw Error("p must be an odd prime, got " + std::to_string(p));
  if (d < 1) throw Error("d must be >= 1");
  if (M < 1) throw Error("M must be >= 1");
  if (M > kMaxLevel) throw Error("M exceeds the supported depth");
}

mpz_class pow_p(long p, int e) {
  if (e < 0) throw Error("pow_p needs a non-negative exponent");
  mpz_class out;
  mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(e));
  return out;
}

mpq_class pow_q(long p, long e) {
  if (e >= 0) return mpq_class(pow_p(p, static_cast<int>(e)));
  return mpq_class(1, pow_p(p, static_cast<int>(-e)));
}

std::optional<long> padic_val(long p, const mpq_class& x) {
  if (x == 0) return std::nullopt;
  long v = 0;
  mpz_class n = x.get_num(), d = x.get_den();
  while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
    n /= p;
    ++v;
  }
  while (mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p))) {
    d /= p;
    --v;
  }
  return v;
}

long PowerOfP::exponent() const {
  if (zero_) throw Error("exponent of the zero absolute value");
  return e_;
}

mpq_class PowerOfP::to_rational(long p) const {
  if (zero_) return 0;
  if (e_ >= 0) return mpq_class(pow_p(p, static_cast<int>(e_)));
  return mpq_class(1, pow_p(p, static_cast<int>(-e_)));
}

double PowerOfP::to_double(long p) const {
  if (zero_) return 0.0;
  return std::pow(static_cast<double>(p), static_cast<double>(e_));
}

RootOfUnity RootOfUnity::make(long p, long num, long den) {
  if (den <= 0) throw Error("root-of-unity denominator must be a positive p-power");
  num %= den;
  if (num < 0) num += den;
  while (den > 1 && num % p == 0) {
    num /= p;
    den /= p;
  }
  if (num == 0) den = 1;
  return RootOfUnity{num, den};
}

RootOfUnity RootOfUnity::add(const RootOfUnity& o, long p) const {
  // den and o.den are p-powers; bring to the larger one.
  long d = std::max(den, o.den);
  long n = num * (d / den) + o.num * (d / o.den);
  return make(p, n, d);
}

int RootOfUnity::depth(long p) const {
  int m = 0;
  long d = den;
  while (d > 1) {
    d /= p;
    ++m;
  }
  return m;
}

ThetaParam ThetaParam::make(long p, long t, long u) {
  if (t < 0) throw Error("theta must lie in the ring of integers (valuation >= 0)");
  if (u <= 0 || u % p == 0) throw Error("theta unit part must be a positive integer prime to p");
  return ThetaParam{p, false, t, u};
}

ThetaParam ThetaParam::from_rational(long p, const mpq_class& v) {
  if (v == 0) return zero_value(p);
  if (v.get_den() != 1) throw Error("theta must be a p-adic integer");
  mpz_class n = v.get_num();
  long t = 0;
  while (mpz_divisible_ui_p(n.get_mpz_t(), static_cast<unsigned long>(p))) {
    n /= p;
    ++t;
  }
  if (!n.fits_slong_p()) throw Error("theta unit part too large");
  return ThetaParam{p, false, t, n.get_si()};
}

mpq_class ThetaParam::value() const {
  if (zero) return 0;
  return mpq_class(u) * mpq_class(pow_p(p, static_cast<int>(t)));
}

PowerOfP ThetaParam::abs() const {
  if (zero) return PowerOfP::zero();
  return PowerOfP::pow(-t);
}

long ThetaParam::val() const {
  if (zero) throw Error("valuation of theta = 0");
  return t;
}

ThetaParam ThetaParam::add(const ThetaParam& o) const {
  if (p != o.p) throw Error("theta prime mismatch");
  return from_rational(p, value() + o.value());
}

ThetaParam ThetaParam::negate() const {
  if (zero) return *this;
  return ThetaParam{p, false, t, -u};
}

std::string ThetaParam::str() const {
  if (zero) return "0";
  return std::to_string(t) + "," + std::to_string(u);
}

GridPoint::GridPoint(long p, int n, Resolution res) : p_(p), res_(res), a_(n, mpz_class(0)) {
  res.check();
}

GridPoint GridPoint::from_rationals(long p, const std::vector<mpq_class>& xs,
                                    std::optional<Resolution> res) {
  Resolution r{0, 0};
  if (res) {
    r = *res;
  } else {
    // minimal resolution holding the points exactly: r = max(0, -min val)
    int need = 0;
    for (const auto& x : xs) {
      auto v = padic_val(p, x);
      if (v && *v < 0) need = std::max(need, static_cast<int>(-*v));
    }
    r = Resolution{need, 0};
  }
  r.check();
  GridPoint out(p, static_cast<int>(xs.size()), r);
  mpz_class mod = pow_p(p, r.level());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    // a = x * p^r mod p^{r+s}; requires x * p^r to be a p-adic integer
    mpq_class y = xs[i] * pow_q(p, r.r);
    auto v = padic_val(p, y);
    if (v && *v < 0)
      throw Error("rational not representable at the requested resolution");
    mpz_class num = y.get_num(), den = y.get_den();
    if (mod == 1) {
      out.a_[i] = 0;
      continue;
    }
    mpz_class inv = mod_inverse(den % mod, mod);
    mpz_class a = (num % mod) * inv % mod;
    if (a < 0) a += mod;
    out.a_[i] = a;
  }
  return out;
}

mpq_class GridPoint::coord(int i) const {
  if (res_.r >= 0) {
    mpq_class q(a_[i], pow_p(p_, res_.r));
    q.canonicalize();
    return q;
  }
  return mpq_class(a_[i] * pow_p(p_, -res_.r));
}

std::vector<mpq_class> GridPoint::coords() const {
  std::vector<mpq_class> out;
  out.reserve(a_.size());
  for (int i = 0; i < dim(); ++i) out.push_back(coord(i));
  return out;
}

bool GridPoint::is_zero() const {
  return std::all_of(a_.begin(), a_.end(), [](const mpz_class& z) { return z == 0; });
}

GridPoint GridPoint::add(const GridPoint& o) const {
  if (p_ != o.p_ || dim() != o.dim()) throw Error("grid point mismatch");
  // coarsest common refinement: finer support, coarser constancy
  Resolution t{std::max(res_.r, o.res_.r), std::min(res_.s, o.res_.s)};
  GridPoint x = refine(t), y = o.refine(t);
  mpz_class mod = x.modulus();
  for (int i = 0; i < dim(); ++i) {
    x.a_[i] = (x.a_[i] + y.a_[i]) % mod;
  }
  return x;
}

GridPoint GridPoint::sub(const GridPoint& o) const { return add(o.neg()); }

GridPoint GridPoint::neg() const {
  GridPoint out = *this;
  mpz_class mod = modulus();
  for (auto& v : out.a_)
    if (v != 0) v = mod - v;
  return out;
}

GridPoint GridPoint::scale(const mpq_class& gamma) const {
  if (gamma == 0) {
    // distinct "collapse to zero" result: the zero point at the same level
    return GridPoint(p_, dim(), res_);
  }
  long t = *padic_val(p_, gamma);
  mpq_class unit = gamma / PowerOfP::pow(t).to_rational(p_);
  Resolution nres{res_.r - static_cast<int>(t), res_.s + static_cast<int>(t)};
  nres.check();
  GridPoint out(p_, dim(), nres);
  mpz_class mod = out.modulus();
  if (mod == 1) return out;
  mpz_class m = unit.get_num() % mod, n = unit.get_den() % mod;
  if (m < 0) m += mod;
  mpz_class f = m * mod_inverse(n, mod) % mod;
  for (int i = 0; i < dim(); ++i) out.a_[i] = a_[i] * f % mod;
  return out;
}

GridPoint GridPoint::refine(Resolution target) const {
  if (target.r < res_.r)
    throw Error("refine: support exponent cannot shrink");
  target.check();
  GridPoint out(p_, dim(), target);
  mpz_class mod = out.modulus();
  mpz_class shift = pow_p(p_, target.r - res_.r);
  for (int i = 0; i < dim(); ++i) out.a_[i] = (a_[i] * shift) % mod;
  return out;
}

std::optional<long> GridPoint::valuation(int i) const {
  if (a_[i] == 0) return std::nullopt;
  mpz_class v = a_[i];
  long k = 0;
  while (mpz_divisible_ui_p(v.get_mpz_t(), static_cast<unsigned long>(p_))) {
    v /= p_;
    ++k;
  }
  return k - res_.r;
}

PowerOfP GridPoint::abs(int i) const {
  auto v = valuation(i);
  if (!v) return PowerOfP::zero();
  return PowerOfP::pow(-*v);
}

PowerOfP GridPoint::abs_sup() const {
  PowerOfP m = PowerOfP::zero();
  for (int i = 0; i < dim(); ++i) m = PowerOfP::max(m, abs(i));
  return m;
}

RatPoint rat_neg(const RatPoint& a) {
  RatPoint out = a;
  for (auto& x : out) x = -x;
  return out;
}

RatPoint rat_add(const RatPoint& a, const RatPoint& b) {
  RatPoint out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

RatPoint rat_sub(const RatPoint& a, const RatPoint& b) { return rat_add(a, rat_neg(b)); }

RatPoint rat_scaled(const RatPoint& a, const mpq_class& c) {
  RatPoint out = a;
  for (auto& x : out) x *= c;
  return out;
}

int rat_sup_exp(long p, const RatPoint& v) {
  int e = 0;
  for (const auto& x : v) {
    PowerOfP a = padic_abs(p, x);
    if (!a.is_zero()) e = std::max<long>(e, a.exponent());
  }
  return e;
}

PowerOfP padic_abs(long p, const mpq_class& x) {
  auto v = padic_val(p, x);
  if (!v) return PowerOfP::zero();
  return PowerOfP::pow(-*v);
}

PowerOfP mu0(const GridPoint& X) {
  return PowerOfP::max(PowerOfP::one(), X.abs_sup());
}

PowerOfP mu0_rat(long p, const std::vector<mpq_class>& X) {
  PowerOfP m = PowerOfP::one();
  for (const auto& x : X) m = PowerOfP::max(m, padic_abs(p, x));
  return m;
}

RootOfUnity psi0(long p, int M, const mpq_class& x) {
  mpz_class den = x.get_den();
  int m = 0;
  mpz_class d = den;
  while (mpz_divisible_ui_p(d.get_mpz_t(), static_cast<unsigned long>(p))) {
    d /= p;
    ++m;
  }
  if (m == 0) return RootOfUnity{0, 1};
  if (m > M)
    throw DepthError("character depth p^" + std::to_string(m) +
                     " exceeds the configured p^" + std::to_string(M));
  mpz_class pm = pow_p(p, m);
  // x = num / (u p^m): fractional part = num * u^{-1} mod p^m over p^m
  mpz_class u = d % pm;
  mpz_class num = x.get_num() % pm;
  if (num < 0) num += pm;
  mpz_class e = num * mod_inverse(u, pm) % pm;
  return RootOfUnity::make(p, e.get_si(), pm.get_si());
}

mpq_class sympl_pair(const GridPoint& X, const GridPoint& Y) {
  if (X.dim() != Y.dim() || X.dim() % 2 != 0) throw Error("symplectic pairing needs k^{2d}");
  return sympl_pair_rat(X.coords(), Y.coords());
}

mpq_class sympl_pair_rat(const std::vector<mpq_class>& X, const std::vector<mpq_class>& Y) {
  int n = static_cast<int>(X.size());
  int d = n / 2;
  mpq_class acc = 0;
  for (int i = 0; i < d; ++i) {
    acc += Y[i] * X[d + i];  // <y, xi>
    acc -= X[i] * Y[d + i];  // <x, eta>
  }
  return acc;
}

mpq_class mu0_weight_l1(long p, int d, int N) {
  if (N <= 2 * d) throw Error("mu0^{-N} is not integrable for N <= 2d");
  mpq_class q(1, pow_p(p, 2 * d));          // p^{-2d}
  mpq_class ratio(1, pow_p(p, N - 2 * d));  // p^{2d-N}
  return 1 + (1 - q) * ratio / (1 - ratio);
}

mpz_class mod_inverse(const mpz_class& u, const mpz_class& m) {
  mpz_class out;
  mpz_class uu = u % m;
  if (uu < 0) uu += m;
  if (mpz_invert(out.get_mpz_t(), uu.get_mpz_t(), m.get_mpz_t()) == 0)
    throw Error("non-invertible unit in modular inverse");
  return out;
}

}  // namespace ultraweyl
