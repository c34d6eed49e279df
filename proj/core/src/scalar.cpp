#include "ultraweyl/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ultraweyl {

long CycCtx::N() const { return p == 0 ? 1 : pow_p(p, M).get_si(); }
long CycCtx::phi() const { return p == 0 ? 1 : (p - 1) * pM1(); }
long CycCtx::pM1() const { return pow_p(p, M - 1).get_si(); }

std::complex<double> root_to_complex(const RootOfUnity& r) {
  double ph = 2.0 * std::numbers::pi * static_cast<double>(r.num) / static_cast<double>(r.den);
  return {std::cos(ph), std::sin(ph)};
}

Scalar Scalar::zero(Backend b) {
  Scalar s;
  s.backend_ = b;
  return s;
}

Scalar Scalar::one(Backend b) { return integer(b, 1); }

Scalar Scalar::integer(Backend b, long v) { return rational(b, mpq_class(v)); }

Scalar Scalar::rational(Backend b, const mpq_class& q) {
  Scalar s;
  s.backend_ = b;
  if (b == Backend::exact) {
    if (q != 0) s.t_.push_back({0, q});
  } else {
    s.z_ = {q.get_d(), 0.0};
  }
  return s;
}

Scalar Scalar::from_root(Backend b, const CycCtx& ctx, const RootOfUnity& r) {
  if (b == Backend::floating) return from_complex(root_to_complex(r));
  Scalar s;
  s.backend_ = Backend::exact;
  if (r.num == 0) {
    s.t_.push_back({0, mpq_class(1)});
    return s;
  }
  if (ctx.p == 0) throw Error("root of unity needs a cyclotomic context");
  long N = ctx.N();
  if (N % r.den != 0)
    throw DepthError("root depth " + std::to_string(r.den) + " exceeds context " +
                     std::to_string(N));
  s.ctx_ = ctx;
  std::vector<Term> raw;
  push_reduced(ctx, r.num * (N / r.den), mpq_class(1), raw);
  s.t_ = normalize(ctx, std::move(raw));
  return s;
}

Scalar Scalar::from_complex(const std::complex<double>& z) {
  Scalar s;
  s.backend_ = Backend::floating;
  s.z_ = z;
  return s;
}

void Scalar::merge_ctx(const Scalar& o, CycCtx& out) const {
  if (ctx_.p == 0) {
    out = o.ctx_;
    return;
  }
  if (o.ctx_.p == 0) {
    out = ctx_;
    return;
  }
  if (!(ctx_ == o.ctx_)) throw Error("cyclotomic context mismatch");
  out = ctx_;
}

void Scalar::push_reduced(const CycCtx& ctx, long e, const mpq_class& c,
                          std::vector<Term>& out) {
  if (c == 0) return;
  long N = ctx.N();
  e %= N;
  if (e < 0) e += N;
  long phi = ctx.phi();
  if (e < phi) {
    out.push_back({e, c});
    return;
  }
  // zeta^{j + (p-1)p^{M-1}} = -sum_{k<p-1} zeta^{j + k p^{M-1}}
  long j = e - phi;
  long step = ctx.pM1();
  for (long k = 0; k < ctx.p - 1; ++k) out.push_back({j + k * step, -c});
}

std::vector<Scalar::Term> Scalar::normalize(const CycCtx&, std::vector<Term> raw) {
  std::sort(raw.begin(), raw.end(), [](const Term& a, const Term& b) { return a.e < b.e; });
  std::vector<Term> out;
  out.reserve(raw.size());
  for (auto& t : raw) {
    if (!out.empty() && out.back().e == t.e) {
      out.back().c += t.c;
      if (out.back().c == 0) out.pop_back();
    } else if (t.c != 0) {
      out.push_back(std::move(t));
    }
  }
  return out;
}

Scalar Scalar::operator+(const Scalar& o) const {
  if (backend_ != o.backend_) throw BackendError("mixed scalar backends");
  if (backend_ == Backend::floating) return from_complex(z_ + o.z_);
  Scalar out;
  merge_ctx(o, out.ctx_);
  out.t_.reserve(t_.size() + o.t_.size());
  std::size_t i = 0, j = 0;
  while (i < t_.size() || j < o.t_.size()) {
    if (j >= o.t_.size() || (i < t_.size() && t_[i].e < o.t_[j].e)) {
      out.t_.push_back(t_[i++]);
    } else if (i >= t_.size() || o.t_[j].e < t_[i].e) {
      out.t_.push_back(o.t_[j++]);
    } else {
      mpq_class c = t_[i].c + o.t_[j].c;
      if (c != 0) out.t_.push_back({t_[i].e, c});
      ++i;
      ++j;
    }
  }
  return out;
}

Scalar& Scalar::operator+=(const Scalar& o) {
  *this = *this + o;
  return *this;
}

Scalar Scalar::operator-(const Scalar& o) const { return *this + (-o); }

Scalar Scalar::operator-() const {
  Scalar out = *this;
  if (backend_ == Backend::floating) {
    out.z_ = -z_;
    return out;
  }
  for (auto& t : out.t_) t.c = -t.c;
  return out;
}

Scalar Scalar::operator*(const Scalar& o) const {
  if (backend_ != o.backend_) throw BackendError("mixed scalar backends");
  if (backend_ == Backend::floating) return from_complex(z_ * o.z_);
  Scalar out;
  merge_ctx(o, out.ctx_);
  if (t_.empty() || o.t_.empty()) return out;
  std::vector<Term> raw;
  raw.reserve(t_.size() * o.t_.size() * 2);
  for (const auto& a : t_)
    for (const auto& b : o.t_) push_reduced(out.ctx_, a.e + b.e, a.c * b.c, raw);
  out.t_ = normalize(out.ctx_, std::move(raw));
  return out;
}

Scalar Scalar::conj() const {
  if (backend_ == Backend::floating) return from_complex(std::conj(z_));
  Scalar out;
  out.backend_ = Backend::exact;
  out.ctx_ = ctx_;
  std::vector<Term> raw;
  long N = ctx_.N();
  for (const auto& t : t_) push_reduced(ctx_, t.e == 0 ? 0 : N - t.e, t.c, raw);
  out.t_ = normalize(ctx_, std::move(raw));
  return out;
}

Scalar Scalar::scaled(const mpq_class& q) const {
  if (backend_ == Backend::floating) return from_complex(z_ * q.get_d());
  Scalar out = *this;
  if (q == 0) {
    out.t_.clear();
    return out;
  }
  for (auto& t : out.t_) t.c *= q;
  return out;
}

Scalar Scalar::scaled_pow(long p, long e) const {
  mpq_class q = e >= 0 ? mpq_class(pow_p(p, static_cast<int>(e)))
                       : mpq_class(1, pow_p(p, static_cast<int>(-e)));
  return scaled(q);
}

bool Scalar::is_zero() const {
  if (backend_ == Backend::floating) return z_ == std::complex<double>(0.0, 0.0);
  return t_.empty();
}

bool Scalar::operator==(const Scalar& o) const {
  if (backend_ != o.backend_) return false;
  if (backend_ == Backend::floating) return z_ == o.z_;
  if (t_.size() != o.t_.size()) return false;
  for (std::size_t i = 0; i < t_.size(); ++i)
    if (t_[i].e != o.t_[i].e || t_[i].c != o.t_[i].c) return false;
  return true;
}

bool Scalar::close(const Scalar& a, const Scalar& b, double tol) {
  if (a.backend_ == Backend::exact && b.backend_ == Backend::exact) return a == b;
  return std::abs(a.to_complex() - b.to_complex()) <= tol;
}

std::complex<double> Scalar::to_complex() const {
  if (backend_ == Backend::floating) return z_;
  std::complex<double> acc{0.0, 0.0};
  long N = ctx_.N();
  for (const auto& t : t_) {
    double ph = 2.0 * std::numbers::pi * static_cast<double>(t.e) / static_cast<double>(N);
    acc += t.c.get_d() * std::complex<double>(std::cos(ph), std::sin(ph));
  }
  return acc;
}

bool Scalar::rational_value(mpq_class& out) const {
  if (backend_ != Backend::exact) return false;
  if (t_.empty()) {
    out = 0;
    return true;
  }
  if (t_.size() == 1 && t_[0].e == 0) {
    out = t_[0].c;
    return true;
  }
  return false;
}

std::vector<mpq_class> Scalar::dense_coeffs() const {
  if (backend_ != Backend::exact) throw BackendError("dense coefficients need the exact backend");
  long phi = ctx_.phi();
  std::vector<mpq_class> out(static_cast<std::size_t>(phi), mpq_class(0));
  for (const auto& t : t_) out[static_cast<std::size_t>(t.e)] = t.c;
  return out;
}

Scalar Scalar::from_terms(const CycCtx& ctx, std::vector<Term> terms) {
  Scalar s;
  s.backend_ = Backend::exact;
  s.ctx_ = ctx;
  std::vector<Term> raw;
  raw.reserve(terms.size());
  for (auto& t : terms) push_reduced(ctx, t.e, t.c, raw);
  s.t_ = normalize(ctx, std::move(raw));
  if (s.t_.empty() || (s.t_.size() == 1 && s.t_[0].e == 0)) s.ctx_ = CycCtx{};
  return s;
}

std::string Scalar::str() const {
  if (backend_ == Backend::floating) {
    std::ostringstream os;
    os << z_.real() << (z_.imag() < 0 ? "" : "+") << z_.imag() << "i";
    return os.str();
  }
  if (t_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& t : t_) {
    if (!first) os << " + ";
    first = false;
    os << t.c.get_str();
    if (t.e != 0) os << "*z^" << t.e;
  }
  if (ctx_.p != 0) os << "  (z = zeta_" << ctx_.N() << ")";
  return os.str();
}

}  // namespace ultraweyl
