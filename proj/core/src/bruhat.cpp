#include "ultraweyl/bruhat.hpp"

#include <algorithm>

#include "ultraweyl/deform.hpp"
#include "ultraweyl/rng.hpp"

namespace ultraweyl {

namespace {
constexpr std::size_t kMaxTableEntries = std::size_t(1) << 26;
}

CellGrid::CellGrid(long p, int n, Resolution res) : p_(p), n_(n), res_(res) {
  res.check();
  if (n < 1) throw Error("dimension must be positive");
  mpz_class ax = pow_p(p, res.level());
  if (!ax.fits_slong_p()) throw Error("resolution overflow beyond configured depth");
  axis_ = ax.get_si();
  double total = std::pow(static_cast<double>(axis_), n);
  if (total > static_cast<double>(kMaxTableEntries))
    throw Error("cell table too large at this resolution");
  ncells_ = 1;
  for (int i = 0; i < n; ++i) ncells_ *= static_cast<std::size_t>(axis_);
}

std::vector<long> CellGrid::cell_digits(std::size_t idx) const {
  std::vector<long> dg(n_);
  for (int i = 0; i < n_; ++i) {
    dg[i] = static_cast<long>(idx % static_cast<std::size_t>(axis_));
    idx /= static_cast<std::size_t>(axis_);
  }
  return dg;
}

std::size_t CellGrid::index_of(const std::vector<long>& digits) const {
  std::size_t idx = 0;
  for (int i = n_ - 1; i >= 0; --i) idx = idx * static_cast<std::size_t>(axis_) + digits[i];
  return idx;
}

std::vector<mpq_class> CellGrid::cell_coords(std::size_t idx) const {
  auto dg = cell_digits(idx);
  std::vector<mpq_class> xs(n_);
  for (int i = 0; i < n_; ++i) {
    if (res_.r >= 0) {
      xs[i] = mpq_class(dg[i], pow_p(p_, res_.r));
      xs[i].canonicalize();
    } else {
      xs[i] = mpq_class(mpz_class(dg[i]) * pow_p(p_, -res_.r));
    }
  }
  return xs;
}

GridPoint CellGrid::cell_point(std::size_t idx) const {
  return GridPoint::from_rationals(p_, cell_coords(idx), res_);
}

std::optional<std::size_t> CellGrid::locate(const std::vector<mpq_class>& xs) const {
  if (static_cast<int>(xs.size()) != n_) throw Error("dimension mismatch in locate");
  mpz_class mod(axis_);
  std::size_t idx = 0;
  for (int i = n_ - 1; i >= 0; --i) {
    mpq_class y = xs[i] * pow_q(p_, res_.r);
    y.canonicalize();
    auto v = padic_val(p_, y);
    if (v && *v < 0) return std::nullopt;  // outside the support ball
    long a = 0;
    if (y != 0 && mod != 1) {
      mpz_class num = y.get_num() % mod;
      if (num < 0) num += mod;
      mpz_class den = y.get_den() % mod;
      a = static_cast<long>(mpz_class(num * mod_inverse(den, mod) % mod).get_si());
    }
    idx = idx * static_cast<std::size_t>(axis_) + static_cast<std::size_t>(a);
  }
  return idx;
}

SBFunction::SBFunction(const FieldParams& fp, int n, Resolution res,
                       std::shared_ptr<const SpectralAlgebra> alg)
    : fp_(fp), n_(n), res_(res), grid_(fp.p, n, res), alg_(std::move(alg)) {
  m_ = alg_ ? alg_->dim() : 1;
  if (ncells() * static_cast<std::size_t>(m_) > kMaxTableEntries)
    throw Error("cell table too large at this resolution");
  v_.assign(ncells() * m_, Scalar::zero(fp.backend));
}

CoeffVec SBFunction::value(std::size_t cell) const {
  CoeffVec out(m_);
  for (int k = 0; k < m_; ++k) out[k] = v_[cell * m_ + k];
  return out;
}

void SBFunction::set_value(std::size_t cell, const CoeffVec& v) {
  if (static_cast<int>(v.size()) != m_) throw Error("coefficient size mismatch");
  for (int k = 0; k < m_; ++k) v_[cell * m_ + k] = v[k];
}

CoeffVec SBFunction::eval(const std::vector<mpq_class>& xs) const {
  auto idx = locate(xs);
  if (!idx) return CoeffVec(m_, Scalar::zero(fp_.backend));
  return value(*idx);
}

Scalar SBFunction::eval_scalar(const std::vector<mpq_class>& xs) const {
  if (m_ != 1) throw Error("eval_scalar on algebra-valued function");
  auto idx = locate(xs);
  return idx ? v_[*idx] : Scalar::zero(fp_.backend);
}

SBFunction SBFunction::indicator(const FieldParams& fp, const std::vector<mpq_class>& center,
                                 int m) {
  int n = static_cast<int>(center.size());
  int r = -m;
  for (const auto& c : center) {
    auto v = padic_val(fp.p, c);
    if (v) r = std::max(r, static_cast<int>(-*v));
  }
  Resolution res{r, m};
  res.check();
  SBFunction f(fp, n, res);
  // the ball is a single cell of this grid
  auto idx = f.locate(center);
  if (!idx) throw Error("indicator center escaped its own grid");
  f.at(*idx) = Scalar::one(fp.backend);
  return f;
}

SBFunction SBFunction::character_window(const FieldParams& fp, const RatPoint& Y, int B) {
  int n = static_cast<int>(Y.size());
  int s = std::max(rat_sup_exp(fp.p, Y), -B);
  SBFunction f(fp, n, Resolution{B, s});
  for (std::size_t c = 0; c < f.ncells(); ++c) {
    auto Xc = f.cell_point(c).coords();
    RootOfUnity ph = psi0(fp.p, fp.M, 2 * sympl_pair_rat(Xc, Y));
    f.at(c) = Scalar::from_root(fp.backend, CycCtx{fp.p, fp.M}, ph);
  }
  return f;
}

SBFunction SBFunction::random(const FieldParams& fp, int n, Resolution res, std::uint64_t seed,
                              std::shared_ptr<const SpectralAlgebra> alg) {
  SBFunction f(fp, n, res, std::move(alg));
  Rng rng(seed);
  int maxdepth = std::min(fp.M, 2);
  CycCtx ctx{fp.p, fp.M};
  for (std::size_t c = 0; c < f.ncells(); ++c) {
    for (int k = 0; k < f.ncoeff(); ++k) {
      long num = rng.range(0, fp.p * fp.p - 1);
      long depth = rng.range(0, maxdepth);
      long co = rng.range(-2, 2);
      RootOfUnity root = RootOfUnity::make(fp.p, num, pow_p(fp.p, static_cast<int>(depth)).get_si());
      f.at(c, k) = Scalar::from_root(fp.backend, ctx, root).scaled(mpq_class(co));
    }
  }
  return f;
}

SBFunction SBFunction::refined(Resolution target) const {
  if (target == res_) return *this;
  if (target.r < res_.r || target.s < res_.s)
    throw Error("refined: target must refine the current resolution");
  SBFunction out(fp_, n_, target, alg_);
  for (std::size_t c = 0; c < out.ncells(); ++c) {
    auto xs = out.cell_point(c).coords();
    auto idx = locate(xs);
    if (idx)
      for (int k = 0; k < m_; ++k) out.at(c, k) = at(*idx, k);
  }
  return out;
}

SBFunction SBFunction::coarsened(Resolution target) const {
  if (target.r > res_.r || target.s > res_.s)
    throw Error("coarsened: target must coarsen the current resolution");
  SBFunction out(fp_, n_, target, alg_);
  std::vector<bool> seen(out.ncells(), false);
  for (std::size_t c = 0; c < ncells(); ++c) {
    auto xs = cell_point(c).coords();
    auto idx = out.locate(xs);
    if (!idx) {
      for (int k = 0; k < m_; ++k)
        if (!at(c, k).is_zero())
          throw Error("coarsening drops a nonzero cell outside the target support");
      continue;
    }
    if (!seen[*idx]) {
      seen[*idx] = true;
      for (int k = 0; k < m_; ++k) out.at(*idx, k) = at(c, k);
    } else {
      for (int k = 0; k < m_; ++k)
        if (!(out.at(*idx, k) == at(c, k)))
          throw Error("coarsening a non-constant function");
    }
  }
  return out;
}

namespace {
void check_compatible(const SBFunction& a, const SBFunction& b) {
  if (a.dim() != b.dim()) throw Error("dimension mismatch");
  if (a.field().p != b.field().p || a.field().backend != b.field().backend)
    throw Error("field parameter mismatch");
  if (a.algebra() != b.algebra() && a.ncoeff() != b.ncoeff())
    throw Error("coefficient space mismatch");
}
}  // namespace

SBFunction SBFunction::add(const SBFunction& g) const {
  check_compatible(*this, g);
  Resolution t = res_.refined(g.res());
  SBFunction a = refined(t), b = g.refined(t);
  for (std::size_t i = 0; i < a.v_.size(); ++i) a.v_[i] = a.v_[i] + b.v_[i];
  return a;
}

SBFunction SBFunction::sub(const SBFunction& g) const { return add(g.scaled_rat(mpq_class(-1))); }

SBFunction SBFunction::mul(const SBFunction& g) const {
  check_compatible(*this, g);
  Resolution t = res_.refined(g.res());
  SBFunction a = refined(t), b = g.refined(t);
  const SpectralAlgebra* alg = alg_.get();
  for (std::size_t c = 0; c < a.ncells(); ++c)
    a.set_value(c, coeff_mul(alg, a.value(c), b.value(c)));
  return a;
}

SBFunction SBFunction::conj_involution() const {
  SBFunction out = *this;
  const SpectralAlgebra* alg = alg_.get();
  for (std::size_t c = 0; c < ncells(); ++c) out.set_value(c, coeff_conj(alg, value(c)));
  return out;
}

SBFunction SBFunction::scaled(const Scalar& s) const {
  SBFunction out = *this;
  for (auto& x : out.v_) x = x * s;
  return out;
}

SBFunction SBFunction::scaled_rat(const mpq_class& q) const {
  SBFunction out = *this;
  for (auto& x : out.v_) x = x.scaled(q);
  return out;
}

SBFunction SBFunction::map(const std::function<Scalar(const Scalar&)>& f) const {
  SBFunction out = *this;
  for (auto& x : out.v_) x = f(x);
  return out;
}

SBFunction SBFunction::translate(const std::vector<mpq_class>& Y) const {
  int r = res_.r;
  for (const auto& y : Y) {
    auto v = padic_val(fp_.p, y);
    if (v) r = std::max(r, static_cast<int>(-*v));
  }
  SBFunction out(fp_, n_, Resolution{r, res_.s}, alg_);
  for (std::size_t c = 0; c < out.ncells(); ++c) {
    auto xs = out.cell_point(c).coords();
    for (int i = 0; i < n_; ++i) xs[i] += Y[i];
    auto idx = locate(xs);
    if (idx)
      for (int k = 0; k < m_; ++k) out.at(c, k) = at(*idx, k);
  }
  return out;
}

SBFunction SBFunction::dilate(const mpq_class& gamma) const {
  if (gamma == 0) throw Error("dilation by 0 is not a Schwartz-Bruhat operation");
  long t = *padic_val(fp_.p, gamma);
  Resolution nres{res_.r + static_cast<int>(t), res_.s - static_cast<int>(t)};
  nres.check();
  SBFunction out(fp_, n_, nres, alg_);
  for (std::size_t c = 0; c < out.ncells(); ++c) {
    auto xs = out.cell_point(c).coords();
    for (auto& x : xs) x *= gamma;
    auto idx = locate(xs);
    if (idx)
      for (int k = 0; k < m_; ++k) out.at(c, k) = at(*idx, k);
  }
  return out;
}

mpq_class SBFunction::cell_volume_rat() const {
  int e = res_.s * n_;
  return e >= 0 ? mpq_class(1, pow_p(fp_.p, e)) : mpq_class(pow_p(fp_.p, -e));
}

CoeffVec SBFunction::integral() const {
  CoeffVec acc(m_, Scalar::zero(fp_.backend));
  for (std::size_t c = 0; c < ncells(); ++c)
    for (int k = 0; k < m_; ++k) acc[k] += at(c, k);
  mpq_class vol = cell_volume_rat();
  for (auto& x : acc) x = x.scaled(vol);
  return acc;
}

CoeffVec SBFunction::inner(const SBFunction& g) const {
  check_compatible(*this, g);
  Resolution t = res_.refined(g.res());
  SBFunction a = refined(t), b = g.refined(t);
  const SpectralAlgebra* alg = alg_.get();
  CoeffVec acc(m_, Scalar::zero(fp_.backend));
  for (std::size_t c = 0; c < a.ncells(); ++c) {
    CoeffVec term = coeff_mul(alg, coeff_conj(alg, a.value(c)), b.value(c));
    for (int k = 0; k < m_; ++k) acc[k] += term[k];
  }
  mpq_class vol = a.cell_volume_rat();
  for (auto& x : acc) x = x.scaled(vol);
  return acc;
}

Scalar SBFunction::l2sq() const {
  if (m_ != 1) throw Error("l2sq is defined for scalar-valued functions");
  Scalar acc = Scalar::zero(fp_.backend);
  for (std::size_t c = 0; c < ncells(); ++c) acc += at(c).abs2();
  return acc.scaled(cell_volume_rat());
}

double SBFunction::norm_l1() const {
  double acc = 0;
  const SpectralAlgebra* alg = alg_.get();
  for (std::size_t c = 0; c < ncells(); ++c) acc += coeff_norm(alg, value(c));
  return acc * cell_volume_rat().get_d();
}

double SBFunction::linf() const {
  double m = 0;
  const SpectralAlgebra* alg = alg_.get();
  for (std::size_t c = 0; c < ncells(); ++c) m = std::max(m, coeff_norm(alg, value(c)));
  return m;
}

bool SBFunction::equals(const SBFunction& g, double tol) const {
  check_compatible(*this, g);
  Resolution t = res_.refined(g.res());
  SBFunction a = refined(t), b = g.refined(t);
  for (std::size_t i = 0; i < a.v_.size(); ++i) {
    if (tol == 0.0) {
      if (!(a.v_[i] == b.v_[i])) return false;
    } else if (!Scalar::close(a.v_[i], b.v_[i], tol)) {
      return false;
    }
  }
  return true;
}

bool SBFunction::is_zero() const {
  return std::all_of(v_.begin(), v_.end(), [](const Scalar& s) { return s.is_zero(); });
}

CoeffVec coeff_add(const CoeffVec& a, const CoeffVec& b) {
  CoeffVec out = a;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
  return out;
}

CoeffVec coeff_mul(const SpectralAlgebra* alg, const CoeffVec& a, const CoeffVec& b) {
  if (!alg) return CoeffVec{a[0] * b[0]};
  return alg->mul_coeff(a, b);
}

CoeffVec coeff_conj(const SpectralAlgebra* alg, const CoeffVec& a) {
  if (!alg) return CoeffVec{a[0].conj()};
  return alg->conj_coeff(a);
}

CoeffVec coeff_scaled(const CoeffVec& a, const Scalar& c) {
  CoeffVec out = a;
  for (auto& x : out) x = x * c;
  return out;
}

bool coeff_is_zero(const CoeffVec& a) {
  return std::all_of(a.begin(), a.end(), [](const Scalar& s) { return s.is_zero(); });
}

double coeff_norm(const SpectralAlgebra* alg, const CoeffVec& a) {
  if (!alg) return a[0].abs();
  return alg->rep_op_norm(a);
}

}  // namespace ultraweyl
