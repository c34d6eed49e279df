#include "ultraweyl/fourier.hpp"

#include <algorithm>

#include "ultraweyl/deform.hpp"

namespace ultraweyl {

int LocallyConstantSpec::ncoeff() const { return alg ? alg->dim() : 1; }

void LocallyConstantSpec::check() const {
  if (weights.size() != coeffs.size()) throw Error("spec: weights/coeffs size mismatch");
  for (std::size_t i = 0; i < weights.size(); ++i)
    for (std::size_t j = i + 1; j < weights.size(); ++j)
      if (weights[i] == weights[j]) throw Error("spec: weights must be pairwise distinct");
}

CoeffVec LocallyConstantSpec::eval(const std::vector<mpq_class>& X, long mu_power) const {
  CoeffVec acc(ncoeff(), Scalar::zero(fp.backend));
  CycCtx ctx{fp.p, fp.M};
  for (std::size_t j = 0; j < weights.size(); ++j) {
    RootOfUnity ph = psi0(fp.p, fp.M, 2 * sympl_pair_rat(X, weights[j]));
    Scalar z = Scalar::from_root(fp.backend, ctx, ph);
    for (int k = 0; k < ncoeff(); ++k) acc[k] += coeffs[j][k] * z;
  }
  if (mu_power != 0) {
    PowerOfP w = mu0_rat(fp.p, X).pow_int(mu_power);
    for (auto& x : acc) x = x.scaled(w.to_rational(fp.p));
  }
  return acc;
}

namespace {

// --- raw multi-axis table with per-axis resolutions (internal) ---
struct RawTable {
  FieldParams fp;
  int n;
  int m;
  std::vector<Resolution> axres;
  std::vector<long> axcells;
  std::vector<Scalar> v;  // index = (((d_{n-1})*ax_{n-2}+...)*ax_0 + d_0)*m + k, coordinate-major like SBFunction

  std::size_t ncells() const {
    std::size_t t = 1;
    for (long a : axcells) t *= static_cast<std::size_t>(a);
    return t;
  }
};

RawTable from_sb(const SBFunction& f) {
  RawTable t{f.field(), f.dim(), f.ncoeff(), {}, {}, {}};
  t.axres.assign(f.dim(), f.res());
  t.axcells.assign(f.dim(), f.axis_cells());
  t.v.assign(f.ncells() * f.ncoeff(), Scalar::zero(f.field().backend));
  for (std::size_t c = 0; c < f.ncells(); ++c)
    for (int k = 0; k < f.ncoeff(); ++k) t.v[c * f.ncoeff() + k] = f.at(c, k);
  return t;
}

/// Materialize at the uniform refinement (max r, max s) of the axis
/// resolutions. Pure digit relabeling (refinement is exact).
SBFunction to_sb(const RawTable& t, const std::shared_ptr<const SpectralAlgebra>& alg) {
  Resolution uni{t.axres[0].r, t.axres[0].s};
  for (const auto& r : t.axres) {
    uni.r = std::max(uni.r, r.r);
    uni.s = std::max(uni.s, r.s);
  }
  SBFunction out(t.fp, t.n, uni, alg);
  long p = t.fp.p;
  std::vector<long> dg(t.n), src(t.n);
  for (std::size_t c = 0; c < out.ncells(); ++c) {
    std::size_t idx = c;
    bool outside = false;
    for (int i = 0; i < t.n; ++i) {
      dg[i] = static_cast<long>(idx % static_cast<std::size_t>(out.axis_cells()));
      idx /= static_cast<std::size_t>(out.axis_cells());
      int dr = uni.r - t.axres[i].r;  // >= 0
      long q = 1;
      for (int e = 0; e < dr; ++e) q *= p;
      if (dg[i] % q != 0) {
        outside = true;
        break;
      }
      long a = dg[i] / q;
      // coarsen the coset modulus to the source level
      src[i] = a % t.axcells[i];
      // a exceeding the source modulus means the same source cell; the digit
      // word wraps because the target keeps more constancy digits
    }
    if (outside) continue;
    std::size_t sidx = 0;
    for (int i = t.n - 1; i >= 0; --i)
      sidx = sidx * static_cast<std::size_t>(t.axcells[i]) + static_cast<std::size_t>(src[i]);
    for (int k = 0; k < t.m; ++k) out.at(c, k) = t.v[sidx * t.m + k];
  }
  return out;
}

std::vector<Scalar> root_table(const FieldParams& fp, long N) {
  std::vector<Scalar> roots(static_cast<std::size_t>(N));
  CycCtx ctx{fp.p, fp.M};
  for (long k = 0; k < N; ++k)
    roots[static_cast<std::size_t>(k)] =
        Scalar::from_root(fp.backend, ctx, RootOfUnity::make(fp.p, k, N));
  return roots;
}

void naive_line(const std::vector<Scalar>& in, std::vector<Scalar>& out,
                const std::vector<Scalar>& roots, long mult) {
  long N = static_cast<long>(in.size());
  for (long b = 0; b < N; ++b) {
    Scalar acc = Scalar::zero(in[0].backend());
    for (long a = 0; a < N; ++a) {
      long e = ((a * b) % N) * (mult % N) % N;
      if (e < 0) e += N;
      acc += in[static_cast<std::size_t>(a)] * roots[static_cast<std::size_t>(e)];
    }
    out[static_cast<std::size_t>(b)] = acc;
  }
}

// plain forward DFT (kernel zeta_N^{ab}) by recursive radix-p decimation
void fft_rec(const std::vector<Scalar>& x, std::size_t off, std::size_t stride, long N,
             long factor, long p, const std::vector<Scalar>& roots, std::vector<Scalar>& out) {
  if (N == 1) {
    out[0] = x[off];
    return;
  }
  long Np = N / p;
  long Ntop = static_cast<long>(roots.size());
  std::vector<std::vector<Scalar>> sub(static_cast<std::size_t>(p));
  for (long r = 0; r < p; ++r) {
    sub[static_cast<std::size_t>(r)].resize(static_cast<std::size_t>(Np));
    fft_rec(x, off + static_cast<std::size_t>(r) * stride, stride * static_cast<std::size_t>(p),
            Np, factor * p, p, roots, sub[static_cast<std::size_t>(r)]);
  }
  for (long b = 0; b < N; ++b) {
    Scalar acc = Scalar::zero(x[off].backend());
    for (long r = 0; r < p; ++r) {
      long e = ((r * b) % N) * factor % Ntop;
      acc += sub[static_cast<std::size_t>(r)][static_cast<std::size_t>(b % Np)] *
             roots[static_cast<std::size_t>(e)];
    }
    out[static_cast<std::size_t>(b)] = acc;
  }
}

void fast_line(const std::vector<Scalar>& in, std::vector<Scalar>& out,
               const std::vector<Scalar>& roots, long mult, long p) {
  long N = static_cast<long>(in.size());
  std::vector<Scalar> plain(static_cast<std::size_t>(N));
  fft_rec(in, 0, 1, N, 1, p, roots, plain);
  for (long b = 0; b < N; ++b) {
    long e = (mult * b) % N;
    if (e < 0) e += N;
    out[static_cast<std::size_t>(b)] = plain[static_cast<std::size_t>(e)];
  }
}

/// Transform one axis with kernel Psi(q p^{-texp} x_a xi_b), q a rational
/// unit. The output grid has support exponent s - texp and constancy
/// r + texp, which keeps the root depth at p^L: the effective kernel is
/// zeta_{p^L}^{mult_eff * a * b} with mult_eff = q mod p^L. The caller
/// applies volume scales.
void axis_transform(RawTable& t, int axis, const mpq_class& q, bool fast, int texp = 0) {
  long N = t.axcells[static_cast<std::size_t>(axis)];
  long L = t.axres[static_cast<std::size_t>(axis)].level();
  if (L > t.fp.M)
    throw DepthError("transform needs roots of depth p^" + std::to_string(L) +
                     " > configured p^" + std::to_string(t.fp.M));
  long mult = 1;
  if (N > 1) {
    mpz_class Nz(N);
    mpz_class num = q.get_num() % Nz;
    if (num < 0) num += Nz;
    mult = static_cast<long>(mpz_class(num * mod_inverse(q.get_den(), Nz) % Nz).get_si());
  }
  auto roots = root_table(t.fp, N);
  std::size_t stride = static_cast<std::size_t>(t.m);
  for (int i = 0; i < axis; ++i) stride *= static_cast<std::size_t>(t.axcells[i]);
  std::size_t ncells = t.ncells();
  std::size_t nlines = ncells / static_cast<std::size_t>(N);
  std::vector<Scalar> line(static_cast<std::size_t>(N)), tline(static_cast<std::size_t>(N));
  // enumerate line base offsets: all indices with digit(axis)=0
  for (int k = 0; k < t.m; ++k) {
    for (std::size_t li = 0; li < nlines; ++li) {
      // decompose li into (low part under axis, high part above axis)
      std::size_t lowsz = 1;
      for (int i = 0; i < axis; ++i) lowsz *= static_cast<std::size_t>(t.axcells[i]);
      std::size_t low = li % lowsz, high = li / lowsz;
      std::size_t base = (high * static_cast<std::size_t>(N) * lowsz + low) *
                             static_cast<std::size_t>(t.m) +
                         static_cast<std::size_t>(k);
      for (long a = 0; a < N; ++a)
        line[static_cast<std::size_t>(a)] = t.v[base + static_cast<std::size_t>(a) * stride];
      if (fast && N > 1)
        fast_line(line, tline, roots, mult, t.fp.p);
      else
        naive_line(line, tline, roots, mult);
      for (long a = 0; a < N; ++a)
        t.v[base + static_cast<std::size_t>(a) * stride] = tline[static_cast<std::size_t>(a)];
    }
  }
  Resolution& ar = t.axres[static_cast<std::size_t>(axis)];
  ar = Resolution{ar.s - texp, ar.r + texp};
}

SBFunction transform_axes(const SBFunction& f, const std::vector<int>& axes, long mult,
                          bool fast) {
  RawTable t = from_sb(f);
  long scale_e = 0;
  for (int ax : axes) {
    scale_e += t.axres[static_cast<std::size_t>(ax)].s;  // volume of the integrated cells
    axis_transform(t, ax, mpq_class(mult), fast);
  }
  SBFunction out = to_sb(t, f.algebra());
  return out.scaled_rat(scale_e >= 0 ? mpq_class(1, pow_p(f.field().p, static_cast<int>(scale_e)))
                                     : mpq_class(pow_p(f.field().p, static_cast<int>(-scale_e))));
}

std::vector<int> all_axes(int n) {
  std::vector<int> axes(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) axes[static_cast<std::size_t>(i)] = i;
  return axes;
}

}  // namespace

SBFunction fourier(const SBFunction& f, bool inverse) {
  return transform_axes(f, all_axes(f.dim()), inverse ? -1 : 1, false);
}

SBFunction fourier_axes(const SBFunction& f, const std::vector<int>& axes, bool inverse) {
  return transform_axes(f, axes, inverse ? -1 : 1, false);
}

SBFunction fft_fast(const SBFunction& f, bool inverse) {
  return transform_axes(f, all_axes(f.dim()), inverse ? -1 : 1, true);
}

SBFunction symplectic_scaled(const SBFunction& f, const mpq_class& unit, int texp,
                             bool use_fft) {
  int n = f.dim();
  if (n % 2 != 0) throw Error("symplectic transform needs even dimension");
  int d = n / 2;
  RawTable t = from_sb(f);
  long scale_e = 0;
  for (int i = 0; i < d; ++i) {            // y_i -> dual with kernel Psi(-q y b)
    scale_e += t.axres[static_cast<std::size_t>(i)].s;
    axis_transform(t, i, -unit, use_fft, texp);
  }
  for (int i = d; i < n; ++i) {            // eta_i -> dual with kernel Psi(+q eta b)
    scale_e += t.axres[static_cast<std::size_t>(i)].s;
    axis_transform(t, i, unit, use_fft, texp);
  }
  // swap halves: output x_i is dual to eta_i, output xi_i dual to y_i
  RawTable sw = t;
  std::size_t ncells = t.ncells();
  long ax = t.axcells[0];
  std::vector<long> dg(static_cast<std::size_t>(n));
  for (std::size_t c = 0; c < ncells; ++c) {
    std::size_t idx = c;
    for (int i = 0; i < n; ++i) {
      dg[static_cast<std::size_t>(i)] = static_cast<long>(idx % static_cast<std::size_t>(ax));
      idx /= static_cast<std::size_t>(ax);
    }
    std::rotate(dg.begin(), dg.begin() + d, dg.end());  // (x,xi) <- (xi','x') halves swap
    std::size_t didx = 0;
    for (int i = n - 1; i >= 0; --i)
      didx = didx * static_cast<std::size_t>(ax) + static_cast<std::size_t>(dg[i]);
    for (int k = 0; k < t.m; ++k)
      sw.v[didx * static_cast<std::size_t>(t.m) + static_cast<std::size_t>(k)] =
          t.v[c * static_cast<std::size_t>(t.m) + static_cast<std::size_t>(k)];
  }
  for (int i = 0; i < n; ++i) sw.axres[static_cast<std::size_t>(i)] = t.axres[0];
  SBFunction out = to_sb(sw, f.algebra());
  return out.scaled_rat(scale_e >= 0 ? mpq_class(1, pow_p(f.field().p, static_cast<int>(scale_e)))
                                     : mpq_class(pow_p(f.field().p, static_cast<int>(-scale_e))));
}

SBFunction symplectic_G(const SBFunction& f, bool use_fft) {
  return symplectic_scaled(f, mpq_class(2), 0, use_fft);
}

SBFunction apply_I(const SBFunction& f, long m) {
  SBFunction g = f.res().s >= 0 ? f : f.refined(Resolution{f.res().r, 0});
  for (std::size_t c = 0; c < g.ncells(); ++c) {
    PowerOfP w = mu0(g.cell_point(c)).pow_int(m);
    mpq_class q = w.to_rational(g.field().p);
    for (int k = 0; k < g.ncoeff(); ++k) g.at(c, k) = g.at(c, k).scaled(q);
  }
  return g;
}

SBFunction apply_I_theta(const SBFunction& f, long m, const ThetaParam& theta) {
  if (theta.zero) return f;  // D_0 mu0 = 1
  SBFunction g = f.res().s >= 0 ? f : f.refined(Resolution{f.res().r, 0});
  mpq_class tv = theta.value();
  for (std::size_t c = 0; c < g.ncells(); ++c) {
    auto xs = g.cell_point(c).coords();
    for (auto& x : xs) x *= tv;
    PowerOfP w = mu0_rat(g.field().p, xs).pow_int(m);
    mpq_class q = w.to_rational(g.field().p);
    for (int k = 0; k < g.ncoeff(); ++k) g.at(c, k) = g.at(c, k).scaled(q);
  }
  return g;
}

SBFunction apply_J(const SBFunction& f, long n) {
  return symplectic_G(apply_I(symplectic_G(f), n));
}

SBFunction apply_J_theta(const SBFunction& f, long n, const ThetaParam& theta) {
  if (theta.zero) return f;
  return symplectic_G(apply_I_theta(symplectic_G(f), n, theta));
}

CoeffVec gmu_pair(long n, const SBFunction& psi) {
  if (psi.dim() % 2 != 0) throw Error("gmu_pair needs k^{2d}");
  for (std::size_t c = 0; c < psi.ncells(); ++c) {
    if (mu0(psi.cell_point(c)) == PowerOfP::one()) continue;
    for (int k = 0; k < psi.ncoeff(); ++k)
      if (!psi.at(c, k).is_zero()) throw Error("gmu_pair: input not supported in the unit ball");
  }
  SBFunction g = symplectic_G(psi);
  if (g.res().s < 0) g = g.refined(Resolution{g.res().r, 0});  // mu0 must be cell-constant
  CoeffVec acc(psi.ncoeff(), Scalar::zero(psi.field().backend));
  mpq_class vol = g.cell_volume_rat();
  for (std::size_t c = 0; c < g.ncells(); ++c) {
    mpq_class w = mu0(g.cell_point(c)).pow_int(n).to_rational(g.field().p) * vol;
    for (int k = 0; k < g.ncoeff(); ++k) acc[k] += g.at(c, k).scaled(w);
  }
  return acc;
}

namespace {
template <typename EvalFn>
CoeffVec pointwise_J_impl(const FieldParams& fp, int n2d, int m,
                          const std::shared_ptr<const SpectralAlgebra>& alg, int win_s, long n,
                          const RatPoint& X, EvalFn&& fn) {
  SBFunction win(fp, n2d, Resolution{0, std::max(0, win_s)}, alg);
  for (std::size_t c = 0; c < win.ncells(); ++c) {
    auto w = win.cell_point(c).coords();
    std::vector<mpq_class> arg(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) arg[i] = X[i] - w[i];
    CoeffVec v = fn(arg);
    for (int k = 0; k < m; ++k) win.at(c, k) = v[k];
  }
  return gmu_pair(n, win);
}
}  // namespace

CoeffVec pointwise_J(const LocallyConstantSpec& F, long n, const RatPoint& X) {
  int sW = 0;
  for (const auto& P : F.weights) sW = std::max(sW, rat_sup_exp(F.fp.p, P));
  return pointwise_J_impl(F.fp, static_cast<int>(X.size()), F.ncoeff(), F.alg, sW, n, X,
                          [&](const std::vector<mpq_class>& arg) { return F.eval(arg); });
}

CoeffVec pointwise_J(const SBFunction& F, long n, const RatPoint& X) {
  return pointwise_J_impl(F.field(), F.dim(), F.ncoeff(), F.algebra(), F.res().s, n, X,
                          [&](const std::vector<mpq_class>& arg) { return F.eval(arg); });
}

}  // namespace ultraweyl
