#include "ultraweyl/deform.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "ultraweyl/rng.hpp"

namespace ultraweyl {

namespace {

Eigen::MatrixXcd to_eigen(const std::vector<Scalar>& rowmajor, int n) {
  Eigen::MatrixXcd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = rowmajor[static_cast<std::size_t>(i * n + j)].to_complex();
  return M;
}

double op_norm_eigen(const Eigen::MatrixXcd& M) {
  if (M.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M);
  double lam = es.eigenvalues().maxCoeff();
  return lam > 0 ? std::sqrt(lam) : 0.0;
}

}  // namespace

CoeffVec SpectralAlgebra::basis_coeff(int j) const {
  CoeffVec v = zero_coeff();
  v[static_cast<std::size_t>(j)] = Scalar::one(fp.backend);
  return v;
}

void SpectralAlgebra::finalize() {
  int m = dim();
  table_.assign(static_cast<std::size_t>(m) * m, {});
  for (const auto& t : constants)
    table_[static_cast<std::size_t>(t.j) * m + t.k].push_back({t.l, t.c});
}

CoeffVec SpectralAlgebra::mul_coeff(const CoeffVec& a, const CoeffVec& b) const {
  int m = dim();
  CoeffVec out = zero_coeff();
  for (int j = 0; j < m; ++j) {
    if (a[static_cast<std::size_t>(j)].is_zero()) continue;
    for (int k = 0; k < m; ++k) {
      if (b[static_cast<std::size_t>(k)].is_zero()) continue;
      Scalar ab = a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k)];
      for (const auto& [l, c] : table_[static_cast<std::size_t>(j) * m + k])
        out[static_cast<std::size_t>(l)] += ab * c;
    }
  }
  return out;
}

CoeffVec SpectralAlgebra::conj_coeff(const CoeffVec& a) const {
  CoeffVec out = zero_coeff();
  for (int j = 0; j < dim(); ++j) {
    if (a[static_cast<std::size_t>(j)].is_zero()) continue;
    out[static_cast<std::size_t>(inv_perm[static_cast<std::size_t>(j)])] +=
        a[static_cast<std::size_t>(j)].conj() * inv_phase[static_cast<std::size_t>(j)];
  }
  return out;
}

CoeffVec SpectralAlgebra::act(const RatPoint& X, const CoeffVec& a) const {
  CoeffVec out = a;
  CycCtx ctx{fp.p, fp.M};
  for (int j = 0; j < dim(); ++j) {
    RootOfUnity ph = psi0(fp.p, fp.M, 2 * sympl_pair_rat(X, weights[static_cast<std::size_t>(j)]));
    out[static_cast<std::size_t>(j)] =
        out[static_cast<std::size_t>(j)] * Scalar::from_root(fp.backend, ctx, ph);
  }
  return out;
}

std::vector<Scalar> SpectralAlgebra::rep_matrix(const CoeffVec& a) const {
  std::vector<Scalar> M(static_cast<std::size_t>(repdim) * repdim, Scalar::zero(fp.backend));
  for (int j = 0; j < dim(); ++j) {
    if (a[static_cast<std::size_t>(j)].is_zero()) continue;
    const auto& R = rep[static_cast<std::size_t>(j)];
    for (std::size_t e = 0; e < M.size(); ++e)
      if (!R[e].is_zero()) M[e] += a[static_cast<std::size_t>(j)] * R[e];
  }
  return M;
}

double SpectralAlgebra::rep_op_norm(const CoeffVec& a) const {
  return op_norm_eigen(to_eigen(rep_matrix(a), repdim));
}

std::shared_ptr<SpectralAlgebra> SpectralAlgebra::matrix_units(const FieldParams& fp, int k,
                                                               const std::vector<RatPoint>& w) {
  if (static_cast<int>(w.size()) != k) throw Error("matrix_units: need one weight per row");
  auto A = std::make_shared<SpectralAlgebra>();
  A->fp = fp;
  A->repdim = k;
  auto idx = [k](int u, int v) { return u * k + v; };
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v) {
      A->labels.push_back("e" + std::to_string(u + 1) + std::to_string(v + 1));
      A->weights.push_back(rat_sub(w[static_cast<std::size_t>(u)], w[static_cast<std::size_t>(v)]));
    }
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v)
      for (int x = 0; x < k; ++x)
        A->constants.push_back({idx(u, v), idx(v, x), idx(u, x), Scalar::one(fp.backend)});
  A->inv_perm.resize(static_cast<std::size_t>(k) * k);
  A->inv_phase.assign(static_cast<std::size_t>(k) * k, Scalar::one(fp.backend));
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v) A->inv_perm[static_cast<std::size_t>(idx(u, v))] = idx(v, u);
  for (int u = 0; u < k; ++u)
    for (int v = 0; v < k; ++v) {
      std::vector<Scalar> R(static_cast<std::size_t>(k) * k, Scalar::zero(fp.backend));
      R[static_cast<std::size_t>(u * k + v)] = Scalar::one(fp.backend);
      A->rep.push_back(std::move(R));
    }
  A->finalize();
  return A;
}

std::shared_ptr<SpectralAlgebra> SpectralAlgebra::matrix_trivial(const FieldParams& fp, int k) {
  std::vector<RatPoint> w(static_cast<std::size_t>(k),
                          RatPoint(static_cast<std::size_t>(2 * fp.d), mpq_class(0)));
  return matrix_units(fp, k, w);
}

std::shared_ptr<SpectralAlgebra> SpectralAlgebra::random(const FieldParams& fp, std::uint64_t seed,
                                                         int max_weight_exp) {
  Rng rng(seed);
  int k = 2 + static_cast<int>(rng.below(2));
  std::vector<RatPoint> w;
  for (int u = 0; u < k; ++u) {
    RatPoint xs;
    for (int i = 0; i < 2 * fp.d; ++i) {
      int e = static_cast<int>(rng.below(static_cast<std::uint64_t>(max_weight_exp) + 1));
      long num = rng.range(0, pow_p(fp.p, e).get_si() - 1);
      mpq_class q = e > 0 ? mpq_class(num, pow_p(fp.p, e)) : mpq_class(num);
      q.canonicalize();
      xs.push_back(q);
    }
    w.push_back(xs);
  }
  return matrix_units(fp, k, w);
}

ValidationReport validate(const SpectralAlgebra& A) {
  ValidationReport rep;
  int m = A.dim();
  if (static_cast<int>(A.inv_perm.size()) != m || static_cast<int>(A.inv_phase.size()) != m)
    rep.fail("involution tables have the wrong size");
  // weight additivity
  for (const auto& t : A.constants) {
    if (t.c.is_zero()) continue;
    auto sum = rat_add(A.weights[static_cast<std::size_t>(t.j)],
                       A.weights[static_cast<std::size_t>(t.k)]);
    if (sum != A.weights[static_cast<std::size_t>(t.l)])
      rep.fail("weight additivity violated at c_{" + std::to_string(t.j) + "," +
               std::to_string(t.k) + "}^" + std::to_string(t.l));
  }
  // involution flips weights and is unimodular
  for (int j = 0; j < m && rep.ok; ++j) {
    auto neg = rat_neg(A.weights[static_cast<std::size_t>(j)]);
    if (neg != A.weights[static_cast<std::size_t>(A.inv_perm[static_cast<std::size_t>(j)])])
      rep.fail("involution does not flip the weight of basis element " + std::to_string(j));
    if (std::abs(A.inv_phase[static_cast<std::size_t>(j)].abs() - 1.0) > 1e-12)
      rep.fail("involution phase is not unimodular at " + std::to_string(j));
  }
  // representation is a *-homomorphism (exact on the exact backend)
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      auto prod = A.mul_coeff(A.basis_coeff(j), A.basis_coeff(k));
      auto lhsM = A.rep_matrix(A.basis_coeff(j));
      auto rhsM = A.rep_matrix(A.basis_coeff(k));
      // lhsM * rhsM vs rep_matrix(prod)
      int n = A.repdim;
      std::vector<Scalar> mm(static_cast<std::size_t>(n) * n, Scalar::zero(A.fp.backend));
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
          Scalar acc = Scalar::zero(A.fp.backend);
          for (int c = 0; c < n; ++c)
            acc += lhsM[static_cast<std::size_t>(a * n + c)] * rhsM[static_cast<std::size_t>(c * n + b)];
          mm[static_cast<std::size_t>(a * n + b)] = acc;
        }
      auto pm = A.rep_matrix(prod);
      for (std::size_t e = 0; e < mm.size(); ++e)
        if (!Scalar::close(mm[e], pm[e], 1e-12)) {
          rep.fail("representation is not multiplicative at pair (" + std::to_string(j) + "," +
                   std::to_string(k) + ")");
          goto rep_done;
        }
    }
  }
rep_done:
  // faithfulness: rho has full rank as a map from coordinates to matrices
  {
    Eigen::MatrixXcd B(A.repdim * A.repdim, m);
    for (int j = 0; j < m; ++j) {
      auto R = A.rep_matrix(A.basis_coeff(j));
      for (int e = 0; e < A.repdim * A.repdim; ++e) B(e, j) = R[static_cast<std::size_t>(e)].to_complex();
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(B);
    if (svd.rank() < m) rep.fail("representation is not faithful");
  }
  // alpha_X is a *-automorphism on sampled grid points
  {
    Rng rng(1234);
    for (int trial = 0; trial < 4 && rep.ok; ++trial) {
      RatPoint X;
      for (int i = 0; i < 2 * A.fp.d; ++i) {
        mpq_class q(rng.range(-8, 8), pow_p(A.fp.p, 1 + static_cast<int>(rng.below(2))));
        q.canonicalize();
        X.push_back(q);
      }
      for (int j = 0; j < m && rep.ok; ++j)
        for (int k = 0; k < m; ++k) {
          auto lhs = A.act(X, A.mul_coeff(A.basis_coeff(j), A.basis_coeff(k)));
          auto rhs = A.mul_coeff(A.act(X, A.basis_coeff(j)), A.act(X, A.basis_coeff(k)));
          bool same = true;
          for (int l = 0; l < m; ++l)
            if (!Scalar::close(lhs[static_cast<std::size_t>(l)], rhs[static_cast<std::size_t>(l)], 1e-12))
              same = false;
          if (!same) {
            rep.fail("alpha_X fails to be multiplicative at a sampled X");
            break;
          }
        }
    }
  }
  return rep;
}

Scalar DeformedAlgebra::twist_phase(int j, int k) const {
  const auto& A = *base;
  if (theta.zero) return Scalar::one(A.fp.backend);
  mpq_class arg = 2 * theta.value() *
                  sympl_pair_rat(A.weights[static_cast<std::size_t>(j)],
                                 A.weights[static_cast<std::size_t>(k)]);
  return Scalar::from_root(A.fp.backend, CycCtx{A.fp.p, A.fp.M}, psi0(A.fp.p, A.fp.M, arg));
}

CoeffVec DeformedAlgebra::star(const CoeffVec& a, const CoeffVec& b) const {
  const auto& A = *base;
  int m = A.dim();
  CoeffVec out = A.zero_coeff();
  for (const auto& t : twisted) {
    const Scalar& aj = a[static_cast<std::size_t>(t.j)];
    const Scalar& bk = b[static_cast<std::size_t>(t.k)];
    if (aj.is_zero() || bk.is_zero()) continue;
    out[static_cast<std::size_t>(t.l)] += aj * bk * t.c;
  }
  (void)m;
  return out;
}

namespace {

/// Left-multiplication matrices of the twisted algebra and the GNS norm.
struct LeftRegular {
  int m;
  std::vector<Eigen::MatrixXcd> L;  // L_j
  Eigen::MatrixXcd gram;            // G_{jk} = Tr(L_{a_j^* star a_k})
  Eigen::MatrixXcd half;            // G^{1/2}
  Eigen::MatrixXcd halfinv;         // pseudo G^{-1/2}
};

LeftRegular left_regular(const DeformedAlgebra& D) {
  const auto& A = *D.base;
  int m = A.dim();
  LeftRegular lr;
  lr.m = m;
  lr.L.assign(static_cast<std::size_t>(m), Eigen::MatrixXcd::Zero(m, m));
  for (const auto& t : D.twisted)
    lr.L[static_cast<std::size_t>(t.j)](t.l, t.k) += t.c.to_complex();
  auto trL = [&](const CoeffVec& y) {
    std::complex<double> acc = 0;
    for (int j = 0; j < m; ++j)
      if (!y[static_cast<std::size_t>(j)].is_zero())
        acc += y[static_cast<std::size_t>(j)].to_complex() * lr.L[static_cast<std::size_t>(j)].trace();
    return acc;
  };
  lr.gram.resize(m, m);
  for (int j = 0; j < m; ++j) {
    CoeffVec ajs = A.conj_coeff(A.basis_coeff(j));
    for (int k = 0; k < m; ++k) lr.gram(j, k) = trL(D.star(ajs, A.basis_coeff(k)));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(lr.gram);
  Eigen::VectorXd ev = es.eigenvalues();
  double cap = ev.maxCoeff();
  Eigen::VectorXd sq(ev.size()), isq(ev.size());
  for (int i = 0; i < ev.size(); ++i) {
    double v = std::max(ev(i), 0.0);
    sq(i) = std::sqrt(v);
    isq(i) = v > 1e-12 * cap ? 1.0 / std::sqrt(v) : 0.0;
  }
  lr.half = es.eigenvectors() * sq.asDiagonal() * es.eigenvectors().adjoint();
  lr.halfinv = es.eigenvectors() * isq.asDiagonal() * es.eigenvectors().adjoint();
  return lr;
}

double gns_norm(const LeftRegular& lr, const CoeffVec& a) {
  Eigen::MatrixXcd La = Eigen::MatrixXcd::Zero(lr.m, lr.m);
  for (int j = 0; j < lr.m; ++j)
    if (!a[static_cast<std::size_t>(j)].is_zero())
      La += a[static_cast<std::size_t>(j)].to_complex() * lr.L[static_cast<std::size_t>(j)];
  return op_norm_eigen(lr.half * La * lr.halfinv);
}

}  // namespace

DeformedAlgebra deform_sc(std::shared_ptr<const SpectralAlgebra> A, const ThetaParam& theta,
                          bool with_norms) {
  DeformedAlgebra D;
  D.base = std::move(A);
  D.theta = theta;
  for (const auto& t : D.base->constants) {
    SpectralAlgebra::Triple nt = t;
    nt.c = t.c * D.twist_phase(t.j, t.k);
    D.twisted.push_back(std::move(nt));
  }
  if (with_norms) {
    LeftRegular lr = left_regular(D);
    int m = D.base->dim();
    for (int j = 0; j < m; ++j) D.basis_norms.push_back(gns_norm(lr, D.base->basis_coeff(j)));
    CoeffVec sum(static_cast<std::size_t>(m), Scalar::one(D.base->fp.backend));
    D.sum_probe_norm = gns_norm(lr, sum);
  }
  return D;
}

double deformed_norm(const DeformedAlgebra& D, const CoeffVec& a) {
  LeftRegular lr = left_regular(D);
  return gns_norm(lr, a);
}

SBFunction char_star(const LocallyConstantSpec& F, const SBFunction& g, const ThetaParam& theta,
                     StarSide side) {
  F.check();
  const FieldParams& fp = g.field();
  if (F.alg != g.algebra() && F.ncoeff() != g.ncoeff())
    throw Error("char_star: coefficient space mismatch");
  CycCtx ctx{fp.p, fp.M};
  std::optional<SBFunction> acc;
  for (std::size_t j = 0; j < F.weights.size(); ++j) {
    const RatPoint& Pc = F.weights[j];
    std::vector<mpq_class> shift(Pc.size());
    mpq_class tv = theta.value();
    for (std::size_t i = 0; i < Pc.size(); ++i)
      shift[i] = (side == StarSide::left ? tv : -tv) * Pc[i];
    SBFunction term = g.translate(shift);
    // refine so the phase Psi_P is cell-constant
    int sP = rat_sup_exp(fp.p, Pc);
    if (term.res().s < sP) term = term.refined(Resolution{term.res().r, sP});
    const SpectralAlgebra* alg = g.algebra().get();
    for (std::size_t c = 0; c < term.ncells(); ++c) {
      auto Xc = term.cell_point(c).coords();
      Scalar ph = Scalar::from_root(fp.backend, ctx, psi0(fp.p, fp.M, 2 * sympl_pair_rat(Xc, Pc)));
      CoeffVec val = term.value(c);
      CoeffVec prod = side == StarSide::left ? coeff_mul(alg, F.coeffs[j], val)
                                             : coeff_mul(alg, val, F.coeffs[j]);
      term.set_value(c, coeff_scaled(prod, ph));
    }
    acc = acc ? acc->add(term) : term;
  }
  if (!acc) return SBFunction(fp, g.dim(), g.res(), g.algebra());
  return *acc;
}

SBFunction translation_model(const SBFunction& f, const SBFunction& g, const ThetaParam& theta,
                             long N) {
  const FieldParams& fp = f.field();
  if (theta.zero) return f.mul(g);
  if (N < 0) N = 2 * fp.d + 1;
  long t = theta.val();
  SBFunction h1 = apply_J_theta(f, N, theta);
  SBFunction h2 = apply_J(g, N);

  int rJoint = std::max(f.res().r, g.res().r);
  int sOut = std::max({f.res().s, g.res().s, rJoint + static_cast<int>(t)});
  int rOut = std::max<long>(rJoint, sOut - t);  // the product spreads to the kernel support
  int rY = static_cast<int>(t) + std::max(h1.res().r, rOut);
  int rZ = std::max(h2.res().r, rOut);
  int sY = std::max({0, rZ, h1.res().s - static_cast<int>(t)});
  int sZ = std::max({0, rY, h2.res().s});

  SBFunction out(fp, f.dim(), Resolution{rOut, sOut}, f.algebra());
  CellGrid gy(fp.p, f.dim(), Resolution{rY, sY});
  CellGrid gz(fp.p, f.dim(), Resolution{rZ, sZ});
  mpq_class volY = mpq_class(1, pow_p(fp.p, sY * f.dim()));
  mpq_class volZ = mpq_class(1, pow_p(fp.p, sZ * f.dim()));
  CycCtx ctx{fp.p, fp.M};
  mpq_class tv = theta.value();
  const SpectralAlgebra* alg = f.algebra().get();
  int m = f.ncoeff();

  // precompute Y-cell data
  struct YEntry {
    std::vector<mpq_class> thY;
    mpq_class w;  // mu0^{-N}(Y) * volY
    std::vector<mpq_class> Yc;
  };
  std::vector<YEntry> ys;
  ys.reserve(gy.ncells());
  for (std::size_t cy = 0; cy < gy.ncells(); ++cy) {
    YEntry e;
    e.Yc = gy.cell_coords(cy);
    e.thY.resize(e.Yc.size());
    for (std::size_t i = 0; i < e.Yc.size(); ++i) e.thY[i] = tv * e.Yc[i];
    e.w = mu0_rat(fp.p, e.Yc).pow_int(-N).to_rational(fp.p) * volY;
    ys.push_back(std::move(e));
  }
  struct ZEntry {
    std::vector<mpq_class> Zc;
    mpq_class w;
  };
  std::vector<ZEntry> zs;
  zs.reserve(gz.ncells());
  for (std::size_t cz = 0; cz < gz.ncells(); ++cz) {
    ZEntry e;
    e.Zc = gz.cell_coords(cz);
    e.w = mu0_rat(fp.p, e.Zc).pow_int(-N).to_rational(fp.p) * volZ;
    zs.push_back(std::move(e));
  }

  std::vector<mpq_class> arg(static_cast<std::size_t>(f.dim()));
  for (std::size_t cx = 0; cx < out.ncells(); ++cx) {
    auto Xc = out.cell_point(cx).coords();
    CoeffVec acc(static_cast<std::size_t>(m), Scalar::zero(fp.backend));
    for (const auto& ye : ys) {
      for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = Xc[i] + ye.thY[i];
      CoeffVec v1 = h1.eval(arg);
      if (coeff_is_zero(v1)) continue;
      for (const auto& ze : zs) {
        for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = Xc[i] + ze.Zc[i];
        CoeffVec v2 = h2.eval(arg);
        if (coeff_is_zero(v2)) continue;
        // conj Psi(2[Y,Z]) = Psi(2[Z,Y])
        Scalar ph = Scalar::from_root(fp.backend, ctx,
                                      psi0(fp.p, fp.M, 2 * sympl_pair_rat(ze.Zc, ye.Yc)));
        CoeffVec prod = coeff_mul(alg, v1, v2);
        mpq_class w = ye.w * ze.w;
        for (int k = 0; k < m; ++k) acc[static_cast<std::size_t>(k)] += prod[static_cast<std::size_t>(k)] * ph.scaled(w);
      }
    }
    out.set_value(cx, acc);
  }
  return out;
}

double seminorm(const SpectralAlgebra& A, const CoeffVec& a, long n) {
  CoeffVec scaled = a;
  for (int j = 0; j < A.dim(); ++j)
    scaled[static_cast<std::size_t>(j)] =
        scaled[static_cast<std::size_t>(j)].scaled(A.weight_mu0(j).pow_int(n).to_rational(A.fp.p));
  return A.rep_op_norm(scaled);
}

CoeffVec smoothing(const SpectralAlgebra& A, const CoeffVec& a, const SBFunction& phi) {
  if (phi.ncoeff() != 1) throw Error("smoothing needs a scalar test function");
  if (phi.dim() != 2 * A.fp.d) throw Error("smoothing test function must live on k^{2d}");
  CoeffVec out = A.zero_coeff();
  CycCtx ctx{A.fp.p, A.fp.M};
  mpq_class vol = phi.cell_volume_rat();
  for (int j = 0; j < A.dim(); ++j) {
    if (a[static_cast<std::size_t>(j)].is_zero()) continue;
    PowerOfP w = A.weight_mu0(j);
    // cell integrals of Psi(2[X,P_j]) vanish unless |P_j| <= p^s
    if (!w.is_zero() && w.exponent() > phi.res().s) continue;
    Scalar acc = Scalar::zero(A.fp.backend);
    const RatPoint& Pc = A.weights[static_cast<std::size_t>(j)];
    for (std::size_t c = 0; c < phi.ncells(); ++c) {
      if (phi.at(c).is_zero()) continue;
      auto Xc = phi.cell_point(c).coords();
      Scalar ph = Scalar::from_root(A.fp.backend, ctx,
                                    psi0(A.fp.p, A.fp.M, 2 * sympl_pair_rat(Xc, Pc)));
      acc += phi.at(c) * ph;
    }
    out[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)] * acc.scaled(vol);
  }
  return out;
}

namespace {

struct Ball {
  bool empty = false;
  mpq_class center;
  long radius_exp = 0;  // radius p^{radius_exp}
};

/// B(0, p^j) intersect B(m, p^{-l}) in the ultrametric.
Ball ball_intersect(long p, long j, const mpq_class& m, long l) {
  Ball out;
  PowerOfP am = padic_abs(p, m);
  double r1 = static_cast<double>(j), r2 = static_cast<double>(-l);
  if (r2 <= r1) {
    // small ball around m inside the big one iff |m| <= p^j
    if (!am.is_zero() && am.exponent() > j) {
      out.empty = true;
      return out;
    }
    out.center = m;
    out.radius_exp = -l;
  } else {
    if (!am.is_zero() && am.exponent() > -l) {
      out.empty = true;
      return out;
    }
    out.center = 0;
    out.radius_exp = j;
  }
  return out;
}

/// F = Int_{|u|<=p^j} Int_{|v|<=p^l} Psi(2(c u v + alpha u + beta v)) du dv,
/// c = +-1. Exact closed form.
Scalar pair_factor(const FieldParams& fp, long c, const mpq_class& alpha, const mpq_class& beta,
                   long j, long l) {
  // inner v integral: p^l * [ |c u + beta| <= p^{-l} ]
  mpq_class m = -beta * c;  // c^2 = 1
  Ball D = ball_intersect(fp.p, j, m, l);
  if (D.empty) return Scalar::zero(fp.backend);
  // Int_D Psi(2 alpha u) du = vol * Psi(2 alpha center) * [ |2 alpha| <= p^{-radius} ]
  PowerOfP aa = padic_abs(fp.p, 2 * alpha);
  if (!aa.is_zero() && aa.exponent() > -D.radius_exp) return Scalar::zero(fp.backend);
  mpq_class vol = PowerOfP::pow(l + D.radius_exp).to_rational(fp.p);
  Scalar ph = Scalar::from_root(fp.backend, CycCtx{fp.p, fp.M},
                                psi0(fp.p, fp.M, 2 * alpha * D.center));
  return ph.scaled(vol);
}

/// Product over the 2d decoupled coordinate pairs of the double-ball integral
/// S(j,l) = Int_{|X|<=p^j} Int_{|Y|<=p^l} Psi(2([Y,X] + theta[X,P] + [Y,Q])).
Scalar ball_pair_integral(const SpectralAlgebra& A, const std::vector<mpq_class>& P,
                          const std::vector<mpq_class>& Q, const mpq_class& tv, long j, long l) {
  const FieldParams& fp = A.fp;
  int d = fp.d;
  Scalar acc = Scalar::one(fp.backend);
  for (int i = 0; i < d; ++i) {
    // pair (x_i in B_j, eta_i in B_l): cross +1, u-linear -theta p_xi, v-linear q_x
    Scalar f1 = pair_factor(fp, +1, -tv * P[static_cast<std::size_t>(d + i)],
                            Q[static_cast<std::size_t>(i)], j, l);
    if (f1.is_zero()) return f1;
    // pair (y_i in B_l, xi_i in B_j): cross -1, u-linear -q_xi, v-linear theta p_x
    Scalar f2 = pair_factor(fp, -1, -Q[static_cast<std::size_t>(d + i)],
                            tv * P[static_cast<std::size_t>(i)], l, j);
    if (f2.is_zero()) return f2;
    acc = acc * f1 * f2;
  }
  return acc;
}

mpq_class mu0N_of(const FieldParams& fp, const std::vector<mpq_class>& v, long N) {
  return mu0_rat(fp.p, v).pow_int(N).to_rational(fp.p);
}

}  // namespace

OscPairResult osc_oracle_pair(const SpectralAlgebra& A, int j, int k, const ThetaParam& theta,
                              long N, int T, OscRegularizer reg, double reg_scale) {
  const FieldParams& fp = A.fp;
  if (N <= 2 * fp.d) throw Error("oscillatory weight exponent must exceed 2d");
  const RatPoint& P = A.weights[static_cast<std::size_t>(j)];
  const RatPoint& Q = A.weights[static_cast<std::size_t>(k)];
  mpq_class tv = theta.value();
  RatPoint thP = rat_scaled(P, tv);

  // ball integrals S(j', l') for j', l' in [-1, T]; S(-1, .) uses the empty set
  auto Sball = [&](long a, long b) {
    if (a < 0 || b < 0) return Scalar::zero(fp.backend);
    return ball_pair_integral(A, P, Q, tv, a, b);
  };

  OscPairResult out;
  out.value = Scalar::zero(fp.backend);
  if (reg == OscRegularizer::none) {
    // sum over shell pairs with weights p^{-N(j+l)}, then the J-factor scales
    for (long a = 0; a <= T; ++a) {
      for (long b = 0; b <= T; ++b) {
        Scalar shell = Sball(a, b) - Sball(a - 1, b) - Sball(a, b - 1) + Sball(a - 1, b - 1);
        if (shell.is_zero()) continue;
        mpq_class w = mpq_class(1, pow_p(fp.p, static_cast<int>(N * (a + b))));
        out.value += shell.scaled(w);
      }
    }
    mpq_class pref = mu0N_of(fp, thP, N) * mu0N_of(fp, Q, N);
    out.value = out.value.scaled(pref);
    // Rigorous tail. Every ball-pair phase integral S(a,b) has |S| <= 1
    // (each coordinate-pair factor is p^l * vol of a sub-ball of radius
    // <= p^{-l}), so the truncation error of the ball-coefficient
    // decomposition is governed by the dropped coefficient mass
    // q = sum_{a>T} (p^{-Na} - p^{-N(a+1)}) + p^{-N(T+1)} = 2 p^{-N(T+1)}
    // per variable: |full - truncated| <= 2q + q^2.
    mpq_class q = mpq_class(2, pow_p(fp.p, static_cast<int>(N * (T + 1))));
    out.tail = pref * (2 * q + q * q);
  } else {
    // exponential regularizer: unweighted integral with e^{-mu0(Y)mu0(Z)/scale}
    if (reg_scale <= 0) throw Error("exponential regularizer needs a positive scale");
    std::complex<double> acc{0, 0};
    double p = static_cast<double>(fp.p);
    for (long a = 0; a <= T; ++a) {
      for (long b = 0; b <= T; ++b) {
        Scalar shell = Sball(a, b) - Sball(a - 1, b) - Sball(a, b - 1) + Sball(a - 1, b - 1);
        if (shell.is_zero()) continue;
        double w = std::exp(-std::pow(p, static_cast<double>(a)) *
                            std::pow(p, static_cast<double>(b)) / reg_scale);
        acc += shell.to_complex() * w;
      }
    }
    out.value = Scalar::from_complex(acc);
    // coarse rigorous tail: |shell integral| <= vol(B_a)vol(B_b)
    double tail = 0;
    for (long a = 0; a <= T + 60; ++a)
      for (long b = 0; b <= T + 60; ++b) {
        if (a <= T && b <= T) continue;
        double vols = std::pow(p, static_cast<double>(2 * fp.d * (a + b)));
        double w = std::exp(-std::pow(p, static_cast<double>(a + b)) / reg_scale);
        double term = 4.0 * vols * w;
        if (term < 1e-300) continue;
        tail += term;
      }
    out.tail = mpq_class(tail <= 0 ? 0.0 : tail);
  }
  return out;
}

Scalar osc_oracle_pair_brute(const SpectralAlgebra& A, int j, int k, const ThetaParam& theta,
                             long N, int T) {
  const FieldParams& fp = A.fp;
  if (N <= 2 * fp.d) throw Error("oscillatory weight exponent must exceed 2d");
  const RatPoint& P = A.weights[static_cast<std::size_t>(j)];
  const RatPoint& Q = A.weights[static_cast<std::size_t>(k)];
  mpq_class tv = theta.value();
  RatPoint thP = rat_scaled(P, tv);
  int n2d = 2 * fp.d;
  // phases Psi(2[Y,X]) with |X|,|Y| <= p^T need s >= T
  int sstar = std::max({T, rat_sup_exp(fp.p, thP), rat_sup_exp(fp.p, Q)});
  CellGrid grid(fp.p, n2d, Resolution{T, sstar});
  mpq_class vol = mpq_class(1, pow_p(fp.p, sstar * n2d));
  CycCtx ctx{fp.p, fp.M};
  Scalar acc = Scalar::zero(fp.backend);
  for (std::size_t cx = 0; cx < grid.ncells(); ++cx) {
    auto X = grid.cell_coords(cx);
    mpq_class wx = mu0_rat(fp.p, X).pow_int(-N).to_rational(fp.p);
    mpq_class phx_arg = 2 * tv * sympl_pair_rat(X, P);
    for (std::size_t cy = 0; cy < grid.ncells(); ++cy) {
      auto Y = grid.cell_coords(cy);
      mpq_class wy = mu0_rat(fp.p, Y).pow_int(-N).to_rational(fp.p);
      // Psi(2[Y,X] + 2 theta [X,P] + 2[Y,Q])
      mpq_class arg = 2 * sympl_pair_rat(Y, X) + phx_arg + 2 * sympl_pair_rat(Y, Q);
      acc += Scalar::from_root(fp.backend, ctx, psi0(fp.p, fp.M, arg)).scaled(wx * wy * vol * vol);
    }
  }
  return acc.scaled(mu0N_of(fp, thP, N) * mu0N_of(fp, Q, N));
}

OscResult osc_oracle(const SpectralAlgebra& A, const CoeffVec& a, const CoeffVec& b,
                     const ThetaParam& theta, long N, int T, OscRegularizer reg,
                     double reg_scale) {
  int m = A.dim();
  OscResult out;
  out.value = A.zero_coeff();
  for (int j = 0; j < m; ++j) {
    if (a[static_cast<std::size_t>(j)].is_zero()) continue;
    for (int k = 0; k < m; ++k) {
      if (b[static_cast<std::size_t>(k)].is_zero()) continue;
      auto prod = A.mul_coeff(A.basis_coeff(j), A.basis_coeff(k));
      if (coeff_is_zero(prod)) continue;
      OscPairResult pr = osc_oracle_pair(A, j, k, theta, N, T, reg, reg_scale);
      Scalar w = a[static_cast<std::size_t>(j)] * b[static_cast<std::size_t>(k)];
      if (pr.value.backend() != w.backend())
        w = Scalar::from_complex(w.to_complex());
      for (int l = 0; l < m; ++l)
        if (!prod[static_cast<std::size_t>(l)].is_zero()) {
          Scalar t = w * pr.value;
          if (prod[static_cast<std::size_t>(l)].backend() != t.backend())
            out.value[static_cast<std::size_t>(l)] +=
                Scalar::from_complex(prod[static_cast<std::size_t>(l)].to_complex() * t.to_complex());
          else
            out.value[static_cast<std::size_t>(l)] += prod[static_cast<std::size_t>(l)] * t;
        }
      out.tail += a[static_cast<std::size_t>(j)].abs() * b[static_cast<std::size_t>(k)].abs() *
                  pr.tail.get_d() * A.rep_op_norm(prod);
    }
  }
  return out;
}

StageReport stage_and_norm(const std::shared_ptr<const SpectralAlgebra>& A,
                           const ThetaParam& theta, const ThetaParam& theta2,
                           bool with_module_norm, int module_radius) {
  StageReport rep;
  DeformedAlgebra D1 = deform_sc(A, theta, true);
  DeformedAlgebra D12 = deform_sc(A, theta, false);
  // twist D1 once more by theta2
  DeformedAlgebra Dstage;
  Dstage.base = A;
  Dstage.theta = theta.add(theta2);
  for (auto t : D1.twisted) {
    DeformedAlgebra tmp;
    tmp.base = A;
    tmp.theta = theta2;
    t.c = t.c * tmp.twist_phase(t.j, t.k);
    Dstage.twisted.push_back(t);
  }
  DeformedAlgebra Dsum = deform_sc(A, theta.add(theta2), false);
  rep.stage_exact = Dstage.twisted.size() == Dsum.twisted.size();
  if (rep.stage_exact)
    for (std::size_t i = 0; i < Dsum.twisted.size(); ++i)
      if (!Scalar::close(Dstage.twisted[i].c, Dsum.twisted[i].c,
                         A->fp.backend == Backend::exact ? 0.0 : 1e-12)) {
        rep.stage_exact = false;
        break;
      }
  // round trip theta' = -theta
  DeformedAlgebra Dback;
  Dback.base = A;
  Dback.theta = theta.negate();
  bool rt = true;
  for (const auto& t : D1.twisted) {
    Scalar c = t.c * Dback.twist_phase(t.j, t.k);
    // compare with the untwisted constant
    bool found = false;
    for (const auto& o : A->constants)
      if (o.j == t.j && o.k == t.k && o.l == t.l) {
        found = true;
        if (!Scalar::close(c, o.c, A->fp.backend == Backend::exact ? 0.0 : 1e-12)) rt = false;
      }
    if (!found) rt = false;
  }
  rep.roundtrip_exact = rt;
  rep.findim_norms = D1.basis_norms;
  rep.findim_sum_norm = D1.sum_probe_norm;
  if (with_module_norm) {
    int m = A->dim();
    for (int j = 0; j < m; ++j)
      rep.module_norms.push_back(module_norm_truncated(*A, A->basis_coeff(j), theta, module_radius));
    CoeffVec sum(static_cast<std::size_t>(m), Scalar::one(A->fp.backend));
    rep.module_sum_norm = module_norm_truncated(*A, sum, theta, module_radius);
    double gap = 0;
    for (int j = 0; j < m; ++j) {
      double den = std::max(rep.findim_norms[static_cast<std::size_t>(j)], 1e-12);
      gap = std::max(gap, std::abs(rep.module_norms[static_cast<std::size_t>(j)] -
                                   rep.findim_norms[static_cast<std::size_t>(j)]) / den);
    }
    gap = std::max(gap, std::abs(rep.module_sum_norm - rep.findim_sum_norm) /
                            std::max(rep.findim_sum_norm, 1e-12));
    rep.max_gap = gap;
  }
  return rep;
}

double module_norm_truncated(const SpectralAlgebra& A, const CoeffVec& a, const ThetaParam& theta,
                             int radius) {
  const FieldParams& fp = A.fp;
  int n2d = 2 * fp.d;
  int sstar = 0;
  for (const auto& P : A.weights) sstar = std::max(sstar, rat_sup_exp(fp.p, P));
  CellGrid grid(fp.p, n2d, Resolution{radius, sstar});
  std::size_t nc = grid.ncells();
  int rd = A.repdim;
  std::size_t dims = nc * static_cast<std::size_t>(rd);
  mpq_class tv = theta.value();

  // per weight j: shifted-cell index (or none) and phase at each cell
  int m = A.dim();
  std::vector<Eigen::MatrixXcd> rho(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) rho[static_cast<std::size_t>(j)] = to_eigen(A.rep_matrix(A.basis_coeff(j)), rd);
  std::vector<std::vector<long>> shift(static_cast<std::size_t>(m), std::vector<long>(nc, -1));
  std::vector<std::vector<std::complex<double>>> phase(static_cast<std::size_t>(m),
                                                       std::vector<std::complex<double>>(nc));
  for (int j = 0; j < m; ++j) {
    const RatPoint& Pc = A.weights[static_cast<std::size_t>(j)];
    for (std::size_t c = 0; c < nc; ++c) {
      auto Xc = grid.cell_coords(c);
      RootOfUnity ph = psi0(fp.p, fp.M, 2 * sympl_pair_rat(Xc, Pc));
      phase[static_cast<std::size_t>(j)][c] = root_to_complex(ph);
      std::vector<mpq_class> sh(Xc.size());
      for (std::size_t i = 0; i < Xc.size(); ++i) sh[i] = Xc[i] + tv * Pc[i];
      auto idx = grid.locate(sh);
      shift[static_cast<std::size_t>(j)][c] = idx ? static_cast<long>(*idx) : -1;
    }
  }
  std::vector<std::complex<double>> acoef(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) acoef[static_cast<std::size_t>(j)] = a[static_cast<std::size_t>(j)].to_complex();

  auto applyM = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<long>(dims));
    for (int j = 0; j < m; ++j) {
      if (acoef[static_cast<std::size_t>(j)] == std::complex<double>(0, 0)) continue;
      for (std::size_t c = 0; c < nc; ++c) {
        long src = shift[static_cast<std::size_t>(j)][c];
        if (src < 0) continue;
        auto vc = v.segment(src * rd, rd);
        out.segment(static_cast<long>(c) * rd, rd) +=
            acoef[static_cast<std::size_t>(j)] * phase[static_cast<std::size_t>(j)][c] *
            (rho[static_cast<std::size_t>(j)] * vc);
      }
    }
    return out;
  };
  auto applyMadj = [&](const Eigen::VectorXcd& v) {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<long>(dims));
    for (int j = 0; j < m; ++j) {
      if (acoef[static_cast<std::size_t>(j)] == std::complex<double>(0, 0)) continue;
      for (std::size_t c = 0; c < nc; ++c) {
        long src = shift[static_cast<std::size_t>(j)][c];
        if (src < 0) continue;
        auto vc = v.segment(static_cast<long>(c) * rd, rd);
        out.segment(src * rd, rd) += std::conj(acoef[static_cast<std::size_t>(j)] *
                                               phase[static_cast<std::size_t>(j)][c]) *
                                     (rho[static_cast<std::size_t>(j)].adjoint() * vc);
      }
    }
    return out;
  };

  Rng rng(99);
  Eigen::VectorXcd v(static_cast<long>(dims));
  for (std::size_t i = 0; i < dims; ++i)
    v(static_cast<long>(i)) = std::complex<double>(rng.unit() - 0.5, rng.unit() - 0.5);
  v.normalize();
  double lam = 0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXcd w = applyMadj(applyM(v));
    double nw = w.norm();
    if (nw == 0) return 0.0;
    double nl = nw;  // since |v| = 1, Rayleigh-ish
    w /= nw;
    if (it > 10 && std::abs(nl - lam) <= 1e-12 * std::max(1.0, nl)) {
      lam = nl;
      break;
    }
    lam = nl;
    v = w;
  }
  return std::sqrt(lam);
}

}  // namespace ultraweyl
