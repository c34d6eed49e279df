#include "ultraweyl/weyl.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace ultraweyl {

namespace {

int sup_exp(const GridPoint& X) {
  PowerOfP a = X.abs_sup();
  return a.is_zero() ? 0 : std::max(0L, a.exponent());
}

Eigen::MatrixXcd op_to_eigen(const LinOperator& T) {
  std::size_t nc = T.dim();
  int rd = T.algebra() ? T.algebra()->repdim : 1;
  int Sn = T.basis().S * T.basis().n;
  double scale = std::pow(static_cast<double>(T.basis().fp.p), -static_cast<double>(Sn));
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(static_cast<long>(nc) * rd,
                                              static_cast<long>(nc) * rd);
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t c2 = 0; c2 < nc; ++c2) {
      if (!T.algebra()) {
        M(static_cast<long>(c), static_cast<long>(c2)) = T.at(c, c2).to_complex() * scale;
      } else {
        auto R = T.algebra()->rep_matrix(T.value(c, c2));
        for (int i = 0; i < rd; ++i)
          for (int j = 0; j < rd; ++j)
            M(static_cast<long>(c) * rd + i, static_cast<long>(c2) * rd + j) =
                R[static_cast<std::size_t>(i * rd + j)].to_complex() * scale;
      }
    }
  return M;
}

}  // namespace

void CellBasis::require_point(const ThetaParam& theta, const GridPoint& X) const {
  if (X.dim() != 2 * n) throw Error("phase-space point has the wrong dimension");
  long t = theta.zero ? 0 : theta.val();
  int ex = 0, exi = 0;
  for (int i = 0; i < n; ++i) {
    auto ax = X.abs(i);
    if (!ax.is_zero()) ex = std::max<long>(ex, ax.exponent());
    auto axi = X.abs(n + i);
    if (!axi.is_zero()) exi = std::max<long>(exi, axi.exponent());
  }
  int needR = std::max(R, ex);
  int needS = std::max<long>(S, t + exi);
  if (needR > R || needS > S)
    throw ResolutionError("cell basis too coarse for this point and theta", needR, needS);
}

SBFunction MonomialOp::apply(const SBFunction& v) const {
  if (v.res() != basis.res() || v.dim() != basis.n) throw Error("vector lives on another basis");
  SBFunction out = v;
  for (std::size_t c = 0; c < v.ncells(); ++c)
    for (int k = 0; k < v.ncoeff(); ++k) out.at(c, k) = phase[c] * v.at(src[c], k);
  return out;
}

MonomialOp MonomialOp::compose(const MonomialOp& o) const {
  if (!(basis == o.basis)) throw Error("monomial basis mismatch");
  MonomialOp out = *this;
  for (std::size_t c = 0; c < src.size(); ++c) {
    out.phase[c] = phase[c] * o.phase[src[c]];
    out.src[c] = o.src[src[c]];
  }
  return out;
}

MonomialOp MonomialOp::adjoint() const {
  MonomialOp out = *this;
  for (std::size_t c = 0; c < src.size(); ++c) {
    out.src[src[c]] = c;
    out.phase[src[c]] = phase[c].conj();
  }
  return out;
}

LinOperator::LinOperator(const CellBasis& basis, std::shared_ptr<const SpectralAlgebra> alg)
    : basis_(basis), alg_(std::move(alg)) {
  m_ = alg_ ? alg_->dim() : 1;
  nc_ = basis.ncells();
  if (nc_ * nc_ * static_cast<std::size_t>(m_) > (std::size_t(1) << 27))
    throw Error("operator too large at this resolution");
  k_.assign(nc_ * nc_ * static_cast<std::size_t>(m_), Scalar::zero(basis.fp.backend));
}

CoeffVec LinOperator::value(std::size_t c, std::size_t c2) const {
  CoeffVec v(static_cast<std::size_t>(m_));
  for (int k = 0; k < m_; ++k) v[static_cast<std::size_t>(k)] = at(c, c2, k);
  return v;
}

void LinOperator::set_value(std::size_t c, std::size_t c2, const CoeffVec& v) {
  for (int k = 0; k < m_; ++k) at(c, c2, k) = v[static_cast<std::size_t>(k)];
}

LinOperator LinOperator::compose(const LinOperator& o) const {
  if (!(basis_ == o.basis_)) throw Error("operator basis mismatch");
  LinOperator out(basis_, alg_);
  mpq_class vol = pow_q(basis_.fp.p, -static_cast<long>(basis_.S) * basis_.n);
  const SpectralAlgebra* alg = alg_.get();
  for (std::size_t a = 0; a < nc_; ++a)
    for (std::size_t b = 0; b < nc_; ++b) {
      CoeffVec acc(static_cast<std::size_t>(m_), Scalar::zero(basis_.fp.backend));
      for (std::size_t c = 0; c < nc_; ++c) {
        if (m_ == 1) {
          if (at(a, c).is_zero() || o.at(c, b).is_zero()) continue;
          acc[0] += at(a, c) * o.at(c, b);
        } else {
          CoeffVec l = value(a, c), r = o.value(c, b);
          if (coeff_is_zero(l) || coeff_is_zero(r)) continue;
          CoeffVec pr = coeff_mul(alg, l, r);
          for (int k = 0; k < m_; ++k) acc[static_cast<std::size_t>(k)] += pr[static_cast<std::size_t>(k)];
        }
      }
      for (int k = 0; k < m_; ++k)
        out.at(a, b, k) = acc[static_cast<std::size_t>(k)].scaled(vol);
    }
  return out;
}

LinOperator LinOperator::add(const LinOperator& o) const {
  if (!(basis_ == o.basis_)) throw Error("operator basis mismatch");
  LinOperator out = *this;
  for (std::size_t i = 0; i < k_.size(); ++i) out.k_[i] += o.k_[i];
  return out;
}

LinOperator LinOperator::sub(const LinOperator& o) const {
  return add(o.scaled(Scalar::integer(basis_.fp.backend, -1)));
}

LinOperator LinOperator::adjoint() const {
  LinOperator out(basis_, alg_);
  const SpectralAlgebra* alg = alg_.get();
  for (std::size_t a = 0; a < nc_; ++a)
    for (std::size_t b = 0; b < nc_; ++b) out.set_value(a, b, coeff_conj(alg, value(b, a)));
  return out;
}

LinOperator LinOperator::scaled(const Scalar& z) const {
  LinOperator out = *this;
  for (auto& x : out.k_) x = x * z;
  return out;
}

SBFunction LinOperator::apply(const SBFunction& v) const {
  if (v.res() != basis_.res() || v.dim() != basis_.n) throw Error("vector lives on another basis");
  SBFunction out(v.field(), v.dim(), v.res(), v.algebra());
  mpq_class vol = pow_q(basis_.fp.p, -static_cast<long>(basis_.S) * basis_.n);
  const SpectralAlgebra* alg = alg_.get();
  for (std::size_t c = 0; c < nc_; ++c) {
    CoeffVec acc(static_cast<std::size_t>(v.ncoeff()), Scalar::zero(basis_.fp.backend));
    for (std::size_t c2 = 0; c2 < nc_; ++c2) {
      CoeffVec kv = value(c, c2);
      if (coeff_is_zero(kv)) continue;
      CoeffVec pv = v.value(c2);
      if (coeff_is_zero(pv)) continue;
      CoeffVec pr = m_ == 1 && v.ncoeff() == 1 ? CoeffVec{kv[0] * pv[0]} : coeff_mul(alg, kv, pv);
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += pr[k];
    }
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] = acc[k].scaled(vol);
    out.set_value(c, acc);
  }
  return out;
}

Scalar LinOperator::trace() const {
  if (m_ != 1) throw Error("trace: scalar operators only");
  Scalar acc = Scalar::zero(basis_.fp.backend);
  for (std::size_t c = 0; c < nc_; ++c) acc += at(c, c);
  return acc.scaled(pow_q(basis_.fp.p, -static_cast<long>(basis_.S) * basis_.n));
}

Scalar LinOperator::hs_norm_sq() const {
  if (m_ != 1) throw Error("hs_norm_sq: scalar operators only");
  Scalar acc = Scalar::zero(basis_.fp.backend);
  for (std::size_t i = 0; i < k_.size(); ++i) acc += k_[i].abs2();
  return acc.scaled(pow_q(basis_.fp.p, -2L * basis_.S * basis_.n));
}

double LinOperator::op_norm() const {
  Eigen::MatrixXcd M = op_to_eigen(*this);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M.adjoint() * M);
  double lam = es.eigenvalues().maxCoeff();
  return lam > 0 ? std::sqrt(lam) : 0.0;
}

bool LinOperator::equals(const LinOperator& o, double tol) const {
  if (!(basis_ == o.basis_) || m_ != o.m_) return false;
  for (std::size_t i = 0; i < k_.size(); ++i)
    if (tol == 0.0 ? !(k_[i] == o.k_[i]) : !Scalar::close(k_[i], o.k_[i], tol)) return false;
  return true;
}

SBFunction LinOperator::kernel_function() const {
  SBFunction K(basis_.fp, 2 * basis_.n, basis_.res(), alg_);
  CellGrid g = basis_.grid();
  std::vector<long> dg(static_cast<std::size_t>(2 * basis_.n));
  for (std::size_t c = 0; c < nc_; ++c) {
    auto dx = g.cell_digits(c);
    for (std::size_t c2 = 0; c2 < nc_; ++c2) {
      auto dy = g.cell_digits(c2);
      for (int i = 0; i < basis_.n; ++i) {
        dg[static_cast<std::size_t>(i)] = dx[static_cast<std::size_t>(i)];
        dg[static_cast<std::size_t>(basis_.n + i)] = dy[static_cast<std::size_t>(i)];
      }
      K.set_value(K.index_of(dg), value(c, c2));
    }
  }
  return K;
}

LinOperator LinOperator::from_monomial(const MonomialOp& u) {
  LinOperator out(u.basis);
  mpq_class psn = pow_q(u.basis.fp.p, static_cast<long>(u.basis.S) * u.basis.n);
  for (std::size_t c = 0; c < u.src.size(); ++c) out.at(c, u.src[c]) = u.phase[c].scaled(psn);
  return out;
}

LinOperator LinOperator::rank_one(const SBFunction& u, const SBFunction& v) {
  CellBasis b{u.field(), u.dim(), u.res().r, u.res().s};
  LinOperator out(b);
  for (std::size_t c = 0; c < u.ncells(); ++c) {
    if (u.at(c).is_zero()) continue;
    for (std::size_t c2 = 0; c2 < v.ncells(); ++c2)
      out.at(c, c2) = u.at(c) * v.at(c2).conj();
  }
  return out;
}

MonomialOp schrodinger(const ThetaParam& theta, const GridPoint& X, SchrodingerKind kind,
                       const CellBasis& basis) {
  if (theta.zero) throw Error("the Schroedinger representation needs theta != 0");
  const FieldParams& fp = basis.fp;
  CellGrid grid = basis.grid();
  MonomialOp op{basis, std::vector<std::size_t>(grid.ncells()),
                std::vector<Scalar>(grid.ncells(), Scalar::one(fp.backend))};
  if (kind == SchrodingerKind::Sigma) {
    for (std::size_t c = 0; c < grid.ncells(); ++c) {
      auto y = grid.cell_coords(c);
      for (auto& yi : y) yi = -yi;
      auto idx = grid.locate(y);
      if (!idx) throw Error("parity escaped the grid");
      op.src[c] = *idx;
    }
    return op;
  }
  basis.require_point(theta, X);
  auto Xc = X.coords();
  int d = basis.n;
  mpq_class thinv = 1 / theta.value();
  CycCtx ctx{fp.p, fp.M};
  for (std::size_t c = 0; c < grid.ncells(); ++c) {
    auto y = grid.cell_coords(c);
    // phase psi(theta^{-1} <xi, y - x/2>)
    mpq_class arg = 0;
    std::vector<mpq_class> sh(y.size());
    for (int i = 0; i < d; ++i) {
      arg += Xc[static_cast<std::size_t>(d + i)] *
             (y[static_cast<std::size_t>(i)] - Xc[static_cast<std::size_t>(i)] / 2);
      sh[static_cast<std::size_t>(i)] =
          y[static_cast<std::size_t>(i)] - Xc[static_cast<std::size_t>(i)];
    }
    auto idx = grid.locate(sh);
    if (!idx) throw Error("translation escaped the grid");
    op.src[c] = *idx;
    op.phase[c] = Scalar::from_root(fp.backend, ctx, psi0(fp.p, fp.M, thinv * arg));
  }
  if (kind == SchrodingerKind::U) return op;
  // Omega_theta(X) = U Sigma U^*
  MonomialOp sg = schrodinger(theta, GridPoint(fp.p, 2 * d, Resolution{0, 0}),
                              SchrodingerKind::Sigma, basis);
  return op.compose(sg).compose(op.adjoint());
}

CellBasis min_basis_for(const FieldParams& fp, Resolution symbol_res, const ThetaParam& theta) {
  if (theta.zero) throw Error("no quantization at theta = 0");
  long t = theta.val();
  int R = std::max<long>(symbol_res.r, symbol_res.s - t);
  int S = std::max<long>(symbol_res.s, symbol_res.r + t);
  return CellBasis{fp, fp.d, R, S};
}

LinOperator quantize(const SBFunction& F, const ThetaParam& theta,
                     std::optional<CellBasis> basis) {
  const FieldParams& fp = F.field();
  if (F.dim() != 2 * fp.d) throw Error("symbols live on k^{2d}");
  if (theta.zero) throw Error("no quantization at theta = 0");
  long t = theta.val();
  CellBasis b = basis ? *basis : min_basis_for(fp, F.res(), theta);
  int needR = std::max<long>(F.res().r, F.res().s - t);
  int needS = std::max<long>(F.res().s, F.res().r + t);
  if (b.R < needR || b.S < needS)
    throw ResolutionError("basis too coarse for this symbol and theta", needR, needS);

  int d = fp.d;
  std::vector<int> zaxes(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) zaxes[static_cast<std::size_t>(i)] = d + i;
  SBFunction F2 = fourier_axes(F, zaxes, false);

  LinOperator out(b, F.algebra());
  CellGrid grid = b.grid();
  mpq_class tv = theta.value();
  mpq_class absthinv(pow_p(fp.p, static_cast<int>(t)));  // |theta|^{-d}, d-fold below
  mpq_class scale = 1;
  for (int i = 0; i < d; ++i) scale *= absthinv;
  std::vector<mpq_class> wz(static_cast<std::size_t>(2 * d));
  for (std::size_t c = 0; c < grid.ncells(); ++c) {
    auto x = grid.cell_coords(c);
    for (std::size_t c2 = 0; c2 < grid.ncells(); ++c2) {
      auto y = grid.cell_coords(c2);
      for (int i = 0; i < d; ++i) {
        wz[static_cast<std::size_t>(i)] = (x[static_cast<std::size_t>(i)] + y[static_cast<std::size_t>(i)]) / 2;
        wz[static_cast<std::size_t>(d + i)] =
            (x[static_cast<std::size_t>(i)] - y[static_cast<std::size_t>(i)]) / tv;
      }
      CoeffVec v = F2.eval(wz);
      if (coeff_is_zero(v)) continue;
      for (auto& s : v) s = s.scaled(scale);
      out.set_value(c, c2, v);
    }
  }
  return out;
}

SBFunction symbol_of(const LinOperator& T, const ThetaParam& theta) {
  if (theta.zero) throw Error("no symbol map at theta = 0");
  const CellBasis& b = T.basis();
  const FieldParams& fp = b.fp;
  long t = theta.val();
  int d = b.n;
  Resolution wres{b.R, b.S};
  Resolution zres{b.R + static_cast<int>(t), b.S - static_cast<int>(t)};
  Resolution uni{std::max(wres.r, zres.r), std::max(wres.s, zres.s)};
  SBFunction H(fp, 2 * d, uni, T.algebra());
  CellGrid wgrid(fp.p, d, wres), zgrid(fp.p, d, zres), bgrid = b.grid();
  mpq_class tv = theta.value();
  mpq_class absth(1, pow_p(fp.p, static_cast<int>(t) * d));  // |theta|^d
  std::vector<mpq_class> xv(static_cast<std::size_t>(d)), yv(static_cast<std::size_t>(d));
  for (std::size_t c = 0; c < H.ncells(); ++c) {
    auto wz = H.cell_point(c).coords();
    std::vector<mpq_class> w(wz.begin(), wz.begin() + d), z(wz.begin() + d, wz.end());
    if (!wgrid.locate(w) || !zgrid.locate(z)) continue;
    for (int i = 0; i < d; ++i) {
      xv[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] + tv * z[static_cast<std::size_t>(i)] / 2;
      yv[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] - tv * z[static_cast<std::size_t>(i)] / 2;
    }
    auto cx = bgrid.locate(xv), cy = bgrid.locate(yv);
    if (!cx || !cy) continue;
    CoeffVec v = T.value(*cx, *cy);
    for (auto& s : v) s = s.scaled(absth);
    H.set_value(c, v);
  }
  std::vector<int> zaxes(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) zaxes[static_cast<std::size_t>(i)] = d + i;
  return fourier_axes(H, zaxes, true);
}

SBFunction moyal_star(const SBFunction& f, const SBFunction& g, const ThetaParam& theta,
                      MoyalMode mode) {
  const FieldParams& fp = f.field();
  if (theta.zero) {
    if (mode == MoyalMode::via_operators)
      throw Error("no quantization at theta = 0; use the direct mode");
    return f.mul(g);
  }
  if (mode == MoyalMode::via_operators) {
    Resolution joint = f.res().refined(g.res());
    CellBasis b = min_basis_for(fp, joint, theta);
    LinOperator A = quantize(f, theta, b), B = quantize(g, theta, b);
    return symbol_of(A.compose(B), theta);
  }
  long t = theta.val();
  int r = std::max(f.res().r, g.res().r);
  int s = std::max({f.res().s, g.res().s, r + static_cast<int>(t)});
  // the product spreads to the kernel support, not just the joint support
  int rOut = std::max<long>(r, s - t);
  SBFunction fr = f.refined(Resolution{r, s}), gr = g.refined(Resolution{r, s});
  SBFunction out(fp, f.dim(), Resolution{rOut, s}, f.algebra());
  mpq_class inv2th = -mpq_class(2) / theta.value();  // conj Psi(2/theta .) = Psi(-2/theta .)
  CycCtx ctx{fp.p, fp.M};
  mpq_class vol2 = fr.cell_volume_rat() * gr.cell_volume_rat();
  mpq_class scale(pow_p(fp.p, static_cast<int>(2 * t * fp.d)));  // |2/theta|^{2d}
  const SpectralAlgebra* alg = f.algebra().get();
  int m = f.ncoeff();
  std::size_t N = fr.ncells();
  std::vector<std::vector<mpq_class>> pts(N);
  for (std::size_t c = 0; c < N; ++c) pts[c] = fr.cell_point(c).coords();
  for (std::size_t cx = 0; cx < out.ncells(); ++cx) {
    auto Xc = out.cell_point(cx).coords();
    CoeffVec acc(static_cast<std::size_t>(m), Scalar::zero(fp.backend));
    for (std::size_t cy = 0; cy < N; ++cy) {
      CoeffVec v1 = fr.value(cy);
      if (coeff_is_zero(v1)) continue;
      std::vector<mpq_class> dy(pts[cy].size());
      for (std::size_t i = 0; i < dy.size(); ++i) dy[i] = pts[cy][i] - Xc[i];
      for (std::size_t cz = 0; cz < N; ++cz) {
        CoeffVec v2 = gr.value(cz);
        if (coeff_is_zero(v2)) continue;
        std::vector<mpq_class> dz(pts[cz].size());
        for (std::size_t i = 0; i < dz.size(); ++i) dz[i] = pts[cz][i] - Xc[i];
        Scalar ph = Scalar::from_root(fp.backend, ctx,
                                      psi0(fp.p, fp.M, inv2th * sympl_pair_rat(dy, dz)));
        CoeffVec pr = coeff_mul(alg, v1, v2);
        for (int k = 0; k < m; ++k)
          acc[static_cast<std::size_t>(k)] += pr[static_cast<std::size_t>(k)] * ph;
      }
    }
    for (int k = 0; k < m; ++k)
      acc[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].scaled(vol2 * scale);
    out.set_value(cx, acc);
  }
  return out;
}

SBFunction vacuum_vector(const CellBasis& basis) {
  if (basis.R < 0) throw Error("vacuum needs a basis containing the unit ball");
  SBFunction v(basis.fp, basis.n, basis.res());
  for (std::size_t c = 0; c < v.ncells(); ++c)
    if (v.cell_point(c).abs_sup() <= PowerOfP::one()) v.at(c) = Scalar::one(basis.fp.backend);
  return v;
}

SBFunction coherent(const ThetaParam& theta, const GridPoint& X, const CellBasis& basis) {
  return schrodinger(theta, X, SchrodingerKind::U, basis).apply(vacuum_vector(basis));
}

SBFunction wigner(const FieldParams& fp, const ThetaParam& theta, const GridPoint& X,
                  const GridPoint& Y) {
  if (theta.zero) throw Error("Wigner functions need theta != 0");
  int rW = std::max({0, sup_exp(X), sup_exp(Y)});
  long t = theta.val();
  int sW = static_cast<int>(t) + rW;
  CellBasis b{fp, fp.d, rW, sW};
  SBFunction ex = coherent(theta, X, b), ey = coherent(theta, Y, b);
  SBFunction W(fp, 2 * fp.d, Resolution{rW, sW});
  for (std::size_t c = 0; c < W.ncells(); ++c) {
    GridPoint Z = W.cell_point(c);
    MonomialOp om = schrodinger(theta, Z, SchrodingerKind::OmegaPoint, b);
    W.at(c) = ex.inner(om.apply(ey))[0];
  }
  return W;
}

Scalar wigner_point(const FieldParams& fp, const ThetaParam& theta, const GridPoint& X,
                    const GridPoint& Y, const GridPoint& Z) {
  if (theta.zero) throw Error("Wigner functions need theta != 0");
  int rW = std::max({0, sup_exp(X), sup_exp(Y), sup_exp(Z)});
  long t = theta.val();
  CellBasis b{fp, fp.d, rW, static_cast<int>(t) + rW};
  SBFunction ex = coherent(theta, X, b), ey = coherent(theta, Y, b);
  MonomialOp om = schrodinger(theta, Z, SchrodingerKind::OmegaPoint, b);
  return ex.inner(om.apply(ey))[0];
}

std::pair<Scalar, Scalar> reproducing_check(const SBFunction& phi, const SBFunction& psi,
                                            const ThetaParam& theta) {
  const FieldParams& fp = phi.field();
  if (theta.zero) throw Error("reproducing formula needs theta != 0");
  long t = theta.val();
  int rstar = std::max({phi.res().r, psi.res().r, phi.res().s - static_cast<int>(t),
                        psi.res().s - static_cast<int>(t), 0});
  int sstar = std::max({phi.res().s, psi.res().s, static_cast<int>(t) + rstar});
  CellBasis b{fp, phi.dim(), rstar, sstar};
  SBFunction ph = phi.refined(b.res()), ps = psi.refined(b.res());
  Scalar lhs = ph.inner(ps)[0];
  CellGrid xgrid(fp.p, 2 * phi.dim(), Resolution{rstar, sstar});
  Scalar acc = Scalar::zero(fp.backend);
  mpq_class vol = pow_q(fp.p, -static_cast<long>(sstar) * 2 * phi.dim());
  for (std::size_t c = 0; c < xgrid.ncells(); ++c) {
    GridPoint X = xgrid.cell_point(c);
    SBFunction ex = coherent(theta, X, b);
    acc += ph.inner(ex)[0] * ex.inner(ps)[0];
  }
  mpq_class absthinv(pow_p(fp.p, static_cast<int>(t) * phi.dim()));  // |theta|^{-d}
  Scalar rhs = acc.scaled(vol * absthinv);
  return {lhs, rhs};
}

CvResult cv_check(const SBFunction& F, const ThetaParam& theta) {
  const FieldParams& fp = F.field();
  long N = 2 * fp.d + 1;
  SBFunction JF = apply_J(F, N);
  double rhs = mu0_weight_l1(fp.p, fp.d, static_cast<int>(N)).get_d() * JF.linf();
  double lhs = quantize(F, theta).op_norm();
  return {lhs, rhs};
}

}  // namespace ultraweyl
