#include "ultraweyl/twisted.hpp"

#include <algorithm>

namespace ultraweyl {

namespace {
int sup_exp(const GridPoint& X) {
  PowerOfP a = X.abs_sup();
  return a.is_zero() ? 0 : static_cast<int>(std::max(0L, a.exponent()));
}
}  // namespace

MonomialOp weyl_V(const ThetaParam& theta, const GridPoint& X, const CellBasis& basis) {
  if (theta.zero) throw Error("Weyl operators need theta != 0");
  const FieldParams& fp = basis.fp;
  if (X.dim() != basis.n || basis.n != 2 * fp.d) throw Error("V_X lives on L^2(k^{2d})");
  long t = theta.val();
  int ex = sup_exp(X);
  if (ex > basis.R || ex > basis.S - t)
    throw ResolutionError("cell basis too coarse for this Weyl operator",
                          std::max(basis.R, ex), std::max<long>(basis.S, t + ex));
  CellGrid grid = basis.grid();
  MonomialOp op{basis, std::vector<std::size_t>(grid.ncells()),
                std::vector<Scalar>(grid.ncells(), Scalar::one(fp.backend))};
  auto Xc = X.coords();
  mpq_class c = -mpq_class(2) / theta.value();  // conj Psi((2/theta).) = Psi(-(2/theta).)
  CycCtx ctx{fp.p, fp.M};
  for (std::size_t cc = 0; cc < grid.ncells(); ++cc) {
    auto Y = grid.cell_coords(cc);
    std::vector<mpq_class> sh(Y.size());
    for (std::size_t i = 0; i < Y.size(); ++i) sh[i] = Xc[i] + Y[i];
    auto idx = grid.locate(sh);
    if (!idx) throw Error("Weyl translation escaped the grid");
    op.src[cc] = *idx;
    op.phase[cc] = Scalar::from_root(fp.backend, ctx,
                                     psi0(fp.p, fp.M, c * sympl_pair_rat(Xc, Y)));
  }
  return op;
}

LinOperator v_of_f(const SBFunction& f, const ThetaParam& theta, const CellBasis& basis) {
  const FieldParams& fp = basis.fp;
  LinOperator out(basis);
  mpq_class vol = f.cell_volume_rat();
  mpq_class psn = pow_q(fp.p, static_cast<long>(basis.S) * basis.n);
  for (std::size_t c = 0; c < f.ncells(); ++c) {
    if (f.at(c).is_zero()) continue;
    MonomialOp V = weyl_V(theta, f.cell_point(c), basis);
    Scalar w = f.at(c).scaled(vol * psn);
    for (std::size_t y = 0; y < V.src.size(); ++y) out.at(y, V.src[y]) += w * V.phase[y];
  }
  return out;
}

SBFunction twisted_conv(const SBFunction& f1, const SBFunction& f2, const ThetaParam& theta) {
  if (theta.zero) throw Error("twisted convolution needs theta != 0");
  const FieldParams& fp = f1.field();
  long t = theta.val();
  int r = std::max(f1.res().r, f2.res().r);
  int s = std::max({f1.res().s, f2.res().s, r + static_cast<int>(t)});
  SBFunction a = f1.refined(Resolution{r, s}), b = f2.refined(Resolution{r, s});
  SBFunction out(fp, f1.dim(), Resolution{r, s}, f1.algebra());
  mpq_class c = -mpq_class(2) / theta.value();
  CycCtx ctx{fp.p, fp.M};
  mpq_class vol = b.cell_volume_rat();
  const SpectralAlgebra* alg = f1.algebra().get();
  int m = f1.ncoeff();
  std::size_t N = a.ncells();
  std::vector<std::vector<mpq_class>> pts(N);
  for (std::size_t i = 0; i < N; ++i) pts[i] = a.cell_point(i).coords();
  std::vector<mpq_class> diff(pts[0].size());
  for (std::size_t cx = 0; cx < N; ++cx) {
    CoeffVec acc(static_cast<std::size_t>(m), Scalar::zero(fp.backend));
    for (std::size_t cy = 0; cy < N; ++cy) {
      CoeffVec v2 = b.value(cy);
      if (coeff_is_zero(v2)) continue;
      for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = pts[cx][i] - pts[cy][i];
      CoeffVec v1 = a.eval(diff);
      if (coeff_is_zero(v1)) continue;
      Scalar ph = Scalar::from_root(fp.backend, ctx,
                                    psi0(fp.p, fp.M, c * sympl_pair_rat(pts[cy], pts[cx])));
      CoeffVec pr = coeff_mul(alg, v1, v2);
      for (int k = 0; k < m; ++k)
        acc[static_cast<std::size_t>(k)] += pr[static_cast<std::size_t>(k)] * ph;
    }
    for (int k = 0; k < m; ++k)
      acc[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].scaled(vol);
    out.set_value(cx, acc);
  }
  return out;
}

SBFunction g_theta(const SBFunction& f, const ThetaParam& theta) {
  if (theta.zero) throw Error("G_theta needs theta != 0");
  long t = theta.val();
  mpq_class unit(2, theta.u);  // 2/theta = (2/u) p^{-t}
  SBFunction out = symplectic_scaled(f, unit, static_cast<int>(t));
  // |2/theta|^d scale
  return out.scaled_rat(mpq_class(pow_p(f.field().p, static_cast<int>(t) * f.field().d)));
}

SBFunction pi_map(const SBFunction& f, const ThetaParam& theta) {
  if (!f.algebra()) throw Error("Pi_theta acts on spectral-algebra-valued functions");
  const SpectralAlgebra& A = *f.algebra();
  SBFunction g = symplectic_G(f);
  if (theta.zero) return symplectic_G(g);
  // S_theta g (X) = alpha_{theta X}(g(X)); refine so the phases are
  // cell-constant
  long t = theta.val();
  int need_s = g.res().s;
  for (const auto& P : A.weights)
    need_s = std::max<long>(need_s, rat_sup_exp(A.fp.p, P) - t);
  SBFunction gs = g.refined(Resolution{g.res().r, need_s});
  // S acts by alpha_{-theta X}: this is the orientation under which the
  // dense-subspace identity pi_theta(f) = pi(Pi_theta f) holds exactly with
  // the oracle-pinned star product (see the representation tests).
  mpq_class tv = -theta.value();
  for (std::size_t c = 0; c < gs.ncells(); ++c) {
    auto X = gs.cell_point(c).coords();
    gs.set_value(c, A.act(rat_scaled(X, tv), gs.value(c)));
  }
  return symplectic_G(gs);
}

SBFunction pi_plain(const SBFunction& f, const SBFunction& xi) {
  if (!f.algebra() || f.algebra() != xi.algebra())
    throw Error("pi needs matching spectral-algebra values");
  const SpectralAlgebra& A = *f.algebra();
  const FieldParams& fp = f.field();
  int rP = 0;
  for (const auto& P : A.weights) rP = std::max(rP, rat_sup_exp(fp.p, P));
  int r = std::max(xi.res().r, f.res().r);
  int s = std::max({xi.res().s, f.res().s, rP});
  SBFunction out(fp, f.dim(), Resolution{r, s}, f.algebra());
  mpq_class vol = f.cell_volume_rat();
  int m = f.ncoeff();
  std::vector<mpq_class> arg(static_cast<std::size_t>(f.dim()));
  for (std::size_t cy = 0; cy < out.ncells(); ++cy) {
    auto Yc = out.cell_point(cy).coords();
    CoeffVec acc(static_cast<std::size_t>(m), Scalar::zero(fp.backend));
    for (std::size_t cx = 0; cx < f.ncells(); ++cx) {
      CoeffVec fv = f.value(cx);
      if (coeff_is_zero(fv)) continue;
      auto Xc = f.cell_point(cx).coords();
      for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = Yc[i] + Xc[i];
      CoeffVec xv = xi.eval(arg);
      if (coeff_is_zero(xv)) continue;
      CoeffVec pr = A.mul_coeff(A.act(Yc, fv), xv);
      for (int k = 0; k < m; ++k)
        acc[static_cast<std::size_t>(k)] += pr[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < m; ++k)
      acc[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].scaled(vol);
    out.set_value(cy, acc);
  }
  return out;
}

SBFunction pi_deformed(const SBFunction& f, const SBFunction& xi, const ThetaParam& theta) {
  if (!f.algebra() || f.algebra() != xi.algebra())
    throw Error("pi_theta needs matching spectral-algebra values");
  const SpectralAlgebra& A = *f.algebra();
  const FieldParams& fp = f.field();
  mpq_class tv = theta.value();
  int m = f.ncoeff();
  int rP = 0, rThP = 0;
  for (const auto& P : A.weights) {
    rP = std::max(rP, rat_sup_exp(fp.p, P));
    rThP = std::max(rThP, rat_sup_exp(fp.p, rat_scaled(P, tv)));
  }
  int r = std::max({xi.res().r, f.res().r, rThP});
  int s = std::max({xi.res().s, f.res().s, rP});
  SBFunction out(fp, f.dim(), Resolution{r, s}, f.algebra());
  mpq_class vol = f.cell_volume_rat();
  CycCtx ctx{fp.p, fp.M};
  std::vector<RatPoint> thP(A.weights.size());
  for (std::size_t j = 0; j < A.weights.size(); ++j) thP[j] = rat_scaled(A.weights[j], tv);
  std::vector<mpq_class> arg(static_cast<std::size_t>(f.dim()));
  for (std::size_t cy = 0; cy < out.ncells(); ++cy) {
    auto Yc = out.cell_point(cy).coords();
    CoeffVec acc(static_cast<std::size_t>(m), Scalar::zero(fp.backend));
    for (std::size_t cx = 0; cx < f.ncells(); ++cx) {
      CoeffVec fv = f.value(cx);
      if (coeff_is_zero(fv)) continue;
      auto Xc = f.cell_point(cx).coords();
      for (int j = 0; j < m; ++j) {
        if (fv[static_cast<std::size_t>(j)].is_zero()) continue;
        for (std::size_t i = 0; i < arg.size(); ++i) arg[i] = Yc[i] + thP[static_cast<std::size_t>(j)][i] + Xc[i];
        CoeffVec xv = xi.eval(arg);
        if (coeff_is_zero(xv)) continue;
        Scalar ph = Scalar::from_root(
            fp.backend, ctx,
            psi0(fp.p, fp.M,
                 2 * sympl_pair_rat(Yc, A.weights[static_cast<std::size_t>(j)])));
        CoeffVec pr = A.mul_coeff(A.basis_coeff(j), xv);
        Scalar w = fv[static_cast<std::size_t>(j)] * ph;
        for (int k = 0; k < m; ++k)
          acc[static_cast<std::size_t>(k)] += pr[static_cast<std::size_t>(k)] * w;
      }
    }
    for (int k = 0; k < m; ++k)
      acc[static_cast<std::size_t>(k)] = acc[static_cast<std::size_t>(k)].scaled(vol);
    out.set_value(cy, acc);
  }
  return out;
}

}  // namespace ultraweyl
