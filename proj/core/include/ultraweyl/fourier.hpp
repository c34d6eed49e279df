#pragma once

#include "ultraweyl/bruhat.hpp"

namespace ultraweyl {

/// A finite sum  Sigma_j Psi_{P_j} (x) a_j  of global phase functions
/// Psi_P(X) = Psi(2[X,P]) with coefficients in a finite-dimensional
/// *-algebra (or plain scalars). These are the computable bounded locally
/// constant functions of spectral type.
struct LocallyConstantSpec {
  FieldParams fp;
  std::shared_ptr<const SpectralAlgebra> alg;  // null => scalar coefficients
  std::vector<RatPoint> weights;               // pairwise distinct exact points
  std::vector<CoeffVec> coeffs;

  int ncoeff() const;
  void check() const;
  /// Pointwise value mu0(X)^mu_power * F(X). (The operator I does not
  /// preserve spectral form; this closure is its pointwise realization.)
  CoeffVec eval(const std::vector<mpq_class>& X, long mu_power = 0) const;
};

/// Self-dual Fourier transform, all axes: out(xi) = Int f(x) Psi(<x,xi>) dx,
/// inverse uses Psi(-<x,xi>). Resolution (r,s) -> (s,r). Exact on both
/// backends (closed-form cell integrals).
SBFunction fourier(const SBFunction& f, bool inverse);

/// Partial transform over a subset of axes (used by the quantization kernel).
SBFunction fourier_axes(const SBFunction& f, const std::vector<int>& axes, bool inverse);

/// Radix-p fast path; bit-identical to fourier on the exact backend.
SBFunction fft_fast(const SBFunction& f, bool inverse);

/// Symplectic transform Gf(X) = |2|^d Int f(Y) Psi(2[Y,X]) dY on k^{2d};
/// an involution.
SBFunction symplectic_G(const SBFunction& f, bool use_fft = true);

/// Shared engine for G and its rescalings: kernel Psi(q p^{-texp} [Y,X])
/// with q a rational unit; used by the twisted-group transform G_theta.
SBFunction symplectic_scaled(const SBFunction& f, const mpq_class& unit, int texp,
                             bool use_fft = true);

/// I^m: pointwise multiplication by mu0^m.
SBFunction apply_I(const SBFunction& f, long m);

/// I_theta^m: pointwise multiplication by mu0(theta X)^m; identity at theta=0.
SBFunction apply_I_theta(const SBFunction& f, long m, const ThetaParam& theta);

/// J^n = (G I G)^n and J_theta^n = (G I_theta G)^n; theta absent -> J.
SBFunction apply_J(const SBFunction& f, long n);
SBFunction apply_J_theta(const SBFunction& f, long n, const ThetaParam& theta);

/// <G(mu0^n), psi> = Int mu0^n * G(psi), for psi supported in Z_p^{2d}.
CoeffVec gmu_pair(long n, const SBFunction& psi);

/// J^n F (X) for a bounded locally constant F, realized through the
/// compactly supported pairing: <G(mu0^n), W -> F(X-W) 1_O(W)>.
CoeffVec pointwise_J(const LocallyConstantSpec& F, long n, const RatPoint& X);
CoeffVec pointwise_J(const SBFunction& F, long n, const RatPoint& X);

}  // namespace ultraweyl
