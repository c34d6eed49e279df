#pragma once

#include <memory>
#include <string>
#include <vector>

#include "ultraweyl/bruhat.hpp"
#include "ultraweyl/fourier.hpp"

namespace ultraweyl {

/// A finite-dimensional *-algebra with a spectral action of k^{2d}:
/// alpha_X(a_j) = Psi(2[X, P_j]) a_j. Weight additivity (c_{jk}^l != 0
/// implies P_l = P_j + P_k) makes alpha_X an algebra map; the involution
/// flips weights. A faithful matrix representation pins the C*-norm.
struct SpectralAlgebra {
  FieldParams fp;
  std::vector<std::string> labels;
  std::vector<RatPoint> weights;  // P_j in the k^{2d} grid, exact points

  struct Triple {
    int j, k, l;
    Scalar c;
  };
  std::vector<Triple> constants;  // a_j a_k = sum_l c_{jk}^l a_l

  std::vector<int> inv_perm;      // a_j^* = inv_phase[j] * a_{inv_perm[j]}
  std::vector<Scalar> inv_phase;  // unimodular

  int repdim = 0;
  std::vector<std::vector<Scalar>> rep;  // rho(a_j), row-major repdim x repdim

  int dim() const { return static_cast<int>(weights.size()); }

  CoeffVec zero_coeff() const { return CoeffVec(dim(), Scalar::zero(fp.backend)); }
  CoeffVec basis_coeff(int j) const;
  CoeffVec mul_coeff(const CoeffVec& a, const CoeffVec& b) const;
  CoeffVec conj_coeff(const CoeffVec& a) const;
  /// alpha_X applied to coordinates (exact phases).
  CoeffVec act(const RatPoint& X, const CoeffVec& a) const;

  std::vector<Scalar> rep_matrix(const CoeffVec& a) const;  // row-major repdim^2
  double rep_op_norm(const CoeffVec& a) const;

  /// mu0(P_j) as integers p^e (weights are exact points, mu0 >= 1).
  PowerOfP weight_mu0(int j) const {
    return mu0_rat(fp.p, weights[static_cast<std::size_t>(j)]);
  }

  // --- builders ---
  /// Full matrix-unit algebra M_k with weight(e_{uv}) = w_u - w_v.
  static std::shared_ptr<SpectralAlgebra> matrix_units(const FieldParams& fp, int k,
                                                       const std::vector<RatPoint>& w);
  /// M_k with all weights zero (trivial action): plain matrix-valued symbols.
  static std::shared_ptr<SpectralAlgebra> matrix_trivial(const FieldParams& fp, int k);
  /// Deterministic random matrix-unit algebra (k in 2..3, random weights).
  static std::shared_ptr<SpectralAlgebra> random(const FieldParams& fp, std::uint64_t seed,
                                                 int max_weight_exp = 1);

  void finalize();  // builds product lookup; call after filling fields

 private:
  std::vector<std::vector<std::pair<int, Scalar>>> table_;  // (j*m+k) -> [(l, c)]
};

/// Structured validation outcome; `ok` iff no issue was found.
struct ValidationReport {
  bool ok = true;
  std::vector<std::string> issues;
  void fail(const std::string& msg) {
    ok = false;
    issues.push_back(msg);
  }
};

/// Checks weight additivity, involution/weight flip, *-representation
/// consistency (exact backend), faithfulness, and samples alpha_X as a
/// *-automorphism.
ValidationReport validate(const SpectralAlgebra& A);

/// The theta-twisted algebra: same carrier, twisted structure constants
/// c'_{jk}^l = Psi(2 theta [P_j, P_k]) c_{jk}^l, untouched involution,
/// and the deformed C*-norm table.
struct DeformedAlgebra {
  std::shared_ptr<const SpectralAlgebra> base;
  ThetaParam theta;
  std::vector<SpectralAlgebra::Triple> twisted;
  std::vector<double> basis_norms;  // deformed C*-norm of each basis element
  double sum_probe_norm = 0.0;      // norm of a_1 + ... + a_m (plateau probe)

  CoeffVec star(const CoeffVec& a, const CoeffVec& b) const;
  Scalar twist_phase(int j, int k) const;  // Psi(2 theta [P_j,P_k])
};

DeformedAlgebra deform_sc(std::shared_ptr<const SpectralAlgebra> A, const ThetaParam& theta,
                          bool with_norms = true);

/// Deformed C*-norm of an element via the left regular GNS representation
/// of the twisted algebra (float).
double deformed_norm(const DeformedAlgebra& D, const CoeffVec& a);

enum class StarSide { left, right };

/// Closed-form star product of a spectral-type bounded function against a
/// Schwartz-Bruhat function:
///   (Psi_P (x) a) *_theta g = Psi_P * (a . g(. + theta P)),
///   g *_theta (Psi_P (x) a) = Psi_P * (g(. - theta P) . a).
SBFunction char_star(const LocallyConstantSpec& F, const SBFunction& g, const ThetaParam& theta,
                     StarSide side);

/// f *_theta g for Schwartz-Bruhat f, g computed through the weighted
/// oscillatory form (J_theta / J factors and mu0^{-N} weights, finite exact
/// cell sums); N < 0 selects the default 2d+1.
SBFunction translation_model(const SBFunction& f, const SBFunction& g, const ThetaParam& theta,
                             long N = -1);

/// ||a||_n = || sum_j mu0(P_j)^n a_j ||_A  (the action is isometric, so the
/// sup over the phase orbit is attained everywhere).
double seminorm(const SpectralAlgebra& A, const CoeffVec& a, long n);

/// alpha_phi(a) = Int phi(X) alpha_X(a) dX, exact via closed-form cell
/// integrals of characters.
CoeffVec smoothing(const SpectralAlgebra& A, const CoeffVec& a, const SBFunction& phi);

enum class OscRegularizer { none, exponential };

/// Truncated oscillatory integral for one basis pair: the scalar factor
/// I_{jk} ~ Psi(2 theta [P_j,P_k]) with a rigorous tail bound.
struct OscPairResult {
  Scalar value;         // exact (none) or float (exponential regularizer)
  mpq_class tail;       // |exact - truncated| <= tail, exact rational
};
OscPairResult osc_oracle_pair(const SpectralAlgebra& A, int j, int k, const ThetaParam& theta,
                              long N, int T, OscRegularizer reg = OscRegularizer::none,
                              double reg_scale = 0.0);
/// Same truncated integral by literal cell enumeration (small T only).
Scalar osc_oracle_pair_brute(const SpectralAlgebra& A, int j, int k, const ThetaParam& theta,
                             long N, int T);

/// Element-level oracle: a *_theta b evaluated through the truncated
/// oscillatory integral; tail is a bound on the representation norm of the
/// error.
struct OscResult {
  CoeffVec value;
  double tail = 0.0;
};
OscResult osc_oracle(const SpectralAlgebra& A, const CoeffVec& a, const CoeffVec& b,
                     const ThetaParam& theta, long N, int T,
                     OscRegularizer reg = OscRegularizer::none, double reg_scale = 0.0);

/// Stage law (A_theta)_theta' = A_{theta+theta'} plus deformed-norm report.
struct StageReport {
  bool stage_exact = false;         // twisted constants compose exactly
  bool roundtrip_exact = false;     // theta' = -theta returns the original
  std::vector<double> findim_norms; // per basis element, theta-deformed
  double findim_sum_norm = 0.0;
  std::vector<double> module_norms; // truncated L_theta norms (if requested)
  double module_sum_norm = 0.0;
  double max_gap = 0.0;             // relative gap findim vs module
};
StageReport stage_and_norm(const std::shared_ptr<const SpectralAlgebra>& A,
                           const ThetaParam& theta, const ThetaParam& theta2,
                           bool with_module_norm = false, int module_radius = 3);

/// Truncated module operator norm of L_theta(alpha-bar(a)) acting on the
/// column module over the box |X| <= p^radius (power iteration, float).
double module_norm_truncated(const SpectralAlgebra& A, const CoeffVec& a, const ThetaParam& theta,
                             int radius);

}  // namespace ultraweyl
