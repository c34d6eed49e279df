#pragma once

#include <utility>

#include "ultraweyl/deform.hpp"
#include "ultraweyl/fourier.hpp"

namespace ultraweyl {

/// Orthonormal cell basis of L^2(Q_p^n): e_c = p^{Sn/2} 1_{c + p^S Z_p^n}
/// over the grid p^{-R}Z_p^n / p^S Z_p^n. Vectors are represented as cell
/// tables (SBFunction values), not e_c coefficients, so every quantity in
/// sight stays rational.
struct CellBasis {
  FieldParams fp;
  int n = 1;
  int R = 0;
  int S = 0;

  CellGrid grid() const { return CellGrid(fp.p, n, Resolution{R, S}); }
  Resolution res() const { return Resolution{R, S}; }
  std::size_t ncells() const { return grid().ncells(); }
  bool operator==(const CellBasis&) const = default;

  /// Checks that x shifts cells to cells and the U_theta phase is
  /// cell-constant; throws ResolutionError otherwise.
  void require_point(const ThetaParam& theta, const GridPoint& X) const;
};

/// Permutation-with-phases operator on a cell basis:
/// (T v)(c) = phase[c] * v(src[c]).
struct MonomialOp {
  CellBasis basis;
  std::vector<std::size_t> src;
  std::vector<Scalar> phase;

  SBFunction apply(const SBFunction& v) const;
  MonomialOp compose(const MonomialOp& o) const;
  MonomialOp adjoint() const;  // valid for unitary monomials
};

/// Dense operator stored as its kernel table K(c, c'); the action is
/// (T v)(c) = sum_{c'} K(c,c') v(c') p^{-Sn}. Coefficients may take values
/// in a spectral algebra (block operators).
class LinOperator {
 public:
  LinOperator(const CellBasis& basis, std::shared_ptr<const SpectralAlgebra> alg = nullptr);

  const CellBasis& basis() const { return basis_; }
  int ncoeff() const { return m_; }
  const std::shared_ptr<const SpectralAlgebra>& algebra() const { return alg_; }
  std::size_t dim() const { return nc_; }

  Scalar& at(std::size_t c, std::size_t c2, int k = 0) { return k_[(c * nc_ + c2) * m_ + k]; }
  const Scalar& at(std::size_t c, std::size_t c2, int k = 0) const {
    return k_[(c * nc_ + c2) * m_ + k];
  }
  CoeffVec value(std::size_t c, std::size_t c2) const;
  void set_value(std::size_t c, std::size_t c2, const CoeffVec& v);

  LinOperator compose(const LinOperator& o) const;
  LinOperator add(const LinOperator& o) const;
  LinOperator sub(const LinOperator& o) const;
  LinOperator adjoint() const;
  LinOperator scaled(const Scalar& z) const;
  SBFunction apply(const SBFunction& v) const;

  Scalar trace() const;       // scalar coefficients
  Scalar hs_norm_sq() const;  // scalar coefficients, exact
  double op_norm() const;     // float (rep-expanded for algebra values)
  bool equals(const LinOperator& o, double tol = 0.0) const;
  /// The kernel as a function on Q_p^{2n}; lets operators on different
  /// bases be compared through SBFunction refinement.
  SBFunction kernel_function() const;

  static LinOperator from_monomial(const MonomialOp& u);
  /// |u><v| : K(c,c') = u(c) conj(v(c')).
  static LinOperator rank_one(const SBFunction& u, const SBFunction& v);

 private:
  CellBasis basis_;
  std::shared_ptr<const SpectralAlgebra> alg_;
  int m_;
  std::size_t nc_;
  std::vector<Scalar> k_;
};

enum class SchrodingerKind { U, Sigma, OmegaPoint };

/// The projective Schroedinger representation U_theta(X), the parity Sigma,
/// and Omega_theta(X) = U Sigma U^* as monomial operators on a cell basis.
MonomialOp schrodinger(const ThetaParam& theta, const GridPoint& X, SchrodingerKind kind,
                       const CellBasis& basis);

/// Minimal adequate basis for quantizing symbols of the given resolution.
CellBasis min_basis_for(const FieldParams& fp, Resolution symbol_res, const ThetaParam& theta);

/// Weyl quantization of a symbol on k^{2d} (scalar- or algebra-valued):
/// kernel K(x,y) = |theta|^{-d} (F2 F)((x+y)/2, theta^{-1}(x-y)).
LinOperator quantize(const SBFunction& F, const ThetaParam& theta,
                     std::optional<CellBasis> basis = std::nullopt);

/// Inverse of quantize (exact on compatible inputs).
SBFunction symbol_of(const LinOperator& T, const ThetaParam& theta);

enum class MoyalMode { direct, via_operators };

/// Moyal product; theta = 0 is the pointwise product (direct mode only).
SBFunction moyal_star(const SBFunction& f, const SBFunction& g, const ThetaParam& theta,
                      MoyalMode mode = MoyalMode::via_operators);

/// Normalized indicator of Z_p^d as a vector of the basis.
SBFunction vacuum_vector(const CellBasis& basis);
/// Coherent state U_theta(X) eta.
SBFunction coherent(const ThetaParam& theta, const GridPoint& X, const CellBasis& basis);

/// Wigner matrix coefficient W_{X,Y}(Z) = <eta_X, Omega_theta(Z) eta_Y>
/// as an SB function of Z (exact).
SBFunction wigner(const FieldParams& fp, const ThetaParam& theta, const GridPoint& X,
                  const GridPoint& Y);
/// Pointwise value for a single Z.
Scalar wigner_point(const FieldParams& fp, const ThetaParam& theta, const GridPoint& X,
                    const GridPoint& Y, const GridPoint& Z);

/// Both sides of the reproducing formula
/// <phi, psi> = |theta|^{-d} Int <phi, eta_X><eta_X, psi> dX.
std::pair<Scalar, Scalar> reproducing_check(const SBFunction& phi, const SBFunction& psi,
                                            const ThetaParam& theta);

/// lhs = ||quantize(F)||_op, rhs = ||mu0^{-2d-1}||_1 * ||J^{2d+1} F||_inf.
struct CvResult {
  double lhs;
  double rhs;
};
CvResult cv_check(const SBFunction& F, const ThetaParam& theta);

}  // namespace ultraweyl
