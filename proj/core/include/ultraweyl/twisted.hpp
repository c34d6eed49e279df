#pragma once

#include "ultraweyl/weyl.hpp"

namespace ultraweyl {

/// Weyl operator V_X^theta f(Y) = conj(Psi)((2/theta)[X,Y]) f(X+Y) on a cell
/// basis of L^2(Q_p^{2d}); unitary and monomial at adequate resolution.
MonomialOp weyl_V(const ThetaParam& theta, const GridPoint& X, const CellBasis& basis);

/// V_f = Int f(X) V_X dX as a dense operator (exact finite sum).
LinOperator v_of_f(const SBFunction& f, const ThetaParam& theta, const CellBasis& basis);

/// Twisted convolution f1 *_theta f2 (X) =
/// Int f1(X-Y) f2(Y) conj(Psi)((2/theta)[Y,X]) dY.
SBFunction twisted_conv(const SBFunction& f1, const SBFunction& f2, const ThetaParam& theta);

/// Rescaled symplectic transform
/// G_theta f(X) = |2/theta|^d Int Psi((2/theta)[Y,X]) f(Y) dY; an involution
/// intertwining *_theta with the Moyal product.
SBFunction g_theta(const SBFunction& f, const ThetaParam& theta);

/// Pi_theta = G o S_theta o G with S_theta f(X) = alpha_{theta X}(f(X)),
/// for spectral-algebra-valued f; invertible with inverse Pi_{-theta}.
SBFunction pi_map(const SBFunction& f, const ThetaParam& theta);

/// pi(f) xi (Y) = Int alpha_Y(f(X)) xi(Y+X) dX.
SBFunction pi_plain(const SBFunction& f, const SBFunction& xi);

/// pi_theta(f) xi = Int alpha-bar(f(X)) *_theta (tau_X xi) dX, via the
/// closed-form spectral star product.
SBFunction pi_deformed(const SBFunction& f, const SBFunction& xi, const ThetaParam& theta);

}  // namespace ultraweyl
