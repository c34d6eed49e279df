#include "doctest.h"
#include "ultraweyl/twisted.hpp"
#include "ultraweyl/weyl.hpp"

using namespace ultraweyl;

namespace {
const FieldParams fp3{3, 1, 6, Backend::exact};
const CycCtx ctx{3, 6};

GridPoint pt(std::initializer_list<mpq_class> xs) {
  return GridPoint::from_rationals(3, std::vector<mpq_class>(xs));
}

Scalar phase_of(const mpq_class& arg) {
  return Scalar::from_root(Backend::exact, ctx, psi0(3, 6, arg));
}

const ThetaParam th1 = ThetaParam::make(3, 0, 1);
const ThetaParam th3 = ThetaParam::make(3, 1, 1);
}  // namespace

TEST_CASE("schrodinger representation is monomial and unitary") {
  CellBasis b{fp3, 1, 1, 1};
  auto X = pt({mpq_class(1, 3), mpq_class(1, 3)});
  auto U = schrodinger(th1, X, SchrodingerKind::U, b);
  auto Uo = LinOperator::from_monomial(U);
  auto id = Uo.compose(LinOperator::from_monomial(U.adjoint()));
  auto ido = LinOperator::from_monomial(
      schrodinger(th1, GridPoint(3, 2, {0, 0}), SchrodingerKind::U, b));
  CHECK(id.equals(ido));  // U U^* = U(0) = identity
  // Sigma^2 = 1
  auto Sg = schrodinger(th1, GridPoint(3, 2, {0, 0}), SchrodingerKind::Sigma, b);
  auto S2 = Sg.compose(Sg);
  CHECK(LinOperator::from_monomial(S2).equals(ido));
  // OmegaPoint is a selfadjoint involution
  auto Om = schrodinger(th1, X, SchrodingerKind::OmegaPoint, b);
  CHECK(LinOperator::from_monomial(Om.compose(Om)).equals(ido));
  CHECK(LinOperator::from_monomial(Om).adjoint().equals(LinOperator::from_monomial(Om)));
}

TEST_CASE("cocycle relation against the monomial product oracle") {
  // U(X)U(Y) = Psi([X,Y]/(2 theta)) U(X+Y) on an 81-cell basis
  CellBasis b{fp3, 1, 2, 2};
  auto X = pt({mpq_class(1, 3), 0});
  auto Y = pt({0, mpq_class(1, 3)});
  for (const auto& th : {th1, th3}) {
    auto UX = schrodinger(th, X, SchrodingerKind::U, b);
    auto UY = schrodinger(th, Y, SchrodingerKind::U, b);
    auto UXY = schrodinger(th, X.add(Y), SchrodingerKind::U, b);
    auto lhs = LinOperator::from_monomial(UX.compose(UY));
    mpq_class c = sympl_pair(X, Y) / (2 * th.value());
    auto rhs = LinOperator::from_monomial(UXY).scaled(phase_of(c));
    CHECK(lhs.equals(rhs));
  }
  // resolution adequacy is enforced, naming the needed basis
  CellBasis tiny{fp3, 1, 0, 0};
  CHECK_THROWS_AS(schrodinger(th1, X, SchrodingerKind::U, tiny), ResolutionError);
}

TEST_CASE("quantize 1_O is the vacuum projector (kernel oracle)") {
  auto F = SBFunction::indicator(fp3, {0, 0}, 0).refined(Resolution{1, 1});
  auto T = quantize(F, th1);
  // oracle: K(x,y) = 1_{Z_p}(x) 1_{Z_p}(y)
  auto eta = vacuum_vector(T.basis());
  auto R = LinOperator::rank_one(eta, eta);
  CHECK(T.equals(R));
  CHECK(T.trace() == Scalar::one(Backend::exact));
  CHECK(std::abs(T.op_norm() - 1.0) < 1e-9);
}

TEST_CASE("quantization unitarity in squared form") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    auto F = SBFunction::random(fp3, 2, Resolution{1, 1}, seed);
    auto T = quantize(F, th1);
    CHECK(T.hs_norm_sq() == F.l2sq());  // |theta| = 1
    auto T3 = quantize(F, th3);
    // ||Omega_theta(F)||_HS^2 * |theta|^d = ||F||_2^2
    CHECK(T3.hs_norm_sq().scaled(mpq_class(1, 3)) == F.l2sq());
  }
  // U_theta(X) has HS norm^2 = dim of the basis
  CellBasis b{fp3, 1, 1, 1};
  auto U = LinOperator::from_monomial(
      schrodinger(th1, pt({mpq_class(1, 3), mpq_class(2, 3)}), SchrodingerKind::U, b));
  mpq_class q;
  CHECK(U.hs_norm_sq().rational_value(q));
  CHECK(q == 9);
}

TEST_CASE("symbol inverts quantize, both directions") {
  for (const auto& th : {th1, th3}) {
    auto F = SBFunction::random(fp3, 2, Resolution{1, 1}, 42);
    auto T = quantize(F, th);
    CHECK(symbol_of(T, th).equals(F));
    // quantize(symbol(T)) = T as kernels (bases may differ in size)
    auto T2 = quantize(symbol_of(T, th), th);
    CHECK(T2.kernel_function().equals(T.kernel_function()));
  }
  // adjoints match involutions
  auto F = SBFunction::random(fp3, 2, Resolution{1, 1}, 43);
  CHECK(quantize(F.conj_involution(), th1).equals(quantize(F, th1).adjoint()));
}

TEST_CASE("resolution inadequacy is loud") {
  auto F = SBFunction::random(fp3, 2, Resolution{1, 1}, 3);
  auto th9 = ThetaParam::make(3, 2, 1);
  CellBasis coarse{fp3, 1, 1, 1};
  try {
    quantize(F, th9, coarse);
    CHECK(false);
  } catch (const ResolutionError& e) {
    CHECK(e.required_r == 1);
    CHECK(e.required_s == 3);
  }
}

TEST_CASE("moyal product: idempotent indicator and theta=0 limit") {
  auto one = SBFunction::indicator(fp3, {0, 0}, 0).refined(Resolution{1, 1});
  auto prod = moyal_star(one, one, th1, MoyalMode::via_operators);
  CHECK(prod.equals(one));
  auto f = SBFunction::random(fp3, 2, Resolution{1, 1}, 7);
  auto g = SBFunction::random(fp3, 2, Resolution{1, 1}, 8);
  CHECK(moyal_star(f, g, ThetaParam::zero_value(3), MoyalMode::direct).equals(f.mul(g)));
  CHECK_THROWS_AS(moyal_star(f, g, ThetaParam::zero_value(3), MoyalMode::via_operators), Error);
}

TEST_CASE("moyal product: direct mode equals the operator mode") {
  for (const auto& th : {th1, th3}) {
    auto f = SBFunction::random(fp3, 2, Resolution{0, 1}, 70 + th.t);
    auto g = SBFunction::random(fp3, 2, Resolution{0, 1}, 80 + th.t);
    auto dir = moyal_star(f, g, th, MoyalMode::direct);
    auto via = moyal_star(f, g, th, MoyalMode::via_operators);
    CHECK(dir.equals(via));
  }
  auto f = SBFunction::random(fp3, 2, Resolution{1, 1}, 71);
  auto g = SBFunction::random(fp3, 2, Resolution{1, 1}, 81);
  CHECK(moyal_star(f, g, th1, MoyalMode::direct)
            .equals(moyal_star(f, g, th1, MoyalMode::via_operators)));
}

TEST_CASE("star involution and homomorphism") {
  auto f = SBFunction::random(fp3, 2, Resolution{1, 1}, 17);
  auto g = SBFunction::random(fp3, 2, Resolution{1, 1}, 18);
  auto fg = moyal_star(f, g, th1);
  // (f * g)^* = g^* * f^*
  CHECK(fg.conj_involution().equals(
      moyal_star(g.conj_involution(), f.conj_involution(), th1)));
  // quantize(f * g) = quantize(f) quantize(g)
  Resolution joint = f.res().refined(g.res());
  CellBasis b = min_basis_for(fp3, joint, th1);
  auto lhs = quantize(fg, th1, b);
  auto rhs = quantize(f, th1, b).compose(quantize(g, th1, b));
  CHECK(lhs.equals(rhs));
}

TEST_CASE("covariance under the Schroedinger translations") {
  auto F = SBFunction::random(fp3, 2, Resolution{1, 1}, 23);
  auto Y = pt({mpq_class(1, 3), mpq_class(2, 3)});
  auto T = quantize(F, th1);
  auto U = schrodinger(th1, Y, SchrodingerKind::U, T.basis());
  auto lhs = LinOperator::from_monomial(U).compose(T).compose(
      LinOperator::from_monomial(U.adjoint()));
  // tau_{-Y} F (X) = F(X - Y)
  auto Yc = Y.coords();
  auto tauF = F.translate({-Yc[0], -Yc[1]});
  auto rhs = quantize(tauF, th1, T.basis());
  CHECK(lhs.equals(rhs));
}

TEST_CASE("L1 bound on the operator norm") {
  for (std::uint64_t seed : {2, 9}) {
    auto F = SBFunction::random(fp3, 2, Resolution{1, 1}, seed);
    auto T = quantize(F, th1);
    CHECK(T.op_norm() <= F.norm_l1() + 1e-9);
  }
}

TEST_CASE("wigner modulus is the predicted indicator") {
  auto X = pt({mpq_class(1, 3), 0});
  auto Y = pt({0, mpq_class(1, 3)});
  for (const auto& th : {th1, th3}) {
    auto W = wigner(fp3, th, X, Y);
    mpq_class tv = th.value();
    for (std::size_t c = 0; c < W.ncells(); ++c) {
      auto Z = W.cell_point(c).coords();
      auto Xc = X.coords(), Yc = Y.coords();
      // Z_theta - (X_theta + Y_theta)/2 in Z_p^2 ?
      std::vector<mpq_class> arg = {Z[0] - (Xc[0] + Yc[0]) / 2,
                                    (Z[1] - (Xc[1] + Yc[1]) / 2) / tv};
      bool inside = mu0_rat(3, arg) == PowerOfP::one();
      mpq_class m2;
      CHECK(W.at(c).abs2().rational_value(m2));
      CHECK(m2 == (inside ? 1 : 0));
    }
  }
}

TEST_CASE("wigner eigenrelation under I and J") {
  auto X = pt({mpq_class(1, 3), 0});
  auto Y = pt({0, mpq_class(1, 3)});
  auto W = wigner(fp3, th1, X, Y);
  auto lhs = apply_I(apply_J(W, 1), 1);
  auto Xc = X.coords(), Yc = Y.coords();
  std::vector<mpq_class> half = {(Xc[0] + Yc[0]) / 2, (Xc[1] + Yc[1]) / 2};
  std::vector<mpq_class> dif = {(Xc[0] - Yc[0]) / 2, (Xc[1] - Yc[1]) / 2};
  mpq_class factor =
      (mu0_rat(3, half) * mu0_rat(3, dif)).to_rational(3);
  CHECK(lhs.equals(W.scaled_rat(factor)));
  // W(0) at X = Y = 0 equals 1: eta is even
  auto W0 = wigner(fp3, th1, GridPoint(3, 2, {0, 0}), GridPoint(3, 2, {0, 0}));
  CHECK(W0.eval_scalar({0, 0}) == Scalar::one(Backend::exact));
}

TEST_CASE("quantized wigner functions are rank one with kappa = 1") {
  auto X = pt({mpq_class(1, 3), 0});
  auto Y = pt({0, mpq_class(1, 3)});
  for (const auto& th : {th1, th3}) {
    auto W = wigner(fp3, th, X, Y);
    auto T = quantize(W, th);
    CellBasis b = T.basis();
    auto ex = coherent(th, X, b), ey = coherent(th, Y, b);
    // the measured regression constant: quantize(W_{X,Y}) = |eta_Y><eta_X|
    auto R = LinOperator::rank_one(ey, ex);
    CHECK(T.equals(R));
  }
}

TEST_CASE("reproducing formula") {
  CellBasis b{fp3, 1, 1, 1};
  auto eta = vacuum_vector(b);
  auto pr0 = reproducing_check(eta, eta, th1);
  CHECK(pr0.first == Scalar::one(Backend::exact));
  CHECK(pr0.first == pr0.second);
  // disjoint supports
  auto a = SBFunction::indicator(fp3, {0}, 1).refined(Resolution{1, 1});
  auto c = SBFunction::indicator(fp3, {mpq_class(-1)}, 1).refined(Resolution{1, 1});
  auto pr1 = reproducing_check(a, c, th1);
  CHECK(pr1.first.is_zero());
  CHECK(pr1.second.is_zero());
  for (std::uint64_t seed : {3, 4}) {
    auto phi = SBFunction::random(fp3, 1, Resolution{1, 1}, seed);
    auto psi = SBFunction::random(fp3, 1, Resolution{1, 1}, seed + 50);
    auto pr = reproducing_check(phi, psi, th1);
    CHECK(pr.first == pr.second);
    auto pr3 = reproducing_check(phi, psi, th3);
    CHECK(pr3.first == pr3.second);
  }
}

TEST_CASE("Calderon-Vaillancourt bound") {
  // flagship value: F = 1_{Z_3^2}, theta = 1: lhs = 1, rhs = 13/9
  auto one = SBFunction::indicator(fp3, {0, 0}, 0).refined(Resolution{1, 1});
  auto cv = cv_check(one, th1);
  CHECK(std::abs(cv.lhs - 1.0) < 1e-9);
  CHECK(std::abs(cv.rhs - 13.0 / 9.0) < 1e-12);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto F = SBFunction::random(fp3, 2, Resolution{1, 1}, seed);
    auto r = cv_check(F, th1);
    CHECK(r.lhs <= r.rhs + 1e-9);
    // rhs does not depend on theta
    auto r3 = cv_check(F, th3);
    CHECK(std::abs(r.rhs - r3.rhs) < 1e-12);
    CHECK(r3.lhs <= r3.rhs + 1e-9);
  }
}

TEST_CASE("CV bound for matrix-valued symbols") {
  auto A = SpectralAlgebra::matrix_trivial(fp3, 2);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    auto F = SBFunction::random(fp3, 2, Resolution{1, 1}, seed, A);
    auto r = cv_check(F, th1);
    CHECK(r.lhs <= r.rhs + 1e-9);
  }
  // block quantization agrees with the direct integral sum Omega(X) (x) f(X)
  auto F = SBFunction::random(fp3, 2, Resolution{0, 1}, 5, A);
  auto T = quantize(F, th1);
  CellBasis b = T.basis();
  // oracle: |2/theta|^d sum_cells vol * Omega_theta(X) tensor f(X)
  LinOperator oracle(b, A);
  mpq_class vol = F.cell_volume_rat();
  for (std::size_t c = 0; c < F.ncells(); ++c) {
    auto fX = F.value(c);
    if (coeff_is_zero(fX)) continue;
    auto Om = schrodinger(th1, F.cell_point(c), SchrodingerKind::OmegaPoint, b);
    auto OmL = LinOperator::from_monomial(Om);
    for (std::size_t i = 0; i < oracle.dim(); ++i)
      for (std::size_t j = 0; j < oracle.dim(); ++j) {
        if (OmL.at(i, j).is_zero()) continue;
        auto cur = oracle.value(i, j);
        for (int k = 0; k < A->dim(); ++k)
          cur[static_cast<std::size_t>(k)] +=
              OmL.at(i, j) * fX[static_cast<std::size_t>(k)].scaled(vol);
        oracle.set_value(i, j, cur);
      }
  }
  CHECK(T.equals(oracle));
}
