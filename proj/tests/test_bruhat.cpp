#include "doctest.h"
#include "ultraweyl/bruhat.hpp"
#include "ultraweyl/deform.hpp"

using namespace ultraweyl;

namespace {
const FieldParams fp3{3, 1, 4, Backend::exact};
}

TEST_CASE("indicator construction at minimal resolution") {
  auto f = SBFunction::indicator(fp3, {0}, 0);  // 1_{Z_3}
  CHECK(f.res() == Resolution{0, 0});
  CHECK(f.ncells() == 1);
  CHECK(f.at(0) == Scalar::one(Backend::exact));

  auto g = SBFunction::indicator(fp3, {0}, 1);  // 1_{3 Z_3}
  CHECK(g.res() == Resolution{-1, 1});
  CHECK(g.ncells() == 1);

  auto h = SBFunction::indicator(fp3, {-1}, 1);  // 1_{-1 + 3 Z_3}
  CHECK(h.res() == Resolution{0, 1});
  CHECK(h.eval_scalar({mpq_class(-1)}) == Scalar::one(Backend::exact));
  CHECK(h.eval_scalar({mpq_class(0)}).is_zero());
  CHECK(h.eval_scalar({mpq_class(5)}) == Scalar::one(Backend::exact));  // 5 = -1 + 6
}

TEST_CASE("character window") {
  RatPoint Y = {mpq_class(1, 3), 0};
  auto w = SBFunction::character_window(fp3, Y, 0);
  CHECK(w.res() == Resolution{0, 1});
  CHECK(w.ncells() == 9);
  // cell-by-cell psi0 oracle
  for (std::size_t c = 0; c < w.ncells(); ++c) {
    auto X = w.cell_point(c).coords();
    auto expect = Scalar::from_root(Backend::exact, CycCtx{3, 4},
                                    psi0(3, 4, 2 * sympl_pair_rat(X, Y)));
    CHECK(w.at(c) == expect);
  }
}

TEST_CASE("random tables are reproducible") {
  auto f = SBFunction::random(fp3, 2, Resolution{1, 1}, 7);
  auto g = SBFunction::random(fp3, 2, Resolution{1, 1}, 7);
  auto h = SBFunction::random(fp3, 2, Resolution{1, 1}, 8);
  CHECK(f.equals(g));
  CHECK(!f.equals(h));
}

TEST_CASE("refine and coarsen round trip") {
  auto f = SBFunction::indicator(fp3, {0}, 0);
  auto r = f.refined(Resolution{0, 1});
  CHECK(r.ncells() == 3);
  for (std::size_t c = 0; c < 3; ++c) CHECK(r.at(c) == Scalar::one(Backend::exact));
  auto back = r.coarsened(Resolution{0, 0});
  CHECK(back.equals(f));
  // a character window with nontrivial phases cannot be coarsened
  RatPoint Y = {mpq_class(1, 3), 0};
  auto w = SBFunction::character_window(fp3, Y, 0);
  CHECK_THROWS_AS(w.coarsened(Resolution{0, 0}), Error);
}

TEST_CASE("evaluation is invariant under refinement") {
  auto f = SBFunction::random(fp3, 2, Resolution{1, 1}, 11);
  auto r = f.refined(Resolution{2, 2});
  for (std::size_t c = 0; c < f.ncells(); ++c) {
    auto xs = f.cell_point(c).coords();
    CHECK(f.eval(xs)[0] == r.eval(xs)[0]);
  }
}

TEST_CASE("pointwise algebra") {
  auto one = SBFunction::indicator(fp3, {0, 0}, 0);
  CHECK(one.mul(one).equals(one));
  auto f = SBFunction::random(fp3, 2, Resolution{1, 1}, 3);
  CHECK(f.add(f.scaled_rat(mpq_class(-1))).is_zero());
  // conjugation negates window phases
  RatPoint Y = {mpq_class(1, 3), 0};
  auto w = SBFunction::character_window(fp3, Y, 0);
  auto wc = w.conj_involution();
  for (std::size_t c = 0; c < w.ncells(); ++c) CHECK(wc.at(c) == w.at(c).conj());
}

TEST_CASE("translation and dilation") {
  auto f = SBFunction::indicator(fp3, {0}, 0);  // 1_{Z_3}
  auto t0 = f.translate({mpq_class(0)});
  CHECK(t0.equals(f));
  // D_p 1_{Z_p} = 1_{p^{-1} Z_p}
  auto dp = f.dilate(mpq_class(3));
  CHECK(dp.res().r == 1);
  CHECK(dp.eval_scalar({mpq_class(1, 3)}) == Scalar::one(Backend::exact));
  CHECK(dp.eval_scalar({mpq_class(1, 9)}).is_zero());
  // tau_{1/3} 1_{Z_3} = 1_{-1/3 + Z_3}
  auto tr = f.translate({mpq_class(1, 3)});
  CHECK(tr.eval_scalar({mpq_class(-1, 3)}) == Scalar::one(Backend::exact));
  CHECK(tr.eval_scalar({mpq_class(0)}).is_zero());
}

TEST_CASE("integration and norms") {
  auto f = SBFunction::indicator(fp3, {0, 0}, 0);
  CHECK(f.integral()[0] == Scalar::one(Backend::exact));  // Vol(Z_p^2) = 1
  auto g = SBFunction::indicator(fp3, {0}, 1);            // 1_{3Z_3}
  mpq_class q;
  CHECK(g.integral()[0].rational_value(q));
  CHECK(q == mpq_class(1, 3));
  // disjoint supports pair to zero
  auto a = SBFunction::indicator(fp3, {0}, 1);
  auto b = SBFunction::indicator(fp3, {-1}, 1);
  CHECK(a.inner(b)[0].is_zero());
  // ||f||_2^2 == <f, f> exactly
  auto r = SBFunction::random(fp3, 2, Resolution{1, 1}, 9);
  CHECK(r.l2sq() == r.inner(r)[0]);
}

TEST_CASE("Haar invariance under translation and dilation") {
  auto f = SBFunction::random(fp3, 2, Resolution{1, 1}, 21);
  auto t = f.translate({mpq_class(1, 3), mpq_class(2, 9)});
  CHECK(f.integral()[0] == t.integral()[0]);
  // integral of D_gamma f = |gamma|^{-n} integral of f
  auto dgam = f.dilate(mpq_class(3));
  mpq_class scale = padic_abs(3, mpq_class(3)).pow_int(-2).to_rational(3);
  CHECK(dgam.integral()[0] == f.integral()[0].scaled(scale));
  auto dunit = f.dilate(mpq_class(2));
  CHECK(dunit.integral()[0] == f.integral()[0]);
}

TEST_CASE("algebra-valued tables multiply through the structure constants") {
  auto A = SpectralAlgebra::matrix_trivial(fp3, 2);
  auto f = SBFunction::random(fp3, 2, Resolution{0, 1}, 5, A);
  auto g = SBFunction::random(fp3, 2, Resolution{0, 1}, 6, A);
  auto h = f.mul(g);
  // compare one cell against the representation product
  auto Fm = A->rep_matrix(f.value(0));
  auto Gm = A->rep_matrix(g.value(0));
  auto Hm = A->rep_matrix(h.value(0));
  int n = A->repdim;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Scalar acc = Scalar::zero(Backend::exact);
      for (int k = 0; k < n; ++k)
        acc += Fm[static_cast<std::size_t>(i * n + k)] * Gm[static_cast<std::size_t>(k * n + j)];
      CHECK(acc == Hm[static_cast<std::size_t>(i * n + j)]);
    }
  // involution is the matrix star
  auto fc = f.conj_involution();
  auto Fc = A->rep_matrix(fc.value(0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      CHECK(Fc[static_cast<std::size_t>(i * n + j)] ==
            Fm[static_cast<std::size_t>(j * n + i)].conj());
}
