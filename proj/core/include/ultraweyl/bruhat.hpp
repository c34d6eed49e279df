#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "ultraweyl/padic.hpp"
#include "ultraweyl/scalar.hpp"

namespace ultraweyl {

struct SpectralAlgebra;

/// Coefficient of one cell: a scalar (size 1) or coordinates over the basis
/// of a declared finite-dimensional *-algebra.
using CoeffVec = std::vector<Scalar>;

/// Indexing of the cells of p^{-r}Z_p^n / p^s Z_p^n: linear index =
/// coordinate-major mixed radix over per-axis digit words a in [0, p^{r+s}).
class CellGrid {
 public:
  CellGrid(long p, int n, Resolution res);
  long p() const { return p_; }
  int dim() const { return n_; }
  Resolution res() const { return res_; }
  long axis_cells() const { return axis_; }
  std::size_t ncells() const { return ncells_; }

  std::vector<long> cell_digits(std::size_t idx) const;
  std::size_t index_of(const std::vector<long>& digits) const;
  GridPoint cell_point(std::size_t idx) const;
  std::vector<mpq_class> cell_coords(std::size_t idx) const;
  std::optional<std::size_t> locate(const std::vector<mpq_class>& xs) const;

  bool operator==(const CellGrid&) const = default;

 private:
  long p_;
  int n_;
  Resolution res_;
  long axis_;
  std::size_t ncells_;
};

/// A Schwartz-Bruhat function on Q_p^n: a finite table over the cells of
/// p^{-r}Z_p^n / p^s Z_p^n. Immutable in spirit; operations return copies.
class SBFunction {
 public:
  SBFunction(const FieldParams& fp, int n, Resolution res,
             std::shared_ptr<const SpectralAlgebra> alg = nullptr);

  // --- constructors for the standard objects ---
  /// Indicator of the ball c + p^m Z_p^n at its minimal exact resolution.
  static SBFunction indicator(const FieldParams& fp, const std::vector<mpq_class>& center,
                              int m);
  /// Psi_Y(X) = Psi(2[X,Y]) restricted to the ball p^{-B} Z_p^{2d}.
  static SBFunction character_window(const FieldParams& fp, const RatPoint& Y, int B);
  /// Deterministic pseudo-random table (sparse roots of unity times small
  /// rationals); reproducible across runs and platforms.
  static SBFunction random(const FieldParams& fp, int n, Resolution res, std::uint64_t seed,
                           std::shared_ptr<const SpectralAlgebra> alg = nullptr);

  // --- geometry ---
  const FieldParams& field() const { return fp_; }
  int dim() const { return n_; }
  Resolution res() const { return res_; }
  const CellGrid& grid() const { return grid_; }
  long axis_cells() const { return grid_.axis_cells(); }
  std::size_t ncells() const { return grid_.ncells(); }
  int ncoeff() const { return m_; }
  const std::shared_ptr<const SpectralAlgebra>& algebra() const { return alg_; }
  CycCtx cyc_ctx() const { return CycCtx{fp_.p, fp_.M}; }

  GridPoint cell_point(std::size_t idx) const { return grid_.cell_point(idx); }
  std::vector<long> cell_digits(std::size_t idx) const { return grid_.cell_digits(idx); }
  std::size_t index_of(const std::vector<long>& digits) const { return grid_.index_of(digits); }
  std::optional<std::size_t> locate(const std::vector<mpq_class>& xs) const {
    return grid_.locate(xs);
  }

  // --- data access ---
  Scalar& at(std::size_t cell, int k = 0) { return v_[cell * m_ + k]; }
  const Scalar& at(std::size_t cell, int k = 0) const { return v_[cell * m_ + k]; }
  CoeffVec value(std::size_t cell) const;
  void set_value(std::size_t cell, const CoeffVec& v);
  CoeffVec eval(const std::vector<mpq_class>& xs) const;  // zero outside support
  Scalar eval_scalar(const std::vector<mpq_class>& xs) const;

  // --- resolution management ---
  SBFunction refined(Resolution target) const;
  SBFunction coarsened(Resolution target) const;  // throws if not cell-constant

  // --- pointwise algebra ---
  SBFunction add(const SBFunction& g) const;
  SBFunction sub(const SBFunction& g) const;
  SBFunction mul(const SBFunction& g) const;  // algebra product when coefficients are algebra-valued
  SBFunction conj_involution() const;
  SBFunction scaled(const Scalar& c) const;
  SBFunction scaled_rat(const mpq_class& q) const;
  SBFunction map(const std::function<Scalar(const Scalar&)>& f) const;

  // --- translation / dilation ---
  SBFunction translate(const std::vector<mpq_class>& Y) const;  // tau_Y f(X) = f(X+Y)
  SBFunction dilate(const mpq_class& gamma) const;              // D_gamma f(X) = f(gamma X)

  // --- integrals and norms ---
  mpq_class cell_volume_rat() const;  // p^{-s n}
  CoeffVec integral() const;
  CoeffVec inner(const SBFunction& g) const;  // conjugate-linear in *this
  Scalar l2sq() const;                        // scalar-valued only
  double norm_l1() const;
  double linf() const;

  bool equals(const SBFunction& g, double tol = 0.0) const;
  bool is_zero() const;

 private:
  FieldParams fp_;
  int n_;
  Resolution res_;
  CellGrid grid_;
  std::shared_ptr<const SpectralAlgebra> alg_;
  int m_;
  std::vector<Scalar> v_;
};

/// Coefficient-space helpers (scalar or structure-constant product).
CoeffVec coeff_add(const CoeffVec& a, const CoeffVec& b);
CoeffVec coeff_mul(const SpectralAlgebra* alg, const CoeffVec& a, const CoeffVec& b);
CoeffVec coeff_conj(const SpectralAlgebra* alg, const CoeffVec& a);
CoeffVec coeff_scaled(const CoeffVec& a, const Scalar& c);
bool coeff_is_zero(const CoeffVec& a);
double coeff_norm(const SpectralAlgebra* alg, const CoeffVec& a);  // |.| or rep operator norm

}  // namespace ultraweyl
