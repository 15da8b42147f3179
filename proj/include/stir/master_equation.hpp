#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stir/config.hpp"
#include "stir/linalg.hpp"
#include "stir/params.hpp"

namespace stir {

// Exact finite-state oracle for small N.  The generator is assembled from the
// very transition rules the simulators execute (the single-copy clock alphabet
// or the coupled mark alphabet), so a rate mismatch between oracle and
// simulation is structurally impossible.
class MasterEquation {
 public:
  // 2^(2N+1) states.  Throws StateSpaceTooLarge above the guard.
  static MasterEquation single(const ModelParams& p, std::size_t guard = 20000);
  // 3^(2N+1) states of the coupled chain.
  static MasterEquation coupled(const ModelParams& p, std::size_t guard = 20000);

  std::size_t dim() const { return dim_; }
  bool is_coupled() const { return coupled_; }
  const ModelParams& params() const { return params_; }
  const Matrix& generator() const { return gen_; }

  // Unique stationary vector: adjoint null space with sum = 1, verified to
  // ||mu G||_inf < 1e-10.
  const std::vector<double>& stationary() const;

  std::vector<double> point_mass(std::size_t idx) const;
  std::vector<double> point_mass(const Configuration& c) const;
  std::vector<double> point_mass(const CoupledConfiguration& c) const;

  // Law at the given times starting from row vector p0 (matrix exponential,
  // stepped along the grid).
  std::vector<std::vector<double>> evolve_distribution(const std::vector<double>& p0,
                                                       std::span<const double> times) const;

  // Decay of sum_eta |p_t(eta) - stationary(eta)| on a time grid.
  std::vector<double> tv_decay(const std::vector<double>& p0,
                               std::span<const double> times) const;

  // Smallest nonzero decay rate of the generator.
  double spectral_gap() const;

  std::size_t index_of(const Configuration& c) const;
  std::size_t index_of(const CoupledConfiguration& c) const;
  Configuration single_config_of(std::size_t idx) const;
  CoupledConfiguration coupled_config_of(std::size_t idx) const;

  // P[eta(x) = 1] per site under `dist` (single chain).
  std::vector<double> site_marginals(const std::vector<double>& dist) const;
  // P[copy's eta(x) = 1] per site (coupled chain), copy in {1, 2}.
  std::vector<double> copy_site_marginals(const std::vector<double>& dist, int copy) const;
  // P[site x disagrees] per site (coupled chain).
  std::vector<double> diff_site_marginals(const std::vector<double>& dist) const;

 private:
  MasterEquation() = default;

  ModelParams params_;
  bool coupled_ = false;
  std::size_t dim_ = 0;
  Matrix gen_;
  mutable std::vector<double> stationary_;
};

}  // namespace stir
