#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "qmw/lattice.hpp"

namespace qmw {

class BasisError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kDefaultMemoryBudget = std::size_t{2} << 30;  // 2 GiB

using ModeList = std::vector<std::uint32_t>;

struct ModeListHash {
  std::size_t operator()(const ModeList& modes) const noexcept;
};

/// Occupation-number basis of the bosonic Fock space truncated at total
/// particle number N_max.
///
/// A state is stored as its non-decreasing list of occupied mode indices, so
/// the occupation n_k is the multiplicity of k. Ordering: ascending particle
/// number, then lexicographic in the mode list. State 0 is the vacuum.
///
/// Truncating by total particle number is exact for every operator of the
/// form sum h_kk' a^dagger_k a_k': such operators map each particle-number
/// stratum into itself, so their matrices over this basis are exact
/// restrictions of the untruncated operators. Every coordinate, velocity and
/// momentum operator in this library has that form.
class FockBasis {
 public:
  FockBasis(std::size_t num_modes, int max_particles, std::vector<ModeList> states);

  std::size_t size() const { return states_.size(); }
  std::size_t num_modes() const { return num_modes_; }
  int max_particles() const { return max_particles_; }

  const ModeList& state(std::size_t i) const { return states_[i]; }
  const std::vector<ModeList>& states() const { return states_; }
  std::optional<std::size_t> index(const ModeList& modes) const;

  /// Half-open range of basis positions with exactly `particles` particles.
  std::pair<std::size_t, std::size_t> stratum(int particles) const;

  std::uint32_t occupation(std::size_t i, std::uint32_t mode) const;

 private:
  std::size_t num_modes_;
  int max_particles_;
  std::vector<ModeList> states_;
  std::unordered_map<ModeList, std::size_t, ModeListHash> index_;
  std::vector<std::size_t> stratum_start_;
};

/// Number of basis states, sum_{j<=N_max} C(K + j - 1, j). Saturates on overflow.
std::size_t basis_size(std::size_t num_modes, int max_particles);

/// Rough resident size of an enumerated basis, used for the memory budget.
std::size_t basis_memory_estimate(std::size_t num_modes, int max_particles);

FockBasis enumerate_basis(std::size_t num_modes, int max_particles,
                          std::size_t memory_budget = kDefaultMemoryBudget);

/// Joint eigenvalues of the covariant momenta P_mu on every basis state.
struct SectorTable {
  RealMatrix q;             ///< size x d; q(i, 0) = energy sum, q(i, j) = momentum sum
  std::vector<int> npart;

  int dim() const { return static_cast<int>(q.cols()); }
};

/// `mode_momenta` is K x d with rows (omega_k, p_k). Sums run in mode-list order.
SectorTable sector_table(const FockBasis& basis, const RealMatrix& mode_momenta);
SectorTable sector_table(const FockBasis& basis, const MomentumGrid& grid);

/// Grid, basis and sector table of one truncated instance.
struct FockSpace {
  MomentumGrid grid;
  FockBasis basis;
  SectorTable sectors;
};

FockSpace make_fock_space(const LatticeSpec& spec, int max_particles,
                          std::size_t memory_budget = kDefaultMemoryBudget);

}  // namespace qmw
