#include "qmw/fock.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace qmw {

std::size_t ModeListHash::operator()(const ModeList& modes) const noexcept {
  std::size_t h = 1469598103934665603ull;
  for (auto m : modes) {
    h ^= m + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  }
  return h;
}

FockBasis::FockBasis(std::size_t num_modes, int max_particles, std::vector<ModeList> states)
    : num_modes_(num_modes), max_particles_(max_particles), states_(std::move(states)) {
  index_.reserve(states_.size());
  stratum_start_.assign(static_cast<std::size_t>(max_particles_) + 2, states_.size());
  for (std::size_t i = 0; i < states_.size(); ++i) {
    index_.emplace(states_[i], i);
    const auto n = states_[i].size();
    stratum_start_[n] = std::min(stratum_start_[n], i);
  }
  for (int n = max_particles_; n >= 0; --n)
    stratum_start_[static_cast<std::size_t>(n)] =
        std::min(stratum_start_[static_cast<std::size_t>(n)], stratum_start_[static_cast<std::size_t>(n) + 1]);
}

std::optional<std::size_t> FockBasis::index(const ModeList& modes) const {
  auto it = index_.find(modes);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::pair<std::size_t, std::size_t> FockBasis::stratum(int particles) const {
  if (particles < 0 || particles > max_particles_) return {0, 0};
  return {stratum_start_[static_cast<std::size_t>(particles)], stratum_start_[static_cast<std::size_t>(particles) + 1]};
}

std::uint32_t FockBasis::occupation(std::size_t i, std::uint32_t mode) const {
  const auto& s = states_[i];
  return static_cast<std::uint32_t>(std::count(s.begin(), s.end(), mode));
}

std::size_t basis_size(std::size_t num_modes, int max_particles) {
  constexpr auto cap = std::numeric_limits<std::size_t>::max();
  std::size_t total = 0;
  std::size_t term = 1;  // C(K + j - 1, j)
  for (int j = 0; j <= max_particles; ++j) {
    if (j > 0) {
      const std::size_t num = num_modes + static_cast<std::size_t>(j) - 1;
      if (term > cap / std::max<std::size_t>(num, 1)) return cap;
      term = term * num / static_cast<std::size_t>(j);
    }
    if (total > cap - term) return cap;
    total += term;
  }
  return total;
}

std::size_t basis_memory_estimate(std::size_t num_modes, int max_particles) {
  const std::size_t n = basis_size(num_modes, max_particles);
  // mode list + hash node + sector row (d doubles for d <= 4) + npart
  const std::size_t per_state = 2 * sizeof(ModeList) + static_cast<std::size_t>(max_particles) * 8 + 64 + 40;
  if (n > std::numeric_limits<std::size_t>::max() / per_state) return std::numeric_limits<std::size_t>::max();
  return n * per_state;
}

FockBasis enumerate_basis(std::size_t num_modes, int max_particles, std::size_t memory_budget) {
  if (max_particles < 1) throw BasisError("enumerate_basis: N_max must be >= 1");
  if (num_modes == 0) throw BasisError("enumerate_basis: no modes");
  const std::size_t estimate = basis_memory_estimate(num_modes, max_particles);
  if (estimate > memory_budget) {
    throw BasisError("enumerate_basis: basis of " + std::to_string(basis_size(num_modes, max_particles)) +
                     " states needs about " + std::to_string(estimate) + " bytes, over the budget of " +
                     std::to_string(memory_budget) + " bytes");
  }

  std::vector<ModeList> states;
  states.reserve(basis_size(num_modes, max_particles));
  states.emplace_back();
  // Non-decreasing mode lists of length j in lexicographic order.
  for (int j = 1; j <= max_particles; ++j) {
    ModeList cur(static_cast<std::size_t>(j), 0);
    while (true) {
      states.push_back(cur);
      int pos = j - 1;
      while (pos >= 0 && cur[static_cast<std::size_t>(pos)] + 1 == num_modes) --pos;
      if (pos < 0) break;
      const auto next = cur[static_cast<std::size_t>(pos)] + 1;
      for (int t = pos; t < j; ++t) cur[static_cast<std::size_t>(t)] = next;
    }
  }
  return FockBasis(num_modes, max_particles, std::move(states));
}

SectorTable sector_table(const FockBasis& basis, const RealMatrix& mode_momenta) {
  if (static_cast<std::size_t>(mode_momenta.rows()) != basis.num_modes())
    throw BasisError("sector_table: mode momenta do not match the basis");
  SectorTable t;
  t.q = RealMatrix::Zero(static_cast<Eigen::Index>(basis.size()), mode_momenta.cols());
  t.npart.resize(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto& s = basis.state(i);
    for (auto k : s) t.q.row(static_cast<Eigen::Index>(i)) += mode_momenta.row(k);
    t.npart[i] = static_cast<int>(s.size());
  }
  return t;
}

SectorTable sector_table(const FockBasis& basis, const MomentumGrid& grid) {
  return sector_table(basis, grid.covariant_momenta());
}

FockSpace make_fock_space(const LatticeSpec& spec, int max_particles, std::size_t memory_budget) {
  auto grid = build_grid(spec);
  auto basis = enumerate_basis(grid.num_modes(), max_particles, memory_budget);
  auto sectors = sector_table(basis, grid);
  return FockSpace{std::move(grid), std::move(basis), std::move(sectors)};
}

}  // namespace qmw
