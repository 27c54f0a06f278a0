#pragma once

#include <cstdint>
#include <random>

#include "kslab/matrix_core.hpp"

namespace kslab {

// Seeded generator that can be split into independent child streams. Each
// top-level call owns one Rng; workers receive split(i) so results do not
// depend on scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  Rng split(std::uint64_t stream) const;

  double normal();
  double uniform();  // [0, 1)
  std::uint64_t next();

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t x);

// Entries i.i.d. (N(0,1) + i N(0,1)) / sqrt(2).
ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng);
ComplexMatrix ginibre_unit(Eigen::Index rows, Eigen::Index cols, Rng& rng);
ComplexVector random_unit_vector(Eigen::Index n, Rng& rng);
ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng);
ComplexMatrix haar_unitary(Eigen::Index n, Rng& rng);
// rows x cols matrix with orthonormal columns, Haar distributed.
ComplexMatrix haar_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng);

}  // namespace kslab
