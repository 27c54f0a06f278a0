#include "kslab/random.hpp"

#include <cmath>

namespace kslab {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

Rng Rng::split(std::uint64_t stream) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream + 0x632be59bd9b4e019ULL)));
}

double Rng::normal() { return normal_(engine_); }
double Rng::uniform() { return uniform_(engine_); }
std::uint64_t Rng::next() { return engine_(); }

ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  ComplexMatrix g(rows, cols);
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(i, j) = Complex(s * re, s * im);
    }
  return g;
}

ComplexMatrix ginibre_unit(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  ComplexMatrix g = ginibre(rows, cols, rng);
  return g / g.norm();
}

ComplexVector random_unit_vector(Eigen::Index n, Rng& rng) {
  ComplexMatrix g = ginibre_unit(n, 1, rng);
  return g.col(0);
}

ComplexMatrix random_hermitian(Eigen::Index n, Rng& rng) {
  const ComplexMatrix g = ginibre(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

ComplexMatrix haar_isometry(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  return orthonormalize_columns(ginibre(rows, cols, rng));
}

ComplexMatrix haar_unitary(Eigen::Index n, Rng& rng) { return haar_isometry(n, n, rng); }

}  // namespace kslab
