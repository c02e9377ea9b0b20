#include "sobdecomp/random_field.hpp"

#include <random>
#include <vector>

namespace sobdecomp {

GridFunction smooth_random(const MeshPtr& mesh, std::uint64_t seed,
                           int smoothing_passes) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  std::vector<double> v(static_cast<size_t>(mesh->n_nodes()));
  for (double& x : v) x = uniform(rng);

  std::vector<double> next(v.size());
  for (int pass = 0; pass < smoothing_passes; ++pass) {
    const size_t n = v.size();
    next[0] = (3.0 * v[0] + v[1]) / 4.0;
    for (size_t i = 1; i + 1 < n; ++i) {
      next[i] = (v[i - 1] + 2.0 * v[i] + v[i + 1]) / 4.0;
    }
    next[n - 1] = (v[n - 2] + 3.0 * v[n - 1]) / 4.0;
    v.swap(next);
  }
  return GridFunction(mesh, std::move(v));
}

}  // namespace sobdecomp
