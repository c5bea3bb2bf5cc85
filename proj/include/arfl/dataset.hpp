#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace arfl {

// Labeled binary-classification samples; labels are always +1 / -1.
struct Dataset {
    std::vector<std::vector<double>> xs;
    std::vector<int> ys;
    std::string name;

    std::size_t size() const { return xs.size(); }
    int dim() const { return xs.empty() ? 0 : static_cast<int>(xs.front().size()); }
};

// Two interleaving half-circles: ceil(n/2) upper-moon points (cos t, sin t)
// labeled +1 and floor(n/2) lower-moon points (1 - cos t, 0.5 - sin t)
// labeled -1, t on a uniform grid over [0, pi], i.i.d. Gaussian(0, noise^2)
// added per coordinate, order shuffled by seed.
Dataset make_moons(int n, double noise, std::uint64_t seed);

// Rows of d numeric features followed by a label in {+1,-1} (or {0,1},
// mapped 0 -> -1). Set skip_header to ignore line 1.
Dataset load_csv(const std::string& path, bool skip_header = false);

// Deterministic epoch-dependent shuffle split into contiguous batches; the
// last batch may be short. Every index appears exactly once.
std::vector<std::vector<int>> batches(std::size_t n, int batch_size,
                                      std::uint64_t seed, int epoch);

// Seeded split into (train, test) with the given test fraction.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction,
                                  std::uint64_t seed);

}  // namespace arfl
