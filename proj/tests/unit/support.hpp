#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "eduembed/numerics.hpp"

namespace testing {

inline eduembed::Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                      bool unit_rows) {
  std::normal_distribution<double> n(0.0, 1.0);
  eduembed::Matrix m(rows, cols);
  for (auto& v : m.data()) v = n(rng);
  if (unit_rows) {
    for (std::size_t r = 0; r < rows; ++r) {
      const auto u = eduembed::l2_normalize(m.row(r));
      std::copy(u.begin(), u.end(), m.row(r).begin());
    }
  }
  return m;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("eduembed_unit_" + name);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace testing
