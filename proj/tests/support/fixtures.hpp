#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "l1line/types.hpp"

namespace l1line::testing {

/// The five four-dimensional points used throughout the worked examples.
inline DataMatrixd illustrative() {
  Matrix<double> x(5, 4);
  x << 4, -2, 3, -6,
      -3, 4, 2, -1,
       2, 3, -3, -2,
      -3, 4, 2, 3,
       5, 3, 2, -1;
  return DataMatrixd(std::move(x));
}

/// Small integers with a chance of exact zeros, so ties and zero ratios
/// show up often.
inline Matrix<double> random_integer_matrix(std::mt19937_64& rng, Index n, Index m, int range = 6,
                                            double zero_rate = 0.15) {
  std::uniform_int_distribution<int> value(-range, range);
  std::bernoulli_distribution zero(zero_rate);
  Matrix<double> x(n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) x(i, j) = zero(rng) ? 0.0 : double(value(rng));
  }
  return x;
}

inline Matrix<double> random_gaussian_matrix(std::mt19937_64& rng, Index n, Index m) {
  std::normal_distribution<double> normal;
  Matrix<double> x(n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < m; ++j) x(i, j) = normal(rng);
  }
  return x;
}

/// A file under the system temp directory that is removed on destruction.
class TempFile {
 public:
  TempFile(const std::string& name, const std::string& contents)
      : path_(std::filesystem::temp_directory_path() /
              (name + "." + std::to_string(std::random_device{}()) + ".csv")) {
    std::ofstream(path_) << contents;
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

}  // namespace l1line::testing
