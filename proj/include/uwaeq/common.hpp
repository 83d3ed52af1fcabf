#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace uwaeq {

using cd = std::complex<double>;
using CVec = Eigen::VectorXcd;
using CMat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

// All random-number-consuming operations take one of these explicitly.
using Rng = std::mt19937_64;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Sizes that do not fit together (length vs config, matrix shapes, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

// Parameter outside its documented range.
class ParameterError : public Error {
public:
    using Error::Error;
};

// Malformed or truncated file contents.
class FormatError : public Error {
public:
    using Error::Error;
};

class SingularChannelError : public Error {
public:
    SingularChannelError(std::size_t block_index, double condition)
        : Error("singular channel in block " + std::to_string(block_index) +
                " (condition estimate " + std::to_string(condition) + ")"),
          block_index_(block_index), condition_(condition) {}

    std::size_t block_index() const noexcept { return block_index_; }
    double condition() const noexcept { return condition_; }

private:
    std::size_t block_index_;
    double condition_;
};

// Derives an independent generator from a root seed and a path of indices.
// Used so that parallel jobs reproduce the sequential result exactly.
Rng derive_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

}  // namespace uwaeq
