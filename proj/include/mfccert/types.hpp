#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace mfc {

/// Largest state dimension supported by the fixed-capacity vector types.
inline constexpr int kMaxDim = 10;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, kMaxDim, kMaxDim>;

/// Stacked (model, process) state of the two-loop closed loop.
using StackedVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 2 * kMaxDim, 1>;

using Vector2 = Eigen::Vector2d;
using Matrix2 = Eigen::Matrix2d;

/// A computation could not be completed (singular system, lost definiteness,
/// vanishing input gain, ...).
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The integrator produced a non-finite state.
class IntegrationFailure : public NumericalError {
public:
    IntegrationFailure(const std::string& what, double time)
        : NumericalError(what), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

} // namespace mfc
