#pragma once

#include "zeroblock/mining.hpp"

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace zeroblock {

/** Per-recipient block delivery delay. */
class PropagationModel {
public:
    enum class Kind { Constant, Uniform, Empirical };

    static PropagationModel constant(double delay);
    static PropagationModel uniform(double lo, double hi);
    //! Piecewise-linear CDF through (delay, cumulative probability) points; the last probability must be 1.
    static PropagationModel empirical(std::vector<std::pair<double, double>> cdf);
    //! "constant 30", "uniform 0 40" or "empirical 0:0 10:0.5 40:1".
    static PropagationModel parse(std::string_view text);

    Kind kind() const { return kind_; }
    double max_delay() const;
    double mean() const;
    std::string describe() const;

    friend double propagation_delay(const PropagationModel& model, Rng& rng);

private:
    PropagationModel() = default;

    Kind kind_ = Kind::Constant;
    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<std::pair<double, double>> cdf_;
};

double propagation_delay(const PropagationModel& model, Rng& rng);

} // namespace zeroblock
