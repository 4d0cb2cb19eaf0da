#include "zeroblock/propagation.hpp"

#include "zeroblock/errors.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace zeroblock {

PropagationModel PropagationModel::constant(double delay)
{
    if (!(delay >= 0) || !std::isfinite(delay)) throw ConfigError("constant delay must be finite and >= 0");
    PropagationModel m;
    m.kind_ = Kind::Constant;
    m.lo_ = m.hi_ = delay;
    return m;
}

PropagationModel PropagationModel::uniform(double lo, double hi)
{
    if (!(lo >= 0) || !(hi >= lo) || !std::isfinite(hi)) {
        throw ConfigError("uniform delay needs 0 <= lo <= hi < inf");
    }
    PropagationModel m;
    m.kind_ = Kind::Uniform;
    m.lo_ = lo;
    m.hi_ = hi;
    return m;
}

PropagationModel PropagationModel::empirical(std::vector<std::pair<double, double>> cdf)
{
    if (cdf.empty()) throw ConfigError("empirical delay table is empty");
    double prev_d = 0.0, prev_p = 0.0;
    for (const auto& [d, p] : cdf) {
        if (!(d >= prev_d) || !std::isfinite(d)) throw ConfigError("empirical delays must be finite and non-decreasing from 0");
        if (!(p >= prev_p) || p > 1.0) throw ConfigError("empirical probabilities must be non-decreasing in [0, 1]");
        prev_d = d;
        prev_p = p;
    }
    if (cdf.back().second != 1.0) throw ConfigError("empirical table must end at cumulative probability 1");
    PropagationModel m;
    m.kind_ = Kind::Empirical;
    m.lo_ = 0.0;
    m.hi_ = cdf.back().first;
    m.cdf_ = std::move(cdf);
    return m;
}

PropagationModel PropagationModel::parse(std::string_view text)
{
    std::istringstream in{std::string(text)};
    std::string kind;
    in >> kind;
    if (kind == "constant") {
        double d;
        if (!(in >> d)) throw ConfigError("constant propagation needs one delay");
        return constant(d);
    }
    if (kind == "uniform") {
        double lo, hi;
        if (!(in >> lo >> hi)) throw ConfigError("uniform propagation needs lo and hi");
        return uniform(lo, hi);
    }
    if (kind == "empirical") {
        std::vector<std::pair<double, double>> points;
        std::string tok;
        while (in >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) throw ConfigError("empirical point '" + tok + "' is not delay:probability");
            try {
                points.emplace_back(std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1)));
            } catch (const std::exception&) {
                throw ConfigError("empirical point '" + tok + "' is not numeric");
            }
        }
        return empirical(std::move(points));
    }
    throw ConfigError("unknown propagation model '" + kind + "'");
}

double PropagationModel::max_delay() const
{
    return hi_;
}

double PropagationModel::mean() const
{
    switch (kind_) {
    case Kind::Constant: return lo_;
    case Kind::Uniform: return 0.5 * (lo_ + hi_);
    case Kind::Empirical: {
        double m = 0.0, prev_d = 0.0, prev_p = 0.0;
        for (const auto& [d, p] : cdf_) {
            m += (p - prev_p) * 0.5 * (d + prev_d);
            prev_d = d;
            prev_p = p;
        }
        return m;
    }
    }
    return 0.0;
}

std::string PropagationModel::describe() const
{
    std::ostringstream os;
    switch (kind_) {
    case Kind::Constant: os << "constant " << lo_; break;
    case Kind::Uniform: os << "uniform " << lo_ << ' ' << hi_; break;
    case Kind::Empirical:
        os << "empirical";
        for (const auto& [d, p] : cdf_) os << ' ' << d << ':' << p;
        break;
    }
    return os.str();
}

double propagation_delay(const PropagationModel& model, Rng& rng)
{
    switch (model.kind_) {
    case PropagationModel::Kind::Constant: return model.lo_;
    case PropagationModel::Kind::Uniform: return model.lo_ + (model.hi_ - model.lo_) * uniform01(rng);
    case PropagationModel::Kind::Empirical: {
        const double u = uniform01(rng);
        double prev_d = 0.0, prev_p = 0.0;
        for (const auto& [d, p] : model.cdf_) {
            if (u < p) return prev_d + (d - prev_d) * (u - prev_p) / (p - prev_p);
            prev_d = d;
            prev_p = p;
        }
        return model.hi_;
    }
    }
    return 0.0;
}

} // namespace zeroblock
