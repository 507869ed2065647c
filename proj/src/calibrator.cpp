#include "possfuse/calibrator.hpp"

#include "possfuse/errors.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

namespace possfuse {

Calibrator Calibrator::indicator(std::size_t K) {
    if (K < 1) throw ValidationError("indicator calibrator needs K >= 1");
    return Calibrator(Kind::indicator, K);
}

std::string Calibrator::describe() const {
    switch (kind_) {
        case Kind::indicator: return std::to_string(K_) + "*1{x<=1/" + std::to_string(K_) + "}";
        case Kind::linear: return "(2-2x)_+";
        case Kind::log: return "(-ln x)_+";
    }
    return "?";
}

double Calibrator::operator()(double x) const {
    if (std::isnan(x) || x < 0.0) throw ValidationError("calibrator argument must be >= 0");
    switch (kind_) {
        case Kind::indicator: {
            const double K = static_cast<double>(K_);
            // x <= 1/K written as K*x <= 1 so the boundary matches K*t <= alpha
            return (K * x <= 1.0) ? K : 0.0;
        }
        case Kind::linear: return x < 1.0 ? 2.0 - 2.0 * x : 0.0;
        case Kind::log:
            if (x == 0.0) return std::numeric_limits<double>::infinity();
            return x < 1.0 ? -std::log(x) : 0.0;
    }
    return 0.0;
}

double Calibrator::integral() const {
    boost::math::quadrature::tanh_sinh<double> q;
    auto g = [this](double x) { return (*this)(x); };
    switch (kind_) {
        case Kind::indicator: {
            const double jump = 1.0 / static_cast<double>(K_);
            return q.integrate(g, 0.0, jump) + (jump < 1.0 ? q.integrate(g, jump, 1.0) : 0.0);
        }
        case Kind::linear:
        case Kind::log: return q.integrate(g, 0.0, 1.0);
    }
    return 0.0;
}

bool calibrator_reject(const Calibrator& g, double alpha, std::span<const double> values, bool exchangeable) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError("calibrator rejection needs alpha in (0,1)");
    if (values.empty()) throw ValidationError("calibrator rejection needs at least one value");
    double sum = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k) {
        const double v = values[k];
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("calibrator inputs must lie in [0,1]");
        sum += g(v / alpha);
        if (exchangeable && sum / static_cast<double>(k + 1) >= 1.0) return true;
    }
    return sum / static_cast<double>(values.size()) >= 1.0;
}

}  // namespace possfuse
