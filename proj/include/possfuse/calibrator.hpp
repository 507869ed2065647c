#pragma once

// Calibrators: nonincreasing g >= 0 on [0, inf) with g = 0 on (1, inf) and
// integral over [0,1] at most 1. Averaging g(p_k / alpha) over K p-values and
// comparing with 1 gives a rejection region of a valid p-merging function.

#include <cstddef>
#include <span>
#include <string>

namespace possfuse {

class Calibrator {
public:
    enum class Kind {
        indicator,  // K * 1{x <= 1/K}
        linear,     // (2 - 2x)_+
        log,        // (-ln x)_+
    };

    static Calibrator indicator(std::size_t K);
    static Calibrator linear() { return Calibrator(Kind::linear, 0); }
    static Calibrator log() { return Calibrator(Kind::log, 0); }

    Kind kind() const { return kind_; }
    std::size_t K() const { return K_; }
    std::string describe() const;

    // g(x) for x >= 0; +inf at x = 0 for the log calibrator.
    double operator()(double x) const;

    // Numerical integral of g over [0,1] (tanh-sinh quadrature, split at the
    // indicator's jump).
    double integral() const;

private:
    Calibrator(Kind k, std::size_t K) : kind_(k), K_(K) {}
    Kind kind_;
    std::size_t K_;
};

// Non-exchangeable: (1/K) sum_k g(v_k / alpha) >= 1.
// Exchangeable:     some prefix k has (1/k) sum_{i<=k} g(v_i / alpha) >= 1.
// alpha in (0,1), values in [0,1].
bool calibrator_reject(const Calibrator& g, double alpha, std::span<const double> values, bool exchangeable);

}  // namespace possfuse
