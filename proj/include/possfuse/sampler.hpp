#pragma once

// Joint laws for (Pi_1(Theta), ..., Pi_K(Theta)): K-vectors whose
// coordinates are each marginally Unif(0,1), under different dependence.

#include "possfuse/rng.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace possfuse {

enum class SamplerKind { iid, comonotone, antithetic, gauss_copula, permuted };

inline constexpr std::string_view kSamplerNames = "iid|comonotone|antithetic|gauss_copula|permuted";

class JointSampler {
public:
    static JointSampler iid();
    // every coordinate is the same uniform
    static JointSampler comonotone();
    // (U, 1-U); K must be 2
    static JointSampler antithetic();
    // Phi(sqrt(rho) Z0 + sqrt(1-rho) Z_k), rho in [0,1)
    static JointSampler gauss_copula(double rho);
    // base draw, then a uniformly random reordering of the coordinates
    static JointSampler permuted(JointSampler base);

    // name as accepted on the CLI ("gauss_copula" takes rho separately;
    // "permuted" wraps gauss_copula(rho) when rho is given, else iid)
    static JointSampler parse(std::string_view name, double rho);

    SamplerKind kind() const { return kind_; }
    double rho() const { return rho_; }
    const JointSampler* base() const { return base_.get(); }
    std::string describe() const;

    // Throws ValidationError if the sampler cannot produce K-vectors.
    void check_dimension(std::size_t K) const;

    // Fills out (size K) with one joint draw.
    void draw(Engine& eng, std::span<double> out) const;

private:
    SamplerKind kind_ = SamplerKind::iid;
    double rho_ = 0.0;
    std::shared_ptr<const JointSampler> base_;
};

}  // namespace possfuse
