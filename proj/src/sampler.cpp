#include "possfuse/sampler.hpp"

#include "possfuse/errors.hpp"
#include "possfuse/special_fn.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace possfuse {

JointSampler JointSampler::iid() { return JointSampler{}; }

JointSampler JointSampler::comonotone() {
    JointSampler s;
    s.kind_ = SamplerKind::comonotone;
    return s;
}

JointSampler JointSampler::antithetic() {
    JointSampler s;
    s.kind_ = SamplerKind::antithetic;
    return s;
}

JointSampler JointSampler::gauss_copula(double rho) {
    if (!(rho >= 0.0 && rho < 1.0)) throw ValidationError("gauss_copula needs rho in [0,1)");
    JointSampler s;
    s.kind_ = SamplerKind::gauss_copula;
    s.rho_ = rho;
    return s;
}

JointSampler JointSampler::permuted(JointSampler base) {
    JointSampler s;
    s.kind_ = SamplerKind::permuted;
    s.rho_ = base.rho_;
    s.base_ = std::make_shared<const JointSampler>(std::move(base));
    return s;
}

JointSampler JointSampler::parse(std::string_view name, double rho) {
    if (name == "iid") return iid();
    if (name == "comonotone") return comonotone();
    if (name == "antithetic") return antithetic();
    if (name == "gauss_copula") return gauss_copula(rho);
    if (name == "permuted") return permuted(rho > 0.0 ? gauss_copula(rho) : iid());
    throw ValidationError("unknown sampler '" + std::string(name) + "' (expected " + std::string(kSamplerNames) + ")");
}

std::string JointSampler::describe() const {
    switch (kind_) {
        case SamplerKind::iid: return "iid";
        case SamplerKind::comonotone: return "comonotone";
        case SamplerKind::antithetic: return "antithetic";
        case SamplerKind::gauss_copula: {
            char buf[48];
            std::snprintf(buf, sizeof buf, "gauss_copula(rho=%g)", rho_);
            return buf;
        }
        case SamplerKind::permuted: return "permuted(" + base_->describe() + ")";
    }
    return "?";
}

void JointSampler::check_dimension(std::size_t K) const {
    if (K < 1) throw ValidationError("sampler dimension must be >= 1");
    if (kind_ == SamplerKind::antithetic && K != 2) {
        throw ValidationError("antithetic sampler requires K = 2, got K = " + std::to_string(K));
    }
    if (base_) base_->check_dimension(K);
}

void JointSampler::draw(Engine& eng, std::span<double> out) const {
    switch (kind_) {
        case SamplerKind::iid:
            for (double& u : out) u = uniform_open(eng);
            return;
        case SamplerKind::comonotone: {
            const double u = uniform_open(eng);
            for (double& x : out) x = u;
            return;
        }
        case SamplerKind::antithetic: {
            const double u = uniform_open(eng);
            out[0] = u;
            out[1] = 1.0 - u;
            return;
        }
        case SamplerKind::gauss_copula: {
            // equicorrelation matrix rho*11' + (1-rho)I factors as a shared
            // component plus independent noise
            const double a = std::sqrt(rho_);
            const double b = std::sqrt(1.0 - rho_);
            const double z0 = standard_normal(eng);
            for (double& x : out) {
                x = normal_cdf(a * z0 + b * standard_normal(eng));
                // keep strictly inside (0,1) where the normal tail rounds
                if (x <= 0.0) x = 0x1.0p-1074;
                if (x >= 1.0) x = 1.0 - 0x1.0p-53;
            }
            return;
        }
        case SamplerKind::permuted: {
            base_->draw(eng, out);
            // Fisher-Yates with explicit index draws (not std::shuffle, whose
            // draw sequence is implementation-defined)
            for (std::size_t i = out.size(); i > 1; --i) {
                const auto j = static_cast<std::size_t>(eng() % i);
                std::swap(out[i - 1], out[j]);
            }
            return;
        }
    }
}

}  // namespace possfuse
