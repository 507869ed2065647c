#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "possfuse/errors.hpp"
#include "possfuse/sampler.hpp"
#include "support.hpp"

using namespace possfuse;

namespace {

std::vector<std::vector<double>> draws(const JointSampler& s, std::size_t K, std::size_t B, std::uint64_t seed) {
    auto eng = block_engine(seed, 1, 0);
    std::vector<std::vector<double>> cols(K, std::vector<double>(B));
    std::vector<double> u(K);
    for (std::size_t i = 0; i < B; ++i) {
        s.draw(eng, u);
        for (std::size_t k = 0; k < K; ++k) cols[k][i] = u[k];
    }
    return cols;
}

// asymptotic one-sample KS critical value at the 0.01 level
double ks_crit(std::size_t B) { return 1.6276 / std::sqrt(static_cast<double>(B)); }

double correlation(const std::vector<double>& a, const std::vector<double>& b) {
    const double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0, saa = 0, sbb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

}  // namespace

TEST_CASE("construction errors") {
    CHECK_THROWS_AS(JointSampler::gauss_copula(1.0), ValidationError);
    CHECK_THROWS_AS(JointSampler::gauss_copula(-0.1), ValidationError);
    CHECK_THROWS_AS(JointSampler::antithetic().check_dimension(3), ValidationError);
    CHECK_NOTHROW(JointSampler::antithetic().check_dimension(2));
    CHECK_THROWS_AS(JointSampler::parse("clayton", 0.0), ValidationError);
    CHECK(JointSampler::parse("permuted", 0.5).describe() == "permuted(gauss_copula(rho=0.5))");
    CHECK(JointSampler::parse("permuted", 0.0).describe() == "permuted(iid)");
}

TEST_CASE("structural properties of single draws") {
    auto eng = block_engine(1, 2, 3);
    std::vector<double> u(4), v(2);
    for (int i = 0; i < 1000; ++i) {
        JointSampler::comonotone().draw(eng, u);
        CHECK(u[0] == u[1]);
        CHECK(u[2] == u[3]);
        JointSampler::antithetic().draw(eng, v);
        CHECK(v[0] + v[1] == doctest::Approx(1.0).epsilon(1e-15));
        JointSampler::gauss_copula(0.99).draw(eng, u);
        for (double x : u) CHECK((x > 0.0 && x < 1.0));
    }
}

TEST_CASE("every sampler has uniform marginals") {
    const std::size_t B = 100000;
    const std::pair<JointSampler, std::size_t> cases[] = {
        {JointSampler::iid(), 3},
        {JointSampler::comonotone(), 3},
        {JointSampler::antithetic(), 2},
        {JointSampler::gauss_copula(0.0), 3},
        {JointSampler::gauss_copula(0.5), 4},
        {JointSampler::gauss_copula(0.9), 5},
        {JointSampler::permuted(JointSampler::gauss_copula(0.5)), 3},
        {JointSampler::permuted(JointSampler::iid()), 3},
    };
    std::uint64_t seed = 100;
    for (const auto& [s, K] : cases) {
        const auto cols = draws(s, K, B, seed++);
        for (std::size_t k = 0; k < K; ++k) {
            INFO(s.describe() << " coordinate " << k);
            CHECK(testing::ks_uniform(cols[k]) < ks_crit(B));
        }
    }
}

TEST_CASE("dependence shows up where expected") {
    const std::size_t B = 50000;
    auto iid = draws(JointSampler::iid(), 2, B, 7);
    CHECK(std::abs(correlation(iid[0], iid[1])) < 0.02);
    auto g0 = draws(JointSampler::gauss_copula(0.0), 2, B, 8);
    CHECK(std::abs(correlation(g0[0], g0[1])) < 0.02);
    auto g9 = draws(JointSampler::gauss_copula(0.9), 2, B, 9);
    // Spearman-type correlation of the Gaussian copula: (6/pi) asin(rho/2)
    CHECK(correlation(g9[0], g9[1]) == doctest::Approx(6.0 / M_PI * std::asin(0.45)).epsilon(0.02));
    auto anti = draws(JointSampler::antithetic(), 2, B, 10);
    CHECK(correlation(anti[0], anti[1]) == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("permutation spreads a fixed pattern evenly") {
    // comonotone then permuted stays comonotone; an asymmetric base does not
    auto eng = block_engine(5, 6, 7);
    const auto s = JointSampler::permuted(JointSampler::comonotone());
    std::vector<double> u(3);
    s.draw(eng, u);
    CHECK(u[0] == u[1]);
    const auto a = JointSampler::permuted(JointSampler::antithetic());
    std::size_t first_small = 0;
    const int n = 20000;
    std::vector<double> v(2);
    for (int i = 0; i < n; ++i) {
        a.draw(eng, v);
        if (v[0] < v[1]) ++first_small;
    }
    CHECK(first_small / static_cast<double>(n) == doctest::Approx(0.5).epsilon(0.03));
}

TEST_CASE("draws are reproducible from the seed") {
    const auto a = draws(JointSampler::gauss_copula(0.3), 3, 1000, 42);
    const auto b = draws(JointSampler::gauss_copula(0.3), 3, 1000, 42);
    CHECK(a == b);
    const auto c = draws(JointSampler::gauss_copula(0.3), 3, 1000, 43);
    CHECK(a != c);
}
