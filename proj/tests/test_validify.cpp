#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "possfuse/errors.hpp"
#include "possfuse/validify.hpp"
#include "support.hpp"

#include <cmath>
#include <numbers>

using namespace possfuse;

namespace {

std::string error_of(auto&& f) {
    try {
        f();
    } catch (const ValidationError& e) {
        return e.what();
    }
    return "";
}

bool contains(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

// iid fused values, then the rule applied to each
std::vector<double> mc_validified(const FusionOperator& op, const ValidificationRule& rule, std::size_t K,
                                  std::size_t B, std::uint64_t seed, bool prefix = false) {
    std::mt19937_64 eng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> v(K), out(B);
    for (auto& o : out) {
        for (auto& x : v) x = U(eng);
        o = rule(prefix ? prefix_fuse_pointwise(op, v) : fuse_pointwise(op, v));
    }
    return out;
}

constexpr OpKind kExactOps[] = {OpKind::min, OpKind::prod, OpKind::lprod, OpKind::avg, OpKind::gavg};

}  // namespace

TEST_CASE("names round-trip") {
    for (auto r : {Regime::independent, Regime::dependent, Regime::exchangeable}) CHECK(parse_regime(to_string(r)) == r);
    for (auto m : {Method::exact, Method::min_based, Method::markov, Method::pmerge, Method::combined, Method::mc,
                   Method::identity, Method::automatic}) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK_THROWS_AS(parse_regime("iid"), ValidationError);
    CHECK_THROWS_AS(parse_method("bonferroni"), ValidationError);
}

TEST_CASE("exact rules by hand") {
    CHECK(exact_rule(OpKind::min, 2)(0.5) == doctest::Approx(0.75));
    CHECK(exact_rule(OpKind::prod, 2)(0.25) == doctest::Approx(0.25 * (1.0 - std::log(0.25))));
    CHECK(exact_rule(OpKind::avg, 2)(0.25) == doctest::Approx(0.125));
    CHECK(exact_rule(OpKind::gavg, 2)(0.5) == doctest::Approx(0.25 * (1.0 - std::log(0.25))));
    CHECK(exact_rule(OpKind::lprod, 2)(0.0) == doctest::Approx(0.5));
    CHECK(exact_rule(OpKind::lprod, 3)(0.0) == doctest::Approx(5.0 / 6.0));
    CHECK(exact_rule(OpKind::lprod, 2)(0.5) == doctest::Approx(0.875));
    for (auto op : kExactOps) {
        const auto r = exact_rule(op, 4);
        CHECK(r(1.0) == 1.0);
        CHECK(r.is_exact());
        CHECK(r.regime() == Regime::independent);
    }
}

TEST_CASE("exact rules make the fused value uniform (Monte Carlo oracle)") {
    const std::size_t B = 40000;
    for (auto op : kExactOps) {
        for (std::size_t K : {2u, 3u, 6u}) {
            const auto v = mc_validified(FusionOperator(op), exact_rule(op, K), K, B, 1000 + K);
            INFO(to_string(op) << " K=" << K);
            if (op == OpKind::lprod) {
                // atom at H(K-1): the CDF jumps from 0 to H(K-1); above it, uniform
                std::size_t at_atom = 0;
                for (double x : v) at_atom += x == exact_rule(op, K)(0.0);
                CHECK(at_atom / double(B) == doctest::Approx(exact_rule(op, K)(0.0)).epsilon(0.03));
            } else {
                CHECK(testing::ks_uniform(v) < testing::dkw(B));
            }
        }
    }
}

TEST_CASE("product and geometric average validify identically") {
    for (std::size_t K = 2; K <= 6; ++K) {
        const auto p = exact_rule(OpKind::prod, K), g = exact_rule(OpKind::gavg, K);
        for (int i = 0; i < 1000; ++i) {
            const double t = std::pow(10.0, -12.0 * i / 999.0);
            CHECK(std::abs(p(t) - g(std::pow(t, 1.0 / K))) <= 1e-12);
        }
    }
}

TEST_CASE("exact rule errors") {
    CHECK(contains(error_of([] { exact_rule(OpKind::max, 3); }), "use mc_rule"));
    CHECK(contains(error_of([] { exact_rule(OpKind::wavg, 3); }), "mc_rule"));
    CHECK_THROWS_AS(exact_rule(OpKind::avg, 61), ValidationError);
    CHECK_THROWS_AS(exact_rule(OpKind::avg, 1), ValidationError);
}

TEST_CASE("bound values by hand") {
    CHECK(dep_bound_rule(OpKind::min, 3, BoundMethod::min_based)(0.1) == doctest::Approx(0.3));
    CHECK(dep_bound_rule(OpKind::prod, 3, BoundMethod::min_based)(0.008) == doctest::Approx(0.6));
    CHECK(dep_bound_rule(OpKind::prod, 3, BoundMethod::markov)(0.008) == doctest::Approx(-3.0 / std::log(0.008)));
    CHECK(dep_bound_rule(OpKind::prod, 3, BoundMethod::combined)(0.008) == doctest::Approx(0.6));
    CHECK(dep_bound_rule(OpKind::avg, 3, BoundMethod::markov)(0.25) == doctest::Approx(2.0 / 3.0));
    CHECK(dep_bound_rule(OpKind::avg, 3, BoundMethod::pmerge)(0.2) == doctest::Approx(0.4));
    CHECK(dep_bound_rule(OpKind::avg, 3, BoundMethod::markov)(0.6) == 1.0);
    CHECK(dep_bound_rule(OpKind::gavg, 3, BoundMethod::markov)(std::exp(-2.0)) == doctest::Approx(0.5));
    CHECK(dep_bound_rule(OpKind::gavg, 3, BoundMethod::pmerge)(0.1) == doctest::Approx(std::numbers::e * 0.1));
    CHECK(dep_bound_rule(OpKind::max, 3, BoundMethod::pmerge).is_identity());
    for (auto m : {BoundMethod::min_based, BoundMethod::markov, BoundMethod::pmerge, BoundMethod::combined}) {
        CHECK(dep_bound_rule(OpKind::min, 4, m)(0.1) == doctest::Approx(0.4));
        if (m != BoundMethod::markov) CHECK(dep_bound_rule(OpKind::avg, 4, m)(0.0) == 0.0);
    }
    CHECK(dep_bound_rule(OpKind::avg, 4, BoundMethod::markov)(0.0) == 0.5);
}

TEST_CASE("bound menu errors") {
    CHECK(contains(error_of([] { dep_bound_rule(OpKind::prod, 3, BoundMethod::pmerge); }), "not homogeneous"));
    CHECK(contains(error_of([] { dep_bound_rule(OpKind::lprod, 3, BoundMethod::markov); }),
                   "not recommended; no valid nontrivial rule"));
    CHECK(contains(error_of([] { exch_bound_rule(OpKind::lprod, 3, BoundMethod::markov); }),
                   "not recommended; no valid nontrivial rule"));
    CHECK_THROWS_AS(dep_bound_rule(OpKind::wavg, 3, BoundMethod::min_based), ValidationError);
    CHECK_THROWS_AS(ValidificationRule::bound(OpKind::avg, 3, Regime::dependent, "x", {BoundTerm::linear(-1.0)}),
                    ValidationError);
    CHECK_THROWS_AS(ValidificationRule::bound(OpKind::avg, 3, Regime::dependent, "x", {}), ValidationError);
}

TEST_CASE("property: every bound dominates the iid CDF") {
    const OpKind ops[] = {OpKind::min, OpKind::prod, OpKind::avg, OpKind::gavg};
    for (auto op : ops) {
        for (std::size_t K = 2; K <= 10; ++K) {
            const auto exact = exact_rule(op, K);
            for (auto m : {BoundMethod::min_based, BoundMethod::markov, BoundMethod::pmerge, BoundMethod::combined}) {
                if (op == OpKind::prod && m == BoundMethod::pmerge) continue;
                for (const auto& rule : {dep_bound_rule(op, K, m), exch_bound_rule(op, K, m)}) {
                    for (int i = 0; i <= 1000; ++i) {
                        const double t = i / 1000.0;
                        INFO(to_string(op) << " K=" << K << " " << rule.describe() << " t=" << t);
                        CHECK(rule(t) >= exact(t));
                    }
                }
            }
        }
    }
}

TEST_CASE("exchangeable rules are tagged for prefix rankings") {
    const auto r = exch_bound_rule(OpKind::avg, 3, BoundMethod::pmerge);
    CHECK(r.mode() == FusionMode::prefix);
    CHECK(r.regime() == Regime::exchangeable);
    CHECK(dep_bound_rule(OpKind::avg, 3, BoundMethod::pmerge).mode() == FusionMode::plain);
}

TEST_CASE("recommendations") {
    const FusionOperator mn(OpKind::min), pr(OpKind::prod), av(OpKind::avg), ga(OpKind::gavg), mx(OpKind::max),
        lp(OpKind::lprod);
    for (auto reg : {Regime::dependent, Regime::exchangeable}) {
        CHECK(recommend(mn, 3, reg)(0.1) == doctest::Approx(0.3));
        CHECK(recommend(pr, 2, reg)(0.04) == doctest::Approx(0.4));
        CHECK(recommend(pr, 3, reg).method() == "combined");
        CHECK(recommend(av, 5, reg)(0.1) == doctest::Approx(0.2));
        CHECK(recommend(ga, 2, reg)(0.1) == doctest::Approx(0.2));
        CHECK(recommend(ga, 3, reg)(0.1) == doctest::Approx(std::numbers::e * 0.1));
        CHECK(recommend(mx, 3, reg).is_identity());
        CHECK(contains(error_of([&] { recommend(lp, 3, reg); }), "not recommended; no valid nontrivial rule"));
        CHECK_THROWS_AS(recommend(FusionOperator::weighted({0.5, 0.5}), 2, reg), ValidationError);
        CHECK(recommend(av, 3, reg).mode() == (reg == Regime::exchangeable ? FusionMode::prefix : FusionMode::plain));
    }
    CHECK(recommend(av, 3, Regime::independent).is_exact());
    const auto lr = recommend(lp, 3, Regime::independent);
    CHECK(lr.is_exact());
    REQUIRE(lr.warnings().size() == 1);
    CHECK(lr.warnings()[0].code == "lprod-inefficient");
    McOptions mc;
    mc.reps = 2000;
    CHECK(recommend(mx, 3, Regime::independent, mc).is_mc());
    CHECK(recommend(FusionOperator::weighted({0.5, 0.5}), 2, Regime::independent, mc).is_mc());
}

TEST_CASE("resolve_rule refuses mismatched methods") {
    const FusionOperator av(OpKind::avg);
    CHECK_THROWS_AS(resolve_rule(av, 3, Regime::dependent, Method::exact), ValidationError);
    CHECK_THROWS_AS(resolve_rule(av, 3, Regime::dependent, Method::mc), ValidationError);
    CHECK_THROWS_AS(resolve_rule(av, 3, Regime::independent, Method::identity), ValidationError);
    CHECK(resolve_rule(av, 3, Regime::independent, Method::pmerge)(0.1) == doctest::Approx(0.2));
    CHECK(resolve_rule(FusionOperator(OpKind::max), 3, Regime::exchangeable, Method::identity).mode() ==
          FusionMode::prefix);
}

TEST_CASE("mc tables") {
    McOptions mc;
    mc.reps = 999;
    CHECK_THROWS_AS(mc_rule(FusionOperator(OpKind::avg), 3, mc), ValidationError);
    mc.reps = 50000;
    const auto r = mc_rule(FusionOperator(OpKind::avg), 3, mc);
    const auto exact = exact_rule(OpKind::avg, 3);
    double worst = 0.0;
    for (int i = 0; i <= 1000; ++i) worst = std::max(worst, std::abs(r(i / 1000.0) - exact(i / 1000.0)));
    CHECK(worst < testing::dkw(50000));
    // conservative: never below 1/(B+1)
    CHECK(r(0.0) == doctest::Approx(1.0 / 50001.0));
    CHECK(r(1.0) == 1.0);
    // same seed, same table
    const auto again = mc_rule(FusionOperator(OpKind::avg), 3, mc);
    for (int i = 0; i <= 100; ++i) CHECK(r(i / 100.0) == again(i / 100.0));
    // mc for max against its iid CDF t^K
    const auto mx = mc_rule(FusionOperator(OpKind::max), 2, mc);
    for (int i = 0; i <= 100; ++i) CHECK(std::abs(mx(i / 100.0) - std::pow(i / 100.0, 2)) < testing::dkw(50000));
}

TEST_CASE("apply_rule checks tags") {
    const auto grid = share(ParameterGrid::make({0.0, 1.0, 2.0}));
    const ContourSet set({Contour(grid, {0.2, 1.0, 0.4}), Contour(grid, {0.1, 0.9, 1.0}), Contour(grid, {1.0, 0.3, 0.2})});
    const FusionOperator av(OpKind::avg);
    const auto plain = rank(av, set, FusionMode::plain);
    const auto prefix = rank(av, set, FusionMode::prefix);
    const auto exch = exch_bound_rule(OpKind::avg, 3, BoundMethod::pmerge);
    CHECK(contains(error_of([&] { apply_rule(exch, plain); }), "prefix"));
    CHECK_NOTHROW(apply_rule(exch, prefix));
    CHECK_THROWS_AS(apply_rule(exact_rule(OpKind::avg, 2), plain), ValidationError);
    CHECK_THROWS_AS(apply_rule(exact_rule(OpKind::min, 3), plain), ValidationError);
    const auto out = apply_rule(dep_bound_rule(OpKind::avg, 3, BoundMethod::pmerge), plain);
    for (std::size_t i = 0; i < 3; ++i) CHECK(out[i] == std::min(1.0, 2.0 * plain.contour[i]));
}

TEST_CASE("property: rules are nondecreasing and land in [0,1]") {
    testing::Gen gen(41);
    McOptions mc;
    mc.reps = 2000;
    std::vector<ValidificationRule> rules;
    for (std::size_t K : {2u, 3u, 7u}) {
        for (auto op : kExactOps) rules.push_back(exact_rule(op, K));
        for (auto op : {OpKind::min, OpKind::avg, OpKind::gavg}) {
            for (auto m : {BoundMethod::min_based, BoundMethod::markov, BoundMethod::pmerge, BoundMethod::combined})
                rules.push_back(dep_bound_rule(op, K, m));
        }
        rules.push_back(dep_bound_rule(OpKind::prod, K, BoundMethod::combined));
        rules.push_back(mc_rule(FusionOperator(OpKind::max), K, mc));
    }
    for (const auto& r : rules) {
        for (int i = 0; i < 200; ++i) {
            const double a = gen.uniform(), b = gen.uniform();
            const double lo = std::min(a, b), hi = std::max(a, b);
            CHECK(r(lo) <= r(hi));
            CHECK((r(lo) >= 0.0 && r(hi) <= 1.0));
        }
        CHECK_THROWS_AS(r(1.5), ValidationError);
    }
}

TEST_CASE("linear constants") {
    CHECK(linear_constant(OpKind::min, 4) == 4.0);
    CHECK(linear_constant(OpKind::avg, 4) == 2.0);
    CHECK(linear_constant(OpKind::gavg, 4) == std::numbers::e);
    CHECK_THROWS_AS(linear_constant(OpKind::prod, 4), ValidationError);
}
