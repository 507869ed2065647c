// possfuse: fuse contour files, run validity audits and the meta-analysis
// simulations. Every output is CSV with '#' provenance lines on top.
//
// Exit status: 0 success, 1 I/O failure, 2 invalid input, 3 numerical failure.

#include "possfuse/audit.hpp"
#include "possfuse/csv_io.hpp"
#include "possfuse/errors.hpp"
#include "possfuse/fvn.hpp"
#include "possfuse/models.hpp"
#include "possfuse/version.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

using namespace possfuse;

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        out.push_back(s.substr(start, p == std::string::npos ? std::string::npos : p - start));
        if (p == std::string::npos) break;
        start = p + 1;
    }
    return out;
}

double to_double(const std::string& flag, const std::string& s) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || p != end || s.empty()) throw ValidationError(flag + ": '" + s + "' is not a number");
    return v;
}

std::vector<double> doubles(const std::string& flag, const std::string& s) {
    std::vector<double> v;
    for (const auto& f : split(s, ',')) v.push_back(to_double(flag, f));
    return v;
}

std::vector<int> ints(const std::string& flag, const std::string& s) {
    std::vector<int> v;
    for (const auto& f : split(s, ',')) {
        int x = 0;
        const char* end = f.data() + f.size();
        auto [p, ec] = std::from_chars(f.data(), end, x);
        if (ec != std::errc() || p != end || f.empty()) throw ValidationError(flag + ": '" + f + "' is not an integer");
        v.push_back(x);
    }
    return v;
}

// start:stop:step
ParameterGrid range_grid(const std::string& flag, const std::string& s) {
    const auto parts = split(s, ':');
    if (parts.size() != 3) throw ValidationError(flag + " expects start:stop:step, got '" + s + "'");
    return ParameterGrid::from_range(to_double(flag, parts[0]), to_double(flag, parts[1]),
                                     to_double(flag, parts[2]));
}

// comma list or start:stop:step
std::vector<double> alpha_list(const std::string& flag, const std::string& s) {
    if (s.find(':') != std::string::npos) {
        const auto g = range_grid(flag, s);
        return {g.points().begin(), g.points().end()};
    }
    return doubles(flag, s);
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("write to standard output failed");
        return;
    }
    csv::write_text(path, text);
}

std::string kv(const std::vector<std::pair<std::string, std::string>>& items) {
    std::string s;
    for (const auto& [k, v] : items) s += (s.empty() ? "" : ",") + k + "=" + v;
    return s;
}

std::string list(std::span<const double> v) {
    std::string s;
    for (double x : v) s += (s.empty() ? "" : ";") + format_double(x);
    return s;
}

std::string provenance(const std::string& sub) { return std::string("possfuse ") + kVersion + " " + sub; }

void print_warnings(const std::vector<Warning>& w) {
    for (const auto& x : w) std::cerr << "warning[" << x.code << "]: " << x.message << '\n';
}

struct FuseArgs {
    std::string input, output, op = "avg", regime = "independent", method = "auto", weights;
    std::size_t mc_reps = 100000;
    std::uint64_t seed = 42;
    bool shuffle = false;
};

FusionOperator make_operator(const std::string& name, const std::string& weights, std::size_t K) {
    const auto kind = parse_op_kind(name);
    if (kind != OpKind::wavg) {
        if (!weights.empty()) throw ValidationError("--weights only applies to --operator wavg");
        return FusionOperator(kind);
    }
    if (weights.empty()) throw ValidationError("--operator wavg needs --weights");
    auto w = doubles("--weights", weights);
    if (w.size() != K) {
        throw ValidationError("--weights has " + std::to_string(w.size()) + " entries for K=" + std::to_string(K));
    }
    return FusionOperator::weighted(std::move(w));
}

void run_fuse(const FuseArgs& a) {
    const auto regime = parse_regime(a.regime);
    const auto method = parse_method(a.method);
    parse_op_kind(a.op);
    auto set = read_contour_set(a.input);
    std::vector<std::size_t> order(set.K());
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (a.shuffle) {
        auto eng = block_engine(a.seed, stream::permute, 0);
        for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[eng() % (i + 1)]);
        set = set.permuted(order);
    }
    const auto op = make_operator(a.op, a.weights, set.K());
    const auto res = fvn(set, op, regime, method, McOptions{a.mc_reps, a.seed, JointSampler::iid()});
    print_warnings(res.warnings);
    std::vector<std::pair<std::string, std::string>> items = {{"op", a.op},
                                                              {"regime", a.regime},
                                                              {"method", res.rule.method()},
                                                              {"K", std::to_string(set.K())},
                                                              {"seed", std::to_string(a.seed)}};
    std::vector<std::string> comments = {provenance("fuse"), kv(items), "rule=" + res.rule.describe()};
    if (op.has_weights()) comments.push_back("weights=" + list(op.weights()));
    if (res.rule.is_mc()) comments.push_back("mc_reps=" + std::to_string(a.mc_reps));
    if (a.shuffle) {
        std::string o;
        for (auto i : order) o += (o.empty() ? "" : ";") + std::to_string(i + 1);
        comments.push_back("member_order=" + o);
    }
    emit(a.output, format_fused_csv(res, comments));
}

struct AuditArgs {
    std::string output, op = "min", regime = "independent", method = "auto", weights, sampler = "iid", alpha;
    std::size_t K = 3, reps = 100000, mc_reps = 100000;
    double rho = 0.0;
    std::uint64_t seed = 42;
};

void run_audit(const AuditArgs& a) {
    const auto regime = parse_regime(a.regime);
    const auto method = parse_method(a.method);
    const auto sampler = JointSampler::parse(a.sampler, a.rho);
    const auto op = make_operator(a.op, a.weights, a.K);
    const auto grid = a.alpha.empty() ? default_alpha_grid() : alpha_list("--alpha-grid", a.alpha);
    const McOptions mc{a.mc_reps, a.seed, JointSampler::iid()};
    auto r = validity_curve(op, regime, method, a.K, sampler, a.reps, a.seed, grid, mc);
    r.config.insert(r.config.begin(), provenance("audit"));
    if (op.has_weights()) r.config.push_back("weights=" + list(op.weights()));
    emit(a.output, format_report_csv(r));
}

struct MetaArgs {
    std::string output = ".", mle, n, grid = "0.01:4:0.005";
    std::size_t mc_reps = 100000;
    std::uint64_t seed = 42;
};

std::vector<StudySummary> summaries(const std::string& mle, const std::string& n) {
    if (mle.empty() != n.empty()) throw ValidationError("--mle and --n must be given together");
    const auto m = mle.empty() ? std::vector<double>{1.66, 0.91, 0.78} : doubles("--mle", mle);
    const auto k = n.empty() ? std::vector<int>{3, 6, 9} : ints("--n", n);
    if (m.size() != k.size()) throw ValidationError("--mle and --n have different lengths");
    if (m.size() < 2) throw ValidationError("need at least two studies");
    std::vector<StudySummary> s;
    for (std::size_t i = 0; i < m.size(); ++i) {
        s.push_back(StudySummary{m[i], k[i]});
        check_summary(s.back());
    }
    return s;
}

std::string contour_csv(const Contour& c, const std::vector<std::string>& comments) {
    csv::Table t;
    t.comments = comments;
    t.header = {"theta", "pi"};
    t.columns = {{c.grid().points().begin(), c.grid().points().end()}, {c.values().begin(), c.values().end()}};
    return csv::format(t);
}

void run_demo_meta(const MetaArgs& a) {
    const auto s = summaries(a.mle, a.n);
    const auto grid = share(range_grid("--theta-grid", a.grid));
    std::string mles, ns;
    for (const auto& x : s) {
        mles += (mles.empty() ? "" : ";") + format_double(x.mle);
        ns += (ns.empty() ? "" : ";") + std::to_string(x.n);
    }
    const std::vector<std::string> head = {
        provenance("demo-meta"),
        kv({{"mle", mles}, {"n", ns}, {"theta_grid", a.grid}, {"mc_reps", std::to_string(a.mc_reps)},
            {"seed", std::to_string(a.seed)}})};
    std::filesystem::path dir(a.output);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + a.output + "': " + ec.message());
    const auto path = [&](const char* f) { return (dir / f).string(); };

    const auto studies = study_contours(grid, s);
    std::ostringstream set_csv;
    for (const auto& c : head) set_csv << "# " << c << '\n';
    write_contour_set(set_csv, studies);
    emit(path("studies.csv"), set_csv.str());
    emit(path("oracle.csv"), contour_csv(exp_oracle_im(grid, s), head));
    emit(path("large_sample.csv"), contour_csv(large_sample_im(grid, s), head));
    const auto avg = meta_avg_fused(studies);
    emit(path("avg_fvn.csv"), format_fused_csv(avg, head));
    std::vector<int> n;
    for (const auto& x : s) n.push_back(x.n);
    const auto wavg = meta_wavg_fused(studies, s, meta_wavg_rule(n, a.mc_reps, a.seed));
    auto wh = head;
    wh.push_back("weights=" + list(inverse_variance_weights(s)));
    emit(path("wavg_fvn.csv"), format_fused_csv(wavg, wh));
}

struct Table4Args {
    std::string output, n = "3,6,9", grid = "0.005:8:0.005", levels = "0.1,0.3,0.5,0.7,0.9";
    std::size_t reps = 10000, mc_reps = 100000;
    double theta = 0.8;
    std::uint64_t seed = 42;
};

void run_table4(const Table4Args& a) {
    MetaSimConfig cfg;
    cfg.reps = a.reps;
    cfg.seed = a.seed;
    cfg.theta_true = a.theta;
    cfg.n = ints("--n", a.n);
    cfg.levels = doubles("--levels", a.levels);
    cfg.grid = share(range_grid("--theta-grid", a.grid));
    cfg.table_reps = a.mc_reps;
    const auto rows = table4(cfg);
    const std::vector<std::string> head = {
        provenance("table4"),
        kv({{"theta", format_double(a.theta)}, {"n", a.n}, {"theta_grid", a.grid}, {"reps", std::to_string(a.reps)},
            {"mc_reps", std::to_string(a.mc_reps)}, {"seed", std::to_string(a.seed)}})};
    emit(a.output, format_width_csv(rows, head));
}

struct ImpArgs {
    std::string output, op = "prod", alpha;
    double c = 100.0;
    std::size_t K = 3, reps = 100000;
    std::uint64_t seed = 42;
};

void run_impossibility(const ImpArgs& a) {
    const auto kind = parse_op_kind(a.op);
    if (kind != OpKind::prod && kind != OpKind::lprod) {
        throw ValidationError("impossibility --operator must be prod or lprod");
    }
    const auto grid = a.alpha.empty() ? impossibility_alpha_grid() : alpha_list("--alpha-grid", a.alpha);
    auto r = impossibility_demo(a.c, a.K, grid, a.reps, a.seed,
                                kind == OpKind::prod ? ImpossibilityVariant::prod : ImpossibilityVariant::lprod);
    r.config.insert(r.config.begin(), provenance("impossibility"));
    emit(a.output, format_report_csv(r));
}

std::string names(std::string_view s) {
    std::string out(s);
    for (auto& ch : out) {
        if (ch == '|') ch = ',';
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fuse possibility contours and audit the validity of fused inferential models.", "possfuse"};
    app.set_version_flag("--version", std::string(kVersion));
    app.set_help_all_flag("--help-all", "Print help for every subcommand and exit");
    app.require_subcommand(1);
    app.footer("Exit status: 0 success, 1 I/O failure, 2 invalid input, 3 numerical failure.\n"
               "POSSFUSE_THREADS caps the worker threads; output does not depend on it.");

    const std::string ops = "Fusion operator: " + names(kOpNames);
    const std::string regimes = "Dependence regime: " + names(kRegimeNames);
    const std::string methods = "Validification method: " + names(kMethodNames) +
                                " (auto picks the recommended rule for the operator and regime)";

    FuseArgs fa;
    auto* fuse = app.add_subcommand("fuse", "Fuse, validify and normalize a contour-set CSV (theta,pi_1,...,pi_K)");
    fuse->add_option("--input", fa.input, "Contour-set CSV")->required();
    fuse->add_option("--output", fa.output, "Output CSV (default: standard output)");
    fuse->add_option("--operator", fa.op, ops)->capture_default_str();
    fuse->add_option("--regime", fa.regime, regimes)->capture_default_str();
    fuse->add_option("--method", fa.method, methods)->capture_default_str();
    fuse->add_option("--weights", fa.weights, "Comma-separated wavg weights summing to 1");
    fuse->add_option("--mc-reps", fa.mc_reps, "Monte Carlo draws for mc validification")->capture_default_str();
    fuse->add_option("--seed", fa.seed, "Random seed")->capture_default_str();
    fuse->add_flag("--shuffle-members", fa.shuffle,
                   "Apply a seeded random order to the members before prefix fusion");

    AuditArgs aa;
    auto* audit = app.add_subcommand("audit", "Empirical validity curve of a validified ranking");
    audit->add_option("--operator,--op", aa.op, ops)->capture_default_str();
    audit->add_option("--regime", aa.regime, regimes)->capture_default_str();
    audit->add_option("--method", aa.method, methods)->capture_default_str();
    audit->add_option("--weights", aa.weights, "Comma-separated wavg weights summing to 1");
    audit->add_option("--K", aa.K, "Number of contours")->capture_default_str();
    audit->add_option("--sampler", aa.sampler, "Joint law of the contour values: " + names(kSamplerNames))
        ->capture_default_str();
    audit->add_option("--rho", aa.rho, "Equicorrelation for gauss_copula (and permuted), in [0,1)")
        ->capture_default_str();
    audit->add_option("--reps", aa.reps, "Replicates")->capture_default_str();
    audit->add_option("--mc-reps", aa.mc_reps, "Monte Carlo draws for mc validification")->capture_default_str();
    audit->add_option("--seed", aa.seed, "Random seed")->capture_default_str();
    audit->add_option("--alpha-grid", aa.alpha, "Comma list or start:stop:step (default 0.01:0.99:0.01)");
    audit->add_option("--output", aa.output, "Output CSV (default: standard output)");

    MetaArgs ma;
    auto* meta = app.add_subcommand("demo-meta", "Exponential meta-analysis contours for replotting");
    meta->add_option("--mle", ma.mle, "Comma-separated study MLEs (default 1.66,0.91,0.78)");
    meta->add_option("--n", ma.n, "Comma-separated study sample sizes (default 3,6,9)");
    meta->add_option("--theta-grid", ma.grid, "Parameter grid start:stop:step")->capture_default_str();
    meta->add_option("--mc-reps", ma.mc_reps, "Draws for the weighted-average validification table")
        ->capture_default_str();
    meta->add_option("--seed", ma.seed, "Random seed")->capture_default_str();
    meta->add_option("--output", ma.output, "Output directory")->capture_default_str();

    Table4Args ta;
    auto* t4 = app.add_subcommand("table4", "Mean interval widths of average and weighted-average fused IMs");
    t4->add_option("--reps", ta.reps, "Simulated meta-analyses")->capture_default_str();
    t4->add_option("--seed", ta.seed, "Random seed")->capture_default_str();
    t4->add_option("--theta", ta.theta, "True exponential rate")->capture_default_str();
    t4->add_option("--n", ta.n, "Comma-separated study sample sizes")->capture_default_str();
    t4->add_option("--theta-grid", ta.grid, "Parameter grid start:stop:step")->capture_default_str();
    t4->add_option("--levels", ta.levels, "Comma-separated confidence levels")->capture_default_str();
    t4->add_option("--mc-reps", ta.mc_reps, "Draws for the weighted-average validification table")
        ->capture_default_str();
    t4->add_option("--output", ta.output, "Output CSV (default: standard output)");

    ImpArgs ia;
    auto* imp = app.add_subcommand("impossibility", "Comonotone counterexample to linear product validification");
    imp->add_option("--c", ia.c, "Rescaling constant")->capture_default_str();
    imp->add_option("--K", ia.K, "Number of contours")->capture_default_str();
    imp->add_option("--operator", ia.op, "prod or lprod")->capture_default_str();
    imp->add_option("--reps", ia.reps, "Replicates")->capture_default_str();
    imp->add_option("--seed", ia.seed, "Random seed")->capture_default_str();
    imp->add_option("--alpha-grid", ia.alpha, "Comma list or start:stop:step (default 1e-4,1e-3,0.01:0.99:0.01)");
    imp->add_option("--output", ia.output, "Output CSV (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*fuse) run_fuse(fa);
        else if (*audit) run_audit(aa);
        else if (*meta) run_demo_meta(ma);
        else if (*t4) run_table4(ta);
        else if (*imp) run_impossibility(ia);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
