// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "xdcc/baselines.hpp"
#include "xdcc/chain.hpp"
#include "xdcc/cli.hpp"
#include "xdcc/grid.hpp"
#include "xdcc/metrics.hpp"
#include "xdcc/models.hpp"
#include "xdcc/synth.hpp"

using namespace xdcc;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) {
    return std::chrono::duration<double>(Clock::now() - t).count();
}

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

std::filesystem::path tmp() {
    std::filesystem::path p = XDCC_TEST_TMP;
    std::filesystem::create_directories(p);
    return p;
}

BoostConfig config(GainStrategy g, int trees = 10, int depth = 4) {
    BoostConfig c;
    c.n_rounds = trees;
    c.max_depth = depth;
    c.gain = g;
    return c;
}

// Emotions-shaped data shared by the chain-behaviour criteria.
struct Emotions {
    Dataset train, test;
    double cardinality = 0.0;
    ModelSpec tuned;
    double tuned_f1 = 0.0;
};

const Emotions& emotions() {
    static const Emotions e = [] {
        const auto d = synth::make_multilabel({}, 42);
        auto [train, test] = split_holdout(d, 0.3, 7);
        double positives = 0.0;
        for (auto v : d.labels().values())
            positives += v;
        GridSpec g;
        g.trees = {20};
        g.depth = {3, 6};
        g.eta = {0.3};
        g.gain = std::vector(kAllGainStrategies.begin(), kAllGainStrategies.end());
        const auto r = grid_search(train, g, Method::XDCC, 7);
        return Emotions{train, test, positives / static_cast<double>(d.n_rows()), r.best,
                        r.best_f1};
    }();
    return e;
}

Outcome table_scores() {
    GradStats s(4);
    const std::vector<double> y_hat{0.8, 0.2, 0.9, 0.1}, y{1, 1, 0, 0};
    for (std::size_t j = 0; j < 4; ++j)
        s.grad[j] = y_hat[j] - y[j];
    const std::array<double, 6> expected{1.50, 0.81, 0.0, 0.8, 2.0, 0.9};
    double worst = 0.0;
    std::string got;
    for (std::size_t i = 0; i < 6; ++i) {
        const double v = node_score(kAllGainStrategies[i], s, 1.0);
        worst = std::max(worst, std::abs(v - expected[i]));
        got += (i ? "," : "") + fmt(v);
    }
    return {worst <= 1e-12, "scores (" + got + ") max abs err " + fmt(worst)};
}

Outcome gradient_fd() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (int y : {0, 1})
        for (int k = 0; k < 25; ++k) {
            const double raw = -6.0 + 12.0 * k / 24.0;
            const auto gh = compute_grad_hess(y, raw);
            const long double fg = oracle::fd_grad(y, raw), fh = oracle::fd_hess(y, raw);
            worst = std::max(worst, static_cast<double>(std::abs(gh.g - fg) / std::abs(fg)));
            worst = std::max(worst, static_cast<double>(std::abs(gh.h - fh) / std::abs(fh)));
        }
    const double t = seconds_since(start);
    return {worst <= 1e-6 && t < 1.0,
            "50 points, max rel err " + fmt(worst) + ", " + fmt(t) + " s"};
}

Outcome split_oracle() {
    const auto start = Clock::now();
    std::mt19937_64 rng(2024);
    int mismatches = 0, with_split = 0;
    for (int i = 0; i < 200; ++i) {
        const auto p = oracle::random_split_problem(rng);
        mismatches += !oracle::split_matches_oracle(p);
        with_split += find_best_split(p.x, p.rows, p.gp, p.config).has_value();
    }
    const double t = seconds_since(start);
    return {mismatches == 0 && t < 30.0,
            "200 problems, " + std::to_string(mismatches) + " mismatches, " +
                std::to_string(with_split) + " with a split, " + fmt(t) + " s"};
}

Outcome chain_one_is_mlxgb() {
    const auto d = synth::make_multilabel({.rows = 150, .features = 10, .labels = 5,
                                           .missing_rate = 0.1},
                                          3);
    int differ = 0;
    for (auto g : kAllGainStrategies) {
        const auto c = config(g);
        const auto [chain, trace] = train_chain(d, c, 1, 0);
        const auto ml = train_mlxgb(d, c);
        const auto a = predict_chain(chain, d.features()).trace.y_hat[0];
        const auto b = predict_mlxgb_proba(ml, d.features());
        differ += !(a == b && trace.y_hat[0] == b && chain.rounds[0].trees() == ml.booster.trees());
    }
    return {differ == 0, "6 gain strategies, " + std::to_string(differ) + " differing"};
}

// Propagation written out independently of the library.
std::vector<FeatureValue> reference_propagate(const std::vector<FeatureValue>& prev,
                                              const std::vector<double>& y) {
    std::vector<std::size_t> unknown;
    for (std::size_t j = 0; j < prev.size(); ++j)
        if (prev[j].is_missing())
            unknown.push_back(j);
    auto next = prev;
    if (unknown.empty())
        return next;
    std::size_t hi = unknown[0], lo = unknown[0];
    for (auto j : unknown) {
        if (y[j] > y[hi])
            hi = j;
        if (y[j] < y[lo])
            lo = j;
    }
    const std::size_t pick = y[hi] >= 0.5 ? hi : lo;
    next[pick] = FeatureValue(y[pick]);
    return next;
}

Outcome propagation_properties() {
    std::mt19937_64 rng(99);
    std::uniform_int_distribution<int> n_dist(1, 8), grid(0, 20);
    std::bernoulli_distribution known(0.4);
    int failures = 0, hit_empty = 0;
    for (int i = 0; i < 1000; ++i) {
        const std::size_t n = static_cast<std::size_t>(n_dist(rng));
        std::vector<FeatureValue> prev(n);
        std::vector<double> y(n);
        // Coarse probabilities so ties and the 0.5 boundary occur.
        for (std::size_t j = 0; j < n; ++j) {
            y[j] = grid(rng) / 20.0;
            if (known(rng))
                prev[j] = FeatureValue(grid(rng) / 20.0);
        }
        const auto next = propagate(prev, y);
        const auto expect = reference_propagate(prev, y);
        std::size_t before = 0, after = 0;
        bool kept = true;
        for (std::size_t j = 0; j < n; ++j) {
            before += prev[j].has_value();
            after += next[j].has_value();
            if (prev[j].has_value() && !(next[j] == prev[j]))
                kept = false;
        }
        const bool grew = before == n ? after == n : after == before + 1;
        hit_empty += before == n;
        failures += !(next == expect && kept && grew);
    }
    return {failures == 0, "1000 rows, " + std::to_string(failures) + " violations (" +
                               std::to_string(hit_empty) + " fully known)"};
}

Outcome separate_and_conquer() {
    const auto d = synth::make_multilabel({.rows = 30, .features = 4, .labels = 3}, 6);
    const auto c = config(GainStrategy::SumGain, 5, 3);
    const auto [plain, trace] = train_chain(d, c, 3, 0);
    std::vector<PropagationState> seen{PropagationState(30, 3)};
    seen.push_back(trace.states[0]);
    seen.push_back(trace.states[1]);

    std::size_t trees_done = 0, nodes = 0, masked = 0, violations = 0;
    TrainHooks hooks;
    hooks.on_tree = [&](int, const RealMatrix&) { ++trees_done; };
    hooks.on_node = [&](int, int, std::span<const std::size_t> rows, const GradStats& stats,
                        const GradientPairs& gp) {
        const auto& p = seen.at(trees_done / static_cast<std::size_t>(c.n_rounds));
        GradStats active(3);
        for (auto r : rows)
            for (std::size_t j = 0; j < 3; ++j) {
                if (p(r, j).has_value()) {
                    ++masked;
                    violations += gp.grad(r, j) != 0.0 || gp.hess(r, j) != 0.0;
                } else {
                    active.grad[j] += gp.grad(r, j);
                    active.hess[j] += gp.hess(r, j);
                }
            }
        violations += !(stats == active);
        ++nodes;
    };
    const auto [hooked, _] = train_chain(d, c, 3, 0, false, &hooks);

    // Flipping the targets of cells masked in the last round changes nothing there.
    LabelMatrix flipped = d.labels();
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            if (trace.states[1](i, j).has_value())
                flipped(i, j) ^= 1;
    LabelMatrix active(30, 3);
    for (std::size_t i = 0; i < 30; ++i)
        for (std::size_t j = 0; j < 3; ++j)
            active(i, j) = trace.states[1](i, j).is_missing();
    const auto x3 = concat_columns(d.features(), trace.states[1]);
    const bool flip_same = train_booster(x3, d.labels(), active, c) ==
                           train_booster(x3, flipped, active, c);

    return {violations == 0 && masked > 0 && hooked == plain && flip_same,
            std::to_string(nodes) + " nodes, " + std::to_string(masked) + " masked cell visits, " +
                std::to_string(violations) + " violations, flipped-target model " +
                (flip_same ? "identical" : "differs")};
}

Outcome cumulation_dominance() {
    const auto& e = emotions();
    ModelSpec spec = e.tuned;
    const auto [chain, trace] = train_chain(e.train, spec.config, e.train.n_labels(), 0);
    auto cum_model = chain;
    cum_model.cumulate = true;
    const auto std_pred = predict_chain(chain, e.test.features()).labels;
    const auto cum_pred = predict_chain(cum_model, e.test.features()).labels;
    std::size_t bad = 0;
    for (std::size_t i = 0; i < std_pred.rows(); ++i) {
        std::size_t a = 0, b = 0;
        for (std::size_t j = 0; j < std_pred.cols(); ++j) {
            a += std_pred(i, j);
            b += cum_pred(i, j);
        }
        bad += b < a;
    }
    return {bad == 0, std::to_string(std_pred.rows()) + " test rows, " + std::to_string(bad) +
                          " with fewer cumulated positives"};
}

std::string curve(const std::vector<RoundMetrics>& m) {
    std::string s;
    for (const auto& r : m)
        s += (s.empty() ? "" : " ") + fmt(r.subset);
    return s;
}

Outcome chain_curves() {
    const auto& e = emotions();
    const auto& c = e.tuned.config;
    const auto [chain, trace] = train_chain(e.train, c, e.train.n_labels(), 0);
    const auto pred = predict_chain(chain, e.test.features());
    const auto std_m = round_metrics(pred.trace, e.test.labels(), false);
    const auto cum_m = round_metrics(pred.trace, e.test.labels(), true);
    const auto upto = static_cast<std::size_t>(std::ceil(e.cardinality));
    bool monotone = true;
    for (std::size_t r = 1; r < std::min(upto, std_m.size()); ++r)
        monotone = monotone && std_m[r].subset >= std_m[r - 1].subset;
    const double gap = std::abs(cum_m[1].subset - cum_m.back().subset);
    return {monotone && gap <= 0.02,
            "tuned " + std::string(to_string(c.gain)) + " depth=" + std::to_string(c.max_depth) +
                " (val F1 " + fmt(e.tuned_f1) + "), cardinality " + fmt(e.cardinality) +
                "; std SA " + curve(std_m) + "; cum SA " + curve(cum_m) + "; |cum r2 - final| " +
                fmt(gap)};
}

Outcome max_weight_positive_first() {
    const auto& e = emotions();
    const auto [chain, trace] =
        train_chain(e.train, config(GainStrategy::MaxWeight, 20, 5), e.train.n_labels(), 0);
    const auto pred = predict_chain(chain, e.test.features());
    const auto m = round_metrics(pred.trace, e.test.labels());
    return {m[0].pos_frac > m[0].neg_frac,
            "round 1 pos_frac " + fmt(m[0].pos_frac) + " vs neg_frac " + fmt(m[0].neg_frac)};
}

Outcome loss_descent() {
    int bad_sets = 0;
    double worst_rise = 0.0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto d = synth::make_random(20 + seed * 3, 2 + seed % 4, 1 + seed % 4, seed,
                                          seed % 2 ? 0.1 : 0.0);
        BoostConfig c = config(GainStrategy::SumGain, 15, 3);
        c.gamma = 0.0;
        std::vector<double> losses{
            mean_cross_entropy(d.labels(), RealMatrix(d.n_rows(), d.n_labels(), 0.0))};
        TrainHooks hooks;
        hooks.on_tree = [&](int, const RealMatrix& raw) {
            losses.push_back(mean_cross_entropy(d.labels(), raw));
        };
        train_booster(d.features(), d.labels(), {}, c, &hooks);
        bool ok = true;
        for (std::size_t t = 1; t < losses.size(); ++t) {
            worst_rise = std::max(worst_rise, losses[t] - losses[t - 1]);
            ok = ok && losses[t] <= losses[t - 1];
        }
        bad_sets += !ok;
    }
    return {bad_sets == 0, "20 datasets, " + std::to_string(bad_sets) +
                               " with a rise, largest rise " + fmt(worst_rise)};
}

LabelMatrix rows(std::initializer_list<std::vector<unsigned char>> r) {
    LabelMatrix m;
    for (const auto& row : r)
        m.push_row(row);
    return m;
}

Outcome metric_identities() {
    const auto y = rows({{1, 0, 1}, {0, 1, 0}, {1, 1, 0}, {0, 0, 1}});
    auto one_flip = y;
    one_flip(2, 1) = 0;
    LabelMatrix complement = y;
    for (auto& v : complement.values())
        v ^= 1;
    const auto a = rows({{1, 0, 1}}), b = rows({{1, 1, 1}}), empty = rows({{0, 0}});
    const std::vector<std::pair<double, double>> examples{
        {hamming_accuracy(y, y), 1.0},
        {hamming_accuracy(a, b), 2.0 / 3.0},
        {hamming_accuracy(y, complement), 0.0},
        {subset_accuracy(y, y), 1.0},
        {subset_accuracy(y, one_flip), 0.75},
        {subset_accuracy(y, complement), 0.0},
        {example_f1(a, b), 0.8},
        {example_f1(y, y), 1.0},
        {example_f1(empty, empty), 1.0},
    };
    int wrong_examples = 0;
    for (const auto& [got, want] : examples)
        wrong_examples += got != want;

    std::mt19937_64 rng(17);
    std::bernoulli_distribution coin(0.45);
    int failures = 0;
    for (int t = 0; t < 100; ++t) {
        const std::size_t m = 1 + static_cast<std::size_t>(t % 13), n = 1 + static_cast<std::size_t>(t % 6);
        LabelMatrix y(m, n), p(m, n);
        for (auto& v : y.values())
            v = coin(rng);
        for (auto& v : p.values())
            v = coin(rng);
        double ha = 0, sa = 0, f1 = 0;
        for (std::size_t i = 0; i < m; ++i) {
            std::size_t same = 0, tp = 0, ny = 0, np = 0;
            for (std::size_t j = 0; j < n; ++j) {
                same += y(i, j) == p(i, j);
                tp += y(i, j) && p(i, j);
                ny += y(i, j);
                np += p(i, j);
            }
            ha += static_cast<double>(same) / static_cast<double>(n);
            sa += same == n;
            f1 += ny + np == 0 ? 1.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(ny + np);
        }
        ha /= static_cast<double>(m);
        sa /= static_cast<double>(m);
        f1 /= static_cast<double>(m);
        const double HA = hamming_accuracy(y, p), SA = subset_accuracy(y, p), F1 = example_f1(y, p);
        const bool ok = std::abs(HA - ha) < 1e-12 && std::abs(SA - sa) < 1e-12 &&
                        std::abs(F1 - f1) < 1e-12 && SA <= HA && hamming_accuracy(y, y) == 1.0 &&
                        subset_accuracy(y, y) == 1.0 && example_f1(y, y) == 1.0 &&
                        HA == hamming_accuracy(p, y);
        failures += !ok;
    }
    return {failures == 0 && wrong_examples == 0,
            std::to_string(examples.size() - static_cast<std::size_t>(wrong_examples)) + "/" +
                std::to_string(examples.size()) + " examples exact; 100 random matrices, " +
                std::to_string(failures) + " failures"};
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// Drops the named columns from a CSV.
std::string strip_columns(const std::string& csv, const std::vector<std::string>& drop) {
    std::istringstream in(csv);
    std::string line, out;
    std::vector<bool> keep;
    while (std::getline(in, line)) {
        std::vector<std::string> f;
        std::istringstream ls(line);
        for (std::string x; std::getline(ls, x, ',');)
            f.push_back(x);
        if (keep.empty())
            for (const auto& name : f)
                keep.push_back(std::ranges::find(drop, name) == drop.end());
        for (std::size_t i = 0; i < f.size(); ++i)
            if (i < keep.size() && keep[i])
                out += f[i] + ',';
        out += '\n';
    }
    return out;
}

int cli(std::vector<std::string> args) {
    args.insert(args.begin(), "xdcc");
    std::ostringstream out, err;
    return cli::run(args, out, err);
}

Outcome persistence_and_determinism() {
    const auto d = synth::make_multilabel({.rows = 160, .features = 10, .labels = 4,
                                           .missing_rate = 0.05},
                                          11);
    const auto [train, test] = split_holdout(d, 0.25, 3);
    const auto dir = tmp() / "persist";
    std::filesystem::create_directories(dir);
    int mismatched = 0;
    for (auto method : {Method::BR, Method::CC, Method::MLXGB, Method::XDCC, Method::XDCCCum}) {
        ModelSpec spec;
        spec.method = method;
        spec.config = config(GainStrategy::MaxWeight, 6, 4);
        spec.seed = 5;
        const auto model = train_model(train, spec);
        const auto path = dir / (std::string(to_string(method)) + ".json");
        save_model(model, path);
        const auto back = load_model(path);
        mismatched += !(predict_model(back, test.features()) == predict_model(model, test.features()));
        save_model(back, dir / "again.json");
        mismatched += read_text(path) != read_text(dir / "again.json");
    }

    save_mlc_csv(train, dir / "train.csv");
    save_mlc_csv(test, dir / "test.csv");
    write_text(dir / "grid.txt", "trees=3,5\ndepth=2\ngain=sumGain,maxWeight\n");
    const auto t = (dir / "train.csv").string(), s = (dir / "test.csv").string();
    int failed_runs = 0;
    const std::vector<std::string> outputs{"rounds.csv", "eval.csv", "pred.csv", "curve.csv",
                                           "grid.csv", "grid.csv.best"};
    for (int run = 0; run < 2; ++run) {
        const auto run_dir = dir / ("run" + std::to_string(run));
        std::filesystem::create_directories(run_dir);
        const auto p = [&](const std::string& name) { return (run_dir / name).string(); };
        failed_runs += cli({"train", "--method", "cc", "--train", t, "--trees", "5", "--seed", "9",
                            "--model-out", p("cc.json")});
        failed_runs += cli({"train", "--method", "xdcc", "--train", t, "--trees", "5", "--seed", "9",
                            "--model-out", p("xdcc.json"), "--out", p("rounds.csv")});
        failed_runs += cli({"evaluate", "--model-in", p("cc.json"), "--test", s, "--out",
                            p("eval.csv")});
        failed_runs += cli({"predict", "--model-in", p("xdcc.json"), "--test", s, "--out",
                            p("pred.csv")});
        failed_runs += cli({"chain-curve", "--train", t, "--test", s, "--trees", "5", "--seed", "9",
                            "--out", p("curve.csv")});
        failed_runs += cli({"grid", "--method", "xdcc", "--train", t, "--grid",
                            (dir / "grid.txt").string(), "--seed", "9", "--out", p("grid.csv")});
    }
    std::string differing;
    for (const auto& name : outputs) {
        auto a = read_text(dir / "run0" / name), b = read_text(dir / "run1" / name);
        if (name == "eval.csv") {
            a = strip_columns(a, {"train_time", "predict_time"});
            b = strip_columns(b, {"train_time", "predict_time"});
        } else if (name == "curve.csv") {
            a = strip_columns(a, {"cum_train_seconds"});
            b = strip_columns(b, {"cum_train_seconds"});
        }
        if (a.empty() || a != b)
            differing += " " + name;
    }
    return {mismatched == 0 && differing.empty() && failed_runs == 0,
            "5 model kinds, " + std::to_string(mismatched) + " save/load mismatches; " +
                std::to_string(outputs.size()) + " CLI CSV outputs " +
                (differing.empty() ? "byte-identical" : "differ:" + differing) +
                " across equal-seed runs" +
                (failed_runs ? " (a CLI run failed)" : "")};
}

} // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"node scores of the worked example", table_scores},
        {"gradient and Hessian match finite differences", gradient_fd},
        {"split search matches brute force", split_oracle},
        {"chain of length 1 equals ML-XGB", chain_one_is_mlxgb},
        {"propagation properties", propagation_properties},
        {"separate-and-conquer masking", separate_and_conquer},
        {"cumulation never loses positives", cumulation_dominance},
        {"chain subset-accuracy curves", chain_curves},
        {"maxWeight propagates positives first", max_weight_positive_first},
        {"training loss is non-increasing", loss_descent},
        {"metric identities", metric_identities},
        {"persistence and determinism", persistence_and_determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (i + 1) << "] " << criteria[i].first
                  << ": " << o.detail << std::endl;
    }
    std::cout << (criteria.size() - static_cast<std::size_t>(failed)) << "/" << criteria.size()
              << " criteria passed" << std::endl;
    return failed == 0 ? 0 : 1;
}
