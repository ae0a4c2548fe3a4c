#include "xdcc/grid.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "xdcc/metrics.hpp"

namespace xdcc {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
        s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
        s.remove_suffix(1);
    return s;
}

template <typename T>
T parse_number(std::string_view tok, std::string_view key) {
    tok = trim(tok);
    T v{};
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty())
        throw std::invalid_argument("grid: bad value '" + std::string(tok) + "' for key '" +
                                    std::string(key) + "'");
    return v;
}

template <typename T, typename F>
std::vector<T> parse_list(std::string_view values, std::string_view key, F&& parse_one) {
    std::vector<T> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = values.find(',', start);
        out.push_back(parse_one(values.substr(start, comma == std::string_view::npos
                                                          ? std::string_view::npos
                                                          : comma - start)));
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    if (out.empty())
        throw std::invalid_argument("grid: empty list for key '" + std::string(key) + "'");
    return out;
}

template <typename T>
std::vector<T> or_default(const std::vector<T>& v, T fallback) {
    return v.empty() ? std::vector<T>{fallback} : v;
}

} // namespace

std::size_t GridSpec::cardinality() const noexcept {
    const auto n = [](std::size_t s) { return s == 0 ? std::size_t{1} : s; };
    return n(trees.size()) * n(depth.size()) * n(eta.size()) * n(lambda.size()) * n(gamma.size()) *
           n(min_child_weight.size()) * n(gain.size()) * n(chain_length.size());
}

GridSpec parse_grid(std::string_view text) {
    GridSpec g;
    std::istringstream in{std::string(text)};
    std::string raw_line;
    std::size_t line_no = 0;
    while (std::getline(in, raw_line)) {
        ++line_no;
        const auto line = trim(raw_line);
        if (line.empty() || line.front() == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw std::invalid_argument("grid line " + std::to_string(line_no) +
                                        ": expected key=v1,v2,...");
        std::string key(trim(line.substr(0, eq)));
        for (auto& c : key)
            if (c == '-')
                c = '_';
        const auto values = trim(line.substr(eq + 1));
        if (key == "trees")
            g.trees = parse_list<int>(values, key, [&](auto t) { return parse_number<int>(t, key); });
        else if (key == "depth")
            g.depth = parse_list<int>(values, key, [&](auto t) { return parse_number<int>(t, key); });
        else if (key == "eta")
            g.eta = parse_list<double>(values, key, [&](auto t) { return parse_number<double>(t, key); });
        else if (key == "lambda")
            g.lambda = parse_list<double>(values, key, [&](auto t) { return parse_number<double>(t, key); });
        else if (key == "gamma")
            g.gamma = parse_list<double>(values, key, [&](auto t) { return parse_number<double>(t, key); });
        else if (key == "min_child_weight")
            g.min_child_weight =
                parse_list<double>(values, key, [&](auto t) { return parse_number<double>(t, key); });
        else if (key == "gain")
            g.gain = parse_list<GainStrategy>(values, key,
                                              [](auto t) { return parse_gain_strategy(trim(t)); });
        else if (key == "chain_length")
            g.chain_length = parse_list<std::size_t>(
                values, key, [&](auto t) { return parse_number<std::size_t>(t, key); });
        else
            throw std::invalid_argument("grid line " + std::to_string(line_no) + ": unknown key '" +
                                        key + "'");
    }
    return g;
}

GridSpec load_grid(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_grid(ss.str());
}

GridSpec default_xdcc_grid() {
    GridSpec g;
    g.depth = {5, 10, 20, 50, 100};
    g.trees = {10, 20, 50, 100};
    g.eta = {0.1, 0.2, 0.3};
    g.gain.assign(kAllGainStrategies.begin(), kAllGainStrategies.end());
    return g;
}

std::vector<ModelSpec> enumerate_grid(const GridSpec& grid, const ModelSpec& base) {
    if (!grid.chain_length.empty() && !is_chain_method(base.method))
        throw std::invalid_argument("grid: chain_length applies only to xdcc and xdcc-cum");
    const auto& c = base.config;
    std::vector<std::optional<std::size_t>> lengths;
    if (grid.chain_length.empty())
        lengths.push_back(base.chain_length);
    else
        for (auto l : grid.chain_length)
            lengths.emplace_back(l);

    std::vector<ModelSpec> out;
    for (int trees : or_default(grid.trees, c.n_rounds))
        for (int depth : or_default(grid.depth, c.max_depth))
            for (double eta : or_default(grid.eta, c.learning_rate))
                for (double lambda : or_default(grid.lambda, c.lambda))
                    for (double gamma : or_default(grid.gamma, c.gamma))
                        for (double mcw : or_default(grid.min_child_weight, c.min_child_weight))
                            for (GainStrategy gain : or_default(grid.gain, c.gain))
                                for (const auto& len : lengths) {
                                    ModelSpec s = base;
                                    s.config = {trees, depth, eta, lambda, gamma, mcw, gain};
                                    s.config.validate();
                                    s.chain_length = len;
                                    out.push_back(s);
                                }
    return out;
}

GridResult grid_search(const Dataset& train, const GridSpec& grid, Method method,
                       std::uint64_t seed, double holdout) {
    ModelSpec base;
    base.method = method;
    base.seed = seed;
    const auto specs = enumerate_grid(grid, base);
    if (specs.empty())
        throw std::invalid_argument("grid: empty grid");

    const auto [fit_rows, val_rows] = holdout_indices(train.n_rows(), holdout, seed);
    const Dataset fit = train.subset(fit_rows);
    const Dataset val = train.subset(val_rows);

    GridResult result;
    for (const auto& spec : specs) {
        const AnyModel model = train_model(fit, spec);
        const double f1 = example_f1(val.labels(), predict_model(model, val.features()));
        result.table.push_back({spec, f1});
        if (result.table.size() == 1 || f1 > result.best_f1) {
            result.best = spec;
            result.best_f1 = f1;
        }
    }
    return result;
}

std::string grid_table_csv(const GridResult& r) {
    std::string out = "method,trees,depth,eta,lambda,gamma,min_child_weight,gain,chain_length,F1\n";
    for (const auto& row : r.table) {
        const auto& c = row.spec.config;
        out += std::string(to_string(row.spec.method)) + ',' + std::to_string(c.n_rounds) + ',' +
               std::to_string(c.max_depth) + ',' + format_real(c.learning_rate) + ',' +
               format_real(c.lambda) + ',' + format_real(c.gamma) + ',' +
               format_real(c.min_child_weight) + ',' + std::string(to_string(c.gain)) + ',' +
               (row.spec.chain_length ? std::to_string(*row.spec.chain_length) : std::string()) +
               ',' + format_real(row.f1) + '\n';
    }
    return out;
}

std::string best_config_text(const ModelSpec& spec) {
    const auto& c = spec.config;
    std::string out = "# method=" + std::string(to_string(spec.method)) + '\n';
    out += "trees=" + std::to_string(c.n_rounds) + '\n';
    out += "depth=" + std::to_string(c.max_depth) + '\n';
    out += "eta=" + format_real(c.learning_rate) + '\n';
    out += "lambda=" + format_real(c.lambda) + '\n';
    out += "gamma=" + format_real(c.gamma) + '\n';
    out += "min_child_weight=" + format_real(c.min_child_weight) + '\n';
    out += "gain=" + std::string(to_string(c.gain)) + '\n';
    if (spec.chain_length)
        out += "chain_length=" + std::to_string(*spec.chain_length) + '\n';
    return out;
}

} // namespace xdcc
