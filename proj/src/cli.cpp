#include "xdcc/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "xdcc/chain.hpp"
#include "xdcc/dataset.hpp"
#include "xdcc/grid.hpp"
#include "xdcc/metrics.hpp"
#include "xdcc/models.hpp"

namespace xdcc::cli {

namespace {

/// Flag values shared by all subcommands.
struct RunConfig {
    std::string method;
    std::string train_path;
    std::string test_path;
    std::string format = "mlc-csv";
    std::optional<std::size_t> labels;
    BoostConfig boost;
    std::string gain = "sumGain";
    std::optional<std::size_t> chain_length;
    bool cumulate = false;
    std::uint64_t seed = 0;
    std::string model_out;
    std::string model_in;
    std::string out;
    std::string grid_path;
    std::string scores_path;
};

/// Validation failure of flag combinations.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void add_boost_flags(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--trees", rc.boost.n_rounds, "Boosting rounds (trees) per model");
    cmd->add_option("--depth", rc.boost.max_depth, "Maximum tree depth");
    cmd->add_option("--eta", rc.boost.learning_rate, "Learning rate");
    cmd->add_option("--lambda", rc.boost.lambda, "L2 leaf regularizer");
    cmd->add_option("--gamma", rc.boost.gamma, "Minimum split gain");
    cmd->add_option("--min-child-weight", rc.boost.min_child_weight,
                    "Minimum summed Hessian per child");
    cmd->add_option("--gain", rc.gain, "Split gain strategy");
    cmd->add_option("--seed", rc.seed, "Random seed");
}

void add_data_flags(CLI::App* cmd, RunConfig& rc) {
    cmd->add_option("--format", rc.format, "mlc-csv or svmlight-ml");
    cmd->add_option("--labels", rc.labels, "Label count for svmlight-ml files");
}

// Unknown enum names on the command line are usage errors.
template <typename F>
auto flag_value(F parse, const std::string& text) {
    try {
        return parse(text);
    } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
    }
}

Dataset load(const RunConfig& rc, const std::string& path) {
    return load_dataset(path, flag_value(parse_data_format, rc.format), rc.labels);
}

ModelSpec make_spec(const RunConfig& rc) {
    ModelSpec spec;
    spec.method = flag_value(parse_method, rc.method);
    if (rc.cumulate) {
        if (!is_chain_method(spec.method))
            throw UsageError("--cumulate applies only to xdcc");
        spec.method = Method::XDCCCum;
    }
    if (rc.chain_length && !is_chain_method(spec.method))
        throw UsageError("--chain-length applies only to xdcc and xdcc-cum");
    spec.config = rc.boost;
    spec.config.gain = flag_value(parse_gain_strategy, rc.gain);
    spec.config.validate();
    spec.chain_length = rc.chain_length;
    spec.seed = rc.seed;
    return spec;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string predictions_csv(const LabelMatrix& pred, const std::vector<std::string>& names) {
    std::string out;
    for (std::size_t j = 0; j < names.size(); ++j)
        out += names[j] + (j + 1 < names.size() ? "," : "\n");
    for (std::size_t i = 0; i < pred.rows(); ++i)
        for (std::size_t j = 0; j < pred.cols(); ++j) {
            out += pred(i, j) ? '1' : '0';
            out += j + 1 < pred.cols() ? ',' : '\n';
        }
    return out;
}

int cmd_train(const RunConfig& rc, std::ostream& out) {
    const ModelSpec spec = make_spec(rc);
    const Dataset train = load(rc, rc.train_path);
    AnyModel model;
    if (is_chain_method(spec.method)) {
        const std::size_t length = spec.chain_length.value_or(train.n_labels());
        const auto start = std::chrono::steady_clock::now();
        auto [chain, trace] = train_chain(train, spec.config, length, spec.seed,
                                          spec.method == Method::XDCCCum);
        model.train_seconds = seconds_since(start);
        const auto metrics = round_metrics(trace, train.labels(), chain.cumulate);
        for (const auto& m : metrics)
            out << "round " << m.round << " seconds=" << trace.seconds[m.round - 1]
                << " HA=" << m.hamming << " SA=" << m.subset << " F1=" << m.f1
                << " pos_frac=" << m.pos_frac << " neg_frac=" << m.neg_frac << '\n';
        if (!rc.out.empty())
            write_file(rc.out, round_metrics_csv(metrics));
        model.method = spec.method;
        model.n_features = train.n_features();
        model.n_labels = train.n_labels();
        model.model = std::move(chain);
    } else {
        model = train_model(train, spec);
    }
    out << "trained " << to_string(model.method) << " in " << model.train_seconds << " s\n";
    save_model(model, rc.model_out);
    return 0;
}

int cmd_evaluate(const RunConfig& rc, std::ostream& out) {
    const AnyModel model = load_model(rc.model_in);
    const Dataset test = load(rc, rc.test_path);
    if (test.n_labels() != model.n_labels)
        throw std::invalid_argument("test set has " + std::to_string(test.n_labels()) +
                                    " labels, model expects " + std::to_string(model.n_labels));
    const auto start = std::chrono::steady_clock::now();
    const LabelMatrix pred = predict_model(model, test.features());
    MetricsReport r = evaluate(test.labels(), pred);
    r.predict_seconds = seconds_since(start);
    r.train_seconds = model.train_seconds;
    out << "method=" << to_string(model.method) << " HA=" << format_real(r.hamming)
        << " SA=" << format_real(r.subset) << " F1=" << format_real(r.f1)
        << " train_time=" << r.train_seconds << " predict_time=" << r.predict_seconds << '\n';
    if (!rc.out.empty())
        write_file(rc.out, "method,HA,SA,F1,train_time,predict_time\n" +
                               std::string(to_string(model.method)) + ',' + format_real(r.hamming) +
                               ',' + format_real(r.subset) + ',' + format_real(r.f1) + ',' +
                               format_real(r.train_seconds) + ',' + format_real(r.predict_seconds) +
                               '\n');
    return 0;
}

int cmd_predict(const RunConfig& rc, std::ostream& out) {
    const AnyModel model = load_model(rc.model_in);
    const Dataset test = load(rc, rc.test_path);
    const LabelMatrix pred = predict_model(model, test.features());
    const std::string csv = predictions_csv(pred, test.label_names());
    if (rc.out.empty())
        out << csv;
    else
        write_file(rc.out, csv);
    return 0;
}

int cmd_chain_curve(const RunConfig& rc, std::ostream& out) {
    RunConfig chain_rc = rc;
    if (chain_rc.method.empty())
        chain_rc.method = "xdcc";
    const ModelSpec spec = make_spec(chain_rc);
    if (!is_chain_method(spec.method))
        throw UsageError("chain-curve needs --method xdcc or xdcc-cum");
    const Dataset train = load(rc, rc.train_path);
    const Dataset test = load(rc, rc.test_path);
    if (test.n_labels() != train.n_labels())
        throw std::invalid_argument("train and test label counts differ");
    const std::size_t r_max = spec.chain_length.value_or(train.n_labels());

    const auto [chain, train_trace] = train_chain(train, spec.config, r_max, spec.seed);
    const auto pred = predict_chain(chain, test.features());

    std::string csv = "variant,round,HA,SA,F1,pos_frac,neg_frac,cum_train_seconds\n";
    for (const bool cumulate : {false, true}) {
        const auto metrics = round_metrics(pred.trace, test.labels(), cumulate);
        double cum_time = 0.0;
        for (const auto& m : metrics) {
            cum_time += train_trace.seconds[m.round - 1];
            csv += std::string(cumulate ? "xdcc-cum" : "xdcc") + ',' + std::to_string(m.round) +
                   ',' + format_real(m.hamming) + ',' + format_real(m.subset) + ',' +
                   format_real(m.f1) + ',' + format_real(m.pos_frac) + ',' +
                   format_real(m.neg_frac) + ',' + format_real(cum_time) + '\n';
        }
    }
    if (rc.out.empty())
        out << csv;
    else
        write_file(rc.out, csv);
    return 0;
}

int cmd_grid(const RunConfig& rc, std::ostream& out) {
    Method method = flag_value(parse_method, rc.method);
    if (rc.cumulate) {
        if (!is_chain_method(method))
            throw UsageError("--cumulate applies only to xdcc");
        method = Method::XDCCCum;
    }
    const Dataset train = load(rc, rc.train_path);
    const GridSpec grid = load_grid(rc.grid_path);
    const GridResult result = grid_search(train, grid, method, rc.seed);
    const std::string best = best_config_text(result.best);
    out << best << "# validation F1=" << format_real(result.best_f1) << '\n';
    if (!rc.out.empty()) {
        write_file(rc.out, grid_table_csv(result));
        write_file(rc.out + ".best", best);
    }
    return 0;
}

int cmd_rank(const RunConfig& rc, std::ostream& out) {
    std::ifstream in(rc.scores_path);
    if (!in)
        throw std::runtime_error("cannot open '" + rc.scores_path + "'");
    ScoreTable scores;
    std::string line;
    std::getline(in, line); // header: dataset,method,score
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream ss(line);
        std::string dataset, method, score;
        if (!std::getline(ss, dataset, ',') || !std::getline(ss, method, ',') ||
            !std::getline(ss, score))
            throw ParseError(line_no, "expected dataset,method,score");
        try {
            scores[dataset][method] = std::stod(score);
        } catch (const std::exception&) {
            throw ParseError(line_no, "unparsable score '" + score + "'");
        }
    }
    const std::string csv = rank_table_csv(rank_table(scores));
    if (rc.out.empty())
        out << csv;
    else
        write_file(rc.out, csv);
    return 0;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig rc;
    CLI::App app{"Multi-label boosted trees and dynamic classifier chains", "xdcc"};
    app.require_subcommand(1);

    auto* train = app.add_subcommand("train", "Train a model and save it");
    train->add_option("--method", rc.method, "br, cc, mlxgb, xdcc or xdcc-cum")->required();
    train->add_option("--train", rc.train_path, "Training data")->required();
    train->add_option("--chain-length", rc.chain_length, "Chain length (xdcc variants)");
    train->add_flag("--cumulate", rc.cumulate, "Use cumulated predictions (xdcc)");
    train->add_option("--model-out", rc.model_out, "Model output path")->required();
    train->add_option("--out", rc.out, "Per-round training metrics CSV (xdcc variants)");
    add_boost_flags(train, rc);
    add_data_flags(train, rc);

    auto* evaluate_cmd = app.add_subcommand("evaluate", "Evaluate a saved model on test data");
    evaluate_cmd->add_option("--model-in", rc.model_in, "Model path")->required();
    evaluate_cmd->add_option("--test", rc.test_path, "Test data")->required();
    evaluate_cmd->add_option("--out", rc.out, "Metrics CSV path");
    add_data_flags(evaluate_cmd, rc);

    auto* predict = app.add_subcommand("predict", "Write binary predictions as CSV");
    predict->add_option("--model-in", rc.model_in, "Model path")->required();
    predict->add_option("--test", rc.test_path, "Input data")->required();
    predict->add_option("--out", rc.out, "Predictions CSV path (stdout if omitted)");
    add_data_flags(predict, rc);

    auto* curve = app.add_subcommand("chain-curve", "Per-round metrics for chain prefixes");
    curve->add_option("--method", rc.method, "xdcc (default) or xdcc-cum");
    curve->add_option("--train", rc.train_path, "Training data")->required();
    curve->add_option("--test", rc.test_path, "Test data")->required();
    curve->add_option("--chain-length", rc.chain_length, "Maximum chain length");
    curve->add_flag("--cumulate", rc.cumulate, "Accepted for symmetry; both variants are emitted");
    curve->add_option("--out", rc.out, "Curve CSV path (stdout if omitted)");
    add_boost_flags(curve, rc);
    add_data_flags(curve, rc);

    auto* grid = app.add_subcommand("grid", "Grid search on a 20% validation holdout");
    grid->add_option("--method", rc.method, "Method to tune")->required();
    grid->add_option("--train", rc.train_path, "Training data")->required();
    grid->add_option("--grid", rc.grid_path, "Grid file (key=v1,v2,... per line)")->required();
    grid->add_flag("--cumulate", rc.cumulate, "Tune xdcc with cumulated predictions");
    grid->add_option("--seed", rc.seed, "Random seed");
    grid->add_option("--out", rc.out, "Validation table CSV; best config goes to <out>.best");
    add_data_flags(grid, rc);

    auto* rank = app.add_subcommand("rank", "Average ranks from dataset,method,score CSV");
    rank->add_option("scores", rc.scores_path, "Scores CSV")->required();
    rank->add_option("--out", rc.out, "Rank CSV path (stdout if omitted)");

    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return 2;
    }

    try {
        if (train->parsed())
            return cmd_train(rc, out);
        if (evaluate_cmd->parsed())
            return cmd_evaluate(rc, out);
        if (predict->parsed())
            return cmd_predict(rc, out);
        if (curve->parsed())
            return cmd_chain_curve(rc, out);
        if (grid->parsed())
            return cmd_grid(rc, out);
        if (rank->parsed())
            return cmd_rank(rc, out);
    } catch (const UsageError& e) {
        err << "error[usage]: " << e.what() << '\n';
        return 2;
    } catch (const ParseError& e) {
        err << "error[parse]: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        err << "error[argument]: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error[runtime]: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace xdcc::cli
