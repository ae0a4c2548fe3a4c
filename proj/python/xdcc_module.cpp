#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "xdcc/chain.hpp"
#include "xdcc/dataset.hpp"
#include "xdcc/gains.hpp"
#include "xdcc/metrics.hpp"
#include "xdcc/models.hpp"
#include "xdcc/synth.hpp"

namespace py = pybind11;
using namespace xdcc;

namespace {

using Row = std::vector<std::optional<double>>;
using Rows = std::vector<Row>;
using LabelRows = std::vector<std::vector<int>>;

FeatureValue to_value(const std::optional<double>& v) {
    return v ? FeatureValue(*v) : FeatureValue::missing();
}

std::optional<double> from_value(const FeatureValue& v) {
    if (v.is_missing())
        return std::nullopt;
    return v.value();
}

std::vector<FeatureValue> to_row(const Row& r) {
    std::vector<FeatureValue> out;
    out.reserve(r.size());
    for (const auto& v : r)
        out.push_back(to_value(v));
    return out;
}

Row from_row(std::span<const FeatureValue> r) {
    Row out;
    out.reserve(r.size());
    for (const auto& v : r)
        out.push_back(from_value(v));
    return out;
}

FeatureMatrix to_features(const Rows& rows) {
    FeatureMatrix m;
    for (const auto& r : rows)
        m.push_row(to_row(r));
    return m;
}

Rows from_features(const FeatureMatrix& m) {
    Rows out;
    for (std::size_t i = 0; i < m.rows(); ++i)
        out.push_back(from_row(m.row(i)));
    return out;
}

LabelMatrix to_labels(const LabelRows& rows) {
    LabelMatrix m;
    for (const auto& r : rows) {
        std::vector<unsigned char> row;
        for (int v : r) {
            if (v != 0 && v != 1)
                throw std::invalid_argument("labels must be 0 or 1");
            row.push_back(static_cast<unsigned char>(v));
        }
        m.push_row(row);
    }
    return m;
}

LabelRows from_labels(const LabelMatrix& m) {
    LabelRows out;
    for (std::size_t i = 0; i < m.rows(); ++i)
        out.emplace_back(m.row(i).begin(), m.row(i).end());
    return out;
}

std::vector<std::vector<double>> from_real(const RealMatrix& m) {
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < m.rows(); ++i)
        out.emplace_back(m.row(i).begin(), m.row(i).end());
    return out;
}

GradStats stats(const std::vector<double>& g, const std::vector<double>& h) {
    if (g.size() != h.size())
        throw std::invalid_argument("grad and hess lengths differ");
    GradStats s;
    s.grad = g;
    s.hess = h;
    return s;
}

BoostConfig make_config(int trees, int depth, double eta, double lambda, double gamma,
                        double min_child_weight, const std::string& gain) {
    BoostConfig c;
    c.n_rounds = trees;
    c.max_depth = depth;
    c.learning_rate = eta;
    c.lambda = lambda;
    c.gamma = gamma;
    c.min_child_weight = min_child_weight;
    c.gain = parse_gain_strategy(gain);
    c.validate();
    return c;
}

py::dict metrics_dict(const RoundMetrics& m) {
    py::dict d;
    d["round"] = m.round;
    d["HA"] = m.hamming;
    d["SA"] = m.subset;
    d["F1"] = m.f1;
    d["pos_frac"] = m.pos_frac;
    d["neg_frac"] = m.neg_frac;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-label boosted trees and dynamic classifier chains";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);

    py::class_<Dataset>(m, "Dataset")
        .def(py::init([](const Rows& x, const LabelRows& y) {
                 return Dataset(to_features(x), to_labels(y));
             }),
             py::arg("features"), py::arg("labels"))
        .def_property_readonly("n_rows", &Dataset::n_rows)
        .def_property_readonly("n_features", &Dataset::n_features)
        .def_property_readonly("n_labels", &Dataset::n_labels)
        .def_property_readonly("features", [](const Dataset& d) { return from_features(d.features()); })
        .def_property_readonly("labels", [](const Dataset& d) { return from_labels(d.labels()); })
        .def_property_readonly("feature_names", &Dataset::feature_names)
        .def_property_readonly("label_names", &Dataset::label_names)
        .def("to_mlc_csv", [](const Dataset& d) { return to_mlc_csv(d); })
        .def("save", [](const Dataset& d, const std::filesystem::path& p) { save_mlc_csv(d, p); })
        .def("__eq__", [](const Dataset& a, const Dataset& b) { return a == b; });

    m.def(
        "load_dataset",
        [](const std::filesystem::path& path, const std::string& format,
           std::optional<std::size_t> labels) {
            return load_dataset(path, parse_data_format(format), labels);
        },
        py::arg("path"), py::arg("format") = "mlc-csv", py::arg("labels") = py::none());
    m.def("parse_mlc_csv", &parse_mlc_csv, py::arg("text"));
    m.def("split_holdout", &split_holdout, py::arg("dataset"), py::arg("fraction"), py::arg("seed"));
    m.def(
        "make_multilabel",
        [](std::size_t rows, std::size_t features, std::size_t labels, std::uint64_t seed,
           double missing_rate) {
            return synth::make_multilabel(
                {.rows = rows, .features = features, .labels = labels, .missing_rate = missing_rate},
                seed);
        },
        py::arg("rows") = 593, py::arg("features") = 72, py::arg("labels") = 6,
        py::arg("seed") = 0, py::arg("missing_rate") = 0.0);
    m.def("make_random", &synth::make_random, py::arg("rows"), py::arg("features"),
          py::arg("labels"), py::arg("seed"), py::arg("missing_rate") = 0.0);

    m.def(
        "node_score",
        [](const std::string& gain, const std::vector<double>& g, const std::vector<double>& h,
           double lambda) { return node_score(parse_gain_strategy(gain), stats(g, h), lambda); },
        py::arg("gain"), py::arg("grad"), py::arg("hess"), py::arg("lambda_") = 1.0);
    m.def(
        "split_gain",
        [](const std::string& gain, const std::vector<double>& lg, const std::vector<double>& lh,
           const std::vector<double>& rg, const std::vector<double>& rh, double lambda,
           double gamma) {
            return split_gain(parse_gain_strategy(gain), stats(lg, lh), stats(rg, rh), lambda, gamma);
        },
        py::arg("gain"), py::arg("left_grad"), py::arg("left_hess"), py::arg("right_grad"),
        py::arg("right_hess"), py::arg("lambda_") = 1.0, py::arg("gamma") = 0.0);
    m.def("sigmoid", &sigmoid, py::arg("raw"));
    m.def(
        "compute_grad_hess",
        [](int y, double raw) {
            const auto gh = compute_grad_hess(y, raw);
            return py::make_tuple(gh.g, gh.h);
        },
        py::arg("y"), py::arg("raw"));
    m.def("leaf_weight", &leaf_weight, py::arg("G"), py::arg("H"), py::arg("lambda_"),
          py::arg("eta"));

    m.def(
        "propagate",
        [](const Row& prev, const std::vector<double>& y_hat) {
            return from_row(propagate(to_row(prev), y_hat));
        },
        py::arg("state"), py::arg("y_hat"));
    m.def(
        "cumulate_merge",
        [](const Row& final_state, const std::vector<std::vector<double>>& rounds) {
            std::vector<std::span<const double>> spans(rounds.begin(), rounds.end());
            return cumulate_merge(to_row(final_state), spans);
        },
        py::arg("state"), py::arg("round_probs"));

    m.def(
        "hamming_accuracy",
        [](const LabelRows& y, const LabelRows& p) { return hamming_accuracy(to_labels(y), to_labels(p)); },
        py::arg("truth"), py::arg("pred"));
    m.def(
        "subset_accuracy",
        [](const LabelRows& y, const LabelRows& p) { return subset_accuracy(to_labels(y), to_labels(p)); },
        py::arg("truth"), py::arg("pred"));
    m.def(
        "example_f1",
        [](const LabelRows& y, const LabelRows& p) { return example_f1(to_labels(y), to_labels(p)); },
        py::arg("truth"), py::arg("pred"));

    py::class_<AnyModel>(m, "Model")
        .def_static(
            "train",
            [](const Dataset& d, const std::string& method, int trees, int depth, double eta,
               double lambda, double gamma, double min_child_weight, const std::string& gain,
               std::optional<std::size_t> chain_length, std::uint64_t seed) {
                ModelSpec spec;
                spec.method = parse_method(method);
                spec.config = make_config(trees, depth, eta, lambda, gamma, min_child_weight, gain);
                spec.chain_length = chain_length;
                spec.seed = seed;
                return train_model(d, spec);
            },
            py::arg("dataset"), py::arg("method") = "xdcc", py::arg("trees") = 10,
            py::arg("depth") = 6, py::arg("eta") = 0.3, py::arg("lambda_") = 1.0,
            py::arg("gamma") = 0.0, py::arg("min_child_weight") = 1.0,
            py::arg("gain") = "sumGain", py::arg("chain_length") = py::none(),
            py::arg("seed") = 0)
        .def_static("load", &load_model, py::arg("path"))
        .def("save", [](const AnyModel& a, const std::filesystem::path& p) { save_model(a, p); })
        .def("predict",
             [](const AnyModel& a, const Dataset& d) {
                 return from_labels(predict_model(a, d.features()));
             })
        .def("predict_rows",
             [](const AnyModel& a, const Rows& x) { return from_labels(predict_model(a, to_features(x))); })
        .def("predict_proba",
             [](const AnyModel& a, const Dataset& d) -> std::vector<std::vector<double>> {
                 if (const auto* ml = std::get_if<MLXGBModel>(&a.model))
                     return from_real(predict_mlxgb_proba(*ml, d.features()));
                 if (const auto* br = std::get_if<BRModel>(&a.model))
                     return from_real(predict_br_proba(*br, d.features()));
                 throw std::invalid_argument("predict_proba needs an mlxgb or br model");
             })
        .def("round_metrics",
             [](const AnyModel& a, const Dataset& d, std::optional<bool> cumulate) {
                 const auto* chain = std::get_if<ChainModel>(&a.model);
                 if (!chain)
                     throw std::invalid_argument("round_metrics needs an xdcc model");
                 const auto pred = predict_chain(*chain, d.features());
                 py::list out;
                 for (const auto& r :
                      round_metrics(pred.trace, d.labels(), cumulate.value_or(chain->cumulate)))
                     out.append(metrics_dict(r));
                 return out;
             },
             py::arg("dataset"), py::arg("cumulate") = py::none())
        .def_property_readonly("method", [](const AnyModel& a) { return std::string(to_string(a.method)); })
        .def_property_readonly("n_features", [](const AnyModel& a) { return a.n_features; })
        .def_property_readonly("n_labels", [](const AnyModel& a) { return a.n_labels; })
        .def_property_readonly("train_seconds", [](const AnyModel& a) { return a.train_seconds; })
        .def("to_json", [](const AnyModel& a) { return to_json(a).dump(); });
}
