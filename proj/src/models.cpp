#include "xdcc/models.hpp"

#include <chrono>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xdcc {

namespace {
constexpr std::string_view kModelFormat = "xdcc-model";
constexpr int kModelVersion = 1;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
} // namespace

Method parse_method(std::string_view name) {
    if (name == "br")
        return Method::BR;
    if (name == "cc")
        return Method::CC;
    if (name == "mlxgb")
        return Method::MLXGB;
    if (name == "xdcc")
        return Method::XDCC;
    if (name == "xdcc-cum")
        return Method::XDCCCum;
    throw std::invalid_argument("unknown method '" + std::string(name) + "'");
}

std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::BR: return "br";
    case Method::CC: return "cc";
    case Method::MLXGB: return "mlxgb";
    case Method::XDCC: return "xdcc";
    case Method::XDCCCum: return "xdcc-cum";
    }
    return "?";
}

bool is_chain_method(Method m) noexcept { return m == Method::XDCC || m == Method::XDCCCum; }

AnyModel train_model(const Dataset& train, const ModelSpec& spec) {
    if (spec.chain_length && !is_chain_method(spec.method))
        throw std::invalid_argument("chain length applies only to xdcc and xdcc-cum");
    AnyModel out;
    out.method = spec.method;
    out.n_features = train.n_features();
    out.n_labels = train.n_labels();
    const auto start = std::chrono::steady_clock::now();
    switch (spec.method) {
    case Method::BR: out.model = train_br(train, spec.config); break;
    case Method::CC: out.model = train_cc(train, spec.config, spec.seed); break;
    case Method::MLXGB: out.model = train_mlxgb(train, spec.config); break;
    case Method::XDCC:
    case Method::XDCCCum:
        out.model = train_chain(train, spec.config, spec.chain_length.value_or(train.n_labels()),
                                spec.seed, spec.method == Method::XDCCCum)
                        .first;
        break;
    }
    out.train_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
}

LabelMatrix predict_model(const AnyModel& model, const FeatureMatrix& x) {
    if (x.cols() != model.n_features)
        throw std::invalid_argument("predict: feature width " + std::to_string(x.cols()) +
                                    " does not match model width " +
                                    std::to_string(model.n_features));
    return std::visit(overloaded{
                          [&](const BRModel& m) { return predict_br(m, x); },
                          [&](const CCModel& m) { return predict_cc(m, x); },
                          [&](const MLXGBModel& m) { return predict_mlxgb(m, x); },
                          [&](const ChainModel& m) { return predict_chain(m, x).labels; },
                      },
                      model.model);
}

nlohmann::json to_json(const AnyModel& m) {
    nlohmann::json body = std::visit([](const auto& v) { return to_json(v); }, m.model);
    return {{"format", kModelFormat},       {"version", kModelVersion},
            {"method", to_string(m.method)}, {"n_features", m.n_features},
            {"n_labels", m.n_labels},       {"train_seconds", m.train_seconds},
            {"model", std::move(body)}};
}

AnyModel any_model_from_json(const nlohmann::json& j) {
    if (j.at("format").get<std::string>() != kModelFormat)
        throw std::runtime_error("not an xdcc model document");
    if (j.at("version").get<int>() != kModelVersion)
        throw std::runtime_error("unsupported model version");
    AnyModel m;
    m.method = parse_method(j.at("method").get<std::string>());
    m.n_features = j.at("n_features").get<std::size_t>();
    m.n_labels = j.at("n_labels").get<std::size_t>();
    m.train_seconds = j.at("train_seconds").get<double>();
    const auto& body = j.at("model");
    switch (m.method) {
    case Method::BR: m.model = br_from_json(body); break;
    case Method::CC: m.model = cc_from_json(body); break;
    case Method::MLXGB: m.model = mlxgb_from_json(body); break;
    case Method::XDCC:
    case Method::XDCCCum: m.model = chain_from_json(body); break;
    }
    return m;
}

void save_model(const AnyModel& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << to_json(m).dump() << '\n';
}

AnyModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw std::runtime_error("malformed model file '" + path.string() + "': " + e.what());
    }
    return any_model_from_json(j);
}

} // namespace xdcc
