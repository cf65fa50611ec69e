#include "hsmff/model.hpp"

#include <fstream>

#include <json.hpp>

#include "hsmff/errors.hpp"

namespace hsmff {

using nlohmann::json;

const char* to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::physical: return "physical";
        case ModelKind::blackbox: return "blackbox";
        case ModelKind::pgnn: return "pgnn";
    }
    return "?";
}

const char* to_string(TransformTag tag) {
    return tag == TransformTag::identity ? "identity" : "physics_guided";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "physical") return ModelKind::physical;
    if (s == "blackbox") return ModelKind::blackbox;
    if (s == "pgnn") return ModelKind::pgnn;
    throw ConfigError("unknown model kind '" + s + "'");
}

double InverseModel::physical_predict(std::span<const double> phi) const {
    if (!has_physical()) return 0.0;
    return physical.theta_inertia * delta_acceleration(phi, regressor) +
           physical.theta_viscous * delta_velocity(phi, regressor);
}

void InverseModel::nn_features(std::span<const double> phi, std::span<double> out) const {
    if (transform == TransformTag::physics_guided) {
        const auto f = input_transform(phi, regressor);
        for (std::size_t i = 0; i < 3; ++i) out[i] = f[i] / feature_scale[i];
    } else {
        for (std::size_t i = 0; i < phi.size(); ++i) out[i] = phi[i] / feature_scale[i];
    }
}

double InverseModel::predict(std::span<const double> phi) const {
    double u = physical_predict(phi);
    if (has_nn()) {
        double x[8];
        std::vector<double> big;
        const auto dim = static_cast<std::size_t>(nn_input_dim());
        std::span<double> features;
        if (dim <= 8) {
            features = {x, dim};
        } else {
            big.resize(dim);
            features = big;
        }
        nn_features(phi, features);
        u += nn_forward(nn, features);
    }
    return u;
}

void InverseModel::validate() const {
    regressor.validate();
    if (has_physical() && !regressor.supports_delta())
        throw Error("physical model needs a window covering y(k-2)..y(k+2)");
    if (has_nn()) {
        nn.validate();
        if (nn.n_in != nn_input_dim())
            throw Error("nn input dimension does not match the transform output");
        if (feature_scale.size() != static_cast<std::size_t>(nn.n_in))
            throw Error("feature_scale length does not match the nn input");
        for (double s : feature_scale)
            if (!(s > 0.0)) throw Error("feature scales must be > 0");
    }
}

std::string InverseModel::to_json_text() const {
    json doc;
    doc["schema"] = 1;
    doc["kind"] = to_string(kind);
    doc["regressor"] = {{"n_a", regressor.n_a},
                        {"n_b", regressor.n_b},
                        {"n_k", regressor.n_k},
                        {"sample_time", regressor.sample_time}};
    if (has_physical())
        doc["physical"] = {{"theta_inertia", physical.theta_inertia},
                           {"theta_viscous", physical.theta_viscous}};
    if (has_nn()) {
        doc["transform"] = to_string(transform);
        doc["nn"] = {{"n_in", nn.n_in},     {"n_hidden", nn.n_hidden},
                     {"w1", nn.w1},         {"b1", nn.b1},
                     {"w2", nn.w2},         {"b2", nn.b2}};
        doc["feature_scale"] = feature_scale;
    }
    doc["trained_velocity_max"] = trained_velocity_max;
    return doc.dump(2);
}

InverseModel InverseModel::from_json_text(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::exception& e) {
        throw IoError(std::string("model json: ") + e.what());
    }
    if (!doc.contains("schema") || doc["schema"].get<int>() != 1)
        throw IoError("model json: unsupported schema");

    InverseModel m;
    m.kind = model_kind_from_string(doc.at("kind").get<std::string>());
    const json& r = doc.at("regressor");
    m.regressor.n_a = r.at("n_a").get<int>();
    m.regressor.n_b = r.at("n_b").get<int>();
    m.regressor.n_k = r.at("n_k").get<int>();
    m.regressor.sample_time = r.at("sample_time").get<double>();
    if (m.has_physical()) {
        const json& p = doc.at("physical");
        m.physical.theta_inertia = p.at("theta_inertia").get<double>();
        m.physical.theta_viscous = p.at("theta_viscous").get<double>();
    }
    if (m.has_nn()) {
        m.transform = doc.at("transform").get<std::string>() == "identity"
                          ? TransformTag::identity
                          : TransformTag::physics_guided;
        const json& n = doc.at("nn");
        m.nn.n_in = n.at("n_in").get<int>();
        m.nn.n_hidden = n.at("n_hidden").get<int>();
        m.nn.w1 = n.at("w1").get<std::vector<double>>();
        m.nn.b1 = n.at("b1").get<std::vector<double>>();
        m.nn.w2 = n.at("w2").get<std::vector<double>>();
        m.nn.b2 = n.at("b2").get<double>();
        m.feature_scale = doc.at("feature_scale").get<std::vector<double>>();
    }
    if (doc.contains("trained_velocity_max"))
        m.trained_velocity_max = doc["trained_velocity_max"].get<double>();
    m.validate();
    return m;
}

void InverseModel::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file " + path);
    out << to_json_text() << '\n';
    if (!out) throw IoError("write failed for model file " + path);
}

InverseModel InverseModel::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read model file " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_text(text);
}

InverseModel make_physical_model(const RegressorSpec& spec, const PhysicalParams& p) {
    InverseModel m;
    m.kind = ModelKind::physical;
    m.regressor = spec;
    m.physical = p;
    m.validate();
    return m;
}

} // namespace hsmff
