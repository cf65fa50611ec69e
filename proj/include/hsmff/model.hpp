#pragma once

#include <span>
#include <string>
#include <vector>

#include "hsmff/nn.hpp"
#include "hsmff/regressor.hpp"

namespace hsmff {

// Coefficients of the central-difference inverse model
//   u_hat = theta_inertia * delta2 y(k) + theta_viscous * delta y(k).
struct PhysicalParams {
    double theta_inertia = 0.0; // N*m*s^2/rad
    double theta_viscous = 0.0; // N*m*s/rad
};

enum class ModelKind { physical, blackbox, pgnn };
enum class TransformTag { identity, physics_guided };

const char* to_string(ModelKind kind);
const char* to_string(TransformTag tag);
ModelKind model_kind_from_string(const std::string& s);

// Inverse-dynamics model: a physical part, an NN part, or their sum. The
// NN input is the (tagged) transform of the regressor divided per-feature by
// the stored training scales.
struct InverseModel {
    ModelKind kind = ModelKind::physical;
    RegressorSpec regressor;
    PhysicalParams physical;                // used by physical and pgnn
    NNParams nn;                            // used by blackbox and pgnn
    TransformTag transform = TransformTag::physics_guided;
    std::vector<double> feature_scale;      // per NN input, > 0
    double trained_velocity_max = 0.0;      // annotation carried into reports

    bool has_nn() const { return kind != ModelKind::physical; }
    bool has_physical() const { return kind != ModelKind::blackbox; }
    int nn_input_dim() const {
        return transform == TransformTag::physics_guided ? 3 : regressor.length();
    }

    // physical-part prediction only (zero for blackbox)
    double physical_predict(std::span<const double> phi) const;
    // writes scaled NN features; out.size() == nn_input_dim()
    void nn_features(std::span<const double> phi, std::span<double> out) const;
    double predict(std::span<const double> phi) const;

    void validate() const;

    std::string to_json_text() const;
    static InverseModel from_json_text(const std::string& text);
    void save(const std::string& path) const;
    static InverseModel load(const std::string& path);
};

InverseModel make_physical_model(const RegressorSpec& spec, const PhysicalParams& p);

} // namespace hsmff
