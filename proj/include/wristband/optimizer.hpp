#pragma once

// Direct point-cloud Gaussianization: the N x d batch itself is the parameter
// vector, minimized with Adam (or plain SGD).

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "baselines.hpp"
#include "calibration.hpp"
#include "errors.hpp"
#include "point_batch.hpp"
#include "rng.hpp"

namespace wristband {

enum class LossKind { wristband_pairwise, wristband_spectral, mmd, sliced_w2 };
enum class OptimizerKind { adam, sgd };
enum class Schedule { constant, cosine };

inline std::string to_string(LossKind k) {
    switch (k) {
        case LossKind::wristband_pairwise: return "wristband_pairwise";
        case LossKind::wristband_spectral: return "wristband_spectral";
        case LossKind::mmd: return "mmd";
        case LossKind::sliced_w2: return "sliced_w2";
    }
    return "?";
}

inline LossKind parse_loss_kind(std::string_view s) {
    if (s == "wristband_pairwise" || s == "wristband" || s == "wristband-pairwise") return LossKind::wristband_pairwise;
    if (s == "wristband_spectral" || s == "wristband-spectral") return LossKind::wristband_spectral;
    if (s == "mmd") return LossKind::mmd;
    if (s == "sliced_w2" || s == "sliced-w2") return LossKind::sliced_w2;
    throw ContractViolation("unknown loss '" + std::string(s) + "'");
}

inline std::string to_string(OptimizerKind k) { return k == OptimizerKind::adam ? "adam" : "sgd"; }
inline OptimizerKind parse_optimizer(std::string_view s) {
    if (s == "adam") return OptimizerKind::adam;
    if (s == "sgd") return OptimizerKind::sgd;
    throw ContractViolation("unknown optimizer '" + std::string(s) + "'");
}

inline std::string to_string(Schedule s) { return s == Schedule::constant ? "constant" : "cosine"; }
inline Schedule parse_schedule(std::string_view s) {
    if (s == "constant") return Schedule::constant;
    if (s == "cosine") return Schedule::cosine;
    throw ContractViolation("unknown schedule '" + std::string(s) + "'");
}

struct OptimizeConfig {
    LossKind loss = LossKind::wristband_pairwise;
    std::size_t steps = 2000;
    double lr = 0.05;
    OptimizerKind optimizer = OptimizerKind::adam;
    double adam_beta1 = 0.9;
    double adam_beta2 = 0.999;
    double adam_eps = 1e-8;
    Schedule schedule = Schedule::constant;
    std::uint64_t seed = 0;
    std::size_t log_every = 1;
    std::size_t sliced_projections = 128;
    bool freeze_projections = false;
    std::vector<double> mmd_multipliers = kDefaultMmdMultipliers;

    void validate() const {
        require(steps >= 1, "OptimizeConfig: steps must be >= 1");
        require(lr > 0.0, "OptimizeConfig: lr must be positive");
        require(log_every >= 1, "OptimizeConfig: log_every must be >= 1");
    }
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::uint64_t step = 0;
};

/// One bias-corrected Adam update, in place.
inline void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state, double lr,
                      double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8) {
    require(params.size() == grads.size(), "adam_step: params and grads differ in length");
    if (state.m.empty()) {
        state.m.assign(params.size(), 0.0);
        state.v.assign(params.size(), 0.0);
    }
    require(state.m.size() == params.size(), "adam_step: state does not match params");
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double bc1 = 1.0 - std::pow(beta1, t);
    const double bc2 = 1.0 - std::pow(beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = beta1 * state.m[i] + (1.0 - beta1) * grads[i];
        state.v[i] = beta2 * state.v[i] + (1.0 - beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
    }
}

inline void sgd_step(std::span<double> params, std::span<const double> grads, double lr) {
    require(params.size() == grads.size(), "sgd_step: params and grads differ in length");
    for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grads[i];
}

inline double scheduled_lr(const OptimizeConfig& cfg, std::size_t step) {
    if (cfg.schedule == Schedule::constant) return cfg.lr;
    const double frac = static_cast<double>(step) / static_cast<double>(cfg.steps);
    return 0.5 * cfg.lr * (1.0 + std::cos(std::numbers::pi * frac));
}

struct OptimizeResult {
    PointBatch batch;
    std::vector<std::size_t> logged_steps;
    std::vector<double> losses;  // loss before the update at each logged step, then the final loss
};

/// Loss used by the optimizer at a given step.
using LossFn = std::function<LossValueGrad(const PointBatch&, std::size_t step)>;

inline LossFn make_loss(const OptimizeConfig& cfg, const CalibrationTable* table) {
    switch (cfg.loss) {
        case LossKind::wristband_pairwise:
        case LossKind::wristband_spectral: {
            require(table != nullptr, "optimize: wristband loss needs a calibration table");
            const LossPath want = cfg.loss == LossKind::wristband_pairwise ? LossPath::pairwise : LossPath::spectral;
            require(table->loss_path == want, "optimize: calibration table was built for the " +
                                                  to_string(table->loss_path) + " path");
            const CalibrationTable t = *table;
            return [t](const PointBatch& b, std::size_t) { return standardized_wristband_loss(b, t); };
        }
        case LossKind::mmd: {
            const std::vector<double> mult = cfg.mmd_multipliers;
            return [mult](const PointBatch& b, std::size_t) { return mmd_loss(b, mult); };
        }
        case LossKind::sliced_w2: {
            const std::size_t count = cfg.sliced_projections;
            const std::uint64_t seed = cfg.seed;
            if (cfg.freeze_projections) {
                return [count, seed, frozen = std::optional<std::vector<std::vector<double>>>{}](
                           const PointBatch& b, std::size_t) mutable {
                    if (!frozen) {
                        RngStream rng(seed, "sliced-projections/frozen");
                        frozen = random_projections(count, b.dim(), rng);
                    }
                    return sliced_w2_loss(b, *frozen);
                };
            }
            const RngStream root(seed, "sliced-projections");
            return [count, root](const PointBatch& b, std::size_t step) {
                RngStream rng = root.child(step);
                return sliced_w2_loss(b, count, rng);
            };
        }
    }
    throw ContractViolation("optimize: unknown loss");
}

/// Minimizes the selected loss over the point coordinates.
/// Throws DivergenceError carrying the step index if the loss or gradient goes non-finite.
inline OptimizeResult optimize_point_cloud(const PointBatch& initial, const OptimizeConfig& cfg,
                                           const CalibrationTable* table = nullptr) {
    cfg.validate();
    require(initial.all_finite(), "optimize: initial batch has non-finite entries");
    if (table) require(table->n == initial.n() && table->dim == initial.dim(),
                       "optimize: calibration table shape does not match batch");
    LossFn loss = make_loss(cfg, table);

    OptimizeResult res;
    res.batch = initial;
    AdamState state;
    for (std::size_t step = 0; step < cfg.steps; ++step) {
        const LossValueGrad lg = loss(res.batch, step);
        if (!std::isfinite(lg.value)) throw DivergenceError(step, "loss is " + std::to_string(lg.value));
        for (double g : lg.grad)
            if (!std::isfinite(g)) throw DivergenceError(step, "non-finite gradient");
        if (step % cfg.log_every == 0) {
            res.logged_steps.push_back(step);
            res.losses.push_back(lg.value);
        }
        const double lr = scheduled_lr(cfg, step);
        if (cfg.optimizer == OptimizerKind::adam)
            adam_step(res.batch.data(), lg.grad, state, lr, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps);
        else
            sgd_step(res.batch.data(), lg.grad, lr);
    }
    const LossValueGrad last = loss(res.batch, cfg.steps);
    if (!std::isfinite(last.value)) throw DivergenceError(cfg.steps, "final loss is not finite");
    res.logged_steps.push_back(cfg.steps);
    res.losses.push_back(last.value);
    return res;
}

}  // namespace wristband
