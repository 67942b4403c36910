#pragma once

// Monte-Carlo null calibration and the standardized wristband statistic
//   L_wb = S / s_S,  S = sum_* w_* (L_* - mu_*) / s_*,  * in {rep, rad, mom}.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "accelerators.hpp"
#include "generators.hpp"
#include "json_util.hpp"
#include "kernel_config.hpp"
#include "pairwise.hpp"
#include "parallel.hpp"
#include "point_batch.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "wristband_map.hpp"

namespace wristband {

enum class LossPath { pairwise, spectral };

inline std::string to_string(LossPath p) { return p == LossPath::pairwise ? "pairwise" : "spectral"; }

inline LossPath parse_loss_path(std::string_view s) {
    if (s == "pairwise") return LossPath::pairwise;
    if (s == "spectral") return LossPath::spectral;
    throw ContractViolation("unknown loss path '" + std::string(s) + "'");
}

struct CalibrationTable {
    std::size_t n = 0;
    std::size_t dim = 0;
    KernelConfig cfg{};
    std::size_t reps = 0;
    double mu_rep = 0.0, mu_rad = 0.0, mu_mom = 0.0;
    double sd_rep = 1.0, sd_rad = 1.0, sd_mom = 1.0;
    double sd_numerator = 1.0;
    std::uint64_t seed = 0;
    LossPath loss_path = LossPath::pairwise;

    friend bool operator==(const CalibrationTable&, const CalibrationTable&) = default;
};

/// Raw component values of one batch.
struct ComponentValues {
    double rep = 0.0;
    double rad = 0.0;
    double mom = 0.0;
};

inline double repulsion_value(const WristbandBatch& wb, const KernelConfig& cfg, LossPath path) {
    return path == LossPath::pairwise ? pairwise_repulsion_value(wb, cfg) : spectral_loss_value(wb, cfg);
}

inline ComponentValues component_values(const PointBatch& batch, const KernelConfig& cfg, LossPath path) {
    const WristbandBatch wb = wristband_forward(batch);
    return {repulsion_value(wb, cfg, path), radial_w2_value(wb), moment_w2_value(batch)};
}

namespace calibration_detail {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

// Unbiased (n - 1) standard deviation.
inline double sd_of(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace calibration_detail

/// Draws `reps` batches from N(0, I_dim) (stream "calibration/<r>" under `seed`) and
/// records per-component means and stds plus the std of the weighted numerator S.
inline CalibrationTable calibrate_null(std::size_t n, std::size_t dim, const KernelConfig& cfg, std::size_t reps,
                                       std::uint64_t seed, LossPath path = LossPath::pairwise, unsigned threads = 1) {
    require(reps >= 2, "calibrate_null: need at least two repetitions");
    require(n >= 2, "calibrate_null: batch size must be >= 2");
    require(dim >= 2, "calibrate_null: dimension must be >= 2");
    if (path == LossPath::spectral && dim < 3) throw UnsupportedDimension("spectral path requires d >= 3");
    cfg.validate();

    std::vector<ComponentValues> values(reps);
    const RngStream root(seed, "calibration");
    parallel_for(reps, threads, [&](std::size_t r) {
        RngStream rng = root.child(r);
        values[r] = component_values(gaussian_batch(n, dim, rng), cfg, path);
    });

    std::vector<double> rep(reps), rad(reps), mom(reps);
    for (std::size_t r = 0; r < reps; ++r) {
        rep[r] = values[r].rep;
        rad[r] = values[r].rad;
        mom[r] = values[r].mom;
    }
    using calibration_detail::mean_of;
    using calibration_detail::sd_of;
    CalibrationTable t;
    t.n = n;
    t.dim = dim;
    t.cfg = cfg;
    t.reps = reps;
    t.seed = seed;
    t.loss_path = path;
    t.mu_rep = mean_of(rep);
    t.mu_rad = mean_of(rad);
    t.mu_mom = mean_of(mom);
    t.sd_rep = sd_of(rep, t.mu_rep);
    t.sd_rad = sd_of(rad, t.mu_rad);
    t.sd_mom = sd_of(mom, t.mu_mom);
    if (!(t.sd_rep > 0.0) || !(t.sd_rad > 0.0) || !(t.sd_mom > 0.0))
        throw CalibrationError("calibrate_null: a component has zero variance under the null");

    std::vector<double> numer(reps);
    const ComponentWeights& w = cfg.weights;
    for (std::size_t r = 0; r < reps; ++r) {
        numer[r] = w.rep * (rep[r] - t.mu_rep) / t.sd_rep + w.rad * (rad[r] - t.mu_rad) / t.sd_rad +
                   w.mom * (mom[r] - t.mu_mom) / t.sd_mom;
    }
    t.sd_numerator = sd_of(numer, mean_of(numer));
    if (!(t.sd_numerator > 0.0)) throw CalibrationError("calibrate_null: weighted numerator has zero variance");
    return t;
}

/// L_wb and its gradient. Components with zero weight are skipped entirely.
inline LossValueGrad standardized_wristband_loss(const PointBatch& batch, const CalibrationTable& table,
                                                 ComponentValues* components = nullptr) {
    require(batch.n() == table.n && batch.dim() == table.dim,
            "standardized_wristband_loss: batch shape does not match calibration table");
    const KernelConfig& cfg = table.cfg;
    const ComponentWeights& w = cfg.weights;
    const std::size_t n = batch.n();
    const std::size_t d = batch.dim();

    const WristbandBatch wb = wristband_forward(batch);
    std::vector<double> grad_u(n * d, 0.0), grad_t(n, 0.0);
    ComponentValues raw;
    double numer = 0.0;

    if (w.rep != 0.0 || components) {
        WristbandGrad g = table.loss_path == LossPath::pairwise ? pairwise_repulsion_wb(wb, cfg) : spectral_loss_wb(wb, cfg);
        raw.rep = g.value;
        const double scale = w.rep / (table.sd_rep * table.sd_numerator);
        for (std::size_t i = 0; i < grad_u.size(); ++i) grad_u[i] += scale * g.grad_u[i];
        for (std::size_t i = 0; i < n; ++i) grad_t[i] += scale * g.grad_t[i];
    }
    if (w.rad != 0.0 || components) {
        WristbandGrad g = radial_w2_wb(wb);
        raw.rad = g.value;
        const double scale = w.rad / (table.sd_rad * table.sd_numerator);
        for (std::size_t i = 0; i < n; ++i) grad_t[i] += scale * g.grad_t[i];
    }
    LossValueGrad out;
    out.grad = wristband_backward(batch, wb, grad_u, grad_t);
    if (w.mom != 0.0 || components) {
        LossValueGrad g = moment_w2_loss(batch);
        raw.mom = g.value;
        const double scale = w.mom / (table.sd_mom * table.sd_numerator);
        for (std::size_t i = 0; i < out.grad.size(); ++i) out.grad[i] += scale * g.grad[i];
    }
    numer = w.rep * (raw.rep - table.mu_rep) / table.sd_rep + w.rad * (raw.rad - table.mu_rad) / table.sd_rad +
            w.mom * (raw.mom - table.mu_mom) / table.sd_mom;
    out.value = numer / table.sd_numerator;
    if (components) *components = raw;
    return out;
}

/// Value-only L_wb (no gradient work).
inline double standardized_wristband_value(const PointBatch& batch, const CalibrationTable& table) {
    require(batch.n() == table.n && batch.dim() == table.dim,
            "standardized_wristband_value: batch shape does not match calibration table");
    const ComponentValues v = component_values(batch, table.cfg, table.loss_path);
    const ComponentWeights& w = table.cfg.weights;
    const double numer = w.rep * (v.rep - table.mu_rep) / table.sd_rep + w.rad * (v.rad - table.mu_rad) / table.sd_rad +
                         w.mom * (v.mom - table.mu_mom) / table.sd_mom;
    return numer / table.sd_numerator;
}

// ---------------------------------------------------------------------------
// JSON document, format_version 1. Floats are shortest round-trip decimal strings.

inline Json kernel_config_to_json(const KernelConfig& cfg) {
    Json j;
    j["beta"] = format_double(cfg.beta);
    j["alpha"] = format_double(cfg.alpha);
    j["eps"] = format_double(cfg.eps);
    j["reduction"] = to_string(cfg.reduction);
    j["weights"] = {{"rep", format_double(cfg.weights.rep)},
                    {"rad", format_double(cfg.weights.rad)},
                    {"mom", format_double(cfg.weights.mom)}};
    j["modes"] = cfg.modes;
    return j;
}

inline KernelConfig kernel_config_from_json(const Json& j) {
    KernelConfig cfg;
    cfg.beta = json_double(j.at("beta"));
    cfg.alpha = json_double(j.at("alpha"));
    cfg.eps = json_double(j.at("eps"));
    cfg.reduction = parse_reduction(j.at("reduction").get<std::string>());
    const Json& w = j.at("weights");
    cfg.weights = {json_double(w.at("rep")), json_double(w.at("rad")), json_double(w.at("mom"))};
    cfg.modes = j.at("modes").get<int>();
    return cfg;
}

inline Json calibration_to_json(const CalibrationTable& t) {
    Json j;
    j["format_version"] = 1;
    j["n"] = t.n;
    j["dim"] = t.dim;
    j["cfg"] = kernel_config_to_json(t.cfg);
    j["reps"] = t.reps;
    j["mu_rep"] = format_double(t.mu_rep);
    j["mu_rad"] = format_double(t.mu_rad);
    j["mu_mom"] = format_double(t.mu_mom);
    j["sd_rep"] = format_double(t.sd_rep);
    j["sd_rad"] = format_double(t.sd_rad);
    j["sd_mom"] = format_double(t.sd_mom);
    j["sd_numerator"] = format_double(t.sd_numerator);
    j["seed"] = format_u64(t.seed);
    j["loss_path"] = to_string(t.loss_path);
    return j;
}

inline CalibrationTable calibration_from_json(const Json& j) {
    try {
        if (j.at("format_version").get<int>() != 1) throw FormatError("calibration table: unsupported format_version");
        CalibrationTable t;
        t.n = j.at("n").get<std::size_t>();
        t.dim = j.at("dim").get<std::size_t>();
        t.cfg = kernel_config_from_json(j.at("cfg"));
        t.reps = j.at("reps").get<std::size_t>();
        t.mu_rep = json_double(j.at("mu_rep"));
        t.mu_rad = json_double(j.at("mu_rad"));
        t.mu_mom = json_double(j.at("mu_mom"));
        t.sd_rep = json_double(j.at("sd_rep"));
        t.sd_rad = json_double(j.at("sd_rad"));
        t.sd_mom = json_double(j.at("sd_mom"));
        t.sd_numerator = json_double(j.at("sd_numerator"));
        t.seed = json_u64(j.at("seed"));
        t.loss_path = parse_loss_path(j.at("loss_path").get<std::string>());
        return t;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("calibration table: ") + e.what());
    }
}

inline void write_calibration(const std::string& path, const CalibrationTable& t) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f << calibration_to_json(t).dump(2) << '\n';
}

inline CalibrationTable read_calibration(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    Json j;
    try {
        j = Json::parse(ss.str());
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("calibration table '" + path + "': " + e.what());
    }
    return calibration_from_json(j);
}

}  // namespace wristband
