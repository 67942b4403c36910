// wristband: command-line front end for batch generation, null calibration,
// point-cloud optimization, barycentric scoring and the spectral parity study.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <wristband/wristband.hpp>

#ifndef WRISTBAND_VERSION
#define WRISTBAND_VERSION "dev"
#endif

using namespace wristband;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNumeric = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Globals {
    unsigned threads = 1;
    bool no_timing = false;
    std::string replay;
};

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
    f << text;
}

std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string file_hash(const std::string& path) { return fnv1a_hex(read_file(path)); }

Json doubles_json(const std::vector<double>& v) {
    Json a = Json::array();
    for (double x : v) a.push_back(format_double(x));
    return a;
}

template <typename T>
std::vector<T> parse_list(const std::string& s, T (*conv)(const std::string&)) {
    std::vector<T> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(conv(item));
    if (out.empty()) throw UsageError("empty list '" + s + "'");
    return out;
}

std::size_t to_size(const std::string& s) {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw UsageError("not an integer: '" + s + "'");
    return static_cast<std::size_t>(v);
}

double to_double(const std::string& s) { return parse_double(s); }

std::string join_sizes(const std::vector<std::size_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

class Stopwatch {
public:
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------
// Subcommand configurations. Each round-trips through the report's "config".

struct GenConfig {
    std::string kind = "gaussian";
    std::size_t n = 512;
    std::size_t d = 2;
    std::uint64_t seed = 0;
    std::string out;
    std::string report;

    Json to_json() const {
        return {{"kind", kind}, {"n", n}, {"d", d}, {"seed", format_u64(seed)}, {"out", out}, {"report", report}};
    }
    static GenConfig from_json(const Json& j) {
        GenConfig c;
        c.kind = j.at("kind").get<std::string>();
        c.n = j.at("n").get<std::size_t>();
        c.d = j.at("d").get<std::size_t>();
        c.seed = json_u64(j.at("seed"));
        c.out = j.at("out").get<std::string>();
        c.report = j.at("report").get<std::string>();
        return c;
    }
};

struct CalibrateConfig {
    std::size_t n = 1024;
    std::size_t d = 8;
    KernelConfig kernel = calibration_reference_config();
    std::size_t reps = 4096;
    std::uint64_t seed = 0;
    std::string loss_path = "pairwise";
    std::string out;
    std::string report;

    Json to_json() const {
        return {{"n", n},           {"d", d},       {"kernel", kernel_config_to_json(kernel)},
                {"reps", reps},     {"seed", format_u64(seed)}, {"loss_path", loss_path},
                {"out", out},       {"report", report}};
    }
    static CalibrateConfig from_json(const Json& j) {
        CalibrateConfig c;
        c.n = j.at("n").get<std::size_t>();
        c.d = j.at("d").get<std::size_t>();
        c.kernel = kernel_config_from_json(j.at("kernel"));
        c.reps = j.at("reps").get<std::size_t>();
        c.seed = json_u64(j.at("seed"));
        c.loss_path = j.at("loss_path").get<std::string>();
        c.out = j.at("out").get<std::string>();
        c.report = j.at("report").get<std::string>();
        return c;
    }
};

struct OptimizeCli {
    std::string loss = "wristband_pairwise";
    std::size_t steps = 2000;
    double lr = 0.05;
    std::string optimizer = "adam";
    std::string schedule = "constant";
    std::uint64_t seed = 0;
    std::size_t log_every = 1;
    std::size_t projections = 128;
    std::string calib;
    std::string in;
    std::string kind;
    std::size_t n = 512;
    std::size_t d = 2;
    std::uint64_t data_seed = 0;
    std::string out;
    std::string report;
    // filled when the run starts, checked on replay
    std::string in_hash;
    std::string calib_hash;

    Json to_json() const {
        return {{"loss", loss},
                {"steps", steps},
                {"lr", format_double(lr)},
                {"optimizer", optimizer},
                {"schedule", schedule},
                {"seed", format_u64(seed)},
                {"log_every", log_every},
                {"projections", projections},
                {"calib", calib},
                {"calib_fnv1a64", calib_hash},
                {"in", in},
                {"in_fnv1a64", in_hash},
                {"kind", kind},
                {"n", n},
                {"d", d},
                {"data_seed", format_u64(data_seed)},
                {"out", out},
                {"report", report}};
    }
    static OptimizeCli from_json(const Json& j) {
        OptimizeCli c;
        c.loss = j.at("loss").get<std::string>();
        c.steps = j.at("steps").get<std::size_t>();
        c.lr = json_double(j.at("lr"));
        c.optimizer = j.at("optimizer").get<std::string>();
        c.schedule = j.at("schedule").get<std::string>();
        c.seed = json_u64(j.at("seed"));
        c.log_every = j.at("log_every").get<std::size_t>();
        c.projections = j.at("projections").get<std::size_t>();
        c.calib = j.at("calib").get<std::string>();
        c.calib_hash = j.at("calib_fnv1a64").get<std::string>();
        c.in = j.at("in").get<std::string>();
        c.in_hash = j.at("in_fnv1a64").get<std::string>();
        c.kind = j.at("kind").get<std::string>();
        c.n = j.at("n").get<std::size_t>();
        c.d = j.at("d").get<std::size_t>();
        c.data_seed = json_u64(j.at("data_seed"));
        c.out = j.at("out").get<std::string>();
        c.report = j.at("report").get<std::string>();
        return c;
    }
};

struct ScoreConfig {
    std::string in;
    std::string in_hash;
    std::size_t ref_batches = 64;
    std::size_t null_batches = 128;
    std::uint64_t seed = 0;
    std::string ref_out;
    std::string report;

    Json to_json() const {
        return {{"in", in},
                {"in_fnv1a64", in_hash},
                {"ref_batches", ref_batches},
                {"null_batches", null_batches},
                {"seed", format_u64(seed)},
                {"ref_out", ref_out},
                {"report", report}};
    }
    static ScoreConfig from_json(const Json& j) {
        ScoreConfig c;
        c.in = j.at("in").get<std::string>();
        c.in_hash = j.at("in_fnv1a64").get<std::string>();
        c.ref_batches = j.at("ref_batches").get<std::size_t>();
        c.null_batches = j.at("null_batches").get<std::size_t>();
        c.seed = json_u64(j.at("seed"));
        c.ref_out = j.at("ref_out").get<std::string>();
        c.report = j.at("report").get<std::string>();
        return c;
    }
};

struct ParityConfig {
    std::vector<std::size_t> dims{16, 64};
    std::vector<std::size_t> ns{1024};
    int modes = 3;
    std::size_t reps = 5;
    std::uint64_t seed = 0;
    KernelConfig kernel = calibration_reference_config();
    std::vector<std::size_t> timing_ns{256, 2048};
    std::size_t timing_reps = 5;
    std::string report;

    Json to_json() const {
        return {{"dims", dims},
                {"ns", ns},
                {"modes", modes},
                {"reps", reps},
                {"seed", format_u64(seed)},
                {"kernel", kernel_config_to_json(kernel)},
                {"timing_ns", timing_ns},
                {"timing_reps", timing_reps},
                {"report", report}};
    }
    static ParityConfig from_json(const Json& j) {
        ParityConfig c;
        c.dims = j.at("dims").get<std::vector<std::size_t>>();
        c.ns = j.at("ns").get<std::vector<std::size_t>>();
        c.modes = j.at("modes").get<int>();
        c.reps = j.at("reps").get<std::size_t>();
        c.seed = json_u64(j.at("seed"));
        c.kernel = kernel_config_from_json(j.at("kernel"));
        c.timing_ns = j.at("timing_ns").get<std::vector<std::size_t>>();
        c.timing_reps = j.at("timing_reps").get<std::size_t>();
        c.report = j.at("report").get<std::string>();
        return c;
    }
};

// ---------------------------------------------------------------------------
// Runs. Each returns the report body; outputs are written only when `write` is set.

struct RunResult {
    Json config;
    Json metrics;
    Json timings = Json::object();
};

PointBatch generate(const std::string& kind, std::size_t n, std::size_t d, std::uint64_t seed) {
    RngStream rng(seed, "gen/" + kind);
    if (kind == "gaussian") return gaussian_batch(n, d, rng);
    if (kind == "x") return x_batch(n, d, rng);
    if (kind == "rac") return rac_batch(n, d, rng);
    try {
        return parity_batch(parse_parity_kind(kind), n, d, rng);
    } catch (const ContractViolation&) {
        throw UsageError("unknown --kind '" + kind + "'");
    }
}

RunResult run_gen(const GenConfig& c, bool write) {
    if (c.out.empty()) throw UsageError("gen: --out is required");
    const PointBatch b = generate(c.kind, c.n, c.d, c.seed);
    const std::vector<unsigned char> bytes = encode_batch(b);
    if (write) write_batch(c.out, b);
    RunResult r;
    r.config = c.to_json();
    r.metrics = {{"n", b.n()}, {"d", b.dim()}, {"fnv1a64", fnv1a_hex(std::string(bytes.begin(), bytes.end()))}};
    std::cout << "gen: " << c.kind << " n=" << c.n << " d=" << c.d << " seed=" << c.seed << " -> " << c.out << '\n';
    return r;
}

RunResult run_calibrate(const CalibrateConfig& c, const Globals& g, bool write) {
    if (c.out.empty()) throw UsageError("calibrate: --out is required");
    const CalibrationTable t = calibrate_null(c.n, c.d, c.kernel, c.reps, c.seed, parse_loss_path(c.loss_path), g.threads);
    const std::string doc = calibration_to_json(t).dump(2) + "\n";
    if (write) write_text(c.out, doc);
    RunResult r;
    r.config = c.to_json();
    r.metrics = calibration_to_json(t);
    r.metrics["fnv1a64"] = fnv1a_hex(doc);
    std::cout << "calibrate: n=" << c.n << " d=" << c.d << " reps=" << c.reps << " reduction=" << to_string(c.kernel.reduction)
              << " mu_rep=" << format_double(t.mu_rep) << " sd_S=" << format_double(t.sd_numerator) << " -> " << c.out
              << '\n';
    return r;
}

void check_hash(const std::string& path, const std::string& expected) {
    if (!expected.empty() && file_hash(path) != expected)
        throw FormatError("replay: '" + path + "' changed since the report was written");
}

RunResult run_optimize(OptimizeCli c, bool write, bool replaying) {
    if (c.in.empty() == c.kind.empty()) throw UsageError("optimize: give exactly one of --in or --kind");
    OptimizeConfig cfg;
    cfg.loss = parse_loss_kind(c.loss);
    cfg.steps = c.steps;
    cfg.lr = c.lr;
    cfg.optimizer = parse_optimizer(c.optimizer);
    cfg.schedule = parse_schedule(c.schedule);
    cfg.seed = c.seed;
    cfg.log_every = c.log_every;
    cfg.sliced_projections = c.projections;

    std::optional<CalibrationTable> table;
    const bool wristband = cfg.loss == LossKind::wristband_pairwise || cfg.loss == LossKind::wristband_spectral;
    if (wristband) {
        if (c.calib.empty()) throw UsageError("optimize: --calib is required for wristband losses");
        if (replaying) check_hash(c.calib, c.calib_hash);
        c.calib_hash = file_hash(c.calib);
        table = read_calibration(c.calib);
    }
    PointBatch start;
    if (!c.in.empty()) {
        if (replaying) check_hash(c.in, c.in_hash);
        c.in_hash = file_hash(c.in);
        start = read_batch(c.in);
    } else {
        start = generate(c.kind, c.n, c.d, c.data_seed);
    }
    if (c.out.empty()) throw UsageError("optimize: --out is required");

    const OptimizeResult res = optimize_point_cloud(start, cfg, table ? &*table : nullptr);
    const std::vector<unsigned char> bytes = encode_batch(res.batch);
    if (write) write_batch(c.out, res.batch);

    RunResult r;
    r.config = c.to_json();
    r.metrics = {{"initial_loss", format_double(res.losses.front())},
                 {"final_loss", format_double(res.losses.back())},
                 {"logged_steps", res.logged_steps},
                 {"losses", doubles_json(res.losses)},
                 {"out_fnv1a64", fnv1a_hex(std::string(bytes.begin(), bytes.end()))}};
    std::cout << "optimize: " << to_string(cfg.loss) << " steps=" << cfg.steps << " loss "
              << format_double(res.losses.front()) << " -> " << format_double(res.losses.back()) << '\n';
    return r;
}

RunResult run_score(ScoreConfig c, const Globals& g, bool write, bool replaying) {
    if (c.in.empty()) throw UsageError("score: --in is required");
    if (replaying) check_hash(c.in, c.in_hash);
    c.in_hash = file_hash(c.in);
    const PointBatch cand = read_batch(c.in);
    const BarycentricReference ref = barycentric_reference(cand.n(), cand.dim(), c.ref_batches, c.seed, g.threads);
    const NullDistribution null = null_distribution(ref, c.null_batches, c.seed, g.threads);
    const BarycentricScore s = score_against(cand, ref, null);
    if (write && !c.ref_out.empty()) write_reference(c.ref_out, ref);

    RunResult r;
    r.config = c.to_json();
    r.metrics = {{"z", format_double(s.z)},
                 {"w2", format_double(s.w2)},
                 {"null_mean", format_double(s.null_mean)},
                 {"null_sd", format_double(s.null_sd)},
                 {"null_sd_estimator", "n-1"},
                 {"numerator", "W2 distance (not squared)"},
                 {"null_w2", doubles_json(null.distances)},
                 {"reference", provenance_to_json(ref.provenance)}};
    std::cout << "score: " << c.in << " W2=" << format_double(s.w2) << " z=" << format_double(s.z) << '\n';
    return r;
}

RunResult run_parity(const ParityConfig& c, const Globals& g) {
    RunResult r;
    r.config = c.to_json();
    Json rows = Json::array();
    for (std::size_t d : c.dims) {
        for (std::size_t n : c.ns) {
            const ParitySummary s = parity_study(d, n, c.modes, c.reps, c.kernel, c.seed);
            Json cos = Json::array();
            for (const auto& row : s.rows) cos.push_back(format_double(row.cosine));
            rows.push_back({{"d", d},
                            {"n", n},
                            {"modes", c.modes},
                            {"mean_grad_cos", format_double(s.mean_cosine)},
                            {"min_grad_cos", format_double(s.min_cosine)},
                            {"value_corr", format_double(s.value_correlation)},
                            {"cosines", cos}});
            std::cout << "parity: d=" << d << " N=" << n << " mean cos=" << format_double(s.mean_cosine)
                      << " min cos=" << format_double(s.min_cosine)
                      << " value corr=" << format_double(s.value_correlation) << '\n';
        }
    }
    r.metrics = {{"rows", rows}};
    if (!g.no_timing) {
        Json trows = Json::array();
        for (const TimingRow& t : timing_sweep(c.dims, c.timing_ns, c.modes, c.timing_reps, c.kernel)) {
            trows.push_back({{"d", t.dim},
                             {"n", t.n},
                             {"pairwise_ms", format_double(t.pairwise_ms)},
                             {"spectral_ms", format_double(t.spectral_ms)},
                             {"speedup", format_double(t.speedup())}});
            std::cout << "timing: d=" << t.dim << " N=" << t.n << " pairwise " << t.pairwise_ms << " ms, spectral "
                      << t.spectral_ms << " ms, speedup " << t.speedup() << '\n';
        }
        r.timings["parity"] = trows;
    }
    return r;
}

// ---------------------------------------------------------------------------
// selftest: quick invariant checks over every module

int run_selftest() {
    int failures = 0;
    auto check = [&](const std::string& name, bool ok) {
        std::cout << (ok ? "ok   " : "FAIL ") << name << '\n';
        if (!ok) ++failures;
    };
    auto fd_ok = [](const FdReport& r) { return r.max_rel_err <= 1e-5 && r.cosine >= 0.99999; };

    check("chi2_cdf(2, 2) = 1 - e^-1", std::fabs(chi2_cdf(2, 2.0) - (1.0 - std::exp(-1.0))) < 1e-14);
    check("inv_norm_cdf(0.975)", std::fabs(inv_norm_cdf(0.975) - 1.959963984540054) < 1e-12);

    RngStream rng(20240601, "selftest");
    const PointBatch g = gaussian_batch(20, 4, rng);
    const KernelConfig cfg = calibration_reference_config();
    check("pairwise gradient", fd_ok(finite_difference_check([&](const PointBatch& x) { return pairwise_repulsion_loss(x, cfg); }, g)));
    check("spectral gradient", fd_ok(finite_difference_check([&](const PointBatch& x) { return spectral_loss(x, cfg); }, g)));
    check("radial W2 gradient", fd_ok(finite_difference_check([](const PointBatch& x) { return radial_w2_loss(x); }, g)));
    check("moment W2 gradient", fd_ok(finite_difference_check([](const PointBatch& x) { return moment_w2_loss(x); }, g)));
    check("MMD gradient", fd_ok(finite_difference_check([](const PointBatch& x) { return mmd_loss(x); }, g)));

    const PointBatch big = gaussian_batch(4000, 3, rng);
    const WristbandBatch wb = wristband_forward(big);
    std::vector<double> t = wb.t;
    std::sort(t.begin(), t.end());
    double ks = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        ks = std::max({ks, std::fabs(t[i] - double(i) / t.size()), std::fabs(t[i] - double(i + 1) / t.size())});
    check("radial coordinate uniform on Gaussian input (KS, 1%)", ks < 1.6276 / std::sqrt(double(t.size())));

    const CalibrationTable a = calibrate_null(32, 3, cfg, 8, 5);
    const CalibrationTable b = calibrate_null(32, 3, cfg, 8, 5, LossPath::pairwise, 2);
    check("calibration deterministic across threads", a == b);

    check("batch round trip", decode_batch(encode_batch(g)) == g);
    check("Hungarian 2x2", hungarian_assign(std::vector<double>{0, 9, 9, 0}, 2).cost == 0.0);

    std::cout << (failures ? "selftest FAILED (" + std::to_string(failures) + ")" : std::string("selftest passed")) << '\n';
    return failures ? kExitNumeric : kExitOk;
}

// ---------------------------------------------------------------------------

void emit_report(const std::string& path, const std::string& sub, const RunResult& r, const Globals& g,
                 const Json& seeds, double total_ms) {
    if (path.empty()) return;
    Json rep;
    rep["tool"] = "wristband";
    rep["version"] = WRISTBAND_VERSION;
    rep["subcommand"] = sub;
    rep["config"] = r.config;
    rep["seeds"] = seeds;
    rep["threads"] = g.threads;
    rep["metrics"] = r.metrics;
    if (!g.no_timing) {
        Json t = r.timings;
        t["total_ms"] = format_double(total_ms);
        rep["timings"] = t;
    }
    write_text(path, rep.dump(2) + "\n");
}

// Metrics must match exactly, except parsed floats may differ by 1e-12 relative.
bool metrics_match(const Json& a, const Json& b, const std::string& where, std::string& diff) {
    if (a.is_object() && b.is_object()) {
        if (a.size() != b.size()) return diff = where + ": key sets differ", false;
        for (auto it = a.begin(); it != a.end(); ++it) {
            if (!b.contains(it.key())) return diff = where + "." + it.key() + ": missing", false;
            if (!metrics_match(it.value(), b.at(it.key()), where + "." + it.key(), diff)) return false;
        }
        return true;
    }
    if (a.is_array() && b.is_array()) {
        if (a.size() != b.size()) return diff = where + ": lengths differ", false;
        for (std::size_t i = 0; i < a.size(); ++i)
            if (!metrics_match(a[i], b[i], where + "[" + std::to_string(i) + "]", diff)) return false;
        return true;
    }
    if (a == b) return true;
    if (a.is_string() && b.is_string()) {
        try {
            const double x = parse_double(a.get<std::string>()), y = parse_double(b.get<std::string>());
            if (std::fabs(x - y) <= 1e-12 * std::max(std::fabs(x), std::fabs(y))) return true;
        } catch (const FormatError&) {
        }
    }
    diff = where + ": " + a.dump() + " vs " + b.dump();
    return false;
}

int replay(const Globals& g) {
    const Json rep = Json::parse(read_file(g.replay));
    const std::string sub = rep.at("subcommand").get<std::string>();
    const Json& cj = rep.at("config");
    RunResult r;
    if (sub == "gen") r = run_gen(GenConfig::from_json(cj), false);
    else if (sub == "calibrate") r = run_calibrate(CalibrateConfig::from_json(cj), g, false);
    else if (sub == "optimize") r = run_optimize(OptimizeCli::from_json(cj), false, true);
    else if (sub == "score") r = run_score(ScoreConfig::from_json(cj), g, false, true);
    else if (sub == "parity") {
        Globals quiet = g;
        quiet.no_timing = true;
        r = run_parity(ParityConfig::from_json(cj), quiet);
    } else throw UsageError("replay: unknown subcommand '" + sub + "'");
    std::string diff;
    if (!metrics_match(rep.at("metrics"), r.metrics, "metrics", diff)) {
        std::cerr << "replay mismatch at " << diff << '\n';
        return kExitNumeric;
    }
    std::cout << "replay: metrics match " << g.replay << '\n';
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Wristband Gaussian loss tools", "wristband"};
    app.set_version_flag("--version", std::string(WRISTBAND_VERSION));
    Globals g;
    app.add_option("--threads", g.threads, "Worker threads for calibration and scoring")->check(CLI::Range(1u, 1024u));
    app.add_flag("--no-timing", g.no_timing, "Omit wall-clock timings from reports (byte-stable output)");
    app.add_option("--replay", g.replay, "Re-run the configuration stored in a report and compare metrics");
    app.require_subcommand(0, 1);

    GenConfig gen;
    auto* gen_cmd = app.add_subcommand("gen", "Write a seeded point batch");
    gen_cmd->add_option("--kind", gen.kind, "gaussian|x|rac|mixture5|two-mode|student-t|ring");
    gen_cmd->add_option("--n", gen.n)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--d", gen.d)->check(CLI::PositiveNumber);
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--out", gen.out)->required();
    gen_cmd->add_option("--report", gen.report);

    CalibrateConfig cal;
    std::string reduction = "global", weights = "1,0.1,1";
    double beta = cal.kernel.beta, alpha = cal.kernel.alpha;
    int modes = cal.kernel.modes;
    auto* cal_cmd = app.add_subcommand("calibrate", "Monte-Carlo null calibration table");
    cal_cmd->add_option("--n", cal.n)->check(CLI::PositiveNumber);
    cal_cmd->add_option("--d", cal.d)->check(CLI::PositiveNumber);
    cal_cmd->add_option("--beta", beta);
    cal_cmd->add_option("--alpha", alpha);
    cal_cmd->add_option("--reduction", reduction)->check(CLI::IsMember({"global", "per_point"}));
    cal_cmd->add_option("--weights", weights, "w_rep,w_rad,w_mom");
    cal_cmd->add_option("--modes", modes, "Radial cosine modes (spectral path)");
    cal_cmd->add_option("--reps", cal.reps);
    cal_cmd->add_option("--seed", cal.seed);
    cal_cmd->add_option("--loss-path", cal.loss_path)->check(CLI::IsMember({"pairwise", "spectral"}));
    cal_cmd->add_option("--out", cal.out)->required();
    cal_cmd->add_option("--report", cal.report);

    OptimizeCli opt;
    auto* opt_cmd = app.add_subcommand("optimize", "Optimize point coordinates against a loss");
    opt_cmd->add_option("--loss", opt.loss, "wristband_pairwise|wristband_spectral|mmd|sliced_w2");
    opt_cmd->add_option("--steps", opt.steps)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--lr", opt.lr);
    opt_cmd->add_option("--optimizer", opt.optimizer)->check(CLI::IsMember({"adam", "sgd"}));
    opt_cmd->add_option("--schedule", opt.schedule)->check(CLI::IsMember({"constant", "cosine"}));
    opt_cmd->add_option("--seed", opt.seed, "Seed for sliced-W2 projections");
    opt_cmd->add_option("--log-every", opt.log_every)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--projections", opt.projections)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--calib", opt.calib);
    opt_cmd->add_option("--in", opt.in);
    opt_cmd->add_option("--kind", opt.kind, "Generate the start batch instead of reading --in");
    opt_cmd->add_option("--n", opt.n)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--d", opt.d)->check(CLI::PositiveNumber);
    opt_cmd->add_option("--data-seed", opt.data_seed);
    opt_cmd->add_option("--out", opt.out)->required();
    opt_cmd->add_option("--report", opt.report);

    ScoreConfig score;
    auto* score_cmd = app.add_subcommand("score", "Calibrated barycentric W2 z-score");
    score_cmd->add_option("--in", score.in)->required();
    score_cmd->add_option("--ref-batches", score.ref_batches);
    score_cmd->add_option("--null-batches", score.null_batches);
    score_cmd->add_option("--seed", score.seed);
    score_cmd->add_option("--ref-out", score.ref_out, "Also write the reference batch and provenance");
    score_cmd->add_option("--report", score.report);

    ParityConfig par;
    std::string dims = "16,64", ns = "1024", timing_ns = "256,2048";
    auto* par_cmd = app.add_subcommand("parity", "Spectral vs pairwise gradient parity and timing");
    par_cmd->add_option("--dims", dims);
    par_cmd->add_option("--ns", ns);
    par_cmd->add_option("--modes", par.modes)->check(CLI::PositiveNumber);
    par_cmd->add_option("--reps", par.reps, "Seeds per generator")->check(CLI::PositiveNumber);
    par_cmd->add_option("--seed", par.seed);
    par_cmd->add_option("--timing-ns", timing_ns);
    par_cmd->add_option("--timing-reps", par.timing_reps)->check(CLI::PositiveNumber);
    par_cmd->add_option("--report", par.report);

    auto* self_cmd = app.add_subcommand("selftest", "Run built-in invariant checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    const Stopwatch clock;
    try {
        if (!g.replay.empty()) {
            if (!app.get_subcommands().empty()) throw UsageError("--replay takes no subcommand");
            return replay(g);
        }
        if (self_cmd->parsed()) return run_selftest();

        std::string sub, report;
        RunResult r;
        Json seeds;
        if (gen_cmd->parsed()) {
            sub = "gen";
            report = gen.report;
            seeds = {{"data", format_u64(gen.seed)}};
            r = run_gen(gen, true);
        } else if (cal_cmd->parsed()) {
            sub = "calibrate";
            cal.kernel.beta = beta;
            cal.kernel.alpha = alpha;
            cal.kernel.modes = modes;
            cal.kernel.reduction = parse_reduction(reduction);
            const auto w = parse_list<double>(weights, to_double);
            if (w.size() != 3) throw UsageError("--weights needs three values");
            cal.kernel.weights = {w[0], w[1], w[2]};
            report = cal.report;
            seeds = {{"calibration", format_u64(cal.seed)}};
            r = run_calibrate(cal, g, true);
        } else if (opt_cmd->parsed()) {
            sub = "optimize";
            report = opt.report;
            seeds = {{"projections", format_u64(opt.seed)}, {"data", format_u64(opt.data_seed)}};
            r = run_optimize(opt, true, false);
        } else if (score_cmd->parsed()) {
            sub = "score";
            report = score.report;
            seeds = {{"reference", format_u64(score.seed)}, {"null", format_u64(score.seed)}};
            r = run_score(score, g, true, false);
        } else if (par_cmd->parsed()) {
            sub = "parity";
            par.dims = parse_list<std::size_t>(dims, to_size);
            par.ns = parse_list<std::size_t>(ns, to_size);
            par.timing_ns = parse_list<std::size_t>(timing_ns, to_size);
            report = par.report;
            seeds = {{"parity", format_u64(par.seed)}};
            r = run_parity(par, g);
        } else {
            std::cout << app.help();
            return kExitUsage;
        }
        emit_report(report, sub, r, g, seeds, clock.ms());
        return kExitOk;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ContractViolation& e) {
        std::cerr << "invalid arguments: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DivergenceError& e) {
        std::cerr << "diverged: " << e.what() << '\n';
        return kExitNumeric;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumeric;
    }
}
