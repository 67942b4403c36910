#pragma once

// Barycentric reference on disk: the batch in WBPC form plus a provenance JSON
// sidecar at "<path>.json".

#include <fstream>
#include <sstream>
#include <string>

#include "batch_io.hpp"
#include "evaluation.hpp"
#include "json_util.hpp"

namespace wristband {

inline Json provenance_to_json(const ReferenceProvenance& p) {
    Json j;
    j["format_version"] = 1;
    j["num_batches"] = p.num_batches;
    j["n"] = p.n;
    j["dim"] = p.dim;
    j["seed"] = format_u64(p.seed);
    j["depth"] = p.depth;
    j["pairing"] = "shuffle indices with stream reference/pairing/<level>, pair adjacent";
    return j;
}

inline ReferenceProvenance provenance_from_json(const Json& j) {
    try {
        if (j.at("format_version").get<int>() != 1) throw FormatError("reference provenance: unsupported format_version");
        ReferenceProvenance p;
        p.num_batches = j.at("num_batches").get<std::size_t>();
        p.n = j.at("n").get<std::size_t>();
        p.dim = j.at("dim").get<std::size_t>();
        p.seed = json_u64(j.at("seed"));
        p.depth = j.at("depth").get<std::size_t>();
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("reference provenance: ") + e.what());
    }
}

inline void write_reference(const std::string& path, const BarycentricReference& ref) {
    write_batch(path, ref.batch);
    std::ofstream f(path + ".json", std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + ".json' for writing");
    f << provenance_to_json(ref.provenance).dump(2) << '\n';
}

inline BarycentricReference read_reference(const std::string& path) {
    BarycentricReference ref;
    ref.batch = read_batch(path);
    std::ifstream f(path + ".json", std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + ".json'");
    std::stringstream ss;
    ss << f.rdbuf();
    try {
        ref.provenance = provenance_from_json(Json::parse(ss.str()));
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("reference provenance '" + path + ".json': " + e.what());
    }
    if (ref.provenance.n != ref.batch.n() || ref.provenance.dim != ref.batch.dim())
        throw FormatError("reference provenance does not match the batch shape");
    return ref;
}

}  // namespace wristband
