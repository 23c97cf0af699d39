#include "rnnp/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rnnp/error.hpp"

namespace rnnp {

using nlohmann::json;

std::string serialize_checkpoint(const Checkpoint& checkpoint) {
    checkpoint.spec.validate();
    if (checkpoint.params.theta.size() != checkpoint.spec.theta_size() ||
        checkpoint.params.phi.size() != checkpoint.spec.phi_size()) {
        throw DimensionError("serialize_checkpoint: parameter lengths do not match the spec");
    }
    json body;
    body["format"] = kCheckpointMagic;
    body["spec"] = {
        {"lags", checkpoint.spec.lags},
        {"input_dim", checkpoint.spec.input_dim},
        {"hidden_dim", checkpoint.spec.hidden_dim},
        {"output_dim", checkpoint.spec.output_dim},
        {"activation", "sigmoid"},
    };
    body["theta"] = checkpoint.params.theta.values();
    body["phi"] = checkpoint.params.phi.values();
    body["normalization"] = checkpoint.normalization;
    try {
        body["extension"] = json::parse(checkpoint.extension.empty() ? "{}" : checkpoint.extension);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("serialize_checkpoint: extension is not valid JSON: ") + e.what());
    }
    return std::string(kCheckpointMagic) + "\n" + body.dump() + "\n";
}

Checkpoint parse_checkpoint(const std::string& text) {
    const auto newline = text.find('\n');
    const std::string magic = text.substr(0, newline);
    if (magic != kCheckpointMagic) throw DataError("checkpoint: bad magic line '" + magic + "'");
    if (newline == std::string::npos) throw DataError("checkpoint: missing body");
    Checkpoint cp;
    try {
        const json body = json::parse(text.substr(newline + 1));
        if (body.at("format").get<std::string>() != kCheckpointMagic) throw DataError("checkpoint: format mismatch");
        const auto& spec = body.at("spec");
        if (spec.at("activation").get<std::string>() != "sigmoid") {
            throw DataError("checkpoint: unsupported activation");
        }
        cp.spec.lags = spec.at("lags").get<std::vector<std::size_t>>();
        cp.spec.input_dim = spec.at("input_dim").get<std::size_t>();
        cp.spec.hidden_dim = spec.at("hidden_dim").get<std::size_t>();
        cp.spec.output_dim = spec.at("output_dim").get<std::size_t>();
        cp.spec.validate();
        cp.params.theta = Vector(body.at("theta").get<std::vector<double>>());
        cp.params.phi = Vector(body.at("phi").get<std::vector<double>>());
        cp.normalization = body.at("normalization").get<std::map<std::string, double>>();
        cp.extension = body.contains("extension") ? body.at("extension").dump() : "{}";
    } catch (const json::exception& e) {
        throw DataError(std::string("checkpoint: malformed body: ") + e.what());
    } catch (const ConfigError& e) {
        throw DataError(std::string("checkpoint: invalid spec: ") + e.what());
    }
    if (cp.params.theta.size() != cp.spec.theta_size() || cp.params.phi.size() != cp.spec.phi_size()) {
        throw DataError("checkpoint: parameter lengths do not match the spec");
    }
    return cp;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("checkpoint: cannot open '" + path.string() + "' for writing");
    out << serialize_checkpoint(checkpoint);
    if (!out) throw DataError("checkpoint: write failed for '" + path.string() + "'");
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("checkpoint: cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_checkpoint(ss.str());
}

}  // namespace rnnp
