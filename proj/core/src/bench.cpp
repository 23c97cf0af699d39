#include "rnnp/bench.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>

#include "rnnp/error.hpp"
#include "rnnp/series.hpp"

namespace rnnp {

BenchRecord run_gradient_bench(Engine engine, const RnnSpec& spec, std::size_t tau, std::uint64_t seed,
                               std::size_t bptt_guard) {
    spec.validate();
    if (tau < 1) throw ConfigError("bench: tau must be >= 1");
    Rng rng(seed);
    const ModelParams params = init_params(spec, rng);
    std::vector<Vector> xs;
    xs.reserve(tau);
    for (std::size_t t = 0; t < tau; ++t) xs.push_back(rand_uniform(rng, -1.0, 1.0, spec.input_dim));
    const OutputGradient unit = [](const Vector& y) { return Vector(y.size(), 1.0); };

    BenchRecord rec;
    rec.engine = engine;
    rec.lags = spec.lags;
    rec.input_dim = spec.input_dim;
    rec.hidden_dim = spec.hidden_dim;
    rec.y_dim = spec.output_dim;
    rec.tau = tau;
    const auto start = std::chrono::steady_clock::now();
    if (engine == Engine::Bptt) {
        const BpttResult r = bptt_gradients(params, spec, xs, unit, bptt_guard);
        rec.mac_count = r.counter.mac_count;
        rec.peak_floats = r.counter.peak_floats;
        rec.macronodes = r.macronodes;
    } else {
        const EngineResult r = compute_gradients(engine, params, spec, xs, unit);
        rec.mac_count = r.counter.mac_count;
        rec.peak_floats = r.counter.peak_floats;
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    rec.wall_seconds = std::max(elapsed, 1e-9);
    return rec;
}

std::vector<BenchRecord> sweep_tau(Engine engine, const RnnSpec& spec, const std::vector<std::size_t>& taus,
                                   std::uint64_t seed, std::size_t bptt_guard) {
    std::vector<BenchRecord> out;
    for (const std::size_t tau : taus) out.push_back(run_gradient_bench(engine, spec, tau, seed, bptt_guard));
    return out;
}

double NeuronRow::gain() const noexcept {
    return trrl.mac_count == 0 ? 0.0 : static_cast<double>(rtrl.mac_count) / static_cast<double>(trrl.mac_count);
}

std::vector<NeuronRow> sweep_neurons(const std::vector<std::vector<std::size_t>>& lag_sets,
                                     const std::vector<std::size_t>& hidden_dims, std::size_t tau, std::size_t y_dim,
                                     std::size_t input_dim, std::uint64_t seed) {
    std::vector<NeuronRow> rows;
    for (const auto& lags : lag_sets) {
        for (const std::size_t h : hidden_dims) {
            const RnnSpec spec{lags, input_dim, h, y_dim};
            NeuronRow row;
            row.lags = lags;
            row.hidden_dim = h;
            row.trrl = run_gradient_bench(Engine::Trrl, spec, tau, seed);
            row.rtrl = run_gradient_bench(Engine::Rtrl, spec, tau, seed);
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::string format_neuron_table(const std::vector<NeuronRow>& rows) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-10s %4s %14s %14s %12s %12s %8s %6s\n", "lags", "h", "RTRL MACs", "TRRL MACs",
                  "RTRL [s]", "TRRL [s]", "gain", "p*y^2");
    out += line;
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%-10s %4zu %14llu %14llu %12.6f %12.6f %8.3f %6zu\n",
                      format_lags(r.lags).c_str(), r.hidden_dim, static_cast<unsigned long long>(r.rtrl.mac_count),
                      static_cast<unsigned long long>(r.trrl.mac_count), r.rtrl.wall_seconds, r.trrl.wall_seconds,
                      r.gain(), r.lags.size() * r.trrl.y_dim * r.trrl.y_dim);
        out += line;
    }
    return out;
}

namespace {

std::string csv_lags(const std::vector<std::size_t>& lags) {
    std::string s = format_lags(lags);
    for (auto& ch : s) {
        if (ch == ',') ch = ';';
    }
    return s;
}

std::uint64_t parse_u64(const std::string& field, const char* what) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(field, &pos);
        if (pos != field.size()) throw std::invalid_argument(what);
        return v;
    } catch (const std::exception&) {
        throw DataError(std::string("bench csv: cannot parse ") + what + " '" + field + "'");
    }
}

uint128 parse_u128(const std::string& field) {
    uint128 v = 0;
    if (field.empty()) throw DataError("bench csv: empty macronode count");
    for (const char ch : field) {
        if (ch < '0' || ch > '9') throw DataError("bench csv: cannot parse macronodes '" + field + "'");
        v = checked_add(checked_mul(v, 10, "macronodes"), static_cast<uint128>(ch - '0'), "macronodes");
    }
    return v;
}

}  // namespace

std::string bench_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out.precision(17);
    out << "engine,lag_set,input_dim,hidden_dim,y_dim,tau,mac_count,peak_floats,wall_seconds,macronodes\n";
    for (const auto& r : records) {
        out << to_string(r.engine) << ',' << csv_lags(r.lags) << ',' << r.input_dim << ',' << r.hidden_dim << ','
            << r.y_dim << ',' << r.tau << ',' << r.mac_count << ',' << r.peak_floats << ',' << r.wall_seconds << ',';
        if (r.macronodes) out << to_string(*r.macronodes);
        out << '\n';
    }
    return out.str();
}

std::vector<BenchRecord> parse_bench_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::vector<BenchRecord> out;
    bool header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            header = true;
            if (line.rfind("engine,lag_set,", 0) != 0) throw DataError("bench csv: unexpected header");
            continue;
        }
        const auto f = split_csv_line(line);
        if (f.size() != 10) throw DataError("bench csv: expected 10 fields");
        BenchRecord r;
        r.engine = parse_engine(f[0]);
        std::string lags = f[1];
        for (auto& ch : lags) {
            if (ch == ';') ch = ',';
        }
        r.lags = parse_lags(lags);
        r.input_dim = parse_u64(f[2], "input_dim");
        r.hidden_dim = parse_u64(f[3], "hidden_dim");
        r.y_dim = parse_u64(f[4], "y_dim");
        r.tau = parse_u64(f[5], "tau");
        r.mac_count = parse_u64(f[6], "mac_count");
        r.peak_floats = parse_u64(f[7], "peak_floats");
        r.wall_seconds = parse_double(f[8], "wall_seconds");
        if (!f[9].empty()) r.macronodes = parse_u128(f[9]);
        out.push_back(std::move(r));
    }
    return out;
}

void emit_csv(const std::vector<BenchRecord>& records, const std::filesystem::path& path) {
    write_text_file(path, bench_csv(records));
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionError("linear_fit: lengths differ");
    if (x.size() < 2) throw ConfigError("linear_fit: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("linear_fit: x values are all equal");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

}  // namespace rnnp
