#include "rnnp/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rnnp/error.hpp"

namespace rnnp {

void RnnSpec::validate() const {
    if (lags.empty()) throw ConfigError("RnnSpec: lag set must not be empty");
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (lags[i] == 0) throw ConfigError("RnnSpec: lags must be >= 1");
        if (i > 0 && lags[i] <= lags[i - 1]) throw ConfigError("RnnSpec: lags must be strictly increasing");
    }
    if (input_dim == 0 || hidden_dim == 0 || output_dim == 0) {
        throw ConfigError("RnnSpec: input, hidden and output dimensions must be >= 1");
    }
}

std::string format_lags(std::span<const std::size_t> lags) {
    std::string out = "{";
    for (std::size_t i = 0; i < lags.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(lags[i]);
    }
    return out + "}";
}

std::vector<std::size_t> parse_lags(const std::string& text) {
    std::string cleaned;
    for (char ch : text) {
        if (ch == '{' || ch == '}' || ch == ' ') continue;
        cleaned += ch;
    }
    std::vector<std::size_t> lags;
    std::stringstream ss(cleaned);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) throw ConfigError("parse_lags: empty entry in '" + text + "'");
        std::size_t pos = 0;
        unsigned long value = 0;
        try {
            value = std::stoul(item, &pos);
        } catch (const std::exception&) {
            throw ConfigError("parse_lags: cannot parse '" + item + "'");
        }
        if (pos != item.size()) throw ConfigError("parse_lags: cannot parse '" + item + "'");
        lags.push_back(value);
    }
    RnnSpec probe{lags, 1, 1, 1};
    probe.validate();
    return lags;
}

ModelParams ModelParams::zeros(const RnnSpec& spec) {
    spec.validate();
    ModelParams p;
    p.U = Matrix(spec.hidden_dim, spec.input_dim);
    p.W.assign(spec.order(), Matrix(spec.hidden_dim, spec.output_dim));
    p.b = Vector(spec.hidden_dim);
    p.V = Matrix(spec.output_dim, spec.hidden_dim);
    p.c = Vector(spec.output_dim);
    return p;
}

void ModelParams::check_shape(const RnnSpec& spec) const {
    const auto h = spec.hidden_dim, x = spec.input_dim, y = spec.output_dim;
    bool ok = U.rows() == h && U.cols() == x && W.size() == spec.order() && b.size() == h && V.rows() == y &&
              V.cols() == h && c.size() == y;
    for (const auto& w : W) ok = ok && w.rows() == h && w.cols() == y;
    if (!ok) throw DimensionError("ModelParams: shapes do not match the network spec");
}

std::size_t theta_index_U(const RnnSpec& spec, std::size_t row, std::size_t col) noexcept {
    return row * spec.input_dim + col;
}

std::size_t theta_index_W(const RnnSpec& spec, std::size_t lag_idx, std::size_t row, std::size_t col) noexcept {
    const std::size_t w_size = spec.hidden_dim * spec.output_dim;
    return spec.hidden_dim * spec.input_dim + lag_idx * w_size + row * spec.output_dim + col;
}

std::size_t theta_index_b(const RnnSpec& spec, std::size_t row) noexcept {
    return spec.hidden_dim * (spec.input_dim + spec.order() * spec.output_dim) + row;
}

std::size_t phi_index_V(const RnnSpec& spec, std::size_t row, std::size_t col) noexcept {
    return row * spec.hidden_dim + col;
}

std::size_t phi_index_c(const RnnSpec& spec, std::size_t row) noexcept {
    return spec.output_dim * spec.hidden_dim + row;
}

FlatParams pack(const ModelParams& params) {
    FlatParams flat;
    std::vector<double> theta;
    theta.insert(theta.end(), params.U.span().begin(), params.U.span().end());
    for (const auto& w : params.W) theta.insert(theta.end(), w.span().begin(), w.span().end());
    theta.insert(theta.end(), params.b.begin(), params.b.end());
    std::vector<double> phi;
    phi.insert(phi.end(), params.V.span().begin(), params.V.span().end());
    phi.insert(phi.end(), params.c.begin(), params.c.end());
    flat.theta = Vector(std::move(theta));
    flat.phi = Vector(std::move(phi));
    return flat;
}

ModelParams unpack(const RnnSpec& spec, const FlatParams& flat) {
    if (flat.theta.size() != spec.theta_size() || flat.phi.size() != spec.phi_size()) {
        throw DimensionError("unpack: expected |theta|=" + std::to_string(spec.theta_size()) + " and |phi|=" +
                             std::to_string(spec.phi_size()) + ", got " + std::to_string(flat.theta.size()) +
                             " and " + std::to_string(flat.phi.size()));
    }
    ModelParams p = ModelParams::zeros(spec);
    const double* src = flat.theta.data();
    std::copy_n(src, p.U.size(), p.U.data());
    src += p.U.size();
    for (auto& w : p.W) {
        std::copy_n(src, w.size(), w.data());
        src += w.size();
    }
    std::copy_n(src, p.b.size(), p.b.data());

    std::copy_n(flat.phi.data(), p.V.size(), p.V.data());
    std::copy_n(flat.phi.data() + p.V.size(), p.c.size(), p.c.data());
    return p;
}

namespace {

void fill_glorot(Matrix& m, Rng& rng) {
    const double fan_in = static_cast<double>(m.cols());
    const double fan_out = static_cast<double>(m.rows());
    const double r = std::sqrt(6.0 / (fan_in + fan_out));
    for (auto& v : m.span()) v = rng.uniform(-r, r);
}

}  // namespace

ModelParams init_params(const RnnSpec& spec, Rng& rng) {
    ModelParams p = ModelParams::zeros(spec);
    fill_glorot(p.U, rng);
    for (auto& w : p.W) fill_glorot(w, rng);
    fill_glorot(p.V, rng);
    return p;
}

StepOutput forward_step(const ModelParams& params, const RnnSpec& spec, const Vector& x_t,
                        const PastOutputs& past_outputs) {
    params.check_shape(spec);
    if (x_t.size() != spec.input_dim) throw DimensionError("forward_step: input has wrong length");
    StepOutput out;
    out.a = matvec(params.U, x_t);
    for (std::size_t j = 0; j < spec.hidden_dim; ++j) out.a[j] += params.b[j];
    for (std::size_t i = 0; i < spec.order(); ++i) {
        const Vector& fb = past_outputs(spec.lags[i]);
        if (fb.size() != spec.output_dim) throw DimensionError("forward_step: feedback has wrong length");
        const Vector contrib = matvec(params.W[i], fb);
        for (std::size_t j = 0; j < spec.hidden_dim; ++j) out.a[j] += contrib[j];
    }
    out.h = Vector(spec.hidden_dim);
    for (std::size_t j = 0; j < spec.hidden_dim; ++j) out.h[j] = sigmoid(out.a[j]);
    out.y = matvec(params.V, out.h);
    for (std::size_t i = 0; i < spec.output_dim; ++i) out.y[i] += params.c[i];
    return out;
}

ForwardTrace forward_sequence(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs) {
    if (xs.empty()) throw ConfigError("forward_sequence: empty sequence");
    const Vector zero(spec.output_dim);
    ForwardTrace trace;
    trace.a.reserve(xs.size());
    trace.h.reserve(xs.size());
    trace.y.reserve(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        auto past = [&](std::size_t lag) -> const Vector& { return lag > k ? zero : trace.y[k - lag]; };
        StepOutput s = forward_step(params, spec, xs[k], past);
        trace.a.push_back(std::move(s.a));
        trace.h.push_back(std::move(s.h));
        trace.y.push_back(std::move(s.y));
    }
    return trace;
}

Vector predict_final(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs) {
    if (xs.empty()) throw ConfigError("predict_final: empty sequence");
    params.check_shape(spec);
    const std::size_t h = spec.hidden_dim, y = spec.output_dim, x = spec.input_dim;
    const std::size_t ring = spec.max_lag() + 1;
    std::vector<double> outputs(ring * y, 0.0);
    std::vector<double> a(h);
    std::vector<double> hidden(h);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const Vector& xt = xs[k];
        if (xt.size() != x) throw DimensionError("predict_final: input has wrong length");
        for (std::size_t j = 0; j < h; ++j) {
            const auto urow = params.U.row(j);
            double acc = 0.0;
            for (std::size_t c = 0; c < x; ++c) acc += urow[c] * xt[c];
            a[j] = acc + params.b[j];
        }
        for (std::size_t i = 0; i < spec.order(); ++i) {
            const std::size_t lag = spec.lags[i];
            if (lag > k) continue;
            const double* fb = &outputs[((k - lag) % ring) * y];
            for (std::size_t j = 0; j < h; ++j) {
                const auto wrow = params.W[i].row(j);
                double acc = 0.0;
                for (std::size_t c = 0; c < y; ++c) acc += wrow[c] * fb[c];
                a[j] += acc;
            }
        }
        for (std::size_t j = 0; j < h; ++j) hidden[j] = sigmoid(a[j]);
        double* out = &outputs[(k % ring) * y];
        for (std::size_t i = 0; i < y; ++i) {
            const auto vrow = params.V.row(i);
            double acc = 0.0;
            for (std::size_t j = 0; j < h; ++j) acc += vrow[j] * hidden[j];
            out[i] = acc + params.c[i];
        }
    }
    const double* last = &outputs[((xs.size() - 1) % ring) * y];
    return Vector(std::vector<double>(last, last + y));
}

}  // namespace rnnp
