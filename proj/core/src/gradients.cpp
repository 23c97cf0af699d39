#include "rnnp/gradients.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <vector>

#include "rnnp/error.hpp"

namespace rnnp {

std::string to_string(uint128 value) {
    if (value == 0) return "0";
    std::string digits;
    while (value > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
        value /= 10;
    }
    return {digits.rbegin(), digits.rend()};
}

uint128 checked_add(uint128 a, uint128 b, const char* what) {
    uint128 out;
    if (__builtin_add_overflow(a, b, &out)) throw NumericError(std::string(what) + ": 128-bit overflow");
    return out;
}

uint128 checked_mul(uint128 a, uint128 b, const char* what) {
    uint128 out;
    if (__builtin_mul_overflow(a, b, &out)) throw NumericError(std::string(what) + ": 128-bit overflow");
    return out;
}

std::string to_string(Engine engine) {
    switch (engine) {
        case Engine::Trrl: return "TRRL";
        case Engine::Rtrl: return "RTRL";
        case Engine::Bptt: return "BPTT";
    }
    return "?";
}

Engine parse_engine(const std::string& name) {
    std::string lower;
    for (char ch : name) lower += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (lower == "trrl") return Engine::Trrl;
    if (lower == "rtrl") return Engine::Rtrl;
    if (lower == "bptt") return Engine::Bptt;
    throw ConfigError("unknown gradient engine '" + name + "' (expected trrl, rtrl or bptt)");
}

namespace {

void check_inputs(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs, const char* who) {
    spec.validate();
    params.check_shape(spec);
    if (xs.empty()) throw ConfigError(std::string(who) + ": empty sequence");
    for (const auto& x : xs) {
        if (x.size() != spec.input_dim) throw DimensionError(std::string(who) + ": input has wrong length");
    }
}

Vector checked_output_gradient(const OutputGradient& output_gradient, const Vector& output, const RnnSpec& spec,
                               const char* who) {
    Vector g = output_gradient(output);
    if (g.size() != spec.output_dim) throw DimensionError(std::string(who) + ": loss gradient has wrong length");
    if (!g.all_finite()) throw NonFiniteError(std::string(who) + " loss gradient", 0);
    return g;
}

/// Flat forward trace: hidden[k*h + j], output[k*y + i] for step t = k + 1.
struct FlatTrace {
    std::size_t tau = 0;
    std::vector<double> hidden;
    std::vector<double> output;

    const double* h_at(std::size_t k, std::size_t h) const { return hidden.data() + k * h; }
    const double* y_at(std::size_t k, std::size_t y) const { return output.data() + k * y; }
};

/// a = b + U x + sum_i W_i fb_i; writes sigmoid(a) into `h_out` and c + V h into `y_out`.
/// `feedback(i)` returns a pointer to yhat(t - lag_i) or nullptr for steps <= 0.
template <typename Feedback>
void forward_cell(const ModelParams& params, const RnnSpec& spec, const Vector& x, Feedback&& feedback,
                  double* h_out, double* y_out, std::size_t step, const char* who) {
    const std::size_t h = spec.hidden_dim, y = spec.output_dim, xd = spec.input_dim;
    for (std::size_t j = 0; j < h; ++j) {
        const auto urow = params.U.row(j);
        double acc = 0.0;
        for (std::size_t c = 0; c < xd; ++c) acc += urow[c] * x[c];
        double a = acc + params.b[j];
        for (std::size_t i = 0; i < spec.order(); ++i) {
            const double* fb = feedback(i);
            if (!fb) continue;
            const auto wrow = params.W[i].row(j);
            double wacc = 0.0;
            for (std::size_t c = 0; c < y; ++c) wacc += wrow[c] * fb[c];
            a += wacc;
        }
        if (!std::isfinite(a)) throw NonFiniteError(std::string(who) + " forward", step);
        h_out[j] = sigmoid(a);
    }
    for (std::size_t r = 0; r < y; ++r) {
        const auto vrow = params.V.row(r);
        double acc = 0.0;
        for (std::size_t j = 0; j < h; ++j) acc += vrow[j] * h_out[j];
        y_out[r] = acc + params.c[r];
        if (!std::isfinite(y_out[r])) throw NonFiniteError(std::string(who) + " forward", step);
    }
}

FlatTrace run_forward(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs, const char* who) {
    FlatTrace trace;
    trace.tau = xs.size();
    const std::size_t h = spec.hidden_dim, y = spec.output_dim;
    trace.hidden.assign(trace.tau * h, 0.0);
    trace.output.assign(trace.tau * y, 0.0);
    for (std::size_t k = 0; k < trace.tau; ++k) {
        auto feedback = [&](std::size_t i) -> const double* {
            const std::size_t lag = spec.lags[i];
            return lag > k ? nullptr : trace.y_at(k - lag, y);
        };
        forward_cell(params, spec, xs[k], feedback, trace.hidden.data() + k * h, trace.output.data() + k * y, k + 1,
                     who);
    }
    return trace;
}

/// Work shared by TRRL and BPTT at one macronode (step index k), given the total
/// gradient `g` (length y) w.r.t. yhat at that step:
///   d_phi += [d yhat / d phi]^T g
///   z      = [V dh/da]^T g
///   d_theta += [d a / d theta]^T z
/// `z` receives the folded vector (length h).
void accumulate_macronode(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs,
                          const FlatTrace& trace, std::size_t k, const double* g, double* z, GradientPair& grads,
                          OpCounter& counter) {
    const std::size_t h = spec.hidden_dim, y = spec.output_dim, xd = spec.input_dim;
    const double* hk = trace.h_at(k, h);

    // phi: V(r, j) -> g_r * h_j ; c(r) -> g_r
    double* dphi = grads.d_phi.data();
    for (std::size_t r = 0; r < y; ++r) {
        double* row = dphi + r * h;
        for (std::size_t j = 0; j < h; ++j) row[j] += g[r] * hk[j];
        dphi[y * h + r] += g[r];
    }
    counter.add_macs(spec.phi_size());

    // fold through the output map and the sigmoid derivative
    std::fill(z, z + h, 0.0);
    for (std::size_t r = 0; r < y; ++r) {
        const auto vrow = params.V.row(r);
        for (std::size_t j = 0; j < h; ++j) z[j] += vrow[j] * g[r];
    }
    for (std::size_t j = 0; j < h; ++j) z[j] *= hk[j] * (1.0 - hk[j]);
    counter.add_macs(y * h + h);

    // theta: one nonzero per column of d a / d theta
    double* dtheta = grads.d_theta.data();
    const Vector& x = xs[k];
    for (std::size_t j = 0; j < h; ++j) {
        double* urow = dtheta + j * xd;
        for (std::size_t c = 0; c < xd; ++c) urow[c] += z[j] * x[c];
    }
    std::size_t offset = h * xd;
    for (std::size_t i = 0; i < spec.order(); ++i) {
        const std::size_t lag = spec.lags[i];
        if (lag <= k) {
            const double* fb = trace.y_at(k - lag, y);
            for (std::size_t j = 0; j < h; ++j) {
                double* wrow = dtheta + offset + j * y;
                for (std::size_t c = 0; c < y; ++c) wrow[c] += z[j] * fb[c];
            }
        }
        offset += h * y;
    }
    for (std::size_t j = 0; j < h; ++j) dtheta[offset + j] += z[j];
    counter.add_macs(spec.theta_size());
}

/// out += W_i^T z (length y).
void push_back_through_lag(const Matrix& w, const double* z, double* out, std::size_t h, std::size_t y) {
    for (std::size_t j = 0; j < h; ++j) {
        const auto wrow = w.row(j);
        for (std::size_t c = 0; c < y; ++c) out[c] += wrow[c] * z[j];
    }
}

bool all_finite(const double* p, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(p[i])) return false;
    }
    return true;
}

}  // namespace

EngineResult trrl_gradients(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs,
                            const OutputGradient& output_gradient) {
    check_inputs(params, spec, xs, "trrl");
    const std::size_t h = spec.hidden_dim, y = spec.output_dim, tau = xs.size();
    const std::size_t window = spec.max_lag() + 1;

    EngineResult result;
    OpCounter& counter = result.counter;
    const FlatTrace trace = run_forward(params, spec, xs, "trrl");
    counter.acquire(tau * (h + y));
    const double* last = trace.y_at(tau - 1, y);
    result.output = Vector(std::vector<double>(last, last + y));
    result.grads = GradientPair::zeros(spec);

    // g_i for offsets i..i+max_lag, stored in a ring indexed by offset mod window.
    std::vector<double> g_ring(window * y, 0.0);
    std::vector<double> z(h, 0.0);
    counter.acquire(window * y + h);

    const Vector g0 = checked_output_gradient(output_gradient, result.output, spec, "trrl");
    std::copy(g0.begin(), g0.end(), g_ring.begin());

    for (std::size_t i = 0; i < tau; ++i) {
        const std::size_t k = tau - 1 - i;
        double* g = g_ring.data() + (i % window) * y;
        accumulate_macronode(params, spec, xs, trace, k, g, z.data(), result.grads, counter);
        if (!all_finite(z.data(), h)) throw NonFiniteError("trrl backward", k + 1);
        for (std::size_t li = 0; li < spec.order(); ++li) {
            const std::size_t lag = spec.lags[li];
            if (i + lag < tau) {
                push_back_through_lag(params.W[li], z.data(), g_ring.data() + ((i + lag) % window) * y, h, y);
                counter.add_macs(h * y);
            }
        }
        std::fill(g, g + y, 0.0);
    }
    return result;
}

namespace {

struct BpttWalker {
    const ModelParams& params;
    const RnnSpec& spec;
    std::span<const Vector> xs;
    const FlatTrace& trace;
    GradientPair& grads;
    OpCounter& counter;
    MacronodeCount visited = 0;

    void visit(std::size_t k, const double* g) {
        const std::size_t h = spec.hidden_dim, y = spec.output_dim;
        visited = checked_add(visited, 1, "bptt macronode count");
        std::vector<double> z(h);
        std::vector<double> child(y);
        counter.acquire(h + y);
        accumulate_macronode(params, spec, xs, trace, k, g, z.data(), grads, counter);
        if (!all_finite(z.data(), h)) throw NonFiniteError("bptt backward", k + 1);
        for (std::size_t li = 0; li < spec.order(); ++li) {
            const std::size_t lag = spec.lags[li];
            if (lag > k) continue;
            std::fill(child.begin(), child.end(), 0.0);
            push_back_through_lag(params.W[li], z.data(), child.data(), h, y);
            counter.add_macs(h * y);
            visit(k - lag, child.data());
        }
        counter.release(h + y);
    }
};

}  // namespace

BpttResult bptt_gradients(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs,
                          const OutputGradient& output_gradient, std::size_t max_tau_guard) {
    check_inputs(params, spec, xs, "bptt");
    if (xs.size() > max_tau_guard) {
        throw NumericError("bptt: sequence length " + std::to_string(xs.size()) + " exceeds the guard of " +
                           std::to_string(max_tau_guard) + " (macronode count grows exponentially in tau)");
    }
    const std::size_t h = spec.hidden_dim, y = spec.output_dim, tau = xs.size();

    BpttResult result;
    const FlatTrace trace = run_forward(params, spec, xs, "bptt");
    result.counter.acquire(tau * (h + y));
    const double* last = trace.y_at(tau - 1, y);
    result.output = Vector(std::vector<double>(last, last + y));
    result.grads = GradientPair::zeros(spec);

    const Vector g0 = checked_output_gradient(output_gradient, result.output, spec, "bptt");
    BpttWalker walker{params, spec, xs, trace, result.grads, result.counter};
    walker.visit(tau - 1, g0.data());
    result.macronodes = walker.visited;
    return result;
}

EngineResult rtrl_gradients(const ModelParams& params, const RnnSpec& spec, std::span<const Vector> xs,
                            const OutputGradient& output_gradient) {
    check_inputs(params, spec, xs, "rtrl");
    const std::size_t h = spec.hidden_dim, y = spec.output_dim, xd = spec.input_dim, tau = xs.size();
    const std::size_t p = spec.order();
    const std::size_t ring = spec.max_lag();
    const std::size_t n_theta = spec.theta_size(), n_phi = spec.phi_size();

    EngineResult result;
    OpCounter& counter = result.counter;

    // Jacobians d yhat(s) / d theta and d yhat(s) / d phi, column-major (column q occupies
    // [q*y, q*y + y)), in slot s mod max_lag. Unwritten slots are the null Jacobians of steps <= 0.
    std::vector<double> jac_theta(ring * n_theta * y, 0.0);
    std::vector<double> jac_phi(ring * n_phi * y, 0.0);
    counter.acquire(rtrl_space_floats(spec));

    // Outputs of the last max_lag + 1 steps (forward state, not charged as gradient state).
    const std::size_t out_ring = ring + 1;
    std::vector<double> outputs(out_ring * y, 0.0);
    std::vector<double> hidden(h);
    std::vector<double> va(y * h);           // V dh/da, row-major y x h
    std::vector<double> vaw(p * y * y);      // V dh/da W_i, row-major y x y per lag
    std::vector<double> column(y);
    std::vector<const double*> feedback(p);  // yhat(t - lag_i) or nullptr
    std::vector<const double*> old_theta(p);
    std::vector<const double*> old_phi(p);

    for (std::size_t k = 0; k < tau; ++k) {
        for (std::size_t i = 0; i < p; ++i) {
            const std::size_t lag = spec.lags[i];
            feedback[i] = lag > k ? nullptr : outputs.data() + ((k - lag) % out_ring) * y;
        }
        double* y_now = outputs.data() + (k % out_ring) * y;
        forward_cell(params, spec, xs[k], [&](std::size_t i) { return feedback[i]; }, hidden.data(), y_now, k + 1,
                     "rtrl");

        for (std::size_t r = 0; r < y; ++r) {
            const auto vrow = params.V.row(r);
            for (std::size_t j = 0; j < h; ++j) va[r * h + j] = vrow[j] * (hidden[j] * (1.0 - hidden[j]));
        }
        counter.add_macs(y * h);
        for (std::size_t i = 0; i < p; ++i) {
            double* m = vaw.data() + i * y * y;
            for (std::size_t r = 0; r < y; ++r) {
                for (std::size_t c = 0; c < y; ++c) {
                    double acc = 0.0;
                    for (std::size_t j = 0; j < h; ++j) acc += va[r * h + j] * params.W[i](j, c);
                    m[r * y + c] = acc;
                }
            }
        }
        counter.add_macs(p * y * h * y);

        // Slot (k - lag) mod ring for every lag; (k - max_lag) shares the slot we write.
        const std::size_t write_slot = k % ring;
        for (std::size_t i = 0; i < p; ++i) {
            const std::size_t slot = (k + ring - spec.lags[i] % ring) % ring;
            old_theta[i] = jac_theta.data() + slot * n_theta * y;
            old_phi[i] = jac_phi.data() + slot * n_phi * y;
        }
        double* new_theta = jac_theta.data() + write_slot * n_theta * y;
        double* new_phi = jac_phi.data() + write_slot * n_phi * y;

        // Recurrent part sum_i (V dh/da W_i) J(t - lag_i) for column q, added to `column`.
        auto add_recurrent = [&](const std::vector<const double*>& old, std::size_t q) {
            for (std::size_t i = 0; i < p; ++i) {
                const double* m = vaw.data() + i * y * y;
                const double* src = old[i] + q * y;
                for (std::size_t r = 0; r < y; ++r) {
                    double acc = 0.0;
                    for (std::size_t c = 0; c < y; ++c) acc += m[r * y + c] * src[c];
                    column[r] += acc;
                }
            }
        };

        // theta columns: the immediate term (V dh/da) d a / d theta has one nonzero per
        // column of d a / d theta, at hidden row j with value v.
        auto theta_column = [&](std::size_t q, std::size_t j, double v) {
            for (std::size_t r = 0; r < y; ++r) column[r] = va[r * h + j] * v;
            add_recurrent(old_theta, q);
            std::copy(column.begin(), column.end(), new_theta + q * y);
        };
        const Vector& x = xs[k];
        for (std::size_t j = 0; j < h; ++j) {
            for (std::size_t c = 0; c < xd; ++c) theta_column(j * xd + c, j, x[c]);
        }
        std::size_t offset = h * xd;
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t j = 0; j < h; ++j) {
                for (std::size_t c = 0; c < y; ++c) {
                    theta_column(offset + j * y + c, j, feedback[i] ? feedback[i][c] : 0.0);
                }
            }
            offset += h * y;
        }
        for (std::size_t j = 0; j < h; ++j) theta_column(offset + j, j, 1.0);
        counter.add_macs(y * n_theta + p * y * y * n_theta);

        // phi columns: d yhat / d V(r', j) = e_{r'} h_j, d yhat / d c(r') = e_{r'}.
        for (std::size_t rp = 0; rp < y; ++rp) {
            for (std::size_t j = 0; j < h + 1; ++j) {
                const std::size_t q = j < h ? rp * h + j : y * h + rp;
                std::fill(column.begin(), column.end(), 0.0);
                column[rp] = j < h ? hidden[j] : 1.0;
                add_recurrent(old_phi, q);
                std::copy(column.begin(), column.end(), new_phi + q * y);
            }
        }
        counter.add_macs(n_phi + p * y * y * n_phi);

        if (!all_finite(new_theta, n_theta * y) || !all_finite(new_phi, n_phi * y)) {
            throw NonFiniteError("rtrl jacobian", k + 1);
        }
    }

    const double* last = outputs.data() + ((tau - 1) % out_ring) * y;
    result.output = Vector(std::vector<double>(last, last + y));
    const Vector dl = checked_output_gradient(output_gradient, result.output, spec, "rtrl");

    const std::size_t final_slot = (tau - 1) % ring;
    const double* jt = jac_theta.data() + final_slot * n_theta * y;
    const double* jp = jac_phi.data() + final_slot * n_phi * y;
    result.grads = GradientPair::zeros(spec);
    for (std::size_t q = 0; q < n_theta; ++q) {
        double acc = 0.0;
        for (std::size_t r = 0; r < y; ++r) acc += dl[r] * jt[q * y + r];
        result.grads.d_theta[q] = acc;
    }
    for (std::size_t q = 0; q < n_phi; ++q) {
        double acc = 0.0;
        for (std::size_t r = 0; r < y; ++r) acc += dl[r] * jp[q * y + r];
        result.grads.d_phi[q] = acc;
    }
    counter.add_macs(y * (n_theta + n_phi));
    return result;
}

EngineResult compute_gradients(Engine engine, const ModelParams& params, const RnnSpec& spec,
                               std::span<const Vector> xs, const OutputGradient& output_gradient,
                               std::size_t bptt_guard) {
    switch (engine) {
        case Engine::Trrl: return trrl_gradients(params, spec, xs, output_gradient);
        case Engine::Rtrl: return rtrl_gradients(params, spec, xs, output_gradient);
        case Engine::Bptt: {
            BpttResult r = bptt_gradients(params, spec, xs, output_gradient, bptt_guard);
            return {std::move(r.grads), r.counter, std::move(r.output)};
        }
    }
    throw ConfigError("compute_gradients: unknown engine");
}

GradientPair finite_difference_gradients(const ModelParams& params, const RnnSpec& spec,
                                         std::span<const Vector> xs, const OutputLoss& loss, double step) {
    if (!(step > 0.0)) throw ConfigError("finite_difference_gradients: step must be > 0");
    check_inputs(params, spec, xs, "finite differences");
    FlatParams flat = pack(params);
    GradientPair grads = GradientPair::zeros(spec);

    auto eval = [&]() {
        const double value = loss(predict_final(unpack(spec, flat), spec, xs));
        if (!std::isfinite(value)) throw NumericError("finite_difference_gradients: non-finite loss");
        return value;
    };
    auto sweep = [&](Vector& target, Vector& out) {
        for (std::size_t q = 0; q < target.size(); ++q) {
            const double saved = target[q];
            target[q] = saved + step;
            const double plus = eval();
            target[q] = saved - step;
            const double minus = eval();
            target[q] = saved;
            out[q] = (plus - minus) / (2.0 * step);
        }
    };
    sweep(flat.theta, grads.d_theta);
    sweep(flat.phi, grads.d_phi);
    return grads;
}

MacronodeCount macronode_count(std::size_t tau, std::span<const std::size_t> lags) {
    if (tau == 0) throw ConfigError("macronode_count: tau must be >= 1");
    RnnSpec probe{std::vector<std::size_t>(lags.begin(), lags.end()), 1, 1, 1};
    probe.validate();
    std::vector<MacronodeCount> n(tau + 1, 0);
    for (std::size_t t = 1; t <= tau; ++t) {
        MacronodeCount total = 1;
        for (const std::size_t lag : lags) {
            if (t > lag) total = checked_add(total, n[t - lag], "macronode_count");
        }
        n[t] = total;
    }
    return n[tau];
}

std::uint64_t rtrl_space_floats(const RnnSpec& spec) {
    spec.validate();
    return static_cast<std::uint64_t>(spec.max_lag()) * spec.output_dim * spec.weight_count();
}

GradientDiscrepancy compare_gradients(const GradientPair& a, const GradientPair& b, double rel_tol,
                                      double abs_tol) {
    if (a.d_theta.size() != b.d_theta.size() || a.d_phi.size() != b.d_phi.size()) {
        throw DimensionError("compare_gradients: gradient lengths differ");
    }
    GradientDiscrepancy d;
    auto scan = [&](const Vector& u, const Vector& v) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double diff = std::abs(u[i] - v[i]);
            const double denom = std::max({std::abs(u[i]), std::abs(v[i]), 1e-12});
            const double rel = diff / denom;
            d.max_rel = std::max(d.max_rel, rel);
            d.max_abs = std::max(d.max_abs, diff);
            if (!(rel <= rel_tol || diff <= abs_tol)) ++d.violations;
        }
    };
    scan(a.d_theta, b.d_theta);
    scan(a.d_phi, b.d_phi);
    return d;
}

double scaled_max_distance(const GradientPair& a, const GradientPair& reference) {
    if (a.d_theta.size() != reference.d_theta.size() || a.d_phi.size() != reference.d_phi.size()) {
        throw DimensionError("scaled_max_distance: gradient lengths differ");
    }
    double diff = 0.0, norm = 0.0;
    auto scan = [&](const Vector& u, const Vector& v) {
        for (std::size_t i = 0; i < u.size(); ++i) {
            diff = std::max(diff, std::abs(u[i] - v[i]));
            norm = std::max(norm, std::abs(v[i]));
        }
    };
    scan(a.d_theta, reference.d_theta);
    scan(a.d_phi, reference.d_phi);
    return diff / (1.0 + norm);
}

}  // namespace rnnp
