#include <algorithm>
#include <sstream>

#include "rnnp_cli/cli.hpp"

namespace rnnp::cli {

GradcheckCase make_gradcheck_case(std::uint64_t seed) {
    static const std::vector<std::vector<std::size_t>> lag_sets{{1}, {1, 2}, {1, 3}, {1, 2, 5}};
    Rng rng(seed * 0x9E3779B97F4A7C15ULL + 17);
    GradcheckCase c;
    c.seed = seed;
    const auto& lags = lag_sets[seed % lag_sets.size()];
    const std::size_t y = 1 + rng.below(2);
    c.spec = RnnSpec{lags, 1 + rng.below(5), 1 + rng.below(8), y};
    c.head = LossHead{y == 1 ? LossKind::PointMse : LossKind::GaussianNll};
    c.params = init_params(c.spec, rng);
    for (auto& v : c.params.b) v = rng.uniform(-0.5, 0.5);
    for (auto& v : c.params.c) v = rng.uniform(-0.5, 0.5);
    const std::size_t tau = 1 + rng.below(12);
    for (std::size_t t = 0; t < tau; ++t) c.xs.push_back(rand_uniform(rng, -1.0, 1.0, c.spec.input_dim));
    c.target = rng.uniform(-1.0, 1.0);
    return c;
}

std::vector<GradcheckRow> run_gradcheck(std::uint64_t first_seed, std::size_t seeds) {
    std::vector<GradcheckRow> rows;
    for (std::uint64_t seed = first_seed; seed < first_seed + seeds; ++seed) {
        const GradcheckCase c = make_gradcheck_case(seed);
        const OutputGradient grad = [&](const Vector& y) { return evaluate_loss(c.head, y, c.target).grad; };
        const OutputLoss loss = [&](const Vector& y) { return evaluate_loss(c.head, y, c.target).loss; };
        const GradientPair trrl = trrl_gradients(c.params, c.spec, c.xs, grad).grads;
        const GradientPair rtrl = rtrl_gradients(c.params, c.spec, c.xs, grad).grads;
        const GradientPair bptt = bptt_gradients(c.params, c.spec, c.xs, grad).grads;
        const GradientPair fd = finite_difference_gradients(c.params, c.spec, c.xs, loss);

        auto row = [&](const std::string& name) {
            GradcheckRow r;
            r.engine = name;
            r.seed = seed;
            r.tau = c.xs.size();
            r.lag_set = format_lags(c.spec.lags);
            return r;
        };
        for (const auto& [name, g] : {std::pair<const char*, const GradientPair*>{"TRRL", &trrl},
                                      {"RTRL", &rtrl},
                                      {"BPTT", &bptt}}) {
            const GradientDiscrepancy d = compare_gradients(*g, fd, 1e-5, 1e-7);
            GradcheckRow r = row(name);
            r.max_rel_err = d.max_rel;
            r.max_abs_err = d.max_abs;
            r.pass = d.ok();
            rows.push_back(r);
        }
        for (const auto& [name, g] : {std::pair<const char*, const GradientPair*>{"RTRL~TRRL", &rtrl},
                                      {"BPTT~TRRL", &bptt}}) {
            const GradientDiscrepancy d = compare_gradients(*g, trrl, 0.0, 0.0);
            GradcheckRow r = row(name);
            r.max_rel_err = scaled_max_distance(*g, trrl);
            r.max_abs_err = d.max_abs;
            r.pass = r.max_rel_err <= 1e-10;
            rows.push_back(r);
        }
    }
    return rows;
}

std::string gradcheck_csv(const std::vector<GradcheckRow>& rows) {
    std::ostringstream out;
    out.precision(6);
    out << "engine,seed,tau,lagset,max_rel_err,max_abs_err\n";
    for (const auto& r : rows) {
        std::string lags = r.lag_set;
        std::replace(lags.begin(), lags.end(), ',', ';');
        out << r.engine << ',' << r.seed << ',' << r.tau << ',' << lags << ',' << r.max_rel_err << ','
            << r.max_abs_err << '\n';
    }
    return out.str();
}

}  // namespace rnnp::cli
