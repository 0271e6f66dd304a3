#include "pavsig/gvf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

#include "pavsig/kernels.hpp"

namespace pavsig {

GvfConfig GvfConfig::td(double lambda) {
    GvfConfig cfg;
    cfg.alpha = 0.1;
    cfg.gamma = 0.9;
    cfg.lambda = lambda;
    cfg.algorithm = Algorithm::td;
    return cfg;
}

GvfConfig GvfConfig::gtd(Direction target) {
    GvfConfig cfg;
    cfg.alpha = 0.2;
    cfg.beta = 0.01;
    cfg.gamma = 0.9;
    cfg.lambda = 0.9;
    cfg.algorithm = Algorithm::gtd;
    cfg.target_direction = target;
    return cfg;
}

void GvfConfig::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be > 0");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("gamma must be in [0, 1)");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("lambda must be in [0, 1]");
    if (algorithm == Algorithm::gtd && !(beta > 0.0)) {
        throw std::invalid_argument("beta must be > 0 for gtd");
    }
}

GvfState::GvfState(std::size_t feature_count)
    : w(feature_count, 0.0), u(feature_count, 0.0), e(feature_count, 0.0) {}

void GvfState::reset() {
    std::fill(w.begin(), w.end(), 0.0);
    std::fill(u.begin(), u.end(), 0.0);
    std::fill(e.begin(), e.end(), 0.0);
    last_features.reset();
}

namespace {

void check_fits(const GvfState& state, const FeatureVector& x) {
    if (x.length != state.size()) {
        throw std::out_of_range("feature length " + std::to_string(x.length) +
                                " does not match learner length " + std::to_string(state.size()));
    }
    for (std::uint32_t i : x.indices()) {
        if (i >= state.size()) {
            throw std::out_of_range("feature index " + std::to_string(i) + " out of range");
        }
    }
}

double sparse_dot(const std::vector<double>& v, const FeatureVector& x) {
    double sum = 0.0;
    for (std::uint32_t i : x.indices()) sum += v[i];
    return sum;
}

// e = min(1, x(S_last) + gamma * lambda * e)
void replace_trace(GvfState& state, const GvfConfig& cfg) {
    kernels::active().scale_clip(state.e, cfg.gamma * cfg.lambda);
    if (state.last_features) {
        for (std::uint32_t i : state.last_features->indices()) {
            state.e[i] = std::min(1.0, state.e[i] + 1.0);
        }
    }
}

double td_error(const GvfState& state, const GvfConfig& cfg, Cumulant c, const FeatureVector& x_now) {
    const double v_last = state.last_features ? sparse_dot(state.w, *state.last_features) : 0.0;
    return c.value + cfg.gamma * sparse_dot(state.w, x_now) - v_last;
}

}  // namespace

double predict(const GvfState& state, const FeatureVector& x) {
    check_fits(state, x);
    return sparse_dot(state.w, x);
}

double td_update(GvfState& state, const GvfConfig& cfg, Cumulant c, const FeatureVector& x_now) {
    check_fits(state, x_now);
    const double delta = td_error(state, cfg, c, x_now);
    replace_trace(state, cfg);
    kernels::active().axpy(state.w, cfg.alpha * delta, state.e);
    state.last_features = x_now;
    return delta;
}

double gtd_update(GvfState& state, const GvfConfig& cfg, Cumulant c, const FeatureVector& x_now,
                  int rho) {
    check_fits(state, x_now);
    const auto& k = kernels::active();
    const double delta = td_error(state, cfg, c, x_now);

    if (rho == 0) {
        std::fill(state.e.begin(), state.e.end(), 0.0);
    } else {
        replace_trace(state, cfg);
    }

    // w += alpha * [delta * e - gamma * (1 - lambda) * (e'u) * x(S)]
    const double eu = k.dot(state.e, state.u);
    const double correction = cfg.alpha * (cfg.gamma * (1.0 - cfg.lambda) * eu);
    k.axpy(state.w, cfg.alpha * delta, state.e);
    for (std::uint32_t i : x_now.indices()) state.w[i] = state.w[i] - correction;

    // u += beta * [delta * e - (x(S_last)'u) * x(S_last)]
    const double xu = state.last_features ? sparse_dot(state.u, *state.last_features) : 0.0;
    k.axpy(state.u, cfg.beta * delta, state.e);
    if (state.last_features) {
        for (std::uint32_t i : state.last_features->indices()) {
            state.u[i] = state.u[i] - cfg.beta * xu;
        }
    }

    state.last_features = x_now;
    return delta;
}

int rho_for(Direction now, Direction target) {
    return (now != Direction::rest && now == target) ? 1 : 0;
}

double lookahead_predict(const GvfState& state, const JointObservation& shoulder,
                         const JointObservation& elbow, Direction direction, int k,
                         const TileLayout& layout) {
    const JointObservation query = shift_query(shoulder.clamped(), direction, k, layout);
    return predict(state, encode(query, elbow, layout));
}

std::string weight_checksum(const GvfState& state) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](const std::vector<double>& v) {
        for (double d : v) {
            unsigned char bytes[sizeof(double)];
            std::memcpy(bytes, &d, sizeof(double));
            for (unsigned char b : bytes) {
                h ^= b;
                h *= 0x100000001b3ULL;
            }
        }
    };
    mix(state.w);
    mix(state.u);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

Gvf::Gvf(GvfConfig cfg, std::size_t feature_count) : cfg_(cfg), state_(feature_count) {
    cfg_.validate();
}

double Gvf::update(Cumulant c, const FeatureVector& x_now, int rho) {
    if (cfg_.algorithm == Algorithm::gtd) return gtd_update(state_, cfg_, c, x_now, rho);
    return td_update(state_, cfg_, c, x_now);
}

std::vector<double> cycle_values(const CycleMdp& mdp, double gamma) {
    const std::size_t n = mdp.size();
    // Augmented rows of (I - gamma P) V = P c, P the cycle successor matrix.
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t s = 0; s < n; ++s) {
        const std::size_t next = (s + 1) % n;
        a[s][s] += 1.0;
        a[s][next] -= gamma;
        a[s][n] = mdp.arrival_cumulant[next];
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        std::swap(a[col], a[pivot]);
        if (a[col][col] == 0.0) throw std::runtime_error("singular cycle system");
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t j = col; j <= n; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::vector<double> v(n);
    for (std::size_t s = 0; s < n; ++s) v[s] = a[s][n] / a[s][s];
    return v;
}

ConvergenceReport converge_check(const CycleMdp& mdp, const GvfConfig& cfg, int max_sweeps,
                                 double tolerance) {
    cfg.validate();
    const std::size_t n = mdp.size();
    ConvergenceReport report;
    report.oracle = cycle_values(mdp, cfg.gamma);

    GvfState state(n);
    std::size_t s = 0;
    // First observation of s0 has no predecessor to credit.
    td_update(state, cfg, Cumulant{0.0}, FeatureVector::one_hot(0, n));
    std::vector<double> before;
    for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
        before = state.w;
        for (std::size_t step = 0; step < n; ++step) {
            s = (s + 1) % n;
            td_update(state, cfg, Cumulant{mdp.arrival_cumulant[s]},
                      FeatureVector::one_hot(static_cast<std::uint32_t>(s), n));
        }
        double change = 0.0;
        for (std::size_t i = 0; i < n; ++i) change = std::max(change, std::abs(state.w[i] - before[i]));
        report.sweeps = sweep;
        if (change < tolerance) {
            report.converged = true;
            break;
        }
    }
    report.weights = state.w;
    for (std::size_t i = 0; i < n; ++i) {
        report.max_abs_error = std::max(report.max_abs_error, std::abs(state.w[i] - report.oracle[i]));
    }
    return report;
}

}  // namespace pavsig
