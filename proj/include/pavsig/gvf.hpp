#pragma once

// Linear general value functions learned with TD(lambda) or GTD(lambda)
// over sparse binary features.
//
// Both learners follow the "on update call" form: each call observes the
// cumulant C and the new features x(S), computes
//     delta = C + gamma * w'x(S) - w'x(S_last)
// and credits the previous state through a replacing trace
//     e = min(1, x(S_last) + gamma * lambda * e).
// GTD additionally gates the trace by rho in {0, 1} and corrects w with a
// secondary weight vector u learned at rate beta.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pavsig/tilecoder.hpp"

namespace pavsig {

enum class Algorithm { td, gtd };

struct GvfConfig {
    double alpha = 0.1;
    double beta = 0.0;
    double gamma = 0.9;
    double lambda = 0.0;
    Algorithm algorithm = Algorithm::td;
    // Target policy for GTD: "keep moving in this direction".
    std::optional<Direction> target_direction;

    // TD(lambda) with alpha = 0.1, gamma = 0.9.
    static GvfConfig td(double lambda);
    // GTD(lambda) with alpha = 0.2, gamma = 0.9, lambda = 0.9, beta = 0.01.
    static GvfConfig gtd(Direction target);

    // Throws std::invalid_argument on a violated invariant.
    void validate() const;
};

struct Cumulant {
    double value = 0.0;
};

struct GvfState {
    explicit GvfState(std::size_t feature_count);

    std::vector<double> w;
    std::vector<double> u;
    std::vector<double> e;
    // Empty means x(S_last) is the zero vector (nothing observed yet).
    std::optional<FeatureVector> last_features;

    std::size_t size() const { return w.size(); }
    void reset();
};

// w'x. Throws std::out_of_range when an index or the vector length does not
// fit the state.
double predict(const GvfState& state, const FeatureVector& x);

// One TD(lambda) step; returns delta.
double td_update(GvfState& state, const GvfConfig& cfg, Cumulant c, const FeatureVector& x_now);

// One GTD(lambda) step with importance weight rho (0 or 1); returns delta.
double gtd_update(GvfState& state, const GvfConfig& cfg, Cumulant c, const FeatureVector& x_now,
                  int rho);

// 1 iff the observed motion matches the target direction. Rest is misaligned.
int rho_for(Direction now, Direction target);

// Prediction for the shoulder shifted `k` position bins in `direction`.
// Reads only; learning keeps using the unshifted features.
double lookahead_predict(const GvfState& state, const JointObservation& shoulder,
                         const JointObservation& elbow, Direction direction, int k,
                         const TileLayout& layout);

// FNV-1a over the bytes of w followed by u, as 16 hex digits.
std::string weight_checksum(const GvfState& state);

// A learner bundles a config with its state and routes update() to the
// matching rule.
class Gvf {
public:
    Gvf(GvfConfig cfg, std::size_t feature_count);

    double predict(const FeatureVector& x) const { return pavsig::predict(state_, x); }

    // rho is ignored for TD learners.
    double update(Cumulant c, const FeatureVector& x_now, int rho = 1);

    const GvfConfig& config() const { return cfg_; }
    const GvfState& state() const { return state_; }
    GvfState& mutable_state() { return state_; }

private:
    GvfConfig cfg_;
    GvfState state_;
};

// Deterministic cycle s0 -> s1 -> ... -> s(n-1) -> s0 with tabular one-hot
// features. arrival_cumulant[s] is the cumulant observed on arriving at s.
struct CycleMdp {
    std::vector<double> arrival_cumulant;

    std::size_t size() const { return arrival_cumulant.size(); }
};

// Solves V(s) = C(s') + gamma * V(s') for the cycle by Gaussian elimination.
std::vector<double> cycle_values(const CycleMdp& mdp, double gamma);

struct ConvergenceReport {
    bool converged = false;
    int sweeps = 0;
    double max_abs_error = 0.0;
    std::vector<double> weights;
    std::vector<double> oracle;
};

// Runs td_update around the cycle until the largest weight change over a
// sweep drops below `tolerance` or `max_sweeps` is exhausted.
ConvergenceReport converge_check(const CycleMdp& mdp, const GvfConfig& cfg, int max_sweeps = 200000,
                                 double tolerance = 1e-9);

}  // namespace pavsig
