#pragma once

#include <vector>

#include "multinet/core.hpp"
#include "multinet/errors.hpp"

namespace multinet {

/// How a layer is mapped onto integer weights before fitting the WRCM,
/// whose geometric dyad distributions count integer weight units.
enum class RescalePolicy {
    automatic,  // rescale only layers that carry non-integer weights
    always,
    never,
};

struct SolverConfig {
    double tol = 1e-8;              // relative residual on every strength
    int max_iter = 100000;
    double damping = 0.5;           // backtracking factor of the line search
    double rescale_target = 10.0;   // median positive weight after rescaling
    RescalePolicy rescale = RescalePolicy::automatic;
};

/// Maximum-likelihood WRCM fit of a single layer.
///
/// The multipliers are x_i = e^{-alpha_i}, y_i = e^{-beta_i}, z_i = e^{-gamma_i}
/// for the non-reciprocated out-strength, non-reciprocated in-strength and
/// reciprocated strength of node i. A multiplier is exactly 0 when its
/// observed strength is 0.
///
/// Expected matrices are in the units of the input layer; observed strengths,
/// residuals and the likelihood refer to the integer layer that was fitted
/// (`scale` times the input, rounded).
struct WrcmFit {
    Vector x, y, z;
    Matrix expected_right;   // <w->_ij>
    Matrix expected_left;    // <w<-_ij>
    Matrix expected_mutual;  // <w<->_ij>
    Matrix log_partition;    // ln Z_ij, symmetric, zero diagonal

    Vector observed_out, observed_in, observed_mutual;
    Matrix residuals;  // N x 3, expected minus observed strength (out, in, mutual)
    double max_relative_residual = 0.0;

    double log_likelihood = 0.0;
    std::vector<double> likelihood_trace;  // one entry per accepted iterate
    int iterations = 0;
    bool converged = false;
    double scale = 1.0;

    /// <w_ij> = <w->_ij> + <w<->_ij>.
    Matrix expected_weights() const { return expected_right + expected_mutual; }
};

class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, WrcmFit fit) : Error(what), fit_(std::move(fit)) {}
    const WrcmFit& fit() const { return fit_; }

private:
    WrcmFit fit_;
};

/// Closed-form dyad expectations for given multipliers; i != j.
double expected_right_weight(double xi, double yi, double xj, double yj);
double expected_mutual_weight(double zi, double zj);

/// Integer layer actually fitted, and the factor that produced it.
struct DiscretizedLayer {
    Matrix weights;
    double scale = 1.0;
};

DiscretizedLayer discretize_layer(const Matrix& w, const SolverConfig& config);

/// Fits the model; reports non-convergence through `converged`.
WrcmFit fit_wrcm(const Matrix& layer, const SolverConfig& config = {});

/// Like fit_wrcm, but throws ConvergenceError (carrying the best iterate)
/// when the residual stays above tolerance.
WrcmFit fit_wrcm_checked(const Matrix& layer, const SolverConfig& config = {});

/// Expected binary reciprocity under the directed random graph: the
/// connectance L/(N(N-1)).
double drg_expectation(const Matrix& layer);

struct ExpectedCrossStats {
    double r = 0.0;
    double m = 0.0;
};

ExpectedCrossStats expected_cross_stats(const WrcmFit& fit_a, const WrcmFit& fit_b);

struct GlobalNullEnhanced {
    double r = 0.0, m = 0.0;                    // observed
    double expected_r = 0.0, expected_m = 0.0;  // under the fitted nulls
    double rho = undefined;                     // (r - <r>)/(1 - <r>)
    double mu = undefined;                      // (m - <m>)/(1 - <m>)
};

GlobalNullEnhanced null_enhanced_global(const Matrix& layer_a, const Matrix& layer_b, const WrcmFit& fit_a,
                                        const WrcmFit& fit_b);

/// Single-layer reciprocity W<->/W against its WRCM expectation. The model
/// constrains every reciprocated strength, so this vanishes at convergence.
double null_enhanced_self_reciprocity(const Matrix& layer, const WrcmFit& fit);

struct LocalNullEnhanced {
    Matrix observed_r, observed_m;
    Matrix expected_r, expected_m;
    Matrix rho, mu;                    // undefined where either side is
    Mask rho_significant, mu_significant;  // defined and strictly positive
};

LocalNullEnhanced null_enhanced_local(const Matrix& layer_a, const Matrix& layer_b, const WrcmFit& fit_a,
                                      const WrcmFit& fit_b);

}  // namespace multinet
