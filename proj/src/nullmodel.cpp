#include "multinet/nullmodel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "multinet/metrics.hpp"

namespace multinet {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();
constexpr double strength_floor = 1e-12;

// ln(1 - e^{-t}) for t > 0; 0 at t = inf.
double log1mexp(double t) { return std::log(-std::expm1(-t)); }

// Mean of a geometric weight with ratio e^{-t}: 1/(e^t - 1).
double bose(double t) { return 1.0 / std::expm1(t); }

// Its variance: e^t/(e^t - 1)^2.
double bose_variance(double t) { return 1.0 / (std::expm1(t) * -std::expm1(-t)); }

// Parameter layout: alpha_i at i, beta_i at n + i, gamma_i at 2n + i.
// Lagrange multipliers of pinned (zero-strength) constraints are +inf.
struct Problem {
    Eigen::Index n = 0;
    Matrix right;   // observed w->_ij of the integer layer
    Matrix mutual;  // observed w<->_ij
    Vector target;  // (s->, s<-, s<->)
    std::vector<Eigen::Index> free;
};

struct Evaluation {
    bool feasible = false;
    double value = -infinity;
    Vector expected;     // expected strengths, same layout as the parameters
    Matrix covariance;   // negative Hessian of the log-likelihood
};

Evaluation evaluate(const Problem& p, const Vector& theta, bool with_covariance)
{
    const auto n = p.n;
    Evaluation ev;
    ev.expected = Vector::Zero(3 * n);
    if (with_covariance) ev.covariance = Matrix::Zero(3 * n, 3 * n);
    double value = 0.0;

    auto add_block = [&](Eigen::Index a, Eigen::Index b, double w) {
        ev.covariance(a, b) += w;
    };

    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const Eigen::Index ai = i, aj = j, bi = n + i, bj = n + j, gi = 2 * n + i, gj = 2 * n + j;
            const double u = theta(ai) + theta(bj);  // ln 1/(x_i y_j)
            const double v = theta(aj) + theta(bi);  // ln 1/(x_j y_i)
            const double t = theta(gi) + theta(gj);  // ln 1/(z_i z_j)
            if (!(u > 0.0) || !(v > 0.0) || !(t > 0.0)) return ev;

            const double uv = u + v;
            // -ln Z_ij, Z_ij = (1 - pq) / ((1 - p)(1 - q)(1 - z_i z_j))
            value += log1mexp(u) + log1mexp(v) + log1mexp(t) - log1mexp(uv);

            const double w_ij = p.right(i, j), w_ji = p.right(j, i), m_ij = p.mutual(i, j);
            if (w_ij > 0.0) value -= u * w_ij;
            if (w_ji > 0.0) value -= v * w_ji;
            if (m_ij > 0.0) value -= t * m_ij;

            const double both = bose(uv);
            const double e_ij = bose(u) - both;
            const double e_ji = bose(v) - both;
            const double e_m = bose(t);
            ev.expected(ai) += e_ij;
            ev.expected(bj) += e_ij;
            ev.expected(aj) += e_ji;
            ev.expected(bi) += e_ji;
            ev.expected(gi) += e_m;
            ev.expected(gj) += e_m;

            if (!with_covariance) continue;
            const double var_both = bose_variance(uv);
            const double var_ij = bose_variance(u) - var_both;
            const double var_ji = bose_variance(v) - var_both;
            const double cov = -var_both;
            const Eigen::Index on_u[2] = {ai, bj};
            const Eigen::Index on_v[2] = {aj, bi};
            for (auto a : on_u)
                for (auto b : on_u) add_block(a, b, var_ij);
            for (auto a : on_v)
                for (auto b : on_v) add_block(a, b, var_ji);
            for (auto a : on_u)
                for (auto b : on_v) {
                    add_block(a, b, cov);
                    add_block(b, a, cov);
                }
            const double var_m = bose_variance(t);
            add_block(gi, gi, var_m);
            add_block(gj, gj, var_m);
            add_block(gi, gj, var_m);
            add_block(gj, gi, var_m);
        }
    }
    ev.feasible = true;
    ev.value = value;
    return ev;
}

double max_relative_gap(const Problem& p, const Vector& expected)
{
    double worst = 0.0;
    for (auto k : p.free)
        worst = std::max(worst, std::abs(expected(k) - p.target(k)) / std::max(p.target(k), strength_floor));
    return worst;
}

Vector initial_parameters(const Problem& p)
{
    const auto n = p.n;
    Vector theta = Vector::Constant(3 * n, infinity);
    const auto out = p.target.segment(0, n);
    const auto in = p.target.segment(n, n);
    const auto mut = p.target.segment(2 * n, n);

    double peak = 0.0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j) peak = std::max(peak, out(i) * in(j));
    if (peak > 0.0) {
        // x_i = c s->_i, y_j = c s<-_j with max_{i != j} x_i y_j = 0.1
        const double c = std::sqrt(0.1 / peak);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (out(i) > 0.0) theta(i) = -std::log(c * out(i));
            if (in(i) > 0.0) theta(n + i) = -std::log(c * in(i));
        }
    }
    const double total_mutual = mut.sum();
    for (Eigen::Index i = 0; i < n; ++i)
        if (mut(i) > 0.0) theta(2 * n + i) = -0.5 * std::log(mut(i) / (total_mutual + 1.0));
    return theta;
}

Problem make_problem(const Matrix& integer_layer)
{
    const auto dyads = decompose_dyads(integer_layer);
    Problem p;
    p.n = integer_layer.rows();
    p.right = dyads.right;
    p.mutual = dyads.mutual;
    p.target.resize(3 * p.n);
    p.target << dyads.right.rowwise().sum(), dyads.left.rowwise().sum(), dyads.mutual.rowwise().sum();
    for (Eigen::Index k = 0; k < p.target.size(); ++k)
        if (p.target(k) > 0.0) p.free.push_back(k);
    return p;
}

// Solves C d = g restricted to the free parameters, with a small ridge for
// the gauge direction (alpha + c, beta - c) that leaves the model unchanged.
Vector newton_direction(const Problem& p, const Evaluation& ev)
{
    const auto m = static_cast<Eigen::Index>(p.free.size());
    Matrix c(m, m);
    Vector g(m);
    double diag = 1.0;
    for (Eigen::Index a = 0; a < m; ++a) {
        g(a) = ev.expected(p.free[a]) - p.target(p.free[a]);
        for (Eigen::Index b = 0; b < m; ++b) c(a, b) = ev.covariance(p.free[a], p.free[b]);
        diag = std::max(diag, c(a, a));
    }
    double ridge = 1e-12 * diag;
    for (int attempt = 0; attempt < 8; ++attempt, ridge *= 100.0) {
        Matrix regular = c;
        regular.diagonal().array() += ridge;
        Eigen::LDLT<Matrix> ldlt(regular);
        if (ldlt.info() != Eigen::Success) continue;
        Vector d = ldlt.solve(g);
        if (d.allFinite() && g.dot(d) > 0.0) return d;
    }
    // Jacobi-scaled gradient, always an ascent direction.
    Vector d(m);
    for (Eigen::Index a = 0; a < m; ++a) d(a) = g(a) / std::max(c(a, a), 1e-300);
    return d;
}

struct LineSearchResult {
    bool accepted = false;
    Vector theta;
    Evaluation eval;
};

LineSearchResult line_search(const Problem& p, const Vector& theta, const Evaluation& current,
                             const Vector& direction, double damping)
{
    constexpr double armijo = 1e-4;
    // Near the optimum the likelihood gain drops below rounding; a step is
    // then judged by the residual instead.
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(current.value) + 1.0);
    const double current_gap = max_relative_gap(p, current.expected);
    double slope = 0.0;
    for (std::size_t a = 0; a < p.free.size(); ++a)
        slope += (current.expected(p.free[a]) - p.target(p.free[a])) * direction(static_cast<Eigen::Index>(a));

    double step = 1.0;
    for (int attempt = 0; attempt < 80; ++attempt, step *= damping) {
        Vector trial = theta;
        for (std::size_t a = 0; a < p.free.size(); ++a)
            trial(p.free[a]) += step * direction(static_cast<Eigen::Index>(a));
        auto ev = evaluate(p, trial, false);
        if (!ev.feasible) continue;
        if (ev.value >= current.value + armijo * step * slope) return {true, std::move(trial), std::move(ev)};
        if (ev.value >= current.value - noise && max_relative_gap(p, ev.expected) < current_gap)
            return {true, std::move(trial), std::move(ev)};
    }
    return {};
}

}  // namespace

double expected_right_weight(double xi, double yi, double xj, double yj)
{
    const double p = xi * yj;
    const double q = xj * yi;
    return p * (1.0 - q) / ((1.0 - p) * (1.0 - p * q));
}

double expected_mutual_weight(double zi, double zj)
{
    const double zz = zi * zj;
    return zz / (1.0 - zz);
}

DiscretizedLayer discretize_layer(const Matrix& w, const SolverConfig& config)
{
    validate_layer(w);
    const bool integral = (w.array() == w.array().round()).all();
    const bool rescale = config.rescale == RescalePolicy::always ||
                         (config.rescale == RescalePolicy::automatic && !integral);
    if (!rescale || config.rescale_target <= 0.0) {
        if (!integral)
            throw ValidationError("WRCM fit without rescaling needs integer weights");
        return {w, 1.0};
    }
    std::vector<double> positive;
    for (Eigen::Index i = 0; i < w.size(); ++i)
        if (w.data()[i] > 0.0) positive.push_back(w.data()[i]);
    if (positive.empty()) return {w, 1.0};
    const auto mid = positive.begin() + static_cast<std::ptrdiff_t>(positive.size() / 2);
    std::nth_element(positive.begin(), mid, positive.end());
    double median = *mid;
    if (positive.size() % 2 == 0) {
        const double lower = *std::max_element(positive.begin(), mid);
        median = 0.5 * (median + lower);
    }
    const double scale = config.rescale_target / median;
    return {(w * scale).array().round().matrix(), scale};
}

WrcmFit fit_wrcm(const Matrix& layer, const SolverConfig& config)
{
    const auto discrete = discretize_layer(layer, config);
    const auto n = layer.rows();
    if (n < 2) throw DegenerateNetworkError("WRCM fit needs at least two nodes");
    if (!(config.damping > 0.0 && config.damping < 1.0))
        throw ValidationError("solver damping must lie in (0, 1)");

    const Problem problem = make_problem(discrete.weights);
    Vector theta = initial_parameters(problem);
    Evaluation ev = evaluate(problem, theta, true);
    if (!ev.feasible) throw Error("WRCM initial point is infeasible");

    WrcmFit fit;
    fit.scale = discrete.scale;
    fit.likelihood_trace.push_back(ev.value);
    double gap = max_relative_gap(problem, ev.expected);
    int iter = 0;
    while (gap >= config.tol && iter < config.max_iter) {
        const Vector direction = newton_direction(problem, ev);
        auto step = line_search(problem, theta, ev, direction, config.damping);
        if (!step.accepted) {
            // Coordinate-wise ascent on the gradient before giving up.
            Vector jacobi(direction.size());
            for (std::size_t a = 0; a < problem.free.size(); ++a) {
                const auto k = problem.free[a];
                jacobi(static_cast<Eigen::Index>(a)) =
                    (ev.expected(k) - problem.target(k)) / std::max(ev.covariance(k, k), 1e-300);
            }
            step = line_search(problem, theta, ev, jacobi, config.damping);
            if (!step.accepted) break;  // no representable ascent left
        }
        ++iter;
        theta = std::move(step.theta);
        ev = evaluate(problem, theta, true);
        fit.likelihood_trace.push_back(ev.value);
        gap = max_relative_gap(problem, ev.expected);
    }

    fit.iterations = iter;
    fit.converged = gap < config.tol;
    fit.max_relative_residual = gap;
    fit.log_likelihood = ev.value;

    const auto multiplier = [](double t) { return std::exp(-t); };
    fit.x = theta.segment(0, n).unaryExpr(multiplier);
    fit.y = theta.segment(n, n).unaryExpr(multiplier);
    fit.z = theta.segment(2 * n, n).unaryExpr(multiplier);
    fit.observed_out = problem.target.segment(0, n);
    fit.observed_in = problem.target.segment(n, n);
    fit.observed_mutual = problem.target.segment(2 * n, n);

    fit.expected_right = Matrix::Zero(n, n);
    fit.expected_left = Matrix::Zero(n, n);
    fit.expected_mutual = Matrix::Zero(n, n);
    fit.log_partition = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double u = theta(i) + theta(n + j);
            const double v = theta(j) + theta(n + i);
            const double t = theta(2 * n + i) + theta(2 * n + j);
            const double both = bose(u + v);
            fit.expected_right(i, j) = bose(u) - both;
            fit.expected_left(i, j) = bose(v) - both;
            fit.expected_mutual(i, j) = bose(t);
            fit.log_partition(i, j) = log1mexp(u + v) - log1mexp(u) - log1mexp(v) - log1mexp(t);
        }

    fit.residuals.resize(n, 3);
    fit.residuals.col(0) = fit.expected_right.rowwise().sum() - fit.observed_out;
    fit.residuals.col(1) = fit.expected_left.rowwise().sum() - fit.observed_in;
    fit.residuals.col(2) = fit.expected_mutual.rowwise().sum() - fit.observed_mutual;

    fit.expected_right /= fit.scale;
    fit.expected_left /= fit.scale;
    fit.expected_mutual /= fit.scale;
    return fit;
}

WrcmFit fit_wrcm_checked(const Matrix& layer, const SolverConfig& config)
{
    auto fit = fit_wrcm(layer, config);
    if (!fit.converged) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "WRCM fit did not converge after %d iterations (max relative residual %.3e)",
                      fit.iterations, fit.max_relative_residual);
        throw ConvergenceError(buf, std::move(fit));
    }
    return fit;
}

double drg_expectation(const Matrix& layer)
{
    const auto s = layer_summary(layer);
    if (s.link_count == 0) throw UndefinedError("directed random graph expectation: layer has no links");
    return s.connectance;
}

ExpectedCrossStats expected_cross_stats(const WrcmFit& fit_a, const WrcmFit& fit_b)
{
    const Matrix ea = fit_a.expected_weights();
    const Matrix eb = fit_b.expected_weights();
    if (ea.rows() != eb.rows()) throw ValidationError("fits cover different node sets");
    const double norm = ea.sum() * eb.sum();
    if (!(norm > 0.0)) throw UndefinedError("expected cross statistics: zero expected total weight");
    return {ea.cwiseProduct(eb.transpose()).sum() / norm, ea.cwiseProduct(eb).sum() / norm};
}

namespace {

double enhance(double observed, double expected)
{
    if (!is_defined(observed) || !is_defined(expected) || expected >= 1.0) return undefined;
    return (observed - expected) / (1.0 - expected);
}

}  // namespace

GlobalNullEnhanced null_enhanced_global(const Matrix& layer_a, const Matrix& layer_b, const WrcmFit& fit_a,
                                        const WrcmFit& fit_b)
{
    const auto observed = cross_product_stats(layer_a, layer_b);
    const auto expected = expected_cross_stats(fit_a, fit_b);
    GlobalNullEnhanced out;
    out.r = observed.r;
    out.m = observed.m;
    out.expected_r = expected.r;
    out.expected_m = expected.m;
    out.rho = enhance(out.r, out.expected_r);
    out.mu = enhance(out.m, out.expected_m);
    return out;
}

double null_enhanced_self_reciprocity(const Matrix& layer, const WrcmFit& fit)
{
    const double observed = weighted_reciprocity_min(layer);
    const double expected_total = fit.expected_weights().sum();
    if (!(expected_total > 0.0)) throw UndefinedError("self reciprocity: zero expected total weight");
    return enhance(observed, fit.expected_mutual.sum() / expected_total);
}

LocalNullEnhanced null_enhanced_local(const Matrix& layer_a, const Matrix& layer_b, const WrcmFit& fit_a,
                                      const WrcmFit& fit_b)
{
    const Matrix ea = fit_a.expected_weights();
    const Matrix eb = fit_b.expected_weights();
    LocalNullEnhanced out;
    out.observed_r = local_stats(layer_a, layer_b, LocalKind::reciprocity).values;
    out.observed_m = local_stats(layer_a, layer_b, LocalKind::multiplexity).values;
    out.expected_r = local_stats(ea, eb, LocalKind::reciprocity).values;
    out.expected_m = local_stats(ea, eb, LocalKind::multiplexity).values;
    out.rho = out.observed_r.binaryExpr(out.expected_r, [](double o, double e) { return enhance(o, e); });
    out.mu = out.observed_m.binaryExpr(out.expected_m, [](double o, double e) { return enhance(o, e); });
    out.rho_significant = out.rho.array() > 0.0;  // NaN compares false
    out.mu_significant = out.mu.array() > 0.0;
    return out;
}

}  // namespace multinet
