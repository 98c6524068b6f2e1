#include "multinet/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <map>
#include <memory>
#include <tuple>

#include <json.hpp>

#include "multinet/analysis.hpp"
#include "multinet/errors.hpp"
#include "multinet/nullmodel.hpp"
#include "multinet/render.hpp"

namespace multinet {

using nlohmann::json;

namespace {

constexpr const char* average_label = "average";

std::string safe(const std::string& id)
{
    std::string out;
    for (char c : id) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_') ? c : '_';
    return out;
}

std::string lower(std::string s)
{
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Numbers in JSON carry the same 12 significant digits as the CSV files.
json jnum(double v)
{
    if (!is_defined(v)) return "NA";
    return std::stod(format_number(v));
}

json jvec(const Vector& v)
{
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(jnum(v(i)));
    return a;
}

double mean_defined(const std::vector<double>& xs)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (double x : xs)
        if (is_defined(x)) {
            sum += x;
            ++n;
        }
    return n ? sum / static_cast<double>(n) : undefined;
}

double enhance(double observed, double expected)
{
    if (!is_defined(observed) || !is_defined(expected) || expected >= 1.0) return undefined;
    return (observed - expected) / (1.0 - expected);
}

std::string_view stat_name(Direction d) { return d == Direction::reverse ? "rho" : "mu"; }

// Observed and expected statistics of one layer pair in one period.
struct PairPeriod {
    bool ok = false;
    double r = undefined, m = undefined, er = undefined, em = undefined;
    Matrix local_r, local_m, local_er, local_em;
};

class Session {
public:
    Session(const Manifest& manifest, const RunOptions& options) : options_(options), tensor_(load(manifest))
    {
        solver_ = manifest.solver;
        if (options.tol) solver_.tol = *options.tol;
        if (options.max_iter) solver_.max_iter = *options.max_iter;
        if (options.rescale_target) solver_.rescale_target = *options.rescale_target;
        for (const auto& e : tensor_.nodes().entries()) node_ids_.push_back(e.id);
        for (const auto& l : tensor_.layers()) layer_ids_.push_back(l.id);
        aggregate_pairs_ = resolve_aggregate(manifest);
    }

    const MultiplexTensor& tensor() const { return tensor_; }
    const RunOptions& options() const { return options_; }
    RunReport& report() { return report_; }

    void emit(const std::string& rel, const std::string& text)
    {
        write_text(options_.out / rel, text);
        report_.artifacts.push_back(rel);
    }

    void fail(const std::string& what)
    {
        if (std::find(report_.failures.begin(), report_.failures.end(), what) == report_.failures.end())
            report_.failures.push_back(what);
    }

    void warn(const std::string& what) { report_.warnings.push_back(what); }

    std::vector<std::string> times() const
    {
        if (options_.per_year) return tensor_.periods();
        return {average_label};
    }

    std::size_t layer(const std::string& id) const
    {
        for (std::size_t k = 0; k < layer_ids_.size(); ++k)
            if (layer_ids_[k] == id) return k;
        std::optional<std::size_t> found;
        for (std::size_t k = 0; k < layer_ids_.size(); ++k)
            if (lower(layer_ids_[k]) == lower(id)) {
                if (found) throw LookupError("layer id '" + id + "' is ambiguous");
                found = k;
            }
        if (!found) throw LookupError("unknown layer '" + id + "'");
        return *found;
    }

    /// Pairs for the null-model commands: --pair, or financial x environmental.
    std::vector<std::pair<std::size_t, std::size_t>> pairs() const
    {
        if (options_.pair) return {{layer(options_.pair->first), layer(options_.pair->second)}};
        return aggregate_pairs_;
    }

    const std::vector<std::pair<std::size_t, std::size_t>>& aggregate_pairs() const { return aggregate_pairs_; }

    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::vector<std::string>& layer_ids() const { return layer_ids_; }
    const SolverConfig& solver() const { return solver_; }

    /// Fit of layer k in period t, converged or not; failures are recorded once.
    const WrcmFit& any_fit(std::size_t k, std::size_t t)
    {
        const auto key = std::make_pair(k, t);
        auto it = fits_.find(key);
        if (it == fits_.end()) {
            auto fit = std::make_unique<WrcmFit>(fit_wrcm(tensor_.layer(t, k), solver_));
            it = fits_.emplace(key, std::move(fit)).first;
            if (!it->second->converged) {
                report_.non_convergence = true;
                char buf[64];
                std::snprintf(buf, sizeof buf, "%.3e", it->second->max_relative_residual);
                fail("wrcm " + layer_ids_[k] + " " + tensor_.periods()[t] + ": not converged (residual " + buf + ")");
            }
        }
        return *it->second;
    }

    const WrcmFit* fit(std::size_t k, std::size_t t)
    {
        const auto& f = any_fit(k, t);
        return f.converged ? &f : nullptr;
    }

    const PairPeriod& pair_period(std::size_t a, std::size_t b, std::size_t t)
    {
        const auto key = std::make_tuple(a, b, t);
        auto it = pair_cache_.find(key);
        if (it != pair_cache_.end()) return it->second;
        PairPeriod pp;
        const auto* fa = fit(a, t);
        const auto* fb = fit(b, t);
        const auto& wa = tensor_.layer(t, a);
        const auto& wb = tensor_.layer(t, b);
        if (fa && fb) {
            try {
                const auto g = null_enhanced_global(wa, wb, *fa, *fb);
                const auto l = null_enhanced_local(wa, wb, *fa, *fb);
                pp = {true, g.r, g.m, g.expected_r, g.expected_m, l.observed_r, l.observed_m, l.expected_r,
                      l.expected_m};
            } catch (const UndefinedError& e) {
                warn(layer_ids_[a] + ":" + layer_ids_[b] + " " + tensor_.periods()[t] + ": " + e.what());
            }
        } else {
            fail("pair " + layer_ids_[a] + ":" + layer_ids_[b] + " " + tensor_.periods()[t] + ": no converged fit");
        }
        return pair_cache_.emplace(key, std::move(pp)).first->second;
    }

    /// Periods behind a time label: one period, or all of them for the average.
    std::vector<std::size_t> periods_of(const std::string& time) const
    {
        if (time != average_label) return {tensor_.period_index(time)};
        std::vector<std::size_t> all(tensor_.period_count());
        for (std::size_t t = 0; t < all.size(); ++t) all[t] = t;
        return all;
    }

    /// Observed and expected statistics are averaged separately over the
    /// periods, then combined.
    struct GlobalValue {
        double r = undefined, er = undefined, rho = undefined;
        double m = undefined, em = undefined, mu = undefined;
    };

    GlobalValue global(std::size_t a, std::size_t b, const std::vector<std::size_t>& periods)
    {
        std::vector<double> r, er, m, em;
        for (auto t : periods) {
            const auto& pp = pair_period(a, b, t);
            if (!pp.ok) continue;
            r.push_back(pp.r);
            er.push_back(pp.er);
            m.push_back(pp.m);
            em.push_back(pp.em);
        }
        GlobalValue v;
        v.r = mean_defined(r);
        v.er = mean_defined(er);
        v.m = mean_defined(m);
        v.em = mean_defined(em);
        v.rho = enhance(v.r, v.er);
        v.mu = enhance(v.m, v.em);
        return v;
    }

    /// Local null-enhanced matrix of one pair over the given periods.
    Matrix local(std::size_t a, std::size_t b, const std::vector<std::size_t>& periods, Direction d)
    {
        const auto n = static_cast<Eigen::Index>(tensor_.node_count());
        Matrix obs = Matrix::Zero(n, n), exp = Matrix::Zero(n, n);
        Eigen::MatrixXi count = Eigen::MatrixXi::Zero(n, n);
        for (auto t : periods) {
            const auto& pp = pair_period(a, b, t);
            if (!pp.ok) continue;
            const Matrix& o = d == Direction::reverse ? pp.local_r : pp.local_m;
            const Matrix& e = d == Direction::reverse ? pp.local_er : pp.local_em;
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j)
                    if (is_defined(o(i, j)) && is_defined(e(i, j))) {
                        obs(i, j) += o(i, j);
                        exp(i, j) += e(i, j);
                        ++count(i, j);
                    }
        }
        Matrix out(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                out(i, j) = count(i, j) ? enhance(obs(i, j) / count(i, j), exp(i, j) / count(i, j)) : undefined;
        return out;
    }

    /// Mean of the local matrices of every aggregate pair.
    Matrix aggregate_local(const std::vector<std::size_t>& periods, Direction d)
    {
        const auto n = static_cast<Eigen::Index>(tensor_.node_count());
        Matrix sum = Matrix::Zero(n, n);
        Eigen::MatrixXi count = Eigen::MatrixXi::Zero(n, n);
        for (auto [a, b] : aggregate_pairs_) {
            const Matrix l = local(a, b, periods, d);
            for (Eigen::Index k = 0; k < l.size(); ++k)
                if (is_defined(l.data()[k])) {
                    sum.data()[k] += l.data()[k];
                    ++count.data()[k];
                }
        }
        Matrix out(n, n);
        for (Eigen::Index k = 0; k < out.size(); ++k)
            out.data()[k] = count.data()[k] ? sum.data()[k] / count.data()[k] : undefined;
        return out;
    }

private:
    MultiplexTensor load(const Manifest& manifest)
    {
        auto ingested = ingest(manifest);
        for (auto& w : ingested.warnings) report_.warnings.push_back(std::move(w));
        MultiplexTensor t = std::move(ingested.tensor);
        for (const auto& p : options_.exclude_periods) t = t.without_period(p);
        return t;
    }

    std::vector<std::pair<std::size_t, std::size_t>> resolve_aggregate(const Manifest& manifest)
    {
        std::vector<std::size_t> fin, env;
        if (manifest.financial_aggregate.empty()) {
            for (auto k : tensor_.layers_of_kind(LayerKind::financial))
                if (lower(layer_ids_[k]) != "td") fin.push_back(k);
        } else {
            for (const auto& id : manifest.financial_aggregate) fin.push_back(layer(id));
        }
        if (manifest.environmental_aggregate.empty()) {
            env = tensor_.layers_of_kind(LayerKind::environmental);
        } else {
            for (const auto& id : manifest.environmental_aggregate) env.push_back(layer(id));
        }
        std::vector<std::pair<std::size_t, std::size_t>> out;
        for (auto a : fin)
            for (auto b : env) out.emplace_back(a, b);
        return out;
    }

    RunOptions options_;
    RunReport report_;
    MultiplexTensor tensor_;
    SolverConfig solver_;
    std::vector<std::string> node_ids_, layer_ids_;
    std::vector<std::pair<std::size_t, std::size_t>> aggregate_pairs_;
    std::map<std::pair<std::size_t, std::size_t>, std::unique_ptr<WrcmFit>> fits_;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, PairPeriod> pair_cache_;
};

std::vector<Direction> directions(const Session& s)
{
    if (s.options().direction) return {*s.options().direction};
    return {Direction::synergic, Direction::reverse};
}

Direction single_direction(const Session& s) { return s.options().direction.value_or(Direction::reverse); }

std::string pair_label(const Session& s, std::size_t a, std::size_t b)
{
    return safe(s.layer_ids()[a]) + "_" + safe(s.layer_ids()[b]);
}

void run_pearson(Session& s)
{
    const auto rep = s.options().binary ? Representation::binary : Representation::weighted;
    for (auto d : directions(s)) {
        const std::string stem = "pearson/pearson_" + std::string(to_string(d)) + (s.options().binary ? "_binary" : "");
        std::vector<PearsonMatrix> mats;
        if (s.options().per_year) {
            for (std::size_t t = 0; t < s.tensor().period_count(); ++t)
                mats.push_back(pearson_matrix(s.tensor(), t, d, rep));
        } else {
            mats.push_back(averaged_pearson_matrix(s.tensor(), d, rep, s.options().averaging));
        }
        for (const auto& m : mats) {
            const std::string name = stem + "_" + safe(m.time);
            s.emit(name + ".csv", matrix_csv(m.values, s.layer_ids(), s.layer_ids(), "layer"));
            s.emit(name + ".svg", heatmap_svg(m.values, s.layer_ids(), s.layer_ids(),
                                              "Pearson " + std::string(to_string(d)) +
                                                  (s.options().binary ? " binary" : "") + " " + m.time));
        }
    }
}

void run_recip(Session& s)
{
    const auto& tensor = s.tensor();
    std::string out = "layer,time,links,connectance,r_binary,rho_binary,r_weighted,c_weighted,rho_weighted,r_min\n";
    auto row = [&](std::size_t k, const std::string& time, const std::vector<double>& v) {
        out += csv_escape(s.layer_ids()[k]) + "," + csv_escape(time);
        for (double x : v) out += "," + format_number(x);
        out += "\n";
    };
    auto values = [&](const Matrix& w) {
        std::vector<double> v(8, undefined);
        const auto summary = layer_summary(w);
        v[0] = static_cast<double>(summary.link_count);
        v[1] = summary.connectance;
        try {
            const auto b = binary_reciprocity(w);
            v[2] = b.r;
            v[3] = b.rho;
        } catch (const UndefinedError&) {
        }
        try {
            const auto wr = weighted_reciprocity_pearson(w);
            v[4] = wr.r;
            v[5] = wr.connectance;
            v[6] = wr.rho;
            v[7] = weighted_reciprocity_min(w);
        } catch (const UndefinedError&) {
        }
        return v;
    };
    for (std::size_t k = 0; k < tensor.layer_count(); ++k) {
        std::vector<std::vector<double>> per;
        for (std::size_t t = 0; t < tensor.period_count(); ++t) {
            per.push_back(values(tensor.layer(t, k)));
            row(k, tensor.periods()[t], per.back());
        }
        std::vector<double> avg(8);
        if (s.options().averaging == Averaging::pooled) {
            avg = values(tensor.time_average(k));
        } else {
            for (std::size_t c = 0; c < 8; ++c) {
                double sum = 0.0;
                for (const auto& p : per) sum += p[c];  // undefined propagates
                avg[c] = sum / static_cast<double>(per.size());
            }
        }
        row(k, average_label, avg);
    }
    s.emit("recip/reciprocity.csv", out);
}

void run_cross(Session& s)
{
    const auto& tensor = s.tensor();
    const auto kk = static_cast<Eigen::Index>(tensor.layer_count());
    std::vector<std::pair<std::string, CrossStatsMatrix>> mats;
    if (s.options().per_year) {
        for (std::size_t t = 0; t < tensor.period_count(); ++t)
            mats.emplace_back(tensor.periods()[t], cross_stats_matrix(tensor, t));
    } else if (s.options().averaging == Averaging::pooled) {
        std::vector<Matrix> avg;
        for (std::size_t k = 0; k < tensor.layer_count(); ++k) avg.push_back(tensor.time_average(k));
        const MultiplexTensor pooled({average_label}, tensor.layers(), tensor.nodes(), avg);
        mats.emplace_back(average_label, cross_stats_matrix(pooled, 0));
    } else {
        CrossStatsMatrix sum{Matrix::Zero(kk, kk), Matrix::Zero(kk, kk)};
        for (std::size_t t = 0; t < tensor.period_count(); ++t) {
            const auto c = cross_stats_matrix(tensor, t);
            sum.r += c.r;
            sum.m += c.m;
        }
        const double n = static_cast<double>(tensor.period_count());
        mats.emplace_back(average_label, CrossStatsMatrix{sum.r / n, sum.m / n});
    }
    for (const auto& [time, c] : mats) {
        s.emit("cross/cross_r_" + safe(time) + ".csv", matrix_csv(c.r, s.layer_ids(), s.layer_ids(), "layer"));
        s.emit("cross/cross_m_" + safe(time) + ".csv", matrix_csv(c.m, s.layer_ids(), s.layer_ids(), "layer"));
    }
}

json fit_json(const Session& s, const WrcmFit& fit, const std::string& layer, const std::string& time)
{
    json j;
    j["layer"] = layer;
    j["time"] = time;
    j["nodes"] = s.node_ids();
    j["converged"] = fit.converged;
    j["iterations"] = fit.iterations;
    j["scale"] = jnum(fit.scale);
    j["log_likelihood"] = jnum(fit.log_likelihood);
    j["max_relative_residual"] = jnum(fit.max_relative_residual);
    j["x"] = jvec(fit.x);
    j["y"] = jvec(fit.y);
    j["z"] = jvec(fit.z);
    j["observed"] = {{"out", jvec(fit.observed_out)}, {"in", jvec(fit.observed_in)}, {"mutual", jvec(fit.observed_mutual)}};
    j["residuals"] = {{"out", jvec(fit.residuals.col(0))},
                      {"in", jvec(fit.residuals.col(1))},
                      {"mutual", jvec(fit.residuals.col(2))}};
    return j;
}

std::string scatter_csv(const Session& s, const Matrix& w, const WrcmFit& fit)
{
    const Matrix expected = fit.expected_weights();
    const Vector export_strength = w.rowwise().sum();
    std::string out = "source,target,source_export,observed,expected\n";
    for (Eigen::Index i = 0; i < w.rows(); ++i)
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            if (i == j) continue;
            out += csv_escape(s.node_ids()[static_cast<std::size_t>(i)]) + "," +
                   csv_escape(s.node_ids()[static_cast<std::size_t>(j)]) + "," + format_number(export_strength(i)) +
                   "," + format_number(w(i, j)) + "," + format_number(expected(i, j)) + "\n";
        }
    return out;
}

void run_wrcm_fit(Session& s)
{
    const auto& tensor = s.tensor();
    std::vector<std::size_t> layers;
    if (s.options().pair) {
        layers = {s.layer(s.options().pair->first), s.layer(s.options().pair->second)};
        if (layers[0] == layers[1]) layers.pop_back();
    } else {
        for (std::size_t k = 0; k < tensor.layer_count(); ++k) layers.push_back(k);
    }
    for (auto k : layers) {
        const auto& id = s.layer_ids()[k];
        for (std::size_t t = 0; t < tensor.period_count(); ++t) {
            const auto& fit = s.any_fit(k, t);
            const auto name = "wrcm/" + safe(id) + "_" + safe(tensor.periods()[t]);
            s.emit(name + "_fit.json", fit_json(s, fit, id, tensor.periods()[t]).dump(2) + "\n");
            s.emit(name + "_scatter.csv", scatter_csv(s, tensor.layer(t, k), fit));
        }
        if (!s.options().per_year) {
            const Matrix avg = tensor.time_average(k);
            const auto fit = fit_wrcm(avg, s.solver());
            if (!fit.converged) {
                s.report().non_convergence = true;
                s.fail("wrcm " + id + " average: not converged");
            }
            const auto name = "wrcm/" + safe(id) + "_" + average_label;
            s.emit(name + "_fit.json", fit_json(s, fit, id, average_label).dump(2) + "\n");
            s.emit(name + "_scatter.csv", scatter_csv(s, avg, fit));
        }
    }
}

void run_rho(Session& s)
{
    const auto kk = s.tensor().layer_count();
    const auto& ids = s.layer_ids();
    for (const auto& time : s.times()) {
        const auto periods = s.periods_of(time);
        Matrix rho = Matrix::Constant(static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(kk), undefined);
        Matrix mu = rho;
        std::string table = "layer_a,layer_b,r,expected_r,rho,m,expected_m,mu\n";
        for (std::size_t a = 0; a < kk; ++a)
            for (std::size_t b = a; b < kk; ++b) {
                const auto g = s.global(a, b, periods);
                const auto ia = static_cast<Eigen::Index>(a), ib = static_cast<Eigen::Index>(b);
                rho(ia, ib) = rho(ib, ia) = g.rho;
                mu(ia, ib) = mu(ib, ia) = g.mu;
                table += csv_escape(ids[a]) + "," + csv_escape(ids[b]);
                for (double v : {g.r, g.er, g.rho, g.m, g.em, g.mu}) table += "," + format_number(v);
                table += "\n";
            }
        const auto t = safe(time);
        s.emit("rho/global_" + t + ".csv", table);
        s.emit("rho/rho_global_" + t + ".csv", matrix_csv(rho, ids, ids, "layer"));
        s.emit("rho/mu_global_" + t + ".csv", matrix_csv(mu, ids, ids, "layer"));
        s.emit("rho/rho_global_" + t + ".svg", heatmap_svg(rho, ids, ids, "rho " + time));
        s.emit("rho/mu_global_" + t + ".svg", heatmap_svg(mu, ids, ids, "mu " + time));

        for (auto d : {Direction::reverse, Direction::synergic}) {
            const std::string stat(stat_name(d));
            for (auto [a, b] : s.pairs()) {
                const Matrix l = s.local(a, b, periods, d);
                const auto name = "rho/local_" + stat + "_" + pair_label(s, a, b) + "_" + t;
                s.emit(name + ".csv", matrix_csv(l, s.node_ids(), s.node_ids()));
                if (s.options().pair)
                    s.emit(name + ".svg", heatmap_svg(l, s.node_ids(), s.node_ids(),
                                                      "local " + stat + " " + ids[a] + ":" + ids[b] + " " + time));
            }
            if (!s.options().pair && !s.aggregate_pairs().empty()) {
                const Matrix agg = s.aggregate_local(periods, d);
                const auto name = "rho/local_" + stat + "_aggregate_" + t;
                s.emit(name + ".csv", matrix_csv(agg, s.node_ids(), s.node_ids()));
                s.emit(name + ".svg",
                       heatmap_svg(agg, s.node_ids(), s.node_ids(), "local " + stat + " financial:environmental " + time));
            }
        }
    }
}

void emit_backbone(Session& s, const Matrix& local, const std::string& label, const std::string& stat,
                   const std::string& time, std::string& listing)
{
    const auto g = extract_backbone(local);
    const auto name = "backbone/backbone_" + label + "_" + stat + "_" + safe(time);
    const auto graph_id = label + "_" + stat + "_" + time;
    s.emit(name + ".graphml", backbone_graphml(g, s.tensor().nodes(), graph_id));
    s.emit(name + ".dot", backbone_dot(g, s.tensor().nodes(), graph_id));
    std::string members;
    for (auto i : g.component_members) members += (members.empty() ? "" : ";") + s.node_ids()[i];
    listing += csv_escape(label) + "," + csv_escape(time) + "," + std::to_string(g.component_members.size()) + "," +
               std::to_string(g.directed_edges.size()) + "," + std::to_string(g.tied_components) + "," +
               csv_escape(members) + "\n";
    if (g.empty()) s.warn("backbone " + label + " " + stat + " " + time + ": empty");
}

void run_backbone(Session& s)
{
    const auto d = single_direction(s);
    const std::string stat(stat_name(d));
    std::string listing = "pair,time,size,directed_edges,tied_components,members\n";
    for (const auto& time : s.times()) {
        const auto periods = s.periods_of(time);
        for (auto [a, b] : s.pairs()) emit_backbone(s, s.local(a, b, periods, d), pair_label(s, a, b), stat, time, listing);
        if (!s.options().pair && !s.aggregate_pairs().empty())
            emit_backbone(s, s.aggregate_local(periods, d), "aggregate", stat, time, listing);
    }
    s.emit("backbone/components_" + stat + ".csv", listing);
}

void run_links(Session& s)
{
    const auto d = single_direction(s);
    const std::string stat(stat_name(d));
    const auto& tensor = s.tensor();
    std::vector<std::vector<Mask>> masks(tensor.period_count());
    for (std::size_t t = 0; t < tensor.period_count(); ++t)
        for (auto [a, b] : s.pairs()) masks[t].push_back(s.local(a, b, {t}, d).array() > 0.0);
    const auto counts = link_counts(masks, tensor.node_count());

    auto table = [&](const Eigen::MatrixXi& c) {
        std::string out = "node";
        for (const auto& p : tensor.periods()) out += "," + csv_escape(p);
        out += "\n";
        for (Eigen::Index i = 0; i < c.rows(); ++i) {
            out += csv_escape(s.node_ids()[static_cast<std::size_t>(i)]);
            for (Eigen::Index t = 0; t < c.cols(); ++t) out += "," + std::to_string(c(i, t));
            out += "\n";
        }
        return out;
    };
    s.emit("links/links_out_" + stat + ".csv", table(counts.out_count));
    s.emit("links/links_in_" + stat + ".csv", table(counts.in_count));

    std::vector<std::size_t> rank(tensor.node_count());
    for (std::size_t i = 0; i < rank.size(); ++i) rank[i] = i;
    auto total = [&](std::size_t i) {
        return counts.out_count.row(static_cast<Eigen::Index>(i)).sum() +
               counts.in_count.row(static_cast<Eigen::Index>(i)).sum();
    };
    std::stable_sort(rank.begin(), rank.end(), [&](auto x, auto y) { return total(x) > total(y); });
    std::string hubs = "rank,node,out_total,in_total,total\n";
    for (std::size_t r = 0; r < rank.size(); ++r) {
        const auto i = static_cast<Eigen::Index>(rank[r]);
        hubs += std::to_string(r + 1) + "," + csv_escape(s.node_ids()[rank[r]]) + "," +
                std::to_string(counts.out_count.row(i).sum()) + "," + std::to_string(counts.in_count.row(i).sum()) +
                "," + std::to_string(total(rank[r])) + "\n";
    }
    s.emit("links/hubs_" + stat + ".csv", hubs);
}

void run_imbalance(Session& s)
{
    const auto& tensor = s.tensor();
    for (std::size_t k = 0; k < tensor.layer_count(); ++k) {
        const auto series = imbalance_series(tensor, s.layer_ids()[k]);
        std::string out = "node";
        for (const auto& p : tensor.periods()) out += "," + csv_escape(p);
        out += "\n";
        for (std::size_t i = 0; i < tensor.node_count(); ++i) {
            out += csv_escape(s.node_ids()[i]);
            for (const auto& v : series) out += "," + format_number(v(static_cast<Eigen::Index>(i)));
            out += "\n";
        }
        s.emit("imbalance/imbalance_" + safe(s.layer_ids()[k]) + ".csv", out);
    }
}

json estimate_json(const JackknifeEstimate& e)
{
    json j;
    j["statistic"] = e.statistic_name;
    j["point"] = jnum(e.point);
    j["left_out"] = e.left_out;
    json l = json::array();
    for (double v : e.leave_one_out) l.push_back(jnum(v));
    j["leave_one_out"] = l;
    j["variance"] = jnum(e.variance);
    j["std_error"] = jnum(e.std_error);
    return j;
}

void run_jackknife(Session& s)
{
    const auto& tensor = s.tensor();
    const auto rep = s.options().binary ? Representation::binary : Representation::weighted;
    std::vector<std::pair<std::size_t, std::size_t>> layer_pairs;
    if (s.options().pair) {
        layer_pairs = s.pairs();
    } else {
        for (std::size_t a = 0; a < tensor.layer_count(); ++a)
            for (std::size_t b = a; b < tensor.layer_count(); ++b) layer_pairs.emplace_back(a, b);
    }

    json estimates = json::array();
    for (auto d : directions(s))
        for (auto [a, b] : layer_pairs) {
            const auto name = "pearson_" + std::string(to_string(d)) + (s.options().binary ? "_binary" : "") + ":" +
                              s.layer_ids()[a] + ":" + s.layer_ids()[b];
            const TensorStatistic stat = [&, a = a, b = b, d = d](const MultiplexTensor& sub) {
                return averaged_pearson_matrix(sub, d, rep, s.options().averaging)
                    .values(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
            };
            estimates.push_back(estimate_json(jackknife(name, stat, tensor)));
        }

    // Null-enhanced statistics reuse the per-period fits of the full sample:
    // a leave-one-out replicate only changes which periods are averaged.
    for (auto d : directions(s))
        for (auto [a, b] : s.pairs()) {
            const auto name = std::string(stat_name(d)) + ":" + s.layer_ids()[a] + ":" + s.layer_ids()[b];
            const TensorStatistic stat = [&, a = a, b = b, d = d](const MultiplexTensor& sub) {
                std::vector<std::size_t> periods;
                for (const auto& p : sub.periods()) periods.push_back(tensor.period_index(p));
                const auto g = s.global(a, b, periods);
                return d == Direction::reverse ? g.rho : g.mu;
            };
            estimates.push_back(estimate_json(jackknife(name, stat, tensor)));
        }
    json j;
    j["periods"] = tensor.periods();
    j["estimates"] = estimates;
    s.emit("jackknife/jackknife.json", j.dump(2) + "\n");
}

void run_export(Session& s)
{
    const auto dir = s.options().out / "export";
    export_tensor(s.tensor(), dir, s.solver());
    std::vector<std::string> files;
    for (const auto& entry : fs::recursive_directory_iterator(dir))
        if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), s.options().out).generic_string());
    std::sort(files.begin(), files.end());
    for (auto& f : files) s.report().artifacts.push_back(f);
}

void write_report(Session& s, const std::string& command)
{
    json j;
    j["command"] = command;
    j["periods"] = s.tensor().periods();
    j["excluded_periods"] = s.options().exclude_periods;
    j["nodes"] = s.tensor().node_count();
    j["layers"] = s.layer_ids();
    j["solver"] = {{"tol", s.solver().tol},
                   {"max_iter", s.solver().max_iter},
                   {"damping", s.solver().damping},
                   {"rescale_target", s.solver().rescale_target}};
    auto sorted = s.report().artifacts;
    std::sort(sorted.begin(), sorted.end());
    j["artifacts"] = sorted;
    j["failures"] = s.report().failures;
    j["warnings"] = s.report().warnings;
    j["non_convergence"] = s.report().non_convergence;
    write_text(s.options().out / ("run_report_" + command + ".json"), j.dump(2) + "\n");
}

}  // namespace

const std::vector<std::string>& pipeline_commands()
{
    static const std::vector<std::string> commands{"pearson", "recip",     "cross",    "wrcm-fit", "rho",   "backbone",
                                                   "links",   "imbalance", "jackknife", "export"};
    return commands;
}

std::pair<std::string, std::string> parse_pair(const std::string& text)
{
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0 || colon + 1 == text.size() ||
        text.find(':', colon + 1) != std::string::npos)
        throw ValidationError("layer pair must look like A:B, got '" + text + "'");
    return {text.substr(0, colon), text.substr(colon + 1)};
}

RunReport run_pipeline(const Manifest& manifest, const std::string& command, const RunOptions& options)
{
    const auto& known = pipeline_commands();
    if (command != "all" && std::find(known.begin(), known.end(), command) == known.end())
        throw ValidationError("unknown subcommand '" + command + "'");

    Session s(manifest, options);
    if (options.pair) s.pairs();  // validates the ids up front

    auto run_one = [&](const std::string& c) {
        if (c == "pearson") run_pearson(s);
        else if (c == "recip") run_recip(s);
        else if (c == "cross") run_cross(s);
        else if (c == "wrcm-fit") run_wrcm_fit(s);
        else if (c == "rho") run_rho(s);
        else if (c == "backbone") run_backbone(s);
        else if (c == "links") run_links(s);
        else if (c == "imbalance") run_imbalance(s);
        else if (c == "jackknife") run_jackknife(s);
        else if (c == "export") run_export(s);
    };
    if (command == "all") {
        for (const auto& c : known)
            if (c != "export") run_one(c);
    } else {
        run_one(command);
    }
    write_report(s, command);
    return s.report();
}

}  // namespace multinet
