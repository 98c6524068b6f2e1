// Command-line front end for the multiplex analysis pipeline.
//
// Exit codes: 0 success, 1 validation or usage error, 2 solver
// non-convergence, 3 I/O error.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "multinet/demo.hpp"
#include "multinet/errors.hpp"
#include "multinet/io.hpp"
#include "multinet/pipeline.hpp"

namespace {

struct Cli {
    std::string manifest;
    std::string direction;
    std::string pair;
    std::string average_mode = "years";
    bool average = false;
    bool per_year = false;
    bool binary = false;
    std::vector<std::string> exclude;
    std::string out = "multinet_out";
    double tol = 0.0;
    int max_iter = 0;
    double rescale_target = 0.0;
};

const char* describe(const std::string& command)
{
    if (command == "pearson") return "Pearson correlation matrices between layers (CSV and SVG)";
    if (command == "recip") return "single-layer reciprocity table";
    if (command == "cross") return "cross-product reciprocity r and multiplexity m matrices";
    if (command == "wrcm-fit") return "fit the reciprocated configuration model to every layer";
    if (command == "rho") return "null-enhanced global and local rho/mu";
    if (command == "backbone") return "backbone of significant local correlations (GraphML, DOT)";
    if (command == "links") return "per-node significant link counts through time";
    if (command == "imbalance") return "per-node export minus import series";
    if (command == "jackknife") return "leave-one-period-out jackknife estimates";
    if (command == "export") return "rewrite the ingested multiplex as manifest and CSV files";
    return "run every analysis";
}

void add_common(CLI::App* sub, Cli& cli)
{
    sub->add_option("--manifest", cli.manifest, "manifest JSON")->required();
    sub->add_option("--direction", cli.direction, "syn or rev")->check(CLI::IsMember({"syn", "rev"}));
    sub->add_option("--pair", cli.pair, "layer pair A:B");
    auto* avg = sub->add_flag("--average", cli.average, "average over the periods (default)");
    sub->add_flag("--per-year", cli.per_year, "one result per period")->excludes(avg);
    sub->add_option("--average-mode", cli.average_mode, "years: mean of per-period values; pooled: time-averaged layers")
        ->check(CLI::IsMember({"years", "pooled"}));
    sub->add_flag("--binary", cli.binary, "binary projections for Pearson statistics");
    sub->add_option("--exclude-period", cli.exclude, "drop a period (repeatable)");
    sub->add_option("--out", cli.out, "output directory");
    sub->add_option("--tol", cli.tol, "solver tolerance")->check(CLI::PositiveNumber);
    sub->add_option("--max-iter", cli.max_iter, "solver iteration cap")->check(CLI::PositiveNumber);
    sub->add_option("--rescale-target", cli.rescale_target, "median weight after rescaling")->check(CLI::PositiveNumber);
}

multinet::RunOptions to_options(const Cli& cli)
{
    multinet::RunOptions o;
    if (!cli.direction.empty()) o.direction = multinet::parse_direction(cli.direction);
    if (!cli.pair.empty()) o.pair = multinet::parse_pair(cli.pair);
    o.per_year = cli.per_year;
    o.binary = cli.binary;
    o.averaging = cli.average_mode == "pooled" ? multinet::Averaging::pooled : multinet::Averaging::mean_of_periods;
    o.exclude_periods = cli.exclude;
    o.out = cli.out;
    if (cli.tol > 0) o.tol = cli.tol;
    if (cli.max_iter > 0) o.max_iter = cli.max_iter;
    if (cli.rescale_target > 0) o.rescale_target = cli.rescale_target;
    return o;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Correlation and reciprocity analysis of multiplex networks"};
    app.require_subcommand(1);
    Cli cli;

    std::vector<std::string> commands = multinet::pipeline_commands();
    commands.push_back("all");
    for (const auto& c : commands) add_common(app.add_subcommand(c, describe(c)), cli);

    std::string demo_out = "demo";
    app.add_subcommand("make-demo", "write the bundled synthetic multiplex")->add_option("--out", demo_out, "directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        if (command == "make-demo") {
            multinet::write_demo(demo_out);
            std::cout << "wrote " << demo_out << "/manifest.json\n";
            return 0;
        }
        const auto manifest = multinet::load_manifest(cli.manifest);
        const auto report = multinet::run_pipeline(manifest, command, to_options(cli));
        std::cout << command << ": " << report.artifacts.size() << " files in " << cli.out << "\n";
        for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
        for (const auto& f : report.failures) std::cerr << "failed: " << f << "\n";
        return report.non_convergence ? 2 : 0;
    } catch (const multinet::ConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const multinet::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const multinet::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
