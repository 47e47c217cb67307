#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "ewarn/date.hpp"
#include "ewarn/errors.hpp"
#include "ewarn/pipeline.hpp"

namespace {

struct Flags {
    std::string manifest;
    std::string as_of;
    std::string spec;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    unsigned threads = 0;
};

ewarn::pipeline::RunOptions run_options(const Flags& f) {
    ewarn::pipeline::RunOptions o;
    o.seed = f.seed;
    if (f.out) o.out_dir = *f.out;
    o.threads = f.threads > 0 ? f.threads : std::max(1u, std::thread::hardware_concurrency());
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Early-warning detection of epidemic growth and decay in proxy time series"};
    app.require_subcommand(1);
    Flags f;

    auto add_common = [&](CLI::App* sub, bool needs_manifest) {
        auto* opt = sub->add_option("--manifest", f.manifest, "pipeline manifest (JSON)");
        if (needs_manifest) opt->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", f.seed, "overrides the manifest seed");
        sub->add_option("--threads", f.threads, "worker threads (default: hardware concurrency)")
            ->check(CLI::Range(1u, 1024u));
        sub->add_option("--out", f.out, "output directory (overrides the manifest)");
    };

    auto* detect = app.add_subcommand("detect", "per-proxy uptrend/downtrend p-values, events and plots");
    add_common(detect, true);
    auto* combine = app.add_subcommand("combine", "harmonic-mean combined indicator per location");
    add_common(combine, true);
    auto* predict = app.add_subcommand("predict", "time-to-event posterior per location");
    add_common(predict, true);
    predict->add_option("--as-of", f.as_of, "evaluation date, YYYY-MM-DD")->required();
    auto* excess = app.add_subcommand("excess-ili", "weekly Excess ILI with IDEA and virology counterfactuals");
    add_common(excess, true);
    auto* leadlag = app.add_subcommand("leadlag", "proxy-vs-gold event lead/lag summaries");
    add_common(leadlag, true);
    auto* simulate = app.add_subcommand("simulate", "write a synthetic multi-state scenario and its manifest");
    simulate->add_option("--spec", f.spec, "scenario spec (JSON)")->required()->check(CLI::ExistingFile);
    simulate->add_option("--seed", f.seed, "overrides the scenario seed");
    simulate->add_option("--out", f.out, "output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        namespace p = ewarn::pipeline;
        const auto opts = run_options(f);
        if (*simulate) {
            p::cmd_simulate(f.spec, *f.out, f.seed);
            return 0;
        }
        const auto m = p::load_manifest(f.manifest, opts);
        if (*detect) p::cmd_detect(m, opts.threads);
        if (*combine) p::cmd_combine(m, opts.threads);
        if (*predict) {
            ewarn::Date as_of;
            try {
                as_of = ewarn::Date::parse(f.as_of);
            } catch (const ewarn::DataError& e) {
                throw ewarn::ConfigError(std::string("--as-of: ") + e.what());
            }
            p::cmd_predict(m, as_of, opts.threads);
        }
        if (*excess) p::cmd_excess_ili(m);
        if (*leadlag) p::cmd_leadlag(m, opts.threads);
    } catch (const ewarn::Error& e) {
        std::cerr << "error (" << e.kind() << "): " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error (data): " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error (numerical): " << e.what() << "\n";
        return 4;
    }
    return 0;
}
