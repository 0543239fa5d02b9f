// Experiment driver: builds structured operators from a flat config file and
// runs RIP estimation, chaos statistics, recovery, and scaling sweeps.
//
// Exit codes: 0 success, 2 config error, 3 numerical failure.

#include <chrono>
#include <complex>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "fastrip/fastrip.hpp"

namespace {

using namespace fastrip;

constexpr double kRecoverySuccessThreshold = 1e-6;

struct CliOptions {
    std::string config_path;
    std::string out_override;
    std::optional<std::uint64_t> seed_override;
    std::optional<std::uint64_t> trials_override;
    bool quiet = false;
};

ExperimentConfig load_config(const CliOptions& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigParse("cannot open config file '" + opts.config_path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    ExperimentConfig cfg = parse_config(buf.str());
    if (opts.seed_override) cfg.recipe.seed = *opts.seed_override;
    if (opts.trials_override) cfg.trials = *opts.trials_override;
    if (!opts.out_override.empty()) cfg.out = opts.out_override;
    return cfg;
}

void warn_regime(const ExperimentConfig& cfg, bool quiet) {
    if (quiet) return;
    const double n = static_cast<double>(cfg.recipe.n);
    const double k = static_cast<double>(cfg.recipe.k);
    const double s = static_cast<double>(cfg.recipe.s);
    if (cfg.recipe.construction == Construction::Theorem1) {
        if (k > std::sqrt(n / std::max(1.0, s)))
            std::cerr << "WARNING: k > sqrt(n/s); outside the theorem-1 regime\n";
    } else if (cfg.recipe.construction == Construction::Theorem2) {
        if (k > std::sqrt(n))
            std::cerr << "WARNING: k > sqrt(n); outside the theorem-2 regime\n";
        if (s * std::log(n) > k)
            std::cerr << "WARNING: s log n > k; outside the theorem-2 regime\n";
    }
}

void write_artifact(const ExperimentConfig& cfg, const std::string& text, bool quiet) {
    if (cfg.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.out, std::ios::binary);
    if (!out) throw ConfigParse("cannot open output file '" + cfg.out + "'");
    out << text;
    if (!quiet) std::cerr << "wrote " << cfg.out << "\n";
}

std::string fmt(double v) { return detail::format_double(v); }

int cmd_build(const ExperimentConfig& cfg, bool quiet) {
    const auto chain = build_chain(cfg.recipe);
    std::string text = emit_chain_spec(cfg.recipe);
    if (!quiet) {
        std::cerr << "built " << to_string(chain.tag) << " chain: n=" << chain.n
                  << " k=" << chain.k << " stages=" << chain.stages.size()
                  << " scale=" << chain.scale << "\n";
        if (cfg.recipe.construction == Construction::Theorem2) {
            const auto h = make_transform(cfg.recipe.transform, cfg.recipe.n);
            PlanOptions opts;
            opts.kappa_override = cfg.recipe.kappa_override;
            opts.enforce_regime = false;
            const auto plan = plan_theorem2(cfg.recipe.n, cfg.recipe.k, cfg.recipe.s,
                                            cfg.recipe.c_kappa, h, cfg.recipe.seed, opts);
            std::cerr << "  kappa=" << plan.kappa << " r=" << plan.r << " blocks=" << plan.r + 1
                      << "\n";
        }
    }
    write_artifact(cfg, text, quiet);
    return 0;
}

int cmd_rip(const ExperimentConfig& cfg, bool quiet) {
    const auto chain = build_chain(cfg.recipe);
    const auto t0 = std::chrono::steady_clock::now();
    RipEstimate est;
    if (cfg.method == "exact") {
        if (chain.requires_complex()) {
            est = exact_rip_constant(materialize_chain<std::complex<double>>(chain),
                                     cfg.recipe.s);
        } else {
            est = exact_rip_constant(materialize_chain<double>(chain), cfg.recipe.s);
        }
    } else {
        est = monte_carlo_rip(chain, cfg.recipe.s, cfg.trials, cfg.recipe.seed);
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

    std::string csv = config_summary_line(cfg) + "\n";
    csv += "construction,n,k,s,method,delta,trials,seed,wall_time_ms\n";
    csv += to_string(cfg.recipe.construction) + "," + std::to_string(cfg.recipe.n) + "," +
           std::to_string(cfg.recipe.k) + "," + std::to_string(cfg.recipe.s) + "," +
           (est.method == RipMethod::ExactEnumeration ? "exact" : "monte-carlo") + "," +
           fmt(est.delta) + "," + std::to_string(est.trials) + "," +
           std::to_string(cfg.recipe.seed) + "," + (cfg.timing ? fmt(wall_ms) : "") + "\n";
    if (!quiet)
        std::cerr << "delta_" << cfg.recipe.s << " = " << est.delta
                  << " (squared convention: " << est.delta_squared << ")\n";
    write_artifact(cfg, csv, quiet);
    return 0;
}

int cmd_chaos(const ExperimentConfig& cfg, bool quiet) {
    const auto chain = build_chain(cfg.recipe);
    std::vector<double> x(cfg.recipe.n, 0.0);
    if (cfg.probe == "e0") {
        x[0] = 1.0;
    } else {
        CounterRng rng(derive_seed(cfg.recipe.seed, 0, SeedRole::Probe));
        double nrm_sq = 0.0;
        for (auto& v : x) {
            v = rng.next_gaussian();
            nrm_sq += v * v;
        }
        for (auto& v : x) v /= std::sqrt(nrm_sq);
    }
    const auto st = chaos_statistics(chain, x, cfg.trials, cfg.recipe.seed);

    std::string csv = config_summary_line(cfg) + "\n";
    csv += "construction,n,k,trials,seed,mean_alpha_sq,median_alpha,q90,q99,q999,variance\n";
    csv += to_string(cfg.recipe.construction) + "," + std::to_string(cfg.recipe.n) + "," +
           std::to_string(cfg.recipe.k) + "," + std::to_string(st.trials) + "," +
           std::to_string(cfg.recipe.seed) + "," + fmt(st.mean_alpha_sq) + "," +
           fmt(st.median_alpha) + "," + fmt(st.quantiles.at(0.9)) + "," +
           fmt(st.quantiles.at(0.99)) + "," + fmt(st.quantiles.at(0.999)) + "," +
           fmt(st.variance) + "\n";
    if (!quiet)
        std::cerr << "mean alpha^2 = " << st.mean_alpha_sq << ", median = " << st.median_alpha
                  << ", variance = " << st.variance << "\n";
    write_artifact(cfg, csv, quiet);
    return 0;
}

int cmd_recover(const ExperimentConfig& cfg, bool quiet) {
    std::string csv = config_summary_line(cfg) + "\n";
    csv += "algorithm,n,k,s,seed,success,iters,rel_error\n";
    int iht_successes = 0, omp_successes = 0;
    for (int inst = 0; inst < cfg.instances; ++inst) {
        ChainRecipe r = cfg.recipe;
        r.seed = derive_seed(cfg.recipe.seed, static_cast<std::uint64_t>(inst),
                             SeedRole::Trial);
        const auto chain = build_chain(r);
        CounterRng rng(derive_seed(r.seed, 1, SeedRole::Coefficients));
        const auto truth = detail::random_sparse_unit<double>(rng, r.n, r.s);
        const auto y = apply_chain(chain, truth, Direction::Forward);
        const ChainOperator op{&chain};

        const auto iht = iht_recover(op, y, r.s, cfg.max_iters, cfg.tol, cfg.step, &truth);
        const bool iht_ok = iht.relative_error <= kRecoverySuccessThreshold;
        iht_successes += iht_ok ? 1 : 0;
        csv += "iht," + std::to_string(r.n) + "," + std::to_string(r.k) + "," +
               std::to_string(r.s) + "," + std::to_string(r.seed) + "," +
               (iht_ok ? "1" : "0") + "," + std::to_string(iht.iterations) + "," +
               fmt(iht.relative_error) + "\n";

        const auto omp = omp_recover(op, y, r.s, &truth);
        const bool omp_ok = omp.relative_error <= kRecoverySuccessThreshold;
        omp_successes += omp_ok ? 1 : 0;
        csv += "omp," + std::to_string(r.n) + "," + std::to_string(r.k) + "," +
               std::to_string(r.s) + "," + std::to_string(r.seed) + "," +
               (omp_ok ? "1" : "0") + "," + std::to_string(omp.iterations) + "," +
               fmt(omp.relative_error) + "\n";
    }
    if (!quiet)
        std::cerr << "iht: " << iht_successes << "/" << cfg.instances
                  << " successes, omp: " << omp_successes << "/" << cfg.instances << "\n";
    write_artifact(cfg, csv, quiet);
    return 0;
}

int cmd_bench(const ExperimentConfig& cfg, bool quiet) {
    std::vector<std::size_t> n_list = cfg.n_list;
    if (n_list.empty())
        for (std::size_t n = 1 << 10; n <= (1 << 16); n <<= 1) n_list.push_back(n);
    for (const auto n : n_list)
        if (!is_power_of_two(n)) throw ConfigParse("n_list entries must be powers of two");
    const auto report = scaling_sweep(cfg.recipe, n_list, cfg.repeats);

    std::string csv = config_summary_line(cfg) + "\n";
    csv += "construction,n,k,r,ops,median_ms,ratio\n";
    for (const auto& row : report) {
        csv += to_string(row.construction) + "," + std::to_string(row.n) + "," +
               std::to_string(row.k) + "," + std::to_string(row.r) + "," +
               std::to_string(row.ops) + "," + (cfg.timing ? fmt(row.median_ms) : "") + "," +
               (cfg.timing && row.ratio > 0.0 ? fmt(row.ratio) : "") + "\n";
        if (!quiet)
            std::cerr << "n=" << row.n << " ops=" << row.ops << " median_ms=" << row.median_ms
                      << " ratio=" << row.ratio << "\n";
    }
    write_artifact(cfg, csv, quiet);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"structured RIP operator experiments"};
    app.require_subcommand(1);

    CliOptions opts;
    app.add_option("--config", opts.config_path, "flat key = value config file")->required();
    std::uint64_t seed_val = 0;
    auto* seed_opt = app.add_option("--seed", seed_val, "override master_seed");
    std::uint64_t trials_val = 0;
    auto* trials_opt = app.add_option("--trials", trials_val, "override trial count");
    app.add_option("--out", opts.out_override, "override output path");
    app.add_flag("--quiet", opts.quiet, "suppress progress output");

    auto* sub_build = app.add_subcommand("build", "build a chain and emit its spec");
    auto* sub_rip = app.add_subcommand("rip", "estimate the RIP constant");
    auto* sub_chaos = app.add_subcommand("chaos", "chaos concentration statistics");
    auto* sub_recover = app.add_subcommand("recover", "sparse-recovery experiment");
    auto* sub_bench = app.add_subcommand("bench", "op-count and wall-clock scaling");
    for (auto* sub : {sub_build, sub_rip, sub_chaos, sub_recover, sub_bench})
        sub->fallthrough();

    CLI11_PARSE(app, argc, argv);
    if (*seed_opt) opts.seed_override = seed_val;
    if (*trials_opt) opts.trials_override = trials_val;

    try {
        const ExperimentConfig cfg = load_config(opts);
        warn_regime(cfg, opts.quiet);
        if (*sub_build) return cmd_build(cfg, opts.quiet);
        if (*sub_rip) return cmd_rip(cfg, opts.quiet);
        if (*sub_chaos) return cmd_chaos(cfg, opts.quiet);
        if (*sub_recover) return cmd_recover(cfg, opts.quiet);
        if (*sub_bench) return cmd_bench(cfg, opts.quiet);
    } catch (const ConfigParse& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const KappaTooLarge& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const RegimeViolation& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const BadSupport& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const SizeGuard& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DegenerateInput& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const TooManySupports& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
