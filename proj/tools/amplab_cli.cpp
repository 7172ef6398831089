#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <iostream>

#include "amplab/config.hpp"
#include "amplab/decomp.hpp"
#include "amplab/diag.hpp"
#include "amplab/experiment.hpp"
#include "amplab/io.hpp"
#include "amplab/prng.hpp"
#include "amplab/se.hpp"

namespace {

using namespace amplab;

ExperimentConfig load_with_override(const std::string& path, long seed_override) {
    ExperimentConfig cfg = load_config(path);
    if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
    if (cfg.warn_sample_size)
        std::cerr << "warning: n <= 2k log(p/k) or p <= 2.3k; sample-size conditions "
                     "violated, results may not track state evolution\n";
    return cfg;
}

int cmd_run(const std::string& config_path, const std::string& out_dir, long seed_override,
            int threads) {
    ExperimentConfig cfg = load_with_override(config_path, seed_override);
    std::filesystem::create_directories(out_dir);
    ExperimentOutput res = run_experiment(cfg, out_dir, resolve_threads(threads));
    std::cout << "trials ok: " << res.trials_ok << ", failed: " << res.trials_failed
              << "\n";
    return res.trials_ok == 0 ? 1 : 0;
}

int cmd_se(const std::string& config_path, const std::string& out_dir, long seed_override) {
    ExperimentConfig cfg = load_with_override(config_path, seed_override);
    std::filesystem::create_directories(out_dir);
    LinearModel model = make_model(cfg.n, cfg.p, cfg.k, cfg.signal, cfg.noise_for(cfg.n),
                                   trial_seed(cfg.seed, 0));
    SeOptions so;
    so.t_max = cfg.t_max;
    so.lambda = cfg.lambda;
    SeTrace se = run_se(model, cfg.mode, so);
    CsvWriter csv(out_dir + "/se.csv");
    csv.header({"t", "alpha_star", "gamma_star", "inner_param"});
    for (std::size_t t = 1; t < se.gamma_star.size(); ++t)
        csv.row({CsvWriter::num(static_cast<long>(t)), CsvWriter::num(se.alpha_star[t]),
                 CsvWriter::num(se.gamma_star[t]), CsvWriter::num(se.inner_param[t])});
    std::cout << "fixed point: gamma*=" << se.fixed_point.gamma
              << " alpha*=" << se.fixed_point.alpha << " after "
              << se.fixed_point.iterations
              << (se.fixed_point.converged ? " iterations\n" : " iterations (not converged)\n");
    return 0;
}

int cmd_decomp(const std::string& config_path, const std::string& out_dir,
               long seed_override) {
    ExperimentConfig cfg = load_with_override(config_path, seed_override);
    std::filesystem::create_directories(out_dir);
    const uint64_t seed = trial_seed(cfg.seed, 0);
    LinearModel model =
        make_model(cfg.n, cfg.p, cfg.k, cfg.signal, cfg.noise_for(cfg.n), seed);
    RunOptions ro;
    ro.t_max = cfg.t_max;
    ro.lambda = cfg.lambda;
    AmpTrace trace = run_amp(model, cfg.mode, ro);
    DecompOptions dopt;
    dopt.aux_seed = seed;
    Decomposition dec(model, trace, dopt);
    int done = dec.run(cfg.t_max);

    std::vector<double> gamma_hat_tt(done + 1, std::nan(""));
    std::vector<double> alpha_hat_tt(done + 1, std::nan(""));
    if (cfg.diag_hat && done >= 2) {
        HatSequences hat(dec);
        hat.run(done - 1);
        for (int t = 1; t <= hat.steps_done(); ++t) {
            gamma_hat_tt[t] = hat.state().gamma_hat[t](t - 1);
            alpha_hat_tt[t] = hat.state().alpha_hat[t](t - 1);
        }
    }

    CsvWriter csv(out_dir + "/decomp.csv");
    csv.header({"t", "xi_norm", "zeta_norm", "gamma_norm", "alpha_norm", "gamma_hat_tt",
                "alpha_hat_tt"});
    for (int t = 1; t <= done; ++t)
        csv.row({CsvWriter::num(static_cast<long>(t)),
                 CsvWriter::num(dec.xi()[t].norm()), CsvWriter::num(dec.zeta()[t].norm()),
                 CsvWriter::num(dec.gamma_coeffs()[t].norm()),
                 CsvWriter::num(dec.alpha_coeffs()[t].norm()),
                 CsvWriter::num(gamma_hat_tt[t]), CsvWriter::num(alpha_hat_tt[t])});
    std::cout << "decomposition steps: " << done << "\n";
    return 0;
}

int cmd_hfun(const std::string& family, double lo, double hi, double step,
             const std::string& out_dir, bool svg) {
    std::filesystem::create_directories(out_dir);
    HCurve c = hcurve(family, lo, hi, step);
    if (c.grid.empty()) {
        std::cerr << "hfun: empty grid\n";
        return 2;
    }
    CsvWriter csv(out_dir + "/" + family + ".csv");
    csv.header({"x", "value", "argsup"});
    for (std::size_t i = 0; i < c.grid.size(); ++i)
        csv.row({CsvWriter::num(c.grid[i]), CsvWriter::num(c.values[i]),
                 CsvWriter::num(c.argsup[i])});
    if (svg) {
        SvgSeries s;
        s.x = c.grid;
        s.y = c.values;
        s.label = family;
        write_svg_lineplot(out_dir + "/" + family + ".svg", family, {s});
    }
    double mn = c.values[0];
    for (double v : c.values) mn = std::min(mn, v);
    std::cout << family << ": " << c.grid.size() << " points, min value " << mn << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              long seed_override, int threads) {
    ExperimentConfig cfg = load_with_override(config_path, seed_override);
    std::filesystem::create_directories(out_dir);
    run_sweep(cfg, out_dir, resolve_threads(threads));
    std::cout << "sweep written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AMP laboratory: sparse/robust AMP, state evolution, decomposition "
                 "diagnostics"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    long seed_override = -1;
    int threads = 0;

    auto add_common = [&](CLI::App* sub, bool with_threads) {
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--out-dir", out_dir, "output directory");
        sub->add_option("--seed-override", seed_override, "replace the config seed");
        if (with_threads)
            sub->add_option("--threads", threads,
                            "worker threads (0: AMP_LAB_THREADS or 1)");
    };

    CLI::App* run = app.add_subcommand("run", "run a seeded multi-trial experiment");
    add_common(run, true);
    CLI::App* se = app.add_subcommand("se", "state evolution only");
    add_common(se, false);
    CLI::App* dec = app.add_subcommand("decomp", "decomposition diagnostics");
    add_common(dec, false);
    CLI::App* sweep = app.add_subcommand("sweep", "n-scaling study over n_sweep");
    add_common(sweep, true);

    CLI::App* hfun = app.add_subcommand("hfun", "H-function curves");
    std::string family;
    double lo = 0.01, hi = 5.0, step = 0.01;
    bool svg = false;
    hfun->add_option("--family", family, "lasso-H1|lasso-H2|robust-H1|robust-H2")
        ->required();
    hfun->add_option("--lo", lo, "grid start");
    hfun->add_option("--hi", hi, "grid end");
    hfun->add_option("--step", step, "grid step");
    hfun->add_option("--out-dir", out_dir, "output directory");
    hfun->add_flag("--svg", svg, "also write an SVG plot");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed_override, threads);
        if (se->parsed()) return cmd_se(config_path, out_dir, seed_override);
        if (dec->parsed()) return cmd_decomp(config_path, out_dir, seed_override);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, seed_override, threads);
        if (hfun->parsed()) return cmd_hfun(family, lo, hi, step, out_dir, svg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
