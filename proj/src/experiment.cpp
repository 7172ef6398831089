#include "amplab/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "amplab/decomp.hpp"
#include "amplab/diag.hpp"
#include "amplab/errors.hpp"
#include "amplab/io.hpp"
#include "amplab/prng.hpp"
#include "amplab/se.hpp"

namespace amplab {

namespace {

using nlohmann::json;

TrialSummary run_one_trial(const ExperimentConfig& cfg, int trial) {
    TrialSummary out;
    out.trial = trial;
    const uint64_t seed = trial_seed(cfg.seed, static_cast<uint64_t>(trial));
    LinearModel model = make_model(cfg.n, cfg.p, cfg.k, cfg.signal, cfg.noise_for(cfg.n), seed);

    RunOptions ro;
    ro.t_max = cfg.t_max;
    ro.lambda = cfg.lambda;
    AmpTrace trace = run_amp(model, cfg.mode, ro);

    SeOptions so;
    so.t_max = cfg.t_max;
    so.lambda = cfg.lambda;
    so.fixed_point_tol = 1e-10;
    SeTrace se = run_se(model, cfg.mode, so);
    EmpiricalSe emp = empirical_se(trace, se);
    std::vector<double> gaps = risk_gap(trace, se);

    const int T = cfg.t_max;
    const int se_T = static_cast<int>(se.gamma_star.size()) - 1;
    out.risk.resize(T + 1);
    out.risk[0] = trace.beta_norm[1];
    for (int t = 1; t <= T; ++t) out.risk[t] = trace.beta_norm[t + 1];
    out.gamma_emp.assign(emp.gamma_emp.begin(), emp.gamma_emp.end());
    out.alpha_emp.assign(emp.alpha_emp.begin(), emp.alpha_emp.end());
    out.gamma_gap2.assign(emp.gamma_gap2.begin(), emp.gamma_gap2.end());
    out.risk_gap.assign(gaps.begin(), gaps.end());
    out.gamma_star.resize(T + 1);
    out.alpha_star.resize(T + 1);
    out.param.resize(T + 1);
    for (int t = 1; t <= T; ++t) {
        out.gamma_star[t] = se.gamma_star[std::min(t, se_T)];
        out.alpha_star[t] = se.alpha_star[std::min(t, se_T)];
        out.param[t] = trace.states[t].param;
    }

    if (cfg.diag_decomp || cfg.diag_w1) {
        DecompOptions dopt;
        dopt.aux_seed = seed;
        Decomposition dec(model, trace, dopt);
        int done = dec.run(T);
        if (cfg.diag_decomp) {
            out.xi_norm.assign(T + 1, std::nan(""));
            out.zeta_norm.assign(T + 1, std::nan(""));
            for (int t = 1; t <= done; ++t) {
                out.xi_norm[t] = dec.xi()[t].norm();
                out.zeta_norm[t] = dec.zeta()[t].norm();
            }
        }
        if (cfg.diag_w1) {
            out.w1_coord.assign(T + 1, std::nan(""));
            for (int t = 1; t <= done; ++t) {
                const Eigen::VectorXd v = dec.v_next(t);
                const double an = dec.alpha_coeffs()[t].norm();
                if (an > 0.0)
                    out.w1_coord[t] =
                        w1_gaussian_1d(std::sqrt(double(model.n)) / an * v, 1.0);
            }
        }
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / (static_cast<double>(v.size()) - 1.0) /
                     static_cast<double>(v.size()));
}

ExperimentOutput run_trials(const ExperimentConfig& cfg, int threads) {
    ExperimentOutput out;
    out.trials.resize(cfg.trials);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            int i = next.fetch_add(1);
            if (i >= cfg.trials) return;
            try {
                out.trials[i] = run_one_trial(cfg, i);
            } catch (const std::exception& e) {
                out.trials[i].trial = i;
                out.trials[i].failed = true;
                out.trials[i].error = e.what();
            }
        }
    };
    threads = std::max(1, std::min(threads, cfg.trials));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (const auto& t : out.trials)
        (t.failed ? out.trials_failed : out.trials_ok)++;
    return out;
}

void write_trials_csv(const ExperimentConfig& cfg, const ExperimentOutput& res,
                      const std::string& path) {
    CsvWriter csv(path);
    csv.header({"trial", "t", "risk", "gamma_emp", "gamma_star", "alpha_emp",
                "alpha_star", "tau_or_b", "xi_norm", "zeta_norm", "w1_coord"});
    auto at = [](const std::vector<double>& v, int t) {
        return (t < static_cast<int>(v.size())) ? v[t]
                                                : std::nan("");
    };
    for (const auto& tr : res.trials) {
        if (tr.failed) continue;
        for (int t = 0; t <= cfg.t_max; ++t) {
            std::vector<std::string> row;
            row.push_back(CsvWriter::num(static_cast<long>(tr.trial)));
            row.push_back(CsvWriter::num(static_cast<long>(t)));
            row.push_back(CsvWriter::num(at(tr.risk, t)));
            if (t == 0) {
                for (int j = 0; j < 8; ++j) row.push_back("");
            } else {
                row.push_back(CsvWriter::num(at(tr.gamma_emp, t)));
                row.push_back(CsvWriter::num(at(tr.gamma_star, t)));
                row.push_back(CsvWriter::num(at(tr.alpha_emp, t)));
                row.push_back(CsvWriter::num(at(tr.alpha_star, t)));
                row.push_back(CsvWriter::num(at(tr.param, t)));
                row.push_back(CsvWriter::num(at(tr.xi_norm, t)));
                row.push_back(CsvWriter::num(at(tr.zeta_norm, t)));
                row.push_back(CsvWriter::num(at(tr.w1_coord, t)));
            }
            csv.row(row);
        }
    }
}

json aggregate_json(const ExperimentConfig& cfg, const ExperimentOutput& res) {
    json agg;
    agg["mode"] = cfg.mode == AmpMode::sparse ? "sparse" : "robust";
    agg["n"] = cfg.n;
    agg["p"] = cfg.p;
    agg["k"] = cfg.k;
    agg["t_max"] = cfg.t_max;
    agg["trials"] = cfg.trials;
    agg["trials_failed"] = res.trials_failed;
    agg["seed"] = cfg.seed;
    if (cfg.warn_sample_size) agg["warning"] = "sample-size condition violated";

    json errors = json::array();
    for (const auto& t : res.trials)
        if (t.failed) errors.push_back({{"trial", t.trial}, {"error", t.error}});
    if (!errors.empty()) agg["errors"] = errors;

    auto per_t_mean = [&](auto getter) {
        json arr = json::array();
        for (int t = 1; t <= cfg.t_max; ++t) {
            std::vector<double> vals;
            for (const auto& tr : res.trials) {
                if (tr.failed) continue;
                const std::vector<double>& v = getter(tr);
                if (t < static_cast<int>(v.size()) && std::isfinite(v[t]))
                    vals.push_back(v[t]);
            }
            arr.push_back(vals.empty() ? json() : json(mean_of(vals)));
        }
        return arr;
    };
    agg["mean_risk"] = per_t_mean([](const TrialSummary& t) -> const std::vector<double>& { return t.risk; });
    agg["mean_gamma_gap2"] = per_t_mean([](const TrialSummary& t) -> const std::vector<double>& { return t.gamma_gap2; });
    agg["mean_abs_risk_gap"] = [&] {
        json arr = json::array();
        for (int t = 1; t <= cfg.t_max; ++t) {
            std::vector<double> vals;
            for (const auto& tr : res.trials)
                if (!tr.failed && t < static_cast<int>(tr.risk_gap.size()))
                    vals.push_back(std::fabs(tr.risk_gap[t]));
            arr.push_back(vals.empty() ? json() : json(mean_of(vals)));
        }
        return arr;
    }();

    std::vector<double> final_risk;
    for (const auto& tr : res.trials)
        if (!tr.failed && !tr.risk.empty()) final_risk.push_back(tr.risk.back());
    agg["final_risk_mean"] = mean_of(final_risk);
    agg["final_risk_stderr"] = stderr_of(final_risk);

    // Soft diagnostic, tracked but never asserted: fraction of trials whose
    // risk is non-increasing from t = 3 on.
    int monotone = 0, counted = 0;
    for (const auto& tr : res.trials) {
        if (tr.failed || tr.risk.size() < 5) continue;
        ++counted;
        bool ok = true;
        for (std::size_t t = 4; t < tr.risk.size(); ++t)
            if (tr.risk[t] > tr.risk[t - 1] + 1e-12) ok = false;
        if (ok) ++monotone;
    }
    if (counted > 0)
        agg["risk_monotone_after_t3_fraction"] =
            static_cast<double>(monotone) / counted;
    return agg;
}

void write_risk_svg(const ExperimentConfig& cfg, const ExperimentOutput& res,
                    const std::string& path) {
    SvgSeries mean_series;
    mean_series.label = "mean risk";
    for (int t = 0; t <= cfg.t_max; ++t) {
        std::vector<double> vals;
        for (const auto& tr : res.trials)
            if (!tr.failed && t < static_cast<int>(tr.risk.size()))
                vals.push_back(tr.risk[t]);
        if (vals.empty()) continue;
        mean_series.x.push_back(t);
        mean_series.y.push_back(mean_of(vals));
    }
    SvgSeries se_series;
    se_series.label = "gamma*";
    se_series.color = "#d62728";
    for (const auto& tr : res.trials) {
        if (tr.failed) continue;
        for (int t = 1; t <= cfg.t_max; ++t) {
            se_series.x.push_back(t);
            se_series.y.push_back(tr.gamma_star[t]);
        }
        break;
    }
    write_svg_lineplot(path, "AMP risk vs state evolution", {mean_series, se_series});
}

}  // namespace

int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("AMP_LAB_THREADS")) {
        int v = std::atoi(env);
        if (v > 0) return v;
    }
    return 1;
}

ExperimentOutput run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                int threads) {
    ExperimentOutput res = run_trials(cfg, threads);
    write_trials_csv(cfg, res, out_dir + "/trials.csv");
    json agg = aggregate_json(cfg, res);
    std::ofstream(out_dir + "/aggregate.json") << agg.dump(2) << "\n";
    write_risk_svg(cfg, res, out_dir + "/risk.svg");
    return res;
}

ExperimentOutput run_sweep(const ExperimentConfig& cfg, const std::string& out_dir,
                           int threads) {
    if (cfg.n_sweep.size() < 2) throw invalid_parameter("sweep: config needs n_sweep");
    const int t_ref = std::min(10, cfg.t_max);

    struct Point {
        int n;
        double gamma_gap2, risk_gap, xi, zeta;
    };
    std::vector<Point> pts;
    ExperimentOutput last;
    CsvWriter csv(out_dir + "/sweep.csv");
    csv.header({"n", "t_ref", "mean_gamma_gap2", "mean_abs_risk_gap", "mean_xi_norm",
                "mean_zeta_norm"});
    for (int n_eff : cfg.n_sweep) {
        ExperimentConfig sub = cfg.scaled_to(n_eff);
        sub.diag_decomp = true;
        ExperimentOutput res = run_trials(sub, threads);
        std::vector<double> g2, rg, xi, zeta;
        for (const auto& tr : res.trials) {
            if (tr.failed) continue;
            if (t_ref < static_cast<int>(tr.gamma_gap2.size()))
                g2.push_back(tr.gamma_gap2[t_ref]);
            if (t_ref < static_cast<int>(tr.risk_gap.size()))
                rg.push_back(std::fabs(tr.risk_gap[t_ref]));
            if (t_ref < static_cast<int>(tr.xi_norm.size()) &&
                std::isfinite(tr.xi_norm[t_ref]))
                xi.push_back(tr.xi_norm[t_ref]);
            if (t_ref < static_cast<int>(tr.zeta_norm.size()) &&
                std::isfinite(tr.zeta_norm[t_ref]))
                zeta.push_back(tr.zeta_norm[t_ref]);
        }
        Point pt{n_eff, mean_of(g2), mean_of(rg), mean_of(xi), mean_of(zeta)};
        pts.push_back(pt);
        csv.row({CsvWriter::num(static_cast<long>(pt.n)),
                 CsvWriter::num(static_cast<long>(t_ref)), CsvWriter::num(pt.gamma_gap2),
                 CsvWriter::num(pt.risk_gap), CsvWriter::num(pt.xi),
                 CsvWriter::num(pt.zeta)});
        last = std::move(res);
    }

    json agg;
    agg["mode"] = cfg.mode == AmpMode::sparse ? "sparse" : "robust";
    agg["t_ref"] = t_ref;
    auto fit_of = [&](auto field) -> json {
        std::vector<std::pair<double, double>> data;
        for (const auto& pt : pts) {
            double v = field(pt);
            if (v > 0.0) data.emplace_back(pt.n, v);
        }
        if (data.size() < 3) return json();
        ScalingFit fit = scaling_fit(data);
        json points = json::array();
        for (auto [n, v] : data) points.push_back({n, v});
        return json{{"slope", fit.slope},
                    {"intercept", fit.intercept},
                    {"r2", fit.r2},
                    {"points", points}};
    };
    agg["scaling"] = json{
        {"gamma_gap2", fit_of([](const Point& p) { return p.gamma_gap2; })},
        {"risk_gap", fit_of([](const Point& p) { return p.risk_gap; })},
        {"xi_norm", fit_of([](const Point& p) { return p.xi; })},
        {"zeta_norm", fit_of([](const Point& p) { return p.zeta; })}};
    std::ofstream(out_dir + "/aggregate.json") << agg.dump(2) << "\n";

    SvgSeries s1, s2;
    s1.label = "gamma_gap2";
    s2.label = "xi_norm";
    s2.color = "#d62728";
    for (const auto& pt : pts) {
        s1.x.push_back(pt.n);
        s1.y.push_back(pt.gamma_gap2);
        s2.x.push_back(pt.n);
        s2.y.push_back(pt.xi);
    }
    write_svg_lineplot(out_dir + "/sweep.svg", "scaling vs n (log-log)", {s1, s2}, true,
                       true);
    return last;
}

}  // namespace amplab
