#include "spinband/harness.hpp"

#include "spinband/oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

namespace spinband
{
namespace
{

bool wants_with(ModeSelection m) { return m != ModeSelection::without_spin; }
bool wants_without(ModeSelection m) { return m != ModeSelection::with_spin; }

DropResult run_drop(const ExperimentConfig& cfg, int drop, const SolveOptions& opts)
{
    DropResult dr;
    dr.drop = drop;
    dr.seed = cfg.base_seed + static_cast<std::uint64_t>(drop);
    try
    {
        const Scenario sc = build_scenario(cfg.scenario, dr.seed);
        const ChannelSet ch = synthesize_channels(sc);
        if (wants_with(cfg.modes))
        {
            const SolveResult res = solve(sc, ch, opts);
            dr.has_with = true;
            dr.f0_with = res.f0_value;
            dr.best_spin = res.best_spin.bits_string();
            // Code 0 is r = 0 everywhere: the without-spin baseline on the
            // same channels comes for free.
            if (wants_without(cfg.modes))
            {
                dr.has_without = true;
                dr.f0_without = res.runs.front().f0;
            }
            for (const auto& run : res.runs)
            {
                DropTrace t{run.spin.bits_string(), {}};
                for (const auto& tp : run.trace)
                    t.f2.push_back(tp.f2);
                dr.traces.push_back(std::move(t));
            }
        }
        else
        {
            const SpinRun run = solve_fixed_spin(sc, ch, SpinVector(sc.sat_count()), opts);
            dr.has_without = true;
            dr.f0_without = run.f0;
            DropTrace t{run.spin.bits_string(), {}};
            for (const auto& tp : run.trace)
                t.f2.push_back(tp.f2);
            dr.traces.push_back(std::move(t));
        }
        dr.ok = true;
    }
    catch (const std::exception& e)
    {
        dr.error = e.what();
    }
    return dr;
}

std::string iso_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream s;
    s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return s.str();
}

std::ofstream open_out(const std::filesystem::path& p)
{
    std::ofstream out(p, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + p.string() + "'");
    return out;
}

nlohmann::ordered_json stats_json(const ModeStats& s)
{
    return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& options)
{
    if (config.drops < 1)
        throw ConfigError("drops must be at least 1");
    ExperimentResult res;
    res.config = config;
    res.drops.resize(static_cast<std::size_t>(config.drops));

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int d = next++; d < config.drops; d = next++)
            res.drops[static_cast<std::size_t>(d)] = run_drop(config, d, options.solve);
    };
    const unsigned n = std::clamp<unsigned>(options.threads, 1u, static_cast<unsigned>(config.drops));
    if (n == 1)
        worker();
    else
    {
        std::vector<std::thread> pool;
        for (unsigned i = 0; i < n; ++i)
            pool.emplace_back(worker);
        for (auto& t : pool)
            t.join();
    }
    for (const auto& d : res.drops)
        if (!d.ok)
        {
            ++res.failures;
            std::cerr << "warning: drop " << d.drop << " (seed " << d.seed << ") failed: " << d.error << '\n';
        }
    return res;
}

std::vector<double> spin_gains(const ExperimentResult& result)
{
    std::vector<double> g;
    for (const auto& d : result.drops)
        if (d.ok && d.has_with && d.has_without && d.f0_without > 0.0)
            g.push_back((d.f0_with - d.f0_without) / d.f0_without);
    return g;
}

double quantile(std::vector<double> v, double q)
{
    if (v.empty())
        return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = std::clamp(q, 0.0, 1.0) * static_cast<double>(v.size() - 1);
    const auto lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

ModeStats mode_stats(const ExperimentResult& result, bool with_spin)
{
    std::vector<double> v;
    for (const auto& d : result.drops)
        if (d.ok && (with_spin ? d.has_with : d.has_without))
            v.push_back(with_spin ? d.f0_with : d.f0_without);
    ModeStats s;
    s.count = v.size();
    if (v.empty())
        return s;
    double sum = 0.0;
    for (double x : v)
        sum += x;
    s.mean = sum / static_cast<double>(v.size());
    s.median = quantile(v, 0.5);
    s.min = *std::min_element(v.begin(), v.end());
    s.max = *std::max_element(v.begin(), v.end());
    return s;
}

void export_results(const ExperimentResult& result, const std::filesystem::path& dir)
{
    std::filesystem::create_directories(dir);

    {
        auto out = open_out(dir / "traces.csv");
        out << "spin_bits,drop,iteration,f2\n";
        for (const auto& d : result.drops)
            for (const auto& t : d.traces)
                for (std::size_t i = 0; i < t.f2.size(); ++i)
                    out << t.spin_bits << ',' << d.drop << ',' << i + 1 << ',' << format_double(t.f2[i]) << '\n';
    }

    std::vector<double> with, without;
    {
        auto out = open_out(dir / "rates.csv");
        out << "drop,mode,f0_bits_per_s_hz\n";
        for (const auto& d : result.drops)
        {
            if (!d.ok)
                continue;
            if (d.has_with)
            {
                out << d.drop << ",with_spin," << format_double(d.f0_with) << '\n';
                with.push_back(d.f0_with);
            }
            if (d.has_without)
            {
                out << d.drop << ",without_spin," << format_double(d.f0_without) << '\n';
                without.push_back(d.f0_without);
            }
        }
    }

    {
        auto out = open_out(dir / "cdf.csv");
        out << "mode,rate,cdf\n";
        for (auto [name, v] : {std::pair{"with_spin", with}, std::pair{"without_spin", without}})
        {
            std::sort(v.begin(), v.end());
            for (std::size_t i = 0; i < v.size(); ++i)
                out << name << ',' << format_double(v[i]) << ','
                    << format_double(static_cast<double>(i + 1) / static_cast<double>(v.size())) << '\n';
        }
    }

    nlohmann::ordered_json s;
    s["version"] = version_string;
    s["generated_at"] = iso_timestamp();
    s["config"] = nlohmann::ordered_json::parse(config_to_json(result.config));
    nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
    for (const auto& d : result.drops)
        seeds.push_back(d.seed);
    s["seeds"] = seeds;
    std::size_t ok = 0;
    for (const auto& d : result.drops)
        ok += d.ok;
    s["drops"] = {{"requested", result.drops.size()}, {"successful", ok}, {"failed", result.failures}};
    nlohmann::ordered_json modes;
    if (wants_with(result.config.modes))
        modes["with_spin"] = stats_json(mode_stats(result, true));
    if (wants_without(result.config.modes))
        modes["without_spin"] = stats_json(mode_stats(result, false));
    s["modes"] = modes;
    const auto gains = spin_gains(result);
    if (!gains.empty())
    {
        std::size_t strictly_better = 0;
        for (double g : gains)
            strictly_better += g > 1e-9;
        s["spin_gain"] = {{"count", gains.size()},
                          {"median", quantile(gains, 0.5)},
                          {"p90", quantile(gains, 0.9)},
                          {"max", quantile(gains, 1.0)},
                          {"drops_strictly_better", strictly_better}};
    }
    nlohmann::ordered_json errors = nlohmann::ordered_json::array();
    for (const auto& d : result.drops)
        if (!d.ok)
            errors.push_back({{"drop", d.drop}, {"seed", d.seed}, {"error", d.error}});
    s["errors"] = errors;
    auto out = open_out(dir / "summary.json");
    out << s.dump(2) << '\n';
}

namespace
{

struct CommonFlags
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<double> gap_tol;
    std::optional<int> max_iters;
    unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--config", f.config, "scenario/experiment JSON file")->required();
    cmd->add_option("--seed", f.seed, "seed (run: base seed of drop 0)");
    cmd->add_option("--gap-tol", f.gap_tol, "relative B&B gap tolerance");
    cmd->add_option("--max-iters", f.max_iters, "maximum inner FP iterations");
    cmd->add_option("--threads", f.threads, "worker threads (results do not depend on it)");
}

SolveOptions solve_options(const CommonFlags& f)
{
    SolveOptions o;
    if (f.gap_tol)
    {
        if (!(*f.gap_tol > 0.0))
            throw ConfigError("--gap-tol must be positive");
        o.subproblem.relative_gap_tol = *f.gap_tol;
    }
    if (f.max_iters)
    {
        if (*f.max_iters < 1)
            throw ConfigError("--max-iters must be at least 1");
        o.max_inner_iterations = *f.max_iters;
    }
    return o;
}

void print_run(std::ostream& out, const std::string& label, const SpinRun& run, const Scenario& sc)
{
    out << label << "\n";
    out << "  spin (sat 0 first): " << run.spin.bits_string() << "\n";
    out << "  f0: " << std::setprecision(10) << run.f0 << " bits/s/Hz\n";
    out << "  iterations: " << run.iterations << (run.converged ? " (converged)" : " (iteration cap)")
        << ", subproblem nodes: " << run.total_nodes << "\n";
    out << "  ue  dl_sat  ul_sat  p_dl_w        p_ul_w\n";
    for (std::size_t k = 0; k < sc.ue_count(); ++k)
    {
        std::string ds = "-", us = "-";
        for (std::size_t j = 0; j < sc.sat_count(); ++j)
        {
            if (run.alloc.d(k, j))
                ds = std::to_string(j);
            if (run.alloc.u(k, j))
                us = std::to_string(j);
        }
        char line[128];
        std::snprintf(line, sizeof line, "  %-3zu %-7s %-7s %-13.6g %-13.6g\n", k, ds.c_str(), us.c_str(),
                      run.alloc.p_dl[k], run.alloc.p_ul[k]);
        out << line;
    }
}

} // namespace

int cli_main(int argc, char** argv)
{
    CLI::App app{"Dynamic FDD spin / association / power optimisation for multi-satellite LEO"};
    app.require_subcommand(1);

    CommonFlags run_f, solve_f, oracle_f, dump_f;
    std::optional<int> drops;
    std::string mode_text;
    std::string out_dir;
    std::string solve_mode = "with-spin";
    std::string trace_out;
    int levels = 32;
    std::string dump_out;

    auto* run_cmd = app.add_subcommand("run", "Monte-Carlo experiment over UE drops");
    add_common(run_cmd, run_f);
    run_cmd->add_option("--drops", drops, "number of UE drops");
    run_cmd->add_option("--mode", mode_text, "with-spin | without-spin | both");
    run_cmd->add_option("--out", out_dir, "output directory");

    auto* solve_cmd = app.add_subcommand("solve", "solve one scenario and print the allocation");
    add_common(solve_cmd, solve_f);
    solve_cmd->add_option("--mode", solve_mode, "with-spin | without-spin | both");
    solve_cmd->add_option("--trace-out", trace_out, "write the per-spin convergence trace CSV here");

    auto* oracle_cmd = app.add_subcommand("oracle", "grid-search bracket on a tiny instance (K, J <= 2)");
    add_common(oracle_cmd, oracle_f);
    oracle_cmd->add_option("--levels", levels, "power grid levels per link");

    auto* dump_cmd = app.add_subcommand("dump-channels", "export channel norms and UE-UE gains as JSON");
    add_common(dump_cmd, dump_f);
    dump_cmd->add_option("--out", dump_out, "output file (default stdout)");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return 2;
    }

    auto load = [](const CommonFlags& f) {
        ExperimentConfig cfg = load_config(f.config);
        if (f.seed)
        {
            cfg.base_seed = *f.seed;
            cfg.scenario.seed = *f.seed;
        }
        return cfg;
    };

    ExperimentConfig cfg;
    SolveOptions sopts;
    const CommonFlags* flags = nullptr;
    try
    {
        flags = run_cmd->parsed() ? &run_f : solve_cmd->parsed() ? &solve_f : oracle_cmd->parsed() ? &oracle_f : &dump_f;
        cfg = load(*flags);
        sopts = solve_options(*flags);
        if (run_cmd->parsed())
        {
            if (drops)
                cfg.drops = *drops;
            if (cfg.drops < 1)
                throw ConfigError("--drops must be at least 1");
            if (!mode_text.empty())
                cfg.modes = parse_modes(mode_text);
            if (!out_dir.empty())
                cfg.output_dir = out_dir;
        }
        if (solve_cmd->parsed())
            parse_modes(solve_mode);
        if (oracle_cmd->parsed() && levels < 1)
            throw ConfigError("--levels must be at least 1");
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try
    {
        if (run_cmd->parsed())
        {
            RunOptions ro;
            ro.solve = sopts;
            ro.threads = flags->threads;
            const ExperimentResult res = run_experiment(cfg, ro);
            export_results(res, cfg.output_dir);
            const auto w = mode_stats(res, true);
            const auto wo = mode_stats(res, false);
            std::cout << "drops: " << res.drops.size() << " (failed " << res.failures << ")\n";
            if (w.count)
                std::cout << "with-spin    median f0: " << w.median << " bits/s/Hz\n";
            if (wo.count)
                std::cout << "without-spin median f0: " << wo.median << " bits/s/Hz\n";
            const auto g = spin_gains(res);
            if (!g.empty())
                std::cout << "spin gain median: " << 100.0 * quantile(g, 0.5) << " %, p90: " << 100.0 * quantile(g, 0.9)
                          << " %\n";
            std::cout << "results written to " << cfg.output_dir << '\n';
            return res.failures == res.drops.size() ? 3 : 0;
        }

        const Scenario sc = build_scenario(cfg.scenario, cfg.scenario.seed);
        const ChannelSet ch = synthesize_channels(sc);

        if (solve_cmd->parsed())
        {
            sopts.threads = flags->threads;
            const ModeSelection m = parse_modes(solve_mode);
            SolveResult res;
            if (wants_with(m))
            {
                res = solve(sc, ch, sopts);
                for (const auto& r : res.runs)
                    if (r.spin == res.best_spin)
                        print_run(std::cout, "with-spin", r, sc);
            }
            if (wants_without(m))
            {
                const SpinRun base = wants_with(m) ? res.runs[0] : solve_fixed_spin(sc, ch, SpinVector(sc.sat_count()), sopts);
                print_run(std::cout, "without-spin", base, sc);
                if (!wants_with(m))
                    res.runs.push_back(base);
            }
            if (!trace_out.empty())
            {
                std::ofstream out(trace_out, std::ios::binary);
                if (!out)
                    throw ConfigError("cannot write '" + trace_out + "'");
                write_trace_csv(out, res);
            }
            return 0;
        }

        if (oracle_cmd->parsed())
        {
            const GlobalBracket gb = oracle_global_f0(sc, ch, levels);
            const SolveResult res = solve(sc, ch, sopts);
            std::cout << "grid best f0 (" << levels << " levels): " << std::setprecision(10) << gb.best_f0
                      << " bits/s/Hz at spin " << gb.spin.bits_string() << "\n";
            std::cout << "fp solver f0: " << res.f0_value << " bits/s/Hz at spin " << res.best_spin.bits_string()
                      << "\n";
            std::cout << "ratio fp / grid: " << (gb.best_f0 > 0.0 ? res.f0_value / gb.best_f0 : 1.0) << "\n";
            return 0;
        }

        const std::string json = channel_dump_json(ch);
        if (dump_out.empty())
            std::cout << json << '\n';
        else
        {
            std::ofstream out(dump_out, std::ios::binary);
            if (!out)
                throw ConfigError("cannot write '" + dump_out + "'");
            out << json << '\n';
        }
        return 0;
    }
    catch (const ConfigError& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const OracleTooLarge& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception& e)
    {
        std::cerr << "solver failure: " << e.what() << '\n';
        return 3;
    }
}

} // namespace spinband
