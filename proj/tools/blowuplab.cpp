// blowuplab: evaluate finite-time blow-up criteria for kinetic-fluid systems
// and cross-check them against a desk-scale 1D simulator.

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "blowuplab/criteria.hpp"
#include "blowuplab/csv.hpp"
#include "blowuplab/gronwall.hpp"
#include "blowuplab/moments.hpp"
#include "blowuplab/scenario.hpp"
#include "blowuplab/simulator.hpp"

namespace fs = std::filesystem;
using namespace blowuplab;

namespace {

std::string utc_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    return buf;
}

std::string resolve_out_dir(const std::string& flag_out, const scenario::Scenario& sc) {
    if (!flag_out.empty()) return flag_out;
    if (!sc.out_dir.empty()) return sc.out_dir;
    const std::string stem = fs::path(sc.source_path).stem().string();
    if (const char* root = std::getenv("BLOWUPLAB_OUT"); root && *root)
        return (fs::path(root) / stem).string();
    return (fs::path("runs") / stem).string();
}

void update_manifest(const std::string& dir, const scenario::Scenario& sc,
                     const std::vector<std::string>& new_artifacts) {
    scenario::RunManifest m;
    const std::string path = (fs::path(dir) / "manifest.json").string();
    try {
        m = scenario::manifest_from_json_file(path);
    } catch (const MissingManifest&) {
    }
    char hash[24];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(scenario::fnv1a64(sc.raw_bytes)));
    m.scenario_hash = hash;
    m.seed = sc.initial.seed;
    m.tool_version = scenario::tool_version;
    m.created_utc = utc_now();
    for (const auto& a : new_artifacts) {
        bool found = false;
        for (const auto& e : m.artifacts) found = found || e == a;
        if (!found) m.artifacts.push_back(a);
    }
    csv::write_file_atomic(path, scenario::manifest_to_json(m));
}

scenario::Scenario load_scenario(const std::string& path,
                                 const std::vector<std::string>& overrides,
                                 std::optional<std::uint64_t> seed) {
    auto sc = scenario::load_with_overrides(path, overrides);
    if (seed) sc.initial.seed = *seed;
    return sc;
}

criteria::CriterionReport run_check(const scenario::Scenario& sc) {
    auto [field, cloud] = moments::build_initial_data(sc.initial, sc.model);
    const MomentVector mv0 = moments::combined_moments(field, cloud, sc.model, 0.0);
    return criteria::gate(sc.system, sc.model, mv0, sc.gate_options);
}

int cmd_check(const std::string& scenario_path, const std::string& out_flag,
              const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed) {
    const auto sc = load_scenario(scenario_path, overrides, seed);
    const auto report = run_check(sc);

    const std::string dir = resolve_out_dir(out_flag, sc);
    csv::write_file_atomic((fs::path(dir) / "report.json").string(),
                           criteria::report_to_json(report));
    update_manifest(dir, sc, {"report.json"});

    std::cout << report.theorem << " / " << report.branch << " on " << report.system << "\n";
    std::cout << "gate: " << (report.gate ? "true" : "false")
              << "  margin: " << csv::format(report.margin) << "\n";
    if (report.lifespan) {
        std::cout << "lifespan upper bound T* = " << csv::format(report.lifespan->t_star)
                  << "  bracket [" << csv::format(report.lifespan->bracket_lo) << ", "
                  << csv::format(report.lifespan->bracket_hi) << "]\n";
    }
    for (const auto& n : report.notes) std::cout << "note: " << n << "\n";
    std::cout << "report: " << (fs::path(dir) / "report.json").string() << "\n";
    return report.gate ? 0 : 2;
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_flag,
                 const std::vector<std::string>& overrides, std::optional<std::uint64_t> seed) {
    const auto sc = load_scenario(scenario_path, overrides, seed);
    if (!sc.simcfg) throw BadSpec("scenario has no 'sim' section");

    // envelope containment runs against the same constants `check` reports
    std::optional<sim::EnvelopeCheck> envelope;
    std::optional<criteria::CriterionReport> gate_report;
    try {
        gate_report = run_check(sc);
        envelope = sim::EnvelopeCheck{gate_report->constants,
                                      sc.gate_options.branch
                                          ? *sc.gate_options.branch
                                          : criteria::resolve_branch(sc.model, sc.system)};
    } catch (const RegimeError&) {
        // parameters outside every theorem regime: simulate without envelopes
    } catch (const MissingInput&) {
    }

    const auto result = sim::run_scenario(sc.initial, sc.model, *sc.simcfg,
                                          sc.system, envelope, sc.tolerances);

    const std::string dir = resolve_out_dir(out_flag, sc);
    csv::write_file_atomic((fs::path(dir) / "moments.csv").string(),
                           sim::series_to_csv(result.series));
    csv::write_file_atomic((fs::path(dir) / "identities.json").string(),
                           sim::identities_to_json(result.identities, result.verdict));
    std::vector<std::string> artifacts{"moments.csv", "identities.json"};

    // final-state snapshots in the tabulated input formats
    {
        const auto& f = result.state.fluid;
        std::vector<std::string> header = {"x", "rho", "u"};
        if (f.has_alpha()) header.push_back("alpha");
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < f.cells(); ++i) {
            std::vector<double> row = {f.x_center(i), f.rho[i], f.u[i]};
            if (f.has_alpha()) row.push_back(f.alpha[i]);
            rows.push_back(std::move(row));
        }
        csv::write_file_atomic((fs::path(dir) / "state.csv").string(),
                               csv::to_string(header, rows));
        artifacts.push_back("state.csv");
        if (!result.state.particles.empty()) {
            const auto& c = result.state.particles;
            std::vector<std::vector<double>> prows;
            for (std::size_t i = 0; i < c.size(); ++i)
                prows.push_back({c.x[i], c.v[i], c.w[i]});
            csv::write_file_atomic((fs::path(dir) / "particles.csv").string(),
                                   csv::to_string({"x", "v", "w"}, prows));
            artifacts.push_back("particles.csv");
        }
    }
    if (gate_report) {
        csv::write_file_atomic((fs::path(dir) / "report.json").string(),
                               criteria::report_to_json(*gate_report));
        artifacts.push_back("report.json");
    }
    update_manifest(dir, sc, artifacts);

    switch (result.verdict.kind) {
    case sim::Verdict::Kind::CompletedSmooth:
        std::cout << "completed smooth to t = " << csv::format(result.state.t) << "\n";
        break;
    case sim::Verdict::Kind::BlowupDetected:
        std::cout << "blow-up detected at t = " << csv::format(result.verdict.t_detect)
                  << " (trigger: " << result.verdict.trigger << ")\n";
        break;
    case sim::Verdict::Kind::Aborted:
        std::cout << "aborted: " << result.verdict.reason << "\n";
        break;
    }
    std::cout << "samples: " << result.series.size() << ", steps: " << result.state.steps
              << "\n";
    for (const auto& v : result.identities.violations)
        std::cout << "identity violation: " << v << "\n";
    std::cout << "artifacts in " << dir << "\n";
    return result.identities.ok() ? 0 : 3;
}

int cmd_gronwall(double a, double b, double beta, double f0, double t_end, int points,
                 const std::string& out) {
    gronwall::GronwallParams p{a, b, beta, f0};
    p.validate();
    std::vector<std::vector<double>> rows;
    rows.push_back({0.0, gronwall::gronwall_bound(p, 0.0), p.f0});
    const double t_lo = t_end / 1000.0;
    for (int i = 0; i <= points; ++i) {
        const double t = t_lo * std::pow(t_end / t_lo, static_cast<double>(i) / points);
        rows.push_back({t, gronwall::gronwall_bound(p, t), gronwall::ode_solve_at(p, t)});
    }
    const std::string body = csv::to_string({"t", "bound", "oracle"}, rows);
    if (out.empty()) {
        std::cout << body;
    } else {
        csv::write_file_atomic(out, body);
        std::cout << "wrote " << out << "\n";
    }
    return 0;
}

// rebuild the constants bundle from report.json so the envelope can be
// re-evaluated next to the measured J series
std::optional<std::pair<criteria::ConstantsBundle, criteria::BranchId>>
bundle_from_report(const nlohmann::json& j) {
    criteria::BranchId branch;
    const std::string b = j["branch"].get<std::string>();
    if (b == "general")
        branch = criteria::BranchId::General;
    else if (b == "delta-eq-gamma")
        branch = criteria::BranchId::DeltaEqGamma;
    else if (b == "power")
        branch = criteria::BranchId::PowerBranch;
    else if (b == "constant-viscosity")
        branch = criteria::BranchId::ConstantVisc;
    else if (b == "alpha")
        branch = criteria::BranchId::Alpha;
    else
        return std::nullopt;

    criteria::ConstantsBundle c;
    const auto& k = j["constants"];
    const auto& in = j["inputs"];
    c.C0 = k["C0"].get<double>();
    c.C1 = k["C1"].get<double>();
    c.C2 = k["C2"].get<double>();
    if (!k["C3"].is_null()) c.C3 = k["C3"].get<double>();
    if (!k["C0_alpha"].is_null()) c.C0_alpha = k["C0_alpha"].get<double>();
    c.M_mu = k["M_mu"].get<double>();
    c.M_lambda = k["M_lambda"].get<double>();
    if (!k["nu"].is_null()) c.nu = k["nu"].get<double>();
    c.J0 = k["J0"].get<double>();
    c.d = in["d"].get<int>();
    c.gamma = in["gamma"].get<double>();
    c.delta = in["delta"].get<double>();
    c.visc_c = in.value("visc_c", 0.0);
    c.m_rho = in["m_rho"].get<double>();
    c.m_f = in["m_f"].get<double>();
    c.I0 = in["I0"].get<double>();
    c.W0 = in["W0"].get<double>();
    c.E0 = in["E0"].get<double>();
    if (!in["p_max"].is_null()) c.p_max = in["p_max"].get<double>();
    return std::make_pair(c, branch);
}

int cmd_report(const std::string& run_dir) {
    const fs::path dir(run_dir);
    const auto manifest = scenario::manifest_from_json_file((dir / "manifest.json").string());

    std::ostringstream md;
    md << "# blowuplab run report\n\n";
    md << "- scenario hash: `" << manifest.scenario_hash << "`\n";
    md << "- seed: " << manifest.seed << "\n";
    md << "- tool: " << manifest.tool_version << "\n\n";

    std::optional<double> t_star;
    std::optional<std::pair<criteria::ConstantsBundle, criteria::BranchId>> bundle;
    bool have_criteria = false, gate = false;
    if (fs::exists(dir / "report.json")) {
        have_criteria = true;
        const auto j = nlohmann::json::parse(scenario::read_file((dir / "report.json").string()));
        bundle = bundle_from_report(j);
        gate = j["gate"].get<bool>();
        md << "## criteria\n\n";
        md << "- system: " << j["system"].get<std::string>() << "\n";
        md << "- theorem: " << j["theorem"].get<std::string>() << " ("
           << j["branch"].get<std::string>() << ")\n";
        md << "- gate: " << (gate ? "true" : "false") << "\n";
        md << "- margin: " << j["margin"].get<double>() << "\n";
        if (!j["lifespan_bound"].is_null()) {
            t_star = j["lifespan_bound"]["t_star"].get<double>();
            md << "- lifespan upper bound T*: " << *t_star << "\n";
        } else {
            md << "- lifespan upper bound T*: none\n";
        }
        for (const auto& n : j["notes"]) md << "- note: " << n.get<std::string>() << "\n";
        md << "\n";
    }

    std::optional<double> t_detect;
    if (fs::exists(dir / "identities.json")) {
        const auto j =
            nlohmann::json::parse(scenario::read_file((dir / "identities.json").string()));
        md << "## simulation\n\n";
        const std::string verdict = j["verdict"].get<std::string>();
        md << "- verdict: " << verdict << "\n";
        if (verdict == "blowup-detected") {
            t_detect = j["t_detect"].get<double>();
            md << "- T_detect: " << *t_detect << " (trigger: "
               << j["trigger"].get<std::string>() << ")\n";
        }
        md << "- max mass drift (rel, leak-corrected): " << j["max_mass_drift_rel"].get<double>()
           << "\n";
        md << "- max momentum drift: " << j["max_momentum_drift"].get<double>() << "\n";
        md << "- max energy increase (rel): " << j["max_energy_increase_rel"].get<double>()
           << "\n";
        md << "- max |dI/dt - W|: " << j["max_dI_minus_W"].get<double>() << "\n";
        if (!j["min_lemma33_ratio"].is_null())
            md << "- min Lemma 3.3 ratio: " << j["min_lemma33_ratio"].get<double>() << "\n";
        if (j["max_envelope_ratio"].get<double>() > 0.0)
            md << "- max J/envelope: " << j["max_envelope_ratio"].get<double>() << "\n";
        md << "- identity violations: " << j["violations"].size() << "\n";
        for (const auto& v : j["violations"]) md << "  - " << v.get<std::string>() << "\n";
        md << "\n";
        if (t_detect && have_criteria) {
            if (t_star) {
                md << "- T_detect <= T*: "
                   << (*t_detect <= *t_star ? "pass" : "FLAG (investigate)") << "\n\n";
            } else if (gate) {
                md << "- T_detect <= T*: FLAG (gate true but no numeric crossing for T*)\n\n";
            }
        }
    }

    if (fs::exists(dir / "moments.csv")) {
        const auto tab = csv::read((dir / "moments.csv").string());
        const int ct = tab.column("t"), cJ = tab.column("J");
        if (ct >= 0 && cJ >= 0 && !tab.rows.empty()) {
            md << "## envelope containment plot data\n\n";
            md << (bundle ? "```\nt\tJ\tenvelope\tJ/envelope\n"
                          : "```\nt\tJ\n");
            double jmax = 0.0;
            for (const auto& r : tab.rows) jmax = std::max(jmax, std::fabs(r[cJ]));
            const std::size_t stride = std::max<std::size_t>(1, tab.rows.size() / 24);
            for (std::size_t i = 0; i < tab.rows.size(); i += stride) {
                const double t = tab.rows[i][ct], J = tab.rows[i][cJ];
                md << csv::format(t) << "\t" << csv::format(J);
                if (bundle) {
                    const double env = criteria::envelope_J(bundle->second, bundle->first, t);
                    md << "\t" << csv::format(env) << "\t"
                       << csv::format(env > 0.0 ? J / env : 0.0);
                }
                const int bars = jmax > 0.0 ? static_cast<int>(40.0 * std::fabs(J) / jmax) : 0;
                md << "\t" << std::string(static_cast<std::size_t>(bars), '#') << "\n";
            }
            md << "```\n";
        }
    }

    const std::string out = (dir / "summary.md").string();
    csv::write_file_atomic(out, md.str());
    std::cout << md.str();
    return 0;
}

int cmd_sweep(const std::vector<std::string>& scenarios, const std::string& out_root,
              int jobs, const std::vector<std::string>& overrides) {
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    std::mutex io;
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= scenarios.size()) return;
            const std::string& path = scenarios[i];
            const std::string stem = fs::path(path).stem().string();
            const std::string dir = (fs::path(out_root) / stem).string();
            try {
                const auto sc = load_scenario(path, overrides, std::nullopt);
                int rc = cmd_check(path, dir, overrides, std::nullopt);
                if (sc.simcfg) rc = std::max(rc == 2 ? 0 : rc, cmd_simulate(path, dir, overrides, std::nullopt));
                std::lock_guard<std::mutex> lk(io);
                std::cout << "[sweep] " << stem << ": done (rc=" << rc << ")\n";
            } catch (const std::exception& e) {
                failures.fetch_add(1);
                std::lock_guard<std::mutex> lk(io);
                std::cerr << "[sweep] " << stem << ": error: " << e.what() << "\n";
            }
        }
    };
    std::vector<std::thread> pool;
    const int nw = std::max(1, jobs);
    for (int i = 0; i < nw; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return failures.load() == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"blowuplab: blow-up criteria lab for Vlasov/Navier-Stokes and related systems"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    std::vector<std::string> overrides;
    std::uint64_t seed_flag = 0;
    bool seed_set = false;

    auto add_common = [&](CLI::App* cmd, bool need_scenario) {
        if (need_scenario)
            cmd->add_option("--scenario", scenario_path, "scenario JSON file")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--override", overrides, "key=value override (dotted JSON path)");
        cmd->add_option("--seed", seed_flag, "override initial_data.seed")
            ->each([&seed_set](const std::string&) { seed_set = true; });
    };

    auto* check = app.add_subcommand("check", "evaluate the blow-up gate and T*");
    add_common(check, true);

    auto* simulate = app.add_subcommand("simulate", "run the 1D simulator and identity checks");
    add_common(simulate, true);

    double ga = 1.0, gb = 1.0, gbeta = 1.0, gf0 = 1.0, gtend = 10.0;
    int gpoints = 64;
    std::string gout;
    auto* gron = app.add_subcommand("gronwall", "closed-form bound vs ODE oracle CSV");
    gron->add_option("--a", ga, "coefficient a > 0")->required();
    gron->add_option("--b", gb, "coefficient b >= 0")->required();
    gron->add_option("--beta", gbeta, "exponent beta in (0, 1]")->required();
    gron->add_option("--f0", gf0, "initial value f(0) >= 0");
    gron->add_option("--t-end", gtend, "last sample time");
    gron->add_option("--points", gpoints, "log grid size");
    gron->add_option("--out", gout, "output CSV (default: stdout)");

    std::string run_dir;
    auto* report = app.add_subcommand("report", "summarize a run directory");
    report->add_option("--run", run_dir, "run directory with manifest.json")->required();

    std::vector<std::string> sweep_files;
    std::string sweep_out = "runs";
    int jobs = 2;
    auto* sweep = app.add_subcommand("sweep", "run many scenarios with isolated outputs");
    sweep->add_option("--scenarios", sweep_files, "scenario files")->required();
    sweep->add_option("--out", sweep_out, "output root directory");
    sweep->add_option("--jobs", jobs, "worker threads");
    sweep->add_option("--override", overrides, "key=value override applied to every scenario");

    CLI11_PARSE(app, argc, argv);

    try {
        std::optional<std::uint64_t> seed;
        if (seed_set) seed = seed_flag;
        if (check->parsed()) return cmd_check(scenario_path, out_dir, overrides, seed);
        if (simulate->parsed()) return cmd_simulate(scenario_path, out_dir, overrides, seed);
        if (gron->parsed()) return cmd_gronwall(ga, gb, gbeta, gf0, gtend, gpoints, gout);
        if (report->parsed()) return cmd_report(run_dir);
        if (sweep->parsed()) return cmd_sweep(sweep_files, sweep_out, jobs, overrides);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
