// Command-line front end. Every verb reads the same manifest format.
//   check     --config m.json [--samples N] [--seed S] --report out.json
//   simulate  --config m.json [--eps E] [--seed S] --mode M --out traj.bin
//   skeleton  --config m.json [--seed S] --out traj.bin
//   rate      --config m.json [--target field.bin] --out rate.json
//   mc|curve|converge|tightness --config m.json [--eps E] --out table.csv
//   run       --config m.json --out artifact_dir
// File-target verbs write a sidecar <out>.json next to binary outputs.
// Exit code 0 only when every requested check/audit passes.

#include "ldplab/presets.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>

using namespace ldplab;
namespace fs = std::filesystem;

namespace {

ExperimentManifest load_with_overrides(const std::string& config, nlohmann::json patch) {
    ExperimentManifest m = load_manifest(config);
    if (!patch.empty()) {
        m.raw.merge_patch(patch);
        m = ExperimentManifest::from_json(m.raw);
    }
    return m;
}

void write_csv(const std::string& path, const std::string& header,
               const std::vector<std::vector<double>>& rows) {
    std::string out = header + "\n";
    char buf[64];
    for (const auto& row : rows) {
        for (size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            out += (i ? "," : "");
            out += buf;
        }
        out += "\n";
    }
    write_text_file(path, out);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"ldp-lab: small-noise stochastic evolution laboratory"};
    app.require_subcommand(1);

    std::string config, out, report, mode = "ito", target;
    double eps = -1.0;
    long long seed = -1;
    long samples = -1;

    auto add_common = [&](CLI::App* sub, const char* out_help) {
        sub->add_option("--config", config, "manifest file")->required();
        sub->add_option("--seed", seed, "override seed");
        sub->add_option("--out", out, out_help);
    };

    auto* c_check = app.add_subcommand("check", "run the structural-hypothesis checkers");
    add_common(c_check, "unused (see --report)");
    c_check->add_option("--samples", samples, "samples per sampled check");
    c_check->add_option("--report", report, "JSON report path")->required();

    auto* c_sim = app.add_subcommand("simulate", "integrate one trajectory");
    add_common(c_sim, "trajectory file (binary snapshots)");
    c_sim->add_option("--eps", eps, "noise intensity");
    c_sim->add_option("--mode", mode, "skeleton|ito|tilted|stratonovich");

    auto* c_skel = app.add_subcommand("skeleton", "integrate the controlled deterministic path");
    add_common(c_skel, "trajectory file (binary snapshots)");

    auto* c_rate = app.add_subcommand("rate", "evaluate the control-cost upper bound");
    add_common(c_rate, "result JSON path");
    c_rate->add_option("--target", target, "terminal field file (default: manifest event)");

    std::map<std::string, CLI::App*> table_verbs;
    for (const char* verb : {"mc", "curve", "converge", "tightness"}) {
        auto* sub = app.add_subcommand(verb, std::string("run the ") + verb + " experiment");
        add_common(sub, "CSV table path");
        sub->add_option("--eps", eps, "noise intensity override");
        table_verbs[verb] = sub;
    }

    auto* c_run = app.add_subcommand("run", "execute the manifest's full task list");
    add_common(c_run, "artifact directory");

    CLI11_PARSE(app, argc, argv);
    if (out.empty()) out = app.got_subcommand("run") ? "out" : "";

    try {
        nlohmann::json patch = nlohmann::json::object();
        if (seed >= 0) patch["seed"] = seed;
        if (eps >= 0) patch["solver"]["epsilon"] = eps;

        for (const std::string& path : {out, report})
            if (!path.empty() && !app.got_subcommand("run")) {
                const fs::path parent = fs::path(path).parent_path();
                if (!parent.empty()) fs::create_directories(parent);
            }

        int failures = 0;
        if (app.got_subcommand("check")) {
            if (samples > 0) patch["checks"]["samples"] = samples;
            const ExperimentManifest m = load_with_overrides(config, patch);
            const PresetBundle bundle = build_system(m);
            auto reports = run_eager_checks(m);
            const long nsamp = m.raw["checks"].value("samples", 2000);
            reports.push_back(check_linear_coercivity(*bundle.coeffs, nsamp, m.seed));
            if (m.raw["checks"].value("full_coercivity", false))
                reports.push_back(check_full_coercivity(*bundle.coeffs, nsamp, m.seed));
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : reports) {
                if (!r.passed()) ++failures;
                arr.push_back(r.to_json());
            }
            write_text_file(report, arr.dump(2) + "\n");
        } else if (app.got_subcommand("simulate") || app.got_subcommand("skeleton")) {
            if (app.got_subcommand("skeleton")) mode = "skeleton";
            if (out.empty()) out = "traj.bin";
            const ExperimentManifest m = load_with_overrides(config, patch);
            const PresetBundle bundle = build_system(m);
            const SimOutcome sim = simulate_from_manifest(m, bundle, mode);
            failures += sim.failures;
            write_trajectory_file(out, sim.traj);
            write_text_file(out + ".json", sim.sidecar.dump(2) + "\n");
        } else if (app.got_subcommand("rate")) {
            if (!target.empty()) {
                patch["target"]["kind"] = "field";
                patch["target"]["file"] = target;
            }
            if (out.empty()) out = "rate.json";
            const ExperimentManifest m = load_with_overrides(config, patch);
            const PresetBundle bundle = build_system(m);
            const EventSpec ev = resolve_manifest_event(bundle, m);
            const RateResult r = rate_from_manifest(m, bundle, ev);
            const std::string control_path =
                (fs::path(out).parent_path() / "control_opt.bin").string();
            write_control_file(control_path.empty() ? "control_opt.bin" : control_path, r.control);
            nlohmann::json rj;
            rj["value"] = r.converged ? nlohmann::json(r.value) : nlohmann::json("inf");
            rj["converged"] = r.converged;
            rj["mismatch"] = r.mismatch;
            rj["iterations"] = r.iterations;
            rj["control_file"] = "control_opt.bin";
            write_text_file(out, rj.dump(2) + "\n");
        } else if (app.got_subcommand("mc")) {
            if (out.empty()) out = "mc.csv";
            const ExperimentManifest m = load_with_overrides(config, patch);
            const PresetBundle bundle = build_system(m);
            const EventSpec ev = resolve_manifest_event(bundle, m);
            const long n = m.raw["mc"].value("n", 1000);
            const McEstimate est = mc_probability(*bundle.coeffs, bundle.initial,
                                                  bundle.solver.epsilon, ev, n, m.seed, nullptr,
                                                  bundle.solver);
            write_csv(out, "eps,estimate,stderr,n,seed_base,importance",
                      {{est.eps, est.p_hat, est.stderr_, static_cast<double>(est.n_samples),
                        static_cast<double>(m.seed), 0.0}});
        } else if (app.got_subcommand("curve")) {
            if (out.empty()) out = "curve.csv";
            const ExperimentManifest m = load_with_overrides(config, patch);
            const PresetBundle bundle = build_system(m);
            const EventSpec ev = resolve_manifest_event(bundle, m);
            const RateResult rate = rate_from_manifest(m, bundle, ev);
            const auto& lj = m.raw.at("ladder");
            const EpsilonLadder ladder = EpsilonLadder::make(
                lj.at("values").get<std::vector<double>>(), lj.at("samples_per_eps").get<int>(),
                lj.at("seed_base").get<uint64_t>());
            const auto rows =
                ldp_decay_curve(*bundle.coeffs, bundle.initial, ev, ladder, rate, bundle.solver);
            std::vector<std::vector<double>> cells;
            for (const auto& r : rows)
                cells.push_back({r.eps, r.eps_log_p, r.neg_rate, r.estimate.p_hat,
                                 r.estimate.stderr_, static_cast<double>(r.estimate.n_samples),
                                 r.degenerate ? 1.0 : 0.0});
            write_csv(out, "eps,eps_log_p,neg_rate,estimate,stderr,n,degenerate", cells);
        } else if (app.got_subcommand("converge")) {
            if (out.empty()) out = "converge.csv";
            const ExperimentManifest m = load_with_overrides(config, patch);
            const PresetBundle bundle = build_system(m);
            const auto& lj = m.raw.at("ladder");
            const EpsilonLadder ladder = EpsilonLadder::make(
                lj.at("values").get<std::vector<double>>(), m.raw["converge"].value("n", 200),
                lj.at("seed_base").get<uint64_t>());
            const Control psi = build_control(m, bundle);
            const auto rows =
                convergence_study(*bundle.coeffs, bundle.initial, psi, ladder, bundle.solver);
            std::vector<std::vector<double>> cells;
            for (const auto& r : rows)
                cells.push_back({r.eps, r.median, r.q90, static_cast<double>(r.blown_up),
                                 static_cast<double>(r.n)});
            write_csv(out, "eps,median,q90,blown_up,n", cells);
        } else if (app.got_subcommand("tightness")) {
            if (out.empty()) out = "tightness.csv";
            const ExperimentManifest m = load_with_overrides(config, patch);
            const PresetBundle bundle = build_system(m);
            const auto& tj = m.raw.at("tightness");
            const Control psi = build_control(m, bundle);
            std::vector<Control> family;
            if (!psi.is_zero()) family.push_back(psi);
            const auto rows = tightness_probe(
                *bundle.coeffs, bundle.initial, family,
                m.raw.at("ladder").at("values").get<std::vector<double>>(),
                tj.at("gammas").get<std::vector<double>>(), tj.at("n").get<int>(), m.seed,
                bundle.solver);
            std::vector<std::vector<double>> cells;
            for (const auto& r : rows)
                cells.push_back({r.eps, r.gamma, r.tail, static_cast<double>(r.n)});
            write_csv(out, "eps,gamma,tail,n", cells);
        } else if (app.got_subcommand("run")) {
            const ExperimentManifest m = load_with_overrides(config, patch);
            failures = run_manifest(m, out);
        }
        if (failures > 0) {
            std::cerr << failures << " check(s)/audit(s) failed\n";
            return 1;
        }
        return 0;
    } catch (const ValidationError& e) {
        std::cerr << "validation: " << e.what() << "\n" << e.report.to_json().dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
