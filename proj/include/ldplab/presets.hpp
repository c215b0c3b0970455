#pragma once

#include "ldplab/checks.hpp"
#include "ldplab/experiments.hpp"
#include "ldplab/io.hpp"

#include <nlohmann/json.hpp>

#include <memory>
#include <string>

namespace ldplab {

inline constexpr const char* kToolVersion = "ldp-lab 0.1.0";

/// A named system instantiated on a grid: coefficients, default initial
/// state, solver settings, and a default event for rare-event runs.
struct PresetBundle {
    std::string system;
    std::shared_ptr<CoefficientSet> coeffs;
    SpectralField initial;
    SolverConfig solver;
    EventSpec event;
    bool oracle_preset = false;  ///< analytic-oracle system, labeled in outputs
};

/// Parsed and normalized experiment description. `raw` (the normalized
/// JSON) determines every output byte of a run.
struct ExperimentManifest {
    nlohmann::json raw;
    std::string system;
    uint64_t seed = 1;

    static ExperimentManifest from_json(nlohmann::json j);
};

/// Thrown when eager validation rejects a manifest; carries the report.
struct ValidationError : std::runtime_error {
    CheckReport report;
    explicit ValidationError(CheckReport r)
        : std::runtime_error("manifest validation failed: " + r.name), report(std::move(r)) {}
};

/// Reads, parses and eagerly validates a manifest file: criticality
/// arithmetic, parabolicity and noise-smallness run before any compute.
ExperimentManifest load_manifest(const std::string& path);

/// Builds the system (coefficients + initial state + solver config) a
/// manifest describes. Preset exponents are asserted against their pinned
/// values here.
PresetBundle build_system(const ExperimentManifest& m);

/// The eager validation battery for a manifest (also run by load_manifest).
std::vector<CheckReport> run_eager_checks(const ExperimentManifest& m);

/// Builds the control path a manifest's "control" section describes.
Control build_control(const ExperimentManifest& m, const PresetBundle& bundle);

/// Event with a concrete threshold; relative thresholds (negative in the
/// manifest) resolve against the zero-control trajectory.
EventSpec resolve_manifest_event(const PresetBundle& bundle, const ExperimentManifest& m);

/// One trajectory in the manifest's configuration. Modes: skeleton | ito |
/// tilted | stratonovich. The sidecar records hash, seed, mode, flags, and
/// (two-species skeleton runs) the a priori bound audit; `failures` counts
/// audit violations.
struct SimOutcome {
    Trajectory traj;
    nlohmann::json sidecar;
    int failures = 0;
};
SimOutcome simulate_from_manifest(const ExperimentManifest& m, const PresetBundle& bundle,
                                  const std::string& mode);

/// The manifest's rate query against the resolved event or field target.
RateResult rate_from_manifest(const ExperimentManifest& m, const PresetBundle& bundle,
                              const EventSpec& event);

/// Executes every task the manifest requests into `outdir` (created if
/// missing): deterministic artifact bytes given the manifest; timestamps go
/// only to run.log. Returns the number of failed checks/tasks.
int run_manifest(const ExperimentManifest& m, const std::string& outdir);

/// FNV-1a content hash of the normalized manifest (hex string).
std::string manifest_hash(const ExperimentManifest& m);

// control-path serialization (binary: "LDPC", steps, modes, dt, values)
void write_control_file(const std::string& path, const Control& c);
Control read_control_file(const std::string& path);

} // namespace ldplab
