#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "wbary/consistency.hpp"
#include "wbary/multimarginal.hpp"
#include "wbary/transport.hpp"

namespace wbary::io {

/// Measure file: {"space": {...}, "atoms": [[...], ...], "weights": [...]}.
/// Euclidean spaces are {"type":"euclidean","dim":d}; metric spaces are
/// {"type":"metric","points":[labels],"dist":[[...]]} and their atoms are
/// labels. Reals are written in shortest round-trip form (up to 17
/// significant digits).
struct MeasureFile {
  Space space;
  DiscreteMeasure measure;
};

MeasureFile parse_measure(const std::string& text, WeightTolerance tol = {});
std::string dump_measure(const Space& s, const DiscreteMeasure& m);

/// Ensemble file: {"space": {...}, "lambda": [...], "measures": [...]};
/// members may omit "space" and inherit the ensemble's; when the ensemble
/// has no "space" the first member's is used.
MeasureEnsemble parse_ensemble(const std::string& text, WeightTolerance tol = {});
std::string dump_ensemble(const MeasureEnsemble& e);

/// Support file: either a measure file (its atoms) or {"points": [...]}.
std::vector<Point> parse_support(const std::string& text, const Space& s);

/// {"n":..,"m":..,"cost":..,"triplets":[[i,j,mass],...]}
std::string dump_plan(const TransportPlan& plan);

/// {"objective":..,"dual_objective":..,"entries":[{"index":[...],"mass":..}]}
std::string dump_coupling(const MultiCoupling& c);

/// Experiment config JSON; throws Error(InvalidConfig) for schema problems.
ExperimentConfig parse_experiment_config(const std::string& text);

/// Columns: framework,size,replication,dist_to_ref,ensemble_dist,objective,wall_ms,status
std::string report_csv(const ConsistencyReport& report);

/// Reads a whole file; throws Error(Io) naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Shortest representation that parses back to the same double.
std::string format_real(double x);

}  // namespace wbary::io
