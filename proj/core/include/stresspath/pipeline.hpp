#pragma once

#include <memory>

#include "stresspath/config.hpp"
#include "stresspath/metrics.hpp"
#include "stresspath/toolpath.hpp"
#include "stresspath/trajopt.hpp"

namespace stresspath {

struct PipelineResult {
  ToolpathProgram program;
  AlignmentReport alignment;
  SpacingReport spacing;
};

// Boundary nodes on the selected bounding-box face (xmin/.../zmax) within
// `tol` of the extreme coordinate.
std::vector<int> select_region_nodes(const TetMesh& mesh, const std::string& selector,
                                     double tol);

// Fixes and loads from the config, with region selectors expanded over the
// boundary nodes (region loads are spread evenly across the region).
BoundaryConditions assemble_boundary_conditions(const TetMesh& mesh, const Config& cfg);

// Staged pipeline driver. Each stage writes its artifacts into the output
// directory and reuses artifacts already present there, so downstream
// parameters can change without recomputing upstream results. Stage errors
// carry the stage name.
class PipelineRunner {
 public:
  explicit PipelineRunner(Config cfg);
  ~PipelineRunner();

  void run_fea();
  void run_slice();
  void run_flow();
  void run_paths();
  PipelineResult run_metrics();

  // Full fresh run: ignores cached artifacts and recomputes everything.
  PipelineResult run_all();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

// One-shot pipeline on a config (fresh run, all artifacts written).
PipelineResult run_pipeline(const Config& cfg);

}  // namespace stresspath
