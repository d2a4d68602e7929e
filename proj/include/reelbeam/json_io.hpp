#pragma once

#include <string>

#include "reelbeam/harness.hpp"
#include "reelbeam/model.hpp"
#include "reelbeam/reelbf.hpp"

namespace reelbeam::json_io {

// Complex entries serialize as [re, im]; matrices as row-major nested arrays;
// infinite bounds as the strings "inf" / "-inf".

std::string problem_to_json(const model::BeamformingProblem& p, int indent = 2);
model::BeamformingProblem problem_from_json(const std::string& text);

std::string solution_to_json(const reelbf::ReelBfSolution& s, int indent = 2);
reelbf::ReelBfSolution solution_from_json(const std::string& text);

std::string config_to_json(const harness::ExperimentConfig& cfg, int indent = 2);
harness::ExperimentConfig config_from_json(const std::string& text);

std::string scenario_to_json(const harness::Scenario& sc, int indent = 2);
harness::Scenario scenario_from_json(const std::string& text);

}  // namespace reelbeam::json_io
